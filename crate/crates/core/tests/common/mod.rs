//! Random instances and a naive reference semantics used as an oracle.
//!
//! The reference code works on explicit relations and maps and shares no
//! evaluation code with the library; it is slow on purpose.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use progs::{
    link_shapes, Assignment, Atom, CmpOp, EdgeConstraint, EdgeId, EdgeTarget, Element, GraphBuilder, NodeConstraint,
    NodeId, NodeTarget, PathExpr, PropertyGraph, SetComparator, Shape, ShapeSet, TruthValue, Value, ValuePredicate,
    ValueType,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MAX_ATOMS: usize = 12;

#[derive(Debug, Clone)]
pub struct Instance {
    pub g: PropertyGraph,
    pub s: ShapeSet,
}

impl Instance {
    pub fn atom_count(&self) -> usize {
        self.s.node_shape_count() * self.g.node_count() + self.s.edge_shape_count() * self.g.edge_count()
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const NODE_LABELS: [&str; 2] = ["A", "B"];
const EDGE_LABELS: [&str; 2] = ["p", "q"];

pub fn random_graph(r: &mut ChaCha8Rng, max_nodes: usize, max_edges: usize) -> PropertyGraph {
    let n = r.gen_range(1..=max_nodes);
    let m = r.gen_range(0..=max_edges);
    let mut b = GraphBuilder::new();
    for i in 1..=n {
        let id = i.to_string();
        b.node(id.as_str());
        for l in NODE_LABELS {
            if r.gen_bool(0.4) {
                b.node_label(id.as_str(), l);
            }
        }
        for _ in 0..r.gen_range(0..=2) {
            b.node_property(id.as_str(), "k", Value::int(r.gen_range(0..3)));
        }
        if r.gen_bool(0.3) {
            b.node_property(id.as_str(), "j", Value::int(r.gen_range(0..3)));
        }
        if r.gen_bool(0.2) {
            b.node_property(id.as_str(), "j", Value::str(["x", "y"][r.gen_range(0..2)]));
        }
    }
    for i in 0..m {
        let id = (11 + i).to_string();
        let src = r.gen_range(1..=n).to_string();
        let dst = r.gen_range(1..=n).to_string();
        b.edge(id.as_str(), src.as_str(), dst.as_str());
        b.edge_label(id.as_str(), *EDGE_LABELS.choose(r).unwrap());
        if r.gen_bool(0.15) {
            b.edge_label(id.as_str(), *EDGE_LABELS.choose(r).unwrap());
        }
        if r.gen_bool(0.4) {
            b.edge_property(id.as_str(), "k", Value::int(r.gen_range(0..3)));
        }
        if r.gen_bool(0.2) {
            b.edge_property(id.as_str(), "w", Value::date(2020, 1, r.gen_range(1..3)));
        }
    }
    b.build().expect("generated graph is well formed")
}

pub fn random_path(r: &mut ChaCha8Rng, depth: usize) -> PathExpr {
    if depth == 0 || r.gen_bool(0.45) {
        return PathExpr::label(*EDGE_LABELS.choose(r).unwrap());
    }
    match r.gen_range(0..6) {
        0 => random_path(r, depth - 1).inverse(),
        1 => random_path(r, depth - 1).then(random_path(r, depth - 1)),
        2 => random_path(r, depth - 1).or(random_path(r, depth - 1)),
        3 => random_path(r, depth - 1).star(),
        4 => random_path(r, depth - 1).plus(),
        _ => random_path(r, depth - 1).opt(),
    }
}

fn random_value(r: &mut ChaCha8Rng) -> Value {
    match r.gen_range(0..4) {
        0 => Value::str("x"),
        1 => Value::date(2020, 1, 2),
        _ => Value::int(r.gen_range(0..3)),
    }
}

pub fn random_pred(r: &mut ChaCha8Rng, depth: usize) -> ValuePredicate {
    if depth == 0 || r.gen_bool(0.6) {
        return match r.gen_range(0..4) {
            0 => ValuePredicate::Any,
            1 => ValuePredicate::TypeIs([ValueType::Int, ValueType::Str, ValueType::Date][r.gen_range(0..3)]),
            _ => ValuePredicate::cmp(*CmpOp::ALL.choose(r).unwrap(), random_value(r)),
        };
    }
    if r.gen_bool(0.5) {
        random_pred(r, depth - 1).negate()
    } else {
        random_pred(r, depth - 1).and(random_pred(r, depth - 1))
    }
}

fn random_key(r: &mut ChaCha8Rng) -> String {
    ["k", "j", "w"][r.gen_range(0..3)].to_string()
}

/// Shape names by kind, for references.
pub struct Names {
    pub node: Vec<String>,
    pub edge: Vec<String>,
}

pub fn random_node_constraint(r: &mut ChaCha8Rng, g: &PropertyGraph, names: &Names, depth: usize) -> NodeConstraint {
    if depth == 0 || r.gen_bool(0.3) {
        return match r.gen_range(0..8) {
            0 => NodeConstraint::True,
            1 | 2 if !names.node.is_empty() => NodeConstraint::shape(names.node.choose(r).unwrap().clone()),
            3 => NodeConstraint::ExactNode(g.nodes().choose(r).unwrap().clone()),
            4 => NodeConstraint::key_at_least(r.gen_range(0..=2), random_key(r), random_pred(r, 1)),
            5 => NodeConstraint::KeyCmp {
                op: *SetComparator::ALL.choose(r).unwrap(),
                left: random_key(r),
                right: random_key(r),
            },
            6 => NodeConstraint::PathCmp {
                op: *SetComparator::ALL.choose(r).unwrap(),
                left: random_path(r, 1),
                right: random_path(r, 1),
            },
            _ => NodeConstraint::label(*NODE_LABELS.choose(r).unwrap()),
        };
    }
    let d = depth - 1;
    match r.gen_range(0..7) {
        0 => random_node_constraint(r, g, names, d).negate(),
        1 => random_node_constraint(r, g, names, d).and(random_node_constraint(r, g, names, d)),
        2 | 3 => {
            NodeConstraint::at_least(r.gen_range(0..=2), random_path(r, 2), random_node_constraint(r, g, names, d))
        }
        4 => NodeConstraint::incoming(r.gen_range(0..=2), random_edge_constraint(r, g, names, d)),
        5 => NodeConstraint::outgoing(r.gen_range(0..=2), random_edge_constraint(r, g, names, d)),
        _ => NodeConstraint::PathKeyCmp {
            op: *SetComparator::ALL.choose(r).unwrap(),
            left_path: random_path(r, 1),
            left_key: random_key(r),
            right_path: random_path(r, 1),
            right_key: random_key(r),
        },
    }
}

pub fn random_edge_constraint(r: &mut ChaCha8Rng, g: &PropertyGraph, names: &Names, depth: usize) -> EdgeConstraint {
    if depth == 0 || r.gen_bool(0.3) {
        return match r.gen_range(0..6) {
            0 => EdgeConstraint::True,
            1 if !names.edge.is_empty() => EdgeConstraint::shape(names.edge.choose(r).unwrap().clone()),
            2 if g.edge_count() > 0 => EdgeConstraint::ExactEdge(g.edges().choose(r).unwrap().clone()),
            3 => EdgeConstraint::key_at_least(r.gen_range(0..=2), random_key(r), random_pred(r, 1)),
            4 => EdgeConstraint::KeyCmp {
                op: *SetComparator::ALL.choose(r).unwrap(),
                left: random_key(r),
                right: random_key(r),
            },
            _ => EdgeConstraint::label(*EDGE_LABELS.choose(r).unwrap()),
        };
    }
    let d = depth - 1;
    match r.gen_range(0..4) {
        0 => random_edge_constraint(r, g, names, d).negate(),
        1 => random_edge_constraint(r, g, names, d).and(random_edge_constraint(r, g, names, d)),
        2 => EdgeConstraint::src(random_node_constraint(r, g, names, d)),
        _ => EdgeConstraint::dst(random_node_constraint(r, g, names, d)),
    }
}

fn random_node_target(r: &mut ChaCha8Rng, g: &PropertyGraph) -> NodeTarget {
    match r.gen_range(0..6) {
        0 | 1 => NodeTarget::Nothing,
        2 => NodeTarget::Exact(g.nodes().choose(r).unwrap().clone()),
        3 => NodeTarget::HasLabel(NODE_LABELS.choose(r).unwrap().to_string()),
        4 => NodeTarget::HasKey(random_key(r)),
        _ => NodeTarget::HasKeyValue("k".into(), Value::int(r.gen_range(0..3))),
    }
}

fn random_edge_target(r: &mut ChaCha8Rng, g: &PropertyGraph) -> EdgeTarget {
    match r.gen_range(0..6) {
        0 | 1 => EdgeTarget::Nothing,
        2 => EdgeTarget::Exact(g.edges().choose(r).unwrap().clone()),
        3 => EdgeTarget::HasLabel(EDGE_LABELS.choose(r).unwrap().to_string()),
        4 => EdgeTarget::HasKey(random_key(r)),
        _ => EdgeTarget::HasKeyValue("k".into(), Value::int(r.gen_range(0..3))),
    }
}

/// An instance with at most 4 nodes, 6 edges, 3 shapes, [`MAX_ATOMS`]
/// atoms and constraint depth 3.
pub fn random_instance(r: &mut ChaCha8Rng) -> Instance {
    random_instance_with(r, 4, 6, 3, 3)
}

pub fn random_instance_with(
    r: &mut ChaCha8Rng,
    max_nodes: usize,
    max_edges: usize,
    max_shapes: usize,
    depth: usize,
) -> Instance {
    let g = random_graph(r, max_nodes, max_edges);
    let count = r.gen_range(1..=max_shapes);
    let mut names = Names { node: Vec::new(), edge: Vec::new() };
    let mut atoms = 0;
    for i in 0..count {
        let edge = g.edge_count() > 0 && r.gen_bool(0.25);
        let (cost, list) = if edge { (g.edge_count(), &mut names.edge) } else { (g.node_count(), &mut names.node) };
        if atoms + cost > MAX_ATOMS && i > 0 {
            continue;
        }
        atoms += cost;
        list.push(format!("s{i}"));
    }
    let mut shapes = Vec::new();
    for name in &names.node {
        let c = random_node_constraint(r, &g, &names, depth);
        shapes.push(Shape::node(name.clone(), c, random_node_target(r, &g)));
    }
    for name in &names.edge {
        let c = random_edge_constraint(r, &g, &names, depth);
        shapes.push(Shape::edge(name.clone(), c, random_edge_target(r, &g)));
    }
    shapes.sort_by(|a, b| a.name().cmp(b.name()));
    let s = link_shapes(shapes).expect("generated shapes link");
    Instance { g, s }
}

/// A uniformly random total assignment over the instance's atoms.
pub fn random_assignment(r: &mut ChaCha8Rng, g: &PropertyGraph, s: &ShapeSet) -> Assignment {
    reference_atoms(g, s).into_iter().map(|a| (a, TruthValue::ALL[r.gen_range(0..3)])).collect()
}

// ---------------------------------------------------------------------------
// Reference semantics. Truth values are scaled by two: 0, 1 (for ½), 2.

pub type Rel = BTreeSet<(NodeId, NodeId)>;

pub fn to_tv(v: u8) -> TruthValue {
    match v {
        0 => TruthValue::False,
        1 => TruthValue::Unknown,
        _ => TruthValue::True,
    }
}

pub fn from_tv(v: TruthValue) -> u8 {
    match v {
        TruthValue::False => 0,
        TruthValue::Unknown => 1,
        TruthValue::True => 2,
    }
}

fn identity(g: &PropertyGraph) -> Rel {
    g.nodes().iter().map(|n| (n.clone(), n.clone())).collect()
}

fn compose(a: &Rel, b: &Rel) -> Rel {
    let mut out = Rel::new();
    for (x, y) in a {
        for (y2, z) in b {
            if y == y2 {
                out.insert((x.clone(), z.clone()));
            }
        }
    }
    out
}

fn closure(g: &PropertyGraph, r: &Rel, reflexive: bool) -> Rel {
    let mut acc = if reflexive { identity(g).union(r).cloned().collect() } else { r.clone() };
    loop {
        let next: Rel = acc.union(&compose(&acc, r)).cloned().collect();
        if next == acc {
            return acc;
        }
        acc = next;
    }
}

/// The path as a binary relation over nodes.
pub fn reference_relation(g: &PropertyGraph, p: &PathExpr) -> Rel {
    match p {
        PathExpr::Label(l) => g
            .edges()
            .iter()
            .filter(|e| g.labels(&Element::Edge((*e).clone())).unwrap().contains(l))
            .map(|e| {
                let (s, d) = g.endpoints(e).unwrap();
                (s.clone(), d.clone())
            })
            .collect(),
        PathExpr::Inverse(q) => reference_relation(g, q).into_iter().map(|(a, b)| (b, a)).collect(),
        PathExpr::Seq(a, b) => compose(&reference_relation(g, a), &reference_relation(g, b)),
        PathExpr::Alt(a, b) => reference_relation(g, a).union(&reference_relation(g, b)).cloned().collect(),
        PathExpr::Star(q) => closure(g, &reference_relation(g, q), true),
        PathExpr::Plus(q) => closure(g, &reference_relation(g, q), false),
        PathExpr::Opt(q) => reference_relation(g, q).union(&identity(g)).cloned().collect(),
    }
}

pub fn reference_path(g: &PropertyGraph, n: &NodeId, p: &PathExpr) -> BTreeSet<NodeId> {
    reference_relation(g, p).into_iter().filter(|(a, _)| a == n).map(|(_, b)| b).collect()
}

fn values(g: &PropertyGraph, el: &Element, key: &str) -> BTreeSet<Value> {
    g.property_values(el, key).unwrap()
}

fn same_type_order(a: &Value, b: &Value) -> Option<std::cmp::Ordering> {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => Some(x.cmp(y)),
        (Value::Str(x), Value::Str(y)) => Some(x.cmp(y)),
        (Value::Date(x), Value::Date(y)) => Some(x.cmp(y)),
        _ => None,
    }
}

fn op_holds(op: CmpOp, a: &Value, b: &Value) -> bool {
    use std::cmp::Ordering::*;
    match same_type_order(a, b) {
        None => false,
        Some(o) => match op {
            CmpOp::Eq => o == Equal,
            CmpOp::Ne => o != Equal,
            CmpOp::Lt => o == Less,
            CmpOp::Le => o == Less || o == Equal,
            CmpOp::Gt => o == Greater,
            CmpOp::Ge => o == Greater || o == Equal,
        },
    }
}

pub fn reference_pred(f: &ValuePredicate, v: &Value) -> bool {
    match f {
        ValuePredicate::Any => true,
        ValuePredicate::TypeIs(t) => {
            matches!(
                (t, v),
                (ValueType::Int, Value::Int(_)) | (ValueType::Str, Value::Str(_)) | (ValueType::Date, Value::Date(_))
            )
        }
        ValuePredicate::Cmp(op, c) => op_holds(*op, v, c),
        ValuePredicate::Not(f) => !reference_pred(f, v),
        ValuePredicate::And(a, b) => reference_pred(a, v) && reference_pred(b, v),
    }
}

fn set_holds<T: Ord>(op: SetComparator, a: &BTreeSet<T>, b: &BTreeSet<T>) -> Option<bool> {
    Some(match op {
        SetComparator::Eq => a == b,
        SetComparator::Neq => a != b,
        SetComparator::SubsetEq => a.iter().all(|x| b.contains(x)),
        SetComparator::Subset => a.iter().all(|x| b.contains(x)) && a != b,
        SetComparator::SupersetEq => b.iter().all(|x| a.contains(x)),
        SetComparator::Superset => b.iter().all(|x| a.contains(x)) && a != b,
        SetComparator::Disjoint => a.iter().all(|x| !b.contains(x)),
        _ => return None,
    })
}

fn values_cmp(op: SetComparator, a: &BTreeSet<Value>, b: &BTreeSet<Value>) -> bool {
    if let Some(r) = set_holds(op, a, b) {
        return r;
    }
    if a.len() != 1 || b.len() != 1 {
        return false;
    }
    let (x, y) = (a.iter().next().unwrap(), b.iter().next().unwrap());
    let cmp = match op {
        SetComparator::Lt => CmpOp::Lt,
        SetComparator::Leq => CmpOp::Le,
        SetComparator::Gt => CmpOp::Gt,
        _ => CmpOp::Ge,
    };
    op_holds(cmp, x, y)
}

fn count(values: impl Iterator<Item = u8>, min: usize) -> u8 {
    let vs: Vec<u8> = values.collect();
    let ones = vs.iter().filter(|&&v| v == 2).count();
    let not_zero = vs.iter().filter(|&&v| v != 0).count();
    if ones >= min {
        2
    } else if not_zero < min {
        0
    } else {
        1
    }
}

pub type RefSigma = BTreeMap<Atom, u8>;

pub fn reference_node(g: &PropertyGraph, sigma: &RefSigma, n: &NodeId, c: &NodeConstraint) -> u8 {
    let el = Element::Node(n.clone());
    match c {
        NodeConstraint::True => 2,
        NodeConstraint::ShapeRef(s) => sigma[&Atom::node(s.as_str(), n.as_str())],
        NodeConstraint::ExactNode(m) => 2 * u8::from(m == n),
        NodeConstraint::HasLabel(l) => 2 * u8::from(g.labels(&el).unwrap().contains(l)),
        NodeConstraint::Not(c) => 2 - reference_node(g, sigma, n, c),
        NodeConstraint::And(a, b) => reference_node(g, sigma, n, a).min(reference_node(g, sigma, n, b)),
        NodeConstraint::QualPath { min, path, body } => {
            count(reference_path(g, n, path).iter().map(|m| reference_node(g, sigma, m, body)), *min)
        }
        NodeConstraint::PathCmp { op, left, right } => {
            let a = reference_path(g, n, left);
            let b = reference_path(g, n, right);
            2 * u8::from(set_holds(*op, &a, &b).unwrap_or(false))
        }
        NodeConstraint::QualKey { min, key, pred } => {
            2 * u8::from(values(g, &el, key).iter().filter(|v| reference_pred(pred, v)).count() >= *min)
        }
        NodeConstraint::QualIncoming { min, body } | NodeConstraint::QualOutgoing { min, body } => {
            let outgoing = matches!(c, NodeConstraint::QualOutgoing { .. });
            let incident = g.edges().iter().filter(|e| {
                let (s, d) = g.endpoints(e).unwrap();
                if outgoing {
                    s == n
                } else {
                    d == n
                }
            });
            count(incident.map(|e| reference_edge(g, sigma, e, body)), *min)
        }
        NodeConstraint::PathKeyCmp { op, left_path, left_key, right_path, right_key } => {
            let along = |p: &PathExpr, k: &str| -> BTreeSet<Value> {
                reference_path(g, n, p).into_iter().flat_map(|m| values(g, &Element::Node(m), k)).collect()
            };
            2 * u8::from(values_cmp(*op, &along(left_path, left_key), &along(right_path, right_key)))
        }
        NodeConstraint::KeyCmp { op, left, right } => {
            2 * u8::from(values_cmp(*op, &values(g, &el, left), &values(g, &el, right)))
        }
    }
}

pub fn reference_edge(g: &PropertyGraph, sigma: &RefSigma, e: &EdgeId, c: &EdgeConstraint) -> u8 {
    let el = Element::Edge(e.clone());
    match c {
        EdgeConstraint::True => 2,
        EdgeConstraint::ShapeRef(s) => sigma[&Atom::edge(s.as_str(), e.as_str())],
        EdgeConstraint::ExactEdge(x) => 2 * u8::from(x == e),
        EdgeConstraint::HasLabel(l) => 2 * u8::from(g.labels(&el).unwrap().contains(l)),
        EdgeConstraint::Not(c) => 2 - reference_edge(g, sigma, e, c),
        EdgeConstraint::And(a, b) => reference_edge(g, sigma, e, a).min(reference_edge(g, sigma, e, b)),
        EdgeConstraint::QualKey { min, key, pred } => {
            2 * u8::from(values(g, &el, key).iter().filter(|v| reference_pred(pred, v)).count() >= *min)
        }
        EdgeConstraint::Src(c) => reference_node(g, sigma, g.endpoints(e).unwrap().0, c),
        EdgeConstraint::Dst(c) => reference_node(g, sigma, g.endpoints(e).unwrap().1, c),
        EdgeConstraint::KeyCmp { op, left, right } => {
            2 * u8::from(values_cmp(*op, &values(g, &el, left), &values(g, &el, right)))
        }
    }
}

pub fn reference_node_targets(g: &PropertyGraph, q: &NodeTarget) -> BTreeSet<NodeId> {
    g.nodes()
        .iter()
        .filter(|n| {
            let el = Element::Node((*n).clone());
            match q {
                NodeTarget::Nothing => false,
                NodeTarget::Exact(m) => m == *n,
                NodeTarget::HasLabel(l) => g.labels(&el).unwrap().contains(l),
                NodeTarget::HasKey(k) => !values(g, &el, k).is_empty(),
                NodeTarget::HasKeyValue(k, v) => values(g, &el, k).contains(v),
            }
        })
        .cloned()
        .collect()
}

pub fn reference_edge_targets(g: &PropertyGraph, q: &EdgeTarget) -> BTreeSet<EdgeId> {
    g.edges()
        .iter()
        .filter(|e| {
            let el = Element::Edge((*e).clone());
            match q {
                EdgeTarget::Nothing => false,
                EdgeTarget::Exact(x) => x == *e,
                EdgeTarget::HasLabel(l) => g.labels(&el).unwrap().contains(l),
                EdgeTarget::HasKey(k) => !values(g, &el, k).is_empty(),
                EdgeTarget::HasKeyValue(k, v) => values(g, &el, k).contains(v),
            }
        })
        .cloned()
        .collect()
}

pub fn reference_atoms(g: &PropertyGraph, s: &ShapeSet) -> Vec<Atom> {
    let mut out = Vec::new();
    for shape in s.shapes() {
        match shape {
            Shape::Node(ns) => out.extend(g.nodes().iter().map(|n| Atom::node(ns.name.as_str(), n.as_str()))),
            Shape::Edge(es) => out.extend(g.edges().iter().map(|e| Atom::edge(es.name.as_str(), e.as_str()))),
        }
    }
    out
}

pub fn reference_target_atoms(g: &PropertyGraph, s: &ShapeSet) -> Vec<Atom> {
    let mut out = Vec::new();
    for shape in s.shapes() {
        match shape {
            Shape::Node(ns) => out
                .extend(reference_node_targets(g, &ns.target).iter().map(|n| Atom::node(ns.name.as_str(), n.as_str()))),
            Shape::Edge(es) => out
                .extend(reference_edge_targets(g, &es.target).iter().map(|e| Atom::edge(es.name.as_str(), e.as_str()))),
        }
    }
    out
}

pub fn to_ref(sigma: &Assignment) -> RefSigma {
    sigma.iter().map(|(a, v)| (a.clone(), from_tv(v))).collect()
}

/// Every atom equals its constraint's value and every target is `1`.
pub fn reference_faithful(g: &PropertyGraph, s: &ShapeSet, sigma: &RefSigma) -> bool {
    let consistent =
        s.shapes().iter().all(|shape| match shape {
            Shape::Node(ns) => g.nodes().iter().all(|n| {
                sigma[&Atom::node(ns.name.as_str(), n.as_str())] == reference_node(g, sigma, n, &ns.constraint)
            }),
            Shape::Edge(es) => g.edges().iter().all(|e| {
                sigma[&Atom::edge(es.name.as_str(), e.as_str())] == reference_edge(g, sigma, e, &es.constraint)
            }),
        });
    consistent && reference_target_atoms(g, s).iter().all(|t| sigma[t] == 2)
}

/// Calls `f` on every assignment over the instance's atoms until it returns
/// `true`.
pub fn for_each_assignment(g: &PropertyGraph, s: &ShapeSet, mut f: impl FnMut(&RefSigma) -> bool) {
    let atoms = reference_atoms(g, s);
    let mut digits = vec![0u8; atoms.len()];
    loop {
        let sigma: RefSigma = atoms.iter().cloned().zip(digits.iter().copied()).collect();
        if f(&sigma) {
            return;
        }
        let mut i = 0;
        loop {
            if i == digits.len() {
                return;
            }
            digits[i] += 1;
            if digits[i] < 3 {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

pub fn reference_conforms(g: &PropertyGraph, s: &ShapeSet) -> bool {
    let mut found = false;
    for_each_assignment(g, s, |sigma| {
        found = reference_faithful(g, s, sigma);
        found
    });
    found
}

pub fn reference_faithful_assignments(g: &PropertyGraph, s: &ShapeSet) -> BTreeSet<Vec<(Atom, u8)>> {
    let mut out = BTreeSet::new();
    for_each_assignment(g, s, |sigma| {
        if reference_faithful(g, s, sigma) {
            out.insert(sigma.iter().map(|(a, v)| (a.clone(), *v)).collect());
        }
        false
    });
    out
}

pub fn from_ref(sigma: &RefSigma) -> Assignment {
    sigma.iter().map(|(a, v)| (a.clone(), to_tv(*v))).collect()
}

/// Brute-force conformance where `extra` atoms must be `1` in addition to
/// the targets of `s`.
pub fn reference_conforms_with(g: &PropertyGraph, s: &ShapeSet, extra: &[Atom]) -> bool {
    let mut found = false;
    for_each_assignment(g, s, |sigma| {
        found = reference_faithful(g, s, sigma) && extra.iter().all(|a| sigma[a] == 2);
        found
    });
    found
}

/// Replaces every path by its first label, so folding applies directly.
pub fn single_label_paths(s: &ShapeSet) -> ShapeSet {
    fn first_label(p: PathExpr) -> PathExpr {
        let mut label = None;
        p.for_each_subpath(&mut |q| {
            if label.is_none() {
                label = q.as_label().map(str::to_string);
            }
        });
        PathExpr::label(label.expect("paths contain a label"))
    }
    let shapes = s
        .shapes()
        .iter()
        .map(|shape| match shape {
            Shape::Node(ns) => {
                Shape::node(ns.name.clone(), ns.constraint.clone().map_paths(&mut first_label), ns.target.clone())
            }
            Shape::Edge(es) => {
                Shape::edge(es.name.clone(), es.constraint.clone().map_paths(&mut first_label), es.target.clone())
            }
        })
        .collect();
    link_shapes(shapes).unwrap()
}
