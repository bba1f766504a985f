//! Three-valued evaluation of target queries, paths and constraints under a
//! fixed assignment, and the strict-faithfulness check.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::Not;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::ast::{EdgeConstraint, EdgeTarget, NodeConstraint, NodeTarget, PathExpr, ShapeKind, ShapeSet};
use crate::graph::{EdgeId, Element, GraphError, NodeId, PropertyGraph, Value};

/// `0`, `½` or `1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TruthValue {
    False,
    Unknown,
    True,
}

impl TruthValue {
    pub const ALL: [TruthValue; 3] = [TruthValue::False, TruthValue::Unknown, TruthValue::True];

    pub fn from_bool(b: bool) -> Self {
        if b {
            TruthValue::True
        } else {
            TruthValue::False
        }
    }

    /// `min`
    pub fn and(self, other: TruthValue) -> TruthValue {
        self.min(other)
    }

    /// `max`
    pub fn or(self, other: TruthValue) -> TruthValue {
        self.max(other)
    }

    /// `yes`, `no` or `maybe`.
    pub fn word(self) -> &'static str {
        match self {
            TruthValue::True => "yes",
            TruthValue::False => "no",
            TruthValue::Unknown => "maybe",
        }
    }

    pub fn from_word(s: &str) -> Option<Self> {
        match s {
            "yes" => Some(TruthValue::True),
            "no" => Some(TruthValue::False),
            "maybe" => Some(TruthValue::Unknown),
            _ => None,
        }
    }
}

impl Not for TruthValue {
    type Output = TruthValue;

    /// `1 - v`
    fn not(self) -> TruthValue {
        match self {
            TruthValue::True => TruthValue::False,
            TruthValue::False => TruthValue::True,
            TruthValue::Unknown => TruthValue::Unknown,
        }
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.word())
    }
}

impl Serialize for TruthValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.word())
    }
}

/// A shape paired with an element of its kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub shape: String,
    pub element: Element,
}

impl Atom {
    pub fn node(shape: impl Into<String>, n: impl Into<NodeId>) -> Self {
        Atom { shape: shape.into(), element: Element::Node(n.into()) }
    }

    pub fn edge(shape: impl Into<String>, e: impl Into<EdgeId>) -> Self {
        Atom { shape: shape.into(), element: Element::Edge(e.into()) }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.shape, self.element)
    }
}

impl Serialize for Atom {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A mapping from atoms to truth values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<Atom, TruthValue>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, atom: &Atom) -> Option<TruthValue> {
        self.0.get(atom).copied()
    }

    pub fn set(&mut self, atom: Atom, v: TruthValue) -> Option<TruthValue> {
        self.0.insert(atom, v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, TruthValue)> {
        self.0.iter().map(|(a, v)| (a, *v))
    }

    /// Keeps only the atoms accepted by `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(&Atom) -> bool) -> Assignment {
        Assignment(self.0.iter().filter(|(a, _)| keep(a)).map(|(a, v)| (a.clone(), *v)).collect())
    }
}

impl FromIterator<(Atom, TruthValue)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (Atom, TruthValue)>>(iter: I) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.0.iter().map(|(a, v)| (a.to_string(), v)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("constraint references unknown {kind} shape `{name}`")]
    UnknownShape { name: String, kind: ShapeKind },
    #[error("assignment has no value for atom {0}")]
    MissingAtom(Atom),
    #[error("assignment has a value for {0}, which is not an atom of this graph and shape set")]
    ExtraAtom(Atom),
}

/// All atoms of a graph and shape set: node shapes paired with nodes, then
/// edge shapes paired with edges, each in declaration / identifier order.
pub fn atoms(g: &PropertyGraph, s: &ShapeSet) -> Vec<Atom> {
    let layout = AtomLayout::new(g, s);
    (0..layout.len()).map(|i| layout.atom(g, s, i)).collect()
}

pub fn eval_target_nodes(g: &PropertyGraph, q: &NodeTarget) -> BTreeSet<NodeId> {
    target_nodes_ix(g, q).into_iter().map(|i| g.nodes()[i].clone()).collect()
}

pub fn eval_target_edges(g: &PropertyGraph, q: &EdgeTarget) -> BTreeSet<EdgeId> {
    target_edges_ix(g, q).into_iter().map(|i| g.edges()[i].clone()).collect()
}

pub(crate) fn target_nodes_ix(g: &PropertyGraph, q: &NodeTarget) -> Vec<usize> {
    let all = 0..g.node_count();
    let has = |n: usize, k: &str| g.ix_node_values(n, k).is_some_and(|vs| !vs.is_empty());
    match q {
        NodeTarget::Nothing => Vec::new(),
        NodeTarget::Exact(id) => g.node_index(id).into_iter().collect(),
        NodeTarget::HasLabel(l) => all.filter(|&n| g.ix_node_labels(n).contains(l)).collect(),
        NodeTarget::HasKey(k) => all.filter(|&n| has(n, k)).collect(),
        NodeTarget::HasKeyValue(k, v) => {
            all.filter(|&n| g.ix_node_values(n, k).is_some_and(|vs| vs.contains(v))).collect()
        }
    }
}

pub(crate) fn target_edges_ix(g: &PropertyGraph, q: &EdgeTarget) -> Vec<usize> {
    let all = 0..g.edge_count();
    let has = |e: usize, k: &str| g.ix_edge_values(e, k).is_some_and(|vs| !vs.is_empty());
    match q {
        EdgeTarget::Nothing => Vec::new(),
        EdgeTarget::Exact(id) => g.edge_index(id).into_iter().collect(),
        EdgeTarget::HasLabel(l) => all.filter(|&e| g.ix_edge_labels(e).contains(l)).collect(),
        EdgeTarget::HasKey(k) => all.filter(|&e| has(e, k)).collect(),
        EdgeTarget::HasKeyValue(k, v) => {
            all.filter(|&e| g.ix_edge_values(e, k).is_some_and(|vs| vs.contains(v))).collect()
        }
    }
}

/// Nodes reachable from `n` along `p`. Independent of any assignment.
pub fn eval_path(g: &PropertyGraph, n: &NodeId, p: &PathExpr) -> Result<BTreeSet<NodeId>, GraphError> {
    let start = g.node_index(n)?;
    let rel = path_relation(g, p);
    Ok(rel[start].iter().map(|&i| g.nodes()[i].clone()).collect())
}

/// The full relation of `p` as one sorted successor list per node.
pub(crate) fn path_relation(g: &PropertyGraph, p: &PathExpr) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let sets: Vec<BTreeSet<usize>> = match p {
        PathExpr::Label(l) => (0..n)
            .map(|v| {
                g.ix_outgoing(v)
                    .iter()
                    .filter(|&&e| g.ix_edge_labels(e).contains(l))
                    .map(|&e| g.ix_endpoints(e).1)
                    .collect()
            })
            .collect(),
        PathExpr::Inverse(q) => {
            let r = path_relation(g, q);
            let mut t = vec![BTreeSet::new(); n];
            for (from, tos) in r.iter().enumerate() {
                for &to in tos {
                    t[to].insert(from);
                }
            }
            t
        }
        PathExpr::Seq(a, b) => {
            let (ra, rb) = (path_relation(g, a), path_relation(g, b));
            ra.iter().map(|mids| mids.iter().flat_map(|&m| rb[m].iter().copied()).collect()).collect()
        }
        PathExpr::Alt(a, b) => {
            let (ra, rb) = (path_relation(g, a), path_relation(g, b));
            ra.iter().zip(&rb).map(|(x, y)| x.iter().chain(y).copied().collect()).collect()
        }
        PathExpr::Plus(q) => closure(&path_relation(g, q)),
        PathExpr::Star(q) => {
            let mut c = closure(&path_relation(g, q));
            for (v, set) in c.iter_mut().enumerate() {
                set.insert(v);
            }
            c
        }
        PathExpr::Opt(q) => {
            path_relation(g, q).into_iter().enumerate().map(|(v, succ)| succ.into_iter().chain([v]).collect()).collect()
        }
    };
    sets.into_iter().map(|s| s.into_iter().collect()).collect()
}

/// Transitive closure by worklist reachability from each start node.
fn closure(r: &[Vec<usize>]) -> Vec<BTreeSet<usize>> {
    (0..r.len())
        .map(|v| {
            let mut seen: BTreeSet<usize> = r[v].iter().copied().collect();
            let mut work: Vec<usize> = r[v].clone();
            while let Some(m) = work.pop() {
                for &k in &r[m] {
                    if seen.insert(k) {
                        work.push(k);
                    }
                }
            }
            seen
        })
        .collect()
}

/// Dense numbering of atoms: node atoms `shape * |N| + node`, then edge
/// atoms offset by `|S_N| * |N|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct AtomLayout {
    pub nodes: usize,
    pub edges: usize,
    pub node_shapes: usize,
    pub edge_shapes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum AtomKey {
    Node { shape: usize, node: usize },
    Edge { shape: usize, edge: usize },
}

impl AtomLayout {
    pub fn new(g: &PropertyGraph, s: &ShapeSet) -> Self {
        AtomLayout {
            nodes: g.node_count(),
            edges: g.edge_count(),
            node_shapes: s.node_shape_count(),
            edge_shapes: s.edge_shape_count(),
        }
    }

    pub fn len(&self) -> usize {
        self.node_shapes * self.nodes + self.edge_shapes * self.edges
    }

    pub fn node_atom(&self, shape: usize, node: usize) -> usize {
        shape * self.nodes + node
    }

    pub fn edge_atom(&self, shape: usize, edge: usize) -> usize {
        self.node_shapes * self.nodes + shape * self.edges + edge
    }

    pub fn key(&self, ix: usize) -> AtomKey {
        let split = self.node_shapes * self.nodes;
        if ix < split {
            AtomKey::Node { shape: ix / self.nodes, node: ix % self.nodes }
        } else {
            let j = ix - split;
            AtomKey::Edge { shape: j / self.edges, edge: j % self.edges }
        }
    }

    pub fn atom(&self, g: &PropertyGraph, s: &ShapeSet, ix: usize) -> Atom {
        match self.key(ix) {
            AtomKey::Node { shape, node } => {
                Atom { shape: s.node_shape(shape).name.clone(), element: Element::Node(g.nodes()[node].clone()) }
            }
            AtomKey::Edge { shape, edge } => {
                Atom { shape: s.edge_shape(shape).name.clone(), element: Element::Edge(g.edges()[edge].clone()) }
            }
        }
    }

    pub fn index_of(&self, g: &PropertyGraph, s: &ShapeSet, atom: &Atom) -> Option<usize> {
        match &atom.element {
            Element::Node(n) => Some(self.node_atom(s.node_index(&atom.shape)?, g.node_index(n).ok()?)),
            Element::Edge(e) => Some(self.edge_atom(s.edge_index(&atom.shape)?, g.edge_index(e).ok()?)),
        }
    }
}

/// Which clause of strict faithfulness an atom violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    /// A node atom's value differs from its constraint's evaluation.
    NodeAtom,
    /// An edge atom's value differs from its constraint's evaluation.
    EdgeAtom,
    /// A target node is not assigned `1`.
    NodeTarget,
    /// A target edge is not assigned `1`.
    EdgeTarget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub condition: Condition,
    pub atom: Atom,
    pub assigned: TruthValue,
    /// The constraint's evaluation, or `1` for a target condition.
    pub expected: TruthValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Faithfulness {
    Faithful,
    Violated(Violation),
}

impl Faithfulness {
    pub fn is_faithful(&self) -> bool {
        matches!(self, Faithfulness::Faithful)
    }
}

/// Bundles a graph, a shape set, precomputed path relations and target sets.
/// Values of atoms are read through a caller-supplied lookup on dense atom
/// indices.
pub(crate) struct Evaluator<'a> {
    pub g: &'a PropertyGraph,
    pub s: &'a ShapeSet,
    pub layout: AtomLayout,
    paths: HashMap<PathExpr, Vec<Vec<usize>>>,
    /// Dense indices of target atoms, sorted and deduplicated.
    pub target_atoms: Vec<usize>,
}

impl<'a> Evaluator<'a> {
    pub fn new(g: &'a PropertyGraph, s: &'a ShapeSet) -> Self {
        let layout = AtomLayout::new(g, s);
        let mut ev = Evaluator { g, s, layout, paths: HashMap::new(), target_atoms: Vec::new() };
        for shape in s.shapes() {
            shape.for_each_path(&mut |p| ev.ensure_path(p));
        }
        let mut targets = Vec::new();
        for (i, sh) in s.node_shapes().enumerate() {
            targets.extend(target_nodes_ix(g, &sh.target).into_iter().map(|n| layout.node_atom(i, n)));
        }
        for (i, sh) in s.edge_shapes().enumerate() {
            targets.extend(target_edges_ix(g, &sh.target).into_iter().map(|e| layout.edge_atom(i, e)));
        }
        targets.sort_unstable();
        targets.dedup();
        ev.target_atoms = targets;
        ev
    }

    fn ensure_path(&mut self, p: &PathExpr) {
        if !self.paths.contains_key(p) {
            let rel = path_relation(self.g, p);
            self.paths.insert(p.clone(), rel);
        }
    }

    /// Makes an ad-hoc constraint evaluable: checks its references and
    /// computes any paths not already known.
    pub fn prepare_node(&mut self, c: &NodeConstraint) -> Result<(), EvalError> {
        let mut refs = Vec::new();
        c.for_each_ref(&mut |name, kind| refs.push((name, kind)));
        self.check_refs(&refs)?;
        c.for_each_path(&mut |p| self.ensure_path(p));
        Ok(())
    }

    pub fn prepare_edge(&mut self, c: &EdgeConstraint) -> Result<(), EvalError> {
        let mut refs = Vec::new();
        c.for_each_ref(&mut |name, kind| refs.push((name, kind)));
        self.check_refs(&refs)?;
        c.for_each_path(&mut |p| self.ensure_path(p));
        Ok(())
    }

    fn check_refs(&self, refs: &[(&str, ShapeKind)]) -> Result<(), EvalError> {
        match refs.iter().find(|(name, kind)| self.s.kind_of(name) != Some(*kind)) {
            Some(&(name, kind)) => Err(EvalError::UnknownShape { name: name.to_string(), kind }),
            None => Ok(()),
        }
    }

    pub fn reach(&self, p: &PathExpr, n: usize) -> &[usize] {
        &self.paths.get(p).expect("path relation prepared")[n]
    }

    pub fn node<F: Fn(usize) -> TruthValue>(&self, sigma: &F, n: usize, c: &NodeConstraint) -> TruthValue {
        let g = self.g;
        match c {
            NodeConstraint::True => TruthValue::True,
            NodeConstraint::ShapeRef(name) => {
                let s = self.s.node_index(name).expect("linked node shape reference");
                sigma(self.layout.node_atom(s, n))
            }
            NodeConstraint::ExactNode(id) => TruthValue::from_bool(&g.nodes()[n] == id),
            NodeConstraint::HasLabel(l) => TruthValue::from_bool(g.ix_node_labels(n).contains(l)),
            NodeConstraint::Not(inner) => !self.node(sigma, n, inner),
            NodeConstraint::And(a, b) => match self.node(sigma, n, a) {
                TruthValue::False => TruthValue::False,
                va => va.and(self.node(sigma, n, b)),
            },
            NodeConstraint::QualPath { min, path, body } => {
                let reached = self.reach(path, n);
                count_rule(*min, reached.len(), reached.iter().map(|&m| self.node(sigma, m, body)))
            }
            NodeConstraint::PathCmp { op, left, right } => {
                let a: BTreeSet<usize> = self.reach(left, n).iter().copied().collect();
                let b: BTreeSet<usize> = self.reach(right, n).iter().copied().collect();
                TruthValue::from_bool(op.compare_ids(&a, &b))
            }
            NodeConstraint::QualKey { min, key, pred } => {
                let count = g.ix_node_values(n, key).map_or(0, |vs| vs.iter().filter(|v| pred.test(v)).count());
                TruthValue::from_bool(count >= *min)
            }
            NodeConstraint::QualIncoming { min, body } => {
                let es = g.ix_incoming(n);
                count_rule(*min, es.len(), es.iter().map(|&e| self.edge(sigma, e, body)))
            }
            NodeConstraint::QualOutgoing { min, body } => {
                let es = g.ix_outgoing(n);
                count_rule(*min, es.len(), es.iter().map(|&e| self.edge(sigma, e, body)))
            }
            NodeConstraint::PathKeyCmp { op, left_path, left_key, right_path, right_key } => {
                let a = self.values_along(left_path, n, left_key);
                let b = self.values_along(right_path, n, right_key);
                TruthValue::from_bool(op.compare_values(&a, &b))
            }
            NodeConstraint::KeyCmp { op, left, right } => {
                let empty = BTreeSet::new();
                let a = g.ix_node_values(n, left).unwrap_or(&empty);
                let b = g.ix_node_values(n, right).unwrap_or(&empty);
                TruthValue::from_bool(op.compare_values(a, b))
            }
        }
    }

    pub fn edge<F: Fn(usize) -> TruthValue>(&self, sigma: &F, e: usize, c: &EdgeConstraint) -> TruthValue {
        let g = self.g;
        match c {
            EdgeConstraint::True => TruthValue::True,
            EdgeConstraint::ShapeRef(name) => {
                let s = self.s.edge_index(name).expect("linked edge shape reference");
                sigma(self.layout.edge_atom(s, e))
            }
            EdgeConstraint::ExactEdge(id) => TruthValue::from_bool(&g.edges()[e] == id),
            EdgeConstraint::HasLabel(l) => TruthValue::from_bool(g.ix_edge_labels(e).contains(l)),
            EdgeConstraint::Not(inner) => !self.edge(sigma, e, inner),
            EdgeConstraint::And(a, b) => match self.edge(sigma, e, a) {
                TruthValue::False => TruthValue::False,
                va => va.and(self.edge(sigma, e, b)),
            },
            EdgeConstraint::QualKey { min, key, pred } => {
                let count = g.ix_edge_values(e, key).map_or(0, |vs| vs.iter().filter(|v| pred.test(v)).count());
                TruthValue::from_bool(count >= *min)
            }
            EdgeConstraint::Src(c) => self.node(sigma, g.ix_endpoints(e).0, c),
            EdgeConstraint::Dst(c) => self.node(sigma, g.ix_endpoints(e).1, c),
            EdgeConstraint::KeyCmp { op, left, right } => {
                let empty = BTreeSet::new();
                let a = g.ix_edge_values(e, left).unwrap_or(&empty);
                let b = g.ix_edge_values(e, right).unwrap_or(&empty);
                TruthValue::from_bool(op.compare_values(a, b))
            }
        }
    }

    fn values_along(&self, p: &PathExpr, n: usize, key: &str) -> BTreeSet<Value> {
        self.reach(p, n).iter().filter_map(|&m| self.g.ix_node_values(m, key)).flatten().cloned().collect()
    }

    /// The value the constraint of atom `ix` evaluates to.
    pub fn eval_atom<F: Fn(usize) -> TruthValue>(&self, sigma: &F, ix: usize) -> TruthValue {
        match self.layout.key(ix) {
            AtomKey::Node { shape, node } => self.node(sigma, node, &self.s.node_shape(shape).constraint),
            AtomKey::Edge { shape, edge } => self.edge(sigma, edge, &self.s.edge_shape(shape).constraint),
        }
    }

    /// Atoms whose values the constraint of atom `ix` reads.
    pub fn atom_deps(&self, ix: usize, out: &mut Vec<usize>) {
        match self.layout.key(ix) {
            AtomKey::Node { shape, node } => self.node_deps(node, &self.s.node_shape(shape).constraint, out),
            AtomKey::Edge { shape, edge } => self.edge_deps(edge, &self.s.edge_shape(shape).constraint, out),
        }
    }

    fn node_deps(&self, n: usize, c: &NodeConstraint, out: &mut Vec<usize>) {
        match c {
            NodeConstraint::ShapeRef(name) => {
                out.push(self.layout.node_atom(self.s.node_index(name).expect("linked"), n))
            }
            NodeConstraint::Not(inner) => self.node_deps(n, inner, out),
            NodeConstraint::And(a, b) => {
                self.node_deps(n, a, out);
                self.node_deps(n, b, out);
            }
            NodeConstraint::QualPath { path, body, .. } => {
                for &m in self.reach(path, n) {
                    self.node_deps(m, body, out);
                }
            }
            NodeConstraint::QualIncoming { body, .. } => {
                for &e in self.g.ix_incoming(n) {
                    self.edge_deps(e, body, out);
                }
            }
            NodeConstraint::QualOutgoing { body, .. } => {
                for &e in self.g.ix_outgoing(n) {
                    self.edge_deps(e, body, out);
                }
            }
            _ => {}
        }
    }

    fn edge_deps(&self, e: usize, c: &EdgeConstraint, out: &mut Vec<usize>) {
        match c {
            EdgeConstraint::ShapeRef(name) => {
                out.push(self.layout.edge_atom(self.s.edge_index(name).expect("linked"), e))
            }
            EdgeConstraint::Not(inner) => self.edge_deps(e, inner, out),
            EdgeConstraint::And(a, b) => {
                self.edge_deps(e, a, out);
                self.edge_deps(e, b, out);
            }
            EdgeConstraint::Src(c) => self.node_deps(self.g.ix_endpoints(e).0, c, out),
            EdgeConstraint::Dst(c) => self.node_deps(self.g.ix_endpoints(e).1, c, out),
            _ => {}
        }
    }

    pub fn to_dense(&self, sigma: &Assignment) -> Result<Vec<TruthValue>, EvalError> {
        let mut dense = vec![None; self.layout.len()];
        for (atom, v) in sigma.iter() {
            let ix = self.layout.index_of(self.g, self.s, atom).ok_or_else(|| EvalError::ExtraAtom(atom.clone()))?;
            dense[ix] = Some(v);
        }
        dense
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| EvalError::MissingAtom(self.layout.atom(self.g, self.s, i))))
            .collect()
    }

    pub fn to_assignment(&self, dense: &[TruthValue]) -> Assignment {
        dense.iter().enumerate().map(|(i, &v)| (self.layout.atom(self.g, self.s, i), v)).collect()
    }

    /// First violated faithfulness condition, checking conditions in order.
    pub fn first_violation(&self, dense: &[TruthValue]) -> Option<Violation> {
        let sigma = |i: usize| dense[i];
        let mut target_violation = None;
        for (ix, &assigned) in dense.iter().enumerate() {
            let expected = self.eval_atom(&sigma, ix);
            if assigned != expected {
                let condition = match self.layout.key(ix) {
                    AtomKey::Node { .. } => Condition::NodeAtom,
                    AtomKey::Edge { .. } => Condition::EdgeAtom,
                };
                return Some(Violation { condition, atom: self.layout.atom(self.g, self.s, ix), assigned, expected });
            }
        }
        for &ix in &self.target_atoms {
            if dense[ix] != TruthValue::True {
                let condition = match self.layout.key(ix) {
                    AtomKey::Node { .. } => Condition::NodeTarget,
                    AtomKey::Edge { .. } => Condition::EdgeTarget,
                };
                target_violation = Some(Violation {
                    condition,
                    atom: self.layout.atom(self.g, self.s, ix),
                    assigned: dense[ix],
                    expected: TruthValue::True,
                });
                break;
            }
        }
        target_violation
    }

    /// Same verdict as [`Evaluator::first_violation`], checking the cheap
    /// target conditions first.
    pub fn is_faithful_fast(&self, dense: &[TruthValue]) -> bool {
        if self.target_atoms.iter().any(|&ix| dense[ix] != TruthValue::True) {
            return false;
        }
        let sigma = |i: usize| dense[i];
        (0..dense.len()).all(|ix| self.eval_atom(&sigma, ix) == dense[ix])
    }
}

/// The three-way rule shared by the qualified number restrictions: `1` when
/// at least `min` candidates are `1`; `0` when the candidates not evaluating
/// to `0` are fewer than `min`; `½` otherwise.
fn count_rule(min: usize, pool: usize, values: impl Iterator<Item = TruthValue>) -> TruthValue {
    let (mut ones, mut zeros) = (0, 0);
    for v in values {
        match v {
            TruthValue::True => ones += 1,
            TruthValue::False => zeros += 1,
            TruthValue::Unknown => {}
        }
    }
    if ones >= min {
        TruthValue::True
    } else if pool - zeros < min {
        TruthValue::False
    } else {
        TruthValue::Unknown
    }
}

fn dense_lookup<'s>(ev: &Evaluator<'_>, sigma: &'s Assignment) -> impl Fn(usize) -> TruthValue + 's {
    let layout = ev.layout;
    let atoms: Vec<Atom> = (0..layout.len()).map(|i| layout.atom(ev.g, ev.s, i)).collect();
    move |i| sigma.get(&atoms[i]).unwrap_or(TruthValue::Unknown)
}

/// Evaluates `c` at node `n`. Atoms missing from `sigma` read as `½`.
pub fn eval_node_constraint(
    g: &PropertyGraph,
    s: &ShapeSet,
    sigma: &Assignment,
    n: &NodeId,
    c: &NodeConstraint,
) -> Result<TruthValue, EvalError> {
    let ni = g.node_index(n)?;
    let mut ev = Evaluator::new(g, s);
    ev.prepare_node(c)?;
    let lookup = dense_lookup(&ev, sigma);
    Ok(ev.node(&lookup, ni, c))
}

/// Evaluates `c` at edge `e`. Atoms missing from `sigma` read as `½`.
pub fn eval_edge_constraint(
    g: &PropertyGraph,
    s: &ShapeSet,
    sigma: &Assignment,
    e: &EdgeId,
    c: &EdgeConstraint,
) -> Result<TruthValue, EvalError> {
    let ei = g.edge_index(e)?;
    let mut ev = Evaluator::new(g, s);
    ev.prepare_edge(c)?;
    let lookup = dense_lookup(&ev, sigma);
    Ok(ev.edge(&lookup, ei, c))
}

/// Checks the four conditions of strict faithfulness: every node and edge
/// atom equals its constraint's evaluation, and every target is assigned `1`.
/// `sigma` must cover exactly `atoms(g, s)`.
pub fn is_strictly_faithful(g: &PropertyGraph, s: &ShapeSet, sigma: &Assignment) -> Result<Faithfulness, EvalError> {
    let ev = Evaluator::new(g, s);
    let dense = ev.to_dense(sigma)?;
    Ok(match ev.first_violation(&dense) {
        None => Faithfulness::Faithful,
        Some(v) => Faithfulness::Violated(v),
    })
}
