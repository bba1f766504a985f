//! Conformance-preserving rewrites of (graph, shape set) instances: path
//! elimination, operator folding, single-target reduction, and the
//! per-case faithfulness check for normalized shape sets.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ast::{
    link_shapes, EdgeConstraint, EdgeShape, EdgeTarget, NodeConstraint, NodeShape, NodeTarget, PathExpr, Shape,
    ShapeSet,
};
use crate::eval::{
    atoms, target_edges_ix, target_nodes_ix, Assignment, Atom, AtomLayout, Condition, EvalError, Evaluator,
    Faithfulness, TruthValue, Violation,
};
use crate::fresh::NameSupply;
use crate::graph::{EdgeId, Element, NodeId, PropertyGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("shape `{shape}` still uses the composite path {path:?}; eliminate paths first")]
    PathsPresent { shape: String, path: PathExpr },
    #[error("shape `{0}` is not normalized (one operator, single-label paths)")]
    NotNormalized(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// What a transform introduced.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransformTrace {
    pub fresh_nodes: Vec<NodeId>,
    pub fresh_edges: Vec<EdgeId>,
    pub fresh_labels: Vec<String>,
    pub fresh_shapes: Vec<String>,
    /// Each eliminated path and the label that replaced it.
    pub path_labels: Vec<(PathExpr, String)>,
    /// Shapes whose target query was replaced by `⊥`.
    pub retargeted: Vec<String>,
}

impl TransformTrace {
    /// Appends another trace, for chained transforms.
    pub fn extend(&mut self, other: TransformTrace) {
        self.fresh_nodes.extend(other.fresh_nodes);
        self.fresh_edges.extend(other.fresh_edges);
        self.fresh_labels.extend(other.fresh_labels);
        self.fresh_shapes.extend(other.fresh_shapes);
        self.path_labels.extend(other.path_labels);
        self.retargeted.extend(other.retargeted);
    }

    /// Whether an atom of the transformed instance mentions something this
    /// trace introduced.
    pub fn is_fresh(&self, atom: &Atom) -> bool {
        self.fresh_shapes.contains(&atom.shape)
            || match &atom.element {
                Element::Node(n) => self.fresh_nodes.contains(n),
                Element::Edge(e) => self.fresh_edges.contains(e),
            }
    }

    /// Restricts an assignment of the transformed instance to the atoms of
    /// the original one.
    pub fn project(&self, sigma: &Assignment) -> Assignment {
        sigma.restrict(|a| !self.is_fresh(a))
    }
}

fn supply_for(g: &PropertyGraph, s: &ShapeSet) -> NameSupply {
    let mut names = NameSupply::new(g.nodes().iter().map(NodeId::as_str));
    for e in g.edges() {
        names.reserve(e.as_str());
    }
    for l in g.node_label_names().into_iter().chain(g.edge_label_names()) {
        names.reserve(l);
    }
    for shape in s.shapes() {
        names.reserve(shape.name());
        let mut labels = Vec::new();
        shape.for_each_path(&mut |p| {
            p.for_each_subpath(&mut |q| {
                if let Some(l) = q.as_label() {
                    labels.push(l.to_string());
                }
            })
        });
        collect_constraint_labels(shape, &mut labels);
        for l in labels {
            names.reserve(&l);
        }
    }
    names
}

/// Labels and identifiers mentioned by constraints or targets, so fresh
/// names never coincide with them.
fn collect_constraint_labels(shape: &Shape, out: &mut Vec<String>) {
    fn node(c: &NodeConstraint, out: &mut Vec<String>) {
        match c {
            NodeConstraint::HasLabel(l) => out.push(l.clone()),
            NodeConstraint::ExactNode(n) => out.push(n.to_string()),
            NodeConstraint::Not(c) => node(c, out),
            NodeConstraint::And(a, b) => {
                node(a, out);
                node(b, out);
            }
            NodeConstraint::QualPath { body, .. } => node(body, out),
            NodeConstraint::QualIncoming { body, .. } | NodeConstraint::QualOutgoing { body, .. } => edge(body, out),
            _ => {}
        }
    }
    fn edge(c: &EdgeConstraint, out: &mut Vec<String>) {
        match c {
            EdgeConstraint::HasLabel(l) => out.push(l.clone()),
            EdgeConstraint::ExactEdge(e) => out.push(e.to_string()),
            EdgeConstraint::Not(c) => edge(c, out),
            EdgeConstraint::And(a, b) => {
                edge(a, out);
                edge(b, out);
            }
            EdgeConstraint::Src(c) | EdgeConstraint::Dst(c) => node(c, out),
            _ => {}
        }
    }
    match shape {
        Shape::Node(s) => {
            node(&s.constraint, out);
            match &s.target {
                NodeTarget::Exact(n) => out.push(n.to_string()),
                NodeTarget::HasLabel(l) => out.push(l.clone()),
                _ => {}
            }
        }
        Shape::Edge(s) => {
            edge(&s.constraint, out);
            match &s.target {
                EdgeTarget::Exact(e) => out.push(e.to_string()),
                EdgeTarget::HasLabel(l) => out.push(l.clone()),
                _ => {}
            }
        }
    }
}

/// Makes edges carrying `marker` invisible to a node constraint: every
/// edge counted by an incoming/outgoing restriction must lack the marker.
fn hide_in_node(c: NodeConstraint, marker: &str) -> NodeConstraint {
    match c {
        NodeConstraint::Not(c) => hide_in_node(*c, marker).negate(),
        NodeConstraint::And(a, b) => hide_in_node(*a, marker).and(hide_in_node(*b, marker)),
        NodeConstraint::QualPath { min, path, body } => {
            NodeConstraint::at_least(min, path, hide_in_node(*body, marker))
        }
        NodeConstraint::QualIncoming { min, body } => NodeConstraint::incoming(min, hide_edge(*body, marker)),
        NodeConstraint::QualOutgoing { min, body } => NodeConstraint::outgoing(min, hide_edge(*body, marker)),
        other => other,
    }
}

fn hide_in_edge(c: EdgeConstraint, marker: &str) -> EdgeConstraint {
    match c {
        EdgeConstraint::Not(c) => hide_in_edge(*c, marker).negate(),
        EdgeConstraint::And(a, b) => hide_in_edge(*a, marker).and(hide_in_edge(*b, marker)),
        EdgeConstraint::Src(c) => EdgeConstraint::src(hide_in_node(*c, marker)),
        EdgeConstraint::Dst(c) => EdgeConstraint::dst(hide_in_node(*c, marker)),
        other => other,
    }
}

/// `φ ∧ ¬marker`: `φ` on ordinary edges, `0` on marked ones.
fn hide_edge(c: EdgeConstraint, marker: &str) -> EdgeConstraint {
    hide_in_edge(c, marker).and(EdgeConstraint::label(marker).negate())
}

fn hide_marked_edges(shapes: Vec<Shape>, marker: &str) -> Vec<Shape> {
    shapes
        .into_iter()
        .map(|shape| match shape {
            Shape::Node(s) => Shape::node(s.name, hide_in_node(s.constraint, marker), s.target),
            Shape::Edge(s) => Shape::edge(s.name, hide_edge(s.constraint, marker), s.target),
        })
        .collect()
}

/// Replaces every composite path by a fresh edge label whose edges connect
/// exactly the node pairs the path relates.
///
/// The fresh edges also carry a fresh marker label; every edge-shape
/// constraint and every incoming/outgoing restriction is conjoined with the
/// marker's negation so that the new edges neither satisfy edge shapes nor
/// count as neighbours. Instances whose paths are all single labels are
/// returned unchanged.
pub fn eliminate_paths(g: &PropertyGraph, s: &ShapeSet) -> (PropertyGraph, ShapeSet, TransformTrace) {
    let mut composite = BTreeSet::new();
    for shape in s.shapes() {
        shape.for_each_path(&mut |p| {
            if p.as_label().is_none() {
                composite.insert(p.clone());
            }
        });
    }
    let mut trace = TransformTrace::default();
    if composite.is_empty() {
        return (g.clone(), s.clone(), trace);
    }

    let mut names = supply_for(g, s);
    let mut b = g.to_builder();
    let mut label_of = BTreeMap::new();
    let marker = names.fresh("__x");
    trace.fresh_labels.push(marker.clone());
    for p in composite {
        let label = names.fresh("__p");
        let rel = crate::eval::path_relation(g, &p);
        for (from, tos) in rel.iter().enumerate() {
            for &to in tos {
                let e = EdgeId::new(names.fresh("__e"));
                b.edge(e.clone(), g.nodes()[from].clone(), g.nodes()[to].clone());
                b.edge_label(e.clone(), label.clone());
                b.edge_label(e.clone(), marker.clone());
                trace.fresh_edges.push(e);
            }
        }
        trace.fresh_labels.push(label.clone());
        trace.path_labels.push((p.clone(), label.clone()));
        label_of.insert(p, label);
    }
    let mut rename = |p: PathExpr| match label_of.get(&p) {
        Some(l) => PathExpr::Label(l.clone()),
        None => p,
    };
    let shapes: Vec<Shape> = s
        .shapes()
        .iter()
        .cloned()
        .map(|shape| match shape {
            Shape::Node(n) => Shape::node(n.name, n.constraint.map_paths(&mut rename), n.target),
            Shape::Edge(e) => Shape::edge(e.name, e.constraint.map_paths(&mut rename), e.target),
        })
        .collect();
    let shapes = hide_marked_edges(shapes, &marker);
    let g2 = b.build().expect("fresh identifiers never clash");
    let s2 = link_shapes(shapes).expect("renaming keeps references intact");
    (g2, s2, trace)
}

/// Splits every constraint with more than one operator, introducing fresh
/// `⊥`-targeted shapes for the operands of its outermost operator and
/// repeating on those until each constraint has at most one operator.
pub fn fold_operators(s: &ShapeSet) -> Result<(ShapeSet, TransformTrace), TransformError> {
    for shape in s.shapes() {
        let mut bad = None;
        shape.for_each_path(&mut |p| {
            if bad.is_none() && p.as_label().is_none() {
                bad = Some(p.clone());
            }
        });
        if let Some(path) = bad {
            return Err(TransformError::PathsPresent { shape: shape.name().to_string(), path });
        }
    }
    let mut names = NameSupply::new(s.shapes().iter().map(Shape::name));
    let mut trace = TransformTrace::default();
    let mut out = Vec::new();
    for shape in s.shapes() {
        let mut work = vec![shape.clone()];
        while let Some(next) = work.pop() {
            let (folded, extra) = fold_one(next, &mut names);
            trace.fresh_shapes.extend(extra.iter().map(|x| x.name().to_string()));
            out.push(folded);
            work.extend(extra.into_iter().rev());
        }
    }
    let s2 = link_shapes(out).expect("fresh shape names are unique and correctly kinded");
    Ok((s2, trace))
}

/// One fold step. Returns the rewritten shape and the fresh shapes it
/// refers to (still to be folded).
fn fold_one(shape: Shape, names: &mut NameSupply) -> (Shape, Vec<Shape>) {
    if shape.operator_count() <= 1 {
        return (shape, Vec::new());
    }
    let mut extra = Vec::new();
    let names = std::cell::RefCell::new(names);
    let fresh_node = |c: NodeConstraint, extra: &mut Vec<Shape>| {
        let n = names.borrow_mut().fresh("__f");
        extra.push(Shape::node(n.clone(), c, NodeTarget::Nothing));
        n
    };
    let fresh_edge = |c: EdgeConstraint, extra: &mut Vec<Shape>| {
        let n = names.borrow_mut().fresh("__f");
        extra.push(Shape::edge(n.clone(), c, EdgeTarget::Nothing));
        n
    };
    match shape {
        Shape::Node(NodeShape { name, constraint, target }) => {
            let c = match constraint {
                NodeConstraint::Not(c) => NodeConstraint::ShapeRef(fresh_node(*c, &mut extra)).negate(),
                NodeConstraint::And(a, b) => {
                    let a = NodeConstraint::ShapeRef(fresh_node(*a, &mut extra));
                    a.and(NodeConstraint::ShapeRef(fresh_node(*b, &mut extra)))
                }
                NodeConstraint::QualPath { min, path, body } => {
                    NodeConstraint::at_least(min, path, NodeConstraint::ShapeRef(fresh_node(*body, &mut extra)))
                }
                NodeConstraint::QualIncoming { min, body } => {
                    NodeConstraint::incoming(min, EdgeConstraint::ShapeRef(fresh_edge(*body, &mut extra)))
                }
                NodeConstraint::QualOutgoing { min, body } => {
                    NodeConstraint::outgoing(min, EdgeConstraint::ShapeRef(fresh_edge(*body, &mut extra)))
                }
                base => unreachable!("base constraint {base:?} has no operator"),
            };
            (Shape::node(name, c, target), extra)
        }
        Shape::Edge(EdgeShape { name, constraint, target }) => {
            let c = match constraint {
                EdgeConstraint::Not(c) => EdgeConstraint::ShapeRef(fresh_edge(*c, &mut extra)).negate(),
                EdgeConstraint::And(a, b) => {
                    let a = EdgeConstraint::ShapeRef(fresh_edge(*a, &mut extra));
                    a.and(EdgeConstraint::ShapeRef(fresh_edge(*b, &mut extra)))
                }
                EdgeConstraint::Src(c) => EdgeConstraint::src(NodeConstraint::ShapeRef(fresh_node(*c, &mut extra))),
                EdgeConstraint::Dst(c) => EdgeConstraint::dst(NodeConstraint::ShapeRef(fresh_node(*c, &mut extra))),
                base => unreachable!("base constraint {base:?} has no operator"),
            };
            (Shape::edge(name, c, target), extra)
        }
    }
}

/// Replaces all targets by a single fresh root node targeted by a single
/// fresh shape.
///
/// A fresh node `n0` gets one uniquely labelled edge to every targeted node
/// and one to the source of every targeted edge. The root shape requires,
/// along each such edge, that the target conforms to its shape; for a
/// targeted edge `e` this reads "some outgoing edge is `e` and conforms".
/// Fresh edges are hidden from the original shapes as in
/// [`eliminate_paths`], and original node shapes are conjoined with `¬n0`.
pub fn reduce_to_single_target(g: &PropertyGraph, s: &ShapeSet) -> (PropertyGraph, ShapeSet, Atom, TransformTrace) {
    let mut names = supply_for(g, s);
    let mut trace = TransformTrace::default();
    let mut b = g.to_builder();
    let n0 = NodeId::new(names.fresh("__n"));
    b.node(n0.clone());
    trace.fresh_nodes.push(n0.clone());
    let marker = names.fresh("__x");
    trace.fresh_labels.push(marker.clone());

    let mut conjuncts = Vec::new();
    let mut link = |to: NodeId, b: &mut crate::graph::GraphBuilder, trace: &mut TransformTrace| {
        let e = EdgeId::new(names.fresh("__e"));
        let l = names.fresh("__t");
        b.edge(e.clone(), n0.clone(), to);
        b.edge_label(e.clone(), l.clone());
        b.edge_label(e.clone(), marker.clone());
        trace.fresh_edges.push(e);
        trace.fresh_labels.push(l.clone());
        l
    };
    let mut shapes = Vec::new();
    for shape in s.shapes() {
        match shape {
            Shape::Node(ns) => {
                for n in target_nodes_ix(g, &ns.target) {
                    let l = link(g.nodes()[n].clone(), &mut b, &mut trace);
                    conjuncts.push(NodeConstraint::at_least(
                        1,
                        PathExpr::Label(l),
                        NodeConstraint::ShapeRef(ns.name.clone()),
                    ));
                }
                if ns.target != NodeTarget::Nothing {
                    trace.retargeted.push(ns.name.clone());
                }
                let c = ns.constraint.clone().and(NodeConstraint::ExactNode(n0.clone()).negate());
                shapes.push(Shape::node(ns.name.clone(), c, NodeTarget::Nothing));
            }
            Shape::Edge(es) => {
                for e in target_edges_ix(g, &es.target) {
                    let src = g.nodes()[g.ix_endpoints(e).0].clone();
                    let l = link(src, &mut b, &mut trace);
                    let at_e =
                        EdgeConstraint::ExactEdge(g.edges()[e].clone()).and(EdgeConstraint::ShapeRef(es.name.clone()));
                    conjuncts.push(NodeConstraint::at_least(1, PathExpr::Label(l), NodeConstraint::outgoing(1, at_e)));
                }
                if es.target != EdgeTarget::Nothing {
                    trace.retargeted.push(es.name.clone());
                }
                shapes.push(Shape::edge(es.name.clone(), es.constraint.clone(), EdgeTarget::Nothing));
            }
        }
    }
    let mut shapes = hide_marked_edges(shapes, &marker);
    let root = names.fresh("__root");
    trace.fresh_shapes.push(root.clone());
    shapes.push(Shape::node(root.clone(), NodeConstraint::all(conjuncts), NodeTarget::Exact(n0.clone())));
    let g2 = b.build().expect("fresh identifiers never clash");
    let s2 = link_shapes(shapes).expect("root shape name is fresh");
    (g2, s2, Atom::node(root, n0), trace)
}

/// Whether every constraint has at most one operator and every path is a
/// single label.
pub fn is_normalized(s: &ShapeSet) -> bool {
    s.shapes().iter().all(|shape| {
        let mut labels_only = true;
        shape.for_each_path(&mut |p| labels_only &= p.as_label().is_some());
        labels_only && shape.operator_count() <= 1
    })
}

/// Decides strict faithfulness for a normalized shape set by checking each
/// atom against the local case of its (single-operator) constraint. Agrees
/// with [`crate::eval::is_strictly_faithful`], including the reported
/// violation.
pub fn verify_normalized(g: &PropertyGraph, s: &ShapeSet, sigma: &Assignment) -> Result<Faithfulness, TransformError> {
    if let Some(shape) = s.shapes().iter().find(|shape| {
        let mut labels_only = true;
        shape.for_each_path(&mut |p| labels_only &= p.as_label().is_some());
        !labels_only || shape.operator_count() > 1
    }) {
        return Err(TransformError::NotNormalized(shape.name().to_string()));
    }
    let ev = Evaluator::new(g, s);
    let dense = ev.to_dense(sigma)?;
    Ok(match local_violation(&ev, &dense) {
        None => Faithfulness::Faithful,
        Some(v) => Faithfulness::Violated(v),
    })
}

/// The first violation found by the per-case checks, in the same order as
/// the evaluator reports them. `ev` must be built over a normalized set.
pub(crate) fn local_violation(ev: &Evaluator<'_>, dense: &[TruthValue]) -> Option<Violation> {
    let (g, s) = (ev.g, ev.s);
    let check = Local { g, s, layout: ev.layout, dense };
    let all = atoms(g, s);
    for (ix, atom) in all.iter().enumerate() {
        let expected = match &atom.element {
            Element::Node(_) => check.node_shape(ix),
            Element::Edge(_) => check.edge_shape(ix),
        };
        if dense[ix] != expected {
            let condition = match atom.element {
                Element::Node(_) => Condition::NodeAtom,
                Element::Edge(_) => Condition::EdgeAtom,
            };
            return Some(Violation { condition, atom: atom.clone(), assigned: dense[ix], expected });
        }
    }
    for (i, ns) in s.node_shapes().enumerate() {
        for n in target_nodes_ix(g, &ns.target) {
            let ix = ev.layout.node_atom(i, n);
            if dense[ix] != TruthValue::True {
                return Some(Violation {
                    condition: Condition::NodeTarget,
                    atom: all[ix].clone(),
                    assigned: dense[ix],
                    expected: TruthValue::True,
                });
            }
        }
    }
    for (i, es) in s.edge_shapes().enumerate() {
        for e in target_edges_ix(g, &es.target) {
            let ix = ev.layout.edge_atom(i, e);
            if dense[ix] != TruthValue::True {
                return Some(Violation {
                    condition: Condition::EdgeTarget,
                    atom: all[ix].clone(),
                    assigned: dense[ix],
                    expected: TruthValue::True,
                });
            }
        }
    }
    None
}

/// Case-by-case evaluation for single-operator constraints. Operands are
/// base forms, looked up or tested directly without recursion.
struct Local<'a> {
    g: &'a PropertyGraph,
    s: &'a ShapeSet,
    layout: AtomLayout,
    dense: &'a [TruthValue],
}

impl Local<'_> {
    fn node_shape(&self, ix: usize) -> TruthValue {
        let (shape, n) = (ix / self.layout.nodes, ix % self.layout.nodes);
        let c = &self.s.node_shape(shape).constraint;
        match c {
            NodeConstraint::Not(b) => !self.node_base(n, b),
            NodeConstraint::And(a, b) => self.node_base(n, a).and(self.node_base(n, b)),
            NodeConstraint::QualPath { min, path, body } => {
                let label = path.as_label().expect("normalized");
                let reached: BTreeSet<usize> = self
                    .g
                    .ix_outgoing(n)
                    .iter()
                    .filter(|&&e| self.g.ix_edge_labels(e).contains(label))
                    .map(|&e| self.g.ix_endpoints(e).1)
                    .collect();
                threshold(*min, reached.iter().map(|&m| self.node_base(m, body)))
            }
            NodeConstraint::QualIncoming { min, body } => {
                threshold(*min, self.g.ix_incoming(n).iter().map(|&e| self.edge_base(e, body)))
            }
            NodeConstraint::QualOutgoing { min, body } => {
                threshold(*min, self.g.ix_outgoing(n).iter().map(|&e| self.edge_base(e, body)))
            }
            base => self.node_base(n, base),
        }
    }

    fn edge_shape(&self, ix: usize) -> TruthValue {
        let j = ix - self.layout.node_shapes * self.layout.nodes;
        let (shape, e) = (j / self.layout.edges, j % self.layout.edges);
        let c = &self.s.edge_shape(shape).constraint;
        let (src, dst) = self.g.ix_endpoints(e);
        match c {
            EdgeConstraint::Not(b) => !self.edge_base(e, b),
            EdgeConstraint::And(a, b) => self.edge_base(e, a).and(self.edge_base(e, b)),
            EdgeConstraint::Src(b) => self.node_base(src, b),
            EdgeConstraint::Dst(b) => self.node_base(dst, b),
            base => self.edge_base(e, base),
        }
    }

    /// Base node forms: no operator inside.
    fn node_base(&self, n: usize, c: &NodeConstraint) -> TruthValue {
        let g = self.g;
        match c {
            NodeConstraint::True => TruthValue::True,
            NodeConstraint::ShapeRef(s) => self.dense[self.layout.node_atom(self.s.node_index(s).expect("linked"), n)],
            NodeConstraint::ExactNode(id) => TruthValue::from_bool(&g.nodes()[n] == id),
            NodeConstraint::HasLabel(l) => TruthValue::from_bool(g.ix_node_labels(n).contains(l)),
            NodeConstraint::QualKey { min, key, pred } => TruthValue::from_bool(
                g.ix_node_values(n, key).map_or(0, |vs| vs.iter().filter(|v| pred.test(v)).count()) >= *min,
            ),
            NodeConstraint::PathCmp { op, left, right } => {
                TruthValue::from_bool(op.compare_ids(&self.successors(n, left), &self.successors(n, right)))
            }
            NodeConstraint::PathKeyCmp { op, left_path, left_key, right_path, right_key } => {
                let values = |p: &PathExpr, k: &str| -> BTreeSet<crate::graph::Value> {
                    self.successors(n, p)
                        .into_iter()
                        .filter_map(|m| g.ix_node_values(m, k))
                        .flatten()
                        .cloned()
                        .collect()
                };
                TruthValue::from_bool(op.compare_values(&values(left_path, left_key), &values(right_path, right_key)))
            }
            NodeConstraint::KeyCmp { op, left, right } => {
                let empty = BTreeSet::new();
                TruthValue::from_bool(op.compare_values(
                    g.ix_node_values(n, left).unwrap_or(&empty),
                    g.ix_node_values(n, right).unwrap_or(&empty),
                ))
            }
            other => unreachable!("operator {other:?} inside a normalized constraint"),
        }
    }

    fn edge_base(&self, e: usize, c: &EdgeConstraint) -> TruthValue {
        let g = self.g;
        match c {
            EdgeConstraint::True => TruthValue::True,
            EdgeConstraint::ShapeRef(s) => self.dense[self.layout.edge_atom(self.s.edge_index(s).expect("linked"), e)],
            EdgeConstraint::ExactEdge(id) => TruthValue::from_bool(&g.edges()[e] == id),
            EdgeConstraint::HasLabel(l) => TruthValue::from_bool(g.ix_edge_labels(e).contains(l)),
            EdgeConstraint::QualKey { min, key, pred } => TruthValue::from_bool(
                g.ix_edge_values(e, key).map_or(0, |vs| vs.iter().filter(|v| pred.test(v)).count()) >= *min,
            ),
            EdgeConstraint::KeyCmp { op, left, right } => {
                let empty = BTreeSet::new();
                TruthValue::from_bool(op.compare_values(
                    g.ix_edge_values(e, left).unwrap_or(&empty),
                    g.ix_edge_values(e, right).unwrap_or(&empty),
                ))
            }
            other => unreachable!("operator {other:?} inside a normalized constraint"),
        }
    }

    fn successors(&self, n: usize, p: &PathExpr) -> BTreeSet<usize> {
        let label = p.as_label().expect("normalized");
        self.g
            .ix_outgoing(n)
            .iter()
            .filter(|&&e| self.g.ix_edge_labels(e).contains(label))
            .map(|&e| self.g.ix_endpoints(e).1)
            .collect()
    }
}

/// `1` if at least `min` candidates are `1`, `0` if fewer than `min` are
/// not `0`, `½` otherwise.
fn threshold(min: usize, values: impl Iterator<Item = TruthValue>) -> TruthValue {
    let (mut yes, mut open) = (0, 0);
    for v in values {
        match v {
            TruthValue::True => yes += 1,
            TruthValue::Unknown => open += 1,
            TruthValue::False => {}
        }
    }
    if yes >= min {
        TruthValue::True
    } else if yes + open < min {
        TruthValue::False
    } else {
        TruthValue::Unknown
    }
}
