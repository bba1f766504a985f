//! Core abstract syntax for shapes: paths, value predicates, set comparators,
//! target queries, node/edge constraints and linked shape sets.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use petgraph::graph::DiGraph;
use thiserror::Error;

use crate::graph::{EdgeId, NodeId, Value, ValueType};

/// Regular path expression over edge labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathExpr {
    Label(String),
    Inverse(Box<PathExpr>),
    Seq(Box<PathExpr>, Box<PathExpr>),
    Alt(Box<PathExpr>, Box<PathExpr>),
    Star(Box<PathExpr>),
    Plus(Box<PathExpr>),
    Opt(Box<PathExpr>),
}

impl PathExpr {
    pub fn label(l: impl Into<String>) -> Self {
        PathExpr::Label(l.into())
    }

    pub fn inverse(self) -> Self {
        PathExpr::Inverse(Box::new(self))
    }

    pub fn then(self, next: PathExpr) -> Self {
        PathExpr::Seq(Box::new(self), Box::new(next))
    }

    pub fn or(self, other: PathExpr) -> Self {
        PathExpr::Alt(Box::new(self), Box::new(other))
    }

    pub fn star(self) -> Self {
        PathExpr::Star(Box::new(self))
    }

    pub fn plus(self) -> Self {
        PathExpr::Plus(Box::new(self))
    }

    pub fn opt(self) -> Self {
        PathExpr::Opt(Box::new(self))
    }

    /// The label when this path is a single edge label.
    pub fn as_label(&self) -> Option<&str> {
        match self {
            PathExpr::Label(l) => Some(l),
            _ => None,
        }
    }

    /// Visits this path and all of its sub-paths, outermost first.
    pub fn for_each_subpath<'a>(&'a self, f: &mut impl FnMut(&'a PathExpr)) {
        f(self);
        match self {
            PathExpr::Label(_) => {}
            PathExpr::Inverse(p) | PathExpr::Star(p) | PathExpr::Plus(p) | PathExpr::Opt(p) => p.for_each_subpath(f),
            PathExpr::Seq(a, b) | PathExpr::Alt(a, b) => {
                a.for_each_subpath(f);
                b.for_each_subpath(f);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    fn holds(self, ord: Ordering) -> bool {
        match self {
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Ge => ord != Ordering::Less,
        }
    }
}

/// Two-valued test on a single property value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValuePredicate {
    /// Holds for every value.
    Any,
    TypeIs(ValueType),
    /// `v op constant`; false whenever `v` has a different type than the constant.
    Cmp(CmpOp, Value),
    Not(Box<ValuePredicate>),
    And(Box<ValuePredicate>, Box<ValuePredicate>),
}

impl ValuePredicate {
    pub fn cmp(op: CmpOp, v: Value) -> Self {
        ValuePredicate::Cmp(op, v)
    }

    pub fn negate(self) -> Self {
        ValuePredicate::Not(Box::new(self))
    }

    pub fn and(self, other: ValuePredicate) -> Self {
        ValuePredicate::And(Box::new(self), Box::new(other))
    }

    pub fn test(&self, v: &Value) -> bool {
        match self {
            ValuePredicate::Any => true,
            ValuePredicate::TypeIs(t) => v.value_type() == *t,
            ValuePredicate::Cmp(op, c) => v.typed_cmp(c).is_some_and(|o| op.holds(o)),
            ValuePredicate::Not(f) => !f.test(v),
            ValuePredicate::And(a, b) => a.test(v) && b.test(v),
        }
    }
}

/// Comparison between two sets (node identities or property values).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SetComparator {
    Eq,
    Neq,
    /// Proper subset.
    Subset,
    SubsetEq,
    /// Proper superset.
    Superset,
    SupersetEq,
    Disjoint,
    Lt,
    Leq,
    Gt,
    Geq,
}

impl SetComparator {
    pub const ALL: [SetComparator; 11] = [
        SetComparator::Eq,
        SetComparator::Neq,
        SetComparator::Subset,
        SetComparator::SubsetEq,
        SetComparator::Superset,
        SetComparator::SupersetEq,
        SetComparator::Disjoint,
        SetComparator::Lt,
        SetComparator::Leq,
        SetComparator::Gt,
        SetComparator::Geq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SetComparator::Eq => "eq",
            SetComparator::Neq => "neq",
            SetComparator::Subset => "subset",
            SetComparator::SubsetEq => "subseteq",
            SetComparator::Superset => "superset",
            SetComparator::SupersetEq => "superseteq",
            SetComparator::Disjoint => "disjoint",
            SetComparator::Lt => "lt",
            SetComparator::Leq => "leq",
            SetComparator::Gt => "gt",
            SetComparator::Geq => "geq",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }

    fn ordering_op(self) -> Option<CmpOp> {
        match self {
            SetComparator::Lt => Some(CmpOp::Lt),
            SetComparator::Leq => Some(CmpOp::Le),
            SetComparator::Gt => Some(CmpOp::Gt),
            SetComparator::Geq => Some(CmpOp::Ge),
            _ => None,
        }
    }

    fn set_relation<T: Ord>(self, a: &BTreeSet<T>, b: &BTreeSet<T>) -> bool {
        match self {
            SetComparator::Eq => a == b,
            SetComparator::Neq => a != b,
            SetComparator::Subset => a.len() < b.len() && a.is_subset(b),
            SetComparator::SubsetEq => a.is_subset(b),
            SetComparator::Superset => a.len() > b.len() && a.is_superset(b),
            SetComparator::SupersetEq => a.is_superset(b),
            SetComparator::Disjoint => a.is_disjoint(b),
            _ => unreachable!("ordering comparators handled by callers"),
        }
    }

    /// Compares value sets. Ordering comparators hold only between two
    /// singletons of the same value type.
    pub fn compare_values(self, a: &BTreeSet<Value>, b: &BTreeSet<Value>) -> bool {
        match self.ordering_op() {
            Some(op) => match (single(a), single(b)) {
                (Some(x), Some(y)) => x.typed_cmp(y).is_some_and(|o| op.holds(o)),
                _ => false,
            },
            None => self.set_relation(a, b),
        }
    }

    /// Compares sets of node identities. Identities carry no order, so the
    /// ordering comparators never hold.
    pub fn compare_ids<T: Ord>(self, a: &BTreeSet<T>, b: &BTreeSet<T>) -> bool {
        match self.ordering_op() {
            Some(_) => false,
            None => self.set_relation(a, b),
        }
    }
}

fn single<T>(s: &BTreeSet<T>) -> Option<&T> {
    if s.len() == 1 {
        s.iter().next()
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeTarget {
    Nothing,
    Exact(NodeId),
    HasLabel(String),
    HasKey(String),
    HasKeyValue(String, Value),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EdgeTarget {
    Nothing,
    Exact(EdgeId),
    HasLabel(String),
    HasKey(String),
    HasKeyValue(String, Value),
}

/// Constraint evaluated at a node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeConstraint {
    True,
    ShapeRef(String),
    ExactNode(NodeId),
    HasLabel(String),
    Not(Box<NodeConstraint>),
    And(Box<NodeConstraint>, Box<NodeConstraint>),
    /// At least `min` distinct nodes reachable via `path` satisfy `body`.
    QualPath {
        min: usize,
        path: PathExpr,
        body: Box<NodeConstraint>,
    },
    PathCmp {
        op: SetComparator,
        left: PathExpr,
        right: PathExpr,
    },
    /// At least `min` values of `key` satisfy `pred`.
    QualKey {
        min: usize,
        key: String,
        pred: ValuePredicate,
    },
    /// At least `min` incoming edges satisfy `body`.
    QualIncoming {
        min: usize,
        body: Box<EdgeConstraint>,
    },
    /// At least `min` outgoing edges satisfy `body`.
    QualOutgoing {
        min: usize,
        body: Box<EdgeConstraint>,
    },
    PathKeyCmp {
        op: SetComparator,
        left_path: PathExpr,
        left_key: String,
        right_path: PathExpr,
        right_key: String,
    },
    KeyCmp {
        op: SetComparator,
        left: String,
        right: String,
    },
}

/// Constraint evaluated at an edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EdgeConstraint {
    True,
    ShapeRef(String),
    ExactEdge(EdgeId),
    HasLabel(String),
    Not(Box<EdgeConstraint>),
    And(Box<EdgeConstraint>, Box<EdgeConstraint>),
    QualKey {
        min: usize,
        key: String,
        pred: ValuePredicate,
    },
    /// The source node satisfies the node constraint.
    Src(Box<NodeConstraint>),
    /// The destination node satisfies the node constraint.
    Dst(Box<NodeConstraint>),
    KeyCmp {
        op: SetComparator,
        left: String,
        right: String,
    },
}

impl NodeConstraint {
    pub fn shape(name: impl Into<String>) -> Self {
        NodeConstraint::ShapeRef(name.into())
    }

    pub fn label(l: impl Into<String>) -> Self {
        NodeConstraint::HasLabel(l.into())
    }

    pub fn negate(self) -> Self {
        NodeConstraint::Not(Box::new(self))
    }

    pub fn and(self, other: NodeConstraint) -> Self {
        NodeConstraint::And(Box::new(self), Box::new(other))
    }

    /// `¬(¬a ∧ ¬b)`.
    pub fn or(self, other: NodeConstraint) -> Self {
        self.negate().and(other.negate()).negate()
    }

    pub fn at_least(min: usize, path: PathExpr, body: NodeConstraint) -> Self {
        NodeConstraint::QualPath { min, path, body: Box::new(body) }
    }

    pub fn key_at_least(min: usize, key: impl Into<String>, pred: ValuePredicate) -> Self {
        NodeConstraint::QualKey { min, key: key.into(), pred }
    }

    pub fn incoming(min: usize, body: EdgeConstraint) -> Self {
        NodeConstraint::QualIncoming { min, body: Box::new(body) }
    }

    pub fn outgoing(min: usize, body: EdgeConstraint) -> Self {
        NodeConstraint::QualOutgoing { min, body: Box::new(body) }
    }

    /// Conjunction of all items; `True` when empty.
    pub fn all(items: impl IntoIterator<Item = NodeConstraint>) -> Self {
        items.into_iter().reduce(NodeConstraint::and).unwrap_or(NodeConstraint::True)
    }

    /// Number of operators (`¬`, `∧`, the three qualified edge/path
    /// restrictions) in this constraint, including those of nested edge
    /// constraints.
    pub fn operator_count(&self) -> usize {
        match self {
            NodeConstraint::Not(c) => 1 + c.operator_count(),
            NodeConstraint::And(a, b) => 1 + a.operator_count() + b.operator_count(),
            NodeConstraint::QualPath { body, .. } => 1 + body.operator_count(),
            NodeConstraint::QualIncoming { body, .. } | NodeConstraint::QualOutgoing { body, .. } => {
                1 + body.operator_count()
            }
            _ => 0,
        }
    }

    /// Visits every path expression occurring in this constraint (top-level
    /// occurrences only; use [`PathExpr::for_each_subpath`] to descend).
    pub fn for_each_path<'a>(&'a self, f: &mut impl FnMut(&'a PathExpr)) {
        match self {
            NodeConstraint::Not(c) => c.for_each_path(f),
            NodeConstraint::And(a, b) => {
                a.for_each_path(f);
                b.for_each_path(f);
            }
            NodeConstraint::QualPath { path, body, .. } => {
                f(path);
                body.for_each_path(f);
            }
            NodeConstraint::PathCmp { left, right, .. } => {
                f(left);
                f(right);
            }
            NodeConstraint::PathKeyCmp { left_path, right_path, .. } => {
                f(left_path);
                f(right_path);
            }
            NodeConstraint::QualIncoming { body, .. } | NodeConstraint::QualOutgoing { body, .. } => {
                body.for_each_path(f)
            }
            _ => {}
        }
    }

    /// Rewrites every top-level path occurrence.
    pub fn map_paths(self, f: &mut impl FnMut(PathExpr) -> PathExpr) -> Self {
        match self {
            NodeConstraint::Not(c) => c.map_paths(f).negate(),
            NodeConstraint::And(a, b) => a.map_paths(f).and(b.map_paths(f)),
            NodeConstraint::QualPath { min, path, body } => {
                let path = f(path);
                NodeConstraint::QualPath { min, path, body: Box::new(body.map_paths(f)) }
            }
            NodeConstraint::PathCmp { op, left, right } => {
                let left = f(left);
                NodeConstraint::PathCmp { op, left, right: f(right) }
            }
            NodeConstraint::PathKeyCmp { op, left_path, left_key, right_path, right_key } => {
                let left_path = f(left_path);
                NodeConstraint::PathKeyCmp { op, left_path, left_key, right_path: f(right_path), right_key }
            }
            NodeConstraint::QualIncoming { min, body } => {
                NodeConstraint::QualIncoming { min, body: Box::new(body.map_paths(f)) }
            }
            NodeConstraint::QualOutgoing { min, body } => {
                NodeConstraint::QualOutgoing { min, body: Box::new(body.map_paths(f)) }
            }
            other => other,
        }
    }

    /// Visits every shape reference with the kind of shape it must name.
    pub fn for_each_ref<'a>(&'a self, f: &mut impl FnMut(&'a str, ShapeKind)) {
        match self {
            NodeConstraint::ShapeRef(s) => f(s, ShapeKind::Node),
            NodeConstraint::Not(c) => c.for_each_ref(f),
            NodeConstraint::And(a, b) => {
                a.for_each_ref(f);
                b.for_each_ref(f);
            }
            NodeConstraint::QualPath { body, .. } => body.for_each_ref(f),
            NodeConstraint::QualIncoming { body, .. } | NodeConstraint::QualOutgoing { body, .. } => {
                body.for_each_ref(f)
            }
            _ => {}
        }
    }
}

impl EdgeConstraint {
    pub fn shape(name: impl Into<String>) -> Self {
        EdgeConstraint::ShapeRef(name.into())
    }

    pub fn label(l: impl Into<String>) -> Self {
        EdgeConstraint::HasLabel(l.into())
    }

    pub fn negate(self) -> Self {
        EdgeConstraint::Not(Box::new(self))
    }

    pub fn and(self, other: EdgeConstraint) -> Self {
        EdgeConstraint::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: EdgeConstraint) -> Self {
        self.negate().and(other.negate()).negate()
    }

    pub fn key_at_least(min: usize, key: impl Into<String>, pred: ValuePredicate) -> Self {
        EdgeConstraint::QualKey { min, key: key.into(), pred }
    }

    pub fn src(c: NodeConstraint) -> Self {
        EdgeConstraint::Src(Box::new(c))
    }

    pub fn dst(c: NodeConstraint) -> Self {
        EdgeConstraint::Dst(Box::new(c))
    }

    pub fn operator_count(&self) -> usize {
        match self {
            EdgeConstraint::Not(c) => 1 + c.operator_count(),
            EdgeConstraint::And(a, b) => 1 + a.operator_count() + b.operator_count(),
            EdgeConstraint::Src(c) | EdgeConstraint::Dst(c) => 1 + c.operator_count(),
            _ => 0,
        }
    }

    pub fn for_each_path<'a>(&'a self, f: &mut impl FnMut(&'a PathExpr)) {
        match self {
            EdgeConstraint::Not(c) => c.for_each_path(f),
            EdgeConstraint::And(a, b) => {
                a.for_each_path(f);
                b.for_each_path(f);
            }
            EdgeConstraint::Src(c) | EdgeConstraint::Dst(c) => c.for_each_path(f),
            _ => {}
        }
    }

    pub fn map_paths(self, f: &mut impl FnMut(PathExpr) -> PathExpr) -> Self {
        match self {
            EdgeConstraint::Not(c) => c.map_paths(f).negate(),
            EdgeConstraint::And(a, b) => a.map_paths(f).and(b.map_paths(f)),
            EdgeConstraint::Src(c) => EdgeConstraint::src(c.map_paths(f)),
            EdgeConstraint::Dst(c) => EdgeConstraint::dst(c.map_paths(f)),
            other => other,
        }
    }

    pub fn for_each_ref<'a>(&'a self, f: &mut impl FnMut(&'a str, ShapeKind)) {
        match self {
            EdgeConstraint::ShapeRef(s) => f(s, ShapeKind::Edge),
            EdgeConstraint::Not(c) => c.for_each_ref(f),
            EdgeConstraint::And(a, b) => {
                a.for_each_ref(f);
                b.for_each_ref(f);
            }
            EdgeConstraint::Src(c) | EdgeConstraint::Dst(c) => c.for_each_ref(f),
            _ => {}
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShapeKind {
    Node,
    Edge,
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShapeKind::Node => "node",
            ShapeKind::Edge => "edge",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeShape {
    pub name: String,
    pub constraint: NodeConstraint,
    pub target: NodeTarget,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeShape {
    pub name: String,
    pub constraint: EdgeConstraint,
    pub target: EdgeTarget,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Shape {
    Node(NodeShape),
    Edge(EdgeShape),
}

impl Shape {
    pub fn node(name: impl Into<String>, constraint: NodeConstraint, target: NodeTarget) -> Self {
        Shape::Node(NodeShape { name: name.into(), constraint, target })
    }

    pub fn edge(name: impl Into<String>, constraint: EdgeConstraint, target: EdgeTarget) -> Self {
        Shape::Edge(EdgeShape { name: name.into(), constraint, target })
    }

    pub fn name(&self) -> &str {
        match self {
            Shape::Node(s) => &s.name,
            Shape::Edge(s) => &s.name,
        }
    }

    pub fn kind(&self) -> ShapeKind {
        match self {
            Shape::Node(_) => ShapeKind::Node,
            Shape::Edge(_) => ShapeKind::Edge,
        }
    }

    pub fn has_target(&self) -> bool {
        match self {
            Shape::Node(s) => s.target != NodeTarget::Nothing,
            Shape::Edge(s) => s.target != EdgeTarget::Nothing,
        }
    }

    pub fn operator_count(&self) -> usize {
        match self {
            Shape::Node(s) => s.constraint.operator_count(),
            Shape::Edge(s) => s.constraint.operator_count(),
        }
    }

    pub fn for_each_ref<'a>(&'a self, f: &mut impl FnMut(&'a str, ShapeKind)) {
        match self {
            Shape::Node(s) => s.constraint.for_each_ref(f),
            Shape::Edge(s) => s.constraint.for_each_ref(f),
        }
    }

    pub fn for_each_path<'a>(&'a self, f: &mut impl FnMut(&'a PathExpr)) {
        match self {
            Shape::Node(s) => s.constraint.for_each_path(f),
            Shape::Edge(s) => s.constraint.for_each_path(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error("shape `{0}` is defined more than once")]
    DuplicateShape(String),
    #[error("shape `{referenced_by}` references unknown shape `{name}`")]
    UnknownShapeName { name: String, referenced_by: String },
    #[error("shape `{referenced_by}` uses `{name}` as a {expected} shape, but it is a {found} shape")]
    KindMismatch { name: String, referenced_by: String, expected: ShapeKind, found: ShapeKind },
}

/// A set of shapes whose references all resolve to shapes of the right kind.
///
/// Shapes keep their declaration order. Node shapes and edge shapes are also
/// numbered separately (in declaration order); those positions index atoms.
#[derive(Debug, Clone)]
pub struct ShapeSet {
    shapes: Vec<Shape>,
    node_pos: Vec<usize>,
    edge_pos: Vec<usize>,
    index: HashMap<String, (ShapeKind, usize)>,
    references: BTreeMap<String, BTreeSet<String>>,
}

impl PartialEq for ShapeSet {
    fn eq(&self, other: &Self) -> bool {
        self.shapes == other.shapes
    }
}

impl Eq for ShapeSet {}

/// Resolves every shape reference and records the reference graph.
/// Recursive and mutually recursive references are legal.
pub fn link_shapes(raw: Vec<Shape>) -> Result<ShapeSet, LinkError> {
    let mut index = HashMap::new();
    let mut node_pos = Vec::new();
    let mut edge_pos = Vec::new();
    for (i, s) in raw.iter().enumerate() {
        let kind = s.kind();
        let pos = match kind {
            ShapeKind::Node => &mut node_pos,
            ShapeKind::Edge => &mut edge_pos,
        };
        if index.insert(s.name().to_string(), (kind, pos.len())).is_some() {
            return Err(LinkError::DuplicateShape(s.name().to_string()));
        }
        pos.push(i);
    }

    let mut references = BTreeMap::new();
    for s in &raw {
        let mut refs = BTreeSet::new();
        let mut err = None;
        s.for_each_ref(&mut |name, expected| {
            if err.is_some() {
                return;
            }
            match index.get(name) {
                None => {
                    err = Some(LinkError::UnknownShapeName {
                        name: name.to_string(),
                        referenced_by: s.name().to_string(),
                    })
                }
                Some(&(found, _)) if found != expected => {
                    err = Some(LinkError::KindMismatch {
                        name: name.to_string(),
                        referenced_by: s.name().to_string(),
                        expected,
                        found,
                    })
                }
                Some(_) => {
                    refs.insert(name.to_string());
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        references.insert(s.name().to_string(), refs);
    }

    Ok(ShapeSet { shapes: raw, node_pos, edge_pos, index, references })
}

impl ShapeSet {
    pub fn empty() -> Self {
        link_shapes(Vec::new()).expect("empty set links")
    }

    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    pub fn into_shapes(self) -> Vec<Shape> {
        self.shapes
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Shape> {
        self.index.get(name).map(|&(kind, i)| match kind {
            ShapeKind::Node => &self.shapes[self.node_pos[i]],
            ShapeKind::Edge => &self.shapes[self.edge_pos[i]],
        })
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn node_shape_count(&self) -> usize {
        self.node_pos.len()
    }

    pub fn edge_shape_count(&self) -> usize {
        self.edge_pos.len()
    }

    /// The `i`-th node shape in declaration order.
    pub fn node_shape(&self, i: usize) -> &NodeShape {
        match &self.shapes[self.node_pos[i]] {
            Shape::Node(s) => s,
            Shape::Edge(_) => unreachable!("node position holds a node shape"),
        }
    }

    /// The `i`-th edge shape in declaration order.
    pub fn edge_shape(&self, i: usize) -> &EdgeShape {
        match &self.shapes[self.edge_pos[i]] {
            Shape::Edge(s) => s,
            Shape::Node(_) => unreachable!("edge position holds an edge shape"),
        }
    }

    pub fn node_shapes(&self) -> impl Iterator<Item = &NodeShape> {
        (0..self.node_pos.len()).map(|i| self.node_shape(i))
    }

    pub fn edge_shapes(&self) -> impl Iterator<Item = &EdgeShape> {
        (0..self.edge_pos.len()).map(|i| self.edge_shape(i))
    }

    pub(crate) fn node_index(&self, name: &str) -> Option<usize> {
        match self.index.get(name) {
            Some(&(ShapeKind::Node, i)) => Some(i),
            _ => None,
        }
    }

    pub(crate) fn edge_index(&self, name: &str) -> Option<usize> {
        match self.index.get(name) {
            Some(&(ShapeKind::Edge, i)) => Some(i),
            _ => None,
        }
    }

    pub fn kind_of(&self, name: &str) -> Option<ShapeKind> {
        self.index.get(name).map(|&(k, _)| k)
    }

    /// Names referenced from the constraint of `name`.
    pub fn references(&self, name: &str) -> Option<&BTreeSet<String>> {
        self.references.get(name)
    }

    /// Strongly connected groups of mutually referencing shapes, including
    /// single shapes that reference themselves. Each group is sorted; groups
    /// are sorted by their first member.
    pub fn reference_cycles(&self) -> Vec<Vec<String>> {
        let mut g = DiGraph::<&str, ()>::new();
        let ids: HashMap<&str, _> = self.shapes.iter().map(|s| (s.name(), g.add_node(s.name()))).collect();
        for (from, tos) in &self.references {
            for to in tos {
                g.add_edge(ids[from.as_str()], ids[to.as_str()], ());
            }
        }
        let mut cycles: Vec<Vec<String>> = petgraph::algo::tarjan_scc(&g)
            .into_iter()
            .filter(|comp| comp.len() > 1 || g.contains_edge(comp[0], comp[0]))
            .map(|comp| {
                let mut names: Vec<String> = comp.iter().map(|&i| g[i].to_string()).collect();
                names.sort();
                names
            })
            .collect();
        cycles.sort();
        cycles
    }

    /// Total number of operators over all constraints.
    pub fn operator_count(&self) -> usize {
        self.shapes.iter().map(Shape::operator_count).sum()
    }
}
