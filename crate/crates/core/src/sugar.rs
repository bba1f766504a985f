//! Surface forms that reduce to the core constraint language: `⊥`, `∨`,
//! at-most / exactly / exists / for-all quantifiers, and compound target
//! queries.

use std::collections::HashSet;

use thiserror::Error;

use crate::ast::{
    EdgeConstraint, EdgeShape, EdgeTarget, NodeConstraint, NodeShape, NodeTarget, PathExpr, SetComparator, Shape,
    ValuePredicate,
};
use crate::fresh::NameSupply;
use crate::graph::{EdgeId, NodeId};

/// How many of the candidates must satisfy the body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    AtLeast(usize),
    AtMost(usize),
    Exactly(usize),
    Exists,
    ForAll,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SugaredNode {
    True,
    False,
    ShapeRef(String),
    ExactNode(NodeId),
    HasLabel(String),
    Not(Box<SugaredNode>),
    And(Box<SugaredNode>, Box<SugaredNode>),
    Or(Box<SugaredNode>, Box<SugaredNode>),
    Path(Quantifier, PathExpr, Box<SugaredNode>),
    Key(Quantifier, String, ValuePredicate),
    Incoming(Quantifier, Box<SugaredEdge>),
    Outgoing(Quantifier, Box<SugaredEdge>),
    PathCmp { op: SetComparator, left: PathExpr, right: PathExpr },
    PathKeyCmp { op: SetComparator, left_path: PathExpr, left_key: String, right_path: PathExpr, right_key: String },
    KeyCmp { op: SetComparator, left: String, right: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SugaredEdge {
    True,
    False,
    ShapeRef(String),
    ExactEdge(EdgeId),
    HasLabel(String),
    Not(Box<SugaredEdge>),
    And(Box<SugaredEdge>, Box<SugaredEdge>),
    Or(Box<SugaredEdge>, Box<SugaredEdge>),
    Key(Quantifier, String, ValuePredicate),
    Src(Box<SugaredNode>),
    Dst(Box<SugaredNode>),
    KeyCmp { op: SetComparator, left: String, right: String },
}

/// Shared expansion of the quantifier family into `≥`, `¬` and `∧`.
fn expand<C, B: Clone>(
    q: Quantifier,
    body: B,
    negate_body: impl FnOnce(B) -> B,
    at_least: impl Fn(usize, B) -> C,
    not: impl Fn(C) -> C,
    and: impl Fn(C, C) -> C,
) -> C {
    match q {
        Quantifier::AtLeast(i) => at_least(i, body),
        Quantifier::AtMost(i) => not(at_least(i + 1, body)),
        Quantifier::Exactly(i) => and(at_least(i, body.clone()), not(at_least(i + 1, body))),
        Quantifier::Exists => at_least(1, body),
        Quantifier::ForAll => not(at_least(1, negate_body(body))),
    }
}

fn key_form<C>(
    q: Quantifier,
    key: String,
    pred: ValuePredicate,
    build: impl Fn(usize, String, ValuePredicate) -> C,
    not: impl Fn(C) -> C,
    and: impl Fn(C, C) -> C,
) -> C {
    expand(q, (key, pred), |(k, f)| (k, f.negate()), |i, (k, f)| build(i, k, f), not, and)
}

impl SugaredNode {
    pub fn desugar(self) -> NodeConstraint {
        use SugaredNode as S;
        match self {
            S::True => NodeConstraint::True,
            S::False => NodeConstraint::True.negate(),
            S::ShapeRef(s) => NodeConstraint::ShapeRef(s),
            S::ExactNode(n) => NodeConstraint::ExactNode(n),
            S::HasLabel(l) => NodeConstraint::HasLabel(l),
            S::Not(c) => c.desugar().negate(),
            S::And(a, b) => a.desugar().and(b.desugar()),
            S::Or(a, b) => a.desugar().or(b.desugar()),
            S::Path(q, path, body) => expand(
                q,
                body.desugar(),
                NodeConstraint::negate,
                |i, b| NodeConstraint::at_least(i, path.clone(), b),
                NodeConstraint::negate,
                NodeConstraint::and,
            ),
            S::Key(q, key, pred) => key_form(
                q,
                key,
                pred,
                |min, key, pred| NodeConstraint::QualKey { min, key, pred },
                NodeConstraint::negate,
                NodeConstraint::and,
            ),
            S::Incoming(q, body) => expand(
                q,
                body.desugar(),
                EdgeConstraint::negate,
                NodeConstraint::incoming,
                NodeConstraint::negate,
                NodeConstraint::and,
            ),
            S::Outgoing(q, body) => expand(
                q,
                body.desugar(),
                EdgeConstraint::negate,
                NodeConstraint::outgoing,
                NodeConstraint::negate,
                NodeConstraint::and,
            ),
            S::PathCmp { op, left, right } => NodeConstraint::PathCmp { op, left, right },
            S::PathKeyCmp { op, left_path, left_key, right_path, right_key } => {
                NodeConstraint::PathKeyCmp { op, left_path, left_key, right_path, right_key }
            }
            S::KeyCmp { op, left, right } => NodeConstraint::KeyCmp { op, left, right },
        }
    }
}

impl SugaredEdge {
    pub fn desugar(self) -> EdgeConstraint {
        use SugaredEdge as S;
        match self {
            S::True => EdgeConstraint::True,
            S::False => EdgeConstraint::True.negate(),
            S::ShapeRef(s) => EdgeConstraint::ShapeRef(s),
            S::ExactEdge(e) => EdgeConstraint::ExactEdge(e),
            S::HasLabel(l) => EdgeConstraint::HasLabel(l),
            S::Not(c) => c.desugar().negate(),
            S::And(a, b) => a.desugar().and(b.desugar()),
            S::Or(a, b) => a.desugar().or(b.desugar()),
            S::Key(q, key, pred) => key_form(
                q,
                key,
                pred,
                |min, key, pred| EdgeConstraint::QualKey { min, key, pred },
                EdgeConstraint::negate,
                EdgeConstraint::and,
            ),
            S::Src(c) => EdgeConstraint::src(c.desugar()),
            S::Dst(c) => EdgeConstraint::dst(c.desugar()),
            S::KeyCmp { op, left, right } => EdgeConstraint::KeyCmp { op, left, right },
        }
    }
}

impl From<NodeConstraint> for SugaredNode {
    fn from(c: NodeConstraint) -> Self {
        use SugaredNode as S;
        match c {
            NodeConstraint::True => S::True,
            NodeConstraint::ShapeRef(s) => S::ShapeRef(s),
            NodeConstraint::ExactNode(n) => S::ExactNode(n),
            NodeConstraint::HasLabel(l) => S::HasLabel(l),
            NodeConstraint::Not(c) => S::Not(Box::new((*c).into())),
            NodeConstraint::And(a, b) => S::And(Box::new((*a).into()), Box::new((*b).into())),
            NodeConstraint::QualPath { min, path, body } => {
                S::Path(Quantifier::AtLeast(min), path, Box::new((*body).into()))
            }
            NodeConstraint::PathCmp { op, left, right } => S::PathCmp { op, left, right },
            NodeConstraint::QualKey { min, key, pred } => S::Key(Quantifier::AtLeast(min), key, pred),
            NodeConstraint::QualIncoming { min, body } => {
                S::Incoming(Quantifier::AtLeast(min), Box::new((*body).into()))
            }
            NodeConstraint::QualOutgoing { min, body } => {
                S::Outgoing(Quantifier::AtLeast(min), Box::new((*body).into()))
            }
            NodeConstraint::PathKeyCmp { op, left_path, left_key, right_path, right_key } => {
                S::PathKeyCmp { op, left_path, left_key, right_path, right_key }
            }
            NodeConstraint::KeyCmp { op, left, right } => S::KeyCmp { op, left, right },
        }
    }
}

impl From<EdgeConstraint> for SugaredEdge {
    fn from(c: EdgeConstraint) -> Self {
        use SugaredEdge as S;
        match c {
            EdgeConstraint::True => S::True,
            EdgeConstraint::ShapeRef(s) => S::ShapeRef(s),
            EdgeConstraint::ExactEdge(e) => S::ExactEdge(e),
            EdgeConstraint::HasLabel(l) => S::HasLabel(l),
            EdgeConstraint::Not(c) => S::Not(Box::new((*c).into())),
            EdgeConstraint::And(a, b) => S::And(Box::new((*a).into()), Box::new((*b).into())),
            EdgeConstraint::QualKey { min, key, pred } => S::Key(Quantifier::AtLeast(min), key, pred),
            EdgeConstraint::Src(c) => S::Src(Box::new((*c).into())),
            EdgeConstraint::Dst(c) => S::Dst(Box::new((*c).into())),
            EdgeConstraint::KeyCmp { op, left, right } => S::KeyCmp { op, left, right },
        }
    }
}

/// A target query, possibly combined with `&` / `|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TargetExpr<T> {
    Query(T),
    And(Box<TargetExpr<T>>, Box<TargetExpr<T>>),
    Or(Box<TargetExpr<T>>, Box<TargetExpr<T>>),
}

impl<T> TargetExpr<T> {
    fn as_query(&self) -> Option<&T> {
        match self {
            TargetExpr::Query(q) => Some(q),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SugaredShape {
    Node { name: String, constraint: SugaredNode, target: TargetExpr<NodeTarget> },
    Edge { name: String, constraint: SugaredEdge, target: TargetExpr<EdgeTarget> },
}

impl SugaredShape {
    pub fn name(&self) -> &str {
        match self {
            SugaredShape::Node { name, .. } | SugaredShape::Edge { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesugarError {
    #[error("shape `{0}`: target combinations may only join two plain target queries")]
    UnsupportedTarget(String),
}

/// The node constraint that holds exactly at the nodes a target query selects.
pub fn node_target_constraint(q: &NodeTarget) -> NodeConstraint {
    match q {
        NodeTarget::Nothing => NodeConstraint::True.negate(),
        NodeTarget::Exact(n) => NodeConstraint::ExactNode(n.clone()),
        NodeTarget::HasLabel(l) => NodeConstraint::HasLabel(l.clone()),
        NodeTarget::HasKey(k) => NodeConstraint::key_at_least(1, k.clone(), ValuePredicate::Any),
        NodeTarget::HasKeyValue(k, v) => {
            NodeConstraint::key_at_least(1, k.clone(), ValuePredicate::cmp(crate::ast::CmpOp::Eq, v.clone()))
        }
    }
}

/// The edge constraint that holds exactly at the edges a target query selects.
pub fn edge_target_constraint(q: &EdgeTarget) -> EdgeConstraint {
    match q {
        EdgeTarget::Nothing => EdgeConstraint::True.negate(),
        EdgeTarget::Exact(e) => EdgeConstraint::ExactEdge(e.clone()),
        EdgeTarget::HasLabel(l) => EdgeConstraint::HasLabel(l.clone()),
        EdgeTarget::HasKey(k) => EdgeConstraint::key_at_least(1, k.clone(), ValuePredicate::Any),
        EdgeTarget::HasKeyValue(k, v) => {
            EdgeConstraint::key_at_least(1, k.clone(), ValuePredicate::cmp(crate::ast::CmpOp::Eq, v.clone()))
        }
    }
}

enum Plan<'a, T> {
    Plain(T),
    Both(&'a T, &'a T),
    Either(&'a T, &'a T),
}

fn plan<'a, T: Clone>(name: &str, t: &'a TargetExpr<T>) -> Result<Plan<'a, T>, DesugarError> {
    let pair = |a: &'a TargetExpr<T>, b: &'a TargetExpr<T>| match (a.as_query(), b.as_query()) {
        (Some(x), Some(y)) => Ok((x, y)),
        _ => Err(DesugarError::UnsupportedTarget(name.to_string())),
    };
    Ok(match t {
        TargetExpr::Query(q) => Plan::Plain(q.clone()),
        TargetExpr::And(a, b) => {
            let (x, y) = pair(a, b)?;
            Plan::Both(x, y)
        }
        TargetExpr::Or(a, b) => {
            let (x, y) = pair(a, b)?;
            Plan::Either(x, y)
        }
    })
}

/// Desugars constraints and compound targets of a whole shape list.
///
/// A target `q1 & q2` becomes target `q1` with constraint
/// `(φ & φ_q2) | !φ_q2`. When the shape is referenced by some constraint
/// (including its own), rewriting its constraint would change what those
/// references see; the shape then keeps `φ`, loses its target, and a utility
/// shape with target `q1` and constraint `(s & φ_q2) | !φ_q2` is added.
///
/// A target `q1 | q2` yields utility shapes targeting `q1` and `q2` whose
/// constraint is a reference to the shape, which itself gets target `⊥`.
/// Arms that are `⊥` produce no utility shape.
pub fn desugar_shapes(shapes: Vec<SugaredShape>) -> Result<Vec<Shape>, DesugarError> {
    let mut names = NameSupply::new(shapes.iter().map(SugaredShape::name));

    let mut staged = Vec::with_capacity(shapes.len());
    for s in shapes {
        staged.push(match s {
            SugaredShape::Node { name, constraint, target } => {
                let c = constraint.desugar();
                (Shape::node(name, c, NodeTarget::Nothing), Some(target), None)
            }
            SugaredShape::Edge { name, constraint, target } => {
                let c = constraint.desugar();
                (Shape::edge(name, c, EdgeTarget::Nothing), None, Some(target))
            }
        });
    }

    let mut referenced = HashSet::new();
    for (s, _, _) in &staged {
        s.for_each_ref(&mut |r, _| {
            referenced.insert(r.to_string());
        });
    }

    let mut out = Vec::new();
    for (shape, nt, et) in staged {
        match (shape, nt, et) {
            (Shape::Node(mut s), Some(t), _) => {
                let mut extra = Vec::new();
                match plan(&s.name, &t)? {
                    Plan::Plain(q) => s.target = q,
                    Plan::Both(q1, q2) => {
                        let guard = node_target_constraint(q2);
                        if referenced.contains(&s.name) {
                            let c = NodeConstraint::shape(s.name.clone()).and(guard.clone()).or(guard.negate());
                            let u = names.fresh(&format!("{}__t", s.name));
                            extra.push(Shape::node(u, c, q1.clone()));
                        } else {
                            let phi = std::mem::replace(&mut s.constraint, NodeConstraint::True);
                            s.constraint = phi.and(guard.clone()).or(guard.negate());
                            s.target = q1.clone();
                        }
                    }
                    Plan::Either(q1, q2) => {
                        for q in [q1, q2] {
                            if *q != NodeTarget::Nothing {
                                let u = names.fresh(&format!("{}__t", s.name));
                                extra.push(Shape::node(u, NodeConstraint::shape(s.name.clone()), q.clone()));
                            }
                        }
                    }
                }
                out.push(Shape::Node(s));
                out.extend(extra);
            }
            (Shape::Edge(mut s), _, Some(t)) => {
                let mut extra = Vec::new();
                match plan(&s.name, &t)? {
                    Plan::Plain(q) => s.target = q,
                    Plan::Both(q1, q2) => {
                        let guard = edge_target_constraint(q2);
                        if referenced.contains(&s.name) {
                            let c = EdgeConstraint::shape(s.name.clone()).and(guard.clone()).or(guard.negate());
                            let u = names.fresh(&format!("{}__t", s.name));
                            extra.push(Shape::edge(u, c, q1.clone()));
                        } else {
                            let phi = std::mem::replace(&mut s.constraint, EdgeConstraint::True);
                            s.constraint = phi.and(guard.clone()).or(guard.negate());
                            s.target = q1.clone();
                        }
                    }
                    Plan::Either(q1, q2) => {
                        for q in [q1, q2] {
                            if *q != EdgeTarget::Nothing {
                                let u = names.fresh(&format!("{}__t", s.name));
                                extra.push(Shape::edge(u, EdgeConstraint::shape(s.name.clone()), q.clone()));
                            }
                        }
                    }
                }
                out.push(Shape::Edge(s));
                out.extend(extra);
            }
            _ => unreachable!("staged shapes carry a target of their own kind"),
        }
    }
    Ok(out)
}

impl From<NodeShape> for SugaredShape {
    fn from(s: NodeShape) -> Self {
        SugaredShape::Node { name: s.name, constraint: s.constraint.into(), target: TargetExpr::Query(s.target) }
    }
}

impl From<EdgeShape> for SugaredShape {
    fn from(s: EdgeShape) -> Self {
        SugaredShape::Edge { name: s.name, constraint: s.constraint.into(), target: TargetExpr::Query(s.target) }
    }
}

impl From<Shape> for SugaredShape {
    fn from(s: Shape) -> Self {
        match s {
            Shape::Node(n) => n.into(),
            Shape::Edge(e) => e.into(),
        }
    }
}
