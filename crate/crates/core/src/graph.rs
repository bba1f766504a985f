//! In-memory property graphs: nodes and edges with identities, label sets,
//! and multi-valued properties.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while assembling or querying a [`PropertyGraph`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("identifier `{0}` is used for both a node and an edge")]
    IdClash(String),
    #[error("edge `{edge}` references unknown node `{node}`")]
    DanglingEdge { edge: String, node: String },
    #[error("edge `{0}` has no endpoints")]
    MissingEndpoints(String),
    #[error("{label_kind} label `{label}` attached to {element_kind} `{element}`")]
    KindMismatch { label: String, label_kind: LabelKind, element: String, element_kind: &'static str },
    #[error("unknown element `{0}`")]
    UnknownElement(String),
}

/// A textual identifier. Purely numeric identifiers order numerically, all
/// others lexicographically after them.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ident(String);

impl Ident {
    pub fn new(s: impl Into<String>) -> Self {
        Ident(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn is_numeric(&self) -> bool {
        !self.0.is_empty() && self.0.bytes().all(|b| b.is_ascii_digit())
    }
}

impl Ord for Ident {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_numeric(), other.is_numeric()) {
            (true, true) => {
                let a = self.0.trim_start_matches('0');
                let b = other.0.trim_start_matches('0');
                a.len().cmp(&b.len()).then_with(|| a.cmp(b)).then_with(|| self.0.cmp(&other.0))
            }
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for Ident {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

macro_rules! id_newtype {
    ($name:ident) => {
        #[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub Ident);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                $name(Ident::new(s))
            }

            pub fn as_str(&self) -> &str {
                self.0.as_str()
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({:?})", stringify!($name), self.0.as_str())
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name::new(s)
            }
        }

        impl From<u64> for $name {
            fn from(n: u64) -> Self {
                $name::new(n.to_string())
            }
        }
    };
}

id_newtype!(NodeId);
id_newtype!(EdgeId);

/// A node or an edge of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Node(NodeId),
    Edge(EdgeId),
}

impl Element {
    pub fn as_str(&self) -> &str {
        match self {
            Element::Node(n) => n.as_str(),
            Element::Edge(e) => e.as_str(),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<NodeId> for Element {
    fn from(n: NodeId) -> Self {
        Element::Node(n)
    }
}

impl From<EdgeId> for Element {
    fn from(e: EdgeId) -> Self {
        Element::Edge(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelKind {
    Node,
    Edge,
}

impl fmt::Display for LabelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LabelKind::Node => "node",
            LabelKind::Edge => "edge",
        })
    }
}

/// A label name tagged with the namespace it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub name: String,
    pub kind: LabelKind,
}

impl Label {
    pub fn node(name: impl Into<String>) -> Self {
        Label { name: name.into(), kind: LabelKind::Node }
    }

    pub fn edge(name: impl Into<String>) -> Self {
        Label { name: name.into(), kind: LabelKind::Edge }
    }
}

/// Calendar date with day precision.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Date(NaiveDate);

impl Date {
    pub fn from_ymd(year: i32, month: u32, day: u32) -> Option<Self> {
        NaiveDate::from_ymd_opt(year, month, day).map(Date)
    }

    pub fn year(&self) -> i32 {
        chrono::Datelike::year(&self.0)
    }

    pub fn month(&self) -> u32 {
        chrono::Datelike::month(&self.0)
    }

    pub fn day(&self) -> u32 {
        chrono::Datelike::day(&self.0)
    }
}

impl FromStr for Date {
    type Err = chrono::ParseError;

    /// Accepts ISO `YYYY-MM-DD` and `DD/MM/YYYY`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").or_else(|_| NaiveDate::parse_from_str(s, "%d/%m/%Y")).map(Date)
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%Y-%m-%d"))
    }
}

impl fmt::Debug for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Date({self})")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueType {
    Int,
    Str,
    Date,
}

impl ValueType {
    pub fn name(self) -> &'static str {
        match self {
            ValueType::Int => "int",
            ValueType::Str => "string",
            ValueType::Date => "date",
        }
    }
}

/// A property value.
///
/// The derived `Ord` is a storage order (type tag first) used for sets and
/// canonical output. Semantic comparisons go through [`Value::typed_cmp`],
/// which refuses to order values of different types.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(BigInt),
    Str(String),
    Date(Date),
}

impl Value {
    pub fn int(i: i64) -> Self {
        Value::Int(BigInt::from(i))
    }

    pub fn str(s: impl Into<String>) -> Self {
        Value::Str(s.into())
    }

    pub fn date(year: i32, month: u32, day: u32) -> Self {
        Value::Date(Date::from_ymd(year, month, day).expect("valid calendar date"))
    }

    pub fn value_type(&self) -> ValueType {
        match self {
            Value::Int(_) => ValueType::Int,
            Value::Str(_) => ValueType::Str,
            Value::Date(_) => ValueType::Date,
        }
    }

    pub fn typed_cmp(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => Some(a.cmp(b)),
            (Value::Str(a), Value::Str(b)) => Some(a.cmp(b)),
            (Value::Date(a), Value::Date(b)) => Some(a.cmp(b)),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Str(s) => write!(f, "{s:?}"),
            Value::Date(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Incoming,
    Outgoing,
}

type Props = BTreeMap<String, BTreeSet<Value>>;

/// An immutable property graph.
///
/// Elements are stored in identifier order; the crate-internal evaluation code
/// addresses them by position (`usize`) in that order.
#[derive(Clone, PartialEq, Eq)]
pub struct PropertyGraph {
    nodes: Vec<NodeId>,
    node_ix: HashMap<NodeId, usize>,
    edges: Vec<EdgeId>,
    edge_ix: HashMap<EdgeId, usize>,
    endpoints: Vec<(usize, usize)>,
    node_labels: Vec<BTreeSet<String>>,
    edge_labels: Vec<BTreeSet<String>>,
    node_props: Vec<Props>,
    edge_props: Vec<Props>,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
}

impl fmt::Debug for PropertyGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PropertyGraph")
            .field("nodes", &self.nodes)
            .field("edges", &self.edges)
            .field("endpoints", &self.endpoints)
            .field("node_labels", &self.node_labels)
            .field("edge_labels", &self.edge_labels)
            .field("node_props", &self.node_props)
            .field("edge_props", &self.edge_props)
            .finish()
    }
}

/// Builds a graph from raw component collections.
///
/// Every endpoint must name a node, node and edge identifiers must be
/// disjoint, and each label must attach to an element of its own kind.
pub fn build_graph(
    nodes: impl IntoIterator<Item = NodeId>,
    edges: impl IntoIterator<Item = EdgeId>,
    endpoints: impl IntoIterator<Item = (EdgeId, (NodeId, NodeId))>,
    labelings: impl IntoIterator<Item = (Element, Label)>,
    properties: impl IntoIterator<Item = (Element, String, Value)>,
) -> Result<PropertyGraph, GraphError> {
    let nodes: BTreeSet<NodeId> = nodes.into_iter().collect();
    let edges: BTreeSet<EdgeId> = edges.into_iter().collect();
    let mut rho: BTreeMap<EdgeId, (NodeId, NodeId)> = BTreeMap::new();
    for (e, ends) in endpoints {
        if !edges.contains(&e) {
            return Err(GraphError::UnknownElement(e.to_string()));
        }
        rho.insert(e, ends);
    }
    let mut b = GraphBuilder::new();
    for n in nodes {
        b.node(n);
    }
    for e in edges {
        match rho.remove(&e) {
            Some((s, d)) => b.edge(e, s, d),
            None => return Err(GraphError::MissingEndpoints(e.to_string())),
        };
    }
    for (x, l) in labelings {
        b.label(x, l);
    }
    for (x, k, v) in properties {
        b.property(x, k, v);
    }
    b.build()
}

/// Incremental builder for [`PropertyGraph`]. Validation happens in
/// [`GraphBuilder::build`].
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    nodes: BTreeSet<NodeId>,
    edges: BTreeMap<EdgeId, (NodeId, NodeId)>,
    labels: Vec<(Element, Label)>,
    props: Vec<(Element, String, Value)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(&mut self, id: impl Into<NodeId>) -> &mut Self {
        self.nodes.insert(id.into());
        self
    }

    pub fn edge(&mut self, id: impl Into<EdgeId>, src: impl Into<NodeId>, dst: impl Into<NodeId>) -> &mut Self {
        self.edges.insert(id.into(), (src.into(), dst.into()));
        self
    }

    pub fn label(&mut self, element: impl Into<Element>, label: Label) -> &mut Self {
        self.labels.push((element.into(), label));
        self
    }

    pub fn node_label(&mut self, id: impl Into<NodeId>, name: impl Into<String>) -> &mut Self {
        self.label(Element::Node(id.into()), Label::node(name))
    }

    pub fn edge_label(&mut self, id: impl Into<EdgeId>, name: impl Into<String>) -> &mut Self {
        self.label(Element::Edge(id.into()), Label::edge(name))
    }

    pub fn property(&mut self, element: impl Into<Element>, key: impl Into<String>, value: Value) -> &mut Self {
        self.props.push((element.into(), key.into(), value));
        self
    }

    pub fn node_property(&mut self, id: impl Into<NodeId>, key: impl Into<String>, value: Value) -> &mut Self {
        self.property(Element::Node(id.into()), key, value)
    }

    pub fn edge_property(&mut self, id: impl Into<EdgeId>, key: impl Into<String>, value: Value) -> &mut Self {
        self.property(Element::Edge(id.into()), key, value)
    }

    pub fn build(&self) -> Result<PropertyGraph, GraphError> {
        for e in self.edges.keys() {
            if self.nodes.contains(&NodeId(e.0.clone())) {
                return Err(GraphError::IdClash(e.to_string()));
            }
        }
        let nodes: Vec<NodeId> = self.nodes.iter().cloned().collect();
        let node_ix: HashMap<NodeId, usize> = nodes.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        let edges: Vec<EdgeId> = self.edges.keys().cloned().collect();
        let edge_ix: HashMap<EdgeId, usize> = edges.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();

        let mut endpoints = Vec::with_capacity(edges.len());
        let mut outgoing = vec![Vec::new(); nodes.len()];
        let mut incoming = vec![Vec::new(); nodes.len()];
        for (ei, (e, (s, d))) in self.edges.iter().enumerate() {
            let lookup = |n: &NodeId| {
                node_ix
                    .get(n)
                    .copied()
                    .ok_or_else(|| GraphError::DanglingEdge { edge: e.to_string(), node: n.to_string() })
            };
            let (si, di) = (lookup(s)?, lookup(d)?);
            endpoints.push((si, di));
            outgoing[si].push(ei);
            incoming[di].push(ei);
        }

        let mut node_labels = vec![BTreeSet::new(); nodes.len()];
        let mut edge_labels = vec![BTreeSet::new(); edges.len()];
        for (x, l) in &self.labels {
            let mismatch = |element_kind| GraphError::KindMismatch {
                label: l.name.clone(),
                label_kind: l.kind,
                element: x.to_string(),
                element_kind,
            };
            match x {
                Element::Node(n) => {
                    let i = *node_ix.get(n).ok_or_else(|| GraphError::UnknownElement(n.to_string()))?;
                    if l.kind != LabelKind::Node {
                        return Err(mismatch("node"));
                    }
                    node_labels[i].insert(l.name.clone());
                }
                Element::Edge(e) => {
                    let i = *edge_ix.get(e).ok_or_else(|| GraphError::UnknownElement(e.to_string()))?;
                    if l.kind != LabelKind::Edge {
                        return Err(mismatch("edge"));
                    }
                    edge_labels[i].insert(l.name.clone());
                }
            }
        }

        let mut node_props = vec![Props::new(); nodes.len()];
        let mut edge_props = vec![Props::new(); edges.len()];
        for (x, k, v) in &self.props {
            let slot = match x {
                Element::Node(n) => node_ix.get(n).map(|&i| &mut node_props[i]),
                Element::Edge(e) => edge_ix.get(e).map(|&i| &mut edge_props[i]),
            }
            .ok_or_else(|| GraphError::UnknownElement(x.to_string()))?;
            slot.entry(k.clone()).or_default().insert(v.clone());
        }

        Ok(PropertyGraph {
            nodes,
            node_ix,
            edges,
            edge_ix,
            endpoints,
            node_labels,
            edge_labels,
            node_props,
            edge_props,
            outgoing,
            incoming,
        })
    }
}

impl PropertyGraph {
    pub fn empty() -> Self {
        GraphBuilder::new().build().expect("empty graph is valid")
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_node(&self, n: &NodeId) -> bool {
        self.node_ix.contains_key(n)
    }

    pub fn contains_edge(&self, e: &EdgeId) -> bool {
        self.edge_ix.contains_key(e)
    }

    /// Source and destination of `e`.
    pub fn endpoints(&self, e: &EdgeId) -> Result<(&NodeId, &NodeId), GraphError> {
        let i = self.edge_index(e)?;
        let (s, d) = self.endpoints[i];
        Ok((&self.nodes[s], &self.nodes[d]))
    }

    pub fn labels(&self, x: &Element) -> Result<&BTreeSet<String>, GraphError> {
        match x {
            Element::Node(n) => Ok(&self.node_labels[self.node_index(n)?]),
            Element::Edge(e) => Ok(&self.edge_labels[self.edge_index(e)?]),
        }
    }

    /// `σ(x, k)`; empty when the key is unset.
    pub fn property_values(&self, x: &Element, key: &str) -> Result<BTreeSet<Value>, GraphError> {
        Ok(self.props_of(x)?.get(key).cloned().unwrap_or_default())
    }

    /// All keys with a nonempty value set on `x`.
    pub fn property_keys(&self, x: &Element) -> Result<impl Iterator<Item = &str>, GraphError> {
        Ok(self.props_of(x)?.keys().map(String::as_str))
    }

    fn props_of(&self, x: &Element) -> Result<&Props, GraphError> {
        match x {
            Element::Node(n) => Ok(&self.node_props[self.node_index(n)?]),
            Element::Edge(e) => Ok(&self.edge_props[self.edge_index(e)?]),
        }
    }

    /// Edges incident to `n` in the given direction, each paired with the node
    /// at the other end.
    pub fn adjacent_edges(&self, n: &NodeId, direction: Direction) -> Result<BTreeSet<(EdgeId, NodeId)>, GraphError> {
        let i = self.node_index(n)?;
        let list = match direction {
            Direction::Outgoing => &self.outgoing[i],
            Direction::Incoming => &self.incoming[i],
        };
        Ok(list
            .iter()
            .map(|&e| {
                let (s, d) = self.endpoints[e];
                let other = if direction == Direction::Outgoing { d } else { s };
                (self.edges[e].clone(), self.nodes[other].clone())
            })
            .collect())
    }

    pub fn node_index(&self, n: &NodeId) -> Result<usize, GraphError> {
        self.node_ix.get(n).copied().ok_or_else(|| GraphError::UnknownElement(n.to_string()))
    }

    pub fn edge_index(&self, e: &EdgeId) -> Result<usize, GraphError> {
        self.edge_ix.get(e).copied().ok_or_else(|| GraphError::UnknownElement(e.to_string()))
    }

    /// Every edge label used anywhere in the graph.
    pub fn edge_label_names(&self) -> BTreeSet<&str> {
        self.edge_labels.iter().flatten().map(String::as_str).collect()
    }

    /// Every node label used anywhere in the graph.
    pub fn node_label_names(&self) -> BTreeSet<&str> {
        self.node_labels.iter().flatten().map(String::as_str).collect()
    }

    /// Re-creates a builder holding exactly this graph's content.
    pub fn to_builder(&self) -> GraphBuilder {
        let mut b = GraphBuilder::new();
        for (i, n) in self.nodes.iter().enumerate() {
            b.node(n.clone());
            for l in &self.node_labels[i] {
                b.node_label(n.clone(), l.clone());
            }
            for (k, vs) in &self.node_props[i] {
                for v in vs {
                    b.node_property(n.clone(), k.clone(), v.clone());
                }
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            let (s, d) = self.endpoints[i];
            b.edge(e.clone(), self.nodes[s].clone(), self.nodes[d].clone());
            for l in &self.edge_labels[i] {
                b.edge_label(e.clone(), l.clone());
            }
            for (k, vs) in &self.edge_props[i] {
                for v in vs {
                    b.edge_property(e.clone(), k.clone(), v.clone());
                }
            }
        }
        b
    }

    // Index-based accessors for the evaluator.

    pub(crate) fn ix_endpoints(&self, e: usize) -> (usize, usize) {
        self.endpoints[e]
    }

    pub(crate) fn ix_outgoing(&self, n: usize) -> &[usize] {
        &self.outgoing[n]
    }

    pub(crate) fn ix_incoming(&self, n: usize) -> &[usize] {
        &self.incoming[n]
    }

    pub(crate) fn ix_node_labels(&self, n: usize) -> &BTreeSet<String> {
        &self.node_labels[n]
    }

    pub(crate) fn ix_edge_labels(&self, e: usize) -> &BTreeSet<String> {
        &self.edge_labels[e]
    }

    pub(crate) fn ix_node_values(&self, n: usize, key: &str) -> Option<&BTreeSet<Value>> {
        self.node_props[n].get(key)
    }

    pub(crate) fn ix_edge_values(&self, e: usize, key: &str) -> Option<&BTreeSet<Value>> {
        self.edge_props[e].get(key)
    }
}

/// The employment graph used throughout the documentation: three people or
/// companies, four relationships.
pub fn office_graph() -> PropertyGraph {
    let mut b = GraphBuilder::new();
    b.node(100u64).node(101u64).node(102u64);
    b.edge(200u64, 100u64, 101u64)
        .edge(201u64, 100u64, 102u64)
        .edge(202u64, 102u64, 100u64)
        .edge(203u64, 102u64, 101u64);
    b.node_label(100u64, "Person")
        .node_label(100u64, "Employee")
        .node_label(101u64, "Company")
        .node_label(102u64, "Employee");
    b.edge_label(200u64, "worksFor")
        .edge_label(201u64, "colleagueOf")
        .edge_label(202u64, "colleagueOf")
        .edge_label(203u64, "worksFor");
    b.node_property(100u64, "name", Value::str("Tim Canterbury"))
        .node_property(100u64, "age", Value::int(30))
        .node_property(101u64, "name", Value::str("Wernham Hogg"))
        .node_property(102u64, "name", Value::str("Gareth Keenan"))
        .node_property(102u64, "role", Value::str("sales"))
        .node_property(102u64, "role", Value::str("team leader"))
        .edge_property(200u64, "since", Value::date(1970, 1, 1))
        .edge_property(203u64, "since", Value::date(2020, 8, 2));
    b.build().expect("office graph is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> NodeId {
        NodeId::new(s)
    }

    #[test]
    fn office_graph_shape() {
        let g = office_graph();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 4);
        let role = g.property_values(&Element::Node(n("102")), "role").unwrap();
        assert_eq!(role, BTreeSet::from([Value::str("sales"), Value::str("team leader")]));
        let since = g.property_values(&Element::Edge(EdgeId::new("200")), "since").unwrap();
        assert_eq!(since, BTreeSet::from([Value::date(1970, 1, 1)]));
        assert!(g.property_values(&Element::Node(n("101")), "age").unwrap().is_empty());
    }

    #[test]
    fn empty_graph_accessors() {
        let g = build_graph([], [], [], [], []).unwrap();
        assert!(g.nodes().is_empty());
        assert!(g.edges().is_empty());
        assert!(g.edge_label_names().is_empty());
    }

    #[test]
    fn dangling_edge() {
        let err = build_graph([n("100")], [EdgeId::new("200")], [(EdgeId::new("200"), (n("100"), n("101")))], [], [])
            .unwrap_err();
        assert_eq!(err, GraphError::DanglingEdge { edge: "200".into(), node: "101".into() });
    }

    #[test]
    fn missing_endpoints() {
        let err = build_graph([n("1")], [EdgeId::new("2")], [], [], []).unwrap_err();
        assert_eq!(err, GraphError::MissingEndpoints("2".into()));
    }

    #[test]
    fn id_clash() {
        let err = GraphBuilder::new().node(1u64).edge(1u64, 1u64, 1u64).build().unwrap_err();
        assert_eq!(err, GraphError::IdClash("1".into()));
    }

    #[test]
    fn label_kind_mismatch() {
        let err =
            GraphBuilder::new().node(1u64).label(Element::Node(n("1")), Label::edge("knows")).build().unwrap_err();
        assert!(matches!(err, GraphError::KindMismatch { .. }));
    }

    #[test]
    fn unknown_element() {
        let g = office_graph();
        assert_eq!(g.property_values(&Element::Node(n("999")), "name"), Err(GraphError::UnknownElement("999".into())));
        assert!(g.adjacent_edges(&n("999"), Direction::Outgoing).is_err());
    }

    #[test]
    fn adjacency() {
        let g = office_graph();
        let out = g.adjacent_edges(&n("100"), Direction::Outgoing).unwrap();
        assert_eq!(out, BTreeSet::from([(EdgeId::new("200"), n("101")), (EdgeId::new("201"), n("102"))]));
        assert!(g.adjacent_edges(&n("101"), Direction::Outgoing).unwrap().is_empty());
        let inc = g.adjacent_edges(&n("101"), Direction::Incoming).unwrap();
        assert_eq!(inc, BTreeSet::from([(EdgeId::new("200"), n("100")), (EdgeId::new("203"), n("102"))]));
    }

    #[test]
    fn isolated_node_has_no_adjacent_edges() {
        let g = GraphBuilder::new().node("x").build().unwrap();
        assert!(g.adjacent_edges(&n("x"), Direction::Outgoing).unwrap().is_empty());
        assert!(g.adjacent_edges(&n("x"), Direction::Incoming).unwrap().is_empty());
    }

    #[test]
    fn numeric_ids_sort_numerically() {
        let mut ids = [Ident::new("100"), Ident::new("99"), Ident::new("a"), Ident::new("7")];
        ids.sort();
        let s: Vec<_> = ids.iter().map(Ident::as_str).collect();
        assert_eq!(s, ["7", "99", "100", "a"]);
    }

    #[test]
    fn date_formats() {
        let iso: Date = "2020-08-02".parse().unwrap();
        let slash: Date = "02/08/2020".parse().unwrap();
        assert_eq!(iso, slash);
        assert_eq!(slash.to_string(), "2020-08-02");
        assert!("2020-13-01".parse::<Date>().is_err());
    }

    #[test]
    fn values_of_different_types_do_not_order() {
        assert_eq!(Value::int(1).typed_cmp(&Value::str("1")), None);
        assert_ne!(Value::int(1), Value::str("1"));
        assert_eq!(Value::int(1).typed_cmp(&Value::int(2)), Some(Ordering::Less));
    }

    #[test]
    fn to_builder_round_trips() {
        let g = office_graph();
        assert_eq!(g.to_builder().build().unwrap(), g);
    }
}
