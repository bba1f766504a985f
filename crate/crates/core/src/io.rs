//! Graph interchange as JSON documents, and export of a graph with its
//! shapes as ASP facts.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{Map, Value as Json};
use thiserror::Error;

use crate::ast::{
    CmpOp, EdgeConstraint, EdgeTarget, NodeConstraint, NodeTarget, PathExpr, SetComparator, Shape, ShapeSet,
    ValuePredicate,
};
use crate::graph::{Date, EdgeId, Element, GraphBuilder, GraphError, NodeId, PropertyGraph, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImportError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn schema<T>(path: impl Into<String>, message: impl Into<String>) -> Result<T, ImportError> {
    Err(ImportError::Schema { path: path.into(), message: message.into() })
}

/// Reads a graph document:
/// `{"nodes": [{"id", "labels", "properties"}], "relationships": [{"id",
/// "labels", "start", "end", "properties"}]}` where every property maps to a
/// list of `{"type": "int" | "string" | "date", "value": …}`.
///
/// Identifiers may be strings or integers, `label` (a single string) is
/// accepted in place of `labels`, and integer values may be JSON numbers or
/// decimal strings. Unknown fields are ignored with a warning.
pub fn import_graph_json(bytes: &[u8]) -> Result<PropertyGraph, ImportError> {
    let doc: Json = serde_json::from_slice(bytes).map_err(|e| ImportError::Json(e.to_string()))?;
    let Json::Object(root) = doc else {
        return schema("$", "expected an object");
    };
    warn_unknown(&root, "$", &["nodes", "relationships"]);
    let mut b = GraphBuilder::new();
    let nodes = array_field(&root, "$", "nodes")?;
    let mut node_props = Vec::new();
    for (i, n) in nodes.iter().enumerate() {
        let path = format!("$.nodes[{i}]");
        let Json::Object(n) = n else {
            return schema(path, "expected an object");
        };
        warn_unknown(n, &path, &["id", "labels", "label", "properties"]);
        let id = NodeId::new(ident(n, &path)?);
        b.node(id.clone());
        for l in labels(n, &path)? {
            b.node_label(id.clone(), l);
        }
        node_props.push((Element::Node(id), properties(n, &path)?));
    }
    let rels = array_field(&root, "$", "relationships")?;
    for (i, r) in rels.iter().enumerate() {
        let path = format!("$.relationships[{i}]");
        let Json::Object(r) = r else {
            return schema(path, "expected an object");
        };
        warn_unknown(r, &path, &["id", "labels", "label", "start", "end", "properties"]);
        let id = EdgeId::new(ident(r, &path)?);
        let start = endpoint(r, &path, "start")?;
        let end = endpoint(r, &path, "end")?;
        b.edge(id.clone(), start, end);
        for l in labels(r, &path)? {
            b.edge_label(id.clone(), l);
        }
        node_props.push((Element::Edge(id), properties(r, &path)?));
    }
    for (el, props) in node_props {
        for (k, vs) in props {
            for v in vs {
                b.property(el.clone(), k.clone(), v);
            }
        }
    }
    Ok(b.build()?)
}

fn warn_unknown(obj: &Map<String, Json>, path: &str, known: &[&str]) {
    for k in obj.keys() {
        if !known.contains(&k.as_str()) {
            log::warn!("{path}: ignoring unknown field `{k}`");
        }
    }
}

fn array_field<'j>(obj: &'j Map<String, Json>, path: &str, key: &str) -> Result<&'j Vec<Json>, ImportError> {
    match obj.get(key) {
        Some(Json::Array(a)) => Ok(a),
        Some(_) => schema(format!("{path}.{key}"), "expected an array"),
        None => schema(path, format!("missing field `{key}`")),
    }
}

fn id_text(v: &Json, path: &str) -> Result<String, ImportError> {
    match v {
        Json::String(s) => Ok(s.clone()),
        Json::Number(n) if n.is_u64() || n.is_i64() => Ok(n.to_string()),
        _ => schema(path, "expected a string or integer identifier"),
    }
}

fn ident(obj: &Map<String, Json>, path: &str) -> Result<String, ImportError> {
    match obj.get("id") {
        Some(v) => id_text(v, &format!("{path}.id")),
        None => schema(path, "missing field `id`"),
    }
}

fn endpoint(obj: &Map<String, Json>, path: &str, key: &str) -> Result<NodeId, ImportError> {
    match obj.get(key) {
        // Some exports nest the endpoint as a node object.
        Some(Json::Object(o)) => Ok(NodeId::new(ident(o, &format!("{path}.{key}"))?)),
        Some(v) => Ok(NodeId::new(id_text(v, &format!("{path}.{key}"))?)),
        None => schema(path, format!("missing field `{key}`")),
    }
}

fn labels(obj: &Map<String, Json>, path: &str) -> Result<Vec<String>, ImportError> {
    let mut out = Vec::new();
    match obj.get("labels") {
        Some(Json::Array(a)) => {
            for (i, l) in a.iter().enumerate() {
                match l {
                    Json::String(s) => out.push(s.clone()),
                    _ => return schema(format!("{path}.labels[{i}]"), "expected a string"),
                }
            }
        }
        Some(_) => return schema(format!("{path}.labels"), "expected an array of strings"),
        None => {}
    }
    match obj.get("label") {
        Some(Json::String(s)) => out.push(s.clone()),
        Some(_) => return schema(format!("{path}.label"), "expected a string"),
        None => {}
    }
    Ok(out)
}

fn properties(obj: &Map<String, Json>, path: &str) -> Result<Vec<(String, Vec<Value>)>, ImportError> {
    let props = match obj.get("properties") {
        None | Some(Json::Null) => return Ok(Vec::new()),
        Some(Json::Object(p)) => p,
        Some(_) => return schema(format!("{path}.properties"), "expected an object"),
    };
    let mut out = Vec::new();
    for (k, vs) in props {
        let kpath = format!("{path}.properties.{k}");
        let items: Vec<&Json> = match vs {
            Json::Array(a) => a.iter().collect(),
            single @ Json::Object(_) => vec![single],
            _ => return schema(kpath, "expected a list of typed values"),
        };
        let mut values = Vec::new();
        for (i, item) in items.into_iter().enumerate() {
            values.push(typed_value(item, &format!("{kpath}[{i}]"))?);
        }
        out.push((k.clone(), values));
    }
    Ok(out)
}

fn typed_value(item: &Json, path: &str) -> Result<Value, ImportError> {
    let Json::Object(o) = item else {
        return schema(path, "expected {\"type\": …, \"value\": …}");
    };
    warn_unknown(o, path, &["type", "value"]);
    let Some(Json::String(ty)) = o.get("type") else {
        return schema(path, "missing or non-string `type`");
    };
    let Some(v) = o.get("value") else {
        return schema(path, "missing field `value`");
    };
    match (ty.as_str(), v) {
        ("int", Json::Number(n)) if n.is_i64() || n.is_u64() => {
            Ok(Value::Int(n.to_string().parse::<BigInt>().expect("integer literal")))
        }
        ("int", Json::String(s)) => match s.parse::<BigInt>() {
            Ok(i) => Ok(Value::Int(i)),
            Err(_) => schema(path, format!("`{s}` is not an integer")),
        },
        ("string", Json::String(s)) => Ok(Value::Str(s.clone())),
        ("date", Json::String(s)) => match s.parse::<Date>() {
            Ok(d) => Ok(Value::Date(d)),
            Err(_) => schema(path, format!("`{s}` is not a date (YYYY-MM-DD)")),
        },
        ("int" | "string" | "date", _) => schema(path, format!("value does not match type `{ty}`")),
        _ => schema(path, format!("unknown value type `{ty}`")),
    }
}

#[derive(Serialize)]
struct TypedValue {
    #[serde(rename = "type")]
    ty: &'static str,
    value: Json,
}

#[derive(Serialize)]
struct NodeDoc {
    id: String,
    labels: Vec<String>,
    properties: BTreeMap<String, Vec<TypedValue>>,
}

#[derive(Serialize)]
struct RelDoc {
    end: String,
    id: String,
    labels: Vec<String>,
    properties: BTreeMap<String, Vec<TypedValue>>,
    start: String,
}

#[derive(Serialize)]
struct GraphDoc {
    nodes: Vec<NodeDoc>,
    relationships: Vec<RelDoc>,
}

fn typed(v: &Value) -> TypedValue {
    match v {
        Value::Int(i) => TypedValue {
            ty: "int",
            value: i64::try_from(i).map(Json::from).unwrap_or_else(|_| Json::String(i.to_string())),
        },
        Value::Str(s) => TypedValue { ty: "string", value: Json::String(s.clone()) },
        Value::Date(d) => TypedValue { ty: "date", value: Json::String(d.to_string()) },
    }
}

fn props_doc(g: &PropertyGraph, el: &Element) -> BTreeMap<String, Vec<TypedValue>> {
    let keys: Vec<String> = g.property_keys(el).expect("own element").map(str::to_string).collect();
    keys.into_iter()
        .map(|k| {
            let vs = g.property_values(el, &k).expect("own element");
            (k, vs.iter().map(typed).collect())
        })
        .collect()
}

/// Writes the canonical document: compact, keys sorted, elements in
/// identifier order. Integers outside the 64-bit range are written as
/// decimal strings.
pub fn export_graph_json(g: &PropertyGraph) -> Vec<u8> {
    let nodes = g
        .nodes()
        .iter()
        .map(|n| {
            let el = Element::Node(n.clone());
            NodeDoc {
                id: n.to_string(),
                labels: g.labels(&el).expect("own node").iter().cloned().collect(),
                properties: props_doc(g, &el),
            }
        })
        .collect();
    let relationships = g
        .edges()
        .iter()
        .map(|e| {
            let el = Element::Edge(e.clone());
            let (s, d) = g.endpoints(e).expect("own edge");
            RelDoc {
                end: d.to_string(),
                id: e.to_string(),
                labels: g.labels(&el).expect("own edge").iter().cloned().collect(),
                properties: props_doc(g, &el),
                start: s.to_string(),
            }
        })
        .collect();
    serde_json::to_vec(&GraphDoc { nodes, relationships }).expect("plain data serializes")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AspError {
    #[error("{kind} `{first}` and `{second}` both encode as `{encoded}`")]
    NameCollision { kind: &'static str, first: String, second: String, encoded: String },
}

/// Graph and shapes as ASP facts: `edge/3`, `label/2`, `property/3`, one
/// `constraint/1` per sub-constraint, one `path/1` per (sub-)path, and
/// `nodeshape/3` / `edgeshape/3`. Nodes without edges get a `node/1` fact.
///
/// Labels, keys and shape names start lower-case in ASP, so their first
/// character is lowered; identifiers that are not plain ASP constants are
/// quoted. Facts are sorted within each group; groups are introduced by `%`
/// comments.
pub fn export_asp(g: &PropertyGraph, s: &ShapeSet) -> Result<String, AspError> {
    let mut enc = Encoder::default();
    let mut sections: Vec<(&str, Vec<Fact>)> = Vec::new();

    let mut isolated = Vec::new();
    for (i, n) in g.nodes().iter().enumerate() {
        if g.ix_outgoing(i).is_empty() && g.ix_incoming(i).is_empty() {
            isolated.push(fact("node", vec![enc.id(n.as_str())?]));
        }
    }
    sections.push(("Nodes without edges.", isolated));

    let mut edges = Vec::new();
    for e in g.edges() {
        let (src, dst) = g.endpoints(e).expect("own edge");
        edges.push(fact("edge", vec![enc.id(src.as_str())?, enc.id(e.as_str())?, enc.id(dst.as_str())?]));
    }
    sections.push(("Edges: edge(source, id, target).", edges));

    let elements: Vec<Element> =
        g.nodes().iter().cloned().map(Element::Node).chain(g.edges().iter().cloned().map(Element::Edge)).collect();
    let mut labels = Vec::new();
    let mut props = Vec::new();
    for el in &elements {
        let id = enc.id(el.as_str())?;
        for l in g.labels(el).expect("own element") {
            labels.push(fact("label", vec![id.clone(), enc.name(l)?]));
        }
        let keys: Vec<String> = g.property_keys(el).expect("own element").map(str::to_string).collect();
        for k in keys {
            let key = enc.name(&k)?;
            for v in g.property_values(el, &k).expect("own element") {
                props.push(fact("property", vec![id.clone(), key.clone(), value_term(&v)]));
            }
        }
    }
    sections.push(("Labels of nodes and edges.", labels));
    sections.push(("Properties of nodes and edges.", props));

    let mut constraints = BTreeSet::new();
    let mut paths = BTreeSet::new();
    let mut shapes = Vec::new();
    for shape in s.shapes() {
        let name = enc.shape(shape.name())?;
        match shape {
            Shape::Node(ns) => {
                let c = enc.node_constraint(&ns.constraint, &mut constraints, &mut paths)?;
                let t = enc.node_target(&ns.target)?;
                shapes.push(fact("nodeshape", vec![name, c, t]));
            }
            Shape::Edge(es) => {
                let c = enc.edge_constraint(&es.constraint, &mut constraints, &mut paths)?;
                let t = enc.edge_target(&es.target)?;
                shapes.push(fact("edgeshape", vec![name, c, t]));
            }
        }
    }
    let mut sub = Vec::new();
    sub.extend(constraints.into_iter().map(|c| fact("constraint", vec![c])));
    sub.extend(paths.into_iter().map(|p| fact("path", vec![p])));
    sections.push(("Constraints and paths used by the shapes.", sub));
    sections.push(("Shapes: name, constraint, target.", shapes));

    let mut out = String::new();
    for (title, mut facts) in sections {
        if facts.is_empty() {
            continue;
        }
        facts.sort_by(|a, b| a.key().cmp(&b.key()));
        facts.dedup();
        if !out.is_empty() {
            out.push('\n');
        }
        let _ = writeln!(out, "% {title}");
        for f in facts {
            let _ = writeln!(out, "{}({}).", f.pred, f.args.join(", "));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Fact {
    pred: &'static str,
    args: Vec<String>,
}

fn fact(pred: &'static str, args: Vec<String>) -> Fact {
    Fact { pred, args }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum SortKey {
    Num(BigInt),
    Text(String),
}

impl Fact {
    fn key(&self) -> (&'static str, Vec<SortKey>) {
        let args = self
            .args
            .iter()
            .map(|a| match a.parse::<BigInt>() {
                Ok(n) => SortKey::Num(n),
                Err(_) => SortKey::Text(a.clone()),
            })
            .collect();
        (self.pred, args)
    }
}

fn asp_string(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn value_term(v: &Value) -> String {
    match v {
        Value::Int(i) => format!("integer({i})"),
        Value::Str(s) => format!("string({})", asp_string(s)),
        Value::Date(d) => format!("date({},{},{})", d.year(), d.month(), d.day()),
    }
}

fn is_constant(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_lowercase()) && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_integer(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'))
}

/// Encodes names consistently and detects merges.
#[derive(Default)]
struct Encoder {
    seen: HashMap<(&'static str, String), String>,
}

impl Encoder {
    fn record(&mut self, kind: &'static str, original: &str, encoded: String) -> Result<String, AspError> {
        match self.seen.get(&(kind, encoded.clone())) {
            Some(first) if first != original => {
                Err(AspError::NameCollision { kind, first: first.clone(), second: original.to_string(), encoded })
            }
            Some(_) => Ok(encoded),
            None => {
                self.seen.insert((kind, encoded.clone()), original.to_string());
                Ok(encoded)
            }
        }
    }

    /// Node and edge identifiers: integers stay numbers.
    fn id(&mut self, s: &str) -> Result<String, AspError> {
        let enc = if is_integer(s) { s.to_string() } else { lowered(s) };
        self.record("identifier", s, enc)
    }

    /// Labels and keys share one namespace of constants.
    fn name(&mut self, s: &str) -> Result<String, AspError> {
        self.record("label or key", s, lowered(s))
    }

    fn shape(&mut self, s: &str) -> Result<String, AspError> {
        self.record("shape name", s, lowered(s))
    }

    fn path(&mut self, p: &PathExpr, paths: &mut BTreeSet<String>) -> Result<String, AspError> {
        let t = match p {
            PathExpr::Label(l) => format!("label({})", self.name(l)?),
            PathExpr::Inverse(q) => format!("inverse({})", self.path(q, paths)?),
            PathExpr::Star(q) => format!("star({})", self.path(q, paths)?),
            PathExpr::Plus(q) => format!("plus({})", self.path(q, paths)?),
            PathExpr::Opt(q) => format!("opt({})", self.path(q, paths)?),
            PathExpr::Seq(a, b) => format!("seq({},{})", self.path(a, paths)?, self.path(b, paths)?),
            PathExpr::Alt(a, b) => format!("alt({},{})", self.path(a, paths)?, self.path(b, paths)?),
        };
        paths.insert(t.clone());
        Ok(t)
    }

    fn pred(&mut self, f: &ValuePredicate) -> String {
        match f {
            ValuePredicate::Any => "any".to_string(),
            ValuePredicate::TypeIs(t) => format!("type({})", t.name()),
            ValuePredicate::Cmp(op, v) => format!("cmp({},{})", cmp_name(*op), value_term(v)),
            ValuePredicate::Not(f) => format!("not({})", self.pred(f)),
            ValuePredicate::And(a, b) => format!("and({},{})", self.pred(a), self.pred(b)),
        }
    }

    fn node_constraint(
        &mut self,
        c: &NodeConstraint,
        cs: &mut BTreeSet<String>,
        ps: &mut BTreeSet<String>,
    ) -> Result<String, AspError> {
        use NodeConstraint as C;
        let t = match c {
            C::True => "top".to_string(),
            C::ShapeRef(s) => format!("shape({})", self.shape(s)?),
            C::ExactNode(n) => format!("id({})", self.id(n.as_str())?),
            C::HasLabel(l) => format!("label({})", self.name(l)?),
            C::Not(c) => format!("not({})", self.node_constraint(c, cs, ps)?),
            C::And(a, b) => format!("and({},{})", self.node_constraint(a, cs, ps)?, self.node_constraint(b, cs, ps)?),
            C::QualPath { min, path, body } => {
                let p = self.path(path, ps)?;
                format!("greaterEq({p},{},{min})", self.node_constraint(body, cs, ps)?)
            }
            C::QualKey { min, key, pred } => {
                format!("greaterEqKey({},{},{min})", self.name(key)?, self.pred(pred))
            }
            C::QualIncoming { min, body } => format!("greaterEqIn({},{min})", self.edge_constraint(body, cs, ps)?),
            C::QualOutgoing { min, body } => format!("greaterEqOut({},{min})", self.edge_constraint(body, cs, ps)?),
            C::PathCmp { op, left, right } => {
                format!("cmpPaths({},{},{})", set_name(*op), self.path(left, ps)?, self.path(right, ps)?)
            }
            C::PathKeyCmp { op, left_path, left_key, right_path, right_key } => format!(
                "cmpPathKeys({},{},{},{},{})",
                set_name(*op),
                self.path(left_path, ps)?,
                self.name(left_key)?,
                self.path(right_path, ps)?,
                self.name(right_key)?
            ),
            C::KeyCmp { op, left, right } => {
                format!("cmpKeys({},{},{})", set_name(*op), self.name(left)?, self.name(right)?)
            }
        };
        cs.insert(t.clone());
        Ok(t)
    }

    fn edge_constraint(
        &mut self,
        c: &EdgeConstraint,
        cs: &mut BTreeSet<String>,
        ps: &mut BTreeSet<String>,
    ) -> Result<String, AspError> {
        use EdgeConstraint as C;
        let t = match c {
            C::True => "top".to_string(),
            C::ShapeRef(s) => format!("shape({})", self.shape(s)?),
            C::ExactEdge(e) => format!("id({})", self.id(e.as_str())?),
            C::HasLabel(l) => format!("label({})", self.name(l)?),
            C::Not(c) => format!("not({})", self.edge_constraint(c, cs, ps)?),
            C::And(a, b) => format!("and({},{})", self.edge_constraint(a, cs, ps)?, self.edge_constraint(b, cs, ps)?),
            C::QualKey { min, key, pred } => {
                format!("greaterEqKey({},{},{min})", self.name(key)?, self.pred(pred))
            }
            C::Src(n) => format!("src({})", self.node_constraint(n, cs, ps)?),
            C::Dst(n) => format!("dst({})", self.node_constraint(n, cs, ps)?),
            C::KeyCmp { op, left, right } => {
                format!("cmpKeys({},{},{})", set_name(*op), self.name(left)?, self.name(right)?)
            }
        };
        cs.insert(t.clone());
        Ok(t)
    }

    fn node_target(&mut self, q: &NodeTarget) -> Result<String, AspError> {
        Ok(match q {
            NodeTarget::Nothing => "bottom".to_string(),
            NodeTarget::Exact(n) => format!("id({})", self.id(n.as_str())?),
            NodeTarget::HasLabel(l) => format!("label({})", self.name(l)?),
            NodeTarget::HasKey(k) => format!("key({})", self.name(k)?),
            NodeTarget::HasKeyValue(k, v) => format!("keyValue({},{})", self.name(k)?, value_term(v)),
        })
    }

    fn edge_target(&mut self, q: &EdgeTarget) -> Result<String, AspError> {
        Ok(match q {
            EdgeTarget::Nothing => "bottom".to_string(),
            EdgeTarget::Exact(e) => format!("id({})", self.id(e.as_str())?),
            EdgeTarget::HasLabel(l) => format!("label({})", self.name(l)?),
            EdgeTarget::HasKey(k) => format!("key({})", self.name(k)?),
            EdgeTarget::HasKeyValue(k, v) => format!("keyValue({},{})", self.name(k)?, value_term(v)),
        })
    }
}

/// First character lowered; quoted when the result is still not a plain
/// constant.
fn lowered(s: &str) -> String {
    let mut cs = s.chars();
    let low = match cs.next() {
        Some(c) => c.to_lowercase().chain(cs).collect::<String>(),
        None => String::new(),
    };
    if is_constant(&low) {
        low
    } else {
        asp_string(s)
    }
}

fn cmp_name(op: CmpOp) -> &'static str {
    match op {
        CmpOp::Eq => "eq",
        CmpOp::Ne => "neq",
        CmpOp::Lt => "lt",
        CmpOp::Le => "leq",
        CmpOp::Gt => "gt",
        CmpOp::Ge => "geq",
    }
}

fn set_name(op: SetComparator) -> &'static str {
    op.name()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::link_shapes;
    use crate::graph::office_graph;

    #[test]
    fn json_round_trip() {
        let g = office_graph();
        let bytes = export_graph_json(&g);
        assert_eq!(import_graph_json(&bytes).unwrap(), g);
    }

    #[test]
    fn empty_document() {
        let g = import_graph_json(br#"{"nodes":[],"relationships":[]}"#).unwrap();
        assert_eq!(g.node_count(), 0);
        assert_eq!(export_graph_json(&PropertyGraph::empty()), br#"{"nodes":[],"relationships":[]}"#);
    }

    #[test]
    fn dangling_relationship() {
        let doc = br#"{"nodes":[{"id":1}],"relationships":[{"id":2,"label":"a","start":9,"end":1}]}"#;
        assert!(matches!(import_graph_json(doc), Err(ImportError::Graph(GraphError::DanglingEdge { .. }))));
    }

    #[test]
    fn schema_errors() {
        let bad_type = br#"{"nodes":[{"id":1,"properties":{"k":[{"type":"float","value":1.5}]}}],"relationships":[]}"#;
        assert!(matches!(import_graph_json(bad_type), Err(ImportError::Schema { .. })));
        let missing = br#"{"nodes":[]}"#;
        assert!(matches!(import_graph_json(missing), Err(ImportError::Schema { .. })));
        assert!(matches!(import_graph_json(b"{"), Err(ImportError::Json(_))));
    }

    #[test]
    fn lenient_forms() {
        let doc = br#"{"nodes":[{"id":"a","label":"X","extra":true,"properties":{"n":[{"type":"int","value":"123456789012345678901234567890"}]}}],"relationships":[]}"#;
        let g = import_graph_json(doc).unwrap();
        let vs = g.property_values(&Element::Node(NodeId::new("a")), "n").unwrap();
        assert_eq!(vs.len(), 1);
        let again = import_graph_json(&export_graph_json(&g)).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn asp_for_office_graph() {
        let s = link_shapes(vec![Shape::node(
            "s1",
            NodeConstraint::at_least(1, PathExpr::label("colleagueOf"), NodeConstraint::label("Person")),
            NodeTarget::HasLabel("Employee".into()),
        )])
        .unwrap();
        let text = export_asp(&office_graph(), &s).unwrap();
        for line in [
            "edge(100, 200, 101).",
            "label(100, employee).",
            "label(200, worksFor).",
            "property(100, name, string(\"Tim Canterbury\")).",
            "property(100, age, integer(30)).",
            "constraint(greaterEq(label(colleagueOf),label(person),1)).",
            "constraint(label(person)).",
            "path(label(colleagueOf)).",
            "nodeshape(s1, greaterEq(label(colleagueOf),label(person),1), label(employee)).",
        ] {
            assert!(text.lines().any(|l| l == line), "missing {line}\n{text}");
        }
        assert!(!text.contains("node("));
    }

    #[test]
    fn asp_empty() {
        assert_eq!(export_asp(&PropertyGraph::empty(), &ShapeSet::empty()).unwrap(), "");
    }

    #[test]
    fn asp_collisions_and_quoting() {
        let mut b = GraphBuilder::new();
        b.node("x").node_label("x", "Person").node_label("x", "person");
        let err = export_asp(&b.build().unwrap(), &ShapeSet::empty()).unwrap_err();
        assert!(matches!(err, AspError::NameCollision { .. }));

        let mut b = GraphBuilder::new();
        b.node("Node 1").node_label("Node 1", "has space").node_property("Node 1", "k", Value::date(2020, 8, 2));
        let text = export_asp(&b.build().unwrap(), &ShapeSet::empty()).unwrap();
        assert!(text.contains("node(\"Node 1\")."));
        assert!(text.contains("label(\"Node 1\", \"has space\")."));
        assert!(text.contains("property(\"Node 1\", k, date(2020,8,2))."));
    }
}
