//! The `.progs` text syntax: a lexer, a recursive-descent parser producing
//! sugared shapes, and a renderer for linked shape sets.
//!
//! ```text
//! document   = { shape } ;
//! shape      = ("NODE" | "EDGE") name "[" [ target ] "]" "{" constraint "}" ";" ;
//! target     = tconj { "|" tconj } ;
//! tconj      = tatom { "&" tatom } ;
//! tatom      = ":" name | "id" name | "key" name [ "=" value ] | "(" target ")" ;
//! constraint = conj { "|" conj } ;
//! conj       = unary { "&" unary } ;
//! unary      = "!" unary | quant qbody | "src" unary | "dst" unary | atom ;
//! quant      = (">=" | "<=" | "=") INT | "exists" | "forall" ;
//! qbody      = "<-" "[" constraint "]" | "->" "[" constraint "]"
//!            | "key" name "." pred | path "." unary ;
//! atom       = "true" | "false" | name | "id" name | ":" name | "(" constraint ")"
//!            | "cmp" "(" setop "," operand "," operand ")" ;
//! operand    = path [ "key" name ] | "key" name ;
//! path       = pseq { "||" pseq } ;
//! pseq       = pprefix { "/" pprefix } ;
//! pprefix    = "^" pprefix | "?" pprefix | ppost ;
//! ppost      = patom { "*" | "+" } ;
//! patom      = ":" name | "(" path ")" ;
//! pred       = "!" pred | "int" | "string" | "date" | "any"
//!            | cmpop value | "(" pred { "&" pred } ")" ;
//! cmpop      = "=" | "!=" | "<" | "<=" | ">" | ">=" ;
//! value      = STRING | INT | DATE ;
//! name       = WORD | INT | STRING ;
//! ```

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use thiserror::Error;

use crate::ast::{
    link_shapes, CmpOp, EdgeConstraint, EdgeTarget, LinkError, NodeConstraint, NodeTarget, PathExpr, SetComparator,
    Shape, ShapeSet, ValuePredicate,
};
use crate::graph::{Date, EdgeId, NodeId, Value, ValueType};
use crate::sugar::{desugar_shapes, DesugarError, Quantifier, SugaredEdge, SugaredNode, SugaredShape, TargetExpr};

/// A region of the input, as byte offsets plus the 1-based line and column
/// of its start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{span}: {message}")]
    Syntax { message: String, span: SourceSpan },
    #[error("{}{error}", span.map(|s| format!("{s}: ")).unwrap_or_default())]
    Link { error: LinkError, span: Option<SourceSpan> },
    #[error("{span}: {error}")]
    Desugar { error: DesugarError, span: SourceSpan },
}

impl ParseError {
    pub fn span(&self) -> Option<SourceSpan> {
        match self {
            ParseError::Syntax { span, .. } | ParseError::Desugar { span, .. } => Some(*span),
            ParseError::Link { span, .. } => *span,
        }
    }
}

/// Where each shape was declared and where each shape name was referenced.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpanTable {
    pub declarations: HashMap<String, SourceSpan>,
    /// `(referenced name, enclosing shape)` to the first occurrence.
    pub references: HashMap<(String, String), SourceSpan>,
}

#[derive(Debug, Clone)]
pub struct Document {
    pub shapes: ShapeSet,
    pub spans: SpanTable,
}

/// Parses, desugars and links a shape document.
pub fn parse_shapes(text: &str) -> Result<ShapeSet, ParseError> {
    parse_document(text).map(|d| d.shapes)
}

/// [`parse_shapes`], also returning source locations.
pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let (sugared, spans) = parse_sugared(text)?;
    let shapes = desugar_shapes(sugared.into_iter().map(|(s, _)| s).collect()).map_err(|error| {
        let DesugarError::UnsupportedTarget(name) = &error;
        ParseError::Desugar { span: spans.declarations[name], error }
    })?;
    let shapes = link_shapes(shapes).map_err(|error| {
        let span = match &error {
            LinkError::DuplicateShape(name) => spans.declarations.get(name).copied(),
            LinkError::UnknownShapeName { name, referenced_by }
            | LinkError::KindMismatch { name, referenced_by, .. } => spans
                .references
                .get(&(name.clone(), referenced_by.clone()))
                .or_else(|| spans.declarations.get(referenced_by))
                .copied(),
        };
        ParseError::Link { error, span }
    })?;
    Ok(Document { shapes, spans })
}

/// Parses without desugaring or linking.
pub fn parse_sugared(text: &str) -> Result<(Vec<(SugaredShape, SourceSpan)>, SpanTable), ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0, spans: SpanTable::default(), current: String::new() };
    let mut shapes = Vec::new();
    while !p.at_end() {
        let shape = p.shape()?;
        shapes.push(shape);
    }
    Ok((shapes, p.spans))
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Int(String),
    Date(String),
    Str(String),
    Sym(&'static str),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) | Tok::Int(w) | Tok::Date(w) => write!(f, "`{w}`"),
            Tok::Str(s) => write!(f, "string {}", quote(s)),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

const SYMBOLS: [&str; 24] = [
    "||", "<-", "->", ">=", "<=", "!=", "[", "]", "{", "}", "(", ")", ";", ",", ":", ".", "&", "|", "!", "^", "?", "*",
    "+", "/",
];
const SINGLE: [&str; 3] = ["=", "<", ">"];

const KEYWORDS: [&str; 15] = [
    "NODE", "EDGE", "true", "false", "id", "key", "src", "dst", "cmp", "exists", "forall", "int", "string", "date",
    "any",
];

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut line_start) = (0usize, 1usize, 0usize);
    let span = |start: usize, end: usize, line: usize, line_start: usize| SourceSpan {
        start,
        end,
        line,
        column: text[line_start..start].chars().count() + 1,
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if text[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        if c == b'"' {
            let (s, end) = lex_string(text, i).map_err(|(message, at)| ParseError::Syntax {
                message,
                span: span(at, (at + 1).min(text.len()), line, line_start),
            })?;
            i = end;
            out.push((Tok::Str(s), span(start, i, line, line_start)));
            for (k, b) in bytes[start..end].iter().enumerate() {
                if *b == b'\n' {
                    line += 1;
                    line_start = start + k + 1;
                }
            }
            continue;
        }
        let negative = c == b'-' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit);
        if c.is_ascii_alphanumeric() || c == b'_' || negative {
            i += 1;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &text[start..i];
            let digits = word.trim_start_matches('-');
            let tok = if digits.bytes().all(|b| b.is_ascii_digit()) {
                if !negative && digits.len() == 4 && is_date_tail(&bytes[i..]) {
                    i += 6;
                    Tok::Date(text[start..i].to_string())
                } else {
                    Tok::Int(word.to_string())
                }
            } else if negative {
                return Err(ParseError::Syntax {
                    message: format!("malformed number `{word}`"),
                    span: span(start, i, line, line_start),
                });
            } else {
                Tok::Word(word.to_string())
            };
            out.push((tok, span(start, i, line, line_start)));
            continue;
        }
        let sym = SYMBOLS.iter().chain(SINGLE.iter()).find(|s| text[i..].starts_with(**s)).copied();
        match sym {
            Some(s) => {
                i += s.len();
                out.push((Tok::Sym(s), span(start, i, line, line_start)));
            }
            None => {
                let ch = text[i..].chars().next().expect("in bounds");
                return Err(ParseError::Syntax {
                    message: format!("unexpected character `{ch}`"),
                    span: span(start, start + ch.len_utf8(), line, line_start),
                });
            }
        }
    }
    out.push((Tok::End, span(text.len(), text.len(), line, line_start)));
    Ok(out)
}

/// `-MM-DD` follows.
fn is_date_tail(rest: &[u8]) -> bool {
    rest.len() >= 6
        && rest[0] == b'-'
        && rest[1..3].iter().all(u8::is_ascii_digit)
        && rest[3] == b'-'
        && rest[4..6].iter().all(u8::is_ascii_digit)
        && !rest.get(6).is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
}

fn lex_string(text: &str, open: usize) -> Result<(String, usize), (String, usize)> {
    let mut out = String::new();
    let mut chars = text[open + 1..].char_indices().map(|(k, c)| (open + 1 + k, c));
    while let Some((at, c)) = chars.next() {
        match c {
            '"' => return Ok((out, at + 1)),
            '\\' => {
                let (_, e) = chars.next().ok_or(("unterminated string".to_string(), open))?;
                match e {
                    '"' => out.push('"'),
                    '\\' => out.push('\\'),
                    'n' => out.push('\n'),
                    't' => out.push('\t'),
                    'r' => out.push('\r'),
                    '0' => out.push('\0'),
                    'u' => {
                        let mut hex = String::new();
                        if chars.next().map(|x| x.1) != Some('{') {
                            return Err(("expected `{` after `\\u`".to_string(), at));
                        }
                        for (_, h) in chars.by_ref() {
                            if h == '}' {
                                break;
                            }
                            hex.push(h);
                        }
                        let ch = u32::from_str_radix(&hex, 16)
                            .ok()
                            .and_then(char::from_u32)
                            .ok_or((format!("invalid unicode escape `\\u{{{hex}}}`"), at))?;
                        out.push(ch);
                    }
                    other => return Err((format!("unknown escape `\\{other}`"), at)),
                }
            }
            c => out.push(c),
        }
    }
    Err(("unterminated string".to_string(), open))
}

struct Parser {
    tokens: Vec<(Tok, SourceSpan)>,
    pos: usize,
    spans: SpanTable,
    /// Name of the shape being parsed, for reference spans.
    current: String,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.tokens[(self.pos + k).min(self.tokens.len() - 1)].0
    }

    fn span(&self) -> SourceSpan {
        self.tokens[self.pos].1
    }

    fn at_end(&self) -> bool {
        *self.peek() == Tok::End
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.tokens[self.pos].clone();
        if t.0 != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        Err(ParseError::Syntax { message: format!("expected {expected}, found {}", self.peek()), span: self.span() })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Word(x) if x == w)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.is_sym(s);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn eat_word(&mut self, w: &str) -> bool {
        let hit = self.is_word(w);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(&format!("`{s}`"))
        }
    }

    /// A bare word, integer or quoted string.
    fn name(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Word(w) | Tok::Int(w) | Tok::Str(w) => {
                self.pos += 1;
                Ok(w)
            }
            _ => self.error(what),
        }
    }

    fn count(&mut self) -> PResult<usize> {
        match self.peek().clone() {
            Tok::Int(w) if !w.starts_with('-') => match w.parse() {
                Ok(i) => {
                    self.pos += 1;
                    Ok(i)
                }
                Err(_) => self.error("a count that fits in memory"),
            },
            _ => self.error("a non-negative count"),
        }
    }

    fn shape(&mut self) -> PResult<(SugaredShape, SourceSpan)> {
        let start = self.span();
        let is_node = if self.eat_word("NODE") {
            true
        } else if self.eat_word("EDGE") {
            false
        } else {
            return self.error("`NODE` or `EDGE`");
        };
        let name_span = self.span();
        let name = self.name("a shape name")?;
        self.current = name.clone();
        self.expect_sym("[")?;
        let shape = if is_node {
            let target = self.target_opt(Self::node_target)?;
            self.expect_sym("]")?;
            self.expect_sym("{")?;
            let constraint = self.node_or()?;
            SugaredShape::Node { name: name.clone(), constraint, target }
        } else {
            let target = self.target_opt(Self::edge_target)?;
            self.expect_sym("]")?;
            self.expect_sym("{")?;
            let constraint = self.edge_or()?;
            SugaredShape::Edge { name: name.clone(), constraint, target }
        };
        self.expect_sym("}")?;
        let end = self.span();
        self.expect_sym(";")?;
        let whole = SourceSpan { end: end.end, ..start };
        if self.spans.declarations.contains_key(&name) {
            return Err(ParseError::Link { error: LinkError::DuplicateShape(name), span: Some(name_span) });
        }
        self.spans.declarations.insert(name, whole);
        Ok((shape, whole))
    }

    fn target_opt<T>(&mut self, atom: fn(&mut Self) -> PResult<T>) -> PResult<TargetExpr<T>>
    where
        TargetExpr<T>: Nothing,
    {
        if self.is_sym("]") {
            return Ok(TargetExpr::nothing());
        }
        self.target_or(atom)
    }

    fn target_or<T>(&mut self, atom: fn(&mut Self) -> PResult<T>) -> PResult<TargetExpr<T>> {
        let mut t = self.target_and(atom)?;
        while self.eat_sym("|") {
            let r = self.target_and(atom)?;
            t = TargetExpr::Or(Box::new(t), Box::new(r));
        }
        Ok(t)
    }

    fn target_and<T>(&mut self, atom: fn(&mut Self) -> PResult<T>) -> PResult<TargetExpr<T>> {
        let mut t = self.target_atom(atom)?;
        while self.eat_sym("&") {
            let r = self.target_atom(atom)?;
            t = TargetExpr::And(Box::new(t), Box::new(r));
        }
        Ok(t)
    }

    fn target_atom<T>(&mut self, atom: fn(&mut Self) -> PResult<T>) -> PResult<TargetExpr<T>> {
        if self.eat_sym("(") {
            let t = self.target_or(atom)?;
            self.expect_sym(")")?;
            return Ok(t);
        }
        atom(self).map(TargetExpr::Query)
    }

    fn node_target(&mut self) -> PResult<NodeTarget> {
        if self.eat_sym(":") {
            return Ok(NodeTarget::HasLabel(self.name("a label")?));
        }
        if self.eat_word("id") {
            return Ok(NodeTarget::Exact(NodeId::new(self.name("a node identifier")?)));
        }
        if self.eat_word("key") {
            let k = self.name("a property key")?;
            if self.eat_sym("=") {
                return Ok(NodeTarget::HasKeyValue(k, self.value()?));
            }
            return Ok(NodeTarget::HasKey(k));
        }
        if self.eat_word("false") {
            return Ok(NodeTarget::Nothing);
        }
        self.error("a target query")
    }

    fn edge_target(&mut self) -> PResult<EdgeTarget> {
        if self.eat_sym(":") {
            return Ok(EdgeTarget::HasLabel(self.name("a label")?));
        }
        if self.eat_word("id") {
            return Ok(EdgeTarget::Exact(EdgeId::new(self.name("an edge identifier")?)));
        }
        if self.eat_word("key") {
            let k = self.name("a property key")?;
            if self.eat_sym("=") {
                return Ok(EdgeTarget::HasKeyValue(k, self.value()?));
            }
            return Ok(EdgeTarget::HasKey(k));
        }
        if self.eat_word("false") {
            return Ok(EdgeTarget::Nothing);
        }
        self.error("a target query")
    }

    fn value(&mut self) -> PResult<Value> {
        let span = self.span();
        match self.bump().0 {
            Tok::Str(s) => Ok(Value::Str(s)),
            Tok::Int(w) => Ok(Value::Int(w.parse::<BigInt>().expect("lexer yields digits"))),
            Tok::Date(d) => d
                .parse::<Date>()
                .map(Value::Date)
                .map_err(|_| ParseError::Syntax { message: format!("`{d}` is not a calendar date"), span }),
            _ => {
                self.pos -= 1;
                self.error("a value (string, integer or date)")
            }
        }
    }

    fn quantifier(&mut self) -> PResult<Option<Quantifier>> {
        Ok(Some(if self.eat_sym(">=") {
            Quantifier::AtLeast(self.count()?)
        } else if self.eat_sym("<=") {
            Quantifier::AtMost(self.count()?)
        } else if self.is_sym("=") {
            self.pos += 1;
            Quantifier::Exactly(self.count()?)
        } else if self.eat_word("exists") {
            Quantifier::Exists
        } else if self.eat_word("forall") {
            Quantifier::ForAll
        } else {
            return Ok(None);
        }))
    }

    fn node_or(&mut self) -> PResult<SugaredNode> {
        let mut c = self.node_and()?;
        while self.eat_sym("|") {
            let r = self.node_and()?;
            c = SugaredNode::Or(Box::new(c), Box::new(r));
        }
        Ok(c)
    }

    fn node_and(&mut self) -> PResult<SugaredNode> {
        let mut c = self.node_unary()?;
        while self.eat_sym("&") {
            let r = self.node_unary()?;
            c = SugaredNode::And(Box::new(c), Box::new(r));
        }
        Ok(c)
    }

    fn node_unary(&mut self) -> PResult<SugaredNode> {
        if self.eat_sym("!") {
            return Ok(SugaredNode::Not(Box::new(self.node_unary()?)));
        }
        if let Some(q) = self.quantifier()? {
            if self.eat_sym("<-") {
                self.expect_sym("[")?;
                let body = self.edge_or()?;
                self.expect_sym("]")?;
                return Ok(SugaredNode::Incoming(q, Box::new(body)));
            }
            if self.eat_sym("->") {
                self.expect_sym("[")?;
                let body = self.edge_or()?;
                self.expect_sym("]")?;
                return Ok(SugaredNode::Outgoing(q, Box::new(body)));
            }
            if self.eat_word("key") {
                let k = self.name("a property key")?;
                self.expect_sym(".")?;
                return Ok(SugaredNode::Key(q, k, self.predicate()?));
            }
            let path = self.path()?;
            self.expect_sym(".")?;
            return Ok(SugaredNode::Path(q, path, Box::new(self.node_unary()?)));
        }
        if self.is_word("src") || self.is_word("dst") {
            return self.error("a node constraint (`src`/`dst` apply to edges)");
        }
        self.node_atom()
    }

    fn node_atom(&mut self) -> PResult<SugaredNode> {
        if self.eat_word("true") {
            return Ok(SugaredNode::True);
        }
        if self.eat_word("false") {
            return Ok(SugaredNode::False);
        }
        if self.eat_word("id") {
            return Ok(SugaredNode::ExactNode(NodeId::new(self.name("a node identifier")?)));
        }
        if self.eat_sym(":") {
            return Ok(SugaredNode::HasLabel(self.name("a label")?));
        }
        if self.eat_sym("(") {
            let c = self.node_or()?;
            self.expect_sym(")")?;
            return Ok(c);
        }
        if self.is_word("cmp") && matches!(self.peek_at(1), Tok::Sym("(")) {
            return self.node_cmp();
        }
        self.shape_ref().map(SugaredNode::ShapeRef)
    }

    fn shape_ref(&mut self) -> PResult<String> {
        let span = self.span();
        let name = match self.peek() {
            Tok::Word(w) if KEYWORDS.contains(&w.as_str()) => return self.error("a constraint"),
            Tok::Word(_) | Tok::Int(_) | Tok::Str(_) => self.name("a constraint")?,
            _ => return self.error("a constraint"),
        };
        self.spans.references.entry((name.clone(), self.current.clone())).or_insert(span);
        Ok(name)
    }

    fn set_op(&mut self) -> PResult<SetComparator> {
        match self.peek() {
            Tok::Word(w) => match SetComparator::from_name(w) {
                Some(op) => {
                    self.pos += 1;
                    Ok(op)
                }
                None => self.error("a set comparator"),
            },
            _ => self.error("a set comparator"),
        }
    }

    fn node_cmp(&mut self) -> PResult<SugaredNode> {
        self.pos += 1;
        self.expect_sym("(")?;
        let op = self.set_op()?;
        self.expect_sym(",")?;
        let left = self.operand()?;
        self.expect_sym(",")?;
        let right = self.operand()?;
        self.expect_sym(")")?;
        match (left, right) {
            ((Some(left), None), (Some(right), None)) => Ok(SugaredNode::PathCmp { op, left, right }),
            ((Some(left_path), Some(left_key)), (Some(right_path), Some(right_key))) => {
                Ok(SugaredNode::PathKeyCmp { op, left_path, left_key, right_path, right_key })
            }
            ((None, Some(left)), (None, Some(right))) => Ok(SugaredNode::KeyCmp { op, left, right }),
            _ => Err(ParseError::Syntax {
                message: "both comparison operands must have the same form".to_string(),
                span: self.tokens[self.pos - 1].1,
            }),
        }
    }

    fn operand(&mut self) -> PResult<(Option<PathExpr>, Option<String>)> {
        if self.eat_word("key") {
            return Ok((None, Some(self.name("a property key")?)));
        }
        let p = self.path()?;
        if self.eat_word("key") {
            return Ok((Some(p), Some(self.name("a property key")?)));
        }
        Ok((Some(p), None))
    }

    fn edge_or(&mut self) -> PResult<SugaredEdge> {
        let mut c = self.edge_and()?;
        while self.eat_sym("|") {
            let r = self.edge_and()?;
            c = SugaredEdge::Or(Box::new(c), Box::new(r));
        }
        Ok(c)
    }

    fn edge_and(&mut self) -> PResult<SugaredEdge> {
        let mut c = self.edge_unary()?;
        while self.eat_sym("&") {
            let r = self.edge_unary()?;
            c = SugaredEdge::And(Box::new(c), Box::new(r));
        }
        Ok(c)
    }

    fn edge_unary(&mut self) -> PResult<SugaredEdge> {
        if self.eat_sym("!") {
            return Ok(SugaredEdge::Not(Box::new(self.edge_unary()?)));
        }
        if self.eat_word("src") {
            return Ok(SugaredEdge::Src(Box::new(self.node_unary()?)));
        }
        if self.eat_word("dst") {
            return Ok(SugaredEdge::Dst(Box::new(self.node_unary()?)));
        }
        if let Some(q) = self.quantifier()? {
            if !self.eat_word("key") {
                return self.error("`key` (edges only count property values)");
            }
            let k = self.name("a property key")?;
            self.expect_sym(".")?;
            return Ok(SugaredEdge::Key(q, k, self.predicate()?));
        }
        self.edge_atom()
    }

    fn edge_atom(&mut self) -> PResult<SugaredEdge> {
        if self.eat_word("true") {
            return Ok(SugaredEdge::True);
        }
        if self.eat_word("false") {
            return Ok(SugaredEdge::False);
        }
        if self.eat_word("id") {
            return Ok(SugaredEdge::ExactEdge(EdgeId::new(self.name("an edge identifier")?)));
        }
        if self.eat_sym(":") {
            return Ok(SugaredEdge::HasLabel(self.name("a label")?));
        }
        if self.eat_sym("(") {
            let c = self.edge_or()?;
            self.expect_sym(")")?;
            return Ok(c);
        }
        if self.is_word("cmp") && matches!(self.peek_at(1), Tok::Sym("(")) {
            self.pos += 1;
            self.expect_sym("(")?;
            let op = self.set_op()?;
            self.expect_sym(",")?;
            if !self.eat_word("key") {
                return self.error("`key` (edges compare property values only)");
            }
            let left = self.name("a property key")?;
            self.expect_sym(",")?;
            if !self.eat_word("key") {
                return self.error("`key`");
            }
            let right = self.name("a property key")?;
            self.expect_sym(")")?;
            return Ok(SugaredEdge::KeyCmp { op, left, right });
        }
        self.shape_ref().map(SugaredEdge::ShapeRef)
    }

    fn predicate(&mut self) -> PResult<ValuePredicate> {
        if self.eat_sym("!") {
            return Ok(self.predicate()?.negate());
        }
        for t in [ValueType::Int, ValueType::Str, ValueType::Date] {
            if self.eat_word(t.name()) {
                return Ok(ValuePredicate::TypeIs(t));
            }
        }
        if self.eat_word("any") {
            return Ok(ValuePredicate::Any);
        }
        if self.eat_sym("(") {
            let mut f = self.predicate()?;
            while self.eat_sym("&") {
                f = f.and(self.predicate()?);
            }
            self.expect_sym(")")?;
            return Ok(f);
        }
        let op = match self.peek() {
            Tok::Sym(s) => CmpOp::ALL.into_iter().find(|op| op.symbol() == *s),
            _ => None,
        };
        match op {
            Some(op) => {
                self.pos += 1;
                Ok(ValuePredicate::Cmp(op, self.value()?))
            }
            None => self.error("a value predicate"),
        }
    }

    fn path(&mut self) -> PResult<PathExpr> {
        let mut p = self.path_seq()?;
        while self.eat_sym("||") {
            p = p.or(self.path_seq()?);
        }
        Ok(p)
    }

    fn path_seq(&mut self) -> PResult<PathExpr> {
        let mut p = self.path_prefix()?;
        while self.eat_sym("/") {
            p = p.then(self.path_prefix()?);
        }
        Ok(p)
    }

    fn path_prefix(&mut self) -> PResult<PathExpr> {
        if self.eat_sym("^") {
            return Ok(self.path_prefix()?.inverse());
        }
        if self.eat_sym("?") {
            return Ok(self.path_prefix()?.opt());
        }
        let mut p = self.path_atom()?;
        loop {
            if self.eat_sym("*") {
                p = p.star();
            } else if self.eat_sym("+") {
                p = p.plus();
            } else {
                return Ok(p);
            }
        }
    }

    fn path_atom(&mut self) -> PResult<PathExpr> {
        if self.eat_sym(":") {
            return Ok(PathExpr::Label(self.name("an edge label")?));
        }
        if self.eat_sym("(") {
            let p = self.path()?;
            self.expect_sym(")")?;
            return Ok(p);
        }
        self.error("a path")
    }
}

trait Nothing {
    fn nothing() -> Self;
}

impl Nothing for TargetExpr<NodeTarget> {
    fn nothing() -> Self {
        TargetExpr::Query(NodeTarget::Nothing)
    }
}

impl Nothing for TargetExpr<EdgeTarget> {
    fn nothing() -> Self {
        TargetExpr::Query(EdgeTarget::Nothing)
    }
}

/// Renders a linked shape set in the canonical text form, one shape per
/// line. Parsing the result yields an equal shape set.
pub fn render_shapes(s: &ShapeSet) -> String {
    let mut out = String::new();
    for shape in s.shapes() {
        out.push_str(&render_shape(shape));
        out.push('\n');
    }
    out
}

pub fn render_shape(shape: &Shape) -> String {
    match shape {
        Shape::Node(s) => {
            format!("NODE {} [{}] {{ {} }};", name(&s.name), node_target(&s.target), NodeText(&s.constraint, Prec::Or))
        }
        Shape::Edge(s) => {
            format!("EDGE {} [{}] {{ {} }};", name(&s.name), edge_target(&s.target), EdgeText(&s.constraint, Prec::Or))
        }
    }
}

fn node_target(q: &NodeTarget) -> String {
    match q {
        NodeTarget::Nothing => String::new(),
        NodeTarget::Exact(n) => format!("id {}", name(n.as_str())),
        NodeTarget::HasLabel(l) => format!(":{}", name(l)),
        NodeTarget::HasKey(k) => format!("key {}", name(k)),
        NodeTarget::HasKeyValue(k, v) => format!("key {} = {}", name(k), value(v)),
    }
}

fn edge_target(q: &EdgeTarget) -> String {
    match q {
        EdgeTarget::Nothing => String::new(),
        EdgeTarget::Exact(e) => format!("id {}", name(e.as_str())),
        EdgeTarget::HasLabel(l) => format!(":{}", name(l)),
        EdgeTarget::HasKey(k) => format!("key {}", name(k)),
        EdgeTarget::HasKeyValue(k, v) => format!("key {} = {}", name(k), value(v)),
    }
}

/// Bare when it lexes back as a single non-keyword word or integer.
fn name(s: &str) -> String {
    let bare = !s.is_empty()
        && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
        && !KEYWORDS.contains(&s)
        && !(s.len() == 4 && s.bytes().all(|b| b.is_ascii_digit()));
    if bare {
        s.to_string()
    } else {
        quote(s)
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{{{:x}}}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn value(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Str(s) => quote(s),
        Value::Date(d) => d.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Or,
    And,
    Unary,
}

struct NodeText<'a>(&'a NodeConstraint, Prec);
struct EdgeText<'a>(&'a EdgeConstraint, Prec);
struct PathText<'a>(&'a PathExpr, u8);
struct PredText<'a>(&'a ValuePredicate);

fn paren(f: &mut fmt::Formatter<'_>, wrap: bool, body: impl fmt::Display) -> fmt::Result {
    if wrap {
        write!(f, "({body})")
    } else {
        write!(f, "{body}")
    }
}

impl fmt::Display for NodeText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use NodeConstraint as C;
        let NodeText(c, prec) = *self;
        match c {
            C::True => f.write_str("true"),
            C::ShapeRef(s) => f.write_str(&name(s)),
            C::ExactNode(n) => write!(f, "id {}", name(n.as_str())),
            C::HasLabel(l) => write!(f, ":{}", name(l)),
            C::Not(inner) if **inner == C::True => f.write_str("false"),
            C::Not(inner) => write!(f, "!{}", NodeText(inner, Prec::Unary)),
            C::And(a, b) => {
                paren(f, prec > Prec::And, format_args!("{} & {}", NodeText(a, Prec::And), NodeText(b, Prec::Unary)))
            }
            C::QualPath { min, path, body } => {
                write!(f, ">= {min} {} . {}", PathText(path, 0), NodeText(body, Prec::Unary))
            }
            C::QualKey { min, key, pred } => write!(f, ">= {min} key {} . {}", name(key), PredText(pred)),
            C::QualIncoming { min, body } => write!(f, ">= {min} <-[ {} ]", EdgeText(body, Prec::Or)),
            C::QualOutgoing { min, body } => write!(f, ">= {min} ->[ {} ]", EdgeText(body, Prec::Or)),
            C::PathCmp { op, left, right } => {
                write!(f, "cmp({}, {}, {})", op.name(), PathText(left, 0), PathText(right, 0))
            }
            C::PathKeyCmp { op, left_path, left_key, right_path, right_key } => write!(
                f,
                "cmp({}, {} key {}, {} key {})",
                op.name(),
                PathText(left_path, 0),
                name(left_key),
                PathText(right_path, 0),
                name(right_key)
            ),
            C::KeyCmp { op, left, right } => {
                write!(f, "cmp({}, key {}, key {})", op.name(), name(left), name(right))
            }
        }
    }
}

impl fmt::Display for EdgeText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use EdgeConstraint as C;
        let EdgeText(c, prec) = *self;
        match c {
            C::True => f.write_str("true"),
            C::ShapeRef(s) => f.write_str(&name(s)),
            C::ExactEdge(e) => write!(f, "id {}", name(e.as_str())),
            C::HasLabel(l) => write!(f, ":{}", name(l)),
            C::Not(inner) if **inner == C::True => f.write_str("false"),
            C::Not(inner) => write!(f, "!{}", EdgeText(inner, Prec::Unary)),
            C::And(a, b) => {
                paren(f, prec > Prec::And, format_args!("{} & {}", EdgeText(a, Prec::And), EdgeText(b, Prec::Unary)))
            }
            C::QualKey { min, key, pred } => write!(f, ">= {min} key {} . {}", name(key), PredText(pred)),
            C::Src(n) => write!(f, "src {}", NodeText(n, Prec::Unary)),
            C::Dst(n) => write!(f, "dst {}", NodeText(n, Prec::Unary)),
            C::KeyCmp { op, left, right } => {
                write!(f, "cmp({}, key {}, key {})", op.name(), name(left), name(right))
            }
        }
    }
}

impl fmt::Display for PathText<'_> {
    /// Levels: 0 alternation, 1 sequence, 2 prefix, 3 postfix operand.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let PathText(p, level) = *self;
        match p {
            PathExpr::Label(l) => write!(f, ":{}", name(l)),
            PathExpr::Alt(a, b) => paren(f, level > 0, format_args!("{} || {}", PathText(a, 0), PathText(b, 1))),
            PathExpr::Seq(a, b) => paren(f, level > 1, format_args!("{} / {}", PathText(a, 1), PathText(b, 2))),
            PathExpr::Inverse(q) => paren(f, level > 2, format_args!("^{}", PathText(q, 2))),
            PathExpr::Opt(q) => paren(f, level > 2, format_args!("?{}", PathText(q, 2))),
            PathExpr::Star(q) => write!(f, "{}*", PathText(q, 3)),
            PathExpr::Plus(q) => write!(f, "{}+", PathText(q, 3)),
        }
    }
}

impl fmt::Display for PredText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            ValuePredicate::Any => f.write_str("any"),
            ValuePredicate::TypeIs(t) => f.write_str(t.name()),
            ValuePredicate::Cmp(op, v) => write!(f, "({} {})", op.symbol(), value(v)),
            ValuePredicate::Not(p) => write!(f, "!{}", PredText(p)),
            ValuePredicate::And(a, b) => write!(f, "({} & {})", PredInner(a), PredInner(b)),
        }
    }
}

/// A conjunct inside `( … & … )`, where a comparison needs no parentheses.
struct PredInner<'a>(&'a ValuePredicate);

impl fmt::Display for PredInner<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            ValuePredicate::Cmp(op, v) => write!(f, "{} {}", op.symbol(), value(v)),
            other => PredText(other).fmt(f),
        }
    }
}
