//! Validation of property graphs against recursive shapes.
//!
//! A [`ShapeSet`] is evaluated over a [`PropertyGraph`] under three-valued
//! assignments of shapes to elements. The graph conforms when some
//! strictly faithful assignment gives every target atom the value `1`.
//!
//! ```
//! use progs::{office_graph, parse_shapes, solve, Atom, SolverConfig, TruthValue};
//!
//! let g = office_graph();
//! let s = parse_shapes(
//!     r#"NODE s1 [] { >= 1 :colleagueOf . :Person };
//!        NODE s2 [key name = "Gareth Keenan"] { >= 2 key role . string & s1 };"#,
//! )
//! .unwrap();
//! let report = solve(&g, &s, &SolverConfig::default()).unwrap();
//! assert!(report.conforms);
//! let witness = report.witness.unwrap();
//! assert_eq!(witness.get(&Atom::node("s2", "102")), Some(TruthValue::True));
//! ```

pub mod ast;
pub mod eval;
mod fresh;
pub mod graph;
pub mod io;
pub mod parser;
pub mod solver;
pub mod sugar;
pub mod transforms;

pub use ast::{
    link_shapes, CmpOp, EdgeConstraint, EdgeShape, EdgeTarget, LinkError, NodeConstraint, NodeShape, NodeTarget,
    PathExpr, SetComparator, Shape, ShapeKind, ShapeSet, ValuePredicate,
};
pub use eval::{
    atoms, eval_edge_constraint, eval_node_constraint, eval_path, eval_target_edges, eval_target_nodes,
    is_strictly_faithful, Assignment, Atom, EvalError, Faithfulness, TruthValue, Violation,
};
pub use graph::{
    office_graph, Date, EdgeId, Element, GraphBuilder, GraphError, NodeId, PropertyGraph, Value, ValueType,
};
pub use io::{export_asp, export_graph_json, import_graph_json, AspError, ImportError};
pub use parser::{parse_document, parse_shapes, render_shapes, ParseError};
pub use solver::{
    brute_force_conformance, enumerate_faithful_assignments, find_faithful_assignment, solve, SolverConfig,
    SolverError, Strategy, ValidationReport,
};
pub use transforms::{
    eliminate_paths, fold_operators, reduce_to_single_target, verify_normalized, TransformError, TransformTrace,
};

// The guide's snippets run as doctests so they cannot drift from the code.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/shapes.md")]
    mod shapes {}
    #[doc = include_str!("../../../book/src/semantics.md")]
    mod semantics {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/normal-form.md")]
    mod normal_form {}
    #[doc = include_str!("../../../book/src/asp.md")]
    mod asp {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
