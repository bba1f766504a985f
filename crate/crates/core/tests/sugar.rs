mod common;

use common::*;
use progs::sugar::{desugar_shapes, Quantifier, SugaredEdge, SugaredNode, SugaredShape, TargetExpr};
use progs::{
    link_shapes, solve, Atom, EdgeId, EdgeTarget, Element, NodeId, NodeTarget, PropertyGraph, Shape, ShapeSet,
    SolverConfig, Value,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn quantifier(r: &mut ChaCha8Rng) -> Quantifier {
    match r.gen_range(0..5) {
        0 => Quantifier::AtLeast(r.gen_range(0..=2)),
        1 => Quantifier::AtMost(r.gen_range(0..=2)),
        2 => Quantifier::Exactly(r.gen_range(0..=2)),
        3 => Quantifier::Exists,
        _ => Quantifier::ForAll,
    }
}

fn sugared_node(r: &mut ChaCha8Rng, g: &PropertyGraph, names: &Names, depth: usize) -> SugaredNode {
    if depth == 0 || r.gen_bool(0.3) {
        return match r.gen_range(0..4) {
            0 => SugaredNode::False,
            1 => SugaredNode::Key(quantifier(r), "k".into(), random_pred(r, 1)),
            _ => SugaredNode::from(random_node_constraint(r, g, names, 0)),
        };
    }
    let d = depth - 1;
    match r.gen_range(0..6) {
        0 => SugaredNode::Not(Box::new(sugared_node(r, g, names, d))),
        1 => SugaredNode::Or(Box::new(sugared_node(r, g, names, d)), Box::new(sugared_node(r, g, names, d))),
        2 => SugaredNode::And(Box::new(sugared_node(r, g, names, d)), Box::new(sugared_node(r, g, names, d))),
        3 => SugaredNode::Path(quantifier(r), random_path(r, 2), Box::new(sugared_node(r, g, names, d))),
        4 => SugaredNode::Outgoing(quantifier(r), Box::new(sugared_edge(r, g, names, d))),
        _ => SugaredNode::Incoming(quantifier(r), Box::new(sugared_edge(r, g, names, d))),
    }
}

fn sugared_edge(r: &mut ChaCha8Rng, g: &PropertyGraph, names: &Names, depth: usize) -> SugaredEdge {
    if depth == 0 || r.gen_bool(0.3) {
        return match r.gen_range(0..4) {
            0 => SugaredEdge::False,
            1 => SugaredEdge::Key(quantifier(r), "k".into(), random_pred(r, 1)),
            _ => SugaredEdge::from(random_edge_constraint(r, g, names, 0)),
        };
    }
    let d = depth - 1;
    match r.gen_range(0..4) {
        0 => SugaredEdge::Not(Box::new(sugared_edge(r, g, names, d))),
        1 => SugaredEdge::Or(Box::new(sugared_edge(r, g, names, d)), Box::new(sugared_edge(r, g, names, d))),
        2 => SugaredEdge::Src(Box::new(sugared_node(r, g, names, d))),
        _ => SugaredEdge::Dst(Box::new(sugared_node(r, g, names, d))),
    }
}

/// Three-valued meaning of a quantifier over body values, stated directly
/// rather than through `≥`.
fn quantify(q: Quantifier, vs: &[u8]) -> u8 {
    let ones = vs.iter().filter(|&&v| v == 2).count();
    let possible = vs.iter().filter(|&&v| v != 0).count();
    let at_least = |i: usize| {
        if ones >= i {
            2
        } else if possible < i {
            0
        } else {
            1
        }
    };
    let at_most = |i: usize| {
        if possible <= i {
            2
        } else if ones > i {
            0
        } else {
            1
        }
    };
    match q {
        Quantifier::AtLeast(i) => at_least(i),
        Quantifier::AtMost(i) => at_most(i),
        Quantifier::Exactly(i) => at_least(i).min(at_most(i)),
        Quantifier::Exists => vs.iter().copied().max().unwrap_or(0),
        Quantifier::ForAll => vs.iter().copied().min().unwrap_or(2),
    }
}

fn key_count(q: Quantifier, g: &PropertyGraph, el: &Element, f: &progs::ValuePredicate) -> u8 {
    let vs: Vec<u8> = g.property_values(el, "k").unwrap().iter().map(|v| 2 * u8::from(reference_pred(f, v))).collect();
    quantify(q, &vs)
}

fn direct_node(g: &PropertyGraph, sigma: &RefSigma, n: &NodeId, c: &SugaredNode) -> u8 {
    match c {
        SugaredNode::False => 0,
        SugaredNode::Not(c) => 2 - direct_node(g, sigma, n, c),
        SugaredNode::And(a, b) => direct_node(g, sigma, n, a).min(direct_node(g, sigma, n, b)),
        SugaredNode::Or(a, b) => direct_node(g, sigma, n, a).max(direct_node(g, sigma, n, b)),
        SugaredNode::Path(q, p, body) => {
            let vs: Vec<u8> = reference_path(g, n, p).iter().map(|m| direct_node(g, sigma, m, body)).collect();
            quantify(*q, &vs)
        }
        SugaredNode::Key(q, k, f) if k == "k" => key_count(*q, g, &Element::Node(n.clone()), f),
        SugaredNode::Incoming(q, body) | SugaredNode::Outgoing(q, body) => {
            let out = matches!(c, SugaredNode::Outgoing(..));
            let vs: Vec<u8> = g
                .edges()
                .iter()
                .filter(|e| {
                    let (s, d) = g.endpoints(e).unwrap();
                    if out {
                        s == n
                    } else {
                        d == n
                    }
                })
                .map(|e| direct_edge(g, sigma, e, body))
                .collect();
            quantify(*q, &vs)
        }
        // The remaining forms have no sugar of their own.
        other => reference_node(g, sigma, n, &other.clone().desugar()),
    }
}

fn direct_edge(g: &PropertyGraph, sigma: &RefSigma, e: &EdgeId, c: &SugaredEdge) -> u8 {
    match c {
        SugaredEdge::False => 0,
        SugaredEdge::Not(c) => 2 - direct_edge(g, sigma, e, c),
        SugaredEdge::And(a, b) => direct_edge(g, sigma, e, a).min(direct_edge(g, sigma, e, b)),
        SugaredEdge::Or(a, b) => direct_edge(g, sigma, e, a).max(direct_edge(g, sigma, e, b)),
        SugaredEdge::Key(q, k, f) if k == "k" => key_count(*q, g, &Element::Edge(e.clone()), f),
        SugaredEdge::Src(c) => direct_node(g, sigma, g.endpoints(e).unwrap().0, c),
        SugaredEdge::Dst(c) => direct_node(g, sigma, g.endpoints(e).unwrap().1, c),
        other => reference_edge(g, sigma, e, &other.clone().desugar()),
    }
}

#[test]
fn desugaring_preserves_meaning_under_every_assignment() {
    let mut checked = 0;
    for seed in 0..120 {
        let mut r = rng(4_000 + seed);
        let inst = random_instance_with(&mut r, 4, 4, 2, 1);
        if inst.atom_count() > 6 {
            continue;
        }
        let (g, s) = (&inst.g, &inst.s);
        let names = Names {
            node: s.node_shapes().map(|x| x.name.clone()).collect(),
            edge: s.edge_shapes().map(|x| x.name.clone()).collect(),
        };
        let node_c = sugared_node(&mut r, g, &names, 3);
        let edge_c = sugared_edge(&mut r, g, &names, 3);
        let (node_core, edge_core) = (node_c.clone().desugar(), edge_c.clone().desugar());
        for_each_assignment(g, s, |sigma| {
            for n in g.nodes() {
                assert_eq!(direct_node(g, sigma, n, &node_c), reference_node(g, sigma, n, &node_core), "{node_c:?}");
            }
            for e in g.edges() {
                assert_eq!(direct_edge(g, sigma, e, &edge_c), reference_edge(g, sigma, e, &edge_core), "{edge_c:?}");
            }
            false
        });
        checked += 1;
    }
    assert!(checked >= 50, "{checked}");
}

#[test]
fn desugaring_is_idempotent() {
    for seed in 0..500 {
        let mut r = rng(5_000 + seed);
        let g = random_graph(&mut r, 4, 6);
        let names = Names { node: vec!["s".into()], edge: vec!["t".into()] };
        let c = sugared_node(&mut r, &g, &names, 3).desugar();
        assert_eq!(SugaredNode::from(c.clone()).desugar(), c);
        let c = sugared_edge(&mut r, &g, &names, 3).desugar();
        assert_eq!(SugaredEdge::from(c.clone()).desugar(), c);
    }
}

fn node_target(r: &mut ChaCha8Rng, g: &PropertyGraph) -> NodeTarget {
    match r.gen_range(0..5) {
        0 => NodeTarget::Nothing,
        1 => NodeTarget::Exact(g.nodes().choose(r).unwrap().clone()),
        2 => NodeTarget::HasLabel(["A", "B"][r.gen_range(0..2)].into()),
        3 => NodeTarget::HasKey("k".into()),
        _ => NodeTarget::HasKeyValue("k".into(), Value::int(r.gen_range(0..3))),
    }
}

fn edge_target(r: &mut ChaCha8Rng, g: &PropertyGraph) -> EdgeTarget {
    match r.gen_range(0..4) {
        0 => EdgeTarget::Nothing,
        1 => EdgeTarget::Exact(g.edges().choose(r).unwrap().clone()),
        2 => EdgeTarget::HasLabel(["p", "q"][r.gen_range(0..2)].into()),
        _ => EdgeTarget::HasKey("k".into()),
    }
}

#[test]
fn compound_targets_select_intersections_and_unions() {
    let mut compared = 0;
    for seed in 0..400 {
        let mut r = rng(6_000 + seed);
        let inst = random_instance_with(&mut r, 3, 3, 2, 2);
        if inst.atom_count() > 6 {
            continue;
        }
        let (g, s) = (&inst.g, &inst.s);
        // Strip the targets; the compound ones are checked through `extra`.
        let bare: Vec<Shape> = s
            .shapes()
            .iter()
            .map(|shape| match shape {
                Shape::Node(ns) => Shape::node(ns.name.clone(), ns.constraint.clone(), NodeTarget::Nothing),
                Shape::Edge(es) => Shape::edge(es.name.clone(), es.constraint.clone(), EdgeTarget::Nothing),
            })
            .collect();
        let bare = link_shapes(bare).unwrap();
        let mut extra = Vec::new();
        let mut sugared = Vec::new();
        for shape in s.shapes() {
            let both = r.gen_bool(0.5);
            match shape {
                Shape::Node(ns) => {
                    let (q1, q2) = (node_target(&mut r, g), node_target(&mut r, g));
                    let (a, b) = (reference_node_targets(g, &q1), reference_node_targets(g, &q2));
                    let chosen: Vec<&NodeId> = if both { a.intersection(&b).collect() } else { a.union(&b).collect() };
                    extra.extend(chosen.into_iter().map(|n| Atom::node(ns.name.as_str(), n.as_str())));
                    let (x, y) = (Box::new(TargetExpr::Query(q1)), Box::new(TargetExpr::Query(q2)));
                    sugared.push(SugaredShape::Node {
                        name: ns.name.clone(),
                        constraint: SugaredNode::from(ns.constraint.clone()),
                        target: if both { TargetExpr::And(x, y) } else { TargetExpr::Or(x, y) },
                    });
                }
                Shape::Edge(es) => {
                    let (q1, q2) = (edge_target(&mut r, g), edge_target(&mut r, g));
                    let (a, b) = (reference_edge_targets(g, &q1), reference_edge_targets(g, &q2));
                    let chosen: Vec<&EdgeId> = if both { a.intersection(&b).collect() } else { a.union(&b).collect() };
                    extra.extend(chosen.into_iter().map(|e| Atom::edge(es.name.as_str(), e.as_str())));
                    let (x, y) = (Box::new(TargetExpr::Query(q1)), Box::new(TargetExpr::Query(q2)));
                    sugared.push(SugaredShape::Edge {
                        name: es.name.clone(),
                        constraint: SugaredEdge::from(es.constraint.clone()),
                        target: if both { TargetExpr::And(x, y) } else { TargetExpr::Or(x, y) },
                    });
                }
            }
        }
        let expected = reference_conforms_with(g, &bare, &extra);
        let desugared: ShapeSet = link_shapes(desugar_shapes(sugared).unwrap()).unwrap();
        let got = solve(g, &desugared, &SolverConfig::default()).unwrap().conforms;
        assert_eq!(got, expected, "seed {seed}");
        compared += 1;
    }
    assert!(compared >= 100, "{compared}");
}

#[test]
fn nested_target_combinations_are_rejected() {
    let q = |l: &str| Box::new(TargetExpr::Query(NodeTarget::HasLabel(l.into())));
    let shape = SugaredShape::Node {
        name: "s".into(),
        constraint: SugaredNode::True,
        target: TargetExpr::And(Box::new(TargetExpr::Or(q("A"), q("B"))), q("C")),
    };
    assert!(desugar_shapes(vec![shape]).is_err());
}
