use proptest::prelude::*;
use resproof::formats::*;
use resproof::graphs::MultipartiteGraph;
use resproof::proofs::{BpNode, BranchingProgram, NodeKind, Rule, RuleProof, SinkLabel, Step};
use resproof::restriction::Structure;
use resproof::{Clause, CnfFormula, Literal, Record, Restriction, SClause, Term, VarDescriptor};

fn literal(vars: u32) -> impl Strategy<Value = Literal> {
    (1..=vars, any::<bool>()).prop_map(|(v, b)| Literal::new(v, b))
}

fn clause(vars: u32) -> impl Strategy<Value = Clause> {
    prop::collection::vec(literal(vars), 0..4).prop_map(Clause::new)
}

fn record(vars: u32) -> impl Strategy<Value = Record> {
    prop::collection::btree_set(clause(vars), 0..4)
}

fn formula() -> impl Strategy<Value = CnfFormula> {
    (1u32..8, prop::collection::vec(clause(7), 0..10), "[a-z0-9=-]{0,8}").prop_map(|(n, cs, tag)| {
        let mut f = CnfFormula::new(tag);
        for i in 0..n {
            f.var(VarDescriptor::unary(&[i / 3, i % 3]));
        }
        for c in cs {
            let c = Clause::new(c.lits().iter().filter(|l| l.var <= n).copied());
            f.push_raw(c).unwrap();
        }
        f
    })
}

fn node_kind(nodes: usize) -> impl Strategy<Value = NodeKind> {
    prop_oneof![
        (clause(6), 0..nodes, 0..nodes).prop_map(|(disj, t, f)| NodeKind::Query { disj, t, f }),
        (clause(6), 0..nodes, 0..nodes).prop_map(|(sub, t, f)| NodeKind::Split { sub, t, f }),
        (0..nodes).prop_map(|child| NodeKind::Forget { child }),
        (0usize..20).prop_map(|a| NodeKind::Sink(SinkLabel::Axiom(a))),
        Just(NodeKind::Sink(SinkLabel::ExcludedMiddle)),
    ]
}

fn program() -> impl Strategy<Value = BranchingProgram> {
    (1usize..6).prop_flat_map(|len| {
        (1usize..4, 0..len, prop::collection::vec((record(6), node_kind(len)), len)).prop_map(|(s, source, nodes)| {
            let nodes = nodes.into_iter().map(|(record, kind)| BpNode { record, kind }).collect();
            BranchingProgram { s, num_vars: 6, source, nodes }
        })
    })
}

fn term() -> impl Strategy<Value = Term> {
    prop::collection::btree_map(1u32..7, any::<bool>(), 0..3)
        .prop_map(|m| Term::new(m.into_iter().map(|(v, b)| Literal::new(v, b))).unwrap())
}

fn rule() -> impl Strategy<Value = Rule> {
    prop_oneof![
        (0usize..9).prop_map(Rule::Axiom),
        (0usize..9, 0usize..9).prop_map(|(a, b)| Rule::AndIntro(a, b)),
        (0usize..9, 0usize..9).prop_map(|(a, b)| Rule::Cut(a, b)),
        (0usize..9).prop_map(Rule::Weak1),
        (0usize..9).prop_map(Rule::Weak2),
        Just(Rule::ExcludedMiddle),
    ]
}

fn rule_proof() -> impl Strategy<Value = RuleProof> {
    (1usize..4, prop::collection::vec((prop::collection::vec(term(), 0..4), rule()), 0..8)).prop_map(|(s, steps)| {
        let steps = steps.into_iter().map(|(ts, rule)| Step { clause: SClause::new(ts), rule }).collect();
        RuleProof { s, num_vars: 6, steps }
    })
}

fn restriction() -> impl Strategy<Value = Restriction> {
    (prop::collection::btree_map(1u32..40, any::<bool>(), 0..8), any::<bool>(), 0usize..3).prop_map(
        |(assignments, structured, budget)| {
            let structure = structured.then(|| Structure {
                budget,
                groups: vec![("g0".to_string(), assignments.keys().take(budget).copied().collect())],
            });
            Restriction { assignments, structure }
        },
    )
}

fn graph() -> impl Strategy<Value = MultipartiteGraph> {
    (2u32..4, 1u32..4).prop_flat_map(|(k, n)| {
        prop::collection::vec((0..k, 0..n, 0..k, 0..n), 0..10).prop_map(move |es| {
            let mut g = MultipartiteGraph::empty(k, n);
            for (a, i, b, j) in es {
                if a != b {
                    g.add_edge((a, i), (b, j)).unwrap();
                }
            }
            g
        })
    })
}

proptest! {
    #[test]
    fn dimacs_roundtrip(f in formula()) {
        prop_assert_eq!(parse_dimacs(&print_dimacs(&f)).unwrap(), f);
    }

    #[test]
    fn bp_roundtrip(bp in program()) {
        prop_assert_eq!(parse_bp(&print_bp(&bp)).unwrap(), bp);
    }

    #[test]
    fn resp_roundtrip(p in rule_proof()) {
        prop_assert_eq!(parse_rule_proof(&print_rule_proof(&p)).unwrap(), p);
    }

    #[test]
    fn restriction_roundtrip(r in restriction()) {
        prop_assert_eq!(parse_restriction(&print_restriction(&r)).unwrap(), r);
    }

    #[test]
    fn graph_roundtrip(g in graph()) {
        prop_assert_eq!(parse_graph(&print_graph(&g)).unwrap(), g);
    }
}

#[test]
fn pi2_spec_roundtrip() {
    use resproof::encoders::{Pi2Spec, LOP_SPEC, OP_SPEC, PHP_SPEC};
    for text in [OP_SPEC, LOP_SPEC, PHP_SPEC] {
        let spec: Pi2Spec = text.parse().unwrap();
        let again: Pi2Spec = spec.to_string().parse().unwrap();
        assert_eq!(again, spec);
    }
}

#[test]
fn malformed_inputs_name_the_line() {
    let err = parse_dimacs("p cnf 2 1\n1 x 0\n").unwrap_err();
    assert!(err.to_string().starts_with("line 2"), "{err}");
    assert!(parse_dimacs("p cnf 2 2\n1 0\n").is_err());
    assert!(parse_bp("b res 1 2\n0 WAT | \n").is_err());
    assert!(parse_rule_proof("r res 1 2\n1 AX 0 : ( 1 ) 0\n").is_err());
    assert!(parse_restriction("3 2\n").is_err());
    assert!(parse_graph("g 2 2\ne 0 0 0 1\n").is_err());
}
