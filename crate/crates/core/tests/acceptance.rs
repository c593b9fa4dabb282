//! Exit gate: one test per acceptance criterion, each printing a single
//! PASS/FAIL line.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use resproof::constructors::*;
use resproof::encoders::*;
use resproof::experiments::*;
use resproof::graphs::{for_each_transversal, has_k_clique, sample_graph_with_p, MultipartiteGraph};
use resproof::proofs::*;
use resproof::translators::*;
use resproof::{covering_number, Clause, CnfFormula, Literal, Record, SClause, Term, VarDescriptor};

/// Tolerance for pinned floating point values.
const PIN_TOL: f64 = 1e-12;
/// Monte Carlo agreement, in standard errors.
const MC_SIGMAS: f64 = 3.0;
const MC_TRIALS: u64 = 100_000;

fn report(n: u32, what: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("PASS criterion {n}: {what}");
    } else {
        println!("FAIL criterion {n}: {what}: {}", failures.join("; "));
        panic!("criterion {n} failed: {}", failures.join("; "));
    }
}

fn checks(f: &CnfFormula, bp: &BranchingProgram) -> Result<(), String> {
    check_branching_program(f, bp).map_err(|e| e.to_string())
}

#[test]
fn criterion_1_bin_op_sizes() {
    let mut bad = Vec::new();
    for n in [2u32, 4, 8, 16] {
        let bp = refute_bin_op(n).unwrap();
        let f = encode_op(n, OpVariant::OpBinary).unwrap();
        if let Err(e) = checks(&f, &bp) {
            bad.push(format!("n={n}: {e}"));
        }
        let bound = (n * n * n + n * n) as usize;
        if bp.size() > bound {
            bad.push(format!("n={n}: size {} > {bound}", bp.size()));
        }
    }
    report(1, "binary ordering refutations check and have at most n³+n² internal nodes", &bad);
}

#[test]
fn criterion_2_treelike_binphp() {
    let mut bad = Vec::new();
    for n in [2u32, 4, 8] {
        let bp = refute_binphp_treelike(n + 1, n).unwrap();
        let f = encode_php(n + 1, n, PhpMode::BinaryPairwise).unwrap();
        if let Err(e) = checks(&f, &bp) {
            bad.push(format!("n={n}: {e}"));
        }
        let st = proof_stats(&bp);
        if !st.treelike {
            bad.push(format!("n={n}: not treelike"));
        }
        if st.depth > 2 * n as usize {
            bad.push(format!("n={n}: depth {} > {}", st.depth, 2 * n));
        }
        if st.size > 1usize << (2 * n) {
            bad.push(format!("n={n}: size {} > 2^{}", st.size, 2 * n));
        }
    }
    report(2, "treelike binary pigeonhole refutations within depth 2n and size 2^{2n}", &bad);
}

#[test]
fn criterion_3_translation_size_laws() {
    let mut bad = Vec::new();
    let mut ok = |name: &str, f: &CnfFormula, out: &BranchingProgram, limit: Option<usize>| {
        if let Err(e) = checks(f, out) {
            bad.push(format!("{name}: output rejected: {e}"));
        }
        if let Some(limit) = limit {
            if out.size() > limit {
                bad.push(format!("{name}: size {} > {limit}", out.size()));
            }
        }
    };

    // Unary to binary keeps the node count exactly.
    let un = encode_php(3, 2, PhpMode::Unary).unwrap();
    let bin = encode_php(3, 2, PhpMode::BinaryPairwise).unwrap();
    let bp = refute_by_search(&un, &[]).unwrap();
    let out = translate_unary_to_binary(&bp, &un, &bin).unwrap();
    ok("u2b php(3,2)", &bin, &out, None);
    let same_php = out.nodes.len() == bp.nodes.len() && out.size() == bp.size();

    let g = MultipartiteGraph::empty(2, 2);
    let (un, bin) = (encode_clique(&g, CliqueMode::Unary), encode_clique(&g, CliqueMode::Binary));
    let bp = refute_by_search(&un, &[]).unwrap();
    let out = translate_unary_to_binary(&bp, &un, &bin).unwrap();
    ok("u2b edgeless clique", &bin, &out, None);
    let same_clique = out.nodes.len() == bp.nodes.len() && out.size() == bp.size();

    // Total comparison: at most n²·S.
    let bp = refute_lop_unary(4).unwrap();
    let out = translate_tc_unary_to_binary(&bp, 4).unwrap();
    ok("tc-u2b lop(4)", &encode_op(4, OpVariant::LopBinaryTc).unwrap(), &out, Some(16 * bp.size()));

    // Binary to unary functional: at most n²·S.
    let bp = refute_bin_op(4).unwrap();
    let bin = encode_op(4, OpVariant::OpBinary).unwrap();
    let fun = encode_op(4, OpVariant::OpUnaryFunctional).unwrap();
    let out = translate_binary_to_unary_functional(&bp, &bin, &fun, 4).unwrap();
    ok("b2uf bin_op(4)", &fun, &out, Some(16 * bp.size()));

    let bp = refute_binphp_treelike(3, 2).unwrap();
    let bin = encode_php(3, 2, PhpMode::BinaryPairwise).unwrap();
    let fun = encode_php(3, 2, PhpMode::UnaryFunctional).unwrap();
    let out = translate_binary_to_unary_functional(&bp, &bin, &fun, 2).unwrap();
    ok("b2uf binphp(3,2)", &fun, &out, None);

    // Lowering the level: at most 2^d·N.
    let (f, bp) = two_clause_res2();
    let d = proof_stats(&bp).max_covering;
    let out = reduce_res_level(&f, &bp, d).unwrap();
    ok("reduce", &f, &out, Some((1 << d) * bp.size()));
    if out.s != bp.s - 1 {
        bad.push(format!("reduce: level {} -> {}", bp.s, out.s));
    }

    if !same_php || !same_clique {
        bad.push("u2b changed the node count".into());
    }
    report(3, "translations stay within their size laws and re-check", &bad);
}

/// Res(2) refutation of {x1 ∨ x2, ¬x1, ¬x2}: ask x1 ∨ x2, then split it.
fn two_clause_res2() -> (CnfFormula, BranchingProgram) {
    let mut f = CnfFormula::new("x1|x2, -x1, -x2");
    let x1 = f.var(VarDescriptor::unary(&[0]));
    let x2 = f.var(VarDescriptor::unary(&[1]));
    f.add_clause([Literal::pos(x1), Literal::pos(x2)]);
    f.add_clause([Literal::neg(x1)]);
    f.add_clause([Literal::neg(x2)]);
    let both = Clause::new([Literal::pos(x1), Literal::pos(x2)]);
    let unit = |l: Literal| -> Record { [Clause::unit(l)].into_iter().collect() };
    let mut b = BpBuilder::new();
    let src = b.alloc(Record::new());
    let t = b.alloc([both.clone()].into_iter().collect());
    let fl = b.alloc([Clause::unit(Literal::neg(x1)), Clause::unit(Literal::neg(x2))].into_iter().collect());
    let a = b.alloc(unit(Literal::pos(x1)));
    let c = b.alloc(unit(Literal::pos(x2)));
    b.set(src, NodeKind::Query { disj: both, t, f: fl });
    b.set(fl, NodeKind::Sink(SinkLabel::Axiom(0)));
    b.set(t, NodeKind::Split { sub: Clause::unit(Literal::pos(x1)), t: a, f: c });
    b.set(a, NodeKind::Sink(SinkLabel::Axiom(1)));
    b.set(c, NodeKind::Sink(SinkLabel::Axiom(2)));
    let n = f.num_vars;
    (f, b.finish(2, n, src))
}

#[test]
fn criterion_4_minitree_fixture() {
    // Leaves in order, false answers first: '#' closed, A/B merged.
    const FIXTURE: &str = "##B###B###B#AA#A";
    let (n, i, j) = (4u32, 2u32, 3u32);
    let mut bad = Vec::new();
    let leaves = tc_minitree_leaves(n, i, j).unwrap();
    let got: String = leaves
        .iter()
        .map(|c| match c {
            LeafClass::A => 'A',
            LeafClass::B => 'B',
            LeafClass::Antisymmetry | LeafClass::Totality => '#',
        })
        .collect();
    if got != FIXTURE {
        bad.push(format!("classes {got} != {FIXTURE}"));
    }
    let doubly = leaves.iter().filter(|&&c| c == LeafClass::Antisymmetry).count();
    if doubly != 1 {
        bad.push(format!("{doubly} doubly-labelled leaves"));
    }

    // Oracle: a leaf is closed iff its bit assignment falsifies the binary
    // expansion of totality or antisymmetry for the pair (i, j).
    let f = encode_op(n, OpVariant::LopBinaryTc).unwrap();
    let w: Vec<Vec<u32>> =
        (0..n).map(|x| (1..=2).map(|p| f.lookup(&VarDescriptor::bit(WITNESS, &[x], p)).unwrap()).collect()).collect();
    let bits = |x: u32| w[x as usize].clone();
    let mut comparison = functional_expansion(&[(i, j, true), (j, i, true)], &w);
    comparison.extend(functional_expansion(&[(i, j, false), (j, i, false)], &w));
    if comparison.iter().any(|c| f.find_clause(c).is_none()) {
        bad.push("comparison axioms missing from the formula".into());
    }
    for (idx, ch) in FIXTURE.chars().enumerate() {
        let (a, b) = (idx as u32 / 4, idx as u32 % 4);
        let mut fixed: BTreeSet<Literal> = pattern_lits(&bits(i), a).into_iter().collect();
        fixed.extend(pattern_lits(&bits(j), b));
        let closed = comparison.iter().any(|c| c.lits().iter().all(|l| fixed.contains(&l.complement())));
        let oracle = if closed {
            '#'
        } else if a == j {
            'A'
        } else if b == i {
            'B'
        } else {
            '?'
        };
        if oracle != ch {
            bad.push(format!("leaf {idx}: oracle {oracle}, fixture {ch}"));
        }
    }
    report(4, "mini-tree for v(2,3) at n=4 matches the pinned leaf classes", &bad);
}

#[test]
fn criterion_5_survival() {
    let mut bad = Vec::new();
    let lit = Term::unit(Literal::pos(1));
    let cases = [
        (Family::Clique { n: 16, k: 3, s: 1 }, (7u128, 8u128), 15.0 / 16.0),
        (Family::Php { m: 5, n: 16, t: 0, s_bits: 1 }, (7, 8), 7.0 / 8.0),
    ];
    for (fam, exact, bound) in cases {
        let r = survival_probability(&lit, fam, Mode::Exact).unwrap();
        if r.exact != Some(exact) {
            bad.push(format!("{fam:?}: exact {:?}", r.exact));
        }
        if (r.bound - bound).abs() > PIN_TOL || !r.pass {
            bad.push(format!("{fam:?}: bound {} pass {}", r.bound, r.pass));
        }
        let mc = survival_probability(&lit, fam, Mode::MonteCarlo { trials: MC_TRIALS, seed: 11 }).unwrap();
        let sigma = mc.sigma.unwrap().max(1.0 / MC_TRIALS as f64);
        if (mc.probability - r.probability).abs() > MC_SIGMAS * sigma {
            bad.push(format!("{fam:?}: monte carlo {} vs {}", mc.probability, r.probability));
        }
    }

    // Every 2-tuple of literals over two groups of 3 bits (n = 8).
    let pairs = |width: u32| {
        let lits: Vec<Literal> = (1..=2 * width).flat_map(|v| [Literal::pos(v), Literal::neg(v)]).collect();
        let mut out = Vec::new();
        for (x, &l1) in lits.iter().enumerate() {
            for &l2 in &lits[x + 1..] {
                if l1.var != l2.var {
                    out.push(Term::new([l1, l2]).unwrap());
                }
            }
        }
        out
    };
    let group = |l: &Literal| (l.var - 1) / 3;
    let survival = |t: &Term, fam: Family| survival_probability(t, fam, Mode::Exact).unwrap().probability;

    let clique = Family::Clique { n: 8, k: 2, s: 1 };
    let terms = pairs(3);
    let perfect = terms.iter().filter(|t| group(&t.lits()[0]) == group(&t.lits()[1]));
    let best = terms.iter().map(|t| survival(t, clique)).fold(0.0, f64::max);
    for t in perfect {
        if survival(t, clique) + PIN_TOL < best {
            bad.push(format!("perfect {t} survives less than another pair"));
        }
    }

    let php = Family::Php { m: 2, n: 8, t: 0, s_bits: 2 };
    let anti: Vec<&Term> = terms.iter().filter(|t| group(&t.lits()[0]) != group(&t.lits()[1])).collect();
    let best = terms.iter().map(|t| survival(t, php)).fold(0.0, f64::max);
    let worst_anti = anti.iter().map(|t| survival(t, php)).fold(1.0, f64::min);
    if worst_anti + PIN_TOL < best {
        bad.push(format!("anti-perfect pairs survive with {worst_anti}, a same-pigeon pair with {best}"));
    }
    report(5, "survival probabilities, bounds and tuple maximality", &bad);
}

#[test]
fn criterion_6_encoders_unsat() {
    let mut bad = Vec::new();
    let op3 = encode_op(3, OpVariant::OpUnary).unwrap();
    let op_spec: Pi2Spec = OP_SPEC.parse().unwrap();
    let cases: Vec<(&str, CnfFormula)> = vec![
        ("BinPHP(3,2)", encode_php(3, 2, PhpMode::BinaryPairwise).unwrap()),
        ("BinPHP(5,4)", encode_php(5, 4, PhpMode::BinaryPairwise).unwrap()),
        ("OP_unary(2)", encode_op(2, OpVariant::OpUnary).unwrap()),
        ("OP_unary(3)", op3),
        ("LOP_unary(3)", encode_op(3, OpVariant::LopUnary).unwrap()),
        ("BinClique edgeless (2,2)", encode_clique(&MultipartiteGraph::empty(2, 2), CliqueMode::Binary)),
        ("pi2 OP, n=3", encode_pi2(&op_spec, 3).unwrap()),
    ];
    for (name, f) in &cases {
        match brute_force_unsat(f) {
            Ok(true) => {}
            other => bad.push(format!("{name}: {other:?}")),
        }
    }
    report(6, "every listed encoding is unsatisfiable by enumeration", &bad);
}

/// One guaranteed-breaking mutation of a rule proof, if the chosen step
/// admits one.
fn mutate_rule(f: &CnfFormula, p: &RuleProof, rng: &mut ChaCha8Rng) -> Option<RuleProof> {
    let mut q = p.clone();
    let i = rng.gen_range(0..p.steps.len());
    if rng.gen_bool(0.5) {
        // Point a premise at a step that does not precede it.
        let later = rng.gen_range(i..p.steps.len());
        q.steps[i].rule = match p.steps[i].rule {
            Rule::AndIntro(_, b) => Rule::AndIntro(later, b),
            Rule::Cut(a, _) => Rule::Cut(a, later),
            Rule::Weak1(_) => Rule::Weak1(later),
            Rule::Weak2(_) => Rule::Weak2(later),
            _ => return None,
        };
        return Some(q);
    }
    // Flip a literal sign in a conclusion that is not a weakening.
    let step = &p.steps[i];
    let premise_terms: BTreeSet<Term> = step.rule.premises().iter().flat_map(|&k| p.steps[k].clause.terms().to_vec()).collect();
    match step.rule {
        Rule::Axiom(_) | Rule::Cut(..) | Rule::AndIntro(..) => {}
        _ => return None,
    }
    let terms = step.clause.terms();
    if terms.is_empty() {
        return None;
    }
    let t = &terms[rng.gen_range(0..terms.len())];
    let x = rng.gen_range(0..t.len().max(1));
    let l = *t.lits().get(x)?;
    let flipped = Term::new(t.lits().iter().map(|&m| if m == l { m.complement() } else { m }))?;
    if premise_terms.contains(&flipped) || step.clause.contains(&flipped) {
        return None;
    }
    if let Rule::AndIntro(a, b) = step.rule {
        // The new term must not be the introduced conjunction either.
        let conj = p.steps[a].clause.terms().iter().chain(p.steps[b].clause.terms()).any(|u| flipped.is_subset(u) || u.is_subset(&flipped));
        if conj {
            return None;
        }
    }
    if let Rule::Axiom(k) = step.rule {
        if f.clauses[k].lits().iter().any(|&m| m == l.complement()) {
            return None;
        }
    }
    let rest: Vec<Term> = terms.iter().filter(|u| *u != t).cloned().chain([flipped]).collect();
    q.steps[i].clause = SClause::new(rest);
    Some(q)
}

/// Retargets a sink to an axiom its record does not falsify.
fn mutate_sink(f: &CnfFormula, bp: &BranchingProgram, rng: &mut ChaCha8Rng) -> Option<BranchingProgram> {
    let sinks: Vec<usize> = (0..bp.nodes.len()).filter(|&v| bp.nodes[v].kind.is_sink()).collect();
    let v = sinks[rng.gen_range(0..sinks.len())];
    let rec = &bp.nodes[v].record;
    let bad: Vec<usize> = (0..f.clauses.len())
        .filter(|&a| !f.clauses[a].lits().iter().all(|l| rec.contains(&Clause::unit(l.complement()))))
        .collect();
    if bad.is_empty() {
        return None;
    }
    let mut out = bp.clone();
    out.nodes[v].kind = NodeKind::Sink(SinkLabel::Axiom(bad[rng.gen_range(0..bad.len())]));
    Some(out)
}

#[test]
fn criterion_7_checker_fuzz() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut valid = Vec::new();
    valid.push((encode_op(4, OpVariant::OpBinary).unwrap(), refute_bin_op(4).unwrap()));
    valid.push((encode_php(5, 4, PhpMode::BinaryPairwise).unwrap(), refute_binphp_treelike(5, 4).unwrap()));
    valid.push((encode_op(3, OpVariant::OpUnary).unwrap(), refute_op_unary(3).unwrap()));
    valid.push((encode_op(3, OpVariant::LopUnary).unwrap(), refute_lop_unary(3).unwrap()));
    let (f, bp) = two_clause_res2();
    valid.push((f, bp));
    let rules: Vec<(CnfFormula, RuleProof)> =
        valid.iter().map(|(f, bp)| (f.clone(), bp_to_rule_proof(f, bp).unwrap())).collect();

    let mut bad = Vec::new();
    for (f, bp) in &valid {
        if let Err(e) = checks(f, bp) {
            bad.push(format!("base program rejected: {e}"));
        }
    }
    for (f, p) in &rules {
        if let Err(e) = check_rule_proof(f, p) {
            bad.push(format!("base rule proof rejected: {e}"));
        }
    }
    let (mut made, mut accepted) = (0, 0);
    while made < 1000 {
        let k = rng.gen_range(0..valid.len());
        let rejected = if rng.gen_bool(0.7) {
            let (f, p) = &rules[k];
            let Some(q) = mutate_rule(f, p, &mut rng) else { continue };
            check_rule_proof(f, &q).is_err()
        } else {
            let (f, bp) = &valid[k];
            let Some(q) = mutate_sink(f, bp, &mut rng) else { continue };
            check_branching_program(f, &q).is_err()
        };
        made += 1;
        accepted += usize::from(!rejected);
    }
    if accepted > 0 {
        bad.push(format!("{accepted} of {made} mutants accepted"));
    }
    report(7, "1000 breaking mutations are all rejected", &bad);
}

/// Smallest literal set hitting every term, by trying subsets by size.
fn cover_oracle(d: &SClause) -> usize {
    let lits: Vec<Literal> = d.terms().iter().flat_map(|t| t.lits().to_vec()).collect::<BTreeSet<_>>().into_iter().collect();
    let mut best = lits.len();
    for mask in 0u32..1 << lits.len() {
        let size = mask.count_ones() as usize;
        if size >= best {
            continue;
        }
        let hits = |t: &Term| t.lits().iter().any(|l| lits.iter().position(|m| m == l).is_some_and(|i| mask >> i & 1 == 1));
        if d.terms().iter().all(hits) {
            best = size;
        }
    }
    best
}

fn clique_oracle(g: &MultipartiteGraph) -> bool {
    let mut found = false;
    for_each_transversal(g, g.k, &mut |u| {
        if u.len() == g.k as usize && u.iter().enumerate().all(|(i, &a)| u[i + 1..].iter().all(|&b| g.has_edge(a, b))) {
            found = true;
            return false;
        }
        true
    });
    found
}

#[test]
fn criterion_8_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = Vec::new();
    for round in 0..200 {
        let s = rng.gen_range(1..=3);
        let universe = rng.gen_range(1..=6u32);
        let mut terms = Vec::new();
        let mut used = BTreeSet::new();
        for _ in 0..rng.gen_range(1..=6) {
            let len = rng.gen_range(1..=s);
            let lits: Vec<Literal> = (0..len).map(|_| Literal::new(rng.gen_range(1..=universe), rng.gen())).collect();
            if let Some(t) = Term::new(lits) {
                let grown: BTreeSet<Literal> = used.iter().copied().chain(t.lits().iter().copied()).collect();
                if grown.len() <= 12 {
                    used = grown;
                    terms.push(t);
                }
            }
        }
        let d = SClause::new(terms);
        let got = covering_number(&d).unwrap().0;
        let want = cover_oracle(&d);
        if got != want {
            bad.push(format!("dnf #{round} {d}: covering {got}, oracle {want}"));
        }
    }
    for seed in 0..50u64 {
        let p = [0.3, 0.5, 0.7][seed as usize % 3];
        let g = sample_graph_with_p(8, 3, p, seed).unwrap();
        let got = has_k_clique(&g);
        if got.is_some() != clique_oracle(&g) {
            bad.push(format!("graph seed {seed}: search {got:?} disagrees with enumeration"));
        }
        if let Some(c) = got {
            if !c.iter().enumerate().all(|(i, &a)| c[i + 1..].iter().all(|&b| g.has_edge(a, b))) {
                bad.push(format!("graph seed {seed}: witness {c:?} is not a clique"));
            }
        }
    }
    report(8, "covering number and clique search agree with exhaustive oracles", &bad);
}

#[test]
fn criterion_9_bound_calculators() {
    let mut bad = Vec::new();
    let xs: Vec<u64> = (1..=3).map(|s| xi(s).unwrap()).collect();
    if xs != [1, 4, 8] {
        bad.push(format!("xi(1..=3) = {xs:?}"));
    }
    let big = (1u64 << 30) as f64;
    // Pinned regression values.
    let pins = [
        (BoundKind::Clique { n: 16.0, k: 3.0, s: 1 }, 16f64.ln() * 2.0 / 576.0),
        (BoundKind::Clique { n: big, k: 3.0, s: 1 }, 0.072_202_831_308_327_63),
        (BoundKind::Php { n: big, s: 2, t: 1.0 }, 0.370_636_281_760_713_7),
        (BoundKind::Php { n: big, s: 3, t: 0.0 }, big / (4f64.powi(9) * 6.0 * 30f64.powi(8))),
    ];
    for (kind, want) in pins {
        let r = bound_calculator(kind).unwrap();
        if !r.ln_bound.is_finite() || (r.ln_bound - want).abs() > PIN_TOL * want.abs().max(1.0) {
            bad.push(format!("{kind:?}: ln bound {} != {want}", r.ln_bound));
        }
    }
    if bound_calculator(BoundKind::Php { n: 16.0, s: 1, t: 4.0 }).is_ok() {
        bad.push("u = 0 accepted".into());
    }
    report(9, "ξ values and log-domain bounds are pinned and finite", &bad);
}
