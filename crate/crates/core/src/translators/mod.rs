//! Proof translations between unary and binary encodings and between
//! Res levels.

mod b2uf;
mod reduce;
mod tc;

pub use b2uf::translate_binary_to_unary_functional;
pub use reduce::{reduce_res_level, wide_cover};
pub use tc::{tc_minitree_leaves, translate_tc_unary_to_binary, LeafClass};

use std::collections::HashMap;

use crate::cnf::{CnfFormula, VarDescriptor};
use crate::encoders::{pattern_excluded, pattern_lits, WITNESS};
use crate::error::{Error, Result};
use crate::logic::{Clause, Literal, Record};
use crate::proofs::{check_branching_program, record_pattern_set, BpNode, BranchingProgram, NodeKind, SinkLabel};

/// The witness bits of a group in a binary formula, most significant first.
pub(crate) fn group_bits(f: &CnfFormula, group: &[u32]) -> Vec<u32> {
    (1..).map_while(|p| f.lookup(&VarDescriptor::bit(WITNESS, group, p))).collect()
}

/// Splits a unary variable `v(g.., a)` into its group and value.
pub(crate) fn unary_parts(f: &CnfFormula, v: u32) -> Result<(Vec<u32>, u32)> {
    match f.name(v) {
        Some(VarDescriptor::Unary { args }) if !args.is_empty() => {
            Ok((args[..args.len() - 1].to_vec(), args[args.len() - 1]))
        }
        other => Err(Error::Mapping(format!("variable {v} ({other:?}) is not a unary variable"))),
    }
}

/// Index of a clause of `f` falsified by the unit literals of `r`.
pub(crate) fn falsified_axiom(f: &CnfFormula, r: &Record) -> Option<usize> {
    f.clauses.iter().position(|c| c.lits().iter().all(|l| r.contains(&Clause::unit(l.complement()))))
}

/// Sink label for a record: a falsified axiom, else a sign-pattern set.
pub(crate) fn find_sink(f: &CnfFormula, r: &Record, s: usize) -> Option<SinkLabel> {
    if let Some(a) = falsified_axiom(f, r) {
        return Some(SinkLabel::Axiom(a));
    }
    record_pattern_set(r, s).map(|_| SinkLabel::ExcludedMiddle)
}

struct U2b<'a> {
    unary: &'a CnfFormula,
    bits: HashMap<Vec<u32>, Vec<u32>>,
}

impl U2b<'_> {
    /// Group bits and value of a unary variable.
    fn parts(&mut self, binary: &CnfFormula, v: u32) -> Result<(Vec<u32>, u32)> {
        let (g, a) = unary_parts(self.unary, v)?;
        let bits = self.bits.entry(g.clone()).or_insert_with(|| group_bits(binary, &g)).clone();
        if bits.is_empty() || a >> bits.len() != 0 {
            return Err(Error::Mapping(format!("no binary counterpart for value {a} of group {g:?}")));
        }
        Ok((bits, a))
    }

    fn image(&mut self, binary: &CnfFormula, r: &Record) -> Result<Record> {
        let mut out = Record::new();
        for c in r {
            let [l] = c.lits() else {
                return Err(Error::Unsupported("unary-to-binary translation needs a Res(1) program".into()));
            };
            let (bits, a) = self.parts(binary, l.var)?;
            if l.positive {
                out.extend(pattern_lits(&bits, a).into_iter().map(Clause::unit));
            } else {
                out.insert(Clause::new(pattern_excluded(&bits, a)));
            }
        }
        Ok(out)
    }
}

/// Replaces every query of a unary variable by the query of its excluded
/// bit pattern, swapping the branches; records are mapped literal by literal.
/// Node count is preserved and the result is a Res(log n) program.
pub fn translate_unary_to_binary(
    bp: &BranchingProgram,
    unary: &CnfFormula,
    binary: &CnfFormula,
) -> Result<BranchingProgram> {
    check_branching_program(unary, bp)?;
    if bp.s != 1 {
        return Err(Error::Unsupported(format!("input must be a Res(1) program, got s = {}", bp.s)));
    }
    let mut t = U2b { unary, bits: HashMap::new() };
    let index = binary.clause_index();
    let mut nodes = Vec::with_capacity(bp.nodes.len());
    let mut s_out = 1;
    for node in &bp.nodes {
        let record = t.image(binary, &node.record)?;
        let kind = match &node.kind {
            NodeKind::Query { disj, t: tc, f: fc } => {
                let [l] = disj.lits() else {
                    return Err(Error::Unsupported("query wider than one literal".into()));
                };
                let (bits, a) = t.parts(binary, l.var)?;
                s_out = s_out.max(bits.len());
                let d = Clause::new(pattern_excluded(&bits, a));
                if l.positive {
                    NodeKind::Query { disj: d, t: *fc, f: *tc }
                } else {
                    NodeKind::Query { disj: d, t: *tc, f: *fc }
                }
            }
            NodeKind::Split { .. } => return Err(Error::Unsupported("split node in a Res(1) program".into())),
            NodeKind::Forget { child } => NodeKind::Forget { child: *child },
            NodeKind::Sink(label) => {
                let label = match label {
                    SinkLabel::Axiom(a) => {
                        let c = &unary.clauses[*a];
                        let mut lits: Vec<Literal> = Vec::new();
                        let mut all_negative = true;
                        for l in c.lits() {
                            let (bits, v) = t.parts(binary, l.var)?;
                            all_negative &= !l.positive;
                            lits.extend(pattern_excluded(&bits, v));
                        }
                        let mapped = all_negative.then(|| index.get(&Clause::new(lits)).copied()).flatten();
                        match mapped {
                            Some(b) => SinkLabel::Axiom(b),
                            None => find_sink(binary, &record, usize::MAX)
                                .ok_or_else(|| Error::Mapping(format!("axiom ( {c} ) has no binary counterpart")))?,
                        }
                    }
                    SinkLabel::ExcludedMiddle => find_sink(binary, &record, usize::MAX)
                        .ok_or_else(|| Error::Mapping("excluded-middle sink has no binary counterpart".into()))?,
                };
                NodeKind::Sink(label)
            }
        };
        nodes.push(BpNode { record, kind });
    }
    for n in &nodes {
        s_out = s_out.max(n.record.iter().map(Clause::len).max().unwrap_or(0));
    }
    Ok(BranchingProgram { s: s_out, num_vars: binary.num_vars, source: bp.source, nodes })
}

/// Program under construction from a translation, with sink search.
pub(crate) struct Out<'a> {
    pub b: crate::proofs::BpBuilder,
    pub f: &'a CnfFormula,
    pub s: usize,
}

impl<'a> Out<'a> {
    pub fn new(f: &'a CnfFormula, s: usize) -> Out<'a> {
        Out { b: crate::proofs::BpBuilder::new(), f, s }
    }

    pub fn record(&self, v: usize) -> &Record {
        self.b.record(v)
    }

    /// Queries the literal `l` at `v`, returning the children.
    pub fn query_lit(&mut self, v: usize, l: Literal) -> (usize, usize) {
        let mut rt = self.b.record(v).clone();
        rt.insert(Clause::unit(l));
        let mut rf = self.b.record(v).clone();
        rf.insert(Clause::unit(l.complement()));
        let t = self.b.alloc(rt);
        let f = self.b.alloc(rf);
        self.b.set(v, NodeKind::Query { disj: Clause::unit(l), t, f });
        (t, f)
    }

    /// A fresh query node on `l` over existing children.
    pub fn query_node(&mut self, rec: Record, l: Literal, t: usize, f: usize) -> usize {
        let v = self.b.alloc(rec);
        self.b.set(v, NodeKind::Query { disj: Clause::unit(l), t, f });
        v
    }

    /// A node with record `rec` leading to `target`: the target itself when
    /// the records agree, else a fresh forget node.
    pub fn attach(&mut self, rec: Record, target: usize) -> usize {
        if &rec == self.b.record(target) {
            return target;
        }
        let n = self.b.alloc(rec);
        self.b.set(n, NodeKind::Forget { child: target });
        n
    }

    /// Sets `v` to a sink if its record already refutes an axiom.
    pub fn try_sink(&mut self, v: usize) -> bool {
        match find_sink(self.f, self.b.record(v), self.s) {
            Some(label) => {
                self.b.set(v, NodeKind::Sink(label));
                true
            }
            None => false,
        }
    }

    /// Closes `v` by querying the unset variables of `vars` in order until
    /// every branch refutes an axiom.
    pub fn close_by_search(&mut self, v: usize, vars: &[u32]) -> Result<()> {
        if self.try_sink(v) {
            return Ok(());
        }
        let r = self.b.record(v);
        let next = vars
            .iter()
            .copied()
            .find(|&x| !r.contains(&Clause::unit(Literal::pos(x))) && !r.contains(&Clause::unit(Literal::neg(x))));
        let Some(x) = next else {
            return Err(Error::Mapping("record refutes no axiom after questioning every variable".into()));
        };
        let (t, f) = self.query_lit(v, Literal::pos(x));
        self.close_by_search(t, vars)?;
        self.close_by_search(f, vars)
    }
}

/// Every variable of `f`, the listed groups' witness bits first.
pub(crate) fn search_order(f: &CnfFormula, first: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = first.to_vec();
    out.extend((1..=f.num_vars).filter(|v| !first.contains(v)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{refute_bin_op, refute_binphp_treelike, refute_by_search, refute_lop_unary};
    use crate::encoders::{encode_clique, encode_op, encode_php, CliqueMode, OpVariant, PhpMode};
    use crate::graphs::MultipartiteGraph;
    use crate::proofs::BpBuilder;

    fn valid(f: &CnfFormula, bp: &BranchingProgram) {
        if let Err(e) = check_branching_program(f, bp) {
            panic!("{e}");
        }
    }

    #[test]
    fn unary_php_to_binary_keeps_size() {
        let un = encode_php(3, 2, PhpMode::Unary).unwrap();
        let bin = encode_php(3, 2, PhpMode::BinaryPairwise).unwrap();
        let bp = refute_by_search(&un, &[]).unwrap();
        valid(&un, &bp);
        let out = translate_unary_to_binary(&bp, &un, &bin).unwrap();
        valid(&bin, &out);
        assert_eq!(out.nodes.len(), bp.nodes.len());
        assert_eq!(out.s, 1);
    }

    #[test]
    fn edgeless_clique_to_binary_keeps_size() {
        let g = MultipartiteGraph::empty(2, 2);
        let un = encode_clique(&g, CliqueMode::Unary);
        let bin = encode_clique(&g, CliqueMode::Binary);
        let bp = refute_by_search(&un, &[]).unwrap();
        let out = translate_unary_to_binary(&bp, &un, &bin).unwrap();
        valid(&bin, &out);
        assert_eq!(out.size(), bp.size());
    }

    #[test]
    fn wider_groups_raise_the_level() {
        let un = encode_php(5, 4, PhpMode::Unary).unwrap();
        let bin = encode_php(5, 4, PhpMode::BinaryPairwise).unwrap();
        let order: Vec<u32> = (1..=un.num_vars).collect();
        let bp = refute_by_search(&un, &order).unwrap();
        let out = translate_unary_to_binary(&bp, &un, &bin).unwrap();
        valid(&bin, &out);
        assert_eq!(out.s, 2);
        assert_eq!(out.size(), bp.size());
    }

    #[test]
    fn tc_translation_of_lop() {
        for n in [2u32, 3, 4] {
            let bp = refute_lop_unary(n).unwrap();
            let out = translate_tc_unary_to_binary(&bp, n).unwrap();
            valid(&encode_op(n, OpVariant::LopBinaryTc).unwrap(), &out);
            assert!(out.size() <= (n * n) as usize * bp.size(), "n={n}: {} > {}·{}", out.size(), n * n, bp.size());
        }
    }

    #[test]
    fn minitree_for_two_three() {
        use LeafClass::*;
        let leaves = tc_minitree_leaves(4, 2, 3).unwrap();
        let fixture = [
            Totality, Totality, B, Totality, Totality, Totality, B, Totality, Totality, Totality, B, Totality, A, A,
            Antisymmetry, A,
        ];
        assert_eq!(leaves, fixture);
        assert_eq!(tc_minitree_leaves(2, 0, 1).unwrap().len(), 4);
    }

    #[test]
    fn binary_op_to_functional() {
        let bp = refute_bin_op(4).unwrap();
        let bin = encode_op(4, OpVariant::OpBinary).unwrap();
        let fun = encode_op(4, OpVariant::OpUnaryFunctional).unwrap();
        let out = translate_binary_to_unary_functional(&bp, &bin, &fun, 4).unwrap();
        valid(&fun, &out);
        assert!(out.size() <= 16 * bp.size(), "{} > 16·{}", out.size(), bp.size());
    }

    #[test]
    fn binary_php_to_functional() {
        let bp = refute_binphp_treelike(3, 2).unwrap();
        let bin = encode_php(3, 2, PhpMode::BinaryPairwise).unwrap();
        let fun = encode_php(3, 2, PhpMode::UnaryFunctional).unwrap();
        let out = translate_binary_to_unary_functional(&bp, &bin, &fun, 2).unwrap();
        valid(&fun, &out);
        // Binary collision sinks need extra questions once translated.
        assert_eq!((bp.size(), out.size()), (5, 37));
    }

    fn two_clause_program() -> (CnfFormula, BranchingProgram) {
        let mut f = CnfFormula::new("tiny");
        let x1 = f.var(VarDescriptor::unary(&[0]));
        let x2 = f.var(VarDescriptor::unary(&[1]));
        f.add_clause([Literal::pos(x1), Literal::pos(x2)]);
        f.add_clause([Literal::neg(x1)]);
        f.add_clause([Literal::neg(x2)]);
        let both = Clause::new([Literal::pos(x1), Literal::pos(x2)]);
        let mut b = BpBuilder::new();
        let src = b.alloc(Record::new());
        let t = b.alloc([both.clone()].into_iter().collect());
        let fl = b.alloc([Clause::unit(Literal::neg(x1)), Clause::unit(Literal::neg(x2))].into_iter().collect());
        b.set(src, NodeKind::Query { disj: both, t, f: fl });
        b.set(fl, NodeKind::Sink(SinkLabel::Axiom(0)));
        let a = b.alloc([Clause::unit(Literal::pos(x1))].into_iter().collect());
        let c = b.alloc([Clause::unit(Literal::pos(x2))].into_iter().collect());
        b.set(t, NodeKind::Split { sub: Clause::unit(Literal::pos(x1)), t: a, f: c });
        b.set(a, NodeKind::Sink(SinkLabel::Axiom(1)));
        b.set(c, NodeKind::Sink(SinkLabel::Axiom(2)));
        (f.clone(), b.finish(2, f.num_vars, src))
    }

    #[test]
    fn reduce_two_clause_example() {
        let (f, bp) = two_clause_program();
        valid(&f, &bp);
        for d in [2, 3] {
            let out = reduce_res_level(&f, &bp, d).unwrap();
            valid(&f, &out);
            assert_eq!(out.s, 1);
            assert!(out.size() <= (1 << d) * bp.size(), "d={d}: {} > {}", out.size(), (1 << d) * bp.size());
        }
        assert!(matches!(reduce_res_level(&f, &bp, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn wide_cover_hits_wide_clauses() {
        let r: Record = [Clause::new([Literal::pos(1), Literal::pos(2)]), Clause::unit(Literal::pos(3))].into_iter().collect();
        assert_eq!(wide_cover(&r, 1).len(), 1);
        assert!(wide_cover(&r, 2).is_empty());
    }
}
