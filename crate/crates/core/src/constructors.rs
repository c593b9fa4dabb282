//! Explicit refutations of the ordering and pigeonhole families.

use std::collections::HashMap;

use crate::cnf::{CnfFormula, VarDescriptor};
use crate::encoders::{bits_for, encode_op, encode_php, OpVariant, PhpMode, RELATION, WITNESS};
use crate::error::{Error, Result};
use crate::graphs::bit_of;
use crate::logic::{Clause, Literal, Record};
use crate::proofs::{BpBuilder, BranchingProgram, NodeKind, SinkLabel};

/// A builder tied to the formula the program refutes.
pub(crate) struct Grow<'a> {
    pub b: BpBuilder,
    pub f: &'a CnfFormula,
    axioms: HashMap<Clause, usize>,
    memo: HashMap<Record, usize>,
}

impl<'a> Grow<'a> {
    pub fn new(f: &'a CnfFormula) -> Grow<'a> {
        Grow { b: BpBuilder::new(), f, axioms: f.clause_index(), memo: HashMap::new() }
    }

    pub fn root(&mut self) -> usize {
        self.b.alloc(Record::new())
    }

    /// Queries `d` at `v`; returns the fresh true and false children.
    pub fn query(&mut self, v: usize, d: Clause) -> (usize, usize) {
        let mut rt = self.b.record(v).clone();
        rt.insert(d.clone());
        let mut rf = self.b.record(v).clone();
        rf.extend(d.lits().iter().map(|l| Clause::unit(l.complement())));
        let t = self.b.alloc(rt);
        let f = self.b.alloc(rf);
        self.b.set(v, NodeKind::Query { disj: d, t, f });
        (t, f)
    }

    pub fn query_lit(&mut self, v: usize, l: Literal) -> (usize, usize) {
        self.query(v, Clause::unit(l))
    }

    pub fn axiom_index(&self, lits: &[Literal]) -> Result<usize> {
        let c = Clause::new(lits.iter().copied());
        self.axioms.get(&c).copied().ok_or_else(|| Error::Internal(format!("no axiom ( {c} )")))
    }

    /// Closes `v` as a sink for the axiom with these literals.
    pub fn sink(&mut self, v: usize, lits: &[Literal]) -> Result<()> {
        let a = self.axiom_index(lits)?;
        self.b.set(v, NodeKind::Sink(SinkLabel::Axiom(a)));
        Ok(())
    }

    /// Node with exactly this record, shared between callers; the flag is
    /// true when the node is new and still needs a kind.
    pub fn shared(&mut self, r: Record) -> (usize, bool) {
        if let Some(&id) = self.memo.get(&r) {
            return (id, false);
        }
        let id = self.b.alloc(r.clone());
        self.memo.insert(r, id);
        (id, true)
    }

    pub fn forget(&mut self, v: usize, child: usize) {
        self.b.set(v, NodeKind::Forget { child });
    }

    pub fn finish(self, s: usize, source: usize) -> BranchingProgram {
        self.b.finish(s, self.f.num_vars, source)
    }
}

fn var(f: &CnfFormula, d: VarDescriptor) -> u32 {
    f.lookup(&d).unwrap_or_else(|| panic!("encoder allocated no variable {d}"))
}

/// Special record "j is below none of 0..i except itself".
fn special(nu: &dyn Fn(u32, u32) -> u32, j: u32, i: u32) -> Record {
    (0..i).filter(|&y| y != j).map(|y| Clause::unit(Literal::neg(nu(j, y)))).collect()
}

/// The candidate walk shared by the ordering refutations; `finish` closes the
/// node holding the final special record of `j`.
fn ordering_walk(
    g: &mut Grow,
    n: u32,
    nu: &dyn Fn(u32, u32) -> u32,
    finish: &mut dyn FnMut(&mut Grow, usize, u32) -> Result<()>,
) -> Result<usize> {
    let (src, _) = g.shared(special(nu, 0, 1));
    let mut stage: Vec<(usize, u32)> = vec![(src, 0)];
    for i in 1..n {
        let mut next = Vec::new();
        // The node for candidate i is shared by every j whose query succeeds.
        let (cand, _) = g.shared(special(nu, i, i + 1));
        for &(v, j) in &stage {
            // The false child already holds the special record of (j, i+1).
            let (t, f) = g.query_lit(v, Literal::pos(nu(j, i)));
            next.push((f, j));
            // j is above i: each y < i is either below i, closing by
            // transitivity or antisymmetry, or recorded as not below i.
            let mut cur = t;
            for y in 0..i {
                let (yt, yf) = g.query_lit(cur, Literal::pos(nu(i, y)));
                if y == j {
                    g.sink(yt, &[Literal::neg(nu(j, i)), Literal::neg(nu(i, j))])?;
                } else {
                    g.sink(yt, &[Literal::neg(nu(j, i)), Literal::neg(nu(i, y)), Literal::pos(nu(j, y))])?;
                }
                cur = yf;
            }
            g.forget(cur, cand);
        }
        next.push((cand, i));
        next.sort_by_key(|&(_, j)| j);
        stage = next;
    }
    for (v, j) in stage {
        finish(g, v, j)?;
    }
    Ok(src)
}

fn refute_unary_ordering(n: u32, variant: OpVariant) -> Result<BranchingProgram> {
    let f = encode_op(n, variant)?;
    let nu = |x: u32, y: u32| var(&f, VarDescriptor::unary(&[x, y]));
    let mut g = Grow::new(&f);
    let src = ordering_walk(&mut g, n, &nu, &mut |g, v, j| {
        let (t, fl) = g.query_lit(v, Literal::pos(nu(j, j)));
        g.sink(t, &[Literal::neg(nu(j, j))])?;
        let row: Vec<Literal> = (0..n).map(|y| Literal::pos(nu(j, y))).collect();
        g.sink(fl, &row)
    })?;
    Ok(g.finish(1, src))
}

/// Res(1) refutation of the unary ordering principle.
pub fn refute_op_unary(n: u32) -> Result<BranchingProgram> {
    refute_unary_ordering(n, OpVariant::OpUnary)
}

/// Res(1) refutation of the linear ordering principle; the ordering walk
/// never needs the totality axioms.
pub fn refute_lop_unary(n: u32) -> Result<BranchingProgram> {
    refute_unary_ordering(n, OpVariant::LopUnary)
}

/// Res(1) refutation of the binary ordering principle of size at most n³+n².
pub fn refute_bin_op(n: u32) -> Result<BranchingProgram> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::Param(format!("binary ordering refutation needs n a power of two >= 2, got {n}")));
    }
    let f = encode_op(n, OpVariant::OpBinary)?;
    let r = bits_for(n);
    let nu = |x: u32, y: u32| var(&f, VarDescriptor::atom(RELATION, &[x, y]));
    let w = |x: u32, p: u32| var(&f, VarDescriptor::bit(WITNESS, &[x], p));
    let mut g = Grow::new(&f);
    let src = ordering_walk(&mut g, n, &nu, &mut |g, v, j| {
        // Walk the bits of j's witness; each full pattern a names an element
        // j must be above, which the record already denies.
        let mut frontier = vec![(v, 0u32)];
        for p in 1..=r {
            let mut next = Vec::new();
            for (u, a) in frontier {
                let (t, fl) = g.query_lit(u, Literal::pos(w(j, p)));
                next.push((t, a << 1 | 1));
                next.push((fl, a << 1));
            }
            frontier = next;
        }
        for (u, a) in frontier {
            let mut lits: Vec<Literal> = (1..=r).map(|p| Literal::new(w(j, p), !bit_of(a, p, r))).collect();
            lits.push(Literal::pos(nu(j, a)));
            if a == j {
                let (t, fl) = g.query_lit(u, Literal::pos(nu(j, j)));
                g.sink(t, &[Literal::neg(nu(j, j))])?;
                g.sink(fl, &lits)?;
            } else {
                g.sink(u, &lits)?;
            }
        }
        Ok(())
    })?;
    Ok(g.finish(1, src))
}

/// Treelike Res(1) refutation of the binary pigeonhole principle: the bits
/// of n+1 pigeons are asked level by level, following a side that holds more
/// pigeons than holes.
pub fn refute_binphp_treelike(m: u32, n: u32) -> Result<BranchingProgram> {
    if n < 2 || m <= n {
        return Err(Error::Param(format!("pigeonhole refutation needs m > n >= 2, got m={m} n={n}")));
    }
    let f = encode_php(m, n, PhpMode::BinaryPairwise)?;
    let r = bits_for(n);
    let w = |x: u32, p: u32| var(&f, VarDescriptor::bit(WITNESS, &[x], p));
    let holes = |prefix: u32, len: u32| (0..n).filter(|&a| a >> (r - len) == prefix).count();
    let mut g = Grow::new(&f);
    let src = g.root();
    let pigeons: Vec<u32> = (0..=n).collect();
    level(&mut g, src, &pigeons, 0, 0, r, &w, &holes)?;
    Ok(g.finish(1, src))
}

/// Every pigeon in `set` agrees with `prefix` on the first `len` bits, and
/// `set` outnumbers the holes under `prefix`.
#[allow(clippy::too_many_arguments)]
fn level(
    g: &mut Grow,
    v: usize,
    set: &[u32],
    prefix: u32,
    len: u32,
    r: u32,
    w: &dyn Fn(u32, u32) -> u32,
    holes: &dyn Fn(u32, u32) -> usize,
) -> Result<()> {
    let excluded = |x: u32, a: u32| -> Vec<Literal> { (1..=r).map(|p| Literal::new(w(x, p), !bit_of(a, p, r))).collect() };
    if len == r {
        let mut lits = excluded(set[0], prefix);
        if holes(prefix, r) > 0 {
            lits.extend(excluded(set[1], prefix));
        }
        return g.sink(v, &lits);
    }
    let need = [holes(prefix << 1, len + 1) + 1, holes(prefix << 1 | 1, len + 1) + 1];
    ask(g, v, set, 0, [Vec::new(), Vec::new()], need, prefix, len, r, w, holes)
}

#[allow(clippy::too_many_arguments)]
fn ask(
    g: &mut Grow,
    v: usize,
    set: &[u32],
    k: usize,
    sides: [Vec<u32>; 2],
    need: [usize; 2],
    prefix: u32,
    len: u32,
    r: u32,
    w: &dyn Fn(u32, u32) -> u32,
    holes: &dyn Fn(u32, u32) -> usize,
) -> Result<()> {
    for bit in [1usize, 0] {
        if sides[bit].len() >= need[bit] {
            return level(g, v, &sides[bit], prefix << 1 | bit as u32, len + 1, r, w, holes);
        }
    }
    let x = set[k];
    let (t, fl) = g.query_lit(v, Literal::pos(w(x, len + 1)));
    for (child, bit) in [(t, 1usize), (fl, 0)] {
        let mut s = sides.clone();
        s[bit].push(x);
        ask(g, child, set, k + 1, s, need, prefix, len, r, w, holes)?;
    }
    Ok(())
}

/// Treelike Res(1) refutation by questioning variables in `order` (then the
/// rest in index order) until each branch falsifies an axiom.
pub fn refute_by_search(f: &CnfFormula, order: &[u32]) -> Result<BranchingProgram> {
    let vars = crate::translators::search_order(f, order);
    let mut out = crate::translators::Out::new(f, 1);
    let src = out.b.alloc(Record::new());
    out.close_by_search(src, &vars)?;
    Ok(out.b.finish(1, f.num_vars, src))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proofs::{check_branching_program, proof_stats};

    #[test]
    fn bin_op_small_sizes() {
        for n in [2u32, 4] {
            let bp = refute_bin_op(n).unwrap();
            let f = encode_op(n, OpVariant::OpBinary).unwrap();
            assert_eq!(check_branching_program(&f, &bp), Ok(()));
            assert!(bp.size() as u32 <= n * n * n + n * n);
        }
        assert_eq!(refute_bin_op(2).unwrap().size(), 7);
    }

    #[test]
    fn unary_orderings_check() {
        for n in [2u32, 3, 4] {
            let bp = refute_op_unary(n).unwrap();
            assert_eq!(check_branching_program(&encode_op(n, OpVariant::OpUnary).unwrap(), &bp), Ok(()));
            let bp = refute_lop_unary(n).unwrap();
            assert_eq!(check_branching_program(&encode_op(n, OpVariant::LopUnary).unwrap(), &bp), Ok(()));
        }
    }

    #[test]
    fn binphp_trees() {
        for (m, n, depth) in [(3u32, 2u32, 3usize), (5, 4, 8), (4, 3, 7)] {
            let bp = refute_binphp_treelike(m, n).unwrap();
            let f = encode_php(m, n, PhpMode::BinaryPairwise).unwrap();
            assert_eq!(check_branching_program(&f, &bp), Ok(()));
            let st = proof_stats(&bp);
            assert!(st.treelike);
            assert_eq!(st.depth, depth, "({m},{n})");
        }
        assert!(refute_binphp_treelike(2, 2).is_err());
    }
}
