//! CNF families: pigeonhole, clique and ordering principles in unary and
//! binary form, plus the canonical binary encoding of Π2 specs.

mod pi2;

pub use pi2::{encode_pi2, encode_pi2_sized, Pi2Spec, Template, TemplateLit, LOP_SPEC, OP_SPEC, PHP_SPEC};

use std::collections::BTreeMap;

use crate::cnf::{CnfFormula, VarDescriptor};
use crate::error::{Error, Result};
use crate::graphs::{bit_of, MultipartiteGraph};
use crate::logic::{Clause, Literal};

/// Name of the witness bits in every binary family.
pub const WITNESS: &str = "w";
/// Relation name of type-1 atoms in the built-in binary families.
pub const RELATION: &str = "R";

/// Bits needed to name `n` values.
pub fn bits_for(n: u32) -> u32 {
    if n <= 1 {
        0
    } else {
        32 - (n - 1).leading_zeros()
    }
}

/// Allocates the `r` witness bits of `group`.
pub fn alloc_bits(f: &mut CnfFormula, group: &[u32], r: u32) -> Vec<u32> {
    (1..=r).map(|p| f.var(VarDescriptor::bit(WITNESS, group, p))).collect()
}

/// Literals true exactly when the bits spell `a`.
pub fn pattern_lits(bits: &[u32], a: u32) -> Vec<Literal> {
    let r = bits.len() as u32;
    bits.iter().enumerate().map(|(i, &v)| Literal::new(v, bit_of(a, i as u32 + 1, r))).collect()
}

/// The disjunction `⋁ ω^{1-a_i}`: false exactly when the bits spell `a`.
pub fn pattern_excluded(bits: &[u32], a: u32) -> Vec<Literal> {
    pattern_lits(bits, a).into_iter().map(Literal::complement).collect()
}

fn add_exclusions(f: &mut CnfFormula, bits: &[u32], n: u32) {
    let r = bits.len() as u32;
    for a in n..(1u32 << r) {
        f.add_clause(pattern_excluded(bits, a));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliqueMode {
    Unary,
    Binary,
}

pub fn encode_clique(g: &MultipartiteGraph, mode: CliqueMode) -> CnfFormula {
    let (k, n) = (g.k, g.n);
    let mut non_edges = Vec::new();
    for b1 in 0..k {
        for b2 in b1 + 1..k {
            for a in 0..n {
                for b in 0..n {
                    if !g.has_edge((b1, a), (b2, b)) {
                        non_edges.push(((b1, a), (b2, b)));
                    }
                }
            }
        }
    }
    match mode {
        CliqueMode::Unary => {
            let mut f = CnfFormula::new(format!("clique-un k={k} n={n}"));
            let v: Vec<Vec<u32>> =
                (0..k).map(|i| (0..n).map(|a| f.var(VarDescriptor::unary(&[i, a]))).collect()).collect();
            for row in &v {
                f.add_clause(row.iter().map(|&x| Literal::pos(x)));
            }
            for ((i, a), (j, b)) in non_edges {
                f.add_clause([Literal::neg(v[i as usize][a as usize]), Literal::neg(v[j as usize][b as usize])]);
            }
            f
        }
        CliqueMode::Binary => {
            let mut f = CnfFormula::new(format!("clique-bin k={k} n={n}"));
            let r = bits_for(n);
            let w: Vec<Vec<u32>> = (0..k).map(|i| alloc_bits(&mut f, &[i], r)).collect();
            for ((i, a), (j, b)) in non_edges {
                let mut lits = pattern_excluded(&w[i as usize], a);
                lits.extend(pattern_excluded(&w[j as usize], b));
                f.add_clause(lits);
            }
            for bits in &w {
                add_exclusions(&mut f, bits, n);
            }
            f
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhpMode {
    Unary,
    UnaryFunctional,
    BinaryPairwise,
    BinaryCanonical,
}

pub fn encode_php(m: u32, n: u32, mode: PhpMode) -> Result<CnfFormula> {
    if n < 2 || m <= n {
        return Err(Error::Param(format!("pigeonhole needs m > n >= 2, got m={m} n={n}")));
    }
    match mode {
        PhpMode::Unary | PhpMode::UnaryFunctional => {
            let tag = if mode == PhpMode::Unary { "php-un" } else { "php-fun" };
            let mut f = CnfFormula::new(format!("{tag} m={m} n={n}"));
            let v: Vec<Vec<u32>> =
                (0..m).map(|i| (0..n).map(|j| f.var(VarDescriptor::unary(&[i, j]))).collect()).collect();
            for row in &v {
                f.add_clause(row.iter().map(|&x| Literal::pos(x)));
            }
            for j in 0..n as usize {
                for i in 0..m as usize {
                    for i2 in i + 1..m as usize {
                        f.add_clause([Literal::neg(v[i][j]), Literal::neg(v[i2][j])]);
                    }
                }
            }
            if mode == PhpMode::UnaryFunctional {
                for row in &v {
                    for j in 0..row.len() {
                        for j2 in j + 1..row.len() {
                            f.add_clause([Literal::neg(row[j]), Literal::neg(row[j2])]);
                        }
                    }
                }
            }
            Ok(f)
        }
        PhpMode::BinaryPairwise => {
            let mut f = CnfFormula::new(format!("php-bin m={m} n={n}"));
            let r = bits_for(n);
            let w: Vec<Vec<u32>> = (0..m).map(|i| alloc_bits(&mut f, &[i], r)).collect();
            for i in 0..m as usize {
                for i2 in i + 1..m as usize {
                    for a in 0..n {
                        let mut lits = pattern_excluded(&w[i], a);
                        lits.extend(pattern_excluded(&w[i2], a));
                        f.add_clause(lits);
                    }
                }
            }
            for bits in &w {
                add_exclusions(&mut f, bits, n);
            }
            Ok(f)
        }
        PhpMode::BinaryCanonical => {
            let spec: Pi2Spec = PHP_SPEC.parse()?;
            let sizes: BTreeMap<String, u32> = [("P".to_string(), m), ("H".to_string(), n)].into_iter().collect();
            let mut f = encode_pi2_sized(&spec, &sizes)?;
            f.family_tag = format!("php-bin-canonical m={m} n={n}");
            Ok(f)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpVariant {
    OpUnary,
    LopUnary,
    OpBinary,
    /// OP_unary plus clauses making each row of `v` name at most one element.
    OpUnaryFunctional,
    /// LOP_unary with every atom `v(x,y)` read as "the bits of x spell y".
    LopBinaryTc,
}

/// The transitivity instance over `(x,y,z)` as a literal list over `v`, with
/// trivial instances removed and `x = z` reduced to antisymmetry.
fn transitivity(v: &dyn Fn(u32, u32) -> u32, x: u32, y: u32, z: u32) -> Option<Vec<Literal>> {
    if x == y || y == z {
        return None;
    }
    let mut lits = vec![Literal::neg(v(x, y)), Literal::neg(v(y, z))];
    if x != z {
        lits.push(Literal::pos(v(x, z)));
    }
    Some(lits)
}

fn op_relational_clauses(n: u32, v: &dyn Fn(u32, u32) -> u32, total: bool) -> Vec<Vec<Literal>> {
    let mut out = Vec::new();
    for x in 0..n {
        out.push(vec![Literal::neg(v(x, x))]);
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if let Some(c) = transitivity(v, x, y, z) {
                    out.push(c);
                }
            }
        }
    }
    if total {
        for i in 0..n {
            for j in i + 1..n {
                out.push(vec![Literal::pos(v(i, j)), Literal::pos(v(j, i))]);
                out.push(vec![Literal::neg(v(i, j)), Literal::neg(v(j, i))]);
            }
        }
    }
    out
}

pub fn encode_op(n: u32, variant: OpVariant) -> Result<CnfFormula> {
    if n < 2 {
        return Err(Error::Param(format!("ordering principle needs n >= 2, got {n}")));
    }
    let tag = match variant {
        OpVariant::OpUnary => "op-un",
        OpVariant::LopUnary => "lop-un",
        OpVariant::OpBinary => "op-bin",
        OpVariant::OpUnaryFunctional => "op-fun",
        OpVariant::LopBinaryTc => "lop-bin-tc",
    };
    let mut f = CnfFormula::new(format!("{tag} n={n}"));
    match variant {
        OpVariant::OpUnary | OpVariant::LopUnary | OpVariant::OpUnaryFunctional => {
            let table: Vec<Vec<u32>> =
                (0..n).map(|x| (0..n).map(|y| f.var(VarDescriptor::unary(&[x, y]))).collect()).collect();
            let v = |x: u32, y: u32| table[x as usize][y as usize];
            for c in op_relational_clauses(n, &v, variant == OpVariant::LopUnary) {
                f.add_clause(c);
            }
            for row in &table {
                f.add_clause(row.iter().map(|&x| Literal::pos(x)));
            }
            if variant == OpVariant::OpUnaryFunctional {
                for row in &table {
                    for a in 0..row.len() {
                        for b in a + 1..row.len() {
                            f.add_clause([Literal::neg(row[a]), Literal::neg(row[b])]);
                        }
                    }
                }
            }
        }
        OpVariant::OpBinary => {
            let table: Vec<Vec<u32>> =
                (0..n).map(|x| (0..n).map(|y| f.var(VarDescriptor::atom(RELATION, &[x, y]))).collect()).collect();
            let r = bits_for(n);
            let w: Vec<Vec<u32>> = (0..n).map(|x| alloc_bits(&mut f, &[x], r)).collect();
            let v = |x: u32, y: u32| table[x as usize][y as usize];
            for c in op_relational_clauses(n, &v, false) {
                f.add_clause(c);
            }
            for x in 0..n {
                for a in 0..n {
                    let mut lits = pattern_excluded(&w[x as usize], a);
                    lits.push(Literal::pos(v(x, a)));
                    f.add_clause(lits);
                }
            }
            for bits in &w {
                add_exclusions(&mut f, bits, n);
            }
        }
        OpVariant::LopBinaryTc => {
            let r = bits_for(n);
            let w: Vec<Vec<u32>> = (0..n).map(|x| alloc_bits(&mut f, &[x], r)).collect();
            // Code the unary atoms as pairs, then expand each clause.
            let v = |x: u32, y: u32| 1 + x * n + y;
            for c in op_relational_clauses(n, &v, true) {
                let unary: Vec<(u32, u32, bool)> =
                    c.iter().map(|l| ((l.var - 1) / n, (l.var - 1) % n, l.positive)).collect();
                for clause in functional_expansion(&unary, &w) {
                    f.push_clause(clause);
                }
            }
            for bits in &w {
                add_exclusions(&mut f, bits, n);
            }
        }
    }
    Ok(f)
}

/// CNF of a clause over atoms `v(x,y)` where `v(x,y)` means "the bits of x
/// spell y": a negative atom becomes the excluded-pattern disjunction, a
/// positive atom the pattern conjunction, distributed over the rest.
pub fn functional_expansion(lits: &[(u32, u32, bool)], bits: &[Vec<u32>]) -> Vec<Clause> {
    let mut base = Vec::new();
    let mut conj: Vec<Vec<Literal>> = Vec::new();
    for &(x, y, positive) in lits {
        if positive {
            conj.push(pattern_lits(&bits[x as usize], y));
        } else {
            base.extend(pattern_excluded(&bits[x as usize], y));
        }
    }
    let mut acc = vec![base];
    for c in conj {
        let mut next = Vec::with_capacity(acc.len() * c.len());
        for partial in &acc {
            for &l in &c {
                let mut p = partial.clone();
                p.push(l);
                next.push(p);
            }
        }
        acc = next;
    }
    let mut out: Vec<Clause> = Vec::new();
    for lits in acc {
        let c = Clause::new(lits);
        if !c.is_tautology() && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_counts() {
        assert_eq!(bits_for(2), 1);
        assert_eq!(bits_for(3), 2);
        assert_eq!(bits_for(4), 2);
        assert_eq!(bits_for(5), 3);
    }

    #[test]
    fn php_unary_counts() {
        let f = encode_php(3, 2, PhpMode::Unary).unwrap();
        assert_eq!((f.num_vars, f.clauses.len()), (6, 9));
        let f = encode_php(3, 2, PhpMode::UnaryFunctional).unwrap();
        assert_eq!(f.clauses.len(), 12);
    }

    #[test]
    fn php_binary_small_instance() {
        let f = encode_php(3, 2, PhpMode::BinaryPairwise).unwrap();
        assert_eq!((f.num_vars, f.clauses.len()), (3, 6));
        assert!(f.clauses.iter().all(|c| c.len() == 2));
        assert!(encode_php(2, 2, PhpMode::Unary).is_err());
    }

    #[test]
    fn clique_edgeless_counts() {
        let g = MultipartiteGraph::empty(2, 2);
        let u = encode_clique(&g, CliqueMode::Unary);
        assert_eq!((u.num_vars, u.clauses.len()), (4, 6));
        let b = encode_clique(&g, CliqueMode::Binary);
        assert_eq!((b.num_vars, b.clauses.len()), (2, 4));
    }

    #[test]
    fn op_binary_witness_clauses() {
        let f = encode_op(4, OpVariant::OpBinary).unwrap();
        assert_eq!(f.num_vars, 24);
        let is_bit = |l: &Literal| matches!(f.name(l.var), Some(VarDescriptor::Bit { .. }));
        let witness: Vec<_> = f.clauses.iter().filter(|c| c.lits().iter().any(is_bit)).collect();
        assert_eq!(witness.len(), 16);
        assert!(witness.iter().all(|c| c.len() == 3));
    }

    #[test]
    fn lop_totality_count() {
        for n in 2..6u32 {
            let op = encode_op(n, OpVariant::OpUnary).unwrap();
            let lop = encode_op(n, OpVariant::LopUnary).unwrap();
            assert_eq!(lop.clauses.len() - op.clauses.len(), (n * (n - 1) / 2) as usize);
        }
    }

    #[test]
    fn functional_expansion_distributes() {
        let bits = vec![vec![1, 2], vec![3, 4]];
        // v(0,1) ∨ v(1,0): two conjunctions of two literals.
        assert_eq!(functional_expansion(&[(0, 1, true), (1, 0, true)], &bits).len(), 4);
        // ¬v(0,1) ∨ ¬v(1,0) is a single clause.
        assert_eq!(functional_expansion(&[(0, 1, false), (1, 0, false)], &bits).len(), 1);
    }
}
