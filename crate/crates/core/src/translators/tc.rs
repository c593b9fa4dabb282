use super::{find_sink, search_order, unary_parts, Out};
use crate::encoders::{bits_for, encode_op, pattern_lits, OpVariant};
use crate::error::{Error, Result};
use crate::logic::{Clause, Literal, Record};
use crate::proofs::{check_branching_program, BranchingProgram, NodeKind, SinkLabel};
use crate::translators::group_bits;

/// How a leaf of the mini-tree for the question `v(i,j)` is settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafClass {
    /// Both `v(i,j)` and `v(j,i)` hold: closed by antisymmetry.
    Antisymmetry,
    /// Neither holds: closed by totality.
    Totality,
    /// Merged into the outcome `v(i,j)`.
    A,
    /// Merged into the outcome `v(j,i)`.
    B,
}

/// Leaf classes of the full mini-tree questioning the bits of `i` and then
/// of `j`, false branch first.
pub fn tc_minitree_leaves(n: u32, i: u32, j: u32) -> Result<Vec<LeafClass>> {
    if n < 2 || i >= n || j >= n || i == j {
        return Err(Error::Param(format!("need distinct i, j < n, got i={i} j={j} n={n}")));
    }
    let r = bits_for(n);
    let mut out = Vec::with_capacity(1 << (2 * r));
    for a in 0..1u32 << r {
        for b in 0..1u32 << r {
            out.push(match (a == j, b == i) {
                (true, true) => LeafClass::Antisymmetry,
                (false, false) => LeafClass::Totality,
                (true, false) => LeafClass::A,
                (false, true) => LeafClass::B,
            });
        }
    }
    Ok(out)
}

fn value(rec: &Record, bits: &[u32]) -> std::result::Result<u32, u32> {
    let mut a = 0;
    for &x in bits {
        if rec.contains(&Clause::unit(Literal::pos(x))) {
            a = a << 1 | 1;
        } else if rec.contains(&Clause::unit(Literal::neg(x))) {
            a <<= 1;
        } else {
            return Err(x);
        }
    }
    Ok(a)
}

struct Tc<'a> {
    out: Out<'a>,
    w: Vec<Vec<u32>>,
}

impl Tc<'_> {
    fn spell(&self, x: u32, y: u32) -> impl Iterator<Item = Clause> {
        pattern_lits(&self.w[x as usize], y).into_iter().map(Clause::unit)
    }

    /// Subtree for the question `v(i,j)` from record `rec`, merging into
    /// `tn` (it holds) or `fn_` (`v(j,i)` holds). `at` is a preallocated node.
    fn expand(&mut self, at: Option<usize>, rec: Record, i: u32, j: u32, tn: usize, fn_: usize) -> Result<usize> {
        let place = |me: &mut Self, rec: Record, kind: NodeKind| -> usize {
            let v = at.unwrap_or_else(|| me.out.b.alloc(rec));
            me.out.b.set(v, kind);
            v
        };
        if let Some(label) = find_sink(self.out.f, &rec, self.out.s) {
            return Ok(place(self, rec, NodeKind::Sink(label)));
        }
        let merge = |me: &mut Self, rec: Record, target: usize| -> usize {
            match at {
                Some(v) => {
                    me.out.b.set(v, NodeKind::Forget { child: target });
                    v
                }
                None => me.out.attach(rec, target),
            }
        };
        let a = match value(&rec, &self.w[i as usize]) {
            Err(x) => return self.branch(at, rec, x, i, j, tn, fn_),
            Ok(a) => a,
        };
        if a == j {
            return Ok(merge(self, rec, tn));
        }
        if i == j {
            return Ok(merge(self, rec, fn_));
        }
        match value(&rec, &self.w[j as usize]) {
            Err(x) => self.branch(at, rec, x, i, j, tn, fn_),
            Ok(b) if b == i => Ok(merge(self, rec, fn_)),
            Ok(_) => Err(Error::Internal(format!("mini-tree leaf for v({i},{j}) is neither closed nor classified"))),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn branch(&mut self, at: Option<usize>, rec: Record, x: u32, i: u32, j: u32, tn: usize, fn_: usize) -> Result<usize> {
        let mut rt = rec.clone();
        rt.insert(Clause::unit(Literal::pos(x)));
        let mut rf = rec.clone();
        rf.insert(Clause::unit(Literal::neg(x)));
        let t = self.expand(None, rt, i, j, tn, fn_)?;
        let f = self.expand(None, rf, i, j, tn, fn_)?;
        Ok(match at {
            Some(v) => {
                self.out.b.set(v, NodeKind::Query { disj: Clause::unit(Literal::pos(x)), t, f });
                v
            }
            None => self.out.query_node(rec, Literal::pos(x), t, f),
        })
    }
}

/// Translates a Res(1) refutation of the unary linear ordering principle
/// into one of its binary total-comparison encoding: each question
/// `v(i,j)` becomes a tree over the bits of i and j whose open leaves merge
/// into the outcomes `v(i,j)` and `v(j,i)`.
pub fn translate_tc_unary_to_binary(bp: &BranchingProgram, n: u32) -> Result<BranchingProgram> {
    let unary = encode_op(n, OpVariant::LopUnary)?;
    let binary = encode_op(n, OpVariant::LopBinaryTc)?;
    check_branching_program(&unary, bp)?;
    if bp.s != 1 {
        return Err(Error::Unsupported(format!("input must be a Res(1) program, got s = {}", bp.s)));
    }
    let w: Vec<Vec<u32>> = (0..n).map(|x| group_bits(&binary, &[x])).collect();
    let mut tc = Tc { out: Out::new(&binary, 1), w };
    let pair = |v: u32| -> Result<(u32, u32)> {
        let (g, a) = unary_parts(&unary, v)?;
        Ok((g[0], a))
    };
    let mut ids = Vec::with_capacity(bp.nodes.len());
    for node in &bp.nodes {
        let mut rec = Record::new();
        for c in &node.record {
            let [l] = c.lits() else {
                return Err(Error::Unsupported("record clause wider than one literal".into()));
            };
            let (x, y) = pair(l.var)?;
            if l.positive {
                rec.extend(tc.spell(x, y));
            } else if x != y {
                rec.extend(tc.spell(y, x));
            }
        }
        ids.push(tc.out.b.alloc(rec));
    }
    for (u, node) in bp.nodes.iter().enumerate() {
        let v = ids[u];
        match &node.kind {
            NodeKind::Query { disj, t, f } => {
                let [l] = disj.lits() else {
                    return Err(Error::Unsupported("query wider than one literal".into()));
                };
                let (i, j) = pair(l.var)?;
                let (tn, fn_) = if l.positive { (ids[*t], ids[*f]) } else { (ids[*f], ids[*t]) };
                let rec = tc.out.record(v).clone();
                tc.expand(Some(v), rec, i, j, tn, fn_)?;
            }
            NodeKind::Split { .. } => return Err(Error::Unsupported("split node in a Res(1) program".into())),
            NodeKind::Forget { child } => {
                if !tc.out.try_sink(v) {
                    tc.out.b.set(v, NodeKind::Forget { child: ids[*child] });
                }
            }
            NodeKind::Sink(label) => {
                let mut first = Vec::new();
                if let SinkLabel::Axiom(a) = label {
                    for l in unary.clauses[*a].lits() {
                        let (x, y) = pair(l.var)?;
                        for g in [x, y] {
                            first.extend(tc.w[g as usize].iter().copied());
                        }
                    }
                }
                first.dedup();
                let order = search_order(&binary, &first);
                tc.out.close_by_search(v, &order)?;
            }
        }
    }
    let source = ids[bp.source];
    Ok(tc.out.b.finish(1, binary.num_vars, source))
}
