use super::{group_bits, search_order, Out};
use crate::cnf::{CnfFormula, VarDescriptor};
use crate::error::{Error, Result};
use crate::graphs::bit_of;
use crate::logic::{Clause, Literal, Record};
use crate::proofs::{check_branching_program, BranchingProgram, NodeKind, SinkLabel};

enum Binary {
    /// Bit `pos` of the witness of `group`, among `width` bits.
    Bit { group: Vec<u32>, pos: u32, width: u32 },
    Atom(u32),
}

struct B2uf<'a> {
    binary: &'a CnfFormula,
    target: &'a CnfFormula,
    n: u32,
    out: Out<'a>,
}

impl<'a> B2uf<'a> {
    fn unary(&self, group: &[u32], b: u32) -> Result<u32> {
        let mut args = group.to_vec();
        args.push(b);
        self.target
            .lookup(&VarDescriptor::unary(&args))
            .ok_or_else(|| Error::Mapping(format!("target has no variable v{args:?}")))
    }

    fn classify(&self, v: u32) -> Result<Binary> {
        match self.binary.name(v) {
            Some(VarDescriptor::Bit { group, pos, .. }) => {
                Ok(Binary::Bit { group: group.clone(), pos: *pos, width: group_bits(self.binary, group).len() as u32 })
            }
            Some(VarDescriptor::Atom { args, .. }) => Ok(Binary::Atom(
                self.target
                    .lookup(&VarDescriptor::unary(args))
                    .ok_or_else(|| Error::Mapping(format!("target has no variable for atom {args:?}")))?,
            )),
            other => Err(Error::Mapping(format!("variable {v} ({other:?}) has no unary counterpart"))),
        }
    }

    fn image(&self, r: &Record) -> Result<Record> {
        let mut out = Record::new();
        for c in r {
            let [l] = c.lits() else {
                return Err(Error::Unsupported("record clause wider than one literal".into()));
            };
            match self.classify(l.var)? {
                Binary::Bit { group, pos, width } => {
                    for b in (0..self.n).filter(|&b| bit_of(b, pos, width) != l.positive) {
                        out.insert(Clause::unit(Literal::neg(self.unary(&group, b)?)));
                    }
                }
                Binary::Atom(x) => {
                    out.insert(Clause::unit(Literal::new(x, l.positive)));
                }
            }
        }
        Ok(out)
    }

    /// Asks the values of `group` until one is true, then rules out every
    /// value disagreeing with it on bit `pos`; merges into `t1`/`t0` by
    /// that bit.
    #[allow(clippy::too_many_arguments)]
    fn expand(&mut self, at: Option<usize>, rec: Record, vars: &[u32], pos: u32, width: u32, t1: usize, t0: usize) -> Result<usize> {
        let place = |me: &mut Self, rec: Record, kind: NodeKind| -> usize {
            let v = at.unwrap_or_else(|| me.out.b.alloc(rec));
            me.out.b.set(v, kind);
            v
        };
        if let Some(label) = super::find_sink(self.out.f, &rec, self.out.s) {
            return Ok(place(self, rec, NodeKind::Sink(label)));
        }
        let is = |x: u32, sign: bool| rec.contains(&Clause::unit(Literal::new(x, sign)));
        let unknown = |x: u32| !is(x, true) && !is(x, false);
        let ask = match vars.iter().position(|&x| is(x, true)) {
            None => vars.iter().copied().find(|&x| unknown(x)),
            Some(k) => {
                let bk = bit_of(k as u32, pos, width);
                let rest = (0..vars.len()).find(|&b| bit_of(b as u32, pos, width) != bk && unknown(vars[b]));
                match rest {
                    Some(b) => Some(vars[b]),
                    None => {
                        let target = if bk { t1 } else { t0 };
                        return Ok(match at {
                            Some(_) => place(self, rec, NodeKind::Forget { child: target }),
                            None => self.out.attach(rec, target),
                        });
                    }
                }
            }
        };
        let Some(x) = ask else {
            return Err(Error::Internal("value questions exhausted without a closing axiom".into()));
        };
        let mut rt = rec.clone();
        rt.insert(Clause::unit(Literal::pos(x)));
        let mut rf = rec.clone();
        rf.insert(Clause::unit(Literal::neg(x)));
        let t = self.expand(None, rt, vars, pos, width, t1, t0)?;
        let f = self.expand(None, rf, vars, pos, width, t1, t0)?;
        Ok(place(self, rec, NodeKind::Query { disj: Clause::unit(Literal::pos(x)), t, f }))
    }
}

/// Translates a Res(1) refutation of a binary encoding into one of the
/// unary functional encoding with `n` values per group: a question on a
/// witness bit becomes a search for the true value followed by ruling out
/// the values on the other side of that bit.
pub fn translate_binary_to_unary_functional(
    bp: &BranchingProgram,
    binary: &CnfFormula,
    target: &CnfFormula,
    n: u32,
) -> Result<BranchingProgram> {
    check_branching_program(binary, bp)?;
    if bp.s != 1 {
        return Err(Error::Unsupported(format!("input must be a Res(1) program, got s = {}", bp.s)));
    }
    let mut t = B2uf { binary, target, n, out: Out::new(target, 1) };
    let mut ids = Vec::with_capacity(bp.nodes.len());
    for node in &bp.nodes {
        let rec = t.image(&node.record)?;
        ids.push(t.out.b.alloc(rec));
    }
    for (u, node) in bp.nodes.iter().enumerate() {
        let v = ids[u];
        match &node.kind {
            NodeKind::Query { disj, t: tc, f: fc } => {
                let [l] = disj.lits() else {
                    return Err(Error::Unsupported("query wider than one literal".into()));
                };
                match t.classify(l.var)? {
                    Binary::Atom(x) => {
                        if !t.out.try_sink(v) {
                            let kind = NodeKind::Query { disj: Clause::unit(Literal::new(x, l.positive)), t: ids[*tc], f: ids[*fc] };
                            t.out.b.set(v, kind);
                        }
                    }
                    Binary::Bit { group, pos, width } => {
                        let vars: Vec<u32> = (0..n).map(|b| t.unary(&group, b)).collect::<Result<_>>()?;
                        let (t1, t0) = if l.positive { (ids[*tc], ids[*fc]) } else { (ids[*fc], ids[*tc]) };
                        let rec = t.out.record(v).clone();
                        t.expand(Some(v), rec, &vars, pos, width, t1, t0)?;
                    }
                }
            }
            NodeKind::Split { .. } => return Err(Error::Unsupported("split node in a Res(1) program".into())),
            NodeKind::Forget { child } => {
                if !t.out.try_sink(v) {
                    t.out.b.set(v, NodeKind::Forget { child: ids[*child] });
                }
            }
            NodeKind::Sink(label) => {
                let mut first = Vec::new();
                if let SinkLabel::Axiom(a) = label {
                    for l in binary.clauses[*a].lits() {
                        match t.classify(l.var)? {
                            Binary::Bit { group, .. } => {
                                for b in 0..n {
                                    first.push(t.unary(&group, b)?);
                                }
                            }
                            Binary::Atom(x) => first.push(x),
                        }
                    }
                }
                let mut seen = std::collections::HashSet::new();
                first.retain(|x| seen.insert(*x));
                let order = search_order(target, &first);
                t.out.close_by_search(v, &order)?;
            }
        }
    }
    let source = ids[bp.source];
    Ok(t.out.b.finish(1, target.num_vars, source))
}
