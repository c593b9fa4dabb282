use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::cnf::CnfFormula;
use crate::covering::{min_cover, record_covering_number};
use crate::error::{Error, Result};
use crate::logic::{Clause, Literal, Record};
use crate::proofs::{check_branching_program, split_source, BpBuilder, BranchingProgram, NodeKind, SinkLabel};

type Assign = BTreeMap<u32, bool>;

/// Variables of a minimum covering set of the clauses wider than `k`.
pub fn wide_cover(r: &Record, k: usize) -> Vec<u32> {
    let terms: Vec<Vec<Literal>> =
        r.iter().filter(|c| c.len() > k).map(|c| c.lits().iter().map(|l| l.complement()).collect()).collect();
    let mut vars: Vec<u32> = min_cover(&terms).1.iter().map(|l| l.var).collect();
    vars.sort_unstable();
    vars.dedup();
    vars
}

/// `None` if `sigma` satisfies `c`, else the literals it leaves open.
fn restrict(c: &Clause, sigma: &Assign) -> Option<Clause> {
    let mut keep = Vec::new();
    for &l in c.lits() {
        match sigma.get(&l.var) {
            Some(&b) if b == l.positive => return None,
            Some(_) => {}
            None => keep.push(l),
        }
    }
    Some(Clause::new(keep))
}

/// The record of the state: the assignment as units plus every clause
/// narrowed by it; `None` if it falsifies a clause.
fn state_record(r: &Record, sigma: &Assign) -> Option<Record> {
    let mut out: Record = sigma.iter().map(|(&v, &b)| Clause::unit(Literal::new(v, b))).collect();
    for c in r {
        if let Some(c) = restrict(c, sigma) {
            if c.is_empty() {
                return None;
            }
            out.insert(c);
        }
    }
    Some(out)
}

fn falsified(x: &Clause, r: &Record) -> bool {
    x.lits().iter().all(|l| r.contains(&Clause::unit(l.complement())))
}

#[derive(Clone)]
enum Goal {
    Query { disj: Clause, t: usize, f: usize },
    Split { d: Clause, sub: Clause, t: usize, f: usize },
    Forget(usize),
}

struct Reducer<'a> {
    bp: &'a BranchingProgram,
    k: usize,
    cover: Vec<Vec<u32>>,
    b: BpBuilder,
    states: HashMap<(usize, Vec<(u32, bool)>), usize>,
    queue: VecDeque<(usize, usize, Assign)>,
}

impl Reducer<'_> {
    fn restrict_to_cover(&self, w: usize, sigma: &Assign) -> Assign {
        self.cover[w].iter().filter_map(|v| sigma.get(v).map(|&b| (*v, b))).collect()
    }

    fn target_record(&self, w: usize, sigma: &Assign) -> Option<Record> {
        state_record(&self.bp.nodes[w].record, &self.restrict_to_cover(w, sigma))
    }

    fn state(&mut self, w: usize, sigma: &Assign) -> Result<usize> {
        let sw = self.restrict_to_cover(w, sigma);
        let key = (w, sw.iter().map(|(&v, &b)| (v, b)).collect::<Vec<_>>());
        if let Some(&id) = self.states.get(&key) {
            return Ok(id);
        }
        let rec = state_record(&self.bp.nodes[w].record, &sw)
            .ok_or_else(|| Error::Internal(format!("state of node {w} falsifies a record clause")))?;
        let id = self.b.alloc(rec);
        self.states.insert(key, id);
        self.queue.push_back((w, id, sw));
        Ok(id)
    }

    fn process(&mut self, w: usize, o: usize, sigma: Assign) -> Result<()> {
        let node = &self.bp.nodes[w];
        let goal = match &node.kind {
            NodeKind::Sink(label) => {
                self.b.set(o, NodeKind::Sink(*label));
                return Ok(());
            }
            NodeKind::Query { disj, t, f } => Goal::Query { disj: disj.clone(), t: *t, f: *f },
            NodeKind::Split { sub, t, f } => {
                let d = split_source(&node.record, sub, &self.bp.nodes[*t].record, &self.bp.nodes[*f].record)
                    .ok_or_else(|| Error::Internal(format!("split at {w} has no source clause")))?;
                Goal::Split { d: d.clone(), sub: sub.clone(), t: *t, f: *f }
            }
            NodeKind::Forget { child } => Goal::Forget(*child),
        };
        self.run(o, &sigma, &sigma, &goal)
    }

    fn early_close(&mut self, o: usize) -> bool {
        let x = self.b.record(o).iter().find(|c| falsified(c, self.b.record(o))).cloned();
        match x {
            Some(c) => {
                self.close_falsified(o, &c);
                true
            }
            None => false,
        }
    }

    /// Refutes a record holding `c` together with the negation of each of
    /// its literals, splitting `c` into units closed by excluded middle.
    fn close_falsified(&mut self, o: usize, c: &Clause) {
        if c.len() == 1 {
            self.b.set(o, NodeKind::Sink(SinkLabel::ExcludedMiddle));
            return;
        }
        let x = self.b.record(o).clone();
        if let Some(&l) = c.lits().iter().find(|l| x.contains(&Clause::unit(**l))) {
            let _ = l;
            self.b.set(o, NodeKind::Sink(SinkLabel::ExcludedMiddle));
            return;
        }
        let head = Clause::unit(c.lits()[0]);
        let tail = c.minus(&head);
        let mut rt = x.clone();
        rt.insert(head.clone());
        let mut rf = x;
        rf.insert(tail.clone());
        let t = self.b.alloc(rt);
        self.b.set(t, NodeKind::Sink(SinkLabel::ExcludedMiddle));
        let f = self.b.alloc(rf);
        self.close_falsified(f, &tail);
        self.b.set(o, NodeKind::Split { sub: head, t, f });
    }

    fn run(&mut self, o: usize, sigma: &Assign, base: &Assign, goal: &Goal) -> Result<()> {
        if self.early_close(o) {
            return Ok(());
        }
        let needed: Vec<u32> = match goal {
            Goal::Query { t, f, .. } | Goal::Split { t, f, .. } => {
                self.cover[*t].iter().chain(&self.cover[*f]).copied().collect()
            }
            Goal::Forget(c) => self.cover[*c].clone(),
        };
        if let Some(x) = needed.into_iter().find(|v| !sigma.contains_key(v)) {
            let rec = self.b.record(o).clone();
            let mut ids = [0usize; 2];
            for (i, value) in [true, false].into_iter().enumerate() {
                let mut r = rec.clone();
                r.insert(Clause::unit(Literal::new(x, value)));
                let child = self.b.alloc(r);
                let mut s = sigma.clone();
                s.insert(x, value);
                self.run(child, &s, base, goal)?;
                ids[i] = child;
            }
            self.b.set(o, NodeKind::Query { disj: Clause::unit(Literal::pos(x)), t: ids[0], f: ids[1] });
            return Ok(());
        }
        let x = self.b.record(o).clone();
        match goal {
            Goal::Forget(c) => self.link(o, sigma, *c),
            Goal::Query { disj, t, f } => {
                let Some(d) = restrict(disj, sigma) else { return self.link(o, sigma, *t) };
                if d.is_empty() {
                    return self.link(o, sigma, *f);
                }
                if d.len() > self.k {
                    return Err(Error::Internal(format!("query ( {d} ) still wider than {}", self.k)));
                }
                let mut rt = x.clone();
                rt.insert(d.clone());
                let mut rf = x;
                rf.extend(d.lits().iter().map(|l| Clause::unit(l.complement())));
                let mut sf = sigma.clone();
                for l in d.lits() {
                    sf.insert(l.var, !l.positive);
                }
                let tn = self.child(vec![rt], *t, sigma)?;
                let fn_ = self.child(vec![rf], *f, &sf)?;
                self.b.set(o, NodeKind::Query { disj: d, t: tn, f: fn_ });
                Ok(())
            }
            Goal::Split { d, sub, t, f } => {
                let rest = d.minus(sub);
                if let Some(l) = d.lits().iter().find(|l| sigma.get(&l.var) == Some(&l.positive)) {
                    return self.link(o, sigma, if sub.contains(*l) { *t } else { *f });
                }
                let c0 = restrict(d, base).ok_or_else(|| Error::Internal("split clause satisfied at state".into()))?;
                let s1 = Clause::new(c0.lits().iter().copied().filter(|l| sub.contains(*l)));
                let s2 = Clause::new(c0.lits().iter().copied().filter(|l| rest.contains(*l)));
                if s1.is_empty() {
                    return self.link(o, sigma, *f);
                }
                if s2.is_empty() {
                    return self.link(o, sigma, *t);
                }
                let readings = |part: &Clause| {
                    let mut keep = x.clone();
                    keep.insert(part.clone());
                    let mut replace = keep.clone();
                    replace.remove(&c0);
                    replace.insert(part.clone());
                    vec![keep, replace]
                };
                let tn = self.child(readings(&s1), *t, sigma)?;
                let fn_ = self.child(readings(&s2), *f, sigma)?;
                self.b.set(o, NodeKind::Split { sub: s1, t: tn, f: fn_ });
                Ok(())
            }
        }
    }

    /// A child node for one of the candidate records: the target state when
    /// one of them matches it, else a fresh node linked to it.
    fn child(&mut self, candidates: Vec<Record>, w: usize, sigma: &Assign) -> Result<usize> {
        if let Some(k) = self.target_record(w, sigma) {
            if candidates.contains(&k) {
                return self.state(w, sigma);
            }
        }
        let c = self.b.alloc(candidates.into_iter().next().expect("one candidate"));
        self.link(c, sigma, w)?;
        Ok(c)
    }

    /// Moves from node `o` to the state of input node `w` under `sigma`,
    /// narrowing clauses by falsified literals where a forget alone cannot.
    fn link(&mut self, mut o: usize, sigma: &Assign, w: usize) -> Result<()> {
        if self.early_close(o) {
            return Ok(());
        }
        if self.target_record(w, sigma).is_none() {
            return Err(Error::Internal(format!("node {w} is contradicted but no record clause is falsified")));
        }
        let tn = self.state(w, sigma)?;
        let k = self.b.record(tn).clone();
        loop {
            let x = self.b.record(o).clone();
            let Some(kappa) = k.iter().find(|kap| !x.iter().any(|c| c.is_subset(kap))) else {
                self.b.set(o, NodeKind::Forget { child: tn });
                return Ok(());
            };
            let open = |c: &Clause| Clause::new(c.lits().iter().copied().filter(|l| !x.contains(&Clause::unit(l.complement()))));
            let Some(c) = x.iter().find(|c| open(c).is_subset(kappa)).cloned() else {
                return Err(Error::Internal(format!("no record clause narrows to ( {kappa} )")));
            };
            let keep = Clause::new(c.lits().iter().copied().filter(|l| kappa.contains(*l)));
            if keep.is_empty() {
                self.close_falsified(o, &c);
                return Ok(());
            }
            let drop = c.minus(&keep);
            let mut rt = x.clone();
            rt.remove(&c);
            rt.insert(keep.clone());
            let mut rf = x;
            rf.insert(drop.clone());
            let f = self.b.alloc(rf);
            self.close_falsified(f, &drop);
            if rt == k {
                self.b.set(o, NodeKind::Split { sub: keep, t: tn, f });
                return Ok(());
            }
            let t = self.b.alloc(rt);
            self.b.set(o, NodeKind::Split { sub: keep, t, f });
            o = t;
        }
    }
}

/// Turns a Res(k+1) program whose records have covering number at most `d`
/// into a Res(k) program: each record is replaced by the states reached by
/// questioning the variables of a minimum cover of its wide clauses.
pub fn reduce_res_level(f: &CnfFormula, bp: &BranchingProgram, d: usize) -> Result<BranchingProgram> {
    check_branching_program(f, bp)?;
    if bp.s < 2 {
        return Err(Error::Param("cannot lower a Res(1) program".into()));
    }
    for (i, n) in bp.nodes.iter().enumerate() {
        let (c, _) = record_covering_number(&n.record);
        if c > d {
            return Err(Error::Precondition(format!("record of node {i} has covering number {c} > {d}")));
        }
    }
    let k = bp.s - 1;
    let cover = bp.nodes.iter().map(|n| wide_cover(&n.record, k)).collect();
    let mut r = Reducer { bp, k, cover, b: BpBuilder::new(), states: HashMap::new(), queue: VecDeque::new() };
    let source = r.state(bp.source, &Assign::new())?;
    while let Some((w, o, sigma)) = r.queue.pop_front() {
        r.process(w, o, sigma)?;
    }
    Ok(r.b.finish(k, bp.num_vars, source))
}
