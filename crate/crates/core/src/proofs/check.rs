use std::collections::BTreeSet;
use std::fmt;

use super::{BranchingProgram, NodeKind, Rule, RuleProof, SinkLabel};
use crate::cnf::CnfFormula;
use crate::error::Error;
use crate::logic::{Clause, Literal, Record, SClause, Term};

/// Index of the first offending step or node, with a reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckFailure {
    pub index: usize,
    pub reason: String,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}: {}", self.index, self.reason)
    }
}

impl From<CheckFailure> for Error {
    fn from(c: CheckFailure) -> Error {
        Error::Check(c.to_string())
    }
}

fn fail<T>(index: usize, reason: impl Into<String>) -> Result<T, CheckFailure> {
    Err(CheckFailure { index, reason: reason.into() })
}

fn terms(c: &SClause) -> BTreeSet<&Term> {
    c.terms().iter().collect()
}

/// True if `terms` are exactly the full sign patterns over one nonempty
/// set of at most `s` variables.
pub fn is_complete_pattern_set<'a>(lits: impl IntoIterator<Item = &'a [Literal]>, s: usize) -> bool {
    let items: Vec<&[Literal]> = lits.into_iter().collect();
    let Some(first) = items.first() else { return false };
    let vars: Vec<u32> = first.iter().map(|l| l.var).collect();
    let k = vars.len();
    if k == 0 || k > s || k >= 32 || items.len() != 1 << k {
        return false;
    }
    let mut seen = vec![false; 1 << k];
    for it in &items {
        if it.len() != k || it.iter().zip(&vars).any(|(l, &v)| l.var != v) {
            return false;
        }
        let mask = it.iter().enumerate().fold(0usize, |m, (i, l)| m | (l.positive as usize) << i);
        if seen[mask] {
            return false;
        }
        seen[mask] = true;
    }
    true
}

/// The full sign patterns over some variable set, if the record holds
/// all of them.
pub(crate) fn record_pattern_set(r: &Record, s: usize) -> Option<Vec<Clause>> {
    r.iter().find_map(|c| {
        let k = c.len();
        if k == 0 || k > s || k >= 32 || c.is_tautology() {
            return None;
        }
        let all: Vec<Clause> = (0..1usize << k)
            .map(|mask| Clause::new(c.lits().iter().enumerate().map(|(i, l)| Literal::new(l.var, mask >> i & 1 == 1))))
            .collect();
        all.iter().all(|p| r.contains(p)).then_some(all)
    })
}

/// The record clause a split node divides, if any fits both children.
pub(crate) fn split_source<'a>(p: &'a Record, sub: &Clause, t: &Record, f: &Record) -> Option<&'a Clause> {
    if sub.is_empty() {
        return None;
    }
    p.iter().filter(|d| sub.is_subset(d) && d.len() > sub.len()).find(|d| {
        let rest = d.minus(sub);
        split_child_ok(p, d, sub, t) && split_child_ok(p, d, &rest, f)
    })
}

fn check_and_intro(p1: &SClause, p2: &SClause, k: &SClause, s: usize) -> bool {
    let kt = terms(k);
    for t1 in p1.terms() {
        for t2 in p2.terms() {
            let t = t1.and(t2);
            if let Some(t) = &t {
                if t.len() > s || !kt.contains(t) {
                    continue;
                }
            }
            let rest1 = [p1.without(t1), p1.clone()];
            let rest2 = [p2.without(t2), p2.clone()];
            for d1 in &rest1 {
                for d2 in &rest2 {
                    let mut cand = d1.union(d2);
                    if let Some(t) = &t {
                        cand = cand.with(t.clone());
                    }
                    if &cand == k {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn check_cut(p1: &SClause, p2: &SClause, k: &SClause) -> bool {
    let kt = terms(k);
    let allowed: BTreeSet<&Term> = p1.terms().iter().chain(p2.terms()).collect();
    if !kt.iter().all(|t| allowed.contains(t)) {
        return false;
    }
    'pivot: for t in p2.terms() {
        if t.is_empty() {
            continue;
        }
        let mut units = BTreeSet::new();
        for l in t.lits() {
            let u = Term::unit(l.complement());
            if !p1.contains(&u) {
                continue 'pivot;
            }
            units.insert(u);
        }
        let need_p1 = p1.terms().iter().filter(|x| !units.contains(*x));
        let need_p2 = p2.terms().iter().filter(|x| *x != t);
        if need_p1.chain(need_p2).all(|x| kt.contains(x)) {
            return true;
        }
    }
    false
}

fn check_weak2(p: &SClause, k: &SClause) -> bool {
    let added: Vec<&Term> = k.terms().iter().filter(|t| !p.contains(t)).collect();
    let dropped: Vec<&Term> = p.terms().iter().filter(|t| !k.contains(t)).collect();
    match (added.as_slice(), dropped.as_slice()) {
        ([new], [old]) => new.is_subset(old),
        ([new], []) => p.terms().iter().any(|t| new.is_subset(t)),
        ([], [old]) => k.terms().iter().any(|t| t != *old && t.is_subset(old)),
        ([], []) => true,
        _ => false,
    }
}

/// Checks every step of a rule-based Res(s) refutation of `f`.
pub fn check_rule_proof(f: &CnfFormula, p: &RuleProof) -> Result<(), CheckFailure> {
    if p.steps.is_empty() {
        return fail(0, "proof has no steps");
    }
    for (i, step) in p.steps.iter().enumerate() {
        let line = &step.clause;
        if line.width() > p.s {
            return fail(i, format!("term of width {} exceeds s = {}", line.width(), p.s));
        }
        if line.max_var() > p.num_vars.max(f.num_vars) {
            return fail(i, "variable out of range");
        }
        for q in step.rule.premises() {
            if q >= i {
                return fail(i, format!("premise {q} does not precede the step"));
            }
        }
        let prem = |j: usize| &p.steps[j].clause;
        let ok = match step.rule {
            Rule::Axiom(a) => match f.clauses.get(a) {
                Some(c) => &c.to_sclause() == line,
                None => return fail(i, format!("no axiom {a}")),
            },
            Rule::ExcludedMiddle => is_complete_pattern_set(line.terms().iter().map(Term::lits), p.s),
            Rule::AndIntro(a, b) => check_and_intro(prem(a), prem(b), line, p.s),
            Rule::Cut(a, b) => check_cut(prem(a), prem(b), line),
            Rule::Weak1(a) => {
                let q = prem(a);
                let added: Vec<&Term> = line.terms().iter().filter(|t| !q.contains(t)).collect();
                added.len() == 1 && q.is_subset(line)
            }
            Rule::Weak2(a) => check_weak2(prem(a), line),
        };
        if !ok {
            return fail(i, format!("{:?} does not derive ( {line} )", step.rule));
        }
    }
    let last = p.steps.len() - 1;
    if !p.steps[last].clause.is_empty() {
        return fail(last, "final step is not the empty clause");
    }
    Ok(())
}

fn check_record(r: &Record, s: usize, v: usize) -> Result<(), CheckFailure> {
    for c in r {
        if c.is_empty() {
            return fail(v, "record contains the empty clause");
        }
        if c.len() > s {
            return fail(v, format!("record clause of width {} exceeds s = {s}", c.len()));
        }
        if c.is_tautology() {
            return fail(v, "record contains a tautology");
        }
    }
    Ok(())
}

fn with_clause(r: &Record, c: Clause) -> Record {
    let mut out = r.clone();
    out.insert(c);
    out
}

fn split_child_ok(p: &Record, d: &Clause, part: &Clause, child: &Record) -> bool {
    let kept = with_clause(p, part.clone());
    let mut replaced = kept.clone();
    replaced.remove(d);
    replaced.insert(part.clone());
    child == &kept || child == &replaced
}

/// Checks a branching s-program refuting `f`.
pub fn check_branching_program(f: &CnfFormula, bp: &BranchingProgram) -> Result<(), CheckFailure> {
    let s = bp.s;
    let Some(order) = bp.topological_order() else {
        return fail(bp.source, "program has a cycle or a dangling edge");
    };
    if order.len() != bp.nodes.len() {
        let mut seen = vec![false; bp.nodes.len()];
        for &v in &order {
            seen[v] = true;
        }
        let unreached = seen.iter().position(|x| !x).unwrap_or(0);
        return fail(unreached, "node not reachable from the source");
    }
    if !bp.nodes[bp.source].record.is_empty() {
        return fail(bp.source, "source record is not empty");
    }
    let parents = bp.parents();
    if !parents[bp.source].is_empty() {
        return fail(bp.source, "source has a parent");
    }
    for v in order {
        let node = &bp.nodes[v];
        let p = &node.record;
        check_record(p, s, v)?;
        let rec = |c: usize| &bp.nodes[c].record;
        match &node.kind {
            NodeKind::Query { disj, t, f: fc } => {
                if disj.is_empty() || disj.len() > s || disj.is_tautology() {
                    return fail(v, format!("query ( {disj} ) is not a clause of width 1..={s}"));
                }
                if rec(*t) != &with_clause(p, disj.clone()) {
                    return fail(v, "true child record is not the parent plus the query");
                }
                let mut neg = p.clone();
                neg.extend(disj.lits().iter().map(|l| Clause::unit(l.complement())));
                if rec(*fc) != &neg {
                    return fail(v, "false child record is not the parent plus the negated query");
                }
            }
            NodeKind::Split { sub, t, f: fc } => {
                let ok = split_source(p, sub, rec(*t), rec(*fc)).is_some();
                if !ok {
                    return fail(v, format!("split on ( {sub} ) matches no record clause"));
                }
            }
            NodeKind::Forget { child } => {
                for k in rec(*child) {
                    if !p.iter().any(|x| x.is_subset(k)) {
                        return fail(v, format!("forget child clause ( {k} ) weakens no parent clause"));
                    }
                }
            }
            NodeKind::Sink(SinkLabel::Axiom(a)) => {
                let Some(c) = f.clauses.get(*a) else {
                    return fail(v, format!("no axiom {a}"));
                };
                if let Some(l) = c.lits().iter().find(|l| !p.contains(&Clause::unit(l.complement()))) {
                    return fail(v, format!("sink record omits the negation of {l}"));
                }
            }
            NodeKind::Sink(SinkLabel::ExcludedMiddle) => {
                if record_pattern_set(p, s).is_none() {
                    return fail(v, "sink record contains no complete sign-pattern set");
                }
            }
        }
    }
    Ok(())
}
