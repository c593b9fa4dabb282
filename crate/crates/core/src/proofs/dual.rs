use std::collections::HashMap;

use super::check::{check_branching_program, record_pattern_set, split_source};
use super::{BranchingProgram, NodeKind, Rule, RuleProof, SinkLabel, Step};
use crate::cnf::CnfFormula;
use crate::error::{Error, Result};
use crate::logic::{Clause, Literal, SClause, Term};

struct Lines {
    steps: Vec<Step>,
    index: HashMap<SClause, usize>,
}

impl Lines {
    fn push(&mut self, rule: Rule, clause: SClause) -> usize {
        if let Some(&i) = self.index.get(&clause) {
            return i;
        }
        self.steps.push(Step { clause: clause.clone(), rule });
        self.index.insert(clause, self.steps.len() - 1);
        self.steps.len() - 1
    }

    fn clause(&self, i: usize) -> &SClause {
        &self.steps[i].clause
    }
}

fn neg(c: &Clause) -> Term {
    c.negation().expect("records hold no tautologies")
}

/// Builds a rule-based refutation whose line at each node is contained in
/// the negation of that node's record; the source line is the empty clause.
pub fn bp_to_rule_proof(f: &CnfFormula, bp: &BranchingProgram) -> Result<RuleProof> {
    check_branching_program(f, bp)?;
    let order = bp.topological_order().expect("checked program is acyclic");
    let mut lines = Lines { steps: Vec::new(), index: HashMap::new() };
    let mut line_of = vec![usize::MAX; bp.nodes.len()];
    for &v in order.iter().rev() {
        let node = &bp.nodes[v];
        let p = &node.record;
        line_of[v] = match &node.kind {
            NodeKind::Sink(SinkLabel::Axiom(a)) => lines.push(Rule::Axiom(*a), f.clauses[*a].to_sclause()),
            NodeKind::Sink(SinkLabel::ExcludedMiddle) => {
                let patterns = record_pattern_set(p, bp.s).expect("checked sink");
                lines.push(Rule::ExcludedMiddle, SClause::new(patterns.iter().map(neg)))
            }
            NodeKind::Query { disj, t, f: fc } => {
                let (lt, lf) = (line_of[*t], line_of[*fc]);
                let neg_d = neg(disj);
                let present: Vec<Literal> =
                    disj.lits().iter().copied().filter(|&l| lines.clause(lf).contains(&Term::unit(l))).collect();
                if !lines.clause(lt).contains(&neg_d) {
                    lt
                } else if present.is_empty() {
                    lf
                } else {
                    let (p2, pivot) = if present.len() < disj.len() {
                        let shrunk = Term::new(present.iter().map(|l| l.complement())).expect("consistent");
                        let c = lines.clause(lt).without(&neg_d).with(shrunk.clone());
                        (lines.push(Rule::Weak2(lt), c), shrunk)
                    } else {
                        (lt, neg_d)
                    };
                    let mut k = lines.clause(p2).without(&pivot);
                    for t in lines.clause(lf).terms() {
                        if !(t.len() == 1 && present.contains(&t.lits()[0])) {
                            k = k.with(t.clone());
                        }
                    }
                    lines.push(Rule::Cut(lf, p2), k)
                }
            }
            NodeKind::Split { sub, t, f: fc } => {
                let d = split_source(p, sub, &bp.nodes[*t].record, &bp.nodes[*fc].record).expect("checked split");
                let (lt, lf) = (line_of[*t], line_of[*fc]);
                let (t1, t2) = (neg(sub), neg(&d.minus(sub)));
                if !lines.clause(lt).contains(&t1) {
                    lt
                } else if !lines.clause(lf).contains(&t2) {
                    lf
                } else {
                    let k = lines.clause(lt).without(&t1).union(&lines.clause(lf).without(&t2)).with(neg(d));
                    lines.push(Rule::AndIntro(lt, lf), k)
                }
            }
            NodeKind::Forget { child } => {
                let mut cur = line_of[*child];
                let terms: Vec<Term> = lines.clause(cur).terms().to_vec();
                for x in terms {
                    let kappa = x.negation();
                    if p.contains(&kappa) {
                        continue;
                    }
                    let y = p.iter().find(|y| y.is_subset(&kappa)).expect("checked forget");
                    let next = lines.clause(cur).without(&x).with(neg(y));
                    cur = lines.push(Rule::Weak2(cur), next);
                }
                cur
            }
        };
    }
    let root = line_of[bp.source];
    if !lines.clause(root).is_empty() {
        return Err(Error::Internal("source line is not the empty clause".into()));
    }
    Ok(RuleProof { s: bp.s, num_vars: bp.num_vars.max(f.num_vars), steps: prune(&lines.steps, root) })
}

/// Keeps only the steps the final one depends on, renumbered in order.
fn prune(steps: &[Step], last: usize) -> Vec<Step> {
    let mut used = vec![false; last + 1];
    used[last] = true;
    for i in (0..=last).rev() {
        if used[i] {
            for q in steps[i].rule.premises() {
                used[q] = true;
            }
        }
    }
    let mut new_id = vec![usize::MAX; last + 1];
    let mut out = Vec::new();
    for i in 0..=last {
        if !used[i] {
            continue;
        }
        let m = |q: usize| new_id[q];
        let rule = match steps[i].rule {
            Rule::AndIntro(a, b) => Rule::AndIntro(m(a), m(b)),
            Rule::Cut(a, b) => Rule::Cut(m(a), m(b)),
            Rule::Weak1(a) => Rule::Weak1(m(a)),
            Rule::Weak2(a) => Rule::Weak2(m(a)),
            r => r,
        };
        new_id[i] = out.len();
        out.push(Step { clause: steps[i].clause.clone(), rule });
    }
    out
}
