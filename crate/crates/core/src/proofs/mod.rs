//! Res(s) refutations as rule-based step lists and as branching programs.

mod check;
mod dual;
mod stats;

pub(crate) use check::{record_pattern_set, split_source};
pub use check::{check_branching_program, check_rule_proof, is_complete_pattern_set, CheckFailure};
pub use dual::bp_to_rule_proof;
pub use stats::{proof_stats, Measured, ProofStats};

use crate::logic::{Clause, Record, SClause};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// The formula clause with this index, as a line of singleton terms.
    Axiom(usize),
    AndIntro(usize, usize),
    Cut(usize, usize),
    /// Adds one term.
    Weak1(usize),
    /// Replaces one term by a subterm.
    Weak2(usize),
    /// The disjunction of all full sign patterns over at most s variables.
    ExcludedMiddle,
}

impl Rule {
    pub fn premises(&self) -> Vec<usize> {
        match *self {
            Rule::Axiom(_) | Rule::ExcludedMiddle => Vec::new(),
            Rule::AndIntro(a, b) | Rule::Cut(a, b) => vec![a, b],
            Rule::Weak1(a) | Rule::Weak2(a) => vec![a],
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Rule::Axiom(_) | Rule::ExcludedMiddle)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub clause: SClause,
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleProof {
    pub s: usize,
    pub num_vars: u32,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SinkLabel {
    Axiom(usize),
    /// The record contains every full sign pattern over one variable set.
    ExcludedMiddle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    /// Query a new disjunction: `t` learns it, `f` learns its negation.
    Query { disj: Clause, t: usize, f: usize },
    /// Split a known disjunction `D` into `sub` (`t`) and `D \ sub` (`f`).
    Split { sub: Clause, t: usize, f: usize },
    Forget { child: usize },
    Sink(SinkLabel),
}

impl NodeKind {
    pub fn children(&self) -> Vec<usize> {
        match *self {
            NodeKind::Query { t, f, .. } | NodeKind::Split { t, f, .. } => vec![t, f],
            NodeKind::Forget { child } => vec![child],
            NodeKind::Sink(_) => Vec::new(),
        }
    }

    pub fn is_sink(&self) -> bool {
        matches!(self, NodeKind::Sink(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpNode {
    pub record: Record,
    pub kind: NodeKind,
}

/// A branching s-program: a DAG of records from the empty record at
/// `source` down to sinks refuting axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchingProgram {
    pub s: usize,
    pub num_vars: u32,
    pub source: usize,
    pub nodes: Vec<BpNode>,
}

impl BranchingProgram {
    pub fn parents(&self) -> Vec<Vec<usize>> {
        let mut p = vec![Vec::new(); self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            for c in n.kind.children() {
                if c < p.len() {
                    p[c].push(i);
                }
            }
        }
        p
    }

    /// Nodes reachable from the source, children after parents; `None` on a
    /// cycle or a dangling child index.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.nodes.len();
        if self.source >= n {
            return None;
        }
        let mut state = vec![0u8; n];
        let mut post = Vec::with_capacity(n);
        let mut stack: Vec<(usize, usize)> = vec![(self.source, 0)];
        state[self.source] = 1;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            let children = self.nodes[v].kind.children();
            if *i < children.len() {
                let c = children[*i];
                *i += 1;
                if c >= n || state[c] == 1 {
                    return None;
                }
                if state[c] == 0 {
                    state[c] = 1;
                    stack.push((c, 0));
                }
            } else {
                state[v] = 2;
                post.push(v);
                stack.pop();
            }
        }
        post.reverse();
        Some(post)
    }

    /// Drops nodes unreachable from the source and renumbers in
    /// topological order (source first).
    pub fn compact(&self) -> BranchingProgram {
        let order = self.topological_order().expect("acyclic program");
        let mut new_id = vec![usize::MAX; self.nodes.len()];
        for (i, &v) in order.iter().enumerate() {
            new_id[v] = i;
        }
        let nodes = order
            .iter()
            .map(|&v| {
                let n = &self.nodes[v];
                let kind = match &n.kind {
                    NodeKind::Query { disj, t, f } => NodeKind::Query { disj: disj.clone(), t: new_id[*t], f: new_id[*f] },
                    NodeKind::Split { sub, t, f } => NodeKind::Split { sub: sub.clone(), t: new_id[*t], f: new_id[*f] },
                    NodeKind::Forget { child } => NodeKind::Forget { child: new_id[*child] },
                    NodeKind::Sink(l) => NodeKind::Sink(*l),
                };
                BpNode { record: n.record.clone(), kind }
            })
            .collect();
        BranchingProgram { s: self.s, num_vars: self.num_vars, source: 0, nodes }
    }

    /// Number of internal (non-sink) nodes.
    pub fn size(&self) -> usize {
        self.nodes.iter().filter(|n| !n.kind.is_sink()).count()
    }
}

/// Incremental construction of a program; nodes are allocated first and
/// given their kind once their children exist.
#[derive(Debug, Default)]
pub struct BpBuilder {
    pub records: Vec<Record>,
    pub kinds: Vec<Option<NodeKind>>,
}

impl BpBuilder {
    pub fn new() -> BpBuilder {
        BpBuilder::default()
    }

    pub fn alloc(&mut self, record: Record) -> usize {
        self.records.push(record);
        self.kinds.push(None);
        self.records.len() - 1
    }

    pub fn set(&mut self, id: usize, kind: NodeKind) {
        debug_assert!(self.kinds[id].is_none(), "node {id} set twice");
        self.kinds[id] = Some(kind);
    }

    pub fn record(&self, id: usize) -> &Record {
        &self.records[id]
    }

    pub fn finish(self, s: usize, num_vars: u32, source: usize) -> BranchingProgram {
        let nodes = self
            .records
            .into_iter()
            .zip(self.kinds)
            .enumerate()
            .map(|(i, (record, kind))| BpNode { record, kind: kind.unwrap_or_else(|| panic!("node {i} left open")) })
            .collect();
        BranchingProgram { s, num_vars, source, nodes }.compact()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{CnfFormula, VarDescriptor};
    use crate::logic::{Literal, Term};

    fn units() -> CnfFormula {
        let mut f = CnfFormula::new("units");
        let x = f.var(VarDescriptor::unary(&[1]));
        f.add_clause([Literal::pos(x)]);
        f.add_clause([Literal::neg(x)]);
        f
    }

    fn record(cs: &[&[i64]]) -> Record {
        cs.iter().map(|c| Clause::new(c.iter().map(|&x| Literal::from_dimacs(x).unwrap()))).collect()
    }

    fn two_leaf() -> BranchingProgram {
        let nodes = vec![
            BpNode { record: Record::new(), kind: NodeKind::Query { disj: Clause::unit(Literal::pos(1)), t: 1, f: 2 } },
            BpNode { record: record(&[&[1]]), kind: NodeKind::Sink(SinkLabel::Axiom(1)) },
            BpNode { record: record(&[&[-1]]), kind: NodeKind::Sink(SinkLabel::Axiom(0)) },
        ];
        BranchingProgram { s: 1, num_vars: 1, source: 0, nodes }
    }

    fn line(terms: &[&[i64]]) -> SClause {
        SClause::new(terms.iter().map(|t| Term::new(t.iter().map(|&x| Literal::from_dimacs(x).unwrap())).unwrap()))
    }

    #[test]
    fn unit_cut_refutation_checks() {
        let f = units();
        let p = RuleProof {
            s: 1,
            num_vars: 1,
            steps: vec![
                Step { clause: line(&[&[1]]), rule: Rule::Axiom(0) },
                Step { clause: line(&[&[-1]]), rule: Rule::Axiom(1) },
                Step { clause: SClause::empty(), rule: Rule::Cut(0, 1) },
            ],
        };
        assert_eq!(check_rule_proof(&f, &p), Ok(()));
        assert_eq!(proof_stats(&p).size, 1);
    }

    #[test]
    fn and_intro_past_width_is_rejected() {
        let mut f = CnfFormula::new("t");
        let x = f.var(VarDescriptor::unary(&[1]));
        let y = f.var(VarDescriptor::unary(&[2]));
        f.add_clause([Literal::pos(x)]);
        f.add_clause([Literal::pos(y)]);
        let p = RuleProof {
            s: 1,
            num_vars: 2,
            steps: vec![
                Step { clause: line(&[&[1]]), rule: Rule::Axiom(0) },
                Step { clause: line(&[&[2]]), rule: Rule::Axiom(1) },
                Step { clause: line(&[&[1, 2]]), rule: Rule::AndIntro(0, 1) },
            ],
        };
        let err = check_rule_proof(&f, &p).unwrap_err();
        assert_eq!(err.index, 2);
        assert!(err.reason.contains("width"));
    }

    #[test]
    fn two_leaf_tree_checks_and_dualises() {
        let f = units();
        let bp = two_leaf();
        assert_eq!(check_branching_program(&f, &bp), Ok(()));
        let p = bp_to_rule_proof(&f, &bp).unwrap();
        assert_eq!(check_rule_proof(&f, &p), Ok(()));
        assert_eq!(p.steps.len(), 3);
        let st = proof_stats(&bp);
        assert_eq!((st.size, st.treelike, st.depth), (1, true, 1));
    }

    #[test]
    fn sink_missing_conjunct_is_rejected() {
        let mut f = CnfFormula::new("t");
        let x = f.var(VarDescriptor::unary(&[1]));
        let y = f.var(VarDescriptor::unary(&[2]));
        f.add_clause([Literal::pos(x), Literal::pos(y)]);
        let bp = BranchingProgram {
            s: 1,
            num_vars: 2,
            source: 0,
            nodes: vec![
                BpNode { record: Record::new(), kind: NodeKind::Query { disj: Clause::unit(Literal::pos(1)), t: 1, f: 2 } },
                BpNode { record: record(&[&[1]]), kind: NodeKind::Sink(SinkLabel::Axiom(0)) },
                BpNode { record: record(&[&[-1]]), kind: NodeKind::Sink(SinkLabel::Axiom(0)) },
            ],
        };
        let err = check_branching_program(&f, &bp).unwrap_err();
        assert!(err.reason.contains("omits"));
    }

    #[test]
    fn split_forget_and_pattern_sink_dualise() {
        let mut f = CnfFormula::new("t");
        let x = f.var(VarDescriptor::unary(&[1]));
        let y = f.var(VarDescriptor::unary(&[2]));
        f.add_clause([Literal::neg(x)]);
        f.add_clause([Literal::neg(y)]);
        f.add_clause([Literal::pos(x), Literal::pos(y)]);
        let c = |xs: &[i64]| Clause::new(xs.iter().map(|&v| Literal::from_dimacs(v).unwrap()));
        let mut b = BpBuilder::new();
        let src = b.alloc(Record::new());
        let t = b.alloc(record(&[&[1, 2]]));
        let s1 = b.alloc(record(&[&[1, 2], &[1]]));
        let s2 = b.alloc(record(&[&[1, 2], &[2]]));
        let fl = b.alloc(record(&[&[-1], &[-2]]));
        let fg = b.alloc(record(&[&[-1, 2], &[-1, -2]]));
        let q1 = b.alloc(record(&[&[-1, 2], &[-1, -2], &[1, -2]]));
        let em = b.alloc(record(&[&[-1, 2], &[-1, -2], &[1, -2], &[1, 2]]));
        let ax2 = b.alloc(record(&[&[-1, 2], &[-1, -2], &[1, -2], &[-1], &[-2]]));
        let ax1 = b.alloc(record(&[&[-1, 2], &[-1, -2], &[-1], &[2]]));
        b.set(src, NodeKind::Query { disj: c(&[1, 2]), t, f: fl });
        b.set(t, NodeKind::Split { sub: c(&[1]), t: s1, f: s2 });
        b.set(s1, NodeKind::Sink(SinkLabel::Axiom(0)));
        b.set(s2, NodeKind::Sink(SinkLabel::Axiom(1)));
        b.set(fl, NodeKind::Forget { child: fg });
        b.set(fg, NodeKind::Query { disj: c(&[1, -2]), t: q1, f: ax1 });
        b.set(q1, NodeKind::Query { disj: c(&[1, 2]), t: em, f: ax2 });
        b.set(em, NodeKind::Sink(SinkLabel::ExcludedMiddle));
        b.set(ax2, NodeKind::Sink(SinkLabel::Axiom(2)));
        b.set(ax1, NodeKind::Sink(SinkLabel::Axiom(1)));
        let bp = b.finish(2, 2, src);
        assert_eq!(check_branching_program(&f, &bp), Ok(()));
        let p = bp_to_rule_proof(&f, &bp).unwrap();
        assert_eq!(check_rule_proof(&f, &p), Ok(()));
        assert!(p.steps.iter().any(|s| s.rule == Rule::ExcludedMiddle));

        let mut broken = bp.clone();
        let last = broken.nodes.iter().position(|n| n.kind == NodeKind::Sink(SinkLabel::ExcludedMiddle)).unwrap();
        broken.nodes[last].kind = NodeKind::Sink(SinkLabel::Axiom(0));
        assert!(check_branching_program(&f, &broken).is_err());
    }
}
