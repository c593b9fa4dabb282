use super::{BranchingProgram, RuleProof};
use crate::covering::{covering_number, record_covering_number};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProofStats {
    /// Internal nodes, or non-leaf steps.
    pub size: usize,
    pub max_width: usize,
    pub max_covering: usize,
    pub treelike: bool,
    /// Longest root-to-leaf path, counted in edges.
    pub depth: usize,
}

pub trait Measured {
    fn stats(&self) -> ProofStats;
}

pub fn proof_stats<P: Measured>(p: &P) -> ProofStats {
    p.stats()
}

impl Measured for BranchingProgram {
    fn stats(&self) -> ProofStats {
        let parents = self.parents();
        let mut depth = vec![0usize; self.nodes.len()];
        if let Some(order) = self.topological_order() {
            for &v in order.iter().rev() {
                depth[v] = self.nodes[v].kind.children().iter().map(|&c| depth[c] + 1).max().unwrap_or(0);
            }
        }
        ProofStats {
            size: self.size(),
            max_width: self.nodes.iter().flat_map(|n| n.record.iter()).map(|c| c.len()).max().unwrap_or(0),
            max_covering: self.nodes.iter().map(|n| record_covering_number(&n.record).0).max().unwrap_or(0),
            treelike: parents.iter().all(|p| p.len() <= 1),
            depth: depth.get(self.source).copied().unwrap_or(0),
        }
    }
}

impl Measured for RuleProof {
    fn stats(&self) -> ProofStats {
        let mut uses = vec![0usize; self.steps.len()];
        let mut depth = vec![0usize; self.steps.len()];
        for (i, s) in self.steps.iter().enumerate() {
            for q in s.rule.premises() {
                uses[q] += 1;
                depth[i] = depth[i].max(depth[q] + 1);
            }
        }
        ProofStats {
            size: self.steps.iter().filter(|s| !s.rule.is_leaf()).count(),
            max_width: self.steps.iter().map(|s| s.clause.width()).max().unwrap_or(0),
            max_covering: self
                .steps
                .iter()
                .filter_map(|s| covering_number(&s.clause).ok())
                .map(|c| c.0)
                .max()
                .unwrap_or(0),
            treelike: uses.iter().all(|&u| u <= 1),
            depth: depth.last().copied().unwrap_or(0),
        }
    }
}
