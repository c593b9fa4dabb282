//! Partial assignments and their effect on lines and formulas.

use std::collections::BTreeMap;

use crate::cnf::CnfFormula;
use crate::error::{Error, Result};
use crate::logic::{Clause, Literal, SClause, Term};

/// Per-group bit budget carried by structured restrictions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    pub budget: usize,
    pub groups: Vec<(String, Vec<u32>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Restriction {
    pub assignments: BTreeMap<u32, bool>,
    pub structure: Option<Structure>,
}

impl Restriction {
    pub fn new() -> Restriction {
        Restriction::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, bool)>) -> Restriction {
        Restriction { assignments: pairs.into_iter().collect(), structure: None }
    }

    pub fn get(&self, var: u32) -> Option<bool> {
        self.assignments.get(&var).copied()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Value of a literal, if its variable is assigned.
    pub fn lit_value(&self, l: Literal) -> Option<bool> {
        self.get(l.var).map(|v| l.eval(v))
    }

    /// Checks the per-group budget, when one is declared.
    pub fn validate(&self) -> Result<()> {
        if let Some(st) = &self.structure {
            for (name, vars) in &st.groups {
                if vars.len() != st.budget {
                    return Err(Error::InvalidInput(format!(
                        "group {name} assigns {} variables, budget is {}",
                        vars.len(),
                        st.budget
                    )));
                }
                if let Some(v) = vars.iter().find(|v| !self.assignments.contains_key(v)) {
                    return Err(Error::InvalidInput(format!("group {name} lists unassigned variable {v}")));
                }
            }
        }
        Ok(())
    }

    /// Union of two restrictions with disjoint domains.
    pub fn compose(&self, other: &Restriction) -> Result<Restriction> {
        let mut out = self.assignments.clone();
        for (&v, &b) in &other.assignments {
            if out.insert(v, b).is_some() {
                return Err(Error::InvalidInput(format!("variable {v} assigned twice")));
            }
        }
        Ok(Restriction { assignments: out, structure: None })
    }

    pub fn restrict_term(&self, t: &Term) -> Option<Term> {
        let mut kept = Vec::with_capacity(t.len());
        for &l in t.lits() {
            match self.lit_value(l) {
                Some(false) => return None,
                Some(true) => {}
                None => kept.push(l),
            }
        }
        Term::new(kept)
    }

    /// Restricts a plain clause; `None` when it is satisfied.
    pub fn restrict_clause(&self, c: &Clause) -> Option<Clause> {
        let mut kept = Vec::with_capacity(c.len());
        for &l in c.lits() {
            match self.lit_value(l) {
                Some(true) => return None,
                Some(false) => {}
                None => kept.push(l),
            }
        }
        Some(Clause::new(kept))
    }
}

/// Simplifies an s-DNF line: satisfied terms make it true, falsified
/// literals drop out of terms and falsified terms drop out of the line.
pub fn apply_to_sclause(d: &SClause, rho: &Restriction) -> SClause {
    if d.is_top() {
        return SClause::top();
    }
    SClause::new(d.terms().iter().filter_map(|t| rho.restrict_term(t)))
}

/// Simplifies every clause; satisfied clauses are dropped and an emptied
/// clause is retained (see [`CnfFormula::contains_empty_clause`]).
pub fn apply_to_formula(f: &CnfFormula, rho: &Restriction) -> Result<CnfFormula> {
    if let Some((&v, _)) = rho.assignments.iter().find(|(&v, _)| v == 0 || v > f.num_vars) {
        return Err(Error::Range(format!("variable {v} outside 1..={}", f.num_vars)));
    }
    let mut out = f.with_same_vars(f.family_tag.clone());
    for c in &f.clauses {
        if let Some(r) = rho.restrict_clause(c) {
            out.push_clause(r);
        }
    }
    Ok(out)
}
