//! Literals, terms, disjunctive clauses and s-DNF lines.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A signed propositional variable. Variables are numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: u32,
    pub positive: bool,
}

impl Literal {
    pub fn new(var: u32, positive: bool) -> Literal {
        debug_assert!(var >= 1, "variables start at 1");
        Literal { var, positive }
    }

    pub fn pos(var: u32) -> Literal {
        Literal::new(var, true)
    }

    pub fn neg(var: u32) -> Literal {
        Literal::new(var, false)
    }

    pub fn complement(self) -> Literal {
        Literal { var: self.var, positive: !self.positive }
    }

    /// Signed DIMACS integer.
    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }

    pub fn from_dimacs(x: i64) -> Result<Literal> {
        if x == 0 || x.unsigned_abs() > u32::MAX as u64 {
            return Err(Error::InvalidInput(format!("bad literal {x}")));
        }
        Ok(Literal::new(x.unsigned_abs() as u32, x > 0))
    }

    /// Value of the literal under a value for its variable.
    pub fn eval(self, value: bool) -> bool {
        value == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

fn canonical(mut lits: Vec<Literal>) -> Vec<Literal> {
    lits.sort_unstable();
    lits.dedup();
    lits
}

fn has_complementary(sorted: &[Literal]) -> bool {
    sorted.windows(2).any(|w| w[0].var == w[1].var)
}

/// A conjunction of literals. The empty term is the constant true.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Term {
    lits: Vec<Literal>,
}

impl Term {
    /// Builds a canonical term; `None` when the literals are contradictory.
    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Option<Term> {
        let lits = canonical(lits.into_iter().collect());
        if has_complementary(&lits) {
            None
        } else {
            Some(Term { lits })
        }
    }

    pub fn top() -> Term {
        Term { lits: Vec::new() }
    }

    pub fn unit(l: Literal) -> Term {
        Term { lits: vec![l] }
    }

    pub fn is_top(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn lits(&self) -> &[Literal] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, l: Literal) -> bool {
        self.lits.binary_search(&l).is_ok()
    }

    pub fn is_subset(&self, other: &Term) -> bool {
        self.lits.iter().all(|l| other.contains(*l))
    }

    /// Conjunction of two terms; `None` if contradictory.
    pub fn and(&self, other: &Term) -> Option<Term> {
        Term::new(self.lits.iter().chain(other.lits.iter()).copied())
    }

    /// The disjunction of the complemented literals.
    pub fn negation(&self) -> Clause {
        Clause::new(self.lits.iter().map(|l| l.complement()))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for l in &self.lits {
            write!(f, " {l}")?;
        }
        write!(f, " )")
    }
}

/// A disjunction of literals: formula clauses and record conjuncts.
/// Complementary literals are kept (such a clause is a tautology).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Clause {
    lits: Vec<Literal>,
}

impl Clause {
    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Clause {
        Clause { lits: canonical(lits.into_iter().collect()) }
    }

    pub fn unit(l: Literal) -> Clause {
        Clause { lits: vec![l] }
    }

    pub fn lits(&self) -> &[Literal] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, l: Literal) -> bool {
        self.lits.binary_search(&l).is_ok()
    }

    pub fn is_subset(&self, other: &Clause) -> bool {
        self.lits.iter().all(|l| other.contains(*l))
    }

    pub fn is_tautology(&self) -> bool {
        has_complementary(&self.lits)
    }

    pub fn union(&self, other: &Clause) -> Clause {
        Clause::new(self.lits.iter().chain(other.lits.iter()).copied())
    }

    pub fn minus(&self, other: &Clause) -> Clause {
        Clause { lits: self.lits.iter().copied().filter(|l| !other.contains(*l)).collect() }
    }

    /// The conjunction of the complemented literals; `None` for a tautology.
    pub fn negation(&self) -> Option<Term> {
        Term::new(self.lits.iter().map(|l| l.complement()))
    }

    /// The same disjunction read as an s-DNF of singleton terms.
    pub fn to_sclause(&self) -> SClause {
        SClause::new(self.lits.iter().map(|l| Term::unit(*l)))
    }

    pub fn max_var(&self) -> u32 {
        self.lits.iter().map(|l| l.var).max().unwrap_or(0)
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.lits.iter().any(|l| l.eval(assignment[l.var as usize]))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for l in &self.lits {
            write!(f, " {l}")?;
        }
        write!(f, " )")
    }
}

/// A conjunction of clauses labelling a branching-program node.
pub type Record = BTreeSet<Clause>;

/// A disjunction of terms (an s-DNF line). A line containing the
/// true term is collapsed to exactly that term; the empty line is false.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SClause {
    terms: Vec<Term>,
}

impl SClause {
    pub fn new(terms: impl IntoIterator<Item = Term>) -> SClause {
        let mut terms: Vec<Term> = terms.into_iter().collect();
        if terms.iter().any(Term::is_top) {
            return SClause { terms: vec![Term::top()] };
        }
        terms.sort_unstable();
        terms.dedup();
        SClause { terms }
    }

    pub fn empty() -> SClause {
        SClause { terms: Vec::new() }
    }

    pub fn top() -> SClause {
        SClause { terms: vec![Term::top()] }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_top(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].is_top()
    }

    /// True for the empty line, i.e. the constant false.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.terms.binary_search(t).is_ok()
    }

    /// Largest number of literals in a term.
    pub fn width(&self) -> usize {
        self.terms.iter().map(Term::len).max().unwrap_or(0)
    }

    pub fn max_var(&self) -> u32 {
        self.terms.iter().flat_map(|t| t.lits()).map(|l| l.var).max().unwrap_or(0)
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.terms.iter().any(|t| t.lits().iter().all(|l| l.eval(assignment[l.var as usize])))
    }

    pub fn with(&self, t: Term) -> SClause {
        SClause::new(self.terms.iter().cloned().chain(std::iter::once(t)))
    }

    pub fn without(&self, t: &Term) -> SClause {
        SClause { terms: self.terms.iter().filter(|x| *x != t).cloned().collect() }
    }

    pub fn union(&self, other: &SClause) -> SClause {
        SClause::new(self.terms.iter().chain(other.terms.iter()).cloned())
    }

    pub fn is_subset(&self, other: &SClause) -> bool {
        self.terms.iter().all(|t| other.contains(t))
    }
}

impl fmt::Display for SClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for t in &self.terms {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// The record equivalent to the negation of an s-DNF line: one clause of
/// complemented literals per term.
pub fn negate_clause(c: &SClause) -> Record {
    c.terms().iter().map(Term::negation).collect()
}

/// The record equivalent to the negation of a plain clause: its unit complements.
pub fn negate_literal_clause(c: &Clause) -> Record {
    c.lits().iter().map(|l| Clause::unit(l.complement())).collect()
}

/// The s-DNF line equivalent to the negation of a record; `None` if some
/// conjunct is a tautology (its negated term would be contradictory).
pub fn record_negation(r: &Record) -> Option<SClause> {
    let mut terms = Vec::with_capacity(r.len());
    for c in r {
        terms.push(c.negation()?);
    }
    Some(SClause::new(terms))
}
