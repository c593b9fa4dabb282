//! CNF formulas with a semantic variable catalog.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::logic::{Clause, Literal};

/// Semantic name of a propositional variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarDescriptor {
    /// Unary-encoding atom `v` over an index tuple; the last index is the value.
    Unary { args: Vec<u32> },
    /// Bit `pos` (1-based, most significant first) of the witness `name`
    /// attached to `group`.
    Bit { name: String, group: Vec<u32>, pos: u32 },
    /// Type-1 relation atom kept as a single variable in binary encodings.
    Atom { rel: String, args: Vec<u32> },
}

impl VarDescriptor {
    pub fn unary(args: &[u32]) -> VarDescriptor {
        VarDescriptor::Unary { args: args.to_vec() }
    }

    pub fn bit(name: &str, group: &[u32], pos: u32) -> VarDescriptor {
        VarDescriptor::Bit { name: name.to_string(), group: group.to_vec(), pos }
    }

    pub fn atom(rel: &str, args: &[u32]) -> VarDescriptor {
        VarDescriptor::Atom { rel: rel.to_string(), args: args.to_vec() }
    }
}

fn join(xs: &[u32]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for VarDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarDescriptor::Unary { args } => write!(f, "v({})", join(args)),
            VarDescriptor::Bit { name, group, pos } => write!(f, "w:{name}({})[{pos}]", join(group)),
            VarDescriptor::Atom { rel, args } => write!(f, "nu:{rel}({})", join(args)),
        }
    }
}

fn parse_args(s: &str) -> Result<Vec<u32>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| Error::InvalidInput(format!("bad index '{x}'"))))
        .collect()
}

/// Splits `head(args)rest` into its three pieces.
fn split_call(s: &str) -> Result<(&str, &str, &str)> {
    let open = s.find('(').ok_or_else(|| Error::InvalidInput(format!("missing '(' in '{s}'")))?;
    let close = s.find(')').ok_or_else(|| Error::InvalidInput(format!("missing ')' in '{s}'")))?;
    if close < open {
        return Err(Error::InvalidInput(format!("malformed descriptor '{s}'")));
    }
    Ok((&s[..open], &s[open + 1..close], &s[close + 1..]))
}

impl FromStr for VarDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<VarDescriptor> {
        let bad = || Error::InvalidInput(format!("unknown descriptor '{s}'"));
        if let Some(rest) = s.strip_prefix("w:") {
            let (name, args, tail) = split_call(rest)?;
            let pos = tail
                .strip_prefix('[')
                .and_then(|t| t.strip_suffix(']'))
                .and_then(|t| t.parse::<u32>().ok())
                .ok_or_else(bad)?;
            Ok(VarDescriptor::Bit { name: name.to_string(), group: parse_args(args)?, pos })
        } else if let Some(rest) = s.strip_prefix("nu:") {
            let (rel, args, tail) = split_call(rest)?;
            if !tail.is_empty() || rel.is_empty() {
                return Err(bad());
            }
            Ok(VarDescriptor::Atom { rel: rel.to_string(), args: parse_args(args)? })
        } else {
            let (head, args, tail) = split_call(s)?;
            if head != "v" || !tail.is_empty() {
                return Err(bad());
            }
            Ok(VarDescriptor::Unary { args: parse_args(args)? })
        }
    }
}

/// A clause set over variables `1..=num_vars`. Clause positions are stable
/// and are what proofs cite as axiom indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CnfFormula {
    pub num_vars: u32,
    pub clauses: Vec<Clause>,
    names: BTreeMap<u32, VarDescriptor>,
    index: HashMap<VarDescriptor, u32>,
    pub family_tag: String,
}

impl CnfFormula {
    pub fn new(family_tag: impl Into<String>) -> CnfFormula {
        CnfFormula { family_tag: family_tag.into(), ..CnfFormula::default() }
    }

    /// Returns the index of `d`, allocating a fresh variable the first time.
    pub fn var(&mut self, d: VarDescriptor) -> u32 {
        if let Some(&v) = self.index.get(&d) {
            return v;
        }
        self.num_vars += 1;
        let v = self.num_vars;
        self.names.insert(v, d.clone());
        self.index.insert(d, v);
        v
    }

    pub fn lookup(&self, d: &VarDescriptor) -> Option<u32> {
        self.index.get(d).copied()
    }

    pub fn name(&self, v: u32) -> Option<&VarDescriptor> {
        self.names.get(&v)
    }

    pub fn var_names(&self) -> impl Iterator<Item = (u32, &VarDescriptor)> {
        self.names.iter().map(|(v, d)| (*v, d))
    }

    /// Records a name for an already existing variable index.
    pub fn set_name(&mut self, v: u32, d: VarDescriptor) -> Result<()> {
        if v == 0 || v > self.num_vars {
            return Err(Error::Range(format!("variable {v} outside 1..={}", self.num_vars)));
        }
        if let Some(&w) = self.index.get(&d) {
            if w != v {
                return Err(Error::InvalidInput(format!("descriptor {d} named twice")));
            }
        }
        if let Some(old) = self.names.insert(v, d.clone()) {
            self.index.remove(&old);
        }
        self.index.insert(d, v);
        Ok(())
    }

    /// Appends a clause unless it is a tautology or already present.
    pub fn add_clause(&mut self, lits: impl IntoIterator<Item = Literal>) {
        let c = Clause::new(lits);
        if c.is_tautology() {
            return;
        }
        self.push_clause(c);
    }

    pub(crate) fn push_clause(&mut self, c: Clause) {
        if !self.clauses.contains(&c) {
            self.clauses.push(c);
        }
    }

    /// Appends without any filtering; used by parsers to keep indices intact.
    pub fn push_raw(&mut self, c: Clause) -> Result<()> {
        if let Some(l) = c.lits().iter().find(|l| l.var > self.num_vars) {
            return Err(Error::Range(format!("literal {l} outside 1..={}", self.num_vars)));
        }
        self.clauses.push(c);
        Ok(())
    }

    pub fn find_clause(&self, c: &Clause) -> Option<usize> {
        self.clauses.iter().position(|x| x == c)
    }

    /// Map from clause to its first index, for repeated lookups.
    pub fn clause_index(&self) -> HashMap<Clause, usize> {
        let mut m = HashMap::new();
        for (i, c) in self.clauses.iter().enumerate() {
            m.entry(c.clone()).or_insert(i);
        }
        m
    }

    pub fn contains_empty_clause(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
    }

    pub fn max_width(&self) -> usize {
        self.clauses.iter().map(Clause::len).max().unwrap_or(0)
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.eval(assignment))
    }

    /// Copy with the same variables and names but no clauses.
    pub fn with_same_vars(&self, family_tag: impl Into<String>) -> CnfFormula {
        CnfFormula {
            num_vars: self.num_vars,
            clauses: Vec::new(),
            names: self.names.clone(),
            index: self.index.clone(),
            family_tag: family_tag.into(),
        }
    }
}
