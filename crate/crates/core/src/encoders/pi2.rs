//! Π2 principle specs and their canonical binary encoding.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use super::{bits_for, pattern_excluded, pattern_lits};
use crate::cnf::{CnfFormula, VarDescriptor};
use crate::error::{parse_err, Error, Result};
use crate::logic::{Clause, Literal};

/// Sort used for variables declared without one.
pub const DEFAULT_SORT: &str = "n";

pub const OP_SPEC: &str = "\
relation R/2
forall x y z
clause: -R(x,x)
clause: -R(x,y) | -R(y,z) | R(x,z)
clause witness w: w | R(x,w)
";

pub const LOP_SPEC: &str = "\
relation R/2
forall x y z
clause: -R(x,x)
clause: -R(x,y) | -R(y,z) | R(x,z)
clause: R(x,y) | R(y,x) | x=y
clause witness w: w | R(x,w)
";

pub const PHP_SPEC: &str = "\
relation R/2
forall x:P y:P z:H
clause: -R(x,z) | -R(y,z) | x=y
clause witness w:H: w | R(x,w)
";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TemplateLit {
    Atom { positive: bool, rel: String, args: Vec<String> },
    Eq { positive: bool, left: String, right: String },
    /// The witness selector of the template.
    Witness { positive: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    /// Witness variable and its sort.
    pub witness: Option<(String, String)>,
    pub lits: Vec<TemplateLit>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pi2Spec {
    pub relations: Vec<(String, usize)>,
    /// Universal variables with their sorts.
    pub universals: Vec<(String, String)>,
    pub templates: Vec<Template>,
}

fn sign(positive: bool) -> &'static str {
    if positive {
        ""
    } else {
        "-"
    }
}

fn with_sort(name: &str, sort: &str) -> String {
    if sort == DEFAULT_SORT {
        name.to_string()
    } else {
        format!("{name}:{sort}")
    }
}

impl fmt::Display for TemplateLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemplateLit::Atom { positive, rel, args } => write!(f, "{}{rel}({})", sign(*positive), args.join(",")),
            TemplateLit::Eq { positive, left, right } => {
                write!(f, "{left}{}{right}", if *positive { "=" } else { "!=" })
            }
            TemplateLit::Witness { .. } => unreachable!("printed by the template"),
        }
    }
}

impl fmt::Display for Pi2Spec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, arity) in &self.relations {
            writeln!(f, "relation {name}/{arity}")?;
        }
        let vars: Vec<String> = self.universals.iter().map(|(v, s)| with_sort(v, s)).collect();
        writeln!(f, "forall {}", vars.join(" "))?;
        for t in &self.templates {
            write!(f, "clause")?;
            if let Some((w, s)) = &t.witness {
                write!(f, " witness {}", with_sort(w, s))?;
            }
            let body: Vec<String> = t
                .lits
                .iter()
                .map(|l| match l {
                    TemplateLit::Witness { positive } => {
                        format!("{}{}", sign(*positive), t.witness.as_ref().map_or("?", |w| w.0.as_str()))
                    }
                    other => other.to_string(),
                })
                .collect();
            writeln!(f, ": {}", body.join(" | "))?;
        }
        Ok(())
    }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn split_sorted(tok: &str, line: usize) -> Result<(String, String)> {
    let (name, sort) = match tok.split_once(':') {
        Some((n, s)) => (n, s),
        None => (tok, DEFAULT_SORT),
    };
    if !is_ident(name) || !is_ident(sort) {
        return Err(parse_err(line, format!("bad variable '{tok}'")));
    }
    Ok((name.to_string(), sort.to_string()))
}

fn parse_lit(tok: &str, witness: Option<&str>, line: usize) -> Result<TemplateLit> {
    let tok = tok.trim();
    if let Some((l, r)) = tok.split_once("!=") {
        return Ok(TemplateLit::Eq { positive: false, left: l.trim().into(), right: r.trim().into() });
    }
    if let Some((l, r)) = tok.split_once('=') {
        return Ok(TemplateLit::Eq { positive: true, left: l.trim().into(), right: r.trim().into() });
    }
    let (positive, body) = match tok.strip_prefix('-') {
        Some(b) => (false, b.trim()),
        None => (true, tok),
    };
    if let Some(open) = body.find('(') {
        let rel = &body[..open];
        let args = body[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| parse_err(line, format!("unclosed atom '{tok}'")))?;
        let args: Vec<String> =
            if args.trim().is_empty() { Vec::new() } else { args.split(',').map(|a| a.trim().to_string()).collect() };
        if !is_ident(rel) || args.iter().any(|a| !is_ident(a)) {
            return Err(parse_err(line, format!("bad atom '{tok}'")));
        }
        return Ok(TemplateLit::Atom { positive, rel: rel.into(), args });
    }
    if Some(body) == witness {
        return Ok(TemplateLit::Witness { positive });
    }
    Err(parse_err(line, format!("'{tok}' is neither an atom nor the witness")))
}

impl FromStr for Pi2Spec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Pi2Spec> {
        let mut relations = Vec::new();
        let mut universals: Option<Vec<(String, String)>> = None;
        let mut templates = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            if let Some(rest) = s.strip_prefix("relation ") {
                let (name, arity) =
                    rest.trim().split_once('/').ok_or_else(|| parse_err(line, "expected relation <name>/<arity>"))?;
                let arity: usize = arity.trim().parse().map_err(|_| parse_err(line, "bad arity"))?;
                if arity > 2 {
                    return Err(Error::Unsupported(format!("relation {name} has arity {arity} > 2")));
                }
                if !is_ident(name.trim()) {
                    return Err(parse_err(line, format!("bad relation name '{name}'")));
                }
                relations.push((name.trim().to_string(), arity));
            } else if let Some(rest) = s.strip_prefix("forall") {
                if universals.is_some() {
                    return Err(parse_err(line, "second forall line"));
                }
                universals = Some(rest.split_whitespace().map(|t| split_sorted(t, line)).collect::<Result<_>>()?);
            } else if let Some(rest) = s.strip_prefix("clause") {
                let (head, body) = match rest.find(": ") {
                    Some(p) => (&rest[..p], &rest[p + 2..]),
                    None => rest.split_once(':').ok_or_else(|| parse_err(line, "expected ':' after clause"))?,
                };
                let head = head.trim();
                let witness = if head.is_empty() {
                    None
                } else {
                    let w = head.strip_prefix("witness").ok_or_else(|| parse_err(line, "expected 'witness'"))?;
                    Some(split_sorted(w.trim(), line)?)
                };
                let lits = body
                    .split('|')
                    .map(|t| parse_lit(t, witness.as_ref().map(|w| w.0.as_str()), line))
                    .collect::<Result<Vec<_>>>()?;
                templates.push(Template { witness, lits });
            } else {
                return Err(parse_err(line, format!("unrecognised line '{s}'")));
            }
        }
        let spec = Pi2Spec { relations, universals: universals.unwrap_or_default(), templates };
        spec.validate()?;
        Ok(spec)
    }
}

impl Pi2Spec {
    pub fn validate(&self) -> Result<()> {
        let arity: BTreeMap<&str, usize> = self.relations.iter().map(|(n, a)| (n.as_str(), *a)).collect();
        for t in &self.templates {
            let witnesses = t.lits.iter().filter(|l| matches!(l, TemplateLit::Witness { .. })).count();
            if witnesses > 1 {
                return Err(Error::Unsupported("template with two witness literals".into()));
            }
            if witnesses == 1 && t.witness.is_none() {
                return Err(Error::InvalidInput("witness literal without a witness variable".into()));
            }
            let known = |v: &str| {
                self.universals.iter().any(|(u, _)| u == v) || t.witness.as_ref().map_or(false, |w| w.0 == v)
            };
            for l in &t.lits {
                match l {
                    TemplateLit::Atom { rel, args, .. } => {
                        match arity.get(rel.as_str()) {
                            Some(&a) if a == args.len() => {}
                            Some(&a) => {
                                return Err(Error::InvalidInput(format!("{rel} used with {} args, arity {a}", args.len())))
                            }
                            None => return Err(Error::InvalidInput(format!("undeclared relation {rel}"))),
                        }
                        if let Some(a) = args.iter().find(|a| !known(a)) {
                            return Err(Error::InvalidInput(format!("unknown variable {a}")));
                        }
                    }
                    TemplateLit::Eq { left, right, .. } => {
                        if !known(left) || !known(right) {
                            return Err(Error::InvalidInput(format!("unknown variable in {l}")));
                        }
                    }
                    TemplateLit::Witness { .. } => {}
                }
            }
        }
        Ok(())
    }
}

/// Canonical binary encoding with every sort of size `n`.
pub fn encode_pi2(spec: &Pi2Spec, n: u32) -> Result<CnfFormula> {
    let mut sizes: BTreeMap<String, u32> = BTreeMap::new();
    for (_, s) in &spec.universals {
        sizes.insert(s.clone(), n);
    }
    for t in &spec.templates {
        if let Some((_, s)) = &t.witness {
            sizes.insert(s.clone(), n);
        }
    }
    sizes.insert(DEFAULT_SORT.to_string(), n);
    encode_pi2_sized(spec, &sizes)
}

/// Canonical binary encoding with explicit sort sizes.
pub fn encode_pi2_sized(spec: &Pi2Spec, sizes: &BTreeMap<String, u32>) -> Result<CnfFormula> {
    spec.validate()?;
    let size_of = |sort: &str| {
        sizes.get(sort).copied().ok_or_else(|| Error::Param(format!("no size given for sort {sort}")))
    };
    let tag_sizes: Vec<String> = sizes.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let mut f = CnfFormula::new(format!("pi2 {}", tag_sizes.join(" ")));
    let mut raw: Vec<Vec<Literal>> = Vec::new();
    let mut groups: Vec<(String, Vec<u32>, u32)> = Vec::new();
    let mut seen_groups = BTreeSet::new();

    for t in &spec.templates {
        let only_witness =
            t.lits.len() == 1 && matches!(t.lits[0], TemplateLit::Witness { positive: true });
        if only_witness {
            continue;
        }
        let wname = t.witness.as_ref().map(|w| w.0.as_str());
        let used: Vec<&(String, String)> = spec
            .universals
            .iter()
            .filter(|(u, _)| {
                t.lits.iter().any(|l| match l {
                    TemplateLit::Atom { args, .. } => args.iter().any(|a| a == u),
                    TemplateLit::Eq { left, right, .. } => left == u || right == u,
                    TemplateLit::Witness { .. } => false,
                })
            })
            .collect();
        let dims: Vec<u32> = used.iter().map(|(_, s)| size_of(s)).collect::<Result<_>>()?;
        let wsize = match &t.witness {
            Some((_, s)) => size_of(s)?,
            None => 1,
        };
        let mut point = vec![0u32; used.len()];
        'points: loop {
            let mut env: BTreeMap<&str, u32> = used.iter().zip(&point).map(|((u, _), &v)| (u.as_str(), v)).collect();
            let bits = match &t.witness {
                Some((w, _)) => {
                    let r = bits_for(wsize);
                    let group = point.clone();
                    if seen_groups.insert((w.clone(), group.clone())) {
                        groups.push((w.clone(), group.clone(), wsize));
                    }
                    (1..=r).map(|p| f.var(VarDescriptor::bit(w, &group, p))).collect::<Vec<u32>>()
                }
                None => Vec::new(),
            };
            for a in 0..wsize {
                if let Some(w) = wname {
                    env.insert(w, a);
                }
                let mut lits = Vec::new();
                let mut satisfied = false;
                for l in &t.lits {
                    match l {
                        TemplateLit::Atom { positive, rel, args } => {
                            let vals: Vec<u32> = args.iter().map(|x| env[x.as_str()]).collect();
                            lits.push(Literal::new(f.var(VarDescriptor::atom(rel, &vals)), *positive));
                        }
                        TemplateLit::Eq { positive, left, right } => {
                            if (env[left.as_str()] == env[right.as_str()]) == *positive {
                                satisfied = true;
                            }
                        }
                        TemplateLit::Witness { positive } => {
                            if *positive {
                                lits.extend(pattern_excluded(&bits, a));
                            } else {
                                lits.extend(pattern_lits(&bits, a));
                            }
                        }
                    }
                }
                if !satisfied {
                    raw.push(lits);
                }
            }
            // Advance the odometer over the used universals.
            let mut i = point.len();
            loop {
                if i == 0 {
                    break 'points;
                }
                i -= 1;
                point[i] += 1;
                if point[i] < dims[i] {
                    break;
                }
                point[i] = 0;
            }
        }
    }

    let clauses: Vec<Clause> = raw.into_iter().map(Clause::new).filter(|c| !c.is_tautology()).collect();
    let units: BTreeSet<Literal> = clauses.iter().filter(|c| c.len() == 1).map(|c| c.lits()[0]).collect();
    for c in clauses {
        let pruned = if c.len() > 1 {
            Clause::new(c.lits().iter().copied().filter(|l| !units.contains(&l.complement())))
        } else {
            c
        };
        f.push_clause(pruned);
    }
    for (w, group, size) in groups {
        let r = bits_for(size);
        let bits: Vec<u32> = (1..=r).map(|p| f.var(VarDescriptor::bit(&w, &group, p))).collect();
        for a in size..(1u32 << r) {
            f.add_clause(pattern_excluded(&bits, a));
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_specs_parse_and_print_back() {
        for text in [OP_SPEC, LOP_SPEC, PHP_SPEC] {
            let spec: Pi2Spec = text.parse().unwrap();
            assert_eq!(spec.to_string().parse::<Pi2Spec>().unwrap(), spec);
        }
    }

    #[test]
    fn two_witness_literals_are_unsupported() {
        let text = "relation R/2\nforall x\nclause witness w: w | -w | R(x,w)\n";
        assert!(matches!(text.parse::<Pi2Spec>(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn arity_three_is_unsupported() {
        assert!(matches!("relation T/3\nforall x\n".parse::<Pi2Spec>(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn op_spec_at_three_adds_exclusions() {
        let f = encode_pi2(&OP_SPEC.parse().unwrap(), 3).unwrap();
        for x in 0..3u32 {
            let b1 = f.lookup(&VarDescriptor::bit("w", &[x], 1)).unwrap();
            let b2 = f.lookup(&VarDescriptor::bit("w", &[x], 2)).unwrap();
            assert!(f.find_clause(&Clause::new([Literal::neg(b1), Literal::neg(b2)])).is_some());
        }
    }

    #[test]
    fn witness_free_spec_is_a_renaming() {
        let spec: Pi2Spec = "relation R/2\nforall x y\nclause: -R(x,y) | R(y,x)\n".parse().unwrap();
        let f = encode_pi2(&spec, 2).unwrap();
        assert_eq!(f.num_vars, 4);
        assert_eq!(f.clauses.len(), 2);
    }
}
