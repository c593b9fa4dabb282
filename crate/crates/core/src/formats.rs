//! Line-oriented text formats: DIMACS with a variable catalog, rule proofs
//! (`.resp`), branching programs (`.bp`), restrictions and graphs.

use std::fmt::Write as _;

use crate::cnf::{CnfFormula, VarDescriptor};
use crate::error::{parse_err, Error, Result};
use crate::graphs::MultipartiteGraph;
use crate::logic::{Clause, Literal, Record, SClause, Term};
use crate::proofs::{BpNode, BranchingProgram, NodeKind, Rule, RuleProof, SinkLabel, Step};
use crate::restriction::{Restriction, Structure};

/// Meaningful lines with their 1-based numbers; blank lines are skipped.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty())
}

fn num<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(line, format!("bad {what} '{tok}'")))
}

fn lit(line: usize, tok: &str) -> Result<Literal> {
    let x: i64 = tok.parse().map_err(|_| parse_err(line, format!("bad literal '{tok}'")))?;
    Literal::from_dimacs(x).map_err(|e| parse_err(line, e.to_string()))
}

fn lit_list(c: &Clause) -> String {
    c.lits().iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn print_dimacs(f: &CnfFormula) -> String {
    let mut out = String::new();
    if !f.family_tag.is_empty() {
        writeln!(out, "c family {}", f.family_tag).unwrap();
    }
    for (v, d) in f.var_names() {
        writeln!(out, "c var {v} {d}").unwrap();
    }
    writeln!(out, "p cnf {} {}", f.num_vars, f.clauses.len()).unwrap();
    for c in &f.clauses {
        if c.is_empty() {
            out.push_str("0\n");
        } else {
            writeln!(out, "{} 0", lit_list(c)).unwrap();
        }
    }
    out
}

/// Parses DIMACS; clause order and duplicates are kept so axiom indices
/// stay stable. Clauses may span lines.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut f = CnfFormula::new("");
    let mut names = Vec::new();
    let mut header: Option<(u32, usize)> = None;
    let mut pending: Vec<Literal> = Vec::new();
    for (n, l) in lines(text) {
        if let Some(c) = l.strip_prefix('c') {
            let c = c.trim();
            if let Some(tag) = c.strip_prefix("family ") {
                f.family_tag = tag.trim().to_string();
            } else if let Some(rest) = c.strip_prefix("var ") {
                let mut it = rest.split_whitespace();
                let v: u32 = num(n, it.next(), "variable index")?;
                let d: VarDescriptor = it.next().ok_or_else(|| parse_err(n, "missing descriptor"))?.parse()
                    .map_err(|e: Error| parse_err(n, e.to_string()))?;
                names.push((n, v, d));
            }
            continue;
        }
        if let Some(h) = l.strip_prefix("p ") {
            let mut it = h.split_whitespace();
            if it.next() != Some("cnf") {
                return Err(parse_err(n, "expected 'p cnf V C'"));
            }
            let v = num(n, it.next(), "variable count")?;
            let c = num(n, it.next(), "clause count")?;
            if header.replace((v, c)).is_some() {
                return Err(parse_err(n, "second header"));
            }
            f.num_vars = v;
            continue;
        }
        if header.is_none() {
            return Err(parse_err(n, "clause before the 'p cnf' header"));
        }
        for tok in l.split_whitespace() {
            if tok == "0" {
                f.push_raw(Clause::new(std::mem::take(&mut pending))).map_err(|e| parse_err(n, e.to_string()))?;
            } else {
                pending.push(lit(n, tok)?);
            }
        }
    }
    let (_, count) = header.ok_or_else(|| parse_err(0, "missing 'p cnf' header"))?;
    if !pending.is_empty() {
        return Err(parse_err(0, "last clause is not terminated by 0"));
    }
    if f.clauses.len() != count {
        return Err(parse_err(0, format!("header announces {count} clauses, found {}", f.clauses.len())));
    }
    for (n, v, d) in names {
        f.set_name(v, d).map_err(|e| parse_err(n, e.to_string()))?;
    }
    Ok(f)
}

fn print_terms(c: &SClause) -> String {
    c.terms().iter().map(|t| format!("{t} ")).collect()
}

pub fn print_rule_proof(p: &RuleProof) -> String {
    let mut out = format!("r res {} {}\n", p.s, p.num_vars);
    for (i, step) in p.steps.iter().enumerate() {
        let rule = match step.rule {
            Rule::Axiom(a) => format!("AX {a}"),
            Rule::AndIntro(a, b) => format!("AND {a} {b}"),
            Rule::Cut(a, b) => format!("CUT {a} {b}"),
            Rule::Weak1(a) => format!("W1 {a}"),
            Rule::Weak2(a) => format!("W2 {a}"),
            Rule::ExcludedMiddle => "EM".to_string(),
        };
        writeln!(out, "{i} {rule} : {}0", print_terms(&step.clause)).unwrap();
    }
    out
}

fn header(n: usize, l: &str, tag: &str) -> Result<(usize, u32)> {
    let mut it = l.split_whitespace();
    if it.next() != Some(tag) || it.next() != Some("res") {
        return Err(parse_err(n, format!("expected '{tag} res <s> <vars>'")));
    }
    let s = num(n, it.next(), "s")?;
    let v = num(n, it.next(), "variable count")?;
    if it.next().is_some() {
        return Err(parse_err(n, "trailing tokens in header"));
    }
    Ok((s, v))
}

/// Parses `( l … ) ( l … ) 0`.
fn parse_terms(n: usize, body: &str) -> Result<SClause> {
    let mut toks = body.split_whitespace().peekable();
    let mut terms = Vec::new();
    loop {
        match toks.next() {
            Some("0") => break,
            Some("(") => {
                let mut ls = Vec::new();
                loop {
                    match toks.next() {
                        Some(")") => break,
                        Some(t) => ls.push(lit(n, t)?),
                        None => return Err(parse_err(n, "unclosed term")),
                    }
                }
                terms.push(Term::new(ls).ok_or_else(|| parse_err(n, "contradictory term"))?);
            }
            Some(t) => return Err(parse_err(n, format!("unexpected token '{t}'"))),
            None => return Err(parse_err(n, "line not terminated by 0")),
        }
    }
    if toks.next().is_some() {
        return Err(parse_err(n, "tokens after the terminating 0"));
    }
    Ok(SClause::new(terms))
}

pub fn parse_rule_proof(text: &str) -> Result<RuleProof> {
    let mut it = lines(text).filter(|(_, l)| !l.starts_with('c'));
    let (n0, h) = it.next().ok_or_else(|| parse_err(0, "empty proof"))?;
    let (s, num_vars) = header(n0, h, "r")?;
    let mut steps = Vec::new();
    for (n, l) in it {
        let (head, body) = l.split_once(':').ok_or_else(|| parse_err(n, "missing ':'"))?;
        let mut toks = head.split_whitespace();
        let id: usize = num(n, toks.next(), "step id")?;
        if id != steps.len() {
            return Err(parse_err(n, format!("step id {id} out of sequence, expected {}", steps.len())));
        }
        let rule = match toks.next() {
            Some("AX") => Rule::Axiom(num(n, toks.next(), "clause index")?),
            Some("AND") => Rule::AndIntro(num(n, toks.next(), "premise")?, num(n, toks.next(), "premise")?),
            Some("CUT") => Rule::Cut(num(n, toks.next(), "premise")?, num(n, toks.next(), "premise")?),
            Some("W1") => Rule::Weak1(num(n, toks.next(), "premise")?),
            Some("W2") => Rule::Weak2(num(n, toks.next(), "premise")?),
            Some("EM") => Rule::ExcludedMiddle,
            other => return Err(parse_err(n, format!("unknown rule {other:?}"))),
        };
        if toks.next().is_some() {
            return Err(parse_err(n, "too many premises"));
        }
        steps.push(Step { clause: parse_terms(n, body)?, rule });
    }
    Ok(RuleProof { s, num_vars, steps })
}

fn print_record(r: &Record) -> String {
    r.iter().map(|c| format!(" {c}")).collect()
}

/// `SRC <id>` is written only when the source is not node 0.
pub fn print_bp(bp: &BranchingProgram) -> String {
    let mut out = format!("b res {} {}\n", bp.s, bp.num_vars);
    if bp.source != 0 {
        writeln!(out, "SRC {}", bp.source).unwrap();
    }
    for (i, node) in bp.nodes.iter().enumerate() {
        let kind = match &node.kind {
            NodeKind::Query { disj, t, f } => format!("Q {} T:{t} F:{f}", lit_list(disj)),
            NodeKind::Split { sub, t, f } => format!("SPLIT {} T:{t} F:{f}", lit_list(sub)),
            NodeKind::Forget { child } => format!("FORGET {child}"),
            NodeKind::Sink(SinkLabel::Axiom(a)) => format!("SINK {a}"),
            NodeKind::Sink(SinkLabel::ExcludedMiddle) => "SINK EM".to_string(),
        };
        writeln!(out, "{i} {kind} |{}", print_record(&node.record)).unwrap();
    }
    out
}

fn parse_record(n: usize, text: &str) -> Result<Record> {
    let mut r = Record::new();
    let mut toks = text.split_whitespace();
    while let Some(t) = toks.next() {
        if t != "(" {
            return Err(parse_err(n, format!("expected '(' in record, got '{t}'")));
        }
        let mut ls = Vec::new();
        loop {
            match toks.next() {
                Some(")") => break,
                Some(t) => ls.push(lit(n, t)?),
                None => return Err(parse_err(n, "unclosed record clause")),
            }
        }
        r.insert(Clause::new(ls));
    }
    Ok(r)
}

fn children(n: usize, toks: &[&str]) -> Result<(Vec<Literal>, usize, usize)> {
    let (mut t, mut f, mut ls) = (None, None, Vec::new());
    for tok in toks {
        if let Some(x) = tok.strip_prefix("T:") {
            t = Some(num(n, Some(x), "true child")?);
        } else if let Some(x) = tok.strip_prefix("F:") {
            f = Some(num(n, Some(x), "false child")?);
        } else {
            ls.push(lit(n, tok)?);
        }
    }
    match (t, f) {
        (Some(t), Some(f)) => Ok((ls, t, f)),
        _ => Err(parse_err(n, "missing T: or F: child")),
    }
}

pub fn parse_bp(text: &str) -> Result<BranchingProgram> {
    let mut it = lines(text).filter(|(_, l)| !l.starts_with('c'));
    let (n0, h) = it.next().ok_or_else(|| parse_err(0, "empty program"))?;
    let (s, num_vars) = header(n0, h, "b")?;
    let mut source = 0;
    let mut nodes = Vec::new();
    for (n, l) in it {
        if let Some(x) = l.strip_prefix("SRC ") {
            source = num(n, Some(x.trim()), "source id")?;
            continue;
        }
        let (head, rec) = l.split_once('|').ok_or_else(|| parse_err(n, "missing '|' before the record"))?;
        let toks: Vec<&str> = head.split_whitespace().collect();
        let id: usize = num(n, toks.first().copied(), "node id")?;
        if id != nodes.len() {
            return Err(parse_err(n, format!("node id {id} out of sequence, expected {}", nodes.len())));
        }
        let rest = toks.get(2..).unwrap_or(&[]);
        let kind = match toks.get(1).copied() {
            Some("Q") => {
                let (ls, t, f) = children(n, rest)?;
                NodeKind::Query { disj: Clause::new(ls), t, f }
            }
            Some("SPLIT") => {
                let (ls, t, f) = children(n, rest)?;
                NodeKind::Split { sub: Clause::new(ls), t, f }
            }
            Some("FORGET") => NodeKind::Forget { child: num(n, rest.first().copied(), "child")? },
            Some("SINK") if rest.first() == Some(&"EM") => NodeKind::Sink(SinkLabel::ExcludedMiddle),
            Some("SINK") => NodeKind::Sink(SinkLabel::Axiom(num(n, rest.first().copied(), "axiom index")?)),
            other => return Err(parse_err(n, format!("unknown node kind {other:?}"))),
        };
        nodes.push(BpNode { record: parse_record(n, rec)?, kind });
    }
    Ok(BranchingProgram { s, num_vars, source, nodes })
}

pub fn print_restriction(r: &Restriction) -> String {
    let mut out = String::new();
    if let Some(st) = &r.structure {
        writeln!(out, "budget {}", st.budget).unwrap();
        for (name, vars) in &st.groups {
            let vs: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
            writeln!(out, "group {name} {}", vs.join(" ")).unwrap();
        }
    }
    for (v, b) in &r.assignments {
        writeln!(out, "{v} {}", *b as u8).unwrap();
    }
    out
}

pub fn parse_restriction(text: &str) -> Result<Restriction> {
    let mut r = Restriction::new();
    let mut budget = None;
    let mut groups = Vec::new();
    for (n, l) in lines(text).filter(|(_, l)| !l.starts_with('#')) {
        let mut it = l.split_whitespace();
        match it.next() {
            Some("budget") => budget = Some(num(n, it.next(), "budget")?),
            Some("group") => {
                let name = it.next().ok_or_else(|| parse_err(n, "missing group name"))?.to_string();
                let vars = it.map(|t| num(n, Some(t), "variable")).collect::<Result<Vec<u32>>>()?;
                groups.push((name, vars));
            }
            Some(v) => {
                let var: u32 = num(n, Some(v), "variable")?;
                if var == 0 {
                    return Err(parse_err(n, "variable 0"));
                }
                let b = match it.next() {
                    Some("0") => false,
                    Some("1") => true,
                    other => return Err(parse_err(n, format!("value must be 0 or 1, got {other:?}"))),
                };
                if r.assignments.insert(var, b).is_some() {
                    return Err(parse_err(n, format!("variable {var} assigned twice")));
                }
            }
            None => {}
        }
    }
    if budget.is_some() || !groups.is_empty() {
        r.structure = Some(Structure { budget: budget.unwrap_or(0), groups });
    }
    Ok(r)
}

pub fn print_graph(g: &MultipartiteGraph) -> String {
    let mut out = format!("g {} {}\n", g.k, g.n);
    for ((b1, i), (b2, j)) in g.edges() {
        writeln!(out, "e {b1} {i} {b2} {j}").unwrap();
    }
    out
}

pub fn parse_graph(text: &str) -> Result<MultipartiteGraph> {
    let mut g: Option<MultipartiteGraph> = None;
    for (n, l) in lines(text).filter(|(_, l)| !l.starts_with('#')) {
        let mut it = l.split_whitespace();
        match it.next() {
            Some("g") => {
                if g.is_some() {
                    return Err(parse_err(n, "second header"));
                }
                g = Some(MultipartiteGraph::empty(num(n, it.next(), "k")?, num(n, it.next(), "n")?));
            }
            Some("e") => {
                let g = g.as_mut().ok_or_else(|| parse_err(n, "edge before the 'g k n' header"))?;
                let mut x = || num::<u32>(n, it.next(), "vertex index");
                let (a, b, c, d) = (x()?, x()?, x()?, x()?);
                g.add_edge((a, b), (c, d)).map_err(|e| parse_err(n, e.to_string()))?;
            }
            other => return Err(parse_err(n, format!("unknown line kind {other:?}"))),
        }
    }
    g.ok_or_else(|| parse_err(0, "missing 'g k n' header"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoders::{encode_php, PhpMode};

    #[test]
    fn php_header() {
        let text = print_dimacs(&encode_php(3, 2, PhpMode::BinaryPairwise).unwrap());
        assert!(text.contains("p cnf 3 6\n"));
        assert!(text.starts_with("c family "));
    }

    #[test]
    fn bp_lines() {
        let text = "b res 1 1\n0 Q 1 T:1 F:2 |\n1 SINK 1 | ( 1 )\n2 SINK 0 | ( -1 )\n";
        let bp = parse_bp(text).unwrap();
        assert_eq!(print_bp(&bp), text);
        assert!(parse_bp("b res 1 1\n0 Q 1 T:1 |\n").is_err());
    }

    #[test]
    fn resp_lines() {
        let text = "r res 1 1\n0 AX 0 : ( 1 ) 0\n1 AX 1 : ( -1 ) 0\n2 CUT 0 1 : 0\n";
        let p = parse_rule_proof(text).unwrap();
        assert_eq!(p.steps[2].rule, Rule::Cut(0, 1));
        assert_eq!(print_rule_proof(&p), text);
    }
}
