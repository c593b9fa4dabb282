//! Exact covering numbers of s-DNF lines.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::logic::{Literal, Record, SClause};

/// Minimum number of literals hitting every term of `d`, with one optimal
/// witness set. Literal identity includes the sign.
pub fn covering_number(d: &SClause) -> Result<(usize, Vec<Literal>)> {
    if d.is_top() {
        return Err(Error::InvalidInput("covering number of the constant true".into()));
    }
    let terms: Vec<Vec<Literal>> = d.terms().iter().map(|t| t.lits().to_vec()).collect();
    Ok(min_cover(&terms))
}

/// Covering number of the s-DNF equivalent to the negation of a record.
/// Tautological conjuncts contribute no term.
pub fn record_covering_number(r: &Record) -> (usize, Vec<Literal>) {
    let terms: Vec<Vec<Literal>> = r
        .iter()
        .filter(|c| !c.is_tautology())
        .map(|c| c.lits().iter().map(|l| l.complement()).collect())
        .collect();
    min_cover(&terms)
}

struct Search {
    terms: Vec<Vec<usize>>,
    occurs: Vec<Vec<usize>>,
    hit: Vec<u32>,
    chosen: Vec<usize>,
    best: Vec<usize>,
}

impl Search {
    fn first_uncovered(&self) -> Option<usize> {
        let mut pick: Option<usize> = None;
        for (i, t) in self.terms.iter().enumerate() {
            if self.hit[i] == 0 && pick.map_or(true, |p| t.len() < self.terms[p].len()) {
                pick = Some(i);
                if t.len() == 1 {
                    break;
                }
            }
        }
        pick
    }

    /// Size of a greedy family of pairwise literal-disjoint uncovered terms.
    fn lower_bound(&self) -> usize {
        let mut used = vec![false; self.occurs.len()];
        let mut count = 0;
        for (i, t) in self.terms.iter().enumerate() {
            if self.hit[i] == 0 && t.iter().all(|&l| !used[l]) {
                for &l in t {
                    used[l] = true;
                }
                count += 1;
            }
        }
        count
    }

    fn take(&mut self, l: usize, delta: i32) {
        for &t in &self.occurs[l] {
            self.hit[t] = (self.hit[t] as i32 + delta) as u32;
        }
    }

    fn run(&mut self) {
        if self.chosen.len() + self.lower_bound() >= self.best.len() {
            return;
        }
        let Some(t) = self.first_uncovered() else {
            self.best = self.chosen.clone();
            return;
        };
        let mut options = self.terms[t].clone();
        options.sort_by_key(|&l| std::cmp::Reverse(self.occurs[l].iter().filter(|&&u| self.hit[u] == 0).count()));
        for l in options {
            self.chosen.push(l);
            self.take(l, 1);
            self.run();
            self.take(l, -1);
            self.chosen.pop();
        }
    }
}

/// Exact minimum hitting set of a family of literal sets.
pub fn min_cover(terms: &[Vec<Literal>]) -> (usize, Vec<Literal>) {
    let mut ids: HashMap<Literal, usize> = HashMap::new();
    let mut table: Vec<Literal> = Vec::new();
    let mut sets: Vec<Vec<usize>> = Vec::new();
    for t in terms {
        let mut s: Vec<usize> = t
            .iter()
            .map(|l| {
                *ids.entry(*l).or_insert_with(|| {
                    table.push(*l);
                    table.len() - 1
                })
            })
            .collect();
        s.sort_unstable();
        s.dedup();
        sets.push(s);
    }
    if sets.iter().any(Vec::is_empty) {
        // An empty term cannot be hit; the caller excluded the constant true.
        return (usize::MAX, Vec::new());
    }
    sets.sort_by_key(Vec::len);
    sets.dedup();
    // A term containing another term is hit whenever the smaller one is.
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for s in sets {
        if !kept.iter().any(|k| k.iter().all(|x| s.binary_search(x).is_ok())) {
            kept.push(s);
        }
    }
    let mut occurs = vec![Vec::new(); table.len()];
    for (i, s) in kept.iter().enumerate() {
        for &l in s {
            occurs[l].push(i);
        }
    }
    let greedy = greedy_cover(&kept, &occurs);
    let mut search = Search { hit: vec![0; kept.len()], terms: kept, occurs, chosen: Vec::new(), best: greedy };
    // Make the greedy bound strict so an equally good cover is still found first.
    search.best.push(usize::MAX);
    search.run();
    if search.best.last() == Some(&usize::MAX) {
        search.best.pop();
    }
    let mut witness: Vec<Literal> = search.best.iter().map(|&l| table[l]).collect();
    witness.sort_unstable();
    (witness.len(), witness)
}

fn greedy_cover(terms: &[Vec<usize>], occurs: &[Vec<usize>]) -> Vec<usize> {
    let mut hit = vec![false; terms.len()];
    let mut left = terms.len();
    let mut out = Vec::new();
    while left > 0 {
        let (l, _) = occurs
            .iter()
            .enumerate()
            .map(|(l, ts)| (l, ts.iter().filter(|&&t| !hit[t]).count()))
            .max_by_key(|&(_, c)| c)
            .expect("uncovered term has a literal");
        for &t in &occurs[l] {
            if !hit[t] {
                hit[t] = true;
                left -= 1;
            }
        }
        out.push(l);
    }
    out
}
