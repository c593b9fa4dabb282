//! Random restrictions, survival statistics, bottlenecks, analytic bounds
//! and a brute-force satisfiability oracle.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::{CnfFormula, VarDescriptor};
use crate::covering::record_covering_number;
use crate::encoders::bits_for;
use crate::error::{Error, Result};
use crate::graphs::log2_exact;
use crate::logic::Term;
use crate::proofs::{check_branching_program, BranchingProgram};
use crate::restriction::{Restriction, Structure};

/// Variable of bit `pos` (1-based) of `group` in the binary clique and
/// pigeonhole encodings, which allocate the witness bits first, group by group.
pub fn bit_var(group: u32, pos: u32, width: u32) -> u32 {
    group * width + pos
}

fn restriction_over(groups: u32, width: u32, free: &[u32], budget: usize, name: &str, rng: &mut ChaCha8Rng) -> Restriction {
    let mut r = Restriction::new();
    let mut st = Structure { budget, groups: Vec::new() };
    for g in 0..groups {
        let mut vars = Vec::with_capacity(budget);
        for i in sample(rng, free.len(), budget) {
            let v = bit_var(g, free[i], width);
            r.assignments.insert(v, rng.gen());
            vars.push(v);
        }
        vars.sort_unstable();
        st.groups.push((format!("{name}{g}"), vars));
    }
    r.structure = Some(st);
    r
}

/// Bits per block fixed by the clique restriction: ⌊log n / 2^{s+1}⌋.
pub fn block_budget(n: u32, s: u32) -> Result<usize> {
    let width = log2_exact(n).ok_or_else(|| Error::Param(format!("block size {n} is not a power of two")))?;
    Ok((width >> (s + 1).min(31)) as usize)
}

/// In each of `k` blocks, sets ⌊log n / 2^{s+1}⌋ distinct bits uniformly.
pub fn sample_block_restriction(n: u32, k: u32, s: u32, seed: u64) -> Result<Restriction> {
    let budget = block_budget(n, s)?;
    let width = bits_for(n);
    let free: Vec<u32> = (1..=width).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(restriction_over(k, width, &free, budget, "block", &mut rng))
}

/// Sets `t` distinct bits of each of `m` pigeons uniformly.
pub fn sample_bit_restriction(m: u32, n: u32, t: u32, seed: u64) -> Result<Restriction> {
    let width = bits_for(n);
    if t > width {
        return Err(Error::Param(format!("t = {t} exceeds the {width} bits of a pigeon")));
    }
    let free: Vec<u32> = (1..=width).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(restriction_over(m, width, &free, t as usize, "pigeon", &mut rng))
}

/// A term survives unless every one of its literals is set false.
pub fn survives(term: &Term, rho: &Restriction) -> bool {
    term.is_top() || !term.lits().iter().all(|&l| rho.lit_value(l) == Some(false))
}

/// Restriction families for survival statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Binary clique bits, ⌊log n / 2^{s+1}⌋ bits fixed per block.
    Clique { n: u32, k: u32, s: u32 },
    /// Binary pigeonhole bits after a t-bit restriction fixing positions
    /// 1..=t; `s_bits` of the remaining bits fixed per pigeon.
    Php { m: u32, n: u32, t: u32, s_bits: u32 },
}

impl Family {
    fn width(&self) -> u32 {
        match *self {
            Family::Clique { n, .. } | Family::Php { n, .. } => bits_for(n),
        }
    }

    fn groups(&self) -> u32 {
        match *self {
            Family::Clique { k, .. } => k,
            Family::Php { m, .. } => m,
        }
    }

    /// Positions still open to the restriction.
    fn free(&self) -> Vec<u32> {
        match *self {
            Family::Clique { .. } => (1..=self.width()).collect(),
            Family::Php { t, .. } => (t + 1..=self.width()).collect(),
        }
    }

    fn budget(&self) -> Result<usize> {
        match *self {
            Family::Clique { n, s, .. } => block_budget(n, s),
            Family::Php { n, t, s_bits, .. } => {
                let u = bits_for(n).saturating_sub(t);
                if t >= bits_for(n) || s_bits > u {
                    return Err(Error::Param(format!("need t < log n and s_bits <= {u}")));
                }
                Ok(s_bits as usize)
            }
        }
    }

    /// Survival bound: 1 − γ^s/2^{2s} with γ = 2^{-(s+1)} for cliques,
    /// 1 − 1/(u^s 2^s) with u = log n − t for pigeons.
    pub fn bound(&self) -> f64 {
        match *self {
            Family::Clique { s, .. } => {
                let gamma = 0.5f64.powi(s as i32 + 1);
                1.0 - gamma.powi(s as i32) / 4f64.powi(s as i32)
            }
            Family::Php { n, t, s_bits, .. } => {
                let u = (bits_for(n) - t) as f64;
                1.0 - 1.0 / (u.powi(s_bits as i32) * 2f64.powi(s_bits as i32))
            }
        }
    }

    /// Splits the term into (group, position, sign) triples.
    fn locate(&self, term: &Term) -> Result<BTreeMap<u32, Vec<(u32, bool)>>> {
        let width = self.width();
        let free = self.free();
        let mut out: BTreeMap<u32, Vec<(u32, bool)>> = BTreeMap::new();
        for &l in term.lits() {
            let (g, p) = ((l.var - 1) / width, (l.var - 1) % width + 1);
            if g >= self.groups() || !free.contains(&p) {
                return Err(Error::Precondition(format!("literal {l} lies outside the open bits of the family")));
            }
            out.entry(g).or_default().push((p, l.positive));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    MonteCarlo { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalReport {
    pub probability: f64,
    /// Numerator and denominator, in exact mode.
    pub exact: Option<(u128, u128)>,
    pub bound: f64,
    /// Standard error, in Monte Carlo mode.
    pub sigma: Option<f64>,
    pub seed: Option<u64>,
    pub pass: bool,
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Probability that `term` survives a random restriction of `family`.
pub fn survival_probability(term: &Term, family: Family, mode: Mode) -> Result<SurvivalReport> {
    let groups = family.locate(term)?;
    let budget = family.budget()?;
    let free = family.free();
    let bound = family.bound();
    match mode {
        Mode::Exact => {
            if free.len() > 5 || groups.len() > 3 {
                return Err(Error::Budget(format!(
                    "exact enumeration covers at most 5 open bits and 3 groups (got {} and {}); use montecarlo",
                    free.len(),
                    groups.len()
                )));
            }
            // The empty term is never killed.
            let (mut killed, mut total) = (u128::from(!groups.is_empty()), 1u128);
            for lits in groups.values() {
                let (mut k, mut all) = (0u128, 0u128);
                for mask in 0u32..1 << free.len() {
                    if mask.count_ones() as usize != budget {
                        continue;
                    }
                    for values in 0u32..1 << budget {
                        all += 1;
                        let chosen: Vec<u32> = (0..free.len()).filter(|i| mask >> i & 1 == 1).map(|i| free[i]).collect();
                        let val = |p: u32| chosen.iter().position(|&c| c == p).map(|i| values >> i & 1 == 1);
                        if lits.iter().all(|&(p, sign)| val(p) == Some(!sign)) {
                            k += 1;
                        }
                    }
                }
                killed *= k;
                total *= all;
            }
            let num = total - killed;
            let g = gcd(num, total).max(1);
            let (num, den) = (num / g, total / g);
            let probability = num as f64 / den as f64;
            Ok(SurvivalReport { probability, exact: Some((num, den)), bound, sigma: None, seed: None, pass: probability <= bound + 1e-12 })
        }
        Mode::MonteCarlo { trials, seed } => {
            if trials == 0 {
                return Err(Error::Param("need at least one trial".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let width = family.width();
            let mut alive = 0u64;
            for _ in 0..trials {
                let mut rho = Restriction::new();
                for &g in groups.keys() {
                    for i in sample(&mut rng, free.len(), budget) {
                        rho.assignments.insert(bit_var(g, free[i], width), rng.gen());
                    }
                }
                alive += survives(term, &rho) as u64;
            }
            let p = alive as f64 / trials as f64;
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            Ok(SurvivalReport { probability: p, exact: None, bound, sigma: Some(sigma), seed: Some(seed), pass: p <= bound + 3.0 * sigma })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BottleneckMode {
    /// Covering number of the record's negation.
    Covering,
    /// Distinct pigeons (first group index of a bit or unary variable).
    Pigeons,
}

/// Nodes with nonempty records reaching `threshold` under `mode`.
pub fn find_bottlenecks(f: &CnfFormula, bp: &BranchingProgram, mode: BottleneckMode, threshold: usize) -> Result<Vec<usize>> {
    check_branching_program(f, bp)?;
    let pigeon = |v: u32| match f.name(v) {
        Some(VarDescriptor::Bit { group, .. }) => group.first().copied(),
        Some(VarDescriptor::Unary { args }) => args.first().copied(),
        _ => None,
    };
    let mut out = Vec::new();
    for (i, node) in bp.nodes.iter().enumerate() {
        if node.record.is_empty() {
            continue;
        }
        let value = match mode {
            BottleneckMode::Covering => record_covering_number(&node.record).0,
            BottleneckMode::Pigeons => {
                let ps: BTreeSet<u32> =
                    node.record.iter().flat_map(|c| c.lits().iter().filter_map(|l| pigeon(l.var))).collect();
                ps.len()
            }
        };
        if value >= threshold {
            out.push(i);
        }
    }
    Ok(out)
}

/// ξ(1) = 1, ξ(s) = ξ(s−1) + 1 + s.
pub fn xi(s: u32) -> Result<u64> {
    if s == 0 {
        return Err(Error::Param("ξ is defined for s >= 1".into()));
    }
    Ok((2..=s as u64).fold(1, |x, s| x + 1 + s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundKind {
    /// n^{(k−1)/(24² s)}.
    Clique { n: f64, k: f64, s: u32 },
    /// e^{n/(4^{ξ(s)+1} s! 2^t u^{ξ(s)})}, u = log n − t.
    Php { n: f64, s: u32, t: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub params: String,
    /// Natural logarithm of the bound.
    pub ln_bound: f64,
    pub measured: Option<f64>,
    /// ln(bound) − ln(measured).
    pub margin: Option<f64>,
}

impl BoundReport {
    pub fn with_measured(mut self, measured: f64) -> BoundReport {
        self.measured = Some(measured);
        self.margin = Some(self.ln_bound - measured.ln());
        self
    }
}

fn ln_factorial(s: u32) -> f64 {
    (2..=s).map(|i| (i as f64).ln()).sum()
}

pub fn bound_calculator(kind: BoundKind) -> Result<BoundReport> {
    match kind {
        BoundKind::Clique { n, k, s } => {
            if n < 2.0 || k < 2.0 || s == 0 {
                return Err(Error::Param("clique bound needs n >= 2, k >= 2, s >= 1".into()));
            }
            let ln_bound = n.ln() * (k - 1.0) / (576.0 * s as f64);
            Ok(BoundReport { params: format!("clique n={n} k={k} s={s}"), ln_bound, measured: None, margin: None })
        }
        BoundKind::Php { n, s, t } => {
            let u = n.log2() - t;
            if u <= 0.0 || s == 0 || t < 0.0 {
                return Err(Error::Param(format!("php bound needs s >= 1 and u = log n − t > 0, got u = {u}")));
            }
            let x = xi(s)? as f64;
            let ln_exponent = n.ln() - (x + 1.0) * 4f64.ln() - ln_factorial(s) - t * 2f64.ln() - x * u.ln();
            Ok(BoundReport { params: format!("php n={n} s={s} t={t}"), ln_bound: ln_exponent.exp(), measured: None, margin: None })
        }
    }
}

/// True iff no assignment satisfies `f`; at most 24 variables.
pub fn brute_force_unsat(f: &CnfFormula) -> Result<bool> {
    if f.num_vars > 24 {
        return Err(Error::Budget(format!("{} variables, enumeration limit is 24", f.num_vars)));
    }
    let masks: Vec<(u32, u32)> = f
        .clauses
        .iter()
        .map(|c| {
            c.lits().iter().fold((0, 0), |(p, n), l| {
                let bit = 1u32 << (l.var - 1);
                if l.positive {
                    (p | bit, n)
                } else {
                    (p, n | bit)
                }
            })
        })
        .collect();
    let sat = (0u32..1 << f.num_vars).any(|a| masks.iter().all(|&(p, n)| a & p != 0 || !a & n != 0));
    Ok(!sat)
}
