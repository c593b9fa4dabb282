//! Multipartite graphs: sampling, clique search and the extension property.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A vertex is `(block, index)` with `index` in `0..n`.
pub type Vertex = (u32, u32);

/// `k` blocks of `n` vertices; edges only join distinct blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultipartiteGraph {
    pub k: u32,
    pub n: u32,
    edges: BTreeSet<(Vertex, Vertex)>,
    adj: Vec<bool>,
}

impl MultipartiteGraph {
    pub fn empty(k: u32, n: u32) -> MultipartiteGraph {
        let size = (k * n) as usize;
        MultipartiteGraph { k, n, edges: BTreeSet::new(), adj: vec![false; size * size] }
    }

    pub fn complete(k: u32, n: u32) -> MultipartiteGraph {
        let mut g = MultipartiteGraph::empty(k, n);
        for b1 in 0..k {
            for b2 in b1 + 1..k {
                for i in 0..n {
                    for j in 0..n {
                        g.add_edge((b1, i), (b2, j)).expect("cross-block edge");
                    }
                }
            }
        }
        g
    }

    fn id(&self, v: Vertex) -> usize {
        (v.0 * self.n + v.1) as usize
    }

    pub fn add_edge(&mut self, a: Vertex, b: Vertex) -> Result<()> {
        if a.0 >= self.k || b.0 >= self.k || a.1 >= self.n || b.1 >= self.n {
            return Err(Error::Range(format!("vertex outside {}x{} graph", self.k, self.n)));
        }
        if a.0 == b.0 {
            return Err(Error::InvalidInput(format!("edge inside block {}", a.0)));
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let size = (self.k * self.n) as usize;
        let (ia, ib) = (self.id(a), self.id(b));
        self.adj[ia * size + ib] = true;
        self.adj[ib * size + ia] = true;
        self.edges.insert((a, b));
        Ok(())
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        if a.0 == b.0 {
            return false;
        }
        let size = (self.k * self.n) as usize;
        self.adj[self.id(a) * size + self.id(b)]
    }

    /// Edges with the smaller endpoint first, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// Edge probability `n^(-(1+eps)*2/(k-1))`.
pub fn default_edge_probability(n: u32, k: u32, epsilon: f64) -> f64 {
    (n as f64).powf(-(1.0 + epsilon) * 2.0 / (k as f64 - 1.0))
}

pub fn sample_graph(n: u32, k: u32, epsilon: f64, seed: u64) -> Result<MultipartiteGraph> {
    if epsilon <= 0.0 {
        return Err(Error::Param("epsilon must be positive".into()));
    }
    if n < 2 || k < 2 {
        return Err(Error::Param("need n >= 2 and k >= 2".into()));
    }
    sample_graph_with_p(n, k, default_edge_probability(n, k, epsilon), seed)
}

/// Samples each cross-block pair independently with probability `p`.
pub fn sample_graph_with_p(n: u32, k: u32, p: f64, seed: u64) -> Result<MultipartiteGraph> {
    if n < 2 || k < 2 {
        return Err(Error::Param("need n >= 2 and k >= 2".into()));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Param(format!("edge probability {p} outside (0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = MultipartiteGraph::empty(k, n);
    for b1 in 0..k {
        for b2 in b1 + 1..k {
            for i in 0..n {
                for j in 0..n {
                    if rng.gen::<f64>() < p {
                        g.add_edge((b1, i), (b2, j))?;
                    }
                }
            }
        }
    }
    Ok(g)
}

/// Exact k-clique search, one vertex per block.
pub fn has_k_clique(g: &MultipartiteGraph) -> Option<Vec<Vertex>> {
    fn extend(g: &MultipartiteGraph, chosen: &mut Vec<Vertex>) -> bool {
        let b = chosen.len() as u32;
        if b == g.k {
            return true;
        }
        for i in 0..g.n {
            let v = (b, i);
            if chosen.iter().all(|&u| g.has_edge(u, v)) {
                chosen.push(v);
                if extend(g, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::with_capacity(g.k as usize);
    extend(g, &mut chosen).then_some(chosen)
}

/// Number of bits naming a vertex inside a block.
pub fn log2_exact(n: u32) -> Option<u32> {
    n.is_power_of_two().then(|| n.trailing_zeros())
}

/// Bit `pos` (1-based, most significant first) of `a` over `width` bits.
pub fn bit_of(a: u32, pos: u32, width: u32) -> bool {
    (a >> (width - pos)) & 1 == 1
}

/// A vertex index agrees with every assigned bit `(pos, value)` of its block.
pub fn consistent(assigned: &[(u32, bool)], a: u32, width: u32) -> bool {
    assigned.iter().all(|&(pos, value)| bit_of(a, pos, width) == value)
}

/// First failure of the extension property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionCounterexample {
    pub u: Vec<Vertex>,
    /// Bits assigned in `block`, as `(position, value)`.
    pub sigma: Vec<(u32, bool)>,
    pub block: u32,
}

/// All size-`g` subsets of `1..=width`, each with every value pattern.
pub fn bit_assignments(width: u32, g: u32) -> Vec<Vec<(u32, bool)>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << width) {
        if mask.count_ones() != g {
            continue;
        }
        let positions: Vec<u32> = (1..=width).filter(|p| mask >> (p - 1) & 1 == 1).collect();
        for values in 0u32..(1 << g) {
            out.push(positions.iter().enumerate().map(|(i, &p)| (p, values >> i & 1 == 1)).collect());
        }
    }
    out
}

/// Decides whether every α-transversal set is β-extendible.
pub fn check_extension_property(
    g: &MultipartiteGraph,
    alpha: f64,
    beta: f64,
) -> Result<Option<ExtensionCounterexample>> {
    let width = log2_exact(g.n).ok_or_else(|| Error::Param("block size must be a power of two".into()))?;
    if alpha < 0.0 || beta < 0.0 {
        return Err(Error::Param("alpha and beta must be non-negative".into()));
    }
    let max_u = (alpha * g.k as f64).floor() as u32;
    let bits = (beta * width as f64).floor() as u32;
    if bits > width {
        return Err(Error::Param("beta assigns more bits than a block has".into()));
    }
    let sigmas = bit_assignments(width, bits);
    let mut found = None;
    for_each_transversal(g, max_u.min(g.k), &mut |u: &[Vertex]| {
        for b in 0..g.k {
            if u.iter().any(|v| v.0 == b) {
                continue;
            }
            for sigma in &sigmas {
                let ok = (0..g.n).any(|a| consistent(sigma, a, width) && u.iter().all(|&x| g.has_edge(x, (b, a))));
                if !ok {
                    found = Some(ExtensionCounterexample { u: u.to_vec(), sigma: sigma.clone(), block: b });
                    return false;
                }
            }
        }
        true
    });
    Ok(found)
}

/// Calls `f` on every set of at most `max` vertices from distinct blocks,
/// by increasing size; stops when `f` returns false.
pub fn for_each_transversal(g: &MultipartiteGraph, max: u32, f: &mut dyn FnMut(&[Vertex]) -> bool) {
    fn rec(
        g: &MultipartiteGraph,
        size: u32,
        next_block: u32,
        cur: &mut Vec<Vertex>,
        f: &mut dyn FnMut(&[Vertex]) -> bool,
    ) -> bool {
        if cur.len() as u32 == size {
            return f(cur);
        }
        for b in next_block..g.k {
            for a in 0..g.n {
                cur.push((b, a));
                let go = rec(g, size, b + 1, cur, f);
                cur.pop();
                if !go {
                    return false;
                }
            }
        }
        true
    }
    let mut cur = Vec::new();
    for size in 0..=max {
        if !rec(g, size, 0, &mut cur, f) {
            return;
        }
    }
}
