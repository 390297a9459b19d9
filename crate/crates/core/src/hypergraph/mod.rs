//! k-uniform hypergraphs, ±1 colorings and the monochromatic-edge energy.

mod coloring;
mod generate;
mod io;

pub use coloring::Coloring;
pub(crate) use generate::{distinct_sets, for_each_k_set, sample_set_count};
pub use generate::{generate, sample_k_set, ModelKind, EXHAUSTIVE_SET_LIMIT};
pub use io::{
    parse_coloring, parse_hypergraph, read_coloring, read_hypergraph, write_coloring,
    write_hypergraph,
};

use crate::error::{Error, Result};
use crate::logspace::{binomial_exact, binomial_f64, ln_binomial};

/// A k-uniform hypergraph on vertices `0..n`.
///
/// Edges are stored flat (`k` indices per edge), each edge ascending and the
/// edge list in lexicographic order. Without `allows_multi` every edge is
/// distinct as a set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    k: usize,
    edges: Vec<u32>,
    allows_multi: bool,
}

impl Hypergraph {
    /// Builds a hypergraph from arbitrary-order edges, canonicalising them.
    pub fn new(n: usize, k: usize, edges: Vec<Vec<u32>>, allows_multi: bool) -> Result<Self> {
        let mut flat = Vec::with_capacity(edges.len() * k);
        for (i, e) in edges.iter().enumerate() {
            if e.len() != k {
                return Err(Error::parameter(format!(
                    "edge {i} has {} vertices, expected {k}",
                    e.len()
                )));
            }
            flat.extend_from_slice(e);
        }
        Self::from_flat(n, k, flat, allows_multi)
    }

    /// Same as [`Hypergraph::new`] for edges already laid out `k` at a time.
    pub fn from_flat(n: usize, k: usize, mut flat: Vec<u32>, allows_multi: bool) -> Result<Self> {
        if k == 0 {
            return Err(Error::parameter("edge arity k must be at least 1"));
        }
        if n > u32::MAX as usize {
            return Err(Error::parameter("vertex count exceeds u32 range"));
        }
        if !flat.len().is_multiple_of(k) {
            return Err(Error::parameter("flat edge buffer is not a multiple of k"));
        }
        for e in flat.chunks_exact_mut(k) {
            e.sort_unstable();
            if let Some(&last) = e.last() {
                if last as usize >= n {
                    return Err(Error::parameter(format!(
                        "vertex index {last} out of range for n = {n}"
                    )));
                }
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::parameter(format!("edge {e:?} repeats a vertex")));
            }
        }
        let flat = sort_edges(flat, k);
        if !allows_multi {
            if let Some(dup) = flat
                .chunks_exact(k)
                .zip(flat.chunks_exact(k).skip(1))
                .find(|(a, b)| a == b)
            {
                return Err(Error::parameter(format!(
                    "duplicate edge {:?} in a simple hypergraph",
                    dup.0
                )));
            }
        }
        Ok(Hypergraph {
            n,
            k,
            edges: flat,
            allows_multi,
        })
    }

    /// An edgeless hypergraph.
    pub fn empty(n: usize, k: usize) -> Self {
        Hypergraph {
            n,
            k,
            edges: Vec::new(),
            allows_multi: false,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn allows_multi(&self) -> bool {
        self.allows_multi
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len() / self.k
    }

    pub fn edge(&self, i: usize) -> &[u32] {
        &self.edges[i * self.k..(i + 1) * self.k]
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.edges.chunks_exact(self.k)
    }

    /// Returns a copy with one more edge (used by the Lipschitz checks).
    pub fn with_edge(&self, edge: &[u32]) -> Result<Self> {
        let mut flat = self.edges.clone();
        flat.extend_from_slice(edge);
        Self::from_flat(self.n, self.k, flat, self.allows_multi)
    }

    /// Returns a copy without edge `i`.
    pub fn without_edge(&self, i: usize) -> Self {
        let mut flat = self.edges.clone();
        flat.drain(i * self.k..(i + 1) * self.k);
        Hypergraph {
            edges: flat,
            ..self.clone()
        }
    }

    /// Vertex → incident edge ids, in CSR form.
    pub fn incidence(&self) -> Incidence {
        let mut degree = vec![0u32; self.n + 1];
        for &v in &self.edges {
            degree[v as usize + 1] += 1;
        }
        let mut offsets = Vec::with_capacity(self.n + 1);
        let mut acc = 0usize;
        for d in degree {
            acc += d as usize;
            offsets.push(acc);
        }
        let mut fill = offsets.clone();
        let mut edge_ids = vec![0u32; self.edges.len()];
        for (id, e) in self.edges().enumerate() {
            for &v in e {
                edge_ids[fill[v as usize]] = id as u32;
                fill[v as usize] += 1;
            }
        }
        Incidence { offsets, edge_ids }
    }

    /// `E_H(σ)`: the number of monochromatic edges, multi-edges counted
    /// with multiplicity.
    pub fn monochromatic_count(&self, sigma: &Coloring) -> Result<u64> {
        self.check_len(sigma)?;
        Ok(self.edges().filter(|e| sigma.is_monochromatic(e)).count() as u64)
    }

    pub(crate) fn check_len(&self, sigma: &Coloring) -> Result<()> {
        if sigma.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: sigma.len(),
            });
        }
        Ok(())
    }
}

pub(crate) fn sort_edges(mut flat: Vec<u32>, k: usize) -> Vec<u32> {
    let sorted = flat
        .chunks_exact(k)
        .zip(flat.chunks_exact(k).skip(1))
        .all(|(a, b)| a <= b);
    if sorted {
        return flat;
    }
    macro_rules! fixed {
        ($($w:literal)*) => {
            match k {
                $($w => {
                    flat.as_chunks_mut::<$w>().0.sort_unstable();
                    return flat;
                })*
                _ => {}
            }
        };
    }
    fixed!(1 2 3 4 5 6 7 8 9 10 11 12 13 14 15 16);
    let m = flat.len() / k;
    let mut order: Vec<u32> = (0..m as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        let (a, b) = (a as usize * k, b as usize * k);
        flat[a..a + k].cmp(&flat[b..b + k])
    });
    let mut out = Vec::with_capacity(flat.len());
    for i in order {
        let s = i as usize * k;
        out.extend_from_slice(&flat[s..s + k]);
    }
    out
}

/// Compressed vertex-to-edge incidence lists.
#[derive(Debug, Clone)]
pub struct Incidence {
    offsets: Vec<usize>,
    edge_ids: Vec<u32>,
}

impl Incidence {
    pub fn edges_of(&self, v: usize) -> &[u32] {
        &self.edge_ids[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }
}

/// `E_H(σ)` as a free function.
pub fn monochromatic_count(h: &Hypergraph, sigma: &Coloring) -> Result<u64> {
    h.monochromatic_count(sigma)
}

/// `Forb = C(n_plus, k) + C(n - n_plus, k)`, the number of k-sets that a
/// coloring with `n_plus` positive vertices makes monochromatic. `None` if
/// the exact value overflows `u128` (use [`ln_forb`] then).
pub fn forb(n_plus: u64, n: u64, k: u64) -> Option<u128> {
    assert!(n_plus <= n, "n_plus = {n_plus} exceeds n = {n}");
    binomial_exact(n_plus, k)?.checked_add(binomial_exact(n - n_plus, k)?)
}

/// `ln Forb(n_plus, n, k)`; `-inf` when both classes are smaller than `k`.
pub fn ln_forb(n_plus: u64, n: u64, k: u64) -> f64 {
    let a = ln_binomial(n_plus, k);
    let b = ln_binomial(n - n_plus, k);
    crate::logspace::log_sum_exp(&[a, b])
}

/// `Forb(n_plus, n, k) / C(n, k)`.
pub fn forb_fraction(n_plus: u64, n: u64, k: u64) -> f64 {
    crate::logspace::binomial_ratio(n_plus, n, k)
        + crate::logspace::binomial_ratio(n - n_plus, n, k)
}

/// `⟨σ, τ⟩ = n - 2·dist(σ, τ)`.
pub fn overlap(sigma: &Coloring, tau: &Coloring) -> Result<i64> {
    if sigma.len() != tau.len() {
        return Err(Error::LengthMismatch {
            expected: sigma.len(),
            actual: tau.len(),
        });
    }
    Ok(sigma.len() as i64 - 2 * sigma.hamming(tau) as i64)
}

/// Balanced: `| |σ⁻¹(+1)| - n/2 | ≤ √n`.
pub fn is_balanced(sigma: &Coloring) -> bool {
    is_balanced_count(sigma.count_plus(), sigma.len())
}

/// Balance test on the count of `+1` vertices, in exact integer arithmetic:
/// `(2a - n)^2 ≤ 4n`.
pub fn is_balanced_count(n_plus: usize, n: usize) -> bool {
    let dev = 2 * n_plus as i128 - n as i128;
    dev * dev <= 4 * n as i128
}

/// Parameters of the null models: mean-degree `d`, arity `k`, inverse
/// temperature `beta`, size `n`, edge count `m = ⌈dn/k⌉`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub k: usize,
    pub d: f64,
    pub beta: f64,
    pub m: u64,
}

impl ModelParams {
    /// Parameters from the mean-degree `d`; `m = ⌈dn/k⌉`.
    pub fn from_density(n: usize, k: usize, d: f64, beta: f64) -> Result<Self> {
        if !(d.is_finite() && d >= 0.0) {
            return Err(Error::parameter(format!("d = {d} must be finite and ≥ 0")));
        }
        let m = (d * n as f64 / k as f64).ceil() as u64;
        Self { n, k, d, beta, m }.validated()
    }

    /// Parameters from an explicit edge count; `d = mk/n`.
    pub fn from_edge_count(n: usize, k: usize, m: u64, beta: f64) -> Result<Self> {
        let d = if n == 0 {
            0.0
        } else {
            m as f64 * k as f64 / n as f64
        };
        Self { n, k, d, beta, m }.validated()
    }

    fn validated(self) -> Result<Self> {
        if self.k == 0 || self.k > self.n {
            return Err(Error::parameter(format!(
                "arity k = {} must satisfy 1 ≤ k ≤ n = {}",
                self.k, self.n
            )));
        }
        if !(self.beta.is_finite() || self.beta == f64::INFINITY) || self.beta < 0.0 {
            return Err(Error::parameter(format!(
                "beta = {} must be ≥ 0",
                self.beta
            )));
        }
        let p = self.p();
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::parameter(format!(
                "edge probability p = d / C(n-1, k-1) = {p} is outside [0, 1]"
            )));
        }
        Ok(self)
    }

    /// `p = d / C(n-1, k-1)`.
    pub fn p(&self) -> f64 {
        self.d / binomial_f64(self.n as u64 - 1, self.k as u64 - 1)
    }

    /// `N = C(n, k)` as a float.
    pub fn total_sets(&self) -> f64 {
        binomial_f64(self.n as u64, self.k as u64)
    }
}
