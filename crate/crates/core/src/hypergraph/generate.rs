//! The three null models: `H_k(n, p)`, `H_k(n, m)` and `H'_k(n, m)`.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng as _;
use rand_distr::{Binomial, Distribution, Poisson};

use super::{sort_edges, Hypergraph, ModelParams};
use crate::error::{Error, Result};
use crate::logspace::binomial_exact;
use crate::rng::{rng_from_seed, Rng};

/// Up to this many k-sets, generators walk every k-set explicitly
/// (per-set Bernoulli trials, or sampling indices without replacement).
/// Beyond it they draw an edge count and then uniform distinct k-sets.
/// Both paths have the same law; they consume the RNG differently.
pub const EXHAUSTIVE_SET_LIMIT: u128 = 1 << 18;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ModelKind {
    /// Each k-set present independently with probability `p`.
    Gnp,
    /// Exactly `m` distinct uniform k-sets.
    Gnm,
    /// `m` independent uniform k-sets (repeats allowed).
    GnmReplace,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Gnp => "gnp",
            ModelKind::Gnm => "gnm",
            ModelKind::GnmReplace => "gnm_rep",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gnp" => Ok(ModelKind::Gnp),
            "gnm" => Ok(ModelKind::Gnm),
            "gnm_rep" | "gnm-rep" => Ok(ModelKind::GnmReplace),
            other => Err(Error::parameter(format!(
                "unknown model {other:?} (expected gnp, gnm or gnm_rep)"
            ))),
        }
    }
}

/// Draws a hypergraph from `kind` with the given parameters. Identical
/// `(kind, params, seed)` give identical hypergraphs.
pub fn generate(kind: ModelKind, params: &ModelParams, seed: u64) -> Result<Hypergraph> {
    let (n, k) = (params.n, params.k);
    let mut rng = rng_from_seed(seed);
    let total = binomial_exact(n as u64, k as u64);
    match kind {
        ModelKind::Gnp => {
            let p = params.p();
            let flat = match total {
                Some(t) if t <= EXHAUSTIVE_SET_LIMIT => {
                    let mut flat = Vec::new();
                    for_each_k_set(n, k, |set| {
                        if rng.random::<f64>() < p {
                            flat.extend_from_slice(set);
                        }
                    });
                    flat
                }
                _ => {
                    let count = sample_set_count(&mut rng, total, params.total_sets(), p);
                    distinct_sets(&mut rng, k, count, |rng, buf| sample_k_set(rng, n, buf))
                }
            };
            Hypergraph::from_flat(n, k, flat, false)
        }
        ModelKind::Gnm => {
            let m = params.m;
            if let Some(t) = total {
                if m as u128 > t {
                    return Err(Error::parameter(format!(
                        "m = {m} exceeds the number of k-sets C({n}, {k}) = {t}"
                    )));
                }
            }
            let flat = match total {
                Some(t) if t <= EXHAUSTIVE_SET_LIMIT => {
                    let mut picked = index::sample(&mut rng, t as usize, m as usize).into_vec();
                    picked.sort_unstable();
                    let mut flat = Vec::with_capacity(m as usize * k);
                    let mut next = picked.iter().peekable();
                    let mut i = 0usize;
                    for_each_k_set(n, k, |set| {
                        if next.peek() == Some(&&i) {
                            flat.extend_from_slice(set);
                            next.next();
                        }
                        i += 1;
                    });
                    flat
                }
                _ => distinct_sets(&mut rng, k, m, |rng, buf| sample_k_set(rng, n, buf)),
            };
            Hypergraph::from_flat(n, k, flat, false)
        }
        ModelKind::GnmReplace => {
            let mut flat = vec![0u32; params.m as usize * k];
            for e in flat.chunks_exact_mut(k) {
                sample_k_set(&mut rng, n, e);
            }
            Hypergraph::from_flat(n, k, flat, true)
        }
    }
}

/// Writes a uniform k-subset of `0..n` into `out`, ascending.
pub fn sample_k_set(rng: &mut Rng, n: usize, out: &mut [u32]) {
    let k = out.len();
    if 4 * k <= n {
        // Rejection is cheap when k ≪ n.
        let mut filled = 0;
        while filled < k {
            let v = rng.random_range(0..n as u32);
            if !out[..filled].contains(&v) {
                out[filled] = v;
                filled += 1;
            }
        }
    } else {
        for (slot, v) in out.iter_mut().zip(index::sample(rng, n, k)) {
            *slot = v as u32;
        }
    }
    out.sort_unstable();
}

/// Calls `f` on every k-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_k_set(n: usize, k: usize, mut f: impl FnMut(&[u32])) {
    if k > n {
        return;
    }
    let mut set: Vec<u32> = (0..k as u32).collect();
    loop {
        f(&set);
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if (set[i] as usize) < n - k + i {
                break;
            }
            if i == 0 {
                return;
            }
        }
        set[i] += 1;
        for j in i + 1..k {
            set[j] = set[j - 1] + 1;
        }
    }
}

/// Draws the number of successes among `trials` Bernoulli(`p`) k-sets.
///
/// `Binomial` needs a 64-bit trial count; beyond that the count is drawn
/// from `Poisson(trials·p)`, whose total-variation distance from the
/// binomial is at most `p`.
pub(crate) fn sample_set_count(rng: &mut Rng, exact: Option<u128>, approx: f64, p: f64) -> u64 {
    if p <= 0.0 {
        return 0;
    }
    match exact {
        Some(t) if t <= u64::MAX as u128 => Binomial::new(t as u64, p.min(1.0))
            .expect("valid binomial")
            .sample(rng),
        _ => {
            let mean = approx * p;
            if mean <= 0.0 {
                0
            } else {
                Poisson::new(mean).expect("valid poisson").sample(rng) as u64
            }
        }
    }
}

/// `count` distinct k-sets from `draw`, flat and sorted. Draws in one batch,
/// removes duplicates and tops up until the target is met.
pub(crate) fn distinct_sets(
    rng: &mut Rng,
    k: usize,
    count: u64,
    mut draw: impl FnMut(&mut Rng, &mut [u32]),
) -> Vec<u32> {
    let target = count as usize;
    let mut flat: Vec<u32> = Vec::with_capacity(target * k);
    let mut buf = vec![0u32; k];
    while flat.len() < target * k {
        let missing = target - flat.len() / k;
        for _ in 0..missing {
            draw(rng, &mut buf);
            flat.extend_from_slice(&buf);
        }
        flat = dedup_sorted(sort_edges(flat, k), k);
    }
    flat
}

fn dedup_sorted(flat: Vec<u32>, k: usize) -> Vec<u32> {
    let mut out: Vec<u32> = Vec::with_capacity(flat.len());
    for e in flat.chunks_exact(k) {
        if out.len() < k || &out[out.len() - k..] != e {
            out.extend_from_slice(e);
        }
    }
    out
}
