//! The planted model: draw a hidden coloring `σ`, then insert each
//! `σ`-monochromatic k-set with probability `p1` and each bichromatic one
//! with probability `p2 = e^β p1`.

use rand::seq::index;
use rand::Rng as _;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{
    distinct_sets, for_each_k_set, forb, sample_k_set, sample_set_count, Coloring, Hypergraph,
    ModelParams, EXHAUSTIVE_SET_LIMIT,
};
use crate::logspace::{binomial_exact, binomial_f64, ln_binomial};
use crate::rng::{rng_from_seed, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlantedProbs {
    /// Probability of each monochromatic k-set.
    pub p1: f64,
    /// Probability of each bichromatic k-set.
    pub p2: f64,
}

fn one_minus_exp(beta: f64) -> f64 {
    -(-beta).exp_m1()
}

/// `p1 = e^{−β}d / ((1 − 2^{1−k}(1 − e^{−β}))·C(n−1, k−1))` and `p2 = e^β p1`.
pub fn planted_params(d: f64, k: usize, n: usize, beta: f64) -> Result<PlantedProbs> {
    let params = ModelParams::from_density(n, k, d, beta)?;
    let denom = 1.0 - 2f64.powi(1 - k as i32) * one_minus_exp(beta);
    let p2 = params.p() / denom;
    let p1 = (-beta).exp() * p2;
    if !(0.0..=1.0).contains(&p2) || !(0.0..=1.0).contains(&p1) {
        return Err(Error::parameter(format!(
            "planted probabilities p1 = {p1}, p2 = {p2} are not both in [0, 1]"
        )));
    }
    Ok(PlantedProbs { p1, p2 })
}

/// A planted hypergraph together with its hidden coloring.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedInstance {
    pub hypergraph: Hypergraph,
    pub sigma: Coloring,
    pub params: ModelParams,
    pub p1: f64,
    pub p2: f64,
}

/// Draws a planted instance. With `balanced`, `σ` is uniform over balanced
/// colorings: the `+1` count is drawn from the binomial conditioned on
/// balance and the `+1` vertices are then a uniform subset of that size.
pub fn gen_planted(
    d: f64,
    k: usize,
    n: usize,
    beta: f64,
    seed: u64,
    balanced: bool,
) -> Result<PlantedInstance> {
    let params = ModelParams::from_density(n, k, d, beta)?;
    let PlantedProbs { p1, p2 } = planted_params(d, k, n, beta)?;
    let mut rng = rng_from_seed(seed);
    let sigma = if balanced {
        balanced_coloring(&mut rng, n)
    } else {
        let bits: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
        Coloring::from_bools(&bits)
    };

    let total = binomial_exact(n as u64, k as u64);
    let flat = match total {
        Some(t) if t <= EXHAUSTIVE_SET_LIMIT => {
            let mut flat = Vec::new();
            for_each_k_set(n, k, |set| {
                let p = if sigma.is_monochromatic(set) { p1 } else { p2 };
                if rng.random::<f64>() < p {
                    flat.extend_from_slice(set);
                }
            });
            flat
        }
        _ => {
            let a = sigma.count_plus() as u64;
            let mono_exact = forb(a, n as u64, k as u64);
            let bi_exact = match (total, mono_exact) {
                (Some(t), Some(mo)) => Some(t - mo),
                _ => None,
            };
            let mono_approx = binomial_f64(a, k as u64) + binomial_f64(n as u64 - a, k as u64);
            let bi_approx = binomial_f64(n as u64, k as u64) - mono_approx;
            let mono_count = sample_set_count(&mut rng, mono_exact, mono_approx, p1);
            let bi_count = sample_set_count(&mut rng, bi_exact, bi_approx, p2);

            let (plus, minus): (Vec<u32>, Vec<u32>) =
                (0..n as u32).partition(|&v| sigma.is_plus(v as usize));
            let ln_plus = ln_binomial(plus.len() as u64, k as u64);
            let ln_minus = ln_binomial(minus.len() as u64, k as u64);
            // probability that a uniform monochromatic k-set is all +1
            let plus_share = 1.0 / (1.0 + (ln_minus - ln_plus).exp());
            let mut flat = distinct_sets(&mut rng, k, mono_count, |rng, buf| {
                let class = if rng.random::<f64>() < plus_share {
                    &plus
                } else {
                    &minus
                };
                sample_k_set(rng, class.len(), buf);
                for v in buf.iter_mut() {
                    *v = class[*v as usize];
                }
                buf.sort_unstable();
            });
            let bi = distinct_sets(&mut rng, k, bi_count, |rng, buf| loop {
                sample_k_set(rng, n, buf);
                if !sigma.is_monochromatic(buf) {
                    break;
                }
            });
            flat.extend_from_slice(&bi);
            flat
        }
    };
    Ok(PlantedInstance {
        hypergraph: Hypergraph::from_flat(n, k, flat, false)?,
        sigma,
        params,
        p1,
        p2,
    })
}

fn balanced_coloring(rng: &mut Rng, n: usize) -> Coloring {
    let counts: Vec<usize> = (0..=n)
        .filter(|&a| crate::hypergraph::is_balanced_count(a, n))
        .collect();
    let logw: Vec<f64> = counts
        .iter()
        .map(|&a| ln_binomial(n as u64, a as u64))
        .collect();
    let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logw.iter().map(|w| (w - max).exp()).collect();
    let mut u = rng.random::<f64>() * weights.iter().sum::<f64>();
    let mut a = *counts.last().expect("n/2 is always balanced");
    for (&c, &w) in counts.iter().zip(&weights) {
        if u < w {
            a = c;
            break;
        }
        u -= w;
    }
    let mut sigma = Coloring::all_minus(n);
    for v in index::sample(rng, n, a) {
        sigma.set(v, true);
    }
    sigma
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonoEdgeExpectation {
    /// `(e^{−β} / (2^{k−1} − 1 + e^{−β}))·(d/k)·n`.
    pub leading: f64,
    /// `2·C(n/2, k)·p1`, the exact value for a perfectly balanced `σ` (even `n` only).
    pub exact_balanced: Option<f64>,
}

/// Expected number of `σ`-monochromatic edges in the planted model.
pub fn expected_mono_edges(d: f64, k: usize, n: usize, beta: f64) -> Result<MonoEdgeExpectation> {
    let e = (-beta).exp();
    let leading = e / (2f64.powi(k as i32 - 1) - 1.0 + e) * (d / k as f64) * n as f64;
    let exact_balanced = if n.is_multiple_of(2) {
        let PlantedProbs { p1, .. } = planted_params(d, k, n, beta)?;
        Some(2.0 * binomial_f64(n as u64 / 2, k as u64) * p1)
    } else {
        None
    };
    Ok(MonoEdgeExpectation {
        leading,
        exact_balanced,
    })
}

/// Mean number of edges a vertex supports: `λ = d / (2^{k−1} − 1 + e^{−β})`.
pub fn support_rate(d: f64, k: usize, beta: f64) -> f64 {
    d / (2f64.powi(k as i32 - 1) - 1.0 + (-beta).exp())
}

/// Mean monochromatic degree of a vertex: `λ' = C(n−1, k−1)·p1 / 2^{k−1}`.
pub fn mono_degree_rate(d: f64, k: usize, n: usize, beta: f64) -> Result<f64> {
    let PlantedProbs { p1, .. } = planted_params(d, k, n, beta)?;
    Ok(binomial_f64(n as u64 - 1, k as u64 - 1) * p1 / 2f64.powi(k as i32 - 1))
}
