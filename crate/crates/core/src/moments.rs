//! Exact first and second moments of `Z_β` for the with-replacement model
//! `H'_k(n, m)`, where the `m` edges are independent uniform k-sets.
//!
//! Colorings are grouped by magnetization and pairs of colorings by the
//! sizes of the four cells `σ⁻¹(s) ∩ τ⁻¹(t)`, so every sum is polynomial in `n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{forb_fraction, is_balanced_count, ModelParams};
use crate::logspace::{binomial_ratio, log_sum_exp, LnFactorials};
use crate::phase::{lambda_value, Density};

/// Sizes of the four cells of a pair of colorings: `c_pm` counts vertices
/// with `σ = +1` and `τ = −1`, and so on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCells {
    pub c_pp: u64,
    pub c_pm: u64,
    pub c_mp: u64,
    pub c_mm: u64,
}

impl PairCells {
    pub fn n(&self) -> u64 {
        self.c_pp + self.c_pm + self.c_mp + self.c_mm
    }

    pub fn sigma_plus(&self) -> u64 {
        self.c_pp + self.c_pm
    }

    pub fn tau_plus(&self) -> u64 {
        self.c_pp + self.c_mp
    }

    /// `⟨σ, τ⟩`.
    pub fn overlap(&self) -> i64 {
        (self.c_pp + self.c_mm) as i64 - (self.c_pm + self.c_mp) as i64
    }

    fn as_array(&self) -> [u64; 4] {
        [self.c_pp, self.c_pm, self.c_mp, self.c_mm]
    }
}

fn one_minus_exp(beta: f64) -> f64 {
    -(-beta).exp_m1()
}

/// `ln E[Z_β(H'_k(n, m))] = ln Σ_a C(n,a)(1 − Forb(a)(1 − e^{−β})/N)^m`.
pub fn first_moment_log(params: &ModelParams) -> f64 {
    let (n, k) = (params.n as u64, params.k as u64);
    let b = one_minus_exp(params.beta);
    let lf = LnFactorials::new(params.n);
    let m = params.m as f64;
    let terms: Vec<f64> = (0..=n)
        .map(|a| {
            let weight = if m == 0.0 || b == 0.0 {
                0.0
            } else {
                m * (-forb_fraction(a, n, k) * b).ln_1p()
            };
            lf.ln_binomial(params.n, a as usize) + weight
        })
        .collect();
    log_sum_exp(&terms)
}

/// `E[e^{−β(1{σ mono on e} + 1{τ mono on e})}]` for a uniform k-set `e`:
/// `1 − (P_σ + P_τ)(1 − e^{−β}) + P_both(1 − e^{−β})²`.
pub fn pair_edge_weight(cells: &PairCells, k: u64, beta: f64) -> f64 {
    ln_pair_edge_weight(cells, k, beta).exp()
}

fn ln_pair_edge_weight(cells: &PairCells, k: u64, beta: f64) -> f64 {
    let n = cells.n();
    let b = one_minus_exp(beta);
    if b == 0.0 {
        return 0.0;
    }
    let p_sigma = forb_fraction(cells.sigma_plus(), n, k);
    let p_tau = forb_fraction(cells.tau_plus(), n, k);
    let p_both: f64 = cells
        .as_array()
        .iter()
        .map(|&c| binomial_ratio(c, n, k))
        .sum();
    (-(p_sigma + p_tau) * b + p_both * b * b).ln_1p()
}

/// Number of agreements `A = (1+α)n/2` for an overlap fraction, if integral.
pub fn agreements_for_alpha(n: usize, alpha: f64) -> Result<usize> {
    let a = (1.0 + alpha) * n as f64 / 2.0;
    let rounded = a.round();
    if !(-1.0..=1.0).contains(&alpha) || (a - rounded).abs() > 1e-9 * n.max(1) as f64 {
        return Err(Error::parameter(format!(
            "overlap fraction α = {alpha} is not attainable at n = {n}: (1+α)n/2 = {a} is not an integer"
        )));
    }
    Ok(rounded as usize)
}

/// Overlap fractions `(2A − n)/n` for `A = 0..=n`.
pub fn feasible_alphas(n: usize) -> Vec<f64> {
    (0..=n).map(|a| (2 * a) as f64 / n as f64 - 1.0).collect()
}

/// `ln E[Z_β(α)]`: the sum over balanced pairs `(σ, τ)` with overlap `αn` of
/// `E[e^{−β(E(σ) + E(τ))}]`. Returns `-inf` when no balanced pair has this overlap.
pub fn second_moment_alpha_log(params: &ModelParams, alpha: f64) -> Result<f64> {
    let agreements = agreements_for_alpha(params.n, alpha)?;
    Ok(second_moment_agreements_log(
        params,
        agreements,
        &LnFactorials::new(params.n),
    ))
}

fn second_moment_agreements_log(params: &ModelParams, agreements: usize, lf: &LnFactorials) -> f64 {
    let n = params.n;
    let k = params.k as u64;
    let m = params.m as f64;
    let mut terms = Vec::new();
    for a in (0..=n).filter(|&a| is_balanced_count(a, n)) {
        // c_pp + c_mm = agreements with c_pp ≤ a and c_mm ≤ n − a
        let lo = agreements.saturating_sub(n - a);
        let hi = agreements.min(a);
        for c_pp in lo..=hi {
            let c_mm = agreements - c_pp;
            let cells = PairCells {
                c_pp: c_pp as u64,
                c_pm: (a - c_pp) as u64,
                c_mp: (n - a - c_mm) as u64,
                c_mm: c_mm as u64,
            };
            if !is_balanced_count(cells.tau_plus() as usize, n) {
                continue;
            }
            let parts = cells.as_array().map(|c| c as usize);
            let weight = if m == 0.0 {
                0.0
            } else {
                m * ln_pair_edge_weight(&cells, k, params.beta)
            };
            terms.push(lf.ln_multinomial(&parts) + weight);
        }
    }
    log_sum_exp(&terms)
}

/// `ln E[Z_{β,bal}²]`, the second moment restricted to balanced colorings,
/// as the sum of [`second_moment_alpha_log`] over every overlap.
pub fn balanced_second_moment_log(params: &ModelParams) -> f64 {
    let lf = LnFactorials::new(params.n);
    let terms: Vec<f64> = (0..=params.n)
        .map(|agreements| second_moment_agreements_log(params, agreements, &lf))
        .collect();
    log_sum_exp(&terms)
}

/// `ln 2 + Λ_β(α)`, the large-`n` limit of `second_moment_alpha_log / n`.
pub fn lambda_asymptotic_log(params: &ModelParams, alpha: f64) -> Result<f64> {
    let density = Density::from_d(params.d, params.k as u32)?;
    Ok(std::f64::consts::LN_2 + lambda_value(&density, params.beta, alpha)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{log_partition, EnumerationConfig};
    use crate::hypergraph::{generate, Coloring, ModelKind};
    use std::f64::consts::LN_2;

    fn params(n: usize, k: usize, m: u64, beta: f64) -> ModelParams {
        ModelParams::from_edge_count(n, k, m, beta).unwrap()
    }

    /// Average of `e^{−β(1{σ mono} + 1{τ mono})}` over all k-sets.
    fn brute_pair_weight(sigma: &Coloring, tau: &Coloring, k: usize, beta: f64) -> f64 {
        let n = sigma.len();
        let mut total = 0.0;
        let mut count = 0.0;
        crate::hypergraph::for_each_k_set(n, k, |set| {
            let x = sigma.is_monochromatic(set) as u8 + tau.is_monochromatic(set) as u8;
            total += (-beta * x as f64).exp();
            count += 1.0;
        });
        total / count
    }

    #[test]
    fn first_moment_trivial_cases() {
        assert!((first_moment_log(&params(12, 3, 8, 0.0)) - 12.0 * LN_2).abs() < 1e-12);
        assert!((first_moment_log(&params(12, 3, 0, 3.0)) - 12.0 * LN_2).abs() < 1e-12);
    }

    #[test]
    fn first_moment_is_monotone() {
        let mut last = f64::INFINITY;
        for beta in [0.0, 0.5, 1.0, 2.0, 5.0] {
            let v = first_moment_log(&params(20, 4, 30, beta));
            assert!(v <= last);
            last = v;
        }
        let mut last = f64::INFINITY;
        for m in [0, 5, 10, 40] {
            let v = first_moment_log(&params(20, 4, m, 1.0));
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn first_moment_matches_monte_carlo() {
        let p = params(12, 3, 8, 1.0);
        let cfg = EnumerationConfig::default();
        let draws = 2000;
        let zs: Vec<f64> = (0..draws)
            .map(|i| {
                let h = generate(ModelKind::GnmReplace, &p, i).unwrap();
                log_partition(&h, 1.0, &cfg).unwrap().exp()
            })
            .collect();
        let mean = zs.iter().sum::<f64>() / draws as f64;
        let var = zs.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        let se = (var / draws as f64).sqrt();
        let exact = first_moment_log(&p).exp();
        assert!(
            (mean - exact).abs() < 4.0 * se,
            "mean {mean}, exact {exact}, se {se}"
        );
    }

    #[test]
    fn pair_weight_examples() {
        let cells = PairCells {
            c_pp: 3,
            c_pm: 2,
            c_mp: 1,
            c_mm: 4,
        };
        assert_eq!(pair_edge_weight(&cells, 3, 0.0), 1.0);
        // σ = τ collapses to the single-coloring weight at 2β
        let same = PairCells {
            c_pp: 5,
            c_pm: 0,
            c_mp: 0,
            c_mm: 7,
        };
        let want = 1.0 - forb_fraction(5, 12, 3) * (1.0 - (-2.0f64 * 0.8).exp());
        assert!((pair_edge_weight(&same, 3, 0.8) - want).abs() < 1e-15);
        // exhaustive k-set oracle at n = 8
        let cells = PairCells {
            c_pp: 2,
            c_pm: 2,
            c_mp: 2,
            c_mm: 2,
        };
        let sigma: Coloring = "++++----".parse().unwrap();
        let tau: Coloring = "++--++--".parse().unwrap();
        for beta in [0.3, 1.0, 4.0] {
            let brute = brute_pair_weight(&sigma, &tau, 3, beta);
            assert!((pair_edge_weight(&cells, 3, beta) - brute).abs() < 1e-14);
        }
    }

    #[test]
    fn pair_weight_bounds() {
        for (cells, beta) in [
            (
                PairCells {
                    c_pp: 9,
                    c_pm: 0,
                    c_mp: 0,
                    c_mm: 0,
                },
                1.5,
            ),
            (
                PairCells {
                    c_pp: 1,
                    c_pm: 1,
                    c_mp: 1,
                    c_mm: 1,
                },
                2.0,
            ),
            (
                PairCells {
                    c_pp: 4,
                    c_pm: 3,
                    c_mp: 2,
                    c_mm: 6,
                },
                0.7,
            ),
        ] {
            let w = pair_edge_weight(&cells, 3, beta);
            assert!(w >= (-2.0 * beta).exp() - 1e-15 && w <= 1.0);
        }
        // no cell reaches k and neither color class does either
        let tiny = PairCells {
            c_pp: 1,
            c_pm: 1,
            c_mp: 1,
            c_mm: 1,
        };
        assert_eq!(pair_edge_weight(&tiny, 3, 2.0), 1.0);
    }

    #[test]
    fn alpha_feasibility() {
        assert_eq!(agreements_for_alpha(8, 0.0).unwrap(), 4);
        assert_eq!(agreements_for_alpha(8, 0.25).unwrap(), 5);
        assert!(agreements_for_alpha(8, 0.1).is_err());
        assert!(second_moment_alpha_log(&params(8, 3, 2, 1.0), 0.1).is_err());
        assert_eq!(feasible_alphas(4), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    fn brute_alpha(n: usize, k: usize, m: u64, beta: f64) -> Vec<f64> {
        let colorings: Vec<Coloring> = (0..1u64 << n)
            .map(|x| Coloring::from_mask(x, n))
            .filter(|c| is_balanced_count(c.count_plus(), n))
            .collect();
        let mut sums = vec![0.0; n + 1];
        for s in &colorings {
            for t in &colorings {
                let agreements = n - s.hamming(t);
                sums[agreements] += brute_pair_weight(s, t, k, beta).powi(m as i32);
            }
        }
        sums.iter().map(|s| s.ln()).collect()
    }

    #[test]
    fn second_moment_matches_pair_brute_force() {
        for m in [2u64, 4] {
            for beta in [0.0, 1.0] {
                let p = params(8, 3, m, beta);
                let brute = brute_alpha(8, 3, m, beta);
                for (agreements, alpha) in feasible_alphas(8).into_iter().enumerate() {
                    let exact = second_moment_alpha_log(&p, alpha).unwrap();
                    let want = brute[agreements];
                    assert!(
                        (exact - want).abs() <= 1e-9 * want.abs().max(1.0),
                        "m={m} β={beta} α={alpha}: {exact} vs {want}"
                    );
                }
                let total = log_sum_exp(&brute);
                assert!((balanced_second_moment_log(&p) - total).abs() <= 1e-9 * total.abs());
            }
        }
    }

    #[test]
    fn second_moment_symmetry_and_diagonal() {
        let p = params(20, 3, 15, 0.9);
        for alpha in [0.2, 0.5, 0.9] {
            let plus = second_moment_alpha_log(&p, alpha).unwrap();
            let minus = second_moment_alpha_log(&p, -alpha).unwrap();
            assert!((plus - minus).abs() < 1e-12 * plus.abs());
        }
        // α = 1: only τ = σ, each weighted by the first-moment weight at 2β
        let n = 20;
        let lf = LnFactorials::new(n);
        let b2 = 1.0 - (-1.8f64).exp();
        let terms: Vec<f64> = (0..=n)
            .filter(|&a| is_balanced_count(a, n))
            .map(|a| {
                lf.ln_binomial(n, a) + 15.0 * (-forb_fraction(a as u64, n as u64, 3) * b2).ln_1p()
            })
            .collect();
        let want = log_sum_exp(&terms);
        assert!((second_moment_alpha_log(&p, 1.0).unwrap() - want).abs() < 1e-12 * want.abs());
    }

    #[test]
    fn asymptotic_form_at_zero() {
        let p = ModelParams::from_density(200, 5, 20.0, 1.0).unwrap();
        let dens = Density::from_d(20.0, 5).unwrap();
        let phi = crate::phase::phi_upper(&dens, 1.0).unwrap();
        assert!((lambda_asymptotic_log(&p, 0.0).unwrap() - 2.0 * phi).abs() < 1e-12);
        let a = lambda_asymptotic_log(&p, 0.4).unwrap();
        let b = lambda_asymptotic_log(&p, -0.4).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn finite_size_approach_to_lambda() {
        // residual n·(ln E[Z(0)]/n − ln2 − Λ(0) + ln n/(2n)) stays bounded
        let mut scaled = Vec::new();
        for n in [100usize, 200, 300, 400] {
            let p = ModelParams::from_density(n, 5, 20.0, 1.0).unwrap();
            let exact = second_moment_alpha_log(&p, 0.0).unwrap() / n as f64;
            let limit = lambda_asymptotic_log(&p, 0.0).unwrap();
            scaled.push(n as f64 * (exact - limit + (n as f64).ln() / (2.0 * n as f64)));
        }
        let spread = scaled.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - scaled.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 1.0, "{scaled:?}");
    }
}
