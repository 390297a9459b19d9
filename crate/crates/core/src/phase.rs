//! Phase-diagram functions: `Σ_{k,d}`, the critical inverse temperature,
//! the first-moment free entropy, the overlap function `Λ_β` and the
//! condensation gap.
//!
//! Densities are carried as [`Density`], which keeps `c = d/k − 2^{k−1}ln2 + ln2`
//! alongside `d/k`. For large `k`, `c` is a small difference of two numbers of
//! size `2^{k−1}`, so it is stored directly when given and never recomputed.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

/// Smallest grid accepted by [`second_moment_verdict`].
pub const MIN_VERDICT_GRID: usize = 1000;

/// A clause density at arity `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Density {
    k: u32,
    ratio: f64,
    c: f64,
}

/// `2^{k−1}ln2 − ln2`, the critical value of `d/k`.
pub fn critical_ratio(k: u32) -> f64 {
    (2f64.powi(k as i32 - 1) - 1.0) * LN_2
}

impl Density {
    /// From the mean degree `d`.
    pub fn from_d(d: f64, k: u32) -> Result<Self> {
        Self::from_ratio(d / k as f64, k)
    }

    /// From `d/k`.
    pub fn from_ratio(ratio: f64, k: u32) -> Result<Self> {
        check_k(k)?;
        if !(ratio.is_finite() && ratio >= 0.0) {
            return Err(Error::parameter(format!(
                "d/k = {ratio} must be finite and ≥ 0"
            )));
        }
        Ok(Density {
            k,
            ratio,
            c: ratio - critical_ratio(k),
        })
    }

    /// From the offset `c = d/k − 2^{k−1}ln2 + ln2`.
    pub fn from_c(c: f64, k: u32) -> Result<Self> {
        check_k(k)?;
        let ratio = c + critical_ratio(k);
        if !(c.is_finite() && ratio >= 0.0) {
            return Err(Error::parameter(format!(
                "c = {c} gives a negative density at k = {k}"
            )));
        }
        Ok(Density { k, ratio, c })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `d/k`.
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn d(&self) -> f64 {
        self.ratio * self.k as f64
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

fn check_k(k: u32) -> Result<()> {
    if !(2..=1000).contains(&k) {
        return Err(Error::parameter(format!(
            "arity k = {k} must lie in [2, 1000]"
        )));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::parameter(format!("beta = {beta} must be ≥ 0")));
    }
    Ok(())
}

/// `1 − e^{−β}`, exact to full precision for small β and equal to 1 at β = ∞.
fn one_minus_exp(beta: f64) -> f64 {
    -(-beta).exp_m1()
}

/// Binary entropy in nats, `H(0) = H(1) = 0`.
pub fn entropy_h(z: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::domain(format!(
            "entropy argument {z} outside [0, 1]"
        )));
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.ln() };
    Ok(term(z) + term(1.0 - z))
}

/// `φ(x) = (1+x)ln(1+x) − x`.
pub fn chernoff_phi(x: f64) -> Result<f64> {
    if x.is_nan() || x <= -1.0 {
        return Err(Error::domain(format!(
            "chernoff argument {x} must exceed −1"
        )));
    }
    Ok((1.0 + x) * x.ln_1p() - x)
}

/// First-moment free entropy `ln2 + (d/k)ln(1 − 2^{1−k}(1 − e^{−β}))`.
pub fn phi_upper(density: &Density, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let k = density.k as i32;
    let x = 2f64.powi(1 - k) * one_minus_exp(beta);
    if x >= 1.0 {
        return Err(Error::domain("1 − 2^{1−k}(1 − e^{−β}) is not positive"));
    }
    Ok(LN_2 + density.ratio * (-x).ln_1p())
}

/// `Σ_{k,d}(β) = (β+1)e^{k ln2 − β}ln2 − 2c`.
pub fn sigma(density: &Density, beta: f64) -> f64 {
    let k = density.k as f64;
    (beta + 1.0) * (k * LN_2 - beta).exp() * LN_2 - 2.0 * density.c
}

/// `dΣ/dβ = −β 2^k ln2 e^{−β}`.
pub fn sigma_derivative(density: &Density, beta: f64) -> f64 {
    let k = density.k as f64;
    -beta * (k * LN_2 - beta).exp() * LN_2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaCritRoot {
    pub beta: f64,
    /// Final bisection bracket `[lo, hi]` with `Σ(lo) > 0 ≥ Σ(hi)`.
    pub bracket: (f64, f64),
    /// `Σ` at the returned point.
    pub sigma: f64,
}

impl BetaCritRoot {
    pub fn width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }
}

/// The zero of `Σ_{k,d}` by bisection, or `None` when there is none
/// (`c ≤ 0`, or `c ≥ 2^{k−1}ln2` so that `Σ(0) ≤ 0`).
///
/// Stops when `|Σ| ≤ tol` or the bracket cannot be split further.
pub fn beta_crit_root(density: &Density, tol: f64) -> Option<BetaCritRoot> {
    let c = density.c;
    if c.is_nan() || c <= 0.0 || sigma(density, 0.0) <= 0.0 {
        return None;
    }
    let tol = if tol > 0.0 { tol } else { DEFAULT_ROOT_TOL };
    let mut lo = 0.0;
    let mut hi = (density.k as f64 * LN_2).max(1.0);
    while sigma(density, hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        let s = sigma(density, mid);
        if s.abs() <= tol || mid <= lo || mid >= hi {
            return Some(BetaCritRoot {
                beta: mid,
                bracket: (lo, hi),
                sigma: s,
            });
        }
        if s > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// `(k−1)ln2 + ln k + 2 ln ln2 − ln c`, the expansion of `β_c` without the
/// vanishing correction.
pub fn beta_crit_expansion(density: &Density) -> Result<f64> {
    let c = density.c;
    if c.is_nan() || c <= 0.0 {
        return Err(Error::domain(format!("expansion needs c > 0, got c = {c}")));
    }
    let k = density.k as f64;
    Ok((k - 1.0) * LN_2 + k.ln() + 2.0 * LN_2.ln() - c.ln())
}

/// `Λ_β` and its first two derivatives at `α`, together with `s(α, β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaEval {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub s: f64,
}

struct LambdaParts {
    b: f64,
    u: f64,
    v: f64,
    s: f64,
}

fn lambda_parts(density: &Density, beta: f64, alpha: f64) -> Result<LambdaParts> {
    check_beta(beta)?;
    if !(-1.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!(
            "overlap α = {alpha} outside [−1, 1]"
        )));
    }
    let k = density.k as i32;
    let b = one_minus_exp(beta);
    let u = (1.0 + alpha) / 2.0;
    let v = (1.0 - alpha) / 2.0;
    let s_minus_1 = -(2f64.powi(1 - k) * b * (2.0 - b * (u.powi(k) + v.powi(k))));
    let s = 1.0 + s_minus_1;
    if s <= 0.0 {
        return Err(Error::domain(format!("s(α, β) = {s} is not positive")));
    }
    Ok(LambdaParts { b, u, v, s })
}

/// `Λ_β(α) = H((1+α)/2) + (d/k) ln s(α, β)`, valid on the closed interval.
pub fn lambda_value(density: &Density, beta: f64, alpha: f64) -> Result<f64> {
    let p = lambda_parts(density, beta, alpha)?;
    let k = density.k as i32;
    let ln_s = (-(2f64.powi(1 - k) * p.b * (2.0 - p.b * (p.u.powi(k) + p.v.powi(k))))).ln_1p();
    Ok(entropy_h(p.u)? + density.ratio * ln_s)
}

/// Value, derivatives and `s` at an interior `α ∈ (−1, 1)`.
pub fn lambda_eval(density: &Density, beta: f64, alpha: f64) -> Result<LambdaEval> {
    if !(alpha > -1.0 && alpha < 1.0) {
        return Err(Error::domain(format!(
            "derivatives of Λ need α in (−1, 1), got {alpha}"
        )));
    }
    let value = lambda_value(density, beta, alpha)?;
    let LambdaParts { b, u, v, s } = lambda_parts(density, beta, alpha)?;
    let k = density.k as i32;
    let d = density.d();
    let pow_k = 2f64.powi(-k);
    let diff1 = u.powi(k - 1) - v.powi(k - 1);
    let sum2 = u.powi(k - 2) + v.powi(k - 2);
    let d1 = ((1.0 - alpha).ln() - (1.0 + alpha).ln()) / 2.0 + d * b * b * diff1 * pow_k / s;
    let d2 = 1.0 / (alpha * alpha - 1.0) + d * (k - 1) as f64 * b * b * sum2 * pow_k / (2.0 * s)
        - d * k as f64 * b.powi(4) * diff1 * diff1 * pow_k * pow_k / (s * s);
    Ok(LambdaEval { value, d1, d2, s })
}

/// Outcome of the numerical second-moment scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum Verdict {
    GlobalMaxAtZero,
    /// A local maximum at `|α| = alpha` exceeds `Λ(0)` by `excess`.
    ViolatedAt {
        alpha: f64,
        excess: f64,
    },
    /// The best competitor is within rounding slack of `Λ(0)`.
    Inconclusive {
        alpha: f64,
        excess: f64,
    },
}

/// Scans `Λ_β` on `[0, 1]` (it is even in `α`) with `grid` uniform steps plus
/// the points `1 − 2^{−3k/4}` and `1 − γ ln k / k` for `γ ∈ {1.99, 2.01}`.
/// Each local maximum away from 0 is refined by bisection on `Λ'` and
/// compared with `Λ(0)` using a slack of `10·ε·|Λ(0)|`.
pub fn second_moment_verdict(density: &Density, beta: f64, grid: usize) -> Result<Verdict> {
    if grid < MIN_VERDICT_GRID {
        return Err(Error::parameter(format!(
            "grid resolution {grid} below the minimum of {MIN_VERDICT_GRID}"
        )));
    }
    let k = density.k as f64;
    let mut alphas: Vec<f64> = (0..=grid).map(|i| i as f64 / grid as f64).collect();
    for extra in [
        1.0 - 2f64.powf(-0.75 * k),
        1.0 - 1.99 * k.ln() / k,
        1.0 - 2.01 * k.ln() / k,
    ] {
        if extra > 0.0 && extra < 1.0 {
            alphas.push(extra);
        }
    }
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    let values = alphas
        .iter()
        .map(|&a| lambda_value(density, beta, a))
        .collect::<Result<Vec<f64>>>()?;
    let at_zero = values[0];
    let slack = 10.0 * f64::EPSILON * at_zero.abs();

    let mut best: Option<(f64, f64)> = None;
    let last = alphas.len() - 1;
    for j in 1..=last {
        let left_ok = values[j] >= values[j - 1];
        let right_ok = j == last || values[j] >= values[j + 1];
        if !(left_ok && right_ok) {
            continue;
        }
        let (alpha, value) = if j == last {
            (alphas[j], values[j])
        } else {
            refine_max(density, beta, alphas[j - 1], alphas[j + 1])
                .unwrap_or((alphas[j], values[j]))
        };
        let value = value.max(values[j]);
        if best.is_none_or(|(_, v)| value > v) {
            best = Some((alpha, value));
        }
    }
    Ok(match best {
        None => Verdict::GlobalMaxAtZero,
        Some((alpha, value)) => {
            let excess = value - at_zero;
            if excess > slack {
                Verdict::ViolatedAt { alpha, excess }
            } else if excess >= -slack {
                Verdict::Inconclusive { alpha, excess }
            } else {
                Verdict::GlobalMaxAtZero
            }
        }
    })
}

/// Bisection on `Λ'` over a bracket where it changes sign from + to −.
fn refine_max(density: &Density, beta: f64, lo: f64, hi: f64) -> Option<(f64, f64)> {
    let deriv = |a: f64| lambda_eval(density, beta, a).ok().map(|e| e.d1);
    let (mut lo, mut hi) = (lo, hi.min(1.0 - f64::EPSILON));
    if !(deriv(lo)? > 0.0 && deriv(hi)? < 0.0) {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if deriv(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    Some((a, lambda_value(density, beta, a).ok()?))
}

/// Maximiser of the energy-fraction rate: `2^{1−k}e^{−β} / (1 − 2^{1−k}(1 − e^{−β}))`.
pub fn m0_fraction(k: u32, beta: f64) -> f64 {
    let q = 2f64.powi(1 - k as i32);
    let num = q * (-beta).exp();
    num / (1.0 - q * one_minus_exp(beta))
}

/// Rate of the energy fraction `x`:
/// `−xβ − x ln x − (1−x)ln(1−x) + x ln 2^{1−k} + (1−x)ln(1 − 2^{1−k})`.
pub fn f_rate(x: f64, k: u32, beta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("energy fraction {x} outside [0, 1]")));
    }
    let q = 2f64.powi(1 - k as i32);
    let mut value = entropy_h(x)? + (1.0 - x) * (-q).ln_1p();
    if x > 0.0 {
        value += x * (q.ln() - beta);
    }
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapReport {
    /// `(ln2·2^{−k} − β ln2 e^{−β}) − phi_upper`.
    pub gap: f64,
    /// `−Σ_{k,d}(β)·2^{−k}`, the leading-order value of the gap.
    pub sigma_scaled: f64,
    /// Set when `β < k ln2 − ln k`, outside the range the gap formula targets.
    pub extrapolated: bool,
}

pub fn condensation_gap(density: &Density, beta: f64) -> Result<GapReport> {
    let k = density.k as f64;
    let cluster = LN_2 * 2f64.powf(-k) - beta * LN_2 * (-beta).exp();
    Ok(GapReport {
        gap: cluster - phi_upper(density, beta)?,
        sigma_scaled: -sigma(density, beta) * 2f64.powf(-k),
        extrapolated: beta < k * LN_2 - k.ln(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "regime")]
pub enum Regime {
    BelowLine,
    /// Above the line; `beta_c` is the zero of `Σ` when one exists.
    TransitionLine {
        beta_c: Option<f64>,
    },
    IndeterminateBand,
}

/// Default half-width of the indeterminate band in `c`: `k⁴·2^{−k}`.
pub fn default_band(k: u32) -> f64 {
    crate::calibration::CALIBRATION.regime_band(k)
}

/// Classifies a density by its offset `c`: below the line when `c < −band`,
/// on the transition side when `c > band`, indeterminate otherwise.
pub fn classify_regime(density: &Density, band: f64) -> Regime {
    let c = density.c;
    if c < -band {
        Regime::BelowLine
    } else if c > band {
        Regime::TransitionLine {
            beta_c: beta_crit_root(density, DEFAULT_ROOT_TOL).map(|r| r.beta),
        }
    } else {
        Regime::IndeterminateBand
    }
}

/// Derived quantities at one `(d, k, β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub d: f64,
    pub k: u32,
    pub beta: f64,
    pub c: f64,
    pub sigma_value: f64,
    pub phi_upper: f64,
    pub gap: f64,
    pub regime: Regime,
}

pub fn phase_point(density: &Density, beta: f64, band: f64) -> Result<PhasePoint> {
    Ok(PhasePoint {
        d: density.d(),
        k: density.k,
        beta,
        c: density.c,
        sigma_value: sigma(density, beta),
        phi_upper: phi_upper(density, beta)?,
        gap: condensation_gap(density, beta)?.gap,
        regime: classify_regime(density, band),
    })
}
