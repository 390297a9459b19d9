//! Calibrated bands.
//!
//! The asymptotic error terms of the decomposition, the cluster estimate and
//! the phase-diagram expansions carry no explicit constants, so every band
//! used to judge a desk-scale run lives here. Changing a band is a data
//! change: bump [`CALIBRATION_VERSION`] and the reports pick it up.

use serde::Serialize;

use crate::decomposition::Thresholds;

pub const CALIBRATION_VERSION: &str = "2026.10-1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    pub version: &'static str,
    /// Monte Carlo agreement, in standard errors.
    pub mc_sigmas: f64,
    /// `core/n` must be at least this.
    pub core_fraction_min: f64,
    /// `rest/n` must lie in `[lo, hi]·2^{−k}`.
    pub rest_scaled_lo: f64,
    pub rest_scaled_hi: f64,
    /// `(rest − free)/n ≤ nonfree_scaled_max·2^{−k}`.
    pub nonfree_scaled_max: f64,
    /// `|U|/n` after whitening.
    pub whitened_fraction_max: f64,
    /// `|point/n − target| ≤ cluster_point_factor·4^{−k}`.
    pub cluster_point_factor: f64,
    /// `|Λ''(0) + 1| ≤ k^e·2^{−k}`.
    pub curvature_exponent: i32,
    /// `|gap + Σ·2^{−k}| ≤ k^e·4^{−k}`.
    pub gap_exponent: i32,
    /// Half-width `k^e·2^{−k}` of the indeterminate band around the line.
    pub regime_band_exponent: i32,
    /// `|β_c − expansion|` at the largest calibrated `k`.
    pub expansion_max: f64,
    pub expansion_k: u32,
    /// Total-variation distance to the Poisson laws of supports and
    /// monochromatic degrees.
    pub poisson_tv_max: f64,
    /// Core thresholds `(support, endangered)` for `k = 8` runs.
    pub census_profile: (u32, u32),
}

pub const CALIBRATION: Calibration = Calibration {
    version: CALIBRATION_VERSION,
    mc_sigmas: 4.0,
    core_fraction_min: 0.9,
    rest_scaled_lo: 0.5,
    rest_scaled_hi: 2.0,
    nonfree_scaled_max: 0.5,
    whitened_fraction_max: 0.1,
    cluster_point_factor: 30.0,
    curvature_exponent: 3,
    gap_exponent: 5,
    regime_band_exponent: 4,
    expansion_max: 0.1,
    expansion_k: 40,
    poisson_tv_max: 0.01,
    census_profile: (1, 10),
};

impl Calibration {
    pub fn curvature_band(&self, k: u32) -> f64 {
        (k as f64).powi(self.curvature_exponent) * 2f64.powi(-(k as i32))
    }

    pub fn gap_band(&self, k: u32) -> f64 {
        (k as f64).powi(self.gap_exponent) * 4f64.powi(-(k as i32))
    }

    pub fn regime_band(&self, k: u32) -> f64 {
        (k as f64).powi(self.regime_band_exponent) * 2f64.powi(-(k as i32))
    }

    pub fn cluster_point_band(&self, k: u32) -> f64 {
        self.cluster_point_factor * 4f64.powi(-(k as i32))
    }

    /// The calibrated threshold profile for census runs at arity `k`.
    pub fn census_thresholds(&self, k: usize) -> Thresholds {
        Thresholds::scaled(self.census_profile.0, self.census_profile.1, k)
    }
}
