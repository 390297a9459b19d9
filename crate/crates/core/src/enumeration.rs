//! Exhaustive engine over all `2^n` colorings.
//!
//! One Gray-code sweep fills a joint histogram (magnetization × energy, or
//! overlap-with-a-reference × energy). Every partition function, restricted
//! sum and cluster size at any `β` is then a log-sum-exp over the histogram
//! cells, with no further enumeration.
//!
//! The sweep is split into contiguous blocks of the reflected Gray code. Each
//! block rebuilds its starting state from scratch, walks its range flipping
//! one vertex per step, and the integer histograms are merged in block order.

use std::fmt;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{is_balanced, is_balanced_count, Coloring, Hypergraph, Incidence};
use crate::logspace::log_sum_exp_weighted;
use crate::phase::m0_fraction;
use crate::rng::rng_from_seed;

pub const DEFAULT_ENUMERATION_CAP: usize = 28;

/// Default overlap fraction of the cluster: `⟨σ,τ⟩ ≥ 2n/3`.
pub const DEFAULT_CLUSTER_OVERLAP: f64 = 2.0 / 3.0;

/// Slack used when comparing an integer overlap with `θ·n`, so that
/// e.g. `θ = 2/3, n = 6` admits overlap 4 despite rounding in `θ`.
const OVERLAP_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct EnumerationConfig {
    /// Largest `n` that will be enumerated.
    pub cap: usize,
    /// Number of Gray-code blocks (rounded down to a power of two, and to at
    /// most `2^n`). Only affects scheduling, never results.
    pub blocks: usize,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig {
            cap: DEFAULT_ENUMERATION_CAP,
            blocks: 64,
        }
    }
}

impl EnumerationConfig {
    fn check(&self, n: usize) -> Result<()> {
        if n > self.cap || n > 62 {
            return Err(Error::Capacity {
                n,
                cap: self.cap.min(62),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMode {
    /// Key is `|σ⁻¹(+1)|`.
    Magnetization,
    /// Key is the overlap `⟨σ, ref⟩`.
    Overlap,
}

impl fmt::Display for SpectrumMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpectrumMode::Magnetization => "magnetization",
            SpectrumMode::Overlap => "overlap",
        })
    }
}

/// Exact joint histogram of all `2^n` colorings.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    mode: SpectrumMode,
    n: usize,
    k: usize,
    m: usize,
    reference: Option<Coloring>,
    // row = plus count (magnetization) or Hamming distance to the reference
    // (overlap); column = energy
    counts: Vec<u64>,
}

/// One nonzero histogram cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Cell {
    /// Plus count or overlap, depending on the table mode.
    pub key: i64,
    pub energy: u64,
    pub count: u64,
}

impl SpectrumTable {
    pub fn mode(&self) -> SpectrumMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of edges (with multiplicity); energies lie in `0..=m`.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn reference(&self) -> Option<&Coloring> {
        self.reference.as_ref()
    }

    fn row_key(&self, row: usize) -> i64 {
        match self.mode {
            SpectrumMode::Magnetization => row as i64,
            SpectrumMode::Overlap => self.n as i64 - 2 * row as i64,
        }
    }

    /// Count of colorings with the given key and energy.
    pub fn count(&self, key: i64, energy: u64) -> u64 {
        let row = match self.mode {
            SpectrumMode::Magnetization => key,
            SpectrumMode::Overlap => {
                let diff = self.n as i64 - key;
                if diff % 2 != 0 {
                    return 0;
                }
                diff / 2
            }
        };
        if row < 0 || row as usize > self.n || energy as usize > self.m {
            return 0;
        }
        self.counts[row as usize * (self.m + 1) + energy as usize]
    }

    /// Nonzero cells, sorted by key and then energy.
    pub fn cells(&self) -> Vec<Cell> {
        let width = self.m + 1;
        let rows: Box<dyn Iterator<Item = usize>> = match self.mode {
            SpectrumMode::Magnetization => Box::new(0..=self.n),
            SpectrumMode::Overlap => Box::new((0..=self.n).rev()),
        };
        let mut out = Vec::new();
        for row in rows {
            for energy in 0..width {
                let count = self.counts[row * width + energy];
                if count > 0 {
                    out.push(Cell {
                        key: self.row_key(row),
                        energy: energy as u64,
                        count,
                    });
                }
            }
        }
        out
    }

    /// Sum of all counts (always `2^n`).
    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    /// `key,energy,count` rows in sorted order, with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("key,energy,count\n");
        for c in self.cells() {
            out.push_str(&format!("{},{},{}\n", c.key, c.energy, c.count));
        }
        out
    }
}

/// Incremental state of a Gray-code walk: current coloring mask, per-edge
/// number of `+1` endpoints, and the energy.
struct GrayWalker<'a> {
    h: &'a Hypergraph,
    inc: &'a Incidence,
    plus_in_edge: Vec<u16>,
    mask: u64,
    energy: u64,
}

impl<'a> GrayWalker<'a> {
    /// State of Gray index `index`, i.e. the coloring `index ^ (index >> 1)`.
    fn at(h: &'a Hypergraph, inc: &'a Incidence, index: u64) -> Self {
        let mask = index ^ (index >> 1);
        let k = h.k() as u16;
        let mut energy = 0;
        let plus_in_edge: Vec<u16> = h
            .edges()
            .map(|e| {
                let c = e.iter().filter(|&&v| (mask >> v) & 1 == 1).count() as u16;
                if c == 0 || c == k {
                    energy += 1;
                }
                c
            })
            .collect();
        GrayWalker {
            h,
            inc,
            plus_in_edge,
            mask,
            energy,
        }
    }

    /// Advances from Gray index `index - 1` to `index`.
    #[inline]
    fn advance_to(&mut self, index: u64) {
        let v = index.trailing_zeros() as usize;
        self.flip(v);
    }

    #[inline]
    fn flip(&mut self, v: usize) {
        let k = self.h.k() as u16;
        let to_plus = (self.mask >> v) & 1 == 0;
        self.mask ^= 1u64 << v;
        for &e in self.inc.edges_of(v) {
            let c = &mut self.plus_in_edge[e as usize];
            if to_plus {
                if *c == 0 {
                    self.energy -= 1;
                }
                *c += 1;
                if *c == k {
                    self.energy += 1;
                }
            } else {
                if *c == k {
                    self.energy -= 1;
                }
                *c -= 1;
                if *c == 0 {
                    self.energy += 1;
                }
            }
        }
    }
}

/// Full joint histogram of `h` in the given mode. `reference` is required in
/// overlap mode and ignored otherwise.
pub fn spectrum(
    h: &Hypergraph,
    mode: SpectrumMode,
    reference: Option<&Coloring>,
    config: &EnumerationConfig,
) -> Result<SpectrumTable> {
    let n = h.n();
    config.check(n)?;
    let reference = match mode {
        SpectrumMode::Magnetization => None,
        SpectrumMode::Overlap => {
            let r = reference
                .ok_or_else(|| Error::parameter("overlap mode requires a reference coloring"))?;
            h.check_len(r)?;
            Some(r.clone())
        }
    };
    let ref_mask = reference.as_ref().map_or(0, Coloring::mask);
    let m = h.num_edges();
    let width = m + 1;
    let rows = n + 1;
    let total: u64 = 1u64 << n;
    let blocks = block_count(config.blocks, total);
    let block_len = total / blocks;
    let inc = h.incidence();

    let partials: Vec<Vec<u64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut counts = vec![0u64; rows * width];
            let start = b * block_len;
            let mut walker = GrayWalker::at(h, &inc, start);
            let mut record = |w: &GrayWalker| {
                let row = match mode {
                    SpectrumMode::Magnetization => w.mask.count_ones(),
                    SpectrumMode::Overlap => (w.mask ^ ref_mask).count_ones(),
                } as usize;
                counts[row * width + w.energy as usize] += 1;
            };
            record(&walker);
            for i in start + 1..start + block_len {
                walker.advance_to(i);
                record(&walker);
            }
            counts
        })
        .collect();

    let mut counts = vec![0u64; rows * width];
    for part in &partials {
        for (acc, c) in counts.iter_mut().zip(part) {
            *acc += c;
        }
    }
    Ok(SpectrumTable {
        mode,
        n,
        k: h.k(),
        m,
        reference,
        counts,
    })
}

fn block_count(requested: usize, total: u64) -> u64 {
    let requested = requested.max(1) as u64;
    let pow = 1u64 << (63 - requested.leading_zeros());
    pow.min(total)
}

/// Which colorings a restricted partition sum admits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "variant", content = "param")]
pub enum Restriction {
    All,
    /// `| |σ⁻¹(+1)| - n/2 | ≤ √n` (magnetization tables).
    Balanced,
    /// `| |σ⁻¹(+1)| - n/2 | > εn` (magnetization tables).
    Imbalanced(f64),
    /// Energies with `|E - m0| > εm`, `m0 = m · m0_fraction(k, β)`.
    EnergyWindow(f64),
    /// Overlap with the table's reference at least `θ·n` (overlap tables).
    OverlapAtLeast(f64),
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Restriction::All => write!(f, "all"),
            Restriction::Balanced => write!(f, "balanced"),
            Restriction::Imbalanced(e) => write!(f, "imbalanced({e})"),
            Restriction::EnergyWindow(e) => write!(f, "energy_window({e})"),
            Restriction::OverlapAtLeast(t) => write!(f, "overlap_at_least({t})"),
        }
    }
}

impl Restriction {
    fn validate(&self, mode: SpectrumMode) -> Result<()> {
        let incompatible = || Error::IncompatibleSelector {
            selector: self.to_string(),
            mode: mode.to_string(),
        };
        match *self {
            Restriction::All => Ok(()),
            Restriction::Balanced if mode == SpectrumMode::Magnetization => Ok(()),
            Restriction::Imbalanced(e) | Restriction::EnergyWindow(e) if !(e > 0.0 && e < 1.0) => {
                Err(Error::parameter(format!("{self}: ε must lie in (0, 1)")))
            }
            Restriction::Imbalanced(_) if mode == SpectrumMode::Magnetization => Ok(()),
            Restriction::EnergyWindow(_) => Ok(()),
            Restriction::OverlapAtLeast(t) if !(-1.0..=1.0).contains(&t) => {
                Err(Error::parameter(format!("{self}: θ must lie in [-1, 1]")))
            }
            Restriction::OverlapAtLeast(_) if mode == SpectrumMode::Overlap => Ok(()),
            _ => Err(incompatible()),
        }
    }
}

/// `ln Σ count · e^{-βE}` over the cells admitted by `restriction`.
/// An empty admitted set gives `-inf`.
pub fn partition_log(table: &SpectrumTable, beta: f64, restriction: Restriction) -> Result<f64> {
    restriction.validate(table.mode)?;
    if beta < 0.0 || beta.is_nan() {
        return Err(Error::parameter(format!("beta = {beta} must be ≥ 0")));
    }
    let n = table.n as f64;
    let m = table.m as f64;
    let m0 = m * m0_fraction(table.k as u32, beta);
    let terms: Vec<(f64, u64)> = table
        .cells()
        .into_iter()
        .filter(|c| match restriction {
            Restriction::All => true,
            Restriction::Balanced => is_balanced_count(c.key as usize, table.n),
            Restriction::Imbalanced(eps) => (c.key as f64 - n / 2.0).abs() > eps * n,
            Restriction::EnergyWindow(eps) => (c.energy as f64 - m0).abs() > eps * m,
            Restriction::OverlapAtLeast(theta) => {
                c.key as f64 >= theta * n - OVERLAP_SLACK * n.max(1.0)
            }
        })
        .map(|c| (energy_weight(beta, c.energy), c.count))
        .collect();
    Ok(log_sum_exp_weighted(&terms))
}

fn energy_weight(beta: f64, energy: u64) -> f64 {
    if energy == 0 {
        0.0
    } else {
        -beta * energy as f64
    }
}

/// `ln C_β(H, σ)` with overlap threshold `θ` (default 2/3), from an overlap
/// table whose reference is `σ`.
pub fn cluster_log(table: &SpectrumTable, beta: f64, theta: f64) -> Result<f64> {
    if table.mode != SpectrumMode::Overlap {
        return Err(Error::IncompatibleSelector {
            selector: format!("cluster(θ = {theta})"),
            mode: table.mode.to_string(),
        });
    }
    partition_log(table, beta, Restriction::OverlapAtLeast(theta))
}

/// Exact sampler from the Boltzmann distribution `π(σ) ∝ e^{-βE(σ)}`.
///
/// A cell is drawn with probability proportional to `count · e^{-βE}`, then a
/// uniform member of the cell is located by re-walking the Gray code.
pub struct BoltzmannSampler<'a> {
    h: &'a Hypergraph,
    table: &'a SpectrumTable,
    cells: Vec<Cell>,
    cumulative: Vec<f64>,
    inc: Incidence,
}

impl<'a> BoltzmannSampler<'a> {
    pub fn new(table: &'a SpectrumTable, h: &'a Hypergraph, beta: f64) -> Result<Self> {
        if h.n() != table.n || h.num_edges() != table.m {
            return Err(Error::parameter("table was not built from this hypergraph"));
        }
        let cells = table.cells();
        let logw: Vec<f64> = cells
            .iter()
            .map(|c| energy_weight(beta, c.energy) + (c.count as f64).ln())
            .collect();
        let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut cumulative = Vec::with_capacity(cells.len());
        let mut acc = 0.0;
        for lw in &logw {
            acc += (lw - max).exp();
            cumulative.push(acc);
        }
        Ok(BoltzmannSampler {
            h,
            table,
            cells,
            cumulative,
            inc: h.incidence(),
        })
    }

    pub fn sample(&self, rng: &mut crate::rng::Rng) -> Coloring {
        let total = *self.cumulative.last().expect("nonempty table");
        let u = rng.random::<f64>() * total;
        let idx = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.cells.len() - 1);
        let cell = self.cells[idx];
        let target = rng.random_range(0..cell.count);
        let n = self.table.n;
        let ref_mask = self.table.reference.as_ref().map_or(0, Coloring::mask);
        let matches = |w: &GrayWalker| {
            let key = match self.table.mode {
                SpectrumMode::Magnetization => w.mask.count_ones() as i64,
                SpectrumMode::Overlap => n as i64 - 2 * (w.mask ^ ref_mask).count_ones() as i64,
            };
            key == cell.key && w.energy == cell.energy
        };
        let mut walker = GrayWalker::at(self.h, &self.inc, 0);
        let mut seen = 0u64;
        let mut i = 0u64;
        loop {
            if matches(&walker) {
                if seen == target {
                    return Coloring::from_mask(walker.mask, n);
                }
                seen += 1;
            }
            i += 1;
            walker.advance_to(i);
        }
    }
}

/// One exact Boltzmann sample, deterministic in `seed`.
pub fn boltzmann_sample(
    table: &SpectrumTable,
    h: &Hypergraph,
    beta: f64,
    seed: u64,
) -> Result<Coloring> {
    let sampler = BoltzmannSampler::new(table, h, beta)?;
    Ok(sampler.sample(&mut rng_from_seed(seed)))
}

/// Tame: `σ` balanced and `ln C_β(H, σ) ≤ expected_log_z` (cluster overlap
/// 2/3). The balance test runs first, so an unbalanced `σ` never triggers
/// enumeration.
pub fn is_tame(
    h: &Hypergraph,
    sigma: &Coloring,
    beta: f64,
    expected_log_z: f64,
    config: &EnumerationConfig,
) -> Result<bool> {
    h.check_len(sigma)?;
    if !is_balanced(sigma) {
        return Ok(false);
    }
    let table = spectrum(h, SpectrumMode::Overlap, Some(sigma), config)?;
    Ok(cluster_log(&table, beta, DEFAULT_CLUSTER_OVERLAP)? <= expected_log_z)
}

/// `ln Z_β(H)` in one call.
pub fn log_partition(h: &Hypergraph, beta: f64, config: &EnumerationConfig) -> Result<f64> {
    let table = spectrum(h, SpectrumMode::Magnetization, None, config)?;
    partition_log(&table, beta, Restriction::All)
}
