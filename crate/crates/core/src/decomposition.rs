//! Core, whitening, backbone, rest and free vertices of a colored
//! hypergraph, and the cluster-size estimate assembled from them.
//!
//! A vertex `v` *supports* an edge `e ∋ v` when every other vertex of `e`
//! has the color opposite to `v`. An edge is `U`-endangered when `U ∩ e` is
//! nonempty and monochromatic.
//!
//! Core and whitening are both computed by one peeling engine. It keeps, for
//! every edge, the number of surviving `+1` and `−1` vertices, and for every
//! surviving vertex the number of fully surviving edges it supports and the
//! number of endangered edges it lies in. Removing vertices can only lower
//! the first count and raise the second, so a violated vertex stays violated
//! and the fixed point does not depend on the removal order.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::f64::consts::LN_2;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Coloring, Hypergraph, Incidence};
use crate::logspace::{ln_binomial, log_sum_exp};
use crate::rng::rng_from_seed;

/// Peeling and estimate constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// CR1: a core vertex supports at least this many edges inside the core.
    pub core_support: u32,
    /// CR2: a core vertex lies in at most this many core-endangered edges.
    pub core_endangered: u32,
    /// WH1: seed vertices support fewer than this many edges...
    pub wh_support: u32,
    /// ...or lie in more than this many monochromatic edges.
    pub wh_mono: u32,
    /// WH2: add a vertex supporting fewer than this many edges outside `U`...
    pub wh_keep_support: u32,
    /// ...or lying in more than this many edges that are endangered with
    /// respect to the complement of `U` and meet `U`.
    pub wh_endangered: u32,
    /// Exponent factor of the core rigidity term `n·e^{−rβ}`.
    pub rigidity_factor: f64,
    /// The `x` of the `(1 − x)n` overlap window.
    pub x_fraction: f64,
    /// Overlap fraction `θ` defining the cluster.
    pub cluster_overlap: f64,
}

impl Thresholds {
    /// The constants 100/10/200/2/150/5/88 with `x = k^{−5}` and `θ = 2/3`.
    pub fn standard(k: usize) -> Self {
        Thresholds {
            core_support: 100,
            core_endangered: 10,
            wh_support: 200,
            wh_mono: 2,
            wh_keep_support: 150,
            wh_endangered: 5,
            rigidity_factor: 88.0,
            x_fraction: (k as f64).powi(-5),
            cluster_overlap: 2.0 / 3.0,
        }
    }

    /// A profile for small degrees: core thresholds `(support, endangered)`,
    /// whitening thresholds derived so that the containment arithmetic holds.
    pub fn scaled(support: u32, endangered: u32, k: usize) -> Self {
        Thresholds {
            core_support: support,
            core_endangered: endangered,
            wh_support: 2 * support,
            wh_mono: endangered / 5,
            wh_keep_support: support + support / 2,
            wh_endangered: endangered / 2,
            ..Self::standard(k)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.wh_keep_support < self.core_support {
            return Err(Error::parameter(format!(
                "wh_keep_support = {} must be at least core_support = {}",
                self.wh_keep_support, self.core_support
            )));
        }
        if self.wh_mono + self.wh_endangered > self.core_endangered {
            return Err(Error::parameter(format!(
                "wh_mono + wh_endangered = {} must not exceed core_endangered = {}",
                self.wh_mono + self.wh_endangered,
                self.core_endangered
            )));
        }
        if !(-1.0..=1.0).contains(&self.cluster_overlap) {
            return Err(Error::parameter("cluster_overlap must lie in [−1, 1]"));
        }
        if !(self.rigidity_factor >= 0.0 && (0.0..=1.0).contains(&self.x_fraction)) {
            return Err(Error::parameter(
                "rigidity_factor must be ≥ 0 and x_fraction in [0, 1]",
            ));
        }
        Ok(())
    }
}

/// Why a vertex left (or, for whitening, joined) a set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeelReason {
    /// CR1 failed.
    CoreSupport,
    /// CR2 failed.
    CoreEndangered,
    /// WH1 by low support.
    SeedSupport,
    /// WH1 by high monochromatic degree.
    SeedMono,
    /// WH2 by low support outside `U`.
    KeepSupport,
    /// WH2 by endangered edges meeting `U`.
    Endangered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeelStep {
    pub vertex: u32,
    pub reason: PeelReason,
}

/// Order in which violating vertices are processed. Only the trace depends
/// on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PeelOrder {
    /// Smallest vertex index first.
    MinIndex,
    /// Smallest `rank[v]` first.
    Ranked(Vec<u32>),
}

impl PeelOrder {
    /// A uniformly random ranking of `0..n`.
    pub fn shuffled(n: usize, seed: u64) -> Self {
        let mut rank: Vec<u32> = (0..n as u32).collect();
        rank.shuffle(&mut rng_from_seed(seed));
        PeelOrder::Ranked(rank)
    }

    fn rank(&self, v: usize) -> u32 {
        match self {
            PeelOrder::MinIndex => v as u32,
            PeelOrder::Ranked(r) => r[v],
        }
    }
}

/// A vertex set with the trace of how it was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeeledSet {
    members: Vec<bool>,
    pub trace: Vec<PeelStep>,
}

impl PeeledSet {
    pub fn contains(&self, v: usize) -> bool {
        self.members[v]
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mask(&self) -> &[bool] {
        &self.members
    }

    pub fn vertices(&self) -> Vec<u32> {
        mask_to_vertices(&self.members)
    }
}

fn mask_to_vertices(mask: &[bool]) -> Vec<u32> {
    mask.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(v, _)| v as u32)
        .collect()
}

/// Whether `v ∈ edge` supports `edge` under `σ`.
pub fn supports(sigma: &Coloring, edge: &[u32], v: u32) -> bool {
    let own = sigma.is_plus(v as usize);
    edge.contains(&v)
        && edge
            .iter()
            .all(|&w| w == v || sigma.is_plus(w as usize) != own)
}

/// For every vertex, the number of edges of `h` it supports.
pub fn support_counts(h: &Hypergraph, sigma: &Coloring) -> Result<Vec<u32>> {
    h.check_len(sigma)?;
    let mut counts = vec![0u32; h.n()];
    for e in h.edges() {
        for_each_supporter(sigma, e, |w| counts[w as usize] += 1);
    }
    Ok(counts)
}

/// For every vertex, the number of `σ`-monochromatic edges containing it.
pub fn mono_degrees(h: &Hypergraph, sigma: &Coloring) -> Result<Vec<u32>> {
    h.check_len(sigma)?;
    let mut counts = vec![0u32; h.n()];
    for e in h.edges() {
        if sigma.is_monochromatic(e) {
            for &v in e {
                counts[v as usize] += 1;
            }
        }
    }
    Ok(counts)
}

/// Number of edges containing `v` that are `U`-endangered, with `U` given as
/// a membership mask.
pub fn endangered_count(h: &Hypergraph, sigma: &Coloring, set: &[bool], v: usize) -> Result<u32> {
    h.check_len(sigma)?;
    if set.len() != h.n() {
        return Err(Error::LengthMismatch {
            expected: h.n(),
            actual: set.len(),
        });
    }
    Ok(h.edges()
        .filter(|e| e.contains(&(v as u32)) && is_endangered(sigma, set, e))
        .count() as u32)
}

fn is_endangered(sigma: &Coloring, set: &[bool], edge: &[u32]) -> bool {
    let mut colors = edge
        .iter()
        .filter(|&&w| set[w as usize])
        .map(|&w| sigma.is_plus(w as usize));
    match colors.next() {
        None => false,
        Some(first) => colors.all(|c| c == first),
    }
}

/// Calls `f` on each vertex of `edge` that supports it: a vertex whose color
/// occurs exactly once in the edge.
fn for_each_supporter(sigma: &Coloring, edge: &[u32], mut f: impl FnMut(u32)) {
    if edge.len() < 2 {
        return;
    }
    let plus = edge.iter().filter(|&&w| sigma.is_plus(w as usize)).count();
    let minus = edge.len() - plus;
    if plus == 1 || minus == 1 {
        for &w in edge {
            let own = if sigma.is_plus(w as usize) {
                plus
            } else {
                minus
            };
            if own == 1 {
                f(w);
            }
        }
    }
}

struct Rule {
    support_min: u32,
    endangered_max: u32,
    /// Count only endangered edges that have lost a vertex.
    require_removed_contact: bool,
    support_reason: PeelReason,
    endangered_reason: PeelReason,
}

/// Peels `alive` down to the largest subset in which every vertex supports at
/// least `support_min` fully surviving edges and lies in at most
/// `endangered_max` endangered edges.
fn peel(
    h: &Hypergraph,
    inc: &Incidence,
    sigma: &Coloring,
    mut alive: Vec<bool>,
    rule: &Rule,
    order: &PeelOrder,
) -> (Vec<bool>, Vec<PeelStep>) {
    let k = h.k() as u32;
    let n = h.n();
    let m = h.num_edges();
    let mut alive_plus = vec![0u32; m];
    let mut alive_minus = vec![0u32; m];
    let mut support = vec![0u32; n];
    let mut endangered = vec![0u32; n];

    let counts_endangered = |plus: u32, minus: u32| {
        let total = plus + minus;
        total > 0 && (plus == 0 || minus == 0) && !(rule.require_removed_contact && total == k)
    };

    for (id, e) in h.edges().enumerate() {
        for &w in e {
            if alive[w as usize] {
                if sigma.is_plus(w as usize) {
                    alive_plus[id] += 1;
                } else {
                    alive_minus[id] += 1;
                }
            }
        }
        let (p, q) = (alive_plus[id], alive_minus[id]);
        if p + q == k {
            for_each_supporter(sigma, e, |w| support[w as usize] += 1);
        }
        if counts_endangered(p, q) {
            for &w in e {
                if alive[w as usize] {
                    endangered[w as usize] += 1;
                }
            }
        }
    }

    let violated = |v: usize, support: &[u32], endangered: &[u32]| {
        support[v] < rule.support_min || endangered[v] > rule.endangered_max
    };
    let mut queued = vec![false; n];
    let mut heap = BinaryHeap::new();
    for v in 0..n {
        if alive[v] && violated(v, &support, &endangered) {
            queued[v] = true;
            heap.push(Reverse((order.rank(v), v as u32)));
        }
    }

    let mut trace = Vec::new();
    while let Some(Reverse((_, v))) = heap.pop() {
        let v = v as usize;
        if !alive[v] {
            continue;
        }
        let reason = if support[v] < rule.support_min {
            rule.support_reason
        } else {
            rule.endangered_reason
        };
        alive[v] = false;
        trace.push(PeelStep {
            vertex: v as u32,
            reason,
        });
        let plus = sigma.is_plus(v);
        for &id in inc.edges_of(v) {
            let id = id as usize;
            let e = h.edge(id);
            let (p, q) = (alive_plus[id], alive_minus[id]);
            let was_inside = p + q == k;
            let was_endangered = counts_endangered(p, q);
            let (p, q) = if plus { (p - 1, q) } else { (p, q - 1) };
            alive_plus[id] = p;
            alive_minus[id] = q;
            let mut touched: [u32; 2] = [u32::MAX; 2];
            if was_inside {
                let mut slot = 0;
                for_each_supporter(sigma, e, |w| {
                    if w as usize != v {
                        support[w as usize] -= 1;
                        touched[slot] = w;
                        slot += 1;
                    }
                });
            }
            let newly_endangered = !was_endangered && counts_endangered(p, q);
            if newly_endangered {
                for &w in e {
                    if alive[w as usize] {
                        endangered[w as usize] += 1;
                    }
                }
            }
            let mut enqueue = |w: usize| {
                if alive[w] && !queued[w] && violated(w, &support, &endangered) {
                    queued[w] = true;
                    heap.push(Reverse((order.rank(w), w as u32)));
                }
            };
            for &w in touched.iter().filter(|&&w| w != u32::MAX) {
                enqueue(w as usize);
            }
            if newly_endangered {
                for &w in e {
                    enqueue(w as usize);
                }
            }
        }
    }
    (alive, trace)
}

/// The core: the largest set `V'` in which every vertex supports at least
/// `core_support` edges inside `V'` and lies in at most `core_endangered`
/// `V'`-endangered edges. Violating vertices are removed smallest index first.
pub fn core_peel(h: &Hypergraph, sigma: &Coloring, th: &Thresholds) -> Result<PeeledSet> {
    core_peel_ordered(h, sigma, th, &PeelOrder::MinIndex)
}

pub fn core_peel_ordered(
    h: &Hypergraph,
    sigma: &Coloring,
    th: &Thresholds,
    order: &PeelOrder,
) -> Result<PeeledSet> {
    th.validate()?;
    h.check_len(sigma)?;
    check_order(order, h.n())?;
    let rule = Rule {
        support_min: th.core_support,
        endangered_max: th.core_endangered,
        require_removed_contact: false,
        support_reason: PeelReason::CoreSupport,
        endangered_reason: PeelReason::CoreEndangered,
    };
    let (members, trace) = peel(h, &h.incidence(), sigma, vec![true; h.n()], &rule, order);
    Ok(PeeledSet { members, trace })
}

/// The whitened set `U`: the seeds of WH1 grown by WH2 to a fixed point.
/// Its complement is always contained in the core.
pub fn whitening(h: &Hypergraph, sigma: &Coloring, th: &Thresholds) -> Result<PeeledSet> {
    whitening_ordered(h, sigma, th, &PeelOrder::MinIndex)
}

pub fn whitening_ordered(
    h: &Hypergraph,
    sigma: &Coloring,
    th: &Thresholds,
    order: &PeelOrder,
) -> Result<PeeledSet> {
    th.validate()?;
    h.check_len(sigma)?;
    check_order(order, h.n())?;
    let support = support_counts(h, sigma)?;
    let mono = mono_degrees(h, sigma)?;
    let mut trace = Vec::new();
    let mut outside = vec![true; h.n()];
    for v in 0..h.n() {
        let reason = if support[v] < th.wh_support {
            PeelReason::SeedSupport
        } else if mono[v] > th.wh_mono {
            PeelReason::SeedMono
        } else {
            continue;
        };
        outside[v] = false;
        trace.push(PeelStep {
            vertex: v as u32,
            reason,
        });
    }
    let rule = Rule {
        support_min: th.wh_keep_support,
        endangered_max: th.wh_endangered,
        require_removed_contact: true,
        support_reason: PeelReason::KeepSupport,
        endangered_reason: PeelReason::Endangered,
    };
    let (outside, grown) = peel(h, &h.incidence(), sigma, outside, &rule, order);
    trace.extend(grown);
    Ok(PeeledSet {
        members: outside.iter().map(|&b| !b).collect(),
        trace,
    })
}

fn check_order(order: &PeelOrder, n: usize) -> Result<()> {
    if let PeelOrder::Ranked(r) = order {
        if r.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: r.len(),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexClass {
    Core,
    Backbone,
    /// In the rest but not free.
    Rest,
    /// In the rest and free.
    Free,
}

/// The partition `core ⊔ backbone ⊔ rest` of the vertices, with `free ⊆ rest`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    classes: Vec<VertexClass>,
    /// Edges each vertex supports in the whole hypergraph.
    pub support_count: Vec<u32>,
    /// Core-endangered edges containing each vertex.
    pub endangered_count: Vec<u32>,
    /// `M'_σ(v)`: monochromatic edges containing each vertex.
    pub mono_degree: Vec<u32>,
    /// Removals that produced the core (empty when the core was supplied).
    pub peel_trace: Vec<PeelStep>,
    /// `|U|` from whitening, when it was run.
    pub whitened: Option<usize>,
    /// Whether the complement of `U` lies inside the core, when whitening was run.
    pub containment: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionSizes {
    pub n: usize,
    pub core: usize,
    pub backbone: usize,
    /// All of the rest, free vertices included.
    pub rest: usize,
    pub free: usize,
}

impl Decomposition {
    pub fn class(&self, v: usize) -> VertexClass {
        self.classes[v]
    }

    pub fn in_core(&self, v: usize) -> bool {
        self.classes[v] == VertexClass::Core
    }

    pub fn in_rest(&self, v: usize) -> bool {
        matches!(self.classes[v], VertexClass::Rest | VertexClass::Free)
    }

    pub fn is_free(&self, v: usize) -> bool {
        self.classes[v] == VertexClass::Free
    }

    pub fn core_mask(&self) -> Vec<bool> {
        self.classes
            .iter()
            .map(|&c| c == VertexClass::Core)
            .collect()
    }

    pub fn vertices_of(&self, class: VertexClass) -> Vec<u32> {
        mask_to_vertices(&self.classes.iter().map(|&c| c == class).collect::<Vec<_>>())
    }

    pub fn free_vertices(&self) -> Vec<u32> {
        self.vertices_of(VertexClass::Free)
    }

    pub fn sizes(&self) -> DecompositionSizes {
        let count = |c: VertexClass| self.classes.iter().filter(|&&x| x == c).count();
        let free = count(VertexClass::Free);
        DecompositionSizes {
            n: self.classes.len(),
            core: count(VertexClass::Core),
            backbone: count(VertexClass::Backbone),
            rest: count(VertexClass::Rest) + free,
            free,
        }
    }

    /// `Σ_{v ∈ rest ∖ free} M'_σ(v)`.
    pub fn nonfree_mono_sum(&self) -> u64 {
        self.classes
            .iter()
            .zip(&self.mono_degree)
            .filter(|(&c, _)| c == VertexClass::Rest)
            .map(|(_, &m)| m as u64)
            .sum()
    }
}

/// Splits the non-core vertices into backbone, rest and free for a given core.
///
/// Backbone: supports some edge whose other vertices are all in the core, and
/// lies in no `({v} ∪ core)`-endangered edge. Free: a rest vertex all of whose
/// edges meet the core in a nonempty bichromatic set.
pub fn classify_vertices(h: &Hypergraph, sigma: &Coloring, core: &[bool]) -> Result<Decomposition> {
    h.check_len(sigma)?;
    if core.len() != h.n() {
        return Err(Error::LengthMismatch {
            expected: h.n(),
            actual: core.len(),
        });
    }
    let support_count = support_counts(h, sigma)?;
    let mono_degree = mono_degrees(h, sigma)?;
    let n = h.n();
    let mut endangered_count = vec![0u32; n];
    let mut pinned = vec![false; n];
    let mut exposed = vec![false; n];
    let mut all_bichromatic_core = vec![true; n];
    for e in h.edges() {
        let (mut core_plus, mut core_minus, mut outside) = (0u32, 0u32, 0u32);
        for &w in e {
            if core[w as usize] {
                if sigma.is_plus(w as usize) {
                    core_plus += 1;
                } else {
                    core_minus += 1;
                }
            } else {
                outside += 1;
            }
        }
        let core_mono = core_plus == 0 || core_minus == 0;
        let endangered = core_mono && core_plus + core_minus > 0;
        for &w in e {
            let w = w as usize;
            if endangered {
                endangered_count[w] += 1;
            }
            if core_mono {
                all_bichromatic_core[w] = false;
            }
            if !core[w] {
                if outside == 1 && supports(sigma, e, w as u32) {
                    pinned[w] = true;
                }
                // e ∩ ({w} ∪ core) is monochromatic iff no core vertex of e has the opposite color
                let opposite = if sigma.is_plus(w) {
                    core_minus
                } else {
                    core_plus
                };
                if opposite == 0 {
                    exposed[w] = true;
                }
            }
        }
    }
    let classes = (0..n)
        .map(|v| {
            if core[v] {
                VertexClass::Core
            } else if pinned[v] && !exposed[v] {
                VertexClass::Backbone
            } else if all_bichromatic_core[v] {
                VertexClass::Free
            } else {
                VertexClass::Rest
            }
        })
        .collect();
    Ok(Decomposition {
        classes,
        support_count,
        endangered_count,
        mono_degree,
        peel_trace: Vec::new(),
        whitened: None,
        containment: None,
    })
}

/// Core peeling, whitening and classification in one pass. The containment
/// of the whitening complement in the core is recorded.
pub fn decompose(h: &Hypergraph, sigma: &Coloring, th: &Thresholds) -> Result<Decomposition> {
    let core = core_peel(h, sigma, th)?;
    let white = whitening(h, sigma, th)?;
    let containment = (0..h.n()).all(|v| white.contains(v) || core.contains(v));
    let mut dec = classify_vertices(h, sigma, core.mask())?;
    dec.peel_trace = core.trace;
    dec.whitened = Some(white.len());
    dec.containment = Some(containment);
    Ok(dec)
}

/// Unnormalised terms of the estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateTerms {
    /// `|free|·ln 2`.
    pub free_entropy: f64,
    /// `ln Σ_{i ≤ budget} C(|free|, i)`, equal to `free_entropy` when feasible.
    pub free_entropy_capped: f64,
    /// `|rest|·ln 2`.
    pub rest_entropy: f64,
    /// `β·E_H(σ)`.
    pub energy: f64,
    /// `β·Σ_{rest∖free} M'_σ(v)`.
    pub rest_correction: f64,
    /// `n·e^{−rβ}`.
    pub rigidity: f64,
    /// `e^{−β}·|backbone|`.
    pub backbone: f64,
}

/// Cluster-size estimate, normalised by `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusterEstimate {
    /// Certified: `ln` of the mass of colorings obtained by flipping at most
    /// `budget` free vertices, over `n`.
    pub lower: f64,
    /// `(|free| ln2 − βE)/n` without the overlap cap.
    pub lower_uncapped: f64,
    /// Not certified: mixes exact terms with asymptotic rigidity corrections.
    pub upper: f64,
    /// Midpoint of `lower` and `upper`.
    pub point: f64,
    /// Whether `|free| ≤ n(1 − θ)/2`, i.e. flipping every free vertex stays
    /// inside the cluster.
    pub overlap_feasible: bool,
    /// Largest number of flips that stays inside the cluster.
    pub budget: usize,
    pub cluster_overlap: f64,
    pub x_fraction: f64,
    pub terms: EstimateTerms,
}

pub fn cluster_log_estimate(
    h: &Hypergraph,
    sigma: &Coloring,
    beta: f64,
    dec: &Decomposition,
    th: &Thresholds,
) -> Result<ClusterEstimate> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::parameter(format!("beta = {beta} must be ≥ 0")));
    }
    th.validate()?;
    let n = h.n();
    if dec.classes.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: dec.classes.len(),
        });
    }
    let sizes = dec.sizes();
    let energy_count = h.monochromatic_count(sigma)? as f64;
    let nf = n as f64;
    let budget_f = nf * (1.0 - th.cluster_overlap) / 2.0;
    let budget = (budget_f + 1e-9 * nf.max(1.0)).floor().max(0.0) as usize;
    let free = sizes.free;
    let free_entropy_capped = if free <= budget {
        free as f64 * LN_2
    } else {
        let terms: Vec<f64> = (0..=budget)
            .map(|i| ln_binomial(free as u64, i as u64))
            .collect();
        log_sum_exp(&terms)
    };
    let energy = if energy_count == 0.0 {
        0.0
    } else {
        beta * energy_count
    };
    let terms = EstimateTerms {
        free_entropy: free as f64 * LN_2,
        free_entropy_capped,
        rest_entropy: sizes.rest as f64 * LN_2,
        energy,
        rest_correction: beta * dec.nonfree_mono_sum() as f64,
        rigidity: nf * (-th.rigidity_factor * beta).exp(),
        backbone: (-beta).exp() * sizes.backbone as f64,
    };
    let lower = (terms.free_entropy_capped - terms.energy) / nf;
    let upper = (terms.rest_entropy - terms.energy
        + terms.rest_correction
        + terms.rigidity
        + terms.backbone)
        / nf;
    Ok(ClusterEstimate {
        lower,
        lower_uncapped: (terms.free_entropy - terms.energy) / nf,
        upper,
        point: 0.5 * (lower + upper),
        overlap_feasible: free <= budget,
        budget,
        cluster_overlap: th.cluster_overlap,
        x_fraction: th.x_fraction,
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{cluster_log, spectrum, EnumerationConfig, SpectrumMode};
    use crate::planted::gen_planted;
    use rand::Rng as _;

    fn edge_graph(n: usize, k: usize, edges: Vec<Vec<u32>>) -> Hypergraph {
        Hypergraph::new(n, k, edges, false).unwrap()
    }

    /// Recomputes CR1/CR2 for every member of `set` from scratch.
    fn satisfies_core_rules(
        h: &Hypergraph,
        sigma: &Coloring,
        set: &[bool],
        th: &Thresholds,
    ) -> bool {
        (0..h.n()).filter(|&v| set[v]).all(|v| {
            let support = h
                .edges()
                .filter(|e| e.iter().all(|&w| set[w as usize]) && supports(sigma, e, v as u32))
                .count() as u32;
            support >= th.core_support
                && endangered_count(h, sigma, set, v).unwrap() <= th.core_endangered
        })
    }

    #[test]
    fn support_predicate() {
        let sigma: Coloring = "+--+".parse().unwrap();
        assert!(supports(&sigma, &[0, 1, 2], 0));
        assert!(!supports(&sigma, &[0, 1, 2], 1));
        assert!(!supports(&sigma, &[0, 1, 3], 0));
        assert!(!supports(&sigma, &[1, 2, 3], 0));
    }

    #[test]
    fn endangered_examples() {
        let h = edge_graph(5, 3, vec![vec![0, 1, 2], vec![1, 3, 4]]);
        let sigma: Coloring = "+++-+".parse().unwrap();
        let none = vec![false; 5];
        let all = vec![true; 5];
        for v in 0..5 {
            assert_eq!(endangered_count(&h, &sigma, &none, v).unwrap(), 0);
        }
        assert_eq!(endangered_count(&h, &sigma, &all, 0).unwrap(), 1);
        assert_eq!(endangered_count(&h, &sigma, &all, 1).unwrap(), 1);
        assert_eq!(endangered_count(&h, &sigma, &all, 3).unwrap(), 0);
        let partial = vec![false, true, false, false, true];
        assert_eq!(endangered_count(&h, &sigma, &partial, 1).unwrap(), 2);
    }

    #[test]
    fn empty_hypergraph() {
        let h = Hypergraph::empty(6, 3);
        let sigma: Coloring = "+-+-+-".parse().unwrap();
        let th = Thresholds::scaled(2, 1, 3);
        assert!(core_peel(&h, &sigma, &th).unwrap().is_empty());
        assert_eq!(whitening(&h, &sigma, &th).unwrap().len(), 6);
        let dec = classify_vertices(&h, &sigma, &[false; 6]).unwrap();
        let s = dec.sizes();
        assert_eq!((s.core, s.backbone, s.rest, s.free), (0, 0, 6, 6));
    }

    #[test]
    fn empty_core_frees_only_isolated_vertices() {
        let h = edge_graph(6, 3, vec![vec![0, 1, 2], vec![1, 2, 3]]);
        let sigma: Coloring = "+--+-+".parse().unwrap();
        let dec = classify_vertices(&h, &sigma, &[false; 6]).unwrap();
        assert_eq!(dec.free_vertices(), vec![4, 5]);
        assert_eq!(dec.sizes().backbone, 0);
    }

    #[test]
    fn constructed_full_core() {
        // every vertex supports an edge, and no edge is endangered
        let sigma: Coloring = "++--".parse().unwrap();
        let h = edge_graph(
            4,
            3,
            vec![vec![0, 2, 3], vec![1, 2, 3], vec![0, 1, 2], vec![0, 1, 3]],
        );
        let th = Thresholds {
            core_support: 1,
            core_endangered: 0,
            wh_keep_support: 1,
            wh_mono: 0,
            wh_endangered: 0,
            ..Thresholds::standard(3)
        };
        let sup = support_counts(&h, &sigma).unwrap();
        assert!(sup.iter().all(|&s| s >= 1), "{sup:?}");
        assert!(h.edges().all(|e| !sigma.is_monochromatic(e)));
        let core = core_peel(&h, &sigma, &th).unwrap();
        assert_eq!(core.len(), 4);
        assert!(core.trace.is_empty());
    }

    #[test]
    fn threshold_invariants() {
        assert!(Thresholds::standard(8).validate().is_ok());
        for s in 0..20 {
            for e in 0..20 {
                assert!(Thresholds::scaled(s, e, 5).validate().is_ok());
            }
        }
        let bad = Thresholds {
            wh_keep_support: 50,
            ..Thresholds::standard(5)
        };
        assert!(bad.validate().is_err());
        let bad = Thresholds {
            wh_mono: 6,
            ..Thresholds::standard(5)
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn peeling_is_order_free_and_a_true_fixed_point() {
        let th = Thresholds::scaled(2, 1, 3);
        for seed in 0..5 {
            let inst = gen_planted(9.0, 3, 300, 2.0, seed, true).unwrap();
            let (h, sigma) = (&inst.hypergraph, &inst.sigma);
            let core = core_peel(h, sigma, &th).unwrap();
            let white = whitening(h, sigma, &th).unwrap();
            assert!(satisfies_core_rules(h, sigma, core.mask(), &th));
            for order_seed in 0..20 {
                let order = PeelOrder::shuffled(300, order_seed);
                assert_eq!(
                    core_peel_ordered(h, sigma, &th, &order).unwrap().mask(),
                    core.mask()
                );
                assert_eq!(
                    whitening_ordered(h, sigma, &th, &order).unwrap().mask(),
                    white.mask()
                );
            }
            assert!((0..300).all(|v| white.contains(v) || core.contains(v)));
        }
    }

    #[test]
    fn trace_records_real_violations() {
        let th = Thresholds::scaled(2, 1, 3);
        let inst = gen_planted(6.0, 3, 120, 1.5, 4, true).unwrap();
        let (h, sigma) = (&inst.hypergraph, &inst.sigma);
        let core = core_peel(h, sigma, &th).unwrap();
        let mut alive = vec![true; h.n()];
        for step in &core.trace {
            let v = step.vertex as usize;
            let support = h
                .edges()
                .filter(|e| e.iter().all(|&w| alive[w as usize]) && supports(sigma, e, step.vertex))
                .count() as u32;
            let endangered = endangered_count(h, sigma, &alive, v).unwrap();
            match step.reason {
                PeelReason::CoreSupport => assert!(support < th.core_support),
                PeelReason::CoreEndangered => assert!(endangered > th.core_endangered),
                other => panic!("unexpected reason {other:?}"),
            }
            alive[v] = false;
        }
        assert_eq!(alive, core.mask());
    }

    #[test]
    fn whitening_matches_a_naive_replay() {
        let th = Thresholds::scaled(2, 4, 3);
        let inst = gen_planted(8.0, 3, 150, 1.0, 2, true).unwrap();
        let (h, sigma) = (&inst.hypergraph, &inst.sigma);
        let sup = support_counts(h, sigma).unwrap();
        let mono = mono_degrees(h, sigma).unwrap();
        let mut in_u: Vec<bool> = (0..h.n())
            .map(|v| sup[v] < th.wh_support || mono[v] > th.wh_mono)
            .collect();
        loop {
            let outside: Vec<bool> = in_u.iter().map(|&b| !b).collect();
            let add = (0..h.n()).find(|&v| {
                if in_u[v] {
                    return false;
                }
                let keep = h
                    .edges()
                    .filter(|e| {
                        e.iter().all(|&w| outside[w as usize]) && supports(sigma, e, v as u32)
                    })
                    .count() as u32;
                let touching = h
                    .edges()
                    .filter(|e| {
                        e.contains(&(v as u32))
                            && e.iter().any(|&w| in_u[w as usize])
                            && is_endangered(sigma, &outside, e)
                    })
                    .count() as u32;
                keep < th.wh_keep_support || touching > th.wh_endangered
            });
            match add {
                Some(v) => in_u[v] = true,
                None => break,
            }
        }
        assert_eq!(whitening(h, sigma, &th).unwrap().mask(), &in_u[..]);
    }

    #[test]
    fn partition_and_free_flips() {
        let th = Thresholds::scaled(2, 1, 3);
        let mut rng = rng_from_seed(77);
        for seed in 0..10 {
            let inst = gen_planted(7.0, 3, 200, 2.0, seed, true).unwrap();
            let (h, sigma) = (&inst.hypergraph, &inst.sigma);
            let dec = decompose(h, sigma, &th).unwrap();
            assert_eq!(dec.containment, Some(true));
            let s = dec.sizes();
            assert_eq!(s.core + s.backbone + s.rest, s.n);
            assert!(s.free <= s.rest);
            let free = dec.free_vertices();
            let e0 = h.monochromatic_count(sigma).unwrap();
            for _ in 0..100 {
                let mut tau = sigma.clone();
                for &v in &free {
                    if rng.random::<bool>() {
                        tau.flip(v as usize);
                    }
                }
                assert_eq!(h.monochromatic_count(&tau).unwrap(), e0);
            }
        }
    }

    #[test]
    fn lower_bound_against_exact_cluster() {
        let th = Thresholds::scaled(2, 1, 3);
        let cfg = EnumerationConfig::default();
        for seed in 0..10 {
            let inst = gen_planted(4.0, 3, 16, 1.5, seed, true).unwrap();
            let (h, sigma) = (&inst.hypergraph, &inst.sigma);
            let dec = decompose(h, sigma, &th).unwrap();
            let est = cluster_log_estimate(h, sigma, 1.5, &dec, &th).unwrap();
            let table = spectrum(h, SpectrumMode::Overlap, Some(sigma), &cfg).unwrap();
            let exact = cluster_log(&table, 1.5, th.cluster_overlap).unwrap() / 16.0;
            assert!(
                est.lower <= exact + 1e-12,
                "seed {seed}: {} > {exact}",
                est.lower
            );
            assert!(est.lower <= est.lower_uncapped + 1e-12);
        }
    }

    #[test]
    fn estimate_gap_vanishes_without_backbone_and_nonfree_rest() {
        // isolated vertices only: core and backbone empty, rest = free
        let h = Hypergraph::empty(30, 3);
        let sigma = Coloring::all_plus(30);
        let th = Thresholds::scaled(1, 0, 3);
        let dec = decompose(&h, &sigma, &th).unwrap();
        let mut last = f64::INFINITY;
        for beta in [0.1, 0.2, 0.5] {
            let est = cluster_log_estimate(&h, &sigma, beta, &dec, &th).unwrap();
            let gap = est.upper - est.lower_uncapped;
            assert!((gap - (-th.rigidity_factor * beta).exp()).abs() < 1e-12);
            assert!(gap < last);
            last = gap;
        }
    }
}
