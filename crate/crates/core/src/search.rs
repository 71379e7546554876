//! Branch-and-prune search over `σ × θ` boxes.
//!
//! Each σ slice is processed independently with a LIFO stack of boxes. A box
//! is discarded when the lower bound of the core modulus exceeds the upper
//! bound of the absorbed terms, reported as a failure when the reverse holds
//! strictly, and otherwise halved in every θ coordinate.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluator::{Evaluator, ThetaAssignment};
use crate::interval::{Interval, DEFAULT_ULP_SLOP};
use crate::reduction::{classify, PlanSummary, ReductionPlan};
use crate::scalar::Endpoint;

/// Number of σ slices covering `[1, 2 - 2^-16]`.
pub const SLICE_COUNT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    /// Initial θ subdivision counts, one per core prime. `None` uses
    /// [`default_subdivisions`].
    pub subdivisions: Option<Vec<u32>>,
    pub max_depth: u32,
    /// Box budget per slice (boxes examined).
    pub max_total_boxes: u64,
    pub workers: usize,
    pub ulp_slop: u32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            subdivisions: None,
            max_depth: 64,
            max_total_boxes: 100_000_000,
            workers: SLICE_COUNT,
            ulp_slop: DEFAULT_ULP_SLOP,
        }
    }
}

/// One search cell. `depth` is 1 for the initial partition.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchBox<T> {
    pub sigma: Interval<T>,
    pub thetas: ThetaAssignment<T>,
    pub depth: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Decision {
    Pruned,
    Split,
    Failed,
}

/// The intervals behind a [`Decision`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Examination<T> {
    pub decision: Decision,
    pub core: Interval<T>,
    pub absorbed: Interval<T>,
    /// `core - absorbed`
    pub margin: Interval<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum VerdictKind {
    NoZeros,
    BudgetExhausted,
    PossibleZero,
}

impl VerdictKind {
    /// PossibleZero > BudgetExhausted > NoZeros; associative and commutative.
    pub fn combine(self, other: Self) -> Self {
        self.max(other)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict<T> {
    pub kind: VerdictKind,
    /// Present iff `kind != NoZeros`.
    pub witness: Option<SearchBox<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationStats {
    pub depth: u32,
    #[serde(rename = "boxes")]
    pub boxes_created: u64,
    #[serde(rename = "coverage")]
    pub coverage_percent: f64,
    #[serde(skip)]
    pub pruned: u64,
    #[serde(skip)]
    pub split: u64,
    /// θ-volume fraction of the boxes split at this depth.
    #[serde(skip)]
    pub split_fraction: f64,
}

impl IterationStats {
    fn new(depth: u32) -> Self {
        Self { depth, boxes_created: 0, coverage_percent: 0.0, pruned: 0, split: 0, split_fraction: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SliceReport<T> {
    pub sigma: Interval<T>,
    pub verdict: Verdict<T>,
    pub stats: Vec<IterationStats>,
    pub boxes_examined: u64,
    pub seconds: f64,
}

impl<T> SliceReport<T> {
    pub fn max_depth_reached(&self) -> u32 {
        self.stats.last().map_or(0, |s| s.depth)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport<T> {
    pub n: u64,
    pub plan: PlanSummary,
    pub slices: Vec<SliceReport<T>>,
    pub verdict: VerdictKind,
    pub seconds: f64,
}

impl<T> SearchReport<T> {
    pub fn max_depth_reached(&self) -> u32 {
        self.slices.iter().map(|s| s.max_depth_reached()).max().unwrap_or(0)
    }
}

/// Slice `k` is `[1 + (2^k - 1)·2^-16, 1 + (2^(k+1) - 1)·2^-16]`. All
/// endpoints are exact in both `f32` and `f64`.
pub fn sigma_slices<T: Endpoint>() -> Vec<Interval<T>> {
    let unit = 2f64.powi(-16);
    (0..SLICE_COUNT as i32)
        .map(|k| {
            let lo = 1.0 + (2f64.powi(k) - 1.0) * unit;
            let hi = 1.0 + (2f64.powi(k + 1) - 1.0) * unit;
            Interval::new(T::from_f64(lo).unwrap(), T::from_f64(hi).unwrap()).unwrap()
        })
        .collect()
}

/// Counts 16, 8, 4, 2, 2, … assigned to the core primes in increasing order.
pub fn default_subdivisions(plan: &ReductionPlan) -> Vec<u32> {
    (0..plan.core_primes().len()).map(|i| [16, 8, 4].get(i).copied().unwrap_or(2)).collect()
}

/// Product partition of `[0, 2π]^k` for a fixed σ interval, in lexicographic
/// order (last coordinate fastest).
pub fn initial_partition<T: Endpoint>(
    plan: &ReductionPlan,
    sigma: Interval<T>,
    subdivisions: &[u32],
) -> Result<Vec<SearchBox<T>>> {
    let k = plan.core_primes().len();
    if subdivisions.len() != k {
        return Err(Error::InvalidInput(format!(
            "N={} has {k} core primes but {} subdivision counts were given",
            plan.n(),
            subdivisions.len()
        )));
    }
    if subdivisions.contains(&0) {
        return Err(Error::InvalidInput("subdivision counts must be positive".into()));
    }
    let upper = Interval::<T>::two_pi().hi();
    let axes: Vec<Vec<Interval<T>>> = subdivisions
        .iter()
        .map(|&m| {
            let cut = |j: u32| {
                if j == m {
                    upper
                } else {
                    upper * T::from_count(j as u64) / T::from_count(m as u64)
                }
            };
            (0..m).map(|j| Interval::raw(cut(j), cut(j + 1))).collect()
        })
        .collect();

    let total: usize = subdivisions.iter().map(|&m| m as usize).product();
    let mut boxes = Vec::with_capacity(total);
    let mut index = vec![0usize; k];
    for _ in 0..total {
        let values = index.iter().zip(&axes).map(|(&i, axis)| axis[i]).collect();
        boxes.push(SearchBox { sigma, thetas: ThetaAssignment::from_raw(values), depth: 1 });
        for d in (0..k).rev() {
            index[d] += 1;
            if index[d] < axes[d].len() {
                break;
            }
            index[d] = 0;
        }
    }
    Ok(boxes)
}

/// Halves every θ interval: `2^k` children in lexicographic order of halves
/// (lower half first, last coordinate fastest).
pub fn subdivide<T: Endpoint>(parent: &SearchBox<T>) -> Result<Vec<SearchBox<T>>> {
    let thetas = parent.thetas.values();
    if thetas.is_empty() {
        return Err(Error::CannotSplit { lo: parent.sigma.lo().to_f64_exact(), hi: parent.sigma.hi().to_f64_exact() });
    }
    let halves = thetas.iter().map(|t| t.split()).collect::<Result<Vec<_>>>()?;
    let k = halves.len();
    let children = (0..1usize << k)
        .map(|bits| {
            let values = halves
                .iter()
                .enumerate()
                .map(|(d, &(lo, hi))| if bits >> (k - 1 - d) & 1 == 0 { lo } else { hi })
                .collect();
            SearchBox { sigma: parent.sigma, thetas: ThetaAssignment::from_raw(values), depth: parent.depth + 1 }
        })
        .collect();
    Ok(children)
}

/// Prune / split / fail decision for one box.
pub fn examine<T: Endpoint>(evaluator: &Evaluator<'_, T>, b: &SearchBox<T>) -> Result<Examination<T>> {
    if b.sigma != evaluator.sigma() {
        return Err(Error::InvalidInput(format!("box σ {} differs from evaluator σ {}", b.sigma, evaluator.sigma())));
    }
    let core = evaluator.core_magnitude(&b.thetas)?;
    Ok(decide(core, evaluator.absorbed_bound_for(b.thetas.values())))
}

#[inline]
fn decide<T: Endpoint>(core: Interval<T>, absorbed: Interval<T>) -> Examination<T> {
    let margin = core - absorbed;
    let decision = if margin.is_positive() {
        Decision::Pruned
    } else if margin.is_negative() {
        Decision::Failed
    } else {
        Decision::Split
    };
    Examination { decision, core, absorbed, margin }
}

/// θ-volume of a box as a fraction of `(2π)^k`.
fn volume_fraction<T: Endpoint>(b: &SearchBox<T>, domain: f64) -> f64 {
    b.thetas.values().iter().map(|t| (t.hi() - t.lo()).to_f64_exact() / domain).product()
}

/// Runs the stack search on one σ slice.
pub fn verify_slice<T: Endpoint>(
    plan: &ReductionPlan,
    slice: Interval<T>,
    config: &SearchConfig,
) -> Result<SliceReport<T>> {
    let started = Instant::now();
    let evaluator = Evaluator::new(plan, slice, config.ulp_slop)?;
    let subdivisions = match &config.subdivisions {
        Some(s) => s.clone(),
        None => default_subdivisions(plan),
    };
    let mut stack = initial_partition(plan, slice, &subdivisions)?;
    let domain = Interval::<T>::two_pi().hi().to_f64_exact();

    let mut stats = vec![IterationStats::new(1)];
    stats[0].boxes_created = stack.len() as u64;
    stats[0].coverage_percent = 100.0 * stack.iter().map(|b| volume_fraction(b, domain)).sum::<f64>();
    // Reverse so the first box of the partition is examined first.
    stack.reverse();

    let mut examined = 0u64;
    let finish = |kind, witness, stats: Vec<IterationStats>, examined| {
        Ok(SliceReport {
            sigma: slice,
            verdict: Verdict { kind, witness },
            stats,
            boxes_examined: examined,
            seconds: started.elapsed().as_secs_f64(),
        })
    };

    while let Some(b) = stack.pop() {
        examined += 1;
        if examined > config.max_total_boxes {
            return finish(VerdictKind::BudgetExhausted, Some(b), stats, examined);
        }
        let core = evaluator.core_magnitude_unchecked(b.thetas.values());
        let absorbed = evaluator.absorbed_bound_for(b.thetas.values());
        let level = (b.depth - 1) as usize;
        match decide(core, absorbed).decision {
            Decision::Pruned => stats[level].pruned += 1,
            Decision::Failed => return finish(VerdictKind::PossibleZero, Some(b), stats, examined),
            Decision::Split => {
                if b.depth >= config.max_depth {
                    return finish(VerdictKind::BudgetExhausted, Some(b), stats, examined);
                }
                let children = match subdivide(&b) {
                    Ok(c) => c,
                    Err(_) => return finish(VerdictKind::BudgetExhausted, Some(b), stats, examined),
                };
                let fraction = volume_fraction(&b, domain);
                stats[level].split += 1;
                stats[level].split_fraction += fraction;
                if stats.len() <= level + 1 {
                    stats.push(IterationStats::new(b.depth + 1));
                }
                let next = &mut stats[level + 1];
                next.boxes_created += children.len() as u64;
                next.coverage_percent += 100.0 * children.iter().map(|c| volume_fraction(c, domain)).sum::<f64>();
                stack.extend(children.into_iter().rev());
            }
        }
    }
    finish(VerdictKind::NoZeros, None, stats, examined)
}

/// Classifies `N` and verifies all sixteen σ slices on a pool of
/// `config.workers` threads. Slice results are collected in slice order, so
/// the report does not depend on scheduling.
pub fn verify<T: Endpoint>(n: u64, config: &SearchConfig) -> Result<SearchReport<T>> {
    use rayon::prelude::*;

    if config.workers == 0 {
        return Err(Error::InvalidInput("workers must be at least 1".into()));
    }
    let started = Instant::now();
    let plan = classify(n)?;
    let slices = sigma_slices::<T>();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot build worker pool: {e}")))?;
    let reports =
        pool.install(|| slices.par_iter().map(|&s| verify_slice(&plan, s, config)).collect::<Result<Vec<_>>>())?;
    let verdict = reports.iter().fold(VerdictKind::NoZeros, |acc, r| acc.combine(r.verdict.kind));
    Ok(SearchReport { n, plan: plan.summary(), slices: reports, verdict, seconds: started.elapsed().as_secs_f64() })
}
