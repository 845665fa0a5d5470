//! Shell-indexed singular value sums, log-log decay fits, and
//! compactness / Schatten-class verdicts.
//!
//! A displacement-homogeneous operator maps the orthonormal fibers of a
//! degree shell to mutually orthogonal targets, so its singular values are
//! exactly the union of its per-point block singular values. Shell sums of
//! `sigma^p` are therefore computed without any truncation error; the only
//! approximation in this module is the extrapolation step, and every verdict
//! carries its fit diagnostics for that reason.
//!
//! Shells may be evaluated concurrently (see `ESSNORM_THREADS`), but sums
//! are always reduced in ascending shell order with compensated summation,
//! so results are bit-identical across thread counts.

use crate::error::{Error, Result};
use crate::lattice::DegreeShell;
use crate::shiftops::{cross_commutator, Domain, LatticeOperator};
use crate::weights::{ConditionVerdict, WeightSet};
use rayon::prelude::*;
use serde::Serialize;
use std::sync::{Arc, OnceLock};

pub const DEFAULT_MAX_DEGREE: u32 = 600;
pub const DEFAULT_MARGIN: f64 = 0.1;
const MIN_FIT_SHELLS: usize = 5;

static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();

/// Shared thread pool; `ESSNORM_THREADS` caps its size (unset or 0 leaves
/// the default).
pub fn thread_pool() -> &'static rayon::ThreadPool {
    POOL.get_or_init(|| {
        let threads = std::env::var("ESSNORM_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .unwrap_or(0);
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
    })
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    pub fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.comp += (self.sum - t) + term;
        } else {
            self.comp += (term - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// One degree shell of a singular value series.
#[derive(Debug, Clone, Serialize)]
pub struct ShellEntry {
    pub n: u32,
    /// number of singular values the shell carries (zeros included)
    pub count: usize,
    /// sum of `sigma^p` over the shell
    pub sum: f64,
    /// largest singular value on the shell
    pub sup: f64,
    /// compensated running total of the shell sums
    pub cumulative: f64,
}

/// Shell sums of `sigma^p` for one operator and one order `p`.
#[derive(Debug, Clone, Serialize)]
pub struct ShellSumSeries {
    pub p: f64,
    pub shells: Vec<ShellEntry>,
}

impl ShellSumSeries {
    /// The partial Schatten `p`-power sum up to the last computed shell.
    pub fn partial(&self) -> f64 {
        self.shells.last().map(|s| s.cumulative).unwrap_or(0.0)
    }
}

fn pow(sigma: f64, p: f64) -> f64 {
    if p == 1.0 {
        sigma
    } else if p == 2.0 {
        sigma * sigma
    } else {
        sigma.powf(p)
    }
}

/// All singular values the operator carries on shell `n`, zeros included,
/// descending.
pub fn shell_singular_values(op: &LatticeOperator, n: u32) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for beta in DegreeShell::new(op.domain().m(), n) {
        let d_in = op.input_dim(beta.entries());
        if d_in == 0 {
            continue;
        }
        match op.coefficient(beta.entries())? {
            Some(block) => out.extend(block.singular_values()),
            None => out.extend(std::iter::repeat_n(0.0, d_in)),
        }
    }
    out.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(out)
}

fn shell_stats(op: &LatticeOperator, ps: &[f64], n: u32) -> Result<(usize, Vec<f64>, f64)> {
    let mut count = 0usize;
    let mut sums = vec![Compensated::default(); ps.len()];
    let mut sup = 0.0f64;
    for beta in DegreeShell::new(op.domain().m(), n) {
        let d_in = op.input_dim(beta.entries());
        if d_in == 0 {
            continue;
        }
        count += d_in;
        if let Some(block) = op.coefficient(beta.entries())? {
            for sigma in block.singular_values() {
                if sigma == 0.0 {
                    continue;
                }
                sup = sup.max(sigma);
                for (acc, &p) in sums.iter_mut().zip(ps) {
                    acc.add(pow(sigma, p));
                }
            }
        }
    }
    Ok((count, sums.iter().map(|c| c.value()).collect(), sup))
}

/// Shell sums for several orders at once; the singular values are computed
/// once per shell. Shells run in parallel, the reduction is ordered.
pub fn shell_series(
    op: &LatticeOperator,
    ps: &[f64],
    max_degree: u32,
) -> Result<Vec<ShellSumSeries>> {
    for &p in ps {
        if !p.is_finite() || p <= 0.0 {
            return Err(Error::Invalid(format!(
                "Schatten order must be positive, got {p}"
            )));
        }
    }
    let stats: Vec<(usize, Vec<f64>, f64)> = thread_pool().install(|| {
        (0..=max_degree)
            .into_par_iter()
            .map(|n| shell_stats(op, ps, n))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut out: Vec<ShellSumSeries> = ps
        .iter()
        .map(|&p| ShellSumSeries {
            p,
            shells: Vec::with_capacity(max_degree as usize + 1),
        })
        .collect();
    let mut totals = vec![Compensated::default(); ps.len()];
    for (n, (count, sums, sup)) in stats.into_iter().enumerate() {
        for (pi, series) in out.iter_mut().enumerate() {
            let sum = sums[pi];
            if !sum.is_finite() {
                return Err(Error::Overflow { shell: n as u32 });
            }
            totals[pi].add(sum);
            series.shells.push(ShellEntry {
                n: n as u32,
                count,
                sum,
                sup,
                cumulative: totals[pi].value(),
            });
        }
    }
    Ok(out)
}

/// Partial Schatten `p`-power sum over shells `0..=max_degree`.
pub fn schatten_partial(
    op: &LatticeOperator,
    p: f64,
    max_degree: u32,
) -> Result<(f64, ShellSumSeries)> {
    let mut series = shell_series(op, &[p], max_degree)?;
    let series = series.remove(0);
    Ok((series.partial(), series))
}

/// Least-squares line through the log-log shell sums.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (u32, u32),
    /// number of shells with a positive sum inside the window
    pub points: usize,
}

/// Fit `log(sum)` against `log(n)` over `window`; zero shells are skipped.
pub fn fit_decay(series: &ShellSumSeries, window: (u32, u32)) -> Result<DecayFit> {
    fit_values(series.shells.iter().map(|s| (s.n, s.sum)), window)
}

fn fit_values<I: Iterator<Item = (u32, f64)>>(values: I, window: (u32, u32)) -> Result<DecayFit> {
    let lo = window.0.max(1);
    let hi = window.1;
    let pts: Vec<(f64, f64)> = values
        .filter(|&(n, v)| n >= lo && n <= hi && v > 0.0)
        .map(|(n, v)| ((n as f64).ln(), v.ln()))
        .collect();
    if pts.is_empty() {
        return Err(Error::FiniteRankTail);
    }
    if pts.len() < MIN_FIT_SHELLS {
        return Err(Error::WindowTooSmall {
            min: MIN_FIT_SHELLS,
            got: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return Err(Error::WindowTooSmall {
            min: MIN_FIT_SHELLS,
            got: pts.len(),
        });
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(DecayFit {
        slope,
        intercept,
        r_squared,
        window: (lo, hi),
        points: pts.len(),
    })
}

/// Estimate the order at which the fitted slope crosses -1, assuming the
/// slope is affine in `p`. Needs at least three (p, slope) samples.
pub fn critical_exponent(fits: &[(f64, f64)]) -> Option<f64> {
    if fits.len() < 3 {
        return None;
    }
    let n = fits.len() as f64;
    let sx: f64 = fits.iter().map(|f| f.0).sum();
    let sy: f64 = fits.iter().map(|f| f.1).sum();
    let sxx: f64 = fits.iter().map(|f| f.0 * f.0).sum();
    let sxy: f64 = fits.iter().map(|f| f.0 * f.1).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return None;
    }
    let b = (n * sxy - sx * sy) / denom;
    let a = (sy - b * sx) / n;
    if b.abs() < 1e-12 {
        return None;
    }
    Some((-1.0 - a) / b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converged,
    Diverged,
    Inconclusive,
}

/// Extrapolated classification of one operator at one Schatten order. All
/// verdicts are fits over finitely many shells, never proofs; the fits ride
/// along as evidence.
#[derive(Debug, Clone, Serialize)]
pub struct CompactnessVerdict {
    pub p: f64,
    pub margin: f64,
    /// the fit window was identically zero: the operator has finite rank
    /// within the computed range
    pub finite_rank: bool,
    /// shell p-sum summability: slope vs -1 with the margin band
    pub schatten: Verdict,
    /// shell operator norms -> 0
    pub compactness: Verdict,
    pub schatten_fit: Option<DecayFit>,
    pub norm_fit: Option<DecayFit>,
}

impl CompactnessVerdict {
    pub fn converged(&self) -> bool {
        self.schatten == Verdict::Converged
    }
}

/// Classify an operator: Schatten-`p` membership from the shell p-sum decay
/// slope (converged below `-1 - margin`, diverged above `-1 + margin`),
/// compactness from the shell sup-norm decay.
pub fn verdict(
    op: &LatticeOperator,
    p: f64,
    max_degree: u32,
    margin: f64,
    window: Option<(u32, u32)>,
) -> Result<CompactnessVerdict> {
    let series = shell_series(op, &[p], max_degree)?.remove(0);
    verdict_from_series(&series, margin, window)
}

/// Same classification from an already computed series.
pub fn verdict_from_series(
    series: &ShellSumSeries,
    margin: f64,
    window: Option<(u32, u32)>,
) -> Result<CompactnessVerdict> {
    let max_degree = series.shells.last().map(|s| s.n).unwrap_or(0);
    let window = window.unwrap_or((max_degree / 2, max_degree));
    let schatten_fit = match fit_decay(series, window) {
        Ok(fit) => Some(fit),
        Err(Error::FiniteRankTail) => None,
        Err(e) => return Err(e),
    };
    let norm_fit = match fit_values(series.shells.iter().map(|s| (s.n, s.sup)), window) {
        Ok(fit) => Some(fit),
        Err(Error::FiniteRankTail) => None,
        Err(e) => return Err(e),
    };
    let finite_rank = schatten_fit.is_none();
    let schatten = match &schatten_fit {
        None => Verdict::Converged,
        Some(fit) => {
            if fit.slope < -1.0 - margin {
                Verdict::Converged
            } else if fit.slope >= -1.0 + margin {
                Verdict::Diverged
            } else {
                Verdict::Inconclusive
            }
        }
    };
    let compactness = match &norm_fit {
        None => Verdict::Converged,
        Some(fit) => {
            if fit.slope < 0.0 {
                Verdict::Converged
            } else {
                Verdict::Diverged
            }
        }
    };
    Ok(CompactnessVerdict {
        p: series.p,
        margin,
        finite_rank,
        schatten,
        compactness,
        schatten_fit,
        norm_fit,
    })
}

/// One (i, j) commutator row of a condition report.
#[derive(Debug, Clone, Serialize)]
pub struct PairRow {
    pub i: usize,
    pub j: usize,
    pub verdict: CompactnessVerdict,
}

/// One multi-slice row of the strengthened condition report.
#[derive(Debug, Clone, Serialize)]
pub struct SliceRow {
    /// pinned (axis, level) pairs
    pub fixed: Vec<(usize, u32)>,
    /// dimension of the slice module
    pub free_axes: usize,
    /// the order tested, just above the free-axis count
    pub q: f64,
    pub all_converged: bool,
    /// (order, fitted slope) samples across the probe orders
    pub slopes: Vec<(f64, Option<f64>)>,
    pub p_star: Option<f64>,
}

/// Which weight-set condition to verify.
#[derive(Debug, Clone, Copy)]
pub enum ConditionKind {
    /// every shift is a contraction
    Star,
    /// all cross-commutators compact
    StarStar,
    /// all cross-commutators in the Schatten p-class
    StarStarP(f64),
    /// slice-restricted commutators in the q-class for q above the free
    /// dimension, swept over multi-slices up to a level cap
    StarStarSup { level_cap: u32 },
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum ConditionReport {
    Star {
        max_degree: u32,
        result: ConditionVerdict,
    },
    StarStar {
        max_degree: u32,
        pairs: Vec<PairRow>,
        holds: bool,
    },
    StarStarP {
        p: f64,
        max_degree: u32,
        pairs: Vec<PairRow>,
        holds: bool,
    },
    StarStarSup {
        level_cap: u32,
        max_degree: u32,
        slices: Vec<SliceRow>,
        consistent: bool,
    },
}

impl ConditionReport {
    pub fn holds(&self) -> bool {
        match self {
            ConditionReport::Star { result, .. } => result.holds(),
            ConditionReport::StarStar { holds, .. } => *holds,
            ConditionReport::StarStarP { holds, .. } => *holds,
            ConditionReport::StarStarSup { consistent, .. } => *consistent,
        }
    }
}

fn commutator_pairs(
    domain: &Arc<Domain>,
    max_degree: u32,
    margin: f64,
    p: f64,
) -> Result<Vec<PairRow>> {
    let m = domain.m();
    let mut rows = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let op = cross_commutator(domain, i, j)?;
            rows.push(PairRow {
                i,
                j,
                verdict: verdict(&op, p, max_degree, margin, None)?,
            });
        }
    }
    Ok(rows)
}

fn axis_subsets(m: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for a in start..m {
            cur.push(a);
            rec(a + 1, m, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, size, &mut Vec::new(), &mut out);
    out
}

/// Verify one of the weight-set conditions on the ambient scalar module.
pub fn check_condition(
    weights: &Arc<WeightSet>,
    kind: ConditionKind,
    max_degree: u32,
    margin: f64,
) -> Result<ConditionReport> {
    let m = weights.m();
    match kind {
        ConditionKind::Star => Ok(ConditionReport::Star {
            max_degree,
            result: weights.check_contractive(max_degree)?,
        }),
        ConditionKind::StarStar => {
            let domain = Domain::scalar(Arc::clone(weights));
            let pairs = commutator_pairs(&domain, max_degree, margin, 2.0)?;
            let holds = pairs
                .iter()
                .all(|r| r.verdict.compactness == Verdict::Converged);
            Ok(ConditionReport::StarStar {
                max_degree,
                pairs,
                holds,
            })
        }
        ConditionKind::StarStarP(p) => {
            let domain = Domain::scalar(Arc::clone(weights));
            let pairs = commutator_pairs(&domain, max_degree, margin, p)?;
            let holds = pairs.iter().all(|r| r.verdict.converged());
            Ok(ConditionReport::StarStarP {
                p,
                max_degree,
                pairs,
                holds,
            })
        }
        ConditionKind::StarStarSup { level_cap } => {
            let mut slices = Vec::new();
            for ell in 1..m {
                for axes in axis_subsets(m, ell) {
                    let mut levels = vec![0u32; ell];
                    loop {
                        let fixed: Vec<(usize, u32)> =
                            axes.iter().copied().zip(levels.iter().copied()).collect();
                        slices.push(slice_row(weights, fixed, max_degree, margin)?);
                        // odometer over level tuples
                        let mut pos = ell;
                        loop {
                            if pos == 0 {
                                break;
                            }
                            pos -= 1;
                            if levels[pos] < level_cap {
                                levels[pos] += 1;
                                break;
                            }
                            levels[pos] = 0;
                        }
                        if levels.iter().all(|&l| l == 0) {
                            break;
                        }
                    }
                }
            }
            let consistent = slices.iter().all(|s| s.all_converged);
            Ok(ConditionReport::StarStarSup {
                level_cap,
                max_degree,
                slices,
                consistent,
            })
        }
    }
}

fn slice_row(
    weights: &Arc<WeightSet>,
    fixed: Vec<(usize, u32)>,
    max_degree: u32,
    margin: f64,
) -> Result<SliceRow> {
    let restricted = Arc::new(weights.restrict(fixed.clone())?);
    let free = restricted.m();
    let domain = Domain::scalar(restricted);
    let q = free as f64 + 0.5;
    let probes = [q, free as f64 + 1.0, free as f64 + 2.0];
    let mut all_converged = true;
    let mut worst_slopes: Vec<(f64, Option<f64>)> = probes.iter().map(|&p| (p, None)).collect();
    for i in 0..free {
        for j in 0..free {
            let op = cross_commutator(&domain, i, j)?;
            let series = shell_series(&op, &probes, max_degree)?;
            for (pi, s) in series.iter().enumerate() {
                let v = verdict_from_series(s, margin, None)?;
                if pi == 0 && !(v.converged() || v.finite_rank) {
                    all_converged = false;
                }
                if let Some(fit) = v.schatten_fit {
                    let entry = &mut worst_slopes[pi].1;
                    *entry = Some(match *entry {
                        None => fit.slope,
                        Some(cur) => cur.max(fit.slope),
                    });
                }
            }
        }
    }
    let samples: Vec<(f64, f64)> = worst_slopes
        .iter()
        .filter_map(|&(p, s)| s.map(|s| (p, s)))
        .collect();
    let p_star = critical_exponent(&samples);
    Ok(SliceRow {
        fixed,
        free_axes: free,
        q,
        all_converged,
        slopes: worst_slopes,
        p_star,
    })
}
