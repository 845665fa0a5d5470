//! Hilbert-Samuel counting for quotients by monomial submodules.
//!
//! The graded quotient piece at shell `n` has dimension
//! `sum over |beta| = n of (k - dim H_beta)`, an exact integer. Cumulative
//! counts of a monomial quotient are eventually exactly polynomial; the
//! degree of that polynomial is the dimension `d` that gates the quotient
//! Schatten threshold `q > d`. Two independent readings are computed and
//! must agree: exact finite differences of the counts, and a census of the
//! block decomposition (the largest number of free axes over blocks with a
//! nonzero fiber complement). With this calibration the full module in `m`
//! variables has dimension `m`.

use crate::error::{Error, Result};
use crate::lattice::DegreeShell;
use crate::schatten::{verdict, CompactnessVerdict, DEFAULT_MARGIN};
use crate::shiftops::{cross_commutator, Domain};
use crate::submodule::VectorSubmodule;
use crate::weights::WeightSet;
use serde::Serialize;
use std::sync::Arc;

/// Default cap on the auto-extended stabilization search.
pub const STABILIZATION_CAP: u32 = 2000;

/// Dimension of the quotient's graded piece at shell `n`.
pub fn quotient_count(s: &VectorSubmodule, n: u32) -> u64 {
    let k = s.k() as u64;
    let mut total = 0u64;
    for beta in DegreeShell::new(s.m(), n) {
        total += k - s.fiber_dim(beta.entries()) as u64;
    }
    total
}

/// Cumulative counts `c(0), ..., c(up_to)`.
pub fn cumulative_counts(s: &VectorSubmodule, up_to: u32) -> Vec<u64> {
    let mut out = Vec::with_capacity(up_to as usize + 1);
    let mut acc = 0u64;
    for n in 0..=up_to {
        acc += quotient_count(s, n);
        out.push(acc);
    }
    out
}

/// Dimension read off the block decomposition: slice every axis below its
/// generator maximum or let it run free, and take the largest number of
/// free axes over the blocks whose fiber complement is nonzero.
pub fn block_dimension(s: &VectorSubmodule) -> usize {
    fn census(
        s: &VectorSubmodule,
        axis: usize,
        active: &[usize],
        free: usize,
        best: &mut Option<usize>,
    ) {
        if axis == s.m() {
            let mut mask = 0u64;
            for &i in active {
                mask |= 1 << i;
            }
            if s.k() > s.fiber_of_pattern(mask).dim() {
                *best = Some(best.map_or(free, |b| b.max(free)));
            }
            return;
        }
        let a_max = active
            .iter()
            .map(|&i| s.generators()[i].alpha.entry(axis))
            .max()
            .unwrap_or(0);
        for gamma in 0..a_max {
            let filtered: Vec<usize> = active
                .iter()
                .copied()
                .filter(|&i| s.generators()[i].alpha.entry(axis) <= gamma)
                .collect();
            census(s, axis + 1, &filtered, free, best);
        }
        census(s, axis + 1, active, free + 1, best);
    }
    let mut best = None;
    let all: Vec<usize> = (0..s.generators().len()).collect();
    census(s, 0, &all, 0, &mut best);
    best.unwrap_or(0)
}

/// Outcome of the stabilized polynomial fit.
#[derive(Debug, Clone, Serialize)]
pub struct SamuelReport {
    /// degree of the cumulative counting polynomial
    pub dimension: usize,
    /// the block-census reading; always equals `dimension`
    pub block_dimension: usize,
    /// first shell from which the counts are exactly polynomial
    pub stabilization_shell: u32,
    /// monomial coefficients `c0 + c1 n + ...` of the cumulative polynomial
    pub polynomial: Vec<f64>,
    /// last shell entering the fit
    pub computed_to: u32,
}

/// Exact finite-difference dimension of the quotient, cross-checked against
/// the block census. Auto-extends until the polynomial tail covers three
/// fit windows, up to `cap` shells.
pub fn dimension(s: &VectorSubmodule, cap: u32) -> Result<SamuelReport> {
    let m = s.m();
    let window = (m as u32) + 2;
    let max_gen_degree = s
        .generators()
        .iter()
        .map(|g| g.alpha.degree())
        .max()
        .unwrap_or(0);
    let mut n_max = (2 * max_gen_degree + s.k() as u32 + 3 * window + 4).min(cap.max(8));
    loop {
        let counts = cumulative_counts(s, n_max);
        if let Some(s0) = stable_from(&counts, m) {
            if n_max - s0 >= 3 * window {
                return finish(s, &counts, s0, n_max);
            }
        }
        if n_max >= cap {
            return Err(Error::NoStabilization { cap });
        }
        n_max = (n_max * 2).min(cap);
    }
}

/// Smallest index from which the (m+1)-th finite differences of `counts`
/// vanish identically.
fn stable_from(counts: &[u64], m: usize) -> Option<u32> {
    let mut diffs: Vec<i128> = counts.iter().map(|&c| c as i128).collect();
    for _ in 0..=m {
        if diffs.len() < 2 {
            return None;
        }
        diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
    }
    let last_nonzero = diffs.iter().rposition(|&d| d != 0);
    match last_nonzero {
        None => Some(0),
        Some(idx) => {
            let s0 = idx + 1;
            if s0 + m + 1 < counts.len() {
                Some(s0 as u32)
            } else {
                None
            }
        }
    }
}

fn finish(s: &VectorSubmodule, counts: &[u64], s0: u32, n_max: u32) -> Result<SamuelReport> {
    let m = s.m();
    let tail: Vec<i128> = counts[s0 as usize..].iter().map(|&c| c as i128).collect();
    // degree = highest difference order that is not identically zero
    let mut degree = 0usize;
    let mut diffs = tail.clone();
    let mut newton: Vec<i128> = vec![tail[0]];
    for t in 1..=m {
        diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
        if diffs.is_empty() {
            break;
        }
        newton.push(diffs[0]);
        if diffs.iter().any(|&d| d != 0) {
            degree = t;
        }
    }
    if tail.iter().all(|&v| v == 0) {
        degree = 0;
    }
    newton.truncate(degree + 1);

    // expand c(n) = sum_t newton[t] * C(n - s0, t) into monomial
    // coefficients in n: build each binomial factor as a polynomial in n
    // and accumulate
    let mut polynomial = vec![0.0f64; degree + 1];
    let mut binom = vec![1.0f64]; // C(n - s0, 0)
    for (t, &coef) in newton.iter().enumerate() {
        if t > 0 {
            // multiply by (n - s0 - (t - 1)) / t
            let root = s0 as f64 + (t as f64 - 1.0);
            let mut next = vec![0.0f64; binom.len() + 1];
            for (i, &b) in binom.iter().enumerate() {
                next[i + 1] += b;
                next[i] -= b * root;
            }
            for v in next.iter_mut() {
                *v /= t as f64;
            }
            binom = next;
        }
        for (i, &b) in binom.iter().enumerate() {
            polynomial[i] += coef as f64 * b;
        }
    }

    let blocks = block_dimension(s);
    if blocks != degree {
        return Err(Error::DimensionReadingsDisagree {
            finite_difference: degree,
            blocks,
        });
    }
    Ok(SamuelReport {
        dimension: degree,
        block_dimension: blocks,
        stabilization_shell: s0,
        polynomial,
        computed_to: n_max,
    })
}

/// Verdicts for the quotient commutators at one order.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdRow {
    pub q: f64,
    pub all_converged: bool,
    pub pairs: Vec<(usize, usize, CompactnessVerdict)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub dimension: usize,
    pub rows: Vec<ThresholdRow>,
    /// every row off the boundary band satisfies `converged iff q > d`
    pub consistent: bool,
    /// half width of the excluded band around `q = d`
    pub boundary_band: f64,
}

/// Check `converged iff q > d` for the quotient-module commutators at each
/// requested order; orders inside the boundary band around `d` are reported
/// but not scored.
pub fn threshold_consistency(
    s: &Arc<VectorSubmodule>,
    weights: &Arc<WeightSet>,
    qs: &[f64],
    max_degree: u32,
    margin: f64,
) -> Result<ThresholdReport> {
    let report = dimension(s, STABILIZATION_CAP)?;
    let d = report.dimension;
    let domain = Domain::quotient(Arc::clone(weights), Arc::clone(s));
    let m = weights.m();
    let mut rows = Vec::with_capacity(qs.len());
    for &q in qs {
        let mut pairs = Vec::with_capacity(m * m);
        let mut all = true;
        for i in 0..m {
            for j in 0..m {
                let op = cross_commutator(&domain, i, j)?;
                let v = verdict(&op, q, max_degree, margin, None)?;
                if !(v.converged() || v.finite_rank) {
                    all = false;
                }
                pairs.push((i, j, v));
            }
        }
        rows.push(ThresholdRow {
            q,
            all_converged: all,
            pairs,
        });
    }
    let band = margin.max(DEFAULT_MARGIN);
    let consistent = rows
        .iter()
        .filter(|r| (r.q - d as f64).abs() > band)
        .all(|r| (r.q > d as f64) == r.all_converged);
    Ok(ThresholdReport {
        dimension: d,
        rows,
        consistent,
        boundary_band: band,
    })
}
