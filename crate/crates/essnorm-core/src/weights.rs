//! Weight sets `lambda_alpha` and their step ratios.
//!
//! A weight set assigns the norm of each monomial; the step ratio
//! `w_i(alpha) = lambda_{alpha+e_i} / lambda_alpha` is the coefficient of
//! the i-th coordinate shift in the normalized monomial basis. Factorial
//! families are evaluated in log space so that degree-1000 shells stay in
//! range.
//!
//! Built-in families (all normalized to `lambda_0 = 1`):
//!
//! * `drury_arveson`:    lambda = sqrt(alpha! / |alpha|!)
//! * `paper_literal`:    lambda = alpha! / |alpha|!
//! * `hardy_ball_like`:  lambda = sqrt((m-1)! alpha! / (|alpha|+m-1)!)
//! * `bergman_ball_like`: lambda = sqrt(m! alpha! / (|alpha|+m)!)
//! * `unweighted`:       lambda = 1
//!
//! `drury_arveson` is the standard convention in which lambda is the norm of
//! `z^alpha`; `paper_literal` reads the same factorial expression without the
//! square root. Both are shipped because the two conventions disagree and
//! downstream thresholds are stated for the square-root form.

use crate::error::{Error, Result};
use crate::lattice::MultiIndex;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

/// Slack accepted when checking the contraction and spherical conditions.
pub const CONDITION_TOL: f64 = 1e-12;

const LN_FACT_CAP: usize = 8200;

static LN_FACT: OnceLock<Vec<f64>> = OnceLock::new();

/// `ln(n!)`, table-backed with a compensated cumulative sum; Stirling
/// fallback above the table cap.
pub fn ln_factorial(n: u32) -> f64 {
    let table = LN_FACT.get_or_init(|| {
        let mut vals = Vec::with_capacity(LN_FACT_CAP);
        vals.push(0.0);
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for k in 1..LN_FACT_CAP {
            let term = (k as f64).ln();
            // Neumaier update
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
            vals.push(sum + comp);
        }
        vals
    });
    if (n as usize) < table.len() {
        table[n as usize]
    } else {
        stirling_ln_factorial(n as f64)
    }
}

fn stirling_ln_factorial(n: f64) -> f64 {
    let x = n + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// Extension policy for custom weight tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtendPolicy {
    /// Evaluation outside the table is an error.
    Error,
    /// Extend beyond the table box by freezing the per-axis step ratios at
    /// the boundary corner. Requires the table to cover a full box.
    ProductExtend,
}

#[derive(Debug, Clone)]
enum Kind {
    DruryArveson,
    PaperLiteral,
    HardyBallLike,
    BergmanBallLike,
    Unweighted,
    Custom {
        log_table: HashMap<Vec<u32>, f64>,
        extend: ExtendPolicy,
        /// componentwise maximum of the table keys
        box_hi: Vec<u32>,
        /// frozen per-axis log step ratio at the box corner
        boundary_log_ratio: Vec<f64>,
    },
    /// The weight set induced on a multi-slice: finitely many coordinates
    /// of the base set pinned to fixed levels.
    Restricted {
        base: Arc<WeightSet>,
        /// (base axis, level), strictly increasing in axis
        fixed: Vec<(usize, u32)>,
    },
}

/// A positive weight for every lattice point.
#[derive(Debug, Clone)]
pub struct WeightSet {
    m: usize,
    kind: Kind,
}

impl WeightSet {
    pub fn drury_arveson(m: usize) -> Self {
        WeightSet {
            m,
            kind: Kind::DruryArveson,
        }
    }

    pub fn paper_literal(m: usize) -> Self {
        WeightSet {
            m,
            kind: Kind::PaperLiteral,
        }
    }

    pub fn hardy_ball_like(m: usize) -> Self {
        WeightSet {
            m,
            kind: Kind::HardyBallLike,
        }
    }

    pub fn bergman_ball_like(m: usize) -> Self {
        WeightSet {
            m,
            kind: Kind::BergmanBallLike,
        }
    }

    pub fn unweighted(m: usize) -> Self {
        WeightSet {
            m,
            kind: Kind::Unweighted,
        }
    }

    /// Custom weights from an explicit table of `(alpha, lambda)` pairs.
    pub fn custom(m: usize, table: &[(Vec<u32>, f64)], extend: ExtendPolicy) -> Result<Self> {
        let mut log_table = HashMap::with_capacity(table.len());
        let mut box_hi = vec![0u32; m];
        for (alpha, lambda) in table {
            if alpha.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: alpha.len(),
                });
            }
            if !(lambda.is_finite() && *lambda > 0.0) {
                return Err(Error::InvalidWeightTable(format!(
                    "lambda at {alpha:?} must be positive and finite, got {lambda}"
                )));
            }
            for (h, a) in box_hi.iter_mut().zip(alpha) {
                *h = (*h).max(*a);
            }
            if log_table.insert(alpha.clone(), lambda.ln()).is_some() {
                return Err(Error::InvalidWeightTable(format!(
                    "duplicate table entry at {alpha:?}"
                )));
            }
        }
        if !log_table.contains_key(&vec![0u32; m]) {
            return Err(Error::InvalidWeightTable(
                "table must contain the origin".into(),
            ));
        }
        let mut boundary_log_ratio = vec![0.0f64; m];
        if extend == ExtendPolicy::ProductExtend {
            // the formula lambda = lambda_clamped * prod ratio^excess needs
            // the whole box below the corner
            let mut cur = vec![0u32; m];
            loop {
                if !log_table.contains_key(&cur) {
                    return Err(Error::InvalidWeightTable(format!(
                        "product_extend requires the full box up to {box_hi:?}; missing {cur:?}"
                    )));
                }
                let mut axis = m;
                loop {
                    if axis == 0 {
                        break;
                    }
                    axis -= 1;
                    if cur[axis] < box_hi[axis] {
                        cur[axis] += 1;
                        break;
                    }
                    cur[axis] = 0;
                }
                if cur.iter().all(|&c| c == 0) {
                    break;
                }
            }
            for (axis, r) in boundary_log_ratio.iter_mut().enumerate() {
                if box_hi[axis] > 0 {
                    let mut lo = box_hi.clone();
                    lo[axis] -= 1;
                    *r = log_table[&box_hi] - log_table[&lo];
                }
            }
        }
        Ok(WeightSet {
            m,
            kind: Kind::Custom {
                log_table,
                extend,
                box_hi,
                boundary_log_ratio,
            },
        })
    }

    /// The weight set obtained by pinning the given base axes to fixed
    /// levels, acting on the remaining `m - fixed.len()` variables.
    pub fn restrict(self: &Arc<Self>, fixed: Vec<(usize, u32)>) -> Result<WeightSet> {
        let mut fixed = fixed;
        fixed.sort_by_key(|&(a, _)| a);
        for w in fixed.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Invalid(format!("axis {} pinned twice", w[0].0)));
            }
        }
        if let Some(&(a, _)) = fixed.iter().find(|&&(a, _)| a >= self.m) {
            return Err(Error::AxisOutOfRange { axis: a, m: self.m });
        }
        if fixed.len() >= self.m {
            return Err(Error::Invalid(
                "restriction must leave at least one free axis".into(),
            ));
        }
        Ok(WeightSet {
            m: self.m - fixed.len(),
            kind: Kind::Restricted {
                base: Arc::clone(self),
                fixed,
            },
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn family_name(&self) -> &'static str {
        match &self.kind {
            Kind::DruryArveson => "drury_arveson",
            Kind::PaperLiteral => "paper_literal",
            Kind::HardyBallLike => "hardy_ball_like",
            Kind::BergmanBallLike => "bergman_ball_like",
            Kind::Unweighted => "unweighted",
            Kind::Custom { .. } => "custom",
            Kind::Restricted { .. } => "restricted",
        }
    }

    /// `ln(lambda_alpha)`.
    pub fn log_lambda(&self, alpha: &[u32]) -> Result<f64> {
        debug_assert_eq!(alpha.len(), self.m);
        let degree = || alpha.iter().map(|&a| a as u64).sum::<u64>() as u32;
        let sum_ln_fact = || alpha.iter().map(|&a| ln_factorial(a)).sum::<f64>();
        Ok(match &self.kind {
            Kind::DruryArveson => 0.5 * (sum_ln_fact() - ln_factorial(degree())),
            Kind::PaperLiteral => sum_ln_fact() - ln_factorial(degree()),
            Kind::HardyBallLike => {
                let m = self.m as u32;
                0.5 * (ln_factorial(m - 1) + sum_ln_fact() - ln_factorial(degree() + m - 1))
            }
            Kind::BergmanBallLike => {
                let m = self.m as u32;
                0.5 * (ln_factorial(m) + sum_ln_fact() - ln_factorial(degree() + m))
            }
            Kind::Unweighted => 0.0,
            Kind::Custom {
                log_table,
                extend,
                box_hi,
                boundary_log_ratio,
            } => {
                if let Some(&v) = log_table.get(alpha) {
                    v
                } else {
                    match extend {
                        ExtendPolicy::Error => {
                            return Err(Error::WeightUndefined {
                                alpha: alpha.to_vec(),
                            })
                        }
                        ExtendPolicy::ProductExtend => {
                            let clamped: Vec<u32> =
                                alpha.iter().zip(box_hi).map(|(&a, &h)| a.min(h)).collect();
                            let mut v = log_table[&clamped];
                            for axis in 0..self.m {
                                if alpha[axis] > box_hi[axis] {
                                    v += (alpha[axis] - box_hi[axis]) as f64
                                        * boundary_log_ratio[axis];
                                }
                            }
                            v
                        }
                    }
                }
            }
            Kind::Restricted { base, fixed } => base.log_lambda(&embed(alpha, fixed))?,
        })
    }

    /// `lambda_alpha` itself. May underflow to zero at extreme degrees;
    /// prefer ratios in summations.
    pub fn lambda(&self, alpha: &[u32]) -> Result<f64> {
        Ok(self.log_lambda(alpha)?.exp())
    }

    /// Step ratio `w_axis(alpha) = lambda_{alpha+e_axis} / lambda_alpha`,
    /// evaluated as a difference of log weights.
    pub fn ratio(&self, axis: usize, alpha: &[u32]) -> Result<f64> {
        if axis >= self.m {
            return Err(Error::AxisOutOfRange { axis, m: self.m });
        }
        let mut up = alpha.to_vec();
        up[axis] += 1;
        Ok((self.log_lambda(&up)? - self.log_lambda(alpha)?).exp())
    }

    /// Verifies `w_i(alpha) <= 1` for all `|alpha| <= max_degree` and all
    /// axes; first witness in (degree, lex, axis) order on failure.
    pub fn check_contractive(&self, max_degree: u32) -> Result<ConditionVerdict> {
        for n in 0..=max_degree {
            for alpha in crate::lattice::DegreeShell::new(self.m, n) {
                for axis in 0..self.m {
                    let w = self.ratio(axis, alpha.entries())?;
                    if w > 1.0 + CONDITION_TOL {
                        return Ok(ConditionVerdict::Violated {
                            witness: alpha,
                            axis: Some(axis),
                            value: w,
                        });
                    }
                }
            }
        }
        Ok(ConditionVerdict::Holds)
    }

    /// Verifies the spherical contraction inequality
    /// `sum_i w_i(alpha)^2 <= 1` for all `|alpha| <= max_degree`. The left
    /// side is the diagonal entry of `sum_i Z_i* Z_i` in the normalized
    /// basis.
    pub fn check_spherical(&self, max_degree: u32) -> Result<ConditionVerdict> {
        for n in 0..=max_degree {
            for alpha in crate::lattice::DegreeShell::new(self.m, n) {
                let mut sum = 0.0;
                for axis in 0..self.m {
                    let w = self.ratio(axis, alpha.entries())?;
                    sum += w * w;
                }
                if sum > 1.0 + CONDITION_TOL {
                    return Ok(ConditionVerdict::Violated {
                        witness: alpha,
                        axis: None,
                        value: sum,
                    });
                }
            }
        }
        Ok(ConditionVerdict::Holds)
    }
}

fn embed(alpha: &[u32], fixed: &[(usize, u32)]) -> Vec<u32> {
    let mut out = Vec::with_capacity(alpha.len() + fixed.len());
    let mut free_iter = alpha.iter();
    let mut fx = fixed.iter().peekable();
    for axis in 0..alpha.len() + fixed.len() {
        if let Some(&&(a, l)) = fx.peek() {
            if a == axis {
                out.push(l);
                fx.next();
                continue;
            }
        }
        out.push(*free_iter.next().expect("free coordinate"));
    }
    out
}

/// JSON form of a weight set: `{"m":2,"family":"drury_arveson"}`, with a
/// table and extension policy for the custom family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightSpec {
    pub m: usize,
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<WeightTableEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extend: Option<ExtendPolicy>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightTableEntry {
    pub alpha: Vec<u32>,
    pub lambda: f64,
}

impl TryFrom<WeightSpec> for WeightSet {
    type Error = Error;

    fn try_from(spec: WeightSpec) -> Result<WeightSet> {
        match spec.family.as_str() {
            "drury_arveson" => Ok(WeightSet::drury_arveson(spec.m)),
            "paper_literal" => Ok(WeightSet::paper_literal(spec.m)),
            "hardy_ball_like" => Ok(WeightSet::hardy_ball_like(spec.m)),
            "bergman_ball_like" => Ok(WeightSet::bergman_ball_like(spec.m)),
            "unweighted" => Ok(WeightSet::unweighted(spec.m)),
            "custom" => {
                let table = spec.table.ok_or_else(|| {
                    Error::InvalidWeightTable("custom family requires a table".into())
                })?;
                let entries: Vec<(Vec<u32>, f64)> =
                    table.into_iter().map(|e| (e.alpha, e.lambda)).collect();
                WeightSet::custom(spec.m, &entries, spec.extend.unwrap_or(ExtendPolicy::Error))
            }
            other => Err(Error::Invalid(format!("unknown weight family '{other}'"))),
        }
    }
}

/// Outcome of a sweep-based condition check.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConditionVerdict {
    Holds,
    Violated {
        witness: MultiIndex,
        /// axis for per-axis conditions, absent for aggregate ones
        axis: Option<usize>,
        value: f64,
    },
}

impl ConditionVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, ConditionVerdict::Holds)
    }
}
