//! The one-stop `report` bundle: weight conditions, ambient commutator
//! decay, and (when a submodule is given) the decomposition audit, the
//! quotient dimension, and the threshold consistency table.

use anyhow::Result;
use essnorm_core::{
    audit, check_condition, dimension, full_reduction, samuel, schatten, self_commutator,
    shell_series, threshold_consistency, AuditReport, ConditionKind, ConditionReport,
    ConditionVerdict, DecayFit, Domain, SubmoduleSpec, ThresholdReport, VectorSubmodule, Verdict,
    WeightSet,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::sync::Arc;

#[derive(Serialize)]
pub struct ReportBundle {
    config: Config,
    weights: WeightSection,
    cross_commutators: ConditionReport,
    ambient_self_commutators: Vec<AxisSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    submodule: Option<SubSection>,
}

#[derive(Serialize)]
struct Config {
    family: &'static str,
    m: usize,
    ps: Vec<f64>,
    max_degree: u32,
    window: Option<(u32, u32)>,
    margin: f64,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    submodule: Option<SubmoduleSpec>,
}

#[derive(Serialize)]
struct WeightSection {
    checked_to: u32,
    contractive: ConditionVerdict,
    spherical: ConditionVerdict,
}

#[derive(Serialize)]
struct AxisSection {
    /// 1-based
    axis: usize,
    orders: Vec<OrderSummary>,
}

#[derive(Serialize)]
struct OrderSummary {
    p: f64,
    partial: f64,
    fit: Option<DecayFit>,
    schatten: Verdict,
    compactness: Verdict,
    finite_rank: bool,
}

#[derive(Serialize)]
struct SubSection {
    decomposition: DecompSummary,
    audit: AuditReport,
    dimension: DimensionOut,
    thresholds: ThresholdReport,
    partition_sample: PartitionSample,
}

#[derive(Serialize)]
struct DecompSummary {
    leaf_count: usize,
    depth: usize,
    tags: Vec<String>,
}

#[derive(Serialize)]
struct DimensionOut {
    d: usize,
    block_d: usize,
    stabilization_shell: u32,
    polynomial: Vec<f64>,
}

#[derive(Serialize)]
struct PartitionSample {
    seed: u64,
    samples: usize,
    mismatches: usize,
}

impl ReportBundle {
    pub fn has_failures(&self) -> bool {
        if !self.weights.contractive.holds() {
            return true;
        }
        if !self.cross_commutators.holds() {
            return true;
        }
        let diverged = |v: Verdict| v == Verdict::Diverged;
        if self
            .ambient_self_commutators
            .iter()
            .any(|a| a.orders.iter().any(|o| diverged(o.schatten)))
        {
            return true;
        }
        if let Some(sub) = &self.submodule {
            if sub.audit.aggregate == Verdict::Diverged
                || !sub.thresholds.consistent
                || sub.partition_sample.mismatches > 0
            {
                return true;
            }
        }
        false
    }
}

pub fn build(
    weights: &Arc<WeightSet>,
    sub: Option<Arc<VectorSubmodule>>,
    ps: &[f64],
    max_degree: u32,
    window: Option<(u32, u32)>,
    margin: f64,
    seed: u64,
) -> Result<ReportBundle> {
    let m = weights.m();
    let condition_sweep = max_degree.min(100);
    let weight_section = WeightSection {
        checked_to: condition_sweep,
        contractive: weights.check_contractive(condition_sweep)?,
        spherical: weights.check_spherical(condition_sweep)?,
    };
    let cross = check_condition(weights, ConditionKind::StarStar, max_degree, margin)?;

    let domain = Domain::scalar(Arc::clone(weights));
    let mut ambient = Vec::with_capacity(m);
    for axis in 0..m {
        let op = self_commutator(&domain, axis)?;
        let series = shell_series(&op, ps, max_degree)?;
        let mut orders = Vec::with_capacity(series.len());
        for s in &series {
            let v = schatten::verdict_from_series(s, margin, window)?;
            orders.push(OrderSummary {
                p: s.p,
                partial: s.partial(),
                fit: v.schatten_fit,
                schatten: v.schatten,
                compactness: v.compactness,
                finite_rank: v.finite_rank,
            });
        }
        ambient.push(AxisSection {
            axis: axis + 1,
            orders,
        });
    }

    let submodule = match &sub {
        None => None,
        Some(s) => {
            let tree = full_reduction(s)?;
            let leaves = tree.leaves();
            let mut tags: Vec<String> = leaves
                .iter()
                .map(|(_, l)| format!("{:?}", l.mechanism))
                .collect();
            tags.sort();
            let audit_degree = max_degree.min(240);
            let audit_report = audit(
                weights,
                &tree,
                ps.first().copied().unwrap_or(3.0),
                audit_degree,
            )?;
            let dim = dimension(s, samuel::STABILIZATION_CAP)?;
            let thresholds = threshold_consistency(s, weights, ps, max_degree.min(400), margin)?;
            let partition_sample = sample_partition(s, &tree, seed, 2000);
            Some(SubSection {
                decomposition: DecompSummary {
                    leaf_count: leaves.len(),
                    depth: tree.depth(),
                    tags,
                },
                audit: audit_report,
                dimension: DimensionOut {
                    d: dim.dimension,
                    block_d: dim.block_dimension,
                    stabilization_shell: dim.stabilization_shell,
                    polynomial: dim.polynomial,
                },
                thresholds,
                partition_sample,
            })
        }
    };

    Ok(ReportBundle {
        config: Config {
            family: weights.family_name(),
            m,
            ps: ps.to_vec(),
            max_degree,
            window,
            margin,
            seed,
            submodule: sub.as_deref().map(SubmoduleSpec::from),
        },
        weights: weight_section,
        cross_commutators: cross,
        ambient_self_commutators: ambient,
        submodule,
    })
}

fn sample_partition(
    s: &Arc<VectorSubmodule>,
    tree: &essnorm_core::BlockTree,
    seed: u64,
    samples: usize,
) -> PartitionSample {
    let pieces = tree.partition();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0usize;
    for _ in 0..samples {
        let beta: Vec<u32> = (0..s.m()).map(|_| rng.gen_range(0..=12u32)).collect();
        let claimed: usize = pieces
            .iter()
            .filter(|(cell, _)| cell.contains(&beta))
            .map(|(_, d)| d)
            .sum();
        if claimed != s.fiber_dim(&beta) {
            mismatches += 1;
        }
    }
    PartitionSample {
        seed,
        samples,
        mismatches,
    }
}
