//! `essnorm`: commuting weighted shifts on the integer lattice, monomial
//! submodules, commutator shell sums, and the decomposition audit, from the
//! command line.
//!
//! Axes are 1-based on the command line and in all printed labels. Outputs
//! are deterministic: identical invocations produce byte-identical bytes,
//! independent of `ESSNORM_THREADS`.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use essnorm_core::{
    cross_commutator, dimension, full_reduction, self_commutator, shell_series, ConditionVerdict,
    Domain, LatticeOperator, ModuleKind, MultiIndex, ShiftInvariantSet, SubmoduleSpec,
    VectorSubmodule, WeightSet, WeightSpec, DEFAULT_MARGIN,
};
use serde::Serialize;
use std::path::PathBuf;
use std::sync::Arc;

mod report;

#[derive(Parser)]
#[command(
    name = "essnorm",
    version,
    about = "Commuting weighted shifts: conditions, commutator shell sums, decompositions",
    after_help = "Environment: ESSNORM_THREADS caps worker threads (output bytes do not depend on it)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// exit with code 2 when a verdict is violated / diverged
    #[arg(long, global = true)]
    strict: bool,
    /// write output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WeightArgs {
    /// built-in weight family: drury_arveson | paper_literal |
    /// hardy_ball_like | bergman_ball_like | unweighted
    #[arg(long, conflicts_with = "weights_file")]
    family: Option<String>,
    /// number of variables (with --family)
    #[arg(long)]
    m: Option<usize>,
    /// JSON weight spec file (supports the custom family)
    #[arg(long)]
    weights_file: Option<PathBuf>,
}

impl WeightArgs {
    fn build(&self) -> Result<Arc<WeightSet>> {
        if let Some(path) = &self.weights_file {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let spec: WeightSpec = serde_json::from_str(&text)
                .with_context(|| format!("parsing weight spec {}", path.display()))?;
            return Ok(Arc::new(WeightSet::try_from(spec)?));
        }
        let family = self
            .family
            .as_deref()
            .ok_or_else(|| anyhow!("either --family or --weights-file is required"))?;
        let m = self
            .m
            .ok_or_else(|| anyhow!("--m is required with --family"))?;
        let spec = WeightSpec {
            m,
            family: family.to_string(),
            table: None,
            extend: None,
        };
        Ok(Arc::new(WeightSet::try_from(spec)?))
    }
}

#[derive(Args)]
struct SetArgs {
    /// inline JSON array of generator exponents, e.g. "[[2,0],[0,3]]"
    #[arg(long, conflicts_with = "submodule_file")]
    generators: Option<String>,
    /// number of variables (inferred from --generators when omitted)
    #[arg(long)]
    m: Option<usize>,
    /// JSON submodule spec file (scalar or multiplicity-k)
    #[arg(long)]
    submodule_file: Option<PathBuf>,
}

impl SetArgs {
    fn load_submodule(&self) -> Result<Arc<VectorSubmodule>> {
        load_submodule_from(
            self.generators.as_deref(),
            self.m,
            self.submodule_file.as_ref(),
        )
    }

    fn load_set(&self) -> Result<ShiftInvariantSet> {
        load_set_from(
            self.generators.as_deref(),
            self.m,
            self.submodule_file.as_ref(),
        )
    }
}

/// Submodule selection for subcommands that already carry --m through the
/// weight arguments.
#[derive(Args)]
struct SubArgs {
    /// inline JSON array of generator exponents, e.g. "[[2,0],[0,3]]"
    #[arg(long, conflicts_with = "submodule_file")]
    generators: Option<String>,
    /// JSON submodule spec file (scalar or multiplicity-k)
    #[arg(long)]
    submodule_file: Option<PathBuf>,
}

impl SubArgs {
    fn provided(&self) -> bool {
        self.generators.is_some() || self.submodule_file.is_some()
    }

    fn load_submodule(&self) -> Result<Arc<VectorSubmodule>> {
        load_submodule_from(
            self.generators.as_deref(),
            None,
            self.submodule_file.as_ref(),
        )
    }
}

fn load_submodule_from(
    generators: Option<&str>,
    m: Option<usize>,
    file: Option<&PathBuf>,
) -> Result<Arc<VectorSubmodule>> {
    if let Some(path) = file {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let spec: SubmoduleSpec = serde_json::from_str(&text)
            .with_context(|| format!("parsing submodule spec {}", path.display()))?;
        return Ok(Arc::new(VectorSubmodule::try_from(spec)?));
    }
    let set = load_set_from(generators, m, None)?;
    Ok(Arc::new(VectorSubmodule::scalar(&set)))
}

fn load_set_from(
    generators: Option<&str>,
    m: Option<usize>,
    file: Option<&PathBuf>,
) -> Result<ShiftInvariantSet> {
    if let Some(path) = file {
        let sub = load_submodule_from(None, None, Some(path))?;
        if sub.k() != 1 {
            bail!(
                "{} is a multiplicity-{} submodule; a scalar set is required here",
                path.display(),
                sub.k()
            );
        }
        return Ok(sub.support()?);
    }
    let text =
        generators.ok_or_else(|| anyhow!("either --generators or --submodule-file is required"))?;
    let rows: Vec<Vec<u32>> =
        serde_json::from_str(text).context("parsing --generators (expected [[..],[..]])")?;
    let m = match m {
        Some(m) => m,
        None => rows
            .first()
            .map(|r| r.len())
            .ok_or_else(|| anyhow!("--generators is empty and --m was not given"))?,
    };
    let points: Vec<MultiIndex> = rows.into_iter().map(MultiIndex::new).collect();
    Ok(ShiftInvariantSet::closure(m, &points)?)
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DomainArg {
    Ambient,
    Submodule,
    Quotient,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommKind {
    #[value(name = "self")]
    SelfComm,
    Cross,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DataFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TreeFormat {
    Text,
    Json,
}

#[derive(Args)]
struct OpArgs {
    /// commutator kind
    #[arg(long, value_enum)]
    kind: CommKind,
    /// first axis, 1-based
    #[arg(long)]
    i: usize,
    /// second axis, 1-based (cross commutators)
    #[arg(long)]
    j: Option<usize>,
    /// module the operator acts on
    #[arg(long, value_enum, default_value_t = DomainArg::Ambient)]
    domain: DomainArg,
}

impl OpArgs {
    fn build(
        &self,
        weights: &Arc<WeightSet>,
        set_args: &SubArgs,
    ) -> Result<(LatticeOperator, String)> {
        let m = weights.m();
        let domain = match self.domain {
            DomainArg::Ambient => Domain::scalar(Arc::clone(weights)),
            DomainArg::Submodule => {
                Domain::submodule(Arc::clone(weights), set_args.load_submodule()?)
            }
            DomainArg::Quotient => {
                Domain::quotient(Arc::clone(weights), set_args.load_submodule()?)
            }
        };
        let i = one_based(self.i, m, "--i")?;
        Ok(match self.kind {
            CommKind::SelfComm => (
                self_commutator(&domain, i)?,
                format!("[Z{0}*, Z{0}]", self.i),
            ),
            CommKind::Cross => {
                let j_raw = self
                    .j
                    .ok_or_else(|| anyhow!("--j is required for --kind cross"))?;
                let j = one_based(j_raw, m, "--j")?;
                (
                    cross_commutator(&domain, i, j)?,
                    format!("[Z{}*, Z{}]", self.i, j_raw),
                )
            }
        })
    }
}

fn one_based(axis: usize, m: usize, flag: &str) -> Result<usize> {
    if axis == 0 || axis > m {
        bail!("{flag} must be in 1..={m}, got {axis}");
    }
    Ok(axis - 1)
}

fn parse_window(text: &str) -> Result<(u32, u32)> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| anyhow!("--window must look like lo:hi"))?;
    Ok((lo.trim().parse()?, hi.trim().parse()?))
}

#[derive(Subcommand)]
enum Command {
    /// Verify the contraction and spherical-contraction conditions
    WeightsCheck {
        #[command(flatten)]
        weights: WeightArgs,
        /// sweep all multi-indices up to this total degree
        #[arg(long, default_value_t = 100)]
        max_degree: u32,
    },
    /// Minimal generator antichain of a shift-invariant set
    Generators {
        #[command(flatten)]
        set: SetArgs,
    },
    /// Minimal coordinate sets whose vanishing kills every generator
    Zeroset {
        #[command(flatten)]
        set: SetArgs,
    },
    /// Per-shell singular values of a commutator
    Commutator {
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        op: OpArgs,
        #[command(flatten)]
        set: SubArgs,
        #[arg(long, default_value_t = 40)]
        max_degree: u32,
        #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
        format: DataFormat,
    },
    /// Schatten shell sums, decay fit, and verdict
    Schatten {
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        op: OpArgs,
        #[command(flatten)]
        set: SubArgs,
        /// Schatten order; repeatable
        #[arg(long = "p", required = true)]
        ps: Vec<f64>,
        #[arg(long, default_value_t = essnorm_core::DEFAULT_MAX_DEGREE)]
        max_degree: u32,
        /// fit window lo:hi (default upper half of the range)
        #[arg(long, value_parser = parse_window)]
        window: Option<(u32, u32)>,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: f64,
        #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
        format: DataFormat,
    },
    /// Print the block decomposition of a monomial submodule
    Decompose {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, value_enum, default_value_t = TreeFormat::Text)]
        format: TreeFormat,
    },
    /// Decomposition audit: replay each leaf's compactness mechanism
    Audit {
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        set: SubArgs,
        #[arg(long, default_value_t = 3.0)]
        p: f64,
        #[arg(long, default_value_t = 240)]
        max_degree: u32,
    },
    /// Hilbert-Samuel dimension of the quotient module
    Dimension {
        #[command(flatten)]
        set: SetArgs,
        /// stabilization search cap
        #[arg(long, default_value_t = essnorm_core::samuel::STABILIZATION_CAP)]
        cap: u32,
    },
    /// Compare closed-form operators against the dense truncation oracle
    OracleCompare {
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        set: SubArgs,
        #[arg(long, value_enum, default_value_t = DomainArg::Ambient)]
        domain: DomainArg,
        /// dense truncation degree (guarded)
        #[arg(long, default_value_t = 8)]
        max_degree: u32,
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
        /// dump one dense matrix as CSV instead of comparing:
        /// shift:i | adjoint:i | self:i | cross:i:j (1-based axes)
        #[arg(long)]
        dump: Option<String>,
    },
    /// One-stop bundle: conditions, shell fits, decomposition audit,
    /// dimension, thresholds
    Report {
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        set: SubArgs,
        /// Schatten order; repeatable
        #[arg(long = "p")]
        ps: Vec<f64>,
        #[arg(long, default_value_t = essnorm_core::DEFAULT_MAX_DEGREE)]
        max_degree: u32,
        #[arg(long, value_parser = parse_window)]
        window: Option<(u32, u32)>,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: f64,
        /// seed for the randomized partition sample
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(exit) => std::process::exit(exit),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(format!("{}\n", serde_json::to_string_pretty(value)?))
}

fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::WeightsCheck {
            weights,
            max_degree,
        } => {
            let w = weights.build()?;
            #[derive(Serialize)]
            struct Out {
                family: &'static str,
                m: usize,
                max_degree: u32,
                contractive: ConditionVerdict,
                spherical: ConditionVerdict,
            }
            let out = Out {
                family: w.family_name(),
                m: w.m(),
                max_degree: *max_degree,
                contractive: w.check_contractive(*max_degree)?,
                spherical: w.check_spherical(*max_degree)?,
            };
            let failed = !out.contractive.holds() || !out.spherical.holds();
            emit(cli, &to_json(&out)?)?;
            Ok(if cli.strict && failed { 2 } else { 0 })
        }
        Command::Generators { set } => {
            let b = set.load_set()?;
            #[derive(Serialize)]
            struct Out<'a> {
                m: usize,
                generators: &'a [MultiIndex],
            }
            emit(
                cli,
                &to_json(&Out {
                    m: b.m(),
                    generators: b.generators(),
                })?,
            )?;
            Ok(0)
        }
        Command::Zeroset { set } => {
            let sub = set.load_submodule()?;
            let points: Vec<MultiIndex> =
                sub.generators().iter().map(|g| g.alpha.clone()).collect();
            let zero = essnorm_core::common_zero_coordinates(&points)?;
            #[derive(Serialize)]
            struct Out {
                m: usize,
                /// minimal coordinate subsets, 1-based
                minimal_zero_coordinate_sets: Vec<Vec<usize>>,
            }
            emit(
                cli,
                &to_json(&Out {
                    m: sub.m(),
                    minimal_zero_coordinate_sets: zero
                        .into_iter()
                        .map(|s| s.into_iter().map(|a| a + 1).collect())
                        .collect(),
                })?,
            )?;
            Ok(0)
        }
        Command::Commutator {
            weights,
            op,
            set,
            max_degree,
            format,
        } => {
            let w = weights.build()?;
            let (operator, label) = op.build(&w, set)?;
            let mut rows: Vec<(u32, MultiIndex, Vec<f64>)> = Vec::new();
            for n in 0..=*max_degree {
                for beta in essnorm_core::DegreeShell::new(w.m(), n) {
                    let d_in = operator.input_dim(beta.entries());
                    if d_in == 0 {
                        continue;
                    }
                    let sv = match operator.coefficient(beta.entries())? {
                        Some(block) => block.singular_values(),
                        None => vec![0.0; d_in],
                    };
                    rows.push((n, beta, sv));
                }
            }
            let text = match format {
                DataFormat::Csv => {
                    let mut out = String::from("shell,beta,singular_values\n");
                    for (n, beta, sv) in &rows {
                        let b: Vec<String> = beta.entries().iter().map(|e| e.to_string()).collect();
                        let s: Vec<String> = sv.iter().map(|v| v.to_string()).collect();
                        out.push_str(&format!("{n},{},{}\n", b.join(";"), s.join(";")));
                    }
                    out
                }
                DataFormat::Json => {
                    #[derive(Serialize)]
                    struct Row {
                        shell: u32,
                        beta: MultiIndex,
                        singular_values: Vec<f64>,
                    }
                    #[derive(Serialize)]
                    struct Out {
                        operator: String,
                        rows: Vec<Row>,
                    }
                    to_json(&Out {
                        operator: label,
                        rows: rows
                            .into_iter()
                            .map(|(shell, beta, singular_values)| Row {
                                shell,
                                beta,
                                singular_values,
                            })
                            .collect(),
                    })?
                }
            };
            emit(cli, &text)?;
            Ok(0)
        }
        Command::Schatten {
            weights,
            op,
            set,
            ps,
            max_degree,
            window,
            margin,
            format,
        } => {
            let w = weights.build()?;
            let (operator, label) = op.build(&w, set)?;
            let series = shell_series(&operator, ps, *max_degree)?;
            let mut verdicts = Vec::with_capacity(series.len());
            for s in &series {
                verdicts.push(essnorm_core::schatten::verdict_from_series(
                    s, *margin, *window,
                )?);
            }
            let any_diverged = verdicts
                .iter()
                .any(|v| v.schatten == essnorm_core::Verdict::Diverged);
            let text = match format {
                DataFormat::Csv => {
                    let mut out = String::from("p,shell,count,shellsum,cumulative\n");
                    for s in &series {
                        for e in &s.shells {
                            out.push_str(&format!(
                                "{},{},{},{},{}\n",
                                s.p, e.n, e.count, e.sum, e.cumulative
                            ));
                        }
                    }
                    for v in &verdicts {
                        match &v.schatten_fit {
                            Some(fit) => out.push_str(&format!(
                                "# p={} slope={} r2={} verdict={:?}\n",
                                v.p, fit.slope, fit.r_squared, v.schatten
                            )),
                            None => out.push_str(&format!(
                                "# p={} finite-rank tail, verdict={:?}\n",
                                v.p, v.schatten
                            )),
                        }
                    }
                    out
                }
                DataFormat::Json => {
                    #[derive(Serialize)]
                    struct PerOrder<'a> {
                        p: f64,
                        partial: f64,
                        verdict: &'a essnorm_core::CompactnessVerdict,
                        shells: &'a [essnorm_core::ShellEntry],
                    }
                    #[derive(Serialize)]
                    struct Out<'a> {
                        operator: String,
                        max_degree: u32,
                        orders: Vec<PerOrder<'a>>,
                    }
                    to_json(&Out {
                        operator: label,
                        max_degree: *max_degree,
                        orders: series
                            .iter()
                            .zip(&verdicts)
                            .map(|(s, v)| PerOrder {
                                p: s.p,
                                partial: s.partial(),
                                verdict: v,
                                shells: &s.shells,
                            })
                            .collect(),
                    })?
                }
            };
            emit(cli, &text)?;
            Ok(if cli.strict && any_diverged { 2 } else { 0 })
        }
        Command::Decompose { set, format } => {
            let sub = set.load_submodule()?;
            let tree = full_reduction(&sub)?;
            let text = match format {
                TreeFormat::Text => tree.render_text(),
                TreeFormat::Json => to_json(&tree)?,
            };
            emit(cli, &text)?;
            Ok(0)
        }
        Command::Audit {
            weights,
            set,
            p,
            max_degree,
        } => {
            let w = weights.build()?;
            let sub = set.load_submodule()?;
            let tree = full_reduction(&sub)?;
            let report = essnorm_core::audit(&w, &tree, *p, *max_degree)?;
            let diverged = report.aggregate == essnorm_core::Verdict::Diverged;
            emit(cli, &to_json(&report)?)?;
            Ok(if cli.strict && diverged { 2 } else { 0 })
        }
        Command::Dimension { set, cap } => {
            let sub = set.load_submodule()?;
            let r = dimension(&sub, *cap)?;
            #[derive(Serialize)]
            struct Out {
                d: usize,
                block_d: usize,
                stabilization_shell: u32,
                polynomial: Vec<f64>,
                computed_to: u32,
            }
            emit(
                cli,
                &to_json(&Out {
                    d: r.dimension,
                    block_d: r.block_dimension,
                    stabilization_shell: r.stabilization_shell,
                    polynomial: r.polynomial,
                    computed_to: r.computed_to,
                })?,
            )?;
            Ok(0)
        }
        Command::OracleCompare {
            weights,
            set,
            domain,
            max_degree,
            tolerance,
            dump,
        } => {
            let w = weights.build()?;
            let kind = match domain {
                DomainArg::Ambient => ModuleKind::Ambient { k: 1 },
                DomainArg::Submodule => ModuleKind::Submodule(set.load_submodule()?),
                DomainArg::Quotient => ModuleKind::Quotient(set.load_submodule()?),
            };
            if let Some(spec) = dump {
                let text = dump_dense_matrix(&w, &kind, *max_degree, spec)?;
                emit(cli, &text)?;
                return Ok(0);
            }
            let rows = oracle_battery(&w, &kind, *max_degree)?;
            let worst = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
            #[derive(Serialize)]
            struct Out {
                max_degree: u32,
                tolerance: f64,
                worst_deviation: f64,
                rows: Vec<OracleRow>,
            }
            let failed = worst > *tolerance;
            emit(
                cli,
                &to_json(&Out {
                    max_degree: *max_degree,
                    tolerance: *tolerance,
                    worst_deviation: worst,
                    rows,
                })?,
            )?;
            Ok(if cli.strict && failed { 2 } else { 0 })
        }
        Command::Report {
            weights,
            set,
            ps,
            max_degree,
            window,
            margin,
            seed,
        } => {
            let w = weights.build()?;
            let sub = if set.provided() {
                Some(set.load_submodule()?)
            } else {
                None
            };
            let ps = if ps.is_empty() {
                vec![2.5, 3.0, 4.0]
            } else {
                ps.clone()
            };
            let bundle = report::build(&w, sub, &ps, *max_degree, *window, *margin, *seed)?;
            let failed = bundle.has_failures();
            emit(cli, &to_json(&bundle)?)?;
            Ok(if cli.strict && failed { 2 } else { 0 })
        }
    }
}

/// Dense matrix of one named operator as a sparse CSV of nonzero entries.
fn dump_dense_matrix(
    w: &Arc<WeightSet>,
    kind: &ModuleKind,
    degree: u32,
    spec: &str,
) -> Result<String> {
    use essnorm_core::oracle::{DenseTruncation, OracleOp};
    let parts: Vec<&str> = spec.split(':').collect();
    let m = w.m();
    let axis = |t: &str| -> Result<usize> { one_based(t.parse()?, m, "--dump axis") };
    let op = match parts.as_slice() {
        ["shift", i] => OracleOp::Shift(axis(i)?),
        ["adjoint", i] => OracleOp::AdjointShift(axis(i)?),
        ["self", i] => OracleOp::SelfCommutator(axis(i)?),
        ["cross", i, j] => OracleOp::CrossCommutator(axis(i)?, axis(j)?),
        _ => bail!("--dump expects shift:i | adjoint:i | self:i | cross:i:j, got '{spec}'"),
    };
    let trunc = DenseTruncation::build(w, kind, degree)?;
    let dense = trunc.dense_matrix(&op)?;
    let k = trunc.multiplicity();
    let label = |idx: usize| -> String {
        let point = &trunc.points()[idx / k];
        let e: Vec<String> = point.entries().iter().map(|x| x.to_string()).collect();
        format!("{},{}", e.join(";"), idx % k)
    };
    let mut out = String::from(
        "row_point,row_fiber,col_point,col_fiber,re,im
",
    );
    for col in 0..trunc.dim() {
        for row in 0..trunc.dim() {
            let v = dense.get(row, col);
            if v.norm() > 0.0 {
                out.push_str(&format!(
                    "{},{},{},{}
",
                    label(row),
                    label(col),
                    v.re,
                    v.im
                ));
            }
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct OracleRow {
    operator: String,
    deviation: f64,
}

fn oracle_battery(w: &Arc<WeightSet>, kind: &ModuleKind, degree: u32) -> Result<Vec<OracleRow>> {
    use essnorm_core::oracle::{DenseTruncation, OracleOp};
    let trunc = DenseTruncation::build(w, kind, degree)?;
    let domain = Domain::from_kind(Arc::clone(w), kind.clone());
    let m = w.m();
    let mut rows = Vec::new();
    let mut push = |label: String, op: LatticeOperator, oop: OracleOp| -> Result<()> {
        rows.push(OracleRow {
            operator: label,
            deviation: trunc.compare(&op, &oop)?,
        });
        Ok(())
    };
    for i in 0..m {
        let z = essnorm_core::shift_op(&domain, i)?;
        push(format!("Z{}", i + 1), z.clone(), OracleOp::Shift(i))?;
        push(
            format!("Z{}*", i + 1),
            z.adjoint(),
            OracleOp::AdjointShift(i),
        )?;
        push(
            format!("[Z{0}*, Z{0}]", i + 1),
            self_commutator(&domain, i)?,
            OracleOp::SelfCommutator(i),
        )?;
        for j in 0..m {
            if i != j {
                push(
                    format!("[Z{}*, Z{}]", i + 1, j + 1),
                    cross_commutator(&domain, i, j)?,
                    OracleOp::CrossCommutator(i, j),
                )?;
            }
        }
    }
    if matches!(kind, ModuleKind::Ambient { .. }) {
        for i in 0..m {
            for level in 0..2u32 {
                let slice = essnorm_core::MultiSlice::single(m, i, level)?;
                let op = essnorm_core::edge_gram_on_slice(&domain, i, &slice)?;
                let oop = OracleOp::EdgeGram {
                    axis: i,
                    region: essnorm_core::Cell::from_slice(&slice),
                };
                push(
                    format!("edge gram X{0}*X{0} on level {1}", i + 1, level),
                    op,
                    oop,
                )?;
            }
        }
    }
    Ok(rows)
}
