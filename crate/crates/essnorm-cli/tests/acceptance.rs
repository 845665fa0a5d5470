//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers (visible with `--nocapture`).
//!
//! Every tolerance is pinned here, in code. Run with
//! `cargo test -p essnorm-cli --test acceptance -- --nocapture`.

use essnorm_core::oracle::{DenseTruncation, OracleOp};
use essnorm_core::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::sync::Arc;

fn mi(v: &[u32]) -> MultiIndex {
    MultiIndex::new(v.to_vec())
}

/// A uniform-ish lattice point of total degree at most `box_degree`.
fn random_point(rng: &mut ChaCha8Rng, m: usize, box_degree: u32) -> MultiIndex {
    let degree = rng.gen_range(0..=box_degree);
    let mut entries = vec![0u32; m];
    for _ in 0..degree {
        entries[rng.gen_range(0..m)] += 1;
    }
    MultiIndex::new(entries)
}

fn random_set(
    rng: &mut ChaCha8Rng,
    m: usize,
    box_degree: u32,
) -> (Vec<MultiIndex>, ShiftInvariantSet) {
    let n = rng.gen_range(1..=6usize);
    let raw: Vec<MultiIndex> = (0..n).map(|_| random_point(rng, m, box_degree)).collect();
    let set = ShiftInvariantSet::closure(m, &raw).unwrap();
    (raw, set)
}

fn random_submodule(rng: &mut ChaCha8Rng, m: usize, k: usize) -> VectorSubmodule {
    let n = rng.gen_range(1..=3usize);
    let gens: Vec<(MultiIndex, Vec<C64>)> = (0..n)
        .map(|_| {
            let alpha = random_point(rng, m, 5);
            let x: Vec<C64> = loop {
                let cand: Vec<C64> = (0..k)
                    .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                if cand.iter().map(|z| z.norm_sqr()).sum::<f64>() > 0.05 {
                    break cand;
                }
            };
            (alpha, x)
        })
        .collect();
    VectorSubmodule::new(m, k, gens).unwrap()
}

/// Criterion 1: the square-root factorial family's self-commutator shell
/// sums decay with slope m - 1 - p, and the verdict flips across the
/// critical order.
#[test]
fn criterion_01_decay_threshold() {
    // m = 2
    let d2 = Domain::scalar(Arc::new(WeightSet::drury_arveson(2)));
    let op = self_commutator(&d2, 0).unwrap();
    let ps = [1.5, 2.5, 3.0, 4.0];
    let series = shell_series(&op, &ps, 1000).unwrap();
    for s in &series {
        let v = schatten::verdict_from_series(s, DEFAULT_MARGIN, Some((100, 1000))).unwrap();
        if s.p == 1.5 {
            assert!(
                v.schatten != Verdict::Converged,
                "p = 1.5 must not converge"
            );
            continue;
        }
        let fit = v.schatten_fit.expect("positive tail");
        let model = 2.0 - 1.0 - s.p;
        assert!(
            (fit.slope - model).abs() <= 0.15,
            "m=2 p={}: slope {} vs {}",
            s.p,
            fit.slope,
            model
        );
        assert_eq!(v.schatten, Verdict::Converged, "m=2 p={}", s.p);
        println!(
            "criterion 1 [m=2, p={}]: slope {:.4} (model {:.1})",
            s.p, fit.slope, model
        );
    }
    // m = 3
    let d3 = Domain::scalar(Arc::new(WeightSet::drury_arveson(3)));
    let op = self_commutator(&d3, 0).unwrap();
    let series = shell_series(&op, &[3.5, 4.0], 400).unwrap();
    for s in &series {
        let v = schatten::verdict_from_series(s, DEFAULT_MARGIN, Some((80, 400))).unwrap();
        let fit = v.schatten_fit.expect("positive tail");
        let model = 3.0 - 1.0 - s.p;
        assert!(
            (fit.slope - model).abs() <= 0.15,
            "m=3 p={}: slope {} vs {}",
            s.p,
            fit.slope,
            model
        );
        assert_eq!(v.schatten, Verdict::Converged, "m=3 p={}", s.p);
        println!(
            "criterion 1 [m=3, p={}]: slope {:.4} (model {:.1})",
            s.p, fit.slope, model
        );
    }
    println!("[PASS] criterion 1: decay threshold");
}

/// Criterion 2: the two-by-two block commutator identity of a truncated
/// shift holds to roundoff and the invariance corner is exactly zero.
#[test]
fn criterion_02_block_identity() {
    let sets = [
        ShiftInvariantSet::cone(mi(&[1, 1])),
        ShiftInvariantSet::closure(2, &[mi(&[2, 0]), mi(&[0, 3])]).unwrap(),
    ];
    for family in [WeightSet::drury_arveson(2), WeightSet::paper_literal(2)] {
        let w = Arc::new(family);
        for set in &sets {
            for axis in 0..2 {
                let split = block_split(&w, axis, set, 12).unwrap();
                assert_eq!(split.c_max_abs, 0.0, "C block must vanish exactly");
                assert!(
                    split.residue_submodule <= 1e-12,
                    "submodule residue {}",
                    split.residue_submodule
                );
                assert!(
                    split.residue_quotient <= 1e-12,
                    "quotient residue {}",
                    split.residue_quotient
                );
            }
        }
    }
    println!("[PASS] criterion 2: block identity residues <= 1e-12, C = 0");
}

/// Criterion 3: closed-form lattice operators match dense truncations
/// entrywise across a seeded set of random monomial submodules and every
/// built-in family.
#[test]
fn criterion_03_oracle_equivalence() {
    let families: [fn(usize) -> WeightSet; 5] = [
        WeightSet::drury_arveson,
        WeightSet::paper_literal,
        WeightSet::hardy_ball_like,
        WeightSet::bergman_ball_like,
        WeightSet::unweighted,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0xE55);
    let mut cases = Vec::new();
    for t in 0..20usize {
        let m = 1 + t % 3;
        let k = 1 + (t / 3) % 3;
        let degree = match (m, k) {
            (1, _) => 10,
            (2, 1) => 10,
            (2, _) => 9,
            (3, 1) => 8,
            _ => 6,
        };
        let family = families[t % families.len()];
        let s = random_submodule(&mut rng, m, k);
        cases.push((family(m), s, degree));
    }
    let worst = cases
        .into_par_iter()
        .map(|(family, s, degree)| {
            let w = Arc::new(family);
            let s = Arc::new(s);
            let mut worst = 0.0f64;
            for kind in [
                ModuleKind::Ambient { k: s.k() },
                ModuleKind::Submodule(Arc::clone(&s)),
                ModuleKind::Quotient(Arc::clone(&s)),
            ] {
                let trunc = DenseTruncation::build(&w, &kind, degree).unwrap();
                let domain = Domain::from_kind(Arc::clone(&w), kind.clone());
                let m = w.m();
                let mut pairs: Vec<(LatticeOperator, OracleOp)> = Vec::new();
                for i in 0..m {
                    let z = shift_op(&domain, i).unwrap();
                    pairs.push((z.clone(), OracleOp::Shift(i)));
                    pairs.push((z.adjoint(), OracleOp::AdjointShift(i)));
                    pairs.push((
                        self_commutator(&domain, i).unwrap(),
                        OracleOp::SelfCommutator(i),
                    ));
                    for j in 0..m {
                        if i != j {
                            pairs.push((
                                cross_commutator(&domain, i, j).unwrap(),
                                OracleOp::CrossCommutator(i, j),
                            ));
                        }
                    }
                }
                if matches!(kind, ModuleKind::Ambient { .. }) {
                    for i in 0..m {
                        for level in 0..2u32 {
                            let slice = MultiSlice::single(m, i, level).unwrap();
                            pairs.push((
                                edge_gram_on_slice(&domain, i, &slice).unwrap(),
                                OracleOp::EdgeGram {
                                    axis: i,
                                    region: Cell::from_slice(&slice),
                                },
                            ));
                        }
                    }
                }
                for (op, oop) in &pairs {
                    let dev = trunc.compare(op, oop).unwrap();
                    assert!(
                        dev <= 1e-12,
                        "m={m} k={} degree={degree} {oop:?}: deviation {dev}",
                        s.k()
                    );
                    worst = worst.max(dev);
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    println!("[PASS] criterion 3: oracle equivalence, worst deviation {worst:.3e}");
}

/// Criterion 4: closure of the minimal generators reproduces the set, with
/// membership agreement across the degree-14 box.
#[test]
fn criterion_04_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBEEF);
    for case in 0..200usize {
        let m = 1 + case % 4;
        let (raw, set) = random_set(&mut rng, m, 12);
        let gens = minimal_generators(m, &raw).unwrap();
        let round = ShiftInvariantSet::closure(m, &gens).unwrap();
        assert_eq!(round.generators(), set.generators(), "case {case}");
        for n in 0..=14u32 {
            for p in shell_all(m, n) {
                let brute = raw.iter().any(|g| g.leq(p.entries()));
                assert_eq!(set.contains(p.entries()), brute, "case {case} at {p}");
            }
        }
    }
    println!("[PASS] criterion 4: 200 closure round-trips, degree-14 box agreement");
}

/// Criterion 5: planar cofinite differences are finite and live inside the
/// corner bounding box.
#[test]
fn criterion_05_finite_defect() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD1FF);
    for case in 0..100usize {
        let (_, set) = random_set(&mut rng, 2, 12);
        let (lo, hi) = set.proof_box_m2().unwrap();
        match set.cofinite_difference().unwrap() {
            CofiniteDifference::Finite(points) => {
                for p in points {
                    assert!(
                        lo.leq(p.entries()) && p.leq(hi.entries()),
                        "case {case}: {p} outside [{lo}, {hi}]"
                    );
                }
            }
            CofiniteDifference::Infinite { .. } => {
                panic!("case {case}: planar defect must be finite")
            }
        }
    }
    println!("[PASS] criterion 5: 100 planar defects finite and boxed");
}

/// Criterion 6: the reduction partitions the lattice-with-fibers exactly
/// and restricted self-commutator shell sums add across its pieces.
#[test]
fn criterion_06_partition_additivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6A6A);
    for case in 0..50usize {
        let m = 2 + case % 2;
        let (_, set) = random_set(&mut rng, m, 6);
        let s = Arc::new(VectorSubmodule::scalar(&set));
        let tree = full_reduction(&s).unwrap();
        let pieces = tree.partition();
        // sampled partition audit
        for _ in 0..200 {
            let beta = random_point(&mut rng, m, 14);
            let claimed: usize = pieces
                .iter()
                .filter(|(cell, _)| cell.contains(beta.entries()))
                .map(|(_, d)| d)
                .sum();
            assert_eq!(
                claimed,
                s.fiber_dim(beta.entries()),
                "case {case}: point {beta} misclaimed"
            );
        }
        // per-shell additivity of the restricted self-commutators
        let w = Arc::new(WeightSet::drury_arveson(m));
        let domain = Domain::submodule(Arc::clone(&w), Arc::clone(&s));
        for axis in 0..m {
            let comm = self_commutator(&domain, axis).unwrap();
            for n in 0..=50u32 {
                let mut direct = 0.0f64;
                let mut by_piece = 0.0f64;
                for beta in DegreeShell::new(m, n) {
                    if let Some(block) = comm.coefficient(beta.entries()).unwrap() {
                        let sigma = block.get(0, 0).norm();
                        direct += sigma;
                        by_piece += sigma
                            * pieces
                                .iter()
                                .filter(|(cell, _)| cell.contains(beta.entries()))
                                .count() as f64;
                    }
                }
                assert!(
                    (direct - by_piece).abs() <= 1e-12 * direct.max(1.0),
                    "case {case} axis {axis} shell {n}: {direct} vs {by_piece}"
                );
            }
        }
    }
    println!("[PASS] criterion 6: 50 reductions partition exactly and sums add");
}

/// Criterion 7: the edge Gram on the zero slice has the exact closed-form
/// diagonal and unit-slope decay; flat weights do not decay.
#[test]
fn criterion_07_edge_decay() {
    let d = Domain::scalar(Arc::new(WeightSet::drury_arveson(2)));
    let slice = MultiSlice::single(2, 0, 0).unwrap();
    let gram = edge_gram_on_slice(&d, 0, &slice).unwrap();
    for n in 0..=500u32 {
        let block = gram.coefficient(&[0, n]).unwrap().unwrap();
        let got = block.get(0, 0).re;
        let want = 1.0 / (n as f64 + 1.0);
        assert!(
            (got - want).abs() <= 1e-12,
            "diagonal at (0,{n}): {got} vs {want}"
        );
    }
    let series = shell_series(&gram, &[1.0], 500).unwrap().remove(0);
    let fit = fit_decay(&series, (50, 500)).unwrap();
    assert!(
        (fit.slope + 1.0).abs() <= 0.05,
        "edge decay slope {}",
        fit.slope
    );

    let flat = Domain::scalar(Arc::new(WeightSet::unweighted(2)));
    let gram = edge_gram_on_slice(&flat, 0, &slice).unwrap();
    let series = shell_series(&gram, &[1.0], 500).unwrap().remove(0);
    let fit_flat = fit_decay(&series, (50, 500)).unwrap();
    assert!(
        fit_flat.slope >= -0.01,
        "flat edge must not decay, slope {}",
        fit_flat.slope
    );
    println!(
        "[PASS] criterion 7: edge slopes {:.4} (drury) / {:.4} (unweighted)",
        fit.slope, fit_flat.slope
    );
}

/// Criterion 8: Hilbert-Samuel counts and the agreement of the two
/// dimension readings.
#[test]
fn criterion_08_hilbert_samuel() {
    let s = VectorSubmodule::scalar(&ShiftInvariantSet::cone(mi(&[2, 3])));
    for n in 4..=40u32 {
        assert_eq!(quotient_count(&s, n), 5, "shell {n}");
    }
    let r = dimension(&s, samuel::STABILIZATION_CAP).unwrap();
    assert_eq!(r.dimension, 1);

    for m in 1..=3usize {
        let zero = VectorSubmodule::new(m, 1, vec![]).unwrap();
        let r = dimension(&zero, samuel::STABILIZATION_CAP).unwrap();
        assert_eq!(r.dimension, m, "zero submodule in {m} variables");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5A11);
    for case in 0..30usize {
        let m = 1 + case % 3;
        let k = 1 + case % 2;
        let sub = if k == 1 {
            let (_, set) = random_set(&mut rng, m, 8);
            VectorSubmodule::scalar(&set)
        } else {
            random_submodule(&mut rng, m, k)
        };
        let r = dimension(&sub, samuel::STABILIZATION_CAP)
            .unwrap_or_else(|e| panic!("case {case}: {e}"));
        // dimension() errors out if the readings disagree; assert anyway
        assert_eq!(r.dimension, r.block_dimension, "case {case}");
        assert!(r.dimension <= m);
    }
    println!("[PASS] criterion 8: counts stabilize, 30 seeded reading agreements");
}

/// Criterion 9: quotient commutator verdicts match the dimension threshold
/// q over d with the boundary excluded.
#[test]
fn criterion_09_quotient_threshold() {
    let start = std::time::Instant::now();
    let set = ShiftInvariantSet::cone(mi(&[2, 3]));
    let s = Arc::new(VectorSubmodule::scalar(&set));
    let w = Arc::new(WeightSet::drury_arveson(2));
    let report = threshold_consistency(&s, &w, &[0.8, 1.5, 2.0, 3.0], 600, DEFAULT_MARGIN).unwrap();
    assert_eq!(report.dimension, 1);
    assert!(!report.rows[0].all_converged, "q = 0.8 must not converge");
    for row in &report.rows[1..] {
        assert!(row.all_converged, "q = {} must converge", row.q);
    }
    assert!(report.consistent);
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() <= 60,
        "criterion 9 exceeded its runtime budget: {elapsed:?}"
    );
    println!("[PASS] criterion 9: q > d verdicts consistent in {elapsed:?}");
}

/// Criterion 10: the report command is byte-deterministic across thread
/// counts.
#[test]
fn criterion_10_determinism() {
    let dir = std::env::temp_dir().join("essnorm-acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let mut outputs = Vec::new();
    for (tag, threads) in [("a", "1"), ("b", "8"), ("c", "1")] {
        let path = dir.join(format!("report-{tag}.json"));
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_essnorm"))
            .args([
                "report",
                "--family",
                "drury_arveson",
                "--m",
                "2",
                "--p",
                "2.5",
                "--p",
                "3",
                "--p",
                "4",
                "--max-degree",
                "1000",
                "--window",
                "100:1000",
                "--out",
            ])
            .arg(&path)
            .env("ESSNORM_THREADS", threads)
            .status()
            .expect("spawn essnorm");
        assert!(status.success());
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "1 vs 8 threads");
    assert_eq!(outputs[1], outputs[2], "rerun");
    assert!(!outputs[0].is_empty());
    println!(
        "[PASS] criterion 10: byte-identical reports across thread counts ({} bytes)",
        outputs[0].len()
    );
}
