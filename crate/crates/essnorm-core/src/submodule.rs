//! Multiplicity-k monomial submodules.
//!
//! A submodule is given by generators `(alpha^i, x_i)` with `x_i` a nonzero
//! vector in `C^k`. The fiber over a lattice point `beta` is the span of the
//! `x_i` whose exponent cone contains `beta`; the submodule is the orthogonal
//! sum of `e_beta (x) H_beta`. Fibers depend on `beta` only through the
//! activation pattern (which generators are below `beta`), so orthonormal
//! bases are memoized per pattern: a shell of millions of points touches at
//! most `2^n` patterns.

use crate::error::{Error, Result};
use crate::lattice::{leq, MultiIndex, ShiftInvariantSet};
use crate::linalg::{CMat, C64};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

/// Default singular-value cutoff deciding fiber rank.
pub const RANK_TOL: f64 = 1e-10;

/// One generator: a lattice exponent and a nonzero vector in `C^k`.
#[derive(Debug, Clone)]
pub struct Generator {
    pub alpha: MultiIndex,
    pub x: Vec<C64>,
}

/// Orthonormal fiber data at one activation pattern: a basis of the span
/// and a basis of its orthogonal complement in `C^k`.
#[derive(Debug)]
pub struct FiberPair {
    /// k x d, orthonormal columns spanning `H_beta`
    pub basis: CMat,
    /// k x (k - d), orthonormal columns spanning `H_beta` orthogonal complement
    pub complement: CMat,
}

impl FiberPair {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn quotient_dim(&self) -> usize {
        self.complement.cols()
    }
}

/// A finitely generated monomial submodule of the multiplicity-`k` module.
#[derive(Debug)]
pub struct VectorSubmodule {
    m: usize,
    k: usize,
    generators: Vec<Generator>,
    rank_tol: f64,
    cache: RwLock<HashMap<u64, Arc<FiberPair>>>,
}

impl Clone for VectorSubmodule {
    fn clone(&self) -> Self {
        VectorSubmodule {
            m: self.m,
            k: self.k,
            generators: self.generators.clone(),
            rank_tol: self.rank_tol,
            cache: RwLock::new(HashMap::new()),
        }
    }
}

impl VectorSubmodule {
    pub fn new(m: usize, k: usize, generators: Vec<(MultiIndex, Vec<C64>)>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("multiplicity k must be at least 1".into()));
        }
        if generators.len() > 64 {
            return Err(Error::TooManyGenerators(generators.len()));
        }
        let mut gens = Vec::with_capacity(generators.len());
        for (index, (alpha, x)) in generators.into_iter().enumerate() {
            if alpha.dim() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: alpha.dim(),
                });
            }
            if x.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    got: x.len(),
                });
            }
            if x.iter().map(|z| z.norm_sqr()).sum::<f64>() == 0.0 {
                return Err(Error::ZeroGeneratorVector { index });
            }
            gens.push(Generator { alpha, x });
        }
        Ok(VectorSubmodule {
            m,
            k,
            generators: gens,
            rank_tol: RANK_TOL,
            cache: RwLock::new(HashMap::new()),
        })
    }

    /// Scalar (k = 1) submodule determined by a shift-invariant set.
    pub fn scalar(set: &ShiftInvariantSet) -> Self {
        let gens = set
            .generators()
            .iter()
            .map(|g| (g.clone(), vec![C64::new(1.0, 0.0)]))
            .collect();
        VectorSubmodule::new(set.m(), 1, gens).expect("scalar generators are valid")
    }

    pub fn with_rank_tol(mut self, tol: f64) -> Self {
        self.rank_tol = tol;
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// The exponent set `{beta : H_beta != 0}`.
    pub fn support(&self) -> Result<ShiftInvariantSet> {
        let pts: Vec<MultiIndex> = self.generators.iter().map(|g| g.alpha.clone()).collect();
        ShiftInvariantSet::closure(self.m, &pts)
    }

    /// Bitmask of generators whose cone contains `beta`.
    pub fn pattern(&self, beta: &[u32]) -> u64 {
        debug_assert_eq!(beta.len(), self.m);
        let mut mask = 0u64;
        for (i, g) in self.generators.iter().enumerate() {
            if leq(g.alpha.entries(), beta) {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// Fiber data for an explicit activation pattern.
    pub fn fiber_of_pattern(&self, mask: u64) -> Arc<FiberPair> {
        if let Some(hit) = self.cache.read().unwrap().get(&mask) {
            return Arc::clone(hit);
        }
        let cols: Vec<Vec<C64>> = self
            .generators
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, g)| g.x.clone())
            .collect();
        let raw = CMat::from_columns(self.k, &cols);
        let basis = raw.orthonormal_range(self.rank_tol);
        let complement = basis.orthonormal_complement();
        let pair = Arc::new(FiberPair { basis, complement });
        // concurrent inserts compute identical values, so last-write-wins
        // keeps the cache deterministic
        let mut w = self.cache.write().unwrap();
        Arc::clone(w.entry(mask).or_insert(pair))
    }

    /// Orthonormal basis data of `H_beta` and its complement.
    pub fn fiber(&self, beta: &[u32]) -> Arc<FiberPair> {
        self.fiber_of_pattern(self.pattern(beta))
    }

    pub fn fiber_dim(&self, beta: &[u32]) -> usize {
        self.fiber(beta).dim()
    }

    pub fn quotient_dim(&self, beta: &[u32]) -> usize {
        self.k - self.fiber_dim(beta)
    }

    /// Sweep the fiber dimension along `moving` with the `frozen` axes pinned
    /// to fixed levels. Axes that are neither frozen nor moving do not
    /// constrain activation (they are taken arbitrarily deep). Breakpoints
    /// are the smallest levels at which the dimension strictly increases.
    pub fn filtration_along(&self, frozen: &[(usize, u32)], moving: usize) -> Result<Filtration> {
        if moving >= self.m {
            return Err(Error::AxisOutOfRange {
                axis: moving,
                m: self.m,
            });
        }
        for &(a, _) in frozen {
            if a >= self.m {
                return Err(Error::AxisOutOfRange { axis: a, m: self.m });
            }
            if a == moving {
                return Err(Error::Invalid(format!(
                    "moving axis {moving} is also frozen"
                )));
            }
        }
        let relevant: Vec<usize> = (0..self.generators.len())
            .filter(|&i| {
                frozen
                    .iter()
                    .all(|&(a, l)| self.generators[i].alpha.entry(a) <= l)
            })
            .collect();
        let mut levels: Vec<u32> = relevant
            .iter()
            .map(|&i| self.generators[i].alpha.entry(moving))
            .collect();
        levels.sort_unstable();
        levels.dedup();

        let mut breakpoints: Vec<Breakpoint> = Vec::new();
        let mut prev_dim = 0usize;
        let mut prev_basis = CMat::zeros(self.k, 0);
        for level in levels {
            let mut mask = 0u64;
            for &i in &relevant {
                if self.generators[i].alpha.entry(moving) <= level {
                    mask |= 1 << i;
                }
            }
            let pair = self.fiber_of_pattern(mask);
            if pair.dim() > prev_dim {
                // jump space: new basis with the previous span projected out
                let u = &pair.basis;
                let mut projected = u.clone();
                if prev_basis.cols() > 0 {
                    let overlap = prev_basis.adjoint().mul(u);
                    projected = u.sub(&prev_basis.mul(&overlap));
                }
                let jump = projected.orthonormal_range(self.rank_tol);
                breakpoints.push(Breakpoint {
                    level,
                    dim: pair.dim(),
                    jump,
                });
                prev_dim = pair.dim();
                prev_basis = pair.basis.clone();
            }
        }
        Ok(Filtration {
            frozen: frozen.to_vec(),
            moving,
            breakpoints,
        })
    }
}

/// One dimension jump of a filtration.
#[derive(Debug, Clone)]
pub struct Breakpoint {
    /// smallest level with the new dimension
    pub level: u32,
    /// fiber dimension from this level on
    pub dim: usize,
    /// orthonormal basis of `H_{n_t}` intersected with the previous
    /// fiber's complement
    pub jump: CMat,
}

/// Fiber dimension profile along one axis: increasing levels with jump
/// spaces whose direct sum is the final fiber.
#[derive(Debug, Clone)]
pub struct Filtration {
    pub frozen: Vec<(usize, u32)>,
    pub moving: usize,
    pub breakpoints: Vec<Breakpoint>,
}

impl Filtration {
    pub fn final_dim(&self) -> usize {
        self.breakpoints.last().map(|b| b.dim).unwrap_or(0)
    }
}

/// JSON form of a submodule; complex vector entries are plain numbers or
/// `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubmoduleSpec {
    pub m: usize,
    pub k: usize,
    pub generators: Vec<GeneratorSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub alpha: Vec<u32>,
    pub x: Vec<ComplexEntry>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexEntry {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexEntry> for C64 {
    fn from(e: ComplexEntry) -> C64 {
        match e {
            ComplexEntry::Real(re) => C64::new(re, 0.0),
            ComplexEntry::Pair([re, im]) => C64::new(re, im),
        }
    }
}

impl TryFrom<SubmoduleSpec> for VectorSubmodule {
    type Error = Error;

    fn try_from(spec: SubmoduleSpec) -> Result<VectorSubmodule> {
        let gens = spec
            .generators
            .into_iter()
            .map(|g| {
                (
                    MultiIndex::new(g.alpha),
                    g.x.into_iter().map(C64::from).collect(),
                )
            })
            .collect();
        VectorSubmodule::new(spec.m, spec.k, gens)
    }
}

impl From<&VectorSubmodule> for SubmoduleSpec {
    fn from(s: &VectorSubmodule) -> SubmoduleSpec {
        SubmoduleSpec {
            m: s.m,
            k: s.k,
            generators: s
                .generators
                .iter()
                .map(|g| GeneratorSpec {
                    alpha: g.alpha.entries().to_vec(),
                    x: g.x
                        .iter()
                        .map(|z| {
                            if z.im == 0.0 {
                                ComplexEntry::Real(z.re)
                            } else {
                                ComplexEntry::Pair([z.re, z.im])
                            }
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}
