//! Dense brute-force truncation oracle.
//!
//! Everything here works on explicit matrices over the ambient truncated
//! basis (all lattice points up to a degree cap, times `C^k`). Restrictions
//! and compressions are literal sandwiches with a dense projector, and
//! commutators are literal matrix products, so the only thing shared with
//! the lattice-coefficient path is the weight evaluator and the fiber bases
//! that define the submodule. Deviations between the two paths are measured
//! entrywise on the columns the truncation leaves exact.

use crate::error::{Error, Result};
use crate::lattice::{Cell, DegreeShell, MultiIndex};
use crate::linalg::{CMat, C64};
use crate::shiftops::{LatticeOperator, ModuleKind};
use crate::weights::WeightSet;
use std::collections::HashMap;
use std::sync::Arc;

const DEGREE_GUARD: u32 = 16;
const DIM_GUARD: usize = 4096;

/// Names the operators the oracle can materialize densely.
#[derive(Debug, Clone)]
pub enum OracleOp {
    Shift(usize),
    AdjointShift(usize),
    SelfCommutator(usize),
    /// `[Z_i*, Z_j]`
    CrossCommutator(usize, usize),
    EdgeGram {
        axis: usize,
        region: Cell,
    },
}

/// Explicit matrices for one weight set, module, and degree cap.
pub struct DenseTruncation {
    kind: ModuleKind,
    degree: u32,
    points: Vec<MultiIndex>,
    index: HashMap<Vec<u32>, usize>,
    k: usize,
    dim: usize,
    ambient_shifts: Vec<CMat>,
    /// block-diagonal orthogonal projector onto the submodule fibers
    projector: Option<CMat>,
}

impl DenseTruncation {
    pub fn build(
        weights: &Arc<WeightSet>,
        kind: &ModuleKind,
        degree: u32,
    ) -> Result<DenseTruncation> {
        let m = weights.m();
        if degree > DEGREE_GUARD {
            return Err(Error::SizeGuardExceeded { degree, m });
        }
        let k = match kind {
            ModuleKind::Ambient { k } => *k,
            ModuleKind::Submodule(s) | ModuleKind::Quotient(s) => s.k(),
        };
        let mut points: Vec<MultiIndex> = Vec::new();
        for n in 0..=degree {
            points.extend(DegreeShell::new(m, n));
        }
        let dim = points.len() * k;
        if dim > DIM_GUARD {
            return Err(Error::SizeGuardExceeded { degree, m });
        }
        let index: HashMap<Vec<u32>, usize> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.entries().to_vec(), i))
            .collect();
        let mut ambient_shifts = Vec::with_capacity(m);
        for axis in 0..m {
            let mut z = CMat::zeros(dim, dim);
            for (c, p) in points.iter().enumerate() {
                if p.degree() < degree {
                    let r = index[p.succ(axis).entries()];
                    let w = weights.ratio(axis, p.entries())?;
                    for t in 0..k {
                        z.set(r * k + t, c * k + t, C64::new(w, 0.0));
                    }
                }
            }
            ambient_shifts.push(z);
        }
        let projector = match kind {
            ModuleKind::Ambient { .. } => None,
            ModuleKind::Submodule(s) | ModuleKind::Quotient(s) => {
                let mut p = CMat::zeros(dim, dim);
                for (i, pt) in points.iter().enumerate() {
                    let fiber = s.fiber(pt.entries());
                    let blk = fiber.basis.mul(&fiber.basis.adjoint());
                    for c in 0..k {
                        for r in 0..k {
                            p.set(i * k + r, i * k + c, blk.get(r, c));
                        }
                    }
                }
                Some(p)
            }
        };
        Ok(DenseTruncation {
            kind: kind.clone(),
            degree,
            points,
            index,
            k,
            dim,
            ambient_shifts,
            projector,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn points(&self) -> &[MultiIndex] {
        &self.points
    }

    pub fn multiplicity(&self) -> usize {
        self.k
    }

    /// Row/column of the ambient basis vector `e_point (x) e_t`.
    pub fn basis_index(&self, point: &[u32], t: usize) -> Option<usize> {
        self.index.get(point).map(|i| i * self.k + t)
    }

    /// The projector sandwich appropriate to the module kind.
    fn domain_shift(&self, axis: usize) -> CMat {
        let z = &self.ambient_shifts[axis];
        match (&self.kind, &self.projector) {
            (ModuleKind::Ambient { .. }, _) => z.clone(),
            (ModuleKind::Submodule(_), Some(p)) => p.mul(&z.mul(p)),
            (ModuleKind::Quotient(_), Some(p)) => {
                let q = CMat::identity(self.dim).sub(p);
                q.mul(&z.mul(&q))
            }
            _ => unreachable!("projector exists for module kinds"),
        }
    }

    /// Materialize an operator by literal matrix products.
    pub fn dense_matrix(&self, op: &OracleOp) -> Result<CMat> {
        Ok(match op {
            OracleOp::Shift(axis) => self.domain_shift(*axis),
            OracleOp::AdjointShift(axis) => self.domain_shift(*axis).adjoint(),
            OracleOp::SelfCommutator(axis) => {
                let t = self.domain_shift(*axis);
                let adj = t.adjoint();
                adj.mul(&t).sub(&t.mul(&adj))
            }
            OracleOp::CrossCommutator(i, j) => {
                let ti = self.domain_shift(*i);
                let tj = self.domain_shift(*j);
                let adj = ti.adjoint();
                adj.mul(&tj).sub(&tj.mul(&adj))
            }
            OracleOp::EdgeGram { axis, region } => {
                if !matches!(self.kind, ModuleKind::Ambient { .. }) {
                    return Err(Error::Invalid(
                        "edge Grams are ambient-module objects".into(),
                    ));
                }
                let z = &self.ambient_shifts[*axis];
                let gram = z.adjoint().mul(z);
                let mut out = CMat::zeros(self.dim, self.dim);
                // R G R with R the diagonal region indicator
                for (ci, cp) in self.points.iter().enumerate() {
                    if !region.contains(cp.entries()) {
                        continue;
                    }
                    for (ri, rp) in self.points.iter().enumerate() {
                        if !region.contains(rp.entries()) {
                            continue;
                        }
                        for tc in 0..self.k {
                            for tr in 0..self.k {
                                out.set(
                                    ri * self.k + tr,
                                    ci * self.k + tc,
                                    gram.get(ri * self.k + tr, ci * self.k + tc),
                                );
                            }
                        }
                    }
                }
                out
            }
        })
    }

    /// Express a lattice-coefficient operator in the ambient truncated
    /// basis: fiber blocks conjugated by the fiber isometries.
    pub fn embed(&self, op: &LatticeOperator) -> Result<CMat> {
        let mut out = CMat::zeros(self.dim, self.dim);
        let delta = op.displacement();
        for (ci, p) in self.points.iter().enumerate() {
            let Some(block) = op.coefficient(p.entries())? else {
                continue;
            };
            let mut target = Vec::with_capacity(p.dim());
            for (b, d) in p.entries().iter().zip(delta) {
                target.push((*b as i64 + d) as u32);
            }
            let Some(&ri) = self.index.get(&target) else {
                continue; // image beyond the truncation
            };
            let ambient_block = match &self.kind {
                ModuleKind::Ambient { .. } => block,
                ModuleKind::Submodule(s) => {
                    let uin = &s.fiber(p.entries()).basis;
                    let uout = &s.fiber(&target).basis;
                    uout.mul(&block).mul(&uin.adjoint())
                }
                ModuleKind::Quotient(s) => {
                    let vin = &s.fiber(p.entries()).complement;
                    let vout = &s.fiber(&target).complement;
                    vout.mul(&block).mul(&vin.adjoint())
                }
            };
            for tc in 0..ambient_block.cols() {
                for tr in 0..ambient_block.rows() {
                    out.set(
                        ri * self.k + tr,
                        ci * self.k + tc,
                        ambient_block.get(tr, tc),
                    );
                }
            }
        }
        Ok(out)
    }

    /// Entrywise deviation between the closed-form operator and the dense
    /// matrix, on the columns whose evaluation stays inside the truncation.
    pub fn compare(&self, op: &LatticeOperator, oracle_op: &OracleOp) -> Result<f64> {
        let dense = self.dense_matrix(oracle_op)?;
        let embedded = self.embed(op)?;
        let rise = op.max_rise() as u32;
        let mut worst = 0.0f64;
        for (ci, p) in self.points.iter().enumerate() {
            if p.degree() + rise > self.degree {
                continue;
            }
            for t in 0..self.k {
                let col = ci * self.k + t;
                for row in 0..self.dim {
                    let dev = (dense.get(row, col) - embedded.get(row, col)).norm();
                    worst = worst.max(dev);
                }
            }
        }
        Ok(worst)
    }

    /// Isometry from the shell-`n` domain fibers into the ambient basis.
    fn shell_isometry(&self, n: u32) -> CMat {
        let mut cols: Vec<Vec<C64>> = Vec::new();
        for (ci, p) in self.points.iter().enumerate() {
            if p.degree() != n {
                continue;
            }
            match &self.kind {
                ModuleKind::Ambient { .. } => {
                    for t in 0..self.k {
                        let mut col = vec![C64::new(0.0, 0.0); self.dim];
                        col[ci * self.k + t] = C64::new(1.0, 0.0);
                        cols.push(col);
                    }
                }
                ModuleKind::Submodule(s) => {
                    let basis = &s.fiber(p.entries()).basis;
                    for t in 0..basis.cols() {
                        let mut col = vec![C64::new(0.0, 0.0); self.dim];
                        for r in 0..self.k {
                            col[ci * self.k + r] = basis.get(r, t);
                        }
                        cols.push(col);
                    }
                }
                ModuleKind::Quotient(s) => {
                    let basis = &s.fiber(p.entries()).complement;
                    for t in 0..basis.cols() {
                        let mut col = vec![C64::new(0.0, 0.0); self.dim];
                        for r in 0..self.k {
                            col[ci * self.k + r] = basis.get(r, t);
                        }
                        cols.push(col);
                    }
                }
            }
        }
        CMat::from_columns(self.dim, &cols)
    }

    /// Singular values of a dense operator restricted to the shell-`n`
    /// domain subspace, descending.
    pub fn shell_singular_values(&self, op: &OracleOp, n: u32) -> Result<Vec<f64>> {
        let dense = self.dense_matrix(op)?;
        let iso = self.shell_isometry(n);
        if iso.cols() == 0 {
            return Ok(Vec::new());
        }
        Ok(dense.mul(&iso).singular_values())
    }
}
