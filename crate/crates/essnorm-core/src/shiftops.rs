//! Lattice-coefficient realizations of the coordinate shifts and the
//! operators built from them.
//!
//! In the normalized basis `e_alpha = Z^alpha / lambda_alpha` every operator
//! handled here is displacement-homogeneous: it carries a fixed lattice
//! displacement and a per-point coefficient block mapping the fiber at
//! `beta` to the fiber at `beta + delta`. Shifts, adjoints, compositions,
//! differences, edge Grams and reducing-subspace restrictions stay in this
//! class, so commutators are evaluated pointwise and exactly, with no
//! truncation. Off-domain blocks are implicit zeros and are never stored.
//!
//! The paper-side objects live here as follows: the ambient shifts, their
//! restrictions to a monomial submodule (well-defined by fiber nesting), the
//! compressions to the quotient, self- and cross-commutators, edge
//! operators, and the two-by-two block identity of the submodule/quotient
//! decomposition.

use crate::error::{Error, Result};
use crate::lattice::{Cell, MultiIndex, MultiSlice, ShiftInvariantSet};
use crate::linalg::{CMat, C64};
use crate::submodule::VectorSubmodule;
use crate::weights::WeightSet;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Which Hilbert module an operator acts on.
#[derive(Debug, Clone)]
pub enum ModuleKind {
    /// The full module tensored with `C^k` (`k = 1` is the scalar module).
    Ambient { k: usize },
    /// A monomial submodule, fibers included.
    Submodule(Arc<VectorSubmodule>),
    /// The orthogonal complement of a monomial submodule.
    Quotient(Arc<VectorSubmodule>),
}

/// Weight set plus module: everything a coefficient field closes over.
#[derive(Debug, Clone)]
pub struct Domain {
    weights: Arc<WeightSet>,
    kind: ModuleKind,
}

impl Domain {
    pub fn ambient(weights: Arc<WeightSet>, k: usize) -> Arc<Domain> {
        Arc::new(Domain {
            weights,
            kind: ModuleKind::Ambient { k },
        })
    }

    pub fn scalar(weights: Arc<WeightSet>) -> Arc<Domain> {
        Domain::ambient(weights, 1)
    }

    pub fn submodule(weights: Arc<WeightSet>, s: Arc<VectorSubmodule>) -> Arc<Domain> {
        Arc::new(Domain {
            weights,
            kind: ModuleKind::Submodule(s),
        })
    }

    pub fn quotient(weights: Arc<WeightSet>, s: Arc<VectorSubmodule>) -> Arc<Domain> {
        Arc::new(Domain {
            weights,
            kind: ModuleKind::Quotient(s),
        })
    }

    pub fn from_kind(weights: Arc<WeightSet>, kind: ModuleKind) -> Arc<Domain> {
        Arc::new(Domain { weights, kind })
    }

    pub fn weights(&self) -> &Arc<WeightSet> {
        &self.weights
    }

    pub fn kind(&self) -> &ModuleKind {
        &self.kind
    }

    pub fn m(&self) -> usize {
        self.weights.m()
    }

    pub fn multiplicity(&self) -> usize {
        match &self.kind {
            ModuleKind::Ambient { k } => *k,
            ModuleKind::Submodule(s) | ModuleKind::Quotient(s) => s.k(),
        }
    }

    /// Dimension of the fiber the module attaches to `beta`.
    pub fn fiber_dim(&self, beta: &[u32]) -> usize {
        match &self.kind {
            ModuleKind::Ambient { k } => *k,
            ModuleKind::Submodule(s) => s.fiber_dim(beta),
            ModuleKind::Quotient(s) => s.quotient_dim(beta),
        }
    }

    /// Matrix of the axis shift from the fiber at `beta` to the fiber at
    /// `beta + e_axis`, weight included. `None` is the zero block.
    fn shift_coefficient(&self, axis: usize, beta: &[u32]) -> Result<Option<CMat>> {
        let w = self.weights.ratio(axis, beta)?;
        let mut up = beta.to_vec();
        up[axis] += 1;
        Ok(match &self.kind {
            ModuleKind::Ambient { k } => {
                let mut block = CMat::zeros(*k, *k);
                for t in 0..*k {
                    block.set(t, t, C64::new(w, 0.0));
                }
                Some(block)
            }
            ModuleKind::Submodule(s) => {
                let fin = s.fiber(beta);
                if fin.dim() == 0 {
                    return Ok(None);
                }
                let fout = s.fiber(&up);
                Some(fout.basis.adjoint().mul(&fin.basis).scale(w))
            }
            ModuleKind::Quotient(s) => {
                let fin = s.fiber(beta);
                if fin.quotient_dim() == 0 {
                    return Ok(None);
                }
                let fout = s.fiber(&up);
                if fout.quotient_dim() == 0 {
                    return Ok(None);
                }
                Some(fout.complement.adjoint().mul(&fin.complement).scale(w))
            }
        })
    }
}

#[derive(Debug, Clone)]
enum Expr {
    Shift(usize),
    Adjoint(Box<Expr>),
    /// apply the second operand first
    Compose(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    /// diagonal `w_axis(beta)^2` Gram of the edge map on a region
    EdgeGram {
        axis: usize,
        region: Cell,
    },
    /// compression to a region: both endpoints masked, the inside untouched
    Restrict {
        inner: Box<Expr>,
        region: Cell,
    },
}

impl Expr {
    fn displacement(&self, m: usize) -> Vec<i64> {
        match self {
            Expr::Shift(axis) => {
                let mut d = vec![0i64; m];
                d[*axis] = 1;
                d
            }
            Expr::Adjoint(e) => e.displacement(m).iter().map(|x| -x).collect(),
            Expr::Compose(a, b) => {
                let da = a.displacement(m);
                let db = b.displacement(m);
                da.iter().zip(&db).map(|(x, y)| x + y).collect()
            }
            Expr::Sub(a, _) => a.displacement(m),
            Expr::EdgeGram { .. } => vec![0i64; m],
            Expr::Restrict { inner, .. } => inner.displacement(m),
        }
    }

    /// (highest intermediate degree above the input, net degree change)
    fn rise(&self) -> (i64, i64) {
        match self {
            Expr::Shift(_) => (1, 1),
            Expr::EdgeGram { .. } => (1, 0),
            Expr::Adjoint(e) => {
                let (r, n) = e.rise();
                (r - n, -n)
            }
            Expr::Compose(a, b) => {
                let (ra, na) = a.rise();
                let (rb, nb) = b.rise();
                ((nb + ra).max(rb), na + nb)
            }
            Expr::Sub(a, b) => {
                let (ra, na) = a.rise();
                let (rb, _) = b.rise();
                (ra.max(rb), na)
            }
            Expr::Restrict { inner, .. } => inner.rise(),
        }
    }
}

fn offset(beta: &[u32], delta: &[i64]) -> Option<Vec<u32>> {
    let mut out = Vec::with_capacity(beta.len());
    for (b, d) in beta.iter().zip(delta) {
        let v = *b as i64 + d;
        if v < 0 {
            return None;
        }
        out.push(v as u32);
    }
    Some(out)
}

/// An operator with a fixed lattice displacement and per-point coefficient
/// blocks, acting on the module its domain names.
#[derive(Debug, Clone)]
pub struct LatticeOperator {
    domain: Arc<Domain>,
    expr: Expr,
    displacement: Vec<i64>,
}

impl LatticeOperator {
    fn from_expr(domain: Arc<Domain>, expr: Expr) -> LatticeOperator {
        let displacement = expr.displacement(domain.m());
        LatticeOperator {
            domain,
            expr,
            displacement,
        }
    }

    /// Module multiplication by the axis coordinate.
    pub fn shift(domain: &Arc<Domain>, axis: usize) -> Result<LatticeOperator> {
        if axis >= domain.m() {
            return Err(Error::AxisOutOfRange {
                axis,
                m: domain.m(),
            });
        }
        Ok(LatticeOperator::from_expr(
            Arc::clone(domain),
            Expr::Shift(axis),
        ))
    }

    pub fn adjoint(&self) -> LatticeOperator {
        LatticeOperator::from_expr(
            Arc::clone(&self.domain),
            Expr::Adjoint(Box::new(self.expr.clone())),
        )
    }

    /// `self` applied after `rhs`.
    pub fn compose(&self, rhs: &LatticeOperator) -> Result<LatticeOperator> {
        self.check_same_domain(rhs)?;
        Ok(LatticeOperator::from_expr(
            Arc::clone(&self.domain),
            Expr::Compose(Box::new(self.expr.clone()), Box::new(rhs.expr.clone())),
        ))
    }

    pub fn sub(&self, rhs: &LatticeOperator) -> Result<LatticeOperator> {
        self.check_same_domain(rhs)?;
        if self.displacement != rhs.displacement {
            return Err(Error::Invalid(
                "cannot subtract operators with different displacements".into(),
            ));
        }
        Ok(LatticeOperator::from_expr(
            Arc::clone(&self.domain),
            Expr::Sub(Box::new(self.expr.clone()), Box::new(rhs.expr.clone())),
        ))
    }

    /// Compression `P op P` to a reducing region: endpoint masking only.
    pub fn restricted(&self, region: Cell) -> LatticeOperator {
        LatticeOperator::from_expr(
            Arc::clone(&self.domain),
            Expr::Restrict {
                inner: Box::new(self.expr.clone()),
                region,
            },
        )
    }

    /// `[op*, op]`; defined for operators with a single-step displacement.
    pub fn self_commutator(&self) -> Result<LatticeOperator> {
        let ones: i64 = self.displacement.iter().map(|d| d.abs()).sum();
        if ones != 1 || self.displacement.iter().sum::<i64>() != 1 {
            return Err(Error::NonUnitDisplacement);
        }
        let adj = self.adjoint();
        adj.compose(self)?.sub(&self.compose(&adj)?)
    }

    fn check_same_domain(&self, rhs: &LatticeOperator) -> Result<()> {
        if Arc::ptr_eq(&self.domain, &rhs.domain) {
            Ok(())
        } else {
            Err(Error::Invalid(
                "operator algebra requires a shared domain".into(),
            ))
        }
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn displacement(&self) -> &[i64] {
        &self.displacement
    }

    /// Highest intermediate degree (relative to the input degree) the
    /// evaluation routes through; dense truncations are exact on columns
    /// whose degree plus this stays inside the cap.
    pub fn max_rise(&self) -> i64 {
        self.expr.rise().0.max(0)
    }

    /// Fiber dimension the operator accepts at `beta` (0 off-domain).
    pub fn input_dim(&self, beta: &[u32]) -> usize {
        fn dim(expr: &Expr, domain: &Domain, beta: &[u32]) -> usize {
            match expr {
                Expr::EdgeGram { region, .. } | Expr::Restrict { region, .. }
                    if !region.contains(beta) =>
                {
                    0
                }
                Expr::Restrict { inner, .. } => dim(inner, domain, beta),
                _ => domain.fiber_dim(beta),
            }
        }
        dim(&self.expr, &self.domain, beta)
    }

    /// The coefficient block at `beta`, mapping the fiber at `beta` to the
    /// fiber at `beta + displacement`. `None` is the zero block.
    pub fn coefficient(&self, beta: &[u32]) -> Result<Option<CMat>> {
        eval(&self.expr, &self.domain, beta)
    }

    /// Coefficient of the adjoint at `beta`: the conjugate transpose of the
    /// incoming block, zero off-domain.
    pub fn adjoint_coefficient(&self, beta: &[u32]) -> Result<Option<CMat>> {
        self.adjoint().coefficient(beta)
    }

    /// Exact application to a finitely supported vector in fiber
    /// coordinates.
    pub fn apply(&self, v: &[(MultiIndex, Vec<C64>)]) -> Result<Vec<(MultiIndex, Vec<C64>)>> {
        let mut out: BTreeMap<MultiIndex, Vec<C64>> = BTreeMap::new();
        for (beta, coords) in v {
            let expect = self.input_dim(beta.entries());
            if coords.len() != expect {
                return Err(Error::DimensionMismatch {
                    expected: expect,
                    got: coords.len(),
                });
            }
            let Some(block) = self.coefficient(beta.entries())? else {
                continue;
            };
            let image = block.mul_vec(coords);
            let target = offset(beta.entries(), &self.displacement)
                .expect("coefficient exists only when the target is on the lattice");
            let entry = out
                .entry(MultiIndex::new(target))
                .or_insert_with(|| vec![C64::new(0.0, 0.0); image.len()]);
            for (e, x) in entry.iter_mut().zip(&image) {
                *e += x;
            }
        }
        Ok(out.into_iter().collect())
    }
}

fn eval(expr: &Expr, domain: &Domain, beta: &[u32]) -> Result<Option<CMat>> {
    match expr {
        Expr::Shift(axis) => domain.shift_coefficient(*axis, beta),
        Expr::Adjoint(inner) => {
            let delta = inner.displacement(domain.m());
            let Some(src) = offset(beta, &delta.iter().map(|d| -d).collect::<Vec<_>>()) else {
                return Ok(None);
            };
            Ok(eval(inner, domain, &src)?.map(|c| c.adjoint()))
        }
        Expr::Compose(a, b) => {
            let Some(cb) = eval(b, domain, beta)? else {
                return Ok(None);
            };
            let db = b.displacement(domain.m());
            let mid = offset(beta, &db).expect("inner block lands on the lattice");
            let Some(ca) = eval(a, domain, &mid)? else {
                return Ok(None);
            };
            Ok(Some(ca.mul(&cb)))
        }
        Expr::Sub(a, b) => {
            let ca = eval(a, domain, beta)?;
            let cb = eval(b, domain, beta)?;
            Ok(match (ca, cb) {
                (None, None) => None,
                (Some(x), None) => Some(x),
                (None, Some(y)) => Some(y.scale(-1.0)),
                (Some(x), Some(y)) => Some(x.sub(&y)),
            })
        }
        Expr::EdgeGram { axis, region } => {
            if !region.contains(beta) {
                return Ok(None);
            }
            let d = domain.fiber_dim(beta);
            if d == 0 {
                return Ok(None);
            }
            let w = domain.weights.ratio(*axis, beta)?;
            let mut block = CMat::zeros(d, d);
            for t in 0..d {
                block.set(t, t, C64::new(w * w, 0.0));
            }
            Ok(Some(block))
        }
        Expr::Restrict { inner, region } => {
            if !region.contains(beta) {
                return Ok(None);
            }
            let delta = inner.displacement(domain.m());
            let Some(target) = offset(beta, &delta) else {
                return Ok(None);
            };
            if !region.contains(&target) {
                return Ok(None);
            }
            eval(inner, domain, beta)
        }
    }
}

/// The coordinate shift `Z_axis` (or its restriction / compression).
pub fn shift_op(domain: &Arc<Domain>, axis: usize) -> Result<LatticeOperator> {
    LatticeOperator::shift(domain, axis)
}

/// `[Z_axis*, Z_axis]` on the domain module.
pub fn self_commutator(domain: &Arc<Domain>, axis: usize) -> Result<LatticeOperator> {
    LatticeOperator::shift(domain, axis)?.self_commutator()
}

/// `[Z_i*, Z_j]` on the domain module, displacement `e_j - e_i`. `i = j`
/// is the self-commutator.
pub fn cross_commutator(domain: &Arc<Domain>, i: usize, j: usize) -> Result<LatticeOperator> {
    if i == j {
        return self_commutator(domain, i);
    }
    let zi = LatticeOperator::shift(domain, i)?;
    let zj = LatticeOperator::shift(domain, j)?;
    let adj = zi.adjoint();
    adj.compose(&zj)?.sub(&zj.compose(&adj)?)
}

/// The Gram `X_axis* X_axis` of the edge map defined by `Z_axis` on the
/// monomials inside `region`: diagonal with entries `w_axis(beta)^2`.
pub fn edge_gram(domain: &Arc<Domain>, axis: usize, region: Cell) -> Result<LatticeOperator> {
    if axis >= domain.m() {
        return Err(Error::AxisOutOfRange {
            axis,
            m: domain.m(),
        });
    }
    if region.m() != domain.m() {
        return Err(Error::DimensionMismatch {
            expected: domain.m(),
            got: region.m(),
        });
    }
    Ok(LatticeOperator::from_expr(
        Arc::clone(domain),
        Expr::EdgeGram { axis, region },
    ))
}

/// Edge Gram on a (multi-)slice.
pub fn edge_gram_on_slice(
    domain: &Arc<Domain>,
    axis: usize,
    slice: &MultiSlice,
) -> Result<LatticeOperator> {
    edge_gram(domain, axis, Cell::from_slice(slice))
}

/// Dense two-by-two split of a truncated shift along the decomposition
/// `module = submodule + complement`, with the block-identity residues.
#[derive(Debug)]
pub struct BlockSplit {
    pub degree: u32,
    pub axis: usize,
    /// the shift restricted to the submodule rows and columns
    pub a: CMat,
    /// the corner block (submodule rows, complement columns)
    pub b: CMat,
    /// the quotient compression
    pub d: CMat,
    /// largest entry of the lower-left block; invariance makes it zero
    pub c_max_abs: f64,
    /// deviation of the submodule-corner commutator identity on the
    /// degree-(N-1) sub-box
    pub residue_submodule: f64,
    /// deviation of the quotient-corner commutator identity on the same box
    pub residue_quotient: f64,
}

/// Materialize the truncated `Z_axis` in the splitting induced by a scalar
/// monomial submodule and check the two commutator block identities.
pub fn block_split(
    weights: &Arc<WeightSet>,
    axis: usize,
    set: &ShiftInvariantSet,
    degree: u32,
) -> Result<BlockSplit> {
    if degree < 2 {
        return Err(Error::TruncationTooSmall(degree));
    }
    let m = weights.m();
    if set.m() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: set.m(),
        });
    }
    if axis >= m {
        return Err(Error::AxisOutOfRange { axis, m });
    }
    let mut points: Vec<MultiIndex> = Vec::new();
    for n in 0..=degree {
        points.extend(crate::lattice::DegreeShell::new(m, n));
    }
    let index: std::collections::HashMap<Vec<u32>, usize> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.entries().to_vec(), i))
        .collect();
    let dim = points.len();
    let mut t = CMat::zeros(dim, dim);
    for (c, p) in points.iter().enumerate() {
        if p.degree() < degree {
            let up = p.succ(axis);
            let r = index[up.entries()];
            t.set(r, c, C64::new(weights.ratio(axis, p.entries())?, 0.0));
        }
    }
    let sub_idx: Vec<usize> = (0..dim)
        .filter(|&i| set.contains(points[i].entries()))
        .collect();
    let perp_idx: Vec<usize> = (0..dim)
        .filter(|&i| !set.contains(points[i].entries()))
        .collect();
    let a = submatrix(&t, &sub_idx, &sub_idx);
    let b = submatrix(&t, &sub_idx, &perp_idx);
    let c = submatrix(&t, &perp_idx, &sub_idx);
    let d = submatrix(&t, &perp_idx, &perp_idx);

    let comm = commutator_dense(&t);
    let lhs11 = submatrix(&comm, &sub_idx, &sub_idx);
    let rhs11 = commutator_dense(&a).sub(&b.mul(&b.adjoint()));
    let lhs22 = submatrix(&comm, &perp_idx, &perp_idx);
    let rhs22 = commutator_dense(&d).add(&b.adjoint().mul(&b));

    let safe = |idx: &[usize]| -> Vec<usize> {
        idx.iter()
            .enumerate()
            .filter(|(_, &p)| points[p].degree() < degree)
            .map(|(local, _)| local)
            .collect()
    };
    let sub_safe = safe(&sub_idx);
    let perp_safe = safe(&perp_idx);
    let residue_submodule = masked_max_abs(&lhs11.sub(&rhs11), &sub_safe);
    let residue_quotient = masked_max_abs(&lhs22.sub(&rhs22), &perp_safe);

    Ok(BlockSplit {
        degree,
        axis,
        a,
        b,
        d,
        c_max_abs: c.max_abs(),
        residue_submodule,
        residue_quotient,
    })
}

fn commutator_dense(t: &CMat) -> CMat {
    let adj = t.adjoint();
    adj.mul(t).sub(&t.mul(&adj))
}

fn submatrix(mat: &CMat, rows: &[usize], cols: &[usize]) -> CMat {
    let mut out = CMat::zeros(rows.len(), cols.len());
    for (cc, &c) in cols.iter().enumerate() {
        for (rr, &r) in rows.iter().enumerate() {
            out.set(rr, cc, mat.get(r, c));
        }
    }
    out
}

fn masked_max_abs(mat: &CMat, keep: &[usize]) -> f64 {
    let mut best = 0.0f64;
    for &c in keep {
        for &r in keep {
            best = best.max(mat.get(r, c).norm());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn scalar_at(op: &LatticeOperator, beta: &[u32]) -> f64 {
        match op.coefficient(beta).unwrap() {
            Some(c) => {
                assert_eq!((c.rows(), c.cols()), (1, 1));
                assert!(c.get(0, 0).im == 0.0);
                c.get(0, 0).re
            }
            None => 0.0,
        }
    }

    fn drury2() -> Arc<Domain> {
        Domain::scalar(Arc::new(WeightSet::drury_arveson(2)))
    }

    #[test]
    fn ambient_shift_basics() {
        let d = drury2();
        let z1 = shift_op(&d, 0).unwrap();
        assert_eq!(z1.displacement(), &[1, 0]);
        assert_eq!(scalar_at(&z1, &[0, 0]), 1.0);
        let applied = z1
            .apply(&[(mi(&[0, 0]), vec![C64::new(1.0, 0.0)])])
            .unwrap();
        assert_eq!(applied.len(), 1);
        assert_eq!(applied[0].0, mi(&[1, 0]));
        assert!((applied[0].1[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn restriction_masks_outside_the_set() {
        let b = ShiftInvariantSet::cone(mi(&[1, 0]));
        let s = Arc::new(VectorSubmodule::scalar(&b));
        let d = Domain::submodule(Arc::new(WeightSet::drury_arveson(2)), s);
        let y1 = shift_op(&d, 0).unwrap();
        assert_eq!(y1.coefficient(&[0, 0]).unwrap(), None);
        assert!(scalar_at(&y1, &[1, 0]) > 0.0);
    }

    #[test]
    fn quotient_compression_of_rank_one_origin_generator() {
        let s = Arc::new(
            VectorSubmodule::new(
                2,
                2,
                vec![(mi(&[0, 0]), vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)])],
            )
            .unwrap(),
        );
        let w = Arc::new(WeightSet::drury_arveson(2));
        let d = Domain::quotient(Arc::clone(&w), s);
        let n1 = shift_op(&d, 0).unwrap();
        for beta in [[0u32, 0], [2, 1], [0, 4]] {
            let block = n1.coefficient(&beta).unwrap().unwrap();
            assert_eq!((block.rows(), block.cols()), (1, 1));
            let expect = w.ratio(0, &beta).unwrap();
            assert!((block.get(0, 0).norm() - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn adjoint_coefficients() {
        let uw1 = Domain::scalar(Arc::new(WeightSet::unweighted(1)));
        let z = shift_op(&uw1, 0).unwrap();
        assert_eq!(z.adjoint_coefficient(&[0]).unwrap(), None);

        let d = drury2();
        let z1 = shift_op(&d, 0).unwrap();
        let a = z1.adjoint().coefficient(&[1, 1]).unwrap().unwrap();
        assert!((a.get(0, 0).re - (0.5f64).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn self_commutator_values() {
        let uw1 = Domain::scalar(Arc::new(WeightSet::unweighted(1)));
        let c = self_commutator(&uw1, 0).unwrap();
        assert_eq!(scalar_at(&c, &[0]), 1.0);
        for n in 1..6 {
            assert_eq!(scalar_at(&c, &[n]), 0.0);
        }

        let d = drury2();
        let c = self_commutator(&d, 0).unwrap();
        assert!((scalar_at(&c, &[1, 1]) - 1.0 / 6.0).abs() < 1e-14);

        let b = ShiftInvariantSet::cone(mi(&[1, 0]));
        let s = Arc::new(VectorSubmodule::scalar(&b));
        let ds = Domain::submodule(Arc::new(WeightSet::drury_arveson(2)), s);
        let cy = self_commutator(&ds, 0).unwrap();
        // predecessors (0,0) and (0,1) lie outside B, so only the positive
        // term w_1(beta)^2 remains at (1,0) and (1,1)
        assert!((scalar_at(&cy, &[1, 0]) - 1.0).abs() < 1e-14);
        assert!((scalar_at(&cy, &[1, 1]) - 2.0 / 3.0).abs() < 1e-14);
        // interior point: both terms present, matching the ambient value
        let amb = self_commutator(&drury2(), 0).unwrap();
        assert!((scalar_at(&cy, &[2, 1]) - scalar_at(&amb, &[2, 1])).abs() < 1e-14);
    }

    #[test]
    fn cross_commutator_values() {
        let d = drury2();
        let c = cross_commutator(&d, 0, 1).unwrap();
        assert_eq!(c.displacement(), &[-1, 1]);
        assert!((scalar_at(&c, &[1, 0]) + 0.5).abs() < 1e-14);
        // boundary: alpha_i = 0 sends the point off the lattice
        assert_eq!(c.coefficient(&[0, 3]).unwrap(), None);

        let uw = Domain::scalar(Arc::new(WeightSet::unweighted(2)));
        let c = cross_commutator(&uw, 0, 1).unwrap();
        assert_eq!(scalar_at(&c, &[1, 1]), 0.0);
    }

    #[test]
    fn edge_gram_diagonals() {
        let d = drury2();
        let slice = MultiSlice::single(2, 0, 0).unwrap();
        let g = edge_gram_on_slice(&d, 0, &slice).unwrap();
        for n in 0..30u32 {
            let got = scalar_at(&g, &[0, n]);
            assert!((got - 1.0 / (n as f64 + 1.0)).abs() < 1e-14);
        }
        assert_eq!(g.coefficient(&[1, 2]).unwrap(), None);

        let uw = Domain::scalar(Arc::new(WeightSet::unweighted(2)));
        let g = edge_gram_on_slice(&uw, 0, &slice).unwrap();
        assert_eq!(scalar_at(&g, &[0, 17]), 1.0);

        let d3 = Domain::scalar(Arc::new(WeightSet::drury_arveson(3)));
        let ms = MultiSlice::new(3, vec![(0, 0), (1, 0)]).unwrap();
        let g = edge_gram_on_slice(&d3, 0, &ms).unwrap();
        for n in 0..20u32 {
            assert!((scalar_at(&g, &[0, 0, n]) - 1.0 / (n as f64 + 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn shifts_commute_on_random_vectors() {
        for w in [
            WeightSet::drury_arveson(2),
            WeightSet::paper_literal(2),
            WeightSet::hardy_ball_like(2),
            WeightSet::bergman_ball_like(2),
        ] {
            let d = Domain::scalar(Arc::new(w));
            let z1 = shift_op(&d, 0).unwrap();
            let z2 = shift_op(&d, 1).unwrap();
            // a fixed 20-term vector with varied magnitudes
            let v: Vec<(MultiIndex, Vec<C64>)> = (0..20u32)
                .map(|t| {
                    let beta = mi(&[t % 5, (t * 7) % 4]);
                    (beta, vec![C64::new(1.0 / (t as f64 + 1.0), 0.1 * t as f64)])
                })
                .collect();
            // deduplicate support
            let v: Vec<_> = {
                let mut map = BTreeMap::new();
                for (b, x) in v {
                    map.entry(b).or_insert(x);
                }
                map.into_iter().collect()
            };
            let a = z1.apply(&z2.apply(&v).unwrap()).unwrap();
            let b = z2.apply(&z1.apply(&v).unwrap()).unwrap();
            assert_eq!(a.len(), b.len());
            for ((pa, xa), (pb, xb)) in a.iter().zip(&b) {
                assert_eq!(pa, pb);
                for (u, w) in xa.iter().zip(xb) {
                    assert!((u - w).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn submodule_invariance_under_apply() {
        let b = ShiftInvariantSet::closure(2, &[mi(&[2, 0]), mi(&[0, 3])]).unwrap();
        let s = Arc::new(VectorSubmodule::scalar(&b));
        let d = Domain::submodule(Arc::new(WeightSet::drury_arveson(2)), s);
        let y2 = shift_op(&d, 1).unwrap();
        let v = vec![
            (mi(&[2, 0]), vec![C64::new(1.0, 0.0)]),
            (mi(&[0, 3]), vec![C64::new(0.0, 1.0)]),
        ];
        for (p, _) in y2.apply(&v).unwrap() {
            assert!(b.contains(p.entries()));
        }
    }

    #[test]
    fn restricted_masks_both_endpoints() {
        let d = drury2();
        let c = cross_commutator(&d, 0, 1).unwrap();
        // region {a1 >= 1, a2 = 0}: the displacement (-1, +1) always leaves it
        let region = Cell::new(vec![
            crate::lattice::AxisRange::AtLeast(1),
            crate::lattice::AxisRange::Fixed(0),
        ]);
        let r = c.restricted(region);
        assert_eq!(r.coefficient(&[2, 0]).unwrap(), None);
        // a shift-invariant region keeps interior values
        let cone = Cell::cone(&mi(&[1, 0]));
        let r = c.restricted(cone);
        assert!((scalar_at(&r, &[2, 1]) - scalar_at(&c, &[2, 1])).abs() < 1e-15);
        assert_eq!(r.coefficient(&[1, 0]).unwrap(), None); // target (0,1) leaves the cone
    }

    #[test]
    fn block_split_identity_holds() {
        let w = Arc::new(WeightSet::drury_arveson(2));
        let b = ShiftInvariantSet::cone(mi(&[1, 1]));
        for axis in 0..2 {
            let split = block_split(&w, axis, &b, 10).unwrap();
            assert_eq!(split.c_max_abs, 0.0);
            assert!(split.residue_submodule <= 1e-12);
            assert!(split.residue_quotient <= 1e-12);
        }
        let b = ShiftInvariantSet::closure(2, &[mi(&[2, 0]), mi(&[0, 3])]).unwrap();
        for degree in [12, 14] {
            let split = block_split(&w, 0, &b, degree).unwrap();
            assert_eq!(split.c_max_abs, 0.0);
            assert!(split.residue_submodule <= 1e-12);
            assert!(split.residue_quotient <= 1e-12);
        }
        assert!(matches!(
            block_split(&w, 0, &b, 1),
            Err(Error::TruncationTooSmall(1))
        ));
    }

    #[test]
    fn self_commutator_requires_unit_displacement() {
        let d = drury2();
        let c = cross_commutator(&d, 0, 1).unwrap();
        assert!(matches!(
            c.self_commutator(),
            Err(Error::NonUnitDisplacement)
        ));
    }
}
