//! Small dense complex matrices.
//!
//! Everything downstream needs only modest sizes: fiber bases and operator
//! blocks are at most k x k, and the dense oracle stays inside its degree
//! guard. A one-sided Jacobi sweep provides singular values with high
//! relative accuracy, and a Householder QR supplies orthonormal complements.
//! All routines are loop-order deterministic so repeated runs are
//! bit-identical.

use num_complex::Complex64;

pub type C64 = Complex64;

/// Column-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_columns(rows: usize, cols: &[Vec<C64>]) -> Self {
        let mut m = CMat::zeros(rows, cols.len());
        for (c, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            m.data[c * rows..(c + 1) * rows].copy_from_slice(col);
        }
        m
    }

    pub fn scalar(value: C64) -> Self {
        let mut m = CMat::zeros(1, 1);
        m.set(0, 0, value);
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[c * self.rows + r]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[c * self.rows + r] = v;
    }

    pub fn col(&self, c: usize) -> &[C64] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    pub fn col_mut(&mut self, c: usize) -> &mut [C64] {
        &mut self.data[c * self.rows..(c + 1) * self.rows]
    }

    pub fn adjoint(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for c in 0..self.cols {
            for r in 0..self.rows {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = CMat::zeros(self.rows, other.cols);
        // column-major friendly: out[:, j] += other[t, j] * self[:, t]
        for j in 0..other.cols {
            let ocol = other.col(j);
            for (t, &w) in ocol.iter().enumerate() {
                if w.re == 0.0 && w.im == 0.0 {
                    continue;
                }
                let scol = self.col(t);
                let dst = &mut out.data[j * self.rows..(j + 1) * self.rows];
                for (d, s) in dst.iter_mut().zip(scol) {
                    *d += w * s;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for (t, w) in v.iter().enumerate() {
            if w.re == 0.0 && w.im == 0.0 {
                continue;
            }
            for (o, s) in out.iter_mut().zip(self.col(t)) {
                *o += *w * s;
            }
        }
        out
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (d, s) in out.data.iter_mut().zip(&other.data) {
            *d -= s;
        }
        out
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (d, s) in out.data.iter_mut().zip(&other.data) {
            *d += s;
        }
        out
    }

    pub fn scale(&self, s: f64) -> CMat {
        let mut out = self.clone();
        for d in out.data.iter_mut() {
            *d *= s;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    /// Singular values in descending order, via one-sided Jacobi on a copy.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut work = self.clone();
        work.jacobi_orthogonalize();
        let mut sv: Vec<f64> = (0..work.cols)
            .map(|c| work.col(c).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sv
    }

    /// Orthonormal basis of the range: columns with singular value above
    /// `tol`, normalized, in descending singular-value order. The Jacobi
    /// sweep order is fixed, so the result depends only on the input.
    pub fn orthonormal_range(&self, tol: f64) -> CMat {
        let mut work = self.clone();
        work.jacobi_orthogonalize();
        let mut order: Vec<(f64, usize)> = (0..work.cols)
            .map(|c| {
                let n = work.col(c).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                (n, c)
            })
            .collect();
        order.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        let kept: Vec<Vec<C64>> = order
            .iter()
            .filter(|(n, _)| *n > tol)
            .map(|(n, c)| work.col(*c).iter().map(|z| z / *n).collect())
            .collect();
        CMat::from_columns(self.rows, &kept)
    }

    /// In-place one-sided Jacobi: rotates column pairs until all columns are
    /// mutually orthogonal to machine precision.
    fn jacobi_orthogonalize(&mut self) {
        if self.cols < 2 {
            return;
        }
        const EPS: f64 = 1e-15;
        const MAX_SWEEPS: usize = 64;
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..self.cols - 1 {
                for q in p + 1..self.cols {
                    let (mut app, mut aqq) = (0.0f64, 0.0f64);
                    let mut apq = C64::new(0.0, 0.0);
                    for r in 0..self.rows {
                        let xp = self.get(r, p);
                        let xq = self.get(r, q);
                        app += xp.norm_sqr();
                        aqq += xq.norm_sqr();
                        apq += xp.conj() * xq;
                    }
                    let mag = apq.norm();
                    if mag <= EPS * (app * aqq).sqrt() || mag == 0.0 {
                        continue;
                    }
                    rotated = true;
                    let beta = (app - aqq) / (2.0 * mag);
                    let t = if beta >= 0.0 {
                        -1.0 / (beta + (1.0 + beta * beta).sqrt())
                    } else {
                        1.0 / (-beta + (1.0 + beta * beta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    let e = apq / mag;
                    for r in 0..self.rows {
                        let xp = self.get(r, p);
                        let xq = self.get(r, q);
                        self.set(r, p, c * xp - s * e.conj() * xq);
                        self.set(r, q, s * e * xp + c * xq);
                    }
                }
            }
            if !rotated {
                break;
            }
        }
    }

    /// Orthonormal basis of the orthogonal complement of the column span.
    /// `self` is expected to have orthonormal columns (a fiber basis); the
    /// complement is read off the trailing columns of a full Householder Q.
    pub fn orthonormal_complement(&self) -> CMat {
        let k = self.rows;
        let r = self.cols;
        if r == 0 {
            return CMat::identity(k);
        }
        if r >= k {
            return CMat::zeros(k, 0);
        }
        // Householder vectors of the QR of self
        let mut work = self.clone();
        let mut vs: Vec<Vec<C64>> = Vec::with_capacity(r);
        for j in 0..r {
            let mut v: Vec<C64> = (j..k).map(|i| work.get(i, j)).collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                vs.push(Vec::new());
                continue;
            }
            let phase = if v[0].norm() == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                v[0] / v[0].norm()
            };
            v[0] += phase * norm;
            let vnorm2 = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
            // apply H = I - 2 v v^* / |v|^2 to the remaining columns
            for col in j..r {
                let mut dot = C64::new(0.0, 0.0);
                for (t, vt) in v.iter().enumerate() {
                    dot += vt.conj() * work.get(j + t, col);
                }
                let f = 2.0 * dot / vnorm2;
                for (t, vt) in v.iter().enumerate() {
                    let cur = work.get(j + t, col);
                    work.set(j + t, col, cur - f * vt);
                }
            }
            vs.push(v);
        }
        // Q = H_0 H_1 ... H_{r-1}; complement = Q e_r, ..., Q e_{k-1}
        let mut comp = CMat::zeros(k, k - r);
        for (c, col_idx) in (r..k).enumerate() {
            let mut x = vec![C64::new(0.0, 0.0); k];
            x[col_idx] = C64::new(1.0, 0.0);
            for j in (0..r).rev() {
                let v = &vs[j];
                if v.is_empty() {
                    continue;
                }
                let vnorm2 = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
                let mut dot = C64::new(0.0, 0.0);
                for (t, vt) in v.iter().enumerate() {
                    dot += vt.conj() * x[j + t];
                }
                let f = 2.0 * dot / vnorm2;
                for (t, vt) in v.iter().enumerate() {
                    x[j + t] -= f * vt;
                }
            }
            comp.col_mut(c).copy_from_slice(&x);
        }
        comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn singular_values_diagonal() {
        let m = CMat::from_columns(
            3,
            &[
                vec![c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(-4.0, 0.0), c(0.0, 0.0)],
            ],
        );
        let sv = m.singular_values();
        assert!((sv[0] - 4.0).abs() < 1e-14);
        assert!((sv[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn singular_values_complex_rotation() {
        // [[0, i], [1, 0]] is unitary
        let m = CMat::from_columns(
            2,
            &[
                vec![c(0.0, 0.0), c(1.0, 0.0)],
                vec![c(0.0, 1.0), c(0.0, 0.0)],
            ],
        );
        for s in m.singular_values() {
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn frobenius_matches_singular_values() {
        let m = CMat::from_columns(
            3,
            &[
                vec![c(1.0, 2.0), c(0.5, -1.0), c(0.0, 0.25)],
                vec![c(-1.0, 0.0), c(2.0, 2.0), c(1.0, 1.0)],
                vec![c(0.0, 0.0), c(1.0, -3.0), c(2.0, 0.0)],
            ],
        );
        let f2: f64 = m.singular_values().iter().map(|s| s * s).sum();
        assert!((f2 - m.frobenius().powi(2)).abs() < 1e-12 * f2);
    }

    #[test]
    fn range_of_dependent_columns() {
        let v = vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 1.0)];
        let twice: Vec<C64> = v.iter().map(|z| 2.0 * z).collect();
        let m = CMat::from_columns(3, &[v.clone(), twice]);
        let basis = m.orthonormal_range(1e-10);
        assert_eq!(basis.cols(), 1);
        // the basis column is a unit multiple of v
        let n: f64 = basis.col(0).iter().map(|z| z.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complement_is_orthonormal_and_orthogonal() {
        let u = CMat::from_columns(
            3,
            &[vec![
                c(1.0 / 2.0f64.sqrt(), 0.0),
                c(0.0, 1.0 / 2.0f64.sqrt()),
                c(0.0, 0.0),
            ]],
        );
        let w = u.orthonormal_complement();
        assert_eq!(w.cols(), 2);
        let gram = w.adjoint().mul(&w);
        assert!(gram.sub(&CMat::identity(2)).max_abs() < 1e-14);
        let cross = u.adjoint().mul(&w);
        assert!(cross.max_abs() < 1e-14);
        // degenerate ends
        assert_eq!(CMat::zeros(4, 0).orthonormal_complement().cols(), 4);
        assert_eq!(CMat::identity(3).orthonormal_complement().cols(), 0);
    }

    #[test]
    fn matmul_and_adjoint() {
        let a = CMat::from_columns(
            2,
            &[
                vec![c(1.0, 1.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(2.0, -1.0)],
            ],
        );
        let prod = a.adjoint().mul(&a);
        assert!((prod.get(0, 0).re - 2.0).abs() < 1e-15);
        assert!((prod.get(1, 1).re - 5.0).abs() < 1e-15);
        assert!(prod.get(0, 1).norm() < 1e-15);
        let v = a.mul_vec(&[c(1.0, 0.0), c(0.0, 1.0)]);
        assert!((v[0] - c(1.0, 1.0)).norm() < 1e-15);
        assert!((v[1] - c(1.0, 2.0)).norm() < 1e-15);
    }
}
