//! Multi-index combinatorics on the nonnegative integer lattice.
//!
//! Shift-invariant subsets are stored intensionally: a minimal generator
//! antichain plus a membership predicate. Point lists only ever appear one
//! degree shell at a time, so high-degree sweeps never materialize the set.
//! All enumerations are in ascending lexicographic order.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A point of the nonnegative integer lattice in `m` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex {
    entries: Vec<u32>,
}

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex { entries }
    }

    pub fn zeros(m: usize) -> Self {
        MultiIndex {
            entries: vec![0; m],
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// Total degree `|alpha|`.
    pub fn degree(&self) -> u32 {
        self.entries.iter().sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn entry(&self, axis: usize) -> u32 {
        self.entries[axis]
    }

    /// `alpha + e_axis`.
    pub fn succ(&self, axis: usize) -> MultiIndex {
        let mut e = self.entries.clone();
        e[axis] += 1;
        MultiIndex { entries: e }
    }

    /// `alpha - e_axis`, or `None` when the result leaves the lattice.
    pub fn pred(&self, axis: usize) -> Option<MultiIndex> {
        if self.entries[axis] == 0 {
            return None;
        }
        let mut e = self.entries.clone();
        e[axis] -= 1;
        Some(MultiIndex { entries: e })
    }

    /// Componentwise `self <= other`.
    pub fn leq(&self, other: &[u32]) -> bool {
        leq(&self.entries, other)
    }

    /// Remove the coordinate at `axis`, dropping to `m - 1` variables.
    pub fn project(&self, axis: usize) -> MultiIndex {
        let mut e = Vec::with_capacity(self.entries.len() - 1);
        e.extend_from_slice(&self.entries[..axis]);
        e.extend_from_slice(&self.entries[axis + 1..]);
        MultiIndex { entries: e }
    }

    /// Insert a coordinate with value `level` at `axis`, lifting to `m + 1` variables.
    pub fn inject(&self, axis: usize, level: u32) -> MultiIndex {
        let mut e = Vec::with_capacity(self.entries.len() + 1);
        e.extend_from_slice(&self.entries[..axis]);
        e.push(level);
        e.extend_from_slice(&self.entries[axis..]);
        MultiIndex { entries: e }
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(entries: Vec<u32>) -> Self {
        MultiIndex { entries }
    }
}

pub(crate) fn leq(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// A subset of the lattice closed under adding any unit vector, stored via
/// its minimal generator antichain. The empty generator list is the empty
/// set (the zero submodule); the origin alone generates the whole lattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftInvariantSet {
    m: usize,
    generators: Vec<MultiIndex>,
}

impl ShiftInvariantSet {
    /// Smallest shift-invariant superset of `points`: keep the minimal
    /// elements of `points` as the generator antichain.
    pub fn closure(m: usize, points: &[MultiIndex]) -> Result<Self> {
        for p in points {
            if p.dim() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: p.dim(),
                });
            }
        }
        let generators = minimal_antichain(points);
        Ok(ShiftInvariantSet { m, generators })
    }

    /// The empty set over `m` variables.
    pub fn empty(m: usize) -> Self {
        ShiftInvariantSet {
            m,
            generators: Vec::new(),
        }
    }

    /// The whole lattice `A_m`.
    pub fn full(m: usize) -> Self {
        ShiftInvariantSet {
            m,
            generators: vec![MultiIndex::zeros(m)],
        }
    }

    /// The cone `B(alpha)` of all points componentwise above `alpha`.
    pub fn cone(alpha: MultiIndex) -> Self {
        ShiftInvariantSet {
            m: alpha.dim(),
            generators: vec![alpha],
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// The minimal generator antichain, in ascending lexicographic order.
    pub fn generators(&self) -> &[MultiIndex] {
        &self.generators
    }

    pub fn contains(&self, beta: &[u32]) -> bool {
        debug_assert_eq!(beta.len(), self.m);
        self.generators.iter().any(|g| leq(g.entries(), beta))
    }

    /// Componentwise minimum over generators.
    pub fn corner(&self) -> Result<MultiIndex> {
        if self.generators.is_empty() {
            return Err(Error::EmptySetCorner);
        }
        let mut c = self.generators[0].entries().to_vec();
        for g in &self.generators[1..] {
            for (ci, gi) in c.iter_mut().zip(g.entries()) {
                *ci = (*ci).min(*gi);
            }
        }
        Ok(MultiIndex::new(c))
    }

    /// The set difference `B(corner) \ B`, finite or a witness ray.
    ///
    /// Finiteness holds automatically for `m = 2`; for larger `m` it is
    /// decided by a per-axis test: the difference contains the ray
    /// `corner + t*e_i` exactly when no generator matches the corner on
    /// every coordinate other than `i`.
    pub fn cofinite_difference(&self) -> Result<CofiniteDifference> {
        let corner = self.corner()?;
        for axis in 0..self.m {
            let attained = self.generators.iter().any(|g| {
                g.entries()
                    .iter()
                    .zip(corner.entries())
                    .enumerate()
                    .all(|(j, (gj, cj))| j == axis || gj == cj)
            });
            if !attained {
                return Ok(CofiniteDifference::Infinite {
                    ray_base: corner,
                    ray_axis: axis,
                });
            }
        }
        // Bounded: every difference point is dominated by the generator
        // coordinate maxima.
        let mut hi = corner.entries().to_vec();
        for g in &self.generators {
            for (h, gi) in hi.iter_mut().zip(g.entries()) {
                *h = (*h).max(*gi);
            }
        }
        let mut points = Vec::new();
        let mut cur = corner.entries().to_vec();
        loop {
            if !self.contains(&cur) {
                points.push(MultiIndex::new(cur.clone()));
            }
            // odometer over the box [corner, hi]
            let mut axis = self.m;
            loop {
                if axis == 0 {
                    points.sort();
                    return Ok(CofiniteDifference::Finite(points));
                }
                axis -= 1;
                if cur[axis] < hi[axis] {
                    cur[axis] += 1;
                    break;
                }
                cur[axis] = corner.entry(axis);
            }
        }
    }

    /// The bounding box `[corner, beta]` certifying finiteness for `m = 2`:
    /// `beta_i` is the least coordinate for which the opposite face of the
    /// corner meets the set.
    pub fn proof_box_m2(&self) -> Result<(MultiIndex, MultiIndex)> {
        if self.m != 2 {
            return Err(Error::CornerReduceDimension(self.m));
        }
        let corner = self.corner()?;
        let beta1 = self
            .generators
            .iter()
            .filter(|g| g.entry(1) == corner.entry(1))
            .map(|g| g.entry(0))
            .min()
            .expect("corner coordinate attained");
        let beta2 = self
            .generators
            .iter()
            .filter(|g| g.entry(0) == corner.entry(0))
            .map(|g| g.entry(1))
            .min()
            .expect("corner coordinate attained");
        Ok((corner, MultiIndex::new(vec![beta1, beta2])))
    }

    /// Restriction `{alpha in B : alpha_axis = level}` re-indexed over the
    /// remaining `m - 1` variables.
    pub fn slice(&self, axis: usize, level: u32) -> Result<ShiftInvariantSet> {
        if axis >= self.m {
            return Err(Error::AxisOutOfRange { axis, m: self.m });
        }
        let projected: Vec<MultiIndex> = self
            .generators
            .iter()
            .filter(|g| g.entry(axis) <= level)
            .map(|g| g.project(axis))
            .collect();
        ShiftInvariantSet::closure(self.m - 1, &projected)
    }

    /// Members of total degree `n`, ascending lexicographic.
    pub fn shell(&self, n: u32) -> Vec<MultiIndex> {
        DegreeShell::new(self.m, n)
            .filter(|a| self.contains(a.entries()))
            .collect()
    }
}

/// Result of [`ShiftInvariantSet::cofinite_difference`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CofiniteDifference {
    Finite(Vec<MultiIndex>),
    Infinite {
        ray_base: MultiIndex,
        ray_axis: usize,
    },
}

/// Minimal elements of `points` under the componentwise order, deduplicated
/// and sorted lexicographically.
pub fn minimal_antichain(points: &[MultiIndex]) -> Vec<MultiIndex> {
    let mut sorted: Vec<&MultiIndex> = points.iter().collect();
    sorted.sort();
    sorted.dedup();
    let mut out: Vec<MultiIndex> = Vec::new();
    for p in sorted {
        if !out.iter().any(|q| q.leq(p.entries())) {
            out.retain(|q| !p.leq(q.entries()));
            out.push(p.clone());
        }
    }
    out.sort();
    out
}

/// Unique minimal generating antichain of the set generated by a (possibly
/// redundant) list.
pub fn minimal_generators(m: usize, raw: &[MultiIndex]) -> Result<Vec<MultiIndex>> {
    Ok(ShiftInvariantSet::closure(m, raw)?.generators.clone())
}

/// Iterator over all multi-indices of fixed total degree, ascending lex.
pub struct DegreeShell {
    current: Option<Vec<u32>>,
}

impl DegreeShell {
    pub fn new(m: usize, n: u32) -> Self {
        assert!(m >= 1, "dimension must be positive");
        let mut first = vec![0u32; m];
        first[m - 1] = n;
        DegreeShell {
            current: Some(first),
        }
    }
}

impl Iterator for DegreeShell {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        let cur = self.current.take()?;
        let out = MultiIndex::new(cur.clone());
        let m = cur.len();
        // rightmost positive entry moves one slot left; its remainder
        // parks at the end
        let mut t = m;
        for j in (0..m).rev() {
            if cur[j] > 0 {
                t = j;
                break;
            }
        }
        if t == m || t == 0 {
            self.current = None;
        } else {
            let mut next = cur;
            let v = next[t] - 1;
            next[t] = 0;
            next[t - 1] += 1;
            next[m - 1] += v;
            self.current = Some(next);
        }
        Some(out)
    }
}

/// All of shell `n` in `m` variables (count `C(n+m-1, m-1)`).
pub fn shell_all(m: usize, n: u32) -> Vec<MultiIndex> {
    DegreeShell::new(m, n).collect()
}

/// Number of lattice points of degree exactly `n` in `m` variables.
pub fn shell_size(m: usize, n: u32) -> u128 {
    binomial(n as u128 + m as u128 - 1, m as u128 - 1)
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// A multi-slice: finitely many axes pinned to fixed levels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiSlice {
    m: usize,
    /// (axis, level) pairs, strictly increasing in axis.
    fixed: Vec<(usize, u32)>,
}

impl MultiSlice {
    pub fn new(m: usize, mut fixed: Vec<(usize, u32)>) -> Result<Self> {
        fixed.sort_by_key(|&(a, _)| a);
        for w in fixed.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Invalid(format!("axis {} pinned twice", w[0].0)));
            }
        }
        if let Some(&(a, _)) = fixed.iter().find(|&&(a, _)| a >= m) {
            return Err(Error::AxisOutOfRange { axis: a, m });
        }
        Ok(MultiSlice { m, fixed })
    }

    pub fn single(m: usize, axis: usize, level: u32) -> Result<Self> {
        MultiSlice::new(m, vec![(axis, level)])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn fixed(&self) -> &[(usize, u32)] {
        &self.fixed
    }

    /// Number of pinned axes (`[i]` in the multi-slice notation).
    pub fn rank(&self) -> usize {
        self.fixed.len()
    }

    pub fn free_axes(&self) -> Vec<usize> {
        (0..self.m)
            .filter(|a| !self.fixed.iter().any(|&(f, _)| f == *a))
            .collect()
    }

    pub fn contains(&self, alpha: &[u32]) -> bool {
        self.fixed.iter().all(|&(a, l)| alpha[a] == l)
    }
}

/// One coordinate constraint of a [`Cell`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisRange {
    /// The coordinate is pinned to this level.
    Fixed(u32),
    /// The coordinate ranges over `level..`.
    AtLeast(u32),
}

/// A generalized cone: every axis is either pinned or bounded below. This
/// is exactly the shape of the pieces the decomposition produces (cone
/// interiors, faces, slices, tensor factors).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    axes: Vec<AxisRange>,
}

impl Cell {
    pub fn new(axes: Vec<AxisRange>) -> Self {
        Cell { axes }
    }

    /// The full cone above `base`.
    pub fn cone(base: &MultiIndex) -> Self {
        Cell {
            axes: base
                .entries()
                .iter()
                .map(|&v| AxisRange::AtLeast(v))
                .collect(),
        }
    }

    pub fn from_slice(slice: &MultiSlice) -> Self {
        let mut axes = vec![AxisRange::AtLeast(0); slice.m()];
        for &(a, l) in slice.fixed() {
            axes[a] = AxisRange::Fixed(l);
        }
        Cell { axes }
    }

    pub fn m(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[AxisRange] {
        &self.axes
    }

    pub fn contains(&self, alpha: &[u32]) -> bool {
        self.axes.iter().zip(alpha).all(|(r, &v)| match r {
            AxisRange::Fixed(l) => v == *l,
            AxisRange::AtLeast(l) => v >= *l,
        })
    }

    /// Pin one more axis.
    pub fn fix_axis(&self, axis: usize, level: u32) -> Cell {
        let mut axes = self.axes.clone();
        axes[axis] = AxisRange::Fixed(level);
        Cell { axes }
    }

    /// Raise the lower bound of a free axis.
    pub fn with_min(&self, axis: usize, level: u32) -> Cell {
        let mut axes = self.axes.clone();
        axes[axis] = AxisRange::AtLeast(level);
        Cell { axes }
    }

    /// Number of unpinned axes.
    pub fn free_rank(&self) -> usize {
        self.axes
            .iter()
            .filter(|r| matches!(r, AxisRange::AtLeast(_)))
            .count()
    }

    /// Lift a cell over `m - 1` variables back through an axis deletion,
    /// pinning the reinserted axis at `level`.
    pub fn inject(&self, axis: usize, level: u32) -> Cell {
        let mut axes = Vec::with_capacity(self.axes.len() + 1);
        axes.extend_from_slice(&self.axes[..axis]);
        axes.push(AxisRange::Fixed(level));
        axes.extend_from_slice(&self.axes[axis..]);
        Cell { axes }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, r) in self.axes.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match r {
                AxisRange::Fixed(l) => write!(f, "a{} = {}", i + 1, l)?,
                AxisRange::AtLeast(l) => write!(f, "a{} >= {}", i + 1, l)?,
            }
        }
        write!(f, "}}")
    }
}

/// Minimal coordinate subsets whose vanishing kills every monomial in `points`
/// (minimal hitting sets of the exponent supports). Axes are 0-based here.
pub fn common_zero_coordinates(points: &[MultiIndex]) -> Result<Vec<Vec<usize>>> {
    if points.is_empty() {
        return Err(Error::Invalid("empty generating set".into()));
    }
    let m = points[0].dim();
    let mut supports: Vec<u64> = Vec::with_capacity(points.len());
    for p in points {
        if p.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: p.dim(),
            });
        }
        let mut mask = 0u64;
        for (i, &e) in p.entries().iter().enumerate() {
            if e > 0 {
                mask |= 1 << i;
            }
        }
        if mask == 0 {
            return Err(Error::UnitMonomialZeroSet);
        }
        supports.push(mask);
    }
    assert!(m <= 24, "common zero search limited to m <= 24");
    // every proper subset of a mask is numerically smaller, so scanning in
    // value order sees all sub-candidates of a mask before the mask itself
    let mut hitting: Vec<u64> = Vec::new();
    for subset in 1u64..(1 << m) {
        if supports.iter().all(|s| s & subset != 0) && !hitting.iter().any(|h| h & subset == *h) {
            hitting.push(subset);
        }
    }
    let mut out: Vec<Vec<usize>> = hitting
        .iter()
        .map(|&mask| (0..m).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn closure_single_generator_cone() {
        let b = ShiftInvariantSet::closure(2, &[mi(&[2, 3])]).unwrap();
        assert_eq!(b.generators(), &[mi(&[2, 3])]);
        assert!(b.contains(&[2, 3]));
        assert!(!b.contains(&[1, 5]));
    }

    #[test]
    fn closure_maximal_ideal() {
        let b = ShiftInvariantSet::closure(2, &[mi(&[1, 0]), mi(&[0, 1])]).unwrap();
        assert!(!b.contains(&[0, 0]));
        for n in 1..6 {
            for a in shell_all(2, n) {
                assert!(b.contains(a.entries()));
            }
        }
    }

    #[test]
    fn closure_antichain_and_box_complement() {
        let b = ShiftInvariantSet::closure(2, &[mi(&[2, 0]), mi(&[0, 3]), mi(&[1, 1])]).unwrap();
        assert_eq!(b.generators(), &[mi(&[0, 3]), mi(&[1, 1]), mi(&[2, 0])]);
        // brute-force complement of the degree-5 box
        let mut complement = Vec::new();
        for n in 0..=5 {
            for a in shell_all(2, n) {
                if !b.contains(a.entries()) {
                    complement.push(a);
                }
            }
        }
        complement.sort();
        assert_eq!(
            complement,
            vec![mi(&[0, 0]), mi(&[0, 1]), mi(&[0, 2]), mi(&[1, 0])]
        );
    }

    #[test]
    fn minimal_generators_drop_dominated() {
        let gens = minimal_generators(2, &[mi(&[2, 3]), mi(&[3, 3]), mi(&[2, 4])]).unwrap();
        assert_eq!(gens, vec![mi(&[2, 3])]);
        let gens = minimal_generators(2, &[mi(&[1, 0]), mi(&[0, 1]), mi(&[1, 1])]).unwrap();
        assert_eq!(gens, vec![mi(&[0, 1]), mi(&[1, 0])]);
    }

    #[test]
    fn corner_examples() {
        let b = ShiftInvariantSet::closure(2, &[mi(&[2, 0]), mi(&[0, 3])]).unwrap();
        assert_eq!(b.corner().unwrap(), mi(&[0, 0]));
        let b = ShiftInvariantSet::cone(mi(&[2, 3]));
        assert_eq!(b.corner().unwrap(), mi(&[2, 3]));
        let b = ShiftInvariantSet::closure(3, &[mi(&[4, 1, 2]), mi(&[2, 5, 3])]).unwrap();
        assert_eq!(b.corner().unwrap(), mi(&[2, 1, 2]));
        assert_eq!(
            ShiftInvariantSet::empty(2).corner(),
            Err(Error::EmptySetCorner)
        );
    }

    #[test]
    fn cofinite_difference_m2() {
        let b = ShiftInvariantSet::closure(2, &[mi(&[2, 0]), mi(&[0, 3])]).unwrap();
        match b.cofinite_difference().unwrap() {
            CofiniteDifference::Finite(pts) => {
                let mut expect = vec![
                    mi(&[0, 0]),
                    mi(&[1, 0]),
                    mi(&[0, 1]),
                    mi(&[1, 1]),
                    mi(&[0, 2]),
                    mi(&[1, 2]),
                ];
                expect.sort();
                assert_eq!(pts, expect);
                let (lo, hi) = b.proof_box_m2().unwrap();
                assert_eq!(lo, mi(&[0, 0]));
                assert_eq!(hi, mi(&[2, 3]));
                for p in &pts {
                    assert!(lo.leq(p.entries()) && p.leq(hi.entries()));
                }
            }
            other => panic!("expected finite difference, got {other:?}"),
        }
        let b = ShiftInvariantSet::cone(mi(&[2, 3]));
        assert_eq!(
            b.cofinite_difference().unwrap(),
            CofiniteDifference::Finite(vec![])
        );
    }

    #[test]
    fn cofinite_difference_m3_ray() {
        let b = ShiftInvariantSet::closure(3, &[mi(&[1, 0, 0])]).unwrap();
        assert_eq!(
            b.cofinite_difference().unwrap(),
            CofiniteDifference::Finite(vec![])
        );
        let b = ShiftInvariantSet::closure(3, &[mi(&[1, 0, 0]), mi(&[0, 1, 0])]).unwrap();
        assert_eq!(
            b.cofinite_difference().unwrap(),
            CofiniteDifference::Infinite {
                ray_base: mi(&[0, 0, 0]),
                ray_axis: 2
            }
        );
    }

    #[test]
    fn slice_examples() {
        let b = ShiftInvariantSet::cone(mi(&[2, 3]));
        let s = b.slice(0, 2).unwrap();
        assert_eq!(s.generators(), &[mi(&[3])]);
        let s = b.slice(0, 1).unwrap();
        assert!(s.is_empty());

        let b = ShiftInvariantSet::closure(2, &[mi(&[2, 0]), mi(&[0, 3])]).unwrap();
        let s = b.slice(0, 0).unwrap();
        assert_eq!(s.generators(), &[mi(&[3])]);

        let full = ShiftInvariantSet::full(2);
        let s = full.slice(0, 7).unwrap();
        assert_eq!(s, ShiftInvariantSet::full(1));
    }

    #[test]
    fn slices_grow_along_the_axis() {
        let b = ShiftInvariantSet::closure(2, &[mi(&[2, 0]), mi(&[0, 3])]).unwrap();
        for k in 0..6 {
            let lo = b.slice(0, k).unwrap();
            let hi = b.slice(0, k + 1).unwrap();
            for n in 0..12 {
                for a in shell_all(1, n) {
                    if lo.contains(a.entries()) {
                        assert!(hi.contains(a.entries()));
                    }
                }
            }
        }
    }

    #[test]
    fn shell_enumeration_lex() {
        let s = shell_all(2, 3);
        assert_eq!(s, vec![mi(&[0, 3]), mi(&[1, 2]), mi(&[2, 1]), mi(&[3, 0])]);
        assert_eq!(shell_all(3, 2).len(), 6);
        assert_eq!(shell_size(3, 2), 6);
        let b = ShiftInvariantSet::cone(mi(&[1, 1]));
        assert_eq!(b.shell(3), vec![mi(&[1, 2]), mi(&[2, 1])]);
    }

    #[test]
    fn shell_counts_match_stars_and_bars() {
        for m in 1..=4usize {
            for n in 0..=9u32 {
                assert_eq!(shell_all(m, n).len() as u128, shell_size(m, n));
            }
        }
    }

    #[test]
    fn common_zero_examples() {
        let z = common_zero_coordinates(&[mi(&[2, 3])]).unwrap();
        assert_eq!(z, vec![vec![0], vec![1]]);
        let z = common_zero_coordinates(&[mi(&[1, 0]), mi(&[0, 1])]).unwrap();
        assert_eq!(z, vec![vec![0, 1]]);
        let z = common_zero_coordinates(&[mi(&[1, 1, 0]), mi(&[0, 1, 1]), mi(&[1, 0, 1])]).unwrap();
        assert_eq!(z, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(
            common_zero_coordinates(&[mi(&[0, 0])]),
            Err(Error::UnitMonomialZeroSet)
        );
    }

    #[test]
    fn cell_membership() {
        // face {a1 = 2, a2 >= 3}
        let cell = Cell::new(vec![AxisRange::Fixed(2), AxisRange::AtLeast(3)]);
        assert!(cell.contains(&[2, 3]));
        assert!(cell.contains(&[2, 9]));
        assert!(!cell.contains(&[3, 3]));
        assert_eq!(cell.free_rank(), 1);
        let lifted = Cell::new(vec![AxisRange::AtLeast(1)]).inject(0, 5);
        assert!(lifted.contains(&[5, 1]));
        assert!(!lifted.contains(&[4, 1]));
    }
}
