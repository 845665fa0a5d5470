//! Proof-driven decomposition of a monomial submodule into orthogonal
//! pieces, each labeled with the mechanism that controls its commutators.
//!
//! The reduction levels one axis at a time: generators below the axis
//! maximum split off as slices (handled by induction in one fewer
//! variable with the restricted weight set), the rest are raised to the
//! maximum and the recursion continues. Once every axis but the last is
//! constant, a scalar module is a single cone analyzed per axis into an
//! interior piece (the ambient commutator restricted there) and a face
//! (an edge-operator Gram when the face sits at a positive level, the
//! ambient restriction when it sits at level zero). With multiplicity,
//! the last-axis filtration splits the terminal module into tensor
//! blocks, a cone times a finite-dimensional jump space.
//!
//! The audit replays each leaf's designated mechanism numerically and
//! aggregates a single verdict.

use crate::error::{Error, Result};
use crate::lattice::{Cell, CofiniteDifference, MultiIndex, ShiftInvariantSet};
use crate::schatten::{verdict, CompactnessVerdict, DecayFit, Verdict, DEFAULT_MARGIN};
use crate::shiftops::{cross_commutator, edge_gram, Domain, LatticeOperator};
use crate::submodule::VectorSubmodule;
use crate::weights::WeightSet;
use serde::Serialize;
use std::sync::Arc;

/// Compactness mechanism a decomposition piece is assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mechanism {
    /// the ambient commutator restricted to the piece
    AmbientRestriction,
    /// the edge-operator Gram on a face at a positive level
    EdgeOperator,
    /// handled by the induction hypothesis in one fewer variable
    Induction,
    /// a finite set of monomials
    FiniteDimDefect,
    /// cone tensor finite-dimensional jump space
    ConeTensor,
}

/// A decomposition piece in the coordinates of its frame.
#[derive(Debug, Clone, Serialize)]
pub struct Leaf {
    pub cell: Cell,
    pub fiber_dim: usize,
    pub mechanism: Mechanism,
    /// the axis whose analysis produced this leaf, when one did
    pub axis: Option<usize>,
    pub provenance: String,
}

/// Interior/face partition of a cone along one axis.
#[derive(Debug, Clone, Serialize)]
pub struct AxisSplit {
    pub axis: usize,
    pub interior: Leaf,
    pub face: Leaf,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Empty,
    /// scalar terminal: one cone, analyzed separately along every axis
    ConeAnalysis {
        base: MultiIndex,
        splits: Vec<AxisSplit>,
    },
    /// multiplicity terminal: tensor blocks from the last-axis filtration
    Tensor {
        leaves: Vec<Leaf>,
    },
    /// one leveling stage
    Reduce {
        axis: usize,
        /// generator maximum along the axis
        level: u32,
        slices: Vec<SliceChild>,
        leveled: Box<Node>,
    },
    /// finite defect set (corner reduction)
    Defect {
        points: Vec<MultiIndex>,
    },
}

/// A slice below the axis maximum, reduced by induction in `m - 1`
/// variables.
#[derive(Debug, Clone, Serialize)]
pub struct SliceChild {
    pub axis: usize,
    pub level: u32,
    pub mechanism: Mechanism,
    #[serde(skip)]
    pub submodule: Arc<VectorSubmodule>,
    pub node: Node,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockTree {
    pub m: usize,
    pub k: usize,
    pub root: Node,
}

/// Corner reduction for two variables: the cone over the corner plus a
/// finite defect.
#[derive(Debug, Clone)]
pub struct CornerReduction {
    pub cone: ShiftInvariantSet,
    pub defect: Vec<MultiIndex>,
}

/// Replace a planar shift-invariant set by the cone over its corner; the
/// difference is finite and is returned as an explicit defect list.
pub fn corner_reduce(set: &ShiftInvariantSet) -> Result<CornerReduction> {
    if set.m() != 2 {
        return Err(Error::CornerReduceDimension(set.m()));
    }
    let corner = set.corner()?;
    match set.cofinite_difference()? {
        CofiniteDifference::Finite(defect) => Ok(CornerReduction {
            cone: ShiftInvariantSet::cone(corner),
            defect,
        }),
        CofiniteDifference::Infinite { ray_axis, .. } => {
            Err(Error::InfiniteDefect { axis: ray_axis })
        }
    }
}

/// Interior/face split of the cone over `base` along one axis, with the
/// face mechanism decided by the level: ambient restriction at level zero,
/// edge operator above.
pub fn split_axis(base: &MultiIndex, axis: usize) -> Result<AxisSplit> {
    if axis >= base.dim() {
        return Err(Error::AxisOutOfRange {
            axis,
            m: base.dim(),
        });
    }
    let cone = Cell::cone(base);
    let interior = Leaf {
        cell: cone.with_min(axis, base.entry(axis) + 1),
        fiber_dim: 1,
        mechanism: Mechanism::AmbientRestriction,
        axis: Some(axis),
        provenance: format!("interior along axis {}", axis + 1),
    };
    let level = base.entry(axis);
    let face = Leaf {
        cell: cone.fix_axis(axis, level),
        fiber_dim: 1,
        mechanism: if level == 0 {
            Mechanism::AmbientRestriction
        } else {
            Mechanism::EdgeOperator
        },
        axis: Some(axis),
        provenance: format!("face at axis {} level {}", axis + 1, level),
    };
    Ok(AxisSplit {
        axis,
        interior,
        face,
    })
}

/// One leveling stage: slices below the axis maximum plus the leveled
/// submodule that continues the reduction.
#[derive(Debug, Clone)]
pub struct AxisReduction {
    pub axis: usize,
    /// generator maximum along the axis
    pub level: u32,
    pub leveled: VectorSubmodule,
    pub slices: Vec<(u32, VectorSubmodule)>,
}

pub fn reduce_axis(s: &VectorSubmodule, axis: usize) -> Result<AxisReduction> {
    if axis >= s.m() {
        return Err(Error::AxisOutOfRange { axis, m: s.m() });
    }
    if s.is_empty() {
        return Err(Error::Invalid("cannot reduce an empty submodule".into()));
    }
    let level = s
        .generators()
        .iter()
        .map(|g| g.alpha.entry(axis))
        .max()
        .unwrap_or(0);
    let mut slices = Vec::new();
    for gamma in 0..level {
        let gens: Vec<(MultiIndex, Vec<crate::linalg::C64>)> = s
            .generators()
            .iter()
            .filter(|g| g.alpha.entry(axis) <= gamma)
            .map(|g| (g.alpha.project(axis), g.x.clone()))
            .collect();
        if gens.is_empty() {
            continue;
        }
        slices.push((gamma, VectorSubmodule::new(s.m() - 1, s.k(), gens)?));
    }
    let leveled = raise_axis(s, axis, level)?;
    Ok(AxisReduction {
        axis,
        level,
        leveled,
        slices,
    })
}

fn raise_axis(s: &VectorSubmodule, axis: usize, level: u32) -> Result<VectorSubmodule> {
    let raised: Vec<(MultiIndex, Vec<crate::linalg::C64>)> = s
        .generators()
        .iter()
        .map(|g| {
            let mut e = g.alpha.entries().to_vec();
            e[axis] = level;
            (MultiIndex::new(e), g.x.clone())
        })
        .collect();
    if s.k() == 1 {
        // scalar: re-minimalize the raised exponents
        let set = ShiftInvariantSet::closure(
            s.m(),
            &raised.iter().map(|(a, _)| a.clone()).collect::<Vec<_>>(),
        )?;
        Ok(VectorSubmodule::scalar(&set))
    } else {
        VectorSubmodule::new(s.m(), s.k(), raised)
    }
}

/// Full reduction: level axes in order, slices go to induction, terminal
/// modules become a scalar cone analysis or tensor blocks.
pub fn full_reduction(s: &VectorSubmodule) -> Result<BlockTree> {
    Ok(BlockTree {
        m: s.m(),
        k: s.k(),
        root: reduce_node(s)?,
    })
}

fn reduce_node(s: &VectorSubmodule) -> Result<Node> {
    if s.is_empty() {
        return Ok(Node::Empty);
    }
    build_stage(s, 0)
}

fn build_stage(s: &VectorSubmodule, axis: usize) -> Result<Node> {
    let m = s.m();
    if axis + 1 >= m {
        return terminal(s);
    }
    let red = reduce_axis(s, axis)?;
    if red.slices.is_empty() && red.level == 0 {
        return build_stage(s, axis + 1);
    }
    let mut slices = Vec::with_capacity(red.slices.len());
    for (level, sub) in red.slices {
        let node = reduce_node(&sub)?;
        slices.push(SliceChild {
            axis,
            level,
            mechanism: Mechanism::Induction,
            submodule: Arc::new(sub),
            node,
        });
    }
    let leveled = build_stage(&red.leveled, axis + 1)?;
    Ok(Node::Reduce {
        axis,
        level: red.level,
        slices,
        leveled: Box::new(leveled),
    })
}

fn terminal(s: &VectorSubmodule) -> Result<Node> {
    let m = s.m();
    let last = m - 1;
    // entries below the last axis are constant here (the stages leveled
    // them); read them off as maxima for safety
    let mut base: Vec<u32> = (0..m - 1)
        .map(|a| {
            s.generators()
                .iter()
                .map(|g| g.alpha.entry(a))
                .max()
                .unwrap_or(0)
        })
        .collect();
    if s.k() == 1 {
        let tail = s
            .generators()
            .iter()
            .map(|g| g.alpha.entry(last))
            .min()
            .unwrap_or(0);
        base.push(tail);
        let base = MultiIndex::new(base);
        let splits = (0..m)
            .map(|a| split_axis(&base, a))
            .collect::<Result<_>>()?;
        Ok(Node::ConeAnalysis { base, splits })
    } else {
        let frozen: Vec<(usize, u32)> = base.iter().copied().enumerate().collect();
        let filt = s.filtration_along(&frozen, last)?;
        let leaves = filt
            .breakpoints
            .iter()
            .map(|bp| {
                let mut mins = base.clone();
                mins.push(bp.level);
                Leaf {
                    cell: Cell::cone(&MultiIndex::new(mins)),
                    fiber_dim: bp.jump.cols(),
                    mechanism: Mechanism::ConeTensor,
                    axis: Some(last),
                    provenance: format!(
                        "tensor block above level {} (jump dimension {})",
                        bp.level,
                        bp.jump.cols()
                    ),
                }
            })
            .collect();
        Ok(Node::Tensor { leaves })
    }
}

impl BlockTree {
    /// The canonical disjoint pieces with their fiber dimensions, in root
    /// coordinates. Cone analyses contribute their first axis split.
    pub fn partition(&self) -> Vec<(Cell, usize)> {
        let mut out = Vec::new();
        collect_partition(&self.root, &mut out);
        out
    }

    /// Every leaf with its mechanism tag and path, in root coordinates.
    pub fn leaves(&self) -> Vec<(String, Leaf)> {
        let mut out = Vec::new();
        collect_leaves(&self.root, "", &mut out);
        out
    }

    /// Multiset of leaf mechanism tags, sorted.
    pub fn leaf_tags(&self) -> Vec<Mechanism> {
        let mut tags: Vec<Mechanism> = self
            .leaves()
            .into_iter()
            .map(|(_, l)| l.mechanism)
            .collect();
        tags.sort();
        tags
    }

    /// Longest root-to-leaf chain of reduction stages.
    pub fn depth(&self) -> usize {
        fn rec(node: &Node) -> usize {
            match node {
                Node::Reduce {
                    slices, leveled, ..
                } => {
                    1 + slices
                        .iter()
                        .map(|s| rec(&s.node))
                        .chain(std::iter::once(rec(leveled)))
                        .max()
                        .unwrap_or(0)
                }
                _ => 1,
            }
        }
        rec(&self.root)
    }

    /// Indented text form.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        render(&self.root, 0, &mut out);
        out
    }
}

fn indent(depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn render(node: &Node, depth: usize, out: &mut String) {
    match node {
        Node::Empty => {
            indent(depth, out);
            out.push_str("(empty)\n");
        }
        Node::ConeAnalysis { base, splits } => {
            indent(depth, out);
            out.push_str(&format!("cone at {base}\n"));
            for sp in splits {
                indent(depth + 1, out);
                out.push_str(&format!(
                    "axis {}: interior {} [{:?}], face {} [{:?}]\n",
                    sp.axis + 1,
                    sp.interior.cell,
                    sp.interior.mechanism,
                    sp.face.cell,
                    sp.face.mechanism
                ));
            }
        }
        Node::Tensor { leaves } => {
            for l in leaves {
                indent(depth, out);
                out.push_str(&format!(
                    "tensor {} x C^{} [{:?}]\n",
                    l.cell, l.fiber_dim, l.mechanism
                ));
            }
        }
        Node::Reduce {
            axis,
            level,
            slices,
            leveled,
        } => {
            indent(depth, out);
            out.push_str(&format!("reduce axis {} (max level {level})\n", axis + 1));
            for sc in slices {
                indent(depth + 1, out);
                out.push_str(&format!(
                    "slice axis {} = {} [induction]\n",
                    axis + 1,
                    sc.level
                ));
                render(&sc.node, depth + 2, out);
            }
            indent(depth + 1, out);
            out.push_str("leveled\n");
            render(leveled, depth + 2, out);
        }
        Node::Defect { points } => {
            indent(depth, out);
            out.push_str(&format!("finite defect, {} points\n", points.len()));
        }
    }
}

fn collect_partition(node: &Node, out: &mut Vec<(Cell, usize)>) {
    match node {
        Node::Empty => {}
        Node::ConeAnalysis { splits, .. } => {
            let sp = &splits[0];
            out.push((sp.interior.cell.clone(), sp.interior.fiber_dim));
            out.push((sp.face.cell.clone(), sp.face.fiber_dim));
        }
        Node::Tensor { leaves } => {
            for l in leaves {
                out.push((l.cell.clone(), l.fiber_dim));
            }
        }
        Node::Reduce {
            slices, leveled, ..
        } => {
            collect_partition(leveled, out);
            for sc in slices {
                let mut inner = Vec::new();
                collect_partition(&sc.node, &mut inner);
                for (cell, dim) in inner {
                    out.push((cell.inject(sc.axis, sc.level), dim));
                }
            }
        }
        Node::Defect { points } => {
            for p in points {
                let cell = Cell::new(
                    p.entries()
                        .iter()
                        .map(|&v| crate::lattice::AxisRange::Fixed(v))
                        .collect(),
                );
                out.push((cell, 1));
            }
        }
    }
}

fn collect_leaves(node: &Node, path: &str, out: &mut Vec<(String, Leaf)>) {
    match node {
        Node::Empty => {}
        Node::ConeAnalysis { splits, .. } => {
            for sp in splits {
                out.push((
                    format!("{path}{}", sp.interior.provenance),
                    sp.interior.clone(),
                ));
                out.push((format!("{path}{}", sp.face.provenance), sp.face.clone()));
            }
        }
        Node::Tensor { leaves } => {
            for l in leaves {
                out.push((format!("{path}{}", l.provenance), l.clone()));
            }
        }
        Node::Reduce {
            slices, leveled, ..
        } => {
            collect_leaves(leveled, path, out);
            for sc in slices {
                let prefix = format!("{path}slice a{}={} / ", sc.axis + 1, sc.level);
                let mut inner = Vec::new();
                collect_leaves(&sc.node, &prefix, &mut inner);
                for (p, mut leaf) in inner {
                    leaf.cell = leaf.cell.inject(sc.axis, sc.level);
                    out.push((p, leaf));
                }
            }
        }
        Node::Defect { points } => {
            for p in points {
                out.push((
                    format!("{path}defect point {p}"),
                    Leaf {
                        cell: Cell::new(
                            p.entries()
                                .iter()
                                .map(|&v| crate::lattice::AxisRange::Fixed(v))
                                .collect(),
                        ),
                        fiber_dim: 1,
                        mechanism: Mechanism::FiniteDimDefect,
                        axis: None,
                        provenance: format!("defect point {p}"),
                    },
                ));
            }
        }
    }
}

/// One leaf verdict of an audit.
#[derive(Debug, Clone, Serialize)]
pub struct AuditRow {
    pub path: String,
    pub mechanism: Mechanism,
    pub operator: String,
    pub fiber_dim: usize,
    pub verdict: CompactnessVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub p: f64,
    pub max_degree: u32,
    pub rows: Vec<AuditRow>,
    pub aggregate: Verdict,
}

fn severity(v: Verdict) -> u8 {
    match v {
        Verdict::Converged => 0,
        Verdict::Inconclusive => 1,
        Verdict::Diverged => 2,
    }
}

fn finite_rank_verdict(p: f64) -> CompactnessVerdict {
    CompactnessVerdict {
        p,
        margin: DEFAULT_MARGIN,
        finite_rank: true,
        schatten: Verdict::Converged,
        compactness: Verdict::Converged,
        schatten_fit: None,
        norm_fit: None,
    }
}

/// Numerically replay each leaf's designated mechanism: ambient commutators
/// restricted to the leaf, edge Grams on faces, scalar cone commutators
/// under tensor blocks, induction with the restricted weight set on slices.
/// Reports one row per (leaf, operator) pair and the worst verdict overall.
pub fn audit(
    weights: &Arc<WeightSet>,
    tree: &BlockTree,
    p: f64,
    max_degree: u32,
) -> Result<AuditReport> {
    let mut rows = Vec::new();
    walk_audit(weights, &tree.root, "", p, max_degree, &mut rows)?;
    let aggregate = rows
        .iter()
        .map(|r| r.verdict_overall())
        .max_by_key(|&v| severity(v))
        .unwrap_or(Verdict::Converged);
    Ok(AuditReport {
        p,
        max_degree,
        rows,
        aggregate,
    })
}

impl AuditRow {
    fn verdict_overall(&self) -> Verdict {
        if severity(self.verdict.schatten) >= severity(self.verdict.compactness) {
            self.verdict.schatten
        } else {
            self.verdict.compactness
        }
    }
}

fn leaf_ops(weights: &Arc<WeightSet>, leaf: &Leaf) -> Result<Vec<(String, LatticeOperator)>> {
    let domain = Domain::scalar(Arc::clone(weights));
    let m = weights.m();
    let mut ops = Vec::new();
    match leaf.mechanism {
        Mechanism::EdgeOperator => {
            let axis = leaf.axis.expect("edge faces carry their axis");
            ops.push((
                format!("edge gram X{}*X{}", axis + 1, axis + 1),
                edge_gram(&domain, axis, leaf.cell.clone())?,
            ));
        }
        Mechanism::AmbientRestriction => {
            let i = leaf.axis.expect("ambient-restriction leaves carry an axis");
            for j in 0..m {
                ops.push((
                    format!("[Z{}*, Z{}] restricted", i + 1, j + 1),
                    cross_commutator(&domain, i, j)?.restricted(leaf.cell.clone()),
                ));
            }
        }
        Mechanism::ConeTensor => {
            for i in 0..m {
                for j in 0..m {
                    ops.push((
                        format!("[Z{}*, Z{}] on cone", i + 1, j + 1),
                        cross_commutator(&domain, i, j)?.restricted(leaf.cell.clone()),
                    ));
                }
            }
        }
        Mechanism::FiniteDimDefect | Mechanism::Induction => {}
    }
    Ok(ops)
}

fn walk_audit(
    weights: &Arc<WeightSet>,
    node: &Node,
    path: &str,
    p: f64,
    max_degree: u32,
    rows: &mut Vec<AuditRow>,
) -> Result<()> {
    match node {
        Node::Empty => {}
        Node::ConeAnalysis { splits, .. } => {
            for sp in splits {
                for leaf in [&sp.interior, &sp.face] {
                    audit_leaf(weights, leaf, path, p, max_degree, rows)?;
                }
            }
        }
        Node::Tensor { leaves } => {
            for leaf in leaves {
                audit_leaf(weights, leaf, path, p, max_degree, rows)?;
            }
        }
        Node::Reduce {
            slices, leveled, ..
        } => {
            walk_audit(weights, leveled, path, p, max_degree, rows)?;
            for sc in slices {
                let restricted = Arc::new(weights.restrict(vec![(sc.axis, sc.level)])?);
                let prefix = format!("{path}slice a{}={} / ", sc.axis + 1, sc.level);
                walk_audit(&restricted, &sc.node, &prefix, p, max_degree, rows)?;
            }
        }
        Node::Defect { points } => {
            rows.push(AuditRow {
                path: format!("{path}finite defect ({} points)", points.len()),
                mechanism: Mechanism::FiniteDimDefect,
                operator: "finite rank".into(),
                fiber_dim: 1,
                verdict: finite_rank_verdict(p),
            });
        }
    }
    Ok(())
}

fn audit_leaf(
    weights: &Arc<WeightSet>,
    leaf: &Leaf,
    path: &str,
    p: f64,
    max_degree: u32,
    rows: &mut Vec<AuditRow>,
) -> Result<()> {
    for (label, op) in leaf_ops(weights, leaf)? {
        let v = verdict(&op, p, max_degree, DEFAULT_MARGIN, None)?;
        rows.push(AuditRow {
            path: format!("{path}{}", leaf.provenance),
            mechanism: leaf.mechanism,
            operator: label,
            fiber_dim: leaf.fiber_dim,
            verdict: v,
        });
    }
    Ok(())
}

/// Evidence row used by tests: the fitted slope of a leaf op, if any.
pub fn leaf_fit_slope(row: &AuditRow) -> Option<f64> {
    row.verdict
        .schatten_fit
        .as_ref()
        .map(|f: &DecayFit| f.slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::shell_all;
    use crate::linalg::C64;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn scalar_tree(gens: &[&[u32]], m: usize) -> BlockTree {
        let set =
            ShiftInvariantSet::closure(m, &gens.iter().map(|g| mi(g)).collect::<Vec<_>>()).unwrap();
        full_reduction(&VectorSubmodule::scalar(&set)).unwrap()
    }

    #[test]
    fn corner_reduce_examples() {
        let b = ShiftInvariantSet::closure(2, &[mi(&[2, 0]), mi(&[0, 3])]).unwrap();
        let r = corner_reduce(&b).unwrap();
        assert_eq!(r.cone.generators(), &[mi(&[0, 0])]);
        assert_eq!(r.defect.len(), 6);

        let b = ShiftInvariantSet::cone(mi(&[2, 3]));
        let r = corner_reduce(&b).unwrap();
        assert!(r.defect.is_empty());

        let b = ShiftInvariantSet::closure(2, &[mi(&[1, 2]), mi(&[2, 1])]).unwrap();
        let r = corner_reduce(&b).unwrap();
        assert_eq!(r.cone.generators(), &[mi(&[1, 1])]);
        assert_eq!(r.defect, vec![mi(&[1, 1])]);

        let b3 = ShiftInvariantSet::cone(mi(&[1, 1, 1]));
        assert!(matches!(
            corner_reduce(&b3),
            Err(Error::CornerReduceDimension(3))
        ));
    }

    #[test]
    fn split_axis_tags() {
        let sp = split_axis(&mi(&[0, 0]), 0).unwrap();
        assert_eq!(sp.face.mechanism, Mechanism::AmbientRestriction);
        assert!(sp.face.cell.contains(&[0, 5]));
        assert!(!sp.face.cell.contains(&[1, 5]));

        let sp = split_axis(&mi(&[2, 3]), 0).unwrap();
        assert_eq!(sp.face.mechanism, Mechanism::EdgeOperator);
        assert!(sp.face.cell.contains(&[2, 3]));
        assert!(!sp.face.cell.contains(&[2, 2]));
        assert!(sp.interior.cell.contains(&[3, 3]));
        assert!(!sp.interior.cell.contains(&[2, 3]));

        let sp = split_axis(&mi(&[2, 3]), 1).unwrap();
        assert_eq!(sp.face.mechanism, Mechanism::EdgeOperator);
        assert!(sp.face.cell.contains(&[7, 3]));
    }

    #[test]
    fn single_cone_reduction_matches_the_case_analysis() {
        let tree = scalar_tree(&[&[2, 3]], 2);
        let tags = tree.leaf_tags();
        assert_eq!(
            tags,
            vec![
                Mechanism::AmbientRestriction,
                Mechanism::AmbientRestriction,
                Mechanism::EdgeOperator,
                Mechanism::EdgeOperator,
            ]
        );
        // 2 interiors + 2 faces over the two axes
        assert_eq!(tree.leaves().len(), 4);
    }

    #[test]
    fn reduce_axis_example() {
        let set = ShiftInvariantSet::closure(2, &[mi(&[2, 0]), mi(&[0, 3])]).unwrap();
        let s = VectorSubmodule::scalar(&set);
        let r = reduce_axis(&s, 0).unwrap();
        assert_eq!(r.level, 2);
        assert_eq!(r.slices.len(), 2);
        for (gamma, sub) in &r.slices {
            assert!(*gamma < 2);
            assert_eq!(sub.m(), 1);
            assert_eq!(sub.generators().len(), 1);
            assert_eq!(sub.generators()[0].alpha, mi(&[3]));
        }
        // leveled generators {(2,0),(2,3)} minimalize to {(2,0)}
        assert_eq!(r.leveled.generators().len(), 1);
        assert_eq!(r.leveled.generators()[0].alpha, mi(&[2, 0]));
    }

    #[test]
    fn single_generator_cone_has_no_slices() {
        let s = VectorSubmodule::scalar(&ShiftInvariantSet::cone(mi(&[3, 2])));
        let r = reduce_axis(&s, 0).unwrap();
        assert_eq!(r.level, 3);
        assert!(r.slices.is_empty());
    }

    #[test]
    fn multiplicity_example_tensor_blocks() {
        let s = VectorSubmodule::new(
            2,
            2,
            vec![
                (mi(&[0, 2]), vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]),
                (mi(&[0, 0]), vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]),
            ],
        )
        .unwrap();
        let tree = full_reduction(&s).unwrap();
        let leaves = tree.leaves();
        assert_eq!(leaves.len(), 2);
        for (_, l) in &leaves {
            assert_eq!(l.mechanism, Mechanism::ConeTensor);
            assert_eq!(l.fiber_dim, 1);
        }
        assert!(leaves[0].1.cell.contains(&[0, 0]));
        assert!(!leaves[1].1.cell.contains(&[0, 1]));
        assert!(leaves[1].1.cell.contains(&[0, 2]));
    }

    #[test]
    fn empty_submodule_reduces_to_the_empty_tree() {
        let s = VectorSubmodule::new(2, 1, vec![]).unwrap();
        let tree = full_reduction(&s).unwrap();
        assert!(matches!(tree.root, Node::Empty));
        assert!(tree.partition().is_empty());
    }

    #[test]
    fn partition_covers_the_submodule_exactly() {
        let cases: Vec<(usize, Vec<Vec<u32>>)> = vec![
            (2, vec![vec![2, 0], vec![0, 3]]),
            (2, vec![vec![1, 2], vec![2, 1]]),
            (3, vec![vec![1, 1, 1]]),
            (3, vec![vec![2, 0, 1], vec![0, 1, 0]]),
        ];
        for (m, gens) in cases {
            let set =
                ShiftInvariantSet::closure(m, &gens.iter().map(|g| mi(g)).collect::<Vec<_>>())
                    .unwrap();
            let s = VectorSubmodule::scalar(&set);
            let tree = full_reduction(&s).unwrap();
            let pieces = tree.partition();
            for n in 0..=10u32 {
                for point in shell_all(m, n) {
                    let claimed: usize = pieces
                        .iter()
                        .filter(|(cell, _)| cell.contains(point.entries()))
                        .map(|(_, d)| d)
                        .sum();
                    let expect = s.fiber_dim(point.entries());
                    assert_eq!(
                        claimed, expect,
                        "point {point} of {gens:?} claimed {claimed} times"
                    );
                }
            }
        }
    }

    #[test]
    fn partition_with_fibers_for_multiplicity() {
        let s = VectorSubmodule::new(
            2,
            2,
            vec![
                (mi(&[0, 2]), vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]),
                (mi(&[0, 0]), vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]),
                (mi(&[3, 0]), vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]),
            ],
        )
        .unwrap();
        let tree = full_reduction(&s).unwrap();
        let pieces = tree.partition();
        for n in 0..=9u32 {
            for point in shell_all(2, n) {
                let claimed: usize = pieces
                    .iter()
                    .filter(|(cell, _)| cell.contains(point.entries()))
                    .map(|(_, d)| d)
                    .sum();
                assert_eq!(claimed, s.fiber_dim(point.entries()), "at {point}");
            }
        }
    }

    #[test]
    fn depth_is_bounded() {
        let set = ShiftInvariantSet::closure(3, &[mi(&[4, 0, 2]), mi(&[1, 3, 0]), mi(&[0, 2, 5])])
            .unwrap();
        let s = VectorSubmodule::scalar(&set);
        let tree = full_reduction(&s).unwrap();
        let max_coord = 5;
        assert!(tree.depth() <= 3 * (1 + max_coord));
    }

    #[test]
    fn audit_drury_cone_converges() {
        let w = Arc::new(WeightSet::drury_arveson(2));
        let tree = scalar_tree(&[&[2, 3]], 2);
        let report = audit(&w, &tree, 3.0, 240).unwrap();
        assert_eq!(report.aggregate, Verdict::Converged);
        assert!(report
            .rows
            .iter()
            .all(|r| { r.verdict.schatten == Verdict::Converged }));
    }

    #[test]
    fn audit_unweighted_edges_diverge() {
        let w = Arc::new(WeightSet::unweighted(2));
        let tree = scalar_tree(&[&[1, 1]], 2);
        let report = audit(&w, &tree, 2.0, 160).unwrap();
        assert_eq!(report.aggregate, Verdict::Diverged);
        let edge_rows: Vec<_> = report
            .rows
            .iter()
            .filter(|r| r.mechanism == Mechanism::EdgeOperator)
            .collect();
        assert!(!edge_rows.is_empty());
        assert!(edge_rows
            .iter()
            .all(|r| r.verdict.schatten == Verdict::Diverged));
    }

    #[test]
    fn render_text_smoke() {
        let tree = scalar_tree(&[&[2, 0], &[0, 3]], 2);
        let text = tree.render_text();
        assert!(text.contains("reduce axis 1"));
        assert!(text.contains("slice axis 1 = 0"));
        assert!(text.contains("cone at (2,0)"));
    }
}
