//! Exact certificates for the lattice polytopes spanned by valuation
//! vectors: vertex status, hypercube containment, affine dimension and
//! absence of interior lattice points.
//!
//! Everything runs on exact rational LPs ([`crate::lp`]); no tolerance
//! appears anywhere. Interiority of a candidate point x uses the
//! supporting cone K = {c : c·(p-x) <= 0 for all p}: x is interior to
//! conv(P) iff K = {0}, certified by maximizing and minimizing each
//! coordinate of c over K intersected with the unit box.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::integer_rank;
use crate::lp::{lp_feasible, rat, solve_min, Feasibility, LpOutcome, Rat};
use crate::seq::IteratedSequence;
use crate::wedge::weighting_matrix;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("point set must be nonempty")]
    Empty,
    #[error("point has dimension {got}, point set has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("points must be pairwise distinct")]
    DuplicatePoint,
    #[error("queried point does not belong to the point set")]
    NotAMember,
    #[error("operation requires k=2, got k={k}")]
    RequiresK2 { k: u32 },
}

/// A finite set of integer points in Z^d, pairwise distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    d: usize,
    points: Vec<Vec<i64>>,
}

impl PointSet {
    pub fn new(d: usize, points: Vec<Vec<i64>>) -> Result<Self, PolytopeError> {
        if points.is_empty() {
            return Err(PolytopeError::Empty);
        }
        for p in &points {
            if p.len() != d {
                return Err(PolytopeError::DimensionMismatch { expected: d, got: p.len() });
            }
        }
        let mut sorted = points.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(PolytopeError::DuplicatePoint);
        }
        Ok(PointSet { d, points })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn in_hypercube(&self) -> bool {
        self.points.iter().all(|p| p.iter().all(|&x| x == 0 || x == 1))
    }
}

/// Membership of x in conv(P) as a pure feasibility problem:
/// Σ λ_p p = x, Σ λ_p = 1, λ >= 0.
fn convex_membership(points: &[Vec<i64>], x: &[i64]) -> bool {
    let d = x.len();
    let cols = points.len();
    let mut a: Vec<Vec<Rat>> = Vec::with_capacity(d + 1);
    for coord in 0..d {
        a.push(points.iter().map(|p| rat(p[coord])).collect());
    }
    a.push(vec![rat(1); cols]);
    let mut b: Vec<Rat> = x.iter().map(|&v| rat(v)).collect();
    b.push(rat(1));
    lp_feasible(&a, &b).expect("well-formed membership system").is_feasible()
}

/// True iff v is not a convex combination of the other points of P.
pub fn is_vertex(point_set: &PointSet, v: &[i64]) -> Result<bool, PolytopeError> {
    if v.len() != point_set.d {
        return Err(PolytopeError::DimensionMismatch { expected: point_set.d, got: v.len() });
    }
    if !point_set.points.iter().any(|p| p == v) {
        return Err(PolytopeError::NotAMember);
    }
    let others: Vec<Vec<i64>> =
        point_set.points.iter().filter(|p| p.as_slice() != v).cloned().collect();
    if others.is_empty() {
        return Ok(true);
    }
    Ok(!convex_membership(&others, v))
}

/// Rank of the difference set {p - p_0}, by fraction-free elimination.
pub fn affine_dimension(point_set: &PointSet) -> usize {
    let base = &point_set.points[0];
    let diffs: Vec<Vec<i64>> = point_set.points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    if diffs.is_empty() {
        return 0;
    }
    integer_rank(&diffs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InteriorReport {
    pub interior_points: Vec<Vec<i64>>,
    /// Set when conv(P) is not full-dimensional; the interior is then empty
    /// relative to the ambient space and no candidate is tested.
    pub lower_dimensional: bool,
}

/// Max (or min) of c_i over the supporting cone of x intersected with the
/// unit box. Variables are shifted to u = c + 1 in [0,2]^d so the system is
/// in standard form.
fn cone_extreme(points: &[Vec<i64>], x: &[i64], coord: usize, maximize: bool) -> Rat {
    let d = x.len();
    let m = points.len() + d;
    let cols = d + points.len() + d;
    let mut a: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut b: Vec<Rat> = Vec::with_capacity(m);
    for (pi, p) in points.iter().enumerate() {
        let mut row = vec![rat(0); cols];
        let mut rhs = rat(0);
        for j in 0..d {
            let coeff = rat(p[j] - x[j]);
            row[j] = coeff.clone();
            rhs = rhs + coeff;
        }
        row[d + pi] = rat(1); // slack for (p-x)·c <= 0
        a.push(row);
        b.push(rhs);
    }
    for j in 0..d {
        let mut row = vec![rat(0); cols];
        row[j] = rat(1);
        row[d + points.len() + j] = rat(1); // slack for u_j <= 2
        a.push(row);
        b.push(rat(2));
    }
    let mut c = vec![rat(0); cols];
    c[coord] = if maximize { rat(-1) } else { rat(1) };
    match solve_min(&c, &a, &b).expect("well-formed cone system") {
        LpOutcome::Optimal { value, .. } => {
            // Recover the extreme of c_i = u_i - 1 from the optimum of ±u_i.
            if maximize {
                -value - rat(1)
            } else {
                value - rat(1)
            }
        }
        other => unreachable!("cone LP is feasible and box-bounded: {other:?}"),
    }
}

/// True iff the supporting cone of x is trivial, i.e. all 2d box-bounded
/// extremes are zero. Stops at the first nonzero extreme, which already
/// certifies a supporting or separating direction.
fn has_trivial_supporting_cone(points: &[Vec<i64>], x: &[i64]) -> bool {
    let d = x.len();
    // Test the direction that is nonzero for cube-boundary candidates
    // first, so almost every candidate needs a single LP.
    let mut probes: Vec<(usize, bool)> = Vec::with_capacity(2 * d);
    for i in 0..d {
        probes.push((i, x[i] != 0));
    }
    for i in 0..d {
        probes.push((i, x[i] == 0));
    }
    for (coord, maximize) in probes {
        if cone_extreme(points, x, coord, maximize) != rat(0) {
            return false;
        }
    }
    true
}

/// Deterministic integer functionals used to rule out convex-hull
/// membership before any LP runs: if φ·x falls outside [min φ·P, max φ·P]
/// for some φ the candidate cannot lie in conv(P).
fn prefilter_functionals(d: usize) -> Vec<Vec<i64>> {
    let mut funcs = Vec::with_capacity(d + 33);
    for i in 0..d {
        let mut f = vec![0i64; d];
        f[i] = 1;
        funcs.push(f);
    }
    funcs.push(vec![1; d]);
    // Small deterministic pseudo-random directions (xorshift).
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    for _ in 0..32 {
        let f = (0..d)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state % 7) as i64 - 3
            })
            .collect();
        funcs.push(f);
    }
    funcs
}

/// All x in {0,1}^d interior to conv(P), certified by exact LPs.
pub fn interior_lattice_points(point_set: &PointSet) -> InteriorReport {
    let d = point_set.d;
    if affine_dimension(point_set) != d {
        return InteriorReport { interior_points: Vec::new(), lower_dimensional: true };
    }
    let funcs = prefilter_functionals(d);
    let bounds: Vec<(i64, i64)> = funcs
        .iter()
        .map(|f| {
            let values = point_set.points.iter().map(|p| dot(f, p));
            let (mut lo, mut hi) = (i64::MAX, i64::MIN);
            for v in values {
                lo = lo.min(v);
                hi = hi.max(v);
            }
            (lo, hi)
        })
        .collect();
    let mut interior = Vec::new();
    for mask in 0u64..(1u64 << d) {
        let x: Vec<i64> = (0..d).map(|t| ((mask >> t) & 1) as i64).collect();
        let outside = funcs
            .iter()
            .zip(&bounds)
            .any(|(f, &(lo, hi))| {
                let v = dot(f, &x);
                v < lo || v > hi
            });
        if outside {
            continue;
        }
        if !convex_membership(&point_set.points, &x) {
            continue;
        }
        if has_trivial_supporting_cone(&point_set.points, &x) {
            interior.push(x);
        }
    }
    InteriorReport { interior_points: interior, lower_dimensional: false }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Full certificate for the polytope spanned by the valuation vectors of an
/// iterated sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolytopeReport {
    pub vertices: Vec<Vec<i64>>,
    pub dim: usize,
    pub in_hypercube: bool,
    pub interior_lattice_points: Vec<Vec<i64>>,
    pub all_vertices: bool,
    pub distinct: bool,
    pub lower_dimensional: bool,
    pub issues: Vec<String>,
}

impl PolytopeReport {
    pub fn ok(&self, expected_dim: usize, expected_count: usize) -> bool {
        self.issues.is_empty()
            && self.all_vertices
            && self.distinct
            && self.in_hypercube
            && !self.lower_dimensional
            && self.dim == expected_dim
            && self.vertices.len() == expected_count
            && self.interior_lattice_points.is_empty()
    }
}

/// Assembles the columns of the weighting matrix and certifies: 0/1
/// coordinates, pairwise distinctness, vertex status of every point, affine
/// dimension and emptiness of the interior lattice point list. Failures are
/// reported, never dropped.
pub fn no_polytope_report(seq: &IteratedSequence) -> Result<PolytopeReport, PolytopeError> {
    if seq.k() != 2 {
        return Err(PolytopeError::RequiresK2 { k: seq.k() });
    }
    let matrix = weighting_matrix(seq).expect("validated iterated sequences have valuations");
    let columns: Vec<Vec<i64>> = matrix
        .columns()
        .iter()
        .map(|c| c.0.iter().map(|&x| x as i64).collect())
        .collect();
    let mut issues = Vec::new();
    let mut distinct = true;
    let mut sorted = columns.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        distinct = false;
        issues.push("valuation vectors are not pairwise distinct".to_string());
    }
    let in_hypercube = columns.iter().all(|p| p.iter().all(|&x| x == 0 || x == 1));
    if !in_hypercube {
        issues.push("valuation vector outside {0,1}^d".to_string());
    }
    let dedup: Vec<Vec<i64>> = {
        let mut seen = std::collections::BTreeSet::new();
        columns.iter().filter(|p| seen.insert((*p).clone())).cloned().collect()
    };
    let point_set = PointSet::new(seq.d(), dedup)?;
    let mut all_vertices = true;
    for point in point_set.points() {
        if !is_vertex(&point_set, point)? {
            all_vertices = false;
            issues.push(format!("{point:?} is not a vertex"));
        }
    }
    let dim = affine_dimension(&point_set);
    let interior = interior_lattice_points(&point_set);
    if !interior.interior_points.is_empty() {
        issues.push(format!("found interior lattice points: {:?}", interior.interior_points));
    }
    Ok(PolytopeReport {
        vertices: columns,
        dim,
        in_hypercube,
        interior_lattice_points: interior.interior_points,
        all_vertices,
        distinct,
        lower_dimensional: interior.lower_dimensional,
        issues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::build_iterated_sequence;

    fn table1_points() -> PointSet {
        PointSet::new(
            4,
            vec![
                vec![0, 0, 0, 0],
                vec![0, 0, 0, 1],
                vec![0, 1, 0, 0],
                vec![0, 0, 1, 0],
                vec![1, 0, 0, 0],
                vec![1, 0, 0, 1],
            ],
        )
        .unwrap()
    }

    #[test]
    fn point_set_validation() {
        assert_eq!(PointSet::new(2, vec![]), Err(PolytopeError::Empty));
        assert_eq!(
            PointSet::new(2, vec![vec![0, 1], vec![0, 1]]),
            Err(PolytopeError::DuplicatePoint)
        );
        assert!(matches!(
            PointSet::new(2, vec![vec![0, 1, 2]]),
            Err(PolytopeError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn vertex_examples() {
        let p = table1_points();
        assert!(is_vertex(&p, &[0, 0, 0, 0]).unwrap());

        let square =
            PointSet::new(2, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]).unwrap();
        assert!(is_vertex(&square, &[1, 1]).unwrap());

        let segment = PointSet::new(1, vec![vec![0], vec![1], vec![2]]).unwrap();
        assert!(!is_vertex(&segment, &[1]).unwrap());
        assert!(is_vertex(&segment, &[0]).unwrap());
        assert_eq!(is_vertex(&segment, &[7]), Err(PolytopeError::NotAMember));
    }

    #[test]
    fn affine_dimension_examples() {
        assert_eq!(affine_dimension(&table1_points()), 4);
        assert_eq!(affine_dimension(&PointSet::new(3, vec![vec![5, 5, 5]]).unwrap()), 0);
        let square =
            PointSet::new(2, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]).unwrap();
        assert_eq!(affine_dimension(&square), 2);
    }

    #[test]
    fn interior_lattice_point_examples() {
        // Table-1 point set: none.
        let report = interior_lattice_points(&table1_points());
        assert!(!report.lower_dimensional);
        assert!(report.interior_points.is_empty());

        // Full hypercube corner set in d=2: no 0/1 point is interior.
        let square =
            PointSet::new(2, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]).unwrap();
        let report = interior_lattice_points(&square);
        assert!(report.interior_points.is_empty());

        // Corners of [0,2]^2 contain (1,1) strictly inside.
        let big =
            PointSet::new(2, vec![vec![0, 0], vec![0, 2], vec![2, 0], vec![2, 2]]).unwrap();
        let report = interior_lattice_points(&big);
        assert_eq!(report.interior_points, vec![vec![1, 1]]);

        // Lower-dimensional sets are flagged, not searched.
        let segment = PointSet::new(2, vec![vec![0, 0], vec![1, 1]]).unwrap();
        let report = interior_lattice_points(&segment);
        assert!(report.lower_dimensional);
        assert!(report.interior_points.is_empty());
    }

    #[test]
    fn report_for_table1() {
        let s = build_iterated_sequence(2, 4, &[vec![1, 2], vec![1, 2]]).unwrap();
        let report = no_polytope_report(&s).unwrap();
        assert_eq!(report.vertices.len(), 6);
        assert!(report.ok(4, 6));

        let sp = build_iterated_sequence(2, 4, &[vec![3, 2], vec![1, 2]]).unwrap();
        let report = no_polytope_report(&sp).unwrap();
        assert!(report.ok(4, 6));
    }

    #[test]
    fn report_rejects_k3() {
        let s = build_iterated_sequence(3, 4, &[vec![1, 2, 3]]).unwrap();
        assert_eq!(no_polytope_report(&s), Err(PolytopeError::RequiresK2 { k: 3 }));
    }
}
