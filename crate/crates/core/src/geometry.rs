//! Points, anchor sets and convex-hull membership.
//!
//! A source is only identifiable from peak counts when it lies strictly
//! inside the open convex hull of the anchors, so every scenario is checked
//! here before any estimator runs. Equivalently the source must admit
//! barycentric weights `β` with `Xᵀβ = y`, `Σβ = 1` and every `β_i > 0`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, LENGTH_SCALE};

/// Weights at or below this are treated as zero when testing strict
/// positivity.
pub const BARYCENTRIC_EPS: f64 = 1e-12;

/// Relative singular-value floor below which the anchor geometry is rank
/// deficient.
const RANK_TOL: f64 = 1e-10;

/// A location in 2-D or 3-D space, in meters.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if !(2..=3).contains(&coords.len()) {
            return Err(Error::UnsupportedDimension(coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("point coordinates"));
        }
        Ok(Self { coords })
    }

    pub fn xy(x: f64, y: f64) -> Self {
        Self::new(vec![x, y]).expect("finite 2-D point")
    }

    pub fn xyz(x: f64, y: f64, z: f64) -> Self {
        Self::new(vec![x, y, z]).expect("finite 3-D point")
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.coords)
    }

    /// Coordinates in internal length units.
    pub(crate) fn to_scaled(&self) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.coords.iter().map(|c| c / LENGTH_SCALE))
    }

    pub(crate) fn from_scaled(v: &DVector<f64>) -> Result<Self> {
        Self::new(v.iter().map(|c| c * LENGTH_SCALE).collect())
    }

    pub fn from_vector(v: &DVector<f64>) -> Result<Self> {
        Self::new(v.iter().copied().collect())
    }

    pub fn translate(&self, offset: &[f64]) -> Result<Self> {
        check_dim(self.dim(), offset.len())?;
        Self::new(self.coords.iter().zip(offset).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Point").field(&self.coords).finish()
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Self::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.coords
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Euclidean distance between two points of equal dimension.
pub fn distance(p: &Point, q: &Point) -> Result<f64> {
    check_dim(p.dim(), q.dim())?;
    Ok(p.coords.iter().zip(&q.coords).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
}

/// Ordered sensor locations. The affine span of the anchors always has full
/// dimension, so pairwise-difference systems built from them have rank `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct AnchorSet {
    anchors: Vec<Point>,
}

impl AnchorSet {
    pub fn new(anchors: Vec<Point>) -> Result<Self> {
        let dim = anchors.first().map(Point::dim).ok_or(Error::TooFewAnchors { needed: 3, dim: 2, found: 0 })?;
        for a in &anchors {
            check_dim(dim, a.dim())?;
        }
        if anchors.len() < dim + 1 {
            return Err(Error::TooFewAnchors { needed: dim + 1, dim, found: anchors.len() });
        }
        let set = Self { anchors };
        let rank = set.affine_rank();
        if rank < dim {
            return Err(Error::DegenerateGeometry(format!(
                "anchors span an affine subspace of dimension {rank} in {dim}-D \
                 (collinear or coplanar); perturb the sensor locations"
            )));
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.anchors[0].dim()
    }

    pub fn points(&self) -> &[Point] {
        &self.anchors
    }

    pub fn get(&self, i: usize) -> Option<&Point> {
        self.anchors.get(i)
    }

    pub fn centroid(&self) -> Point {
        let n = self.len() as f64;
        let coords = (0..self.dim()).map(|k| self.anchors.iter().map(|a| a.coords[k]).sum::<f64>() / n).collect();
        Point::new(coords).expect("centroid of finite points is finite")
    }

    /// Anchor coordinates in internal length units.
    pub(crate) fn scaled(&self) -> Vec<DVector<f64>> {
        self.anchors.iter().map(Point::to_scaled).collect()
    }

    /// Mean anchor-to-centroid distance, meters.
    pub fn mean_radius(&self) -> f64 {
        let c = self.centroid();
        self.anchors.iter().map(|a| distance(a, &c).unwrap()).sum::<f64>() / self.len() as f64
    }

    pub fn translate(&self, offset: &[f64]) -> Result<Self> {
        Self::new(self.anchors.iter().map(|a| a.translate(offset)).collect::<Result<_>>()?)
    }

    /// Rank of the matrix with rows `x_i − x_1`, using a relative singular
    /// value threshold.
    fn affine_rank(&self) -> usize {
        let dim = self.dim();
        let base = self.anchors[0].to_scaled();
        let rows = self.len() - 1;
        let m = DMatrix::from_fn(rows, dim, |r, c| self.anchors[r + 1].coords[c] / LENGTH_SCALE - base[c]);
        let sv = m.singular_values();
        let max = sv.max();
        if max <= 0.0 || !max.is_finite() {
            return 0;
        }
        sv.iter().filter(|s| **s > RANK_TOL * max).count()
    }
}

impl TryFrom<Vec<Point>> for AnchorSet {
    type Error = Error;

    fn try_from(anchors: Vec<Point>) -> Result<Self> {
        Self::new(anchors)
    }
}

impl From<AnchorSet> for Vec<Point> {
    fn from(a: AnchorSet) -> Self {
        a.anchors
    }
}

/// Barycentric weights of a point with respect to an anchor set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Barycentric {
    pub beta: Vec<f64>,
}

impl Barycentric {
    /// All weights strictly above [`BARYCENTRIC_EPS`].
    pub fn is_strictly_positive(&self) -> bool {
        self.beta.iter().all(|b| *b > BARYCENTRIC_EPS)
    }

    /// `Σ β_i x_i`.
    pub fn reconstruct(&self, anchors: &AnchorSet) -> Result<Point> {
        check_dim(anchors.len(), self.beta.len())?;
        let coords = (0..anchors.dim())
            .map(|k| anchors.points().iter().zip(&self.beta).map(|(a, b)| b * a.coords[k]).sum())
            .collect();
        Point::new(coords)
    }
}

/// Solves `[Xᵀ; 1ᵀ] β = [y; 1]` for the simplex formed by `idx`. Returns
/// `None` when the simplex is degenerate.
fn simplex_weights(y: &DVector<f64>, anchors: &[DVector<f64>], idx: &[usize]) -> Option<Vec<f64>> {
    let dim = y.len();
    let k = idx.len();
    debug_assert_eq!(k, dim + 1);
    // Shift to the first vertex and normalise so the determinant test is
    // scale free.
    let origin = &anchors[idx[0]];
    let scale = idx.iter().map(|&i| (&anchors[i] - origin).norm()).fold(0.0, f64::max);
    if scale <= 0.0 {
        return None;
    }
    let edges = DMatrix::from_fn(dim, dim, |r, c| (anchors[idx[c + 1]][r] - origin[r]) / scale);
    let sv = edges.singular_values();
    if sv.min() <= RANK_TOL * sv.max() {
        return None;
    }
    let rhs = (y - origin) / scale;
    let tail = edges.lu().solve(&rhs)?;
    let mut beta = Vec::with_capacity(k);
    beta.push(1.0 - tail.sum());
    beta.extend(tail.iter());
    Some(beta)
}

/// Every (N+1)-subset of `0..n`, in lexicographic order.
fn simplices(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::with_capacity(size), &mut out);
    out
}

fn scaled_inputs(y: &Point, anchors: &AnchorSet) -> Result<(DVector<f64>, Vec<DVector<f64>>)> {
    check_dim(anchors.dim(), y.dim())?;
    Ok((y.to_scaled(), anchors.scaled()))
}

/// Barycentric coordinates of `y`.
///
/// With exactly `N+1` anchors the weights are unique. With more anchors the
/// representation is not unique; the first non-degenerate simplex (in
/// lexicographic order) whose weights are all non-negative is used, falling
/// back to the first non-degenerate simplex when `y` lies outside the hull.
pub fn barycentric_coordinates(y: &Point, anchors: &AnchorSet) -> Result<Barycentric> {
    let (ys, xs) = scaled_inputs(y, anchors)?;
    let n = anchors.len();
    let mut fallback = None;
    for idx in simplices(n, anchors.dim() + 1) {
        let Some(w) = simplex_weights(&ys, &xs, &idx) else {
            continue;
        };
        let mut beta = vec![0.0; n];
        for (i, b) in idx.iter().zip(&w) {
            beta[*i] = *b;
        }
        if w.iter().all(|b| *b >= -BARYCENTRIC_EPS) {
            return Ok(Barycentric { beta });
        }
        fallback.get_or_insert(beta);
    }
    fallback
        .map(|beta| Barycentric { beta })
        .ok_or_else(|| Error::DegenerateGeometry("no non-degenerate simplex among anchors".into()))
}

/// Whether `y` lies strictly inside the convex hull of the anchors.
///
/// Every simplex of anchors that contains `y` (closed) contributes its
/// barycentric vector; their average is itself a valid representation and
/// is strictly positive exactly when `y` is interior. Checking simplices one
/// at a time would misclassify interior points that sit on an internal
/// diagonal, such as the centre of a square.
pub fn in_open_convex_hull(y: &Point, anchors: &AnchorSet) -> Result<bool> {
    let (ys, xs) = scaled_inputs(y, anchors)?;
    let n = anchors.len();
    let mut sum = vec![0.0; n];
    let mut count = 0usize;
    let mut any_simplex = false;
    for idx in simplices(n, anchors.dim() + 1) {
        let Some(w) = simplex_weights(&ys, &xs, &idx) else {
            continue;
        };
        any_simplex = true;
        if w.iter().all(|b| *b >= -BARYCENTRIC_EPS) {
            for (i, b) in idx.iter().zip(&w) {
                sum[*i] += *b;
            }
            count += 1;
        }
    }
    if !any_simplex {
        return Err(Error::DegenerateGeometry("no non-degenerate simplex among anchors".into()));
    }
    if count == 0 {
        return Ok(false);
    }
    Ok(sum.iter().all(|s| s / count as f64 > BARYCENTRIC_EPS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn equilateral(r: f64) -> AnchorSet {
        let pts = (0..3)
            .map(|k| {
                let t = std::f64::consts::FRAC_PI_2 + k as f64 * 2.0 * std::f64::consts::PI / 3.0;
                Point::xy(r * t.cos(), r * t.sin())
            })
            .collect();
        AnchorSet::new(pts).unwrap()
    }

    #[test]
    fn distance_examples() {
        let p = Point::xy(3e-6, -1e-6);
        assert_eq!(distance(&p, &p).unwrap(), 0.0);
        let d = distance(&Point::xy(0.0, 0.0), &Point::xy(2e-6, 0.0)).unwrap();
        assert_eq!(d, 2e-6);
        let d = distance(&Point::xy(1e-6, 1e-6), &Point::xy(4e-6, 5e-6)).unwrap();
        assert!((d - 5e-6).abs() <= 1e-21);
    }

    #[test]
    fn distance_dimension_mismatch() {
        let e = distance(&Point::xy(0.0, 0.0), &Point::xyz(0.0, 0.0, 0.0)).unwrap_err();
        assert!(matches!(e, Error::DimensionMismatch { expected: 2, found: 3 }));
    }

    #[test]
    fn point_rejects_bad_input() {
        assert!(matches!(Point::new(vec![1.0]), Err(Error::UnsupportedDimension(1))));
        assert!(matches!(Point::new(vec![1.0, f64::NAN]), Err(Error::NonFinite(_))));
    }

    #[test]
    fn anchor_set_validation() {
        let collinear = vec![Point::xy(0.0, 0.0), Point::xy(1e-6, 1e-6), Point::xy(3e-6, 3e-6)];
        assert!(matches!(AnchorSet::new(collinear), Err(Error::DegenerateGeometry(_))));
        let coplanar = vec![
            Point::xyz(0.0, 0.0, 0.0),
            Point::xyz(1e-6, 0.0, 0.0),
            Point::xyz(0.0, 1e-6, 0.0),
            Point::xyz(1e-6, 1e-6, 0.0),
        ];
        assert!(matches!(AnchorSet::new(coplanar), Err(Error::DegenerateGeometry(_))));
        let two = vec![Point::xy(0.0, 0.0), Point::xy(1e-6, 0.0)];
        assert!(matches!(AnchorSet::new(two), Err(Error::TooFewAnchors { needed: 3, .. })));
        let mixed = vec![Point::xy(0.0, 0.0), Point::xy(1e-6, 0.0), Point::xyz(0.0, 1.0, 0.0)];
        assert!(matches!(AnchorSet::new(mixed), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn barycentric_centroid_and_vertex() {
        let a = equilateral(10e-6);
        let b = barycentric_coordinates(&a.centroid(), &a).unwrap();
        for w in &b.beta {
            assert!((w - 1.0 / 3.0).abs() < 1e-12);
        }
        let b = barycentric_coordinates(&a.points()[0], &a).unwrap();
        assert!((b.beta[0] - 1.0).abs() < 1e-12);
        assert!(b.beta[1].abs() < 1e-12 && b.beta[2].abs() < 1e-12);
    }

    #[test]
    fn hull_examples() {
        let a = equilateral(10e-6);
        assert!(in_open_convex_hull(&a.centroid(), &a).unwrap());
        for v in a.points() {
            assert!(!in_open_convex_hull(v, &a).unwrap());
        }
        let p = a.points();
        let mid = Point::xy((p[0].coords()[0] + p[1].coords()[0]) / 2.0, (p[0].coords()[1] + p[1].coords()[1]) / 2.0);
        assert!(!in_open_convex_hull(&mid, &a).unwrap());
        assert!(!in_open_convex_hull(&Point::xy(20e-6, 0.0), &a).unwrap());
    }

    #[test]
    fn hull_square_centre_on_diagonal() {
        let sq = AnchorSet::new(vec![
            Point::xy(0.0, 0.0),
            Point::xy(1e-5, 0.0),
            Point::xy(1e-5, 1e-5),
            Point::xy(0.0, 1e-5),
        ])
        .unwrap();
        assert!(in_open_convex_hull(&Point::xy(5e-6, 5e-6), &sq).unwrap());
        assert!(in_open_convex_hull(&Point::xy(2e-6, 2e-6), &sq).unwrap());
        assert!(!in_open_convex_hull(&Point::xy(5e-6, 0.0), &sq).unwrap());
        let b = barycentric_coordinates(&Point::xy(5e-6, 5e-6), &sq).unwrap();
        let back = b.reconstruct(&sq).unwrap();
        assert!(distance(&back, &Point::xy(5e-6, 5e-6)).unwrap() < 1e-17);
    }

    #[test]
    fn hull_3d_tetrahedron() {
        let t = AnchorSet::new(vec![
            Point::xyz(0.0, 0.0, 0.0),
            Point::xyz(1e-5, 0.0, 0.0),
            Point::xyz(0.0, 1e-5, 0.0),
            Point::xyz(0.0, 0.0, 1e-5),
        ])
        .unwrap();
        assert!(in_open_convex_hull(&Point::xyz(2e-6, 2e-6, 2e-6), &t).unwrap());
        assert!(!in_open_convex_hull(&Point::xyz(2e-6, 2e-6, 0.0), &t).unwrap());
        assert!(!in_open_convex_hull(&Point::xyz(5e-6, 5e-6, 5e-6), &t).unwrap());
    }

    /// Brute-force same-side-of-edge test for a triangle.
    fn same_side_oracle(y: &[f64], tri: &[[f64; 2]; 3]) -> bool {
        let cross = |a: [f64; 2], b: [f64; 2], p: &[f64]| (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        let s: Vec<f64> = (0..3).map(|i| cross(tri[i], tri[(i + 1) % 3], y)).collect();
        s.iter().all(|v| *v > 0.0) || s.iter().all(|v| *v < 0.0)
    }

    #[test]
    fn hull_agrees_with_edge_sign_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut disagreements = 0;
        let mut checked = 0;
        while checked < 10_000 {
            let tri: [[f64; 2]; 3] =
                std::array::from_fn(|_| [rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)]);
            let Ok(a) = AnchorSet::new(tri.iter().map(|p| Point::xy(p[0] * 1e-6, p[1] * 1e-6)).collect()) else {
                continue;
            };
            let y = [rng.random_range(-12.0..12.0), rng.random_range(-12.0..12.0)];
            let got = in_open_convex_hull(&Point::xy(y[0] * 1e-6, y[1] * 1e-6), &a).unwrap();
            if got != same_side_oracle(&y, &tri) {
                disagreements += 1;
            }
            checked += 1;
        }
        assert_eq!(disagreements, 0);
    }

    proptest! {
        #[test]
        fn distance_symmetric(a in prop::array::uniform3(-1e-4..1e-4f64), b in prop::array::uniform3(-1e-4..1e-4f64)) {
            let p = Point::new(a.to_vec()).unwrap();
            let q = Point::new(b.to_vec()).unwrap();
            prop_assert_eq!(distance(&p, &q).unwrap(), distance(&q, &p).unwrap());
        }

        #[test]
        fn triangle_inequality(a in prop::array::uniform2(-1e-4..1e-4f64), b in prop::array::uniform2(-1e-4..1e-4f64), c in prop::array::uniform2(-1e-4..1e-4f64)) {
            let (p, q, r) = (Point::new(a.to_vec()).unwrap(), Point::new(b.to_vec()).unwrap(), Point::new(c.to_vec()).unwrap());
            let lhs = distance(&p, &r).unwrap();
            let rhs = distance(&p, &q).unwrap() + distance(&q, &r).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-15));
        }

        #[test]
        fn barycentric_round_trip(
            tri in prop::array::uniform3(prop::array::uniform2(-10.0..10.0f64)),
            w in prop::array::uniform3(0.05..1.0f64),
        ) {
            let Ok(a) = AnchorSet::new(tri.iter().map(|p| Point::xy(p[0] * 1e-6, p[1] * 1e-6)).collect()) else {
                return Ok(());
            };
            let s: f64 = w.iter().sum();
            let y = Point::xy(
                tri.iter().zip(&w).map(|(p, wi)| p[0] * wi / s).sum::<f64>() * 1e-6,
                tri.iter().zip(&w).map(|(p, wi)| p[1] * wi / s).sum::<f64>() * 1e-6,
            );
            let b = barycentric_coordinates(&y, &a).unwrap();
            prop_assert!((b.beta.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            let back = b.reconstruct(&a).unwrap();
            let scale = y.coords().iter().fold(1e-6f64, |m, c| m.max(c.abs()));
            prop_assert!(distance(&back, &y).unwrap() <= 1e-12 * scale);
        }
    }
}
