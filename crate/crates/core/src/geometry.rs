//! Points, induced balls, and convex-combination membership of the origin.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// A point (or vector) in `R^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index: 0 });
        }
        Ok(Point(coords))
    }

    /// Builds a point without validation. Callers guarantee finiteness.
    pub(crate) fn from_vec(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Point) -> f64 {
        linalg::dot(&self.0, &other.0)
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.0)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        linalg::dist(&self.0, &other.0)
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point(linalg::sub(&self.0, &other.0))
    }

    pub fn add(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scaled(&self, factor: f64) -> Point {
        Point(self.0.iter().map(|a| a * factor).collect())
    }

    /// `self + factor * dir`
    pub fn offset(&self, dir: &Point, factor: f64) -> Point {
        Point(self.0.iter().zip(&dir.0).map(|(a, b)| a + factor * b).collect())
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| 0.5 * (a + b)).collect())
    }

    fn check_dim(&self, other: &Point) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

/// A nonempty, dimension-tagged list of points. Repeated points are allowed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPointSet")]
pub struct PointSet {
    dim: usize,
    points: Vec<Point>,
}

#[derive(Deserialize)]
struct RawPointSet {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl TryFrom<RawPointSet> for PointSet {
    type Error = Error;

    fn try_from(raw: RawPointSet) -> Result<Self> {
        let ps = PointSet::from_rows(&raw.points)?;
        if ps.dim != raw.dim {
            return Err(Error::DimensionMismatch {
                expected: raw.dim,
                found: ps.dim,
            });
        }
        Ok(ps)
    }
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput("point set"))?;
        let dim = first.dim();
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for (index, p) in points.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            if p.coords().iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite { index });
            }
        }
        Ok(PointSet { dim, points })
    }

    /// Convenience constructor from raw coordinate rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let points = rows
            .iter()
            .map(|r| Point::from_vec(r.as_ref().to_vec()))
            .collect();
        Self::new(points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn get(&self, i: usize) -> Result<&Point> {
        self.points.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.points.len(),
        })
    }

    pub(crate) fn replace(&mut self, i: usize, p: Point) {
        self.points[i] = p;
    }

    /// Length of the bounding-box diagonal. All scale-relative tolerances
    /// are expressed against this value.
    pub fn scale(&self) -> f64 {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in &self.points {
            for (k, &c) in p.coords().iter().enumerate() {
                lo[k] = lo[k].min(c);
                hi[k] = hi[k].max(c);
            }
        }
        linalg::dist(&lo, &hi)
    }

    /// Smallest pairwise distance, with the pair attaining it.
    pub fn min_pairwise_distance(&self) -> Option<(f64, usize, usize)> {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let d = self.points[i].distance(&self.points[j]);
                if best.is_none_or(|(b, _, _)| d < b) {
                    best = Some((d, i, j));
                }
            }
        }
        best
    }

    /// Fails with the first pair closer than `1e-12 * scale`.
    pub fn check_distinct(&self) -> Result<()> {
        let tol = 1e-12 * self.scale().max(f64::MIN_POSITIVE);
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if self.points[i].distance(&self.points[j]) <= tol {
                    return Err(Error::DuplicatePoints(i, j));
                }
            }
        }
        Ok(())
    }
}

/// A closed (or open, depending on the query) Euclidean ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Containment {
    Open,
    Closed,
}

/// The closed ball with diameter `ab`.
pub fn induced_ball(a: &Point, b: &Point) -> Result<Ball> {
    a.check_dim(b)?;
    Ok(Ball {
        center: a.midpoint(b),
        radius: 0.5 * a.distance(b),
    })
}

pub fn ball_contains(ball: &Ball, x: &Point, mode: Containment, tol: f64) -> Result<bool> {
    ball.center.check_dim(x)?;
    let d = ball.center.distance(x);
    Ok(match mode {
        Containment::Closed => d <= ball.radius + tol,
        Containment::Open => d < ball.radius - tol,
    })
}

/// Convex weights attached to a subset of some indexed family of vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexCombination {
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
}

impl ConvexCombination {
    /// `sum_k weights[k] * vectors[indices[k]]`
    pub fn combine(&self, vectors: &[Point]) -> Point {
        let dim = vectors.first().map_or(0, Point::dim);
        let mut acc = vec![0.0; dim];
        for (&i, &w) in self.indices.iter().zip(&self.weights) {
            for (a, c) in acc.iter_mut().zip(vectors[i].coords()) {
                *a += w * c;
            }
        }
        Point::from_vec(acc)
    }

    pub fn support_size(&self) -> usize {
        self.weights.iter().filter(|&&w| w > 0.0).count()
    }
}

/// `1e-9 * (1 + max input norm)`
pub fn default_hull_tolerance(vectors: &[Point]) -> f64 {
    let max_norm = vectors.iter().map(Point::norm).fold(0.0, f64::max);
    1e-9 * (1.0 + max_norm)
}

const WOLFE_MAX_MAJOR: usize = 1000;
const WEIGHT_EPS: f64 = 1e-14;

/// Decides whether the origin lies in the convex hull of `vectors`, returning
/// a combination whose recombined norm is at most `tol` when it does. The
/// returned support has at most `d + 1` vectors.
///
/// The minimum-norm point of the hull is found with Wolfe's corral method,
/// which is finite and keeps the corral affinely independent.
pub fn origin_in_convex_hull(vectors: &[Point], tol: f64) -> Result<Option<ConvexCombination>> {
    let first = vectors.first().ok_or(Error::EmptyInput("vector list"))?;
    let dim = first.dim();
    for v in vectors {
        first.check_dim(v)?;
    }
    let (support, weights) = min_norm_point(vectors);
    let mut combo = ConvexCombination {
        indices: support,
        weights,
    };
    if combo.combine(vectors).norm() > tol {
        return Ok(None);
    }
    reduce_support(vectors, &mut combo, dim);
    Ok(Some(combo))
}

/// Wolfe's minimum-norm-point algorithm over the convex hull of `vectors`.
fn min_norm_point(vectors: &[Point]) -> (Vec<usize>, Vec<f64>) {
    let max_sq = vectors.iter().map(|v| v.dot(v)).fold(0.0, f64::max);
    let start = (0..vectors.len())
        .min_by(|&a, &b| vectors[a].dot(&vectors[a]).total_cmp(&vectors[b].dot(&vectors[b])))
        .unwrap_or(0);
    let mut corral = vec![start];
    let mut lambda = vec![1.0];
    let mut x = vectors[start].clone();

    for _ in 0..WOLFE_MAX_MAJOR {
        let xx = x.dot(&x);
        if xx <= f64::MIN_POSITIVE {
            break;
        }
        let (j, vjx) = (0..vectors.len())
            .map(|j| (j, vectors[j].dot(&x)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        if xx - vjx <= 1e-15 * max_sq || corral.contains(&j) {
            break;
        }
        corral.push(j);
        lambda.push(0.0);

        loop {
            let Some(alpha) = affine_minimizer(vectors, &corral) else {
                // Numerically dependent corral: drop the newcomer and stop.
                corral.pop();
                lambda.pop();
                return (corral, normalize(lambda));
            };
            if alpha.iter().all(|&a| a > WEIGHT_EPS) {
                lambda = alpha;
                break;
            }
            let mut theta = 1.0f64;
            let mut drop = 0;
            for k in 0..corral.len() {
                if alpha[k] <= WEIGHT_EPS {
                    let denom = lambda[k] - alpha[k];
                    let t = if denom > 0.0 { lambda[k] / denom } else { 0.0 };
                    if t < theta {
                        theta = t;
                        drop = k;
                    }
                }
            }
            for k in 0..corral.len() {
                lambda[k] += theta * (alpha[k] - lambda[k]);
            }
            lambda[drop] = 0.0;
            let mut k = 0;
            while k < corral.len() {
                if lambda[k] <= WEIGHT_EPS {
                    corral.remove(k);
                    lambda.remove(k);
                } else {
                    k += 1;
                }
            }
            if corral.is_empty() {
                corral.push(start);
                lambda.push(1.0);
                break;
            }
            lambda = normalize(lambda);
        }
        x = combination_point(vectors, &corral, &lambda);
    }
    (corral, normalize(lambda))
}

/// Minimum-norm point of the affine hull of the corral, as affine weights.
fn affine_minimizer(vectors: &[Point], corral: &[usize]) -> Option<Vec<f64>> {
    let m = corral.len();
    if m == 1 {
        return Some(vec![1.0]);
    }
    let base = &vectors[corral[0]];
    let diffs: Vec<Point> = corral[1..].iter().map(|&k| vectors[k].sub(base)).collect();
    let gram = DMatrix::from_fn(m - 1, m - 1, |i, j| diffs[i].dot(&diffs[j]));
    let rhs = DVector::from_fn(m - 1, |i, _| -diffs[i].dot(base));
    let beta = linalg::solve_full_rank(gram, &[rhs])?.pop()?;
    let mut alpha = Vec::with_capacity(m);
    alpha.push(1.0 - beta.sum());
    alpha.extend(beta.iter());
    Some(alpha)
}

fn combination_point(vectors: &[Point], idx: &[usize], weights: &[f64]) -> Point {
    ConvexCombination {
        indices: idx.to_vec(),
        weights: weights.to_vec(),
    }
    .combine(vectors)
}

fn normalize(mut w: Vec<f64>) -> Vec<f64> {
    for x in w.iter_mut() {
        *x = x.max(0.0);
    }
    let s: f64 = w.iter().sum();
    if s > 0.0 {
        for x in w.iter_mut() {
            *x /= s;
        }
    }
    w
}

/// Carathéodory reduction: while more than `dim + 1` vectors carry weight,
/// move along an affine dependence until one weight vanishes.
fn reduce_support(vectors: &[Point], combo: &mut ConvexCombination, dim: usize) {
    loop {
        let keep: Vec<usize> = (0..combo.indices.len())
            .filter(|&k| combo.weights[k] > 0.0)
            .collect();
        combo.indices = keep.iter().map(|&k| combo.indices[k]).collect();
        combo.weights = keep.iter().map(|&k| combo.weights[k]).collect();
        let m = combo.indices.len();
        if m <= dim + 1 {
            break;
        }
        let a = DMatrix::from_fn(dim + 1, m, |r, c| {
            if r < dim {
                vectors[combo.indices[c]].coords()[r]
            } else {
                1.0
            }
        });
        let Some(mu) = linalg::smallest_right_singular(a) else {
            break;
        };
        let mu: Vec<f64> = if mu.iter().any(|&v| v > 0.0) {
            mu.iter().copied().collect()
        } else {
            mu.iter().map(|v| -v).collect()
        };
        let (drop, t) = (0..m)
            .filter(|&k| mu[k] > 0.0)
            .map(|k| (k, combo.weights[k] / mu[k]))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("dependence has a positive entry");
        for k in 0..m {
            combo.weights[k] -= t * mu[k];
        }
        combo.weights[drop] = 0.0;
        combo.weights = normalize(std::mem::take(&mut combo.weights));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn induced_ball_examples() {
        let b = induced_ball(&p(&[0.0, 0.0]), &p(&[2.0, 0.0])).unwrap();
        assert_eq!(b.center, p(&[1.0, 0.0]));
        assert_eq!(b.radius, 1.0);

        let b = induced_ball(&p(&[0.0, 0.0]), &p(&[0.0, 0.0])).unwrap();
        assert_eq!(b.center, p(&[0.0, 0.0]));
        assert_eq!(b.radius, 0.0);

        let b = induced_ball(&p(&[0.0, 0.0]), &p(&[3.0, 4.0])).unwrap();
        assert_eq!(b.center, p(&[1.5, 2.0]));
        assert_eq!(b.radius, 2.5);
    }

    #[test]
    fn induced_ball_rejects_mixed_dimensions() {
        assert!(matches!(
            induced_ball(&p(&[0.0]), &p(&[0.0, 1.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn containment_modes() {
        let ball = Ball {
            center: p(&[1.0, 0.0]),
            radius: 1.0,
        };
        let x = p(&[1.0, 1.0]);
        assert!(ball_contains(&ball, &x, Containment::Closed, 0.0).unwrap());
        assert!(!ball_contains(&ball, &x, Containment::Open, 0.0).unwrap());

        let a = p(&[0.3, -2.0]);
        let b = p(&[4.0, 1.5]);
        let ind = induced_ball(&a, &b).unwrap();
        // Endpoints are on the boundary; allow the one rounding step of the midpoint.
        let tol = 4.0 * f64::EPSILON * ind.radius;
        assert!(ball_contains(&ind, &a, Containment::Closed, tol).unwrap());
        assert!(ball_contains(&ind, &b, Containment::Closed, tol).unwrap());
    }

    #[test]
    fn hull_antipodal_pair() {
        let v = [p(&[1.0, 0.0]), p(&[-1.0, 0.0])];
        let c = origin_in_convex_hull(&v, 1e-12).unwrap().unwrap();
        let mut pairs: Vec<_> = c.indices.iter().copied().zip(c.weights.iter().copied()).collect();
        pairs.sort_by_key(|x| x.0);
        assert_eq!(pairs.len(), 2);
        assert_abs_diff_eq!(pairs[0].1, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(pairs[1].1, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn hull_open_quadrant() {
        let v = [p(&[1.0, 0.0]), p(&[0.0, 1.0])];
        assert!(origin_in_convex_hull(&v, 1e-9).unwrap().is_none());
    }

    #[test]
    fn hull_threefold_symmetry() {
        let s = 3f64.sqrt() / 2.0;
        let v = [p(&[1.0, 0.0]), p(&[-0.5, s]), p(&[-0.5, -s])];
        let c = origin_in_convex_hull(&v, 1e-12).unwrap().unwrap();
        assert_eq!(c.indices.len(), 3);
        for w in &c.weights {
            assert_abs_diff_eq!(*w, 1.0 / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn hull_coincident_vectors() {
        let v = [p(&[1.0, 1.0]), p(&[1.0, 1.0]), p(&[-1.0, -1.0]), p(&[-1.0, -1.0])];
        let c = origin_in_convex_hull(&v, 1e-12).unwrap().unwrap();
        assert!(c.combine(&v).norm() <= 1e-12);
        assert!(c.support_size() <= 3);
    }

    #[test]
    fn hull_empty_input() {
        assert!(matches!(
            origin_in_convex_hull(&[], 1e-9),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn support_reduced_to_caratheodory_bound() {
        // Origin inside a hexagon: many valid combinations, at most 3 in the plane.
        let v: Vec<Point> = (0..6)
            .map(|k| {
                let t = k as f64 * std::f64::consts::PI / 3.0;
                p(&[t.cos(), t.sin()])
            })
            .collect();
        let c = origin_in_convex_hull(&v, 1e-12).unwrap().unwrap();
        assert!(c.support_size() <= 3);
        assert!(c.combine(&v).norm() <= 1e-12);
    }

    #[test]
    fn pointset_validation() {
        assert!(matches!(PointSet::new(vec![]), Err(Error::EmptyInput(_))));
        assert!(matches!(
            PointSet::from_rows(&[vec![0.0, 1.0], vec![1.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            PointSet::from_rows(&[vec![0.0, f64::NAN]]),
            Err(Error::NonFinite { index: 0 })
        ));
    }

    #[test]
    fn point_set_json_round_trip() {
        let ps = PointSet::from_rows(&[[0.1, -2.0], [1e-300, 3.5]]).unwrap();
        let text = serde_json::to_string(&ps).unwrap();
        assert_eq!(text, r#"{"dim":2,"points":[[0.1,-2.0],[1e-300,3.5]]}"#);
        let back: PointSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, ps);
        assert!(serde_json::from_str::<PointSet>(r#"{"dim":3,"points":[[0,1]]}"#).is_err());
        assert!(serde_json::from_str::<PointSet>(r#"{"dim":2,"points":[[0,1],[2]]}"#).is_err());
        assert!(serde_json::from_str::<PointSet>(r#"{"dim":2,"points":[]}"#).is_err());
    }
}
