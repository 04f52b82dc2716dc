//! Minimizing pointwise maxima of shifted distance functions
//! `f_i(x) = |x - c_i| + w_i`.
//!
//! With all shifts zero this is the smallest enclosing ball of the centers
//! (`H(x) = max |x - a|`). With `w_i = -r_i` it is the smallest ball meeting
//! every ball `B(c_i, r_i)` (`F(x) = max |x - c_i| - r_i`), whose value goes
//! negative once the balls share interior points.
//!
//! Both are LP-type problems. The solver keeps a working set of at most
//! `d + 2` terms (barring degenerate ties), solves it exactly by enumerating
//! tangency systems of its subsets, and adds the worst violator until none
//! remains. Each round strictly raises the working-set optimum, so it
//! terminates.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{origin_in_convex_hull, Ball, ConvexCombination, Point, PointSet};
use crate::linalg;

const MAX_ROUNDS: usize = 10_000;

/// Terms `f_i(x) = |x - centers[i]| + offsets[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceTerms {
    centers: Vec<Point>,
    offsets: Vec<f64>,
}

impl DistanceTerms {
    pub fn new(centers: Vec<Point>, offsets: Vec<f64>) -> Result<Self> {
        let first = centers.first().ok_or(Error::EmptyInput("minimax terms"))?;
        if centers.len() != offsets.len() {
            return Err(Error::InvalidGraph(format!(
                "{} centers but {} offsets",
                centers.len(),
                offsets.len()
            )));
        }
        let dim = first.dim();
        for (index, (c, w)) in centers.iter().zip(&offsets).enumerate() {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: c.dim(),
                });
            }
            if !w.is_finite() || c.coords().iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { index });
            }
        }
        Ok(DistanceTerms { centers, offsets })
    }

    /// `H(x) = max_a |x - a|`
    pub fn for_points(ps: &PointSet) -> Self {
        DistanceTerms {
            centers: ps.points().to_vec(),
            offsets: vec![0.0; ps.len()],
        }
    }

    /// `F(x) = max_i |x - c_i| - r_i`
    pub fn for_balls(balls: &[Ball]) -> Result<Self> {
        Self::new(
            balls.iter().map(|b| b.center.clone()).collect(),
            balls.iter().map(|b| -b.radius).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.centers[0].dim()
    }

    pub fn center(&self, i: usize) -> &Point {
        &self.centers[i]
    }

    pub fn offset(&self, i: usize) -> f64 {
        self.offsets[i]
    }

    pub fn term(&self, i: usize, x: &Point) -> f64 {
        self.centers[i].distance(x) + self.offsets[i]
    }

    pub fn eval(&self, x: &Point) -> f64 {
        (0..self.len())
            .map(|i| self.term(i, x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Bounding-box diagonal of the centers plus twice the largest shift.
    pub fn scale(&self) -> f64 {
        let dim = self.dim();
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for c in &self.centers {
            for (k, &v) in c.coords().iter().enumerate() {
                lo[k] = lo[k].min(v);
                hi[k] = hi[k].max(v);
            }
        }
        let spread = self.offsets.iter().map(|w| w.abs()).fold(0.0, f64::max);
        linalg::dist(&lo, &hi) + 2.0 * spread
    }

    fn eval_subset(&self, subset: &[usize], x: &Point) -> f64 {
        subset
            .iter()
            .map(|&i| self.term(i, x))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Outcome of a minimax solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimaxResult {
    pub minimizer: Point,
    pub value: f64,
    /// Terms attaining `value` within [`active_tolerance`].
    pub active: Vec<usize>,
    /// Gradients `(y - c_i) / |y - c_i|` of the active terms, aligned with
    /// `active`. Nondifferentiable terms hold a zero vector and are listed in
    /// `nondifferentiable`.
    pub gradients: Vec<Point>,
    pub nondifferentiable: Vec<usize>,
    /// Convex weights over `active` positions balancing the gradients.
    pub certificate: Option<ConvexCombination>,
    pub scale: f64,
    pub rounds: usize,
}

pub fn active_tolerance(scale: f64) -> f64 {
    1e-7 * (1.0 + scale)
}

/// Gradient-balance tolerance for certificates.
pub fn certificate_tolerance(scale: f64) -> f64 {
    1e-8 * scale
}

fn nondiff_tolerance(scale: f64) -> f64 {
    1e-12 * scale.max(f64::MIN_POSITIVE)
}

/// Center and radius of the smallest ball containing `ps`; the active set is
/// the set of points on its boundary.
pub fn smallest_enclosing_ball(ps: &PointSet) -> Result<MinimaxResult> {
    minimize(&DistanceTerms::for_points(ps))
}

/// Minimizer of `F(x) = max_i |x - c_i| - r_i`.
pub fn min_intersecting_ball(balls: &[Ball]) -> Result<MinimaxResult> {
    if balls.is_empty() {
        return Err(Error::EmptyInput("ball list"));
    }
    minimize(&DistanceTerms::for_balls(balls)?)
}

/// Solves `min_x max_i f_i(x)` for arbitrary terms.
pub fn minimize(terms: &DistanceTerms) -> Result<MinimaxResult> {
    if terms.is_empty() {
        return Err(Error::EmptyInput("minimax terms"));
    }
    let scale = terms.scale();
    let (minimizer, rounds) = solve(terms, scale);
    let value = terms.eval(&minimizer);
    let mut result = MinimaxResult {
        minimizer,
        value,
        active: Vec::new(),
        gradients: Vec::new(),
        nondifferentiable: Vec::new(),
        certificate: None,
        scale,
        rounds,
    };
    result.active = active_set(&result, terms, active_tolerance(scale));
    let eps = nondiff_tolerance(scale);
    for &i in &result.active {
        let diff = result.minimizer.sub(terms.center(i));
        let n = diff.norm();
        if n <= eps {
            result.nondifferentiable.push(i);
            result.gradients.push(Point::zeros(terms.dim()));
        } else {
            result.gradients.push(diff.scaled(1.0 / n));
        }
    }
    result.certificate = optimality_certificate(&result).ok();
    Ok(result)
}

/// Terms within `tol_act` of the optimal value at the minimizer. Never empty.
pub fn active_set(result: &MinimaxResult, terms: &DistanceTerms, tol_act: f64) -> Vec<usize> {
    let vals: Vec<f64> = (0..terms.len())
        .map(|i| terms.term(i, &result.minimizer))
        .collect();
    let mut active: Vec<usize> = (0..vals.len())
        .filter(|&i| result.value - vals[i] <= tol_act)
        .collect();
    if active.is_empty() {
        let best = (0..vals.len())
            .max_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(b.cmp(&a)))
            .expect("nonempty");
        active.push(best);
    }
    active
}

/// Convex weights on the active gradients combining to (nearly) zero: the
/// first-order optimality condition for a maximum of convex functions.
/// Indices in the returned combination refer to positions in
/// `result.active` / `result.gradients`.
pub fn optimality_certificate(result: &MinimaxResult) -> Result<ConvexCombination> {
    if let Some(&index) = result.nondifferentiable.first() {
        return Err(Error::NondifferentiableActive { index });
    }
    let tol = certificate_tolerance(result.scale);
    origin_in_convex_hull(&result.gradients, tol)?.ok_or_else(|| {
        Error::CertificateFailure(format!(
            "active gradients do not balance within {tol:e}"
        ))
    })
}

fn solve(terms: &DistanceTerms, scale: f64) -> (Point, usize) {
    let violation_tol = 1e-13 * (1.0 + scale);
    let tie_tol = 1e-12 * (1.0 + scale);
    let start = (0..terms.len())
        .max_by(|&a, &b| terms.offsets[a].total_cmp(&terms.offsets[b]).then(b.cmp(&a)))
        .expect("nonempty");
    let mut work = vec![start];
    let mut best: Option<(Point, f64)> = None;

    for round in 0..MAX_ROUNDS {
        let (x, work_value) = solve_subset(terms, &work);
        let full_value = terms.eval(&x);
        if best.as_ref().is_none_or(|(_, v)| full_value < *v) {
            best = Some((x.clone(), full_value));
        }
        let (viol, viol_value) = (0..terms.len())
            .map(|j| (j, terms.term(j, &x)))
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
            .expect("nonempty");
        if viol_value <= work_value + violation_tol || work.contains(&viol) {
            return (best.expect("set above").0, round + 1);
        }
        let mut next: Vec<usize> = work
            .iter()
            .copied()
            .filter(|&i| work_value - terms.term(i, &x) <= tie_tol)
            .collect();
        next.push(viol);
        next.sort_unstable();
        next.dedup();
        work = next;
    }
    (best.expect("at least one round").0, MAX_ROUNDS)
}

/// Exact minimizer of the maximum over `subset`, by enumerating the tangency
/// candidates of every sub-subset of size at most `d + 1`.
fn solve_subset(terms: &DistanceTerms, subset: &[usize]) -> (Point, f64) {
    if let [only] = subset {
        return (terms.centers[*only].clone(), terms.offsets[*only]);
    }
    let max_size = (terms.dim() + 1).min(subset.len());
    let mut best: Option<(Point, f64)> = None;
    let mut chosen = Vec::with_capacity(max_size);
    for size in 1..=max_size {
        for_each_combination(subset, size, &mut chosen, 0, &mut |basis| {
            for x in basis_candidates(terms, basis) {
                let v = terms.eval_subset(subset, &x);
                if best.as_ref().is_none_or(|(_, b)| v < *b) {
                    best = Some((x, v));
                }
            }
        });
    }
    best.expect("singletons always yield a candidate")
}

fn for_each_combination<F: FnMut(&[usize])>(
    items: &[usize],
    size: usize,
    chosen: &mut Vec<usize>,
    from: usize,
    visit: &mut F,
) {
    if chosen.len() == size {
        visit(chosen);
        return;
    }
    let need = size - chosen.len();
    for k in from..=items.len() - need {
        chosen.push(items[k]);
        for_each_combination(items, size, chosen, k + 1, visit);
        chosen.pop();
    }
}

/// Points `x` in the affine hull of the basis centers with
/// `|x - c_k| + w_k` equal across the basis.
///
/// Writing `x = c_0 + y` and `e_j = c_j - c_0`, the pairwise differences of
/// the squared equations are linear: `y . e_j = b_j + R g_j`. Solving the Gram
/// system leaves `y = p + R q`, and `|y|^2 = (R - w_0)^2` is a quadratic in
/// `R`. Spurious roots are harmless because callers evaluate each candidate.
fn basis_candidates(terms: &DistanceTerms, basis: &[usize]) -> Vec<Point> {
    let c0 = &terms.centers[basis[0]];
    let w0 = terms.offsets[basis[0]];
    if basis.len() == 1 {
        return vec![c0.clone()];
    }
    let m = basis.len() - 1;
    let edges: Vec<Point> = basis[1..].iter().map(|&j| terms.centers[j].sub(c0)).collect();
    let gram = DMatrix::from_fn(m, m, |i, j| edges[i].dot(&edges[j]));
    let b = DVector::from_fn(m, |i, _| {
        let wj = terms.offsets[basis[i + 1]];
        0.5 * (edges[i].dot(&edges[i]) - wj * wj + w0 * w0)
    });
    let g = DVector::from_fn(m, |i, _| terms.offsets[basis[i + 1]] - w0);
    let Some(sol) = linalg::solve_full_rank(gram, &[b, g]) else {
        return Vec::new();
    };
    let combine = |coef: &DVector<f64>| {
        let mut acc = Point::zeros(terms.dim());
        for (e, &c) in edges.iter().zip(coef.iter()) {
            acc = acc.offset(e, c);
        }
        acc
    };
    let p = combine(&sol[0]);
    let q = combine(&sol[1]);

    let qa = q.dot(&q) - 1.0;
    let qb = 2.0 * (p.dot(&q) + w0);
    let qc = p.dot(&p) - w0 * w0;
    let mut radii = Vec::with_capacity(2);
    if qa.abs() <= 1e-14 * (1.0 + qb.abs()) {
        if qb != 0.0 {
            radii.push(-qc / qb);
        }
    } else {
        let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
        // Stable root pair.
        let t = -0.5 * (qb + qb.signum() * disc);
        if t != 0.0 {
            radii.push(t / qa);
            radii.push(qc / t);
        } else {
            radii.push(0.0);
        }
    }
    radii
        .into_iter()
        .filter(|r| r.is_finite())
        .map(|r| c0.add(&p).offset(&q, r))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ps(rows: &[[f64; 2]]) -> PointSet {
        PointSet::from_rows(rows).unwrap()
    }

    fn ball(c: [f64; 2], r: f64) -> Ball {
        Ball {
            center: Point::new(c.to_vec()).unwrap(),
            radius: r,
        }
    }

    #[test]
    fn seb_singleton() {
        let r = smallest_enclosing_ball(&ps(&[[5.0, 5.0]])).unwrap();
        assert_eq!(r.minimizer.coords(), &[5.0, 5.0]);
        assert_eq!(r.value, 0.0);
        assert_eq!(r.active, vec![0]);
        assert!(r.certificate.is_none());
        assert!(matches!(
            optimality_certificate(&r),
            Err(Error::NondifferentiableActive { index: 0 })
        ));
    }

    #[test]
    fn seb_two_points() {
        let r = smallest_enclosing_ball(&ps(&[[0.0, 0.0], [2.0, 0.0]])).unwrap();
        assert_abs_diff_eq!(r.minimizer.coords()[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.minimizer.coords()[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-15);
        assert_eq!(r.gradients[0].coords(), &[1.0, 0.0]);
        assert_eq!(r.gradients[1].coords(), &[-1.0, 0.0]);
        let cert = r.certificate.unwrap();
        for w in cert.weights {
            assert_abs_diff_eq!(w, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn seb_equilateral_triangle() {
        // Oracle: the circumcenter of the triple, radius 1/sqrt(3), is the
        // only feasible support candidate (pair balls miss the third vertex).
        let h = 3f64.sqrt() / 2.0;
        let r = smallest_enclosing_ball(&ps(&[[0.0, 0.0], [1.0, 0.0], [0.5, h]])).unwrap();
        assert_abs_diff_eq!(r.value, 0.577_350_269_189_625_8, epsilon = 1e-12);
        assert_eq!(r.active.len(), 3);
        let cert = r.certificate.unwrap();
        assert_eq!(cert.indices.len(), 3);
        for w in cert.weights {
            assert_abs_diff_eq!(w, 1.0 / 3.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn seb_empty_is_an_error() {
        assert!(matches!(
            minimize(&DistanceTerms {
                centers: vec![],
                offsets: vec![]
            }),
            Err(Error::EmptyInput(_))
        ));
        assert!(matches!(min_intersecting_ball(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn intersecting_single_ball() {
        let r = min_intersecting_ball(&[ball([3.0, -1.0], 2.0)]).unwrap();
        assert_eq!(r.minimizer.coords(), &[3.0, -1.0]);
        assert_eq!(r.value, -2.0);
        assert_eq!(r.active, vec![0]);
    }

    #[test]
    fn intersecting_disjoint_unit_balls() {
        let r = min_intersecting_ball(&[ball([0.0, 0.0], 1.0), ball([4.0, 0.0], 1.0)]).unwrap();
        assert_abs_diff_eq!(r.minimizer.coords()[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.minimizer.coords()[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-14);
        assert_eq!(r.active, vec![0, 1]);
        let cert = r.certificate.unwrap();
        for w in cert.weights {
            assert_abs_diff_eq!(w, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn intersecting_tangent_balls() {
        let r = min_intersecting_ball(&[ball([0.0, 0.0], 1.0), ball([2.0, 0.0], 1.0)]).unwrap();
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.minimizer.coords()[0], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn active_set_excludes_slack_ball() {
        // F terms at (2,0): 1, 1, sqrt(104) - 12 ~ -1.80.
        let balls = [
            ball([0.0, 0.0], 1.0),
            ball([4.0, 0.0], 1.0),
            ball([2.0, 10.0], 12.0),
        ];
        let r = min_intersecting_ball(&balls).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-13);
        assert_eq!(r.active, vec![0, 1]);
        let terms = DistanceTerms::for_balls(&balls).unwrap();
        assert_eq!(active_set(&r, &terms, active_tolerance(r.scale)), vec![0, 1]);
        // A huge tolerance admits the third term.
        assert_eq!(active_set(&r, &terms, 3.0), vec![0, 1, 2]);
    }

    #[test]
    fn zero_radius_balls_are_points() {
        let r = min_intersecting_ball(&[ball([0.0, 0.0], 0.0), ball([2.0, 0.0], 0.0)]).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn nested_ball_minimizer_is_inner_center() {
        let r = min_intersecting_ball(&[ball([0.0, 0.0], 5.0), ball([1.0, 0.0], 0.5)]).unwrap();
        // Inner ball fully inside outer: F minimized at the inner center.
        assert_abs_diff_eq!(r.value, -0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(r.minimizer.coords()[0], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn three_dimensional_seb_of_simplex() {
        let pts = PointSet::from_rows(&[
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, 0.0],
        ])
        .unwrap();
        let r = smallest_enclosing_ball(&pts).unwrap();
        // The face e1 e2 e3 supports it: center (1/3, 1/3, 1/3), and the
        // origin sits strictly inside at distance sqrt(1/3) < sqrt(2/3).
        assert_abs_diff_eq!(r.value, (2.0f64 / 3.0).sqrt(), epsilon = 1e-12);
        assert_eq!(r.active, vec![0, 1, 2]);
        assert!(r.certificate.is_some());
    }
}
