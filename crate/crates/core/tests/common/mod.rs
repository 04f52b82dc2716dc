//! Generators and brute-force oracles shared by the integration tests. None
//! of the oracles call into the solvers they check.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tverberg_core::geometry::{Ball, PointSet};

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Uniform in `[-1, 1]^d`.
pub fn uniform_set(rng: &mut ChaCha8Rng, n: usize, d: usize) -> PointSet {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    PointSet::from_rows(&rows).unwrap()
}

/// Integer coordinates in `0..k`; repeats and collinear triples are common.
pub fn grid_set(rng: &mut ChaCha8Rng, n: usize, d: usize, k: i32) -> PointSet {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(0..k) as f64).collect())
        .collect();
    PointSet::from_rows(&rows).unwrap()
}

pub fn distinct_uniform_set(rng: &mut ChaCha8Rng, n: usize, d: usize) -> PointSet {
    loop {
        let ps = uniform_set(rng, n, d);
        if min_distance(&ps) > 1e-6 {
            return ps;
        }
    }
}

pub fn min_distance(ps: &PointSet) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..ps.len() {
        for j in i + 1..ps.len() {
            best = best.min(dist(ps.point(i).coords(), ps.point(j).coords()));
        }
    }
    best
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn edge_cost(ps: &PointSet, edges: &[(usize, usize)], f: impl Fn(f64) -> f64) -> f64 {
    edges
        .iter()
        .map(|&(i, j)| f(dist(ps.point(i).coords(), ps.point(j).coords())))
        .sum()
}

/// Gaussian elimination with partial pivoting; `None` when a pivot falls
/// below `eps` relative to the largest entry.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>, eps: f64) -> Option<Vec<f64>> {
    let n = b.len();
    let big = a
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= eps * big {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Affine coordinates `lambda` (summing to one) of the point of the affine
/// hull of `pts` nearest `target`.
pub fn affine_projection(pts: &[&[f64]], target: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let p0 = pts[0];
    let k = pts.len() - 1;
    let diffs: Vec<Vec<f64>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let rel: Vec<f64> = target.iter().zip(p0).map(|(a, b)| a - b).collect();
    let mu = if k == 0 {
        Vec::new()
    } else {
        let g: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| dot(&diffs[i], &diffs[j])).collect())
            .collect();
        let rhs: Vec<f64> = (0..k).map(|i| dot(&diffs[i], &rel)).collect();
        solve_dense(g, rhs, 1e-10)?
    };
    let mut point = p0.to_vec();
    for (m, d) in mu.iter().zip(&diffs) {
        for (x, v) in point.iter_mut().zip(d) {
            *x += m * v;
        }
    }
    let mut lambda = vec![1.0 - mu.iter().sum::<f64>()];
    lambda.extend(mu);
    Some((lambda, point))
}

pub fn for_each_subset(n: usize, max_size: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, max: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if !cur.is_empty() {
            visit(cur);
        }
        if cur.len() == max {
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, max, cur, visit);
            cur.pop();
        }
    }
    rec(0, n, max_size, &mut Vec::new(), &mut visit);
}

/// Distance from the origin to the convex hull of `vectors`: the minimum,
/// over affinely independent subsets whose nearest affine point has
/// nonnegative coordinates, of that point's norm.
pub fn hull_distance_to_origin(vectors: &[Vec<f64>]) -> f64 {
    let d = vectors[0].len();
    let origin = vec![0.0; d];
    let mut best = f64::INFINITY;
    for_each_subset(vectors.len(), d + 1, |s| {
        let pts: Vec<&[f64]> = s.iter().map(|&i| vectors[i].as_slice()).collect();
        if let Some((lambda, p)) = affine_projection(&pts, &origin) {
            if lambda.iter().all(|&l| l >= -1e-12) {
                best = best.min(dot(&p, &p).sqrt());
            }
        }
    });
    best
}

/// Smallest enclosing ball by exhaustive search over supports of size at
/// most `d + 1`: circumcenters within the support's affine hull.
pub fn seb_support_oracle(ps: &PointSet) -> (Vec<f64>, f64) {
    let d = ps.dim();
    let coords: Vec<&[f64]> = ps.points().iter().map(|p| p.coords()).collect();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for_each_subset(ps.len(), d + 1, |s| {
        let p0 = coords[s[0]];
        let k = s.len() - 1;
        let diffs: Vec<Vec<f64>> = s[1..]
            .iter()
            .map(|&i| coords[i].iter().zip(p0).map(|(a, b)| a - b).collect())
            .collect();
        let center: Vec<f64> = if k == 0 {
            p0.to_vec()
        } else {
            let g: Vec<Vec<f64>> = (0..k)
                .map(|i| (0..k).map(|j| 2.0 * dot(&diffs[i], &diffs[j])).collect())
                .collect();
            let rhs: Vec<f64> = (0..k).map(|i| dot(&diffs[i], &diffs[i])).collect();
            let Some(mu) = solve_dense(g, rhs, 1e-12) else { return };
            let mut c = p0.to_vec();
            for (m, dv) in mu.iter().zip(&diffs) {
                for (x, v) in c.iter_mut().zip(dv) {
                    *x += m * v;
                }
            }
            c
        };
        let r = coords.iter().map(|p| dist(p, &center)).fold(0.0, f64::max);
        if best.as_ref().is_none_or(|b| r < b.1) {
            best = Some((center, r));
        }
    });
    best.unwrap()
}

pub fn ball_objective(balls: &[Ball], x: &[f64]) -> f64 {
    balls
        .iter()
        .map(|b| dist(b.center.coords(), x) - b.radius)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Interval refinement for a convex function on a planar box: golden-section
/// search in `x` over `g(x) = min_y f(x, y)`, itself a golden-section search.
/// `g` is convex whenever `f` is, so no ridge can stall the refinement.
pub fn refine_minimize(f: impl Fn(&[f64]) -> f64, center: [f64; 2], half_width: f64) -> ([f64; 2], f64) {
    let inner = |x: f64| {
        let y = golden_section(|y| f(&[x, y]), center[1] - half_width, center[1] + half_width);
        (y, f(&[x, y]))
    };
    let x = golden_section(|x| inner(x).1, center[0] - half_width, center[0] + half_width);
    let (y, v) = inner(x);
    ([x, y], v)
}

fn golden_section(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const R: f64 = 0.618_033_988_749_894_8;
    let mut a = hi - R * (hi - lo);
    let mut b = lo + R * (hi - lo);
    let (mut ga, mut gb) = (g(a), g(b));
    for _ in 0..90 {
        if ga <= gb {
            hi = b;
            b = a;
            gb = ga;
            a = hi - R * (hi - lo);
            ga = g(a);
        } else {
            lo = a;
            a = b;
            ga = gb;
            b = lo + R * (hi - lo);
            gb = g(b);
        }
    }
    0.5 * (lo + hi)
}
