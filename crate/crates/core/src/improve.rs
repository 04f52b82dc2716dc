//! Cost-increasing swaps for planar matchings whose open induced discs have
//! no common point, and the elongation moves that keep a matching max-sum.
//!
//! All geometry is expressed relative to the minimizer `x*` of `F`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, PointSet};
use crate::graphs::{self, normalize_edges, CostFunction, Edge, Matching};
use crate::minimax::{self, MinimaxResult};
use crate::tverberg::{self, Classification, TverbergCertificate};

/// Zero-length edges are pushed apart along `e1` rotated by this angle per
/// edge index.
const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;
const GOLDEN_FRACTION: f64 = 0.618_033_988_749_895;

/// Tangent-line construction for one active edge `ab`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentData {
    pub edge: Edge,
    pub a: Point,
    pub b: Point,
    /// Point of `B(ab)` nearest `x*`; `|o_ab - x*| = F_ab(x*)`.
    pub o_ab: Point,
    /// Unit vector from `x*` toward the midpoint of `ab`.
    pub normal: Point,
    /// Unit direction of the tangent line through `o_ab`.
    pub tangent_dir: Point,
    pub a_proj: Point,
    pub b_proj: Point,
    pub r_a: f64,
    pub r_b: f64,
    /// `F_ab(x*) - r`; zero for an exactly active edge.
    pub activity_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RedBlueGraph {
    /// Sorted endpoints of the blue edges.
    pub vertices: Vec<usize>,
    pub blue: Vec<Edge>,
    pub red: Vec<Edge>,
    /// `radii[k]` belongs to `vertices[k]`.
    pub radii: Vec<f64>,
    #[serde(skip)]
    positions: Vec<Point>,
}

impl RedBlueGraph {
    fn slot(&self, v: usize) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    pub fn radius(&self, v: usize) -> Option<f64> {
        self.slot(v).map(|k| self.radii[k])
    }

    pub fn is_red(&self, u: usize, v: usize) -> bool {
        let e = if u < v { (u, v) } else { (v, u) };
        self.red.binary_search(&e).is_ok()
    }

    fn length(&self, u: usize, v: usize) -> f64 {
        let (Some(i), Some(j)) = (self.slot(u), self.slot(v)) else {
            return f64::NAN;
        };
        self.positions[i].distance(&self.positions[j])
    }
}

/// `x1 y1 x2 y2 ... xm ym` with `xi yi` blue and `yi x(i+1)` red (cyclically).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternatingCycle {
    pub vertices: Vec<usize>,
}

impl AlternatingCycle {
    pub fn blue_edges(&self) -> Vec<Edge> {
        self.vertices
            .chunks(2)
            .map(|p| ordered(p[0], p[1]))
            .collect()
    }

    pub fn red_edges(&self) -> Vec<Edge> {
        let k = self.vertices.len();
        (0..k / 2)
            .map(|i| ordered(self.vertices[2 * i + 1], self.vertices[(2 * i + 2) % k]))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    pub matching: Matching,
    pub previous_cost: f64,
    pub cost: f64,
    /// `sum red - sum blue` over the cycle.
    pub gain: f64,
    pub certificate: TverbergCertificate,
    pub active: Vec<Edge>,
    /// Tangent data of every active edge.
    pub tangents: Vec<TangentData>,
    pub caratheodory: Vec<Edge>,
    pub graph: RedBlueGraph,
    pub cycle: AlternatingCycle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum StepOutcome {
    Improved(Box<Improvement>),
    OpenWitness(TverbergCertificate),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub matching: Matching,
    pub certificate: TverbergCertificate,
    pub steps: Vec<Improvement>,
}

impl SearchOutcome {
    pub fn iterations(&self) -> usize {
        self.steps.len()
    }
}

fn ordered(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

fn require_planar(ps: &PointSet) -> Result<()> {
    if ps.dim() != 2 {
        return Err(Error::Unsupported(format!(
            "matching improvement is planar only, got dimension {}",
            ps.dim()
        )));
    }
    Ok(())
}

/// `tau_red = 1e-9 * scale`
pub fn red_tolerance(scale: f64) -> f64 {
    1e-9 * scale
}

/// Edges of `m` attaining `F(x*)` within the active tolerance.
pub fn active_submatching(ps: &PointSet, m: &Matching, result: &MinimaxResult) -> Vec<Edge> {
    let tol = minimax::active_tolerance(result.scale);
    let x = &result.minimizer;
    m.edges()
        .iter()
        .copied()
        .filter(|&(i, j)| {
            let (a, b) = (ps.point(i), ps.point(j));
            let f = a.midpoint(b).distance(x) - 0.5 * a.distance(b);
            (result.value - f).abs() <= tol
        })
        .collect()
}

fn segment_distance(x: &Point, p: &Point, q: &Point) -> f64 {
    let d = q.sub(p);
    let len2 = d.dot(&d);
    let t = if len2 > 0.0 {
        (x.sub(p).dot(&d) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    p.offset(&d, t).distance(x)
}

/// Distance from `x` to the closed triangle `pqs` in the plane.
fn triangle_distance(x: &Point, p: &Point, q: &Point, s: &Point) -> f64 {
    let (u, v, w) = (q.sub(p), s.sub(p), x.sub(p));
    let det = u.coords()[0] * v.coords()[1] - u.coords()[1] * v.coords()[0];
    if det != 0.0 {
        let l1 = (w.coords()[0] * v.coords()[1] - w.coords()[1] * v.coords()[0]) / det;
        let l2 = (u.coords()[0] * w.coords()[1] - u.coords()[1] * w.coords()[0]) / det;
        if l1 >= 0.0 && l2 >= 0.0 && l1 + l2 <= 1.0 {
            return 0.0;
        }
    }
    segment_distance(x, p, q)
        .min(segment_distance(x, q, s))
        .min(segment_distance(x, p, s))
}

/// Two or three active edges whose midpoints surround `x*`. Pairs are tried
/// before triples, each in lexicographic edge order.
pub fn caratheodory_submatching(ps: &PointSet, active: &[Edge], x_star: &Point) -> Result<Vec<Edge>> {
    require_planar(ps)?;
    let edges = normalize_edges(active);
    let mids: Vec<Point> = edges
        .iter()
        .map(|&(i, j)| ps.point(i).midpoint(ps.point(j)))
        .collect();
    let tau = tverberg::tverberg_tolerance(ps.scale());
    let k = edges.len();
    for i in 0..k {
        for j in i + 1..k {
            if segment_distance(x_star, &mids[i], &mids[j]) <= tau {
                return Ok(vec![edges[i], edges[j]]);
            }
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            for l in j + 1..k {
                if triangle_distance(x_star, &mids[i], &mids[j], &mids[l]) <= tau {
                    return Ok(vec![edges[i], edges[j], edges[l]]);
                }
            }
        }
    }
    Err(Error::CertificateFailure(format!(
        "minimizer is not within {tau:e} of the hull of any two or three of {k} active midpoints"
    )))
}

pub fn tangent_data(ps: &PointSet, edge: Edge, x_star: &Point, r: f64) -> Result<TangentData> {
    require_planar(ps)?;
    let (a, b) = (ps.get(edge.0)?.clone(), ps.get(edge.1)?.clone());
    let scale = ps.scale();
    let m = a.midpoint(&b);
    let rho = 0.5 * a.distance(&b);
    let to_mid = m.sub(x_star);
    let dist = to_mid.norm();
    if dist <= 1e-12 * scale {
        return Err(Error::DegenerateMidpoint(edge.0, edge.1));
    }
    let u = to_mid.scaled(1.0 / dist);
    let o = m.offset(&u, -rho);
    let r_a = a.sub(&o).dot(&u);
    let r_b = b.sub(&o).dot(&u);
    let residual = r_a + r_b - a.distance(&b);
    if residual.abs() > 1e-9 * scale {
        return Err(Error::TangentIdentity { edge, residual });
    }
    let tangent_dir = Point::from_vec(vec![-u.coords()[1], u.coords()[0]]);
    Ok(TangentData {
        edge,
        a_proj: a.offset(&u, -r_a),
        b_proj: b.offset(&u, -r_b),
        a,
        b,
        o_ab: o,
        normal: u,
        tangent_dir,
        r_a,
        r_b,
        activity_gap: dist - rho - r,
    })
}

/// Blue edges are the tangent records' edges; `uv` is red when the discs
/// `D(u, r_u)` and `D(v, r_v)` are separated by more than `tau_red`.
pub fn red_blue_graph(tangents: &[TangentData], tau_red: f64) -> RedBlueGraph {
    let mut entries: Vec<(usize, f64, Point)> = Vec::with_capacity(2 * tangents.len());
    for t in tangents {
        entries.push((t.edge.0, t.r_a, t.a.clone()));
        entries.push((t.edge.1, t.r_b, t.b.clone()));
    }
    entries.sort_by_key(|e| e.0);
    let blue = normalize_edges(&tangents.iter().map(|t| t.edge).collect::<Vec<_>>());
    let mut red = Vec::new();
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            let e = (entries[i].0, entries[j].0);
            if blue.binary_search(&e).is_ok() {
                continue;
            }
            if entries[i].2.distance(&entries[j].2) > entries[i].1 + entries[j].1 + tau_red {
                red.push(e);
            }
        }
    }
    RedBlueGraph {
        vertices: entries.iter().map(|e| e.0).collect(),
        blue,
        red,
        radii: entries.iter().map(|e| e.1).collect(),
        positions: entries.into_iter().map(|e| e.2).collect(),
    }
}

/// Shortest alternating cycle: all 4-cycles, then all 6-cycles, in a fixed
/// enumeration order.
pub fn find_alternating_cycle(g: &RedBlueGraph) -> Result<AlternatingCycle> {
    for k in 2..=g.blue.len().min(3) {
        if let Some(c) = cycle_through(g, k) {
            return Ok(c);
        }
    }
    Err(Error::NoCycleFound(format!(
        "blue {:?}, red {:?}, vertices {:?}, radii {:?}",
        g.blue, g.red, g.vertices, g.radii
    )))
}

/// First alternating cycle using exactly `k` blue edges.
fn cycle_through(g: &RedBlueGraph, k: usize) -> Option<AlternatingCycle> {
    let nb = g.blue.len();
    let subsets: Vec<Vec<usize>> = match k {
        2 => (0..nb).flat_map(|i| (i + 1..nb).map(move |j| vec![i, j])).collect(),
        3 if nb == 3 => vec![vec![0, 1, 2]],
        _ => return None,
    };
    for subset in subsets {
        // The first blue edge is fixed in position; the rest are permuted.
        let rest: Vec<usize> = subset[1..].to_vec();
        for perm in permutations(&rest) {
            let order: Vec<usize> = std::iter::once(subset[0]).chain(perm).collect();
            for mask in 0..(1u32 << k) {
                let seq: Vec<usize> = order
                    .iter()
                    .enumerate()
                    .flat_map(|(pos, &e)| {
                        let (x, y) = g.blue[e];
                        if mask >> pos & 1 == 0 {
                            [x, y]
                        } else {
                            [y, x]
                        }
                    })
                    .collect();
                let len = seq.len();
                if (0..k).all(|i| g.is_red(seq[2 * i + 1], seq[(2 * i + 2) % len])) {
                    return Some(AlternatingCycle { vertices: seq });
                }
            }
        }
    }
    None
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// One swap along an alternating cycle, or the certificate showing that the
/// open discs of `m` already share a point.
pub fn improve_step(ps: &PointSet, m: &Matching) -> Result<StepOutcome> {
    require_planar(ps)?;
    if m.vertex_count() != ps.len() {
        return Err(Error::InvalidGraph(format!(
            "matching covers {} vertices but the point set has {}",
            m.vertex_count(),
            ps.len()
        )));
    }
    ps.check_distinct()?;
    let (certificate, result) = tverberg::verify_with_solution(ps, m.edges())?;
    if certificate.classification == Classification::Open {
        return Ok(StepOutcome::OpenWitness(certificate));
    }
    let x_star = &result.minimizer;
    let r = result.value;
    let active = active_submatching(ps, m, &result);
    let tangents = active
        .iter()
        .map(|&e| tangent_data(ps, e, x_star, r))
        .collect::<Result<Vec<_>>>()?;
    let caratheodory = caratheodory_submatching(ps, &active, x_star)?;
    let chosen: Vec<TangentData> = tangents
        .iter()
        .filter(|t| caratheodory.contains(&t.edge))
        .cloned()
        .collect();
    let graph = red_blue_graph(&chosen, red_tolerance(ps.scale()));
    let cycle = find_alternating_cycle(&graph)?;

    let blue = cycle.blue_edges();
    let red = cycle.red_edges();
    let blue_len: f64 = blue.iter().map(|&(u, v)| graph.length(u, v)).sum();
    let red_len: f64 = red.iter().map(|&(u, v)| graph.length(u, v)).sum();
    let gain = red_len - blue_len;
    if !(gain > 0.0) {
        return Err(Error::CertificateFailure(format!(
            "alternating cycle {:?} changes cost by {gain:e}",
            cycle.vertices
        )));
    }
    let mut edges: Vec<Edge> = m
        .edges()
        .iter()
        .copied()
        .filter(|e| !blue.contains(e))
        .collect();
    edges.extend(red);
    let matching = Matching::new(m.vertex_count(), &edges)?;
    let f = CostFunction::Identity;
    Ok(StepOutcome::Improved(Box::new(Improvement {
        previous_cost: graphs::cost(ps, m.edges(), &f),
        cost: graphs::cost(ps, matching.edges(), &f),
        matching,
        gain,
        certificate,
        active,
        tangents,
        caratheodory,
        graph,
        cycle,
    })))
}

/// Repeats [`improve_step`] until the matching is open Tverberg.
pub fn local_search(ps: &PointSet, initial: &Matching, max_iters: usize) -> Result<SearchOutcome> {
    let mut current = initial.clone();
    let mut steps = Vec::new();
    loop {
        match improve_step(ps, &current)? {
            StepOutcome::OpenWitness(certificate) => {
                return Ok(SearchOutcome {
                    matching: current,
                    certificate,
                    steps,
                })
            }
            StepOutcome::Improved(step) => {
                if steps.len() == max_iters {
                    return Err(Error::IterationLimit(max_iters));
                }
                current = step.matching.clone();
                steps.push(*step);
            }
        }
    }
}

/// Moves `b` to `c`, where `b` lies on segment `ac` and `ab` is an edge of
/// `m`. The matching keeps its edge list; edge `ab` now spans `ac`.
pub fn elongate(ps: &PointSet, m: &Matching, edge: Edge, c: &Point) -> Result<(PointSet, Matching)> {
    let (ia, ib) = edge;
    let a = ps.get(ia)?;
    let b = ps.get(ib)?;
    if c.dim() != ps.dim() {
        return Err(Error::DimensionMismatch {
            expected: ps.dim(),
            found: c.dim(),
        });
    }
    if !m.edges().contains(&ordered(ia, ib)) {
        return Err(Error::InvalidGraph(format!("({ia}, {ib}) is not a matching edge")));
    }
    let distance = segment_distance(b, a, c);
    let scale = ps.scale().max(a.distance(c));
    if distance > 1e-12 * scale {
        return Err(Error::NotOnSegment { distance });
    }
    let mut out = ps.clone();
    out.replace(ib, c.clone());
    Ok((out, m.clone()))
}

fn spread_direction(dim: usize, index: usize) -> Point {
    let mut v = vec![0.0; dim];
    if dim == 1 {
        v[0] = 1.0;
    } else {
        let t = index as f64 * GOLDEN_ANGLE;
        v[0] = t.cos();
        v[1] = t.sin();
    }
    Point::from_vec(v)
}

/// Elongates every edge of `m` at both ends by `eps * (1 + k / |m|)` (edge
/// `k`), so the result has pairwise distinct points and each new induced
/// ball contains the old one.
pub fn perturb_to_distinct(ps: &PointSet, m: &Matching, eps: f64) -> (PointSet, Matching) {
    let edges = m.edges();
    let count = edges.len().max(1) as f64;
    let tol = 1e-12 * ps.scale().max(eps);
    let dirs: Vec<Point> = edges
        .iter()
        .enumerate()
        .map(|(k, &(i, j))| {
            let d = ps.point(j).sub(ps.point(i));
            let len = d.norm();
            if len > tol {
                d.scaled(1.0 / len)
            } else {
                spread_direction(ps.dim(), k)
            }
        })
        .collect();
    let mut factors: Vec<f64> = (0..edges.len()).map(|k| 1.0 + k as f64 / count).collect();
    let mut edge_of = vec![0; ps.len()];
    for (k, &(i, j)) in edges.iter().enumerate() {
        edge_of[i] = k;
        edge_of[j] = k;
    }
    let build = |factors: &[f64]| {
        let mut out = ps.clone();
        for (k, &(i, j)) in edges.iter().enumerate() {
            let delta = eps * factors[k];
            out.replace(i, ps.point(i).offset(&dirs[k], -delta));
            out.replace(j, ps.point(j).offset(&dirs[k], delta));
        }
        out
    };
    let mut out = build(&factors);
    for _ in 0..4 * edges.len() + 8 {
        let Err(Error::DuplicatePoints(i, j)) = out.check_distinct() else { break };
        let k = edge_of[i].max(edge_of[j]);
        // An irrational step cannot recreate an equal pair of factors.
        factors[k] += GOLDEN_FRACTION / count;
        out = build(&factors);
    }
    (out, m.clone())
}
