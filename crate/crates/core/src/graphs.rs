//! Max-sum spanning trees and perfect matchings of the complete geometric
//! graph, plus exhaustive oracles for small instances.
//!
//! Among optimal edge sets, every constructor returns the lexicographically
//! smallest sorted list of `(i, j)` pairs (`i < j`). Costs within
//! [`tie_tolerance`] of the optimum count as ties.

use std::cmp::Ordering;
use std::convert::Infallible;
use std::str::FromStr;

use rustworkx_core::max_weight_matching::max_weight_matching;
use rustworkx_core::petgraph::graph::{NodeIndex, UnGraph};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PointSet;

pub type Edge = (usize, usize);

pub const BRUTE_FORCE_TREE_LIMIT: usize = 8;
pub const BRUTE_FORCE_MATCHING_LIMIT: usize = 12;

/// Quantization used for the integral blossom solver: the heaviest edge maps
/// to `2^50`.
const WEIGHT_QUANTUM_BITS: i32 = 50;

pub fn tie_tolerance(best: f64) -> f64 {
    1e-12 * (1.0 + best.abs())
}

/// A strictly increasing piecewise-linear function given by its knots, with
/// linear extrapolation past either end.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneTable {
    knots: Vec<(f64, f64)>,
}

impl MonotoneTable {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidCostFunction(
                "a table needs at least two knots".into(),
            ));
        }
        for w in knots.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if !(x1 > x0 && y1 > y0) || !x0.is_finite() || !y1.is_finite() {
                return Err(Error::InvalidCostFunction(format!(
                    "knots must be finite and strictly increasing: ({x0}, {y0}) -> ({x1}, {y1})"
                )));
            }
        }
        Ok(MonotoneTable { knots })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = &self.knots;
        let seg = k
            .windows(2)
            .position(|w| x <= w[1].0)
            .unwrap_or(k.len() - 2);
        let ((x0, y0), (x1, y1)) = (k[seg], k[seg + 1]);
        y0 + (x - x0) * (y1 - y0) / (x1 - x0)
    }
}

/// Edge-length transform `f` in `sum f(|a - b|)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub enum CostFunction {
    #[default]
    Identity,
    Square,
    Sqrt,
    Table(MonotoneTable),
}

impl CostFunction {
    pub fn apply(&self, len: f64) -> f64 {
        match self {
            CostFunction::Identity => len,
            CostFunction::Square => len * len,
            CostFunction::Sqrt => len.sqrt(),
            CostFunction::Table(t) => t.eval(len),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CostFunction::Identity => "id",
            CostFunction::Square => "square",
            CostFunction::Sqrt => "sqrt",
            CostFunction::Table(_) => "table",
        }
    }
}

impl FromStr for CostFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "id" | "identity" => Ok(CostFunction::Identity),
            "square" => Ok(CostFunction::Square),
            "sqrt" => Ok(CostFunction::Sqrt),
            other => Err(Error::InvalidCostFunction(format!("unknown cost function {other:?}"))),
        }
    }
}

/// Sorts each pair and the list.
pub fn normalize_edges(edges: &[Edge]) -> Vec<Edge> {
    let mut out: Vec<Edge> = edges
        .iter()
        .map(|&(i, j)| if i <= j { (i, j) } else { (j, i) })
        .collect();
    out.sort_unstable();
    out
}

fn check_indices(n: usize, edges: &[Edge]) -> Result<()> {
    for &(i, j) in edges {
        for index in [i, j] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, len: n });
            }
        }
        if i == j {
            return Err(Error::InvalidGraph(format!("self-loop at vertex {i}")));
        }
    }
    Ok(())
}

/// A spanning tree on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tree {
    n: usize,
    edges: Vec<Edge>,
}

impl Tree {
    pub fn new(n: usize, edges: &[Edge]) -> Result<Self> {
        check_indices(n, edges)?;
        if edges.len() + 1 != n {
            return Err(Error::InvalidGraph(format!(
                "a tree on {n} vertices has {} edges, got {}",
                n.saturating_sub(1),
                edges.len()
            )));
        }
        let mut dsu = Dsu::new(n);
        for &(i, j) in edges {
            if !dsu.union(i, j) {
                return Err(Error::InvalidGraph(format!("edge ({i}, {j}) closes a cycle")));
            }
        }
        Ok(Tree {
            n,
            edges: normalize_edges(edges),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
}

/// A perfect matching on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    n: usize,
    edges: Vec<Edge>,
}

impl Matching {
    pub fn new(n: usize, edges: &[Edge]) -> Result<Self> {
        if n % 2 == 1 {
            return Err(Error::OddPointCount(n));
        }
        check_indices(n, edges)?;
        let mut seen = vec![false; n];
        for &(i, j) in edges {
            for v in [i, j] {
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidGraph(format!("vertex {v} matched twice")));
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidGraph(format!("vertex {v} is unmatched")));
        }
        Ok(Matching {
            n,
            edges: normalize_edges(edges),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Partner of each vertex.
    pub fn mates(&self) -> Vec<usize> {
        let mut mate = vec![0; self.n];
        for &(i, j) in &self.edges {
            mate[i] = j;
            mate[j] = i;
        }
        mate
    }
}

pub fn cost(ps: &PointSet, edges: &[Edge], f: &CostFunction) -> f64 {
    edges
        .iter()
        .map(|&(i, j)| f.apply(ps.point(i).distance(ps.point(j))))
        .sum()
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

fn weight_matrix(ps: &PointSet, f: &CostFunction) -> Vec<Vec<f64>> {
    let n = ps.len();
    let mut w = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = f.apply(ps.point(i).distance(ps.point(j)));
            w[i][j] = v;
            w[j][i] = v;
        }
    }
    w
}

/// Maximum-cost spanning tree under edge weights `f(|a - b|)`.
///
/// The optimum comes from Kruskal on weights in decreasing order. The
/// lexicographic representative is then built edge by edge: an edge is kept
/// when some optimal tree contains it together with every edge kept so far.
pub fn max_sum_tree(ps: &PointSet, f: &CostFunction) -> Result<Tree> {
    let n = ps.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, found: n });
    }
    let w = weight_matrix(ps, f);
    let mut by_weight: Vec<Edge> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    by_weight.sort_by(|a, b| w[b.0][b.1].total_cmp(&w[a.0][a.1]).then(a.cmp(b)));

    let forced_optimum = |forced: &[Edge]| -> f64 {
        let mut dsu = Dsu::new(n);
        let mut total = 0.0;
        for &(i, j) in forced {
            dsu.union(i, j);
            total += w[i][j];
        }
        for &(i, j) in &by_weight {
            if dsu.union(i, j) {
                total += w[i][j];
            }
        }
        total
    };

    let best = forced_optimum(&[]);
    let tol = tie_tolerance(best);
    let mut chosen: Vec<Edge> = Vec::with_capacity(n - 1);
    let mut dsu = Dsu::new(n);
    'outer: for i in 0..n {
        for j in i + 1..n {
            if chosen.len() == n - 1 {
                break 'outer;
            }
            if dsu.find(i) == dsu.find(j) {
                continue;
            }
            chosen.push((i, j));
            if forced_optimum(&chosen) >= best - tol {
                dsu.union(i, j);
            } else {
                chosen.pop();
            }
        }
    }
    Tree::new(n, &chosen)
}

/// Maximum-cost perfect matching of the complete Euclidean graph.
///
/// Optimal values come from an integral blossom solver on quantized weights;
/// the lexicographic representative is built by fixing, for the smallest
/// unmatched vertex, the smallest partner that still admits an optimal
/// completion.
pub fn max_sum_matching(ps: &PointSet) -> Result<Matching> {
    let n = ps.len();
    if n % 2 == 1 {
        return Err(Error::OddPointCount(n));
    }
    let w = weight_matrix(ps, &CostFunction::Identity);
    let solver = QuantizedMatcher::new(&w);
    let all: Vec<usize> = (0..n).collect();
    let best = solver.optimum(&all);
    let tol = tie_tolerance(best);

    let mut remaining = all;
    let mut acc = 0.0;
    let mut chosen = Vec::with_capacity(n / 2);
    while !remaining.is_empty() {
        let v = remaining[0];
        let mut picked = None;
        for &j in &remaining[1..] {
            let rest: Vec<usize> = remaining[1..].iter().copied().filter(|&u| u != j).collect();
            let total = acc + w[v][j] + solver.optimum(&rest);
            if total >= best - tol {
                picked = Some((j, rest));
                break;
            }
        }
        // The optimal partner of v always passes, so this only trips if the
        // solver disagrees with its own optimum by more than the tolerance.
        let (j, rest) = picked.unwrap_or_else(|| {
            let j = solver.partner_in_optimum(&remaining, v);
            let rest = remaining[1..].iter().copied().filter(|&u| u != j).collect();
            (j, rest)
        });
        acc += w[v][j];
        chosen.push((v, j));
        remaining = rest;
    }
    Matching::new(n, &chosen)
}

struct QuantizedMatcher<'a> {
    w: &'a [Vec<f64>],
    quantum: f64,
}

impl<'a> QuantizedMatcher<'a> {
    fn new(w: &'a [Vec<f64>]) -> Self {
        let max_w = w
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0f64, |a, &b| a.max(b));
        let quantum = if max_w > 0.0 {
            2f64.powi(WEIGHT_QUANTUM_BITS) / max_w
        } else {
            0.0
        };
        QuantizedMatcher { w, quantum }
    }

    fn solve(&self, vertices: &[usize]) -> Vec<Edge> {
        match vertices.len() {
            0 => return Vec::new(),
            2 => return vec![(vertices[0], vertices[1])],
            _ => {}
        }
        if self.quantum == 0.0 {
            return vertices.chunks(2).map(|c| (c[0], c[1])).collect();
        }
        let mut g: UnGraph<(), i128> = UnGraph::with_capacity(vertices.len(), 0);
        let nodes: Vec<NodeIndex> = vertices.iter().map(|_| g.add_node(())).collect();
        for a in 0..vertices.len() {
            for b in a + 1..vertices.len() {
                let q = (self.w[vertices[a]][vertices[b]] * self.quantum).round() as i128;
                g.add_edge(nodes[a], nodes[b], q);
            }
        }
        let pairs = max_weight_matching(&g, true, |e| Ok::<i128, Infallible>(*e.weight()), false)
            .unwrap_or_else(|never| match never {});
        pairs
            .into_iter()
            .map(|(a, b)| (vertices[a], vertices[b]))
            .collect()
    }

    fn optimum(&self, vertices: &[usize]) -> f64 {
        self.solve(vertices).iter().map(|&(a, b)| self.w[a][b]).sum()
    }

    fn partner_in_optimum(&self, vertices: &[usize], v: usize) -> usize {
        self.solve(vertices)
            .into_iter()
            .find_map(|(a, b)| match (a == v, b == v) {
                (true, _) => Some(b),
                (_, true) => Some(a),
                _ => None,
            })
            .expect("perfect matching covers every vertex")
    }
}

/// Decodes a Prüfer sequence over `0..n` (length `n - 2`) into tree edges.
pub fn prufer_decode(seq: &[usize], n: usize) -> Vec<Edge> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf exists");
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let last: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((last[0], last[1]));
    normalize_edges(&edges)
}

/// Exhaustive maximum over all `n^(n-2)` labeled trees.
pub fn brute_force_tree(ps: &PointSet, f: &CostFunction) -> Result<Tree> {
    let n = ps.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, found: n });
    }
    if n > BRUTE_FORCE_TREE_LIMIT {
        return Err(Error::TooLarge {
            limit: BRUTE_FORCE_TREE_LIMIT,
            found: n,
        });
    }
    let w = weight_matrix(ps, f);
    let tree_cost = |edges: &[Edge]| edges.iter().map(|&(i, j)| w[i][j]).sum::<f64>();

    let mut best = f64::NEG_INFINITY;
    for_each_prufer(n, &mut |edges| best = best.max(tree_cost(edges)));
    let tol = tie_tolerance(best);
    let mut pick: Option<Vec<Edge>> = None;
    for_each_prufer(n, &mut |edges| {
        if tree_cost(edges) >= best - tol
            && pick.as_deref().is_none_or(|p| edges.cmp(p) == Ordering::Less)
        {
            pick = Some(edges.to_vec());
        }
    });
    Tree::new(n, &pick.expect("at least one tree"))
}

/// Every max-sum tree (within [`tie_tolerance`]), in lexicographic order.
pub fn optimal_trees_brute_force(ps: &PointSet, f: &CostFunction) -> Result<Vec<Tree>> {
    let n = ps.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, found: n });
    }
    if n > BRUTE_FORCE_TREE_LIMIT {
        return Err(Error::TooLarge {
            limit: BRUTE_FORCE_TREE_LIMIT,
            found: n,
        });
    }
    let w = weight_matrix(ps, f);
    let tree_cost = |edges: &[Edge]| edges.iter().map(|&(i, j)| w[i][j]).sum::<f64>();
    let mut best = f64::NEG_INFINITY;
    for_each_prufer(n, &mut |edges| best = best.max(tree_cost(edges)));
    let tol = tie_tolerance(best);
    let mut all = Vec::new();
    for_each_prufer(n, &mut |edges| {
        if tree_cost(edges) >= best - tol {
            all.push(edges.to_vec());
        }
    });
    all.sort();
    all.into_iter().map(|e| Tree::new(n, &e)).collect()
}

fn for_each_prufer<F: FnMut(&[Edge])>(n: usize, visit: &mut F) {
    let len = n - 2;
    let mut seq = vec![0usize; len];
    loop {
        visit(&prufer_decode(&seq, n));
        // Odometer increment.
        let mut k = 0;
        loop {
            if k == len {
                return;
            }
            seq[k] += 1;
            if seq[k] < n {
                break;
            }
            seq[k] = 0;
            k += 1;
        }
    }
}

/// Exhaustive maximum over all `(n-1)!!` perfect matchings.
pub fn brute_force_matching(ps: &PointSet) -> Result<Matching> {
    let n = ps.len();
    if n % 2 == 1 {
        return Err(Error::OddPointCount(n));
    }
    if n > BRUTE_FORCE_MATCHING_LIMIT {
        return Err(Error::TooLarge {
            limit: BRUTE_FORCE_MATCHING_LIMIT,
            found: n,
        });
    }
    let w = weight_matrix(ps, &CostFunction::Identity);
    let mut best = f64::NEG_INFINITY;
    for_each_matching(n, &mut |pairs| {
        best = best.max(pairs.iter().map(|&(i, j)| w[i][j]).sum());
        true
    });
    let tol = tie_tolerance(best);
    // Enumeration order is lexicographic, so the first tie is the answer.
    let mut pick = None;
    for_each_matching(n, &mut |pairs| {
        if pairs.iter().map(|&(i, j)| w[i][j]).sum::<f64>() >= best - tol {
            pick = Some(pairs.to_vec());
            return false;
        }
        true
    });
    Matching::new(n, &pick.expect("at least one matching"))
}

/// Visits perfect matchings of `0..n` in lexicographic order of their sorted
/// pair lists; the visitor returns `false` to stop.
pub fn for_each_matching<F: FnMut(&[Edge]) -> bool>(n: usize, visit: &mut F) {
    fn rec<F: FnMut(&[Edge]) -> bool>(
        used: &mut [bool],
        pairs: &mut Vec<Edge>,
        visit: &mut F,
    ) -> bool {
        let Some(v) = used.iter().position(|u| !u) else {
            return visit(pairs);
        };
        used[v] = true;
        for j in v + 1..used.len() {
            if used[j] {
                continue;
            }
            used[j] = true;
            pairs.push((v, j));
            let go_on = rec(used, pairs, visit);
            pairs.pop();
            used[j] = false;
            if !go_on {
                used[v] = false;
                return false;
            }
        }
        used[v] = false;
        true
    }
    let mut used = vec![false; n];
    rec(&mut used, &mut Vec::with_capacity(n / 2), visit);
}
