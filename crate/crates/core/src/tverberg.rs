//! Common points of edge-induced balls.
//!
//! The witness of [`verify_tverberg`] minimizes
//! `F(x) = max_{ab} |x - (a+b)/2| - |a-b|/2`. `F < 0` means the open balls
//! share `x`; `F = 0` means only the closed balls do.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{induced_ball, Ball, ConvexCombination, Point, PointSet};
use crate::graphs::{Edge, Matching, Tree};
use crate::minimax::{self, MinimaxResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    /// The open induced balls share a point.
    Open,
    /// The closed balls meet, but only on their boundaries (within tolerance).
    ClosedBoundary,
    /// Not even the closed balls share a point.
    None,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Open => "OPEN",
            Classification::ClosedBoundary => "CLOSED_BOUNDARY",
            Classification::None => "NONE",
        }
    }

    pub fn is_tverberg(self) -> bool {
        self != Classification::None
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessMethod {
    /// Minimizer of `F` over the induced balls.
    MinIntersectingBall,
    /// Center of the smallest ball enclosing the whole point set.
    EnclosingBallCenter,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TverbergCertificate {
    pub witness: Point,
    /// `F(witness)`: negative inside every open ball.
    pub value: f64,
    /// `radius - |witness - center|` per edge.
    pub slacks: Vec<f64>,
    pub classification: Classification,
    /// `max(0, -value)`: radius of the largest ball around the witness inside
    /// every induced ball.
    pub depth: f64,
    pub tolerance: f64,
    pub method: WitnessMethod,
    /// `<p - w, q - w>` per edge, for [`WitnessMethod::EnclosingBallCenter`].
    pub edge_dots: Option<Vec<f64>>,
    /// Edges (positions in the edge list) active at the witness.
    pub active: Vec<usize>,
    /// Gradient balance at the witness, over positions in `active`.
    pub gradient_weights: Option<ConvexCombination>,
    pub solver_rounds: usize,
}

impl TverbergCertificate {
    pub fn max_dot(&self) -> Option<f64> {
        self.edge_dots
            .as_ref()
            .map(|d| d.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    }
}

/// `tau = 1e-9 * (1 + scale)`
pub fn tverberg_tolerance(scale: f64) -> f64 {
    1e-9 * (1.0 + scale)
}

pub fn classify(value: f64, tau: f64) -> Classification {
    if value < -tau {
        Classification::Open
    } else if value <= tau {
        Classification::ClosedBoundary
    } else {
        Classification::None
    }
}

pub fn induced_balls(ps: &PointSet, edges: &[Edge]) -> Result<Vec<Ball>> {
    edges
        .iter()
        .map(|&(i, j)| induced_ball(ps.get(i)?, ps.get(j)?))
        .collect()
}

/// Witness, slacks, and classification for an arbitrary edge set.
pub fn verify_tverberg(ps: &PointSet, edges: &[Edge]) -> Result<TverbergCertificate> {
    verify_with_solution(ps, edges).map(|(cert, _)| cert)
}

/// As [`verify_tverberg`], also returning the raw minimax solution.
pub fn verify_with_solution(
    ps: &PointSet,
    edges: &[Edge],
) -> Result<(TverbergCertificate, MinimaxResult)> {
    if edges.is_empty() {
        return Err(Error::EmptyInput("edge set"));
    }
    let balls = induced_balls(ps, edges)?;
    let result = minimax::min_intersecting_ball(&balls)?;
    let tau = tverberg_tolerance(ps.scale());
    let cert = TverbergCertificate {
        witness: result.minimizer.clone(),
        value: result.value,
        slacks: slacks(&balls, &result.minimizer),
        classification: classify(result.value, tau),
        depth: (-result.value).max(0.0),
        tolerance: tau,
        method: WitnessMethod::MinIntersectingBall,
        edge_dots: None,
        active: result.active.clone(),
        gradient_weights: result.certificate.clone(),
        solver_rounds: result.rounds,
    };
    Ok((cert, result))
}

fn slacks(balls: &[Ball], x: &Point) -> Vec<f64> {
    balls.iter().map(|b| b.radius - b.center.distance(x)).collect()
}

/// Tests the enclosing-ball center `x*` directly: every tree edge `pq` must
/// satisfy `<p - x*, q - x*> <= 0`, i.e. `x* ∈ B(pq)`.
pub fn tree_witness_seb(ps: &PointSet, tree: &Tree) -> Result<TverbergCertificate> {
    if tree.vertex_count() != ps.len() {
        return Err(Error::InvalidGraph(format!(
            "tree spans {} vertices but the point set has {}",
            tree.vertex_count(),
            ps.len()
        )));
    }
    let seb = minimax::smallest_enclosing_ball(ps)?;
    let x = &seb.minimizer;
    let tau = tverberg_tolerance(ps.scale());
    let edges = tree.edges();
    let dots: Vec<f64> = edges
        .iter()
        .map(|&(i, j)| ps.point(i).sub(x).dot(&ps.point(j).sub(x)))
        .collect();
    let max_dot = dots.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let balls = induced_balls(ps, edges)?;
    let slacks = slacks(&balls, x);
    let value = slacks.iter().map(|s| -s).fold(f64::NEG_INFINITY, f64::max);
    // A single point has no edges; its trivial tree is vacuously Tverberg.
    let (classification, value) = if edges.is_empty() {
        (Classification::ClosedBoundary, 0.0)
    } else {
        (classify(max_dot, tau), value)
    };
    Ok(TverbergCertificate {
        witness: x.clone(),
        value,
        slacks,
        classification,
        depth: (-value).max(0.0),
        tolerance: tau,
        method: WitnessMethod::EnclosingBallCenter,
        edge_dots: Some(dots),
        active: seb.active.clone(),
        gradient_weights: seb.certificate.clone(),
        solver_rounds: seb.rounds,
    })
}

/// Inradius of the intersection of the matching's induced balls (zero when
/// they meet only on boundaries or not at all).
pub fn depth_of_matching(ps: &PointSet, m: &Matching) -> Result<f64> {
    Ok(verify_tverberg(ps, m.edges())?.depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ball_contains, Containment};
    use approx::assert_abs_diff_eq;

    fn ps(rows: &[[f64; 2]]) -> PointSet {
        PointSet::from_rows(rows).unwrap()
    }

    fn unit_square() -> PointSet {
        ps(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    }

    #[test]
    fn square_diagonals_open() {
        let c = verify_tverberg(&unit_square(), &[(0, 3), (1, 2)]).unwrap();
        assert_eq!(c.classification, Classification::Open);
        assert_abs_diff_eq!(c.witness.coords()[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(c.witness.coords()[1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(c.depth, 2f64.sqrt() / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn collinear_duplicate_closed_boundary() {
        let p = ps(&[[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [3.0, 0.0]]);
        let c = verify_tverberg(&p, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(c.classification, Classification::ClosedBoundary);
        assert_abs_diff_eq!(c.value, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.witness.coords()[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.witness.coords()[1], 0.0, epsilon = 1e-12);
        for b in induced_balls(&p, &[(0, 1), (2, 3)]).unwrap() {
            assert!(ball_contains(&b, &c.witness, Containment::Closed, c.tolerance).unwrap());
        }
    }

    #[test]
    fn rhombus_opposite_sides_closed_boundary() {
        let p = ps(&[[-1.0, 0.0], [1.0, 0.0], [0.0, 0.5], [0.0, -0.5]]);
        let c = verify_tverberg(&p, &[(0, 1), (0, 2), (1, 3)]).unwrap();
        assert_eq!(c.classification, Classification::ClosedBoundary);
        assert!(c.value.abs() <= 1e-9);
    }

    #[test]
    fn seb_witness_two_points() {
        let p = ps(&[[0.0, 0.0], [2.0, 0.0]]);
        let t = Tree::new(2, &[(0, 1)]).unwrap();
        let c = tree_witness_seb(&p, &t).unwrap();
        assert_eq!(c.classification, Classification::Open);
        assert_abs_diff_eq!(c.max_dot().unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn seb_witness_collinear_path() {
        // Explicit tree {0-2, 1-2}; dots are -1 and 0.
        let p = ps(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
        let t = Tree::new(3, &[(0, 2), (1, 2)]).unwrap();
        let c = tree_witness_seb(&p, &t).unwrap();
        assert_abs_diff_eq!(c.witness.coords()[0], 1.0, epsilon = 1e-12);
        let dots = c.edge_dots.clone().unwrap();
        assert_abs_diff_eq!(dots[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dots[1], 0.0, epsilon = 1e-12);
        assert_eq!(c.classification, Classification::ClosedBoundary);
    }

    #[test]
    fn seb_witness_rhombus() {
        let p = ps(&[[-1.0, 0.0], [1.0, 0.0], [0.0, 0.5], [0.0, -0.5]]);
        for edges in [[(0, 1), (0, 2), (1, 3)], [(0, 1), (0, 2), (0, 3)]] {
            let t = Tree::new(4, &edges).unwrap();
            let c = tree_witness_seb(&p, &t).unwrap();
            assert!(c.witness.norm() <= 1e-12);
            assert!(c.max_dot().unwrap().abs() <= 1e-12);
            assert_eq!(c.classification, Classification::ClosedBoundary);
        }
    }

    #[test]
    fn depth_examples() {
        let single = ps(&[[0.0, 0.0], [3.0, 4.0]]);
        let m = Matching::new(2, &[(0, 1)]).unwrap();
        assert_abs_diff_eq!(depth_of_matching(&single, &m).unwrap(), 2.5, epsilon = 1e-12);

        let sq = unit_square();
        let diag = Matching::new(4, &[(0, 3), (1, 2)]).unwrap();
        assert_abs_diff_eq!(depth_of_matching(&sq, &diag).unwrap(), 0.5f64.sqrt(), epsilon = 1e-12);
        let sides = Matching::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert_abs_diff_eq!(depth_of_matching(&sq, &sides).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_edge_set_rejected() {
        assert!(matches!(
            verify_tverberg(&unit_square(), &[]),
            Err(Error::EmptyInput(_))
        ));
        assert!(matches!(
            verify_tverberg(&unit_square(), &[(0, 9)]),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn classification_serializes_upper_case() {
        let s = serde_json::to_string(&Classification::ClosedBoundary).unwrap();
        assert_eq!(s, "\"CLOSED_BOUNDARY\"");
    }

    #[test]
    fn far_apart_segments_have_positive_value() {
        let p = ps(&[[0.0, 0.0], [1.0, 0.0], [10.0, 0.0], [11.0, 0.0]]);
        let c = verify_tverberg(&p, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(c.classification, Classification::None);
        assert_abs_diff_eq!(c.value, 4.5, epsilon = 1e-12);
        assert_abs_diff_eq!(c.witness.coords()[0], 5.5, epsilon = 1e-12);
    }
}
