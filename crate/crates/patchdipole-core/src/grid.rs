//! Symmetric graded node sets on `[-1, 1]`.
//!
//! The solution profile behaves like `(1 - x) log(1 + 1/(1 - x))` near the
//! endpoints, so the mesh is clustered there: nodes on `[0, 1]` follow
//! `x_j = 1 - (1 - j/N)^p` and are mirrored to `[-1, 0]`.

use alloc::vec::Vec;

#[allow(unused_imports)]
#[cfg(not(feature = "std"))]
use crate::math::FloatExt;

/// A strictly increasing, mirror-symmetric node set on `[-1, 1]` with
/// `2N + 1` nodes. `nodes[N] = 0` and `nodes[N + j] = -nodes[N - j]`
/// hold exactly; only the `[0, 1]` half is stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    /// Nodes on `[0, 1]`: `half[0] = 0`, `half[N] = 1`, strictly increasing.
    half: Vec<f64>,
    grading_power: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GridError {
    /// `half_count` must be at least 2.
    HalfCountTooSmall(usize),
    /// `grading_power` must be positive and finite.
    BadGradingPower(f64),
    /// Explicit half nodes must start at 0, end at 1, and strictly increase.
    BadHalfNodes,
}

impl core::fmt::Display for GridError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GridError::HalfCountTooSmall(n) => write!(f, "half_count {n} is below the minimum of 2"),
            GridError::BadGradingPower(p) => write!(f, "grading power {p} must be positive and finite"),
            GridError::BadHalfNodes => f.write_str("half nodes must run strictly increasing from 0 to 1"),
        }
    }
}

impl core::error::Error for GridError {}

/// Builds the graded grid with `2 * half_count + 1` nodes and grading
/// power `p`: spacing shrinks like `(1/N)^p` toward `x = +-1`, and `p = 1`
/// gives the uniform grid.
pub fn make_graded_grid(half_count: usize, grading_power: f64) -> Result<Grid, GridError> {
    if half_count < 2 {
        return Err(GridError::HalfCountTooSmall(half_count));
    }
    if !(grading_power > 0.0) || !grading_power.is_finite() {
        return Err(GridError::BadGradingPower(grading_power));
    }
    let n = half_count;
    let mut half = Vec::with_capacity(n + 1);
    half.push(0.0);
    for j in 1..n {
        let t = 1.0 - j as f64 / n as f64;
        half.push(1.0 - t.powf(grading_power));
    }
    half.push(1.0);
    // Guard against grading powers extreme enough to collapse neighbors in f64.
    if half.windows(2).any(|w| w[1] <= w[0]) {
        return Err(GridError::BadGradingPower(grading_power));
    }
    Ok(Grid {
        half,
        grading_power,
    })
}

impl Grid {
    /// Rebuilds a grid from explicit nodes on `[0, 1]`, e.g. read back from
    /// a profile CSV. The grading power is inferred from the spacing next
    /// to `x = 1` and serves as a descriptor only.
    pub fn from_half_nodes(half: Vec<f64>) -> Result<Grid, GridError> {
        if half.len() < 3 || half[0] != 0.0 || *half.last().unwrap() != 1.0 {
            return Err(GridError::BadHalfNodes);
        }
        if half.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GridError::BadHalfNodes);
        }
        let n = half.len() - 1;
        let last_gap = 1.0 - half[n - 1];
        let grading_power = last_gap.ln() / (1.0 / n as f64).ln();
        Ok(Grid {
            half,
            grading_power,
        })
    }

    /// Number of nodes on the `[0, 1]` half minus one; the full grid has
    /// `2 * half_count() + 1` nodes.
    pub fn half_count(&self) -> usize {
        self.half.len() - 1
    }

    pub fn grading_power(&self) -> f64 {
        self.grading_power
    }

    /// Nodes on `[0, 1]`, from 0 to 1 inclusive.
    pub fn half_nodes(&self) -> &[f64] {
        &self.half
    }

    /// Total node count `2N + 1`.
    pub fn len(&self) -> usize {
        2 * self.half_count() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node `k` of the full grid, `k = 0..2N`, mirrored exactly:
    /// `node(N + j) = -node(N - j)`.
    pub fn node(&self, k: usize) -> f64 {
        let n = self.half_count();
        if k >= n {
            self.half[k - n]
        } else {
            -self.half[n - k]
        }
    }

    /// All `2N + 1` nodes in increasing order.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.node(k)).collect()
    }

    /// Smallest spacing of the full grid (attained next to the endpoints).
    pub fn min_spacing(&self) -> f64 {
        self.half
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_case_n2() {
        let g = make_graded_grid(2, 1.0).unwrap();
        assert_eq!(g.nodes(), [-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn invariants_n4_p2() {
        let g = make_graded_grid(4, 2.0).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.node(0), -1.0);
        assert_eq!(g.node(8), 1.0);
        assert_eq!(g.node(4), 0.0);
        for j in 0..=4 {
            assert_eq!(g.node(4 + j), -g.node(4 - j));
        }
        let nodes = g.nodes();
        assert!(nodes.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn min_spacing_follows_grading() {
        let g = make_graded_grid(128, 2.0).unwrap();
        let expect = 1.0 / 128.0f64.powi(2);
        assert!((g.min_spacing() - expect).abs() < 1e-12 * expect.max(1.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(make_graded_grid(1, 2.0), Err(GridError::HalfCountTooSmall(1))));
        assert!(matches!(make_graded_grid(8, 0.0), Err(GridError::BadGradingPower(_))));
        assert!(matches!(make_graded_grid(8, -1.0), Err(GridError::BadGradingPower(_))));
    }

    #[test]
    fn half_nodes_round_trip() {
        let g = make_graded_grid(16, 2.0).unwrap();
        let rebuilt = Grid::from_half_nodes(g.half_nodes().to_vec()).unwrap();
        assert_eq!(rebuilt.half_nodes(), g.half_nodes());
        assert!((rebuilt.grading_power() - 2.0).abs() < 1e-9);
    }
}
