//! The two parameter simplices: weightings `ξ` (max coordinate one) and
//! `θ` (coordinates summing to one).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const EPS: f64 = 1e-9;

/// A weighting `ξ = (ξ1, ξ2, ξ3)` with nonnegative entries and `max ξ_i = 1`.
///
/// Axes with `ξ_i = 0` are forbidden in slice decompositions and their terms
/// count as `+∞` inside minima.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weighting([f64; 3]);

impl Weighting {
    /// Validates nonnegativity and `max = 1` (up to `1e-9`, then snapped).
    pub fn new(xi: [f64; 3]) -> Result<Weighting> {
        if xi.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidWeighting(format!("{xi:?}: entries must be finite and nonnegative")));
        }
        let max = xi.iter().cloned().fold(0.0, f64::max);
        if (max - 1.0).abs() > EPS {
            return Err(Error::InvalidWeighting(format!("{xi:?}: the largest entry must equal 1")));
        }
        Ok(Weighting(xi.map(|v| if (v - 1.0).abs() <= EPS { 1.0 } else { v })))
    }

    /// Rescales a nonzero nonnegative vector so its maximum is one.
    pub fn normalized(xi: [f64; 3]) -> Result<Weighting> {
        let max = xi.iter().cloned().fold(0.0, f64::max);
        if !(max > 0.0) {
            return Err(Error::InvalidWeighting(format!("{xi:?}: needs a positive entry")));
        }
        Weighting::new(xi.map(|v| v / max))
    }

    pub fn ones() -> Weighting {
        Weighting([1.0; 3])
    }

    /// Indicator weighting of a single axis (1-based).
    pub fn axis(axis: usize) -> Result<Weighting> {
        if !(1..=3).contains(&axis) {
            return Err(Error::InvalidAxis(axis));
        }
        let mut xi = [0.0; 3];
        xi[axis - 1] = 1.0;
        Ok(Weighting(xi))
    }

    pub fn values(&self) -> [f64; 3] {
        self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// 0-based indices of the axes with `ξ_i > 0`.
    pub fn active_axes(&self) -> Vec<usize> {
        (0..3).filter(|&i| self.0[i] > 0.0).collect()
    }

    pub fn min_active(&self) -> f64 {
        self.active_axes().iter().map(|&i| self.0[i]).fold(f64::INFINITY, f64::min)
    }

    /// Grid on the three faces `{ξ_i = 1}` of `Ξ` with step `1/resolution`,
    /// shared edges listed once. Each point carries its integer coordinates
    /// (maximum equal to `resolution`).
    pub fn face_grid(resolution: usize) -> Vec<([usize; 3], Weighting)> {
        let r = resolution.max(1);
        let mut coords = std::collections::BTreeSet::new();
        for face in 0..3 {
            for a in 0..=r {
                for b in 0..=r {
                    let mut c = [a, b, b];
                    c[face] = r;
                    let others: Vec<usize> = (0..3).filter(|&i| i != face).collect();
                    c[others[0]] = a;
                    c[others[1]] = b;
                    coords.insert(c);
                }
            }
        }
        coords.into_iter().map(|c| (c, Weighting(c.map(|v| v as f64 / r as f64)))).collect()
    }

    /// Elementwise `self ≤ other`.
    pub fn le(&self, other: &Weighting) -> bool {
        (0..3).all(|i| self.0[i] <= other.0[i])
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// A point `θ` of the probability simplex on three axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaWeights([f64; 3]);

impl ThetaWeights {
    /// Validates nonnegativity and `Σθ = 1` (up to `1e-9`, then renormalized).
    pub fn new(theta: [f64; 3]) -> Result<ThetaWeights> {
        if theta.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidWeighting(format!("{theta:?}: entries must be finite and nonnegative")));
        }
        let sum: f64 = theta.iter().sum();
        if (sum - 1.0).abs() > EPS {
            return Err(Error::InvalidWeighting(format!("{theta:?}: entries must sum to 1")));
        }
        Ok(ThetaWeights(theta.map(|v| v / sum)))
    }

    pub fn uniform() -> ThetaWeights {
        ThetaWeights([1.0 / 3.0; 3])
    }

    /// Barycentric grid point `(a, b, c) / resolution` with `a + b + c = resolution`.
    pub fn grid_point(a: usize, b: usize, resolution: usize) -> ThetaWeights {
        debug_assert!(a + b <= resolution);
        let c = resolution - a - b;
        let r = resolution as f64;
        ThetaWeights([a as f64 / r, b as f64 / r, c as f64 / r])
    }

    /// Clamps tiny negatives from floating-point moves and renormalizes.
    pub(crate) fn from_raw(theta: [f64; 3]) -> ThetaWeights {
        let t = theta.map(|v| v.max(0.0));
        let s: f64 = t.iter().sum();
        ThetaWeights(t.map(|v| v / s))
    }

    pub fn values(&self) -> [f64; 3] {
        self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// Membership in `Θ(ξ)`: `θ_i = 0` wherever `ξ_i = 0`.
    pub fn in_restricted(&self, xi: &Weighting) -> bool {
        (0..3).all(|i| xi.get(i) > 0.0 || self.0[i] == 0.0)
    }

    /// `⟨θ, ξ⟩`.
    pub fn dot(&self, xi: &Weighting) -> f64 {
        (0..3).map(|i| self.0[i] * xi.get(i)).sum()
    }
}

impl fmt::Display for ThetaWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}
