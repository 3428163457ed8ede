//! The support functionals `ζ_θ(T) = max_{p ∈ W(T)} 2^{⟨θ, H(p)⟩}`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::newton::{follow_path, ZetaProblem};
use super::{check_tol, require_nonempty, FunctionalResult, Layout, SupportDistribution};
use crate::error::{Error, Result};
use crate::params::ThetaWeights;
use crate::tensor::Support;

/// Default barycentric resolution of `θ` grids.
pub const DEFAULT_THETA_RESOLUTION: usize = 64;

pub(crate) struct ZetaSolution {
    pub p: Vec<f64>,
    pub log2_value: f64,
    pub gap: f64,
    pub entropies: [f64; 3],
}

/// Maximizes `Σ θ_i H(q^i)` by barrier path following. The gap is the
/// Frank–Wolfe duality gap `max_s ∇_s − ⟨∇, p⟩` at the returned point.
pub(crate) fn solve_zeta(layout: &Layout, theta: [f64; 3], tol: f64) -> ZetaSolution {
    let problem = ZetaProblem { layout, theta };
    let p = follow_path(&problem, vec![1.0 / layout.n as f64; layout.n], tol);
    let (f, g) = problem.objective(&p);
    let inner: f64 = g.iter().zip(&p).map(|(a, b)| a * b).sum();
    let top = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    ZetaSolution { log2_value: f, gap: (top - inner).max(0.0), entropies: layout.entropies(&p), p }
}

/// `ζ_θ` of a support, with the maximizing distribution as witness.
pub fn support_functional_zeta(support: &Support, theta: &ThetaWeights, tol: f64) -> Result<FunctionalResult> {
    require_nonempty(support)?;
    check_tol(tol)?;
    let layout = Layout::new(support);
    let sol = solve_zeta(&layout, theta.values(), tol);
    Ok(FunctionalResult::from_log2(sol.log2_value, SupportDistribution::from_solver(support, &sol.p), sol.gap))
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaPoint {
    /// barycentric coordinates summing to the grid resolution
    pub coords: [usize; 3],
    pub theta: ThetaWeights,
    pub log2_zeta: f64,
    pub gap: f64,
    /// marginal entropies of the maximizer
    pub entropies: [f64; 3],
    pub witness: Vec<f64>,
}

/// `log2 ζ_θ` on the barycentric grid `θ = (a, b, c)/resolution`.
///
/// The grid is computed once per support and shared by the dual route of
/// `G_ξ` for every `ξ` and by the field functional.
#[derive(Debug, Clone)]
pub struct ZetaGrid {
    support: Support,
    layout: Layout,
    resolution: usize,
    tol: f64,
    points: Vec<ZetaPoint>,
    index: HashMap<[usize; 3], usize>,
}

impl ZetaGrid {
    pub fn new(support: &Support, resolution: usize, tol: f64) -> Result<ZetaGrid> {
        require_nonempty(support)?;
        check_tol(tol)?;
        if resolution == 0 || resolution > 256 {
            return Err(Error::InvalidGrid(format!("resolution {resolution} outside 1..=256")));
        }
        let layout = Layout::new(support);
        let coords: Vec<[usize; 3]> =
            (0..=resolution).flat_map(|a| (0..=resolution - a).map(move |b| [a, b, resolution - a - b])).collect();
        let points: Vec<ZetaPoint> = coords
            .par_iter()
            .map(|&c| {
                let theta = ThetaWeights::grid_point(c[0], c[1], resolution);
                let sol = solve_zeta(&layout, theta.values(), tol);
                ZetaPoint {
                    coords: c,
                    theta,
                    log2_zeta: sol.log2_value,
                    gap: sol.gap,
                    entropies: sol.entropies,
                    witness: sol.p,
                }
            })
            .collect();
        let index = points.iter().enumerate().map(|(k, p)| (p.coords, k)).collect();
        Ok(ZetaGrid { support: support.clone(), layout, resolution, tol, points, index })
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn points(&self) -> &[ZetaPoint] {
        &self.points
    }

    pub fn get(&self, coords: [usize; 3]) -> Option<&ZetaPoint> {
        self.index.get(&coords).map(|&k| &self.points[k])
    }

    /// Solves for `ζ_θ` at an arbitrary `θ` with the grid's tolerance.
    pub fn evaluate(&self, theta: ThetaWeights) -> ZetaPoint {
        let sol = solve_zeta(&self.layout, theta.values(), self.tol);
        ZetaPoint {
            coords: [usize::MAX; 3],
            theta,
            log2_zeta: sol.log2_value,
            gap: sol.gap,
            entropies: sol.entropies,
            witness: sol.p,
        }
    }
}
