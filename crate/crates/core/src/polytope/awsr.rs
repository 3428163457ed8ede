//! Asymptotic weighted slice rank through the support polytope, by the
//! primal max-min formula and by minimizing over support functionals, and
//! the field quantum functional built from it.

use serde::{Deserialize, Serialize};

use super::newton::{follow_path, MaxMinProblem};
use super::zeta::{ZetaGrid, ZetaPoint, DEFAULT_THETA_RESOLUTION};
use super::{check_tol, require_nonempty, FunctionalResult, Layout, SupportDistribution};
use crate::error::{Error, Result};
use crate::params::{ThetaWeights, Weighting};
use crate::search::{refine_theta, refine_xi_face};
use crate::tensor::Support;
use crate::tightness::{find_tight_witness, TightnessOutcome, DEFAULT_RADIUS};

const REFINE_WIDTH: f64 = 1e-6;

fn is_tight(support: &Support) -> bool {
    matches!(find_tight_witness(support, DEFAULT_RADIUS), Ok(TightnessOutcome::Tight { .. }))
}

/// `G_ξ` by the polytope formula `max_p min_i 2^{H(p_i)/ξ_i}`.
///
/// Axes with `ξ_i = 0` drop out of the minimum. The gap is certified: by
/// concavity, the tangent planes of the `H(p_i)/ξ_i` at the returned point,
/// mixed with the barrier multipliers, bound the optimum from above.
pub fn awsr_primal(support: &Support, xi: &Weighting, tol: f64) -> Result<FunctionalResult> {
    require_nonempty(support)?;
    check_tol(tol)?;
    let layout = Layout::new(support);
    let problem = MaxMinProblem { layout: &layout, xi: xi.values(), active: xi.active_axes() };
    let n = layout.n;
    let p0 = vec![1.0 / n as f64; n];
    let t0 = problem.phis(&p0).iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
    let mut x0 = p0;
    x0.push(t0);
    let x = follow_path(&problem, x0, tol);
    let p = &x[..n];
    let phis = problem.phis(p);
    let value = phis.iter().cloned().fold(f64::INFINITY, f64::min);

    let t = x[n];
    let raw: Vec<f64> = phis.iter().map(|phi| 1.0 / (phi - t)).collect();
    let total: f64 = raw.iter().sum();
    let lambda: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let grads = problem.phi_gradients(p);
    let mut upper = f64::NEG_INFINITY;
    let mut shift = 0.0;
    for (k, g) in grads.iter().enumerate() {
        let inner: f64 = g.iter().zip(p).map(|(a, b)| a * b).sum();
        shift += lambda[k] * (phis[k] - inner);
    }
    for s in 0..n {
        let v: f64 = shift + grads.iter().zip(&lambda).map(|(g, l)| l * g[s]).sum::<f64>();
        upper = upper.max(v);
    }

    let mut result = FunctionalResult::from_log2(value, SupportDistribution::from_solver(support, p), upper - value);
    result.upper_bound = !is_tight(support);
    Ok(result)
}

/// `G_ξ` through `min_{θ ∈ Θ(ξ)} log2 ζ_θ / ⟨θ, ξ⟩`.
///
/// Builds a `θ` grid of the default resolution with `ζ` tolerance `tol/4`;
/// use [`awsr_dual_on_grid`] to share one grid between many `ξ`.
pub fn awsr_dual(support: &Support, xi: &Weighting, tol: f64) -> Result<FunctionalResult> {
    let grid = ZetaGrid::new(support, DEFAULT_THETA_RESOLUTION, tol / 4.0)?;
    let mut result = awsr_dual_on_grid(&grid, xi)?;
    result.upper_bound = !is_tight(support);
    Ok(result)
}

struct DualSearch<'a> {
    grid: &'a ZetaGrid,
    xi: Weighting,
    active: Vec<usize>,
    best_ratio: f64,
    best_bound: f64,
    lower: f64,
    lower_witness: Vec<f64>,
}

impl DualSearch<'_> {
    fn record(&mut self, point: &ZetaPoint) -> f64 {
        let dot = point.theta.dot(&self.xi);
        let ratio = point.log2_zeta / dot;
        if ratio < self.best_ratio {
            self.best_ratio = ratio;
            self.best_bound = ratio + point.gap / dot;
        }
        let primal = self.active.iter().map(|&i| point.entropies[i] / self.xi.get(i)).fold(f64::INFINITY, f64::min);
        if primal > self.lower {
            self.lower = primal;
            self.lower_witness = point.witness.clone();
        }
        ratio
    }

    fn at(&mut self, theta: [f64; 3]) -> f64 {
        let point = self.grid.evaluate(ThetaWeights::from_raw(theta));
        self.record(&point)
    }
}

/// The dual route on a precomputed grid: grid minimum, then golden-section
/// refinement within one grid step. The ratio is quasiconvex on `Θ(ξ)`, and
/// minimizing out one coordinate keeps it so.
///
/// The reported gap combines the best ratio (plus its `ζ` gap) with the best
/// primal value `min_i H(p_i)/ξ_i` among the `ζ` maximizers visited, whose
/// distribution is the witness.
pub fn awsr_dual_on_grid(grid: &ZetaGrid, xi: &Weighting) -> Result<FunctionalResult> {
    let active = xi.active_axes();
    let r = grid.resolution();
    let mut search = DualSearch {
        grid,
        xi: *xi,
        active: active.clone(),
        best_ratio: f64::INFINITY,
        best_bound: f64::INFINITY,
        lower: f64::NEG_INFINITY,
        lower_witness: Vec::new(),
    };
    let mut best: Option<([usize; 3], f64)> = None;
    for point in grid.points() {
        if (0..3).any(|i| xi.get(i) == 0.0 && point.coords[i] != 0) {
            continue;
        }
        let ratio = search.record(point);
        if best.is_none_or(|(_, v)| ratio < v) {
            best = Some((point.coords, ratio));
        }
    }
    let (c, _) = best.ok_or_else(|| Error::InvalidGrid("no grid point in Θ(ξ)".into()))?;
    refine_theta(&active, c, r, REFINE_WIDTH, |th| search.at(th));

    let witness = SupportDistribution::from_solver(grid.support(), &search.lower_witness);
    let gap = (search.best_bound - search.lower).max(search.best_ratio - search.lower).max(0.0);
    Ok(FunctionalResult::from_log2(search.best_ratio, witness, gap))
}

/// Result of [`field_quantum_functional`]: the value, the maximizing `ξ`
/// and the gap of the `G_ξ` evaluation there (scaled by `⟨θ, ξ⟩`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldFunctionalResult {
    pub value: f64,
    pub log2_value: f64,
    pub xi: Weighting,
    pub gap: f64,
}

/// `F^K_θ = max_{ξ ∈ Ξ} G_ξ^{⟨θ,ξ⟩}` for a tight support.
///
/// `ξ` ranges over a face grid of `Ξ` with the given resolution, scored with
/// cached `ζ` values, then refined locally; `G_ξ` at the winner comes from
/// [`awsr_dual_on_grid`]. Non-tight supports are rejected.
pub fn field_quantum_functional(
    support: &Support,
    theta: &ThetaWeights,
    xi_resolution: usize,
    tol: f64,
) -> Result<FieldFunctionalResult> {
    require_nonempty(support)?;
    match find_tight_witness(support, DEFAULT_RADIUS)? {
        TightnessOutcome::Tight { .. } => {}
        TightnessOutcome::NotTight { .. } => return Err(Error::NotTight),
        TightnessOutcome::Inconclusive { radius } => {
            return Err(Error::Precondition(format!("tightness inconclusive up to radius {radius}")))
        }
    }
    let grid = ZetaGrid::new(support, DEFAULT_THETA_RESOLUTION, tol / 4.0)?;
    field_quantum_functional_on_grid(&grid, theta, xi_resolution)
}

/// [`field_quantum_functional`] on a precomputed grid; tightness is the
/// caller's responsibility.
pub fn field_quantum_functional_on_grid(
    grid: &ZetaGrid,
    theta: &ThetaWeights,
    xi_resolution: usize,
) -> Result<FieldFunctionalResult> {
    if xi_resolution == 0 {
        return Err(Error::InvalidGrid("ξ resolution must be positive".into()));
    }
    let mut cached: Vec<ZetaPoint> = grid.points().to_vec();
    cached.push(grid.evaluate(*theta));
    // grid estimate of log2 G_ξ; exact at θ itself, an overestimate elsewhere
    let estimate = |xi: &Weighting| -> f64 {
        cached
            .iter()
            .filter(|p| p.theta.in_restricted(xi))
            .map(|p| p.log2_zeta / p.theta.dot(xi))
            .fold(f64::INFINITY, f64::min)
    };
    let score = |xi: &Weighting| theta.dot(xi) * estimate(xi);

    let mut best: Option<([usize; 3], Weighting, f64)> = None;
    for (c, xi) in Weighting::face_grid(xi_resolution) {
        let v = score(&xi);
        if best.as_ref().is_none_or(|b| v > b.2) {
            best = Some((c, xi, v));
        }
    }
    let (c, grid_xi, _) = best.expect("face grid is nonempty");

    let (x, _) = refine_xi_face(c, xi_resolution, REFINE_WIDTH, |x| -score(&Weighting::new(x).expect("face point")));
    let refined = Weighting::new(x).expect("face point is a weighting");

    let mut answer: Option<FieldFunctionalResult> = None;
    for xi in [grid_xi, refined] {
        let g = awsr_dual_on_grid(grid, &xi)?;
        let dot = theta.dot(&xi);
        let log2_value = dot * g.log2_value;
        if answer.as_ref().is_none_or(|a| log2_value > a.log2_value) {
            answer = Some(FieldFunctionalResult { value: log2_value.exp2(), log2_value, xi, gap: dot * g.gap });
        }
    }
    Ok(answer.expect("two candidates evaluated"))
}
