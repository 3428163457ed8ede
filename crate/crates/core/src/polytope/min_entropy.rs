//! Min-entropy analogs over the support polytope.
//!
//! `H_∞` is only quasiconcave, so `Σ θ_i H_∞(p_i)` is not a concave function
//! of `p`. Writing `L_i = −log2 max_a q^i_a`, the set of achievable bound
//! vectors `L` is convex, and membership of a given `L` is a linear
//! feasibility problem. Both functionals are solved in that space: bisection
//! on a feasibility LP for the max-min, nested golden section over a concave
//! value function for the weighted sum.

use super::{check_tol, require_nonempty, FunctionalResult, Layout, SupportDistribution};
use crate::error::Result;
use crate::lp::{solve, LpOutcome};
use crate::params::{ThetaWeights, Weighting};
use crate::search::golden_min;
use crate::tensor::Support;
use crate::tightness::{find_tight_witness, TightnessOutcome, DEFAULT_RADIUS};

/// Minimizes the largest axis-`last` marginal entry subject to
/// `q^i_a ≤ bound_i` on the bounded axes. Without `last`, only feasibility
/// is checked and the returned maximum is zero.
fn bounded_lp(layout: &Layout, bounds: [Option<f64>; 3], last: Option<usize>) -> Option<(f64, Vec<f64>)> {
    let n = layout.n;
    let mut rows: Vec<(usize, usize, f64)> = Vec::new(); // (axis, value, rhs or NaN for the free bound)
    for i in 0..3 {
        if let Some(m) = bounds[i] {
            rows.extend((0..layout.used[i]).map(|a| (i, a, m)));
        }
    }
    if let Some(l) = last {
        rows.extend((0..layout.used[l]).map(|a| (l, a, f64::NAN)));
    }
    let slack0 = n + 1;
    let cols = slack0 + rows.len();
    let mut a = Vec::with_capacity(rows.len() + 1);
    let mut b = Vec::with_capacity(rows.len() + 1);
    let mut simplex = vec![0.0; cols];
    simplex[..n].fill(1.0);
    a.push(simplex);
    b.push(1.0);
    for (r, &(i, val, rhs)) in rows.iter().enumerate() {
        let mut row = vec![0.0; cols];
        for s in 0..n {
            if layout.local[i][s] == val {
                row[s] = 1.0;
            }
        }
        row[slack0 + r] = 1.0;
        if rhs.is_nan() {
            row[n] = -1.0;
            b.push(0.0);
        } else {
            b.push(rhs);
        }
        a.push(row);
    }
    let mut c = vec![0.0; cols];
    if last.is_some() {
        c[n] = 1.0;
    }
    match solve(&a, &b, &c) {
        LpOutcome::Optimal { x, value } => Some((value, x[..n].to_vec())),
        _ => None,
    }
}

fn upper_bound_flag(support: &Support) -> bool {
    !matches!(find_tight_witness(support, DEFAULT_RADIUS), Ok(TightnessOutcome::Tight { .. }))
}

/// `max_p min_i 2^{H_∞(p_i)/ξ_i}` over the support polytope.
///
/// Bisection on `t` with the feasibility LP `q^i_a ≤ 2^{−ξ_i t}`; the gap is
/// the final bracket width.
pub fn min_entropy_g(support: &Support, xi: &Weighting, tol: f64) -> Result<FunctionalResult> {
    require_nonempty(support)?;
    check_tol(tol)?;
    let layout = Layout::new(support);
    let active = xi.active_axes();
    let bounds_at = |t: f64| [0, 1, 2].map(|i| active.contains(&i).then(|| (-xi.get(i) * t).exp2()));
    let mut hi = active
        .iter()
        .map(|&i| (layout.used[i] as f64).log2() / xi.get(i))
        .fold(f64::INFINITY, f64::min);
    let mut lo = 0.0;
    let mut witness = bounded_lp(&layout, bounds_at(0.0), None).expect("t = 0 is always feasible").1;
    if let Some((_, p)) = bounded_lp(&layout, bounds_at(hi), None) {
        lo = hi;
        witness = p;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        match bounded_lp(&layout, bounds_at(mid), None) {
            Some((_, p)) => {
                lo = mid;
                witness = p;
            }
            None => hi = mid,
        }
    }
    let mut result = FunctionalResult::from_log2(lo, SupportDistribution::from_solver(support, &witness), hi - lo);
    result.upper_bound = upper_bound_flag(support);
    Ok(result)
}

/// `max_p 2^{⟨θ, H_∞(p)⟩}` over the support polytope.
///
/// The gap is the resolution of the golden-section search in `L`, not a
/// duality certificate.
pub fn min_entropy_zeta(support: &Support, theta: &ThetaWeights, tol: f64) -> Result<FunctionalResult> {
    require_nonempty(support)?;
    check_tol(tol)?;
    let layout = Layout::new(support);
    let axes: Vec<usize> = (0..3).filter(|&i| theta.get(i) > 0.0).collect();
    let (&last, free) = axes.split_last().expect("θ has a positive entry");
    let width = tol.max(1e-10);
    let top = |i: usize| (layout.used[i] as f64).log2();

    let mut best = (f64::NEG_INFINITY, Vec::new());
    let mut objective = |ls: &[f64]| -> f64 {
        let mut bounds = [None; 3];
        for (&i, &l) in free.iter().zip(ls) {
            bounds[i] = Some((-l).exp2());
        }
        let Some((m, p)) = bounded_lp(&layout, bounds, Some(last)) else {
            return f64::NEG_INFINITY;
        };
        let v = free.iter().zip(ls).map(|(&i, &l)| theta.get(i) * l).sum::<f64>() - theta.get(last) * m.log2();
        if v > best.0 {
            best = (v, p);
        }
        v
    };

    match free {
        [] => {
            objective(&[]);
        }
        &[i] => {
            golden_min(|l| -objective(&[l]), 0.0, top(i), width);
        }
        _ => {
            let (i, j) = (free[0], free[1]);
            golden_min(|l1| -golden_min(|l2| -objective(&[l1, l2]), 0.0, top(j), width).1, 0.0, top(i), width);
        }
    }
    let gap = width * free.iter().map(|&i| theta.get(i)).sum::<f64>();
    let mut result = FunctionalResult::from_log2(best.0, SupportDistribution::from_solver(support, &best.1), gap);
    result.upper_bound = upper_bound_flag(support);
    Ok(result)
}
