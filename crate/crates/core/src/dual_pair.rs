//! Conjugate transforms between functions on `Θ` and functions on `Ξ`.
//!
//! If `f(θ) = max_x ⟨θ, h(x)⟩` and `g(ξ) = max_x min_i h_i(x)/ξ_i` for the
//! same concave `h`, then
//!
//! ```text
//! g(ξ) = min_{θ ∈ Θ(ξ)} f(θ) / ⟨θ, ξ⟩,     f(θ) = max_{ξ ∈ Ξ} g(ξ) ⟨θ, ξ⟩.
//! ```
//!
//! Both directions are computed numerically from grids or callbacks. With
//! `f = log2 ζ_θ` and `g = log2 G_ξ` this is the relation between support
//! functionals and asymptotic weighted slice ranks of tight supports.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ThetaWeights, Weighting};
use crate::polytope::ZetaGrid;
use crate::search::{refine_theta, refine_xi_face};

/// Largest grid resolution accepted.
pub const MAX_RESOLUTION: usize = 256;
/// `Θ` scan resolution used for callbacks.
pub const DEFAULT_THETA_SCAN: usize = 64;
/// `Ξ` face-grid resolution used for callbacks.
pub const DEFAULT_XI_SCAN: usize = 32;

const REFINE_WIDTH: f64 = 1e-7;

type Callback = Arc<dyn Fn([f64; 3]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Source {
    /// values at `(a, b, r − a − b)/r`, stored at `a·(r+1) + b`
    Grid { resolution: usize, values: Vec<f64> },
    Callback(Callback),
}

/// A function on the probability simplex `Θ`.
#[derive(Clone)]
pub struct SimplexFunction {
    source: Source,
    /// informational; set for maxima of linear functions such as `log2 ζ_θ`
    pub convex: bool,
}

impl fmt::Debug for SimplexFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            Source::Grid { resolution, .. } => write!(f, "SimplexFunction(grid {resolution})"),
            Source::Callback(_) => write!(f, "SimplexFunction(callback)"),
        }
    }
}

fn check_resolution(r: usize) -> Result<()> {
    if (1..=MAX_RESOLUTION).contains(&r) {
        Ok(())
    } else {
        Err(Error::InvalidGrid(format!("resolution {r} outside 1..={MAX_RESOLUTION}")))
    }
}

/// Smallest `r ≤ 256` making every coordinate an integer multiple of `1/r`.
fn infer_resolution(points: impl Iterator<Item = [f64; 3]> + Clone) -> Result<usize> {
    (1..=MAX_RESOLUTION)
        .find(|&r| points.clone().all(|p| p.iter().all(|v| (v * r as f64 - (v * r as f64).round()).abs() < 1e-6)))
        .ok_or_else(|| Error::InvalidGrid("coordinates are not on a grid of resolution ≤ 256".into()))
}

impl SimplexFunction {
    /// Tabulates `f` at every grid point of resolution `r`.
    pub fn tabulate(resolution: usize, convex: bool, f: impl Fn(ThetaWeights) -> f64) -> Result<SimplexFunction> {
        check_resolution(resolution)?;
        let r = resolution;
        let mut values = vec![f64::NAN; (r + 1) * (r + 1)];
        for a in 0..=r {
            for b in 0..=r - a {
                let v = f(ThetaWeights::grid_point(a, b, r));
                if !v.is_finite() {
                    return Err(Error::InvalidGrid(format!("non-finite value at ({a},{b},{})", r - a - b)));
                }
                values[a * (r + 1) + b] = v;
            }
        }
        Ok(SimplexFunction { source: Source::Grid { resolution, values }, convex })
    }

    pub fn from_fn(convex: bool, f: impl Fn([f64; 3]) -> f64 + Send + Sync + 'static) -> SimplexFunction {
        SimplexFunction { source: Source::Callback(Arc::new(f)), convex }
    }

    pub fn constant(c: f64) -> SimplexFunction {
        SimplexFunction::from_fn(true, move |_| c)
    }

    /// `log2 ζ_θ` at the points of a support-functional grid.
    pub fn from_zeta_grid(grid: &ZetaGrid) -> SimplexFunction {
        let r = grid.resolution();
        SimplexFunction::tabulate(r, true, |th| {
            let v = th.values();
            let c = v.map(|x| (x * r as f64).round() as usize);
            grid.get(c).expect("grid point").log2_zeta
        })
        .expect("ζ grids have valid resolution and finite values")
    }

    /// Grid from `(θ, value)` samples; the resolution is inferred and every
    /// grid point must appear exactly once.
    pub fn from_samples(samples: &[([f64; 3], f64)]) -> Result<SimplexFunction> {
        let r = infer_resolution(samples.iter().map(|s| s.0))?;
        let mut values = vec![f64::NAN; (r + 1) * (r + 1)];
        for (th, v) in samples {
            ThetaWeights::new(*th)?;
            if !v.is_finite() {
                return Err(Error::InvalidGrid(format!("non-finite value at {th:?}")));
            }
            let a = (th[0] * r as f64).round() as usize;
            let b = (th[1] * r as f64).round() as usize;
            let slot = &mut values[a * (r + 1) + b];
            if !slot.is_nan() {
                return Err(Error::InvalidGrid(format!("duplicate grid point {th:?}")));
            }
            *slot = *v;
        }
        let expected = (r + 1) * (r + 2) / 2;
        if samples.len() != expected {
            return Err(Error::InvalidGrid(format!("{} samples, a resolution-{r} grid has {expected}", samples.len())));
        }
        Ok(SimplexFunction { source: Source::Grid { resolution: r, values }, convex: false })
    }

    pub fn resolution(&self) -> Option<usize> {
        match &self.source {
            Source::Grid { resolution, .. } => Some(*resolution),
            Source::Callback(_) => None,
        }
    }

    /// Grid points with values, in lexicographic order of `(a, b)`.
    pub fn samples(&self, resolution: usize) -> Vec<([usize; 3], f64)> {
        let r = resolution;
        let mut out = Vec::with_capacity((r + 1) * (r + 2) / 2);
        for a in 0..=r {
            for b in 0..=r - a {
                out.push(([a, b, r - a - b], self.eval(ThetaWeights::grid_point(a, b, r).values())));
            }
        }
        out
    }

    /// Value at `θ`; grids are interpolated linearly on each cell of the
    /// standard triangulation.
    pub fn eval(&self, theta: [f64; 3]) -> f64 {
        match &self.source {
            Source::Callback(f) => f(theta),
            Source::Grid { resolution, values } => {
                let r = *resolution;
                let at = |a: usize, b: usize| values[a * (r + 1) + b];
                let x = (theta[0] * r as f64).clamp(0.0, r as f64);
                let y = (theta[1] * r as f64).clamp(0.0, r as f64 - x);
                let (i, j) = (x.floor() as usize, y.floor() as usize);
                let (fx, fy) = (x - i as f64, y - j as f64);
                if i + j >= r {
                    return at(i.min(r), j.min(r - i.min(r)));
                }
                if fx + fy <= 1.0 || i + j + 2 > r {
                    (1.0 - fx - fy) * at(i, j) + fx * at(i + 1, j) + fy * at(i, j + 1)
                } else {
                    (fx + fy - 1.0) * at(i + 1, j + 1) + (1.0 - fy) * at(i + 1, j) + (1.0 - fx) * at(i, j + 1)
                }
            }
        }
    }
}

#[derive(Clone)]
enum XiSource {
    /// values at face-grid points `c/r`, stored at `c0·(r+1)² + c1·(r+1) + c2`
    Grid { resolution: usize, values: Vec<f64> },
    Callback(Callback),
}

/// A function on `Ξ`, the weightings with maximum entry 1.
#[derive(Clone)]
pub struct XiFunction {
    source: XiSource,
}

impl fmt::Debug for XiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            XiSource::Grid { resolution, .. } => write!(f, "XiFunction(grid {resolution})"),
            XiSource::Callback(_) => write!(f, "XiFunction(callback)"),
        }
    }
}

fn xi_slot(c: [usize; 3], r: usize) -> usize {
    (c[0] * (r + 1) + c[1]) * (r + 1) + c[2]
}

impl XiFunction {
    /// Tabulates `g` on the face grid of resolution `r`.
    pub fn tabulate(resolution: usize, g: impl Fn(Weighting) -> f64) -> Result<XiFunction> {
        check_resolution(resolution)?;
        let r = resolution;
        let mut values = vec![f64::NAN; (r + 1).pow(3)];
        for (c, xi) in Weighting::face_grid(r) {
            let v = g(xi);
            if !v.is_finite() {
                return Err(Error::InvalidGrid(format!("non-finite value at ξ = {xi}")));
            }
            values[xi_slot(c, r)] = v;
        }
        Ok(XiFunction { source: XiSource::Grid { resolution, values } })
    }

    pub fn from_fn(g: impl Fn([f64; 3]) -> f64 + Send + Sync + 'static) -> XiFunction {
        XiFunction { source: XiSource::Callback(Arc::new(g)) }
    }

    pub fn constant(c: f64) -> XiFunction {
        XiFunction::from_fn(move |_| c)
    }

    /// The transform [`g_from_f`] of `f`, tabulated on a face grid.
    pub fn conjugate_of(f: &SimplexFunction, resolution: usize) -> Result<XiFunction> {
        XiFunction::tabulate(resolution, |xi| g_from_f(f, &xi).value)
    }

    /// Grid from `(ξ, value)` samples covering the face grid exactly once.
    pub fn from_samples(samples: &[([f64; 3], f64)]) -> Result<XiFunction> {
        let r = infer_resolution(samples.iter().map(|s| s.0))?;
        let mut values = vec![f64::NAN; (r + 1).pow(3)];
        for (xi, v) in samples {
            Weighting::new(*xi)?;
            if !v.is_finite() {
                return Err(Error::InvalidGrid(format!("non-finite value at {xi:?}")));
            }
            let c = xi.map(|x| (x * r as f64).round() as usize);
            let slot = &mut values[xi_slot(c, r)];
            if !slot.is_nan() {
                return Err(Error::InvalidGrid(format!("duplicate grid point {xi:?}")));
            }
            *slot = *v;
        }
        let expected = Weighting::face_grid(r).len();
        if samples.len() != expected {
            return Err(Error::InvalidGrid(format!("{} samples, a resolution-{r} face grid has {expected}", samples.len())));
        }
        Ok(XiFunction { source: XiSource::Grid { resolution: r, values } })
    }

    pub fn resolution(&self) -> Option<usize> {
        match &self.source {
            XiSource::Grid { resolution, .. } => Some(*resolution),
            XiSource::Callback(_) => None,
        }
    }

    /// Face-grid points with values.
    pub fn samples(&self, resolution: usize) -> Vec<([usize; 3], f64)> {
        Weighting::face_grid(resolution).into_iter().map(|(c, xi)| (c, self.eval(xi.values()))).collect()
    }

    /// Value at `ξ`; grids are interpolated bilinearly on the face through `ξ`.
    pub fn eval(&self, xi: [f64; 3]) -> f64 {
        match &self.source {
            XiSource::Callback(g) => g(xi),
            XiSource::Grid { resolution, values } => {
                let r = *resolution;
                let face = (0..3).max_by(|&a, &b| xi[a].total_cmp(&xi[b]).then(b.cmp(&a))).expect("three axes");
                let others: Vec<usize> = (0..3).filter(|&i| i != face).collect();
                let (u, v) = ((xi[others[0]] * r as f64).clamp(0.0, r as f64), (xi[others[1]] * r as f64).clamp(0.0, r as f64));
                let (i, j) = ((u.floor() as usize).min(r.saturating_sub(1)), (v.floor() as usize).min(r.saturating_sub(1)));
                let (fu, fv) = (u - i as f64, v - j as f64);
                let at = |a: usize, b: usize| {
                    let mut c = [r; 3];
                    c[others[0]] = a;
                    c[others[1]] = b;
                    values[xi_slot(c, r)]
                };
                (1.0 - fu) * (1.0 - fv) * at(i, j)
                    + fu * (1.0 - fv) * at(i + 1, j)
                    + (1.0 - fu) * fv * at(i, j + 1)
                    + fu * fv * at(i + 1, j + 1)
            }
        }
    }
}

/// Value of a transform with the point attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugateValue {
    pub value: f64,
    pub arg: [f64; 3],
}

/// `g(ξ) = min_{θ ∈ Θ(ξ)} f(θ) / ⟨θ, ξ⟩`: grid scan over `Θ(ξ)`, then
/// golden-section refinement within one grid step.
///
/// `Θ(ξ)` zeroes the coordinates where `ξ_i = 0`, so `⟨θ, ξ⟩ > 0` there.
pub fn g_from_f(f: &SimplexFunction, xi: &Weighting) -> ConjugateValue {
    let r = f.resolution().unwrap_or(DEFAULT_THETA_SCAN);
    let active = xi.active_axes();
    let ratio = |th: [f64; 3]| {
        let dot: f64 = (0..3).map(|i| th[i] * xi.get(i)).sum();
        f.eval(th) / dot
    };
    let mut best = ([0; 3], [0.0; 3], f64::INFINITY);
    for a in 0..=r {
        for b in 0..=r - a {
            let c = [a, b, r - a - b];
            if (0..3).any(|i| xi.get(i) == 0.0 && c[i] != 0) {
                continue;
            }
            let th = ThetaWeights::grid_point(a, b, r).values();
            let v = ratio(th);
            if v < best.2 {
                best = (c, th, v);
            }
        }
    }
    let (th, v) = refine_theta(&active, best.0, r, REFINE_WIDTH, ratio);
    if v < best.2 {
        ConjugateValue { value: v, arg: th }
    } else {
        ConjugateValue { value: best.2, arg: best.1 }
    }
}

/// `f(θ) = max_{ξ ∈ Ξ} g(ξ) ⟨θ, ξ⟩`: face-grid scan, then refinement on the
/// face of the best grid point.
pub fn f_from_g(g: &XiFunction, theta: &ThetaWeights) -> ConjugateValue {
    let r = g.resolution().unwrap_or(DEFAULT_XI_SCAN);
    let score = |x: [f64; 3]| -g.eval(x) * (0..3).map(|i| theta.get(i) * x[i]).sum::<f64>();
    let mut best = ([0; 3], [0.0; 3], f64::INFINITY);
    for (c, xi) in Weighting::face_grid(r) {
        let v = score(xi.values());
        if v < best.2 {
            best = (c, xi.values(), v);
        }
    }
    let (x, v) = refine_xi_face(best.0, r, REFINE_WIDTH, score);
    if v < best.2 {
        ConjugateValue { value: -v, arg: x }
    } else {
        ConjugateValue { value: -best.2, arg: best.1 }
    }
}

/// How the transfer property combines two values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferMode {
    /// `F(S ⊗ T) ≥ F(S)·F(T)` implies `G(S ⊗ T) ≥ G(S)·G(T)`
    Product,
    /// `F(S ⊕ T) ≥ F(S) + F(T)` implies `G(S ⊕ T) ≥ G(S) + G(T)`
    Sum,
}

/// The worst point of one side of a transfer check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferViolation {
    pub point: [f64; 3],
    /// combined value (log2)
    pub combined: f64,
    /// value of the product or sum of the parts (log2)
    pub parts: f64,
}

/// Result of [`check_transfer`]. All values are in log2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub mode: TransferMode,
    pub tol: f64,
    pub hypothesis_holds: bool,
    /// smallest `combined − parts` over the `θ` grid
    pub hypothesis_slack: f64,
    pub hypothesis_worst: TransferViolation,
    /// `None` when the hypothesis fails, since nothing is claimed then
    pub conclusion_holds: Option<bool>,
    pub conclusion_slack: Option<f64>,
    pub conclusion_worst: Option<TransferViolation>,
}

impl TransferReport {
    pub fn passed(&self) -> bool {
        self.hypothesis_holds && self.conclusion_holds == Some(true)
    }

    pub fn summary(&self) -> String {
        match self.conclusion_holds {
            None => format!("hypothesis fails (slack {:.3e})", self.hypothesis_slack),
            Some(true) => format!("conclusion holds (slack {:.3e})", self.conclusion_slack.unwrap_or(0.0)),
            Some(false) => format!("conclusion fails (slack {:.3e})", self.conclusion_slack.unwrap_or(0.0)),
        }
    }
}

fn combine(mode: TransferMode, a: f64, b: f64) -> f64 {
    match mode {
        TransferMode::Product => a + b,
        TransferMode::Sum => {
            let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
            hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2
        }
    }
}

fn worst(mode: TransferMode, points: impl Iterator<Item = ([f64; 3], f64, f64, f64)>) -> (f64, TransferViolation) {
    let mut out = (f64::INFINITY, TransferViolation { point: [0.0; 3], combined: 0.0, parts: 0.0 });
    for (point, s, t, st) in points {
        let parts = combine(mode, s, t);
        if st - parts < out.0 {
            out = (st - parts, TransferViolation { point, combined: st, parts });
        }
    }
    out
}

/// Checks the hypothesis on the `θ` grid, and only if it holds within
/// `tol`, the conclusion on the `ξ` face grid. Values are log2 functionals
/// `f = log2 F_θ`, `g = log2 G_ξ`; the grids used are those of `f_s` and
/// `g_s` (or the defaults for callbacks).
pub fn check_transfer(
    f: [&SimplexFunction; 3],
    g: [&XiFunction; 3],
    mode: TransferMode,
    tol: f64,
) -> TransferReport {
    let [fs, ft, fst] = f;
    let [gs, gt, gst] = g;
    let rt = fs.resolution().unwrap_or(DEFAULT_THETA_SCAN);
    let thetas = (0..=rt).flat_map(move |a| (0..=rt - a).map(move |b| ThetaWeights::grid_point(a, b, rt).values()));
    let (h_slack, h_worst) = worst(mode, thetas.map(|th| (th, fs.eval(th), ft.eval(th), fst.eval(th))));
    let hypothesis_holds = h_slack >= -tol;
    let (conclusion_holds, conclusion_slack, conclusion_worst) = if hypothesis_holds {
        let rx = gs.resolution().unwrap_or(DEFAULT_XI_SCAN);
        let xis = Weighting::face_grid(rx).into_iter().map(|(_, x)| x.values());
        let (slack, w) = worst(mode, xis.map(|x| (x, gs.eval(x), gt.eval(x), gst.eval(x))));
        (Some(slack >= -tol), Some(slack), Some(w))
    } else {
        (None, None, None)
    };
    TransferReport {
        mode,
        tol,
        hypothesis_holds,
        hypothesis_slack: h_slack,
        hypothesis_worst: h_worst,
        conclusion_holds,
        conclusion_slack,
        conclusion_worst,
    }
}
