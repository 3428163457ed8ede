//! Low-dimensional searches over the two parameter simplices: golden
//! section on an interval, and local refinement around a grid point of `Θ`
//! or of a face of `Ξ`.

/// Golden-section minimization of a unimodal function on `[lo, hi]`,
/// stopping at bracket width `width`. Endpoints are evaluated too, so
/// minima on the boundary are found exactly. Returns the best point seen.
pub(crate) fn golden_min(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, width: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut best = (lo, f(lo));
    let fhi = f(hi);
    if fhi < best.1 {
        best = (hi, fhi);
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > width {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        for (x, fx) in [(c, fc), (d, fd)] {
            if fx < best.1 {
                best = (x, fx);
            }
        }
    }
    best
}

fn window(k: usize, r: usize) -> (f64, f64) {
    let step = 1.0 / r as f64;
    (((k as f64 - 1.0) * step).max(0.0), ((k as f64 + 1.0) * step).min(1.0))
}

/// Minimizes `f` over the points of the simplex supported on `active`,
/// within one step of the grid point `c / r`, by nested golden section.
/// Returns the best point and value seen.
pub(crate) fn refine_theta(
    active: &[usize],
    c: [usize; 3],
    r: usize,
    width: f64,
    mut f: impl FnMut([f64; 3]) -> f64,
) -> ([f64; 3], f64) {
    let mut best = ([0.0; 3], f64::INFINITY);
    let mut eval = |th: [f64; 3]| {
        let v = f(th);
        if v < best.1 {
            best = (th, v);
        }
        v
    };
    match *active {
        [i] => {
            let mut th = [0.0; 3];
            th[i] = 1.0;
            eval(th);
        }
        [i, j] => {
            let (lo, hi) = window(c[i], r);
            golden_min(
                |s| {
                    let mut th = [0.0; 3];
                    th[i] = s;
                    th[j] = 1.0 - s;
                    eval(th)
                },
                lo,
                hi,
                width,
            );
        }
        _ => {
            let (lo1, hi1) = window(c[0], r);
            let (lo2, hi2) = window(c[1], r);
            golden_min(
                |a| golden_min(|b| eval([a, b, 1.0 - a - b]), lo2.min(1.0 - a), hi2.min(1.0 - a), width).1,
                lo1,
                hi1,
                width,
            );
        }
    }
    best
}

/// Minimizes `f` over the face `{ξ_face = 1}` of `Ξ` within one step of the
/// face-grid point `c / r`. Returns the best point and value seen.
pub(crate) fn refine_xi_face(
    c: [usize; 3],
    r: usize,
    width: f64,
    mut f: impl FnMut([f64; 3]) -> f64,
) -> ([f64; 3], f64) {
    let face = (0..3).find(|&i| c[i] == r).expect("grid point lies on a face");
    let others: Vec<usize> = (0..3).filter(|&i| i != face).collect();
    let make = |u: f64, v: f64| {
        let mut x = [1.0; 3];
        x[others[0]] = u;
        x[others[1]] = v;
        x
    };
    let (lo1, hi1) = window(c[others[0]], r);
    let (lo2, hi2) = window(c[others[1]], r);
    let mut best = (make(c[others[0]] as f64 / r as f64, c[others[1]] as f64 / r as f64), f64::INFINITY);
    golden_min(
        |u| {
            golden_min(
                |v| {
                    let x = make(u, v);
                    let val = f(x);
                    if val < best.1 {
                        best = (x, val);
                    }
                    val
                },
                lo2,
                hi2,
                width,
            )
            .1
        },
        lo1,
        hi1,
        width,
    );
    best
}
