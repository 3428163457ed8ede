//! Log-barrier path following for concave maximization over the probability
//! simplex, with Newton centering steps on the equality-constrained KKT
//! system.

use nalgebra::{DMatrix, DVector};

use super::Layout;

const LN2: f64 = std::f64::consts::LN_2;

/// A barrier-augmented concave objective. The first `layout.n` variables are
/// the distribution `p`; problems may append extra unconstrained variables.
pub(crate) trait Barrier {
    fn dim(&self) -> usize;
    fn simplex_dim(&self) -> usize;
    /// Number of logarithmic barrier terms; the duality gap at a centered
    /// point is at most this times `μ`.
    fn barrier_terms(&self) -> usize;
    /// Objective plus `μ` times the barrier, or `None` outside the domain.
    fn value(&self, x: &[f64], mu: f64) -> Option<f64>;
    fn derivatives(&self, x: &[f64], mu: f64) -> (DVector<f64>, DMatrix<f64>);
}

/// Follows the central path from a strictly feasible `x` until
/// `barrier_terms · μ ≤ tol / 10`.
pub(crate) fn follow_path<B: Barrier>(problem: &B, mut x: Vec<f64>, tol: f64) -> Vec<f64> {
    let mut mu = 0.1;
    let target = tol / (10.0 * problem.barrier_terms().max(1) as f64);
    loop {
        center(problem, &mut x, mu);
        if mu <= target {
            return x;
        }
        mu = (mu * 0.1).max(target);
    }
}

fn center<B: Barrier>(problem: &B, x: &mut Vec<f64>, mu: f64) {
    let n = problem.dim();
    let k = problem.simplex_dim();
    for _ in 0..100 {
        let Some(f0) = problem.value(x, mu) else { return };
        let (g, h) = problem.derivatives(x, mu);
        let mut kkt = DMatrix::<f64>::zeros(n + 1, n + 1);
        kkt.view_mut((0, 0), (n, n)).copy_from(&h);
        for j in 0..k {
            kkt[(j, n)] = 1.0;
            kkt[(n, j)] = 1.0;
        }
        let mut rhs = DVector::<f64>::zeros(n + 1);
        for j in 0..n {
            rhs[j] = -g[j];
        }
        let Some(sol) = kkt.lu().solve(&rhs) else { return };
        let dx: Vec<f64> = (0..n).map(|j| sol[j]).collect();
        let slope: f64 = (0..n).map(|j| g[j] * dx[j]).sum();
        if !(slope > 1e-13 * f0.abs().max(1.0)) {
            return;
        }
        let mut alpha = 1.0;
        // fraction to the boundary of p ≥ 0
        for j in 0..k {
            if dx[j] < 0.0 {
                alpha = f64::min(alpha, -0.99 * x[j] / dx[j]);
            }
        }
        let mut moved = false;
        for _ in 0..60 {
            let trial: Vec<f64> = (0..n).map(|j| x[j] + alpha * dx[j]).collect();
            if let Some(f1) = problem.value(&trial, mu) {
                if f1 >= f0 + 0.25 * alpha * slope {
                    *x = trial;
                    moved = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !moved {
            return;
        }
    }
}

fn entropy_terms(q: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
    let h = -q.iter().map(|&v| v * v.log2()).sum::<f64>();
    let d1 = q.iter().map(|&v| -(v.log2() + 1.0 / LN2)).collect();
    let d2 = q.iter().map(|&v| -1.0 / (v * LN2)).collect();
    (h, d1, d2)
}

fn log_barrier(p: &[f64]) -> Option<f64> {
    if p.iter().all(|&v| v > 0.0) {
        Some(p.iter().map(|v| v.ln()).sum())
    } else {
        None
    }
}

/// `max Σ_i θ_i H(q^i)` over the simplex.
pub(crate) struct ZetaProblem<'a> {
    pub layout: &'a Layout,
    pub theta: [f64; 3],
}

impl ZetaProblem<'_> {
    /// Objective (bits) and its gradient, both without the barrier.
    pub fn objective(&self, p: &[f64]) -> (f64, Vec<f64>) {
        let l = self.layout;
        let q = l.marginals(p);
        let mut f = 0.0;
        let mut g = vec![0.0; l.n];
        for i in 0..3 {
            if self.theta[i] == 0.0 {
                continue;
            }
            let (h, d1, _) = entropy_terms(&q[i].iter().map(|v| v.max(1e-300)).collect::<Vec<_>>());
            f += self.theta[i] * h;
            for s in 0..l.n {
                g[s] += self.theta[i] * d1[l.local[i][s]];
            }
        }
        (f, g)
    }
}

impl Barrier for ZetaProblem<'_> {
    fn dim(&self) -> usize {
        self.layout.n
    }

    fn simplex_dim(&self) -> usize {
        self.layout.n
    }

    fn barrier_terms(&self) -> usize {
        self.layout.n
    }

    fn value(&self, p: &[f64], mu: f64) -> Option<f64> {
        let b = log_barrier(p)?;
        let q = self.layout.marginals(p);
        let f: f64 = (0..3).filter(|&i| self.theta[i] > 0.0).map(|i| self.theta[i] * super::shannon_entropy(&q[i])).sum();
        Some(f + mu * b)
    }

    fn derivatives(&self, p: &[f64], mu: f64) -> (DVector<f64>, DMatrix<f64>) {
        let l = self.layout;
        let n = l.n;
        let q = l.marginals(p);
        let mut g = DVector::zeros(n);
        let mut h = DMatrix::zeros(n, n);
        for i in 0..3 {
            let th = self.theta[i];
            if th == 0.0 {
                continue;
            }
            let (_, d1, d2) = entropy_terms(&q[i]);
            for s in 0..n {
                let a = l.local[i][s];
                g[s] += th * d1[a];
                for t in 0..n {
                    if l.local[i][t] == a {
                        h[(s, t)] += th * d2[a];
                    }
                }
            }
        }
        for s in 0..n {
            g[s] += mu / p[s];
            h[(s, s)] -= mu / (p[s] * p[s]);
        }
        (g, h)
    }
}

/// `max_p min_{i active} H(q^i)/ξ_i`, written as `max t` subject to
/// `H(q^i)/ξ_i ≥ t`. The variables are `(p, t)`.
pub(crate) struct MaxMinProblem<'a> {
    pub layout: &'a Layout,
    pub xi: [f64; 3],
    pub active: Vec<usize>,
}

impl MaxMinProblem<'_> {
    /// `φ_i(p) = H(q^i)/ξ_i` for the active axes.
    pub fn phis(&self, p: &[f64]) -> Vec<f64> {
        let q = self.layout.marginals(p);
        self.active.iter().map(|&i| super::shannon_entropy(&q[i]) / self.xi[i]).collect()
    }

    /// Gradients of `φ_i` with respect to `p`, active axes only.
    pub fn phi_gradients(&self, p: &[f64]) -> Vec<Vec<f64>> {
        let l = self.layout;
        let q = l.marginals(p);
        self.active
            .iter()
            .map(|&i| {
                let d1: Vec<f64> = q[i].iter().map(|&v| -(v.max(1e-300).log2() + 1.0 / LN2)).collect();
                (0..l.n).map(|s| d1[l.local[i][s]] / self.xi[i]).collect()
            })
            .collect()
    }
}

impl Barrier for MaxMinProblem<'_> {
    fn dim(&self) -> usize {
        self.layout.n + 1
    }

    fn simplex_dim(&self) -> usize {
        self.layout.n
    }

    fn barrier_terms(&self) -> usize {
        self.layout.n + self.active.len()
    }

    fn value(&self, x: &[f64], mu: f64) -> Option<f64> {
        let n = self.layout.n;
        let t = x[n];
        let b = log_barrier(&x[..n])?;
        let mut gaps = 0.0;
        for phi in self.phis(&x[..n]) {
            if phi - t <= 0.0 {
                return None;
            }
            gaps += (phi - t).ln();
        }
        Some(t + mu * (b + gaps))
    }

    fn derivatives(&self, x: &[f64], mu: f64) -> (DVector<f64>, DMatrix<f64>) {
        let l = self.layout;
        let n = l.n;
        let p = &x[..n];
        let t = x[n];
        let q = l.marginals(p);
        let mut g = DVector::zeros(n + 1);
        let mut h = DMatrix::zeros(n + 1, n + 1);
        g[n] = 1.0;
        for &i in &self.active {
            let (ent, d1, d2) = entropy_terms(&q[i]);
            let xi = self.xi[i];
            let d = ent / xi - t;
            let w = mu / d;
            // gradient of φ_i − t in (p, t)
            let mut grad: Vec<f64> = (0..n).map(|s| d1[l.local[i][s]] / xi).collect();
            grad.push(-1.0);
            for a in 0..=n {
                g[a] += w * grad[a];
            }
            for s in 0..n {
                for u in 0..n {
                    if l.local[i][u] == l.local[i][s] {
                        h[(s, u)] += w * d2[l.local[i][s]] / xi;
                    }
                }
            }
            let w2 = mu / (d * d);
            for a in 0..=n {
                for b in 0..=n {
                    h[(a, b)] -= w2 * grad[a] * grad[b];
                }
            }
        }
        for s in 0..n {
            g[s] += mu / p[s];
            h[(s, s)] -= mu / (p[s] * p[s]);
        }
        (g, h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::tensor::{build_w_tensor, Support};

    /// Central differences against the analytic derivatives.
    fn check_derivatives<B: Barrier>(b: &B, x: &[f64], mu: f64) {
        let (g, h) = b.derivatives(x, mu);
        let eps = 1e-6;
        for j in 0..b.dim() {
            let mut up = x.to_vec();
            let mut dn = x.to_vec();
            up[j] += eps;
            dn[j] -= eps;
            let fd = (b.value(&up, mu).unwrap() - b.value(&dn, mu).unwrap()) / (2.0 * eps);
            assert!((fd - g[j]).abs() < 1e-5 * fd.abs().max(1.0), "gradient {j}: {fd} vs {}", g[j]);
            let (gu, _) = b.derivatives(&up, mu);
            let (gd, _) = b.derivatives(&dn, mu);
            for k in 0..b.dim() {
                let fd2 = (gu[k] - gd[k]) / (2.0 * eps);
                assert!((fd2 - h[(k, j)]).abs() < 1e-4 * fd2.abs().max(1.0), "hessian {k},{j}");
            }
        }
    }

    #[test]
    fn zeta_derivatives() {
        let s = Support::new([2, 2, 3], [[1, 1, 1], [1, 2, 2], [2, 1, 3], [2, 2, 1]]).unwrap();
        let l = Layout::new(&s);
        let z = ZetaProblem { layout: &l, theta: [0.2, 0.5, 0.3] };
        check_derivatives(&z, &[0.1, 0.2, 0.3, 0.4], 0.01);
    }

    #[test]
    fn maxmin_derivatives() {
        let s = build_w_tensor(Field::Rational).support();
        let l = Layout::new(&s);
        let m = MaxMinProblem { layout: &l, xi: [1.0, 0.5, 1.0], active: vec![0, 1, 2] };
        check_derivatives(&m, &[0.2, 0.3, 0.5, 0.1], 0.05);
    }

    #[test]
    fn zeta_path_on_w() {
        let s = build_w_tensor(Field::Rational).support();
        let l = Layout::new(&s);
        let z = ZetaProblem { layout: &l, theta: [1.0 / 3.0; 3] };
        let p = follow_path(&z, vec![1.0 / 3.0; 3], 1e-10);
        let (f, _) = z.objective(&p);
        assert!((f - (3f64.log2() - 2.0 / 3.0)).abs() < 1e-9);
    }
}
