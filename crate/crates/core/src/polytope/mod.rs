//! Optimization over the support polytope `W(T)`: the triples of marginals
//! of probability distributions on a support.
//!
//! Everything here works with base-2 entropies and the convention
//! `0·log 0 = 0`. Values are returned together with their `log2` and a
//! nonnegative gap measured in the exponent.
//!
//! The min-entropy and field functionals are defined over the moment
//! polytope of a tensor; here they are computed over `W(T)` instead and are
//! labeled as the torus analog.

mod awsr;
mod min_entropy;
mod newton;
mod semistable;
mod zeta;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{Index, Support};

pub use awsr::{
    awsr_dual, awsr_dual_on_grid, awsr_primal, field_quantum_functional, field_quantum_functional_on_grid,
    FieldFunctionalResult,
};
pub use min_entropy::{min_entropy_g, min_entropy_zeta};
pub use semistable::{uniform_marginals_feasible, verify_semistability, UniformMarginals};
pub use zeta::{support_functional_zeta, ZetaGrid, ZetaPoint, DEFAULT_THETA_RESOLUTION};

/// Default optimization tolerance, in bits.
pub const DEFAULT_TOL: f64 = 1e-8;

/// A probability distribution on the triples of a support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportDistribution {
    pub dims: [usize; 3],
    pub triples: Vec<Index>,
    pub weights: Vec<f64>,
}

impl SupportDistribution {
    /// Checks nonnegativity and `Σ = 1` within `1e-12`.
    pub fn new(support: &Support, weights: Vec<f64>) -> Result<SupportDistribution> {
        if weights.len() != support.len() {
            return Err(Error::InvalidWitness(format!(
                "{} weights for a support of size {}",
                weights.len(),
                support.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidWitness("weights must be finite and nonnegative".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidWitness(format!("weights sum to {sum}")));
        }
        Ok(SupportDistribution { dims: support.dims(), triples: support.triples().to_vec(), weights })
    }

    pub fn uniform(support: &Support) -> SupportDistribution {
        let n = support.len();
        SupportDistribution {
            dims: support.dims(),
            triples: support.triples().to_vec(),
            weights: vec![1.0 / n as f64; n],
        }
    }

    /// All mass on the `k`-th triple (in lexicographic order).
    pub fn point_mass(support: &Support, k: usize) -> SupportDistribution {
        let mut weights = vec![0.0; support.len()];
        weights[k] = 1.0;
        SupportDistribution { dims: support.dims(), triples: support.triples().to_vec(), weights }
    }

    /// Clamps tiny negatives left by floating-point steps and renormalizes.
    pub(crate) fn from_solver(support: &Support, raw: &[f64]) -> SupportDistribution {
        let clamped: Vec<f64> = raw.iter().map(|v| v.max(0.0)).collect();
        let s: f64 = clamped.iter().sum();
        SupportDistribution {
            dims: support.dims(),
            triples: support.triples().to_vec(),
            weights: clamped.iter().map(|v| v / s).collect(),
        }
    }
}

/// The three marginals `q^i_a = Σ_{s : s_i = a} p_s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalTriple {
    pub q: [Vec<f64>; 3],
}

impl MarginalTriple {
    pub fn entropies(&self) -> [f64; 3] {
        [0, 1, 2].map(|i| shannon_entropy(&self.q[i]))
    }

    pub fn min_entropies(&self) -> [f64; 3] {
        [0, 1, 2].map(|i| min_entropy(&self.q[i]))
    }
}

pub fn marginals(p: &SupportDistribution) -> MarginalTriple {
    let mut q = [0, 1, 2].map(|i| vec![0.0; p.dims[i]]);
    for (t, w) in p.triples.iter().zip(&p.weights) {
        for i in 0..3 {
            q[i][t[i] - 1] += w;
        }
    }
    MarginalTriple { q }
}

/// `H(q) = −Σ q_a log2 q_a`.
pub fn shannon_entropy(q: &[f64]) -> f64 {
    -q.iter().filter(|&&v| v > 0.0).map(|&v| v * v.log2()).sum::<f64>()
}

/// `H_∞(q) = −log2 max_a q_a`.
pub fn min_entropy(q: &[f64]) -> f64 {
    -q.iter().cloned().fold(0.0, f64::max).log2()
}

/// An optimum over the support polytope with its witness.
///
/// `gap` bounds the distance of `log2_value` to the true optimum in the
/// exponent. `upper_bound` is set when the support was not shown to be tight,
/// in which case the polytope formula only bounds `G_ξ` from above.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalResult {
    pub value: f64,
    pub log2_value: f64,
    pub witness: SupportDistribution,
    pub gap: f64,
    pub upper_bound: bool,
}

impl FunctionalResult {
    fn from_log2(log2_value: f64, witness: SupportDistribution, gap: f64) -> FunctionalResult {
        FunctionalResult { value: log2_value.exp2(), log2_value, witness, gap: gap.max(0.0), upper_bound: false }
    }
}

/// Support triples relabeled by the coordinate values that actually occur.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub n: usize,
    /// `local[i][s]`: position of triple `s`'s axis-`i` value among the used values
    pub local: [Vec<usize>; 3],
    /// number of distinct values used on each axis
    pub used: [usize; 3],
}

impl Layout {
    pub fn new(support: &Support) -> Layout {
        let mut local = [Vec::new(), Vec::new(), Vec::new()];
        let mut used = [0; 3];
        for i in 0..3 {
            let mut map = vec![usize::MAX; support.dims()[i] + 1];
            for t in support.triples() {
                if map[t[i]] == usize::MAX {
                    map[t[i]] = 0;
                }
            }
            let mut next = 0;
            for v in map.iter_mut().filter(|v| **v == 0) {
                *v = next;
                next += 1;
            }
            used[i] = next;
            local[i] = support.triples().iter().map(|t| map[t[i]]).collect();
        }
        Layout { n: support.len(), local, used }
    }

    pub fn marginals(&self, p: &[f64]) -> [Vec<f64>; 3] {
        let mut q = [0, 1, 2].map(|i| vec![0.0; self.used[i]]);
        for s in 0..self.n {
            for i in 0..3 {
                q[i][self.local[i][s]] += p[s];
            }
        }
        q
    }

    pub fn entropies(&self, p: &[f64]) -> [f64; 3] {
        let q = self.marginals(p);
        [0, 1, 2].map(|i| shannon_entropy(&q[i]))
    }
}

fn require_nonempty(support: &Support) -> Result<()> {
    if support.is_empty() {
        Err(Error::Precondition("the support polytope of an empty support is empty".into()))
    } else {
        Ok(())
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("tolerance must be positive, got {tol}")))
    }
}
