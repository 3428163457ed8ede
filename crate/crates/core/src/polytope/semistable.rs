//! Whether the uniform marginals lie in the support polytope, decided by an
//! exact rational LP with a checkable certificate either way.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::lp::{solve, LpOutcome};
use crate::tensor::Support;

/// Outcome of [`uniform_marginals_feasible`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum UniformMarginals {
    /// A distribution on the support (in triple order) with all three
    /// marginals uniform. Entries are reduced fractions `"a/b"`.
    Feasible { weights: Vec<String> },
    /// A vector `z` over the constraint rows (axis 1 values, then axis 2,
    /// then axis 3) with `Aᵀz ≥ 0` and `bᵀz < 0`, where row `(i, a)` reads
    /// `Σ_{s_i = a} p_s = 1/m_i`.
    Infeasible { farkas: Vec<String> },
}

impl UniformMarginals {
    pub fn is_feasible(&self) -> bool {
        matches!(self, UniformMarginals::Feasible { .. })
    }
}

fn rows(support: &Support) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let dims = support.dims();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..3 {
        for v in 1..=dims[i] {
            a.push(
                support
                    .triples()
                    .iter()
                    .map(|t| if t[i] == v { BigRational::one() } else { BigRational::zero() })
                    .collect(),
            );
            b.push(BigRational::new(BigInt::one(), BigInt::from(dims[i])));
        }
    }
    (a, b)
}

fn parse(v: &str) -> Option<BigRational> {
    match v.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            (!d.is_zero()).then(|| BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(v.parse().ok()?)),
    }
}

/// Exact LP feasibility of `p ≥ 0` on the support with uniform marginals.
///
/// The certificate is re-verified in exact arithmetic before returning.
pub fn uniform_marginals_feasible(support: &Support) -> UniformMarginals {
    let (a, b) = rows(support);
    let c = vec![BigRational::zero(); support.len()];
    let out = match solve(&a, &b, &c) {
        LpOutcome::Optimal { x, .. } => UniformMarginals::Feasible { weights: x.iter().map(|v| v.to_string()).collect() },
        LpOutcome::Infeasible { farkas } => {
            UniformMarginals::Infeasible { farkas: farkas.iter().map(|v| v.to_string()).collect() }
        }
        LpOutcome::Unbounded => unreachable!("zero objective is bounded"),
    };
    debug_assert!(verify_semistability(support, &out));
    out
}

/// Exact check of either kind of certificate.
pub fn verify_semistability(support: &Support, cert: &UniformMarginals) -> bool {
    let (a, b) = rows(support);
    match cert {
        UniformMarginals::Feasible { weights } => {
            let Some(p): Option<Vec<BigRational>> = weights.iter().map(|w| parse(w)).collect() else {
                return false;
            };
            if p.len() != support.len() || p.iter().any(|v| v.is_negative()) {
                return false;
            }
            a.iter().zip(&b).all(|(row, rhs)| row.iter().zip(&p).map(|(x, y)| x * y).sum::<BigRational>() == *rhs)
        }
        UniformMarginals::Infeasible { farkas } => {
            let Some(z): Option<Vec<BigRational>> = farkas.iter().map(|w| parse(w)).collect() else {
                return false;
            };
            if z.len() != a.len() {
                return false;
            }
            let columns_ok = (0..support.len())
                .all(|s| !a.iter().zip(&z).map(|(row, zi)| &row[s] * zi).sum::<BigRational>().is_negative());
            let rhs: BigRational = b.iter().zip(&z).map(|(x, y)| x * y).sum();
            columns_ok && rhs.is_negative()
        }
    }
}
