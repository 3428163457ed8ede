//! Partitions and dimensions of symmetric-group and general-linear-group
//! irreducibles, with the classical bounds checked exactly.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on `n·k` in [`entropy_rate_check`].
pub const DEFAULT_RATE_BUDGET: usize = 100_000;

/// A partition: non-increasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Accepts trailing zeros and drops them.
    pub fn new(parts: impl Into<Vec<usize>>) -> Result<Partition> {
        let mut parts = parts.into();
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.contains(&0) {
            return Err(Error::InvalidPartition(format!("{parts:?} is not non-increasing")));
        }
        Ok(Partition(parts))
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    /// Number of positive parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `nλ`.
    pub fn stretch(&self, n: usize) -> Partition {
        if n == 0 {
            return Partition(Vec::new());
        }
        Partition(self.0.iter().map(|p| p * n).collect())
    }

    /// Row-wise sum `λ + μ`, padding the shorter with zeros.
    pub fn add(&self, other: &Partition) -> Partition {
        let m = self.len().max(other.len());
        let get = |p: &Partition, i: usize| p.0.get(i).copied().unwrap_or(0);
        Partition((0..m).map(|i| get(self, i) + get(other, i)).collect())
    }

    /// The conjugate partition (column lengths).
    pub fn conjugate(&self) -> Partition {
        let first = self.0.first().copied().unwrap_or(0);
        Partition((0..first).map(|j| self.0.iter().filter(|&&p| p > j).count()).collect())
    }

    /// Hook lengths, row by row.
    pub fn hooks(&self) -> Vec<usize> {
        let cols = self.conjugate();
        let mut out = Vec::with_capacity(self.size());
        for (i, &row) in self.0.iter().enumerate() {
            for j in 0..row {
                out.push(row - j + cols.0[j] - i - 1);
            }
        }
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All partitions of `k`, in reverse lexicographic order starting at `(k)`.
pub fn partitions(k: usize) -> Vec<Partition> {
    fn rec(rest: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(prefix.clone()));
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            prefix.push(p);
            rec(rest - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, k, &mut Vec::new(), &mut out);
    out
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, j| acc * j)
}

/// `dim [λ] = k! / Π hooks`.
pub fn specht_dim_exact(lambda: &Partition) -> BigUint {
    let hooks = lambda.hooks().into_iter().fold(BigUint::one(), |acc, h| acc * h as u64);
    factorial(lambda.size()) / hooks
}

/// Dimension of the `GL_m` irreducible with highest weight `λ`, by the
/// hook-content formula; zero when `λ` has more than `m` parts.
pub fn schur_dim_exact(lambda: &Partition, m: usize) -> BigUint {
    if lambda.len() > m {
        return BigUint::zero();
    }
    let mut num = BigUint::one();
    for (i, &row) in lambda.parts().iter().enumerate() {
        for j in 0..row {
            num *= (m + j - i) as u64;
        }
    }
    let hooks = lambda.hooks().into_iter().fold(BigUint::one(), |acc, h| acc * h as u64);
    num / hooks
}

/// `(k+1)^{m(m−1)/2}`, which bounds the dimension of every `GL_m`
/// irreducible indexed by a partition of `k`.
pub fn schur_dim_bound(k: usize, m: usize) -> BigUint {
    BigUint::from(k + 1).pow((m * m.saturating_sub(1) / 2) as u32)
}

/// Bounds `k! / Π_i (λ_i + d − i)! ≤ dim [λ] ≤ k! / Π_i λ_i!` with `d` the
/// number of parts. The lower bound need not be an integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpechtBounds {
    pub lower: BigRational,
    pub upper: BigUint,
}

impl SpechtBounds {
    pub fn contains(&self, v: &BigUint) -> bool {
        let v = BigRational::from_integer(BigInt::from(v.clone()));
        self.lower <= v && v <= BigRational::from_integer(BigInt::from(self.upper.clone()))
    }
}

pub fn specht_bounds(lambda: &Partition) -> SpechtBounds {
    let k = factorial(lambda.size());
    let d = lambda.len();
    let lower_den = lambda.parts().iter().enumerate().fold(BigUint::one(), |acc, (i, &p)| acc * factorial(p + d - i - 1));
    let upper_den = lambda.parts().iter().fold(BigUint::one(), |acc, &p| acc * factorial(p));
    SpechtBounds {
        lower: BigRational::new(BigInt::from(k.clone()), BigInt::from(lower_den)),
        upper: k / upper_den,
    }
}

/// Outcome of [`entropy_rate_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub lambda: Partition,
    pub n: usize,
    /// `dim [nλ]` in decimal
    pub dim: String,
    pub log2_dim: f64,
    /// `H(λ/k)·k·n`
    pub log2_bound: f64,
    pub holds: bool,
}

fn big_log2(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits < 1000 {
        v.to_f64().map_or(f64::INFINITY, f64::log2)
    } else {
        let shift = bits - 64;
        (v >> shift).to_f64().map_or(0.0, f64::log2) + shift as f64
    }
}

/// Checks `dim [nλ] ≤ 2^{H(λ/k) k n}` exactly, in the equivalent integer
/// form `dim [nλ] · Π_i λ_i^{nλ_i} ≤ k^{kn}`.
pub fn entropy_rate_check(lambda: &Partition, n: usize, budget: usize) -> Result<RateReport> {
    let k = lambda.size();
    let work = n.saturating_mul(k);
    if work as u128 > budget as u128 {
        return Err(Error::BudgetExceeded { needed: work as u128, budget: budget as u128, hint: "lower n".into() });
    }
    let dim = specht_dim_exact(&lambda.stretch(n));
    let lhs = lambda.parts().iter().fold(dim.clone(), |acc, &p| acc * BigUint::from(p).pow((p * n) as u32));
    let rhs = BigUint::from(k).pow((k * n) as u32);
    let h: f64 = lambda.parts().iter().map(|&p| -(p as f64 / k as f64) * (p as f64 / k as f64).log2()).sum();
    Ok(RateReport {
        lambda: lambda.clone(),
        n,
        log2_dim: big_log2(&dim),
        dim: dim.to_string(),
        log2_bound: h * (k * n) as f64,
        holds: lhs <= rhs,
    })
}

/// `dim [λ + μ] ≥ dim [λ] · dim [μ]`, compared exactly.
pub fn lr_superadditivity_check(lambda: &Partition, mu: &Partition) -> bool {
    specht_dim_exact(&lambda.add(mu)) >= specht_dim_exact(lambda) * specht_dim_exact(mu)
}
