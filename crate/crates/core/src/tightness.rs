//! Tightness of supports.
//!
//! A support `Φ ⊆ [m1]×[m2]×[m3]` is tight when there are injective maps
//! `u_i : [m_i] → Z` with `u1(j1) + u2(j2) + u3(j3) = 0` on every triple of
//! `Φ`. The solutions form a lattice inside the rational kernel of one linear
//! equation per triple, so the search works on integer combinations of a
//! kernel basis.
//!
//! If no pair of coordinates on the same axis agrees on the whole kernel,
//! every coordinate difference is a nonzero linear form on the kernel and a
//! generic integer point avoids all of them, so the support is tight. The
//! search therefore either finds a witness, proves non-tightness through a
//! forced pair, or runs out of radius.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::integer_kernel;
use crate::tensor::Support;

/// Default upper limit on the coefficient radius of the search.
pub const DEFAULT_RADIUS: u64 = 1_000_000;

const SAMPLES_PER_RADIUS: usize = 512;
const ENUMERATION_LIMIT: u64 = 1_000_000;

/// Three integer labelings, `u1` on `[m1]`, `u2` on `[m2]`, `u3` on `[m3]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TightWitness {
    pub u1: Vec<i64>,
    pub u2: Vec<i64>,
    pub u3: Vec<i64>,
}

impl TightWitness {
    pub fn axis(&self, i: usize) -> &[i64] {
        match i {
            0 => &self.u1,
            1 => &self.u2,
            _ => &self.u3,
        }
    }

    /// Shifts `u3` so that a constant triple sum becomes zero.
    pub fn normalized(&self, support: &Support) -> TightWitness {
        let c = support.triples().first().map_or(0, |t| self.u1[t[0] - 1] + self.u2[t[1] - 1] + self.u3[t[2] - 1]);
        TightWitness { u1: self.u1.clone(), u2: self.u2.clone(), u3: self.u3.iter().map(|v| v - c).collect() }
    }
}

/// Outcome of [`find_tight_witness`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TightnessOutcome {
    Tight { witness: TightWitness },
    /// Coordinates `a` and `b` (1-based) on `axis` agree on every solution.
    NotTight { axis: usize, a: usize, b: usize },
    /// No witness among the combinations tried up to `radius`.
    Inconclusive { radius: u64 },
}

/// Exact check: every triple has the same sum and every `u_i` is injective.
///
/// A constant nonzero sum is accepted; [`TightWitness::normalized`] turns it
/// into a zero-sum witness.
pub fn verify_tight_witness(support: &Support, w: &TightWitness) -> Result<bool> {
    let dims = support.dims();
    for i in 0..3 {
        if w.axis(i).len() != dims[i] {
            return Err(Error::InvalidWitness(format!(
                "u{} has length {}, expected {}",
                i + 1,
                w.axis(i).len(),
                dims[i]
            )));
        }
    }
    for i in 0..3 {
        let mut vals = w.axis(i).to_vec();
        vals.sort_unstable();
        if vals.windows(2).any(|p| p[0] == p[1]) {
            return Ok(false);
        }
    }
    let sum = |t: &[usize; 3]| -> i128 { (0..3).map(|i| w.axis(i)[t[i] - 1] as i128).sum() };
    let Some(first) = support.triples().first() else {
        return Ok(true);
    };
    let c = sum(first);
    Ok(support.triples().iter().all(|t| sum(t) == c))
}

fn offsets(dims: [usize; 3]) -> [usize; 3] {
    [0, dims[0], dims[0] + dims[1]]
}

/// Integer kernel basis of the system `u1(j1) + u2(j2) + u3(j3) = 0`.
pub fn tightness_kernel(support: &Support) -> Vec<Vec<BigInt>> {
    let dims = support.dims();
    let off = offsets(dims);
    let cols = dims.iter().sum();
    let rows = support
        .triples()
        .iter()
        .map(|t| {
            let mut row = vec![BigInt::zero(); cols];
            for i in 0..3 {
                row[off[i] + t[i] - 1] = BigInt::from(1);
            }
            row
        })
        .collect();
    integer_kernel(rows, cols)
}

fn forced_pair(kernel: &[Vec<BigInt>], dims: [usize; 3]) -> Option<(usize, usize, usize)> {
    let off = offsets(dims);
    for i in 0..3 {
        for a in 0..dims[i] {
            for b in a + 1..dims[i] {
                if kernel.iter().all(|v| v[off[i] + a] == v[off[i] + b]) {
                    return Some((i + 1, a + 1, b + 1));
                }
            }
        }
    }
    None
}

fn combine(kernel: &[Vec<BigInt>], coeffs: &[i64], dims: [usize; 3]) -> Option<TightWitness> {
    let cols: usize = dims.iter().sum();
    let mut x = vec![BigInt::zero(); cols];
    for (v, &c) in kernel.iter().zip(coeffs) {
        if c == 0 {
            continue;
        }
        for j in 0..cols {
            x[j] += &v[j] * c;
        }
    }
    let x: Vec<i64> = x.iter().map(|v| v.to_i64()).collect::<Option<_>>()?;
    let off = offsets(dims);
    let part = |i: usize| x[off[i]..off[i] + dims[i]].to_vec();
    Some(TightWitness { u1: part(0), u2: part(1), u3: part(2) })
}

/// Searches for a tightness witness with coefficient radius doubling from 1
/// to `radius_max`, using a fixed seed.
pub fn find_tight_witness(support: &Support, radius_max: u64) -> Result<TightnessOutcome> {
    find_tight_witness_seeded(support, radius_max, 0)
}

/// As [`find_tight_witness`] with an explicit seed for the sampled radii.
///
/// Small kernels (dimension at most 4) are enumerated exhaustively at each
/// radius while the box has at most a million points; larger ones are
/// sampled.
pub fn find_tight_witness_seeded(support: &Support, radius_max: u64, seed: u64) -> Result<TightnessOutcome> {
    if support.is_empty() {
        return Err(Error::Precondition("tightness needs a nonempty support".into()));
    }
    let dims = support.dims();
    let kernel = tightness_kernel(support);
    if let Some((axis, a, b)) = forced_pair(&kernel, dims) {
        return Ok(TightnessOutcome::NotTight { axis, a, b });
    }
    let d = kernel.len();
    let accept = |coeffs: &[i64]| -> Option<TightWitness> {
        let w = combine(&kernel, coeffs, dims)?;
        (verify_tight_witness(support, &w) == Ok(true)).then_some(w)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut radius = 1u64;
    loop {
        let r = radius.min(radius_max.max(1));
        let side = 2 * r + 1;
        let box_size = (0..d).try_fold(1u64, |acc, _| acc.checked_mul(side));
        let found = match box_size {
            Some(n) if d <= 4 && n <= ENUMERATION_LIMIT => (0..n).find_map(|code| {
                let mut c = code;
                let coeffs: Vec<i64> = (0..d)
                    .map(|_| {
                        let v = (c % side) as i64 - r as i64;
                        c /= side;
                        v
                    })
                    .collect();
                accept(&coeffs)
            }),
            _ => (0..SAMPLES_PER_RADIUS).find_map(|_| {
                let coeffs: Vec<i64> = (0..d).map(|_| rng.random_range(-(r as i64)..=r as i64)).collect();
                accept(&coeffs)
            }),
        };
        if let Some(w) = found {
            let w = w.normalized(support);
            debug_assert_eq!(verify_tight_witness(support, &w), Ok(true));
            return Ok(TightnessOutcome::Tight { witness: w });
        }
        if r >= radius_max {
            return Ok(TightnessOutcome::Inconclusive { radius: r });
        }
        radius = radius.saturating_mul(2);
    }
}

/// Witness for the Kronecker product support `S ⊗ T` built from witnesses
/// of the factors: `u(a, b) = u_S(a)·B + u_T(b)` with `B` exceeding the
/// spread of every `u_T`.
pub fn kron_witness(ws: &TightWitness, wt: &TightWitness) -> Option<TightWitness> {
    let spread = (0..3)
        .map(|i| {
            let v = wt.axis(i);
            v.iter().max().unwrap_or(&0) - v.iter().min().unwrap_or(&0)
        })
        .max()?;
    let base = spread.checked_add(1)?;
    let axis = |i: usize| -> Option<Vec<i64>> {
        let mut out = Vec::new();
        for &a in ws.axis(i) {
            for &b in wt.axis(i) {
                out.push(a.checked_mul(base)?.checked_add(b)?);
            }
        }
        Some(out)
    };
    Some(TightWitness { u1: axis(0)?, u2: axis(1)?, u3: axis(2)? })
}
