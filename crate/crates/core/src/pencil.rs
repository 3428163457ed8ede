//! Commutative rank of the matrix pencil `Σ_k x_k T[:, :, k]` by random
//! substitution (Schwartz-Zippel).
//!
//! The pencil has entries linear in `x`, so every minor is a polynomial of
//! degree at most `min(m1, m2)`. A random point from a set of size `N`
//! misses a nonvanishing maximal minor with probability at most
//! `min(m1, m2) / N`. Substitution values are drawn from a set of size at
//! least `64·m1·m2·m3`; for small prime fields that means working in an
//! extension field `GF(p^e)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{add_mod, inv_mod, mul_mod, sub_mod, Field, FieldElement};
use crate::linalg::{modular_rank, Matrix};
use crate::tensor::SparseTensor;

/// Default number of random substitutions.
pub const DEFAULT_TRIALS: usize = 20;

/// Maximum rank of the pencil over `trials` random substitutions.
///
/// Never exceeds the true commutative rank; equals it except with
/// probability at most `(min(m1,m2) / N)^trials`, where `N ≥ 64·m1·m2·m3` is
/// the size of the substitution set. Deterministic for a given `seed`.
pub fn commutative_rank(t: &SparseTensor, trials: usize, seed: u64) -> usize {
    let [m1, m2, m3] = t.dims();
    if t.nnz() == 0 {
        return 0;
    }
    let needed = 64u128 * (m1 * m2 * m3) as u128;
    let cap = m1.min(m2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..trials.max(1) {
        let r = match t.field() {
            Field::Rational => {
                let bound = needed as i64;
                let x: Vec<i64> = (0..m3).map(|_| rng.random_range(-bound..=bound)).collect();
                rational_pencil_rank(t, &x)
            }
            Field::Gf(p) if p as u128 > needed => {
                let x: Vec<u64> = (0..m3).map(|_| rng.random_range(0..p)).collect();
                prime_pencil_rank(t, p, &x)
            }
            Field::Gf(p) => {
                let ext = ExtensionField::with_order_above(p, needed);
                let x: Vec<Vec<u64>> = (0..m3).map(|_| ext.random(&mut rng)).collect();
                ext_pencil_rank(t, &ext, &x)
            }
        };
        best = best.max(r);
        if best == cap {
            break;
        }
    }
    best
}

fn rational_pencil_rank(t: &SparseTensor, x: &[i64]) -> usize {
    let [m1, m2, _] = t.dims();
    let mut acc = vec![BigRational::zero(); m1 * m2];
    for (idx, v) in t.entries() {
        if let FieldElement::Rational(q) = v {
            acc[(idx[0] - 1) * m2 + idx[1] - 1] += q * BigInt::from(x[idx[2] - 1]);
        }
    }
    let mut m = Matrix::zeros(m1, m2, Field::Rational);
    for (pos, q) in acc.into_iter().enumerate() {
        m.set(pos / m2 + 1, pos % m2 + 1, FieldElement::Rational(q)).expect("same field");
    }
    m.rank()
}

fn prime_pencil_rank(t: &SparseTensor, p: u64, x: &[u64]) -> usize {
    let [m1, m2, _] = t.dims();
    let mut rows = vec![vec![0u64; m2]; m1];
    for (idx, v) in t.entries() {
        if let FieldElement::Residue { value, .. } = v {
            let cell = &mut rows[idx[0] - 1][idx[1] - 1];
            *cell = add_mod(*cell, mul_mod(*value, x[idx[2] - 1], p), p);
        }
    }
    modular_rank(rows, p)
}

fn ext_pencil_rank(t: &SparseTensor, ext: &ExtensionField, x: &[Vec<u64>]) -> usize {
    let [m1, m2, _] = t.dims();
    let mut rows = vec![vec![ext.zero(); m2]; m1];
    for (idx, v) in t.entries() {
        if let FieldElement::Residue { value, .. } = v {
            let term = ext.scale(&x[idx[2] - 1], *value);
            let cell = &mut rows[idx[0] - 1][idx[1] - 1];
            *cell = ext.add(cell, &term);
        }
    }
    ext.rank(rows)
}

/// `GF(p^e) = GF(p)[y] / (f)` for a monic irreducible `f` of degree `e`.
/// Elements are coefficient vectors of length `e`, lowest degree first.
#[derive(Debug, Clone)]
pub struct ExtensionField {
    p: u64,
    modulus: Vec<u64>,
}

impl ExtensionField {
    /// Smallest extension of `GF(p)` with more than `min_order` elements,
    /// using the lexicographically first irreducible modulus.
    pub fn with_order_above(p: u64, min_order: u128) -> ExtensionField {
        let mut e = 1u32;
        while (p as u128).pow(e) <= min_order {
            e += 1;
        }
        ExtensionField { p, modulus: first_irreducible(p, e as usize) }
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.degree() as u32)
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.degree()]
    }

    pub fn one(&self) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = 1;
        v
    }

    fn random(&self, rng: &mut impl Rng) -> Vec<u64> {
        (0..self.degree()).map(|_| rng.random_range(0..self.p)).collect()
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| add_mod(*x, *y, self.p)).collect()
    }

    fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| sub_mod(*x, *y, self.p)).collect()
    }

    fn scale(&self, a: &[u64], s: u64) -> Vec<u64> {
        a.iter().map(|x| mul_mod(*x, s, self.p)).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let prod = poly_mul(a, b, self.p);
        let mut r = poly_rem(&prod, &self.modulus, self.p);
        r.resize(self.degree(), 0);
        r
    }

    pub fn pow(&self, a: &[u64], mut exp: u128) -> Vec<u64> {
        let mut acc = self.one();
        let mut base = a.to_vec();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero element (Fermat).
    pub fn inv(&self, a: &[u64]) -> Vec<u64> {
        self.pow(a, self.order() - 2)
    }

    fn rank(&self, mut a: Vec<Vec<Vec<u64>>>) -> usize {
        let m = a.len();
        let n = if m == 0 { 0 } else { a[0].len() };
        let is_zero = |v: &Vec<u64>| v.iter().all(|&c| c == 0);
        let mut r = 0;
        for c in 0..n {
            if r == m {
                break;
            }
            let Some(piv) = (r..m).find(|&i| !is_zero(&a[i][c])) else {
                continue;
            };
            a.swap(r, piv);
            let inv = self.inv(&a[r][c]);
            for i in r + 1..m {
                if is_zero(&a[i][c]) {
                    continue;
                }
                let factor = self.mul(&a[i][c], &inv);
                for j in c..n {
                    let sub = self.mul(&factor, &a[r][j]);
                    a[i][j] = self.sub(&a[i][j], &sub);
                }
            }
            r += 1;
        }
        r
    }
}

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = add_mod(out[i + j], mul_mod(*x, *y, p), p);
        }
    }
    trim(out)
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let m = trim(m.to_vec());
    let mut r = trim(a.to_vec());
    let lead_inv = inv_mod(*m.last().expect("nonzero modulus"), p);
    while r.len() >= m.len() {
        let shift = r.len() - m.len();
        let f = mul_mod(*r.last().unwrap(), lead_inv, p);
        for (i, c) in m.iter().enumerate() {
            r[shift + i] = sub_mod(r[shift + i], mul_mod(f, *c, p), p);
        }
        r = trim(r);
    }
    r
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn poly_powmod(base: &[u64], mut exp: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = poly_rem(&poly_mul(&acc, &b, p), m, p);
        }
        b = poly_rem(&poly_mul(&b, &b, p), m, p);
        exp >>= 1;
    }
    acc
}

/// `y^(p^j) mod f` by repeated Frobenius.
fn frobenius_power(j: usize, f: &[u64], p: u64) -> Vec<u64> {
    let mut h = poly_rem(&[0, 1], f, p);
    for _ in 0..j {
        h = poly_powmod(&h, p, f, p);
    }
    h
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test for a monic `f` of degree `e`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let e = f.len() - 1;
    let y = vec![0u64, 1];
    let full = frobenius_power(e, f, p);
    if trim(sub_poly(&full, &y, p)) != Vec::<u64>::new() {
        return false;
    }
    for q in prime_factors(e) {
        let h = frobenius_power(e / q, f, p);
        let g = poly_gcd(f, &sub_poly(&h, &y, p), p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn sub_poly(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let at = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
    trim((0..n).map(|i| sub_mod(at(a, i), at(b, i), p)).collect())
}

fn first_irreducible(p: u64, e: usize) -> Vec<u64> {
    if e == 1 {
        return vec![0, 1];
    }
    let mut coeffs = vec![0u64; e];
    loop {
        let mut f = coeffs.clone();
        f.push(1);
        if coeffs[0] != 0 && is_irreducible(&f, p) {
            return f;
        }
        // next coefficient vector in base-p counting order
        let mut i = 0;
        loop {
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            i += 1;
            assert!(i < e, "an irreducible polynomial of every degree exists");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{build_diagonal, build_w_tensor};

    #[test]
    fn diagonal_and_zero() {
        for n in 1..=4 {
            let t = build_diagonal(n, Field::Rational).unwrap();
            assert_eq!(commutative_rank(&t, DEFAULT_TRIALS, 0), n);
        }
        let z = SparseTensor::zero([3, 3, 3], Field::Rational).unwrap();
        assert_eq!(commutative_rank(&z, DEFAULT_TRIALS, 0), 0);
    }

    #[test]
    fn w_pencil_has_full_rank() {
        // pencil [[x2, x1], [x1, 0]] with determinant -x1^2
        for field in [Field::Rational, Field::Gf(2), Field::Gf(101), Field::Gf(1_000_003)] {
            assert_eq!(commutative_rank(&build_w_tensor(field), DEFAULT_TRIALS, 7), 2, "{field}");
        }
    }

    #[test]
    fn irreducible_moduli() {
        // y^2 + 1 is reducible mod 5 (2^2 = -1), y^2 + 2 is not
        assert!(!is_irreducible(&[1, 0, 1], 5));
        assert!(is_irreducible(&[2, 0, 1], 5));
        // y^2 + y + 1 is the only irreducible quadratic over GF(2)
        assert_eq!(first_irreducible(2, 2), vec![1, 1, 1]);
        let ext = ExtensionField::with_order_above(2, 4096);
        assert_eq!(ext.degree(), 13);
        // every nonzero element has order dividing p^e - 1
        let a: Vec<u64> = (0..13).map(|i| (i % 2) as u64).collect();
        assert_eq!(ext.pow(&a, ext.order() - 1), ext.one());
        assert_eq!(ext.mul(&a, &ext.inv(&a)), ext.one());
    }

    #[test]
    fn extension_exceeds_needed_order() {
        let ext = ExtensionField::with_order_above(101, 64 * 64);
        assert_eq!(ext.degree(), 2);
        assert!(ext.order() > 4096);
    }

    #[test]
    fn rank_one_pencil_over_tiny_field() {
        // T[:,:,k] = e1 e1^T for each k: the pencil is (x1 + x2) e1 e1^T
        let f = Field::Gf(2);
        let t = SparseTensor::from_entries([2, 2, 2], f, [([1, 1, 1], f.one()), ([1, 1, 2], f.one())]).unwrap();
        assert_eq!(commutative_rank(&t, DEFAULT_TRIALS, 3), 1);
    }
}
