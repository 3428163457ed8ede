//! Exact scalars: reduced rationals and residues modulo a prime.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The coefficient field of a tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    Rational,
    Gf(u64),
}

impl Field {
    /// Prime field GF(p); rejects composite or oversized moduli.
    pub fn gf(p: u64) -> Result<Field> {
        if p >= 1 << 62 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field::Gf(p))
    }

    /// Number of elements, or `None` for the rationals.
    pub fn order(&self) -> Option<u64> {
        match self {
            Field::Rational => None,
            Field::Gf(p) => Some(*p),
        }
    }

    pub fn zero(&self) -> FieldElement {
        match self {
            Field::Rational => FieldElement::Rational(BigRational::zero()),
            Field::Gf(p) => FieldElement::Residue { value: 0, modulus: *p },
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> FieldElement {
        match self {
            Field::Rational => FieldElement::Rational(BigRational::from_integer(v.into())),
            Field::Gf(p) => FieldElement::Residue { value: reduce_i128(v as i128, *p), modulus: *p },
        }
    }

    /// Rational `num/den` or, for prime fields, `num * den^{-1}`.
    pub fn from_fraction(&self, num: BigInt, den: BigInt) -> Result<FieldElement> {
        if den.is_zero() {
            return Err(Error::Format("zero denominator".into()));
        }
        match self {
            Field::Rational => Ok(FieldElement::Rational(BigRational::new(num, den))),
            Field::Gf(p) => {
                let n = reduce_big(&num, *p);
                let d = reduce_big(&den, *p);
                if d == 0 {
                    return Err(Error::Format(format!("denominator divisible by {p}")));
                }
                Ok(FieldElement::Residue { value: mul_mod(n, inv_mod(d, *p), *p), modulus: *p })
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "rational"),
            Field::Gf(p) => write!(f, "gf({p})"),
        }
    }
}

/// An element of [`Field`]. Rationals are kept in lowest terms with positive
/// denominator; residues live in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Rational(BigRational),
    Residue { value: u64, modulus: u64 },
}

impl FieldElement {
    pub fn field(&self) -> Field {
        match self {
            FieldElement::Rational(_) => Field::Rational,
            FieldElement::Residue { modulus, .. } => Field::Gf(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(r) => r.is_zero(),
            FieldElement::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Rational(r) => r.is_one(),
            FieldElement::Residue { value, .. } => *value == 1,
        }
    }

    /// Product of two elements of the same field.
    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        match (self, other) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => Ok(FieldElement::Rational(a * b)),
            (FieldElement::Residue { value: a, modulus: p }, FieldElement::Residue { value: b, modulus: q })
                if p == q =>
            {
                Ok(FieldElement::Residue { value: mul_mod(*a, *b, *p), modulus: *p })
            }
            _ => Err(Error::FieldMismatch(self.field(), other.field())),
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        match (self, other) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => Ok(FieldElement::Rational(a + b)),
            (FieldElement::Residue { value: a, modulus: p }, FieldElement::Residue { value: b, modulus: q })
                if p == q =>
            {
                Ok(FieldElement::Residue { value: add_mod(*a, *b, *p), modulus: *p })
            }
            _ => Err(Error::FieldMismatch(self.field(), other.field())),
        }
    }

    /// Numerator and denominator; residues report denominator 1.
    pub fn to_fraction(&self) -> (BigInt, BigInt) {
        match self {
            FieldElement::Rational(r) => (r.numer().clone(), r.denom().clone()),
            FieldElement::Residue { value, .. } => (BigInt::from(*value), BigInt::one()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            FieldElement::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            FieldElement::Residue { value, .. } => *value as f64,
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(r) => write!(f, "{r}"),
            FieldElement::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

pub(crate) fn reduce_i128(v: i128, p: u64) -> u64 {
    v.rem_euclid(p as i128) as u64
}

pub(crate) fn reduce_big(v: &BigInt, p: u64) -> u64 {
    let p_big = BigInt::from(p);
    let mut r = v % &p_big;
    if r.is_negative() {
        r += &p_big;
    }
    r.to_u64().expect("residue fits in u64")
}

pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

pub(crate) fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + p as u128 - b as u128) % p as u128) as u64
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue modulo a prime.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
