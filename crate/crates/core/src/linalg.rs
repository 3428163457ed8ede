//! Exact matrices and fraction-free elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{inv_mod, mul_mod, sub_mod, Field, FieldElement};

/// Dense matrix over a [`Field`], row-major, 0-based storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<FieldElement>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, field: Field) -> Matrix {
        Matrix { rows, cols, field, data: vec![field.zero(); rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Entry at 1-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> &FieldElement {
        &self.data[(row - 1) * self.cols + (col - 1)]
    }

    /// Overwrites the entry at 1-based `(row, col)`.
    pub fn set(&mut self, row: usize, col: usize, value: FieldElement) -> Result<()> {
        if value.field() != self.field {
            return Err(Error::FieldMismatch(self.field, value.field()));
        }
        self.data[(row - 1) * self.cols + (col - 1)] = value;
        Ok(())
    }

    /// Exact rank: Bareiss elimination over the integers for rational
    /// matrices, plain elimination for prime fields.
    pub fn rank(&self) -> usize {
        match self.field {
            Field::Rational => {
                let rows: Vec<Vec<BigInt>> = (0..self.rows).map(|r| self.integer_row(r)).collect();
                bareiss_rank(rows)
            }
            Field::Gf(p) => {
                let rows: Vec<Vec<u64>> = (0..self.rows)
                    .map(|r| {
                        self.data[r * self.cols..(r + 1) * self.cols]
                            .iter()
                            .map(|e| match e {
                                FieldElement::Residue { value, .. } => *value,
                                FieldElement::Rational(_) => unreachable!(),
                            })
                            .collect()
                    })
                    .collect();
                modular_rank(rows, p)
            }
        }
    }

    /// Row `r` (0-based) scaled by the lcm of its denominators.
    fn integer_row(&self, r: usize) -> Vec<BigInt> {
        let row = &self.data[r * self.cols..(r + 1) * self.cols];
        let mut lcm = BigInt::one();
        for e in row {
            if let FieldElement::Rational(q) = e {
                lcm = lcm.lcm(q.denom());
            }
        }
        row.iter()
            .map(|e| match e {
                FieldElement::Rational(q) => q.numer() * (&lcm / q.denom()),
                FieldElement::Residue { .. } => unreachable!(),
            })
            .collect()
    }
}

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
pub fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let m = a.len();
    if m == 0 {
        return 0;
    }
    let n = a[0].len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(piv) = (r..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, piv);
        for i in r + 1..m {
            for j in c + 1..n {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                debug_assert!((&v % &prev).is_zero());
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// Rank modulo a prime `p`.
pub fn modular_rank(mut a: Vec<Vec<u64>>, p: u64) -> usize {
    let m = a.len();
    if m == 0 {
        return 0;
    }
    let n = a[0].len();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(piv) = (r..m).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, piv);
        let inv = inv_mod(a[r][c], p);
        for i in r + 1..m {
            if a[i][c] == 0 {
                continue;
            }
            let factor = mul_mod(a[i][c], inv, p);
            for j in c..n {
                let sub = mul_mod(factor, a[r][j], p);
                a[i][j] = sub_mod(a[i][j], sub, p);
            }
        }
        r += 1;
    }
    r
}

/// Integer basis of the rational kernel `{x : A x = 0}` of an integer matrix
/// with `cols` columns. Uses fraction-free Gauss-Jordan elimination so that
/// every intermediate entry stays an integer; each basis vector is primitive
/// (gcd 1) with a positive entry at its free column.
pub fn integer_kernel(mut a: Vec<Vec<BigInt>>, cols: usize) -> Vec<Vec<BigInt>> {
    let m = a.len();
    let mut prev = BigInt::one();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m {
            break;
        }
        let Some(piv) = (r..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, piv);
        let p = a[r][c].clone();
        for i in 0..m {
            if i == r {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..cols {
                let v = &p * &a[i][j] - &f * &a[r][j];
                debug_assert!((&v % &prev).is_zero(), "fraction-free step must divide exactly");
                a[i][j] = v / &prev;
            }
        }
        prev = p;
        pivots.push(c);
        r += 1;
    }
    // Every pivot entry now equals `prev`.
    let d = if pivots.is_empty() { BigInt::one() } else { prev };
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigInt::zero(); cols];
        v[free] = d.clone();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[row][free].clone();
        }
        let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if !g.is_zero() && !g.is_one() {
            for x in v.iter_mut() {
                *x /= &g;
            }
        }
        if v[free].is_negative() {
            for x in v.iter_mut() {
                *x = -x.clone();
            }
        }
        basis.push(v);
    }
    basis
}
