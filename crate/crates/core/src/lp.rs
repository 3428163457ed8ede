//! Dense two-phase tableau simplex with Bland's rule, generic over exact
//! rationals and `f64`.
//!
//! Solves `min cᵀx  s.t.  A x = b, x ≥ 0`. Infeasible problems come back
//! with a Farkas vector `z` satisfying `Aᵀz ≥ 0` and `bᵀz < 0`.

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub(crate) trait LpNum: Clone + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn lt(&self, o: &Self) -> bool;
    fn is_zero_ish(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
}

const F64_EPS: f64 = 1e-11;

impl LpNum for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_pos(&self) -> bool {
        *self > F64_EPS
    }
    fn is_neg(&self) -> bool {
        *self < -F64_EPS
    }
    fn lt(&self, o: &Self) -> bool {
        *self < *o - F64_EPS
    }
}

impl LpNum for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
}

#[derive(Debug, Clone)]
pub(crate) enum LpOutcome<T> {
    Optimal { x: Vec<T>, value: T },
    Infeasible { farkas: Vec<T> },
    Unbounded,
}

struct Tableau<T> {
    m: usize,
    n: usize,
    // m rows of n + m coefficients followed by the right-hand side
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
}

impl<T: LpNum> Tableau<T> {
    fn width(&self) -> usize {
        self.n + self.m
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width();
        let p = self.rows[r][c].clone();
        for j in 0..=w {
            self.rows[r][j] = self.rows[r][j].div(&p);
        }
        let pivot_row = self.rows[r].clone();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            if f.is_zero_ish() {
                self.rows[i][c] = T::zero();
                continue;
            }
            for j in 0..=w {
                self.rows[i][j] = self.rows[i][j].sub(&f.mul(&pivot_row[j]));
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs `d_j = c_j − c_Bᵀ B⁻¹ A_j` for all columns.
    fn reduced_costs(&self, cost: &[T]) -> Vec<T> {
        let w = self.width();
        (0..w)
            .map(|j| {
                let mut d = cost[j].clone();
                for i in 0..self.m {
                    d = d.sub(&cost[self.basis[i]].mul(&self.rows[i][j]));
                }
                d
            })
            .collect()
    }

    /// Bland's rule iterations over columns `< allowed`. Returns false on
    /// unboundedness.
    fn run(&mut self, cost: &[T], allowed: usize) -> bool {
        let w = self.width();
        loop {
            let d = self.reduced_costs(cost);
            let Some(enter) = (0..allowed).find(|&j| d[j].is_neg() && !self.basis.contains(&j)) else {
                return true;
            };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.m {
                let a = &self.rows[i][enter];
                if !a.is_pos() {
                    continue;
                }
                let ratio = self.rows[i][w].div(a);
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio.lt(&lr) || (!lr.lt(&ratio) && self.basis[i] < self.basis[li]) {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, enter);
        }
    }
}

pub(crate) fn solve<T: LpNum>(a: &[Vec<T>], b: &[T], c: &[T]) -> LpOutcome<T> {
    let m = a.len();
    let n = c.len();
    let mut flipped = vec![false; m];
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_neg();
        flipped[i] = flip;
        let mut row: Vec<T> = a[i].iter().map(|v| if flip { v.neg() } else { v.clone() }).collect();
        row.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
        row.push(if flip { b[i].neg() } else { b[i].clone() });
        rows.push(row);
    }
    let mut tab = Tableau { m, n, rows, basis: (n..n + m).collect() };

    let phase1: Vec<T> = (0..n + m).map(|j| if j < n { T::zero() } else { T::one() }).collect();
    tab.run(&phase1, n);
    let w = tab.width();
    let infeas = (0..m).fold(T::zero(), |acc, i| acc.add(&phase1[tab.basis[i]].mul(&tab.rows[i][w])));
    if infeas.is_pos() {
        let d = tab.reduced_costs(&phase1);
        let farkas = (0..m)
            .map(|i| {
                let y = T::one().sub(&d[n + i]);
                if flipped[i] {
                    y
                } else {
                    y.neg()
                }
            })
            .collect();
        return LpOutcome::Infeasible { farkas };
    }
    // Drive remaining artificials out of the basis where possible.
    for r in 0..m {
        if tab.basis[r] >= n {
            if let Some(c) = (0..n).find(|&j| !tab.rows[r][j].is_zero_ish()) {
                tab.pivot(r, c);
            }
        }
    }
    let mut cost: Vec<T> = c.to_vec();
    cost.extend((0..m).map(|_| T::zero()));
    if !tab.run(&cost, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![T::zero(); n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.rows[i][w].clone();
        }
    }
    let value = (0..n).fold(T::zero(), |acc, j| acc.add(&c[j].mul(&x[j])));
    LpOutcome::Optimal { x, value }
}
