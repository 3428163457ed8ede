//! Weight decomposition of Kronecker powers of a support.
//!
//! The `k`-th power splits by type `w = (w1, w2, w3)`, where `w_i` counts how
//! often each axis-`i` coordinate occurs. The component of type `w` has
//! dimension `C(k; w_i)` (a multinomial coefficient) on axis `i` and is
//! nonzero exactly when some `k` support triples, taken with multiplicity,
//! reproduce all three counts.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Weighting;
use crate::polytope::awsr_primal;
use crate::tensor::{Index, Support};

/// Default cap on the number of types or multisets examined.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// A type: one composition of `k` per axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypeTriple {
    pub k: usize,
    pub w: [Vec<usize>; 3],
}

/// Support triples with positive multiplicities summing to `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCertificate {
    pub entries: Vec<(Index, usize)>,
}

impl ComponentCertificate {
    /// The type this multiset realizes.
    pub fn type_of(&self, dims: [usize; 3]) -> TypeTriple {
        let mut w = [0, 1, 2].map(|i| vec![0; dims[i]]);
        let mut k = 0;
        for (t, c) in &self.entries {
            k += c;
            for i in 0..3 {
                w[i][t[i] - 1] += c;
            }
        }
        TypeTriple { k, w }
    }
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc.checked_mul(n - j)? / (j + 1);
    }
    Some(acc)
}

fn compositions_count(k: usize, m: usize) -> u128 {
    binomial((k + m - 1) as u128, (m - 1) as u128).unwrap_or(u128::MAX)
}

/// `Π_i C(k + m_i − 1, m_i − 1)`, saturating.
pub fn type_count(dims: [usize; 3], k: usize) -> u128 {
    dims.iter().fold(1u128, |acc, &m| acc.saturating_mul(compositions_count(k, m)))
}

/// Calls `f` on every composition of `k` into `m` nonnegative parts, in
/// lexicographic order.
pub fn for_each_composition(k: usize, m: usize, mut f: impl FnMut(&[usize])) {
    fn rec(k: usize, m: usize, prefix: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if m == 1 {
            prefix.push(k);
            f(prefix);
            prefix.pop();
            return;
        }
        for first in 0..=k {
            prefix.push(first);
            rec(k - first, m - 1, prefix, f);
            prefix.pop();
        }
    }
    if m > 0 {
        rec(k, m, &mut Vec::with_capacity(m), &mut f);
    }
}

/// Compositions of `k` into `m` nonnegative parts in lexicographic order.
pub fn compositions(k: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_composition(k, m, |c| out.push(c.to_vec()));
    out
}

/// All types of the `k`-th power in lexicographic order.
pub fn enumerate_types(dims: [usize; 3], k: usize) -> impl Iterator<Item = TypeTriple> {
    let c = dims.map(|m| compositions(k, m));
    let (c0, c1, c2) = (c[0].clone(), c[1].clone(), c[2].clone());
    c0.into_iter().flat_map(move |a| {
        let c2 = c2.clone();
        c1.clone().into_iter().flat_map(move |b| {
            let a = a.clone();
            c2.clone().into_iter().map(move |c| TypeTriple { k, w: [a.clone(), b.clone(), c] })
        })
    })
}

/// `k! / Π w_j!`.
pub fn multinomial(parts: &[usize]) -> BigUint {
    let mut acc = BigUint::one();
    let mut n = 0u64;
    for &p in parts {
        for j in 1..=p as u64 {
            n += 1;
            acc = acc * n / j;
        }
    }
    acc
}

/// Checks that a certificate uses support triples only and realizes `w`.
pub fn verify_component(support: &Support, w: &TypeTriple, cert: &ComponentCertificate) -> bool {
    cert.entries.iter().all(|(t, c)| *c > 0 && support.contains(t)) && cert.type_of(support.dims()) == *w
}

/// Depth-first search for multiplicities realizing `w`, with pruning on
/// coordinates no remaining triple can serve and memoized dead states.
pub fn component_nonzero(support: &Support, w: &TypeTriple) -> Result<Option<ComponentCertificate>> {
    let dims = support.dims();
    for i in 0..3 {
        if w.w[i].len() != dims[i] || w.w[i].iter().sum::<usize>() != w.k {
            return Err(Error::Precondition(format!("type {:?} does not match dims {dims:?}", w.w)));
        }
    }
    struct Dfs<'a> {
        triples: &'a [Index],
        rem: [Vec<usize>; 3],
        counts: Vec<usize>,
        dead: HashSet<(usize, [Vec<usize>; 3])>,
    }
    impl Dfs<'_> {
        fn servable(&self, from: usize) -> bool {
            for i in 0..3 {
                for (a, &r) in self.rem[i].iter().enumerate() {
                    if r > 0 && !self.triples[from..].iter().any(|t| t[i] == a + 1) {
                        return false;
                    }
                }
            }
            true
        }

        fn go(&mut self, pos: usize) -> bool {
            if self.rem[0].iter().all(|&r| r == 0) {
                return true;
            }
            if pos == self.triples.len() || !self.servable(pos) {
                return false;
            }
            let key = (pos, self.rem.clone());
            if self.dead.contains(&key) {
                return false;
            }
            let t = self.triples[pos];
            let most = (0..3).map(|i| self.rem[i][t[i] - 1]).min().unwrap_or(0);
            for c in (0..=most).rev() {
                for i in 0..3 {
                    self.rem[i][t[i] - 1] -= c;
                }
                self.counts[pos] = c;
                if self.go(pos + 1) {
                    return true;
                }
                for i in 0..3 {
                    self.rem[i][t[i] - 1] += c;
                }
            }
            self.counts[pos] = 0;
            self.dead.insert(key);
            false
        }
    }
    let mut dfs =
        Dfs { triples: support.triples(), rem: w.w.clone(), counts: vec![0; support.len()], dead: HashSet::new() };
    if !dfs.go(0) {
        return Ok(None);
    }
    let entries =
        support.triples().iter().zip(&dfs.counts).filter(|(_, &c)| c > 0).map(|(t, &c)| (*t, c)).collect();
    let cert = ComponentCertificate { entries };
    debug_assert!(verify_component(support, w, &cert));
    Ok(Some(cert))
}

/// `M_{ξ,k}` with its maximizing type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MxiResult {
    pub k: usize,
    pub log2_value: f64,
    /// `min_i C(k; w_i)^{1/ξ_i}` as a decimal integer when every active
    /// `1/ξ_i` is an integer
    pub exact: Option<String>,
    pub witness: TypeTriple,
    pub certificate: ComponentCertificate,
}

impl MxiResult {
    pub fn exact_value(&self) -> Option<BigUint> {
        self.exact.as_ref().and_then(|s| s.parse().ok())
    }
}

/// Scores types by `min_i C(k; w_i)^{1/ξ_i}`, exactly when possible.
struct Scorer {
    xi: Weighting,
    int_exps: Option<Vec<(usize, u32)>>,
}

#[derive(Clone, PartialEq, PartialOrd)]
enum Score {
    Exact(BigUint),
    Log(f64),
}

impl Scorer {
    fn new(xi: &Weighting) -> Scorer {
        let active = xi.active_axes();
        let int_exps = active
            .iter()
            .map(|&i| {
                let e = 1.0 / xi.get(i);
                ((e - e.round()).abs() < 1e-12 && e < 1e6).then_some((i, e.round() as u32))
            })
            .collect();
        Scorer { xi: *xi, int_exps }
    }

    fn score(&self, w: &[Vec<usize>; 3]) -> Score {
        match &self.int_exps {
            Some(exps) => Score::Exact(exps.iter().map(|&(i, e)| multinomial(&w[i]).pow(e)).min().expect("active axis")),
            None => Score::Log(
                self.xi
                    .active_axes()
                    .iter()
                    .map(|&i| big_log2(&multinomial(&w[i])) / self.xi.get(i))
                    .fold(f64::INFINITY, f64::min),
            ),
        }
    }

    fn log2(&self, s: &Score) -> f64 {
        match s {
            Score::Exact(v) => big_log2(v),
            Score::Log(v) => *v,
        }
    }
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

/// `M_{ξ,k} = max_{w : T^w ≠ 0} min_{i active} C(k; w_i)^{1/ξ_i}`.
///
/// Either every type is scored and checked for a nonzero component, or every
/// multiset of `k` support triples is expanded into its type, whichever is
/// fewer; `budget` caps that number. Ties keep the first maximizer in
/// enumeration order.
pub fn m_xi_k(support: &Support, xi: &Weighting, k: usize, budget: u128) -> Result<MxiResult> {
    if support.is_empty() {
        return Err(Error::Precondition("empty support has no nonzero component".into()));
    }
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    let dims = support.dims();
    let by_type = type_count(dims, k);
    let by_multiset = compositions_count(k, support.len());
    let needed = by_type.min(by_multiset);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget, hint: "lower k or raise the budget".into() });
    }
    let scorer = Scorer::new(xi);
    let mut best: Option<(Score, TypeTriple, ComponentCertificate)> = None;

    if by_multiset <= by_type {
        let triples = support.triples();
        for_each_composition(k, triples.len(), |counts| {
            let cert = ComponentCertificate {
                entries: triples.iter().zip(counts).filter(|(_, &c)| c > 0).map(|(t, &c)| (*t, c)).collect(),
            };
            let w = cert.type_of(dims);
            let s = scorer.score(&w.w);
            if best.as_ref().is_none_or(|b| s > b.0) {
                best = Some((s, w, cert));
            }
        });
    } else {
        for w in enumerate_types(dims, k) {
            let s = scorer.score(&w.w);
            if best.as_ref().is_some_and(|b| s <= b.0) {
                continue;
            }
            if let Some(cert) = component_nonzero(support, &w)? {
                best = Some((s, w, cert));
            }
        }
    }
    let (score, witness, certificate) = best.expect("a nonempty support has a nonzero component");
    let exact = match &score {
        Score::Exact(v) => Some(v.to_string()),
        Score::Log(_) => None,
    };
    Ok(MxiResult { k, log2_value: scorer.log2(&score), exact, witness, certificate })
}

/// One row of [`convergence_profile`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub k: usize,
    pub log2_m: f64,
    pub log2_m_per_k: f64,
    pub polytope_log2: f64,
}

/// `log2 M_{ξ,k}` and `log2 M_{ξ,k} / k` for each `k`, next to the polytope
/// value `log2 G_ξ` the normalized values approach on tight supports.
pub fn convergence_profile(
    support: &Support,
    xi: &Weighting,
    ks: &[usize],
    budget: u128,
    tol: f64,
) -> Result<Vec<ProfileRow>> {
    let polytope_log2 = awsr_primal(support, xi, tol)?.log2_value;
    ks.iter()
        .map(|&k| {
            let m = m_xi_k(support, xi, k, budget)?;
            Ok(ProfileRow { k, log2_m: m.log2_value, log2_m_per_k: m.log2_value / k as f64, polytope_log2 })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::tensor::{build_diagonal, build_matmul, build_w_tensor};
    use proptest::prelude::*;

    fn ty(k: usize, w: [&[usize]; 3]) -> TypeTriple {
        TypeTriple { k, w: w.map(|v| v.to_vec()) }
    }

    #[test]
    fn type_counts() {
        assert_eq!(enumerate_types([2, 2, 2], 1).count(), 8);
        assert_eq!(enumerate_types([2, 2, 2], 2).count(), 27);
        assert_eq!(enumerate_types([1, 1, 1], 7).count(), 1);
        assert_eq!(enumerate_types([2, 3, 4], 3).count() as u128, type_count([2, 3, 4], 3));
        let t: Vec<_> = enumerate_types([2, 1, 1], 1).collect();
        assert_eq!(t[0].w[0], vec![0, 1]);
        assert_eq!(t[1].w[0], vec![1, 0]);
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial(&[2, 1]), BigUint::from(3u32));
        assert_eq!(multinomial(&[20, 20]).to_string(), "137846528820");
        assert_eq!(multinomial(&[1, 1, 1, 1]), BigUint::from(24u32));
        assert_eq!(multinomial(&[]), BigUint::one());
    }

    #[test]
    fn component_examples() {
        let i2 = build_diagonal(2, Field::Rational).unwrap().support();
        let cert = component_nonzero(&i2, &ty(2, [&[1, 1], &[1, 1], &[1, 1]])).unwrap().unwrap();
        assert_eq!(cert.entries, vec![([1, 1, 1], 1), ([2, 2, 2], 1)]);
        assert!(component_nonzero(&i2, &ty(2, [&[2, 0], &[1, 1], &[1, 1]])).unwrap().is_none());

        let w = build_w_tensor(Field::Rational).support();
        let cert = component_nonzero(&w, &ty(3, [&[2, 1], &[2, 1], &[2, 1]])).unwrap().unwrap();
        assert_eq!(cert.entries.len(), 3);
        assert!(cert.entries.iter().all(|e| e.1 == 1));
        assert!(component_nonzero(&w, &ty(2, [&[2], &[1, 1], &[1, 1]])).is_err());
    }

    #[test]
    fn m_xi_k_examples() {
        let one = Weighting::ones();
        let i2 = build_diagonal(2, Field::Rational).unwrap().support();
        let m = m_xi_k(&i2, &one, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(m.exact_value(), Some(BigUint::from(2u32)));
        assert_eq!(m.witness.w, [vec![1, 1], vec![1, 1], vec![1, 1]]);
        assert_eq!(m_xi_k(&i2, &one, 4, DEFAULT_BUDGET).unwrap().exact_value(), Some(BigUint::from(6u32)));

        let w = build_w_tensor(Field::Rational).support();
        assert_eq!(m_xi_k(&w, &one, 3, DEFAULT_BUDGET).unwrap().exact_value(), Some(BigUint::from(3u32)));

        let point = Support::new([2, 2, 2], [[1, 2, 1]]).unwrap();
        for k in [1, 5, 9] {
            assert_eq!(m_xi_k(&point, &one, k, DEFAULT_BUDGET).unwrap().log2_value, 0.0);
        }
    }

    /// Both enumeration strategies agree.
    #[test]
    fn strategies_agree() {
        let s = build_matmul(1, 2, 2, Field::Rational).unwrap().support();
        let xi = Weighting::new([1.0, 0.5, 1.0]).unwrap();
        for k in 1..=4 {
            let fast = m_xi_k(&s, &xi, k, DEFAULT_BUDGET).unwrap();
            let mut best = 0u32.into();
            for w in enumerate_types(s.dims(), k) {
                if component_nonzero(&s, &w).unwrap().is_some() {
                    let v = [0, 2].iter().map(|&i| multinomial(&w.w[i])).chain([multinomial(&w.w[1]).pow(2)]).min().unwrap();
                    if v > best {
                        best = v;
                    }
                }
            }
            assert_eq!(fast.exact_value(), Some(best));
        }
    }

    #[test]
    fn profile_and_budget() {
        let i2 = build_diagonal(2, Field::Rational).unwrap().support();
        let rows = convergence_profile(&i2, &Weighting::ones(), &[40], DEFAULT_BUDGET, 1e-8).unwrap();
        // C(40,20)^(1/40)
        assert!((rows[0].log2_m_per_k.exp2() - 1.898_824_8).abs() < 1e-6);
        assert!((rows[0].polytope_log2 - 1.0).abs() < 1e-7);
        assert!(matches!(m_xi_k(&i2, &Weighting::ones(), 40, 10), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn non_integer_exponents_use_logs() {
        let w = build_w_tensor(Field::Rational).support();
        let m = m_xi_k(&w, &Weighting::new([1.0, 0.7, 1.0]).unwrap(), 3, DEFAULT_BUDGET).unwrap();
        assert!(m.exact.is_none());
        assert!((m.log2_value - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn doubling_on_w() {
        let w = build_w_tensor(Field::Rational).support();
        let one = Weighting::ones();
        for k in [1usize, 2, 4, 8] {
            let a = m_xi_k(&w, &one, k, DEFAULT_BUDGET).unwrap().exact_value().unwrap();
            let b = m_xi_k(&w, &one, 2 * k, DEFAULT_BUDGET).unwrap().exact_value().unwrap();
            assert!(b >= &a * &a);
        }
    }

    fn arb_support() -> impl Strategy<Value = Support> {
        (1usize..3, 1usize..3, 1usize..4).prop_flat_map(|(a, b, c)| {
            prop::collection::btree_set((1..=a, 1..=b, 1..=c), 1..=(a * b * c).min(4))
                .prop_map(move |set| Support::new([a, b, c], set.into_iter().map(|(i, j, k)| [i, j, k])).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn supermultiplicative(s in arb_support(), k in 1usize..6, l in 1usize..6) {
            let one = Weighting::ones();
            let m = |k| m_xi_k(&s, &one, k, DEFAULT_BUDGET).unwrap().exact_value().unwrap();
            prop_assert!(m(k + l) >= m(k) * m(l));
        }

        #[test]
        fn below_polytope_value(s in arb_support(), k in 1usize..7) {
            let xi = Weighting::new([1.0, 0.5, 1.0]).unwrap();
            let g = awsr_primal(&s, &xi, 1e-8).unwrap();
            let m = m_xi_k(&s, &xi, k, DEFAULT_BUDGET).unwrap();
            prop_assert!(m.log2_value / k as f64 <= g.log2_value + 1e-7);
        }

        #[test]
        fn certificates_realize_types(s in arb_support(), k in 1usize..5) {
            for w in enumerate_types(s.dims(), k) {
                if let Some(cert) = component_nonzero(&s, &w).unwrap() {
                    prop_assert!(verify_component(&s, &w, &cert));
                }
            }
        }
    }
}
