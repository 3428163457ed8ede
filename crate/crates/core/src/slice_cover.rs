//! Upper bounds on weighted slice rank from coordinate slice decompositions,
//! and the slice-size constructions behind the semistability bounds.
//!
//! A coordinate slice decomposition of a tensor with support `Φ` picks, for
//! each axis `i`, a set `R_i` of coordinate values such that every triple of
//! `Φ` has `s_i ∈ R_i` for at least one `i`. Grouping the entries by the axis
//! that covers them writes the tensor as a sum of `|R_1|` 1-slices, `|R_2|`
//! 2-slices and `|R_3|` 3-slices, so `Σ_i |R_i|^{1/ξ_i}` bounds `S_ξ` from
//! above. The search here is exact over coordinate covers only.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Weighting;
use crate::tensor::{Index, Support};

/// One support triple together with the axis (1-based) whose slice covers it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoverEntry {
    pub idx: Index,
    pub axis: usize,
}

/// A partition of a support into axis classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverAssignment {
    pub entries: Vec<CoverEntry>,
}

impl CoverAssignment {
    /// Coordinate values used on a 1-based axis.
    pub fn used_values(&self, axis: usize) -> BTreeSet<usize> {
        self.entries.iter().filter(|e| e.axis == axis).map(|e| e.idx[axis - 1]).collect()
    }

    /// Slice-decomposition size `(r1, r2, r3)`.
    pub fn sizes(&self) -> [usize; 3] {
        [1, 2, 3].map(|a| self.used_values(a).len())
    }

    /// Every triple sent to the same axis.
    pub fn single_axis(support: &Support, axis: usize) -> CoverAssignment {
        CoverAssignment { entries: support.triples().iter().map(|&idx| CoverEntry { idx, axis }).collect() }
    }
}

/// Result of the cover search: an upper bound on `S_ξ` and its witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverResult {
    pub value: f64,
    pub sizes: [usize; 3],
    pub witness: CoverAssignment,
}

/// Evaluates `Σ_i r_i^{1/ξ_i}` and compares sizes, exactly when every
/// active exponent `1/ξ_i` is an integer.
struct CostModel {
    exps: [f64; 3],
    active: [bool; 3],
    int_exps: Option<[u32; 3]>,
}

impl CostModel {
    fn new(xi: &Weighting) -> CostModel {
        let active = [0, 1, 2].map(|i| xi.get(i) > 0.0);
        let exps = [0, 1, 2].map(|i| if active[i] { 1.0 / xi.get(i) } else { f64::INFINITY });
        let int_exps = (0..3)
            .all(|i| !active[i] || ((exps[i] - exps[i].round()).abs() < 1e-12 && exps[i] < 64.0))
            .then(|| [0, 1, 2].map(|i| if active[i] { exps[i].round() as u32 } else { 0 }));
        CostModel { exps, active, int_exps }
    }

    fn value(&self, sizes: [usize; 3]) -> f64 {
        (0..3).filter(|&i| sizes[i] > 0).map(|i| (sizes[i] as f64).powf(self.exps[i])).sum()
    }

    fn exact(&self, sizes: [usize; 3]) -> Option<u128> {
        let e = self.int_exps?;
        let mut total: u128 = 0;
        for i in 0..3 {
            if sizes[i] > 0 {
                total = total.checked_add((sizes[i] as u128).checked_pow(e[i])?)?;
            }
        }
        Some(total)
    }

    fn compare(&self, a: [usize; 3], b: [usize; 3]) -> Ordering {
        if let (Some(x), Some(y)) = (self.exact(a), self.exact(b)) {
            return x.cmp(&y);
        }
        let (x, y) = (self.value(a), self.value(b));
        if (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0) {
            Ordering::Equal
        } else {
            x.partial_cmp(&y).unwrap_or(Ordering::Equal)
        }
    }

    /// Strictly better: smaller cost, ties broken lexicographically on sizes.
    fn better(&self, a: [usize; 3], b: [usize; 3]) -> bool {
        match self.compare(a, b) {
            Ordering::Less => true,
            Ordering::Equal => a < b,
            Ordering::Greater => false,
        }
    }
}

struct Search<'a> {
    triples: Vec<Index>,
    model: &'a CostModel,
    used: [Vec<bool>; 3],
    sizes: [usize; 3],
    best_sizes: [usize; 3],
    best_used: [Vec<bool>; 3],
}

impl Search<'_> {
    fn covered(&self, t: &Index) -> bool {
        (0..3).any(|i| self.used[i][t[i]])
    }

    fn run(&mut self, pos: usize) {
        let mut pos = pos;
        while pos < self.triples.len() && self.covered(&self.triples[pos]) {
            pos += 1;
        }
        if pos == self.triples.len() {
            if self.model.better(self.sizes, self.best_sizes) {
                self.best_sizes = self.sizes;
                self.best_used = self.used.clone();
            }
            return;
        }
        let t = self.triples[pos];
        for axis in 0..3 {
            if !self.model.active[axis] {
                continue;
            }
            let mut next = self.sizes;
            next[axis] += 1;
            // completions only grow every size, so neither cost nor the
            // lexicographic tie-break can recover once this fails
            if !self.model.better(next, self.best_sizes) {
                continue;
            }
            self.used[axis][t[axis]] = true;
            self.sizes = next;
            self.run(pos + 1);
            self.sizes[axis] -= 1;
            self.used[axis][t[axis]] = false;
        }
    }
}

/// Exact minimum of `Σ_i r_i^{1/ξ_i}` over coordinate covers of `support`.
///
/// This is an upper bound on the weighted slice rank `S_ξ`. Ties between
/// covers of equal value are broken by the lexicographically smallest size
/// triple, and the search order is fixed, so witnesses are reproducible.
pub fn weighted_cover_value(support: &Support, xi: &Weighting) -> Result<CoverResult> {
    let model = CostModel::new(xi);
    if !model.active.iter().any(|&a| a) {
        return Err(Error::Infeasible);
    }
    let dims = support.dims();
    if support.is_empty() {
        return Ok(CoverResult { value: 0.0, sizes: [0; 3], witness: CoverAssignment { entries: vec![] } });
    }

    // descending degree: how many triples share each coordinate
    let mut counts = [0, 1, 2].map(|a| vec![0usize; dims[a] + 1]);
    for t in support.triples() {
        for a in 0..3 {
            counts[a][t[a]] += 1;
        }
    }
    let mut triples = support.triples().to_vec();
    triples.sort_by_key(|t| (std::cmp::Reverse((0..3).map(|a| counts[a][t[a]]).sum::<usize>()), *t));

    let empty = [0, 1, 2].map(|a| vec![false; dims[a] + 1]);
    let mut best_sizes = [usize::MAX / 4; 3];
    let mut best_used = empty.clone();
    for axis in (0..3).filter(|&a| model.active[a]) {
        let mut sizes = [0; 3];
        let mut used = empty.clone();
        for t in support.triples() {
            if !used[axis][t[axis]] {
                used[axis][t[axis]] = true;
                sizes[axis] += 1;
            }
        }
        if best_sizes[0] == usize::MAX / 4 || model.better(sizes, best_sizes) {
            best_sizes = sizes;
            best_used = used;
        }
    }

    let mut search =
        Search { triples, model: &model, used: empty, sizes: [0; 3], best_sizes, best_used };
    search.run(0);

    let entries = support
        .triples()
        .iter()
        .map(|&idx| {
            let axis = (0..3).find(|&a| search.best_used[a][idx[a]]).expect("cover is complete");
            CoverEntry { idx, axis: axis + 1 }
        })
        .collect();
    let witness = CoverAssignment { entries };
    let value = verify_cover(support, &witness, xi)?;
    Ok(CoverResult { value, sizes: witness.sizes(), witness })
}

/// Recomputes the cover value from a witness, rejecting witnesses that miss
/// a support triple, mention a triple outside the support, or use a
/// forbidden axis.
pub fn verify_cover(support: &Support, cover: &CoverAssignment, xi: &Weighting) -> Result<f64> {
    let mut seen = BTreeSet::new();
    for e in &cover.entries {
        if !(1..=3).contains(&e.axis) {
            return Err(Error::InvalidWitness(format!("axis {} for {:?}", e.axis, e.idx)));
        }
        if xi.get(e.axis - 1) == 0.0 {
            return Err(Error::InvalidWitness(format!("{:?} uses forbidden axis {}", e.idx, e.axis)));
        }
        if !support.contains(&e.idx) {
            return Err(Error::InvalidWitness(format!("{:?} is not in the support", e.idx)));
        }
        if !seen.insert(e.idx) {
            return Err(Error::InvalidWitness(format!("{:?} assigned twice", e.idx)));
        }
    }
    if let Some(missing) = support.triples().iter().find(|t| !seen.contains(*t)) {
        return Err(Error::InvalidWitness(format!("{missing:?} is unassigned")));
    }
    Ok(CostModel::new(xi).value(cover.sizes()))
}

/// `min_i m_i^{1/ξ_i}` over axes with `ξ_i > 0`: the single-axis decomposition.
pub fn general_ub(dims: [usize; 3], xi: &Weighting) -> f64 {
    xi.active_axes().iter().map(|&i| (dims[i] as f64).powf(1.0 / xi.get(i))).fold(f64::INFINITY, f64::min)
}

/// `3^{−1/min_i ξ_i} · min_i m_i^{1/ξ_i}`, the lower bound on `S_ξ` that
/// holds for every semistable tensor of the given dims.
pub fn semistable_lower_bound(dims: [usize; 3], xi: &Weighting) -> Result<f64> {
    if xi.values().contains(&0.0) {
        return Err(Error::Precondition(format!("semistable bound needs every ξ_i > 0, got {xi}")));
    }
    let c = 3f64.powf(-1.0 / xi.min_active());
    Ok(c * general_ub(dims, xi))
}

/// Weights of a one-parameter subgroup on one factor `V_i = W_i ⊕ U_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisExponents {
    pub dim: usize,
    /// `dim W_i`
    pub split: usize,
    pub w_weight: i64,
    pub u_weight: i64,
}

/// A one-parameter subgroup of `SL(V1) × SL(V2) × SL(V3)` acting by
/// `t^{w_weight}` on `W_i` and `t^{u_weight}` on `U_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneParamSubgroup {
    pub axes: [AxisExponents; 3],
}

impl OneParamSubgroup {
    /// `r_i·w + (m_i − r_i)·u = 0` on every axis.
    pub fn has_unit_determinant(&self) -> bool {
        self.axes.iter().all(|a| a.split as i64 * a.w_weight + (a.dim - a.split) as i64 * a.u_weight == 0)
    }

    /// Weights of the nonzero blocks `X1 ⊗ X2 ⊗ X3` with `X_i ∈ {W_i, U_i}`,
    /// excluding `U1 ⊗ U2 ⊗ U3`. The flag is `true` where `X_i = W_i`.
    pub fn mixed_block_weights(&self) -> Vec<([bool; 3], i64)> {
        let mut out = Vec::new();
        for mask in 1u8..8 {
            let pick = [0, 1, 2].map(|i| mask & (1 << i) != 0);
            if (0..3).any(|i| pick[i] && self.axes[i].split == 0) {
                continue;
            }
            if (0..3).any(|i| !pick[i] && self.axes[i].split == self.axes[i].dim) {
                continue;
            }
            let w = (0..3).map(|i| if pick[i] { self.axes[i].w_weight } else { self.axes[i].u_weight }).sum();
            out.push((pick, w));
        }
        out
    }

    pub fn min_mixed_weight(&self) -> Option<i64> {
        self.mixed_block_weights().iter().map(|b| b.1).min()
    }
}

/// The destabilizing one-parameter subgroup for a slice decomposition of
/// size `(r1, r2, r3)` with every `r_i < m_i / 3`.
///
/// With `R = Π_{r_j > 0} r_j` and `q_i = m_i − r_i`, axis `i` gets weight
/// `q_i·R / r_i` on `W_i` and `−R` on `U_i`; axes with `r_i = 0` are left
/// alone. Since `q_i > 2 r_i` every block other than `U1 ⊗ U2 ⊗ U3` has
/// positive weight, so the tensor flows to zero.
pub fn destabilizing_1psg(dims: [usize; 3], sizes: [usize; 3]) -> Result<OneParamSubgroup> {
    for i in 0..3 {
        if dims[i] == 0 {
            return Err(Error::InvalidDims(dims));
        }
        if 3 * sizes[i] >= dims[i] {
            return Err(Error::Precondition(format!(
                "need r_i < m_i/3 on every axis, got r = {sizes:?} for dims {dims:?}"
            )));
        }
    }
    let r: i64 = sizes.iter().filter(|&&s| s > 0).map(|&s| s as i64).product();
    let axes = [0, 1, 2].map(|i| {
        if sizes[i] == 0 {
            AxisExponents { dim: dims[i], split: 0, w_weight: 0, u_weight: 0 }
        } else {
            let q = (dims[i] - sizes[i]) as i64;
            AxisExponents { dim: dims[i], split: sizes[i], w_weight: q * r / sizes[i] as i64, u_weight: -r }
        }
    });
    Ok(OneParamSubgroup { axes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::tensor::{build_diagonal, build_matmul, build_w_tensor};
    use proptest::prelude::*;

    fn xi(a: f64, b: f64, c: f64) -> Weighting {
        Weighting::new([a, b, c]).unwrap()
    }

    /// Brute force over all axis assignments of the support triples.
    fn exhaustive_cover(support: &Support, w: &Weighting) -> f64 {
        let n = support.len();
        let model = CostModel::new(w);
        let mut best = f64::INFINITY;
        for code in 0..3usize.pow(n as u32) {
            let mut c = code;
            let mut sets = [BTreeSet::new(), BTreeSet::new(), BTreeSet::new()];
            let mut ok = true;
            for t in support.triples() {
                let a = c % 3;
                c /= 3;
                if w.get(a) == 0.0 {
                    ok = false;
                    break;
                }
                sets[a].insert(t[a]);
            }
            if ok {
                best = best.min(model.value([sets[0].len(), sets[1].len(), sets[2].len()]));
            }
        }
        best
    }

    #[test]
    fn diagonal_cover() {
        for n in 1..=5 {
            let s = build_diagonal(n, Field::Rational).unwrap().support();
            assert_eq!(weighted_cover_value(&s, &Weighting::ones()).unwrap().value, n as f64);
        }
    }

    #[test]
    fn rectangular_matmul_cover() {
        let s = build_matmul(2, 2, 5, Field::Rational).unwrap().support();
        let w = xi(0.5, 1.0, 1.0);
        let res = weighted_cover_value(&s, &w).unwrap();
        assert!(res.value <= 9.0);
        assert_eq!(res.value, 9.0);
        assert!(res.value < general_ub(s.dims(), &w));
        assert_eq!(verify_cover(&s, &res.witness, &w).unwrap(), 9.0);
    }

    #[test]
    fn w_cover_matches_exhaustion() {
        let s = build_w_tensor(Field::Rational).support();
        assert_eq!(weighted_cover_value(&s, &Weighting::ones()).unwrap().value, 2.0);
        assert_eq!(exhaustive_cover(&s, &Weighting::ones()), 2.0);
        let all_one = CoverAssignment::single_axis(&s, 1);
        assert_eq!(all_one.sizes(), [2, 0, 0]);
        assert_eq!(verify_cover(&s, &all_one, &Weighting::ones()).unwrap(), 2.0);
    }

    #[test]
    fn tampered_witness_rejected() {
        let s = build_diagonal(3, Field::Rational).unwrap().support();
        let res = weighted_cover_value(&s, &Weighting::ones()).unwrap();
        assert_eq!(verify_cover(&s, &res.witness, &Weighting::ones()).unwrap(), 3.0);
        let mut dropped = res.witness.clone();
        dropped.entries.pop();
        assert!(verify_cover(&s, &dropped, &Weighting::ones()).is_err());
        let mut forbidden = res.witness.clone();
        forbidden.entries[0].axis = 3;
        assert!(verify_cover(&s, &forbidden, &xi(1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn empty_support() {
        let s = Support::new([2, 2, 2], []).unwrap();
        assert_eq!(weighted_cover_value(&s, &Weighting::ones()).unwrap().value, 0.0);
    }

    #[test]
    fn general_upper_bound() {
        assert_eq!(general_ub([4, 10, 10], &xi(0.5, 1.0, 1.0)), 10.0);
        assert_eq!(general_ub([5, 5, 5], &Weighting::ones()), 5.0);
        assert_eq!(general_ub([2, 3, 4], &xi(1.0, 0.0, 0.0)), 2.0);
    }

    #[test]
    fn semistable_bound_values() {
        assert!((semistable_lower_bound([6, 6, 6], &Weighting::ones()).unwrap() - 2.0).abs() < 1e-12);
        assert!((semistable_lower_bound([4, 4, 4], &xi(1.0, 1.0, 0.5)).unwrap() - 4.0 / 9.0).abs() < 1e-12);
        assert!((semistable_lower_bound([1, 1, 1], &Weighting::ones()).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!(semistable_lower_bound([3, 3, 3], &xi(1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn one_param_subgroup_examples() {
        let g = destabilizing_1psg([4, 4, 4], [1, 1, 1]).unwrap();
        assert!(g.axes.iter().all(|a| (a.w_weight, a.u_weight) == (3, -1)));
        assert!(g.has_unit_determinant());
        assert_eq!(g.mixed_block_weights().len(), 7);
        assert_eq!(g.min_mixed_weight(), Some(1));

        let g = destabilizing_1psg([7, 7, 7], [2, 2, 0]).unwrap();
        // (t^{q1 r2} ⊕ t^{-r1 r2}, t^{r1 q2} ⊕ t^{-r1 r2}, id)
        assert_eq!((g.axes[0].w_weight, g.axes[0].u_weight), (10, -4));
        assert_eq!((g.axes[1].w_weight, g.axes[1].u_weight), (10, -4));
        assert_eq!((g.axes[2].w_weight, g.axes[2].u_weight), (0, 0));
        assert!(g.min_mixed_weight().unwrap() > 0);

        assert!(destabilizing_1psg([4, 4, 4], [2, 1, 1]).is_err());
    }

    fn arb_support() -> impl Strategy<Value = Support> {
        (1usize..4, 1usize..4, 1usize..4).prop_flat_map(|(a, b, c)| {
            prop::collection::btree_set((1..=a, 1..=b, 1..=c), 1..(a * b * c).min(7) + 1)
                .prop_map(move |set| Support::new([a, b, c], set.into_iter().map(|(i, j, k)| [i, j, k])).unwrap())
        })
    }

    fn arb_xi() -> impl Strategy<Value = Weighting> {
        (0usize..3, 0u32..5, 0u32..5).prop_map(|(top, a, b)| {
            let mut v = [a as f64 / 4.0, b as f64 / 4.0, 0.0];
            v.rotate_right(top);
            v[top] = 1.0;
            Weighting::new(v).unwrap()
        })
    }

    proptest! {
        #[test]
        fn search_matches_brute_force(s in arb_support(), w in arb_xi()) {
            let res = weighted_cover_value(&s, &w).unwrap();
            let brute = exhaustive_cover(&s, &w);
            prop_assert!((res.value - brute).abs() <= 1e-9 * brute.max(1.0));
            prop_assert!(res.value <= general_ub(s.dims(), &w) * (1.0 + 1e-12));
            prop_assert_eq!(verify_cover(&s, &res.witness, &w).unwrap(), res.value);
        }

        #[test]
        fn monotone_in_xi(s in arb_support(), w in arb_xi(), bump in 0usize..3) {
            let mut up = w.values();
            up[bump] = (up[bump] + 0.25).min(1.0);
            let w2 = Weighting::new(up).unwrap();
            prop_assert!(w.le(&w2));
            let lo = weighted_cover_value(&s, &w).unwrap().value;
            let hi = weighted_cover_value(&s, &w2).unwrap().value;
            prop_assert!(lo >= hi - 1e-9);
        }

        #[test]
        fn subadditive_on_direct_sums(s in arb_support(), t in arb_support()) {
            let one = Weighting::ones();
            let sum = weighted_cover_value(&s.direct_sum(&t), &one).unwrap().value;
            let parts = weighted_cover_value(&s, &one).unwrap().value + weighted_cover_value(&t, &one).unwrap().value;
            prop_assert!(sum <= parts + 1e-9);
        }

        #[test]
        fn submultiplicative_on_aligned_axes(s in arb_support(), t in arb_support(), axis in 1usize..4) {
            let w = Weighting::axis(axis).unwrap();
            let k = weighted_cover_value(&s.kron(&t), &w).unwrap().value;
            let prod = weighted_cover_value(&s, &w).unwrap().value * weighted_cover_value(&t, &w).unwrap().value;
            prop_assert!(k <= prod + 1e-9);
        }

        #[test]
        fn destabilizer_is_valid(m in prop::array::uniform3(1usize..20), frac in prop::array::uniform3(0.0f64..1.0)) {
            let sizes = [0, 1, 2].map(|i| ((m[i] as f64 - 1.0) / 3.0 * frac[i]).floor() as usize);
            prop_assume!((0..3).all(|i| 3 * sizes[i] < m[i]));
            let g = destabilizing_1psg(m, sizes).unwrap();
            prop_assert!(g.has_unit_determinant());
            for (_, w) in g.mixed_block_weights() {
                prop_assert!(w > 0);
            }
        }
    }
}
