//! Finite subsets of a group and the product-type operations on them.
//!
//! A [`GroupSet`] keeps its members as a sorted code list plus a membership
//! index: a dense bitset over all of `G` when `|G| ≤ 2^26`, a hash set
//! otherwise. Sets are immutable once built.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{ElementCode, GroupDesc, GroupElement, GroupError, HElement};

/// Groups up to this order use a dense bitset for membership.
pub const DENSE_LIMIT: u64 = 1 << 26;

/// Budget for triple loops over a set.
pub const TRIPLE_LOOP_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("sets live in different groups: {0} vs {1}")]
    GroupMismatch(GroupDesc, GroupDesc),
    #[error("sign vectors must be nonempty with entries ±1")]
    InvalidSigns,
    #[error("brick does not fit {group}: {reason}")]
    BadBrick { group: GroupDesc, reason: String },
    #[error("exponent {0} must lie strictly between 0 and 1")]
    AlphaOutOfRange(Ratio<u64>),
    #[error("interval {{0..{top}}} doubled wraps around mod {p}")]
    WrapAround { top: u64, p: u64 },
    #[error("set of size {size} is too large for a cubic enumeration")]
    TooLarge { size: u64 },
    #[error("invalid set literal: {0}")]
    Literal(String),
}

#[derive(Debug, Clone)]
enum Membership {
    Dense(FixedBitSet),
    Sparse(HashSet<u64>),
}

/// A finite subset of one group.
#[derive(Debug, Clone)]
pub struct GroupSet {
    group: GroupDesc,
    codes: Vec<ElementCode>,
    members: Membership,
}

impl PartialEq for GroupSet {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.codes == other.codes
    }
}

impl Eq for GroupSet {}

/// Accumulates codes for a set under construction.
pub(crate) struct SetBuilder {
    group: GroupDesc,
    members: Membership,
    sparse_codes: Vec<u64>,
}

impl SetBuilder {
    pub(crate) fn new(group: GroupDesc) -> Self {
        let members = if group.order() <= DENSE_LIMIT {
            Membership::Dense(FixedBitSet::with_capacity(group.order() as usize))
        } else {
            Membership::Sparse(HashSet::new())
        };
        Self {
            group,
            members,
            sparse_codes: Vec::new(),
        }
    }

    #[inline]
    pub(crate) fn insert(&mut self, code: ElementCode) {
        match &mut self.members {
            Membership::Dense(bits) => bits.insert(code.0 as usize),
            Membership::Sparse(set) => {
                if set.insert(code.0) {
                    self.sparse_codes.push(code.0);
                }
            }
        }
    }

    pub(crate) fn finish(self) -> GroupSet {
        let codes = match &self.members {
            Membership::Dense(bits) => bits.ones().map(|i| ElementCode(i as u64)).collect(),
            Membership::Sparse(_) => {
                let mut v = self.sparse_codes;
                v.sort_unstable();
                v.into_iter().map(ElementCode).collect()
            }
        };
        GroupSet {
            group: self.group,
            codes,
            members: self.members,
        }
    }
}

impl GroupSet {
    /// Builds a set from codes, rejecting codes outside the group.
    /// Duplicates are merged.
    pub fn new(group: GroupDesc, codes: impl IntoIterator<Item = ElementCode>) -> Result<Self, SetError> {
        group.validate()?;
        let mut b = SetBuilder::new(group);
        for c in codes {
            group.check_code(c)?;
            b.insert(c);
        }
        Ok(b.finish())
    }

    pub(crate) fn from_codes_unchecked(group: GroupDesc, codes: impl IntoIterator<Item = ElementCode>) -> Self {
        let mut b = SetBuilder::new(group);
        codes.into_iter().for_each(|c| b.insert(c));
        b.finish()
    }

    pub fn from_elements<'a>(
        group: GroupDesc,
        elements: impl IntoIterator<Item = &'a GroupElement>,
    ) -> Result<Self, SetError> {
        let codes = elements
            .into_iter()
            .map(|g| group.encode(g))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(group, codes)
    }

    pub fn empty(group: GroupDesc) -> Self {
        Self::from_codes_unchecked(group, std::iter::empty())
    }

    pub fn singleton(group: GroupDesc, g: ElementCode) -> Result<Self, SetError> {
        Self::new(group, [g])
    }

    pub fn identity(group: GroupDesc) -> Self {
        Self::from_codes_unchecked(group, [group.identity()])
    }

    pub fn full(group: GroupDesc) -> Self {
        Self::from_codes_unchecked(group, group.codes())
    }

    /// The center `[0,0,F_p]` of H_n, or `U = (1,F_p)` in Aff.
    pub fn center_line(group: GroupDesc) -> Result<Self, SetError> {
        match group {
            GroupDesc::Heisenberg { p, .. } | GroupDesc::Affine { p } => {
                Ok(Self::from_codes_unchecked(group, (0..p).map(ElementCode)))
            }
            GroupDesc::Cyclic { .. } => Err(GroupError::Unsupported(group).into()),
        }
    }

    #[inline]
    pub fn group(&self) -> GroupDesc {
        self.group
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    #[inline]
    pub fn contains(&self, code: ElementCode) -> bool {
        match &self.members {
            Membership::Dense(bits) => bits.contains(code.0 as usize),
            Membership::Sparse(set) => set.contains(&code.0),
        }
    }

    /// Members in ascending code order.
    pub fn codes(&self) -> &[ElementCode] {
        &self.codes
    }

    pub fn iter(&self) -> impl Iterator<Item = ElementCode> + '_ {
        self.codes.iter().copied()
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        self.codes
            .iter()
            .map(|&c| self.group.decode(c).expect("members are valid codes"))
    }

    pub fn is_subset(&self, other: &GroupSet) -> bool {
        self.group == other.group && self.iter().all(|c| other.contains(c))
    }

    pub fn intersection(&self, other: &GroupSet) -> Result<GroupSet, SetError> {
        same_group(self, other)?;
        Ok(Self::from_codes_unchecked(
            self.group,
            self.iter().filter(|&c| other.contains(c)),
        ))
    }

    /// `A⁻¹`.
    pub fn inverse(&self) -> GroupSet {
        let g = self.group;
        Self::from_codes_unchecked(g, self.iter().map(|c| g.inv(c)))
    }

    pub fn to_literal(&self) -> SetLiteral {
        SetLiteral {
            group: self.group,
            codes: self.codes.clone(),
        }
    }

    pub fn from_literal(lit: &SetLiteral) -> Result<Self, SetError> {
        Self::new(lit.group, lit.codes.iter().copied())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_literal()).expect("set literals serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, SetError> {
        let lit: SetLiteral = serde_json::from_str(s).map_err(|e| SetError::Literal(e.to_string()))?;
        Self::from_literal(&lit)
    }
}

/// JSON form of a set: `{"group":"H","p":5,"n":1,"codes":[...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetLiteral {
    #[serde(flatten)]
    pub group: GroupDesc,
    pub codes: Vec<ElementCode>,
}

fn same_group(a: &GroupSet, b: &GroupSet) -> Result<(), SetError> {
    if a.group != b.group {
        return Err(SetError::GroupMismatch(a.group, b.group));
    }
    Ok(())
}

/// `AB = {ab : a ∈ A, b ∈ B}`.
pub fn product_set(a: &GroupSet, b: &GroupSet) -> Result<GroupSet, SetError> {
    same_group(a, b)?;
    let g = a.group;
    let mut out = SetBuilder::new(g);
    for &x in &a.codes {
        for &y in &b.codes {
            out.insert(g.mul(x, y));
        }
    }
    Ok(out.finish())
}

/// `A^{ε₁} A^{ε₂} ⋯ A^{ε_m}`.
pub fn signed_product(a: &GroupSet, signs: &[i8]) -> Result<GroupSet, SetError> {
    if signs.is_empty() || signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(SetError::InvalidSigns);
    }
    let inv = a.inverse();
    let factor = |s: i8| if s > 0 { a } else { &inv };
    let mut acc = factor(signs[0]).clone();
    for &s in &signs[1..] {
        acc = product_set(&acc, factor(s))?;
    }
    Ok(acc)
}

/// `A^k`.
pub fn power_set(a: &GroupSet, k: usize) -> Result<GroupSet, SetError> {
    signed_product(a, &vec![1; k.max(1)])
}

/// `[A,B] = {aba⁻¹b⁻¹ : a ∈ A, b ∈ B}`.
pub fn commutator_set(a: &GroupSet, b: &GroupSet) -> Result<GroupSet, SetError> {
    same_group(a, b)?;
    let g = a.group;
    let a_inv: Vec<ElementCode> = a.iter().map(|c| g.inv(c)).collect();
    let b_inv: Vec<ElementCode> = b.iter().map(|c| g.inv(c)).collect();
    let mut out = SetBuilder::new(g);
    for (&x, &xi) in a.codes.iter().zip(&a_inv) {
        for (&y, &yi) in b.codes.iter().zip(&b_inv) {
            out.insert(g.mul(g.mul(x, y), g.mul(xi, yi)));
        }
    }
    Ok(out.finish())
}

/// Factors of a Heisenberg brick `{[x,y,z] : x ∈ X₁×⋯×X_n, y ∈ Y₁×⋯×Y_n, z ∈ Z}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrickSpec {
    pub x: Vec<Vec<u64>>,
    pub y: Vec<Vec<u64>>,
    pub z: Vec<u64>,
}

impl BrickSpec {
    /// The one-dimensional brick `X × Y × Z`.
    pub fn planar(x: Vec<u64>, y: Vec<u64>, z: Vec<u64>) -> Self {
        Self {
            x: vec![x],
            y: vec![y],
            z,
        }
    }

    /// Every factor equal to F_p.
    pub fn full(p: u64, n: usize) -> Self {
        let all: Vec<u64> = (0..p).collect();
        Self {
            x: vec![all.clone(); n],
            y: vec![all.clone(); n],
            z: all,
        }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// `∏|X_i| · ∏|Y_i|`, after removing duplicate entries.
    pub fn base_size(&self) -> u64 {
        self.x.iter().chain(&self.y).map(|f| distinct(f).len() as u64).product()
    }

    pub fn size(&self) -> u64 {
        self.base_size() * distinct(&self.z).len() as u64
    }
}

fn distinct(v: &[u64]) -> Vec<u64> {
    let mut d = v.to_vec();
    d.sort_unstable();
    d.dedup();
    d
}

/// The Cartesian brick in H_n(F_p), `n = spec.n()`.
pub fn brick(p: u64, spec: &BrickSpec) -> Result<GroupSet, SetError> {
    let n = spec.n();
    let group = GroupDesc::heisenberg(p, n)?;
    let bad = |reason: String| SetError::BadBrick { group, reason };
    if spec.y.len() != n {
        return Err(bad(format!("{} x-factors but {} y-factors", n, spec.y.len())));
    }
    if let Some(&v) = spec.x.iter().chain(&spec.y).flatten().chain(&spec.z).find(|&&v| v >= p) {
        return Err(bad(format!("coordinate {v} outside F_{p}")));
    }
    let xs: Vec<Vec<u64>> = spec.x.iter().map(|f| distinct(f)).collect();
    let ys: Vec<Vec<u64>> = spec.y.iter().map(|f| distinct(f)).collect();
    let zs = distinct(&spec.z);
    let mut out = SetBuilder::new(group);
    let mut x = vec![0u64; n];
    let mut y = vec![0u64; n];
    for_each_tuple(&xs, &mut x, 0, &mut |x| {
        for_each_tuple(&ys, &mut y, 0, &mut |y| {
            for &z in &zs {
                let h = HElement {
                    x: x.to_vec(),
                    y: y.to_vec(),
                    z,
                };
                out.insert(group.encode(&GroupElement::H(h)).expect("coordinates checked"));
            }
        });
    });
    Ok(out.finish())
}

fn for_each_tuple(factors: &[Vec<u64>], buf: &mut [u64], depth: usize, f: &mut dyn FnMut(&[u64])) {
    if depth == factors.len() {
        f(buf);
        return;
    }
    for &v in &factors[depth] {
        buf[depth] = v;
        for_each_tuple(factors, buf, depth + 1, f);
    }
}

/// `(|S ∩ line|, line ⊆ S)` for the center line of H_n or `(1,F_p)` in Aff.
pub fn center_coverage(s: &GroupSet) -> Result<(u64, bool), SetError> {
    let p = match s.group {
        GroupDesc::Heisenberg { p, .. } | GroupDesc::Affine { p } => p,
        g @ GroupDesc::Cyclic { .. } => return Err(GroupError::Unsupported(g).into()),
    };
    let count = (0..p).filter(|&z| s.contains(ElementCode(z))).count() as u64;
    Ok((count, count == p))
}

/// Number of cosets `[x, y, F_p]` entirely contained in `S ⊆ H_n`.
pub fn coset_coverage(s: &GroupSet) -> Result<u64, SetError> {
    let p = match s.group {
        GroupDesc::Heisenberg { p, .. } => p,
        g => return Err(GroupError::Unsupported(g).into()),
    };
    // Codes are sorted and a coset is a run of p consecutive codes.
    let mut full = 0;
    let mut run_fiber = u64::MAX;
    let mut run_len = 0;
    for c in s.iter() {
        let fiber = c.0 / p;
        if fiber != run_fiber {
            run_fiber = fiber;
            run_len = 0;
        }
        run_len += 1;
        if run_len == p {
            full += 1;
        }
    }
    Ok(full)
}

/// `⌈p^α⌉` for rational `α`, computed exactly.
pub fn ceil_rational_power(p: u64, alpha: Ratio<u64>) -> Option<u64> {
    let (num, den) = (*alpha.numer() as u32, *alpha.denom() as u32);
    let target = (p as u128).checked_pow(num)?;
    // smallest m with m^den ≥ p^num
    let (mut lo, mut hi) = (1u64, p.max(1));
    while (hi as u128).checked_pow(den).map_or(false, |v| v < target) {
        hi = hi.checked_mul(2)?;
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match (mid as u128).checked_pow(den) {
            Some(v) if v < target => lo = mid + 1,
            _ => hi = mid,
        }
    }
    Some(lo)
}

/// `A_* = {[x,y,z] : x ∈ {0,…,⌈p^α⌉}, y, z ∈ F_p} ⊆ H_1(F_p)`.
///
/// The interval is a set of integers, so the construction is refused when
/// `x + x'` can wrap modulo p.
pub fn freiman_base_set(p: u64, alpha: Ratio<u64>) -> Result<GroupSet, SetError> {
    let group = GroupDesc::heisenberg(p, 1)?;
    if *alpha.numer() == 0 || alpha >= Ratio::from_integer(1) {
        return Err(SetError::AlphaOutOfRange(alpha));
    }
    let top = ceil_rational_power(p, alpha).ok_or(SetError::AlphaOutOfRange(alpha))?;
    if 2 * top >= p {
        return Err(SetError::WrapAround { top, p });
    }
    let x: Vec<u64> = (0..=top).collect();
    let all: Vec<u64> = (0..p).collect();
    let set = brick(p, &BrickSpec::planar(x, all.clone(), all))?;
    debug_assert_eq!(set.group(), group);
    Ok(set)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// `[0, F_p^n, P]` with P an initial interval.
    HeisenbergProgression,
    /// The dilation subgroup `(F_p^*, 0)`.
    AffineDiagonal,
}

/// Length of the longest interval `P = {0,…,L−1}` whose signed `len`-fold
/// sums stay inside `p − 1` residues.
pub fn witness_progression_len(p: u64, len: usize) -> u64 {
    (p - 2) / len as u64 + 1
}

/// A large set whose signed products of length `len` miss part of the
/// center line.
pub fn extremal_witness(kind: WitnessKind, p: u64, n: usize, len: usize) -> Result<GroupSet, SetError> {
    if len == 0 {
        return Err(SetError::InvalidSigns);
    }
    match kind {
        WitnessKind::HeisenbergProgression => {
            GroupDesc::heisenberg(p, n)?;
            let l = witness_progression_len(p, len);
            let all: Vec<u64> = (0..p).collect();
            let spec = BrickSpec {
                x: vec![vec![0]; n],
                y: vec![all; n],
                z: (0..l).collect(),
            };
            brick(p, &spec)
        }
        WitnessKind::AffineDiagonal => {
            let group = GroupDesc::affine(p)?;
            // (a, 0) ↦ p·(a − 1)
            Ok(GroupSet::from_codes_unchecked(
                group,
                (0..p - 1).map(|i| ElementCode(p * i)),
            ))
        }
    }
}

/// Whether `[[a,b],c] = e` for all `a, b, c ∈ X`.
pub fn triple_commutator_trivial(x: &GroupSet) -> Result<bool, SetError> {
    let size = x.len() as u64;
    if size.saturating_pow(3) > TRIPLE_LOOP_LIMIT {
        return Err(SetError::TooLarge { size });
    }
    let g = x.group;
    let e = g.identity();
    // [[a,b],c] depends on (a,b) only through [a,b].
    let inner = commutator_set(x, x)?;
    let trivial = inner.iter().all(|ab| x.iter().all(|c| g.commutator(ab, c) == e));
    Ok(trivial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{AffElement, Affine, Heisenberg};

    fn h1(p: u64) -> GroupDesc {
        GroupDesc::heisenberg(p, 1).unwrap()
    }

    fn hset(h: &Heisenberg, elems: &[(u64, u64, u64)]) -> GroupSet {
        let codes = elems
            .iter()
            .map(|&(x, y, z)| h.encode(&h.element(vec![x], vec![y], z).unwrap()).unwrap());
        GroupSet::new(h.desc(), codes).unwrap()
    }

    fn aset(a: &Affine, elems: &[(u64, u64)]) -> GroupSet {
        let codes = elems
            .iter()
            .map(|&(x, y)| a.encode(&AffElement { a: x, b: y }).unwrap());
        GroupSet::new(a.desc(), codes).unwrap()
    }

    #[test]
    fn product_set_examples() {
        let g = h1(5);
        let b = GroupSet::new(g, [ElementCode(3), ElementCode(40), ElementCode(77)]).unwrap();
        assert_eq!(product_set(&GroupSet::identity(g), &b).unwrap(), b);
        let full3 = GroupSet::full(h1(3));
        assert_eq!(product_set(&full3, &full3).unwrap().len(), 27);

        let a5 = Affine::new(5).unwrap();
        let a = aset(&a5, &[(1, 1), (2, 0)]);
        let aa = product_set(&a, &a).unwrap();
        assert_eq!(aa, aset(&a5, &[(1, 2), (2, 1), (2, 2), (4, 0)]));
        assert!(matches!(product_set(&a, &full3), Err(SetError::GroupMismatch(_, _))));
        assert!(product_set(&GroupSet::empty(g), &b).unwrap().is_empty());
    }

    #[test]
    fn signed_product_examples() {
        let g = h1(7);
        let e = GroupSet::identity(g);
        assert_eq!(signed_product(&e, &[1, -1, -1, 1]).unwrap(), e);
        let h = Heisenberg::new(3, 1).unwrap();
        let a = hset(&h, &[(1, 0, 0), (0, 1, 0)]);
        assert_eq!(signed_product(&a, &[1]).unwrap(), a);
        // a₁a₂⁻¹ over the four pairs: e twice, [1,0,0][0,1,0]⁻¹ = [1,2,2],
        // [0,1,0][1,0,0]⁻¹ = [2,1,0].
        let q = signed_product(&a, &[1, -1]).unwrap();
        assert_eq!(q, hset(&h, &[(0, 0, 0), (1, 2, 2), (2, 1, 0)]));
        assert_eq!(signed_product(&a, &[]), Err(SetError::InvalidSigns));
        assert_eq!(signed_product(&a, &[2]), Err(SetError::InvalidSigns));
        assert_eq!(signed_product(&a, &[1, 1]).unwrap(), product_set(&a, &a).unwrap());
    }

    #[test]
    fn commutator_set_examples() {
        let g = h1(3);
        let full = GroupSet::full(g);
        assert_eq!(
            commutator_set(&full, &GroupSet::identity(g)).unwrap(),
            GroupSet::identity(g)
        );
        let c = commutator_set(&full, &full).unwrap();
        assert_eq!(c, GroupSet::center_line(g).unwrap());
        assert_eq!(center_coverage(&c).unwrap(), (3, true));
        let a5 = GroupDesc::affine(5).unwrap();
        let u = GroupSet::center_line(a5).unwrap();
        assert_eq!(commutator_set(&u, &u).unwrap(), GroupSet::identity(a5));
    }

    #[test]
    fn brick_examples() {
        let full = brick(3, &BrickSpec::full(3, 1)).unwrap();
        assert_eq!(full, GroupSet::full(h1(3)));
        let a = vec![1, 4, 6];
        let flat = brick(7, &BrickSpec::planar(a.clone(), a, vec![0])).unwrap();
        assert_eq!(flat.len(), 9);
        let h = Heisenberg::new(5, 1).unwrap();
        let b = brick(5, &BrickSpec::planar(vec![0, 1], vec![2], vec![0, 3])).unwrap();
        assert_eq!(b, hset(&h, &[(0, 2, 0), (0, 2, 3), (1, 2, 0), (1, 2, 3)]));
        let spec = BrickSpec {
            x: vec![vec![0, 1], vec![2]],
            y: vec![vec![0, 1, 2], vec![1, 1]],
            z: vec![4],
        };
        assert_eq!(brick(5, &spec).unwrap().len() as u64, spec.size());
        assert!(matches!(
            brick(5, &BrickSpec::planar(vec![5], vec![0], vec![0])),
            Err(SetError::BadBrick { .. })
        ));
    }

    #[test]
    fn coverage_examples() {
        for p in [3u64, 5] {
            let full = GroupSet::full(h1(p));
            assert_eq!(center_coverage(&full).unwrap(), (p, true));
            assert_eq!(coset_coverage(&full).unwrap(), p * p);
            assert_eq!(center_coverage(&GroupSet::identity(h1(p))).unwrap(), (1, false));
            assert_eq!(coset_coverage(&GroupSet::center_line(h1(p)).unwrap()).unwrap(), 1);
        }
        let s = brick(3, &BrickSpec::planar(vec![0], vec![0, 1], vec![0, 1, 2])).unwrap();
        assert_eq!(coset_coverage(&s).unwrap(), 2);
        let aff = GroupSet::full(GroupDesc::affine(5).unwrap());
        assert_eq!(center_coverage(&aff).unwrap(), (5, true));
        assert!(coset_coverage(&aff).is_err());
    }

    #[test]
    fn rational_ceiling() {
        assert_eq!(ceil_rational_power(5, Ratio::new(1, 2)), Some(3));
        assert_eq!(ceil_rational_power(7, Ratio::new(1, 2)), Some(3));
        assert_eq!(ceil_rational_power(9, Ratio::new(1, 2)), Some(3));
        assert_eq!(ceil_rational_power(5, Ratio::new(2, 5)), Some(2));
        assert_eq!(ceil_rational_power(11, Ratio::new(2, 5)), Some(3));
        assert_eq!(ceil_rational_power(1009, Ratio::new(2, 3)), Some(101));
    }

    #[test]
    fn freiman_base_set_sizes() {
        let a7 = freiman_base_set(7, Ratio::new(1, 2)).unwrap();
        assert_eq!(a7.len(), 196);
        let aa = product_set(&a7, &a7).unwrap();
        assert_eq!(aa.len(), 2 * 196 - 49);
        // ⌈√5⌉ = 3 and 3 + 3 ≥ 5: the doubled interval wraps.
        assert_eq!(
            freiman_base_set(5, Ratio::new(1, 2)),
            Err(SetError::WrapAround { top: 3, p: 5 })
        );
        let a5 = freiman_base_set(5, Ratio::new(2, 5)).unwrap();
        assert_eq!(a5.len(), 75);
        assert_eq!(product_set(&a5, &a5).unwrap().len(), 2 * 75 - 25);
        assert!(matches!(
            freiman_base_set(7, Ratio::new(1, 1)),
            Err(SetError::AlphaOutOfRange(_))
        ));
        assert!(matches!(
            freiman_base_set(7, Ratio::new(0, 1)),
            Err(SetError::AlphaOutOfRange(_))
        ));
    }

    #[test]
    fn witnesses_miss_the_center() {
        let w = extremal_witness(WitnessKind::HeisenbergProgression, 7, 1, 2).unwrap();
        assert_eq!(w.len(), 7 * 3);
        let ww = product_set(&w, &w).unwrap();
        let line: Vec<u64> = (0..7).filter(|&z| ww.contains(ElementCode(z))).collect();
        assert_eq!(line, vec![0, 1, 2, 3, 4]);

        let t = extremal_witness(WitnessKind::AffineDiagonal, 5, 1, 4).unwrap();
        assert_eq!(t.len(), 4);
        let tt = signed_product(&t, &[1, -1, 1, -1]).unwrap();
        assert_eq!(tt, t);
        assert_eq!(center_coverage(&tt).unwrap(), (1, false));

        let w2 = extremal_witness(WitnessKind::HeisenbergProgression, 3, 2, 2).unwrap();
        assert_eq!(w2.len(), 9);
        let ww2 = product_set(&w2, &w2).unwrap();
        assert_eq!(center_coverage(&ww2).unwrap(), (1, false));
        for len in 2..6 {
            let w = extremal_witness(WitnessKind::HeisenbergProgression, 11, 1, len).unwrap();
            let signs: Vec<i8> = (0..len).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
            assert!(!center_coverage(&signed_product(&w, &signs).unwrap()).unwrap().1);
        }
    }

    #[test]
    fn triple_commutators() {
        assert!(triple_commutator_trivial(&GroupSet::full(h1(3))).unwrap());
        assert!(triple_commutator_trivial(&GroupSet::full(GroupDesc::heisenberg(3, 2).unwrap())).unwrap());
        assert!(triple_commutator_trivial(&GroupSet::identity(GroupDesc::affine(5).unwrap())).unwrap());
        assert!(!triple_commutator_trivial(&GroupSet::full(GroupDesc::affine(5).unwrap())).unwrap());
        assert!(matches!(
            triple_commutator_trivial(&GroupSet::full(GroupDesc::heisenberg(5, 2).unwrap())),
            Err(SetError::TooLarge { .. })
        ));
    }

    #[test]
    fn json_literals() {
        let h = Heisenberg::new(5, 1).unwrap();
        let s = hset(&h, &[(0, 0, 1), (1, 2, 3)]);
        let json = s.to_json();
        assert_eq!(json, r#"{"group":"H","p":5,"n":1,"codes":[1,38]}"#);
        assert_eq!(GroupSet::from_json(&json).unwrap(), s);
        let aff = GroupSet::from_json(r#"{"group":"Aff","p":7,"codes":[0,9]}"#).unwrap();
        assert_eq!(aff.len(), 2);
        assert!(GroupSet::from_json(r#"{"group":"H","p":5,"n":1,"codes":[125]}"#).is_err());
        assert!(GroupSet::from_json(r#"{"group":"H","p":6,"n":1,"codes":[]}"#).is_err());
    }

    #[test]
    fn sparse_membership_for_huge_groups() {
        let g = GroupDesc::heisenberg(11, 4).unwrap();
        assert!(g.order() > DENSE_LIMIT);
        let s = GroupSet::new(g, [ElementCode(5), ElementCode(1 << 30), ElementCode(5)]).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.contains(ElementCode(1 << 30)));
        assert!(!s.contains(ElementCode(6)));
        let ss = product_set(&s, &s).unwrap();
        assert!(ss.len() <= 4);
        assert!(ss.codes().windows(2).all(|w| w[0] < w[1]));
    }
}
