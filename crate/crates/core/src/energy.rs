//! Representation functions and energies: E⁺, E×, T_k over F_p, the
//! nonabelian energy of group sets, the brick parameter K, the σ₂
//! correlation and the fiber sums of mixed energies.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::Ratio;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::field::{FieldError, PrimeField};
use crate::group::{ElementCode, GroupDesc, GroupError};
use crate::set::GroupSet;

/// Field histograms are dense arrays up to this modulus.
pub const DENSE_FIELD_LIMIT: u64 = 1 << 16;

/// Group histograms are dense arrays up to this group order.
pub const DENSE_GROUP_LIMIT: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnergyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("sets live over different moduli: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("histograms live over different domains: {0} vs {1}")]
    DomainMismatch(Domain, Domain),
    #[error("sets live in different groups: {0} vs {1}")]
    GroupMismatch(GroupDesc, GroupDesc),
    #[error("the set is empty")]
    EmptySet,
    #[error("higher energy needs k ≥ 2, got {0}")]
    InvalidOrder(usize),
    #[error("weights have zero total mass")]
    EmptyWeights,
    #[error("the quotient route for E× needs sets inside F_p^*")]
    ZeroDivisor,
    #[error("integer overflow while accumulating counts")]
    Overflow,
}

/// A subset of F_p, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FpSet {
    p: u64,
    elems: Vec<u64>,
}

impl FpSet {
    pub fn new(p: u64, elems: impl IntoIterator<Item = u64>) -> Result<Self, EnergyError> {
        PrimeField::new(p)?;
        let mut v: Vec<u64> = elems.into_iter().collect();
        if let Some(&value) = v.iter().find(|&&x| x >= p) {
            return Err(FieldError::OutOfRange { value, p }.into());
        }
        v.sort_unstable();
        v.dedup();
        Ok(Self { p, elems: v })
    }

    fn from_sorted(p: u64, elems: Vec<u64>) -> Self {
        Self { p, elems }
    }

    pub fn full(p: u64) -> Result<Self, EnergyError> {
        Self::new(p, 0..p)
    }

    /// F_p^*.
    pub fn nonzero(p: u64) -> Result<Self, EnergyError> {
        Self::new(p, 1..p)
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    pub fn elems(&self) -> &[u64] {
        &self.elems
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.elems.iter().copied()
    }

    /// Membership table indexed by residue.
    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.p as usize];
        for &x in &self.elems {
            m[x as usize] = true;
        }
        m
    }

    pub fn intersection(&self, other: &FpSet) -> Result<FpSet, EnergyError> {
        same_modulus(self, other)?;
        let v = self.iter().filter(|&x| other.contains(x)).collect();
        Ok(Self::from_sorted(self.p, v))
    }

    /// `λA`.
    pub fn dilate(&self, lambda: u64) -> FpSet {
        let f = PrimeField::new_unchecked(self.p);
        let mut v: Vec<u64> = self.iter().map(|x| f.mul(x, lambda % self.p)).collect();
        v.sort_unstable();
        v.dedup();
        Self::from_sorted(self.p, v)
    }

    /// `λ − A`.
    pub fn reflect(&self, lambda: u64) -> FpSet {
        let f = PrimeField::new_unchecked(self.p);
        let mut v: Vec<u64> = self.iter().map(|x| f.sub(lambda % self.p, x)).collect();
        v.sort_unstable();
        Self::from_sorted(self.p, v)
    }

    /// `{a⁻¹ : a ∈ A, a ≠ 0}`.
    pub fn inverse(&self) -> FpSet {
        let f = PrimeField::new_unchecked(self.p);
        let mut v: Vec<u64> = self
            .iter()
            .filter(|&x| x != 0)
            .map(|x| f.inv(x).expect("nonzero"))
            .collect();
        v.sort_unstable();
        Self::from_sorted(self.p, v)
    }

    /// The 0/1 weight of the set as a histogram over F_p.
    pub fn indicator(&self) -> Histogram {
        let mut h = Histogram::zeros(Domain::Field { p: self.p });
        for &x in &self.elems {
            h.add_count(x, 1);
        }
        h
    }
}

fn same_modulus(a: &FpSet, b: &FpSet) -> Result<(), EnergyError> {
    if a.p != b.p {
        return Err(EnergyError::ModulusMismatch(a.p, b.p));
    }
    Ok(())
}

fn same_group(a: &GroupSet, b: &GroupSet) -> Result<(), EnergyError> {
    if a.group() != b.group() {
        return Err(EnergyError::GroupMismatch(a.group(), b.group()));
    }
    Ok(())
}

/// Where a histogram's values live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Field { p: u64 },
    Group(GroupDesc),
}

impl Domain {
    pub fn size(&self) -> u64 {
        match self {
            Domain::Field { p } => *p,
            Domain::Group(g) => g.order(),
        }
    }

    fn is_dense(&self) -> bool {
        match self {
            Domain::Field { p } => *p <= DENSE_FIELD_LIMIT,
            Domain::Group(g) => g.order() <= DENSE_GROUP_LIMIT,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Field { p } => write!(f, "F_{p}"),
            Domain::Group(g) => write!(f, "{g}"),
        }
    }
}

impl Serialize for Domain {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone)]
enum Counts {
    Dense(Vec<u64>),
    Sparse(HashMap<u64, u64>),
}

/// A representation function `x ↦ r(x)`; zero counts are not stored.
#[derive(Debug, Clone)]
pub struct Histogram {
    domain: Domain,
    counts: Counts,
}

impl PartialEq for Histogram {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.entries() == other.entries()
    }
}

impl Eq for Histogram {}

impl Histogram {
    pub fn zeros(domain: Domain) -> Self {
        let counts = if domain.is_dense() {
            Counts::Dense(vec![0; domain.size() as usize])
        } else {
            Counts::Sparse(HashMap::new())
        };
        Self { domain, counts }
    }

    /// Histogram over F_p from explicit `(value, weight)` pairs; repeated
    /// values accumulate.
    pub fn from_weights(p: u64, weights: impl IntoIterator<Item = (u64, u64)>) -> Result<Self, EnergyError> {
        PrimeField::new(p)?;
        let mut h = Self::zeros(Domain::Field { p });
        for (x, w) in weights {
            if x >= p {
                return Err(FieldError::OutOfRange { value: x, p }.into());
            }
            h.try_add_count(x, w)?;
        }
        Ok(h)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    #[inline]
    fn add_count(&mut self, x: u64, w: u64) {
        self.try_add_count(x, w).expect("histogram count overflow");
    }

    #[inline]
    fn try_add_count(&mut self, x: u64, w: u64) -> Result<(), EnergyError> {
        let slot = match &mut self.counts {
            Counts::Dense(v) => &mut v[x as usize],
            Counts::Sparse(m) => m.entry(x).or_insert(0),
        };
        *slot = slot.checked_add(w).ok_or(EnergyError::Overflow)?;
        Ok(())
    }

    pub fn get(&self, x: u64) -> u64 {
        match &self.counts {
            Counts::Dense(v) => v.get(x as usize).copied().unwrap_or(0),
            Counts::Sparse(m) => m.get(&x).copied().unwrap_or(0),
        }
    }

    /// Nonzero entries in ascending order of value.
    pub fn entries(&self) -> Vec<(u64, u64)> {
        match &self.counts {
            Counts::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(x, &c)| (x as u64, c))
                .collect(),
            Counts::Sparse(m) => {
                let mut e: Vec<(u64, u64)> = m.iter().filter(|(_, &c)| c > 0).map(|(&x, &c)| (x, c)).collect();
                e.sort_unstable();
                e
            }
        }
    }

    pub fn as_map(&self) -> BTreeMap<u64, u64> {
        self.entries().into_iter().collect()
    }

    fn counts(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        match &self.counts {
            Counts::Dense(v) => Box::new(v.iter().copied().filter(|&c| c > 0)),
            Counts::Sparse(m) => Box::new(m.values().copied().filter(|&c| c > 0)),
        }
    }

    pub fn support_len(&self) -> usize {
        self.counts().count()
    }

    pub fn total(&self) -> u128 {
        self.counts().map(u128::from).sum()
    }

    pub fn max_count(&self) -> u64 {
        self.counts().max().unwrap_or(0)
    }

    /// `Σ_x r(x)²`.
    pub fn sum_squares(&self) -> u128 {
        self.counts().map(|c| (c as u128) * (c as u128)).sum()
    }

    /// `Σ_x r(x)s(x)`.
    pub fn dot(&self, other: &Histogram) -> Result<u128, EnergyError> {
        if self.domain != other.domain {
            return Err(EnergyError::DomainMismatch(self.domain, other.domain));
        }
        Ok(self
            .entries()
            .into_iter()
            .map(|(x, c)| c as u128 * other.get(x) as u128)
            .sum())
    }

    /// Adds another partial histogram over the same domain.
    pub fn merge(&mut self, other: &Histogram) -> Result<(), EnergyError> {
        if self.domain != other.domain {
            return Err(EnergyError::DomainMismatch(self.domain, other.domain));
        }
        for (x, c) in other.entries() {
            self.try_add_count(x, c)?;
        }
        Ok(())
    }
}

/// Binary operations on F_p whose fibers are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldLaw {
    Add,
    Sub,
    Mul,
    /// `a/b`; pairs with `b = 0` are skipped.
    Div,
}

/// Binary operations on a group whose fibers are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupLaw {
    /// `ab`
    Product,
    /// `ab⁻¹`
    RightQuotient,
}

/// `r_{A∘B}(x) = #{(a, b) ∈ A×B : a∘b = x}`.
pub fn rep_histogram(a: &FpSet, b: &FpSet, law: FieldLaw) -> Result<Histogram, EnergyError> {
    same_modulus(a, b)?;
    let p = a.p;
    let f = PrimeField::new_unchecked(p);
    let mut h = Histogram::zeros(Domain::Field { p });
    match law {
        FieldLaw::Add => pairs(a, b, |x, y| h.add_count(f.add(x, y), 1)),
        FieldLaw::Sub => pairs(a, b, |x, y| h.add_count(f.sub(x, y), 1)),
        FieldLaw::Mul => pairs(a, b, |x, y| h.add_count(f.mul(x, y), 1)),
        FieldLaw::Div => {
            let inv: Vec<(u64, u64)> = b
                .iter()
                .filter(|&y| y != 0)
                .map(|y| (y, f.inv(y).expect("nonzero")))
                .collect();
            for x in a.iter() {
                for &(_, yi) in &inv {
                    h.add_count(f.mul(x, yi), 1);
                }
            }
        }
    }
    Ok(h)
}

fn pairs(a: &FpSet, b: &FpSet, mut f: impl FnMut(u64, u64)) {
    for x in a.iter() {
        for y in b.iter() {
            f(x, y);
        }
    }
}

/// `r_{AB}` or `r_{AB⁻¹}` over the ambient group.
pub fn group_rep_histogram(a: &GroupSet, b: &GroupSet, law: GroupLaw) -> Result<Histogram, EnergyError> {
    same_group(a, b)?;
    let g = a.group();
    let rhs: Vec<ElementCode> = match law {
        GroupLaw::Product => b.iter().collect(),
        GroupLaw::RightQuotient => b.iter().map(|c| g.inv(c)).collect(),
    };
    let mut h = Histogram::zeros(Domain::Group(g));
    for x in a.iter() {
        for &y in &rhs {
            h.add_count(g.mul(x, y).0, 1);
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyLaw {
    Add,
    Mul,
}

/// `E⁺(A,B) = Σ r_{A+B}²` or `E×(A,B) = Σ r_{AB}²`.
pub fn energy(a: &FpSet, b: &FpSet, law: EnergyLaw) -> Result<u128, EnergyError> {
    let law = match law {
        EnergyLaw::Add => FieldLaw::Add,
        EnergyLaw::Mul => FieldLaw::Mul,
    };
    Ok(rep_histogram(a, b, law)?.sum_squares())
}

/// The same energy through `Σ r_{A−B}²` or `Σ r_{A/B}²`. The quotient
/// form of E× requires `A, B ⊆ F_p^*`.
pub fn energy_via_quotients(a: &FpSet, b: &FpSet, law: EnergyLaw) -> Result<u128, EnergyError> {
    let law = match law {
        EnergyLaw::Add => FieldLaw::Sub,
        EnergyLaw::Mul => {
            if a.contains(0) || b.contains(0) {
                return Err(EnergyError::ZeroDivisor);
            }
            FieldLaw::Div
        }
    };
    Ok(rep_histogram(a, b, law)?.sum_squares())
}

/// `T_k(w) = Σ_x (w^{*k}(x))²`, the weighted number of solutions of
/// `a₁+⋯+a_k = a'₁+⋯+a'_k` in F_p.
pub fn t_k(weights: &Histogram, k: usize) -> Result<u128, EnergyError> {
    if k < 2 {
        return Err(EnergyError::InvalidOrder(k));
    }
    let p = match weights.domain {
        Domain::Field { p } => p as usize,
        d @ Domain::Group(_) => return Err(EnergyError::DomainMismatch(d, Domain::Field { p: 0 })),
    };
    let support = weights.entries();
    if support.is_empty() {
        return Err(EnergyError::EmptyWeights);
    }
    let mut cur = vec![0u128; p];
    for &(x, w) in &support {
        cur[x as usize] = w as u128;
    }
    for _ in 1..k {
        let mut next = vec![0u128; p];
        for (s, &c) in cur.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &(x, w) in &support {
                let t = (s + x as usize) % p;
                let add = c.checked_mul(w as u128).ok_or(EnergyError::Overflow)?;
                next[t] = next[t].checked_add(add).ok_or(EnergyError::Overflow)?;
            }
        }
        cur = next;
    }
    cur.iter().try_fold(0u128, |acc, &c| {
        c.checked_mul(c)
            .and_then(|sq| acc.checked_add(sq))
            .ok_or(EnergyError::Overflow)
    })
}

/// Nonabelian energy `E(A,B) = #{a₁b₁⁻¹ = a₂b₂⁻¹} = Σ_g r_{AB⁻¹}(g)²`.
pub fn group_energy(a: &GroupSet, b: &GroupSet) -> Result<u128, EnergyError> {
    Ok(group_rep_histogram(a, b, GroupLaw::RightQuotient)?.sum_squares())
}

/// Fiber sizes `δ_A(x,y) = #{z : [x,y,z] ∈ A}` in H_n, or
/// `δ_A(a) = #{b : (a,b) ∈ A}` in Aff, keyed by
/// [`GroupDesc::fiber_index`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginalWeight {
    group: GroupDesc,
    weights: BTreeMap<u64, u64>,
}

impl MarginalWeight {
    pub fn of(a: &GroupSet) -> Result<Self, EnergyError> {
        let g = a.group();
        if let GroupDesc::Cyclic { .. } = g {
            return Err(GroupError::Unsupported(g).into());
        }
        let mut weights = BTreeMap::new();
        for c in a.iter() {
            *weights.entry(g.fiber_index(c)).or_insert(0) += 1;
        }
        Ok(Self { group: g, weights })
    }

    pub fn group(&self) -> GroupDesc {
        self.group
    }

    pub fn at_fiber(&self, fiber: u64) -> u64 {
        self.weights.get(&fiber).copied().unwrap_or(0)
    }

    /// `δ_A(x, y)` for H_n.
    pub fn heisenberg(&self, x: &[u64], y: &[u64]) -> u64 {
        let p = self.group.modulus();
        let pack = |v: &[u64]| v.iter().rev().fold(0u64, |acc, &c| acc * p + c);
        let n = x.len() as u32;
        self.at_fiber(pack(y) + p.pow(n) * pack(x))
    }

    /// `δ_A(a)` for Aff.
    pub fn affine(&self, a: u64) -> u64 {
        if a == 0 {
            return 0;
        }
        self.at_fiber(a - 1)
    }

    pub fn entries(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.weights.iter().map(|(&k, &v)| (k, v))
    }

    pub fn total(&self) -> u64 {
        self.weights.values().sum()
    }

    pub fn max(&self) -> u64 {
        self.weights.values().copied().max().unwrap_or(0)
    }
}

/// `K(A) = |A| / max δ_A`.
pub fn brick_parameter_k(a: &GroupSet) -> Result<Ratio<u64>, EnergyError> {
    if a.is_empty() {
        return Err(EnergyError::EmptySet);
    }
    let m = MarginalWeight::of(a)?;
    Ok(Ratio::new(a.len() as u64, m.max()))
}

/// `r_{(X−X)/(Y−Y)}(w)`: quadruples `(x,x',y,y')` with `y ≠ y'` and
/// `(x−x')/(y−y') = w`.
pub fn difference_quotient_histogram(x: &FpSet, y: &FpSet) -> Result<Histogram, EnergyError> {
    same_modulus(x, y)?;
    let p = x.p;
    let f = PrimeField::new_unchecked(p);
    let dx = rep_histogram(x, x, FieldLaw::Sub)?;
    let dy = rep_histogram(y, y, FieldLaw::Sub)?;
    let mut h = Histogram::zeros(Domain::Field { p });
    for (d, cd) in dy.entries().into_iter().filter(|&(d, _)| d != 0) {
        let di = f.inv(d).expect("nonzero");
        for (e, ce) in dx.entries() {
            h.add_count(f.mul(e, di), cd.checked_mul(ce).expect("histogram count overflow"));
        }
    }
    Ok(h)
}

/// `Σ_w r_{X/Y}(w) · r_{(X−X)/(Y−Y)}(w)`.
pub fn sigma2_correlation(x: &FpSet, y: &FpSet) -> Result<u128, EnergyError> {
    let q = rep_histogram(x, y, FieldLaw::Div)?;
    let r2 = difference_quotient_histogram(x, y)?;
    q.dot(&r2)
}

/// Which multiplicative fibers enter the second mixed sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FiberConvention {
    /// `A ∩ λA`
    #[default]
    Dilate,
    /// `A ∩ λA⁻¹`
    DilateInverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MixedSums {
    /// `Σ_{λ ∈ F_p} E×(A ∩ (λ − A))`
    pub sum_add_fibers: u128,
    /// `Σ_{λ ∈ F_p^*} E⁺(A ∩ λA)` or `Σ_{λ ∈ F_p^*} E⁺(A ∩ λA⁻¹)`
    pub sum_mul_fibers: u128,
}

/// Self-energy of small sets with a reusable dense scratch buffer.
struct FiberEnergy {
    field: PrimeField,
    scratch: Vec<u64>,
    touched: Vec<u64>,
}

impl FiberEnergy {
    fn new(p: u64) -> Self {
        Self {
            field: PrimeField::new_unchecked(p),
            scratch: vec![0; p as usize],
            touched: Vec::new(),
        }
    }

    fn energy(&mut self, fiber: &[u64], law: EnergyLaw) -> u128 {
        for &a in fiber {
            for &b in fiber {
                let v = match law {
                    EnergyLaw::Add => self.field.add(a, b),
                    EnergyLaw::Mul => self.field.mul(a, b),
                };
                if self.scratch[v as usize] == 0 {
                    self.touched.push(v);
                }
                self.scratch[v as usize] += 1;
            }
        }
        let mut e = 0u128;
        for v in self.touched.drain(..) {
            let c = std::mem::take(&mut self.scratch[v as usize]) as u128;
            e += c * c;
        }
        e
    }
}

/// The two mixed sums over additive and multiplicative fibers of `A`.
pub fn mixed_energy_sums(a: &FpSet, convention: FiberConvention) -> Result<MixedSums, EnergyError> {
    let p = a.p;
    let f = PrimeField::new_unchecked(p);
    let mask = a.mask();
    let inv: Vec<u64> = (0..p)
        .map(|x| if x == 0 { 0 } else { f.inv(x).expect("nonzero") })
        .collect();
    let mut fe = FiberEnergy::new(p);
    let mut fiber = Vec::with_capacity(a.len());

    let mut sum_add = 0u128;
    for lambda in 0..p {
        fiber.clear();
        fiber.extend(a.iter().filter(|&x| mask[f.sub(lambda, x) as usize]));
        sum_add += fe.energy(&fiber, EnergyLaw::Mul);
    }

    let mut sum_mul = 0u128;
    for lambda in 1..p {
        fiber.clear();
        match convention {
            // x ∈ λA ⇔ x/λ ∈ A
            FiberConvention::Dilate => {
                let li = inv[lambda as usize];
                fiber.extend(a.iter().filter(|&x| mask[f.mul(x, li) as usize]));
            }
            // x ∈ λA⁻¹ ⇔ x ≠ 0 and λ/x ∈ A
            FiberConvention::DilateInverse => {
                fiber.extend(
                    a.iter()
                        .filter(|&x| x != 0 && mask[f.mul(lambda, inv[x as usize]) as usize]),
                );
            }
        }
        sum_mul += fe.energy(&fiber, EnergyLaw::Add);
    }
    Ok(MixedSums {
        sum_add_fibers: sum_add,
        sum_mul_fibers: sum_mul,
    })
}

/// One row of energy output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnergyReport {
    pub domain: Domain,
    pub law: String,
    pub sizes: Vec<u64>,
    pub value: u128,
}

impl EnergyReport {
    pub fn field(a: &FpSet, b: &FpSet, law: EnergyLaw) -> Result<Self, EnergyError> {
        Ok(Self {
            domain: Domain::Field { p: a.p },
            law: serde_json::to_value(law)
                .expect("unit variants serialize")
                .as_str()
                .unwrap_or_default()
                .to_string(),
            sizes: vec![a.len() as u64, b.len() as u64],
            value: energy(a, b, law)?,
        })
    }

    pub fn higher(weights: &Histogram, k: usize) -> Result<Self, EnergyError> {
        Ok(Self {
            domain: weights.domain,
            law: format!("t_{k}"),
            sizes: vec![weights.total() as u64],
            value: t_k(weights, k)?,
        })
    }

    pub fn group(a: &GroupSet, b: &GroupSet) -> Result<Self, EnergyError> {
        Ok(Self {
            domain: Domain::Group(a.group()),
            law: "group".to_string(),
            sizes: vec![a.len() as u64, b.len() as u64],
            value: group_energy(a, b)?,
        })
    }

    pub fn to_json_row(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}
