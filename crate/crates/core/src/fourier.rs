//! Nonabelian Fourier analysis on H_1(F_p) and Aff(F_p) with exact
//! cyclotomic arithmetic.
//!
//! Irreducible representations of H_1(F_p): the p² characters
//! `[x,y,z] ↦ ζ^{ax+by}` and the p−1 representations `π_c` of dimension p,
//! where `π_1([x,y,z]) = ζ^{z+y} D^y W^x` and `π_c` is its image under
//! `ζ ↦ ζ^c`. Irreducibles of Aff(F_p): the p−1 characters
//! `(x,y) ↦ ζ_{p−1}^{j·ind(x)}` and `π((x,y)) = D^y W^{ind(x)}` of
//! dimension p−1.
//!
//! All representation values are monomial matrices, so transforms are
//! accumulated entrywise as sums of roots of unity.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::cyclo::{CycloElement, CycloError, CycloRing, RootSum};
use crate::field::DiscreteLog;
use crate::group::{AffElement, ElementCode, GroupDesc, GroupError, HElement, ENUMERATION_LIMIT};
use crate::set::GroupSet;

/// Largest prime for representation-matrix work.
pub const MAX_REP_PRIME: u64 = 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FourierError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
    #[error("explicit representations exist only for H_1(F_p) and Aff(F_p), not {0}")]
    UnsupportedGroup(GroupDesc),
    #[error("prime {0} exceeds the representation limit {MAX_REP_PRIME}")]
    PrimeTooLarge(u64),
    #[error("functions live on different groups: {0} vs {1}")]
    GroupMismatch(GroupDesc, GroupDesc),
    #[error("expected {expected} function values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("matrix dimensions {0} and {1} do not match")]
    DimensionMismatch(usize, usize),
    #[error("bundle does not match the irreducibles of {0}")]
    IncompleteBundle(GroupDesc),
    #[error("value at code {code} is {numerator}/{denominator}, not an integer")]
    NonIntegral {
        code: u64,
        numerator: i128,
        denominator: i128,
    },
    #[error("expected a rational integer, got {0}")]
    NonRational(String),
    #[error("integer overflow in function values")]
    Overflow,
}

/// The element `a` in the corner of `W_a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum WTwist {
    /// `a = ζ`
    Zeta,
    /// `a = 1`
    One,
}

/// How `W_a` acts on the standard basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum WOrientation {
    /// Ones at `(i, i+1)` and `a` at `(d−1, 0)`: `e_i ↦ e_{i−1}`, `e_0 ↦ a·e_{d−1}`.
    Row,
    /// Ones at `(i+1, i)` and `a` at `(0, d−1)`.
    Transpose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct WConvention {
    pub twist: WTwist,
    pub orientation: WOrientation,
}

impl WConvention {
    /// Candidates in order of preference.
    pub const CANDIDATES: [WConvention; 4] = [
        WConvention {
            twist: WTwist::Zeta,
            orientation: WOrientation::Row,
        },
        WConvention {
            twist: WTwist::Zeta,
            orientation: WOrientation::Transpose,
        },
        WConvention {
            twist: WTwist::One,
            orientation: WOrientation::Row,
        },
        WConvention {
            twist: WTwist::One,
            orientation: WOrientation::Transpose,
        },
    ];

    /// The first candidate for which both commutation identities and the
    /// homomorphism law hold at p = 3 and p = 5. Decided once per process.
    pub fn canonical() -> WConvention {
        static CHOSEN: OnceLock<WConvention> = OnceLock::new();
        *CHOSEN.get_or_init(|| {
            Self::CANDIDATES
                .into_iter()
                .find(|c| c.self_test(3).is_ok() && c.self_test(5).is_ok())
                .expect("no W convention satisfies the representation identities")
        })
    }

    /// Checks `ζ^{xy'} D^{y'} W^x = W^x D^{y'}`, the homomorphism law on
    /// all pairs of H_1(F_p), and `W^{ind a} D^d = D^{ad} W^{ind a}` for Aff.
    pub fn self_test(&self, p: u64) -> Result<(), String> {
        let m = p as u32;
        let w = self.heisenberg_w(p);
        let d = heisenberg_d(p);
        for x in 0..p {
            let wx = w.pow(x);
            for y in 0..p {
                let dy = d.pow(y);
                let lhs = MonomialMatrix::scalar(m, p as usize, (x * y % p) as u32)
                    .mul(&dy)
                    .mul(&wx);
                if lhs != wx.mul(&dy) {
                    return Err(format!("Heisenberg identity fails at x={x}, y'={y}"));
                }
            }
        }
        let g = GroupDesc::Heisenberg { p, n: 1 };
        let values: Vec<MonomialMatrix> = g
            .codes()
            .map(|c| pi_heisenberg_with(*self, Phase::Shifted, p, c))
            .collect();
        for a in g.codes() {
            for b in g.codes() {
                let ab = g.mul(a, b);
                if values[a.0 as usize].mul(&values[b.0 as usize]) != values[ab.0 as usize] {
                    return Err(format!("homomorphism fails at codes {} and {}", a.0, b.0));
                }
            }
        }
        let dl = DiscreteLog::new(p).map_err(|e| e.to_string())?;
        let f = dl.field();
        let w1 = MonomialMatrix::cyclic_shift(m, (p - 1) as usize, 0, self.orientation);
        let da = affine_d(&dl);
        for a in 1..p {
            let wa = w1.pow(dl.ind(a).expect("nonzero"));
            for dd in 0..p {
                if wa.mul(&da.pow(dd)) != da.pow(f.mul(a, dd)).mul(&wa) {
                    return Err(format!("Aff identity fails at a={a}, d={dd}"));
                }
            }
        }
        Ok(())
    }

    fn heisenberg_w(&self, p: u64) -> MonomialMatrix {
        let a_exp = match self.twist {
            WTwist::Zeta => 1,
            WTwist::One => 0,
        };
        MonomialMatrix::cyclic_shift(p as u32, p as usize, a_exp, self.orientation)
    }
}

/// Scalar in front of `D^y W^x` in the p-dimensional representation of H_1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// `ζ^{z+y}`
    #[default]
    Shifted,
    /// `ζ^z`
    Central,
}

/// A matrix with exactly one nonzero entry `ζ_m^{e_i}` in each row `i`,
/// located in column `cols[i]`; the columns form a permutation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialMatrix {
    order: u32,
    cols: Vec<u32>,
    exps: Vec<u32>,
}

impl MonomialMatrix {
    pub fn identity(order: u32, dim: usize) -> Self {
        Self::scalar(order, dim, 0)
    }

    /// `ζ^k · I`.
    pub fn scalar(order: u32, dim: usize, k: u32) -> Self {
        Self {
            order,
            cols: (0..dim as u32).collect(),
            exps: vec![k % order; dim],
        }
    }

    /// `diag(ζ^{e_0}, …, ζ^{e_{d−1}})`.
    pub fn diagonal(order: u32, exps: Vec<u32>) -> Self {
        Self {
            order,
            cols: (0..exps.len() as u32).collect(),
            exps: exps.into_iter().map(|e| e % order).collect(),
        }
    }

    /// `W_a` with `a = ζ^{a_exp}`.
    pub fn cyclic_shift(order: u32, dim: usize, a_exp: u32, orientation: WOrientation) -> Self {
        let d = dim as u32;
        let mut exps = vec![0; dim];
        let cols = match orientation {
            WOrientation::Row => {
                exps[dim - 1] = a_exp % order;
                (0..d).map(|i| (i + 1) % d).collect()
            }
            WOrientation::Transpose => {
                exps[0] = a_exp % order;
                (0..d).map(|i| (i + d - 1) % d).collect()
            }
        };
        Self { order, cols, exps }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Column of the nonzero entry in row `i`.
    #[inline]
    pub fn col(&self, i: usize) -> usize {
        self.cols[i] as usize
    }

    /// Exponent of the nonzero entry in row `i`.
    #[inline]
    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i]
    }

    pub fn mul(&self, other: &MonomialMatrix) -> MonomialMatrix {
        assert_eq!(self.order, other.order, "monomial matrices over different rings");
        assert_eq!(self.dim(), other.dim(), "monomial matrices of different sizes");
        let mut cols = Vec::with_capacity(self.dim());
        let mut exps = Vec::with_capacity(self.dim());
        for (&j, &e) in self.cols.iter().zip(&self.exps) {
            cols.push(other.cols[j as usize]);
            exps.push((e + other.exps[j as usize]) % self.order);
        }
        MonomialMatrix {
            order: self.order,
            cols,
            exps,
        }
    }

    pub fn pow(&self, mut k: u64) -> MonomialMatrix {
        let mut acc = MonomialMatrix::identity(self.order, self.dim());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    pub fn conj_transpose(&self) -> MonomialMatrix {
        let mut cols = vec![0; self.dim()];
        let mut exps = vec![0; self.dim()];
        for (i, (&j, &e)) in self.cols.iter().zip(&self.exps).enumerate() {
            cols[j as usize] = i as u32;
            exps[j as usize] = (self.order - e) % self.order;
        }
        MonomialMatrix {
            order: self.order,
            cols,
            exps,
        }
    }

    /// Image under `ζ ↦ ζ^c`.
    pub fn galois(&self, c: u32) -> MonomialMatrix {
        let m = self.order as u64;
        MonomialMatrix {
            order: self.order,
            cols: self.cols.clone(),
            exps: self.exps.iter().map(|&e| (e as u64 * c as u64 % m) as u32).collect(),
        }
    }

    pub fn trace(&self) -> Result<CycloElement, FourierError> {
        let ring = CycloRing::get(self.order)?;
        let mut acc = RootSum::new(self.order);
        for (i, (&j, &e)) in self.cols.iter().zip(&self.exps).enumerate() {
            if j as usize == i {
                acc.add_root(e as u64, 1);
            }
        }
        Ok(acc.finish(&ring))
    }

    pub fn to_dense(&self) -> Result<RepMatrix, FourierError> {
        let ring = CycloRing::get(self.order)?;
        let mut m = RepMatrix::zero(&ring, self.dim());
        for (i, (&j, &e)) in self.cols.iter().zip(&self.exps).enumerate() {
            m.set(i, j as usize, CycloElement::root_power(&ring, e as i64));
        }
        Ok(m)
    }
}

fn heisenberg_d(p: u64) -> MonomialMatrix {
    MonomialMatrix::diagonal(p as u32, (0..p as u32).collect())
}

/// `diag(ζ^{ω^0}, ζ^{ω^1}, …, ζ^{ω^{p−2}})`.
fn affine_d(dl: &DiscreteLog) -> MonomialMatrix {
    let p = dl.field().modulus();
    MonomialMatrix::diagonal(p as u32, (0..p - 1).map(|i| dl.root_pow(i) as u32).collect())
}

/// A dense square matrix over Z[ζ_m].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepMatrix {
    ring: Arc<CycloRing>,
    dim: usize,
    entries: Vec<CycloElement>,
}

impl RepMatrix {
    pub fn zero(ring: &Arc<CycloRing>, dim: usize) -> Self {
        Self {
            ring: Arc::clone(ring),
            dim,
            entries: vec![CycloElement::zero(ring); dim * dim],
        }
    }

    pub fn identity(ring: &Arc<CycloRing>, dim: usize) -> Self {
        let mut m = Self::zero(ring, dim);
        for i in 0..dim {
            m.set(i, i, CycloElement::one(ring));
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.ring.order()
    }

    pub fn ring(&self) -> &Arc<CycloRing> {
        &self.ring
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &CycloElement {
        &self.entries[i * self.dim + j]
    }

    /// Panics if `value` lives in another ring.
    pub fn set(&mut self, i: usize, j: usize, value: CycloElement) {
        assert_eq!(value.order(), self.ring.order(), "entry from another ring");
        self.entries[i * self.dim + j] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(CycloElement::is_zero)
    }

    fn check(&self, other: &RepMatrix) -> Result<(), FourierError> {
        if self.ring.order() != other.ring.order() {
            return Err(CycloError::OrderMismatch(self.ring.order(), other.ring.order()).into());
        }
        if self.dim != other.dim {
            return Err(FourierError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn add(&self, other: &RepMatrix) -> Result<RepMatrix, FourierError> {
        self.check(other)?;
        Ok(RepMatrix {
            ring: Arc::clone(&self.ring),
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn mul(&self, other: &RepMatrix) -> Result<RepMatrix, FourierError> {
        self.check(other)?;
        let d = self.dim;
        let mut out = RepMatrix::zero(&self.ring, d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * d + j].add_assign_ref(&(a * b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn conj_transpose(&self) -> RepMatrix {
        let d = self.dim;
        let mut out = RepMatrix::zero(&self.ring, d);
        for i in 0..d {
            for j in 0..d {
                out.entries[j * d + i] = self.get(i, j).conj();
            }
        }
        out
    }

    /// Image under `ζ ↦ ζ^c`, entrywise.
    pub fn galois(&self, c: i64) -> RepMatrix {
        RepMatrix {
            ring: Arc::clone(&self.ring),
            dim: self.dim,
            entries: self.entries.iter().map(|e| e.galois(c)).collect(),
        }
    }

    pub fn trace(&self) -> CycloElement {
        let mut t = CycloElement::zero(&self.ring);
        for i in 0..self.dim {
            t.add_assign_ref(self.get(i, i));
        }
        t
    }

    /// `⟨A, B⟩_HS = tr(AB*) = Σ a_ij · conj(b_ij)`.
    pub fn hs_inner(&self, other: &RepMatrix) -> Result<CycloElement, FourierError> {
        self.check(other)?;
        let mut t = CycloElement::zero(&self.ring);
        for (a, b) in self.entries.iter().zip(&other.entries) {
            if !a.is_zero() && !b.is_zero() {
                t.add_assign_ref(&(a * &b.conj()));
            }
        }
        Ok(t)
    }

    /// `⟨A, P⟩_HS` for a monomial `P` in the same ring.
    fn hs_inner_monomial(&self, p: &MonomialMatrix, acc: &mut RootSum) {
        debug_assert_eq!(self.ring.order(), p.order);
        let m = p.order;
        for i in 0..self.dim {
            let j = p.col(i);
            acc.add_shifted(self.get(i, j), ((m - p.exp(i)) % m) as u64, 1);
        }
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j).to_complex())
    }
}

/// `‖M‖²_HS = Σ |m_ij|²` as an element of Z[ζ_m].
pub fn hs_norm_sq_exact(m: &RepMatrix) -> CycloElement {
    let mut t = CycloElement::zero(m.ring());
    for e in &m.entries {
        if !e.is_zero() {
            t.add_assign_ref(&e.conj_normsq());
        }
    }
    t
}

/// `‖M‖²_HS` when it is a rational integer.
///
/// The norm of a Fourier coefficient at a single p-dimensional
/// representation of H_1 is in general only an algebraic integer; the
/// sum over its Galois conjugates is rational.
pub fn hs_norm_sq(m: &RepMatrix) -> Result<i128, FourierError> {
    let n = hs_norm_sq_exact(m);
    n.as_integer()
        .map(i128::from)
        .ok_or_else(|| FourierError::NonRational(n.to_string()))
}

/// `‖M‖²_HS` through the complex embedding.
pub fn hs_norm_sq_f64(m: &RepMatrix) -> f64 {
    m.entries.iter().map(|e| e.to_complex().norm_sqr()).sum()
}

/// Largest singular value through the complex embedding.
pub fn op_norm(m: &RepMatrix) -> f64 {
    if m.dim == 0 {
        return 0.0;
    }
    m.to_complex().singular_values().iter().copied().fold(0.0, f64::max)
}

/// Labels of the irreducible representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Irrep {
    /// `[x,y,z] ↦ ζ^{ax+by}`
    HChar { a: u64, b: u64 },
    /// The p-dimensional `π_c = σ_c(π_1)`, `c ∈ F_p^*`.
    HSchrodinger { c: u64 },
    /// `(x,y) ↦ ζ_{p−1}^{j·ind(x)}`
    AffChar { j: u64 },
    /// The (p−1)-dimensional representation.
    AffStandard,
}

impl Irrep {
    pub fn dim(&self, group: GroupDesc) -> usize {
        match self {
            Irrep::HChar { .. } | Irrep::AffChar { .. } => 1,
            Irrep::HSchrodinger { .. } => group.modulus() as usize,
            Irrep::AffStandard => group.modulus() as usize - 1,
        }
    }

    /// Order of the roots of unity in the values.
    pub fn ring_order(&self, group: GroupDesc) -> u32 {
        match self {
            Irrep::AffChar { .. } => group.modulus() as u32 - 1,
            _ => group.modulus() as u32,
        }
    }
}

fn check_rep_group(group: GroupDesc) -> Result<u64, FourierError> {
    match group {
        GroupDesc::Heisenberg { p, n: 1 } | GroupDesc::Affine { p } => {
            if p > MAX_REP_PRIME {
                return Err(FourierError::PrimeTooLarge(p));
            }
            Ok(p)
        }
        g => Err(FourierError::UnsupportedGroup(g)),
    }
}

/// The irreducibles of H_1(F_p) or Aff(F_p).
pub fn irreps(group: GroupDesc) -> Result<Vec<Irrep>, FourierError> {
    let p = check_rep_group(group)?;
    Ok(match group {
        GroupDesc::Heisenberg { .. } => {
            let mut v: Vec<Irrep> = (0..p)
                .flat_map(|a| (0..p).map(move |b| Irrep::HChar { a, b }))
                .collect();
            v.extend((1..p).map(|c| Irrep::HSchrodinger { c }));
            v
        }
        _ => {
            let mut v: Vec<Irrep> = (0..p - 1).map(|j| Irrep::AffChar { j }).collect();
            v.push(Irrep::AffStandard);
            v
        }
    })
}

#[inline]
fn h1_coords(p: u64, code: ElementCode) -> (u64, u64, u64) {
    (code.0 / (p * p), code.0 / p % p, code.0 % p)
}

#[inline]
fn aff_coords(p: u64, code: ElementCode) -> (u64, u64) {
    (code.0 / p + 1, code.0 % p)
}

/// `π_1([x,y,z]) = ζ^{phase} D^y W^x` for a given W convention.
pub fn pi_heisenberg_with(conv: WConvention, phase: Phase, p: u64, code: ElementCode) -> MonomialMatrix {
    let (x, y, z) = h1_coords(p, code);
    let s = match phase {
        Phase::Shifted => (z + y) % p,
        Phase::Central => z,
    };
    MonomialMatrix::scalar(p as u32, p as usize, s as u32)
        .mul(&heisenberg_d(p).pow(y))
        .mul(&conv.heisenberg_w(p).pow(x))
}

/// `π((x,y)) = D^y W_1^{ind(x)}`.
fn pi_affine_with(conv: WConvention, dl: &DiscreteLog, code: ElementCode) -> MonomialMatrix {
    let p = dl.field().modulus();
    let (a, b) = aff_coords(p, code);
    let w = MonomialMatrix::cyclic_shift(p as u32, (p - 1) as usize, 0, conv.orientation);
    affine_d(dl).pow(b).mul(&w.pow(dl.ind(a).expect("nonzero scale")))
}

/// `π_1(g)` as a dense matrix over Z[ζ_p].
pub fn pi_heisenberg(p: u64, g: &HElement, phase: Phase) -> Result<RepMatrix, FourierError> {
    let desc = GroupDesc::heisenberg(p, g.x.len())?;
    check_rep_group(desc)?;
    let code = desc.encode(&crate::group::GroupElement::H(g.clone()))?;
    pi_heisenberg_with(WConvention::canonical(), phase, p, code).to_dense()
}

/// `π((x,y))` as a dense matrix over Z[ζ_p].
pub fn pi_affine(p: u64, g: &AffElement) -> Result<RepMatrix, FourierError> {
    let desc = GroupDesc::affine(p)?;
    check_rep_group(desc)?;
    let code = desc.encode(&crate::group::GroupElement::Aff(*g))?;
    let dl = DiscreteLog::new(p).map_err(GroupError::from)?;
    pi_affine_with(WConvention::canonical(), &dl, code).to_dense()
}

/// Evaluates irreducible representations of one group.
#[derive(Debug, Clone)]
pub struct RepEvaluator {
    group: GroupDesc,
    p: u64,
    phase: Phase,
    conv: WConvention,
    dl: DiscreteLog,
}

impl RepEvaluator {
    pub fn new(group: GroupDesc, phase: Phase) -> Result<Self, FourierError> {
        let p = check_rep_group(group)?;
        Ok(Self {
            group,
            p,
            phase,
            conv: WConvention::canonical(),
            dl: DiscreteLog::new(p).map_err(GroupError::from)?,
        })
    }

    pub fn group(&self) -> GroupDesc {
        self.group
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// `π(g)` for an irreducible `π`.
    pub fn value(&self, irrep: Irrep, code: ElementCode) -> MonomialMatrix {
        let p = self.p;
        match irrep {
            Irrep::HChar { a, b } => {
                let (x, y, _) = h1_coords(p, code);
                MonomialMatrix::scalar(p as u32, 1, ((a * x + b * y) % p) as u32)
            }
            Irrep::HSchrodinger { c } => pi_heisenberg_with(self.conv, self.phase, p, code).galois(c as u32),
            Irrep::AffChar { j } => {
                let (a, _) = aff_coords(p, code);
                let k = j * self.dl.ind(a).expect("nonzero scale") % (p - 1);
                MonomialMatrix::scalar((p - 1) as u32, 1, k as u32)
            }
            Irrep::AffStandard => pi_affine_with(self.conv, &self.dl, code),
        }
    }
}

/// An integer-valued function on a finite group, indexed by element code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupFunction {
    group: GroupDesc,
    values: Vec<i64>,
}

impl GroupFunction {
    pub fn zero(group: GroupDesc) -> Result<Self, FourierError> {
        group.validate()?;
        if group.order() > ENUMERATION_LIMIT {
            return Err(GroupError::TooLarge {
                order: group.order(),
                limit: ENUMERATION_LIMIT,
            }
            .into());
        }
        Ok(Self {
            group,
            values: vec![0; group.order() as usize],
        })
    }

    pub fn from_values(group: GroupDesc, values: Vec<i64>) -> Result<Self, FourierError> {
        let z = Self::zero(group)?;
        if values.len() != z.values.len() {
            return Err(FourierError::Length {
                expected: z.values.len(),
                got: values.len(),
            });
        }
        Ok(Self { group, values })
    }

    pub fn delta(group: GroupDesc, g: ElementCode) -> Result<Self, FourierError> {
        group.check_code(g)?;
        let mut f = Self::zero(group)?;
        f.values[g.0 as usize] = 1;
        Ok(f)
    }

    pub fn indicator(set: &GroupSet) -> Result<Self, FourierError> {
        let mut f = Self::zero(set.group())?;
        for c in set.iter() {
            f.values[c.0 as usize] = 1;
        }
        Ok(f)
    }

    pub fn constant(group: GroupDesc, v: i64) -> Result<Self, FourierError> {
        let mut f = Self::zero(group)?;
        f.values.iter_mut().for_each(|x| *x = v);
        Ok(f)
    }

    pub fn group(&self) -> GroupDesc {
        self.group
    }

    #[inline]
    pub fn get(&self, g: ElementCode) -> i64 {
        self.values[g.0 as usize]
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// Nonzero values with their codes.
    pub fn support(&self) -> impl Iterator<Item = (ElementCode, i64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, &v)| (ElementCode(i as u64), v))
    }

    /// `g ↦ f(g⁻¹)`.
    pub fn reflect(&self) -> GroupFunction {
        let mut out = vec![0; self.values.len()];
        for (g, v) in self.support() {
            out[self.group.inv(g).0 as usize] = v;
        }
        GroupFunction {
            group: self.group,
            values: out,
        }
    }

    pub fn sum_squares(&self) -> i128 {
        self.values.iter().map(|&v| v as i128 * v as i128).sum()
    }

    /// `δ_f`: sums of `f` over the cosets of the center line (H_n) or of
    /// U (Aff), indexed by [`GroupDesc::fiber_index`].
    pub fn marginal(&self) -> Vec<i64> {
        let mut m = vec![0i64; self.group.fiber_count() as usize];
        for (g, v) in self.support() {
            let slot = &mut m[self.group.fiber_index(g) as usize];
            *slot = slot.checked_add(v).expect("marginal overflow");
        }
        m
    }
}

/// `(f*g)(x) = Σ_y f(y) g(y⁻¹x)`.
pub fn convolve(f: &GroupFunction, g: &GroupFunction) -> Result<GroupFunction, FourierError> {
    if f.group != g.group {
        return Err(FourierError::GroupMismatch(f.group, g.group));
    }
    let grp = f.group;
    let mut out = GroupFunction::zero(grp)?;
    let gs: Vec<(ElementCode, i64)> = g.support().collect();
    for (y, fy) in f.support() {
        for &(w, gw) in &gs {
            let slot = &mut out.values[grp.mul(y, w).0 as usize];
            let add = fy.checked_mul(gw).ok_or(FourierError::Overflow)?;
            *slot = slot.checked_add(add).ok_or(FourierError::Overflow)?;
        }
    }
    Ok(out)
}

/// Fourier coefficients `𝐹f(π) = Σ_g f(g) π(g)` at every irreducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumBundle {
    group: GroupDesc,
    phase: Phase,
    coefficients: Vec<(Irrep, RepMatrix)>,
}

impl SpectrumBundle {
    pub fn group(&self) -> GroupDesc {
        self.group
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn coefficients(&self) -> &[(Irrep, RepMatrix)] {
        &self.coefficients
    }

    /// Mutable access, for fault-injection checks.
    pub fn coefficients_mut(&mut self) -> &mut [(Irrep, RepMatrix)] {
        &mut self.coefficients
    }

    pub fn get(&self, irrep: Irrep) -> Option<&RepMatrix> {
        self.coefficients.iter().find(|(i, _)| *i == irrep).map(|(_, m)| m)
    }

    /// `Σ_π d_π²`.
    pub fn dimension_sum_sq(&self) -> u64 {
        self.coefficients.iter().map(|(_, m)| (m.dim() * m.dim()) as u64).sum()
    }

    fn check_complete(&self) -> Result<(), FourierError> {
        let expected = irreps(self.group)?;
        let ok = expected.len() == self.coefficients.len()
            && expected
                .iter()
                .zip(&self.coefficients)
                .all(|(e, (i, m))| e == i && m.dim() == e.dim(self.group) && m.order() == e.ring_order(self.group));
        if !ok {
            return Err(FourierError::IncompleteBundle(self.group));
        }
        Ok(())
    }
}

/// Computes the full bundle of Fourier coefficients of `f`.
pub fn fourier_transform(f: &GroupFunction, phase: Phase) -> Result<SpectrumBundle, FourierError> {
    let group = f.group;
    let ev = RepEvaluator::new(group, phase)?;
    let p = ev.p;
    let support: Vec<(ElementCode, i64)> = f.support().collect();
    let mut coefficients = Vec::new();
    match group {
        GroupDesc::Heisenberg { .. } => {
            let ring = CycloRing::get(p as u32)?;
            // characters only see the marginal δ_f(x, y), fiber index y + p·x
            let marginal = f.marginal();
            for a in 0..p {
                for b in 0..p {
                    let mut s = RootSum::new(p as u32);
                    for (fib, &w) in marginal.iter().enumerate() {
                        if w != 0 {
                            let (x, y) = (fib as u64 / p, fib as u64 % p);
                            s.add_root(a * x + b * y, w);
                        }
                    }
                    let mut m = RepMatrix::zero(&ring, 1);
                    m.set(0, 0, s.finish(&ring));
                    coefficients.push((Irrep::HChar { a, b }, m));
                }
            }
            let values: Vec<MonomialMatrix> = support
                .iter()
                .map(|&(g, _)| ev.value(Irrep::HSchrodinger { c: 1 }, g))
                .collect();
            for c in 1..p {
                let mut acc = vec![RootSum::new(p as u32); (p * p) as usize];
                for (v, &(_, w)) in values.iter().zip(&support) {
                    let d = p as usize;
                    for i in 0..d {
                        acc[i * d + v.col(i)].add_root(v.exp(i) as u64 * c, w);
                    }
                }
                coefficients.push((Irrep::HSchrodinger { c }, finish_dense(&ring, p as usize, acc)));
            }
        }
        _ => {
            let ring_c = CycloRing::get((p - 1) as u32)?;
            let ring = CycloRing::get(p as u32)?;
            let marginal = f.marginal();
            for j in 0..p - 1 {
                let mut s = RootSum::new((p - 1) as u32);
                for (fib, &w) in marginal.iter().enumerate() {
                    if w != 0 {
                        let ind = ev.dl.ind(fib as u64 + 1).expect("nonzero scale");
                        s.add_root(j * ind, w);
                    }
                }
                let mut m = RepMatrix::zero(&ring_c, 1);
                m.set(0, 0, s.finish(&ring_c));
                coefficients.push((Irrep::AffChar { j }, m));
            }
            let d = (p - 1) as usize;
            let mut acc = vec![RootSum::new(p as u32); d * d];
            for &(g, w) in &support {
                let v = ev.value(Irrep::AffStandard, g);
                for i in 0..d {
                    acc[i * d + v.col(i)].add_root(v.exp(i) as u64, w);
                }
            }
            coefficients.push((Irrep::AffStandard, finish_dense(&ring, d, acc)));
        }
    }
    Ok(SpectrumBundle {
        group,
        phase,
        coefficients,
    })
}

fn finish_dense(ring: &Arc<CycloRing>, d: usize, acc: Vec<RootSum>) -> RepMatrix {
    let mut m = RepMatrix::zero(ring, d);
    for (k, s) in acc.into_iter().enumerate() {
        m.set(k / d, k % d, s.finish(ring));
    }
    m
}

/// Exact sums of cyclotomic values from several rings; each partial sum
/// must be a rational integer.
#[derive(Default)]
struct RingSums {
    sums: BTreeMap<u32, RootSum>,
}

impl RingSums {
    fn slot(&mut self, order: u32) -> &mut RootSum {
        self.sums.entry(order).or_insert_with(|| RootSum::new(order))
    }

    fn add(&mut self, e: &CycloElement, weight: i64) {
        self.slot(e.order()).add_shifted(e, 0, weight);
    }

    fn rational(self) -> Result<i128, FourierError> {
        let mut total = 0i128;
        for (order, s) in self.sums {
            let e = s.finish(&CycloRing::get(order)?);
            total += e.as_integer().ok_or_else(|| FourierError::NonRational(e.to_string()))? as i128;
        }
        Ok(total)
    }
}

/// `Σ_π d_π ⟨𝐹f(π), π(h)⟩_HS`, which equals `|G|·f(h)`.
pub fn inversion_numerator(bundle: &SpectrumBundle, h: ElementCode) -> Result<i128, FourierError> {
    bundle.check_complete()?;
    bundle.group.check_code(h)?;
    let ev = RepEvaluator::new(bundle.group, bundle.phase)?;
    numerator_with(&ev, bundle, h, |_| true)
}

/// `Σ d_π ⟨𝐹f(π), π(h)⟩_HS` over the irreducibles accepted by `keep`,
/// each term weighted by `d_π` when `weighted`.
fn pairing_sum(
    ev: &RepEvaluator,
    bundle: &SpectrumBundle,
    h: ElementCode,
    weighted: bool,
    keep: impl Fn(Irrep) -> bool,
) -> Result<i128, FourierError> {
    let mut sums = RingSums::default();
    for (irrep, m) in bundle.coefficients.iter().filter(|(i, _)| keep(*i)) {
        let mut local = RootSum::new(m.order());
        m.hs_inner_monomial(&ev.value(*irrep, h), &mut local);
        let d = if weighted { m.dim() as i64 } else { 1 };
        sums.add(&local.finish(m.ring()), d);
    }
    sums.rational()
}

fn numerator_with(
    ev: &RepEvaluator,
    bundle: &SpectrumBundle,
    h: ElementCode,
    keep: impl Fn(Irrep) -> bool,
) -> Result<i128, FourierError> {
    pairing_sum(ev, bundle, h, true, keep)
}

fn exact_div(code: ElementCode, num: i128, den: i128) -> Result<i64, FourierError> {
    if num % den != 0 {
        return Err(FourierError::NonIntegral {
            code: code.0,
            numerator: num,
            denominator: den,
        });
    }
    i64::try_from(num / den).map_err(|_| FourierError::Overflow)
}

/// Reconstructs `f(g) = |G|⁻¹ Σ_π d_π ⟨𝐹f(π), π(g)⟩_HS`; the division
/// by `|G|` must be exact.
pub fn fourier_invert(bundle: &SpectrumBundle) -> Result<GroupFunction, FourierError> {
    bundle.check_complete()?;
    let group = bundle.group;
    let ev = RepEvaluator::new(group, bundle.phase)?;
    let order = group.order() as i128;
    let values = group
        .codes()
        .map(|g| exact_div(g, numerator_with(&ev, bundle, g, |_| true)?, order))
        .collect::<Result<Vec<_>, _>>()?;
    GroupFunction::from_values(group, values)
}

fn is_large(irrep: Irrep) -> bool {
    matches!(irrep, Irrep::HSchrodinger { .. } | Irrep::AffStandard)
}

/// The large-representation part of the inversion at `g`:
/// `Σ_c ⟨𝐹f(π_c), π_c(g)⟩_HS` for H_1 or `⟨𝐹f(π), π(g)⟩_HS` for Aff.
pub fn large_rep_pairing(bundle: &SpectrumBundle, g: ElementCode) -> Result<i128, FourierError> {
    bundle.check_complete()?;
    bundle.group.check_code(g)?;
    let ev = RepEvaluator::new(bundle.group, bundle.phase)?;
    pairing_sum(&ev, bundle, g, false, is_large)
}

/// Reconstructs `f` from its marginal and the large representations:
/// `f([x,y,z]) = δ_f(x,y)/p + p⁻² Σ_c ⟨𝐹f(π_c), π_c([x,y,z])⟩_HS` on
/// H_1, `f((x,y)) = δ_f(x)/p + p⁻¹ ⟨𝐹f(π), π((x,y))⟩_HS` on Aff.
pub fn fourier_invert_split(f: &GroupFunction, bundle: &SpectrumBundle) -> Result<GroupFunction, FourierError> {
    let group = bundle.group;
    if f.group != group {
        return Err(FourierError::GroupMismatch(f.group, group));
    }
    bundle.check_complete()?;
    let ev = RepEvaluator::new(group, bundle.phase)?;
    let p = group.modulus() as i128;
    let marginal = f.marginal();
    let values = group
        .codes()
        .map(|g| {
            let delta = marginal[group.fiber_index(g) as usize] as i128;
            let big = pairing_sum(&ev, bundle, g, false, is_large)?;
            match group {
                GroupDesc::Heisenberg { .. } => exact_div(g, p * delta + big, p * p),
                _ => exact_div(g, delta + big, p),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    GroupFunction::from_values(group, values)
}

/// `p·δ_f(x,y) + ⟨𝐹f(π_1), π_1(g)⟩_HS`, the H_1 split form with only one
/// p-dimensional representation. Equals `p²·f(g)` only in special cases.
pub fn single_rep_split_numerator(
    f: &GroupFunction,
    bundle: &SpectrumBundle,
    g: ElementCode,
) -> Result<CycloElement, FourierError> {
    let group = bundle.group;
    if !matches!(group, GroupDesc::Heisenberg { .. }) {
        return Err(FourierError::UnsupportedGroup(group));
    }
    let ev = RepEvaluator::new(group, bundle.phase)?;
    let m = bundle
        .get(Irrep::HSchrodinger { c: 1 })
        .ok_or(FourierError::IncompleteBundle(group))?;
    let mut acc = RootSum::new(m.order());
    m.hs_inner_monomial(&ev.value(Irrep::HSchrodinger { c: 1 }, g), &mut acc);
    let p = group.modulus() as i64;
    acc.add_root(0, p * f.marginal()[group.fiber_index(g) as usize]);
    Ok(acc.finish(m.ring()))
}

/// `Σ_π d_π ‖M_π‖²_HS` over a bundle, as a rational integer.
pub fn weighted_norm_sum(bundle: &SpectrumBundle) -> Result<i128, FourierError> {
    let mut sums = RingSums::default();
    for (_, m) in &bundle.coefficients {
        sums.add(&hs_norm_sq_exact(m), m.dim() as i64);
    }
    sums.rational()
}

/// `|G|·Σ_g f(g)² − Σ_π d_π ‖𝐹f(π)‖²_HS` against a given bundle.
pub fn parseval_residual_with(f: &GroupFunction, bundle: &SpectrumBundle) -> Result<i128, FourierError> {
    if f.group != bundle.group {
        return Err(FourierError::GroupMismatch(f.group, bundle.group));
    }
    bundle.check_complete()?;
    Ok(f.group.order() as i128 * f.sum_squares() - weighted_norm_sum(bundle)?)
}

/// `|G|·Σ_g f(g)² − Σ_π d_π ‖𝐹f(π)‖²_HS`; zero for every integer `f`.
pub fn parseval_residual(f: &GroupFunction) -> Result<i128, FourierError> {
    parseval_residual_with(f, &fourier_transform(f, Phase::default())?)
}

/// `E(A,A) = Σ_g r_{AA⁻¹}(g)²` through the spectrum: the coefficient of
/// `1_A * 1_{A⁻¹}` at `π` is `𝐹A(π)𝐹A(π)*`, and Parseval gives
/// `E = |G|⁻¹ Σ_π d_π ‖𝐹A(π)𝐹A(π)*‖²_HS`.
pub fn group_energy_via_fourier(a: &GroupSet) -> Result<u128, FourierError> {
    let f = GroupFunction::indicator(a)?;
    let bundle = fourier_transform(&f, Phase::default())?;
    let mut sums = RingSums::default();
    for (_, m) in &bundle.coefficients {
        let h = m.mul(&m.conj_transpose())?;
        sums.add(&hs_norm_sq_exact(&h), m.dim() as i64);
    }
    let total = sums.rational()?;
    let order = a.group().order() as i128;
    let e = exact_div(ElementCode(0), total, order)?;
    Ok(e as u128)
}
