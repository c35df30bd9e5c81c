//! Exact arithmetic in the cyclotomic ring Z[ζ_m].
//!
//! Elements are stored in the power basis `1, ζ, …, ζ^{φ(m)-1}`, reduced
//! modulo the cyclotomic polynomial Φ_m. For a prime `m = p` this is the
//! basis `1, ζ, …, ζ^{p-2}` with `ζ^{p-1} = -(1 + ζ + … + ζ^{p-2})`, and
//! equality of coefficient vectors is equality in the ring.
//!
//! Coefficients are `i64` with checked arithmetic; overflow aborts.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycloError {
    #[error("cyclotomic order mismatch: Z[ζ_{0}] vs Z[ζ_{1}]")]
    OrderMismatch(u32, u32),
    #[error("cyclotomic order must be positive")]
    ZeroOrder,
}

#[inline]
fn ck_add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("cyclotomic coefficient overflow")
}

#[inline]
fn ck_mul(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("cyclotomic coefficient overflow")
}

/// Z[ζ_m] together with the coefficients of Φ_m (monic, lowest degree first).
#[derive(Debug, PartialEq, Eq)]
pub struct CycloRing {
    order: u32,
    phi: Vec<i64>,
}

impl CycloRing {
    /// Shared ring of order `m`; rings are cached per order.
    pub fn get(order: u32) -> Result<Arc<CycloRing>, CycloError> {
        if order == 0 {
            return Err(CycloError::ZeroOrder);
        }
        static CACHE: OnceLock<Mutex<HashMap<u32, Arc<CycloRing>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("cyclotomic ring cache poisoned");
        let ring = guard.entry(order).or_insert_with(|| {
            Arc::new(CycloRing {
                order,
                phi: cyclotomic_polynomial(order),
            })
        });
        Ok(Arc::clone(ring))
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.order
    }

    /// φ(m), the number of basis coefficients.
    #[inline]
    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn minimal_polynomial(&self) -> &[i64] {
        &self.phi
    }

    /// Reduces a polynomial in ζ (any length) modulo Φ_m, in place, and
    /// truncates it to the canonical length.
    fn reduce(&self, poly: &mut Vec<i64>) {
        let deg = self.degree();
        if poly.len() > deg {
            for k in (deg..poly.len()).rev() {
                let c = poly[k];
                if c == 0 {
                    continue;
                }
                poly[k] = 0;
                for j in 0..deg {
                    let t = ck_mul(c, self.phi[j]);
                    poly[k - deg + j] = poly[k - deg + j]
                        .checked_sub(t)
                        .expect("cyclotomic coefficient overflow");
                }
            }
        }
        poly.resize(deg, 0);
    }
}

/// Φ_m by exact division of `x^m - 1` by Φ_d over the proper divisors d.
fn cyclotomic_polynomial(m: u32) -> Vec<i64> {
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m % d == 0 {
            num = divide_monic(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

fn divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; num.len() - dn];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dn];
        quot[k] = c;
        for j in 0..=dn {
            rem[k + j] -= c * den[j];
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// An element of Z[ζ_m] in canonical form.
#[derive(Clone)]
pub struct CycloElement {
    ring: Arc<CycloRing>,
    coeffs: Vec<i64>,
}

impl PartialEq for CycloElement {
    fn eq(&self, other: &Self) -> bool {
        self.ring.order == other.ring.order && self.coeffs == other.coeffs
    }
}

impl Eq for CycloElement {}

impl fmt::Debug for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[ζ_{}]{:?}", self.ring.order, self.coeffs)
    }
}

impl fmt::Display for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "{}", if c < 0 { " - " } else { " + " })?;
            } else if c < 0 {
                write!(f, "-")?;
            }
            first = false;
            let a = c.unsigned_abs();
            match (k, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => write!(f, "ζ")?,
                (1, _) => write!(f, "{a}ζ")?,
                (_, 1) => write!(f, "ζ^{k}")?,
                _ => write!(f, "{a}ζ^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl CycloElement {
    pub fn zero(ring: &Arc<CycloRing>) -> Self {
        Self {
            ring: Arc::clone(ring),
            coeffs: vec![0; ring.degree()],
        }
    }

    pub fn from_integer(ring: &Arc<CycloRing>, n: i64) -> Self {
        let mut e = Self::zero(ring);
        if let Some(c) = e.coeffs.first_mut() {
            *c = n;
        } else {
            unreachable!("every cyclotomic ring has degree at least one");
        }
        e
    }

    pub fn one(ring: &Arc<CycloRing>) -> Self {
        Self::from_integer(ring, 1)
    }

    /// ζ^k for any integer exponent.
    pub fn root_power(ring: &Arc<CycloRing>, k: i64) -> Self {
        let m = ring.order as i64;
        let mut counts = vec![0i64; ring.order as usize];
        counts[k.rem_euclid(m) as usize] = 1;
        Self::from_exponent_counts(ring, counts)
    }

    /// Builds `Σ_k counts[k] ζ^k` from a vector of length `m`.
    pub fn from_exponent_counts(ring: &Arc<CycloRing>, mut counts: Vec<i64>) -> Self {
        debug_assert_eq!(counts.len(), ring.order as usize);
        ring.reduce(&mut counts);
        Self {
            ring: Arc::clone(ring),
            coeffs: counts,
        }
    }

    /// Builds an element from power-basis coefficients of any length.
    pub fn from_coeffs(ring: &Arc<CycloRing>, mut coeffs: Vec<i64>) -> Self {
        ring.reduce(&mut coeffs);
        Self {
            ring: Arc::clone(ring),
            coeffs,
        }
    }

    pub fn ring(&self) -> &Arc<CycloRing> {
        &self.ring
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.ring.order
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// The rational integer this element equals, if it is one.
    pub fn as_integer(&self) -> Option<i64> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }

    fn check(&self, other: &Self) -> Result<(), CycloError> {
        if self.ring.order != other.ring.order {
            return Err(CycloError::OrderMismatch(self.ring.order, other.ring.order));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, CycloError> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ck_add(a, b))
            .collect();
        Ok(Self {
            ring: Arc::clone(&self.ring),
            coeffs,
        })
    }

    pub fn add_assign_ref(&mut self, other: &Self) {
        assert_eq!(self.order(), other.order(), "cyclotomic order mismatch");
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = ck_add(*a, b);
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, CycloError> {
        self.check(other)?;
        let d = self.ring.degree();
        let mut prod = vec![0i64; 2 * d - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b != 0 {
                    prod[i + j] = ck_add(prod[i + j], ck_mul(a, b));
                }
            }
        }
        self.ring.reduce(&mut prod);
        Ok(Self {
            ring: Arc::clone(&self.ring),
            coeffs: prod,
        })
    }

    pub fn scale(&self, k: i64) -> Self {
        Self {
            ring: Arc::clone(&self.ring),
            coeffs: self.coeffs.iter().map(|&c| ck_mul(c, k)).collect(),
        }
    }

    /// Multiplies by ζ^k.
    pub fn mul_root(&self, k: i64) -> Self {
        let m = self.ring.order as usize;
        let shift = k.rem_euclid(m as i64) as usize;
        let mut counts = vec![0i64; m];
        for (i, &c) in self.coeffs.iter().enumerate() {
            counts[(i + shift) % m] = c;
        }
        Self::from_exponent_counts(&self.ring, counts)
    }

    /// Image under the ring automorphism ζ ↦ ζ^c (c coprime to m).
    pub fn galois(&self, c: i64) -> Self {
        let m = self.ring.order as i64;
        let mut counts = vec![0i64; m as usize];
        for (i, &a) in self.coeffs.iter().enumerate() {
            let k = (i as i64 * c).rem_euclid(m) as usize;
            counts[k] = ck_add(counts[k], a);
        }
        Self::from_exponent_counts(&self.ring, counts)
    }

    /// Complex conjugate: ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// `a · ā`, the exact squared modulus under every complex embedding
    /// that sends ζ to a primitive root of unity.
    pub fn conj_normsq(&self) -> Self {
        self.try_mul(&self.conj()).expect("conjugate lives in the same ring")
    }

    /// Evaluates at ζ = e^{2πi/m}.
    pub fn to_complex(&self) -> Complex64 {
        let m = self.ring.order as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| Complex64::from_polar(c as f64, 2.0 * PI * k as f64 / m))
            .sum()
    }

    pub fn max_abs_coeff(&self) -> i64 {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

impl Add for &CycloElement {
    type Output = CycloElement;
    fn add(self, rhs: &CycloElement) -> CycloElement {
        self.try_add(rhs).expect("cyclotomic order mismatch")
    }
}

impl Sub for &CycloElement {
    type Output = CycloElement;
    fn sub(self, rhs: &CycloElement) -> CycloElement {
        self.try_add(&-rhs).expect("cyclotomic order mismatch")
    }
}

impl Mul for &CycloElement {
    type Output = CycloElement;
    fn mul(self, rhs: &CycloElement) -> CycloElement {
        self.try_mul(rhs).expect("cyclotomic order mismatch")
    }
}

impl Neg for &CycloElement {
    type Output = CycloElement;
    fn neg(self) -> CycloElement {
        self.scale(-1)
    }
}

/// Product in Z[ζ_m]; fails when the operands live in different rings.
pub fn cyclo_mul(a: &CycloElement, b: &CycloElement) -> Result<CycloElement, CycloError> {
    a.try_mul(b)
}

pub fn cyclo_conj_normsq(a: &CycloElement) -> CycloElement {
    a.conj_normsq()
}

pub fn cyclo_to_complex(a: &CycloElement) -> Complex64 {
    a.to_complex()
}

/// Accumulator over the exponent basis `ζ^0, …, ζ^{m-1}` of Z[x]/(x^m - 1),
/// reduced to canonical form only once at the end. Sums of scaled roots of
/// unity (Fourier coefficients) are built this way.
#[derive(Debug, Clone)]
pub struct RootSum {
    counts: Vec<i64>,
}

impl RootSum {
    pub fn new(order: u32) -> Self {
        Self {
            counts: vec![0; order as usize],
        }
    }

    /// Adds `weight · ζ^k`; `k` is taken mod m.
    #[inline]
    pub fn add_root(&mut self, k: u64, weight: i64) {
        let m = self.counts.len() as u64;
        let slot = &mut self.counts[(k % m) as usize];
        *slot = ck_add(*slot, weight);
    }

    /// Adds `weight · ζ^shift · e` for a canonical element `e`.
    pub fn add_shifted(&mut self, e: &CycloElement, shift: u64, weight: i64) {
        let m = self.counts.len() as u64;
        for (i, &c) in e.coeffs().iter().enumerate() {
            if c != 0 {
                let slot = &mut self.counts[((i as u64 + shift) % m) as usize];
                *slot = ck_add(*slot, ck_mul(c, weight));
            }
        }
    }

    pub fn finish(self, ring: &Arc<CycloRing>) -> CycloElement {
        CycloElement::from_exponent_counts(ring, self.counts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(m: u32) -> Arc<CycloRing> {
        CycloRing::get(m).unwrap()
    }

    #[test]
    fn minimal_polynomials() {
        assert_eq!(ring(1).minimal_polynomial(), &[-1, 1]);
        assert_eq!(ring(2).minimal_polynomial(), &[1, 1]);
        assert_eq!(ring(3).minimal_polynomial(), &[1, 1, 1]);
        assert_eq!(ring(4).minimal_polynomial(), &[1, 0, 1]);
        assert_eq!(ring(6).minimal_polynomial(), &[1, -1, 1]);
        assert_eq!(ring(12).minimal_polynomial(), &[1, 0, -1, 0, 1]);
        assert_eq!(ring(5).degree(), 4);
        assert_eq!(ring(30).degree(), 8);
    }

    #[test]
    fn multiplication_examples() {
        let r3 = ring(3);
        let z = CycloElement::root_power(&r3, 1);
        assert_eq!((&z * &z).coeffs(), &[-1, -1]);
        let x = CycloElement::from_coeffs(&r3, vec![4, -7]);
        assert_eq!(&CycloElement::one(&r3) * &x, x);

        let r5 = ring(5);
        let a = CycloElement::root_power(&r5, 2);
        let b = CycloElement::root_power(&r5, 3);
        assert_eq!(&a * &b, CycloElement::one(&r5));
        assert_eq!(cyclo_mul(&a, &z), Err(CycloError::OrderMismatch(5, 3)));
    }

    #[test]
    fn conj_normsq_examples() {
        let r3 = ring(3);
        assert!(CycloElement::zero(&r3).conj_normsq().is_zero());
        for k in 0..7 {
            let u = CycloElement::root_power(&ring(7), k);
            assert_eq!(u.conj_normsq().as_integer(), Some(1));
        }
        let one_plus_zeta = CycloElement::from_coeffs(&r3, vec![1, 1]);
        assert_eq!(cyclo_conj_normsq(&one_plus_zeta).as_integer(), Some(1));
    }

    #[test]
    fn complex_embedding() {
        let r5 = ring(5);
        assert_eq!(CycloElement::zero(&r5).to_complex(), Complex64::new(0.0, 0.0));
        let one = CycloElement::one(&r5).to_complex();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let full = CycloElement::from_coeffs(&r5, vec![1, 1, 1, 1, 1]);
        assert!(full.is_zero());
        // Unreduced evaluation of the full character sum.
        let raw: Complex64 = (0..5)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 5.0))
            .sum();
        assert!(raw.norm() < 1e-12);
        assert!(cyclo_to_complex(&full).norm() < 1e-12);
    }

    #[test]
    fn galois_and_roots() {
        let r7 = ring(7);
        let z = CycloElement::root_power(&r7, 1);
        assert_eq!(z.galois(3), CycloElement::root_power(&r7, 3));
        assert_eq!(z.mul_root(6), CycloElement::one(&r7));
        assert_eq!(z.conj(), CycloElement::root_power(&r7, -1));
        // Trace of ζ over Q(ζ_7) is -1.
        let mut tr = CycloElement::zero(&r7);
        for c in 1..7 {
            tr.add_assign_ref(&z.galois(c));
        }
        assert_eq!(tr.as_integer(), Some(-1));
    }

    #[test]
    fn root_sum_matches_direct() {
        let r6 = ring(6);
        let mut acc = RootSum::new(6);
        acc.add_root(1, 2);
        acc.add_root(7, 1);
        acc.add_root(3, -1);
        let direct = &CycloElement::root_power(&r6, 1).scale(3) - &CycloElement::root_power(&r6, 3);
        assert_eq!(acc.finish(&r6), direct);
        // ζ_6^3 = -1
        assert_eq!(CycloElement::root_power(&r6, 3).as_integer(), Some(-1));
    }

    fn random_element(rng: &mut rand_chacha::ChaCha8Rng, r: &Arc<CycloRing>, bound: i64) -> CycloElement {
        use rand::Rng;
        CycloElement::from_coeffs(r, (0..r.degree()).map(|_| rng.gen_range(-bound..=bound)).collect())
    }

    #[test]
    fn ring_laws_on_random_pairs() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for p in [3u32, 5, 7, 11, 13] {
            let r = ring(p);
            for _ in 0..100_000 {
                let a = random_element(&mut rng, &r, 50);
                let b = random_element(&mut rng, &r, 50);
                let c = random_element(&mut rng, &r, 50);
                assert_eq!(&a * &b, &b * &a);
                assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            }
        }
    }

    #[test]
    fn complex_embedding_is_a_homomorphism() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(22);
        for p in [3u32, 5, 7, 11, 13] {
            let r = ring(p);
            for _ in 0..10_000 {
                let a = random_element(&mut rng, &r, 100);
                let b = random_element(&mut rng, &r, 100);
                let (ca, cb) = (a.to_complex(), b.to_complex());
                assert!(((&a + &b).to_complex() - (ca + cb)).norm() < 1e-9);
                assert!(((&a * &b).to_complex() - ca * cb).norm() < 1e-9);
            }
        }
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn overflow_aborts() {
        let r3 = ring(3);
        let big = CycloElement::from_integer(&r3, i64::MAX / 2);
        let _ = big.scale(4);
    }
}
