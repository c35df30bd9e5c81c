//! Arithmetic in the prime field F_p and discrete logarithms to a fixed
//! primitive root.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("zero has no inverse or discrete logarithm in F_{0}")]
    Zero(u64),
    #[error("residue {value} out of range for F_{p}")]
    OutOfRange { value: u64, p: u64 },
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors of `n`, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The field F_p for an odd prime p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p == 2 || !is_prime(p) {
            return Err(FieldError::NotOddPrime(p));
        }
        Ok(Self { p })
    }

    /// Skips the primality check; callers hold a validated modulus.
    #[inline]
    pub(crate) fn new_unchecked(p: u64) -> Self {
        Self { p }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn elem(&self, value: u64) -> Result<FpScalar, FieldError> {
        if value >= self.p {
            return Err(FieldError::OutOfRange { value, p: self.p });
        }
        Ok(FpScalar { value, p: self.p })
    }

    /// Reduces any signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64, FieldError> {
        if a % self.p == 0 {
            return Err(FieldError::Zero(self.p));
        }
        Ok(self.pow(a, self.p - 2))
    }

    /// Multiplicative order of a nonzero residue.
    pub fn order(&self, a: u64) -> Result<u64, FieldError> {
        if a % self.p == 0 {
            return Err(FieldError::Zero(self.p));
        }
        let mut ord = self.p - 1;
        for q in prime_factors(self.p - 1) {
            while ord % q == 0 && self.pow(a, ord / q) == 1 {
                ord /= q;
            }
        }
        Ok(ord)
    }

    /// Smallest generator of F_p^*.
    pub fn primitive_root(&self) -> u64 {
        let factors = prime_factors(self.p - 1);
        (2..self.p)
            .find(|&g| factors.iter().all(|&q| self.pow(g, (self.p - 1) / q) != 1))
            // p = 3 has candidate set {2}; every odd prime has some generator.
            .expect("F_p^* is cyclic")
    }
}

/// Smallest generator of F_p^*.
pub fn primitive_root(p: u64) -> Result<FpScalar, FieldError> {
    let field = PrimeField::new(p)?;
    Ok(FpScalar {
        value: field.primitive_root(),
        p,
    })
}

/// A residue modulo an odd prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpScalar {
    value: u64,
    p: u64,
}

impl FpScalar {
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn inv(&self) -> Result<FpScalar, FieldError> {
        let field = PrimeField { p: self.p };
        Ok(FpScalar {
            value: field.inv(self.value)?,
            p: self.p,
        })
    }

    pub fn pow(&self, exp: u64) -> FpScalar {
        let field = PrimeField { p: self.p };
        FpScalar {
            value: field.pow(self.value, exp),
            p: self.p,
        }
    }

    fn same_field(&self, other: &FpScalar) -> PrimeField {
        assert_eq!(self.p, other.p, "mixed moduli in F_p arithmetic");
        PrimeField { p: self.p }
    }
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FpScalar {
    type Output = FpScalar;
    fn add(self, rhs: FpScalar) -> FpScalar {
        let field = self.same_field(&rhs);
        FpScalar {
            value: field.add(self.value, rhs.value),
            p: self.p,
        }
    }
}

impl Sub for FpScalar {
    type Output = FpScalar;
    fn sub(self, rhs: FpScalar) -> FpScalar {
        let field = self.same_field(&rhs);
        FpScalar {
            value: field.sub(self.value, rhs.value),
            p: self.p,
        }
    }
}

impl Mul for FpScalar {
    type Output = FpScalar;
    fn mul(self, rhs: FpScalar) -> FpScalar {
        let field = self.same_field(&rhs);
        FpScalar {
            value: field.mul(self.value, rhs.value),
            p: self.p,
        }
    }
}

impl Neg for FpScalar {
    type Output = FpScalar;
    fn neg(self) -> FpScalar {
        FpScalar {
            value: PrimeField { p: self.p }.neg(self.value),
            p: self.p,
        }
    }
}

/// Index table for F_p^* relative to the smallest primitive root:
/// `root^ind(x) = x`.
#[derive(Debug, Clone)]
pub struct DiscreteLog {
    field: PrimeField,
    root: u64,
    log: Vec<u64>,
    exp: Vec<u64>,
}

impl DiscreteLog {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        let field = PrimeField::new(p)?;
        let root = field.primitive_root();
        let mut log = vec![0u64; p as usize];
        let mut exp = Vec::with_capacity(p as usize - 1);
        let mut x = 1;
        for k in 0..p - 1 {
            exp.push(x);
            log[x as usize] = k;
            x = field.mul(x, root);
        }
        Ok(Self { field, root, log, exp })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    /// Exponent in `[0, p-1)` of a nonzero residue.
    pub fn ind(&self, x: u64) -> Result<u64, FieldError> {
        let p = self.field.modulus();
        if x >= p {
            return Err(FieldError::OutOfRange { value: x, p });
        }
        if x == 0 {
            return Err(FieldError::Zero(p));
        }
        Ok(self.log[x as usize])
    }

    /// `root^k` for any exponent.
    pub fn root_pow(&self, k: u64) -> u64 {
        self.exp[(k % (self.field.modulus() - 1)) as usize]
    }
}

/// Discrete logarithm of `x` to the smallest primitive root of F_p.
pub fn ind(x: FpScalar) -> Result<u64, FieldError> {
    DiscreteLog::new(x.modulus())?.ind(x.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order_by_exhaustion(p: u64, g: u64) -> u64 {
        let mut x = g % p;
        let mut k = 1;
        while x != 1 {
            x = x * g % p;
            k += 1;
        }
        k
    }

    #[test]
    fn primitive_roots_of_small_primes() {
        assert_eq!(primitive_root(3).unwrap().value(), 2);
        assert_eq!(primitive_root(5).unwrap().value(), 2);
        assert_eq!(primitive_root(7).unwrap().value(), 3);
        // 2 has order 3 mod 7; 3 has order 6.
        assert_eq!(order_by_exhaustion(7, 2), 3);
        assert_eq!(order_by_exhaustion(7, 3), 6);
        for p in [5u64, 7, 11, 13, 101, 1009] {
            let g = primitive_root(p).unwrap().value();
            assert_eq!(order_by_exhaustion(p, g), p - 1, "p = {p}");
            for h in 2..g {
                assert!(order_by_exhaustion(p, h) < p - 1);
            }
        }
    }

    #[test]
    fn rejects_bad_moduli() {
        for m in [0u64, 1, 2, 4, 9, 15, 1001] {
            assert_eq!(primitive_root(m), Err(FieldError::NotOddPrime(m)));
        }
    }

    #[test]
    fn ind_examples_at_seven() {
        let dl = DiscreteLog::new(7).unwrap();
        assert_eq!(dl.root(), 3);
        assert_eq!(dl.ind(1).unwrap(), 0);
        assert_eq!(dl.ind(3).unwrap(), 1);
        assert_eq!(dl.ind(2).unwrap(), 2);
        assert_eq!(dl.ind(0), Err(FieldError::Zero(7)));
    }

    #[test]
    fn ind_is_a_logarithm() {
        for p in [3u64, 5, 7, 11, 13, 31] {
            let dl = DiscreteLog::new(p).unwrap();
            let f = dl.field();
            let mut seen = vec![false; p as usize - 1];
            for x in 1..p {
                let k = dl.ind(x).unwrap();
                assert!(!seen[k as usize]);
                seen[k as usize] = true;
                assert_eq!(f.pow(dl.root(), k), x);
                for y in 1..p {
                    let lhs = dl.ind(f.mul(x, y)).unwrap();
                    assert_eq!(lhs, (k + dl.ind(y).unwrap()) % (p - 1));
                }
            }
        }
    }

    #[test]
    fn scalar_ops() {
        let f = PrimeField::new(7).unwrap();
        let a = f.elem(3).unwrap();
        let b = f.elem(5).unwrap();
        assert_eq!((a + b).value(), 1);
        assert_eq!((a - b).value(), 5);
        assert_eq!((a * b).value(), 1);
        assert_eq!((-a).value(), 4);
        assert_eq!(a.inv().unwrap(), b);
        assert!(f.elem(0).unwrap().inv().is_err());
        assert!(f.elem(7).is_err());
        assert_eq!(f.order(2).unwrap(), 3);
    }
}
