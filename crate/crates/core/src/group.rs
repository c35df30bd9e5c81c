//! The Heisenberg groups H_n(F_p), the affine group Aff(F_p) and, for
//! Freiman-map experiments, the cyclic groups Z/m.
//!
//! Every group element has a canonical integer code in `[0, |G|)`:
//!
//! * H_n: `z + p·(y₁ + p·y₂ + …) + p^{n+1}·(x₁ + p·x₂ + …)`
//! * Aff: `b + p·(a − 1)`
//! * Z/m: the residue itself
//!
//! Set-level code works on [`ElementCode`]s through [`GroupDesc`]; the
//! typed elements [`HElement`] and [`AffElement`] carry the coordinates.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldError, PrimeField};
use crate::set::GroupSet;

/// Largest supported Heisenberg dimension.
pub const MAX_HEISENBERG_DIM: usize = 4;

/// Groups larger than this are not enumerated element by element.
pub const ENUMERATION_LIMIT: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("Heisenberg dimension {0} outside 1..={MAX_HEISENBERG_DIM}")]
    UnsupportedDimension(usize),
    #[error("cyclic group order must be positive")]
    EmptyCyclic,
    #[error("element parameters do not match the group: {0}")]
    ParameterMismatch(String),
    #[error("code {code} out of range for a group of order {order}")]
    CodeOutOfRange { code: u64, order: u64 },
    #[error("group of order {order} exceeds the enumeration limit {limit}")]
    TooLarge { order: u64, limit: u64 },
    #[error("operation not defined for {0}")]
    Unsupported(GroupDesc),
}

/// Canonical index of a group element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementCode(pub u64);

/// Identifies one concrete finite group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "group")]
pub enum GroupDesc {
    #[serde(rename = "H")]
    Heisenberg { p: u64, n: usize },
    #[serde(rename = "Aff")]
    Affine { p: u64 },
    #[serde(rename = "Z")]
    Cyclic { m: u64 },
}

impl fmt::Display for GroupDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDesc::Heisenberg { p, n } => write!(f, "H_{n}(F_{p})"),
            GroupDesc::Affine { p } => write!(f, "Aff(F_{p})"),
            GroupDesc::Cyclic { m } => write!(f, "Z/{m}"),
        }
    }
}

/// Coordinates of an H_n element in fixed-size storage for the hot loops.
#[derive(Clone, Copy)]
struct HCoords {
    x: [u64; MAX_HEISENBERG_DIM],
    y: [u64; MAX_HEISENBERG_DIM],
    z: u64,
}

impl GroupDesc {
    pub fn heisenberg(p: u64, n: usize) -> Result<Self, GroupError> {
        PrimeField::new(p)?;
        if n == 0 || n > MAX_HEISENBERG_DIM {
            return Err(GroupError::UnsupportedDimension(n));
        }
        Ok(GroupDesc::Heisenberg { p, n })
    }

    pub fn affine(p: u64) -> Result<Self, GroupError> {
        PrimeField::new(p)?;
        Ok(GroupDesc::Affine { p })
    }

    pub fn cyclic(m: u64) -> Result<Self, GroupError> {
        if m == 0 {
            return Err(GroupError::EmptyCyclic);
        }
        Ok(GroupDesc::Cyclic { m })
    }

    /// Re-checks the parameters of a descriptor built by hand or read from JSON.
    pub fn validate(&self) -> Result<(), GroupError> {
        match *self {
            GroupDesc::Heisenberg { p, n } => Self::heisenberg(p, n).map(|_| ()),
            GroupDesc::Affine { p } => Self::affine(p).map(|_| ()),
            GroupDesc::Cyclic { m } => Self::cyclic(m).map(|_| ()),
        }
    }

    /// The field characteristic for H_n and Aff; the modulus for Z/m.
    pub fn modulus(&self) -> u64 {
        match *self {
            GroupDesc::Heisenberg { p, .. } | GroupDesc::Affine { p } => p,
            GroupDesc::Cyclic { m } => m,
        }
    }

    pub fn order(&self) -> u64 {
        match *self {
            GroupDesc::Heisenberg { p, n } => p.pow(2 * n as u32 + 1),
            GroupDesc::Affine { p } => p * (p - 1),
            GroupDesc::Cyclic { m } => m,
        }
    }

    pub fn is_abelian(&self) -> bool {
        matches!(self, GroupDesc::Cyclic { .. })
    }

    pub fn identity(&self) -> ElementCode {
        match self {
            GroupDesc::Heisenberg { .. } | GroupDesc::Cyclic { .. } => ElementCode(0),
            // (1, 0) ↦ 0 + p·0
            GroupDesc::Affine { .. } => ElementCode(0),
        }
    }

    #[inline]
    pub fn contains(&self, code: ElementCode) -> bool {
        code.0 < self.order()
    }

    pub fn check_code(&self, code: ElementCode) -> Result<(), GroupError> {
        if self.contains(code) {
            Ok(())
        } else {
            Err(GroupError::CodeOutOfRange {
                code: code.0,
                order: self.order(),
            })
        }
    }

    /// Iterator over all element codes.
    pub fn codes(&self) -> impl Iterator<Item = ElementCode> {
        (0..self.order()).map(ElementCode)
    }

    #[inline]
    fn h_split(p: u64, n: usize, code: u64) -> HCoords {
        let mut c = HCoords {
            x: [0; MAX_HEISENBERG_DIM],
            y: [0; MAX_HEISENBERG_DIM],
            z: code % p,
        };
        let mut rest = code / p;
        for i in 0..n {
            c.y[i] = rest % p;
            rest /= p;
        }
        for i in 0..n {
            c.x[i] = rest % p;
            rest /= p;
        }
        c
    }

    #[inline]
    fn h_join(p: u64, n: usize, c: &HCoords) -> u64 {
        let mut code = 0;
        for i in (0..n).rev() {
            code = code * p + c.x[i];
        }
        for i in (0..n).rev() {
            code = code * p + c.y[i];
        }
        code * p + c.z
    }

    #[inline]
    fn h_mul_coords(p: u64, n: usize, a: &HCoords, b: &HCoords) -> HCoords {
        let mut out = HCoords {
            x: [0; MAX_HEISENBERG_DIM],
            y: [0; MAX_HEISENBERG_DIM],
            z: 0,
        };
        let mut z = a.z + b.z;
        for i in 0..n {
            out.x[i] = (a.x[i] + b.x[i]) % p;
            out.y[i] = (a.y[i] + b.y[i]) % p;
            z += a.x[i] * b.y[i] % p;
        }
        out.z = z % p;
        out
    }

    /// Product of two elements given by code.
    #[inline]
    pub fn mul(&self, a: ElementCode, b: ElementCode) -> ElementCode {
        match *self {
            GroupDesc::Heisenberg { p, n } => {
                if n == 1 {
                    // [x,y,z]·[x',y',z'] with code z + p·y + p²·x
                    let (az, ay, ax) = (a.0 % p, (a.0 / p) % p, a.0 / (p * p));
                    let (bz, by, bx) = (b.0 % p, (b.0 / p) % p, b.0 / (p * p));
                    let z = (az + bz + ax * by) % p;
                    return ElementCode(z + p * ((ay + by) % p) + p * p * ((ax + bx) % p));
                }
                let ca = Self::h_split(p, n, a.0);
                let cb = Self::h_split(p, n, b.0);
                ElementCode(Self::h_join(p, n, &Self::h_mul_coords(p, n, &ca, &cb)))
            }
            GroupDesc::Affine { p } => {
                let (a1, b1) = (a.0 / p + 1, a.0 % p);
                let (a2, b2) = (b.0 / p + 1, b.0 % p);
                let aa = a1 * a2 % p;
                let bb = (a1 * b2 + b1) % p;
                ElementCode(bb + p * (aa - 1))
            }
            GroupDesc::Cyclic { m } => ElementCode((a.0 + b.0) % m),
        }
    }

    #[inline]
    pub fn inv(&self, a: ElementCode) -> ElementCode {
        match *self {
            GroupDesc::Heisenberg { p, n } => {
                let c = Self::h_split(p, n, a.0);
                let mut out = c;
                let mut xy = 0;
                for i in 0..n {
                    out.x[i] = (p - c.x[i]) % p;
                    out.y[i] = (p - c.y[i]) % p;
                    xy += c.x[i] * c.y[i] % p;
                }
                out.z = (p - c.z + xy % p) % p;
                ElementCode(Self::h_join(p, n, &out))
            }
            GroupDesc::Affine { p } => {
                let field = PrimeField::new_unchecked(p);
                let (x, y) = (a.0 / p + 1, a.0 % p);
                let xi = field.inv(x).expect("affine scale is nonzero");
                let b = field.neg(field.mul(xi, y));
                ElementCode(b + p * (xi - 1))
            }
            GroupDesc::Cyclic { m } => ElementCode((m - a.0 % m) % m),
        }
    }

    /// `a b a⁻¹ b⁻¹`.
    pub fn commutator(&self, a: ElementCode, b: ElementCode) -> ElementCode {
        let ab = self.mul(a, b);
        let ai_bi = self.mul(self.inv(a), self.inv(b));
        self.mul(ab, ai_bi)
    }

    /// `a^{sign}` for `sign = ±1`.
    #[inline]
    pub fn signed(&self, a: ElementCode, sign: i8) -> ElementCode {
        if sign < 0 {
            self.inv(a)
        } else {
            a
        }
    }

    pub fn decode(&self, code: ElementCode) -> Result<GroupElement, GroupError> {
        self.check_code(code)?;
        Ok(match *self {
            GroupDesc::Heisenberg { p, n } => {
                let c = Self::h_split(p, n, code.0);
                GroupElement::H(HElement {
                    x: c.x[..n].to_vec(),
                    y: c.y[..n].to_vec(),
                    z: c.z,
                })
            }
            GroupDesc::Affine { p } => GroupElement::Aff(AffElement {
                a: code.0 / p + 1,
                b: code.0 % p,
            }),
            GroupDesc::Cyclic { .. } => GroupElement::Cyclic(code.0),
        })
    }

    pub fn encode(&self, g: &GroupElement) -> Result<ElementCode, GroupError> {
        match (*self, g) {
            (GroupDesc::Heisenberg { p, n }, GroupElement::H(h)) => {
                check_h(p, n, h)?;
                let mut c = HCoords {
                    x: [0; MAX_HEISENBERG_DIM],
                    y: [0; MAX_HEISENBERG_DIM],
                    z: h.z,
                };
                c.x[..n].copy_from_slice(&h.x);
                c.y[..n].copy_from_slice(&h.y);
                Ok(ElementCode(Self::h_join(p, n, &c)))
            }
            (GroupDesc::Affine { p }, GroupElement::Aff(g)) => {
                check_aff(p, g)?;
                Ok(ElementCode(g.b + p * (g.a - 1)))
            }
            (GroupDesc::Cyclic { m }, GroupElement::Cyclic(v)) if *v < m => Ok(ElementCode(*v)),
            (desc, g) => Err(GroupError::ParameterMismatch(format!("{g:?} is not in {desc}"))),
        }
    }

    /// Heisenberg coordinates `(x, y)` packed as `Y + p^n·X`, the index of
    /// the coset `[x, y, F_p]`. For Aff, the scale `a` packed as `a − 1`.
    pub fn fiber_index(&self, code: ElementCode) -> u64 {
        match *self {
            GroupDesc::Heisenberg { p, .. } => code.0 / p,
            GroupDesc::Affine { p } => code.0 / p,
            GroupDesc::Cyclic { .. } => 0,
        }
    }

    /// The central coordinate of an H_n element, the translation part of an
    /// Aff element.
    pub fn line_coordinate(&self, code: ElementCode) -> u64 {
        match *self {
            GroupDesc::Heisenberg { p, .. } | GroupDesc::Affine { p } => code.0 % p,
            GroupDesc::Cyclic { .. } => code.0,
        }
    }

    /// Number of cosets of the center line (H_n) or of U (Aff).
    pub fn fiber_count(&self) -> u64 {
        self.order() / self.modulus().max(1)
    }

    /// Whether `code` lies on the distinguished line: the center
    /// `[0,0,F_p]` of H_n or the unipotent subgroup `(1,F_p)` of Aff.
    /// Both have codes `0..p`.
    pub fn on_center_line(&self, code: ElementCode) -> bool {
        match *self {
            GroupDesc::Heisenberg { p, .. } | GroupDesc::Affine { p } => code.0 < p,
            GroupDesc::Cyclic { .. } => false,
        }
    }
}

fn check_h(p: u64, n: usize, h: &HElement) -> Result<(), GroupError> {
    if h.x.len() != n || h.y.len() != n {
        return Err(GroupError::ParameterMismatch(format!(
            "expected vectors of length {n}, got {} and {}",
            h.x.len(),
            h.y.len()
        )));
    }
    for &v in h.x.iter().chain(&h.y).chain(std::iter::once(&h.z)) {
        if v >= p {
            return Err(FieldError::OutOfRange { value: v, p }.into());
        }
    }
    Ok(())
}

fn check_aff(p: u64, g: &AffElement) -> Result<(), GroupError> {
    if g.a == 0 || g.a >= p {
        return Err(GroupError::ParameterMismatch(format!(
            "affine scale {} must lie in F_{p}^*",
            g.a
        )));
    }
    if g.b >= p {
        return Err(FieldError::OutOfRange { value: g.b, p }.into());
    }
    Ok(())
}

/// `[x, y, z] ∈ H_n(F_p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HElement {
    pub x: Vec<u64>,
    pub y: Vec<u64>,
    pub z: u64,
}

/// `(a, b) ∈ Aff(F_p)`, the map `t ↦ a·t + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AffElement {
    pub a: u64,
    pub b: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupElement {
    H(HElement),
    Aff(AffElement),
    Cyclic(u64),
}

/// Typed arithmetic in H_n(F_p).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Heisenberg {
    field: PrimeField,
    n: usize,
}

impl Heisenberg {
    pub fn new(p: u64, n: usize) -> Result<Self, GroupError> {
        GroupDesc::heisenberg(p, n)?;
        Ok(Self {
            field: PrimeField::new(p)?,
            n,
        })
    }

    pub fn desc(&self) -> GroupDesc {
        GroupDesc::Heisenberg {
            p: self.field.modulus(),
            n: self.n,
        }
    }

    pub fn p(&self) -> u64 {
        self.field.modulus()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn element(&self, x: Vec<u64>, y: Vec<u64>, z: u64) -> Result<HElement, GroupError> {
        let h = HElement { x, y, z };
        check_h(self.p(), self.n, &h)?;
        Ok(h)
    }

    pub fn identity(&self) -> HElement {
        HElement {
            x: vec![0; self.n],
            y: vec![0; self.n],
            z: 0,
        }
    }

    fn dot(&self, u: &[u64], v: &[u64]) -> u64 {
        u.iter()
            .zip(v)
            .fold(0, |acc, (&a, &b)| self.field.add(acc, self.field.mul(a, b)))
    }

    /// `[x+x', y+y', z+z'+x·y']`.
    pub fn mul(&self, g: &HElement, h: &HElement) -> Result<HElement, GroupError> {
        check_h(self.p(), self.n, g)?;
        check_h(self.p(), self.n, h)?;
        let f = &self.field;
        Ok(HElement {
            x: g.x.iter().zip(&h.x).map(|(&a, &b)| f.add(a, b)).collect(),
            y: g.y.iter().zip(&h.y).map(|(&a, &b)| f.add(a, b)).collect(),
            z: f.add(f.add(g.z, h.z), self.dot(&g.x, &h.y)),
        })
    }

    /// `[-x, -y, -z + x·y]`.
    pub fn inv(&self, g: &HElement) -> HElement {
        let f = &self.field;
        HElement {
            x: g.x.iter().map(|&a| f.neg(a)).collect(),
            y: g.y.iter().map(|&a| f.neg(a)).collect(),
            z: f.add(f.neg(g.z), self.dot(&g.x, &g.y)),
        }
    }

    /// `[0, 0, x·y' − y·x']`.
    pub fn commutator(&self, g: &HElement, h: &HElement) -> Result<HElement, GroupError> {
        check_h(self.p(), self.n, g)?;
        check_h(self.p(), self.n, h)?;
        let z = self.field.sub(self.dot(&g.x, &h.y), self.dot(&g.y, &h.x));
        Ok(HElement { z, ..self.identity() })
    }

    pub fn encode(&self, g: &HElement) -> Result<ElementCode, GroupError> {
        self.desc().encode(&GroupElement::H(g.clone()))
    }

    pub fn decode(&self, code: ElementCode) -> Result<HElement, GroupError> {
        match self.desc().decode(code)? {
            GroupElement::H(h) => Ok(h),
            _ => unreachable!(),
        }
    }
}

/// Typed arithmetic in Aff(F_p).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Affine {
    field: PrimeField,
}

impl Affine {
    pub fn new(p: u64) -> Result<Self, GroupError> {
        Ok(Self {
            field: PrimeField::new(p)?,
        })
    }

    pub fn desc(&self) -> GroupDesc {
        GroupDesc::Affine {
            p: self.field.modulus(),
        }
    }

    pub fn p(&self) -> u64 {
        self.field.modulus()
    }

    pub fn element(&self, a: u64, b: u64) -> Result<AffElement, GroupError> {
        let g = AffElement { a, b };
        check_aff(self.p(), &g)?;
        Ok(g)
    }

    pub fn identity(&self) -> AffElement {
        AffElement { a: 1, b: 0 }
    }

    /// `(a,b)·(c,d) = (ac, ad + b)`.
    pub fn mul(&self, g: &AffElement, h: &AffElement) -> AffElement {
        let f = &self.field;
        AffElement {
            a: f.mul(g.a, h.a),
            b: f.add(f.mul(g.a, h.b), g.b),
        }
    }

    /// `(a⁻¹, −a⁻¹·b)`.
    pub fn inv(&self, g: &AffElement) -> AffElement {
        let f = &self.field;
        let ai = f.inv(g.a).expect("affine scale is nonzero");
        AffElement {
            a: ai,
            b: f.neg(f.mul(ai, g.b)),
        }
    }

    /// `(1, y(1 − x') − y'(1 − x))` for `g = (x, y)`, `h = (x', y')`.
    pub fn commutator(&self, g: &AffElement, h: &AffElement) -> AffElement {
        let f = &self.field;
        let left = f.mul(g.b, f.sub(1, h.a));
        let right = f.mul(h.b, f.sub(1, g.a));
        AffElement {
            a: 1,
            b: f.sub(left, right),
        }
    }

    pub fn encode(&self, g: &AffElement) -> Result<ElementCode, GroupError> {
        self.desc().encode(&GroupElement::Aff(*g))
    }

    pub fn decode(&self, code: ElementCode) -> Result<AffElement, GroupError> {
        match self.desc().decode(code)? {
            GroupElement::Aff(g) => Ok(g),
            _ => unreachable!(),
        }
    }
}

fn check_enumerable(desc: &GroupDesc, limit: u64) -> Result<(), GroupError> {
    let order = desc.order();
    if order > limit {
        return Err(GroupError::TooLarge { order, limit });
    }
    Ok(())
}

/// All elements commuting with `g`, by enumeration of the group.
pub fn centralizer(desc: &GroupDesc, g: ElementCode) -> Result<GroupSet, GroupError> {
    check_enumerable(desc, ENUMERATION_LIMIT)?;
    desc.check_code(g)?;
    let members = desc.codes().filter(|&h| desc.mul(g, h) == desc.mul(h, g));
    Ok(GroupSet::from_codes_unchecked(*desc, members))
}

/// Closed-form centralizers: `{[x,y,z] : x·y₀ = x₀·y}` in H_n; in Aff the
/// whole group for the identity, U for nontrivial unipotents, and
/// `Stab(y(1−x)⁻¹) = {(a, x₀(1−a))}` otherwise.
pub fn centralizer_closed_form(desc: &GroupDesc, g: ElementCode) -> Result<GroupSet, GroupError> {
    check_enumerable(desc, ENUMERATION_LIMIT)?;
    desc.check_code(g)?;
    match *desc {
        GroupDesc::Heisenberg { p, n } => {
            let h = Heisenberg::new(p, n)?;
            let g0 = h.decode(g)?;
            let members = desc.codes().filter(|&c| {
                let e = h.decode(c).expect("in range");
                h.dot(&e.x, &g0.y) == h.dot(&g0.x, &e.y)
            });
            Ok(GroupSet::from_codes_unchecked(*desc, members))
        }
        GroupDesc::Affine { p } => {
            let aff = Affine::new(p)?;
            let f = PrimeField::new(p)?;
            let AffElement { a: x, b: y } = aff.decode(g)?;
            let members: Vec<ElementCode> = if x == 1 && y == 0 {
                desc.codes().collect()
            } else if x == 1 {
                (0..p).map(|b| aff.encode(&AffElement { a: 1, b }).unwrap()).collect()
            } else {
                let x0 = f.mul(y, f.inv(f.sub(1, x))?);
                (1..p)
                    .map(|a| {
                        aff.encode(&AffElement {
                            a,
                            b: f.mul(x0, f.sub(1, a)),
                        })
                        .unwrap()
                    })
                    .collect()
            };
            Ok(GroupSet::from_codes_unchecked(*desc, members))
        }
        GroupDesc::Cyclic { .. } => Ok(GroupSet::from_codes_unchecked(*desc, desc.codes())),
    }
}

/// Number of conjugacy classes, by orbit enumeration.
pub fn conjugacy_class_count(desc: &GroupDesc) -> Result<u64, GroupError> {
    check_enumerable(desc, 1 << 20)?;
    let order = desc.order() as usize;
    let mut seen = fixedbitset::FixedBitSet::with_capacity(order);
    let inverses: Vec<ElementCode> = desc.codes().map(|h| desc.inv(h)).collect();
    let mut classes = 0;
    for g in desc.codes() {
        if seen.contains(g.0 as usize) {
            continue;
        }
        classes += 1;
        for h in desc.codes() {
            let conj = desc.mul(desc.mul(h, g), inverses[h.0 as usize]);
            seen.insert(conj.0 as usize);
        }
    }
    Ok(classes)
}
