//! Freiman s-homomorphisms and s-isomorphisms between finite subsets of
//! groups, checked by exhaustive enumeration of signed s-fold products.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{ElementCode, GroupDesc, GroupError};

/// Per-sign-pattern cap on `|A|^s`.
pub const TUPLE_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreimanError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("domain has {domain} entries but image has {image}")]
    LengthMismatch { domain: usize, image: usize },
    #[error("domain element {0:?} listed twice")]
    DuplicateDomain(ElementCode),
    #[error("map is not injective: {0:?} has two preimages")]
    NotInjective(ElementCode),
    #[error("s must be at least 2, got {0}")]
    BadOrder(usize),
    #[error("|A|^s = {size}^{s} exceeds {TUPLE_LIMIT}")]
    TooLarge { size: usize, s: usize },
    #[error("maps do not compose: {0:?} is not in the second domain")]
    NotComposable(ElementCode),
    #[error("invalid JSON: {0}")]
    Json(String),
}

/// A map `ρ : A → G₂` given by parallel lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialMap {
    pub source: GroupDesc,
    pub target: GroupDesc,
    pub domain: Vec<ElementCode>,
    pub image: Vec<ElementCode>,
}

impl PartialMap {
    pub fn new(
        source: GroupDesc,
        target: GroupDesc,
        domain: Vec<ElementCode>,
        image: Vec<ElementCode>,
    ) -> Result<Self, FreimanError> {
        let m = Self {
            source,
            target,
            domain,
            image,
        };
        m.validate()?;
        Ok(m)
    }

    /// Builds `ρ` from a function on the domain.
    pub fn from_fn(
        source: GroupDesc,
        target: GroupDesc,
        domain: Vec<ElementCode>,
        f: impl Fn(ElementCode) -> ElementCode,
    ) -> Result<Self, FreimanError> {
        let image = domain.iter().map(|&a| f(a)).collect();
        Self::new(source, target, domain, image)
    }

    pub fn identity(group: GroupDesc, domain: Vec<ElementCode>) -> Result<Self, FreimanError> {
        Self::new(group, group, domain.clone(), domain)
    }

    pub fn validate(&self) -> Result<(), FreimanError> {
        self.source.validate()?;
        self.target.validate()?;
        if self.domain.len() != self.image.len() {
            return Err(FreimanError::LengthMismatch {
                domain: self.domain.len(),
                image: self.image.len(),
            });
        }
        let mut seen = HashSet::with_capacity(self.domain.len());
        for &a in &self.domain {
            self.source.check_code(a)?;
            if !seen.insert(a) {
                return Err(FreimanError::DuplicateDomain(a));
            }
        }
        for &b in &self.image {
            self.target.check_code(b)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn is_injective(&self) -> bool {
        self.first_collision().is_none()
    }

    fn first_collision(&self) -> Option<ElementCode> {
        let mut seen = HashSet::with_capacity(self.image.len());
        self.image.iter().copied().find(|&b| !seen.insert(b))
    }

    /// `ρ⁻¹` on the image.
    pub fn inverse(&self) -> Result<Self, FreimanError> {
        if let Some(b) = self.first_collision() {
            return Err(FreimanError::NotInjective(b));
        }
        Ok(Self {
            source: self.target,
            target: self.source,
            domain: self.image.clone(),
            image: self.domain.clone(),
        })
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &PartialMap) -> Result<Self, FreimanError> {
        let lookup: HashMap<ElementCode, ElementCode> =
            other.domain.iter().copied().zip(other.image.iter().copied()).collect();
        let image = self
            .image
            .iter()
            .map(|b| lookup.get(b).copied().ok_or(FreimanError::NotComposable(*b)))
            .collect::<Result<_, _>>()?;
        Self::new(self.source, other.target, self.domain.clone(), image)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("map serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, FreimanError> {
        let m: Self = serde_json::from_str(s).map_err(|e| FreimanError::Json(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }
}

/// Two domain tuples with equal signed products whose images differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub signs: Vec<i8>,
    pub left: Vec<ElementCode>,
    pub right: Vec<ElementCode>,
}

/// Sign vectors in a fixed order: pattern `k` has `ε_i = −1` iff bit
/// `s−1−i` of `k` is set, so all-plus comes first.
pub fn sign_patterns(s: usize) -> impl Iterator<Item = Vec<i8>> {
    (0u32..1 << s).map(move |k| (0..s).map(|i| if k >> (s - 1 - i) & 1 == 1 { -1 } else { 1 }).collect())
}

fn check_size(n: usize, s: usize) -> Result<(), FreimanError> {
    if s < 2 {
        return Err(FreimanError::BadOrder(s));
    }
    let total = (n as u64).checked_pow(s as u32);
    if total.is_none_or(|t| t > TUPLE_LIMIT) {
        return Err(FreimanError::TooLarge { size: n, s });
    }
    Ok(())
}

/// Scans one sign pattern; tuples are visited in lexicographic order of
/// their domain indices, so the reported pair is the first one found.
fn scan_pattern(rho: &PartialMap, signs: &[i8]) -> Option<Violation> {
    let n = rho.len();
    let s = signs.len();
    let (g1, g2) = (rho.source, rho.target);
    let dom_signed: Vec<Vec<ElementCode>> = signs
        .iter()
        .map(|&e| rho.domain.iter().map(|&a| g1.signed(a, e)).collect())
        .collect();
    let img_signed: Vec<Vec<ElementCode>> = signs
        .iter()
        .map(|&e| rho.image.iter().map(|&b| g2.signed(b, e)).collect())
        .collect();

    // product key -> (image product, first tuple)
    let mut seen: HashMap<ElementCode, (ElementCode, Vec<usize>)> = HashMap::new();
    let mut idx = vec![0usize; s];
    // prefix products, so advancing the last index costs one multiplication
    let mut left = vec![g1.identity(); s + 1];
    let mut right = vec![g2.identity(); s + 1];
    let mut from = 0;
    loop {
        for i in from..s {
            left[i + 1] = g1.mul(left[i], dom_signed[i][idx[i]]);
            right[i + 1] = g2.mul(right[i], img_signed[i][idx[i]]);
        }
        match seen.entry(left[s]) {
            Entry::Vacant(v) => {
                v.insert((right[s], idx.clone()));
            }
            Entry::Occupied(o) => {
                let (img, first) = o.get();
                if *img != right[s] {
                    return Some(Violation {
                        signs: signs.to_vec(),
                        left: first.iter().map(|&i| rho.domain[i]).collect(),
                        right: idx.iter().map(|&i| rho.domain[i]).collect(),
                    });
                }
            }
        }
        // odometer
        let mut pos = s;
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
        }
        from = pos;
    }
}

/// Whether `ρ` is a Freiman s-homomorphism, with the first violation
/// (in sign-pattern order) if not.
pub fn is_freiman_hom(rho: &PartialMap, s: usize) -> Result<(bool, Option<Violation>), FreimanError> {
    rho.validate()?;
    check_size(rho.len(), s)?;
    if rho.is_empty() {
        return Ok((true, None));
    }
    for signs in sign_patterns(s) {
        if let Some(v) = scan_pattern(rho, &signs) {
            return Ok((false, Some(v)));
        }
    }
    Ok((true, None))
}

/// Whether `ρ` and `ρ⁻¹` are both Freiman s-homomorphisms. `ρ` must be
/// injective.
pub fn is_freiman_iso(rho: &PartialMap, s: usize) -> Result<bool, FreimanError> {
    let inv = rho.inverse()?;
    Ok(is_freiman_hom(rho, s)?.0 && is_freiman_hom(&inv, s)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{seq::index::sample, Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn codes(v: &[u64]) -> Vec<ElementCode> {
        v.iter().map(|&c| ElementCode(c)).collect()
    }

    fn z(m: u64) -> GroupDesc {
        GroupDesc::cyclic(m).unwrap()
    }

    /// Literal definition: all pairs of tuples from `A^s × A^s`.
    fn pairwise_oracle(rho: &PartialMap, s: usize) -> bool {
        let n = rho.len();
        let tuples: Vec<Vec<usize>> = (0..n.pow(s as u32))
            .map(|mut t| {
                let mut v = vec![0; s];
                for slot in v.iter_mut().rev() {
                    *slot = t % n;
                    t /= n;
                }
                v
            })
            .collect();
        let prod = |g: GroupDesc, xs: &[ElementCode], t: &[usize], e: &[i8]| {
            t.iter()
                .zip(e)
                .fold(g.identity(), |acc, (&i, &s)| g.mul(acc, g.signed(xs[i], s)))
        };
        sign_patterns(s).all(|e| {
            tuples.iter().all(|a| {
                tuples.iter().all(|b| {
                    prod(rho.source, &rho.domain, a, &e) != prod(rho.source, &rho.domain, b, &e)
                        || prod(rho.target, &rho.image, a, &e) == prod(rho.target, &rho.image, b, &e)
                })
            })
        })
    }

    #[test]
    fn sign_order() {
        let v: Vec<_> = sign_patterns(2).collect();
        assert_eq!(v, vec![vec![1, 1], vec![1, -1], vec![-1, 1], vec![-1, -1]]);
    }

    #[test]
    fn identity_maps() {
        let h = GroupDesc::heisenberg(3, 1).unwrap();
        let rho = PartialMap::identity(h, codes(&[0, 1, 5, 13, 22])).unwrap();
        for s in 2..=4 {
            assert_eq!(is_freiman_hom(&rho, s).unwrap(), (true, None));
            assert!(is_freiman_iso(&rho, s).unwrap());
        }
    }

    #[test]
    fn conjugation_preserves_products() {
        let h = GroupDesc::heisenberg(3, 1).unwrap();
        let g = ElementCode(1 + 3 * 2 + 9);
        let gi = h.inv(g);
        let domain: Vec<_> = h.codes().collect();
        let rho = PartialMap::from_fn(h, h, domain, |a| h.mul(h.mul(g, a), gi)).unwrap();
        assert!(is_freiman_iso(&rho, 2).unwrap());
        let small = PartialMap::from_fn(h, h, codes(&[0, 4, 10, 17, 26]), |a| h.mul(h.mul(g, a), gi)).unwrap();
        for s in 2..=5 {
            assert!(is_freiman_hom(&small, s).unwrap().0);
        }
    }

    #[test]
    fn broken_progression() {
        let rho = PartialMap::new(z(7), z(7), codes(&[0, 1, 2]), codes(&[0, 1, 3])).unwrap();
        let (ok, w) = is_freiman_hom(&rho, 2).unwrap();
        assert!(!ok);
        let w = w.unwrap();
        // 0+2 = 1+1 is caught before the (+,−) pattern
        assert_eq!(w.signs, vec![1, 1]);
        assert_eq!(w.left, codes(&[0, 2]));
        assert_eq!(w.right, codes(&[1, 1]));
        let g = z(7);
        let sum = |t: &[ElementCode]| t.iter().fold(g.identity(), |a, &b| g.mul(a, b));
        assert_eq!(sum(&w.left), sum(&w.right));
        assert!(!is_freiman_iso(&rho, 2).unwrap());
        assert!(!pairwise_oracle(&rho, 2));

        // the (+,−) pattern on its own sees 1−0 = 2−1 against 1−0 ≠ 3−1
        let v = scan_pattern(&rho, &[1, -1]).unwrap();
        let diff = |t: &[ElementCode]| g.mul(t[0], g.inv(t[1]));
        assert_eq!(diff(&v.left), diff(&v.right));
    }

    #[test]
    fn dilation_pair() {
        let rho = PartialMap::new(z(5), z(5), codes(&[0, 1]), codes(&[0, 2])).unwrap();
        assert!(is_freiman_iso(&rho, 2).unwrap());
        assert!(pairwise_oracle(&rho, 2));
    }

    #[test]
    fn rejections() {
        let rho = PartialMap::new(z(5), z(5), codes(&[0, 1]), codes(&[3, 3])).unwrap();
        assert!(!rho.is_injective());
        assert_eq!(is_freiman_iso(&rho, 2), Err(FreimanError::NotInjective(ElementCode(3))));
        assert_eq!(
            PartialMap::new(z(5), z(5), codes(&[1, 1]), codes(&[0, 2])),
            Err(FreimanError::DuplicateDomain(ElementCode(1)))
        );
        assert!(PartialMap::new(z(5), z(5), codes(&[1]), codes(&[0, 2])).is_err());
        assert!(PartialMap::new(z(5), z(5), codes(&[7]), codes(&[0])).is_err());
        assert_eq!(is_freiman_hom(&rho, 1), Err(FreimanError::BadOrder(1)));
        let big: Vec<u64> = (0..101).collect();
        let rho = PartialMap::identity(z(101), codes(&big)).unwrap();
        assert_eq!(is_freiman_hom(&rho, 4), Err(FreimanError::TooLarge { size: 101, s: 4 }));
    }

    #[test]
    fn json_round_trip() {
        let h = GroupDesc::heisenberg(3, 1).unwrap();
        let rho = PartialMap::new(h, z(3), codes(&[0, 9, 10]), codes(&[0, 1, 1])).unwrap();
        let s = rho.to_json();
        assert_eq!(
            s,
            r#"{"source":{"group":"H","p":3,"n":1},"target":{"group":"Z","m":3},"domain":[0,9,10],"image":[0,1,1]}"#
        );
        assert_eq!(PartialMap::from_json(&s).unwrap(), rho);
        assert!(PartialMap::from_json(
            r#"{"source":{"group":"Z","m":3},"target":{"group":"Z","m":3},"domain":[0,0],"image":[1,2]}"#
        )
        .is_err());
    }

    #[test]
    fn hash_check_matches_pairwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for t in 0..150 {
            let m = [5u64, 7, 11][t % 3];
            let n = rng.gen_range(1..=4);
            let s = rng.gen_range(2..=3);
            let dom: Vec<u64> = sample(&mut rng, m as usize, n).into_iter().map(|x| x as u64).collect();
            let img: Vec<u64> = if rng.gen_bool(0.5) {
                let k = rng.gen_range(0..m);
                dom.iter().map(|&x| x * k % m).collect()
            } else {
                (0..n).map(|_| rng.gen_range(0..m)).collect()
            };
            let rho = PartialMap::new(z(m), z(m), codes(&dom), codes(&img)).unwrap();
            assert_eq!(
                is_freiman_hom(&rho, s).unwrap().0,
                pairwise_oracle(&rho, s),
                "{rho:?} s={s}"
            );
        }
    }

    #[test]
    fn larger_instances_run() {
        let h = GroupDesc::heisenberg(5, 1).unwrap();
        let domain: Vec<_> = h.codes().step_by(7).take(20).collect();
        let rho = PartialMap::identity(h, domain).unwrap();
        assert!(is_freiman_hom(&rho, 5).unwrap().0);
    }

    fn cyclic_map() -> impl Strategy<Value = (u64, Vec<u64>, u64, u64)> {
        prop::sample::select(vec![5u64, 7, 11, 13]).prop_flat_map(|m| {
            (
                Just(m),
                prop::collection::btree_set(0..m, 1..=5).prop_map(|s| s.into_iter().collect()),
                1..m,
                1..m,
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn iso_descends_in_s((m, dom, k, _) in cyclic_map(), shift in 0u64..13) {
            // random injective maps, kept when they pass at s = 3
            let img: Vec<u64> = dom.iter().map(|&x| (x * k + shift * (x % 2)) % m).collect();
            let Ok(rho) = PartialMap::new(z(m), z(m), codes(&dom), codes(&img)) else { return Ok(()) };
            if rho.is_injective() && is_freiman_iso(&rho, 3).unwrap() {
                prop_assert!(is_freiman_iso(&rho, 2).unwrap());
            }
        }

        #[test]
        fn homomorphisms_pass((m, dom, k, _) in cyclic_map(), s in 2usize..=4) {
            let rho = PartialMap::new(z(m), z(m), codes(&dom), codes(&dom.iter().map(|&x| x * k % m).collect::<Vec<_>>())).unwrap();
            prop_assert!(is_freiman_hom(&rho, s).unwrap().0);
            // projection H_1(F_p) → Z/p onto the x coordinate
            let h = GroupDesc::heisenberg(m, 1).unwrap();
            let hdom: Vec<ElementCode> = dom.iter().map(|&x| ElementCode(x * m * m + (x * 3 % m) * m + k)).collect();
            let proj = PartialMap::from_fn(h, z(m), hdom, |c| ElementCode(c.0 / (m * m))).unwrap();
            prop_assert!(is_freiman_hom(&proj, s.min(3)).unwrap().0);
        }

        #[test]
        fn composition_of_homs((m, dom, k, l) in cyclic_map(), s in 2usize..=3, noise in 0u64..3) {
            // first map is a dilation plus noise on one point; it may fail
            let mut img: Vec<u64> = dom.iter().map(|&x| x * k % m).collect();
            img[0] = (img[0] + noise) % m;
            let first = PartialMap::new(z(m), z(m), codes(&dom), codes(&img)).unwrap();
            let mut mid: Vec<u64> = img.clone();
            mid.sort_unstable();
            mid.dedup();
            let second = PartialMap::new(z(m), z(m), codes(&mid), codes(&mid.iter().map(|&x| x * l % m).collect::<Vec<_>>())).unwrap();
            let both = first.then(&second).unwrap();
            if is_freiman_hom(&first, s).unwrap().0 && is_freiman_hom(&second, s).unwrap().0 {
                prop_assert!(is_freiman_hom(&both, s).unwrap().0);
            }
        }
    }
}
