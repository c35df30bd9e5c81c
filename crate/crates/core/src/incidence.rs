//! Point–line incidences in F_p² and point–plane incidences in F_p³,
//! with checkers for the constant-free bounds and reports for the rest.

use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;
use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::energy::FpSet;
use crate::field::{FieldError, PrimeField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IncidenceError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("objects live over different primes: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("the zero vector does not define a plane")]
    DegeneratePlane,
    #[error("line weights have length {got}, expected {expected}")]
    WeightLength { expected: usize, got: usize },
    #[error("neither weight family sums to zero")]
    NotMeanZero,
    #[error("{points} points exceed {planes} planes")]
    TooManyPoints { points: usize, planes: usize },
}

/// A line in F_p²: `y = mx + c`, or the vertical line `x = c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Line {
    Graph { slope: u64, intercept: u64 },
    Vertical { x: u64 },
}

impl Line {
    pub fn contains(&self, p: u64, (x, y): (u64, u64)) -> bool {
        match *self {
            Line::Graph { slope, intercept } => (slope * x + intercept) % p == y,
            Line::Vertical { x: c } => x == c,
        }
    }

    /// The p points of the line.
    pub fn points(&self, p: u64) -> impl Iterator<Item = (u64, u64)> {
        let l = *self;
        (0..p).map(move |t| match l {
            Line::Graph { slope, intercept } => (t, (slope * t + intercept) % p),
            Line::Vertical { x } => (x, t),
        })
    }
}

/// A duplicate-free family of lines in F_p².
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineSet {
    p: u64,
    lines: Vec<Line>,
}

impl LineSet {
    pub fn new(p: u64, lines: impl IntoIterator<Item = Line>) -> Result<Self, IncidenceError> {
        PrimeField::new(p)?;
        let mut v: Vec<Line> = lines.into_iter().collect();
        for l in &v {
            let bad = match *l {
                Line::Graph { slope, intercept } => slope.max(intercept),
                Line::Vertical { x } => x,
            };
            if bad >= p {
                return Err(FieldError::OutOfRange { value: bad, p }.into());
            }
        }
        v.sort_unstable();
        v.dedup();
        Ok(Self { p, lines: v })
    }

    /// All `p² + p` lines.
    pub fn all(p: u64) -> Result<Self, IncidenceError> {
        let graphs = (0..p).flat_map(|m| (0..p).map(move |c| Line::Graph { slope: m, intercept: c }));
        Self::new(p, graphs.chain((0..p).map(|x| Line::Vertical { x })))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }
}

/// A set of points in F_p².
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointSet {
    p: u64,
    points: Vec<(u64, u64)>,
}

impl PointSet {
    pub fn new(p: u64, points: impl IntoIterator<Item = (u64, u64)>) -> Result<Self, IncidenceError> {
        PrimeField::new(p)?;
        let mut v: Vec<(u64, u64)> = points.into_iter().collect();
        if let Some(&(x, y)) = v.iter().find(|&&(x, y)| x >= p || y >= p) {
            return Err(FieldError::OutOfRange { value: x.max(y), p }.into());
        }
        v.sort_unstable();
        v.dedup();
        Ok(Self { p, points: v })
    }

    /// `A × B`.
    pub fn grid(a: &FpSet, b: &FpSet) -> Result<Self, IncidenceError> {
        if a.p() != b.p() {
            return Err(IncidenceError::ModulusMismatch(a.p(), b.p()));
        }
        Self::new(a.p(), a.iter().flat_map(|x| b.iter().map(move |y| (x, y))))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[(u64, u64)] {
        &self.points
    }

    fn bitmap(&self) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity((self.p * self.p) as usize);
        for &(x, y) in &self.points {
            b.insert((x * self.p + y) as usize);
        }
        b
    }
}

fn same_p(a: u64, b: u64) -> Result<(), IncidenceError> {
    if a != b {
        return Err(IncidenceError::ModulusMismatch(a, b));
    }
    Ok(())
}

/// `I(P, L)`, evaluated line by line against a membership bitmap.
pub fn count_incidences(points: &PointSet, lines: &LineSet) -> Result<u64, IncidenceError> {
    same_p(points.p, lines.p)?;
    let p = points.p;
    let bits = points.bitmap();
    Ok(lines
        .lines
        .iter()
        .map(|l| {
            l.points(p)
                .filter(|&(x, y)| bits.contains((x * p + y) as usize))
                .count() as u64
        })
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrivialBound {
    pub count: u64,
    /// `min(|P|^{1/2}|L| + |P|, |L|^{1/2}|P| + |L|)`
    pub bound: f64,
    pub pass: bool,
}

/// `I ≤ s^{1/2} t + s` with exact integer arithmetic.
fn below_sqrt_form(i: u64, s: u64, t: u64) -> bool {
    i <= s || {
        let d = (i - s) as u128;
        d * d <= s as u128 * (t as u128) * (t as u128)
    }
}

/// Checks `I ≤ min(|P|^{1/2}|L| + |P|, |L|^{1/2}|P| + |L|)`.
pub fn trivial_bound_check(points: &PointSet, lines: &LineSet) -> Result<TrivialBound, IncidenceError> {
    let count = count_incidences(points, lines)?;
    let (np, nl) = (points.len() as u64, lines.len() as u64);
    let bound = ((np as f64).sqrt() * nl as f64 + np as f64).min((nl as f64).sqrt() * np as f64 + nl as f64);
    let pass = below_sqrt_form(count, np, nl) && below_sqrt_form(count, nl, np);
    Ok(TrivialBound { count, bound, pass })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VinhCheck {
    /// `|Σ_{r ∈ l} f(r) g(l)|`, exact.
    pub lhs: Ratio<i128>,
    /// `√p ‖f‖₂ ‖g‖₂`
    pub rhs: f64,
    /// `lhs ≤ rhs + 1e−9`
    pub pass: bool,
    /// `lhs² ≤ p ‖f‖₂² ‖g‖₂²` in exact arithmetic.
    pub exact_pass: bool,
}

fn ratio_f64(r: Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Checks `|Σ_{r ∈ l} f(r) g(l)| ≤ √p ‖f‖₂ ‖g‖₂`, valid when `f` or `g`
/// has zero sum. Points missing from `f` have weight zero; `g` is aligned
/// with `lines.lines()`.
pub fn vinh_form_check(
    f: &BTreeMap<(u64, u64), Ratio<i128>>,
    lines: &LineSet,
    g: &[Ratio<i128>],
) -> Result<VinhCheck, IncidenceError> {
    let p = lines.p;
    if g.len() != lines.len() {
        return Err(IncidenceError::WeightLength {
            expected: lines.len(),
            got: g.len(),
        });
    }
    if let Some(&(x, y)) = f.keys().find(|&&(x, y)| x >= p || y >= p) {
        return Err(FieldError::OutOfRange { value: x.max(y), p }.into());
    }
    let zero = Ratio::from_integer(0);
    let f_sum: Ratio<i128> = f.values().copied().sum();
    let g_sum: Ratio<i128> = g.iter().copied().sum();
    if f_sum != zero && g_sum != zero {
        return Err(IncidenceError::NotMeanZero);
    }
    let mut form = zero;
    for (l, &w) in lines.lines.iter().zip(g) {
        if w == zero {
            continue;
        }
        let along: Ratio<i128> = l.points(p).filter_map(|r| f.get(&r).copied()).sum();
        form += along * w;
    }
    let lhs = if form < zero { -form } else { form };
    let f2: Ratio<i128> = f.values().map(|&v| v * v).sum();
    let g2: Ratio<i128> = g.iter().map(|&v| v * v).sum();
    let rhs = (p as f64).sqrt() * ratio_f64(f2).sqrt() * ratio_f64(g2).sqrt();
    Ok(VinhCheck {
        lhs,
        rhs,
        pass: ratio_f64(lhs) <= rhs + 1e-9,
        exact_pass: lhs * lhs <= Ratio::from_integer(p as i128) * f2 * g2,
    })
}

/// One row of incidence output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncidenceReport {
    pub p: u64,
    pub points: u64,
    /// Number of lines or planes.
    pub objects: u64,
    pub incidences: u64,
    /// `|P||L|/p` (or `|A||B||L|/p`)
    pub main: f64,
    /// `I − main`
    pub error: f64,
    pub bound: f64,
    /// `|error| / bound`
    pub ratio: f64,
    /// Maximum number of collinear points, for point–plane reports.
    pub k: Option<u64>,
}

impl IncidenceReport {
    fn build(p: u64, points: u64, objects: u64, incidences: u64, bound: f64, k: Option<u64>) -> Self {
        // main = points·objects/p, error kept exact until the final division
        let main_num = points as i128 * objects as i128;
        let err_num = incidences as i128 * p as i128 - main_num;
        let error = err_num as f64 / p as f64;
        let ratio = if bound > 0.0 { error.abs() / bound } else { 0.0 };
        Self {
            p,
            points,
            objects,
            incidences,
            main: main_num as f64 / p as f64,
            error,
            bound,
            ratio,
            k,
        }
    }

    /// Exact zero test for the error term.
    pub fn error_is_zero(&self) -> bool {
        self.incidences as i128 * self.p as i128 == self.points as i128 * self.objects as i128
    }
}

/// Incidences of the grid `A × B` with `L`, against
/// `|A|^{3/4}|B|^{1/2}|L|^{3/4} + |L| + |A||B|`.
pub fn sdz_report(a: &FpSet, b: &FpSet, lines: &LineSet) -> Result<IncidenceReport, IncidenceError> {
    let grid = PointSet::grid(a, b)?;
    let i = count_incidences(&grid, lines)?;
    let (na, nb, nl) = (a.len() as f64, b.len() as f64, lines.len() as f64);
    let bound = na.powf(0.75) * nb.sqrt() * nl.powf(0.75) + nl + na * nb;
    Ok(IncidenceReport::build(
        a.p(),
        grid.len() as u64,
        lines.len() as u64,
        i,
        bound,
        None,
    ))
}

/// A plane `ax + by + cz = d` with the first nonzero of `(a, b, c)` equal to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Plane {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl Plane {
    pub fn new(p: u64, coeffs: [u64; 4]) -> Result<Self, IncidenceError> {
        let f = PrimeField::new(p)?;
        let v = coeffs.map(|c| c % p);
        let lead = v[..3]
            .iter()
            .copied()
            .find(|&c| c != 0)
            .ok_or(IncidenceError::DegeneratePlane)?;
        let s = f.inv(lead)?;
        let n = v.map(|c| f.mul(c, s));
        Ok(Self {
            a: n[0],
            b: n[1],
            c: n[2],
            d: n[3],
        })
    }

    pub fn contains(&self, p: u64, (x, y, z): (u64, u64, u64)) -> bool {
        (self.a * x + self.b * y + self.c * z) % p == self.d
    }
}

/// A duplicate-free family of planes in F_p³.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlaneSet {
    p: u64,
    planes: Vec<Plane>,
}

impl PlaneSet {
    /// Planes from raw coefficient vectors `(a, b, c, d)`, normalized.
    pub fn new(p: u64, raw: impl IntoIterator<Item = [u64; 4]>) -> Result<Self, IncidenceError> {
        PrimeField::new(p)?;
        let mut v = raw
            .into_iter()
            .map(|c| Plane::new(p, c))
            .collect::<Result<Vec<_>, _>>()?;
        v.sort_unstable();
        v.dedup();
        Ok(Self { p, planes: v })
    }

    /// All `p(p² + p + 1)` planes.
    pub fn all(p: u64) -> Result<Self, IncidenceError> {
        let mut raw = Vec::new();
        for (a, b, c) in projective_points(p) {
            for d in 0..p {
                raw.push([a, b, c, d]);
            }
        }
        Self::new(p, raw)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }

    pub fn planes(&self) -> &[Plane] {
        &self.planes
    }
}

/// Representatives of P²(F_p), first nonzero coordinate 1.
fn projective_points(p: u64) -> Vec<(u64, u64, u64)> {
    let mut v = Vec::with_capacity((p * p + p + 1) as usize);
    for b in 0..p {
        for c in 0..p {
            v.push((1, b, c));
        }
    }
    for c in 0..p {
        v.push((0, 1, c));
    }
    v.push((0, 0, 1));
    v
}

/// Largest number of points of `pts` on one line of F_p³.
pub fn max_collinear(p: u64, pts: &[(u64, u64, u64)]) -> u64 {
    if pts.len() <= 2 {
        return pts.len() as u64;
    }
    let f = PrimeField::new_unchecked(p);
    let mut best = 0;
    let mut buckets: HashMap<(u64, u64), u64> = HashMap::new();
    for (a, b, c) in projective_points(p) {
        buckets.clear();
        for &(x, y, z) in pts {
            // project along (a,b,c) onto the coordinate plane where the
            // direction's leading 1 sits
            let key = if a == 1 {
                (f.sub(y, f.mul(x, b)), f.sub(z, f.mul(x, c)))
            } else if b == 1 {
                (x, f.sub(z, f.mul(y, c)))
            } else {
                (x, y)
            };
            let n = buckets.entry(key).or_insert(0);
            *n += 1;
            best = best.max(*n);
        }
    }
    best
}

/// Point–plane incidences against `|P|^{1/2}|Π| + k|Π|`; requires `|P| ≤ |Π|`.
pub fn point_plane_report(
    p: u64,
    points: &[(u64, u64, u64)],
    planes: &PlaneSet,
) -> Result<IncidenceReport, IncidenceError> {
    same_p(p, planes.p)?;
    let mut pts = points.to_vec();
    if let Some(&(x, y, z)) = pts.iter().find(|&&(x, y, z)| x >= p || y >= p || z >= p) {
        return Err(FieldError::OutOfRange {
            value: x.max(y).max(z),
            p,
        }
        .into());
    }
    pts.sort_unstable();
    pts.dedup();
    if pts.len() > planes.len() {
        return Err(IncidenceError::TooManyPoints {
            points: pts.len(),
            planes: planes.len(),
        });
    }
    let i = planes
        .planes
        .iter()
        .map(|pl| pts.iter().filter(|&&r| pl.contains(p, r)).count() as u64)
        .sum();
    let k = max_collinear(p, &pts);
    let np = pts.len() as f64;
    let nq = planes.len() as f64;
    let bound = np.sqrt() * nq + k as f64 * nq;
    Ok(IncidenceReport::build(
        p,
        pts.len() as u64,
        planes.len() as u64,
        i,
        bound,
        Some(k),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{seq::SliceRandom, Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_points(p: u64) -> PointSet {
        PointSet::new(p, (0..p).flat_map(|x| (0..p).map(move |y| (x, y)))).unwrap()
    }

    fn oracle(points: &PointSet, lines: &LineSet) -> u64 {
        let p = points.p();
        let mut n = 0;
        for &r in points.points() {
            for l in lines.lines() {
                if l.contains(p, r) {
                    n += 1;
                }
            }
        }
        n
    }

    fn random_instance(rng: &mut ChaCha8Rng, p: u64) -> (PointSet, LineSet) {
        let all = LineSet::all(p).unwrap();
        let np = rng.gen_range(0..=(p * p) as usize);
        let nl = rng.gen_range(0..=all.len());
        let pts: Vec<(u64, u64)> = (0..np).map(|_| (rng.gen_range(0..p), rng.gen_range(0..p))).collect();
        let lines: Vec<Line> = all.lines().choose_multiple(rng, nl).copied().collect();
        (PointSet::new(p, pts).unwrap(), LineSet::new(p, lines).unwrap())
    }

    #[test]
    fn counting_examples() {
        let all = LineSet::all(5).unwrap();
        assert_eq!(all.len(), 30);
        assert_eq!(count_incidences(&PointSet::new(5, []).unwrap(), &all), Ok(0));
        assert_eq!(count_incidences(&all_points(5), &all), Ok(150));
        for p in [3u64, 5, 7] {
            let o = PointSet::new(p, [(0, 0)]).unwrap();
            assert_eq!(count_incidences(&o, &LineSet::all(p).unwrap()), Ok(p + 1));
        }
        assert!(count_incidences(&all_points(3), &all).is_err());
    }

    #[test]
    fn counts_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for p in [5u64, 7] {
            for _ in 0..100 {
                let (pts, lines) = random_instance(&mut rng, p);
                assert_eq!(count_incidences(&pts, &lines).unwrap(), oracle(&pts, &lines));
            }
        }
    }

    #[test]
    fn trivial_bound_examples() {
        let t = trivial_bound_check(&all_points(5), &LineSet::all(5).unwrap()).unwrap();
        assert_eq!(t.count, 150);
        assert!((t.bound - (30f64.sqrt() * 25.0 + 30.0)).abs() < 1e-9);
        assert!(t.pass);
        let o = PointSet::new(7, [(3, 4)]).unwrap();
        let t = trivial_bound_check(&o, &LineSet::all(7).unwrap()).unwrap();
        assert_eq!(t.count, 8);
        assert!(t.pass);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let (pts, lines) = random_instance(&mut rng, 11);
            assert!(trivial_bound_check(&pts, &lines).unwrap().pass);
        }
    }

    fn r(n: i128) -> Ratio<i128> {
        Ratio::from_integer(n)
    }

    #[test]
    fn vinh_examples() {
        let p = 5;
        let all = LineSet::all(p).unwrap();
        let f: BTreeMap<_, _> = [((0, 0), r(1)), ((1, 1), r(-1))].into();
        let g = vec![r(1); all.len()];
        let v = vinh_form_check(&f, &all, &g).unwrap();
        assert_eq!(v.lhs, r(0));
        assert!(v.pass && v.exact_pass);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = 7;
        let all = LineSet::all(p).unwrap();
        let mut signs: Vec<i128> = (0..49).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
        signs[48] = 0;
        signs.shuffle(&mut rng);
        let f: BTreeMap<_, _> = (0..49u64).map(|i| ((i / 7, i % 7), r(signs[i as usize]))).collect();
        let chosen: Vec<usize> = rand::seq::index::sample(&mut rng, all.len(), 10).into_vec();
        let g: Vec<_> = (0..all.len()).map(|i| r(chosen.contains(&i) as i128)).collect();
        let v = vinh_form_check(&f, &all, &g).unwrap();
        assert!(v.pass && v.exact_pass);

        // indicator(A×B) minus its mean
        let (a, b) = ([1u64, 2, 4], [0u64, 3]);
        let mean = Ratio::new((a.len() * b.len()) as i128, (p * p) as i128);
        let f: BTreeMap<_, _> = (0..p)
            .flat_map(|x| (0..p).map(move |y| (x, y)))
            .map(|(x, y)| {
                let ind = r((a.contains(&x) && b.contains(&y)) as i128);
                ((x, y), ind - mean)
            })
            .collect();
        let g: Vec<_> = (0..all.len()).map(|_| r(rng.gen_range(-3..=3))).collect();
        let v = vinh_form_check(&f, &all, &g).unwrap();
        assert!(v.pass && v.exact_pass);

        let f: BTreeMap<_, _> = [((0, 0), r(1))].into();
        assert_eq!(
            vinh_form_check(&f, &all, &vec![r(1); all.len()]),
            Err(IncidenceError::NotMeanZero)
        );
    }

    #[test]
    fn vinh_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for p in [3u64, 5, 7] {
            for t in 0..200 {
                let (pts, lines) = random_instance(&mut rng, p);
                if lines.is_empty() {
                    continue;
                }
                let mut f: BTreeMap<(u64, u64), Ratio<i128>> =
                    pts.points().iter().map(|&q| (q, r(rng.gen_range(-5..=5)))).collect();
                let mut g: Vec<Ratio<i128>> = (0..lines.len()).map(|_| r(rng.gen_range(-5..=5))).collect();
                // center one of the two families
                if t % 2 == 0 && !f.is_empty() {
                    let mean = f.values().copied().sum::<Ratio<i128>>() / r(f.len() as i128);
                    f.values_mut().for_each(|v| *v -= mean);
                } else {
                    let mean = g.iter().copied().sum::<Ratio<i128>>() / r(g.len() as i128);
                    g.iter_mut().for_each(|v| *v -= mean);
                }
                let v = vinh_form_check(&f, &lines, &g).unwrap();
                assert!(v.pass && v.exact_pass, "p={p} t={t} {v:?}");
            }
        }
    }

    #[test]
    fn sdz_examples() {
        for p in [3u64, 5, 7] {
            let full = FpSet::full(p).unwrap();
            let rep = sdz_report(&full, &full, &LineSet::all(p).unwrap()).unwrap();
            assert_eq!(rep.incidences, p * (p * p + p));
            assert!(rep.error_is_zero());
            assert_eq!(rep.ratio, 0.0);
        }
        let z = FpSet::new(7, [0]).unwrap();
        let all = LineSet::all(7).unwrap();
        let rep = sdz_report(&z, &z, &all).unwrap();
        assert!(rep.incidences <= all.len() as u64);
        assert!(rep.ratio.is_finite());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let all = LineSet::all(11).unwrap();
        let lines = LineSet::new(11, all.lines().choose_multiple(&mut rng, 40).copied()).unwrap();
        let a = FpSet::new(11, [1, 3, 4, 9]).unwrap();
        let b = FpSet::new(11, [0, 2, 5]).unwrap();
        let rep = sdz_report(&a, &b, &lines).unwrap();
        assert_eq!(rep.objects, 40);
        assert!(rep.ratio.is_finite() && rep.ratio >= 0.0);
    }

    #[test]
    fn planes_are_normalized() {
        let pl = Plane::new(5, [2, 4, 0, 1]).unwrap();
        assert_eq!(pl, Plane { a: 1, b: 2, c: 0, d: 3 });
        assert_eq!(Plane::new(5, [0, 0, 0, 1]), Err(IncidenceError::DegeneratePlane));
        let set = PlaneSet::new(5, [[2, 4, 0, 1], [1, 2, 0, 3], [3, 1, 0, 4]]).unwrap();
        assert_eq!(set.len(), 1);
        for p in [3u64, 5] {
            assert_eq!(PlaneSet::all(p).unwrap().len() as u64, p * (p * p + p + 1));
        }
    }

    fn collinear_oracle(p: u64, pts: &[(u64, u64, u64)]) -> u64 {
        if pts.len() <= 2 {
            return pts.len() as u64;
        }
        let mut best = 1;
        for (i, &u) in pts.iter().enumerate() {
            for &v in &pts[i + 1..] {
                let d = ((v.0 + p - u.0) % p, (v.1 + p - u.1) % p, (v.2 + p - u.2) % p);
                let on = pts
                    .iter()
                    .filter(|&&w| {
                        (0..p).any(|t| {
                            (u.0 + t * d.0) % p == w.0 && (u.1 + t * d.1) % p == w.1 && (u.2 + t * d.2) % p == w.2
                        })
                    })
                    .count() as u64;
                best = best.max(on);
            }
        }
        best
    }

    #[test]
    fn point_plane_examples() {
        let all3 = PlaneSet::all(3).unwrap();
        let rep = point_plane_report(3, &[], &all3).unwrap();
        assert_eq!(rep.incidences, 0);
        let cube: Vec<_> = (0..27u64).map(|i| (i / 9, i / 3 % 3, i % 3)).collect();
        let rep = point_plane_report(3, &cube, &all3).unwrap();
        // every plane carries p² points
        assert_eq!(rep.incidences, 9 * all3.len() as u64);
        assert!(rep.error_is_zero());
        assert_eq!(rep.k, Some(3));
        let few = PlaneSet::new(3, [[1, 0, 0, 0]]).unwrap();
        assert!(matches!(
            point_plane_report(3, &cube, &few),
            Err(IncidenceError::TooManyPoints { .. })
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let all5 = PlaneSet::all(5).unwrap();
        let planes = PlaneSet::new(
            5,
            all5.planes()
                .choose_multiple(&mut rng, 60)
                .map(|q| [q.a, q.b, q.c, q.d]),
        )
        .unwrap();
        let pts: Vec<_> = (0..40)
            .map(|_| (rng.gen_range(0..5), rng.gen_range(0..5), rng.gen_range(0..5)))
            .collect();
        let rep = point_plane_report(5, &pts, &planes).unwrap();
        assert!(rep.ratio.is_finite());
    }

    #[test]
    fn collinearity_matches_pair_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [3u64, 5] {
            for _ in 0..60 {
                let n = rng.gen_range(0..20);
                let mut pts: Vec<_> = (0..n)
                    .map(|_| (rng.gen_range(0..p), rng.gen_range(0..p), rng.gen_range(0..p)))
                    .collect();
                if rng.gen_bool(0.3) {
                    // plant a full line
                    let (o, d) = ((1, 2, 0), (0, 1, 1));
                    pts.extend((0..p).map(|t| ((o.0 + t * d.0) % p, (o.1 + t * d.1) % p, (o.2 + t * d.2) % p)));
                }
                pts.sort_unstable();
                pts.dedup();
                assert_eq!(max_collinear(p, &pts), collinear_oracle(p, &pts));
            }
        }
    }
}
