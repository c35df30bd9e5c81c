//! Exact invariant suites shared by the self-test scenario and the
//! acceptance run. Every suite counts checks and failures instead of
//! panicking, so one report covers everything.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rand::Rng;
use sumprod_core::cyclo::CycloElement;
use sumprod_core::energy::{energy, energy_via_quotients, group_energy, t_k, EnergyLaw, FpSet};
use sumprod_core::field::DiscreteLog;
use sumprod_core::fourier::{
    convolve, fourier_invert, fourier_invert_split, fourier_transform, group_energy_via_fourier, irreps,
    parseval_residual_with, GroupFunction, MonomialMatrix, Phase, RepEvaluator, WConvention,
};
use sumprod_core::group::{ElementCode, GroupDesc};
use sumprod_core::incidence::{
    count_incidences, sdz_report, trivial_bound_check, vinh_form_check, Line, LineSet, PointSet,
};
use sumprod_core::set::GroupSet;

use crate::rng::{random_fp_set, random_group_set, random_subset_of};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteOutcome {
    pub suite: &'static str,
    pub checks: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
}

impl SuiteOutcome {
    pub fn new(suite: &'static str) -> Self {
        Self {
            suite,
            checks: 0,
            failures: 0,
            first_failure: None,
        }
    }

    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    /// Records an error from the code under test as a failed check.
    pub fn check_result<T, E: std::fmt::Display>(&mut self, r: Result<T, E>, what: &str) -> Option<T> {
        match r {
            Ok(v) => {
                self.checks += 1;
                Some(v)
            }
            Err(e) => {
                self.check(false, || format!("{what}: {e}"));
                None
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn h1(p: u64) -> GroupDesc {
    GroupDesc::heisenberg(p, 1).expect("odd prime")
}

fn aff(p: u64) -> GroupDesc {
    GroupDesc::affine(p).expect("odd prime")
}

fn random_code(rng: &mut impl Rng, g: GroupDesc) -> ElementCode {
    ElementCode(rng.gen_range(0..g.order()))
}

/// Associativity, identity and inverses on random triples in H_1, H_2
/// and Aff over each prime.
pub fn group_axioms(rng: &mut impl Rng, ps: &[u64], triples: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("group_axioms");
    for &p in ps {
        for g in [h1(p), GroupDesc::heisenberg(p, 2).expect("odd prime"), aff(p)] {
            let e = g.identity();
            for _ in 0..triples {
                let [a, b, c] = [0; 3].map(|_| random_code(rng, g));
                out.check(g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c)), || {
                    format!("{g}: associativity at {a:?},{b:?},{c:?}")
                });
                out.check(g.mul(a, e) == a && g.mul(e, a) == a, || {
                    format!("{g}: identity at {a:?}")
                });
                out.check(g.mul(a, g.inv(a)) == e, || format!("{g}: inverse of {a:?}"));
            }
        }
    }
    out
}

/// `π(gh) = π(g)π(h)` for every irreducible and every pair of elements.
pub fn representation_homomorphism(p: u64) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("representation_homomorphism");
    for g in [h1(p), aff(p)] {
        for phase in [Phase::Shifted, Phase::Central] {
            let Some(ev) = out.check_result(RepEvaluator::new(g, phase), "evaluator") else {
                continue;
            };
            let Some(reps) = out.check_result(irreps(g), "irreps") else {
                continue;
            };
            let vals: Vec<Vec<MonomialMatrix>> = reps
                .iter()
                .map(|&r| g.codes().map(|c| ev.value(r, c)).collect())
                .collect();
            for (r, table) in reps.iter().zip(&vals) {
                for a in g.codes() {
                    for b in g.codes() {
                        let lhs = table[a.0 as usize].mul(&table[b.0 as usize]);
                        out.check(lhs == table[g.mul(a, b).0 as usize], || {
                            format!("{g} {r:?} {phase:?}: π({a:?}·{b:?})")
                        });
                    }
                }
            }
        }
    }
    out
}

/// `ζ^{xy} D^y W^x = W^x D^y` on H_1 and `W^{ind a} D^d = D^{ad} W^{ind a}`
/// on Aff, for all parameters.
pub fn commutation_identities(p: u64) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("commutation_identities");
    let conv = WConvention::canonical();
    let order = p as u32;
    let d = p as usize;
    let w = MonomialMatrix::cyclic_shift(order, d, 0, conv.orientation);
    let dm = MonomialMatrix::diagonal(order, (0..order).collect());
    for x in 0..p {
        let wx = w.pow(x);
        for y in 0..p {
            let dy = dm.pow(y);
            let lhs = MonomialMatrix::scalar(order, d, ((x * y) % p) as u32).mul(&dy).mul(&wx);
            out.check(lhs == wx.mul(&dy), || format!("H_1(F_{p}) identity at x={x}, y={y}"));
        }
    }
    let Some(dl) = out.check_result(DiscreteLog::new(p), "discrete log") else {
        return out;
    };
    let w1 = MonomialMatrix::cyclic_shift(order, d - 1, 0, conv.orientation);
    let da = MonomialMatrix::diagonal(order, (0..p - 1).map(|i| dl.root_pow(i) as u32).collect());
    for a in 1..p {
        let wa = w1.pow(dl.ind(a).expect("nonzero"));
        for dd in 0..p {
            let lhs = wa.mul(&da.pow(dd));
            let rhs = da.pow(a * dd % p).mul(&wa);
            out.check(lhs == rhs, || format!("Aff(F_{p}) identity at a={a}, d={dd}"));
        }
    }
    out
}

fn random_function(rng: &mut impl Rng, g: GroupDesc, lo: i64, hi: i64) -> GroupFunction {
    let values = (0..g.order()).map(|_| rng.gen_range(lo..=hi)).collect();
    GroupFunction::from_values(g, values).expect("length matches")
}

/// Parseval, both inversion formulas and the convolution theorem on random
/// integer functions. With `corrupt`, the first spectrum per group gets
/// one entry bumped before the checks run.
pub fn fourier_identities(rng: &mut impl Rng, ps: &[u64], functions: usize, corrupt: bool) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("fourier_identities");
    for &p in ps {
        for g in [h1(p), aff(p)] {
            for t in 0..functions {
                let f = random_function(rng, g, -3, 3);
                let h = random_function(rng, g, -3, 3);
                let phase = if t % 2 == 0 { Phase::Shifted } else { Phase::Central };
                let Some(mut bf) = out.check_result(fourier_transform(&f, phase), "transform") else {
                    continue;
                };
                if corrupt && t == 0 {
                    let (_, m) = bf.coefficients_mut().last_mut().expect("nonempty bundle");
                    let bumped = m.get(0, 0) + &CycloElement::one(m.ring());
                    m.set(0, 0, bumped);
                }
                let res = parseval_residual_with(&f, &bf);
                out.check(res == Ok(0), || format!("{g}: Parseval residual {res:?}"));
                let inv = fourier_invert(&bf);
                out.check(inv.as_ref() == Ok(&f), || format!("{g}: inversion round trip"));
                let split = fourier_invert_split(&f, &bf);
                out.check(split.as_ref() == Ok(&f), || format!("{g}: split inversion round trip"));

                let Some(bh) = out.check_result(fourier_transform(&h, phase), "transform") else {
                    continue;
                };
                let Some(fh) = out.check_result(convolve(&f, &h), "convolve") else {
                    continue;
                };
                let Some(bfh) = out.check_result(fourier_transform(&fh, phase), "transform") else {
                    continue;
                };
                let ok = bfh
                    .coefficients()
                    .iter()
                    .zip(bf.coefficients().iter().zip(bh.coefficients()))
                    .all(|((_, m), ((_, mf), (_, mh)))| mf.mul(mh).as_ref() == Ok(m));
                out.check(ok, || format!("{g}: convolution theorem"));
            }
        }
    }
    out
}

fn quadruple_oracle(a: &FpSet, b: &FpSet, law: EnergyLaw) -> u128 {
    let p = a.p();
    let op = |x: u64, y: u64| match law {
        EnergyLaw::Add => (x + y) % p,
        EnergyLaw::Mul => x * y % p,
    };
    let mut n = 0u128;
    for x in a.iter() {
        for y in b.iter() {
            for x2 in a.iter() {
                for y2 in b.iter() {
                    n += (op(x, y) == op(x2, y2)) as u128;
                }
            }
        }
    }
    n
}

fn tuple_oracle(a: &FpSet, k: usize) -> u128 {
    let p = a.p();
    let elems = a.elems();
    let m = elems.len();
    let mut n = 0u128;
    for t in 0..m.pow(2 * k as u32) {
        let mut t = t;
        let mut diff = 0u64;
        for j in 0..2 * k {
            let v = elems[t % m];
            t /= m;
            diff = if j < k { (diff + v) % p } else { (diff + p - v) % p };
        }
        n += (diff == 0) as u128;
    }
    n
}

fn group_energy_oracle(a: &GroupSet, b: &GroupSet) -> u128 {
    let g = a.group();
    let mut n = 0u128;
    for a1 in a.iter() {
        for b1 in b.iter() {
            let q = g.mul(a1, g.inv(b1));
            for a2 in a.iter() {
                for b2 in b.iter() {
                    n += (g.mul(a2, g.inv(b2)) == q) as u128;
                }
            }
        }
    }
    n
}

/// Histogram energies against direct enumeration, plus the spectral
/// route for the nonabelian energy on `H_1(F_5)`.
pub fn energy_oracles(rng: &mut impl Rng, ps: &[u64], instances: usize, spectral: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("energy_oracles");
    for &p in ps {
        for _ in 0..instances {
            let a = {
                let size = rng.gen_range(1..=p as usize);
                random_fp_set(rng, p, size)
            };
            let b = {
                let size = rng.gen_range(1..=p as usize);
                random_fp_set(rng, p, size)
            };
            for law in [EnergyLaw::Add, EnergyLaw::Mul] {
                let e = energy(&a, &b, law);
                let want = quadruple_oracle(&a, &b, law);
                out.check(e == Ok(want), || format!("F_{p} {law:?} energy {e:?} vs {want}"));
                if law == EnergyLaw::Add || !(a.contains(0) || b.contains(0)) {
                    let q = energy_via_quotients(&a, &b, law);
                    out.check(q == Ok(want), || {
                        format!("F_{p} {law:?} quotient route {q:?} vs {want}")
                    });
                }
            }
            let small = {
                let size = rng.gen_range(1..=p.min(5) as usize);
                random_fp_set(rng, p, size)
            };
            for k in [2usize, 3] {
                let t = t_k(&small.indicator(), k);
                let want = tuple_oracle(&small, k);
                out.check(t == Ok(want), || format!("F_{p} T_{k} {t:?} vs {want}"));
            }
            let g = if rng.gen_bool(0.5) { h1(3) } else { aff(p) };
            let ga = {
                let size = rng.gen_range(1..=8);
                random_group_set(rng, g, size)
            };
            let gb = {
                let size = rng.gen_range(1..=8);
                random_group_set(rng, g, size)
            };
            let e = group_energy(&ga, &gb);
            let want = group_energy_oracle(&ga, &gb);
            out.check(e == Ok(want), || format!("{g} energy {e:?} vs {want}"));
        }
    }
    let g = h1(5);
    for _ in 0..spectral {
        let a = {
            let size = rng.gen_range(1..=g.order() as usize);
            random_group_set(rng, g, size)
        };
        let direct = group_energy(&a, &a);
        let via_fourier = group_energy_via_fourier(&a);
        let same = matches!((&direct, &via_fourier), (Ok(x), Ok(y)) if x == y);
        out.check(same, || {
            format!("{g} |A|={}: direct {direct:?} vs spectral {via_fourier:?}", a.len())
        });
    }
    out
}

fn random_instance(rng: &mut impl Rng, p: u64, all: &LineSet) -> (PointSet, LineSet) {
    let np = rng.gen_range(0..=(p * p) as usize);
    let nl = rng.gen_range(1..=all.len());
    let pts: Vec<(u64, u64)> = (0..np).map(|_| (rng.gen_range(0..p), rng.gen_range(0..p))).collect();
    let lines: Vec<Line> = random_subset_of(rng, all.lines(), nl);
    (
        PointSet::new(p, pts).expect("points in range"),
        LineSet::new(p, lines).expect("lines in range"),
    )
}

fn brute_incidences(pts: &PointSet, lines: &LineSet) -> u64 {
    let p = pts.p();
    let mut n = 0;
    for &(x, y) in pts.points() {
        for l in lines.lines() {
            let on = match *l {
                Line::Graph { slope, intercept } => (slope * x + intercept) % p == y,
                Line::Vertical { x: c } => c == x,
            };
            n += on as u64;
        }
    }
    n
}

fn r(n: i128) -> Ratio<i128> {
    Ratio::from_integer(n)
}

/// Counting against the double loop, the trivial bound and Vinh's bound
/// on random instances, and the zero-error full grid.
pub fn incidence_bounds(
    rng: &mut impl Rng,
    count_ps: &[u64],
    count_instances: usize,
    bound_ps: &[u64],
    bound_instances: usize,
) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("incidence_bounds");
    for &p in count_ps {
        let all = LineSet::all(p).expect("prime");
        for _ in 0..count_instances {
            let (pts, lines) = random_instance(rng, p, &all);
            let c = count_incidences(&pts, &lines);
            let want = brute_incidences(&pts, &lines);
            out.check(c == Ok(want), || format!("F_{p}: count {c:?} vs {want}"));
        }
    }
    for &p in bound_ps {
        let all = LineSet::all(p).expect("prime");
        for t in 0..bound_instances {
            let (pts, lines) = random_instance(rng, p, &all);
            if let Some(tb) = out.check_result(trivial_bound_check(&pts, &lines), "trivial bound") {
                out.check(tb.pass, || format!("F_{p}: trivial bound {tb:?}"));
            }
            // weights: mean-zero on points for even t, on lines for odd t
            let mut f: BTreeMap<(u64, u64), Ratio<i128>> =
                pts.points().iter().map(|&q| (q, r(rng.gen_range(-3..=3)))).collect();
            let mut g: Vec<Ratio<i128>> = (0..lines.len()).map(|_| r(rng.gen_range(-3..=3))).collect();
            if t % 2 == 0 && !f.is_empty() {
                let mean = f.values().copied().sum::<Ratio<i128>>() / r(f.len() as i128);
                f.values_mut().for_each(|v| *v -= mean);
            } else {
                let mean = g.iter().copied().sum::<Ratio<i128>>() / r(g.len() as i128);
                g.iter_mut().for_each(|v| *v -= mean);
            }
            if let Some(v) = out.check_result(vinh_form_check(&f, &lines, &g), "Vinh") {
                out.check(v.pass && v.exact_pass, || format!("F_{p}: Vinh {v:?}"));
            }
        }
        let full = FpSet::full(p).expect("prime");
        if let Some(rep) = out.check_result(sdz_report(&full, &full, &all), "grid report") {
            out.check(rep.error_is_zero() && rep.ratio == 0.0, || {
                format!("F_{p}: full grid {rep:?}")
            });
        }
    }
    out
}

/// A spectrum with one corrupted entry must fail Parseval.
pub fn fault_is_detected(rng: &mut impl Rng) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("fault_detection");
    let g = h1(3);
    let f = random_function(rng, g, -3, 3);
    let Some(mut b) = out.check_result(fourier_transform(&f, Phase::Shifted), "transform") else {
        return out;
    };
    let (_, m) = &mut b.coefficients_mut()[0];
    let bumped = m.get(0, 0) + &CycloElement::one(m.ring());
    m.set(0, 0, bumped);
    let res = parseval_residual_with(&f, &b);
    out.check(res != Ok(0), || format!("corrupted spectrum gave residual {res:?}"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Scenario;
    use crate::rng::trial_rng;

    #[test]
    fn suites_pass_at_small_budgets() {
        let mut rng = trial_rng(3, Scenario::Selftest, 0, 0);
        assert!(group_axioms(&mut rng, &[3, 5], 200).passed());
        assert!(representation_homomorphism(3).passed());
        assert!(commutation_identities(5).passed());
        assert!(fourier_identities(&mut rng, &[3], 3, false).passed());
        assert!(energy_oracles(&mut rng, &[5], 5, 3).passed());
        assert!(incidence_bounds(&mut rng, &[5], 5, &[5], 20).passed());
        assert!(fault_is_detected(&mut rng).passed());
    }

    #[test]
    fn corruption_fails_the_fourier_suite() {
        let mut rng = trial_rng(3, Scenario::Selftest, 0, 1);
        let out = fourier_identities(&mut rng, &[3], 2, true);
        assert!(!out.passed());
        assert!(out.first_failure.unwrap().contains("Parseval"));
    }
}
