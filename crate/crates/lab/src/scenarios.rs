//! The experiment scenarios. Each returns one report; rows for a trial
//! depend only on `(seed, scenario, sub-experiment, trial)`.

use std::collections::HashMap;

use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;
use sumprod_core::energy::{
    brick_parameter_k, energy, group_energy, mixed_energy_sums, sigma2_correlation, EnergyLaw, FiberConvention, FpSet,
};
use sumprod_core::freiman::{is_freiman_hom, is_freiman_iso, PartialMap};
use sumprod_core::group::{ElementCode, GroupDesc, MAX_HEISENBERG_DIM};
use sumprod_core::set::{
    brick, center_coverage, commutator_set, coset_coverage, extremal_witness, freiman_base_set, power_set, product_set,
    signed_product, BrickSpec, GroupSet, WitnessKind,
};

use crate::checks;
use crate::config::{check_signs, LabError, Scenario, ScenarioConfig};
use crate::report::{Row, ScenarioReport};
use crate::rng::{random_group_set, random_residues, random_subset_of, trial_rng};

/// Cap on `|𝒜|²` for brick products and energies.
pub const BRICK_PAIR_BUDGET: u64 = 1_000_000_000;

fn pow(b: u64, e: u32) -> u128 {
    (b as u128).checked_pow(e).expect("threshold fits in 128 bits")
}

/// Smallest `s` with `s^k > t`.
fn min_size_above(k: u32, t: u128) -> u64 {
    let mut s = (t as f64).powf(1.0 / k as f64).floor().max(0.0) as u64;
    while s > 0 && (s as u128).pow(k) > t {
        s -= 1;
    }
    while (s as u128).pow(k) <= t {
        s += 1;
    }
    s
}

fn ratio_text(r: Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn signs_text(signs: &[i8]) -> String {
    signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
}

fn advisory(cfg: &ScenarioConfig, ratio: f64) -> Option<bool> {
    cfg.advisory_constant.map(|c| ratio < c)
}

/// Runs `trials` independent trials on the current pool, keeping trial order.
fn par_trials<F>(trials: usize, f: F) -> Result<Vec<Row>, LabError>
where
    F: Fn(u64) -> Result<Vec<Row>, LabError> + Sync + Send,
{
    let parts: Vec<Vec<Row>> = (0..trials as u64).into_par_iter().map(f).collect::<Result<_, _>>()?;
    Ok(parts.into_iter().flatten().collect())
}

fn report(cfg: &ScenarioConfig, scenario: Scenario, rows: Vec<Row>) -> ScenarioReport {
    ScenarioReport {
        scenario,
        seed: cfg.seed,
        rows,
    }
}

fn base_row(scenario: Scenario, cfg: &ScenarioConfig) -> Row {
    Row::new().with("scenario", scenario.name()).with("seed", cfg.seed)
}

/// `[A,B] ⊇ [0,0,F_p]` when `|A||B| > p⁵` in H_1, and `[A,A] ⊇ (1,F_p)`
/// when `|A|² > p³` in Aff.
pub fn run_commutator_cover(cfg: &ScenarioConfig) -> Result<ScenarioReport, LabError> {
    let sc = Scenario::CommutatorCover;
    if cfg.n.is_some_and(|n| n != 1) {
        return Err(LabError::config("the commutator covering statement is for H_1 only"));
    }
    let trials = cfg.trials_or(1000);
    let mut jobs = Vec::new();
    if cfg.group.heisenberg() {
        for p in cfg.ps_or(&[3, 5]) {
            jobs.push(GroupDesc::heisenberg(p, 1).map_err(|e| LabError::config(e.to_string()))?);
        }
    }
    if cfg.group.affine() {
        for p in cfg.ps_or(&[5, 7, 11]) {
            jobs.push(GroupDesc::affine(p).map_err(|e| LabError::config(e.to_string()))?);
        }
    }
    let mut rows = Vec::new();
    for (j, &g) in jobs.iter().enumerate() {
        let p = g.modulus();
        let order = g.order();
        let (heis, threshold) = match g {
            GroupDesc::Heisenberg { .. } => (true, pow(p, 5)),
            _ => (false, pow(p, 3)),
        };
        let a_min = if heis {
            (threshold / order as u128 + 1) as u64
        } else {
            min_size_above(2, threshold)
        };
        if a_min > order {
            return Err(LabError::config(format!(
                "{g}: no pair of subsets satisfies the size hypothesis (needs product above {threshold})"
            )));
        }
        rows.extend(par_trials(trials, |t| {
            let mut rng = trial_rng(cfg.seed, sc, j as u64, t);
            let size_a = rng.gen_range(a_min..=order);
            let a = random_group_set(&mut rng, g, size_a as usize);
            let b = if heis {
                let size_b = (threshold / size_a as u128 + 1).min(order as u128) as usize;
                random_group_set(&mut rng, g, size_b)
            } else {
                a.clone()
            };
            let hyp = a.len() as u128 * b.len() as u128;
            let c = commutator_set(&a, &b).map_err(|e| LabError::compute(sc, e))?;
            let (covered, full) = center_coverage(&c).map_err(|e| LabError::compute(sc, e))?;
            Ok(vec![base_row(sc, cfg)
                .with("trial", t)
                .with("group", g.to_string())
                .with("p", p)
                .with("n", heis.then_some(1u64))
                .with("size_a", a.len())
                .with("size_b", b.len())
                .with("hypothesis_lhs", hyp)
                .with("hypothesis_rhs", threshold)
                .with("covered", covered)
                .with("ratio", covered as f64 / p as f64)
                .with("pass", hyp > threshold && full)])
        })?);
    }
    Ok(report(cfg, sc, rows))
}

fn resolve_signs(cfg: &ScenarioConfig) -> Result<(usize, Vec<i8>), LabError> {
    match (&cfg.signs, cfg.k) {
        (Some(s), k) => {
            check_signs(s)?;
            if s.len() % 2 != 0 || s.len() < 4 {
                return Err(LabError::config("sign vector must have length 2k with k ≥ 2"));
            }
            if k.is_some_and(|k| 2 * k != s.len()) {
                return Err(LabError::config("sign vector length differs from 2k"));
            }
            Ok((s.len() / 2, s.clone()))
        }
        (None, k) => {
            let k = k.unwrap_or(2);
            Ok((k, (0..2 * k).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect()))
        }
    }
}

/// Balanced signed products `∏ A^{ε_j}` cover the center line above
/// `|A| > p^{n+1+n/k}` (H_n) or `|A| > p^{1+1/k}` (Aff). Witness rows
/// check the sanity direction below the threshold.
pub fn run_signed_cover(cfg: &ScenarioConfig) -> Result<ScenarioReport, LabError> {
    let sc = Scenario::SignedCover;
    let trials = cfg.trials_or(1000);
    let (k, signs) = resolve_signs(cfg)?;
    let n = cfg.n.unwrap_or(1);
    if n == 0 || n > MAX_HEISENBERG_DIM {
        return Err(LabError::config(format!("n must lie in 1..={MAX_HEISENBERG_DIM}")));
    }
    let mut jobs = Vec::new();
    if cfg.group.heisenberg() {
        for p in cfg.ps_or(&[3]) {
            let g = GroupDesc::heisenberg(p, n).map_err(|e| LabError::config(e.to_string()))?;
            let e = ((n + 1) * k + n) as u32;
            jobs.push((g, pow(p, e), WitnessKind::HeisenbergProgression));
        }
    }
    if cfg.group.affine() {
        for p in cfg.ps_or(&[5]) {
            let g = GroupDesc::affine(p).map_err(|e| LabError::config(e.to_string()))?;
            jobs.push((g, pow(p, k as u32 + 1), WitnessKind::AffineDiagonal));
        }
    }
    let signs_s = signs_text(&signs);
    let mut rows = Vec::new();
    for (j, &(g, threshold, wkind)) in jobs.iter().enumerate() {
        let p = g.modulus();
        let order = g.order();
        let s_min = min_size_above(k as u32, threshold);
        if s_min > order {
            return Err(LabError::config(format!(
                "{g}: |A|^{k} > {threshold} needs more than |G| = {order} elements"
            )));
        }
        let n_col = matches!(g, GroupDesc::Heisenberg { .. }).then_some(n as u64);
        let row = |kind: &str, trial: u64, a: &GroupSet| -> Result<Row, LabError> {
            let s = signed_product(a, &signs).map_err(|e| LabError::compute(sc, e))?;
            let (covered, full) = center_coverage(&s).map_err(|e| LabError::compute(sc, e))?;
            let hyp = pow(a.len() as u64, k as u32);
            let above = hyp > threshold;
            // above the threshold the center must be covered; the witness
            // sits below it and must miss part of the center
            let pass = if kind == "witness" {
                !above && !full
            } else {
                above && full
            };
            Ok(base_row(sc, cfg)
                .with("kind", kind)
                .with("trial", trial)
                .with("group", g.to_string())
                .with("p", p)
                .with("n", n_col)
                .with("k", k)
                .with("signs", signs_s.as_str())
                .with("size", a.len())
                .with("hypothesis_lhs", hyp)
                .with("hypothesis_rhs", threshold)
                .with("covered", covered)
                .with("ratio", covered as f64 / p as f64)
                .with("pass", pass))
        };
        rows.extend(par_trials(trials, |t| {
            let mut rng = trial_rng(cfg.seed, sc, j as u64, t);
            let size = rng.gen_range(s_min..=order) as usize;
            let a = random_group_set(&mut rng, g, size);
            Ok(vec![row("trial", t, &a)?])
        })?);
        let w = extremal_witness(wkind, p, n, signs.len()).map_err(|e| LabError::compute(sc, e))?;
        rows.push(row("witness", trials as u64, &w)?);
    }
    Ok(report(cfg, sc, rows))
}

/// `|A^k| ≥ ½ min(Kp, |A|^k / p^e)` with `e = (n+1)(k−1)` on H_n and
/// `e = k−1` on Aff, checked exactly; plus ratio rows for
/// `|𝒜²| / min(|𝒜|^{7/4}, p|𝒜|)` on planar bricks `A × A × {0}`.
pub fn run_growth_bounds(cfg: &ScenarioConfig) -> Result<ScenarioReport, LabError> {
    let sc = Scenario::GrowthBounds;
    let trials = cfg.trials_or(200);
    let ks: Vec<usize> = cfg.k.map_or_else(|| vec![2, 3], |k| vec![k]);
    let n = cfg.n.unwrap_or(1);
    if n == 0 || n > MAX_HEISENBERG_DIM {
        return Err(LabError::config(format!("n must lie in 1..={MAX_HEISENBERG_DIM}")));
    }
    let ps = cfg.ps_or(&[3, 5]);
    let mut groups = Vec::new();
    for &p in &ps {
        if cfg.group.heisenberg() {
            groups.push(GroupDesc::heisenberg(p, n).map_err(|e| LabError::config(e.to_string()))?);
        }
        if cfg.group.affine() {
            groups.push(GroupDesc::affine(p).map_err(|e| LabError::config(e.to_string()))?);
        }
    }
    let blank = |row: Row| row;
    let mut rows = Vec::new();
    let mut stream = 0u64;
    for &g in &groups {
        let p = g.modulus();
        let heis = matches!(g, GroupDesc::Heisenberg { .. });
        for &k in &ks {
            let e = if heis { (n + 1) * (k - 1) } else { k - 1 } as u32;
            let j = stream;
            stream += 1;
            rows.extend(par_trials(trials, |t| {
                let mut rng = trial_rng(cfg.seed, sc, j, t);
                let size = rng.gen_range(1..=g.order()) as usize;
                let a = random_group_set(&mut rng, g, size);
                let ak = power_set(&a, k).map_err(|e| LabError::compute(sc, e))?;
                let kp = brick_parameter_k(&a).map_err(|e| LabError::compute(sc, e))?;
                let m = ak.len() as u128;
                let (num, den) = (*kp.numer() as u128, *kp.denom() as u128);
                let power = pow(a.len() as u64, k as u32);
                let pass = 2 * m * den >= num * p as u128 || 2 * m * pow(p, e) >= power;
                let rhs = 0.5 * (num as f64 * p as f64 / den as f64).min(power as f64 / pow(p, e) as f64);
                Ok(vec![blank(base_row(sc, cfg))
                    .with("kind", "growth")
                    .with("trial", t)
                    .with("group", g.to_string())
                    .with("p", p)
                    .with("n", heis.then_some(n as u64))
                    .with("k", k)
                    .with("size", a.len())
                    .with("product_size", ak.len())
                    .with("k_param", ratio_text(kp))
                    .with("rhs", rhs)
                    .with("ratio", m as f64 / rhs)
                    .with("below_advisory", None::<bool>)
                    .with("pass", pass)])
            })?);
        }
    }
    if cfg.group.heisenberg() {
        let brick_ps = cfg.ps_or(&[5, 7]);
        let brick_trials = trials.min(50);
        for &p in &brick_ps {
            let j = stream;
            stream += 1;
            let g = GroupDesc::heisenberg(p, 1).map_err(|e| LabError::config(e.to_string()))?;
            let planar_row = |kind: &str, t: u64, a: &[u64]| -> Result<Row, LabError> {
                let br = brick(p, &BrickSpec::planar(a.to_vec(), a.to_vec(), vec![0]))
                    .map_err(|e| LabError::compute(sc, e))?;
                let sq = power_set(&br, 2).map_err(|e| LabError::compute(sc, e))?;
                let size = br.len() as f64;
                let rhs = size.powf(1.75).min(p as f64 * size);
                let ratio = sq.len() as f64 / rhs;
                let anchor = kind == "anchor_7_4";
                Ok(base_row(sc, cfg)
                    .with("kind", kind)
                    .with("trial", t)
                    .with("group", g.to_string())
                    .with("p", p)
                    .with("n", 1u64)
                    .with("k", 2u64)
                    .with("size", br.len())
                    .with("product_size", sq.len())
                    .with("k_param", None::<String>)
                    .with("rhs", rhs)
                    .with("ratio", ratio)
                    .with("below_advisory", if anchor { None } else { advisory(cfg, ratio) })
                    .with("pass", anchor.then(|| sq.len() as u64 == p * br.len() as u64)))
            };
            rows.extend(par_trials(brick_trials, |t| {
                let mut rng = trial_rng(cfg.seed, sc, j, t);
                let size = rng.gen_range(1..=p as usize);
                let a = random_residues(&mut rng, p, size);
                Ok(vec![planar_row("brick_7_4", t, &a)?])
            })?);
            let all: Vec<u64> = (0..p).collect();
            rows.push(planar_row("anchor_7_4", brick_trials as u64, &all)?);
        }
    }
    Ok(report(cfg, sc, rows))
}

/// Counts solutions of `x+x_* = x'+x'_*`, `y+y_* = y'+y'_*`,
/// `z+z_*+xy_* = z'+z'_*+x'y'_*` over the brick directly.
fn brick_system_count(p: u64, x: &[u64], y: &[u64], z: &[u64]) -> u128 {
    let mut counts: HashMap<(u64, u64, u64), u64> = HashMap::new();
    for &x1 in x {
        for &y1 in y {
            for &z1 in z {
                for &x2 in x {
                    for &y2 in y {
                        for &z2 in z {
                            let key = ((x1 + x2) % p, (y1 + y2) % p, (z1 + z2 + x1 * y2) % p);
                            *counts.entry(key).or_insert(0) += 1;
                        }
                    }
                }
            }
        }
    }
    counts.values().map(|&c| c as u128 * c as u128).sum()
}

/// Exact brick energy against every term of its upper bound, with σ₂ and
/// the mixed fiber sums of `X` alongside.
pub fn run_brick_energy(cfg: &ScenarioConfig) -> Result<ScenarioReport, LabError> {
    let sc = Scenario::BrickEnergy;
    let trials = cfg.trials_or(20);
    let mut rows = Vec::new();
    for (j, p) in cfg.ps_or(&[3, 5, 7]).into_iter().enumerate() {
        if p * p * p * p * p * p > BRICK_PAIR_BUDGET {
            return Err(LabError::config(format!(
                "p = {p}: brick energy exceeds the pair budget"
            )));
        }
        let g = GroupDesc::heisenberg(p, 1).map_err(|e| LabError::config(e.to_string()))?;
        rows.extend(par_trials(trials, |t| {
            let mut rng = trial_rng(cfg.seed, sc, j as u64, t);
            let all: Vec<u64> = (0..p).collect();
            let (x, y, z) = match (t, cfg.brick_sizes) {
                (0, _) => (all.clone(), all.clone(), all.clone()),
                (_, Some((sx, sy, sz))) => (
                    random_residues(&mut rng, p, sx),
                    random_residues(&mut rng, p, sy),
                    if t == 1 {
                        vec![0]
                    } else {
                        random_residues(&mut rng, p, sz)
                    },
                ),
                (1, None) => {
                    let (sx, sy) = (rng.gen_range(1..=p as usize), rng.gen_range(1..=p as usize));
                    (
                        random_residues(&mut rng, p, sx),
                        random_residues(&mut rng, p, sy),
                        vec![0],
                    )
                }
                _ => {
                    let sizes = [0; 3].map(|_| rng.gen_range(1..=p as usize));
                    (
                        random_residues(&mut rng, p, sizes[0]),
                        random_residues(&mut rng, p, sizes[1]),
                        random_residues(&mut rng, p, sizes[2]),
                    )
                }
            };
            let a =
                brick(p, &BrickSpec::planar(x.clone(), y.clone(), z.clone())).map_err(|e| LabError::compute(sc, e))?;
            debug_assert_eq!(a.group(), g);
            let e_group = group_energy(&a, &a.inverse()).map_err(|e| LabError::compute(sc, e))?;
            let e_system = brick_system_count(p, &x, &y, &z);

            let fx = FpSet::new(p, x.iter().copied()).map_err(|e| LabError::compute(sc, e))?;
            let fy = FpSet::new(p, y.iter().copied()).map_err(|e| LabError::compute(sc, e))?;
            let fz = FpSet::new(p, z.iter().copied()).map_err(|e| LabError::compute(sc, e))?;
            let add = |s: &FpSet| energy(s, s, EnergyLaw::Add).map_err(|e| LabError::compute(sc, e));
            let (ex, ey, ez) = (add(&fx)?, add(&fy)?, add(&fz)?);
            let (nx, ny, nz) = (fx.len() as f64, fy.len() as f64, fz.len() as f64);
            let m = nx.max(ny);
            let (exf, eyf, ezf) = (ex as f64, ey as f64, ez as f64);
            let pf = p as f64;
            let term_main = ezf * nx.powi(3) * ny.powi(3) / pf;
            let term_second = ezf * nx * ny * (nx * ny * m.sqrt() + m * m);
            // with |Z| = 1 every solution has z + z_* = z' + z'_*, so the
            // 𝓔 branch never arises
            let term_cal = (fz.len() > 1).then(|| {
                let first = nz.powi(4) * exf * eyf / pf + nz.powi(4) * nx.powf(0.25) * ny.powf(2.25) * exf.powf(0.75);
                let second = nx.powi(3) * ny.powi(3) * nz.powi(4) / pf + (nx * ny).powf(2.5) * nz * nz * ezf.sqrt();
                first.min(second)
            });
            let rhs = term_main + term_second + term_cal.unwrap_or(0.0);
            let ratio = e_group as f64 / rhs;
            let sigma2 = sigma2_correlation(&fx, &fy).map_err(|e| LabError::compute(sc, e))?;

            let mixed = mixed_energy_sums(&fx, FiberConvention::Dilate).map_err(|e| LabError::compute(sc, e))?;
            let mixed_inv =
                mixed_energy_sums(&fx, FiberConvention::DilateInverse).map_err(|e| LabError::compute(sc, e))?;
            let nonzero = !fx.contains(0);
            let mul_bound = fx.len() as u128 * ex;
            let inv_bound = if nonzero {
                Some(fx.len() as u128 * add(&fx.inverse())?)
            } else {
                None
            };

            let full = t == 0;
            Ok(vec![base_row(sc, cfg)
                .with("trial", t)
                .with("p", p)
                .with("size_x", fx.len())
                .with("size_y", fy.len())
                .with("size_z", fz.len())
                .with("size", a.len())
                .with("energy", e_group)
                .with("energy_system", e_system)
                .with("routes_pass", e_group == e_system)
                .with("anchor_pass", full.then(|| e_group == pow(p, 9)))
                .with("e_add_x", ex)
                .with("e_add_y", ey)
                .with("e_add_z", ez)
                .with("term_main", term_main)
                .with("term_second", term_second)
                .with("term_cal", term_cal)
                .with("rhs", rhs)
                .with("ratio", ratio)
                .with("sigma2", sigma2)
                .with("mixed_add", mixed.sum_add_fibers)
                .with("mixed_add_ratio", mixed.sum_add_fibers as f64 / nx.powf(11.0 / 3.0))
                .with("mixed_mul", mixed.sum_mul_fibers)
                .with("mixed_mul_bound", mul_bound)
                .with("mixed_mul_pass", nonzero.then_some(mixed.sum_mul_fibers <= mul_bound))
                .with("mixed_inv", mixed_inv.sum_mul_fibers)
                .with("mixed_inv_bound", inv_bound)
                .with("mixed_inv_pass", inv_bound.map(|b| mixed_inv.sum_mul_fibers <= b))
                .with("below_advisory", advisory(cfg, ratio))])
        })?);
    }
    Ok(report(cfg, sc, rows))
}

/// Cosets of the center inside `𝒜²` for bricks in H_n, n even.
pub fn run_coset_cover(cfg: &ScenarioConfig) -> Result<ScenarioReport, LabError> {
    let sc = Scenario::CosetCover;
    let n = cfg.n.unwrap_or(2);
    if n == 0 || n % 2 != 0 || n > MAX_HEISENBERG_DIM {
        return Err(LabError::config(format!(
            "coset covering needs even n in 2..={MAX_HEISENBERG_DIM}, got {n}"
        )));
    }
    let trials = cfg.trials_or(10);
    let mut rows = Vec::new();
    for (j, p) in cfg.ps_or(&[3, 5]).into_iter().enumerate() {
        let order = GroupDesc::heisenberg(p, n)
            .map_err(|e| LabError::config(e.to_string()))?
            .order();
        if order.saturating_mul(order) > BRICK_PAIR_BUDGET && cfg.brick_sizes.is_none() {
            return Err(LabError::config(format!(
                "H_{n}(F_{p}) bricks exceed the pair budget; pass --brick-sizes"
            )));
        }
        if let Some((sx, sy, sz)) = cfg.brick_sizes {
            if sx.max(sy).max(sz) > p as usize {
                return Err(LabError::config(format!("brick factor sizes exceed p = {p}")));
            }
            let size = (sx as u64).pow(n as u32) * (sy as u64).pow(n as u32) * sz as u64;
            if size.saturating_mul(size) > BRICK_PAIR_BUDGET {
                return Err(LabError::config("brick exceeds the pair budget"));
            }
        }
        rows.extend(par_trials(trials, |t| {
            let mut rng = trial_rng(cfg.seed, sc, j as u64, t);
            let spec = if t == 0 {
                BrickSpec::full(p, n)
            } else if let Some((sx, sy, sz)) = cfg.brick_sizes {
                BrickSpec {
                    x: (0..n).map(|_| random_residues(&mut rng, p, sx)).collect(),
                    y: (0..n).map(|_| random_residues(&mut rng, p, sy)).collect(),
                    z: random_residues(&mut rng, p, sz),
                }
            } else {
                // factor sizes in [b, 2b] keep every ratio within 2
                let b = rng.gen_range(1..=p as usize);
                let hi = (2 * b).min(p as usize);
                let factor = |rng: &mut rand_chacha::ChaCha8Rng| {
                    let s = rng.gen_range(b..=hi);
                    random_residues(rng, p, s)
                };
                let x = (0..n).map(|_| factor(&mut rng)).collect();
                let y = (0..n).map(|_| factor(&mut rng)).collect();
                let z = if t % 4 == 1 {
                    vec![0, 1]
                } else {
                    let s = rng.gen_range(1..=p as usize);
                    random_residues(&mut rng, p, s)
                };
                BrickSpec { x, y, z }
            };
            let a = brick(p, &spec).map_err(|e| LabError::compute(sc, e))?;
            let sq = power_set(&a, 2).map_err(|e| LabError::compute(sc, e))?;
            let coverage = coset_coverage(&sq).map_err(|e| LabError::compute(sc, e))?;
            let big_x = spec.x.iter().map(|f| f.len()).max().unwrap_or(0) as f64;
            let big_y = spec.y.iter().map(|f| f.len()).max().unwrap_or(0) as f64;
            let nz = spec.z.len() as f64;
            let side = nz <= big_x * big_y && big_x <= nz * big_y && big_y <= nz * big_x;
            let pf = p as f64;
            let threshold = pf.powf(1.5) * (big_x * big_y / (pf * nz.sqrt())).powf(0.5f64.powi(n as i32 / 2));
            let target = a.len() as f64 / pf;
            let ratio = coverage as f64 / target;
            let anchor = t == 0;
            // the full brick squares to H_n: p^{2n} cosets, |𝒜|/p of them required
            let pass = anchor.then(|| coverage == pow(p, 2 * n as u32) as u64 && coverage * p >= a.len() as u64);
            Ok(vec![base_row(sc, cfg)
                .with("kind", if anchor { "anchor" } else { "random" })
                .with("trial", t)
                .with("p", p)
                .with("n", n)
                .with("max_x", big_x as u64)
                .with("max_y", big_y as u64)
                .with("size_z", spec.z.len())
                .with("size", a.len())
                .with("coverage", coverage)
                .with("target", target)
                .with("ratio", ratio)
                .with("side_conditions", side)
                .with("cond_ratio", big_x * big_y / threshold)
                .with("below_advisory", if anchor { None } else { advisory(cfg, ratio) })
                .with("pass", pass)])
        })?);
    }
    Ok(report(cfg, sc, rows))
}

/// Doubling of `A_*`, commutator covering for large `A ⊆ A_*`, and
/// Freiman homomorphism checks on small submaps.
pub fn run_freiman(cfg: &ScenarioConfig) -> Result<ScenarioReport, LabError> {
    let sc = Scenario::Freiman;
    let alpha = cfg.alpha.unwrap_or(Ratio::new(2, 5));
    let trials = cfg.trials_or(100);
    let empty = |kind: &str, p: u64| {
        base_row(sc, cfg)
            .with("kind", kind.to_string())
            .with("p", p)
            .with("alpha", ratio_text(alpha))
    };
    let mut rows = Vec::new();
    for (j, p) in cfg.ps_or(&[5, 7, 11]).into_iter().enumerate() {
        let base = freiman_base_set(p, alpha).map_err(|e| LabError::config(e.to_string()))?;
        let g = base.group();
        let doubled = product_set(&base, &base).map_err(|e| LabError::compute(sc, e))?;
        let expected = 2 * base.len() as i128 - (p * p) as i128;
        rows.push(
            empty("doubling", p)
                .with("trial", None::<u64>)
                .with("size", base.len())
                .with("value", doubled.len())
                .with("expected", expected)
                .with("detail", "|A_*A_*| against 2|A_*| - p^2")
                .with(
                    "pass",
                    doubled.len() as i128 == expected && doubled.len() < 2 * base.len(),
                ),
        );

        let threshold = pow(p, 5);
        let s_min = min_size_above(2, threshold);
        if s_min > base.len() as u64 {
            return Err(LabError::config(format!(
                "p = {p}, alpha = {alpha}: |A_*| = {} is not above p^(5/2)",
                base.len()
            )));
        }
        let pool: Vec<ElementCode> = base.codes().to_vec();
        rows.extend(par_trials(trials, |t| {
            let mut rng = trial_rng(cfg.seed, sc, j as u64, t);
            let size = rng.gen_range(s_min..=base.len() as u64) as usize;
            let a = GroupSet::new(g, random_subset_of(&mut rng, &pool, size)).map_err(|e| LabError::compute(sc, e))?;
            let c = commutator_set(&a, &a).map_err(|e| LabError::compute(sc, e))?;
            let (covered, full) = center_coverage(&c).map_err(|e| LabError::compute(sc, e))?;
            Ok(vec![empty("coverage", p)
                .with("trial", t)
                .with("size", a.len())
                .with("value", covered)
                .with("expected", p)
                .with("detail", "|[A,A] ∩ center| for |A|^2 > p^5")
                .with("pass", full && pow(a.len() as u64, 2) > threshold)])
        })?);

        let mut rng = trial_rng(cfg.seed, sc, j as u64, u64::MAX);
        let small: Vec<ElementCode> = random_subset_of(&mut rng, &pool, 8);
        let ident = PartialMap::identity(g, small.clone()).map_err(|e| LabError::compute(sc, e))?;
        let ok = is_freiman_iso(&ident, 5).map_err(|e| LabError::compute(sc, e))?;
        rows.push(
            empty("identity_iso", p)
                .with("trial", None::<u64>)
                .with("size", small.len())
                .with("value", ok as u64)
                .with("expected", 1u64)
                .with("detail", "identity on 8 points is a 5-isomorphism")
                .with("pass", ok),
        );
        let conj = ElementCode(rng.gen_range(0..g.order()));
        let conj_inv = g.inv(conj);
        let cmap = PartialMap::from_fn(g, g, small, |a| g.mul(g.mul(conj, a), conj_inv))
            .map_err(|e| LabError::compute(sc, e))?;
        let ok = is_freiman_iso(&cmap, 5).map_err(|e| LabError::compute(sc, e))?;
        rows.push(
            empty("conjugation_iso", p)
                .with("trial", None::<u64>)
                .with("size", cmap.len())
                .with("value", ok as u64)
                .with("expected", 1u64)
                .with("detail", "inner automorphism restricted to 8 points")
                .with("pass", ok),
        );

        // [0,0,0], [0,0,1], [0,0,2] with the last image moved to [0,0,3]
        let dom = vec![ElementCode(0), ElementCode(1), ElementCode(2)];
        let broken = PartialMap::new(g, g, dom, vec![ElementCode(0), ElementCode(1), ElementCode(3)])
            .map_err(|e| LabError::compute(sc, e))?;
        let (ok, w) = is_freiman_hom(&broken, 2).map_err(|e| LabError::compute(sc, e))?;
        let witness_valid = w
            .as_ref()
            .is_some_and(|w| witness_holds(g, &broken, &w.signs, &w.left, &w.right));
        rows.push(
            empty("injected_violation", p)
                .with("trial", None::<u64>)
                .with("size", broken.len())
                .with("value", ok as u64)
                .with("expected", 0u64)
                .with(
                    "detail",
                    w.map_or_else(
                        || "no witness".to_string(),
                        |w| {
                            format!(
                                "signs {} left {:?} right {:?}",
                                signs_text(&w.signs),
                                w.left.iter().map(|c| c.0).collect::<Vec<_>>(),
                                w.right.iter().map(|c| c.0).collect::<Vec<_>>()
                            )
                        },
                    ),
                )
                .with("pass", !ok && witness_valid),
        );
    }
    Ok(report(cfg, sc, rows))
}

/// Equal signed products in the domain, different ones in the image.
fn witness_holds(g: GroupDesc, rho: &PartialMap, signs: &[i8], left: &[ElementCode], right: &[ElementCode]) -> bool {
    let image = |c: ElementCode| rho.domain.iter().position(|&d| d == c).map(|i| rho.image[i]);
    let prod = |xs: &[ElementCode]| {
        xs.iter()
            .zip(signs)
            .fold(g.identity(), |acc, (&x, &s)| g.mul(acc, g.signed(x, s)))
    };
    let (Some(li), Some(ri)) = (
        left.iter().map(|&c| image(c)).collect::<Option<Vec<_>>>(),
        right.iter().map(|&c| image(c)).collect::<Option<Vec<_>>>(),
    ) else {
        return false;
    };
    left.len() == signs.len() && prod(left) == prod(right) && prod(&li) != prod(&ri)
}

/// Budgets for the invariant suites.
#[derive(Debug, Clone)]
pub struct SelftestBudget {
    pub axiom_primes: Vec<u64>,
    pub axiom_triples: usize,
    pub homomorphism_primes: Vec<u64>,
    pub identity_primes: Vec<u64>,
    pub fourier_primes: Vec<u64>,
    pub fourier_functions: usize,
    pub energy_primes: Vec<u64>,
    pub energy_instances: usize,
    pub spectral_energy_sets: usize,
    pub incidence_count_primes: Vec<u64>,
    pub incidence_count_instances: usize,
    pub incidence_bound_primes: Vec<u64>,
    pub incidence_bound_instances: usize,
}

impl Default for SelftestBudget {
    fn default() -> Self {
        Self {
            axiom_primes: vec![3, 5, 7, 11, 13],
            axiom_triples: 20_000,
            homomorphism_primes: vec![3, 5],
            identity_primes: vec![3, 5, 7],
            fourier_primes: vec![3, 5, 7],
            fourier_functions: 100,
            energy_primes: vec![3, 5, 7],
            energy_instances: 100,
            spectral_energy_sets: 50,
            incidence_count_primes: vec![5, 7],
            incidence_count_instances: 100,
            incidence_bound_primes: vec![5, 7, 11],
            incidence_bound_instances: 10_000,
        }
    }
}

impl SelftestBudget {
    /// Smaller budgets, scaled by `trials` (one unit = one hundredth of
    /// the default).
    fn scaled(trials: Option<usize>) -> Self {
        let mut b = Self::default();
        if let Some(t) = trials {
            let scale = |v: usize| (v * t / 100).max(1);
            b.axiom_triples = scale(b.axiom_triples);
            b.fourier_functions = scale(b.fourier_functions);
            b.energy_instances = scale(b.energy_instances);
            b.spectral_energy_sets = scale(b.spectral_energy_sets);
            b.incidence_count_instances = scale(b.incidence_count_instances);
            b.incidence_bound_instances = scale(b.incidence_bound_instances);
        }
        b
    }
}

/// Runs the invariant suites; `--trials` scales their budgets (100 is
/// the default size).
pub fn run_selftest(cfg: &ScenarioConfig) -> Result<ScenarioReport, LabError> {
    run_selftest_with(cfg, &SelftestBudget::scaled(cfg.trials))
}

pub fn run_selftest_with(cfg: &ScenarioConfig, b: &SelftestBudget) -> Result<ScenarioReport, LabError> {
    let sc = Scenario::Selftest;
    let rng = |stream: u64| trial_rng(cfg.seed, sc, stream, 0);
    type Suite<'a> = Box<dyn Fn() -> Vec<checks::SuiteOutcome> + Sync + Send + 'a>;
    let suites: Vec<Suite> = vec![
        Box::new(|| vec![checks::group_axioms(&mut rng(0), &b.axiom_primes, b.axiom_triples)]),
        Box::new(|| {
            b.homomorphism_primes
                .iter()
                .map(|&p| checks::representation_homomorphism(p))
                .collect()
        }),
        Box::new(|| {
            b.identity_primes
                .iter()
                .map(|&p| checks::commutation_identities(p))
                .collect()
        }),
        Box::new(|| {
            vec![checks::fourier_identities(
                &mut rng(3),
                &b.fourier_primes,
                b.fourier_functions,
                cfg.inject_fault,
            )]
        }),
        Box::new(|| {
            vec![checks::energy_oracles(
                &mut rng(4),
                &b.energy_primes,
                b.energy_instances,
                b.spectral_energy_sets,
            )]
        }),
        Box::new(|| {
            vec![checks::incidence_bounds(
                &mut rng(5),
                &b.incidence_count_primes,
                b.incidence_count_instances,
                &b.incidence_bound_primes,
                b.incidence_bound_instances,
            )]
        }),
        Box::new(|| vec![checks::fault_is_detected(&mut rng(6))]),
    ];
    let outcomes: Vec<Vec<checks::SuiteOutcome>> = suites.par_iter().map(|s| s()).collect();
    let rows = outcomes
        .into_iter()
        .flatten()
        .map(|o| {
            base_row(sc, cfg)
                .with("suite", o.suite)
                .with("checks", o.checks)
                .with("failures", o.failures)
                .with("first_failure", o.first_failure.clone())
                .with("pass", o.passed())
        })
        .collect();
    Ok(report(cfg, sc, rows))
}

pub fn run_scenario(cfg: &ScenarioConfig, scenario: Scenario) -> Result<ScenarioReport, LabError> {
    match scenario {
        Scenario::CommutatorCover => run_commutator_cover(cfg),
        Scenario::SignedCover => run_signed_cover(cfg),
        Scenario::GrowthBounds => run_growth_bounds(cfg),
        Scenario::BrickEnergy => run_brick_energy(cfg),
        Scenario::CosetCover => run_coset_cover(cfg),
        Scenario::Freiman => run_freiman(cfg),
        Scenario::Selftest => run_selftest(cfg),
        Scenario::All => Err(LabError::config("`all` is not a single scenario")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        assert_eq!(min_size_above(2, 243), 16);
        assert_eq!(min_size_above(2, 125), 12);
        assert_eq!(min_size_above(2, 3125), 56);
        assert_eq!(min_size_above(3, 26), 3);
        assert_eq!(min_size_above(2, 0), 1);
    }

    #[test]
    fn witness_check() {
        let g = GroupDesc::cyclic(7).unwrap();
        let rho = PartialMap::new(
            g,
            g,
            vec![ElementCode(0), ElementCode(1), ElementCode(2)],
            vec![ElementCode(0), ElementCode(1), ElementCode(3)],
        )
        .unwrap();
        assert!(witness_holds(
            g,
            &rho,
            &[1, 1],
            &[ElementCode(0), ElementCode(2)],
            &[ElementCode(1), ElementCode(1)]
        ));
        assert!(!witness_holds(
            g,
            &rho,
            &[1, 1],
            &[ElementCode(0), ElementCode(1)],
            &[ElementCode(1), ElementCode(1)]
        ));
    }

    #[test]
    fn small_runs_are_clean() {
        let cfg = ScenarioConfig::new(Scenario::CommutatorCover)
            .with_trials(5)
            .with_seed(9);
        let r = run_commutator_cover(&cfg).unwrap();
        assert_eq!(r.failures(), 0);
        assert_eq!(r.rows.len(), 5 * 5);
        let r = run_signed_cover(&ScenarioConfig::new(Scenario::SignedCover).with_trials(5)).unwrap();
        assert_eq!(r.failures(), 0);
        let r = run_freiman(&ScenarioConfig::new(Scenario::Freiman).with_trials(2).with_ps(&[5])).unwrap();
        assert_eq!(r.failures(), 0, "{r:?}");
    }

    #[test]
    fn configuration_errors() {
        let mut cfg = ScenarioConfig::new(Scenario::CosetCover);
        cfg.n = Some(3);
        assert!(matches!(run_coset_cover(&cfg), Err(LabError::Config(_))));
        let mut cfg = ScenarioConfig::new(Scenario::Freiman).with_ps(&[5]);
        cfg.alpha = Some(Ratio::new(1, 2));
        assert!(matches!(run_freiman(&cfg), Err(LabError::Config(_))));
        let mut cfg = ScenarioConfig::new(Scenario::SignedCover);
        cfg.signs = Some(vec![1, 1, -1, 1]);
        assert!(matches!(run_signed_cover(&cfg), Err(LabError::Config(_))));
    }
}
