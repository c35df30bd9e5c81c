//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use sumprod_core::energy::FpSet;
use sumprod_core::freiman::{is_freiman_hom, PartialMap};
use sumprod_core::group::{ElementCode, GroupDesc};
use sumprod_core::incidence::{sdz_report, LineSet};
use sumprod_lab::checks::{self, SuiteOutcome};
use sumprod_lab::config::Scenario;
use sumprod_lab::rng::trial_rng;
use sumprod_lab::scenarios;
use sumprod_lab::{run_with_workers, GroupChoice, ScenarioConfig, ScenarioReport, Value};

const SEED: u64 = 20240617;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        ok,
        detail: detail.into(),
    }
}

fn suites(outcomes: &[SuiteOutcome]) -> Verdict {
    let ok = outcomes.iter().all(SuiteOutcome::passed);
    let detail = outcomes
        .iter()
        .map(|o| match &o.first_failure {
            Some(f) => format!("{}: {}/{} failed, first: {f}", o.suite, o.failures, o.checks),
            None => format!("{}: {} checks", o.suite, o.checks),
        })
        .collect::<Vec<_>>()
        .join("; ");
    verdict(ok, detail)
}

fn rows_of<'a>(r: &'a ScenarioReport, kind: &'a str) -> impl Iterator<Item = &'a sumprod_lab::Row> + 'a {
    r.rows
        .iter()
        .filter(move |row| row.get("kind") == Some(&Value::Text(kind.to_string())))
}

fn int(row: &sumprod_lab::Row, col: &str) -> i128 {
    row.get(col)
        .and_then(Value::as_int)
        .unwrap_or_else(|| panic!("column {col} is not an integer"))
}

fn criterion_1() -> Verdict {
    let mut out = vec![checks::representation_homomorphism(3)];
    out.extend([3, 5, 7].map(checks::commutation_identities));
    // every irrep of both groups, both phases, all 729 + 36 pairs
    let enough = out[0].checks >= 2 * (729 + 36);
    let mut v = suites(&out);
    v.ok &= enough;
    v
}

fn criterion_2() -> Verdict {
    let mut rng = trial_rng(SEED, Scenario::Selftest, 100, 0);
    suites(&[checks::fourier_identities(&mut rng, &[3, 5, 7], 100, false)])
}

fn criterion_3() -> Verdict {
    let mut rng = trial_rng(SEED, Scenario::Selftest, 101, 0);
    suites(&[checks::energy_oracles(&mut rng, &[3, 5, 7], 100, 50)])
}

fn criterion_4() -> Verdict {
    let mut cfg = ScenarioConfig::new(Scenario::CommutatorCover)
        .with_seed(SEED)
        .with_ps(&[3, 5])
        .with_trials(1000);
    cfg.group = GroupChoice::Heisenberg;
    let r = match scenarios::run_commutator_cover(&cfg) {
        Ok(r) => r,
        Err(e) => return verdict(false, e.to_string()),
    };
    let hyp = r
        .rows
        .iter()
        .all(|row| int(row, "hypothesis_lhs") > int(row, "hypothesis_rhs"));
    let covered = r.rows.iter().filter(|row| int(row, "covered") == int(row, "p")).count();
    verdict(
        r.rows.len() == 2000 && hyp && r.failures() == 0,
        format!(
            "{covered}/{} trials cover the center, {} failures",
            r.rows.len(),
            r.failures()
        ),
    )
}

fn criterion_5() -> Verdict {
    let cfg = ScenarioConfig::new(Scenario::SignedCover)
        .with_seed(SEED)
        .with_trials(1000);
    let signed = match scenarios::run_signed_cover(&cfg) {
        Ok(r) => r,
        Err(e) => return verdict(false, e.to_string()),
    };
    let mut aff = ScenarioConfig::new(Scenario::CommutatorCover)
        .with_seed(SEED)
        .with_ps(&[5])
        .with_trials(1000);
    aff.group = GroupChoice::Affine;
    let comm = match scenarios::run_commutator_cover(&aff) {
        Ok(r) => r,
        Err(e) => return verdict(false, e.to_string()),
    };
    let trials: Vec<_> = rows_of(&signed, "trial").collect();
    let min_size = |p: i128| trials.iter().filter(|r| int(r, "p") == p).map(|r| int(r, "size")).min();
    let sizes_ok = min_size(3) >= Some(16) && min_size(5) >= Some(12);
    let witnesses = rows_of(&signed, "witness").count();
    verdict(
        trials.len() == 2000 && comm.rows.len() == 1000 && sizes_ok && signed.failures() == 0 && comm.failures() == 0,
        format!(
            "signed products: {} trials, min |A| {:?} (H_1(F_3)) {:?} (Aff(F_5)), {} failures, {witnesses} witnesses below threshold; Aff commutators: {} failures",
            trials.len(),
            min_size(3),
            min_size(5),
            signed.failures(),
            comm.failures()
        ),
    )
}

fn criterion_6() -> Verdict {
    let cfg = ScenarioConfig::new(Scenario::GrowthBounds).with_seed(SEED);
    let r = match scenarios::run_growth_bounds(&cfg) {
        Ok(r) => r,
        Err(e) => return verdict(false, e.to_string()),
    };
    let growth: Vec<_> = rows_of(&r, "growth").collect();
    let bad = growth.iter().filter(|row| row.failed()).count();
    verdict(
        growth.len() == 1600 && bad == 0,
        format!("{} sets, {bad} violations", growth.len()),
    )
}

/// Re-checks a Freiman witness from scratch.
fn witness_ok(g: GroupDesc, rho: &PartialMap, signs: &[i8], left: &[ElementCode], right: &[ElementCode]) -> bool {
    let prod = |xs: &[ElementCode]| {
        let mut acc = g.identity();
        for (&x, &s) in xs.iter().zip(signs) {
            acc = g.mul(acc, if s > 0 { x } else { g.inv(x) });
        }
        acc
    };
    let img = |xs: &[ElementCode]| -> Option<Vec<ElementCode>> {
        xs.iter()
            .map(|x| rho.domain.iter().position(|d| d == x).map(|i| rho.image[i]))
            .collect()
    };
    match (img(left), img(right)) {
        (Some(l), Some(r)) => prod(left) == prod(right) && prod(&l) != prod(&r),
        _ => false,
    }
}

fn criterion_7() -> Verdict {
    let cfg = ScenarioConfig::new(Scenario::Freiman)
        .with_seed(SEED)
        .with_ps(&[5, 7])
        .with_trials(20);
    let r = match scenarios::run_freiman(&cfg) {
        Ok(r) => r,
        Err(e) => return verdict(false, e.to_string()),
    };
    let doubling: Vec<String> = rows_of(&r, "doubling")
        .map(|row| format!("p={} |A_*A_*|={}", int(row, "p"), int(row, "value")))
        .collect();
    let mut ok = r.failures() == 0 && doubling.len() == 2;
    ok &= rows_of(&r, "identity_iso").count() == 2 && rows_of(&r, "injected_violation").count() == 2;
    for p in [5, 7] {
        let g = GroupDesc::heisenberg(p, 1).expect("prime");
        let rho = PartialMap::new(
            g,
            g,
            vec![ElementCode(0), ElementCode(1), ElementCode(2)],
            vec![ElementCode(0), ElementCode(1), ElementCode(3)],
        )
        .expect("valid map");
        match is_freiman_hom(&rho, 2) {
            Ok((false, Some(w))) => ok &= witness_ok(g, &rho, &w.signs, &w.left, &w.right),
            _ => ok = false,
        }
    }
    verdict(
        ok,
        format!(
            "{}; identity 5-isomorphisms and injected violation rows pass",
            doubling.join(", ")
        ),
    )
}

fn criterion_8() -> Verdict {
    let mut rng = trial_rng(SEED, Scenario::Selftest, 102, 0);
    let mut v = suites(&[checks::incidence_bounds(&mut rng, &[5, 7], 100, &[5, 7, 11], 10_000)]);
    for p in [5, 7, 11] {
        let full = FpSet::full(p).expect("prime");
        let rep = sdz_report(&full, &full, &LineSet::all(p).expect("prime")).expect("report");
        v.ok &= rep.ratio == 0.0;
        v.detail.push_str(&format!("; full grid p={p} ratio {}", rep.ratio));
    }
    v
}

fn finite_column(r: &ScenarioReport, col: &str) -> bool {
    r.rows
        .iter()
        .all(|row| matches!(row.get(col), Some(Value::Float(x)) if x.is_finite()))
}

fn criterion_9() -> Verdict {
    let run = |s: Scenario| {
        let cfg = ScenarioConfig::new(s).with_seed(SEED);
        scenarios::run_scenario(&cfg, s)
    };
    let (growth, bricks, cosets) = match (
        run(Scenario::GrowthBounds),
        run(Scenario::BrickEnergy),
        run(Scenario::CosetCover),
    ) {
        (Ok(a), Ok(b), Ok(c)) => (a, b, c),
        (a, b, c) => {
            let e = [a.err(), b.err(), c.err()]
                .into_iter()
                .flatten()
                .map(|e| e.to_string())
                .collect::<Vec<_>>();
            return verdict(false, e.join("; "));
        }
    };
    let planar: Vec<_> = growth
        .rows
        .iter()
        .filter(|r| matches!(r.get("kind"), Some(Value::Text(k)) if k.ends_with("7_4")))
        .collect();
    let planar_finite = planar
        .iter()
        .all(|row| matches!(row.get("ratio"), Some(Value::Float(x)) if x.is_finite()));
    let anchors_7_4 = rows_of(&growth, "anchor_7_4").filter(|r| !r.failed()).count();
    let brick_anchor = bricks
        .rows
        .iter()
        .filter(|r| r.get("anchor_pass") == Some(&Value::Bool(true)))
        .count();
    let coset_anchor = rows_of(&cosets, "anchor").filter(|r| !r.failed()).count();
    let tables = planar_finite
        && finite_column(&bricks, "ratio")
        && finite_column(&bricks, "mixed_add_ratio")
        && finite_column(&cosets, "ratio")
        && finite_column(&cosets, "cond_ratio");
    let ok = tables
        && anchors_7_4 == 2
        && brick_anchor == 3
        && coset_anchor == 2
        && bricks.failures() == 0
        && cosets.failures() == 0;
    verdict(
        ok,
        format!(
            "{} planar rows, {} brick rows, {} coset rows, finite={tables}; exact anchors: |A^2| = p|A| {anchors_7_4}/2, E = p^9 {brick_anchor}/3, coverage p^(2n) {coset_anchor}/2; min brick ratio {:.4}",
            planar.len(),
            bricks.rows.len(),
            cosets.rows.len(),
            bricks.min_ratio().unwrap_or(f64::NAN)
        ),
    )
}

fn csv_all(reports: &[ScenarioReport]) -> String {
    reports
        .iter()
        .map(ScenarioReport::to_csv_string)
        .collect::<Vec<_>>()
        .join("\n")
}

fn criterion_10() -> Verdict {
    let cfg = ScenarioConfig::new(Scenario::All).with_seed(SEED);
    let start = Instant::now();
    let one = match run_with_workers(&cfg, 1) {
        Ok(r) => r,
        Err(e) => return verdict(false, e.to_string()),
    };
    let single = start.elapsed();
    let two = run_with_workers(&cfg, 2).expect("second run");
    let again = run_with_workers(&cfg, 1).expect("third run");
    let other = run_with_workers(&cfg.clone().with_seed(SEED + 1), 2).expect("other seed");
    let failures: usize = one.iter().map(ScenarioReport::failures).sum();
    let other_failures: usize = other.iter().map(ScenarioReport::failures).sum();
    let same = csv_all(&one) == csv_all(&two) && csv_all(&one) == csv_all(&again);
    let differs = csv_all(&one) != csv_all(&other);
    verdict(
        one.len() == 7 && failures == 0 && other_failures == 0 && same && differs && single < Duration::from_secs(600),
        format!(
            "full default suite in {:.1}s on one worker, {failures} failures (seed {}: {other_failures}); byte-identical across 1/2 workers and reruns: {same}",
            single.as_secs_f64(),
            SEED + 1
        ),
    )
}

fn main() -> ExitCode {
    let limits: [(fn() -> Verdict, Option<u64>); 10] = [
        (criterion_1, Some(10)),
        (criterion_2, Some(60)),
        (criterion_3, Some(60)),
        (criterion_4, Some(300)),
        (criterion_5, Some(300)),
        (criterion_6, None),
        (criterion_7, None),
        (criterion_8, None),
        (criterion_9, None),
        (criterion_10, Some(4 * 600)),
    ];
    let mut failed = 0;
    for (i, (f, limit)) in limits.into_iter().enumerate() {
        let start = Instant::now();
        let mut v = f();
        let took = start.elapsed();
        if let Some(s) = limit {
            if took > Duration::from_secs(s) {
                v.ok = false;
                v.detail.push_str(&format!("; over the {s}s limit"));
            }
        }
        failed += usize::from(!v.ok);
        println!(
            "criterion {}: {} ({:.2}s) {}",
            i + 1,
            if v.ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            v.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
