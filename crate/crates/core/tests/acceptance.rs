//! Acceptance gate: one line per criterion, non-zero exit if any fails.

mod common;

use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;
use risplan::comparison::{min_power_relay, min_power_ris, min_power_siso, ComparisonSetup};
use risplan::dimensioning::*;
use risplan::placement::{angdist_deg, best_orientation, greedy_place, serves, ANGLE_EPS_DEG};
use risplan::propagation::*;
use risplan::table::fmt_sig;
use risplan::{step_range, Point3, Scene};

type Check = fn() -> Outcome;
type PowerFn<'a> = &'a dyn Fn(&ComparisonSetup, f64) -> f64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn ac1_sizing_identity() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(1);
    let mut worst_gain = 0.0f64;
    let mut area_ok = true;
    for _ in 0..1000 {
        let lambda = rng.gen_range(1e-3..0.6);
        let rho_t = rng.gen_range(1.0..1000.0);
        let rho_r = rng.gen_range(1.0..1000.0);
        let rho_d = rng.gen_range(1.0..2000.0);
        let area = required_area(lambda, rho_t, rho_r, rho_d).unwrap();
        let ris = ris_gain_for_area(area, 1.0, rho_t, rho_r, 0.0, 0.0).unwrap();
        let direct = fspl_gain(lambda, rho_d).unwrap();
        worst_gain = worst_gain.max((ris - direct).abs() / direct);
        let n = required_elements(lambda, rho_t, rho_r, rho_d).unwrap() as f64;
        let cell = (lambda / 2.0).powi(2);
        area_ok &= (n * cell - area).abs() <= cell;
    }
    let elapsed = start.elapsed();
    outcome(
        worst_gain < 1e-12 && area_ok && within(elapsed, 1.0),
        format!(
            "max rel gain error {worst_gain:.2e}, area within one element: {area_ok}, {:.3} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn ac2_reference_sizes() -> Outcome {
    let l121 = ris_size_from_elements(121, wavelength(6e9)).unwrap();
    let l484 = ris_size_from_elements(484, wavelength(6e9)).unwrap();
    let l2500 = ris_size_from_elements(2500, wavelength(28e9)).unwrap();
    outcome(
        l121 == 0.275 && l484 == 0.55 && fmt_sig(l2500) == "0.267857",
        format!("L(121)={l121} m, L(484)={l484} m, L(2500 @ 28 GHz)={} m", fmt_sig(l2500)),
    )
}

fn ac3_crossover() -> Outcome {
    let start = Instant::now();
    let q = DimensioningQuery::new(LinkModelParams::new(6e9).unwrap(), GeometryMode::Symmetric);
    let lambda = q.params.wavelength_m();
    let table = pathloss_curve(&q, &[484], &step_range(1.0, 100.0, 0.01)).unwrap();
    let first = table.first_crossover(0);
    let closed = symmetric_crossover_distance(484.0 * (lambda / 2.0).powi(2), lambda, 20.0);
    let elapsed = start.elapsed();
    let pass = first.is_some_and(|d| (d - 85.56).abs() <= 0.5) && (closed - 85.56).abs() <= 0.5 && within(elapsed, 1.0);
    outcome(
        pass,
        format!(
            "first sweep crossover {:?} m, closed form {} m, {:.3} s",
            first,
            fmt_sig(closed),
            elapsed.as_secs_f64()
        ),
    )
}

fn ac4_sufficiency_28ghz() -> Outcome {
    let q = DimensioningQuery::new(LinkModelParams::new(28e9).unwrap(), GeometryMode::FixedRhoT(20.0));
    let t = pathloss_curve(&q, &[625, 2500], &step_range(20.0, 100.0, 0.5)).unwrap();
    let not_above: Vec<f64> = t
        .rows
        .iter()
        .filter(|r| r.pl_ris_db[0] <= r.pl_blocked_db)
        .map(|r| r.distance)
        .collect();
    let not_below = t.rows.iter().filter(|r| r.pl_ris_db[1] >= r.pl_blocked_db).count();
    let first = &t.rows[0];
    let mut detail = format!(
        "N=625 above blocked at {}/{} points, N=2500 below at {}/{}",
        t.rows.len() - not_above.len(),
        t.rows.len(),
        t.rows.len() - not_below,
        t.rows.len()
    );
    if let (Some(lo), Some(hi)) = (not_above.first(), not_above.last()) {
        detail.push_str(&format!(
            "; N=625 is sufficient for rho_r in [{lo}, {hi}] m (at 20 m: RIS {:.2} dB vs blocked {:.2} dB)",
            first.pl_ris_db[0], first.pl_blocked_db
        ));
    }
    outcome(not_above.is_empty() && not_below == 0, detail)
}

fn ac5_power_properties() -> Outcome {
    let start = Instant::now();
    let setup = |f: f64| ComparisonSetup::new(LinkModelParams::new(f).unwrap());
    let (s6, s27) = (setup(6e9), setup(27e9));
    let d1s = step_range(20.0, 120.0, 1.0);
    let curve = |s: &ComparisonSetup, which: PowerFn| -> Vec<f64> {
        d1s.iter().map(|&d| which(s, d)).collect()
    };
    let siso = |s: &ComparisonSetup, d: f64| min_power_siso(s, d).unwrap();
    let relay = |s: &ComparisonSetup, d: f64| min_power_relay(s, d).unwrap();
    let ris25 = |s: &ComparisonSetup, d: f64| min_power_ris(s, d, 25).unwrap();
    let ris250 = |s: &ComparisonSetup, d: f64| min_power_ris(s, d, 250).unwrap();

    let p_siso = curve(&s6, &siso);
    let p_relay = curve(&s6, &relay);
    let p25 = curve(&s6, &ris25);
    let p250 = curve(&s6, &ris250);

    let a = p_siso.windows(2).all(|w| w[1] > w[0]);
    let b = (0..d1s.len()).all(|i| p250[i] < p25[i] && p25[i] < p_siso[i]);
    let spread = |v: &[f64]| {
        v.iter().cloned().fold(f64::MIN, f64::max) / v.iter().cloned().fold(f64::MAX, f64::min)
    };
    let c = spread(&p_relay) < spread(&p_siso);
    let schemes: [PowerFn; 4] = [&siso, &relay, &ris25, &ris250];
    let d = schemes
        .iter()
        .all(|f| curve(&s27, f).iter().zip(curve(&s6, f)).all(|(hi, lo)| *hi > lo));
    let elapsed = start.elapsed();
    outcome(
        a && b && c && d && within(elapsed, 1.0),
        format!(
            "(a) {a} (b) {b} (c) {c} [relay {:.2} vs siso {:.2}] (d) {d}, {:.3} s",
            spread(&p_relay),
            spread(&p_siso),
            elapsed.as_secs_f64()
        ),
    )
}

/// Served count at every 0.05° orientation using only azimuth arithmetic.
fn lattice_max(scene: &Scene, ris: &Point3, targets: &[(usize, Point3)]) -> usize {
    let theta = scene.fov_half_angle_deg() + ANGLE_EPS_DEG;
    let bs_az = ris.azimuth_to(&scene.bs());
    let az: Vec<f64> = targets.iter().map(|(_, p)| ris.azimuth_to(p)).collect();
    (0..7200)
        .map(|k| k as f64 * 0.05)
        .filter(|&phi| angdist_deg(phi, bs_az) <= theta)
        .map(|phi| az.iter().filter(|&&a| angdist_deg(phi, a) <= theta).count())
        .max()
        .unwrap_or(0)
}

fn ac6_orientation_oracle() -> Outcome {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut total_targets = 0;
    for seed in 0..100u64 {
        let scene = common::random_scene(10_000 + seed, 1);
        let ris = scene.candidates()[0];
        let best = best_orientation(&scene, 0).unwrap();
        let targets = common::visible_targets(&scene, &ris, &common::not_bs_mask(&scene));
        total_targets += targets.len();
        let oracle = lattice_max(&scene, &ris, &targets);
        if oracle != best.covered.len() {
            mismatches.push((seed, best.covered.len(), oracle));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches.is_empty() && within(elapsed, 30.0),
        format!(
            "100 scenes, {total_targets} visible targets, mismatches {:?}, {:.2} s",
            mismatches,
            elapsed.as_secs_f64()
        ),
    )
}

fn ac7_greedy_soundness() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    for seed in 0..20u64 {
        let scene = common::random_scene(20_000 + seed, 5);
        let (plan, grid) = greedy_place(&scene, 2).unwrap();
        let mask = common::not_bs_mask(&scene);

        // Exhaustive single placement: every arc endpoint of every candidate.
        let singles: Vec<usize> = scene
            .candidates()
            .iter()
            .map(|c| common::endpoint_max(&scene, c, &common::visible_targets(&scene, c, &mask)))
            .collect();
        let best = *singles.iter().max().unwrap();
        let first_best = singles.iter().position(|&s| s == best).unwrap();
        let first = &plan.placements[0];
        if first.newly_covered_count != best || first.candidate_index != first_best {
            failures.push(format!("seed {seed}: first pick {first:?} vs exhaustive {singles:?}"));
        }

        let mut union = std::collections::BTreeSet::new();
        let mut last = 0;
        for p in &plan.placements {
            union.extend(p.covered.iter().copied());
            if union.len() < last {
                failures.push(format!("seed {seed}: cumulative coverage shrank"));
            }
            last = union.len();
        }

        let points = scene.grid().points();
        let (bs, theta) = (scene.bs(), scene.fov_half_angle_deg());
        for p in &plan.placements {
            for &i in &p.covered {
                let ok = mask[i]
                    && scene.segment_los(&p.position, &points[i])
                    && scene.segment_los(&p.position, &bs)
                    && serves(&p.position, &bs, &points[i], p.orientation_deg, theta);
                if !ok {
                    failures.push(format!("seed {seed}: point {i} fails audit"));
                }
            }
        }
        let labelled: usize = (0..plan.placements.len())
            .map(|k| grid.count(risplan::placement::CoverageLabel::Ris(k)))
            .sum();
        if labelled != union.len() {
            failures.push(format!("seed {seed}: {labelled} labelled vs {} covered", union.len()));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures.is_empty() && within(elapsed, 30.0),
        format!("20 scenes, failures {:?}, {:.2} s", failures, elapsed.as_secs_f64()),
    )
}

fn ac8_propagation_oracles() -> Outcome {
    let j0 = knife_edge_loss_from_v(0.0);
    let clamp = knife_edge_loss_from_v(-0.78) == 0.0 && knife_edge_loss_from_v(-3.0) == 0.0;

    let lambda = wavelength(3e9);
    let mut worst = 0.0f64;
    for d in [1.0, 10.0, 100.0, 1e3, 1e4, 1e5] {
        let g = two_ray_gain(lambda, d, 10.0, 1.5, Complex64::new(0.0, 0.0)).unwrap();
        let free = fspl_gain(lambda, d.hypot(8.5)).unwrap();
        worst = worst.max((g - free).abs() / free);
    }
    let loss = |d: f64| loss_db(two_ray_gain(lambda, d, 10.0, 1.5, Complex64::new(-1.0, 0.0)).unwrap());
    let slopes = [loss(1e5) - loss(1e4), loss(1e6) - loss(1e5)];
    let slope_ok = slopes.iter().all(|s| (s - 40.0).abs() <= 0.5);

    let los = umi_path_loss_db(3e9, 100.0, true).unwrap();
    let nlos = umi_path_loss_db(3e9, 100.0, false).unwrap();
    // NLOS reference evaluated from the model formula.
    let pass = (j0 - 6.03).abs() <= 0.02
        && clamp
        && worst < 1e-12
        && slope_ok
        && (los - 83.94).abs() <= 0.01
        && (nlos - 103.163).abs() <= 0.01;
    outcome(
        pass,
        format!(
            "J(0)={j0:.4} dB, clamp {clamp}, two-ray vs FSPL {worst:.1e}, slopes {:.3}/{:.3} dB/dec, UMi {los:.3}/{nlos:.3} dB",
            slopes[0], slopes[1]
        ),
    )
}

fn ac9_determinism() -> Outcome {
    let scene = common::random_scene(42, 5);
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: usize| {
        let dir = tmp.path().join(name);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| risplan::cli::cmd_place(&scene, 3, &dir, &[])).unwrap();
        ["plan.json", "coverage.csv", "coverage.pgm", "summary.txt"]
            .map(|f| fs::read(dir.join(f)).unwrap())
    };
    let a = run("a", 1);
    let b = run("b", 4);
    let c = run("c", 4);
    let same = a == b && b == c;
    outcome(same, format!("3 runs (1 and 4 threads), byte-identical: {same}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 9] = [
        ("AC1 sizing identity", ac1_sizing_identity),
        ("AC2 reference RIS sizes", ac2_reference_sizes),
        ("AC3 6 GHz crossover", ac3_crossover),
        ("AC4 28 GHz sufficiency", ac4_sufficiency_28ghz),
        ("AC5 transmit power properties", ac5_power_properties),
        ("AC6 orientation sweep oracle", ac6_orientation_oracle),
        ("AC7 greedy soundness", ac7_greedy_soundness),
        ("AC8 propagation oracles", ac8_propagation_oracles),
        ("AC9 determinism", ac9_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
