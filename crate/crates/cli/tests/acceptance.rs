//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, TestRunner};
use serde_json::Value;

use safeswitch_core::certificates::{
    estimate_disturbance_margin, mu_analytic, mu_grid, omega_analytic, omega_grid, Certificate,
    MarginOptions,
};
use safeswitch_core::linalg::Matrix;
use safeswitch_core::primitives::{Primitive, PrimitiveLibrary, PrimitiveMap, QuadraticLyapunov};
use safeswitch_core::schema::load_library;
use safeswitch_core::simulation::{monte_carlo, CampaignConfig, CampaignReport, DisturbanceShape};
use safeswitch_core::switching::{
    count_switches, validate_dwell_time, DwellTimeBudget, SwitchingSignal,
};
use safeswitch_core::walker::{load_scenario, rotate, run_scenario, WalkerMode};

type Outcome = Result<String, String>;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(name)
}

fn shipped() -> (PrimitiveLibrary, Certificate) {
    (
        load_library(&data("walker_library.json")).unwrap(),
        Certificate::load(&data("walker_certificate.json")).unwrap(),
    )
}

fn safeswitch(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_safeswitch"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .env_remove("SAFESWITCH_SEED")
        .env_remove("SAFESWITCH_CONFIG")
        .output()
        .expect("safeswitch binary runs")
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn certify_shipped_library() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let lib = data("walker_library.json");
    let start = Instant::now();
    let o = safeswitch(&["certify", "--library", lib.to_str().unwrap()], dir.path());
    let secs = start.elapsed().as_secs_f64();
    if o.status.code() != Some(0) {
        return Err(format!(
            "exit {:?}: {}",
            o.status.code(),
            String::from_utf8_lossy(&o.stderr)
        ));
    }
    let cert =
        Certificate::load(&dir.path().join("certificate.json")).map_err(|e| e.to_string())?;
    check(
        cert.n0_bar == 2 && cert.na_bar <= 1.0 && secs < 30.0,
        format!("N0={} Na={:.6} in {secs:.2}s", cert.n0_bar, cert.na_bar),
    )
}

fn spd(a: f64, b: f64, angle: f64) -> Matrix {
    let (s, c) = angle.sin_cos();
    let r = Matrix::from_row_slice(2, 2, &[c, -s, s, c]);
    let d = Matrix::from_row_slice(2, 2, &[a, 0.0, 0.0, b]);
    let m = &r * d * r.transpose();
    (&m + m.transpose()) * 0.5
}

fn random_library() -> impl Strategy<Value = (PrimitiveLibrary, f64)> {
    let prim = (
        (-0.5f64..0.5, -0.5f64..0.5),
        (0.3f64..3.0, 0.3f64..3.0, 0.0f64..std::f64::consts::PI),
        0.5f64..2.0,
    );
    (proptest::collection::vec(prim, 2..=4), 0.05f64..0.9).prop_map(|(prims, frac)| {
        let prims: Vec<Primitive> = prims
            .into_iter()
            .enumerate()
            .map(|(id, ((cx, cy), (a, b, angle), level))| {
                let center = vec![cx, cy];
                let map = PrimitiveMap::new(
                    center.clone(),
                    Matrix::identity(2, 2) * 0.5,
                    vec![],
                    Matrix::identity(2, 2),
                )
                .unwrap();
                let v = QuadraticLyapunov::new(center, spd(a, b, angle)).unwrap();
                Primitive::new(id, map, v, level, 0.3).unwrap()
            })
            .collect();
        let lib = PrimitiveLibrary::new(prims).unwrap();
        let kappa = frac * lib.min_basin_level();
        (lib, kappa)
    })
}

fn analytic_bounds_dominate_grid() -> Outcome {
    let start = Instant::now();
    let mut runner = TestRunner::deterministic();
    let strategy = random_library();
    let mut failures = Vec::new();
    for case in 0..200 {
        let (lib, kappa) = strategy
            .new_tree(&mut runner)
            .map_err(|e| e.to_string())?
            .current();
        let run = || -> safeswitch_core::Result<(f64, f64, f64, f64)> {
            Ok((
                omega_analytic(&lib, kappa)?,
                omega_grid(&lib, kappa, 201)?,
                mu_analytic(&lib, kappa)?,
                mu_grid(&lib, kappa, 201)?,
            ))
        };
        match run() {
            Ok((oa, og, ma, mg)) if oa >= og && ma >= mg => {}
            Ok((oa, og, ma, mg)) => {
                failures.push(format!("case {case}: ω {oa} < {og} or μ {ma} < {mg}"))
            }
            Err(e) => failures.push(format!("case {case}: {e}")),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        failures.is_empty() && secs < 300.0,
        format!(
            "200 libraries at 201² grid, {} violations in {secs:.1}s{}",
            failures.len(),
            failures
                .first()
                .map(|f| format!("; first: {f}"))
                .unwrap_or_default()
        ),
    )
}

fn undisturbed_campaign() -> Result<(CampaignReport, f64, f64), String> {
    let (lib, cert) = shipped();
    let report = monte_carlo(&lib, &cert, &CampaignConfig::new(10_000, 200, 0.0, 0))
        .map_err(|e| e.to_string())?;
    Ok((report, cert.trapping_level(), lib.lambda()))
}

fn trapping(campaign: &Result<(CampaignReport, f64, f64), String>) -> Outcome {
    let (report, bound, _) = campaign.as_ref().map_err(Clone::clone)?;
    check(
        report.violating_episodes == 0 && report.trapping_level <= bound + 1e-9,
        format!(
            "10000 episodes: {} violations, trapping level {:.6} vs bound {:.6}",
            report.violating_episodes, report.trapping_level, bound
        ),
    )
}

fn disturbance_margin() -> Outcome {
    let (lib, cert) = shipped();
    let delta = estimate_disturbance_margin(&lib, &cert, &MarginOptions::default())
        .map_err(|e| e.to_string())?;
    if !(delta > 0.0) {
        return Err(format!("estimated margin {delta}"));
    }
    let campaign = |amplitude: f64, seed: u64| {
        let cfg = CampaignConfig {
            shape: DisturbanceShape::Sphere,
            ..CampaignConfig::new(10_000, 200, amplitude, seed)
        };
        monte_carlo(&lib, &cert, &cfg).map_err(|e| e.to_string())
    };
    let inside = campaign(0.9 * delta, 1)?;
    let outside = campaign(10.0 * delta, 2)?;
    check(
        inside.violating_episodes == 0 && outside.violation_rate > 0.0,
        format!(
            "δ̂={delta:.6}; 0.9δ̂: {} violations; 10δ̂: rate {:.4}",
            inside.violating_episodes, outside.violation_rate
        ),
    )
}

fn decrease_ratio(campaign: &Result<(CampaignReport, f64, f64), String>) -> Outcome {
    let (report, _, lambda) = campaign.as_ref().map_err(Clone::clone)?;
    check(
        report.max_decrease_ratio <= lambda + 1e-9,
        format!(
            "max V ratio {:.6} vs λ={:.6} over every step",
            report.max_decrease_ratio, lambda
        ),
    )
}

fn switches_brute(sigma: &[usize], lower: usize, upper: usize) -> u32 {
    (lower..upper)
        .filter(|&j| j >= 1 && sigma[j] != sigma[j - 1])
        .count() as u32
}

// Signals with a tunable switch probability so both valid and invalid
// cases occur.
fn signal() -> impl Strategy<Value = Vec<usize>> {
    (1usize..=200, 0.0f64..1.0).prop_flat_map(|(len, p)| {
        proptest::collection::vec((0.0f64..1.0, 1usize..3), len).prop_map(move |steps| {
            let mut current = 0;
            steps
                .into_iter()
                .map(|(u, jump)| {
                    if u < p {
                        current = (current + jump) % 3;
                    }
                    current
                })
                .collect()
        })
    })
}

fn brute_valid(sigma: &[usize], n0: f64, na: f64) -> bool {
    let k = sigma.len();
    let mut prefix = vec![0u32; k + 1];
    for j in 0..k {
        prefix[j + 1] = switches_brute(sigma, j, j + 1) + prefix[j];
    }
    (0..=k)
        .all(|lo| (lo..=k).all(|hi| (prefix[hi] - prefix[lo]) as f64 <= n0 + (hi - lo) as f64 / na))
}

fn switching_properties() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0),
        ..Config::default()
    });
    let strategy = (
        signal(),
        proptest::collection::vec(0usize..=200, 3),
        0.5f64..4.0,
        0.5f64..8.0,
    );
    let (mut valid_cases, mut invalid_cases) = (0usize, 0usize);
    let result = runner.run(&strategy, |(sigma, cuts, n0, na)| {
        let k = sigma.len();
        let mut c: Vec<usize> = cuts.iter().map(|v| v % (k + 1)).collect();
        c.sort_unstable();
        let s = SwitchingSignal::new(sigma.clone()).unwrap();
        let whole = count_switches(&s, c[0], c[2]).unwrap();
        let parts =
            count_switches(&s, c[0], c[1]).unwrap() + count_switches(&s, c[1], c[2]).unwrap();
        prop_assert!(whole <= parts);
        prop_assert_eq!(whole, switches_brute(&sigma, c[0], c[2]));
        let report = validate_dwell_time(&s, &DwellTimeBudget::new(n0, na).unwrap());
        prop_assert_eq!(report.valid, brute_valid(&sigma, n0, na));
        Ok(())
    });
    // Coverage of both verdicts, recomputed outside the runner.
    let mut sampler = TestRunner::deterministic();
    for _ in 0..200 {
        let (sigma, _, n0, na) = strategy.new_tree(&mut sampler).unwrap().current();
        if brute_valid(&sigma, n0, na) {
            valid_cases += 1;
        } else {
            invalid_cases += 1;
        }
    }
    match result {
        Ok(()) => check(
            valid_cases > 0 && invalid_cases > 0,
            format!("1000 cases agree with brute force (sample mix {valid_cases} valid / {invalid_cases} invalid)"),
        ),
        Err(e) => Err(format!("{e}")),
    }
}

fn ablation_drifts() -> Outcome {
    let mut s = load_scenario(&data("scenario_straight.json")).map_err(|e| e.to_string())?;
    s.mode = WalkerMode::Adaptive;
    let adaptive = run_scenario(&s).map_err(|e| e.to_string())?;
    s.mode = WalkerMode::Fixed(0);
    let ablation = run_scenario(&s).map_err(|e| e.to_string())?;
    let (a, b) = (
        adaptive.max_lateral_deviation(),
        ablation.final_lateral_deviation(),
    );
    check(
        b >= 4.0 * a && adaptive.all_in_basins(),
        format!(
            "adaptive max lateral {a:.4} m, fixed:0 final lateral {b:.4} m, adaptive in basins: {}",
            adaptive.all_in_basins()
        ),
    )
}

fn rotation_equivariance() -> Outcome {
    let s = load_scenario(&data("scenario_curved.json")).map_err(|e| e.to_string())?;
    let theta = std::f64::consts::FRAC_PI_2;
    let base = run_scenario(&s).map_err(|e| e.to_string())?;
    let turned = run_scenario(&s.rotated(theta)).map_err(|e| e.to_string())?;
    let worst = base
        .poses
        .iter()
        .zip(&turned.poses)
        .map(|(p, q)| {
            let want = rotate(p.position, theta);
            (want[0] - q.position[0])
                .abs()
                .max((want[1] - q.position[1]).abs())
        })
        .fold(0.0, f64::max);
    check(
        base.poses.len() == turned.poses.len() && worst <= 1e-9,
        format!(
            "max position error {worst:.3e} over {} poses",
            base.poses.len()
        ),
    )
}

fn strip_duration(mut manifest: Value) -> Value {
    if let Some(obj) = manifest.as_object_mut() {
        obj.remove("duration_seconds");
    }
    manifest
}

fn compare_dirs(a: &Path, b: &Path) -> Result<usize, String> {
    let mut names: Vec<_> = std::fs::read_dir(a)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    let mut other: Vec<_> = std::fs::read_dir(b)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    other.sort();
    if names != other {
        return Err(format!("file sets differ in {}", a.display()));
    }
    for name in &names {
        let (x, y) = (
            std::fs::read(a.join(name)).unwrap(),
            std::fs::read(b.join(name)).unwrap(),
        );
        if name == "manifest.json" {
            let parse = |bytes: &[u8]| strip_duration(serde_json::from_slice(bytes).unwrap());
            if parse(&x) != parse(&y) {
                return Err(format!("{} manifests differ", a.display()));
            }
        } else if x != y {
            return Err(format!("{} differs", a.join(name).display()));
        }
    }
    Ok(names.len())
}

fn reproducible_runs() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let lib = data("walker_library.json");
    let cert = data("walker_certificate.json");
    let curved = data("scenario_curved.json");
    let sigma = tmp.path().join("sigma.csv");
    let runs: Vec<(&str, Vec<&str>)> = vec![
        (
            "certify",
            vec!["certify", "--library", lib.to_str().unwrap()],
        ),
        ("scenario", vec!["scenario", curved.to_str().unwrap()]),
        (
            "validate",
            vec![
                "validate",
                "--signal",
                sigma.to_str().unwrap(),
                "--certificate",
                cert.to_str().unwrap(),
            ],
        ),
        (
            "simulate",
            vec![
                "simulate",
                "--library",
                lib.to_str().unwrap(),
                "--certificate",
                cert.to_str().unwrap(),
                "--episodes",
                "2000",
                "--amplitude",
                "0.05",
                "--keep-traces",
                "3",
                "--seed",
                "7",
            ],
        ),
    ];
    let mut files = 0;
    for (name, args) in &runs {
        let (a, b) = (
            tmp.path().join(format!("{name}_a")),
            tmp.path().join(format!("{name}_b")),
        );
        for dir in [&a, &b] {
            let o = safeswitch(args, dir);
            if o.status.code() != Some(0) {
                return Err(format!(
                    "{name} exit {:?}: {}",
                    o.status.code(),
                    String::from_utf8_lossy(&o.stderr)
                ));
            }
        }
        if *name == "scenario" {
            std::fs::copy(a.join("sigma.csv"), &sigma).map_err(|e| e.to_string())?;
        }
        files += compare_dirs(&a, &b)?;
    }
    Ok(format!("4 subcommands run twice, {files} files identical"))
}

fn main() -> ExitCode {
    let campaign = undisturbed_campaign();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (
            "certify shipped walker library",
            Box::new(certify_shipped_library),
        ),
        (
            "analytic bounds dominate grid bounds",
            Box::new(analytic_bounds_dominate_grid),
        ),
        ("undisturbed trapping", Box::new(|| trapping(&campaign))),
        ("disturbance margin", Box::new(disturbance_margin)),
        ("Lyapunov decrease", Box::new(|| decrease_ratio(&campaign))),
        (
            "switch counting and validation",
            Box::new(switching_properties),
        ),
        ("adaptive vs fixed walker", Box::new(ablation_drifts)),
        ("rotation equivariance", Box::new(rotation_equivariance)),
        ("reproducible CLI runs", Box::new(reproducible_runs)),
    ];
    let mut failed = 0;
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        match criterion() {
            Ok(detail) => println!("acceptance {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("acceptance {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
