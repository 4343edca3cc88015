//! One line per acceptance criterion; exits non-zero if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use opspace_core::fock::cuntz_witness_value;
use opspace_core::linalg::{operator_norm, ComplexMatrix, DEFAULT_TOL};
use opspace_core::opspace::{alpha_norm, assemble_en_tensor, bracket_norm, dual_bracket_norm, OperatorFamily};
use opspace_core::sampling::{gaussian_family, trial_rng};
use opspace_core::verify::{steinhaus_integral, Check, TrialConfig, VerificationReport};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SEED: u64 = 2024;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// 200 seeded families with n ≤ 2, k ≤ 3, d ≤ 2.
fn instances() -> Vec<OperatorFamily> {
    let mut rng = trial_rng(SEED, 100, 0);
    (0..200)
        .map(|_| {
            let (n, k, d) = (rng.gen_range(1..=2), rng.gen_range(1..=3), rng.gen_range(1..=2));
            OperatorFamily::new(n, k, d, gaussian_family(&mut rng, n.pow(k as u32), d)).unwrap()
        })
        .collect()
}

fn largest_singular_value(m: &ComplexMatrix) -> f64 {
    m.singular_values().into_iter().fold(0.0, f64::max)
}

fn criterion_1() -> Outcome {
    let fams = instances();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for fam in &fams {
        let bracket = bracket_norm(fam).map_err(|e| e.to_string())?;
        let tensor = assemble_en_tensor(fam).map_err(|e| e.to_string())?;
        worst = worst.max(relative(bracket, largest_singular_value(&tensor.operator)));
    }
    let elapsed = start.elapsed();
    ensure(worst <= 1e-8, || format!("relative difference {worst:.2e}"))?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "200 instances, max relative difference {worst:.2e}, {elapsed:.2?}"
    ))
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for fam in instances() {
        let tensor = assemble_en_tensor(&fam).map_err(|e| e.to_string())?;
        let mut max = 0.0f64;
        for (alpha, t) in &tensor.components {
            let piece = operator_norm(t, DEFAULT_TOL).map_err(|e| e.to_string())?;
            let direct = alpha_norm(&fam, *alpha).map_err(|e| e.to_string())?;
            worst = worst.max(relative(piece, direct));
            max = max.max(piece);
        }
        worst = worst.max(relative(largest_singular_value(&tensor.operator), max));
    }
    ensure(worst <= 1e-8, || format!("relative difference {worst:.2e}"))?;
    Ok(format!("every ‖T_α‖ and ‖ΣT_α‖ = max agree, worst {worst:.2e}"))
}

fn run(check: Check, cfg: TrialConfig) -> Result<VerificationReport, String> {
    check.run(&cfg).map_err(|e| format!("{}: {e}", check.name()))
}

fn no_violations(report: &VerificationReport, labels: &[&str]) -> Result<(), String> {
    ensure(report.pass, || {
        let bad: Vec<_> = report
            .trials
            .iter()
            .filter(|r| r.is_violation(report.config.tolerance))
            .map(|r| format!("{} (trial {}, margin {:.2e})", r.label, r.trial, r.margin))
            .collect();
        format!("{}: {}", report.check, bad.join("; "))
    })?;
    for label in labels {
        ensure(report.records(label).count() > 0, || {
            format!("{}: no '{label}' records", report.check)
        })?;
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    let combos = [(2, 1), (2, 2), (2, 4), (3, 1), (3, 2), (3, 4)];
    let (mut trials, mut min_margin) = (0, f64::INFINITY);
    for (i, &(n, d)) in combos.iter().enumerate() {
        let count = 200 / combos.len() + usize::from(i < 200 % combos.len());
        let cfg = TrialConfig {
            n,
            k: 1,
            d,
            radius: 5,
            trials: count,
            seed: SEED,
            ..TrialConfig::default()
        };
        let report = run(Check::Prop11, cfg)?;
        no_violations(
            &report,
            &[
                "row-column lower bound",
                "twice row-column upper bound",
                "split identity on interior",
                "u row sum at most one",
                "v column sum at most one",
            ],
        )?;
        trials += count;
        min_margin = min_margin.min(report.aggregate.min_margin);
    }
    Ok(format!(
        "{trials} trials over n ∈ {{2,3}}, d ∈ {{1,2,4}}, radius 5, min margin {min_margin:.2e}"
    ))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let values: Vec<f64> = (4..=14)
        .map(|depth| cuntz_witness_value(4, depth))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let four = start.elapsed();
    let start = Instant::now();
    let one = cuntz_witness_value(1, 14).map_err(|e| e.to_string())?;
    let single = start.elapsed();
    let c = values[values.len() - 1];
    ensure((1.45..=1.5).contains(&c), || format!("c(4,14) = {c}"))?;
    ensure(values.windows(2).all(|w| w[0] <= w[1] + 1e-12), || {
        format!("not monotone: {values:?}")
    })?;
    ensure((0.97..=1.0).contains(&one), || format!("c(1,14) = {one}"))?;
    ensure(four.max(single) < Duration::from_secs(60), || {
        format!("took {four:?} and {single:?}")
    })?;
    Ok(format!(
        "c(4,14) = {c:.6} (limit 1.5), c(1,14) = {one:.6} (limit 1), monotone, {four:.2?} + {single:.2?}"
    ))
}

fn criterion_5() -> Outcome {
    let cfg = TrialConfig {
        n: 3,
        k: 1,
        d: 2,
        depth: 10,
        trials: 50,
        seed: SEED,
        ..TrialConfig::default()
    };
    let start = Instant::now();
    let report = run(Check::Prop48, cfg)?;
    no_violations(
        &report,
        &[
            "tau of x_k squared is one quarter",
            "tau of x_k x_l vanishes",
            "semicircular upper bound",
            "semicircular lower bound",
        ],
    )?;
    Ok(format!(
        "moments within 1e-12, {} records at n=3, d=2, depth 10, min margin {:.2e}, {:.1?}",
        report.aggregate.records,
        report.aggregate.min_margin,
        start.elapsed()
    ))
}

/// E|1 + e^{it}| by the trapezoid rule on (1/2π)∫ 2|cos(t/2)| dt.
fn quadrature_reference() -> f64 {
    let steps = 200_000;
    let h = 2.0 * PI / steps as f64;
    let sum: f64 = (0..steps).map(|i| 2.0 * (0.5 * (i as f64 + 0.5) * h).cos().abs()).sum();
    sum * h / (2.0 * PI)
}

fn criterion_6() -> Outcome {
    let target = 4.0 / PI;
    let quad = quadrature_reference();
    ensure((quad - target).abs() < 1e-9, || format!("quadrature gives {quad}"))?;
    let one = ComplexMatrix::identity(1);
    let xi = OperatorFamily::new(2, 1, 1, vec![one.clone(), one]).map_err(|e| e.to_string())?;
    let est = steinhaus_integral(&xi, 20_000, &mut trial_rng(SEED, 200, 0));
    let cert = dual_bracket_norm(&xi).map_err(|e| e.to_string())?;
    let band = 3.0 * est.sigma;
    ensure((est.mean - target).abs() <= band, || {
        format!("estimate {:.6} vs 4/π, 3σ = {band:.2e}", est.mean)
    })?;
    ensure(
        cert.lower / 2.0 - band <= est.mean && est.mean <= cert.upper + band,
        || {
            format!(
                "estimate {:.6} outside [{:.6}, {:.6}]",
                est.mean,
                cert.lower / 2.0 - band,
                cert.upper + band
            )
        },
    )?;
    Ok(format!(
        "estimate {:.6} vs 4/π = {target:.6} (quadrature {quad:.9}), σ = {:.2e}, certificates [{:.6}, {:.6}]",
        est.mean, est.sigma, cert.lower, cert.upper
    ))
}

fn criterion_7() -> Outcome {
    let cfg = TrialConfig {
        n: 2,
        k: 2,
        d: 2,
        trials: 20,
        mc_samples: 20_000,
        seed: SEED,
        ..TrialConfig::default()
    };
    let report = run(Check::Khintchine, cfg)?;
    no_violations(
        &report,
        &[
            "integral below dual upper certificate",
            "integral above scaled dual lower certificate",
        ],
    )?;
    ensure(report.aggregate.inconclusive == 0, || {
        format!("{} inconclusive", report.aggregate.inconclusive)
    })?;
    Ok(format!(
        "20 families, constant 1/16, min margin {:.2e}",
        report.aggregate.min_margin
    ))
}

fn criterion_8() -> Outcome {
    let mut parts = Vec::new();
    for k in 1..=2 {
        let cfg = TrialConfig {
            n: 2,
            k,
            d: 2,
            trials: 100,
            seed: SEED,
            ..TrialConfig::default()
        };
        let report = run(Check::Theorem0k, cfg)?;
        no_violations(&report, &["amplification ratio below cap"])?;
        let worst = report
            .records("amplification ratio below cap")
            .map(|r| r.lhs)
            .fold(0.0, f64::max);
        parts.push(format!(
            "k={k}: max ratio {worst:.4} vs cap {:.4}",
            2f64.powf(1.5 * k as f64 - 1.0)
        ));
    }
    Ok(format!("100 trials each, {}", parts.join(", ")))
}

fn criterion_9() -> Outcome {
    let cfg = TrialConfig {
        n: 2,
        k: 1,
        d: 2,
        depth: 4,
        trials: 10,
        seed: SEED,
        ..TrialConfig::default()
    };
    let report = run(Check::Prop49, cfg)?;
    no_violations(
        &report,
        &[
            "complement compression vanishes on interior",
            "u column sum at most one",
            "v row sum at most one",
            "delta lower bound",
            "twice row-column upper bound",
        ],
    )?;
    let residual = report
        .records("complement compression vanishes on interior")
        .map(|r| r.lhs)
        .fold(0.0, f64::max);
    Ok(format!(
        "10 instances at depth 4, interior residual {residual:.2e}, min margin {:.2e}",
        report.aggregate.min_margin
    ))
}

fn quick_run(dir: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_opspace"))
        .args(["verify", "all", "--quick", "--seed", "7", "--out"])
        .arg(dir)
        .stdout(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    ensure(status.success(), || format!("exit status {status}"))
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let (a, b) = (
        tempfile::tempdir().map_err(|e| e.to_string())?,
        tempfile::tempdir().map_err(|e| e.to_string())?,
    );
    quick_run(a.path())?;
    quick_run(b.path())?;
    let elapsed = start.elapsed();
    for check in Check::ALL {
        let name = format!("{}.json", check.name());
        let read = |dir: &Path| std::fs::read(dir.join(&name)).map_err(|e| format!("{name}: {e}"));
        ensure(read(a.path())? == read(b.path())?, || format!("{name} differs"))?;
    }
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} reports byte-identical across two runs, {elapsed:.1?} total",
        Check::ALL.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("bracket norm equals assembled operator", criterion_1),
        ("assembled operator decomposes by mask", criterion_2),
        ("prop11 sandwich", criterion_3),
        ("Cuntz witness constant", criterion_4),
        ("prop48 moments and sandwich", criterion_5),
        ("Khintchine k=1 scalar integral", criterion_6),
        ("Khintchine k=2 sandwich", criterion_7),
        ("theorem0k amplification cap", criterion_8),
        ("prop49 free product", criterion_9),
        ("quick run determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
