use std::collections::BTreeMap;
use std::fmt::Write as _;

use opspace_core::linalg::{operator_norm, DEFAULT_TOL};
use opspace_core::opspace::{
    alpha_norm, assemble_en_tensor, bracket_norm, dual_bracket_norm, AlphaMask, DualCertificate, OperatorFamily,
};
use opspace_core::verify::{cuntz_table, semicircular_table, Check, Status, TableRow, TrialConfig};
use serde::Serialize;
use serde_json::json;

use crate::args::{ConvergeArgs, NormArgs, Target, VerifyArgs};
use crate::error::{Failure, EXIT_INCONCLUSIVE, EXIT_PASS, EXIT_VIOLATION};
use crate::family::parse_family;
use crate::manifest::{sidecar, write_json, RunManifest};

/// Relative agreement required between the bracket norm and the assembled
/// operator.
const ASSEMBLE_TOL: f64 = 1e-8;

pub fn verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let checks: Vec<Check> = if args.suite == "all" {
        Check::ALL.to_vec()
    } else {
        vec![args.suite.parse::<Check>().map_err(|_| {
            Failure::usage(format!(
                "unknown suite '{}'; expected one of {} or all",
                args.suite,
                Check::ALL.map(Check::name).join(", ")
            ))
        })?]
    };
    let configs: Vec<(Check, TrialConfig)> = checks.iter().map(|&c| (c, config_for(c, args))).collect();
    for (_, cfg) in &configs {
        cfg.validate()?;
    }
    std::fs::create_dir_all(&args.out).map_err(|e| Failure::io(&args.out, e))?;

    let by_name: BTreeMap<&str, &TrialConfig> = configs.iter().map(|(c, cfg)| (c.name(), cfg)).collect();
    let mut manifest = RunManifest::new(
        "verify",
        json!({"suite": args.suite, "quick": args.quick, "configs": by_name}),
    );
    let mut summary = String::new();
    let mut code = EXIT_PASS;
    let mut failure: Option<Failure> = None;
    for (check, cfg) in &configs {
        match check.run(cfg) {
            Ok(mut report) => {
                report.manifest_hash = Some(manifest.hash.clone());
                let path = args.out.join(format!("{}.json", check.name()));
                write_json(&path, &report)?;
                manifest.add_output(&path);
                let _ = writeln!(summary, "{}", report.summary_line());
                code = code.max(match report.status {
                    Status::Pass => EXIT_PASS,
                    Status::Inconclusive => EXIT_INCONCLUSIVE,
                    Status::Violation => EXIT_VIOLATION,
                });
            }
            Err(e) => {
                let f = Failure::from(e);
                let _ = writeln!(summary, "{:<10} ERROR        {}", check.name(), f.message);
                failure.get_or_insert(f);
            }
        }
    }
    let _ = writeln!(summary, "manifest {}", manifest.hash);
    let summary_path = args.out.join("summary.txt");
    std::fs::write(&summary_path, &summary).map_err(|e| Failure::io(&summary_path, e))?;
    manifest.add_output(&summary_path);
    manifest.write(&args.out.join("manifest.json"))?;
    print!("{summary}");
    match failure {
        Some(f) => Err(f),
        None => Ok(code),
    }
}

fn config_for(check: Check, args: &VerifyArgs) -> TrialConfig {
    let base = if args.quick {
        check.quick_config()
    } else {
        check.default_config()
    };
    TrialConfig {
        n: args.n.unwrap_or(base.n),
        k: args.k.unwrap_or(base.k),
        d: args.d.unwrap_or(base.d),
        radius: args.radius.unwrap_or(base.radius),
        depth: args.depth.unwrap_or(base.depth),
        trials: args.trials.unwrap_or(base.trials),
        seed: args.seed.unwrap_or(base.seed),
        tolerance: args.tolerance.unwrap_or(base.tolerance),
        mc_samples: args.mc_samples.unwrap_or(base.mc_samples),
        record_runtime: args.timing,
    }
}

#[derive(Serialize)]
struct NormEntry {
    alpha: String,
    norm: f64,
}

#[derive(Serialize)]
struct NormOutput {
    n: usize,
    k: usize,
    d: usize,
    alpha_norms: Vec<NormEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bracket: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    assembled: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dual: Option<DualCertificate>,
    manifest_hash: String,
}

pub fn norm(args: &NormArgs) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(&args.input).map_err(|e| Failure::io(&args.input, e))?;
    let fam = parse_family(&text).map_err(|e| Failure::usage(format!("{}: {e}", args.input.display())))?;
    let masks = match &args.alpha {
        Some(text) => vec![parse_mask(text, fam.k())?],
        None => AlphaMask::all(fam.k()),
    };
    let mut out = String::new();
    let mut alpha_norms = Vec::new();
    for alpha in masks {
        let value = alpha_norm(&fam, alpha)?;
        let _ = writeln!(out, "alpha {:<16} {value:.12}", alpha.to_string());
        alpha_norms.push(NormEntry {
            alpha: alpha.to_string(),
            norm: value,
        });
    }
    let mut code = EXIT_PASS;
    let bracket = if args.alpha.is_none() || args.assemble {
        let b = bracket_norm(&fam)?;
        let _ = writeln!(out, "bracket {:<14} {b:.12}", "");
        Some(b)
    } else {
        None
    };
    let assembled = match (args.assemble, bracket) {
        (true, Some(b)) => {
            let a = assembled_norm(&fam)?;
            let rel = (a - b).abs() / b.max(1.0);
            let verdict = if rel <= ASSEMBLE_TOL { "agrees" } else { "DISAGREES" };
            let _ = writeln!(
                out,
                "assembled {:<12} {a:.12} ({verdict}, relative difference {rel:.2e})",
                ""
            );
            if rel > ASSEMBLE_TOL {
                code = EXIT_VIOLATION;
            }
            Some(a)
        }
        _ => None,
    };
    let dual = if args.dual {
        let cert = dual_bracket_norm(&fam)?;
        let _ = writeln!(out, "dual {:<17} [{:.9}, {:.9}]", "", cert.lower, cert.upper);
        Some(cert)
    } else {
        None
    };
    print!("{out}");
    if let Some(path) = &args.out {
        let mut manifest = RunManifest::new(
            "norm",
            json!({"input": args.input.display().to_string(), "alpha": args.alpha, "assemble": args.assemble, "dual": args.dual, "family_sha": sha_of(&text)}),
        );
        let result = NormOutput {
            n: fam.n(),
            k: fam.k(),
            d: fam.d(),
            alpha_norms,
            bracket,
            assembled,
            dual,
            manifest_hash: manifest.hash.clone(),
        };
        write_json(path, &result)?;
        manifest.add_output(path);
        manifest.write(&sidecar(path))?;
    }
    Ok(code)
}

fn sha_of(text: &str) -> String {
    use sha2::{Digest, Sha256};
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

fn assembled_norm(fam: &OperatorFamily) -> Result<f64, Failure> {
    let tensor = assemble_en_tensor(fam)?;
    operator_norm(&tensor.operator, DEFAULT_TOL).map_err(|e| Failure::guard(e.to_string()))
}

/// `"1,3"` → `{1, 3}`; the empty string is the empty mask.
fn parse_mask(text: &str, k: usize) -> Result<AlphaMask, Failure> {
    let members = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| Failure::usage(format!("--alpha: '{s}' is not a member index")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    AlphaMask::new(k, &members).map_err(|e| Failure::usage(format!("--alpha: {e}")))
}

pub fn converge(args: &ConvergeArgs) -> Result<u8, Failure> {
    let (lo, hi) = parse_depths(&args.depths)?;
    let rows = match args.target {
        Target::Cuntz => cuntz_table(args.n, lo..=hi)?,
        Target::Semicircular => semicircular_table(args.n, lo..=hi)?,
    };
    let csv = to_csv(&rows);
    match &args.out {
        None => print!("{csv}"),
        Some(path) => {
            std::fs::write(path, &csv).map_err(|e| Failure::io(path, e))?;
            let mut manifest = RunManifest::new(
                "converge",
                json!({"target": args.target.name(), "n": args.n, "depths": [lo, hi]}),
            );
            manifest.add_output(path);
            manifest.write(&sidecar(path))?;
            print!("{csv}");
        }
    }
    Ok(EXIT_PASS)
}

fn to_csv(rows: &[TableRow]) -> String {
    let mut s = String::from("depth,value,limit,gap\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{}", r.depth, r.value, r.limit, r.gap);
    }
    s
}

/// `a..b` or `a..=b` (both inclusive), or a single depth.
fn parse_depths(text: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::usage(format!("--depths: expected 'a..b' or a single depth, got '{text}'"));
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim().trim_start_matches('=')),
        None => (text.trim(), text.trim()),
    };
    let lo: usize = lo.parse().map_err(|_| bad())?;
    let hi: usize = hi.parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(Failure::usage(format!("--depths: empty range {lo}..{hi}")));
    }
    Ok((lo, hi))
}

/// Reads `OPSPACE_THREADS` and caps the worker pool.
pub fn configure_threads(value: Option<String>) -> Result<(), Failure> {
    let Some(v) = value else { return Ok(()) };
    let threads: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::usage(format!("OPSPACE_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::usage(format!("OPSPACE_THREADS: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_ranges() {
        assert_eq!(parse_depths("4..14").unwrap(), (4, 14));
        assert_eq!(parse_depths("4..=6").unwrap(), (4, 6));
        assert_eq!(parse_depths("7").unwrap(), (7, 7));
        assert!(parse_depths("9..4").is_err());
        assert!(parse_depths("a..4").is_err());
    }

    #[test]
    fn masks() {
        assert_eq!(parse_mask("1,3", 3).unwrap().to_string(), "{1,3}");
        assert!(parse_mask("", 2).unwrap().is_empty());
        assert!(parse_mask("4", 3).is_err());
        assert!(parse_mask("x", 3).is_err());
    }

    #[test]
    fn csv_layout() {
        let rows = [TableRow {
            depth: 4,
            value: 1.25,
            limit: 1.5,
            gap: 0.25,
        }];
        assert_eq!(to_csv(&rows), "depth,value,limit,gap\n4,1.25,1.5,0.25\n");
    }
}
