use rand::Rng;

use super::montecarlo::steinhaus_integral;
use super::{precondition, run_trials, Check, TrialConfig, TrialRecord, VerificationReport, VerifyError};
use crate::opspace::{dual_alpha_norm, dual_bracket_norm, AlphaMask, OperatorFamily, MAX_DUAL_COORDINATES};
use crate::sampling::gaussian_family;

const KHINTCHINE_CLAIM: &str = "c_k·[(ξ_J)]*_(k) ≤ ∫‖Σ ε_J ξ_J‖_1 dμ^k ≤ [(ξ_J)]*_(k) \
for Steinhaus ε, with c_1 = 1/2 and c_k = 2^{-2k}";

const LEMMA_CLAIM: &str = "∫‖Σ ε_J ξ_J‖_1 dμ^k ≤ [(ξ_J)]*_(k) ≤ ‖(ξ^α_J)‖*_α for every α";

/// Smallest Monte-Carlo sample count accepted.
pub const MIN_MC_SAMPLES: usize = 10_000;
/// Relative standard error above which a record is inconclusive.
const MAX_RELATIVE_ERROR: f64 = 0.05;
/// Width of the Monte-Carlo band in standard errors.
const SIGMA_BAND: f64 = 3.0;

/// `1/2` for `k = 1`, else `2^{-2k}`.
pub fn khintchine_lower_constant(k: usize) -> f64 {
    if k == 1 {
        0.5
    } else {
        0.25f64.powi(k as i32)
    }
}

/// Both sides of the Steinhaus sandwich for one family. The integral is
/// compared with the dual upper certificate plus `3σ` and with the scaled
/// dual lower certificate minus `3σ`.
pub fn khintchine_records<R: Rng + ?Sized>(
    trial: usize,
    xi: &OperatorFamily,
    mc_samples: usize,
    rng: &mut R,
) -> Result<Vec<TrialRecord>, VerifyError> {
    let cert = dual_bracket_norm(xi)?;
    let est = steinhaus_integral(xi, mc_samples, rng);
    let band = SIGMA_BAND * est.sigma;
    let shaky = est.relative_error() > MAX_RELATIVE_ERROR;
    let c = khintchine_lower_constant(xi.k());
    let witness = format!(
        "integral={:.9} sigma={:.3e} dual_lower={:.9} dual_upper={:.9}",
        est.mean, est.sigma, cert.lower, cert.upper
    );
    Ok(vec![
        TrialRecord::new(
            trial,
            "integral below dual upper certificate",
            est.mean,
            cert.upper + band,
        )?
        .with_witness(witness.clone())
        .inconclusive(shaky),
        TrialRecord::new(
            trial,
            "integral above scaled dual lower certificate",
            c * cert.lower - band,
            est.mean,
        )?
        .with_witness(witness)
        .inconclusive(shaky),
    ])
}

fn check_sizes(check: Check, cfg: &TrialConfig) -> Result<(), VerifyError> {
    let coords = (cfg.n as u128)
        .checked_pow(cfg.k as u32)
        .map(|c| c * (cfg.d * cfg.d) as u128);
    if coords.is_none_or(|c| c > MAX_DUAL_COORDINATES as u128) {
        return Err(precondition(
            check,
            format!("n^k·d² must be at most {MAX_DUAL_COORDINATES}"),
        ));
    }
    if cfg.mc_samples < MIN_MC_SAMPLES {
        return Err(precondition(
            check,
            format!("mc_samples must be at least {MIN_MC_SAMPLES}"),
        ));
    }
    Ok(())
}

fn random_family<R: Rng + ?Sized>(rng: &mut R, cfg: &TrialConfig) -> Result<OperatorFamily, VerifyError> {
    let count = cfg.n.pow(cfg.k as u32);
    Ok(OperatorFamily::new(
        cfg.n,
        cfg.k,
        cfg.d,
        gaussian_family(rng, count, cfg.d),
    )?)
}

/// Random families against the dual bracket-norm certificates.
pub fn verify_khintchine(cfg: &TrialConfig) -> Result<VerificationReport, VerifyError> {
    let check = Check::Khintchine;
    check_sizes(check, cfg)?;
    let records = run_trials(check, cfg, |t, rng| {
        let xi = random_family(rng, cfg)?;
        khintchine_records(t, &xi, cfg.mc_samples, rng)
    })?;
    Ok(
        VerificationReport::new(check.name(), KHINTCHINE_CLAIM, cfg, records, None).with_notes(vec![
            format!("lower constant {}", khintchine_lower_constant(cfg.k)),
            "Monte-Carlo bands are 3 standard errors".into(),
        ]),
    )
}

/// Upper half of the sandwich, refined: the integral is also bounded by the
/// dual norm of every single matricization.
pub fn verify_lemma_3_2(cfg: &TrialConfig) -> Result<VerificationReport, VerifyError> {
    let check = Check::Lemma32;
    check_sizes(check, cfg)?;
    let records = run_trials(check, cfg, |t, rng| {
        let xi = random_family(rng, cfg)?;
        let cert = dual_bracket_norm(&xi)?;
        let est = steinhaus_integral(&xi, cfg.mc_samples, rng);
        let band = SIGMA_BAND * est.sigma;
        let shaky = est.relative_error() > MAX_RELATIVE_ERROR;
        let mut out = vec![
            TrialRecord::new(t, "integral below dual upper certificate", est.mean, cert.upper + band)?
                .inconclusive(shaky),
        ];
        for alpha in AlphaMask::all(cfg.k) {
            let dual = dual_alpha_norm(&xi, alpha)?;
            out.push(
                TrialRecord::new(
                    t,
                    format!("integral below dual norm for alpha {alpha}"),
                    est.mean,
                    dual + band,
                )?
                .inconclusive(shaky),
            );
            out.push(TrialRecord::new(
                t,
                format!("dual certificate below dual norm for alpha {alpha}"),
                cert.lower,
                dual,
            )?);
        }
        Ok(out)
    })?;
    Ok(VerificationReport::new(check.name(), LEMMA_CLAIM, cfg, records, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;
    use crate::sampling::trial_rng;
    use crate::verify::Status;

    #[test]
    fn constants() {
        assert_eq!(khintchine_lower_constant(1), 0.5);
        assert_eq!(khintchine_lower_constant(2), 1.0 / 16.0);
        assert_eq!(khintchine_lower_constant(3), 1.0 / 64.0);
    }

    #[test]
    fn scalar_pair_brackets_four_over_pi() {
        let one = ComplexMatrix::identity(1);
        let xi = OperatorFamily::new(2, 1, 1, vec![one.clone(), one]).unwrap();
        let records = khintchine_records(0, &xi, 20_000, &mut trial_rng(6, 0, 0)).unwrap();
        assert!(records.iter().all(|r| !r.is_violation(1e-8) && !r.inconclusive));
    }

    #[test]
    fn single_scalar_is_exact() {
        let xi = OperatorFamily::new(1, 1, 1, vec![ComplexMatrix::identity(1)]).unwrap();
        let records = khintchine_records(0, &xi, 10_000, &mut trial_rng(1, 0, 0)).unwrap();
        assert!((records[0].lhs - 1.0).abs() < 1e-12);
        assert!((records[0].rhs - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_family() {
        let xi = OperatorFamily::zeros(2, 2, 2).unwrap();
        let records = khintchine_records(0, &xi, 10_000, &mut trial_rng(1, 0, 0)).unwrap();
        assert!(records.iter().all(|r| r.lhs == 0.0 && r.rhs == 0.0 && !r.inconclusive));
    }

    #[test]
    fn random_degree_two_passes() {
        let cfg = TrialConfig {
            trials: 3,
            seed: 2,
            mc_samples: 10_000,
            ..TrialConfig::default()
        };
        let report = verify_khintchine(&cfg).unwrap();
        assert_eq!(report.status, Status::Pass, "{:#?}", report.trials);
        let report = verify_lemma_3_2(&cfg).unwrap();
        assert_eq!(report.status, Status::Pass, "{:#?}", report.trials);
        assert_eq!(report.trials.len(), 3 * (1 + 2 * 4));
    }

    #[test]
    fn preconditions() {
        let cfg = TrialConfig {
            mc_samples: 100,
            ..TrialConfig::default()
        };
        assert!(matches!(verify_khintchine(&cfg), Err(VerifyError::Precondition { .. })));
        let cfg = TrialConfig {
            n: 5,
            k: 5,
            ..TrialConfig::default()
        };
        assert!(matches!(verify_lemma_3_2(&cfg), Err(VerifyError::Precondition { .. })));
    }
}
