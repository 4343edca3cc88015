use super::maps::{estimate_map_norm, MatrixMap};
use super::{precondition, run_trials, Check, TrialConfig, TrialRecord, VerificationReport, VerifyError};
use crate::linalg::{column_norm, operator_norm, row_norm, ComplexMatrix, DEFAULT_TOL};
use crate::opspace::{bracket_norm, OperatorFamily};
use crate::sampling::gaussian_family;

const LEMMA_CLAIM: &str = "max(‖Σu(a)*u(a)‖, ‖Σu(a)u(a)*‖) ≤ ‖u‖²(‖Σa*a‖ + ‖Σaa*‖) ≤ 2‖u‖²·max(‖Σa*a‖, ‖Σaa*‖) \
for linear u: M_d → M_d";

const THEOREM_CLAIM: &str = "[(u(a_J))] ≤ 2^{3k/2−1}·‖u‖·[(a_J)] for linear u: M_d → M_d";

/// Largest `d` for the map-norm ascent.
const MAX_MAP_DIM: usize = 8;
/// Polar starts taken from the family for the ascent.
const MAX_HINTS: usize = 8;

/// Row and column square-function bound for a bounded map applied
/// entrywise to a sequence.
///
/// `‖u‖` enters on the large side through an ascent value, which never
/// exceeds the true norm, so any violation reported is genuine.
pub fn verify_lemma_1_4(cfg: &TrialConfig) -> Result<VerificationReport, VerifyError> {
    let check = Check::Lemma14;
    if cfg.d > MAX_MAP_DIM {
        return Err(precondition(check, format!("d must be at most {MAX_MAP_DIM}")));
    }
    let records = run_trials(check, cfg, |t, rng| {
        let u = MatrixMap::random(rng, cfg.d);
        let a = gaussian_family(rng, cfg.n, cfg.d);
        let ua: Vec<ComplexMatrix> = a.iter().map(|x| u.apply(x)).collect();
        let est = estimate_map_norm(&u, &a[..a.len().min(MAX_HINTS)], rng);
        let (col, row) = (column_norm(&a), row_norm(&a));
        let lhs = column_norm(&ua).max(row_norm(&ua)).powi(2);
        let u2 = est.value * est.value;
        let witness = format!("norm_u_est={:.12} restarts={}", est.value, est.restarts);
        Ok(vec![
            TrialRecord::new(t, "sum-of-squares bound", lhs, u2 * (col * col + row * row))?
                .with_witness(witness.clone()),
            TrialRecord::new(t, "doubled square bound", lhs, 2.0 * u2 * col.max(row).powi(2))?.with_witness(witness),
        ])
    })?;
    Ok(VerificationReport::new(check.name(), LEMMA_CLAIM, cfg, records, None)
        .with_notes(vec!["‖u‖ is an ascent lower estimate; the check is conservative".into()]))
}

/// Bracket-norm amplification of entrywise maps, compared with the cap
/// `2^{3k/2−1}`. At `k = 2` the four-norm display is also evaluated
/// literally and compared with the bracket norm.
pub fn verify_theorem_0k(cfg: &TrialConfig) -> Result<VerificationReport, VerifyError> {
    let check = Check::Theorem0k;
    if cfg.k > 3 || cfg.n > 3 || cfg.d > 4 {
        return Err(precondition(check, "requires k ≤ 3, n ≤ 3, d ≤ 4"));
    }
    let cap = amplification_cap(cfg.k);
    let count = cfg.n.pow(cfg.k as u32);
    let records = run_trials(check, cfg, |t, rng| {
        let u = MatrixMap::random(rng, cfg.d);
        let fam = OperatorFamily::new(cfg.n, cfg.k, cfg.d, gaussian_family(rng, count, cfg.d))?;
        let image = fam.map(|x| u.apply(x))?;
        let est = estimate_map_norm(&u, &fam.entries()[..count.min(MAX_HINTS)], rng);
        let (before, after) = (bracket_norm(&fam)?, bracket_norm(&image)?);
        let ratio = after / (est.value * before);
        let mut out = vec![TrialRecord::new(t, "amplification ratio below cap", ratio, cap)?
            .with_witness(format!("norm_u_est={:.12} bracket={before:.12}", est.value))];
        if cfg.k == 2 {
            let literal = four_norm_display(&fam)?;
            out.push(TrialRecord::new(
                t,
                "four-norm display equals bracket norm",
                (literal - before).abs(),
                1e-10 * before.max(1.0),
            )?);
        }
        Ok(out)
    })?;
    Ok(
        VerificationReport::new(check.name(), THEOREM_CLAIM, cfg, records, None).with_notes(vec![
            format!("cap 2^(3k/2-1) = {cap}"),
            "‖u‖ is an ascent lower estimate; the check is conservative".into(),
        ]),
    )
}

/// `2^{3k/2 − 1}`.
pub fn amplification_cap(k: usize) -> f64 {
    2f64.powf(1.5 * k as f64 - 1.0)
}

/// `max{‖(a_ij)‖, ‖(a_ij^*)‖, ‖Σ a_ij^* a_ij‖^½, ‖Σ a_ij a_ij^*‖^½}` for a
/// degree-2 family, with the block matrices built directly.
pub fn four_norm_display(fam: &OperatorFamily) -> Result<f64, VerifyError> {
    if fam.k() != 2 {
        return Err(VerifyError::InvalidConfig("four-norm display needs k = 2".into()));
    }
    let (n, d) = (fam.n(), fam.d());
    let mut direct = ComplexMatrix::zeros(n * d, n * d);
    let mut starred = ComplexMatrix::zeros(n * d, n * d);
    for i in 0..n {
        for j in 0..n {
            let a = fam.get(&[i, j])?;
            direct.set_block(i * d, j * d, a);
            starred.set_block(i * d, j * d, &a.adjoint());
        }
    }
    Ok(operator_norm(&direct, DEFAULT_TOL)?
        .max(operator_norm(&starred, DEFAULT_TOL)?)
        .max(column_norm(fam.entries()))
        .max(row_norm(fam.entries())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::trial_rng;
    use crate::verify::Status;

    #[test]
    fn caps() {
        assert!((amplification_cap(1) - 2f64.sqrt()).abs() < 1e-15);
        assert!((amplification_cap(2) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn lemma_passes() {
        let cfg = TrialConfig {
            n: 3,
            d: 2,
            trials: 5,
            seed: 4,
            ..TrialConfig::default()
        };
        let report = verify_lemma_1_4(&cfg).unwrap();
        assert_eq!(report.status, Status::Pass, "{:#?}", report.trials);
    }

    #[test]
    fn theorem_passes_with_four_norm_agreement() {
        let cfg = TrialConfig {
            n: 2,
            k: 2,
            d: 2,
            trials: 5,
            seed: 4,
            ..TrialConfig::default()
        };
        let report = verify_theorem_0k(&cfg).unwrap();
        assert_eq!(report.status, Status::Pass, "{:#?}", report.trials);
        assert_eq!(report.records("four-norm display equals bracket norm").count(), 5);
    }

    #[test]
    fn identity_map_ratio_is_one() {
        let mut rng = trial_rng(2, 0, 0);
        let fam = OperatorFamily::new(2, 2, 2, gaussian_family(&mut rng, 4, 2)).unwrap();
        let u = MatrixMap::identity(2);
        let est = estimate_map_norm(&u, fam.entries(), &mut rng);
        let image = fam.map(|x| u.apply(x)).unwrap();
        let ratio = bracket_norm(&image).unwrap() / (est.value * bracket_norm(&fam).unwrap());
        assert!((ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transpose_keeps_square_bound() {
        // ‖Σ aᵗ(aᵗ)*‖ = ‖Σ a*a‖, so the maxima agree.
        let mut rng = trial_rng(8, 0, 0);
        let a = gaussian_family(&mut rng, 4, 2);
        let u = MatrixMap::transpose(2);
        let ua: Vec<_> = a.iter().map(|x| u.apply(x)).collect();
        let lhs = column_norm(&ua).max(row_norm(&ua));
        let rhs = column_norm(&a).max(row_norm(&a));
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn preconditions() {
        let cfg = TrialConfig {
            d: 9,
            ..TrialConfig::default()
        };
        assert!(matches!(verify_lemma_1_4(&cfg), Err(VerifyError::Precondition { .. })));
        let cfg = TrialConfig {
            k: 4,
            ..TrialConfig::default()
        };
        assert!(matches!(verify_theorem_0k(&cfg), Err(VerifyError::Precondition { .. })));
    }
}
