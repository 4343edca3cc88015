use rand::Rng;

use super::{precondition, run_trials, Check, TrialConfig, TrialRecord, VerificationReport, VerifyError};
use crate::freeprod::{embed, factor_projection, freeness_decomposition, FreeProductSpace, PointedSpace};
use crate::linalg::{operator_norm, row_column_max, Complex64, ComplexMatrix, SparseOperator, DEFAULT_TOL};
use crate::sampling::{complex_gaussian, gaussian_family, gaussian_matrix};

const CLAIM: &str = "δ·max(‖Σa*a‖^½, ‖Σaa*‖^½) ≤ ‖Σ x_i ⊗ a_i‖ ≤ 2·max(‖Σa*a‖^½, ‖Σaa*‖^½) \
for free x_i with φ(x_i) = 0, ‖x_i‖ ≤ 1, δ = min_i min(φ(x_i*x_i), φ(x_i x_i*))^½; \
x_i = u_i + v_i with ‖Σu_i*u_i‖ ≤ 1, ‖Σv_i v_i*‖ ≤ 1 and (1−e_i)x_i(1−e_i) = 0";

/// Smallest `δ` accepted.
pub const MIN_DELTA: f64 = 1e-8;
const MAX_FACTORS: usize = 4;
const MAX_DEPTH: usize = 5;
const FACTOR_DIMS: std::ops::RangeInclusive<usize> = 2..=4;

/// Seeded free products of random pointed spaces with one centered
/// contraction per factor.
pub fn verify_prop_4_9(cfg: &TrialConfig) -> Result<VerificationReport, VerifyError> {
    let check = Check::Prop49;
    if !(2..=MAX_FACTORS).contains(&cfg.n) {
        return Err(precondition(
            check,
            format!("n must be between 2 and {MAX_FACTORS} factors"),
        ));
    }
    if !(1..=MAX_DEPTH).contains(&cfg.depth) {
        return Err(precondition(check, format!("depth must be between 1 and {MAX_DEPTH}")));
    }
    let records = run_trials(check, cfg, |t, rng| {
        let factors = (0..cfg.n)
            .map(|_| random_pointed_space(rng))
            .collect::<Result<Vec<_>, _>>()?;
        let xs: Vec<ComplexMatrix> = factors
            .iter()
            .map(|f| centered_contraction(rng, f))
            .collect::<Result<_, _>>()?;
        let space = FreeProductSpace::new(factors, cfg.depth)?;
        let a = gaussian_family(rng, cfg.n, cfg.d);
        free_product_records(check, t, &space, &xs, &a)
    })?;
    Ok(
        VerificationReport::new(check.name(), CLAIM, cfg, records, None).with_notes(vec![
            "lower bound slack is 0: the vacuum witness is exact at every depth".into(),
        ]),
    )
}

fn random_pointed_space<R: Rng + ?Sized>(rng: &mut R) -> Result<PointedSpace, VerifyError> {
    let dim = rng.gen_range(FACTOR_DIMS);
    let raw: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(PointedSpace::new(raw.into_iter().map(|z| z / norm).collect())?)
}

/// `G − φ(G)` rescaled to operator norm one.
fn centered_contraction<R: Rng + ?Sized>(rng: &mut R, f: &PointedSpace) -> Result<ComplexMatrix, VerifyError> {
    let g = gaussian_matrix(rng, f.dim(), f.dim());
    let phi = f.state(&g)?;
    let centered = &g - &ComplexMatrix::identity(f.dim()).scale(phi);
    let norm = operator_norm(&centered, DEFAULT_TOL)?;
    Ok(centered.scale_real(1.0 / norm))
}

/// `min(φ(x*x), φ(xx*))^½`.
fn moment_delta(f: &PointedSpace, x: &ComplexMatrix) -> Result<f64, VerifyError> {
    let left = f.state(&x.adjoint().matmul(x))?.re;
    let right = f.state(&x.matmul(&x.adjoint()))?.re;
    Ok(left.min(right).max(0.0).sqrt())
}

/// Structural identities and the sandwich for one instance.
fn free_product_records(
    check: Check,
    trial: usize,
    space: &FreeProductSpace,
    xs: &[ComplexMatrix],
    a: &[ComplexMatrix],
) -> Result<Vec<TrialRecord>, VerifyError> {
    let dim = space.dim();
    let interior = space.interior_mask();
    let mut delta = f64::INFINITY;
    let mut complement = 0.0f64;
    let mut split = 0.0f64;
    let mut uu = SparseOperator::zeros(dim, dim);
    let mut vv = SparseOperator::zeros(dim, dim);
    let mut embedded = Vec::with_capacity(xs.len());
    for (i, x) in xs.iter().enumerate() {
        delta = delta.min(moment_delta(&space.factors()[i], x)?);
        let big = embed(space, i, x)?;
        let e = factor_projection(space, i)?;
        let not_e = SparseOperator::identity(dim).sub(&e);
        complement = complement.max(not_e.matmul(&big).matmul(&not_e).restrict_columns(&interior).max_abs());
        let (u, v) = freeness_decomposition(space, i, x)?;
        split = split.max(u.add(&v).sub(&big).restrict_columns(&interior).max_abs());
        uu = uu.add(&u.adjoint().matmul(&u));
        vv = vv.add(&v.matmul(&v.adjoint()));
        embedded.push(big);
    }
    if delta < MIN_DELTA {
        return Err(precondition(check, format!("degenerate moments: delta = {delta:.3e}")));
    }
    let ops: Vec<&SparseOperator> = embedded.iter().collect();
    let m = row_column_max(a);
    let norm = operator_norm(&SparseOperator::tensor_sum(&ops, a)?, DEFAULT_TOL)?;
    let witness = format!("norm={norm:.12} rowcol={m:.12} delta={delta:.12}");
    Ok(vec![
        TrialRecord::new(trial, "complement compression vanishes on interior", complement, 1e-10)?,
        TrialRecord::new(trial, "split identity on interior", split, 1e-12)?,
        TrialRecord::new(trial, "u column sum at most one", operator_norm(&uu, DEFAULT_TOL)?, 1.0)?,
        TrialRecord::new(trial, "v row sum at most one", operator_norm(&vv, DEFAULT_TOL)?, 1.0)?,
        TrialRecord::new(trial, "delta lower bound", delta * m, norm)?.with_witness(witness.clone()),
        TrialRecord::new(trial, "twice row-column upper bound", norm, 2.0 * m)?.with_witness(witness),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::trial_rng;
    use crate::verify::Status;

    #[test]
    fn random_instances_pass() {
        let cfg = TrialConfig {
            n: 2,
            k: 1,
            depth: 4,
            trials: 4,
            seed: 3,
            ..TrialConfig::default()
        };
        let report = verify_prop_4_9(&cfg).unwrap();
        assert_eq!(report.status, Status::Pass, "{:#?}", report.trials);
        assert_eq!(report.trials.len(), 4 * 6);
    }

    #[test]
    fn three_factors_pass() {
        let cfg = TrialConfig {
            n: 3,
            depth: 3,
            trials: 2,
            ..TrialConfig::default()
        };
        assert_eq!(verify_prop_4_9(&cfg).unwrap().status, Status::Pass);
    }

    #[test]
    fn swap_factors_have_unit_delta() {
        // Two copies of ℓ²(Z_2) with the generator acting by swap.
        let e = PointedSpace::with_coordinate(2, 0).unwrap();
        let swap = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!((moment_delta(&e, &swap).unwrap() - 1.0).abs() < 1e-15);
        let space = FreeProductSpace::new(vec![e.clone(), e], 4).unwrap();
        let mut rng = trial_rng(1, 0, 0);
        let a = gaussian_family(&mut rng, 2, 2);
        let records = free_product_records(Check::Prop49, 0, &space, &[swap.clone(), swap], &a).unwrap();
        assert!(records.iter().all(|r| !r.is_violation(1e-8)), "{records:#?}");
    }

    #[test]
    fn centered_elements() {
        let mut rng = trial_rng(2, 0, 0);
        let f = random_pointed_space(&mut rng).unwrap();
        let x = centered_contraction(&mut rng, &f).unwrap();
        assert!(f.state(&x).unwrap().norm() < 1e-12);
        assert!((operator_norm(&x, 1e-12).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn preconditions() {
        for (n, depth) in [(1, 3), (5, 3), (2, 0), (2, 6)] {
            let cfg = TrialConfig {
                n,
                depth,
                ..TrialConfig::default()
            };
            assert!(matches!(verify_prop_4_9(&cfg), Err(VerifyError::Precondition { .. })));
        }
    }
}
