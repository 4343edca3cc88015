use super::{
    precondition, run_trials, Check, TrialConfig, TrialRecord, VerificationReport, VerifyError, MAX_OPERATOR_DIM,
};
use crate::freegroup::{alphabet, haagerup_decomposition, lambda_truncated, GroupBall, ReducedWord};
use crate::linalg::{column_norm, operator_norm, row_column_max, row_norm, SparseOperator, DEFAULT_TOL};
use crate::sampling::gaussian_family;

const CLAIM: &str = "max(‖Σa*a‖^½, ‖Σaa*‖^½) ≤ ‖Σ_s λ(s) ⊗ a_s‖ ≤ 2·max(‖Σa*a‖^½, ‖Σaa*‖^½) \
over the 2n letters s = g_i^{±1}, with λ(s) = u_s + v_s split by first letter";

/// Left regular representation of `F_n` on a word-length ball, tested on
/// random coefficients attached to the generators and their inverses.
///
/// Lower bound: witnessed by `δ_e ⊗ h` and its adjoint, which stay inside
/// the ball, so the compressed norm is exact for it. Upper bound: the
/// compression can only reduce the norm.
pub fn verify_prop_1_1(cfg: &TrialConfig) -> Result<VerificationReport, VerifyError> {
    let check = Check::Prop11;
    if cfg.radius < 2 {
        return Err(precondition(check, "radius must be at least 2"));
    }
    let ball = GroupBall::new(cfg.n, cfg.radius)?;
    if ball.len().saturating_mul(cfg.d) > MAX_OPERATOR_DIM {
        return Err(VerifyError::SizeGuard(format!(
            "ball of {} words times d = {} exceeds {MAX_OPERATOR_DIM}",
            ball.len(),
            cfg.d
        )));
    }
    let letters = alphabet(cfg.n);
    let lambdas = letters
        .iter()
        .map(|&l| lambda_truncated(&ball, &ReducedWord::letter(l)?))
        .collect::<Result<Vec<_>, _>>()?;
    let splits = letters
        .iter()
        .map(|&l| haagerup_decomposition(&ball, l))
        .collect::<Result<Vec<_>, _>>()?;

    let mut records = structural_records(&ball, &lambdas, &splits)?;
    let lam: Vec<&SparseOperator> = lambdas.iter().collect();
    let us: Vec<&SparseOperator> = splits.iter().map(|(u, _)| u).collect();
    let vs: Vec<&SparseOperator> = splits.iter().map(|(_, v)| v).collect();

    records.extend(run_trials(check, cfg, |t, rng| {
        let a = gaussian_family(rng, letters.len(), cfg.d);
        let m = row_column_max(&a);
        let norm = operator_norm(&SparseOperator::tensor_sum(&lam, &a)?, DEFAULT_TOL)?;
        let u_norm = operator_norm(&SparseOperator::tensor_sum(&us, &a)?, DEFAULT_TOL)?;
        let v_norm = operator_norm(&SparseOperator::tensor_sum(&vs, &a)?, DEFAULT_TOL)?;
        let witness = format!("norm={norm:.12} rowcol={m:.12}");
        Ok(vec![
            TrialRecord::new(t, "row-column lower bound", m, norm)?.with_witness(witness.clone()),
            TrialRecord::new(t, "twice row-column upper bound", norm, 2.0 * m)?.with_witness(witness),
            TrialRecord::new(t, "triangle split", norm, u_norm + v_norm)?,
            TrialRecord::new(t, "u-part column bound", u_norm, column_norm(&a))?,
            TrialRecord::new(t, "v-part row bound", v_norm, row_norm(&a))?,
        ])
    })?);
    Ok(VerificationReport::new(check.name(), CLAIM, cfg, records, None))
}

fn structural_records(
    ball: &GroupBall,
    lambdas: &[SparseOperator],
    splits: &[(SparseOperator, SparseOperator)],
) -> Result<Vec<TrialRecord>, VerifyError> {
    let interior = ball.interior_mask();
    let dim = ball.len();
    let mut residual = 0.0f64;
    let mut uu = SparseOperator::zeros(dim, dim);
    let mut vv = SparseOperator::zeros(dim, dim);
    for (lambda, (u, v)) in lambdas.iter().zip(splits) {
        residual = residual.max(u.add(v).sub(lambda).restrict_columns(&interior).max_abs());
        uu = uu.add(&u.matmul(&u.adjoint()));
        vv = vv.add(&v.adjoint().matmul(v));
    }
    Ok(vec![
        TrialRecord::new(0, "split identity on interior", residual, 1e-12)?,
        TrialRecord::new(0, "u row sum at most one", operator_norm(&uu, DEFAULT_TOL)?, 1.0)?,
        TrialRecord::new(0, "v column sum at most one", operator_norm(&vv, DEFAULT_TOL)?, 1.0)?,
    ])
}
