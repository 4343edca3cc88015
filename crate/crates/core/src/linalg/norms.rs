use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{ComplexMatrix, LinalgError, SparseOperator};

/// Below this size the dense SVD is used; above it, Krylov iteration on `M^*M`.
pub const DENSE_CROSSOVER: usize = 256;
/// Default relative tolerance for operator norms.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Cap on products with `M^*M` in the iterative path.
pub const MAX_MATVECS: usize = 10_000;
/// Relative tolerance for Hermitian and positivity checks.
pub const HERMITIAN_TOL: f64 = 1e-9;

const KRYLOV_DIM: usize = 40;
/// Largest Gram dimension that gets full reorthogonalization.
const FULL_REORTH_DIM: usize = 20_000;
const START_SEED: u64 = 0x6f70_7370_6163_6531;

/// Borrowed view of either operator representation.
#[derive(Clone, Copy, Debug)]
pub enum OperatorRef<'a> {
    Dense(&'a ComplexMatrix),
    Sparse(&'a SparseOperator),
}

impl<'a> From<&'a ComplexMatrix> for OperatorRef<'a> {
    fn from(m: &'a ComplexMatrix) -> Self {
        OperatorRef::Dense(m)
    }
}

impl<'a> From<&'a SparseOperator> for OperatorRef<'a> {
    fn from(m: &'a SparseOperator) -> Self {
        OperatorRef::Sparse(m)
    }
}

impl OperatorRef<'_> {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            OperatorRef::Dense(m) => m.shape(),
            OperatorRef::Sparse(m) => m.shape(),
        }
    }

    fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        match self {
            OperatorRef::Dense(m) => out.copy_from_slice(&m.apply(v)),
            OperatorRef::Sparse(m) => m.apply_into(v, out),
        }
    }

    fn apply_adjoint_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        match self {
            OperatorRef::Dense(m) => out.copy_from_slice(&m.apply_adjoint(v)),
            OperatorRef::Sparse(m) => m.apply_adjoint_into(v, out),
        }
    }
}

/// Largest singular value, to relative accuracy `tol`.
///
/// Small problems go through a dense SVD (after discarding zero rows and
/// columns); larger ones through restarted Lanczos on the smaller Gram
/// operator.
pub fn operator_norm<'a>(m: impl Into<OperatorRef<'a>>, tol: f64) -> Result<f64, LinalgError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(LinalgError::InvalidTolerance(tol));
    }
    let m = m.into();
    match m {
        OperatorRef::Dense(d) => {
            let t = d.trim_zero_lines();
            if t.rows().min(t.cols()) <= DENSE_CROSSOVER {
                Ok(dense_norm(&t))
            } else {
                operator_norm_iterative(OperatorRef::Dense(&t), tol)
            }
        }
        OperatorRef::Sparse(s) => {
            if s.nnz() == 0 {
                return Ok(0.0);
            }
            if s.rows().max(s.cols()) <= DENSE_CROSSOVER {
                Ok(dense_norm(&s.to_dense()))
            } else {
                operator_norm_iterative(m, tol)
            }
        }
    }
}

fn dense_norm(m: &ComplexMatrix) -> f64 {
    m.singular_values().into_iter().fold(0.0, f64::max)
}

/// Iterative path of [`operator_norm`], regardless of size.
pub fn operator_norm_iterative(m: OperatorRef<'_>, tol: f64) -> Result<f64, LinalgError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(LinalgError::InvalidTolerance(tol));
    }
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(0.0);
    }
    // Gram operator on the smaller side.
    let use_right = cols <= rows;
    let (dim, other) = if use_right { (cols, rows) } else { (rows, cols) };
    let mut scratch = vec![Complex64::new(0.0, 0.0); other];
    let apply_gram = |v: &[Complex64], out: &mut [Complex64], scratch: &mut [Complex64]| {
        if use_right {
            m.apply_into(v, scratch);
            m.apply_adjoint_into(scratch, out);
        } else {
            m.apply_adjoint_into(v, scratch);
            m.apply_into(scratch, out);
        }
    };
    let top = lanczos_top_eigenvalue(dim, tol, |v, out| apply_gram(v, out, &mut scratch))?;
    Ok(top.max(0.0).sqrt())
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Explicitly restarted Lanczos for the top eigenvalue of a positive semidefinite Hermitian operator.
fn lanczos_top_eigenvalue(
    dim: usize,
    tol: f64,
    mut apply: impl FnMut(&[Complex64], &mut [Complex64]),
) -> Result<f64, LinalgError> {
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut start: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    let s = norm(&start);
    start.iter_mut().for_each(|z| *z /= s);

    let m = KRYLOV_DIM.min(dim);
    // Large problems orthogonalize against the last two vectors only; lost
    // orthogonality then shows up as repeated Ritz values, which leaves the
    // largest one intact.
    let full = dim <= FULL_REORTH_DIM;
    let mut matvecs = 0usize;
    let mut previous: Option<f64> = None;
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    loop {
        let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        let mut invariant = false;
        for j in 0..m {
            apply(&basis[j], &mut w);
            matvecs += 1;
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            let window = if full { 0 } else { basis.len().saturating_sub(2) };
            for _ in 0..2 {
                for q in &basis[window..] {
                    let h = dot(q, &w);
                    w.iter_mut().zip(q).for_each(|(x, y)| *x -= h * y);
                }
            }
            let b = norm(&w);
            let scale = alpha
                .iter()
                .fold(0.0f64, |acc, x| acc.max(x.abs()))
                .max(f64::MIN_POSITIVE);
            if b <= 1e-13 * scale || b == 0.0 {
                invariant = true;
                beta.push(0.0);
                break;
            }
            beta.push(b);
            if j + 1 < m {
                basis.push(w.iter().map(|z| z / b).collect());
            }
        }
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (idx, theta) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
            );
        let y = eig.eigenvectors.column(idx);
        let residual = if invariant { 0.0 } else { beta[k - 1] * y[k - 1].abs() };
        let theta_abs = theta.abs();

        let mut ritz = vec![Complex64::new(0.0, 0.0); dim];
        for (q, &c) in basis.iter().zip(y.iter()) {
            ritz.iter_mut().zip(q).for_each(|(x, z)| *x += z * c);
        }
        let rn = norm(&ritz);
        if rn > 0.0 {
            ritz.iter_mut().for_each(|z| *z /= rn);
        }

        let stalled = previous.is_some_and(|p| (theta - p).abs() <= tol * theta_abs);
        if residual <= tol * theta_abs || stalled || invariant {
            return Ok(theta);
        }
        if matvecs >= MAX_MATVECS {
            return Err(LinalgError::NotConverged {
                iterations: matvecs,
                estimate: theta.max(0.0).sqrt(),
                residual,
            });
        }
        previous = Some(theta);
        start = ritz;
    }
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    m.singular_values().into_iter().sum()
}

/// `‖M‖^{1/2}` for a positive semidefinite Hermitian `M`, i.e. the norm of
/// its positive square root.
pub fn hermitian_sqrt_norm(m: &ComplexMatrix) -> Result<f64, LinalgError> {
    let eigenvalues = hermitian_eigenvalues(m)?;
    let scale = eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(LinalgError::NotPositive { min_eigenvalue: min });
    }
    Ok(eigenvalues.iter().copied().fold(0.0, f64::max).sqrt())
}

/// Eigenvalues of a Hermitian matrix (rejects matrices whose Hermitian
/// defect exceeds the relative tolerance).
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::ShapeMismatch {
            expected: (m.rows(), m.rows()),
            found: m.shape(),
        });
    }
    if m.rows() == 0 {
        return Ok(Vec::new());
    }
    let defect = m.hermitian_defect();
    let scale = m.frobenius_norm();
    if defect > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) && defect > 0.0 {
        return Err(LinalgError::NotHermitian { defect });
    }
    let herm = (&m.to_nalgebra() + &m.to_nalgebra().adjoint()).scale(0.5);
    Ok(SymmetricEigen::new(herm).eigenvalues.iter().copied().collect())
}

/// `‖Σ a_i^* a_i‖^{1/2}`, the norm of the column `(a_1, …, a_n)ᵗ`.
pub fn column_norm(family: &[ComplexMatrix]) -> f64 {
    gram_sqrt_norm(family, true)
}

/// `‖Σ a_i a_i^*‖^{1/2}`, the norm of the row `(a_1, …, a_n)`.
pub fn row_norm(family: &[ComplexMatrix]) -> f64 {
    gram_sqrt_norm(family, false)
}

/// `max{‖Σ a^*a‖^{1/2}, ‖Σ aa^*‖^{1/2}}`.
pub fn row_column_max(family: &[ComplexMatrix]) -> f64 {
    column_norm(family).max(row_norm(family))
}

fn gram_sqrt_norm(family: &[ComplexMatrix], column: bool) -> f64 {
    let Some(first) = family.first() else {
        return 0.0;
    };
    let dim = if column { first.cols() } else { first.rows() };
    let mut gram = ComplexMatrix::zeros(dim, dim);
    for a in family {
        let term = if column {
            a.adjoint().matmul(a)
        } else {
            a.matmul(&a.adjoint())
        };
        gram = &gram + &term;
    }
    hermitian_sqrt_norm(&gram).expect("Gram matrices are positive semidefinite")
}
