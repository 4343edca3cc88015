//! Truncated full Fock space over an `m`-letter alphabet, creation
//! operators, semicircular and circular systems, and the norm
//! `½‖Σ(s_i + s_i^*)²‖^{1/2}` built from creation operators.
//!
//! Words are not reduced. A word of length `L` with letters `w_1 … w_L`
//! (0-based) sits at index `Σ_{j<L} m^j + Σ_l w_l m^{L−l}`, so the vacuum is
//! index 0 and each length forms a contiguous lexicographic block.

use thiserror::Error;

use crate::linalg::{
    c64, hermitian_eigenvalues, operator_norm, Complex64, ComplexMatrix, LinalgError, SparseOperator, DEFAULT_TOL,
};

/// Largest Fock basis that will be built.
pub const MAX_FOCK_WORDS: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("alphabet must be non-empty")]
    EmptyAlphabet,
    #[error("letter {letter} outside 1..={m}")]
    InvalidLetter { letter: usize, m: usize },
    #[error("depth {depth} below minimum {min}")]
    DepthTooSmall { depth: usize, min: usize },
    #[error("Fock space with alphabet {m} and depth {depth} exceeds {limit} words")]
    TooLarge { m: usize, depth: usize, limit: usize },
    #[error("column part has {column} entries, row part {row}")]
    PairLength { column: usize, row: usize },
    #[error("entries must all be {d}×{d}")]
    PairShape { d: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Words of length `≤ depth` over letters `1..=m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockBasis {
    m: usize,
    depth: usize,
    offsets: Vec<usize>,
}

impl FockBasis {
    pub fn new(m: usize, depth: usize) -> Result<Self, FockError> {
        if m == 0 {
            return Err(FockError::EmptyAlphabet);
        }
        let too_large = FockError::TooLarge {
            m,
            depth,
            limit: MAX_FOCK_WORDS,
        };
        let mut offsets = Vec::with_capacity(depth + 2);
        let (mut offset, mut level) = (0usize, 1usize);
        for j in 0..=depth {
            offsets.push(offset);
            offset = offset.checked_add(level).ok_or(too_large.clone())?;
            if j < depth {
                level = level.checked_mul(m).ok_or(too_large.clone())?;
            }
        }
        offsets.push(offset);
        if offset > MAX_FOCK_WORDS {
            return Err(too_large);
        }
        Ok(Self { m, depth, offsets })
    }

    pub fn alphabet(&self) -> usize {
        self.m
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `Σ_{j=0}^{depth} m^j`.
    pub fn len(&self) -> usize {
        self.offsets[self.depth + 1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index range of the words of length `l`.
    pub fn level(&self, l: usize) -> std::ops::Range<usize> {
        self.offsets[l]..self.offsets[l + 1]
    }

    /// Index of a word given by 1-based letters.
    pub fn index_of(&self, word: &[usize]) -> Result<Option<usize>, FockError> {
        if word.len() > self.depth {
            return Ok(None);
        }
        let mut v = 0;
        for &l in word {
            self.check_letter(l)?;
            v = v * self.m + (l - 1);
        }
        Ok(Some(self.offsets[word.len()] + v))
    }

    /// 1-based letters of the word at `index`.
    pub fn word(&self, index: usize) -> Vec<usize> {
        let l = self.offsets.partition_point(|&o| o <= index) - 1;
        let mut v = index - self.offsets[l];
        let mut out = vec![0; l];
        for slot in out.iter_mut().rev() {
            *slot = v % self.m + 1;
            v /= self.m;
        }
        out
    }

    /// Indicator of words of length `≤ depth − 1`.
    pub fn interior_mask(&self) -> Vec<bool> {
        (0..self.len()).map(|i| i < self.offsets[self.depth]).collect()
    }

    fn check_letter(&self, letter: usize) -> Result<(), FockError> {
        if letter == 0 || letter > self.m {
            return Err(FockError::InvalidLetter { letter, m: self.m });
        }
        Ok(())
    }
}

/// Left creation `δ_w ↦ δ_{i·w}` for `|w| < depth`, and `0` on the top level.
pub fn creation(basis: &FockBasis, i: usize) -> Result<SparseOperator, FockError> {
    basis.check_letter(i)?;
    let one = c64(1.0, 0.0);
    let mut trip = Vec::with_capacity(basis.offsets[basis.depth]);
    let mut power = 1;
    for l in 0..basis.depth {
        let shift = (i - 1) * power;
        for (v, col) in basis.level(l).enumerate() {
            trip.push((basis.offsets[l + 1] + shift + v, col, one));
        }
        power *= basis.m;
    }
    Ok(SparseOperator::from_triplets(basis.len(), basis.len(), trip)?)
}

/// `⟨M δ_∅, δ_∅⟩`.
pub fn vacuum_state(basis: &FockBasis, m: &SparseOperator) -> Result<Complex64, FockError> {
    if m.shape() != (basis.len(), basis.len()) {
        return Err(LinalgError::ShapeMismatch {
            expected: (basis.len(), basis.len()),
            found: m.shape(),
        }
        .into());
    }
    Ok(m.get(0, 0))
}

/// `x_k = ½(s_k + s_k^*)` on the Fock space over `n` letters.
#[derive(Clone, Debug)]
pub struct SemicircularSystem {
    pub basis: FockBasis,
    pub creations: Vec<SparseOperator>,
    pub operators: Vec<SparseOperator>,
}

pub fn semicircular_system(n: usize, depth: usize) -> Result<SemicircularSystem, FockError> {
    if depth < 2 {
        return Err(FockError::DepthTooSmall { depth, min: 2 });
    }
    let basis = FockBasis::new(n, depth)?;
    let creations = (1..=n).map(|i| creation(&basis, i)).collect::<Result<Vec<_>, _>>()?;
    let operators = creations.iter().map(|s| s.add(&s.adjoint()).scale_real(0.5)).collect();
    Ok(SemicircularSystem {
        basis,
        creations,
        operators,
    })
}

/// `y_k = (x_{2k−1} + i x_{2k}) / √2` from a `2n`-letter semicircular system.
#[derive(Clone, Debug)]
pub struct CircularSystem {
    pub basis: FockBasis,
    pub operators: Vec<SparseOperator>,
}

pub fn circular_system(n: usize, depth: usize) -> Result<CircularSystem, FockError> {
    let semi = semicircular_system(2 * n, depth)?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let operators = semi
        .operators
        .chunks(2)
        .map(|p| SparseOperator::linear_combination(&[(c64(r, 0.0), &p[0]), (c64(0.0, r), &p[1])]))
        .collect();
    Ok(CircularSystem {
        basis: semi.basis,
        operators,
    })
}

/// `c(n, depth) = ½‖Σ_i (s_i + s_i^*)²‖^{1/2}` with truncated creation
/// operators.
///
/// The operator `T = Σ_i (s_i + s_i^*)²` commutes with the decomposition of
/// a word into a prefix of doubled letters `(i_1 i_1)…(i_m i_m)` and a core
/// that does not start with a doubled letter. For each core length `ℓ` the
/// symmetric vectors over prefixes of `m` pairs span an invariant chain on
/// which `T` is tridiagonal, with diagonal `n·[L < depth] + [L > 0]` at word
/// length `L = 2m + ℓ` and off-diagonal `√n`; the remaining vectors give no
/// larger eigenvalue. The norm is the largest eigenvalue over these chains.
pub fn cuntz_witness_value(n: usize, depth: usize) -> Result<f64, FockError> {
    check_witness_args(n, depth)?;
    let mut best = 0.0f64;
    // A core of length ≥ 2 needs two distinct leading letters.
    let max_core = if n >= 2 { depth } else { depth.min(1) };
    for core in 0..=max_core {
        best = best.max(chain_matrix(n, depth, core).map(largest_eigenvalue)?);
    }
    Ok(0.5 * best.sqrt())
}

/// Same quantity by a sparse norm computation on the whole Fock space.
pub fn cuntz_witness_direct(n: usize, depth: usize) -> Result<f64, FockError> {
    check_witness_args(n, depth)?;
    let basis = FockBasis::new(n, depth)?;
    let mut total = SparseOperator::zeros(basis.len(), basis.len());
    for i in 1..=n {
        let s = creation(&basis, i)?;
        let x = s.add(&s.adjoint());
        total = total.add(&x.matmul(&x));
    }
    Ok(0.5 * operator_norm(&total, DEFAULT_TOL)?.sqrt())
}

/// Lower bound for [`cuntz_witness_value`] from the numerical range:
/// with `f_j` the normalized sum of all `j`-fold doubled prefixes,
/// `ξ_r ∝ Σ_{j ≤ depth/2} r^j f_j` and the bound is `½⟨Tξ_r, ξ_r⟩^{1/2}`.
pub fn numerical_range_probe(n: usize, depth: usize, r: f64) -> Result<f64, FockError> {
    check_witness_args(n, depth)?;
    let t = chain_matrix(n, depth, 0)?;
    let v: Vec<Complex64> = (0..t.rows()).map(|j| c64(r.powi(j as i32), 0.0)).collect();
    let tv = t.apply(&v);
    let num: f64 = v.iter().zip(&tv).map(|(a, b)| (a.conj() * b).re).sum();
    let den: f64 = v.iter().map(|a| a.norm_sqr()).sum();
    Ok(0.5 * (num / den).sqrt())
}

/// `(1 + √n) / 2`.
pub fn cuntz_witness_limit(n: usize) -> f64 {
    0.5 * (1.0 + (n as f64).sqrt())
}

fn check_witness_args(n: usize, depth: usize) -> Result<(), FockError> {
    if n == 0 {
        return Err(FockError::EmptyAlphabet);
    }
    if depth < 4 {
        return Err(FockError::DepthTooSmall { depth, min: 4 });
    }
    Ok(())
}

fn chain_matrix(n: usize, depth: usize, core: usize) -> Result<ComplexMatrix, FockError> {
    let levels = (depth - core) / 2 + 1;
    let nf = n as f64;
    let mut t = ComplexMatrix::zeros(levels, levels);
    for m in 0..levels {
        let len = 2 * m + core;
        let diag = if len < depth { nf } else { 0.0 } + if len > 0 { 1.0 } else { 0.0 };
        t[(m, m)] = c64(diag, 0.0);
        if m + 1 < levels {
            t[(m, m + 1)] = c64(nf.sqrt(), 0.0);
            t[(m + 1, m)] = c64(nf.sqrt(), 0.0);
        }
    }
    Ok(t)
}

fn largest_eigenvalue(t: ComplexMatrix) -> f64 {
    hermitian_eigenvalues(&t)
        .expect("chain matrix is real symmetric")
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// An element `(a_i) ⊕ (b_i)` of `(C_n ⊕ R_n) ⊗ M_d`: a column part and a
/// row part, each an `n`-tuple of `d × d` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct RPair {
    pub column: Vec<ComplexMatrix>,
    pub row: Vec<ComplexMatrix>,
}

impl RPair {
    pub fn new(column: Vec<ComplexMatrix>, row: Vec<ComplexMatrix>) -> Result<Self, FockError> {
        if column.len() != row.len() {
            return Err(FockError::PairLength {
                column: column.len(),
                row: row.len(),
            });
        }
        if let Some(first) = column.first() {
            let d = first.rows();
            if column.iter().chain(&row).any(|a| a.shape() != (d, d)) {
                return Err(FockError::PairShape { d });
            }
        }
        Ok(Self { column, row })
    }

    /// `max(‖Σ a_i^* a_i‖^{1/2}, ‖Σ b_i b_i^*‖^{1/2})`.
    pub fn norm(&self) -> f64 {
        crate::linalg::column_norm(&self.column).max(crate::linalg::row_norm(&self.row))
    }

    /// `½(z + Rz)`: the same tuple `½(a_i + b_i)` in both parts.
    pub fn symmetrize(&self) -> Self {
        let avg: Vec<ComplexMatrix> = self
            .column
            .iter()
            .zip(&self.row)
            .map(|(a, b)| (a + b).scale_real(0.5))
            .collect();
        Self {
            column: avg.clone(),
            row: avg,
        }
    }

    pub fn is_fixed(&self, tol: f64) -> bool {
        self.column.iter().zip(&self.row).all(|(a, b)| (a - b).max_abs() <= tol)
    }
}

/// `R ⊗ 1`: `(a_i) ⊕ (b_i) ↦ (b_i) ⊕ (a_i)`. On the scalar level this is
/// the transpose swap `x ⊕ y ↦ yᵗ ⊕ xᵗ` between the column and row spaces.
pub fn r_map_apply(z: &RPair) -> RPair {
    RPair {
        column: z.row.clone(),
        row: z.column.clone(),
    }
}
