//! Families `(a_J)_{J ∈ [n]^k}` of `d × d` matrices and their norms.
//!
//! A multi-index `J = (j_1, …, j_k)` is 0-based and flattened
//! lexicographically with `j_1` most significant. The same flattening is
//! used for the row and column block indices of [`matricize`] and for the
//! tensor factors of [`assemble_en_tensor`].

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{c64, operator_norm, trace_norm, ComplexMatrix, LinalgError, SparseOperator, DEFAULT_TOL};

/// Largest supported degree `k`.
pub const MAX_DEGREE: usize = 16;
/// Largest side of the dense operator built by [`assemble_en_tensor`].
pub const MAX_ASSEMBLED_DIM: usize = 2048;
/// Largest `n^k · d²` accepted by [`dual_bracket_norm`].
pub const MAX_DUAL_COORDINATES: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpSpaceError {
    #[error("degree mismatch: family has k = {family}, mask has k = {mask}")]
    DegreeMismatch { family: usize, mask: usize },
    #[error("mask member {member} outside 1..={k}")]
    InvalidMask { member: usize, k: usize },
    #[error("degree {0} outside 1..={MAX_DEGREE}")]
    InvalidDegree(usize),
    #[error("family needs n ≥ 1 and d ≥ 1, got n = {n}, d = {d}")]
    EmptyFamily { n: usize, d: usize },
    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },
    #[error("entry {index} has shape {found:?}, expected {d}×{d}")]
    EntryShape {
        index: usize,
        found: (usize, usize),
        d: usize,
    },
    #[error("multi-index {0:?} out of range")]
    BadIndex(Vec<usize>),
    #[error("problem size {size} exceeds limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A subset `α ⊆ {1, …, k}`, stored as a bitmask (bit `l − 1` for member `l`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlphaMask {
    k: usize,
    bits: u32,
}

impl AlphaMask {
    /// Mask from 1-based members.
    pub fn new(k: usize, members: &[usize]) -> Result<Self, OpSpaceError> {
        if k == 0 || k > MAX_DEGREE {
            return Err(OpSpaceError::InvalidDegree(k));
        }
        let mut bits = 0u32;
        for &m in members {
            if m == 0 || m > k {
                return Err(OpSpaceError::InvalidMask { member: m, k });
            }
            bits |= 1 << (m - 1);
        }
        Ok(Self { k, bits })
    }

    pub fn from_bits(k: usize, bits: u32) -> Result<Self, OpSpaceError> {
        if k == 0 || k > MAX_DEGREE {
            return Err(OpSpaceError::InvalidDegree(k));
        }
        if bits >> k != 0 {
            return Err(OpSpaceError::InvalidMask {
                member: 32 - bits.leading_zeros() as usize,
                k,
            });
        }
        Ok(Self { k, bits })
    }

    pub fn empty(k: usize) -> Self {
        Self::from_bits(k, 0).expect("valid degree")
    }

    pub fn full(k: usize) -> Self {
        Self::from_bits(k, (1u32 << k) - 1).expect("valid degree")
    }

    /// All `2^k` masks, ordered by bit pattern.
    pub fn all(k: usize) -> Vec<Self> {
        (0..1u32 << k).map(|bits| Self { k, bits }).collect()
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Whether the 1-based coordinate `l` is in the mask.
    pub fn contains(&self, l: usize) -> bool {
        l >= 1 && l <= self.k && self.bits >> (l - 1) & 1 == 1
    }

    pub fn members(&self) -> Vec<usize> {
        (1..=self.k).filter(|&l| self.contains(l)).collect()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.k
    }

    pub fn complement(&self) -> Self {
        Self {
            k: self.k,
            bits: !self.bits & ((1u32 << self.k) - 1),
        }
    }
}

impl fmt::Display for AlphaMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.members().iter().map(|l| l.to_string()).collect();
        write!(f, "{{{}}}", m.join(","))
    }
}

/// `n^k` matrices of size `d × d`, stored in lexicographic order of `J`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorFamily {
    n: usize,
    k: usize,
    d: usize,
    entries: Vec<ComplexMatrix>,
}

impl OperatorFamily {
    pub fn new(n: usize, k: usize, d: usize, entries: Vec<ComplexMatrix>) -> Result<Self, OpSpaceError> {
        check_dims(n, k, d)?;
        let expected = count(n, k)?;
        if entries.len() != expected {
            return Err(OpSpaceError::EntryCount {
                expected,
                found: entries.len(),
            });
        }
        if let Some((index, e)) = entries.iter().enumerate().find(|(_, e)| e.shape() != (d, d)) {
            return Err(OpSpaceError::EntryShape {
                index,
                found: e.shape(),
                d,
            });
        }
        Ok(Self { n, k, d, entries })
    }

    pub fn zeros(n: usize, k: usize, d: usize) -> Result<Self, OpSpaceError> {
        check_dims(n, k, d)?;
        Ok(Self {
            n,
            k,
            d,
            entries: vec![ComplexMatrix::zeros(d, d); count(n, k)?],
        })
    }

    /// Builds `a_J = f(J)` over all 0-based multi-indices.
    pub fn from_fn(
        n: usize,
        k: usize,
        d: usize,
        mut f: impl FnMut(&[usize]) -> ComplexMatrix,
    ) -> Result<Self, OpSpaceError> {
        check_dims(n, k, d)?;
        let entries = (0..count(n, k)?).map(|t| f(&unflatten(t, n, k))).collect();
        Self::new(n, k, d, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ComplexMatrix] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<ComplexMatrix> {
        self.entries
    }

    /// Linear position of a 0-based multi-index.
    pub fn position(&self, j: &[usize]) -> Result<usize, OpSpaceError> {
        if j.len() != self.k || j.iter().any(|&x| x >= self.n) {
            return Err(OpSpaceError::BadIndex(j.to_vec()));
        }
        Ok(j.iter().fold(0, |acc, &x| acc * self.n + x))
    }

    pub fn multi_index(&self, position: usize) -> Vec<usize> {
        unflatten(position, self.n, self.k)
    }

    pub fn get(&self, j: &[usize]) -> Result<&ComplexMatrix, OpSpaceError> {
        Ok(&self.entries[self.position(j)?])
    }

    pub fn set(&mut self, j: &[usize], a: ComplexMatrix) -> Result<(), OpSpaceError> {
        let index = self.position(j)?;
        if a.shape() != (self.d, self.d) {
            return Err(OpSpaceError::EntryShape {
                index,
                found: a.shape(),
                d: self.d,
            });
        }
        self.entries[index] = a;
        Ok(())
    }

    pub fn map(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<Self, OpSpaceError> {
        Self::new(self.n, self.k, self.d, self.entries.iter().map(f).collect())
    }

    /// `(a_J^*)_J`, same indexing.
    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.iter().map(ComplexMatrix::adjoint).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, c: crate::linalg::Complex64) -> Self {
        Self {
            entries: self.entries.iter().map(|a| a.scale(c)).collect(),
            ..self.clone()
        }
    }

    /// `Σ_J tr(self_J^* other_J)`.
    pub fn pairing(&self, other: &Self) -> Result<crate::linalg::Complex64, OpSpaceError> {
        self.same_shape(other)?;
        Ok(self.entries.iter().zip(&other.entries).map(|(x, a)| x.inner(a)).sum())
    }

    /// `(Σ_J ‖a_J‖_2²)^{1/2}`.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|a| a.frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn same_shape(&self, other: &Self) -> Result<(), OpSpaceError> {
        if (self.n, self.k, self.d) != (other.n, other.k, other.d) {
            return Err(OpSpaceError::EntryCount {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }

    fn check_mask(&self, alpha: AlphaMask) -> Result<(), OpSpaceError> {
        if alpha.k != self.k {
            return Err(OpSpaceError::DegreeMismatch {
                family: self.k,
                mask: alpha.k,
            });
        }
        Ok(())
    }
}

fn check_dims(n: usize, k: usize, d: usize) -> Result<(), OpSpaceError> {
    if k == 0 || k > MAX_DEGREE {
        return Err(OpSpaceError::InvalidDegree(k));
    }
    if n == 0 || d == 0 {
        return Err(OpSpaceError::EmptyFamily { n, d });
    }
    Ok(())
}

fn count(n: usize, k: usize) -> Result<usize, OpSpaceError> {
    n.checked_pow(k as u32).ok_or(OpSpaceError::TooLarge {
        size: usize::MAX,
        limit: usize::MAX,
    })
}

fn unflatten(mut t: usize, n: usize, k: usize) -> Vec<usize> {
    let mut j = vec![0; k];
    for slot in j.iter_mut().rev() {
        *slot = t % n;
        t /= n;
    }
    j
}

/// Block row and column of each entry in the α-matricization.
fn block_positions(n: usize, k: usize, alpha: AlphaMask) -> Vec<(usize, usize)> {
    let total = n.pow(k as u32);
    (0..total)
        .map(|t| {
            let j = unflatten(t, n, k);
            let (mut r, mut c) = (0, 0);
            for (l, &x) in j.iter().enumerate() {
                if alpha.contains(l + 1) {
                    c = c * n + x;
                } else {
                    r = r * n + x;
                }
            }
            (r, c)
        })
        .collect()
}

/// Block matrix with rows indexed by `[n]^{α^c} ⊗ C^d`, columns by
/// `[n]^α ⊗ C^d` and block `(π_{α^c}(J), π_α(J)) = a_J`.
pub fn matricize(fam: &OperatorFamily, alpha: AlphaMask) -> Result<ComplexMatrix, OpSpaceError> {
    fam.check_mask(alpha)?;
    let d = fam.d;
    let rows = fam.n.pow(alpha.complement().len() as u32);
    let cols = fam.n.pow(alpha.len() as u32);
    let mut m = ComplexMatrix::zeros(rows * d, cols * d);
    for ((r, c), a) in block_positions(fam.n, fam.k, alpha).into_iter().zip(&fam.entries) {
        m.set_block(r * d, c * d, a);
    }
    Ok(m)
}

/// Inverse of [`matricize`].
pub fn dematricize(
    m: &ComplexMatrix,
    n: usize,
    k: usize,
    d: usize,
    alpha: AlphaMask,
) -> Result<OperatorFamily, OpSpaceError> {
    check_dims(n, k, d)?;
    let expected = (
        n.pow(alpha.complement().len() as u32) * d,
        n.pow(alpha.len() as u32) * d,
    );
    if m.shape() != expected {
        return Err(LinalgError::ShapeMismatch {
            expected,
            found: m.shape(),
        }
        .into());
    }
    let entries = block_positions(n, k, alpha)
        .into_iter()
        .map(|(r, c)| m.block(r * d, c * d, d, d))
        .collect();
    OperatorFamily::new(n, k, d, entries)
}

/// `‖(a_J)‖_α`: operator norm of the α-matricization.
pub fn alpha_norm(fam: &OperatorFamily, alpha: AlphaMask) -> Result<f64, OpSpaceError> {
    Ok(operator_norm(&matricize(fam, alpha)?, DEFAULT_TOL)?)
}

/// `[(a_J)]_{(k)} = max_α ‖(a_J)‖_α`.
pub fn bracket_norm(fam: &OperatorFamily) -> Result<f64, OpSpaceError> {
    let norms = AlphaMask::all(fam.k)
        .into_par_iter()
        .map(|alpha| alpha_norm(fam, alpha))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(norms.into_iter().fold(0.0, f64::max))
}

/// Trace-dual of [`alpha_norm`] under `Σ_J tr(ξ_J^* a_J)`.
pub fn dual_alpha_norm(fam: &OperatorFamily, alpha: AlphaMask) -> Result<f64, OpSpaceError> {
    Ok(trace_norm(&matricize(fam, alpha)?))
}

/// `Σ_J δ_J ⊗ a_J` on `(C^{2n})^{⊗k} ⊗ C^d` with its pieces `T_α`.
#[derive(Clone, Debug)]
pub struct EnTensor {
    pub operator: ComplexMatrix,
    pub components: Vec<(AlphaMask, SparseOperator)>,
}

/// Concrete model of the bracket norm.
///
/// On `C^{2n} = C^n ⊕ C^n`, `δ_i = e_{i1} ⊕ e_{1i}`: the first summand is
/// the column unit `(i, 0)` and the second the row unit `(n, n + i)`.
/// Expanding `δ_J = ⊗_l δ_{j_l}` gives one term per mask, where the
/// coordinates in α take the row part. Each `T_α` is unitarily a copy of
/// the α-matricization, and their supports and ranges are orthogonal.
pub fn assemble_en_tensor(fam: &OperatorFamily) -> Result<EnTensor, OpSpaceError> {
    let (n, k, d) = (fam.n, fam.k, fam.d);
    let base = 2 * n;
    let dim = base
        .checked_pow(k as u32)
        .and_then(|x| x.checked_mul(d))
        .filter(|&x| x <= MAX_ASSEMBLED_DIM)
        .ok_or(OpSpaceError::TooLarge {
            size: base.saturating_pow(k as u32).saturating_mul(d),
            limit: MAX_ASSEMBLED_DIM,
        })?;
    let mut operator = ComplexMatrix::zeros(dim, dim);
    let mut components = Vec::with_capacity(1 << k);
    for alpha in AlphaMask::all(k) {
        let mut trip = Vec::new();
        for (t, a) in fam.entries.iter().enumerate() {
            let j = unflatten(t, n, k);
            let (mut r, mut c) = (0, 0);
            for (l, &x) in j.iter().enumerate() {
                let (rl, cl) = if alpha.contains(l + 1) { (n, n + x) } else { (x, 0) };
                r = r * base + rl;
                c = c * base + cl;
            }
            for p in 0..d {
                for q in 0..d {
                    let v = a[(p, q)];
                    if v != c64(0.0, 0.0) {
                        trip.push((r * d + p, c * d + q, v));
                        operator[(r * d + p, c * d + q)] += v;
                    }
                }
            }
        }
        components.push((alpha, SparseOperator::from_triplets(dim, dim, trip)?));
    }
    Ok(EnTensor { operator, components })
}

/// Two-sided bounds on the dual bracket norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Stopping rule for [`dual_bracket_norm_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualOptions {
    pub max_iterations: usize,
    pub check_every: usize,
    pub relative_gap: f64,
}

impl Default for DualOptions {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            check_every: 10,
            relative_gap: 1e-8,
        }
    }
}

/// `[(ξ_J)]^*_{(k)}`: the least `Σ_α ‖(ξ^α_J)‖^*_α` over splittings
/// `ξ = Σ_α ξ^α`, bracketed from both sides.
pub fn dual_bracket_norm(fam: &OperatorFamily) -> Result<DualCertificate, OpSpaceError> {
    dual_bracket_norm_with(fam, &DualOptions::default())
}

/// Primal-dual iteration for
/// `max Re⟨ξ, a⟩` subject to `‖M_α a‖ ≤ 1` for every α, whose dual is
/// `min Σ_α ‖y_α‖_1` subject to `Σ_α M_α^{-1} y_α = ξ`.
///
/// Every iterate yields a primal witness `a` (lower bound
/// `|⟨ξ, a⟩| / [a]`) and, after moving the constraint residual into one
/// block, a feasible splitting (upper bound).
pub fn dual_bracket_norm_with(fam: &OperatorFamily, opts: &DualOptions) -> Result<DualCertificate, OpSpaceError> {
    let (n, k, d) = (fam.n, fam.k, fam.d);
    let coords = fam.len() * d * d;
    if coords > MAX_DUAL_COORDINATES {
        return Err(OpSpaceError::TooLarge {
            size: coords,
            limit: MAX_DUAL_COORDINATES,
        });
    }
    let scale = fam.frobenius_norm();
    if scale == 0.0 {
        return Ok(DualCertificate {
            lower: 0.0,
            upper: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    let xi = fam.scale(c64(1.0 / scale, 0.0));
    let masks = AlphaMask::all(k);
    let xi_blocks: Vec<ComplexMatrix> = masks.iter().map(|&a| matricize(&xi, a)).collect::<Result<_, _>>()?;

    let mut lower = 0.0f64;
    let mut upper = f64::INFINITY;
    let witness = |a: &OperatorFamily, lower: &mut f64| -> Result<(), OpSpaceError> {
        let b = bracket_norm(a)?;
        if b > 0.0 {
            *lower = lower.max(xi.pairing(a)?.norm() / b);
        }
        Ok(())
    };

    // Single-mask splittings and their polar witnesses.
    witness(&xi, &mut lower)?;
    for (&alpha, m) in masks.iter().zip(&xi_blocks) {
        upper = upper.min(trace_norm(m));
        let polar = m.map_singular_values(|s| if s > 0.0 { 1.0 } else { 0.0 });
        witness(&dematricize(&polar, n, k, d, alpha)?, &mut lower)?;
    }

    let step = 0.99 / (masks.len() as f64).sqrt();
    let zero = OperatorFamily::zeros(n, k, d)?;
    let mut a = zero.clone();
    let mut a_bar = zero.clone();
    let mut y: Vec<ComplexMatrix> = xi_blocks
        .iter()
        .map(|m| ComplexMatrix::zeros(m.rows(), m.cols()))
        .collect();
    let mut iterations = 0;
    let mut converged = upper - lower <= opts.relative_gap * upper.max(1.0);
    while !converged && iterations < opts.max_iterations {
        iterations += 1;
        for (i, &alpha) in masks.iter().enumerate() {
            let shifted = &y[i] + &matricize(&a_bar, alpha)?.scale_real(step);
            y[i] = soft_threshold(&shifted, step);
        }
        let kty = adjoint_apply(&masks, &y, n, k, d)?;
        let mut next = Vec::with_capacity(a.len());
        for ((aj, kj), xj) in a.entries.iter().zip(&kty.entries).zip(&xi.entries) {
            next.push(&(aj - &kj.scale_real(step)) + &xj.scale_real(step));
        }
        let next = OperatorFamily::new(n, k, d, next)?;
        a_bar = OperatorFamily::new(
            n,
            k,
            d,
            next.entries
                .iter()
                .zip(&a.entries)
                .map(|(x, old)| &x.scale_real(2.0) - old)
                .collect(),
        )?;
        a = next;

        if iterations % opts.check_every == 0 || iterations == opts.max_iterations {
            witness(&a, &mut lower)?;
            upper = upper.min(feasible_upper(&masks, &y, &xi, &kty)?);
            converged = upper - lower <= opts.relative_gap * upper.max(1.0);
        }
    }
    // Both bounds are exact up to rounding; keep them ordered.
    let lower = lower.min(upper);
    Ok(DualCertificate {
        lower: lower * scale,
        upper: upper * scale,
        iterations,
        converged,
    })
}

/// Proximal map of `σ‖·‖_1`: shrink singular values by `σ`.
fn soft_threshold(m: &ComplexMatrix, sigma: f64) -> ComplexMatrix {
    if m.is_zero() {
        return m.clone();
    }
    m.map_singular_values(|s| (s - sigma).max(0.0))
}

/// `Σ_α M_α^{-1} y_α`.
fn adjoint_apply(
    masks: &[AlphaMask],
    y: &[ComplexMatrix],
    n: usize,
    k: usize,
    d: usize,
) -> Result<OperatorFamily, OpSpaceError> {
    let mut acc: Vec<ComplexMatrix> = vec![ComplexMatrix::zeros(d, d); n.pow(k as u32)];
    for (&alpha, m) in masks.iter().zip(y) {
        let part = dematricize(m, n, k, d, alpha)?;
        for (s, p) in acc.iter_mut().zip(part.entries) {
            *s = &*s + &p;
        }
    }
    OperatorFamily::new(n, k, d, acc)
}

/// Cost of the splitting `y` after absorbing `ξ − Σ M_α^{-1} y_α` into the
/// cheapest single block.
fn feasible_upper(
    masks: &[AlphaMask],
    y: &[ComplexMatrix],
    xi: &OperatorFamily,
    kty: &OperatorFamily,
) -> Result<f64, OpSpaceError> {
    let residual = OperatorFamily::new(
        xi.n,
        xi.k,
        xi.d,
        xi.entries.iter().zip(&kty.entries).map(|(x, t)| x - t).collect(),
    )?;
    let costs: Vec<f64> = y.iter().map(trace_norm).collect();
    let total: f64 = costs.iter().sum();
    let mut best = f64::INFINITY;
    for (i, &alpha) in masks.iter().enumerate() {
        let patched = &y[i] + &matricize(&residual, alpha)?;
        best = best.min(total - costs[i] + trace_norm(&patched));
    }
    Ok(best)
}
