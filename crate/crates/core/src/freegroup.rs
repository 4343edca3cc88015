//! Reduced words in the free group `F_n`, word-length balls, and the
//! compressed left regular representation on `ℓ²` of a ball.
//!
//! Letters are signed generator indices: `+i` is `g_i`, `-i` is `g_i^{-1}`,
//! with `1 ≤ i ≤ n`. Within a fixed length, words are ordered
//! lexicographically with `g_1 < g_1^{-1} < g_2 < g_2^{-1} < …`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::linalg::{c64, ComplexMatrix, LinalgError, SparseOperator};

/// Largest ball that [`GroupBall::new`] will enumerate.
pub const MAX_BALL_WORDS: usize = 4_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FreeGroupError {
    #[error("letter 0 is not a generator")]
    ZeroLetter,
    #[error("letters {0} and {1} cancel; word is not reduced")]
    NotReduced(i32, i32),
    #[error("generator {letter} outside 1..={n}")]
    GeneratorOutOfRange { letter: i32, n: usize },
    #[error("free group needs at least one generator")]
    NoGenerators,
    #[error("ball of radius {radius} in F_{n} has more than {limit} words")]
    BallTooLarge { n: usize, radius: usize, limit: usize },
    #[error("radius must be at least {required}, got {radius}")]
    RadiusTooSmall { radius: usize, required: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A reduced word: no adjacent pair `(+i, -i)` or `(-i, +i)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ReducedWord {
    letters: Vec<i32>,
}

impl ReducedWord {
    pub fn identity() -> Self {
        Self::default()
    }

    /// `g_i` (for `i > 0`) or `g_{|i|}^{-1}` (for `i < 0`).
    pub fn letter(l: i32) -> Result<Self, FreeGroupError> {
        if l == 0 {
            return Err(FreeGroupError::ZeroLetter);
        }
        Ok(Self { letters: vec![l] })
    }

    pub fn generator(i: usize) -> Self {
        assert!(i >= 1, "generators are numbered from 1");
        Self {
            letters: vec![i as i32],
        }
    }

    pub fn inverse_generator(i: usize) -> Self {
        assert!(i >= 1, "generators are numbered from 1");
        Self {
            letters: vec![-(i as i32)],
        }
    }

    /// Accepts an already reduced letter sequence.
    pub fn from_letters(letters: Vec<i32>) -> Result<Self, FreeGroupError> {
        if letters.contains(&0) {
            return Err(FreeGroupError::ZeroLetter);
        }
        if let Some(w) = letters.windows(2).find(|w| w[0] == -w[1]) {
            return Err(FreeGroupError::NotReduced(w[0], w[1]));
        }
        Ok(Self { letters })
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce(letters: impl IntoIterator<Item = i32>) -> Result<Self, FreeGroupError> {
        let mut out: Vec<i32> = Vec::new();
        for l in letters {
            if l == 0 {
                return Err(FreeGroupError::ZeroLetter);
            }
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Ok(Self { letters: out })
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    /// Word length `|g|`.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first_letter(&self) -> Option<i32> {
        self.letters.first().copied()
    }

    pub fn max_generator(&self) -> usize {
        self.letters
            .iter()
            .map(|l| l.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn inverse(&self) -> Self {
        Self {
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    /// Group product `self · other`, fully cancelled.
    pub fn multiply(&self, other: &Self) -> Self {
        let overlap = self
            .letters
            .iter()
            .rev()
            .zip(&other.letters)
            .take_while(|(a, b)| **a == -**b)
            .count();
        let mut letters = Vec::with_capacity(self.len() + other.len() - 2 * overlap);
        letters.extend_from_slice(&self.letters[..self.len() - overlap]);
        letters.extend_from_slice(&other.letters[overlap..]);
        Self { letters }
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            if *l > 0 {
                write!(f, "g{l}")?;
            } else {
                write!(f, "g{}^-1", -l)?;
            }
        }
        Ok(())
    }
}

/// Letters of `F_n` in canonical order.
pub fn alphabet(n: usize) -> Vec<i32> {
    (1..=n as i32).flat_map(|i| [i, -i]).collect()
}

/// `1 + Σ_{m=1}^{R} 2n(2n−1)^{m−1}`, or `None` on overflow.
pub fn ball_size(n: usize, radius: usize) -> Option<usize> {
    let mut total: usize = 1;
    let mut level: usize = 2 * n;
    for m in 1..=radius {
        if m > 1 {
            level = level.checked_mul(2 * n - 1)?;
        }
        total = total.checked_add(level)?;
    }
    Some(total)
}

/// All reduced words of length at most `radius`, indexed breadth-first.
#[derive(Clone, Debug)]
pub struct GroupBall {
    n: usize,
    radius: usize,
    words: Vec<ReducedWord>,
    index: HashMap<ReducedWord, usize>,
}

impl GroupBall {
    pub fn new(n: usize, radius: usize) -> Result<Self, FreeGroupError> {
        if n == 0 {
            return Err(FreeGroupError::NoGenerators);
        }
        let size = ball_size(n, radius)
            .filter(|&s| s <= MAX_BALL_WORDS)
            .ok_or(FreeGroupError::BallTooLarge {
                n,
                radius,
                limit: MAX_BALL_WORDS,
            })?;
        let letters = alphabet(n);
        let mut words = Vec::with_capacity(size);
        words.push(ReducedWord::identity());
        let mut level_start = 0;
        for _ in 0..radius {
            let level_end = words.len();
            for w in level_start..level_end {
                let last = words[w].letters.last().copied();
                for &l in &letters {
                    if last == Some(-l) {
                        continue;
                    }
                    let mut next = words[w].letters.clone();
                    next.push(l);
                    words.push(ReducedWord { letters: next });
                }
            }
            level_start = level_end;
        }
        debug_assert_eq!(words.len(), size);
        let index = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        Ok(Self {
            n,
            radius,
            words,
            index,
        })
    }

    pub fn generators(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[ReducedWord] {
        &self.words
    }

    pub fn word(&self, idx: usize) -> &ReducedWord {
        &self.words[idx]
    }

    pub fn index_of(&self, w: &ReducedWord) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Indicator of `{g : |g| ≤ R − 1}`.
    pub fn interior_mask(&self) -> Vec<bool> {
        self.words.iter().map(|w| w.len() < self.radius).collect()
    }

    fn check_word(&self, w: &ReducedWord) -> Result<(), FreeGroupError> {
        if let Some(&l) = w.letters.iter().find(|l| l.unsigned_abs() as usize > self.n) {
            return Err(FreeGroupError::GeneratorOutOfRange { letter: l, n: self.n });
        }
        Ok(())
    }
}

/// Compression `P λ(w) P` of left translation to the ball: `δ_g ↦ δ_{wg}`
/// when `|wg| ≤ R`, otherwise `0`.
pub fn lambda_truncated(ball: &GroupBall, w: &ReducedWord) -> Result<SparseOperator, FreeGroupError> {
    ball.check_word(w)?;
    let one = c64(1.0, 0.0);
    let trip = ball.words.iter().enumerate().filter_map(|(j, g)| {
        let h = w.multiply(g);
        ball.index_of(&h).map(|i| (i, j, one))
    });
    Ok(SparseOperator::from_triplets(ball.len(), ball.len(), trip)?)
}

/// Diagonal projection onto words whose first letter is `letter`.
pub fn first_letter_projection(ball: &GroupBall, letter: i32) -> SparseOperator {
    let mask: Vec<bool> = ball.words.iter().map(|w| w.first_letter() == Some(letter)).collect();
    SparseOperator::coordinate_projection(&mask)
}

/// Projections onto `Cδ_e`, `ℓ²(Γ_i^+ ∩ ball)` and `ℓ²(Γ_i^- ∩ ball)`.
#[derive(Clone, Debug)]
pub struct BoundaryProjections {
    pub e0: SparseOperator,
    pub plus: SparseOperator,
    pub minus: SparseOperator,
}

pub fn boundary_projections(ball: &GroupBall, i: usize) -> Result<BoundaryProjections, FreeGroupError> {
    if i == 0 || i > ball.n {
        return Err(FreeGroupError::GeneratorOutOfRange {
            letter: i as i32,
            n: ball.n,
        });
    }
    let mut vacuum = vec![false; ball.len()];
    vacuum[0] = true;
    Ok(BoundaryProjections {
        e0: SparseOperator::coordinate_projection(&vacuum),
        plus: first_letter_projection(ball, i as i32),
        minus: first_letter_projection(ball, -(i as i32)),
    })
}

/// Splitting of the compressed `λ(s)` for a letter `s`:
/// `u = e_s λ(s)` and `v = λ(s) e_{s^{-1}}`, where `e_t` projects onto
/// words starting with `t`. For `s = g_i` this is `u_i = e_i^+ λ(g_i)`,
/// `v_i = λ(g_i) e_i^-`; for `s = g_i^{-1}` the roles of `±` swap.
pub fn haagerup_decomposition(
    ball: &GroupBall,
    letter: i32,
) -> Result<(SparseOperator, SparseOperator), FreeGroupError> {
    if ball.radius == 0 {
        return Err(FreeGroupError::RadiusTooSmall { radius: 0, required: 1 });
    }
    let w = ReducedWord::letter(letter)?;
    let lambda = lambda_truncated(ball, &w)?;
    let starts_with = first_letter_projection(ball, letter);
    let starts_with_inverse = first_letter_projection(ball, -letter);
    Ok((starts_with.matmul(&lambda), lambda.matmul(&starts_with_inverse)))
}

/// `Σ_s λ(s) ⊗ a_s` on the ball, for words `s` and `d × d` coefficients.
pub fn lambda_tensor_sum(
    ball: &GroupBall,
    words: &[ReducedWord],
    coeffs: &[ComplexMatrix],
) -> Result<SparseOperator, FreeGroupError> {
    let ops = words
        .iter()
        .map(|w| lambda_truncated(ball, w))
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&SparseOperator> = ops.iter().collect();
    Ok(SparseOperator::tensor_sum(&refs, coeffs)?)
}
