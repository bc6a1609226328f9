//! Rounding permutations into diagonally embedded copies of a smaller
//! symmetric group, and unitaries into embedded smaller unitary groups.
//!
//! On the permutation side all distances and bounds are exact.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_traits::{Pow, ToPrimitive};
use thiserror::Error;

use crate::matrix::{
    hs_distance, nearest_unitary, normal_eigendecomposition, ComplexSquareMatrix, MatrixError,
    UnitaryElement, C64,
};
use crate::perm::{PermError, Permutation};
use crate::rational::{ceil_power, int, rational, PowerBound, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RoundingError {
    #[error("block size {block} does not divide degree {degree}")]
    NotDivisible { degree: usize, block: usize },
    #[error("expected degree {expected}, got {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("width {width} exceeds the allowed {limit}")]
    WidthTooLarge { width: usize, limit: usize },
    #[error("exponent must lie strictly between 0 and 1")]
    BadExponent,
    #[error("parameters must be positive")]
    ZeroParameter,
    #[error("remainder {r} must be smaller than {m}")]
    RemainderTooLarge { r: usize, m: usize },
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// The default exponent `β = 1/3`.
pub fn default_beta() -> Rational {
    rational(1, 3)
}

fn check_beta(beta: &Rational) -> Result<(), RoundingError> {
    if *beta <= int(0) || *beta >= int(1) {
        return Err(RoundingError::BadExponent);
    }
    Ok(())
}

fn replace_cycles(degree: usize, cycles: &[Vec<usize>]) -> Permutation {
    Permutation::from_cycles(degree, cycles).expect("cycles partition the points")
}

/// Cuts every cycle longer than `m` into consecutive blocks of `m` points,
/// following the cycle from its smallest point, plus one shorter final block.
/// Shorter cycles, fixed points included, are kept.
///
/// The result has width at most `m` and distance at most `2/m` from `σ`.
pub fn chop_cycles(sigma: &Permutation, m: usize) -> Result<Permutation, RoundingError> {
    let n = sigma.degree();
    if m == 0 || !n.is_multiple_of(m) {
        return Err(RoundingError::NotDivisible {
            degree: n,
            block: m,
        });
    }
    Ok(chop_unchecked(sigma, m))
}

fn chop_unchecked(sigma: &Permutation, m: usize) -> Permutation {
    let mut pieces = Vec::new();
    for cycle in sigma.cycles() {
        if cycle.len() <= m {
            pieces.push(cycle);
        } else {
            pieces.extend(cycle.chunks(m).map(<[usize]>::to_vec));
        }
    }
    replace_cycles(sigma.degree(), &pieces)
}

/// [`chop_cycles`] with block `c = ⌈m^β⌉` applied to `σ ∈ S_{km}`, after padding
/// with fixed points to the next multiple of `c`, then restricted back.
///
/// Width at most `⌈m^β⌉`, distance at most `8/m^β`.
pub fn chop_cycles_padded(
    sigma: &Permutation,
    m: usize,
    k: usize,
    beta: &Rational,
) -> Result<Permutation, RoundingError> {
    check_beta(beta)?;
    if m == 0 || k == 0 {
        return Err(RoundingError::ZeroParameter);
    }
    let n = k * m;
    if sigma.degree() != n {
        return Err(RoundingError::DegreeMismatch {
            expected: n,
            found: sigma.degree(),
        });
    }
    let c = ceil_power(m as u64, beta) as usize;
    let padded_degree = n.div_ceil(c) * c;
    let padded = sigma.pad_embed(padded_degree)?;
    let chopped = chop_cycles(&padded, c)?;
    Ok(chopped
        .restrict(n)
        .expect("cutting keeps every point inside its cycle"))
}

/// Makes every cycle count a multiple of `k`: for each length `i ≥ 2`, the
/// `|C_i| mod k` cycles of length `i` with the smallest minima become fixed
/// points.
///
/// Requires `k | degree` and width at most `⌈m^β⌉` with `m = degree/k`.
pub fn align_counts(
    tau: &Permutation,
    k: usize,
    beta: &Rational,
) -> Result<Permutation, RoundingError> {
    check_beta(beta)?;
    let n = tau.degree();
    if k == 0 || !n.is_multiple_of(k) {
        return Err(RoundingError::NotDivisible {
            degree: n,
            block: k,
        });
    }
    let limit = ceil_power((n / k) as u64, beta) as usize;
    if tau.width() > limit {
        return Err(RoundingError::WidthTooLarge {
            width: tau.width(),
            limit,
        });
    }
    let profile = tau.cycle_profile();
    let mut to_drop: Vec<usize> = (0..=limit)
        .map(|len| if len >= 2 { profile.count(len) % k } else { 0 })
        .collect();
    let kept: Vec<Vec<usize>> = tau
        .cycles()
        .into_iter()
        .filter(|c| {
            let slot = &mut to_drop[c.len()];
            if *slot > 0 {
                *slot -= 1;
                false
            } else {
                true
            }
        })
        .collect();
    Ok(replace_cycles(n, &kept))
}

/// The smallest `m` with `m^{2β} − 3m^β − 2 ≥ 0`, i.e. `m^β ≥ (3 + √17)/2`.
/// From this size on `⌈m^β⌉(⌈m^β⌉ + 1)/2 ≤ m^{2β}`, which certifies the
/// [`align_counts`] bound `m^{2β−1}`.
pub fn m0(beta: &Rational) -> u64 {
    let beta = beta.to_f64().expect("finite exponent");
    let threshold = (3.0 + 17f64.sqrt()) / 2.0;
    let mut m = threshold.powf(1.0 / beta).floor().max(1.0) as u64;
    while (m as f64).powf(beta) < threshold {
        m += 1;
    }
    while m > 1 && ((m - 1) as f64).powf(beta) >= threshold {
        m -= 1;
    }
    m
}

/// Exact test of `⌈m^β⌉(⌈m^β⌉ + 1)/2 ≤ m^{2β}`.
pub fn cycle_budget_fits(m: u64, beta: &Rational) -> bool {
    let c = ceil_power(m, beta);
    let triangle = Rational::from_integer(BigInt::from(c * (c + 1) / 2));
    let q = beta.denom().to_i32().expect("small exponent");
    let p = beta.numer().to_i32().expect("small exponent");
    let lhs: Rational = Pow::pow(&triangle, q);
    let rhs: Rational = Pow::pow(&int(m as i64), 2 * p);
    lhs <= rhs
}

/// A rounding `ρ` of `σ ∈ S_{km}` with `ρ = π Φ(ρ̃) π⁻¹`, where `Φ` is the
/// diagonal embedding of `k` copies of `ρ̃ ∈ S_m` and `π` is a relabelling.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundingResult {
    pub rounded: Permutation,
    pub small: Permutation,
    pub conjugator: Permutation,
    /// The intermediate permutation after cutting long cycles.
    pub chopped: Permutation,
    pub m: usize,
    pub k: usize,
    /// `d(σ, ρ)`.
    pub achieved: Rational,
    /// `d(σ, τ)` for the chopped intermediate `τ`.
    pub chop_distance: Rational,
    /// `d(τ, ρ)`.
    pub align_distance: Rational,
    /// `9/∛m`.
    pub bound: PowerBound,
    /// Whether `m ≥ m₀(1/3)`, so that `achieved ≤ bound` is certified.
    pub guaranteed: bool,
}

impl RoundingResult {
    pub fn within_bound(&self) -> bool {
        self.bound.admits(&self.achieved)
    }

    /// `π Φ(ρ̃) π⁻¹`, which equals `rounded`.
    pub fn reconstruct(&self) -> Permutation {
        self.small
            .diagonal_embed(self.k, self.k * self.m)
            .and_then(|p| p.conjugate_by(&self.conjugator))
            .expect("degrees agree by construction")
    }
}

/// Rounds `σ ∈ S_{km}` to a conjugate of a diagonally embedded `S_m` element:
/// long cycles are cut with `β = 1/3`, then cycle counts are aligned to
/// multiples of `k`.
pub fn round_to_subgroup(
    sigma: &Permutation,
    m: usize,
    k: usize,
) -> Result<RoundingResult, RoundingError> {
    let beta = default_beta();
    let chopped = chop_cycles_padded(sigma, m, k, &beta)?;
    let rounded = align_counts(&chopped, k, &beta)?;
    let (small, conjugator) = split_diagonal(&rounded, m, k);
    Ok(RoundingResult {
        achieved: sigma.hamming_distance(&rounded)?,
        chop_distance: sigma.hamming_distance(&chopped)?,
        align_distance: chopped.hamming_distance(&rounded)?,
        bound: PowerBound::new(int(9), m as u64, rational(-1, 3)),
        guaranteed: m as u64 >= m0(&beta),
        rounded,
        small,
        conjugator,
        chopped,
        m,
        k,
    })
}

/// For `ρ ∈ S_{km}` whose cycle counts are all multiples of `k`, finds
/// `ρ̃ ∈ S_m` and `π` with `ρ = π Φ(ρ̃) π⁻¹`. Cycles of equal length are
/// taken in order of their minima, `k` at a time; each group becomes one
/// cycle on consecutive points of `ρ̃`, and copy `j` of it is sent to the
/// `j`-th cycle of the group.
fn split_diagonal(rho: &Permutation, m: usize, k: usize) -> (Permutation, Permutation) {
    let mut by_length: std::collections::BTreeMap<usize, Vec<Vec<usize>>> = Default::default();
    for c in rho.cycles() {
        by_length.entry(c.len()).or_default().push(c);
    }
    let mut small = vec![0usize; m];
    let mut pi = vec![0usize; k * m];
    let mut next = 0;
    for (len, cycles) in by_length {
        for group in cycles.chunks(k) {
            debug_assert_eq!(group.len(), k);
            for s in 0..len {
                small[next + s] = next + (s + 1) % len;
                for (j, cycle) in group.iter().enumerate() {
                    pi[j * m + next + s] = cycle[s];
                }
            }
            next += len;
        }
    }
    debug_assert_eq!(next, m);
    (
        Permutation::from_images(small).expect("consecutive cycles"),
        Permutation::from_images(pi).expect("cycles partition the points"),
    )
}

/// How the approximant is built from the core.
#[derive(Debug, Clone, PartialEq)]
pub enum Embedding {
    /// `diag(B, I_padding)`.
    BlockDiagonal { padding: usize },
    /// `V (I_copies ⊗ B) V*`.
    Conjugated {
        frame: UnitaryElement,
        copies: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryRoundingResult {
    pub approximant: UnitaryElement,
    pub core: UnitaryElement,
    pub embedding: Embedding,
    /// `hs_distance(input, approximant)`.
    pub achieved: f64,
    pub bound: f64,
}

impl UnitaryRoundingResult {
    /// Rebuilds the approximant from the core through the embedding.
    pub fn reconstruct(&self) -> UnitaryElement {
        match &self.embedding {
            Embedding::BlockDiagonal { padding } => self.core.pad_identity(*padding),
            Embedding::Conjugated { frame, copies } => {
                let stacked = UnitaryElement::identity(*copies).kron(&self.core);
                frame
                    .mul(&stacked)
                    .and_then(|x| x.mul(&frame.inverse()))
                    .expect("dimensions agree by construction")
            }
        }
    }
}

/// Angle of `z` in `[0, 2π)`.
fn angle(z: C64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

/// Approximates `A ∈ U_{km}` by `W (I_k ⊗ B) W*`: eigenvalues sorted by angle
/// in `[0, 2π)` are grouped into `m` consecutive blocks of `k`, and each block
/// is replaced by the unit number at its circular mean.
///
/// `achieved` is the `hs_distance` to `A`; `bound` is `π/√m`, i.e. a
/// normalized Hilbert-Schmidt error of at most `2π/√m`.
pub fn block_average_unitary(
    a: &UnitaryElement,
    k: usize,
) -> Result<UnitaryRoundingResult, RoundingError> {
    let n = a.dim();
    if k == 0 || !n.is_multiple_of(k) {
        return Err(RoundingError::NotDivisible {
            degree: n,
            block: k,
        });
    }
    let m = n / k;
    let (w, eigenvalues) = normal_eigendecomposition(a.matrix())?;
    let angles: Vec<f64> = eigenvalues.iter().map(|&z| angle(z)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| angles[i].total_cmp(&angles[j]).then(i.cmp(&j)));
    let means: Vec<C64> = order
        .chunks(k)
        .map(|block| {
            let sum: C64 = block.iter().map(|&i| eigenvalues[i]).sum();
            let theta = if sum.norm() < 1e-12 {
                block.iter().map(|&i| angles[i]).sum::<f64>() / k as f64
            } else {
                sum.arg()
            };
            C64::from_polar(1.0, theta)
        })
        .collect();
    let core = UnitaryElement::new(ComplexSquareMatrix::diagonal(&means)?)?;
    // Column j·m + b of the frame is the eigenvector of the j-th eigenvalue in block b.
    let frame_matrix = ComplexSquareMatrix::from_fn(n, |row, col| {
        let (j, b) = (col / m, col % m);
        w.matrix().get(row, order[b * k + j])
    })?;
    let frame = UnitaryElement::new(frame_matrix)?;
    let mut result = UnitaryRoundingResult {
        approximant: UnitaryElement::identity(n),
        core,
        embedding: Embedding::Conjugated { frame, copies: k },
        achieved: 0.0,
        bound: std::f64::consts::PI / (m as f64).sqrt(),
    };
    result.approximant = result.reconstruct();
    result.achieved = hs_distance(a, &result.approximant)?;
    Ok(result)
}

/// Rounds `C ∈ U_{km+r}` to the image of `U_{km}` under `B ↦ diag(B, I_r)`:
/// `B` is the nearest unitary to the top-left `km × km` block of `C`.
///
/// A singular block is reported as an error. `bound` is `4/k^{1/4}`.
pub fn unitary_round(
    c: &UnitaryElement,
    k: usize,
    m: usize,
    r: usize,
) -> Result<UnitaryRoundingResult, RoundingError> {
    if k == 0 || m == 0 {
        return Err(RoundingError::ZeroParameter);
    }
    if r >= m {
        return Err(RoundingError::RemainderTooLarge { r, m });
    }
    let n = k * m + r;
    if c.dim() != n {
        return Err(RoundingError::DegreeMismatch {
            expected: n,
            found: c.dim(),
        });
    }
    let block = c.matrix().top_left(k * m)?;
    let core = nearest_unitary(&block)?;
    let approximant = core.pad_identity(r);
    Ok(UnitaryRoundingResult {
        achieved: hs_distance(c, &approximant)?,
        bound: 4.0 / (k as f64).powf(0.25),
        approximant,
        core,
        embedding: Embedding::BlockDiagonal { padding: r },
    })
}

/// `1 − √(km/(km + r))`: the relative shrinkage of distances under
/// `B ↦ diag(B, I_r)`, at most `1/k` when `r < m`.
pub fn padding_shrinkage(k: usize, m: usize, r: usize) -> f64 {
    let km = (k * m) as f64;
    1.0 - (km / (km + r as f64)).sqrt()
}
