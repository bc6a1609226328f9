//! Complex matrices for unitary groups and exact rational matrices for the
//! rank metric.
//!
//! Two norms are exposed on complex matrices and they are not interchangeable:
//! [`ComplexSquareMatrix::frobenius`] is `√Σ|a_ij|²` and
//! [`ComplexSquareMatrix::normalized_hs`] is `frobenius / √n`. The group metric
//! [`hs_distance`] is `frobenius(A − B) / (2√n)`, which lies in `[0, 1]` on
//! unitaries.

use std::fmt;

use nalgebra::{Complex, DMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::Permutation;
use crate::rational::{denominator_lcm, format_pq, parse_rational, Rational};

pub type C64 = Complex<f64>;

/// Frobenius tolerance on `A*A − I` for a matrix to count as unitary.
pub const UNITARY_TOL: f64 = 1e-8;

/// Smallest singular value accepted by [`nearest_unitary`].
pub const SINGULAR_TOL: f64 = 1e-12;

/// Frobenius tolerance on the strictly upper Schur factor when diagonalizing a
/// matrix that should be normal.
pub const NORMALITY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has dimension zero")]
    Empty,
    #[error("matrix has a non-finite entry")]
    NonFinite,
    #[error("matrix is not unitary: ‖A*A − I‖_F = {defect:e}")]
    NotUnitary { defect: f64 },
    #[error("matrix is singular: smallest singular value {smallest:e}")]
    Singular { smallest: f64 },
    #[error("rational matrix is singular")]
    SingularRational,
    #[error("matrix is not normal within tolerance: off-diagonal Schur mass {off_diagonal:e}")]
    NotNormal { off_diagonal: f64 },
    #[error("numerical decomposition did not converge")]
    NoConvergence,
    #[error("malformed matrix data: {0}")]
    Malformed(String),
}

/// Dense `n × n` complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexSquareMatrix {
    inner: DMatrix<C64>,
}

impl ComplexSquareMatrix {
    pub fn new(inner: DMatrix<C64>) -> Result<Self, MatrixError> {
        if inner.nrows() != inner.ncols() {
            return Err(MatrixError::NotSquare {
                rows: inner.nrows(),
                cols: inner.ncols(),
            });
        }
        if inner.nrows() == 0 {
            return Err(MatrixError::Empty);
        }
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(MatrixError::NonFinite);
        }
        Ok(ComplexSquareMatrix { inner })
    }

    fn wrap(inner: DMatrix<C64>) -> Self {
        debug_assert_eq!(inner.nrows(), inner.ncols());
        ComplexSquareMatrix { inner }
    }

    pub fn identity(n: usize) -> Self {
        Self::wrap(DMatrix::identity(n, n))
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self, MatrixError> {
        Self::new(DMatrix::from_fn(n, n, f))
    }

    /// Row-major real entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self, MatrixError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(MatrixError::Malformed("rows must all have length n".into()));
        }
        Self::from_fn(n, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diagonal(values: &[C64]) -> Result<Self, MatrixError> {
        Self::new(DMatrix::from_diagonal(
            &nalgebra::DVector::from_column_slice(values),
        ))
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.inner[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.inner
    }

    fn check_dim(&self, other: &Self) -> Result<(), MatrixError> {
        if self.dim() != other.dim() {
            return Err(MatrixError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_dim(other)?;
        Ok(Self::wrap(&self.inner * &other.inner))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_dim(other)?;
        Ok(Self::wrap(&self.inner - &other.inner))
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::wrap(&self.inner * factor)
    }

    pub fn adjoint(&self) -> Self {
        Self::wrap(self.inner.adjoint())
    }

    /// `√Σ|a_ij|²`.
    pub fn frobenius(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `frobenius / √n`; equals 1 on unitaries.
    pub fn normalized_hs(&self) -> f64 {
        self.frobenius() / (self.dim() as f64).sqrt()
    }

    /// `‖A*A − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = self.inner.adjoint() * &self.inner;
        let n = self.dim();
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                sum += (gram[(i, j)] - C64::new(target, 0.0)).norm_sqr();
            }
        }
        sum.sqrt()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self::wrap(self.inner.kronecker(&other.inner))
    }

    /// The leading `size × size` block.
    pub fn top_left(&self, size: usize) -> Result<Self, MatrixError> {
        if size == 0 || size > self.dim() {
            return Err(MatrixError::DimensionMismatch {
                left: size,
                right: self.dim(),
            });
        }
        Ok(Self::wrap(
            self.inner.view((0, 0), (size, size)).into_owned(),
        ))
    }

    /// `diag(self, I_extra)`.
    pub fn pad_identity(&self, extra: usize) -> Self {
        let n = self.dim();
        let mut out = DMatrix::identity(n + extra, n + extra);
        out.view_mut((0, 0), (n, n)).copy_from(&self.inner);
        Self::wrap(out)
    }

    pub fn to_json(&self) -> MatrixJson {
        let n = self.dim();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let z = self.inner[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        MatrixJson { dim: n, entries }
    }

    pub fn from_json(json: &MatrixJson) -> Result<Self, MatrixError> {
        let n = json.dim;
        if json.entries.len() != n * n {
            return Err(MatrixError::Malformed(format!(
                "expected {} entries, found {}",
                n * n,
                json.entries.len()
            )));
        }
        Self::from_fn(n, |i, j| {
            let [re, im] = json.entries[i * n + j];
            C64::new(re, im)
        })
    }
}

impl fmt::Debug for ComplexSquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexSquareMatrix{}", self.inner)
    }
}

/// JSON form `{dim, entries: [[re, im], …]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl Serialize for ComplexSquareMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexSquareMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let json = MatrixJson::deserialize(deserializer)?;
        ComplexSquareMatrix::from_json(&json).map_err(serde::de::Error::custom)
    }
}

/// A complex matrix with `‖A*A − I‖_F ≤ UNITARY_TOL`.
#[derive(Clone, PartialEq, Debug, Serialize)]
#[serde(transparent)]
pub struct UnitaryElement(ComplexSquareMatrix);

impl UnitaryElement {
    pub fn new(matrix: ComplexSquareMatrix) -> Result<Self, MatrixError> {
        let defect = matrix.unitarity_defect();
        if defect > UNITARY_TOL {
            return Err(MatrixError::NotUnitary { defect });
        }
        Ok(UnitaryElement(matrix))
    }

    pub fn identity(n: usize) -> Self {
        UnitaryElement(ComplexSquareMatrix::identity(n))
    }

    /// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
    /// of `diag(R)` moved into `Q`.
    pub fn haar<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        let gauss = DMatrix::from_fn(n, n, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re * scale, im * scale)
        });
        let qr = gauss.qr();
        let r = qr.r();
        let mut q = qr.q();
        for j in 0..n {
            let d = r[(j, j)];
            let norm = d.norm();
            let phase = if norm > 0.0 {
                d / norm
            } else {
                C64::new(1.0, 0.0)
            };
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
        UnitaryElement(ComplexSquareMatrix::wrap(q))
    }

    pub fn matrix(&self) -> &ComplexSquareMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexSquareMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn mul(&self, other: &Self) -> Result<Self, MatrixError> {
        Ok(UnitaryElement(self.0.mul(&other.0)?))
    }

    pub fn inverse(&self) -> Self {
        UnitaryElement(self.0.adjoint())
    }

    /// `[a, b] = a b a⁻¹ b⁻¹`.
    pub fn commutator(a: &Self, b: &Self) -> Result<Self, MatrixError> {
        a.mul(b)?.mul(&a.inverse())?.mul(&b.inverse())
    }

    pub fn kron(&self, other: &Self) -> Self {
        UnitaryElement(self.0.kron(&other.0))
    }

    /// `diag(self, I_extra)`: the block embedding `U_n → U_{n+extra}`.
    pub fn pad_identity(&self, extra: usize) -> Self {
        UnitaryElement(self.0.pad_identity(extra))
    }
}

impl<'de> Deserialize<'de> for UnitaryElement {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let m = ComplexSquareMatrix::deserialize(deserializer)?;
        UnitaryElement::new(m).map_err(serde::de::Error::custom)
    }
}

/// Permutation matrix with `A_σ b_i = b_{σ(i)}`, i.e. entry `(σ(i), i)` is 1.
pub fn perm_matrix(sigma: &Permutation) -> UnitaryElement {
    let n = sigma.degree();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(sigma.apply(i), i)] = C64::new(1.0, 0.0);
    }
    UnitaryElement(ComplexSquareMatrix::wrap(m))
}

/// `‖A − B‖_F / (2√n)`.
pub fn hs_distance(a: &UnitaryElement, b: &UnitaryElement) -> Result<f64, MatrixError> {
    matrix_hs_distance(a.matrix(), b.matrix())
}

pub(crate) fn matrix_hs_distance(
    a: &ComplexSquareMatrix,
    b: &ComplexSquareMatrix,
) -> Result<f64, MatrixError> {
    a.check_dim(b)?;
    let n = a.dim();
    let sum: f64 = a
        .inner
        .iter()
        .zip(b.inner.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum();
    Ok(sum.sqrt() / (2.0 * (n as f64).sqrt()))
}

/// Frobenius-nearest unitary `U V*` from the SVD `A = U Σ V*` (the polar factor).
pub fn nearest_unitary(a: &ComplexSquareMatrix) -> Result<UnitaryElement, MatrixError> {
    let svd = nalgebra::SVD::try_new(a.inner.clone(), true, true, 1e-15, 10_000)
        .ok_or(MatrixError::NoConvergence)?;
    let smallest = svd
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if smallest.is_nan() || smallest <= SINGULAR_TOL {
        return Err(MatrixError::Singular { smallest });
    }
    let u = svd.u.ok_or(MatrixError::NoConvergence)?;
    let v_t = svd.v_t.ok_or(MatrixError::NoConvergence)?;
    Ok(UnitaryElement(ComplexSquareMatrix::wrap(u * v_t)))
}

/// Unitary diagonalization `A = W Λ W*` of a normal matrix via its complex
/// Schur form. Returns `W` and the diagonal of `Λ`.
pub fn normal_eigendecomposition(
    a: &ComplexSquareMatrix,
) -> Result<(UnitaryElement, Vec<C64>), MatrixError> {
    let schur = nalgebra::Schur::try_new(a.inner.clone(), 1e-15, 100_000)
        .ok_or(MatrixError::NoConvergence)?;
    let (q, t) = schur.unpack();
    let n = a.dim();
    let mut off = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off += t[(i, j)].norm_sqr();
            }
        }
    }
    let off = off.sqrt();
    if off > NORMALITY_TOL * (1.0 + a.frobenius()) {
        return Err(MatrixError::NotNormal { off_diagonal: off });
    }
    let eigenvalues = (0..n).map(|i| t[(i, i)]).collect();
    Ok((UnitaryElement(ComplexSquareMatrix::wrap(q)), eigenvalues))
}

/// Dense `n × n` matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    dim: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(dim: usize) -> Self {
        RationalMatrix {
            dim,
            entries: vec![Rational::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Rational::one();
        }
        m
    }

    /// Row-major entries.
    pub fn from_entries(dim: usize, entries: Vec<Rational>) -> Result<Self, MatrixError> {
        if dim == 0 {
            return Err(MatrixError::Empty);
        }
        if entries.len() != dim * dim {
            return Err(MatrixError::Malformed(format!(
                "expected {} entries, found {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(RationalMatrix { dim, entries })
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Result<Self, MatrixError> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(MatrixError::Malformed("rows must all have length n".into()));
        }
        let entries = rows
            .iter()
            .flatten()
            .map(|&x| Rational::from_integer(BigInt::from(x)))
            .collect();
        Self::from_entries(dim, entries)
    }

    /// The 0/1 permutation matrix `A_σ`, entry `(σ(i), i)` equal to 1.
    pub fn from_permutation(sigma: &Permutation) -> Self {
        let n = sigma.degree();
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[sigma.apply(i) * n + i] = Rational::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row * self.dim + col]
    }

    fn check_dim(&self, other: &Self) -> Result<(), MatrixError> {
        if self.dim != other.dim {
            return Err(MatrixError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(RationalMatrix {
            dim: self.dim,
            entries,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(RationalMatrix {
            dim: self.dim,
            entries,
        })
    }

    /// Matrix product; zero entries are skipped, so permutation matrices
    /// multiply in `O(n²)`.
    pub fn mul(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.entries[k * n + j];
                    if b.is_zero() {
                        continue;
                    }
                    out.entries[i * n + j] += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Exact rank by fraction-free row elimination over the integers.
    ///
    /// Each row is scaled to integers, then eliminated with integer row
    /// combinations `p·r − c·pivot` followed by division by the row content.
    /// Pivots are chosen by largest magnitude in the column.
    pub fn rank(&self) -> usize {
        let n = self.dim;
        let mut rows: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                let row = &self.entries[i * n..(i + 1) * n];
                let scale = denominator_lcm(row);
                row.iter()
                    .map(|x| (x * Rational::from_integer(scale.clone())).to_integer())
                    .collect()
            })
            .filter(|row: &Vec<BigInt>| row.iter().any(|x| !x.is_zero()))
            .collect();
        let mut rank = 0;
        for col in 0..n {
            if rank == rows.len() {
                break;
            }
            let pivot = (rank..rows.len())
                .filter(|&r| !rows[r][col].is_zero())
                .max_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()));
            let Some(pivot) = pivot else { continue };
            rows.swap(rank, pivot);
            let (head, tail) = rows.split_at_mut(rank + 1);
            let pivot_row = &head[rank];
            let p = pivot_row[col].clone();
            for row in tail.iter_mut() {
                if row[col].is_zero() {
                    continue;
                }
                let c = row[col].clone();
                for j in col..n {
                    let updated = &p * &row[j] - &c * &pivot_row[j];
                    row[j] = updated;
                }
                let content = row[col + 1..]
                    .iter()
                    .fold(BigInt::zero(), |acc, x| acc.gcd(x));
                if !content.is_zero() && !content.is_one() {
                    for x in row[col + 1..].iter_mut() {
                        *x = &*x / &content;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Self, MatrixError> {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut inv = Self::identity(n).entries;
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[r * n + col].is_zero())
                .ok_or(MatrixError::SingularRational)?;
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    inv.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[col * n + col].clone();
            for j in 0..n {
                a[col * n + j] = &a[col * n + j] / &p;
                inv[col * n + j] = &inv[col * n + j] / &p;
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let factor = a[r * n + col].clone();
                for j in 0..n {
                    let da = &factor * &a[col * n + j];
                    let di = &factor * &inv[col * n + j];
                    a[r * n + j] -= da;
                    inv[r * n + j] -= di;
                }
            }
        }
        Ok(RationalMatrix {
            dim: n,
            entries: inv,
        })
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct RationalMatrixJson {
    dim: usize,
    entries: Vec<String>,
}

impl Serialize for RationalMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RationalMatrixJson {
            dim: self.dim,
            entries: self.entries.iter().map(format_pq).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let json = RationalMatrixJson::deserialize(deserializer)?;
        let entries = json
            .entries
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| format!("bad rational {s:?}")))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        RationalMatrix::from_entries(json.dim, entries).map_err(serde::de::Error::custom)
    }
}

/// Normalized rank metric `rk(a − b) / n`.
pub fn rank_distance(a: &RationalMatrix, b: &RationalMatrix) -> Result<Rational, MatrixError> {
    let diff = a.sub(b)?;
    Ok(Rational::new(
        BigInt::from(diff.rank()),
        BigInt::from(a.dim()),
    ))
}
