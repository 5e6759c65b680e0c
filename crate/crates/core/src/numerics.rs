//! Dense complex matrix kernel.
//!
//! Every norm in this crate is the spectral norm (largest singular value).
//! The Frobenius norm only shows up implicitly, as the minimality criterion of
//! [`min_norm_solve`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Shorthand for a complex scalar.
#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Numerical tolerances shared by the whole crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Residual threshold for consistency of linear systems and for isometry checks.
    pub consistency: f64,
    pub orthogonality: f64,
    /// Relative singular-value cutoff used by [`numerical_rank`].
    pub rank: f64,
    /// Relative singular-value cutoff of the pseudoinverse.
    pub pinv_cutoff: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            consistency: 1e-8,
            orthogonality: 1e-10,
            rank: 1e-10,
            pinv_cutoff: 1e-12,
        }
    }
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Builds a matrix from row-major real entries.
pub fn from_real_rows(rows: usize, cols: usize, data: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| c(x, 0.0)))
}

pub fn from_rows(rows: usize, cols: usize, data: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(rows, cols, data)
}

/// Kronecker product `a ⊗ b`; the index of `a` varies slowest.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Block-diagonal direct sum `a ⊕ b`.
pub fn block_diag(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    out
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn singular_values(m: &ComplexMatrix) -> DVector<f64> {
    if m.is_empty() {
        return DVector::zeros(0);
    }
    m.clone().singular_values()
}

/// Largest singular value; zero for empty matrices.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().cloned().fold(0.0, f64::max)
}

/// Smallest singular value of a square matrix.
pub fn min_singular_value(m: &ComplexMatrix) -> f64 {
    singular_values(m)
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// `σ_max / σ_min`, infinite for singular input.
pub fn condition_number(m: &ComplexMatrix) -> f64 {
    let sv = singular_values(m);
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn require_square(m: &ComplexMatrix, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "{what} needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// `(M + M*) / 2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<DVector<f64>> {
    require_square(m, "hermitian part")?;
    if m.is_empty() {
        return Ok(DVector::zeros(0));
    }
    Ok(nalgebra::SymmetricEigen::new(hermitian_part(m)).eigenvalues)
}

/// Smallest eigenvalue of the Hermitian part `(M + M*)/2`.
pub fn hermitian_part_min_eig(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min))
}

/// Largest eigenvalue of the Hermitian part `(M + M*)/2`.
///
/// `Re M < 0` (negative definite) is `hermitian_part_max_eig(M) < 0`.
pub fn hermitian_part_max_eig(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max))
}

pub fn is_self_adjoint(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    require_square(m, "self-adjointness test")?;
    Ok(operator_norm(&(m - m.adjoint())) <= tol)
}

/// `‖M*M − I‖`: zero exactly when `M` is an isometry.
pub fn isometry_defect(m: &ComplexMatrix) -> f64 {
    operator_norm(&(m.adjoint() * m - identity(m.ncols())))
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub solution: ComplexMatrix,
    pub residual_norm: f64,
    pub consistent: bool,
}

/// Singular value decomposition padded so that `V*` is square, giving access
/// to a full basis of the kernel when `M` is wide.
struct FullSvd {
    u: ComplexMatrix,
    sigma: Vec<f64>,
    v_t: ComplexMatrix,
}

fn full_svd(m: &ComplexMatrix) -> FullSvd {
    let (p, q) = m.shape();
    let padded = if p < q {
        let mut x = zeros(q, q);
        x.view_mut((0, 0), (p, q)).copy_from(m);
        x
    } else {
        m.clone()
    };
    let svd = padded.svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    FullSvd {
        u: u.rows(0, p).into_owned(),
        sigma: svd.singular_values.iter().cloned().collect(),
        v_t,
    }
}

/// Minimum-norm least-squares solution `M⁺ b` through the SVD.
///
/// Singular values below `tol.pinv_cutoff · σ_max` are treated as zero, so the
/// solution is orthogonal to the numerical kernel of `M`.
pub fn min_norm_solve(
    m: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<SolveOutcome> {
    let (p, q) = m.shape();
    if b.nrows() != p {
        return Err(Error::Dimension(format!(
            "system matrix has {p} rows, right-hand side has {}",
            b.nrows()
        )));
    }
    let k = b.ncols();
    if p == 0 || q == 0 {
        return Ok(SolveOutcome {
            solution: zeros(q, k),
            residual_norm: operator_norm(b),
            consistent: operator_norm(b) <= tol.consistency,
        });
    }
    let svd = full_svd(m);
    let smax = svd.sigma.iter().cloned().fold(0.0, f64::max);
    let cutoff = tol.pinv_cutoff * smax;
    let utb = svd.u.adjoint() * b;
    let mut solution = zeros(q, k);
    for (i, &s) in svd.sigma.iter().enumerate() {
        if s > cutoff && s > 0.0 && i < utb.nrows() {
            let row = utb.row(i).scale(1.0 / s);
            // x += v_i (u_i* b) / s_i
            let v = svd.v_t.row(i).adjoint();
            solution += v * row;
        }
    }
    let residual_norm = operator_norm(&(m * &solution - b));
    Ok(SolveOutcome {
        consistent: residual_norm <= tol.consistency,
        solution,
        residual_norm,
    })
}

/// Orthonormal basis (as columns) of the numerical kernel of `M`.
pub fn kernel_basis(m: &ComplexMatrix, rel_cutoff: f64) -> ComplexMatrix {
    let q = m.ncols();
    if q == 0 {
        return zeros(0, 0);
    }
    if m.nrows() == 0 {
        return identity(q);
    }
    let svd = full_svd(m);
    let smax = svd.sigma.iter().cloned().fold(0.0, f64::max);
    let cutoff = rel_cutoff * smax;
    let cols: Vec<DVector<Complex64>> = svd
        .sigma
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cutoff)
        .map(|(i, _)| svd.v_t.row(i).adjoint().column(0).into_owned())
        .collect();
    if cols.is_empty() {
        zeros(q, 0)
    } else {
        ComplexMatrix::from_columns(&cols)
    }
}

/// Unitary polar factor `U` of `M = U P`.
pub fn nearest_unitary(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_square(m, "polar decomposition")?;
    if m.is_empty() {
        return Ok(m.clone());
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 1e-12 * smax.max(f64::MIN_POSITIVE) {
        return Err(Error::Singular { sigma_min: smin });
    }
    Ok(svd.u.expect("u requested") * svd.v_t.expect("v_t requested"))
}

/// Number of singular values of the stacked vectors above `tol · σ_max`.
pub fn numerical_rank(vectors: &[DVector<Complex64>], tol: f64) -> Result<usize> {
    let Some(first) = vectors.first() else {
        return Ok(0);
    };
    let len = first.len();
    if vectors.iter().any(|v| v.len() != len) {
        return Err(Error::Dimension("vectors of unequal length".into()));
    }
    let stacked = ComplexMatrix::from_fn(vectors.len(), len, |i, j| vectors[i][j]);
    let sv = singular_values(&stacked);
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol * smax).count())
}

#[derive(Clone, Debug)]
pub struct Extrapolation {
    pub limit: ComplexMatrix,
    /// `‖f(t_{k+1}) − f(t_k)‖` for each consecutive pair of samples.
    pub increments: Vec<f64>,
}

/// One-sided limit `t ↓ 0` by first-order Richardson extrapolation.
///
/// The samples must be taken at `t, t/2, t/4, …`; the limit estimate is
/// `2 f(t/2) − f(t)` from the last two samples.
pub fn extrapolate_limit(samples: &[(f64, ComplexMatrix)]) -> Result<Extrapolation> {
    if samples.len() < 2 {
        return Err(Error::Contract(format!(
            "extrapolation needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    for w in samples.windows(2) {
        let (t0, t1) = (w[0].0, w[1].0);
        if !(t0 > 0.0 && t1 > 0.0 && t1 < t0) {
            return Err(Error::Contract(
                "sample steps must be positive and strictly decreasing".into(),
            ));
        }
        if ((t0 / t1) - 2.0).abs() > 1e-9 {
            return Err(Error::Contract(format!(
                "sample steps are not halving: {t0} -> {t1}"
            )));
        }
        if w[0].1.shape() != w[1].1.shape() {
            return Err(Error::Dimension("samples of different shapes".into()));
        }
    }
    let increments = samples
        .windows(2)
        .map(|w| operator_norm(&(&w[1].1 - &w[0].1)))
        .collect();
    let n = samples.len();
    let limit = samples[n - 1].1.scale(2.0) - &samples[n - 2].1;
    Ok(Extrapolation { limit, increments })
}

/// Scalar convenience wrapper around [`extrapolate_limit`].
pub fn extrapolate_scalar(samples: &[(f64, Complex64)]) -> Result<(Complex64, Vec<f64>)> {
    let lifted: Vec<_> = samples
        .iter()
        .map(|&(t, z)| (t, ComplexMatrix::from_element(1, 1, z)))
        .collect();
    let ex = extrapolate_limit(&lifted)?;
    Ok((ex.limit[(0, 0)], ex.increments))
}

/// Serde adapter for the `{"rows":r,"cols":c,"data":[[re,im],...]}` encoding.
pub mod json {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wire {
        rows: usize,
        cols: usize,
        data: Vec<[f64; 2]>,
    }

    pub fn serialize<S: Serializer>(
        m: &ComplexMatrix,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        Wire {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<ComplexMatrix, D::Error> {
        use serde::de::Error as _;
        let w = Wire::deserialize(d)?;
        if w.data.len() != w.rows * w.cols {
            return Err(D::Error::custom(format!(
                "matrix data has {} entries, expected {}x{}",
                w.data.len(),
                w.rows,
                w.cols
            )));
        }
        if w.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(D::Error::custom("matrix entries must be finite"));
        }
        Ok(ComplexMatrix::from_row_iterator(
            w.rows,
            w.cols,
            w.data.iter().map(|&[re, im]| Complex64::new(re, im)),
        ))
    }

    /// Newtype carrying the encoding, for standalone (de)serialization.
    #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
    pub struct Matrix(#[serde(with = "self")] pub ComplexMatrix);

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(
            ms: &[ComplexMatrix],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            use serde::ser::SerializeSeq;
            let mut seq = s.serialize_seq(Some(ms.len()))?;
            for m in ms {
                seq.serialize_element(&Matrix(m.clone()))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<ComplexMatrix>, D::Error> {
            Ok(Vec::<Matrix>::deserialize(d)?
                .into_iter()
                .map(|m| m.0)
                .collect())
        }
    }
}
