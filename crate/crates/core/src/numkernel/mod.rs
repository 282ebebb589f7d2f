//! Dense complex linear algebra shared by every analysis.
//!
//! Operators are `d×d` complex matrices; superoperators act on column-stacked
//! vectorizations and are `d²×d²`. The convention
//! `vec(ABC) = (Cᵀ ⊗ A) vec(B)` holds throughout the crate.

mod eig;
mod expm;
mod operators;

pub(crate) use eig::{cluster_indices, herm_eig_matrix};
pub use eig::{
    general_eig, general_eig_with, herm_eig, herm_eigenvalues, EigCluster, GeneralEig, HermEig,
};
pub use expm::mat_exp;
pub use operators::{DensityMatrix, HermitianOperator};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn check_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("matrix has non-finite entries".into()))
    }
}

pub fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() == m.ncols() {
        Ok(m.nrows())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect()
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    check_finite(m)?;
    Ok(singular_values(m).iter().sum())
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> Result<f64> {
    check_finite(m)?;
    Ok(singular_values(m).into_iter().fold(0.0, f64::max))
}

/// Trace norm of a matrix known to be Hermitian, via its eigenvalues.
pub(crate) fn hermitian_trace_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 2 {
        // closed form for 2x2 Hermitian: eigenvalues mean ± radius
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        return (mean + radius).abs() + (mean - radius).abs();
    }
    herm_eigenvalues(m).iter().map(|x| x.abs()).sum()
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hilbert–Schmidt norm `sqrt(tr A†A)`.
pub fn hs_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hilbert–Schmidt inner product `tr(A†B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Column-stacking vectorization.
pub fn vec_op(m: &CMatrix) -> CVector {
    // nalgebra storage is column-major, so the raw slice is already stacked
    CVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vec_op`] for a `d×d` operator.
pub fn unvec(v: &CVector, d: usize) -> Result<CMatrix> {
    if v.len() != d * d {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} cannot be reshaped to {d}x{d}",
            v.len()
        )));
    }
    Ok(CMatrix::from_column_slice(d, d, v.as_slice()))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `|ψ⟩⟨φ|`
pub fn outer(psi: &CVector, phi: &CVector) -> CMatrix {
    psi * phi.adjoint()
}

pub fn basis_ket(d: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[k] = ONE;
    v
}

/// `|i⟩⟨j|`
pub fn matrix_unit(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = ONE;
    m
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

pub fn diag(entries: &[C64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_column_slice(entries))
}

pub fn real_diag(entries: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        entries.len(),
        entries.iter().map(|&x| c(x, 0.0)),
    ))
}

/// Orthonormal basis of the numerical null space of a square matrix: right
/// singular vectors with singular value at most `tol`. Columns of the result.
pub fn null_space(m: &CMatrix, tol: f64) -> CMatrix {
    let n = m.ncols();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let cols: Vec<CVector> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol)
        .map(|(k, _)| v_t.row(k).adjoint())
        .collect();
    // a wide SVD of a square matrix returns exactly n singular values
    columns_to_matrix(n, &cols)
}

/// The `count` right singular vectors of smallest singular value, together
/// with the largest singular value among them.
pub(crate) fn smallest_singular_subspace(m: &CMatrix, count: usize) -> (CMatrix, f64) {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let chosen = &order[..count.min(order.len())];
    let worst = chosen
        .iter()
        .map(|&k| svd.singular_values[k])
        .fold(0.0, f64::max);
    let cols: Vec<CVector> = chosen.iter().map(|&k| v_t.row(k).adjoint()).collect();
    (columns_to_matrix(n, &cols), worst)
}

pub(crate) fn columns_to_matrix(rows: usize, cols: &[CVector]) -> CMatrix {
    if cols.is_empty() {
        return CMatrix::zeros(rows, 0);
    }
    CMatrix::from_columns(cols)
}

/// Modified Gram–Schmidt with one re-orthogonalization pass. Vectors whose
/// residual norm falls below `drop_tol` (relative to their input norm) are
/// discarded as linearly dependent.
pub fn orthonormalize(vectors: &[CVector], drop_tol: f64) -> Vec<CVector> {
    let mut basis: Vec<CVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let scale = v.norm();
        if scale == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&w);
                w -= b * proj;
            }
        }
        let n = w.norm();
        if n > drop_tol * scale {
            basis.push(w / C64::from(n));
        }
    }
    basis
}

/// Rebuilds an orthonormal basis of a `*`-invariant operator subspace out of
/// Hermitian elements. The input columns are vectorized `d×d` operators.
///
/// Returns `None` when the Hermitian parts span a different dimension than
/// the input, which happens only if the span is not `*`-invariant.
pub fn hermitian_basis(span: &CMatrix, d: usize) -> Option<Vec<CMatrix>> {
    let k = span.ncols();
    let mut parts = Vec::with_capacity(2 * k);
    for col in span.column_iter() {
        let m = unvec(&col.into_owned(), d).ok()?;
        let md = m.adjoint();
        let scale = col.norm();
        for part in [(&m + &md) * c(0.5, 0.0), (&m - &md) * c(0.0, -0.5)] {
            let v = vec_op(&part);
            if v.norm() > 1e-8 * scale {
                parts.push(v);
            }
        }
    }
    let ortho = orthonormalize(&parts, 1e-8);
    if ortho.len() != k {
        return None;
    }
    ortho
        .into_iter()
        .map(|v| {
            let m = unvec(&v, d).ok()?;
            // MGS on Hermitian inputs keeps real coefficients up to rounding
            Some((&m + m.adjoint()) * c(0.5, 0.0))
        })
        .collect::<Option<Vec<_>>>()
        .map(canonical_signs)
}

/// Fixes the overall sign of each Hermitian basis element so that its
/// largest-magnitude entry has positive real part.
fn canonical_signs(mut ops: Vec<CMatrix>) -> Vec<CMatrix> {
    for m in ops.iter_mut() {
        let mut best = ZERO;
        let mut best_abs = -1.0;
        for z in m.iter() {
            if z.norm() > best_abs * (1.0 + 1e-9) {
                best_abs = z.norm();
                best = *z;
            }
        }
        let flip = if best.re.abs() >= best.im.abs() {
            best.re < 0.0
        } else {
            best.im < 0.0
        };
        if flip {
            *m = -m.clone();
        }
    }
    ops
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn trace_norm_of_diagonal() {
        assert_abs_diff_eq!(
            trace_norm(&real_diag(&[3.0, -4.0])).unwrap(),
            7.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(trace_norm(&identity(5)).unwrap(), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn op_norm_examples() {
        assert_abs_diff_eq!(
            op_norm(&real_diag(&[3.0, -4.0])).unwrap(),
            4.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(op_norm(&pauli_x()).unwrap(), 1.0, epsilon = 1e-12);
        let ones = CMatrix::from_element(2, 2, ONE);
        assert_abs_diff_eq!(op_norm(&ones).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn non_finite_rejected() {
        let mut m = identity(2);
        m[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matches!(trace_norm(&m), Err(Error::InvalidInput(_))));
        assert!(op_norm(&m).is_err());
    }

    #[test]
    fn rank_one_trace_norm_is_product_of_norms() {
        let psi = CVector::from_column_slice(&[c(0.6, 0.0), c(0.0, 0.8)]);
        let phi = CVector::from_column_slice(&[c(0.0, 1.0), c(0.0, 0.0)]);
        assert_abs_diff_eq!(
            trace_norm(&outer(&psi, &phi)).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn vec_is_column_stacking() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(2., 0.), c(3., 0.), c(4., 0.)]);
        let v = vec_op(&m);
        let re: Vec<f64> = v.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![1.0, 3.0, 2.0, 4.0]);
        assert_eq!(unvec(&v, 2).unwrap(), m);
        assert!(unvec(&v, 3).is_err());
    }

    #[test]
    fn kron_against_index_expansion() {
        // (I ⊗ σx) vec(ρ) = vec(σx ρ), checked entry by entry
        let rho =
            CMatrix::from_row_slice(2, 2, &[c(0.7, 0.), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.)]);
        let sup = kron(&identity(2), &pauli_x());
        let lhs = unvec(&(sup * vec_op(&rho)), 2).unwrap();
        let sx = pauli_x();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = ZERO;
                for k in 0..2 {
                    acc += sx[(i, k)] * rho[(k, j)];
                }
                assert_abs_diff_eq!((lhs[(i, j)] - acc).norm(), 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn hermitian_trace_norm_matches_svd() {
        let h =
            CMatrix::from_row_slice(2, 2, &[c(0.3, 0.), c(0.2, -0.7), c(0.2, 0.7), c(-1.1, 0.)]);
        assert_abs_diff_eq!(
            hermitian_trace_norm(&h),
            trace_norm(&h).unwrap(),
            epsilon = 1e-12
        );
        let h3 = real_diag(&[1.0, -2.0, 0.5]);
        assert_abs_diff_eq!(hermitian_trace_norm(&h3), 3.5, epsilon = 1e-12);
    }

    #[test]
    fn null_space_of_rank_deficient() {
        let m = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ONE, ONE]);
        let n = null_space(&m, 1e-12);
        assert_eq!(n.ncols(), 1);
        assert!((m * n).norm() < 1e-12);
    }

    #[test]
    fn hermitian_basis_of_star_invariant_span() {
        // span{|0><1|, |1><0|} is *-invariant; expect σx/√2, σy/√2 up to sign
        let span = columns_to_matrix(
            4,
            &[vec_op(&matrix_unit(2, 0, 1)), vec_op(&matrix_unit(2, 1, 0))],
        );
        let basis = hermitian_basis(&span, 2).unwrap();
        assert_eq!(basis.len(), 2);
        for b in &basis {
            assert!((b - b.adjoint()).norm() < 1e-14);
            assert_abs_diff_eq!(hs_norm(b), 1.0, epsilon = 1e-14);
        }
        // not *-invariant: span{|0><1|} alone
        let lone = columns_to_matrix(4, &[vec_op(&matrix_unit(2, 0, 1))]);
        assert!(hermitian_basis(&lone, 2).is_none());
    }
}
