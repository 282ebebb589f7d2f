use super::{c, check_finite, check_square, herm_eigenvalues, op_norm, trace, CMatrix, CVector};
use crate::error::{Error, Result};
use crate::tolerance::ToleranceConfig;

/// A square complex matrix that is Hermitian within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator(CMatrix);

impl HermitianOperator {
    /// Validates `‖M − M†‖∞ ≤ tol`. The stored matrix is the Hermitian part
    /// of `m`, so downstream eigen-solvers see an exactly Hermitian input.
    pub fn new(m: CMatrix, tol: f64) -> Result<Self> {
        check_finite(&m)?;
        check_square(&m)?;
        let defect = op_norm(&(&m - m.adjoint()))?;
        if defect > tol {
            return Err(Error::NotHermitian { defect, tol });
        }
        Ok(Self::hermitize(m))
    }

    /// Keeps the Hermitian part without validation.
    pub(crate) fn hermitize(m: CMatrix) -> Self {
        let h = (&m + m.adjoint()) * c(0.5, 0.0);
        Self(h)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }
}

impl AsRef<CMatrix> for HermitianOperator {
    fn as_ref(&self) -> &CMatrix {
        &self.0
    }
}

/// Positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(HermitianOperator);

impl DensityMatrix {
    pub fn new(m: CMatrix, tol: &ToleranceConfig) -> Result<Self> {
        let h = HermitianOperator::new(m, tol.hermiticity)?;
        let tr = trace(h.matrix()).re;
        if (tr - 1.0).abs() > tol.trace {
            return Err(Error::NotDensityMatrix(format!(
                "trace {tr} differs from 1"
            )));
        }
        let min = herm_eigenvalues(h.matrix())
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < -tol.positivity {
            return Err(Error::NotDensityMatrix(format!(
                "eigenvalue {min:.3e} is negative"
            )));
        }
        Ok(Self(h))
    }

    /// `|ψ⟩⟨ψ|` for a nonzero vector, normalized.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let n = psi.norm();
        if !n.is_finite() || n <= 0.0 {
            return Err(Error::InvalidInput(
                "state vector must be nonzero and finite".into(),
            ));
        }
        let v = psi / c(n, 0.0);
        Ok(Self(HermitianOperator::hermitize(&v * v.adjoint())))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self(HermitianOperator::hermitize(
            CMatrix::identity(d, d) * c(1.0 / d as f64, 0.0),
        ))
    }

    /// Renormalizes a Hermitian operator known to be positive up to rounding.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        let tr = trace(&m).re;
        Self(HermitianOperator::hermitize(m * c(1.0 / tr, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }

    pub fn as_hermitian(&self) -> &HermitianOperator {
        &self.0
    }

    /// `tr ρ²`
    pub fn purity(&self) -> f64 {
        self.matrix().iter().map(|z| z.norm_sqr()).sum()
    }
}

impl AsRef<CMatrix> for DensityMatrix {
    fn as_ref(&self) -> &CMatrix {
        self.0.matrix()
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[ONE, c(1.0, 0.0), c(2.0, 0.0), ONE]);
        assert!(matches!(
            HermitianOperator::new(m, 1e-10),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn density_checks() {
        let tol = ToleranceConfig::default();
        assert!(DensityMatrix::new(real_diag(&[0.5, 0.5]), &tol).is_ok());
        assert!(DensityMatrix::new(real_diag(&[0.6, 0.5]), &tol).is_err());
        assert!(DensityMatrix::new(real_diag(&[1.5, -0.5]), &tol).is_err());
        let plus = DensityMatrix::pure(&CVector::from_column_slice(&[ONE, ONE])).unwrap();
        assert!((plus.purity() - 1.0).abs() < 1e-15);
        assert!((DensityMatrix::maximally_mixed(2).purity() - 0.5).abs() < 1e-15);
    }
}
