//! GKLS generators, their Liouvillian superoperators and the semigroup
//! `T_t = exp(tL)`, plus complete-positivity and trace-preservation checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{
    c, check_finite, herm_eigenvalues, identity, kron, mat_exp, matrix_unit, op_norm, trace, unvec,
    vec_op, CMatrix, HermitianOperator, ONE,
};
use crate::tolerance::ToleranceConfig;

/// Hamiltonian plus jump operators, with rates absorbed into the jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladGenerator {
    hamiltonian: HermitianOperator,
    jump_ops: Vec<CMatrix>,
}

impl LindbladGenerator {
    pub fn new(hamiltonian: HermitianOperator, jump_ops: Vec<CMatrix>) -> Result<Self> {
        let d = hamiltonian.dim();
        if d == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        for (k, l) in jump_ops.iter().enumerate() {
            check_finite(l)?;
            if l.nrows() != d || l.ncols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "jump operator {k} is {}x{}, hamiltonian is {d}x{d}",
                    l.nrows(),
                    l.ncols()
                )));
            }
        }
        Ok(Self {
            hamiltonian,
            jump_ops,
        })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn jump_ops(&self) -> &[CMatrix] {
        &self.jump_ops
    }

    /// `max(‖H‖∞, max_k ‖L_k†L_k‖∞)`, floored at machine epsilon.
    pub fn rate_scale(&self) -> f64 {
        let h = op_norm(self.hamiltonian.matrix()).unwrap_or(0.0);
        self.jump_ops
            .iter()
            .map(|l| op_norm(&(l.adjoint() * l)).unwrap_or(0.0))
            .fold(h, f64::max)
            .max(f64::EPSILON)
    }

    /// Default time grid: 25 geometric points over `[1e-3, 10] / rate_scale`.
    pub fn default_time_grid(&self) -> TimeGrid {
        let s = self.rate_scale();
        TimeGrid {
            kind: GridKind::Geometric,
            t_start: 1e-3 / s,
            t_end: 10.0 / s,
            points: 25,
        }
    }
}

/// Linear map on `d×d` operators stored as a `d²×d²` matrix on `vec(·)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: CMatrix,
}

impl Superoperator {
    pub fn from_matrix(dim: usize, matrix: CMatrix) -> Result<Self> {
        check_finite(&matrix)?;
        if matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "superoperator on {dim}x{dim} operators must be {0}x{0}",
                dim * dim
            )));
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: identity(dim * dim),
        }
    }

    /// The transpose map `X ↦ Xᵀ`; positive but not completely positive.
    pub fn transpose_map(dim: usize) -> Self {
        let mut m = CMatrix::zeros(dim * dim, dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                // vec index of (i, j) is j*dim + i
                m[(i * dim + j, j * dim + i)] = ONE;
            }
        }
        Self { dim, matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Superoperator) -> Result<Superoperator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(
                "composing superoperators of different dimension".into(),
            ));
        }
        Ok(Self {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// `unvec(T · vec(M))` for an arbitrary operator.
    pub fn apply_matrix(&self, m: &CMatrix) -> Result<CMatrix> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, superoperator acts on {d}x{d}",
                m.nrows(),
                m.ncols(),
                d = self.dim
            )));
        }
        unvec(&(&self.matrix * vec_op(m)), self.dim)
    }

    /// Applies the map to a Hermitian operator and checks the image is Hermitian.
    pub fn apply(&self, m: &HermitianOperator, hermiticity_tol: f64) -> Result<HermitianOperator> {
        let out = self.apply_matrix(m.matrix())?;
        let scale = op_norm(m.matrix())?.max(1.0);
        HermitianOperator::new(out, hermiticity_tol * scale)
    }
}

/// Liouvillian of the GKLS generator under column stacking.
pub fn build_liouvillian(gen: &LindbladGenerator) -> Superoperator {
    let d = gen.dim();
    let eye = identity(d);
    let h = gen.hamiltonian().matrix();
    let mut l = (kron(&eye, h) - kron(&h.transpose(), &eye)) * c(0.0, -1.0);
    for jump in gen.jump_ops() {
        let ldl = jump.adjoint() * jump;
        l += kron(&jump.conjugate(), jump);
        l -= (kron(&eye, &ldl) + kron(&ldl.transpose(), &eye)) * c(0.5, 0.0);
    }
    Superoperator { dim: d, matrix: l }
}

/// `T_t = exp(tL)`, defined for `t ≥ 0` only.
pub fn semigroup_at(lsup: &Superoperator, t: f64) -> Result<Superoperator> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain(format!(
            "semigroup time must be finite and nonnegative, got {t}"
        )));
    }
    Ok(Superoperator {
        dim: lsup.dim,
        matrix: mat_exp(&lsup.matrix, t)?,
    })
}

/// `C = Σ_ij |i⟩⟨j| ⊗ T(|i⟩⟨j|)`.
pub fn choi_matrix(t: &Superoperator, hermiticity_tol: f64) -> Result<HermitianOperator> {
    let d = t.dim;
    let mut choi = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let image = t.apply_matrix(&matrix_unit(d, i, j))?;
            choi.view_mut((i * d, j * d), (d, d)).copy_from(&image);
        }
    }
    let scale = op_norm(&choi)?.max(1.0);
    HermitianOperator::new(choi, hermiticity_tol * scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CptpReport {
    pub choi_min_eigenvalue: f64,
    pub trace_defect: f64,
    pub hermiticity_defect: f64,
    /// `‖T(I) − I‖∞`
    pub unitality_defect: f64,
    pub is_cptp: bool,
    pub is_unital: bool,
}

pub fn cptp_report(t: &Superoperator, tol: &ToleranceConfig) -> CptpReport {
    let d = t.dim;
    let mut choi = CMatrix::zeros(d * d, d * d);
    let mut trace_defect: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let image = t
                .apply_matrix(&matrix_unit(d, i, j))
                .expect("dimensions agree");
            let expected = if i == j { 1.0 } else { 0.0 };
            trace_defect = trace_defect.max((trace(&image) - c(expected, 0.0)).norm());
            choi.view_mut((i * d, j * d), (d, d)).copy_from(&image);
        }
    }
    let hermiticity_defect = op_norm(&(&choi - choi.adjoint())).unwrap_or(f64::INFINITY);
    let herm_part = (&choi + choi.adjoint()) * c(0.5, 0.0);
    let choi_min_eigenvalue = herm_eigenvalues(&herm_part).first().copied().unwrap_or(0.0);
    let unit_image = t.apply_matrix(&identity(d)).expect("dimensions agree");
    let unitality_defect = op_norm(&(unit_image - identity(d))).unwrap_or(f64::INFINITY);
    CptpReport {
        choi_min_eigenvalue,
        trace_defect,
        hermiticity_defect,
        unitality_defect,
        is_cptp: choi_min_eigenvalue >= -tol.cp && trace_defect <= tol.tp,
        is_unital: unitality_defect <= tol.unital,
    }
}

/// `‖T_{s+t} − T_s T_t‖∞`
pub fn semigroup_law_defect(lsup: &Superoperator, s: f64, t: f64) -> Result<f64> {
    let joint = semigroup_at(lsup, s + t)?;
    let split = semigroup_at(lsup, s)?.compose(&semigroup_at(lsup, t)?)?;
    op_norm(&(joint.matrix - split.matrix))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Geometric,
    Linear,
}

/// Sampling times for time-resolved checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub kind: GridKind,
    pub t_start: f64,
    pub t_end: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::InvalidInput(
                "t_grid.points must be at least 2".into(),
            ));
        }
        if !self.t_start.is_finite()
            || !self.t_end.is_finite()
            || self.t_start < 0.0
            || self.t_end <= self.t_start
        {
            return Err(Error::InvalidInput(
                "t_grid requires 0 <= t_start < t_end".into(),
            ));
        }
        if self.kind == GridKind::Geometric && self.t_start == 0.0 {
            return Err(Error::InvalidInput(
                "geometric t_grid requires t_start > 0".into(),
            ));
        }
        Ok(())
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let n = self.points;
        let last = (n - 1) as f64;
        Ok((0..n)
            .map(|k| {
                let u = k as f64 / last;
                if k == n - 1 {
                    return self.t_end;
                }
                match self.kind {
                    GridKind::Linear => self.t_start + u * (self.t_end - self.t_start),
                    GridKind::Geometric => self.t_start * (self.t_end / self.t_start).powf(u),
                }
            })
            .collect())
    }
}
