//! Isometric/sweeping decomposition of the operator space from the
//! Liouvillian spectrum, and numerical checks of its structural properties.
//!
//! The isometric part is the span of peripheral eigenvectors (`Re λ ≈ 0`),
//! the sweeping part the invariant complement carrying all decaying modes.
//! The sweeping part is computed as the annihilator of the peripheral left
//! eigenvectors, which is exactly the decaying spectral subspace whenever
//! the peripheral spectrum is semisimple. At finite dimension weak* and norm
//! convergence coincide, so decay is measured in trace norm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::tail_decay_rate;
use crate::lindblad::{cptp_report, semigroup_at, Superoperator};
use crate::numkernel::{
    c, cluster_indices, columns_to_matrix, general_eig_with, herm_eig_matrix, hermitian_basis,
    hermitian_trace_norm, hs_norm, orthonormalize, smallest_singular_subspace, trace, unvec,
    vec_op, CMatrix, CVector, EigCluster, C64,
};
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone)]
pub struct SpectralData {
    pub eigenvalues: Vec<C64>,
    /// Vectorized right eigenvectors as columns.
    pub eigenvectors: CMatrix,
    pub clusters: Vec<EigCluster>,
    /// `min{−Re λ : Re λ < −peripheral_tol}`, zero when nothing decays.
    pub spectral_gap: f64,
    pub peripheral_tol: f64,
    pub generator_norm: f64,
}

/// A peripheral eigenvalue cluster `iω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeripheralMode {
    pub frequency: f64,
    pub multiplicity: usize,
    pub rotating: bool,
}

/// Split dimensions recomputed at a tenth and ten times the peripheral
/// threshold, reported when some eigenvalue lies between the two.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSensitivity {
    pub lower_tol: f64,
    pub dims_at_lower: (usize, usize),
    pub upper_tol: f64,
    pub dims_at_upper: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct SubspaceSplit {
    dim: usize,
    isometric_basis: Vec<CMatrix>,
    sweeping_basis: Vec<CMatrix>,
    // oblique projector onto the isometric part along the sweeping part
    iso_projector: CMatrix,
    spectral: Option<SpectralData>,
    peripheral_modes: Vec<PeripheralMode>,
    near_degenerate: bool,
    sensitivity: Option<SplitSensitivity>,
}

impl SubspaceSplit {
    /// Builds a split from explicit bases of two complementary subspaces.
    pub fn from_bases(dim: usize, isometric: Vec<CMatrix>, sweeping: Vec<CMatrix>) -> Result<Self> {
        let n = dim * dim;
        if isometric.len() + sweeping.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "bases of sizes {} and {} do not span a {n}-dimensional space",
                isometric.len(),
                sweeping.len()
            )));
        }
        for b in isometric.iter().chain(&sweeping) {
            if b.nrows() != dim || b.ncols() != dim {
                return Err(Error::DimensionMismatch(
                    "basis element has wrong shape".into(),
                ));
            }
        }
        let cols: Vec<CVector> = isometric.iter().chain(&sweeping).map(vec_op).collect();
        let full = columns_to_matrix(n, &cols);
        let inverse = full
            .try_inverse()
            .ok_or_else(|| Error::InvalidInput("subspaces do not form a direct sum".into()))?;
        let k = isometric.len();
        let iso_cols = columns_to_matrix(n, &cols[..k]);
        let iso_projector = if k == 0 {
            CMatrix::zeros(n, n)
        } else {
            iso_cols * inverse.rows(0, k)
        };
        Ok(Self {
            dim,
            isometric_basis: isometric,
            sweeping_basis: sweeping,
            iso_projector,
            spectral: None,
            peripheral_modes: Vec::new(),
            near_degenerate: false,
            sensitivity: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(dim C₁ⁱ, dim C₁ˢ)`
    pub fn dims(&self) -> (usize, usize) {
        (self.isometric_basis.len(), self.sweeping_basis.len())
    }

    pub fn isometric_basis(&self) -> &[CMatrix] {
        &self.isometric_basis
    }

    pub fn sweeping_basis(&self) -> &[CMatrix] {
        &self.sweeping_basis
    }

    pub fn spectral(&self) -> Option<&SpectralData> {
        self.spectral.as_ref()
    }

    pub fn spectral_gap(&self) -> f64 {
        self.spectral.as_ref().map_or(0.0, |s| s.spectral_gap)
    }

    pub fn peripheral_modes(&self) -> &[PeripheralMode] {
        &self.peripheral_modes
    }

    pub fn has_rotating_modes(&self) -> bool {
        self.peripheral_modes.iter().any(|m| m.rotating)
    }

    pub fn near_degenerate(&self) -> bool {
        self.near_degenerate
    }

    pub fn sensitivity(&self) -> Option<&SplitSensitivity> {
        self.sensitivity.as_ref()
    }

    pub fn project_isometric(&self, x: &CMatrix) -> CMatrix {
        let v = &self.iso_projector * vec_op(x);
        unvec(&v, self.dim).expect("projector matches dimension")
    }

    pub fn project_sweeping(&self, x: &CMatrix) -> CMatrix {
        x - self.project_isometric(x)
    }

    /// Hilbert–Schmidt norm of the component of `x` outside the isometric part.
    pub fn isometric_residual(&self, x: &CMatrix) -> f64 {
        hs_norm(&self.project_sweeping(x))
    }
}

/// Splits with the default peripheral threshold `peripheral_rel · ‖L‖∞`.
pub fn spectral_split(lsup: &Superoperator, tol: &ToleranceConfig) -> Result<SubspaceSplit> {
    let norm = crate::numkernel::op_norm(lsup.matrix())?;
    spectral_split_with(lsup, tol.peripheral_abs(norm), tol)
}

fn count_peripheral(values: &[C64], ptol: f64) -> usize {
    values.iter().filter(|z| z.re.abs() <= ptol).count()
}

pub fn spectral_split_with(
    lsup: &Superoperator,
    peripheral_tol: f64,
    tol: &ToleranceConfig,
) -> Result<SubspaceSplit> {
    if peripheral_tol.is_nan() || peripheral_tol <= 0.0 {
        return Err(Error::InvalidInput(
            "peripheral tolerance must be positive".into(),
        ));
    }
    let d = lsup.dim();
    let n = d * d;
    let l = lsup.matrix();
    let eig = general_eig_with(l, tol.cluster_rel)?;
    let norm = eig.norm;

    if let Some(bad) = eig.values.iter().find(|z| z.re > peripheral_tol) {
        return Err(Error::NotContraction {
            re: bad.re,
            im: bad.im,
        });
    }

    let peripheral: Vec<usize> = (0..n)
        .filter(|&k| eig.values[k].re.abs() <= peripheral_tol)
        .collect();
    let peripheral_values: Vec<C64> = peripheral.iter().map(|&k| eig.values[k]).collect();
    let gap = (tol.cluster_rel * norm).max(peripheral_tol);
    let null_tol = 10.0 * gap;
    let eye = CMatrix::identity(n, n);

    let mut right_cols: Vec<CVector> = Vec::new();
    let mut left_cols: Vec<CVector> = Vec::new();
    let mut modes = Vec::new();
    for group in cluster_indices(&peripheral_values, gap) {
        let size = group.len();
        let mu = group.iter().map(|&k| peripheral_values[k]).sum::<C64>() / c(size as f64, 0.0);
        let (right, worst) = smallest_singular_subspace(&(l - &eye * mu), size);
        if worst > null_tol {
            return Err(Error::DefectivePeripheral {
                re: mu.re,
                im: mu.im,
            });
        }
        let (left, worst_left) =
            smallest_singular_subspace(&(l.adjoint() - &eye * mu.conj()), size);
        if worst_left > null_tol {
            return Err(Error::DefectivePeripheral {
                re: mu.re,
                im: mu.im,
            });
        }
        right_cols.extend(right.column_iter().map(|col| col.into_owned()));
        left_cols.extend(left.column_iter().map(|col| col.into_owned()));
        modes.push(PeripheralMode {
            frequency: mu.im,
            multiplicity: size,
            rotating: mu.im.abs() > peripheral_tol,
        });
    }
    modes.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));

    // the semigroup must be CPTP; spectral failures above are reported first
    let probe_t = 1.0 / norm.max(f64::EPSILON);
    let cptp = cptp_report(&semigroup_at(lsup, probe_t)?, tol);
    if !cptp.is_cptp {
        return Err(Error::Precondition(format!(
            "generator does not produce a CPTP semigroup (Choi min eigenvalue {:.3e}, trace defect {:.3e})",
            cptp.choi_min_eigenvalue, cptp.trace_defect
        )));
    }

    let isometric = operator_basis(&orthonormalize(&right_cols, 1e-8), d);
    let left = orthonormalize(&left_cols, 1e-8);
    if isometric.len() != peripheral.len() || left.len() != peripheral.len() {
        return Err(Error::Inconsistency(
            "peripheral eigenspace lost rank".into(),
        ));
    }
    // orthogonal complement of the left peripheral eigenspace
    let w = columns_to_matrix(n, &left);
    let complement = &eye - &w * w.adjoint();
    let ce = herm_eig_matrix(&((&complement + complement.adjoint()) * c(0.5, 0.0)));
    let sweep_cols: Vec<CVector> = (0..n)
        .filter(|&k| ce.values[k] > 0.5)
        .map(|k| ce.vectors.column(k).into_owned())
        .collect();
    let sweeping = operator_basis(&sweep_cols, d);

    let spectral_gap = eig
        .values
        .iter()
        .filter(|z| z.re < -peripheral_tol)
        .map(|z| -z.re)
        .fold(f64::INFINITY, f64::min);
    let spectral_gap = if spectral_gap.is_finite() {
        spectral_gap
    } else {
        0.0
    };

    let near_degenerate = eig
        .values
        .iter()
        .any(|z| z.re.abs() > peripheral_tol / 10.0 && z.re.abs() < peripheral_tol * 10.0);
    let sensitivity = near_degenerate.then(|| {
        let lower = count_peripheral(&eig.values, peripheral_tol / 10.0);
        let upper = count_peripheral(&eig.values, peripheral_tol * 10.0);
        SplitSensitivity {
            lower_tol: peripheral_tol / 10.0,
            dims_at_lower: (lower, n - lower),
            upper_tol: peripheral_tol * 10.0,
            dims_at_upper: (upper, n - upper),
        }
    });

    let mut split = SubspaceSplit::from_bases(d, isometric, sweeping)?;
    split.spectral = Some(SpectralData {
        eigenvalues: eig.values,
        eigenvectors: eig.vectors,
        clusters: eig.clusters,
        spectral_gap,
        peripheral_tol,
        generator_norm: norm,
    });
    split.peripheral_modes = modes;
    split.near_degenerate = near_degenerate;
    split.sensitivity = sensitivity;
    Ok(split)
}

/// Turns vectorized basis columns into operators, preferring a Hermitian
/// basis of the same span.
fn operator_basis(cols: &[CVector], d: usize) -> Vec<CMatrix> {
    let span = columns_to_matrix(d * d, cols);
    hermitian_basis(&span, d).unwrap_or_else(|| {
        orthonormalize(cols, 1e-8)
            .iter()
            .map(|v| unvec(v, d).expect("d² entries"))
            .collect()
    })
}

/// Largest residual of projecting `B†` back onto the subspace of `B`.
pub fn verify_star_invariance(split: &SubspaceSplit) -> f64 {
    let iso = split
        .isometric_basis
        .iter()
        .map(|b| hs_norm(&split.project_sweeping(&b.adjoint())));
    let sweep = split
        .sweeping_basis
        .iter()
        .map(|b| hs_norm(&split.project_isometric(&b.adjoint())));
    iso.chain(sweep).fold(0.0, f64::max)
}

/// `max |tr[B_i B_s]|` over isometric and sweeping basis pairs.
pub fn verify_trace_orthogonality(split: &SubspaceSplit) -> f64 {
    let mut worst: f64 = 0.0;
    for bi in &split.isometric_basis {
        for bs in &split.sweeping_basis {
            worst = worst.max(trace(&(bi * bs)).norm());
        }
    }
    worst
}

/// Largest component of `L·B` leaking into the complementary subspace.
pub fn verify_invariance(split: &SubspaceSplit, lsup: &Superoperator) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for b in &split.isometric_basis {
        worst = worst.max(hs_norm(&split.project_sweeping(&lsup.apply_matrix(b)?)));
    }
    for b in &split.sweeping_basis {
        worst = worst.max(hs_norm(&split.project_isometric(&lsup.apply_matrix(b)?)));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsometricReport {
    /// Worst linear entropy reached by an evolved rank-one isometric projection.
    pub max_purity_defect: f64,
    /// Worst `|‖T_t B‖₁ − ‖B‖₁|` over isometric basis elements.
    pub max_tracenorm_drift: f64,
    pub projections_checked: usize,
}

/// Rank-one spectral projections of Hermitian isometric elements that lie
/// in the isometric part themselves.
pub fn isometric_rank_one_projections(
    split: &SubspaceSplit,
    tol: &ToleranceConfig,
) -> Vec<CMatrix> {
    let d = split.dim;
    let mut sources: Vec<CMatrix> = split
        .isometric_basis
        .iter()
        .filter(|b| hs_norm(&(*b - b.adjoint())) < 1e-9)
        .cloned()
        .collect();
    if sources.len() > 1 {
        let mut mix = CMatrix::zeros(d, d);
        for (k, b) in sources.iter().enumerate() {
            mix += b * c(1.0 / (k as f64 + 1.0) + 0.1 * (k as f64).sqrt(), 0.0);
        }
        sources.push(mix);
    }
    let mut out: Vec<CMatrix> = Vec::new();
    for s in &sources {
        for p in rank_one_spectral_projections(s) {
            if split.isometric_residual(&p) <= tol.robustness
                && !out.iter().any(|q| hs_norm(&(q - &p)) < 1e-6)
            {
                out.push(p);
            }
        }
    }
    out
}

/// Spectral projections of a Hermitian matrix onto its simple eigenvalues.
pub(crate) fn rank_one_spectral_projections(h: &CMatrix) -> Vec<CMatrix> {
    let eig = herm_eig_matrix(&((h + h.adjoint()) * c(0.5, 0.0)));
    let scale = eig
        .values
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
        .max(1e-300);
    let values: Vec<C64> = eig.values.iter().map(|&x| c(x, 0.0)).collect();
    cluster_indices(&values, 1e-8 * scale)
        .into_iter()
        .filter(|g| g.len() == 1)
        .map(|g| {
            let v = eig.vectors.column(g[0]).into_owned();
            &v * v.adjoint()
        })
        .collect()
}

pub fn verify_isometric_unitarity(
    split: &SubspaceSplit,
    lsup: &Superoperator,
    times: &[f64],
    tol: &ToleranceConfig,
) -> Result<IsometricReport> {
    let projections = isometric_rank_one_projections(split, tol);
    let norms: Vec<f64> = split
        .isometric_basis
        .iter()
        .map(crate::numkernel::trace_norm)
        .collect::<Result<_>>()?;
    let mut max_purity_defect: f64 = 0.0;
    let mut max_tracenorm_drift: f64 = 0.0;
    for &t in times {
        let tt = semigroup_at(lsup, t)?;
        for (b, &nb) in split.isometric_basis.iter().zip(&norms) {
            let evolved = crate::numkernel::trace_norm(&tt.apply_matrix(b)?)?;
            max_tracenorm_drift = max_tracenorm_drift.max((evolved - nb).abs());
        }
        for p in &projections {
            let rho = tt.apply_matrix(p)?;
            let purity: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
            max_purity_defect = max_purity_defect.max((1.0 - purity).abs());
        }
    }
    Ok(IsometricReport {
        max_purity_defect,
        max_tracenorm_drift,
        projections_checked: projections.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub times: Vec<f64>,
    /// `norms[b][k] = ‖T_{t_k} B_b‖₁` for sweeping basis element `b`.
    pub norms_over_time: Vec<Vec<f64>>,
    pub fitted_rates: Vec<Option<f64>>,
    pub t_max: f64,
    pub decayed: bool,
    /// The grid ends before `5 / spectral_gap`.
    pub inconclusive: bool,
}

pub fn verify_sweeping_decay(
    split: &SubspaceSplit,
    lsup: &Superoperator,
    times: &[f64],
    tol: &ToleranceConfig,
) -> Result<DecayReport> {
    let t_max = times.iter().copied().fold(0.0, f64::max);
    let gap = split.spectral_gap();
    let inconclusive = !split.sweeping_basis.is_empty() && (gap <= 0.0 || t_max < 5.0 / gap);
    let mut norms_over_time = vec![Vec::with_capacity(times.len()); split.sweeping_basis.len()];
    for &t in times {
        let tt = semigroup_at(lsup, t)?;
        for (b, row) in split.sweeping_basis.iter().zip(norms_over_time.iter_mut()) {
            let image = tt.apply_matrix(b)?;
            let is_herm = hs_norm(&(&image - image.adjoint())) < 1e-12;
            row.push(if is_herm {
                hermitian_trace_norm(&image)
            } else {
                crate::numkernel::trace_norm(&image)?
            });
        }
    }
    let envelope = (-gap * t_max / 2.0).exp();
    let mut decayed = true;
    for (b, row) in split.sweeping_basis.iter().zip(&norms_over_time) {
        let initial = crate::numkernel::trace_norm(b)?;
        let last = times
            .iter()
            .zip(row)
            .filter(|(&t, _)| t == t_max)
            .map(|(_, &v)| v)
            .next()
            .unwrap_or(f64::INFINITY);
        if last > envelope * initial + tol.split_check {
            decayed = false;
        }
    }
    let fitted_rates = norms_over_time
        .iter()
        .map(|row| tail_decay_rate(times, row, tol.fit_floor))
        .collect();
    Ok(DecayReport {
        times: times.to_vec(),
        norms_over_time,
        fitted_rates,
        t_max,
        decayed,
        inconclusive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::build_liouvillian;
    use crate::models::ModelPreset;
    use crate::numkernel::{matrix_unit, pauli_x, pauli_y, pauli_z, real_diag};

    fn lsup(m: ModelPreset) -> Superoperator {
        build_liouvillian(&m.generator().unwrap())
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn in_span(basis: &[CMatrix], x: &CMatrix) -> bool {
        let mut r = x.clone();
        for b in basis {
            let coeff =
                crate::numkernel::hs_inner(b, &r) / c(crate::numkernel::hs_norm(b).powi(2), 0.0);
            r -= b * coeff;
        }
        hs_norm(&r) < 1e-9
    }

    #[test]
    fn identity_semigroup_is_all_isometric() {
        let split = spectral_split(
            &Superoperator::from_matrix(2, CMatrix::zeros(4, 4)).unwrap(),
            &tol(),
        )
        .unwrap();
        assert_eq!(split.dims(), (4, 0));
        assert_eq!(verify_star_invariance(&split), 0.0);
        assert_eq!(verify_trace_orthogonality(&split), 0.0);
    }

    #[test]
    fn dephasing_split_matches_closed_form() {
        let l = lsup(ModelPreset::DephasingQubit { gamma: 1.0 });
        let split = spectral_split(&l, &tol()).unwrap();
        assert_eq!(split.dims(), (2, 2));
        for d in [real_diag(&[1.0, 0.0]), real_diag(&[0.0, 1.0])] {
            assert!(in_span(split.isometric_basis(), &d));
        }
        for s in [pauli_x(), pauli_y()] {
            assert!(in_span(split.sweeping_basis(), &s));
        }
        assert!((split.spectral_gap() - 2.0).abs() < 1e-12);
        assert!(verify_star_invariance(&split) <= 1e-10);
        assert!(verify_trace_orthogonality(&split) <= 1e-12);
        assert!(verify_invariance(&split, &l).unwrap() <= 1e-9);
    }

    #[test]
    fn amplitude_damping_split() {
        let l = lsup(ModelPreset::AmplitudeDampingQubit { gamma: 1.0 });
        let split = spectral_split(&l, &tol()).unwrap();
        assert_eq!(split.dims(), (1, 3));
        assert!(in_span(split.isometric_basis(), &real_diag(&[1.0, 0.0])));
        assert!((split.spectral_gap() - 0.5).abs() < 1e-12);
        assert!(verify_invariance(&split, &l).unwrap() <= 1e-9);
        assert!(verify_star_invariance(&split) <= 1e-9);
        // the decaying population mode diag(1,-1) is not trace-orthogonal to |0><0|
        assert!(
            (verify_trace_orthogonality(&split) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9
        );
    }

    #[test]
    fn adversarial_split_fails_star_invariance() {
        let split = SubspaceSplit::from_bases(
            2,
            vec![matrix_unit(2, 0, 1)],
            vec![
                matrix_unit(2, 0, 0),
                matrix_unit(2, 1, 0),
                matrix_unit(2, 1, 1),
            ],
        )
        .unwrap();
        assert!(verify_star_invariance(&split) > 0.5);
    }

    #[test]
    fn degenerate_bases_rejected() {
        let r = SubspaceSplit::from_bases(
            2,
            vec![matrix_unit(2, 0, 0)],
            vec![
                matrix_unit(2, 0, 0),
                matrix_unit(2, 1, 0),
                matrix_unit(2, 1, 1),
            ],
        );
        assert!(r.is_err());
    }

    #[test]
    fn expanding_generator_rejected() {
        let l = Superoperator::from_matrix(2, real_diag(&[0.0, 1.0, -1.0, -1.0])).unwrap();
        assert!(matches!(
            spectral_split(&l, &tol()),
            Err(Error::NotContraction { .. })
        ));
    }

    #[test]
    fn peripheral_jordan_block_rejected() {
        let mut m = real_diag(&[0.0, 0.0, -1.0, -1.0]);
        m[(0, 1)] = c(1.0, 0.0);
        let l = Superoperator::from_matrix(2, m).unwrap();
        assert!(matches!(
            spectral_split(&l, &tol()),
            Err(Error::DefectivePeripheral { .. })
        ));
    }

    #[test]
    fn unitary_model_has_rotating_modes() {
        let l = lsup(ModelPreset::Unitary {
            hamiltonian: pauli_z(),
        });
        let split = spectral_split(&l, &tol()).unwrap();
        assert_eq!(split.dims(), (4, 0));
        assert!(split.has_rotating_modes());
        let freqs: Vec<f64> = split
            .peripheral_modes()
            .iter()
            .map(|m| m.frequency)
            .collect();
        assert_eq!(freqs.len(), 3);
        assert!(
            (freqs[0] + 2.0).abs() < 1e-9 && freqs[1].abs() < 1e-9 && (freqs[2] - 2.0).abs() < 1e-9
        );
        let times: Vec<f64> = (1..=10).map(|k| 0.37 * k as f64).collect();
        let rep = verify_isometric_unitarity(&split, &l, &times, &tol()).unwrap();
        assert!(rep.max_purity_defect <= 1e-10 && rep.projections_checked >= 2);
    }

    #[test]
    fn sweeping_decay_closed_forms() {
        let times: Vec<f64> = (0..=40).map(|k| 0.25 * k as f64).collect();
        let l = lsup(ModelPreset::DephasingQubit { gamma: 1.0 });
        let split = spectral_split(&l, &tol()).unwrap();
        let rep = verify_sweeping_decay(&split, &l, &times, &tol()).unwrap();
        assert!(rep.decayed && !rep.inconclusive);
        for (row, b) in rep.norms_over_time.iter().zip(split.sweeping_basis()) {
            let n0 = crate::numkernel::trace_norm(b).unwrap();
            for (v, t) in row.iter().zip(&times) {
                assert!((v - n0 * (-2.0 * t).exp()).abs() < 1e-12);
            }
        }

        let l = lsup(ModelPreset::AmplitudeDampingQubit { gamma: 1.0 });
        let sx = l.apply_matrix(&pauli_x()).unwrap();
        assert!((sx - pauli_x() * c(-0.5, 0.0)).norm() < 1e-14);
        let split = spectral_split(&l, &tol()).unwrap();
        let rep = verify_sweeping_decay(&split, &l, &times, &tol()).unwrap();
        assert!(rep.decayed);
        let short = verify_sweeping_decay(&split, &l, &times[..8], &tol()).unwrap();
        assert!(short.inconclusive);
    }

    #[test]
    fn deterministic_bases() {
        let l = lsup(ModelPreset::AmplitudeDampingQubit { gamma: 0.7 });
        let a = spectral_split(&l, &tol()).unwrap();
        let b = spectral_split(&l, &tol()).unwrap();
        assert_eq!(a.isometric_basis(), b.isometric_basis());
        assert_eq!(a.sweeping_basis(), b.sweeping_basis());
    }

    #[test]
    fn near_degenerate_generator_reports_sensitivity() {
        // decay rate 2 lies within a decade of a peripheral threshold of 1.5
        let l = lsup(ModelPreset::DephasingQubit { gamma: 1.0 });
        let split = spectral_split_with(&l, 1.5, &tol()).unwrap();
        assert!(split.near_degenerate());
        let s = split.sensitivity().unwrap();
        assert_eq!(s.dims_at_lower, (2, 2));
        assert_eq!(s.dims_at_upper, (4, 0));
        assert!(!spectral_split(&l, &tol()).unwrap().near_degenerate());
    }
}
