//! Fixed points, pointer states, robustness, classicality sampling and
//! entropy diagnostics.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{cptp_report, semigroup_at, Superoperator};
use crate::numkernel::{
    c, cluster_indices, columns_to_matrix, herm_eig_matrix, herm_eigenvalues, hermitian_basis,
    hs_norm, null_space, op_norm, trace_norm, CMatrix, CVector, DensityMatrix, HermitianOperator,
    C64,
};
use crate::seed::stream_rng;
use crate::split::{isometric_rank_one_projections, rank_one_spectral_projections, SubspaceSplit};
use crate::tolerance::ToleranceConfig;

/// Hilbert–Schmidt orthonormal Hermitian basis of `ker L`.
pub fn steady_space(lsup: &Superoperator, tol: &ToleranceConfig) -> Result<Vec<HermitianOperator>> {
    let d = lsup.dim();
    let norm = op_norm(lsup.matrix())?;
    let kernel = null_space(lsup.matrix(), tol.peripheral_abs(norm));
    if kernel.ncols() == 0 {
        return Err(Error::Inconsistency(
            "generator has no stationary state".into(),
        ));
    }
    let basis = hermitian_basis(&kernel, d)
        .ok_or_else(|| Error::Inconsistency("kernel of the generator is not *-invariant".into()))?;
    Ok(basis
        .into_iter()
        .map(HermitianOperator::hermitize)
        .collect())
}

#[derive(Debug, Clone)]
pub struct PointerBasis {
    pub projections: Vec<DensityMatrix>,
    /// `|tr[e_i e_j]|` for `i ≠ j`, zero on the diagonal.
    pub pairwise_overlaps: Vec<Vec<f64>>,
    /// `‖L e_i‖₁`
    pub fixedness_defects: Vec<f64>,
    /// Ranks of the fixed central projections of the steady space; a block
    /// of rank one is a pointer state.
    pub fixed_block_ranks: Vec<usize>,
    pub steady_dim: usize,
    pub empty_reason: Option<String>,
}

impl PointerBasis {
    pub fn len(&self) -> usize {
        self.projections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projections.is_empty()
    }

    pub fn max_overlap(&self) -> f64 {
        self.pairwise_overlaps
            .iter()
            .flatten()
            .copied()
            .fold(0.0, f64::max)
    }

    pub fn max_fixedness_defect(&self) -> f64 {
        self.fixedness_defects.iter().copied().fold(0.0, f64::max)
    }
}

fn position_key(p: &CMatrix) -> usize {
    // index of the largest diagonal entry orders projections canonically
    (0..p.nrows())
        .max_by(|&a, &b| p[(a, a)].re.total_cmp(&p[(b, b)].re).then(b.cmp(&a)))
        .unwrap_or(0)
}

/// Rank-one fixed projections of the steady space.
///
/// A seeded positive combination of kernel elements is diagonalized; its
/// spectral projections are merged whenever a kernel element couples them,
/// which yields the minimal central projections of the steady space. Those
/// of rank one that are fixed and lie in the isometric part are returned.
pub fn pointer_basis(
    lsup: &Superoperator,
    split: &SubspaceSplit,
    tol: &ToleranceConfig,
    seed: u64,
) -> Result<PointerBasis> {
    let d = lsup.dim();
    let kernel = steady_space(lsup, tol)?;
    let mut rng = stream_rng(seed, 0);
    let mut mix = CMatrix::zeros(d, d);
    for k in &kernel {
        mix += k.matrix() * c(rng.gen_range(0.5..1.5), 0.0);
    }
    let eig = herm_eig_matrix(&mix);
    let scale = eig
        .values
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
        .max(1e-300);
    let values: Vec<C64> = eig.values.iter().map(|&x| c(x, 0.0)).collect();
    let groups = cluster_indices(&values, 1e-8 * scale);
    let spectral: Vec<CMatrix> = groups
        .iter()
        .map(|g| {
            let cols: Vec<CVector> = g
                .iter()
                .map(|&k| eig.vectors.column(k).into_owned())
                .collect();
            let v = columns_to_matrix(d, &cols);
            &v * v.adjoint()
        })
        .collect();

    let n = spectral.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &[usize], mut x: usize) -> usize {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    for a in 0..n {
        for b in (a + 1)..n {
            let coupled = kernel
                .iter()
                .any(|k| hs_norm(&(&spectral[a] * k.matrix() * &spectral[b])) > 1e-8);
            if coupled {
                let (ra, rb) = (root(&parent, a), root(&parent, b));
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut central: Vec<(CMatrix, usize)> = Vec::new();
    for r in 0..n {
        let members: Vec<usize> = (0..n).filter(|&k| root(&parent, k) == r).collect();
        if members.is_empty() {
            continue;
        }
        let mut q = CMatrix::zeros(d, d);
        let mut rank = 0;
        for &m in &members {
            q += &spectral[m];
            rank += groups[m].len();
        }
        central.push((q, rank));
    }
    central.sort_by_key(|(q, _)| position_key(q));

    let mut fixed_block_ranks = Vec::new();
    let mut projections = Vec::new();
    let mut fixedness_defects = Vec::new();
    for (q, rank) in central {
        let defect = trace_norm(&lsup.apply_matrix(&q)?)?;
        if defect > tol.fixedness {
            continue;
        }
        fixed_block_ranks.push(rank);
        if rank == 1 && split.isometric_residual(&q) <= tol.robustness {
            projections.push(DensityMatrix::from_trusted(q));
            fixedness_defects.push(defect);
        }
    }

    let m = projections.len();
    let mut pairwise_overlaps = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            if i != j {
                pairwise_overlaps[i][j] =
                    crate::numkernel::trace(&(projections[i].matrix() * projections[j].matrix()))
                        .norm();
            }
        }
    }
    let empty_reason = projections.is_empty().then(|| {
        if fixed_block_ranks.is_empty() {
            "no fixed projection in the steady space".to_string()
        } else {
            format!(
                "fixed central projections have ranks {fixed_block_ranks:?}; none is rank one, so no pure fixed pointer state exists"
            )
        }
    });
    Ok(PointerBasis {
        projections,
        pairwise_overlaps,
        fixedness_defects,
        fixed_block_ranks,
        steady_dim: kernel.len(),
        empty_reason,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub is_pure: bool,
    pub purity_defect: f64,
    /// Hilbert–Schmidt norm of the component outside the isometric part.
    pub isometric_residual: f64,
    pub is_robust: bool,
}

pub fn robustness(
    rho: &DensityMatrix,
    split: &SubspaceSplit,
    tol: &ToleranceConfig,
) -> RobustnessReport {
    let purity_defect = 1.0 - rho.purity();
    let is_pure = purity_defect <= tol.purity;
    let isometric_residual = split.isometric_residual(rho.matrix());
    RobustnessReport {
        is_pure,
        purity_defect,
        isometric_residual,
        is_robust: is_pure && isometric_residual <= tol.robustness,
    }
}

/// A robust non-trivial superposition, disproving classicality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub partner: usize,
    /// Superposition `cos θ |e⟩ + e^{iφ} sin θ |f⟩`.
    pub theta: f64,
    pub phi: f64,
    pub isometric_residual: f64,
    /// Linear entropy after evolving for `1/‖L‖`; zero for a genuine witness.
    pub evolved_linear_entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalityReport {
    pub is_classical_candidate: bool,
    /// No robust partner state exists, so the test holds trivially.
    pub vacuous: bool,
    pub partners_checked: usize,
    pub superpositions_checked: usize,
    pub robust_superpositions: usize,
    /// At most [`MAX_WITNESSES`] are kept.
    pub witnesses: Vec<Witness>,
}

pub const MAX_WITNESSES: usize = 10;
pub const MAX_PARTNERS: usize = 50;
const GRID_RATIOS: usize = 20;
const GRID_PHASES: usize = 20;

fn dominant_vector(p: &CMatrix) -> CVector {
    let eig = herm_eig_matrix(&((p + p.adjoint()) * c(0.5, 0.0)));
    eig.vectors.column(p.nrows() - 1).into_owned()
}

/// Robust rank-one projections available as superposition partners.
fn robust_partners(
    split: &SubspaceSplit,
    e: &CMatrix,
    tol: &ToleranceConfig,
    seed: u64,
) -> Vec<CMatrix> {
    let d = split.dim();
    let mut found: Vec<CMatrix> = Vec::new();
    let push = |p: CMatrix, found: &mut Vec<CMatrix>| {
        let purity: f64 = p.iter().map(|z| z.norm_sqr()).sum();
        if found.len() < MAX_PARTNERS
            && (1.0 - purity).abs() <= tol.purity
            && split.isometric_residual(&p) <= tol.robustness
            && hs_norm(&(&p - e)) > 1e-6
            && !found.iter().any(|q| hs_norm(&(q - &p)) < 1e-6)
        {
            found.push(p);
        }
    };
    for p in isometric_rank_one_projections(split, tol) {
        push(p, &mut found);
    }
    let hermitian: Vec<&CMatrix> = split
        .isometric_basis()
        .iter()
        .filter(|b| hs_norm(&(*b - b.adjoint())) < 1e-9)
        .collect();
    if hermitian.len() > 1 {
        let mut rng = stream_rng(seed, 1);
        for _ in 0..2 * MAX_PARTNERS {
            if found.len() >= MAX_PARTNERS {
                break;
            }
            let mut mix = CMatrix::zeros(d, d);
            for b in &hermitian {
                mix += *b * c(rng.gen_range(-1.0..1.0), 0.0);
            }
            for p in rank_one_spectral_projections(&mix) {
                push(p, &mut found);
            }
        }
    }
    found
}

/// Samples superpositions of `e` with robust partners and reports any that
/// stay robust.
pub fn classicality_test(
    e: &DensityMatrix,
    split: &SubspaceSplit,
    lsup: &Superoperator,
    n_random: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<ClassicalityReport> {
    let rob = robustness(e, split, tol);
    if !rob.is_robust {
        return Err(Error::Precondition(format!(
            "state is not robust (purity defect {:.3e}, isometric residual {:.3e})",
            rob.purity_defect, rob.isometric_residual
        )));
    }
    let partners = robust_partners(split, e.matrix(), tol, seed);
    if partners.is_empty() {
        return Ok(ClassicalityReport {
            is_classical_candidate: true,
            vacuous: true,
            partners_checked: 0,
            superpositions_checked: 0,
            robust_superpositions: 0,
            witnesses: vec![],
        });
    }
    let probe_t = 1.0 / op_norm(lsup.matrix())?.max(f64::EPSILON);
    let probe = semigroup_at(lsup, probe_t)?;
    let psi_e = dominant_vector(e.matrix());

    let mut checked = 0;
    let mut robust_count = 0;
    let mut witnesses = Vec::new();
    for (idx, f) in partners.iter().enumerate() {
        let psi_f = dominant_vector(f);
        let mut rng = stream_rng(seed, 2 + idx as u64);
        let grid = (0..GRID_RATIOS).flat_map(|i| {
            (0..GRID_PHASES).map(move |j| {
                (
                    (i as f64 + 0.5) / GRID_RATIOS as f64 * FRAC_PI_2,
                    2.0 * PI * j as f64 / GRID_PHASES as f64,
                )
            })
        });
        let random: Vec<(f64, f64)> = (0..n_random)
            .map(|_| {
                (
                    rng.gen_range(1e-3..FRAC_PI_2 - 1e-3),
                    rng.gen_range(0.0..2.0 * PI),
                )
            })
            .collect();
        for (theta, phi) in grid.chain(random) {
            let s = &psi_e * c(theta.cos(), 0.0) + &psi_f * C64::from_polar(theta.sin(), phi);
            let Ok(state) = DensityMatrix::pure(&s) else {
                continue;
            };
            checked += 1;
            let residual = split.isometric_residual(state.matrix());
            if residual <= tol.robustness {
                robust_count += 1;
                if witnesses.len() < MAX_WITNESSES {
                    let evolved = probe.apply_matrix(state.matrix())?;
                    let purity: f64 = evolved.iter().map(|z| z.norm_sqr()).sum();
                    witnesses.push(Witness {
                        partner: idx,
                        theta,
                        phi,
                        isometric_residual: residual,
                        evolved_linear_entropy: 1.0 - purity,
                    });
                }
            }
        }
    }
    Ok(ClassicalityReport {
        is_classical_candidate: robust_count == 0,
        vacuous: false,
        partners_checked: partners.len(),
        superpositions_checked: checked,
        robust_superpositions: robust_count,
        witnesses,
    })
}

fn entropy_of(m: &CMatrix) -> f64 {
    let s: f64 = herm_eigenvalues(&((m + m.adjoint()) * c(0.5, 0.0)))
        .into_iter()
        .map(|x| x.clamp(0.0, 1.0))
        .filter(|&x| x > 0.0 && x < 1.0)
        .map(|x| -x * x.ln())
        .sum();
    s.max(0.0)
}

fn linear_entropy_of(m: &CMatrix) -> f64 {
    1.0 - m.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// `−tr ρ ln ρ` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of(rho.matrix())
}

/// `1 − tr ρ²`
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    linear_entropy_of(rho.matrix())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    /// `t = 0` followed by the grid.
    pub times: Vec<f64>,
    pub entropy: Vec<f64>,
    pub linear_entropy: Vec<f64>,
    pub monotone_s: bool,
    pub monotone_sl: bool,
    /// Largest decrease between consecutive samples of either entropy.
    pub max_violation: f64,
    pub unital: bool,
    pub unitality_defect: f64,
}

pub fn entropy_monotonicity_check(
    lsup: &Superoperator,
    rho0: &DensityMatrix,
    times: &[f64],
    tol: &ToleranceConfig,
) -> Result<EntropyReport> {
    let mut ts: Vec<f64> = std::iter::once(0.0)
        .chain(times.iter().copied().filter(|&t| t > 0.0))
        .collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut entropy = Vec::with_capacity(ts.len());
    let mut linear = Vec::with_capacity(ts.len());
    for &t in &ts {
        let rho = semigroup_at(lsup, t)?.apply_matrix(rho0.matrix())?;
        entropy.push(entropy_of(&rho));
        linear.push(linear_entropy_of(&rho));
    }
    let drop = |v: &[f64]| v.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
    let (drop_s, drop_sl) = (drop(&entropy), drop(&linear));
    let t_end = *ts.last().expect("t = 0 is always present");
    let cptp = cptp_report(&semigroup_at(lsup, t_end)?, tol);
    Ok(EntropyReport {
        times: ts,
        entropy,
        linear_entropy: linear,
        monotone_s: drop_s <= tol.monotonicity,
        monotone_sl: drop_sl <= tol.monotonicity,
        max_violation: drop_s.max(drop_sl),
        unital: cptp.is_unital,
        unitality_defect: cptp.unitality_defect,
    })
}
