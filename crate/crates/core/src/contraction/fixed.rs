use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::tail_decay_rate;
use crate::lindblad::{cptp_report, semigroup_at, Superoperator};
use crate::numkernel::{herm_eigenvalues, identity, op_norm, trace, trace_norm, DensityMatrix};
use crate::pointer::{classicality_test, robustness, steady_space, PointerBasis};
use crate::split::SubspaceSplit;
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone)]
pub struct FixedPointResult {
    /// Present when the kernel of the generator is one-dimensional.
    pub fixed_state: Option<DensityMatrix>,
    pub kernel_dim: usize,
    /// One-dimensional kernel and no rotating peripheral modes.
    pub unique: bool,
    pub spectral_gap: f64,
    pub rotating_modes: bool,
    pub flags: Vec<String>,
}

/// Locates the stationary states of `exp(tL)`. Uniqueness is decided on the
/// unit-trace states: the whole ray of a fixed state is fixed by linearity.
pub fn fixed_point(
    lsup: &Superoperator,
    split: &SubspaceSplit,
    tol: &ToleranceConfig,
) -> Result<FixedPointResult> {
    let kernel = steady_space(lsup, tol)?;
    let kernel_dim = kernel.len();
    let rotating = split.has_rotating_modes();
    let mut flags = Vec::new();
    let fixed_state = if kernel_dim == 1 {
        let k = kernel[0].matrix();
        let tr = trace(k);
        if tr.norm() < 1e-12 {
            return Err(Error::Inconsistency(
                "one-dimensional kernel with traceless element".into(),
            ));
        }
        let rho = k / tr;
        let min_eig =
            herm_eigenvalues(&((&rho + rho.adjoint()) * crate::numkernel::c(0.5, 0.0)))[0];
        if min_eig < -tol.positivity.max(1e-9) {
            return Err(Error::Inconsistency(format!(
                "unique stationary element is not positive (min eigenvalue {min_eig:.3e})"
            )));
        }
        Some(DensityMatrix::from_trusted(rho))
    } else {
        flags.push(format!(
            "kernel has dimension {kernel_dim}; stationary state is not unique"
        ));
        None
    };
    if rotating {
        flags.push("rotating peripheral modes present; orbits do not converge".into());
    }
    Ok(FixedPointResult {
        unique: kernel_dim == 1 && !rotating,
        fixed_state,
        kernel_dim,
        spectral_gap: split.spectral_gap(),
        rotating_modes: rotating,
        flags,
    })
}

/// Fitted rates outside this band relative to the spectral gap are flagged.
pub const RATIO_BAND: (f64, f64) = (0.95, 1.05);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub label: String,
    /// `‖T_t ρ − e‖₁` on the grid.
    pub distances: Vec<f64>,
    pub fitted_rate: Option<f64>,
    pub rate_vs_gap: Option<f64>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub times: Vec<f64>,
    pub spectral_gap: f64,
    pub traces: Vec<ConvergenceTrace>,
    /// Smallest fitted rate over the spectral gap; close to one for generic
    /// initial states.
    pub rate_vs_gap_ratio: Option<f64>,
}

pub fn convergence_report(
    lsup: &Superoperator,
    fixed: &FixedPointResult,
    initial_states: &[(String, DensityMatrix)],
    times: &[f64],
    tol: &ToleranceConfig,
) -> Result<ConvergenceReport> {
    let e = match (&fixed.fixed_state, fixed.unique) {
        (Some(e), true) => e.matrix().clone(),
        _ => {
            return Err(Error::Precondition(
                "convergence needs a unique fixed state".into(),
            ))
        }
    };
    let channels: Vec<Superoperator> = times
        .iter()
        .map(|&t| semigroup_at(lsup, t))
        .collect::<Result<_>>()?;
    let gap = fixed.spectral_gap;
    let mut traces = Vec::with_capacity(initial_states.len());
    for (label, rho) in initial_states {
        let distances = channels
            .iter()
            .map(|ch| trace_norm(&(ch.apply_matrix(rho.matrix())? - &e)))
            .collect::<Result<Vec<_>>>()?;
        let fitted_rate = tail_decay_rate(times, &distances, tol.fit_floor);
        let rate_vs_gap = fitted_rate.filter(|_| gap > 0.0).map(|r| r / gap);
        let flagged = rate_vs_gap.is_some_and(|q| !(RATIO_BAND.0..=RATIO_BAND.1).contains(&q));
        traces.push(ConvergenceTrace {
            label: label.clone(),
            distances,
            fitted_rate,
            rate_vs_gap,
            flagged,
        });
    }
    let rate_vs_gap_ratio = traces.iter().filter_map(|t| t.rate_vs_gap).reduce(f64::min);
    Ok(ConvergenceReport {
        times: times.to_vec(),
        spectral_gap: gap,
        traces,
        rate_vs_gap_ratio,
    })
}

/// Cross-check between "classical" pointer states and a unique stationary
/// state: each direction of the claimed equivalence is evaluated separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceDiagnostic {
    pub classical_states_found: usize,
    pub unique_fixed_state_found: bool,
    pub fixed_state_pure: Option<bool>,
    pub fixed_state_classical: Option<bool>,
    /// Every classical state found is the unique fixed state.
    pub classical_implies_unique: bool,
    /// The unique fixed state, if any, is classical.
    pub unique_implies_classical: bool,
    pub equivalence_holds: bool,
    pub narrative: Vec<String>,
}

pub fn classicality_equivalence_diagnostic(
    lsup: &Superoperator,
    split: &SubspaceSplit,
    fixed: &FixedPointResult,
    pointer: &PointerBasis,
    uniform_k: Option<f64>,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<EquivalenceDiagnostic> {
    const SAMPLES: usize = 200;
    let mut narrative = Vec::new();
    let mut classical: Vec<&DensityMatrix> = Vec::new();
    for p in &pointer.projections {
        if classicality_test(p, split, lsup, SAMPLES, seed, tol)?.is_classical_candidate {
            classical.push(p);
        }
    }
    let unique_state = fixed.fixed_state.as_ref().filter(|_| fixed.unique);
    let (pure, fixed_classical) = match unique_state {
        Some(e) => {
            let rob = robustness(e, split, tol);
            let cls = if rob.is_robust {
                classicality_test(e, split, lsup, SAMPLES, seed, tol)?.is_classical_candidate
            } else {
                false
            };
            (Some(rob.is_pure), Some(cls))
        }
        None => (None, None),
    };

    let classical_implies_unique = classical.iter().all(|p| {
        unique_state
            .is_some_and(|e| trace_norm(&(p.matrix() - e.matrix())).is_ok_and(|d| d <= 1e-8))
    });
    let unique_implies_classical = fixed_classical.unwrap_or(true);

    match (classical.len(), unique_state) {
        (0, None) => narrative.push("no classical state and no unique fixed state; the equivalence holds vacuously".into()),
        (n, None) => narrative.push(format!(
            "{n} classical pointer state(s) found but the stationary space has dimension {}; no unique fixed state, so the convergence hypotheses are unmet while the pointer basis exists",
            fixed.kernel_dim
        )),
        (_, Some(e)) => {
            if pure == Some(true) && fixed_classical == Some(true) {
                narrative.push("the unique fixed state is pure, robust and passes the classicality test".into());
            } else if pure == Some(false) {
                narrative.push(format!(
                    "the unique fixed state is mixed (purity {:.6}); a fixed point exists but is not classical",
                    e.purity()
                ));
            } else {
                narrative.push("the unique fixed state is pure but fails robustness or classicality".into());
            }
        }
    }
    let norm = op_norm(lsup.matrix())?;
    if norm > 0.0 {
        let probe = semigroup_at(lsup, 1.0 / norm)?;
        let unital = cptp_report(&probe, tol).is_unital;
        if unital && pure == Some(false) {
            let d = lsup.dim();
            let mixed = identity(d) / crate::numkernel::c(d as f64, 0.0);
            let is_max_mixed = unique_state
                .map(|e| trace_norm(&(e.matrix() - &mixed)).unwrap_or(f64::INFINITY) <= 1e-8)
                .unwrap_or(false);
            if is_max_mixed {
                narrative.push(
                    "the semigroup is unital, so the maximally mixed state is always fixed and a unique fixed state can never be pure"
                        .into(),
                );
            }
        }
    }
    if let Some(k) = uniform_k {
        narrative.push(format!(
            "on differences of states the uniform Lipschitz constant is {k:.6} ({}); on positive differences the trace norm is preserved exactly, so strict contraction on all trace-class elements fails",
            if k < 1.0 - tol.lipschitz { "uniformly contractive" } else { "not uniformly contractive" }
        ));
    }
    if !classical_implies_unique {
        narrative.push("direction failing: classical state implies unique fixed point".into());
    }
    if !unique_implies_classical {
        narrative.push("direction failing: unique fixed point implies classical state".into());
    }
    Ok(EquivalenceDiagnostic {
        classical_states_found: classical.len(),
        unique_fixed_state_found: unique_state.is_some(),
        fixed_state_pure: pure,
        fixed_state_classical: fixed_classical,
        classical_implies_unique,
        unique_implies_classical,
        equivalence_holds: classical_implies_unique && unique_implies_classical,
        narrative,
    })
}
