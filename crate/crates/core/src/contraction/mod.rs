//! Contraction analysis of the semigroup in trace norm: `k(t)`, uniform
//! contraction, orbit bounds, the gauge condition and near-commutativity,
//! plus fixed-point location and convergence.

mod fixed;
mod lipschitz;

pub use fixed::{
    classicality_equivalence_diagnostic, convergence_report, fixed_point, ConvergenceReport,
    ConvergenceTrace, EquivalenceDiagnostic, FixedPointResult, RATIO_BAND,
};
pub use lipschitz::{channel_lipschitz, lipschitz_constant, DEFAULT_SEARCH_BUDGET};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{semigroup_at, Superoperator};
use crate::models::random_density;
use crate::numkernel::{op_norm, trace_norm, CMatrix, HermitianOperator};
use crate::seed::stream_rng;
use crate::tolerance::ToleranceConfig;

/// `k(t)` on a grid and its supremum over `t ≥ t_min`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformK {
    pub uniform_k: f64,
    pub t_min: f64,
    pub times: Vec<f64>,
    pub per_t: Vec<f64>,
}

/// First grid point at or after `0.1 / rate_scale`, falling back to the
/// last grid point.
pub fn default_t_min(times: &[f64], rate_scale: f64) -> Option<f64> {
    let threshold = 0.1 / rate_scale;
    times
        .iter()
        .copied()
        .find(|&t| t >= threshold)
        .or_else(|| times.last().copied())
}

pub fn uniform_k(
    lsup: &Superoperator,
    times: &[f64],
    t_min: f64,
    budget: usize,
    seed: u64,
) -> Result<UniformK> {
    if t_min.is_nan() || t_min <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "t_min must be positive, got {t_min}"
        )));
    }
    if !times.iter().any(|&t| t >= t_min) {
        return Err(Error::InvalidInput(format!(
            "no grid point at or after t_min = {t_min}"
        )));
    }
    let per_t = times
        .iter()
        .enumerate()
        .map(|(i, &t)| lipschitz_constant(lsup, t, budget, seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let uniform = times
        .iter()
        .zip(&per_t)
        .filter(|(&t, _)| t >= t_min)
        .map(|(_, &k)| k)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(UniformK {
        uniform_k: uniform,
        t_min,
        times: times.to_vec(),
        per_t,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitDiameter {
    pub diam_estimate: f64,
    /// `2(2 + ‖f‖₁)`
    pub bound: f64,
    pub pass: bool,
}

fn max_pairwise_distance(points: &[CMatrix]) -> Result<f64> {
    let mut diam: f64 = 0.0;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            diam = diam.max(trace_norm(&(&points[i] - &points[j]))?);
        }
    }
    Ok(diam)
}

fn orbit(f: &CMatrix, channels: &[Superoperator]) -> Result<Vec<CMatrix>> {
    let mut pts = vec![f.clone()];
    for ch in channels {
        pts.push(ch.apply_matrix(f)?);
    }
    Ok(pts)
}

fn channels_on(lsup: &Superoperator, times: &[f64]) -> Result<Vec<Superoperator>> {
    times.iter().map(|&t| semigroup_at(lsup, t)).collect()
}

/// Largest trace distance within `{f} ∪ {T_t f}` on the grid.
pub fn orbit_diameter(
    lsup: &Superoperator,
    f: &HermitianOperator,
    times: &[f64],
) -> Result<OrbitDiameter> {
    let channels = channels_on(lsup, times)?;
    orbit_diameter_with(f.matrix(), &channels)
}

fn orbit_diameter_with(f: &CMatrix, channels: &[Superoperator]) -> Result<OrbitDiameter> {
    let diam = max_pairwise_distance(&orbit(f, channels)?)?;
    let bound = 2.0 * (2.0 + trace_norm(f)?);
    Ok(OrbitDiameter {
        diam_estimate: diam,
        bound,
        pass: diam <= bound,
    })
}

/// Largest `‖T_s T_t − T_t T_s‖∞` over pairs of grid times. Long grids are
/// thinned to at most 12 evenly spaced times.
pub fn near_commutativity_defect(lsup: &Superoperator, times: &[f64]) -> Result<f64> {
    const MAX_TIMES: usize = 12;
    let picked: Vec<f64> = if times.len() <= MAX_TIMES {
        times.to_vec()
    } else {
        (0..MAX_TIMES)
            .map(|k| times[k * (times.len() - 1) / (MAX_TIMES - 1)])
            .collect()
    };
    let channels = channels_on(lsup, &picked)?;
    let mut worst: f64 = 0.0;
    for i in 0..channels.len() {
        for j in (i + 1)..channels.len() {
            let ab = channels[i].matrix() * channels[j].matrix();
            let ba = channels[j].matrix() * channels[i].matrix();
            worst = worst.max(op_norm(&(ab - ba))?);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeCheck {
    /// Every sampled `‖T_{nt}x − T_{nt}y‖₁ ≤ k·diam(O(x,y)) + tol`.
    pub pass: bool,
    /// Largest `‖T_{nt}x − T_{nt}y‖₁ / diam(O(x,y))`.
    pub worst_ratio: f64,
    /// `φ(a) = k·a < a` needs `k < 1`; set when it cannot hold.
    pub hypothesis_failure: bool,
    pub pairs_checked: usize,
}

pub const GAUGE_POWERS: [u32; 4] = [1, 2, 4, 8];

/// Checks `‖T_t^n x − T_t^n y‖₁ ≤ φ(diam O(x,y))` with `φ(a) = k·a` for
/// seeded pairs of states, grid times `t` and `n ∈ {1, 2, 4, 8}`.
pub fn gauge_condition_check(
    lsup: &Superoperator,
    times: &[f64],
    uniform_k: f64,
    n_samples: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<GaugeCheck> {
    let d = lsup.dim();
    let grid = channels_on(lsup, times)?;
    let powered: Vec<Vec<Superoperator>> = times
        .iter()
        .map(|&t| {
            GAUGE_POWERS
                .iter()
                .map(|&n| semigroup_at(lsup, n as f64 * t))
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for s in 0..n_samples {
        let mut rng = stream_rng(seed, s as u64);
        let x = random_density(d, &mut rng);
        let y = random_density(d, &mut rng);
        let mut pts = orbit(x.matrix(), &grid)?;
        pts.extend(orbit(y.matrix(), &grid)?);
        let diam = max_pairwise_distance(&pts)?;
        let diff = x.matrix() - y.matrix();
        for row in &powered {
            for ch in row {
                let lhs = trace_norm(&ch.apply_matrix(&diff)?)?;
                if lhs > uniform_k * diam + tol.lipschitz {
                    pass = false;
                }
                if diam > 0.0 {
                    worst = worst.max(lhs / diam);
                }
            }
        }
    }
    Ok(GaugeCheck {
        pass,
        worst_ratio: worst,
        hypothesis_failure: uniform_k >= 1.0 - tol.lipschitz,
        pairs_checked: n_samples,
    })
}

/// Which contraction hypotheses hold for this semigroup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisFlags {
    pub nonexpansive: bool,
    pub uniformly_contractive: bool,
    pub orbits_bounded: bool,
    pub gauge_condition: bool,
    pub near_commutative: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub t_grid: Vec<f64>,
    pub k_of_t: Vec<f64>,
    pub uniform_k: f64,
    pub t_min: f64,
    /// Slope of the gauge function `φ(a) = k·a`.
    pub gauge_slope: f64,
    pub orbit_bound_pass: bool,
    pub worst_orbit_ratio: f64,
    pub near_commutative_defect: f64,
    pub gauge: GaugeCheck,
    pub search_budget: usize,
    pub hypothesis_flags: HypothesisFlags,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionSettings {
    pub t_min: f64,
    pub search_budget: usize,
    pub orbit_samples: usize,
    pub gauge_samples: usize,
    pub seed: u64,
}

/// Runs every contraction check on one grid.
pub fn contraction_analysis(
    lsup: &Superoperator,
    times: &[f64],
    settings: &ContractionSettings,
    tol: &ToleranceConfig,
) -> Result<ContractionReport> {
    let uk = uniform_k(
        lsup,
        times,
        settings.t_min,
        settings.search_budget,
        settings.seed,
    )?;
    let d = lsup.dim();
    let channels = channels_on(lsup, times)?;
    let mut orbit_pass = true;
    let mut worst_orbit: f64 = 0.0;
    for s in 0..settings.orbit_samples {
        let mut rng = stream_rng(settings.seed, 1_000_000 + s as u64);
        let f = crate::models::random_hermitian(d, &mut rng);
        let o = orbit_diameter_with(f.matrix(), &channels)?;
        orbit_pass &= o.diam_estimate <= o.bound + tol.lipschitz;
        worst_orbit = worst_orbit.max(o.diam_estimate / o.bound);
    }
    let ncd = near_commutativity_defect(lsup, times)?;
    let late: Vec<f64> = times
        .iter()
        .copied()
        .filter(|&t| t >= settings.t_min)
        .collect();
    let gauge = gauge_condition_check(
        lsup,
        &late,
        uk.uniform_k,
        settings.gauge_samples,
        settings.seed,
        tol,
    )?;
    let max_k = uk.per_t.iter().copied().fold(0.0, f64::max);
    let flags = HypothesisFlags {
        nonexpansive: max_k <= 1.0 + tol.lipschitz,
        uniformly_contractive: uk.uniform_k < 1.0 - tol.lipschitz,
        orbits_bounded: orbit_pass,
        gauge_condition: gauge.pass && !gauge.hypothesis_failure,
        near_commutative: ncd <= tol.lipschitz,
    };
    Ok(ContractionReport {
        t_grid: uk.times,
        k_of_t: uk.per_t,
        uniform_k: uk.uniform_k,
        t_min: uk.t_min,
        gauge_slope: uk.uniform_k,
        orbit_bound_pass: orbit_pass,
        worst_orbit_ratio: worst_orbit,
        near_commutative_defect: ncd,
        gauge,
        search_budget: settings.search_budget,
        hypothesis_flags: flags,
    })
}
