//! Trace-norm Lipschitz constant of a channel on traceless Hermitian
//! differences, searched over extreme points `½(P_ψ − P_φ)` with `ψ ⊥ φ`.

use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::lindblad::{semigroup_at, Superoperator};
use crate::numkernel::{
    c, herm_eig_matrix, hermitian_trace_norm, outer, pauli_x, pauli_y, pauli_z, CMatrix, CVector,
    C64,
};
use crate::seed::stream_rng;

pub const DEFAULT_SEARCH_BUDGET: usize = 2000;

const QUBIT_POLAR_STEPS: usize = 90;
const QUBIT_AZIMUTH_STEPS: usize = 360;
const ASCENT_STEPS: usize = 25;

fn hermitize(m: CMatrix) -> CMatrix {
    (&m + m.adjoint()) * c(0.5, 0.0)
}

fn extreme_point(psi: &CVector, phi: &CVector) -> CMatrix {
    (outer(psi, psi) - outer(phi, phi)) * c(0.5, 0.0)
}

/// One ascent step: `W = sign(T X)`, then the best extreme point for the
/// linear functional `X ↦ tr(W T X)` is built from the extreme eigenvectors
/// of `T†(W)`. The value never decreases along the iteration.
fn ascend(channel: &Superoperator, x: &CMatrix) -> Result<CMatrix> {
    let d = x.nrows();
    let tx = hermitize(channel.apply_matrix(x)?);
    let eig = herm_eig_matrix(&tx);
    let signs = CMatrix::from_diagonal(&CVector::from_iterator(
        d,
        eig.values
            .iter()
            .map(|&v| c(if v >= 0.0 { 1.0 } else { -1.0 }, 0.0)),
    ));
    let w = &eig.vectors * signs * eig.vectors.adjoint();
    let adj = Superoperator::from_matrix(d, channel.matrix().adjoint())?;
    let y = hermitize(adj.apply_matrix(&w)?);
    let ey = herm_eig_matrix(&y);
    Ok(extreme_point(
        &ey.vectors.column(d - 1).into_owned(),
        &ey.vectors.column(0).into_owned(),
    ))
}

struct Search<'a> {
    channel: &'a Superoperator,
    budget: usize,
    used: usize,
    best: f64,
}

impl Search<'_> {
    fn exhausted(&self) -> bool {
        self.used >= self.budget
    }

    fn eval(&mut self, x: &CMatrix) -> Result<f64> {
        self.used += 1;
        let v = hermitian_trace_norm(&hermitize(self.channel.apply_matrix(x)?));
        self.best = self.best.max(v);
        Ok(v)
    }

    fn climb(&mut self, start: CMatrix) -> Result<()> {
        let mut x = start;
        let mut value = self.eval(&x)?;
        for _ in 0..ASCENT_STEPS {
            if self.exhausted() {
                break;
            }
            x = ascend(self.channel, &x)?;
            let next = self.eval(&x)?;
            if next <= value + 1e-15 {
                break;
            }
            value = next;
        }
        Ok(())
    }
}

fn random_pair(d: usize, seed: u64, stream: u64) -> (CVector, CVector) {
    let mut rng = stream_rng(seed, stream);
    let mut draw = || {
        CVector::from_iterator(
            d,
            (0..d).map(|_| {
                c(
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                )
            }),
        )
    };
    let a = draw();
    let a = &a / C64::from(a.norm());
    let b = draw();
    let b = &b - &a * a.dotc(&b);
    let b = &b / C64::from(b.norm());
    (a, b)
}

/// Qubit search: every traceless Hermitian unit-trace-norm operator is
/// `½ n·σ`, so a polar grid over the half sphere is exhaustive up to its
/// resolution. The remaining budget refines the best grid point.
fn qubit_search(search: &mut Search) -> Result<()> {
    let images: Vec<CMatrix> = [pauli_x(), pauli_y(), pauli_z()]
        .iter()
        .map(|p| search.channel.apply_matrix(p).map(hermitize))
        .collect::<Result<_>>()?;
    // entries of T(σ_i) as (m00, m11, m01) with the off-diagonal averaged
    let parts: Vec<(f64, f64, C64)> = images
        .iter()
        .map(|m| {
            (
                m[(0, 0)].re,
                m[(1, 1)].re,
                (m[(0, 1)] + m[(1, 0)].conj()) * 0.5,
            )
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..=QUBIT_POLAR_STEPS {
        let theta = PI / 2.0 * i as f64 / QUBIT_POLAR_STEPS as f64;
        for j in 0..QUBIT_AZIMUTH_STEPS {
            let phi = 2.0 * PI * j as f64 / QUBIT_AZIMUTH_STEPS as f64;
            let n = [
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            ];
            let (mut a, mut d, mut b) = (0.0, 0.0, C64::new(0.0, 0.0));
            for (k, (p00, p11, p01)) in parts.iter().enumerate() {
                a += 0.5 * n[k] * p00;
                d += 0.5 * n[k] * p11;
                b += p01 * (0.5 * n[k]);
            }
            let mean = 0.5 * (a + d);
            let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            let v = (mean + radius).abs() + (mean - radius).abs();
            if v > best.0 {
                best = (v, theta, phi);
            }
            if i == 0 {
                break;
            }
        }
    }
    search.best = search.best.max(best.0);
    let (_, theta, phi) = best;
    let n = [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ];
    let x = (pauli_x() * c(n[0], 0.0) + pauli_y() * c(n[1], 0.0) + pauli_z() * c(n[2], 0.0))
        * c(0.5, 0.0);
    search.climb(x)
}

/// Lipschitz constant `k` of a channel on traceless Hermitian differences:
/// the largest `‖T X‖₁` over the extreme points found within `budget`
/// evaluations. A lower bound; for qubits the grid is exhaustive.
///
/// The evaluation sequence does not depend on `budget`, so a larger budget
/// never yields a smaller value.
pub fn channel_lipschitz(channel: &Superoperator, budget: usize, seed: u64) -> Result<f64> {
    if budget == 0 {
        return Err(Error::InvalidInput("search budget must be positive".into()));
    }
    let d = channel.dim();
    if d == 1 {
        return Ok(0.0);
    }
    let mut search = Search {
        channel,
        budget,
        used: 0,
        best: 0.0,
    };
    if d == 2 {
        qubit_search(&mut search)?;
        return Ok(search.best);
    }
    let basis_pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|i| ((i + 1)..d).map(move |j| (i, j)))
        .collect();
    let e = |k: usize| {
        let mut v = CVector::zeros(d);
        v[k] = c(1.0, 0.0);
        v
    };
    let mut restart = 0u64;
    while !search.exhausted() {
        let (psi, phi) = match basis_pairs.get(restart as usize) {
            Some(&(i, j)) => (e(i), e(j)),
            None => random_pair(d, seed, restart),
        };
        search.climb(extreme_point(&psi, &phi))?;
        restart += 1;
    }
    Ok(search.best)
}

/// `k(t)` for the semigroup `exp(tL)`.
pub fn lipschitz_constant(lsup: &Superoperator, t: f64, budget: usize, seed: u64) -> Result<f64> {
    channel_lipschitz(&semigroup_at(lsup, t)?, budget, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::build_liouvillian;
    use crate::models::{random_generator, ModelPreset};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn l(m: ModelPreset) -> Superoperator {
        build_liouvillian(&m.generator().unwrap())
    }

    #[test]
    fn identity_and_dephasing_are_isometric() {
        let deph = l(ModelPreset::DephasingQubit { gamma: 1.0 });
        assert!((lipschitz_constant(&deph, 0.0, 10, 1).unwrap() - 1.0).abs() < 1e-12);
        for t in [0.1, 1.0, 7.0] {
            assert!((lipschitz_constant(&deph, t, 10, 1).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn amplitude_damping_matches_dense_oracle() {
        let ad = l(ModelPreset::AmplitudeDampingQubit { gamma: 1.0 });
        let k = lipschitz_constant(&ad, 1.0, 200, 1).unwrap();
        // closed-form channel action on Bloch vectors: (x, y) shrink by e^{-t/2}, z by e^{-t}
        let mut oracle: f64 = 0.0;
        for i in 0..=400 {
            let theta = PI * i as f64 / 400.0;
            let (s, z) = (theta.sin() * (-0.5f64).exp(), theta.cos() * (-1.0f64).exp());
            oracle = oracle.max((s * s + z * z).sqrt());
        }
        assert!((k - oracle).abs() < 1e-3);
        assert!((k - (-0.5f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn zero_budget_rejected() {
        let ad = l(ModelPreset::AmplitudeDampingQubit { gamma: 1.0 });
        assert!(lipschitz_constant(&ad, 1.0, 0, 1).is_err());
    }

    #[test]
    fn depolarizing_qutrit_free_search() {
        // d = 3 generator with known contraction: full depolarizing towards I/3
        let d = 3;
        let mut jumps = Vec::new();
        for i in 0..d {
            for j in 0..d {
                jumps.push(crate::numkernel::matrix_unit(d, i, j));
            }
        }
        let gen = crate::lindblad::LindbladGenerator::new(
            crate::numkernel::HermitianOperator::new(CMatrix::zeros(d, d), 1e-12).unwrap(),
            jumps,
        )
        .unwrap();
        // L(X) = d·tr(X) I/d − d X on traceless X, so k(t) = e^{−3t}
        let lsup = build_liouvillian(&gen);
        let k = lipschitz_constant(&lsup, 0.4, 100, 3).unwrap();
        assert!((k - (-1.2f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn budget_monotone_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let lsup = build_liouvillian(&random_generator(3, 2, &mut rng));
        let mut prev = 0.0;
        for budget in [1, 5, 20, 100, 400] {
            let k = lipschitz_constant(&lsup, 0.3, budget, 9).unwrap();
            assert!(k >= prev && k <= 1.0 + 1e-9);
            prev = k;
        }
    }
}
