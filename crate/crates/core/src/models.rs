//! Built-in generators with closed-form ground truths, and seeded random
//! generators for property checks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::lindblad::LindbladGenerator;
use crate::numkernel::{c, matrix_unit, pauli_x, pauli_y, pauli_z, CMatrix, HermitianOperator};

#[derive(Debug, Clone, PartialEq)]
pub enum ModelPreset {
    /// `H = 0`, `L = √γ σ_z`.
    DephasingQubit { gamma: f64 },
    /// `H = 0`, `L = √γ |0⟩⟨1|`.
    AmplitudeDampingQubit { gamma: f64 },
    /// `H = 0`, `L ∈ {√γ σ_x, √γ σ_y, √γ σ_z}`.
    DepolarizingQubit { gamma: f64 },
    /// Closed evolution under `H`, no jumps.
    Unitary { hamiltonian: CMatrix },
    /// One jump `√γ P_k` per diagonal block projector `P_k`.
    BlockDephasing { blocks: Vec<usize>, gamma: f64 },
}

pub const PRESET_NAMES: [&str; 5] = [
    "dephasing_qubit",
    "amplitude_damping_qubit",
    "depolarizing_qubit",
    "unitary",
    "block_dephasing",
];

impl ModelPreset {
    pub fn name(&self) -> &'static str {
        match self {
            ModelPreset::DephasingQubit { .. } => PRESET_NAMES[0],
            ModelPreset::AmplitudeDampingQubit { .. } => PRESET_NAMES[1],
            ModelPreset::DepolarizingQubit { .. } => PRESET_NAMES[2],
            ModelPreset::Unitary { .. } => PRESET_NAMES[3],
            ModelPreset::BlockDephasing { .. } => PRESET_NAMES[4],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ModelPreset::Unitary { hamiltonian } => hamiltonian.nrows(),
            ModelPreset::BlockDephasing { blocks, .. } => blocks.iter().sum(),
            _ => 2,
        }
    }

    pub fn generator(&self) -> Result<LindbladGenerator> {
        let rate = |gamma: f64| -> Result<f64> {
            if gamma.is_finite() && gamma >= 0.0 {
                Ok(gamma.sqrt())
            } else {
                Err(Error::InvalidInput(format!(
                    "gamma must be finite and nonnegative, got {gamma}"
                )))
            }
        };
        let zero = |d: usize| HermitianOperator::new(CMatrix::zeros(d, d), 0.0);
        match self {
            ModelPreset::DephasingQubit { gamma } => {
                LindbladGenerator::new(zero(2)?, vec![pauli_z() * c(rate(*gamma)?, 0.0)])
            }
            ModelPreset::AmplitudeDampingQubit { gamma } => {
                LindbladGenerator::new(zero(2)?, vec![matrix_unit(2, 0, 1) * c(rate(*gamma)?, 0.0)])
            }
            ModelPreset::DepolarizingQubit { gamma } => {
                let r = c(rate(*gamma)?, 0.0);
                LindbladGenerator::new(zero(2)?, vec![pauli_x() * r, pauli_y() * r, pauli_z() * r])
            }
            ModelPreset::Unitary { hamiltonian } => {
                LindbladGenerator::new(HermitianOperator::new(hamiltonian.clone(), 1e-10)?, vec![])
            }
            ModelPreset::BlockDephasing { blocks, gamma } => {
                if blocks.is_empty() || blocks.contains(&0) {
                    return Err(Error::InvalidInput("block sizes must be positive".into()));
                }
                let d: usize = blocks.iter().sum();
                let r = rate(*gamma)?;
                let mut jumps = Vec::with_capacity(blocks.len());
                let mut offset = 0;
                for &size in blocks {
                    let mut p = CMatrix::zeros(d, d);
                    for k in offset..offset + size {
                        p[(k, k)] = c(r, 0.0);
                    }
                    jumps.push(p);
                    offset += size;
                }
                LindbladGenerator::new(zero(d)?, jumps)
            }
        }
    }

    /// Dimension of the fixed-point space predicted analytically.
    pub fn expected_steady_dim(&self) -> Option<usize> {
        match self {
            ModelPreset::DephasingQubit { gamma } if *gamma > 0.0 => Some(2),
            ModelPreset::AmplitudeDampingQubit { gamma } if *gamma > 0.0 => Some(1),
            ModelPreset::DepolarizingQubit { gamma } if *gamma > 0.0 => Some(1),
            ModelPreset::BlockDephasing { blocks, gamma } if *gamma > 0.0 => {
                Some(blocks.iter().map(|n| n * n).sum())
            }
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        describe(self.name()).unwrap_or_default().to_string()
    }
}

/// Documentation of a preset's parameters and analytic ground truths.
pub fn describe(name: &str) -> Option<&'static str> {
    Some(match name {
        "dephasing_qubit" => {
            "dephasing_qubit(gamma): H = 0, L = sqrt(gamma) sigma_z.\n\
             Liouvillian spectrum {0, 0, -2 gamma, -2 gamma}; coherences decay as exp(-2 gamma t).\n\
             Isometric part: diagonal operators (dim 2). Sweeping part: span{sigma_x, sigma_y} (dim 2).\n\
             Steady space dim 2; pointer basis {|0><0|, |1><1|}; unital.\n\
             Lipschitz constant k(t) = 1 for all t (populations are preserved), so uniform contraction fails."
        }
        "amplitude_damping_qubit" => {
            "amplitude_damping_qubit(gamma): H = 0, L = sqrt(gamma) |0><1|.\n\
             Liouvillian spectrum {0, -gamma, -gamma/2, -gamma/2}; spectral gap gamma/2.\n\
             Unique fixed state |0><0|; isometric part span{|0><0|} (dim 1), sweeping dim 3.\n\
             k(t) = exp(-gamma t / 2); T_t(I) = diag(2 - exp(-gamma t), exp(-gamma t)), so non-unital\n\
             with unitality defect 1 - exp(-gamma t); entropy of I/2 decreases from ln 2 to 0."
        }
        "depolarizing_qubit" => {
            "depolarizing_qubit(gamma): H = 0, L in {sqrt(gamma) sigma_x, sqrt(gamma) sigma_y, sqrt(gamma) sigma_z}.\n\
             Liouvillian spectrum {0, -4 gamma, -4 gamma, -4 gamma}; unique fixed state I/2 (mixed).\n\
             No rank-one fixed projection, so the pointer basis is empty; unital."
        }
        "unitary" => {
            "unitary(hamiltonian): closed evolution, no jumps (default hamiltonian sigma_z).\n\
             Whole operator space is isometric, sweeping dim 0; k(t) = 1; every pure state is robust,\n\
             so superpositions of robust states stay robust and classicality fails."
        }
        "block_dephasing" => {
            "block_dephasing(blocks, gamma): d = sum(blocks), one jump sqrt(gamma) P_k per block projector.\n\
             Coherences between different blocks decay at rate gamma; block-diagonal operators are fixed.\n\
             Steady-space dimension = sum of squared block sizes (2+2 blocks: 8).\n\
             Isometric part = block-diagonal operators, trace-orthogonal to the off-block sweeping part.\n\
             Each block contributes one central fixed projection of rank equal to its size; only\n\
             blocks of size 1 yield rank-one pointer states."
        }
        _ => return None,
    })
}

fn complex_gaussian<R: Rng>(rng: &mut R, n: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re * scale, im * scale)
    })
}

/// Random GKLS generator with `n_jumps` jump operators and entries of order one.
pub fn random_generator<R: Rng>(d: usize, n_jumps: usize, rng: &mut R) -> LindbladGenerator {
    let g = complex_gaussian(rng, d, 0.5);
    let h = HermitianOperator::hermitize(g);
    let jumps = (0..n_jumps)
        .map(|_| complex_gaussian(rng, d, 0.5))
        .collect();
    LindbladGenerator::new(h, jumps).expect("consistent dimensions")
}

/// Random density matrix `GG†/tr(GG†)`.
pub fn random_density<R: Rng>(d: usize, rng: &mut R) -> crate::numkernel::DensityMatrix {
    let g = complex_gaussian(rng, d, 1.0);
    crate::numkernel::DensityMatrix::from_trusted(&g * g.adjoint())
}

/// Random Hermitian operator with Gaussian entries.
pub fn random_hermitian<R: Rng>(d: usize, rng: &mut R) -> HermitianOperator {
    HermitianOperator::hermitize(complex_gaussian(rng, d, 1.0))
}
