//! Isometric/sweeping decomposition for each preset, with the decay of the
//! sweeping part.

use eislab::lindblad::build_liouvillian;
use eislab::models::ModelPreset;
use eislab::numkernel::pauli_z;
use eislab::split::{spectral_split, verify_sweeping_decay, verify_trace_orthogonality};
use eislab::ToleranceConfig;

fn main() -> eislab::Result<()> {
    let tol = ToleranceConfig::default();
    let presets = [
        ModelPreset::DephasingQubit { gamma: 1.0 },
        ModelPreset::AmplitudeDampingQubit { gamma: 1.0 },
        ModelPreset::DepolarizingQubit { gamma: 1.0 },
        ModelPreset::Unitary {
            hamiltonian: pauli_z(),
        },
        ModelPreset::BlockDephasing {
            blocks: vec![2, 2],
            gamma: 1.0,
        },
    ];
    let times: Vec<f64> = (0..=40).map(|i| 0.5 * i as f64).collect();
    for preset in presets {
        let l = build_liouvillian(&preset.generator()?);
        let split = spectral_split(&l, &tol)?;
        let (di, ds) = split.dims();
        let decay = verify_sweeping_decay(&split, &l, &times, &tol)?;
        let rates: Vec<String> = decay
            .fitted_rates
            .iter()
            .map(|r| r.map_or("-".into(), |r| format!("{r:.3}")))
            .collect();
        println!(
            "{:<24} isometric {di:>2}  sweeping {ds:>2}  gap {:.3}  trace-orth {:.1e}  rates [{}]",
            preset.name(),
            split.spectral_gap(),
            verify_trace_orthogonality(&split),
            rates.join(", ")
        );
    }
    Ok(())
}
