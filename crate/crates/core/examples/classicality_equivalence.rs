//! Whether "unique fixed state" and "classical state exists" coincide for
//! each preset.

use eislab::contraction::{classicality_equivalence_diagnostic, fixed_point};
use eislab::lindblad::build_liouvillian;
use eislab::models::ModelPreset;
use eislab::numkernel::pauli_z;
use eislab::pointer::pointer_basis;
use eislab::split::spectral_split;
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
    ];
    for preset in presets {
        let l = build_liouvillian(&preset.generator()?);
        let split = spectral_split(&l, &tol)?;
        let fixed = fixed_point(&l, &split, &tol)?;
        let pointer = pointer_basis(&l, &split, &tol, 0)?;
        let diag =
            classicality_equivalence_diagnostic(&l, &split, &fixed, &pointer, None, 0, &tol)?;
        println!(
            "{:<24} classical -> unique: {:<5}  unique -> classical: {:<5}",
            preset.name(),
            diag.classical_implies_unique,
            diag.unique_implies_classical
        );
        for line in &diag.narrative {
            println!("  {line}");
        }
    }
    Ok(())
}
