//! Pointer states of block dephasing with blocks 1+1+2, and the
//! classicality test on each of them.

use eislab::lindblad::build_liouvillian;
use eislab::models::ModelPreset;
use eislab::pointer::{classicality_test, pointer_basis};
use eislab::split::spectral_split;
use eislab::ToleranceConfig;

fn main() -> eislab::Result<()> {
    let tol = ToleranceConfig::default();
    for blocks in [vec![1, 1, 2], vec![2, 2], vec![1, 1, 1]] {
        let preset = ModelPreset::BlockDephasing {
            blocks: blocks.clone(),
            gamma: 1.0,
        };
        let l = build_liouvillian(&preset.generator()?);
        let split = spectral_split(&l, &tol)?;
        let basis = pointer_basis(&l, &split, &tol, 0)?;
        println!(
            "blocks {blocks:?}: steady dim {}, central ranks {:?}, {} pointer states",
            basis.steady_dim,
            basis.fixed_block_ranks,
            basis.len()
        );
        for (i, e) in basis.projections.iter().enumerate() {
            let diag: Vec<String> = (0..e.dim())
                .map(|k| format!("{:.0}", e.matrix()[(k, k)].re))
                .collect();
            let report = classicality_test(e, &split, &l, 32, 0, &tol)?;
            println!(
                "  e{i} = diag({})  classical {}  partners {}  superpositions {}",
                diag.join(","),
                report.is_classical_candidate,
                report.partners_checked,
                report.superpositions_checked
            );
        }
    }
    Ok(())
}
