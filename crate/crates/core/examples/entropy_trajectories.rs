//! Entropy along trajectories: monotone under a unital semigroup, not
//! under amplitude damping.

use eislab::lindblad::build_liouvillian;
use eislab::models::ModelPreset;
use eislab::numkernel::DensityMatrix;
use eislab::pointer::entropy_monotonicity_check;
use eislab::ToleranceConfig;

fn main() -> eislab::Result<()> {
    let tol = ToleranceConfig::default();
    let times: Vec<f64> = (1..=8).map(|i| 0.5 * i as f64).collect();
    for preset in [
        ModelPreset::DepolarizingQubit { gamma: 0.25 },
        ModelPreset::AmplitudeDampingQubit { gamma: 1.0 },
    ] {
        let l = build_liouvillian(&preset.generator()?);
        let rep = entropy_monotonicity_check(&l, &DensityMatrix::maximally_mixed(2), &times, &tol)?;
        println!(
            "{} from I/2: unital {} (defect {:.3}), monotone {}, max drop {:.3}",
            preset.name(),
            rep.unital,
            rep.unitality_defect,
            rep.monotone_s,
            rep.max_violation
        );
        for (t, s) in rep.times.iter().zip(&rep.entropy) {
            println!("  t = {t:<4} S = {s:.5}");
        }
    }
    Ok(())
}
