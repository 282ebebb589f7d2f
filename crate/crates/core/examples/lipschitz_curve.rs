//! `k(t)` curves for the qubit presets next to their closed forms.

use eislab::contraction::{lipschitz_constant, DEFAULT_SEARCH_BUDGET};
use eislab::lindblad::build_liouvillian;
use eislab::models::ModelPreset;

fn main() -> eislab::Result<()> {
    let models = [
        (
            ModelPreset::DephasingQubit { gamma: 1.0 },
            (|_t: f64| 1.0) as fn(f64) -> f64,
        ),
        (
            ModelPreset::AmplitudeDampingQubit { gamma: 1.0 },
            |t: f64| (-t / 2.0).exp(),
        ),
        (ModelPreset::DepolarizingQubit { gamma: 1.0 }, |t: f64| {
            (-4.0 * t).exp()
        }),
    ];
    for (preset, exact) in models {
        let l = build_liouvillian(&preset.generator()?);
        println!("{}", preset.name());
        for t in [0.0, 0.25, 0.5, 1.0, 2.0, 4.0] {
            let k = lipschitz_constant(&l, t, DEFAULT_SEARCH_BUDGET, 0)?;
            println!("  t = {t:<5} k = {k:.6}  exact {:.6}", exact(t));
        }
    }
    Ok(())
}
