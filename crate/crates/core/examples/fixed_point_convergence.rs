//! Unique fixed state of a driven, damped qubit and the convergence of
//! several initial states towards it.

use eislab::contraction::{convergence_report, fixed_point};
use eislab::lindblad::{build_liouvillian, LindbladGenerator};
use eislab::numkernel::{pauli_x, pauli_z, CMatrix, HermitianOperator, C64};
use eislab::scenario::named_state;
use eislab::split::spectral_split;
use eislab::ToleranceConfig;

fn main() -> eislab::Result<()> {
    let tol = ToleranceConfig::default();
    let h = HermitianOperator::new(
        pauli_z() * C64::new(0.5, 0.0) + pauli_x() * C64::new(0.3, 0.0),
        tol.hermiticity,
    )?;
    let mut decay = CMatrix::zeros(2, 2);
    decay[(0, 1)] = C64::new(0.8, 0.0);
    let l = build_liouvillian(&LindbladGenerator::new(h, vec![decay])?);
    let split = spectral_split(&l, &tol)?;
    let fixed = fixed_point(&l, &split, &tol)?;
    let e = fixed.fixed_state.as_ref().expect("unique fixed state");
    println!(
        "kernel dim {}, spectral gap {:.4}",
        fixed.kernel_dim, fixed.spectral_gap
    );
    println!("fixed state:\n{:.4}", e.matrix());

    let states = ["ground", "excited", "plus", "maximally_mixed"]
        .into_iter()
        .map(|n| Ok((n.to_string(), named_state(n, 2, 0)?)))
        .collect::<eislab::Result<Vec<_>>>()?;
    let times: Vec<f64> = (1..=60).map(|i| 0.5 * i as f64).collect();
    let conv = convergence_report(&l, &fixed, &states, &times, &tol)?;
    for tr in &conv.traces {
        println!(
            "{:<16} final distance {:.2e}  rate {:?}  rate/gap {:?}",
            tr.label,
            tr.distances.last().copied().unwrap_or(f64::NAN),
            tr.fitted_rate,
            tr.rate_vs_gap
        );
    }
    Ok(())
}
