//! Builds a random generator and checks that its semigroup is CPTP on a grid.

use eislab::lindblad::{build_liouvillian, cptp_report, semigroup_at, semigroup_law_defect};
use eislab::models::random_generator;
use eislab::seed::stream_rng;
use eislab::ToleranceConfig;

fn main() -> eislab::Result<()> {
    let mut rng = stream_rng(1, 0);
    let gen = random_generator(3, 2, &mut rng);
    let l = build_liouvillian(&gen);
    let tol = ToleranceConfig::default();
    println!(
        "{:>8} {:>14} {:>12} {:>12} {:>10}",
        "t", "choi_min", "trace_def", "law_def", "unital"
    );
    for t in [0.0, 0.1, 0.5, 1.0, 2.0, 5.0] {
        let rep = cptp_report(&semigroup_at(&l, t)?, &tol);
        let law = semigroup_law_defect(&l, t, t)?;
        println!(
            "{t:>8.2} {:>14.3e} {:>12.3e} {law:>12.3e} {:>10}",
            rep.choi_min_eigenvalue, rep.trace_defect, rep.is_unital
        );
    }
    Ok(())
}
