//! One line per acceptance criterion; exits nonzero if any fails.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use eislab::contraction::{
    classicality_equivalence_diagnostic, fixed_point, lipschitz_constant, orbit_diameter,
    DEFAULT_SEARCH_BUDGET,
};
use eislab::lindblad::{
    build_liouvillian, cptp_report, semigroup_at, semigroup_law_defect, Superoperator,
};
use eislab::models::{self, random_generator, random_hermitian, ModelPreset};
use eislab::numkernel::{op_norm, pauli_z, real_diag, trace_norm, CMatrix, DensityMatrix, C64};
use eislab::pointer::{entropy_monotonicity_check, pointer_basis, steady_space};
use eislab::report::{run, AnalysisResult, ClaimId, RunReport};
use eislab::scenario::{load_scenario, Analysis, LoadOptions};
use eislab::seed::stream_rng;
use eislab::selftest::run_selftest;
use eislab::split::{spectral_split, verify_trace_orthogonality};
use eislab::ToleranceConfig;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples/scenarios")
        .join(name)
}

fn liouvillian(m: &ModelPreset) -> Superoperator {
    build_liouvillian(&m.generator().expect("preset"))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn cptp_suite() -> Outcome {
    let tol = ToleranceConfig::default();
    let mut rng = stream_rng(2024, 0);
    let times: Vec<f64> = (0..10).map(|i| 0.05 * 1.6f64.powi(i)).collect();
    let (mut choi, mut trace_def, mut law, mut comm) = (f64::INFINITY, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let d = rng.gen_range(2..=4);
        let jumps = rng.gen_range(1..=3);
        let l = build_liouvillian(&random_generator(d, jumps, &mut rng));
        let channels: Vec<Superoperator> = times
            .iter()
            .map(|&t| semigroup_at(&l, t))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        for (i, ch) in channels.iter().enumerate() {
            let rep = cptp_report(ch, &tol);
            choi = choi.min(rep.choi_min_eigenvalue);
            trace_def = trace_def.max(rep.trace_defect);
            law = law.max(semigroup_law_defect(&l, times[i], times[i]).map_err(err)?);
            let other = &channels[(i + 1) % channels.len()];
            let ab = ch.compose(other).map_err(err)?;
            let ba = other.compose(ch).map_err(err)?;
            comm = comm.max(op_norm(&(ab.matrix() - ba.matrix())).map_err(err)?);
        }
    }
    ensure(choi >= -1e-9, || format!("Choi min eigenvalue {choi:e}"))?;
    ensure(trace_def <= 1e-10, || format!("trace defect {trace_def:e}"))?;
    ensure(law <= 1e-9, || format!("semigroup-law defect {law:e}"))?;
    ensure(comm <= 1e-9, || format!("commutativity defect {comm:e}"))?;
    Ok(format!(
        "choi_min={choi:.2e} trace={trace_def:.2e} law={law:.2e} comm={comm:.2e}"
    ))
}

/// Least-squares slope of `ln y` against `t`.
fn log_slope(t: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(y)
        .filter(|(_, &v)| v > 1e-12)
        .map(|(&a, &b)| (a, b.ln()))
        .collect();
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    sxy / sxx
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .unwrap_or_default()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|v| v.parse().expect("numeric cell"))
                .collect()
        })
        .collect();
    (header, rows)
}

fn cli_run(scenario: &Path, dir: &Path, tag: &str) -> Result<(RunReport, String, String), String> {
    let json = dir.join(format!("{tag}.json"));
    let csv = dir.join(format!("{tag}.csv"));
    let status = Command::new(env!("CARGO_BIN_EXE_eislab"))
        .arg("run")
        .arg(scenario)
        .arg("--out")
        .arg(&json)
        .arg("--csv")
        .arg(&csv)
        .env_remove("EISLAB_SEED")
        .env_remove("EISLAB_TOLERANCES")
        .status()
        .map_err(err)?;
    ensure(status.code() == Some(0), || {
        format!("cli exit {:?}", status.code())
    })?;
    let json_text = std::fs::read_to_string(&json).map_err(err)?;
    let csv_text = std::fs::read_to_string(&csv).map_err(err)?;
    Ok((
        RunReport::from_json(&json_text).map_err(err)?,
        json_text,
        csv_text,
    ))
}

fn dephasing() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let (rep, _, csv) = cli_run(&scenario_path("dephasing.toml"), dir.path(), "dephasing")?;
    let Some(AnalysisResult::Split(s)) = rep.result(Analysis::Split) else {
        return Err("split result missing".into());
    };
    ensure((s.dim_isometric, s.dim_sweeping) == (2, 2), || {
        format!("dims {} {}", s.dim_isometric, s.dim_sweeping)
    })?;

    let Some(AnalysisResult::Pointer(p)) = rep.result(Analysis::Pointer) else {
        return Err("pointer result missing".into());
    };
    let mut diag: Vec<(f64, f64)> = p
        .projections
        .iter()
        .map(|m| {
            let off = m[0][1][0].hypot(m[0][1][1]) + m[1][0][0].hypot(m[1][0][1]);
            assert!(off < 1e-9, "off-diagonal weight {off}");
            (m[0][0][0], m[1][1][0])
        })
        .collect();
    diag.sort_by(|a, b| b.0.total_cmp(&a.0));
    ensure(diag.len() == 2, || format!("{} pointer states", diag.len()))?;
    ensure(
        (diag[0].0 - 1.0).abs() < 1e-9 && diag[0].1.abs() < 1e-9,
        || format!("first {:?}", diag[0]),
    )?;
    ensure(
        diag[1].0.abs() < 1e-9 && (diag[1].1 - 1.0).abs() < 1e-9,
        || format!("second {:?}", diag[1]),
    )?;
    let overlap = p
        .pairwise_overlaps
        .iter()
        .flatten()
        .fold(0.0f64, |a, &b| a.max(b));
    let fixedness = p.fixedness_defects.iter().fold(0.0f64, |a, &b| a.max(b));
    ensure(overlap <= 1e-9 && fixedness <= 1e-9, || {
        format!("overlap {overlap:e} fixedness {fixedness:e}")
    })?;

    let (header, rows) = parse_csv(&csv);
    let t: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let mut rates = Vec::new();
    for (j, name) in header
        .iter()
        .enumerate()
        .filter(|(_, h)| h.starts_with("sweep"))
    {
        let y: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        rates.push((name.clone(), -log_slope(&t, &y)));
    }
    ensure(!rates.is_empty(), || {
        "no sweeping columns in the time series".into()
    })?;
    for (name, r) in &rates {
        ensure((r - 2.0).abs() <= 0.02, || format!("{name} rate {r}"))?;
    }

    let Some(AnalysisResult::Contraction(cr)) = rep.result(Analysis::Contraction) else {
        return Err("contraction result missing".into());
    };
    let kdev = cr
        .k_of_t
        .iter()
        .map(|k| (k - 1.0).abs())
        .fold(0.0, f64::max);
    ensure(kdev <= 1e-6, || format!("|k - 1| up to {kdev:e}"))?;
    let uc = rep.ledger_entry(ClaimId::UniformContraction);
    ensure(uc.detail.contains("uniform contraction fails"), || {
        format!("ledger detail: {}", uc.detail)
    })?;
    Ok(format!(
        "rates {:?}, max |k-1| {kdev:.1e}",
        rates.iter().map(|r| r.1).collect::<Vec<_>>()
    ))
}

/// `‖T_t(½ n·σ)‖₁` from the Kraus form of amplitude damping.
fn amplitude_damping_k_oracle(t: f64) -> f64 {
    let p = (-t).exp();
    let k0 = real_diag(&[1.0, p.sqrt()]);
    let mut k1 = CMatrix::zeros(2, 2);
    k1[(0, 1)] = C64::new((1.0 - p).sqrt(), 0.0);
    let (sx, sy, sz) = (
        eislab::numkernel::pauli_x(),
        eislab::numkernel::pauli_y(),
        pauli_z(),
    );
    let mut best: f64 = 0.0;
    let n = 400;
    for i in 0..=n {
        let theta = std::f64::consts::PI * i as f64 / n as f64;
        for j in 0..(2 * n) {
            let phi = std::f64::consts::PI * j as f64 / n as f64;
            let (nx, ny, nz) = (
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            );
            let x = (&sx * C64::new(nx, 0.0) + &sy * C64::new(ny, 0.0) + &sz * C64::new(nz, 0.0))
                * C64::new(0.5, 0.0);
            let y = &k0 * &x * k0.adjoint() + &k1 * &x * k1.adjoint();
            // 2x2 Hermitian: eigenvalues m ± r
            let m = 0.5 * (y[(0, 0)].re + y[(1, 1)].re);
            let r = (0.25 * (y[(0, 0)].re - y[(1, 1)].re).powi(2) + y[(0, 1)].norm_sqr()).sqrt();
            best = best.max((m + r).abs() + (m - r).abs());
        }
    }
    best
}

fn amplitude_damping() -> Outcome {
    let tol = ToleranceConfig::default();
    let scenario = load_scenario(
        &scenario_path("amplitude_damping.toml"),
        &LoadOptions::default(),
    )
    .map_err(err)?;
    let rep = run(&scenario);
    let Some(AnalysisResult::FixedPoint(fp)) = rep.result(Analysis::FixedPoint) else {
        return Err("fixed point result missing".into());
    };
    let e = fp.fixed_state.as_ref().ok_or("no unique fixed state")?;
    let e = eislab::scenario::decode_matrix(e, "fixed_state").map_err(err)?;
    let dist = trace_norm(&(e - real_diag(&[1.0, 0.0]))).map_err(err)?;
    ensure(dist <= 1e-8, || format!("fixed state off by {dist:e}"))?;

    let Some(AnalysisResult::Split(s)) = rep.result(Analysis::Split) else {
        return Err("split result missing".into());
    };
    let mut got: Vec<(f64, f64)> = s.eigenvalues.iter().map(|z| (z[0], z[1])).collect();
    got.sort_by(|a, b| a.0.total_cmp(&b.0));
    let want = [(-1.0, 0.0), (-0.5, 0.0), (-0.5, 0.0), (0.0, 0.0)];
    let eig_err = got
        .iter()
        .zip(&want)
        .map(|(a, b)| (a.0 - b.0).hypot(a.1 - b.1))
        .fold(0.0, f64::max);
    ensure(got.len() == 4 && eig_err <= 1e-8, || {
        format!("eigenvalues {got:?}")
    })?;
    ensure((s.spectral_gap - 0.5).abs() <= 1e-8, || {
        format!("gap {}", s.spectral_gap)
    })?;

    let l = liouvillian(&ModelPreset::AmplitudeDampingQubit { gamma: 1.0 });
    let k_search = lipschitz_constant(&l, 1.0, DEFAULT_SEARCH_BUDGET, 7).map_err(err)?;
    let k_oracle = amplitude_damping_k_oracle(1.0);
    ensure((k_search - k_oracle).abs() <= 1e-3, || {
        format!("k search {k_search} oracle {k_oracle}")
    })?;
    ensure((k_search - (-0.5f64).exp()).abs() <= 1e-3, || {
        format!("k search {k_search}")
    })?;

    let conv = fp.convergence.as_ref().ok_or("no convergence report")?;
    let plus = conv
        .traces
        .iter()
        .find(|t| t.label == "plus")
        .ok_or("no trace for plus")?;
    let rate = plus.fitted_rate.ok_or("no fitted rate for plus")?;
    ensure((rate - 0.5).abs() <= 0.025, || {
        format!("plus tail rate {rate}")
    })?;

    let unitality = cptp_report(&semigroup_at(&l, 1.0).map_err(err)?, &tol).unitality_defect;
    let want_u = 1.0 - (-1.0f64).exp();
    ensure((unitality - want_u).abs() <= 1e-9, || {
        format!("unitality defect {unitality}")
    })?;

    let ent = entropy_monotonicity_check(
        &l,
        &DensityMatrix::maximally_mixed(2),
        &scenario.times(),
        &tol,
    )
    .map_err(err)?;
    ensure(!ent.monotone_s && ent.max_violation > 0.0, || {
        "no entropy violation for I/2".into()
    })?;
    ensure(!ent.unital, || "non-unital flag missing".into())?;
    Ok(format!(
        "gap {:.3}, k(1) {k_search:.6} vs oracle {k_oracle:.6}, plus rate {rate:.4}",
        s.spectral_gap
    ))
}

fn depolarizing() -> Outcome {
    let tol = ToleranceConfig::default();
    let l = liouvillian(&ModelPreset::DepolarizingQubit { gamma: 1.0 });
    let split = spectral_split(&l, &tol).map_err(err)?;
    let fixed = fixed_point(&l, &split, &tol).map_err(err)?;
    let e = fixed.fixed_state.as_ref().ok_or("no unique fixed state")?;
    let dist = trace_norm(&(e.matrix() - real_diag(&[0.5, 0.5]))).map_err(err)?;
    ensure(dist <= 1e-8, || format!("fixed state off I/2 by {dist:e}"))?;
    let pb = pointer_basis(&l, &split, &tol, 3).map_err(err)?;
    ensure(pb.is_empty(), || format!("{} pointer states", pb.len()))?;
    let diag =
        classicality_equivalence_diagnostic(&l, &split, &fixed, &pb, None, 3, &tol).map_err(err)?;
    ensure(diag.fixed_state_pure == Some(false), || {
        "fixed state reported pure".into()
    })?;
    ensure(!diag.unique_implies_classical, || {
        "unique-implies-classical direction reported to hold".into()
    })?;
    Ok("fixed state I/2, empty pointer basis, unique fixed point is not classical".into())
}

fn block_dephasing() -> Outcome {
    let tol = ToleranceConfig::default();
    let preset = ModelPreset::BlockDephasing {
        blocks: vec![2, 2],
        gamma: 1.0,
    };
    ensure(preset.expected_steady_dim() == Some(8), || {
        format!("{:?}", preset.expected_steady_dim())
    })?;
    let doc = models::describe("block_dephasing").ok_or("undocumented preset")?;
    ensure(doc.contains("Steady-space dimension"), || {
        "describe text lacks the steady-space dimension".into()
    })?;
    let l = liouvillian(&preset);
    let dim = steady_space(&l, &tol).map_err(err)?.len();
    ensure(dim == 8, || format!("steady space dim {dim}"))?;
    let split = spectral_split(&l, &tol).map_err(err)?;
    let ortho = verify_trace_orthogonality(&split);
    ensure(ortho <= 1e-9, || format!("trace orthogonality {ortho:e}"))?;
    let pb = pointer_basis(&l, &split, &tol, 5).map_err(err)?;
    ensure(pb.is_empty(), || {
        format!("{} rank-one states for 2+2", pb.len())
    })?;
    let mut ranks = pb.fixed_block_ranks.clone();
    ranks.sort();
    ensure(ranks == [2, 2], || format!("block ranks {ranks:?}"))?;

    let split_blocks = ModelPreset::BlockDephasing {
        blocks: vec![1, 1, 2],
        gamma: 1.0,
    };
    let l2 = liouvillian(&split_blocks);
    let s2 = spectral_split(&l2, &tol).map_err(err)?;
    let pb2 = pointer_basis(&l2, &s2, &tol, 5).map_err(err)?;
    ensure(pb2.len() == 2, || {
        format!("{} rank-one states for 1+1+2", pb2.len())
    })?;
    ensure(pb2.max_overlap() <= 1e-9, || {
        format!("overlap {:e}", pb2.max_overlap())
    })?;
    Ok(format!("steady dim {dim}, orthogonality {ortho:.1e}, ranks {ranks:?}; 1+1+2 gives {} pointer states", pb2.len()))
}

fn orbit_bound() -> Outcome {
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
    let mut rng = stream_rng(77, 0);
    let times: Vec<f64> = (0..15).map(|i| 0.01 * 2f64.powi(i)).collect();
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let preset = &presets[i % presets.len()];
        let l = liouvillian(preset);
        let f = random_hermitian(preset.dim(), &mut rng);
        let o = orbit_diameter(&l, &f, &times).map_err(err)?;
        ensure(o.diam_estimate <= o.bound + 1e-9, || {
            format!("{}: diam {} > {}", preset.name(), o.diam_estimate, o.bound)
        })?;
        worst = worst.max(o.diam_estimate / o.bound);
    }
    Ok(format!("worst diam/bound {worst:.3}"))
}

fn selftest() -> Outcome {
    let checks = run_selftest(0);
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}/{}", c.suite, c.name))
        .collect();
    ensure(failed.is_empty(), || {
        format!("failed: {}", failed.join(", "))
    })?;
    for name in [
        "k(0)",
        "submultiplicativ",
        "robustness is evolution-stable",
        "kron",
    ] {
        ensure(checks.iter().any(|c| c.name.contains(name)), || {
            format!("no check named like {name}")
        })?;
    }
    let status = Command::new(env!("CARGO_BIN_EXE_eislab"))
        .arg("selftest")
        .output()
        .map_err(err)?;
    ensure(status.status.code() == Some(0), || {
        format!("selftest exit {:?}", status.status.code())
    })?;
    Ok(format!("{} checks", checks.len()))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let mut compared = 0;
    for name in [
        "dephasing.toml",
        "amplitude_damping.toml",
        "driven_decay.toml",
    ] {
        let (_, a, csv_a) = cli_run(&scenario_path(name), dir.path(), "first")?;
        let (_, b, csv_b) = cli_run(&scenario_path(name), dir.path(), "second")?;
        let strip = |s: &str| s.split("\"timing\"").next().unwrap_or_default().to_string();
        ensure(strip(&a) == strip(&b), || format!("{name}: reports differ"))?;
        ensure(csv_a == csv_b, || format!("{name}: time series differ"))?;
        compared += 1;
    }
    Ok(format!(
        "{compared} scenarios byte-identical before the timing block"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 cptp suite", cptp_suite),
        ("2 dephasing qubit", dephasing),
        ("3 amplitude damping qubit", amplitude_damping),
        ("4 depolarizing qubit", depolarizing),
        ("5 block dephasing", block_dephasing),
        ("6 orbit bound", orbit_bound),
        ("7 selftest invariants", selftest),
        ("8 determinism", determinism),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({secs:.2}s): {detail}"),
            Err(reason) => {
                failures += 1;
                println!("FAIL criterion {name} ({secs:.2}s): {reason}");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", 8 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
