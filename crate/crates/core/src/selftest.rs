//! Invariant suites for every module, plus preset fidelity and run
//! determinism. Each check is seeded and reports a one-line detail.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::contraction::{fixed_point, lipschitz_constant, orbit_diameter};
use crate::error::Result;
use crate::lindblad::{
    build_liouvillian, cptp_report, semigroup_at, semigroup_law_defect, LindbladGenerator,
    Superoperator,
};
use crate::models::{random_density, random_generator, random_hermitian, ModelPreset};
use crate::numkernel::{
    c, herm_eig, kron, mat_exp, max_abs, op_norm, outer, pauli_z, trace, trace_norm, unvec, vec_op,
    CMatrix, CVector, DensityMatrix,
};
use crate::pointer::{classicality_test, entropy_monotonicity_check, pointer_basis, robustness};
use crate::report::run;
use crate::scenario::{LoadOptions, Scenario};
use crate::seed::stream_rng;
use crate::split::{spectral_split, verify_invariance, verify_sweeping_decay};
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestCheck {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

struct Runner {
    seed: u64,
    checks: Vec<SelftestCheck>,
}

impl Runner {
    fn check(&mut self, suite: &str, name: &str, f: impl FnOnce(u64) -> Result<(bool, String)>) {
        let (passed, detail) = match f(self.seed) {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        self.checks.push(SelftestCheck {
            suite: suite.into(),
            name: name.into(),
            passed,
            detail,
        });
    }
}

fn presets() -> Vec<ModelPreset> {
    vec![
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
        ModelPreset::BlockDephasing {
            blocks: vec![1, 1, 2],
            gamma: 0.5,
        },
    ]
}

fn preset_liouvillians() -> Result<Vec<(String, Superoperator)>> {
    presets()
        .into_iter()
        .map(|p| Ok((p.name().to_string(), build_liouvillian(&p.generator()?))))
        .collect()
}

fn random_generators(seed: u64, count: usize) -> Vec<LindbladGenerator> {
    (0..count)
        .map(|k| {
            let mut rng = stream_rng(seed, 10_000 + k as u64);
            let d = rng.gen_range(2..=4);
            let n = rng.gen_range(1..=3);
            random_generator(d, n, &mut rng)
        })
        .collect()
}

fn random_matrix(d: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn random_unitary(d: usize, rng: &mut impl Rng) -> Result<CMatrix> {
    let h = random_hermitian(d, rng);
    mat_exp(&(h.matrix() * c(0.0, 1.0)), 1.0)
}

fn grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| t0 * (t1 / t0).powf(k as f64 / (n - 1) as f64))
        .collect()
}

fn numkernel_suite(r: &mut Runner) {
    r.check("numkernel", "trace norm dominates operator norm", |seed| {
        let mut rng = stream_rng(seed, 1);
        let mut worst: f64 = f64::INFINITY;
        let mut rank_one: f64 = 0.0;
        for _ in 0..20 {
            let d = rng.gen_range(2..=5);
            let m = random_matrix(d, &mut rng);
            worst = worst.min(trace_norm(&m)? - op_norm(&m)?);
            let u = CVector::from_iterator(d, (0..d).map(|_| c(rng.gen_range(-1.0..1.0), 0.3)));
            let v = CVector::from_iterator(d, (0..d).map(|_| c(0.1, rng.gen_range(-1.0..1.0))));
            let p = outer(&u, &v);
            rank_one = rank_one.max((trace_norm(&p)? - op_norm(&p)?).abs() / op_norm(&p)?);
        }
        Ok((
            worst >= -1e-12 && rank_one <= 1e-10,
            format!("min gap {worst:.3e}, rank-one rel gap {rank_one:.3e}"),
        ))
    });
    r.check("numkernel", "trace norm unitary invariance", |seed| {
        let mut rng = stream_rng(seed, 2);
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let d = rng.gen_range(2..=5);
            let m = random_matrix(d, &mut rng);
            let u = random_unitary(d, &mut rng)?;
            let v = random_unitary(d, &mut rng)?;
            worst = worst.max((trace_norm(&(&u * &m * &v))? - trace_norm(&m)?).abs());
        }
        Ok((worst <= 1e-10, format!("max deviation {worst:.3e}")))
    });
    r.check("numkernel", "exponential law", |seed| {
        let mut rng = stream_rng(seed, 3);
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let d = rng.gen_range(2..=6);
            let m = random_matrix(d, &mut rng);
            let scale = 10.0 / op_norm(&m)?;
            let (s, t) = (
                rng.gen_range(0.0..0.5) * scale,
                rng.gen_range(0.0..0.5) * scale,
            );
            let lhs = mat_exp(&m, s + t)?;
            let rhs = mat_exp(&m, s)? * mat_exp(&m, t)?;
            worst = worst.max(op_norm(&(&lhs - rhs))? / op_norm(&lhs)?.max(1.0));
        }
        Ok((worst <= 1e-9, format!("max relative defect {worst:.3e}")))
    });
    r.check(
        "numkernel",
        "Hermitian eigendecomposition reconstruction",
        |seed| {
            let mut rng = stream_rng(seed, 4);
            let mut worst: f64 = 0.0;
            for _ in 0..10 {
                let d = rng.gen_range(2..=8);
                let h = random_hermitian(d, &mut rng);
                let e = herm_eig(&h);
                let mut rec = CMatrix::zeros(d, d);
                for (k, &l) in e.values.iter().enumerate() {
                    let v = e.vectors.column(k).into_owned();
                    rec += outer(&v, &v) * c(l, 0.0);
                }
                worst = worst.max(op_norm(&(h.matrix() - rec))? / op_norm(h.matrix())?);
            }
            Ok((worst <= 1e-10, format!("max relative residual {worst:.3e}")))
        },
    );
    r.check("numkernel", "vec(ABC) = (C^T kron A) vec(B)", |seed| {
        let mut rng = stream_rng(seed, 5);
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let d = rng.gen_range(2..=5);
            let (a, b, cm) = (
                random_matrix(d, &mut rng),
                random_matrix(d, &mut rng),
                random_matrix(d, &mut rng),
            );
            let lhs = vec_op(&(&a * &b * &cm));
            let rhs = kron(&cm.transpose(), &a) * vec_op(&b);
            worst = worst.max((lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max));
            worst = worst.max(max_abs(&(unvec(&vec_op(&b), d)? - &b)));
        }
        Ok((worst <= 1e-12, format!("max residual {worst:.3e}")))
    });
}

fn lindblad_suite(r: &mut Runner, tol: &ToleranceConfig) {
    r.check("lindblad", "CPTP on random generators", |seed| {
        let (mut choi, mut trace_d, mut law, mut comm): (f64, f64, f64, f64) = (f64::INFINITY, 0.0, 0.0, 0.0);
        for gen in random_generators(seed, 50) {
            let l = build_liouvillian(&gen);
            let ts = grid(1e-2, 10.0, 10).iter().map(|t| t / op_norm(l.matrix()).unwrap_or(1.0).max(1e-12)).collect::<Vec<_>>();
            let chans: Vec<Superoperator> = ts.iter().map(|&t| semigroup_at(&l, t)).collect::<Result<_>>()?;
            for (ch, &t) in chans.iter().zip(&ts) {
                let rep = cptp_report(ch, tol);
                choi = choi.min(rep.choi_min_eigenvalue);
                trace_d = trace_d.max(rep.trace_defect);
                law = law.max(semigroup_law_defect(&l, t, 0.5 * t)?);
            }
            for w in chans.windows(2) {
                comm = comm.max(op_norm(&(w[0].matrix() * w[1].matrix() - w[1].matrix() * w[0].matrix()))?);
            }
        }
        Ok((
            choi >= -1e-9 && trace_d <= 1e-10 && law <= 1e-9 && comm <= 1e-9,
            format!("min Choi eig {choi:.3e}, trace {trace_d:.3e}, law {law:.3e}, commutativity {comm:.3e}"),
        ))
    });
    r.check(
        "lindblad",
        "trace-norm nonexpansive and state norm preserved",
        |seed| {
            let (mut expand, mut state): (f64, f64) = (0.0, 0.0);
            for (k, gen) in random_generators(seed, 10).into_iter().enumerate() {
                let mut rng = stream_rng(seed, 20_000 + k as u64);
                let l = build_liouvillian(&gen);
                let ch = semigroup_at(&l, rng.gen_range(0.01..2.0))?;
                let x = random_hermitian(gen.dim(), &mut rng);
                expand = expand
                    .max(trace_norm(&ch.apply_matrix(x.matrix())?)? - trace_norm(x.matrix())?);
                let rho = random_density(gen.dim(), &mut rng);
                state = state.max((trace_norm(&ch.apply_matrix(rho.matrix())?)? - 1.0).abs());
            }
            Ok((
                expand <= 1e-9 && state <= 1e-10,
                format!("max expansion {expand:.3e}, state norm defect {state:.3e}"),
            ))
        },
    );
    r.check(
        "lindblad",
        "operator-norm contractivity iff unital",
        |seed| {
            let mut rng = stream_rng(seed, 6);
            let deph = semigroup_at(
                &build_liouvillian(&ModelPreset::DephasingQubit { gamma: 1.0 }.generator()?),
                1.0,
            )?;
            let ad = semigroup_at(
                &build_liouvillian(&ModelPreset::AmplitudeDampingQubit { gamma: 1.0 }.generator()?),
                1.0,
            )?;
            let mut worst: f64 = 0.0;
            for _ in 0..50 {
                let x = random_hermitian(2, &mut rng);
                worst = worst.max(op_norm(&deph.apply_matrix(x.matrix())?)? - op_norm(x.matrix())?);
            }
            let witness = op_norm(&ad.apply_matrix(&CMatrix::identity(2, 2))?)? - 1.0;
            Ok((
                cptp_report(&deph, tol).is_unital
                    && worst <= 1e-9
                    && !cptp_report(&ad, tol).is_unital
                    && witness > 1e-3,
                format!(
                    "unital max expansion {worst:.3e}, non-unital witness expansion {witness:.3e}"
                ),
            ))
        },
    );
}

fn split_suite(r: &mut Runner, tol: &ToleranceConfig) {
    r.check(
        "split",
        "dimension law, invariance and peripheral content",
        |seed| {
            let mut ls = preset_liouvillians()?
                .into_iter()
                .map(|(_, l)| l)
                .collect::<Vec<_>>();
            ls.extend(random_generators(seed, 10).iter().map(build_liouvillian));
            let (mut inv, mut re): (f64, f64) = (0.0, 0.0);
            let mut dims_ok = true;
            for l in &ls {
                let s = spectral_split(l, tol)?;
                let d = l.dim();
                dims_ok &= s.dims().0 + s.dims().1 == d * d;
                inv = inv.max(verify_invariance(&s, l)?);
                if let Some(sp) = s.spectral() {
                    for z in &sp.eigenvalues {
                        if z.re.abs() <= sp.peripheral_tol {
                            re = re.max(z.re.abs() / sp.peripheral_tol);
                        }
                    }
                }
            }
            Ok((
                dims_ok && inv <= 1e-9 && re <= 1.0,
                format!("max invariance leak {inv:.3e}"),
            ))
        },
    );
    r.check(
        "split",
        "sweeping decay rate at least the spectral gap",
        |_| {
            let mut worst = f64::INFINITY;
            for p in presets()
                .into_iter()
                .filter(|p| !matches!(p, ModelPreset::Unitary { .. }))
            {
                let l = build_liouvillian(&p.generator()?);
                let s = spectral_split(&l, tol)?;
                let gap = s.spectral_gap();
                let ts: Vec<f64> = (0..40).map(|k| k as f64 * 0.5 / gap).collect();
                let rep = verify_sweeping_decay(&s, &l, &ts, tol)?;
                for rate in rep.fitted_rates.iter().flatten() {
                    worst = worst.min(rate / gap);
                }
            }
            Ok((worst >= 0.95, format!("min fitted rate / gap {worst:.6}")))
        },
    );
    r.check("split", "deterministic bases", |seed| {
        let gen = &random_generators(seed, 1)[0];
        let l = build_liouvillian(gen);
        let (a, b) = (spectral_split(&l, tol)?, spectral_split(&l, tol)?);
        let same =
            a.isometric_basis() == b.isometric_basis() && a.sweeping_basis() == b.sweeping_basis();
        Ok((same, format!("dims {:?}", a.dims())))
    });
}

fn pointer_suite(r: &mut Runner, tol: &ToleranceConfig) {
    r.check(
        "pointer",
        "pointer states fixed on the grid and orthogonal",
        |seed| {
            let ts = grid(1e-3, 10.0, 25);
            let (mut drift, mut orth): (f64, f64) = (0.0, 0.0);
            let mut total = 0;
            for (_, l) in preset_liouvillians()? {
                let s = spectral_split(&l, tol)?;
                let pb = pointer_basis(&l, &s, tol, seed)?;
                total += pb.len();
                for &t in &ts {
                    let ch = semigroup_at(&l, t)?;
                    for e in &pb.projections {
                        drift =
                            drift.max(trace_norm(&(ch.apply_matrix(e.matrix())? - e.matrix()))?);
                    }
                }
                for (i, a) in pb.projections.iter().enumerate() {
                    for (j, b) in pb.projections.iter().enumerate() {
                        let prod = a.matrix() * b.matrix();
                        let expect = if i == j {
                            a.matrix().clone()
                        } else {
                            CMatrix::zeros(l.dim(), l.dim())
                        };
                        orth = orth.max(op_norm(&(prod - expect))?);
                    }
                }
            }
            Ok((
                drift <= 1e-8 && orth <= 1e-9,
                format!("{total} pointer states, drift {drift:.3e}, orthogonality {orth:.3e}"),
            ))
        },
    );
    r.check("pointer", "robustness is evolution-stable", |seed| {
        let ts = grid(1e-2, 10.0, 12);
        let mut ok = true;
        let mut checked = 0;
        for (_, l) in preset_liouvillians()? {
            let s = spectral_split(&l, tol)?;
            for e in pointer_basis(&l, &s, tol, seed)?.projections {
                if !robustness(&e, &s, tol).is_robust {
                    continue;
                }
                for &t in &ts {
                    let evolved =
                        DensityMatrix::from_trusted(semigroup_at(&l, t)?.apply_matrix(e.matrix())?);
                    ok &= robustness(&evolved, &s, tol).is_robust;
                    checked += 1;
                }
            }
        }
        Ok((ok, format!("{checked} evolved robust states checked")))
    });
    r.check("pointer", "entropy non-decreasing for unital semigroups", |seed| {
        let ts = grid(1e-2, 10.0, 20);
        let mut worst: f64 = 0.0;
        let mut flagged_nonunital = false;
        for (k, p) in presets().into_iter().enumerate() {
            let l = build_liouvillian(&p.generator()?);
            let rho = random_density(l.dim(), &mut stream_rng(seed, 30_000 + k as u64));
            let rep = entropy_monotonicity_check(&l, &rho, &ts, tol)?;
            if rep.unital {
                worst = worst.max(rep.max_violation);
            }
        }
        let ad = build_liouvillian(&ModelPreset::AmplitudeDampingQubit { gamma: 1.0 }.generator()?);
        let rep = entropy_monotonicity_check(&ad, &DensityMatrix::maximally_mixed(2), &ts, tol)?;
        flagged_nonunital |= !rep.monotone_s && !rep.unital;
        Ok((
            worst <= 1e-9 && flagged_nonunital,
            format!("max unital violation {worst:.3e}; non-unital violation reported {flagged_nonunital}"),
        ))
    });
    r.check("pointer", "classicality test deterministic", |seed| {
        let l = build_liouvillian(
            &ModelPreset::BlockDephasing {
                blocks: vec![1, 2],
                gamma: 1.0,
            }
            .generator()?,
        );
        let s = spectral_split(&l, tol)?;
        let e = pointer_basis(&l, &s, tol, seed)?
            .projections
            .into_iter()
            .next();
        let Some(e) = e else {
            return Ok((false, "no pointer state".into()));
        };
        let a = classicality_test(&e, &s, &l, 50, seed, tol)?;
        let b = classicality_test(&e, &s, &l, 50, seed, tol)?;
        Ok((
            a == b,
            format!("{} superpositions", a.superpositions_checked),
        ))
    });
}

fn contraction_suite(r: &mut Runner, tol: &ToleranceConfig) {
    let budget = 200;
    r.check("contraction", "k(0) = 1 and 0 <= k(t) <= 1", |seed| {
        let mut ls: Vec<Superoperator> =
            preset_liouvillians()?.into_iter().map(|(_, l)| l).collect();
        ls.extend(random_generators(seed, 5).iter().map(build_liouvillian));
        let (mut k0, mut above, mut below): (f64, f64, f64) = (0.0, 0.0, f64::INFINITY);
        for l in &ls {
            k0 = k0.max((lipschitz_constant(l, 0.0, budget, seed)? - 1.0).abs());
            for t in [0.1, 1.0, 5.0] {
                let k = lipschitz_constant(l, t, budget, seed)?;
                above = above.max(k - 1.0);
                below = below.min(k);
            }
        }
        Ok((
            k0 <= 1e-9 && above <= 1e-9 && below >= 0.0,
            format!("|k(0) - 1| {k0:.3e}, max k - 1 {above:.3e}"),
        ))
    });
    r.check("contraction", "submultiplicativity", |seed| {
        let mut worst = f64::NEG_INFINITY;
        let mut ls: Vec<Superoperator> =
            preset_liouvillians()?.into_iter().map(|(_, l)| l).collect();
        ls.extend(random_generators(seed, 3).iter().map(build_liouvillian));
        for l in &ls {
            for (s, t) in [(0.1, 0.2), (0.5, 0.5), (0.3, 2.0)] {
                let lhs = lipschitz_constant(l, s + t, budget, seed)?;
                let rhs = lipschitz_constant(l, s, budget, seed)?
                    * lipschitz_constant(l, t, budget, seed)?;
                worst = worst.max(lhs - rhs);
            }
        }
        Ok((
            worst <= tol.submultiplicativity,
            format!("max k(s+t) - k(s)k(t) {worst:.3e}"),
        ))
    });
    r.check("contraction", "search budget monotone", |seed| {
        let l = build_liouvillian(&random_generators(seed, 1)[0]);
        let ks: Vec<f64> = [1, 10, 50, 200]
            .iter()
            .map(|&b| lipschitz_constant(&l, 0.5, b, seed))
            .collect::<Result<_>>()?;
        Ok((ks.windows(2).all(|w| w[1] >= w[0]), format!("{ks:?}")))
    });
    r.check("contraction", "orbit bound", |seed| {
        let ts = grid(1e-3, 10.0, 25);
        let ls = preset_liouvillians()?;
        let mut ok = true;
        let mut worst: f64 = 0.0;
        for k in 0..100 {
            let (_, l) = &ls[k % ls.len()];
            let f = random_hermitian(l.dim(), &mut stream_rng(seed, 40_000 + k as u64));
            let o = orbit_diameter(l, &f, &ts)?;
            ok &= o.diam_estimate <= o.bound + 1e-9;
            worst = worst.max(o.diam_estimate / o.bound);
        }
        Ok((ok, format!("100 samples, worst diam/bound {worst:.6}")))
    });
    r.check(
        "contraction",
        "convergence to a unique fixed state",
        |seed| {
            let mut gens: Vec<LindbladGenerator> = vec![
                ModelPreset::AmplitudeDampingQubit { gamma: 1.0 }.generator()?,
                ModelPreset::DepolarizingQubit { gamma: 1.0 }.generator()?,
            ];
            gens.extend(random_generators(seed, 5));
            let (mut ok, mut checked, mut worst_terminal): (bool, usize, f64) = (true, 0, 0.0);
            for (k, gen) in gens.iter().enumerate() {
                let l = build_liouvillian(gen);
                let s = spectral_split(&l, tol)?;
                let fp = fixed_point(&l, &s, tol)?;
                let Some(e) = fp.fixed_state.filter(|_| fp.unique) else {
                    continue;
                };
                let gap = fp.spectral_gap;
                let t_max = 20.0 / gap;
                let ch = semigroup_at(&l, t_max)?;
                for j in 0..5 {
                    let rho = random_density(
                        l.dim(),
                        &mut stream_rng(seed, 50_000 + (k * 10 + j) as u64),
                    );
                    let start = trace_norm(&(rho.matrix() - e.matrix()))?;
                    let end = trace_norm(&(ch.apply_matrix(rho.matrix())? - e.matrix()))?;
                    ok &= end <= start * (-gap * (t_max - 1.0 / gap)).exp() * 10.0 + 1e-12;
                    ok &= end <= 1e-6;
                    worst_terminal = worst_terminal.max(end);
                    checked += 1;
                }
            }
            Ok((
                ok && checked > 0,
                format!("{checked} trajectories, worst terminal distance {worst_terminal:.3e}"),
            ))
        },
    );
}

fn cli_suite(r: &mut Runner, tol: &ToleranceConfig) {
    r.check("cli", "preset fidelity", |_| {
        let mut failures = Vec::new();
        let spectrum = |p: &ModelPreset| -> Result<Vec<f64>> {
            let l = build_liouvillian(&p.generator()?);
            let s = spectral_split(&l, tol)?;
            let mut re: Vec<f64> = s
                .spectral()
                .map(|sp| sp.eigenvalues.iter().map(|z| z.re).collect())
                .unwrap_or_default();
            re.sort_by(f64::total_cmp);
            Ok(re)
        };
        let close = |a: &[f64], b: &[f64]| {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-8)
        };
        let g = 0.7;
        if !close(
            &spectrum(&ModelPreset::DephasingQubit { gamma: g })?,
            &[-2.0 * g, -2.0 * g, 0.0, 0.0],
        ) {
            failures.push("dephasing spectrum");
        }
        if !close(
            &spectrum(&ModelPreset::AmplitudeDampingQubit { gamma: g })?,
            &[-g, -g / 2.0, -g / 2.0, 0.0],
        ) {
            failures.push("amplitude damping spectrum");
        }
        if !close(
            &spectrum(&ModelPreset::DepolarizingQubit { gamma: g })?,
            &[-4.0 * g, -4.0 * g, -4.0 * g, 0.0],
        ) {
            failures.push("depolarizing spectrum");
        }
        if !close(
            &spectrum(&ModelPreset::Unitary {
                hamiltonian: pauli_z(),
            })?,
            &[0.0; 4],
        ) {
            failures.push("unitary spectrum");
        }
        for p in presets() {
            let l = build_liouvillian(&p.generator()?);
            if let Some(expected) = p.expected_steady_dim() {
                if crate::pointer::steady_space(&l, tol)?.len() != expected {
                    failures.push("steady-space dimension");
                }
            }
        }
        let ad = build_liouvillian(&ModelPreset::AmplitudeDampingQubit { gamma: g }.generator()?);
        let t = 1.3;
        let rep = cptp_report(&semigroup_at(&ad, t)?, tol);
        if (rep.unitality_defect - (1.0 - (-g * t).exp())).abs() > 1e-9 {
            failures.push("amplitude damping unitality defect");
        }
        let k = lipschitz_constant(&ad, t, 100, 0)?;
        if (k - (-g * t / 2.0).exp()).abs() > 1e-6 {
            failures.push("amplitude damping k(t)");
        }
        let s = spectral_split(&ad, tol)?;
        let fp = fixed_point(&ad, &s, tol)?;
        let ground =
            CMatrix::from_diagonal(&CVector::from_column_slice(&[c(1.0, 0.0), c(0.0, 0.0)]));
        if fp
            .fixed_state
            .is_none_or(|e| trace_norm(&(e.matrix() - &ground)).unwrap_or(1.0) > 1e-8)
        {
            failures.push("amplitude damping fixed state");
        }
        let depol = build_liouvillian(&ModelPreset::DepolarizingQubit { gamma: g }.generator()?);
        let fp = fixed_point(&depol, &spectral_split(&depol, tol)?, tol)?;
        if fp.fixed_state.is_none_or(|e| {
            (trace(e.matrix()).re - 1.0).abs() > 1e-12 || (e.purity() - 0.5).abs() > 1e-10
        }) {
            failures.push("depolarizing fixed state");
        }
        Ok((
            failures.is_empty(),
            if failures.is_empty() {
                "all ground truths reproduced".into()
            } else {
                failures.join(", ")
            },
        ))
    });
    r.check("cli", "run determinism and exit-code contract", |seed| {
        let text = format!(
            "name = \"selftest\"\nseed = {seed}\n[model]\nname = \"dephasing_qubit\"\n[contraction]\nsearch_budget = 50\n"
        );
        let sc = Scenario::parse(&text, "selftest", &LoadOptions::default())?;
        let (a, b) = (run(&sc), run(&sc));
        let same = a.to_json_without_timing() == b.to_json_without_timing();
        Ok((same && a.exit_code() == 0, format!("identical {same}, exit code {} with failing hypotheses", a.exit_code())))
    });
}

/// Runs every suite with the given seed.
pub fn run_selftest(seed: u64) -> Vec<SelftestCheck> {
    let tol = ToleranceConfig::default();
    let mut r = Runner {
        seed,
        checks: Vec::new(),
    };
    numkernel_suite(&mut r);
    lindblad_suite(&mut r, &tol);
    split_suite(&mut r, &tol);
    pointer_suite(&mut r, &tol);
    contraction_suite(&mut r, &tol);
    cli_suite(&mut r, &tol);
    r.checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        let checks = run_selftest(0);
        let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        for suite in [
            "numkernel",
            "lindblad",
            "split",
            "pointer",
            "contraction",
            "cli",
        ] {
            assert!(checks.iter().any(|c| c.suite == suite));
        }
    }
}
