//! Command-line driver for the witness engine.
//!
//! [`run`] parses arguments, merges an optional JSON config and dispatches to
//! one subcommand. Output goes to the writers passed in, so the same path
//! serves the binary and in-process tests.

pub mod args;
pub mod config;
pub mod format;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use gravwit_core::bisep::falsification_scan;
use gravwit_core::dynamics::{evolve_exact_with_threshold, evolve_first_order};
use gravwit_core::model::{
    couplings, omega_m_from_zpf, polarization_constraint, PhysicalConstants, SystemParams,
};
use gravwit_core::witness::{analytic_witness, exact_report, first_order_report_in, WitnessReport};
use gravwit_core::{Error, FockSpace, Mode};

use args::{
    Cli, Command, EvolveArgs, EvolveMode, FalsifyArgs, PlanKind, SweepArgs, Units, WitnessArgs,
    WitnessMode,
};
use sweep::{Method, Plan};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_FALSIFIED: i32 = 4;

pub const WITNESS_HEADER: &str = "mode,omega_k,omega_m,t,mu,delta_zpf,e1,e2,eps1,eps2,lhs_abs,o1,o2,o3,g1,g2,insep_g1,insep_g2,insep_m,witness";
pub const EVOLVE_HEADER: &str = "index,n_g1,n_g2,n_m,re,im";

/// A failed command: exit code plus message for standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CutoffTooSmall { .. } | Error::CannotFit(_) => EXIT_NUMERICAL,
            Error::Falsified(_) => EXIT_FALSIFIED,
            Error::InvalidArgument(_) | Error::SpaceMismatch { .. } | Error::Parse(_) => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(format!("i/o error: {e}"))
    }
}

type CmdResult = Result<(), Failure>;

/// Parse `args` (program name first), run the subcommand, return the exit code.
pub fn run<O: Write, E: Write>(args: Vec<OsString>, out: &mut O, err: &mut E) -> i32 {
    let args = match config::merge(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return e.exit_code();
        }
    };
    let k = PhysicalConstants::CODATA_2018;
    let result = match &cli.command {
        Command::Witness(a) => cmd_witness(a, &k, out),
        Command::Sweep(a) => cmd_sweep(a, &k, out),
        Command::Evolve(a) => cmd_evolve(a, out, err),
        Command::Falsify(a) => cmd_falsify(a, out, err),
        Command::Selftest(_) => cmd_selftest(&k, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn space(cutoffs: [usize; 3]) -> Result<FockSpace, Failure> {
    FockSpace::new(cutoffs).map_err(Failure::from)
}

fn report_row(mode: &str, inputs: [Option<f64>; 9], r: &WitnessReport) -> String {
    let cell = |x: Option<f64>| x.map(format::float).unwrap_or_default();
    let mut cells = vec![mode.to_string()];
    cells.extend(inputs.into_iter().map(cell));
    cells.extend(
        [r.lhs_abs, r.o1, r.o2, r.o3, r.g1_value, r.g2_value]
            .into_iter()
            .chain(r.insep)
            .chain([r.g2_value])
            .map(format::float),
    );
    cells.join(",")
}

pub fn cmd_witness<O: Write>(a: &WitnessArgs, k: &PhysicalConstants, out: &mut O) -> CmdResult {
    let mode_name = match a.mode {
        WitnessMode::Analytic => "analytic",
        WitnessMode::FirstOrder => "first-order",
        WitnessMode::Exact => "exact",
    };
    let space = space(a.cutoffs)?;
    let row = if let (Some(e1), Some(e2)) = (a.eps1, a.eps2) {
        let r = match a.mode {
            WitnessMode::Analytic => {
                return Err(Failure::usage(
                    "--eps1/--eps2 need --mode first-order or exact",
                ))
            }
            WitnessMode::FirstOrder => first_order_report_in(space, e1, e2)?,
            WitnessMode::Exact => exact_report(e1, e2, space)?,
        };
        let mut inputs = [None; 9];
        inputs[7] = Some(e1);
        inputs[8] = Some(e2);
        report_row(mode_name, inputs, &r)
    } else {
        let scale = match a.units {
            Units::Rad => 1.0,
            Units::Hz => std::f64::consts::TAU,
        };
        let omega_k = a.omega_k * scale;
        let omega_m = match (a.delta_zpf, a.omega_m) {
            (Some(d), _) => omega_m_from_zpf(k, a.mu, d)?,
            (None, Some(w)) => w * scale,
            (None, None) => std::f64::consts::TAU,
        };
        let (e1, e2) = a.polarization.values();
        let p =
            SystemParams::new(a.mu, omega_m, omega_k, a.t)?.with_geometry(a.direction, e1, e2)?;
        let c = couplings(k, &p)?;
        let r = match a.mode {
            WitnessMode::Analytic => WitnessReport::from_parts(analytic_witness(k, &p)?, [0.0; 3]),
            WitnessMode::FirstOrder => first_order_report_in(space, c.eps1, c.eps2)?,
            WitnessMode::Exact => exact_report(c.eps1, c.eps2, space)?,
        };
        let inputs = [
            omega_k,
            omega_m,
            a.t,
            a.mu,
            c.delta_zpf,
            e1,
            e2,
            c.eps1,
            c.eps2,
        ];
        report_row(mode_name, inputs.map(Some), &r)
    };
    writeln!(out, "{WITNESS_HEADER}")?;
    writeln!(out, "{row}")?;
    Ok(())
}

/// The plan described by sweep flags.
pub fn sweep_plan(a: &SweepArgs) -> Result<Plan, Failure> {
    let e = a.polarization.values();
    Ok(match a.plan {
        PlanKind::Fig1 => Plan::Fig1 {
            omega_k: a.omega_k_range,
            omega_m: a.omega_m_range,
            t: a.t,
            e,
            mu: a.mu,
        },
        PlanKind::Fig2 => Plan::Fig2 {
            mus: a.mus.clone(),
            delta_zpf: a.delta_zpf_range,
            omega_k: a.omega_k,
            t: a.t,
            e,
        },
        PlanKind::Custom => {
            if a.points.is_empty() {
                return Err(Failure::usage("custom plan needs --points"));
            }
            Plan::Custom {
                points: a.points.clone(),
                e,
                mu: a.mu,
            }
        }
    })
}

pub fn cmd_sweep<O: Write>(a: &SweepArgs, k: &PhysicalConstants, out: &mut O) -> CmdResult {
    let plan = sweep_plan(a)?;
    let method = match a.mode {
        WitnessMode::Analytic => Method::Analytic,
        WitnessMode::FirstOrder => Method::FirstOrder,
        WitnessMode::Exact => Method::Exact { cutoffs: a.cutoffs },
    };
    let table = sweep::run(&plan, method, k, a.jobs.map(|j| j as usize))?;
    let csv = table.to_csv();
    match &a.out {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?,
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(())
}

pub fn cmd_evolve<O: Write, E: Write>(a: &EvolveArgs, out: &mut O, err: &mut E) -> CmdResult {
    let space = space(a.cutoffs)?;
    let state = match a.mode {
        EvolveMode::Exact => {
            evolve_exact_with_threshold(a.eps1, a.eps2, space, a.leakage_threshold)?.state
        }
        EvolveMode::FirstOrder => evolve_first_order(a.eps1, a.eps2, space)?,
    };
    let leak: Vec<String> = Mode::ALL
        .iter()
        .map(|&m| format!("{}={:e}", m.label(), state.top_level_population(m)))
        .collect();
    writeln!(err, "top-level population: {}", leak.join(" "))?;
    writeln!(out, "{EVOLVE_HEADER}")?;
    for (i, z) in state.amplitudes().iter().enumerate() {
        if z.re == 0.0 && z.im == 0.0 && !a.include_zeros {
            continue;
        }
        let [n1, n2, n3] = space.occupations(i);
        writeln!(
            out,
            "{i},{n1},{n2},{n3},{},{}",
            format::float(z.re),
            format::float(z.im)
        )?;
    }
    Ok(())
}

pub fn cmd_falsify<O: Write, E: Write>(a: &FalsifyArgs, out: &mut O, err: &mut E) -> CmdResult {
    let space = space(a.cutoffs)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.unwrap_or(0) as usize)
        .build()
        .map_err(|e| Failure::usage(format!("cannot start worker pool: {e}")))?;
    let summary = pool.install(|| {
        falsification_scan(space, a.n_products as usize, a.n_ensembles as usize, a.seed)
    })?;
    writeln!(out, "{summary}")?;
    if let Some(path) = &a.out {
        let csv = format!(
            "{}\n{}\n",
            gravwit_core::bisep::FalsificationSummary::csv_header(),
            summary.csv_row()
        );
        std::fs::write(path, csv)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    if summary.passed() {
        return Ok(());
    }
    for v in summary.violations.iter().take(10) {
        let split = v.bipartition.map(|b| b.label()).unwrap_or("ensemble");
        writeln!(
            err,
            "violated {} ({split}): value {:e} at seed {} stream {}",
            v.check.label(),
            v.value,
            v.seed,
            v.stream
        )?;
    }
    Err(Failure {
        code: EXIT_FALSIFIED,
        message: format!("{} witness bound violations", summary.violations.len()),
    })
}

/// Named check and its outcome.
pub type SelfCheck = (&'static str, Result<(), String>);

fn expect(ok: bool, detail: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(detail())
    }
}

/// Fast consistency checks run by `selftest`.
pub fn selftest_checks(k: &PhysicalConstants) -> Vec<SelfCheck> {
    use gravwit_core::model::{build_h1_h2, parse_h1_h2};
    use gravwit_core::witness::{first_order_report, witness_operator_a, WitnessOperators};
    use gravwit_core::StateVector;

    let mut checks: Vec<SelfCheck> = Vec::new();
    let e = |r: Result<(), Error>| r.map_err(|e| e.to_string());

    checks.push((
        "polarization constraint along u3 equals 1",
        e(polarization_constraint([0.0, 0.0, 1.0]).map(|_| ())).and_then(|_| {
            let v = polarization_constraint([0.0, 0.0, 1.0]).unwrap();
            let (e1, e2) = gravwit_core::model::default_polarization();
            expect(v == 1.0 && (e1 * e1 + e2 * e2 - v).abs() < 1e-15, || {
                format!("got {v}")
            })
        }),
    ));
    checks.push((
        "non-unit direction rejected",
        expect(polarization_constraint([0.0, 0.0, 2.0]).is_err(), || {
            "accepted |n| = 2".into()
        }),
    ));
    checks.push((
        "reference witness value",
        (|| {
            let p = SystemParams::new(1e-16, std::f64::consts::TAU, 10.0, 1.0)
                .map_err(|e| e.to_string())?;
            let g = analytic_witness(k, &p).map_err(|e| e.to_string())?;
            // ω_k³/(4π ω_m) · sqrt(G ħ / c⁵) · (e1 + e2)
            let hand = 1000.0 / (4.0 * std::f64::consts::PI * std::f64::consts::TAU)
                * (k.g * k.hbar / k.c.powi(5)).sqrt()
                * std::f64::consts::SQRT_2;
            expect(((g - hand) / hand).abs() < 1e-10, || {
                format!("{g:e} vs {hand:e}")
            })
        })(),
    ));
    checks.push((
        "first-order amplitudes",
        (|| {
            let s = FockSpace::default();
            let psi = evolve_first_order(1e-3, 2e-3, s).map_err(|e| e.to_string())?;
            let want = [
                ([0, 0, 0], (1.0, 0.0)),
                ([1, 0, 0], (0.0, -1e-3)),
                ([1, 0, 2], (0.0, -(std::f64::consts::SQRT_2 * 1e-3))),
                ([0, 1, 0], (0.0, -2e-3)),
                ([0, 1, 2], (0.0, -(std::f64::consts::SQRT_2 * 2e-3))),
            ];
            for (occ, (re, im)) in want {
                let z = psi.amplitude(occ).unwrap();
                expect(z.re == re && z.im == im, || format!("{occ:?}: {z}"))?;
            }
            expect(psi.support().count() == 5, || "extra amplitudes".into())
        })(),
    ));
    checks.push((
        "first-order witness 2|eps1 + eps2|",
        (|| {
            let r = first_order_report(1e-3, 1e-3).map_err(|e| e.to_string())?;
            expect(
                (r.lhs_abs - 4e-3).abs() < 1e-12 && r.o().iter().all(|o| o.abs() < 1e-12),
                || format!("{r:?}"),
            )
        })(),
    ));
    checks.push((
        "parsed Hamiltonians equal built ones",
        (|| {
            let s = FockSpace::default();
            let (h1, h2) = build_h1_h2(s);
            let (p1, p2) = parse_h1_h2(s).map_err(|e| e.to_string())?;
            let d = h1
                .max_abs_diff(&p1)
                .unwrap()
                .max(h2.max_abs_diff(&p2).unwrap());
            expect(d <= 1e-12, || format!("max difference {d:e}"))
        })(),
    ));
    checks.push((
        "A on two phonons",
        (|| {
            let s = FockSpace::default();
            let a = witness_operator_a(s).map_err(|e| e.to_string())?;
            let out = a.apply(&StateVector::basis(s, [0, 0, 2]).unwrap()).unwrap();
            let z = out.amplitude([0, 0, 0]).unwrap();
            expect(
                (z.re - std::f64::consts::SQRT_2).abs() < 1e-15 && out.support().count() == 1,
                || format!("{z}"),
            )
        })(),
    ));
    checks.push((
        "product states respect the bound",
        (|| {
            let s = FockSpace::default();
            let ops = WitnessOperators::new(s).map_err(|e| e.to_string())?;
            let psi = gravwit_core::bisep::random_pure_product(
                s,
                gravwit_core::witness::Bipartition::MRest,
                1,
            );
            let r = ops.report_on_state(&psi).map_err(|e| e.to_string())?;
            let i = r.insep(gravwit_core::witness::Bipartition::MRest);
            expect(i <= 1e-10, || format!("I = {i:e}"))
        })(),
    ));
    checks.push((
        "small falsification run",
        falsification_scan(FockSpace::default(), 100, 50, 1)
            .map_err(|e| e.to_string())
            .and_then(|s| expect(s.passed(), || format!("{} violations", s.violations.len()))),
    ));
    checks
}

pub fn cmd_selftest<O: Write>(k: &PhysicalConstants, out: &mut O) -> CmdResult {
    let checks = selftest_checks(k);
    let mut failed = Vec::new();
    for (name, r) in &checks {
        match r {
            Ok(()) => writeln!(out, "ok    {name}")?,
            Err(d) => {
                writeln!(out, "FAIL  {name}: {d}")?;
                failed.push(*name);
            }
        }
    }
    if failed.is_empty() {
        writeln!(out, "{} checks passed", checks.len())?;
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_FALSIFIED,
            message: format!("selftest failed: {}", failed.join(", ")),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gravwit_core::bisep::FalsificationSummary;

    fn code(e: Error) -> i32 {
        Failure::from(e).code
    }

    #[test]
    fn exit_codes_follow_error_kind() {
        assert_eq!(code(Error::InvalidArgument("x".into())), EXIT_USAGE);
        let leak = Error::CutoffTooSmall {
            mode: Mode::M,
            leakage: 1e-3,
            threshold: 1e-8,
        };
        assert_eq!(code(leak), EXIT_NUMERICAL);
        let summary = FalsificationSummary {
            seed: 1,
            n_products: 1,
            n_ensembles: 1,
            max_insep: [0.0; 3],
            max_g2_pure: [0.0; 3],
            max_g1_ensemble: 0.0,
            max_g2_ensemble: 0.0,
            violations: Vec::new(),
        };
        assert_eq!(code(Error::Falsified(Box::new(summary))), EXIT_FALSIFIED);
    }

    #[test]
    fn run_reports_usage_and_help() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let args = |v: &[&str]| v.iter().map(OsString::from).collect::<Vec<_>>();
        assert_eq!(
            run(args(&["gravwit", "witness", "--bogus"]), &mut out, &mut err),
            EXIT_USAGE
        );
        assert!(!err.is_empty());
        assert_eq!(
            run(args(&["gravwit", "--help"]), &mut out, &mut err),
            EXIT_OK
        );
        assert!(String::from_utf8(out).unwrap().contains("Exit codes"));
    }

    #[test]
    fn selftest_all_green() {
        let checks = selftest_checks(&PhysicalConstants::CODATA_2018);
        for (name, r) in checks {
            assert!(r.is_ok(), "{name}: {r:?}");
        }
    }
}
