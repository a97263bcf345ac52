use std::fmt::Write as _;
use std::path::Path;

use serde_json::json;
use spinreal::algebra::{selftest_identities, RealVec3};
use spinreal::ito::{ccr_residual_breakdown, oracle_equivalence, SystemClass};
use spinreal::model::{self, master_mean_oracle, simulate_mean};
use spinreal::pauli::pauli_outer_relations_check;
use spinreal::realizability::{
    check_ccr_preservation, check_physical_realizability, extract_parameters, theorem3_harness, RealizabilityReport,
};
use spinreal::{BilinearQsde, PhysicalParams};

use crate::files::{self, Loaded, SystemFile};
use crate::report::{Input, Printer, ReportFile};

/// Bad input or flags; maps to exit status 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl From<spinreal::Error> for InputError {
    fn from(e: spinreal::Error) -> Self {
        Self(e.to_string())
    }
}

type Outcome = Result<bool, InputError>;

/// Largest identity residual accepted by `selftest`.
pub const IDENTITY_TOL: f64 = 1e-11;

fn load(path: &Path) -> Result<(Loaded, Input), InputError> {
    let loaded = files::load(path).map_err(InputError)?;
    let input = Input { path: path.display().to_string(), sha256: loaded.sha256.clone() };
    Ok((loaded, input))
}

fn as_qsde(system: &SystemFile) -> Result<BilinearQsde, InputError> {
    match system {
        SystemFile::Qsde(q) => Ok((**q).clone()),
        SystemFile::Params(p) => Ok(model::realize(p)?),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), InputError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_report(report: &ReportFile, out: Option<&Path>) -> Result<(), InputError> {
    match out {
        Some(_) => emit(out, &files::render(&report.to_json())),
        None => Ok(()),
    }
}

fn failing_list(pr: &RealizabilityReport) -> String {
    pr.failing().iter().map(|c| c.name()).collect::<Vec<_>>().join(", ")
}

pub fn check(path: &Path, tol: f64, out: Option<&Path>) -> Outcome {
    let (loaded, input) = load(path)?;
    let qsde = as_qsde(&loaded.system)?;
    let pr = check_physical_realizability(&qsde, tol);
    let ccr = check_ccr_preservation(&qsde, tol);

    let mut report = ReportFile::new(tol, Some(input));
    report.verdict("realizable", pr.verdict);
    report.verdict("ccr-preserving", ccr.verdict);
    for (c, r) in &pr.residuals {
        report.residual(c.name(), *r);
    }
    for (c, r) in &ccr.residuals {
        report.residual(c.name(), *r);
    }
    report.extracted = pr.extracted.as_ref().map(files::params_json);

    let p = Printer::stdout();
    let mut text = format!("check {}\nrealizability conditions\n", path.display());
    for (c, r) in &pr.residuals {
        writeln!(text, "{}", p.residual_line(c.name(), *r, tol)).unwrap();
    }
    text.push_str("commutation conditions\n");
    for (c, r) in &ccr.residuals {
        writeln!(text, "{}", p.residual_line(c.name(), *r, tol)).unwrap();
    }
    writeln!(text, "{}", p.verdict_line("realizable", pr.verdict)).unwrap();
    writeln!(text, "{}", p.verdict_line("ccr-preserving", ccr.verdict)).unwrap();
    if !pr.verdict {
        writeln!(text, "failing: {}", failing_list(&pr)).unwrap();
    }
    print!("{text}");
    write_report(&report, out)?;
    Ok(report.passed())
}

pub fn extract(path: &Path, tol: f64, out: Option<&Path>) -> Outcome {
    let (loaded, _) = load(path)?;
    let qsde = as_qsde(&loaded.system)?;
    let pr = check_physical_realizability(&qsde, tol);
    if !pr.verdict {
        eprintln!("not realizable, extraction refused; failing: {}", failing_list(&pr));
        return Ok(false);
    }
    let params = extract_parameters(&qsde);
    emit(out, &files::render(&files::to_json(&SystemFile::Params(params))))?;
    Ok(true)
}

pub fn realize(path: &Path, out: Option<&Path>) -> Outcome {
    let (loaded, _) = load(path)?;
    let SystemFile::Params(params) = loaded.system else {
        return Err(InputError(format!("{}: realize expects a \"params\" file", path.display())));
    };
    let qsde = model::realize(&params)?;
    emit(out, &files::render(&files::to_json(&SystemFile::Qsde(Box::new(qsde)))))?;
    Ok(true)
}

/// Without a path only the random comparison runs.
pub fn oracle(path: Option<&Path>, trials: usize, seed: u64, tol: f64, out: Option<&Path>) -> Outcome {
    let p = Printer::stdout();
    let mut text = String::new();
    let mut report;
    match path {
        Some(path) => {
            let (loaded, input) = load(path)?;
            let qsde = as_qsde(&loaded.system)?;
            report = ReportFile::new(tol, Some(input));
            let residual = ccr_residual_breakdown(&qsde);
            let checker = check_ccr_preservation(&qsde, tol);
            let realizable = check_physical_realizability(&qsde, tol).verdict;
            let oracle_ok = residual.max() <= tol;
            report.residual("ccr-residual", residual.max());
            report.residual("dt-identity", residual.dt_identity);
            report.residual("dt-pauli", residual.dt_pauli);
            report.residual("dW1", residual.dw1);
            report.residual("dW2", residual.dw2);
            report.verdict("oracle-checker-agree", oracle_ok == checker.verdict);
            if realizable {
                report.verdict("realizable-preserves-ccr", oracle_ok);
            }
            writeln!(text, "oracle {}", path.display()).unwrap();
            writeln!(text, "{}", p.residual_line("ccr-residual", residual.max(), tol)).unwrap();
            writeln!(text, "  reduced checker: {}", if checker.verdict { "preserving" } else { "not preserving" })
                .unwrap();
            writeln!(text, "{}", p.verdict_line("agreement", oracle_ok == checker.verdict)).unwrap();
            if oracle_ok != checker.verdict {
                writeln!(text, "the oracle and the reduced checker disagree; this indicates an implementation bug")
                    .unwrap();
            }
        }
        None => report = ReportFile::new(tol, None),
    }

    let eq = oracle_equivalence(seed, trials, tol);
    writeln!(text, "random systems (seed {seed}, {trials} per class)").unwrap();
    for class in SystemClass::ALL {
        let s = eq.summary(class);
        let name = serde_json::to_value(class).unwrap();
        let name = name.as_str().unwrap_or_default();
        writeln!(
            text,
            "  {name:<15} oracle {:>4}/{}  checker {:>4}/{}  agree {}",
            s.oracle_pass, s.trials, s.checker_pass, s.trials, s.agreements
        )
        .unwrap();
    }
    report.verdict("equivalence", eq.ok());
    if !eq.disagreements.is_empty() {
        writeln!(
            text,
            "{} disagreements between the oracle and the reduced checker; this indicates an implementation bug",
            eq.disagreements.len()
        )
        .unwrap();
    }
    report.details = Some(json!({ "equivalence": eq }));
    writeln!(text, "{}", p.verdict_line("oracle", report.passed())).unwrap();
    print!("{text}");
    write_report(&report, out)?;
    Ok(report.passed())
}

fn csv_row(line: &mut String, values: &[f64]) {
    let cells: Vec<String> = values.iter().map(|v| format!("{:?}", v + 0.0)).collect();
    line.push_str(&cells.join(","));
    line.push('\n');
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    path: &Path,
    r0: &RealVec3,
    horizon: f64,
    dt: f64,
    with_oracle: bool,
    tol: f64,
    out: Option<&Path>,
) -> Outcome {
    let (loaded, _) = load(path)?;
    let qsde = as_qsde(&loaded.system)?;
    let traj = simulate_mean(&qsde, r0, horizon, dt)?;
    if !with_oracle {
        let mut csv = String::from("t,r1,r2,r3\n");
        for s in &traj {
            csv_row(&mut csv, &[s.t, s.r[0], s.r[1], s.r[2]]);
        }
        emit(out, &csv)?;
        return Ok(true);
    }

    let params: PhysicalParams = match &loaded.system {
        SystemFile::Params(p) => p.clone(),
        SystemFile::Qsde(q) => {
            let pr = check_physical_realizability(q, spinreal::DEFAULT_TOL);
            match pr.extracted {
                Some(p) => p,
                None => {
                    eprintln!("--oracle needs a realizable system; failing: {}", failing_list(&pr));
                    return Ok(false);
                }
            }
        }
    };
    let master = master_mean_oracle(&params, r0, horizon, dt)?;
    let mut csv = String::from("t,r1,r2,r3,m1,m2,m3,maxdev\n");
    let mut maxdev = 0.0f64;
    for (s, m) in traj.iter().zip(&master) {
        maxdev = maxdev.max((s.r - m.r).amax());
        csv_row(&mut csv, &[s.t, s.r[0], s.r[1], s.r[2], m.r[0], m.r[1], m.r[2], maxdev]);
    }
    emit(out, &csv)?;
    let ok = maxdev <= tol;
    eprintln!("max deviation from the master equation: {maxdev:.3e} ({})", if ok { "within" } else { "exceeds" });
    Ok(ok)
}

pub fn selftest(seed: u64, trials: usize, tol: f64, out: Option<&Path>) -> Outcome {
    let p = Printer::stdout();
    let mut report = ReportFile::new(tol, None);
    let mut text = format!("selftest seed {seed}, {trials} trials\nidentities (limit {IDENTITY_TOL:e})\n");

    let identities = selftest_identities(seed, trials);
    for r in &identities.residuals {
        writeln!(text, "{}", p.residual_line(r.name, r.max_residual, IDENTITY_TOL)).unwrap();
        report.residual(r.name, r.max_residual);
    }
    let first_failure = identities.first_failure(IDENTITY_TOL);
    report.verdict("identities", first_failure.is_none());

    let outer = pauli_outer_relations_check();
    writeln!(text, "{}", p.residual_line("pauli-outer", outer.outer_residual, 0.0)).unwrap();
    writeln!(text, "{}", p.residual_line("pauli-commutator", outer.commutator_residual, 0.0)).unwrap();
    report.residual("pauli-outer", outer.outer_residual);
    report.residual("pauli-commutator", outer.commutator_residual);
    report.verdict("pauli-relations", outer.max() == 0.0);

    let t3 = theorem3_harness(seed, trials, tol);
    writeln!(
        text,
        "{}",
        p.verdict_line(&format!("realizable implies preserving ({}/{})", t3.passed, t3.trials), t3.ok())
    )
    .unwrap();
    report.verdict("theorem3", t3.ok());

    let eq = oracle_equivalence(seed, trials, tol);
    let agreements: usize = eq.classes.iter().map(|c| c.agreements).sum();
    let total: usize = eq.classes.iter().map(|c| c.trials).sum();
    writeln!(text, "{}", p.verdict_line(&format!("oracle equivalence ({agreements}/{total})"), eq.ok())).unwrap();
    report.verdict("oracle-equivalence", eq.ok());

    report.details = Some(json!({ "theorem3": t3, "equivalence": eq }));
    writeln!(text, "{}", p.verdict_line("selftest", report.passed())).unwrap();
    print!("{text}");
    if let Some(f) = first_failure {
        eprintln!("first failing identity: {} (residual {:.3e})", f.name, f.max_residual);
    }
    write_report(&report, out)?;
    Ok(report.passed())
}
