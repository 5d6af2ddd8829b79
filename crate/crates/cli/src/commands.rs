use fcdist::combinatorics::SequenceSpec;
use fcdist::density::{DensityFlag, Family};
use fcdist::figures::{figure_reproduce, spec_for, FigureId};
use fcdist::ginibre::{run_mc, Ensemble, MCConfig};
use fcdist::mellin::{compare_with_hypergeometric, oracle_density};
use fcdist::moments::verify_moments;
use fcdist::verify::{full_verification_suite, self_tests, CheckResult, SuiteOptions, VerificationSummary};
use serde::Serialize;
use serde_json::json;

use crate::args::{Command, DensityArgs, FigureArgs, McArgs, McTable, MomentsArgs, OracleArgs, SeqArgs, VerifyArgs};
use crate::output::{csv_table, Report};

pub const ORACLE_TOLERANCE: f64 = 1e-3;

#[derive(Debug)]
pub enum CliError {
    Usage(Vec<String>),
    Numeric(fcdist::Error),
    Io(std::io::Error),
}

impl From<fcdist::Error> for CliError {
    fn from(e: fcdist::Error) -> Self {
        CliError::Numeric(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(problems) => write!(f, "invalid arguments:\n  {}", problems.join("\n  ")),
            CliError::Numeric(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use fcdist::Error::*;
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(InvalidParameter(_) | OutsideSigma { .. } | Domain { .. } | EdgeRegion { .. } | GammaPole(_)) => 2,
            CliError::Numeric(NonConvergence { .. } | Quadrature { .. } | MassDrift { .. } | GridMismatch(_)) => 3,
            CliError::Io(_) => 2,
        }
    }
}

/// Whether the numbers a subcommand produced pass its own checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Failed,
    NotConverged,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Ok => 0,
            Verdict::Failed => 1,
            Verdict::NotConverged => 3,
        }
    }

    fn from_pass(passed: bool) -> Self {
        if passed {
            Verdict::Ok
        } else {
            Verdict::Failed
        }
    }
}

type Outcome = Result<(Report, Verdict), CliError>;

fn usage_check(problems: Vec<String>) -> Result<(), CliError> {
    if problems.is_empty() {
        Ok(())
    } else {
        Err(CliError::Usage(problems))
    }
}

pub fn run(command: &Command, seed: u64) -> Outcome {
    match command {
        Command::Seq(a) => seq(a),
        Command::Density(a) => density(a),
        Command::Moments(a) => moments(a),
        Command::Oracle(a) => oracle(a),
        Command::Mc(a) => mc(a, seed),
        Command::Figure(a) => figure(a),
        Command::Selftest => selftest(seed),
        Command::VerifyAll(a) => verify_all(a, seed),
    }
}

fn seq(a: &SeqArgs) -> Outcome {
    let mut problems = Vec::new();
    let family = a.family.family(&mut problems);
    usage_check(problems)?;
    let spec = match family.expect("checked above") {
        Family::FussCatalan { s } => SequenceSpec::fuss_catalan(s)?,
        Family::Raney { p, r } => SequenceSpec::raney(p, r)?,
    };
    #[derive(Serialize)]
    struct Row {
        n: u32,
        value: String,
    }
    let rows: Vec<Row> = spec
        .terms(a.n_max)?
        .into_iter()
        .enumerate()
        .map(|(n, v)| Row { n: n as u32, value: v.to_string() })
        .collect();
    let json = json!({ "sequence": spec, "terms": rows });
    Ok((Report { csv: csv_table(&rows)?, json }, Verdict::Ok))
}

fn density(a: &DensityArgs) -> Outcome {
    let mut problems = Vec::new();
    let family = a.family.family(&mut problems);
    if a.x.is_empty() && a.points < 2 {
        problems.push(format!("--points {} must be >= 2", a.points));
    }
    usage_check(problems)?;
    let spec = spec_for(family.expect("checked above"))?;
    let k = spec.support_upper;
    let xs: Vec<f64> = if a.x.is_empty() {
        (1..=a.points).map(|i| k * i as f64 / a.points as f64).collect()
    } else {
        a.x.clone()
    };
    #[derive(Serialize)]
    struct Row {
        x: f64,
        density: f64,
        flag: DensityFlag,
    }
    let rows = xs
        .iter()
        .map(|&x| spec.density_for_plot(x).map(|(density, flag)| Row { x, density, flag }))
        .collect::<fcdist::Result<Vec<_>>>()?;
    let json = json!({
        "family": spec.family,
        "support_upper": k,
        "is_probability": spec.is_probability(),
        "points": rows,
    });
    Ok((Report { csv: csv_table(&rows)?, json }, Verdict::Ok))
}

fn moments(a: &MomentsArgs) -> Outcome {
    let mut problems = Vec::new();
    let family = a.family.family(&mut problems);
    if let Some(t) = a.tol {
        if !(t > 0.0) {
            problems.push(format!("--tol {t} must be positive"));
        }
    }
    usage_check(problems)?;
    let family = family.expect("checked above");
    let tol = a.tol.unwrap_or(match family {
        Family::FussCatalan { .. } => 1e-8,
        Family::Raney { .. } => 1e-7,
    });
    let report = verify_moments(&spec_for(family)?, a.n_max, tol)?;
    #[derive(Serialize)]
    struct Row<'a> {
        n: u32,
        numeric: Option<f64>,
        exact: &'a str,
        rel_error: Option<f64>,
        error: Option<&'a str>,
    }
    let rows: Vec<Row> = report
        .rows
        .iter()
        .map(|r| Row {
            n: r.n,
            numeric: r.numeric,
            exact: &r.exact_digits,
            rel_error: r.rel_error,
            error: r.error.as_deref(),
        })
        .collect();
    // A row that failed to integrate is a convergence failure, not a wrong answer.
    let verdict = if report.rows.iter().any(|r| r.error.is_some()) {
        Verdict::NotConverged
    } else {
        Verdict::from_pass(report.passed)
    };
    let json = json!({
        "family": family,
        "tolerance": tol,
        "passed": report.passed,
        "max_rel_error": report.max_rel_error(),
        "rows": report.rows,
    });
    Ok((Report { csv: csv_table(&rows)?, json }, verdict))
}

fn oracle(a: &OracleArgs) -> Outcome {
    let mut problems = Vec::new();
    let family = a.family.family(&mut problems);
    if a.grid < 256 {
        problems.push(format!("--grid {} must be >= 256", a.grid));
    }
    usage_check(problems)?;
    let spec = spec_for(family.expect("checked above"))?;
    let cmp = compare_with_hypergeometric(&spec, &oracle_density(&spec, a.grid)?)?;
    let passed = cmp.rel_l1_central < ORACLE_TOLERANCE && cmp.min_oracle >= 0.0;
    let json = json!({
        "family": spec.family,
        "rel_l1_central": cmp.rel_l1_central,
        "tolerance": ORACLE_TOLERANCE,
        "min_oracle": cmp.min_oracle,
        "passed": passed,
        "rows": cmp.rows,
    });
    Ok((Report { csv: csv_table(&cmp.rows)?, json }, Verdict::from_pass(passed)))
}

fn mc(a: &McArgs, seed: u64) -> Outcome {
    let ensemble = a.ensemble.parse::<Ensemble>();
    let config = MCConfig {
        s: a.s,
        n: a.n,
        samples: a.samples,
        ensemble: ensemble.clone().unwrap_or(Ensemble::Complex),
        seed,
        bins: a.bins,
    };
    let mut problems = Vec::new();
    if let Err(e) = ensemble {
        problems.push(e.to_string());
    }
    if let Err(e) = config.validate() {
        problems.push(e.to_string());
    }
    usage_check(problems)?;
    let report = run_mc(&config)?;
    let csv = match a.table {
        McTable::Histogram => {
            #[derive(Serialize)]
            struct Row {
                bin_lo: f64,
                bin_hi: f64,
                empirical: f64,
                theory: f64,
            }
            let h = &report.histogram;
            csv_table((0..h.masses.len()).map(|i| Row {
                bin_lo: h.edges[i],
                bin_hi: h.edges[i + 1],
                empirical: h.masses[i],
                theory: h.theory_masses[i],
            }))?
        }
        McTable::Moments => csv_table(&report.empirical_moments)?,
    };
    let verdict = if report.failed_samples > 0 { Verdict::NotConverged } else { Verdict::Ok };
    Ok((Report { csv, json: serde_json::to_value(&report).map_err(std::io::Error::other)? }, verdict))
}

fn figure(a: &FigureArgs) -> Outcome {
    let mut problems = Vec::new();
    let id = a.id.parse::<FigureId>().map_err(|e| problems.push(e.to_string())).ok();
    if a.points < fcdist::figures::MIN_POINTS {
        problems.push(format!("--points {} must be >= {}", a.points, fcdist::figures::MIN_POINTS));
    }
    usage_check(problems)?;
    let fig = figure_reproduce(id.expect("checked above"), a.points)?;
    #[derive(Serialize)]
    struct Row<'a> {
        curve: &'a str,
        x: f64,
        density: f64,
        flag: DensityFlag,
        is_probability: bool,
    }
    let rows = fig.curves.iter().flat_map(|c| {
        c.points.iter().map(|p| Row {
            curve: &c.label,
            x: p.x,
            density: p.density,
            flag: p.flag,
            is_probability: c.is_probability,
        })
    });
    let csv = csv_table(rows)?;
    Ok((Report { csv, json: serde_json::to_value(&fig).map_err(std::io::Error::other)? }, Verdict::Ok))
}

#[derive(Serialize)]
struct CheckRow<'a> {
    name: &'a str,
    passed: bool,
    achieved: Option<f64>,
    threshold: Option<f64>,
    detail: &'a str,
}

fn check_rows(checks: &[CheckResult]) -> impl Iterator<Item = CheckRow<'_>> {
    checks.iter().map(|c| CheckRow {
        name: &c.name,
        passed: c.passed,
        achieved: c.achieved,
        threshold: c.threshold,
        detail: c.detail.as_deref().unwrap_or(""),
    })
}

fn summary_report(summary: &VerificationSummary) -> Outcome {
    let csv = csv_table(check_rows(&summary.checks))?;
    let json = serde_json::to_value(summary).map_err(std::io::Error::other)?;
    Ok((Report { csv, json }, Verdict::from_pass(summary.passed)))
}

fn selftest(seed: u64) -> Outcome {
    summary_report(&VerificationSummary::from_checks(self_tests(seed)))
}

fn verify_all(a: &VerifyArgs, seed: u64) -> Outcome {
    if a.oracle_grid < 256 {
        return Err(CliError::Usage(vec![format!("--oracle-grid {} must be >= 256", a.oracle_grid)]));
    }
    let options = SuiteOptions { seed, monte_carlo: !a.no_mc, oracle_grid: a.oracle_grid, perturbation: None };
    summary_report(&full_verification_suite(&options))
}
