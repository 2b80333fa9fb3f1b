//! Command-line front end: scenario files in, CSV reports and exit codes out.
//!
//! Exit codes are the machine contract: [`EXIT_PASS`], [`EXIT_INPUT`] for
//! anything wrong with the input (including errors raised by the core
//! library), [`EXIT_FAIL`] when an identity misses its tolerance.

pub mod algebra;
pub mod error;
pub mod report;
pub mod runner;
pub mod scenario;

use std::path::{Path, PathBuf};

use curvint_core::framealgebra::Convention;

pub use error::CliError;
use report::Series;
use runner::{Experiment, Report, Row};
use scenario::Scenario;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

pub const THREADS_VAR: &str = "CURVINT_THREADS";

/// Sizes the global rayon pool from `CURVINT_THREADS` (unset: all cores).
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::input(format!("{THREADS_VAR}={raw:?} is not a positive integer"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::input(format!("thread pool: {e}")))
}

/// Scenarios shipped with the binary, addressable by bare name.
pub const BUNDLED: [(&str, &str); 8] = [
    (
        "torus_minkowski",
        include_str!("../scenarios/torus_minkowski.scenario"),
    ),
    (
        "s3_latitude",
        include_str!("../scenarios/s3_latitude.scenario"),
    ),
    (
        "unit_sphere",
        include_str!("../scenarios/unit_sphere.scenario"),
    ),
    ("ellipsoid", include_str!("../scenarios/ellipsoid.scenario")),
    (
        "hyperbolic_sphere",
        include_str!("../scenarios/hyperbolic_sphere.scenario"),
    ),
    ("flux", include_str!("../scenarios/flux.scenario")),
    (
        "katsurada_torus",
        include_str!("../scenarios/katsurada_torus.scenario"),
    ),
    (
        "katsurada_s3",
        include_str!("../scenarios/katsurada_s3.scenario"),
    ),
];

pub fn bundled(name: &str) -> Option<Scenario> {
    let (_, text) = BUNDLED.iter().find(|(n, _)| *n == name)?;
    Some(scenario::parse(text).expect("bundled scenarios parse"))
}

/// Reads a scenario file; a bare name that is not an existing file falls
/// back to the bundled scenario of that name.
pub fn load(path: &Path) -> Result<Scenario, CliError> {
    if !path.exists() && path.components().count() == 1 {
        if let Some(s) = path.to_str().and_then(bundled) {
            return Ok(s);
        }
    }
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    scenario::parse(&text)
}

/// Where the outputs of a command go. `None` for the CSV means stdout.
#[derive(Clone, Debug, Default)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl Outputs {
    /// Command-line flags win over the scenario's `[output]` section.
    pub fn resolve(flags: Outputs, scenario: &Scenario) -> Outputs {
        Outputs {
            csv: flags.csv.or_else(|| scenario.output.csv.clone()),
            plot: flags.plot.or_else(|| scenario.output.plot.clone()),
        }
    }
}

/// Everything a command produced, before anything touches the disk.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub passed: bool,
    pub summary: String,
    pub csv: String,
    pub plot: String,
    pub rows: Vec<Row>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }

    /// Writes the CSV (to stdout when no path is given) and plot data.
    pub fn emit(&self, out: &Outputs) -> Result<(), CliError> {
        match &out.csv {
            Some(p) => report::write_file(p, &self.csv)?,
            None => print!("{}", self.csv),
        }
        if let Some(p) = &out.plot {
            report::write_file(p, &self.plot)?;
        }
        Ok(())
    }
}

fn verdict_line(passed: bool, report: &Report) -> String {
    format!(
        "suite {} in {:.2} s\n",
        if passed { "PASS" } else { "FAIL" },
        report.elapsed.as_secs_f64()
    )
}

pub fn run(scenario: &Scenario) -> Result<Outcome, CliError> {
    let report = Experiment::new(scenario)?.run(1)?;
    let passed = report.passed();
    Ok(Outcome {
        passed,
        summary: report::summary(&report.rows) + &verdict_line(passed, &report),
        csv: report::csv_string(&report.rows),
        plot: report::plot_string(&report.rows),
        rows: report.rows,
    })
}

/// Re-runs every check at resolutions `×1, ×2, …, ×2^{levels−1}`.
pub fn convergence(scenario: &Scenario, levels: usize) -> Result<Outcome, CliError> {
    if levels < 2 {
        return Err(CliError::input(format!(
            "--levels {levels}: need at least 2"
        )));
    }
    if levels > 8 {
        return Err(CliError::input(format!("--levels {levels}: at most 8")));
    }
    let top = scenario.resolution.iter().max().copied().unwrap_or(0) << (levels - 1);
    if top > scenario::MAX_RESOLUTION {
        return Err(CliError::input(format!(
            "finest resolution {top} exceeds {}",
            scenario::MAX_RESOLUTION
        )));
    }
    let exp = Experiment::new(scenario)?;
    let start = std::time::Instant::now();
    let mut per_level = Vec::with_capacity(levels);
    for k in 0..levels {
        per_level.push(exp.run(1 << k)?.rows);
    }
    let series = Series::collect(&per_level);
    let passed = series.iter().all(|s| s.converges());
    let summary = report::convergence_summary(&series)
        + &verdict_line(
            passed,
            &Report {
                rows: Vec::new(),
                elapsed: start.elapsed(),
            },
        );
    let rows: Vec<Row> = series
        .iter()
        .flat_map(|s| s.levels.iter().cloned())
        .collect();
    Ok(Outcome {
        passed,
        summary,
        csv: report::csv_string(&rows),
        plot: report::convergence_plot(&series),
        rows,
    })
}

/// The exact frame-algebra suite; `perturb` swaps in a wrong composition
/// convention as a negative control.
pub fn algebra(nmax: usize, perturb: bool) -> Result<Outcome, CliError> {
    let convention = if perturb {
        Convention::Signed
    } else {
        Convention::Alternating
    };
    let report = algebra::suite(nmax, convention)?;
    let passed = report.passed();
    let failures = report.rows.iter().filter(|r| !r.passes()).count();
    let mut summary = format!(
        "{} exact checks for 2 ≤ n ≤ {nmax}, {failures} failed\n",
        report.rows.len()
    );
    if let Some(msg) = algebra::failure_message(&report) {
        summary.push_str(&msg);
        summary.push('\n');
    }
    summary.push_str(&verdict_line(passed, &report));
    Ok(Outcome {
        passed,
        summary,
        csv: report::csv_string(&report.rows),
        plot: report::plot_string(&report.rows),
        rows: report.rows,
    })
}
