use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use cusp_geodesics::config::{load_config, parse_element, parse_indices, LoadedConfig, Payload, RunReport};
use cusp_geodesics::family::FamilyRecord;
use cusp_geodesics::plot::{emit_plot_data, summary_csv, SummaryRow};
use cusp_geodesics::{
    certify, enumerate_simple, lemma1_scan, plan_family, plans_for, solve_axis, AxisResult, Error,
    GroupElement, Verdict,
};

const EXIT_OK: u8 = 0;
const EXIT_PARSE: u8 = 2;
const EXIT_CERT_FAILS: u8 = 3;
const EXIT_SOLVER: u8 = 4;
const EXIT_SCHEMA: u8 = 5;
const EXIT_NON_ORTHOGONAL: u8 = 6;
const EXIT_BASE_AT_ORIGIN: u8 = 7;

const DEFAULT_INDICES: (i64, i64) = (10, 50);

#[derive(Parser)]
#[command(name = "cuspgeo", version, about = "Simple closed geodesics around a cusp")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override the solver tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Override the norm threshold below which no verdict is given.
    #[arg(long)]
    min_norm: Option<f64>,
    /// Write outputs into this directory instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Deterministic output: omit wall-clock timing.
    #[arg(long)]
    compare: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the axis of one g_t.
    Axis {
        #[command(flatten)]
        common: Common,
        /// "c1,c2,.." (lattice) or "s^n t^m" (glide).
        #[arg(long, allow_hyphen_values = true)]
        element: String,
    },
    /// Certify the arc of one axis.
    Certify {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        element: String,
    },
    /// Solve and certify the planned family over an index range.
    Enumerate {
        #[command(flatten)]
        common: Common,
        /// Inclusive range LO..HI.
        #[arg(long, allow_hyphen_values = true)]
        indices: Option<String>,
    },
    /// Localization errors and lengths along the planned family.
    #[command(name = "lemma1-scan")]
    Lemma1Scan {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        indices: Option<String>,
    },
    /// Write boundary.csv and summary.csv for plotting.
    EmitPlot {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        indices: Option<String>,
        /// Plot a single element instead of the family.
        #[arg(long, allow_hyphen_values = true)]
        element: Option<String>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ConfigParse(_) | Error::MalformedElement(_) | Error::InvalidInput(_) => EXIT_PARSE,
        Error::ConfigSchema(_) | Error::ConfigurationInvalid(_) | Error::DimensionMismatch { .. } => EXIT_SCHEMA,
        Error::NonOrthogonal { .. } => EXIT_NON_ORTHOGONAL,
        Error::BaseAtOrigin => EXIT_BASE_AT_ORIGIN,
        Error::Io(_) => EXIT_PARSE,
        _ => EXIT_SOLVER,
    }
}

struct Run {
    report: RunReport,
    rows: Vec<SummaryRow>,
    code: u8,
}

fn load(common: &Common) -> Result<LoadedConfig, Error> {
    let mut loaded = load_config(&common.config)?;
    if let Some(t) = common.tol {
        if !(t > 0.0) {
            return Err(Error::InvalidInput("--tol must be positive".into()));
        }
        loaded.tolerances.iterative = t;
    }
    if let Some(m) = common.min_norm {
        loaded.tolerances.min_norm = m;
    }
    Ok(loaded)
}

fn index_range(flag: &Option<String>, loaded: &LoadedConfig) -> Result<(i64, i64), Error> {
    match flag {
        Some(text) => parse_indices(text),
        None => Ok(loaded.indices.unwrap_or(DEFAULT_INDICES)),
    }
}

fn axis_row(index: i64, axis: &AxisResult, verdict: String) -> SummaryRow {
    SummaryRow {
        index,
        norm_t: axis.norm_t,
        d_c_a0: Some(axis.d_c_a0),
        d_d_bt: Some(axis.d_d_bt),
        length: Some(axis.translation_length),
        verdict,
        s_t_diameter: Some(axis.s_t_diameter()),
    }
}

/// Index used for single-element rows: the first coefficient or exponent.
fn element_index(e: &GroupElement) -> i64 {
    match e {
        GroupElement::Lattice(w) => w.iter().copied().find(|&c| c != 0).unwrap_or(0),
        GroupElement::Glide { n, m } => if *m != 0 { *m } else { *n },
    }
}

fn run(command: &Command) -> Result<Run, Error> {
    let (name, common) = match command {
        Command::Axis { common, .. } => ("axis", common),
        Command::Certify { common, .. } => ("certify", common),
        Command::Enumerate { common, .. } => ("enumerate", common),
        Command::Lemma1Scan { common, .. } => ("lemma1-scan", common),
        Command::EmitPlot { common, .. } => ("emit-plot", common),
    };
    let loaded = load(common)?;
    let cfg = &loaded.config;
    let tol = &loaded.tolerances;
    let mut code = EXIT_OK;
    let (payload, rows) = match command {
        Command::Axis { element, .. } => {
            let e = parse_element(element, cfg.group())?;
            let axis = solve_axis(cfg, &e, tol)?;
            let row = axis_row(element_index(&e), &axis, String::new());
            (Payload::Axis { axis }, vec![row])
        }
        Command::Certify { element, .. } => {
            let e = parse_element(element, cfg.group())?;
            let axis = solve_axis(cfg, &e, tol)?;
            let certificate = certify(cfg, &axis, tol)?;
            if certificate.verdict == Verdict::ConditionFails {
                code = EXIT_CERT_FAILS;
            }
            let row = axis_row(element_index(&e), &axis, certificate.verdict.as_str().into());
            (Payload::Certify { axis, certificate }, vec![row])
        }
        Command::Enumerate { indices, .. } => {
            let (lo, hi) = index_range(indices, &loaded)?;
            let reports = plans_for(cfg)?
                .iter()
                .map(|plan| enumerate_simple(cfg, plan, lo..=hi, tol))
                .collect::<Result<Vec<_>, _>>()?;
            if reports.iter().any(|r| r.summary.any_fails) {
                code = EXIT_CERT_FAILS;
            }
            let rows = reports[0].records.iter().map(SummaryRow::from).collect();
            (Payload::Enumerate { reports }, rows)
        }
        Command::Lemma1Scan { indices, .. } => {
            let (lo, hi) = index_range(indices, &loaded)?;
            let plan = plan_family(cfg)?;
            let family = (lo..=hi)
                .filter(|&i| plan.pattern.admits(i))
                .map(|i| plan.element(i))
                .collect::<Result<Vec<_>, _>>()?;
            let scan = lemma1_scan(cfg, &family, tol);
            let rows = (lo..=hi)
                .filter(|&i| plan.pattern.admits(i))
                .zip(&scan)
                .map(|(index, row)| {
                    use cusp_geodesics::axis::ScanOutcome;
                    match &row.outcome {
                        ScanOutcome::Solved { d_c_a0, d_d_bt, length } => SummaryRow {
                            index,
                            norm_t: row.norm_t,
                            d_c_a0: Some(*d_c_a0),
                            d_d_bt: Some(*d_d_bt),
                            length: Some(*length),
                            verdict: String::new(),
                            s_t_diameter: None,
                        },
                        ScanOutcome::Failed { error } => SummaryRow {
                            index,
                            norm_t: row.norm_t,
                            d_c_a0: None,
                            d_d_bt: None,
                            length: None,
                            verdict: format!("error:{error}"),
                            s_t_diameter: None,
                        },
                    }
                })
                .collect();
            (Payload::Lemma1Scan { rows: scan }, rows)
        }
        Command::EmitPlot { indices, element, .. } => {
            let out = common
                .out
                .as_deref()
                .ok_or_else(|| Error::InvalidInput("emit-plot needs --out".into()))?;
            let (axes, rows, reports) = match element {
                Some(text) => {
                    let e = parse_element(text, cfg.group())?;
                    let axis = solve_axis(cfg, &e, tol)?;
                    let verdict = certify(cfg, &axis, tol)?.verdict;
                    let idx = element_index(&e);
                    let row = axis_row(idx, &axis, verdict.as_str().into());
                    (vec![(idx, axis)], vec![row], Vec::new())
                }
                None => {
                    let (lo, hi) = index_range(indices, &loaded)?;
                    let plan = plan_family(cfg)?;
                    let report = enumerate_simple(cfg, &plan, lo..=hi, tol)?;
                    let axes: Vec<(i64, AxisResult)> = report
                        .records
                        .par_iter()
                        .filter(|r: &&FamilyRecord| r.error.is_none())
                        .filter_map(|r| solve_axis(cfg, &r.element, tol).ok().map(|a| (r.index, a)))
                        .collect();
                    let rows = report.records.iter().map(SummaryRow::from).collect();
                    (axes, rows, vec![report])
                }
            };
            let files = emit_plot_data(cfg, &axes, &rows, out)?
                .iter()
                .map(|p| p.display().to_string())
                .collect();
            if reports.iter().any(|r| r.summary.any_fails) {
                code = EXIT_CERT_FAILS;
            }
            (Payload::EmitPlot { files, reports }, rows)
        }
    };
    let report = RunReport::new(name, loaded.resolved.clone(), payload, loaded.warnings.clone());
    Ok(Run { report, rows, code })
}

fn write_output(common: &Common, is_plot: bool, run: &Run) -> Result<(), Error> {
    let (file, text) = match common.format {
        Format::Json => ("report.json", run.report.to_json()? + "\n"),
        Format::Csv => ("summary.csv", summary_csv(&run.rows)),
    };
    match &common.out {
        // emit-plot already wrote its files; the report goes to stdout.
        Some(dir) if !is_plot => {
            std::fs::create_dir_all(dir)?;
            let path: &Path = dir.as_ref();
            std::fs::write(path.join(file), text)?;
        }
        _ => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE } else { EXIT_OK });
        }
    };
    let start = Instant::now();
    let common = match &cli.command {
        Command::Axis { common, .. }
        | Command::Certify { common, .. }
        | Command::Enumerate { common, .. }
        | Command::Lemma1Scan { common, .. }
        | Command::EmitPlot { common, .. } => common,
    };
    let mut result = match run(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    for w in &result.report.warnings {
        eprintln!("warning: {w}");
    }
    if !common.compare {
        result.report.elapsed_seconds = Some(start.elapsed().as_secs_f64());
    }
    let is_plot = matches!(cli.command, Command::EmitPlot { .. });
    if let Err(e) = write_output(common, is_plot, &result) {
        eprintln!("error: {e}");
        return ExitCode::from(exit_code(&e));
    }
    ExitCode::from(result.code)
}
