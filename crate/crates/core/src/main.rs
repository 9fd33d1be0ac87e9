use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use westervelt_dg::acoustics::ErrorMode;
use westervelt_dg::cli::config::{ExperimentKind, SimulationConfig};
use westervelt_dg::cli::output::{write_csv, write_vtk};
use westervelt_dg::cli::run::{convergence_study, simulate, StepLog, StudyReport};
use westervelt_dg::mms::EocTable;
use westervelt_dg::Result;

#[derive(Parser)]
#[command(
    name = "wdg",
    about = "dG solver for Westervelt acoustics coupled to drug transport"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Manufactured-solution convergence study of the pressure alone.
    ConvergencePressure(RunArgs),
    /// Manufactured-solution convergence study of the coupled system.
    ConvergenceCoupled(RunArgs),
    /// Ultrasound-enhanced transport with the constant-diffusivity reference.
    Simulate(RunArgs),
    /// Quick invariant checks on small meshes.
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration; defaults to the built-in preset of the subcommand.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV and VTK files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Polynomial degree.
    #[arg(long)]
    degree: Option<usize>,
    /// Comma-separated cells per unit length, one per study level.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
    /// Constant of the step rule `dt = c h^(q+1)`.
    #[arg(long)]
    dt_constant: Option<f64>,
    /// Error measured by the studies: `total` (p - p_h) or `discrete` (I_h p - p_h).
    #[arg(long, value_parser = parse_error_mode)]
    error_mode: Option<ErrorMode>,
}

fn parse_error_mode(s: &str) -> std::result::Result<ErrorMode, String> {
    match s {
        "total" => Ok(ErrorMode::Total),
        "discrete" => Ok(ErrorMode::Discrete),
        _ => Err(format!(
            "unknown error mode '{s}', expected total or discrete"
        )),
    }
}

impl RunArgs {
    fn resolve(&self, kind: ExperimentKind) -> Result<SimulationConfig> {
        let mut cfg = match &self.config {
            Some(path) => SimulationConfig::from_toml(&fs::read_to_string(path)?)?,
            None => SimulationConfig::preset(kind, self.degree.unwrap_or(1)),
        };
        if cfg.experiment != kind {
            return Err(westervelt_dg::Error::Config(format!(
                "config describes {}, subcommand is {}",
                cfg.experiment.name(),
                kind.name()
            )));
        }
        if let Some(q) = self.degree {
            cfg.degree = q;
        }
        if let Some(l) = &self.levels {
            cfg.domain.levels = l.clone();
        }
        if let Some(c) = self.dt_constant {
            cfg.time.dt_constant = c;
            cfg.time.dt = None;
        }
        if let Some(m) = self.error_mode {
            cfg.output.error_mode = m;
        }
        if let Some(dir) = &self.out {
            cfg.output.dir = Some(dir.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn prepare_dir(cfg: &SimulationConfig) -> Result<Option<PathBuf>> {
    match &cfg.output.dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("config.toml"), cfg.to_toml())?;
            Ok(Some(dir.clone()))
        }
        None => Ok(None),
    }
}

fn write_study(dir: &Path, report: &StudyReport) -> Result<()> {
    write_csv(
        &dir.join("eoc.csv"),
        EocTable::CSV_HEADER,
        report
            .tables
            .iter()
            .flat_map(|t| t.csv_rows().lines().map(String::from).collect::<Vec<_>>()),
    )?;
    write_csv(
        &dir.join("levels.csv"),
        StudyReport::LEVELS_CSV_HEADER,
        report.levels_csv_rows(),
    )?;
    fs::write(dir.join("report.txt"), report.to_string())?;
    Ok(())
}

fn run_study(args: &RunArgs, kind: ExperimentKind) -> Result<bool> {
    let cfg = args.resolve(kind)?;
    let dir = prepare_dir(&cfg)?;
    let mut sinks: Vec<BufWriter<fs::File>> = Vec::new();
    if let Some(dir) = &dir {
        for level in &cfg.domain.levels {
            sinks.push(BufWriter::new(fs::File::create(
                dir.join(format!("steps_level{level}.csv")),
            )?));
        }
    }
    let mut iter = sinks.iter_mut();
    let report = convergence_study(&cfg, |_| -> StepLog<'_> {
        iter.next().map(|w| w as &mut dyn Write)
    })?;
    for s in &mut sinks {
        s.flush()?;
    }
    print!("{report}");
    if let Some(dir) = &dir {
        write_study(dir, &report)?;
    }
    Ok(report.failure.is_none())
}

fn run_simulate(args: &RunArgs) -> Result<bool> {
    let cfg = args.resolve(ExperimentKind::Simulate)?;
    let dir = prepare_dir(&cfg)?;
    let every = cfg.output.vtk_every;
    let mut steps_log = match &dir {
        Some(d) => Some(BufWriter::new(fs::File::create(d.join("steps.csv"))?)),
        None => None,
    };
    let mut snap = |n: usize,
                    space: &_,
                    p: &westervelt_dg::acoustics::AcousticState,
                    u: &[f64],
                    u_ref: &[f64]| {
        if let Some(d) = &dir {
            if every > 0 && n.is_multiple_of(every) {
                let title = format!("t = {:.6e}", p.t);
                write_vtk(
                    &d.join(format!("fields_{n:05}.vtk")),
                    space,
                    &title,
                    &[("p", &p.p), ("u", u), ("u_ref", u_ref)],
                )?;
            }
        }
        Ok(())
    };
    let report = simulate(
        &cfg,
        steps_log.as_mut().map(|w| w as &mut dyn Write),
        Some(&mut snap),
    )?;
    if let Some(w) = &mut steps_log {
        w.flush()?;
    }
    print!("{report}");
    if let Some(d) = &dir {
        write_csv(
            &d.join("delta_top.csv"),
            westervelt_dg::cli::SimulateReport::CSV_HEADER,
            report.csv_rows(),
        )?;
        fs::write(d.join("report.txt"), report.to_string())?;
    }
    Ok(true)
}

fn selftest() -> Result<bool> {
    let checks = westervelt_dg::cli::selftest::run_all();
    let mut ok = true;
    for c in &checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
        ok &= c.passed;
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::ConvergencePressure(a) => run_study(a, ExperimentKind::ConvergencePressure),
        Command::ConvergenceCoupled(a) => run_study(a, ExperimentKind::ConvergenceCoupled),
        Command::Simulate(a) => run_simulate(a),
        Command::Selftest => selftest(),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
