//! Experiment drivers: manufactured convergence studies and the realistic
//! ultrasound-enhanced transport run.

use std::fmt;
use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::acoustics::{
    AcousticDiagnostics, AcousticSolver, AcousticSources, AcousticState, ErrorMode,
    PressureErrorTracker,
};
use crate::error::{Error, Result};
use crate::forms::BoundarySubset;
use crate::mesh::{Mesh, Side};
use crate::mms::{
    boundary_forcing_pressure, boundary_integral, discrete_norms, eoc, error_norms,
    forcing_concentration, forcing_pressure, inflow_data, relative_change_top,
    strict_outflow_integral, EocTable, ExactSolution, TimeAccumulator,
};
use crate::space::DgSpace;
use crate::transport::{
    bounds_monitor, TransportDiagnostics, TransportParams, TransportSolver, TransportSources,
};

use super::config::{ExperimentKind, SimulationConfig};

/// Optional per-step CSV sink; the header is written by the driver.
pub type StepLog<'a> = Option<&'a mut dyn Write>;

/// Wall-clock time per phase.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timings {
    /// Mesh, space and operator assembly.
    pub setup: Duration,
    /// Time stepping, including per-step assembly and solves.
    pub stepping: Duration,
    /// Error norm evaluation.
    pub norms: Duration,
}

impl Timings {
    pub fn total(&self) -> Duration {
        self.setup + self.stepping + self.norms
    }
}

/// Outcome of one mesh level of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub level: usize,
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub dt: f64,
    pub steps: usize,
    pub dofs: usize,
    /// Named error functionals in reporting order.
    pub errors: Vec<(String, f64)>,
    pub max_kappa_p: f64,
    pub max_fixed_point_iterations: usize,
    pub max_linear_iterations: usize,
    pub timings: Timings,
}

impl LevelReport {
    pub fn error(&self, name: &str) -> Option<f64> {
        self.errors.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// A convergence study: completed levels, their tables, and the failure if one stopped it.
#[derive(Debug)]
pub struct StudyReport {
    pub experiment: ExperimentKind,
    pub config: SimulationConfig,
    pub levels: Vec<LevelReport>,
    pub tables: Vec<EocTable>,
    /// Level and error of the first failing level; later levels are not attempted.
    pub failure: Option<(usize, Error)>,
}

impl StudyReport {
    pub fn table(&self, name: &str) -> Option<&EocTable> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub const LEVELS_CSV_HEADER: &'static str =
        "level,nx,ny,h,dt,steps,dofs,max_kappa_p,max_fixed_point_iters,max_linear_iters,setup_s,stepping_s,norms_s,status";

    /// One row per level; a failed level is marked in the status column.
    pub fn levels_csv_rows(&self) -> Vec<String> {
        let mut rows: Vec<String> = self
            .levels
            .iter()
            .map(|l| {
                format!(
                    "{},{},{},{:.15e},{:.15e},{},{},{:.6e},{},{},{:.3},{:.3},{:.3},ok",
                    l.level,
                    l.nx,
                    l.ny,
                    l.h,
                    l.dt,
                    l.steps,
                    l.dofs,
                    l.max_kappa_p,
                    l.max_fixed_point_iterations,
                    l.max_linear_iterations,
                    l.timings.setup.as_secs_f64(),
                    l.timings.stepping.as_secs_f64(),
                    l.timings.norms.as_secs_f64()
                )
            })
            .collect();
        if let Some((level, err)) = &self.failure {
            let msg = err.to_string().replace([',', '\n'], ";");
            rows.push(format!("{level},,,,,,,,,,,,,failed: {msg}"));
        }
        rows
    }
}

impl fmt::Display for StudyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {}", self.experiment.name())?;
        for line in self.config.to_toml().lines() {
            writeln!(f, "#   {line}")?;
        }
        for l in &self.levels {
            writeln!(
                f,
                "level {:>3}: h = {:.6e}, dt = {:.3e}, steps = {}, dofs = {}, max|kappa p| = {:.3e}, max fp iters = {}, {:.1}s",
                l.level,
                l.h,
                l.dt,
                l.steps,
                l.dofs,
                l.max_kappa_p,
                l.max_fixed_point_iterations,
                l.timings.total().as_secs_f64()
            )?;
        }
        for t in &self.tables {
            write!(f, "{t}")?;
        }
        if let Some((level, err)) = &self.failure {
            writeln!(f, "FAILED at level {level}: {err}")?;
        }
        Ok(())
    }
}

fn at_step(experiment: ExperimentKind, step: usize, t: f64) -> impl FnOnce(Error) -> Error {
    move |e| Error::AtStep {
        experiment: experiment.name().to_string(),
        step,
        t,
        source: Box::new(e),
    }
}

fn level_space(cfg: &SimulationConfig, level: usize) -> Result<(Arc<DgSpace>, usize, usize)> {
    let (nx, ny) = cfg.domain.cells_for_level(level);
    let mesh =
        Mesh::rectangle(cfg.domain.x, cfg.domain.y, nx, ny)?.classify_boundary(cfg.transport.v);
    Ok((Arc::new(DgSpace::new(Arc::new(mesh), cfg.degree)?), nx, ny))
}

fn manufactured_acoustics(
    cfg: &SimulationConfig,
    space: &Arc<DgSpace>,
    exact: &ExactSolution,
) -> Result<AcousticSolver> {
    AcousticSolver::new(
        space.clone(),
        cfg.acoustic,
        cfg.newmark,
        cfg.penalty.resolve(cfg.degree),
        cfg.solver.pressure,
        AcousticSources {
            volume: Some(forcing_pressure(exact, &cfg.acoustic)),
            boundary: Some(boundary_forcing_pressure(exact, &cfg.acoustic)),
        },
    )
}

fn log_line(log: &mut StepLog<'_>, line: impl FnOnce() -> String) -> Result<()> {
    if let Some(w) = log.as_mut() {
        writeln!(w, "{}", line())?;
    }
    Ok(())
}

const PRESSURE_LOG_HEADER: &str = "p_dg_error,pdot_l2_error";

/// Acoustics-only run of one level against the manufactured pressure.
///
/// Reports `max_t |p - p^h|_dG` as `p_dg` and `max_t ||p_t - pdot^h||` as `pdot_l2`.
pub fn run_pressure_level(
    cfg: &SimulationConfig,
    level: usize,
    mut log: StepLog<'_>,
) -> Result<LevelReport> {
    let kind = ExperimentKind::ConvergencePressure;
    let start = Instant::now();
    let exact = ExactSolution::academic();
    let (space, nx, ny) = level_space(cfg, level)?;
    let h = space.mesh().mesh_size;
    let (dt, steps) = cfg.time.steps_for(h, cfg.degree);
    let mut ac = manufactured_acoustics(cfg, &space, &exact)?;
    let mut state = ac
        .init_state(0.0, |x| (exact.p)(x, 0.0), |x| (exact.p_t)(x, 0.0))
        .map_err(at_step(kind, 0, 0.0))?;
    let mut timings = Timings {
        setup: start.elapsed(),
        ..Timings::default()
    };
    log_line(&mut log, || {
        format!("{},{PRESSURE_LOG_HEADER}", AcousticDiagnostics::CSV_HEADER)
    })?;

    let mut tracker = PressureErrorTracker::new(cfg.output.error_mode);
    let mut max_kappa_p = ac.max_kappa_p(&state.p);
    let (mut max_fp, mut max_lin) = (0, 0);
    let clock = Instant::now();
    tracker.record(&space, &state, &exact, cfg.acoustic.beta);
    timings.norms += clock.elapsed();

    for n in 1..=steps {
        let clock = Instant::now();
        let (next, diag) = ac
            .newmark_step(&state, dt)
            .map_err(at_step(kind, n, state.t + dt))?;
        timings.stepping += clock.elapsed();
        let clock = Instant::now();
        let sample = tracker.record(&space, &next, &exact, cfg.acoustic.beta);
        timings.norms += clock.elapsed();
        max_kappa_p = max_kappa_p.max(diag.max_kappa_p);
        max_fp = max_fp.max(diag.fixed_point_iterations);
        max_lin = max_lin.max(diag.linear_iterations);
        log_line(&mut log, || {
            format!(
                "{},{:.12e},{:.12e}",
                diag.csv_row(),
                sample.p_dg,
                sample.pdot_l2
            )
        })?;
        state = next;
    }

    Ok(LevelReport {
        level,
        nx,
        ny,
        h,
        dt,
        steps,
        dofs: space.num_dofs(),
        errors: vec![
            ("p_dg".into(), tracker.p_dg.max),
            ("pdot_l2".into(), tracker.pdot_l2.max),
        ],
        max_kappa_p,
        max_fixed_point_iterations: max_fp,
        max_linear_iterations: max_lin,
        timings,
    })
}

/// Coupled run of one level against the manufactured pressure and concentration.
///
/// Reports `(int_0^T |u - u^h|_dG^2 dt)^(1/2)` (left rectangle) as `u_dg`,
/// `max_t ||u - u^h||` as `u_l2`, and the pressure functionals.
pub fn run_coupled_level(
    cfg: &SimulationConfig,
    level: usize,
    mut log: StepLog<'_>,
) -> Result<LevelReport> {
    let kind = ExperimentKind::ConvergenceCoupled;
    let start = Instant::now();
    let exact = ExactSolution::academic();
    let (space, nx, ny) = level_space(cfg, level)?;
    let h = space.mesh().mesh_size;
    let (dt, steps) = cfg.time.steps_for(h, cfg.degree);
    let tp = cfg.transport.params();
    let mut ac = manufactured_acoustics(cfg, &space, &exact)?;
    let mut tr = TransportSolver::new(
        space.clone(),
        tp,
        cfg.transport.penalty,
        cfg.solver.transport,
        TransportSources {
            volume: Some(forcing_concentration(&exact, &tp)),
            inflow: Some(inflow_data(&exact, &tp)),
        },
    )?;
    let mut p_state = ac
        .init_state(0.0, |x| (exact.p)(x, 0.0), |x| (exact.p_t)(x, 0.0))
        .map_err(at_step(kind, 0, 0.0))?;
    let mut u_state = tr.init_state(0.0, |x| (exact.u)(x, 0.0));
    let mut timings = Timings {
        setup: start.elapsed(),
        ..Timings::default()
    };
    log_line(&mut log, || {
        format!(
            "{},{},{PRESSURE_LOG_HEADER},u_dg_error,u_l2_error",
            AcousticDiagnostics::CSV_HEADER,
            &TransportDiagnostics::CSV_HEADER[2..]
        )
    })?;

    let mut tracker = PressureErrorTracker::new(cfg.output.error_mode);
    let mut u_dg_sq = TimeAccumulator::new();
    let mut u_l2 = TimeAccumulator::new();
    let record_u = |u: &[f64], t: f64, dg: &mut TimeAccumulator, l2: &mut TimeAccumulator| {
        let e = match cfg.output.error_mode {
            ErrorMode::Total => {
                error_norms(&space, u, |x| (exact.u)(x, t), |x| (exact.grad_u)(x, t))
            }
            ErrorMode::Discrete => {
                let iu = space.interpolate(|x| (exact.u)(x, t));
                let d: Vec<f64> = iu.iter().zip(u).map(|(a, b)| a - b).collect();
                discrete_norms(&space, &d)
            }
        };
        dg.push(t, e.dg * e.dg);
        l2.push(t, e.l2);
        e
    };
    let clock = Instant::now();
    tracker.record(&space, &p_state, &exact, cfg.acoustic.beta);
    record_u(&u_state.u, 0.0, &mut u_dg_sq, &mut u_l2);
    timings.norms += clock.elapsed();
    let mut max_kappa_p = ac.max_kappa_p(&p_state.p);
    let (mut max_fp, mut max_lin) = (0, 0);

    for n in 1..=steps {
        let clock = Instant::now();
        let t1 = p_state.t + dt;
        let (p1, ad) = ac
            .newmark_step(&p_state, dt)
            .map_err(at_step(kind, n, t1))?;
        let (u1, td) = tr
            .backward_euler_step(&u_state, &p1.p, dt)
            .map_err(at_step(kind, n, t1))?;
        timings.stepping += clock.elapsed();
        let clock = Instant::now();
        let ps = tracker.record(&space, &p1, &exact, cfg.acoustic.beta);
        let ue = record_u(&u1.u, u1.t, &mut u_dg_sq, &mut u_l2);
        timings.norms += clock.elapsed();
        max_kappa_p = max_kappa_p.max(ad.max_kappa_p);
        max_fp = max_fp.max(ad.fixed_point_iterations);
        max_lin = max_lin.max(ad.linear_iterations).max(td.linear_iterations);
        log_line(&mut log, || {
            let tr_row = td.csv_row();
            let tr_tail = tr_row.split_once(',').map(|(_, r)| r).unwrap_or("");
            format!(
                "{},{tr_tail},{:.12e},{:.12e},{:.12e},{:.12e}",
                ad.csv_row(),
                ps.p_dg,
                ps.pdot_l2,
                ue.dg,
                ue.l2
            )
        })?;
        p_state = p1;
        u_state = u1;
    }

    Ok(LevelReport {
        level,
        nx,
        ny,
        h,
        dt,
        steps,
        dofs: space.num_dofs(),
        errors: vec![
            ("u_dg".into(), u_dg_sq.left_rectangle.sqrt()),
            ("u_l2".into(), u_l2.max),
            ("p_dg".into(), tracker.p_dg.max),
            ("pdot_l2".into(), tracker.pdot_l2.max),
        ],
        max_kappa_p,
        max_fixed_point_iterations: max_fp,
        max_linear_iterations: max_lin,
        timings,
    })
}

/// Runs every level in order; a failing level stops the study and is reported.
///
/// `log_for(level)` supplies the per-step sink of each level.
pub fn convergence_study<'a>(
    cfg: &SimulationConfig,
    mut log_for: impl FnMut(usize) -> StepLog<'a>,
) -> Result<StudyReport> {
    cfg.validate()?;
    let runner = match cfg.experiment {
        ExperimentKind::ConvergencePressure => run_pressure_level,
        ExperimentKind::ConvergenceCoupled => run_coupled_level,
        ExperimentKind::Simulate => {
            return Err(Error::Config("simulate is not a convergence study".into()));
        }
    };
    let mut levels: Vec<LevelReport> = Vec::new();
    let mut failure = None;
    for &level in &cfg.domain.levels {
        match runner(cfg, level, log_for(level)) {
            Ok(r) => levels.push(r),
            Err(e) => {
                failure = Some((level, e));
                break;
            }
        }
    }
    let mut tables = Vec::new();
    if levels.len() >= 2 {
        let hs: Vec<f64> = levels.iter().map(|l| l.h).collect();
        for (name, _) in &levels[0].errors {
            let errs: Vec<f64> = levels
                .iter()
                .map(|l| l.error(name).unwrap_or(f64::NAN))
                .collect();
            tables.push(eoc(name, &errs, &hs)?);
        }
    }
    Ok(StudyReport {
        experiment: cfg.experiment,
        config: cfg.clone(),
        levels,
        tables,
        failure,
    })
}

/// Time series of the realistic run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulateReport {
    pub config: SimulationConfig,
    pub h: f64,
    pub dt: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    /// `int_top u^h ds` of the pressure-coupled run.
    pub top: Vec<f64>,
    /// `int_top u^h ds` of the `D = D0` reference run.
    pub top_ref: Vec<f64>,
    /// `int u^h ds` of the reference run over faces with `v . n > 0`.
    pub outflow_ref: Vec<f64>,
    /// Relative change at the top boundary.
    pub delta: Vec<f64>,
    pub max_kappa_p: Vec<f64>,
    pub max_fixed_point_iterations: usize,
    /// Extrema of the coupled concentration over the whole run.
    pub u_min: f64,
    pub u_max: f64,
    pub timings: Timings,
}

impl SimulateReport {
    pub const CSV_HEADER: &'static str = "t,delta_top,top,top_ref,outflow_ref,max_kappa_p";

    pub fn csv_rows(&self) -> Vec<String> {
        (0..self.times.len())
            .map(|i| {
                format!(
                    "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                    self.times[i],
                    self.delta[i],
                    self.top[i],
                    self.top_ref[i],
                    self.outflow_ref[i],
                    self.max_kappa_p[i]
                )
            })
            .collect()
    }

    /// Index and value of the largest relative change.
    pub fn peak(&self) -> (usize, f64) {
        self.delta
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |a, (i, v)| if v > a.1 { (i, v) } else { a },
            )
    }
}

impl fmt::Display for SimulateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# simulate")?;
        for line in self.config.to_toml().lines() {
            writeln!(f, "#   {line}")?;
        }
        writeln!(
            f,
            "# nx, ny read as cells per direction: {} triangles",
            2 * self.config.domain.nx.unwrap_or(0) * self.config.domain.ny.unwrap_or(0)
        )?;
        let (i, peak) = self.peak();
        writeln!(
            f,
            "h = {:.6e}, dt = {:.3e}, steps = {}",
            self.h, self.dt, self.steps
        )?;
        writeln!(
            f,
            "peak relative change at top: {:.6} at t = {:.6e}",
            peak, self.times[i]
        )?;
        writeln!(
            f,
            "max |kappa p| = {:.6e}, max fp iters = {}, u range [{:.6e}, {:.6e}], {:.1}s",
            self.max_kappa_p.iter().copied().fold(0.0, f64::max),
            self.max_fixed_point_iterations,
            self.u_min,
            self.u_max,
            self.timings.total().as_secs_f64()
        )
    }
}

/// Snapshot callback: `(step, space, p, u, u_ref)`.
pub type SnapshotSink<'a> =
    Option<&'a mut dyn FnMut(usize, &DgSpace, &AcousticState, &[f64], &[f64]) -> Result<()>>;

/// Pressure-coupled transport and its `D = D0` reference, driven by one acoustic run.
pub fn simulate(
    cfg: &SimulationConfig,
    mut log: StepLog<'_>,
    mut snapshot: SnapshotSink<'_>,
) -> Result<SimulateReport> {
    cfg.validate()?;
    if cfg.experiment != ExperimentKind::Simulate {
        return Err(Error::Config(format!(
            "{} is not a simulate config",
            cfg.experiment.name()
        )));
    }
    let kind = ExperimentKind::Simulate;
    let start = Instant::now();
    let d = &cfg.domain;
    let (nx, ny) = (d.nx.unwrap_or(0), d.ny.unwrap_or(0));
    let tp = cfg.transport.params();
    let mesh = Mesh::rectangle(d.x, d.y, nx, ny)?.classify_boundary(tp.v);
    let space = Arc::new(DgSpace::new(Arc::new(mesh), cfg.degree)?);
    let h = space.mesh().mesh_size;
    let (dt, steps) = cfg.time.steps_for(h, cfg.degree);

    let src = cfg
        .source
        .ok_or_else(|| Error::Config("simulate needs a [source] section".into()))?;
    let mut ac = AcousticSolver::new(
        space.clone(),
        cfg.acoustic,
        cfg.newmark,
        cfg.penalty.resolve(cfg.degree),
        cfg.solver.pressure,
        AcousticSources {
            volume: Some(src.field()),
            boundary: None,
        },
    )?;
    let inflow = TransportSources {
        volume: None,
        inflow: Some(Arc::new(|_, _, _| 1.0)),
    };
    let ref_params = TransportParams { d1: 0.0, ..tp };
    let mut tr = TransportSolver::new(
        space.clone(),
        tp,
        cfg.transport.penalty,
        cfg.solver.transport,
        inflow.clone(),
    )?;
    let mut tr_ref = TransportSolver::new(
        space.clone(),
        ref_params,
        cfg.transport.penalty,
        cfg.solver.transport,
        inflow,
    )?;

    let zero = space.zeros();
    let mut p_state = ac
        .init_state_from(0.0, zero.clone(), zero)
        .map_err(at_step(kind, 0, 0.0))?;
    let mut u = tr.init_state(0.0, |_| 0.0);
    let mut u_ref = tr_ref.init_state(0.0, |_| 0.0);
    let mut timings = Timings {
        setup: start.elapsed(),
        ..Timings::default()
    };

    let top_of = |u: &[f64]| boundary_integral(&space, u, BoundarySubset::Side(Side::Top));
    let outflow_of = |u: &[f64]| strict_outflow_integral(&space, u, tp.v);
    let mut times = vec![0.0];
    let mut top = vec![top_of(&u.u)];
    let mut top_ref = vec![top_of(&u_ref.u)];
    let mut outflow_ref = vec![outflow_of(&u_ref.u)];
    let mut kp = vec![ac.max_kappa_p(&p_state.p)];
    let (mut u_min, mut u_max) = bounds_monitor(&space, &u.u);
    let mut max_fp = 0;
    log_line(&mut log, || {
        format!(
            "{},{},top,top_ref,outflow_ref",
            AcousticDiagnostics::CSV_HEADER,
            &TransportDiagnostics::CSV_HEADER[2..]
        )
    })?;
    if let Some(s) = snapshot.as_mut() {
        s(0, &space, &p_state, &u.u, &u_ref.u)?;
    }

    for n in 1..=steps {
        let clock = Instant::now();
        let t1 = p_state.t + dt;
        let (p1, ad) = ac
            .newmark_step(&p_state, dt)
            .map_err(at_step(kind, n, t1))?;
        let (u1, td) = tr
            .backward_euler_step(&u, &p1.p, dt)
            .map_err(at_step(kind, n, t1))?;
        let (r1, _) = tr_ref
            .backward_euler_step(&u_ref, &p1.p, dt)
            .map_err(at_step(kind, n, t1))?;
        timings.stepping += clock.elapsed();
        let clock = Instant::now();
        times.push(t1);
        top.push(top_of(&u1.u));
        top_ref.push(top_of(&r1.u));
        outflow_ref.push(outflow_of(&r1.u));
        kp.push(ad.max_kappa_p);
        timings.norms += clock.elapsed();
        max_fp = max_fp.max(ad.fixed_point_iterations);
        u_min = u_min.min(td.u_min);
        u_max = u_max.max(td.u_max);
        log_line(&mut log, || {
            let tr_row = td.csv_row();
            let tr_tail = tr_row.split_once(',').map(|(_, r)| r).unwrap_or("");
            format!(
                "{},{tr_tail},{:.12e},{:.12e},{:.12e}",
                ad.csv_row(),
                top[n],
                top_ref[n],
                outflow_ref[n]
            )
        })?;
        p_state = p1;
        u = u1;
        u_ref = r1;
        if let Some(s) = snapshot.as_mut() {
            s(n, &space, &p_state, &u.u, &u_ref.u)?;
        }
    }

    let delta = relative_change_top(&top, &top_ref, &outflow_ref)?;
    Ok(SimulateReport {
        config: cfg.clone(),
        h,
        dt,
        steps,
        times,
        top,
        top_ref,
        outflow_ref,
        delta,
        max_kappa_p: kp,
        max_fixed_point_iterations: max_fp,
        u_min,
        u_max,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_pressure() -> SimulationConfig {
        let mut cfg = SimulationConfig::pressure_study(1);
        cfg.domain.levels = vec![2, 3];
        cfg.time.t_end = 0.05;
        cfg.time.dt = Some(0.01);
        cfg
    }

    #[test]
    fn pressure_study_produces_tables() {
        let cfg = tiny_pressure();
        let mut buf: Vec<u8> = Vec::new();
        let mut first = Some(&mut buf);
        let report =
            convergence_study(&cfg, |_| first.take().map(|b| b as &mut dyn Write)).unwrap();
        assert!(report.failure.is_none());
        assert_eq!(report.levels.len(), 2);
        assert_eq!(report.levels[0].steps, 5);
        assert!(report.table("p_dg").is_some() && report.table("pdot_l2").is_some());
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.starts_with("t,fixed_point_iters"));
    }

    #[test]
    fn failing_level_is_reported_not_propagated() {
        let mut cfg = tiny_pressure();
        cfg.acoustic.kappa = 2.0;
        let report = convergence_study(&cfg, |_| None).unwrap();
        let (level, err) = report.failure.as_ref().unwrap();
        assert_eq!(*level, 2);
        assert!(matches!(err, Error::AtStep { .. }));
        assert!(report.levels_csv_rows().last().unwrap().contains("failed"));
    }

    #[test]
    fn zero_amplitude_gives_zero_relative_change() {
        let mut cfg = SimulationConfig::simulate_default();
        cfg.domain.nx = Some(6);
        cfg.domain.ny = Some(6);
        cfg.time.t_end = 5e-7;
        if let Some(s) = cfg.source.as_mut() {
            s.amplitude = 0.0;
        }
        let r = simulate(&cfg, None, None).unwrap();
        assert_eq!(r.times.len(), 11);
        assert!(r.delta.iter().all(|d| d.abs() < 1e-12));
    }
}
