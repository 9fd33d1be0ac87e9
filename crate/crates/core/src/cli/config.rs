//! Run configuration. Unknown keys are rejected so that a misspelled
//! parameter never silently falls back to a default.

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::acoustics::{AcousticParams, ErrorMode, NewmarkSpec};
use crate::error::{Error, Result};
use crate::forms::PenaltySpec;
use crate::linalg::SolverSpec;
use crate::mesh::Point;
use crate::mms::ScalarFn;
use crate::transport::{TransportParams, TransportPenalty};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ConvergencePressure,
    ConvergenceCoupled,
    Simulate,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ConvergencePressure => "convergence-pressure",
            ExperimentKind::ConvergenceCoupled => "convergence-coupled",
            ExperimentKind::Simulate => "simulate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub x: [f64; 2],
    pub y: [f64; 2],
    /// Cells per direction for single-mesh runs.
    #[serde(default)]
    pub nx: Option<usize>,
    #[serde(default)]
    pub ny: Option<usize>,
    /// Cells per unit length for each level of a convergence study.
    #[serde(default)]
    pub levels: Vec<usize>,
}

impl DomainConfig {
    /// Cell counts for a study level: `level` cells per unit length.
    pub fn cells_for_level(&self, level: usize) -> (usize, usize) {
        let nx = (level as f64 * (self.x[1] - self.x[0])).round() as usize;
        let ny = (level as f64 * (self.y[1] - self.y[0])).round() as usize;
        (nx, ny)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_end: f64,
    /// Fixed step; takes precedence over the rule.
    #[serde(default)]
    pub dt: Option<f64>,
    /// `dt = dt_constant * h^(q+1)`, rounded down so that `t_end` is hit exactly.
    #[serde(default = "default_dt_constant")]
    pub dt_constant: f64,
}

fn default_dt_constant() -> f64 {
    0.04
}

impl TimeConfig {
    /// Step size and step count for mesh size `h` and degree `q`.
    pub fn steps_for(&self, h: f64, q: usize) -> (f64, usize) {
        let target = self.dt.unwrap_or(self.dt_constant * h.powi(q as i32 + 1));
        let steps = ((self.t_end / target) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        (self.t_end / steps as f64, steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportConfig {
    pub d0: f64,
    pub d1: f64,
    #[serde(default)]
    pub abs_pressure: bool,
    pub v: Point,
    #[serde(default)]
    pub penalty: TransportPenalty,
}

impl TransportConfig {
    pub fn params(&self) -> TransportParams {
        TransportParams {
            d0: self.d0,
            d1: self.d1,
            abs_pressure: self.abs_pressure,
            v: self.v,
        }
    }
}

/// Pressure penalty; `eta` defaults to `10 q^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PressurePenaltyConfig {
    #[serde(default = "one")]
    pub sigma: f64,
    #[serde(default)]
    pub eta: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl Default for PressurePenaltyConfig {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            eta: None,
        }
    }
}

impl PressurePenaltyConfig {
    pub fn resolve(&self, q: usize) -> PenaltySpec {
        PenaltySpec {
            sigma: self.sigma,
            eta: self.eta.unwrap_or(PenaltySpec::pressure(q).eta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default)]
    pub pressure: SolverSpec,
    #[serde(default)]
    pub transport: SolverSpec,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            pressure: SolverSpec::Direct,
            transport: SolverSpec::Direct,
        }
    }
}

/// Gaussian pulse `amplitude * exp(-|x - center|^2 / sigma0^2) * sin(2 pi frequency t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub amplitude: f64,
    pub center: Point,
    pub sigma0: f64,
    pub frequency: f64,
}

impl SourceConfig {
    pub fn field(&self) -> ScalarFn {
        let src = *self;
        let omega = 2.0 * std::f64::consts::PI * src.frequency;
        let inv_s2 = 1.0 / (src.sigma0 * src.sigma0);
        Arc::new(move |x: Point, t: f64| {
            let r2 = (x[0] - src.center[0]).powi(2) + (x[1] - src.center[1]).powi(2);
            src.amplitude * (-r2 * inv_s2).exp() * (omega * t).sin()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    /// VTK snapshot cadence in steps; 0 disables snapshots.
    #[serde(default = "default_vtk_every")]
    pub vtk_every: usize,
    #[serde(default)]
    pub error_mode: ErrorMode,
}

fn default_vtk_every() -> usize {
    10
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            vtk_every: default_vtk_every(),
            error_mode: ErrorMode::Total,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub experiment: ExperimentKind,
    pub degree: usize,
    pub domain: DomainConfig,
    pub time: TimeConfig,
    pub acoustic: AcousticParams,
    pub transport: TransportConfig,
    #[serde(default)]
    pub penalty: PressurePenaltyConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub newmark: NewmarkSpec,
    #[serde(default)]
    pub source: Option<SourceConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl SimulationConfig {
    /// Manufactured pressure study on `[0,1] x [0,2]` with `h = sqrt(2)/{8,12,16,20}`.
    pub fn pressure_study(q: usize) -> Self {
        Self {
            experiment: ExperimentKind::ConvergencePressure,
            degree: q,
            domain: DomainConfig {
                x: [0.0, 1.0],
                y: [0.0, 2.0],
                nx: None,
                ny: None,
                levels: vec![8, 12, 16, 20],
            },
            time: TimeConfig {
                t_end: 0.5,
                dt: None,
                dt_constant: default_dt_constant(),
            },
            acoustic: AcousticParams {
                c: 1.0,
                beta: 0.1,
                kappa: 0.1,
                alpha: 1.0,
            },
            transport: TransportConfig {
                d0: 1.0,
                d1: 1.0,
                abs_pressure: false,
                v: [0.0, 1.0],
                penalty: TransportPenalty::default(),
            },
            penalty: PressurePenaltyConfig::default(),
            solver: SolverConfig {
                pressure: SolverSpec::iterative(),
                transport: SolverSpec::iterative(),
            },
            newmark: NewmarkSpec::default(),
            source: None,
            output: OutputConfig::default(),
        }
    }

    /// Manufactured coupled study; same meshes and parameters as the pressure study.
    pub fn coupled_study(q: usize) -> Self {
        Self {
            experiment: ExperimentKind::ConvergenceCoupled,
            ..Self::pressure_study(q)
        }
    }

    /// Ultrasound-enhanced transport in a 1 cm square.
    pub fn simulate_default() -> Self {
        Self {
            experiment: ExperimentKind::Simulate,
            degree: 1,
            domain: DomainConfig {
                x: [0.0, 0.01],
                y: [0.0, 0.01],
                nx: Some(40),
                ny: Some(40),
                levels: Vec::new(),
            },
            time: TimeConfig {
                t_end: 5e-6,
                dt: Some(5e-8),
                dt_constant: default_dt_constant(),
            },
            acoustic: AcousticParams {
                c: 1500.0,
                beta: 1e-6,
                kappa: 1.0,
                alpha: 1500.0,
            },
            transport: TransportConfig {
                d0: 5.0,
                d1: 500.0,
                abs_pressure: true,
                v: [0.0, 1e-3],
                penalty: TransportPenalty::default(),
            },
            penalty: PressurePenaltyConfig::default(),
            solver: SolverConfig::default(),
            newmark: NewmarkSpec::default(),
            source: Some(SourceConfig {
                amplitude: 3e11,
                center: [0.005, 0.005],
                sigma0: 2e-4,
                frequency: 4e5,
            }),
            output: OutputConfig::default(),
        }
    }

    pub fn preset(kind: ExperimentKind, q: usize) -> Self {
        match kind {
            ExperimentKind::ConvergencePressure => Self::pressure_study(q),
            ExperimentKind::ConvergenceCoupled => Self::coupled_study(q),
            ExperimentKind::Simulate => Self {
                degree: q,
                ..Self::simulate_default()
            },
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=crate::space::MAX_DEGREE).contains(&self.degree) {
            return Err(Error::Config(format!(
                "degree {} outside 1..=3",
                self.degree
            )));
        }
        let d = &self.domain;
        if !(d.x[1] > d.x[0] && d.y[1] > d.y[0]) {
            return Err(Error::Config("domain ranges must be nondegenerate".into()));
        }
        match self.experiment {
            ExperimentKind::Simulate => {
                if d.nx.unwrap_or(0) == 0 || d.ny.unwrap_or(0) == 0 {
                    return Err(Error::Config(
                        "simulate needs domain.nx and domain.ny >= 1".into(),
                    ));
                }
                if self.source.is_none() {
                    return Err(Error::Config("simulate needs a [source] section".into()));
                }
            }
            _ => {
                if d.levels.len() < 2 {
                    return Err(Error::Config(
                        "a convergence study needs at least two levels".into(),
                    ));
                }
                if d.levels.windows(2).any(|w| w[1] <= w[0]) || d.levels[0] == 0 {
                    return Err(Error::Config(
                        "levels must be positive and strictly increasing".into(),
                    ));
                }
            }
        }
        let t = &self.time;
        if !(t.t_end > 0.0 && t.t_end.is_finite()) {
            return Err(Error::Config("time.t_end must be positive".into()));
        }
        if let Some(dt) = t.dt {
            if !(dt > 0.0 && dt <= t.t_end) {
                return Err(Error::Config(format!(
                    "time.dt = {dt} must lie in (0, t_end]"
                )));
            }
        }
        if !(t.dt_constant > 0.0 && t.dt_constant.is_finite()) {
            return Err(Error::Config("time.dt_constant must be positive".into()));
        }
        self.acoustic.validate()?;
        self.transport.params().validate()?;
        self.penalty.resolve(self.degree).validate()?;
        if let TransportPenalty::Fixed { sigma, eta } = self.transport.penalty {
            PenaltySpec { sigma, eta }.validate()?;
        }
        self.solver.pressure.validate()?;
        self.solver.transport.validate()?;
        self.newmark.validate()?;
        if let Some(s) = &self.source {
            if !(s.sigma0 > 0.0 && s.amplitude.is_finite() && s.frequency.is_finite()) {
                return Err(Error::Config(format!("invalid source: {s:?}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_roundtrip_through_toml() {
        for cfg in [
            SimulationConfig::pressure_study(1),
            SimulationConfig::coupled_study(2),
            SimulationConfig::simulate_default(),
        ] {
            cfg.validate().unwrap();
            let back = SimulationConfig::from_toml(&cfg.to_toml()).unwrap();
            assert_eq!(back, cfg);
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut text = SimulationConfig::simulate_default().to_toml();
        text = text.replace("[acoustic]\n", "[acoustic]\nsped = 3.0\n");
        assert!(matches!(
            SimulationConfig::from_toml(&text),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn physical_constraints_checked_at_parse_time() {
        let mut cfg = SimulationConfig::simulate_default();
        cfg.acoustic.c = -1.0;
        assert!(SimulationConfig::from_toml(&cfg.to_toml()).is_err());
        let mut cfg = SimulationConfig::simulate_default();
        cfg.time.dt = Some(1.0);
        assert!(cfg.validate().is_err());
        let mut cfg = SimulationConfig::pressure_study(1);
        cfg.domain.levels = vec![8];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn step_rule() {
        let t = TimeConfig {
            t_end: 0.5,
            dt: None,
            dt_constant: 0.04,
        };
        let h = 2f64.sqrt() / 8.0;
        let (dt, n) = t.steps_for(h, 1);
        assert!((dt * n as f64 - 0.5).abs() < 1e-14);
        assert!(dt <= 0.04 * h * h);
        let t = TimeConfig {
            t_end: 5e-6,
            dt: Some(5e-8),
            dt_constant: 0.04,
        };
        assert_eq!(t.steps_for(1.0, 1).1, 100);
        let cells = DomainConfig {
            x: [0.0, 1.0],
            y: [0.0, 2.0],
            nx: None,
            ny: None,
            levels: vec![],
        };
        assert_eq!(cells.cells_for_level(12), (12, 24));
    }
}
