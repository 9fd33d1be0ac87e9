//! Backward Euler stepping of the convection-diffusion equation with a
//! pressure-dependent diffusivity, and the sequential pressure/concentration coupling.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::acoustics::{AcousticDiagnostics, AcousticSolver, AcousticState};
use crate::error::{Error, Result};
use crate::forms::{
    assemble_boundary_load, assemble_load, assemble_mass, assemble_sip, assemble_upwind,
    BoundarySubset, CoefficientField, PenaltySpec,
};
use crate::linalg::{CsrMatrix, LinearSolver, SolverSpec, Structure};
use crate::mesh::{BoundaryTag, Point};
use crate::mms::{BoundaryFn, ScalarFn};
use crate::space::{DgSpace, FieldVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportParams {
    pub d0: f64,
    pub d1: f64,
    /// Use `D = D0 (1 + D1 |p|)` instead of `D0 (1 + D1 p)`.
    #[serde(default)]
    pub abs_pressure: bool,
    /// Constant convective velocity.
    pub v: Point,
}

impl TransportParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.d0, self.d1, self.v[0], self.v[1]]
            .iter()
            .all(|x| x.is_finite());
        if !finite || self.d0 <= 0.0 {
            return Err(Error::Config(format!(
                "transport parameters need finite values and D0 > 0: {self:?}"
            )));
        }
        Ok(())
    }

    pub fn diffusivity(&self, p: f64) -> f64 {
        self.d0 * (1.0 + self.d1 * if self.abs_pressure { p.abs() } else { p })
    }

    /// `dD/dp`, with the subgradient 0 at `p = 0` for the absolute-value variant.
    pub fn diffusivity_slope(&self, p: f64) -> f64 {
        if self.abs_pressure {
            self.d0
                * self.d1
                * if p > 0.0 {
                    1.0
                } else if p < 0.0 {
                    -1.0
                } else {
                    0.0
                }
        } else {
            self.d0 * self.d1
        }
    }

    pub fn coefficient<'a>(&self, p: &'a [f64]) -> CoefficientField<'a> {
        if self.d1 == 0.0 {
            CoefficientField::Constant(self.d0)
        } else {
            CoefficientField::FieldAffine {
                base: self.d0,
                factor: self.d1,
                field: p,
                abs: self.abs_pressure,
            }
        }
    }
}

/// How the concentration penalty is chosen each step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum TransportPenalty {
    /// `sigma = 1`, `eta = factor q^2 D_max^2 / D_min` from the current diffusivity range.
    Scaled { factor: f64 },
    /// Fixed `sigma`, `eta`.
    Fixed { sigma: f64, eta: f64 },
}

impl Default for TransportPenalty {
    fn default() -> Self {
        TransportPenalty::Scaled { factor: 10.0 }
    }
}

impl TransportPenalty {
    pub fn resolve(&self, q: usize, d_min: f64, d_max: f64) -> PenaltySpec {
        match *self {
            TransportPenalty::Scaled { factor } => {
                let base = PenaltySpec::concentration(q, d_min, d_max);
                PenaltySpec {
                    sigma: base.sigma,
                    eta: base.eta * factor / 10.0,
                }
            }
            TransportPenalty::Fixed { sigma, eta } => PenaltySpec { sigma, eta },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportState {
    pub t: f64,
    pub u: FieldVector,
}

/// Volume source `f_u(x, t)` and inflow datum `g_in(x, n, t)`; `None` means zero.
#[derive(Clone, Default)]
pub struct TransportSources {
    pub volume: Option<ScalarFn>,
    pub inflow: Option<BoundaryFn>,
}

impl std::fmt::Debug for TransportSources {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransportSources")
            .field("volume", &self.volume.is_some())
            .field("inflow", &self.inflow.is_some())
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportDiagnostics {
    pub t: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub mass: f64,
    pub d_min: f64,
    pub d_max: f64,
    pub penalty_eta: f64,
    pub linear_iterations: usize,
}

impl TransportDiagnostics {
    pub const CSV_HEADER: &'static str = "t,u_min,u_max,total_mass,d_min,d_max";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            self.t, self.u_min, self.u_max, self.mass, self.d_min, self.d_max
        )
    }
}

pub struct TransportSolver {
    space: Arc<DgSpace>,
    params: TransportParams,
    penalty: TransportPenalty,
    sources: TransportSources,
    mass: CsrMatrix,
    upwind: CsrMatrix,
    solver: LinearSolver,
    /// SIP operator reused while the diffusivity is constant.
    constant_sip: Option<CsrMatrix>,
}

impl std::fmt::Debug for TransportSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransportSolver")
            .field("params", &self.params)
            .field("penalty", &self.penalty)
            .field("dofs", &self.space.num_dofs())
            .finish()
    }
}

impl TransportSolver {
    /// The space's mesh must be classified for `params.v`.
    pub fn new(
        space: Arc<DgSpace>,
        params: TransportParams,
        penalty: TransportPenalty,
        solver: SolverSpec,
        sources: TransportSources,
    ) -> Result<Self> {
        params.validate()?;
        let mass = assemble_mass(&space, CoefficientField::Constant(1.0))?;
        let upwind = assemble_upwind(&space, params.v)?;
        let solver = LinearSolver::new(solver, space.dofs_per_element())?;
        Ok(Self {
            space,
            params,
            penalty,
            sources,
            mass,
            upwind,
            solver,
            constant_sip: None,
        })
    }

    pub fn space(&self) -> &Arc<DgSpace> {
        &self.space
    }

    pub fn params(&self) -> &TransportParams {
        &self.params
    }

    pub fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    pub fn upwind(&self) -> &CsrMatrix {
        &self.upwind
    }

    /// `u^h(0) = I_h u0`.
    pub fn init_state(&self, t0: f64, u0: impl Fn(Point) -> f64) -> TransportState {
        TransportState {
            t: t0,
            u: self.space.interpolate(u0),
        }
    }

    /// `int_Omega u^h`.
    pub fn total_mass(&self, u: &[f64]) -> f64 {
        self.mass.spmv(u).expect("field matches space").iter().sum()
    }

    /// Extrema of `u^h` over lattice nodes and load quadrature points.
    pub fn bounds_monitor(&self, u: &[f64]) -> (f64, f64) {
        bounds_monitor(&self.space, u)
    }

    /// Diffusion operator for the pressure `p` with its penalty and diffusivity range.
    pub fn diffusion_operator(&mut self, p: &[f64]) -> Result<(CsrMatrix, PenaltySpec, f64, f64)> {
        let q = self.space.degree();
        if self.params.d1 == 0.0 {
            let d = self.params.d0;
            let pen = self.penalty.resolve(q, d, d);
            if self.constant_sip.is_none() {
                self.constant_sip = Some(assemble_sip(
                    &self.space,
                    CoefficientField::Constant(d),
                    pen,
                )?);
            }
            return Ok((self.constant_sip.clone().expect("set above"), pen, d, d));
        }
        let coef = self.params.coefficient(p);
        let (d_min, d_max) = coef.check_positive(&self.space)?;
        let pen = self.penalty.resolve(q, d_min, d_max);
        Ok((assemble_sip(&self.space, coef, pen)?, pen, d_min, d_max))
    }

    /// Solves `[M + dt (A_D(p) + B)] u^{n+1} = M u^n + dt (F^{n+1} - G_in^{n+1})`.
    pub fn backward_euler_step(
        &mut self,
        state: &TransportState,
        p_new: &[f64],
        dt: f64,
    ) -> Result<(TransportState, TransportDiagnostics)> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!(
                "time step must be positive, got {dt}"
            )));
        }
        self.space.check_field(p_new)?;
        let t1 = state.t + dt;
        let (a, pen, d_min, d_max) = self.diffusion_operator(p_new)?;
        let ab = a.add_scaled(1.0, &self.upwind)?;
        let lhs = self.mass.add_scaled(dt, &ab)?;

        let mut rhs = self.mass.spmv(&state.u)?;
        if let Some(f) = &self.sources.volume {
            let load = assemble_load(&self.space, |x| f(x, t1));
            rhs.iter_mut().zip(load).for_each(|(r, v)| *r += dt * v);
        }
        if let Some(g) = &self.sources.inflow {
            let gin = assemble_boundary_load(
                &self.space,
                |x, n| g(x, n, t1),
                BoundarySubset::Tagged(BoundaryTag::Inflow),
                Some(self.params.v),
            );
            rhs.iter_mut().zip(gin).for_each(|(r, v)| *r -= dt * v);
        }
        let mut u = state.u.to_vec();
        let report = self.solver.solve(&lhs, &rhs, &mut u, Structure::General)?;
        let (u_min, u_max) = self.bounds_monitor(&u);
        let mass = self.total_mass(&u);
        Ok((
            TransportState { t: t1, u: u.into() },
            TransportDiagnostics {
                t: t1,
                u_min,
                u_max,
                mass,
                d_min,
                d_max,
                penalty_eta: pen.eta,
                linear_iterations: report.iterations,
            },
        ))
    }
}

/// Extrema of a field over lattice nodes and load quadrature points.
pub fn bounds_monitor(space: &DgSpace, u: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in u {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    for e in 0..space.num_elements() {
        for v in space.values_at(u, e, space.load_table()) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    (lo, hi)
}

/// Pressure step followed by a concentration step with the new pressure.
pub fn coupled_step(
    acoustics: &mut AcousticSolver,
    transport: &mut TransportSolver,
    pressure: &AcousticState,
    concentration: &TransportState,
    dt: f64,
) -> Result<(
    AcousticState,
    TransportState,
    AcousticDiagnostics,
    TransportDiagnostics,
)> {
    if (pressure.t - concentration.t).abs() > 1e-12 * (1.0 + pressure.t.abs()) {
        return Err(Error::Config(format!(
            "coupled states out of sync: pressure at t={}, concentration at t={}",
            pressure.t, concentration.t
        )));
    }
    let (p1, ad) = acoustics.newmark_step(pressure, dt)?;
    let (u1, td) = transport.backward_euler_step(concentration, &p1.p, dt)?;
    Ok((p1, u1, ad, td))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;

    fn solver(v: Point, d1: f64, sources: TransportSources) -> TransportSolver {
        let mesh = Mesh::rectangle([0.0, 1.0], [0.0, 2.0], 3, 6)
            .unwrap()
            .classify_boundary(v);
        let space = Arc::new(DgSpace::new(Arc::new(mesh), 1).unwrap());
        TransportSolver::new(
            space,
            TransportParams {
                d0: 1.0,
                d1,
                abs_pressure: false,
                v,
            },
            TransportPenalty::default(),
            SolverSpec::Direct,
            sources,
        )
        .unwrap()
    }

    #[test]
    fn zero_data_stays_zero() {
        let mut s = solver([0.0, 1.0], 1.0, TransportSources::default());
        let st = s.init_state(0.0, |_| 0.0);
        let p = s.space().zeros();
        let (next, _) = s.backward_euler_step(&st, &p, 0.01).unwrap();
        assert!(next.u.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn constants_are_steady_without_convection() {
        let mut s = solver([0.0, 0.0], 0.0, TransportSources::default());
        let st = s.init_state(0.0, |_| 0.7);
        let p = s.space().zeros();
        let (next, d) = s.backward_euler_step(&st, &p, 0.1).unwrap();
        assert!(next.u.iter().all(|v| (v - 0.7).abs() < 1e-12));
        assert!((d.mass - 1.4).abs() < 1e-12);
    }

    #[test]
    fn mass_conserved_with_natural_boundaries() {
        let mut s = solver([0.0, 0.0], 0.5, TransportSources::default());
        let st = s.init_state(0.0, |x| (x[0] * 3.0).sin() + x[1]);
        let p = s.space().interpolate(|x| 0.3 * x[0]);
        let m0 = s.total_mass(&st.u);
        let (next, _) = s.backward_euler_step(&st, &p, 0.05).unwrap();
        assert!((s.total_mass(&next.u) - m0).abs() < 1e-10 * m0.abs());
    }

    #[test]
    fn inflow_adds_mass() {
        let sources = TransportSources {
            volume: None,
            inflow: Some(Arc::new(|_, _, _| 1.0)),
        };
        let mut s = solver([0.0, 1.0], 0.0, sources);
        let mut st = s.init_state(0.0, |_| 0.0);
        let p = s.space().zeros();
        let mut last = 0.0;
        for _ in 0..5 {
            let (next, d) = s.backward_euler_step(&st, &p, 0.01).unwrap();
            assert!(d.mass > last);
            last = d.mass;
            st = next;
        }
    }

    #[test]
    fn negative_diffusivity_is_a_model_error() {
        let mut s = solver([0.0, 1.0], 1.0, TransportSources::default());
        let st = s.init_state(0.0, |_| 0.0);
        let p = s.space().constant(-2.0);
        assert!(matches!(
            s.backward_euler_step(&st, &p, 0.01),
            Err(Error::Model(_))
        ));
    }

    #[test]
    fn bounds_monitor_examples() {
        let s = solver([0.0, 1.0], 0.0, TransportSources::default());
        let (lo, hi) = s.bounds_monitor(&s.space().constant(0.5));
        assert!((lo - 0.5).abs() < 1e-15 && (hi - 0.5).abs() < 1e-15);
        let u = s
            .space()
            .interpolate(|x| (std::f64::consts::PI * x[1]).cos());
        let (lo, hi) = s.bounds_monitor(&u);
        assert!((lo + 1.0).abs() < 0.1 && (hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diffusivity_variants() {
        let tp = TransportParams {
            d0: 2.0,
            d1: 0.5,
            abs_pressure: true,
            v: [0.0, 0.0],
        };
        assert_eq!(tp.diffusivity(-2.0), 4.0);
        assert_eq!(tp.diffusivity_slope(-2.0), -1.0);
        let tp = TransportParams {
            abs_pressure: false,
            ..tp
        };
        assert_eq!(tp.diffusivity(-2.0), 0.0);
        assert!(TransportParams { d0: 0.0, ..tp }.validate().is_err());
    }
}
