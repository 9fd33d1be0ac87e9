//! Newmark time stepping of the semi-discrete Westervelt equation with
//! absorbing boundary conditions.
//!
//! The nonlinearity is expanded as `((1 + kappa p) p_t)_t = (1 + kappa p) p_tt + kappa p_t^2`.
//! Each step runs a fixed-point loop on `a = p_tt^{n+1}` that lags both the
//! mass coefficient `1 + kappa p` and the quadratic term `kappa p_t^2`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{
    assemble_boundary_load, assemble_boundary_mass, assemble_load, assemble_mass, assemble_sip,
    assemble_westervelt_quadratic, BoundarySubset, CoefficientField, PenaltySpec,
};
use crate::linalg::{norm2, CsrMatrix, LinearSolver, SolverSpec, Structure};
use crate::mms::{
    discrete_norms, error_norms, BoundaryFn, ErrorNorms, ExactSolution, ScalarFn, TimeAccumulator,
};
use crate::space::{DgSpace, FieldVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcousticParams {
    /// Sound speed.
    pub c: f64,
    /// Sound diffusivity.
    pub beta: f64,
    /// Nonlinearity coefficient.
    pub kappa: f64,
    /// Absorbing boundary impedance.
    pub alpha: f64,
}

impl AcousticParams {
    /// `c > 0`, `beta >= 0`, `alpha >= 0`, all finite. The zero limits are
    /// admitted so that the lossless wave equation can be run.
    pub fn validate(&self) -> Result<()> {
        let finite = [self.c, self.beta, self.kappa, self.alpha]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.c <= 0.0 || self.beta < 0.0 || self.alpha < 0.0 {
            return Err(Error::Config(format!(
                "acoustic parameters need c > 0, beta >= 0, alpha >= 0: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NewmarkSpec {
    pub beta_n: f64,
    pub gamma_n: f64,
    /// Relative tolerance on the fixed-point update of `p_tt`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewmarkSpec {
    fn default() -> Self {
        Self {
            beta_n: 0.25,
            gamma_n: 0.5,
            tol: 1e-10,
            max_iter: 50,
        }
    }
}

impl NewmarkSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta_n > 0.0 && self.beta_n <= 0.5) || !(0.5..=1.0).contains(&self.gamma_n) {
            return Err(Error::Config(format!(
                "Newmark parameters need beta in (0, 0.5] and gamma in [0.5, 1]: {self:?}"
            )));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::Config(format!(
                "invalid fixed-point settings: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Newmark triple at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct AcousticState {
    pub t: f64,
    pub p: FieldVector,
    pub pdot: FieldVector,
    pub pddot: FieldVector,
}

/// Volume source `f_p(x, t)` and absorbing-boundary datum `g_abs(x, n, t)`; `None` means zero.
#[derive(Clone, Default)]
pub struct AcousticSources {
    pub volume: Option<ScalarFn>,
    pub boundary: Option<BoundaryFn>,
}

impl std::fmt::Debug for AcousticSources {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AcousticSources")
            .field("volume", &self.volume.is_some())
            .field("boundary", &self.boundary.is_some())
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcousticDiagnostics {
    pub t: f64,
    pub fixed_point_iterations: usize,
    /// Final fixed-point update `||a_{k+1} - a_k|| / max(1, ||a_{k+1}||)`.
    pub fixed_point_update: f64,
    pub max_kappa_p: f64,
    pub energy: f64,
    pub linear_iterations: usize,
}

impl AcousticDiagnostics {
    pub const CSV_HEADER: &'static str = "t,fixed_point_iters,max_kappa_p,energy";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.12e},{},{:.12e},{:.12e}",
            self.t, self.fixed_point_iterations, self.max_kappa_p, self.energy
        )
    }
}

struct StepOperators {
    dt: f64,
    /// `gamma dt (beta A + alpha B) + beta_N dt^2 c^2 A`
    lhs_const: CsrMatrix,
    /// `Lambda(p) + lhs_const` when `kappa = 0`.
    lhs_linear: Option<CsrMatrix>,
}

/// Owns the assembled operators of one discretization.
pub struct AcousticSolver {
    space: Arc<DgSpace>,
    params: AcousticParams,
    newmark: NewmarkSpec,
    sources: AcousticSources,
    stiffness: CsrMatrix,
    damping: CsrMatrix,
    mass: CsrMatrix,
    solver: LinearSolver,
    step_ops: Option<StepOperators>,
}

impl std::fmt::Debug for AcousticSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AcousticSolver")
            .field("params", &self.params)
            .field("newmark", &self.newmark)
            .field("dofs", &self.space.num_dofs())
            .finish()
    }
}

impl AcousticSolver {
    pub fn new(
        space: Arc<DgSpace>,
        params: AcousticParams,
        newmark: NewmarkSpec,
        penalty: PenaltySpec,
        solver: SolverSpec,
        sources: AcousticSources,
    ) -> Result<Self> {
        params.validate()?;
        newmark.validate()?;
        let stiffness = assemble_sip(&space, CoefficientField::Constant(1.0), penalty)?;
        let mut damping = stiffness.clone();
        damping.scale(params.beta);
        let damping = damping.add_scaled(
            params.alpha,
            &assemble_boundary_mass(&space, BoundarySubset::All),
        )?;
        let mass = assemble_mass(&space, CoefficientField::Constant(1.0))?;
        let solver = LinearSolver::new(solver, space.dofs_per_element())?;
        Ok(Self {
            space,
            params,
            newmark,
            sources,
            stiffness,
            damping,
            mass,
            solver,
            step_ops: None,
        })
    }

    pub fn space(&self) -> &Arc<DgSpace> {
        &self.space
    }

    pub fn params(&self) -> &AcousticParams {
        &self.params
    }

    /// SIP stiffness `A` (unit diffusivity).
    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    /// Unit-coefficient mass matrix.
    pub fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    /// `beta A + alpha B_Gamma`
    pub fn damping(&self) -> &CsrMatrix {
        &self.damping
    }

    /// `max |kappa p^h|` over lattice nodes and load quadrature points.
    pub fn max_kappa_p(&self, p: &[f64]) -> f64 {
        let k = self.params.kappa.abs();
        if k == 0.0 {
            return 0.0;
        }
        let table = self.space.load_table();
        let mut m = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for e in 0..self.space.num_elements() {
            m = self
                .space
                .values_at(p, e, table)
                .iter()
                .fold(m, |m, v| m.max(v.abs()));
        }
        k * m
    }

    fn check_nondegenerate(&self, t: f64, p: &[f64]) -> Result<f64> {
        let v = self.max_kappa_p(p);
        if !(v < 1.0) {
            return Err(Error::NonDegeneracy { t, value: v });
        }
        Ok(v)
    }

    /// `1/2 pdot^T M pdot + 1/2 c^2 p^T A p`
    pub fn energy(&self, state: &AcousticState) -> f64 {
        let c2 = self.params.c * self.params.c;
        0.5 * self
            .mass
            .quad_form(&state.pdot)
            .expect("field matches space")
            + 0.5
                * c2
                * self
                    .stiffness
                    .quad_form(&state.p)
                    .expect("field matches space")
    }

    fn lambda(&self, p: &[f64]) -> Result<CsrMatrix> {
        if self.params.kappa == 0.0 {
            return Ok(self.mass.clone());
        }
        assemble_mass(
            &self.space,
            CoefficientField::FieldAffine {
                base: 1.0,
                factor: self.params.kappa,
                field: p,
                abs: false,
            },
        )
    }

    /// `F(t) + G_abs(t)`
    fn source_load(&self, t: f64) -> Vec<f64> {
        let mut rhs = match &self.sources.volume {
            Some(f) => assemble_load(&self.space, |x| f(x, t)),
            None => vec![0.0; self.space.num_dofs()],
        };
        if let Some(g) = &self.sources.boundary {
            let gb =
                assemble_boundary_load(&self.space, |x, n| g(x, n, t), BoundarySubset::All, None);
            rhs.iter_mut().zip(gb).for_each(|(r, v)| *r += v);
        }
        rhs
    }

    /// Adds `-kappa N(pdot) - c^2 A p - (beta A + alpha B) pdot` to `rhs`.
    fn subtract_internal(
        &self,
        rhs: &mut [f64],
        p: &[f64],
        pdot_n: &[f64],
        pdot_d: &[f64],
    ) -> Result<()> {
        let c2 = self.params.c * self.params.c;
        let ap = self.stiffness.spmv(p)?;
        let dp = self.damping.spmv(pdot_d)?;
        for i in 0..rhs.len() {
            rhs[i] -= c2 * ap[i] + dp[i];
        }
        if self.params.kappa != 0.0 {
            let n = assemble_westervelt_quadratic(&self.space, pdot_n);
            for i in 0..rhs.len() {
                rhs[i] -= self.params.kappa * n[i];
            }
        }
        Ok(())
    }

    /// `p = p0`, `pdot = p1` (already discrete) and `p_tt` from the equation at `t0`.
    pub fn init_state_from(
        &mut self,
        t0: f64,
        p: FieldVector,
        pdot: FieldVector,
    ) -> Result<AcousticState> {
        self.space.check_field(&p)?;
        self.space.check_field(&pdot)?;
        self.check_nondegenerate(t0, &p)?;
        let mut rhs = self.source_load(t0);
        self.subtract_internal(&mut rhs, &p, &pdot, &pdot)?;
        let lambda = self.lambda(&p)?;
        let mut a = vec![0.0; rhs.len()];
        self.solver.solve(&lambda, &rhs, &mut a, Structure::Spd)?;
        Ok(AcousticState {
            t: t0,
            p,
            pdot,
            pddot: a.into(),
        })
    }

    /// Initial state from the interpolants of `p0` and `p1`.
    pub fn init_state(
        &mut self,
        t0: f64,
        p0: impl Fn(crate::mesh::Point) -> f64,
        p1: impl Fn(crate::mesh::Point) -> f64,
    ) -> Result<AcousticState> {
        let p = self.space.interpolate(p0);
        let pdot = self.space.interpolate(p1);
        self.init_state_from(t0, p, pdot)
    }

    fn step_operators(&mut self, dt: f64) -> Result<&StepOperators> {
        if self.step_ops.as_ref().is_none_or(|s| s.dt != dt) {
            let NewmarkSpec {
                beta_n, gamma_n, ..
            } = self.newmark;
            let c2 = self.params.c * self.params.c;
            let mut lhs_const = self.damping.clone();
            lhs_const.scale(gamma_n * dt);
            let lhs_const = lhs_const.add_scaled(beta_n * dt * dt * c2, &self.stiffness)?;
            let lhs_linear = if self.params.kappa == 0.0 {
                Some(self.mass.add_scaled(1.0, &lhs_const)?)
            } else {
                None
            };
            self.step_ops = Some(StepOperators {
                dt,
                lhs_const,
                lhs_linear,
            });
        }
        Ok(self.step_ops.as_ref().expect("set above"))
    }

    /// One Newmark step of size `dt`.
    pub fn newmark_step(
        &mut self,
        state: &AcousticState,
        dt: f64,
    ) -> Result<(AcousticState, AcousticDiagnostics)> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!(
                "time step must be positive, got {dt}"
            )));
        }
        let NewmarkSpec {
            beta_n,
            gamma_n,
            tol,
            max_iter,
        } = self.newmark;
        let t1 = state.t + dt;
        let n = self.space.num_dofs();
        let p_star: Vec<f64> = (0..n)
            .map(|i| {
                state.p[i]
                    + dt * state.pdot[i]
                    + 0.5 * dt * dt * (1.0 - 2.0 * beta_n) * state.pddot[i]
            })
            .collect();
        let pdot_star: Vec<f64> = (0..n)
            .map(|i| state.pdot[i] + dt * (1.0 - gamma_n) * state.pddot[i])
            .collect();

        // Right-hand side parts that do not depend on the iterate.
        let mut rhs_fixed = self.source_load(t1);
        {
            let c2 = self.params.c * self.params.c;
            let ap = self.stiffness.spmv(&p_star)?;
            let dp = self.damping.spmv(&pdot_star)?;
            for i in 0..n {
                rhs_fixed[i] -= c2 * ap[i] + dp[i];
            }
        }

        let linear = self.params.kappa == 0.0;
        let mut a = state.pddot.to_vec();
        let mut iterations = 0;
        let mut update;
        let mut linear_iterations = 0;
        loop {
            iterations += 1;
            let (lhs, rhs) = if linear {
                let ops = self.step_operators(dt)?;
                (
                    ops.lhs_linear.clone().expect("linear operator cached"),
                    rhs_fixed.clone(),
                )
            } else {
                let p_k: Vec<f64> = (0..n)
                    .map(|i| p_star[i] + beta_n * dt * dt * a[i])
                    .collect();
                let pdot_k: Vec<f64> = (0..n).map(|i| pdot_star[i] + gamma_n * dt * a[i]).collect();
                let lambda = self.lambda(&p_k)?;
                let nq = assemble_westervelt_quadratic(&self.space, &pdot_k);
                let mut rhs = rhs_fixed.clone();
                for i in 0..n {
                    rhs[i] -= self.params.kappa * nq[i];
                }
                let ops = self.step_operators(dt)?;
                (lambda.add_scaled(1.0, &ops.lhs_const)?, rhs)
            };
            let mut next = a.clone();
            let report = self.solver.solve(&lhs, &rhs, &mut next, Structure::Spd)?;
            linear_iterations += report.iterations;
            let diff: Vec<f64> = next.iter().zip(&a).map(|(x, y)| x - y).collect();
            update = norm2(&diff) / norm2(&next).max(1.0);
            a = next;
            if linear || update <= tol {
                break;
            }
            if iterations >= max_iter {
                return Err(Error::FixedPoint {
                    t: t1,
                    iterations,
                    update,
                });
            }
        }
        if linear {
            update = 0.0;
        }

        let p: Vec<f64> = (0..n)
            .map(|i| p_star[i] + beta_n * dt * dt * a[i])
            .collect();
        let pdot: Vec<f64> = (0..n).map(|i| pdot_star[i] + gamma_n * dt * a[i]).collect();
        let max_kappa_p = self.check_nondegenerate(t1, &p)?;
        let next = AcousticState {
            t: t1,
            p: p.into(),
            pdot: pdot.into(),
            pddot: a.into(),
        };
        let diag = AcousticDiagnostics {
            t: t1,
            fixed_point_iterations: iterations,
            fixed_point_update: update,
            max_kappa_p,
            energy: self.energy(&next),
            linear_iterations,
        };
        Ok((next, diag))
    }
}

/// Which discrete error the pressure tracker measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorMode {
    /// `p - p^h` by quadrature of the difference.
    #[default]
    Total,
    /// `I_h p - p^h`, a purely discrete field.
    Discrete,
}

/// Instantaneous components of the pressure error.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PressureErrorSample {
    pub t: f64,
    /// `||p_t - pdot^h||_Omega`
    pub pdot_l2: f64,
    /// `|p - p^h|_dG`
    pub p_dg: f64,
    /// `||p - p^h||_Gamma`
    pub p_boundary: f64,
    /// `|p_t - pdot^h|_dG`
    pub pdot_dg: f64,
    /// `||p_t - pdot^h||_Gamma`
    pub pdot_boundary: f64,
}

/// Running error functionals of the pressure against an exact solution.
#[derive(Debug, Clone, Default)]
pub struct PressureErrorTracker {
    pub mode: ErrorMode,
    pub p_dg: TimeAccumulator,
    pub pdot_l2: TimeAccumulator,
    /// Time integral of `beta |e_t|^2_dG`.
    pub beta_pdot_dg_sq: TimeAccumulator,
    /// Time integral of `||e_t||^2_Gamma`.
    pub pdot_boundary_sq: TimeAccumulator,
    pub last: PressureErrorSample,
}

impl PressureErrorTracker {
    pub fn new(mode: ErrorMode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    pub fn record(
        &mut self,
        space: &DgSpace,
        state: &AcousticState,
        exact: &ExactSolution,
        beta: f64,
    ) -> PressureErrorSample {
        let t = state.t;
        let (ep, ev): (ErrorNorms, ErrorNorms) = match self.mode {
            ErrorMode::Total => (
                error_norms(
                    space,
                    &state.p,
                    |x| (exact.p)(x, t),
                    |x| (exact.grad_p)(x, t),
                ),
                error_norms(
                    space,
                    &state.pdot,
                    |x| (exact.p_t)(x, t),
                    |x| (exact.grad_p_t)(x, t),
                ),
            ),
            ErrorMode::Discrete => {
                let ip = space.interpolate(|x| (exact.p)(x, t));
                let iv = space.interpolate(|x| (exact.p_t)(x, t));
                let dp: Vec<f64> = ip.iter().zip(state.p.iter()).map(|(a, b)| a - b).collect();
                let dv: Vec<f64> = iv
                    .iter()
                    .zip(state.pdot.iter())
                    .map(|(a, b)| a - b)
                    .collect();
                (discrete_norms(space, &dp), discrete_norms(space, &dv))
            }
        };
        let sample = PressureErrorSample {
            t,
            pdot_l2: ev.l2,
            p_dg: ep.dg,
            p_boundary: ep.boundary,
            pdot_dg: ev.dg,
            pdot_boundary: ev.boundary,
        };
        self.p_dg.push(t, sample.p_dg);
        self.pdot_l2.push(t, sample.pdot_l2);
        self.beta_pdot_dg_sq
            .push(t, beta * sample.pdot_dg * sample.pdot_dg);
        self.pdot_boundary_sq
            .push(t, sample.pdot_boundary * sample.pdot_boundary);
        self.last = sample;
        sample
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;

    fn setup(q: usize, params: AcousticParams, sources: AcousticSources) -> AcousticSolver {
        let mesh = Mesh::rectangle([0.0, 1.0], [0.0, 1.0], 3, 3).unwrap();
        let space = Arc::new(DgSpace::new(Arc::new(mesh), q).unwrap());
        AcousticSolver::new(
            space,
            params,
            NewmarkSpec::default(),
            PenaltySpec::pressure(q),
            SolverSpec::Direct,
            sources,
        )
        .unwrap()
    }

    const LINEAR: AcousticParams = AcousticParams {
        c: 1.0,
        beta: 0.1,
        kappa: 0.0,
        alpha: 1.0,
    };

    #[test]
    fn damping_operator_is_beta_a_plus_alpha_b() {
        let s = setup(
            1,
            AcousticParams {
                c: 1.0,
                beta: 0.3,
                kappa: 0.0,
                alpha: 2.0,
            },
            AcousticSources::default(),
        );
        let b = assemble_boundary_mass(s.space(), BoundarySubset::All);
        let mut expected = s.stiffness().clone();
        expected.scale(0.3);
        let expected = expected.add_scaled(2.0, &b).unwrap();
        let diff = s.damping().add_scaled(-1.0, &expected).unwrap();
        assert!(diff.max_abs() < 1e-13 * expected.max_abs());
    }

    #[test]
    fn zero_data_gives_zero_acceleration() {
        let mut s = setup(1, LINEAR, AcousticSources::default());
        let st = s.init_state(0.0, |_| 0.0, |_| 0.0).unwrap();
        assert!(st.pddot.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn unit_source_acceleration_solves_mass_system() {
        let sources = AcousticSources {
            volume: Some(Arc::new(|_, _| 1.0)),
            boundary: None,
        };
        let mut s = setup(2, LINEAR, sources);
        let st = s.init_state(0.0, |_| 0.0, |_| 0.0).unwrap();
        let f = assemble_load(s.space(), |_| 1.0);
        let r = s.mass().spmv(&st.pddot).unwrap();
        let res: f64 = r
            .iter()
            .zip(&f)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(res <= 1e-10 * norm2(&f));
        // The constant field solves M a = F.
        assert!(st.pddot.iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn linear_step_needs_one_iteration() {
        let mut s = setup(1, LINEAR, AcousticSources::default());
        let st = s
            .init_state(0.0, |x| (3.0 * x[0]).sin() * x[1], |_| 0.0)
            .unwrap();
        let (_, d) = s.newmark_step(&st, 0.01).unwrap();
        assert_eq!(d.fixed_point_iterations, 1);
    }

    #[test]
    fn nonlinear_step_converges_quickly() {
        let params = AcousticParams {
            c: 1.0,
            beta: 0.1,
            kappa: 0.1,
            alpha: 1.0,
        };
        let mut s = setup(1, params, AcousticSources::default());
        let st = s
            .init_state(0.0, |x| (3.0 * x[0]).sin() * x[1], |x| x[0])
            .unwrap();
        let (_, d) = s.newmark_step(&st, 0.01).unwrap();
        assert!(
            d.fixed_point_iterations >= 2 && d.fixed_point_iterations <= 6,
            "{d:?}"
        );
        assert!(d.fixed_point_update <= 1e-10);
    }

    #[test]
    fn degenerate_states_are_rejected() {
        let params = AcousticParams {
            c: 1.0,
            beta: 0.1,
            kappa: 1.0,
            alpha: 1.0,
        };
        let mut s = setup(1, params, AcousticSources::default());
        match s.init_state(0.0, |_| -1.5, |_| 0.0) {
            Err(Error::NonDegeneracy { value, .. }) => assert!((value - 1.5).abs() < 1e-12),
            other => panic!("expected non-degeneracy error, got {other:?}"),
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(AcousticParams { c: 0.0, ..LINEAR }.validate().is_err());
        assert!(AcousticParams {
            beta: -1.0,
            ..LINEAR
        }
        .validate()
        .is_err());
        assert!(NewmarkSpec {
            beta_n: 0.6,
            ..NewmarkSpec::default()
        }
        .validate()
        .is_err());
        assert!(NewmarkSpec {
            gamma_n: 0.4,
            ..NewmarkSpec::default()
        }
        .validate()
        .is_err());
        let mut s = setup(1, LINEAR, AcousticSources::default());
        let st = s.init_state(0.0, |_| 0.0, |_| 0.0).unwrap();
        assert!(s.newmark_step(&st, 0.0).is_err());
    }

    #[test]
    fn tracker_reproduces_static_polynomials() {
        let s = setup(2, LINEAR, AcousticSources::default());
        let mut ex = ExactSolution::zero();
        ex.p = Arc::new(|x, _| x[0] * x[1] + x[0]);
        ex.grad_p = Arc::new(|x, _| [x[1] + 1.0, x[0]]);
        let st = AcousticState {
            t: 0.0,
            p: s.space().interpolate(|x| x[0] * x[1] + x[0]),
            pdot: s.space().zeros(),
            pddot: s.space().zeros(),
        };
        for mode in [ErrorMode::Total, ErrorMode::Discrete] {
            let mut tr = PressureErrorTracker::new(mode);
            let e = tr.record(s.space(), &st, &ex, 0.1);
            assert!(e.p_dg < 1e-10 && e.pdot_l2 < 1e-10 && e.p_boundary < 1e-10);
        }
    }
}
