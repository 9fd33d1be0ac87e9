//! Invariant checks cheap enough to run from the command line.

use std::sync::Arc;

use crate::acoustics::{AcousticParams, AcousticSolver, AcousticSources, NewmarkSpec};
use crate::error::Result;
use crate::forms::{
    assemble_sip, assemble_upwind, coercivity_threshold, dg_seminorm_sq, upwind_identity_terms,
    CoefficientField, PenaltySpec,
};
use crate::linalg::SolverSpec;
use crate::mesh::{Mesh, Point};
use crate::mms::{forcing_concentration, forcing_pressure, ExactSolution};
use crate::space::DgSpace;
use crate::transport::{
    coupled_step, TransportParams, TransportPenalty, TransportSolver, TransportSources,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, run: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match run() {
        Ok((passed, detail)) => Check {
            name,
            passed,
            detail,
        },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Deterministic rough field, distinct per `seed`.
fn rough_field(n: usize, seed: usize) -> Vec<f64> {
    (0..n)
        .map(|i| ((i * 7919 + seed * 104_729) as f64 * 0.618_033_988_75).sin())
        .collect()
}

fn unit_space(n: usize, q: usize, v: Point) -> Result<Arc<DgSpace>> {
    let mesh = Mesh::rectangle([0.0, 1.0], [0.0, 1.0], n, n)?.classify_boundary(v);
    Ok(Arc::new(DgSpace::new(Arc::new(mesh), q)?))
}

fn upwind_identity() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for q in [1, 2] {
        for v in [[0.0, 1.0], [std::f64::consts::FRAC_1_SQRT_2; 2]] {
            let space = unit_space(4, q, v)?;
            let b = assemble_upwind(&space, v)?;
            for seed in 0..5 {
                let phi = rough_field(space.num_dofs(), seed);
                let lhs = b.quad_form(&phi)?;
                let rhs: f64 = upwind_identity_terms(&space, v, &phi).iter().sum();
                worst = worst.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
            }
        }
    }
    Ok((worst <= 1e-12, format!("max relative defect {worst:.3e}")))
}

fn sip_coercive_symmetric() -> Result<(bool, String)> {
    let space = unit_space(4, 2, [0.0, 0.0])?;
    let eta = 2.0 * coercivity_threshold(&space, 1.0, 1.0);
    let a = assemble_sip(
        &space,
        CoefficientField::Constant(1.0),
        PenaltySpec { sigma: 1.0, eta },
    )?;
    let asym = a.asymmetry() / a.max_abs();
    let mut min_ratio = f64::INFINITY;
    for seed in 0..10 {
        let phi = rough_field(space.num_dofs(), seed);
        min_ratio = min_ratio.min(a.quad_form(&phi)? / dg_seminorm_sq(&space, &phi));
    }
    Ok((
        asym <= 1e-12 && min_ratio >= 0.1,
        format!("asymmetry {asym:.3e}, min ratio {min_ratio:.4}"),
    ))
}

fn energy_behaviour() -> Result<(bool, String)> {
    let space = unit_space(4, 1, [0.0, 0.0])?;
    let run = |alpha: f64| -> Result<Vec<f64>> {
        let mut s = AcousticSolver::new(
            space.clone(),
            AcousticParams {
                c: 1.0,
                beta: 0.0,
                kappa: 0.0,
                alpha,
            },
            NewmarkSpec::default(),
            PenaltySpec::pressure(1),
            SolverSpec::Direct,
            AcousticSources::default(),
        )?;
        let pi = std::f64::consts::PI;
        let mut st = s.init_state(0.0, |x| (pi * x[0]).sin() * (pi * x[1]).sin(), |_| 0.0)?;
        let mut e = vec![s.energy(&st)];
        for _ in 0..100 {
            st = s.newmark_step(&st, 0.01)?.0;
            e.push(s.energy(&st));
        }
        Ok(e)
    };
    let e = run(0.0)?;
    let drift = (e[100] - e[0]).abs() / e[0];
    let d = run(1.0)?;
    let monotone = d.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-14));
    Ok((
        drift <= 1e-10 && monotone,
        format!("conservative drift {drift:.3e}, damped non-increasing: {monotone}"),
    ))
}

fn decoupled_equivalence() -> Result<(bool, String)> {
    let v = [0.0, 1.0];
    let space = unit_space(4, 1, v)?;
    let tp = TransportParams {
        d0: 1.0,
        d1: 0.0,
        abs_pressure: false,
        v,
    };
    let sources = TransportSources {
        volume: Some(Arc::new(|x: Point, t: f64| x[0] + t)),
        inflow: Some(Arc::new(|_, _, _| 1.0)),
    };
    let mut ac = AcousticSolver::new(
        space.clone(),
        AcousticParams {
            c: 1.0,
            beta: 0.1,
            kappa: 0.0,
            alpha: 1.0,
        },
        NewmarkSpec::default(),
        PenaltySpec::pressure(1),
        SolverSpec::Direct,
        AcousticSources {
            volume: Some(Arc::new(|x: Point, t: f64| (t + x[1]).sin())),
            boundary: None,
        },
    )?;
    let mut coupled = TransportSolver::new(
        space.clone(),
        tp,
        TransportPenalty::default(),
        SolverSpec::Direct,
        sources.clone(),
    )?;
    let mut alone = TransportSolver::new(
        space.clone(),
        tp,
        TransportPenalty::default(),
        SolverSpec::Direct,
        sources,
    )?;
    let zero = space.zeros();
    let mut p = ac.init_state_from(0.0, zero.clone(), zero.clone())?;
    let mut u = coupled.init_state(0.0, |_| 0.0);
    let mut w = alone.init_state(0.0, |_| 0.0);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (p1, u1, _, _) = coupled_step(&mut ac, &mut coupled, &p, &u, 0.01)?;
        let (w1, _) = alone.backward_euler_step(&w, &zero, 0.01)?;
        worst =
            u1.u.iter()
                .zip(w1.u.iter())
                .fold(worst, |m, (a, b)| m.max((a - b).abs()));
        (p, u, w) = (p1, u1, w1);
    }
    Ok((worst <= 1e-10, format!("max difference {worst:.3e}")))
}

fn manufactured_forcing() -> Result<(bool, String)> {
    let exact = ExactSolution::academic().validated()?;
    let ap = AcousticParams {
        c: 1.0,
        beta: 0.1,
        kappa: 0.1,
        alpha: 1.0,
    };
    let tp = TransportParams {
        d0: 1.0,
        d1: 1.0,
        abs_pressure: false,
        v: [0.0, 1.0],
    };
    let fp = forcing_pressure(&exact, &ap);
    let fu = forcing_concentration(&exact, &tp);
    let cases = [
        ([0.5, 1.0], 0.0, 11.237005501361698, -18.739208802178717),
        ([0.3, 0.7], 0.2, 7.784725512200385, -8.528150200586355),
        ([0.9, 1.6], 0.45, 1.7546848259752342, 4.644495851546762),
    ];
    let mut worst: f64 = 0.0;
    for (x, t, p_ref, u_ref) in cases {
        worst = worst.max(((fp(x, t) - p_ref) / p_ref).abs());
        worst = worst.max(((fu(x, t) - u_ref) / u_ref).abs());
    }
    Ok((
        worst <= 1e-10,
        format!("max relative deviation {worst:.3e}"),
    ))
}

pub fn run_all() -> Vec<Check> {
    vec![
        check("upwind identity", upwind_identity),
        check("sip coercivity and symmetry", sip_coercive_symmetric),
        check("newmark energy", energy_behaviour),
        check("decoupled limit", decoupled_equivalence),
        check("manufactured forcing", manufactured_forcing),
    ]
}
