//! Browser bindings: an interactive reduced ultrasound-enhanced transport run,
//! a small manufactured pressure convergence table, and an upwind-identity check.
//!
//! `std::time` is unavailable on wasm32, so the solvers are driven directly
//! instead of through the timed experiment drivers.

use std::sync::Arc;

use wasm_bindgen::prelude::*;

use westervelt_dg::acoustics::{
    AcousticSolver, AcousticSources, AcousticState, ErrorMode, PressureErrorTracker,
};
use westervelt_dg::cli::SimulationConfig;
use westervelt_dg::forms::{assemble_upwind, upwind_identity_terms, BoundarySubset};
use westervelt_dg::mesh::{Mesh, Side};
use westervelt_dg::mms::{
    boundary_forcing_pressure, boundary_integral, eoc, forcing_pressure, strict_outflow_integral,
    ExactSolution,
};
use westervelt_dg::space::DgSpace;
use westervelt_dg::transport::{
    TransportParams, TransportSolver, TransportSources, TransportState,
};
use westervelt_dg::Error;

fn js_err(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Realistic setup on a coarser mesh, with the coupled and the `D = D0` reference transport.
#[wasm_bindgen]
pub struct Simulation {
    space: Arc<DgSpace>,
    dt: f64,
    acoustics: AcousticSolver,
    coupled: TransportSolver,
    reference: TransportSolver,
    p: AcousticState,
    u: TransportState,
    u_ref: TransportState,
    times: Vec<f64>,
    top_diff: Vec<f64>,
    outflow_ref_max: f64,
    max_kappa_p: f64,
}

#[wasm_bindgen]
impl Simulation {
    /// `cells` per direction; `amplitude_scale` multiplies the source; `d1` sets the pressure sensitivity.
    #[wasm_bindgen(constructor)]
    pub fn new(cells: usize, amplitude_scale: f64, d1: f64) -> Result<Simulation, JsError> {
        let mut cfg = SimulationConfig::simulate_default();
        cfg.domain.nx = Some(cells);
        cfg.domain.ny = Some(cells);
        cfg.transport.d1 = d1;
        let mut src = cfg.source.expect("preset has a source");
        src.amplitude *= amplitude_scale;
        cfg.source = Some(src);
        cfg.validate().map_err(js_err)?;

        let tp = cfg.transport.params();
        let mesh = Mesh::rectangle(cfg.domain.x, cfg.domain.y, cells, cells).map_err(js_err)?;
        let space = Arc::new(
            DgSpace::new(Arc::new(mesh.classify_boundary(tp.v)), cfg.degree).map_err(js_err)?,
        );
        let mut acoustics = AcousticSolver::new(
            space.clone(),
            cfg.acoustic,
            cfg.newmark,
            cfg.penalty.resolve(cfg.degree),
            cfg.solver.pressure,
            AcousticSources {
                volume: Some(src.field()),
                boundary: None,
            },
        )
        .map_err(js_err)?;
        let inflow = TransportSources {
            volume: None,
            inflow: Some(Arc::new(|_, _, _| 1.0)),
        };
        let make = |params: TransportParams| {
            TransportSolver::new(
                space.clone(),
                params,
                cfg.transport.penalty,
                cfg.solver.transport,
                inflow.clone(),
            )
        };
        let coupled = make(tp).map_err(js_err)?;
        let reference = make(TransportParams { d1: 0.0, ..tp }).map_err(js_err)?;
        let zero = space.zeros();
        let p = acoustics
            .init_state_from(0.0, zero.clone(), zero)
            .map_err(js_err)?;
        let u = coupled.init_state(0.0, |_| 0.0);
        let u_ref = reference.init_state(0.0, |_| 0.0);
        Ok(Simulation {
            dt: cfg.time.dt.unwrap_or(5e-8),
            space,
            acoustics,
            coupled,
            reference,
            p,
            u,
            u_ref,
            times: vec![0.0],
            top_diff: vec![0.0],
            outflow_ref_max: 0.0,
            max_kappa_p: 0.0,
        })
    }

    /// Advances `n` coupled steps; returns the current relative change at the top.
    pub fn step(&mut self, n: usize) -> Result<f64, JsError> {
        let v = self.coupled.params().v;
        for _ in 0..n {
            let (p1, diag) = self
                .acoustics
                .newmark_step(&self.p, self.dt)
                .map_err(js_err)?;
            let (u1, _) = self
                .coupled
                .backward_euler_step(&self.u, &p1.p, self.dt)
                .map_err(js_err)?;
            let (r1, _) = self
                .reference
                .backward_euler_step(&self.u_ref, &p1.p, self.dt)
                .map_err(js_err)?;
            let top =
                |u: &[f64]| boundary_integral(&self.space, u, BoundarySubset::Side(Side::Top));
            self.times.push(p1.t);
            self.top_diff.push(top(&u1.u) - top(&r1.u));
            self.outflow_ref_max =
                self.outflow_ref_max
                    .max(strict_outflow_integral(&self.space, &r1.u, v));
            self.max_kappa_p = self.max_kappa_p.max(diag.max_kappa_p);
            (self.p, self.u, self.u_ref) = (p1, u1, r1);
        }
        Ok(self.delta().last().copied().unwrap_or(0.0))
    }

    pub fn time(&self) -> f64 {
        self.p.t
    }

    pub fn max_kappa_p(&self) -> f64 {
        self.max_kappa_p
    }

    pub fn times(&self) -> Vec<f64> {
        self.times.clone()
    }

    /// Relative change at the top, normalized by the running reference outflow maximum.
    pub fn delta(&self) -> Vec<f64> {
        if self.outflow_ref_max > 0.0 {
            self.top_diff
                .iter()
                .map(|d| d / self.outflow_ref_max)
                .collect()
        } else {
            vec![0.0; self.top_diff.len()]
        }
    }

    /// RGBA image of the pressure, blue to red, symmetric about zero.
    pub fn pressure_image(&self, size: usize) -> Vec<u8> {
        let (values, mask) = sample(&self.space, &self.p.p, size);
        let scale = values
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        paint(&values, &mask, |v| diverging(v / scale))
    }

    /// RGBA image of the coupled concentration, dark to bright from zero to its maximum.
    pub fn concentration_image(&self, size: usize) -> Vec<u8> {
        let (values, mask) = sample(&self.space, &self.u.u, size);
        let scale = values
            .iter()
            .fold(0.0f64, |m, v| m.max(*v))
            .max(f64::MIN_POSITIVE);
        paint(&values, &mask, |v| sequential(v / scale))
    }
}

/// Values at pixel centers, rows from the top edge; `mask` marks covered pixels.
fn sample(space: &DgSpace, field: &[f64], size: usize) -> (Vec<f64>, Vec<bool>) {
    let mut values = vec![0.0; size * size];
    let mut mask = vec![false; size * size];
    let mesh = space.mesh();
    let (x0, y0) = (mesh.x_range[0], mesh.y_range[0]);
    let (wx, wy) = (mesh.x_range[1] - x0, mesh.y_range[1] - y0);
    let pixel = |i: usize, j: usize| {
        [
            x0 + (i as f64 + 0.5) / size as f64 * wx,
            y0 + wy - (j as f64 + 0.5) / size as f64 * wy,
        ]
    };
    for e in 0..space.num_elements() {
        let v = mesh.element_vertices(e);
        let lo = |k: usize| v.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
        let hi = |k: usize| v.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
        let to_i = |x: f64| ((x - x0) / wx * size as f64).clamp(0.0, size as f64) as usize;
        let to_j = |y: f64| ((y0 + wy - y) / wy * size as f64).clamp(0.0, size as f64) as usize;
        for j in to_j(hi(1)).saturating_sub(1)..(to_j(lo(1)) + 1).min(size) {
            for i in to_i(lo(0)).saturating_sub(1)..(to_i(hi(0)) + 1).min(size) {
                let xi = space.geometry(e).to_reference(pixel(i, j));
                let inside = xi[0] >= -1e-12 && xi[1] >= -1e-12 && xi[0] + xi[1] <= 1.0 + 1e-12;
                if inside && !mask[j * size + i] {
                    values[j * size + i] = space.eval(field, e, xi).unwrap_or(0.0);
                    mask[j * size + i] = true;
                }
            }
        }
    }
    (values, mask)
}

fn paint(values: &[f64], mask: &[bool], color: impl Fn(f64) -> [u8; 3]) -> Vec<u8> {
    values
        .iter()
        .zip(mask)
        .flat_map(|(v, m)| {
            let [r, g, b] = if *m { color(*v) } else { [0, 0, 0] };
            [r, g, b, 255]
        })
        .collect()
}

fn channel(x: f64) -> u8 {
    (x.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// `s` in `[-1, 1]`: blue, white, red.
fn diverging(s: f64) -> [u8; 3] {
    let s = s.clamp(-1.0, 1.0);
    if s < 0.0 {
        [channel(1.0 + s), channel(1.0 + s), 255]
    } else {
        [255, channel(1.0 - s), channel(1.0 - s)]
    }
}

/// `s` in `[0, 1]`: dark blue through teal to yellow.
fn sequential(s: f64) -> [u8; 3] {
    let s = s.clamp(0.0, 1.0);
    [
        channel(s * s * 1.1),
        channel(0.1 + 0.85 * s),
        channel(0.35 + 0.4 * s - 0.6 * s * s),
    ]
}

/// Manufactured pressure problem up to `t_end`; one CSV row per level: `level,h,steps,p_dg,rate,pdot_l2,rate`.
#[wasm_bindgen]
pub fn pressure_convergence(
    degree: usize,
    levels: Vec<usize>,
    t_end: f64,
) -> Result<String, JsError> {
    let mut cfg = SimulationConfig::pressure_study(degree);
    cfg.domain.levels = levels.clone();
    cfg.time.t_end = t_end;
    cfg.output.error_mode = ErrorMode::Discrete;
    cfg.validate().map_err(js_err)?;
    let exact = ExactSolution::academic();
    let (mut hs, mut dg, mut dot, mut steps_of) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for &level in &levels {
        let (nx, ny) = cfg.domain.cells_for_level(level);
        let mesh = Mesh::rectangle(cfg.domain.x, cfg.domain.y, nx, ny).map_err(js_err)?;
        let space = Arc::new(DgSpace::new(Arc::new(mesh), degree).map_err(js_err)?);
        let h = space.mesh().mesh_size;
        let (dt, steps) = cfg.time.steps_for(h, degree);
        let mut ac = AcousticSolver::new(
            space.clone(),
            cfg.acoustic,
            cfg.newmark,
            cfg.penalty.resolve(degree),
            cfg.solver.pressure,
            AcousticSources {
                volume: Some(forcing_pressure(&exact, &cfg.acoustic)),
                boundary: Some(boundary_forcing_pressure(&exact, &cfg.acoustic)),
            },
        )
        .map_err(js_err)?;
        let mut state = ac
            .init_state(0.0, |x| (exact.p)(x, 0.0), |x| (exact.p_t)(x, 0.0))
            .map_err(js_err)?;
        let mut tracker = PressureErrorTracker::new(cfg.output.error_mode);
        tracker.record(&space, &state, &exact, cfg.acoustic.beta);
        for _ in 0..steps {
            state = ac.newmark_step(&state, dt).map_err(js_err)?.0;
            tracker.record(&space, &state, &exact, cfg.acoustic.beta);
        }
        hs.push(h);
        dg.push(tracker.p_dg.max);
        dot.push(tracker.pdot_l2.max);
        steps_of.push(steps);
    }
    let rates_dg = eoc("p_dg", &dg, &hs).map_err(js_err)?.rates();
    let rates_dot = eoc("pdot_l2", &dot, &hs).map_err(js_err)?.rates();
    let rate = |r: &[f64], i: usize| {
        if i == 0 {
            String::new()
        } else {
            format!("{:.3}", r[i - 1])
        }
    };
    let mut out = String::from("level,h,steps,p_dg,rate,pdot_l2,rate\n");
    for i in 0..levels.len() {
        out += &format!(
            "{},{:.4e},{},{:.4e},{},{:.4e},{}\n",
            levels[i],
            hs[i],
            steps_of[i],
            dg[i],
            rate(&rates_dg, i),
            dot[i],
            rate(&rates_dot, i)
        );
    }
    Ok(out)
}

/// `[phi^T B phi, sum of identity terms, |difference|]` for a pseudo-random field on the unit square.
#[wasm_bindgen]
pub fn upwind_identity(
    cells: usize,
    degree: usize,
    vx: f64,
    vy: f64,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    let v = [vx, vy];
    let mesh = Mesh::rectangle([0.0, 1.0], [0.0, 1.0], cells, cells).map_err(js_err)?;
    let space = DgSpace::new(Arc::new(mesh.classify_boundary(v)), degree).map_err(js_err)?;
    let phi: Vec<f64> = (0..space.num_dofs())
        .map(|i| ((i as f64 + 1.0) * (0.754_877_666 + seed as f64 * 0.569_840_29)).sin())
        .collect();
    let b = assemble_upwind(&space, v).map_err(js_err)?;
    let lhs = b.quad_form(&phi).map_err(js_err)?;
    let rhs: f64 = upwind_identity_terms(&space, v, &phi).iter().sum();
    Ok(vec![lhs, rhs, (lhs - rhs).abs()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upwind_identity_holds() {
        let r = upwind_identity(3, 2, 0.6, 0.8, 7).unwrap();
        assert!(r[2] <= 1e-12 * (1.0 + r[1].abs()));
    }

    #[test]
    fn convergence_table_has_rates() {
        let csv = pressure_convergence(1, vec![4, 8], 0.1).unwrap();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows.len(), 3);
        let rate: f64 = rows[2].split(',').nth(4).unwrap().parse().unwrap();
        assert!(rate > 0.5, "{csv}");
    }

    #[test]
    fn simulation_steps_and_paints() {
        let mut s = Simulation::new(8, 1.0, 500.0).unwrap();
        let d = s.step(3).unwrap();
        assert!(d.is_finite());
        assert_eq!(s.delta().len(), 4);
        assert!(s.max_kappa_p() < 1.0);
        let img = s.pressure_image(16);
        assert_eq!(img.len(), 16 * 16 * 4);
        assert!(img.chunks(4).all(|p| p[3] == 255));
    }
}
