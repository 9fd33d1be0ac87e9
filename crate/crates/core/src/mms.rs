//! Manufactured solutions, forcing closures, error norms and convergence tables.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::acoustics::AcousticParams;
use crate::error::{Error, Result};
use crate::forms::BoundarySubset;
use crate::mesh::{FaceKind, Point};
use crate::space::DgSpace;
use crate::transport::TransportParams;

/// `(x, t) -> value`
pub type ScalarFn = Arc<dyn Fn(Point, f64) -> f64 + Send + Sync>;
/// `(x, t) -> vector`
pub type VectorFn = Arc<dyn Fn(Point, f64) -> Point + Send + Sync>;
/// `(x, n, t) -> value`, `n` the outward unit normal.
pub type BoundaryFn = Arc<dyn Fn(Point, Point, f64) -> f64 + Send + Sync>;

/// Closed-form pressure and concentration fields with the derivatives the
/// forcing terms need.
#[derive(Clone)]
pub struct ExactSolution {
    pub p: ScalarFn,
    pub p_t: ScalarFn,
    pub p_tt: ScalarFn,
    pub grad_p: VectorFn,
    pub grad_p_t: VectorFn,
    pub lap_p: ScalarFn,
    pub lap_p_t: ScalarFn,
    pub u: ScalarFn,
    pub u_t: ScalarFn,
    pub grad_u: VectorFn,
    pub lap_u: ScalarFn,
}

impl std::fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("ExactSolution { .. }")
    }
}

impl ExactSolution {
    /// `p = cos t sin(pi x) sin(pi y / 2)`, `u = exp(-t) cos(pi y)`.
    pub fn academic() -> Self {
        let sx = |x: f64| (PI * x).sin();
        let cx = |x: f64| (PI * x).cos();
        let sy = |y: f64| (0.5 * PI * y).sin();
        let cy = |y: f64| (0.5 * PI * y).cos();
        let spatial = move |x: Point| sx(x[0]) * sy(x[1]);
        let spatial_grad =
            move |x: Point| [PI * cx(x[0]) * sy(x[1]), 0.5 * PI * sx(x[0]) * cy(x[1])];
        let lap_factor = -1.25 * PI * PI;
        Self {
            p: Arc::new(move |x, t| t.cos() * spatial(x)),
            p_t: Arc::new(move |x, t| -t.sin() * spatial(x)),
            p_tt: Arc::new(move |x, t| -t.cos() * spatial(x)),
            grad_p: Arc::new(move |x, t| {
                let g = spatial_grad(x);
                [t.cos() * g[0], t.cos() * g[1]]
            }),
            grad_p_t: Arc::new(move |x, t| {
                let g = spatial_grad(x);
                [-t.sin() * g[0], -t.sin() * g[1]]
            }),
            lap_p: Arc::new(move |x, t| lap_factor * t.cos() * spatial(x)),
            lap_p_t: Arc::new(move |x, t| -lap_factor * t.sin() * spatial(x)),
            u: Arc::new(|x, t| (-t).exp() * (PI * x[1]).cos()),
            u_t: Arc::new(|x, t| -(-t).exp() * (PI * x[1]).cos()),
            grad_u: Arc::new(|x, t| [0.0, -PI * (-t).exp() * (PI * x[1]).sin()]),
            lap_u: Arc::new(|x, t| -PI * PI * (-t).exp() * (PI * x[1]).cos()),
        }
        .validated()
        .expect("academic closures are consistent")
    }

    /// Identically zero fields.
    pub fn zero() -> Self {
        let s: ScalarFn = Arc::new(|_, _| 0.0);
        let v: VectorFn = Arc::new(|_, _| [0.0, 0.0]);
        Self {
            p: s.clone(),
            p_t: s.clone(),
            p_tt: s.clone(),
            grad_p: v.clone(),
            grad_p_t: v.clone(),
            lap_p: s.clone(),
            lap_p_t: s.clone(),
            u: s.clone(),
            u_t: s.clone(),
            grad_u: v,
            lap_u: s,
        }
    }

    /// Finite-difference self-check of the closure set at fixed sample points.
    pub fn validated(self) -> Result<Self> {
        const D: f64 = 1e-4;
        const TOL: f64 = 1e-6;
        let samples = [
            ([0.31, 0.47], 0.13),
            ([0.77, 1.29], 0.41),
            ([0.05, 1.93], 0.27),
        ];
        let check = |name: &str, fd: f64, exact: f64| -> Result<()> {
            if (fd - exact).abs() > TOL * (1.0 + exact.abs()) {
                return Err(Error::Config(format!(
                    "exact solution inconsistent in {name}: difference quotient {fd}, closure {exact}"
                )));
            }
            Ok(())
        };
        let dt = |f: &ScalarFn, x: Point, t: f64| (f(x, t + D) - f(x, t - D)) / (2.0 * D);
        let dx = |f: &ScalarFn, x: Point, t: f64, k: usize| {
            let (mut a, mut b) = (x, x);
            a[k] += D;
            b[k] -= D;
            (f(a, t) - f(b, t)) / (2.0 * D)
        };
        let lap = |f: &ScalarFn, x: Point, t: f64| {
            let c = f(x, t);
            let mut acc = 0.0;
            for k in 0..2 {
                let (mut a, mut b) = (x, x);
                a[k] += D;
                b[k] -= D;
                acc += (f(a, t) - 2.0 * c + f(b, t)) / (D * D);
            }
            acc
        };
        for &(x, t) in &samples {
            check("p_t", dt(&self.p, x, t), (self.p_t)(x, t))?;
            check("p_tt", dt(&self.p_t, x, t), (self.p_tt)(x, t))?;
            check("u_t", dt(&self.u, x, t), (self.u_t)(x, t))?;
            for k in 0..2 {
                check("grad p", dx(&self.p, x, t, k), (self.grad_p)(x, t)[k])?;
                check("grad p_t", dx(&self.p_t, x, t, k), (self.grad_p_t)(x, t)[k])?;
                check("grad u", dx(&self.u, x, t, k), (self.grad_u)(x, t)[k])?;
            }
            // Second differences lose accuracy; compare at a looser bound.
            for (name, f, l) in [
                ("lap p", &self.p, &self.lap_p),
                ("lap p_t", &self.p_t, &self.lap_p_t),
                ("lap u", &self.u, &self.lap_u),
            ] {
                let (fd, ex) = (lap(f, x, t), l(x, t));
                if (fd - ex).abs() > 1e-3 * (1.0 + ex.abs()) {
                    return Err(Error::Config(format!(
                        "exact solution inconsistent in {name}: difference quotient {fd}, closure {ex}"
                    )));
                }
            }
        }
        Ok(self)
    }
}

/// `f_p = (1 + kappa p) p_tt + kappa p_t^2 - c^2 lap p - beta lap p_t`.
pub fn forcing_pressure(exact: &ExactSolution, params: &AcousticParams) -> ScalarFn {
    let e = exact.clone();
    let AcousticParams { c, beta, kappa, .. } = *params;
    Arc::new(move |x, t| {
        let pt = (e.p_t)(x, t);
        (1.0 + kappa * (e.p)(x, t)) * (e.p_tt)(x, t) + kappa * pt * pt
            - c * c * (e.lap_p)(x, t)
            - beta * (e.lap_p_t)(x, t)
    })
}

/// `g_abs = alpha p_t + c^2 grad p . n + beta grad p_t . n`.
pub fn boundary_forcing_pressure(exact: &ExactSolution, params: &AcousticParams) -> BoundaryFn {
    let e = exact.clone();
    let AcousticParams { c, beta, alpha, .. } = *params;
    Arc::new(move |x, n, t| {
        let g = (e.grad_p)(x, t);
        let gt = (e.grad_p_t)(x, t);
        alpha * (e.p_t)(x, t)
            + c * c * (g[0] * n[0] + g[1] * n[1])
            + beta * (gt[0] * n[0] + gt[1] * n[1])
    })
}

/// `f_u = u_t + v . grad u - grad D(p) . grad u - D(p) lap u`.
pub fn forcing_concentration(exact: &ExactSolution, params: &TransportParams) -> ScalarFn {
    let e = exact.clone();
    let tp = *params;
    Arc::new(move |x, t| {
        let p = (e.p)(x, t);
        let gp = (e.grad_p)(x, t);
        let gu = (e.grad_u)(x, t);
        let slope = tp.diffusivity_slope(p);
        (e.u_t)(x, t) + tp.v[0] * gu[0] + tp.v[1] * gu[1]
            - slope * (gp[0] * gu[0] + gp[1] * gu[1])
            - tp.diffusivity(p) * (e.lap_u)(x, t)
    })
}

/// `g_in = u - D(p) grad u . n / (v . n)`; only meaningful where `v . n != 0`.
pub fn inflow_data(exact: &ExactSolution, params: &TransportParams) -> BoundaryFn {
    let e = exact.clone();
    let tp = *params;
    Arc::new(move |x, n, t| {
        let vn = tp.v[0] * n[0] + tp.v[1] * n[1];
        let gu = (e.grad_u)(x, t);
        (e.u)(x, t) - tp.diffusivity((e.p)(x, t)) * (gu[0] * n[0] + gu[1] * n[1]) / vn
    })
}

/// Checked single evaluation of the inflow datum.
pub fn inflow_value(
    exact: &ExactSolution,
    params: &TransportParams,
    x: Point,
    n: Point,
    t: f64,
) -> Result<f64> {
    let vn = params.v[0] * n[0] + params.v[1] * n[1];
    if vn == 0.0 {
        return Err(Error::Config(format!(
            "inflow datum requested where v . n = 0 (x = {x:?}, n = {n:?})"
        )));
    }
    Ok(inflow_data(exact, params)(x, n, t))
}

/// Instantaneous error components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorNorms {
    pub l2: f64,
    /// `(sum_K ||grad e||^2 + sum_{F int} h_F^{-1} ||[u^h]||^2)^{1/2}`
    pub dg: f64,
    /// L2 norm of the error over the whole boundary.
    pub boundary: f64,
}

/// Error of a discrete field against a smooth function, by quadrature of the difference.
pub fn error_norms(
    space: &DgSpace,
    uh: &[f64],
    exact: impl Fn(Point) -> f64,
    exact_grad: impl Fn(Point) -> Point,
) -> ErrorNorms {
    let table = space.load_table();
    let (mut l2, mut grad) = (0.0, 0.0);
    for e in 0..space.num_elements() {
        let g = space.geometry(e);
        let vals = space.values_at(uh, e, table);
        let grads = space.gradients_at(uh, e, table);
        for (qp, (&xi, &w)) in table
            .rule
            .points
            .iter()
            .zip(&table.rule.weights)
            .enumerate()
        {
            let x = g.to_physical(xi);
            let d = exact(x) - vals[qp];
            let eg = exact_grad(x);
            let dg = [eg[0] - grads[qp][0], eg[1] - grads[qp][1]];
            l2 += w * g.det * d * d;
            grad += w * g.det * (dg[0] * dg[0] + dg[1] * dg[1]);
        }
    }
    let mut jumps = 0.0;
    let mut boundary = 0.0;
    for (f, face) in space.mesh().faces.iter().enumerate() {
        let ft = space.face_table(f);
        let tr = space.face_values(uh, f);
        match face.kind {
            FaceKind::Interior { .. } => {
                let s: f64 = ft
                    .weights
                    .iter()
                    .enumerate()
                    .map(|(q, w)| w * (tr[0][q] - tr[1][q]).powi(2))
                    .sum();
                jumps += s / face.length;
            }
            FaceKind::Boundary { .. } => {
                boundary += ft
                    .weights
                    .iter()
                    .zip(&ft.points)
                    .enumerate()
                    .map(|(q, (w, &x))| w * (exact(x) - tr[0][q]).powi(2))
                    .sum::<f64>();
            }
        }
    }
    ErrorNorms {
        l2: l2.sqrt(),
        dg: (grad + jumps).sqrt(),
        boundary: boundary.sqrt(),
    }
}

/// Norms of a purely discrete field (for instance `I_h p - p^h`).
pub fn discrete_norms(space: &DgSpace, field: &[f64]) -> ErrorNorms {
    error_norms(space, field, |_| 0.0, |_| [0.0, 0.0])
}

/// Running time functionals of a per-step scalar sampled at `t_0 < t_1 < ...`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeAccumulator {
    last: Option<(f64, f64)>,
    /// Maximum over all samples.
    pub max: f64,
    /// `sum_n (t_{n+1} - t_n) value_n`
    pub left_rectangle: f64,
    /// Composite trapezoid rule.
    pub trapezoid: f64,
    pub samples: usize,
}

impl TimeAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, value: f64) {
        if let Some((t0, v0)) = self.last {
            let dt = t - t0;
            self.left_rectangle += dt * v0;
            self.trapezoid += 0.5 * dt * (v0 + value);
        }
        self.max = if self.samples == 0 {
            value
        } else {
            self.max.max(value)
        };
        self.last = Some((t, value));
        self.samples += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EocRow {
    pub h: f64,
    pub error: f64,
    pub rate: Option<f64>,
}

/// Errors against mesh sizes with `rate_i = log(e_{i-1}/e_i) / log(h_{i-1}/h_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EocTable {
    pub name: String,
    pub rows: Vec<EocRow>,
}

pub fn eoc(name: &str, errors: &[f64], hs: &[f64]) -> Result<EocTable> {
    if errors.len() != hs.len() {
        return Err(Error::Dimension {
            expected: hs.len(),
            found: errors.len(),
        });
    }
    if errors.len() < 2 {
        return Err(Error::Config(
            "convergence table needs at least two levels".into(),
        ));
    }
    if let Some(e) = errors.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::Config(format!(
            "non-positive error {e} in convergence table"
        )));
    }
    if hs.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Config(
            "mesh sizes must be strictly decreasing".into(),
        ));
    }
    let rows = (0..errors.len())
        .map(|i| EocRow {
            h: hs[i],
            error: errors[i],
            rate: (i > 0).then(|| (errors[i - 1] / errors[i]).ln() / (hs[i - 1] / hs[i]).ln()),
        })
        .collect();
    Ok(EocTable {
        name: name.to_string(),
        rows,
    })
}

impl EocTable {
    pub fn rates(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.rate).collect()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    pub const CSV_HEADER: &'static str = "h,error_name,value,rate";

    /// Rows as CSV lines (no header); the first row has an empty rate.
    pub fn csv_rows(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            let rate = r.rate.map(|v| format!("{v:.6}")).unwrap_or_default();
            let _ = writeln!(s, "{:.15e},{},{:.15e},{}", r.h, self.name, r.error, rate);
        }
        s
    }
}

impl std::fmt::Display for EocTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}", self.name)?;
        writeln!(f, "  {:>12}  {:>14}  {:>8}", "h", "error", "rate")?;
        for r in &self.rows {
            let rate = r
                .rate
                .map(|v| format!("{v:.4}"))
                .unwrap_or_else(|| "-".into());
            writeln!(f, "  {:>12.6e}  {:>14.6e}  {:>8}", r.h, r.error, rate)?;
        }
        Ok(())
    }
}

/// `int_subset u^h ds`.
pub fn boundary_integral(space: &DgSpace, u: &[f64], subset: BoundarySubset) -> f64 {
    let mut total = 0.0;
    for (f, face) in space.mesh().boundary_faces() {
        if subset.contains(&face.kind) {
            let tr = space.face_values(u, f);
            total += space
                .face_table(f)
                .weights
                .iter()
                .zip(&tr[0])
                .map(|(w, v)| w * v)
                .sum::<f64>();
        }
    }
    total
}

/// `int u^h ds` over boundary faces with `v . n > 0`; faces tangent to `v` are left out.
pub fn strict_outflow_integral(space: &DgSpace, u: &[f64], v: Point) -> f64 {
    let mut total = 0.0;
    for (f, face) in space.mesh().boundary_faces() {
        if v[0] * face.normal[0] + v[1] * face.normal[1] > 0.0 {
            let tr = space.face_values(u, f);
            total += space
                .face_table(f)
                .weights
                .iter()
                .zip(&tr[0])
                .map(|(w, v)| w * v)
                .sum::<f64>();
        }
    }
    total
}

/// `delta_n = (top_n - top_ref_n) / max_m outflow_ref_m`.
pub fn relative_change_top(top: &[f64], top_ref: &[f64], outflow_ref: &[f64]) -> Result<Vec<f64>> {
    if top.len() != top_ref.len() {
        return Err(Error::Dimension {
            expected: top_ref.len(),
            found: top.len(),
        });
    }
    let denom = outflow_ref.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
    if !(denom > 0.0 && denom.is_finite()) {
        return Err(Error::Model(format!(
            "relative change undefined: reference outflow maximum is {denom}"
        )));
    }
    Ok(top
        .iter()
        .zip(top_ref)
        .map(|(a, b)| (a - b) / denom)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::BoundaryTag;
    use crate::mesh::Mesh;

    fn academic_params() -> (AcousticParams, TransportParams) {
        (
            AcousticParams {
                c: 1.0,
                beta: 0.1,
                kappa: 0.1,
                alpha: 1.0,
            },
            TransportParams {
                d0: 1.0,
                d1: 1.0,
                abs_pressure: false,
                v: [0.0, 1.0],
            },
        )
    }

    #[test]
    fn forcing_values_at_sample_points() {
        let ex = ExactSolution::academic();
        let (ap, tp) = academic_params();
        let fp = forcing_pressure(&ex, &ap);
        let expected = -1.1 + 1.25 * PI * PI;
        assert!((fp([0.5, 1.0], 0.0) - expected).abs() < 1e-12);
        let g = boundary_forcing_pressure(&ex, &ap);
        let y: f64 = 0.7;
        assert!((g([1.0, y], [1.0, 0.0], 0.0) + PI * (0.5 * PI * y).sin()).abs() < 1e-12);
        let gin = inflow_data(&ex, &tp);
        // On y = 0 the gradient of u vanishes, so g_in = u.
        assert!((gin([0.3, 0.0], [0.0, -1.0], 0.25) - (-0.25f64).exp()).abs() < 1e-14);
        assert!(inflow_value(&ex, &tp, [0.0, 0.5], [-1.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn zero_solution_gives_zero_forcing() {
        let ex = ExactSolution::zero();
        let (ap, tp) = academic_params();
        assert_eq!(forcing_pressure(&ex, &ap)([0.3, 0.2], 0.1), 0.0);
        assert_eq!(
            boundary_forcing_pressure(&ex, &ap)([0.0, 0.2], [-1.0, 0.0], 0.1),
            0.0
        );
        assert_eq!(forcing_concentration(&ex, &tp)([0.3, 0.2], 0.1), 0.0);
        assert_eq!(inflow_data(&ex, &tp)([0.3, 0.0], [0.0, -1.0], 0.1), 0.0);
    }

    #[test]
    fn inconsistent_closures_are_rejected() {
        let mut ex = ExactSolution::academic();
        ex.p_t = Arc::new(|_, _| 1.0);
        assert!(ex.validated().is_err());
    }

    #[test]
    fn eoc_examples() {
        let t = eoc(
            "dg",
            &[0.1418881628307, 0.0903614996228],
            &[0.176776695, 0.117851130],
        )
        .unwrap();
        assert!((t.rates()[0] - 1.1128).abs() < 5e-4);
        let t = eoc("half", &[1.0, 0.5], &[0.2, 0.1]).unwrap();
        assert!((t.rates()[0] - 1.0).abs() < 1e-14);
        let t = eoc("pdot", &[0.00156151, 0.000459907], &[0.176777, 0.117851]).unwrap();
        assert!((t.rates()[0] - 3.0148).abs() < 5e-4);
        let t = eoc("u", &[0.0513719, 0.0407491], &[0.0883883, 0.0707107]).unwrap();
        assert!((t.rates()[0] - 1.0381).abs() < 5e-4);
        assert!(eoc("x", &[1.0, 0.0], &[0.2, 0.1]).is_err());
        assert!(eoc("x", &[1.0, 0.5], &[0.1, 0.2]).is_err());
        assert!(eoc("x", &[1.0], &[0.1]).is_err());
        assert!(t.csv_rows().lines().next().unwrap().ends_with(','));
    }

    #[test]
    fn error_norm_examples() {
        let s = DgSpace::new(
            Arc::new(Mesh::rectangle([0.0, 1.0], [0.0, 1.0], 3, 3).unwrap()),
            2,
        )
        .unwrap();
        let poly = |x: Point| x[0] * x[0] - x[0] * x[1] + 0.5;
        let grad = |x: Point| [2.0 * x[0] - x[1], -x[0]];
        let uh = s.interpolate(poly);
        let n = error_norms(&s, &uh, poly, grad);
        assert!(n.l2 < 1e-12 && n.dg < 1e-11 && n.boundary < 1e-12);
        let n = error_norms(&s, &s.zeros(), |_| 1.0, |_| [0.0, 0.0]);
        assert!((n.l2 - 1.0).abs() < 1e-12);
        assert!(n.dg.abs() < 1e-12);
        assert!((n.boundary - 2.0).abs() < 1e-12);
    }

    #[test]
    fn time_accumulator_rules() {
        let mut acc = TimeAccumulator::new();
        for (t, v) in [(0.0, 1.0), (0.5, 3.0), (1.0, 2.0)] {
            acc.push(t, v);
        }
        assert_eq!(acc.max, 3.0);
        assert!((acc.left_rectangle - 2.0).abs() < 1e-15);
        assert!((acc.trapezoid - 2.25).abs() < 1e-15);
    }

    #[test]
    fn relative_change_examples() {
        let d = relative_change_top(&[0.0, 1.0, 2.0], &[0.0, 0.5, 1.0], &[0.0, 1.0, 4.0]).unwrap();
        assert_eq!(d, vec![0.0, 0.125, 0.25]);
        let same = relative_change_top(&[0.3, 0.4], &[0.3, 0.4], &[1.0, 2.0]).unwrap();
        assert!(same.iter().all(|v| *v == 0.0));
        assert!(relative_change_top(&[0.0], &[0.0], &[0.0]).is_err());
    }

    #[test]
    fn strict_outflow_skips_tangential_sides() {
        let mesh = Mesh::rectangle([0.0, 1.0], [0.0, 2.0], 2, 3)
            .unwrap()
            .classify_boundary([0.0, 1.0]);
        let s = DgSpace::new(Arc::new(mesh), 1).unwrap();
        let one = s.constant(1.0);
        assert!((strict_outflow_integral(&s, &one, [0.0, 1.0]) - 1.0).abs() < 1e-14);
        assert!((strict_outflow_integral(&s, &one, [1.0, 1.0]) - 3.0).abs() < 1e-14);
        assert_eq!(strict_outflow_integral(&s, &one, [0.0, 0.0]), 0.0);
        let tagged = boundary_integral(&s, &one, BoundarySubset::Tagged(BoundaryTag::Outflow));
        assert!((tagged - 5.0).abs() < 1e-14);
    }
}
