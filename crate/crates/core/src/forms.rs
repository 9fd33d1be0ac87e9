//! Assembly of the bilinear forms and load vectors of the semi-discrete system.
//!
//! Matrices are stored with test functions along rows and trial functions
//! along columns, so `w^T A phi = a(phi, w)`. Jumps and averages on interior
//! faces follow `[phi] = phi|K1 - phi|K2`, `{phi} = (phi|K1 + phi|K2) / 2` with
//! the face normal pointing from K1 into K2.

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::mesh::{BoundaryTag, FaceKind, Point, Side};
use crate::space::{DgSpace, VolumeTable};

/// Spatial dimension.
pub const DIM: usize = 2;

/// Scalar coefficient evaluable at volume and face quadrature points.
#[derive(Clone, Copy)]
pub enum CoefficientField<'a> {
    Constant(f64),
    /// `base * (1 + factor * g(p^h))` with `g(p) = |p|` when `abs` is set and `p` otherwise.
    FieldAffine {
        base: f64,
        factor: f64,
        field: &'a [f64],
        abs: bool,
    },
    Pointwise(&'a dyn Fn(Point) -> f64),
}

impl std::fmt::Debug for CoefficientField<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::FieldAffine {
                base, factor, abs, ..
            } => f
                .debug_struct("FieldAffine")
                .field("base", base)
                .field("factor", factor)
                .field("abs", abs)
                .finish(),
            Self::Pointwise(_) => write!(f, "Pointwise"),
        }
    }
}

impl CoefficientField<'_> {
    fn affine(base: f64, factor: f64, abs: bool, p: f64) -> f64 {
        base * (1.0 + factor * if abs { p.abs() } else { p })
    }

    /// Values at element `e`'s points of `table`.
    pub fn on_element(&self, space: &DgSpace, e: usize, table: &VolumeTable) -> Vec<f64> {
        match *self {
            Self::Constant(c) => vec![c; table.rule.len()],
            Self::FieldAffine {
                base,
                factor,
                field,
                abs,
            } => space
                .values_at(field, e, table)
                .into_iter()
                .map(|p| Self::affine(base, factor, abs, p))
                .collect(),
            Self::Pointwise(f) => {
                let g = space.geometry(e);
                table
                    .rule
                    .points
                    .iter()
                    .map(|&xi| f(g.to_physical(xi)))
                    .collect()
            }
        }
    }

    /// Values at a face's quadrature points, one vector per incident element trace.
    pub fn on_face(&self, space: &DgSpace, f: usize) -> Vec<Vec<f64>> {
        let table = space.face_table(f);
        match *self {
            Self::Constant(c) => vec![vec![c; table.points.len()]; table.traces.len()],
            Self::FieldAffine {
                base,
                factor,
                field,
                abs,
            } => space
                .face_values(field, f)
                .into_iter()
                .map(|side| {
                    side.into_iter()
                        .map(|p| Self::affine(base, factor, abs, p))
                        .collect()
                })
                .collect(),
            Self::Pointwise(g) => {
                let vals: Vec<f64> = table.points.iter().map(|&x| g(x)).collect();
                vec![vals; table.traces.len()]
            }
        }
    }

    /// Minimum and maximum over all volume (form table) and face quadrature points.
    pub fn range(&self, space: &DgSpace) -> (f64, f64) {
        if let Self::Constant(c) = *self {
            return (c, c);
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut visit = |v: f64| {
            lo = lo.min(v);
            hi = hi.max(v);
        };
        for e in 0..space.num_elements() {
            self.on_element(space, e, space.form_table())
                .into_iter()
                .for_each(&mut visit);
        }
        for f in 0..space.mesh().num_faces() {
            self.on_face(space, f)
                .into_iter()
                .flatten()
                .for_each(&mut visit);
        }
        (lo, hi)
    }

    /// Errors unless every quadrature value is finite and strictly positive.
    pub fn check_positive(&self, space: &DgSpace) -> Result<(f64, f64)> {
        for e in 0..space.num_elements() {
            let vals = self.on_element(space, e, space.form_table());
            if let Some((k, v)) = vals
                .iter()
                .enumerate()
                .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
            {
                let x = space
                    .geometry(e)
                    .to_physical(space.form_table().rule.points[k]);
                return Err(Error::Model(format!(
                    "coefficient {v} not positive at element {e}, point ({:.6e}, {:.6e})",
                    x[0], x[1]
                )));
            }
        }
        for f in 0..space.mesh().num_faces() {
            for vals in self.on_face(space, f) {
                if let Some((k, v)) = vals
                    .iter()
                    .enumerate()
                    .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
                {
                    let x = space.face_table(f).points[k];
                    return Err(Error::Model(format!(
                        "coefficient {v} not positive on face {f}, point ({:.6e}, {:.6e})",
                        x[0], x[1]
                    )));
                }
            }
        }
        Ok(self.range(space))
    }
}

/// Interior-penalty weight `sigma * eta / h_F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltySpec {
    pub sigma: f64,
    pub eta: f64,
}

impl PenaltySpec {
    /// `sigma = 1`, `eta = 10 q^2`.
    pub fn pressure(q: usize) -> Self {
        Self {
            sigma: 1.0,
            eta: 10.0 * (q * q) as f64,
        }
    }

    /// `sigma = 1`, `eta = 10 q^2 D_max^2 / D_min`.
    pub fn concentration(q: usize, d_min: f64, d_max: f64) -> Self {
        Self {
            sigma: 1.0,
            eta: 10.0 * (q * q) as f64 * d_max * d_max / d_min,
        }
    }

    pub fn weight(&self, h_f: f64) -> f64 {
        self.sigma * self.eta / h_f
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.eta > 0.0 && self.sigma.is_finite() && self.eta.is_finite())
        {
            return Err(Error::Config(format!(
                "penalty needs sigma >= 0 and eta > 0, got sigma={} eta={}",
                self.sigma, self.eta
            )));
        }
        Ok(())
    }
}

/// Coercivity threshold `C_tr^2 (d + 1) D_max^2 / D_min` for `sigma * eta`.
pub fn coercivity_threshold(space: &DgSpace, d_min: f64, d_max: f64) -> f64 {
    let c = space.trace_constant();
    c * c * (DIM as f64 + 1.0) * d_max * d_max / d_min
}

/// Part of the boundary a boundary form integrates over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundarySubset {
    None,
    All,
    Tagged(BoundaryTag),
    Side(Side),
}

impl BoundarySubset {
    pub fn contains(&self, kind: &FaceKind) -> bool {
        match (self, kind) {
            (_, FaceKind::Interior { .. }) => false,
            (Self::None, _) => false,
            (Self::All, _) => true,
            (Self::Tagged(t), FaceKind::Boundary { tag, .. }) => t == tag,
            (Self::Side(s), FaceKind::Boundary { side, .. }) => s == side,
        }
    }
}

fn physical_gradients(space: &DgSpace, e: usize, table: &VolumeTable) -> Vec<Vec<Point>> {
    let g = space.geometry(e);
    table
        .ref_gradients
        .iter()
        .map(|row| row.iter().map(|&d| g.push_gradient(d)).collect())
        .collect()
}

fn check_finite(vals: &[f64], what: &str) -> Result<()> {
    if let Some(v) = vals.iter().find(|v| !v.is_finite()) {
        return Err(Error::Model(format!(
            "{what} coefficient is {v} at a quadrature point"
        )));
    }
    Ok(())
}

fn mirror_upper(local: &mut [f64], n: usize) {
    for i in 0..n {
        for j in 0..i {
            local[i * n + j] = local[j * n + i];
        }
    }
}

#[inline]
fn dot2(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// `M_ij = int c phi_j phi_i`; block diagonal.
pub fn assemble_mass(space: &DgSpace, c: CoefficientField) -> Result<CsrMatrix> {
    let n = space.dofs_per_element();
    let table = space.form_table();
    let mut a = space.zero_matrix();
    let mut local = vec![0.0; n * n];
    for e in 0..space.num_elements() {
        let coef = c.on_element(space, e, table);
        check_finite(&coef, "mass")?;
        let det = space.geometry(e).det;
        local.iter_mut().for_each(|v| *v = 0.0);
        for (qp, w) in table.rule.weights.iter().enumerate() {
            let s = w * det * coef[qp];
            let phi = &table.values[qp];
            for i in 0..n {
                for j in i..n {
                    local[i * n + j] += s * (phi[i] * phi[j]);
                }
            }
        }
        mirror_upper(&mut local, n);
        a.add_block(space.dofs(e), e * n, n, &local);
    }
    Ok(a)
}

/// Symmetric interior penalty operator with diffusivity `d`; interior faces only.
pub fn assemble_sip(
    space: &DgSpace,
    d: CoefficientField,
    penalty: PenaltySpec,
) -> Result<CsrMatrix> {
    penalty.validate()?;
    let n = space.dofs_per_element();
    let table = space.form_table();
    let mut a = space.zero_matrix();
    let mut local = vec![0.0; n * n];
    for e in 0..space.num_elements() {
        let coef = d.on_element(space, e, table);
        if let Some(v) = coef.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::Model(format!(
                "diffusivity {v} not positive on element {e}"
            )));
        }
        let det = space.geometry(e).det;
        let grads = physical_gradients(space, e, table);
        local.iter_mut().for_each(|v| *v = 0.0);
        for (qp, w) in table.rule.weights.iter().enumerate() {
            let s = w * det * coef[qp];
            let g = &grads[qp];
            for i in 0..n {
                for j in 0..n {
                    local[i * n + j] += s * dot2(g[i], g[j]);
                }
            }
        }
        a.add_block(space.dofs(e), e * n, n, &local);
    }

    let mesh = space.mesh();
    for (f, face) in mesh.interior_faces() {
        let ft = space.face_table(f);
        let dv = d.on_face(space, f);
        for side in &dv {
            if let Some(v) = side.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                return Err(Error::Model(format!(
                    "diffusivity {v} not positive on face {f}"
                )));
            }
        }
        let nrm = face.normal;
        let pen = penalty.weight(face.length);
        let sign = [1.0, -1.0];
        // Row block b (test), column block a (trial).
        for b in 0..2 {
            for a_side in 0..2 {
                local.iter_mut().for_each(|v| *v = 0.0);
                let tb = &ft.traces[b];
                let ta = &ft.traces[a_side];
                let (sa, sb) = (sign[a_side], sign[b]);
                for (qp, &w) in ft.weights.iter().enumerate() {
                    let (da, db) = (dv[a_side][qp], dv[b][qp]);
                    for i in 0..n {
                        let wi = tb.values[qp][i];
                        let flux_w = db * dot2(tb.gradients[qp][i], nrm);
                        for j in 0..n {
                            let pj = ta.values[qp][j];
                            let flux_p = da * dot2(ta.gradients[qp][j], nrm);
                            local[i * n + j] += w
                                * (-0.5 * sb * wi * flux_p - 0.5 * sa * pj * flux_w
                                    + pen * sa * sb * pj * wi);
                        }
                    }
                }
                a.add_block(space.dofs(tb.element), ta.element * n, n, &local);
            }
        }
    }
    Ok(a)
}

/// `B_ij = int_subset phi_j phi_i ds`.
pub fn assemble_boundary_mass(space: &DgSpace, subset: BoundarySubset) -> CsrMatrix {
    let n = space.dofs_per_element();
    let mut a = space.zero_matrix();
    let mut local = vec![0.0; n * n];
    for (f, face) in space.mesh().boundary_faces() {
        if !subset.contains(&face.kind) {
            continue;
        }
        let ft = space.face_table(f);
        let tr = &ft.traces[0];
        local.iter_mut().for_each(|v| *v = 0.0);
        for (qp, &w) in ft.weights.iter().enumerate() {
            let phi = &tr.values[qp];
            for i in 0..n {
                for j in i..n {
                    local[i * n + j] += w * (phi[i] * phi[j]);
                }
            }
        }
        mirror_upper(&mut local, n);
        a.add_block(space.dofs(tr.element), tr.element * n, n, &local);
    }
    a
}

/// Upwind convection operator for a constant velocity `v`. The mesh must be
/// classified for `v`.
pub fn assemble_upwind(space: &DgSpace, v: Point) -> Result<CsrMatrix> {
    let mesh = space.mesh();
    if mesh.classified_for() != v {
        return Err(Error::Config(format!(
            "mesh boundary classified for velocity {:?}, not {:?}",
            mesh.classified_for(),
            v
        )));
    }
    let n = space.dofs_per_element();
    let table = space.form_table();
    let mut a = space.zero_matrix();
    let mut local = vec![0.0; n * n];
    if v == [0.0, 0.0] {
        return Ok(a);
    }
    for e in 0..space.num_elements() {
        let det = space.geometry(e).det;
        let grads = physical_gradients(space, e, table);
        local.iter_mut().for_each(|x| *x = 0.0);
        for (qp, w) in table.rule.weights.iter().enumerate() {
            let phi = &table.values[qp];
            for i in 0..n {
                let vg = dot2(v, grads[qp][i]);
                for j in 0..n {
                    local[i * n + j] -= w * det * phi[j] * vg;
                }
            }
        }
        a.add_block(space.dofs(e), e * n, n, &local);
    }
    for (f, face) in mesh.faces.iter().enumerate() {
        let ft = space.face_table(f);
        let vn = dot2(v, face.normal);
        match face.kind {
            FaceKind::Interior { .. } => {
                let up = if vn >= 0.0 { 0 } else { 1 };
                let ta = &ft.traces[up];
                for (b, sb) in [(0usize, 1.0), (1, -1.0)] {
                    let tb = &ft.traces[b];
                    local.iter_mut().for_each(|x| *x = 0.0);
                    for (qp, &w) in ft.weights.iter().enumerate() {
                        for i in 0..n {
                            let wi = sb * vn * tb.values[qp][i];
                            for j in 0..n {
                                local[i * n + j] += w * ta.values[qp][j] * wi;
                            }
                        }
                    }
                    a.add_block(space.dofs(tb.element), ta.element * n, n, &local);
                }
            }
            FaceKind::Boundary {
                tag: BoundaryTag::Outflow,
                ..
            } => {
                let tr = &ft.traces[0];
                local.iter_mut().for_each(|x| *x = 0.0);
                for (qp, &w) in ft.weights.iter().enumerate() {
                    let phi = &tr.values[qp];
                    for i in 0..n {
                        for j in 0..n {
                            local[i * n + j] += w * vn * phi[i] * phi[j];
                        }
                    }
                }
                a.add_block(space.dofs(tr.element), tr.element * n, n, &local);
            }
            FaceKind::Boundary {
                tag: BoundaryTag::Inflow,
                ..
            } => {}
        }
    }
    Ok(a)
}

/// `F_i = int f phi_i` with the load quadrature.
pub fn assemble_load(space: &DgSpace, f: impl Fn(Point) -> f64) -> Vec<f64> {
    let table = space.load_table();
    let mut out = vec![0.0; space.num_dofs()];
    for e in 0..space.num_elements() {
        let g = space.geometry(e);
        let block = &mut out[space.dofs(e)];
        for (qp, (&xi, &w)) in table
            .rule
            .points
            .iter()
            .zip(&table.rule.weights)
            .enumerate()
        {
            let s = w * g.det * f(g.to_physical(xi));
            block
                .iter_mut()
                .zip(&table.values[qp])
                .for_each(|(b, phi)| *b += s * phi);
        }
    }
    out
}

/// `F_i = int_subset g(x, n) phi_i (v . n) ds`, the factor `v . n` present only
/// when `velocity` is given.
pub fn assemble_boundary_load(
    space: &DgSpace,
    g: impl Fn(Point, Point) -> f64,
    subset: BoundarySubset,
    velocity: Option<Point>,
) -> Vec<f64> {
    let mut out = vec![0.0; space.num_dofs()];
    for (f, face) in space.mesh().boundary_faces() {
        if !subset.contains(&face.kind) {
            continue;
        }
        let scale = velocity.map_or(1.0, |v| dot2(v, face.normal));
        let ft = space.face_table(f);
        let tr = &ft.traces[0];
        let block = &mut out[space.dofs(tr.element)];
        for (qp, (&x, &w)) in ft.points.iter().zip(&ft.weights).enumerate() {
            let s = w * scale * g(x, face.normal);
            block
                .iter_mut()
                .zip(&tr.values[qp])
                .for_each(|(b, phi)| *b += s * phi);
        }
    }
    out
}

/// `N_i = int (pdot^h)^2 phi_i`.
pub fn assemble_westervelt_quadratic(space: &DgSpace, pdot: &[f64]) -> Vec<f64> {
    let table = space.load_table();
    let mut out = vec![0.0; space.num_dofs()];
    for e in 0..space.num_elements() {
        let det = space.geometry(e).det;
        let vals = space.values_at(pdot, e, table);
        let block = &mut out[space.dofs(e)];
        for (qp, w) in table.rule.weights.iter().enumerate() {
            let s = w * det * vals[qp] * vals[qp];
            block
                .iter_mut()
                .zip(&table.values[qp])
                .for_each(|(b, phi)| *b += s * phi);
        }
    }
    out
}

/// Squared broken seminorm `sum_K ||grad phi||^2 + sum_{F int} h_F^{-1} ||[phi]||^2`.
pub fn dg_seminorm_sq(space: &DgSpace, phi: &[f64]) -> f64 {
    let table = space.load_table();
    let mut total = 0.0;
    for e in 0..space.num_elements() {
        let det = space.geometry(e).det;
        let grads = space.gradients_at(phi, e, table);
        total += table
            .rule
            .weights
            .iter()
            .zip(&grads)
            .map(|(w, g)| w * det * dot2(*g, *g))
            .sum::<f64>();
    }
    total + jump_sq(space, phi)
}

/// `sum_{F int} h_F^{-1} ||[phi]||^2_F`.
pub fn jump_sq(space: &DgSpace, phi: &[f64]) -> f64 {
    let mut total = 0.0;
    for (f, face) in space.mesh().interior_faces() {
        let tr = space.face_values(phi, f);
        let ft = space.face_table(f);
        total += ft
            .weights
            .iter()
            .enumerate()
            .map(|(qp, w)| {
                let j = tr[0][qp] - tr[1][qp];
                w * j * j
            })
            .sum::<f64>()
            / face.length;
    }
    total
}

/// The three terms of the upwind energy identity for `phi`:
/// interior jumps, inflow and outflow boundary contributions (each with the 1/2 factor).
pub fn upwind_identity_terms(space: &DgSpace, v: Point, phi: &[f64]) -> [f64; 3] {
    let mut terms = [0.0; 3];
    for (f, face) in space.mesh().faces.iter().enumerate() {
        let vn = dot2(v, face.normal).abs();
        let tr = space.face_values(phi, f);
        let ft = space.face_table(f);
        let (slot, integrand): (usize, Box<dyn Fn(usize) -> f64>) = match face.kind {
            FaceKind::Interior { .. } => (0, Box::new(|qp| (tr[0][qp] - tr[1][qp]).powi(2))),
            FaceKind::Boundary { tag, .. } => (
                if tag == BoundaryTag::Inflow { 1 } else { 2 },
                Box::new(|qp| tr[0][qp].powi(2)),
            ),
        };
        terms[slot] += 0.5
            * vn
            * ft.weights
                .iter()
                .enumerate()
                .map(|(qp, w)| w * integrand(qp))
                .sum::<f64>();
    }
    terms
}
