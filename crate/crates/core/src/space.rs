//! Broken polynomial spaces on triangle meshes.
//!
//! Each element carries its own nodal Lagrange basis of degree `q` built on
//! the principal lattice of the reference triangle. Nothing couples the
//! degrees of freedom of neighbouring elements.

use std::ops::{Deref, DerefMut};
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::mesh::{FaceKind, Mesh, Point};
use crate::quadrature::QuadRule;

/// Highest polynomial degree supported by the spaces.
pub const MAX_DEGREE: usize = 3;

/// Nodal Lagrange basis on the reference triangle.
#[derive(Debug, Clone)]
pub struct ReferenceBasis {
    degree: usize,
    nodes: Vec<Point>,
    exponents: Vec<(i32, i32)>,
    /// Column `k` holds the monomial coefficients of basis function `k`.
    coefficients: DMatrix<f64>,
}

impl ReferenceBasis {
    pub fn new(degree: usize) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::Config(format!(
                "polynomial degree {degree} outside 1..={MAX_DEGREE}"
            )));
        }
        let q = degree as f64;
        let mut nodes = Vec::new();
        for j in 0..=degree {
            for i in 0..=(degree - j) {
                nodes.push([i as f64 / q, j as f64 / q]);
            }
        }
        let mut exponents = Vec::new();
        for total in 0..=degree as i32 {
            for b in 0..=total {
                exponents.push((total - b, b));
            }
        }
        let n = nodes.len();
        let vandermonde = DMatrix::from_fn(n, n, |r, c| {
            let (a, b) = exponents[c];
            nodes[r][0].powi(a) * nodes[r][1].powi(b)
        });
        let coefficients = vandermonde
            .try_inverse()
            .ok_or_else(|| Error::Internal("singular Vandermonde matrix".into()))?;
        Ok(Self {
            degree,
            nodes,
            exponents,
            coefficients,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Lattice nodes, ordered row by row from the bottom edge.
    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn values(&self, xi: Point) -> Vec<f64> {
        let mono: Vec<f64> = self
            .exponents
            .iter()
            .map(|&(a, b)| xi[0].powi(a) * xi[1].powi(b))
            .collect();
        (0..self.len())
            .map(|k| {
                mono.iter()
                    .enumerate()
                    .map(|(m, v)| self.coefficients[(m, k)] * v)
                    .sum()
            })
            .collect()
    }

    /// Gradients with respect to the reference coordinates.
    pub fn gradients(&self, xi: Point) -> Vec<Point> {
        let pw = |x: f64, e: i32| {
            if e <= 0 {
                0.0
            } else {
                e as f64 * x.powi(e - 1)
            }
        };
        let dmono: Vec<Point> = self
            .exponents
            .iter()
            .map(|&(a, b)| [pw(xi[0], a) * xi[1].powi(b), xi[0].powi(a) * pw(xi[1], b)])
            .collect();
        (0..self.len())
            .map(|k| {
                let mut g = [0.0; 2];
                for (m, d) in dmono.iter().enumerate() {
                    let c = self.coefficients[(m, k)];
                    g[0] += c * d[0];
                    g[1] += c * d[1];
                }
                g
            })
            .collect()
    }
}

/// Affine map from the reference triangle onto a mesh element.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    pub origin: Point,
    /// Columns are the edge vectors `v1 - v0` and `v2 - v0`.
    pub jacobian: [[f64; 2]; 2],
    pub inverse: [[f64; 2]; 2],
    pub det: f64,
}

impl ElementGeometry {
    fn new(v: [Point; 3]) -> Self {
        let jacobian = [
            [v[1][0] - v[0][0], v[2][0] - v[0][0]],
            [v[1][1] - v[0][1], v[2][1] - v[0][1]],
        ];
        let det = jacobian[0][0] * jacobian[1][1] - jacobian[0][1] * jacobian[1][0];
        let inverse = [
            [jacobian[1][1] / det, -jacobian[0][1] / det],
            [-jacobian[1][0] / det, jacobian[0][0] / det],
        ];
        Self {
            origin: v[0],
            jacobian,
            inverse,
            det,
        }
    }

    pub fn to_physical(&self, xi: Point) -> Point {
        let j = &self.jacobian;
        [
            self.origin[0] + j[0][0] * xi[0] + j[0][1] * xi[1],
            self.origin[1] + j[1][0] * xi[0] + j[1][1] * xi[1],
        ]
    }

    pub fn to_reference(&self, x: Point) -> Point {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        let m = &self.inverse;
        [
            m[0][0] * d[0] + m[0][1] * d[1],
            m[1][0] * d[0] + m[1][1] * d[1],
        ]
    }

    /// Maps a reference gradient to the physical one (inverse transpose of the Jacobian).
    pub fn push_gradient(&self, g: Point) -> Point {
        let m = &self.inverse;
        [
            m[0][0] * g[0] + m[1][0] * g[1],
            m[0][1] * g[0] + m[1][1] * g[1],
        ]
    }
}

/// Basis tabulated at the points of a reference quadrature rule.
#[derive(Debug, Clone)]
pub struct VolumeTable {
    pub rule: QuadRule,
    /// `values[qp][i]`
    pub values: Vec<Vec<f64>>,
    /// `ref_gradients[qp][i]`
    pub ref_gradients: Vec<Vec<Point>>,
}

impl VolumeTable {
    fn new(basis: &ReferenceBasis, rule: QuadRule) -> Self {
        let values = rule.points.iter().map(|&p| basis.values(p)).collect();
        let ref_gradients = rule.points.iter().map(|&p| basis.gradients(p)).collect();
        Self {
            rule,
            values,
            ref_gradients,
        }
    }
}

/// Traces of one element's basis at a face's quadrature points.
#[derive(Debug, Clone)]
pub struct FaceTrace {
    pub element: usize,
    /// `values[qp][i]`
    pub values: Vec<Vec<f64>>,
    /// Physical gradients, `gradients[qp][i]`.
    pub gradients: Vec<Vec<Point>>,
}

/// Quadrature data for one face. Interior faces carry the K1 trace first.
#[derive(Debug, Clone)]
pub struct FaceTable {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub traces: Vec<FaceTrace>,
}

/// Coefficient vector of a broken polynomial field, one value per global dof.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FieldVector(Vec<f64>);

impl FieldVector {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for FieldVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl Deref for FieldVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for FieldVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

/// Broken space `V_h^q` of elementwise polynomials of degree `q`.
#[derive(Debug, Clone)]
pub struct DgSpace {
    mesh: Arc<Mesh>,
    basis: ReferenceBasis,
    geometry: Vec<ElementGeometry>,
    form_table: VolumeTable,
    load_table: VolumeTable,
    face_tables: Vec<FaceTable>,
    reference_mass: DMatrix<f64>,
    reference_mass_inv: DMatrix<f64>,
    pattern: OnceLock<CsrMatrix>,
}

impl DgSpace {
    pub fn new(mesh: Arc<Mesh>, degree: usize) -> Result<Self> {
        let basis = ReferenceBasis::new(degree)?;
        let geometry: Vec<_> = (0..mesh.num_elements())
            .map(|e| ElementGeometry::new(mesh.element_vertices(e)))
            .collect();
        // Bilinear forms: degree 2q, plus room for one factor of a degree-q coefficient.
        let form_table = VolumeTable::new(
            &basis,
            QuadRule::triangle((2 * degree + 2).max(3 * degree))?,
        );
        let load_table = VolumeTable::new(&basis, QuadRule::triangle(2 * degree + 4)?);

        let mut face_tables = Vec::with_capacity(mesh.num_faces());
        for (f, face) in mesh.faces.iter().enumerate() {
            let (points, weights) = mesh.face_quadrature(f, 2 * degree + 4)?;
            let elements = match face.kind {
                FaceKind::Interior { left, right } => vec![left, right],
                FaceKind::Boundary { element, .. } => vec![element],
            };
            let traces = elements
                .into_iter()
                .map(|e| {
                    let g = &geometry[e];
                    let refs: Vec<Point> = points.iter().map(|&x| g.to_reference(x)).collect();
                    FaceTrace {
                        element: e,
                        values: refs.iter().map(|&r| basis.values(r)).collect(),
                        gradients: refs
                            .iter()
                            .map(|&r| {
                                basis
                                    .gradients(r)
                                    .into_iter()
                                    .map(|d| g.push_gradient(d))
                                    .collect()
                            })
                            .collect(),
                    }
                })
                .collect();
            face_tables.push(FaceTable {
                points,
                weights,
                traces,
            });
        }

        let n = basis.len();
        let mut reference_mass = DMatrix::zeros(n, n);
        for (qp, w) in load_table.rule.weights.iter().enumerate() {
            let phi = &load_table.values[qp];
            for i in 0..n {
                for j in 0..n {
                    reference_mass[(i, j)] += w * phi[i] * phi[j];
                }
            }
        }
        let reference_mass_inv = reference_mass
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Internal("singular reference mass matrix".into()))?;

        Ok(Self {
            mesh,
            basis,
            geometry,
            form_table,
            load_table,
            face_tables,
            reference_mass,
            reference_mass_inv,
            pattern: OnceLock::new(),
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn basis(&self) -> &ReferenceBasis {
        &self.basis
    }

    pub fn dofs_per_element(&self) -> usize {
        self.basis.len()
    }

    pub fn num_dofs(&self) -> usize {
        self.mesh.num_elements() * self.basis.len()
    }

    pub fn num_elements(&self) -> usize {
        self.mesh.num_elements()
    }

    pub fn geometry(&self, e: usize) -> &ElementGeometry {
        &self.geometry[e]
    }

    /// Quadrature table used for bilinear forms.
    pub fn form_table(&self) -> &VolumeTable {
        &self.form_table
    }

    /// Higher-order table used for loads and error norms.
    pub fn load_table(&self) -> &VolumeTable {
        &self.load_table
    }

    pub fn face_table(&self, f: usize) -> &FaceTable {
        &self.face_tables[f]
    }

    /// Reference-element mass matrix; the element mass matrix is `det J` times this.
    pub fn reference_mass(&self) -> &DMatrix<f64> {
        &self.reference_mass
    }

    /// Zero matrix over the space with a dense block for every pair of face
    /// neighbours. All matrices from one space share this pattern.
    pub fn zero_matrix(&self) -> CsrMatrix {
        self.pattern
            .get_or_init(|| {
                let mut couplings: Vec<Vec<usize>> =
                    (0..self.num_elements()).map(|e| vec![e]).collect();
                for (_, face) in self.mesh.interior_faces() {
                    if let FaceKind::Interior { left, right } = face.kind {
                        couplings[left].push(right);
                        couplings[right].push(left);
                    }
                }
                CsrMatrix::block_pattern(self.basis.len(), &couplings)
            })
            .zeros_like()
    }

    pub fn zeros(&self) -> FieldVector {
        FieldVector::zeros(self.num_dofs())
    }

    pub fn constant(&self, value: f64) -> FieldVector {
        FieldVector(vec![value; self.num_dofs()])
    }

    /// Global index range of element `e`'s degrees of freedom.
    pub fn dofs(&self, e: usize) -> std::ops::Range<usize> {
        let n = self.basis.len();
        e * n..(e + 1) * n
    }

    pub fn check_field(&self, field: &[f64]) -> Result<()> {
        if field.len() != self.num_dofs() {
            return Err(Error::Dimension {
                expected: self.num_dofs(),
                found: field.len(),
            });
        }
        Ok(())
    }

    fn check_element(&self, e: usize) -> Result<()> {
        if e >= self.num_elements() {
            return Err(Error::OutOfRange(format!(
                "element {e} (mesh has {})",
                self.num_elements()
            )));
        }
        Ok(())
    }

    /// Value of the element-local polynomial at a reference point.
    pub fn eval(&self, field: &[f64], e: usize, xi: Point) -> Result<f64> {
        self.check_element(e)?;
        self.check_field(field)?;
        let local = &field[self.dofs(e)];
        Ok(self
            .basis
            .values(xi)
            .iter()
            .zip(local)
            .map(|(p, c)| p * c)
            .sum())
    }

    /// Physical gradient of the element-local polynomial at a reference point.
    pub fn eval_grad(&self, field: &[f64], e: usize, xi: Point) -> Result<Point> {
        self.check_element(e)?;
        self.check_field(field)?;
        let local = &field[self.dofs(e)];
        let mut g = [0.0; 2];
        for (d, c) in self.basis.gradients(xi).iter().zip(local) {
            g[0] += c * d[0];
            g[1] += c * d[1];
        }
        Ok(self.geometry[e].push_gradient(g))
    }

    /// Value of element `e`'s polynomial at a physical point (which may lie on its boundary).
    pub fn eval_physical(&self, field: &[f64], e: usize, x: Point) -> Result<f64> {
        self.check_element(e)?;
        self.eval(field, e, self.geometry[e].to_reference(x))
    }

    /// Physical positions of element `e`'s lattice nodes.
    pub fn element_nodes(&self, e: usize) -> Vec<Point> {
        let g = &self.geometry[e];
        self.basis
            .nodes()
            .iter()
            .map(|&xi| g.to_physical(xi))
            .collect()
    }

    /// Elementwise Lagrange interpolant.
    pub fn interpolate(&self, f: impl Fn(Point) -> f64) -> FieldVector {
        let mut out = Vec::with_capacity(self.num_dofs());
        for e in 0..self.num_elements() {
            out.extend(self.element_nodes(e).into_iter().map(&f));
        }
        FieldVector(out)
    }

    /// Elementwise L2 projection using the load quadrature.
    pub fn l2_project(&self, f: impl Fn(Point) -> f64) -> FieldVector {
        let n = self.basis.len();
        let tab = &self.load_table;
        let mut out = Vec::with_capacity(self.num_dofs());
        for e in 0..self.num_elements() {
            let g = &self.geometry[e];
            let mut rhs = DVector::zeros(n);
            for (qp, (&xi, &w)) in tab.rule.points.iter().zip(&tab.rule.weights).enumerate() {
                let fx = f(g.to_physical(xi));
                for i in 0..n {
                    rhs[i] += w * fx * tab.values[qp][i];
                }
            }
            // Element mass is det * reference mass; the det factors cancel.
            let local = &self.reference_mass_inv * rhs;
            out.extend(local.iter());
        }
        FieldVector(out)
    }

    /// Field values at element `e`'s points of a volume table.
    pub fn values_at(&self, field: &[f64], e: usize, table: &VolumeTable) -> Vec<f64> {
        let local = &field[self.dofs(e)];
        table
            .values
            .iter()
            .map(|phi| phi.iter().zip(local).map(|(p, c)| p * c).sum())
            .collect()
    }

    /// Physical gradients of a field at element `e`'s points of a volume table.
    pub fn gradients_at(&self, field: &[f64], e: usize, table: &VolumeTable) -> Vec<Point> {
        let local = &field[self.dofs(e)];
        let g = &self.geometry[e];
        table
            .ref_gradients
            .iter()
            .map(|dphi| {
                let mut r = [0.0; 2];
                for (d, c) in dphi.iter().zip(local) {
                    r[0] += c * d[0];
                    r[1] += c * d[1];
                }
                g.push_gradient(r)
            })
            .collect()
    }

    /// Trace values of a field at a face's quadrature points, one vector per incident element.
    pub fn face_values(&self, field: &[f64], f: usize) -> Vec<Vec<f64>> {
        self.face_tables[f]
            .traces
            .iter()
            .map(|tr| {
                let local = &field[self.dofs(tr.element)];
                tr.values
                    .iter()
                    .map(|phi| phi.iter().zip(local).map(|(p, c)| p * c).sum())
                    .collect()
            })
            .collect()
    }

    /// Trace gradients of a field at a face's quadrature points, one vector per incident element.
    pub fn face_gradients(&self, field: &[f64], f: usize) -> Vec<Vec<Point>> {
        self.face_tables[f]
            .traces
            .iter()
            .map(|tr| {
                let local = &field[self.dofs(tr.element)];
                tr.gradients
                    .iter()
                    .map(|dphi| {
                        let mut r = [0.0; 2];
                        for (d, c) in dphi.iter().zip(local) {
                            r[0] += c * d[0];
                            r[1] += c * d[1];
                        }
                        r
                    })
                    .collect()
            })
            .collect()
    }

    /// Smallest constant `C` with `||phi||_F <= C h_K^{-1/2} ||phi||_K` over all
    /// element/face pairs and all local polynomials, by generalized eigenvalues.
    pub fn trace_constant(&self) -> f64 {
        let n = self.basis.len();
        let mut worst: f64 = 0.0;
        for f in 0..self.mesh.num_faces() {
            let table = &self.face_tables[f];
            for tr in &table.traces {
                let mut face_mass = DMatrix::zeros(n, n);
                for (qp, w) in table.weights.iter().enumerate() {
                    let phi = &tr.values[qp];
                    for i in 0..n {
                        for j in 0..n {
                            face_mass[(i, j)] += w * phi[i] * phi[j];
                        }
                    }
                }
                let elem_mass = &self.reference_mass * self.geometry[tr.element].det;
                let h_k = self.mesh.element_diameters[tr.element];
                let lambda = max_generalized_eigenvalue(&(face_mass * h_k), &elem_mass);
                worst = worst.max(lambda);
            }
        }
        worst.sqrt()
    }
}

/// Largest `lambda` with `A x = lambda B x`, `A` symmetric and `B` SPD.
pub(crate) fn max_generalized_eigenvalue(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let chol = b.clone().cholesky().expect("mass matrix must be SPD");
    let l_inv = chol
        .l()
        .try_inverse()
        .expect("Cholesky factor of an SPD matrix is invertible");
    let c = &l_inv * a * l_inv.transpose();
    let sym = (&c + c.transpose()) * 0.5;
    sym.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::MIN, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_space(n: usize, q: usize) -> DgSpace {
        let mesh = Arc::new(Mesh::rectangle([0.0, 1.0], [0.0, 1.0], n, n).unwrap());
        DgSpace::new(mesh, q).unwrap()
    }

    #[test]
    fn kronecker_and_partition_of_unity() {
        for q in 1..=3 {
            let b = ReferenceBasis::new(q).unwrap();
            assert_eq!(b.len(), (q + 1) * (q + 2) / 2);
            for (i, &node) in b.nodes().iter().enumerate() {
                let v = b.values(node);
                for (j, vj) in v.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((vj - expected).abs() < 1e-12);
                }
            }
            for xi in [[0.1, 0.2], [0.7, 0.05], [0.3, 0.3]] {
                let s: f64 = b.values(xi).iter().sum();
                assert!((s - 1.0).abs() < 1e-13);
                let g = b.gradients(xi);
                let gs = g.iter().fold([0.0, 0.0], |a, d| [a[0] + d[0], a[1] + d[1]]);
                assert!(gs[0].abs() < 1e-12 && gs[1].abs() < 1e-12);
            }
        }
        assert!(ReferenceBasis::new(0).is_err());
        assert!(ReferenceBasis::new(4).is_err());
    }

    #[test]
    fn constants_and_linears() {
        let s = unit_space(3, 1);
        let c = s.constant(2.5);
        let lin = s.interpolate(|p| p[0]);
        for e in 0..s.num_elements() {
            assert!((s.eval(&c, e, [0.2, 0.3]).unwrap() - 2.5).abs() < 1e-14);
            let g = s.eval_grad(&c, e, [0.2, 0.3]).unwrap();
            assert!(g[0].abs() < 1e-13 && g[1].abs() < 1e-13);
            let g = s.eval_grad(&lin, e, [0.25, 0.25]).unwrap();
            assert!((g[0] - 1.0).abs() < 1e-12 && g[1].abs() < 1e-12);
        }
        assert!(matches!(
            s.eval(&c, 999, [0.0, 0.0]),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn quadratic_gradient_is_exact() {
        let s = unit_space(4, 2);
        let f = s.interpolate(|p| p[0] * p[0] + p[1] * p[1]);
        for e in 0..s.num_elements() {
            for xi in [[0.2, 0.1], [0.5, 0.4]] {
                let x = s.geometry(e).to_physical(xi);
                let g = s.eval_grad(&f, e, xi).unwrap();
                assert!((g[0] - 2.0 * x[0]).abs() < 1e-12);
                assert!((g[1] - 2.0 * x[1]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projection_reproduces_polynomials_and_means() {
        let s = unit_space(3, 2);
        let c = s.l2_project(|_| 3.0);
        assert!(c.iter().all(|v| (v - 3.0).abs() < 1e-12));
        let a = s.l2_project(|p| p[0]);
        let b = s.interpolate(|p| p[0]);
        assert!(a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() < 1e-12));

        // Discontinuous data: the element integral is preserved.
        let s1 = unit_space(2, 1);
        let f = |p: Point| if p[0] > 0.3 { 1.0 } else { -1.0 };
        let proj = s1.l2_project(f);
        let tab = s1.load_table();
        for e in 0..s1.num_elements() {
            let g = s1.geometry(e);
            let vals = s1.values_at(&proj, e, tab);
            let (mut ip, mut iff) = (0.0, 0.0);
            for (qp, (&xi, &w)) in tab.rule.points.iter().zip(&tab.rule.weights).enumerate() {
                ip += w * g.det * vals[qp];
                iff += w * g.det * f(g.to_physical(xi));
            }
            assert!((ip - iff).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_residual_is_orthogonal() {
        let s = unit_space(2, 2);
        let f = |p: Point| (3.0 * p[0]).sin() * (p[1] + 0.5).ln();
        let proj = s.l2_project(f);
        let tab = s.load_table();
        for e in 0..s.num_elements() {
            let g = s.geometry(e);
            let vals = s.values_at(&proj, e, tab);
            for i in 0..s.dofs_per_element() {
                let r: f64 = tab
                    .rule
                    .points
                    .iter()
                    .zip(&tab.rule.weights)
                    .enumerate()
                    .map(|(qp, (&xi, &w))| {
                        w * g.det * (f(g.to_physical(xi)) - vals[qp]) * tab.values[qp][i]
                    })
                    .sum();
                assert!(r.abs() < 1e-11);
            }
        }
    }

    #[test]
    fn interpolation_reproduces_degree_q() {
        for q in 1..=3 {
            let s = unit_space(3, q);
            let poly = |p: Point| {
                (0..=q)
                    .map(|k| p[0].powi(k as i32) * p[1].powi((q - k) as i32))
                    .sum::<f64>()
                    + 1.0
            };
            let f = s.interpolate(poly);
            for e in 0..s.num_elements() {
                for xi in [[0.1, 0.7], [0.33, 0.21]] {
                    let x = s.geometry(e).to_physical(xi);
                    assert!((s.eval(&f, e, xi).unwrap() - poly(x)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn trace_constant_is_mesh_independent() {
        for q in 1..=2 {
            let c1 = unit_space(2, q).trace_constant();
            let c2 = unit_space(8, q).trace_constant();
            assert!((c1 - c2).abs() < 1e-8 * c1, "q={q}: {c1} vs {c2}");
            assert!(c1 > 1.0 && c1 < 10.0);
        }
    }
}
