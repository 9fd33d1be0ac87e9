//! Simplicial meshes of axis-aligned rectangles with face topology.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::quadrature::unit_interval_rule;

pub type Point = [f64; 2];

/// Geometric side of the bounding rectangle a boundary face lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Bottom, Side::Right, Side::Top, Side::Left];

    pub fn name(self) -> &'static str {
        match self {
            Side::Bottom => "bottom",
            Side::Right => "right",
            Side::Top => "top",
            Side::Left => "left",
        }
    }
}

/// Inflow/outflow classification of a boundary face for a convective velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryTag {
    /// `v . n < 0`
    Inflow,
    /// `v . n >= 0`
    Outflow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FaceKind {
    /// `left` is K1 and `right` is K2; the face normal points from K1 into K2.
    Interior { left: usize, right: usize },
    Boundary {
        element: usize,
        side: Side,
        tag: BoundaryTag,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub vertices: [usize; 2],
    pub kind: FaceKind,
    pub normal: Point,
    pub length: f64,
}

impl Face {
    pub fn is_interior(&self) -> bool {
        matches!(self.kind, FaceKind::Interior { .. })
    }

    pub fn boundary_side(&self) -> Option<Side> {
        match self.kind {
            FaceKind::Boundary { side, .. } => Some(side),
            FaceKind::Interior { .. } => None,
        }
    }

    pub fn boundary_tag(&self) -> Option<BoundaryTag> {
        match self.kind {
            FaceKind::Boundary { tag, .. } => Some(tag),
            FaceKind::Interior { .. } => None,
        }
    }
}

/// Conforming triangulation of a rectangle.
///
/// Elements are counterclockwise vertex triples. Faces are stored once; an
/// interior face records both neighbours and a boundary face records its
/// owning element, the side of the rectangle it lies on, and its
/// inflow/outflow tag for the velocity the mesh was last classified against.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    pub elements: Vec<[usize; 3]>,
    pub faces: Vec<Face>,
    /// Face index of local edge `k` (from vertex `k` to vertex `k + 1`).
    pub element_faces: Vec<[usize; 3]>,
    pub element_diameters: Vec<f64>,
    pub mesh_size: f64,
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    classified_for: Point,
}

impl Mesh {
    /// Uniform `nx` x `ny` grid of rectangles, each split along the diagonal
    /// from its lower-left to its upper-right corner.
    pub fn rectangle(x_range: [f64; 2], y_range: [f64; 2], nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Config(format!(
                "cell counts must be positive, got nx = {nx}, ny = {ny}"
            )));
        }
        let finite = x_range.iter().chain(&y_range).all(|v| v.is_finite());
        if !finite || x_range[1] <= x_range[0] || y_range[1] <= y_range[0] {
            return Err(Error::Config(format!(
                "degenerate domain {x_range:?} x {y_range:?}"
            )));
        }
        let dx = (x_range[1] - x_range[0]) / nx as f64;
        let dy = (y_range[1] - y_range[0]) / ny as f64;
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                // Pin the last row/column to the exact range endpoints.
                let x = if i == nx {
                    x_range[1]
                } else {
                    x_range[0] + i as f64 * dx
                };
                let y = if j == ny {
                    y_range[1]
                } else {
                    y_range[0] + j as f64 * dy
                };
                vertices.push([x, y]);
            }
        }
        let vid = |i: usize, j: usize| j * (nx + 1) + i;
        let mut elements = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (v00, v10, v01, v11) =
                    (vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1));
                elements.push([v00, v10, v11]);
                elements.push([v00, v11, v01]);
            }
        }
        Self::from_elements(vertices, elements, x_range, y_range)
    }

    fn from_elements(
        vertices: Vec<Point>,
        elements: Vec<[usize; 3]>,
        x_range: [f64; 2],
        y_range: [f64; 2],
    ) -> Result<Self> {
        let mut edge_owners: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for (e, tri) in elements.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                edge_owners
                    .entry((a.min(b), a.max(b)))
                    .or_default()
                    .push((e, k));
            }
        }
        // Deterministic face numbering: by first owning element, then local edge.
        let mut keys: Vec<_> = edge_owners.into_iter().collect();
        keys.sort_by_key(|(_, owners)| owners[0]);

        let extent = (x_range[1] - x_range[0]).max(y_range[1] - y_range[0]);
        let tol = 1e-10 * extent;
        let mut faces = Vec::with_capacity(keys.len());
        let mut element_faces = vec![[usize::MAX; 3]; elements.len()];
        for (_, owners) in keys {
            let (e1, k1) = owners[0];
            let tri = elements[e1];
            let (a, b) = (tri[k1], tri[(k1 + 1) % 3]);
            let (pa, pb) = (vertices[a], vertices[b]);
            let (tx, ty) = (pb[0] - pa[0], pb[1] - pa[1]);
            let length = tx.hypot(ty);
            // Outward normal of a counterclockwise element on edge a -> b.
            let normal = [ty / length, -tx / length];
            let kind = match owners.as_slice() {
                [_] => {
                    let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
                    let side = if (mid[1] - y_range[0]).abs() < tol {
                        Side::Bottom
                    } else if (mid[0] - x_range[1]).abs() < tol {
                        Side::Right
                    } else if (mid[1] - y_range[1]).abs() < tol {
                        Side::Top
                    } else if (mid[0] - x_range[0]).abs() < tol {
                        Side::Left
                    } else {
                        return Err(Error::Internal(format!(
                            "boundary edge ({a}, {b}) is not on the domain boundary"
                        )));
                    };
                    FaceKind::Boundary {
                        element: e1,
                        side,
                        tag: BoundaryTag::Outflow,
                    }
                }
                [_, (e2, k2)] => {
                    element_faces[*e2][*k2] = faces.len();
                    FaceKind::Interior {
                        left: e1,
                        right: *e2,
                    }
                }
                _ => {
                    return Err(Error::Internal(format!(
                        "edge ({a}, {b}) shared by {} elements",
                        owners.len()
                    )))
                }
            };
            element_faces[e1][k1] = faces.len();
            faces.push(Face {
                vertices: [a, b],
                kind,
                normal,
                length,
            });
        }

        let element_diameters: Vec<f64> = elements
            .iter()
            .map(|tri| {
                (0..3)
                    .map(|k| distance(vertices[tri[k]], vertices[tri[(k + 1) % 3]]))
                    .fold(0.0, f64::max)
            })
            .collect();
        let mesh_size = element_diameters.iter().copied().fold(0.0, f64::max);
        let mesh = Self {
            vertices,
            elements,
            faces,
            element_faces,
            element_diameters,
            mesh_size,
            x_range,
            y_range,
            classified_for: [0.0, 0.0],
        };
        if let Some(e) = (0..mesh.num_elements()).find(|&e| mesh.element_area(e) <= 0.0) {
            return Err(Error::Internal(format!(
                "element {e} has non-positive area"
            )));
        }
        Ok(mesh)
    }

    /// Returns a copy with every boundary face tagged for the constant velocity `v`:
    /// inflow iff `v . n < 0`, outflow otherwise.
    pub fn classify_boundary(&self, v: Point) -> Mesh {
        let mut mesh = self.clone();
        for face in &mut mesh.faces {
            if let FaceKind::Boundary { tag, .. } = &mut face.kind {
                let vn = v[0] * face.normal[0] + v[1] * face.normal[1];
                *tag = if vn < 0.0 {
                    BoundaryTag::Inflow
                } else {
                    BoundaryTag::Outflow
                };
            }
        }
        mesh.classified_for = v;
        mesh
    }

    /// Velocity used for the current boundary tags (zero if never classified).
    pub fn classified_for(&self) -> Point {
        self.classified_for
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn element_vertices(&self, e: usize) -> [Point; 3] {
        let tri = self.elements[e];
        [
            self.vertices[tri[0]],
            self.vertices[tri[1]],
            self.vertices[tri[2]],
        ]
    }

    /// Signed area (positive for counterclockwise elements).
    pub fn element_area(&self, e: usize) -> f64 {
        let [a, b, c] = self.element_vertices(e);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    /// Inradius over diameter.
    pub fn element_quality(&self, e: usize) -> f64 {
        let [a, b, c] = self.element_vertices(e);
        let perimeter = distance(a, b) + distance(b, c) + distance(c, a);
        let inradius = 2.0 * self.element_area(e) / perimeter;
        inradius / self.element_diameters[e]
    }

    pub fn domain_area(&self) -> f64 {
        (self.x_range[1] - self.x_range[0]) * (self.y_range[1] - self.y_range[0])
    }

    pub fn face_midpoint(&self, f: usize) -> Point {
        let [a, b] = self.faces[f].vertices;
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]
    }

    /// Gauss points and weights on face `f`, exact for polynomials of degree
    /// `degree` along the segment. Weights sum to the face length.
    pub fn face_quadrature(&self, f: usize, degree: usize) -> Result<(Vec<Point>, Vec<f64>)> {
        let face = self
            .faces
            .get(f)
            .ok_or_else(|| Error::OutOfRange(format!("face {f}")))?;
        let (s, w) = unit_interval_rule(degree)?;
        let (pa, pb) = (
            self.vertices[face.vertices[0]],
            self.vertices[face.vertices[1]],
        );
        let points = s
            .iter()
            .map(|&si| [pa[0] + si * (pb[0] - pa[0]), pa[1] + si * (pb[1] - pa[1])])
            .collect();
        let weights = w.iter().map(|wi| wi * face.length).collect();
        Ok((points, weights))
    }

    pub fn interior_faces(&self) -> impl Iterator<Item = (usize, &Face)> {
        self.faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.is_interior())
    }

    pub fn boundary_faces(&self) -> impl Iterator<Item = (usize, &Face)> {
        self.faces
            .iter()
            .enumerate()
            .filter(|(_, f)| !f.is_interior())
    }
}

fn distance(a: Point, b: Point) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn study_mesh_sizes() {
        let m = Mesh::rectangle([0.0, 1.0], [0.0, 2.0], 8, 16).unwrap();
        assert_eq!(m.num_elements(), 256);
        assert!((m.mesh_size - 0.176776695296637).abs() < 1e-12);
        let m = Mesh::rectangle([0.0, 1.0], [0.0, 2.0], 12, 24).unwrap();
        assert!((m.mesh_size - 0.117851130197758).abs() < 1e-12);
    }

    #[test]
    fn single_cell() {
        let m = Mesh::rectangle([0.0, 1.0], [0.0, 1.0], 1, 1).unwrap();
        assert_eq!(m.num_elements(), 2);
        let area: f64 = (0..2).map(|e| m.element_area(e)).sum();
        assert!((area - 1.0).abs() < 1e-15);
        assert!((m.mesh_size - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(m.num_faces(), 5);
    }

    #[test]
    fn rejects_bad_counts() {
        assert!(matches!(
            Mesh::rectangle([0.0, 1.0], [0.0, 1.0], 0, 3),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            Mesh::rectangle([1.0, 1.0], [0.0, 1.0], 2, 3),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn topology_invariants() {
        let m = Mesh::rectangle([0.0, 1.0], [0.0, 2.0], 5, 7).unwrap();
        let mut count = vec![0usize; m.num_faces()];
        for ef in &m.element_faces {
            for &f in ef {
                count[f] += 1;
            }
        }
        for (f, face) in m.faces.iter().enumerate() {
            let expected = if face.is_interior() { 2 } else { 1 };
            assert_eq!(count[f], expected);
            assert!(face.length <= m.mesh_size + 1e-15);
        }
        let area: f64 = (0..m.num_elements()).map(|e| m.element_area(e)).sum();
        assert!((area - m.domain_area()).abs() <= 1e-12 * m.domain_area());
    }

    #[test]
    fn interior_normals_point_left_to_right() {
        let m = Mesh::rectangle([0.0, 1.0], [0.0, 1.0], 3, 3).unwrap();
        let centroid = |e: usize| {
            let [a, b, c] = m.element_vertices(e);
            [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
        };
        for (f, face) in m.interior_faces() {
            let FaceKind::Interior { left, right } = face.kind else {
                unreachable!()
            };
            let mid = m.face_midpoint(f);
            let (cl, cr) = (centroid(left), centroid(right));
            let to_right = (cr[0] - mid[0]) * face.normal[0] + (cr[1] - mid[1]) * face.normal[1];
            let to_left = (cl[0] - mid[0]) * face.normal[0] + (cl[1] - mid[1]) * face.normal[1];
            assert!(to_right > 0.0 && to_left < 0.0);
        }
        for (f, face) in m.boundary_faces() {
            let mid = m.face_midpoint(f);
            let expected = match face.boundary_side().unwrap() {
                Side::Bottom => [0.0, -1.0],
                Side::Right => [1.0, 0.0],
                Side::Top => [0.0, 1.0],
                Side::Left => [-1.0, 0.0],
            };
            assert!((face.normal[0] - expected[0]).abs() < 1e-14, "{mid:?}");
            assert!((face.normal[1] - expected[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn discrete_divergence_of_constant_field_vanishes() {
        let m = Mesh::rectangle([0.0, 1.0], [0.0, 2.0], 4, 6).unwrap();
        let w = [0.3, -1.7];
        let mut total = 0.0;
        for e in 0..m.num_elements() {
            for &f in &m.element_faces[e] {
                let face = &m.faces[f];
                let sign = match face.kind {
                    FaceKind::Interior { left, .. } if left != e => -1.0,
                    _ => 1.0,
                };
                let flux = sign * (w[0] * face.normal[0] + w[1] * face.normal[1]) * face.length;
                if face.is_interior() {
                    total += flux;
                }
            }
        }
        assert!(total.abs() < 1e-12);
    }

    #[test]
    fn refinement_halves_h_and_quality_is_bounded() {
        let coarse = Mesh::rectangle([0.0, 1.0], [0.0, 2.0], 4, 8).unwrap();
        let fine = Mesh::rectangle([0.0, 1.0], [0.0, 2.0], 8, 16).unwrap();
        assert!((coarse.mesh_size - 2.0 * fine.mesh_size).abs() < 1e-14);
        for m in [&coarse, &fine] {
            let qmin = (0..m.num_elements())
                .map(|e| m.element_quality(e))
                .fold(f64::MAX, f64::min);
            assert!(qmin > 0.2);
        }
    }

    #[test]
    fn classify_vertical_flow() {
        let m = Mesh::rectangle([0.0, 1.0], [0.0, 2.0], 4, 8)
            .unwrap()
            .classify_boundary([0.0, 1.0]);
        for (_, face) in m.boundary_faces() {
            let inflow = face.boundary_tag() == Some(BoundaryTag::Inflow);
            assert_eq!(inflow, face.boundary_side() == Some(Side::Bottom));
        }
    }

    #[test]
    fn classify_zero_and_diagonal_flow() {
        let base = Mesh::rectangle([0.0, 1.0], [0.0, 1.0], 3, 3).unwrap();
        let m = base.classify_boundary([0.0, 0.0]);
        assert!(m
            .boundary_faces()
            .all(|(_, f)| f.boundary_tag() == Some(BoundaryTag::Outflow)));
        let s = 0.5f64.sqrt();
        let m = base.classify_boundary([s, s]);
        for (_, face) in m.boundary_faces() {
            let inflow = face.boundary_tag() == Some(BoundaryTag::Inflow);
            let side = face.boundary_side().unwrap();
            assert_eq!(inflow, matches!(side, Side::Left | Side::Bottom));
        }
    }

    #[test]
    fn face_quadrature_rules() {
        let m = Mesh::rectangle([0.0, 1.0], [0.0, 1.0], 1, 1).unwrap();
        let f = m
            .boundary_faces()
            .find(|(_, face)| face.boundary_side() == Some(Side::Bottom))
            .map(|(i, _)| i)
            .unwrap();
        let (p, w) = m.face_quadrature(f, 1).unwrap();
        assert_eq!(p.len(), 1);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let lin: f64 = p.iter().zip(&w).map(|(p, w)| w * p[0]).sum();
        assert!((lin - 0.5).abs() < 1e-15);
        let (p, w) = m.face_quadrature(f, 5).unwrap();
        let cubic: f64 = p.iter().zip(&w).map(|(p, w)| w * p[0].powi(3)).sum();
        assert!((cubic - 0.25).abs() < 1e-15);

        let half = Mesh::rectangle([0.0, 0.5], [0.0, 0.5], 1, 1).unwrap();
        let (p, w) = half.face_quadrature(0, 1).unwrap();
        assert_eq!(p.len(), 1);
        assert!((w[0] - 0.5).abs() < 1e-15);
        assert!(matches!(m.face_quadrature(f, 0), Err(Error::Config(_))));
    }
}
