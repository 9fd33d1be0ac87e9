//! CSV and VTK legacy writers.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;
use crate::space::DgSpace;

/// Reference corners in the vertex order of the mesh triangles.
const CORNERS: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

/// Writes `header` followed by `rows`, one per line.
pub fn write_csv(path: &Path, header: &str, rows: impl IntoIterator<Item = String>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{header}")?;
    for r in rows {
        writeln!(w, "{r}")?;
    }
    w.flush()?;
    Ok(())
}

/// Legacy ASCII VTK v3.0 unstructured grid.
///
/// Each triangle owns its three corner points, so discontinuous fields keep
/// their element-local values. Fields are sampled at the corners.
pub fn vtk_string(space: &DgSpace, title: &str, fields: &[(&str, &[f64])]) -> Result<String> {
    let mesh = space.mesh();
    let ne = mesh.num_elements();
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "{}", title.replace('\n', " "));
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", 3 * ne);
    for e in 0..ne {
        for v in mesh.element_vertices(e) {
            let _ = writeln!(s, "{:.12e} {:.12e} 0", v[0], v[1]);
        }
    }
    let _ = writeln!(s, "CELLS {} {}", ne, 4 * ne);
    for e in 0..ne {
        let _ = writeln!(s, "3 {} {} {}", 3 * e, 3 * e + 1, 3 * e + 2);
    }
    let _ = writeln!(s, "CELL_TYPES {ne}");
    for _ in 0..ne {
        let _ = writeln!(s, "5");
    }
    if !fields.is_empty() {
        let _ = writeln!(s, "POINT_DATA {}", 3 * ne);
        for (name, field) in fields {
            space.check_field(field)?;
            let _ = writeln!(s, "SCALARS {name} double 1");
            let _ = writeln!(s, "LOOKUP_TABLE default");
            for e in 0..ne {
                for xi in CORNERS {
                    let _ = writeln!(s, "{:.12e}", space.eval(field, e, xi)?);
                }
            }
        }
    }
    Ok(s)
}

pub fn write_vtk(
    path: &Path,
    space: &DgSpace,
    title: &str,
    fields: &[(&str, &[f64])],
) -> Result<()> {
    fs::write(path, vtk_string(space, title, fields)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;
    use std::sync::Arc;

    #[test]
    fn vtk_layout() {
        let mesh = Mesh::rectangle([0.0, 1.0], [0.0, 1.0], 2, 1).unwrap();
        let space = DgSpace::new(Arc::new(mesh), 2).unwrap();
        let f = space.interpolate(|x| x[0] + 2.0 * x[1]);
        let s = vtk_string(&space, "t", &[("f", &f)]).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# vtk DataFile Version 3.0");
        assert!(s.contains("POINTS 12 double"));
        assert!(s.contains("CELLS 4 16"));
        assert!(s.contains("POINT_DATA 12"));
        // Corner samples reproduce the linear field at the corner coordinates.
        let p0 = lines.iter().position(|l| l.starts_with("POINTS")).unwrap() + 1;
        let d0 = lines
            .iter()
            .position(|l| *l == "LOOKUP_TABLE default")
            .unwrap()
            + 1;
        for k in 0..12 {
            let c: Vec<f64> = lines[p0 + k]
                .split(' ')
                .map(|v| v.parse().unwrap())
                .collect();
            let v: f64 = lines[d0 + k].parse().unwrap();
            assert!((v - (c[0] + 2.0 * c[1])).abs() < 1e-11);
        }
    }
}
