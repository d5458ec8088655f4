//! Vertex-field export: legacy VTK (ASCII unstructured grid) and flat CSV.

use std::fmt::Write as _;
use std::path::Path;

use super::mesh::TriMesh;
use crate::error::{Error, Result};

/// Named per-vertex scalar arrays.
pub type Fields<'a> = [(&'a str, &'a [f64])];

fn check(mesh: &TriMesh, fields: &Fields<'_>) -> Result<()> {
    for (name, v) in fields {
        if v.len() != mesh.n_vertices() {
            return Err(Error::InvalidInput(format!(
                "field '{name}' has {} values for {} vertices",
                v.len(),
                mesh.n_vertices()
            )));
        }
    }
    Ok(())
}

/// Legacy VTK text. With `deform = Some(([u1, u2], scale))` points are moved
/// to x + scale·u.
pub fn vtk_string(mesh: &TriMesh, title: &str, fields: &Fields<'_>, deform: Option<([&[f64]; 2], f64)>) -> Result<String> {
    check(mesh, fields)?;
    if let Some(([u1, u2], _)) = deform {
        check(mesh, &[("u1", u1), ("u2", u2)])?;
    }
    let mut s = String::new();
    let title = title.replace('\n', " ");
    let _ = writeln!(s, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", mesh.n_vertices());
    for (i, x) in mesh.vertices().iter().enumerate() {
        let (dx, dy) = match deform {
            Some(([u1, u2], k)) => (k * u1[i], k * u2[i]),
            None => (0.0, 0.0),
        };
        let _ = writeln!(s, "{:e} {:e} 0", x[0] + dx, x[1] + dy);
    }
    let nt = mesh.n_triangles();
    let _ = writeln!(s, "CELLS {nt} {}", 4 * nt);
    for t in mesh.triangles() {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {nt}");
    for _ in 0..nt {
        s.push_str("5\n");
    }
    if !fields.is_empty() {
        let _ = writeln!(s, "POINT_DATA {}", mesh.n_vertices());
        for (name, values) in fields {
            let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
            for v in values.iter() {
                let _ = writeln!(s, "{v:e}");
            }
        }
    }
    Ok(s)
}

/// CSV with header `vertex,x,y,<names>`.
pub fn csv_string(mesh: &TriMesh, fields: &Fields<'_>) -> Result<String> {
    check(mesh, fields)?;
    let mut s = String::from("vertex,x,y");
    for (name, _) in fields {
        s.push(',');
        s.push_str(name);
    }
    s.push('\n');
    for (i, x) in mesh.vertices().iter().enumerate() {
        let _ = write!(s, "{i},{:e},{:e}", x[0], x[1]);
        for (_, v) in fields {
            let _ = write!(s, ",{:e}", v[i]);
        }
        s.push('\n');
    }
    Ok(s)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::BoundaryEdge;

    fn one_triangle() -> TriMesh {
        let b = |a, c| BoundaryEdge {
            vertices: [a, c],
            tag: "wall".into(),
        };
        TriMesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            vec![[0, 1, 2]],
            vec![b(0, 1), b(1, 2), b(2, 0)],
        )
        .unwrap()
    }

    #[test]
    fn vtk_golden() {
        let m = one_triangle();
        let p = [1.0, 2.0, 0.5];
        let got = vtk_string(&m, "demo", &[("p", &p)], None).unwrap();
        let golden = "# vtk DataFile Version 3.0\ndemo\nASCII\nDATASET UNSTRUCTURED_GRID\n\
POINTS 3 double\n0e0 0e0 0\n1e0 0e0 0\n0e0 1e0 0\n\
CELLS 1 4\n3 0 1 2\nCELL_TYPES 1\n5\n\
POINT_DATA 3\nSCALARS p double 1\nLOOKUP_TABLE default\n1e0\n2e0\n5e-1\n";
        assert_eq!(got, golden);
    }

    #[test]
    fn deformation_moves_points() {
        let m = one_triangle();
        let u1 = [0.0, 1e-5, 0.0];
        let u2 = [0.0, 0.0, -2e-5];
        let got = vtk_string(&m, "d", &[], Some(([&u1, &u2], 1e5))).unwrap();
        assert!(got.contains("\n2e0 0e0 0\n0e0 -1e0 0\n"));
        assert!(!got.contains("POINT_DATA"));
    }

    #[test]
    fn csv_layout_and_length_check() {
        let m = one_triangle();
        let z = [0.0; 3];
        let csv = csv_string(&m, &[("u1", &z), ("u2", &z), ("p", &[3.0, 0.0, 0.0])]).unwrap();
        assert_eq!(csv.lines().next().unwrap(), "vertex,x,y,u1,u2,p");
        assert_eq!(csv.lines().nth(1).unwrap(), "0,0e0,0e0,0e0,0e0,3e0");
        assert!(csv_string(&m, &[("bad", &[1.0])]).is_err());
    }
}
