//! Plain-text mesh format and legacy ASCII VTK export.
//!
//! Text layout:
//! ```text
//! NODES n
//! x y            (n lines)
//! TRIANGLES t
//! i j k          (t lines)
//! BEDGES b
//! i j tag        (b lines, tag in {Dir, Lo, Up})
//! ```
//! `#` starts a comment anywhere.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::mesh::{BoundaryEdge, Mesh};

pub fn write_mesh(path: &Path, mesh: &Mesh) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "NODES {}", mesh.nodes().len())?;
    for p in mesh.nodes() {
        writeln!(f, "{} {}", p.x, p.y)?;
    }
    writeln!(f, "TRIANGLES {}", mesh.triangles().len())?;
    for t in mesh.triangles() {
        writeln!(f, "{} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(f, "BEDGES {}", mesh.boundary_edges().len())?;
    for e in mesh.boundary_edges() {
        writeln!(f, "{} {} {}", e.a, e.b, e.tag.as_str())?;
    }
    Ok(())
}

fn expect_header(lines: &mut impl Iterator<Item = String>, name: &str) -> Result<usize> {
    let line = lines
        .next()
        .ok_or_else(|| Error::Parse(format!("missing `{name}` header")))?;
    let mut it = line.split_whitespace();
    match (it.next(), it.next(), it.next()) {
        (Some(k), Some(v), None) if k == name => v
            .parse()
            .map_err(|e| Error::Parse(format!("bad `{name}` count: {e}"))),
        _ => Err(Error::Parse(format!("expected `{name} <count>`, got `{line}`"))),
    }
}

pub fn read_mesh(path: &Path) -> Result<Mesh> {
    let file = std::fs::File::open(path)?;
    let mut lines = BufReader::new(file)
        .lines()
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|l| l.split('#').next().unwrap_or("").trim().to_string())
        .filter(|l| !l.is_empty());

    let n = expect_header(&mut lines, "NODES")?;
    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse("truncated node list".into()))?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|e| Error::Parse(format!("bad node: {e}"))))
            .collect::<Result<_>>()?;
        if vals.len() != 2 {
            return Err(Error::Parse(format!("expected `x y`, got `{line}`")));
        }
        nodes.push(Point2::new(vals[0], vals[1]));
    }

    let t = expect_header(&mut lines, "TRIANGLES")?;
    let mut triangles = Vec::with_capacity(t);
    for _ in 0..t {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse("truncated triangle list".into()))?;
        let vals: Vec<usize> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse()
                    .map_err(|e| Error::Parse(format!("bad triangle: {e}")))
            })
            .collect::<Result<_>>()?;
        if vals.len() != 3 {
            return Err(Error::Parse(format!("expected `i j k`, got `{line}`")));
        }
        triangles.push([vals[0], vals[1], vals[2]]);
    }

    let b = expect_header(&mut lines, "BEDGES")?;
    let mut boundary_edges = Vec::with_capacity(b);
    for _ in 0..b {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse("truncated boundary list".into()))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::Parse(format!("expected `i j tag`, got `{line}`")));
        }
        boundary_edges.push(BoundaryEdge {
            a: toks[0]
                .parse()
                .map_err(|e| Error::Parse(format!("bad edge: {e}")))?,
            b: toks[1]
                .parse()
                .map_err(|e| Error::Parse(format!("bad edge: {e}")))?,
            tag: toks[2].parse()?,
        });
    }

    Mesh::new(nodes, triangles, boundary_edges)
}

/// Legacy ASCII VTK unstructured grid, with an optional per-node vector
/// field (written as 3-vectors with zero z).
pub fn write_vtk(path: &Path, mesh: &Mesh, field: Option<(&str, &[[f64; 2]])>) -> Result<()> {
    if let Some((_, values)) = field {
        if values.len() != mesh.nodes().len() {
            return Err(Error::Mesh(format!(
                "field has {} entries for {} nodes",
                values.len(),
                mesh.nodes().len()
            )));
        }
    }
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "# vtk DataFile Version 3.0")?;
    writeln!(f, "roofopt mesh")?;
    writeln!(f, "ASCII")?;
    writeln!(f, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(f, "POINTS {} double", mesh.nodes().len())?;
    for p in mesh.nodes() {
        writeln!(f, "{} {} 0", p.x, p.y)?;
    }
    let nt = mesh.triangles().len();
    writeln!(f, "CELLS {} {}", nt, 4 * nt)?;
    for t in mesh.triangles() {
        writeln!(f, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(f, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(f, "5")?;
    }
    if let Some((name, values)) = field {
        writeln!(f, "POINT_DATA {}", mesh.nodes().len())?;
        writeln!(f, "VECTORS {name} double")?;
        for v in values {
            writeln!(f, "{} {} 0", v[0], v[1])?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_roof_mesh, RoofProfile};

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("roofopt_mesh_io");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn text_roundtrip() {
        let profile = RoofProfile {
            x0: 0.0,
            length: 1.5,
            knot_heights: vec![0.0, 0.4, 0.1],
            thickness: 0.5,
        };
        let mesh = build_roof_mesh(&profile, 0.2).unwrap();
        let path = tmp("roof.mesh");
        write_mesh(&path, &mesh).unwrap();
        let back = read_mesh(&path).unwrap();
        assert_eq!(back.triangles(), mesh.triangles());
        assert_eq!(back.nodes().len(), mesh.nodes().len());
        for (p, q) in back.nodes().iter().zip(mesh.nodes()) {
            assert!(p.x == q.x && p.y == q.y);
        }
        assert_eq!(back.boundary_edges().len(), mesh.boundary_edges().len());
    }

    #[test]
    fn vtk_export_has_expected_sections() {
        let profile = RoofProfile {
            x0: 0.0,
            length: 1.0,
            knot_heights: vec![0.0, 0.0],
            thickness: 1.0,
        };
        let mesh = build_roof_mesh(&profile, 0.5).unwrap();
        let field: Vec<[f64; 2]> = mesh.nodes().iter().map(|p| [p.x, p.y]).collect();
        let path = tmp("roof.vtk");
        write_vtk(&path, &mesh, Some(("displacement", &field))).unwrap();
        let body = std::fs::read_to_string(&path).unwrap();
        for section in ["POINTS", "CELLS", "CELL_TYPES", "POINT_DATA", "VECTORS displacement"] {
            assert!(body.contains(section), "missing {section}");
        }
    }
}
