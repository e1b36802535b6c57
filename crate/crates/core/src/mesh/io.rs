//! Mesh interchange file.
//!
//! A single JSON document:
//!
//! ```text
//! {
//!   "version": 1,
//!   "vertices": [[x, y, z], ...],
//!   "faces": [[v0, v1, v2, ...], ...],
//!   "cells": [[+k, -k, ...], ...]
//! }
//! ```
//!
//! Face loops hold 0-based vertex indices. Cell entries are signed 1-based
//! face references: `+k` uses face `k - 1` with its stored orientation as
//! the outward one, `-k` reverses it.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use super::PrimalMesh;
use crate::error::{Error, Result};
use crate::geom::Vec3;

const FORMAT_VERSION: u32 = 1;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshDocument {
    version: u32,
    vertices: Vec<[f64; 3]>,
    faces: Vec<Vec<usize>>,
    cells: Vec<Vec<i64>>,
}

fn fmt_f64(v: f64) -> String {
    // serde_json prints the shortest representation that round-trips
    serde_json::to_string(&v).expect("finite coordinates")
}

/// Serializes a mesh to the interchange layout, one entity per line.
pub fn mesh_to_string(mesh: &PrimalMesh) -> String {
    let mut out = String::new();
    out.push_str("{\n  \"version\": 1,\n  \"vertices\": [\n");
    let nv = mesh.n_vertices();
    for (i, v) in mesh.vertices().iter().enumerate() {
        let sep = if i + 1 < nv { "," } else { "" };
        let _ = writeln!(
            out,
            "    [{}, {}, {}]{sep}",
            fmt_f64(v.x()),
            fmt_f64(v.y()),
            fmt_f64(v.z())
        );
    }
    out.push_str("  ],\n  \"faces\": [\n");
    let nf = mesh.n_faces();
    for (i, lp) in mesh.faces().iter().enumerate() {
        let sep = if i + 1 < nf { "," } else { "" };
        let items: Vec<String> = lp.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "    [{}]{sep}", items.join(", "));
    }
    out.push_str("  ],\n  \"cells\": [\n");
    let nc = mesh.n_cells();
    for (i, cf) in mesh.cells().iter().enumerate() {
        let sep = if i + 1 < nc { "," } else { "" };
        let items: Vec<String> = cf
            .iter()
            .map(|&(f, s)| (i64::from(s) * (f as i64 + 1)).to_string())
            .collect();
        let _ = writeln!(out, "    [{}]{sep}", items.join(", "));
    }
    out.push_str("  ]\n}\n");
    out
}

/// Parses and fully validates a mesh document.
pub fn mesh_from_str(text: &str) -> Result<PrimalMesh> {
    let doc: MeshDocument = serde_json::from_str(text).map_err(|e| Error::Format {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    if doc.version != FORMAT_VERSION {
        return Err(Error::Format {
            location: "version".into(),
            message: format!(
                "unsupported version {}, expected {FORMAT_VERSION}",
                doc.version
            ),
        });
    }
    let nf = doc.faces.len();
    for (f, lp) in doc.faces.iter().enumerate() {
        if let Some(j) = lp.iter().position(|&v| v >= doc.vertices.len()) {
            return Err(Error::Format {
                location: format!("faces[{f}][{j}]"),
                message: format!(
                    "vertex index {} out of range (mesh has {} vertices)",
                    lp[j],
                    doc.vertices.len()
                ),
            });
        }
    }
    let mut cells = Vec::with_capacity(doc.cells.len());
    for (c, refs) in doc.cells.iter().enumerate() {
        let mut cf = Vec::with_capacity(refs.len());
        for (j, &r) in refs.iter().enumerate() {
            if r == 0 || r.unsigned_abs() as usize > nf {
                return Err(Error::Format {
                    location: format!("cells[{c}][{j}]"),
                    message: format!("face reference {r} must be a nonzero index within ±{nf}"),
                });
            }
            cf.push((r.unsigned_abs() as usize - 1, if r > 0 { 1 } else { -1 }));
        }
        cells.push(cf);
    }
    let vertices = doc.vertices.into_iter().map(Vec3).collect();
    let mesh =
        PrimalMesh::new(vertices, doc.faces, cells).map_err(|e| e.in_stage("mesh topology"))?;
    mesh.validate().map_err(|e| e.in_stage("mesh geometry"))?;
    Ok(mesh)
}

pub fn write_mesh(mesh: &PrimalMesh, path: &Path) -> Result<()> {
    crate::study::write_atomic(path, mesh_to_string(mesh).as_bytes())
}

pub fn read_mesh(path: &Path) -> Result<PrimalMesh> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    mesh_from_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_cartesian_hex, build_prismatic_polygonal, perturb_hex, Aabb};

    #[test]
    fn perturbed_mesh_round_trips_exactly() {
        let m = build_cartesian_hex([3, 3, 3], Aabb::unit()).unwrap();
        let p = perturb_hex(&m, 0.2, 9).unwrap();
        assert_eq!(mesh_from_str(&mesh_to_string(&p)).unwrap(), p);
        let q = build_prismatic_polygonal(2, 1).unwrap();
        assert_eq!(mesh_from_str(&mesh_to_string(&q)).unwrap(), q);
    }

    #[test]
    fn diagnostics_name_the_offending_field() {
        let err = mesh_from_str(r#"{"version": 2, "vertices": [], "faces": [], "cells": []}"#)
            .unwrap_err();
        assert!(matches!(err, Error::Format { ref location, .. } if location == "version"));

        let m = build_cartesian_hex([1, 1, 1], Aabb::unit()).unwrap();
        let text = mesh_to_string(&m).replace("[-1, ", "[0, ");
        let err = mesh_from_str(&text).unwrap_err();
        assert!(
            matches!(err, Error::Format { ref location, .. } if location == "cells[0][0]"),
            "{err}"
        );

        let err = mesh_from_str("{\n \"version\": 1,\n \"vertices\": [1, 2]\n}").unwrap_err();
        assert!(
            matches!(err, Error::Format { ref location, .. } if location.starts_with("line 3")),
            "{err}"
        );
    }

    #[test]
    fn inconsistent_orientation_rejected() {
        let m = build_cartesian_hex([1, 1, 1], Aabb::unit()).unwrap();
        let text = mesh_to_string(&m).replace("[-1, 2", "[1, 2");
        assert!(mesh_from_str(&text).is_err());
    }
}
