//! Primal polyhedral mesh: topology, generators, geometry, incidence
//! matrices, the mesh interchange file and the reduction (de Rham) maps.
//!
//! Orientation conventions:
//! - an edge runs from its lower to its higher vertex index;
//! - a face is oriented by its stored vertex loop (right-hand rule);
//! - each cell stores a sign per face, `+1` when the stored loop is
//!   counterclockwise seen from outside that cell.

mod derham;
mod generators;
mod geometry;
mod incidence;
mod io;

use std::collections::HashMap;

pub use derham::{de_rham_reduce, DofArray, DofKind, Field};
pub use generators::{
    brick_honeycomb_footprint, build_cartesian_hex, build_prismatic_polygonal, extrude,
    perturb_hex, Aabb, Footprint,
};
pub use geometry::{compute_geometry, GeometricTables, MeshQuality};
pub use incidence::{build_incidence, IncidenceMatrices, IntSparse};
pub use io::{mesh_from_str, mesh_to_string, read_mesh, write_mesh};

use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Oriented polyhedral mesh with derived edge table and boundary flags.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimalMesh {
    vertices: Vec<Vec3>,
    edges: Vec<[usize; 2]>,
    faces: Vec<Vec<usize>>,
    /// Per face, `(edge, sign)` for each loop segment `loop[i] -> loop[i+1]`;
    /// sign is `+1` when the segment runs from `v0` to `v1` of the edge.
    face_edges: Vec<Vec<(usize, i8)>>,
    cells: Vec<Vec<(usize, i8)>>,
    face_cells: Vec<Vec<usize>>,
    cell_vertices: Vec<Vec<usize>>,
    cell_edges: Vec<Vec<usize>>,
    boundary_vertex: Vec<bool>,
    boundary_edge: Vec<bool>,
    boundary_face: Vec<bool>,
}

impl PrimalMesh {
    /// Builds a mesh from vertex positions, face loops and signed cell
    /// face lists, deriving edges and boundary flags and checking every
    /// topological invariant.
    pub fn new(
        vertices: Vec<Vec3>,
        faces: Vec<Vec<usize>>,
        cells: Vec<Vec<(usize, i8)>>,
    ) -> Result<Self> {
        let nv = vertices.len();
        if let Some(v) = vertices.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidMesh(format!("vertices[{v}] is not finite")));
        }
        for (f, lp) in faces.iter().enumerate() {
            if lp.len() < 3 {
                return Err(Error::InvalidMesh(format!(
                    "faces[{f}] has {} vertices, at least 3 required",
                    lp.len()
                )));
            }
            if let Some(&v) = lp.iter().find(|&&v| v >= nv) {
                return Err(Error::InvalidMesh(format!(
                    "faces[{f}] references vertex {v}, mesh has {nv}"
                )));
            }
            let mut sorted = lp.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidMesh(format!("faces[{f}] repeats a vertex")));
            }
        }

        let mut edge_set: Vec<[usize; 2]> = faces
            .iter()
            .flat_map(|lp| {
                (0..lp.len()).map(move |i| {
                    let (a, b) = (lp[i], lp[(i + 1) % lp.len()]);
                    [a.min(b), a.max(b)]
                })
            })
            .collect();
        edge_set.sort_unstable();
        edge_set.dedup();
        let edge_index: HashMap<[usize; 2], usize> =
            edge_set.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let face_edges: Vec<Vec<(usize, i8)>> = faces
            .iter()
            .map(|lp| {
                (0..lp.len())
                    .map(|i| {
                        let (a, b) = (lp[i], lp[(i + 1) % lp.len()]);
                        let e = edge_index[&[a.min(b), a.max(b)]];
                        (e, if a < b { 1 } else { -1 })
                    })
                    .collect()
            })
            .collect();
        for (f, fe) in face_edges.iter().enumerate() {
            let mut ids: Vec<usize> = fe.iter().map(|&(e, _)| e).collect();
            ids.sort_unstable();
            if ids.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidMesh(format!(
                    "faces[{f}] traverses an edge twice"
                )));
            }
        }

        let nf = faces.len();
        let mut face_cells: Vec<Vec<usize>> = vec![Vec::new(); nf];
        let mut face_signs: Vec<Vec<i8>> = vec![Vec::new(); nf];
        let mut cell_vertices = Vec::with_capacity(cells.len());
        let mut cell_edges = Vec::with_capacity(cells.len());
        for (c, cf) in cells.iter().enumerate() {
            if cf.len() < 4 {
                return Err(Error::InvalidMesh(format!(
                    "cells[{c}] has {} faces, at least 4 required",
                    cf.len()
                )));
            }
            for &(f, s) in cf {
                if f >= nf {
                    return Err(Error::InvalidMesh(format!(
                        "cells[{c}] references face {f}, mesh has {nf}"
                    )));
                }
                if s != 1 && s != -1 {
                    return Err(Error::InvalidMesh(format!(
                        "cells[{c}] has orientation sign {s} for face {f}"
                    )));
                }
                if face_cells[f].last() == Some(&c) {
                    return Err(Error::InvalidMesh(format!(
                        "cells[{c}] lists face {f} twice"
                    )));
                }
                face_cells[f].push(c);
                face_signs[f].push(s);
            }

            // every edge of the cell bounds exactly two of its faces,
            // traversed in opposite directions once orientations are applied
            let mut traversal: HashMap<usize, (u32, i32)> = HashMap::new();
            let mut verts = Vec::new();
            for &(f, s) in cf {
                for &(e, es) in &face_edges[f] {
                    let t = traversal.entry(e).or_insert((0, 0));
                    t.0 += 1;
                    t.1 += (es * s) as i32;
                }
                verts.extend_from_slice(&faces[f]);
            }
            let mut edges: Vec<usize> = traversal.keys().copied().collect();
            edges.sort_unstable();
            for e in &edges {
                let (count, net) = traversal[e];
                if count != 2 || net != 0 {
                    return Err(Error::InvalidMesh(format!(
                        "cells[{c}] is not a closed consistently oriented surface at edge {e} \
                         (used {count} times, net orientation {net})"
                    )));
                }
            }
            verts.sort_unstable();
            verts.dedup();
            let euler = verts.len() as i64 - edges.len() as i64 + cf.len() as i64;
            if euler != 2 {
                return Err(Error::InvalidMesh(format!(
                    "cells[{c}] has Euler characteristic {euler}, expected 2"
                )));
            }
            cell_vertices.push(verts);
            cell_edges.push(edges);
        }
        for f in 0..nf {
            match face_signs[f].as_slice() {
                [_] => {}
                [a, b] if a + b == 0 => {}
                [_, _] => {
                    return Err(Error::InvalidMesh(format!(
                        "faces[{f}] is shared by cells {:?} with equal orientation signs",
                        face_cells[f]
                    )))
                }
                [] => return Err(Error::InvalidMesh(format!("faces[{f}] belongs to no cell"))),
                _ => {
                    return Err(Error::InvalidMesh(format!(
                        "faces[{f}] belongs to {} cells",
                        face_cells[f].len()
                    )))
                }
            }
        }

        let mut used = vec![false; nv];
        faces.iter().flatten().for_each(|&v| used[v] = true);
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::InvalidMesh(format!(
                "vertices[{v}] belongs to no face"
            )));
        }

        let boundary_face: Vec<bool> = face_cells.iter().map(|fc| fc.len() == 1).collect();
        let mut boundary_vertex = vec![false; nv];
        let mut boundary_edge = vec![false; edge_set.len()];
        for f in (0..nf).filter(|&f| boundary_face[f]) {
            faces[f].iter().for_each(|&v| boundary_vertex[v] = true);
            face_edges[f]
                .iter()
                .for_each(|&(e, _)| boundary_edge[e] = true);
        }

        Ok(Self {
            vertices,
            edges: edge_set,
            faces,
            face_edges,
            cells,
            face_cells,
            cell_vertices,
            cell_edges,
            boundary_vertex,
            boundary_edge,
            boundary_face,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Vec3 {
        self.vertices[v]
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> &[usize] {
        &self.faces[f]
    }

    pub fn face_edges(&self, f: usize) -> &[(usize, i8)] {
        &self.face_edges[f]
    }

    pub fn cells(&self) -> &[Vec<(usize, i8)>] {
        &self.cells
    }

    /// `(face, orientation sign)` pairs of cell `c`.
    pub fn cell(&self, c: usize) -> &[(usize, i8)] {
        &self.cells[c]
    }

    /// Cells adjacent to face `f` (one on the boundary, two inside).
    pub fn face_cells(&self, f: usize) -> &[usize] {
        &self.face_cells[f]
    }

    /// Sorted vertex ids of cell `c`.
    pub fn cell_vertices(&self, c: usize) -> &[usize] {
        &self.cell_vertices[c]
    }

    /// Sorted edge ids of cell `c`.
    pub fn cell_edges(&self, c: usize) -> &[usize] {
        &self.cell_edges[c]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.boundary_edge[e]
    }

    pub fn is_boundary_face(&self, f: usize) -> bool {
        self.boundary_face[f]
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.n_vertices())
            .filter(|&v| !self.boundary_vertex[v])
            .collect()
    }

    /// Full validation: topology (already enforced on construction),
    /// positive cell volumes and closed cell surfaces.
    pub fn validate(&self) -> Result<GeometricTables> {
        let geo = compute_geometry(self)?;
        for c in 0..self.n_cells() {
            let mut sum = Vec3::ZERO;
            let mut surface = 0.0;
            for &(f, s) in self.cell(c) {
                sum += geo.face_area_vector(f) * f64::from(s);
                surface += geo.face_area_vector(f).norm();
            }
            if sum.norm() > 1e-13 * surface {
                return Err(Error::InvalidMesh(format!(
                    "cells[{c}] surface is not closed: |sum of area vectors| = {:e}",
                    sum.norm()
                )));
            }
        }
        Ok(geo)
    }

    /// Same mesh with cells listed in the order `perm` (new cell `i` is
    /// old cell `perm[i]`).
    pub fn permute_cells(&self, perm: &[usize]) -> Result<PrimalMesh> {
        let mut seen = vec![false; self.n_cells()];
        if perm.len() != self.n_cells()
            || perm
                .iter()
                .any(|&c| c >= seen.len() || std::mem::replace(&mut seen[c], true))
        {
            return Err(Error::InvalidArgument(
                "not a permutation of the cells".into(),
            ));
        }
        let cells = perm.iter().map(|&c| self.cells[c].clone()).collect();
        PrimalMesh::new(self.vertices.clone(), self.faces.clone(), cells)
    }

    /// Replaces every face whose vertices deviate from a common plane by
    /// more than `rel_tol` (relative to the face diameter) with a fan of
    /// triangles rooted at its lowest-index vertex.
    pub fn triangulate_warped_faces(&self, rel_tol: f64) -> Result<PrimalMesh> {
        let mut faces = Vec::with_capacity(self.n_faces());
        let mut replaced: Vec<Vec<usize>> = Vec::with_capacity(self.n_faces());
        for (f, lp) in self.faces.iter().enumerate() {
            if geometry::face_warp(&self.vertices, lp) <= rel_tol {
                replaced.push(vec![faces.len()]);
                faces.push(lp.clone());
                continue;
            }
            let start = (0..lp.len()).min_by_key(|&i| lp[i]).unwrap();
            let rot: Vec<usize> = (0..lp.len()).map(|i| lp[(start + i) % lp.len()]).collect();
            let mut ids = Vec::new();
            for i in 1..rot.len() - 1 {
                ids.push(faces.len());
                faces.push(vec![rot[0], rot[i], rot[i + 1]]);
            }
            debug_assert!(!ids.is_empty(), "face {f} produced no triangles");
            replaced.push(ids);
        }
        let cells = self
            .cells
            .iter()
            .map(|cf| {
                cf.iter()
                    .flat_map(|&(f, s)| replaced[f].iter().map(move |&g| (g, s)))
                    .collect()
            })
            .collect();
        PrimalMesh::new(self.vertices.clone(), faces, cells)
    }

    pub(crate) fn with_vertices(&self, vertices: Vec<Vec3>) -> PrimalMesh {
        assert_eq!(vertices.len(), self.vertices.len());
        PrimalMesh {
            vertices,
            ..self.clone()
        }
    }

    /// Cells touching each vertex, ascending.
    pub fn vertex_cells(&self) -> Vec<Vec<usize>> {
        let mut vc = vec![Vec::new(); self.n_vertices()];
        for c in 0..self.n_cells() {
            for &v in self.cell_vertices(c) {
                vc[v].push(c);
            }
        }
        vc
    }
}
