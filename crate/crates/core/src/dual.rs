//! Barycentric dual geometry, stored cell by cell.
//!
//! For a cell `c` with barycenter `x_c`, every primal edge `e ⊂ c` owns a
//! dual-face area vector `s̃_{e,c}` built from the triangles
//! `(x_e, x_f, x_c)` over the two faces `f ⊃ e` of `c`; every face `f ⊂ c`
//! owns the dual-edge vector `ẽ_{f,c} = x_f - x_c`. The cell is partitioned
//! into barycentric subsimplices `(x_v, x_e, x_f, x_c)`, which also yield the
//! vertex, edge and face subvolumes.

use std::str::FromStr;

use rayon::prelude::*;

use crate::complex::MeshComplex;
use crate::error::{Error, Result};
use crate::geom::{Mat3, Vec3};
use crate::mesh::{DofArray, DofKind, GeometricTables, PrimalMesh};

#[derive(Clone, Debug, PartialEq)]
pub struct LocalEdge {
    pub id: usize,
    /// Primal edge vector, tail to head.
    pub vector: Vec3,
    /// `s̃_{e,c}`, oriented along the edge.
    pub dual_face: Vec3,
    /// `|p_{e,c}| = e · s̃_{e,c} / 3`.
    pub subvolume: f64,
    pub subvolume_barycenter: Vec3,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalFace {
    pub id: usize,
    /// Orientation of the stored face loop relative to this cell.
    pub sign: i8,
    /// Outward area vector.
    pub outward: Vec3,
    /// `ẽ_{f,c} = x_f - x_c`.
    pub dual_edge: Vec3,
    /// `|p_{f,c}| = f_out · ẽ_{f,c} / 3`.
    pub subvolume: f64,
    pub subvolume_barycenter: Vec3,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalVertex {
    pub id: usize,
    pub subvolume: f64,
}

/// Tetrahedron `(x_v, x_e, x_f, x_c)`; indices are local to the cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Subsimplex {
    pub vertex: usize,
    pub edge: usize,
    pub face: usize,
    pub volume: f64,
    pub centroid: Vec3,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellDual {
    pub volume: f64,
    pub barycenter: Vec3,
    /// Ordered like `PrimalMesh::cell_edges`.
    pub edges: Vec<LocalEdge>,
    /// Ordered like `PrimalMesh::cell`.
    pub faces: Vec<LocalFace>,
    /// Ordered like `PrimalMesh::cell_vertices`.
    pub vertices: Vec<LocalVertex>,
    pub subsimplices: Vec<Subsimplex>,
}

impl CellDual {
    /// Frobenius deviations of `Σ_e e ⊗ s̃_e` and `Σ_f ẽ_f ⊗ f_out` from
    /// `|c| Id`, relative to `|c|`.
    pub fn local_identities(&self) -> LocalIdentities {
        let id = Mat3::identity().scaled(self.volume);
        let edge_sum = self
            .edges
            .iter()
            .fold(Mat3::ZERO, |acc, e| acc + e.vector.outer(e.dual_face));
        let face_sum = self
            .faces
            .iter()
            .fold(Mat3::ZERO, |acc, f| acc + f.dual_edge.outer(f.outward));
        LocalIdentities {
            edge_deviation: (edge_sum - id).frobenius() / self.volume,
            face_deviation: (face_sum - id).frobenius() / self.volume,
        }
    }

    /// Relative mismatch of the edge, face and vertex volume partitions.
    pub fn partition_residuals(&self) -> [f64; 3] {
        let rel = |s: f64| (s - self.volume).abs() / self.volume;
        [
            rel(self.edges.iter().map(|e| e.subvolume).sum()),
            rel(self.faces.iter().map(|f| f.subvolume).sum()),
            rel(self.vertices.iter().map(|v| v.subvolume).sum()),
        ]
    }

    /// Edge subvolumes recomputed by summing subsimplices.
    pub fn edge_subvolumes_from_subsimplices(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.edges.len()];
        for s in &self.subsimplices {
            v[s.edge] += s.volume;
        }
        v
    }

    /// Face subvolumes recomputed by summing subsimplices.
    pub fn face_subvolumes_from_subsimplices(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.faces.len()];
        for s in &self.subsimplices {
            v[s.face] += s.volume;
        }
        v
    }
}

/// Result of [`check_local_identities`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalIdentities {
    pub edge_deviation: f64,
    pub face_deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualGeometry {
    cells: Vec<CellDual>,
    dual_cell_volumes: Vec<f64>,
}

impl DualGeometry {
    pub fn cell(&self, c: usize) -> &CellDual {
        &self.cells[c]
    }

    pub fn cells(&self) -> &[CellDual] {
        &self.cells
    }

    /// `|c̃_v|`, the barycentric dual cell volume of each vertex.
    pub fn dual_cell_volumes(&self) -> &[f64] {
        &self.dual_cell_volumes
    }

    /// Subsimplex-midpoint integral of `s` over each primal cell.
    pub fn integrate_cells(&self, s: &dyn Fn(Vec3) -> f64) -> Vec<f64> {
        self.cells
            .iter()
            .map(|cd| {
                cd.subsimplices
                    .iter()
                    .fold(0.0, |acc, t| acc + t.volume * s(t.centroid))
            })
            .collect()
    }

    /// Subsimplex-midpoint integral of `s` over each barycentric dual cell.
    pub fn integrate_dual_cells(&self, s: &dyn Fn(Vec3) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dual_cell_volumes.len()];
        for cd in &self.cells {
            for t in &cd.subsimplices {
                out[cd.vertices[t.vertex].id] += t.volume * s(t.centroid);
            }
        }
        out
    }
}

pub(crate) fn build_cell(mesh: &PrimalMesh, geo: &GeometricTables, c: usize) -> Result<CellDual> {
    let xc = geo.cell_barycenter(c);
    let edge_ids = mesh.cell_edges(c);
    let vertex_ids = mesh.cell_vertices(c);
    let local_edge = |e: usize| edge_ids.binary_search(&e).expect("edge of cell");
    let local_vertex = |v: usize| vertex_ids.binary_search(&v).expect("vertex of cell");

    let mut dual_faces = vec![Vec3::ZERO; edge_ids.len()];
    let mut subsimplices = Vec::new();
    let mut faces = Vec::with_capacity(mesh.cell(c).len());

    for (lf, &(f, sign)) in mesh.cell(c).iter().enumerate() {
        let xf = geo.face_barycenter(f);
        let lp = mesh.face(f);
        for (i, &(e, esign)) in mesh.face_edges(f).iter().enumerate() {
            let xe = geo.edge_midpoints[e];
            let le = local_edge(e);
            // orientation of the edge within the outward-oriented face loop
            let sigma = f64::from(esign * sign);
            dual_faces[le] -= (xf - xe).cross(xc - xe) * (0.5 * sigma);

            let (a, b) = (lp[i], lp[(i + 1) % lp.len()]);
            let (first, second) = if sign > 0 { (a, b) } else { (b, a) };
            for (v, tri) in [
                (first, [mesh.vertex(first), xe]),
                (second, [xe, mesh.vertex(second)]),
            ] {
                let volume = (tri[0] - xf).cross(tri[1] - xf).dot(xf - xc) / 6.0;
                if !(volume > 0.0) {
                    return Err(Error::DegenerateMesh(format!(
                        "cell {c}: barycentric subsimplex at vertex {v}, edge {e}, face {f} \
                         has volume {volume:e}"
                    )));
                }
                subsimplices.push(Subsimplex {
                    vertex: local_vertex(v),
                    edge: le,
                    face: lf,
                    volume,
                    centroid: (mesh.vertex(v) + xe + xf + xc) * 0.25,
                });
            }
        }
        let outward = geo.face_area_vector(f) * f64::from(sign);
        let dual_edge = xf - xc;
        let subvolume = outward.dot(dual_edge) / 3.0;
        if !(subvolume > 0.0) {
            return Err(Error::DegenerateMesh(format!(
                "cell {c}: face {f} subvolume is {subvolume:e}"
            )));
        }
        faces.push(LocalFace {
            id: f,
            sign,
            outward,
            dual_edge,
            subvolume,
            subvolume_barycenter: Vec3::ZERO,
        });
    }

    let mut edges = Vec::with_capacity(edge_ids.len());
    for (le, &e) in edge_ids.iter().enumerate() {
        let vector = geo.edge_vector(e);
        let subvolume = vector.dot(dual_faces[le]) / 3.0;
        if !(subvolume > 0.0) {
            return Err(Error::DegenerateMesh(format!(
                "cell {c}: edge {e} subvolume is {subvolume:e}"
            )));
        }
        edges.push(LocalEdge {
            id: e,
            vector,
            dual_face: dual_faces[le],
            subvolume,
            subvolume_barycenter: Vec3::ZERO,
        });
    }

    let mut vertices: Vec<LocalVertex> = vertex_ids
        .iter()
        .map(|&id| LocalVertex { id, subvolume: 0.0 })
        .collect();
    let mut edge_moment = vec![(Vec3::ZERO, 0.0); edges.len()];
    let mut face_moment = vec![(Vec3::ZERO, 0.0); faces.len()];
    for s in &subsimplices {
        vertices[s.vertex].subvolume += s.volume;
        edge_moment[s.edge].0 += s.centroid * s.volume;
        edge_moment[s.edge].1 += s.volume;
        face_moment[s.face].0 += s.centroid * s.volume;
        face_moment[s.face].1 += s.volume;
    }
    for (e, (m, w)) in edges.iter_mut().zip(edge_moment) {
        e.subvolume_barycenter = m * (1.0 / w);
    }
    for (f, (m, w)) in faces.iter_mut().zip(face_moment) {
        f.subvolume_barycenter = m * (1.0 / w);
    }

    Ok(CellDual {
        volume: geo.cell_volume(c),
        barycenter: xc,
        edges,
        faces,
        vertices,
        subsimplices,
    })
}

/// Builds the per-cell dual quantities; cells are processed in parallel and
/// collected in cell order.
pub fn build_dual_geometry(mesh: &PrimalMesh, geo: &GeometricTables) -> Result<DualGeometry> {
    let cells = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| build_cell(mesh, geo, c))
        .collect::<Result<Vec<_>>>()?;
    let mut dual_cell_volumes = vec![0.0; mesh.n_vertices()];
    for cd in &cells {
        for v in &cd.vertices {
            dual_cell_volumes[v.id] += v.subvolume;
        }
    }
    Ok(DualGeometry {
        cells,
        dual_cell_volumes,
    })
}

/// Deviation of the two local exactness identities on cell `c`.
pub fn check_local_identities(dual: &DualGeometry, c: usize) -> LocalIdentities {
    dual.cell(c).local_identities()
}

/// Where source degrees of freedom live.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceVariant {
    /// Barycentric dual cells (vertex-based scheme).
    Vertex,
    /// Primal cells (cell-based scheme).
    Cell,
}

impl FromStr for SourceVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vertex" => Ok(SourceVariant::Vertex),
            "cell" => Ok(SourceVariant::Cell),
            other => Err(Error::InvalidArgument(format!(
                "unknown source variant '{other}'"
            ))),
        }
    }
}

/// Volume integrals of a source over dual cells (returned as a
/// vertex-indexed array) or primal cells.
pub fn reduce_dual_source(
    s: &dyn Fn(Vec3) -> f64,
    cx: &MeshComplex,
    variant: SourceVariant,
) -> Result<DofArray> {
    match variant {
        SourceVariant::Vertex => DofArray::new(
            DofKind::VertexPotential,
            cx.dual.integrate_dual_cells(s),
            cx,
        ),
        SourceVariant::Cell => DofArray::new(DofKind::CellIntegral, cx.dual.integrate_cells(s), cx),
    }
}
