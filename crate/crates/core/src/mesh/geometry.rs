use super::PrimalMesh;
use crate::error::{Error, Result};
use crate::geom::{tet_volume, triangle_area_vector, Vec3};

/// Metric realization of the primal mesh.
///
/// Faces are committed to the fan triangulation from the vertex average of
/// their loop; all integrals and area vectors use that surface.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometricTables {
    pub edge_vectors: Vec<Vec3>,
    pub edge_midpoints: Vec<Vec3>,
    pub face_area_vectors: Vec<Vec3>,
    pub face_barycenters: Vec<Vec3>,
    /// Apex of each face's fan triangulation.
    pub face_fan_centers: Vec<Vec3>,
    pub cell_barycenters: Vec<Vec3>,
    pub cell_volumes: Vec<f64>,
    pub cell_diameters: Vec<f64>,
    /// Mesh size: largest cell diameter.
    pub h: f64,
}

impl GeometricTables {
    pub fn edge_vector(&self, e: usize) -> Vec3 {
        self.edge_vectors[e]
    }

    pub fn face_area_vector(&self, f: usize) -> Vec3 {
        self.face_area_vectors[f]
    }

    pub fn face_barycenter(&self, f: usize) -> Vec3 {
        self.face_barycenters[f]
    }

    pub fn cell_barycenter(&self, c: usize) -> Vec3 {
        self.cell_barycenters[c]
    }

    pub fn cell_volume(&self, c: usize) -> f64 {
        self.cell_volumes[c]
    }

    pub fn total_volume(&self) -> f64 {
        self.cell_volumes.iter().sum()
    }

    /// Fan triangles `(apex, a, b)` of face `f`, following the stored loop.
    pub fn face_triangles<'a>(
        &'a self,
        mesh: &'a PrimalMesh,
        f: usize,
    ) -> impl Iterator<Item = [Vec3; 3]> + 'a {
        let lp = mesh.face(f);
        let apex = self.face_fan_centers[f];
        (0..lp.len()).map(move |i| {
            [
                apex,
                mesh.vertex(lp[i]),
                mesh.vertex(lp[(i + 1) % lp.len()]),
            ]
        })
    }
}

/// Shape diagnostics; reported, never enforced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshQuality {
    pub h: f64,
    pub min_cell_volume: f64,
    /// Largest `diameter^3 / volume` over cells.
    pub max_cell_aspect: f64,
    /// Largest out-of-plane deviation of a face loop relative to its diameter.
    pub max_face_warp: f64,
}

impl MeshQuality {
    pub fn of(mesh: &PrimalMesh, geo: &GeometricTables) -> Self {
        let min_cell_volume = geo
            .cell_volumes
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let max_cell_aspect = geo
            .cell_diameters
            .iter()
            .zip(&geo.cell_volumes)
            .map(|(d, v)| d.powi(3) / v)
            .fold(0.0, f64::max);
        let max_face_warp = mesh
            .faces()
            .iter()
            .map(|lp| face_warp(mesh.vertices(), lp))
            .fold(0.0, f64::max);
        Self {
            h: geo.h,
            min_cell_volume,
            max_cell_aspect,
            max_face_warp,
        }
    }
}

fn fan_center(pos: &[Vec3], lp: &[usize]) -> Vec3 {
    let sum = lp.iter().fold(Vec3::ZERO, |acc, &v| acc + pos[v]);
    sum * (1.0 / lp.len() as f64)
}

/// Largest distance of a loop vertex from the plane through the fan center
/// normal to the face area vector, divided by the loop diameter.
pub(crate) fn face_warp(pos: &[Vec3], lp: &[usize]) -> f64 {
    if lp.len() == 3 {
        return 0.0;
    }
    let apex = fan_center(pos, lp);
    let area = (0..lp.len()).fold(Vec3::ZERO, |acc, i| {
        acc + triangle_area_vector(apex, pos[lp[i]], pos[lp[(i + 1) % lp.len()]])
    });
    let n = area.norm();
    let mut diam = 0.0_f64;
    for (i, &a) in lp.iter().enumerate() {
        for &b in &lp[i + 1..] {
            diam = diam.max((pos[a] - pos[b]).norm());
        }
    }
    if n == 0.0 || diam == 0.0 {
        return f64::INFINITY;
    }
    let normal = area * (1.0 / n);
    lp.iter()
        .map(|&v| (pos[v] - apex).dot(normal).abs())
        .fold(0.0, f64::max)
        / diam
}

/// Signed volume of a cell from the outward-oriented fan triangulation of
/// its faces, with vertex positions taken from `pos`.
pub(crate) fn cell_volume_with(mesh: &PrimalMesh, pos: &[Vec3], c: usize) -> f64 {
    let reference = fan_center(pos, mesh.cell_vertices(c));
    let mut vol = 0.0;
    for &(f, s) in mesh.cell(c) {
        let lp = mesh.face(f);
        let apex = fan_center(pos, lp);
        for i in 0..lp.len() {
            let (a, b) = (pos[lp[i]], pos[lp[(i + 1) % lp.len()]]);
            vol += f64::from(s) * tet_volume(reference, apex, a, b);
        }
    }
    vol
}

/// Computes edge, face and cell geometry.
///
/// Cell volumes follow from the divergence theorem over the outward fan
/// triangles, evaluated as a sum of tetrahedra against the cell's vertex
/// average (the same quantity with less cancellation).
pub fn compute_geometry(mesh: &PrimalMesh) -> Result<GeometricTables> {
    let pos = mesh.vertices();
    let (edge_vectors, edge_midpoints) = mesh
        .edges()
        .iter()
        .map(|&[a, b]| (pos[b] - pos[a], (pos[a] + pos[b]) * 0.5))
        .unzip();

    let nf = mesh.n_faces();
    let mut face_area_vectors = Vec::with_capacity(nf);
    let mut face_barycenters = Vec::with_capacity(nf);
    let mut face_fan_centers = Vec::with_capacity(nf);
    for (f, lp) in mesh.faces().iter().enumerate() {
        let apex = fan_center(pos, lp);
        let mut area = Vec3::ZERO;
        let mut weighted = Vec3::ZERO;
        let mut weight = 0.0;
        for i in 0..lp.len() {
            let (a, b) = (pos[lp[i]], pos[lp[(i + 1) % lp.len()]]);
            let t = triangle_area_vector(apex, a, b);
            let w = t.norm();
            area += t;
            weighted += (apex + a + b) * (w / 3.0);
            weight += w;
        }
        if !(weight > 0.0) {
            return Err(Error::DegenerateMesh(format!("face {f} has zero area")));
        }
        face_area_vectors.push(area);
        face_barycenters.push(weighted * (1.0 / weight));
        face_fan_centers.push(apex);
    }

    let nc = mesh.n_cells();
    let mut cell_volumes = Vec::with_capacity(nc);
    let mut cell_barycenters = Vec::with_capacity(nc);
    let mut cell_diameters = Vec::with_capacity(nc);
    for c in 0..nc {
        let verts = mesh.cell_vertices(c);
        let reference = fan_center(pos, verts);
        let mut vol = 0.0;
        let mut moment = Vec3::ZERO;
        for &(f, s) in mesh.cell(c) {
            let lp = mesh.face(f);
            let apex = face_fan_centers[f];
            for i in 0..lp.len() {
                let (a, b) = (pos[lp[i]], pos[lp[(i + 1) % lp.len()]]);
                let tv = f64::from(s) * tet_volume(reference, apex, a, b);
                vol += tv;
                moment += (reference + apex + a + b) * (tv / 4.0);
            }
        }
        if !(vol > 0.0) {
            return Err(Error::DegenerateMesh(format!(
                "cell {c} has nonpositive volume {vol:e}"
            )));
        }
        let mut diam = 0.0_f64;
        for (i, &a) in verts.iter().enumerate() {
            for &b in &verts[i + 1..] {
                diam = diam.max((pos[a] - pos[b]).norm());
            }
        }
        cell_volumes.push(vol);
        cell_barycenters.push(moment * (1.0 / vol));
        cell_diameters.push(diam);
    }
    let h = cell_diameters.iter().copied().fold(0.0, f64::max);

    Ok(GeometricTables {
        edge_vectors,
        edge_midpoints,
        face_area_vectors,
        face_barycenters,
        face_fan_centers,
        cell_barycenters,
        cell_volumes,
        cell_diameters,
        h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_cartesian_hex, Aabb};

    #[test]
    fn unit_cube_volume_and_barycenter() {
        let m = build_cartesian_hex([1, 1, 1], Aabb::unit()).unwrap();
        let g = compute_geometry(&m).unwrap();
        assert!((g.cell_volume(0) - 1.0).abs() < 1e-15);
        assert!((g.cell_barycenter(0) - Vec3::new(0.5, 0.5, 0.5)).norm() < 1e-15);
        assert!((g.h - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn tetrahedron_volume() {
        let v = vec![Vec3::ZERO, Vec3::unit(0), Vec3::unit(1), Vec3::unit(2)];
        // outward loops
        let faces = vec![vec![0, 2, 1], vec![0, 1, 3], vec![0, 3, 2], vec![1, 2, 3]];
        let m = PrimalMesh::new(v, faces, vec![(0..4).map(|f| (f, 1)).collect()]).unwrap();
        let g = m.validate().unwrap();
        assert!((g.cell_volume(0) - 1.0 / 6.0).abs() < 1e-16);
        assert!((g.cell_barycenter(0) - Vec3::new(0.25, 0.25, 0.25)).norm() < 1e-15);
    }

    #[test]
    fn box_volume_and_spacing() {
        let b = Aabb::new(Vec3::new(-1.0, 0.0, 2.0), Vec3::new(1.0, 0.5, 3.0));
        let m = build_cartesian_hex([4, 2, 3], b).unwrap();
        let g = compute_geometry(&m).unwrap();
        assert!((g.total_volume() - 1.0).abs() < 1e-14);
        let q = MeshQuality::of(&m, &g);
        assert_eq!(q.max_face_warp, 0.0);
        assert!((q.min_cell_volume - 1.0 / 24.0).abs() < 1e-16);
    }
}
