use crate::dual::{build_dual_geometry, DualGeometry};
use crate::error::Result;
use crate::mesh::{build_incidence, GeometricTables, IncidenceMatrices, PrimalMesh};

/// A validated mesh together with everything derived from it: geometry,
/// barycentric dual quantities and incidence matrices. Immutable once built.
#[derive(Clone, Debug)]
pub struct MeshComplex {
    pub mesh: PrimalMesh,
    pub geometry: GeometricTables,
    pub dual: DualGeometry,
    pub incidence: IncidenceMatrices,
}

impl MeshComplex {
    pub fn new(mesh: PrimalMesh) -> Result<Self> {
        let geometry = mesh.validate()?;
        let dual = build_dual_geometry(&mesh, &geometry)?;
        let incidence = build_incidence(&mesh);
        Ok(Self {
            mesh,
            geometry,
            dual,
            incidence,
        })
    }

    pub fn h(&self) -> f64 {
        self.geometry.h
    }
}
