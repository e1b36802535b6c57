use std::fmt;
use std::str::FromStr;

use crate::complex::MeshComplex;
use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Which mesh entities carry a family of degrees of freedom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DofKind {
    /// Point values at primal vertices.
    VertexPotential,
    /// Line integrals along primal edges.
    EdgeCirculation,
    /// Fluxes across primal faces, following the stored face orientation.
    FaceFlux,
    /// Volume integrals over primal cells.
    CellIntegral,
}

impl DofKind {
    pub fn tag(self) -> &'static str {
        match self {
            DofKind::VertexPotential => "vertex-potential",
            DofKind::EdgeCirculation => "edge-circulation",
            DofKind::FaceFlux => "face-flux",
            DofKind::CellIntegral => "cell-integral",
        }
    }

    pub fn entity_count(self, cx: &MeshComplex) -> usize {
        match self {
            DofKind::VertexPotential => cx.mesh.n_vertices(),
            DofKind::EdgeCirculation => cx.mesh.n_edges(),
            DofKind::FaceFlux => cx.mesh.n_faces(),
            DofKind::CellIntegral => cx.mesh.n_cells(),
        }
    }
}

impl fmt::Display for DofKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for DofKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vertex-potential" => Ok(DofKind::VertexPotential),
            "edge-circulation" => Ok(DofKind::EdgeCirculation),
            "face-flux" => Ok(DofKind::FaceFlux),
            "cell-integral" | "cell-average" => Ok(DofKind::CellIntegral),
            other => Err(Error::InvalidArgument(format!(
                "unknown DoF kind '{other}'"
            ))),
        }
    }
}

/// Degrees of freedom of one kind, aligned with the entity numbering.
#[derive(Clone, Debug, PartialEq)]
pub struct DofArray {
    kind: DofKind,
    values: Vec<f64>,
}

impl DofArray {
    pub fn new(kind: DofKind, values: Vec<f64>, cx: &MeshComplex) -> Result<Self> {
        let expected = kind.entity_count(cx);
        if values.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "{kind} array has {} values, mesh has {expected} entities",
                values.len()
            )));
        }
        Ok(Self { kind, values })
    }

    pub fn kind(&self) -> DofKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// An analytic field handed to the reduction maps.
#[derive(Clone, Copy)]
pub enum Field<'a> {
    Scalar(&'a dyn Fn(Vec3) -> f64),
    Vector(&'a dyn Fn(Vec3) -> Vec3),
}

// three-point Gauss–Legendre on [0, 1]
const GAUSS3: [(f64, f64); 3] = [
    (0.112_701_665_379_258_31, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

/// Reduction (de Rham) map: point values at vertices, three-point Gauss
/// circulations along edges, degree-2 triangle fluxes over the fan
/// triangulation of faces, and barycentric-subsimplex midpoint integrals
/// over cells.
pub fn de_rham_reduce(kind: DofKind, field: Field<'_>, cx: &MeshComplex) -> Result<DofArray> {
    let mesh = &cx.mesh;
    let geo = &cx.geometry;
    let values = match (kind, field) {
        (DofKind::VertexPotential, Field::Scalar(p)) => {
            mesh.vertices().iter().map(|&x| p(x)).collect()
        }
        (DofKind::EdgeCirculation, Field::Vector(v)) => mesh
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &[a, _])| {
                let (x0, t) = (mesh.vertex(a), geo.edge_vector(e));
                GAUSS3
                    .iter()
                    .fold(0.0, |acc, &(s, w)| acc + w * v(x0 + t * s).dot(t))
            })
            .collect(),
        (DofKind::FaceFlux, Field::Vector(v)) => (0..mesh.n_faces())
            .map(|f| {
                geo.face_triangles(mesh, f).fold(0.0, |acc, [a, b, c]| {
                    let area = (b - a).cross(c - a) * 0.5;
                    let mid = v((a + b) * 0.5) + v((b + c) * 0.5) + v((c + a) * 0.5);
                    acc + area.dot(mid) / 3.0
                })
            })
            .collect(),
        (DofKind::CellIntegral, Field::Scalar(s)) => cx.dual.integrate_cells(s),
        (kind, _) => {
            return Err(Error::InvalidArgument(format!(
                "{kind} reduction applied to a field of the wrong rank"
            )))
        }
    };
    DofArray::new(kind, values, cx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_cartesian_hex, Aabb};

    fn cube() -> MeshComplex {
        MeshComplex::new(build_cartesian_hex([1, 1, 1], Aabb::unit()).unwrap()).unwrap()
    }

    #[test]
    fn constant_field_circulation_and_flux() {
        let cx = cube();
        let g = |_: Vec3| Vec3::new(1.0, 0.0, 0.0);
        let circ = de_rham_reduce(DofKind::EdgeCirculation, Field::Vector(&g), &cx).unwrap();
        let e = cx
            .mesh
            .edges()
            .iter()
            .position(|&[a, b]| {
                cx.mesh.vertex(a) == Vec3::ZERO && cx.mesh.vertex(b) == Vec3::unit(0)
            })
            .unwrap();
        assert!((circ.values()[e] - 1.0).abs() < 1e-15);

        let flux = de_rham_reduce(DofKind::FaceFlux, Field::Vector(&g), &cx).unwrap();
        let f = (0..cx.mesh.n_faces())
            .find(|&f| cx.geometry.face_area_vector(f).x() > 0.5)
            .unwrap();
        assert!((flux.values()[f] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_rule_integrates_quadratic_gradient() {
        let cx = cube();
        let g = |x: Vec3| Vec3::new(2.0 * x.x(), 0.0, 0.0);
        let circ = de_rham_reduce(DofKind::EdgeCirculation, Field::Vector(&g), &cx).unwrap();
        let e = cx
            .mesh
            .edges()
            .iter()
            .position(|&[a, b]| {
                cx.mesh.vertex(a) == Vec3::ZERO && cx.mesh.vertex(b) == Vec3::unit(0)
            })
            .unwrap();
        assert!((circ.values()[e] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kind_tags_parse_and_reject() {
        for k in [
            DofKind::VertexPotential,
            DofKind::EdgeCirculation,
            DofKind::FaceFlux,
            DofKind::CellIntegral,
        ] {
            assert_eq!(k.tag().parse::<DofKind>().unwrap(), k);
        }
        assert!(matches!(
            "edge".parse::<DofKind>(),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn wrong_field_rank_rejected() {
        let cx = cube();
        let p = |_: Vec3| 1.0;
        assert!(de_rham_reduce(DofKind::FaceFlux, Field::Scalar(&p), &cx).is_err());
    }

    #[test]
    fn array_length_checked() {
        let cx = cube();
        assert!(DofArray::new(DofKind::VertexPotential, vec![0.0; 7], &cx).is_err());
        assert!(DofArray::new(DofKind::VertexPotential, vec![0.0; 8], &cx).is_ok());
    }
}
