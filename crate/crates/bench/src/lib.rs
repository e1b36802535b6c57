//! Fixtures shared by the pipeline benchmarks.

use cdo_core::hodge::HodgeMethod;
use cdo_core::mesh::{build_cartesian_hex, build_prismatic_polygonal, perturb_hex, Aabb};
use cdo_core::schemes::{assemble_scheme, DiscreteSystem, ManufacturedCase, SchemeKind};
use cdo_core::{MeshComplex, PrimalMesh};

pub const SEED: u64 = 42;

/// Perturbed hexahedral mesh of the unit cube with `n³` cells.
pub fn perturbed_mesh(n: usize) -> PrimalMesh {
    let base = build_cartesian_hex([n; 3], Aabb::unit()).expect("valid box");
    perturb_hex(&base, 0.2, SEED).expect("perturbation succeeds")
}

pub fn perturbed(n: usize) -> MeshComplex {
    MeshComplex::new(perturbed_mesh(n)).expect("valid mesh")
}

pub fn prism(n: usize) -> MeshComplex {
    MeshComplex::new(build_prismatic_polygonal(n, n / 2).expect("valid prism")).expect("valid mesh")
}

/// Assembled sine-iso system on `cx`.
pub fn system(cx: &MeshComplex, scheme: SchemeKind) -> DiscreteSystem {
    let case = ManufacturedCase::builtin("sin-iso").expect("builtin case");
    assemble_scheme(scheme, cx, &case, HodgeMethod::Reconstruction, 1.0).expect("assembly")
}
