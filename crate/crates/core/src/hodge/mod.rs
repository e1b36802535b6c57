//! Discrete Hodge operators: cell-local matrices, their design-condition
//! checks, global assembly and the subcell reconstruction behind them.

mod local;
mod material;

pub use local::{
    build_local_hodge, check_local_hodge, HodgeCheck, HodgeKind, HodgeMethod, LocalHodge,
};
pub use material::Material;

use rayon::prelude::*;

use crate::complex::MeshComplex;
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::linalg::CsrMatrix;
use crate::mesh::{DofArray, DofKind};
use local::{build_with_tensor, LocalFrame};

/// Assembled Hodge matrix over global edges (vertex kind) or faces (cell
/// kind).
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalHodge {
    pub kind: HodgeKind,
    pub method: HodgeMethod,
    pub matrix: CsrMatrix,
}

/// Local Hodge matrices of every cell, built in parallel and returned in
/// cell order. The first failing cell (by id) determines the error.
pub fn build_local_hodges(
    cx: &MeshComplex,
    material: &Material,
    method: HodgeMethod,
    kind: HodgeKind,
    beta: f64,
) -> Result<Vec<LocalHodge>> {
    let tensors = material.sample_cells(cx)?;
    let built: Vec<Result<LocalHodge>> = tensors
        .par_iter()
        .enumerate()
        .map(|(c, &t)| build_with_tensor(cx, c, method, kind, t, beta))
        .collect();
    built.into_iter().collect()
}

/// Sums local contributions in ascending cell order.
pub fn assemble_global(
    cx: &MeshComplex,
    material: &Material,
    method: HodgeMethod,
    kind: HodgeKind,
    beta: f64,
) -> Result<GlobalHodge> {
    let locals = build_local_hodges(cx, material, method, kind, beta)?;
    let n = match kind {
        HodgeKind::Vertex => cx.mesh.n_edges(),
        HodgeKind::Cell => cx.mesh.n_faces(),
    };
    Ok(GlobalHodge {
        kind,
        method,
        matrix: assemble_locals(n, &locals)?,
    })
}

pub(crate) fn assemble_locals(n: usize, locals: &[LocalHodge]) -> Result<CsrMatrix> {
    let mut triplets = Vec::with_capacity(locals.iter().map(|h| h.dofs.len().pow(2)).sum());
    for h in locals {
        for (k, (&a, &sa)) in h.dofs.iter().zip(&h.signs).enumerate() {
            for (l, (&b, &sb)) in h.dofs.iter().zip(&h.signs).enumerate() {
                triplets.push((a, b, f64::from(sa * sb) * h.matrix.get(k, l)));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, &triplets)
}

/// Piecewise-constant field on the edge subvolumes (gradients) or face
/// subvolumes (fluxes) of every cell, in the dual module's local order.
#[derive(Clone, Debug, PartialEq)]
pub struct SubcellField {
    pub kind: DofKind,
    values: Vec<Vec<Vec3>>,
}

impl SubcellField {
    pub fn cell(&self, c: usize) -> &[Vec3] {
        &self.values[c]
    }

    pub fn n_cells(&self) -> usize {
        self.values.len()
    }
}

/// Reconstructs a gradient from edge circulations or a flux from face
/// fluxes.
pub fn reconstruct_field(dofs: &DofArray, cx: &MeshComplex, beta: f64) -> Result<SubcellField> {
    let kind = match dofs.kind() {
        DofKind::EdgeCirculation => HodgeKind::Vertex,
        DofKind::FaceFlux => HodgeKind::Cell,
        other => {
            return Err(Error::InvalidArgument(format!(
                "cannot reconstruct a vector field from {other} DoFs"
            )))
        }
    };
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "stabilization weight must be positive, got {beta}"
        )));
    }
    let values = (0..cx.mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let frame = LocalFrame::new(cx, c, kind);
            let u: Vec<f64> = frame
                .ids
                .iter()
                .zip(&frame.signs)
                .map(|(&i, &s)| f64::from(s) * dofs.values()[i])
                .collect();
            frame.reconstruct(&u, beta)
        })
        .collect();
    Ok(SubcellField {
        kind: dofs.kind(),
        values,
    })
}
