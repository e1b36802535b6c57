use crate::complex::MeshComplex;
use crate::error::{Error, Result};
use crate::hodge::reconstruct_field;
use crate::linalg::dot;
use crate::mesh::{de_rham_reduce, DofArray, DofKind, Field};

use super::{DiscreteSystem, ManufacturedCase, SchemeKind, SchemeSolution};

/// Discretization errors of a solved case. Vertex scheme: `energy` is the
/// discrete gradient energy error and `energy_rec` the reconstructed
/// gradient error; cell scheme: `flux` is the discrete flux energy error and
/// `energy_rec` the reconstructed flux error. `l2_potential` uses dual-cell
/// volumes (vertex scheme) or cell volumes (cell scheme).
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub h: f64,
    pub dofs: usize,
    pub energy: Option<f64>,
    pub energy_rec: f64,
    pub l2_potential: f64,
    pub flux: Option<f64>,
    pub iterations: usize,
    pub residual: f64,
}

fn energy(system: &DiscreteSystem, d: &[f64]) -> f64 {
    dot(d, &system.hodge.matrix.mul_vec(d)).max(0.0).sqrt()
}

pub fn evaluate_errors(
    case: &ManufacturedCase,
    system: &DiscreteSystem,
    solution: &SchemeSolution,
    cx: &MeshComplex,
) -> Result<ErrorReport> {
    let report = match system.scheme {
        SchemeKind::Vertex => {
            let p = &solution.potential;
            let grad_h = cx.incidence.grad.apply(p);
            let g = |x| case.gradient(x);
            let exact = de_rham_reduce(DofKind::EdgeCirculation, Field::Vector(&g), cx)?;
            let d: Vec<f64> = grad_h
                .iter()
                .zip(exact.values())
                .map(|(a, b)| a - b)
                .collect();

            let rec = reconstruct_field(
                &DofArray::new(DofKind::EdgeCirculation, grad_h, cx)?,
                cx,
                system.beta,
            )?;
            let mut rec_sq = 0.0;
            for (c, cd) in cx.dual.cells().iter().enumerate() {
                for (e, l) in cd.edges.iter().zip(rec.cell(c)) {
                    let diff = *l - case.gradient(e.subvolume_barycenter);
                    rec_sq += e.subvolume * case.tensor.bilinear(diff, diff);
                }
            }

            let l2_sq = cx
                .dual
                .dual_cell_volumes()
                .iter()
                .enumerate()
                .map(|(v, w)| w * (p[v] - case.potential(cx.mesh.vertex(v))).powi(2))
                .sum::<f64>();
            ErrorReport {
                h: cx.h(),
                dofs: system.dofs(),
                energy: Some(energy(system, &d)),
                energy_rec: rec_sq.sqrt(),
                l2_potential: l2_sq.sqrt(),
                flux: None,
                iterations: solution.stats.iterations,
                residual: solution.stats.residual,
            }
        }
        SchemeKind::Cell => {
            let phi = solution.flux.as_ref().ok_or_else(|| {
                Error::InvalidArgument("cell-scheme solution without fluxes".into())
            })?;
            let f = |x| case.flux(x);
            let exact = de_rham_reduce(DofKind::FaceFlux, Field::Vector(&f), cx)?;
            let d: Vec<f64> = phi.iter().zip(exact.values()).map(|(a, b)| a - b).collect();

            let inv = case.tensor.inverse_spd(1e12)?;
            let rec = reconstruct_field(
                &DofArray::new(DofKind::FaceFlux, phi.clone(), cx)?,
                cx,
                system.beta,
            )?;
            let mut rec_sq = 0.0;
            for (c, cd) in cx.dual.cells().iter().enumerate() {
                for (face, l) in cd.faces.iter().zip(rec.cell(c)) {
                    let diff = *l - case.flux(face.subvolume_barycenter);
                    rec_sq += face.subvolume * inv.bilinear(diff, diff);
                }
            }

            let l2_sq = (0..cx.mesh.n_cells())
                .map(|c| {
                    let err =
                        solution.potential[c] - case.potential(cx.geometry.cell_barycenter(c));
                    cx.geometry.cell_volume(c) * err * err
                })
                .sum::<f64>();
            ErrorReport {
                h: cx.h(),
                dofs: system.dofs(),
                energy: None,
                energy_rec: rec_sq.sqrt(),
                l2_potential: l2_sq.sqrt(),
                flux: Some(energy(system, &d)),
                iterations: solution.stats.iterations,
                residual: solution.stats.residual,
            }
        }
    };
    let values = [
        report.energy,
        Some(report.energy_rec),
        Some(report.l2_potential),
        report.flux,
    ];
    if values.iter().flatten().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::NumericalFailure(format!(
            "non-finite error norms: {report:?}"
        )));
    }
    Ok(report)
}
