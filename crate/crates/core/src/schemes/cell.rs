use crate::complex::MeshComplex;
use crate::dual::{reduce_dual_source, SourceVariant};
use crate::error::{Error, Result};
use crate::hodge::{assemble_global, HodgeKind, HodgeMethod};
use crate::linalg::CsrMatrix;

use super::{Blocks, DiscreteSystem, ManufacturedCase, SchemeKind};

pub(crate) fn assemble(
    cx: &MeshComplex,
    case: &ManufacturedCase,
    method: HodgeMethod,
    beta: f64,
    lift: bool,
) -> Result<DiscreteSystem> {
    let hodge = assemble_global(cx, &case.material(), method, HodgeKind::Cell, beta)?;
    let (nf, nc) = (cx.mesh.n_faces(), cx.mesh.n_cells());

    let mut triplets = Vec::new();
    for c in 0..nc {
        for &(f, s) in cx.mesh.cell(c) {
            triplets.push((c, f, f64::from(s)));
        }
    }
    let div = CsrMatrix::from_triplets(nc, nf, &triplets)?;

    // boundary faces carry the known potential through the dual-edge
    // circulation from x_c to x_f
    let mut rhs_flux = vec![0.0; nf];
    for f in (0..nf).filter(|&f| cx.mesh.is_boundary_face(f)) {
        let c = cx.mesh.face_cells(f)[0];
        let s = cx
            .mesh
            .cell(c)
            .iter()
            .find(|&&(g, _)| g == f)
            .map_or(1, |&(_, s)| s);
        let p = case.potential(cx.geometry.face_barycenter(f));
        if lift {
            rhs_flux[f] = -f64::from(s) * p;
        } else if p.abs() > 1e-12 {
            return Err(Error::InvalidProblem(format!(
                "case '{}' is {p:e} on boundary face {f}; only homogeneous Dirichlet data \
                 is supported",
                case.name
            )));
        }
    }
    let source = reduce_dual_source(&|x| case.source(x), cx, SourceVariant::Cell)?;
    let rhs_cell = source.values().iter().map(|s| -s).collect();
    Ok(DiscreteSystem {
        scheme: SchemeKind::Cell,
        hodge,
        beta,
        blocks: Blocks::Saddle {
            div,
            rhs_flux,
            rhs_cell,
        },
    })
}
