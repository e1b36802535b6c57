use rayon::prelude::*;

use crate::complex::MeshComplex;
use crate::dual::{reduce_dual_source, SourceVariant};
use crate::error::{Error, Result};
use crate::hodge::assemble_locals;
use crate::hodge::{build_local_hodges, GlobalHodge, HodgeKind, HodgeMethod, LocalHodge};
use crate::linalg::{CsrMatrix, DenseSym};

use super::{Blocks, DiscreteSystem, ManufacturedCase, SchemeKind};

/// `G_cᵀ H_c G_c` on the cell's local vertices.
fn local_stiffness(cx: &MeshComplex, h: &LocalHodge) -> DenseSym {
    let verts = cx.mesh.cell_vertices(h.cell);
    let nv = verts.len();
    let ne = h.dofs.len();
    let ends: Vec<[usize; 2]> = h
        .dofs
        .iter()
        .map(|&e| {
            let [a, b] = cx.mesh.edge(e);
            let local = |v: usize| verts.binary_search(&v).expect("vertex of cell");
            [local(a), local(b)]
        })
        .collect();
    // hg[k][j] = (H G)[k][j]
    let mut hg = vec![vec![0.0; nv]; ne];
    for (k, row) in hg.iter_mut().enumerate() {
        for (l, &[tail, head]) in ends.iter().enumerate() {
            let v = h.matrix.get(k, l);
            row[head] += v;
            row[tail] -= v;
        }
    }
    let mut stiff = DenseSym::zeros(nv);
    for i in 0..nv {
        for j in 0..=i {
            let mut s = 0.0;
            for (k, &[tail, head]) in ends.iter().enumerate() {
                let g = if head == i {
                    1.0
                } else if tail == i {
                    -1.0
                } else {
                    continue;
                };
                s += g * hg[k][j];
            }
            stiff.set(i, j, s);
        }
    }
    stiff
}

/// Dirichlet values on boundary vertices: the exact potential when
/// `lift`, zero otherwise (after checking the case vanishes there).
fn dirichlet_values(cx: &MeshComplex, case: &ManufacturedCase, lift: bool) -> Result<Vec<f64>> {
    let mut values = vec![0.0; cx.mesh.n_vertices()];
    for v in (0..cx.mesh.n_vertices()).filter(|&v| cx.mesh.is_boundary_vertex(v)) {
        let p = case.potential(cx.mesh.vertex(v));
        if lift {
            values[v] = p;
        } else if p.abs() > 1e-12 {
            return Err(Error::InvalidProblem(format!(
                "case '{}' is {p:e} at boundary vertex {v}; only homogeneous Dirichlet data \
                 is supported",
                case.name
            )));
        }
    }
    Ok(values)
}

pub(crate) fn assemble(
    cx: &MeshComplex,
    case: &ManufacturedCase,
    method: HodgeMethod,
    beta: f64,
    lift: bool,
) -> Result<DiscreteSystem> {
    let interior = cx.mesh.interior_vertices();
    if interior.is_empty() {
        return Err(Error::InvalidProblem("mesh has no interior vertex".into()));
    }
    let dirichlet = dirichlet_values(cx, case, lift)?;
    let material = case.material();
    let locals = build_local_hodges(cx, &material, method, HodgeKind::Vertex, beta)?;
    let hodge = GlobalHodge {
        kind: HodgeKind::Vertex,
        method,
        matrix: assemble_locals(cx.mesh.n_edges(), &locals)?,
    };

    let stiffness: Vec<DenseSym> = locals.par_iter().map(|h| local_stiffness(cx, h)).collect();
    let nv = cx.mesh.n_vertices();
    let mut triplets = Vec::new();
    for (c, k) in stiffness.iter().enumerate() {
        let verts = cx.mesh.cell_vertices(c);
        for (i, &a) in verts.iter().enumerate() {
            for (j, &b) in verts.iter().enumerate() {
                triplets.push((a, b, k.get(i, j)));
            }
        }
    }
    let full = CsrMatrix::from_triplets(nv, nv, &triplets)?;

    let source = reduce_dual_source(&|x| case.source(x), cx, SourceVariant::Vertex)?;
    let mut index = vec![usize::MAX; nv];
    for (i, &v) in interior.iter().enumerate() {
        index[v] = i;
    }
    let mut reduced = Vec::new();
    let mut rhs = Vec::with_capacity(interior.len());
    for (i, &v) in interior.iter().enumerate() {
        let (cols, vals) = full.row(v);
        let mut r = source.values()[v];
        for (&w, &a) in cols.iter().zip(vals) {
            if index[w] == usize::MAX {
                r -= a * dirichlet[w];
            } else {
                reduced.push((i, index[w], a));
            }
        }
        rhs.push(r);
    }
    let n = interior.len();
    Ok(DiscreteSystem {
        scheme: SchemeKind::Vertex,
        hodge,
        beta,
        blocks: Blocks::Spd {
            matrix: CsrMatrix::from_triplets(n, n, &reduced)?,
            rhs,
            interior,
            dirichlet,
        },
    })
}
