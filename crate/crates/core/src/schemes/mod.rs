//! Vertex-based (SPD) and cell-based (saddle-point) schemes with
//! homogeneous Dirichlet conditions, manufactured cases, patch tests and
//! error norms.

mod case;
mod cell;
mod errors;
mod solve;
mod vertex;

pub use case::{rotated_tensor, ManufacturedCase, Potential};
pub use errors::{evaluate_errors, ErrorReport};
pub use solve::{solve_scheme, SchemeSolution, SolveStats};

use std::fmt;
use std::str::FromStr;

use crate::complex::MeshComplex;
use crate::error::{Error, Result};
use crate::geom::{Mat3, Vec3};
use crate::hodge::{reconstruct_field, GlobalHodge, HodgeMethod};
use crate::linalg::CsrMatrix;
use crate::mesh::{DofArray, DofKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Vertex,
    Cell,
}

impl SchemeKind {
    pub fn tag(self) -> &'static str {
        match self {
            SchemeKind::Vertex => "vertex",
            SchemeKind::Cell => "cell",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vertex" => Ok(SchemeKind::Vertex),
            "cell" => Ok(SchemeKind::Cell),
            other => Err(Error::InvalidArgument(format!("unknown scheme '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Blocks {
    /// Interior-vertex system; `dirichlet` holds all-vertex boundary values.
    Spd {
        matrix: CsrMatrix,
        rhs: Vec<f64>,
        interior: Vec<usize>,
        dirichlet: Vec<f64>,
    },
    /// `[[H, -DIVᵀ], [-DIV, 0]] [φ; p] = [rhs_flux; rhs_cell]`, with the
    /// Hodge block stored in [`DiscreteSystem::hodge`].
    Saddle {
        div: CsrMatrix,
        rhs_flux: Vec<f64>,
        rhs_cell: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSystem {
    pub scheme: SchemeKind,
    pub hodge: GlobalHodge,
    pub beta: f64,
    pub blocks: Blocks,
}

impl DiscreteSystem {
    pub fn dofs(&self) -> usize {
        match &self.blocks {
            Blocks::Spd { interior, .. } => interior.len(),
            Blocks::Saddle { div, .. } => div.nrows() + div.ncols(),
        }
    }

    /// The full symmetric matrix: the SPD matrix itself, or the assembled
    /// indefinite block matrix over `[faces, cells]`.
    pub fn matrix(&self) -> Result<CsrMatrix> {
        match &self.blocks {
            Blocks::Spd { matrix, .. } => Ok(matrix.clone()),
            Blocks::Saddle { div, .. } => {
                let h = &self.hodge.matrix;
                let nf = h.nrows();
                let n = nf + div.nrows();
                let mut t = Vec::with_capacity(h.nnz() + 2 * div.nnz());
                for r in 0..nf {
                    let (cols, vals) = h.row(r);
                    t.extend(cols.iter().zip(vals).map(|(&c, &v)| (r, c, v)));
                }
                for c in 0..div.nrows() {
                    let (cols, vals) = div.row(c);
                    for (&f, &v) in cols.iter().zip(vals) {
                        t.push((f, nf + c, -v));
                        t.push((nf + c, f, -v));
                    }
                }
                CsrMatrix::from_triplets(n, n, &t)
            }
        }
    }

    pub fn rhs(&self) -> Vec<f64> {
        match &self.blocks {
            Blocks::Spd { rhs, .. } => rhs.clone(),
            Blocks::Saddle {
                rhs_flux, rhs_cell, ..
            } => rhs_flux.iter().chain(rhs_cell).copied().collect(),
        }
    }
}

/// Vertex-based SPD system `Rᵀ GRADᵀ H GRAD R`. The case must vanish on
/// the boundary.
pub fn assemble_vertex_scheme(
    cx: &MeshComplex,
    case: &ManufacturedCase,
    method: HodgeMethod,
    beta: f64,
) -> Result<DiscreteSystem> {
    vertex::assemble(cx, case, method, beta, false)
}

/// Cell-based saddle-point system. The case must vanish on the boundary.
pub fn assemble_cell_scheme(
    cx: &MeshComplex,
    case: &ManufacturedCase,
    method: HodgeMethod,
    beta: f64,
) -> Result<DiscreteSystem> {
    cell::assemble(cx, case, method, beta, false)
}

pub fn assemble_scheme(
    scheme: SchemeKind,
    cx: &MeshComplex,
    case: &ManufacturedCase,
    method: HodgeMethod,
    beta: f64,
) -> Result<DiscreteSystem> {
    match scheme {
        SchemeKind::Vertex => assemble_vertex_scheme(cx, case, method, beta),
        SchemeKind::Cell => assemble_cell_scheme(cx, case, method, beta),
    }
}

/// Max-norm deviations of a patch-test solution from the affine field.
#[derive(Clone, Debug, PartialEq)]
pub struct PatchReport {
    /// At vertices (vertex scheme) or cell barycenters (cell scheme).
    pub potential: f64,
    /// Reconstructed gradient (vertex scheme) or flux (cell scheme) against
    /// the exact constant.
    pub field: f64,
    /// Face fluxes against `f_out·(-Λa)`; zero for the vertex scheme.
    pub flux: f64,
    pub errors: ErrorReport,
}

/// Solves `-div(Λ grad p) = 0` with the affine Dirichlet data `a·x + b`
/// lifted onto boundary DoFs.
#[allow(clippy::too_many_arguments)]
pub fn patch_test(
    scheme: SchemeKind,
    cx: &MeshComplex,
    tensor: Mat3,
    a: Vec3,
    b: f64,
    method: HodgeMethod,
    beta: f64,
    tol: f64,
) -> Result<PatchReport> {
    let case = ManufacturedCase::affine(a, b, tensor);
    let system = match scheme {
        SchemeKind::Vertex => vertex::assemble(cx, &case, method, beta, true)?,
        SchemeKind::Cell => cell::assemble(cx, &case, method, beta, true)?,
    };
    let sol = solve_scheme(&system, tol, 100_000)?;
    let max_dev = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, |m: f64, v| m.max(v.abs()));
    let report = match scheme {
        SchemeKind::Vertex => {
            let potential = max_dev(
                &mut (0..cx.mesh.n_vertices())
                    .map(|v| sol.potential[v] - case.potential(cx.mesh.vertex(v))),
            );
            let grad = cx.incidence.grad.apply(&sol.potential);
            let rec = reconstruct_field(
                &DofArray::new(DofKind::EdgeCirculation, grad, cx)?,
                cx,
                beta,
            )?;
            let field = max_dev(
                &mut (0..cx.mesh.n_cells())
                    .flat_map(|c| rec.cell(c).iter().map(|g| (*g - a).norm_inf())),
            );
            PatchReport {
                potential,
                field,
                flux: 0.0,
                errors: evaluate_errors(&case, &system, &sol, cx)?,
            }
        }
        SchemeKind::Cell => {
            let potential = max_dev(
                &mut (0..cx.mesh.n_cells())
                    .map(|c| sol.potential[c] - case.potential(cx.geometry.cell_barycenter(c))),
            );
            let phi = sol.flux.clone().unwrap_or_default();
            let exact = -tensor.mul_vec(a);
            let flux = max_dev(
                &mut (0..cx.mesh.n_faces())
                    .map(|f| phi[f] - cx.geometry.face_area_vector(f).dot(exact)),
            );
            let rec = reconstruct_field(&DofArray::new(DofKind::FaceFlux, phi, cx)?, cx, beta)?;
            let field = max_dev(
                &mut (0..cx.mesh.n_cells())
                    .flat_map(|c| rec.cell(c).iter().map(|g| (*g - exact).norm_inf())),
            );
            PatchReport {
                potential,
                field,
                flux,
                errors: evaluate_errors(&case, &system, &sol, cx)?,
            }
        }
    };
    Ok(report)
}
