use std::cell::Cell;

use crate::error::Result;
use crate::linalg::{cg_solve, cg_solve_operator, CsrMatrix, LinearOperator, Preconditioner};

use super::{Blocks, DiscreteSystem};

/// Iteration counts and final relative residuals. For the saddle system the
/// outer loop is the Schur-complement CG and the inner figures aggregate the
/// nested Hodge solves.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<f64>,
    pub inner_iterations: usize,
    pub inner_residual: f64,
}

/// Potentials at all vertices (vertex scheme, boundary values included) or
/// all cells (cell scheme); face fluxes for the cell scheme.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeSolution {
    pub potential: Vec<f64>,
    pub flux: Option<Vec<f64>>,
    pub stats: SolveStats,
}

/// Nested solve `H z = r` with Jacobi-preconditioned CG.
struct HodgeInverse<'a> {
    h: &'a CsrMatrix,
    inv_diag: Vec<f64>,
    tol: f64,
    max_iter: usize,
    iterations: Cell<usize>,
    residual: Cell<f64>,
}

impl HodgeInverse<'_> {
    fn solve(&self, r: &[f64]) -> Result<Vec<f64>> {
        let (z, st) = cg_solve_operator(self.h, r, self.tol, self.max_iter, Some(&self.inv_diag))?;
        self.iterations.set(self.iterations.get() + st.iterations);
        self.residual.set(self.residual.get().max(st.residual));
        Ok(z)
    }
}

/// `S = DIV H⁻¹ DIVᵀ`.
struct Schur<'a> {
    div: &'a CsrMatrix,
    div_t: CsrMatrix,
    inner: HodgeInverse<'a>,
}

impl LinearOperator for Schur<'_> {
    fn dim(&self) -> usize {
        self.div.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        let z = self.inner.solve(&self.div_t.mul_vec(x))?;
        self.div.matvec(&z, y);
        Ok(())
    }
}

pub(crate) fn transpose(m: &CsrMatrix) -> Result<CsrMatrix> {
    let mut t = Vec::with_capacity(m.nnz());
    for r in 0..m.nrows() {
        let (cols, vals) = m.row(r);
        t.extend(cols.iter().zip(vals).map(|(&c, &v)| (c, r, v)));
    }
    CsrMatrix::from_triplets(m.ncols(), m.nrows(), &t)
}

/// Jacobi-preconditioned CG for the SPD system; Uzawa with nested CG for
/// the saddle system (inner tolerance `tol / 100`).
pub fn solve_scheme(system: &DiscreteSystem, tol: f64, max_iter: usize) -> Result<SchemeSolution> {
    match &system.blocks {
        Blocks::Spd {
            matrix,
            rhs,
            interior,
            dirichlet,
        } => {
            let (x, st) = cg_solve(matrix, rhs, tol, max_iter, Preconditioner::Jacobi)?;
            let mut potential = dirichlet.clone();
            for (&v, xi) in interior.iter().zip(x) {
                potential[v] = xi;
            }
            Ok(SchemeSolution {
                potential,
                flux: None,
                stats: SolveStats {
                    iterations: st.iterations,
                    residual: st.residual,
                    history: st.history,
                    inner_iterations: 0,
                    inner_residual: 0.0,
                },
            })
        }
        Blocks::Saddle {
            div,
            rhs_flux,
            rhs_cell,
        } => {
            let h = &system.hodge.matrix;
            let diag = h.diagonal();
            if let Some((f, d)) = diag.iter().enumerate().find(|(_, d)| **d <= 0.0) {
                return Err(crate::error::Error::NotSpd(format!(
                    "Hodge diagonal entry {f} is {d:e}"
                )));
            }
            let inner = HodgeInverse {
                h,
                inv_diag: diag.iter().map(|d| 1.0 / d).collect(),
                tol: tol / 100.0,
                max_iter,
                iterations: Cell::new(0),
                residual: Cell::new(0.0),
            };
            let schur = Schur {
                div,
                div_t: transpose(div)?,
                inner,
            };
            // S p = s̄ - DIV H⁻¹ g, with rhs_cell = -s̄
            let hg = schur.inner.solve(rhs_flux)?;
            let dhg = div.mul_vec(&hg);
            let b: Vec<f64> = rhs_cell.iter().zip(&dhg).map(|(r, d)| -r - d).collect();
            let mut pdiag = vec![0.0; div.nrows()];
            for (c, pd) in pdiag.iter_mut().enumerate() {
                let (cols, vals) = div.row(c);
                *pd = cols
                    .iter()
                    .zip(vals)
                    .map(|(&f, v)| v * v / diag[f])
                    .sum::<f64>();
                *pd = 1.0 / *pd;
            }
            let (p, st) = cg_solve_operator(&schur, &b, tol, max_iter, Some(&pdiag))?;
            let mut r = schur.div_t.mul_vec(&p);
            for (ri, gi) in r.iter_mut().zip(rhs_flux) {
                *ri += gi;
            }
            let flux = schur.inner.solve(&r)?;
            Ok(SchemeSolution {
                potential: p,
                flux: Some(flux),
                stats: SolveStats {
                    iterations: st.iterations,
                    residual: st.residual,
                    history: st.history,
                    inner_iterations: schur.inner.iterations.get(),
                    inner_residual: schur.inner.residual.get(),
                },
            })
        }
    }
}
