//! Deterministic numerical kernel: compressed sparse rows, preconditioned
//! conjugate gradients and small dense symmetric routines.
//!
//! All reductions accumulate left to right in index order so that repeated
//! runs are bitwise reproducible.

mod cg;
mod dense;
mod sparse;

pub use cg::{cg_solve, cg_solve_operator, CgStats, LinearOperator, Preconditioner};
pub use dense::{dense_solve_spd, dense_sym_eig, DenseSym, SymEigen};
pub use sparse::CsrMatrix;

/// Dot product with fixed left-to-right accumulation.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + x * y)
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
