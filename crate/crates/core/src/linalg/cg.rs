use super::{axpy, dot, norm2, CsrMatrix};
use crate::error::{Error, Result};

/// A symmetric linear map that conjugate gradients can iterate on.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// `y = A x`. Fallible so that operators built on nested solves can
    /// surface inner failures.
    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()>;
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        self.matvec(x, y);
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Preconditioner {
    #[default]
    None,
    Jacobi,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CgStats {
    pub iterations: usize,
    /// Final relative residual `|b - Ax| / |b|` (recursively updated).
    pub residual: f64,
    pub history: Vec<f64>,
}

/// Solves `A x = b` for a sparse SPD matrix.
pub fn cg_solve(
    a: &CsrMatrix,
    b: &[f64],
    tol: f64,
    max_iter: usize,
    preconditioner: Preconditioner,
) -> Result<(Vec<f64>, CgStats)> {
    match preconditioner {
        Preconditioner::None => cg_solve_operator(a, b, tol, max_iter, None),
        Preconditioner::Jacobi => {
            let diag = a.diagonal();
            if let Some((i, d)) = diag.iter().enumerate().find(|(_, d)| **d <= 0.0) {
                return Err(Error::NotSpd(format!("diagonal entry {i} is {d:e}")));
            }
            let inv: Vec<f64> = diag.iter().map(|d| 1.0 / d).collect();
            cg_solve_operator(a, b, tol, max_iter, Some(&inv))
        }
    }
}

/// Preconditioned conjugate gradients on an abstract operator.
///
/// `inv_diag`, when given, is applied as a diagonal preconditioner. The
/// iteration starts from zero and stops once the relative residual drops
/// to `tol`.
pub fn cg_solve_operator<A: LinearOperator + ?Sized>(
    a: &A,
    b: &[f64],
    tol: f64,
    max_iter: usize,
    inv_diag: Option<&[f64]>,
) -> Result<(Vec<f64>, CgStats)> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::InvalidArgument(format!(
            "right-hand side has length {}, operator dimension is {n}",
            b.len()
        )));
    }
    let mut x = vec![0.0; n];
    let b_norm = norm2(b);
    let mut stats = CgStats::default();
    if b_norm == 0.0 {
        stats.history.push(0.0);
        return Ok((x, stats));
    }

    let precondition = |r: &[f64], z: &mut [f64]| match inv_diag {
        Some(d) => z
            .iter_mut()
            .zip(r.iter().zip(d))
            .for_each(|(zi, (ri, di))| *zi = ri * di),
        None => z.copy_from_slice(r),
    };

    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    precondition(&r, &mut z);
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut rel = 1.0;
    stats.history.push(rel);

    while stats.iterations < max_iter {
        a.apply(&p, &mut ap)?;
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NotSpd(format!(
                "conjugate gradient breakdown at iteration {}: p'Ap = {pap:e}",
                stats.iterations
            )));
        }
        let alpha = rz / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        stats.iterations += 1;
        rel = norm2(&r) / b_norm;
        stats.history.push(rel);
        if rel <= tol {
            stats.residual = rel;
            return Ok((x, stats));
        }
        precondition(&r, &mut z);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    Err(Error::SolverFailure {
        iterations: stats.iterations,
        residual: rel,
        history: stats.history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> CsrMatrix {
        CsrMatrix::from_triplets(2, 2, &[(0, 0, 4.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)])
            .unwrap()
    }

    #[test]
    fn identity_converges_in_one_iteration() {
        let b = [1.0, -2.0, 3.5, 0.25, 7.0];
        let (x, stats) =
            cg_solve(&CsrMatrix::identity(5), &b, 1e-14, 10, Preconditioner::None).unwrap();
        assert_eq!(x, b.to_vec());
        assert_eq!(stats.iterations, 1);
    }

    #[test]
    fn two_by_two_closed_form() {
        for pc in [Preconditioner::None, Preconditioner::Jacobi] {
            let (x, _) = cg_solve(&two_by_two(), &[1.0, 2.0], 1e-14, 10, pc).unwrap();
            assert!((x[0] - 1.0 / 11.0).abs() < 1e-12);
            assert!((x[1] - 7.0 / 11.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_row_breaks_down() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0)]).unwrap();
        let err = cg_solve(&a, &[1.0, 1.0], 1e-12, 10, Preconditioner::None).unwrap_err();
        assert!(matches!(err, Error::NotSpd(_)), "{err}");
        let err = cg_solve(&a, &[1.0, 1.0], 1e-12, 10, Preconditioner::Jacobi).unwrap_err();
        assert!(matches!(err, Error::NotSpd(_)), "{err}");
    }

    #[test]
    fn iteration_cap_reports_history() {
        let n = 50;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, &t).unwrap();
        let err = cg_solve(&a, &vec![1.0; n], 1e-14, 3, Preconditioner::None).unwrap_err();
        match err {
            Error::SolverFailure {
                iterations,
                history,
                ..
            } => {
                assert_eq!(iterations, 3);
                assert_eq!(history.len(), 4);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let (x, stats) = cg_solve(
            &two_by_two(),
            &[0.0, 0.0],
            1e-12,
            10,
            Preconditioner::Jacobi,
        )
        .unwrap();
        assert_eq!(x, vec![0.0, 0.0]);
        assert_eq!(stats.iterations, 0);
    }
}
