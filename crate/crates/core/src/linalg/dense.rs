use crate::error::{Error, Result};

/// Small symmetric matrix in packed lower-triangular storage.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSym {
    n: usize,
    packed: Vec<f64>,
}

#[inline]
fn packed_index(i: usize, j: usize) -> usize {
    let (i, j) = if i >= j { (i, j) } else { (j, i) };
    i * (i + 1) / 2 + j
}

impl DenseSym {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            packed: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Builds from the lower triangle of `f(i, j)`.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                m.packed[packed_index(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[packed_index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.packed[packed_index(i, j)] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.packed[packed_index(i, j)] += v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.get(i, j).powi(2);
            }
        }
        s.sqrt()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).fold(0.0, |acc, j| acc + self.get(i, j) * x[j]))
            .collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            packed: self.packed.iter().map(|v| v * s).collect(),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn max_abs_diff(&self, other: &DenseSym) -> f64 {
        self.packed
            .iter()
            .zip(&other.packed)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Row-major `n×n`; column `k` is the eigenvector of `values[k]`.
    pub vectors: Vec<f64>,
}

impl SymEigen {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        let n = self.values.len();
        (0..n).map(|i| self.vectors[i * n + k]).collect()
    }
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigenvalue iteration.
pub fn dense_sym_eig(m: &DenseSym) -> Result<SymEigen> {
    let n = m.dim();
    if n > 256 {
        return Err(Error::InvalidArgument(format!(
            "dense eigen-decomposition limited to n <= 256, got {n}"
        )));
    }
    let mut a = m.to_rows();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = m.frobenius();
    let off = |a: &[Vec<f64>]| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i][j] * a[i][j];
                }
            }
        }
        s.sqrt()
    };

    let mut converged = scale == 0.0 || off(&a) <= 1e-13 * scale;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NumericalFailure(format!(
                "Jacobi eigen-iteration did not converge in {MAX_SWEEPS} sweeps"
            )));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        sweeps += 1;
        converged = off(&a) <= 1e-13 * scale;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (k, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + k] = v[i * n + src];
        }
    }
    Ok(SymEigen { values, vectors })
}

/// Cholesky factorization followed by two triangular solves.
pub fn dense_solve_spd(m: &DenseSym, b: &[f64]) -> Result<Vec<f64>> {
    let n = m.dim();
    if b.len() != n {
        return Err(Error::InvalidArgument(format!(
            "right-hand side has length {}, matrix dimension is {n}",
            b.len()
        )));
    }
    let mut l = DenseSym::zeros(n);
    for j in 0..n {
        let mut d = m.get(j, j);
        for k in 0..j {
            d -= l.get(j, k).powi(2);
        }
        if !(d > 0.0) {
            return Err(Error::NotSpd(format!(
                "nonpositive Cholesky pivot {d:e} at row {j}"
            )));
        }
        let d = d.sqrt();
        l.set(j, j, d);
        for i in (j + 1)..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / d);
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l.get(i, k) * y[k];
        }
        y[i] /= l.get(i, i);
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] -= l.get(k, i) * y[k];
        }
        y[i] /= l.get(i, i);
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_eigenvalues_sorted() {
        let m = DenseSym::from_fn(3, |i, j| if i == j { [3.0, 1.0, 2.0][i] } else { 0.0 });
        assert_eq!(dense_sym_eig(&m).unwrap().values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_characteristic_polynomial() {
        let m = DenseSym::from_fn(2, |i, j| if i == j { 2.0 } else { 1.0 });
        let e = dense_sym_eig(&m).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let e = dense_sym_eig(&DenseSym::identity(4)).unwrap();
        assert!(e.values.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn cholesky_small_cases() {
        let b = [1.5, -2.0, 0.25];
        assert_eq!(
            dense_solve_spd(&DenseSym::identity(3), &b).unwrap(),
            b.to_vec()
        );
        let m = DenseSym::from_fn(2, |i, j| [[4.0, 1.0], [1.0, 3.0]][i][j]);
        let x = dense_solve_spd(&m, &[1.0, 2.0]).unwrap();
        assert!((x[0] - 1.0 / 11.0).abs() < 1e-15 && (x[1] - 7.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn badly_scaled_diagonal_still_solves() {
        let m = DenseSym::from_fn(2, |i, j| if i == j { [1.0, 1e13][i] } else { 0.0 });
        let x = dense_solve_spd(&m, &[2.0, 3e13]).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-15 && (x[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn indefinite_matrix_rejected() {
        let m = DenseSym::from_fn(2, |i, j| if i == j { 1.0 } else { 2.0 });
        assert!(matches!(
            dense_solve_spd(&m, &[1.0, 1.0]),
            Err(Error::NotSpd(_))
        ));
    }
}
