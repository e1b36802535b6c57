//! Small fixed-size vector and tensor types used by the geometric kernels.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::linalg::{dense_sym_eig, DenseSym};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn unit(axis: usize) -> Self {
        let mut v = [0.0; 3];
        v[axis] = 1.0;
        Vec3(v)
    }

    pub fn x(self) -> f64 {
        self.0[0]
    }

    pub fn y(self) -> f64 {
        self.0[1]
    }

    pub fn z(self) -> f64 {
        self.0[2]
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        let [a, b, c] = self.0;
        let [d, e, f] = o.0;
        Vec3([b * f - c * e, c * d - a * f, a * e - b * d])
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_inf(self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Outer product `self ⊗ o`, i.e. `m[i][j] = self[i] * o[j]`.
    pub fn outer(self, o: Vec3) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.0[i] * o.0[j];
            }
        }
        Mat3(m)
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3([-self.0[0], -self.0[1], -self.0[2]])
    }
}

/// Row-major 3×3 matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const ZERO: Mat3 = Mat3([[0.0; 3]; 3]);

    pub fn identity() -> Self {
        Self::diag(1.0, 1.0, 1.0)
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        Mat3([[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]])
    }

    pub fn scaled(self, s: f64) -> Self {
        let mut m = self.0;
        m.iter_mut().flatten().for_each(|v| *v *= s);
        Mat3(m)
    }

    pub fn transpose(self) -> Self {
        let mut t = [[0.0; 3]; 3];
        for (i, row) in self.0.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                t[j][i] = *v;
            }
        }
        Mat3(t)
    }

    pub fn mul_vec(self, v: Vec3) -> Vec3 {
        let m = &self.0;
        Vec3([
            m[0][0] * v.0[0] + m[0][1] * v.0[1] + m[0][2] * v.0[2],
            m[1][0] * v.0[0] + m[1][1] * v.0[1] + m[1][2] * v.0[2],
            m[2][0] * v.0[0] + m[2][1] * v.0[1] + m[2][2] * v.0[2],
        ])
    }

    pub fn mul_mat(self, o: Mat3) -> Mat3 {
        let mut r = [[0.0; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Mat3(r)
    }

    pub fn trace(self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn frobenius(self) -> f64 {
        self.0.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn det(self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn is_symmetric(self, rel_tol: f64) -> bool {
        let scale = self.frobenius().max(f64::MIN_POSITIVE);
        (0..3).all(|i| (0..3).all(|j| (self.0[i][j] - self.0[j][i]).abs() <= rel_tol * scale))
    }

    /// Ascending eigenvalues of a symmetric matrix.
    pub fn sym_eigenvalues(self) -> Result<[f64; 3]> {
        let eig = dense_sym_eig(&DenseSym::from_fn(3, |i, j| self.0[i][j]))?;
        Ok([eig.values[0], eig.values[1], eig.values[2]])
    }

    /// Inverse of a symmetric positive definite tensor, refusing
    /// condition numbers above `max_condition`.
    pub fn inverse_spd(self, max_condition: f64) -> Result<Mat3> {
        let [lo, _, hi] = self.sym_eigenvalues()?;
        if lo <= 0.0 {
            return Err(Error::NotSpd(format!(
                "tensor has nonpositive eigenvalue {lo:e}"
            )));
        }
        if hi / lo > max_condition {
            return Err(Error::NumericalFailure(format!(
                "tensor condition number {:e} exceeds guard {max_condition:e}",
                hi / lo
            )));
        }
        let m = &self.0;
        let cof = |a: usize, b: usize, c: usize, d: usize| m[a][c] * m[b][d] - m[a][d] * m[b][c];
        let det = self.det();
        let adj = [
            [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
            [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
            [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
        ];
        let mut inv = Mat3(adj).scaled(1.0 / det);
        // symmetrize exactly
        for i in 0..3 {
            for j in 0..i {
                let v = 0.5 * (inv.0[i][j] + inv.0[j][i]);
                inv.0[i][j] = v;
                inv.0[j][i] = v;
            }
        }
        Ok(inv)
    }

    /// Quadratic form `a · M b`.
    pub fn bilinear(self, a: Vec3, b: Vec3) -> f64 {
        a.dot(self.mul_vec(b))
    }

    /// Rotation about the z, then y, then x axes (angles in radians).
    pub fn rotation(ax: f64, ay: f64, az: f64) -> Mat3 {
        let (sx, cx) = ax.sin_cos();
        let (sy, cy) = ay.sin_cos();
        let (sz, cz) = az.sin_cos();
        let rx = Mat3([[1.0, 0.0, 0.0], [0.0, cx, -sx], [0.0, sx, cx]]);
        let ry = Mat3([[cy, 0.0, sy], [0.0, 1.0, 0.0], [-sy, 0.0, cy]]);
        let rz = Mat3([[cz, -sz, 0.0], [sz, cz, 0.0], [0.0, 0.0, 1.0]]);
        rx.mul_mat(ry).mul_mat(rz)
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, o: Mat3) -> Mat3 {
        let mut r = self.0;
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v += o.0[i][j];
            }
        }
        Mat3(r)
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, o: Mat3) -> Mat3 {
        self + o.scaled(-1.0)
    }
}

impl AddAssign for Mat3 {
    fn add_assign(&mut self, o: Mat3) {
        *self = *self + o;
    }
}

/// Signed volume of the tetrahedron `(a, b, c, d)`, positive when
/// `(b - a, c - a, d - a)` is right-handed.
pub fn tet_volume(a: Vec3, b: Vec3, c: Vec3, d: Vec3) -> f64 {
    (b - a).cross(c - a).dot(d - a) / 6.0
}

/// Area vector of the triangle `(a, b, c)` following its vertex order.
pub fn triangle_area_vector(a: Vec3, b: Vec3, c: Vec3) -> Vec3 {
    (b - a).cross(c - a) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_follows_right_hand_rule() {
        assert_eq!(Vec3::unit(0).cross(Vec3::unit(1)), Vec3::unit(2));
        assert_eq!(Vec3::unit(1).cross(Vec3::unit(2)), Vec3::unit(0));
    }

    #[test]
    fn spd_inverse_round_trips() {
        let m = Mat3([[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]]);
        let inv = m.inverse_spd(1e12).unwrap();
        let prod = m.mul_mat(inv);
        assert!((prod - Mat3::identity()).frobenius() < 1e-14);
    }

    #[test]
    fn condition_guard_rejects_nearly_singular_tensor() {
        let m = Mat3::diag(1.0, 1.0, 1e-13);
        assert!(matches!(
            m.inverse_spd(1e12),
            Err(Error::NumericalFailure(_))
        ));
    }

    #[test]
    fn rotation_is_orthogonal() {
        let r = Mat3::rotation(0.3, -0.7, 1.1);
        assert!((r.mul_mat(r.transpose()) - Mat3::identity()).frobenius() < 1e-15);
    }

    #[test]
    fn unit_tet_volume() {
        let v = tet_volume(Vec3::ZERO, Vec3::unit(0), Vec3::unit(1), Vec3::unit(2));
        assert!((v - 1.0 / 6.0).abs() < 1e-16);
    }
}
