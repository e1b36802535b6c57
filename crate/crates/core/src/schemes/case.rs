use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{Mat3, Vec3};
use crate::hodge::Material;

/// Closed-form potentials with their derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Potential {
    /// `sin(πx) sin(πy) sin(πz)`.
    Sine,
    /// `a·x + b`.
    Affine {
        a: Vec3,
        b: f64,
    },
    Zero,
}

impl Potential {
    pub fn value(&self, x: Vec3) -> f64 {
        match *self {
            Potential::Sine => (PI * x.x()).sin() * (PI * x.y()).sin() * (PI * x.z()).sin(),
            Potential::Affine { a, b } => a.dot(x) + b,
            Potential::Zero => 0.0,
        }
    }

    pub fn gradient(&self, x: Vec3) -> Vec3 {
        match *self {
            Potential::Sine => {
                let (s, c) = sin_cos(x);
                Vec3::new(
                    PI * c[0] * s[1] * s[2],
                    PI * s[0] * c[1] * s[2],
                    PI * s[0] * s[1] * c[2],
                )
            }
            Potential::Affine { a, .. } => a,
            Potential::Zero => Vec3::ZERO,
        }
    }

    pub fn hessian(&self, x: Vec3) -> Mat3 {
        match *self {
            Potential::Sine => {
                let (s, c) = sin_cos(x);
                let p2 = PI * PI;
                let mut h = Mat3::ZERO;
                for i in 0..3 {
                    for j in 0..3 {
                        h.0[i][j] = p2
                            * (0..3)
                                .map(|k| match (k == i, k == j) {
                                    (true, true) => -s[k],
                                    (true, false) | (false, true) => c[k],
                                    (false, false) => s[k],
                                })
                                .product::<f64>();
                    }
                }
                h
            }
            Potential::Affine { .. } | Potential::Zero => Mat3::ZERO,
        }
    }

    /// Whether the potential vanishes on the boundary of the unit cube.
    pub fn vanishes_on_unit_cube_boundary(&self) -> bool {
        matches!(self, Potential::Sine | Potential::Zero)
    }
}

fn sin_cos(x: Vec3) -> ([f64; 3], [f64; 3]) {
    let s = [0, 1, 2].map(|i| (PI * x[i]).sin());
    let c = [0, 1, 2].map(|i| (PI * x[i]).cos());
    (s, c)
}

/// An exact solution of `-div(Λ grad p) = s` with constant `Λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ManufacturedCase {
    pub name: String,
    pub potential: Potential,
    pub tensor: Mat3,
}

impl ManufacturedCase {
    pub const BUILTIN: [&'static str; 4] = ["sin-iso", "sin-aniso", "sin-rotated", "zero"];

    pub fn new(name: impl Into<String>, potential: Potential, tensor: Mat3) -> Self {
        Self {
            name: name.into(),
            potential,
            tensor,
        }
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let tensor = match name {
            "sin-iso" | "zero" => Mat3::identity(),
            "sin-aniso" => Mat3::diag(1.0, 1.0, 0.01),
            "sin-rotated" => rotated_tensor(),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown manufactured case '{other}' (known: {})",
                    Self::BUILTIN.join(", ")
                )))
            }
        };
        let potential = if name == "zero" {
            Potential::Zero
        } else {
            Potential::Sine
        };
        Ok(Self::new(name, potential, tensor))
    }

    /// Affine potential with zero source, for patch tests.
    pub fn affine(a: Vec3, b: f64, tensor: Mat3) -> Self {
        Self::new("affine", Potential::Affine { a, b }, tensor)
    }

    pub fn material(&self) -> Material {
        Material::uniform(self.tensor)
    }

    pub fn potential(&self, x: Vec3) -> f64 {
        self.potential.value(x)
    }

    pub fn gradient(&self, x: Vec3) -> Vec3 {
        self.potential.gradient(x)
    }

    /// `φ = -Λ grad p`.
    pub fn flux(&self, x: Vec3) -> Vec3 {
        -self.tensor.mul_vec(self.gradient(x))
    }

    /// `s = div φ = -Σ Λ_ij ∂_i ∂_j p`.
    pub fn source(&self, x: Vec3) -> f64 {
        let h = self.potential.hessian(x);
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s -= self.tensor.0[i][j] * h.0[i][j];
            }
        }
        s
    }

    /// Finite-difference spot check of the closed forms at 10 seeded
    /// points in the unit cube.
    pub fn check_consistency(&self, seed: u64) -> Result<()> {
        const STEP: f64 = 1e-5;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10 {
            let x = Vec3::new(rng.gen(), rng.gen(), rng.gen());
            let g = self.gradient(x);
            let mut div = 0.0;
            for i in 0..3 {
                let e = Vec3::unit(i) * STEP;
                let fd = (self.potential(x + e) - self.potential(x - e)) / (2.0 * STEP);
                if (fd - g[i]).abs() > 1e-6 {
                    return Err(Error::InvalidProblem(format!(
                        "case '{}': gradient component {i} at {x:?} is {} but finite \
                         differences give {fd}",
                        self.name, g[i]
                    )));
                }
                div += (self.flux(x + e)[i] - self.flux(x - e)[i]) / (2.0 * STEP);
            }
            let s = self.source(x);
            if (div - s).abs() > 1e-4 {
                return Err(Error::InvalidProblem(format!(
                    "case '{}': source at {x:?} is {s} but div φ ≈ {div}",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// `Rᵀ diag(1, 1, 0.01) R` for a fixed rotation `R`.
pub fn rotated_tensor() -> Mat3 {
    let r = Mat3::rotation(PI / 6.0, PI / 4.0, PI / 3.0);
    let m = r.transpose().mul_mat(Mat3::diag(1.0, 1.0, 0.01)).mul_mat(r);
    (m + m.transpose()).scaled(0.5)
}
