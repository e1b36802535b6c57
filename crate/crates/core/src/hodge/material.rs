use std::fmt;
use std::sync::Arc;

use crate::complex::MeshComplex;
use crate::error::{Error, Result};
use crate::geom::{Mat3, Vec3};

type TensorFn = dyn Fn(Vec3) -> Mat3 + Send + Sync;

/// Conductivity tensor field, sampled at cell barycenters.
#[derive(Clone)]
pub struct Material {
    tensor: Arc<TensorFn>,
    bounds: (f64, f64),
}

impl fmt::Debug for Material {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Material")
            .field("bounds", &self.bounds)
            .finish_non_exhaustive()
    }
}

impl Material {
    pub const DEFAULT_BOUNDS: (f64, f64) = (1e-12, 1e12);

    pub fn uniform(tensor: Mat3) -> Self {
        Self::from_fn(move |_| tensor)
    }

    pub fn isotropic(lambda: f64) -> Self {
        Self::uniform(Mat3::identity().scaled(lambda))
    }

    pub fn from_fn(f: impl Fn(Vec3) -> Mat3 + Send + Sync + 'static) -> Self {
        Self {
            tensor: Arc::new(f),
            bounds: Self::DEFAULT_BOUNDS,
        }
    }

    /// Eigenvalue bounds enforced when sampling.
    pub fn with_bounds(mut self, lo: f64, hi: f64) -> Self {
        self.bounds = (lo, hi);
        self
    }

    pub fn bounds(&self) -> (f64, f64) {
        self.bounds
    }

    /// Multiplies the tensor by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Self {
        let inner = Arc::clone(&self.tensor);
        Self {
            tensor: Arc::new(move |x| inner(x).scaled(alpha)),
            bounds: self.bounds,
        }
    }

    pub fn eval(&self, x: Vec3) -> Mat3 {
        (self.tensor)(x)
    }

    /// Evaluates and checks the tensor at `x`.
    pub fn sample(&self, x: Vec3) -> Result<Mat3> {
        let m = self.eval(x);
        if !m.0.iter().flatten().all(|v| v.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "non-finite conductivity at {x:?}"
            )));
        }
        if !m.is_symmetric(1e-14) {
            return Err(Error::InvalidProblem(format!(
                "conductivity at {x:?} is not symmetric"
            )));
        }
        let [lo, _, hi] = m.sym_eigenvalues()?;
        let (blo, bhi) = self.bounds;
        if !(lo >= blo && hi <= bhi) {
            return Err(Error::InvalidProblem(format!(
                "conductivity eigenvalues [{lo:e}, {hi:e}] at {x:?} outside [{blo:e}, {bhi:e}]"
            )));
        }
        Ok(m)
    }

    /// One tensor per cell, sampled at the barycenter.
    pub fn sample_cells(&self, cx: &MeshComplex) -> Result<Vec<Mat3>> {
        (0..cx.mesh.n_cells())
            .map(|c| {
                self.sample(cx.geometry.cell_barycenter(c))
                    .map_err(|e| match e {
                        Error::InvalidProblem(m) => Error::InvalidProblem(format!("cell {c}: {m}")),
                        other => other,
                    })
            })
            .collect()
    }
}
