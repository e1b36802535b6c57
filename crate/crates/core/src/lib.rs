//! Compatible discrete operator schemes for anisotropic diffusion on
//! polyhedral meshes.
//!
//! The crate is organised bottom-up: [`mesh`] holds the primal complex and
//! its geometry, [`dual`] the barycentric dual, [`hodge`] the discrete Hodge
//! operators, [`schemes`] the vertex- and cell-based discretisations and
//! [`study`] the convergence and diagnostic drivers.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod complex;
pub mod dual;
pub mod error;
pub mod geom;
pub mod hodge;
pub mod linalg;
pub mod mesh;
pub mod schemes;
pub mod study;

pub use complex::MeshComplex;
pub use error::{Error, Result};
pub use geom::{Mat3, Vec3};
pub use mesh::{DofArray, DofKind, PrimalMesh};
