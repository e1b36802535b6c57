use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::MeshComplex;
use crate::error::{Error, Result};
use crate::hodge::HodgeMethod;
use crate::linalg::{cg_solve, dot, CsrMatrix, Preconditioner};
use crate::schemes::{assemble_vertex_scheme, Blocks, ManufacturedCase};

const EIGEN_TOL: f64 = 1e-8;
const MAX_POWER_STEPS: usize = 500;

/// Interior stiffness (Λ = Id) and dual-volume mass of the vertex scheme.
struct VertexPencil {
    a: CsrMatrix,
    mass: Vec<f64>,
    interior: Vec<usize>,
}

fn pencil(cx: &MeshComplex, method: HodgeMethod, beta: f64) -> Result<VertexPencil> {
    let case = ManufacturedCase::builtin("zero")?;
    let sys = assemble_vertex_scheme(cx, &case, method, beta)?;
    let Blocks::Spd {
        matrix, interior, ..
    } = sys.blocks
    else {
        unreachable!("vertex scheme is SPD")
    };
    let vols = cx.dual.dual_cell_volumes();
    Ok(VertexPencil {
        a: matrix,
        mass: interior.iter().map(|&v| vols[v]).collect(),
        interior,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoincareEstimate {
    /// `1 / sqrt(λ_min)`.
    pub constant: f64,
    pub lambda_min: f64,
    pub iterations: usize,
}

/// Smallest eigenvalue of `A p = λ M p` by unshifted inverse iteration with
/// inner CG; returns the discrete Poincaré constant.
pub fn poincare_constant(
    cx: &MeshComplex,
    method: HodgeMethod,
    beta: f64,
) -> Result<PoincareEstimate> {
    let VertexPencil { a, mass, .. } = pencil(cx, method, beta)?;
    let m_norm = |x: &[f64]| {
        x.iter()
            .zip(&mass)
            .map(|(v, m)| m * v * v)
            .sum::<f64>()
            .sqrt()
    };
    let mut x = vec![1.0; mass.len()];
    let s = m_norm(&x);
    x.iter_mut().for_each(|v| *v /= s);
    let mut lambda = f64::INFINITY;
    for step in 1..=MAX_POWER_STEPS {
        let mx: Vec<f64> = x.iter().zip(&mass).map(|(v, m)| v * m).collect();
        let (y, _) = cg_solve(&a, &mx, 1e-12, 50_000, Preconditioner::Jacobi)?;
        let ny = m_norm(&y);
        // Rayleigh quotient yᵀAy / yᵀMy with Ay = Mx
        let next = dot(&y, &mx) / (ny * ny);
        x = y.iter().map(|v| v / ny).collect();
        if (next - lambda).abs() <= EIGEN_TOL * next {
            return Ok(PoincareEstimate {
                constant: 1.0 / next.sqrt(),
                lambda_min: next,
                iterations: step,
            });
        }
        lambda = next;
    }
    Err(Error::NumericalFailure(format!(
        "inverse iteration did not settle within {MAX_POWER_STEPS} steps (λ ≈ {lambda:e})"
    )))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SobolevEntry {
    pub q: u32,
    /// Largest `‖p‖_{q,dual} / |p|_A` over the draws.
    pub ratio: f64,
}

pub const SOBOLEV_DRAWS: usize = 10;

/// `(Σ_v |c̃_v| |p_v|^q)^{1/q} / sqrt(pᵀAp)`, defined as 0 for `p = 0`.
fn ratio(p: &[f64], mass: &[f64], a: &CsrMatrix, q: u32) -> f64 {
    let energy = dot(p, &a.mul_vec(p)).max(0.0).sqrt();
    if energy == 0.0 {
        return 0.0;
    }
    let lq = p
        .iter()
        .zip(mass)
        .map(|(v, m)| m * v.abs().powi(q as i32))
        .sum::<f64>()
        .powf(1.0 / f64::from(q));
    lq / energy
}

/// Worst ratio over [`SOBOLEV_DRAWS`] seeded draws for each `q`. Each draw
/// samples `Σ a_klm sin(kπx) sin(lπy) sin(mπz)`, `k, l, m ∈ {1, 2, 3}`,
/// `a_klm` uniform in `[-1, 1]`, at the interior vertices: mesh-independent
/// smooth functions, so the ratios track the embedding constant rather than
/// the mesh resolution.
pub fn sobolev_ratio_diagnostic(
    cx: &MeshComplex,
    method: HodgeMethod,
    beta: f64,
    qs: &[u32],
    seed: u64,
) -> Result<Vec<SobolevEntry>> {
    if let Some(q) = qs.iter().find(|q| ![2, 4, 6].contains(*q)) {
        return Err(Error::InvalidArgument(format!(
            "q must be 2, 4 or 6, got {q}"
        )));
    }
    let VertexPencil { a, mass, interior } = pencil(cx, method, beta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<Vec<f64>> = (0..SOBOLEV_DRAWS)
        .map(|_| {
            let coef: Vec<f64> = (0..27).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            interior
                .iter()
                .map(|&v| {
                    let x = cx.mesh.vertex(v);
                    let s = |k: usize, t: f64| (k as f64 * PI * t).sin();
                    (0..27)
                        .map(|i| {
                            coef[i]
                                * s(i / 9 + 1, x.x())
                                * s(i / 3 % 3 + 1, x.y())
                                * s(i % 3 + 1, x.z())
                        })
                        .sum()
                })
                .collect()
        })
        .collect();
    Ok(qs
        .iter()
        .map(|&q| SobolevEntry {
            q,
            ratio: draws
                .iter()
                .map(|p| ratio(p, &mass, &a, q))
                .fold(0.0, f64::max),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_vector_ratio_is_zero() {
        let a = CsrMatrix::identity(3);
        assert_eq!(ratio(&[0.0; 3], &[1.0; 3], &a, 4), 0.0);
        // l2 / energy with identity stiffness and unit mass
        assert!((ratio(&[3.0, 4.0, 0.0], &[1.0; 3], &a, 2) - 1.0).abs() < 1e-15);
    }
}
