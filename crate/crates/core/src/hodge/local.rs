use std::fmt;
use std::str::FromStr;

use crate::complex::MeshComplex;
use crate::error::{Error, Result};
use crate::geom::{Mat3, Vec3};
use crate::linalg::{dense_sym_eig, DenseSym};

use super::Material;

const INVERSE_CONDITION_GUARD: f64 = 1e12;
const PARALLEL_TOL: f64 = 1e-10;

/// Which pairing a Hodge operator discretizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HodgeKind {
    /// Edge circulations to dual-face fluxes, weighted by Λ.
    Vertex,
    /// Face fluxes to dual-edge circulations, weighted by Λ⁻¹.
    Cell,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HodgeMethod {
    Reconstruction,
    StabilizedAlgebraic,
    DiagonalOrthogonal,
}

impl HodgeMethod {
    pub fn tag(self) -> &'static str {
        match self {
            HodgeMethod::Reconstruction => "reconstruction",
            HodgeMethod::StabilizedAlgebraic => "algebraic",
            HodgeMethod::DiagonalOrthogonal => "diagonal",
        }
    }
}

impl fmt::Display for HodgeMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for HodgeMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reconstruction" => Ok(HodgeMethod::Reconstruction),
            "algebraic" | "stabilized-algebraic" => Ok(HodgeMethod::StabilizedAlgebraic),
            "diagonal" | "diagonal-orthogonal" => Ok(HodgeMethod::DiagonalOrthogonal),
            other => Err(Error::InvalidArgument(format!(
                "unknown Hodge method '{other}'"
            ))),
        }
    }
}

/// Dense cell-local Hodge matrix. Rows follow the cell's local edge order
/// (vertex kind) or local face order (cell kind); local face DoFs are outward
/// fluxes, so `signs` maps them to the global orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalHodge {
    pub cell: usize,
    pub kind: HodgeKind,
    pub matrix: DenseSym,
    pub dofs: Vec<usize>,
    pub signs: Vec<i8>,
}

/// Per-cell geometric table shared by both kinds: primal vectors (`e` or
/// `f_out`), paired dual vectors (`s̃` or `ẽ`) and subvolumes.
pub(crate) struct LocalFrame {
    pub ids: Vec<usize>,
    pub signs: Vec<i8>,
    pub primal: Vec<Vec3>,
    pub dual: Vec<Vec3>,
    pub subvolumes: Vec<f64>,
    pub volume: f64,
}

impl LocalFrame {
    pub fn new(cx: &MeshComplex, c: usize, kind: HodgeKind) -> Self {
        let cd = cx.dual.cell(c);
        match kind {
            HodgeKind::Vertex => LocalFrame {
                ids: cd.edges.iter().map(|e| e.id).collect(),
                signs: vec![1; cd.edges.len()],
                primal: cd.edges.iter().map(|e| e.vector).collect(),
                dual: cd.edges.iter().map(|e| e.dual_face).collect(),
                subvolumes: cd.edges.iter().map(|e| e.subvolume).collect(),
                volume: cd.volume,
            },
            HodgeKind::Cell => LocalFrame {
                ids: cd.faces.iter().map(|f| f.id).collect(),
                signs: cd.faces.iter().map(|f| f.sign).collect(),
                primal: cd.faces.iter().map(|f| f.outward).collect(),
                dual: cd.faces.iter().map(|f| f.dual_edge).collect(),
                subvolumes: cd.faces.iter().map(|f| f.subvolume).collect(),
                volume: cd.volume,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    /// Piecewise-constant reconstruction of local DoFs `u`, one vector per
    /// subvolume.
    pub fn reconstruct(&self, u: &[f64], beta: f64) -> Vec<Vec3> {
        let g = self
            .dual
            .iter()
            .zip(u)
            .fold(Vec3::ZERO, |acc, (&d, &uk)| acc + d * uk)
            * (1.0 / self.volume);
        (0..self.len())
            .map(|k| {
                let d = self.dual[k];
                let p = self.primal[k];
                g + d * (beta * (u[k] - p.dot(g)) / p.dot(d))
            })
            .collect()
    }
}

/// Λ for the vertex kind, Λ⁻¹ for the cell kind.
pub(crate) fn kind_tensor(kind: HodgeKind, lambda: Mat3) -> Result<Mat3> {
    match kind {
        HodgeKind::Vertex => Ok(lambda),
        HodgeKind::Cell => lambda.inverse_spd(INVERSE_CONDITION_GUARD),
    }
}

fn reconstruction_matrix(frame: &LocalFrame, t: Mat3, beta: f64) -> DenseSym {
    let n = frame.len();
    // basis[k][e]: reconstruction of the k-th unit DoF on subvolume e
    let basis: Vec<Vec<Vec3>> = (0..n)
        .map(|k| {
            let mut u = vec![0.0; n];
            u[k] = 1.0;
            frame.reconstruct(&u, beta)
        })
        .collect();
    let tb: Vec<Vec<Vec3>> = basis
        .iter()
        .map(|b| b.iter().map(|&v| t.mul_vec(v)).collect())
        .collect();
    let mut h = DenseSym::zeros(n);
    for k in 0..n {
        for l in 0..=k {
            let v = (0..n).fold(0.0, |acc, e| {
                acc + frame.subvolumes[e] * basis[k][e].dot(tb[l][e])
            });
            h.set(k, l, v);
        }
    }
    h
}

fn algebraic_matrix(frame: &LocalFrame, t: Mat3) -> Result<DenseSym> {
    let n = frame.len();
    let inv_vol = 1.0 / frame.volume;
    let td: Vec<Vec3> = frame.dual.iter().map(|&d| t.mul_vec(d)).collect();
    let gram = frame
        .primal
        .iter()
        .fold(Mat3::ZERO, |acc, &p| acc + p.outer(p));
    let gram_inv = gram.inverse_spd(1e14).map_err(|_| {
        Error::DegenerateMesh("primal vectors of a cell do not span three dimensions".into())
    })?;
    let consistent = DenseSym::from_fn(n, |k, l| inv_vol * frame.dual[k].dot(td[l]));
    let lambda_c = consistent.trace() / 3.0;
    let mut h = DenseSym::zeros(n);
    for k in 0..n {
        let gk = gram_inv.mul_vec(frame.primal[k]);
        for l in 0..=k {
            let proj = gk.dot(frame.primal[l]);
            let id = if k == l { 1.0 } else { 0.0 };
            h.set(k, l, consistent.get(k, l) + lambda_c * (id - proj));
        }
    }
    Ok(h)
}

fn diagonal_matrix(
    frame: &LocalFrame,
    lambda: Mat3,
    kind: HodgeKind,
    c: usize,
) -> Result<DenseSym> {
    let iso = lambda.0[0][0];
    let isotropic = (0..3).all(|i| {
        (0..3).all(|j| {
            let expect = if i == j { iso } else { 0.0 };
            (lambda.0[i][j] - expect).abs() <= 1e-14 * iso.abs()
        })
    });
    if !isotropic {
        return Err(Error::Precondition(format!(
            "diagonal Hodge needs an isotropic conductivity (cell {c})"
        )));
    }
    let weight = match kind {
        HodgeKind::Vertex => iso,
        HodgeKind::Cell => 1.0 / iso,
    };
    let n = frame.len();
    let mut h = DenseSym::zeros(n);
    for k in 0..n {
        let (p, d) = (frame.primal[k], frame.dual[k]);
        let (pn, dn) = (p.norm(), d.norm());
        if p.cross(d).norm() > PARALLEL_TOL * pn * dn {
            return Err(Error::Precondition(format!(
                "diagonal Hodge needs orthogonal cells: entity {} of cell {c} is not \
                 parallel to its dual",
                frame.ids[k]
            )));
        }
        h.set(k, k, weight * dn / pn);
    }
    Ok(h)
}

/// Builds the local Hodge matrix of cell `c`, with the conductivity sampled
/// at the cell barycenter.
pub fn build_local_hodge(
    cx: &MeshComplex,
    c: usize,
    method: HodgeMethod,
    kind: HodgeKind,
    material: &Material,
    beta: f64,
) -> Result<LocalHodge> {
    let lambda = material.sample(cx.geometry.cell_barycenter(c))?;
    build_with_tensor(cx, c, method, kind, lambda, beta)
}

pub(crate) fn build_with_tensor(
    cx: &MeshComplex,
    c: usize,
    method: HodgeMethod,
    kind: HodgeKind,
    lambda: Mat3,
    beta: f64,
) -> Result<LocalHodge> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "stabilization weight must be positive, got {beta}"
        )));
    }
    let frame = LocalFrame::new(cx, c, kind);
    let matrix = match method {
        HodgeMethod::Reconstruction => {
            reconstruction_matrix(&frame, kind_tensor(kind, lambda)?, beta)
        }
        HodgeMethod::StabilizedAlgebraic => algebraic_matrix(&frame, kind_tensor(kind, lambda)?)?,
        HodgeMethod::DiagonalOrthogonal => diagonal_matrix(&frame, lambda, kind, c)?,
    };
    Ok(LocalHodge {
        cell: c,
        kind,
        matrix,
        dofs: frame.ids,
        signs: frame.signs,
    })
}

/// Diagnostic record of [`check_local_hodge`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HodgeCheck {
    /// max_k |(H·R(G))_k − (TG)·d_k| over unit G, relative to ‖T‖·max_k |d_k|.
    pub p0_residual: f64,
    pub spd: bool,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `λ_min·n/trace` and `λ_max·n/trace`.
    pub stability: [f64; 2],
}

/// P0-consistency residual, spectrum and stability ratios of a local Hodge.
/// Failures of the eigensolver are reported as a non-SPD record.
pub fn check_local_hodge(h: &LocalHodge, cx: &MeshComplex, material: &Material) -> HodgeCheck {
    let frame = LocalFrame::new(cx, h.cell, h.kind);
    let t = material
        .sample(cx.geometry.cell_barycenter(h.cell))
        .and_then(|l| kind_tensor(h.kind, l));
    let dual_max = frame.dual.iter().map(|d| d.norm()).fold(0.0, f64::max);
    let p0_residual = match t {
        Ok(t) => {
            let scale = t
                .sym_eigenvalues()
                .map_or(f64::NAN, |e| e[0].abs().max(e[2].abs()))
                * dual_max;
            (0..3)
                .map(|axis| {
                    let g = Vec3::unit(axis);
                    let u: Vec<f64> = frame.primal.iter().map(|p| p.dot(g)).collect();
                    let hu = h.matrix.mul_vec(&u);
                    let tg = t.mul_vec(g);
                    hu.iter()
                        .zip(&frame.dual)
                        .map(|(a, d)| (a - tg.dot(*d)).abs())
                        .fold(0.0, f64::max)
                        / scale
                })
                .fold(0.0, f64::max)
        }
        Err(_) => f64::NAN,
    };
    let n = h.matrix.dim() as f64;
    let trace = h.matrix.trace();
    match dense_sym_eig(&h.matrix) {
        Ok(eig) => {
            let lo = eig.values[0];
            let hi = *eig.values.last().unwrap_or(&lo);
            HodgeCheck {
                p0_residual,
                spd: lo > 0.0,
                lambda_min: lo,
                lambda_max: hi,
                stability: [lo * n / trace, hi * n / trace],
            }
        }
        Err(_) => HodgeCheck {
            p0_residual,
            spd: false,
            lambda_min: f64::NAN,
            lambda_max: f64::NAN,
            stability: [f64::NAN; 2],
        },
    }
}
