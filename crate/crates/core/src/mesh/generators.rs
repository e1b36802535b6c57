use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::geometry::cell_volume_with;
use super::PrimalMesh;
use crate::dual::build_cell;
use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Self { min, max }
    }

    pub fn unit() -> Self {
        Self::new(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0))
    }
}

/// Planar polygonal tessellation, polygons listed counterclockwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Footprint {
    pub vertices: Vec<[f64; 2]>,
    pub polygons: Vec<Vec<usize>>,
}

impl Footprint {
    /// Signed shoelace area of polygon `p`.
    pub fn polygon_area(&self, p: usize) -> f64 {
        let lp = &self.polygons[p];
        let mut twice = 0.0;
        for i in 0..lp.len() {
            let [x0, y0] = self.vertices[lp[i]];
            let [x1, y1] = self.vertices[lp[(i + 1) % lp.len()]];
            twice += x0 * y1 - x1 * y0;
        }
        0.5 * twice
    }
}

/// Extrudes a footprint along z through the given increasing levels.
///
/// Face order: horizontal polygons level by level, then one vertical quad
/// per footprint edge and layer. Horizontal faces point in +z; a vertical
/// face over footprint edge `a -> b` (with `a < b`) points to the right of
/// that edge.
pub fn extrude(footprint: &Footprint, z_levels: &[f64]) -> Result<PrimalMesh> {
    let n2 = footprint.vertices.len();
    let layers = z_levels.len().saturating_sub(1);
    if layers == 0 || z_levels.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(
            "extrusion needs at least two strictly increasing levels".into(),
        ));
    }
    let np = footprint.polygons.len();

    let vertices: Vec<Vec3> = z_levels
        .iter()
        .flat_map(|&z| {
            footprint
                .vertices
                .iter()
                .map(move |&[x, y]| Vec3::new(x, y, z))
        })
        .collect();
    let vid = |level: usize, v: usize| level * n2 + v;

    let mut edges2: Vec<[usize; 2]> = footprint
        .polygons
        .iter()
        .flat_map(|lp| {
            (0..lp.len()).map(move |i| {
                let (a, b) = (lp[i], lp[(i + 1) % lp.len()]);
                [a.min(b), a.max(b)]
            })
        })
        .collect();
    edges2.sort_unstable();
    edges2.dedup();
    let edge2_index: HashMap<[usize; 2], usize> =
        edges2.iter().enumerate().map(|(i, e)| (*e, i)).collect();

    let mut faces = Vec::with_capacity(np * (layers + 1) + edges2.len() * layers);
    for level in 0..=layers {
        for lp in &footprint.polygons {
            faces.push(lp.iter().map(|&v| vid(level, v)).collect::<Vec<_>>());
        }
    }
    let vertical_base = faces.len();
    for layer in 0..layers {
        for &[a, b] in &edges2 {
            faces.push(vec![
                vid(layer, a),
                vid(layer, b),
                vid(layer + 1, b),
                vid(layer + 1, a),
            ]);
        }
    }

    let mut cells = Vec::with_capacity(np * layers);
    for layer in 0..layers {
        for (p, lp) in footprint.polygons.iter().enumerate() {
            let mut cf: Vec<(usize, i8)> = vec![(layer * np + p, -1), ((layer + 1) * np + p, 1)];
            for i in 0..lp.len() {
                let (a, b) = (lp[i], lp[(i + 1) % lp.len()]);
                let e = edge2_index[&[a.min(b), a.max(b)]];
                // CCW traversal: outward normal lies to the right of a -> b
                cf.push((
                    vertical_base + layer * edges2.len() + e,
                    if a < b { 1 } else { -1 },
                ));
            }
            cells.push(cf);
        }
    }
    PrimalMesh::new(vertices, faces, cells)
}

fn cartesian_footprint(nx: usize, ny: usize, b: &Aabb) -> Footprint {
    let (dx, dy) = (
        (b.max.x() - b.min.x()) / nx as f64,
        (b.max.y() - b.min.y()) / ny as f64,
    );
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            // pin the far faces exactly on the box
            let x = if i == nx {
                b.max.x()
            } else {
                b.min.x() + i as f64 * dx
            };
            let y = if j == ny {
                b.max.y()
            } else {
                b.min.y() + j as f64 * dy
            };
            vertices.push([x, y]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let polygons = (0..ny)
        .flat_map(|j| {
            (0..nx).map(move |i| vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)])
        })
        .collect();
    Footprint { vertices, polygons }
}

fn levels(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let d = (hi - lo) / n as f64;
    (0..=n)
        .map(|k| if k == n { hi } else { lo + k as f64 * d })
        .collect()
}

/// Structured hexahedral mesh of an axis-aligned box with `n[axis]`
/// subdivisions per axis.
pub fn build_cartesian_hex(n: [usize; 3], domain: Aabb) -> Result<PrimalMesh> {
    if n.contains(&0) {
        return Err(Error::InvalidArgument(format!(
            "subdivisions must be at least 1 per axis, got {n:?}"
        )));
    }
    if (0..3).any(|a| !(domain.max[a] > domain.min[a])) {
        return Err(Error::InvalidArgument(format!("degenerate box {domain:?}")));
    }
    let footprint = cartesian_footprint(n[0], n[1], &domain);
    extrude(&footprint, &levels(domain.min.z(), domain.max.z(), n[2]))
}

const PERTURB_RETRIES: usize = 32;

/// Faces whose loops leave their plane by more than this fraction of their
/// diameter are split into triangles after perturbation.
const WARP_TOLERANCE: f64 = 1e-13;

/// Randomly displaces the interior vertices of a hexahedral mesh.
///
/// Each interior vertex moves by an offset drawn uniformly from the cube of
/// half-width `amplitude × spacing`, where spacing is the length of its
/// shortest incident edge. A draw that would make an adjacent cell
/// volume nonpositive is rejected and redrawn. Quadrilaterals that end up
/// non-planar are split into triangle pairs so that every committed face is
/// planar, which the barycentric dual identities require. If a cell of the
/// result has a nonpositive barycentric subsimplex, its interior vertices are
/// drawn again.
pub fn perturb_hex(mesh: &PrimalMesh, amplitude: f64, seed: u64) -> Result<PrimalMesh> {
    if !(0.0..0.5).contains(&amplitude) {
        return Err(Error::InvalidArgument(format!(
            "perturbation amplitude must lie in [0, 0.5), got {amplitude}"
        )));
    }
    if amplitude == 0.0 {
        return Ok(mesh.clone());
    }
    let mut spacing = vec![f64::INFINITY; mesh.n_vertices()];
    for &[a, b] in mesh.edges() {
        let len = (mesh.vertex(b) - mesh.vertex(a)).norm();
        spacing[a] = spacing[a].min(len);
        spacing[b] = spacing[b].min(len);
    }
    let vertex_cells = mesh.vertex_cells();
    let mut pos = mesh.vertices().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut draw = |v: usize, pos: &mut Vec<Vec3>| -> Result<()> {
        let original = mesh.vertex(v);
        let radius = amplitude * spacing[v];
        for _ in 0..PERTURB_RETRIES {
            let offset = Vec3::new(
                rng.gen_range(-1.0..=1.0),
                rng.gen_range(-1.0..=1.0),
                rng.gen_range(-1.0..=1.0),
            ) * radius;
            pos[v] = original + offset;
            if vertex_cells[v]
                .iter()
                .all(|&c| cell_volume_with(mesh, pos, c) > 0.0)
            {
                return Ok(());
            }
        }
        Err(Error::DegenerateMesh(format!(
            "could not displace vertex {v} without inverting a cell after \
             {PERTURB_RETRIES} attempts"
        )))
    };

    for v in 0..mesh.n_vertices() {
        if !mesh.is_boundary_vertex(v) {
            draw(v, &mut pos)?;
        }
    }
    for _ in 0..PERTURB_RETRIES {
        let split = mesh
            .with_vertices(pos.clone())
            .triangulate_warped_faces(WARP_TOLERANCE)?;
        let geo = split.validate()?;
        let bad: Vec<usize> = (0..split.n_cells())
            .filter(|&c| build_cell(&split, &geo, c).is_err())
            .collect();
        if bad.is_empty() {
            return Ok(split);
        }
        let mut redo: Vec<usize> = bad
            .iter()
            .flat_map(|&c| mesh.cell_vertices(c).iter().copied())
            .filter(|&v| !mesh.is_boundary_vertex(v))
            .collect();
        redo.sort_unstable();
        redo.dedup();
        for v in redo {
            draw(v, &mut pos)?;
        }
    }
    Err(Error::DegenerateMesh(format!(
        "barycentric subsimplices stay degenerate after {PERTURB_RETRIES} redraws"
    )))
}

/// Brick-wall tessellation of the unit square bent into a honeycomb.
///
/// `2 n_rings` rows of bricks with alternate rows offset by half a brick;
/// junctions on interior row lines are lifted or lowered by a fifth of the
/// row height, turning interior bricks into convex hexagons while the rim
/// keeps quadrilaterals (half bricks) and pentagons (top and bottom rows).
pub fn brick_honeycomb_footprint(n_rings: usize) -> Result<Footprint> {
    if n_rings == 0 {
        return Err(Error::InvalidArgument("n_rings must be at least 1".into()));
    }
    let rows = 2 * n_rings;
    let nx = 2 * n_rings;
    let dy = 1.0 / rows as f64;
    let lift = 0.2 * dy;
    // x positions are multiples of half a brick: k / (2 nx), k = 0..=2 nx
    let half = 2 * nx;
    let x_of = |k: usize| {
        if k == half {
            1.0
        } else {
            k as f64 / half as f64
        }
    };
    // a row's walls: even rows at even k, odd rows at odd k, plus both ends
    let is_wall = |row: usize, k: usize| k == 0 || k == half || k % 2 == row % 2;

    let mut vertices = Vec::new();
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    for line in 0..=rows {
        let y = if line == rows { 1.0 } else { line as f64 * dy };
        for k in 0..=half {
            let below = line > 0 && is_wall(line - 1, k);
            let above = line < rows && is_wall(line, k);
            if !(below || above) {
                continue;
            }
            let shift = if line == 0 || line == rows || k == 0 || k == half {
                0.0
            } else if above {
                lift
            } else {
                -lift
            };
            index.insert((line, k), vertices.len());
            vertices.push([x_of(k), y + shift]);
        }
    }

    let mut polygons = Vec::new();
    for row in 0..rows {
        let walls: Vec<usize> = (0..=half).filter(|&k| is_wall(row, k)).collect();
        for w in walls.windows(2) {
            let (k0, k1) = (w[0], w[1]);
            let mut lp: Vec<usize> = (k0..=k1)
                .filter_map(|k| index.get(&(row, k)).copied())
                .collect();
            lp.extend(
                (k0..=k1)
                    .rev()
                    .filter_map(|k| index.get(&(row + 1, k)).copied()),
            );
            polygons.push(lp);
        }
    }
    Ok(Footprint { vertices, polygons })
}

/// Prisms over the honeycomb footprint of the unit square, extruded through
/// `n_layers` equal layers of `[0, 1]`.
pub fn build_prismatic_polygonal(n_layers: usize, n_rings: usize) -> Result<PrimalMesh> {
    if n_layers == 0 {
        return Err(Error::InvalidArgument("n_layers must be at least 1".into()));
    }
    let footprint = brick_honeycomb_footprint(n_rings)?;
    extrude(&footprint, &levels(0.0, 1.0, n_layers))
}
