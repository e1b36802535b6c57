use super::PrimalMesh;

/// Integer sparse matrix in compressed-row layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntSparse {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<i64>,
}

impl IntSparse {
    fn from_rows(ncols: usize, rows: Vec<Vec<(usize, i64)>>) -> Self {
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for mut row in rows.into_iter() {
            row.sort_by_key(|&(c, _)| c);
            let start = col_idx.len();
            for (c, v) in row {
                if col_idx.len() > start && *col_idx.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            nrows: row_ptr.len() - 1,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, r: usize) -> (&[usize], &[i64]) {
        let s = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[s.clone()], &self.values[s])
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).map(|k| vals[k]).unwrap_or(0)
    }

    /// Exact integer product `self · other`.
    pub fn mul(&self, other: &IntSparse) -> IntSparse {
        assert_eq!(self.ncols, other.nrows);
        let rows = (0..self.nrows)
            .map(|r| {
                let (cols, vals) = self.row(r);
                let mut acc = Vec::new();
                for (&k, &a) in cols.iter().zip(vals) {
                    let (oc, ov) = other.row(k);
                    acc.extend(oc.iter().zip(ov).map(|(&c, &b)| (c, a * b)));
                }
                acc
            })
            .collect();
        IntSparse::from_rows(other.ncols, rows)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn row_sums(&self) -> Vec<i64> {
        (0..self.nrows)
            .map(|r| self.row(r).1.iter().sum())
            .collect()
    }

    /// `y = A x` in floating point.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter()
                    .zip(vals)
                    .fold(0.0, |acc, (&c, &v)| acc + v as f64 * x[c])
            })
            .collect()
    }

    /// `y = Aᵀ x` in floating point, accumulated row by row.
    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![0.0; self.ncols];
        for (r, &xr) in x.iter().enumerate() {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                y[c] += v as f64 * xr;
            }
        }
        y
    }
}

/// Signed incidence matrices: the discrete gradient, curl and divergence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceMatrices {
    /// Edges × vertices: `-1` at the tail, `+1` at the head.
    pub grad: IntSparse,
    /// Faces × edges: traversal sign of the edge in the face loop.
    pub curl: IntSparse,
    /// Cells × faces: the cell's orientation sign for each face.
    pub div: IntSparse,
}

impl IncidenceMatrices {
    pub fn curl_grad(&self) -> IntSparse {
        self.curl.mul(&self.grad)
    }

    pub fn div_curl(&self) -> IntSparse {
        self.div.mul(&self.curl)
    }

    /// Both structural identities and zero gradient row sums.
    pub fn is_exact(&self) -> bool {
        self.curl_grad().is_zero()
            && self.div_curl().is_zero()
            && self.grad.row_sums().iter().all(|&s| s == 0)
    }
}

pub fn build_incidence(mesh: &PrimalMesh) -> IncidenceMatrices {
    let grad = IntSparse::from_rows(
        mesh.n_vertices(),
        mesh.edges()
            .iter()
            .map(|&[a, b]| vec![(a, -1), (b, 1)])
            .collect(),
    );
    let curl = IntSparse::from_rows(
        mesh.n_edges(),
        (0..mesh.n_faces())
            .map(|f| {
                mesh.face_edges(f)
                    .iter()
                    .map(|&(e, s)| (e, i64::from(s)))
                    .collect()
            })
            .collect(),
    );
    let div = IntSparse::from_rows(
        mesh.n_faces(),
        mesh.cells()
            .iter()
            .map(|cf| cf.iter().map(|&(f, s)| (f, i64::from(s))).collect())
            .collect(),
    );
    IncidenceMatrices { grad, curl, div }
}
