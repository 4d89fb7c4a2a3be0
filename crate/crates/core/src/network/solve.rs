use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::graph::{HalfVertex, WeightedGraph};
use crate::{GreenError, Result};

/// Interior systems up to this size are factorized densely.
pub const DENSE_LIMIT: usize = 3000;

const CG_RTOL: f64 = 1e-12;

/// The killed Laplacian `D - C` on the interior vertices, in CSR form.
#[derive(Clone, Debug)]
struct Laplacian {
    diag: Vec<f64>,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Laplacian {
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut s = self.diag[i] * x[i];
            for k in self.row_start[i]..self.row_start[i + 1] {
                s -= self.vals[k] * x[self.cols[k]];
            }
            *o = s;
        }
    }

    fn dense(&self) -> DMatrix<f64> {
        let n = self.diag.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            for k in self.row_start[i]..self.row_start[i + 1] {
                m[(i, self.cols[k])] -= self.vals[k];
            }
        }
        m
    }
}

#[derive(Clone, Debug)]
enum Factor {
    Dense(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    Iterative,
}

/// Solves `sum_z c(x, z) (G(z, y) - G(x, y)) = -1{x = y}` on the interior
/// with `G = 0` on the boundary, i.e. applies `(D - C)^-1`.
///
/// Small systems are factorized once by Cholesky; larger ones use
/// Jacobi-preconditioned conjugate gradients per column.
#[derive(Clone, Debug)]
pub struct KilledGreenSolver {
    interior: Vec<usize>,
    position: Vec<Option<usize>>,
    vertices: Vec<HalfVertex>,
    lap: Laplacian,
    factor: Factor,
}

/// One column `G(., y)` over the interior vertices.
#[derive(Clone, Debug)]
pub struct GreenColumn {
    pub vertices: Vec<HalfVertex>,
    pub values: Vec<f64>,
    /// `|rhs - (D - C) G| / |rhs|`.
    pub residual: f64,
}

impl GreenColumn {
    pub fn get(&self, v: &HalfVertex) -> Option<f64> {
        self.vertices
            .iter()
            .position(|w| w == v)
            .map(|i| self.values[i])
    }
}

impl KilledGreenSolver {
    pub fn new(graph: &WeightedGraph) -> Result<Self> {
        Self::with_dense_limit(graph, DENSE_LIMIT)
    }

    pub fn with_dense_limit(graph: &WeightedGraph, dense_limit: usize) -> Result<Self> {
        graph.check_killed()?;
        let interior: Vec<usize> = graph.interior().collect();
        if interior.is_empty() {
            return Err(GreenError::domain("graph has no interior vertices"));
        }
        let mut position = vec![None; graph.len()];
        for (k, &i) in interior.iter().enumerate() {
            position[i] = Some(k);
        }
        let mut lap = Laplacian {
            diag: Vec::with_capacity(interior.len()),
            row_start: vec![0],
            cols: Vec::new(),
            vals: Vec::new(),
        };
        for &i in &interior {
            lap.diag.push(graph.pi(i));
            for &(j, c) in graph.neighbors(i) {
                if let Some(col) = position[j] {
                    lap.cols.push(col);
                    lap.vals.push(c);
                }
            }
            lap.row_start.push(lap.cols.len());
        }
        let factor = if interior.len() <= dense_limit {
            let chol = nalgebra::Cholesky::new(lap.dense()).ok_or_else(|| {
                GreenError::Singular("killed Laplacian is not positive definite".into())
            })?;
            Factor::Dense(chol)
        } else {
            Factor::Iterative
        };
        Ok(KilledGreenSolver {
            vertices: interior.iter().map(|&i| graph.vertex(i).clone()).collect(),
            interior,
            position,
            lap,
            factor,
        })
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.factor, Factor::Dense(_))
    }

    pub fn interior_vertices(&self) -> &[HalfVertex] {
        &self.vertices
    }

    /// Position of graph vertex `i` in the interior ordering.
    pub fn position(&self, i: usize) -> Option<usize> {
        self.position.get(i).copied().flatten()
    }

    pub fn solve(&self, graph: &WeightedGraph, y: &HalfVertex) -> Result<GreenColumn> {
        let i = graph
            .index_of(y)
            .ok_or_else(|| GreenError::domain(format!("{y} is not a vertex of the graph")))?;
        let k = self
            .position(i)
            .ok_or_else(|| GreenError::domain(format!("{y} is a boundary vertex")))?;
        self.solve_index(k)
    }

    /// Column for the `k`-th interior vertex.
    pub fn solve_index(&self, k: usize) -> Result<GreenColumn> {
        let n = self.interior.len();
        let mut rhs = vec![0.0; n];
        rhs[k] = 1.0;
        let values = match &self.factor {
            Factor::Dense(chol) => chol.solve(&DVector::from_vec(rhs.clone())).data.into(),
            Factor::Iterative => conjugate_gradient(&self.lap, &rhs)?,
        };
        let mut lg = vec![0.0; n];
        self.lap.apply(&values, &mut lg);
        let residual = rhs
            .iter()
            .zip(&lg)
            .map(|(r, l)| (r - l) * (r - l))
            .sum::<f64>()
            .sqrt();
        Ok(GreenColumn {
            vertices: self.vertices.clone(),
            values,
            residual,
        })
    }

    /// All columns; the `(x, y)` entry is `G(x, y)`.
    pub fn matrix(&self) -> Result<KilledGreenMatrix> {
        let n = self.interior.len();
        let values = match &self.factor {
            Factor::Dense(chol) => chol.inverse(),
            Factor::Iterative => {
                let cols = (0..n)
                    .into_par_iter()
                    .map(|k| self.solve_index(k).map(|c| c.values))
                    .collect::<Result<Vec<_>>>()?;
                DMatrix::from_fn(n, n, |i, j| cols[j][i])
            }
        };
        let residual = (&self.lap.dense() * &values - DMatrix::identity(n, n)).norm();
        Ok(KilledGreenMatrix {
            vertices: self.vertices.clone(),
            values,
            residual,
        })
    }
}

fn conjugate_gradient(lap: &Laplacian, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = rhs.len();
    let norm_b = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&lap.diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];
    for _ in 0..10 * n.max(100) {
        let rnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rnorm <= CG_RTOL * norm_b {
            return Ok(x);
        }
        lap.apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(GreenError::Singular(
                "conjugate gradients met a non-positive curvature".into(),
            ));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            z[i] = r[i] / lap.diag[i];
        }
        let rz_next: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(GreenError::Singular(
        "conjugate gradients did not reach the residual target".into(),
    ))
}

/// `G(x, y)` for all interior `x, y`.
#[derive(Clone, Debug)]
pub struct KilledGreenMatrix {
    pub vertices: Vec<HalfVertex>,
    pub values: DMatrix<f64>,
    /// Frobenius norm of `(D - C) G - I`.
    pub residual: f64,
}

impl KilledGreenMatrix {
    pub fn index_of(&self, v: &HalfVertex) -> Option<usize> {
        self.vertices.iter().position(|w| w == v)
    }

    /// `G(x, y)`; zero if either vertex is not interior.
    pub fn get(&self, x: &HalfVertex, y: &HalfVertex) -> f64 {
        match (self.index_of(x), self.index_of(y)) {
            (Some(i), Some(j)) => self.values[(i, j)],
            _ => 0.0,
        }
    }

    /// Largest `|G(x, y) - G(y, x)|`.
    pub fn asymmetry(&self) -> f64 {
        (&self.values - self.values.transpose()).amax()
    }
}

/// `G(., y)` of the walk killed on the graph's boundary.
pub fn killed_green_solve(graph: &WeightedGraph, y: &HalfVertex) -> Result<GreenColumn> {
    KilledGreenSolver::new(graph)?.solve(graph, y)
}

pub fn killed_green_matrix(graph: &WeightedGraph) -> Result<KilledGreenMatrix> {
    KilledGreenSolver::new(graph)?.matrix()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hv<const N: usize>(c: [i64; N]) -> HalfVertex {
        HalfVertex::from_doubled(c.to_vec())
    }

    #[test]
    fn single_vertex_is_inverse_degree() {
        let mut g = WeightedGraph::new(1);
        g.add_edge(&hv([0]), &hv([2]), 1.5).unwrap();
        g.add_edge(&hv([0]), &hv([-2]), 2.5).unwrap();
        g.set_boundary(&hv([2]), true).unwrap();
        g.set_boundary(&hv([-2]), true).unwrap();
        let col = killed_green_solve(&g, &hv([0])).unwrap();
        assert!((col.values[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn path_of_three() {
        let mut g = WeightedGraph::new(1);
        g.add_edge(&hv([0]), &hv([2]), 1.0).unwrap();
        g.add_edge(&hv([2]), &hv([4]), 1.0).unwrap();
        g.set_boundary(&hv([0]), true).unwrap();
        g.set_boundary(&hv([4]), true).unwrap();
        let col = killed_green_solve(&g, &hv([2])).unwrap();
        assert!((col.get(&hv([2])).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            killed_green_solve(&g, &hv([0])),
            Err(GreenError::Domain(_))
        ));
    }

    #[test]
    fn no_boundary_is_singular() {
        let mut g = WeightedGraph::new(1);
        g.add_edge(&hv([0]), &hv([2]), 1.0).unwrap();
        assert!(matches!(
            killed_green_solve(&g, &hv([0])),
            Err(GreenError::Singular(_))
        ));
    }

    #[test]
    fn iterative_matches_dense() {
        let mut g = WeightedGraph::new(2);
        for a in -3..=3i64 {
            for b in -3..=3i64 {
                let v = hv([2 * a, 2 * b]);
                if a.abs() == 3 || b.abs() == 3 {
                    g.set_boundary(&v, true).unwrap();
                }
                for w in [hv([2 * a + 2, 2 * b]), hv([2 * a, 2 * b + 2])] {
                    if w.doubled().iter().all(|c| c.abs() <= 6) {
                        g.add_edge(&v, &w, 1.0 + (a * a + b) as f64 * 0.01 + 0.5)
                            .unwrap();
                    }
                }
            }
        }
        let dense = KilledGreenSolver::new(&g).unwrap();
        let cg = KilledGreenSolver::with_dense_limit(&g, 0).unwrap();
        assert!(dense.is_dense() && !cg.is_dense());
        let y = hv([2, -2]);
        let a = dense.solve(&g, &y).unwrap();
        let b = cg.solve(&g, &y).unwrap();
        assert!(b.residual < 1e-11);
        for (u, v) in a.values.iter().zip(&b.values) {
            assert!((u - v).abs() < 1e-12);
        }
    }
}
