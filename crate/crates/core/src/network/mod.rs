//! Finite weighted graphs and the killed Green's functions on them.
//!
//! Vertices carry doubled coordinates ([`HalfVertex`]) so the half-integer
//! points created by splitting a bond are represented exactly. Boundary
//! vertices absorb the walk; every Green's function here is
//! `(D - C)^-1` on the interior, `D = diag(pi)`.

mod build;
mod graph;
mod io;
mod solve;

use std::collections::HashMap;

pub use build::{build_truncated, build_unfolded, lattice_box, reflect_fold, Construction};
pub use graph::{HalfVertex, WeightedGraph};
pub use io::{dump_graph, parse_graph, read_graph, write_graph};
pub use solve::{
    killed_green_matrix, killed_green_solve, GreenColumn, KilledGreenMatrix, KilledGreenSolver,
    DENSE_LIMIT,
};

use crate::reflection::{reflect_first, DomainSpec};
use crate::{GreenError, LatticePoint, Result};

/// [`WeightedGraph::series_reduce`].
pub fn series_reduce(graph: &WeightedGraph, keep: &[HalfVertex]) -> WeightedGraph {
    graph.series_reduce(keep)
}

/// Both sides of the image identity on the box `C_N = [0, N] x [-N, N]^(d-1)`:
/// the half-lattice walk killed on leaving `C_N`, and
/// `g_K(x, y) + g_K(x, ybar - e_1)` with `g_K` the walk on `Z^d` killed on
/// leaving `K_N = [-N-1, N] x [-N, N]^(d-1)`.
#[derive(Clone, Debug)]
pub struct FiniteBox {
    d: usize,
    n: usize,
    full: KilledGreenMatrix,
    half: KilledGreenMatrix,
}

impl FiniteBox {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        let full = build_truncated(&DomainSpec::full(d)?, n, Construction::Plain)?;
        let half = build_truncated(&DomainSpec::half_space(d)?, n, Construction::Plain)?;
        Ok(FiniteBox {
            d,
            n,
            full: killed_green_matrix(&full)?,
            half: killed_green_matrix(&half)?,
        })
    }

    /// The points of `C_N`.
    pub fn points(&self) -> Vec<LatticePoint> {
        self.half
            .vertices
            .iter()
            .filter_map(HalfVertex::to_lattice)
            .collect()
    }

    fn check(&self, p: &LatticePoint) -> Result<()> {
        let n = self.n as i64;
        let c = p.coords();
        if p.dim() != self.d || !(0..=n).contains(&c[0]) || c[1..].iter().any(|v| v.abs() > n) {
            return Err(GreenError::domain(format!("{p} is outside C_{}", self.n)));
        }
        Ok(())
    }

    /// `g_K(x, y) + g_K(x, ybar - e_1)`.
    pub fn image_sum(&self, x: &LatticePoint, y: &LatticePoint) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        let mut image = reflect_first(y);
        image.coords_mut()[0] -= 1;
        let hx = HalfVertex::from_lattice(x);
        Ok(self.full.get(&hx, &HalfVertex::from_lattice(y))
            + self.full.get(&hx, &HalfVertex::from_lattice(&image)))
    }

    /// The half-lattice Green's function killed outside `C_N`.
    pub fn direct(&self, x: &LatticePoint, y: &LatticePoint) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self
            .half
            .get(&HalfVertex::from_lattice(x), &HalfVertex::from_lattice(y)))
    }

    /// Largest `|image_sum - direct|` over all pairs in `C_N`.
    pub fn max_discrepancy(&self) -> Result<f64> {
        let pts = self.points();
        let mut worst: f64 = 0.0;
        for x in &pts {
            for y in &pts {
                worst = worst.max((self.image_sum(x, y)? - self.direct(x, y)?).abs());
            }
        }
        Ok(worst)
    }
}

/// `g_K(x, y) + g_K(x, ybar - e_1)` on the box `K_N`; see [`FiniteBox`].
pub fn finite_box_half_green(
    d: usize,
    n: usize,
    x: &LatticePoint,
    y: &LatticePoint,
) -> Result<f64> {
    let dom = DomainSpec::half_space(d)?;
    let nn = n as i64;
    for p in [x, y] {
        dom.check_point(p)?;
        if p.coords()[0] > nn || p.coords()[1..].iter().any(|c| c.abs() > nn) {
            return Err(GreenError::domain(format!("{p} is outside C_{n}")));
        }
    }
    let graph = build_truncated(&DomainSpec::full(d)?, n, Construction::Plain)?;
    let solver = KilledGreenSolver::new(&graph)?;
    // G(x, y) = G(y, x), so the column of x holds both terms
    let col = solver.solve(&graph, &HalfVertex::from_lattice(x))?;
    let mut image = reflect_first(y);
    image.coords_mut()[0] -= 1;
    let at = |p: &LatticePoint| col.get(&HalfVertex::from_lattice(p)).unwrap_or(0.0);
    Ok(at(y) + at(&image))
}

/// Killed Green's function of the folded walk: the `Q` walk's visits to the
/// fold preimages of `y`, divided by `pi_{H'}(y)`.
///
/// For every `x, y` in the `H'` truncation this equals `G_{H'}(x, y)`
/// exactly, since folding the `Q` walk yields the `H'` walk.
#[derive(Clone, Debug)]
pub struct FoldComparison {
    pub h_prime: KilledGreenMatrix,
    pub pushforward: KilledGreenMatrix,
}

impl FoldComparison {
    pub fn new(domain: &DomainSpec, n: usize) -> Result<Self> {
        let hp = build_truncated(domain, n, Construction::HPrime)?;
        let q = build_truncated(domain, n, Construction::Q)?;
        let h_prime = killed_green_matrix(&hp)?;
        let gq = killed_green_matrix(&q)?;

        let target: HashMap<&HalfVertex, usize> = h_prime
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();
        let k = h_prime.vertices.len();
        let mut values = nalgebra::DMatrix::zeros(k, k);
        let mut preimages: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k];
        for (j, z) in gq.vertices.iter().enumerate() {
            if let Some(&t) = target.get(&reflect_fold(z, domain)) {
                let pi_z = q.pi(q.index_of(z).expect("interior vertex of Q"));
                preimages[t].push((j, pi_z));
            }
        }
        for (xi, x) in h_prime.vertices.iter().enumerate() {
            let xq = gq
                .index_of(x)
                .ok_or_else(|| GreenError::Consistency(format!("{x} is missing from Q")))?;
            for (yi, y) in h_prime.vertices.iter().enumerate() {
                let pi_y = hp.pi_of(y).expect("vertex of H'");
                let mass: f64 = preimages[yi]
                    .iter()
                    .map(|&(j, pi_z)| gq.values[(xq, j)] * pi_z)
                    .sum();
                values[(xi, yi)] = mass / pi_y;
            }
        }
        let pushforward = KilledGreenMatrix {
            vertices: h_prime.vertices.clone(),
            values,
            residual: gq.residual,
        };
        Ok(FoldComparison {
            h_prime,
            pushforward,
        })
    }

    pub fn max_discrepancy(&self) -> f64 {
        (&self.h_prime.values - &self.pushforward.values).amax()
    }
}

/// Compares `Q` with the unsplit lattice it subdivides: the graph left by
/// series reduction, and the killed Green's functions on shared vertices.
#[derive(Clone, Debug)]
pub struct SplitComparison {
    /// Series-reduced `Q` has the same vertices, boundary and edges as the
    /// unsplit lattice (conductances to `1e-12`).
    pub reduces_to_lattice: bool,
    /// Largest `|G_Q - G_lattice|` over pairs of lattice vertices.
    pub max_discrepancy: f64,
    /// Same, after series reduction of `Q`.
    pub max_discrepancy_reduced: f64,
}

impl SplitComparison {
    pub fn new(domain: &DomainSpec, n: usize) -> Result<Self> {
        let q = build_truncated(domain, n, Construction::Q)?;
        let lattice = build_unfolded(domain, n)?;
        let reduced = series_reduce(&q, &[]);
        let gl = killed_green_matrix(&lattice)?;
        let gq = killed_green_matrix(&q)?;
        let gr = killed_green_matrix(&reduced)?;
        let diff = |other: &KilledGreenMatrix| {
            let idx: Vec<usize> = gl
                .vertices
                .iter()
                .map(|v| other.index_of(v).expect("lattice vertex survives"))
                .collect();
            let mut worst: f64 = 0.0;
            for (i, &a) in idx.iter().enumerate() {
                for (j, &b) in idx.iter().enumerate() {
                    worst = worst.max((gl.values[(i, j)] - other.values[(a, b)]).abs());
                }
            }
            worst
        };
        Ok(SplitComparison {
            reduces_to_lattice: reduced.same_as(&lattice, 1e-12),
            max_discrepancy: diff(&gq),
            max_discrepancy_reduced: diff(&gr),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_box_identity_small() {
        let fb = FiniteBox::new(3, 1).unwrap();
        assert!(fb.max_discrepancy().unwrap() < 1e-12);
        let o = LatticePoint::origin(3);
        let direct = fb.direct(&o, &o).unwrap();
        let single = finite_box_half_green(3, 1, &o, &o).unwrap();
        assert!((direct - single).abs() < 1e-12);
        assert!(fb.direct(&LatticePoint::from([2, 0, 0]), &o).is_err());
        assert!(finite_box_half_green(3, 1, &LatticePoint::from([-1, 0, 0]), &o).is_err());
    }

    #[test]
    fn fold_and_split_small() {
        let h = DomainSpec::half_space(3).unwrap();
        assert!(FoldComparison::new(&h, 1).unwrap().max_discrepancy() < 1e-12);
        let s = SplitComparison::new(&h, 1).unwrap();
        assert!(s.reduces_to_lattice);
        assert!(s.max_discrepancy < 1e-12 && s.max_discrepancy_reduced < 1e-12);
    }
}
