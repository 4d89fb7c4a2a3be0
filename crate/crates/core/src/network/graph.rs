use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{GreenError, LatticePoint, Result};

/// A vertex with half-integer coordinates, stored doubled: `-1/2` is `-1`,
/// `3` is `6`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalfVertex(Vec<i64>);

impl HalfVertex {
    /// Wraps already doubled coordinates.
    pub fn from_doubled(coords: Vec<i64>) -> Self {
        HalfVertex(coords)
    }

    pub fn from_lattice(p: &LatticePoint) -> Self {
        HalfVertex(p.coords().iter().map(|c| 2 * c).collect())
    }

    /// The lattice point, if every coordinate is an integer.
    pub fn to_lattice(&self) -> Option<LatticePoint> {
        self.0
            .iter()
            .all(|c| c % 2 == 0)
            .then(|| LatticePoint::new(self.0.iter().map(|c| c / 2).collect()))
    }

    pub fn doubled(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl From<&LatticePoint> for HalfVertex {
    fn from(p: &LatticePoint) -> Self {
        HalfVertex::from_lattice(p)
    }
}

/// Comma-separated doubled coordinates.
impl fmt::Display for HalfVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for HalfVertex {
    type Err = GreenError;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<LatticePoint>()
            .map(|p| HalfVertex(p.into_coords()))
    }
}

/// A finite graph with positive conductances and a set of absorbing
/// (boundary) vertices.
#[derive(Clone, Debug, Default)]
pub struct WeightedGraph {
    dim: usize,
    vertices: Vec<HalfVertex>,
    index: HashMap<HalfVertex, usize>,
    adj: Vec<Vec<(usize, f64)>>,
    boundary: Vec<bool>,
}

fn check_conductance(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(GreenError::domain(format!(
            "conductances must be positive and finite, got {c}"
        )))
    }
}

impl WeightedGraph {
    pub fn new(dim: usize) -> Self {
        WeightedGraph {
            dim,
            ..Default::default()
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Index of `v`, inserting it as an interior vertex if new.
    pub fn add_vertex(&mut self, v: HalfVertex) -> Result<usize> {
        if v.dim() != self.dim {
            return Err(GreenError::domain(format!(
                "vertex {v} has dimension {}, graph has {}",
                v.dim(),
                self.dim
            )));
        }
        if let Some(&i) = self.index.get(&v) {
            return Ok(i);
        }
        let i = self.vertices.len();
        self.index.insert(v.clone(), i);
        self.vertices.push(v);
        self.adj.push(Vec::new());
        self.boundary.push(false);
        Ok(i)
    }

    pub fn set_boundary(&mut self, v: &HalfVertex, absorbing: bool) -> Result<()> {
        let i = self.add_vertex(v.clone())?;
        self.boundary[i] = absorbing;
        Ok(())
    }

    /// Adds the edge `{u, v}`; fails if it already exists.
    pub fn add_edge(&mut self, u: &HalfVertex, v: &HalfVertex, c: f64) -> Result<()> {
        let (a, b) = self.endpoints(u, v, c)?;
        if self.adj[a].iter().any(|&(n, _)| n == b) {
            return Err(GreenError::domain(format!(
                "duplicate edge {{{u}}} - {{{v}}}"
            )));
        }
        self.adj[a].push((b, c));
        self.adj[b].push((a, c));
        Ok(())
    }

    /// Adds `c` in parallel to the edge `{u, v}`, creating it if needed.
    pub fn add_conductance(&mut self, u: &HalfVertex, v: &HalfVertex, c: f64) -> Result<()> {
        let (a, b) = self.endpoints(u, v, c)?;
        self.add_parallel(a, b, c);
        Ok(())
    }

    fn endpoints(&mut self, u: &HalfVertex, v: &HalfVertex, c: f64) -> Result<(usize, usize)> {
        check_conductance(c)?;
        if u == v {
            return Err(GreenError::domain(format!("self-loop at {u}")));
        }
        Ok((self.add_vertex(u.clone())?, self.add_vertex(v.clone())?))
    }

    fn add_parallel(&mut self, a: usize, b: usize, c: f64) {
        match self.adj[a].iter_mut().find(|(n, _)| *n == b) {
            Some(e) => {
                e.1 += c;
                let back = self.adj[b].iter_mut().find(|(n, _)| *n == a).unwrap();
                back.1 += c;
            }
            None => {
                self.adj[a].push((b, c));
                self.adj[b].push((a, c));
            }
        }
    }

    pub fn index_of(&self, v: &HalfVertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn contains(&self, v: &HalfVertex) -> bool {
        self.index.contains_key(v)
    }

    pub fn vertex(&self, i: usize) -> &HalfVertex {
        &self.vertices[i]
    }

    pub fn vertices(&self) -> &[HalfVertex] {
        &self.vertices
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.boundary[i]
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adj[i]
    }

    /// `pi(v)`: the total conductance at `v`, boundary edges included.
    pub fn pi(&self, i: usize) -> f64 {
        self.adj[i].iter().map(|&(_, c)| c).sum()
    }

    pub fn pi_of(&self, v: &HalfVertex) -> Option<f64> {
        self.index_of(v).map(|i| self.pi(i))
    }

    pub fn conductance(&self, u: &HalfVertex, v: &HalfVertex) -> Option<f64> {
        let (a, b) = (self.index_of(u)?, self.index_of(v)?);
        self.adj[a].iter().find(|&&(n, _)| n == b).map(|&(_, c)| c)
    }

    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| !self.boundary[i])
    }

    pub fn boundary_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.boundary[i])
    }

    /// Each edge once, as `(u, v, c)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, ns)| {
            ns.iter()
                .filter(move |&&(v, _)| u < v)
                .map(move |&(v, c)| (u, v, c))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// The subgraph on the vertices satisfying `keep`, with the boundary
    /// flags inherited.
    pub fn induced(&self, mut keep: impl FnMut(&HalfVertex) -> bool) -> WeightedGraph {
        let mut out = WeightedGraph::new(self.dim);
        let kept: Vec<bool> = self.vertices.iter().map(&mut keep).collect();
        for (i, v) in self.vertices.iter().enumerate() {
            if kept[i] {
                let j = out.add_vertex(v.clone()).expect("same dimension");
                out.boundary[j] = self.boundary[i];
            }
        }
        for (u, v, c) in self.edges() {
            if kept[u] && kept[v] {
                let (a, b) = (out.index[&self.vertices[u]], out.index[&self.vertices[v]]);
                out.add_parallel(a, b, c);
            }
        }
        out
    }

    /// Checks that no interior vertex is isolated from the boundary, which
    /// is exactly when the killed Laplacian is nonsingular.
    pub fn check_killed(&self) -> Result<()> {
        let mut reached = self.boundary.clone();
        let mut stack: Vec<usize> = self.boundary_vertices().collect();
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adj[u] {
                if !reached[v] {
                    reached[v] = true;
                    if !self.boundary[v] {
                        stack.push(v);
                    }
                }
            }
        }
        match reached.iter().position(|r| !r) {
            None => Ok(()),
            Some(i) => Err(GreenError::Singular(format!(
                "vertex {} cannot reach the boundary, so the walk is never killed",
                self.vertices[i]
            ))),
        }
    }

    /// Same vertices, boundary flags and edges, with conductances equal up to
    /// `tol`.
    pub fn same_as(&self, other: &WeightedGraph, tol: f64) -> bool {
        if self.dim != other.dim
            || self.len() != other.len()
            || self.edge_count() != other.edge_count()
        {
            return false;
        }
        for (i, v) in self.vertices.iter().enumerate() {
            match other.index_of(v) {
                Some(j) if other.boundary[j] == self.boundary[i] => {}
                _ => return false,
            }
        }
        self.edges().all(|(u, v, c)| {
            other
                .conductance(&self.vertices[u], &self.vertices[v])
                .is_some_and(|d| (c - d).abs() <= tol)
        })
    }

    /// Removes an interior vertex of degree 2 not listed in `keep`, joining its
    /// neighbours by the series conductance `c1 c2 / (c1 + c2)`, until none
    /// is left. Killed Green's functions on the surviving vertices are
    /// unchanged.
    pub fn series_reduce(&self, keep: &[HalfVertex]) -> WeightedGraph {
        let mut g = self.clone();
        let protected: Vec<bool> = g.vertices.iter().map(|v| keep.contains(v)).collect();
        let mut removed = vec![false; g.len()];
        let mut queue: Vec<usize> = (0..g.len()).rev().collect();
        while let Some(i) = queue.pop() {
            if removed[i] || protected[i] || g.boundary[i] || g.adj[i].len() != 2 {
                continue;
            }
            let [(a, ca), (b, cb)] = [g.adj[i][0], g.adj[i][1]];
            g.adj[a].retain(|&(n, _)| n != i);
            g.adj[b].retain(|&(n, _)| n != i);
            g.adj[i].clear();
            removed[i] = true;
            g.add_parallel(a, b, ca * cb / (ca + cb));
            queue.push(b);
            queue.push(a);
        }
        g.induced(|v| !removed[self.index[v]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hv<const N: usize>(c: [i64; N]) -> HalfVertex {
        HalfVertex::from_doubled(c.to_vec())
    }

    #[test]
    fn half_vertex_round_trip() {
        let p = LatticePoint::from([1, -2]);
        let v = HalfVertex::from_lattice(&p);
        assert_eq!(v.doubled(), &[2, -4]);
        assert_eq!(v.to_lattice(), Some(p));
        assert_eq!(hv([-1, 0]).to_lattice(), None);
        assert_eq!("-1,4".parse::<HalfVertex>().unwrap(), hv([-1, 4]));
    }

    #[test]
    fn rejects_bad_edges() {
        let mut g = WeightedGraph::new(1);
        assert!(g.add_edge(&hv([0]), &hv([2]), 0.0).is_err());
        assert!(g.add_edge(&hv([0]), &hv([2]), f64::INFINITY).is_err());
        assert!(g.add_edge(&hv([0]), &hv([0]), 1.0).is_err());
        assert!(g.add_edge(&hv([0, 0]), &hv([2]), 1.0).is_err());
        g.add_edge(&hv([0]), &hv([2]), 1.0).unwrap();
        assert!(g.add_edge(&hv([2]), &hv([0]), 1.0).is_err());
        g.add_conductance(&hv([2]), &hv([0]), 0.5).unwrap();
        assert_eq!(g.conductance(&hv([0]), &hv([2])), Some(1.5));
    }

    #[test]
    fn series_pairs_reduce_by_ohms_law() {
        let mut g = WeightedGraph::new(1);
        g.add_edge(&hv([0]), &hv([1]), 2.0).unwrap();
        g.add_edge(&hv([1]), &hv([2]), 2.0).unwrap();
        let r = g.series_reduce(&[]);
        assert_eq!(r.len(), 2);
        assert_eq!(r.conductance(&hv([0]), &hv([2])), Some(1.0));

        let mut g = WeightedGraph::new(1);
        g.add_edge(&hv([0]), &hv([1]), 3.0).unwrap();
        g.add_edge(&hv([1]), &hv([2]), 6.0).unwrap();
        g.set_boundary(&hv([0]), true).unwrap();
        g.set_boundary(&hv([2]), true).unwrap();
        let r = g.series_reduce(&[]);
        assert_eq!(r.conductance(&hv([0]), &hv([2])), Some(2.0));
        assert!(g.series_reduce(&[hv([1])]).same_as(&g, 0.0));
    }

    #[test]
    fn unreachable_boundary_is_singular() {
        let mut g = WeightedGraph::new(1);
        g.add_edge(&hv([0]), &hv([2]), 1.0).unwrap();
        assert!(matches!(g.check_killed(), Err(GreenError::Singular(_))));
        g.set_boundary(&hv([2]), true).unwrap();
        assert!(g.check_killed().is_ok());
    }
}
