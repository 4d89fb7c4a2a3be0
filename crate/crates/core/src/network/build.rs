use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::graph::{HalfVertex, WeightedGraph};
use crate::reflection::DomainSpec;
use crate::{GreenError, Result};

/// Which finite graph [`build_truncated`] produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    /// The domain itself, cut to a box. For `Z^d` the box is
    /// `[-N-1, N] x [-N, N]^(d-1)`; otherwise the constrained coordinates run
    /// over `[0, N]` (or `[0, L-1]` for the strip) and the free ones over
    /// `[-N, N]`.
    Plain,
    /// `Plain` with a tooth of conductance 2 attached half a step outside
    /// every face.
    HPrime,
    /// The unfolded lattice with each bond across a folding hyperplane split
    /// into two conductances 2 in series.
    Q,
    /// `Q` restricted to the vertices fixed by the folding map.
    Folded,
}

impl Construction {
    pub const ALL: [Construction; 4] = [
        Construction::Plain,
        Construction::HPrime,
        Construction::Q,
        Construction::Folded,
    ];
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Construction::Plain => "plain",
            Construction::HPrime => "h-prime",
            Construction::Q => "q",
            Construction::Folded => "folded",
        })
    }
}

impl FromStr for Construction {
    type Err = GreenError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "plain" => Ok(Construction::Plain),
            "h-prime" | "hprime" => Ok(Construction::HPrime),
            "q" => Ok(Construction::Q),
            "folded" => Ok(Construction::Folded),
            _ => Err(GreenError::domain(format!("unknown construction {s:?}"))),
        }
    }
}

/// A box of lattice points with optional periodic first coordinate,
/// bond splits and teeth, all in integer units.
struct BoxSpec {
    lo: Vec<i64>,
    hi: Vec<i64>,
    /// Per-axis range of the ambient graph; neighbours outside it do not exist.
    ambient: Vec<(i64, i64)>,
    /// First coordinate taken modulo `hi[0] - lo[0] + 1`.
    periodic: bool,
    /// `(axis, a)`: the bond between `x_axis = a` and `a + 1` is split.
    splits: Vec<(usize, i64)>,
    /// `(axis, a, dir)`: a tooth at `x_axis = a + dir / 2` for every point
    /// with `x_axis = a`.
    teeth: Vec<(usize, i64, i64)>,
}

const TOOTH: f64 = 2.0;

fn doubled(p: &[i64]) -> HalfVertex {
    HalfVertex::from_doubled(p.iter().map(|c| 2 * c).collect())
}

impl BoxSpec {
    fn inside(&self, p: &[i64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(c, (l, h))| (l..=h).contains(&c))
    }

    fn in_ambient(&self, p: &[i64]) -> bool {
        p.iter()
            .zip(&self.ambient)
            .all(|(c, (l, h))| (l..=h).contains(&c))
    }

    fn build(&self) -> Result<WeightedGraph> {
        let d = self.lo.len();
        let mut g = WeightedGraph::new(d);
        let mut p = self.lo.clone();
        loop {
            let here = doubled(&p);
            g.add_vertex(here.clone())?;
            for axis in 0..d {
                let mut q = p.clone();
                q[axis] += 1;
                let mut wrapped = false;
                if self.periodic && axis == 0 && q[0] > self.hi[0] {
                    q[0] = self.lo[0];
                    wrapped = true;
                }
                if self.inside(&q) || wrapped {
                    self.bond(&mut g, &p, &q, axis)?;
                } else if self.in_ambient(&q) {
                    g.set_boundary(&doubled(&q), true)?;
                    self.bond(&mut g, &p, &q, axis)?;
                }
                // the lower neighbour only matters when it lies outside the box
                let mut r = p.clone();
                r[axis] -= 1;
                let periodic_axis = self.periodic && axis == 0;
                if !self.inside(&r) && !periodic_axis && self.in_ambient(&r) {
                    g.set_boundary(&doubled(&r), true)?;
                    self.bond(&mut g, &r, &p, axis)?;
                }
            }
            for &(axis, a, dir) in &self.teeth {
                if p[axis] == a {
                    let mut t = here.doubled().to_vec();
                    t[axis] += dir;
                    g.add_edge(&here, &HalfVertex::from_doubled(t), TOOTH)?;
                }
            }
            if !advance(&mut p, &self.lo, &self.hi) {
                break;
            }
        }
        Ok(g)
    }

    /// Adds the bond `{a, b}` with `b = a + e_axis` (possibly wrapped), split
    /// if listed.
    fn bond(&self, g: &mut WeightedGraph, a: &[i64], b: &[i64], axis: usize) -> Result<()> {
        let (va, vb) = (doubled(a), doubled(b));
        if self.splits.contains(&(axis, a[axis])) {
            let mut mid = va.doubled().to_vec();
            mid[axis] += 1;
            let mid = HalfVertex::from_doubled(mid);
            g.add_edge(&va, &mid, TOOTH)?;
            g.add_edge(&mid, &vb, TOOTH)
        } else {
            g.add_edge(&va, &vb, 1.0)
        }
    }
}

fn advance(p: &mut [i64], lo: &[i64], hi: &[i64]) -> bool {
    for i in (0..p.len()).rev() {
        if p[i] < hi[i] {
            p[i] += 1;
            return true;
        }
        p[i] = lo[i];
    }
    false
}

const FREE: (i64, i64) = (i64::MIN, i64::MAX);

/// The box `prod_i [lo_i, hi_i]` of `Z^d` with unit conductances, killed on
/// its outer neighbours.
pub fn lattice_box(lo: &[i64], hi: &[i64]) -> Result<WeightedGraph> {
    if lo.len() != hi.len() || lo.iter().zip(hi).any(|(l, h)| l > h) {
        return Err(GreenError::domain("box bounds must satisfy lo <= hi"));
    }
    BoxSpec {
        lo: lo.to_vec(),
        hi: hi.to_vec(),
        ambient: vec![FREE; lo.len()],
        periodic: false,
        splits: vec![],
        teeth: vec![],
    }
    .build()
}

/// A finite version of one of the graphs used to fold `Z^d` onto `domain`,
/// killed outside a box of size `n`. See [`Construction`] for the variants.
///
/// For the strip, `Q` is the cylinder `Z_{2L} x [-N, N]^(d-1)` split at
/// `x_1 = -1/2` and `x_1 = L - 1/2`, which folds onto the strip exactly.
pub fn build_truncated(
    domain: &DomainSpec,
    n: usize,
    construction: Construction,
) -> Result<WeightedGraph> {
    if n < 1 {
        return Err(GreenError::domain("truncation size N must be at least 1"));
    }
    let n = n as i64;
    let d = domain.dim();
    let spec = match (*domain, construction) {
        (_, Construction::Folded) => {
            let q = build_truncated(domain, n as usize, Construction::Q)?;
            return Ok(q.induced(|v| reflect_fold(v, domain) == *v));
        }
        (DomainSpec::Subspace { m: 0, .. }, Construction::HPrime) => {
            return Err(GreenError::domain("Z^d has no faces to attach teeth to"));
        }
        (DomainSpec::Subspace { m: 0, .. }, Construction::Plain) => {
            let mut lo = vec![-n; d];
            lo[0] = -n - 1;
            return lattice_box(&lo, &vec![n; d]);
        }
        (DomainSpec::Subspace { m, .. }, Construction::Q) => {
            let mut lo = vec![-n; d];
            let folds = m.max(1);
            lo[..folds].fill(-n - 1);
            BoxSpec {
                lo,
                hi: vec![n; d],
                ambient: vec![FREE; d],
                periodic: false,
                splits: (0..folds).map(|i| (i, -1)).collect(),
                teeth: vec![],
            }
        }
        (DomainSpec::Subspace { m, .. }, c) => {
            let mut lo = vec![-n; d];
            lo[..m].fill(0);
            let mut ambient = vec![FREE; d];
            ambient[..m].fill((0, i64::MAX));
            let teeth = if c == Construction::HPrime {
                (0..m).map(|i| (i, 0, -1)).collect()
            } else {
                vec![]
            };
            BoxSpec {
                lo,
                hi: vec![n; d],
                ambient,
                periodic: false,
                splits: vec![],
                teeth,
            }
        }
        (DomainSpec::Strip { width, .. }, Construction::Q) => {
            let l = width as i64;
            let mut lo = vec![-n; d];
            let mut hi = vec![n; d];
            lo[0] = -l;
            hi[0] = l - 1;
            BoxSpec {
                lo,
                hi,
                ambient: vec![FREE; d],
                periodic: true,
                splits: vec![(0, -1), (0, l - 1)],
                teeth: vec![],
            }
        }
        (DomainSpec::Strip { width, .. }, c) => {
            let l = width as i64;
            let mut lo = vec![-n; d];
            let mut hi = vec![n; d];
            lo[0] = 0;
            hi[0] = l - 1;
            let mut ambient = vec![FREE; d];
            ambient[0] = (0, l - 1);
            let teeth = if c == Construction::HPrime {
                vec![(0, 0, -1), (0, l - 1, 1)]
            } else {
                vec![]
            };
            BoxSpec {
                lo,
                hi,
                ambient,
                periodic: false,
                splits: vec![],
                teeth,
            }
        }
    };
    spec.build()
}

/// `Q` with its split bonds joined again: the box of `Z^d` (or the cylinder
/// for the strip) that [`Construction::Q`] subdivides.
pub fn build_unfolded(domain: &DomainSpec, n: usize) -> Result<WeightedGraph> {
    if n < 1 {
        return Err(GreenError::domain("truncation size N must be at least 1"));
    }
    let n = n as i64;
    let d = domain.dim();
    let mut spec = BoxSpec {
        lo: vec![-n; d],
        hi: vec![n; d],
        ambient: vec![FREE; d],
        periodic: false,
        splits: vec![],
        teeth: vec![],
    };
    match *domain {
        DomainSpec::Subspace { m, .. } => spec.lo[..m.max(1)].fill(-n - 1),
        DomainSpec::Strip { width, .. } => {
            spec.lo[0] = -(width as i64);
            spec.hi[0] = width as i64 - 1;
            spec.periodic = true;
        }
    }
    spec.build()
}

/// The folding map of `domain` in doubled coordinates: reflection about
/// `x_i = -1/2` for each constrained coordinate, or the mountain-and-valley
/// fold about the lines `x_1 = kL - 1/2` for the strip.
pub fn reflect_fold(v: &HalfVertex, domain: &DomainSpec) -> HalfVertex {
    let mut c = v.doubled().to_vec();
    match *domain {
        DomainSpec::Subspace { m, .. } => {
            for x in c.iter_mut().take(m) {
                if *x <= -1 {
                    *x = -*x - 2;
                }
            }
        }
        DomainSpec::Strip { width, .. } => {
            let period = 4 * width as i64;
            let w = (c[0] + 1).rem_euclid(period);
            c[0] = if w <= period / 2 {
                w - 1
            } else {
                period - w - 1
            };
        }
    }
    HalfVertex::from_doubled(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hv<const N: usize>(c: [i64; N]) -> HalfVertex {
        HalfVertex::from_doubled(c.to_vec())
    }

    #[test]
    fn half_space_fold() {
        let h = DomainSpec::half_space(3).unwrap();
        assert_eq!(reflect_fold(&hv([-6, 10, 0]), &h), hv([4, 10, 0]));
        assert_eq!(reflect_fold(&hv([2, 10, 0]), &h), hv([2, 10, 0]));
        assert_eq!(reflect_fold(&hv([-1, 10, 0]), &h), hv([-1, 10, 0]));
        let o = DomainSpec::orthant(3).unwrap();
        assert_eq!(reflect_fold(&hv([-2, -4, -1]), &o), hv([0, 2, -1]));
        let f = DomainSpec::full(3).unwrap();
        assert_eq!(reflect_fold(&hv([-2, -4, -1]), &f), hv([-2, -4, -1]));
    }

    #[test]
    fn strip_fold_matches_image_family() {
        let s = DomainSpec::strip(4, 2).unwrap();
        for k in -5i64..=5 {
            let image = if k % 2 == 0 { 2 * k } else { 2 * k + 1 };
            let v = hv([2 * image, 2, 0, 0]);
            assert_eq!(reflect_fold(&v, &s), hv([0, 2, 0, 0]), "k = {k}");
        }
        assert_eq!(reflect_fold(&hv([3, 0, 0, 0]), &s), hv([3, 0, 0, 0]));
        assert_eq!(reflect_fold(&hv([-1, 0, 0, 0]), &s), hv([-1, 0, 0, 0]));
    }

    #[test]
    fn h_prime_has_teeth() {
        let h = DomainSpec::half_space(3).unwrap();
        let g = build_truncated(&h, 3, Construction::HPrime).unwrap();
        for a in -3..=3 {
            for b in -3..=3 {
                let face = hv([0, 2 * a, 2 * b]);
                let tooth = hv([-1, 2 * a, 2 * b]);
                assert_eq!(g.conductance(&face, &tooth), Some(2.0));
                assert_eq!(g.neighbors(g.index_of(&tooth).unwrap()).len(), 1);
            }
        }
        assert!(!g.contains(&hv([-2, 0, 0])));
        assert!(g.is_boundary(g.index_of(&hv([8, 0, 0])).unwrap()));
        assert!(g.is_boundary(g.index_of(&hv([0, 8, 0])).unwrap()));
    }

    #[test]
    fn q_splits_bonds_across_the_fold() {
        let f = DomainSpec::full(3).unwrap();
        let g = build_truncated(&f, 3, Construction::Q).unwrap();
        for a in -3..=3 {
            let mid = hv([-1, 2 * a, 0]);
            assert_eq!(g.conductance(&hv([-2, 2 * a, 0]), &mid), Some(2.0));
            assert_eq!(g.conductance(&mid, &hv([0, 2 * a, 0])), Some(2.0));
            assert_eq!(g.conductance(&hv([-2, 2 * a, 0]), &hv([0, 2 * a, 0])), None);
        }
        assert_eq!(g.conductance(&hv([0, 0, 0]), &hv([2, 0, 0])), Some(1.0));
    }

    #[test]
    fn folded_equals_h_prime() {
        for dom in [
            DomainSpec::half_space(3).unwrap(),
            DomainSpec::orthant(3).unwrap(),
            DomainSpec::strip(4, 3).unwrap(),
        ] {
            let a = build_truncated(&dom, 2, Construction::Folded).unwrap();
            let b = build_truncated(&dom, 2, Construction::HPrime).unwrap();
            assert!(a.same_as(&b, 0.0), "{dom}");
        }
    }

    #[test]
    fn plain_boxes() {
        let g = lattice_box(&[0, 0], &[1, 1]).unwrap();
        assert_eq!(g.interior().count(), 4);
        assert_eq!(g.boundary_vertices().count(), 8);
        assert!(lattice_box(&[1], &[0]).is_err());
        assert!(build_truncated(&DomainSpec::full(3).unwrap(), 0, Construction::Plain).is_err());
        assert!(build_truncated(&DomainSpec::full(3).unwrap(), 1, Construction::HPrime).is_err());
    }

    #[test]
    fn construction_names() {
        for c in Construction::ALL {
            assert_eq!(c.to_string().parse::<Construction>().unwrap(), c);
        }
        assert!("weird".parse::<Construction>().is_err());
    }
}
