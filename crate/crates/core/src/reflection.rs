//! Closed-form Green's functions on subgraphs of `Z^d`, each a finite or
//! infinite sum of lattice values `g(x, y')` over mirror images `y'` of `y`.
//!
//! | domain | images of `y` |
//! |---|---|
//! | half-lattice `x_1 >= 0` | `y`, `ybar - e_1` |
//! | half-lattice, killed on `x_1 = 0` | `y` (+), `ybar` (-) |
//! | half-lattice, reflected `abs(S^1)` walk | `y`, `ybar` |
//! | `U_m = N_0^m x Z^(d-m)` | all `2^m` reflections about `x_i = -1/2`, `i <= m` |
//! | strip `[0, L-1] x Z^(d-1)` | the mountain-and-valley family `A_k`, `k in Z` |
//!
//! Reflection about `x_i = -1/2` is the integer map `y_i -> -y_i - 1`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::{
    bessel_product_integral, require_dim, require_transient, EstimateKind, GreenEstimate,
    GreenEvaluator, LatticePoint,
};
use crate::{GreenError, Result};

/// The graphs on which Green's functions are available. The half-lattice,
/// the orthant and `Z^d` itself are the special cases `m = 1`, `m = d` and
/// `m = 0` of [`DomainSpec::Subspace`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainSpec {
    /// `N_0^m x Z^(d-m)`.
    Subspace { d: usize, m: usize },
    /// `[0, width - 1] x Z^(d-1)`.
    Strip { d: usize, width: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DomainKind {
    FullLattice,
    HalfSpace,
    Subspace,
    Orthant,
    Strip,
}

impl DomainSpec {
    pub fn full(d: usize) -> Result<Self> {
        Self::subspace(d, 0)
    }

    pub fn half_space(d: usize) -> Result<Self> {
        Self::subspace(d, 1)
    }

    pub fn orthant(d: usize) -> Result<Self> {
        Self::subspace(d, d)
    }

    pub fn subspace(d: usize, m: usize) -> Result<Self> {
        require_transient(d, 3)?;
        if m > d {
            return Err(GreenError::domain(format!(
                "subspace needs m <= d, got m = {m}, d = {d}"
            )));
        }
        Ok(DomainSpec::Subspace { d, m })
    }

    /// The strip is transient only for `d >= 4`.
    pub fn strip(d: usize, width: usize) -> Result<Self> {
        require_transient(d, 4)?;
        if width < 2 {
            return Err(GreenError::domain(format!(
                "strip width must be at least 2, got {width}"
            )));
        }
        Ok(DomainSpec::Strip { d, width })
    }

    pub fn dim(&self) -> usize {
        match *self {
            DomainSpec::Subspace { d, .. } | DomainSpec::Strip { d, .. } => d,
        }
    }

    pub fn kind(&self) -> DomainKind {
        match *self {
            DomainSpec::Subspace { m: 0, .. } => DomainKind::FullLattice,
            DomainSpec::Subspace { m: 1, .. } => DomainKind::HalfSpace,
            DomainSpec::Subspace { d, m } if m == d => DomainKind::Orthant,
            DomainSpec::Subspace { .. } => DomainKind::Subspace,
            DomainSpec::Strip { .. } => DomainKind::Strip,
        }
    }

    /// Dimension of the walk at large scales: a strip of bounded width looks
    /// `(d-1)`-dimensional.
    pub fn effective_dimension(&self) -> usize {
        match *self {
            DomainSpec::Subspace { d, .. } => d,
            DomainSpec::Strip { d, .. } => d - 1,
        }
    }

    pub fn contains(&self, p: &LatticePoint) -> bool {
        if p.dim() != self.dim() {
            return false;
        }
        let c = p.coords();
        match *self {
            DomainSpec::Subspace { m, .. } => c[..m].iter().all(|&v| v >= 0),
            DomainSpec::Strip { width, .. } => (0..width as i64).contains(&c[0]),
        }
    }

    pub fn check_point(&self, p: &LatticePoint) -> Result<()> {
        require_dim(p, self.dim())?;
        if self.contains(p) {
            Ok(())
        } else {
            Err(GreenError::domain(format!("point {p} lies outside {self}")))
        }
    }

    /// Number of in-domain nearest neighbours, i.e. `pi(p)` for unit
    /// conductances.
    pub fn degree(&self, p: &LatticePoint) -> usize {
        p.neighbors().filter(|q| self.contains(q)).count()
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind(), *self) {
            (DomainKind::FullLattice, s) => write!(f, "full(d={})", s.dim()),
            (DomainKind::HalfSpace, s) => write!(f, "half(d={})", s.dim()),
            (DomainKind::Orthant, s) => write!(f, "orthant(d={})", s.dim()),
            (_, DomainSpec::Subspace { d, m }) => write!(f, "subspace(d={d},m={m})"),
            (_, DomainSpec::Strip { d, width }) => write!(f, "strip(d={d},L={width})"),
        }
    }
}

/// A reflection pattern `v in {0,1}^m x {0}^(d-m)`; `v_i = 1` reflects
/// coordinate `i` about `x_i = -1/2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReflectionSign {
    flips: Vec<bool>,
}

impl ReflectionSign {
    pub fn new(flips: Vec<bool>, m: usize) -> Result<Self> {
        if flips.iter().skip(m).any(|&b| b) {
            return Err(GreenError::domain(format!(
                "reflection entries beyond index {m} must be 0"
            )));
        }
        Ok(ReflectionSign { flips })
    }

    pub fn identity(d: usize) -> Self {
        ReflectionSign {
            flips: vec![false; d],
        }
    }

    /// All `2^m` patterns, ordered as a binary counter with coordinate 1 as
    /// the lowest bit.
    pub fn all(d: usize, m: usize) -> impl Iterator<Item = ReflectionSign> {
        (0u64..1 << m).map(move |bits| ReflectionSign {
            flips: (0..d).map(|i| i < m && bits >> i & 1 == 1).collect(),
        })
    }

    pub fn flips(&self) -> &[bool] {
        &self.flips
    }
}

/// `ybar = (-y_1, y_2, ..., y_d)`.
pub fn reflect_first(y: &LatticePoint) -> LatticePoint {
    let mut r = y.clone();
    if let Some(c) = r.coords_mut().first_mut() {
        *c = -*c;
    }
    r
}

/// `((-1)^{v_i} (y_i + 1/2) - 1/2)_i`, i.e. `y_i -> -y_i - 1` where `v_i = 1`.
///
/// # Panics
/// If `y` and `v` have different dimensions.
pub fn reflect_signed(y: &LatticePoint, v: &ReflectionSign) -> LatticePoint {
    assert_eq!(y.dim(), v.flips.len(), "dimension mismatch");
    LatticePoint::new(
        y.coords()
            .iter()
            .zip(&v.flips)
            .map(|(&c, &flip)| if flip { -c - 1 } else { c })
            .collect(),
    )
}

fn check_half(d: usize, x: &LatticePoint, y: &LatticePoint) -> Result<()> {
    let h = DomainSpec::half_space(d)?;
    h.check_point(x)?;
    h.check_point(y)
}

/// Half-lattice `{x_1 >= 0}` without killing: `g(x, y) + g(x, ybar - e_1)`.
pub fn green_half(
    ev: &GreenEvaluator,
    d: usize,
    x: &LatticePoint,
    y: &LatticePoint,
) -> Result<GreenEstimate> {
    check_half(d, x, y)?;
    let mut image = reflect_first(y);
    image.coords_mut()[0] -= 1;
    Ok(ev.between(d, x, y)?.plus(ev.between(d, x, &image)?))
}

/// Walk on `Z^d` killed on `{x_1 = 0}`, restricted to the half-lattice:
/// `g(x, y) - g(x, ybar)`.
pub fn green_half_killed(
    ev: &GreenEvaluator,
    d: usize,
    x: &LatticePoint,
    y: &LatticePoint,
) -> Result<GreenEstimate> {
    check_half(d, x, y)?;
    let direct = ev.between(d, x, y)?;
    let image = ev.between(d, x, &reflect_first(y))?;
    let mut est = direct.minus(image);
    est.value = est.value.max(0.0);
    Ok(est)
}

/// The walk `(|S^1|, S^2, ..., S^d)`: `g(x, y) + g(x, ybar)`.
pub fn green_half_reflected(
    ev: &GreenEvaluator,
    d: usize,
    x: &LatticePoint,
    y: &LatticePoint,
) -> Result<GreenEstimate> {
    check_half(d, x, y)?;
    Ok(ev
        .between(d, x, y)?
        .plus(ev.between(d, x, &reflect_first(y))?))
}

/// `G_m(x, y)` on `N_0^m x Z^(d-m)`: the sum of `g(x, .)` over the `2^m`
/// reflections of `y`.
pub fn green_subspace(
    ev: &GreenEvaluator,
    d: usize,
    m: usize,
    x: &LatticePoint,
    y: &LatticePoint,
) -> Result<GreenEstimate> {
    let dom = DomainSpec::subspace(d, m)?;
    dom.check_point(x)?;
    dom.check_point(y)?;
    let images: Vec<LatticePoint> = ReflectionSign::all(d, m)
        .map(|v| reflect_signed(y, &v))
        .collect();
    let terms = images
        .par_iter()
        .map(|img| ev.between(d, x, img))
        .collect::<Result<Vec<_>>>()?;
    Ok(sum_in_order(&terms, EstimateKind::Quadrature))
}

/// `G_O(x, y)`, the orthant `N_0^d`.
pub fn green_orthant(
    ev: &GreenEvaluator,
    d: usize,
    x: &LatticePoint,
    y: &LatticePoint,
) -> Result<GreenEstimate> {
    green_subspace(ev, d, d, x, y)
}

fn sum_in_order(terms: &[GreenEstimate], kind: EstimateKind) -> GreenEstimate {
    terms
        .iter()
        .fold(GreenEstimate::new(0.0, 0.0, kind), |acc, t| {
            GreenEstimate::new(acc.value + t.value, acc.error_bound + t.error_bound, kind)
        })
}

/// `G_m(0, 0)` by two independent routes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OriginDiagonal {
    /// `(1/2d) int e^-t (I_1 + I_0)^m I_0^(d-m) (t/d) dt`.
    pub integral: GreenEstimate,
    /// `sum_j C(m, j) g(0, gamma_j)`.
    pub binomial: GreenEstimate,
}

impl OriginDiagonal {
    pub fn discrepancy(&self) -> f64 {
        (self.integral.value - self.binomial.value).abs()
    }

    pub fn combined_bound(&self) -> f64 {
        self.integral.error_bound + self.binomial.error_bound
    }
}

/// Evaluates `G_m(0, 0)` by the closed integral and by the binomial sum over
/// `g(0, gamma_j)`, and fails if they disagree beyond their error bounds.
///
/// The binomial terms are computed to `abs_tol / 2^m` so that both routes
/// carry comparable bounds.
pub fn green_origin_diag(ev: &GreenEvaluator, d: usize, m: usize) -> Result<OriginDiagonal> {
    DomainSpec::subspace(d, m)?;
    let integral = ev.origin_diagonal_integral(d, m)?;
    let term_tol = ev.config().abs_tol / (1u64 << m) as f64;
    let terms = (0..=m)
        .into_par_iter()
        .map(|j| {
            ev.origin_gamma_tol(d, m, j, term_tol)
                .map(|g| g.scaled(binomial(m, j)))
        })
        .collect::<Result<Vec<_>>>()?;
    let binomial = sum_in_order(&terms, EstimateKind::Quadrature);
    let out = OriginDiagonal { integral, binomial };
    if out.discrepancy() > out.combined_bound() {
        return Err(GreenError::Consistency(format!(
            "G_{m}(0,0) in d = {d}: integral {} vs binomial sum {} (bound {:e})",
            integral.value,
            binomial.value,
            out.combined_bound()
        )));
    }
    Ok(out)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// The image `A_k` of `y` under the mountain-and-valley folding of the strip
/// of width `width`: `y + kL e_1` for even `k`, `ybar + (kL + L - 1) e_1` for
/// odd `k`.
pub fn strip_image(width: usize, y: &LatticePoint, k: i64) -> LatticePoint {
    let l = width as i64;
    if k.rem_euclid(2) == 0 {
        let mut p = y.clone();
        p.coords_mut()[0] += k * l;
        p
    } else {
        let mut p = reflect_first(y);
        p.coords_mut()[0] += k * l + l - 1;
        p
    }
}

/// Outcome of the truncated strip series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StripSum {
    /// Partial sum over `|k| <= shells`; the error bound includes the tail.
    pub estimate: GreenEstimate,
    pub shells: usize,
    pub tail_bound: f64,
}

/// Multiplies the calibrated decay constant in the tail bound. The product
/// `g(0, z) |z|^(d-2)` still drifts by `O(1/k)` across shells, so the raw
/// calibration is not an upper bound by itself.
const TAIL_SAFETY: f64 = 2.0;

/// Shells evaluated per parallel batch.
const SHELL_BATCH: usize = 8;

/// Green's function of the strip `[0, L-1] x Z^(d-1)`, `d >= 4`, from the
/// image series truncated at `|k| <= K`.
///
/// Shells `k = +-n` are added outward. `K` is the first shell (`>= 3`) at which
/// the shell contribution is below `tol / 4` and the tail bound
/// `2 C L^(2-d) (K^(2-d) + K^(3-d)/(d-3))` is below `tol / 2`, where `C` is
/// `TAIL_SAFETY` times the largest `g * ((|k|-1) L)^(d-2)` seen over the last two
/// shells. Shells whose images would exceed the Bessel order cap are not
/// attempted; if the criterion is not met before then, or the tail bound
/// shows it cannot be met within twice that many shells, a convergence error
/// carries the partial sum.
pub fn green_strip_series(
    ev: &GreenEvaluator,
    d: usize,
    width: usize,
    x: &LatticePoint,
    y: &LatticePoint,
    tol: f64,
) -> Result<StripSum> {
    let dom = DomainSpec::strip(d, width)?;
    dom.check_point(x)?;
    dom.check_point(y)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(GreenError::Config(format!(
            "strip tolerance must be positive, got {tol}"
        )));
    }

    let l = width as i64;
    let cap = i64::from(ev.config().order_cap);
    let spread = x.max_abs().max(y.max_abs()) as i64;
    // |offset| of shell n is at most (n + 1) L + spread
    let max_shell = ((cap - spread) / l - 1).max(0) as usize;
    let exponent = (d - 2) as i32;

    let term = |k: i64| -> Result<GreenEstimate> { ev.between(d, x, &strip_image(width, y, k)) };

    let mut value = 0.0;
    let mut quad_error = 0.0;
    let mut calib: Vec<f64> = Vec::new();
    let mut last_tail = f64::INFINITY;

    let mut start = 0usize;
    'shells: while start <= max_shell {
        let end = (start + SHELL_BATCH).min(max_shell + 1);
        let batch = (start..end)
            .into_par_iter()
            .map(|n| {
                if n == 0 {
                    term(0).map(|t| vec![t])
                } else {
                    let n = n as i64;
                    Ok(vec![term(n)?, term(-n)?])
                }
            })
            .collect::<Result<Vec<_>>>()?;

        for (n, shell) in (start..end).zip(batch) {
            let shell_value: f64 = shell.iter().map(|t| t.value).sum();
            for t in &shell {
                value += t.value;
                quad_error += t.error_bound;
            }
            if n < 2 {
                continue;
            }
            let dist = ((n - 1) as f64) * width as f64;
            let c_shell = shell
                .iter()
                .map(|t| t.value * dist.powi(exponent))
                .fold(0.0, f64::max);
            calib.push(c_shell);
            if n < 3 {
                continue;
            }
            let c = TAIL_SAFETY * calib[calib.len() - 2..].iter().copied().fold(0.0, f64::max);
            let tail_at = |k: f64| {
                2.0 * c
                    * (width as f64).powi(-exponent)
                    * (k.powi(-exponent) + k.powi(1 - exponent) / (d as f64 - 3.0))
            };
            let tail = tail_at(n as f64);
            last_tail = tail;
            if tail_at(2.0 * max_shell as f64) >= tol / 2.0 {
                break 'shells;
            }
            if shell_value < tol / 4.0 && tail < tol / 2.0 {
                return Ok(StripSum {
                    estimate: GreenEstimate::new(
                        value,
                        quad_error + tail,
                        EstimateKind::SeriesTruncated,
                    ),
                    shells: n,
                    tail_bound: tail,
                });
            }
        }
        start = end;
    }

    Err(GreenError::Convergence {
        estimate: value,
        error_bound: quad_error + last_tail,
        tol,
    })
}

/// [`green_strip_series`], returning only the estimate.
pub fn green_strip(
    ev: &GreenEvaluator,
    d: usize,
    width: usize,
    x: &LatticePoint,
    y: &LatticePoint,
    tol: f64,
) -> Result<GreenEstimate> {
    green_strip_series(ev, d, width, x, y, tol).map(|s| s.estimate)
}

/// The strip Green's function with the image sum taken inside the integral.
///
/// Summing `I_n(z)` over the residues `n = y_1 - x_1` and `n = -1 - y_1 - x_1`
/// modulo `2L` gives the finite kernel
/// `(1/2L) sum_{j<2L} e^{z cos(pi j / L)} [cos(pi j r_1 / L) + cos(pi j r_2 / L)]`,
/// so this route has no truncation error and shares nothing with the series
/// beyond the Bessel values of the transverse coordinates.
pub fn green_strip_periodized(
    ev: &GreenEvaluator,
    d: usize,
    width: usize,
    x: &LatticePoint,
    y: &LatticePoint,
) -> Result<GreenEstimate> {
    let dom = DomainSpec::strip(d, width)?;
    dom.check_point(x)?;
    dom.check_point(y)?;
    let diff = y.minus(x);
    let transverse: Vec<usize> = diff.coords()[1..]
        .iter()
        .map(|c| c.unsigned_abs() as usize)
        .collect();
    let max_order = transverse.iter().copied().max().unwrap_or(0);
    if max_order > ev.config().order_cap as usize {
        return Err(GreenError::OrderCap {
            order: max_order as u64,
            cap: ev.config().order_cap,
        });
    }

    let period = 2 * width;
    let r1 = diff.coords()[0];
    let r2 = 1 + x.coords()[0] + y.coords()[0];
    let modes: Vec<(f64, f64)> = (0..period)
        .map(|j| {
            let theta = std::f64::consts::PI * j as f64 / width as f64;
            let weight = (theta * r1 as f64).cos() + (theta * r2 as f64).cos();
            (1.0 - theta.cos(), weight / period as f64)
        })
        .collect();

    bessel_product_integral(d, max_order, ev.config(), ev.config().abs_tol, |z, s| {
        let kernel: f64 = modes.iter().map(|&(decay, w)| w * (-z * decay).exp()).sum();
        kernel * transverse.iter().map(|&k| s[k]).product::<f64>()
    })
}

/// The Green's function of `domain`: the image sum for `U_m`, the truncated
/// series (to `strip_tol`) for the strip.
pub fn green_domain(
    ev: &GreenEvaluator,
    domain: &DomainSpec,
    x: &LatticePoint,
    y: &LatticePoint,
    strip_tol: f64,
) -> Result<GreenEstimate> {
    match *domain {
        DomainSpec::Subspace { d, m } => green_subspace(ev, d, m, x, y),
        DomainSpec::Strip { d, width } => green_strip(ev, d, width, x, y, strip_tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::QuadratureConfig;

    fn ev() -> GreenEvaluator {
        GreenEvaluator::with_memo(QuadratureConfig::default())
    }

    fn p<const N: usize>(c: [i64; N]) -> LatticePoint {
        LatticePoint::from(c)
    }

    #[test]
    fn domain_canonicalization() {
        assert_eq!(
            DomainSpec::half_space(3).unwrap(),
            DomainSpec::subspace(3, 1).unwrap()
        );
        assert_eq!(
            DomainSpec::orthant(4).unwrap(),
            DomainSpec::subspace(4, 4).unwrap()
        );
        assert_eq!(DomainSpec::full(3).unwrap().kind(), DomainKind::FullLattice);
        assert_eq!(DomainSpec::orthant(3).unwrap().to_string(), "orthant(d=3)");
        assert!(matches!(
            DomainSpec::strip(3, 2),
            Err(GreenError::Transience { d: 3, required: 4 })
        ));
        assert!(matches!(
            DomainSpec::strip(4, 1),
            Err(GreenError::Domain(_))
        ));
        assert!(matches!(
            DomainSpec::subspace(3, 4),
            Err(GreenError::Domain(_))
        ));
        assert!(matches!(
            DomainSpec::half_space(2),
            Err(GreenError::Transience { .. })
        ));
    }

    #[test]
    fn degrees() {
        let o = DomainSpec::orthant(3).unwrap();
        assert_eq!(o.degree(&p([0, 0, 0])), 3);
        assert_eq!(o.degree(&p([1, 0, 2])), 5);
        assert_eq!(o.degree(&p([1, 1, 1])), 6);
        let h = DomainSpec::half_space(3).unwrap();
        assert_eq!(h.degree(&p([0, 4, -2])), 5);
        let s = DomainSpec::strip(4, 2).unwrap();
        assert_eq!(s.degree(&p([0, 0, 0, 0])), 7);
        assert_eq!(s.degree(&p([1, 0, 0, 0])), 7);
    }

    #[test]
    fn reflections() {
        assert_eq!(reflect_first(&p([2, 5, -1])), p([-2, 5, -1]));
        assert_eq!(reflect_first(&p([0, 3])), p([0, 3]));
        let y = p([4, -3, 7]);
        assert_eq!(reflect_first(&reflect_first(&y)), y);

        let v = ReflectionSign::new(vec![true, false], 1).unwrap();
        assert_eq!(reflect_signed(&p([3, 2]), &v), p([-4, 2]));
        assert_eq!(reflect_signed(&y, &ReflectionSign::identity(3)), y);
        let both = ReflectionSign::new(vec![true, true], 2).unwrap();
        assert_eq!(reflect_signed(&p([0, 0]), &both), p([-1, -1]));
        assert!(ReflectionSign::new(vec![false, true], 1).is_err());
    }

    #[test]
    fn sign_patterns_count_as_binary_counter() {
        let all: Vec<_> = ReflectionSign::all(3, 2).collect();
        assert_eq!(all.len(), 4);
        assert_eq!(all[1].flips(), &[true, false, false]);
        assert_eq!(all[2].flips(), &[false, true, false]);
        assert!(all.iter().all(|v| !v.flips()[2]));
    }

    #[test]
    fn strip_images_for_width_two() {
        let y = p([0, 1, 0, 0]);
        for k in -4..=4 {
            let a = strip_image(2, &y, k);
            let expect = if k % 2 == 0 { 2 * k } else { 2 * k + 1 };
            assert_eq!(a.coords()[0], expect, "k = {k}");
            assert_eq!(&a.coords()[1..], &[1, 0, 0]);
        }
    }

    #[test]
    fn out_of_domain_points_rejected() {
        let e = ev();
        assert!(matches!(
            green_half(&e, 3, &p([-1, 0, 0]), &p([0, 0, 0])),
            Err(GreenError::Domain(_))
        ));
        assert!(matches!(
            green_subspace(&e, 3, 2, &p([0, -1, 0]), &p([0, 0, 0])),
            Err(GreenError::Domain(_))
        ));
        assert!(matches!(
            green_strip(&e, 4, 2, &p([2, 0, 0, 0]), &p([0, 0, 0, 0]), 1e-3),
            Err(GreenError::Domain(_))
        ));
        assert!(matches!(
            green_strip(&e, 3, 2, &p([0, 0, 0]), &p([0, 0, 0]), 1e-3),
            Err(GreenError::Transience { .. })
        ));
    }

    #[test]
    fn killed_green_vanishes_on_the_killing_plane() {
        let e = ev();
        let v = green_half_killed(&e, 3, &p([2, 1, 0]), &p([0, 3, 1])).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn subspace_zero_and_one_reduce_to_known_formulas() {
        let e = ev();
        let x = p([1, 2, -1]);
        let y = p([0, -1, 3]);
        let full = e.between(3, &x, &y).unwrap();
        let g0 = green_subspace(&e, 3, 0, &x, &y).unwrap();
        assert_eq!(g0.value, full.value);
        let half = green_half(&e, 3, &x, &y).unwrap();
        let g1 = green_subspace(&e, 3, 1, &x, &y).unwrap();
        assert!((half.value - g1.value).abs() <= 1e-12);
    }

    #[test]
    fn origin_diagonal_paths_agree() {
        let e = ev();
        let od = green_origin_diag(&e, 3, 3).unwrap();
        assert!(od.discrepancy() <= 2e-10);
        let od0 = green_origin_diag(&e, 3, 0).unwrap();
        let g = e.origin(3, &LatticePoint::origin(3)).unwrap();
        assert!((od0.integral.value - g.value).abs() < 1e-11);
        assert!((od0.binomial.value - g.value).abs() < 1e-11);
    }

    #[test]
    fn strip_tolerance_beyond_order_cap_is_a_convergence_error() {
        let e = ev();
        let o = LatticePoint::origin(4);
        match green_strip(&e, 4, 2, &o, &o, 1e-9) {
            Err(GreenError::Convergence { estimate, .. }) => assert!(estimate > 0.1),
            other => panic!("expected convergence error, got {other:?}"),
        }
    }
}
