//! Named groups of cross-checks, each comparing two independent routes to
//! the same quantity.

use std::fmt;
use std::ops::RangeInclusive;

use crate::mc::{estimate_green, WalkConfig};
use crate::network::{FiniteBox, FoldComparison, SplitComparison};
use crate::reflection::{
    green_domain, green_half, green_origin_diag, green_orthant, green_subspace, DomainSpec,
};
use crate::{GreenEvaluator, LatticePoint, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

fn cube(d: usize, lo: i64, hi: i64) -> Vec<LatticePoint> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (lo..=hi).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out.into_iter().map(LatticePoint::new).collect()
}

/// `G_0 = g`, `G_1 = G_H` and `G_O = G_d` bit for bit on `{0..2}^3`, and the
/// integral and binomial routes to `G_m(0, 0)` for `3 <= d <= 6`.
pub fn identities(ev: &GreenEvaluator) -> Result<Vec<Check>> {
    let pts = cube(3, 0, 2);
    let (mut full_same, mut half_same, mut orthant_same) = (true, true, true);
    for x in &pts {
        for y in &pts {
            full_same &= green_subspace(ev, 3, 0, x, y)? == ev.between(3, x, y)?;
            half_same &= green_subspace(ev, 3, 1, x, y)? == green_half(ev, 3, x, y)?;
            orthant_same &= green_subspace(ev, 3, 3, x, y)? == green_orthant(ev, 3, x, y)?;
        }
    }
    let pairs = format!("{} pairs in {{0..2}}^3", pts.len() * pts.len());
    let mut out = vec![
        Check::new("G_0 = g", full_same, pairs.clone()),
        Check::new("G_1 = G_H", half_same, pairs.clone()),
        Check::new("G_O = G_3", orthant_same, pairs),
    ];

    let mut worst_gap: f64 = 0.0;
    let mut worst_bound: f64 = 0.0;
    let mut ok = true;
    for d in 3..=6 {
        for m in 0..=d {
            let diag = match green_origin_diag(ev, d, m) {
                Ok(diag) => diag,
                Err(e) => {
                    out.push(Check::new(
                        format!("G_{m}(0,0) d={d}"),
                        false,
                        e.to_string(),
                    ));
                    ok = false;
                    continue;
                }
            };
            ok &= diag.discrepancy() <= diag.combined_bound() && diag.combined_bound() <= 2e-10;
            worst_gap = worst_gap.max(diag.discrepancy());
            worst_bound = worst_bound.max(diag.combined_bound());
        }
    }
    out.push(Check::new(
        "G_m(0,0) integral = binomial sum, 3 <= d <= 6",
        ok,
        format!("max gap {worst_gap:.2e}, max combined bound {worst_bound:.2e} (limit 2e-10)"),
    ));
    Ok(out)
}

/// Finite-box image identity (`d = 3`, `N <= 2`), series reduction of `Q`
/// and the fold pushforward (`d = 3`, `N <= max_n`).
pub fn network(max_n: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in 1..=2 {
        let gap = FiniteBox::new(3, n)?.max_discrepancy()?;
        out.push(Check::new(
            format!("finite box identity d=3 N={n}"),
            gap <= 1e-10,
            format!("max gap {gap:.2e}"),
        ));
    }
    for m in 1..=3 {
        let dom = DomainSpec::subspace(3, m)?;
        for n in 1..=max_n {
            let split = SplitComparison::new(&dom, n)?;
            let gap = split.max_discrepancy.max(split.max_discrepancy_reduced);
            out.push(Check::new(
                format!("Q reduces to lattice {dom} N={n}"),
                split.reduces_to_lattice && gap <= 1e-12,
                format!(
                    "same graph: {}, max gap {gap:.2e}",
                    split.reduces_to_lattice
                ),
            ));
            let gap = FoldComparison::new(&dom, n)?.max_discrepancy();
            out.push(Check::new(
                format!("H' = fold of Q {dom} N={n}"),
                gap <= 1e-10,
                format!("max gap {gap:.2e}"),
            ));
        }
    }
    Ok(out)
}

/// `2d G_O(0, 0)` strictly decreasing in `d`, each gap above ten times the
/// combined error bound.
pub fn scan_d(ev: &GreenEvaluator, dims: RangeInclusive<usize>) -> Result<Vec<Check>> {
    let mut values = Vec::new();
    for d in dims {
        let diag = green_origin_diag(ev, d, d)?;
        let scale = 2.0 * d as f64;
        values.push((
            d,
            scale * diag.integral.value,
            scale * diag.combined_bound(),
        ));
    }
    let mut out = Vec::new();
    for w in values.windows(2) {
        let ((d0, v0, e0), (d1, v1, e1)) = (w[0], w[1]);
        let gap = v0 - v1;
        out.push(Check::new(
            format!("2d G_O(0,0): d={d0} > d={d1}"),
            gap > 10.0 * (e0 + e1),
            format!(
                "{v0:.12} - {v1:.12} = {gap:.3e} (margin {:.1e})",
                10.0 * (e0 + e1)
            ),
        ));
    }
    Ok(out)
}

/// Domains and diagonal points compared against simulation.
pub fn mc_cases() -> Result<Vec<(DomainSpec, LatticePoint)>> {
    Ok(vec![
        (DomainSpec::full(3)?, LatticePoint::origin(3)),
        (DomainSpec::half_space(3)?, LatticePoint::origin(3)),
        (DomainSpec::half_space(3)?, LatticePoint::from([2, 1, 0])),
        (DomainSpec::orthant(3)?, LatticePoint::origin(3)),
        (DomainSpec::strip(4, 2)?, LatticePoint::origin(4)),
    ])
}

/// Simulated `G(x, x)` against the closed form for every [`mc_cases`] entry.
/// Passes when `|mean - value| <= 3 stderr + horizon bias + error bound of
/// the closed form`.
pub fn monte_carlo(ev: &GreenEvaluator, cfg: &WalkConfig, strip_tol: f64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (dom, x) in mc_cases()? {
        let exact = green_domain(ev, &dom, &x, &x, strip_tol)?;
        let est = estimate_green(&dom, &x, &x, cfg)?;
        let allowed = est.tolerance() + exact.error_bound;
        let gap = (est.mean - exact.value).abs();
        out.push(Check::new(
            format!("MC {dom} x=y={x}"),
            gap <= allowed,
            format!(
                "mc {:.6} +- {:.1e} (bias <= {:.1e}), closed form {:.6} +- {:.1e}, gap {gap:.1e} <= {allowed:.1e}",
                est.mean, est.stderr, est.horizon_bias_bound, exact.value, exact.error_bound
            ),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_enumerates_all_points() {
        let c = cube(3, -1, 1);
        assert_eq!(c.len(), 27);
        assert_eq!(c[0], LatticePoint::from([-1, -1, -1]));
        assert_eq!(c[26], LatticePoint::from([1, 1, 1]));
    }

    #[test]
    fn display_marks_outcome() {
        assert_eq!(Check::new("a", true, "b").to_string(), "[PASS] a: b");
        assert_eq!(Check::new("a", false, "b").to_string(), "[FAIL] a: b");
    }
}
