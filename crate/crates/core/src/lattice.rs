//! The Green's function `g(x, y)` of the simple random walk on `Z^d`, `d >= 3`.
//!
//! `g` is evaluated from the Bessel-product representation
//!
//! ```text
//! 2d g(0, x) = int_0^inf e^-t prod_i I_{x_i}(t/d) dt
//!            = int_0^inf prod_i [e^{-t/d} I_{|x_i|}(t/d)] dt
//! ```
//!
//! The second form only involves scaled Bessel values, and its integrand
//! decays like `(d / 2 pi t)^{d/2}`. `[0, split]` is integrated directly; the
//! tail is mapped to `(0, 1]` with `t = split / u^2`, which turns the algebraic
//! decay into an integrand that is smooth at `u = 0` for every `d >= 3`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::bessel::fill_scaled;
use crate::quadrature;
use crate::{GreenError, Result};

/// A point of `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticePoint(coords)
    }

    pub fn origin(d: usize) -> Self {
        LatticePoint(vec![0; d])
    }

    /// The `i`-th canonical basis vector (0-based).
    pub fn unit(d: usize, i: usize) -> Self {
        let mut c = vec![0; d];
        c[i] = 1;
        LatticePoint(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn coords_mut(&mut self) -> &mut [i64] {
        &mut self.0
    }

    pub fn into_coords(self) -> Vec<i64> {
        self.0
    }

    /// `self - other`, componentwise.
    pub fn minus(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn plus(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Largest `|x_i|`.
    pub fn max_abs(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|&c| (c * c) as f64).sum::<f64>().sqrt()
    }

    /// Product order: `|x_i| >= |y_i|` for every `i`.
    pub fn dominates(&self, other: &LatticePoint) -> bool {
        self.dim() == other.dim()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| a.unsigned_abs() >= b.unsigned_abs())
    }

    /// Nearest neighbours in `Z^d`, in the order `+e_1, -e_1, +e_2, ...`.
    pub fn neighbors(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        (0..2 * self.dim()).map(move |k| {
            let mut c = self.0.clone();
            c[k / 2] += if k % 2 == 0 { 1 } else { -1 };
            LatticePoint(c)
        })
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        LatticePoint(v)
    }
}

impl<const N: usize> From<[i64; N]> for LatticePoint {
    fn from(v: [i64; N]) -> Self {
        LatticePoint(v.to_vec())
    }
}

impl fmt::Display for LatticePoint {
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

/// Parses comma-separated integers, e.g. `"1,-2,0"`.
impl FromStr for LatticePoint {
    type Err = GreenError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(GreenError::domain("empty coordinate list"));
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|e| GreenError::domain(format!("bad coordinate {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(LatticePoint)
    }
}

/// Controls the Bessel-product quadrature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Absolute tolerance on each returned Green's function value.
    pub abs_tol: f64,
    /// Where the direct panel ends and the tail substitution starts;
    /// `None` means `30 d`.
    pub split_point: Option<f64>,
    /// Maximum bisection depth of any panel.
    pub max_depth: u32,
    /// Largest Bessel order (largest `|x_i|`) accepted.
    pub order_cap: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-11,
            split_point: None,
            max_depth: 60,
            order_cap: crate::bessel::DEFAULT_ORDER_CAP,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tol(abs_tol: f64) -> Self {
        QuadratureConfig {
            abs_tol,
            ..Default::default()
        }
    }

    pub fn split_for(&self, d: usize) -> f64 {
        self.split_point.unwrap_or(30.0 * d as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(GreenError::Config(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if let Some(s) = self.split_point {
            if !(s > 0.0 && s.is_finite()) {
                return Err(GreenError::Config(format!(
                    "split_point must be positive, got {s}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateKind {
    Quadrature,
    SeriesTruncated,
    LinearSolve,
    MonteCarlo,
}

impl fmt::Display for EstimateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimateKind::Quadrature => "quadrature",
            EstimateKind::SeriesTruncated => "series-truncated",
            EstimateKind::LinearSolve => "linear-solve",
            EstimateKind::MonteCarlo => "monte-carlo",
        })
    }
}

/// A numerical value together with a bound on its error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub kind: EstimateKind,
}

impl GreenEstimate {
    pub fn new(value: f64, error_bound: f64, kind: EstimateKind) -> Self {
        GreenEstimate {
            value,
            error_bound,
            kind,
        }
    }

    /// Sum of two estimates; bounds add (no cancellation assumed).
    pub fn plus(self, other: GreenEstimate) -> GreenEstimate {
        GreenEstimate {
            value: self.value + other.value,
            error_bound: self.error_bound + other.error_bound,
            kind: self.kind,
        }
    }

    pub fn minus(self, other: GreenEstimate) -> GreenEstimate {
        GreenEstimate {
            value: self.value - other.value,
            error_bound: self.error_bound + other.error_bound,
            kind: self.kind,
        }
    }

    pub fn scaled(self, factor: f64) -> GreenEstimate {
        GreenEstimate {
            value: self.value * factor,
            error_bound: self.error_bound * factor.abs(),
            kind: self.kind,
        }
    }

    /// Whether `|self - other|` is within the two error bounds plus `slack`.
    pub fn agrees_with(&self, other: &GreenEstimate, slack: f64) -> bool {
        (self.value - other.value).abs() <= self.error_bound + other.error_bound + slack
    }
}

pub(crate) fn require_transient(d: usize, required: usize) -> Result<()> {
    if d < required {
        Err(GreenError::Transience { d, required })
    } else {
        Ok(())
    }
}

pub(crate) fn require_dim(p: &LatticePoint, d: usize) -> Result<()> {
    if p.dim() != d {
        Err(GreenError::domain(format!(
            "point {p} has dimension {}, expected {d}",
            p.dim()
        )))
    } else {
        Ok(())
    }
}

/// `(1/2d) int_0^inf F(z, [s_0(z), s_1(z), ...]) dt` with `z = t/d`, where `s_k`
/// are the scaled Bessel values up to `max_order`.
pub(crate) fn bessel_product_integral<F>(
    d: usize,
    max_order: usize,
    cfg: &QuadratureConfig,
    tol: f64,
    mut integrand: F,
) -> Result<GreenEstimate>
where
    F: FnMut(f64, &[f64]) -> f64,
{
    cfg.validate()?;
    let two_d = 2.0 * d as f64;
    let dd = d as f64;
    let split = cfg.split_for(d);
    let mut buf = vec![0.0; max_order + 1];
    // the raw integral carries the factor 2d
    let budget = tol * two_d;

    let mut eval = |t: f64| {
        let z = t / dd;
        fill_scaled(&mut buf, z);
        integrand(z, &buf)
    };

    let head_breaks: Vec<f64> = (0..=4).map(|i| split * i as f64 / 4.0).collect();
    let head = quadrature::integrate(&mut eval, &head_breaks, 0.5 * budget, cfg.max_depth);

    let mut tail_breaks: Vec<f64> = (0..=12).rev().map(|j| 0.5f64.powi(j)).collect();
    tail_breaks.insert(0, 0.0);
    let tail = quadrature::integrate(
        |u: f64| {
            let t = split / (u * u);
            eval(t) * 2.0 * split / (u * u * u)
        },
        &tail_breaks,
        0.5 * budget,
        cfg.max_depth,
    );

    let value = (head.value + tail.value) / two_d;
    let error_bound = (head.error + tail.error) / two_d;
    if error_bound <= tol {
        Ok(GreenEstimate::new(
            value,
            error_bound,
            EstimateKind::Quadrature,
        ))
    } else {
        Err(GreenError::Convergence {
            estimate: value,
            error_bound,
            tol,
        })
    }
}

fn check_order_cap(order: u64, cfg: &QuadratureConfig) -> Result<()> {
    if order > u64::from(cfg.order_cap) {
        Err(GreenError::OrderCap {
            order,
            cap: cfg.order_cap,
        })
    } else {
        Ok(())
    }
}

fn origin_uncached(d: usize, orders: &[usize], cfg: &QuadratureConfig) -> Result<GreenEstimate> {
    let max_order = orders.iter().copied().max().unwrap_or(0);
    bessel_product_integral(d, max_order, cfg, cfg.abs_tol, |_, s| {
        orders.iter().map(|&k| s[k]).product()
    })
}

type MemoKey = (usize, Vec<usize>);

/// Evaluates `g` with a fixed [`QuadratureConfig`], optionally memoising
/// `g(0, x)` by `(d, sorted |x_i|)`.
///
/// The memo is guarded by a `RwLock`, so one evaluator can be shared across
/// threads.
#[derive(Debug, Default)]
pub struct GreenEvaluator {
    cfg: QuadratureConfig,
    memo: Option<RwLock<HashMap<MemoKey, GreenEstimate>>>,
}

impl Clone for GreenEvaluator {
    fn clone(&self) -> Self {
        GreenEvaluator {
            cfg: self.cfg.clone(),
            memo: self
                .memo
                .as_ref()
                .map(|m| RwLock::new(m.read().expect("memo lock poisoned").clone())),
        }
    }
}

impl GreenEvaluator {
    pub fn new(cfg: QuadratureConfig) -> Self {
        GreenEvaluator { cfg, memo: None }
    }

    pub fn with_memo(cfg: QuadratureConfig) -> Self {
        GreenEvaluator {
            cfg,
            memo: Some(RwLock::new(HashMap::new())),
        }
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.cfg
    }

    /// Number of memoised values (0 when the memo is disabled).
    pub fn memo_len(&self) -> usize {
        self.memo
            .as_ref()
            .map_or(0, |m| m.read().expect("memo lock poisoned").len())
    }

    /// `g(0, x)`.
    pub fn origin(&self, d: usize, x: &LatticePoint) -> Result<GreenEstimate> {
        require_transient(d, 3)?;
        require_dim(x, d)?;
        check_order_cap(x.max_abs(), &self.cfg)?;

        let mut orders: Vec<usize> = x
            .coords()
            .iter()
            .map(|c| c.unsigned_abs() as usize)
            .collect();
        orders.sort_unstable();
        let Some(memo) = &self.memo else {
            return origin_uncached(d, &orders, &self.cfg);
        };
        let key = (d, orders);
        if let Some(hit) = memo.read().expect("memo lock poisoned").get(&key) {
            return Ok(*hit);
        }
        let est = origin_uncached(d, &key.1, &self.cfg)?;
        memo.write().expect("memo lock poisoned").insert(key, est);
        Ok(est)
    }

    /// `g(x, y) = g(0, x - y)`.
    pub fn between(&self, d: usize, x: &LatticePoint, y: &LatticePoint) -> Result<GreenEstimate> {
        require_transient(d, 3)?;
        require_dim(x, d)?;
        require_dim(y, d)?;
        self.origin(d, &x.minus(y))
    }

    /// `g(0, gamma_j)` with `gamma_j = e_1 + ... + e_j`, from the integrand
    /// `s_1^j s_0^(m-j) s_0^(d-m)`.
    pub fn origin_gamma(&self, d: usize, m: usize, j: usize) -> Result<GreenEstimate> {
        self.origin_gamma_tol(d, m, j, self.cfg.abs_tol)
    }

    pub(crate) fn origin_gamma_tol(
        &self,
        d: usize,
        m: usize,
        j: usize,
        tol: f64,
    ) -> Result<GreenEstimate> {
        require_transient(d, 3)?;
        if !(j <= m && m <= d) {
            return Err(GreenError::domain(format!(
                "need 0 <= j <= m <= d, got j = {j}, m = {m}, d = {d}"
            )));
        }
        let (ones, zeros) = (j as i32, (d - j) as i32);
        bessel_product_integral(d, 1, &self.cfg, tol, |_, s| {
            s[1].powi(ones) * s[0].powi(zeros)
        })
    }

    /// `(1/2d) int e^-t (I_1 + I_0)^m I_0^(d-m) (t/d) dt`.
    pub(crate) fn origin_diagonal_integral(&self, d: usize, m: usize) -> Result<GreenEstimate> {
        require_transient(d, 3)?;
        if m > d {
            return Err(GreenError::domain(format!(
                "need m <= d, got m = {m}, d = {d}"
            )));
        }
        let (mm, rest) = (m as i32, (d - m) as i32);
        bessel_product_integral(d, 1, &self.cfg, self.cfg.abs_tol, |_, s| {
            (s[0] + s[1]).powi(mm) * s[0].powi(rest)
        })
    }
}

/// `g(0, x)` on `Z^d`.
pub fn green_full_origin(
    d: usize,
    x: &LatticePoint,
    cfg: &QuadratureConfig,
) -> Result<GreenEstimate> {
    GreenEvaluator::new(cfg.clone()).origin(d, x)
}

/// `g(x, y)` on `Z^d`.
pub fn green_full(
    d: usize,
    x: &LatticePoint,
    y: &LatticePoint,
    cfg: &QuadratureConfig,
) -> Result<GreenEstimate> {
    GreenEvaluator::new(cfg.clone()).between(d, x, y)
}

/// `g(0, gamma_j)` for `0 <= j <= m <= d`.
pub fn green_origin_gamma(
    d: usize,
    m: usize,
    j: usize,
    cfg: &QuadratureConfig,
) -> Result<GreenEstimate> {
    GreenEvaluator::new(cfg.clone()).origin_gamma(d, m, j)
}
