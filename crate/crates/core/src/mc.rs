//! Monte Carlo estimates of Green's functions from visit counts,
//! `G(x, y) = E_x[#{m >= 0 : S_m = y}] / pi(y)`.
//!
//! Walk `i` draws from ChaCha8 stream `i` under the configured seed, so
//! results do not depend on scheduling. Walks are grouped into contiguous
//! batches; the standard error comes from the spread of batch means and all
//! sums are over integers, which makes repeated runs bit-identical.
//!
//! Walks on infinite graphs are stopped at a fixed horizon `T`. The visits
//! in `(3T/4, T]` estimate the missing tail: for a return rate decaying like
//! `t^-a`, the tail beyond `T` is `1 / ((3/4)^(1-a) - 1)` times the window.
//!
//! While the walk is too far from both `y` and every constraint to feel
//! either, its moves are only tallied and the position is updated once at
//! the end of the stretch.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::network::{build_truncated, reflect_fold, Construction, HalfVertex, WeightedGraph};
use crate::reflection::DomainSpec;
use crate::{GreenError, LatticePoint, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub n_walks: u64,
    pub horizon: u64,
    pub seed: u64,
    pub batches: u32,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            n_walks: 100_000,
            horizon: 10_000,
            seed: 0x5eed,
            batches: 100,
        }
    }
}

impl WalkConfig {
    pub fn new(n_walks: u64, horizon: u64, seed: u64) -> Self {
        WalkConfig {
            n_walks,
            horizon,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_walks == 0 {
            return Err(GreenError::Config("at least one walk is required".into()));
        }
        if self.horizon == 0 {
            return Err(GreenError::Config("horizon must be at least 1".into()));
        }
        if self.batches < 10 {
            return Err(GreenError::Config(format!(
                "at least 10 batches are needed for a standard error, got {}",
                self.batches
            )));
        }
        if u64::from(self.batches) > self.n_walks {
            return Err(GreenError::Config(format!(
                "{} batches need at least as many walks, got {}",
                self.batches, self.n_walks
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Bound on the visits missed after the horizon, in Green's function
    /// units. Infinite when it cannot be bounded (a killed walk still alive
    /// at the horizon).
    pub horizon_bias_bound: f64,
    pub n_walks: u64,
    pub horizon: u64,
}

impl McEstimate {
    /// `3 stderr + horizon_bias_bound`.
    pub fn tolerance(&self) -> f64 {
        3.0 * self.stderr + self.horizon_bias_bound
    }

    pub fn agrees_with(&self, value: f64) -> bool {
        (self.mean - value).abs() <= self.tolerance()
    }

    /// Agreement of two independent estimates within three combined standard
    /// errors plus both bias bounds.
    pub fn agrees_with_estimate(&self, other: &McEstimate) -> bool {
        let se = self.stderr.hypot(other.stderr);
        (self.mean - other.mean).abs()
            <= 3.0 * se + self.horizon_bias_bound + other.horizon_bias_bound
    }
}

/// A random walk on a subgraph of `Z^d` with unit conductances, or the
/// walk `(|S^1|, S^2, ..., S^d)` of a simple walk on `Z^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WalkModel {
    Lattice(DomainSpec),
    /// Equivalent to the walk on the half-lattice with conductance 1/2 on
    /// bonds inside the face `x_1 = 0`.
    ReflectedHalfSpace {
        d: usize,
    },
}

impl WalkModel {
    pub fn dim(&self) -> usize {
        match self {
            WalkModel::Lattice(dom) => dom.dim(),
            WalkModel::ReflectedHalfSpace { d } => *d,
        }
    }

    fn domain(&self) -> Result<DomainSpec> {
        match self {
            WalkModel::Lattice(dom) => Ok(*dom),
            WalkModel::ReflectedHalfSpace { d } => DomainSpec::half_space(*d),
        }
    }

    pub fn check_point(&self, p: &LatticePoint) -> Result<()> {
        self.domain()?.check_point(p)
    }

    /// `pi(y)` of the conductance model.
    pub fn pi(&self, y: &LatticePoint) -> f64 {
        match self {
            WalkModel::Lattice(dom) => dom.degree(y) as f64,
            WalkModel::ReflectedHalfSpace { d } => {
                if y.coords()[0] == 0 {
                    *d as f64
                } else {
                    2.0 * *d as f64
                }
            }
        }
    }

    fn rule(&self) -> Rule {
        let d = self.dim();
        let mut rule = Rule {
            lo: vec![i64::MIN; d],
            hi: vec![i64::MAX; d],
            reflect_first: false,
            choices: 2 * d as u64,
            cost: 64 - (2 * d as u64 - 1).leading_zeros(),
        };
        match *self {
            WalkModel::Lattice(DomainSpec::Subspace { m, .. }) => rule.lo[..m].fill(0),
            WalkModel::Lattice(DomainSpec::Strip { width, .. }) => {
                rule.lo[0] = 0;
                rule.hi[0] = width as i64 - 1;
            }
            WalkModel::ReflectedHalfSpace { .. } => rule.reflect_first = true,
        }
        rule
    }

    /// One step from `x`.
    pub fn step<R: RngCore>(&self, x: &LatticePoint, rng: &mut R) -> Result<LatticePoint> {
        self.check_point(x)?;
        let rule = self.rule();
        let mut pos = x.coords().to_vec();
        loop {
            let k = ((u128::from(rng.next_u64()) * u128::from(rule.choices)) >> 64) as usize;
            if rule.try_move(&mut pos, k).is_some() {
                return Ok(LatticePoint::new(pos));
            }
        }
    }
}

/// One step of the simple walk on `domain`: uniform over in-domain
/// neighbours.
pub fn step<R: RngCore>(
    domain: &DomainSpec,
    x: &LatticePoint,
    rng: &mut R,
) -> Result<LatticePoint> {
    WalkModel::Lattice(*domain).step(x, rng)
}

const MAX_DIM: usize = 32;

/// Shortest run of steps worth replacing by one sampled displacement.
const JUMP_MIN: i64 = 16;

struct Rule {
    lo: Vec<i64>,
    hi: Vec<i64>,
    reflect_first: bool,
    choices: u64,
    cost: u32,
}

impl Rule {
    /// Applies move `k` (axis `k / 2`, sign from `k % 2`) if allowed and
    /// returns `(axis, old, new)`.
    #[inline(always)]
    fn try_move(&self, pos: &mut [i64], k: usize) -> Option<(usize, i64, i64)> {
        let axis = k >> 1;
        let old = pos[axis];
        let mut new = if k & 1 == 0 { old + 1 } else { old - 1 };
        if self.reflect_first && axis == 0 {
            new = new.abs();
        } else if new < self.lo[axis] || new > self.hi[axis] {
            return None;
        }
        pos[axis] = new;
        Some((axis, old, new))
    }

    fn bounded(&self) -> bool {
        self.lo.iter().any(|&l| l != i64::MIN) || self.hi.iter().any(|&h| h != i64::MAX)
    }

    /// Distance from `pos[i]` to the nearest wall of axis `i`.
    #[inline(always)]
    fn wall_room(&self, pos: &[i64], i: usize) -> i64 {
        let p = pos[i];
        let mut room = i64::MAX;
        if self.reflect_first && i == 0 {
            room = p;
        }
        if self.lo[i] != i64::MIN {
            room = room.min(p - self.lo[i]);
        }
        if self.hi[i] != i64::MAX {
            room = room.min(self.hi[i] - p);
        }
        room
    }

    /// Picks the axes far from every wall and the number of steps during
    /// which those axes cannot touch a wall and the walk cannot reach
    /// `ys`. Returns `(steps, mask of free axes)`.
    fn plan_jump(&self, pos: &[i64], ys: &[i64], remaining: i64) -> (i64, u64) {
        let mut mask = 0u64;
        let mut wall = i64::MAX;
        let mut dist = 0;
        for i in 0..pos.len() {
            let w = self.wall_room(pos, i);
            if w >= JUMP_MIN {
                mask |= 1 << i;
                wall = wall.min(w);
                dist += (pos[i] - ys[i]).abs();
            }
        }
        ((dist - 1).min(wall).min(remaining), mask)
    }

    /// Advances `n` steps at once. Moves along axes in `free` are only
    /// counted; the others are applied one by one with the usual rules.
    /// The draws consumed match those of `n` single steps.
    fn jump(&self, pos: &mut [i64], n: u64, free: u64, draws: &mut Draws) {
        let mut counts = [0i64; 2 * MAX_DIM];
        let mut left = n;
        while left > 0 {
            let k = draws.below(self.choices, self.cost) as usize;
            if free >> (k >> 1) & 1 == 1 {
                counts[k] += 1;
                left -= 1;
            } else if self.try_move(pos, k).is_some() {
                left -= 1;
            }
        }
        for (i, p) in pos.iter_mut().enumerate() {
            *p += counts[2 * i] - counts[2 * i + 1];
        }
    }
}

/// Several uniform draws per 64-bit word: each draw takes the high part of
/// `word * n` and keeps the low part for the next one, refilling once fewer
/// than 40 unused bits would remain.
struct Draws {
    rng: ChaCha8Rng,
    word: u64,
    bits: u32,
}

impl Draws {
    fn new(rng: ChaCha8Rng) -> Self {
        Draws {
            rng,
            word: 0,
            bits: 0,
        }
    }

    #[inline(always)]
    fn below(&mut self, n: u64, cost: u32) -> u64 {
        if self.bits < 40 + cost {
            self.word = self.rng.next_u64();
            self.bits = 64;
        }
        let prod = u128::from(self.word) * u128::from(n);
        self.word = prod as u64;
        self.bits -= cost;
        (prod >> 64) as u64
    }

    #[inline(always)]
    fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

fn walk_rng(base: &ChaCha8Rng, walk: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(walk);
    rng.set_word_pos(0);
    rng
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    walks: u64,
    visits: u64,
    window: u64,
    survivors: u64,
}

fn run_batches<F>(cfg: &WalkConfig, walk: F) -> Vec<Tally>
where
    F: Fn(&mut Draws) -> Tally + Sync,
{
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let b = u64::from(cfg.batches);
    (0..b)
        .into_par_iter()
        .map(|k| {
            let (start, end) = (k * cfg.n_walks / b, (k + 1) * cfg.n_walks / b);
            let mut acc = Tally::default();
            for i in start..end {
                let t = walk(&mut Draws::new(walk_rng(&base, i)));
                acc.walks += 1;
                acc.visits += t.visits;
                acc.window += t.window;
                acc.survivors += t.survivors;
            }
            acc
        })
        .collect()
}

/// Mean and standard error of the per-walk means, from batch means.
fn batch_stats(tallies: &[Tally], pick: impl Fn(&Tally) -> u64) -> (f64, f64) {
    let total: u64 = tallies.iter().map(&pick).sum();
    let walks: u64 = tallies.iter().map(|t| t.walks).sum();
    let mean = total as f64 / walks as f64;
    let b = tallies.len() as f64;
    let ss: f64 = tallies
        .iter()
        .map(|t| (pick(t) as f64 / t.walks as f64 - mean).powi(2))
        .sum();
    (mean, (ss / (b * (b - 1.0))).sqrt())
}

fn window_start(horizon: u64) -> u64 {
    horizon - horizon / 4
}

/// One walk of `horizon` steps from `xs`, counting visits to `ys`.
/// `REFLECT` and `BOUNDED` select the move rule at compile time.
fn lattice_walk<const REFLECT: bool, const BOUNDED: bool>(
    rule: &Rule,
    xs: &[i64],
    ys: &[i64],
    horizon: u64,
    draws: &mut Draws,
) -> Tally {
    let from = window_start(horizon);
    let mut pos = xs.to_vec();
    let mut dist: i64 = xs.iter().zip(ys).map(|(a, b)| (a - b).abs()).sum();
    let mut t = Tally {
        visits: u64::from(dist == 0),
        ..Default::default()
    };
    let mut step = 0;
    // steps before a jump can possibly become worthwhile again
    let mut wait = 0;
    while step < horizon {
        if wait == 0 {
            let (room, free) = rule.plan_jump(&pos, ys, (horizon - step) as i64);
            if room >= JUMP_MIN {
                rule.jump(&mut pos, room as u64, free, draws);
                dist = pos.iter().zip(ys).map(|(a, b)| (a - b).abs()).sum();
                step += room as u64;
                continue;
            }
            wait = (JUMP_MIN - room.max(0)).min(JUMP_MIN);
        }
        wait -= 1;
        let (axis, old, new) = loop {
            let k = draws.below(rule.choices, rule.cost) as usize;
            let axis = k >> 1;
            let old = pos[axis];
            let mut new = old + 1 - 2 * (k & 1) as i64;
            if REFLECT && axis == 0 {
                new = new.abs();
            } else if BOUNDED && (new < rule.lo[axis] || new > rule.hi[axis]) {
                continue;
            }
            pos[axis] = new;
            break (axis, old, new);
        };
        step += 1;
        dist += (new - ys[axis]).abs() - (old - ys[axis]).abs();
        if dist == 0 {
            t.visits += 1;
            t.window += u64::from(step > from);
        }
    }
    t
}

/// Ratio of the tail beyond `T` to the window `(3T/4, T]` for a rate `t^-a`.
fn tail_ratio(a: f64) -> f64 {
    1.0 / (0.75f64.powf(1.0 - a) - 1.0)
}

/// Estimates `G(x, y)` on `domain` by simulating the walk from `x`.
pub fn estimate_green(
    domain: &DomainSpec,
    x: &LatticePoint,
    y: &LatticePoint,
    cfg: &WalkConfig,
) -> Result<McEstimate> {
    estimate_walk(&WalkModel::Lattice(*domain), x, y, cfg)
}

/// [`estimate_green`] for any [`WalkModel`].
pub fn estimate_walk(
    model: &WalkModel,
    x: &LatticePoint,
    y: &LatticePoint,
    cfg: &WalkConfig,
) -> Result<McEstimate> {
    cfg.validate()?;
    let domain = model.domain()?;
    model.check_point(x)?;
    model.check_point(y)?;
    if model.dim() > MAX_DIM {
        return Err(GreenError::Config(format!(
            "Monte Carlo walks support d <= {MAX_DIM}, got {}",
            model.dim()
        )));
    }
    let rule = model.rule();
    let (xs, ys) = (x.coords(), y.coords());
    let horizon = cfg.horizon;

    let tallies = match (rule.reflect_first, rule.bounded()) {
        (true, _) => run_batches(cfg, |draws| {
            lattice_walk::<true, false>(&rule, xs, ys, horizon, draws)
        }),
        (false, true) => run_batches(cfg, |draws| {
            lattice_walk::<false, true>(&rule, xs, ys, horizon, draws)
        }),
        (false, false) => run_batches(cfg, |draws| {
            lattice_walk::<false, false>(&rule, xs, ys, horizon, draws)
        }),
    };

    let pi = model.pi(y);
    let (visits, stderr) = batch_stats(&tallies, |t| t.visits);
    let (window, window_se) = batch_stats(&tallies, |t| t.window);
    let a = domain.effective_dimension() as f64 / 2.0;
    Ok(McEstimate {
        mean: visits / pi,
        stderr: stderr / pi,
        horizon_bias_bound: tail_ratio(a) * (window + 3.0 * window_se) / pi,
        n_walks: cfg.n_walks,
        horizon,
    })
}

/// Transition tables of a finite graph for fast sampling.
struct GraphChain {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    cumulative: Vec<f64>,
    pi: Vec<f64>,
    absorbing: Vec<bool>,
}

impl GraphChain {
    fn new(g: &WeightedGraph) -> Self {
        let mut chain = GraphChain {
            offsets: vec![0],
            targets: Vec::new(),
            cumulative: Vec::new(),
            pi: Vec::with_capacity(g.len()),
            absorbing: (0..g.len()).map(|i| g.is_boundary(i)).collect(),
        };
        for i in 0..g.len() {
            let mut acc = 0.0;
            for &(j, c) in g.neighbors(i) {
                acc += c;
                chain.targets.push(j);
                chain.cumulative.push(acc);
            }
            chain.pi.push(acc);
            chain.offsets.push(chain.targets.len());
        }
        chain
    }

    #[inline]
    fn next(&self, i: usize, draws: &mut Draws) -> usize {
        let (lo, hi) = (self.offsets[i], self.offsets[i + 1]);
        let u = draws.unit() * self.pi[i];
        let k = self.cumulative[lo..hi]
            .iter()
            .position(|&c| u < c)
            .unwrap_or(hi - lo - 1);
        self.targets[lo + k]
    }
}

/// Estimates the killed Green's function of a truncated folding
/// construction (see [`build_truncated`]) by simulation.
///
/// For `Q` the visits to every fold preimage of `y` are counted and divided
/// by `pi(y)` in the folded graph, which estimates `G_{H'}(x, y)` when the
/// folded `Q` walk has the law of the `H'` walk.
pub fn estimate_green_folded(
    domain: &DomainSpec,
    n: usize,
    x: &LatticePoint,
    y: &LatticePoint,
    construction: Construction,
    cfg: &WalkConfig,
) -> Result<McEstimate> {
    cfg.validate()?;
    let graph = build_truncated(domain, n, construction)?;
    let interior = |p: &LatticePoint| -> Result<usize> {
        graph
            .index_of(&HalfVertex::from_lattice(p))
            .filter(|&i| !graph.is_boundary(i))
            .ok_or_else(|| {
                GreenError::domain(format!(
                    "{p} is not an interior vertex of the {construction} graph"
                ))
            })
    };
    let start = interior(x)?;
    let yv = HalfVertex::from_lattice(y);
    let (targets, pi) = if construction == Construction::Q {
        let folded = build_truncated(domain, n, Construction::Folded)?;
        let pi = folded
            .index_of(&yv)
            .filter(|&i| !folded.is_boundary(i))
            .map(|i| folded.pi(i))
            .ok_or_else(|| GreenError::domain(format!("{y} is not in the folded graph")))?;
        let mask: Vec<bool> = graph
            .vertices()
            .iter()
            .map(|v| reflect_fold(v, domain) == yv)
            .collect();
        (mask, pi)
    } else {
        let j = interior(y)?;
        let mut mask = vec![false; graph.len()];
        mask[j] = true;
        (mask, graph.pi(j))
    };

    let chain = GraphChain::new(&graph);
    let horizon = cfg.horizon;
    let tallies = run_batches(cfg, |draws| {
        let mut pos = start;
        let mut t = Tally {
            visits: u64::from(targets[pos]),
            survivors: 1,
            ..Default::default()
        };
        for _ in 0..horizon {
            pos = chain.next(pos, draws);
            if chain.absorbing[pos] {
                t.survivors = 0;
                break;
            }
            t.visits += u64::from(targets[pos]);
        }
        t
    });
    let (visits, stderr) = batch_stats(&tallies, |t| t.visits);
    let survivors: u64 = tallies.iter().map(|t| t.survivors).sum();
    Ok(McEstimate {
        mean: visits / pi,
        stderr: stderr / pi,
        horizon_bias_bound: if survivors == 0 { 0.0 } else { f64::INFINITY },
        n_walks: cfg.n_walks,
        horizon,
    })
}
