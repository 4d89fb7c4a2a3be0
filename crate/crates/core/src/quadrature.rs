//! Globally adaptive Gauss-Kronrod (7/15) quadrature on finite panels.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

// Kronrod abscissae on [-1, 1] (positive half); the odd entries are the
// 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Rule output on one panel.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RuleResult {
    pub value: f64,
    pub error: f64,
}

/// Applies the 15-point Kronrod rule on `[a, b]`; the error is `|K15 - G7|`
/// raised to a roundoff floor.
pub(crate) fn gauss_kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> RuleResult {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs_sum = WGK[7] * fc.abs();
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += w * (f1 + f2);
        abs_sum += w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let value = kronrod * half;
    let raw = ((kronrod - gauss) * half).abs();
    let floor = 50.0 * f64::EPSILON * abs_sum * half.abs();
    RuleResult {
        value,
        error: raw.max(floor),
    }
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    depth: u32,
    rule: RuleResult,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // largest error first; ties broken by position for determinism
    fn cmp(&self, other: &Self) -> Ordering {
        self.rule
            .error
            .total_cmp(&other.rule.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Integral {
    pub value: f64,
    pub error: f64,
}

const MAX_PANELS: usize = 20_000;

/// Integrates `f` over the union of the given consecutive panels, bisecting
/// the worst panel until the summed error estimate is at most `abs_tol`.
/// Panels at `max_depth` are frozen.
pub(crate) fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    abs_tol: f64,
    max_depth: u32,
) -> Integral {
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    for w in breaks.windows(2) {
        let rule = gauss_kronrod(&mut f, w[0], w[1]);
        heap.push(Panel {
            a: w[0],
            b: w[1],
            depth: 0,
            rule,
        });
    }

    let mut total_error: f64 = heap.iter().map(|p| p.rule.error).sum();
    while total_error > abs_tol && heap.len() + frozen.len() < MAX_PANELS {
        let Some(worst) = heap.pop() else { break };
        if worst.depth >= max_depth {
            frozen.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = gauss_kronrod(&mut f, worst.a, mid);
        let right = gauss_kronrod(&mut f, mid, worst.b);
        total_error += left.error + right.error - worst.rule.error;
        for (a, b, rule) in [(worst.a, mid, left), (mid, worst.b, right)] {
            heap.push(Panel {
                a,
                b,
                depth: worst.depth + 1,
                rule,
            });
        }
    }

    // Re-sum from scratch in position order so the result does not depend on
    // the heap's internal layout or on accumulated drift.
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: f64 = panels.iter().map(|p| p.rule.value).sum();
    let error: f64 = panels.iter().map(|p| p.rule.error).sum();
    Integral { value, error }
}
