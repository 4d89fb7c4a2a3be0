//! Exponentially scaled modified Bessel functions of the first kind,
//! `e^-z I_k(z)`, for integer order `k` and real `z >= 0`.
//!
//! Only scaled values are exposed. The lattice integrands are products of
//! such values, so working in scaled form keeps every intermediate in `[0, 1]`.
//!
//! Three regimes are used:
//!
//! * `z <= 10`: the power series, scaled afterwards.
//! * large `z` with `k^2 <= 2z`: the Hankel asymptotic expansion for orders 0
//!   and 1, then forward recurrence (which is well conditioned in that range).
//! * otherwise: Miller's backward recurrence normalised with
//!   `e^-z (I_0 + 2 sum_{k>=1} I_k) = 1`.

use crate::{GreenError, Result};

/// Default largest admissible `|order|`.
pub const DEFAULT_ORDER_CAP: u32 = 256;

const SERIES_LIMIT: f64 = 10.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

/// `e^-z I_order(z)` with the default order cap.
pub fn bessel_i_scaled(order: i64, z: f64) -> Result<f64> {
    bessel_i_scaled_capped(order, z, DEFAULT_ORDER_CAP)
}

/// `e^-z I_order(z)`; negative orders are folded with `I_-k = I_k`.
pub fn bessel_i_scaled_capped(order: i64, z: f64, cap: u32) -> Result<f64> {
    let k = check_order(order, cap)?;
    check_argument(z)?;
    if z == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    if z <= SERIES_LIMIT {
        return Ok(series(k, z));
    }
    let mut buf = vec![0.0; k + 1];
    fill_large(&mut buf, z);
    Ok(buf[k])
}

/// `[e^-z I_0(z), ..., e^-z I_max_order(z)]` with the default order cap.
pub fn bessel_i_scaled_batch(max_order: u32, z: f64) -> Result<Vec<f64>> {
    bessel_i_scaled_batch_capped(max_order, z, DEFAULT_ORDER_CAP)
}

pub fn bessel_i_scaled_batch_capped(max_order: u32, z: f64, cap: u32) -> Result<Vec<f64>> {
    let k = check_order(i64::from(max_order), cap)?;
    check_argument(z)?;
    let mut out = vec![0.0; k + 1];
    fill_scaled(&mut out, z);
    Ok(out)
}

fn check_order(order: i64, cap: u32) -> Result<usize> {
    let k = order.unsigned_abs();
    if k > u64::from(cap) {
        return Err(GreenError::OrderCap { order: k, cap });
    }
    Ok(k as usize)
}

fn check_argument(z: f64) -> Result<()> {
    if !z.is_finite() || z < 0.0 {
        return Err(GreenError::domain(format!(
            "Bessel argument must be finite and nonnegative, got {z}"
        )));
    }
    Ok(())
}

/// Writes `e^-z I_k(z)` for `k = 0..out.len()` into `out`. The caller has
/// already validated `z` and the order range.
pub(crate) fn fill_scaled(out: &mut [f64], z: f64) {
    if out.is_empty() {
        return;
    }
    if z == 0.0 {
        out.fill(0.0);
        out[0] = 1.0;
    } else if z <= SERIES_LIMIT {
        for (k, v) in out.iter_mut().enumerate() {
            *v = series(k, z);
        }
    } else {
        fill_large(out, z);
    }
}

fn fill_large(out: &mut [f64], z: f64) {
    let max_order = out.len() - 1;
    let k2 = (max_order * max_order) as f64;
    if z >= ASYMPTOTIC_LIMIT && k2 <= 2.0 * z {
        out[0] = hankel(0, z);
        if max_order >= 1 {
            out[1] = hankel(1, z);
        }
        for k in 1..max_order {
            out[k + 1] = out[k - 1] - (2.0 * k as f64 / z) * out[k];
        }
    } else {
        miller(out, z);
    }
}

fn series(k: usize, z: f64) -> f64 {
    let half = 0.5 * z;
    let mut lead = 1.0;
    for i in 1..=k {
        lead *= half / i as f64;
    }
    if lead == 0.0 {
        return 0.0;
    }
    let q = half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut m = 1.0;
    loop {
        term *= q / (m * (m + k as f64));
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
        m += 1.0;
    }
    lead * sum * (-z).exp()
}

/// `e^-z I_nu(z) ~ (2 pi z)^-1/2 sum_j (-1)^j a_j(nu) / z^j`, summed until the
/// terms drop below double precision.
fn hankel(nu: usize, z: f64) -> f64 {
    let mu = 4.0 * (nu * nu) as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..200 {
        let odd = (2 * j - 1) as f64;
        let next = -term * (mu - odd * odd) / (8.0 * j as f64 * z);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * z).sqrt()
}

fn miller(out: &mut [f64], z: f64) {
    const RESCALE_AT: f64 = 1e250;
    const RESCALE_BY: f64 = 1e-250;

    let max_order = out.len() - 1;
    // Start high enough that both the requested orders and the normalising
    // sum have converged.
    let by_order = max_order + 16 + (40.0 * max_order.max(1) as f64).sqrt().ceil() as usize;
    let by_argument = (9.5 * z.sqrt()).ceil() as usize + 20;
    let start = by_order.max(by_argument);

    let mut above = 0.0; // b_{k+1}
    let mut current = 1e-280; // b_k
    let mut sum = 0.0;
    for k in (1..=start).rev() {
        if k <= max_order {
            out[k] = current;
        }
        sum += 2.0 * current;
        let below = (2.0 * k as f64 / z) * current + above;
        above = current;
        current = below;
        if current.abs() > RESCALE_AT {
            current *= RESCALE_BY;
            above *= RESCALE_BY;
            sum *= RESCALE_BY;
            for v in out.iter_mut().skip(k.min(max_order + 1)) {
                *v *= RESCALE_BY;
            }
        }
    }
    out[0] = current;
    sum += current;
    for v in out.iter_mut() {
        *v /= sum;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_i_scaled(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i_scaled(3, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_i_scaled_batch(2, 0.0).unwrap(), vec![1.0, 0.0, 0.0]);
        assert_eq!(
            bessel_i_scaled(-2, 1.7).unwrap(),
            bessel_i_scaled(2, 1.7).unwrap()
        );
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            bessel_i_scaled(0, f64::NAN),
            Err(GreenError::Domain(_))
        ));
        assert!(matches!(
            bessel_i_scaled(0, f64::INFINITY),
            Err(GreenError::Domain(_))
        ));
        assert!(matches!(
            bessel_i_scaled(1, -1.0),
            Err(GreenError::Domain(_))
        ));
        assert!(matches!(
            bessel_i_scaled(257, 1.0),
            Err(GreenError::OrderCap {
                order: 257,
                cap: 256
            })
        ));
        assert!(bessel_i_scaled(-256, 1.0).is_ok());
        assert!(bessel_i_scaled_capped(300, 1.0, 512).is_ok());
    }

    #[test]
    fn single_order_batch_matches_scalar() {
        for &z in &[0.3, 7.0, 12.0, 40.0, 3000.0] {
            assert_eq!(
                bessel_i_scaled_batch(0, z).unwrap()[0],
                bessel_i_scaled(0, z).unwrap()
            );
        }
    }

    #[test]
    fn huge_arguments_stay_finite() {
        for &z in &[1e6, 1e12, 1e20] {
            let v = bessel_i_scaled_batch(8, z).unwrap();
            let lead = 1.0 / (2.0 * std::f64::consts::PI * z).sqrt();
            for x in v {
                assert!(x > 0.0 && x.is_finite());
                assert!((x / lead - 1.0).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn miller_handles_overflow_range() {
        // z large with an order cap that forces the recurrence branch
        let v = bessel_i_scaled_batch(256, 5000.0).unwrap();
        assert!(v.iter().all(|x| x.is_finite() && *x >= 0.0));
        let total: f64 = v[0] + 2.0 * v[1..].iter().sum::<f64>();
        // orders above 256 still carry mass at this argument
        assert!(total < 1.0 && total > 0.99);
    }
}
