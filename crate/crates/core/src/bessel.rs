//! Bessel functions of the first kind J_m for integer order, and their
//! positive zeros.
//!
//! Small arguments use the ascending power series; everything else goes
//! through Miller's downward recurrence normalized by
//! `J_0 + 2 Σ J_{2k} = 1`, which stays stable for every order.

use crate::error::{Error, Result};

/// Largest order accepted by [`bessel_j_zero`].
pub const MAX_ZERO_ORDER: usize = 64;
/// Largest zero index accepted by [`bessel_j_zero`].
pub const MAX_ZERO_INDEX: usize = 128;

const SERIES_LIMIT: f64 = 4.0;
const RESCALE_AT: f64 = 1e250;

fn series(m: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for i in 1..=m {
        term *= half / i as f64;
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= -q / (k as f64 * (k + m) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || k > 200 {
            break;
        }
    }
    sum
}

/// J_0(x) .. J_{max_order}(x) for x > 0 by Miller's algorithm.
fn miller(max_order: usize, x: f64) -> Vec<f64> {
    let top = (max_order as f64).max(x);
    let mut start = (top + 20.0 + (40.0 * top).sqrt()).ceil() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let mut out = vec![0.0; max_order + 1];
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k
    let mut even_sum = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        let order = k - 1;
        if cur.abs() > RESCALE_AT {
            cur /= RESCALE_AT;
            next /= RESCALE_AT;
            even_sum /= RESCALE_AT;
            for v in out.iter_mut() {
                *v /= RESCALE_AT;
            }
        }
        if order <= max_order {
            out[order] = cur;
        }
        if order > 0 && order % 2 == 0 {
            even_sum += cur;
        }
    }
    let norm = cur + 2.0 * even_sum;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// J_m(x) for integer m ≥ 0 and real x.
pub fn bessel_j(m: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if x < 0.0 {
        let v = bessel_j(m, -x);
        return if m.is_multiple_of(2) { v } else { -v };
    }
    if x < SERIES_LIMIT {
        series(m, x)
    } else {
        miller(m, x)[m]
    }
}

/// All orders J_0(x), ..., J_{max_order}(x), x ≥ 0.
pub fn bessel_j_orders(max_order: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut v = vec![0.0; max_order + 1];
        v[0] = 1.0;
        return v;
    }
    if x < SERIES_LIMIT {
        (0..=max_order).map(|m| series(m, x)).collect()
    } else {
        miller(max_order, x)
    }
}

/// J_m(x) together with J_m'(x), x ≥ 0.
pub fn bessel_j_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let v = bessel_j_orders(m + 1, x);
    let d = if m == 0 { -v[1] } else { 0.5 * (v[m - 1] - v[m + 1]) };
    (v[m], d)
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// The first `count` positive zeros of J_m, ascending.
pub fn bessel_j_zeros(m: usize, count: usize) -> Vec<f64> {
    scan_zeros(m, count, f64::INFINITY)
}

/// All positive zeros of J_m not exceeding `limit`, ascending.
pub fn bessel_j_zeros_below(m: usize, limit: f64) -> Vec<f64> {
    scan_zeros(m, usize::MAX, limit)
}

// Consecutive zeros of J_m are more than 3 apart, so a scan with step 0.5
// starting below the first zero brackets each one exactly once.
fn scan_zeros(m: usize, count: usize, limit: f64) -> Vec<f64> {
    const STEP: f64 = 0.5;
    let mut zeros = Vec::new();
    let mut a = if m == 0 { 0.5 } else { m as f64 };
    let mut fa = bessel_j(m, a);
    while zeros.len() < count && a <= limit {
        let b = a + STEP;
        let fb = bessel_j(m, b);
        if fb == 0.0 {
            zeros.push(b);
            a = b + 1e-9;
            fa = bessel_j(m, a);
            continue;
        }
        if (fa > 0.0) != (fb > 0.0) {
            zeros.push(bisect(|x| bessel_j(m, x), a, b));
        }
        a = b;
        fa = fb;
    }
    if limit.is_finite() {
        zeros.retain(|&z| z <= limit);
    }
    zeros
}

/// The k-th positive zero j_{m,k} of J_m (k is 1-based).
pub fn bessel_j_zero(m: usize, k: usize) -> Result<f64> {
    if k == 0 || k > MAX_ZERO_INDEX || m > MAX_ZERO_ORDER {
        return Err(Error::Range(format!(
            "bessel zero (m = {m}, k = {k}) outside m <= {MAX_ZERO_ORDER}, 1 <= k <= {MAX_ZERO_INDEX}"
        )));
    }
    Ok(bessel_j_zeros(m, k)[k - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// McMahon's large-zero expansion, used only as a cross-check.
    fn mcmahon(m: usize, k: usize) -> f64 {
        let mu = 4.0 * (m * m) as f64;
        let b = (k as f64 + 0.5 * m as f64 - 0.25) * PI;
        b - (mu - 1.0) / (8.0 * b) - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * (8.0 * b).powi(3))
    }

    #[test]
    fn known_values() {
        // Abramowitz & Stegun table 9.1
        assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(1, 1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j(0, 10.0) - (-0.245_935_764_451_348_3)).abs() < 1e-14);
        assert!((bessel_j(2, 10.0) - 0.254_630_313_685_120_7).abs() < 1e-14);
        assert!((bessel_j(5, 3.0) - 0.043_028_434_877_047_6).abs() < 1e-15);
    }

    #[test]
    fn series_and_recurrence_agree_at_the_switch() {
        for m in 0..10 {
            let s = series(m, 3.999);
            let r = miller(m, 3.999)[m];
            assert!((s - r).abs() < 1e-14, "m={m}: {s} vs {r}");
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for &(m, x) in &[(0usize, 2.3f64), (1, 7.5), (4, 12.0), (10, 30.0)] {
            let (_, d) = bessel_j_with_derivative(m, x);
            let h = 1e-5;
            let fd = (bessel_j(m, x + h) - bessel_j(m, x - h)) / (2.0 * h);
            assert!((d - fd).abs() < 1e-9);
        }
    }

    #[test]
    fn first_zeros() {
        assert!((bessel_j_zero(0, 1).unwrap() - 2.404_825_557_695_773).abs() < 1e-12);
        assert!((bessel_j_zero(1, 1).unwrap() - 3.831_705_970_207_512).abs() < 1e-12);
        assert!((bessel_j_zero(0, 2).unwrap() - 5.520_078_110_286_311).abs() < 1e-12);
    }

    #[test]
    fn zeros_interlace_and_track_mcmahon() {
        let j01 = bessel_j_zero(0, 1).unwrap();
        let j11 = bessel_j_zero(1, 1).unwrap();
        let j02 = bessel_j_zero(0, 2).unwrap();
        assert!(j01 < j11 && j11 < j02);
        // 64th zeros for high orders, where the truncated expansion is too
        // coarse (reference values from scipy.special.jn_zeros)
        let reference = [(17usize, 226.341_912_972_825_07), (32, 248.479_138_369_377_98)];
        for (m, z64) in reference {
            assert!((bessel_j_zeros(m, 64)[63] - z64).abs() < 1e-9, "m={m}");
        }
        for m in [0usize, 3, 17, 32] {
            let z = bessel_j_zeros(m, 64);
            assert!(z.windows(2).all(|w| w[1] - w[0] > 3.0));
            if m < 10 {
                assert!((z[63] - mcmahon(m, 64)).abs() < 1e-6, "m={m}");
            }
            for &x in z.iter().step_by(7) {
                assert!(bessel_j(m, x).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn out_of_range_is_rejected() {
        assert_eq!(bessel_j_zero(0, 0).unwrap_err().code(), "RANGE");
        assert_eq!(bessel_j_zero(MAX_ZERO_ORDER + 1, 1).unwrap_err().code(), "RANGE");
        assert_eq!(bessel_j_zero(0, MAX_ZERO_INDEX + 1).unwrap_err().code(), "RANGE");
    }
}
