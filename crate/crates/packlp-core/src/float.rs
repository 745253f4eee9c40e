//! Float helpers that work without std.
//!
//! `core` ships `abs`/`sqrt`/`ceil` on recent toolchains, but `ln` is still
//! std-only, so the no_std path uses a small argument-reduction series.

#[cfg(feature = "std")]
#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    x.ln()
}

#[cfg(not(feature = "std"))]
#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    ln_series(x)
}

#[cfg(feature = "std")]
#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    x.sqrt()
}

#[cfg(not(feature = "std"))]
#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    sqrt_newton(x)
}

/// Ceiling for nonnegative arguments below 2^53.
#[cfg(feature = "std")]
#[inline]
pub(crate) fn ceil_pos(x: f64) -> f64 {
    x.ceil()
}

#[cfg(not(feature = "std"))]
#[inline]
pub(crate) fn ceil_pos(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    let t = x as u64 as f64;
    if t < x {
        t + 1.0
    } else {
        t
    }
}

/// Newton's method from an exponent-halving initial guess; accurate to a
/// couple of ulps, which is plenty for the margin-bound formula.
#[allow(dead_code)]
fn sqrt_newton(x: f64) -> f64 {
    if x < 0.0 {
        return f64::NAN;
    }
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mut y = f64::from_bits((x.to_bits() >> 1) + 0x1FF8_0000_0000_0000);
    for _ in 0..5 {
        y = 0.5 * (y + x / y);
    }
    y
}

/// Natural log via `x = 2^k * z`, `z` near 1, and the atanh series
/// `ln z = 2 * (t + t^3/3 + t^5/5 + ...)` with `t = (z-1)/(z+1)`.
/// Relative error is a few ulps over the range this crate uses.
#[allow(dead_code)]
fn ln_series(x: f64) -> f64 {
    const LN_2: f64 = core::f64::consts::LN_2;
    if x <= 0.0 {
        return f64::NAN;
    }
    if x.is_infinite() {
        return f64::INFINITY;
    }
    let bits = x.to_bits();
    let mut exp = ((bits >> 52) & 0x7ff) as i64 - 1023;
    let mut z = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | (1023u64 << 52));
    // Pull z into [sqrt(1/2), sqrt(2)) so the series converges fast.
    if z > core::f64::consts::SQRT_2 {
        z *= 0.5;
        exp += 1;
    }
    let t = (z - 1.0) / (z + 1.0);
    let t2 = t * t;
    let mut term = t;
    let mut sum = 0.0f64;
    let mut k = 1.0;
    while term.abs() > 1e-20 * (1.0 + sum.abs()) {
        sum += term / k;
        term *= t2;
        k += 2.0;
    }
    exp as f64 * LN_2 + 2.0 * sum
}
