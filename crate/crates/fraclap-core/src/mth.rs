//! Thin shim over [`libm`] so the crate builds without `std` and produces
//! bit-identical results everywhere. All float math in this crate goes
//! through these helpers (never through `f64` inherent methods, which are
//! std-only).

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn cbrt(x: f64) -> f64 {
    libm::cbrt(x)
}

/// `x^y` for real exponents.
#[inline]
pub fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn expm1(x: f64) -> f64 {
    libm::expm1(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn acos(x: f64) -> f64 {
    libm::acos(x)
}

pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

/// Gamma function (real arguments off the non-positive integers).
#[inline]
pub fn tgamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Stable `∫_a^b t^e dt` for arbitrary real exponent `e`, `0 ≤ a < b`,
/// including the `e = −1` logarithmic case and exponents near it.
///
/// Written as `(expm1(p·ln b) − expm1(p·ln a)) / p` with `p = e + 1`, which
/// stays accurate as `p → 0` (both branches agree to O(p) with `ln(b/a)`).
/// `a = 0` requires `p > 0` (otherwise the integral diverges).
pub fn power_integral(e: f64, a: f64, b: f64) -> f64 {
    debug_assert!(a >= 0.0 && b >= a);
    let p = e + 1.0;
    if a == b {
        return 0.0;
    }
    if a == 0.0 {
        debug_assert!(p > 0.0, "divergent power integral at 0");
        return exp(p * ln(b)) / p;
    }
    if abs(p) < 1e-12 {
        // exactly (or numerically) the logarithmic case
        return ln(b / a);
    }
    (expm1(p * ln(b)) - expm1(p * ln(a))) / p
}

/// `max` that ignores NaN-ordering pitfalls (propagates non-NaN winner).
#[inline]
pub fn fmax(a: f64, b: f64) -> f64 {
    if a > b {
        a
    } else {
        b
    }
}

#[inline]
pub fn fmin(a: f64, b: f64) -> f64 {
    if a < b {
        a
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_integral_matches_closed_forms() {
        // ∫_1^2 t² dt = 7/3
        assert!(abs(power_integral(2.0, 1.0, 2.0) - 7.0 / 3.0) < 1e-14);
        // ∫_1^e t^{-1} dt = 1
        assert!(abs(power_integral(-1.0, 1.0, exp(1.0)) - 1.0) < 1e-13);
        // ∫_0^1 t^{-1/2} dt = 2
        assert!(abs(power_integral(-0.5, 0.0, 1.0) - 2.0) < 1e-14);
        // near-logarithmic exponent stays stable
        let near = power_integral(-1.0 + 1e-13, 1.0, 2.0);
        assert!(abs(near - ln(2.0)) < 1e-10);
    }
}
