//! Protected arithmetic. Every operator maps finite inputs to a finite output.

/// Magnitudes at or below this are treated as zero by the protected operators.
pub const ZERO_TOL: f64 = 1e-12;

/// Saturates overflow to `±f64::MAX`. Finite operands of `+ - * /` can only
/// leave the finite range by overflowing, never by producing NaN.
#[inline]
pub(crate) fn saturate(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else if x > 0.0 {
        f64::MAX
    } else if x < 0.0 {
        f64::MIN
    } else {
        0.0
    }
}

#[inline]
pub fn add(x: f64, y: f64) -> f64 {
    saturate(x + y)
}

#[inline]
pub fn sub(x: f64, y: f64) -> f64 {
    saturate(x - y)
}

#[inline]
pub fn mul(x: f64, y: f64) -> f64 {
    saturate(x * y)
}

/// Protected division: `x / y`, or `1.0` when `|y| <= 1e-12`.
#[inline]
pub fn pdiv(x: f64, y: f64) -> f64 {
    if libm::fabs(y) > ZERO_TOL {
        saturate(x / y)
    } else {
        1.0
    }
}

/// Protected square root: `sqrt(|x|)`.
#[inline]
pub fn srt(x: f64) -> f64 {
    libm::sqrt(libm::fabs(x))
}

/// Protected natural log: `ln|x|`, or `0.0` when `|x| <= 1e-12`.
#[inline]
pub fn rlog(x: f64) -> f64 {
    let a = libm::fabs(x);
    if a > ZERO_TOL {
        libm::log(a)
    } else {
        0.0
    }
}
