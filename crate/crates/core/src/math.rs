// libm keeps float results identical across std and no_std builds.

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// `ceil(x)`, snapping values within a relative 1e-12 of an integer onto it.
pub(crate) fn snapped_ceil(x: f64) -> f64 {
    let nearest = libm::round(x);
    if abs(x - nearest) <= 1e-12 * abs(nearest).max(1.0) {
        nearest
    } else {
        ceil(x)
    }
}

/// Smallest integer `i >= 0` with `base^i >= target`, for `base > 1`.
pub(crate) fn ceil_log(base: f64, target: f64) -> u32 {
    let mut i = 0u32;
    while snapped_ceil(powi(base, i as i32)) < target {
        i += 1;
    }
    i
}
