use core::f64::consts::SQRT_2;

/// Two-sided tail probability `P(|Z| >= z)` of a standard normal.
pub(crate) fn two_sided_normal_p(z: f64) -> f64 {
    libm::erfc(z.abs() / SQRT_2)
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// `ln(1 + exp(z))` without overflow.
pub(crate) fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + libm::log1p(libm::exp(-z))
    } else {
        libm::log1p(libm::exp(z))
    }
}
