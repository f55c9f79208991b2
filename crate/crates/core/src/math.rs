//! Scalar helpers backed by `libm` so the crate stays `no_std`.

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

/// `log(1 + exp(t))` without overflow for large `|t|`.
#[inline]
pub fn softplus(t: f64) -> f64 {
    t.max(0.0) + libm::log1p(libm::exp(-t.abs()))
}

/// Logistic sigmoid, the derivative of [`softplus`].
#[inline]
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + libm::exp(-t))
    } else {
        let e = libm::exp(t);
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softplus_is_stable_at_extremes() {
        for &t in &[-700.0, -50.0, -1.0, 0.0, 1.0, 50.0, 700.0] {
            let v = softplus(t);
            assert!(v.is_finite());
            let gap = v - t.max(0.0);
            assert!((0.0..=core::f64::consts::LN_2 + 1e-15).contains(&gap), "t={t} gap={gap}");
        }
        assert_eq!(softplus(0.0), core::f64::consts::LN_2);
    }

    #[test]
    fn sigmoid_matches_softplus_derivative() {
        for &t in &[-3.0, -0.5, 0.0, 0.7, 4.0] {
            let h = 1e-6;
            let fd = (softplus(t + h) - softplus(t - h)) / (2.0 * h);
            assert!((fd - sigmoid(t)).abs() < 1e-9);
        }
    }
}
