//! Scalar LLR arithmetic shared by the decoder, the density tracker and the
//! rate-region integrals.

use libm::{atanh, exp, fabs, log1p, tanh};

/// Magnitude cap applied to every exchanged LLR.
pub const LLR_MAX: f64 = 30.0;

const LN_2: f64 = core::f64::consts::LN_2;

#[inline]
pub fn saturate(l: f64) -> f64 {
    if l > LLR_MAX {
        LLR_MAX
    } else if l < -LLR_MAX {
        -LLR_MAX
    } else if l.is_nan() {
        0.0
    } else {
        l
    }
}

/// Jacobian logarithm `ln(e^a + e^b)`, exact.
#[inline]
pub fn max_star(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + log1p(exp(lo - hi))
}

/// `ln Σ e^{x_k}`, shifted by the maximum; `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + libm::log(xs.iter().map(|&x| exp(x - hi)).sum::<f64>())
}

/// `ln(1 + e^x)` without overflow.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + log1p(exp(-x))
    } else {
        log1p(exp(x))
    }
}

/// `ln P(s)` for antipodal symbol `s` (`+1` is bit 0) under prior LLR `llr`.
#[inline]
pub fn log_prob_symbol(llr: f64, s: f64) -> f64 {
    -softplus(-s * llr)
}

/// `P(bit = 0)` for a given LLR.
#[inline]
pub fn prob_zero(llr: f64) -> f64 {
    1.0 / (1.0 + exp(-llr))
}

/// LLR of a probability `q = P(bit = 0)`.
pub fn llr_from_prob_zero(q: f64) -> f64 {
    if q <= 0.0 {
        -LLR_MAX
    } else if q >= 1.0 {
        LLR_MAX
    } else {
        saturate(libm::log(q) - libm::log(1.0 - q))
    }
}

/// `log2(1 + e^{-l})`, the per-sample information loss of an oriented LLR.
#[inline]
pub fn info_loss(oriented: f64) -> f64 {
    softplus(-oriented) / LN_2
}

/// Tanh-rule check combination of already-computed `tanh(l/2)` factors.
#[inline]
pub fn atanh_product(prod: f64) -> f64 {
    // tanh(15) rounds to within 1e-13 of one; keep atanh finite.
    let p = prod.clamp(-1.0 + 1e-16, 1.0 - 1e-16);
    saturate(2.0 * atanh(p))
}

#[inline]
pub fn half_tanh(l: f64) -> f64 {
    tanh(0.5 * l)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    fabs(x)
}
