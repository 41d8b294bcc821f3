use super::quadrature::{GaussHermite, DEFAULT_NODES};
use crate::math::info_loss;

/// Mutual information of equiprobable BPSK over the real AWGN channel, in
/// bits, where `snr = a^2 / N0` and the noise variance is `N0 / 2`.
pub fn bpsk_awgn_capacity(snr: f64) -> f64 {
    bpsk_awgn_capacity_with(&GaussHermite::new(DEFAULT_NODES), snr)
}

/// Same, reusing a quadrature rule.
pub fn bpsk_awgn_capacity_with(gh: &GaussHermite, snr: f64) -> f64 {
    if snr <= 0.0 {
        return 0.0;
    }
    // Oriented channel LLR is N(4 snr, 8 snr).
    let mean = 4.0 * snr;
    let sd = libm::sqrt(8.0 * snr);
    let loss = gh.expect_normal(|z| info_loss(mean + sd * z));
    (1.0 - loss).clamp(0.0, 1.0)
}

/// Gaussian-input capacity `log2(1 + 2 snr) / 2` of the same real channel.
pub fn gaussian_capacity(snr: f64) -> f64 {
    if snr <= 0.0 {
        return 0.0;
    }
    0.5 * libm::log2(1.0 + 2.0 * snr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    /// Composite Simpson over the received sample for symbol +1.
    fn simpson(snr: f64) -> f64 {
        let a = libm::sqrt(snr);
        let var = 0.5;
        let pdf = |y: f64, m: f64| libm::exp(-(y - m) * (y - m) / (2.0 * var));
        let (lo, hi, n) = (a - 14.0, a + 14.0, 40_000);
        let h = (hi - lo) / n as f64;
        let f = |y: f64| {
            let p = pdf(y, a);
            let q = pdf(y, -a);
            if p == 0.0 {
                0.0
            } else {
                p * libm::log2(2.0 * p / (p + q))
            }
        };
        let mut s = f(lo) + f(hi);
        for k in 1..n {
            s += f(lo + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0 / libm::sqrt(2.0 * core::f64::consts::PI * var)
    }

    #[test]
    fn endpoints() {
        assert_eq!(bpsk_awgn_capacity(0.0), 0.0);
        assert!(1.0 - bpsk_awgn_capacity(100.0) < 1e-6);
    }

    #[test]
    fn matches_simpson() {
        for snr in [0.05, 0.5, 1.0, 2.0, 5.0] {
            let q = bpsk_awgn_capacity(snr);
            assert!((q - simpson(snr)).abs() < 1e-6, "snr {snr}: {q} vs {}", simpson(snr));
        }
    }

    #[test]
    fn matches_monte_carlo() {
        let n = 400_000;
        for snr in [0.5, 1.0, 2.0] {
            let mut rng = crate::rng::substream(17, &[]);
            let (mean, sd) = (4.0 * snr, libm::sqrt(8.0 * snr));
            let xs: alloc::vec::Vec<f64> = (0..n)
                .map(|_| info_loss(mean + sd * rng.sample::<f64, _>(StandardNormal)))
                .collect();
            let m = xs.iter().sum::<f64>() / n as f64;
            let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
            let se = libm::sqrt(v / n as f64);
            assert!(((1.0 - m) - bpsk_awgn_capacity(snr)).abs() < 3.0 * se);
        }
    }

    #[test]
    fn gaussian_dominates_bpsk() {
        for snr in [0.01, 0.3, 1.0, 4.0] {
            assert!(gaussian_capacity(snr) > bpsk_awgn_capacity(snr));
        }
    }
}
