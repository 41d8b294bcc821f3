use alloc::vec::Vec;

/// Nodes and weights of `n`-point Gauss-Hermite quadrature for the weight
/// `e^{-x^2}`, found by Newton iteration on the orthonormal recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Default rule size for the capacity and MAC integrals.
pub const DEFAULT_NODES: usize = 128;

impl GaussHermite {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        const PIM4: f64 = 0.751_125_544_464_942_5; // pi^(-1/4)
        let mut x = alloc::vec![0.0; n];
        let mut w = alloc::vec![0.0; n];
        let nf = n as f64;
        let mut z = 0.0;
        for i in 0..n.div_ceil(2) {
            z = match i {
                0 => libm::sqrt(2.0 * nf + 1.0) - 1.85575 * libm::pow(2.0 * nf + 1.0, -1.0 / 6.0),
                1 => z - 1.14 * libm::pow(nf, 0.426) / z,
                2 => 1.86 * z - 0.86 * x[0],
                3 => 1.91 * z - 0.91 * x[1],
                _ => 2.0 * z - x[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = PIM4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * libm::sqrt(2.0 / (jf + 1.0)) * p2 - libm::sqrt(jf / (jf + 1.0)) * p3;
                }
                pp = libm::sqrt(2.0 * nf) * p2;
                let step = p1 / pp;
                z -= step;
                if step.abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        Self { nodes: x, weights: w }
    }

    /// `E f(Z)` for `Z ~ N(0, 1)`.
    pub fn expect_normal(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let scale = core::f64::consts::SQRT_2;
        let norm = 1.0 / libm::sqrt(core::f64::consts::PI);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(scale * x))
            .sum::<f64>()
            * norm
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_of_the_normal() {
        for n in [8, 64, 128] {
            let gh = GaussHermite::new(n);
            let total: f64 = gh.weights.iter().sum();
            assert!((total - libm::sqrt(core::f64::consts::PI)).abs() < 1e-12);
            assert!((gh.expect_normal(|z| z * z) - 1.0).abs() < 1e-12);
            assert!((gh.expect_normal(|z| libm::pow(z, 4.0)) - 3.0).abs() < 1e-10);
            assert!(gh.expect_normal(|z| z * z * z).abs() < 1e-10);
        }
    }

    #[test]
    fn nodes_are_sorted_descending_and_distinct() {
        let gh = GaussHermite::new(128);
        assert!(gh.nodes.windows(2).all(|w| w[0] > w[1]));
        // E cos(Z) = e^{-1/2}
        assert!((gh.expect_normal(libm::cos) - libm::exp(-0.5)).abs() < 1e-13);
    }
}
