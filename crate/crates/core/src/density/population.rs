use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{info_loss, LLR_MAX};

/// Sampled LLR density: `(L, x)` pairs with `x = ±1` the true symbol.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LlrPopulation {
    pub samples: Vec<(f64, f64)>,
    pub label: String,
}

impl LlrPopulation {
    pub fn new(samples: Vec<(f64, f64)>, label: impl Into<String>) -> Self {
        Self {
            samples,
            label: label.into(),
        }
    }

    /// Population whose symbols are all `+1`.
    pub fn from_oriented(oriented: &[f64], label: impl Into<String>) -> Self {
        Self::new(oriented.iter().map(|&l| (l, 1.0)).collect(), label)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `x · L` for every sample.
    pub fn oriented(&self) -> Vec<f64> {
        self.samples.iter().map(|&(l, x)| x * l).collect()
    }

    pub fn relabeled(&self) -> Self {
        Self::new(
            self.samples.iter().map(|&(l, x)| (-l, -x)).collect(),
            self.label.clone(),
        )
    }
}

/// `1 - mean(log2(1 + e^{-x L}))`, clamped to `[0, 1]`.
pub fn mutual_information(pop: &LlrPopulation) -> Result<f64> {
    if pop.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let loss: f64 = pop.samples.iter().map(|&(l, x)| info_loss(x * l)).sum();
    Ok((1.0 - loss / pop.len() as f64).clamp(0.0, 1.0))
}

/// Same estimator over oriented values `x · L`; zero for an empty slice.
pub fn mutual_information_oriented(oriented: &[f64]) -> f64 {
    if oriented.is_empty() {
        return 0.0;
    }
    let loss: f64 = oriented.iter().map(|&l| info_loss(l)).sum();
    (1.0 - loss / oriented.len() as f64).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport {
    pub mean_abs_deviation: f64,
    pub max_abs_deviation: f64,
    pub bins_used: usize,
    pub samples: usize,
}

/// Binned check of `ln(p(c) / p(-c)) = c` on oriented samples.
///
/// Bins have width `bin_width` and are centred on multiples of it. Only bin
/// pairs `(c, -c)` with `c > 0` where both sides hold at least `min_count`
/// samples are scored. Samples within one bin of the saturation limit are
/// ignored. Returns `None` when no bin pair qualifies.
pub fn symmetry_test(oriented: &[f64], bin_width: f64, min_count: usize) -> Option<SymmetryReport> {
    assert!(bin_width > 0.0, "bin width must be positive");
    let limit = LLR_MAX - bin_width;
    let half = (limit / bin_width) as usize + 1;
    let mut pos = alloc::vec![0usize; half + 1];
    let mut neg = alloc::vec![0usize; half + 1];
    for &l in oriented {
        if !l.is_finite() || l.abs() >= limit {
            continue;
        }
        let k = libm::round(l.abs() / bin_width) as usize;
        if k == 0 || k > half {
            continue;
        }
        if l > 0.0 {
            pos[k] += 1;
        } else {
            neg[k] += 1;
        }
    }
    let mut total = 0.0;
    let mut worst: f64 = 0.0;
    let mut bins = 0;
    let mut used = 0;
    for k in 1..=half {
        if pos[k] >= min_count && neg[k] >= min_count {
            let c = k as f64 * bin_width;
            let dev = (libm::log(pos[k] as f64 / neg[k] as f64) - c).abs();
            total += dev;
            worst = worst.max(dev);
            bins += 1;
            used += pos[k] + neg[k];
        }
    }
    (bins > 0).then(|| SymmetryReport {
        mean_abs_deviation: total / bins as f64,
        max_abs_deviation: worst,
        bins_used: bins,
        samples: used,
    })
}
