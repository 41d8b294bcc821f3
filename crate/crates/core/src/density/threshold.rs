use alloc::vec::Vec;

use super::evolve::{evolve_ensemble, DensityConfig};
use crate::error::{Error, Result};
use crate::gic::GicParameters;
use crate::hk::HkCodeSet;

/// Scalar channel parameter swept by [`threshold_bisect`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKnob {
    /// SNR of user 1 in dB, set through the noise level so every SNR and
    /// INR moves together and their ratios stay fixed.
    Snr1Db,
}

impl ChannelKnob {
    pub fn apply(self, template: &GicParameters, value: f64) -> Result<GicParameters> {
        match self {
            ChannelKnob::Snr1Db => template.with_snr1_db(value),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    /// Midpoint of the final bracket.
    pub threshold: f64,
    /// Largest knob value seen to fail.
    pub lo: f64,
    /// Smallest knob value seen to converge.
    pub hi: f64,
    /// `(knob value, converged)` in evaluation order.
    pub evaluations: Vec<(f64, bool)>,
}

/// Bisect the knob between a failing `lo` and a converging `hi` until the
/// bracket is at most `tol` wide.
pub fn threshold_bisect(
    codes: &HkCodeSet,
    template: &GicParameters,
    knob: ChannelKnob,
    bracket: (f64, f64),
    tol: f64,
    cfg: &DensityConfig,
) -> Result<ThresholdResult> {
    threshold_bisect_with(
        |v| Ok(evolve_ensemble(codes, &knob.apply(template, v)?, cfg)?.converged),
        bracket,
        tol,
    )
}

/// Bisection over an arbitrary monotone convergence oracle.
pub fn threshold_bisect_with<F>(mut converged: F, bracket: (f64, f64), tol: f64) -> Result<ThresholdResult>
where
    F: FnMut(f64) -> Result<bool>,
{
    let (mut lo, mut hi) = bracket;
    if !(tol > 0.0) || !(lo < hi) {
        return Err(Error::InvalidParameters("bisection needs lo < hi and tol > 0".into()));
    }
    let mut evaluations = Vec::new();
    let lo_ok = converged(lo)?;
    evaluations.push((lo, lo_ok));
    let hi_ok = converged(hi)?;
    evaluations.push((hi, hi_ok));
    if lo_ok || !hi_ok {
        return Err(Error::InvalidBracket {
            lo,
            hi,
            lo_converged: lo_ok,
            hi_converged: hi_ok,
        });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let ok = converged(mid)?;
        evaluations.push((mid, ok));
        if ok {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ThresholdResult {
        threshold: 0.5 * (lo + hi),
        lo,
        hi,
        evaluations,
    })
}
