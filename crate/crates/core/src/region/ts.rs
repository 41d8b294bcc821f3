use alloc::vec::Vec;

use super::capacity::{bpsk_awgn_capacity_with, gaussian_capacity};
use super::curve::{RatePoint, RegionCurve};
use super::quadrature::{GaussHermite, DEFAULT_NODES};
use crate::gic::{GicParameters, TimeSharingSchedule, TsSlot, User};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsMode {
    /// Fixed per-symbol powers.
    Naive,
    /// Average total power shared between the two slots.
    NonNaive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signaling {
    Bpsk,
    Gaussian,
}

fn capacity(gh: &GaussHermite, sig: Signaling, snr: f64) -> f64 {
    match sig {
        Signaling::Bpsk => bpsk_awgn_capacity_with(gh, snr),
        Signaling::Gaussian => gaussian_capacity(snr),
    }
}

/// Rates of a single-user time-sharing schedule: user `i` is decoded
/// interference-free in the slots where only it transmits.
pub fn ts_point(p: &GicParameters, schedule: &TimeSharingSchedule, sig: Signaling) -> RatePoint {
    ts_point_with(&GaussHermite::new(DEFAULT_NODES), p, schedule, sig)
}

fn ts_point_with(gh: &GaussHermite, p: &GicParameters, schedule: &TimeSharingSchedule, sig: Signaling) -> RatePoint {
    let mut r = [0.0; 2];
    for slot in &schedule.slots {
        for u in User::BOTH {
            let i = u.index();
            if slot.fraction > 0.0 && slot.powers[i] > 0.0 && slot.powers[1 - i] == 0.0 {
                let h = p.gain(u, u);
                r[i] += slot.fraction * capacity(gh, sig, h * h * slot.powers[i] / p.n0());
            }
        }
    }
    RatePoint::new(r[0], r[1])
}

/// Schedule with user 1 alone for `tau` at power `share (P1 + P2) / tau`
/// and user 2 alone for the rest with the remaining energy.
pub fn shared_schedule(p: &GicParameters, tau: f64, share: f64) -> TimeSharingSchedule {
    let total = p.power(User::One) + p.power(User::Two);
    TimeSharingSchedule {
        slots: alloc::vec![
            TsSlot {
                fraction: tau,
                powers: [share * total / tau, 0.0],
            },
            TsSlot {
                fraction: 1.0 - tau,
                powers: [0.0, (1.0 - share) * total / (1.0 - tau)],
            },
        ],
    }
}

/// Time-sharing region boundary. `steps` sets the resolution of the sweep
/// over the open interval of slot fractions (and energy shares when
/// pooling).
pub fn ts_regions(p: &GicParameters, mode: TsMode, sig: Signaling, steps: usize) -> RegionCurve {
    let gh = GaussHermite::new(DEFAULT_NODES);
    let steps = steps.max(2);
    let c1 = ts_point_with(&gh, p, &TimeSharingSchedule::naive(p, 1.0), sig).r1;
    let c2 = ts_point_with(&gh, p, &TimeSharingSchedule::naive(p, 0.0), sig).r2;
    let label = match (mode, sig) {
        (TsMode::Naive, Signaling::Bpsk) => "naive-ts-bpsk",
        (TsMode::Naive, Signaling::Gaussian) => "naive-ts-gaussian",
        (TsMode::NonNaive, Signaling::Bpsk) => "non-naive-ts-bpsk",
        (TsMode::NonNaive, Signaling::Gaussian) => "non-naive-ts-gaussian",
    };
    let mut pts: Vec<RatePoint> = alloc::vec![RatePoint::new(0.0, c2), RatePoint::new(c1, 0.0)];
    match mode {
        TsMode::Naive => {
            for k in 1..steps {
                let tau = k as f64 / steps as f64;
                pts.push(ts_point_with(&gh, p, &TimeSharingSchedule::naive(p, tau), sig));
            }
        }
        TsMode::NonNaive => {
            for k in 1..steps {
                let tau = k as f64 / steps as f64;
                pts.push(ts_point_with(&gh, p, &TimeSharingSchedule::pooled(p, tau), sig));
                for j in 1..steps {
                    let share = j as f64 / steps as f64;
                    pts.push(ts_point_with(&gh, p, &shared_schedule(p, tau, share), sig));
                }
            }
        }
    }
    let mut curve = RegionCurve::from_pareto(label, &pts);
    curve.points.retain(|q| q.r1 >= 0.0);
    curve.with_metadata("steps", alloc::format!("{steps}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::bpsk_awgn_capacity;

    #[test]
    fn naive_midpoint() {
        let p = GicParameters::symmetric(1.5, 3.0, 0.0).unwrap();
        let c = bpsk_awgn_capacity(1.5);
        let mid = ts_point(&p, &TimeSharingSchedule::naive(&p, 0.5), Signaling::Bpsk);
        assert!((mid.r1 - c / 2.0).abs() < 1e-12 && (mid.r2 - c / 2.0).abs() < 1e-12);
        let curve = ts_regions(&p, TsMode::Naive, Signaling::Bpsk, 10);
        assert!(curve.contains(mid, 1e-9));
        assert!(!curve.contains(RatePoint::new(c / 2.0 + 0.01, c / 2.0), 1e-9));
    }

    #[test]
    fn gaussian_endpoints() {
        let p = GicParameters::symmetric(2.0, 1.0, 0.0).unwrap();
        let curve = ts_regions(&p, TsMode::Naive, Signaling::Gaussian, 4);
        assert!((curve.max_r1() - 0.5 * libm::log2(5.0)).abs() < 1e-12);
    }

    #[test]
    fn pooling_dominates_naive_and_respects_power() {
        let p = GicParameters::from_db([0.0, 2.0], [3.0, 1.0], [0.0, 0.0]).unwrap();
        for sig in [Signaling::Bpsk, Signaling::Gaussian] {
            let naive = ts_regions(&p, TsMode::Naive, sig, 20);
            let pooled = ts_regions(&p, TsMode::NonNaive, sig, 20);
            assert!(pooled.dominates(&naive, 1e-9));
            assert!(pooled.is_monotone() && naive.is_monotone());
        }
        for tau in [0.1, 0.5, 0.9] {
            assert!(shared_schedule(&p, tau, 0.3).satisfies_total_power(&p));
        }
    }
}
