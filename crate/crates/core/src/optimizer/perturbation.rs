use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::substream;

/// Additive change to the variable-degree masses, over the same support.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationVector {
    pub e: Vec<(u32, f64)>,
}

impl PerturbationVector {
    pub fn sum(&self) -> f64 {
        self.e.iter().map(|&(_, x)| x).sum()
    }

    pub fn inverse_degree_sum(&self) -> f64 {
        self.e.iter().map(|&(d, x)| x / d as f64).sum()
    }

    /// `λ + e`, with rounding residue outside `[0, 1]` clipped.
    pub fn apply(&self, lambda: &[(u32, f64)]) -> Vec<(u32, f64)> {
        lambda
            .iter()
            .zip(&self.e)
            .map(|(&(d, l), &(_, x))| {
                let v = l + x;
                (d, if v.abs() < 1e-15 { 0.0 } else { v.min(1.0) })
            })
            .collect()
    }
}

/// Required `Σ e_i / i` for a rate step from `r0` to `r0 + delta` with a
/// single check degree `dc`.
pub fn step_target(dc: u32, r0: f64, delta: f64) -> f64 {
    let a = 1.0 - r0;
    delta / (dc as f64 * (a * a - delta * a))
}

/// Required `Σ e_i / i` to move `lambda` to check degree `dc` at rate `rate`.
pub fn retarget_target(lambda: &[(u32, f64)], dc: u32, rate: f64) -> f64 {
    let current: f64 = lambda.iter().map(|&(d, l)| l / d as f64).sum();
    1.0 / (dc as f64 * (1.0 - rate)) - current
}

/// Sampler settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationConfig {
    /// Half-width of the box non-pivot components are drawn from.
    pub width: f64,
    /// Random draws before falling back to two-component moves.
    pub max_tries: usize,
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        Self {
            width: 0.02,
            max_tries: 1000,
        }
    }
}

/// Draw `e` with `Σ e_i = 0`, `Σ e_i / i = target` and `0 <= λ_i + e_i <= 1`.
///
/// Two pivot degrees are chosen at random; the others move uniformly within
/// `±width` (clipped to the simplex) and the pivots absorb both equality
/// constraints.
pub fn sample_perturbation_to(
    lambda: &[(u32, f64)],
    target: f64,
    cfg: &PerturbationConfig,
    seed: u64,
) -> Result<PerturbationVector> {
    let k = lambda.len();
    if k < 2 {
        return Err(Error::InfeasiblePerturbation(
            "need at least two variable degrees".into(),
        ));
    }
    let inv: Vec<f64> = lambda.iter().map(|&(d, _)| 1.0 / d as f64).collect();
    let mass: Vec<f64> = lambda.iter().map(|&(_, l)| l).collect();
    let base: f64 = mass.iter().zip(&inv).map(|(l, w)| l * w).sum();
    let lo = inv.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = inv.iter().copied().fold(0.0, f64::max);
    let goal = base + target;
    if goal < lo - 1e-15 || goal > hi + 1e-15 {
        return Err(Error::InfeasiblePerturbation(format!(
            "inverse-degree sum {goal} outside [{lo}, {hi}]"
        )));
    }
    let mut rng = substream(seed, &[0xe7e7]);
    let mut e = alloc::vec![0.0; k];
    for _ in 0..cfg.max_tries {
        let a = rng.random_range(0..k);
        let mut b = rng.random_range(0..k - 1);
        if b >= a {
            b += 1;
        }
        let (mut s0, mut s1) = (0.0, 0.0);
        for i in 0..k {
            e[i] = if i == a || i == b || cfg.width <= 0.0 {
                0.0
            } else {
                let lo = (-mass[i]).max(-cfg.width);
                let hi = (1.0 - mass[i]).min(cfg.width);
                lo + (hi - lo) * rng.random::<f64>()
            };
            s0 += e[i];
            s1 += e[i] * inv[i];
        }
        if solve_pivots(&mut e, &mass, &inv, a, b, -s0, target - s1) {
            return Ok(pack(lambda, &e));
        }
    }
    // Two-component moves: every other entry stays put.
    let start = rng.random_range(0..k * k);
    for offset in 0..k * k {
        let idx = (start + offset) % (k * k);
        let (a, b) = (idx / k, idx % k);
        if a == b {
            continue;
        }
        e.iter_mut().for_each(|x| *x = 0.0);
        if solve_pivots(&mut e, &mass, &inv, a, b, 0.0, target) {
            return Ok(pack(lambda, &e));
        }
    }
    Err(Error::InfeasiblePerturbation(format!(
        "no feasible perturbation after {} tries",
        cfg.max_tries
    )))
}

fn solve_pivots(e: &mut [f64], mass: &[f64], inv: &[f64], a: usize, b: usize, sum: f64, weighted: f64) -> bool {
    let det = inv[a] - inv[b];
    if det.abs() < 1e-15 {
        return false;
    }
    let ea = (weighted - sum * inv[b]) / det;
    let eb = sum - ea;
    let ok = |l: f64, x: f64| {
        let v = l + x;
        (-1e-15..=1.0 + 1e-15).contains(&v)
    };
    if ok(mass[a], ea) && ok(mass[b], eb) {
        e[a] = ea;
        e[b] = eb;
        true
    } else {
        false
    }
}

fn pack(lambda: &[(u32, f64)], e: &[f64]) -> PerturbationVector {
    PerturbationVector {
        e: lambda.iter().zip(e).map(|(&(d, _), &x)| (d, x)).collect(),
    }
}

/// Rate step of size `delta` from design rate `r0` at check degree `dc`.
pub fn sample_perturbation(
    lambda: &[(u32, f64)],
    dc: u32,
    r0: f64,
    delta: f64,
    cfg: &PerturbationConfig,
    seed: u64,
) -> Result<PerturbationVector> {
    if !(r0 + delta < 1.0) || dc < 2 {
        return Err(Error::InfeasiblePerturbation(format!(
            "target rate {} with check degree {dc}",
            r0 + delta
        )));
    }
    sample_perturbation_to(lambda, step_target(dc, r0, delta), cfg, seed)
}
