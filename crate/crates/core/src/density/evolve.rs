use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use super::population::mutual_information_oriented;
use crate::decoder::{StateNode, TapStage};
use crate::ensemble::DegreeDistribution;
use crate::error::{Error, Result};
use crate::gic::{GicParameters, Message, Receiver, User};
use crate::hk::{decoded_set, HkCodeSet};
use crate::math::{atanh_product, half_tanh, info_loss, saturate};
use crate::rng::{for_each_chunk, substream, sum_chunks};

/// Monte-Carlo density evolution settings.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityConfig {
    /// Samples per population.
    pub population: usize,
    /// Smallest population allowed for a verdict.
    pub min_population: usize,
    pub rounds_max: usize,
    /// Variable/check iterations per state-node update.
    pub inner_iters: usize,
    /// Converged once every posterior MI is at least `1 - mi_epsilon`.
    pub mi_epsilon: f64,
    /// Give up when the worst MI gained less than `stall_tolerance` over the
    /// last `stall_window` rounds. Zero disables the check.
    pub stall_window: usize,
    pub stall_tolerance: f64,
    pub seed: u64,
}

impl Default for DensityConfig {
    fn default() -> Self {
        Self {
            population: 200_000,
            min_population: 10_000,
            rounds_max: 500,
            inner_iters: 1,
            mi_epsilon: 1e-4,
            stall_window: 100,
            stall_tolerance: 1e-3,
            seed: 0x0de0_0de0,
        }
    }
}

impl DensityConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < self.min_population {
            return Err(Error::PopulationTooSmall {
                got: self.population,
                min: self.min_population,
            });
        }
        if self.inner_iters == 0 || self.rounds_max == 0 {
            return Err(Error::InvalidConfig(
                "rounds and inner iterations must be positive".into(),
            ));
        }
        if !(self.mi_epsilon > 0.0 && self.mi_epsilon < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "mi_epsilon {} outside (0, 1)",
                self.mi_epsilon
            )));
        }
        Ok(())
    }
}

/// Density evolution outcome at one receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverReport {
    pub receiver: Receiver,
    pub messages: Vec<Message>,
    pub converged: bool,
    pub rounds_used: usize,
    /// Posterior MI per round, one entry per message in `messages` order.
    pub trajectory: Vec<Vec<f64>>,
}

impl ReceiverReport {
    pub fn final_mi(&self, m: Message) -> Option<f64> {
        let j = self.messages.iter().position(|&k| k == m)?;
        self.trajectory.last().map(|row| row[j])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub converged: bool,
    pub rounds_used: usize,
    /// Worst final MI of each message over the receivers decoding it.
    pub final_mi: [Option<f64>; 4],
    pub receivers: Vec<ReceiverReport>,
}

/// Population snapshot handed to an observer after each update stage.
///
/// The extrinsic population a round hands back to the state nodes is only
/// drawn at the start of the next round, so the final round's
/// `VariableToState` snapshot is never reported.
#[derive(Debug, Clone, Copy)]
pub struct PopulationEvent<'a> {
    pub receiver: Receiver,
    pub round: usize,
    pub message: Message,
    pub stage: TapStage,
    /// Oriented samples `x · L`.
    pub oriented: &'a [f64],
}

/// Inverse-CDF sampler over a small degree table.
#[derive(Debug, Clone)]
pub(crate) struct DegreeSampler {
    degrees: Vec<usize>,
    cumulative: Vec<f64>,
}

impl DegreeSampler {
    pub(crate) fn new(pairs: &[(u32, f64)]) -> Self {
        let mut degrees = Vec::new();
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        for &(d, w) in pairs {
            if w > 0.0 {
                acc += w;
                degrees.push(d as usize);
                cumulative.push(acc);
            }
        }
        for c in &mut cumulative {
            *c /= acc;
        }
        Self { degrees, cumulative }
    }

    #[inline]
    pub(crate) fn sample(&self, rng: &mut impl RngCore) -> usize {
        let u: f64 = rng.random();
        for (k, &c) in self.cumulative.iter().enumerate() {
            if u < c {
                return self.degrees[k];
            }
        }
        *self.degrees.last().unwrap()
    }
}

/// Uniform index in `0..n` by multiply-shift.
#[inline]
pub(crate) fn pick(rng: &mut impl RngCore, n: usize) -> usize {
    ((rng.next_u64() as u128 * n as u128) >> 64) as usize
}

struct Track {
    message: Message,
    edge: DegreeSampler,
    node: DegreeSampler,
    check: DegreeSampler,
    chan: Vec<f64>,
    v2c: Vec<f64>,
    c2v: Vec<f64>,
}

impl Track {
    fn new(message: Message, d: &DegreeDistribution, n: usize) -> Self {
        Self {
            message,
            edge: DegreeSampler::new(d.lambda()),
            node: DegreeSampler::new(&d.to_node().variable),
            check: DegreeSampler::new(d.rho()),
            chan: alloc::vec![0.0; n],
            v2c: alloc::vec![0.0; n],
            c2v: alloc::vec![0.0; n],
        }
    }
}

#[inline]
fn sum_incoming(rng: &mut impl RngCore, pop: &[f64], count: usize) -> f64 {
    let mut s = 0.0;
    for _ in 0..count {
        s += pop[pick(rng, pop.len())];
    }
    s
}

const STAGE_STATE: u64 = 1;
const STAGE_VARIABLE: u64 = 2;
const STAGE_CHECK: u64 = 3;
const STAGE_MI: u64 = 4;

/// Evolve the joint decoder of receiver `rx` with ensembles `codes`.
pub fn evolve_receiver(
    codes: &HkCodeSet,
    p: &GicParameters,
    rx: Receiver,
    cfg: &DensityConfig,
) -> Result<ReceiverReport> {
    evolve_receiver_observed(codes, p, rx, cfg, &mut |_| {})
}

pub fn evolve_receiver_observed(
    codes: &HkCodeSet,
    p: &GicParameters,
    rx: Receiver,
    cfg: &DensityConfig,
    observe: &mut dyn FnMut(PopulationEvent<'_>),
) -> Result<ReceiverReport> {
    cfg.validate()?;
    let n = cfg.population;
    let messages = decoded_set(p, rx);
    let mut tracks = Vec::with_capacity(messages.len());
    for &m in &messages {
        let d = codes.get(m).ok_or_else(|| {
            Error::InvalidConfig(format!(
                "message {m} is decoded at receiver {} but has no code",
                rx.index() + 1
            ))
        })?;
        tracks.push(Track::new(m, d, n));
    }
    let node = StateNode::new(p, rx);
    let amps = p.receiver_amplitudes(rx);
    let sigma = libm::sqrt(p.noise_variance());
    let mut want = [false; 4];
    for &m in &messages {
        want[m.index()] = true;
    }
    let seed = crate::rng::derive_seed(cfg.seed, &[rx.index() as u64]);

    let mut trajectory: Vec<Vec<f64>> = Vec::new();
    let mut converged = false;
    let mut best_history: Vec<f64> = Vec::new();
    let mut best = f64::NEG_INFINITY;
    // Per sample: state-node outputs, then the extrinsic priors that fed them.
    let mut slots = alloc::vec![[0.0f64; 8]; n];

    for round in 0..cfg.rounds_max {
        let r = round as u64;
        {
            let tracks = &tracks;
            let node = &node;
            for_each_chunk(&mut slots, |ci, chunk| {
                let mut rng = substream(seed, &[STAGE_STATE, r, ci as u64]);
                let mut prior = [0.0f64; 4];
                let mut out = [0.0f64; 4];
                let mut s = [1.0f64; 4];
                for slot in chunk.iter_mut() {
                    let mut y = sigma * rng.sample::<f64, _>(StandardNormal);
                    for i in 0..4 {
                        if amps[i] != 0.0 {
                            s[i] = if rng.next_u32() & 1 == 0 { 1.0 } else { -1.0 };
                            y += amps[i] * s[i];
                        }
                    }
                    for t in tracks {
                        let i = t.message.index();
                        let deg = t.node.sample(&mut rng);
                        let ext = saturate(sum_incoming(&mut rng, &t.c2v, deg));
                        slot[4 + i] = ext;
                        prior[i] = s[i] * ext;
                    }
                    node.llrs(y, &prior, &want, &mut out);
                    for t in tracks {
                        let i = t.message.index();
                        slot[i] = s[i] * out[i];
                    }
                }
            });
        }
        for t in tracks.iter_mut() {
            let i = t.message.index();
            if round > 0 {
                for (c, slot) in t.chan.iter_mut().zip(&slots) {
                    *c = slot[4 + i];
                }
                observe(PopulationEvent {
                    receiver: rx,
                    round: round - 1,
                    message: t.message,
                    stage: TapStage::VariableToState,
                    oriented: &t.chan,
                });
            }
            for (c, slot) in t.chan.iter_mut().zip(&slots) {
                *c = slot[i];
            }
            observe(PopulationEvent {
                receiver: rx,
                round,
                message: t.message,
                stage: TapStage::StateToVariable,
                oriented: &t.chan,
            });
        }

        for (j, t) in tracks.iter_mut().enumerate() {
            for it in 0..cfg.inner_iters {
                let key = [r, j as u64, it as u64];
                {
                    let (chan, c2v, edge) = (&t.chan, &t.c2v, &t.edge);
                    for_each_chunk(&mut t.v2c, |ci, chunk| {
                        let mut rng = substream(seed, &[STAGE_VARIABLE, key[0], key[1], key[2], ci as u64]);
                        for v in chunk.iter_mut() {
                            let deg = edge.sample(&mut rng);
                            let total = chan[pick(&mut rng, n)] + sum_incoming(&mut rng, c2v, deg - 1);
                            *v = saturate(total);
                        }
                    });
                }
                observe(PopulationEvent {
                    receiver: rx,
                    round,
                    message: t.message,
                    stage: TapStage::VariableToCheck,
                    oriented: &t.v2c,
                });
                {
                    let (v2c, check) = (&t.v2c, &t.check);
                    for_each_chunk(&mut t.c2v, |ci, chunk| {
                        let mut rng = substream(seed, &[STAGE_CHECK, key[0], key[1], key[2], ci as u64]);
                        for c in chunk.iter_mut() {
                            let deg = check.sample(&mut rng);
                            let mut prod = 1.0;
                            for _ in 1..deg {
                                prod *= half_tanh(v2c[pick(&mut rng, n)]);
                            }
                            *c = atanh_product(prod);
                        }
                    });
                }
                observe(PopulationEvent {
                    receiver: rx,
                    round,
                    message: t.message,
                    stage: TapStage::CheckToVariable,
                    oriented: &t.c2v,
                });
            }
        }

        let row: Vec<f64> = tracks
            .iter()
            .enumerate()
            .map(|(j, t)| posterior_mi(t, seed, &[STAGE_MI, r, j as u64]))
            .collect();
        let worst = row.iter().copied().fold(1.0, f64::min);
        trajectory.push(row);
        if worst >= 1.0 - cfg.mi_epsilon {
            converged = true;
            break;
        }
        best = best.max(worst);
        best_history.push(best);
        let w = cfg.stall_window;
        if w > 0 && best_history.len() > w {
            let before = best_history[best_history.len() - 1 - w];
            if best - before < cfg.stall_tolerance {
                break;
            }
        }
    }

    Ok(ReceiverReport {
        receiver: rx,
        messages,
        converged,
        rounds_used: trajectory.len(),
        trajectory,
    })
}

fn posterior_mi(t: &Track, seed: u64, key: &[u64; 3]) -> f64 {
    let n = t.chan.len();
    let loss = sum_chunks(n, |ci, range| {
        let mut rng = substream(seed, &[key[0], key[1], key[2], ci as u64]);
        let mut acc = 0.0;
        for k in range {
            let deg = t.node.sample(&mut rng);
            acc += info_loss(saturate(t.chan[k] + sum_incoming(&mut rng, &t.c2v, deg)));
        }
        acc
    });
    (1.0 - loss / n as f64).clamp(0.0, 1.0)
}

/// Admissibility of a full code set: density evolution at every receiver.
///
/// Every message with a code must reach its own receiver, and every message
/// decoded at a receiver needs a code.
pub fn evolve_ensemble(codes: &HkCodeSet, p: &GicParameters, cfg: &DensityConfig) -> Result<AdmissibilityReport> {
    for m in codes.messages() {
        if p.message_amplitude(m) == 0.0 || p.gain(m.user(), m.user()) == 0.0 {
            return Err(Error::InvalidConfig(format!("message {m} has a code but no power")));
        }
    }
    let mut receivers = Vec::with_capacity(2);
    let mut final_mi = [None; 4];
    for rx in User::BOTH {
        if !decoded_set(p, rx).iter().any(|&m| codes.get(m).is_some()) {
            continue;
        }
        let rep = evolve_receiver(codes, p, rx, cfg)?;
        for &m in &rep.messages {
            let mi = rep.final_mi(m).unwrap_or(0.0);
            let slot = &mut final_mi[m.index()];
            *slot = Some(slot.map_or(mi, |v: f64| v.min(mi)));
        }
        let stop = !rep.converged;
        receivers.push(rep);
        if stop {
            break;
        }
    }
    let converged = !receivers.is_empty() && receivers.iter().all(|r| r.converged);
    Ok(AdmissibilityReport {
        converged,
        rounds_used: receivers.iter().map(|r| r.rounds_used).max().unwrap_or(0),
        final_mi,
        receivers,
    })
}

/// MI of the raw state-node output (no decoding), per decoded message.
pub fn state_node_capacity(p: &GicParameters, rx: Receiver, samples: usize, seed: u64) -> Vec<(Message, f64)> {
    let messages = decoded_set(p, rx);
    let node = StateNode::new(p, rx);
    let amps = p.receiver_amplitudes(rx);
    let sigma = libm::sqrt(p.noise_variance());
    let mut want = [false; 4];
    for &m in &messages {
        want[m.index()] = true;
    }
    let mut rng = substream(seed, &[0x57a7e]);
    let mut oriented: Vec<Vec<f64>> = alloc::vec![Vec::with_capacity(samples); messages.len()];
    let mut out = [0.0; 4];
    for _ in 0..samples {
        let mut s = [1.0f64; 4];
        let mut y = sigma * rng.sample::<f64, _>(StandardNormal);
        for i in 0..4 {
            if amps[i] != 0.0 {
                s[i] = if rng.next_u32() & 1 == 0 { 1.0 } else { -1.0 };
                y += amps[i] * s[i];
            }
        }
        node.llrs(y, &[0.0; 4], &want, &mut out);
        for (j, m) in messages.iter().enumerate() {
            oriented[j].push(s[m.index()] * out[m.index()]);
        }
    }
    messages
        .iter()
        .zip(&oriented)
        .map(|(&m, o)| (m, mutual_information_oriented(o)))
        .collect()
}
