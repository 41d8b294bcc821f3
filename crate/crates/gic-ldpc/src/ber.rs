//! Finite-length bit-error-rate sweeps.

use anyhow::{anyhow, bail, Result};
use gic_ldpc_core::decoder::{joint_decode, FiniteCodes, JointDecoderConfig, ReceiverView, TraceRow};
use gic_ldpc_core::ensemble::{sample_code, ParityCheckMatrix, SystematicEncoder};
use gic_ldpc_core::gic::{transmit, GicParameters, Message, User};
use gic_ldpc_core::hk::{decoded_set, HkCodeSet};
use gic_ldpc_core::rng::{derive_seed, substream};
use rand::Rng;
use rayon::prelude::*;

/// Blocks simulated between stopping-rule checks. Fixed so the stopping
/// point does not depend on the worker count.
const BATCH: usize = 16;

pub struct FiniteCode {
    pub matrix: ParityCheckMatrix,
    pub encoder: SystematicEncoder,
}

impl FiniteCode {
    pub fn new(matrix: ParityCheckMatrix) -> Self {
        let encoder = SystematicEncoder::new(&matrix);
        Self { matrix, encoder }
    }
}

/// Parity-check matrices (with encoders) for the coded messages.
#[derive(Default)]
pub struct FiniteCodeSet {
    codes: [Option<FiniteCode>; 4],
}

impl FiniteCodeSet {
    /// Sample one matrix per message. Every message gets its own graph;
    /// sharing one matrix between messages decoded at the same receiver puts
    /// short cycles through the state nodes.
    pub fn sample(ensembles: &HkCodeSet, n: usize, seed: u64) -> Result<Self> {
        let mut set = Self::default();
        for m in ensembles.messages() {
            let d = ensembles.get(m).unwrap();
            let h = sample_code(d, n, derive_seed(seed, &[0xc0de, m.index() as u64]))?;
            set.codes[m.index()] = Some(FiniteCode::new(h));
        }
        Ok(set)
    }

    pub fn from_matrices(matrices: [Option<ParityCheckMatrix>; 4]) -> Self {
        Self {
            codes: matrices.map(|h| h.map(FiniteCode::new)),
        }
    }

    pub fn get(&self, m: Message) -> Option<&FiniteCode> {
        self.codes[m.index()].as_ref()
    }

    pub fn matrices(&self) -> FiniteCodes<'_> {
        core::array::from_fn(|i| self.codes[i].as_ref().map(|c| &c.matrix))
    }

    pub fn messages(&self) -> impl Iterator<Item = Message> + '_ {
        Message::ALL.into_iter().filter(|m| self.codes[m.index()].is_some())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerSweepConfig {
    pub ber_target: f64,
    /// Error budget: a point stops once its worst message has this many errors.
    pub min_errors: u64,
    pub max_blocks: usize,
    pub decoder: JointDecoderConfig,
    /// Explicit decoding sets per receiver; `None` uses the default rule.
    pub decoded_sets: [Option<Vec<Message>>; 2],
    pub traced_blocks: usize,
}

impl BerSweepConfig {
    pub fn new(ber_target: f64) -> Self {
        Self {
            ber_target,
            min_errors: 100,
            max_blocks: 0,
            decoder: JointDecoderConfig::default(),
            decoded_sets: [None, None],
            traced_blocks: 0,
        }
    }

    /// Information bits needed before a point may be claimed below target.
    pub fn required_bits(&self) -> u64 {
        (100.0 / self.ber_target).ceil() as u64
    }

    /// Default block cap: just enough blocks for the smallest message to
    /// reach [`Self::required_bits`].
    pub fn default_max_blocks(&self, codes: &FiniteCodeSet) -> usize {
        let k = codes
            .messages()
            .map(|m| codes.get(m).unwrap().encoder.dimension())
            .filter(|&k| k > 0)
            .min()
            .unwrap_or(1) as u64;
        self.required_bits().div_ceil(k) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MessageCount {
    pub message: Message,
    pub bits: u64,
    pub errors: u64,
}

impl MessageCount {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.errors as f64 / self.bits as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    pub point_db: f64,
    pub blocks: usize,
    pub messages: Vec<MessageCount>,
    /// Message with the largest error rate at this point.
    pub worst: Message,
    /// `ber(worst) <= target` with at least [`BerSweepConfig::required_bits`]
    /// bits behind every message.
    pub claim_below_target: bool,
    pub trace: Vec<(usize, TraceRow)>,
}

impl BerPoint {
    pub fn worst_ber(&self) -> f64 {
        self.messages
            .iter()
            .find(|c| c.message == self.worst)
            .map(MessageCount::ber)
            .unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BerCurve {
    pub points: Vec<BerPoint>,
}

impl BerCurve {
    /// Lowest operating point that is claimed below the target.
    pub fn first_claim(&self) -> Option<f64> {
        self.points.iter().find(|p| p.claim_below_target).map(|p| p.point_db)
    }
}

struct BlockResult {
    errors: [u64; 4],
    trace: Vec<(usize, TraceRow)>,
}

fn owned(rx: User, set: &[Message]) -> Vec<Message> {
    set.iter().copied().filter(|m| m.user() == rx).collect()
}

fn simulate_block(
    p: &GicParameters,
    codes: &FiniteCodeSet,
    sets: &[Vec<Message>; 2],
    cfg: &BerSweepConfig,
    seed: u64,
    traced: bool,
) -> Result<BlockResult> {
    let mut info: [Option<Vec<u8>>; 4] = Default::default();
    let mut words: [Option<Vec<u8>>; 4] = Default::default();
    for m in codes.messages() {
        if p.message_amplitude(m) == 0.0 {
            continue;
        }
        let c = codes.get(m).unwrap();
        let mut rng = substream(seed, &[0x1f0, m.index() as u64]);
        let bits: Vec<u8> = (0..c.encoder.dimension()).map(|_| rng.random_range(0..2u8)).collect();
        words[m.index()] = Some(c.encoder.encode(&bits)?);
        info[m.index()] = Some(bits);
    }
    let block = transmit(
        p,
        core::array::from_fn(|i| words[i].as_deref()),
        derive_seed(seed, &[0xc4a]),
    )?;
    let matrices = codes.matrices();
    let mut errors = [0u64; 4];
    let mut trace = Vec::new();
    for rx in User::BOTH {
        let mut dcfg = cfg.decoder.clone();
        dcfg.decoded_set = sets[rx.index()].clone();
        let mut view = ReceiverView::from_block(&block, rx);
        if !traced {
            view.truth = [None; 4];
        }
        let out = joint_decode(view, &matrices, p, rx, &dcfg)?;
        for m in owned(rx, &sets[rx.index()]) {
            let c = codes.get(m).unwrap();
            let got = c.encoder.extract(out.decision(m).unwrap());
            let want = info[m.index()].as_ref().unwrap();
            errors[m.index()] = got.iter().zip(want).filter(|(a, b)| a != b).count() as u64;
        }
        if traced {
            trace.extend(out.trace.into_iter().map(|r| (rx.index(), r)));
        }
    }
    Ok(BlockResult { errors, trace })
}

/// Simulate transmit and joint decoding at each SNR1 point (dB), block by
/// block, until the worst message exhausts the error budget or the block cap
/// is hit. Results depend only on `seed`, not on the worker count.
pub fn run_ber_sweep(
    cfg: &BerSweepConfig,
    channel: &GicParameters,
    codes: &FiniteCodeSet,
    points_db: &[f64],
    seed: u64,
) -> Result<BerCurve> {
    if points_db.windows(2).any(|w| w[1] < w[0]) {
        bail!("operating points must be sorted");
    }
    if !(cfg.ber_target > 0.0 && cfg.ber_target < 1.0) {
        bail!("BER target must lie in (0, 1)");
    }
    let max_blocks = if cfg.max_blocks == 0 {
        cfg.default_max_blocks(codes)
    } else {
        cfg.max_blocks
    };
    let mut curve = BerCurve::default();
    for &db in points_db {
        let p = channel.with_snr1_db(db)?;
        let sets: [Vec<Message>; 2] = User::BOTH.map(|rx| {
            cfg.decoded_sets[rx.index()]
                .clone()
                .unwrap_or_else(|| decoded_set(&p, rx))
        });
        let mut measured: Vec<Message> = Vec::new();
        for rx in User::BOTH {
            for m in owned(rx, &sets[rx.index()]) {
                if codes.get(m).is_none() {
                    return Err(anyhow!("{m} is decoded at receiver {} but has no code", rx.index() + 1));
                }
                measured.push(m);
            }
        }
        if measured.is_empty() {
            bail!("no message is decoded at its own receiver");
        }
        let point_seed = derive_seed(seed, &[db.to_bits()]);
        let mut errors = [0u64; 4];
        let mut blocks = 0;
        let mut trace = Vec::new();
        while blocks < max_blocks {
            let batch = BATCH.min(max_blocks - blocks);
            let results: Vec<BlockResult> = (blocks..blocks + batch)
                .into_par_iter()
                .map(|b| {
                    simulate_block(
                        &p,
                        codes,
                        &sets,
                        cfg,
                        derive_seed(point_seed, &[b as u64]),
                        b < cfg.traced_blocks,
                    )
                })
                .collect::<Result<_>>()?;
            for r in results {
                for (e, x) in errors.iter_mut().zip(r.errors) {
                    *e += x;
                }
                trace.extend(r.trace);
            }
            blocks += batch;
            if measured.iter().any(|m| errors[m.index()] >= cfg.min_errors) {
                break;
            }
        }
        let counts: Vec<MessageCount> = measured
            .iter()
            .map(|&m| MessageCount {
                message: m,
                bits: (blocks * codes.get(m).unwrap().encoder.dimension()) as u64,
                errors: errors[m.index()],
            })
            .collect();
        let worst = counts
            .iter()
            .fold(None::<&MessageCount>, |acc, c| match acc {
                Some(a) if a.ber() >= c.ber() => Some(a),
                _ => Some(c),
            })
            .unwrap();
        let enough = counts.iter().all(|c| c.bits >= cfg.required_bits());
        curve.points.push(BerPoint {
            point_db: db,
            blocks,
            worst: worst.message,
            claim_below_target: enough && worst.ber() <= cfg.ber_target,
            messages: counts,
            trace,
        });
    }
    Ok(curve)
}
