use alloc::format;
use alloc::vec::Vec;

use super::bp::BpDecoder;
use super::state_node::StateNode;
use crate::density::mutual_information_oriented;
use crate::ensemble::ParityCheckMatrix;
use crate::error::{Error, Result};
use crate::gic::{antipodal, GicParameters, Message, Receiver};
use crate::hk::{decoded_set, interferer_private};

/// Schedule of the parallel joint decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDecoderConfig {
    pub rounds_max: usize,
    /// BP iterations each component decoder runs per round.
    pub inner_iters: usize,
    pub total_iter_cap: usize,
    /// Stop once every decoded message has zero syndrome.
    pub early_stop: bool,
    /// Messages decoded at this receiver; empty selects the default set.
    pub decoded_set: Vec<Message>,
}

impl Default for JointDecoderConfig {
    fn default() -> Self {
        Self {
            rounds_max: 250,
            inner_iters: 2,
            total_iter_cap: 500,
            early_stop: true,
            decoded_set: Vec::new(),
        }
    }
}

impl JointDecoderConfig {
    pub fn validate(&self, rx: Receiver) -> Result<()> {
        if self.rounds_max * self.inner_iters > self.total_iter_cap {
            return Err(Error::InvalidConfig(format!(
                "{} rounds x {} iterations exceeds the cap of {}",
                self.rounds_max, self.inner_iters, self.total_iter_cap
            )));
        }
        let forbidden = interferer_private(rx);
        if self.decoded_set.contains(&forbidden) {
            return Err(Error::InvalidConfig(format!(
                "receiver {} cannot decode {forbidden}",
                rx.index() + 1
            )));
        }
        Ok(())
    }
}

/// Message exchange points visible to a [`TapEvent`] observer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TapStage {
    /// Per-bit LLRs leaving the state node.
    StateToVariable,
    /// Per-edge messages, in the matrix's edge order.
    VariableToCheck,
    CheckToVariable,
    /// Per-bit extrinsic LLRs returned to the state node.
    VariableToState,
}

#[derive(Debug, Clone, Copy)]
pub struct TapEvent<'a> {
    pub round: usize,
    pub message: Message,
    pub stage: TapStage,
    pub llrs: &'a [f64],
    pub matrix: &'a ParityCheckMatrix,
}

/// One diagnostic row per round and decoded message.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub round: usize,
    pub message: Message,
    pub i_state_to_vnd: Option<f64>,
    pub i_vnd_to_state: Option<f64>,
    pub syndrome_weight: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointDecodeOutput {
    /// Hard-decided codewords of the decoded messages.
    pub decisions: Vec<(Message, Vec<u8>)>,
    /// Final a-posteriori LLRs of the decoded messages.
    pub posteriors: Vec<(Message, Vec<f64>)>,
    pub rounds: usize,
    pub iterations: usize,
    /// All decoded syndromes were zero at exit.
    pub converged: bool,
    pub trace: Vec<TraceRow>,
}

impl JointDecodeOutput {
    pub fn decision(&self, m: Message) -> Option<&[u8]> {
        self.decisions.iter().find(|(k, _)| *k == m).map(|(_, d)| d.as_slice())
    }
}

/// What one receiver observes, plus (for diagnostics) the true bits.
#[derive(Debug, Clone, Copy)]
pub struct ReceiverView<'a> {
    pub y: &'a [f64],
    pub truth: [Option<&'a [u8]>; 4],
}

impl<'a> ReceiverView<'a> {
    pub fn new(y: &'a [f64]) -> Self {
        Self { y, truth: [None; 4] }
    }

    pub fn from_block(block: &'a crate::gic::ChannelBlock, rx: Receiver) -> Self {
        Self {
            y: block.received(rx),
            truth: core::array::from_fn(|i| block.bits[i].as_deref()),
        }
    }
}

/// Parity-check matrices per message; only decoded messages need one.
pub type FiniteCodes<'a> = [Option<&'a ParityCheckMatrix>; 4];

/// Joint decoder of one receiver with parallel scheduling.
///
/// Every round, the state node turns each received sample and the other
/// decoders' extrinsic outputs into fresh channel LLRs for every decoded
/// message; then every component decoder runs `inner_iters` BP iterations.
pub fn joint_decode(
    view: ReceiverView<'_>,
    codes: &FiniteCodes<'_>,
    p: &GicParameters,
    rx: Receiver,
    cfg: &JointDecoderConfig,
) -> Result<JointDecodeOutput> {
    joint_decode_with_tap(view, codes, p, rx, cfg, &mut |_| {})
}

pub fn joint_decode_with_tap(
    view: ReceiverView<'_>,
    codes: &FiniteCodes<'_>,
    p: &GicParameters,
    rx: Receiver,
    cfg: &JointDecoderConfig,
    tap: &mut dyn FnMut(TapEvent<'_>),
) -> Result<JointDecodeOutput> {
    cfg.validate(rx)?;
    let decoded: Vec<Message> = if cfg.decoded_set.is_empty() {
        decoded_set(p, rx)
    } else {
        cfg.decoded_set.clone()
    };
    let n = view.y.len();
    let mut decoders: Vec<(Message, BpDecoder<'_>)> = Vec::with_capacity(decoded.len());
    for &m in &decoded {
        let h = codes[m.index()].ok_or_else(|| Error::DimensionMismatch(format!("no parity-check matrix for {m}")))?;
        if h.n() != n {
            return Err(Error::DimensionMismatch(format!(
                "{m} code has length {}, block has {n}",
                h.n()
            )));
        }
        if let Some(t) = view.truth[m.index()] {
            if t.len() != n {
                return Err(Error::DimensionMismatch(format!("{m} truth length {}", t.len())));
            }
        }
        decoders.push((m, BpDecoder::new(h)));
    }
    let node = StateNode::new(p, rx);
    let mut want = [false; 4];
    for &m in &decoded {
        want[m.index()] = true;
    }

    let k = decoders.len();
    let mut extrinsic: Vec<Vec<f64>> = alloc::vec![alloc::vec![0.0; n]; k];
    let mut channel: Vec<Vec<f64>> = alloc::vec![alloc::vec![0.0; n]; k];
    let mut hard: Vec<Vec<u8>> = alloc::vec![alloc::vec![0u8; n]; k];
    let mut posterior: Vec<Vec<f64>> = alloc::vec![alloc::vec![0.0; n]; k];
    let mut syndromes = alloc::vec![usize::MAX; k];
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut rounds = 0;

    while rounds < cfg.rounds_max {
        let inner = cfg.inner_iters.min(cfg.total_iter_cap - iterations);
        if inner == 0 {
            break;
        }
        let mut prior = [0.0f64; 4];
        let mut out = [0.0f64; 4];
        for i in 0..n {
            for (j, (m, _)) in decoders.iter().enumerate() {
                prior[m.index()] = extrinsic[j][i];
            }
            node.llrs(view.y[i], &prior, &want, &mut out);
            for (j, (m, _)) in decoders.iter().enumerate() {
                channel[j][i] = out[m.index()];
            }
        }
        for (j, (m, dec)) in decoders.iter_mut().enumerate() {
            let h = dec.matrix();
            tap(TapEvent {
                round: rounds,
                message: *m,
                stage: TapStage::StateToVariable,
                llrs: &channel[j],
                matrix: h,
            });
            let res = dec.round(&channel[j], inner);
            tap(TapEvent {
                round: rounds,
                message: *m,
                stage: TapStage::VariableToCheck,
                llrs: dec.variable_to_check(),
                matrix: h,
            });
            tap(TapEvent {
                round: rounds,
                message: *m,
                stage: TapStage::CheckToVariable,
                llrs: dec.check_to_variable(),
                matrix: h,
            });
            tap(TapEvent {
                round: rounds,
                message: *m,
                stage: TapStage::VariableToState,
                llrs: &res.extrinsic,
                matrix: h,
            });
            syndromes[j] = h.syndrome_weight(&res.hard);
            let truth = view.truth[m.index()];
            trace.push(TraceRow {
                round: rounds,
                message: *m,
                i_state_to_vnd: truth.map(|t| oriented_mi(&channel[j], t)),
                i_vnd_to_state: truth.map(|t| oriented_mi(&res.extrinsic, t)),
                syndrome_weight: syndromes[j],
            });
            extrinsic[j] = res.extrinsic;
            hard[j] = res.hard;
            posterior[j] = res.posterior;
        }
        iterations += inner;
        rounds += 1;
        if cfg.early_stop && syndromes.iter().all(|&s| s == 0) {
            break;
        }
    }

    let converged = rounds > 0 && syndromes.iter().all(|&s| s == 0);
    let messages: Vec<Message> = decoders.iter().map(|(m, _)| *m).collect();
    Ok(JointDecodeOutput {
        decisions: messages.iter().copied().zip(hard).collect(),
        posteriors: messages.iter().copied().zip(posterior).collect(),
        rounds,
        iterations,
        converged,
        trace,
    })
}

fn oriented_mi(llrs: &[f64], bits: &[u8]) -> f64 {
    let oriented: Vec<f64> = llrs.iter().zip(bits).map(|(&l, &b)| antipodal(b) * l).collect();
    mutual_information_oriented(&oriented)
}
