use alloc::vec::Vec;

use crate::gic::{GicParameters, Message, Receiver};
use crate::math::{llr_from_prob_zero, log_prob_symbol, log_sum_exp, prob_zero, saturate};

/// Per-message bit priors at one coded-bit position, stored as LLRs
/// `ln(q / (1 - q))` with `q = Pr(bit = 0)`. Messages that are not decoded
/// stay at zero (`q = 1/2`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateNodePrior {
    pub llr: [f64; 4],
}

impl StateNodePrior {
    pub fn uniform() -> Self {
        Self::default()
    }

    pub fn from_probabilities(q: [f64; 4]) -> Self {
        Self {
            llr: q.map(llr_from_prob_zero),
        }
    }

    pub fn q(&self, m: Message) -> f64 {
        prob_zero(self.llr[m.index()])
    }

    pub fn set_q(&mut self, m: Message, q: f64) {
        self.llr[m.index()] = llr_from_prob_zero(q);
    }
}

/// Marginalizing state node of one receiver.
///
/// Enumerates every joint assignment `A` of the messages that reach the
/// receiver with nonzero amplitude and evaluates
/// `L = ln Σ_{A: s_t=+1} p(y|A) P(A) - ln Σ_{A: s_t=-1} p(y|A) P(A)`
/// where `P(A)` omits the target's own prior.
#[derive(Debug, Clone)]
pub struct StateNode {
    active: Vec<usize>,
    /// Noiseless point and symbol vector of every joint assignment.
    points: Vec<f64>,
    signs: Vec<[f64; 4]>,
    inv_n0: f64,
}

impl StateNode {
    pub fn new(p: &GicParameters, rx: Receiver) -> Self {
        Self::from_amplitudes(p.receiver_amplitudes(rx), p.n0())
    }

    pub fn from_amplitudes(amps: [f64; 4], n0: f64) -> Self {
        let active: Vec<usize> = (0..4).filter(|&i| amps[i] != 0.0).collect();
        let combos = 1usize << active.len();
        let mut points = Vec::with_capacity(combos);
        let mut signs = Vec::with_capacity(combos);
        for c in 0..combos {
            let mut s = [0.0; 4];
            let mut pt = 0.0;
            for (k, &i) in active.iter().enumerate() {
                let si = if c >> k & 1 == 0 { 1.0 } else { -1.0 };
                s[i] = si;
                pt += amps[i] * si;
            }
            points.push(pt);
            signs.push(s);
        }
        Self {
            active,
            points,
            signs,
            inv_n0: 1.0 / n0,
        }
    }

    pub fn is_active(&self, m: Message) -> bool {
        self.active.contains(&m.index())
    }

    /// Extrinsic LLR of `target` given sample `y` and prior LLRs.
    pub fn llr(&self, y: f64, prior: &[f64; 4], target: Message) -> f64 {
        let t = target.index();
        if !self.active.contains(&t) {
            return 0.0;
        }
        let mut lp = [[0.0f64; 2]; 4];
        for &i in &self.active {
            lp[i] = [log_prob_symbol(prior[i], 1.0), log_prob_symbol(prior[i], -1.0)];
        }
        self.llr_with(y, &lp, t)
    }

    /// Extrinsic LLRs for every message with `want[i]`, written to `out[i]`.
    pub fn llrs(&self, y: f64, prior: &[f64; 4], want: &[bool; 4], out: &mut [f64; 4]) {
        let mut lp = [[0.0f64; 2]; 4];
        for &i in &self.active {
            lp[i] = [log_prob_symbol(prior[i], 1.0), log_prob_symbol(prior[i], -1.0)];
        }
        for t in 0..4 {
            if want[t] {
                out[t] = if self.active.contains(&t) {
                    self.llr_with(y, &lp, t)
                } else {
                    0.0
                };
            }
        }
    }

    fn llr_with(&self, y: f64, lp: &[[f64; 2]; 4], t: usize) -> f64 {
        let mut plus = [0.0f64; 8];
        let mut minus = [0.0f64; 8];
        let (mut np, mut nm) = (0, 0);
        for (pt, s) in self.points.iter().zip(&self.signs) {
            let d = y - pt;
            let mut metric = -d * d * self.inv_n0;
            for &i in &self.active {
                if i != t {
                    metric += lp[i][(s[i] < 0.0) as usize];
                }
            }
            if s[t] > 0.0 {
                plus[np] = metric;
                np += 1;
            } else {
                minus[nm] = metric;
                nm += 1;
            }
        }
        saturate(log_sum_exp(&plus[..np]) - log_sum_exp(&minus[..nm]))
    }
}

/// LLR fed to decoder `target` at receiver `rx` for received sample `y`.
pub fn state_node_llr(y: f64, priors: &StateNodePrior, target: Message, p: &GicParameters, rx: Receiver) -> f64 {
    StateNode::new(p, rx).llr(y, &priors.llr, target)
}

/// BI-AWGN channel LLR `4 a y / N0` for amplitude `a`.
pub fn bpsk_llr(y: f64, amplitude: f64, n0: f64) -> f64 {
    saturate(4.0 * amplitude * y / n0)
}
