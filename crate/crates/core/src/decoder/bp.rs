use alloc::vec::Vec;

use crate::ensemble::ParityCheckMatrix;
use crate::math::{atanh_product, half_tanh, saturate};

/// Flooding sum-product decoder whose edge messages persist across rounds.
#[derive(Debug, Clone)]
pub struct BpDecoder<'a> {
    h: &'a ParityCheckMatrix,
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    iterations: usize,
    tanh: Vec<f64>,
    prefix: Vec<f64>,
}

/// Result of one decoding round.
#[derive(Debug, Clone, PartialEq)]
pub struct BpOutput {
    /// Channel LLR plus all check messages.
    pub posterior: Vec<f64>,
    /// Sum of all check messages, the value handed back to the state node.
    pub extrinsic: Vec<f64>,
    /// Hard decisions; `L = 0` decides 0.
    pub hard: Vec<u8>,
}

impl<'a> BpDecoder<'a> {
    pub fn new(h: &'a ParityCheckMatrix) -> Self {
        Self {
            h,
            v2c: alloc::vec![0.0; h.num_edges()],
            c2v: alloc::vec![0.0; h.num_edges()],
            iterations: 0,
            tanh: Vec::new(),
            prefix: Vec::new(),
        }
    }

    pub fn matrix(&self) -> &'a ParityCheckMatrix {
        self.h
    }

    pub fn reset(&mut self) {
        self.v2c.iter_mut().for_each(|x| *x = 0.0);
        self.c2v.iter_mut().for_each(|x| *x = 0.0);
        self.iterations = 0;
    }

    /// Total iterations run since construction or reset.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Variable-to-check messages in edge order.
    pub fn variable_to_check(&self) -> &[f64] {
        &self.v2c
    }

    /// Check-to-variable messages in edge order.
    pub fn check_to_variable(&self) -> &[f64] {
        &self.c2v
    }

    /// Run `iters` flooding iterations against `channel`, then read out.
    pub fn round(&mut self, channel: &[f64], iters: usize) -> BpOutput {
        assert_eq!(channel.len(), self.h.n(), "channel length");
        for _ in 0..iters {
            self.variable_update(channel);
            self.check_update();
            self.iterations += 1;
        }
        self.output(channel)
    }

    fn variable_update(&mut self, channel: &[f64]) {
        for (v, &ch) in channel.iter().enumerate() {
            let edges = self.h.variable_edges(v);
            let total: f64 = ch + self.c2v[edges.clone()].iter().sum::<f64>();
            for e in edges {
                self.v2c[e] = saturate(total - self.c2v[e]);
            }
        }
    }

    fn check_update(&mut self) {
        let h = self.h;
        for c in 0..h.m() {
            let edges = h.check_edges(c);
            self.tanh.clear();
            self.prefix.clear();
            let mut forward = 1.0;
            for &e in edges {
                let t = half_tanh(self.v2c[e as usize]);
                self.prefix.push(forward);
                self.tanh.push(t);
                forward *= t;
            }
            let mut backward = 1.0;
            for (k, &e) in edges.iter().enumerate().rev() {
                self.c2v[e as usize] = atanh_product(self.prefix[k] * backward);
                backward *= self.tanh[k];
            }
        }
    }

    fn output(&self, channel: &[f64]) -> BpOutput {
        let n = self.h.n();
        let mut posterior = Vec::with_capacity(n);
        let mut extrinsic = Vec::with_capacity(n);
        let mut hard = Vec::with_capacity(n);
        for (v, &ch) in channel.iter().enumerate() {
            let ext: f64 = self.c2v[self.h.variable_edges(v)].iter().sum();
            let post = saturate(ch + ext);
            extrinsic.push(saturate(ext));
            posterior.push(post);
            hard.push((post < 0.0) as u8);
        }
        BpOutput {
            posterior,
            extrinsic,
            hard,
        }
    }
}

/// Stand-alone point-to-point decoding with syndrome-based early stop.
///
/// Returns the hard decisions and the number of iterations used.
pub fn decode_p2p(h: &ParityCheckMatrix, channel: &[f64], max_iters: usize) -> (Vec<u8>, usize) {
    let mut dec = BpDecoder::new(h);
    let mut out = dec.round(channel, 0);
    while dec.iterations() < max_iters {
        out = dec.round(channel, 1);
        if h.syndrome_weight(&out.hard) == 0 {
            break;
        }
    }
    (out.hard, dec.iterations())
}
