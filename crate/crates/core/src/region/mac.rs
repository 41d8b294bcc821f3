use alloc::vec::Vec;

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use super::quadrature::{GaussHermite, DEFAULT_NODES};
use crate::gic::{GicParameters, Message, Receiver};
use crate::hk::{decoded_set, interferer_private};
use crate::math::log_sum_exp;
use crate::rng::substream;

const LN_2: f64 = core::f64::consts::LN_2;

/// Finite-constellation model of one receiver: the decoded messages, their
/// amplitudes, and the undecoded interferer private signal folded into the
/// noise as a two-point mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverConstellation {
    pub messages: Vec<Message>,
    pub amplitudes: Vec<f64>,
    pub nuisance: f64,
    pub sigma: f64,
}

impl ReceiverConstellation {
    pub fn new(p: &GicParameters, rx: Receiver) -> Self {
        let amps = p.receiver_amplitudes(rx);
        let messages = decoded_set(p, rx);
        Self {
            amplitudes: messages.iter().map(|m| amps[m.index()]).collect(),
            messages,
            nuisance: amps[interferer_private(rx).index()],
            sigma: libm::sqrt(p.noise_variance()),
        }
    }

    fn point(&self, x: usize, u: usize) -> f64 {
        let mut pt = if u == 0 { self.nuisance } else { -self.nuisance };
        for (k, &a) in self.amplitudes.iter().enumerate() {
            pt += if x >> k & 1 == 0 { a } else { -a };
        }
        pt
    }

    fn nuisance_states(&self) -> usize {
        if self.nuisance == 0.0 {
            1
        } else {
            2
        }
    }

    /// `log2 p(y | x_G)` minus a constant, for the assignment `x` restricted
    /// to mask `given`, with the other decoded bits marginalized.
    fn log_likelihood(&self, y: f64, x: usize, given: usize, buf: &mut Vec<f64>) -> f64 {
        let d = self.messages.len();
        let free = !given & ((1 << d) - 1);
        buf.clear();
        let inv = 1.0 / (2.0 * self.sigma * self.sigma);
        // Iterate the subsets of the free mask.
        let mut sub = free;
        loop {
            let xx = (x & given) | sub;
            for u in 0..self.nuisance_states() {
                let e = y - self.point(xx, u);
                buf.push(-e * e * inv);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & free;
        }
        (log_sum_exp(buf) - libm::log(buf.len() as f64)) / LN_2
    }

    /// `I(X_T; Y | X_C)` in bits by Gauss-Hermite quadrature over the noise.
    pub fn conditional_mi(&self, gh: &GaussHermite, target: usize, condition: usize) -> f64 {
        let d = self.messages.len();
        if target == 0 || d == 0 {
            return 0.0;
        }
        let outer = target | condition;
        let mut buf = Vec::with_capacity(32);
        let mut acc = 0.0;
        let nu = self.nuisance_states();
        for x in 0..1usize << d {
            for u in 0..nu {
                let mean = self.point(x, u);
                acc += gh.expect_normal(|z| {
                    let y = mean + self.sigma * z;
                    self.log_likelihood(y, x, outer, &mut buf) - self.log_likelihood(y, x, condition, &mut buf)
                });
            }
        }
        (acc / ((1usize << d) * nu) as f64).max(0.0)
    }

    /// Monte-Carlo estimate of the same quantity with antithetic noise pairs.
    /// Returns the estimate and its standard error.
    pub fn conditional_mi_mc(&self, target: usize, condition: usize, samples: usize, seed: u64) -> (f64, f64) {
        let d = self.messages.len();
        if target == 0 || d == 0 {
            return (0.0, 0.0);
        }
        let outer = target | condition;
        let mut rng = substream(seed, &[0x3ac, target as u64, condition as u64]);
        let mut buf = Vec::with_capacity(32);
        let pairs = samples.div_ceil(2);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..pairs {
            let x = (rng.next_u32() as usize) & ((1 << d) - 1);
            let u = if self.nuisance_states() == 2 {
                (rng.next_u32() & 1) as usize
            } else {
                0
            };
            let z: f64 = rng.sample(StandardNormal);
            let mean = self.point(x, u);
            let mut v = 0.0;
            for y in [mean + self.sigma * z, mean - self.sigma * z] {
                v += self.log_likelihood(y, x, outer, &mut buf) - self.log_likelihood(y, x, condition, &mut buf);
            }
            v *= 0.5;
            s += v;
            s2 += v * v;
        }
        let n = pairs as f64;
        let mean = s / n;
        let var = (s2 / n - mean * mean).max(0.0);
        (mean, libm::sqrt(var / n))
    }

    pub fn mask_of(&self, set: &[Message]) -> Option<usize> {
        let mut mask = 0;
        for m in set {
            mask |= 1 << self.messages.iter().position(|k| k == m)?;
        }
        Some(mask)
    }
}

/// The seven (or fewer) MAC constants `I(X_S; Y | X_{D \ S})` of a receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct MacConstants {
    pub receiver: Receiver,
    pub messages: Vec<Message>,
    /// Indexed by subset mask over `messages`; entry 0 is unused.
    pub values: Vec<f64>,
}

impl MacConstants {
    pub fn get(&self, set: &[Message]) -> Option<f64> {
        let mut mask = 0usize;
        for m in set {
            mask |= 1 << self.messages.iter().position(|k| k == m)?;
        }
        (mask != 0).then(|| self.values[mask])
    }

    /// Nonempty subsets and their constants.
    pub fn subsets(&self) -> impl Iterator<Item = (Vec<Message>, f64)> + '_ {
        (1..self.values.len()).map(move |mask| {
            let set = (0..self.messages.len())
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| self.messages[k])
                .collect();
            (set, self.values[mask])
        })
    }

    /// Whether the split rates (indexed by message) satisfy every constraint.
    /// With `keep_interferer_public` false the singleton bound on the other
    /// user's public message is skipped.
    pub fn admits(&self, rates: &[f64; 4], keep_interferer_public: bool, tol: f64) -> bool {
        let skip = Message::public_of(self.receiver.other());
        self.subsets().all(|(set, bound)| {
            if !keep_interferer_public && set.len() == 1 && set[0] == skip {
                return true;
            }
            set.iter().map(|m| rates[m.index()]).sum::<f64>() <= bound + tol
        })
    }
}

/// MAC constants of receiver `rx` by quadrature.
pub fn mac_mutual_informations(p: &GicParameters, rx: Receiver) -> MacConstants {
    mac_mutual_informations_with(&GaussHermite::new(DEFAULT_NODES), p, rx)
}

pub fn mac_mutual_informations_with(gh: &GaussHermite, p: &GicParameters, rx: Receiver) -> MacConstants {
    let c = ReceiverConstellation::new(p, rx);
    let full = (1usize << c.messages.len()) - 1;
    let values = (0..=full)
        .map(|s| {
            if s == 0 {
                0.0
            } else {
                c.conditional_mi(gh, s, full & !s)
            }
        })
        .collect();
    MacConstants {
        receiver: rx,
        messages: c.messages,
        values,
    }
}

/// Monte-Carlo counterpart, each constant from `samples` antithetic draws.
pub fn mac_mutual_informations_mc(p: &GicParameters, rx: Receiver, samples: usize, seed: u64) -> MacConstants {
    let c = ReceiverConstellation::new(p, rx);
    let full = (1usize << c.messages.len()) - 1;
    let values = (0..=full)
        .map(|s| {
            if s == 0 {
                0.0
            } else {
                c.conditional_mi_mc(s, full & !s, samples, seed).0.max(0.0)
            }
        })
        .collect();
    MacConstants {
        receiver: rx,
        messages: c.messages,
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gic::{ChannelGains, User};
    use crate::region::bpsk_awgn_capacity;

    #[test]
    fn isolated_receiver_reduces_to_bpsk_capacity() {
        let p = GicParameters::new(
            ChannelGains {
                h11: 1.0,
                h12: 0.0,
                h21: 0.0,
                h22: 0.7,
            },
            [1.3, 0.8],
            1.1,
            [0.0, 0.0],
        )
        .unwrap();
        let c = mac_mutual_informations(&p, User::One);
        assert_eq!(c.messages, alloc::vec![Message::W1]);
        let want = bpsk_awgn_capacity(p.snr(User::One));
        assert!((c.get(&[Message::W1]).unwrap() - want).abs() < 1e-6);
    }

    #[test]
    fn chain_rule_holds() {
        let p = GicParameters::from_db([3.0, 3.0], [1.0, 1.0], [0.3, 0.2]).unwrap();
        let gh = GaussHermite::new(DEFAULT_NODES);
        let c = ReceiverConstellation::new(&p, User::One);
        assert_eq!(c.messages.len(), 3);
        let full = 0b111;
        let total = c.conditional_mi(&gh, full, 0);
        for s in 1..full {
            let split = c.conditional_mi(&gh, s, 0) + c.conditional_mi(&gh, full & !s, s);
            assert!((total - split).abs() < 1e-6, "{s}: {total} vs {split}");
        }
    }

    #[test]
    fn quadrature_agrees_with_monte_carlo() {
        let p = GicParameters::from_db([2.0, 2.0], [4.0, 4.0], [0.25, 0.0]).unwrap();
        let q = mac_mutual_informations(&p, User::One);
        let c = ReceiverConstellation::new(&p, User::One);
        let full = (1 << c.messages.len()) - 1;
        for s in 1..=full {
            let (mc, se) = c.conditional_mi_mc(s, full & !s, 200_000, 5);
            assert!(
                (mc - q.values[s]).abs() < (4.0 * se).max(0.002),
                "{s}: {mc} vs {}",
                q.values[s]
            );
        }
    }

    #[test]
    fn more_noise_lowers_every_constant() {
        let p = GicParameters::from_db([4.0, 3.0], [2.0, 5.0], [0.2, 0.3]).unwrap();
        let q = p.with_n0(2.0 * p.n0()).unwrap();
        for rx in User::BOTH {
            let a = mac_mutual_informations(&p, rx);
            let b = mac_mutual_informations(&q, rx);
            for s in 1..a.values.len() {
                assert!(b.values[s] < a.values[s]);
            }
        }
    }

    #[test]
    fn admits_respects_singleton_flag() {
        let c = MacConstants {
            receiver: User::One,
            messages: alloc::vec![Message::W1, Message::W2],
            values: alloc::vec![0.0, 0.5, 0.2, 0.9],
        };
        let rates = [0.0, 0.5, 0.0, 0.3];
        assert!(!c.admits(&rates, true, 1e-9));
        assert!(c.admits(&rates, false, 1e-9));
    }
}
