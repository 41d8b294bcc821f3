//! Two-user Gaussian interference channel with superimposed BPSK.
//!
//! `h_ij` is the gain from user `i` to receiver `j`:
//!
//! ```text
//! Y1 = h11 X1 + h21 X2 + Z1
//! Y2 = h12 X1 + h22 X2 + Z2
//! ```
//!
//! Signaling is real-valued; each received sample carries noise of variance
//! `N0 / 2`.

use alloc::format;
use alloc::vec::Vec;

use libm::{log10, pow, sqrt};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::substream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum User {
    One,
    Two,
}

impl User {
    pub const BOTH: [User; 2] = [User::One, User::Two];

    pub fn index(self) -> usize {
        match self {
            User::One => 0,
            User::Two => 1,
        }
    }

    pub fn other(self) -> User {
        match self {
            User::One => User::Two,
            User::Two => User::One,
        }
    }
}

/// Receivers are numbered like the users they serve.
pub type Receiver = User;

/// The four HK sub-messages: private `U` and public `W` per user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Message {
    U1,
    W1,
    U2,
    W2,
}

impl Message {
    pub const ALL: [Message; 4] = [Message::U1, Message::W1, Message::U2, Message::W2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Message {
        Message::ALL[i]
    }

    pub fn user(self) -> User {
        match self {
            Message::U1 | Message::W1 => User::One,
            Message::U2 | Message::W2 => User::Two,
        }
    }

    pub fn is_private(self) -> bool {
        matches!(self, Message::U1 | Message::U2)
    }

    pub fn private_of(user: User) -> Message {
        match user {
            User::One => Message::U1,
            User::Two => Message::U2,
        }
    }

    pub fn public_of(user: User) -> Message {
        match user {
            User::One => Message::W1,
            User::Two => Message::W2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Message::U1 => "U1",
            Message::W1 => "W1",
            Message::U2 => "U2",
            Message::W2 => "W2",
        }
    }

    pub fn parse(s: &str) -> Option<Message> {
        Message::ALL.into_iter().find(|m| m.name().eq_ignore_ascii_case(s))
    }
}

impl core::fmt::Display for Message {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGains {
    pub h11: f64,
    pub h12: f64,
    pub h21: f64,
    pub h22: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterferenceClass {
    Strong,
    Weak,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub class: InterferenceClass,
    /// Some `a_i` equals one exactly; such a receiver counts as strong.
    pub boundary: bool,
    pub a: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GicParameters {
    gains: ChannelGains,
    powers: [f64; 2],
    n0: f64,
    alphas: [f64; 2],
}

fn check_alpha(a: f64) -> Result<()> {
    if (0.0..=1.0).contains(&a) {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!("alpha {a} outside [0, 1]")))
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    pow(10.0, db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * log10(x)
}

impl GicParameters {
    pub fn new(gains: ChannelGains, powers: [f64; 2], n0: f64, alphas: [f64; 2]) -> Result<Self> {
        let g = [gains.h11, gains.h12, gains.h21, gains.h22];
        if g.iter().any(|h| !h.is_finite()) {
            return Err(Error::InvalidParameters("channel gains must be finite".into()));
        }
        if !(powers[0] > 0.0 && powers[1] > 0.0 && powers.iter().all(|p| p.is_finite())) {
            return Err(Error::InvalidParameters(format!("powers {powers:?} must be positive")));
        }
        if !(n0 > 0.0 && n0.is_finite()) {
            return Err(Error::InvalidParameters(format!("N0 = {n0} must be positive")));
        }
        check_alpha(alphas[0])?;
        check_alpha(alphas[1])?;
        Ok(Self {
            gains,
            powers,
            n0,
            alphas,
        })
    }

    /// Symmetric channel with unit direct gains, `N0 = 1`, and linear
    /// `snr`/`inr`.
    pub fn symmetric(snr: f64, inr: f64, alpha: f64) -> Result<Self> {
        if !(snr > 0.0) || inr < 0.0 {
            return Err(Error::InvalidParameters(format!("snr {snr}, inr {inr}")));
        }
        let cross = sqrt(inr / snr);
        Self::new(
            ChannelGains {
                h11: 1.0,
                h12: cross,
                h21: cross,
                h22: 1.0,
            },
            [snr, snr],
            1.0,
            [alpha, alpha],
        )
    }

    /// Unit direct gains and `N0 = 1` with per-receiver SNR/INR in dB.
    pub fn from_db(snr_db: [f64; 2], inr_db: [f64; 2], alphas: [f64; 2]) -> Result<Self> {
        let p1 = db_to_linear(snr_db[0]);
        let p2 = db_to_linear(snr_db[1]);
        // INR_1 = h21^2 P2, INR_2 = h12^2 P1.
        let h21 = sqrt(db_to_linear(inr_db[0]) / p2);
        let h12 = sqrt(db_to_linear(inr_db[1]) / p1);
        Self::new(
            ChannelGains {
                h11: 1.0,
                h12,
                h21,
                h22: 1.0,
            },
            [p1, p2],
            1.0,
            alphas,
        )
    }

    pub fn gains(&self) -> ChannelGains {
        self.gains
    }

    /// Gain from user `from` to receiver `to`.
    pub fn gain(&self, from: User, to: Receiver) -> f64 {
        match (from, to) {
            (User::One, User::One) => self.gains.h11,
            (User::One, User::Two) => self.gains.h12,
            (User::Two, User::One) => self.gains.h21,
            (User::Two, User::Two) => self.gains.h22,
        }
    }

    pub fn power(&self, user: User) -> f64 {
        self.powers[user.index()]
    }

    pub fn powers(&self) -> [f64; 2] {
        self.powers
    }

    pub fn alpha(&self, user: User) -> f64 {
        self.alphas[user.index()]
    }

    pub fn alphas(&self) -> [f64; 2] {
        self.alphas
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn noise_variance(&self) -> f64 {
        self.n0 / 2.0
    }

    pub fn with_alphas(&self, alphas: [f64; 2]) -> Result<Self> {
        Self::new(self.gains, self.powers, self.n0, alphas)
    }

    pub fn with_n0(&self, n0: f64) -> Result<Self> {
        Self::new(self.gains, self.powers, n0, self.alphas)
    }

    pub fn with_gains(&self, gains: ChannelGains) -> Result<Self> {
        Self::new(gains, self.powers, self.n0, self.alphas)
    }

    /// Rescale `N0` so that `SNR_1` equals `snr1_db`, keeping every gain and
    /// power (hence every SNR/INR ratio) fixed.
    pub fn with_snr1_db(&self, snr1_db: f64) -> Result<Self> {
        let signal = self.gains.h11 * self.gains.h11 * self.powers[0];
        self.with_n0(signal / db_to_linear(snr1_db))
    }

    /// `SNR_i = h_ii^2 P_i / N0`.
    pub fn snr(&self, rx: Receiver) -> f64 {
        let h = self.gain(rx, rx);
        h * h * self.power(rx) / self.n0
    }

    /// `INR_i = h_ji^2 P_j / N0`.
    pub fn inr(&self, rx: Receiver) -> f64 {
        let h = self.gain(rx.other(), rx);
        h * h * self.power(rx.other()) / self.n0
    }

    /// `a_i = INR_i / SNR_i`.
    pub fn interference_ratio(&self, rx: Receiver) -> f64 {
        self.inr(rx) / self.snr(rx)
    }

    pub fn classify(&self) -> Classification {
        let a = [self.interference_ratio(User::One), self.interference_ratio(User::Two)];
        let boundary = a.contains(&1.0);
        let strong = [a[0] >= 1.0, a[1] >= 1.0];
        let class = match strong {
            [true, true] => InterferenceClass::Strong,
            [false, false] => InterferenceClass::Weak,
            _ => InterferenceClass::Mixed,
        };
        Classification { class, boundary, a }
    }

    /// Transmit amplitude of every message, before the channel gain.
    pub fn message_amplitude(&self, m: Message) -> f64 {
        let u = m.user();
        let share = if m.is_private() {
            self.alpha(u)
        } else {
            1.0 - self.alpha(u)
        };
        sqrt(share * self.power(u))
    }

    /// Noiseless contribution of each message's `+1` symbol at receiver `rx`,
    /// indexed by [`Message::index`].
    pub fn receiver_amplitudes(&self, rx: Receiver) -> [f64; 4] {
        let mut out = [0.0; 4];
        for m in Message::ALL {
            out[m.index()] = self.gain(m.user(), rx) * self.message_amplitude(m);
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.gains.h11 == self.gains.h22 && self.gains.h12 == self.gains.h21 && self.powers[0] == self.powers[1]
    }
}

/// Superimposed BPSK:
/// `X = sqrt(αP)(1 - 2 c_u) + sqrt((1 - α)P)(1 - 2 c_w)`.
pub fn modulate_hk(c_u: &[u8], c_w: &[u8], power: f64, alpha: f64) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    if c_u.len() != c_w.len() {
        return Err(Error::DimensionMismatch(format!(
            "private plane has {} bits, public plane {}",
            c_u.len(),
            c_w.len()
        )));
    }
    let au = sqrt(alpha * power);
    let aw = sqrt((1.0 - alpha) * power);
    Ok(c_u
        .iter()
        .zip(c_w)
        .map(|(&u, &w)| au * antipodal(u) + aw * antipodal(w))
        .collect())
}

#[inline]
pub fn antipodal(bit: u8) -> f64 {
    1.0 - 2.0 * (bit & 1) as f64
}

/// One block of channel uses at both receivers.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelBlock {
    pub y: [Vec<f64>; 2],
    pub x: [Vec<f64>; 2],
    /// Bit planes indexed by [`Message::index`]; `None` where a message
    /// carries no power.
    pub bits: [Option<Vec<u8>>; 4],
}

impl ChannelBlock {
    pub fn len(&self) -> usize {
        self.y[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn received(&self, rx: Receiver) -> &[f64] {
        &self.y[rx.index()]
    }
}

/// Send the four bit planes through the channel.
///
/// A plane may be `None` only when its message has zero power; it is then
/// treated as all-zero and omitted from the block.
pub fn transmit(p: &GicParameters, bits: [Option<&[u8]>; 4], seed: u64) -> Result<ChannelBlock> {
    let n = bits
        .iter()
        .flatten()
        .map(|b| b.len())
        .next()
        .ok_or_else(|| Error::DimensionMismatch("no bit planes supplied".into()))?;
    for (i, b) in bits.iter().enumerate() {
        let m = Message::from_index(i);
        match b {
            Some(b) if b.len() != n => {
                return Err(Error::DimensionMismatch(format!(
                    "plane {m} has {} bits, expected {n}",
                    b.len()
                )))
            }
            None if p.message_amplitude(m) > 0.0 => {
                return Err(Error::InvalidParameters(format!(
                    "message {m} has power but no bit plane"
                )))
            }
            _ => {}
        }
    }
    let zeros = alloc::vec![0u8; n];
    let plane = |m: Message| bits[m.index()].unwrap_or(&zeros);
    let x1 = modulate_hk(
        plane(Message::U1),
        plane(Message::W1),
        p.power(User::One),
        p.alpha(User::One),
    )?;
    let x2 = modulate_hk(
        plane(Message::U2),
        plane(Message::W2),
        p.power(User::Two),
        p.alpha(User::Two),
    )?;
    let sigma = sqrt(p.noise_variance());
    let mut y = [Vec::with_capacity(n), Vec::with_capacity(n)];
    for rx in User::BOTH {
        let mut rng = substream(seed, &[0xc4a7, rx.index() as u64]);
        let g1 = p.gain(User::One, rx);
        let g2 = p.gain(User::Two, rx);
        for k in 0..n {
            let z: f64 = StandardNormal.sample(&mut rng);
            y[rx.index()].push(g1 * x1[k] + g2 * x2[k] + sigma * z);
        }
    }
    let owned = |i: usize| {
        let m = Message::from_index(i);
        bits[i].filter(|_| p.message_amplitude(m) > 0.0).map(|b| b.to_vec())
    };
    Ok(ChannelBlock {
        y,
        x: [x1, x2],
        bits: [owned(0), owned(1), owned(2), owned(3)],
    })
}

/// One slot of a time-sharing schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsSlot {
    pub fraction: f64,
    pub powers: [f64; 2],
}

/// Piecewise-constant power schedule over a codeword.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSharingSchedule {
    pub slots: Vec<TsSlot>,
}

impl TimeSharingSchedule {
    /// Per-symbol powers fixed at `P_i`: user 1 alone for `tau`, then user 2.
    pub fn naive(p: &GicParameters, tau: f64) -> Self {
        Self {
            slots: alloc::vec![
                TsSlot {
                    fraction: tau,
                    powers: [p.power(User::One), 0.0],
                },
                TsSlot {
                    fraction: 1.0 - tau,
                    powers: [0.0, p.power(User::Two)],
                },
            ],
        }
    }

    /// Each user concentrates its energy into its own slot.
    pub fn pooled(p: &GicParameters, tau: f64) -> Self {
        Self {
            slots: alloc::vec![
                TsSlot {
                    fraction: tau,
                    powers: [p.power(User::One) / tau, 0.0],
                },
                TsSlot {
                    fraction: 1.0 - tau,
                    powers: [0.0, p.power(User::Two) / (1.0 - tau)],
                },
            ],
        }
    }

    pub fn average_total_power(&self) -> f64 {
        self.slots
            .iter()
            .map(|s| s.fraction * (s.powers[0] + s.powers[1]))
            .sum()
    }

    /// Total-power constraint `(1/n) Σ_k (P_1k + P_2k) <= P1 + P2`.
    pub fn satisfies_total_power(&self, p: &GicParameters) -> bool {
        self.average_total_power() <= p.power(User::One) + p.power(User::Two) + 1e-9
    }

    /// Per-symbol powers never exceed `P_i`.
    pub fn satisfies_per_user_power(&self, p: &GicParameters) -> bool {
        self.slots
            .iter()
            .all(|s| s.powers[0] <= p.power(User::One) + 1e-12 && s.powers[1] <= p.power(User::Two) + 1e-12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn unit(h12: f64, h21: f64) -> GicParameters {
        GicParameters::new(
            ChannelGains {
                h11: 1.0,
                h12,
                h21,
                h22: 1.0,
            },
            [1.0, 1.0],
            1.0,
            [0.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn classification() {
        let s = unit(2.0, 2.0).classify();
        assert_eq!(s.class, InterferenceClass::Strong);
        assert_eq!(s.a, [4.0, 4.0]);
        assert_eq!(unit(0.5, 0.5).classify().class, InterferenceClass::Weak);
        // a1 = h21^2 = 4, a2 = h12^2 = 0.25.
        let mixed = unit(0.5, 2.0).classify();
        assert_eq!(mixed.class, InterferenceClass::Mixed);
        assert_eq!(mixed.a, [4.0, 0.25]);
        let edge = unit(1.0, 2.0).classify();
        assert!(edge.boundary);
        assert_eq!(edge.class, InterferenceClass::Strong);
    }

    #[test]
    fn invalid_parameters() {
        let g = ChannelGains {
            h11: 1.0,
            h12: 1.0,
            h21: 1.0,
            h22: 1.0,
        };
        assert!(GicParameters::new(g, [0.0, 1.0], 1.0, [0.0, 0.0]).is_err());
        assert!(GicParameters::new(g, [1.0, 1.0], 0.0, [0.0, 0.0]).is_err());
        assert!(GicParameters::new(g, [1.0, 1.0], 1.0, [1.5, 0.0]).is_err());
    }

    #[test]
    fn superimposed_constellation() {
        assert_eq!(modulate_hk(&[0], &[0], 4.0, 0.0).unwrap(), alloc::vec![2.0]);
        let x = modulate_hk(&[0], &[1], 2.0, 0.5).unwrap();
        assert!(x[0].abs() < 1e-15);
        let pts = modulate_hk(&[0, 0, 1, 1], &[0, 1, 0, 1], 1.0, 0.2).unwrap();
        let outer = sqrt(0.2) + sqrt(0.8);
        let inner = sqrt(0.8) - sqrt(0.2);
        assert!((pts[0] - outer).abs() < 1e-15);
        assert!((pts[1] + inner).abs() < 1e-15);
        assert!((pts[2] - inner).abs() < 1e-15);
        assert!((pts[3] + outer).abs() < 1e-15);
        assert!((outer - 1.341_640_786_5).abs() < 1e-9);
        assert!((inner - 0.447_213_595_5).abs() < 1e-9);
        // Uniform bit pairs give average energy exactly P.
        let energy: f64 = pts.iter().map(|x| x * x).sum::<f64>() / 4.0;
        assert!((energy - 1.0).abs() < 1e-15);
        assert!(modulate_hk(&[0], &[0], 1.0, -0.1).is_err());
        assert!(modulate_hk(&[0, 1], &[0], 1.0, 0.1).is_err());
    }

    #[test]
    fn noiseless_transmission_is_exact() {
        let p = unit(0.7, 1.3).with_n0(1e-12).unwrap();
        let mut rng = substream(3, &[]);
        let w1: Vec<u8> = (0..500).map(|_| rng.random_range(0..2)).collect();
        let w2: Vec<u8> = (0..500).map(|_| rng.random_range(0..2)).collect();
        let b = transmit(&p, [None, Some(&w1), None, Some(&w2)], 9).unwrap();
        for k in 0..500 {
            let clean = b.x[0][k] + 1.3 * b.x[1][k];
            assert!((b.y[0][k] - clean).abs() < 1e-5);
        }
        assert_eq!(b, transmit(&p, [None, Some(&w1), None, Some(&w2)], 9).unwrap());
        assert!(b.bits[0].is_none());
    }

    #[test]
    fn missing_plane_with_power_is_rejected() {
        let p = unit(1.0, 1.0).with_alphas([0.3, 0.0]).unwrap();
        let w = alloc::vec![0u8; 8];
        assert!(transmit(&p, [None, Some(&w), None, Some(&w)], 1).is_err());
        let short = alloc::vec![0u8; 7];
        assert!(transmit(&p, [Some(&short), Some(&w), None, Some(&w)], 1).is_err());
    }

    #[test]
    fn symmetric_constructor_is_exact() {
        let p = GicParameters::symmetric(3.7, 9.1, 0.2).unwrap();
        assert_eq!(p.snr(User::One), p.snr(User::Two));
        assert_eq!(p.inr(User::One), p.inr(User::Two));
        assert!(p.is_symmetric());
    }

    #[test]
    fn snr_rescaling_keeps_ratios() {
        let p = GicParameters::from_db([3.0, 1.0], [6.0, 4.0], [0.0, 0.0]).unwrap();
        assert!((linear_to_db(p.snr(User::Two)) - 1.0).abs() < 1e-12);
        assert!((linear_to_db(p.inr(User::One)) - 6.0).abs() < 1e-12);
        let q = p.with_snr1_db(-2.0).unwrap();
        assert!((linear_to_db(q.snr(User::One)) + 2.0).abs() < 1e-12);
        assert!((q.interference_ratio(User::Two) - p.interference_ratio(User::Two)).abs() < 1e-12);
    }

    #[test]
    fn time_sharing_power_bookkeeping() {
        let p = GicParameters::from_db([2.0, 5.0], [4.0, 7.0], [0.0, 0.0]).unwrap();
        for k in 1..20 {
            let tau = k as f64 / 20.0;
            let pooled = TimeSharingSchedule::pooled(&p, tau);
            assert!(pooled.satisfies_total_power(&p));
            assert!((pooled.average_total_power() - p.power(User::One) - p.power(User::Two)).abs() < 1e-9);
            let naive = TimeSharingSchedule::naive(&p, tau);
            assert!(naive.satisfies_per_user_power(&p));
            assert!(naive.satisfies_total_power(&p));
        }
    }
}
