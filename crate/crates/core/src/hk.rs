//! Han-Kobayashi code sets and per-receiver decoding sets.

use alloc::format;
use alloc::vec::Vec;

use crate::ensemble::DegreeDistribution;
use crate::error::{Error, Result};
use crate::gic::{GicParameters, Message, Receiver, User};

/// Up to four ensembles, one per sub-message.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HkCodeSet {
    codes: [Option<DegreeDistribution>; 4],
}

impl HkCodeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, m: Message, d: DegreeDistribution) -> Self {
        self.codes[m.index()] = Some(d);
        self
    }

    pub fn set(&mut self, m: Message, d: DegreeDistribution) {
        self.codes[m.index()] = Some(d);
    }

    pub fn get(&self, m: Message) -> Option<&DegreeDistribution> {
        self.codes[m.index()].as_ref()
    }

    pub fn messages(&self) -> impl Iterator<Item = Message> + '_ {
        Message::ALL.into_iter().filter(|m| self.codes[m.index()].is_some())
    }

    /// Design rate of message `m`, zero when it has no code.
    pub fn rate(&self, m: Message) -> f64 {
        self.get(m).and_then(|d| d.design_rate().ok()).unwrap_or(0.0)
    }

    pub fn user_rate(&self, u: User) -> f64 {
        self.rate(Message::private_of(u)) + self.rate(Message::public_of(u))
    }

    /// `(R1, R2)` with `R_i = R_Ui + R_Wi`.
    pub fn rate_pair(&self) -> (f64, f64) {
        (self.user_rate(User::One), self.user_rate(User::Two))
    }

    pub fn sum_rate(&self) -> f64 {
        let (a, b) = self.rate_pair();
        a + b
    }

    /// Ensure every message decoded at `receivers` has a code.
    pub fn check_covers(&self, p: &GicParameters, receivers: &[Receiver]) -> Result<()> {
        for &rx in receivers {
            for m in decoded_set(p, rx) {
                if self.get(m).is_none() {
                    return Err(Error::InvalidConfig(format!(
                        "message {m} is decoded at receiver {} but has no code",
                        rx.index() + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Messages receiver `rx` decodes: its own private and public messages and
/// the interferer's public message, skipping any that are absent (zero
/// amplitude) at `rx`. The interferer's private message is never decoded.
pub fn decoded_set(p: &GicParameters, rx: Receiver) -> Vec<Message> {
    let amps = p.receiver_amplitudes(rx);
    [
        Message::private_of(rx),
        Message::public_of(rx),
        Message::public_of(rx.other()),
    ]
    .into_iter()
    .filter(|m| amps[m.index()] != 0.0)
    .collect()
}

/// The message treated as structured noise at `rx`.
pub fn interferer_private(rx: Receiver) -> Message {
    Message::private_of(rx.other())
}
