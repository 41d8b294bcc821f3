//! Scenario files.
//!
//! A scenario is one TOML document. Physical quantities are linear unless a
//! `_db` key is used; the two spellings of the channel are mutually
//! exclusive. The seed is mandatory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use gic_ldpc_core::density::DensityConfig;
use gic_ldpc_core::ensemble::{initial_distribution, OPTIMIZER_DEGREES};
use gic_ldpc_core::gic::{ChannelGains, GicParameters, Message, User};
use gic_ldpc_core::hk::HkCodeSet;
use serde::Deserialize;

use crate::error::HarnessError;
use crate::formats::read_distribution;

type Result<T> = std::result::Result<T, HarnessError>;

fn cfg_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    pub channel: ChannelSection,
    /// Distribution files per message (`u1`, `w1`, `u2`, `w2`).
    #[serde(default)]
    pub codes: BTreeMap<String, PathBuf>,
    #[serde(default)]
    pub decoding: DecodingSection,
    #[serde(default)]
    pub optimize: OptimizeSection,
    #[serde(default)]
    pub density: DensitySection,
    #[serde(default)]
    pub certify: CertifySection,
    #[serde(default)]
    pub region: RegionSection,
    #[serde(default)]
    pub ber: BerSection,
}

fn default_out() -> PathBuf {
    PathBuf::from("runs")
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    #[serde(default)]
    pub modulation: Option<String>,
    pub h11: Option<f64>,
    pub h12: Option<f64>,
    pub h21: Option<f64>,
    pub h22: Option<f64>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub n0: Option<f64>,
    pub snr_db: Option<[f64; 2]>,
    pub inr_db: Option<[f64; 2]>,
    /// Private power fractions.
    #[serde(default)]
    pub alpha: [f64; 2],
}

/// Optional explicit decoding sets; by default every receiver decodes its
/// own messages and the interferer's public message.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecodingSection {
    pub rx1: Option<Vec<String>>,
    pub rx2: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default)]
    pub k: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_patience")]
    pub patience: usize,
    pub max_accepted: Option<usize>,
    /// Private-fraction values tried for both users (Cartesian grid).
    #[serde(default)]
    pub alpha_values: Vec<f64>,
    /// Starting design rates for messages without a code file.
    #[serde(default)]
    pub initial_rates: BTreeMap<String, f64>,
    #[serde(default = "default_dc")]
    pub initial_check_degree: u32,
    #[serde(default = "yes")]
    pub mac_check: bool,
}

impl Default for OptimizeSection {
    fn default() -> Self {
        Self {
            enabled: true,
            k: 0.0,
            delta: default_delta(),
            patience: default_patience(),
            max_accepted: None,
            alpha_values: Vec::new(),
            initial_rates: BTreeMap::new(),
            initial_check_degree: default_dc(),
            mac_check: true,
        }
    }
}

fn yes() -> bool {
    true
}
fn default_delta() -> f64 {
    0.005
}
fn default_patience() -> usize {
    50
}
fn default_dc() -> u32 {
    5
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DensitySection {
    pub population: usize,
    pub min_population: usize,
    pub rounds_max: usize,
    pub inner_iters: usize,
    pub mi_epsilon: f64,
    pub stall_window: usize,
    pub stall_tolerance: f64,
}

impl Default for DensitySection {
    fn default() -> Self {
        let d = DensityConfig::default();
        Self {
            population: 20_000,
            min_population: d.min_population,
            rounds_max: d.rounds_max,
            inner_iters: d.inner_iters,
            mi_epsilon: d.mi_epsilon,
            stall_window: d.stall_window,
            stall_tolerance: d.stall_tolerance,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySection {
    #[serde(default = "yes")]
    pub enabled: bool,
    /// SNR1 bracket in dB for a threshold search; omitted skips the search.
    pub threshold_bracket_db: Option<[f64; 2]>,
    #[serde(default = "default_tol")]
    pub threshold_tol_db: f64,
}

impl Default for CertifySection {
    fn default() -> Self {
        Self {
            enabled: true,
            threshold_bracket_db: None,
            threshold_tol_db: default_tol(),
        }
    }
}

fn default_tol() -> f64 {
    0.05
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSection {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default = "default_alpha_values")]
    pub alpha_values: Vec<f64>,
    #[serde(default = "default_ts_steps")]
    pub ts_steps: usize,
    #[serde(default = "yes")]
    pub keep_interferer_public: bool,
}

impl Default for RegionSection {
    fn default() -> Self {
        Self {
            enabled: true,
            alpha_values: default_alpha_values(),
            ts_steps: default_ts_steps(),
            keep_interferer_public: true,
        }
    }
}

fn default_alpha_values() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 0.75, 1.0]
}
fn default_ts_steps() -> usize {
    50
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BerSection {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default = "default_n")]
    pub block_length: usize,
    /// Absolute SNR1 points in dB.
    pub points_db: Option<Vec<f64>>,
    /// Points relative to the certified threshold; needs a threshold search.
    pub offsets_db: Option<Vec<f64>>,
    #[serde(default = "default_target")]
    pub ber_target: f64,
    /// Stop a point once the worst message has this many errors.
    #[serde(default = "default_min_errors")]
    pub min_errors: u64,
    /// Block cap per point; by default just enough bits to certify the target.
    pub max_blocks: Option<usize>,
    #[serde(default = "default_rounds")]
    pub rounds_max: usize,
    #[serde(default = "default_inner")]
    pub inner_iters: usize,
    #[serde(default = "default_cap")]
    pub total_iter_cap: usize,
    /// Blocks whose per-round trace is archived, per point.
    #[serde(default = "default_traced")]
    pub traced_blocks: usize,
}

impl Default for BerSection {
    fn default() -> Self {
        Self {
            enabled: false,
            block_length: default_n(),
            points_db: None,
            offsets_db: None,
            ber_target: default_target(),
            min_errors: default_min_errors(),
            max_blocks: None,
            rounds_max: default_rounds(),
            inner_iters: default_inner(),
            total_iter_cap: default_cap(),
            traced_blocks: default_traced(),
        }
    }
}

fn default_n() -> usize {
    10_000
}
fn default_target() -> f64 {
    1e-4
}
fn default_min_errors() -> u64 {
    100
}
fn default_rounds() -> usize {
    250
}
fn default_inner() -> usize {
    2
}
fn default_cap() -> usize {
    500
}
fn default_traced() -> usize {
    1
}

/// A parsed and checked scenario, with code files loaded.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    /// Original text, archived with every run.
    pub source: String,
    pub channel: GicParameters,
    /// Distributions loaded from `[codes]`.
    pub preloaded: HkCodeSet,
    pub decoded_sets: [Option<Vec<Message>>; 2],
}

pub fn parse_message(s: &str) -> Result<Message> {
    Message::parse(s).ok_or_else(|| cfg_err(format!("unknown message \"{s}\" (expected u1, w1, u2 or w2)")))
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| cfg_err(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Parse `text`, resolving relative file references against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut file: ScenarioFile = toml::from_str(text).map_err(|e| cfg_err(e.to_string()))?;
        if file.out_dir.is_relative() {
            file.out_dir = base.join(&file.out_dir);
        }
        let channel = resolve_channel(&file.channel)?;

        let mut preloaded = HkCodeSet::new();
        for (key, rel) in &file.codes {
            let m = parse_message(key)?;
            let path = if rel.is_relative() { base.join(rel) } else { rel.clone() };
            if !path.is_file() {
                return Err(cfg_err(format!("code file for {key} not found: {}", path.display())));
            }
            let d = read_distribution(&path).map_err(|e| cfg_err(format!("{e:#}")))?;
            preloaded.set(m, d);
        }

        let decoded_sets = [&file.decoding.rx1, &file.decoding.rx2].map(|s| {
            s.as_ref()
                .map(|names| names.iter().map(|n| parse_message(n)).collect::<Result<Vec<_>>>())
                .transpose()
        });
        let [a, b] = decoded_sets;
        let decoded_sets = [a?, b?];
        for (i, set) in decoded_sets.iter().enumerate() {
            if let Some(set) = set {
                let rx = if i == 0 { User::One } else { User::Two };
                if set.contains(&Message::private_of(rx.other())) {
                    return Err(cfg_err(format!(
                        "receiver {} cannot decode the interferer's private message",
                        i + 1
                    )));
                }
            }
        }

        let s = Self {
            file,
            source: text.to_string(),
            channel,
            preloaded,
            decoded_sets,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let f = &self.file;
        let o = &f.optimize;
        if !(o.delta > 0.0) || o.patience == 0 || !(o.k >= 0.0) {
            return Err(cfg_err("optimize: delta > 0, patience >= 1 and k >= 0 are required"));
        }
        for (k, &r) in &o.initial_rates {
            parse_message(k)?;
            if !(0.0..1.0).contains(&r) {
                return Err(cfg_err(format!("optimize.initial_rates.{k} = {r} is not in [0, 1)")));
            }
        }
        if o.alpha_values
            .iter()
            .chain(&f.region.alpha_values)
            .any(|a| !(0.0..=1.0).contains(a))
        {
            return Err(cfg_err("alpha values must lie in [0, 1]"));
        }
        self.density_config(0)
            .validate()
            .map_err(|e| cfg_err(format!("density: {e}")))?;
        let b = &f.ber;
        if b.enabled || b.points_db.is_some() || b.offsets_db.is_some() {
            match (&b.points_db, &b.offsets_db) {
                (Some(_), Some(_)) => return Err(cfg_err("ber: points_db and offsets_db are mutually exclusive")),
                (None, None) => return Err(cfg_err("ber: points_db or offsets_db is required")),
                (None, Some(_)) if f.certify.threshold_bracket_db.is_none() => {
                    return Err(cfg_err("ber.offsets_db needs certify.threshold_bracket_db"))
                }
                _ => {}
            }
            let pts = b.points_db.as_ref().or(b.offsets_db.as_ref()).unwrap();
            if pts.windows(2).any(|w| w[1] < w[0]) {
                return Err(cfg_err("ber points must be sorted"));
            }
            if !(b.ber_target > 0.0 && b.ber_target < 1.0) || b.block_length < 100 {
                return Err(cfg_err("ber: need 0 < ber_target < 1 and block_length >= 100"));
            }
            if b.rounds_max * b.inner_iters > b.total_iter_cap {
                return Err(cfg_err("ber: rounds_max * inner_iters exceeds total_iter_cap"));
            }
        }
        if let Some([lo, hi]) = f.certify.threshold_bracket_db {
            if !(lo < hi) || !(f.certify.threshold_tol_db > 0.0) {
                return Err(cfg_err("certify: bracket must be increasing and tolerance positive"));
            }
        }
        Ok(())
    }

    pub fn density_config(&self, seed: u64) -> DensityConfig {
        let d = &self.file.density;
        DensityConfig {
            population: d.population,
            min_population: d.min_population,
            rounds_max: d.rounds_max,
            inner_iters: d.inner_iters,
            mi_epsilon: d.mi_epsilon,
            stall_window: d.stall_window,
            stall_tolerance: d.stall_tolerance,
            seed,
        }
    }

    /// Whether every message that carries power has a preloaded code.
    pub fn fully_preloaded(&self) -> bool {
        Message::ALL
            .iter()
            .all(|&m| self.channel.message_amplitude(m) == 0.0 || self.preloaded.get(m).is_some())
    }

    /// Preloaded distributions, completed from `optimize.initial_rates`.
    pub fn initial_codes(&self) -> Result<HkCodeSet> {
        let mut codes = self.preloaded.clone();
        let o = &self.file.optimize;
        for (k, &rate) in &o.initial_rates {
            let m = parse_message(k)?;
            if codes.get(m).is_some() {
                return Err(cfg_err(format!("{k} has both a code file and an initial rate")));
            }
            let d = initial_distribution(rate, o.initial_check_degree, &OPTIMIZER_DEGREES)
                .map_err(|e| cfg_err(format!("initial distribution for {k}: {e}")))?;
            codes.set(m, d);
        }
        Ok(codes)
    }
}

fn resolve_channel(c: &ChannelSection) -> Result<GicParameters> {
    if let Some(m) = &c.modulation {
        if !m.eq_ignore_ascii_case("bpsk") {
            return Err(cfg_err(format!(
                "unsupported modulation \"{m}\"; only bpsk is available"
            )));
        }
    }
    let linear = [c.h11, c.h12, c.h21, c.h22, c.p1, c.p2, c.n0]
        .iter()
        .any(Option::is_some);
    let db = c.snr_db.is_some() || c.inr_db.is_some();
    let p = match (linear, db) {
        (true, true) => {
            return Err(cfg_err(
                "channel: linear keys (h*, p*, n0) and dB keys (snr_db, inr_db) are mutually exclusive",
            ))
        }
        (false, false) => return Err(cfg_err("channel: give either gains/powers/n0 or snr_db and inr_db")),
        (true, false) => {
            let (Some(h12), Some(h21)) = (c.h12, c.h21) else {
                return Err(cfg_err("channel: h12 and h21 are required with linear keys"));
            };
            GicParameters::new(
                ChannelGains {
                    h11: c.h11.unwrap_or(1.0),
                    h12,
                    h21,
                    h22: c.h22.unwrap_or(1.0),
                },
                [c.p1.unwrap_or(1.0), c.p2.unwrap_or(1.0)],
                c.n0.unwrap_or(1.0),
                c.alpha,
            )
        }
        (false, true) => {
            let (Some(snr), Some(inr)) = (c.snr_db, c.inr_db) else {
                return Err(cfg_err("channel: snr_db and inr_db must both be given"));
            };
            GicParameters::from_db(snr, inr, c.alpha)
        }
    };
    p.map_err(|e| cfg_err(format!("channel: {e}")))
}

/// Parse `start:step:stop` (inclusive) into a list of values.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| cfg_err(format!("bad grid \"{s}\"")))
        })
        .collect::<Result<_>>()?;
    match nums[..] {
        [x] => Ok(vec![x]),
        [start, step, stop] if step > 0.0 && stop >= start => {
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=count).map(|k| start + k as f64 * step).collect())
        }
        _ => Err(cfg_err(format!("bad grid \"{s}\"; expected start:step:stop"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIN: &str = r#"
name = "t"
seed = 1
[channel]
snr_db = [3.0, 3.0]
inr_db = [7.0, 7.0]
"#;

    #[test]
    fn minimal_scenario_parses() {
        let s = Scenario::parse(MIN, Path::new("/tmp")).unwrap();
        assert!((s.channel.snr(User::One) - 10f64.powf(0.3)).abs() < 1e-12);
        assert_eq!(s.file.out_dir, Path::new("/tmp/runs"));
    }

    #[test]
    fn missing_seed_is_rejected() {
        let text = MIN.replace("seed = 1\n", "");
        let err = Scenario::parse(&text, Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("seed"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn linear_and_db_keys_conflict() {
        let text = MIN.replace("[channel]\n", "[channel]\nh12 = 2.0\n");
        assert!(Scenario::parse(&text, Path::new("."))
            .unwrap_err()
            .to_string()
            .contains("mutually exclusive"));
    }

    #[test]
    fn missing_code_file_is_rejected() {
        let text = format!("{MIN}[codes]\nw1 = \"nope.json\"\n");
        assert!(Scenario::parse(&text, Path::new("."))
            .unwrap_err()
            .to_string()
            .contains("not found"));
    }

    #[test]
    fn grid_syntax() {
        let g = parse_grid("0:0.05:0.5").unwrap();
        assert_eq!(g.len(), 11);
        assert!((g[10] - 0.5).abs() < 1e-12);
        assert_eq!(parse_grid("0.3").unwrap(), vec![0.3]);
        assert!(parse_grid("1:0:2").is_err());
    }
}
