use alloc::format;
use alloc::vec::Vec;

use super::perturbation::{retarget_target, sample_perturbation_to, step_target, PerturbationConfig};
use crate::density::{evolve_ensemble, DensityConfig};
use crate::ensemble::DegreeDistribution;
use crate::error::{Error, Result};
use crate::gic::{GicParameters, Message, User};
use crate::hk::HkCodeSet;
use crate::region::{RatePoint, SplitRatePolytope, SubregionOptions};
use crate::rng::derive_seed;

/// Everything the rate-maximizing search needs.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationTask {
    /// Initial ensembles; must be admissible at `channel`.
    pub codes: HkCodeSet,
    pub channel: GicParameters,
    /// Target offset `R1 - R2`.
    pub k_offset: f64,
    /// Rate step per accepted perturbation.
    pub delta: f64,
    /// Consecutive rejected perturbations before a ladder stops.
    pub patience: usize,
    /// Check degrees scanned by [`optimize_single`].
    pub dc_range: Vec<u32>,
    /// Power splits tried by [`optimize_joint`]; empty keeps the channel's.
    pub alpha_grid: Vec<[f64; 2]>,
    /// Message visiting order within each user.
    pub order: Vec<Message>,
    /// Stop after this many accepted rate steps.
    pub max_accepted: Option<usize>,
    /// Additionally require split rates inside both receivers' MAC regions.
    pub mac_check: bool,
    pub subregion: SubregionOptions,
    pub density: DensityConfig,
    pub perturbation: PerturbationConfig,
    pub seed: u64,
}

impl OptimizationTask {
    pub fn new(codes: HkCodeSet, channel: GicParameters, seed: u64) -> Self {
        Self {
            codes,
            channel,
            k_offset: 0.0,
            delta: 0.005,
            patience: 200,
            dc_range: (3..=10).collect(),
            alpha_grid: Vec::new(),
            order: alloc::vec![Message::U1, Message::W1, Message::U2, Message::W2],
            max_accepted: None,
            mac_check: true,
            subregion: SubregionOptions::default(),
            density: DensityConfig::default(),
            perturbation: PerturbationConfig::default(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        if self.patience == 0 {
            return Err(Error::InvalidConfig("patience must be at least 1".into()));
        }
        if !(self.k_offset >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "K must be nonnegative, got {}",
                self.k_offset
            )));
        }
        self.density.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// Rate step of `delta`.
    Step,
    /// Rate-preserving move to another check degree.
    Retarget,
    /// Off-size step restoring `R1 - R2 = K`.
    Balance,
    /// A user-1 step undone because user 2 could not follow.
    Revert,
}

/// One evaluated candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRow {
    pub iteration: usize,
    pub message: Message,
    pub kind: StepKind,
    pub accepted: bool,
    pub delta: f64,
    pub check_degree: u32,
    pub alphas: [f64; 2],
    /// Incumbent split rates after this row.
    pub rates: [f64; 4],
}

impl LogRow {
    pub fn rate_pair(&self) -> RatePoint {
        RatePoint::new(self.rates[0] + self.rates[1], self.rates[2] + self.rates[3])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleResult {
    pub distribution: DegreeDistribution,
    pub rate: f64,
    pub initial_rate: f64,
    pub check_degree: u32,
    pub accepted: usize,
    pub log: Vec<LogRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointResult {
    pub codes: HkCodeSet,
    pub point: RatePoint,
    pub alphas: [f64; 2],
    pub accepted: usize,
    /// Every incumbent from the initial set to the final one.
    pub incumbents: Vec<HkCodeSet>,
    pub log: Vec<LogRow>,
}

fn split_rates(codes: &HkCodeSet) -> [f64; 4] {
    Message::ALL.map(|m| codes.rate(m))
}

struct Search<'a> {
    task: &'a OptimizationTask,
    channel: GicParameters,
    polytope: Option<SplitRatePolytope>,
    log: Vec<LogRow>,
    evaluations: usize,
}

impl<'a> Search<'a> {
    fn new(task: &'a OptimizationTask, channel: GicParameters) -> Self {
        let polytope = task.mac_check.then(|| SplitRatePolytope::new(&channel, task.subregion));
        Self {
            task,
            channel,
            polytope,
            log: Vec::new(),
            evaluations: 0,
        }
    }

    fn admissible(&self, codes: &HkCodeSet) -> Result<bool> {
        if let Some(poly) = &self.polytope {
            if !poly.contains(&split_rates(codes), 1e-12) {
                return Ok(false);
            }
        }
        Ok(evolve_ensemble(codes, &self.channel, &self.task.density)?.converged)
    }

    fn record(&mut self, m: Message, kind: StepKind, accepted: bool, delta: f64, dc: u32, codes: &HkCodeSet) {
        self.log.push(LogRow {
            iteration: self.evaluations,
            message: m,
            kind,
            accepted,
            delta,
            check_degree: dc,
            alphas: self.channel.alphas(),
            rates: split_rates(codes),
        });
        self.evaluations += 1;
    }

    /// Move message `m` by `Σ e_i / i = target(current)` at check degree
    /// `dc`, trying up to `patience` random perturbations.
    #[allow(clippy::too_many_arguments)]
    fn try_move(
        &mut self,
        codes: &HkCodeSet,
        m: Message,
        dc: u32,
        kind: StepKind,
        delta: f64,
        attempts: usize,
        key: u64,
    ) -> Result<Option<HkCodeSet>> {
        let current = codes
            .get(m)
            .ok_or_else(|| Error::InvalidConfig(format!("message {m} has no code")))?
            .clone();
        let r0 = current.design_rate()?;
        let target = match kind {
            StepKind::Retarget => retarget_target(current.lambda(), dc, r0),
            _ => step_target(dc, r0, delta),
        };
        if !(r0 + delta < 1.0) {
            return Ok(None);
        }
        for a in 0..attempts {
            let seed = derive_seed(
                self.task.seed,
                &[key, m.index() as u64, dc as u64, self.evaluations as u64, a as u64],
            );
            let e = match sample_perturbation_to(current.lambda(), target, &self.task.perturbation, seed) {
                Ok(e) => e,
                Err(Error::InfeasiblePerturbation(_)) => return Ok(None),
                Err(err) => return Err(err),
            };
            let candidate = DegreeDistribution::with_check_degree(e.apply(current.lambda()), dc)?;
            let mut next = codes.clone();
            next.set(m, candidate);
            let ok = self.admissible(&next)?;
            self.record(m, kind, ok, delta, dc, if ok { &next } else { codes });
            if ok {
                return Ok(Some(next));
            }
        }
        Ok(None)
    }
}

fn check_degree_of(codes: &HkCodeSet, m: Message) -> Result<u32> {
    codes
        .get(m)
        .ok_or_else(|| Error::InvalidConfig(format!("message {m} has no code")))?
        .check_degree()
        .ok_or_else(|| Error::InvalidConfig(format!("message {m} needs a single check degree")))
}

/// Rate ladder on one message with every other ensemble held fixed, repeated
/// for each check degree in the task's range; the best final rate wins.
pub fn optimize_single(task: &OptimizationTask, m: Message) -> Result<SingleResult> {
    task.validate()?;
    let mut search = Search::new(task, task.channel);
    if !search.admissible(&task.codes)? {
        return Err(Error::InitialInadmissible);
    }
    let dc0 = check_degree_of(&task.codes, m)?;
    let initial_rate = task.codes.rate(m);
    let mut candidates = alloc::vec![dc0];
    candidates.extend(task.dc_range.iter().copied().filter(|&d| d != dc0));

    let mut best: Option<(HkCodeSet, u32, usize)> = None;
    for dc in candidates {
        let mut codes = if dc == dc0 {
            task.codes.clone()
        } else {
            match search.try_move(&task.codes, m, dc, StepKind::Retarget, 0.0, task.patience, 1)? {
                Some(c) => c,
                None => continue,
            }
        };
        let mut accepted = 0;
        while task.max_accepted.is_none_or(|cap| accepted < cap) {
            match search.try_move(&codes, m, dc, StepKind::Step, task.delta, task.patience, 2)? {
                Some(next) => {
                    codes = next;
                    accepted += 1;
                }
                None => break,
            }
        }
        let better = match &best {
            None => true,
            Some((b, _, _)) => codes.rate(m) > b.rate(m) + 1e-12,
        };
        if better {
            best = Some((codes, dc, accepted));
        }
    }
    let (codes, dc, accepted) = best.expect("initial check degree is always evaluated");
    Ok(SingleResult {
        distribution: codes.get(m).unwrap().clone(),
        rate: codes.rate(m),
        initial_rate,
        check_degree: dc,
        accepted,
        log: search.log,
    })
}

/// Joint sum-rate maximization keeping `R1 = R2 + K` after every sweep,
/// over the task's power-allocation grid.
pub fn optimize_joint(task: &OptimizationTask) -> Result<JointResult> {
    task.validate()?;
    let grid = if task.alpha_grid.is_empty() {
        alloc::vec![task.channel.alphas()]
    } else {
        task.alpha_grid.clone()
    };
    let mut best: Option<JointResult> = None;
    let mut log = Vec::new();
    for alphas in grid {
        let channel = task.channel.with_alphas(alphas)?;
        let carried = task.codes.messages().all(|m| channel.message_amplitude(m) > 0.0);
        let covered = task.codes.check_covers(&channel, &User::BOTH).is_ok();
        if !carried || !covered {
            continue;
        }
        let mut search = Search::new(task, channel);
        if !search.admissible(&task.codes)? {
            continue;
        }
        let res = joint_ladder(&mut search)?;
        log.append(&mut search.log);
        let better = best.as_ref().is_none_or(|b| res.point.sum() > b.point.sum() + 1e-12);
        if better {
            best = Some(res);
        }
    }
    match best {
        Some(mut b) => {
            b.log = log;
            Ok(b)
        }
        None if task.alpha_grid.is_empty() => Err(Error::InitialInadmissible),
        None => Err(Error::NoAdmissibleAllocation),
    }
}

fn joint_ladder(search: &mut Search<'_>) -> Result<JointResult> {
    let task = search.task;
    let mut codes = task.codes.clone();
    let mut incumbents = alloc::vec![codes.clone()];
    let per_user: [Vec<Message>; 2] = User::BOTH.map(|u| {
        task.order
            .iter()
            .copied()
            .filter(|m| m.user() == u && codes.get(*m).is_some())
            .collect()
    });
    let mut cursor = [0usize; 2];
    let mut accepted = 0;

    let (r1, r2) = codes.rate_pair();
    let gap = (r1 - r2) - task.k_offset;
    if gap.abs() > 1e-12 {
        let lagging = if gap > 0.0 { User::Two } else { User::One };
        match user_step(
            search,
            &codes,
            &per_user,
            &mut cursor,
            lagging,
            gap.abs(),
            StepKind::Balance,
        )? {
            Some(next) => {
                codes = next;
                incumbents.push(codes.clone());
            }
            None => {
                return Err(Error::InvalidConfig(format!(
                    "cannot bring the initial pair to R1 - R2 = {}",
                    task.k_offset
                )))
            }
        }
    }

    while task.max_accepted.is_none_or(|cap| accepted + 2 <= cap) {
        let Some(after_one) = user_step(
            search,
            &codes,
            &per_user,
            &mut cursor,
            User::One,
            task.delta,
            StepKind::Step,
        )?
        else {
            break;
        };
        match user_step(
            search,
            &after_one,
            &per_user,
            &mut cursor,
            User::Two,
            task.delta,
            StepKind::Step,
        )? {
            Some(next) => {
                incumbents.push(after_one);
                incumbents.push(next.clone());
                codes = next;
                accepted += 2;
            }
            None => {
                let m = per_user[0][0];
                search.record(
                    m,
                    StepKind::Revert,
                    false,
                    -task.delta,
                    check_degree_of(&codes, m)?,
                    &codes,
                );
                break;
            }
        }
    }
    let (r1, r2) = codes.rate_pair();
    Ok(JointResult {
        codes,
        point: RatePoint::new(r1, r2),
        alphas: search.channel.alphas(),
        accepted,
        incumbents,
        log: Vec::new(),
    })
}

/// Raise one user's rate by `delta` through any of its messages, cycling
/// through them per attempt.
fn user_step(
    search: &mut Search<'_>,
    codes: &HkCodeSet,
    per_user: &[Vec<Message>; 2],
    cursor: &mut [usize; 2],
    user: User,
    delta: f64,
    kind: StepKind,
) -> Result<Option<HkCodeSet>> {
    let msgs = &per_user[user.index()];
    if msgs.is_empty() {
        return Ok(None);
    }
    let patience = search.task.patience;
    for a in 0..patience {
        let m = msgs[(cursor[user.index()] + a) % msgs.len()];
        let dc = check_degree_of(codes, m)?;
        if let Some(next) = search.try_move(codes, m, dc, kind, delta, 1, 3 + user.index() as u64)? {
            cursor[user.index()] = (cursor[user.index()] + a + 1) % msgs.len();
            return Ok(Some(next));
        }
    }
    Ok(None)
}
