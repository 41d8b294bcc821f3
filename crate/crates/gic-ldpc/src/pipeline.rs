//! Stage pipeline: optimize, certify, region, BER.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use gic_ldpc_core::decoder::JointDecoderConfig;
use gic_ldpc_core::density::{evolve_ensemble, threshold_bisect, ChannelKnob};
use gic_ldpc_core::gic::{GicParameters, Message};
use gic_ldpc_core::hk::HkCodeSet;
use gic_ldpc_core::optimizer::{optimize_joint, OptimizationTask};
use gic_ldpc_core::region::{
    alpha_grid, hk_subregion, ts_regions, RatePoint, RegionCurve, Signaling, SubregionOptions, TsMode,
};
use gic_ldpc_core::rng::derive_seed;
use serde_json::{json, Value};

use crate::ber::{run_ber_sweep, BerCurve, BerSweepConfig, FiniteCodeSet};
use crate::config::Scenario;
use crate::error::HarnessError;
use crate::formats;

pub const VERSION: &str = env!("GIC_LDPC_VERSION");

/// Tolerance for placing an achieved rate pair inside the subregion.
pub const REGION_TOL: f64 = 0.005;

type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageSet {
    pub optimize: bool,
    pub certify: bool,
    pub region: bool,
    pub ber: bool,
}

impl StageSet {
    /// Every stage the scenario enables.
    pub fn all() -> Self {
        Self {
            optimize: true,
            certify: true,
            region: true,
            ber: true,
        }
    }

    pub fn only(stage: &str) -> Self {
        let mut s = Self {
            optimize: false,
            certify: false,
            region: false,
            ber: false,
        };
        match stage {
            "optimize" => s.optimize = true,
            "certify" => s.certify = true,
            "region" => s.region = true,
            "ber" => s.ber = true,
            _ => {}
        }
        s
    }

    fn names(&self) -> Vec<&'static str> {
        [
            (self.optimize, "optimize"),
            (self.certify, "certify"),
            (self.region, "region"),
            (self.ber, "ber"),
        ]
        .into_iter()
        .filter_map(|(on, n)| on.then_some(n))
        .collect()
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub stages: StageSet,
    pub dry_run: bool,
    /// Worker threads; `None` uses every core.
    pub jobs: Option<usize>,
    /// Overrides the scenario's region alpha values.
    pub region_grid: Option<Vec<f64>>,
    /// Overrides the scenario's output directory.
    pub out_dir: Option<PathBuf>,
    /// Overrides the scenario seed.
    pub seed: Option<u64>,
    /// Run the requested stages even where the scenario disables them.
    pub force: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            stages: StageSet::all(),
            dry_run: false,
            jobs: None,
            region_grid: None,
            out_dir: None,
            seed: None,
            force: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimizationSummary {
    pub point: RatePoint,
    pub alphas: [f64; 2],
    pub accepted: usize,
    pub incumbents: Vec<HkCodeSet>,
    /// `R1 - R2 - K` of the final point.
    pub k_residual: f64,
}

#[derive(Debug, Clone)]
pub struct RegionSummary {
    pub curves: Vec<RegionCurve>,
    pub achieved: RatePoint,
    /// Whether the achieved pair lies in the subregion at its own allocation.
    pub achieved_inside: bool,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub seed: u64,
    pub codes: HkCodeSet,
    pub channel: GicParameters,
    pub optimization: Option<OptimizationSummary>,
    pub admissible: Option<bool>,
    pub threshold_db: Option<f64>,
    pub region: Option<RegionSummary>,
    pub ber: Option<BerCurve>,
    pub artifacts: Vec<String>,
}

/// Create `<root>/<name>/run-NNN` with the first unused index.
fn versioned_dir(root: &Path, name: &str) -> std::io::Result<PathBuf> {
    let parent = root.join(name);
    std::fs::create_dir_all(&parent)?;
    for k in 1..100_000 {
        let dir = parent.join(format!("run-{k:03}"));
        match std::fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e),
        }
    }
    Err(std::io::Error::other("no free run directory"))
}

struct Run<'a> {
    s: &'a Scenario,
    opts: &'a RunOptions,
    dir: PathBuf,
    seed: u64,
    artifacts: Vec<String>,
}

impl Run<'_> {
    fn path(&mut self, rel: &str) -> PathBuf {
        self.artifacts.push(rel.to_string());
        self.dir.join(rel)
    }

    /// Requested stages the scenario actually enables.
    fn effective(&self) -> StageSet {
        let (f, st) = (&self.s.file, self.opts.stages);
        if self.opts.force {
            return st;
        }
        StageSet {
            optimize: st.optimize && f.optimize.enabled && !self.s.fully_preloaded(),
            certify: st.certify && f.certify.enabled,
            region: st.region && f.region.enabled,
            ber: st.ber && f.ber.enabled,
        }
    }

    fn manifest(&self, status: &str, extra: Value) -> Value {
        let ts = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        json!({
            "tool": "gic-ldpc",
            "version": VERSION,
            "scenario": self.s.file.name,
            "seed": self.seed,
            "timestamp_unix": ts,
            "dry_run": self.opts.dry_run,
            "stages": self.effective().names(),
            "status": status,
            "artifacts": self.artifacts,
            "summary": extra,
        })
    }

    fn write_manifest(&self, status: &str, extra: Value) -> Result<()> {
        formats::write_json(&self.dir.join("manifest.json"), &self.manifest(status, extra))
            .map_err(|e| HarnessError::stage("manifest", e))
    }
}

/// Run the enabled stages and archive every artifact under a fresh
/// versioned directory.
pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Result<RunSummary> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = opts.jobs {
            b = b.num_threads(j.max(1));
        }
        b.build()
            .map_err(|e| HarnessError::Config(format!("cannot start {:?} workers: {e}", opts.jobs)))?
    };
    pool.install(|| run_inner(s, opts))
}

fn run_inner(s: &Scenario, opts: &RunOptions) -> Result<RunSummary> {
    let seed = opts.seed.unwrap_or(s.file.seed);
    let root = opts.out_dir.clone().unwrap_or_else(|| s.file.out_dir.clone());
    let dir = versioned_dir(&root, &s.file.name).map_err(|e| HarnessError::stage("setup", e))?;
    let mut run = Run {
        s,
        opts,
        dir,
        seed,
        artifacts: Vec::new(),
    };

    let mut summary = RunSummary {
        out_dir: run.dir.clone(),
        seed,
        codes: HkCodeSet::new(),
        channel: s.channel,
        optimization: None,
        admissible: None,
        threshold_db: None,
        region: None,
        ber: None,
        artifacts: Vec::new(),
    };
    if opts.dry_run {
        s.initial_codes()?;
        run.write_manifest("dry-run", json!({}))?;
        summary.artifacts = run.artifacts;
        return Ok(summary);
    }
    let snapshot = run.path("config.toml");
    std::fs::write(&snapshot, &s.source).map_err(|e| HarnessError::stage("setup", e))?;

    match stages(&mut run, &mut summary) {
        Ok(()) => {
            let extra = summary_json(&summary);
            run.write_manifest("ok", extra)?;
            summary.artifacts = run.artifacts;
            Ok(summary)
        }
        Err(e) => {
            let _ = run.write_manifest(&format!("failed: {e}"), summary_json(&summary));
            Err(e)
        }
    }
}

fn summary_json(s: &RunSummary) -> Value {
    let (r1, r2) = s.codes.rate_pair();
    json!({
        "rates": Message::ALL.iter().map(|&m| (m.name(), s.codes.rate(m))).filter(|(_, r)| *r > 0.0)
            .map(|(n, r)| (n.to_string(), json!(r))).collect::<serde_json::Map<_, _>>(),
        "rate_pair": [r1, r2],
        "alphas": s.channel.alphas(),
        "admissible": s.admissible,
        "threshold_db": s.threshold_db,
        "achieved_inside_subregion": s.region.as_ref().map(|r| r.achieved_inside),
        "first_ber_claim_db": s.ber.as_ref().and_then(BerCurve::first_claim),
    })
}

fn stage_err(stage: &'static str) -> impl Fn(anyhow::Error) -> HarnessError {
    move |e| HarnessError::stage(stage, e)
}

fn stages(run: &mut Run<'_>, out: &mut RunSummary) -> Result<()> {
    let s = run.s;
    let f = &s.file;
    let stages = run.effective();
    let mut codes = s.initial_codes()?;
    let mut channel = s.channel;

    if stages.optimize {
        let o = &f.optimize;
        let mut task = OptimizationTask::new(codes.clone(), channel, derive_seed(run.seed, &[1]));
        task.k_offset = o.k;
        task.delta = o.delta;
        task.patience = o.patience;
        task.max_accepted = o.max_accepted;
        task.mac_check = o.mac_check;
        task.alpha_grid = alpha_grid(&o.alpha_values);
        task.density = s.density_config(derive_seed(run.seed, &[2]));
        task.subregion = SubregionOptions {
            keep_interferer_public: f.region.keep_interferer_public,
        };
        let res = optimize_joint(&task).map_err(|e| HarnessError::stage("optimize", e))?;
        let p = run.path("optimize_log.csv");
        formats::write_optimization_log_csv(&p, &res.log).map_err(stage_err("optimize"))?;
        std::fs::create_dir_all(run.dir.join("codes")).map_err(|e| HarnessError::stage("optimize", e))?;
        for m in res.codes.messages() {
            let p = run.path(&format!("codes/{}.json", m.name().to_lowercase()));
            formats::write_distribution(&p, res.codes.get(m).unwrap()).map_err(stage_err("optimize"))?;
        }
        let k_residual = res.point.r1 - res.point.r2 - o.k;
        let p = run.path("optimize.json");
        formats::write_json(
            &p,
            &json!({
                "rate_pair": [res.point.r1, res.point.r2],
                "sum_rate": res.point.sum(),
                "k": o.k,
                "k_residual": k_residual,
                "alphas": res.alphas,
                "accepted": res.accepted,
                "incumbents": res.incumbents.iter().map(|c| { let (a, b) = c.rate_pair(); [a, b] }).collect::<Vec<_>>(),
            }),
        )
        .map_err(stage_err("optimize"))?;
        channel = channel
            .with_alphas(res.alphas)
            .map_err(|e| HarnessError::stage("optimize", e))?;
        codes = res.codes.clone();
        out.optimization = Some(OptimizationSummary {
            point: res.point,
            alphas: res.alphas,
            accepted: res.accepted,
            incumbents: res.incumbents,
            k_residual,
        });
    }
    out.codes = codes.clone();
    out.channel = channel;

    let density = s.density_config(derive_seed(run.seed, &[3]));
    if stages.certify {
        let rep = evolve_ensemble(&codes, &channel, &density).map_err(|e| HarnessError::stage("certify", e))?;
        let p = run.path("mi_trajectory.csv");
        formats::write_mi_trajectory_csv(&p, &rep.receivers).map_err(stage_err("certify"))?;
        let mut doc = formats::admissibility_to_json(&rep);
        out.admissible = Some(rep.converged);
        if let Some([lo, hi]) = f.certify.threshold_bracket_db {
            let t = threshold_bisect(
                &codes,
                &channel,
                ChannelKnob::Snr1Db,
                (lo, hi),
                f.certify.threshold_tol_db,
                &density,
            )
            .map_err(|e| HarnessError::stage("certify", e))?;
            doc["threshold_db"] = json!(t.threshold);
            doc["threshold_bracket_db"] = json!([t.lo, t.hi]);
            out.threshold_db = Some(t.threshold);
        }
        let p = run.path("admissibility.json");
        formats::write_json(&p, &doc).map_err(stage_err("certify"))?;
        if !rep.converged {
            return Err(HarnessError::stage(
                "certify",
                anyhow::anyhow!("code set is not admissible at the configured channel"),
            ));
        }
    }

    if stages.region {
        let values = run
            .opts
            .region_grid
            .clone()
            .unwrap_or_else(|| f.region.alpha_values.clone());
        let opts = SubregionOptions {
            keep_interferer_public: f.region.keep_interferer_public,
        };
        let err = |e| HarnessError::stage("region", e);
        let hk = hk_subregion(&channel, &alpha_grid(&values), opts).map_err(err)?;
        let own = hk_subregion(&channel, &[channel.alphas()], opts).map_err(err)?;
        let (r1, r2) = codes.rate_pair();
        let achieved = RatePoint::new(r1, r2);
        let inside = own.contains(achieved, REGION_TOL);
        let steps = f.region.ts_steps;
        let mut curves = vec![
            hk,
            RegionCurve {
                label: "hk-subregion-at-alphas".into(),
                ..own
            },
        ];
        for sig in [Signaling::Bpsk, Signaling::Gaussian] {
            for mode in [TsMode::Naive, TsMode::NonNaive] {
                curves.push(ts_regions(&channel, mode, sig, steps));
            }
        }
        if r1 + r2 > 0.0 {
            curves.push(RegionCurve::new("achieved", vec![achieved]));
        }
        let p = run.path("region.csv");
        formats::write_region_csv(&p, &curves).map_err(stage_err("region"))?;
        out.region = Some(RegionSummary {
            curves,
            achieved,
            achieved_inside: inside,
        });
    }

    if stages.ber {
        let b = &f.ber;
        let points: Vec<f64> = match (&b.points_db, &b.offsets_db) {
            (Some(p), _) => p.clone(),
            (None, Some(off)) => {
                let t = out.threshold_db.ok_or_else(|| {
                    HarnessError::stage("ber", anyhow::anyhow!("offsets_db needs the certify stage's threshold"))
                })?;
                off.iter().map(|o| t + o).collect()
            }
            (None, None) => return Err(HarnessError::Config("ber: points_db or offsets_db is required".into())),
        };
        let finite =
            FiniteCodeSet::sample(&codes, b.block_length, derive_seed(run.seed, &[4])).map_err(stage_err("ber"))?;
        std::fs::create_dir_all(run.dir.join("codes")).map_err(|e| HarnessError::stage("ber", e))?;
        for m in finite.messages() {
            let p = run.path(&format!("codes/{}.alist", m.name().to_lowercase()));
            formats::write_alist_file(&p, &finite.get(m).unwrap().matrix).map_err(stage_err("ber"))?;
        }
        let cfg = BerSweepConfig {
            ber_target: b.ber_target,
            min_errors: b.min_errors,
            max_blocks: b.max_blocks.unwrap_or(0),
            decoder: JointDecoderConfig {
                rounds_max: b.rounds_max,
                inner_iters: b.inner_iters,
                total_iter_cap: b.total_iter_cap,
                early_stop: true,
                decoded_set: Vec::new(),
            },
            decoded_sets: s.decoded_sets.clone(),
            traced_blocks: b.traced_blocks,
        };
        let curve =
            run_ber_sweep(&cfg, &channel, &finite, &points, derive_seed(run.seed, &[5])).map_err(stage_err("ber"))?;
        let p = run.path("ber.csv");
        formats::write_ber_csv(&p, &curve).map_err(stage_err("ber"))?;
        let rows: Vec<_> = curve
            .points
            .iter()
            .flat_map(|pt| pt.trace.iter().map(move |(rx, r)| (pt.point_db, *rx, r.clone())))
            .collect();
        let p = run.path("trace.csv");
        formats::write_trace_csv(&p, &rows).map_err(stage_err("ber"))?;
        out.ber = Some(curve);
    }
    Ok(())
}
