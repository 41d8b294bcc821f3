//! On-disk formats: degree-distribution JSON, ALIST matrices and the CSV
//! tables written by the experiment stages.

use std::io::{BufRead, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use gic_ldpc_core::decoder::TraceRow;
use gic_ldpc_core::density::{AdmissibilityReport, ReceiverReport};
use gic_ldpc_core::ensemble::{DegreeDistribution, ParityCheckMatrix};
use gic_ldpc_core::gic::Message;
use gic_ldpc_core::optimizer::{LogRow, StepKind};
use gic_ldpc_core::region::RegionCurve;
use serde_json::{json, Map, Number, Value};

use crate::ber::BerCurve;

/// `x` rounded to 10 significant digits, as a JSON number.
fn significant(x: f64) -> Value {
    let rounded: f64 = format!("{x:.9e}").parse().unwrap_or(x);
    Number::from_f64(rounded).map(Value::Number).unwrap_or(Value::Null)
}

fn side_to_json(side: &[(u32, f64)]) -> Value {
    let mut map = Map::new();
    for &(d, m) in side {
        map.insert(d.to_string(), significant(m));
    }
    Value::Object(map)
}

pub fn distribution_to_json(d: &DegreeDistribution) -> Value {
    json!({ "lambda": side_to_json(d.lambda()), "rho": side_to_json(d.rho()) })
}

fn side_from_json(v: &Value, name: &str) -> Result<Vec<(u32, f64)>> {
    let obj = v
        .get(name)
        .and_then(Value::as_object)
        .ok_or_else(|| anyhow!("missing object \"{name}\""))?;
    let mut out = Vec::with_capacity(obj.len());
    for (k, m) in obj {
        let d: u32 = k.parse().with_context(|| format!("degree key \"{k}\" in {name}"))?;
        let m = m
            .as_f64()
            .ok_or_else(|| anyhow!("mass for degree {k} in {name} is not a number"))?;
        out.push((d, m));
    }
    Ok(out)
}

pub fn distribution_from_json(v: &Value) -> Result<DegreeDistribution> {
    let lambda = side_from_json(v, "lambda")?;
    let rho = side_from_json(v, "rho")?;
    Ok(DegreeDistribution::new(lambda, rho)?)
}

pub fn write_distribution(path: &Path, d: &DegreeDistribution) -> Result<()> {
    let text = serde_json::to_string_pretty(&distribution_to_json(d))?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

pub fn read_distribution(path: &Path) -> Result<DegreeDistribution> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    distribution_from_json(&v).with_context(|| format!("in {}", path.display()))
}

/// ALIST text: `n m`, the two maximum degrees, the variable and check degree
/// lists, then 1-indexed neighbor lists for every variable and every check.
pub fn write_alist<W: Write>(h: &ParityCheckMatrix, mut w: W) -> Result<()> {
    let vdeg = h.variable_degrees();
    let cdeg = h.check_degrees();
    let join = |xs: &mut dyn Iterator<Item = usize>| xs.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    writeln!(w, "{} {}", h.n(), h.m())?;
    writeln!(
        w,
        "{} {}",
        vdeg.iter().max().copied().unwrap_or(0),
        cdeg.iter().max().copied().unwrap_or(0)
    )?;
    writeln!(w, "{}", join(&mut vdeg.iter().copied()))?;
    writeln!(w, "{}", join(&mut cdeg.iter().copied()))?;
    for v in 0..h.n() {
        writeln!(
            w,
            "{}",
            join(&mut h.variable_neighbors(v).iter().map(|&c| c as usize + 1))
        )?;
    }
    for c in 0..h.m() {
        writeln!(w, "{}", join(&mut h.check_neighbors(c).map(|v| v as usize + 1)))?;
    }
    Ok(())
}

/// Parse ALIST text. Zero padding in the neighbor lists is accepted; the
/// check-side lists must agree with the variable side.
pub fn read_alist<R: BufRead>(r: R) -> Result<ParityCheckMatrix> {
    let mut nums = Vec::new();
    for line in r.lines() {
        for tok in line?.split_whitespace() {
            nums.push(tok.parse::<usize>().with_context(|| format!("bad token \"{tok}\""))?);
        }
    }
    if nums.len() < 4 {
        bail!("truncated ALIST header");
    }
    let (n, m, max_v, max_c) = (nums[0], nums[1], nums[2], nums[3]);
    if nums.len() < 4 + n + m {
        bail!("truncated ALIST degree lists");
    }
    let vdeg = &nums[4..4 + n];
    let cdeg = &nums[4 + n..4 + n + m];
    let body = &nums[4 + n + m..];
    // Neighbor lists are either exactly degree-long or zero-padded to the maximum.
    let compact: usize = vdeg.iter().sum::<usize>() + cdeg.iter().sum::<usize>();
    let padded = if body.len() == compact {
        false
    } else if body.len() == n * max_v + m * max_c {
        true
    } else {
        bail!(
            "ALIST body has {} entries, expected {compact} or {}",
            body.len(),
            n * max_v + m * max_c
        );
    };
    let mut pos = 0;
    let mut side = |count: usize, degs: &[usize], width: usize, limit: usize, what: &str| -> Result<Vec<Vec<u32>>> {
        let mut lists = Vec::with_capacity(count);
        for (k, &d) in degs.iter().enumerate() {
            let w = if padded { width } else { d };
            let list: Vec<u32> = body[pos..pos + w]
                .iter()
                .filter(|&&x| x != 0)
                .map(|&x| x as u32 - 1)
                .collect();
            pos += w;
            if list.len() != d {
                bail!("{what} {} lists {} neighbors, header says {d}", k + 1, list.len());
            }
            if let Some(&x) = list.iter().find(|&&x| x as usize >= limit) {
                bail!("{what} {} has neighbor {} out of range", k + 1, x + 1);
            }
            lists.push(list);
        }
        Ok(lists)
    };
    let vars = side(n, vdeg, max_v, m, "variable")?;
    let checks = side(m, cdeg, max_c, n, "check")?;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for (v, list) in vars.iter().enumerate() {
        edges.extend(list.iter().map(|&c| (v as u32, c)));
    }
    let mut from_checks: Vec<(u32, u32)> = Vec::new();
    for (c, list) in checks.iter().enumerate() {
        from_checks.extend(list.iter().map(|&v| (v, c as u32)));
    }
    let mut sorted = edges.clone();
    sorted.sort_unstable();
    from_checks.sort_unstable();
    if sorted != from_checks {
        bail!("variable and check neighbor lists disagree");
    }
    Ok(ParityCheckMatrix::new(n, m, &edges)?)
}

pub fn write_alist_file(path: &Path, h: &ParityCheckMatrix) -> Result<()> {
    let f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = std::io::BufWriter::new(f);
    write_alist(h, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_alist_file(path: &Path) -> Result<ParityCheckMatrix> {
    let f = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_alist(std::io::BufReader::new(f)).with_context(|| format!("in {}", path.display()))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.10}")).unwrap_or_default()
}

/// Per-round decoder trace rows, tagged with an operating point.
pub fn write_trace_csv(path: &Path, rows: &[(f64, usize, TraceRow)]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "point_db",
        "receiver",
        "round",
        "message",
        "i_state_to_vnd",
        "i_vnd_to_state",
        "syndrome_weight",
    ])?;
    for (db, rx, r) in rows {
        w.write_record([
            format!("{db}"),
            format!("{}", rx + 1),
            r.round.to_string(),
            r.message.name().to_string(),
            opt(r.i_state_to_vnd),
            opt(r.i_vnd_to_state),
            r.syndrome_weight.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Posterior MI per density-evolution round.
pub fn write_mi_trajectory_csv(path: &Path, reports: &[ReceiverReport]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["receiver", "round", "message", "mi"])?;
    for rep in reports {
        for (round, row) in rep.trajectory.iter().enumerate() {
            for (m, mi) in rep.messages.iter().zip(row) {
                w.write_record([
                    format!("{}", rep.receiver.index() + 1),
                    round.to_string(),
                    m.name().to_string(),
                    format!("{mi:.10}"),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_region_csv(path: &Path, curves: &[RegionCurve]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["label", "R1", "R2"])?;
    for c in curves {
        for p in &c.points {
            w.write_record([c.label.clone(), format!("{:.10}", p.r1), format!("{:.10}", p.r2)])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn kind_name(k: StepKind) -> &'static str {
    match k {
        StepKind::Step => "step",
        StepKind::Retarget => "retarget",
        StepKind::Balance => "balance",
        StepKind::Revert => "revert",
    }
}

pub fn write_optimization_log_csv(path: &Path, log: &[LogRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "iteration",
        "message",
        "kind",
        "accepted",
        "delta",
        "check_degree",
        "alpha1",
        "alpha2",
        "rate_u1",
        "rate_w1",
        "rate_u2",
        "rate_w2",
        "R1",
        "R2",
    ])?;
    for r in log {
        let pair = r.rate_pair();
        let mut rec = vec![
            r.iteration.to_string(),
            r.message.name().to_string(),
            kind_name(r.kind).to_string(),
            r.accepted.to_string(),
            format!("{}", r.delta),
            r.check_degree.to_string(),
            format!("{}", r.alphas[0]),
            format!("{}", r.alphas[1]),
        ];
        rec.extend(r.rates.iter().map(|x| format!("{x:.10}")));
        rec.push(format!("{:.10}", pair.r1));
        rec.push(format!("{:.10}", pair.r2));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ber_csv(path: &Path, curve: &BerCurve) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "point_db",
        "message",
        "blocks",
        "bits",
        "errors",
        "ber",
        "worst",
        "claim_below_target",
    ])?;
    for p in &curve.points {
        for c in &p.messages {
            w.write_record([
                format!("{}", p.point_db),
                c.message.name().to_string(),
                p.blocks.to_string(),
                c.bits.to_string(),
                c.errors.to_string(),
                format!("{:e}", c.ber()),
                (c.message == p.worst).to_string(),
                p.claim_below_target.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn admissibility_to_json(rep: &AdmissibilityReport) -> Value {
    let final_mi: Map<String, Value> = Message::ALL
        .iter()
        .filter_map(|m| rep.final_mi[m.index()].map(|x| (m.name().to_string(), significant(x))))
        .collect();
    let receivers: Vec<Value> = rep
        .receivers
        .iter()
        .map(|r| {
            json!({
                "receiver": r.receiver.index() + 1,
                "messages": r.messages.iter().map(|m| m.name()).collect::<Vec<_>>(),
                "converged": r.converged,
                "rounds_used": r.rounds_used,
            })
        })
        .collect();
    json!({
        "admissible": rep.converged,
        "rounds_used": rep.rounds_used,
        "final_mi": final_mi,
        "receivers": receivers,
    })
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}
