use alloc::format;
use alloc::vec::Vec;

use super::curve::{close_to_axes, simplify, RatePoint, RegionCurve};
use super::mac::{mac_mutual_informations_with, MacConstants};
use super::quadrature::{GaussHermite, DEFAULT_NODES};
use crate::error::Result;
use crate::gic::{GicParameters, Message, User};

const FEAS_TOL: f64 = 1e-9;

/// Constraint-set options for the subregion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubregionOptions {
    /// Keep the singleton bound on the interferer's public message.
    pub keep_interferer_public: bool,
}

impl Default for SubregionOptions {
    fn default() -> Self {
        Self {
            keep_interferer_public: true,
        }
    }
}

/// Split-rate polytope `{R >= 0 : A R <= b}` over `(R_U1, R_W1, R_U2, R_W2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitRatePolytope {
    pub alphas: [f64; 2],
    pub constants: [MacConstants; 2],
    rows: Vec<([f64; 4], f64)>,
}

impl SplitRatePolytope {
    pub fn new(p: &GicParameters, opts: SubregionOptions) -> Self {
        Self::with_rule(&GaussHermite::new(DEFAULT_NODES), p, opts)
    }

    pub fn with_rule(gh: &GaussHermite, p: &GicParameters, opts: SubregionOptions) -> Self {
        let constants = [
            mac_mutual_informations_with(gh, p, User::One),
            mac_mutual_informations_with(gh, p, User::Two),
        ];
        let mut rows = Vec::new();
        for c in &constants {
            let skip = Message::public_of(c.receiver.other());
            for (set, bound) in c.subsets() {
                if !opts.keep_interferer_public && set.len() == 1 && set[0] == skip {
                    continue;
                }
                let mut a = [0.0; 4];
                for m in &set {
                    a[m.index()] = 1.0;
                }
                rows.push((a, bound));
            }
        }
        // A message that never reaches its own receiver carries no rate.
        for m in Message::ALL {
            let own = constants[m.user().index()].messages.contains(&m);
            if !own {
                let mut a = [0.0; 4];
                a[m.index()] = 1.0;
                rows.push((a, 0.0));
            }
        }
        for i in 0..4 {
            let mut a = [0.0; 4];
            a[i] = -1.0;
            rows.push((a, 0.0));
        }
        Self {
            alphas: p.alphas(),
            constants,
            rows,
        }
    }

    pub fn contains(&self, rates: &[f64; 4], tol: f64) -> bool {
        self.rows.iter().all(|(a, b)| dot(a, rates) <= b + tol)
    }

    /// Every vertex, by solving each 4-subset of constraints as equalities.
    pub fn vertices(&self) -> Vec<[f64; 4]> {
        let n = self.rows.len();
        let mut out: Vec<[f64; 4]> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in k + 1..n {
                        let idx = [i, j, k, l];
                        if let Some(v) = solve4(&idx.map(|r| self.rows[r])) {
                            if self.contains(&v, FEAS_TOL)
                                && !out.iter().any(|w| (0..4).all(|c| (w[c] - v[c]).abs() < 1e-10))
                            {
                                out.push(v);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Upper-right boundary of the projection onto `(R_U1 + R_W1, R_U2 + R_W2)`.
    pub fn projected_boundary(&self) -> Vec<RatePoint> {
        let pts: Vec<RatePoint> = self
            .vertices()
            .iter()
            .map(|v| RatePoint::new(v[0] + v[1], v[2] + v[3]))
            .collect();
        upper_hull(&pts)
    }
}

fn dot(a: &[f64; 4], x: &[f64; 4]) -> f64 {
    a.iter().zip(x).map(|(p, q)| p * q).sum()
}

fn solve4(rows: &[([f64; 4], f64); 4]) -> Option<[f64; 4]> {
    let mut m = [[0.0f64; 5]; 4];
    for (r, (a, b)) in rows.iter().enumerate() {
        m[r][..4].copy_from_slice(a);
        m[r][4] = *b;
    }
    for col in 0..4 {
        let piv = (col..4).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        for r in 0..4 {
            if r != col {
                let pivot = m[col];
                let f = m[r][col] / pivot[col];
                for (x, &y) in m[r].iter_mut().zip(&pivot).skip(col) {
                    *x -= f * y;
                }
            }
        }
    }
    Some(core::array::from_fn(|i| m[i][4] / m[i][i]))
}

/// Non-increasing upper convex hull of a down-closed point set, closed to
/// both axes.
fn upper_hull(points: &[RatePoint]) -> Vec<RatePoint> {
    let mut pts: Vec<RatePoint> = points.to_vec();
    pts.sort_by(|a, b| a.r1.total_cmp(&b.r1).then(b.r2.total_cmp(&a.r2)));
    let mut hull: Vec<RatePoint> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.r1 - a.r1) * (p.r2 - a.r2) - (b.r2 - a.r2) * (p.r1 - a.r1);
            if cross >= -1e-15 {
                hull.pop();
            } else {
                break;
            }
        }
        if hull.last().is_some_and(|h| (h.r1 - p.r1).abs() < 1e-15) {
            continue;
        }
        hull.push(p);
    }
    // Keep the part from the highest point rightwards.
    let top = hull
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.r2.total_cmp(&b.1.r2).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let front: Vec<RatePoint> = hull.into_iter().skip(top).collect();
    simplify(close_to_axes(front))
}

/// Piecewise-linear boundary as a function of `R1`; returns `None` past
/// its right end.
fn eval(curve: &[RatePoint], x: f64) -> Option<f64> {
    let last = curve.last()?;
    if x > last.r1 + 1e-15 {
        return None;
    }
    let mut best = f64::NEG_INFINITY;
    for w in curve.windows(2) {
        let (a, b) = (w[0], w[1]);
        if x >= a.r1 - 1e-15 && x <= b.r1 + 1e-15 {
            let v = if b.r1 - a.r1 <= 1e-15 {
                a.r2.max(b.r2)
            } else {
                a.r2 + (x - a.r1) / (b.r1 - a.r1) * (b.r2 - a.r2)
            };
            best = best.max(v);
        }
    }
    Some(best)
}

/// Value just right of `x`, ignoring vertical drops at `x`.
fn eval_right(curve: &[RatePoint], x: f64) -> Option<f64> {
    let last = curve.last()?;
    if x >= last.r1 - 1e-15 {
        return None;
    }
    for w in curve.windows(2) {
        let (a, b) = (w[0], w[1]);
        if x >= a.r1 - 1e-15 && x < b.r1 - 1e-15 {
            return Some(a.r2 + (x - a.r1) / (b.r1 - a.r1) * (b.r2 - a.r2));
        }
    }
    None
}

/// Boundary of the union of down-closed regions given by their boundaries.
pub fn union_boundary(curves: &[Vec<RatePoint>]) -> Vec<RatePoint> {
    let mut xs: Vec<f64> = curves.iter().flatten().map(|p| p.r1).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    let mut out: Vec<RatePoint> = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        let left = curves
            .iter()
            .filter_map(|c| eval(c, x))
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(RatePoint::new(x, left));
        let right = curves
            .iter()
            .filter_map(|c| eval_right(c, x))
            .fold(f64::NEG_INFINITY, f64::max);
        if i + 1 == xs.len() {
            out.push(RatePoint::new(x, 0.0));
            break;
        }
        if right < left - 1e-13 {
            out.push(RatePoint::new(x, right));
        }
        // Crossings of upper-envelope lines inside (x, next).
        let next = xs[i + 1];
        let lines: Vec<(f64, f64)> = curves
            .iter()
            .filter_map(|c| Some((eval_right(c, x)?, eval(c, next)?)))
            .collect();
        let mut cur = x;
        let mut cur_best = lines
            .iter()
            .copied()
            .max_by(|a, b| a.0.total_cmp(&b.0).then((a.1 - a.0).total_cmp(&(b.1 - b.0))));
        let width = next - x;
        while let Some((y0, y1)) = cur_best {
            let slope = (y1 - y0) / width;
            let at_cur = y0 + slope * (cur - x);
            let mut hit: Option<(f64, (f64, f64))> = None;
            for &(z0, z1) in &lines {
                let s = (z1 - z0) / width;
                if s > slope + 1e-15 {
                    let t = cur + (at_cur - (z0 + s * (cur - x))) / (s - slope);
                    if t > cur + 1e-13 && t < next - 1e-13 && hit.is_none_or(|h| t < h.0) {
                        hit = Some((t, (z0, z1)));
                    }
                }
            }
            match hit {
                Some((t, line)) => {
                    out.push(RatePoint::new(t, y0 + slope * (t - x)));
                    cur = t;
                    cur_best = Some(line);
                }
                None => break,
            }
        }
    }
    simplify(close_to_axes(out))
}

/// Union over a finite power-allocation grid of the split-rate regions
/// decodable at both receivers, projected to `(R1, R2)`.
pub fn hk_subregion(p: &GicParameters, alpha_grid: &[[f64; 2]], opts: SubregionOptions) -> Result<RegionCurve> {
    let gh = GaussHermite::new(DEFAULT_NODES);
    let mut parts = Vec::with_capacity(alpha_grid.len());
    for &alphas in alpha_grid {
        let q = p.with_alphas(alphas)?;
        parts.push(SplitRatePolytope::with_rule(&gh, &q, opts).projected_boundary());
    }
    Ok(RegionCurve::new("hk-subregion", union_boundary(&parts))
        .with_metadata("alpha_points", format!("{}", alpha_grid.len()))
        .with_metadata(
            "interferer_public_singleton",
            if opts.keep_interferer_public { "kept" } else { "dropped" },
        ))
}

/// Cartesian grid `values x values` for both users.
pub fn alpha_grid(values: &[f64]) -> Vec<[f64; 2]> {
    values
        .iter()
        .flat_map(|&a| values.iter().map(move |&b| [a, b]))
        .collect()
}
