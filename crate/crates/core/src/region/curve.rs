use alloc::string::String;
use alloc::vec::Vec;

/// Rate pair in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
}

impl RatePoint {
    pub fn new(r1: f64, r2: f64) -> Self {
        Self { r1, r2 }
    }

    pub fn sum(&self) -> f64 {
        self.r1 + self.r2
    }
}

/// Upper-right boundary of a region that is closed under decreasing either
/// rate. Points run from the `R2` axis to the `R1` axis with `R1`
/// non-decreasing and `R2` non-increasing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RegionCurve {
    pub label: String,
    pub points: Vec<RatePoint>,
    /// Free-form `(key, value)` notes such as the power-allocation grid.
    pub metadata: Vec<(String, String)>,
}

const EPS: f64 = 1e-12;

impl RegionCurve {
    pub fn new(label: impl Into<String>, points: Vec<RatePoint>) -> Self {
        Self {
            label: label.into(),
            points,
            metadata: Vec::new(),
        }
    }

    /// Boundary through the Pareto-optimal subset of `points`, closed to both
    /// axes and joined by straight segments.
    pub fn from_pareto(label: impl Into<String>, points: &[RatePoint]) -> Self {
        let mut pts: Vec<RatePoint> = points
            .iter()
            .copied()
            .filter(|p| p.r1.is_finite() && p.r2.is_finite())
            .collect();
        pts.sort_by(|a, b| b.r1.total_cmp(&a.r1).then(b.r2.total_cmp(&a.r2)));
        let mut front: Vec<RatePoint> = Vec::new();
        let mut best = f64::NEG_INFINITY;
        for p in pts {
            if p.r2 > best + EPS {
                front.push(p);
                best = p.r2;
            }
        }
        front.reverse();
        Self::new(label, close_to_axes(front))
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.push((key.into(), value.into()));
        self
    }

    pub fn max_r1(&self) -> f64 {
        self.points.iter().map(|p| p.r1).fold(0.0, f64::max)
    }

    pub fn max_r2(&self) -> f64 {
        self.points.iter().map(|p| p.r2).fold(0.0, f64::max)
    }

    /// Largest `R2` on the boundary at `R1 = x`, `None` beyond the curve.
    pub fn upper_value(&self, x: f64) -> Option<f64> {
        let pts = &self.points;
        if pts.is_empty() || x < -EPS || x > self.max_r1() + EPS {
            return None;
        }
        let mut best = f64::NEG_INFINITY;
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if x + EPS >= a.r1 && x <= b.r1 + EPS {
                let v = if b.r1 - a.r1 <= EPS {
                    a.r2.max(b.r2)
                } else {
                    let t = ((x - a.r1) / (b.r1 - a.r1)).clamp(0.0, 1.0);
                    a.r2 + t * (b.r2 - a.r2)
                };
                best = best.max(v);
            }
        }
        if pts.len() == 1 {
            best = pts[0].r2;
        }
        Some(best)
    }

    /// Whether `p` lies in the region enlarged by `tol` in both rates.
    pub fn contains(&self, p: RatePoint, tol: f64) -> bool {
        if p.r1 < -tol || p.r2 < -tol {
            return false;
        }
        let x = (p.r1 - tol).max(0.0);
        match self.upper_value(x) {
            Some(v) => p.r2 <= v + tol,
            None => false,
        }
    }

    /// Whether every boundary point of `other` lies inside `self`.
    pub fn dominates(&self, other: &RegionCurve, tol: f64) -> bool {
        other.points.iter().all(|&p| self.contains(p, tol))
    }

    pub fn is_monotone(&self) -> bool {
        self.points
            .windows(2)
            .all(|w| w[1].r1 >= w[0].r1 - EPS && w[1].r2 <= w[0].r2 + EPS)
    }
}

/// Prefix `(0, R2 of first)` and suffix `(R1 of last, 0)` when missing.
pub(crate) fn close_to_axes(mut front: Vec<RatePoint>) -> Vec<RatePoint> {
    if front.is_empty() {
        return alloc::vec![RatePoint::default()];
    }
    let first = front[0];
    if first.r1 > EPS {
        front.insert(0, RatePoint::new(0.0, first.r2));
    }
    let last = *front.last().unwrap();
    if last.r2 > EPS {
        front.push(RatePoint::new(last.r1, 0.0));
    }
    front
}

/// Drop points lying on the segment between their neighbours.
pub(crate) fn simplify(points: Vec<RatePoint>) -> Vec<RatePoint> {
    let mut out: Vec<RatePoint> = Vec::with_capacity(points.len());
    for p in points {
        if let Some(&last) = out.last() {
            if (p.r1 - last.r1).abs() <= EPS && (p.r2 - last.r2).abs() <= EPS {
                continue;
            }
        }
        while out.len() >= 2 {
            let a = out[out.len() - 2];
            let b = out[out.len() - 1];
            let cross = (b.r1 - a.r1) * (p.r2 - a.r2) - (b.r2 - a.r2) * (p.r1 - a.r1);
            if cross.abs() <= 1e-13 {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pareto_of_rectangle_corners() {
        let c = RegionCurve::from_pareto(
            "rect",
            &[
                RatePoint::new(0.0, 0.0),
                RatePoint::new(0.5, 0.0),
                RatePoint::new(0.5, 0.3),
                RatePoint::new(0.2, 0.3),
            ],
        );
        assert_eq!(
            c.points,
            alloc::vec![
                RatePoint::new(0.0, 0.3),
                RatePoint::new(0.5, 0.3),
                RatePoint::new(0.5, 0.0)
            ]
        );
        assert!(c.is_monotone());
        assert!(c.contains(RatePoint::new(0.5, 0.3), 0.0));
        assert!(c.contains(RatePoint::new(0.49, 0.29), 0.0));
        assert!(!c.contains(RatePoint::new(0.51, 0.1), 0.0));
        assert!(c.contains(RatePoint::new(0.504, 0.1), 0.005));
        assert_eq!(c.upper_value(0.5), Some(0.3));
    }

    #[test]
    fn collinear_points_are_dropped() {
        let pts = simplify(alloc::vec![
            RatePoint::new(0.0, 1.0),
            RatePoint::new(0.5, 0.5),
            RatePoint::new(1.0, 0.0),
        ]);
        assert_eq!(pts.len(), 2);
    }
}
