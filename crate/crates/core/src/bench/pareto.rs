use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Maximize,
    Minimize,
}

impl Orientation {
    fn signed(self, v: f64) -> f64 {
        match self {
            Orientation::Maximize => v,
            Orientation::Minimize => -v,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Maximize => Orientation::Minimize,
            Orientation::Minimize => Orientation::Maximize,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub x: f64,
    pub y: f64,
    pub x_orientation: Orientation,
    pub y_orientation: Orientation,
    /// Id of the record the point came from.
    pub tag: String,
}

impl ParetoPoint {
    pub fn new(x: f64, y: f64, x_orientation: Orientation, y_orientation: Orientation, tag: impl Into<String>) -> Self {
        ParetoPoint {
            x,
            y,
            x_orientation,
            y_orientation,
            tag: tag.into(),
        }
    }

    fn oriented(&self) -> (f64, f64) {
        (self.x_orientation.signed(self.x), self.y_orientation.signed(self.y))
    }

    /// At least as good on both axes and strictly better on one.
    pub fn dominates(&self, other: &ParetoPoint) -> bool {
        let (ax, ay) = self.oriented();
        let (bx, by) = other.oriented();
        ax >= bx && ay >= by && (ax > bx || ay > by)
    }
}

/// Non-dominated points, sorted by `x` (then `y`, then input order).
/// Exact duplicates of a front point are all kept.
pub fn pareto_front(points: &[ParetoPoint]) -> Result<Vec<ParetoPoint>> {
    let Some(first) = points.first() else {
        return Ok(Vec::new());
    };
    let orientation = (first.x_orientation, first.y_orientation);
    for p in points {
        if (p.x_orientation, p.y_orientation) != orientation {
            return Err(Error::invalid("points mix axis orientations"));
        }
        if !p.x.is_finite() || !p.y.is_finite() {
            return Err(Error::invalid(format!("non-finite point `{}`", p.tag)));
        }
    }

    // Sweep from best x to worst; within equal x only the best y survives,
    // and it must beat every y seen at strictly better x.
    let mut order: Vec<usize> = (0..points.len()).collect();
    let oriented: Vec<(f64, f64)> = points.iter().map(ParetoPoint::oriented).collect();
    order.sort_by(|&a, &b| {
        let (ax, ay) = oriented[a];
        let (bx, by) = oriented[b];
        bx.total_cmp(&ax).then(by.total_cmp(&ay))
    });

    let mut keep = Vec::new();
    let mut best_y = f64::NEG_INFINITY;
    let mut i = 0;
    while i < order.len() {
        let x = oriented[order[i]].0;
        let mut j = i;
        while j < order.len() && oriented[order[j]].0 == x {
            j += 1;
        }
        let group_y = oriented[order[i]].1;
        if group_y > best_y {
            keep.extend(order[i..j].iter().copied().filter(|&k| oriented[k].1 == group_y));
            best_y = group_y;
        }
        i = j;
    }

    keep.sort_by(|&a, &b| {
        let (pa, pb) = (&points[a], &points[b]);
        pa.x.partial_cmp(&pb.x)
            .unwrap_or(Ordering::Equal)
            .then(pa.y.partial_cmp(&pb.y).unwrap_or(Ordering::Equal))
            .then(a.cmp(&b))
    });
    Ok(keep.into_iter().map(|k| points[k].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use Orientation::*;

    fn pt(x: f64, y: f64, tag: &str) -> ParetoPoint {
        ParetoPoint::new(x, y, Maximize, Maximize, tag)
    }

    fn tags(points: &[ParetoPoint]) -> Vec<&str> {
        points.iter().map(|p| p.tag.as_str()).collect()
    }

    #[test]
    fn three_point_example() {
        // (las, speed) pairs, speed on x.
        let pts = [pt(100.0, 90.0, "a"), pt(200.0, 85.0, "b"), pt(50.0, 80.0, "c")];
        assert_eq!(tags(&pareto_front(&pts).unwrap()), ["a", "b"]);
    }

    #[test]
    fn single_and_empty() {
        assert_eq!(tags(&pareto_front(&[pt(1.0, 1.0, "a")]).unwrap()), ["a"]);
        assert!(pareto_front(&[]).unwrap().is_empty());
    }

    #[test]
    fn duplicates_and_ties() {
        let pts = [
            pt(1.0, 5.0, "a"),
            pt(1.0, 5.0, "b"),
            pt(1.0, 4.0, "c"),
            pt(0.5, 5.0, "d"),
            pt(2.0, 1.0, "e"),
        ];
        assert_eq!(tags(&pareto_front(&pts).unwrap()), ["a", "b", "e"]);
    }

    #[test]
    fn minimize_axis() {
        let p = |x: f64, y: f64, t: &str| ParetoPoint::new(x, y, Minimize, Maximize, t);
        let pts = [p(10.0, 90.0, "a"), p(5.0, 80.0, "b"), p(20.0, 85.0, "c")];
        assert_eq!(tags(&pareto_front(&pts).unwrap()), ["b", "a"]);
    }

    #[test]
    fn rejects_mixed_orientation_and_nan() {
        let pts = [pt(1.0, 1.0, "a"), ParetoPoint::new(1.0, 1.0, Minimize, Maximize, "b")];
        assert!(pareto_front(&pts).is_err());
        assert!(pareto_front(&[pt(f64::NAN, 1.0, "a")]).is_err());
    }
}
