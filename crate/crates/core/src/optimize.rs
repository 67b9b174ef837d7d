//! Grid sweeps, lower convex envelopes and merging of tradeoff curves.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::problem::{DistortionPoint, TradeoffCurve, RANGE_GUARD};

pub const DEFAULT_CELL_CAP: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: &'static str,
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(name: &'static str, lower: f64, upper: f64, count: usize) -> Self {
        Axis {
            name,
            lower,
            upper,
            count,
        }
    }

    /// Evenly spaced values; a single-point axis sits at `lower`.
    pub fn values(&self) -> Vec<f64> {
        linspace(self.lower, self.upper, self.count)
    }
}

pub fn linspace(lower: f64, upper: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lower],
        n => (0..n)
            .map(|i| {
                if i == n - 1 {
                    upper
                } else {
                    lower + (upper - lower) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Rectangular parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
    pub cap: u128,
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>) -> Self {
        GridSpec {
            axes,
            cap: DEFAULT_CELL_CAP,
        }
    }

    pub fn with_cap(mut self, cap: u128) -> Self {
        self.cap = cap;
        self
    }

    pub fn cells(&self) -> u128 {
        self.axes.iter().map(|a| a.count as u128).product()
    }

    pub fn validate(&self) -> Result<()> {
        for a in &self.axes {
            if !(a.lower <= a.upper) {
                return Err(Error::invalid("grid", "axis lower bound exceeds upper bound", a.name));
            }
            if a.count == 0 {
                return Err(Error::invalid("grid", "axis needs at least one point", a.name));
            }
        }
        let cells = self.cells();
        if cells > self.cap {
            return Err(Error::GridTooLarge { cells, cap: self.cap });
        }
        Ok(())
    }
}

/// Evaluates every grid cell (last axis fastest) and keeps the accepted
/// points in cell order. Cells are evaluated in parallel.
pub fn sweep<F>(grid: &GridSpec, evaluator: F) -> Result<Vec<DistortionPoint>>
where
    F: Fn(&[f64]) -> Option<DistortionPoint> + Sync,
{
    grid.validate()?;
    let values: Vec<Vec<f64>> = grid.axes.iter().map(Axis::values).collect();
    let counts: Vec<usize> = grid.axes.iter().map(|a| a.count).collect();
    let cells = grid.cells() as usize;
    let out: Vec<DistortionPoint> = (0..cells)
        .into_par_iter()
        .map_init(
            || vec![0.0; counts.len()],
            |tuple, mut cell| {
                for k in (0..counts.len()).rev() {
                    tuple[k] = values[k][cell % counts[k]];
                    cell /= counts[k];
                }
                evaluator(tuple)
            },
        )
        .flatten()
        .collect();
    if out.is_empty() {
        log::warn!("sweep over {cells} cells produced no points");
    }
    Ok(out)
}

/// Piecewise-linear value at `x` of a curve given by points sorted in x.
/// Undefined left of the first point, flat right of the last.
pub fn interpolate(xy: &[(f64, f64)], x: f64) -> Option<f64> {
    let first = xy.first()?;
    if x < first.0 - RANGE_GUARD {
        return None;
    }
    for w in xy.windows(2) {
        let (a, b) = (w[0], w[1]);
        if x <= b.0 {
            if b.0 - a.0 <= 0.0 {
                return Some(a.1.min(b.1));
            }
            let t = ((x - a.0) / (b.0 - a.0)).clamp(0.0, 1.0);
            return Some(a.1 + t * (b.1 - a.1));
        }
    }
    Some(xy.last()?.1)
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Indices of the lower-left convex boundary of `xy`, ordered by x.
///
/// Monotone-chain lower hull, cut at the leftmost point of minimal y.
/// Collinear interior points are dropped; ties in x keep the smallest y.
pub fn envelope_indices(xy: &[(f64, f64)]) -> Result<Vec<usize>> {
    if xy.is_empty() {
        return Err(Error::Empty("envelope needs at least one point"));
    }
    if xy.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::invalid("points", "coordinates must be finite", "non-finite"));
    }
    let mut order: Vec<usize> = (0..xy.len()).collect();
    order.sort_by(|&i, &j| {
        xy[i]
            .0
            .total_cmp(&xy[j].0)
            .then(xy[i].1.total_cmp(&xy[j].1))
            .then(i.cmp(&j))
    });
    order.dedup_by(|b, a| xy[*a].0 == xy[*b].0);

    let mut hull: Vec<usize> = Vec::with_capacity(order.len());
    for &i in &order {
        while hull.len() >= 2 && cross(xy[hull[hull.len() - 2]], xy[hull[hull.len() - 1]], xy[i]) <= 0.0 {
            hull.pop();
        }
        hull.push(i);
    }
    // Keep the part that is still descending.
    let mut lowest = 0;
    for (k, &i) in hull.iter().enumerate() {
        if xy[i].1 < xy[hull[lowest]].1 {
            lowest = k;
        }
    }
    hull.truncate(lowest + 1);
    Ok(hull)
}

/// Lower-left convex envelope of a point set; the points keep their tags.
pub fn lower_convex_envelope(points: Vec<DistortionPoint>) -> Result<TradeoffCurve> {
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.d[0], p.d[1])).collect();
    let keep = envelope_indices(&xy)?;
    let mut slots: Vec<Option<DistortionPoint>> = points.into_iter().map(Some).collect();
    Ok(TradeoffCurve {
        points: keep.into_iter().map(|i| slots[i].take().expect("index used once")).collect(),
        envelope_applied: true,
    })
}

/// Envelope of the union of several curves.
pub fn pareto_merge(curves: Vec<TradeoffCurve>) -> Result<TradeoffCurve> {
    if curves.is_empty() {
        return Err(Error::Empty("no curves to merge"));
    }
    lower_convex_envelope(curves.into_iter().flat_map(|c| c.points).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Params, Scheme};
    use proptest::prelude::*;

    fn pts(xy: &[(f64, f64)]) -> Vec<DistortionPoint> {
        xy.iter()
            .map(|&(x, y)| DistortionPoint::new([x, y], Scheme::Cds, Params::new()))
            .collect()
    }

    #[test]
    fn midpoint_above_chord_removed() {
        let c = lower_convex_envelope(pts(&[(0.0, 1.0), (1.0, 0.0), (0.5, 0.6)])).unwrap();
        assert_eq!(c.xy(), vec![(0.0, 1.0), (1.0, 0.0)]);
    }

    #[test]
    fn collinear_keeps_endpoints() {
        let c = lower_convex_envelope(pts(&[(0.0, 1.0), (0.25, 0.75), (0.5, 0.5), (1.0, 0.0)])).unwrap();
        assert_eq!(c.xy(), vec![(0.0, 1.0), (1.0, 0.0)]);
    }

    #[test]
    fn single_point_and_empty() {
        let c = lower_convex_envelope(pts(&[(0.3, 0.2)])).unwrap();
        assert_eq!(c.xy(), vec![(0.3, 0.2)]);
        assert!(lower_convex_envelope(vec![]).is_err());
        assert!(pareto_merge(vec![]).is_err());
    }

    #[test]
    fn ties_in_x_keep_min_y_and_tail_is_cut() {
        let c = lower_convex_envelope(pts(&[(0.0, 1.0), (0.0, 0.8), (0.5, 0.1), (0.8, 0.1), (1.0, 0.3)])).unwrap();
        assert_eq!(c.xy(), vec![(0.0, 0.8), (0.5, 0.1)]);
    }

    #[test]
    fn merge_properties() {
        let a = lower_convex_envelope(pts(&[(0.0, 1.0), (0.3, 0.4), (1.0, 0.0)])).unwrap();
        assert_eq!(pareto_merge(vec![a.clone(), a.clone()]).unwrap().xy(), a.xy());
        let dominated = TradeoffCurve {
            points: pts(&[(0.5, 0.5)]),
            envelope_applied: true,
        };
        let better = TradeoffCurve {
            points: pts(&[(0.4, 0.4)]),
            envelope_applied: true,
        };
        assert_eq!(pareto_merge(vec![dominated, better]).unwrap().xy(), vec![(0.4, 0.4)]);
    }

    #[test]
    fn sweep_basics() {
        let one = GridSpec::new(vec![Axis::new("x", 0.2, 0.9, 1)]);
        let got = sweep(&one, |t| Some(DistortionPoint::new([t[0], 0.0], Scheme::Cds, Params::new()))).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].d[0], 0.2);
        let grid = GridSpec::new(vec![Axis::new("x", 0.0, 1.0, 5), Axis::new("y", 0.0, 1.0, 3)]);
        assert!(sweep(&grid, |_| None).unwrap().is_empty());
        let got = sweep(&grid, |t| Some(DistortionPoint::new([t[0], t[1]], Scheme::Cds, Params::new()))).unwrap();
        assert_eq!(got.len(), 15);
        assert_eq!(got[1].d, [0.0, 0.5]);
        assert_eq!(got[3].d, [0.25, 0.0]);
        assert!(matches!(sweep(&grid.clone().with_cap(10), |_| None), Err(Error::GridTooLarge { .. })));
    }

    proptest! {
        #[test]
        fn merge_commutative(a in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..30),
                             b in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..30)) {
            let ca = TradeoffCurve { points: pts(&a), envelope_applied: false };
            let cb = TradeoffCurve { points: pts(&b), envelope_applied: false };
            let ab = pareto_merge(vec![ca.clone(), cb.clone()]).unwrap();
            let ba = pareto_merge(vec![cb, ca]).unwrap();
            prop_assert_eq!(ab.xy(), ba.xy());
            prop_assert_eq!(pareto_merge(vec![ab.clone()]).unwrap().xy(), ab.xy());
        }
    }
}
