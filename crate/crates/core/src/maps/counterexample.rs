//! A fixed-point-free degree -1 map on an essential continuum.
//!
//! The continuum `K` is the projection of `K'`, a horizontal line with two
//! triangular ears in every period. One period of `K'` is the image of the
//! piecewise linear path `j: [0, 1] -> D` listed in `data/counterexample_k.json`;
//! each ear is traversed on a parameter interval whose endpoints `j` glues
//! together. On `K'` the lift is `F(J(t)) = J(F0(t))`, where `J` extends `j`
//! by `J(t + 1) = J(t) + (1, 0)` and the circle factor `F0` satisfies
//! `F0(t + 1) = F0(t) - 1`. `F0` jumps inside each ear between two parameters
//! with the same `J` value, so `J o F0` is continuous.
//!
//! Off `K'` the map is `F(p) = F(nearest point of K')`, tabulated on a grid and
//! interpolated bilinearly, which keeps it continuous and equivariant.

use std::sync::OnceLock;

use serde::Deserialize;

use super::grid::GridLift;
use super::LiftMap;
use crate::curves::{point_segment_distance, PlanePoint, Rect};
use crate::error::{Error, Result};

const DATA: &str = include_str!("../../data/counterexample_k.json");
const GLUE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Deserialize)]
struct RawGeometry {
    knots: Vec<[f64; 3]>,
    ears: Vec<[f64; 2]>,
    circle_factor: Vec<[f64; 4]>,
    grid: RawGrid,
}

#[derive(Debug, Clone, Copy, Deserialize)]
struct RawGrid {
    nx: usize,
    ny: usize,
    y_min: f64,
    y_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleGeometry {
    params: Vec<f64>,
    points: Vec<PlanePoint>,
    ears: Vec<(f64, f64)>,
    pieces: Vec<[f64; 4]>,
    grid: RawGrid,
}

impl PartialEq for RawGrid {
    fn eq(&self, o: &Self) -> bool {
        self.nx == o.nx && self.ny == o.ny && self.y_min == o.y_min && self.y_max == o.y_max
    }
}

impl CounterexampleGeometry {
    /// The shipped geometry.
    pub fn shipped() -> &'static CounterexampleGeometry {
        static GEOMETRY: OnceLock<CounterexampleGeometry> = OnceLock::new();
        GEOMETRY.get_or_init(|| Self::from_json(DATA).expect("shipped counterexample data is valid"))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawGeometry = serde_json::from_str(text)?;
        let bad = |msg: String| Error::InvalidInput(format!("counterexample data: {msg}"));
        if raw.knots.len() < 3 {
            return Err(bad("need at least three knots".into()));
        }
        let params: Vec<f64> = raw.knots.iter().map(|k| k[0]).collect();
        let points: Vec<PlanePoint> = raw.knots.iter().map(|k| PlanePoint::new(k[1], k[2])).collect();
        if params[0] != 0.0 || *params.last().unwrap() != 1.0 || params.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(bad("knot parameters must increase from 0 to 1".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(bad("non-finite knot".into()));
        }
        let period = *points.last().unwrap() - points[0];
        if period.dist(PlanePoint::new(1.0, 0.0)) > GLUE_TOLERANCE {
            return Err(bad("j(1) must equal j(0) + (1, 0)".into()));
        }
        let pieces = raw.circle_factor.clone();
        if pieces.is_empty() {
            return Err(bad("empty circle factor".into()));
        }
        if pieces.windows(2).any(|w| w[0][1] != w[1][0]) || pieces.iter().any(|p| !(p[0] < p[1])) {
            return Err(bad("circle factor pieces must be contiguous".into()));
        }
        if (pieces.last().unwrap()[1] - pieces[0][0] - 1.0).abs() > GLUE_TOLERANCE {
            return Err(bad("circle factor must cover exactly one period".into()));
        }
        let geometry = CounterexampleGeometry {
            params,
            points,
            ears: raw.ears.iter().map(|e| (e[0], e[1])).collect(),
            pieces,
            grid: raw.grid,
        };
        for &(lo, hi) in &geometry.ears {
            if !(0.0 <= lo && lo < hi && hi <= 1.0) {
                return Err(bad(format!("ear [{lo}, {hi}] is not inside [0, 1]")));
            }
            if geometry.j(lo).dist(geometry.j(hi)) > GLUE_TOLERANCE {
                return Err(bad(format!("ear [{lo}, {hi}] is not closed")));
            }
        }
        // J o F0 must agree across every piece boundary, including the wrap.
        let n = geometry.pieces.len();
        for i in 0..n {
            let end = geometry.pieces[i];
            let next = geometry.pieces[(i + 1) % n];
            let start = if i + 1 == n { next[2] - 1.0 } else { next[2] };
            if geometry.lift_param(end[3]).dist(geometry.lift_param(start)) > GLUE_TOLERANCE {
                return Err(bad(format!("image jumps at t = {}", end[1])));
            }
        }
        Ok(geometry)
    }

    /// `j(t)` for `t` in `[0, 1]`.
    pub fn j(&self, t: f64) -> PlanePoint {
        let t = t.clamp(0.0, 1.0);
        let i = self.params.partition_point(|&s| s <= t).clamp(1, self.params.len() - 1) - 1;
        let s = (t - self.params[i]) / (self.params[i + 1] - self.params[i]);
        self.points[i].lerp(self.points[i + 1], s)
    }

    /// The equivariant extension `J(t) = j(t - floor t) + (floor t, 0)`.
    pub fn lift_param(&self, t: f64) -> PlanePoint {
        let k = t.floor();
        let p = self.j(t - k);
        PlanePoint::new(p.x + k, p.y)
    }

    /// The circle factor `F0`.
    pub fn circle_factor(&self, t: f64) -> f64 {
        let start = self.pieces[0][0];
        let k = (t - start).floor();
        let s = t - k;
        let piece = self
            .pieces
            .iter()
            .find(|p| s < p[1])
            .unwrap_or(self.pieces.last().unwrap());
        let u = ((s - piece[0]) / (piece[1] - piece[0])).clamp(0.0, 1.0);
        piece[2] + (piece[3] - piece[2]) * u - k
    }

    /// The lift restricted to `K'`, at the point `J(t)`.
    pub fn map_on_k(&self, t: f64) -> PlanePoint {
        self.lift_param(self.circle_factor(t))
    }

    /// Segments of one period of `K'`, with their parameter intervals.
    pub fn segments(&self) -> Vec<(PlanePoint, PlanePoint, f64, f64)> {
        (0..self.points.len() - 1)
            .map(|i| (self.points[i], self.points[i + 1], self.params[i], self.params[i + 1]))
            .collect()
    }

    pub fn ears(&self) -> &[(f64, f64)] {
        &self.ears
    }

    /// Parameter of the point of `K'` nearest to `p`, and its distance.
    /// Ties go to the first candidate in (translate, segment) order.
    pub fn nearest(&self, p: PlanePoint) -> (f64, f64) {
        let base = p.x.floor();
        let mut best = (f64::NAN, f64::INFINITY);
        for k in [base - 1.0, base, base + 1.0] {
            for (a, b, t0, t1) in self.segments() {
                let (a, b) = (PlanePoint::new(a.x + k, a.y), PlanePoint::new(b.x + k, b.y));
                let ab = b - a;
                let s = ((p - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
                let d = p.dist(a.lerp(b, s));
                if d < best.1 {
                    best = (k + t0 + s * (t1 - t0), d);
                }
            }
        }
        best
    }

    pub fn distance_to_k(&self, p: PlanePoint) -> f64 {
        let base = p.x.floor();
        [base - 1.0, base, base + 1.0]
            .iter()
            .flat_map(|&k| {
                self.segments().into_iter().map(move |(a, b, _, _)| {
                    point_segment_distance(p, PlanePoint::new(a.x + k, a.y), PlanePoint::new(b.x + k, b.y))
                })
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `F(nearest point of K')`, the map before tabulation.
    pub fn extended_map(&self, p: PlanePoint) -> PlanePoint {
        self.map_on_k(self.nearest(p).0)
    }

    /// Boxes of half-width about `radius` along one period of `K'`: each
    /// segment is cut into pieces no longer than `radius` and every piece's
    /// bounding box is dilated by `radius`. The union contains the
    /// `radius`-neighborhood of one period and stays within `3 radius` of `K'`.
    pub fn tube_tiles(&self, radius: f64) -> Vec<Rect> {
        let mut tiles = Vec::new();
        for (a, b, _, _) in self.segments() {
            let pieces = (a.dist(b) / radius).ceil().max(1.0) as usize;
            for i in 0..pieces {
                let p = a.lerp(b, i as f64 / pieces as f64);
                let q = a.lerp(b, (i + 1) as f64 / pieces as f64);
                tiles.push(Rect {
                    x_lo: p.x.min(q.x) - radius,
                    x_hi: p.x.max(q.x) + radius,
                    y_lo: p.y.min(q.y) - radius,
                    y_hi: p.y.max(q.y) + radius,
                });
            }
        }
        tiles
    }

    pub fn grid_lift(&self) -> Result<GridLift> {
        let g = self.grid;
        GridLift::tabulate(-1, 0.0, g.nx, (g.y_min, g.y_max), g.ny, |p| self.extended_map(p))
    }
}

/// The degree -1 counterexample lift, tabulated from the shipped geometry.
pub fn counterexample_deg_minus1() -> Result<LiftMap> {
    static LIFT: OnceLock<LiftMap> = OnceLock::new();
    if let Some(map) = LIFT.get() {
        return Ok(map.clone());
    }
    let map = CounterexampleGeometry::shipped()
        .grid_lift()?
        .into_lift("counterexample_deg_minus1");
    Ok(LIFT.get_or_init(|| map).clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geo() -> &'static CounterexampleGeometry {
        CounterexampleGeometry::shipped()
    }

    #[test]
    fn ears_are_glued() {
        for &(lo, hi) in geo().ears() {
            assert!(geo().j(lo).dist(geo().j(hi)) < 1e-15);
        }
    }

    #[test]
    fn circle_factor_shifts_by_minus_one() {
        for i in 0..1000 {
            let t = -2.0 + 0.00437 * i as f64;
            assert!((geo().circle_factor(t + 1.0) - geo().circle_factor(t) + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn map_on_k_is_continuous_and_equivariant() {
        let n = 20_000;
        let mut prev = geo().map_on_k(0.0);
        for i in 1..=n {
            let t = i as f64 / n as f64;
            let q = geo().map_on_k(t);
            assert!(q.dist(prev) < 1e-3, "jump at t = {t}");
            let shifted = geo().map_on_k(t + 1.0);
            assert!(shifted.dist(PlanePoint::new(q.x - 1.0, q.y)) < 1e-12);
            prev = q;
        }
    }

    #[test]
    fn no_fixed_points_on_k_before_tabulation() {
        let n = 50_000;
        let worst = (0..n)
            .map(|i| {
                let t = i as f64 / n as f64;
                let d = geo().map_on_k(t) - geo().lift_param(t);
                let m = d.x.round();
                [m - 1.0, m, m + 1.0]
                    .iter()
                    .map(|k| (d.x - k).hypot(d.y))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min);
        assert!(worst > 0.1, "margin {worst}");
    }

    #[test]
    fn nearest_point_recovers_parameters_on_k() {
        for i in 0..200 {
            let t = 0.003 + i as f64 * 0.00497;
            let p = geo().lift_param(t);
            let (s, d) = geo().nearest(p);
            assert!(d < 1e-12);
            assert!(geo().lift_param(s).dist(p) < 1e-12);
        }
    }

    #[test]
    fn tube_tiles_hug_k() {
        let r = 0.02;
        let tiles = geo().tube_tiles(r);
        for t in &tiles {
            for c in [t.lo(), t.hi(), PlanePoint::new(t.x_lo, t.y_hi), PlanePoint::new(t.x_hi, t.y_lo)] {
                assert!(geo().distance_to_k(c) <= 3.0 * r);
            }
        }
        for i in 0..500 {
            let p = geo().lift_param(i as f64 / 500.0);
            let q = PlanePoint::new(p.x + 0.7 * r, p.y - 0.7 * r);
            assert!(tiles.iter().any(|t| t.contains(q)));
        }
    }

    #[test]
    fn rejects_bad_data() {
        let mut v: serde_json::Value = serde_json::from_str(DATA).unwrap();
        v["ears"][0][1] = serde_json::json!(0.35);
        assert!(CounterexampleGeometry::from_json(&v.to_string()).is_err());
        let mut v: serde_json::Value = serde_json::from_str(DATA).unwrap();
        v["circle_factor"][0][3] = serde_json::json!(0.3);
        assert!(CounterexampleGeometry::from_json(&v.to_string()).is_err());
    }
}
