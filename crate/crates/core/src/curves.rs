//! Closed polyline curves in the plane and robust winding numbers.
//!
//! A [`ClosedCurve`] is a cyclic list of samples. The object every operation
//! acts on is the polyline through those samples, unless the curve carries a
//! continuous parametrization, in which case refinement points are taken from
//! the parametrization instead of the chords.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default exclusion radius around the basepoint of a winding number.
pub const DEFAULT_MIN_DIST: f64 = 1e-9;

/// Default cap on refinement points inserted by one winding computation.
pub const DEFAULT_REFINEMENT_BUDGET: usize = 1 << 16;

/// Point of the plane, or of the universal cover of the annulus.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub const ORIGIN: PlanePoint = PlanePoint { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        PlanePoint { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, other: PlanePoint) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: PlanePoint) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn dist(self, other: PlanePoint) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, other: PlanePoint, s: f64) -> PlanePoint {
        PlanePoint::new(
            self.x + (other.x - self.x) * s,
            self.y + (other.y - self.y) * s,
        )
    }

    /// Signed angle from `self` to `other`, in (-pi, pi].
    pub fn angle_to(self, other: PlanePoint) -> f64 {
        self.cross(other).atan2(self.dot(other))
    }
}

impl From<[f64; 2]> for PlanePoint {
    fn from(v: [f64; 2]) -> Self {
        PlanePoint::new(v[0], v[1])
    }
}

impl From<PlanePoint> for [f64; 2] {
    fn from(p: PlanePoint) -> Self {
        [p.x, p.y]
    }
}

impl fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for PlanePoint {
    type Output = PlanePoint;
    fn add(self, rhs: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for PlanePoint {
    type Output = PlanePoint;
    fn sub(self, rhs: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for PlanePoint {
    type Output = PlanePoint;
    fn mul(self, rhs: f64) -> PlanePoint {
        PlanePoint::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for PlanePoint {
    type Output = PlanePoint;
    fn neg(self) -> PlanePoint {
        PlanePoint::new(-self.x, -self.y)
    }
}

pub type Parametrization = Arc<dyn Fn(f64) -> PlanePoint + Send + Sync>;

/// Closed curve given by a cyclic list of samples.
///
/// Sample `i` sits at parameter `params[i]` in `[0, 1)`; the closing segment
/// runs from the last sample back to the first (parameter 1 wraps to 0).
#[derive(Clone)]
pub struct ClosedCurve {
    samples: Vec<PlanePoint>,
    params: Vec<f64>,
    parametrization: Option<Parametrization>,
    positively_oriented: Option<bool>,
}

impl fmt::Debug for ClosedCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedCurve")
            .field("samples", &self.samples)
            .field("parametrized", &self.parametrization.is_some())
            .field("positively_oriented", &self.positively_oriented)
            .finish()
    }
}

impl PartialEq for ClosedCurve {
    fn eq(&self, other: &Self) -> bool {
        self.samples == other.samples
    }
}

fn validate_samples(samples: &[PlanePoint]) -> Result<()> {
    if samples.len() < 3 {
        return Err(Error::InvalidCurve(format!(
            "need at least 3 samples, got {}",
            samples.len()
        )));
    }
    for (i, p) in samples.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::InvalidCurve(format!("sample {i} is not finite")));
        }
        let next = samples[(i + 1) % samples.len()];
        if *p == next {
            return Err(Error::InvalidCurve(format!(
                "samples {i} and {} coincide",
                (i + 1) % samples.len()
            )));
        }
    }
    Ok(())
}

impl ClosedCurve {
    /// Polyline curve through `samples`, parametrized by normalized arc length.
    pub fn from_points(samples: Vec<PlanePoint>) -> Result<Self> {
        validate_samples(&samples)?;
        let n = samples.len();
        let lengths: Vec<f64> = (0..n)
            .map(|i| samples[i].dist(samples[(i + 1) % n]))
            .collect();
        let total: f64 = lengths.iter().sum();
        let mut params = Vec::with_capacity(n);
        let mut acc = 0.0;
        for len in &lengths {
            params.push(acc / total);
            acc += len;
        }
        Ok(ClosedCurve {
            samples,
            params,
            parametrization: None,
            positively_oriented: None,
        })
    }

    /// Curve sampled from a continuous 1-periodic parametrization at `n`
    /// equally spaced parameters. Refinement queries the parametrization.
    pub fn from_fn<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> PlanePoint + Send + Sync + 'static,
    {
        let samples: Vec<PlanePoint> = (0..n).map(|i| f(i as f64 / n as f64)).collect();
        validate_samples(&samples)?;
        Ok(ClosedCurve {
            samples,
            params: (0..n).map(|i| i as f64 / n as f64).collect(),
            parametrization: Some(Arc::new(f)),
            positively_oriented: None,
        })
    }

    /// Counterclockwise circle, carrying its exact parametrization.
    pub fn circle(center: PlanePoint, radius: f64, n: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidCurve(format!("radius {radius} must be positive")));
        }
        let mut c = ClosedCurve::from_fn(n, move |t| {
            let a = TAU * t;
            PlanePoint::new(center.x + radius * a.cos(), center.y + radius * a.sin())
        })?;
        c.positively_oriented = Some(true);
        Ok(c)
    }

    /// Counterclockwise boundary of `[x0, x1] x [y0, y1]` with `per_side`
    /// samples on each side, starting at the lower-left corner.
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64, per_side: usize) -> Result<Self> {
        if !(x0 < x1 && y0 < y1) {
            return Err(Error::InvalidCurve(format!(
                "degenerate rectangle [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        let k = per_side.max(1);
        let corners = [
            PlanePoint::new(x0, y0),
            PlanePoint::new(x1, y0),
            PlanePoint::new(x1, y1),
            PlanePoint::new(x0, y1),
        ];
        let mut samples = Vec::with_capacity(4 * k);
        for side in 0..4 {
            let a = corners[side];
            let b = corners[(side + 1) % 4];
            for j in 0..k {
                samples.push(a.lerp(b, j as f64 / k as f64));
            }
        }
        let mut c = ClosedCurve::from_points(samples)?;
        c.positively_oriented = Some(true);
        Ok(c)
    }

    pub fn samples(&self) -> &[PlanePoint] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_parametrized(&self) -> bool {
        self.parametrization.is_some()
    }

    /// Orientation flag, when known from construction.
    pub fn known_orientation(&self) -> Option<bool> {
        self.positively_oriented
    }

    pub fn with_orientation(mut self, positive: bool) -> Self {
        self.positively_oriented = Some(positive);
        self
    }

    /// Parameter interval `[start, end]` of segment `i`.
    pub fn segment_params(&self, i: usize) -> (f64, f64) {
        let n = self.samples.len();
        let end = if i + 1 == n { 1.0 } else { self.params[i + 1] };
        (self.params[i], end)
    }

    /// Point at local position `s` in `[0, 1]` along segment `i`.
    pub fn point_on_segment(&self, i: usize, s: f64) -> PlanePoint {
        let n = self.samples.len();
        if s <= 0.0 {
            return self.samples[i];
        }
        if s >= 1.0 {
            return self.samples[(i + 1) % n];
        }
        match &self.parametrization {
            Some(f) => {
                let (t0, t1) = self.segment_params(i);
                f(t0 + (t1 - t0) * s)
            }
            None => self.samples[i].lerp(self.samples[(i + 1) % n], s),
        }
    }

    /// Point at global parameter `t` (taken mod 1).
    pub fn point_at(&self, t: f64) -> PlanePoint {
        let t = t.rem_euclid(1.0);
        let (i, s) = self.locate(t);
        self.point_on_segment(i, s)
    }

    /// Segment index and local position of global parameter `t` in `[0, 1)`.
    pub fn locate(&self, t: f64) -> (usize, f64) {
        let i = match self.params.binary_search_by(|p| p.total_cmp(&t)) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        let (t0, t1) = self.segment_params(i);
        let s = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        (i, s.clamp(0.0, 1.0))
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Same trace traversed backwards, starting from the same first sample.
    pub fn reversed(&self) -> ClosedCurve {
        let n = self.samples.len();
        let order: Vec<usize> = std::iter::once(0).chain((1..n).rev()).collect();
        let samples = order.iter().map(|&i| self.samples[i]).collect();
        let params = order
            .iter()
            .map(|&i| if i == 0 { 0.0 } else { 1.0 - self.params[i] })
            .collect();
        let parametrization = self.parametrization.clone().map(|f| {
            let g: Parametrization = Arc::new(move |t: f64| f((1.0 - t).rem_euclid(1.0)));
            g
        });
        ClosedCurve {
            samples,
            params,
            parametrization,
            positively_oriented: self.positively_oriented.map(|o| !o),
        }
    }

    /// Same curve with sample `k` as the starting sample.
    pub fn rotated(&self, k: usize) -> ClosedCurve {
        let n = self.samples.len();
        let k = k % n;
        let shift = self.params[k];
        let samples = (0..n).map(|j| self.samples[(j + k) % n]).collect();
        let params = (0..n)
            .map(|j| (self.params[(j + k) % n] - shift).rem_euclid(1.0))
            .collect();
        let parametrization = self.parametrization.clone().map(|f| {
            let g: Parametrization = Arc::new(move |t: f64| f((t + shift).rem_euclid(1.0)));
            g
        });
        ClosedCurve {
            samples,
            params,
            parametrization,
            positively_oriented: self.positively_oriented,
        }
    }

    /// Inserts `extra` evenly spaced points into every segment.
    pub fn refined(&self, extra: usize) -> ClosedCurve {
        let n = self.samples.len();
        let mut samples = Vec::with_capacity(n * (extra + 1));
        let mut params = Vec::with_capacity(n * (extra + 1));
        for i in 0..n {
            let (t0, t1) = self.segment_params(i);
            for j in 0..=extra {
                let s = j as f64 / (extra + 1) as f64;
                samples.push(self.point_on_segment(i, s));
                params.push(t0 + (t1 - t0) * s);
            }
        }
        ClosedCurve {
            samples,
            params,
            parametrization: self.parametrization.clone(),
            positively_oriented: self.positively_oriented,
        }
    }

    /// Polyline segments `(a, b)` in order, including the closing one.
    pub fn segments(&self) -> impl Iterator<Item = (PlanePoint, PlanePoint)> + '_ {
        let n = self.samples.len();
        (0..n).map(move |i| (self.samples[i], self.samples[(i + 1) % n]))
    }

    /// First pair of non-adjacent crossing segments, if any.
    pub fn self_intersection(&self) -> Option<(usize, usize)> {
        let n = self.samples.len();
        let segs: Vec<_> = self.segments().collect();
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                if segments_intersect(segs[i].0, segs[i].1, segs[j].0, segs[j].1) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Even-odd membership of `p` in the polygon bounded by the samples.
    pub fn contains_even_odd(&self, p: PlanePoint) -> bool {
        let mut inside = false;
        for (a, b) in self.segments() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if x > p.x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Distance from `p` to the polyline.
    pub fn distance_to(&self, p: PlanePoint) -> f64 {
        self.segments()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// A point strictly inside the polygon, certified by even-odd parity.
    pub fn interior_point(&self) -> Result<PlanePoint> {
        let n = self.samples.len();
        // The leftmost (then lowest) vertex is convex.
        let v = (0..n)
            .min_by(|&i, &j| {
                let (a, b) = (self.samples[i], self.samples[j]);
                a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y))
            })
            .expect("curve has samples");
        let prev = self.samples[(v + n - 1) % n];
        let cur = self.samples[v];
        let next = self.samples[(v + 1) % n];

        // Vertices strictly inside triangle (prev, cur, next) block the
        // centroid; the closest one to `cur` gives a diagonal instead.
        let tri = [prev, cur, next];
        let blocker = self
            .samples
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != v && *i != (v + 1) % n && *i != (v + n - 1) % n)
            .map(|(_, p)| *p)
            .filter(|p| point_in_triangle(*p, tri))
            .min_by(|a, b| a.dist(cur).total_cmp(&b.dist(cur)));
        let mut candidates = Vec::new();
        match blocker {
            Some(q) => candidates.push(cur.lerp(q, 0.5)),
            None => candidates.push((prev + cur + next) * (1.0 / 3.0)),
        }
        // Fallbacks: points just off the midpoint of each segment on both sides.
        let scale = self
            .segments()
            .map(|(a, b)| a.dist(b))
            .fold(f64::INFINITY, f64::min);
        for (a, b) in self.segments() {
            let m = a.lerp(b, 0.5);
            let d = b - a;
            let normal = PlanePoint::new(-d.y, d.x) * (1.0 / d.norm());
            for sign in [1.0, -1.0] {
                candidates.push(m + normal * (sign * 1e-3 * scale));
            }
        }
        candidates
            .into_iter()
            .find(|p| self.contains_even_odd(*p) && self.distance_to(*p) > DEFAULT_MIN_DIST)
            .ok_or(Error::InteriorPointNotFound)
    }
}

impl Serialize for ClosedCurve {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.samples.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ClosedCurve {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let samples = Vec::<PlanePoint>::deserialize(deserializer)?;
        ClosedCurve::from_points(samples).map_err(serde::de::Error::custom)
    }
}

fn orient(a: PlanePoint, b: PlanePoint, c: PlanePoint) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: PlanePoint, b: PlanePoint, p: PlanePoint) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test, touching counts as intersecting.
pub fn segments_intersect(p1: PlanePoint, p2: PlanePoint, q1: PlanePoint, q2: PlanePoint) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Intersection point of two segments, when they cross at a single point.
pub fn segment_intersection(
    p1: PlanePoint,
    p2: PlanePoint,
    q1: PlanePoint,
    q2: PlanePoint,
) -> Option<(f64, f64)> {
    let r = p2 - p1;
    let s = q2 - q1;
    let denom = r.cross(s);
    if denom == 0.0 {
        return None;
    }
    let qp = q1 - p1;
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some((t, u))
    } else {
        None
    }
}

pub fn point_segment_distance(p: PlanePoint, a: PlanePoint, b: PlanePoint) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let s = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a.lerp(b, s))
}

fn point_in_triangle(p: PlanePoint, tri: [PlanePoint; 3]) -> bool {
    let d1 = orient(tri[0], tri[1], p);
    let d2 = orient(tri[1], tri[2], p);
    let d3 = orient(tri[2], tri[0], p);
    (d1 > 0.0 && d2 > 0.0 && d3 > 0.0) || (d1 < 0.0 && d2 < 0.0 && d3 < 0.0)
}

/// Winding number of a closed path given segment by segment, about the origin.
///
/// `point(i, s)` evaluates segment `i` at local position `s` in `[0, 1]`, with
/// `point(i, 1) == point(i + 1, 0)` cyclically. Steps whose angle change
/// reaches pi/2 are bisected until every step is below pi/2. `too_close` builds
/// the error reported when a path point comes within `min_dist` of the origin.
pub(crate) fn winding_of_path<P, E>(
    segments: usize,
    mut point: P,
    min_dist: f64,
    budget: usize,
    too_close: E,
) -> Result<i64>
where
    P: FnMut(usize, f64) -> Result<(PlanePoint, PlanePoint)>,
    E: Fn(PlanePoint, PlanePoint, f64) -> Error,
{
    // `point` returns (vector about the origin, location on the source curve).
    let check = |v: PlanePoint, at: PlanePoint| -> Result<()> {
        let d = v.norm();
        if !(d > min_dist) {
            return Err(too_close(at, v, d));
        }
        Ok(())
    };
    let mut starts = Vec::with_capacity(segments);
    for i in 0..segments {
        let (v, at) = point(i, 0.0)?;
        check(v, at)?;
        starts.push(v);
    }
    let mut total = 0.0;
    let mut inserted = 0usize;
    let mut stack: Vec<(f64, PlanePoint, f64, PlanePoint)> = Vec::new();
    for i in 0..segments {
        stack.push((0.0, starts[i], 1.0, starts[(i + 1) % segments]));
        while let Some((s0, v0, s1, v1)) = stack.pop() {
            let step = v0.angle_to(v1);
            if step.abs() < FRAC_PI_2 {
                total += step;
                continue;
            }
            let mid = 0.5 * (s0 + s1);
            if mid <= s0 || mid >= s1 {
                // Parameter exhausted without resolving the turn.
                let (_, at) = point(i, mid)?;
                return Err(too_close(at, v0, v0.norm().min(v1.norm())));
            }
            inserted += 1;
            if inserted > budget {
                return Err(Error::RefinementBudgetExceeded { budget });
            }
            let (vm, at) = point(i, mid)?;
            check(vm, at)?;
            stack.push((mid, vm, s1, v1));
            stack.push((s0, v0, mid, vm));
        }
    }
    let turns = total / TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.1 {
        return Err(Error::NonIntegerWinding { value: turns });
    }
    Ok(rounded as i64)
}

/// Winding number of `curve` about `basepoint`.
pub fn winding_number(curve: &ClosedCurve, basepoint: PlanePoint, min_dist: f64) -> Result<i64> {
    winding_number_with_budget(curve, basepoint, min_dist, DEFAULT_REFINEMENT_BUDGET)
}

pub fn winding_number_with_budget(
    curve: &ClosedCurve,
    basepoint: PlanePoint,
    min_dist: f64,
    budget: usize,
) -> Result<i64> {
    winding_of_path(
        curve.len(),
        |i, s| {
            let p = curve.point_on_segment(i, s);
            Ok((p - basepoint, p))
        },
        min_dist,
        budget,
        |at, _, distance| Error::DistanceViolation {
            point: at,
            basepoint,
            distance,
            min_dist,
        },
    )
}

/// True when the winding number about a certified interior point is 1.
pub fn is_positively_oriented(curve: &ClosedCurve) -> Result<bool> {
    if let Some((first, second)) = curve.self_intersection() {
        return Err(Error::NotSimple { first, second });
    }
    let p0 = curve.interior_point()?;
    Ok(winding_number(curve, p0, DEFAULT_MIN_DIST)? == 1)
}

/// Returns the curve traversed positively (reversing it if needed).
pub fn positively_oriented(curve: ClosedCurve) -> Result<ClosedCurve> {
    if is_positively_oriented(&curve)? {
        Ok(curve.with_orientation(true))
    } else {
        Ok(curve.reversed().with_orientation(true))
    }
}

/// Angle of `p` in `[0, 2 pi)`.
pub fn polar_angle(p: PlanePoint) -> f64 {
    let a = p.y.atan2(p.x);
    if a < 0.0 {
        a + TAU
    } else if a >= TAU {
        a - TAU
    } else {
        a
    }
}

/// Closed axis-aligned box `[x_lo, x_hi] x [y_lo, y_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Rect {
    pub fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Result<Self> {
        let finite = [x_lo, x_hi, y_lo, y_hi].iter().all(|v| v.is_finite());
        if !finite || !(x_lo < x_hi && y_lo < y_hi) {
            return Err(Error::InvalidInput(format!(
                "degenerate box [{x_lo}, {x_hi}] x [{y_lo}, {y_hi}]"
            )));
        }
        Ok(Rect { x_lo, x_hi, y_lo, y_hi })
    }

    pub fn width(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn height(&self) -> f64 {
        self.y_hi - self.y_lo
    }

    pub fn center(&self) -> PlanePoint {
        PlanePoint::new(0.5 * (self.x_lo + self.x_hi), 0.5 * (self.y_lo + self.y_hi))
    }

    pub fn lo(&self) -> PlanePoint {
        PlanePoint::new(self.x_lo, self.y_lo)
    }

    pub fn hi(&self) -> PlanePoint {
        PlanePoint::new(self.x_hi, self.y_hi)
    }

    /// Half the diagonal.
    pub fn radius(&self) -> f64 {
        0.5 * self.width().hypot(self.height())
    }

    pub fn contains(&self, p: PlanePoint) -> bool {
        p.x >= self.x_lo && p.x <= self.x_hi && p.y >= self.y_lo && p.y <= self.y_hi
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.x_lo <= other.x_hi && other.x_lo <= self.x_hi && self.y_lo <= other.y_hi && other.y_lo <= self.y_hi
    }

    pub fn dilated(&self, r: f64) -> Rect {
        Rect {
            x_lo: self.x_lo - r,
            x_hi: self.x_hi + r,
            y_lo: self.y_lo - r,
            y_hi: self.y_hi + r,
        }
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Rect {
        Rect {
            x_lo: self.x_lo + dx,
            x_hi: self.x_hi + dx,
            y_lo: self.y_lo + dy,
            y_hi: self.y_hi + dy,
        }
    }

    /// Positively oriented boundary with `per_side` samples per side.
    pub fn boundary(&self, per_side: usize) -> ClosedCurve {
        ClosedCurve::rectangle(self.x_lo, self.x_hi, self.y_lo, self.y_hi, per_side)
            .expect("rect is non-degenerate")
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}] x [{}, {}]", self.x_lo, self.x_hi, self.y_lo, self.y_hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_square_ccw() -> ClosedCurve {
        ClosedCurve::from_points(vec![
            PlanePoint::new(0.0, 0.0),
            PlanePoint::new(1.0, 0.0),
            PlanePoint::new(1.0, 1.0),
            PlanePoint::new(0.0, 1.0),
        ])
        .unwrap()
    }

    /// Brute-force oracle: dense sampling of the angle, no adaptive refinement.
    fn brute_force_turns(f: impl Fn(f64) -> PlanePoint, samples: usize) -> f64 {
        let mut total = 0.0;
        let mut prev = f(0.0);
        for i in 1..=samples {
            let cur = f(i as f64 / samples as f64);
            total += prev.angle_to(cur);
            prev = cur;
        }
        total / TAU
    }

    #[test]
    fn circle_winds_once() {
        let c = ClosedCurve::circle(PlanePoint::ORIGIN, 1.0, 16).unwrap();
        assert_eq!(winding_number(&c, PlanePoint::ORIGIN, DEFAULT_MIN_DIST).unwrap(), 1);
        assert_eq!(
            winding_number(&c.reversed(), PlanePoint::ORIGIN, DEFAULT_MIN_DIST).unwrap(),
            -1
        );
    }

    #[test]
    fn triple_circle_matches_brute_force() {
        let f = |t: f64| PlanePoint::new((TAU * 3.0 * t).cos(), (TAU * 3.0 * t).sin());
        let oracle = brute_force_turns(f, 10_000);
        assert!((oracle - 3.0).abs() < 1e-9);
        // Only 5 samples: adaptive refinement must recover all three turns.
        let c = ClosedCurve::from_fn(5, f).unwrap();
        assert_eq!(winding_number(&c, PlanePoint::ORIGIN, DEFAULT_MIN_DIST).unwrap(), 3);
    }

    #[test]
    fn sample_too_close_is_rejected() {
        let c = unit_square_ccw();
        let err = winding_number(&c, PlanePoint::new(0.5, 0.0), 1e-9).unwrap_err();
        assert!(matches!(err, Error::DistanceViolation { .. }), "{err:?}");
        let err = winding_number(&c, PlanePoint::new(1.0, 1.0 - 1e-12), 1e-9).unwrap_err();
        assert!(matches!(err, Error::DistanceViolation { .. }), "{err:?}");
    }

    #[test]
    fn outside_point_has_zero_winding() {
        let c = unit_square_ccw();
        assert_eq!(winding_number(&c, PlanePoint::new(3.0, 0.5), 1e-9).unwrap(), 0);
    }

    #[test]
    fn orientation_of_squares() {
        let ccw = unit_square_ccw();
        assert!(is_positively_oriented(&ccw).unwrap());
        assert!(!is_positively_oriented(&ccw.reversed()).unwrap());
        let rect = ClosedCurve::rectangle(-2.0, 2.0, -1.0, 1.0, 1).unwrap();
        // Ray-casting oracle: the origin is inside and winds once.
        assert!(rect.contains_even_odd(PlanePoint::ORIGIN));
        assert!(is_positively_oriented(&rect).unwrap());
    }

    #[test]
    fn concave_curve_interior_point() {
        // An L-shape whose leftmost vertex has a blocking reflex vertex.
        let c = ClosedCurve::from_points(vec![
            PlanePoint::new(0.0, 0.0),
            PlanePoint::new(2.0, -1.0),
            PlanePoint::new(0.2, 0.0),
            PlanePoint::new(2.0, 1.0),
        ])
        .unwrap();
        let p = c.interior_point().unwrap();
        assert!(c.contains_even_odd(p));
        assert!(is_positively_oriented(&c).unwrap());
        assert!(!is_positively_oriented(&c.reversed()).unwrap());
    }

    #[test]
    fn bowtie_is_not_simple() {
        let c = ClosedCurve::from_points(vec![
            PlanePoint::new(0.0, 0.0),
            PlanePoint::new(1.0, 1.0),
            PlanePoint::new(1.0, 0.0),
            PlanePoint::new(0.0, 1.0),
        ])
        .unwrap();
        assert!(matches!(is_positively_oriented(&c), Err(Error::NotSimple { .. })));
    }

    #[test]
    fn invalid_curves() {
        assert!(ClosedCurve::from_points(vec![PlanePoint::ORIGIN, PlanePoint::new(1.0, 0.0)]).is_err());
        let p = PlanePoint::new(1.0, 1.0);
        assert!(ClosedCurve::from_points(vec![PlanePoint::ORIGIN, p, p]).is_err());
        assert!(ClosedCurve::from_points(vec![
            PlanePoint::ORIGIN,
            p,
            PlanePoint::new(f64::NAN, 0.0)
        ])
        .is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = unit_square_ccw();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, "[[0.0,0.0],[1.0,0.0],[1.0,1.0],[0.0,1.0]]");
        let back: ClosedCurve = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<ClosedCurve>("[[0,0],[0,0],[1,1]]").is_err());
    }

    #[test]
    fn locate_and_point_at() {
        let c = unit_square_ccw();
        assert_eq!(c.point_at(0.125), PlanePoint::new(0.5, 0.0));
        assert_eq!(c.point_at(1.125), PlanePoint::new(0.5, 0.0));
        let circ = ClosedCurve::circle(PlanePoint::ORIGIN, 2.0, 8).unwrap();
        let p = circ.point_at(0.25);
        assert!((p.x).abs() < 1e-12 && (p.y - 2.0).abs() < 1e-12);
    }

    fn star(n: usize, wobble: f64) -> ClosedCurve {
        ClosedCurve::from_fn(n, move |t| {
            let r = 1.0 + wobble * (TAU * 5.0 * t).cos();
            PlanePoint::new(r * (TAU * t).cos(), r * (TAU * t).sin())
        })
        .unwrap()
    }

    proptest! {
        #[test]
        fn refinement_invariance(n in 8usize..40, extra in 1usize..4, wobble in 0.0f64..0.4,
                                 bx in -3.0f64..3.0, by in -3.0f64..3.0) {
            let c = star(n, wobble);
            let b = PlanePoint::new(bx, by);
            prop_assume!(c.distance_to(b) > 1e-3);
            let w = winding_number(&c, b, 1e-9);
            let wr = winding_number(&c.refined(extra), b, 1e-9);
            prop_assert_eq!(w, wr);
        }

        #[test]
        fn reversal_negates(n in 8usize..40, wobble in 0.0f64..0.4,
                            bx in -3.0f64..3.0, by in -3.0f64..3.0) {
            let c = star(n, wobble);
            let b = PlanePoint::new(bx, by);
            prop_assume!(c.distance_to(b) > 1e-3);
            let w = winding_number(&c, b, 1e-9).unwrap();
            let wr = winding_number(&c.reversed(), b, 1e-9).unwrap();
            prop_assert_eq!(w + wr, 0);
        }

        #[test]
        fn same_component_same_winding(r in 0.5f64..3.0, n in 6usize..50,
                                       a in 0.0f64..1.0, b in 0.0f64..1.0,
                                       ta in 0.0f64..1.0, tb in 0.0f64..1.0) {
            // Convex curve: membership decided by radius.
            let c = ClosedCurve::circle(PlanePoint::ORIGIN, r, n).unwrap();
            let inner = r * (TAU / (2.0 * n as f64)).cos();
            let p = PlanePoint::new(a * 0.9 * inner * (TAU * ta).cos(), a * 0.9 * inner * (TAU * ta).sin());
            let q = PlanePoint::new(b * 0.9 * inner * (TAU * tb).cos(), b * 0.9 * inner * (TAU * tb).sin());
            prop_assert_eq!(winding_number(&c, p, 1e-9).unwrap(), winding_number(&c, q, 1e-9).unwrap());
            let far = PlanePoint::new((r + 1.0 + a) * (TAU * ta).cos(), (r + 1.0 + a) * (TAU * ta).sin());
            prop_assert_eq!(winding_number(&c, far, 1e-9).unwrap(), 0);
        }

        #[test]
        fn rotation_of_start_sample(n in 8usize..30, k in 0usize..30, wobble in 0.0f64..0.4) {
            let c = star(n, wobble);
            let w = winding_number(&c, PlanePoint::new(0.1, -0.05), 1e-9).unwrap();
            prop_assert_eq!(winding_number(&c.rotated(k), PlanePoint::new(0.1, -0.05), 1e-9).unwrap(), w);
        }
    }
}
