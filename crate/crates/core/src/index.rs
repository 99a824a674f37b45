//! Lefschetz index of a map along a closed curve.
//!
//! The index is the winding number about the origin of the displacement
//! curve `f(gamma(t)) - gamma(t)`. Besides the index itself this module
//! carries executable forms of the rules used to compute indices by hand:
//! saddle boxes, quadrilateral frames, the jump of the index when the image
//! of an arc is pushed across it, and invariance under homotopy.

use serde::{Deserialize, Serialize};

use crate::curves::{
    is_positively_oriented, positively_oriented, segment_intersection, winding_of_path, ClosedCurve, PlanePoint,
    Rect, DEFAULT_REFINEMENT_BUDGET,
};
use crate::error::{Error, Result};
use crate::maps::{Fallible, PlaneMap};

/// Default lower bound on the displacement along the curve.
pub const DEFAULT_MIN_DISP: f64 = 1e-6;

/// Samples per side used by the boundary condition checks.
pub const SIDE_SAMPLES: usize = 64;

const RAY_LENGTH: f64 = 1e6;

/// Coarse curves are refined to at least this many samples before the
/// displacement winding is traced, so turns between far-apart vertices are
/// not aliased away.
pub const MIN_INDEX_SAMPLES: usize = 256;

/// Index along `curve` of the map `g(t, gamma(t))`, where `t` is the curve
/// parameter. Lets families that depend on the parameter reuse the engine.
pub fn index_along<G>(curve: &ClosedCurve, g: G, min_disp: f64, budget: usize) -> Result<i64>
where
    G: Fn(f64, PlanePoint) -> Result<PlanePoint>,
{
    let refined;
    let curve = if curve.len() < MIN_INDEX_SAMPLES {
        refined = curve.refined(MIN_INDEX_SAMPLES.div_ceil(curve.len()) - 1);
        &refined
    } else {
        curve
    };
    winding_of_path(
        curve.len(),
        |i, s| {
            let (t0, t1) = curve.segment_params(i);
            let p = curve.point_on_segment(i, s);
            let q = g(t0 + (t1 - t0) * s, p)?;
            Ok((q - p, p))
        },
        min_disp,
        budget,
        |point, _, displacement| Error::FixedPointOnCurve {
            point,
            displacement,
            min_disp,
        },
    )
}

pub fn lefschetz_index<M: PlaneMap + ?Sized>(map: &M, curve: &ClosedCurve, min_disp: f64) -> Result<i64> {
    lefschetz_index_with_budget(map, curve, min_disp, DEFAULT_REFINEMENT_BUDGET)
}

pub fn lefschetz_index_with_budget<M: PlaneMap + ?Sized>(
    map: &M,
    curve: &ClosedCurve,
    min_disp: f64,
    budget: usize,
) -> Result<i64> {
    index_along(curve, |_, p| map.apply(p), min_disp, budget)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SaddleVariant {
    /// Right side mapped to the right, left side to the left: index -1.
    Standard,
    /// Right side mapped past the left side and vice versa: index +1.
    Crossed,
}

impl SaddleVariant {
    pub fn expected_index(self) -> i64 {
        match self {
            SaddleVariant::Standard => -1,
            SaddleVariant::Crossed => 1,
        }
    }
}

fn side_samples(a: PlanePoint, b: PlanePoint) -> impl Iterator<Item = PlanePoint> {
    (0..=SIDE_SAMPLES).map(move |j| a.lerp(b, j as f64 / SIDE_SAMPLES as f64))
}

/// Index of `map` on the boundary of a box whose top is mapped below the top,
/// bottom above the bottom, and whose vertical sides are mapped outward
/// (`Standard`) or across to the opposite side (`Crossed`).
pub fn saddle_rectangle_index<M: PlaneMap + ?Sized>(map: &M, rect: &Rect, variant: SaddleVariant) -> Result<i64> {
    let (x0, x1, y0, y1) = (rect.x_lo, rect.x_hi, rect.y_lo, rect.y_hi);
    let crossed = variant == SaddleVariant::Crossed;
    let sides: [(&str, PlanePoint, PlanePoint, Box<dyn Fn(PlanePoint) -> bool>); 4] = [
        ("top", PlanePoint::new(x0, y1), PlanePoint::new(x1, y1), Box::new(move |q| q.y < y1)),
        ("bottom", PlanePoint::new(x0, y0), PlanePoint::new(x1, y0), Box::new(move |q| q.y > y0)),
        (
            "right",
            PlanePoint::new(x1, y0),
            PlanePoint::new(x1, y1),
            Box::new(move |q| if crossed { q.x < x0 } else { q.x > x1 }),
        ),
        (
            "left",
            PlanePoint::new(x0, y0),
            PlanePoint::new(x0, y1),
            Box::new(move |q| if crossed { q.x > x1 } else { q.x < x0 }),
        ),
    ];
    for (side, a, b, ok) in &sides {
        for p in side_samples(*a, *b) {
            let image = map.apply(p)?;
            if !ok(image) {
                return Err(Error::BoundaryConditionViolation {
                    side: side.to_string(),
                    point: p,
                    image,
                });
            }
        }
    }
    let got = lefschetz_index(map, &rect.boundary(SIDE_SAMPLES), DEFAULT_MIN_DISP)?;
    let expected = variant.expected_index();
    if got != expected {
        return Err(Error::IndexMismatch { expected, got });
    }
    Ok(got)
}

/// Position along a polyline: segment index plus local parameter.
fn crossings(a: &[PlanePoint], b: &[PlanePoint]) -> Vec<(f64, f64, PlanePoint)> {
    let mut out: Vec<(f64, f64, PlanePoint)> = Vec::new();
    for i in 0..a.len().saturating_sub(1) {
        for j in 0..b.len().saturating_sub(1) {
            if let Some((t, u)) = segment_intersection(a[i], a[i + 1], b[j], b[j + 1]) {
                let p = a[i].lerp(a[i + 1], t);
                if out.iter().all(|c| c.2.dist(p) > 1e-12) {
                    out.push((i as f64 + t, j as f64 + u, p));
                }
            }
        }
    }
    out
}

fn point_at(poly: &[PlanePoint], s: f64) -> PlanePoint {
    let i = (s.floor() as usize).min(poly.len() - 2);
    poly[i].lerp(poly[i + 1], s - i as f64)
}

/// Vertices of `poly` from position `s0` to `s1`, endpoints included.
fn sub_arc(poly: &[PlanePoint], s0: f64, s1: f64) -> Vec<PlanePoint> {
    let mut out = vec![point_at(poly, s0)];
    if s0 <= s1 {
        let first = s0.floor() as usize + 1;
        for k in first..poly.len() {
            if (k as f64) >= s1 {
                break;
            }
            out.push(poly[k]);
        }
    } else {
        let mut k = s0.floor() as usize;
        if k as f64 == s0 {
            k = k.wrapping_sub(1);
        }
        while k < poly.len() && (k as f64) > s1 {
            out.push(poly[k]);
            k = k.wrapping_sub(1);
        }
    }
    out.push(point_at(poly, s1));
    out.dedup_by(|a, b| a.dist(*b) < 1e-15);
    out
}

/// The polyline with its end segments prolonged into long rays.
fn extended(poly: &[PlanePoint]) -> Vec<PlanePoint> {
    let n = poly.len();
    let head = poly[0] - poly[1];
    let tail = poly[n - 1] - poly[n - 2];
    let mut out = Vec::with_capacity(n + 2);
    out.push(poly[0] + head * (RAY_LENGTH / head.norm()));
    out.extend_from_slice(poly);
    out.push(poly[n - 1] + tail * (RAY_LENGTH / tail.norm()));
    out
}

/// Crossing parity test: do `q` and `r` lie on the same side of the line?
fn same_side(line: &[PlanePoint], q: PlanePoint, r: PlanePoint) -> bool {
    let count = line
        .windows(2)
        .filter(|w| segment_intersection(q, r, w[0], w[1]).is_some())
        .count();
    count % 2 == 0
}

fn densify(arc: &[PlanePoint], min_samples: usize) -> Vec<PlanePoint> {
    let segs = arc.len() - 1;
    let per = min_samples.div_ceil(segs).max(1);
    let mut out = Vec::with_capacity(segs * per + 1);
    for w in arc.windows(2) {
        for j in 0..per {
            out.push(w[0].lerp(w[1], j as f64 / per as f64));
        }
    }
    out.push(*arc.last().unwrap());
    out
}

fn validate_polyline(name: &str, poly: &[PlanePoint]) -> Result<()> {
    if poly.len() < 2 {
        return Err(Error::NotAQuadrilateral(format!("{name} needs at least two points")));
    }
    if poly.iter().any(|p| !p.is_finite()) || poly.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::NotAQuadrilateral(format!("{name} has repeated or non-finite points")));
    }
    Ok(())
}

/// Index on the quadrilateral cut out by the lines `alpha`, `beta` and the
/// transversals `gamma`, `delta`. Each transversal must cross each line once.
///
/// With `expect = -1` the images must satisfy: `alpha` side towards `beta`,
/// `beta` side towards `alpha`, `delta` side away from `gamma` beyond `delta`,
/// `gamma` side away from `delta` beyond `gamma`. With `expect = +1` the
/// transversal sides are mapped across instead: the `delta` side beyond
/// `gamma` and the `gamma` side beyond `delta`.
pub fn quad_configuration_index<M: PlaneMap + ?Sized>(
    map: &M,
    alpha: &[PlanePoint],
    beta: &[PlanePoint],
    gamma: &[PlanePoint],
    delta: &[PlanePoint],
    expect: i64,
) -> Result<i64> {
    if expect != 1 && expect != -1 {
        return Err(Error::InvalidInput(format!("expected index must be -1 or +1, got {expect}")));
    }
    for (name, poly) in [("alpha", alpha), ("beta", beta), ("gamma", gamma), ("delta", delta)] {
        validate_polyline(name, poly)?;
    }
    if !crossings(alpha, beta).is_empty() {
        return Err(Error::NotAQuadrilateral("alpha and beta intersect".into()));
    }
    if !crossings(gamma, delta).is_empty() {
        return Err(Error::NotAQuadrilateral("gamma and delta intersect".into()));
    }
    let single = |a: &[PlanePoint], b: &[PlanePoint], label: &str| -> Result<(f64, f64, PlanePoint)> {
        let c = crossings(a, b);
        if c.len() != 1 {
            return Err(Error::NotAQuadrilateral(format!("{label} cross {} times", c.len())));
        }
        Ok(c[0])
    };
    let (a_g, g_a, p_ga) = single(alpha, gamma, "alpha and gamma")?;
    let (a_d, d_a, p_da) = single(alpha, delta, "alpha and delta")?;
    let (b_g, g_b, p_gb) = single(beta, gamma, "beta and gamma")?;
    let (b_d, d_b, _) = single(beta, delta, "beta and delta")?;

    let arcs = [
        ("alpha", densify(&sub_arc(alpha, a_g, a_d), SIDE_SAMPLES)),
        ("delta", densify(&sub_arc(delta, d_a, d_b), SIDE_SAMPLES)),
        ("beta", densify(&sub_arc(beta, b_d, b_g), SIDE_SAMPLES)),
        ("gamma", densify(&sub_arc(gamma, g_b, g_a), SIDE_SAMPLES)),
    ];
    let (alpha_x, beta_x, gamma_x, delta_x) = (extended(alpha), extended(beta), extended(gamma), extended(delta));
    let crossed = expect == 1;
    for (name, arc) in &arcs {
        for &p in arc {
            let q = map.apply(p)?;
            let ok = match (*name, crossed) {
                ("alpha", _) => same_side(&alpha_x, q, p_gb),
                ("beta", _) => same_side(&beta_x, q, p_ga),
                ("delta", false) => !same_side(&delta_x, q, p_ga),
                ("gamma", false) => !same_side(&gamma_x, q, p_da),
                ("delta", true) => !same_side(&gamma_x, q, p_da),
                _ => !same_side(&delta_x, q, p_ga),
            };
            if !ok {
                return Err(Error::ConfigurationViolation {
                    arc: name.to_string(),
                    point: p,
                    image: q,
                });
            }
        }
    }
    let mut samples: Vec<PlanePoint> = Vec::new();
    for (_, arc) in &arcs {
        samples.extend_from_slice(&arc[..arc.len() - 1]);
    }
    samples.dedup_by(|a, b| a.dist(*b) < 1e-15);
    let frame = positively_oriented(ClosedCurve::from_points(samples)?)
        .map_err(|e| Error::NotAQuadrilateral(e.to_string()))?;
    let got = lefschetz_index(map, &frame, DEFAULT_MIN_DISP)?;
    if got != expect {
        return Err(Error::IndexMismatch { expected: expect, got });
    }
    Ok(got)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpDirection {
    /// Image of the arc pushed from the interior to the exterior.
    Out,
    /// Image of the arc pulled from the exterior to the interior.
    In,
}

/// Homotopy `f_tau` on a positively oriented simple curve: outside the
/// doubled arc `s'` the map is the constant `p` inside the curve; on the arc
/// `s` it is the point `p + 2 tau (m - p)` (`Out`) or `p + 2 (1 - tau) (m - p)`
/// (`In`), `m` the arc midpoint; on `s' \ s` it ramps linearly between them.
#[derive(Debug, Clone)]
pub struct JumpFamily {
    curve: ClosedCurve,
    arc_start: f64,
    arc_width: f64,
    center: PlanePoint,
    midpoint: PlanePoint,
    direction: JumpDirection,
}

impl JumpFamily {
    pub fn new(curve: &ClosedCurve, arc: (f64, f64), direction: JumpDirection) -> Result<Self> {
        let fail = |m: &str| Error::HomotopyConstructionFailure(m.to_string());
        let width = (arc.1 - arc.0).rem_euclid(1.0);
        if !(width > 0.0 && width <= 1.0 / 3.0) {
            return Err(fail("arc width must lie in (0, 1/3] of the curve parameter"));
        }
        if !is_positively_oriented(curve)? {
            return Err(Error::InvalidCurve("index jump needs a positively oriented curve".into()));
        }
        let start = arc.0.rem_euclid(1.0);
        let inside = curve
            .params()
            .iter()
            .filter(|&&t| (t - start).rem_euclid(1.0) < width)
            .count();
        if inside < 3 {
            return Err(fail("the arc holds fewer than three curve samples"));
        }
        let n = curve.len() as f64;
        let mean = curve.samples().iter().fold(PlanePoint::ORIGIN, |acc, &p| acc + p) * (1.0 / n);
        let center = if curve.contains_even_odd(mean) && curve.distance_to(mean) > 1e-9 {
            mean
        } else {
            curve.interior_point()?
        };
        let midpoint = curve.point_at(start + 0.5 * width);
        let target = center + (midpoint - center) * 2.0;
        let hits = curve
            .segments()
            .filter(|(a, b)| segment_intersection(center, target, *a, *b).is_some())
            .count();
        if hits != 1 {
            return Err(fail("the push ray from the center crosses the curve more than once"));
        }
        Ok(JumpFamily {
            curve: curve.clone(),
            arc_start: start,
            arc_width: width,
            center,
            midpoint,
            direction,
        })
    }

    fn arc_image(&self, tau: f64) -> PlanePoint {
        let s = match self.direction {
            JumpDirection::Out => 2.0 * tau,
            JumpDirection::In => 2.0 * (1.0 - tau),
        };
        self.center + (self.midpoint - self.center) * s
    }

    /// `f_tau` at curve parameter `t`.
    pub fn eval(&self, tau: f64, t: f64) -> PlanePoint {
        let w = self.arc_width;
        // Offset from the start of s', which has width 2w.
        let u = (t - self.arc_start + 0.5 * w).rem_euclid(1.0);
        let weight = if u >= 2.0 * w {
            0.0
        } else if u < 0.5 * w {
            u / (0.5 * w)
        } else if u <= 1.5 * w {
            1.0
        } else {
            (2.0 * w - u) / (0.5 * w)
        };
        self.center + (self.arc_image(tau) - self.center) * weight
    }

    pub fn index_at(&self, tau: f64) -> Result<i64> {
        index_along(&self.curve, |t, _| Ok(self.eval(tau, t)), DEFAULT_MIN_DISP, DEFAULT_REFINEMENT_BUDGET)
    }
}

/// Indices at the two ends of the jump homotopy, checked to differ by one in
/// the direction of the push.
pub fn index_jump_experiment(curve: &ClosedCurve, arc: (f64, f64), direction: JumpDirection) -> Result<(i64, i64)> {
    let family = JumpFamily::new(curve, arc, direction)?;
    let steps = 20;
    let mut before = Vec::new();
    let mut after = Vec::new();
    for k in 0..=steps {
        let tau = k as f64 / steps as f64;
        if k * 2 == steps {
            continue;
        }
        let index = family.index_at(tau).map_err(|e| match e {
            Error::FixedPointOnCurve { point, .. } => {
                Error::HomotopyConstructionFailure(format!("fixed point at {point} for time {tau}"))
            }
            other => other,
        })?;
        if k * 2 < steps {
            before.push(index);
        } else {
            after.push(index);
        }
    }
    if before.windows(2).any(|w| w[0] != w[1]) || after.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::HomotopyConstructionFailure(
            "index changed away from the crossing time".into(),
        ));
    }
    let (i0, i1) = (before[0], *after.last().unwrap());
    let expected = match direction {
        JumpDirection::Out => 1,
        JumpDirection::In => -1,
    };
    if i0 - i1 != expected {
        return Err(Error::IndexMismatch {
            expected,
            got: i0 - i1,
        });
    }
    Ok((i0, i1))
}

/// Indices of `h(t, .)` on `curve` at `steps` equally spaced times in
/// `[0, 1]`.
pub fn homotopy_indices<H>(curve: &ClosedCurve, steps: usize, h: H, min_disp: f64) -> Result<Vec<i64>>
where
    H: Fn(f64, PlanePoint) -> Result<PlanePoint> + Sync,
{
    let steps = steps.max(2);
    (0..steps)
        .map(|k| {
            let t = k as f64 / (steps - 1) as f64;
            lefschetz_index(&Fallible(|p: PlanePoint| h(t, p)), curve, min_disp)
        })
        .collect()
}

/// `(x, (1 - t) y)` composed with `map`: flattens the image onto `y = 0`.
pub fn squash<M: PlaneMap + ?Sized>(map: &M, t: f64, p: PlanePoint) -> Result<PlanePoint> {
    let q = map.apply(p)?;
    Ok(PlanePoint::new(q.x, (1.0 - t) * q.y))
}

/// Outcome of one entry of [`lemma_suite`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaOutcome {
    pub name: &'static str,
    pub claim: &'static str,
    pub observed: String,
    pub passed: bool,
}

fn outcome(name: &'static str, claim: &'static str, result: Result<(String, bool)>) -> LemmaOutcome {
    match result {
        Ok((observed, passed)) => LemmaOutcome {
            name,
            claim,
            observed,
            passed,
        },
        Err(e) => LemmaOutcome {
            name,
            claim,
            observed: format!("error: {e}"),
            passed: false,
        },
    }
}

fn line(a: (f64, f64), b: (f64, f64)) -> Vec<PlanePoint> {
    vec![PlanePoint::new(a.0, a.1), PlanePoint::new(b.0, b.1)]
}

/// Runs the six index rules on their reference configurations.
pub fn lemma_suite() -> Vec<LemmaOutcome> {
    let square = Rect::new(-1.0, 1.0, -1.0, 1.0).expect("unit square");
    let saddle = |p: PlanePoint| PlanePoint::new(2.0 * p.x, 0.5 * p.y);
    let crossed = |p: PlanePoint| PlanePoint::new(-2.0 * p.x, 0.5 * p.y);
    let alpha = line((-3.0, 1.0), (3.0, 1.0));
    let beta = line((-3.0, -1.0), (3.0, -1.0));
    let gamma = line((-1.0, -3.0), (-1.0, 3.0));
    let delta = line((1.0, -3.0), (1.0, 3.0));
    let show = |i: i64| format!("I = {i:+}");

    let mut out = Vec::new();
    out.push(outcome(
        "saddle rectangle",
        "I = -1",
        saddle_rectangle_index(&saddle, &square, SaddleVariant::Standard).map(|i| (show(i), i == -1)),
    ));
    out.push(outcome(
        "crossed saddle rectangle",
        "I = +1",
        saddle_rectangle_index(&crossed, &square, SaddleVariant::Crossed).map(|i| (show(i), i == 1)),
    ));
    out.push(outcome(
        "quadrilateral frame",
        "I = -1",
        quad_configuration_index(&saddle, &alpha, &beta, &gamma, &delta, -1).map(|i| (show(i), i == -1)),
    ));
    out.push(outcome(
        "crossed quadrilateral frame",
        "I = +1",
        quad_configuration_index(&crossed, &alpha, &beta, &gamma, &delta, 1).map(|i| (show(i), i == 1)),
    ));
    out.push(outcome(
        "index jump",
        "out: I0 - I1 = +1, in: I0 - I1 = -1",
        ClosedCurve::circle(PlanePoint::ORIGIN, 1.0, 256).and_then(|c| {
            let mut pairs = Vec::new();
            for width in [0.125, 0.25] {
                pairs.push(index_jump_experiment(&c, (0.0, width), JumpDirection::Out)?);
                pairs.push(index_jump_experiment(&c, (0.0, width), JumpDirection::In)?);
            }
            let ok = pairs.iter().step_by(2).all(|&p| p == (1, 0)) && pairs.iter().skip(1).step_by(2).all(|&p| p == (0, 1));
            Ok((format!("out {:?}, in {:?}", pairs[0], pairs[1]), ok))
        }),
    ));
    out.push(outcome(
        "homotopy invariance",
        "index constant over 20 homotopy times",
        homotopy_indices(&square.boundary(SIDE_SAMPLES), 20, |t, p| squash(&saddle, t, p), DEFAULT_MIN_DISP)
            .map(|v| {
                let constant = v.windows(2).all(|w| w[0] == w[1]);
                (format!("{} steps, I = {:+}", v.len(), v[0]), constant && v.len() == 20)
            }),
    ));
    out
}
