//! Certified fixed points of lifts by boundary-degree subdivision.
//!
//! A box is discarded when a Lipschitz bound on `F - id` and a 3 x 3 sample
//! of displacements prove it fixed point free. Every other box is split
//! until it reaches the target resolution; a leaf whose boundary degree is
//! nonzero contains a fixed point. Leaves with degree zero are reported as
//! unresolved, so the union of certified and unresolved leaves covers every
//! fixed point in the region.

use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::curves::{PlanePoint, Rect};
use crate::error::{Error, Result};
use crate::index::lefschetz_index;
use crate::maps::LiftMap;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Split positions tried in order, as fractions of the box side.
const SPLITS: [(f64, f64); 4] = [
    (0.504_142_135_623_731, 0.496_794_919_243_112),
    (0.487_639_320_225_002, 0.513_562_373_095_049),
    (0.521_320_343_559_643, 0.478_867_513_459_481),
    (0.467_944_947_177_034, 0.532_455_532_033_676),
];

/// Leaves stop this far below the resolution so jittered leaves still fit.
const LEAF_SHRINK: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsolationConfig {
    /// Largest side of an emitted box.
    pub resolution: f64,
    /// Displacement below which a box boundary counts as hitting a fixed point.
    pub min_disp: f64,
    /// Cap on the number of boxes examined.
    pub max_boxes: usize,
    /// Dilation retries when the region boundary holds a fixed point.
    pub jitter_retries: usize,
    /// Dilation step for those retries.
    pub jitter: f64,
    /// Multiplier on sampled difference quotients for maps without a
    /// declared Lipschitz bound.
    pub lipschitz_safety: f64,
    /// Keep the discarded boxes in the result.
    pub record_excluded: bool,
}

impl Default for IsolationConfig {
    fn default() -> Self {
        IsolationConfig {
            resolution: 1e-3,
            min_disp: 1e-9,
            max_boxes: 4_000_000,
            jitter_retries: 3,
            jitter: SQRT_2 * 1e-4,
            lipschitz_safety: 2.0,
            record_excluded: false,
        }
    }
}

impl IsolationConfig {
    pub fn with_resolution(resolution: f64) -> Self {
        IsolationConfig {
            resolution,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return Err(Error::InvalidInput(format!("resolution {} must be positive", self.resolution)));
        }
        if !(self.min_disp > 0.0) || !(self.jitter > 0.0) || !(self.lipschitz_safety >= 1.0) {
            return Err(Error::InvalidInput("min_disp, jitter must be positive and lipschitz_safety >= 1".into()));
        }
        Ok(())
    }
}

/// A box whose boundary degree certifies a fixed point of `F + (k, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedFixedBox {
    #[serde(rename = "box")]
    pub rect: Rect,
    pub boundary_degree: i64,
    pub lift_offset: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Isolation {
    /// Region actually searched, after any jitter.
    pub region: Rect,
    /// Index of the lift on the region boundary.
    pub region_degree: i64,
    pub certified: Vec<CertifiedFixedBox>,
    /// Leaves that could be neither excluded nor certified.
    pub unresolved: Vec<Rect>,
    pub excluded: Vec<Rect>,
    pub boxes_examined: usize,
    /// True when exclusion relied on sampled rather than declared Lipschitz bounds.
    pub estimated_lipschitz: bool,
}

enum Node {
    Excluded(Rect),
    Certified(Rect, i64),
    Unresolved(Rect),
}

struct Search<'a> {
    map: &'a LiftMap,
    config: &'a IsolationConfig,
    leaf_size: f64,
    examined: AtomicUsize,
    estimated: std::sync::atomic::AtomicBool,
}

fn split(rect: &Rect, ratio: (f64, f64)) -> [Rect; 4] {
    let xm = rect.x_lo + ratio.0 * rect.width();
    let ym = rect.y_lo + ratio.1 * rect.height();
    [
        Rect { x_hi: xm, y_hi: ym, ..*rect },
        Rect { x_lo: xm, y_hi: ym, ..*rect },
        Rect { x_hi: xm, y_lo: ym, ..*rect },
        Rect { x_lo: xm, y_lo: ym, ..*rect },
    ]
}

/// Boundary degree of `F - id` on `rect`.
pub fn boundary_degree(map: &LiftMap, rect: &Rect, min_disp: f64) -> Result<i64> {
    lefschetz_index(map, &rect.boundary(2), min_disp)
}

impl Search<'_> {
    fn lipschitz(&self, rect: &Rect, samples: &[(PlanePoint, PlanePoint)]) -> f64 {
        if let Some(l) = self.map.lipschitz_on(rect.lo(), rect.hi()) {
            return l;
        }
        self.estimated.store(true, Ordering::Relaxed);
        let mut best: f64 = 0.0;
        for (i, a) in samples.iter().enumerate() {
            for b in &samples[i + 1..] {
                best = best.max(a.1.dist(b.1) / a.0.dist(b.0));
            }
        }
        best * self.config.lipschitz_safety
    }

    fn excluded(&self, rect: &Rect) -> Result<bool> {
        let mut samples = [(PlanePoint::ORIGIN, PlanePoint::ORIGIN); 9];
        for (idx, slot) in samples.iter_mut().enumerate() {
            let p = PlanePoint::new(
                rect.x_lo + 0.5 * (idx % 3) as f64 * rect.width(),
                rect.y_lo + 0.5 * (idx / 3) as f64 * rect.height(),
            );
            *slot = (p, self.map.eval(p)?);
        }
        let lip = self.lipschitz(rect, &samples) + 1.0;
        let reach = 0.25 * rect.width().hypot(rect.height());
        let min_disp = samples.iter().map(|(p, q)| q.dist(*p)).fold(f64::INFINITY, f64::min);
        Ok(min_disp > lip * reach)
    }

    fn leaf(&self, rect: Rect) -> Node {
        let step = SQRT_2 * 0.005 * self.config.resolution;
        for attempt in 0..=self.config.jitter_retries {
            let r = rect.dilated(step * attempt as f64);
            match boundary_degree(self.map, &r, self.config.min_disp) {
                Ok(0) => return Node::Unresolved(r),
                Ok(deg) => return Node::Certified(r, deg),
                Err(_) => continue,
            }
        }
        Node::Unresolved(rect)
    }

    fn visit(&self, rect: Rect) -> Result<Vec<Node>> {
        let seen = self.examined.fetch_add(1, Ordering::Relaxed) + 1;
        if seen > self.config.max_boxes {
            return Err(Error::BudgetExceeded {
                cap: self.config.max_boxes,
            });
        }
        if self.excluded(&rect)? {
            return Ok(vec![Node::Excluded(rect)]);
        }
        if rect.width().max(rect.height()) <= self.leaf_size {
            return Ok(vec![self.leaf(rect)]);
        }
        let [a, b, c, d] = split(&rect, SPLITS[0]);
        let ((ra, rb), (rc, rd)) = rayon::join(
            || rayon::join(|| self.visit(a), || self.visit(b)),
            || rayon::join(|| self.visit(c), || self.visit(d)),
        );
        let mut out = ra?;
        out.extend(rb?);
        out.extend(rc?);
        out.extend(rd?);
        Ok(out)
    }
}

fn sort_rects(v: &mut [Rect]) {
    v.sort_by(|a, b| {
        a.x_lo
            .total_cmp(&b.x_lo)
            .then(a.y_lo.total_cmp(&b.y_lo))
            .then(a.x_hi.total_cmp(&b.x_hi))
            .then(a.y_hi.total_cmp(&b.y_hi))
    });
}

/// Region degree check, dilating the region on boundary fixed points.
fn settle_region(map: &LiftMap, region: Rect, config: &IsolationConfig) -> Result<(Rect, i64)> {
    for attempt in 0..=config.jitter_retries {
        let r = region.dilated(config.jitter * attempt as f64);
        let curve = r.boundary(64);
        match lefschetz_index(map, &curve, config.min_disp) {
            Ok(deg) => return Ok((r, deg)),
            Err(Error::FixedPointOnCurve { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::BoundaryFixedPoint {
        retries: config.jitter_retries,
    })
}

/// Full isolation of the fixed points of `F + (k, 0)` in `region`.
pub fn isolate(base: &LiftMap, k: i64, region: Rect, config: &IsolationConfig) -> Result<Isolation> {
    config.validate()?;
    let map = base.deck_translate(k);
    let (region, region_degree) = settle_region(&map, region, config)?;
    let search = Search {
        map: &map,
        config,
        leaf_size: config.resolution / LEAF_SHRINK,
        examined: AtomicUsize::new(0),
        estimated: std::sync::atomic::AtomicBool::new(false),
    };
    let nodes = search.visit(region)?;
    let mut certified = Vec::new();
    let mut unresolved = Vec::new();
    let mut excluded = Vec::new();
    for node in nodes {
        match node {
            Node::Certified(rect, deg) => certified.push(CertifiedFixedBox {
                rect,
                boundary_degree: deg,
                lift_offset: k,
            }),
            Node::Unresolved(rect) => unresolved.push(rect),
            Node::Excluded(rect) if config.record_excluded => excluded.push(rect),
            Node::Excluded(_) => {}
        }
    }
    certified.sort_by(|a, b| {
        a.rect
            .x_lo
            .total_cmp(&b.rect.x_lo)
            .then(a.rect.y_lo.total_cmp(&b.rect.y_lo))
    });
    sort_rects(&mut unresolved);
    sort_rects(&mut excluded);
    Ok(Isolation {
        region,
        region_degree,
        certified,
        unresolved,
        excluded,
        boxes_examined: search.examined.load(Ordering::Relaxed),
        estimated_lipschitz: search.estimated.load(Ordering::Relaxed),
    })
}

/// Certified boxes of the lift `map` in `region` at the given resolution.
pub fn isolate_fixed_points(map: &LiftMap, region: Rect, resolution: f64) -> Result<Vec<CertifiedFixedBox>> {
    Ok(isolate(map, 0, region, &IsolationConfig::with_resolution(resolution))?.certified)
}

/// Shrinks a certified box to side at most `target`, following a child with
/// nonzero boundary degree. The result lies inside the input box.
pub fn refine_box(base: &LiftMap, fixed: &CertifiedFixedBox, target: f64, min_disp: f64) -> Result<CertifiedFixedBox> {
    let map = base.deck_translate(fixed.lift_offset);
    let mut current = *fixed;
    let mut guard = 0;
    while current.rect.width().max(current.rect.height()) > target {
        guard += 1;
        if guard > 200 {
            return Err(Error::InvalidInput("box refinement did not converge".into()));
        }
        let mut next = None;
        'ratios: for ratio in SPLITS {
            for child in split(&current.rect, ratio) {
                match boundary_degree(&map, &child, min_disp) {
                    Ok(0) => {}
                    Ok(deg) => {
                        next = Some(CertifiedFixedBox {
                            rect: child,
                            boundary_degree: deg,
                            lift_offset: fixed.lift_offset,
                        });
                        break 'ratios;
                    }
                    Err(Error::FixedPointOnCurve { .. }) => continue 'ratios,
                    Err(e) => return Err(e),
                }
            }
        }
        match next {
            Some(b) => current = b,
            // Every split either hit the fixed point or spread the degree
            // over several children with zero sum; stop at this size.
            None => break,
        }
    }
    Ok(current)
}

/// Groups boxes whose centers lie within `radius` of each other (single
/// linkage). Returns groups of indices in input order.
pub fn cluster_boxes(boxes: &[Rect], radius: f64) -> Vec<Vec<usize>> {
    let n = boxes.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut j = i;
        while p[j] != r {
            let next = p[j];
            p[j] = r;
            j = next;
        }
        r
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| boxes[a].center().x.total_cmp(&boxes[b].center().x));
    for (pos, &i) in order.iter().enumerate() {
        let ci = boxes[i].center();
        for &j in &order[pos + 1..] {
            let cj = boxes[j].center();
            if cj.x - ci.x > radius {
                break;
            }
            if ci.dist(cj) <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Diameter of the union of a group of boxes.
pub fn extent(boxes: &[Rect], group: &[usize]) -> f64 {
    let mut lo = PlanePoint::new(f64::INFINITY, f64::INFINITY);
    let mut hi = PlanePoint::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &i in group {
        let b = boxes[i];
        lo = PlanePoint::new(lo.x.min(b.x_lo), lo.y.min(b.y_lo));
        hi = PlanePoint::new(hi.x.max(b.x_hi), hi.y.max(b.y_hi));
    }
    hi.dist(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::zoo;
    use serde_json::json;

    fn power(d: i64) -> LiftMap {
        zoo("power", &json!({ "d": d })).unwrap()
    }

    fn square(h: f64) -> Rect {
        Rect::new(-h, h, -h, h).unwrap()
    }

    #[test]
    fn power_two_base_lift() {
        let boxes = isolate_fixed_points(&power(2), square(2.0), 1e-3).unwrap();
        assert_eq!(boxes.len(), 1, "{boxes:?}");
        let b = boxes[0];
        assert!(b.rect.contains(PlanePoint::ORIGIN));
        assert!(b.rect.width() <= 1e-3 && b.rect.height() <= 1e-3);
        assert_eq!(b.boundary_degree, 1);
    }

    #[test]
    fn translated_lift_moves_the_fixed_point() {
        let iso = isolate(&power(2), 1, square(2.0), &IsolationConfig::default()).unwrap();
        assert_eq!(iso.certified.len(), 1);
        assert!(iso.certified[0].rect.contains(PlanePoint::new(-1.0, 0.0)));
        assert_eq!(iso.certified[0].lift_offset, 1);
        assert_eq!(iso.region_degree, 1);
    }

    #[test]
    fn translation_has_no_fixed_points() {
        let f = zoo("translation", &json!({})).unwrap();
        let iso = isolate(&f, 0, square(3.0), &IsolationConfig::default()).unwrap();
        assert!(iso.certified.is_empty() && iso.unresolved.is_empty());
    }

    #[test]
    fn saddle_fixed_point_has_degree_minus_one() {
        let f = zoo("ends_repelling", &json!({ "d": 2, "lambda": 1.0 })).unwrap();
        let boxes = isolate_fixed_points(&f, square(1.5), 1e-3).unwrap();
        assert_eq!(boxes.len(), 1);
        assert_eq!(boxes[0].boundary_degree, -1);
    }

    #[test]
    fn region_boundary_fixed_point_is_jittered_or_reported() {
        let f = power(2);
        let r = Rect::new(0.0, 1.0, -0.5, 0.5).unwrap();
        let iso = isolate(&f, 0, r, &IsolationConfig::default()).unwrap();
        assert!(iso.region.x_lo < 0.0);
        assert_eq!(iso.certified.len(), 1);
        let swap2 = zoo("end_swap", &json!({ "d": -2 })).unwrap().iterate(2).unwrap();
        let err = isolate(&swap2, 0, square(1.0), &IsolationConfig::default()).unwrap_err();
        assert_eq!(err, Error::BoundaryFixedPoint { retries: 3 });
    }

    #[test]
    fn budget_is_enforced() {
        let config = IsolationConfig {
            max_boxes: 10,
            ..IsolationConfig::with_resolution(1e-6)
        };
        assert_eq!(
            isolate(&power(2), 0, square(2.0), &config).unwrap_err(),
            Error::BudgetExceeded { cap: 10 }
        );
    }

    #[test]
    fn refine_stays_inside() {
        let f = power(3);
        let b = isolate_fixed_points(&f.deck_translate(1), square(2.0), 1e-2).unwrap()[0];
        let b = CertifiedFixedBox { lift_offset: 1, ..b };
        let fine = refine_box(&f, &b, 1e-9, 1e-14).unwrap();
        assert!(fine.rect.width() <= 1e-9);
        assert!(b.rect.contains(fine.rect.lo()) && b.rect.contains(fine.rect.hi()));
        assert!(fine.rect.center().dist(PlanePoint::new(-0.5, 0.0)) < 1e-9);
    }

    #[test]
    fn clusters_merge_neighbours() {
        let r = |x: f64| Rect::new(x, x + 0.1, 0.0, 0.1).unwrap();
        let groups = cluster_boxes(&[r(0.0), r(5.0), r(0.15), r(0.3)], 0.2);
        assert_eq!(groups, vec![vec![0, 2, 3], vec![1]]);
    }
}
