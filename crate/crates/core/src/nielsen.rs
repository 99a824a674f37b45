//! Nielsen classes of periodic points and completeness sweeps.
//!
//! Fix a base lift `F0` of degree `d`. A point `p` of period dividing `n`
//! lifts to `p'` with `F0^n(p') = p' + (m, 0)`; moving `p'` by a deck
//! translation changes `m` by a multiple of `d^n - 1`, so `m mod |d^n - 1|`
//! labels the Nielsen class. The lift `F0^n + (k, 0)` fixes exactly the
//! points of residue `-k`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::{PlanePoint, Rect};
use crate::error::{Error, Result};
use crate::fixed_points::{cluster_boxes, extent, isolate, refine_box, CertifiedFixedBox, IsolationConfig};
use crate::maps::{project, AnnulusPoint, LiftMap};

/// Largest annulus distance between `p` and its image accepted as periodic.
pub const PERIODIC_TOLERANCE: f64 = 1e-7;
/// Largest distance of the translation `m` from an integer.
pub const INTEGER_TOLERANCE: f64 = 1e-5;

/// `|d^n - 1|`.
pub fn modulus(degree: i64, n: u32) -> Result<u64> {
    let p = (degree as i128)
        .checked_pow(n)
        .ok_or_else(|| Error::InvalidInput(format!("{degree}^{n} overflows")))?;
    let m = (p - 1).unsigned_abs();
    if m == 0 {
        return Err(Error::DegenerateModulus { degree });
    }
    u64::try_from(m).map_err(|_| Error::InvalidInput(format!("|{degree}^{n} - 1| overflows")))
}

/// Residue class `m mod |d^n - 1|` of a periodic annulus point.
pub fn nielsen_residue(f0: &LiftMap, point: AnnulusPoint, n: u32) -> Result<u64> {
    nielsen_residue_with(f0, point, n, PERIODIC_TOLERANCE, INTEGER_TOLERANCE)
}

pub fn nielsen_residue_with(
    f0: &LiftMap,
    point: AnnulusPoint,
    n: u32,
    periodic_tolerance: f64,
    integer_tolerance: f64,
) -> Result<u64> {
    nielsen_residue_at_lift(f0, point.lift(), n, periodic_tolerance, integer_tolerance)
}

/// Residue computed from an arbitrary lift `lifted` of the periodic point.
pub fn nielsen_residue_at_lift(
    f0: &LiftMap,
    lifted: PlanePoint,
    n: u32,
    periodic_tolerance: f64,
    integer_tolerance: f64,
) -> Result<u64> {
    let m_mod = modulus(f0.degree(), n)?;
    let image = f0.iterate(n)?.eval(lifted)?;
    let defect = project(image).distance(&project(lifted));
    if !(defect <= periodic_tolerance) {
        return Err(Error::NotPeriodic {
            defect,
            tolerance: periodic_tolerance,
        });
    }
    let shift = image.x - lifted.x;
    let m = shift.round();
    if !((shift - m).abs() <= integer_tolerance) {
        return Err(Error::NonIntegerTranslation {
            value: shift,
            tolerance: integer_tolerance,
        });
    }
    Ok((m as i128).rem_euclid(m_mod as i128) as u64)
}

/// Residue of the points fixed by `F0^n + (k, 0)`.
pub fn residue_of_lift(k: i64, modulus: u64) -> u64 {
    (-(k as i128)).rem_euclid(modulus as i128) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub isolation: IsolationConfig,
    pub periodic_tolerance: f64,
    pub integer_tolerance: f64,
    /// Unresolved clusters longer than this many resolutions count as a
    /// continuum of fixed points.
    pub continuum_extent: f64,
    /// Target displacement bound at the refined point used for residues.
    pub residue_precision: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            isolation: IsolationConfig::default(),
            periodic_tolerance: PERIODIC_TOLERANCE,
            integer_tolerance: INTEGER_TOLERANCE,
            continuum_extent: 20.0,
            residue_precision: 1e-8,
        }
    }
}

impl SweepConfig {
    pub fn with_resolution(resolution: f64) -> Self {
        SweepConfig {
            isolation: IsolationConfig::with_resolution(resolution),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Complete,
    Incomplete,
    SingleClassContinuum,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Complete => "COMPLETE",
            Verdict::Incomplete => "INCOMPLETE",
            Verdict::SingleClassContinuum => "SINGLE_CLASS_CONTINUUM",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedBox {
    #[serde(flatten)]
    pub fixed: CertifiedFixedBox,
    pub residue: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepError {
    pub lift_offset: i64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NielsenReport {
    pub map: String,
    pub degree: i64,
    pub period: u32,
    pub modulus: u64,
    pub realized_residues: Vec<u64>,
    pub fixed_boxes: Vec<ClassifiedBox>,
    pub complete: bool,
    pub count_lower_bound: usize,
    pub verdict: Verdict,
    /// No known mechanism forces completeness for this degree and period.
    pub exploratory: bool,
    pub continuum_residues: Vec<u64>,
    pub unresolved_boxes: usize,
    pub errors: Vec<SweepError>,
}

/// Default search region: `|x| <= n_max |d| + 2`, `|y| <= 2`.
pub fn default_region(degree: i64, n_max: u32) -> Rect {
    let w = n_max as f64 * degree.unsigned_abs() as f64 + 2.0;
    Rect {
        x_lo: -w,
        x_hi: w,
        y_lo: -2.0,
        y_hi: 2.0,
    }
}

struct LiftOutcome {
    k: i64,
    boxes: Vec<ClassifiedBox>,
    clusters: usize,
    unresolved: usize,
    continuum: bool,
    errors: Vec<SweepError>,
}

fn sweep_lift(f0: &LiftMap, fn_map: &LiftMap, n: u32, k: i64, m_mod: u64, tiles: &[Rect], config: &SweepConfig) -> LiftOutcome {
    let mut out = LiftOutcome {
        k,
        boxes: Vec::new(),
        clusters: 0,
        unresolved: 0,
        continuum: false,
        errors: Vec::new(),
    };
    let expected = residue_of_lift(k, m_mod);
    let resolution = config.isolation.resolution;
    let mut certified: Vec<CertifiedFixedBox> = Vec::new();
    let mut leaves: Vec<Rect> = Vec::new();
    for tile in tiles {
        match isolate(fn_map, k, *tile, &config.isolation) {
            Ok(iso) => {
                out.unresolved += iso.unresolved.len();
                leaves.extend(iso.unresolved.iter().copied());
                leaves.extend(iso.certified.iter().map(|b| b.rect));
                certified.extend(iso.certified);
            }
            Err(Error::BoundaryFixedPoint { retries }) => {
                out.continuum = true;
                out.errors.push(SweepError {
                    lift_offset: k,
                    message: format!("fixed points on the boundary of {tile} after {retries} retries"),
                });
            }
            Err(e) => out.errors.push(SweepError {
                lift_offset: k,
                message: e.to_string(),
            }),
        }
    }
    let groups = cluster_boxes(&leaves, 2.0 * resolution);
    if groups
        .iter()
        .any(|g| extent(&leaves, g) > config.continuum_extent * resolution)
    {
        out.continuum = true;
    }
    let rects: Vec<Rect> = certified.iter().map(|b| b.rect).collect();
    out.clusters = cluster_boxes(&rects, 2.0 * resolution).len();
    for b in certified {
        let lip = fn_map.lipschitz_on(b.rect.lo(), b.rect.hi()).unwrap_or(1e3);
        let target = (config.residue_precision / (lip + 1.0)).max(1e-12);
        let residue = refine_box(fn_map, &b, target, 1e-14).and_then(|fine| {
            nielsen_residue_with(
                f0,
                project(fine.rect.center()),
                n,
                config.periodic_tolerance,
                config.integer_tolerance,
            )
        });
        let residue = match residue {
            Ok(r) if r == expected => r,
            Ok(r) => {
                out.errors.push(SweepError {
                    lift_offset: k,
                    message: format!("box {} has residue {r}, lift predicts {expected}", b.rect),
                });
                r
            }
            Err(e) => {
                out.errors.push(SweepError {
                    lift_offset: k,
                    message: format!("residue of box {} not computed ({e}); using the lift's class", b.rect),
                });
                expected
            }
        };
        out.boxes.push(ClassifiedBox { fixed: b, residue });
    }
    out
}

/// Nielsen report for period `n`, searching each tile for fixed points of
/// every lift `F0^n + (k, 0)` with `0 <= k < |d^n - 1|`.
pub fn nielsen_report_on(f0: &LiftMap, n: u32, tiles: &[Rect], config: &SweepConfig) -> Result<NielsenReport> {
    if n == 0 {
        return Err(Error::InvalidInput("period must be at least 1".into()));
    }
    let degree = f0.degree();
    let exploratory = degree < -1 && !f0.mechanism().is_some_and(|m| m.covers(degree, n));
    let m_mod = match modulus(degree, n) {
        Ok(m) => m,
        Err(e @ Error::DegenerateModulus { .. }) => {
            return Ok(NielsenReport {
                map: f0.name().to_string(),
                degree,
                period: n,
                modulus: 0,
                realized_residues: Vec::new(),
                fixed_boxes: Vec::new(),
                complete: false,
                count_lower_bound: 0,
                verdict: Verdict::Incomplete,
                exploratory,
                continuum_residues: Vec::new(),
                unresolved_boxes: 0,
                errors: vec![SweepError {
                    lift_offset: 0,
                    message: e.to_string(),
                }],
            })
        }
        Err(e) => return Err(e),
    };
    let k_max = i64::try_from(m_mod).map_err(|_| Error::InvalidInput("modulus too large".into()))?;
    let fn_map = f0.iterate(n)?;
    let outcomes: Vec<LiftOutcome> = (0..k_max)
        .into_par_iter()
        .map(|k| sweep_lift(f0, &fn_map, n, k, m_mod, tiles, config))
        .collect();

    let mut realized = BTreeSet::new();
    let mut continuum = BTreeSet::new();
    let mut fixed_boxes = Vec::new();
    let mut errors = Vec::new();
    let mut count = 0;
    let mut unresolved = 0;
    for o in outcomes {
        realized.extend(o.boxes.iter().map(|b| b.residue));
        if o.continuum {
            continuum.insert(residue_of_lift(o.k, m_mod));
        }
        count += o.clusters;
        unresolved += o.unresolved;
        fixed_boxes.extend(o.boxes);
        errors.extend(o.errors);
    }
    let complete = realized.len() as u64 == m_mod;
    let verdict = if !continuum.is_empty() {
        Verdict::SingleClassContinuum
    } else if complete {
        Verdict::Complete
    } else {
        Verdict::Incomplete
    };
    Ok(NielsenReport {
        map: f0.name().to_string(),
        degree,
        period: n,
        modulus: m_mod,
        realized_residues: realized.into_iter().collect(),
        fixed_boxes,
        complete,
        count_lower_bound: count,
        verdict,
        exploratory,
        continuum_residues: continuum.into_iter().collect(),
        unresolved_boxes: unresolved,
        errors,
    })
}

pub fn nielsen_report(f0: &LiftMap, n: u32, region: Rect, config: &SweepConfig) -> Result<NielsenReport> {
    nielsen_report_on(f0, n, &[region], config)
}

/// Reports for `n = 1..=n_max` over `region` (default region when `None`).
pub fn completeness_check(f0: &LiftMap, n_max: u32, region: Option<Rect>, resolution: f64) -> Result<Vec<NielsenReport>> {
    completeness_sweep(f0, n_max, region, &SweepConfig::with_resolution(resolution))
}

pub fn completeness_sweep(
    f0: &LiftMap,
    n_max: u32,
    region: Option<Rect>,
    config: &SweepConfig,
) -> Result<Vec<NielsenReport>> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    if f0.degree() == 1 {
        return Err(Error::DegenerateModulus { degree: 1 });
    }
    let region = region.unwrap_or_else(|| default_region(f0.degree(), n_max));
    (1..=n_max).map(|n| nielsen_report(f0, n, region, config)).collect()
}

/// `max_n ln(count_n) / n`, skipping periods with no certified point.
pub fn growth_rate(reports: &[NielsenReport]) -> Result<f64> {
    if reports.is_empty() {
        return Err(Error::EmptyReport);
    }
    Ok(reports
        .iter()
        .filter(|r| r.count_lower_bound > 0)
        .map(|r| (r.count_lower_bound as f64).ln() / r.period as f64)
        .fold(f64::NEG_INFINITY, f64::max))
}

pub const CSV_HEADER: &str = "n,k,x_lo,x_hi,y_lo,y_hi,degree,residue";

/// One CSV row per classified box.
pub fn reports_csv(reports: &[NielsenReport]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in reports {
        for b in &r.fixed_boxes {
            let x = b.fixed.rect;
            let _ = writeln!(
                s,
                "{},{},{:?},{:?},{:?},{:?},{},{}",
                r.period, b.fixed.lift_offset, x.x_lo, x.x_hi, x.y_lo, x.y_hi, b.fixed.boundary_degree, b.residue
            );
        }
    }
    s
}

/// Integers `k` for which `F + (k, 0)` could fix a point of some tile:
/// `k` ranges over `p.x - F(p).x` on a sample grid, widened by the
/// Lipschitz slack between samples and by one on each side.
pub fn candidate_offsets(map: &LiftMap, tiles: &[Rect], samples: usize) -> Result<Vec<i64>> {
    let samples = samples.max(2);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for tile in tiles {
        let lip = map.lipschitz_on(tile.lo(), tile.hi()).unwrap_or(1e3);
        let step = (tile.width().hypot(tile.height())) / (samples - 1) as f64;
        let slack = (lip + 1.0) * step;
        for i in 0..samples {
            for j in 0..samples {
                let p = PlanePoint::new(
                    tile.x_lo + tile.width() * i as f64 / (samples - 1) as f64,
                    tile.y_lo + tile.height() * j as f64 / (samples - 1) as f64,
                );
                let d = p.x - map.eval(p)?.x;
                lo = lo.min(d - slack);
                hi = hi.max(d + slack);
            }
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Ok(Vec::new());
    }
    Ok(((lo.floor() as i64 - 1)..=(hi.ceil() as i64 + 1)).collect())
}

/// Certified fixed boxes of every lift `F + (k, 0)` that could have a fixed
/// point in the tiles. An empty result certifies the tiles fixed-point free.
pub fn certified_on_tiles(map: &LiftMap, tiles: &[Rect], config: &IsolationConfig) -> Result<Vec<CertifiedFixedBox>> {
    let offsets = candidate_offsets(map, tiles, 9)?;
    let per: Vec<Result<Vec<CertifiedFixedBox>>> = offsets
        .par_iter()
        .map(|&k| {
            let mut found = Vec::new();
            for tile in tiles {
                found.extend(isolate(map, k, *tile, config)?.certified);
            }
            Ok(found)
        })
        .collect();
    let mut all = Vec::new();
    for r in per {
        all.extend(r?);
    }
    Ok(all)
}

/// Center of a classified box, for display.
pub fn box_center(b: &ClassifiedBox) -> PlanePoint {
    b.fixed.rect.center()
}
