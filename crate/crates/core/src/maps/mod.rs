//! Annulus maps represented by their lifts to the universal cover.
//!
//! Coordinates: the cover is the plane with covering projection
//! `(x, y) -> exp(2 pi i (x + i y))`, so `x` is the angular coordinate (one
//! turn per unit) and the annulus radius is `exp(-2 pi y)`. The end `y -> +inf`
//! is the puncture at the origin, `y -> -inf` is the end at infinity.

mod counterexample;
mod grid;
mod zoo;

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curves::PlanePoint;
use crate::error::{Error, Result};

pub use counterexample::{counterexample_deg_minus1, CounterexampleGeometry};
pub use grid::{GridHeader, GridLift, GridStorage};
pub use zoo::{zoo, zoo_entries, ZooEntry, ZooParam, PERTURBATION_LIMIT};

/// Default additive tolerance of the equivariance checks.
pub const EQUIVARIANCE_TOLERANCE: f64 = 1e-9;

/// A continuous map of the plane that may refuse some inputs.
pub trait PlaneMap: Sync {
    fn apply(&self, p: PlanePoint) -> Result<PlanePoint>;
}

impl<F> PlaneMap for F
where
    F: Fn(PlanePoint) -> PlanePoint + Sync,
{
    fn apply(&self, p: PlanePoint) -> Result<PlanePoint> {
        Ok(self(p))
    }
}

/// Adapts a fallible closure to [`PlaneMap`].
#[derive(Debug, Clone, Copy)]
pub struct Fallible<F>(pub F);

impl<F> PlaneMap for Fallible<F>
where
    F: Fn(PlanePoint) -> Result<PlanePoint> + Sync,
{
    fn apply(&self, p: PlanePoint) -> Result<PlanePoint> {
        (self.0)(p)
    }
}

/// Which known mechanism forces every lift of every iterate to have a fixed
/// point, if any. Runs on maps without one are exploratory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompletenessMechanism {
    /// Fixed points of every iterate are known in closed form.
    ClosedForm,
    /// Invariant essential circle with an expanding circle factor.
    InvariantCircle,
    /// Both ends attracting.
    AttractingEnds,
    /// Both ends repelling.
    RepellingEnds,
    /// Ends interchanged: odd iterates only.
    EndSwapOddIterates,
}

impl CompletenessMechanism {
    /// Whether the mechanism covers the `n`-th iterate of a degree `d` map.
    pub fn covers(self, degree: i64, n: u32) -> bool {
        match self {
            CompletenessMechanism::ClosedForm => true,
            CompletenessMechanism::InvariantCircle => degree > 1,
            CompletenessMechanism::AttractingEnds | CompletenessMechanism::RepellingEnds => degree.abs() > 1,
            CompletenessMechanism::EndSwapOddIterates => degree < -1 && n % 2 == 1,
        }
    }
}

type EvalFn = dyn Fn(PlanePoint) -> Result<PlanePoint> + Send + Sync;
pub(crate) type LocalLipschitzFn = dyn Fn(PlanePoint, PlanePoint) -> f64 + Send + Sync;

/// Lift `F` of an annulus map, with `F(x + 1, y) = F(x, y) + (d, 0)`.
#[derive(Clone)]
pub struct LiftMap {
    name: String,
    eval: Arc<EvalFn>,
    degree: i64,
    domain_strip: Option<(f64, f64)>,
    lipschitz: Option<f64>,
    local_lipschitz: Option<Arc<LocalLipschitzFn>>,
    mechanism: Option<CompletenessMechanism>,
}

impl fmt::Debug for LiftMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LiftMap")
            .field("name", &self.name)
            .field("degree", &self.degree)
            .field("domain_strip", &self.domain_strip)
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl LiftMap {
    /// Wraps `f` as a lift of degree `degree`, spot-checking equivariance on
    /// a 5 x 5 grid over `[0, 1] x [-1, 1]`.
    pub fn new<F>(name: impl Into<String>, degree: i64, f: F) -> Result<Self>
    where
        F: Fn(PlanePoint) -> PlanePoint + Send + Sync + 'static,
    {
        let map = Self::from_parts(name.into(), degree, Arc::new(move |p| Ok(f(p))));
        map.spot_check()?;
        Ok(map)
    }

    /// Like [`LiftMap::new`] with a restricted domain `y_lo <= y <= y_hi`.
    pub fn with_strip<F>(name: impl Into<String>, degree: i64, strip: (f64, f64), f: F) -> Result<Self>
    where
        F: Fn(PlanePoint) -> PlanePoint + Send + Sync + 'static,
    {
        if !(strip.0 < strip.1) {
            return Err(Error::InvalidInput(format!("empty domain strip {strip:?}")));
        }
        let mut map = Self::from_parts(name.into(), degree, Arc::new(move |p| Ok(f(p))));
        map.domain_strip = Some(strip);
        map.spot_check()?;
        Ok(map)
    }

    pub(crate) fn from_parts(name: String, degree: i64, eval: Arc<EvalFn>) -> Self {
        LiftMap {
            name,
            eval,
            degree,
            domain_strip: None,
            lipschitz: None,
            local_lipschitz: None,
            mechanism: None,
        }
    }

    fn spot_check(&self) -> Result<()> {
        let (y0, y1) = match self.domain_strip {
            Some((lo, hi)) => (lo.max(-1.0), hi.min(1.0)),
            None => (-1.0, 1.0),
        };
        let grid = SampleGrid {
            x_range: (0.0, 1.0),
            y_range: (y0, y1),
            nx: 5,
            ny: 5,
            tolerance: EQUIVARIANCE_TOLERANCE,
        };
        degree_check(self, &grid).map(|_| ())
    }

    /// Declared global Lipschitz bound of `F` (Euclidean norm), if known.
    pub fn with_lipschitz(mut self, bound: f64) -> Self {
        self.lipschitz = Some(bound);
        self
    }

    /// Lipschitz bound valid on any box `[lo, hi]`, invariant under integer
    /// translations in `x`.
    pub(crate) fn with_local_lipschitz(mut self, f: Arc<LocalLipschitzFn>) -> Self {
        self.local_lipschitz = Some(f);
        self
    }

    pub fn with_mechanism(mut self, mechanism: CompletenessMechanism) -> Self {
        self.mechanism = Some(mechanism);
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn domain_strip(&self) -> Option<(f64, f64)> {
        self.domain_strip
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    /// Best known Lipschitz bound of `F` on the box with corners `lo`, `hi`.
    pub fn lipschitz_on(&self, lo: PlanePoint, hi: PlanePoint) -> Option<f64> {
        match &self.local_lipschitz {
            Some(f) => Some(f(lo, hi)),
            None => self.lipschitz,
        }
    }

    pub fn mechanism(&self) -> Option<CompletenessMechanism> {
        self.mechanism
    }

    fn check_domain(&self, p: PlanePoint) -> Result<()> {
        if let Some((y_lo, y_hi)) = self.domain_strip {
            if !(p.y >= y_lo && p.y <= y_hi) {
                return Err(Error::DomainEscape { point: p, y_lo, y_hi });
            }
        }
        Ok(())
    }

    pub fn eval(&self, p: PlanePoint) -> Result<PlanePoint> {
        self.check_domain(p)?;
        (self.eval)(p)
    }

    /// The lift `F + (k, 0)`. Same annulus map, same degree.
    pub fn deck_translate(&self, k: i64) -> LiftMap {
        if k == 0 {
            return self.clone();
        }
        let base = self.eval.clone();
        let shift = k as f64;
        let mut out = self.clone();
        out.name = format!("{}+{}", self.name, k);
        out.eval = Arc::new(move |p| base(p).map(|q| PlanePoint::new(q.x + shift, q.y)));
        out
    }

    /// `T_j o F o T_j^{-1}` where `T_j` is the deck translation by `j`.
    /// Equals `F + (j (1 - d), 0)`.
    pub fn conjugate_by_deck(&self, j: i64) -> LiftMap {
        let inner = self.clone();
        let shift = j as f64;
        let mut out = self.clone();
        out.name = format!("T{j}.{}.T{}", self.name, -j);
        out.eval = Arc::new(move |p| {
            inner
                .eval(PlanePoint::new(p.x - shift, p.y))
                .map(|q| PlanePoint::new(q.x + shift, q.y))
        });
        out
    }

    /// The `n`-fold composition, of degree `d^n`. Intermediate images are
    /// checked against the domain strip at evaluation time.
    pub fn iterate(&self, n: u32) -> Result<LiftMap> {
        if n == 0 {
            return Err(Error::InvalidInput("iterate needs n >= 1".into()));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let degree = self
            .degree
            .checked_pow(n)
            .ok_or_else(|| Error::InvalidInput(format!("degree {}^{} overflows", self.degree, n)))?;
        let inner = self.clone();
        let mut out = self.clone();
        out.name = format!("{}^{}", self.name, n);
        out.degree = degree;
        out.lipschitz = self.lipschitz.map(|l| l.powi(n as i32));
        out.local_lipschitz = None;
        out.eval = Arc::new(move |p| {
            let mut q = p;
            for _ in 0..n {
                q = inner.eval(q)?;
            }
            Ok(q)
        });
        Ok(out)
    }

    /// The induced map of the punctured plane, `z -> Pi(F(Pi^{-1} z))`.
    pub fn plane_map(&self) -> AnnulusPlaneMap<'_> {
        AnnulusPlaneMap { lift: self }
    }
}

impl PlaneMap for LiftMap {
    fn apply(&self, p: PlanePoint) -> Result<PlanePoint> {
        self.eval(p)
    }
}

/// Covering projection of the punctured plane, `(x, y) -> exp(2 pi i (x + i y))`.
pub fn cover_to_plane(p: PlanePoint) -> PlanePoint {
    let r = (-TAU * p.y).exp();
    let a = TAU * p.x;
    PlanePoint::new(r * a.cos(), r * a.sin())
}

/// A preimage of `z != 0` under [`cover_to_plane`], with `x` in `(-1/2, 1/2]`.
pub fn plane_to_cover(z: PlanePoint) -> Result<PlanePoint> {
    let r = z.norm();
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidInput(format!("{z} is not in the punctured plane")));
    }
    Ok(PlanePoint::new(z.y.atan2(z.x) / TAU, -r.ln() / TAU))
}

/// An annulus map viewed as a map of the punctured plane.
#[derive(Clone, Copy)]
pub struct AnnulusPlaneMap<'a> {
    lift: &'a LiftMap,
}

impl PlaneMap for AnnulusPlaneMap<'_> {
    fn apply(&self, z: PlanePoint) -> Result<PlanePoint> {
        let w = self.lift.eval(plane_to_cover(z)?)?;
        Ok(cover_to_plane(w))
    }
}

/// Point of the annulus in cover coordinates: angle `theta` in turns and the
/// radial coordinate `y` (radius `exp(-2 pi y)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusPoint {
    theta: f64,
    pub y: f64,
}

impl AnnulusPoint {
    pub fn new(theta: f64, y: f64) -> Self {
        let mut t = theta.rem_euclid(1.0);
        if t >= 1.0 {
            t = 0.0;
        }
        AnnulusPoint { theta: t, y }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// The lift in the fundamental domain `[0, 1) x R`.
    pub fn lift(&self) -> PlanePoint {
        PlanePoint::new(self.theta, self.y)
    }

    /// Distance in the annulus metric inherited from the cover.
    pub fn distance(&self, other: &AnnulusPoint) -> f64 {
        let dt = (self.theta - other.theta).rem_euclid(1.0);
        dt.min(1.0 - dt).hypot(self.y - other.y)
    }
}

pub fn project(p: PlanePoint) -> AnnulusPoint {
    AnnulusPoint::new(p.x, p.y)
}

/// Regular sample grid for equivariance checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    pub tolerance: f64,
}

impl Default for SampleGrid {
    fn default() -> Self {
        SampleGrid {
            x_range: (0.0, 1.0),
            y_range: (-1.0, 1.0),
            nx: 8,
            ny: 8,
            tolerance: EQUIVARIANCE_TOLERANCE,
        }
    }
}

impl SampleGrid {
    pub fn points(&self) -> impl Iterator<Item = PlanePoint> + '_ {
        let coord = |lo: f64, hi: f64, n: usize, i: usize| {
            if n <= 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        };
        (0..self.ny).flat_map(move |j| {
            (0..self.nx).map(move |i| {
                PlanePoint::new(
                    coord(self.x_range.0, self.x_range.1, self.nx, i),
                    coord(self.y_range.0, self.y_range.1, self.ny, j),
                )
            })
        })
    }
}

/// Measures `F(x + 1, y) - F(x, y)` on the grid and returns the common integer
/// translation, which must also equal the declared degree.
pub fn degree_check(map: &LiftMap, grid: &SampleGrid) -> Result<i64> {
    if let Some((lo, hi)) = map.domain_strip {
        if grid.y_range.0 < lo || grid.y_range.1 > hi {
            return Err(Error::InvalidInput(format!(
                "grid rows {:?} leave the domain strip ({lo}, {hi})",
                grid.y_range
            )));
        }
    }
    let tol = grid.tolerance;
    let mut measured: Option<i64> = None;
    for p in grid.points() {
        let a = map.eval(p)?;
        let b = map.eval(PlanePoint::new(p.x + 1.0, p.y))?;
        let diff = b - a;
        if diff.y.abs() > tol {
            return Err(Error::EquivarianceViolation {
                point: p,
                detail: format!("vertical shift {:e} is not zero", diff.y),
            });
        }
        let k = diff.x.round();
        if (diff.x - k).abs() > tol {
            return Err(Error::EquivarianceViolation {
                point: p,
                detail: format!("horizontal shift {} is not an integer", diff.x),
            });
        }
        let k = k as i64;
        match measured {
            None => measured = Some(k),
            Some(m) if m != k => {
                return Err(Error::EquivarianceViolation {
                    point: p,
                    detail: format!("horizontal shift {k} differs from {m} seen earlier"),
                })
            }
            _ => {}
        }
    }
    let measured = measured.ok_or_else(|| Error::InvalidInput("empty sample grid".into()))?;
    if measured != map.degree {
        return Err(Error::EquivarianceViolation {
            point: PlanePoint::new(grid.x_range.0, grid.y_range.0),
            detail: format!("measured degree {measured}, declared {}", map.degree),
        });
    }
    Ok(measured)
}

pub fn deck_translate(map: &LiftMap, k: i64) -> LiftMap {
    map.deck_translate(k)
}

pub fn iterate(map: &LiftMap, n: u32) -> Result<LiftMap> {
    map.iterate(n)
}
