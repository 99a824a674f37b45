//! Built-in lifts.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use serde::Serialize;
use serde_json::Value;

use super::{counterexample_deg_minus1, CompletenessMechanism, LiftMap};
use crate::curves::PlanePoint;
use crate::error::{Error, Result};

/// Bound on `|eps|` for `perturbed_power`: keeps the circle factor expanding.
pub const PERTURBATION_LIMIT: f64 = 1.0 / (4.0 * PI);

/// Largest degree accepted by the zoo.
const MAX_DEGREE: i64 = 16;

#[derive(Debug, Clone, Serialize)]
pub struct ZooParam {
    pub name: &'static str,
    pub kind: &'static str,
    pub default: &'static str,
    pub range: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZooEntry {
    pub id: &'static str,
    pub formula: &'static str,
    pub params: Vec<ZooParam>,
}

const D_PARAM: ZooParam = ZooParam {
    name: "d",
    kind: "integer",
    default: "2",
    range: "2 <= |d| <= 16",
};

pub fn zoo_entries() -> Vec<ZooEntry> {
    vec![
        ZooEntry {
            id: "power",
            formula: "F(x, y) = (d x, d y), lift of z -> z^d",
            params: vec![D_PARAM],
        },
        ZooEntry {
            id: "perturbed_power",
            formula: "F(x, y) = (d x + eps sin(2 pi x) bump(y), d y), bump(y) = exp(1 - 1/(1 - y^2)) on |y| < 1",
            params: vec![
                D_PARAM,
                ZooParam {
                    name: "eps",
                    kind: "real",
                    default: "0.05",
                    range: "|eps| < 1/(4 pi)",
                },
            ],
        },
        ZooEntry {
            id: "ends_attracting",
            formula: "F(x, y) = (d x, y + lambda y / (1 + y^2))",
            params: vec![
                D_PARAM,
                ZooParam {
                    name: "lambda",
                    kind: "real",
                    default: "1",
                    range: "0 < lambda <= 4",
                },
            ],
        },
        ZooEntry {
            id: "ends_repelling",
            formula: "F(x, y) = (d x, y - lambda y / (1 + y^2))",
            params: vec![
                D_PARAM,
                ZooParam {
                    name: "lambda",
                    kind: "real",
                    default: "1",
                    range: "0 < lambda <= 1",
                },
            ],
        },
        ZooEntry {
            id: "end_swap",
            formula: "F(x, y) = (d x, -y)",
            params: vec![ZooParam {
                default: "-2",
                ..D_PARAM
            }],
        },
        ZooEntry {
            id: "translation",
            formula: "F(x, y) = (x + shift, y), degree 1",
            params: vec![ZooParam {
                name: "shift",
                kind: "real",
                default: "0.3",
                range: "any finite real",
            }],
        },
        ZooEntry {
            id: "counterexample_deg_minus1",
            formula: "degree -1 lift, fixed point free on the lifted continuum K' (two ears per period)",
            params: vec![],
        },
    ]
}

fn int_param(params: &Value, name: &str, default: i64) -> Result<i64> {
    match params.get(name) {
        None | Some(Value::Null) => Ok(default),
        Some(v) => v
            .as_i64()
            .or_else(|| v.as_f64().filter(|f| f.fract() == 0.0).map(|f| f as i64))
            .ok_or_else(|| Error::ParamOutOfRange {
                name: name.into(),
                detail: format!("{v} is not an integer"),
            }),
    }
}

fn real_param(params: &Value, name: &str, default: f64) -> Result<f64> {
    match params.get(name) {
        None | Some(Value::Null) => Ok(default),
        Some(v) => v
            .as_f64()
            .filter(|f| f.is_finite())
            .ok_or_else(|| Error::ParamOutOfRange {
                name: name.into(),
                detail: format!("{v} is not a finite real"),
            }),
    }
}

fn degree_param(params: &Value, default: i64) -> Result<i64> {
    let d = int_param(params, "d", default)?;
    if d.abs() < 2 || d.abs() > MAX_DEGREE {
        return Err(Error::ParamOutOfRange {
            name: "d".into(),
            detail: format!("need 2 <= |d| <= {MAX_DEGREE}, got {d}"),
        });
    }
    Ok(d)
}

/// Smooth bump supported on `|y| < 1` with `bump(0) = 1`.
pub(crate) fn bump(y: f64) -> f64 {
    if y.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - y * y)).exp()
    }
}

/// Upper bound on `|bump'|`.
pub(crate) const BUMP_SLOPE_BOUND: f64 = 2.5;

fn lift(name: String, degree: i64, f: impl Fn(PlanePoint) -> PlanePoint + Send + Sync + 'static) -> LiftMap {
    LiftMap::from_parts(name, degree, Arc::new(move |p| Ok(f(p))))
}

/// Builds the named zoo lift. `params` is a JSON object; missing keys take
/// their documented defaults.
pub fn zoo(name: &str, params: &Value) -> Result<LiftMap> {
    if !(params.is_object() || params.is_null()) {
        return Err(Error::InvalidInput(format!("params must be a JSON object, got {params}")));
    }
    let map = match name {
        "power" => {
            let d = degree_param(params, 2)?;
            let df = d as f64;
            lift(format!("power(d={d})"), d, move |p| PlanePoint::new(df * p.x, df * p.y))
                .with_lipschitz(df.abs())
                .with_mechanism(CompletenessMechanism::ClosedForm)
        }
        "perturbed_power" => {
            let d = degree_param(params, 2)?;
            let eps = real_param(params, "eps", 0.05)?;
            if eps.abs() >= PERTURBATION_LIMIT {
                return Err(Error::ParamOutOfRange {
                    name: "eps".into(),
                    detail: format!("need |eps| < 1/(4 pi), got {eps}"),
                });
            }
            let df = d as f64;
            let lx = df.abs() + TAU * eps.abs();
            let lip = (lx * lx + (eps.abs() * BUMP_SLOPE_BOUND).powi(2) + df * df).sqrt();
            lift(format!("perturbed_power(d={d},eps={eps})"), d, move |p| {
                PlanePoint::new(df * p.x + eps * (TAU * p.x).sin() * bump(p.y), df * p.y)
            })
            .with_lipschitz(lip)
            .with_mechanism(CompletenessMechanism::InvariantCircle)
        }
        "ends_attracting" => {
            let d = degree_param(params, 2)?;
            let lambda = real_param(params, "lambda", 1.0)?;
            if !(lambda > 0.0 && lambda <= 4.0) {
                return Err(Error::ParamOutOfRange {
                    name: "lambda".into(),
                    detail: format!("need 0 < lambda <= 4, got {lambda}"),
                });
            }
            let df = d as f64;
            lift(format!("ends_attracting(d={d},lambda={lambda})"), d, move |p| {
                PlanePoint::new(df * p.x, p.y + lambda * p.y / (1.0 + p.y * p.y))
            })
            .with_lipschitz(df.abs().max(1.0 + lambda))
            .with_mechanism(CompletenessMechanism::AttractingEnds)
        }
        "ends_repelling" => {
            let d = degree_param(params, 2)?;
            let lambda = real_param(params, "lambda", 1.0)?;
            if !(lambda > 0.0 && lambda <= 1.0) {
                return Err(Error::ParamOutOfRange {
                    name: "lambda".into(),
                    detail: format!("need 0 < lambda <= 1, got {lambda}"),
                });
            }
            let df = d as f64;
            lift(format!("ends_repelling(d={d},lambda={lambda})"), d, move |p| {
                PlanePoint::new(df * p.x, p.y - lambda * p.y / (1.0 + p.y * p.y))
            })
            .with_lipschitz(df.abs().max(1.0 + lambda / 8.0))
            .with_mechanism(CompletenessMechanism::RepellingEnds)
        }
        "end_swap" => {
            let d = degree_param(params, -2)?;
            let df = d as f64;
            lift(format!("end_swap(d={d})"), d, move |p| PlanePoint::new(df * p.x, -p.y))
                .with_lipschitz(df.abs())
                .with_mechanism(CompletenessMechanism::EndSwapOddIterates)
        }
        "translation" => {
            let shift = real_param(params, "shift", 0.3)?;
            lift(format!("translation(shift={shift})"), 1, move |p| {
                PlanePoint::new(p.x + shift, p.y)
            })
            .with_lipschitz(1.0)
        }
        "counterexample_deg_minus1" => counterexample_deg_minus1()?,
        other => return Err(Error::UnknownZooEntry(other.into())),
    };
    Ok(map)
}
