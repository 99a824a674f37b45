//! Parsing of map ids, curve specs and regions given on the command line.

use std::path::Path;

use annulus_core::curves::{ClosedCurve, PlanePoint, Rect};
use annulus_core::maps::{zoo, GridLift, LiftMap};
use serde_json::Value;

use crate::CliError;

pub fn parse_params(text: Option<&str>) -> Result<Value, CliError> {
    match text {
        None => Ok(Value::Object(Default::default())),
        Some(t) => serde_json::from_str(t).map_err(|e| CliError::usage(format!("--params is not JSON: {e}"))),
    }
}

/// A zoo id, or `grid:<path>` for a tabulated lift.
pub fn load_map(id: &str, params: &Value) -> Result<LiftMap, CliError> {
    if let Some(path) = id.strip_prefix("grid:") {
        let grid = GridLift::load(Path::new(path)).map_err(CliError::from_core)?;
        return Ok(grid.into_lift(id));
    }
    zoo(id, params).map_err(CliError::from_core)
}

fn numbers(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("{what}: '{s}' is not a number")))
        })
        .collect()
}

/// `x0,x1,y0,y1`.
pub fn parse_region(text: &str) -> Result<Rect, CliError> {
    let v = numbers(text, "region")?;
    if v.len() != 4 {
        return Err(CliError::usage(format!("region needs x0,x1,y0,y1, got '{text}'")));
    }
    Rect::new(v[0], v[1], v[2], v[3]).map_err(CliError::from_core)
}

/// `circle:r=<r>[,n=<samples>]`, `rect:<x0,x1,y0,y1>`, or a JSON file
/// holding an array of `[x, y]` samples.
pub fn parse_curve(spec: &str) -> Result<ClosedCurve, CliError> {
    if let Some(rest) = spec.strip_prefix("circle:") {
        let mut radius = None;
        let mut n = 256usize;
        for part in rest.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("circle option '{part}' is not key=value")))?;
            match key.trim() {
                "r" => radius = Some(numbers(value, "circle radius")?[0]),
                "n" => {
                    n = value
                        .trim()
                        .parse()
                        .map_err(|_| CliError::usage(format!("circle samples '{value}' is not an integer")))?
                }
                other => return Err(CliError::usage(format!("unknown circle option '{other}'"))),
            }
        }
        let radius = radius.ok_or_else(|| CliError::usage("circle needs r=<radius>"))?;
        return ClosedCurve::circle(PlanePoint::new(0.0, 0.0), radius, n).map_err(CliError::from_core);
    }
    if let Some(rest) = spec.strip_prefix("rect:") {
        let v = numbers(rest, "rect")?;
        if v.len() != 4 {
            return Err(CliError::usage(format!("rect needs x0,x1,y0,y1, got '{rest}'")));
        }
        return ClosedCurve::rectangle(v[0], v[1], v[2], v[3], 64).map_err(CliError::from_core);
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| CliError::usage(format!("curve '{spec}' is not a builtin and not readable: {e}")))?;
    let points: Vec<[f64; 2]> =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("curve file {spec}: {e}")))?;
    ClosedCurve::from_points(points.iter().map(|p| PlanePoint::new(p[0], p[1])).collect()).map_err(CliError::from_core)
}
