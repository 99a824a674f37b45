//! Lifts tabulated on a regular grid over one fundamental domain.
//!
//! A grid stores `F` at the nodes `x0 + i / nx` (`0 <= i < nx`) and
//! `y_min + j (y_max - y_min) / (ny - 1)` (`0 <= j < ny`), row-major by `j`.
//! Off the tabulated period the values are extended by equivariance, inside a
//! cell they are interpolated bilinearly, and `y` outside the table is clamped.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::LiftMap;
use crate::curves::PlanePoint;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridStorage {
    /// One `fx,fy` line per node.
    Csv,
    /// Little-endian `f64` pairs.
    F64Le,
    /// `values` array inside the header.
    Inline,
}

/// JSON header of a tabulated lift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub degree: i64,
    pub x0: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
    pub storage: GridStorage,
    /// Data file, relative to the header's directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<PlanePoint>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridLift {
    degree: i64,
    x0: f64,
    nx: usize,
    y_min: f64,
    y_max: f64,
    ny: usize,
    values: Vec<PlanePoint>,
}

impl GridLift {
    pub fn new(degree: i64, x0: f64, nx: usize, y_range: (f64, f64), ny: usize, values: Vec<PlanePoint>) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidInput(format!("grid needs nx, ny >= 2, got {nx} x {ny}")));
        }
        if !(y_range.0 < y_range.1) || !x0.is_finite() {
            return Err(Error::InvalidInput(format!("bad grid extent x0={x0}, y={y_range:?}")));
        }
        if values.len() != nx * ny {
            return Err(Error::InvalidInput(format!(
                "grid expects {} values, got {}",
                nx * ny,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("grid value {i} is not finite")));
        }
        Ok(GridLift {
            degree,
            x0,
            nx,
            y_min: y_range.0,
            y_max: y_range.1,
            ny,
            values,
        })
    }

    /// Samples `f` on the grid nodes.
    pub fn tabulate(
        degree: i64,
        x0: f64,
        nx: usize,
        y_range: (f64, f64),
        ny: usize,
        f: impl Fn(PlanePoint) -> PlanePoint,
    ) -> Result<Self> {
        let hy = (y_range.1 - y_range.0) / (ny.max(2) - 1) as f64;
        let values = (0..ny)
            .flat_map(|j| (0..nx).map(move |i| (i, j)))
            .map(|(i, j)| f(PlanePoint::new(x0 + i as f64 / nx as f64, y_range.0 + j as f64 * hy)))
            .collect();
        GridLift::new(degree, x0, nx, y_range, ny, values)
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    fn hy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    /// Value at column `i` (any integer) and row `j`, extended by equivariance.
    fn node(&self, i: i64, j: usize) -> PlanePoint {
        let nx = self.nx as i64;
        let shift = i.div_euclid(nx);
        let v = self.values[j * self.nx + i.rem_euclid(nx) as usize];
        PlanePoint::new(v.x + (self.degree * shift) as f64, v.y)
    }

    pub fn eval(&self, p: PlanePoint) -> PlanePoint {
        let u = (p.x - self.x0) * self.nx as f64;
        let cell = u.floor();
        let fx = u - cell;
        let i = cell as i64;
        let v = (p.y.clamp(self.y_min, self.y_max) - self.y_min) / self.hy();
        let j = (v.floor() as usize).min(self.ny - 2);
        let fy = (v - j as f64).clamp(0.0, 1.0);
        let a = self.node(i, j).lerp(self.node(i + 1, j), fx);
        let b = self.node(i, j + 1).lerp(self.node(i + 1, j + 1), fx);
        a.lerp(b, fy)
    }

    /// Global Lipschitz bound of the interpolant.
    pub fn lipschitz(&self) -> f64 {
        (0..self.ny - 1)
            .flat_map(|j| (0..self.nx as i64).map(move |i| (i, j)))
            .map(|(i, j)| self.cell_lipschitz(i, j))
            .fold(0.0, f64::max)
    }

    fn cell_lipschitz(&self, i: i64, j: usize) -> f64 {
        let hx = 1.0 / self.nx as f64;
        let a = self
            .node(i + 1, j)
            .dist(self.node(i, j))
            .max(self.node(i + 1, j + 1).dist(self.node(i, j + 1)))
            / hx;
        let b = self
            .node(i, j + 1)
            .dist(self.node(i, j))
            .max(self.node(i + 1, j + 1).dist(self.node(i + 1, j)))
            / self.hy();
        a.hypot(b)
    }

    pub fn into_lift(self, name: impl Into<String>) -> LiftMap {
        let nx = self.nx;
        let ny = self.ny;
        let cells: Vec<f64> = (0..ny - 1)
            .flat_map(|j| (0..nx as i64).map(move |i| (i, j)))
            .map(|(i, j)| self.cell_lipschitz(i, j))
            .collect();
        let global = cells.iter().copied().fold(0.0, f64::max);
        let degree = self.degree;
        let grid = Arc::new(self);
        let g = grid.clone();
        let local = Arc::new(move |lo: PlanePoint, hi: PlanePoint| {
            let col = |x: f64| ((x - g.x0) * nx as f64).floor();
            let row = |y: f64| {
                let v = (y.clamp(g.y_min, g.y_max) - g.y_min) / g.hy();
                (v.floor().max(0.0) as usize).min(ny - 2)
            };
            let (c0, c1) = (col(lo.x), col(hi.x));
            if !(c1 - c0 < nx as f64) {
                return global;
            }
            let mut best: f64 = 0.0;
            for j in row(lo.y)..=row(hi.y) {
                let mut c = c0 as i64;
                while c <= c1 as i64 {
                    best = best.max(cells[j * nx + c.rem_euclid(nx as i64) as usize]);
                    c += 1;
                }
            }
            best
        });
        LiftMap::from_parts(name.into(), degree, Arc::new(move |p| Ok(grid.eval(p))))
            .with_lipschitz(global)
            .with_local_lipschitz(local)
    }

    pub fn header(&self, storage: GridStorage, data: Option<String>) -> GridHeader {
        GridHeader {
            degree: self.degree,
            x0: self.x0,
            nx: self.nx,
            y_min: self.y_min,
            y_max: self.y_max,
            ny: self.ny,
            storage,
            data,
            values: (storage == GridStorage::Inline).then(|| self.values.clone()),
        }
    }

    /// Reads a header and its data file.
    pub fn load(header_path: &Path) -> Result<Self> {
        let header: GridHeader = serde_json::from_str(&std::fs::read_to_string(header_path)?)?;
        let data_path = || -> Result<std::path::PathBuf> {
            let rel = header
                .data
                .as_ref()
                .ok_or_else(|| Error::InvalidInput("grid header names no data file".into()))?;
            Ok(header_path.parent().unwrap_or(Path::new(".")).join(rel))
        };
        let values = match header.storage {
            GridStorage::Inline => header
                .values
                .clone()
                .ok_or_else(|| Error::InvalidInput("inline grid without values".into()))?,
            GridStorage::Csv => parse_csv(&std::fs::read_to_string(data_path()?)?)?,
            GridStorage::F64Le => parse_f64le(&std::fs::read(data_path()?)?)?,
        };
        GridLift::new(header.degree, header.x0, header.nx, (header.y_min, header.y_max), header.ny, values)
    }

    /// Writes `header_path` and, for file storage, `data` next to it.
    pub fn save(&self, header_path: &Path, storage: GridStorage, data: Option<&str>) -> Result<()> {
        let header = self.header(storage, data.map(str::to_owned));
        if storage != GridStorage::Inline {
            let rel = data.ok_or_else(|| Error::InvalidInput("file storage needs a data name".into()))?;
            let path = header_path.parent().unwrap_or(Path::new(".")).join(rel);
            match storage {
                GridStorage::Csv => {
                    let mut s = String::with_capacity(self.values.len() * 48);
                    for v in &self.values {
                        s.push_str(&format!("{:?},{:?}\n", v.x, v.y));
                    }
                    std::fs::write(path, s)?;
                }
                GridStorage::F64Le => {
                    let mut bytes = Vec::with_capacity(self.values.len() * 16);
                    for v in &self.values {
                        bytes.extend_from_slice(&v.x.to_le_bytes());
                        bytes.extend_from_slice(&v.y.to_le_bytes());
                    }
                    std::fs::write(path, bytes)?;
                }
                GridStorage::Inline => unreachable!(),
            }
        }
        std::fs::write(header_path, serde_json::to_string_pretty(&header)?)?;
        Ok(())
    }
}

fn parse_csv(text: &str) -> Result<Vec<PlanePoint>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',').map(str::trim);
        let parse = |s: Option<&str>| -> Result<f64> {
            s.and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| Error::InvalidInput(format!("bad grid csv line {}: `{line}`", lineno + 1)))
        };
        let x = parse(parts.next())?;
        let y = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(Error::InvalidInput(format!("grid csv line {} has extra fields", lineno + 1)));
        }
        out.push(PlanePoint::new(x, y));
    }
    Ok(out)
}

fn parse_f64le(bytes: &[u8]) -> Result<Vec<PlanePoint>> {
    if bytes.len() % 16 != 0 {
        return Err(Error::InvalidInput(format!(
            "binary grid length {} is not a multiple of 16",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            let x = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let y = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            PlanePoint::new(x, y)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{degree_check, SampleGrid};

    fn sample() -> GridLift {
        GridLift::tabulate(2, 0.0, 16, (-1.0, 1.0), 9, |p| {
            PlanePoint::new(2.0 * p.x + 0.05 * (std::f64::consts::TAU * p.x).sin(), 2.0 * p.y)
        })
        .unwrap()
    }

    #[test]
    fn interpolant_is_equivariant_and_matches_nodes() {
        let g = sample();
        let f = g.clone().into_lift("grid");
        assert_eq!(degree_check(&f, &SampleGrid { nx: 13, ny: 7, ..SampleGrid::default() }).unwrap(), 2);
        let node = PlanePoint::new(3.0 / 16.0, -0.25);
        let expect = PlanePoint::new(0.375 + 0.05 * (std::f64::consts::TAU * 3.0 / 16.0).sin(), -0.5);
        assert!(g.eval(node).dist(expect) < 1e-12);
        // Linear in y, so exact between rows.
        assert!((g.eval(PlanePoint::new(0.0, 0.1)).y - 0.2).abs() < 1e-12);
    }

    #[test]
    fn interpolant_is_continuous_across_the_period_seam() {
        let g = sample();
        let a = g.eval(PlanePoint::new(1.0 - 1e-12, 0.3));
        let b = g.eval(PlanePoint::new(1.0, 0.3));
        assert!(a.dist(b) < 1e-9);
    }

    #[test]
    fn csv_and_binary_round_trip() {
        let dir = std::env::temp_dir().join(format!("annulus-grid-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let g = sample();
        for (storage, data) in [
            (GridStorage::Csv, Some("v.csv")),
            (GridStorage::F64Le, Some("v.bin")),
            (GridStorage::Inline, None),
        ] {
            let header = dir.join("grid.json");
            g.save(&header, storage, data).unwrap();
            assert_eq!(GridLift::load(&header).unwrap(), g);
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn bad_inputs() {
        assert!(GridLift::new(1, 0.0, 4, (0.0, 1.0), 2, vec![PlanePoint::ORIGIN; 7]).is_err());
        assert!(GridLift::new(1, 0.0, 1, (0.0, 1.0), 2, vec![PlanePoint::ORIGIN; 2]).is_err());
        assert!(parse_csv("1,2\nx,3\n").is_err());
        assert!(parse_f64le(&[0u8; 15]).is_err());
        assert_eq!(parse_csv("# c\n1,2\n\n3,4\n").unwrap().len(), 2);
    }
}
