//! Plain-text snapshots: a field as `x,re,im` (or `k,re,im`) CSV with a
//! `<stem>.meta.json` sidecar holding the grid, and tail profiles as CSV.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, Space};
use crate::tails::TailProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotMeta {
    pub n: usize,
    pub length: f64,
    pub space: Space,
}

/// `dir/name.csv` -> `dir/name.meta.json`.
pub fn meta_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

pub fn write_field(path: &Path, f: &Field) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let head = match f.space() {
        Space::Position => "x",
        Space::Frequency => "k",
    };
    w.write_record([head, "re", "im"])?;
    let coords = f.grid().lattice(f.space());
    for (y, v) in coords.iter().zip(f.values()) {
        w.write_record([fmt(*y), fmt(v.re), fmt(v.im)])?;
    }
    w.flush()?;
    let meta = SnapshotMeta {
        n: f.grid().n(),
        length: f.grid().length(),
        space: f.space(),
    };
    std::fs::write(meta_path(path), serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(())
}

/// Reads a field snapshot. The sidecar fixes the grid when present;
/// otherwise the grid is inferred from the coordinate column.
pub fn read_field(path: &Path) -> Result<Field> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let space = match headers.iter().collect::<Vec<_>>().as_slice() {
        ["x", "re", "im"] => Space::Position,
        ["k", "re", "im"] => Space::Frequency,
        other => {
            return Err(Error::Snapshot(format!(
                "{}: expected header x,re,im or k,re,im, got {}",
                path.display(),
                other.join(",")
            )))
        }
    };
    let mut coords = Vec::new();
    let mut values = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(Error::Snapshot(format!("{}: row {} has {} columns", path.display(), line + 2, rec.len())));
        }
        let num = |i: usize| -> Result<f64> {
            rec[i].trim().parse::<f64>().map_err(|e| {
                Error::Snapshot(format!("{}: row {}: {e}: {:?}", path.display(), line + 2, &rec[i]))
            })
        };
        coords.push(num(0)?);
        values.push(Complex64::new(num(1)?, num(2)?));
    }
    let meta = meta_path(path);
    let grid = if meta.exists() {
        let m: SnapshotMeta = serde_json::from_str(&std::fs::read_to_string(&meta)?)?;
        if m.space != space || m.n != values.len() {
            return Err(Error::Snapshot(format!(
                "{} disagrees with {}: {} {} points vs {} {} rows",
                meta.display(),
                path.display(),
                m.space,
                m.n,
                space,
                values.len()
            )));
        }
        Grid::new(m.n, m.length)?
    } else {
        infer_grid(&coords, space)?
    };
    let expected = grid.lattice(space);
    let h = grid.spacing(space);
    if coords.iter().zip(&expected).any(|(a, b)| (a - b).abs() > 1e-9 * h.max(1.0)) {
        return Err(Error::Snapshot(format!(
            "{}: coordinates do not match the {space} lattice of {grid}",
            path.display()
        )));
    }
    Field::new(grid, space, values)
}

fn infer_grid(coords: &[f64], space: Space) -> Result<Grid> {
    let n = coords.len();
    if n < 2 {
        return Err(Error::Snapshot("too few rows to infer a grid".into()));
    }
    let h = coords[1] - coords[0];
    let length = match space {
        Space::Position => n as f64 * h,
        // dk = 2 pi / L
        Space::Frequency => 2.0 * std::f64::consts::PI / h,
    };
    Grid::new(n, length)
}

pub fn write_tail_profile(path: &Path, p: &TailProfile, envelope: &[f64]) -> Result<()> {
    if envelope.len() != p.s.len() {
        return Err(Error::InvalidArgument("envelope column length differs from profile".into()));
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["s", "alpha", "beta", "alpha_bar", "beta_bar", "envelope"])?;
    for (i, env) in envelope.iter().enumerate() {
        w.write_record([
            fmt(p.s[i]),
            fmt(p.alpha[i]),
            fmt(p.beta[i]),
            fmt(p.alpha_bar[i]),
            fmt(p.beta_bar[i]),
            fmt(*env),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest representation that parses back to the same bits.
fn fmt(v: f64) -> String {
    format!("{v:e}")
}
