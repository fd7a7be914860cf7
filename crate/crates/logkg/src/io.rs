//! File formats: field CSV (`r,u[,v]`), diagnostics CSV, JSON sidecars and
//! run manifests, and the tidy long-format plot data reshape.
//!
//! Numbers are serialized with 17 significant digits so identical inputs
//! reproduce byte-identical data files.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::ground_state::{GroundState, Method};
use crate::radial::{RadialField, RadialGrid};

/// Fixed decimal formatting used in every CSV cell.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub const DIAGNOSTICS_HEADER: &str = "t,E,J0,K0,l2,h1,sup_abs_u,strauss_ratio";

fn parse_float(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::MalformedData(format!("line {line}: cannot parse `{s}` as a number")))
}

/// Write a field (optionally with a velocity column) as `r,u[,v]` CSV.
pub fn write_field(path: &Path, u: &RadialField, v: Option<&RadialField>) -> Result<()> {
    if let Some(v) = v {
        u.same_grid(v)?;
    }
    let grid = u.grid();
    let mut out = String::new();
    out.push_str(if v.is_some() { "r,u,v\n" } else { "r,u\n" });
    for i in 0..grid.len() {
        out.push_str(&format_float(grid.node(i)));
        out.push(',');
        out.push_str(&format_float(u.values()[i]));
        if let Some(v) = v {
            out.push(',');
            out.push_str(&format_float(v.values()[i]));
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Read a `r,u[,v]` CSV; the grid is inferred from the `r` column and
/// validated uniform.
pub fn read_field(path: &Path) -> Result<(RadialField, Option<RadialField>)> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::MalformedData("empty field file".into()))??;
    let has_v = match header.trim() {
        "r,u" => false,
        "r,u,v" => true,
        other => {
            return Err(Error::MalformedData(format!(
                "unexpected field header `{other}` (want `r,u` or `r,u,v`)"
            )))
        }
    };
    let mut rs = Vec::new();
    let mut us = Vec::new();
    let mut vs = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let want = if has_v { 3 } else { 2 };
        if cols.len() != want {
            return Err(Error::MalformedData(format!(
                "line {}: expected {want} columns, found {}",
                k + 2,
                cols.len()
            )));
        }
        rs.push(parse_float(cols[0], k + 2)?);
        us.push(parse_float(cols[1], k + 2)?);
        if has_v {
            vs.push(parse_float(cols[2], k + 2)?);
        }
    }
    if rs.len() < 2 {
        return Err(Error::MalformedData("field file has too few rows".into()));
    }
    let n = rs.len() - 1;
    let r_max = rs[n];
    let grid = RadialGrid::new(r_max, n)?;
    for (i, &r) in rs.iter().enumerate() {
        if (r - grid.node(i)).abs() > 1e-9 * r_max.max(1.0) {
            return Err(Error::MalformedData(format!(
                "non-uniform r column at row {} (r = {r}, expected {})",
                i + 2,
                grid.node(i)
            )));
        }
    }
    let u = RadialField::new(grid, us)?;
    let v = if has_v {
        Some(RadialField::new(grid, vs)?)
    } else {
        None
    };
    Ok((u, v))
}

/// Write diagnostics records with the fixed column set.
pub fn write_diagnostics(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    let mut out = String::new();
    out.push_str(DIAGNOSTICS_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            format_float(r.t),
            format_float(r.e),
            format_float(r.j0),
            format_float(r.k0),
            format_float(r.l2),
            format_float(r.h1),
            format_float(r.sup_abs_u),
            format_float(r.strauss_ratio)
        )
        .expect("string write");
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::MalformedData("empty diagnostics file".into()))??;
    if header.trim() != DIAGNOSTICS_HEADER {
        return Err(Error::MalformedData(format!(
            "unexpected diagnostics header `{header}`"
        )));
    }
    let mut records = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 8 {
            return Err(Error::MalformedData(format!(
                "line {}: expected 8 columns, found {}",
                k + 2,
                cols.len()
            )));
        }
        let mut vals = [0.0; 8];
        for (j, c) in cols.iter().enumerate() {
            vals[j] = parse_float(c, k + 2)?;
        }
        records.push(DiagnosticsRecord {
            t: vals[0],
            e: vals[1],
            j0: vals[2],
            k0: vals[3],
            l2: vals[4],
            h1: vals[5],
            sup_abs_u: vals[6],
            strauss_ratio: vals[7],
        });
    }
    if records.is_empty() {
        return Err(Error::MalformedData(
            "diagnostics file has no data rows".into(),
        ));
    }
    Ok(records)
}

/// Reshape a diagnostics CSV into tidy long format (`t,quantity,value`).
pub fn emit_plotdata(records_path: &Path, out_path: &Path) -> Result<()> {
    let records = read_diagnostics(records_path)?;
    let quantities: [(&str, fn(&DiagnosticsRecord) -> f64); 7] = [
        ("E", |r| r.e),
        ("J0", |r| r.j0),
        ("K0", |r| r.k0),
        ("l2", |r| r.l2),
        ("h1", |r| r.h1),
        ("sup_abs_u", |r| r.sup_abs_u),
        ("strauss_ratio", |r| r.strauss_ratio),
    ];
    let mut out = String::from("t,quantity,value\n");
    for rec in &records {
        for (name, get) in &quantities {
            writeln!(
                out,
                "{},{},{}",
                format_float(rec.t),
                name,
                format_float(get(rec))
            )
            .expect("string write");
        }
    }
    std::fs::write(out_path, out)?;
    Ok(())
}

/// Grid metadata as serialized in sidecars and manifests.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_max: f64,
    pub n: usize,
}

impl From<RadialGrid> for GridSpec {
    fn from(g: RadialGrid) -> Self {
        Self {
            r_max: g.r_max(),
            n: g.intervals(),
        }
    }
}

impl GridSpec {
    pub fn grid(&self) -> Result<RadialGrid> {
        RadialGrid::new(self.r_max, self.n)
    }
}

/// JSON sidecar stored next to a ground-state field CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundStateSidecar {
    pub p: f64,
    pub omega: f64,
    pub d_omega: f64,
    pub residual_norm: f64,
    pub k_value: f64,
    pub amplitude: f64,
    pub method: Method,
    pub grid: GridSpec,
}

impl GroundStateSidecar {
    pub fn from_ground_state(gs: &GroundState) -> Self {
        Self {
            p: gs.params.p(),
            omega: gs.params.omega(),
            d_omega: gs.d_omega,
            residual_norm: gs.residual_norm,
            k_value: gs.k_value,
            amplitude: gs.amplitude,
            method: gs.method,
            grid: gs.field.grid().into(),
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let file = std::fs::File::open(path)?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

/// Persist a ground state as field CSV plus JSON sidecar; returns the two
/// file paths.
pub fn save_ground_state(dir: &Path, gs: &GroundState) -> Result<(std::path::PathBuf, std::path::PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let stem = format!("groundstate_{}", gs.method);
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    write_field(&csv_path, &gs.field, None)?;
    write_json(&json_path, &GroundStateSidecar::from_ground_state(gs))?;
    Ok((csv_path, json_path))
}

/// Load a ground state from its CSV/JSON pair.
pub fn load_ground_state(csv_path: &Path, json_path: &Path) -> Result<GroundState> {
    let (field, _) = read_field(csv_path)?;
    let sidecar: GroundStateSidecar = read_json(json_path)?;
    let params = crate::functionals::ModelParams::new(sidecar.p, sidecar.omega)?;
    if field.grid() != sidecar.grid.grid()? {
        return Err(Error::MalformedData(
            "sidecar grid does not match the field file".into(),
        ));
    }
    Ok(GroundState {
        field,
        params,
        d_omega: sidecar.d_omega,
        k_value: sidecar.k_value,
        residual_norm: sidecar.residual_norm,
        amplitude: sidecar.amplitude,
        method: sidecar.method,
    })
}

/// Run manifest: everything needed to reconstruct an invocation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub p: f64,
    pub omega: f64,
    pub grid: GridSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evolve: Option<crate::dynamics::EvolveConfig>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub termination: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r1_member: Option<bool>,
    pub tool_version: String,
    pub timestamp_unix: u64,
    pub wall_time_s: f64,
}

pub fn tool_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

pub fn unix_timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Write one field CSV that a future `evolve --init` run can consume.
pub fn write_state(path: &Path, state: &crate::dynamics::State) -> Result<()> {
    write_field(path, &state.u, Some(&state.v))
}
