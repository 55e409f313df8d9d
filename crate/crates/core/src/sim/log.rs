//! Trajectory log and its CSV form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column order of the trajectory CSV.
pub const CSV_COLUMNS: [&str; 40] = [
    "t", "rx", "ry", "rz", "vx", "vy", "vz", "rel_rx", "rel_ry", "rel_rz", "rel_vx", "rel_vy",
    "rel_vz", "uR", "uT", "uN", "ux", "uy", "uz", "s1", "s2", "s3", "K1", "K2", "K3", "phi1",
    "phi2", "phi3", "h", "ex", "ey", "ez", "beta_deg", "V", "dv_cum", "sat_x", "sat_y", "sat_z",
    "blackout", "target",
];

/// One control tick.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LogRecord {
    pub t: f64,
    /// inertial position and velocity
    pub r: [f64; 3],
    pub v: [f64; 3],
    /// relative to the active reference point
    pub rel_r: [f64; 3],
    pub rel_v: [f64; 3],
    pub u_rtn: [f64; 3],
    pub u: [f64; 3],
    pub s: [f64; 3],
    pub k: [f64; 3],
    pub phi: [f64; 3],
    /// |r x v| of the relative state
    pub h: f64,
    /// eccentricity vector of the relative state
    pub e: [f64; 3],
    pub beta_deg: f64,
    /// Lyapunov value s.s/2
    pub lyapunov: f64,
    /// accumulated |u| dt up to this tick
    pub dv_cum: f64,
    pub saturated: [bool; 3],
    pub blackout: bool,
    /// index of the active target
    pub target: usize,
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    Escaped { t: f64 },
    Impact { t: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryLog {
    pub records: Vec<LogRecord>,
    pub termination: Termination,
    /// total |u| dt over the whole run (not just the logged ticks)
    pub delta_v: f64,
    /// control period (s)
    pub control_dt: f64,
}

impl TrajectoryLog {
    /// Every `n`-th record plus the last, as a run with `decimate = n` logs them.
    pub fn decimated(&self, n: usize) -> Self {
        let n = n.max(1);
        let last = self.records.len().saturating_sub(1);
        TrajectoryLog {
            records: self.records.iter().enumerate().filter(|(i, _)| i % n == 0 || *i == last).map(|(_, r)| *r).collect(),
            ..self.clone()
        }
    }
}

impl LogRecord {
    fn to_row(self) -> Vec<String> {
        let mut out = Vec::with_capacity(CSV_COLUMNS.len());
        let mut push = |x: f64| out.push(format!("{x:?}"));
        push(self.t);
        self.r.iter().chain(&self.v).chain(&self.rel_r).chain(&self.rel_v).for_each(|x| push(*x));
        self.u_rtn.iter().chain(&self.u).chain(&self.s).chain(&self.k).chain(&self.phi).for_each(|x| push(*x));
        push(self.h);
        self.e.iter().for_each(|x| push(*x));
        push(self.beta_deg);
        push(self.lyapunov);
        push(self.dv_cum);
        for b in self.saturated.iter().chain(std::iter::once(&self.blackout)) {
            out.push(if *b { "1" } else { "0" }.to_string());
        }
        out.push(self.target.to_string());
        out
    }

    fn from_row(row: &csv::StringRecord, line: usize) -> Result<Self> {
        if row.len() != CSV_COLUMNS.len() {
            return Err(Error::LogFormat(format!(
                "line {line}: expected {} fields, found {}",
                CSV_COLUMNS.len(),
                row.len()
            )));
        }
        let num = |i: usize| -> Result<f64> {
            row[i].trim().parse::<f64>().map_err(|e| {
                Error::LogFormat(format!("line {line}, column {}: {e}", CSV_COLUMNS[i]))
            })
        };
        let flag = |i: usize| -> Result<bool> {
            match row[i].trim() {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(Error::LogFormat(format!(
                    "line {line}, column {}: expected 0 or 1, found {other:?}",
                    CSV_COLUMNS[i]
                ))),
            }
        };
        let tri = |i: usize| -> Result<[f64; 3]> { Ok([num(i)?, num(i + 1)?, num(i + 2)?]) };
        Ok(LogRecord {
            t: num(0)?,
            r: tri(1)?,
            v: tri(4)?,
            rel_r: tri(7)?,
            rel_v: tri(10)?,
            u_rtn: tri(13)?,
            u: tri(16)?,
            s: tri(19)?,
            k: tri(22)?,
            phi: tri(25)?,
            h: num(28)?,
            e: tri(29)?,
            beta_deg: num(32)?,
            lyapunov: num(33)?,
            dv_cum: num(34)?,
            saturated: [flag(35)?, flag(36)?, flag(37)?],
            blackout: flag(38)?,
            target: row[39].trim().parse().map_err(|e| {
                Error::LogFormat(format!("line {line}, column target: {e}"))
            })?,
        })
    }
}

/// Writes the records with a header row. Floats use the shortest
/// representation that parses back to the same value.
pub fn write_csv<W: Write>(records: &[LogRecord], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::LogFormat(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for rec in records {
        w.write_record(rec.to_row()).map_err(io)?;
    }
    w.flush().map_err(|e| Error::LogFormat(e.to_string()))
}

/// Parses a trajectory CSV, checking the header against [`CSV_COLUMNS`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<LogRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(|e| Error::LogFormat(e.to_string()))?.clone();
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != CSV_COLUMNS {
        return Err(Error::LogFormat(format!("unexpected header {names:?}")));
    }
    rdr.records()
        .enumerate()
        .map(|(i, row)| {
            let row = row.map_err(|e| Error::LogFormat(e.to_string()))?;
            LogRecord::from_row(&row, i + 2)
        })
        .collect()
}
