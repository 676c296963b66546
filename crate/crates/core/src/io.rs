//! CSV tables with `# key=value` metadata lines and round-trip float formatting.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::ansatz::CompositeAnsatz;
use crate::diagnostics::DiagnosticsRecord;
use crate::error::{NsfError, Result};
use crate::exec::Exec;
use crate::profiles::contact::ContactProfile;
use crate::profiles::rarefaction::RarefactionWave;
use crate::profiles::shock::ShockProfile;
use crate::solver::{Field, Grid};

/// 17 significant digits: enough to round-trip any `f64`.
#[inline]
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for (k, v) in &self.meta {
            writeln!(w, "# {k}={v}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(|&x| fmt_f64(x)).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(fs::File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut t = CsvTable::default();
        let mut header = false;
        for line in text.lines() {
            if let Some(m) = line.strip_prefix('#') {
                let m = m.trim();
                if let Some((k, v)) = m.split_once('=') {
                    t.meta.push((k.to_string(), v.to_string()));
                }
            } else if !header {
                t.columns = line.split(',').map(str::to_string).collect();
                header = true;
            } else if !line.is_empty() {
                let row = line
                    .split(',')
                    .map(|s| s.parse::<f64>().map_err(|e| NsfError::Precondition(format!("bad float {s:?}: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                if row.len() != t.columns.len() {
                    return Err(NsfError::Precondition(format!("row has {} fields, header {}", row.len(), t.columns.len())));
                }
                t.rows.push(row);
            }
        }
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }
}

pub const SNAPSHOT_COLUMNS: [&str; 7] = ["xi", "v", "u", "theta", "vbar", "ubar", "thetabar"];

/// Field and ansatz side by side on the grid.
pub fn snapshot_table(field: &Field, ansatz: &CompositeAnsatz, shift: f64, grid: &Grid, exec: Exec) -> CsvTable {
    let bar = ansatz.eval_grid(field.t, shift, grid, exec);
    let mut t = CsvTable::new(&SNAPSHOT_COLUMNS).meta("t", fmt_f64(field.t)).meta("X", fmt_f64(shift));
    for (i, b) in bar.iter().enumerate() {
        t.push(vec![grid.xi(i), field.v[i], field.u[i], field.theta[i], b.v, b.u, b.theta]);
    }
    t
}

/// The ansatz alone, in the snapshot schema.
pub fn ansatz_table(ansatz: &CompositeAnsatz, t: f64, shift: f64, grid: &Grid, exec: Exec) -> CsvTable {
    let f = ansatz.field(t, shift, grid, exec);
    snapshot_table(&f, ansatz, shift, grid, exec)
}

pub fn diagnostics_table(records: &[DiagnosticsRecord]) -> CsvTable {
    let mut t = CsvTable::new(&DiagnosticsRecord::COLUMNS);
    for r in records {
        t.push(r.values().to_vec());
    }
    t
}

pub fn shock_table(p: &ShockProfile) -> CsvTable {
    let mut t = CsvTable::new(&["xi", "v", "u", "theta", "dv", "du", "dtheta"])
        .meta("sigma", fmt_f64(p.sigma))
        .meta("delta_s", fmt_f64(p.delta_s));
    for i in 0..p.v.len() {
        t.push(vec![p.axis.at(i), p.v[i], p.u[i], p.theta[i], p.dv[i], p.du[i], p.dtheta[i]]);
    }
    t
}

pub fn contact_table(p: &ContactProfile) -> CsvTable {
    let mut t = CsvTable::new(&["eta", "theta", "dtheta", "d2theta"])
        .meta("a_c", fmt_f64(p.a_c))
        .meta("p_star", fmt_f64(p.p_star));
    for i in 0..p.theta.len() {
        t.push(vec![p.axis.at(i), p.theta[i], p.dtheta[i], p.d2theta[i]]);
    }
    t
}

/// The approximate rarefaction at each of `times` on `n` points spanning the wave.
pub fn rarefaction_table(r: &RarefactionWave, times: &[f64], n: usize) -> CsvTable {
    let mut t = CsvTable::new(&["t", "x", "v", "u", "theta", "vx", "ux", "thetax"]).meta("delta_r", fmt_f64(r.delta_r()));
    for &tt in times {
        let tau = 1.0 + tt;
        let (a, b) = (r.w_minus * tau - 15.0, r.w_star * tau + 15.0);
        let h = (b - a) / (n.max(2) - 1) as f64;
        for i in 0..n {
            let x = a + h * i as f64;
            let s = r.approx(tt, x);
            t.push(vec![tt, x, s.v, s.u, s.theta, s.vx, s.ux, s.thetax]);
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let mut t = CsvTable::new(&["a", "b"]).meta("config_hash", "abc123").meta("t", fmt_f64(0.1));
        t.push(vec![0.1 + 0.2, -1e-300]);
        t.push(vec![std::f64::consts::PI, 6.02214076e23]);
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# config_hash=abc123\n# t=1.0000000000000001e-1\na,b\n"));
        let back = CsvTable::parse(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.meta_value("config_hash"), Some("abc123"));
        assert_eq!(back.column("b").unwrap()[1], 6.02214076e23);
    }

    #[test]
    fn seventeen_significant_digits() {
        let s = fmt_f64(1.0 / 3.0);
        let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        assert!(CsvTable::parse("a,b\n1,2,3\n").is_err());
        assert!(CsvTable::parse("a\nx\n").is_err());
    }
}
