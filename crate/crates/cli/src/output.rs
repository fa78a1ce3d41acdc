//! CSV and report writers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use convex_utm::Complex64;

use crate::CliError;

/// 17 significant digits, enough to round-trip every f64.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trace_csv(path: &Path, rows: &[(f64, Complex64)]) -> Result<(), CliError> {
    let mut s = String::from("theta,re_f,im_f\n");
    for (th, f) in rows {
        let _ = writeln!(s, "{},{},{}", num(*th), num(f.re), num(f.im));
    }
    fs::write(path, s)?;
    Ok(())
}

/// One grid node; `values` is empty outside the evaluation region.
pub struct GridRow {
    pub x: f64,
    pub y: f64,
    pub values: Option<Vec<f64>>,
}

pub fn write_grid_csv(path: &Path, columns: &[&str], rows: &[GridRow]) -> Result<(), CliError> {
    let mut s = String::from("x,y");
    for c in columns {
        s.push(',');
        s.push_str(c);
    }
    s.push_str(",inside\n");
    for r in rows {
        let _ = write!(s, "{},{}", num(r.x), num(r.y));
        match &r.values {
            Some(v) => {
                for x in v {
                    let _ = write!(s, ",{}", num(*x));
                }
                s.push_str(",1\n");
            }
            None => {
                for _ in columns {
                    s.push(',');
                }
                s.push_str(",0\n");
            }
        }
    }
    fs::write(path, s)?;
    Ok(())
}

/// Ordered `key = value` report.
#[derive(Default)]
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn real(&mut self, key: &str, v: f64) {
        self.lines.push((key.to_string(), num(v)));
    }

    pub fn int(&mut self, key: &str, v: usize) {
        self.lines.push((key.to_string(), v.to_string()));
    }

    pub fn complex(&mut self, key: &str, v: Complex64) {
        self.lines.push((key.to_string(), format!("{} {}", num(v.re), num(v.im))));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut s = String::new();
        for (k, v) in &self.lines {
            let _ = writeln!(s, "{k} = {v}");
        }
        fs::write(path, s)?;
        Ok(())
    }
}
