//! CSV tables with a `#`-prefixed parameter block, written atomically.

use std::io::Write;
use std::path::Path;

use crate::adi::FieldState;
use crate::cases::ExampleCase;
use crate::error::{Error, Result};
use crate::geometry::Grid2D;
use crate::stability::SpectrumReport;
use crate::study::{exact_field, BoundednessRecord, ConvergenceTable, TemporalStudy};

/// A table of numbers with named columns and `key = value` parameters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub params: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Scientific notation with ten significant digits; missing values stay empty.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.9e}")
    }
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            params: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::InvalidInput(format!(
                "row has {} values, header has {} columns",
                row.len(),
                self.header.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn write_to(&self, out: impl Write) -> Result<()> {
        let mut out = out;
        for (k, v) in &self.params {
            writeln!(out, "# {k} = {v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&v| format_value(v)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn render(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
    }

    /// Write to a temporary file next to `path`, then rename it into place.
    pub fn write_atomic(&self, path: &Path) -> Result<()> {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        self.write_to(tmp.as_file_mut())?;
        tmp.as_file_mut().sync_all()?;
        tmp.persist(path).map_err(|e| Error::Io(e.error))?;
        Ok(())
    }

    /// Parse text produced by `write_to`; empty cells read back as NaN.
    pub fn parse(text: &str) -> Result<Self> {
        let mut params = Vec::new();
        let mut body = String::new();
        for line in text.lines() {
            match line.strip_prefix('#') {
                Some(p) => {
                    let (k, v) = p
                        .split_once('=')
                        .ok_or_else(|| Error::InvalidInput(format!("malformed parameter line '{line}'")))?;
                    params.push((k.trim().to_string(), v.trim().to_string()));
                }
                None => {
                    body.push_str(line);
                    body.push('\n');
                }
            }
        }
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let header = r.headers()?.iter().map(|s| s.to_string()).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| {
                    if s.is_empty() {
                        Ok(f64::NAN)
                    } else {
                        s.parse::<f64>()
                            .map_err(|_| Error::InvalidInput(format!("'{s}' is not a number")))
                    }
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Ok(Self { params, header, rows })
    }
}

fn opt(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

/// `N, Linf, order_Linf, L2, order_L2` for a mesh refinement study.
pub fn spatial_table(t: &ConvergenceTable) -> Table {
    let mut out = Table::new(&["N", "Linf", "order_Linf", "L2", "order_L2"]);
    if let Some(r) = t.records.first() {
        out = out.param("dt", r.dt).param("t_final", r.t_final);
    }
    for (k, r) in t.records.iter().enumerate() {
        out.rows
            .push(vec![r.n as f64, r.linf, opt(t.order_linf[k]), r.l2, opt(t.order_l2[k])]);
    }
    out
}

/// `dt, Linf, order_Linf, L2, order_L2` with the fitted rates as parameters.
pub fn temporal_table(s: &TemporalStudy) -> Table {
    let mut out = Table::new(&["dt", "Linf", "order_Linf", "L2", "order_L2"]);
    if let Some(r) = s.records.first() {
        out = out.param("N", r.n).param("t_final", r.t_final);
    }
    for (name, fit) in [("Linf", &s.fit_linf), ("L2", &s.fit_l2)] {
        if let Some(f) = fit {
            out = out.param(&format!("rate_{name}"), format_value(f.rate));
            if let Some(d) = f.descending_rate {
                out = out.param(&format!("descending_rate_{name}"), format_value(d));
            }
        }
    }
    for (k, r) in s.records.iter().enumerate() {
        out.rows
            .push(vec![r.dt, r.linf, opt(s.order_linf[k]), r.l2, opt(s.order_l2[k])]);
    }
    out
}

/// `dt, step, Linf`, one row per recorded step.
pub fn boundedness_table(records: &[BoundednessRecord]) -> Table {
    let mut out = Table::new(&["dt", "step", "Linf"]);
    for r in records {
        for (k, &e) in r.history.iter().enumerate() {
            out.rows.push(vec![r.dt, k as f64, e]);
        }
    }
    out
}

/// `x, y, u_num, u_exact, error` at every node.
pub fn field_table(case: &ExampleCase, grid: &Grid2D, state: &FieldState) -> Table {
    let n = grid.n();
    let exact = exact_field(case, grid, state.t);
    let mut out = Table::new(&["x", "y", "u_num", "u_exact", "error"])
        .param("N", n)
        .param("t", state.t);
    for (p, (&u, &e)) in state.u.iter().zip(&exact.u).enumerate() {
        out.rows.push(vec![grid.x(p % n), grid.y(p / n), u, e, (u - e).abs()]);
    }
    out
}

/// `rank, real, imag, modulus`.
pub fn spectrum_table(r: &SpectrumReport) -> Table {
    let mut out = Table::new(&["rank", "real", "imag", "modulus"])
        .param("N", r.n)
        .param("dt", r.dt)
        .param("alpha_minus", r.alpha_minus)
        .param("alpha_plus", r.alpha_plus)
        .param("shape", format!("{:?}", r.shape))
        .param("method", if r.dense { "dense" } else { "arnoldi" })
        .param("unit_count", r.unit_count)
        .param("max_modulus", format_value(r.max_modulus));
    for (k, (z, m)) in r.eigenvalues.iter().enumerate() {
        out.rows.push(vec![(k + 1) as f64, z.re, z.im, *m]);
    }
    out
}
