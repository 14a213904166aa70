//! Rendering command results as JSON, CSV or aligned text.

use std::io::Write;

use serde::Serialize;
use smtrace::Error;

use crate::{Format, Global};

/// A result: the JSON document plus a flat table for csv/pretty.
pub struct Rendered {
    pub json: serde_json::Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Rendered {
    pub fn new<T: Serialize>(doc: &T, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        Rendered {
            json: serde_json::to_value(doc).expect("serializable output"),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }

    fn text(&self, format: Format) -> Result<String, Error> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("valid json");
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Error::Io(e.to_string());
                w.write_record(&self.header).map_err(io)?;
                for r in &self.rows {
                    w.write_record(r).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
                Ok(String::from_utf8(bytes).expect("utf8 csv"))
            }
            Format::Pretty => {
                let mut widths: Vec<usize> = self.header.iter().map(String::len).collect();
                for r in &self.rows {
                    for (w, c) in widths.iter_mut().zip(r) {
                        *w = (*w).max(c.len());
                    }
                }
                let line = |cells: &[String]| {
                    let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
                    parts.join("  ").trim_end().to_string() + "\n"
                };
                let mut s = line(&self.header);
                for r in &self.rows {
                    s += &line(r);
                }
                Ok(s)
            }
        }
    }

    pub fn emit(&self, g: &Global) -> Result<(), Error> {
        let text = self.text(g.format)?;
        match &g.out {
            Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
            None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string())),
        }
    }
}
