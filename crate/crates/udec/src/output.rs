//! CSV result rows.

use std::io::Write;

use crate::{Error, Result, VERSION};

pub const HEADER: [&str; 13] = [
    "mode", "n", "decoder", "metric", "value", "lower", "upper", "trials", "errors", "rate", "m", "seed", "version",
];

/// One result line. Optional fields are written as empty cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Row {
    pub mode: String,
    pub n: usize,
    pub decoder: String,
    pub metric: String,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub trials: Option<u64>,
    pub errors: Option<u64>,
    pub rate: Option<f64>,
    pub m: Option<u64>,
    pub seed: Option<u64>,
}

impl Row {
    pub fn new(mode: &str, n: usize, decoder: &str, metric: &str, value: f64) -> Self {
        Self {
            mode: mode.into(),
            n,
            decoder: decoder.into(),
            metric: metric.into(),
            value,
            ..Default::default()
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

pub fn write_rows<W: Write>(out: W, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER).map_err(Error::Csv)?;
    for r in rows {
        w.write_record([
            r.mode.clone(),
            r.n.to_string(),
            r.decoder.clone(),
            r.metric.clone(),
            format_float(r.value),
            opt(r.lower, format_float),
            opt(r.upper, format_float),
            opt(r.trials, |v| v.to_string()),
            opt(r.errors, |v| v.to_string()),
            opt(r.rate, format_float),
            opt(r.m, |v| v.to_string()),
            opt(r.seed, |v| v.to_string()),
            VERSION.to_string(),
        ])
        .map_err(Error::Csv)?;
    }
    w.flush().map_err(|e| Error::Io("csv output".into(), e))?;
    Ok(())
}

pub fn rows_to_string(rows: &[Row]) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}
