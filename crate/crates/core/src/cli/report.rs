//! Check reports, serialized as JSON lines with fixed float formatting.
//!
//! Every float is written as `{:.16e}` (17 significant digits, enough to
//! round-trip an `f64`); non-finite values become `null`. Object keys are
//! emitted in a fixed order, so identical runs produce identical bytes.
//! Wall times are kept out of the JSON and written to a separate file.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::Path;
use std::time::Duration;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::ser::Formatter;
use sha2::{Digest, Sha256};

/// `serde_json` formatter that prints floats with 17 significant digits.
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedFloat;

impl Formatter for FixedFloat {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", fmt_f64(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// The fixed float format shared by JSON and CSV output.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serializes `value` as one line of JSON with [`FixedFloat`].
pub fn to_json_line<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloat);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(u64),
    Real(f64),
    /// `[re, im]`
    Complex([f64; 2]),
    Reals(Vec<f64>),
    Text(String),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Real(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as u64)
    }
}

impl From<Complex64> for Value {
    fn from(v: Complex64) -> Self {
        Value::Complex([v.re, v.im])
    }
}

impl From<Vec<f64>> for Value {
    fn from(v: Vec<f64>) -> Self {
        Value::Reals(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub name: String,
    /// Label of the mathematical statement the check exercises.
    pub anchor: String,
    /// SHA-256 of the canonical configuration and check name.
    pub inputs: String,
    pub values: BTreeMap<String, Value>,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Where the worst residual was found, when relevant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl Report {
    pub fn new(name: &str, anchor: &str, inputs: &str) -> Self {
        Report {
            name: name.to_string(),
            anchor: anchor.to_string(),
            inputs: inputs.to_string(),
            values: BTreeMap::new(),
            residual: 0.0,
            tolerance: 0.0,
            pass: false,
            witness: None,
            wall_time: Duration::ZERO,
        }
    }

    pub fn value(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.values.insert(key.to_string(), v.into());
        self
    }

    /// Sets residual and tolerance; passes iff `residual <= tolerance` (NaN fails).
    pub fn judge(mut self, residual: f64, tolerance: f64) -> Self {
        self.residual = residual;
        self.tolerance = tolerance;
        self.pass = residual <= tolerance;
        self
    }

    /// Adds a further requirement on top of the residual test.
    pub fn require(mut self, ok: bool) -> Self {
        self.pass &= ok;
        self
    }

    pub fn witness(mut self, w: impl Into<String>) -> Self {
        self.witness = Some(w.into());
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportSet {
    pub reports: Vec<Report>,
}

impl ReportSet {
    pub fn push(&mut self, r: Report) {
        self.reports.push(r);
    }

    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Report> {
        self.reports.iter().filter(|r| !r.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Report> {
        self.reports.iter().find(|r| r.name == name)
    }

    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for r in &self.reports {
            s.push_str(&to_json_line(r).expect("reports serialize"));
            s.push('\n');
        }
        s
    }

    pub fn to_summary_csv(&self) -> String {
        let mut s = String::from("name,anchor,pass,residual,tolerance\n");
        for r in &self.reports {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.name,
                r.anchor,
                r.pass,
                fmt_f64(r.residual),
                fmt_f64(r.tolerance)
            ));
        }
        s
    }

    pub fn to_timings_csv(&self) -> String {
        let mut s = String::from("name,seconds\n");
        for r in &self.reports {
            s.push_str(&format!("{},{:.6}\n", r.name, r.wall_time.as_secs_f64()));
        }
        s
    }

    /// Writes `reports.jsonl`, `summary.csv` and `timings.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("reports.jsonl"), self.to_jsonl())?;
        std::fs::write(dir.join("summary.csv"), self.to_summary_csv())?;
        std::fs::write(dir.join("timings.csv"), self.to_timings_csv())?;
        Ok(())
    }
}
