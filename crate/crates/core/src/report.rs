//! Machine-readable run reports (JSON, `schema: 1`).

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use std::io;
use std::time::{SystemTime, UNIX_EPOCH};

pub const SCHEMA_VERSION: u32 = 1;

/// How a record's value is compared against its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// value ≤ tolerance
    AtMost,
    /// value ≥ tolerance
    AtLeast,
    /// value < tolerance
    Below,
    /// value > tolerance
    Above,
    /// |value − tolerance| = 0, for counts and flags
    Equals,
}

impl Comparison {
    pub fn holds(self, value: f64, tolerance: f64) -> bool {
        match self {
            Self::AtMost => value <= tolerance,
            Self::AtLeast => value >= tolerance,
            Self::Below => value < tolerance,
            Self::Above => value > tolerance,
            Self::Equals => value == tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Record {
    /// NaN values never pass.
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64, comparison: Comparison) -> Self {
        let pass = value.is_finite() && comparison.holds(value, tolerance);
        Self { name: name.into(), value, tolerance, comparison, pass, detail: None }
    }

    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(name, value, tolerance, Comparison::AtMost)
    }

    pub fn at_least(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(name, value, tolerance, Comparison::AtLeast)
    }

    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(name, value, tolerance, Comparison::Below)
    }

    pub fn above(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(name, value, tolerance, Comparison::Above)
    }

    pub fn equals(name: impl Into<String>, value: f64, expected: f64) -> Self {
        Self::new(name, value, expected, Comparison::Equals)
    }

    /// A boolean check stored as 1 (true) against an expected 1.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::equals(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }

    /// A failed record carrying an error message.
    pub fn error(name: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Self { name: name.into(), value: f64::NAN, tolerance: f64::NAN, comparison: Comparison::AtMost, pass: false, detail: Some(err.to_string()) }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Environment {
    pub crate_version: String,
    pub os: String,
    pub arch: String,
    pub float: String,
}

impl Environment {
    pub fn current() -> Self {
        Self {
            crate_version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            float: "f64".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: Vec<String>,
    pub records: Vec<Record>,
    pub environment: Environment,
    /// Seconds since the Unix epoch when the report was finished.
    pub timestamp: u64,
    /// Left out under the reproducibility flag.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
    pub pass: bool,
    /// Command-specific payload (spectra, tables, summaries).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<serde_json::Value>,
}

impl Report {
    pub fn new(command: Vec<String>, records: Vec<Record>) -> Self {
        let pass = records.iter().all(|r| r.pass);
        Self {
            schema: SCHEMA_VERSION,
            command,
            records,
            environment: Environment::current(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            wall_time_s: None,
            pass,
            data: None,
        }
    }

    pub fn with_data(mut self, data: serde_json::Value) -> Self {
        self.data = Some(data);
        self
    }

    pub fn with_wall_time(mut self, seconds: Option<f64>) -> Self {
        self.wall_time_s = seconds;
        self
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass)
    }

    /// Pretty JSON with every float written to 17 significant digits.
    pub fn to_json(&self) -> String {
        to_json_17(self)
    }

    /// JSON with the timestamp zeroed, for byte comparisons across runs.
    pub fn to_json_without_timestamp(&self) -> String {
        let mut r = self.clone();
        r.timestamp = 0;
        r.to_json()
    }
}

/// Pretty printer whose floats carry 17 significant digits.
struct SigDigits<'a>(PrettyFormatter<'a>);

impl Formatter for SigDigits<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", format_f64_17(value))
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// `{:.16e}` for finite values; serde_json writes non-finite values as null
/// before reaching the formatter.
pub fn format_f64_17(value: f64) -> String {
    format!("{value:.16e}")
}

/// Serializes any value with the 17-digit float formatter.
pub fn to_json_17<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits(PrettyFormatter::with_indent(b"  ")));
    value.serialize(&mut ser).expect("in-memory JSON serialization cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_17_digits() {
        for v in [0.1, 1.0 / 3.0, -2.0 * std::f64::consts::PI * (-0.5f64).exp(), 1e-300, 123456789.125] {
            let s = format_f64_17(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let digits: String = s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).collect();
            assert_eq!(digits.len(), 17);
        }
    }

    #[test]
    fn report_json_is_valid_and_verdicts_aggregate() {
        let recs = vec![Record::at_most("a", 1e-9, 1e-8), Record::below("b", -1.0, 0.0), Record::error("c", "boom")];
        let rep = Report::new(vec!["check".into()], recs);
        assert!(!rep.pass);
        assert_eq!(rep.failures().count(), 1);
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["records"][0]["value"].as_f64().unwrap(), 1e-9);
        assert!(v["records"][2]["value"].is_null());
        assert!(v.get("wall_time_s").is_none());
    }

    #[test]
    fn nan_never_passes() {
        assert!(!Record::at_most("x", f64::NAN, 1.0).pass);
        assert!(Record::flag("y", true).pass);
        assert!(!Record::flag("y", false).pass);
    }
}
