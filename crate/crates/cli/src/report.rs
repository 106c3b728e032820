//! Verification records and their JSON/CSV serialization.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// One compared quantity. `pass` is `residual <= tolerance`; a NaN
/// residual fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub scenario: String,
    pub experiment: String,
    pub gauge: String,
    pub quantity: String,
    #[serde(with = "nan_null")]
    pub value: f64,
    #[serde(with = "nan_null")]
    pub reference: f64,
    #[serde(with = "nan_null")]
    pub residual: f64,
    #[serde(with = "nan_null")]
    pub tolerance: f64,
    pub pass: bool,
    /// Oracle the value is checked against.
    pub provenance: String,
}

/// Plot data: a time column followed by one column per tracked quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub records: Vec<Record>,
    #[serde(default)]
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn append(&mut self, mut other: Report) {
        self.records.append(&mut other.records);
        self.series.append(&mut other.series);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Records only; series go to their own files.
    pub fn records_csv(&self) -> anyhow::Result<String> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(HEADER)?;
        for r in &self.records {
            w.serialize(r)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn from_csv(text: &str) -> anyhow::Result<Self> {
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let records = rd.deserialize().collect::<Result<Vec<Record>, _>>()?;
        Ok(Report {
            records,
            series: Vec::new(),
        })
    }
}

const HEADER: [&str; 10] = [
    "scenario",
    "experiment",
    "gauge",
    "quantity",
    "value",
    "reference",
    "residual",
    "tolerance",
    "pass",
    "provenance",
];

impl Series {
    pub fn to_csv(&self) -> anyhow::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    fn file_name(&self) -> String {
        let clean: String = self
            .name
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
            .collect();
        format!("{clean}.csv")
    }
}

/// Writes `report.json` or `report.csv` into `dir`, and each series to
/// `dir/series/<name>.csv`. Returns the paths written, report first.
pub fn emit_report(report: &Report, format: Format, dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let main = match format {
        Format::Json => (dir.join("report.json"), report.to_json()),
        Format::Csv => (dir.join("report.csv"), report.records_csv()?),
    };
    fs::write(&main.0, main.1)?;
    let mut written = vec![main.0];
    if !report.series.is_empty() {
        let sdir = dir.join("series");
        fs::create_dir_all(&sdir)?;
        for s in &report.series {
            let path = sdir.join(s.file_name());
            fs::write(&path, s.to_csv()?)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// JSON has no NaN; write it as `null` and read `null` back as NaN.
mod nan_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_none()
        } else {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
        Null(()),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(match Option::<Repr>::deserialize(d)? {
            Some(Repr::Num(v)) => v,
            Some(Repr::Text(s)) => s.parse().map_err(serde::de::Error::custom)?,
            Some(Repr::Null(())) | None => f64::NAN,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(value: f64, pass: bool) -> Record {
        Record {
            scenario: "s".into(),
            experiment: "e".into(),
            gauge: "zero".into(),
            quantity: "q, with comma".into(),
            value,
            reference: 0.1,
            residual: value - 0.1,
            tolerance: 1e-6,
            pass,
            provenance: "closed-form".into(),
        }
    }

    fn same(a: &Report, b: &Report) -> bool {
        // NaN != NaN, so compare through the text form
        a.to_json() == b.to_json()
    }

    #[test]
    fn json_round_trip_keeps_nan_and_infinities() {
        let r = Report {
            records: vec![record(0.3, true), record(f64::NAN, false), record(f64::INFINITY, false)],
            series: vec![Series {
                name: "a/b".into(),
                columns: vec!["t".into(), "x".into()],
                rows: vec![vec![0.0, 1.5], vec![0.1, 1.25]],
            }],
        };
        let back = Report::from_json(&r.to_json()).unwrap();
        assert!(same(&r, &back));
        assert!(back.records[1].value.is_nan());
        assert_eq!(back.records[2].value, f64::INFINITY);
    }

    #[test]
    fn csv_round_trip() {
        let r = Report {
            records: vec![record(0.1 + 0.2, true), record(f64::NAN, false), record(-1e-300, true)],
            series: vec![],
        };
        let back = Report::from_csv(&r.records_csv().unwrap()).unwrap();
        assert!(same(&r, &back));
    }

    #[test]
    fn empty_report_has_header_only() {
        let r = Report::default();
        assert!(r.passed());
        let text = r.records_csv().unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("scenario,experiment,gauge"));
        assert_eq!(Report::from_csv(&text).unwrap(), r);
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    }
}
