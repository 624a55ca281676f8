//! Benchmark records and the report files built from them.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::energy::EnergyReading;
use super::pareto::{pareto_front, Orientation, ParetoPoint};
use super::speed::SpeedReport;
use crate::error::{Error, Result};
use crate::scoring::Paradigm;

pub const REPORT_VERSION: u32 = 1;
pub const REPORT_JSON: &str = "report.json";
pub const RECORDS_CSV: &str = "records.csv";

/// Execution mode key for the accuracy–speed fronts. Only CPU runs exist.
pub const CPU_MODE: &str = "cpu";

/// One (system configuration, treebank) measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub system: Paradigm,
    /// Model-size descriptor, e.g. `b22` for a 2^22 feature space.
    pub size_axis: String,
    pub treebank: String,
    pub las: f64,
    pub uas: f64,
    pub speed: SpeedReport,
    pub train_energy: EnergyReading,
    pub train_time_s: f64,
}

impl RunRecord {
    pub fn id(&self) -> String {
        format!("{}-{}-{}", self.system, self.size_axis, self.treebank)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("las", self.las), ("uas", self.uas)] {
            if !(0.0..=100.0).contains(&v) {
                return Err(Error::Validation(format!(
                    "record {}: {name} {v} outside [0, 100]",
                    self.id()
                )));
            }
        }
        let finite = [
            self.speed.sents_per_sec_mean,
            self.speed.sents_per_sec_std,
            self.train_energy.joules,
            self.train_time_s,
        ];
        if finite.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Validation(format!(
                "record {}: negative or non-finite measurement",
                self.id()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontSet {
    pub overall: Vec<ParetoPoint>,
    /// Keyed by system name.
    pub per_system: BTreeMap<String, Vec<ParetoPoint>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fronts {
    /// LAS against sentences/second, keyed by execution mode.
    pub accuracy_speed: BTreeMap<String, FrontSet>,
    /// LAS against training joules.
    pub accuracy_energy: FrontSet,
    /// Training joules against training seconds, every record.
    pub energy_time: Vec<ParetoPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: u32,
    /// Seconds since the Unix epoch; only set on request.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_unix_s: Option<u64>,
    pub records: Vec<RunRecord>,
    pub fronts: Fronts,
}

fn front_set(records: &[RunRecord], point: impl Fn(&RunRecord) -> ParetoPoint) -> Result<FrontSet> {
    let points: Vec<ParetoPoint> = records.iter().map(&point).collect();
    let mut by_system: BTreeMap<String, Vec<ParetoPoint>> = BTreeMap::new();
    for (r, p) in records.iter().zip(&points) {
        by_system.entry(r.system.to_string()).or_default().push(p.clone());
    }
    let per_system = by_system
        .into_iter()
        .map(|(k, v)| Ok((k, pareto_front(&v)?)))
        .collect::<Result<_>>()?;
    Ok(FrontSet {
        overall: pareto_front(&points)?,
        per_system,
    })
}

pub fn speed_point(r: &RunRecord) -> ParetoPoint {
    use Orientation::*;
    ParetoPoint::new(r.speed.sents_per_sec_mean, r.las, Maximize, Maximize, r.id())
}

pub fn energy_point(r: &RunRecord) -> ParetoPoint {
    use Orientation::*;
    ParetoPoint::new(r.train_energy.joules, r.las, Minimize, Maximize, r.id())
}

pub fn time_point(r: &RunRecord) -> ParetoPoint {
    use Orientation::*;
    ParetoPoint::new(r.train_time_s, r.train_energy.joules, Minimize, Minimize, r.id())
}

/// Records sorted by id, plus every front computed from them.
pub fn build_report(records: &[RunRecord], generated_unix_s: Option<u64>) -> Result<Report> {
    if records.is_empty() {
        return Err(Error::invalid("a report needs at least one record"));
    }
    for r in records {
        r.validate()?;
    }
    let mut records = records.to_vec();
    records.sort_by_key(RunRecord::id);

    let mut accuracy_speed = BTreeMap::new();
    accuracy_speed.insert(CPU_MODE.to_string(), front_set(&records, speed_point)?);
    let fronts = Fronts {
        accuracy_speed,
        accuracy_energy: front_set(&records, energy_point)?,
        energy_time: records.iter().map(time_point).collect(),
    };
    Ok(Report {
        version: REPORT_VERSION,
        generated_unix_s,
        records,
        fronts,
    })
}

pub fn read_report(json: &str) -> Result<Report> {
    let report: Report = serde_json::from_str(json)?;
    if report.version != REPORT_VERSION {
        return Err(Error::Format(format!(
            "unsupported report version {} (expected {REPORT_VERSION})",
            report.version
        )));
    }
    Ok(report)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    system: &'a str,
    size_axis: &'a str,
    treebank: &'a str,
    las: f64,
    uas: f64,
    sents_per_sec_mean: f64,
    sents_per_sec_std: f64,
    train_joules: f64,
    train_seconds: f64,
    energy_source: &'a str,
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::Format(format!("csv: {other:?}")),
    }
}

pub fn records_csv(records: &[RunRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(CsvRow {
            system: r.system.as_str(),
            size_axis: &r.size_axis,
            treebank: &r.treebank,
            las: r.las,
            uas: r.uas,
            sents_per_sec_mean: r.speed.sents_per_sec_mean,
            sents_per_sec_std: r.speed.sents_per_sec_std,
            train_joules: r.train_energy.joules,
            train_seconds: r.train_time_s,
            energy_source: r.train_energy.source.as_str(),
        })
        .map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Write `report.json` and `records.csv` into `dir`, creating it if needed.
pub fn emit_report(report: &Report, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let json_path = dir.join(REPORT_JSON);
    let csv_path = dir.join(RECORDS_CSV);
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    fs::write(&json_path, json)?;
    fs::write(&csv_path, records_csv(&report.records)?)?;
    Ok((json_path, csv_path))
}
