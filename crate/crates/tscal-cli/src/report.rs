//! Structured reports and CSV sample dumps.

use serde::{Deserialize, Serialize};
use tscal::monotonicity::{HypothesisMargin, MonotoneVerdict, Verdict};

use crate::config::ScenarioConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum VerdictRecord {
    Verified,
    ViolatedAt { s_left: f64, s_right: f64 },
    HypothesisFailed { condition: String },
}

impl From<&Verdict> for VerdictRecord {
    fn from(v: &Verdict) -> Self {
        match v {
            Verdict::Verified => VerdictRecord::Verified,
            Verdict::ViolatedAt { s_left, s_right } => VerdictRecord::ViolatedAt {
                s_left: *s_left,
                s_right: *s_right,
            },
            Verdict::HypothesisFailed { condition } => VerdictRecord::HypothesisFailed {
                condition: condition.clone(),
            },
        }
    }
}

impl VerdictRecord {
    /// Process exit status for this verdict class.
    pub fn exit_code(&self) -> i32 {
        match self {
            VerdictRecord::Verified => 0,
            VerdictRecord::ViolatedAt { .. } => 2,
            VerdictRecord::HypothesisFailed { .. } => 3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarginRecord {
    pub id: String,
    pub worst_margin: f64,
    pub worst_location: f64,
    pub passed: bool,
}

impl From<&HypothesisMargin> for MarginRecord {
    fn from(m: &HypothesisMargin) -> Self {
        MarginRecord {
            id: m.id.clone(),
            worst_margin: m.worst_margin,
            worst_location: m.worst_location,
            passed: m.passed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub library_version: String,
    pub scenario: ScenarioConfig,
    pub seed: u64,
    pub direction_claimed: String,
    pub tol_mono: f64,
    pub analytic_partials: bool,
    pub hypothesis_margins: Vec<MarginRecord>,
    pub samples: Vec<(f64, f64)>,
    pub verdict: VerdictRecord,
    /// Wall time; excluded from determinism comparisons.
    pub wall_time_ms: f64,
}

impl VerifyReport {
    pub fn new(scenario: ScenarioConfig, mv: &MonotoneVerdict, wall_time_ms: f64) -> Self {
        VerifyReport {
            schema: SCHEMA_VERSION,
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: scenario.seed.unwrap_or(0),
            scenario,
            direction_claimed: match mv.direction_claimed {
                tscal::Direction::Increasing => "increasing".into(),
                tscal::Direction::Decreasing => "decreasing".into(),
            },
            tol_mono: mv.tol_mono,
            analytic_partials: mv.analytic_partials,
            hypothesis_margins: mv.hypothesis_margins.iter().map(Into::into).collect(),
            samples: mv.samples.clone(),
            verdict: (&mv.verdict).into(),
            wall_time_ms,
        }
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["s", "value"])?;
        for (s, v) in &self.samples {
            wtr.write_record([format!("{s}"), format!("{v}")])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Read a CSV sample dump back into (s, value) pairs.
pub fn read_csv_samples<R: std::io::Read>(r: R) -> Result<Vec<(f64, f64)>, String> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let s: f64 = rec
            .get(0)
            .ok_or("missing s column")?
            .parse()
            .map_err(|e: std::num::ParseFloatError| e.to_string())?;
        let v: f64 = rec
            .get(1)
            .ok_or("missing value column")?
            .parse()
            .map_err(|e: std::num::ParseFloatError| e.to_string())?;
        out.push((s, v));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTrial {
    pub trial: u64,
    pub verdict: VerdictRecord,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema: u32,
    pub library_version: String,
    pub theorem: String,
    pub trials: u64,
    pub seed: u64,
    pub falsify: bool,
    pub verified: u64,
    pub violated: u64,
    pub hypothesis_failed: u64,
    pub trials_detail: Vec<SweepTrial>,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConRow {
    pub scale: String,
    pub min_margin: f64,
    pub witness_order: usize,
    pub witness_point: f64,
    pub violation: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConSearchReport {
    pub schema: u32,
    pub library_version: String,
    pub generator: String,
    pub trials: u64,
    pub seed: u64,
    /// The three canonical scales, always reported as control rows.
    pub controls: Vec<ConRow>,
    pub rows: Vec<ConRow>,
    pub violations: u64,
    pub wall_time_ms: f64,
}

/// Serialize a report deterministically (stable field order via serde).
pub fn to_json_pretty<T: Serialize>(t: &T) -> String {
    serde_json::to_string_pretty(t).expect("report serialization cannot fail")
}
