//! Scenario files: JSON schema, validation with field-path errors, and
//! construction of the engine objects a checker needs.

use serde::{Deserialize, Serialize};
use tscal::calculus::GridFn;
use tscal::monotonicity::{CheckOptions, Direction, Kernel2, ParamFn, Strictness};
use tscal::timescale::Segment;
use tscal::TimeScale;

#[derive(Debug)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error at `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(field: &str, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        field: field.into(),
        message: message.into(),
    })
}

/// Serialized time scale: either explicit segments or a canonical family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScaleSpec {
    Segments { segments: Vec<SegmentSpec> },
    Canonical {
        canonical: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        n_max: Option<u32>,
        #[serde(skip_serializing_if = "Option::is_none")]
        q: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        a: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        b: Option<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SegmentSpec {
    Interval { interval: [f64; 2] },
    Point { point: f64 },
}

impl ScaleSpec {
    pub fn build(&self, field: &str) -> Result<TimeScale, ConfigError> {
        match self {
            ScaleSpec::Segments { segments } => {
                let segs = segments
                    .iter()
                    .map(|s| match s {
                        SegmentSpec::Interval { interval } => Segment::Interval {
                            lo: interval[0],
                            hi: interval[1],
                        },
                        SegmentSpec::Point { point } => Segment::Point(*point),
                    })
                    .collect();
                TimeScale::from_segments(segs)
                    .map_err(|e| ConfigError {
                        field: format!("{field}.segments"),
                        message: e.to_string(),
                    })
            }
            ScaleSpec::Canonical {
                canonical,
                n_max,
                q,
                a,
                b,
            } => match canonical.as_str() {
                "naturals" => {
                    let n = n_max.ok_or_else(|| ConfigError {
                        field: format!("{field}.n_max"),
                        message: "required for canonical naturals".into(),
                    })?;
                    Ok(TimeScale::naturals(n))
                }
                "qpowers" => {
                    let n = n_max.ok_or_else(|| ConfigError {
                        field: format!("{field}.n_max"),
                        message: "required for canonical qpowers".into(),
                    })?;
                    let q = q.ok_or_else(|| ConfigError {
                        field: format!("{field}.q"),
                        message: "required for canonical qpowers".into(),
                    })?;
                    TimeScale::q_powers(q, n).map_err(|e| ConfigError {
                        field: format!("{field}.q"),
                        message: e.to_string(),
                    })
                }
                "reals" => {
                    let (lo, hi) = match (a, b) {
                        (Some(lo), Some(hi)) => (*lo, *hi),
                        _ => {
                            return err(&format!("{field}.a"), "reals scale needs a and b")
                        }
                    };
                    TimeScale::reals(lo, hi).map_err(|e| ConfigError {
                        field: field.into(),
                        message: e.to_string(),
                    })
                }
                other => err(field, format!("unknown canonical scale `{other}`")),
            },
        }
    }

    pub fn from_scale(scale: &TimeScale) -> Self {
        ScaleSpec::Segments {
            segments: scale
                .segments()
                .iter()
                .map(|s| match s {
                    Segment::Interval { lo, hi } => SegmentSpec::Interval {
                        interval: [*lo, *hi],
                    },
                    Segment::Point(p) => SegmentSpec::Point { point: *p },
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SGridSpec {
    List { list: Vec<f64> },
    Range { range: [f64; 2], count: usize },
}

impl SGridSpec {
    pub fn points(&self, field: &str) -> Result<Vec<f64>, ConfigError> {
        match self {
            SGridSpec::List { list } => {
                if list.len() < 2 {
                    return err(field, "need at least 2 sampling points");
                }
                Ok(list.clone())
            }
            SGridSpec::Range { range, count } => {
                if *count < 2 {
                    return err(&format!("{field}.count"), "need at least 2 points");
                }
                let [lo, hi] = *range;
                let step = (hi - lo) / (*count as f64 - 1.0);
                Ok((0..*count).map(|k| lo + step * k as f64).collect())
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorSpec {
    pub scale: ScaleSpec,
    pub psi: String,
    pub phi: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<String>,
    pub a: f64,
    pub b: f64,
}

/// One scenario file. Fields beyond `theorem` are required per theorem and
/// validated with field-path messages before execution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub theorem: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<ScaleSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_weight: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub damper: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub damper2: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_kernel: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_kernel: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<FactorSpec>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeff_psi: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeff_phi: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u0: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_grid: Option<SGridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub force_sample: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_mono: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_quad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

pub const THEOREM_IDS: &[&str] = &[
    "thm1-1", "nabla1-1", "diamond", "thm1-2", "nabla1-2", "thm1-3", "c1",
    "thm2-1", "thm2-3", "thm2-4", "thm2-5", "thm2-6",
];

impl ScenarioConfig {
    pub fn from_str(src: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(src).map_err(|e| ConfigError {
            field: "<root>".into(),
            message: e.to_string(),
        })
    }

    pub fn options(&self) -> CheckOptions {
        let mut opts = CheckOptions::default();
        if let Some(t) = self.tol_mono {
            opts.tol_mono = t;
        }
        if let Some(r) = self.resolution {
            opts.resolution = r;
        }
        if self.strict == Some(true) {
            opts.strictness = Strictness::Strict;
        }
        if self.force_sample == Some(true) {
            opts.force_sample = true;
        }
        opts
    }

    pub fn direction(&self) -> Result<Direction, ConfigError> {
        match self.direction.as_deref() {
            Some("increasing") => Ok(Direction::Increasing),
            Some("decreasing") => Ok(Direction::Decreasing),
            Some(other) => err(
                "direction",
                format!("expected `increasing` or `decreasing`, got `{other}`"),
            ),
            None => err("direction", "missing required field"),
        }
    }

    pub fn scale(&self) -> Result<TimeScale, ConfigError> {
        self.scale
            .as_ref()
            .ok_or_else(|| ConfigError {
                field: "scale".into(),
                message: "missing required field".into(),
            })?
            .build("scale")
    }

    pub fn grid_fn(&self, field: &str, scale: &TimeScale) -> Result<GridFn, ConfigError> {
        let src = match field {
            "psi" => self.psi.as_deref(),
            "phi" => self.phi.as_deref(),
            "damper" => self.damper.as_deref(),
            "damper2" => self.damper2.as_deref(),
            _ => None,
        };
        let src = src.ok_or_else(|| ConfigError {
            field: field.into(),
            message: "missing required field".into(),
        })?;
        GridFn::parse(scale.clone(), src).map_err(|e| ConfigError {
            field: field.into(),
            message: e.to_string(),
        })
    }

    pub fn kernel(&self, field: &str) -> Result<Kernel2, ConfigError> {
        let src = match field {
            "kernel" => self.kernel.as_deref(),
            "psi_kernel" => self.psi_kernel.as_deref(),
            "phi_kernel" => self.phi_kernel.as_deref(),
            _ => None,
        };
        let src = src.ok_or_else(|| ConfigError {
            field: field.into(),
            message: "missing required field".into(),
        })?;
        Kernel2::parse(src).map_err(|e| ConfigError {
            field: field.into(),
            message: e.to_string(),
        })
    }

    pub fn param_damper(&self) -> Result<Option<ParamFn>, ConfigError> {
        match self.damper.as_deref() {
            None => Ok(None),
            Some(src) => ParamFn::parse(src)
                .map(Some)
                .map_err(|e| ConfigError {
                    field: "damper".into(),
                    message: e.to_string(),
                }),
        }
    }

    pub fn endpoint(&self, field: &str) -> Result<f64, ConfigError> {
        let v = match field {
            "a" => self.a,
            "b" => self.b,
            _ => None,
        };
        v.ok_or_else(|| ConfigError {
            field: field.into(),
            message: "missing required field".into(),
        })
    }

    pub fn s_points(&self) -> Result<Vec<f64>, ConfigError> {
        self.s_grid
            .as_ref()
            .ok_or_else(|| ConfigError {
                field: "s_grid".into(),
                message: "missing required field".into(),
            })?
            .points("s_grid")
    }
}
