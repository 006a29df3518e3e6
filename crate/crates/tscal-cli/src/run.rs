//! Execute one scenario: map the theorem id to its checker and assemble a
//! report.

use std::time::Instant;

use tscal::calculus::IntegralKind;
use tscal::monotonicity::{
    check_case2, check_generalized_series, check_parametric_quotient, check_power_kernel,
    check_product_quotient, check_thm_damped, check_thm_two_dampers, check_thm_variable_upper,
    MonotoneVerdict, ProductFactor,
};
use tscal::MonomialCtx;

use crate::config::{ConfigError, ScenarioConfig, THEOREM_IDS};
use crate::report::VerifyReport;

pub enum RunError {
    Config(ConfigError),
    Runtime(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<tscal::TsError> for RunError {
    fn from(e: tscal::TsError) -> Self {
        RunError::Runtime(e.to_string())
    }
}

fn integral_kind(cfg: &ScenarioConfig) -> Result<IntegralKind, RunError> {
    Ok(match cfg.theorem.as_str() {
        "nabla1-1" | "nabla1-2" => IntegralKind::Nabla,
        "diamond" => {
            let w = cfg.alpha_weight.ok_or_else(|| {
                RunError::Config(ConfigError {
                    field: "alpha_weight".into(),
                    message: "missing required field".into(),
                })
            })?;
            if !(0.0..=1.0).contains(&w) {
                return Err(RunError::Config(ConfigError {
                    field: "alpha_weight".into(),
                    message: format!("must lie in [0, 1], got {w}"),
                }));
            }
            IntegralKind::diamond(w)
        }
        _ => IntegralKind::Delta,
    })
}

/// Run the checker named by the scenario and return its verdict.
pub fn execute(cfg: &ScenarioConfig) -> Result<MonotoneVerdict, RunError> {
    let opts = cfg.options();
    match cfg.theorem.as_str() {
        "thm1-1" | "nabla1-1" | "diamond" => {
            let scale = cfg.scale()?;
            let psi = cfg.grid_fn("psi", &scale)?;
            let phi = cfg.grid_fn("phi", &scale)?;
            let (a, b) = (cfg.endpoint("a")?, cfg.endpoint("b")?);
            let kind = integral_kind(cfg)?;
            Ok(check_thm_variable_upper(
                kind,
                &psi,
                &phi,
                a,
                b,
                cfg.direction()?,
                &opts,
            )?)
        }
        "thm1-2" | "nabla1-2" => {
            let scale = cfg.scale()?;
            let psi = cfg.grid_fn("psi", &scale)?;
            let phi = cfg.grid_fn("phi", &scale)?;
            let damper = cfg.grid_fn("damper", &scale)?;
            let (a, b) = (cfg.endpoint("a")?, cfg.endpoint("b")?);
            let kind = integral_kind(cfg)?;
            Ok(check_thm_damped(
                kind,
                &psi,
                &phi,
                &damper,
                a,
                b,
                cfg.direction()?,
                &opts,
            )?)
        }
        "thm1-3" => {
            let scale = cfg.scale()?;
            let psi = cfg.grid_fn("psi", &scale)?;
            let phi = cfg.grid_fn("phi", &scale)?;
            let t1 = cfg.grid_fn("damper", &scale)?;
            let t2 = cfg.grid_fn("damper2", &scale)?;
            let (a, b) = (cfg.endpoint("a")?, cfg.endpoint("b")?);
            Ok(check_thm_two_dampers(
                IntegralKind::Delta,
                &psi,
                &phi,
                &t1,
                &t2,
                a,
                b,
                cfg.direction()?,
                &opts,
            )?)
        }
        "c1" => {
            let scale = cfg.scale()?;
            let psi_k = cfg.kernel("psi_kernel")?;
            let phi_k = cfg.kernel("phi_kernel")?;
            let (a, b) = (cfg.endpoint("a")?, cfg.endpoint("b")?);
            let s_grid = cfg.s_points()?;
            let damper = cfg.param_damper()?;
            Ok(check_parametric_quotient(
                &psi_k,
                &phi_k,
                &scale,
                a,
                b,
                &s_grid,
                cfg.direction()?,
                damper.as_ref(),
                &opts,
            )?)
        }
        "thm2-1" => {
            let scale = cfg.scale()?;
            let psi = cfg.grid_fn("psi", &scale)?;
            let phi = cfg.grid_fn("phi", &scale)?;
            let (a, b) = (cfg.endpoint("a")?, cfg.endpoint("b")?);
            let s_grid = cfg.s_points()?;
            Ok(check_power_kernel(
                &psi,
                &phi,
                &scale,
                a,
                b,
                &s_grid,
                cfg.direction()?,
                &opts,
            )?)
        }
        "thm2-3" | "thm2-5" => {
            let specs = cfg.factors.as_ref().ok_or_else(|| {
                RunError::Config(ConfigError {
                    field: "factors".into(),
                    message: "missing required field".into(),
                })
            })?;
            if specs.is_empty() {
                return Err(RunError::Config(ConfigError {
                    field: "factors".into(),
                    message: "need at least one factor".into(),
                }));
            }
            let mut factors = Vec::with_capacity(specs.len());
            for (i, f) in specs.iter().enumerate() {
                let scale = f.scale.build(&format!("factors[{i}].scale"))?;
                let psi = tscal::GridFn::parse(scale.clone(), &f.psi).map_err(|e| {
                    RunError::Config(ConfigError {
                        field: format!("factors[{i}].psi"),
                        message: e.to_string(),
                    })
                })?;
                let phi = tscal::GridFn::parse(scale.clone(), &f.phi).map_err(|e| {
                    RunError::Config(ConfigError {
                        field: format!("factors[{i}].phi"),
                        message: e.to_string(),
                    })
                })?;
                let kernel = match &f.kernel {
                    // the product theorem's default kernel is s^u
                    None => tscal::Kernel2::power(),
                    Some(src) => tscal::Kernel2::parse(src).map_err(|e| {
                        RunError::Config(ConfigError {
                            field: format!("factors[{i}].kernel"),
                            message: e.to_string(),
                        })
                    })?,
                };
                factors.push(ProductFactor {
                    scale,
                    psi,
                    phi,
                    kernel,
                    a: f.a,
                    b: f.b,
                });
            }
            let s_grid = cfg.s_points()?;
            Ok(check_product_quotient(
                &factors,
                &s_grid,
                cfg.direction()?,
                &opts,
            )?)
        }
        "thm2-4" => {
            let scale = cfg.scale()?;
            let psi = cfg.grid_fn("psi", &scale)?;
            let phi = cfg.grid_fn("phi", &scale)?;
            let kernel = cfg.kernel("kernel")?;
            let (a, b) = (cfg.endpoint("a")?, cfg.endpoint("b")?);
            let s_grid = cfg.s_points()?;
            Ok(check_case2(
                &psi, &phi, &kernel, &scale, a, b, &s_grid, &opts,
            )?)
        }
        "thm2-6" => {
            let scale = cfg.scale()?;
            let s0 = cfg.s0.ok_or_else(|| {
                RunError::Config(ConfigError {
                    field: "s0".into(),
                    message: "missing required field".into(),
                })
            })?;
            let max_order = cfg.max_order.ok_or_else(|| {
                RunError::Config(ConfigError {
                    field: "max_order".into(),
                    message: "missing required field".into(),
                })
            })?;
            let coeff_psi = cfg.coeff_psi.as_ref().ok_or_else(|| {
                RunError::Config(ConfigError {
                    field: "coeff_psi".into(),
                    message: "missing required field".into(),
                })
            })?;
            let coeff_phi = cfg.coeff_phi.as_ref().ok_or_else(|| {
                RunError::Config(ConfigError {
                    field: "coeff_phi".into(),
                    message: "missing required field".into(),
                })
            })?;
            if coeff_psi.len() != coeff_phi.len() {
                return Err(RunError::Config(ConfigError {
                    field: "coeff_phi".into(),
                    message: "length must match coeff_psi".into(),
                }));
            }
            let ctx = MonomialCtx::new(scale, s0, max_order)?;
            let s_grid = cfg.s_points()?;
            Ok(check_generalized_series(
                coeff_psi,
                coeff_phi,
                &ctx,
                cfg.u0.unwrap_or(0),
                &s_grid,
                cfg.direction()?,
                &opts,
            )?)
        }
        other => Err(RunError::Config(ConfigError {
            field: "theorem".into(),
            message: format!(
                "unknown theorem id `{other}`; expected one of {THEOREM_IDS:?}"
            ),
        })),
    }
}

/// Full verify pipeline: parse, execute, report.
pub fn run_verify(cfg: ScenarioConfig) -> Result<VerifyReport, RunError> {
    let start = Instant::now();
    let mv = execute(&cfg)?;
    let wall = start.elapsed().as_secs_f64() * 1e3;
    Ok(VerifyReport::new(cfg, &mv, wall))
}
