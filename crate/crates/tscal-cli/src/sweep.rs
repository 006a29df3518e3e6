//! Randomized instance generators and sweeps for every theorem family.
//!
//! Soundness mode generates hypothesis-satisfying instances and expects
//! every verdict to be Verified. Falsify mode inverts exactly one
//! hypothesis per instance and expects the checkers to catch it.

use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use tscal::calculus::{integral_fn, GridFn, IntegralKind};
use tscal::exprlang::{self, Bindings};
use tscal::monotonicity::{
    check_case2, check_generalized_series, check_parametric_quotient, check_power_kernel,
    check_product_quotient, check_thm_damped, check_thm_two_dampers, check_thm_variable_upper,
    CheckOptions, Direction, Kernel2, MonotoneVerdict, ParamFn, ProductFactor, Strictness,
};
use tscal::{MonomialCtx, Result as TsResult, TimeScale};

use crate::report::{SweepReport, SweepTrial, VerdictRecord, SCHEMA_VERSION};
use crate::scalegen::random_hybrid_scale;

pub const SWEEP_FAMILIES: &[&str] = &[
    "thm1-1", "nabla1-1", "diamond", "thm1-2", "nabla1-2", "thm1-3", "c1",
    "thm2-1", "thm2-3", "thm2-4", "thm2-5", "thm2-6",
];

/// Coarser grid than the scenario default: sweep instances only need
/// enough samples to expose a wrong verdict, and they run by the hundreds.
const SWEEP_RESOLUTION: f64 = 0.2;

fn sweep_opts(force_sample: bool) -> CheckOptions {
    CheckOptions {
        tol_mono: 1e-9,
        resolution: SWEEP_RESOLUTION,
        strictness: Strictness::Weak,
        force_sample,
    }
}

fn random_direction(rng: &mut ChaCha8Rng) -> Direction {
    if rng.gen_bool(0.5) {
        Direction::Increasing
    } else {
        Direction::Decreasing
    }
}

/// Positive affine denominator function on [0, 10].
fn gen_phi(rng: &mut ChaCha8Rng) -> String {
    let c: f64 = rng.gen_range(0.3..2.0);
    let d: f64 = rng.gen_range(0.0..0.3);
    format!("({c} + {d}*u)")
}

/// Positive affine function strictly monotone in `dir` on [0, 10].
fn gen_monotone_positive(rng: &mut ChaCha8Rng, dir: Direction) -> String {
    match dir {
        Direction::Increasing => {
            let c: f64 = rng.gen_range(0.3..2.0);
            let d: f64 = rng.gen_range(0.05..0.3);
            format!("({c} + {d}*u)")
        }
        Direction::Decreasing => {
            let c: f64 = rng.gen_range(2.0..4.0);
            let d: f64 = rng.gen_range(0.02..(c - 0.3) / 10.0);
            format!("({c} - {d}*u)")
        }
    }
}

/// Ratio factor strictly monotone in `dir`, staying positive on [0, 10];
/// increasing ratios start at or above 1, decreasing ones at or below 1
/// (so the damped-quotient anchor condition also holds).
fn gen_ratio(rng: &mut ChaCha8Rng, dir: Direction) -> String {
    match dir {
        Direction::Increasing => {
            let r0: f64 = rng.gen_range(1.0..2.0);
            let r1: f64 = rng.gen_range(0.05..0.3);
            format!("({r0} + {r1}*u)")
        }
        Direction::Decreasing => {
            let r0: f64 = rng.gen_range(0.6..0.95);
            let r1: f64 = rng.gen_range(0.01..(r0 - 0.2) / 10.0);
            format!("({r0} - {r1}*u)")
        }
    }
}

fn ascending_s_grid(rng: &mut ChaCha8Rng, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    while v.len() < 2 {
        v.push(v.last().copied().unwrap_or(lo) + 0.01);
    }
    v
}

/// Weighted mix w*F + (1-w)*G of two running integrals, with the exact
/// derivative w*psi + (1-w)*phi.
fn mixture_damper(
    scale: &TimeScale,
    psi_src: &str,
    phi_src: &str,
    a: f64,
    w: f64,
) -> TsResult<GridFn> {
    let psi = exprlang::parse(psi_src).unwrap();
    let phi = exprlang::parse(phi_src).unwrap();
    let sc = scale.clone();
    let (p1, p2) = (psi.clone(), phi.clone());
    let f = move |u: f64| -> f64 {
        let int = |e: &exprlang::Expression| {
            integral_fn(IntegralKind::Delta, &sc, &|t| {
                exprlang::eval(e, &Bindings::u(t)).map_err(|err| tscal::TsError::Expr {
                    slot: "sweep damper".into(),
                    msg: err.to_string(),
                })
            }, a, u)
            .expect("sweep integrands are total")
        };
        w * int(&p1) + (1.0 - w) * int(&p2)
    };
    let df = move |u: f64| -> f64 {
        let ev = |e: &exprlang::Expression| {
            exprlang::eval(e, &Bindings::u(u)).expect("sweep integrands are total")
        };
        w * ev(&psi) + (1.0 - w) * ev(&phi)
    };
    Ok(GridFn::from_fn_with_derivative(scale.clone(), f, df))
}

/// Generate and check one randomized trial for the named family.
pub fn run_trial(
    family: &str,
    rng: &mut ChaCha8Rng,
    falsify: bool,
    force_sample: bool,
) -> TsResult<MonotoneVerdict> {
    let opts = sweep_opts(force_sample);
    match family {
        "thm1-1" | "nabla1-1" | "diamond" => {
            let scale = random_hybrid_scale(rng);
            let dir = random_direction(rng);
            let phi_src = if family == "diamond" {
                gen_monotone_positive(rng, dir)
            } else {
                gen_phi(rng)
            };
            let ratio_dir = if falsify { dir.flipped() } else { dir };
            let psi_src = format!("{}*{}", gen_ratio(rng, ratio_dir), phi_src);
            let psi = GridFn::parse(scale.clone(), &psi_src)?;
            let phi = GridFn::parse(scale.clone(), &phi_src)?;
            let kind = match family {
                "nabla1-1" => IntegralKind::Nabla,
                "diamond" => IntegralKind::diamond(rng.gen_range(0.0..=1.0)),
                _ => IntegralKind::Delta,
            };
            check_thm_variable_upper(kind, &psi, &phi, scale.min(), scale.max(), dir, &opts)
        }
        "thm1-2" | "nabla1-2" => {
            let scale = random_hybrid_scale(rng);
            let dir = random_direction(rng);
            let phi_src = gen_phi(rng);
            let psi_src = format!("{}*{}", gen_ratio(rng, dir), phi_src);
            let t0: f64 = rng.gen_range(0.1..2.0);
            let t1: f64 = rng.gen_range(0.1..1.0);
            // falsify: the damper grows instead of decaying
            let damper_src = if falsify {
                format!("{t0}*exp({t1}*u)")
            } else {
                format!("{t0}*exp(-{t1}*u)")
            };
            let psi = GridFn::parse(scale.clone(), &psi_src)?;
            let phi = GridFn::parse(scale.clone(), &phi_src)?;
            let damper = GridFn::parse(scale.clone(), &damper_src)?;
            let kind = if family == "nabla1-2" {
                IntegralKind::Nabla
            } else {
                IntegralKind::Delta
            };
            check_thm_damped(kind, &psi, &phi, &damper, scale.min(), scale.max(), dir, &opts)
        }
        "thm1-3" => {
            let scale = random_hybrid_scale(rng);
            let dir = random_direction(rng);
            let phi_src = gen_phi(rng);
            let psi_src = format!("{}*{}", gen_ratio(rng, dir), phi_src);
            let a = scale.min();
            // weighted mixes of the running integrals keep the
            // log-derivative chain ordered iff w1 >= w2
            let (w1, w2) = if falsify {
                (rng.gen_range(0.0..0.2), rng.gen_range(0.8..1.0))
            } else {
                let x: f64 = rng.gen_range(0.0..1.0);
                let y: f64 = rng.gen_range(0.0..1.0);
                (x.max(y), x.min(y))
            };
            let t1 = mixture_damper(&scale, &psi_src, &phi_src, a, w1)?;
            let t2 = mixture_damper(&scale, &psi_src, &phi_src, a, w2)?;
            let psi = GridFn::parse(scale.clone(), &psi_src)?;
            let phi = GridFn::parse(scale.clone(), &phi_src)?;
            check_thm_two_dampers(
                IntegralKind::Delta,
                &psi,
                &phi,
                &t1,
                &t2,
                a,
                scale.max(),
                dir,
                &opts,
            )
        }
        "c1" => {
            let scale = random_hybrid_scale(rng);
            let dir = random_direction(rng);
            let ratio_dir = if falsify { dir.flipped() } else { dir };
            let psi_k = Kernel2::parse(&format!("{}*s^u", gen_ratio(rng, ratio_dir)))?;
            let phi_k = Kernel2::parse("s^u")?;
            let s_grid = ascending_s_grid(rng, 0.05, 0.95, 6);
            let damper = if !falsify && rng.gen_bool(0.5) {
                let t0: f64 = rng.gen_range(0.1..2.0);
                let t1: f64 = rng.gen_range(0.1..1.0);
                Some(ParamFn::parse(&format!("{t0}*exp(-{t1}*s)"))?)
            } else {
                None
            };
            check_parametric_quotient(
                &psi_k,
                &phi_k,
                &scale,
                scale.min(),
                scale.max(),
                &s_grid,
                dir,
                damper.as_ref(),
                &opts,
            )
        }
        "thm2-1" => {
            let scale = random_hybrid_scale(rng);
            let dir = random_direction(rng);
            let ratio_dir = if falsify { dir.flipped() } else { dir };
            let phi_src = gen_phi(rng);
            let psi_src = format!("{}*{}", gen_ratio(rng, ratio_dir), phi_src);
            let psi = GridFn::parse(scale.clone(), &psi_src)?;
            let phi = GridFn::parse(scale.clone(), &phi_src)?;
            let s_grid = ascending_s_grid(rng, 0.05, 0.95, 6);
            check_power_kernel(
                &psi,
                &phi,
                &scale,
                scale.min(),
                scale.max(),
                &s_grid,
                dir,
                &opts,
            )
        }
        "thm2-3" | "thm2-5" => {
            let dir = random_direction(rng);
            let n = rng.gen_range(1..=3);
            let mut factors = Vec::with_capacity(n);
            for l in 0..n {
                let scale = random_hybrid_scale(rng);
                let ratio_dir = if falsify && l == 0 { dir.flipped() } else { dir };
                let phi_src = gen_phi(rng);
                let psi_src = format!("{}*{}", gen_ratio(rng, ratio_dir), phi_src);
                let kernel = if family == "thm2-3" {
                    Kernel2::power()
                } else {
                    // general kernel: log-partial c*u must grow with u for
                    // the claimed direction to follow from the ratio
                    let c: f64 = rng.gen_range(0.05..0.4);
                    if falsify && l == 0 {
                        Kernel2::parse(&format!("exp(-{c}*s*u)"))?
                    } else {
                        Kernel2::parse(&format!("exp({c}*s*u)"))?
                    }
                };
                // in thm2-5 falsify mode the inverted hypothesis is the
                // kernel condition, so keep the ratio valid there
                let psi_src = if family == "thm2-5" && falsify && l == 0 {
                    format!("{}*{}", gen_ratio(rng, dir), phi_src)
                } else {
                    psi_src
                };
                let (a, b) = (scale.min(), scale.max());
                factors.push(ProductFactor {
                    psi: GridFn::parse(scale.clone(), &psi_src)?,
                    phi: GridFn::parse(scale.clone(), &phi_src)?,
                    scale,
                    kernel,
                    a,
                    b,
                });
            }
            let s_grid = ascending_s_grid(rng, 0.05, 0.95, 6);
            check_product_quotient(&factors, &s_grid, dir, &opts)
        }
        "thm2-4" => {
            let scale = random_hybrid_scale(rng);
            let ratio_dir = random_direction(rng);
            let b = scale.max();
            let phi_src = if falsify {
                // invert positivity: the denominator function dips negative
                let c: f64 = rng.gen_range(0.5..1.5);
                let d = (c + 0.3) / b.max(0.5);
                format!("({c} - {d}*u)")
            } else {
                gen_phi(rng)
            };
            let psi_src = format!("{}*{}", gen_ratio(rng, ratio_dir), phi_src);
            let c: f64 = rng.gen_range(0.05..0.4);
            let kernel = if rng.gen_bool(0.5) {
                Kernel2::parse(&format!("exp({c}*s*u)"))?
            } else {
                Kernel2::parse(&format!("exp(-{c}*s*u)"))?
            };
            let psi = GridFn::parse(scale.clone(), &psi_src)?;
            let phi = GridFn::parse(scale.clone(), &phi_src)?;
            let s_grid = ascending_s_grid(rng, 0.1, 0.9, 5);
            check_case2(&psi, &phi, &kernel, &scale, scale.min(), b, &s_grid, &opts)
        }
        "thm2-6" => {
            let dir = random_direction(rng);
            let ratio_dir = if falsify { dir.flipped() } else { dir };
            let (scale, s0, s_grid): (TimeScale, f64, Vec<f64>) = match rng.gen_range(0..3) {
                0 => (
                    TimeScale::reals(0.0, 3.0).unwrap(),
                    0.0,
                    vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
                ),
                1 => (
                    TimeScale::naturals(12),
                    0.0,
                    (1..=8).map(|k| k as f64).collect(),
                ),
                _ => (
                    TimeScale::q_powers(2.0, 6).unwrap(),
                    1.0,
                    vec![2.0, 4.0, 8.0, 16.0],
                ),
            };
            let u0 = rng.gen_range(0..=1usize);
            let len = 3;
            let coeff_phi: Vec<f64> = (0..len).map(|_| rng.gen_range(0.5..2.0)).collect();
            let mut rho: f64 = rng.gen_range(0.5..1.0);
            let step: f64 = rng.gen_range(0.05..0.3);
            let mut coeff_psi = Vec::with_capacity(len);
            for &c in &coeff_phi {
                coeff_psi.push(rho * c);
                match ratio_dir {
                    Direction::Increasing => rho += step,
                    Direction::Decreasing => rho = (rho - step).max(0.05),
                }
            }
            let ctx = MonomialCtx::new(scale, s0, u0 + 4)?;
            check_generalized_series(&coeff_psi, &coeff_phi, &ctx, u0, &s_grid, dir, &opts)
        }
        other => Err(tscal::TsError::Expr {
            slot: "theorem".into(),
            msg: format!("unknown sweep family `{other}`"),
        }),
    }
}

fn trial_seed(seed: u64, index: u64) -> u64 {
    // splitmix-style mix keeps per-trial streams independent
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub struct SweepOutcome {
    pub report: SweepReport,
    pub exit_code: i32,
}

pub fn run_sweep(
    family: &str,
    trials: u64,
    seed: u64,
    falsify: bool,
    force_sample: bool,
) -> Result<SweepOutcome, String> {
    if trials == 0 {
        return Err("trials must be >= 1".into());
    }
    if !SWEEP_FAMILIES.contains(&family) {
        return Err(format!(
            "unknown theorem family `{family}`; expected one of {SWEEP_FAMILIES:?}"
        ));
    }
    let start = Instant::now();
    let mut detail: Vec<(u64, SweepTrial, bool)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, i));
            let mv = run_trial(family, &mut rng, falsify, force_sample)
                .unwrap_or_else(|e| panic!("trial {i} of {family} failed: {e}"));
            let detected = mv.failed_condition().is_some();
            (
                i,
                SweepTrial {
                    trial: i,
                    verdict: (&mv.verdict).into(),
                },
                detected,
            )
        })
        .collect();
    detail.sort_by_key(|(i, _, _)| *i);

    let mut verified = 0;
    let mut violated = 0;
    let mut hypothesis_failed = 0;
    let mut detected_count = 0u64;
    for (_, t, detected) in &detail {
        match t.verdict {
            VerdictRecord::Verified => verified += 1,
            VerdictRecord::ViolatedAt { .. } => violated += 1,
            VerdictRecord::HypothesisFailed { .. } => hypothesis_failed += 1,
        }
        if *detected {
            detected_count += 1;
        }
    }
    let exit_code = if falsify {
        // success means every inverted trial was caught by a margin
        if detected_count == trials {
            0
        } else {
            1
        }
    } else if verified == trials {
        0
    } else {
        1
    };
    let report = SweepReport {
        schema: SCHEMA_VERSION,
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        theorem: family.to_string(),
        trials,
        seed,
        falsify,
        verified,
        violated,
        hypothesis_failed,
        trials_detail: detail.into_iter().map(|(_, t, _)| t).collect(),
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok(SweepOutcome { report, exit_code })
}
