//! Counterexample search for the monomial ladder ratio condition on
//! random time scales. The three canonical families are always reported
//! as control rows; for random scales the tool reports minima and
//! witnesses without asserting an expected outcome.

use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use tscal::{MonomialCtx, TimeScale, TsError};

use crate::report::{ConRow, ConSearchReport, SCHEMA_VERSION};
use crate::scalegen::{random_hybrid_scale, random_q};

const TAU_ZERO: f64 = 1e-12;
const MAX_ORDER: usize = 8;

fn scan_scale(scale: TimeScale, label: String) -> ConRow {
    let s0 = scale.min();
    let ctx = MonomialCtx::new(scale.clone(), s0, MAX_ORDER)
        .expect("ladder construction is total on generated scales");
    let mut min = (f64::INFINITY, 0usize, s0);
    for m in 0..=MAX_ORDER - 2 {
        for &t in scale.grid_in(0.1, s0, scale.max()).iter().filter(|&&t| t > s0) {
            match ctx.con_margin(m, t) {
                Ok(cm) => {
                    if cm.margin < min.0 {
                        min = (cm.margin, m, t);
                    }
                }
                Err(TsError::DegenerateDenominator { .. }) => continue,
                Err(e) => panic!("unexpected ladder error: {e}"),
            }
        }
    }
    ConRow {
        scale: label,
        min_margin: min.0,
        witness_order: min.1,
        witness_point: min.2,
        violation: min.0 < -TAU_ZERO,
    }
}

fn control_rows() -> Vec<ConRow> {
    vec![
        scan_scale(TimeScale::reals(0.0, 5.0).unwrap(), "reals [0,5]".into()),
        scan_scale(TimeScale::naturals(30), "naturals <=30".into()),
        scan_scale(
            TimeScale::q_powers(2.0, 15).unwrap(),
            "qpowers q=2 n_max=15".into(),
        ),
    ]
}

fn describe(scale: &TimeScale) -> String {
    use tscal::timescale::Segment;
    let parts: Vec<String> = scale
        .segments()
        .iter()
        .map(|s| match s {
            Segment::Interval { lo, hi } => format!("[{lo:.4},{hi:.4}]"),
            Segment::Point(p) => format!("{{{p:.4}}}"),
        })
        .collect();
    parts.join(" u ")
}

pub fn run_con_search(
    generator: &str,
    trials: u64,
    seed: u64,
) -> Result<ConSearchReport, String> {
    if trials == 0 {
        return Err("trials must be >= 1".into());
    }
    if !matches!(
        generator,
        "canonical-reals" | "canonical-q" | "random-q" | "random-hybrid"
    ) {
        return Err(format!(
            "unknown generator `{generator}`; expected canonical-reals, canonical-q, random-q, or random-hybrid"
        ));
    }
    let start = Instant::now();
    let rows: Vec<ConRow> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            match generator {
                "canonical-reals" => {
                    let b = rng.gen_range(1.0..10.0);
                    let scale = TimeScale::reals(0.0, b).unwrap();
                    let label = describe(&scale);
                    scan_scale(scale, label)
                }
                "canonical-q" => {
                    let q = [1.5, 2.0, 3.0][rng.gen_range(0..3)];
                    let scale = TimeScale::q_powers(q, 12).unwrap();
                    scan_scale(scale, format!("qpowers q={q} n_max=12"))
                }
                "random-q" => {
                    let q = random_q(&mut rng);
                    let scale = TimeScale::q_powers(q, 12).unwrap();
                    scan_scale(scale, format!("qpowers q={q:.4} n_max=12"))
                }
                _ => {
                    let scale = random_hybrid_scale(&mut rng);
                    let label = describe(&scale);
                    scan_scale(scale, label)
                }
            }
        })
        .collect();
    let violations = rows.iter().filter(|r| r.violation).count() as u64;
    Ok(ConSearchReport {
        schema: SCHEMA_VERSION,
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        generator: generator.to_string(),
        trials,
        seed,
        controls: control_rows(),
        rows,
        violations,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
