//! Cross-module properties: integral laws, monomial agreement, ladder
//! ratio condition on the canonical scales, expression-layer round trips,
//! and direction duality of the quotient checkers.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use tscal::calculus::{self, integral, integral_fn, GridFn, IntegralKind};
use tscal::monomials::{h_closed_form, ClosedFormTag};
use tscal::monotonicity::{
    check_thm_variable_upper, CheckOptions, Direction, Verdict,
};
use tscal::timescale::Segment;
use tscal::{MonomialCtx, TimeScale};

fn random_hybrid_scale(rng: &mut ChaCha8Rng) -> TimeScale {
    loop {
        let n = rng.gen_range(1..=4);
        let mut cursor = rng.gen_range(0.0..2.0);
        let mut segments = Vec::new();
        for _ in 0..n {
            if rng.gen_bool(0.5) {
                let len = rng.gen_range(0.3..2.0);
                segments.push(Segment::Interval {
                    lo: cursor,
                    hi: cursor + len,
                });
                cursor += len + rng.gen_range(0.2..1.0);
            } else {
                segments.push(Segment::Point(cursor));
                cursor += rng.gen_range(0.2..1.0);
            }
        }
        let scale = TimeScale::from_segments(segments).unwrap();
        if scale.enumerate_grid(0.1).len() >= 4 {
            return scale;
        }
    }
}

fn random_poly(rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..=rng.gen_range(0..=5))
        .map(|_| rng.gen_range(-2.0..2.0))
        .collect()
}

fn poly_eval(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * t + k)
}

#[test]
fn integral_linearity_on_random_scales() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let scale = random_hybrid_scale(&mut rng);
        let (a, b) = (scale.min(), scale.max());
        let p = random_poly(&mut rng);
        let q = random_poly(&mut rng);
        let (c1, c2) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        for kind in [IntegralKind::Delta, IntegralKind::Nabla, IntegralKind::diamond(0.3)] {
            let lhs = integral_fn(
                kind,
                &scale,
                &|t| Ok(c1 * poly_eval(&p, t) + c2 * poly_eval(&q, t)),
                a,
                b,
            )
            .unwrap();
            let rhs = c1 * integral_fn(kind, &scale, &|t| Ok(poly_eval(&p, t)), a, b).unwrap()
                + c2 * integral_fn(kind, &scale, &|t| Ok(poly_eval(&q, t)), a, b).unwrap();
            assert!((lhs - rhs).abs() < 1e-9, "lhs={lhs} rhs={rhs}");
        }
    }
}

#[test]
fn integral_additivity_and_reversal() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..40 {
        let scale = random_hybrid_scale(&mut rng);
        let grid = scale.enumerate_grid(0.3);
        let mut picks: Vec<f64> = (0..3).map(|_| *grid.choose(&mut rng).unwrap()).collect();
        picks.sort_by(f64::total_cmp);
        let (a, b, c) = (picks[0], picks[1], picks[2]);
        let p = random_poly(&mut rng);
        let f = |t: f64| Ok(poly_eval(&p, t));
        for kind in [IntegralKind::Delta, IntegralKind::Nabla, IntegralKind::diamond(0.7)] {
            let whole = integral_fn(kind, &scale, &f, a, c).unwrap();
            let split = integral_fn(kind, &scale, &f, a, b).unwrap()
                + integral_fn(kind, &scale, &f, b, c).unwrap();
            assert!((whole - split).abs() < 1e-9);
            // orientation: reversed endpoints negate exactly
            let rev = integral_fn(kind, &scale, &f, c, a).unwrap();
            assert_eq!(whole, -rev);
        }
    }
}

#[test]
fn diamond_blend_is_bitwise_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..25 {
        let scale = random_hybrid_scale(&mut rng);
        let (a, b) = (scale.min(), scale.max());
        let p = random_poly(&mut rng);
        let f = |t: f64| Ok(poly_eval(&p, t));
        let alpha: f64 = rng.gen_range(0.0..=1.0);
        let blended = integral_fn(IntegralKind::diamond(alpha), &scale, &f, a, b).unwrap();
        let delta = integral_fn(IntegralKind::Delta, &scale, &f, a, b).unwrap();
        let nabla = integral_fn(IntegralKind::Nabla, &scale, &f, a, b).unwrap();
        assert_eq!(blended, alpha * delta + (1.0 - alpha) * nabla);
    }
}

#[test]
fn specialization_interval_and_discrete() {
    // on a pure interval all three kinds agree within quadrature noise
    let scale = TimeScale::reals(0.0, 2.0).unwrap();
    let f = GridFn::parse(scale, "exp(u) + u^3").unwrap();
    let d = integral(IntegralKind::Delta, &f, 0.0, 2.0).unwrap();
    let n = integral(IntegralKind::Nabla, &f, 0.0, 2.0).unwrap();
    let m = integral(IntegralKind::diamond(0.5), &f, 0.0, 2.0).unwrap();
    assert!((d - n).abs() < 2e-10);
    assert!((d - m).abs() < 2e-10);

    // on a pure discrete scale both match the exact left/right sums
    let scale = TimeScale::naturals(50);
    let f = GridFn::parse(scale.clone(), "u^2 - 3*u + 1").unwrap();
    let g = |t: f64| t * t - 3.0 * t + 1.0;
    let mut left = 0.0;
    let mut right = 0.0;
    for k in 0..50 {
        left += g(k as f64); // mu = 1
        right += g((k + 1) as f64);
    }
    assert_eq!(integral(IntegralKind::Delta, &f, 0.0, 50.0).unwrap(), left);
    assert_eq!(integral(IntegralKind::Nabla, &f, 0.0, 50.0).unwrap(), right);
}

#[test]
fn fundamental_relation_on_discrete_scales() {
    for scale in [TimeScale::naturals(20), TimeScale::q_powers(2.0, 8).unwrap()] {
        let a = scale.min();
        let sc = scale.clone();
        let f = |t: f64| t * t + 1.0;
        let big = GridFn::from_fn(scale.clone(), move |s| {
            integral_fn(IntegralKind::Delta, &sc, &|t| Ok(f(t)), a, s).unwrap()
        });
        for &t in scale.enumerate_grid(1.0).iter() {
            if t == scale.max() {
                continue; // Delta derivative undefined at an isolated max
            }
            let d = calculus::derivative(IntegralKind::Delta, &big, t).unwrap();
            assert!((d - f(t)).abs() < 1e-9 * f(t).abs().max(1.0), "t={t}");
        }
    }
}

#[test]
fn monomial_recursion_matches_closed_forms() {
    // continuous scale: within 1e-8
    let scale = TimeScale::reals(0.0, 5.0).unwrap();
    let ctx = MonomialCtx::new(scale.clone(), 0.0, 6).unwrap();
    let grid = scale.enumerate_grid(0.1);
    assert!(grid.len() >= 50);
    for m in 0..=6 {
        for &t in &grid {
            let r = ctx.h_recursive(m, t).unwrap();
            let c = h_closed_form(ClosedFormTag::Reals, m, t, 0.0).unwrap();
            assert!((r - c).abs() <= 1e-8, "m={m} t={t}: {r} vs {c}");
        }
    }

    // integer scale: exact
    let scale = TimeScale::naturals(50);
    let ctx = MonomialCtx::new(scale.clone(), 0.0, 6).unwrap();
    for m in 0..=6 {
        for k in 0..=50 {
            let t = k as f64;
            let r = ctx.h_recursive(m, t).unwrap();
            let c = h_closed_form(ClosedFormTag::Integers, m, t, 0.0).unwrap();
            assert!(
                (r - c).abs() <= 1e-12 * c.abs().max(1.0),
                "m={m} t={t}: {r} vs {c}"
            );
        }
    }

    // geometric scales: relative agreement (values grow like q^(m k))
    for q in [1.5, 2.0, 3.0] {
        let scale = TimeScale::q_powers(q, 50).unwrap();
        let ctx = MonomialCtx::new(scale.clone(), 1.0, 6).unwrap();
        for m in 0..=6 {
            for &t in scale.enumerate_grid(1.0).iter() {
                let r = ctx.h_recursive(m, t).unwrap();
                let c = h_closed_form(ClosedFormTag::QPowers { q }, m, t, 1.0).unwrap();
                assert!(
                    (r - c).abs() <= 1e-9 * c.abs().max(1.0),
                    "q={q} m={m} t={t}: {r} vs {c}"
                );
            }
        }
    }
}

#[test]
fn ladder_ratio_condition_on_canonical_scales() {
    // the cross-multiplied ratio margin stays nonnegative on all three
    // canonical scale families
    let mut cases: Vec<(TimeScale, f64)> = vec![
        (TimeScale::reals(0.0, 5.0).unwrap(), 0.0),
        (TimeScale::naturals(30), 0.0),
    ];
    for q in [1.5, 2.0, 3.0] {
        cases.push((TimeScale::q_powers(q, 20).unwrap(), 1.0));
    }
    for (scale, s0) in cases {
        let ctx = MonomialCtx::new(scale.clone(), s0, 8).unwrap();
        for m in 0..=6 {
            for &t in scale.enumerate_grid(0.1).iter().filter(|&&t| t > s0) {
                match ctx.con_margin(m, t) {
                    Ok(cm) => assert!(
                        cm.margin >= -1e-12,
                        "margin {} at m={m} t={t}",
                        cm.margin
                    ),
                    Err(tscal::TsError::DegenerateDenominator { .. }) => continue,
                    Err(e) => panic!("unexpected error: {e}"),
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Expression layer
// ---------------------------------------------------------------------------

mod exprs {
    use super::*;
    use tscal::exprlang::{self, Bindings, BinOp, Expression, Func, Var};

    fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expression {
        if depth == 0 || rng.gen_bool(0.3) {
            return match rng.gen_range(0..3) {
                0 => Expression::Lit(rng.gen_range(-3.0..3.0)),
                1 => Expression::Var(Var::U),
                _ => Expression::Var(Var::S),
            };
        }
        match rng.gen_range(0..7) {
            0 => Expression::Neg(Box::new(random_expr(rng, depth - 1))),
            1 => Expression::Bin(
                BinOp::Add,
                Box::new(random_expr(rng, depth - 1)),
                Box::new(random_expr(rng, depth - 1)),
            ),
            2 => Expression::Bin(
                BinOp::Sub,
                Box::new(random_expr(rng, depth - 1)),
                Box::new(random_expr(rng, depth - 1)),
            ),
            3 => Expression::Bin(
                BinOp::Mul,
                Box::new(random_expr(rng, depth - 1)),
                Box::new(random_expr(rng, depth - 1)),
            ),
            4 => Expression::Bin(
                BinOp::Div,
                Box::new(random_expr(rng, depth - 1)),
                Box::new(random_expr(rng, depth - 1)),
            ),
            5 => Expression::Bin(
                BinOp::Pow,
                Box::new(random_expr(rng, depth - 1)),
                Box::new(Expression::Lit(rng.gen_range(0..4) as f64)),
            ),
            _ => Expression::Call(
                match rng.gen_range(0..3) {
                    0 => Func::Exp,
                    1 => Func::Sqrt,
                    _ => Func::Abs,
                },
                Box::new(random_expr(rng, depth - 1)),
            ),
        }
    }

    #[test]
    fn print_parse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut checked = 0;
        while checked < 300 {
            let e = random_expr(&mut rng, 4);
            let printed = e.to_string();
            let reparsed = exprlang::parse(&printed)
                .unwrap_or_else(|err| panic!("failed to reparse {printed:?}: {err}"));
            let b = Bindings::us(rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0));
            match (exprlang::eval(&e, &b), exprlang::eval(&reparsed, &b)) {
                (Ok(x), Ok(y)) => {
                    assert_eq!(x.to_bits(), y.to_bits(), "{printed}");
                    checked += 1;
                }
                (Err(_), Err(_)) => {} // both hit the same domain edge
                (a, b) => panic!("round-trip changed outcome for {printed}: {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn symbolic_partial_matches_finite_differences() {
        // pool of smooth expressions in u and s, evaluated away from
        // domain boundaries
        let pool = [
            "s^2",
            "s^u",
            "exp(s*u)",
            "exp(-s*u)",
            "s*u + s^3",
            "log(s+2)",
            "sqrt(s+1)",
            "(u+1)*s^u",
            "1/(s+1)",
            "s^2*u - s/(u+1)",
            "exp(s)*log(s+1.5)",
            "pow(s, 3) + pow(u, 2)",
            "(s+u)^2",
            "s/(s+u+1)",
            "exp(-s*u^2)",
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut checked = 0;
        while checked < 500 {
            let src = pool[rng.gen_range(0..pool.len())];
            let e = exprlang::parse(src).unwrap();
            let d = exprlang::derive_s(&e).expect("pool expressions are differentiable");
            let u = rng.gen_range(0.2..3.0);
            let s = rng.gen_range(0.2..3.0);
            let b = Bindings::us(u, s);
            let exact = exprlang::eval(&d, &b).unwrap();
            let h = 1e-6 * s.abs().max(1.0);
            let hi = exprlang::eval(&e, &Bindings::us(u, s + h)).unwrap();
            let lo = exprlang::eval(&e, &Bindings::us(u, s - h)).unwrap();
            let fd = (hi - lo) / (2.0 * h);
            let denom = exact.abs().max(1.0);
            assert!(
                (exact - fd).abs() / denom < 1e-6,
                "{src} at u={u} s={s}: {exact} vs {fd}"
            );
            checked += 1;
        }
    }

    #[test]
    fn malformed_corpus_rejected_with_positions() {
        let corpus = [
            "", "   ", "+", "2 +", "* 3", "2 ** 3", "((1+2)", "1+2)", "u s",
            "2..5", "exp", "exp()", "exp(1,2)", "pow(1)", "unknown(3)", "t + 1",
            "1 & 2", "^2", "2^", "exp(", ")", "1 = 2", "--", "s!",
        ];
        assert!(corpus.len() >= 20);
        for src in corpus {
            match exprlang::parse(src) {
                Err(exprlang::ParseError::SyntaxError { position, .. }) => {
                    assert!(position <= src.len(), "{src:?}");
                }
                Err(exprlang::ParseError::UnknownIdentifier { position, .. }) => {
                    assert!(position < src.len().max(1), "{src:?}");
                }
                Ok(ast) => panic!("accepted malformed input {src:?} as {ast:?}"),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Checker-level dualities
// ---------------------------------------------------------------------------

#[test]
fn direction_duality_of_quotient_checker() {
    let scale = TimeScale::naturals(10);
    let psi = GridFn::parse(scale.clone(), "u^2").unwrap();
    let phi = GridFn::parse(scale, "u").unwrap();
    let opts = CheckOptions::default();
    let up = check_thm_variable_upper(
        IntegralKind::Delta,
        &psi,
        &phi,
        1.0,
        10.0,
        Direction::Increasing,
        &opts,
    )
    .unwrap();
    assert_eq!(up.verdict, Verdict::Verified);
    // swapping numerator and denominator inverts the quotient, which
    // reverses order on positives
    let down = check_thm_variable_upper(
        IntegralKind::Delta,
        &phi,
        &psi,
        1.0,
        10.0,
        Direction::Decreasing,
        &opts,
    )
    .unwrap();
    assert_eq!(down.verdict, Verdict::Verified);
    for (&(s1, q1), &(s2, q2)) in up.samples.iter().zip(&down.samples) {
        assert_eq!(s1, s2);
        assert!((q1 * q2 - 1.0).abs() < 1e-12);
    }
}

#[test]
fn diamond_endpoints_agree_with_pure_kinds() {
    let scale = TimeScale::from_segments(vec![
        Segment::Interval { lo: 0.0, hi: 1.0 },
        Segment::Point(1.5),
        Segment::Point(2.0),
    ])
    .unwrap();
    let psi = GridFn::parse(scale.clone(), "(u+1)^2").unwrap();
    let phi = GridFn::parse(scale, "u+1").unwrap();
    let opts = CheckOptions::default();
    let run = |kind| {
        check_thm_variable_upper(kind, &psi, &phi, 0.0, 2.0, Direction::Increasing, &opts)
            .unwrap()
            .verdict
    };
    assert_eq!(run(IntegralKind::diamond(1.0)), run(IntegralKind::Delta));
    assert_eq!(run(IntegralKind::diamond(0.0)), run(IntegralKind::Nabla));
    assert_eq!(run(IntegralKind::diamond(1.0)), Verdict::Verified);
}
