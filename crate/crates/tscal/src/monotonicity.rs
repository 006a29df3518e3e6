//! Quotient constructions, hypothesis checkers, and monotonicity verdicts.
//!
//! Each checker mirrors one quotient-of-integrals rule: it evaluates the
//! rule's hypotheses as signed margins on a sampling grid, then samples the
//! quotient and tests the claimed direction step by step. Hypothesis
//! failures normally short-circuit; `force_sample` samples anyway so that
//! non-vacuousness sweeps can observe actual violations.

use std::sync::Arc;

use crate::calculus::{self, integral, integral_fn, GridFn, IntegralKind, H_FD};
use crate::error::{Result, TsError};
use crate::exprlang::{self, Bindings, Expression, Var};
use crate::monomials::{MonomialCtx, TAU_ZERO};
use crate::timescale::{close, TimeScale};

/// Default tolerance on consecutive-sample differences.
pub const TOL_MONO: f64 = 1e-9;
/// Default grid resolution for hypothesis checks and quotient sampling.
pub const DEFAULT_RESOLUTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    /// Signed step: positive when the step agrees with the direction.
    fn signed(self, delta: f64) -> f64 {
        match self {
            Direction::Increasing => delta,
            Direction::Decreasing => -delta,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Direction::Increasing => Direction::Decreasing,
            Direction::Decreasing => Direction::Increasing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    #[default]
    Weak,
    Strict,
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub tol_mono: f64,
    pub resolution: f64,
    pub strictness: Strictness,
    pub force_sample: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            tol_mono: TOL_MONO,
            resolution: DEFAULT_RESOLUTION,
            strictness: Strictness::Weak,
            force_sample: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisMargin {
    pub id: String,
    pub worst_margin: f64,
    pub worst_location: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Verified,
    ViolatedAt { s_left: f64, s_right: f64 },
    HypothesisFailed { condition: String },
}

/// Per-theorem result: hypothesis margins, the sampled quotient, and the
/// direction verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneVerdict {
    pub direction_claimed: Direction,
    pub hypothesis_margins: Vec<HypothesisMargin>,
    pub samples: Vec<(f64, f64)>,
    pub verdict: Verdict,
    pub tol_mono: f64,
    /// Whether `partial_s` values came from symbolic derivatives.
    pub analytic_partials: bool,
}

impl MonotoneVerdict {
    pub fn failed_condition(&self) -> Option<&str> {
        self.hypothesis_margins
            .iter()
            .find(|m| !m.passed)
            .map(|m| m.id.as_str())
    }
}

/// Step-by-step monotonicity of an ordered sample sequence.
pub fn verify_monotone(
    samples: &[(f64, f64)],
    direction: Direction,
    strictness: Strictness,
    tol: f64,
) -> Result<Verdict> {
    if samples.len() < 2 {
        return Err(TsError::TooFewSamples);
    }
    let mut any_strict = false;
    for w in samples.windows(2) {
        let signed = direction.signed(w[1].1 - w[0].1);
        if signed < -tol {
            return Ok(Verdict::ViolatedAt {
                s_left: w[0].0,
                s_right: w[1].0,
            });
        }
        if signed > tol {
            any_strict = true;
        }
    }
    if strictness == Strictness::Strict && !any_strict {
        // flat sequence cannot be strictly monotone
        return Ok(Verdict::ViolatedAt {
            s_left: samples[0].0,
            s_right: samples[1].0,
        });
    }
    Ok(Verdict::Verified)
}

/// Worst signed consecutive-difference margin of a sampled function.
fn monotone_margin(points: &[(f64, f64)], direction: Direction) -> (f64, f64) {
    let mut worst = (f64::INFINITY, points.first().map(|p| p.0).unwrap_or(0.0));
    for w in points.windows(2) {
        let signed = direction.signed(w[1].1 - w[0].1);
        if signed < worst.0 {
            worst = (signed, w[0].0);
        }
    }
    worst
}

fn margin(id: &str, worst: f64, at: f64, tol: f64) -> HypothesisMargin {
    HypothesisMargin {
        id: id.into(),
        worst_margin: worst,
        worst_location: at,
        passed: worst >= -tol,
    }
}

fn positivity_hypothesis(id: &str, f: &GridFn, grid: &[f64]) -> Result<HypothesisMargin> {
    let mut worst = (f64::INFINITY, grid.first().copied().unwrap_or(0.0));
    for &t in grid {
        let v = f.eval(t)?;
        if v < worst.0 {
            worst = (v, t);
        }
    }
    Ok(HypothesisMargin {
        id: id.into(),
        worst_margin: worst.0,
        worst_location: worst.1,
        passed: worst.0 > 0.0,
    })
}

fn ratio_points(psi: &GridFn, phi: &GridFn, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    grid.iter()
        .map(|&t| {
            let denom = phi.eval(t)?;
            if denom == 0.0 {
                return Err(TsError::DegenerateDenominator {
                    at: t,
                    tol: 0.0,
                });
            }
            Ok((t, psi.eval(t)? / denom))
        })
        .collect()
}

fn finish(
    direction: Direction,
    margins: Vec<HypothesisMargin>,
    samples: Vec<(f64, f64)>,
    opts: &CheckOptions,
    analytic_partials: bool,
) -> Result<MonotoneVerdict> {
    let failed = margins.iter().find(|m| !m.passed).map(|m| m.id.clone());
    let verdict = match failed {
        Some(condition) if !opts.force_sample => Verdict::HypothesisFailed { condition },
        _ => verify_monotone(&samples, direction, opts.strictness, opts.tol_mono)?,
    };
    Ok(MonotoneVerdict {
        direction_claimed: direction,
        hypothesis_margins: margins,
        samples,
        verdict,
        tol_mono: opts.tol_mono,
        analytic_partials,
    })
}

fn sample_grid(scale: &TimeScale, resolution: f64, a: f64, b: f64) -> Vec<f64> {
    // sampling points s in (a, b]
    scale
        .grid_in(resolution, a, b)
        .into_iter()
        .filter(|&t| t > a && !close(t, a))
        .collect()
}

// ---------------------------------------------------------------------------
// Variable-upper-limit quotients (Delta / Nabla / Diamond-Alpha)
// ---------------------------------------------------------------------------

/// `integral(kind, psi, a, s) / integral(kind, phi, a, s)`.
pub fn quotient_variable_upper(
    kind: IntegralKind,
    psi: &GridFn,
    phi: &GridFn,
    a: f64,
    s: f64,
) -> Result<f64> {
    if close(a, s) {
        return Err(TsError::EmptyRange);
    }
    let denom = integral(kind, phi, a, s)?;
    if denom <= 0.0 {
        return Err(TsError::PositivityViolated {
            name: "integral of phi".into(),
            worst: denom,
            at: s,
        });
    }
    Ok(integral(kind, psi, a, s)? / denom)
}

/// Variable-upper-limit rule: positivity of `phi`, monotonicity of
/// `psi/phi`, and (for Diamond-Alpha) monotonicity of `phi` itself,
/// then the sampled quotient.
pub fn check_thm_variable_upper(
    kind: IntegralKind,
    psi: &GridFn,
    phi: &GridFn,
    a: f64,
    b: f64,
    direction: Direction,
    opts: &CheckOptions,
) -> Result<MonotoneVerdict> {
    let scale = phi.domain();
    let grid = scale.grid_in(opts.resolution, a, b);
    let mut margins = vec![positivity_hypothesis("H1", phi, &grid)?];
    let ratio = ratio_points(psi, phi, &grid)?;
    let (w, at) = monotone_margin(&ratio, direction);
    margins.push(margin("H2", w, at, opts.tol_mono));
    if matches!(kind, IntegralKind::DiamondAlpha { .. }) {
        let phi_pts: Vec<(f64, f64)> = grid
            .iter()
            .map(|&t| Ok((t, phi.eval(t)?)))
            .collect::<Result<_>>()?;
        let (w, at) = monotone_margin(&phi_pts, direction);
        margins.push(margin("H3", w, at, opts.tol_mono));
    }

    let mut samples = Vec::new();
    if margins.iter().all(|m| m.passed) || opts.force_sample {
        for s in sample_grid(scale, opts.resolution, a, b) {
            samples.push((s, quotient_variable_upper(kind, psi, phi, a, s)?));
        }
    }
    finish(direction, margins, samples, opts, true)
}

/// A nonnegative decreasing damper `T`, or a positive pair `(T1, T2)`.
#[derive(Debug, Clone)]
pub enum DamperFn {
    Single(GridFn),
    Pair(GridFn, GridFn),
}

/// `(T(s) + integral psi) / (T(s) + integral phi)`.
pub fn quotient_damped(
    kind: IntegralKind,
    psi: &GridFn,
    phi: &GridFn,
    damper: &GridFn,
    a: f64,
    s: f64,
) -> Result<f64> {
    let t = damper.eval(s)?;
    let denom = t + integral(kind, phi, a, s)?;
    if denom <= 0.0 {
        return Err(TsError::PositivityViolated {
            name: "damped denominator".into(),
            worst: denom,
            at: s,
        });
    }
    Ok((t + integral(kind, psi, a, s)?) / denom)
}

/// Worst `-derivative(kind, T, .)` margin over grid points where the
/// derivative exists; positive means `T` is non-increasing there.
fn damper_decreasing_margin(
    kind: IntegralKind,
    damper: &GridFn,
    grid: &[f64],
) -> Result<(f64, f64)> {
    let mut worst = (f64::INFINITY, grid.first().copied().unwrap_or(0.0));
    for &t in grid {
        match calculus::derivative(kind, damper, t) {
            Ok(d) => {
                if -d < worst.0 {
                    worst = (-d, t);
                }
            }
            Err(TsError::NotDifferentiableHere(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(worst)
}

/// Additively damped rule: the variable-upper hypotheses plus
/// `psi(a)/phi(a)` on the right side of 1 and `T` nonnegative decreasing.
pub fn check_thm_damped(
    kind: IntegralKind,
    psi: &GridFn,
    phi: &GridFn,
    damper: &GridFn,
    a: f64,
    b: f64,
    direction: Direction,
    opts: &CheckOptions,
) -> Result<MonotoneVerdict> {
    let scale = phi.domain();
    let grid = scale.grid_in(opts.resolution, a, b);
    let mut margins = vec![positivity_hypothesis("H1", phi, &grid)?];
    let ratio = ratio_points(psi, phi, &grid)?;
    let (w, at) = monotone_margin(&ratio, direction);
    margins.push(margin("H2", w, at, opts.tol_mono));
    // psi(a)/phi(a) >= 1 for increasing, <= 1 for decreasing
    let r_a = psi.eval(a)? / phi.eval(a)?;
    margins.push(margin("H3", direction.signed(r_a - 1.0), a, opts.tol_mono));
    let mut t_min = (f64::INFINITY, a);
    for &t in &grid {
        let v = damper.eval(t)?;
        if v < t_min.0 {
            t_min = (v, t);
        }
    }
    margins.push(margin("H4", t_min.0, t_min.1, opts.tol_mono));
    let (w, at) = damper_decreasing_margin(kind, damper, &grid)?;
    margins.push(margin("H5", w, at, opts.tol_mono));

    let mut samples = Vec::new();
    if margins.iter().all(|m| m.passed) || opts.force_sample {
        for s in sample_grid(scale, opts.resolution, a, b) {
            samples.push((s, quotient_damped(kind, psi, phi, damper, a, s)?));
        }
    }
    finish(direction, margins, samples, opts, true)
}

/// Two-damper rule: the log-derivative chain
/// `psi/int psi >= T1'/T1 >= T2'/T2 >= phi/int phi` (reversed for the
/// decreasing case), checked link by link on the grid.
pub fn check_thm_two_dampers(
    kind: IntegralKind,
    psi: &GridFn,
    phi: &GridFn,
    t1: &GridFn,
    t2: &GridFn,
    a: f64,
    b: f64,
    direction: Direction,
    opts: &CheckOptions,
) -> Result<MonotoneVerdict> {
    let scale = phi.domain();
    let grid = scale.grid_in(opts.resolution, a, b);
    let inner: Vec<f64> = grid.iter().copied().filter(|&t| t > a && !close(t, a)).collect();

    let mut margins = vec![positivity_hypothesis("H1", phi, &grid)?];
    let ratio = ratio_points(psi, phi, &grid)?;
    let (w, at) = monotone_margin(&ratio, direction);
    margins.push(margin("H2", w, at, opts.tol_mono));
    margins.push(positivity_hypothesis("H-T1>0", t1, &inner)?);
    margins.push(positivity_hypothesis("H-T2>0", t2, &inner)?);

    // chain links evaluated wherever the damper derivatives exist
    let mut chain = [
        (f64::INFINITY, a),
        (f64::INFINITY, a),
        (f64::INFINITY, a),
    ];
    for &s in &inner {
        let d1 = match calculus::derivative(kind, t1, s) {
            Ok(d) => d,
            Err(TsError::NotDifferentiableHere(_)) => continue,
            Err(e) => return Err(e),
        };
        let d2 = match calculus::derivative(kind, t2, s) {
            Ok(d) => d,
            Err(TsError::NotDifferentiableHere(_)) => continue,
            Err(e) => return Err(e),
        };
        let int_psi = integral(kind, psi, a, s)?;
        let int_phi = integral(kind, phi, a, s)?;
        if int_psi.abs() <= TAU_ZERO || int_phi.abs() <= TAU_ZERO {
            continue;
        }
        let links = [
            psi.eval(s)? / int_psi - d1 / t1.eval(s)?,
            d1 / t1.eval(s)? - d2 / t2.eval(s)?,
            d2 / t2.eval(s)? - phi.eval(s)? / int_phi,
        ];
        for (slot, link) in chain.iter_mut().zip(links) {
            let signed = direction.signed(link);
            if signed < slot.0 {
                *slot = (signed, s);
            }
        }
    }
    for (i, &(w, at)) in chain.iter().enumerate() {
        margins.push(margin(&format!("H-chain-{}", i + 1), w, at, opts.tol_mono));
    }

    let mut samples = Vec::new();
    if margins.iter().all(|m| m.passed) || opts.force_sample {
        for s in sample_grid(scale, opts.resolution, a, b) {
            let denom = t2.eval(s)? + integral(kind, phi, a, s)?;
            if denom <= 0.0 {
                return Err(TsError::PositivityViolated {
                    name: "two-damper denominator".into(),
                    worst: denom,
                    at: s,
                });
            }
            samples.push((s, (t1.eval(s)? + integral(kind, psi, a, s)?) / denom));
        }
    }
    finish(direction, margins, samples, opts, true)
}

// ---------------------------------------------------------------------------
// Parameterized kernels (fixed limits, parameter s)
// ---------------------------------------------------------------------------

type DynKernel = Arc<dyn Fn(f64, f64) -> Result<f64> + Send + Sync>;

/// A two-variable kernel `(s, u) -> R+` with an `s`-partial that is
/// analytic when the expression tree supports it.
#[derive(Clone)]
pub struct Kernel2 {
    eval: DynKernel,
    partial: DynKernel,
    analytic: bool,
    power: bool,
}

impl std::fmt::Debug for Kernel2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Kernel2(analytic_partial: {})", self.analytic)
    }
}

impl Kernel2 {
    pub fn from_expr(expr: Expression) -> Self {
        let analytic = exprlang::derive_s(&expr);
        let eval_expr = expr.clone();
        let eval: DynKernel = Arc::new(move |s, u| {
            exprlang::eval(&eval_expr, &Bindings::us(u, s)).map_err(|e| TsError::Expr {
                slot: "kernel".into(),
                msg: e.to_string(),
            })
        });
        match analytic {
            Some(d) => {
                let partial: DynKernel = Arc::new(move |s, u| {
                    exprlang::eval(&d, &Bindings::us(u, s)).map_err(|e| TsError::Expr {
                        slot: "kernel partial".into(),
                        msg: e.to_string(),
                    })
                });
                Kernel2 {
                    eval,
                    partial,
                    analytic: true,
                    power: false,
                }
            }
            None => {
                let fd_expr = expr;
                let partial: DynKernel = Arc::new(move |s, u| {
                    let h = H_FD.max(H_FD * s.abs());
                    let hi = exprlang::eval(&fd_expr, &Bindings::us(u, s + h));
                    let lo = exprlang::eval(&fd_expr, &Bindings::us(u, s - h));
                    match (hi, lo) {
                        (Ok(hi), Ok(lo)) => Ok((hi - lo) / (2.0 * h)),
                        (Err(e), _) | (_, Err(e)) => Err(TsError::Expr {
                            slot: "kernel partial".into(),
                            msg: e.to_string(),
                        }),
                    }
                });
                Kernel2 {
                    eval,
                    partial,
                    analytic: false,
                    power: false,
                }
            }
        }
    }

    pub fn parse(src: &str) -> Result<Self> {
        let expr = exprlang::parse_with_vars(src, &[Var::U, Var::S]).map_err(|e| TsError::Expr {
            slot: "kernel".into(),
            msg: e.to_string(),
        })?;
        Ok(Self::from_expr(expr))
    }

    /// The power kernel `s^u` (with its analytic partial `u s^(u-1)`).
    /// Marked so product checkers know the kernel condition is vacuous.
    pub fn power() -> Self {
        let mut k = Self::parse("s^u").expect("power kernel parses");
        k.power = true;
        k
    }

    pub fn from_fns<F, D>(eval: F, partial: D) -> Self
    where
        F: Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
        D: Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
    {
        Kernel2 {
            eval: Arc::new(eval),
            partial: Arc::new(partial),
            analytic: true,
            power: false,
        }
    }

    pub fn eval(&self, s: f64, u: f64) -> Result<f64> {
        (self.eval)(s, u)
    }

    pub fn partial_s(&self, s: f64, u: f64) -> Result<f64> {
        (self.partial)(s, u)
    }

    pub fn analytic_partial(&self) -> bool {
        self.analytic
    }

    /// True only for the canonical power kernel `s^u`.
    pub fn is_power(&self) -> bool {
        self.power
    }
}

/// A function of the parameter `s` with its derivative, used for the
/// parametric dampers.
#[derive(Clone)]
pub struct ParamFn {
    f: Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>,
    df: Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>,
}

impl std::fmt::Debug for ParamFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ParamFn")
    }
}

impl ParamFn {
    pub fn parse(src: &str) -> Result<Self> {
        let expr = exprlang::parse_with_vars(src, &[Var::S]).map_err(|e| TsError::Expr {
            slot: "damper".into(),
            msg: e.to_string(),
        })?;
        let d = exprlang::derive_s(&expr);
        let f_expr = expr.clone();
        let f: Arc<dyn Fn(f64) -> Result<f64> + Send + Sync> = Arc::new(move |s| {
            exprlang::eval(&f_expr, &Bindings::s(s)).map_err(|e| TsError::Expr {
                slot: "damper".into(),
                msg: e.to_string(),
            })
        });
        let df: Arc<dyn Fn(f64) -> Result<f64> + Send + Sync> = match d {
            Some(d) => Arc::new(move |s| {
                exprlang::eval(&d, &Bindings::s(s)).map_err(|e| TsError::Expr {
                    slot: "damper derivative".into(),
                    msg: e.to_string(),
                })
            }),
            None => Arc::new(move |s| {
                let h = H_FD.max(H_FD * s.abs());
                let hi = exprlang::eval(&expr, &Bindings::s(s + h));
                let lo = exprlang::eval(&expr, &Bindings::s(s - h));
                match (hi, lo) {
                    (Ok(hi), Ok(lo)) => Ok((hi - lo) / (2.0 * h)),
                    (Err(e), _) | (_, Err(e)) => Err(TsError::Expr {
                        slot: "damper derivative".into(),
                        msg: e.to_string(),
                    }),
                }
            }),
        };
        Ok(ParamFn { f, df })
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        (self.f)(s)
    }

    pub fn derivative(&self, s: f64) -> Result<f64> {
        (self.df)(s)
    }
}

/// The bilinear condition margin at parameter `s`:
/// `int dPsi/ds * int Phi - int Psi * int dPhi/ds` over `[a, b]` (Delta).
pub fn c1_margin(
    psi_k: &Kernel2,
    phi_k: &Kernel2,
    scale: &TimeScale,
    a: f64,
    b: f64,
    s: f64,
) -> Result<f64> {
    let int_psi = integral_fn(IntegralKind::Delta, scale, &|u| psi_k.eval(s, u), a, b)?;
    let int_phi = integral_fn(IntegralKind::Delta, scale, &|u| phi_k.eval(s, u), a, b)?;
    if int_psi <= 0.0 || int_phi <= 0.0 {
        return Err(TsError::PositivityViolated {
            name: "kernel integral".into(),
            worst: int_psi.min(int_phi),
            at: s,
        });
    }
    let int_dpsi = integral_fn(IntegralKind::Delta, scale, &|u| psi_k.partial_s(s, u), a, b)?;
    let int_dphi = integral_fn(IntegralKind::Delta, scale, &|u| phi_k.partial_s(s, u), a, b)?;
    Ok(int_dpsi * int_phi - int_psi * int_dphi)
}

/// Fixed-limit parametric quotient `int Psi(s,.) / int Phi(s,.)`, optionally
/// damped as `(T(s) + int Psi) / (T(s) + int Phi)`.
pub fn check_parametric_quotient(
    psi_k: &Kernel2,
    phi_k: &Kernel2,
    scale: &TimeScale,
    a: f64,
    b: f64,
    s_grid: &[f64],
    direction: Direction,
    damper: Option<&ParamFn>,
    opts: &CheckOptions,
) -> Result<MonotoneVerdict> {
    let u_grid = scale.grid_in(opts.resolution, a, b);
    let mut margins = Vec::new();

    // kernel positivity over the sampled (s, u) rectangle
    let mut pos = [(f64::INFINITY, 0.0), (f64::INFINITY, 0.0)];
    for &s in s_grid {
        for &u in &u_grid {
            let vp = psi_k.eval(s, u)?;
            let vq = phi_k.eval(s, u)?;
            if vp < pos[0].0 {
                pos[0] = (vp, s);
            }
            if vq < pos[1].0 {
                pos[1] = (vq, s);
            }
        }
    }
    margins.push(HypothesisMargin {
        id: "Psi>0".into(),
        worst_margin: pos[0].0,
        worst_location: pos[0].1,
        passed: pos[0].0 > 0.0,
    });
    margins.push(HypothesisMargin {
        id: "Phi>0".into(),
        worst_margin: pos[1].0,
        worst_location: pos[1].1,
        passed: pos[1].0 > 0.0,
    });

    // signed C1 margin at every sampled s (the iff condition)
    let mut c1_worst = (f64::INFINITY, s_grid.first().copied().unwrap_or(0.0));
    for &s in s_grid {
        let m = direction.signed(c1_margin(psi_k, phi_k, scale, a, b, s)?);
        if m < c1_worst.0 {
            c1_worst = (m, s);
        }
    }
    margins.push(margin("C1", c1_worst.0, c1_worst.1, opts.tol_mono));

    if let Some(t) = damper {
        let mut dom = (f64::INFINITY, 0.0);
        let mut ddom = (f64::INFINITY, 0.0);
        for &s in s_grid {
            for &u in &u_grid {
                let d = direction.signed(psi_k.eval(s, u)? - phi_k.eval(s, u)?);
                if d < dom.0 {
                    dom = (d, s);
                }
                let dd = direction.signed(psi_k.partial_s(s, u)? - phi_k.partial_s(s, u)?);
                if dd < ddom.0 {
                    ddom = (dd, s);
                }
            }
        }
        margins.push(margin("Psi-dominates-Phi", dom.0, dom.1, opts.tol_mono));
        margins.push(margin("dPsi-dominates-dPhi", ddom.0, ddom.1, opts.tol_mono));
        let mut t_min = (f64::INFINITY, 0.0);
        let mut dt_max = (f64::INFINITY, 0.0);
        for &s in s_grid {
            let v = t.eval(s)?;
            if v < t_min.0 {
                t_min = (v, s);
            }
            let d = -t.derivative(s)?;
            if d < dt_max.0 {
                dt_max = (d, s);
            }
        }
        margins.push(margin("T>=0", t_min.0, t_min.1, opts.tol_mono));
        margins.push(margin("T-decreasing", dt_max.0, dt_max.1, opts.tol_mono));
    }

    let mut samples = Vec::new();
    if margins.iter().all(|m| m.passed) || opts.force_sample {
        for &s in s_grid {
            let int_psi = integral_fn(IntegralKind::Delta, scale, &|u| psi_k.eval(s, u), a, b)?;
            let int_phi = integral_fn(IntegralKind::Delta, scale, &|u| phi_k.eval(s, u), a, b)?;
            let t = match damper {
                Some(t) => t.eval(s)?,
                None => 0.0,
            };
            let denom = t + int_phi;
            if denom <= 0.0 {
                return Err(TsError::PositivityViolated {
                    name: "parametric denominator".into(),
                    worst: denom,
                    at: s,
                });
            }
            samples.push((s, (t + int_psi) / denom));
        }
    }
    let analytic = psi_k.analytic_partial() && phi_k.analytic_partial();
    finish(direction, margins, samples, opts, analytic)
}

/// The power-kernel specialization `int psi(u) s^u / int phi(u) s^u`.
/// On the truncated naturals this is the classical power-series ratio; on
/// geometric scales the Delta measure contributes the `(q-1) q^k` weights.
pub fn check_power_kernel(
    psi: &GridFn,
    phi: &GridFn,
    scale: &TimeScale,
    a: f64,
    b: f64,
    s_grid: &[f64],
    direction: Direction,
    opts: &CheckOptions,
) -> Result<MonotoneVerdict> {
    let grid = scale.grid_in(opts.resolution, a, b);
    let mut margins = vec![positivity_hypothesis("H1", phi, &grid)?];
    let ratio = ratio_points(psi, phi, &grid)?;
    let (w, at) = monotone_margin(&ratio, direction);
    margins.push(margin("H2", w, at, opts.tol_mono));

    let mut samples = Vec::new();
    if margins.iter().all(|m| m.passed) || opts.force_sample {
        for &s in s_grid {
            if s <= 0.0 {
                return Err(TsError::PositivityViolated {
                    name: "power-kernel parameter s".into(),
                    worst: s,
                    at: s,
                });
            }
            let num = integral_fn(IntegralKind::Delta, scale, &|u| {
                Ok(psi.eval(u)? * s.powf(u))
            }, a, b)?;
            let den = integral_fn(IntegralKind::Delta, scale, &|u| {
                Ok(phi.eval(u)? * s.powf(u))
            }, a, b)?;
            if den <= 0.0 {
                return Err(TsError::PositivityViolated {
                    name: "power-kernel denominator".into(),
                    worst: den,
                    at: s,
                });
            }
            samples.push((s, num / den));
        }
    }
    finish(direction, margins, samples, opts, true)
}

/// One factor of a product quotient; factors may live on different scales.
#[derive(Debug, Clone)]
pub struct ProductFactor {
    pub scale: TimeScale,
    pub psi: GridFn,
    pub phi: GridFn,
    pub kernel: Kernel2,
    pub a: f64,
    pub b: f64,
}

/// Worst consecutive-difference margin of `u -> partial_s(s,u)/eval(s,u)`
/// on the grid, signed for the claimed direction.
pub fn kernel_logds_monotone_margin(
    kernel: &Kernel2,
    scale: &TimeScale,
    a: f64,
    b: f64,
    s: f64,
    direction: Direction,
    resolution: f64,
) -> Result<(f64, f64)> {
    let grid = scale.grid_in(resolution, a, b);
    let mut pts = Vec::with_capacity(grid.len());
    for &u in &grid {
        let v = kernel.eval(s, u)?;
        if v <= 0.0 {
            return Err(TsError::PositivityViolated {
                name: "kernel".into(),
                worst: v,
                at: u,
            });
        }
        pts.push((u, kernel.partial_s(s, u)? / v));
    }
    Ok(monotone_margin(&pts, direction))
}

/// Product-of-integrals rule: per-factor ratio monotonicity and kernel
/// log-partial monotonicity, then the sampled product quotient.
pub fn check_product_quotient(
    factors: &[ProductFactor],
    s_grid: &[f64],
    direction: Direction,
    opts: &CheckOptions,
) -> Result<MonotoneVerdict> {
    let mut margins = Vec::new();
    for (l, f) in factors.iter().enumerate() {
        let grid = f.scale.grid_in(opts.resolution, f.a, f.b);
        let mut pos = positivity_hypothesis(&format!("phi>0[{l}]"), &f.phi, &grid)?;
        pos.id = format!("phi>0[{l}]");
        margins.push(pos);
        let ratio = ratio_points(&f.psi, &f.phi, &grid)?;
        let (w, at) = monotone_margin(&ratio, direction);
        margins.push(margin(&format!("ratio[{l}]"), w, at, opts.tol_mono));
        // the kernel condition only constrains general kernels; for the
        // canonical power kernel the direction follows from the ratio alone.
        // The log-partial must grow with u regardless of the claimed
        // direction: a u-increasing log-partial paired with a ratio monotone
        // in the claimed direction yields a quotient monotone in that same
        // direction, while a u-decreasing log-partial would flip it.
        if !f.kernel.is_power() {
            let mut worst = (f64::INFINITY, f.a);
            for &s in s_grid {
                let (w, at) = kernel_logds_monotone_margin(
                    &f.kernel,
                    &f.scale,
                    f.a,
                    f.b,
                    s,
                    Direction::Increasing,
                    opts.resolution,
                )?;
                if w < worst.0 {
                    worst = (w, at);
                }
            }
            margins.push(margin(&format!("kernel-logds[{l}]"), worst.0, worst.1, opts.tol_mono));
        }
    }

    let mut samples = Vec::new();
    if margins.iter().all(|m| m.passed) || opts.force_sample {
        for &s in s_grid {
            let mut num = 1.0;
            let mut den = 1.0;
            for f in factors {
                num *= integral_fn(IntegralKind::Delta, &f.scale, &|u| {
                    Ok(f.psi.eval(u)? * f.kernel.eval(s, u)?)
                }, f.a, f.b)?;
                den *= integral_fn(IntegralKind::Delta, &f.scale, &|u| {
                    Ok(f.phi.eval(u)? * f.kernel.eval(s, u)?)
                }, f.a, f.b)?;
            }
            if den <= 0.0 {
                return Err(TsError::PositivityViolated {
                    name: "product denominator".into(),
                    worst: den,
                    at: s,
                });
            }
            samples.push((s, num / den));
        }
    }
    finish(direction, margins, samples, opts, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SampledSign {
    Positive,
    Negative,
    Flat,
}

fn classify_steps(diffs: &[f64], tol: f64, what: &str) -> Result<SampledSign> {
    let any_pos = diffs.iter().any(|&d| d > tol);
    let any_neg = diffs.iter().any(|&d| d < -tol);
    match (any_pos, any_neg) {
        (true, true) => Err(TsError::IndeterminateSign { what: what.into() }),
        (true, false) => Ok(SampledSign::Positive),
        (false, true) => Ok(SampledSign::Negative),
        (false, false) => Ok(SampledSign::Flat),
    }
}

/// Separable-kernel rule: the implied direction comes from the sign pairing
/// of the `psi/phi` steps and the kernel log-partial steps (same signs give
/// increasing, opposite give decreasing).
pub fn check_case2(
    psi: &GridFn,
    phi: &GridFn,
    kernel: &Kernel2,
    scale: &TimeScale,
    a: f64,
    b: f64,
    s_grid: &[f64],
    opts: &CheckOptions,
) -> Result<MonotoneVerdict> {
    let grid = scale.grid_in(opts.resolution, a, b);
    let mut margins = vec![positivity_hypothesis("H1", phi, &grid)?];

    let ratio = ratio_points(psi, phi, &grid)?;
    let ratio_diffs: Vec<f64> = ratio.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let ratio_sign = classify_steps(&ratio_diffs, opts.tol_mono, "psi/phi steps")?;
    let (rw, rat) = monotone_margin(
        &ratio,
        match ratio_sign {
            SampledSign::Negative => Direction::Decreasing,
            _ => Direction::Increasing,
        },
    );
    margins.push(margin("ratio-sign", rw, rat, opts.tol_mono));

    let mut logds_diffs = Vec::new();
    for &s in s_grid {
        let mut g = Vec::with_capacity(grid.len());
        for &u in &grid {
            let v = kernel.eval(s, u)?;
            if v <= 0.0 {
                return Err(TsError::PositivityViolated {
                    name: "kernel".into(),
                    worst: v,
                    at: u,
                });
            }
            g.push(kernel.partial_s(s, u)? / v);
        }
        logds_diffs.extend(g.windows(2).map(|w| w[1] - w[0]));
    }
    let kernel_sign = classify_steps(&logds_diffs, opts.tol_mono, "kernel log-partial steps")?;

    let implied = match (ratio_sign, kernel_sign) {
        (SampledSign::Flat, _) | (_, SampledSign::Flat) => Direction::Increasing, // flat quotient
        (SampledSign::Positive, SampledSign::Positive)
        | (SampledSign::Negative, SampledSign::Negative) => Direction::Increasing,
        _ => Direction::Decreasing,
    };

    let mut samples = Vec::new();
    if margins.iter().all(|m| m.passed) || opts.force_sample {
        for &s in s_grid {
            let num = integral_fn(IntegralKind::Delta, scale, &|u| {
                Ok(psi.eval(u)? * kernel.eval(s, u)?)
            }, a, b)?;
            let den = integral_fn(IntegralKind::Delta, scale, &|u| {
                Ok(phi.eval(u)? * kernel.eval(s, u)?)
            }, a, b)?;
            if den <= 0.0 {
                return Err(TsError::PositivityViolated {
                    name: "case-2 denominator".into(),
                    worst: den,
                    at: s,
                });
            }
            samples.push((s, num / den));
        }
    }
    finish(implied, margins, samples, opts, kernel.analytic_partial())
}

/// Generalized-series rule over the monomial ladder: coefficient-ratio
/// monotonicity plus the ladder ratio condition, then the sampled series
/// quotient.
pub fn check_generalized_series(
    coeff_psi: &[f64],
    coeff_phi: &[f64],
    ctx: &MonomialCtx,
    u0: usize,
    s_grid: &[f64],
    direction: Direction,
    opts: &CheckOptions,
) -> Result<MonotoneVerdict> {
    assert_eq!(coeff_psi.len(), coeff_phi.len(), "coefficient lists must align");
    let top = u0 + coeff_psi.len() - 1;
    if ctx.max_order() < u0 + 2 || top > ctx.max_order() {
        return Err(TsError::TruncationTooShort {
            u0,
            max_order: ctx.max_order(),
        });
    }
    let mut margins = Vec::new();

    let mut phi_min = (f64::INFINITY, u0 as f64);
    for (i, &c) in coeff_phi.iter().enumerate() {
        if c < phi_min.0 {
            phi_min = (c, (u0 + i) as f64);
        }
    }
    margins.push(HypothesisMargin {
        id: "H-coeff-phi>0".into(),
        worst_margin: phi_min.0,
        worst_location: phi_min.1,
        passed: phi_min.0 > 0.0,
    });

    let ratio: Vec<(f64, f64)> = coeff_psi
        .iter()
        .zip(coeff_phi)
        .enumerate()
        .map(|(i, (&p, &q))| ((u0 + i) as f64, p / q))
        .collect();
    let (w, at) = monotone_margin(&ratio, direction);
    margins.push(margin("H1", w, at, opts.tol_mono));

    // ladder ratio condition over all relevant orders and sampled points
    let m_lo = u0.saturating_sub(1);
    let mut con_worst = (f64::INFINITY, ctx.anchor());
    for m in m_lo..=ctx.max_order() - 2 {
        for &s in s_grid {
            match ctx.con_margin(m, s) {
                Ok(cm) => {
                    if cm.margin < con_worst.0 {
                        con_worst = (cm.margin, s);
                    }
                }
                Err(TsError::DegenerateDenominator { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    margins.push(margin("H2", con_worst.0, con_worst.1, TAU_ZERO));

    let factorials: Vec<f64> = {
        let mut f = vec![1.0];
        for k in 1..=top {
            f.push(f[k - 1] * k as f64);
        }
        f
    };
    let mut samples = Vec::new();
    if margins.iter().all(|m| m.passed) || opts.force_sample {
        for &s in s_grid {
            let mut num = 0.0;
            let mut den = 0.0;
            for (i, (&p, &q)) in coeff_psi.iter().zip(coeff_phi).enumerate() {
                let u = u0 + i;
                let h = ctx.h_recursive(u, s)?;
                num += p * factorials[u] * h;
                den += q * factorials[u] * h;
            }
            if den <= 0.0 {
                return Err(TsError::PositivityViolated {
                    name: "series denominator".into(),
                    worst: den,
                    at: s,
                });
            }
            samples.push((s, num / den));
        }
    }
    finish(direction, margins, samples, opts, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> CheckOptions {
        CheckOptions::default()
    }

    #[test]
    fn verify_monotone_cases() {
        let flat = [(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)];
        assert_eq!(
            verify_monotone(&flat, Direction::Increasing, Strictness::Weak, TOL_MONO).unwrap(),
            Verdict::Verified
        );
        let bump = [(0.0, 1.0), (1.0, 2.0), (2.0, 1.5)];
        assert_eq!(
            verify_monotone(&bump, Direction::Increasing, Strictness::Weak, TOL_MONO).unwrap(),
            Verdict::ViolatedAt {
                s_left: 1.0,
                s_right: 2.0
            }
        );
        let rise = [(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)];
        assert_eq!(
            verify_monotone(&rise, Direction::Decreasing, Strictness::Weak, TOL_MONO).unwrap(),
            Verdict::ViolatedAt {
                s_left: 0.0,
                s_right: 1.0
            }
        );
        assert!(matches!(
            verify_monotone(&flat[..1], Direction::Increasing, Strictness::Weak, TOL_MONO),
            Err(TsError::TooFewSamples)
        ));
        // strictly flat fails strict mode
        assert!(matches!(
            verify_monotone(&flat, Direction::Increasing, Strictness::Strict, TOL_MONO).unwrap(),
            Verdict::ViolatedAt { .. }
        ));
    }

    #[test]
    fn variable_upper_quotient_exact_sums() {
        let scale = TimeScale::naturals(10);
        let psi = GridFn::parse(scale.clone(), "u^2").unwrap();
        let phi = GridFn::parse(scale, "u").unwrap();
        let q = |kind, s| quotient_variable_upper(kind, &psi, &phi, 1.0, s).unwrap();
        assert_eq!(q(IntegralKind::Delta, 2.0), 1.0);
        assert_eq!(q(IntegralKind::Delta, 3.0), 5.0 / 3.0);
        assert_eq!(q(IntegralKind::Delta, 4.0), 14.0 / 6.0);
        assert_eq!(q(IntegralKind::Nabla, 2.0), 2.0);
        assert_eq!(q(IntegralKind::Nabla, 3.0), 13.0 / 5.0);
        // identical integrands give the constant quotient 1
        for s in [2.0, 5.0, 9.0] {
            let r = quotient_variable_upper(IntegralKind::Delta, &psi, &psi, 1.0, s).unwrap();
            assert!((r - 1.0).abs() < 1e-12);
        }
        assert!(matches!(
            quotient_variable_upper(IntegralKind::Delta, &psi, &phi, 1.0, 1.0),
            Err(TsError::EmptyRange)
        ));
    }

    #[test]
    fn variable_upper_verdicts() {
        let scale = TimeScale::naturals(10);
        let psi = GridFn::parse(scale.clone(), "u^2").unwrap();
        let phi = GridFn::parse(scale.clone(), "u").unwrap();
        let v = check_thm_variable_upper(
            IntegralKind::Delta,
            &psi,
            &phi,
            1.0,
            10.0,
            Direction::Increasing,
            &opts(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Verified);

        let unit = TimeScale::reals(0.0, 1.0).unwrap();
        let psi = GridFn::parse(unit.clone(), "exp(u)").unwrap();
        let phi = GridFn::parse(unit, "1").unwrap();
        let v = check_thm_variable_upper(
            IntegralKind::Delta,
            &psi,
            &phi,
            0.0,
            1.0,
            Direction::Increasing,
            &opts(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Verified);

        let psi = GridFn::parse(scale.clone(), "1/(u+1)").unwrap();
        let phi = GridFn::parse(scale, "1").unwrap();
        let v = check_thm_variable_upper(
            IntegralKind::Delta,
            &psi,
            &phi,
            1.0,
            10.0,
            Direction::Increasing,
            &opts(),
        )
        .unwrap();
        assert_eq!(
            v.verdict,
            Verdict::HypothesisFailed {
                condition: "H2".into()
            }
        );
    }

    #[test]
    fn variable_upper_diamond_hybrid() {
        use crate::timescale::Segment;
        let scale = TimeScale::from_segments(vec![
            Segment::Interval { lo: 0.0, hi: 1.0 },
            Segment::Point(1.5),
            Segment::Point(2.0),
        ])
        .unwrap();
        let psi = GridFn::parse(scale.clone(), "(u+1)^2").unwrap();
        let phi = GridFn::parse(scale, "u+1").unwrap();
        let v = check_thm_variable_upper(
            IntegralKind::diamond(0.5),
            &psi,
            &phi,
            0.0,
            2.0,
            Direction::Increasing,
            &opts(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Verified);
        assert!(v.hypothesis_margins.iter().any(|m| m.id == "H3"));
    }

    #[test]
    fn damped_quotient_exact() {
        let scale = TimeScale::naturals(10);
        let psi = GridFn::parse(scale.clone(), "2").unwrap();
        let phi = GridFn::parse(scale.clone(), "1").unwrap();
        let damper = GridFn::parse(scale, "1/u").unwrap();
        let q2 = quotient_damped(IntegralKind::Delta, &psi, &phi, &damper, 1.0, 2.0).unwrap();
        assert!((q2 - 5.0 / 3.0).abs() < 1e-12);
        let q3 = quotient_damped(IntegralKind::Delta, &psi, &phi, &damper, 1.0, 3.0).unwrap();
        assert!((q3 - 13.0 / 7.0).abs() < 1e-12);

        let unit = TimeScale::reals(0.0, 1.0).unwrap();
        let psi = GridFn::parse(unit.clone(), "2").unwrap();
        let phi = GridFn::parse(unit.clone(), "1").unwrap();
        let damper = GridFn::parse(unit, "1-u").unwrap();
        let q = quotient_damped(IntegralKind::Delta, &psi, &phi, &damper, 0.0, 0.5).unwrap();
        assert!((q - 1.5).abs() < 1e-9);
    }

    #[test]
    fn damped_verdicts() {
        let scale = TimeScale::naturals(10);
        let phi = GridFn::parse(scale.clone(), "1").unwrap();
        let damper = GridFn::parse(scale.clone(), "1/u").unwrap();

        let psi = GridFn::parse(scale.clone(), "2").unwrap();
        let v = check_thm_damped(
            IntegralKind::Delta,
            &psi,
            &phi,
            &damper,
            1.0,
            10.0,
            Direction::Increasing,
            &opts(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Verified);

        // numerator starts below the denominator: the anchor-ratio check fails
        let half = GridFn::parse(scale.clone(), "0.5").unwrap();
        let v = check_thm_damped(
            IntegralKind::Delta,
            &half,
            &phi,
            &damper,
            1.0,
            10.0,
            Direction::Increasing,
            &opts(),
        )
        .unwrap();
        assert_eq!(
            v.verdict,
            Verdict::HypothesisFailed {
                condition: "H3".into()
            }
        );

        // an increasing damper fails the decreasing-damper check
        let rising = GridFn::parse(scale, "u").unwrap();
        let v = check_thm_damped(
            IntegralKind::Delta,
            &psi,
            &phi,
            &rising,
            1.0,
            10.0,
            Direction::Increasing,
            &opts(),
        )
        .unwrap();
        assert_eq!(
            v.verdict,
            Verdict::HypothesisFailed {
                condition: "H5".into()
            }
        );
    }

    #[test]
    fn two_damper_symmetry_and_chain_failure() {
        let scale = TimeScale::naturals(10);
        let psi = GridFn::parse(scale.clone(), "u").unwrap();
        let one = GridFn::parse(scale.clone(), "1").unwrap();

        // full symmetry: psi = phi and both dampers equal the running
        // integral of psi, so every chain link is exactly zero and the
        // quotient is constant
        let matched = GridFn::parse(scale.clone(), "(u^2-u)/2").unwrap();
        for dir in [Direction::Increasing, Direction::Decreasing] {
            let v = check_thm_two_dampers(
                IntegralKind::Delta,
                &psi,
                &psi,
                &matched,
                &matched,
                1.0,
                10.0,
                dir,
                &opts(),
            )
            .unwrap();
            assert_eq!(v.verdict, Verdict::Verified);
            for m in v
                .hypothesis_margins
                .iter()
                .filter(|m| m.id.starts_with("H-chain"))
            {
                assert!(m.worst_margin.abs() < 1e-9, "{}: {}", m.id, m.worst_margin);
            }
        }

        // constant dampers put zero between the log-derivatives; the last
        // link fails because phi/int(phi) stays positive
        let v = check_thm_two_dampers(
            IntegralKind::Delta,
            &psi,
            &one,
            &one,
            &one,
            1.0,
            10.0,
            Direction::Increasing,
            &opts(),
        )
        .unwrap();
        assert_eq!(
            v.verdict,
            Verdict::HypothesisFailed {
                condition: "H-chain-3".into()
            }
        );

        // exponential damper: 2^s/(2^s - 2) >= 1 >= 0 but 0 >= 1/(s-1) fails
        let scale2 = TimeScale::naturals(10);
        let psi = GridFn::parse(scale2.clone(), "2^u").unwrap();
        let t1 = GridFn::parse(scale2, "2^u").unwrap();
        let v = check_thm_two_dampers(
            IntegralKind::Delta,
            &psi,
            &one,
            &t1,
            &one,
            1.0,
            10.0,
            Direction::Increasing,
            &opts(),
        )
        .unwrap();
        match v.verdict {
            Verdict::HypothesisFailed { condition } => assert_eq!(condition, "H-chain-3"),
            other => panic!("expected chain failure, got {other:?}"),
        }
    }

    #[test]
    fn c1_margin_antisymmetry_and_sign() {
        let scale = TimeScale::naturals(3);
        let psi = Kernel2::parse("(u+1)*s^u").unwrap();
        let phi = Kernel2::parse("s^u").unwrap();
        // identical kernels: the bilinear form vanishes
        for s in [0.2, 0.5, 0.8] {
            let m = c1_margin(&phi, &phi, &scale, 0.0, 3.0, s).unwrap();
            assert!(m.abs() < 1e-12, "m = {m}");
        }
        let m = c1_margin(&psi, &phi, &scale, 0.0, 3.0, 0.5).unwrap();
        assert!((m - 3.25).abs() < 1e-10, "m = {m}");
        let swapped = c1_margin(&phi, &psi, &scale, 0.0, 3.0, 0.5).unwrap();
        assert!((m + swapped).abs() < 1e-12);
    }

    #[test]
    fn parametric_quotient_verdicts() {
        let scale = TimeScale::naturals(5);
        let psi = Kernel2::parse("(u+1)*s^u").unwrap();
        let phi = Kernel2::parse("s^u").unwrap();
        let s_grid: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();

        let v = check_parametric_quotient(
            &psi,
            &phi,
            &scale,
            0.0,
            5.0,
            &s_grid,
            Direction::Increasing,
            None,
            &opts(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Verified);
        assert!(v.analytic_partials);
        assert!(v
            .hypothesis_margins
            .iter()
            .find(|m| m.id == "C1")
            .unwrap()
            .passed);

        let damper = ParamFn::parse("exp(-s)").unwrap();
        let v = check_parametric_quotient(
            &psi,
            &phi,
            &scale,
            0.0,
            5.0,
            &s_grid,
            Direction::Increasing,
            Some(&damper),
            &opts(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Verified);

        // identical kernels with a damper: the quotient is constant 1
        let v = check_parametric_quotient(
            &phi,
            &phi,
            &scale,
            0.0,
            5.0,
            &s_grid,
            Direction::Increasing,
            Some(&damper),
            &opts(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Verified);
        for &(_, q) in &v.samples {
            assert!((q - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn power_kernel_verdicts() {
        let scale = TimeScale::naturals(20);
        let psi = GridFn::parse(scale.clone(), "u+1").unwrap();
        let phi = GridFn::parse(scale.clone(), "1").unwrap();
        let s_grid: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
        let v = check_power_kernel(
            &psi,
            &phi,
            &scale,
            0.0,
            20.0,
            &s_grid,
            Direction::Increasing,
            &opts(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Verified);

        let v = check_power_kernel(
            &phi,
            &phi,
            &scale,
            0.0,
            20.0,
            &s_grid,
            Direction::Increasing,
            &opts(),
        )
        .unwrap();
        for &(_, q) in &v.samples {
            assert!((q - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn power_kernel_geometric_scale() {
        // on a geometric scale the integral weights each point by (q-1) q^k
        let scale = TimeScale::q_powers(2.0, 8).unwrap();
        let psi = GridFn::parse(scale.clone(), "log(u)/log(2) + 1").unwrap();
        let phi = GridFn::parse(scale.clone(), "1").unwrap();
        let s_grid = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3];
        let v = check_power_kernel(
            &psi,
            &phi,
            &scale,
            1.0,
            256.0,
            &s_grid,
            Direction::Increasing,
            &opts(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Verified);

        // cross-check one sample against the explicit weighted sum
        let s: f64 = 0.1;
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..8u32 {
            let p = 2f64.powi(k as i32);
            let w = (2.0 - 1.0) * p; // mu at 2^k
            num += w * (k as f64 + 1.0) * s.powf(p);
            den += w * s.powf(p);
        }
        let got = v.samples.iter().find(|(x, _)| (*x - s).abs() < 1e-12).unwrap().1;
        assert!((got - num / den).abs() < 1e-12);
    }

    #[test]
    fn product_quotient_verdicts() {
        let scale = TimeScale::naturals(10);
        let factor = || ProductFactor {
            scale: scale.clone(),
            psi: GridFn::parse(scale.clone(), "u+1").unwrap(),
            phi: GridFn::parse(scale.clone(), "1").unwrap(),
            kernel: Kernel2::power(),
            a: 0.0,
            b: 10.0,
        };
        let s_grid = [0.1, 0.2, 0.3, 0.4, 0.5];
        let v = check_product_quotient(
            &[factor(), factor()],
            &s_grid,
            Direction::Increasing,
            &opts(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Verified);

        let trivial = ProductFactor {
            scale: scale.clone(),
            psi: GridFn::parse(scale.clone(), "u+1").unwrap(),
            phi: GridFn::parse(scale.clone(), "u+1").unwrap(),
            kernel: Kernel2::power(),
            a: 0.0,
            b: 10.0,
        };
        let v = check_product_quotient(&[trivial], &s_grid, Direction::Increasing, &opts())
            .unwrap();
        for &(_, q) in &v.samples {
            assert!((q - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_logds_margins() {
        let scale = TimeScale::naturals(10);
        // s^u: log-partial is u/s, affine increasing in u
        let (w, _) = kernel_logds_monotone_margin(
            &Kernel2::power(),
            &scale,
            0.0,
            10.0,
            0.5,
            Direction::Increasing,
            0.05,
        )
        .unwrap();
        assert!(w >= 0.0);
        // e^{su}: log-partial is u
        let k = Kernel2::parse("exp(s*u)").unwrap();
        let (w, _) = kernel_logds_monotone_margin(
            &k,
            &scale,
            0.0,
            10.0,
            0.5,
            Direction::Increasing,
            0.05,
        )
        .unwrap();
        assert!(w >= 0.0);
        // e^{-s u^2}: log-partial is -u^2, decreasing
        let unit = TimeScale::reals(0.0, 2.0).unwrap();
        let k = Kernel2::parse("exp(-s*u^2)").unwrap();
        let (w, _) = kernel_logds_monotone_margin(
            &k,
            &unit,
            0.0,
            2.0,
            0.5,
            Direction::Decreasing,
            0.05,
        )
        .unwrap();
        assert!(w >= -1e-12);
    }

    #[test]
    fn case2_sign_pairing() {
        let scale = TimeScale::naturals(15);
        let psi = GridFn::parse(scale.clone(), "u+1").unwrap();
        let phi = GridFn::parse(scale.clone(), "1").unwrap();
        let s_grid = [0.1, 0.2, 0.3];
        let k = Kernel2::parse("exp(s*u)").unwrap();
        let v = check_case2(&psi, &phi, &k, &scale, 0.0, 15.0, &s_grid, &opts()).unwrap();
        assert_eq!(v.direction_claimed, Direction::Increasing);
        assert_eq!(v.verdict, Verdict::Verified);

        // opposite signs imply a decreasing quotient
        let unit = TimeScale::reals(0.0, 2.0).unwrap();
        let psi = GridFn::parse(unit.clone(), "u+1").unwrap();
        let phi = GridFn::parse(unit.clone(), "1").unwrap();
        let k = Kernel2::parse("exp(-s*u^2)").unwrap();
        let v = check_case2(&psi, &phi, &k, &unit, 0.0, 2.0, &s_grid, &opts()).unwrap();
        assert_eq!(v.direction_claimed, Direction::Decreasing);
        assert_eq!(v.verdict, Verdict::Verified);

        // identical integrands: flat quotient, weakly verified
        let v = check_case2(&phi, &phi, &k, &unit, 0.0, 2.0, &s_grid, &opts()).unwrap();
        assert_eq!(v.verdict, Verdict::Verified);
    }

    #[test]
    fn generalized_series_verdicts() {
        // real line: (1 + 2s)/(1 + s) is increasing for s > 0
        let scale = TimeScale::reals(0.0, 3.0).unwrap();
        let ctx = MonomialCtx::new(scale, 0.0, 3).unwrap();
        let s_grid = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
        let v = check_generalized_series(
            &[1.0, 2.0],
            &[1.0, 1.0],
            &ctx,
            0,
            &s_grid,
            Direction::Increasing,
            &opts(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Verified);
        for &(s, q) in &v.samples {
            assert!((q - (1.0 + 2.0 * s) / (1.0 + s)).abs() < 1e-9);
        }

        // identical coefficients: flat quotient
        let v = check_generalized_series(
            &[1.0, 2.0],
            &[1.0, 2.0],
            &ctx,
            0,
            &s_grid,
            Direction::Increasing,
            &opts(),
        )
        .unwrap();
        for &(_, q) in &v.samples {
            assert!((q - 1.0).abs() < 1e-12);
        }

        // integer scale with falling-factorial monomials
        let ctx = MonomialCtx::new(TimeScale::naturals(12), 0.0, 4).unwrap();
        let s_grid: Vec<f64> = (1..=8).map(|k| k as f64).collect();
        let v = check_generalized_series(
            &[1.0, 1.0, 1.0],
            &[3.0, 2.0, 1.0],
            &ctx,
            0,
            &s_grid,
            Direction::Increasing,
            &opts(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Verified);

        // geometric scale
        let ctx = MonomialCtx::new(TimeScale::q_powers(2.0, 6).unwrap(), 1.0, 4).unwrap();
        let s_grid = [2.0, 4.0, 8.0, 16.0];
        let v = check_generalized_series(
            &[1.0, 1.0, 1.0],
            &[3.0, 2.0, 1.0],
            &ctx,
            0,
            &s_grid,
            Direction::Increasing,
            &opts(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Verified);
    }

    #[test]
    fn generalized_series_truncation_guard() {
        let scale = TimeScale::reals(0.0, 3.0).unwrap();
        let ctx = MonomialCtx::new(scale, 0.0, 3).unwrap();
        assert!(matches!(
            check_generalized_series(
                &[1.0],
                &[1.0],
                &ctx,
                2,
                &[1.0, 2.0],
                Direction::Increasing,
                &opts(),
            ),
            Err(TsError::TruncationTooShort { .. })
        ));
    }
}
