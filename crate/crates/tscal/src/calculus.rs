//! Delta, Nabla, and Diamond-Alpha derivatives and integrals over a
//! [`TimeScale`].
//!
//! On discrete stretches the Delta integral is the left-endpoint sum
//! `sum mu(t) f(t)` over `[a, b)` and the Nabla integral the right-endpoint
//! sum over `(a, b]`; on continuous sub-intervals both reduce to adaptive
//! quadrature. The Diamond-Alpha integral is the literal convex blend
//! `alpha * Delta + (1 - alpha) * Nabla` of the other two.

use std::sync::Arc;

use crate::error::{Result, TsError};
use crate::exprlang::{self, Bindings, Expression, Var};
use crate::timescale::{close, Segment, TimeScale};

/// Absolute quadrature tolerance per sub-interval.
pub const TOL_QUAD: f64 = 1e-10;
/// Recursion cap for adaptive quadrature.
pub const MAX_DEPTH: u32 = 40;
/// Finite-difference step scale at dense points.
pub const H_FD: f64 = 1e-6;
/// Acceptance tolerance for finite-difference derivatives.
pub const TOL_FD: f64 = 1e-4;

/// Which integral/derivative to take. The Diamond-Alpha weight is named
/// `alpha_weight` to keep it apart from interval endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegralKind {
    Delta,
    Nabla,
    DiamondAlpha { alpha_weight: f64 },
}

impl IntegralKind {
    pub fn diamond(alpha_weight: f64) -> Self {
        assert!(
            (0.0..=1.0).contains(&alpha_weight),
            "alpha_weight must lie in [0, 1]"
        );
        IntegralKind::DiamondAlpha { alpha_weight }
    }
}

type DynFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Body {
    Expr(Expression),
    Table(Vec<(f64, f64)>),
    Custom { f: DynFn, df: Option<DynFn> },
}

/// A single-variable real function restricted to a time scale.
#[derive(Clone)]
pub struct GridFn {
    domain: TimeScale,
    body: Body,
}

impl std::fmt::Debug for GridFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.body {
            Body::Expr(e) => write!(f, "GridFn({e})"),
            Body::Table(t) => write!(f, "GridFn(table with {} rows)", t.len()),
            Body::Custom { .. } => write!(f, "GridFn(closure)"),
        }
    }
}

impl GridFn {
    pub fn from_expr(domain: TimeScale, expr: Expression) -> Self {
        GridFn {
            domain,
            body: Body::Expr(expr),
        }
    }

    /// Parse a single-variable expression in `u` over the given domain.
    pub fn parse(domain: TimeScale, src: &str) -> Result<Self> {
        let expr = exprlang::parse_with_vars(src, &[Var::U]).map_err(|e| TsError::Expr {
            slot: "function".into(),
            msg: e.to_string(),
        })?;
        Ok(Self::from_expr(domain, expr))
    }

    /// Tabulated values over grid points, sorted by `t`.
    pub fn table(domain: TimeScale, mut rows: Vec<(f64, f64)>) -> Self {
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        GridFn {
            domain,
            body: Body::Table(rows),
        }
    }

    pub fn from_fn<F>(domain: TimeScale, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        GridFn {
            domain,
            body: Body::Custom {
                f: Arc::new(f),
                df: None,
            },
        }
    }

    /// Closure-backed function with an analytic classical derivative, used
    /// where finite differences would be too noisy (e.g. damper chains).
    pub fn from_fn_with_derivative<F, D>(domain: TimeScale, f: F, df: D) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        GridFn {
            domain,
            body: Body::Custom {
                f: Arc::new(f),
                df: Some(Arc::new(df)),
            },
        }
    }

    pub fn domain(&self) -> &TimeScale {
        &self.domain
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match &self.body {
            Body::Expr(e) => exprlang::eval(e, &Bindings::u(t)).map_err(|err| TsError::Expr {
                slot: "function".into(),
                msg: err.to_string(),
            }),
            Body::Custom { f, .. } => Ok(f(t)),
            Body::Table(rows) => {
                let idx = rows.partition_point(|&(x, _)| x < t);
                for cand in idx.saturating_sub(1)..(idx + 1).min(rows.len()) {
                    if close(rows[cand].0, t) {
                        return Ok(rows[cand].1);
                    }
                }
                // linear interpolation between bracketing rows
                if idx > 0 && idx < rows.len() {
                    let (x0, y0) = rows[idx - 1];
                    let (x1, y1) = rows[idx];
                    if x1 > x0 {
                        return Ok(y0 + (y1 - y0) * (t - x0) / (x1 - x0));
                    }
                }
                Err(TsError::PointNotInTable(t))
            }
        }
    }

    fn classical_derivative(&self, t: f64, lo: f64, hi: f64) -> Result<f64> {
        if let Body::Custom { df: Some(df), .. } = &self.body {
            return Ok(df(t));
        }
        let h = H_FD.max(H_FD * t.abs());
        if t - h >= lo && t + h <= hi {
            Ok((self.eval(t + h)? - self.eval(t - h)?) / (2.0 * h))
        } else if t + 2.0 * h <= hi {
            // second-order one-sided forward difference
            Ok((-3.0 * self.eval(t)? + 4.0 * self.eval(t + h)? - self.eval(t + 2.0 * h)?)
                / (2.0 * h))
        } else if t - 2.0 * h >= lo {
            Ok((3.0 * self.eval(t)? - 4.0 * self.eval(t - h)? + self.eval(t - 2.0 * h)?)
                / (2.0 * h))
        } else {
            // interval too short for the stencil; fall back to a cramped secant
            let h = ((hi - lo) / 4.0).min(h);
            Ok((self.eval((t + h).min(hi))? - self.eval((t - h).max(lo))?)
                / ((t + h).min(hi) - (t - h).max(lo)))
        }
    }

    /// Positivity margin over the grid: `(min value, argmin)`.
    pub fn positivity_margin(&self, resolution: f64, a: f64, b: f64) -> Result<(f64, f64)> {
        let mut worst = (f64::INFINITY, a);
        for t in self.domain.grid_in(resolution, a, b) {
            let v = self.eval(t)?;
            if v < worst.0 {
                worst = (v, t);
            }
        }
        Ok(worst)
    }
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    fn recurse<F>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm)?;
        let frm = f(rm)?;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            Ok(left + right + delta / 15.0)
        } else {
            Ok(recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)?
                + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)?)
        }
    }

    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fb, fm) = (f(a)?, f(b)?, f(m)?);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, MAX_DEPTH)
}

fn delta_integral<F>(scale: &TimeScale, f: &F, a: f64, b: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut total = 0.0;
    for seg in scale.segments() {
        match *seg {
            Segment::Interval { lo, hi } => {
                let l = lo.max(a);
                let r = hi.min(b);
                if r > l && !close(l, r) {
                    total += adaptive_simpson(f, l, r, TOL_QUAD)?;
                }
                // a right-scattered interval end inside [a, b) carries the gap
                if hi < b && !close(hi, b) && (hi >= a || close(hi, a)) {
                    total += scale.mu(hi)? * f(hi)?;
                }
            }
            Segment::Point(x) => {
                if x < b && !close(x, b) && (x >= a || close(x, a)) {
                    total += scale.mu(x)? * f(x)?;
                }
            }
        }
    }
    Ok(total)
}

fn nabla_integral<F>(scale: &TimeScale, f: &F, a: f64, b: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut total = 0.0;
    for seg in scale.segments() {
        match *seg {
            Segment::Interval { lo, hi } => {
                let l = lo.max(a);
                let r = hi.min(b);
                if r > l && !close(l, r) {
                    total += adaptive_simpson(f, l, r, TOL_QUAD)?;
                }
                // a left-scattered interval start inside (a, b] carries the gap
                if lo > a && !close(lo, a) && (lo <= b || close(lo, b)) {
                    total += scale.nu(lo)? * f(lo)?;
                }
            }
            Segment::Point(x) => {
                if x > a && !close(x, a) && (x <= b || close(x, b)) {
                    total += scale.nu(x)? * f(x)?;
                }
            }
        }
    }
    Ok(total)
}

/// Integral of a pointwise-evaluable function over `[a, b]` on `scale`.
/// `a > b` evaluates as the negation of the reversed integral; `a = b` is zero.
pub fn integral_fn<F>(kind: IntegralKind, scale: &TimeScale, f: &F, a: f64, b: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let a = scale
        .locate(a)
        .ok_or(TsError::EndpointsNotInScale)?
        .snapped;
    let b = scale
        .locate(b)
        .ok_or(TsError::EndpointsNotInScale)?
        .snapped;
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return Ok(-integral_fn(kind, scale, f, b, a)?);
    }
    match kind {
        IntegralKind::Delta => delta_integral(scale, f, a, b),
        IntegralKind::Nabla => nabla_integral(scale, f, a, b),
        IntegralKind::DiamondAlpha { alpha_weight } => Ok(alpha_weight
            * delta_integral(scale, f, a, b)?
            + (1.0 - alpha_weight) * nabla_integral(scale, f, a, b)?),
    }
}

/// Integral of `f` over `[a, b]` on its own domain.
pub fn integral(kind: IntegralKind, f: &GridFn, a: f64, b: f64) -> Result<f64> {
    integral_fn(kind, f.domain(), &|t| f.eval(t), a, b)
}

fn delta_derivative(f: &GridFn, t: f64) -> Result<f64> {
    let scale = f.domain();
    let loc = scale.locate(t).ok_or(TsError::PointNotInScale(t))?;
    let t = loc.snapped;
    let sigma = scale.sigma(t)?;
    if sigma > t && !close(sigma, t) {
        Ok((f.eval(sigma)? - f.eval(t)?) / (sigma - t))
    } else if let Segment::Interval { lo, hi } = scale.segments()[loc.seg] {
        f.classical_derivative(t, lo, hi)
    } else {
        // isolated maximum: no points to the right
        Err(TsError::NotDifferentiableHere(t))
    }
}

fn nabla_derivative(f: &GridFn, t: f64) -> Result<f64> {
    let scale = f.domain();
    let loc = scale.locate(t).ok_or(TsError::PointNotInScale(t))?;
    let t = loc.snapped;
    let rho = scale.rho(t)?;
    if rho < t && !close(rho, t) {
        Ok((f.eval(t)? - f.eval(rho)?) / (t - rho))
    } else if let Segment::Interval { lo, hi } = scale.segments()[loc.seg] {
        f.classical_derivative(t, lo, hi)
    } else {
        Err(TsError::NotDifferentiableHere(t))
    }
}

/// Derivative of `f` at `t`: the exact difference quotient at scattered
/// points, a finite difference at dense points, and the alpha-blend for
/// Diamond-Alpha.
pub fn derivative(kind: IntegralKind, f: &GridFn, t: f64) -> Result<f64> {
    match kind {
        IntegralKind::Delta => delta_derivative(f, t),
        IntegralKind::Nabla => nabla_derivative(f, t),
        IntegralKind::DiamondAlpha { alpha_weight } => Ok(alpha_weight
            * delta_derivative(f, t)?
            + (1.0 - alpha_weight) * nabla_derivative(f, t)?),
    }
}
