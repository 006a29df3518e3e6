//! Generalized monomials `h_m(t, s0)` on a time scale.
//!
//! `h_0 = 1` and `h_m(t, s0)` is the Delta integral of `h_{m-1}(., s0)`
//! from `s0` to `t`. Within a continuous interval segment every `h_m` is a
//! polynomial, so the ladder is propagated as exact piecewise polynomials
//! plus exact scattered-gap sums; no quadrature error enters.

use crate::error::{Result, TsError};
use crate::timescale::{Segment, TimeScale};

/// Absolute zero-denominator tolerance for the ratio condition; `h` values
/// vanish polynomially near the anchor.
pub const TAU_ZERO: f64 = 1e-12;

/// Per-segment representation of one ladder row.
#[derive(Debug, Clone)]
enum Piece {
    /// Polynomial coefficients in `(t - lo)`, ascending order.
    Poly(Vec<f64>),
    /// Value at an isolated point.
    Val(f64),
}

impl Piece {
    fn eval(&self, seg: &Segment, t: f64) -> f64 {
        match self {
            Piece::Val(v) => *v,
            Piece::Poly(coeffs) => {
                let x = t - seg.inf();
                coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
            }
        }
    }
}

/// Monomial ladder over a scale, anchored at `s0`, orders `0..=max_order`.
pub struct MonomialCtx {
    scale: TimeScale,
    s0: f64,
    max_order: usize,
    rows: Vec<Vec<Piece>>,
}

fn antiderivative(coeffs: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(coeffs.len() + 1);
    out.push(0.0);
    for (k, &c) in coeffs.iter().enumerate() {
        out.push(c / (k + 1) as f64);
    }
    out
}

impl MonomialCtx {
    pub fn new(scale: TimeScale, s0: f64, max_order: usize) -> Result<Self> {
        let s0 = scale
            .locate(s0)
            .ok_or(TsError::PointNotInScale(s0))?
            .snapped;
        let segments = scale.segments().to_vec();

        let row0: Vec<Piece> = segments
            .iter()
            .map(|seg| match seg {
                Segment::Interval { .. } => Piece::Poly(vec![1.0]),
                Segment::Point(_) => Piece::Val(1.0),
            })
            .collect();
        let mut rows = vec![row0];

        for _m in 1..=max_order {
            let prev = rows.last().unwrap();
            // cumulative integral of the previous row from the scale minimum
            let mut acc = 0.0;
            let mut cum: Vec<Piece> = Vec::with_capacity(segments.len());
            for (i, seg) in segments.iter().enumerate() {
                match (seg, &prev[i]) {
                    (Segment::Interval { lo: _, hi }, Piece::Poly(p)) => {
                        let mut anti = antiderivative(p);
                        anti[0] = acc;
                        let end = Piece::Poly(anti.clone()).eval(seg, *hi);
                        cum.push(Piece::Poly(anti));
                        acc = end;
                        if i + 1 < segments.len() {
                            let prev_at_hi = prev[i].eval(seg, *hi);
                            acc += (segments[i + 1].inf() - hi) * prev_at_hi;
                        }
                    }
                    (Segment::Point(x), Piece::Val(v)) => {
                        cum.push(Piece::Val(acc));
                        if i + 1 < segments.len() {
                            acc += (segments[i + 1].inf() - x) * v;
                        }
                    }
                    _ => unreachable!("row pieces track segment shapes"),
                }
            }
            // shift so the row vanishes at the anchor
            let loc = scale.locate(s0).unwrap();
            let offset = cum[loc.seg].eval(&segments[loc.seg], s0);
            for piece in &mut cum {
                match piece {
                    Piece::Poly(c) => c[0] -= offset,
                    Piece::Val(v) => *v -= offset,
                }
            }
            rows.push(cum);
        }

        Ok(MonomialCtx {
            scale,
            s0,
            max_order,
            rows,
        })
    }

    pub fn scale(&self) -> &TimeScale {
        &self.scale
    }

    pub fn anchor(&self) -> f64 {
        self.s0
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// `h_m(t, s0)` by the iterated-integral recursion.
    pub fn h_recursive(&self, m: usize, t: f64) -> Result<f64> {
        if m > self.max_order {
            return Err(TsError::OrderExceedsContext {
                order: m,
                max_order: self.max_order,
            });
        }
        let loc = self
            .scale
            .locate(t)
            .ok_or(TsError::PointNotInScale(t))?;
        Ok(self.rows[m][loc.seg].eval(&self.scale.segments()[loc.seg], loc.snapped))
    }

    /// Cross-multiplied margin of the ratio condition at `(m, t)`:
    /// `h_{m+1}^2 - h_{m+2} * h_m`. Nonnegative iff the condition holds
    /// there when all `h` values are positive.
    pub fn con_margin(&self, m: usize, t: f64) -> Result<ConMargin> {
        if m + 2 > self.max_order {
            return Err(TsError::OrderExceedsContext {
                order: m + 2,
                max_order: self.max_order,
            });
        }
        let h_m = self.h_recursive(m, t)?;
        let h_m1 = self.h_recursive(m + 1, t)?;
        let h_m2 = self.h_recursive(m + 2, t)?;
        if h_m1.abs() <= TAU_ZERO || h_m.abs() <= TAU_ZERO {
            return Err(TsError::DegenerateDenominator { at: t, tol: TAU_ZERO });
        }
        let margin = h_m1 * h_m1 - h_m2 * h_m;
        let sign = if margin > TAU_ZERO {
            Sign::Positive
        } else if margin < -TAU_ZERO {
            Sign::Negative
        } else {
            Sign::Zero
        };
        Ok(ConMargin { margin, sign })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Zero,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConMargin {
    pub margin: f64,
    pub sign: Sign,
}

/// Scale tags with a known closed form for `h_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedFormTag {
    Reals,
    Integers,
    QPowers { q: f64 },
}

/// The closed forms: `(t-s0)^m / m!` on the reals, the falling factorial
/// over `m!` on the integers, and the q-product on geometric scales.
pub fn h_closed_form(tag: ClosedFormTag, m: usize, t: f64, s0: f64) -> Result<f64> {
    if m == 0 {
        return Ok(1.0);
    }
    match tag {
        ClosedFormTag::Reals => {
            let mut fact = 1.0;
            for k in 1..=m {
                fact *= k as f64;
            }
            Ok((t - s0).powi(m as i32) / fact)
        }
        ClosedFormTag::Integers => {
            let mut num = 1.0;
            let mut fact = 1.0;
            for k in 0..m {
                num *= t - s0 - k as f64;
                fact *= (k + 1) as f64;
            }
            Ok(num / fact)
        }
        ClosedFormTag::QPowers { q } => {
            if !(q > 1.0) {
                return Err(TsError::UnsupportedScaleTag);
            }
            let mut prod = 1.0;
            let mut q_pow = 1.0; // q^u
            let mut denom = 0.0; // sum_{l=0}^{u} q^l
            for _u in 0..m {
                denom += q_pow;
                prod *= (t - q_pow * s0) / denom;
                q_pow *= q;
            }
            Ok(prod)
        }
    }
}
