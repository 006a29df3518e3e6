//! Numerical calculus on time scales — closed subsets of the reals that mix
//! continuous intervals with isolated points — plus checkers for
//! monotonicity rules about quotients of integrals.
//!
//! The core objects:
//!
//! - [`TimeScale`]: a finite union of closed intervals and points, with the
//!   jump operators `sigma`/`rho` and graininess `mu`/`nu`.
//! - [`calculus`]: delta, nabla, and diamond-alpha derivatives and
//!   integrals of a [`GridFn`].
//! - [`MonomialCtx`]: the ladder of generalized monomials `h_m(t, s0)`
//!   built by repeated delta integration, with closed forms on the
//!   classical scales.
//! - [`monotonicity`]: quotient constructions and hypothesis checkers that
//!   sample a quotient of integrals and verify a claimed direction.
//!
//! # Example
//!
//! On the integers `{0, 1, ..., 10}` the delta integral is a plain left
//! sum and the delta derivative is the forward difference:
//!
//! ```
//! use tscal::{TimeScale, GridFn, IntegralKind, calculus};
//!
//! let scale = TimeScale::naturals(10);
//! let f = GridFn::parse(scale, "u^2").unwrap();
//! // sum of 0^2 + 1^2 + 2^2 over [0, 3)
//! let s = calculus::integral(IntegralKind::Delta, &f, 0.0, 3.0).unwrap();
//! assert_eq!(s, 5.0);
//! // ((t+1)^2 - t^2) / 1 = 2t + 1
//! let d = calculus::derivative(IntegralKind::Delta, &f, 3.0).unwrap();
//! assert_eq!(d, 7.0);
//! ```
//!
//! Monomials agree with their closed forms on classical scales:
//!
//! ```
//! use tscal::{TimeScale, MonomialCtx, monomials::{h_closed_form, ClosedFormTag}};
//!
//! let ctx = MonomialCtx::new(TimeScale::naturals(20), 0.0, 5).unwrap();
//! let h2 = ctx.h_recursive(2, 3.0).unwrap();
//! assert_eq!(h2, 3.0); // 3 * 2 / 2
//! assert_eq!(h2, h_closed_form(ClosedFormTag::Integers, 2, 3.0, 0.0).unwrap());
//! ```

pub mod calculus;
pub mod error;
pub mod exprlang;
pub mod monomials;
pub mod monotonicity;
pub mod timescale;

pub use calculus::{GridFn, IntegralKind};
pub use error::{Result, TsError};
pub use exprlang::Expression;
pub use monomials::MonomialCtx;
pub use monotonicity::{
    CheckOptions, Direction, Kernel2, MonotoneVerdict, ParamFn, Strictness, Verdict,
};
pub use timescale::{PointClass, ScaleLabel, Segment, TimeScale};
