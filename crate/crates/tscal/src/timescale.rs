//! Hybrid time scales: ordered unions of closed intervals and isolated points.
//!
//! A [`TimeScale`] is the domain of every integral and derivative in this
//! crate. The canonical infinite scales (the naturals, geometric `q`-power
//! scales) are represented truncated at a recorded `n_max`.

use crate::error::{Result, TsError};

/// Relative tolerance for membership and endpoint comparisons.
///
/// `q^k` ladders accumulate rounding, so membership is decided up to
/// `TAU_MEMBER * max(1, |t|)`.
pub const TAU_MEMBER: f64 = 1e-12;

pub(crate) fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TAU_MEMBER * 1.0_f64.max(a.abs()).max(b.abs())
}

/// One maximal piece of a time scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    /// Closed interval `[lo, hi]` with `hi - lo > 0`.
    Interval { lo: f64, hi: f64 },
    /// Isolated point.
    Point(f64),
}

impl Segment {
    pub fn inf(&self) -> f64 {
        match *self {
            Segment::Interval { lo, .. } => lo,
            Segment::Point(x) => x,
        }
    }

    pub fn sup(&self) -> f64 {
        match *self {
            Segment::Interval { hi, .. } => hi,
            Segment::Point(x) => x,
        }
    }
}

/// Canonical tag used for closed-form dispatch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleLabel {
    Reals,
    /// `{0, 1, ..., n_max}`.
    Naturals { n_max: u32 },
    /// `{q^0, q^1, ..., q^n_max}` with `q > 1`.
    QPowers { q: f64, n_max: u32 },
    Custom,
}

/// A finite hybrid point set: disjoint, strictly ordered segments.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeScale {
    segments: Vec<Segment>,
    label: ScaleLabel,
}

/// Right/left denseness of a point, plus boundary flags.
///
/// The maximum is right-scattered by convention (with zero graininess) and
/// the minimum left-dense by convention; both conventions are flagged so
/// callers can tell them apart from structural classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointClass {
    pub right_scattered: bool,
    pub left_scattered: bool,
    pub at_min: bool,
    pub at_max: bool,
}

/// Where a point sits inside a scale.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Location {
    pub seg: usize,
    /// Point coordinate snapped onto the scale.
    pub snapped: f64,
}

impl TimeScale {
    pub fn from_segments(segments: Vec<Segment>) -> Result<Self> {
        Self::from_segments_labeled(segments, ScaleLabel::Custom)
    }

    pub(crate) fn from_segments_labeled(segments: Vec<Segment>, label: ScaleLabel) -> Result<Self> {
        if segments.is_empty() {
            return Err(TsError::EndpointsNotInScale);
        }
        for seg in &segments {
            if let Segment::Interval { lo, hi } = seg {
                if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
                    // degenerate intervals must be Point
                    return Err(TsError::PointNotInScale(*lo));
                }
            }
        }
        for pair in segments.windows(2) {
            if !(pair[0].sup() < pair[1].inf()) || close(pair[0].sup(), pair[1].inf()) {
                return Err(TsError::PointNotInScale(pair[1].inf()));
            }
        }
        Ok(TimeScale { segments, label })
    }

    /// The continuous interval `[a, b]`.
    pub fn reals(a: f64, b: f64) -> Result<Self> {
        Self::from_segments_labeled(vec![Segment::Interval { lo: a, hi: b }], ScaleLabel::Reals)
    }

    /// `{0, 1, ..., n_max}`, the truncated naturals.
    pub fn naturals(n_max: u32) -> Self {
        let segs = (0..=n_max).map(|k| Segment::Point(k as f64)).collect();
        TimeScale {
            segments: segs,
            label: ScaleLabel::Naturals { n_max },
        }
    }

    /// `{q^0, ..., q^n_max}` with `q > 1`, the truncated geometric scale.
    pub fn q_powers(q: f64, n_max: u32) -> Result<Self> {
        if !(q > 1.0) {
            return Err(TsError::UnsupportedScaleTag);
        }
        let mut x = 1.0;
        let mut segs = Vec::with_capacity(n_max as usize + 1);
        for _ in 0..=n_max {
            segs.push(Segment::Point(x));
            x *= q;
        }
        Ok(TimeScale {
            segments: segs,
            label: ScaleLabel::QPowers { q, n_max },
        })
    }

    /// A pure point scale from a strictly increasing list.
    pub fn points(xs: &[f64]) -> Result<Self> {
        Self::from_segments(xs.iter().map(|&x| Segment::Point(x)).collect())
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn label(&self) -> ScaleLabel {
        self.label
    }

    pub fn min(&self) -> f64 {
        self.segments.first().unwrap().inf()
    }

    pub fn max(&self) -> f64 {
        self.segments.last().unwrap().sup()
    }

    pub(crate) fn locate(&self, t: f64) -> Option<Location> {
        for (i, seg) in self.segments.iter().enumerate() {
            match *seg {
                Segment::Point(x) => {
                    if close(t, x) {
                        return Some(Location { seg: i, snapped: x });
                    }
                }
                Segment::Interval { lo, hi } => {
                    if close(t, lo) {
                        return Some(Location { seg: i, snapped: lo });
                    }
                    if close(t, hi) {
                        return Some(Location { seg: i, snapped: hi });
                    }
                    if t > lo && t < hi {
                        return Some(Location { seg: i, snapped: t });
                    }
                }
            }
        }
        None
    }

    pub fn member(&self, t: f64) -> bool {
        self.locate(t).is_some()
    }

    fn require(&self, t: f64) -> Result<Location> {
        self.locate(t).ok_or(TsError::PointNotInScale(t))
    }

    /// Forward jump operator: the infimum of scale points strictly above `t`,
    /// or `t` itself at right-dense points and at the maximum.
    pub fn sigma(&self, t: f64) -> Result<f64> {
        let loc = self.require(t)?;
        let t = loc.snapped;
        match self.segments[loc.seg] {
            Segment::Interval { hi, .. } if t < hi && !close(t, hi) => Ok(t),
            _ => {
                // at a segment supremum: jump to the next segment if any
                if loc.seg + 1 < self.segments.len() {
                    Ok(self.segments[loc.seg + 1].inf())
                } else {
                    Ok(t)
                }
            }
        }
    }

    /// Backward jump operator: the supremum of scale points strictly below `t`,
    /// or `t` itself at left-dense points and at the minimum.
    pub fn rho(&self, t: f64) -> Result<f64> {
        let loc = self.require(t)?;
        let t = loc.snapped;
        match self.segments[loc.seg] {
            Segment::Interval { lo, .. } if t > lo && !close(t, lo) => Ok(t),
            _ => {
                if loc.seg > 0 {
                    Ok(self.segments[loc.seg - 1].sup())
                } else {
                    Ok(t)
                }
            }
        }
    }

    /// Forward graininess `mu(t) = sigma(t) - t`.
    pub fn mu(&self, t: f64) -> Result<f64> {
        Ok(self.sigma(t)? - t)
    }

    /// Backward graininess `nu(t) = t - rho(t)`.
    pub fn nu(&self, t: f64) -> Result<f64> {
        Ok(t - self.rho(t)?)
    }

    pub fn classify(&self, t: f64) -> Result<PointClass> {
        let loc = self.require(t)?;
        let t = loc.snapped;
        let at_min = close(t, self.min());
        let at_max = close(t, self.max());
        let right_scattered = at_max || self.sigma(t)? > t + TAU_MEMBER * 1.0_f64.max(t.abs());
        let left_scattered = !at_min && self.rho(t)? < t - TAU_MEMBER * 1.0_f64.max(t.abs());
        Ok(PointClass {
            right_scattered,
            left_scattered,
            at_min,
            at_max,
        })
    }

    /// All isolated points plus each interval discretized at step `<= resolution`,
    /// endpoints included. Strictly increasing and deterministic.
    pub fn enumerate_grid(&self, resolution: f64) -> Vec<f64> {
        assert!(resolution > 0.0, "resolution must be positive");
        let mut out = Vec::new();
        for seg in &self.segments {
            match *seg {
                Segment::Point(x) => out.push(x),
                Segment::Interval { lo, hi } => {
                    let raw = (hi - lo) / resolution;
                    let n = ((raw - 1e-9).ceil().max(1.0)) as usize;
                    let step = (hi - lo) / n as f64;
                    for i in 0..n {
                        out.push(lo + step * i as f64);
                    }
                    out.push(hi);
                }
            }
        }
        out
    }

    /// Grid points restricted to `[a, b]`.
    pub fn grid_in(&self, resolution: f64, a: f64, b: f64) -> Vec<f64> {
        self.enumerate_grid(resolution)
            .into_iter()
            .filter(|&t| (t >= a || close(t, a)) && (t <= b || close(t, b)))
            .collect()
    }
}
