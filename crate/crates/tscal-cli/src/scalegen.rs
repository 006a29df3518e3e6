//! Random time-scale generation for sweeps and the ladder-condition
//! search: 1-4 segments, endpoints drawn from [0, 10], interval
//! probability 0.5, q drawn from (1, 3].

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tscal::timescale::Segment;
use tscal::TimeScale;

pub fn random_hybrid_scale(rng: &mut ChaCha8Rng) -> TimeScale {
    loop {
        let n = rng.gen_range(1..=4);
        let mut cursor: f64 = rng.gen_range(0.0..2.0);
        let mut segments = Vec::new();
        for _ in 0..n {
            if cursor > 8.5 {
                break;
            }
            if rng.gen_bool(0.5) {
                let len = rng.gen_range(0.3..(10.0 - cursor).min(3.0));
                segments.push(Segment::Interval {
                    lo: cursor,
                    hi: cursor + len,
                });
                cursor += len + rng.gen_range(0.2..1.0);
            } else {
                segments.push(Segment::Point(cursor));
                cursor += rng.gen_range(0.2..1.5);
            }
        }
        if segments.is_empty() {
            continue;
        }
        let scale = TimeScale::from_segments(segments).unwrap();
        // enough sampling points for a meaningful verdict
        if scale.grid_in(0.2, scale.min(), scale.max()).len() >= 4 {
            return scale;
        }
    }
}

pub fn random_q(rng: &mut ChaCha8Rng) -> f64 {
    // q in (1, 3]
    3.0 - rng.gen_range(0.0..2.0)
}
