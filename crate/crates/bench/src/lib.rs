//! Shared workloads for the kernel benchmarks.

use dsad_core::synth::{generate_synthetic, Generator, Segment, SyntheticSpec};
use dsad_core::{DetectorConfig, Lag, RankRule, TimeSeries};

/// Stationary AR(2) noise of `len` samples.
pub fn ar2_series(len: usize, seed: u64) -> TimeSeries {
    generate_synthetic(&SyntheticSpec {
        segments: vec![Segment {
            generator: Generator::Ar2 { a1: 1.6, a2: -0.9, sigma: 1.0 },
            length: len,
        }],
        seed,
        label_half_width: 0,
    })
    .expect("valid synthetic spec")
}

/// Detector settings with square `w × w` windows and `r`-dimensional subspaces.
pub fn config(w: usize, r: usize) -> DetectorConfig {
    DetectorConfig {
        window_width: w,
        window_count: w,
        lag: Lag::Overlap(0.5),
        signal_rank: RankRule::Fixed(r),
        reference_dims: 2 * r,
        angle_count: r.min(5),
        ..DetectorConfig::default()
    }
}
