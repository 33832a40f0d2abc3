//! Acoustic noise simulation, loudness prediction, and noise-aware path
//! planning on 2D indoor maps.
//!
//! The crate is organized as a pipeline:
//!
//! 1. [`gridmap`] — material-annotated occupancy grids, line of sight, and
//!    source/listener sampling.
//! 2. [`acoustics`] — a 2D specular ray tracer producing time-binned impulse
//!    histograms, plus the intensity -> dB -> normalized-label pipeline.
//! 3. [`sensing`] — geometric 360-degree panorama scans and model feature
//!    vectors.
//! 4. [`dataset`] — supervised sample generation and JSONL serialization.
//! 5. [`predictor`] — the loudness predictor family (distance heuristic,
//!    linear regression, MLPs with and without scan features, binned
//!    classifiers) trained from scratch with manual gradients.
//! 6. [`metrics`] — epsilon-thresholded accuracy curves and distribution
//!    dumps.
//! 7. [`acousticmap`] — dense fixed-robot / fixed-listener prediction
//!    rasters.
//! 8. [`planner`] — A* search trading travel time against predicted noise
//!    exposure at listeners.
//! 9. [`audiomeasure`] — WAV ingestion and the FFT-based peak-decibel
//!    pipeline for real recordings.
//!
//! [`fixtures`] builds the bundled benchmark maps and [`cli`] wires
//! everything into the `anavi` command-line tool. Each major capability also
//! has a runnable example under `examples/`.

pub mod acousticmap;
pub mod acoustics;
pub mod audiomeasure;
pub mod cli;
pub mod dataset;
pub mod fixtures;
pub mod gridmap;
pub mod metrics;
pub mod nn;
pub mod planner;
pub mod predictor;
mod raycast;
pub mod sensing;

pub use acoustics::{heuristic_db, histogram_to_label, scale_action_db, AcousticConfig, DbLabel};
pub use gridmap::{load_map, sample_pair, GridMap, MaterialTable, Pose2};
pub use sensing::{build_features, scan_panorama, FeatureLayout, FeatureVector, PanoramaScan};

/// Derive an independent substream seed from a base seed and a stream index.
///
/// SplitMix64-style mixing; used everywhere a deterministic per-sample or
/// per-worker random stream is needed.
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(index.wrapping_mul(0xbf58_476d_1ce4_e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
