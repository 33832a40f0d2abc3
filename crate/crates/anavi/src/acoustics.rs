//! Impulse tracing and the intensity -> decibel -> normalized-label pipeline.
//!
//! [`trace_impulse`] replaces a full room-impulse-response simulator with a
//! 2D specular ray tracer. The result is an energy-per-time-bin histogram at
//! the listener rather than a pressure waveform; the label pipeline takes the
//! peak bin intensity, clips it, and converts to decibels re 1e-12 W/m^2.
//!
//! Spreading is calibrated to 3D spherical decay (intensity 1/d^2) so that
//! free-field results land on the -20*log10(r) + 120 distance law. Each
//! captured reflected ray therefore deposits
//!
//! ```text
//! k * pi / (n_rays * listener_radius * D)
//! ```
//!
//! where `k` is the carried reflectivity and `D` the unfolded path length:
//! a disk of radius `rl` at distance `D` captures a uniformly-directed ray
//! with probability `rl / (pi * D)`, so dividing the physical `k / D^2`
//! target by that probability and by `n_rays` yields the per-ray deposit.
//! The calibration is covered by the free-field and mirror-image tests, not
//! assumed.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridmap::{GridMap, MaterialTable, Pose2};

/// Reference intensity of the faintest audible sound, W/m^2.
pub const REFERENCE_INTENSITY: f64 = 1e-12;
/// Upper intensity clip, 10^0.8 W/m^2, i.e. 128 dB.
pub const INTENSITY_CEILING_LOG10: f64 = 0.8;
/// Normalization base: the largest representable level in dB.
pub const DB_CEILING: f64 = 128.0;

#[derive(Debug, Error)]
pub enum AcousticsError {
    #[error("{who} pose ({x}, {y}) is not traversable")]
    NotTraversable { who: &'static str, x: f64, y: f64 },
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("normalized level {0} outside [0, 1]")]
    LabelOutOfRange(f64),
    #[error("source level must be positive, got {0}")]
    NonPositiveSourceDb(f64),
    #[error(transparent)]
    Map(#[from] crate::gridmap::MapError),
}

/// Tracer and physical-constant settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcousticConfig {
    /// Stochastic rays cast per trace.
    pub n_rays: usize,
    /// Maximum specular reflections per ray.
    pub max_bounces: usize,
    /// Rays are dropped once carried reflectivity falls below this.
    pub energy_floor: f64,
    /// Capture radius around the listener, meters. Also the lower clamp on
    /// the direct-path distance.
    pub listener_radius: f64,
    /// Air density rho, kg/m^3.
    pub air_density: f64,
    /// Speed of sound c, m/s.
    pub sound_speed: f64,
    /// Source intensity at 1 m, W/m^2. Fixed at 1.0 so that a free-field
    /// listener at unit distance reads 120 dB.
    pub source_intensity: f64,
    /// Histogram bin width, seconds.
    pub bin_width: f64,
    /// Histogram extent, seconds; arrivals beyond it are dropped.
    pub max_time: f64,
}

impl Default for AcousticConfig {
    fn default() -> Self {
        Self {
            n_rays: 4096,
            max_bounces: 8,
            energy_floor: 1e-9,
            listener_radius: 0.25,
            air_density: 1.225,
            sound_speed: 343.0,
            source_intensity: 1.0,
            bin_width: 0.001,
            max_time: 0.2,
        }
    }
}

/// Time-binned acoustic intensity at a listener for a unit impulse at a
/// source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpulseHistogram {
    pub bin_width: f64,
    pub bins: Vec<f64>,
    /// Number of recorded arrivals (direct + captured reflections).
    pub total_paths: usize,
}

impl ImpulseHistogram {
    pub fn empty(cfg: &AcousticConfig) -> Self {
        let n = (cfg.max_time / cfg.bin_width).ceil() as usize;
        Self {
            bin_width: cfg.bin_width,
            bins: vec![0.0; n],
            total_paths: 0,
        }
    }

    fn record(&mut self, time: f64, intensity: f64) {
        let bin = (time / self.bin_width) as usize;
        if bin < self.bins.len() {
            self.bins[bin] += intensity;
            self.total_paths += 1;
        }
    }

    pub fn peak_intensity(&self) -> f64 {
        self.bins.iter().copied().fold(0.0, f64::max)
    }

    pub fn total_intensity(&self) -> f64 {
        self.bins.iter().sum()
    }

    /// CSV rows of `time_bin_s,intensity` with header, for debugging dumps.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("time_bin_s,intensity\n");
        for (i, v) in self.bins.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i as f64 * self.bin_width, v));
        }
        out
    }
}

/// A peak decibel level and its normalized form `y = db_max / 128`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbLabel {
    pub db_max: f64,
    pub y: f64,
}

impl DbLabel {
    fn from_db(db_max: f64) -> Self {
        Self {
            db_max,
            y: db_max / DB_CEILING,
        }
    }
}

/// Peak-bin intensity -> clip -> decibels -> normalized label.
///
/// The clip to `[1e-12, 10^0.8]` makes the conversion total: an all-zero
/// histogram maps to 0 dB and y = 0.
pub fn histogram_to_label(h: &ImpulseHistogram) -> DbLabel {
    intensity_to_label(h.peak_intensity())
}

/// The clip-and-log step shared by the tracer and waveform paths.
pub fn intensity_to_label(i_max: f64) -> DbLabel {
    let clipped = i_max.clamp(REFERENCE_INTENSITY, 10f64.powf(INTENSITY_CEILING_LOG10));
    DbLabel::from_db(10.0 * clipped.log10() + 120.0)
}

/// Distance-only loudness estimate from spherical spreading,
/// `-20 * log10(r) + 120`, clamped into [0, 128] dB.
pub fn heuristic_db(r: f64) -> Result<DbLabel, AcousticsError> {
    if !(r > 0.0) {
        return Err(AcousticsError::NonPositiveDistance(r));
    }
    let db = (-20.0 * r.log10() + 120.0).clamp(0.0, DB_CEILING);
    Ok(DbLabel::from_db(db))
}

/// Loudness of a robot action at the listener: the normalized impulse
/// transfer `y` scales the action's source level linearly.
pub fn scale_action_db(y: f64, source_db: f64) -> Result<f64, AcousticsError> {
    if !(0.0..=1.0).contains(&y) || !y.is_finite() {
        return Err(AcousticsError::LabelOutOfRange(y));
    }
    if !(source_db > 0.0) {
        return Err(AcousticsError::NonPositiveSourceDb(source_db));
    }
    Ok(y * source_db)
}

use crate::raycast::{RayState, WalkEvent};

/// Trace a unit impulse from `source` and histogram the intensity arriving
/// at `listener`.
///
/// The direct path is deterministic: with line of sight, intensity `1/d^2`
/// arrives at time `d/c`, `d` clamped below by the listener radius. The
/// reflected field is estimated with `n_rays` stratified rays sharing one
/// seeded angular jitter; zeroth-bounce segments never tally so the direct
/// term is not double counted.
pub fn trace_impulse<R: Rng>(
    map: &GridMap,
    materials: &MaterialTable,
    source: &Pose2,
    listener: &Pose2,
    cfg: &AcousticConfig,
    rng: &mut R,
) -> Result<ImpulseHistogram, AcousticsError> {
    if !map.is_traversable(source)? {
        return Err(AcousticsError::NotTraversable { who: "source", x: source.x, y: source.y });
    }
    if !map.is_traversable(listener)? {
        return Err(AcousticsError::NotTraversable {
            who: "listener",
            x: listener.x,
            y: listener.y,
        });
    }

    let mut hist = ImpulseHistogram::empty(cfg);

    // Deterministic direct term.
    if map.line_of_sight(source, listener)? {
        let d = source.distance(listener).max(cfg.listener_radius);
        hist.record(d / cfg.sound_speed, cfg.source_intensity / (d * d));
    }

    // Stochastic reflected term: stratified directions with one shared jitter.
    let jitter: f64 = rng.gen::<f64>();
    let (start_ix, start_iy) = map.cell_of(source)?;
    for ray in 0..cfg.n_rays {
        let angle = (ray as f64 + jitter) * std::f64::consts::TAU / cfg.n_rays as f64;
        let mut state = RayState {
            x: source.x,
            y: source.y,
            ux: angle.cos(),
            uy: angle.sin(),
            ix: start_ix as isize,
            iy: start_iy as isize,
        };
        let mut reflectivity = 1.0f64;
        let mut accumulated = 0.0f64;
        let mut bounces = 0usize;

        loop {
            let seg_start = (state.x, state.y);
            let (seg_len, event) = state.walk(map, materials);

            if bounces >= 1 && seg_len > 0.0 {
                // Closest approach of the listener to this segment.
                let wx = listener.x - seg_start.0;
                let wy = listener.y - seg_start.1;
                let along = (wx * state.ux + wy * state.uy).clamp(0.0, seg_len);
                let cx = seg_start.0 + state.ux * along;
                let cy = seg_start.1 + state.uy * along;
                let miss = (listener.x - cx).hypot(listener.y - cy);
                if miss <= cfg.listener_radius {
                    let unfolded = accumulated + along;
                    let contribution = reflectivity * std::f64::consts::PI
                        / (cfg.n_rays as f64 * cfg.listener_radius * unfolded);
                    hist.record(unfolded / cfg.sound_speed, contribution);
                }
            }

            match event {
                WalkEvent::Exit => break,
                WalkEvent::Hit { flip_x, flip_y, absorption } => {
                    if bounces + 1 > cfg.max_bounces {
                        break;
                    }
                    bounces += 1;
                    reflectivity *= 1.0 - absorption;
                    if reflectivity < cfg.energy_floor {
                        break;
                    }
                    if flip_x {
                        state.ux = -state.ux;
                    }
                    if flip_y {
                        state.uy = -state.uy;
                    }
                    accumulated += seg_len;
                }
            }
        }
    }

    Ok(hist)
}
