//! Real-recording ingestion: decode WAV files to mono waveforms and run the
//! FFT -> intensity -> peak-decibel pipeline on them.
//!
//! The waveform path mirrors what [`crate::acoustics`] does for traced
//! impulses, but starts from a pressure-like recording: transform to the
//! frequency domain, convert bin magnitudes to intensity via `|W|^2 / (rho *
//! c)`, take the peak, clip, and convert to dB re 1e-12 W/m^2. Uncalibrated
//! microphones only measure relative level, so an explicit calibration
//! offset is added at the end; comparisons at offset 0 remain exact.

use std::path::Path;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acoustics::{intensity_to_label, scale_action_db};
use crate::predictor::PredictorModel;
use crate::sensing::{build_features, PanoramaScan, MAX_PAIR_DISTANCE};

/// Air density (kg/m^3) and speed of sound (m/s) used by the intensity
/// conversion; the same standard values as [`crate::acoustics::AcousticConfig`].
pub const AIR_DENSITY: f64 = 1.225;
pub const SOUND_SPEED: f64 = 343.0;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed wav file {path}: {detail}")]
    Malformed { path: String, detail: String },
    #[error("unsupported wav encoding in {path}: {detail} (PCM16 and float32, mono or stereo)")]
    Unsupported { path: String, detail: String },
    #[error("empty waveform")]
    EmptyWaveform,
    #[error("unknown compass direction '{0}'")]
    BadDirection(String),
    #[error("distance {0} m is beyond the 10 m model support")]
    DistanceTooFar(f64),
    #[error(transparent)]
    Predictor(#[from] crate::predictor::PredictorError),
    #[error(transparent)]
    Sensing(#[from] crate::sensing::SensingError),
    #[error(transparent)]
    Acoustics(#[from] crate::acoustics::AcousticsError),
}

/// A mono waveform with samples normalized into [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub sample_rate: u32,
    pub samples: Vec<f64>,
}

impl Waveform {
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}

/// Decode a RIFF/WAVE file: 16-bit PCM or 32-bit float, mono or
/// stereo-downmixed-to-mono.
pub fn load_wav(path: &Path) -> Result<Waveform, AudioError> {
    let reader = hound::WavReader::open(path).map_err(|e| match e {
        // Only genuine filesystem failures count as i/o; a header that ends
        // mid-field surfaces as a read error and is a malformed file.
        hound::Error::IoError(source)
            if matches!(
                source.kind(),
                std::io::ErrorKind::NotFound | std::io::ErrorKind::PermissionDenied
            ) =>
        {
            AudioError::Io { path: path.display().to_string(), source }
        }
        other => AudioError::Malformed { path: path.display().to_string(), detail: other.to_string() },
    })?;
    let spec = reader.spec();
    if spec.channels == 0 || spec.channels > 2 {
        return Err(AudioError::Unsupported {
            path: path.display().to_string(),
            detail: format!("{} channels", spec.channels),
        });
    }
    let mono = |interleaved: Vec<f64>| -> Vec<f64> {
        if spec.channels == 1 {
            interleaved
        } else {
            interleaved.chunks(2).map(|c| (c[0] + c[1]) / 2.0).collect()
        }
    };
    let samples = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => {
            let raw: Result<Vec<i16>, _> = reader.into_samples::<i16>().collect();
            let raw = raw.map_err(|e| AudioError::Malformed {
                path: path.display().to_string(),
                detail: e.to_string(),
            })?;
            mono(raw.into_iter().map(|s| s as f64 / 32768.0).collect())
        }
        (hound::SampleFormat::Float, 32) => {
            let raw: Result<Vec<f32>, _> = reader.into_samples::<f32>().collect();
            let raw = raw.map_err(|e| AudioError::Malformed {
                path: path.display().to_string(),
                detail: e.to_string(),
            })?;
            mono(raw.into_iter().map(|s| (s as f64).clamp(-1.0, 1.0)).collect())
        }
        (format, bits) => {
            return Err(AudioError::Unsupported {
                path: path.display().to_string(),
                detail: format!("{format:?} at {bits} bits"),
            })
        }
    };
    Ok(Waveform { sample_rate: spec.sample_rate, samples })
}

/// Encode a waveform as 16-bit PCM; the inverse of [`load_wav`] for PCM16
/// content, sample-exact on round trip. Used to synthesize test and demo
/// recordings.
pub fn write_wav_pcm16(path: &Path, w: &Waveform) -> Result<(), AudioError> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: w.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(|e| AudioError::Malformed {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    for &s in &w.samples {
        let q = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        writer.write_sample(q).map_err(|e| AudioError::Malformed {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
    }
    writer.finalize().map_err(|e| AudioError::Malformed {
        path: path.display().to_string(),
        detail: e.to_string(),
    })
}

/// Magnitude spectrum of the zero-padded transform, normalized by the
/// original window length.
fn magnitude_spectrum(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let padded = n.next_power_of_two();
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&s| Complex::new(s, 0.0)).collect();
    buf.resize(padded, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(padded).process(&mut buf);
    buf.iter().map(|c| c.norm() / n as f64).collect()
}

/// Peak decibels of a recording: FFT magnitude -> intensity `|W|^2/(rho*c)`
/// -> peak -> clip -> dB, plus the calibration offset.
pub fn waveform_db(w: &Waveform, calibration_offset: f64) -> Result<f64, AudioError> {
    if w.samples.is_empty() {
        return Err(AudioError::EmptyWaveform);
    }
    let spectrum = magnitude_spectrum(&w.samples);
    let i_max = spectrum
        .iter()
        .map(|m| m * m / (AIR_DENSITY * SOUND_SPEED))
        .fold(0.0f64, f64::max);
    Ok(intensity_to_label(i_max).db_max + calibration_offset)
}

/// Compass direction text ("N", "SW", ...) to radians counterclockwise from
/// +x, with north at +y.
pub fn direction_to_theta(direction: &str) -> Result<f64, AudioError> {
    use std::f64::consts::PI;
    let theta = match direction.to_ascii_uppercase().as_str() {
        "E" => 0.0,
        "NE" => 0.25 * PI,
        "N" => 0.5 * PI,
        "NW" => 0.75 * PI,
        "W" => PI,
        "SW" => 1.25 * PI,
        "S" => 1.5 * PI,
        "SE" => 1.75 * PI,
        other => return Err(AudioError::BadDirection(other.to_string())),
    };
    Ok(theta)
}

/// One row of a measurement manifest: where the recording was taken.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementSpec {
    pub label: String,
    /// Meters from the source.
    pub distance: f64,
    /// Compass direction from the source ("N", "SW", ...).
    pub direction: String,
    /// Path to the recorded WAV file.
    pub wav: String,
}

/// A prediction-vs-recording comparison row. The error convention is
/// `measured - predicted`: positive when the model underestimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub label: String,
    pub distance: f64,
    pub direction: String,
    pub db_measured: f64,
    pub db_predicted: f64,
    pub error: f64,
}

pub fn records_to_csv(records: &[MeasurementRecord]) -> String {
    let mut out = String::from("label,distance,direction,real_db,pred_db,error\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.label, r.distance, r.direction, r.db_measured, r.db_predicted, r.error
        ));
    }
    out
}

/// Compare recorded loudness against model predictions at each measurement
/// point. The panorama is taken at the source; distances beyond the model
/// support are refused.
pub fn compare_table(
    specs: &[MeasurementSpec],
    model: &PredictorModel,
    scan: &PanoramaScan,
    source_db: f64,
    calibration_offset: f64,
    base_dir: &Path,
) -> Result<Vec<MeasurementRecord>, AudioError> {
    let mut out = Vec::with_capacity(specs.len());
    for spec in specs {
        if spec.distance > MAX_PAIR_DISTANCE {
            return Err(AudioError::DistanceTooFar(spec.distance));
        }
        let theta = direction_to_theta(&spec.direction)?;
        let features = build_features(scan, spec.distance, theta, model.layout())?;
        let y = model.predict(&features)?;
        let db_predicted = scale_action_db(y, source_db)?;
        let wav_path = base_dir.join(&spec.wav);
        let waveform = load_wav(&wav_path)?;
        let db_measured = waveform_db(&waveform, calibration_offset)?;
        out.push(MeasurementRecord {
            label: spec.label.clone(),
            distance: spec.distance,
            direction: spec.direction.clone(),
            db_measured,
            db_predicted,
            error: db_measured - db_predicted,
        });
    }
    Ok(out)
}

/// Amplitude that makes a pure sine read exactly `target_db` through
/// [`waveform_db`] at offset 0 (spectral peak of a full-cycle sine is half
/// the amplitude).
pub fn sine_amplitude_for_db(target_db: f64) -> f64 {
    let i = 10f64.powf((target_db - 120.0) / 10.0);
    2.0 * (i * AIR_DENSITY * SOUND_SPEED).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(amplitude: f64, cycles: usize, n: usize) -> Waveform {
        let samples = (0..n)
            .map(|i| {
                amplitude * (std::f64::consts::TAU * cycles as f64 * i as f64 / n as f64).sin()
            })
            .collect();
        Waveform { sample_rate: 16_000, samples }
    }

    #[test]
    fn silence_decodes_to_zeros() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("silence.wav");
        let w = Waveform { sample_rate: 16_000, samples: vec![0.0; 16_000] };
        write_wav_pcm16(&path, &w).unwrap();
        let loaded = load_wav(&path).unwrap();
        assert_eq!(loaded.samples.len(), 16_000);
        assert!(loaded.samples.iter().all(|&s| s == 0.0));
        assert_eq!(loaded.duration(), 1.0);
    }

    #[test]
    fn full_scale_square_wave_hits_pcm_limits() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("square.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 8000,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut writer = hound::WavWriter::create(&path, spec).unwrap();
        for i in 0..64 {
            writer.write_sample(if i % 2 == 0 { 32767i16 } else { -32767 }).unwrap();
        }
        writer.finalize().unwrap();
        let w = load_wav(&path).unwrap();
        let hi = 32767.0 / 32768.0;
        assert!(w.samples.iter().all(|&s| (s.abs() - hi).abs() < 1e-12));
    }

    #[test]
    fn stereo_averages_to_mono() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stereo.wav");
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 8000,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut writer = hound::WavWriter::create(&path, spec).unwrap();
        for _ in 0..32 {
            writer.write_sample(16384i16).unwrap(); // +0.5
            writer.write_sample(-16384i16).unwrap(); // -0.5
        }
        writer.finalize().unwrap();
        let w = load_wav(&path).unwrap();
        assert_eq!(w.samples.len(), 32);
        assert!(w.samples.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn pcm16_round_trip_is_sample_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.wav");
        let original: Vec<f64> = (-100i32..100)
            .map(|i| (i * 83) as f64 / 32768.0)
            .collect();
        let w = Waveform { sample_rate: 44_100, samples: original.clone() };
        write_wav_pcm16(&path, &w).unwrap();
        let loaded = load_wav(&path).unwrap();
        assert_eq!(loaded.samples, original);
    }

    #[test]
    fn malformed_and_unsupported_files_error() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.wav");
        std::fs::write(&bad, b"RIFFgarbage").unwrap();
        assert!(matches!(load_wav(&bad), Err(AudioError::Malformed { .. })));

        let deep = dir.path().join("24bit.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 8000,
            bits_per_sample: 24,
            sample_format: hound::SampleFormat::Int,
        };
        let mut writer = hound::WavWriter::create(&deep, spec).unwrap();
        writer.write_sample(1i32 << 20).unwrap();
        writer.finalize().unwrap();
        assert!(matches!(load_wav(&deep), Err(AudioError::Unsupported { .. })));
    }

    #[test]
    fn all_zero_waveform_reads_zero_db_plus_offset() {
        let w = Waveform { sample_rate: 16_000, samples: vec![0.0; 512] };
        assert_eq!(waveform_db(&w, 0.0).unwrap(), 0.0);
        assert_eq!(waveform_db(&w, 20.0).unwrap(), 20.0);
        let empty = Waveform { sample_rate: 16_000, samples: vec![] };
        assert!(matches!(waveform_db(&empty, 0.0), Err(AudioError::EmptyWaveform)));
    }

    #[test]
    fn doubling_amplitude_adds_six_db() {
        let a = waveform_db(&sine(0.05, 32, 4096), 0.0).unwrap();
        let b = waveform_db(&sine(0.10, 32, 4096), 0.0).unwrap();
        assert!((b - a - 20.0 * 2f64.log10()).abs() < 0.01, "delta {}", b - a);
    }

    #[test]
    fn unit_impulse_spectrum_is_flat() {
        let mut samples = vec![0.0; 8];
        samples[0] = 1.0;
        let spectrum = magnitude_spectrum(&samples);
        let first = spectrum[0];
        for &m in &spectrum {
            assert!((m - first).abs() < 1e-9);
        }
    }

    #[test]
    fn parseval_energy_identity() {
        use rand::{Rng, SeedableRng};
        for seed in 0..8u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n: usize = rng.gen_range(100..2000);
            let samples: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let time_energy: f64 = samples.iter().map(|s| s * s).sum();
            let padded = n.next_power_of_two();
            let mut buf: Vec<Complex<f64>> =
                samples.iter().map(|&s| Complex::new(s, 0.0)).collect();
            buf.resize(padded, Complex::new(0.0, 0.0));
            FftPlanner::new().plan_fft_forward(padded).process(&mut buf);
            let freq_energy: f64 =
                buf.iter().map(|c| c.norm_sqr()).sum::<f64>() / padded as f64;
            let rel = (time_energy - freq_energy).abs() / time_energy;
            assert!(rel < 1e-9, "seed {seed}: rel {rel}");
        }
    }

    #[test]
    fn amplitude_scaling_is_equivariant_in_db() {
        // Stay inside the clip range so the law is exact.
        let base = sine(0.01, 16, 2048);
        let scaled = sine(0.04, 16, 2048);
        let a = waveform_db(&base, 0.0).unwrap();
        let b = waveform_db(&scaled, 0.0).unwrap();
        assert!((b - a - 20.0 * 4f64.log10()).abs() < 1e-6);
    }

    #[test]
    fn sign_convention_matches_published_rows() {
        // y = 0.66 at source 76 dB predicts 50.16; a real reading of 49
        // yields error -1.16.
        let pred = scale_action_db(0.66, 76.0).unwrap();
        assert!((pred - 50.16).abs() < 1e-9);
        let error = 49.0 - pred;
        assert!((error - (-1.16)).abs() < 1e-9);
    }

    #[test]
    fn synthesized_recording_matches_prediction() {
        use crate::fixtures;
        use crate::sensing::scan_panorama;

        let (map, materials) = fixtures::free_field();
        let origin = map.cell_center(48, 48);
        let scan = scan_panorama(&map, &materials, &origin, 64).unwrap();
        let model = PredictorModel::Heuristic;

        // Predict for a listener 2 m east, then synthesize a sine that
        // measures exactly that level.
        let source_db = 76.0;
        let theta = direction_to_theta("E").unwrap();
        let f = build_features(&scan, 2.0, theta, model.layout()).unwrap();
        let predicted = scale_action_db(model.predict(&f).unwrap(), source_db).unwrap();

        let amplitude = sine_amplitude_for_db(predicted);
        let dir = tempfile::tempdir().unwrap();
        let wav = Waveform {
            sample_rate: 16_000,
            samples: sine(amplitude, 64, 4096).samples,
        };
        // Use float samples directly: skip PCM quantization for exactness.
        let measured = waveform_db(&wav, 0.0).unwrap();
        assert!((measured - predicted).abs() < 1e-6, "measured {measured} predicted {predicted}");

        let spec_row = MeasurementSpec {
            label: "2m-east".into(),
            distance: 2.0,
            direction: "E".into(),
            wav: "m.wav".into(),
        };
        write_wav_pcm16(&dir.path().join("m.wav"), &wav).unwrap();
        let records =
            compare_table(&[spec_row], &model, &scan, source_db, 0.0, dir.path()).unwrap();
        // PCM quantization costs a little precision; the row is still tight.
        assert!(records[0].error.abs() < 0.01, "error {}", records[0].error);
        assert!(
            compare_table(
                &[MeasurementSpec {
                    label: "far".into(),
                    distance: 11.0,
                    direction: "E".into(),
                    wav: "m.wav".into(),
                }],
                &model,
                &scan,
                source_db,
                0.0,
                dir.path()
            )
            .is_err()
        );
    }
}
