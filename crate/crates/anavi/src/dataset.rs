//! Supervised sample generation and line-delimited JSON storage.
//!
//! One [`Sample`] records a source/listener pair on a map: the panorama scan
//! at the source, the listener's polar coordinates in the source frame, and
//! the traced loudness label. Generation is deterministic for a given seed —
//! every sample derives its own random stream from (seed, map index, sample
//! index) — and parallelizes freely because of that.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acoustics::{histogram_to_label, trace_impulse, AcousticConfig};
use crate::gridmap::{sample_pair, GridMap, MaterialTable, Pose2, SamplingConfig};
use crate::sensing::{scan_panorama, PanoramaScan, DEFAULT_SCAN_BINS};

/// Current on-disk schema. Bump when record layout changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {detail}")]
    BadLine { line: usize, detail: String },
    #[error("line {line}: schema_version {found} not supported (this build reads version {SCHEMA_VERSION}; regenerate the dataset)")]
    SchemaVersion { line: usize, found: u32 },
    #[error(transparent)]
    Map(#[from] crate::gridmap::MapError),
    #[error(transparent)]
    Acoustics(#[from] crate::acoustics::AcousticsError),
    #[error(transparent)]
    Sensing(#[from] crate::sensing::SensingError),
}

/// One supervised record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub schema_version: u32,
    pub map_id: String,
    pub source: Pose2,
    pub listener: Pose2,
    /// Source-listener distance, meters.
    pub r: f64,
    /// Direction of the listener in the source frame, counterclockwise from
    /// +x, in [0, 2pi).
    pub theta: f64,
    pub scan: PanoramaScan,
    /// Normalized label, db_max / 128.
    pub y: f64,
    pub db_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn tag(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

/// Sidecar metadata written next to a dataset file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub split: Split,
    pub map_ids: Vec<String>,
    pub samples_per_map: usize,
    pub seed: u64,
    pub acoustic_cfg: AcousticConfig,
}

/// Check that no map id appears in more than one split.
pub fn splits_are_disjoint(manifests: &[&DatasetManifest]) -> bool {
    let mut by_id: std::collections::HashMap<&str, std::collections::HashSet<Split>> =
        std::collections::HashMap::new();
    for m in manifests {
        for id in &m.map_ids {
            by_id.entry(id).or_default().insert(m.split);
        }
    }
    by_id.values().all(|splits| splits.len() == 1)
}

/// Generate one sample on `map` from its derived random stream.
fn generate_one(
    map: &GridMap,
    materials: &MaterialTable,
    cfg: &AcousticConfig,
    sampling: &SamplingConfig,
    stream_seed: u64,
) -> Result<Sample, DatasetError> {
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed);
    let (source, listener) = sample_pair(map, sampling, &mut rng)?;
    let r = source.distance(&listener);
    let theta = source.direction_to(&listener);
    let scan = scan_panorama(map, materials, &source, DEFAULT_SCAN_BINS)?;
    let hist = trace_impulse(map, materials, &source, &listener, cfg, &mut rng)?;
    let label = histogram_to_label(&hist);
    Ok(Sample {
        schema_version: SCHEMA_VERSION,
        map_id: map.id.clone(),
        source,
        listener,
        r,
        theta,
        scan,
        y: label.y,
        db_max: label.db_max,
    })
}

/// Generate `per_map` samples for each map. Deterministic in `seed`; sample
/// order is (map order, sample index). Pairs whose trace fails are skipped
/// with a note on stderr, which cannot happen on validated maps.
pub fn generate(
    maps: &[(GridMap, MaterialTable)],
    per_map: usize,
    seed: u64,
    cfg: &AcousticConfig,
) -> Result<Vec<Sample>, DatasetError> {
    let sampling = SamplingConfig::default();
    let jobs: Vec<(usize, usize)> = (0..maps.len())
        .flat_map(|m| (0..per_map).map(move |i| (m, i)))
        .collect();
    let results: Vec<Result<Sample, DatasetError>> = jobs
        .par_iter()
        .map(|&(m, i)| {
            let (map, materials) = &maps[m];
            generate_one(
                map,
                materials,
                cfg,
                &sampling,
                crate::derive_seed(seed, m as u64, i as u64),
            )
        })
        .collect();
    let mut samples = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(s) => samples.push(s),
            Err(DatasetError::Map(e @ crate::gridmap::MapError::SamplingExhausted { .. })) => {
                return Err(DatasetError::Map(e))
            }
            Err(e) => eprintln!("skipping sample: {e}"),
        }
    }
    Ok(samples)
}

/// Write samples as line-delimited JSON, one record per line.
pub fn write_dataset(path: &Path, samples: &[Sample]) -> Result<(), DatasetError> {
    let io_err = |source| DatasetError::Io { path: path.display().to_string(), source };
    let mut file = std::io::BufWriter::new(fs::File::create(path).map_err(io_err)?);
    for s in samples {
        let line = serde_json::to_string(s).expect("sample serialization cannot fail");
        file.write_all(line.as_bytes())
            .and_then(|_| file.write_all(b"\n"))
            .map_err(|source| DatasetError::Io { path: path.display().to_string(), source })?;
    }
    file.flush()
        .map_err(|source| DatasetError::Io { path: path.display().to_string(), source })
}

/// Read a dataset back. Errors name the offending 1-based line number.
pub fn read_dataset(path: &Path) -> Result<Vec<Sample>, DatasetError> {
    let file = fs::File::open(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = BufReader::new(file);
    let mut samples = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| DatasetError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let sample: Sample = serde_json::from_str(&line)
            .map_err(|e| DatasetError::BadLine { line: i + 1, detail: e.to_string() })?;
        if sample.schema_version != SCHEMA_VERSION {
            return Err(DatasetError::SchemaVersion { line: i + 1, found: sample.schema_version });
        }
        samples.push(sample);
    }
    Ok(samples)
}

pub fn write_manifest(path: &Path, manifest: &DatasetManifest) -> Result<(), DatasetError> {
    let json = serde_json::to_string_pretty(manifest).expect("manifest serialization cannot fail");
    fs::write(path, json).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_manifest(path: &Path) -> Result<DatasetManifest, DatasetError> {
    let text = fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| DatasetError::BadLine { line: 0, detail: e.to_string() })
}
