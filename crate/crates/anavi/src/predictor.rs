//! The loudness predictor family and its training recipes.
//!
//! Six kinds share one prediction contract (`y` in [0, 1]):
//!
//! - `heuristic` — spherical spreading from distance alone, no parameters.
//! - `dislinreg` — closed-form least squares on `[1, log10(r), r]`.
//! - `dirdismlp` — small MLP on distance and direction (widths 2, 8, 8, 1,
//!   ReLU, batch norm).
//! - `vis_pano` / `vis_ego` — scan features through a linear + batch-norm
//!   visual encoder (to 64), distance/direction through a linear projection
//!   (to 16), concatenated into a shrinking GELU trunk 80-64-32-8-1.
//! - `binned16/64/128` — the pano architecture with an m-way classification
//!   head trained with cross-entropy; predictions are bin centers.
//!
//! Networks train from scratch with manual gradients ([`crate::nn`]),
//! Huber loss (delta 0.1) or cross-entropy, and an adaptive-moment optimizer
//! with decoupled weight decay at learning rate 0.01, decayed 0.95 every 10
//! epochs, batch size 64. The parameters with the best validation loss are
//! returned.

use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Sample;
use crate::nn::{
    cross_entropy_loss, huber_loss, Activation, AdamW, BnStats, Network, NetworkSpec,
};
use crate::sensing::{build_features, FeatureLayout, FeatureVector};

/// Current model-file format. Bump when the layout changes.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Bin counts supported by the classification ablation.
pub const SUPPORTED_BINS: [usize; 3] = [16, 64, 128];

#[derive(Debug, Error)]
pub enum PredictorError {
    #[error("feature layout mismatch: model expects {expected:?}, got {got:?}")]
    LayoutMismatch { expected: FeatureLayout, got: FeatureLayout },
    #[error("unknown model kind '{0}'")]
    UnknownKind(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("need at least 2 samples with distinct distances")]
    DegenerateRegression,
    #[error("normal equations are singular")]
    SingularNormalEquations,
    #[error("non-finite loss at epoch {epoch}, batch {batch}, lr {lr}")]
    NonFiniteLoss { epoch: usize, batch: usize, lr: f64 },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("model file {path}: {detail}")]
    BadModelFile { path: String, detail: String },
    #[error("model format version {found} not supported (this build reads {MODEL_FORMAT_VERSION})")]
    FormatVersion { found: u32 },
    #[error(transparent)]
    Sensing(#[from] crate::sensing::SensingError),
    #[error(transparent)]
    Acoustics(#[from] crate::acoustics::AcousticsError),
}

/// Which predictor family member a model belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PredictorKind {
    Heuristic,
    DisLinReg,
    DirDisMlp,
    VisPano,
    VisEgo,
    Binned(usize),
}

impl PredictorKind {
    pub fn parse(tag: &str) -> Result<Self, PredictorError> {
        match tag {
            "heuristic" => Ok(Self::Heuristic),
            "dislinreg" => Ok(Self::DisLinReg),
            "dirdismlp" => Ok(Self::DirDisMlp),
            "vis_pano" => Ok(Self::VisPano),
            "vis_ego" => Ok(Self::VisEgo),
            "binned16" => Ok(Self::Binned(16)),
            "binned64" => Ok(Self::Binned(64)),
            "binned128" => Ok(Self::Binned(128)),
            other => Err(PredictorError::UnknownKind(other.to_string())),
        }
    }

    pub fn tag(&self) -> String {
        match self {
            Self::Heuristic => "heuristic".into(),
            Self::DisLinReg => "dislinreg".into(),
            Self::DirDisMlp => "dirdismlp".into(),
            Self::VisPano => "vis_pano".into(),
            Self::VisEgo => "vis_ego".into(),
            Self::Binned(m) => format!("binned{m}"),
        }
    }

    /// The feature layout this kind consumes.
    pub fn layout(&self) -> FeatureLayout {
        match self {
            Self::Heuristic | Self::DisLinReg | Self::DirDisMlp => FeatureLayout::DirDist,
            Self::VisPano | Self::Binned(_) => FeatureLayout::Pano,
            Self::VisEgo => FeatureLayout::Ego,
        }
    }

    /// Architecture blueprint for network kinds; `None` for the two
    /// parameter-free/closed-form kinds.
    pub fn network_spec(&self, n_scan_bins: usize) -> Option<(usize, NetworkSpec)> {
        let input_dim = self.layout().len(n_scan_bins);
        match self {
            Self::Heuristic | Self::DisLinReg => None,
            Self::DirDisMlp => Some((
                input_dim,
                NetworkSpec {
                    encoders: None,
                    dirdis_in: 0,
                    trunk_sizes: vec![2, 8, 8, 1],
                    activation: Activation::Relu,
                    batch_norm: true,
                },
            )),
            Self::VisPano | Self::VisEgo => Some((
                input_dim,
                NetworkSpec {
                    encoders: Some((16, 64)),
                    dirdis_in: 2,
                    trunk_sizes: vec![80, 64, 32, 8, 1],
                    activation: Activation::Gelu,
                    batch_norm: true,
                },
            )),
            Self::Binned(m) => Some((
                input_dim,
                NetworkSpec {
                    encoders: Some((16, 64)),
                    dirdis_in: 2,
                    trunk_sizes: vec![80, 64, 32, 8, *m],
                    activation: Activation::Gelu,
                    batch_norm: true,
                },
            )),
        }
    }
}

/// A trained (or parameter-free) predictor.
#[derive(Debug, Clone, PartialEq)]
pub enum PredictorModel {
    Heuristic,
    DisLinReg { coefficients: [f64; 3] },
    Net { kind: PredictorKind, net: Network, params: Vec<f64>, running: Vec<BnStats> },
}

/// Offset added to `r_norm` before the log basis term, keeping it finite at
/// r -> 0.
pub const LOG_BASIS_EPS: f64 = 1e-3;

fn dislinreg_basis(r_norm: f64) -> [f64; 3] {
    [1.0, (r_norm + LOG_BASIS_EPS).log10(), r_norm]
}

impl PredictorModel {
    pub fn kind(&self) -> PredictorKind {
        match self {
            Self::Heuristic => PredictorKind::Heuristic,
            Self::DisLinReg { .. } => PredictorKind::DisLinReg,
            Self::Net { kind, .. } => *kind,
        }
    }

    pub fn layout(&self) -> FeatureLayout {
        self.kind().layout()
    }

    /// Predict the normalized loudness for one feature vector.
    pub fn predict(&self, features: &FeatureVector) -> Result<f64, PredictorError> {
        if features.layout != self.layout() {
            return Err(PredictorError::LayoutMismatch {
                expected: self.layout(),
                got: features.layout,
            });
        }
        Ok(self.predict_rows(&features.values, 1)[0])
    }

    /// Predict a row-major batch that already matches the model layout.
    pub fn predict_rows(&self, rows: &[f64], n_rows: usize) -> Vec<f64> {
        match self {
            Self::Heuristic => (0..n_rows)
                .map(|i| {
                    let r = rows[i * 2] * crate::sensing::MAX_PAIR_DISTANCE;
                    crate::acoustics::heuristic_db(r)
                        .map(|l| l.y)
                        .unwrap_or(0.0)
                })
                .collect(),
            Self::DisLinReg { coefficients } => (0..n_rows)
                .map(|i| {
                    let basis = dislinreg_basis(rows[i * 2]);
                    let raw: f64 =
                        coefficients.iter().zip(basis.iter()).map(|(c, b)| c * b).sum();
                    raw.clamp(0.0, 1.0)
                })
                .collect(),
            Self::Net { kind, net, params, running } => {
                let dim = net.input_dim;
                let (out, _) = net.forward(params, running, rows, n_rows, false);
                debug_assert_eq!(rows.len(), n_rows * dim);
                match kind {
                    PredictorKind::Binned(m) => (0..n_rows)
                        .map(|i| logits_to_y(&out[i * m..(i + 1) * m]))
                        .collect(),
                    _ => out.iter().map(|v| v.clamp(0.0, 1.0)).collect(),
                }
            }
        }
    }

    /// Predict for a slice of dataset samples.
    pub fn predict_samples(&self, samples: &[Sample]) -> Result<Vec<f64>, PredictorError> {
        let (rows, n, _) = design_matrix(samples, self.layout())?;
        Ok(self.predict_rows(&rows, n))
    }
}

/// Bin-center decoding for classification heads: the highest logit wins,
/// lowest bin index on ties.
pub fn logits_to_y(logits: &[f64]) -> f64 {
    let mut best = 0usize;
    for (i, &v) in logits.iter().enumerate() {
        if v > logits[best] {
            best = i;
        }
    }
    (best as f64 + 0.5) / logits.len() as f64
}

/// Discretize a normalized label into one of `m` equal bins.
pub fn bin_labels(y: f64, m: usize) -> usize {
    ((y * m as f64).floor() as usize).min(m - 1)
}

/// Assemble the row-major design matrix for `layout` from samples.
/// Returns (rows, n_rows, labels).
pub fn design_matrix(
    samples: &[Sample],
    layout: FeatureLayout,
) -> Result<(Vec<f64>, usize, Vec<f64>), PredictorError> {
    let mut rows = Vec::new();
    let mut labels = Vec::with_capacity(samples.len());
    for s in samples {
        let f = build_features(&s.scan, s.r, s.theta, layout)?;
        rows.extend_from_slice(&f.values);
        labels.push(s.y);
    }
    Ok((rows, samples.len(), labels))
}

/// Closed-form least squares of `y` on `[1, log10(r_norm + eps), r_norm]`.
pub fn fit_dislinreg(samples: &[Sample]) -> Result<PredictorModel, PredictorError> {
    if samples.is_empty() {
        return Err(PredictorError::EmptyDataset);
    }
    let mut distinct = std::collections::BTreeSet::new();
    for s in samples {
        distinct.insert(s.r.to_bits());
    }
    if distinct.len() < 2 {
        return Err(PredictorError::DegenerateRegression);
    }

    let mut ata = [[0.0f64; 3]; 3];
    let mut aty = [0.0f64; 3];
    for s in samples {
        let basis = dislinreg_basis(s.r / crate::sensing::MAX_PAIR_DISTANCE);
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += basis[i] * basis[j];
            }
            aty[i] += basis[i] * s.y;
        }
    }
    let coefficients = solve3(ata, aty).ok_or(PredictorError::SingularNormalEquations)?;
    Ok(PredictorModel::DisLinReg { coefficients })
}

/// 3x3 linear solve with partial pivoting; `None` when singular.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1.0);
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        })?;
        if a[pivot][col].abs() < 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0f64; 3];
    for col in (0..3).rev() {
        let mut acc = b[col];
        for k in col + 1..3 {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Some(x)
}

/// Training loss selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    Huber { delta: f64 },
    CrossEntropy,
}

/// Optimization recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub loss: Loss,
    pub learning_rate: f64,
    pub lr_decay: f64,
    pub lr_decay_every: usize,
    pub batch_size: usize,
    pub epochs: usize,
    pub weight_decay: f64,
    pub seed: u64,
}

impl TrainConfig {
    /// The default recipe for a kind; classification heads switch to
    /// cross-entropy automatically.
    pub fn for_kind(kind: PredictorKind, seed: u64) -> Self {
        let loss = match kind {
            PredictorKind::Binned(_) => Loss::CrossEntropy,
            _ => Loss::Huber { delta: 0.1 },
        };
        Self {
            loss,
            learning_rate: 0.01,
            lr_decay: 0.95,
            lr_decay_every: 10,
            batch_size: 64,
            epochs: 60,
            weight_decay: 0.01,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub lr: f64,
}

/// Per-epoch record of one training run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainLog {
    pub entries: Vec<EpochStats>,
    pub best_epoch: usize,
}

impl TrainLog {
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("epoch,train_loss,val_loss,lr\n");
        for e in &self.entries {
            out.push_str(&format!("{},{},{},{}\n", e.epoch, e.train_loss, e.val_loss, e.lr));
        }
        out
    }
}

/// Train a predictor of `kind` on feature-ized samples, returning the
/// parameters with the lowest validation loss.
///
/// `heuristic` returns immediately; `dislinreg` solves in closed form. Both
/// log a single pseudo-epoch so every kind produces a train log.
pub fn train(
    kind: PredictorKind,
    cfg: &TrainConfig,
    train_set: &[Sample],
    val_set: &[Sample],
) -> Result<(PredictorModel, TrainLog), PredictorError> {
    if train_set.is_empty() || val_set.is_empty() {
        return Err(PredictorError::EmptyDataset);
    }

    match kind {
        PredictorKind::Heuristic => {
            let model = PredictorModel::Heuristic;
            let log = closed_form_log(&model, train_set, val_set)?;
            return Ok((model, log));
        }
        PredictorKind::DisLinReg => {
            let model = fit_dislinreg(train_set)?;
            let log = closed_form_log(&model, train_set, val_set)?;
            return Ok((model, log));
        }
        _ => {}
    }

    let n_bins = train_set[0].scan.n_bins;
    let (input_dim, spec) = kind.network_spec(n_bins).expect("network kind");
    let net = Network::build(input_dim, &spec);
    let mut rng = ChaCha8Rng::seed_from_u64(crate::derive_seed(cfg.seed, 0xA11, 0));
    let mut params = net.init_params(&mut rng);
    let mut running = net.init_running();

    let (train_rows, n_train, train_y) = design_matrix(train_set, kind.layout())?;
    let (val_rows, n_val, val_y) = design_matrix(val_set, kind.layout())?;
    let train_bins: Vec<usize>;
    let val_bins: Vec<usize>;
    let classes = match kind {
        PredictorKind::Binned(m) => m,
        _ => 0,
    };
    if classes > 0 {
        train_bins = train_y.iter().map(|&y| bin_labels(y, classes)).collect();
        val_bins = val_y.iter().map(|&y| bin_labels(y, classes)).collect();
    } else {
        train_bins = Vec::new();
        val_bins = Vec::new();
    }

    let dim = input_dim;
    let mut opt = AdamW::new(net.n_params, cfg.learning_rate, cfg.weight_decay);
    let mut log = TrainLog::default();
    let mut best: Option<(f64, Vec<f64>, Vec<BnStats>)> = None;

    let eval_loss = |params: &[f64], running: &[BnStats]| -> f64 {
        let (out, _) = net.forward(params, running, &val_rows, n_val, false);
        match cfg.loss {
            Loss::Huber { delta } => huber_loss(&out, &val_y, delta).0,
            Loss::CrossEntropy => cross_entropy_loss(&out, &val_bins, n_val, classes).0,
        }
    };

    for epoch in 0..cfg.epochs {
        let lr = cfg.learning_rate
            * cfg.lr_decay.powi((epoch / cfg.lr_decay_every) as i32);
        opt.learning_rate = lr;

        let mut order: Vec<usize> = (0..n_train).collect();
        let mut shuffle_rng =
            ChaCha8Rng::seed_from_u64(crate::derive_seed(cfg.seed, 0x5E0F, epoch as u64));
        use rand::seq::SliceRandom;
        order.shuffle(&mut shuffle_rng);

        let mut loss_sum = 0.0;
        for (batch_idx, chunk) in order.chunks(cfg.batch_size).enumerate() {
            let rows = chunk.len();
            let mut batch = Vec::with_capacity(rows * dim);
            for &i in chunk {
                batch.extend_from_slice(&train_rows[i * dim..(i + 1) * dim]);
            }
            let (out, cache) = net.forward(&params, &running, &batch, rows, true);
            let cache = cache.expect("training forward returns a cache");
            let (loss, dout) = match cfg.loss {
                Loss::Huber { delta } => {
                    let targets: Vec<f64> = chunk.iter().map(|&i| train_y[i]).collect();
                    huber_loss(&out, &targets, delta)
                }
                Loss::CrossEntropy => {
                    let targets: Vec<usize> = chunk.iter().map(|&i| train_bins[i]).collect();
                    cross_entropy_loss(&out, &targets, rows, classes)
                }
            };
            if !loss.is_finite() {
                return Err(PredictorError::NonFiniteLoss { epoch, batch: batch_idx, lr });
            }
            let grads = net.backward(&params, &cache, &dout, rows);
            opt.step(&mut params, &grads);
            net.update_running(&cache, &mut running, rows);
            loss_sum += loss * rows as f64;
        }

        let train_loss = loss_sum / n_train as f64;
        let val_loss = eval_loss(&params, &running);
        log.entries.push(EpochStats { epoch, train_loss, val_loss, lr });
        if best.as_ref().map_or(true, |(b, _, _)| val_loss < *b) {
            best = Some((val_loss, params.clone(), running.clone()));
            log.best_epoch = epoch;
        }
    }

    let (_, best_params, best_running) = best.expect("at least one epoch ran");
    let model = PredictorModel::Net { kind, net, params: best_params, running: best_running };
    Ok((model, log))
}

fn closed_form_log(
    model: &PredictorModel,
    train_set: &[Sample],
    val_set: &[Sample],
) -> Result<TrainLog, PredictorError> {
    let huber = |samples: &[Sample]| -> Result<f64, PredictorError> {
        let pred = model.predict_samples(samples)?;
        let truth: Vec<f64> = samples.iter().map(|s| s.y).collect();
        Ok(huber_loss(&pred, &truth, 0.1).0)
    };
    Ok(TrainLog {
        entries: vec![EpochStats {
            epoch: 0,
            train_loss: huber(train_set)?,
            val_loss: huber(val_set)?,
            lr: 0.0,
        }],
        best_epoch: 0,
    })
}

/// On-disk model representation.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    network: Option<NetworkFile>,
}

#[derive(Serialize, Deserialize)]
struct NetworkFile {
    input_dim: usize,
    spec: NetworkSpec,
    params: Vec<f64>,
    running: Vec<BnStats>,
}

/// Save a model as versioned JSON.
pub fn save_model(model: &PredictorModel, path: &Path) -> Result<(), PredictorError> {
    let file = match model {
        PredictorModel::Heuristic => ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            kind: model.kind().tag(),
            coefficients: None,
            network: None,
        },
        PredictorModel::DisLinReg { coefficients } => ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            kind: model.kind().tag(),
            coefficients: Some(*coefficients),
            network: None,
        },
        PredictorModel::Net { kind, net, params, running } => {
            let spec = kind
                .network_spec(infer_scan_bins(kind, net.input_dim))
                .expect("network kind")
                .1;
            ModelFile {
                format_version: MODEL_FORMAT_VERSION,
                kind: kind.tag(),
                coefficients: None,
                network: Some(NetworkFile {
                    input_dim: net.input_dim,
                    spec,
                    params: params.clone(),
                    running: running.clone(),
                }),
            }
        }
    };
    let json = serde_json::to_string(&file).expect("model serialization cannot fail");
    fs::write(path, json).map_err(|source| PredictorError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Scan bin count back from the stored input dimension.
fn infer_scan_bins(kind: &PredictorKind, input_dim: usize) -> usize {
    match kind.layout() {
        FeatureLayout::DirDist => crate::sensing::DEFAULT_SCAN_BINS,
        FeatureLayout::Pano => (input_dim - 2) / 2,
        FeatureLayout::Ego => 2 * (input_dim - 2),
    }
}

/// Load a model saved by [`save_model`].
pub fn load_model(path: &Path) -> Result<PredictorModel, PredictorError> {
    let text = fs::read_to_string(path).map_err(|source| PredictorError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file: ModelFile = serde_json::from_str(&text).map_err(|e| PredictorError::BadModelFile {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(PredictorError::FormatVersion { found: file.format_version });
    }
    let kind = PredictorKind::parse(&file.kind)?;
    match kind {
        PredictorKind::Heuristic => Ok(PredictorModel::Heuristic),
        PredictorKind::DisLinReg => {
            let coefficients = file.coefficients.ok_or_else(|| PredictorError::BadModelFile {
                path: path.display().to_string(),
                detail: "dislinreg model missing coefficients".into(),
            })?;
            Ok(PredictorModel::DisLinReg { coefficients })
        }
        _ => {
            let nf = file.network.ok_or_else(|| PredictorError::BadModelFile {
                path: path.display().to_string(),
                detail: "network model missing network section".into(),
            })?;
            let net = Network::build(nf.input_dim, &nf.spec);
            if net.n_params != nf.params.len() || net.n_bn != nf.running.len() {
                return Err(PredictorError::BadModelFile {
                    path: path.display().to_string(),
                    detail: format!(
                        "parameter count mismatch: architecture wants {} params / {} bn layers, file has {} / {}",
                        net.n_params,
                        net.n_bn,
                        nf.params.len(),
                        nf.running.len()
                    ),
                });
            }
            Ok(PredictorModel::Net { kind, net, params: nf.params, running: nf.running })
        }
    }
}
