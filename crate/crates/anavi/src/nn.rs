//! Minimal feed-forward network with manual gradients.
//!
//! The networks here are tiny (tens of thousands of parameters at most), so
//! everything runs on flat `Vec<f64>` buffers: a network is an immutable
//! architecture description plus a flat parameter vector, and
//! forward/backward are pure functions of both. That keeps finite-difference
//! gradient checking trivial — perturb one entry of the parameter vector and
//! re-run the loss.
//!
//! Supported pieces: linear layers, batch normalization (batch statistics in
//! training, running statistics in evaluation), ReLU/GELU activations, a
//! Huber regression loss, softmax cross-entropy, and an adaptive-moment
//! optimizer with decoupled weight decay.

use rand::Rng;
use serde::{Deserialize, Serialize};

const BN_EPS: f64 = 1e-5;
const BN_MOMENTUM: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Gelu,
}

impl Activation {
    fn apply(&self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Gelu => gelu(x),
        }
    }

    fn derivative(&self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Gelu => gelu_derivative(x),
        }
    }
}

// tanh approximation of GELU; smooth everywhere, which keeps the
// finite-difference oracle happy.
fn gelu(x: f64) -> f64 {
    const C: f64 = 0.797_884_560_802_865_4; // sqrt(2/pi)
    0.5 * x * (1.0 + (C * (x + 0.044715 * x * x * x)).tanh())
}

fn gelu_derivative(x: f64) -> f64 {
    const C: f64 = 0.797_884_560_802_865_4;
    let u = C * (x + 0.044715 * x * x * x);
    let t = u.tanh();
    let du = C * (1.0 + 3.0 * 0.044715 * x * x);
    0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du
}

/// One step of a layer stack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LayerKind {
    Linear { in_dim: usize, out_dim: usize },
    BatchNorm { dim: usize },
    Act { act: Activation, dim: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub kind: LayerKind,
    /// Offset of this layer's parameters in the flat parameter vector.
    pub param_offset: usize,
    /// Index into the running-statistics list for batch-norm layers.
    pub bn_index: Option<usize>,
}

/// Running mean/variance tracked by one batch-norm layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BnStats {
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

/// Architecture: an optional two-branch encoder stage feeding a trunk.
///
/// Input vectors are `[dirdis features | visual features]`. With encoders
/// present, the first `dirdis_in` columns go through a plain linear
/// projection and the rest through a linear + batch-norm visual encoder; the
/// trunk then sees `[visual encoding | dirdis encoding]`. Without encoders
/// the trunk consumes the raw input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub input_dim: usize,
    pub output_dim: usize,
    pub dirdis_stack: Vec<Layer>,
    pub visual_stack: Vec<Layer>,
    pub dirdis_in: usize,
    pub trunk: Vec<Layer>,
    pub n_params: usize,
    pub n_bn: usize,
}

/// Blueprint for [`Network::build`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    /// `(dirdis_out, visual_out)` encoder widths, or `None` for a plain MLP.
    pub encoders: Option<(usize, usize)>,
    /// Dirdis feature count when encoders are present.
    pub dirdis_in: usize,
    /// Trunk layer widths from trunk input to head, e.g. `[2, 8, 8, 1]`.
    pub trunk_sizes: Vec<usize>,
    pub activation: Activation,
    pub batch_norm: bool,
}

impl Network {
    pub fn build(input_dim: usize, spec: &NetworkSpec) -> Self {
        let mut offset = 0usize;
        let mut bn = 0usize;
        let push_linear = |stack: &mut Vec<Layer>, in_dim: usize, out_dim: usize,
                           offset: &mut usize| {
            stack.push(Layer {
                kind: LayerKind::Linear { in_dim, out_dim },
                param_offset: *offset,
                bn_index: None,
            });
            *offset += in_dim * out_dim + out_dim;
        };
        let push_bn = |stack: &mut Vec<Layer>, dim: usize, offset: &mut usize, bn: &mut usize| {
            stack.push(Layer {
                kind: LayerKind::BatchNorm { dim },
                param_offset: *offset,
                bn_index: Some(*bn),
            });
            *offset += 2 * dim;
            *bn += 1;
        };

        let mut dirdis_stack = Vec::new();
        let mut visual_stack = Vec::new();
        let mut dirdis_in = 0;
        if let Some((dirdis_out, visual_out)) = spec.encoders {
            dirdis_in = spec.dirdis_in;
            let visual_in = input_dim - dirdis_in;
            push_linear(&mut dirdis_stack, dirdis_in, dirdis_out, &mut offset);
            push_linear(&mut visual_stack, visual_in, visual_out, &mut offset);
            push_bn(&mut visual_stack, visual_out, &mut offset, &mut bn);
            debug_assert_eq!(spec.trunk_sizes[0], dirdis_out + visual_out);
        } else {
            debug_assert_eq!(spec.trunk_sizes[0], input_dim);
        }

        let mut trunk = Vec::new();
        let n = spec.trunk_sizes.len();
        for i in 0..n - 1 {
            let (in_dim, out_dim) = (spec.trunk_sizes[i], spec.trunk_sizes[i + 1]);
            push_linear(&mut trunk, in_dim, out_dim, &mut offset);
            if i + 2 < n {
                if spec.batch_norm {
                    push_bn(&mut trunk, out_dim, &mut offset, &mut bn);
                }
                trunk.push(Layer {
                    kind: LayerKind::Act { act: spec.activation, dim: out_dim },
                    param_offset: offset,
                    bn_index: None,
                });
            }
        }

        Network {
            input_dim,
            output_dim: *spec.trunk_sizes.last().unwrap(),
            dirdis_stack,
            visual_stack,
            dirdis_in,
            trunk,
            n_params: offset,
            n_bn: bn,
        }
    }

    /// Fan-in-scaled uniform init for linear layers; batch-norm scale 1,
    /// shift 0.
    pub fn init_params<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let mut params = vec![0.0; self.n_params];
        for layer in self.layers() {
            match layer.kind {
                LayerKind::Linear { in_dim, out_dim } => {
                    let bound = 1.0 / (in_dim as f64).sqrt();
                    for p in params
                        .iter_mut()
                        .skip(layer.param_offset)
                        .take(in_dim * out_dim + out_dim)
                    {
                        *p = rng.gen_range(-bound..bound);
                    }
                }
                LayerKind::BatchNorm { dim } => {
                    for j in 0..dim {
                        params[layer.param_offset + j] = 1.0;
                        params[layer.param_offset + dim + j] = 0.0;
                    }
                }
                LayerKind::Act { .. } => {}
            }
        }
        params
    }

    pub fn init_running(&self) -> Vec<BnStats> {
        let mut out = Vec::new();
        for layer in self.layers() {
            if let LayerKind::BatchNorm { dim } = layer.kind {
                out.push(BnStats { mean: vec![0.0; dim], var: vec![1.0; dim] });
            }
        }
        out
    }

    fn layers(&self) -> impl Iterator<Item = &Layer> {
        self.dirdis_stack
            .iter()
            .chain(self.visual_stack.iter())
            .chain(self.trunk.iter())
    }

    /// Forward pass over a row-major batch `x` of shape `[rows, input_dim]`.
    ///
    /// In training mode batch statistics normalize batch-norm layers and the
    /// cache records everything backward needs; running statistics are NOT
    /// touched (see [`Network::update_running`]). In eval mode running
    /// statistics are used and no cache is produced.
    pub fn forward(
        &self,
        params: &[f64],
        running: &[BnStats],
        x: &[f64],
        rows: usize,
        training: bool,
    ) -> (Vec<f64>, Option<ForwardCache>) {
        let mut cache = if training {
            Some(ForwardCache { dirdis: Vec::new(), visual: Vec::new(), trunk: Vec::new() })
        } else {
            None
        };

        let trunk_input = if self.dirdis_stack.is_empty() {
            x.to_vec()
        } else {
            let visual_in = self.input_dim - self.dirdis_in;
            let (xd, xv) = split_columns(x, rows, self.input_dim, self.dirdis_in);
            let yd = run_stack(
                &self.dirdis_stack,
                params,
                running,
                xd,
                rows,
                self.dirdis_in,
                training,
                cache.as_mut().map(|c| &mut c.dirdis),
            );
            let yv = run_stack(
                &self.visual_stack,
                params,
                running,
                xv,
                rows,
                visual_in,
                training,
                cache.as_mut().map(|c| &mut c.visual),
            );
            let dd_out = stack_out_dim(&self.dirdis_stack, self.dirdis_in);
            let vv_out = stack_out_dim(&self.visual_stack, visual_in);
            concat_columns(&yv, vv_out, &yd, dd_out, rows)
        };

        let trunk_in_dim = if self.dirdis_stack.is_empty() {
            self.input_dim
        } else {
            stack_out_dim(&self.visual_stack, self.input_dim - self.dirdis_in)
                + stack_out_dim(&self.dirdis_stack, self.dirdis_in)
        };
        let out = run_stack(
            &self.trunk,
            params,
            running,
            trunk_input,
            rows,
            trunk_in_dim,
            training,
            cache.as_mut().map(|c| &mut c.trunk),
        );
        (out, cache)
    }

    /// Backward pass. `dout` is the loss gradient w.r.t. the network output;
    /// returns the gradient for every parameter, in parameter-vector order.
    pub fn backward(
        &self,
        params: &[f64],
        cache: &ForwardCache,
        dout: &[f64],
        rows: usize,
    ) -> Vec<f64> {
        let mut grads = vec![0.0; self.n_params];
        let d_trunk_in = backprop_stack(&self.trunk, params, &cache.trunk, dout, rows, &mut grads);
        if !self.dirdis_stack.is_empty() {
            let visual_in = self.input_dim - self.dirdis_in;
            let vv_out = stack_out_dim(&self.visual_stack, visual_in);
            let dd_out = stack_out_dim(&self.dirdis_stack, self.dirdis_in);
            let (dv, dd) = split_columns(&d_trunk_in, rows, vv_out + dd_out, vv_out);
            backprop_stack(&self.visual_stack, params, &cache.visual, &dv, rows, &mut grads);
            backprop_stack(&self.dirdis_stack, params, &cache.dirdis, &dd, rows, &mut grads);
        }
        grads
    }

    /// Fold the batch statistics recorded in `cache` into the running
    /// estimates, in the order batch-norm layers appear.
    pub fn update_running(&self, cache: &ForwardCache, running: &mut [BnStats], rows: usize) {
        let mut it = cache
            .dirdis
            .iter()
            .chain(cache.visual.iter())
            .chain(cache.trunk.iter());
        let mut bn_seen = 0usize;
        for entry in it.by_ref() {
            if let LayerCache::Bn { mean, var, .. } = entry {
                let stats = &mut running[bn_seen];
                // Unbiased variance for the running estimate, when defined.
                let scale = if rows > 1 { rows as f64 / (rows as f64 - 1.0) } else { 1.0 };
                for j in 0..mean.len() {
                    stats.mean[j] = (1.0 - BN_MOMENTUM) * stats.mean[j] + BN_MOMENTUM * mean[j];
                    stats.var[j] =
                        (1.0 - BN_MOMENTUM) * stats.var[j] + BN_MOMENTUM * var[j] * scale;
                }
                bn_seen += 1;
            }
        }
    }
}

/// Everything the backward pass needs from one forward pass.
pub struct ForwardCache {
    dirdis: Vec<LayerCache>,
    visual: Vec<LayerCache>,
    trunk: Vec<LayerCache>,
}

enum LayerCache {
    Linear { x: Vec<f64> },
    Bn { x: Vec<f64>, xhat: Vec<f64>, mean: Vec<f64>, var: Vec<f64> },
    Act { x: Vec<f64> },
}

fn stack_out_dim(stack: &[Layer], in_dim: usize) -> usize {
    let mut dim = in_dim;
    for layer in stack {
        if let LayerKind::Linear { out_dim, .. } = layer.kind {
            dim = out_dim;
        }
    }
    dim
}

fn split_columns(x: &[f64], rows: usize, dim: usize, at: usize) -> (Vec<f64>, Vec<f64>) {
    let mut left = Vec::with_capacity(rows * at);
    let mut right = Vec::with_capacity(rows * (dim - at));
    for r in 0..rows {
        let row = &x[r * dim..(r + 1) * dim];
        left.extend_from_slice(&row[..at]);
        right.extend_from_slice(&row[at..]);
    }
    (left, right)
}

fn concat_columns(a: &[f64], a_dim: usize, b: &[f64], b_dim: usize, rows: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(rows * (a_dim + b_dim));
    for r in 0..rows {
        out.extend_from_slice(&a[r * a_dim..(r + 1) * a_dim]);
        out.extend_from_slice(&b[r * b_dim..(r + 1) * b_dim]);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn run_stack(
    stack: &[Layer],
    params: &[f64],
    running: &[BnStats],
    input: Vec<f64>,
    rows: usize,
    in_dim: usize,
    training: bool,
    mut cache: Option<&mut Vec<LayerCache>>,
) -> Vec<f64> {
    let mut x = input;
    let mut dim = in_dim;
    for layer in stack {
        match layer.kind {
            LayerKind::Linear { in_dim, out_dim } => {
                let w = &params[layer.param_offset..layer.param_offset + in_dim * out_dim];
                let b = &params
                    [layer.param_offset + in_dim * out_dim..layer.param_offset + in_dim * out_dim + out_dim];
                let mut y = vec![0.0; rows * out_dim];
                for r in 0..rows {
                    let xr = &x[r * in_dim..(r + 1) * in_dim];
                    let yr = &mut y[r * out_dim..(r + 1) * out_dim];
                    for (o, yo) in yr.iter_mut().enumerate() {
                        let wo = &w[o * in_dim..(o + 1) * in_dim];
                        let mut acc = b[o];
                        for i in 0..in_dim {
                            acc += wo[i] * xr[i];
                        }
                        *yo = acc;
                    }
                }
                if let Some(c) = cache.as_deref_mut() {
                    c.push(LayerCache::Linear { x });
                }
                x = y;
                dim = out_dim;
            }
            LayerKind::BatchNorm { dim: d } => {
                debug_assert_eq!(d, dim);
                let gamma = &params[layer.param_offset..layer.param_offset + d];
                let beta = &params[layer.param_offset + d..layer.param_offset + 2 * d];
                let (mean, var) = if training {
                    let mut mean = vec![0.0; d];
                    let mut var = vec![0.0; d];
                    for r in 0..rows {
                        for j in 0..d {
                            mean[j] += x[r * d + j];
                        }
                    }
                    for m in mean.iter_mut() {
                        *m /= rows as f64;
                    }
                    for r in 0..rows {
                        for j in 0..d {
                            let c = x[r * d + j] - mean[j];
                            var[j] += c * c;
                        }
                    }
                    for v in var.iter_mut() {
                        *v /= rows as f64;
                    }
                    (mean, var)
                } else {
                    let stats = &running[layer.bn_index.unwrap()];
                    (stats.mean.clone(), stats.var.clone())
                };
                let mut xhat = vec![0.0; rows * d];
                let mut y = vec![0.0; rows * d];
                for r in 0..rows {
                    for j in 0..d {
                        let h = (x[r * d + j] - mean[j]) / (var[j] + BN_EPS).sqrt();
                        xhat[r * d + j] = h;
                        y[r * d + j] = gamma[j] * h + beta[j];
                    }
                }
                if let Some(c) = cache.as_deref_mut() {
                    c.push(LayerCache::Bn { x, xhat, mean, var });
                }
                x = y;
            }
            LayerKind::Act { act, dim: d } => {
                debug_assert_eq!(d, dim);
                let y = x.iter().map(|&v| act.apply(v)).collect();
                if let Some(c) = cache.as_deref_mut() {
                    c.push(LayerCache::Act { x });
                }
                x = y;
            }
        }
    }
    x
}

fn backprop_stack(
    stack: &[Layer],
    params: &[f64],
    cache: &[LayerCache],
    dout: &[f64],
    rows: usize,
    grads: &mut [f64],
) -> Vec<f64> {
    let mut dy = dout.to_vec();
    for (layer, entry) in stack.iter().zip(cache.iter()).rev() {
        match (&layer.kind, entry) {
            (LayerKind::Linear { in_dim, out_dim }, LayerCache::Linear { x }) => {
                let (in_dim, out_dim) = (*in_dim, *out_dim);
                let w = &params[layer.param_offset..layer.param_offset + in_dim * out_dim];
                let mut dx = vec![0.0; rows * in_dim];
                {
                    let (dw, db) = grads
                        [layer.param_offset..layer.param_offset + in_dim * out_dim + out_dim]
                        .split_at_mut(in_dim * out_dim);
                    for r in 0..rows {
                        let xr = &x[r * in_dim..(r + 1) * in_dim];
                        let dyr = &dy[r * out_dim..(r + 1) * out_dim];
                        let dxr = &mut dx[r * in_dim..(r + 1) * in_dim];
                        for o in 0..out_dim {
                            let g = dyr[o];
                            if g == 0.0 {
                                continue;
                            }
                            db[o] += g;
                            let wo = &w[o * in_dim..(o + 1) * in_dim];
                            let dwo = &mut dw[o * in_dim..(o + 1) * in_dim];
                            for i in 0..in_dim {
                                dwo[i] += g * xr[i];
                                dxr[i] += g * wo[i];
                            }
                        }
                    }
                }
                dy = dx;
            }
            (LayerKind::BatchNorm { dim }, LayerCache::Bn { xhat, var, .. }) => {
                let d = *dim;
                let gamma = &params[layer.param_offset..layer.param_offset + d];
                let n = rows as f64;
                let mut sum_dy = vec![0.0; d];
                let mut sum_dy_xhat = vec![0.0; d];
                for r in 0..rows {
                    for j in 0..d {
                        let g = dy[r * d + j];
                        sum_dy[j] += g;
                        sum_dy_xhat[j] += g * xhat[r * d + j];
                    }
                }
                {
                    let (dgamma, dbeta) = grads[layer.param_offset..layer.param_offset + 2 * d]
                        .split_at_mut(d);
                    for j in 0..d {
                        dgamma[j] += sum_dy_xhat[j];
                        dbeta[j] += sum_dy[j];
                    }
                }
                let mut dx = vec![0.0; rows * d];
                for r in 0..rows {
                    for j in 0..d {
                        let inv = 1.0 / (var[j] + BN_EPS).sqrt();
                        dx[r * d + j] = gamma[j] * inv / n
                            * (n * dy[r * d + j] - sum_dy[j] - xhat[r * d + j] * sum_dy_xhat[j]);
                    }
                }
                dy = dx;
            }
            (LayerKind::Act { act, dim }, LayerCache::Act { x }) => {
                let d = *dim;
                for r in 0..rows {
                    for j in 0..d {
                        dy[r * d + j] *= act.derivative(x[r * d + j]);
                    }
                }
            }
            _ => unreachable!("cache entries mirror the layer stack"),
        }
    }
    dy
}

/// Huber loss, mean over the batch. Quadratic within `delta` of zero error,
/// linear outside; continuous and once-differentiable at the seam.
pub fn huber_loss(pred: &[f64], target: &[f64], delta: f64) -> (f64, Vec<f64>) {
    let n = pred.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; pred.len()];
    for i in 0..pred.len() {
        let e = pred[i] - target[i];
        if e.abs() <= delta {
            loss += 0.5 * e * e;
            grad[i] = e / n;
        } else {
            loss += delta * (e.abs() - 0.5 * delta);
            grad[i] = delta * e.signum() / n;
        }
    }
    (loss / n, grad)
}

/// Softmax cross-entropy over `[rows, classes]` logits, mean over the batch.
pub fn cross_entropy_loss(
    logits: &[f64],
    labels: &[usize],
    rows: usize,
    classes: usize,
) -> (f64, Vec<f64>) {
    let n = rows as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; logits.len()];
    for r in 0..rows {
        let row = &logits[r * classes..(r + 1) * classes];
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut denom = 0.0;
        for &v in row {
            denom += (v - max).exp();
        }
        let log_denom = denom.ln() + max;
        loss += log_denom - row[labels[r]];
        for c in 0..classes {
            let softmax = (row[c] - log_denom).exp();
            grad[r * classes + c] =
                (softmax - if c == labels[r] { 1.0 } else { 0.0 }) / n;
        }
    }
    (loss / n, grad)
}

/// Adaptive-moment optimizer with decoupled weight decay.
#[derive(Debug, Clone)]
pub struct AdamW {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub weight_decay: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u32,
}

impl AdamW {
    pub fn new(n_params: usize, learning_rate: f64, weight_decay: f64) -> Self {
        Self {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            weight_decay,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grads[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grads[i] * grads[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.learning_rate
                * (m_hat / (v_hat.sqrt() + self.epsilon) + self.weight_decay * params[i]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plain_spec(sizes: Vec<usize>, act: Activation, bn: bool) -> NetworkSpec {
        NetworkSpec {
            encoders: None,
            dirdis_in: 0,
            trunk_sizes: sizes,
            activation: act,
            batch_norm: bn,
        }
    }

    #[test]
    fn huber_seam_is_continuous_and_smooth() {
        let delta = 0.1;
        let (at_seam, g_seam) = huber_loss(&[delta], &[0.0], delta);
        let (just_out, g_out) = huber_loss(&[delta + 1e-12], &[0.0], delta);
        assert!((at_seam - 0.5 * delta * delta).abs() < 1e-15);
        assert!((just_out - at_seam).abs() < 1e-9);
        assert!((g_seam[0] - delta).abs() < 1e-12);
        assert!((g_out[0] - delta).abs() < 1e-9);
        let (neg_seam, g_neg) = huber_loss(&[-delta], &[0.0], delta);
        assert!((neg_seam - at_seam).abs() < 1e-15);
        assert!((g_neg[0] + delta).abs() < 1e-12);
    }

    #[test]
    fn cross_entropy_nonnegative_and_saturates() {
        let (loss, _) = cross_entropy_loss(&[0.3, 0.1, -2.0], &[0], 1, 3);
        assert!(loss > 0.0);
        // A huge correct-logit margin drives the loss to zero.
        let (loss, _) = cross_entropy_loss(&[60.0, 0.0, 0.0], &[0], 1, 3);
        assert!(loss < 1e-9, "loss {loss}");
        let (loss, _) = cross_entropy_loss(&[60.0, 0.0, 0.0], &[1], 1, 3);
        assert!(loss > 10.0);
    }

    #[test]
    fn zero_gradient_step_is_identity() {
        let mut opt = AdamW::new(4, 0.01, 0.0);
        let mut params = vec![1.0, -2.0, 0.5, 3.0];
        let before = params.clone();
        opt.step(&mut params, &[0.0; 4]);
        assert_eq!(params, before);
    }

    /// Central finite differences over every parameter of a small network,
    /// for both loss kinds and both activations.
    #[test]
    fn gradients_match_finite_differences() {
        for (act, bn) in [(Activation::Relu, true), (Activation::Gelu, true), (Activation::Gelu, false)] {
            let spec = plain_spec(vec![3, 6, 4, 1], act, bn);
            let net = Network::build(3, &spec);
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            let params = net.init_params(&mut rng);
            let running = net.init_running();
            let rows = 5;
            let x: Vec<f64> = (0..rows * 3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let target: Vec<f64> = (0..rows).map(|_| rng.gen_range(0.0..1.0)).collect();

            let loss_of = |p: &[f64]| {
                let (out, _) = net.forward(p, &running, &x, rows, true);
                huber_loss(&out, &target, 0.1).0
            };
            let (out, cache) = net.forward(&params, &running, &x, rows, true);
            let (_, dout) = huber_loss(&out, &target, 0.1);
            let grads = net.backward(&params, &cache.unwrap(), &dout, rows);

            let h = 1e-5;
            let mut p = params.clone();
            for i in 0..p.len() {
                let orig = p[i];
                p[i] = orig + h;
                let up = loss_of(&p);
                p[i] = orig - h;
                let down = loss_of(&p);
                p[i] = orig;
                let fd = (up - down) / (2.0 * h);
                let denom = grads[i].abs().max(fd.abs()).max(1e-8);
                let rel = (grads[i] - fd).abs() / denom;
                assert!(
                    rel < 1e-4 || (grads[i] - fd).abs() < 1e-9,
                    "{act:?} bn={bn} param {i}: analytic {} fd {fd}",
                    grads[i]
                );
            }
        }
    }

    #[test]
    fn encoder_network_gradients_match_finite_differences() {
        let spec = NetworkSpec {
            encoders: Some((4, 6)),
            dirdis_in: 2,
            trunk_sizes: vec![10, 8, 5],
            activation: Activation::Gelu,
            batch_norm: true,
        };
        let net = Network::build(10, &spec);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let params = net.init_params(&mut rng);
        let running = net.init_running();
        let rows = 6;
        let x: Vec<f64> = (0..rows * 10).map(|_| rng.gen_range(0.0..1.0)).collect();
        let labels: Vec<usize> = (0..rows).map(|_| rng.gen_range(0..5)).collect();

        let loss_of = |p: &[f64]| {
            let (out, _) = net.forward(p, &running, &x, rows, true);
            cross_entropy_loss(&out, &labels, rows, 5).0
        };
        let (out, cache) = net.forward(&params, &running, &x, rows, true);
        let (_, dout) = cross_entropy_loss(&out, &labels, rows, 5);
        let grads = net.backward(&params, &cache.unwrap(), &dout, rows);

        let h = 1e-5;
        let mut p = params.clone();
        for i in 0..p.len() {
            let orig = p[i];
            p[i] = orig + h;
            let up = loss_of(&p);
            p[i] = orig - h;
            let down = loss_of(&p);
            p[i] = orig;
            let fd = (up - down) / (2.0 * h);
            let denom = grads[i].abs().max(fd.abs()).max(1e-8);
            let rel = (grads[i] - fd).abs() / denom;
            assert!(
                rel < 1e-4 || (grads[i] - fd).abs() < 1e-9,
                "param {i}: analytic {} fd {fd}",
                grads[i]
            );
        }
    }

    #[test]
    fn eval_mode_uses_running_stats_and_is_deterministic() {
        let spec = plain_spec(vec![2, 4, 1], Activation::Gelu, true);
        let net = Network::build(2, &spec);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let params = net.init_params(&mut rng);
        let mut running = net.init_running();
        let x = vec![0.2, 0.8, 0.9, 0.1, 0.5, 0.5, 0.3, 0.7];
        let (_, cache) = net.forward(&params, &running, &x, 4, true);
        net.update_running(&cache.unwrap(), &mut running, 4);
        let (a, _) = net.forward(&params, &running, &x[..2], 1, false);
        let (b, _) = net.forward(&params, &running, &x[..2], 1, false);
        assert_eq!(a, b);
        // A batch of one in eval mode must not depend on batch statistics.
        let (c, _) = net.forward(&params, &running, &x, 4, false);
        assert!((a[0] - c[0]).abs() < 1e-12);
    }
}
