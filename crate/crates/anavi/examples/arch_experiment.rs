
use anavi::dataset::read_dataset;
use anavi::metrics::{curve_auc, default_epsilons, eps_accuracy};
use anavi::nn::{huber_loss, Activation, AdamW, BnStats, Layer, LayerKind, Network};
use anavi::predictor::design_matrix;
use anavi::sensing::FeatureLayout;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn build_custom(visual_in: usize, hidden: Option<usize>, dirdis_in: usize) -> Network {
    let mut offset = 0usize;
    let mut bn = 0usize;
    let mut linear = |stack: &mut Vec<Layer>, i: usize, o: usize, off: &mut usize| {
        stack.push(Layer { kind: LayerKind::Linear { in_dim: i, out_dim: o }, param_offset: *off, bn_index: None });
        *off += i * o + o;
    };
    let mut bnorm = |stack: &mut Vec<Layer>, d: usize, off: &mut usize, bn: &mut usize| {
        stack.push(Layer { kind: LayerKind::BatchNorm { dim: d }, param_offset: *off, bn_index: Some(*bn) });
        *off += 2 * d; *bn += 1;
    };
    let mut dirdis_stack = Vec::new();
    linear(&mut dirdis_stack, dirdis_in, 16, &mut offset);
    let mut visual_stack = Vec::new();
    if let Some(h) = hidden {
        linear(&mut visual_stack, visual_in, h, &mut offset);
        bnorm(&mut visual_stack, h, &mut offset, &mut bn);
        visual_stack.push(Layer { kind: LayerKind::Act { act: Activation::Gelu, dim: h }, param_offset: offset, bn_index: None });
        linear(&mut visual_stack, h, 64, &mut offset);
    } else {
        linear(&mut visual_stack, visual_in, 64, &mut offset);
    }
    bnorm(&mut visual_stack, 64, &mut offset, &mut bn);
    let mut trunk = Vec::new();
    let sizes = [80usize, 64, 32, 8, 1];
    for i in 0..sizes.len() - 1 {
        linear(&mut trunk, sizes[i], sizes[i + 1], &mut offset);
        if i + 2 < sizes.len() {
            bnorm(&mut trunk, sizes[i + 1], &mut offset, &mut bn);
            trunk.push(Layer { kind: LayerKind::Act { act: Activation::Gelu, dim: sizes[i + 1] }, param_offset: offset, bn_index: None });
        }
    }
    Network { input_dim: dirdis_in + visual_in, output_dim: 1, dirdis_stack, visual_stack, dirdis_in, trunk, n_params: offset, n_bn: bn }
}

fn trigify(rows: &[f64], n: usize, dim: usize) -> Vec<f64> {
    // [r, theta, scan...] -> [r, sin, cos, scan...] with sin/cos mapped into [0,1]
    let mut out = Vec::with_capacity(n * (dim + 1));
    for i in 0..n {
        let row = &rows[i * dim..(i + 1) * dim];
        let theta = row[1] * std::f64::consts::TAU;
        out.push(row[0]);
        out.push(0.5 + 0.5 * theta.sin());
        out.push(0.5 + 0.5 * theta.cos());
        out.extend_from_slice(&row[2..]);
    }
    out
}

fn main() {
    let train_set = read_dataset(std::path::Path::new("/tmp/bench/data/train.jsonl")).unwrap();
    let val_set = read_dataset(std::path::Path::new("/tmp/bench/data/val.jsonl")).unwrap();
    let test_set = read_dataset(std::path::Path::new("/tmp/bench/data/test.jsonl")).unwrap();
    let (tr_rows, n_tr, tr_y) = design_matrix(&train_set, FeatureLayout::Pano).unwrap();
    let (va_rows, n_va, va_y) = design_matrix(&val_set, FeatureLayout::Pano).unwrap();
    let (te_rows, n_te, _) = design_matrix(&test_set, FeatureLayout::Pano).unwrap();
    let y_true: Vec<f64> = test_set.iter().map(|s| s.y).collect();

    for (name, hidden, trig) in [
        ("hidden96", Some(96), false),
        ("trig", None, true),
        ("hidden96+trig", Some(96), true),
        ("hidden128+trig", Some(128), true),
    ] {
        let dim = 130;
        let (tr, va, te, dirdis_in, d2) = if trig {
            (trigify(&tr_rows, n_tr, dim), trigify(&va_rows, n_va, dim), trigify(&te_rows, n_te, dim), 3usize, dim + 1)
        } else {
            (tr_rows.clone(), va_rows.clone(), te_rows.clone(), 2usize, dim)
        };
        let net = build_custom(128, hidden, dirdis_in);
        assert_eq!(net.input_dim, d2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut params = net.init_params(&mut rng);
        let mut running = net.init_running();
        let mut opt = AdamW::new(net.n_params, 0.01, 0.01);
        let mut best: Option<(f64, Vec<f64>, Vec<BnStats>)> = None;
        for epoch in 0..60usize {
            opt.learning_rate = 0.01 * 0.95f64.powi((epoch / 10) as i32);
            let mut order: Vec<usize> = (0..n_tr).collect();
            use rand::seq::SliceRandom;
            let mut srng = ChaCha8Rng::seed_from_u64(1000 + epoch as u64);
            order.shuffle(&mut srng);
            for chunk in order.chunks(64) {
                let rows_n = chunk.len();
                let mut batch = Vec::with_capacity(rows_n * d2);
                for &i in chunk { batch.extend_from_slice(&tr[i * d2..(i + 1) * d2]); }
                let targets: Vec<f64> = chunk.iter().map(|&i| tr_y[i]).collect();
                let (out, cache) = net.forward(&params, &running, &batch, rows_n, true);
                let cache = cache.unwrap();
                let (_, dout) = huber_loss(&out, &targets, 0.1);
                let grads = net.backward(&params, &cache, &dout, rows_n);
                opt.step(&mut params, &grads);
                net.update_running(&cache, &mut running, rows_n);
            }
            let (vout, _) = net.forward(&params, &running, &va, n_va, false);
            let (vloss, _) = huber_loss(&vout, &va_y, 0.1);
            if best.as_ref().map_or(true, |(b, _, _)| vloss < *b) {
                best = Some((vloss, params.clone(), running.clone()));
            }
        }
        let (_, bp, br) = best.unwrap();
        let (tout, _) = net.forward(&bp, &br, &te, n_te, false);
        let y_pred: Vec<f64> = tout.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        let curve = eps_accuracy(&y_true, &y_pred, &default_epsilons()).unwrap();
        println!("{name}: auc {:.4}", curve_auc(&curve).unwrap());
    }
}
