
use anavi::dataset::read_dataset;
use anavi::metrics::{curve_auc, default_epsilons, eps_accuracy};
use anavi::predictor::{train, PredictorKind, TrainConfig};

fn main() {
    let train_set = read_dataset(std::path::Path::new("/tmp/bench/data/train.jsonl")).unwrap();
    let val_set = read_dataset(std::path::Path::new("/tmp/bench/data/val.jsonl")).unwrap();
    let test_set = read_dataset(std::path::Path::new("/tmp/bench/data/test.jsonl")).unwrap();
    let y_true: Vec<f64> = test_set.iter().map(|s| s.y).collect();
    for kind in [PredictorKind::VisPano, PredictorKind::VisEgo] {
        for wd in [0.01, 0.001, 0.0] {
            let cfg = TrainConfig { weight_decay: wd, ..TrainConfig::for_kind(kind, 1) };
            let (model, log) = train(kind, &cfg, &train_set, &val_set).unwrap();
            let y_pred = model.predict_samples(&test_set).unwrap();
            let curve = eps_accuracy(&y_true, &y_pred, &default_epsilons()).unwrap();
            let auc = curve_auc(&curve).unwrap();
            println!("{:?} wd={wd}: auc {auc:.4} best_epoch {}", kind, log.best_epoch);
        }
    }
}
