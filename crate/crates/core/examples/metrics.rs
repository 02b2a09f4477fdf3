//! Confusion counts, derived scores and the rank-based AUC.

use gnb::metrics::{confusion, roc_auc, scores};

fn main() {
    let actual = ["pos", "pos", "pos", "neg", "neg", "neg", "neg", "neg", "neg", "neg"];
    let predicted = ["pos", "pos", "neg", "pos", "neg", "neg", "neg", "neg", "neg", "neg"];
    let score = [0.9, 0.8, 0.4, 0.7, 0.4, 0.3, 0.2, 0.2, 0.1, 0.05];
    let cm = confusion(&predicted, &actual, &"pos").unwrap();
    let s = scores(&cm).unwrap();
    println!("{cm:?}");
    println!("accuracy {:.4} precision {:.4} recall {:.4} f1 {:.4}", s.accuracy, s.precision, s.recall, s.f1);
    println!("auc {:.4}", roc_auc(&score, &actual, &"pos").unwrap());
    println!("single-class auc: {:?}", roc_auc(&score[..3], &actual[..3], &"pos").map_err(|e| e.to_string()));
}
