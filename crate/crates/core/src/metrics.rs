//! Positive-versus-rest confusion counts, the four derived scores and ROC AUC.
//!
//! Ratios whose denominator is 0 are reported as 0 rather than NaN.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{GnbError, Result};
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

/// Counts outcomes with `positive` as the positive class and every other
/// label as negative.
pub fn confusion<T: PartialEq>(predictions: &[T], actuals: &[T], positive: &T) -> Result<ConfusionMatrix> {
    if predictions.len() != actuals.len() {
        return Err(GnbError::LengthMismatch(predictions.len(), actuals.len()));
    }
    if predictions.is_empty() {
        return Err(GnbError::EmptyInput);
    }
    let mut cm = ConfusionMatrix::default();
    for (p, a) in predictions.iter().zip(actuals) {
        match (p == positive, a == positive) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fp += 1,
            (false, true) => cm.fn_ += 1,
            (false, false) => cm.tn += 1,
        }
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn scores(cm: &ConfusionMatrix) -> Result<Scores> {
    if cm.total() == 0 {
        return Err(GnbError::EmptyInput);
    }
    let accuracy = ratio(cm.tp + cm.tn, cm.total());
    let precision = ratio(cm.tp, cm.tp + cm.fp);
    let recall = ratio(cm.tp, cm.tp + cm.fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(Scores {
        accuracy,
        precision,
        recall,
        f1,
    })
}

/// Probability that a random positive row scores above a random negative
/// one, ties counting one half. Computed from midranks in `O(n log n)`.
pub fn roc_auc<T: PartialEq>(scores: &[f64], actuals: &[T], positive: &T) -> Result<f64> {
    if scores.len() != actuals.len() {
        return Err(GnbError::LengthMismatch(scores.len(), actuals.len()));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(GnbError::InvalidArgument("NaN score".into()));
    }
    let n_pos = actuals.iter().filter(|a| *a == positive).count();
    let n_neg = actuals.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(GnbError::SingleClass);
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap_or(Ordering::Equal));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        // ranks i+1 ..= j+1 share their mean
        let mid = (i + j) as f64 / 2.0 + 1.0;
        let pos_in_group = idx[i..=j].iter().filter(|&&k| actuals[k] == *positive).count();
        rank_sum += mid * pos_in_group as f64;
        i = j + 1;
    }
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Test-set evaluation of one fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub seed: u64,
    pub n_test: usize,
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// `None` when the test set holds a single class.
    pub auc: Option<f64>,
}

impl EvalReport {
    pub const CSV_HEADER: &'static str = "seed,n_test,tp,fp,fn,tn,accuracy,precision,recall,f1,auc";

    pub fn new<T: PartialEq>(
        seed: u64,
        predictions: &[T],
        positive_scores: &[f64],
        actuals: &[T],
        positive: &T,
    ) -> Result<EvalReport> {
        let cm = confusion(predictions, actuals, positive)?;
        let s = scores(&cm)?;
        let auc = match roc_auc(positive_scores, actuals, positive) {
            Ok(a) => Some(a),
            Err(GnbError::SingleClass) => None,
            Err(e) => return Err(e),
        };
        Ok(EvalReport {
            schema_version: SCHEMA_VERSION,
            seed,
            n_test: actuals.len(),
            confusion: cm,
            accuracy: s.accuracy,
            precision: s.precision,
            recall: s.recall,
            f1: s.f1,
            auc,
        })
    }

    /// One row in [`Self::CSV_HEADER`] order; an undefined AUC is left empty.
    pub fn csv_row(&self) -> String {
        let cm = &self.confusion;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.seed,
            self.n_test,
            cm.tp,
            cm.fp,
            cm.fn_,
            cm.tn,
            fmt_metric(self.accuracy),
            fmt_metric(self.precision),
            fmt_metric(self.recall),
            fmt_metric(self.f1),
            self.auc.map(fmt_metric).unwrap_or_default()
        )
    }
}

/// Fixed-precision rendering used in every CSV output.
pub fn fmt_metric(x: f64) -> String {
    format!("{x:.6}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn enumeration_example() {
        let cm = confusion(&[1, 1, 0, 0], &[1, 0, 0, 1], &1).unwrap();
        assert_eq!(cm, ConfusionMatrix { tp: 1, fp: 1, fn_: 1, tn: 1 });
        let all = confusion(&[1, 0, 1], &[1, 0, 1], &1).unwrap();
        assert_eq!((all.fp, all.fn_), (0, 0));
        assert!(confusion(&[1], &[1, 0], &1).is_err());
        assert!(confusion::<u32>(&[], &[], &1).is_err());
    }

    #[test]
    fn nested_loop_recount() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let p: Vec<u32> = (0..50).map(|_| rng.gen_range(0..3)).collect();
        let a: Vec<u32> = (0..50).map(|_| rng.gen_range(0..3)).collect();
        let cm = confusion(&p, &a, &2).unwrap();
        let mut counts = [[0usize; 2]; 2];
        for i in 0..50 {
            counts[(p[i] == 2) as usize][(a[i] == 2) as usize] += 1;
        }
        assert_eq!(cm.tp, counts[1][1]);
        assert_eq!(cm.fp, counts[1][0]);
        assert_eq!(cm.fn_, counts[0][1]);
        assert_eq!(cm.tn, counts[0][0]);
    }

    #[test]
    fn direct_formulas() {
        let s = scores(&ConfusionMatrix { tp: 2, fp: 1, fn_: 1, tn: 6 }).unwrap();
        assert!((s.accuracy - 0.8).abs() < 1e-15);
        assert!((s.precision - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.recall - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.f1 - 2.0 / 3.0).abs() < 1e-15);
        // recall 1/2 and F1 4/7 need a second false negative
        let s = scores(&ConfusionMatrix { tp: 2, fp: 1, fn_: 2, tn: 6 }).unwrap();
        assert!((s.recall - 0.5).abs() < 1e-15);
        assert!((s.f1 - 4.0 / 7.0).abs() < 1e-15);

        let s = scores(&ConfusionMatrix { tp: 5, fp: 0, fn_: 0, tn: 5 }).unwrap();
        assert_eq!((s.accuracy, s.precision, s.recall, s.f1), (1.0, 1.0, 1.0, 1.0));

        let s = scores(&ConfusionMatrix { tp: 0, fp: 0, fn_: 3, tn: 2 }).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
        assert!(scores(&ConfusionMatrix::default()).is_err());
    }

    fn auc_oracle(s: &[f64], a: &[u32], pos: u32) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..s.len() {
            for j in 0..s.len() {
                if a[i] == pos && a[j] != pos {
                    den += 1.0;
                    num += match s[i].partial_cmp(&s[j]).unwrap() {
                        Ordering::Greater => 1.0,
                        Ordering::Equal => 0.5,
                        Ordering::Less => 0.0,
                    };
                }
            }
        }
        num / den
    }

    #[test]
    fn auc_cases() {
        assert_eq!(roc_auc(&[0.1, 0.2, 0.8, 0.9], &[0, 0, 1, 1], &1).unwrap(), 1.0);
        assert_eq!(roc_auc(&[0.5; 4], &[0, 1, 0, 1], &1).unwrap(), 0.5);
        assert!(matches!(roc_auc(&[0.5, 0.6], &[1, 1], &1), Err(GnbError::SingleClass)));
        for seed in 0..20 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            // coarse grid so that ties occur
            let s: Vec<f64> = (0..30).map(|_| rng.gen_range(0..8) as f64 / 7.0).collect();
            let mut a: Vec<u32> = (0..30).map(|_| rng.gen_range(0..2)).collect();
            a[0] = 0;
            a[1] = 1;
            let got = roc_auc(&s, &a, &1).unwrap();
            assert!((got - auc_oracle(&s, &a, 1)).abs() < 1e-12);
        }
    }

    #[test]
    fn report_csv_row() {
        let r = EvalReport::new(7, &[1, 0, 1, 0], &[0.9, 0.2, 0.6, 0.4], &[1, 0, 0, 0], &1).unwrap();
        assert_eq!(r.csv_row(), "7,4,1,1,0,2,0.750000,0.500000,1.000000,0.666667,1.000000");
        let single = EvalReport::new(0, &[1, 1], &[0.9, 0.8], &[1, 1], &1).unwrap();
        assert_eq!(single.auc, None);
        assert!(single.csv_row().ends_with(','));
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["confusion"]["fn"], 0);
        assert_eq!(json["schema_version"], 1);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn labeled() -> impl Strategy<Value = (Vec<f64>, Vec<u32>, Vec<u32>)> {
            (2usize..40).prop_flat_map(|n| {
                (
                    proptest::collection::vec(0u32..10, n).prop_map(|v| v.into_iter().map(|x| x as f64 / 9.0).collect()),
                    proptest::collection::vec(0u32..2, n),
                    proptest::collection::vec(0u32..2, n),
                )
            })
        }

        proptest! {
            #[test]
            fn auc_complement((s, a, _) in labeled()) {
                prop_assume!(a.contains(&0) && a.contains(&1));
                let flipped: Vec<f64> = s.iter().map(|x| 1.0 - x).collect();
                let sum = roc_auc(&s, &a, &1).unwrap() + roc_auc(&flipped, &a, &1).unwrap();
                prop_assert!((sum - 1.0).abs() < 1e-12);
            }

            #[test]
            fn label_swap_duality((_, a, p) in labeled()) {
                let c1 = confusion(&p, &a, &1).unwrap();
                let c0 = confusion(&p, &a, &0).unwrap();
                let s1 = scores(&c1).unwrap();
                let s0 = scores(&c0).unwrap();
                prop_assert!((s1.accuracy - s0.accuracy).abs() < 1e-12);
                prop_assert!((s0.precision - ratio(c1.tn, c1.tn + c1.fn_)).abs() < 1e-12);
                prop_assert!((s0.recall - ratio(c1.tn, c1.tn + c1.fp)).abs() < 1e-12);
            }

            #[test]
            fn permutation_invariance((s, a, p) in labeled(), seed in any::<u64>()) {
                let perm = crate::data::shuffled_indices(a.len(), seed);
                let ps: Vec<f64> = perm.iter().map(|&i| s[i]).collect();
                let pa: Vec<u32> = perm.iter().map(|&i| a[i]).collect();
                let pp: Vec<u32> = perm.iter().map(|&i| p[i]).collect();
                prop_assert_eq!(confusion(&p, &a, &1).unwrap(), confusion(&pp, &pa, &1).unwrap());
                if a.contains(&0) && a.contains(&1) {
                    let d = roc_auc(&s, &a, &1).unwrap() - roc_auc(&ps, &pa, &1).unwrap();
                    prop_assert!(d.abs() < 1e-12);
                }
                let sc = scores(&confusion(&p, &a, &1).unwrap()).unwrap();
                for v in [sc.accuracy, sc.precision, sc.recall, sc.f1] {
                    prop_assert!((0.0..=1.0).contains(&v));
                }
            }
        }
    }
}
