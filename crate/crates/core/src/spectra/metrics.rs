use serde::{Deserialize, Serialize};

use super::{SpectraError, TissueClass};

/// Binary scores with tumor as the positive class. Ratios with a zero
/// denominator are reported as 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub specificity: f64,
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

impl ClassificationMetrics {
    pub fn from_counts(tp: usize, tn: usize, fp: usize, fn_: usize) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Self {
            tp,
            tn,
            fp,
            fn_,
            accuracy: ratio(tp + tn, tp + tn + fp + fn_),
            precision,
            recall,
            f1,
            specificity: ratio(tn, tn + fp),
        }
    }
}

pub fn classification_metrics(predictions: &[TissueClass], labels: &[TissueClass]) -> Result<ClassificationMetrics, SpectraError> {
    if predictions.is_empty() || predictions.len() != labels.len() {
        return Err(SpectraError::EmptyInput);
    }
    let (mut tp, mut tn, mut fp, mut fn_) = (0, 0, 0, 0);
    for (p, l) in predictions.iter().zip(labels) {
        match (p, l) {
            (TissueClass::Tumor, TissueClass::Tumor) => tp += 1,
            (TissueClass::Healthy, TissueClass::Healthy) => tn += 1,
            (TissueClass::Tumor, TissueClass::Healthy) => fp += 1,
            (TissueClass::Healthy, TissueClass::Tumor) => fn_ += 1,
        }
    }
    Ok(ClassificationMetrics::from_counts(tp, tn, fp, fn_))
}

#[cfg(test)]
mod tests {
    use super::*;
    use TissueClass::*;

    #[test]
    fn reported_confusion_row() {
        let m = ClassificationMetrics::from_counts(63, 35, 16, 20);
        let r2 = |v: f64| (v * 100.0).round() / 100.0;
        assert_eq!(r2(m.accuracy), 0.73);
        assert_eq!(r2(m.precision), 0.80);
        assert_eq!(r2(m.recall), 0.76);
        assert_eq!(r2(m.f1), 0.78);
        assert_eq!(r2(m.specificity), 0.69);
    }

    #[test]
    fn perfect_and_all_positive() {
        let l = [Tumor, Healthy, Tumor, Healthy];
        let m = classification_metrics(&l, &l).unwrap();
        assert_eq!([m.accuracy, m.precision, m.recall, m.f1, m.specificity], [1.0; 5]);
        let m = classification_metrics(&[Tumor; 4], &l).unwrap();
        assert_eq!(m.specificity, 0.0);
        assert_eq!(m.recall, 1.0);
        assert_eq!(classification_metrics(&[], &[]), Err(SpectraError::EmptyInput));
    }
}
