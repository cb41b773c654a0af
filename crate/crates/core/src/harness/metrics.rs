use std::collections::BTreeMap;

use super::HarnessError;

fn aligned(predictions: &[String], truth: &[String]) -> Result<(), HarnessError> {
    if predictions.len() != truth.len() {
        return Err(HarnessError::Data(format!(
            "{} predictions for {} samples",
            predictions.len(),
            truth.len()
        )));
    }
    Ok(())
}

/// Fraction of correctly predicted samples for every label occurring in `truth`.
pub fn per_class_accuracy(
    predictions: &[String],
    truth: &[String],
) -> Result<BTreeMap<String, f64>, HarnessError> {
    aligned(predictions, truth)?;
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for (p, t) in predictions.iter().zip(truth) {
        let c = counts.entry(t).or_default();
        c.1 += 1;
        if p == t {
            c.0 += 1;
        }
    }
    Ok(counts.into_iter().map(|(l, (ok, n))| (l.to_string(), ok as f64 / n as f64)).collect())
}

/// Unweighted mean over `unseen` of the per-class accuracy.
pub fn macro_accuracy<S: AsRef<str>>(
    predictions: &[String],
    truth: &[String],
    unseen: &[S],
) -> Result<f64, HarnessError> {
    let per_class = per_class_accuracy(predictions, truth)?;
    if unseen.is_empty() {
        return Err(HarnessError::Data("no unseen classes to average over".into()));
    }
    let mut sum = 0.0;
    for c in unseen {
        sum += per_class.get(c.as_ref()).ok_or_else(|| {
            HarnessError::Data(format!("unseen class `{}` has no test samples", c.as_ref()))
        })?;
    }
    Ok(sum / unseen.len() as f64)
}

pub fn sample_accuracy(predictions: &[String], truth: &[String]) -> Result<f64, HarnessError> {
    aligned(predictions, truth)?;
    if truth.is_empty() {
        return Err(HarnessError::Data("no predictions to score".into()));
    }
    let ok = predictions.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(ok as f64 / truth.len() as f64)
}
