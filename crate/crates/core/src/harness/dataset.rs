use std::collections::BTreeSet;
use std::fmt::Write;

use super::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub id: String,
    pub label: String,
    pub x: Vec<f64>,
}

/// Training samples (seen labels only), test samples, and the label split.
#[derive(Debug, Clone, PartialEq)]
pub struct ZslDataset {
    pub feature_dim: usize,
    pub train: Vec<Sample>,
    pub test: Vec<Sample>,
    pub seen: Vec<String>,
    pub unseen: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Split {
    pub seen: Vec<String>,
    pub unseen: Vec<String>,
}

fn data_err(file: &str, line: usize, message: impl Into<String>) -> HarnessError {
    HarnessError::Data(format!("{file}, line {line}: {}", message.into()))
}

/// `id<TAB>label<TAB>f1,...,fp` rows. All rows must have the same length.
pub fn read_features(text: &str, file: &str) -> Result<Vec<Sample>, HarnessError> {
    let mut samples: Vec<Sample> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [id, label, values] = fields[..] else {
            return Err(data_err(file, i + 1, "expected `id<TAB>label<TAB>f1,...,fp`"));
        };
        let x: Vec<f64> = values
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| data_err(file, i + 1, format!("`{v}` is not a number"))))
            .collect::<Result<_, _>>()?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(data_err(file, i + 1, format!("row `{id}` has a non-finite value")));
        }
        if let Some(first) = samples.first() {
            if first.x.len() != x.len() {
                return Err(data_err(
                    file,
                    i + 1,
                    format!("row `{id}` has {} values, expected {}", x.len(), first.x.len()),
                ));
            }
        }
        samples.push(Sample { id: id.to_string(), label: label.to_string(), x });
    }
    Ok(samples)
}

pub fn write_features(samples: &[Sample]) -> String {
    let mut out = String::new();
    for s in samples {
        let values: Vec<String> = s.x.iter().map(|v| format!("{v:.16e}")).collect();
        let _ = writeln!(out, "{}\t{}\t{}", s.id, s.label, values.join(","));
    }
    out
}

/// `[seen]` and `[unseen]` sections, one label per line.
pub fn read_split(text: &str) -> Result<Split, HarnessError> {
    let mut split = Split::default();
    let mut section: Option<bool> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "[seen]" => section = Some(true),
            "[unseen]" => section = Some(false),
            label => match section {
                Some(true) => split.seen.push(label.to_string()),
                Some(false) => split.unseen.push(label.to_string()),
                None => return Err(data_err("split file", i + 1, "label outside a section")),
            },
        }
    }
    let seen: BTreeSet<&String> = split.seen.iter().collect();
    if let Some(both) = split.unseen.iter().find(|l| seen.contains(l)) {
        return Err(HarnessError::Data(format!("label `{both}` is both seen and unseen")));
    }
    Ok(split)
}

pub fn write_split(split: &Split) -> String {
    let mut out = String::from("[seen]\n");
    for l in &split.seen {
        let _ = writeln!(out, "{l}");
    }
    out.push_str("[unseen]\n");
    for l in &split.unseen {
        let _ = writeln!(out, "{l}");
    }
    out
}

impl ZslDataset {
    /// Checks the split invariants: disjoint label sets, training samples carry
    /// seen labels, test samples carry known labels, one feature length overall.
    pub fn new(train: Vec<Sample>, test: Vec<Sample>, split: Split) -> Result<Self, HarnessError> {
        let seen: BTreeSet<&str> = split.seen.iter().map(String::as_str).collect();
        let unseen: BTreeSet<&str> = split.unseen.iter().map(String::as_str).collect();
        if let Some(l) = seen.intersection(&unseen).next() {
            return Err(HarnessError::Data(format!("label `{l}` is both seen and unseen")));
        }
        if let Some(s) = train.iter().find(|s| !seen.contains(s.label.as_str())) {
            return Err(HarnessError::Data(format!(
                "training sample `{}` has label `{}`, which is not a seen label",
                s.id, s.label
            )));
        }
        if let Some(s) =
            test.iter().find(|s| !seen.contains(s.label.as_str()) && !unseen.contains(s.label.as_str()))
        {
            return Err(HarnessError::Data(format!(
                "test sample `{}` has label `{}`, which is not in the split",
                s.id, s.label
            )));
        }
        let feature_dim = train.first().or(test.first()).map_or(0, |s| s.x.len());
        if let Some(s) = train.iter().chain(&test).find(|s| s.x.len() != feature_dim) {
            return Err(HarnessError::Data(format!(
                "sample `{}` has {} features, expected {feature_dim}",
                s.id,
                s.x.len()
            )));
        }
        Ok(ZslDataset { feature_dim, train, test, seen: split.seen, unseen: split.unseen })
    }

    pub fn split(&self) -> Split {
        Split { seen: self.seen.clone(), unseen: self.unseen.clone() }
    }

    pub fn labels(&self) -> Vec<String> {
        let mut v: Vec<String> = self.seen.iter().chain(&self.unseen).cloned().collect();
        v.sort();
        v
    }
}

/// Reads and validates the three dataset files.
pub fn load_dataset(train: &str, test: &str, split: &str) -> Result<ZslDataset, HarnessError> {
    ZslDataset::new(
        read_features(train, "training features")?,
        read_features(test, "test features")?,
        read_split(split)?,
    )
}
