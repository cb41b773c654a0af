use std::fmt;
use std::str::FromStr;

use super::{EncodingTable, ZslError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Distance {
    #[default]
    L2,
    /// `1 − cos(a, b)`.
    Cosine,
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distance::L2 => "l2",
            Distance::Cosine => "cosine",
        })
    }
}

impl FromStr for Distance {
    type Err = ZslError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l2" => Ok(Distance::L2),
            "cosine" => Ok(Distance::Cosine),
            _ => Err(ZslError::InvalidConfig(format!("unknown distance `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CandidateSet {
    #[default]
    UnseenOnly,
    /// Generalized setting: seen and unseen labels compete.
    SeenAndUnseen,
}

impl fmt::Display for CandidateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CandidateSet::UnseenOnly => "unseen",
            CandidateSet::SeenAndUnseen => "all",
        })
    }
}

impl FromStr for CandidateSet {
    type Err = ZslError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "unseen" | "unseen_only" => Ok(CandidateSet::UnseenOnly),
            "all" | "seen_and_unseen" => Ok(CandidateSet::SeenAndUnseen),
            _ => Err(ZslError::InvalidConfig(format!("unknown candidate set `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PredictConfig {
    pub distance: Distance,
    pub candidates: CandidateSet,
}

impl CandidateSet {
    pub fn labels<'a>(&self, seen: &'a [String], unseen: &'a [String]) -> Vec<&'a str> {
        let mut v: Vec<&str> = unseen.iter().map(String::as_str).collect();
        if *self == CandidateSet::SeenAndUnseen {
            v.extend(seen.iter().map(String::as_str));
        }
        v.sort_unstable();
        v.dedup();
        v
    }
}

pub fn distance(a: &[f64], b: &[f64], kind: Distance) -> Result<f64, ZslError> {
    if a.len() != b.len() {
        return Err(ZslError::Dimension { expected: a.len(), found: b.len() });
    }
    match kind {
        Distance::L2 => Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()),
        Distance::Cosine => {
            let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            if na == 0.0 || nb == 0.0 {
                return Err(ZslError::ZeroVector);
            }
            Ok(1.0 - a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / (na * nb))
        }
    }
}

/// The candidate whose encoding is closest to `gx`; among equally close ones the
/// lexicographically smallest label wins.
pub fn predict<S: AsRef<str>>(
    gx: &[f64],
    table: &EncodingTable,
    candidates: &[S],
    kind: Distance,
) -> Result<String, ZslError> {
    let mut labels: Vec<&str> = candidates.iter().map(AsRef::as_ref).collect();
    labels.sort_unstable();
    let mut best: Option<(&str, f64)> = None;
    for label in labels {
        let h = table.get(label).ok_or_else(|| ZslError::UnknownLabel {
            label: label.to_string(),
            what: "encoding".into(),
        })?;
        let d = distance(h, gx, kind)?;
        if d.is_nan() {
            return Err(ZslError::Divergence(format!("distance to `{label}` is NaN")));
        }
        if best.is_none_or(|(_, b)| d < b) {
            best = Some((label, d));
        }
    }
    best.map(|(l, _)| l.to_string()).ok_or(ZslError::EmptyCandidates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zsl::Component;

    fn table(rows: &[(&str, &[f64])]) -> EncodingTable {
        EncodingTable {
            components: vec![Component::Attribute],
            dims: vec![rows[0].1.len()],
            encodings: rows.iter().map(|(l, v)| (l.to_string(), v.to_vec())).collect(),
        }
    }

    #[test]
    fn distances() {
        assert_eq!(distance(&[0.0, 0.0], &[3.0, 4.0], Distance::L2).unwrap(), 5.0);
        assert!(distance(&[0.3, -2.0], &[0.3, -2.0], Distance::Cosine).unwrap().abs() < 1e-15);
        assert_eq!(distance(&[1.0, 0.0], &[0.0, 1.0], Distance::Cosine).unwrap(), 1.0);
        assert!(matches!(distance(&[0.0, 0.0], &[1.0, 0.0], Distance::Cosine), Err(ZslError::ZeroVector)));
        assert!(distance(&[0.0], &[1.0, 0.0], Distance::L2).is_err());
    }

    #[test]
    fn nearest_candidate() {
        let t = table(&[("y1", &[0.0, 0.0]), ("y2", &[1.0, 1.0])]);
        assert_eq!(predict(&[0.9, 0.8], &t, &["y1", "y2"], Distance::L2).unwrap(), "y2");
        assert_eq!(predict(&[0.9, 0.8], &t, &["y1"], Distance::L2).unwrap(), "y1");
        let none: [&str; 0] = [];
        assert!(matches!(predict(&[0.0, 0.0], &t, &none, Distance::L2), Err(ZslError::EmptyCandidates)));
        assert!(predict(&[0.0, 0.0], &t, &["y3"], Distance::L2).is_err());
    }

    #[test]
    fn ties_go_to_smallest_label() {
        let t = table(&[("b", &[1.0, 0.0]), ("a", &[-1.0, 0.0])]);
        assert_eq!(predict(&[0.0, 0.0], &t, &["b", "a"], Distance::L2).unwrap(), "a");
    }

    #[test]
    fn candidate_sets() {
        let seen = vec!["s".to_string()];
        let unseen = vec!["u2".to_string(), "u1".to_string()];
        assert_eq!(CandidateSet::UnseenOnly.labels(&seen, &unseen), vec!["u1", "u2"]);
        assert_eq!(CandidateSet::SeenAndUnseen.labels(&seen, &unseen), vec!["s", "u1", "u2"]);
        assert_eq!("all".parse::<CandidateSet>().unwrap(), CandidateSet::SeenAndUnseen);
        assert_eq!("Cosine".parse::<Distance>().unwrap(), Distance::Cosine);
    }
}
