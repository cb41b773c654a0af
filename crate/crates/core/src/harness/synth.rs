use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::dataset::{Sample, Split, ZslDataset};
use super::HarnessError;
use crate::ontology::{parse_ontology, Ontology};
use crate::zsl::AttributeTable;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub k_seen: usize,
    pub k_unseen: usize,
    pub per_class: usize,
    /// Feature dimension.
    pub p: usize,
    /// Standard deviation of the feature and attribute noise.
    pub noise: f64,
    pub seed: u64,
    pub groups: usize,
    pub relations: usize,
    /// Fillers per relation; raised automatically when there are too few
    /// combinations for the requested number of classes.
    pub values: usize,
    /// Share of each seen class's samples used for training; the rest is test data.
    pub train_fraction: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            k_seen: 8,
            k_unseen: 2,
            per_class: 30,
            p: 16,
            noise: 0.05,
            seed: 42,
            groups: 2,
            relations: 2,
            values: 3,
            train_fraction: 0.8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub ontology: Ontology,
    pub dataset: ZslDataset,
    pub attributes: AttributeTable,
    /// Class label → concept name.
    pub class_map: BTreeMap<String, String>,
}

/// A class: its group and one filler index per relation.
type Combo = (usize, Vec<usize>);

fn combos(groups: usize, relations: usize, values: usize) -> Vec<Combo> {
    let mut out = Vec::new();
    for g in 0..groups {
        let mut idx = vec![0; relations];
        loop {
            out.push((g, idx.clone()));
            let mut k = 0;
            while k < relations {
                idx[k] += 1;
                if idx[k] < values {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == relations {
                break;
            }
        }
    }
    out
}

/// Pronounceable made-up words, distinct from each other.
fn pseudo_words(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    const ONSETS: [&str; 12] = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t"];
    const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let w: String = (0..3)
            .map(|_| format!("{}{}", ONSETS[rng.random_range(0..12)], VOWELS[rng.random_range(0..5)]))
            .collect();
        if seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

/// Seeded zero-shot benchmark.
///
/// Classes are defined in the ontology as `Gg ⊓ ∃r0.V0_j ⊓ ∃r1.V1_k ⊓ …`, with
/// groups and the fillers of each relation pairwise disjoint. Every class has a
/// latent prototype — the one-hot codes of its group and fillers — and its
/// features are `A·prototype + noise` for one seeded Gaussian `A`. Attribute
/// rows are the prototypes plus noise. Unseen classes are chosen so that each
/// of their groups and fillers also occurs in some seen class.
pub fn gen_synthetic(params: &SynthParams) -> Result<SyntheticData, HarnessError> {
    let SynthParams { k_seen, k_unseen, per_class, p, noise, seed, groups, relations, .. } = *params;
    if k_seen == 0 || k_unseen == 0 || per_class == 0 || p == 0 || groups == 0 || relations == 0 {
        return Err(HarnessError::Usage("synthetic sizes must be positive".into()));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(HarnessError::Usage("noise must be a finite value >= 0".into()));
    }
    if !(params.train_fraction > 0.0 && params.train_fraction <= 1.0) {
        return Err(HarnessError::Usage("train fraction must lie in (0, 1]".into()));
    }
    let k = k_seen + k_unseen;
    let mut values = params.values.max(2);
    while groups * values.pow(relations as u32) < k {
        values += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = combos(groups, relations, values);
    pool.shuffle(&mut rng);
    let seen: Vec<Combo> = pool[..k_seen].to_vec();
    let covered = |c: &Combo| {
        seen.iter().any(|s| s.0 == c.0)
            && (0..relations).all(|r| seen.iter().any(|s| s.1[r] == c.1[r]))
    };
    let rest = &pool[k_seen..];
    let mut unseen: Vec<Combo> = rest.iter().filter(|c| covered(c)).take(k_unseen).cloned().collect();
    for c in rest.iter().filter(|c| !covered(c)) {
        if unseen.len() == k_unseen {
            break;
        }
        unseen.push(c.clone());
    }

    // names and words
    let words = pseudo_words(&mut rng, groups + relations + relations * values);
    let group_word = |g: usize| &words[g];
    let relation_word = |r: usize| &words[groups + r];
    let value_word = |r: usize, v: usize| &words[groups + relations + r * values + v];
    let class_name = |i: usize| format!("K{i:02}");
    let class_label = |i: usize| format!("class_{i:02}");

    let mut text = String::new();
    for g in 0..groups {
        text.push_str(&format!("Concept(G{g})\nLabel(G{g} \"{}\")\n", group_word(g)));
    }
    for r in 0..relations {
        text.push_str(&format!("Relation(r{r})\nLabel(r{r} \"has {}\")\n", relation_word(r)));
        for v in 0..values {
            text.push_str(&format!("Concept(V{r}_{v})\nLabel(V{r}_{v} \"{}\")\n", value_word(r, v)));
        }
    }
    let all: Vec<&Combo> = seen.iter().chain(&unseen).collect();
    for (i, (g, vs)) in all.iter().enumerate() {
        let mut label = vec![group_word(*g).clone()];
        label.extend(vs.iter().enumerate().map(|(r, v)| value_word(r, *v).clone()));
        text.push_str(&format!("Concept({})\nLabel({} \"{}\")\n", class_name(i), class_name(i), label.join(" ")));
    }
    for a in 0..groups {
        for b in a + 1..groups {
            text.push_str(&format!("SubClassOf(And(G{a} G{b}) Bottom)\n"));
        }
    }
    for r in 0..relations {
        for a in 0..values {
            for b in a + 1..values {
                text.push_str(&format!("SubClassOf(And(V{r}_{a} V{r}_{b}) Bottom)\n"));
            }
        }
    }
    for (i, (g, vs)) in all.iter().enumerate() {
        let parts: Vec<String> = vs.iter().enumerate().map(|(r, v)| format!("Some(r{r} V{r}_{v})")).collect();
        text.push_str(&format!("EquivalentTo({} And(G{g} {}))\n", class_name(i), parts.join(" ")));
    }
    let ontology = parse_ontology(&text)
        .map_err(|e| HarnessError::Data(format!("generated ontology does not parse: {e}")))?;

    // latent prototypes and features
    let latent = groups + relations * values;
    let prototype = |(g, vs): &Combo| {
        let mut v = vec![0.0; latent];
        v[*g] = 1.0;
        for (r, x) in vs.iter().enumerate() {
            v[groups + r * values + x] = 1.0;
        }
        v
    };
    let a: Vec<Vec<f64>> =
        (0..p).map(|_| (0..latent).map(|_| StandardNormal.sample(&mut rng)).collect()).collect();
    let gauss = Normal::new(0.0, noise).map_err(|e| HarnessError::Usage(e.to_string()))?;

    let n_train = ((per_class as f64 * params.train_fraction).round() as usize).clamp(1, per_class);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    let mut attributes = AttributeTable { dim: latent, rows: BTreeMap::new() };
    let mut class_map = BTreeMap::new();
    for (i, combo) in all.iter().enumerate() {
        let label = class_label(i);
        let proto = prototype(combo);
        for s in 0..per_class {
            let x: Vec<f64> = a
                .iter()
                .map(|row| row.iter().zip(&proto).map(|(w, z)| w * z).sum::<f64>() + gauss.sample(&mut rng))
                .collect();
            let sample = Sample { id: format!("{label}_{s:03}"), label: label.clone(), x };
            if i < k_seen && s < n_train {
                train.push(sample);
            } else {
                test.push(sample);
            }
        }
        let attr = proto.iter().map(|v| v + gauss.sample(&mut rng)).collect();
        attributes.rows.insert(label.clone(), attr);
        class_map.insert(label, class_name(i));
    }
    let split = Split {
        seen: (0..k_seen).map(class_label).collect(),
        unseen: (k_seen..k).map(class_label).collect(),
    };
    let dataset = ZslDataset::new(train, test, split)?;
    Ok(SyntheticData { ontology, dataset, attributes, class_map })
}
