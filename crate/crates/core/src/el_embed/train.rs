use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::loss::{eval, Kind};
use super::{Ball, EmbedError, EmbeddingSpace};
use crate::normalizer::{NormalAxiom, NormalizedOntology, BOTTOM};

/// Stream offset for the negatives drawn by [`total_loss`], so that they do not
/// replay the draws made during training.
const EVAL_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, PartialEq)]
pub struct ElTrainConfig {
    pub dim: usize,
    /// Slack ε of the hinge losses.
    pub margin: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Corrupted fillers drawn per `A ⊑ ∃r.B` axiom.
    pub negatives: usize,
    /// Lower bound on every radius; nominal concepts are pinned to it.
    pub gamma_min: f64,
    pub seed: u64,
}

impl Default for ElTrainConfig {
    fn default() -> Self {
        ElTrainConfig {
            dim: 50,
            margin: 0.1,
            learning_rate: 0.01,
            epochs: 1000,
            batch_size: 64,
            negatives: 1,
            gamma_min: 1e-3,
            seed: 42,
        }
    }
}

impl ElTrainConfig {
    pub fn validate(&self) -> Result<(), EmbedError> {
        let bad = |m: &str| Err(EmbedError::InvalidConfig(m.to_string()));
        if self.dim == 0 {
            return bad("dim must be positive");
        }
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            return bad("margin must be a finite value >= 0");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch size must be positive");
        }
        if !(self.gamma_min > 0.0 && self.gamma_min.is_finite()) {
            return bad("gamma_min must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainedSpace {
    pub space: EmbeddingSpace,
    /// `total_loss` of the returned space.
    pub final_loss: f64,
    /// Summed minibatch losses per epoch, as seen during the epoch.
    pub epoch_losses: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
enum Indexed {
    Nf1(usize, usize),
    Nf2(usize, usize, usize),
    Nf3(usize, usize, usize),
    Nf4(usize, usize, usize),
    Disjoint(usize, usize),
    Role(usize, usize),
}

struct Problem {
    axioms: Vec<Indexed>,
    /// Concept ids eligible as corrupted fillers.
    candidates: Vec<usize>,
    frozen: Vec<usize>,
}

fn index_problem(space: &EmbeddingSpace, n: &NormalizedOntology) -> Result<Problem, EmbedError> {
    let c = |name: &str| {
        space.concept_id(name).ok_or_else(|| EmbedError::UnknownConcept(name.to_string()))
    };
    let r = |name: &str| {
        space.relation_id(name).ok_or_else(|| EmbedError::UnknownRelation(name.to_string()))
    };
    let mut axioms = Vec::new();
    for ax in &n.axioms {
        // ⊥ only takes part through disjointness axioms
        if ax.concepts().contains(&BOTTOM) {
            continue;
        }
        axioms.push(match ax {
            NormalAxiom::Nf1 { sub, sup } => Indexed::Nf1(c(sub)?, c(sup)?),
            NormalAxiom::Nf2 { sub, relation, filler } => {
                Indexed::Nf2(c(sub)?, r(relation)?, c(filler)?)
            }
            NormalAxiom::Nf3 { relation, filler, sup } => {
                Indexed::Nf3(r(relation)?, c(filler)?, c(sup)?)
            }
            NormalAxiom::Nf4 { left, right, sup } => Indexed::Nf4(c(left)?, c(right)?, c(sup)?),
            NormalAxiom::Disjoint { left, right } => Indexed::Disjoint(c(left)?, c(right)?),
            NormalAxiom::RoleSub { sub, sup } => Indexed::Role(r(sub)?, r(sup)?),
        });
    }
    let candidates =
        n.sampling_concepts().into_iter().map(c).collect::<Result<Vec<_>, _>>()?;
    let frozen = n.nominals.iter().map(|(_, name)| c(name)).collect::<Result<Vec<_>, _>>()?;
    Ok(Problem { axioms, candidates, frozen })
}

/// Uniform draw from `candidates` without `exclude`; `None` if nothing is left.
fn corrupt(rng: &mut ChaCha8Rng, candidates: &[usize], exclude: usize) -> Option<usize> {
    match candidates.iter().position(|&x| x == exclude) {
        Some(pos) => {
            if candidates.len() < 2 {
                return None;
            }
            let j = rng.random_range(0..candidates.len() - 1);
            Some(candidates[if j >= pos { j + 1 } else { j }])
        }
        None if candidates.is_empty() => None,
        None => Some(candidates[rng.random_range(0..candidates.len())]),
    }
}

struct Grads {
    centers: Vec<Vec<f64>>,
    radii: Vec<f64>,
    relations: Vec<Vec<f64>>,
}

impl Grads {
    fn zeros(space: &EmbeddingSpace) -> Self {
        Grads {
            centers: vec![vec![0.0; space.dim()]; space.concept_count()],
            radii: vec![0.0; space.concept_count()],
            relations: vec![vec![0.0; space.dim()]; space.relation_count()],
        }
    }

    fn clear(&mut self) {
        self.centers.iter_mut().for_each(|v| v.fill(0.0));
        self.radii.fill(0.0);
        self.relations.iter_mut().for_each(|v| v.fill(0.0));
    }
}

/// Evaluates one term over concept ids `cs` and relation ids `rs`, adding its
/// gradient into `grads` when given.
fn term(
    space: &EmbeddingSpace,
    kind: Kind,
    cs: &[usize],
    rs: &[usize],
    margin: f64,
    grads: Option<&mut Grads>,
) -> f64 {
    let centers: Vec<&[f64]> = cs.iter().map(|&i| space.ball_at(i).center.as_slice()).collect();
    let radii: Vec<f64> = cs.iter().map(|&i| space.ball_at(i).radius).collect();
    let rels: Vec<&[f64]> = rs.iter().map(|&i| space.relation_at(i)).collect();
    let (value, g) = eval(kind, &centers, &radii, &rels, margin);
    if let Some(grads) = grads {
        for (k, &i) in cs.iter().enumerate() {
            for (acc, x) in grads.centers[i].iter_mut().zip(&g.centers[k]) {
                *acc += x;
            }
            grads.radii[i] += g.radii[k];
        }
        for (k, &i) in rs.iter().enumerate() {
            for (acc, x) in grads.relations[i].iter_mut().zip(&g.relations[k]) {
                *acc += x;
            }
        }
    }
    value
}

/// Loss of one axiom plus its sampled negatives.
fn axiom_loss(
    space: &EmbeddingSpace,
    problem: &Problem,
    ax: Indexed,
    cfg: &ElTrainConfig,
    rng: &mut ChaCha8Rng,
    mut grads: Option<&mut Grads>,
) -> f64 {
    let m = cfg.margin;
    match ax {
        Indexed::Nf1(a, b) => term(space, Kind::Nf1, &[a, b], &[], m, grads),
        Indexed::Nf2(a, r, b) => {
            let mut v = term(space, Kind::Nf2, &[a, b], &[r], m, grads.as_deref_mut());
            for _ in 0..cfg.negatives {
                if let Some(bad) = corrupt(rng, &problem.candidates, b) {
                    v += term(space, Kind::Nf2Negative, &[a, bad], &[r], m, grads.as_deref_mut());
                }
            }
            v
        }
        Indexed::Nf3(r, a, b) => term(space, Kind::Nf3, &[a, b], &[r], m, grads),
        Indexed::Nf4(a, b, c) => term(space, Kind::Nf4, &[a, b, c], &[], m, grads),
        Indexed::Disjoint(a, b) => term(space, Kind::Disjoint, &[a, b], &[], m, grads),
        Indexed::Role(r, s) => term(space, Kind::Role, &[], &[r, s], m, grads),
    }
}

/// Sum of all axiom losses of `n` on `s`, with `cfg.negatives` corrupted fillers
/// per `A ⊑ ∃r.B` axiom drawn from a generator seeded by `cfg.seed`.
pub fn total_loss(
    s: &EmbeddingSpace,
    n: &NormalizedOntology,
    cfg: &ElTrainConfig,
) -> Result<f64, EmbedError> {
    let problem = index_problem(s, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ EVAL_STREAM);
    Ok(problem.axioms.iter().map(|&ax| axiom_loss(s, &problem, ax, cfg, &mut rng, None)).sum())
}

/// Seeded initial space: unit-sphere centers, radius 0.1 (nominals at `gamma_min`),
/// relations uniform in `[-0.1, 0.1]`.
fn initial_space(
    n: &NormalizedOntology,
    cfg: &ElTrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<EmbeddingSpace, EmbedError> {
    let mut space = EmbeddingSpace::new(cfg.dim);
    for name in n.all_concepts() {
        let center = loop {
            let v: Vec<f64> = (0..cfg.dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                break v.into_iter().map(|x| x / norm).collect::<Vec<_>>();
            }
        };
        let radius = if n.is_nominal(name) { cfg.gamma_min } else { 0.1f64.max(cfg.gamma_min) };
        space.insert_concept(name, Ball::new(center, radius))?;
    }
    for r in &n.relations {
        let v = (0..cfg.dim).map(|_| rng.random_range(-0.1..=0.1)).collect();
        space.insert_relation(r, v)?;
    }
    Ok(space)
}

/// Minibatch SGD over all normal axioms.
///
/// Each epoch visits the axioms in a fresh seeded permutation. The step size
/// decays linearly from `learning_rate` towards zero over the epochs, gradients
/// are averaged over the axioms of a batch, and radii are clamped to
/// `gamma_min` after every step.
pub fn train_el(n: &NormalizedOntology, cfg: &ElTrainConfig) -> Result<TrainedSpace, EmbedError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut space = initial_space(n, cfg, &mut rng)?;
    let problem = index_problem(&space, n)?;
    let mut grads = Grads::zeros(&space);
    let mut order: Vec<usize> = (0..problem.axioms.len()).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let mut step = 0;

    for epoch in 0..cfg.epochs {
        let lr = cfg.learning_rate * (1.0 - epoch as f64 / cfg.epochs as f64);
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            grads.clear();
            let mut batch_loss = 0.0;
            for &i in batch {
                batch_loss +=
                    axiom_loss(&space, &problem, problem.axioms[i], cfg, &mut rng, Some(&mut grads));
            }
            if !batch_loss.is_finite() {
                return Err(EmbedError::Divergence { step });
            }
            let scale = lr / batch.len() as f64;
            for (ball, (g, gr)) in
                space.balls_mut().iter_mut().zip(grads.centers.iter().zip(&grads.radii))
            {
                for (x, d) in ball.center.iter_mut().zip(g) {
                    *x -= scale * d;
                }
                ball.radius = (ball.radius - scale * gr).max(cfg.gamma_min);
            }
            for &i in &problem.frozen {
                space.balls_mut()[i].radius = cfg.gamma_min;
            }
            for (v, g) in space.relations_mut().iter_mut().zip(&grads.relations) {
                for (x, d) in v.iter_mut().zip(g) {
                    *x -= scale * d;
                }
            }
            epoch_loss += batch_loss;
            step += 1;
        }
        epoch_losses.push(epoch_loss);
    }

    let final_loss = total_loss(&space, n, cfg)?;
    if !final_loss.is_finite() {
        return Err(EmbedError::Divergence { step });
    }
    Ok(TrainedSpace { space, final_loss, epoch_losses })
}
