//! Geometric losses over balls and translation vectors, with analytic gradients.
//!
//! Every concept loss carries the unit-norm penalties `|‖ν‖ − 1|` of the
//! concepts it touches. At points where a norm is zero the gradient of that norm
//! is taken as zero.

use std::collections::BTreeMap;

use super::{EmbedError, EmbeddingSpace};

/// One loss term, by operand name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossTerm<'a> {
    /// `a ⊑ b`
    Nf1 { a: &'a str, b: &'a str },
    /// `a ⊑ ∃r.b`
    Nf2 { a: &'a str, r: &'a str, b: &'a str },
    /// `∃r.a ⊑ b`
    Nf3 { r: &'a str, a: &'a str, b: &'a str },
    /// `a ⊓ b ⊑ c`
    Nf4 { a: &'a str, b: &'a str, c: &'a str },
    /// `a ⊓ b ⊑ ⊥`
    Disjoint { a: &'a str, b: &'a str },
    /// `r ⊑ s`
    Role { r: &'a str, s: &'a str },
    /// corrupted `a ⊑ ∃r.b` that should not hold
    Nf2Negative { a: &'a str, r: &'a str, b: &'a str },
}

impl<'a> LossTerm<'a> {
    pub(crate) fn kind(&self) -> Kind {
        match self {
            LossTerm::Nf1 { .. } => Kind::Nf1,
            LossTerm::Nf2 { .. } => Kind::Nf2,
            LossTerm::Nf3 { .. } => Kind::Nf3,
            LossTerm::Nf4 { .. } => Kind::Nf4,
            LossTerm::Disjoint { .. } => Kind::Disjoint,
            LossTerm::Role { .. } => Kind::Role,
            LossTerm::Nf2Negative { .. } => Kind::Nf2Negative,
        }
    }

    pub fn concepts(&self) -> Vec<&'a str> {
        match *self {
            LossTerm::Nf1 { a, b }
            | LossTerm::Nf2 { a, b, .. }
            | LossTerm::Nf3 { a, b, .. }
            | LossTerm::Disjoint { a, b }
            | LossTerm::Nf2Negative { a, b, .. } => vec![a, b],
            LossTerm::Nf4 { a, b, c } => vec![a, b, c],
            LossTerm::Role { .. } => vec![],
        }
    }

    pub fn relations(&self) -> Vec<&'a str> {
        match *self {
            LossTerm::Nf2 { r, .. } | LossTerm::Nf3 { r, .. } | LossTerm::Nf2Negative { r, .. } => {
                vec![r]
            }
            LossTerm::Role { r, s } => vec![r, s],
            _ => vec![],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kind {
    Nf1,
    Nf2,
    Nf3,
    Nf4,
    Disjoint,
    Role,
    Nf2Negative,
}

/// Gradient of a kernel with respect to its operands, in operand order.
#[derive(Debug, Clone)]
pub(crate) struct KernelGrad {
    pub centers: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    pub relations: Vec<Vec<f64>>,
}

/// Gradient of one loss term keyed by name. Repeated operands are summed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Gradient {
    pub centers: BTreeMap<String, Vec<f64>>,
    pub radii: BTreeMap<String, f64>,
    pub relations: BTreeMap<String, Vec<f64>>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `‖v‖` and its gradient `v / ‖v‖` (zero at the origin).
fn norm_grad(v: &[f64]) -> (f64, Vec<f64>) {
    let n = norm(v);
    if n > 0.0 {
        (n, v.iter().map(|x| x / n).collect())
    } else {
        (0.0, vec![0.0; v.len()])
    }
}

/// `|‖c‖ − 1|` and its gradient.
fn unit_penalty(c: &[f64]) -> (f64, Vec<f64>) {
    let (n, mut g) = norm_grad(c);
    let dev = n - 1.0;
    let sign = if dev > 0.0 {
        1.0
    } else if dev < 0.0 {
        -1.0
    } else {
        0.0
    };
    g.iter_mut().for_each(|x| *x *= sign);
    (dev.abs(), g)
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn combine(terms: &[(f64, &[f64])], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (alpha, v) in terms {
        axpy(*alpha, v, &mut out);
    }
    out
}

/// Evaluates a kernel. `centers`/`radii` follow `LossTerm::concepts` order and
/// `relations` follows `LossTerm::relations` order.
pub(crate) fn eval(
    kind: Kind,
    centers: &[&[f64]],
    radii: &[f64],
    relations: &[&[f64]],
    margin: f64,
) -> (f64, KernelGrad) {
    let dim = centers.first().or(relations.first()).map_or(0, |v| v.len());
    let mut g = KernelGrad {
        centers: vec![vec![0.0; dim]; centers.len()],
        radii: vec![0.0; radii.len()],
        relations: vec![vec![0.0; dim]; relations.len()],
    };
    let mut value = 0.0;

    match kind {
        Kind::Nf1 | Kind::Nf2 | Kind::Nf3 | Kind::Nf2Negative => {
            let (a, b) = (centers[0], centers[1]);
            // displacement whose length is compared against the radii
            let diff = match kind {
                Kind::Nf1 => combine(&[(1.0, a), (-1.0, b)], dim),
                Kind::Nf2 | Kind::Nf2Negative => {
                    combine(&[(1.0, a), (1.0, relations[0]), (-1.0, b)], dim)
                }
                _ => combine(&[(1.0, a), (-1.0, relations[0]), (-1.0, b)], dim),
            };
            let (d, u) = norm_grad(&diff);
            let (ra, rb) = (radii[0], radii[1]);
            // h = s·d + ρa·ra + ρb·rb + μ·margin, activated when h > 0
            let (s, rho_a, rho_b, mu) = match kind {
                Kind::Nf1 | Kind::Nf2 => (1.0, 1.0, -1.0, -1.0),
                Kind::Nf3 => (1.0, -1.0, -1.0, -1.0),
                _ => (-1.0, 1.0, 1.0, 1.0),
            };
            let h = s * d + rho_a * ra + rho_b * rb + mu * margin;
            if h > 0.0 {
                value += h;
                axpy(s, &u, &mut g.centers[0]);
                axpy(-s, &u, &mut g.centers[1]);
                match kind {
                    Kind::Nf2 | Kind::Nf2Negative => axpy(s, &u, &mut g.relations[0]),
                    Kind::Nf3 => axpy(-s, &u, &mut g.relations[0]),
                    _ => {}
                }
                g.radii[0] += rho_a;
                g.radii[1] += rho_b;
            }
        }
        Kind::Nf4 => {
            let (a, b, c) = (centers[0], centers[1], centers[2]);
            let (ra, rb, rc) = (radii[0], radii[1], radii[2]);
            let (dab, uab) = norm_grad(&combine(&[(1.0, a), (-1.0, b)], dim));
            let h = dab - ra - rb - margin;
            if h > 0.0 {
                value += h;
                axpy(1.0, &uab, &mut g.centers[0]);
                axpy(-1.0, &uab, &mut g.centers[1]);
                g.radii[0] -= 1.0;
                g.radii[1] -= 1.0;
            }
            for (i, x) in [(0usize, a), (1, b)] {
                let (d, u) = norm_grad(&combine(&[(1.0, x), (-1.0, c)], dim));
                let h = d - rc - margin;
                if h > 0.0 {
                    value += h;
                    axpy(1.0, &u, &mut g.centers[i]);
                    axpy(-1.0, &u, &mut g.centers[2]);
                    g.radii[2] -= 1.0;
                }
            }
        }
        Kind::Disjoint => {
            let (d, u) = norm_grad(&combine(&[(1.0, centers[0]), (-1.0, centers[1])], dim));
            let h = radii[0] + radii[1] - d + margin;
            if h > 0.0 {
                value += h;
                axpy(-1.0, &u, &mut g.centers[0]);
                axpy(1.0, &u, &mut g.centers[1]);
                g.radii[0] += 1.0;
                g.radii[1] += 1.0;
            }
        }
        Kind::Role => {
            let (d, u) = norm_grad(&combine(&[(1.0, relations[0]), (-1.0, relations[1])], dim));
            value += d;
            axpy(1.0, &u, &mut g.relations[0]);
            axpy(-1.0, &u, &mut g.relations[1]);
        }
    }

    for (i, c) in centers.iter().enumerate() {
        let (p, pg) = unit_penalty(c);
        value += p;
        axpy(1.0, &pg, &mut g.centers[i]);
    }
    (value, g)
}

fn lookup<'s>(
    space: &'s EmbeddingSpace,
    term: &LossTerm<'_>,
) -> Result<(Vec<&'s [f64]>, Vec<f64>, Vec<&'s [f64]>), EmbedError> {
    let mut centers = Vec::new();
    let mut radii = Vec::new();
    for name in term.concepts() {
        let ball =
            space.concept(name).ok_or_else(|| EmbedError::UnknownConcept(name.to_string()))?;
        centers.push(ball.center.as_slice());
        radii.push(ball.radius);
    }
    let relations = term
        .relations()
        .into_iter()
        .map(|r| space.relation(r).ok_or_else(|| EmbedError::UnknownRelation(r.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((centers, radii, relations))
}

/// Value of one loss term on `space`.
pub fn loss(space: &EmbeddingSpace, term: LossTerm<'_>, margin: f64) -> Result<f64, EmbedError> {
    let (c, r, v) = lookup(space, &term)?;
    Ok(eval(term.kind(), &c, &r, &v, margin).0)
}

/// Value and analytic gradient of one loss term.
pub fn loss_gradient(
    space: &EmbeddingSpace,
    term: LossTerm<'_>,
    margin: f64,
) -> Result<(f64, Gradient), EmbedError> {
    let (c, r, v) = lookup(space, &term)?;
    let (value, kg) = eval(term.kind(), &c, &r, &v, margin);
    let mut grad = Gradient::default();
    for (i, name) in term.concepts().into_iter().enumerate() {
        let entry = grad.centers.entry(name.to_string()).or_insert_with(|| vec![0.0; space.dim()]);
        axpy(1.0, &kg.centers[i], entry);
        *grad.radii.entry(name.to_string()).or_insert(0.0) += kg.radii[i];
    }
    for (i, name) in term.relations().into_iter().enumerate() {
        let entry =
            grad.relations.entry(name.to_string()).or_insert_with(|| vec![0.0; space.dim()]);
        axpy(1.0, &kg.relations[i], entry);
    }
    Ok((value, grad))
}

/// `max(0, ‖ν(a) − ν(b)‖ + γ(a) − γ(b) − ε)` plus unit-norm penalties on `a`, `b`.
pub fn loss_nf1(s: &EmbeddingSpace, a: &str, b: &str, margin: f64) -> Result<f64, EmbedError> {
    loss(s, LossTerm::Nf1 { a, b }, margin)
}

/// `max(0, ‖ν(a) + ν(r) − ν(b)‖ + γ(a) − γ(b) − ε)` plus unit-norm penalties on `a`, `b`.
pub fn loss_nf2(
    s: &EmbeddingSpace,
    a: &str,
    r: &str,
    b: &str,
    margin: f64,
) -> Result<f64, EmbedError> {
    loss(s, LossTerm::Nf2 { a, r, b }, margin)
}

/// `max(0, ‖ν(a) − ν(r) − ν(b)‖ − γ(a) − γ(b) − ε)` plus unit-norm penalties on `a`, `b`.
pub fn loss_nf3(
    s: &EmbeddingSpace,
    r: &str,
    a: &str,
    b: &str,
    margin: f64,
) -> Result<f64, EmbedError> {
    loss(s, LossTerm::Nf3 { r, a, b }, margin)
}

/// Balls `a` and `b` must overlap and both centers must lie within `c`'s ball
/// (up to the margin). Unit-norm penalties on all three.
pub fn loss_nf4(
    s: &EmbeddingSpace,
    a: &str,
    b: &str,
    c: &str,
    margin: f64,
) -> Result<f64, EmbedError> {
    loss(s, LossTerm::Nf4 { a, b, c }, margin)
}

/// `max(0, γ(a) + γ(b) − ‖ν(a) − ν(b)‖ + ε)` plus unit-norm penalties.
pub fn loss_disjoint(s: &EmbeddingSpace, a: &str, b: &str, margin: f64) -> Result<f64, EmbedError> {
    loss(s, LossTerm::Disjoint { a, b }, margin)
}

/// `‖ν(r) − ν(t)‖`.
pub fn loss_role(s: &EmbeddingSpace, r: &str, t: &str) -> Result<f64, EmbedError> {
    loss(s, LossTerm::Role { r, s: t }, 0.0)
}

/// `max(0, γ(a) + γ(b′) + ε − ‖ν(a) + ν(r) − ν(b′)‖)` plus unit-norm penalties.
pub fn loss_nf2_negative(
    s: &EmbeddingSpace,
    a: &str,
    r: &str,
    b_corrupt: &str,
    margin: f64,
) -> Result<f64, EmbedError> {
    loss(s, LossTerm::Nf2Negative { a, r, b: b_corrupt }, margin)
}
