//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use ontozsl::el_embed::{
    export_space, import_space, loss, loss_gradient, loss_nf1, Ball, EmbeddingSpace, Gradient, LossTerm,
};
use ontozsl::normalizer::{classify, normalize, NormalAxiom, NormalizedOntology, BOTTOM, FRESH_PREFIX, TOP};
use ontozsl::ontology::{
    parse_ontology, serialize_ontology, validate, AnnotationKind, Axiom, ConceptExpr, Ontology, RESERVED_NAMES,
};
use ontozsl::zsl::{distance, predict, sae_gradient, sae_loss, Component, Distance, EncodingTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// Exact minimizer of `‖X − WᵀZ‖² + λ‖WX − Z‖²` by solving the vectorized
/// stationarity condition `(I ⊗ ZZᵀ + λ XXᵀ ⊗ I) vec W = (1+λ) vec ZXᵀ`.
pub fn sae_exact(x: &DMatrix<f64>, z: &DMatrix<f64>, lambda: f64) -> DMatrix<f64> {
    let (p, m) = (x.nrows(), z.nrows());
    let a = z * z.transpose();
    let b = lambda * x * x.transpose();
    let c = (1.0 + lambda) * z * x.transpose();
    let lhs = DMatrix::<f64>::identity(p, p).kronecker(&a) + b.transpose().kronecker(&DMatrix::identity(m, m));
    let rhs = DMatrix::from_column_slice(m * p, 1, c.as_slice());
    let v = lhs.lu().solve(&rhs).expect("stationarity system is singular");
    DMatrix::from_column_slice(m, p, v.as_slice())
}

/// Elementwise evaluation of the SAE loss with explicit loops.
pub fn sae_loss_loops(w: &DMatrix<f64>, x: &DMatrix<f64>, z: &DMatrix<f64>, lambda: f64) -> f64 {
    let (m, p, n) = (w.nrows(), w.ncols(), x.ncols());
    let mut dec = 0.0;
    for j in 0..p {
        for s in 0..n {
            let mut recon = 0.0;
            for i in 0..m {
                recon += w[(i, j)] * z[(i, s)];
            }
            dec += (x[(j, s)] - recon).powi(2);
        }
    }
    let mut enc = 0.0;
    for i in 0..m {
        for s in 0..n {
            let mut g = 0.0;
            for j in 0..p {
                g += w[(i, j)] * x[(j, s)];
            }
            enc += (g - z[(i, s)]).powi(2);
        }
    }
    dec + lambda * enc
}

/// Central finite difference of `f` at `x` along coordinate `i`.
pub fn central_difference(f: &dyn Fn(&[f64]) -> f64, x: &[f64], i: usize, h: f64) -> f64 {
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    plus[i] += h;
    minus[i] -= h;
    (f(&plus) - f(&minus)) / (2.0 * h)
}

/// Relative error used by the gradient checks; absolute near zero.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1.0)
}

/// Linear scan: smallest distance, first label in sorted order on ties.
pub fn brute_force_argmin(dists: &[(String, f64)]) -> String {
    let mut sorted = dists.to_vec();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let min = sorted.iter().map(|(_, d)| *d).fold(f64::INFINITY, f64::min);
    sorted.into_iter().find(|(_, d)| *d == min).unwrap().0
}

// ---------------------------------------------------------------------------
// ontology fuzzers


/// Random identifiers, distinct and clear of the reserved words.
pub fn identifiers(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    const FIRST: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz_";
    const REST: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz_0123456789";
    let mut out: Vec<String> = Vec::new();
    while out.len() < n {
        let len = rng.random_range(0..8);
        let mut s = String::new();
        s.push(FIRST[rng.random_range(0..FIRST.len())] as char);
        for _ in 0..len {
            s.push(REST[rng.random_range(0..REST.len())] as char);
        }
        if !RESERVED_NAMES.contains(&s.as_str()) && !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

fn pick<'a>(rng: &mut ChaCha8Rng, names: &'a [String]) -> &'a str {
    &names[rng.random_range(0..names.len())]
}

/// Random expression of depth at most `depth` over the given names.
pub fn random_expr(
    rng: &mut ChaCha8Rng,
    depth: usize,
    concepts: &[String],
    relations: &[String],
    individuals: &[String],
    extremes: bool,
) -> ConceptExpr {
    let roll = rng.random_range(0..100);
    if depth > 0 && roll < 45 {
        let mut child = || random_expr(rng, depth - 1, concepts, relations, individuals, extremes);
        return if roll < 22 {
            let (l, r) = (child(), child());
            ConceptExpr::and(l, r)
        } else {
            let f = child();
            ConceptExpr::exists(pick(rng, relations), f)
        };
    }
    match rng.random_range(0..100) {
        0..=3 if extremes => ConceptExpr::Top,
        4..=6 if extremes => ConceptExpr::Bottom,
        7..=14 if !individuals.is_empty() => ConceptExpr::nominal(pick(rng, individuals)),
        _ => ConceptExpr::atomic(pick(rng, concepts)),
    }
}

fn random_text(rng: &mut ChaCha8Rng) -> String {
    const ALPHABET: &[char] = &['a', 'B', 'z', ' ', '"', '\\', '\n', '\t', '\r', '#', '(', ')', 'é', '日', '-', '>', '0'];
    let len = rng.random_range(1..12);
    (0..len).map(|_| ALPHABET[rng.random_range(0..ALPHABET.len())]).collect()
}

/// Structurally arbitrary valid ontology: every axiom kind, nested
/// expressions, annotations with characters that need escaping.
pub fn random_ontology(rng: &mut ChaCha8Rng) -> Ontology {
    let (nc, nr, ni) = (rng.random_range(1..7), rng.random_range(1..4), rng.random_range(0..3));
    let names = identifiers(rng, nc + nr + ni);
    let concepts = names[..nc].to_vec();
    let relations = names[nc..nc + nr].to_vec();
    let individuals = names[nc + nr..].to_vec();
    let mut o = Ontology::new();
    for c in &concepts {
        o.concept(c.as_str());
    }
    for r in &relations {
        o.relation(r.as_str());
    }
    for i in &individuals {
        o.individual(i.as_str());
    }
    for _ in 0..rng.random_range(0..10) {
        let expr = |rng: &mut ChaCha8Rng| random_expr(rng, 4, &concepts, &relations, &individuals, true);
        let axiom = match rng.random_range(0..8) {
            0 => Axiom::subclass(expr(rng), expr(rng)),
            1 => Axiom::equivalent(expr(rng), expr(rng)),
            2 => Axiom::SubRelationOf { sub: pick(rng, &relations).into(), sup: pick(rng, &relations).into() },
            3 => Axiom::RelationChain {
                chain: (0..rng.random_range(1..4)).map(|_| pick(rng, &relations).to_string()).collect(),
                sup: pick(rng, &relations).into(),
            },
            4 if !individuals.is_empty() => {
                Axiom::Instance { individual: pick(rng, &individuals).into(), concept: expr(rng) }
            }
            5 if !individuals.is_empty() => Axiom::RelationInstance {
                relation: pick(rng, &relations).into(),
                subject: pick(rng, &individuals).into(),
                object: pick(rng, &individuals).into(),
            },
            _ => Axiom::Annotation {
                entity: pick(rng, &names).into(),
                kind: if rng.random_bool(0.5) { AnnotationKind::Label } else { AnnotationKind::Comment },
                text: random_text(rng),
            },
        };
        o.axiom(axiom);
    }
    o
}

/// Terminology for the normalizer suites: at most 8 concept names, expression
/// depth at most 3. `rich` adds individuals, assertions, role inclusions and
/// annotations; otherwise only concept inclusions and equivalences appear.
pub fn random_tbox(rng: &mut ChaCha8Rng, rich: bool) -> Ontology {
    let nc = rng.random_range(2..=8);
    let nr = rng.random_range(1..=3);
    let ni = if rich { rng.random_range(0..3) } else { 0 };
    let concepts: Vec<String> = (0..nc).map(|i| format!("C{i}")).collect();
    let relations: Vec<String> = (0..nr).map(|i| format!("r{i}")).collect();
    let individuals: Vec<String> = (0..ni).map(|i| format!("a{i}")).collect();
    let mut o = Ontology::new();
    for c in &concepts {
        o.concept(c.as_str());
    }
    for r in &relations {
        o.relation(r.as_str());
    }
    for i in &individuals {
        o.individual(i.as_str());
    }
    for _ in 0..rng.random_range(1..=8) {
        let expr = |rng: &mut ChaCha8Rng| random_expr(rng, 3, &concepts, &relations, &individuals, true);
        let axiom = match rng.random_range(0..10) {
            0..=5 => Axiom::subclass(expr(rng), expr(rng)),
            6..=7 => Axiom::equivalent(expr(rng), expr(rng)),
            8 if rich => Axiom::SubRelationOf { sub: pick(rng, &relations).into(), sup: pick(rng, &relations).into() },
            9 if rich && !individuals.is_empty() => {
                if rng.random_bool(0.5) {
                    Axiom::Instance { individual: pick(rng, &individuals).into(), concept: expr(rng) }
                } else {
                    Axiom::RelationInstance {
                        relation: pick(rng, &relations).into(),
                        subject: pick(rng, &individuals).into(),
                        object: pick(rng, &individuals).into(),
                    }
                }
            }
            _ => Axiom::subclass(expr(rng), expr(rng)),
        };
        o.axiom(axiom);
    }
    if rich {
        o.axiom(Axiom::Annotation { entity: "C0".into(), kind: AnnotationKind::Label, text: "first".into() });
    }
    o
}

/// Complex subexpressions over all axioms, counted with multiplicity.
pub fn complex_subexpressions(o: &Ontology) -> usize {
    o.axioms
        .iter()
        .map(|a| match a {
            Axiom::SubClassOf { sub, sup } => sub.complex_count() + sup.complex_count(),
            Axiom::EquivalentTo { left, right } => left.complex_count() + right.complex_count(),
            Axiom::Instance { concept, .. } => concept.complex_count(),
            _ => 0,
        })
        .sum()
}

/// Hand flattening: every complex subexpression gets its own name `F_k`
/// defined by an equivalence whose sides are one constructor over names, and
/// the definitions are written out directly as normal axioms. Only concept
/// inclusions and equivalences are supported.
pub fn flatten_manually(o: &Ontology) -> NormalizedOntology {
    struct Flat {
        axioms: Vec<NormalAxiom>,
        fresh: Vec<String>,
    }
    fn name(e: &ConceptExpr, f: &mut Flat) -> String {
        match e {
            ConceptExpr::Top => "Top".into(),
            ConceptExpr::Bottom => "Bottom".into(),
            ConceptExpr::Atomic(n) => n.clone(),
            ConceptExpr::Nominal(_) => panic!("nominals are not flattened by hand"),
            ConceptExpr::Conjunction(l, r) => {
                let (a, b) = (name(l, f), name(r, f));
                let n = format!("F_{}", f.fresh.len());
                f.fresh.push(n.clone());
                f.axioms.push(NormalAxiom::nf1(&n, &a));
                f.axioms.push(NormalAxiom::nf1(&n, &b));
                f.axioms.push(NormalAxiom::nf4(&a, &b, &n));
                n
            }
            ConceptExpr::Existential { relation, filler } => {
                let a = name(filler, f);
                let n = format!("F_{}", f.fresh.len());
                f.fresh.push(n.clone());
                f.axioms.push(NormalAxiom::nf2(&n, relation, &a));
                f.axioms.push(NormalAxiom::nf3(relation, &a, &n));
                n
            }
        }
    }
    fn include(x: String, y: String, f: &mut Flat) {
        if y != "Top" && x != "Bottom" {
            f.axioms.push(NormalAxiom::nf1(&x, &y));
        }
    }
    let mut f = Flat { axioms: Vec::new(), fresh: Vec::new() };
    for a in &o.axioms {
        match a {
            Axiom::SubClassOf { sub, sup } => {
                let (x, y) = (name(sub, &mut f), name(sup, &mut f));
                include(x, y, &mut f);
            }
            Axiom::EquivalentTo { left, right } => {
                let (x, y) = (name(left, &mut f), name(right, &mut f));
                include(x.clone(), y.clone(), &mut f);
                include(y, x, &mut f);
            }
            other => panic!("unsupported axiom {other:?}"),
        }
    }
    NormalizedOntology {
        axioms: f.axioms,
        concepts: o.signature.concepts.clone(),
        relations: o.signature.relations.clone(),
        nominals: Vec::new(),
        fresh: f.fresh,
        provenance: BTreeMap::new(),
        annotations: Vec::new(),
    }
}

/// Subsumers of every name in `names`, collapsed to `{Bottom}` for
/// unsatisfiable names since everything follows from those.
pub fn entailed_over(n: &NormalizedOntology, names: &[String]) -> BTreeMap<String, BTreeSet<String>> {
    let pairs = classify(n);
    let keep: BTreeSet<&str> = names.iter().map(String::as_str).collect();
    let mut out: BTreeMap<String, BTreeSet<String>> =
        names.iter().map(|a| (a.clone(), BTreeSet::from([a.clone()]))).collect();
    for (a, b) in &pairs {
        if keep.contains(a.as_str()) && (keep.contains(b.as_str()) || b == "Bottom") {
            out.get_mut(a).unwrap().insert(b.clone());
        }
    }
    for sups in out.values_mut() {
        if sups.contains("Bottom") {
            *sups = BTreeSet::from(["Bottom".to_string()]);
        }
    }
    out
}

/// Why `ax` is not a normal axiom over the allowed names, if it is not.
pub fn normal_form_violation(ax: &NormalAxiom, concepts: &BTreeSet<String>, relations: &BTreeSet<String>) -> Option<String> {
    for c in ax.concepts() {
        if !concepts.contains(c) {
            return Some(format!("{ax}: operand `{c}` is not a known name"));
        }
    }
    for r in ax.relations() {
        if !relations.contains(r) {
            return Some(format!("{ax}: relation `{r}` is not declared"));
        }
    }
    match ax {
        NormalAxiom::Nf4 { sup, .. } if sup == "Bottom" => Some(format!("{ax}: should be DISJ")),
        NormalAxiom::Disjoint { left, right } if left == "Bottom" || right == "Bottom" => {
            Some(format!("{ax}: trivial disjointness"))
        }
        NormalAxiom::Nf1 { sup, .. } if sup == "Top" => Some(format!("{ax}: trivial inclusion kept")),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// loss oracles

/// Operands of one loss evaluation: centers and radii of the concept
/// operands and the relation vectors, in the order the term names them.
#[derive(Debug, Clone)]
pub struct LossPoint {
    pub kind: usize,
    pub centers: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    pub relations: Vec<Vec<f64>>,
    pub margin: f64,
}

pub const KIND_NAMES: [&str; 7] = ["nf1", "nf2", "nf3", "nf4", "disjoint", "role", "nf2_negative"];

pub fn shape(kind: usize) -> (usize, usize) {
    match kind {
        3 => (3, 0),
        0 | 4 => (2, 0),
        5 => (0, 2),
        _ => (2, 1),
    }
}

pub fn term(kind: usize) -> LossTerm<'static> {
    match kind {
        0 => LossTerm::Nf1 { a: "A", b: "B" },
        1 => LossTerm::Nf2 { a: "A", r: "r", b: "B" },
        2 => LossTerm::Nf3 { r: "r", a: "A", b: "B" },
        3 => LossTerm::Nf4 { a: "A", b: "B", c: "C" },
        4 => LossTerm::Disjoint { a: "A", b: "B" },
        5 => LossTerm::Role { r: "r", s: "s" },
        _ => LossTerm::Nf2Negative { a: "A", r: "r", b: "B" },
    }
}

const CONCEPT_NAMES: [&str; 3] = ["A", "B", "C"];
const RELATION_NAMES: [&str; 2] = ["r", "s"];

impl LossPoint {
    pub fn random(rng: &mut ChaCha8Rng, kind: usize, dim: usize) -> Self {
        let (nc, nr) = shape(kind);
        let vec = |rng: &mut ChaCha8Rng| (0..dim).map(|_| rng.random_range(-1.2..1.2)).collect::<Vec<f64>>();
        LossPoint {
            kind,
            centers: (0..nc).map(|_| vec(rng)).collect(),
            radii: (0..nc).map(|_| rng.random_range(0.0..1.0)).collect(),
            relations: (0..nr).map(|_| vec(rng)).collect(),
            margin: rng.random_range(0.0..0.5),
        }
    }

    pub fn space(&self) -> EmbeddingSpace {
        let dim = self.centers.first().or(self.relations.first()).map_or(0, Vec::len);
        let mut s = EmbeddingSpace::new(dim);
        for (i, (c, r)) in self.centers.iter().zip(&self.radii).enumerate() {
            s.insert_concept(CONCEPT_NAMES[i], Ball::new(c.clone(), *r)).unwrap();
        }
        for (i, v) in self.relations.iter().enumerate() {
            s.insert_relation(RELATION_NAMES[i], v.clone()).unwrap();
        }
        s
    }

    /// Parameters flattened as centers, radii, relations.
    pub fn params(&self) -> Vec<f64> {
        let mut p: Vec<f64> = self.centers.concat();
        p.extend(&self.radii);
        p.extend(self.relations.concat());
        p
    }

    pub fn with_params(&self, p: &[f64]) -> Self {
        let dim = self.centers.first().or(self.relations.first()).map_or(0, Vec::len);
        let nc = self.centers.len();
        let mut q = self.clone();
        for i in 0..nc {
            q.centers[i] = p[i * dim..(i + 1) * dim].to_vec();
        }
        q.radii = p[nc * dim..nc * dim + nc].to_vec();
        let off = nc * dim + nc;
        for j in 0..self.relations.len() {
            q.relations[j] = p[off + j * dim..off + (j + 1) * dim].to_vec();
        }
        q
    }

    /// Independent scalar evaluation of the loss, together with every quantity
    /// whose sign or size decides a kink (hinge arguments, norms of vectors
    /// that pass through `‖·‖`, and `‖c‖ − 1` for penalised centers).
    pub fn oracle(&self) -> (f64, Vec<f64>) {
        fn nrm(v: &[f64]) -> f64 {
            v.iter().map(|x| x * x).sum::<f64>().sqrt()
        }
        fn comb(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| x + s * y).collect()
        }
        let (c, r, v, e) = (&self.centers, &self.radii, &self.relations, self.margin);
        let mut kinks = Vec::new();
        let mut total = 0.0;
        let hinge = |arg: f64, kinks: &mut Vec<f64>| {
            kinks.push(arg);
            arg.max(0.0)
        };
        let dist = |x: Vec<f64>, kinks: &mut Vec<f64>| {
            let d = nrm(&x);
            kinks.push(d);
            d
        };
        match self.kind {
            0 => {
                let d = dist(comb(&c[0], &c[1], -1.0), &mut kinks);
                total += hinge(d + r[0] - r[1] - e, &mut kinks);
            }
            1 => {
                let d = dist(comb(&comb(&c[0], &v[0], 1.0), &c[1], -1.0), &mut kinks);
                total += hinge(d + r[0] - r[1] - e, &mut kinks);
            }
            2 => {
                let d = dist(comb(&comb(&c[0], &v[0], -1.0), &c[1], -1.0), &mut kinks);
                total += hinge(d - r[0] - r[1] - e, &mut kinks);
            }
            3 => {
                let ab = dist(comb(&c[0], &c[1], -1.0), &mut kinks);
                let ac = dist(comb(&c[0], &c[2], -1.0), &mut kinks);
                let bc = dist(comb(&c[1], &c[2], -1.0), &mut kinks);
                total += hinge(ab - r[0] - r[1] - e, &mut kinks);
                total += hinge(ac - r[2] - e, &mut kinks);
                total += hinge(bc - r[2] - e, &mut kinks);
            }
            4 => {
                let d = dist(comb(&c[0], &c[1], -1.0), &mut kinks);
                total += hinge(r[0] + r[1] - d + e, &mut kinks);
            }
            5 => return (dist(comb(&v[0], &v[1], -1.0), &mut kinks), kinks),
            _ => {
                let d = dist(comb(&comb(&c[0], &v[0], 1.0), &c[1], -1.0), &mut kinks);
                total += hinge(r[0] + r[1] + e - d, &mut kinks);
            }
        }
        for center in c {
            let n = nrm(center);
            kinks.push(n);
            kinks.push(n - 1.0);
            total += (n - 1.0).abs();
        }
        (total, kinks)
    }

    /// Away from every kink by more than `gap`.
    pub fn smooth(&self, gap: f64) -> bool {
        self.oracle().1.iter().all(|k| k.abs() > gap)
    }
}

// ---------------------------------------------------------------------------
// checkers shared with the acceptance run

pub fn flat_gradient(p: &LossPoint, g: &Gradient) -> Vec<f64> {
    let (nc, nr) = shape(p.kind);
    let dim = p.centers.first().or(p.relations.first()).unwrap().len();
    let mut out = Vec::new();
    for name in &["A", "B", "C"][..nc] {
        out.extend(g.centers.get(*name).cloned().unwrap_or(vec![0.0; dim]));
    }
    for name in &["A", "B", "C"][..nc] {
        out.push(g.radii.get(*name).copied().unwrap_or(0.0));
    }
    for name in &["r", "s"][..nr] {
        out.extend(g.relations.get(*name).cloned().unwrap_or(vec![0.0; dim]));
    }
    out
}

/// Worst relative error between the analytic gradient and central
/// differences over `points` random smooth points of one loss kind.
pub fn worst_gradient_error(kind: usize, points: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    let mut accepted = 0;
    while accepted < points {
        let dim = r.random_range(2..6);
        let p = LossPoint::random(&mut r, kind, dim);
        if !p.smooth(1e-3) {
            continue;
        }
        accepted += 1;
        let (_, g) = loss_gradient(&p.space(), term(kind), p.margin).unwrap();
        let analytic = flat_gradient(&p, &g);
        let f = |x: &[f64]| loss(&p.with_params(x).space(), term(kind), p.margin).unwrap();
        let x = p.params();
        for (i, a) in analytic.iter().enumerate() {
            worst = worst.max(relative_error(*a, central_difference(&f, &x, i, 1e-5)));
        }
    }
    worst
}

pub fn two_balls(a: (Vec<f64>, f64), b: (Vec<f64>, f64)) -> EmbeddingSpace {
    let mut s = EmbeddingSpace::new(a.0.len());
    s.insert_concept("A", Ball::new(a.0, a.1)).unwrap();
    s.insert_concept("B", Ball::new(b.0, b.1)).unwrap();
    s
}

/// Unit vectors whose norm evaluates to exactly 1.
pub fn exact_unit(r: &mut ChaCha8Rng) -> Vec<f64> {
    const BASE: [[f64; 3]; 4] = [[1.0, 0.0, 0.0], [0.6, 0.8, 0.0], [0.0, 0.28, 0.96], [0.0, 0.0, 1.0]];
    loop {
        let mut v = BASE[r.random_range(0..4)].to_vec();
        for x in v.iter_mut() {
            if r.random_bool(0.5) {
                *x = -*x;
            }
        }
        if v.iter().map(|x| x * x).sum::<f64>().sqrt() == 1.0 {
            return v;
        }
    }
}

/// `loss_nf1 == 0` exactly when the inclusion holds within the margin and both
/// centers have unit norm.
pub fn zero_set_holds(seed: u64) -> bool {
    let mut r = rng(seed);
    let unit = r.random_bool(0.7);
    let center = |r: &mut ChaCha8Rng| {
        if unit { exact_unit(r) } else { (0..3).map(|_| r.random_range(-1.5..1.5)).collect() }
    };
    let (ca, cb) = (center(&mut r), center(&mut r));
    let (ra, rb, eps) = (r.random_range(0.0..1.0), r.random_range(0.0..2.5), r.random_range(0.0..0.5));
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let dist = norm(&ca.iter().zip(&cb).map(|(x, y)| x - y).collect::<Vec<_>>());
    let expected = dist + ra - rb <= eps && norm(&ca) == 1.0 && norm(&cb) == 1.0;
    let value = loss_nf1(&two_balls((ca, ra), (cb, rb)), "A", "B", eps).unwrap();
    (value == 0.0) == expected
}

pub fn random_space(r: &mut ChaCha8Rng) -> EmbeddingSpace {
    let dim = r.random_range(1..6);
    let mut s = EmbeddingSpace::new(dim);
    let count = r.random_range(0..8);
    let names = identifiers(r, count);
    for (i, n) in names.iter().enumerate() {
        let mut v = || -> Vec<f64> {
            (0..dim)
                .map(|_| match r.random_range(0..6) {
                    0 => 0.0,
                    1 => -0.0,
                    2 => f64::MIN_POSITIVE * r.random_range(1.0..2.0),
                    3 => r.random_range(-1e300..1e300),
                    _ => r.random_range(-1.0..1.0),
                })
                .collect()
        };
        if i % 3 == 2 {
            let x = v();
            s.insert_relation(n, x).unwrap();
        } else {
            let (c, rad) = (v(), r.random_range(0.0..2.0));
            s.insert_concept(n, Ball::new(c, rad)).unwrap();
        }
    }
    s
}

/// `import(export(s))` reproduces `s` bit for bit.
pub fn export_round_trips(seed: u64) -> bool {
    let s = random_space(&mut rng(seed));
    let back = import_space(&export_space(&s)).unwrap();
    let bits = |s: &EmbeddingSpace| -> Vec<u64> {
        s.concepts()
            .flat_map(|(_, b)| b.center.iter().chain([&b.radius]).map(|x| x.to_bits()).collect::<Vec<_>>())
            .chain(s.relations().flat_map(|(_, v)| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>()))
            .collect()
    };
    back == s && bits(&back) == bits(&s)
}

/// Worst relative error of the SAE gradient against central differences over
/// `points` random problems, checking every entry of `W`.
pub fn worst_sae_gradient_error(points: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..points {
        let (m, p, n) = (r.random_range(1..5), r.random_range(1..5), r.random_range(1..8));
        let lambda = r.random_range(0.1..2.0);
        let (w, x, z) = (random_matrix(&mut r, m, p), random_matrix(&mut r, p, n), random_matrix(&mut r, m, n));
        let g = sae_gradient(&w, &x, &z, lambda);
        let f = |v: &[f64]| sae_loss(&DMatrix::from_column_slice(m, p, v), &x, &z, lambda);
        for i in 0..m * p {
            worst = worst.max(relative_error(g.as_slice()[i], central_difference(&f, w.as_slice(), i, 1e-5)));
        }
    }
    worst
}

/// `parse(serialize(o)) == o` for one fuzzed ontology.
pub fn elf_round_trips(seed: u64) -> Result<(), String> {
    let o = random_ontology(&mut rng(seed));
    if !validate(&o).is_empty() {
        return Err(format!("fuzzer produced an invalid ontology (seed {seed})"));
    }
    let text = serialize_ontology(&o);
    match parse_ontology(&text) {
        Ok(back) if back == o => Ok(()),
        Ok(_) => Err(format!("seed {seed}: structure changed\n{text}")),
        Err(e) => Err(format!("seed {seed}: {e}\n{text}")),
    }
}

/// Normal-form shape and the fresh-name bound on one fuzzed ontology with
/// individuals, assertions and role inclusions.
pub fn normalizer_shape_holds(seed: u64) -> Result<(), String> {
    let o = random_tbox(&mut rng(seed), true);
    let n = normalize(&o).map_err(|e| format!("seed {seed}: {e}"))?;
    let mut concepts: BTreeSet<String> = n.concepts.iter().chain(&n.fresh).cloned().collect();
    concepts.extend(n.nominals.iter().map(|(_, c)| c.clone()));
    concepts.insert(TOP.into());
    concepts.insert(BOTTOM.into());
    let relations: BTreeSet<String> = n.relations.iter().cloned().collect();
    for ax in &n.axioms {
        if let Some(v) = normal_form_violation(ax, &concepts, &relations) {
            return Err(format!("seed {seed}: {v}"));
        }
    }
    if let Some(f) = n.fresh.iter().find(|f| !f.starts_with(FRESH_PREFIX) || o.signature.contains(f)) {
        return Err(format!("seed {seed}: bad fresh name {f}"));
    }
    let bound = complex_subexpressions(&o);
    if n.fresh.len() > bound {
        return Err(format!("seed {seed}: {} fresh names, bound {bound}", n.fresh.len()));
    }
    Ok(())
}

/// Tool normalization and hand flattening entail the same subsumptions
/// between the original concept names.
pub fn flattening_agrees(seed: u64) -> Result<(), String> {
    let o = random_tbox(&mut rng(seed), false);
    let names = &o.signature.concepts;
    let tool = entailed_over(&normalize(&o).map_err(|e| e.to_string())?, names);
    let hand = entailed_over(&flatten_manually(&o), names);
    if tool == hand {
        Ok(())
    } else {
        Err(format!("seed {seed}: {tool:?} vs {hand:?}\n{}", serialize_ontology(&o)))
    }
}

/// One random prediction instance on a coarse grid, so that exact ties are
/// frequent. Returns whether `predict` matched the linear scan and whether the
/// instance contained a tie for the minimum.
pub fn prediction_agrees(seed: u64) -> (bool, bool) {
    let mut r = rng(seed);
    let (k, dim) = (r.random_range(1..=6), r.random_range(1..=3));
    let grid = |r: &mut ChaCha8Rng| (0..dim).map(|_| r.random_range(-2i32..=2) as f64 * 0.5).collect::<Vec<f64>>();
    let mut encodings = BTreeMap::new();
    while encodings.len() < k {
        let label = format!("c{}", r.random_range(0..20));
        let e = grid(&mut r);
        encodings.insert(label, e);
    }
    let gx = grid(&mut r);
    // candidates: a random non-empty subset, listed in random order
    let mut candidates: Vec<String> = encodings.keys().filter(|_| r.random_bool(0.7)).cloned().collect();
    if candidates.is_empty() {
        candidates.push(encodings.keys().next().unwrap().clone());
    }
    for i in (1..candidates.len()).rev() {
        candidates.swap(i, r.random_range(0..=i));
    }
    let table = EncodingTable { components: vec![Component::Attribute], dims: vec![dim], encodings };
    let dists: Vec<(String, f64)> = candidates
        .iter()
        .map(|c| {
            let e = &table.encodings[c];
            (c.clone(), e.iter().zip(&gx).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
        })
        .collect();
    let min = dists.iter().map(|(_, d)| *d).fold(f64::INFINITY, f64::min);
    let tie = dists.iter().filter(|(_, d)| *d == min).count() > 1;
    let got = predict(&gx, &table, &candidates, Distance::L2).ok();
    let lib_dists_ok = candidates
        .iter()
        .all(|c| distance(&table.encodings[c], &gx, Distance::L2).ok() == dists.iter().find(|(l, _)| l == c).map(|(_, d)| *d));
    (got.as_deref() == Some(brute_force_argmin(&dists).as_str()) && lib_dists_ok, tie)
}
