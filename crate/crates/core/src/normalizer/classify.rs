use std::collections::{BTreeSet, HashMap, HashSet};

use super::{NormalAxiom, NormalizedOntology, BOTTOM, TOP};

/// Saturates the completion rules and returns every derived atomic subsumption
/// `(sub, sup)`.
///
/// Trivial pairs are left out: nothing is reported with `Top` as superclass,
/// and `Top`/`Bottom` are not reported as subclasses. Nominal concepts are
/// treated as ordinary atomic concepts.
pub fn classify(n: &NormalizedOntology) -> BTreeSet<(String, String)> {
    let mut names: Vec<&str> = n.all_concepts();
    for ax in &n.axioms {
        names.extend(ax.concepts());
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut ordered = Vec::new();
    for name in names {
        if !index.contains_key(name) {
            index.insert(name, ordered.len());
            ordered.push(name);
        }
    }
    let top = index[TOP];
    let bottom = index[BOTTOM];
    let id = |s: &str| index[s];

    let mut roles: Vec<&str> = n.relations.iter().map(String::as_str).collect();
    for ax in &n.axioms {
        for r in ax.relations() {
            if !roles.contains(&r) {
                roles.push(r);
            }
        }
    }
    let role_id: HashMap<&str, usize> = roles.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    let role_supers = role_closure(n, &role_id);

    // indexes over the axioms by their trigger operand
    let mut nf1: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut nf2: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    let mut nf3: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let mut nf4: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for ax in &n.axioms {
        match ax {
            NormalAxiom::Nf1 { sub, sup } => nf1.entry(id(sub)).or_default().push(id(sup)),
            NormalAxiom::Nf2 { sub, relation, filler } => {
                nf2.entry(id(sub)).or_default().push((role_id[relation.as_str()], id(filler)))
            }
            NormalAxiom::Nf3 { relation, filler, sup } => nf3
                .entry((role_id[relation.as_str()], id(filler)))
                .or_default()
                .push(id(sup)),
            NormalAxiom::Nf4 { left, right, sup } => {
                nf4.entry(id(left)).or_default().push((id(right), id(sup)));
                nf4.entry(id(right)).or_default().push((id(left), id(sup)));
            }
            NormalAxiom::Disjoint { left, right } => {
                nf4.entry(id(left)).or_default().push((id(right), bottom));
                nf4.entry(id(right)).or_default().push((id(left), bottom));
            }
            NormalAxiom::RoleSub { .. } => {}
        }
    }

    let count = ordered.len();
    let mut subsumers: Vec<HashSet<usize>> =
        (0..count).map(|a| HashSet::from([a, top])).collect();
    let mut edges: HashSet<(usize, usize, usize)> = HashSet::new();

    loop {
        let mut changed = false;
        for a in 0..count {
            let mut current: Vec<usize> = subsumers[a].iter().copied().collect();
            current.sort_unstable();
            for b in current {
                for &c in nf1.get(&b).into_iter().flatten() {
                    changed |= subsumers[a].insert(c);
                }
                for &(other, c) in nf4.get(&b).into_iter().flatten() {
                    if subsumers[a].contains(&other) {
                        changed |= subsumers[a].insert(c);
                    }
                }
                for &(r, c) in nf2.get(&b).into_iter().flatten() {
                    for &s in &role_supers[r] {
                        changed |= edges.insert((a, s, c));
                    }
                }
            }
        }
        let mut edge_list: Vec<_> = edges.iter().copied().collect();
        edge_list.sort_unstable();
        for (a, r, b) in edge_list {
            let mut targets: Vec<usize> = subsumers[b].iter().copied().collect();
            targets.sort_unstable();
            for c in targets {
                for &d in nf3.get(&(r, c)).into_iter().flatten() {
                    changed |= subsumers[a].insert(d);
                }
            }
            if subsumers[b].contains(&bottom) {
                changed |= subsumers[a].insert(bottom);
            }
        }
        if !changed {
            break;
        }
    }

    let mut out = BTreeSet::new();
    for (a, sups) in subsumers.iter().enumerate() {
        if a == top || a == bottom {
            continue;
        }
        for &b in sups {
            if b != top {
                out.insert((ordered[a].to_string(), ordered[b].to_string()));
            }
        }
    }
    out
}

/// Reflexive-transitive closure of the relation hierarchy: `supers[r]` lists every `s` with `r ⊑* s`.
fn role_closure(n: &NormalizedOntology, role_id: &HashMap<&str, usize>) -> Vec<Vec<usize>> {
    let count = role_id.len();
    let mut direct: Vec<Vec<usize>> = vec![Vec::new(); count];
    for ax in &n.axioms {
        if let NormalAxiom::RoleSub { sub, sup } = ax {
            direct[role_id[sub.as_str()]].push(role_id[sup.as_str()]);
        }
    }
    (0..count)
        .map(|r| {
            let mut seen = vec![false; count];
            let mut stack = vec![r];
            seen[r] = true;
            while let Some(x) = stack.pop() {
                for &y in &direct[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            (0..count).filter(|&s| seen[s]).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn onto(concepts: &[&str], relations: &[&str], axioms: Vec<NormalAxiom>) -> NormalizedOntology {
        NormalizedOntology {
            axioms,
            concepts: concepts.iter().map(|s| s.to_string()).collect(),
            relations: relations.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    fn pair(a: &str, b: &str) -> (String, String) {
        (a.to_string(), b.to_string())
    }

    #[test]
    fn reflexive_only_when_empty() {
        let out = classify(&onto(&["A"], &[], vec![]));
        assert_eq!(out, BTreeSet::from([pair("A", "A")]));
    }

    #[test]
    fn transitivity() {
        let out = classify(&onto(
            &["A", "B", "C"],
            &[],
            vec![NormalAxiom::nf1("A", "B"), NormalAxiom::nf1("B", "C")],
        ));
        assert!(out.contains(&pair("A", "C")));
        assert!(!out.contains(&pair("C", "A")));
    }

    #[test]
    fn existential_rule() {
        let out = classify(&onto(
            &["A", "B", "C"],
            &["r"],
            vec![NormalAxiom::nf2("A", "r", "B"), NormalAxiom::nf3("r", "B", "C")],
        ));
        assert!(out.contains(&pair("A", "C")));
    }

    #[test]
    fn conjunction_rule() {
        let out = classify(&onto(
            &["A", "B", "C", "D"],
            &[],
            vec![
                NormalAxiom::nf1("A", "B"),
                NormalAxiom::nf1("A", "C"),
                NormalAxiom::nf4("B", "C", "D"),
            ],
        ));
        assert!(out.contains(&pair("A", "D")));
        assert!(!out.contains(&pair("B", "D")));
    }

    #[test]
    fn role_hierarchy_and_bottom_propagation() {
        let out = classify(&onto(
            &["A", "B", "C", "X", "Y"],
            &["r", "s"],
            vec![
                NormalAxiom::nf2("A", "r", "B"),
                NormalAxiom::role_sub("r", "s"),
                NormalAxiom::nf3("s", "B", "C"),
                NormalAxiom::nf1("X", "B"),
                NormalAxiom::nf1("X", "C"),
                NormalAxiom::disjoint("B", "C"),
                NormalAxiom::nf2("Y", "r", "X"),
            ],
        ));
        assert!(out.contains(&pair("A", "C")));
        assert!(out.contains(&pair("X", BOTTOM)));
        assert!(out.contains(&pair("Y", BOTTOM)));
        assert!(!out.contains(&pair("A", BOTTOM)));
    }

    #[test]
    fn top_axioms_apply_everywhere() {
        let out = classify(&onto(&["A", "B"], &[], vec![NormalAxiom::nf1("Top", "B")]));
        assert!(out.contains(&pair("A", "B")));
    }
}
