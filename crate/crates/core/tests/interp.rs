mod common;

use std::collections::{BTreeMap, BTreeSet};

use profnet::creed::Creed;
use profnet::grpd::homomorphisms;
use profnet::interp::{
    act_experiment, direct_interp, direct_structured, experiment_objects, experiments, experiments_structured,
    interp_formula, interp_formula_creed, interp_functor, interp_sequent, leaf_permutation, Assignment,
    CreedAssignment, FunctorAssignment, Layout, DEFAULT_EXPLICIT_BOUND, DEFAULT_ORBIT_BOUND,
};
use profnet::mll::{figure_correct, figure_incorrect, parse_formula, random_proof, desequentialize, random_structure, Formula, ProofStructure};
use profnet::prof::Profunctor;
use profnet::{Groupoid, GroupoidFunctor, Mor};

fn assign(pairs: &[(&str, &Groupoid)]) -> Assignment {
    pairs.iter().map(|(k, g)| (k.to_string(), (*g).clone())).collect()
}

fn z2xz3() -> Groupoid {
    Groupoid::cyclic(2).product(&Groupoid::cyclic(3))
}

/// `Exp(π)` straight from its definition: every labelling of every link by any
/// morphism, acted on by relabelling.
fn experiments_by_definition(p: &ProofStructure, sigma: &Assignment) -> Profunctor {
    let layout = Layout::new(p.sequent(), sigma).unwrap();
    let pairs = p.link_pairs();
    let sizes: Vec<usize> = pairs.iter().map(|&(pos, _)| sigma[&p.occurrences()[pos].var].num_morphisms()).collect();
    let total: usize = sizes.iter().product();
    let decode = |mut x: usize| -> Vec<Mor> {
        let mut out = vec![0; sizes.len()];
        for k in (0..sizes.len()).rev() {
            out[k] = x % sizes[k];
            x /= sizes[k];
        }
        out
    };
    let encode = |labels: &[Mor]| labels.iter().zip(&sizes).fold(0, |acc, (&l, &s)| acc * s + l);
    let objs: Vec<usize> = (0..total)
        .map(|x| layout.encode_obj(&experiment_objects(p, sigma, &decode(x)).unwrap()))
        .collect();
    Profunctor::from_action(&Groupoid::trivial(), layout.groupoid(), &objs, |x, m| {
        encode(&act_experiment(p, sigma, &decode(x), &layout.decode_mor(m)).unwrap())
    })
}

#[test]
fn figure_formula_groupoid() {
    let a1 = Groupoid::cyclic(2);
    let a2 = Groupoid::symmetric(3);
    let sigma = assign(&[("X1", &a1), ("X2", &a2)]);
    let f = parse_formula("((X1|X2)*X2^)|((X2|X2^)|X1^)").unwrap();
    let expected = a1
        .product(&a2)
        .product(&a2.opposite())
        .product(&a2.product(&a2.opposite()).product(&a1.opposite()));
    assert_eq!(interp_formula(&f, &sigma).unwrap(), expected);
    assert_eq!(interp_formula(&Formula::var("X2"), &sigma).unwrap(), a2);
    assert_eq!(interp_formula(&Formula::neg("X2"), &sigma).unwrap(), a2.opposite());
    assert!(interp_formula(&Formula::var("X3"), &sigma).is_err());
    let seq = figure_correct().sequent().to_vec();
    assert_eq!(interp_sequent(&seq, &sigma).unwrap(), expected);
}

#[test]
fn layout_round_trips() {
    let sigma = assign(&[("X1", &Groupoid::connected(&Groupoid::cyclic(2), 2).unwrap()), ("X2", &Groupoid::cyclic(3))]);
    let p = figure_correct();
    let layout = Layout::new(p.sequent(), &sigma).unwrap();
    let g = layout.groupoid().clone();
    for m in (0..g.num_morphisms()).step_by(7) {
        let parts = layout.decode_mor(m);
        assert_eq!(layout.encode_mor(&parts), m);
        let srcs: Vec<usize> = parts.iter().zip(layout.leaves()).map(|(&x, l)| l.src(x)).collect();
        assert_eq!(layout.encode_obj(&srcs), g.src(m));
    }
}

/// Explicit closure of a family under powers, then the stable dual twice.
fn dual_by_definition(g: &Groupoid, set: &BTreeSet<Mor>) -> BTreeSet<Mor> {
    g.end(0)
        .into_iter()
        .filter(|&a| (1..g.order(a)).all(|k| !set.contains(&g.power(a, k))))
        .collect()
}

#[test]
fn formula_creeds_match_enumeration() {
    let g = z2xz3();
    let a_plus = g.pair_mor(1, 0);
    let a_minus = g.pair_mor(0, 1);
    let left = Creed::closure_of(&g, &[(0, vec![a_plus])]).unwrap();
    let sigma: CreedAssignment = [("X1".to_string(), left.clone()), ("X2".to_string(), left.clone())].into();
    let var = interp_formula_creed(&Formula::var("X1"), &sigma, 10_000).unwrap();
    assert_eq!(var, left);

    let xy = interp_formula_creed(&parse_formula("X1*X2").unwrap(), &sigma, 10_000).unwrap();
    let prod = g.product(&g);
    let pr = &prod;
    let in_left: BTreeSet<Mor> = left.at(0).into_iter().collect();
    let raw: BTreeSet<Mor> = in_left.iter().flat_map(|&x| in_left.iter().map(move |&y| pr.pair_mor(x, y))).collect();
    let expected = dual_by_definition(&prod, &dual_by_definition(&prod, &raw));
    assert_eq!(xy.at(0).into_iter().collect::<BTreeSet<_>>(), expected);
    assert!(xy.contains(0, prod.pair_mor(a_plus, a_plus)));
    assert!(!xy.contains(0, prod.pair_mor(a_minus, 0)));

    let par = interp_formula_creed(&parse_formula("X1|X2").unwrap(), &sigma, 10_000).unwrap();
    let dual_left = dual_by_definition(&g, &in_left);
    let raw: BTreeSet<Mor> = dual_left.iter().flat_map(|&x| dual_left.iter().map(move |&y| pr.pair_mor(x, y))).collect();
    assert_eq!(par.at(0).into_iter().collect::<BTreeSet<_>>(), dual_by_definition(&prod, &raw));
    // (α₊₊, β) lies in the par creed when β is in the right creed, but not for every β.
    for &beta in &in_left {
        assert!(par.contains(0, prod.pair_mor(a_plus, beta)));
    }
    assert!(!par.contains(0, prod.pair_mor(a_plus, a_minus)));
    assert!(matches!(
        interp_formula_creed(&parse_formula("X1*X2*X1").unwrap(), &sigma, 100),
        Err(profnet::Error::Resource(_))
    ));
}

#[test]
fn negated_variable_creed_is_the_dual_on_the_opposite() {
    let g = z2xz3();
    let left = Creed::closure_of(&g, &[(0, vec![g.pair_mor(1, 0)])]).unwrap();
    let sigma: CreedAssignment = [("X1".to_string(), left.clone())].into();
    let neg = interp_formula_creed(&Formula::neg("X1"), &sigma, 100).unwrap();
    assert_eq!(neg.groupoid(), &g.opposite());
    assert_eq!(neg.at(0), left.dual().at(0));
}

#[test]
fn functor_interpretation() {
    let z2 = Groupoid::cyclic(2);
    let z4 = Groupoid::cyclic(4);
    let s3 = Groupoid::symmetric(3);
    let f = parse_formula("(X1*X2^)|X1^").unwrap();
    let ids: FunctorAssignment = [
        ("X1".to_string(), GroupoidFunctor::identity(&z2)),
        ("X2".to_string(), GroupoidFunctor::identity(&s3)),
    ]
    .into();
    let id = interp_functor(&f, &ids).unwrap();
    assert!((0..id.source.num_morphisms()).all(|m| id.mor(m) == m));
    assert_eq!(interp_functor(&Formula::var("X1"), &ids).unwrap(), ids["X1"]);

    // (Φ;Ψ) interpreted equals the composite of the interpretations.
    let to_z4 = homomorphisms(&z2, &z4).unwrap();
    let back = homomorphisms(&z4, &z2).unwrap();
    let s3_to_z2 = homomorphisms(&s3, &z2).unwrap();
    let z2_to_s3 = homomorphisms(&z2, &s3).unwrap();
    for phi_x in &to_z4 {
        for psi_x in &back {
            for phi_y in s3_to_z2.iter().take(2) {
                for psi_y in z2_to_s3.iter().take(3) {
                    let phi: FunctorAssignment = [("X1".to_string(), phi_x.clone()), ("X2".to_string(), phi_y.clone())].into();
                    let psi: FunctorAssignment = [("X1".to_string(), psi_x.clone()), ("X2".to_string(), psi_y.clone())].into();
                    let both: FunctorAssignment = [
                        ("X1".to_string(), phi_x.then(psi_x).unwrap()),
                        ("X2".to_string(), phi_y.then(psi_y).unwrap()),
                    ]
                    .into();
                    let composed = interp_functor(&f, &phi).unwrap().then(&interp_functor(&f, &psi).unwrap()).unwrap();
                    let direct = interp_functor(&f, &both).unwrap();
                    assert_eq!(composed.mor_map, direct.mor_map);
                    direct.validate().unwrap();
                }
            }
        }
    }
}

#[test]
fn single_link_experiments_are_the_unit() {
    let g = Groupoid::connected(&Groupoid::cyclic(2), 2).unwrap();
    let p = ProofStructure::new(vec![Formula::var("X"), Formula::neg("X")], &[(0, 1)]).unwrap();
    let sigma = assign(&[("X", &g)]);
    let exp = experiments(&p, &sigma, DEFAULT_EXPLICIT_BOUND).unwrap();
    // Leaf order is (X, X⊥) while η lives on 𝔸ᵒᵖ × 𝔸; compare fiber sizes.
    let eta = Profunctor::unit_eta(&g);
    let layout = Layout::new(p.sequent(), &sigma).unwrap();
    for a in 0..2 {
        for a2 in 0..2 {
            let here = exp.fiber(0, layout.encode_obj(&[a, a2])).len();
            let there = eta.fiber(0, eta.dst().pair_obj(a2, a)).len();
            assert_eq!(here, there);
            assert_eq!(here, g.hom(a2, a).len());
        }
    }
    assert!(direct_interp(&p, &sigma, DEFAULT_EXPLICIT_BOUND).unwrap().is_isomorphic(&exp).is_some());
}

/// Groupoid with objects named `{prefix}1`, `{prefix}2` and a unique arrow between
/// any two of them, extended by a group of automorphisms.
fn two_object(group: &Groupoid) -> Groupoid {
    Groupoid::connected(group, 2).unwrap()
}

#[test]
fn labelling_figure_objects_and_action() {
    let a = two_object(&Groupoid::cyclic(2));
    let b = two_object(&Groupoid::cyclic(3));
    let p = figure_incorrect();
    let sigma = assign(&[("X1", &a), ("X2", &b)]);
    assert_eq!(p.link_pairs(), vec![(0, 5), (1, 2), (3, 4)]);
    // α: a₁ → a₂, β: b₁ → b₂, γ: c₁ → c₂ with a₁ = b₁ = c₂ = 0 and a₂ = b₂ = c₁ = 1.
    let alpha = a.hom(0, 1)[1];
    let beta = b.hom(0, 1)[2];
    let gamma = b.hom(1, 0)[1];
    let labels = vec![alpha, beta, gamma];
    // (((a₂, b₂), b₁), ((c₂, c₁), a₁))
    assert_eq!(experiment_objects(&p, &sigma, &labels).unwrap(), vec![1, 1, 0, 0, 1, 0]);

    // (((f₂, g₂), g₁), ((h₂, h₁), f₁)): positive leaves move out of their object,
    // negative ones (opposite morphisms) move into it.
    let f2 = a.hom(1, 0)[1];
    let g2 = b.hom(1, 1)[1];
    let g1 = b.hom(1, 0)[2];
    let h2 = b.hom(0, 0)[2];
    let h1 = b.hom(0, 1)[1];
    let f1 = a.hom(1, 0)[0];
    let moved = act_experiment(&p, &sigma, &labels, &[f2, g2, g1, h2, h1, f1]).unwrap();
    assert_eq!(moved, vec![a.mul(a.mul(f1, alpha), f2), b.mul(b.mul(g1, beta), g2), b.mul(b.mul(h1, gamma), h2)]);
    // A morphism at the wrong object is rejected.
    assert!(act_experiment(&p, &sigma, &labels, &[f2, g2, g1, h2, h1, a.hom(0, 1)[0]]).is_err());
}

#[test]
fn experiments_match_their_definition() {
    let cases: Vec<(ProofStructure, Vec<(&str, Groupoid)>)> = vec![
        (figure_correct(), vec![("X1", Groupoid::cyclic(2)), ("X2", Groupoid::trivial())]),
        (figure_incorrect(), vec![("X1", Groupoid::trivial()), ("X2", Groupoid::cyclic(2))]),
        (
            ProofStructure::new(vec![Formula::var("X1"), Formula::neg("X1")], &[(0, 1)]).unwrap(),
            vec![("X1", Groupoid::symmetric(3))],
        ),
        (
            ProofStructure::new(vec![Formula::var("X1"), Formula::neg("X1")], &[(0, 1)]).unwrap(),
            vec![("X1", Groupoid::coproduct(&[Groupoid::cyclic(2), two_object(&Groupoid::trivial())]))],
        ),
        (
            parse_structure_text("[\"X1*X2\",\"X2^|X1^\"]", "[[1,4],[2,3]]"),
            vec![("X1", two_object(&Groupoid::cyclic(2))), ("X2", Groupoid::cyclic(3))],
        ),
    ];
    for (p, vars) in cases {
        let sigma: Assignment = vars.into_iter().map(|(k, g)| (k.to_string(), g)).collect();
        let oracle = experiments_by_definition(&p, &sigma);
        let exp = experiments(&p, &sigma, DEFAULT_EXPLICIT_BOUND).unwrap();
        assert!(exp.is_isomorphic(&oracle).is_some(), "{p:?}");
        let direct = direct_interp(&p, &sigma, DEFAULT_EXPLICIT_BOUND).unwrap();
        assert!(direct.is_isomorphic(&oracle).is_some(), "{p:?}");
    }
}

fn parse_structure_text(seq: &str, links: &str) -> ProofStructure {
    profnet::mll::parse_structure(&format!("{{\"sequent\":{seq},\"links\":{links}}}")).unwrap()
}

#[test]
fn figure_interpretation_fibers() {
    let a1 = Groupoid::cyclic(2);
    let a2 = two_object(&Groupoid::trivial());
    let sigma = assign(&[("X1", &a1), ("X2", &a2)]);
    let p = figure_correct();
    assert_eq!(leaf_permutation(&p), vec![5, 0, 4, 1, 2, 3]);
    let chi = direct_interp(&p, &sigma, DEFAULT_EXPLICIT_BOUND).unwrap();
    let layout = Layout::new(p.sequent(), &sigma).unwrap();
    let structured = direct_structured(&p, &sigma, DEFAULT_ORBIT_BOUND).unwrap();
    // χ(⋆, (((x, y), z), ((u, v), w))) ≅ 𝔸₁(w, x) × 𝔸₂(v, y) × 𝔸₂(z, u).
    for o in 0..layout.groupoid().num_objects() {
        let t = layout.decode_obj(o);
        let (x, y, z, u, v, w) = (t[0], t[1], t[2], t[3], t[4], t[5]);
        let expected = a1.hom(w, x).len() * a2.hom(v, y).len() * a2.hom(z, u).len();
        assert_eq!(chi.fiber(0, o).len(), expected);
        assert_eq!(structured.fiber_count(&t), expected as u128);
    }
}

#[test]
fn fibers_vanish_across_components() {
    let g = Groupoid::coproduct(&[Groupoid::cyclic(2), two_object(&Groupoid::cyclic(3))]);
    let sigma = assign(&[("X1", &g), ("X2", &Groupoid::cyclic(2))]);
    let p = figure_correct();
    let exp = experiments_structured(&p, &sigma, DEFAULT_ORBIT_BOUND).unwrap();
    assert_eq!(exp.num_orbits(), 2);
    let classes = g.iso_classes();
    for w in 0..3 {
        for x in 0..3 {
            let t = vec![x, 0, 0, 0, 0, w];
            let nonempty = exp.fiber_count(&t) > 0;
            assert_eq!(nonempty, classes.class_of[w] == classes.class_of[x]);
        }
    }
}

#[test]
fn all_identities_stabilizer_is_the_anti_diagonal() {
    let g = Groupoid::symmetric(3);
    let sigma = assign(&[("X1", &g), ("X2", &g)]);
    let exp = experiments_structured(&figure_correct(), &sigma, DEFAULT_ORBIT_BOUND).unwrap();
    assert_eq!(exp.num_orbits(), 1);
    for block in &exp.orbits[0].blocks {
        let expected: Vec<Vec<Mor>> = {
            let mut v: Vec<Vec<Mor>> = g.end(0).into_iter().map(|f| vec![f, g.inverse(f)]).collect();
            v.sort();
            v
        };
        assert_eq!(block.elems, expected);
    }
}

#[test]
fn structured_and_explicit_comparisons_agree() {
    let groups = [Groupoid::cyclic(2), Groupoid::cyclic(3), two_object(&Groupoid::trivial())];
    for seed in 0..30 {
        let p = desequentialize(&random_proof(seed, 1 + seed as usize % 3)).unwrap();
        for g in &groups {
            let sigma: Assignment = p.variables().into_iter().map(|v| (v, g.clone())).collect();
            let layout = Layout::new(p.sequent(), &sigma).unwrap();
            if layout.groupoid().num_morphisms() > 600 {
                continue;
            }
            let exp = experiments_structured(&p, &sigma, DEFAULT_ORBIT_BOUND).unwrap();
            let dir = direct_structured(&p, &sigma, DEFAULT_ORBIT_BOUND).unwrap();
            assert!(exp.is_isomorphic(&dir));
            let e = exp.to_profunctor(&layout, 10_000).unwrap();
            let d = direct_interp(&p, &sigma, 10_000).unwrap();
            assert!(e.is_isomorphic(&d).is_some(), "seed {seed}");
            assert!(e.is_isomorphic(&dir.to_profunctor(&layout, 10_000).unwrap()).is_some());
        }
    }
}

#[test]
fn structured_comparison_rejects_different_stabilizers() {
    let g = Groupoid::cyclic(3);
    let sigma = assign(&[("X1", &g), ("X2", &g)]);
    let exp = experiments_structured(&figure_correct(), &sigma, DEFAULT_ORBIT_BOUND).unwrap();
    let mut shrunk = exp.clone();
    shrunk.orbits[0].blocks[1].elems.truncate(1);
    assert!(!exp.is_isomorphic(&shrunk));
    let mut merged = exp.clone();
    let b0 = merged.orbits[0].blocks.remove(0);
    let b1 = merged.orbits[0].blocks.remove(0);
    let mut leaves = b0.leaves.clone();
    leaves.extend(&b1.leaves);
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by_key(|&i| leaves[i]);
    let mut elems = Vec::new();
    for x in &b0.elems {
        for y in &b1.elems {
            let t: Vec<Mor> = x.iter().chain(y).copied().collect();
            elems.push(order.iter().map(|&i| t[i]).collect::<Vec<_>>());
        }
    }
    elems.sort();
    leaves.sort();
    merged.orbits[0].blocks.push(profnet::interp::Block { leaves, elems });
    assert!(exp.is_isomorphic(&merged));
}

#[test]
fn corpus_experiments_match_direct_interpretation() {
    let groups = [
        Groupoid::cyclic(2),
        Groupoid::cyclic(3),
        Groupoid::cyclic(4),
        z2xz3(),
        Groupoid::symmetric(3),
        two_object(&Groupoid::cyclic(2)),
    ];
    let mut per_var: BTreeMap<usize, usize> = BTreeMap::new();
    for seed in 0..40 {
        let p = random_structure(seed, 2 + seed as usize % 8);
        for g in &groups {
            let sigma: Assignment = p.variables().into_iter().map(|v| (v, g.clone())).collect();
            let exp = experiments_structured(&p, &sigma, DEFAULT_ORBIT_BOUND).unwrap();
            let dir = direct_structured(&p, &sigma, DEFAULT_ORBIT_BOUND).unwrap();
            assert!(exp.is_isomorphic(&dir), "seed {seed}");
        }
        *per_var.entry(p.variables().len()).or_default() += 1;
    }
    assert!(per_var.len() > 1);
}
