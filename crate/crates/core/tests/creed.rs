mod common;

use std::collections::BTreeSet;

use common::{all_creeds_on_group, small_groups};
use profnet::creed::{creed_of, kit_of, models, par_creed, sprof_morphism_check, tensor_creed, Creed};
use profnet::grpd::subgroups;
use profnet::prof::Profunctor;
use profnet::{Groupoid, Mor};

fn creed(g: &Groupoid, set: &BTreeSet<Mor>) -> Creed {
    Creed::from_rep_sets(g, vec![set.iter().copied().collect()]).unwrap()
}

fn z2z3() -> Groupoid {
    Groupoid::cyclic(2).product(&Groupoid::cyclic(3))
}

/// `ℤ₂×{0}` and `{0}×ℤ₃` inside `ℤ₂×ℤ₃`.
fn halves(g: &Groupoid) -> (Creed, Creed) {
    let left = (0..2).map(|a| g.pair_mor(a, 0)).collect();
    let right = (0..3).map(|b| g.pair_mor(0, b)).collect();
    (Creed::from_rep_sets(g, vec![left]).unwrap(), Creed::from_rep_sets(g, vec![right]).unwrap())
}

#[test]
fn dual_of_the_order_two_factor() {
    let g = z2z3();
    let (left, right) = halves(&g);
    assert_eq!(left.dual(), right);
    assert_eq!(right.dual(), left);
    assert!(left.is_boolean());
    assert!(left.is_orthogonal(&right).unwrap());
}

#[test]
fn non_boolean_creed_on_z4() {
    let z4 = Groupoid::cyclic(4);
    let c = Creed::from_rep_sets(&z4, vec![vec![0, 2]]).unwrap();
    assert_eq!(c.dual().at_rep(0), &[0]);
    assert!(!c.is_boolean());
    assert_eq!(c.boolean_closure(), Creed::full(&z4));
    assert!(Creed::identity(&z4).is_boolean());
    assert_eq!(Creed::full(&z4).dual(), Creed::identity(&z4));
}

#[test]
fn unclosed_sets_are_rejected() {
    let z4 = Groupoid::cyclic(4);
    assert!(Creed::from_rep_sets(&z4, vec![vec![0, 1]]).is_err());
    let s3 = Groupoid::symmetric(3);
    let t = s3.morphism_by_label("(12)").unwrap();
    assert!(Creed::from_rep_sets(&s3, vec![vec![0, t]]).is_err());
    assert_eq!(Creed::closure_of(&s3, &[(0, vec![t])]).unwrap().at_rep(0).len(), 4);
}

#[test]
fn dual_laws_on_every_creed_of_small_groups() {
    for (name, g) in small_groups() {
        let creeds: Vec<Creed> = all_creeds_on_group(&g).iter().map(|s| creed(&g, s)).collect();
        for c in &creeds {
            let d = c.dual();
            assert!(d.closure_violation().is_none(), "{name}");
            assert!(c.is_subset_of(&d.dual()) || c.at_rep(0).is_empty(), "{name}");
            assert_eq!(d, d.dual().dual(), "{name}");
            assert!(c.is_orthogonal(&d).unwrap());
            // Maximality: every creed orthogonal to c lies inside the dual.
            for e in &creeds {
                if c.is_orthogonal(e).unwrap() {
                    assert!(e.is_subset_of(&d), "{name}");
                }
                if c.is_subset_of(e) {
                    assert!(e.dual().is_subset_of(&d), "{name}: antitone");
                }
            }
            if c.is_boolean() {
                assert_eq!(c.to_kit(100).unwrap().union(), *c, "{name}");
            }
        }
    }
}

#[test]
fn creed_of_induced_is_the_conjugate_union() {
    let i = Groupoid::trivial();
    for g in [Groupoid::symmetric(3), Groupoid::connected(&Groupoid::symmetric(3), 2).unwrap()] {
        for obj in 0..g.num_objects() {
            for h in subgroups(&g, obj, 100).unwrap() {
                let pairs: Vec<(Mor, Mor)> = h.elems.iter().map(|&m| (0, m)).collect();
                let p = Profunctor::induced(&i, &g, 0, obj, &pairs).unwrap();
                let c = creed_of(&p).unwrap();
                assert!(c.closure_violation().is_none());
                for b in 0..g.num_objects() {
                    let mut expected = BTreeSet::new();
                    for beta in g.hom(obj, b) {
                        for &a in &h.elems {
                            expected.insert(g.mul(g.mul(g.inverse(beta), a), beta));
                        }
                    }
                    assert_eq!(c.at(b), expected.into_iter().collect::<Vec<_>>());
                }
                assert!(models(&p, &c).unwrap());
                assert!(kit_of(&p).unwrap().is_closed());
            }
        }
    }
}

#[test]
fn kit_of_normal_subgroup() {
    let s3 = Groupoid::symmetric(3);
    let r = s3.morphism_by_label("(123)").unwrap();
    let a3 = [0, r, s3.mul(r, r)].map(|m| (0, m));
    let p = Profunctor::induced(&Groupoid::trivial(), &s3, 0, 0, &a3).unwrap();
    let kit = kit_of(&p).unwrap();
    assert_eq!(kit.at_rep(0).len(), 1);
    assert_eq!(kit.at_rep(0)[0].order(), 3);
    assert!(!kit.is_orthogonal(&kit).unwrap());
    let empty = Profunctor::empty(&Groupoid::trivial(), &s3);
    assert!(creed_of(&empty).unwrap().at_rep(0).is_empty());
    assert!(models(&empty, &Creed::identity(&s3)).unwrap());
}

#[test]
fn models_rejects_a_foreign_stabilizer() {
    let g = z2z3();
    let (_, right) = halves(&g);
    let pairs: Vec<(Mor, Mor)> = (0..2).map(|a| (0, g.pair_mor(a, 0))).collect();
    let p = Profunctor::induced(&Groupoid::trivial(), &g, 0, 0, &pairs).unwrap();
    assert!(!models(&p, &right).unwrap());
}

/// Membership rules for the connectives, over every pair of Boolean creeds on
/// the given groups. The second component of the `(𝒜⊗ℬ)⊥` and `𝒜⅋ℬ` rules must
/// lie in `ℬ⊥` and `ℬ` respectively; see `unrestricted_second_component_fails`.
#[test]
fn connective_membership_rules() {
    let groups = [z2z3(), Groupoid::symmetric(3), Groupoid::cyclic(4)];
    for ga in &groups {
        for gb in &groups {
            let ca: Vec<Creed> = all_creeds_on_group(ga).iter().map(|s| creed(ga, s)).filter(Creed::is_boolean).collect();
            let cb: Vec<Creed> = all_creeds_on_group(gb).iter().map(|s| creed(gb, s)).filter(Creed::is_boolean).collect();
            for a in &ca {
                for b in &cb {
                    let t = tensor_creed(a, b).unwrap();
                    let p = par_creed(a, b).unwrap();
                    let (td, pd) = (t.dual(), p.dual());
                    let (ad, bd) = (a.dual(), b.dual());
                    let g = t.groupoid().clone();
                    let (id_a, id_b) = (ga.identity(0), gb.identity(0));
                    for x in ga.end(0) {
                        for y in gb.end(0) {
                            let m = g.pair_mor(x, y);
                            let (xa, ya) = (a.contains(0, x), b.contains(0, y));
                            let (xd, yd) = (ad.contains(0, x), bd.contains(0, y));
                            if xa && ya {
                                assert!(t.contains(0, m));
                            }
                            if xd && x != id_a && yd {
                                assert!(td.contains(0, m));
                            }
                            if xa && x != id_a && ya {
                                assert!(p.contains(0, m));
                            }
                            if xd && yd {
                                assert!(pd.contains(0, m));
                            }
                            // With one side trivial the rules hold for any partner.
                            if xd && x != id_a && y == id_b {
                                assert!(td.contains(0, m));
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn unrestricted_second_component_fails() {
    // 𝒜 = {id}, ℬ = {0}×ℤ₃ on ℤ₂×ℤ₃: (α, β)² = (id, β²) is a non-identity
    // element of 𝒜 × ℬ, so (α, β) is not in (𝒜 ⊗ ℬ)⊥ although α ∈ 𝒜⊥ \ {id}.
    let g = z2z3();
    let (_, right) = halves(&g);
    let a = Creed::identity(&g);
    let (alpha, beta) = (g.pair_mor(1, 0), g.pair_mor(0, 1));
    assert!(a.dual().contains(0, alpha));
    let t = tensor_creed(&a, &right).unwrap();
    let gg = t.groupoid().clone();
    assert!(!t.dual().contains(0, gg.pair_mor(alpha, beta)));
    // Dually for the par rule: 𝒜 = full, ℬ = ℤ₂×{0}, α = (0,1), β = (1,0).
    let (left, _) = halves(&g);
    let p = par_creed(&Creed::full(&g), &left.dual()).unwrap();
    assert!(!p.contains(0, gg.pair_mor(g.pair_mor(0, 1), g.pair_mor(1, 0))));
}

#[test]
fn connectives_require_boolean_inputs() {
    let z4 = Groupoid::cyclic(4);
    let c = Creed::from_rep_sets(&z4, vec![vec![0, 2]]).unwrap();
    assert!(tensor_creed(&c, &Creed::identity(&z4)).is_err());
    let id = Creed::identity(&z4);
    assert_eq!(tensor_creed(&id, &id).unwrap(), Creed::identity(&z4.product(&z4)));
}

#[test]
fn sprof_examples() {
    let g = z2z3();
    let (left, _) = halves(&g);
    assert!(sprof_morphism_check(&Profunctor::identity(&g), &left, &left, 100).unwrap());
    let i = Groupoid::trivial();
    let target = par_creed(&left.dual().on_opposite(), &left).unwrap();
    let eta = Profunctor::unit_eta(&g);
    assert!(sprof_morphism_check(&eta, &Creed::identity(&i), &target, 100).unwrap());
    let full: Vec<(Mor, Mor)> = g.end(0).into_iter().map(|m| (0, m)).collect();
    let p = Profunctor::induced(&i, &g, 0, 0, &full).unwrap();
    assert!(!sprof_morphism_check(&p, &Creed::identity(&i), &Creed::identity(&g), 100).unwrap());
}

/// Atomic probes give the same verdict as all probes with up to two orbits.
#[test]
fn atomic_probes_suffice() {
    let i = Groupoid::trivial();
    let groups = [Groupoid::cyclic(2), Groupoid::cyclic(3), Groupoid::connected(&Groupoid::cyclic(2), 2).unwrap()];
    for a in &groups {
        for b in &groups[..2] {
            let ca: Vec<Creed> = bool_creeds(a);
            let cb: Vec<Creed> = bool_creeds(b);
            for seed in 0..6 {
                let p = common::random_prof(a, b, seed, 2);
                for x in &ca {
                    for y in &cb {
                        let fast = sprof_morphism_check(&p, x, y, 100).unwrap();
                        let slow = probes(&i, a, 2).iter().filter(|q| models(q, x).unwrap()).all(|q| models(&q.compose(&p).unwrap(), y).unwrap())
                            && probes(&i, b, 2)
                                .iter()
                                .map(|q| transpose_to_copresheaf(q, b))
                                .filter(|r| models(r, &y.dual()).unwrap())
                                .all(|r| models(&p.compose(&r).unwrap(), &x.dual()).unwrap());
                        assert_eq!(fast, slow);
                    }
                }
            }
        }
    }
}

fn bool_creeds(g: &Groupoid) -> Vec<Creed> {
    let mut out = Vec::new();
    let reps = g.iso_classes().reps.clone();
    assert_eq!(reps.len(), 1);
    let base = g.clone();
    let local = Groupoid::group_from_cayley(
        &base
            .end(0)
            .iter()
            .map(|&x| base.end(0).iter().map(|&y| base.end(0).iter().position(|&z| z == base.mul(x, y)).unwrap()).collect())
            .collect::<Vec<_>>(),
        None,
    )
    .unwrap();
    for s in all_creeds_on_group(&local) {
        let set: Vec<Mor> = s.iter().map(|&i| g.end(0)[i]).collect();
        let c = Creed::from_rep_sets(g, vec![set]).unwrap();
        if c.is_boolean() {
            out.push(c);
        }
    }
    out
}

/// Every profunctor `I ⇸ g` with at most `k` orbits.
fn probes(i: &Groupoid, g: &Groupoid, k: usize) -> Vec<Profunctor> {
    let mut atoms = Vec::new();
    for obj in 0..g.num_objects() {
        for h in subgroups(g, obj, 100).unwrap() {
            let pairs: Vec<(Mor, Mor)> = h.elems.iter().map(|&m| (0, m)).collect();
            atoms.push(Profunctor::induced(i, g, 0, obj, &pairs).unwrap());
        }
    }
    let mut out = vec![Profunctor::empty(i, g)];
    for (x, a) in atoms.iter().enumerate() {
        out.push(a.clone());
        if k >= 2 {
            for b in &atoms[x..] {
                out.push(Profunctor::sum(i, g, &[a.clone(), b.clone()]).unwrap());
            }
        }
    }
    out
}

/// The same orbits read as a profunctor `g ⇸ I`.
fn transpose_to_copresheaf(q: &Profunctor, g: &Groupoid) -> Profunctor {
    let i = Groupoid::trivial();
    let cat = g.opposite().product(&i);
    let orbits = q
        .orbits()
        .iter()
        .map(|o| (o.base, profnet::Subgroup { obj: o.base, elems: o.stab.elems.iter().map(|&m| cat.pair_mor(m, 0)).collect() }))
        .collect();
    Profunctor::from_orbits(g, &i, orbits).unwrap()
}
