#![allow(dead_code)]

pub mod laws;

use std::collections::HashMap;

use profnet::grpd::subgroups;
use profnet::prof::{Elem, Profunctor};
use profnet::{Groupoid, Mor, Obj};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small groupoids exercised by the law and oracle tests.
pub fn catalog() -> Vec<Groupoid> {
    let z2 = Groupoid::cyclic(2);
    vec![
        Groupoid::trivial(),
        z2.clone(),
        Groupoid::cyclic(3),
        Groupoid::symmetric(3),
        Groupoid::connected(&z2, 2).unwrap(),
        Groupoid::coproduct(&[z2, Groupoid::trivial()]),
    ]
}

/// A random profunctor with up to `max_orbits` orbits.
pub fn random_prof(src: &Groupoid, dst: &Groupoid, seed: u64, max_orbits: usize) -> Profunctor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cat = src.opposite().product(dst);
    let n = rng.gen_range(0..=max_orbits);
    let mut orbits = Vec::new();
    for _ in 0..n {
        let base = rng.gen_range(0..cat.num_objects());
        let subs = subgroups(&cat, base, 1000).unwrap();
        orbits.push((base, subs.choose(&mut rng).unwrap().clone()));
    }
    Profunctor::from_orbits(src, dst, orbits).unwrap()
}

/// A finite set with a right action of `cat`, tabulated in full.
pub struct ActionSet {
    pub cat: Groupoid,
    pub objs: Vec<Obj>,
    pub act: HashMap<(usize, Mor), usize>,
}

impl ActionSet {
    pub fn of(p: &Profunctor) -> Self {
        let elems = p.elements();
        let index: HashMap<Elem, usize> = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let cat = p.cat().clone();
        let objs: Vec<Obj> = elems.iter().map(|&e| p.elem_obj(e)).collect();
        let mut act = HashMap::new();
        for (i, &x) in elems.iter().enumerate() {
            for m in out_of(&cat, objs[i]) {
                act.insert((i, m), index[&p.act_cat(x, m)]);
            }
        }
        ActionSet { cat, objs, act }
    }

    /// Checks the action axioms directly.
    pub fn is_action(&self) -> bool {
        for (i, &o) in self.objs.iter().enumerate() {
            if self.act[&(i, self.cat.identity(o))] != i {
                return false;
            }
            for m in out_of(&self.cat, o) {
                let y = self.act[&(i, m)];
                if self.objs[y] != self.cat.dst(m) {
                    return false;
                }
                for n in out_of(&self.cat, self.cat.dst(m)) {
                    if self.act[&(y, n)] != self.act[&(i, self.cat.mul(m, n))] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Table of marks: for each object and subgroup of its automorphisms, the
    /// number of fixed points. Equal marks means isomorphic actions.
    pub fn marks(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for c in 0..self.cat.num_objects() {
            for h in subgroups(&self.cat, c, 10_000).unwrap() {
                let fixed = (0..self.objs.len())
                    .filter(|&x| self.objs[x] == c && h.elems.iter().all(|&g| self.act[&(x, g)] == x))
                    .count();
                out.push(fixed);
            }
        }
        out
    }
}

pub fn out_of(g: &Groupoid, o: Obj) -> Vec<Mor> {
    (0..g.num_objects()).flat_map(|c| g.hom(o, c)).collect()
}

/// Coend `P ; Q` computed naively: pairs over a common middle object, quotiented
/// by repeated minimum-label propagation.
pub fn oracle_compose(p: &Profunctor, q: &Profunctor) -> ActionSet {
    let ps = ActionSet::of(p);
    let qs = ActionSet::of(q);
    let mid = p.dst();
    let mut pairs = Vec::new();
    for x in 0..ps.objs.len() {
        for y in 0..qs.objs.len() {
            if p.split_obj(ps.objs[x]).1 == q.split_obj(qs.objs[y]).0 {
                pairs.push((x, y));
            }
        }
    }
    let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut label: Vec<usize> = (0..pairs.len()).collect();
    loop {
        let mut changed = false;
        for (i, &(x, y)) in pairs.iter().enumerate() {
            let (a, b) = p.split_obj(ps.objs[x]);
            let c = q.split_obj(qs.objs[y]).1;
            for beta in out_of(mid, b) {
                let x2 = ps.act[&(x, p.cat_mor(p.src().identity(a), beta))];
                let y2 = qs.act[&(y, q.cat_mor(mid.inverse(beta), q.dst().identity(c)))];
                let j = index[&(x2, y2)];
                let m = label[i].min(label[j]);
                if label[i] != m || label[j] != m {
                    label[i] = m;
                    label[j] = m;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut classes: Vec<usize> = label.clone();
    classes.sort_unstable();
    classes.dedup();
    let class_idx: HashMap<usize, usize> = classes.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let cat = p.src().opposite().product(q.dst());
    let mut objs = vec![0; classes.len()];
    let mut act = HashMap::new();
    for (i, &(x, y)) in pairs.iter().enumerate() {
        let k = class_idx[&label[i]];
        let (a, b) = p.split_obj(ps.objs[x]);
        let c = q.split_obj(qs.objs[y]).1;
        objs[k] = cat.pair_obj(a, c);
        for m in out_of(&cat, cat.pair_obj(a, c)) {
            let (alpha, gamma) = cat.split_mor(m);
            let x2 = ps.act[&(x, p.cat_mor(alpha, mid.identity(b)))];
            let y2 = qs.act[&(y, q.cat_mor(mid.identity(b), gamma))];
            act.insert((k, m), class_idx[&label[index[&(x2, y2)]]]);
        }
    }
    ActionSet { cat, objs, act }
}

/// Groups of order at most 12 used by the exhaustive sweeps.
pub fn small_groups() -> Vec<(String, Groupoid)> {
    let mut out: Vec<(String, Groupoid)> = (1..=12).map(|n| (format!("Z{n}"), Groupoid::cyclic(n))).collect();
    let z2 = Groupoid::cyclic(2);
    out.push(("Z2xZ2".into(), z2.product(&z2)));
    out.push(("Z2xZ3".into(), z2.product(&Groupoid::cyclic(3))));
    out.push(("Z2xZ4".into(), z2.product(&Groupoid::cyclic(4))));
    out.push(("S3".into(), Groupoid::symmetric(3)));
    out.push(("D4".into(), Groupoid::dihedral(4)));
    out.push(("Q8".into(), Groupoid::quaternion()));
    out.push(("D6".into(), Groupoid::dihedral(6)));
    out.push((
        "A4".into(),
        Groupoid::group_from_perms(&[vec![1, 2, 0, 3], vec![1, 0, 3, 2]]).unwrap(),
    ));
    out
}

/// Every creed on a group, by brute force: unions of the closures of single
/// elements (conjugates of the cyclic subgroup), plus the empty family.
pub fn all_creeds_on_group(g: &Groupoid) -> Vec<std::collections::BTreeSet<Mor>> {
    use std::collections::BTreeSet;
    let end = g.end(0);
    let mut atoms: Vec<BTreeSet<Mor>> = Vec::new();
    for &a in &end {
        let mut set = BTreeSet::new();
        for &b in &end {
            let c = g.mul(g.mul(g.inverse(b), a), b);
            for k in 0..g.order(c) {
                set.insert(g.power(c, k));
            }
        }
        if !atoms.contains(&set) {
            atoms.push(set);
        }
    }
    let mut out: BTreeSet<BTreeSet<Mor>> = BTreeSet::new();
    for mask in 0u32..(1 << atoms.len()) {
        let mut set = BTreeSet::new();
        for (i, atom) in atoms.iter().enumerate() {
            if mask & (1 << i) != 0 {
                set.extend(atom.iter().copied());
            }
        }
        out.insert(set);
    }
    out.into_iter().collect()
}
