//! Finite groupoids stored as composition tables, with structural opposite,
//! product and coproduct views, subgroups, conjugacy and functors.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde_json::{json, Value};

use crate::error::{domain, validation, Error, Result};
use crate::union_find::UnionFind;

pub type Obj = usize;
pub type Mor = usize;

const NONE: usize = usize::MAX;

/// Default bound on the order of endomorphism groups whose subgroups get enumerated.
pub const DEFAULT_GROUP_BOUND: usize = 48;

/// A finite groupoid. Cheap to clone; immutable.
///
/// Base groupoids are explicit tables. Opposites, products and coproducts are
/// views over their factors: ids are computed arithmetically (product object
/// `(a, b)` is `a * |objects(right)| + b`, likewise for morphisms), so no
/// tables are materialized for them.
#[derive(Clone)]
pub struct Groupoid(Arc<Inner>);

struct Inner {
    repr: Repr,
    n_obj: usize,
    n_mor: usize,
    classes: OnceLock<IsoClasses>,
}

enum Repr {
    Table(Table),
    Opposite(Groupoid),
    Product(Groupoid, Groupoid),
    Coproduct(Coproduct),
}

struct Table {
    object_names: Vec<String>,
    labels: Vec<String>,
    src: Vec<Obj>,
    dst: Vec<Obj>,
    compose: Vec<Mor>,
    identity: Vec<Mor>,
    inverse: Vec<Mor>,
    hom: Vec<Vec<Mor>>,
}

struct Coproduct {
    parts: Vec<Groupoid>,
    obj_offset: Vec<usize>,
    mor_offset: Vec<usize>,
}

/// Partition of objects into isomorphism classes. Classes are numbered in
/// increasing order of their representative, which is the lowest object index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoClasses {
    pub class_of: Vec<usize>,
    pub reps: Vec<Obj>,
}

impl IsoClasses {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn rep_of(&self, o: Obj) -> Obj {
        self.reps[self.class_of[o]]
    }
}

impl Groupoid {
    fn wrap(repr: Repr) -> Self {
        let (n_obj, n_mor) = match &repr {
            Repr::Table(t) => (t.object_names.len(), t.src.len()),
            Repr::Opposite(g) => (g.num_objects(), g.num_morphisms()),
            Repr::Product(a, b) => (
                a.num_objects()
                    .checked_mul(b.num_objects())
                    .expect("product groupoid too large to index"),
                a.num_morphisms()
                    .checked_mul(b.num_morphisms())
                    .expect("product groupoid too large to index"),
            ),
            Repr::Coproduct(c) => (
                c.parts.iter().map(|p| p.num_objects()).sum(),
                c.parts.iter().map(|p| p.num_morphisms()).sum(),
            ),
        };
        Groupoid(Arc::new(Inner {
            repr,
            n_obj,
            n_mor,
            classes: OnceLock::new(),
        }))
    }

    /// Builds a groupoid from explicit data and validates all axioms.
    /// `compose` lists triples `(m1, m2, m1;m2)`.
    pub fn from_table(
        object_names: Vec<String>,
        endpoints: Vec<(Obj, Obj)>,
        compose: &[(Mor, Mor, Mor)],
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let n_obj = object_names.len();
        let n = endpoints.len();
        for (m, &(s, d)) in endpoints.iter().enumerate() {
            if s >= n_obj || d >= n_obj {
                return validation(format!("morphism {m} has an endpoint outside the object list"));
            }
        }
        let src: Vec<Obj> = endpoints.iter().map(|e| e.0).collect();
        let dst: Vec<Obj> = endpoints.iter().map(|e| e.1).collect();
        let mut table = vec![NONE; n * n];
        for &(a, b, c) in compose {
            if a >= n || b >= n || c >= n {
                return validation(format!("composition entry ({a},{b},{c}) names an unknown morphism"));
            }
            if dst[a] != src[b] {
                return validation(format!("composition entry ({a},{b},{c}) is not composable"));
            }
            if src[c] != src[a] || dst[c] != dst[b] {
                return validation(format!("composition entry ({a},{b},{c}) has wrong endpoints"));
            }
            if table[a * n + b] != NONE && table[a * n + b] != c {
                return validation(format!("composition of ({a},{b}) given twice with different results"));
            }
            table[a * n + b] = c;
        }
        for a in 0..n {
            for b in 0..n {
                if dst[a] == src[b] && table[a * n + b] == NONE {
                    return validation(format!("composition of ({a},{b}) is missing"));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if dst[a] != src[b] {
                    continue;
                }
                let ab = table[a * n + b];
                for c in 0..n {
                    if dst[b] != src[c] {
                        continue;
                    }
                    if table[ab * n + c] != table[a * n + table[b * n + c]] {
                        return validation(format!("composition is not associative at ({a},{b},{c})"));
                    }
                }
            }
        }
        let mut hom = vec![Vec::new(); n_obj * n_obj];
        for m in 0..n {
            hom[src[m] * n_obj + dst[m]].push(m);
        }
        let mut identity = vec![NONE; n_obj];
        for o in 0..n_obj {
            let found = hom[o * n_obj + o].iter().copied().find(|&e| {
                (0..n).all(|m| {
                    (src[m] != o || table[e * n + m] == m) && (dst[m] != o || table[m * n + e] == m)
                })
            });
            match found {
                Some(e) => identity[o] = e,
                None => return validation(format!("object {o} has no identity morphism")),
            }
        }
        let mut inverse = vec![NONE; n];
        for m in 0..n {
            let found = hom[dst[m] * n_obj + src[m]]
                .iter()
                .copied()
                .find(|&i| table[m * n + i] == identity[src[m]] && table[i * n + m] == identity[dst[m]]);
            match found {
                Some(i) => inverse[m] = i,
                None => return validation(format!("morphism {m} has no inverse")),
            }
        }
        let labels = match labels {
            Some(l) if l.len() == n => l,
            Some(_) => return validation("label list length differs from morphism count"),
            None => (0..n).map(|m| m.to_string()).collect(),
        };
        Ok(Self::wrap(Repr::Table(Table {
            object_names,
            labels,
            src,
            dst,
            compose: table,
            identity,
            inverse,
            hom,
        })))
    }

    /// Single-object groupoid from a multiplication table `cayley[i][j] = i;j`.
    pub fn group_from_cayley(cayley: &[Vec<usize>], labels: Option<Vec<String>>) -> Result<Self> {
        let n = cayley.len();
        if n == 0 {
            return validation("a group needs at least one element");
        }
        let mut triples = Vec::with_capacity(n * n);
        for (i, row) in cayley.iter().enumerate() {
            if row.len() != n {
                return validation(format!("cayley row {i} has length {} instead of {n}", row.len()));
            }
            for (j, &k) in row.iter().enumerate() {
                triples.push((i, j, k));
            }
        }
        Self::from_table(vec!["*".into()], vec![(0, 0); n], &triples, labels)
    }

    /// Permutation group generated by `gens` (0-based images), elements in
    /// breadth-first order from the identity; composition is "apply left, then right".
    pub fn group_from_perms(gens: &[Vec<usize>]) -> Result<Self> {
        let degree = gens.first().map_or(0, |g| g.len());
        for g in gens {
            let mut seen = vec![false; degree];
            if g.len() != degree {
                return validation("generators act on different numbers of points");
            }
            for &x in g {
                if x >= degree || seen[x] {
                    return validation(format!("{g:?} is not a permutation"));
                }
                seen[x] = true;
            }
        }
        let id: Vec<usize> = (0..degree).collect();
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let p: Vec<usize> = elems[i].iter().map(|&x| g[x]).collect();
                if !index.contains_key(&p) {
                    index.insert(p.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(p);
                }
            }
        }
        let cayley: Vec<Vec<usize>> = elems
            .iter()
            .map(|p| {
                elems
                    .iter()
                    .map(|q| index[&p.iter().map(|&x| q[x]).collect::<Vec<_>>()])
                    .collect()
            })
            .collect();
        let labels = elems.iter().map(|p| cycle_notation(p)).collect();
        Self::group_from_cayley(&cayley, Some(labels))
    }

    /// The terminal groupoid I: one object, one morphism.
    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn empty() -> Self {
        Self::from_table(vec![], vec![], &[], None).expect("empty groupoid is valid")
    }

    pub fn cyclic(n: usize) -> Self {
        let n = n.max(1);
        let cayley: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        Self::group_from_cayley(&cayley, None).expect("cyclic group table is valid")
    }

    /// Symmetric group on `n` points.
    pub fn symmetric(n: usize) -> Self {
        if n < 2 {
            return Self::trivial();
        }
        let swap: Vec<usize> = (0..n).map(|i| if i < 2 { 1 - i } else { i }).collect();
        let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        Self::group_from_perms(&[swap, cycle]).expect("valid generators")
    }

    /// Dihedral group of order `2n`, acting on the vertices of an `n`-gon.
    pub fn dihedral(n: usize) -> Self {
        let rot: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        let refl: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
        Self::group_from_perms(&[rot, refl]).expect("valid generators")
    }

    /// Quaternion group Q8 with elements ±1, ±i, ±j, ±k.
    pub fn quaternion() -> Self {
        // Unit k in {1,i,j,k} with sign s is element 2k + s.
        let unit_mul = |a: usize, b: usize| -> (usize, bool) {
            match (a, b) {
                (0, x) | (x, 0) => (x, false),
                (x, y) if x == y => (0, true),
                (1, 2) => (3, false),
                (2, 1) => (3, true),
                (2, 3) => (1, false),
                (3, 2) => (1, true),
                (3, 1) => (2, false),
                (1, 3) => (2, true),
                _ => unreachable!(),
            }
        };
        let cayley: Vec<Vec<usize>> = (0..8)
            .map(|x| {
                (0..8)
                    .map(|y| {
                        let (u, neg) = unit_mul(x / 2, y / 2);
                        let sign = (x % 2) ^ (y % 2) ^ usize::from(neg);
                        2 * u + sign
                    })
                    .collect()
            })
            .collect();
        let names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"];
        Self::group_from_cayley(&cayley, Some(names.iter().map(|s| s.to_string()).collect()))
            .expect("quaternion table is valid")
    }

    /// Connected groupoid with `k` objects whose endomorphism groups are `group`.
    /// Morphism `(i, g, j)` has id `(i * k + j) * |G| + g`.
    pub fn connected(group: &Groupoid, k: usize) -> Result<Self> {
        if group.num_objects() != 1 {
            return domain("connected() expects a group");
        }
        let n = group.num_morphisms();
        let mut endpoints = Vec::with_capacity(k * k * n);
        let mut labels = Vec::new();
        for i in 0..k {
            for j in 0..k {
                for g in 0..n {
                    endpoints.push((i, j));
                    labels.push(format!("{i}>{}>{j}", group.label(g)));
                }
            }
        }
        let id_of = |i: usize, j: usize, g: usize| (i * k + j) * n + g;
        let mut triples = Vec::new();
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    for g in 0..n {
                        for h in 0..n {
                            triples.push((id_of(i, j, g), id_of(j, l, h), id_of(i, l, group.mul(g, h))));
                        }
                    }
                }
            }
        }
        Self::from_table((0..k).map(|i| format!("o{i}")).collect(), endpoints, &triples, Some(labels))
    }

    pub fn opposite(&self) -> Self {
        match &self.0.repr {
            Repr::Opposite(inner) => inner.clone(),
            _ => Self::wrap(Repr::Opposite(self.clone())),
        }
    }

    pub fn product(&self, other: &Groupoid) -> Self {
        Self::wrap(Repr::Product(self.clone(), other.clone()))
    }

    pub fn coproduct(parts: &[Groupoid]) -> Self {
        let mut obj_offset = Vec::with_capacity(parts.len());
        let mut mor_offset = Vec::with_capacity(parts.len());
        let (mut o, mut m) = (0, 0);
        for p in parts {
            obj_offset.push(o);
            mor_offset.push(m);
            o += p.num_objects();
            m += p.num_morphisms();
        }
        Self::wrap(Repr::Coproduct(Coproduct {
            parts: parts.to_vec(),
            obj_offset,
            mor_offset,
        }))
    }

    /// Injection of object/morphism of part `i` into a coproduct.
    pub fn coproduct_injection(&self, part: usize) -> Result<GroupoidFunctor> {
        let Repr::Coproduct(c) = &self.0.repr else {
            return domain("not a coproduct groupoid");
        };
        let p = c.parts.get(part).ok_or_else(|| Error::Domain("no such coproduct part".into()))?;
        Ok(GroupoidFunctor {
            source: p.clone(),
            target: self.clone(),
            obj_map: (0..p.num_objects()).map(|o| o + c.obj_offset[part]).collect(),
            mor_map: (0..p.num_morphisms()).map(|m| m + c.mor_offset[part]).collect(),
        })
    }

    pub fn num_objects(&self) -> usize {
        self.0.n_obj
    }

    pub fn num_morphisms(&self) -> usize {
        self.0.n_mor
    }

    pub fn is_group(&self) -> bool {
        self.num_objects() == 1
    }

    pub fn is_trivial(&self) -> bool {
        self.num_objects() == 1 && self.num_morphisms() == 1
    }

    /// Factors of a product view, if this is one.
    pub fn product_factors(&self) -> Option<(&Groupoid, &Groupoid)> {
        match &self.0.repr {
            Repr::Product(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn pair_obj(&self, a: Obj, b: Obj) -> Obj {
        let (_, r) = self.product_factors().expect("pair_obj on a non-product");
        a * r.num_objects() + b
    }

    pub fn split_obj(&self, o: Obj) -> (Obj, Obj) {
        let (_, r) = self.product_factors().expect("split_obj on a non-product");
        (o / r.num_objects(), o % r.num_objects())
    }

    pub fn pair_mor(&self, a: Mor, b: Mor) -> Mor {
        let (_, r) = self.product_factors().expect("pair_mor on a non-product");
        a * r.num_morphisms() + b
    }

    pub fn split_mor(&self, m: Mor) -> (Mor, Mor) {
        let (_, r) = self.product_factors().expect("split_mor on a non-product");
        (m / r.num_morphisms(), m % r.num_morphisms())
    }

    fn coproduct_part_of_obj(c: &Coproduct, o: Obj) -> usize {
        c.obj_offset.partition_point(|&off| off <= o) - 1
    }

    fn coproduct_part_of_mor(c: &Coproduct, m: Mor) -> usize {
        c.mor_offset.partition_point(|&off| off <= m) - 1
    }

    pub fn src(&self, m: Mor) -> Obj {
        match &self.0.repr {
            Repr::Table(t) => t.src[m],
            Repr::Opposite(g) => g.dst(m),
            Repr::Product(a, b) => {
                let (x, y) = self.split_mor(m);
                a.src(x) * b.num_objects() + b.src(y)
            }
            Repr::Coproduct(c) => {
                let i = Self::coproduct_part_of_mor(c, m);
                c.parts[i].src(m - c.mor_offset[i]) + c.obj_offset[i]
            }
        }
    }

    pub fn dst(&self, m: Mor) -> Obj {
        match &self.0.repr {
            Repr::Table(t) => t.dst[m],
            Repr::Opposite(g) => g.src(m),
            Repr::Product(a, b) => {
                let (x, y) = self.split_mor(m);
                a.dst(x) * b.num_objects() + b.dst(y)
            }
            Repr::Coproduct(c) => {
                let i = Self::coproduct_part_of_mor(c, m);
                c.parts[i].dst(m - c.mor_offset[i]) + c.obj_offset[i]
            }
        }
    }

    /// `m1;m2` for composable morphisms; panics otherwise. Use [`Groupoid::compose`]
    /// for checked composition.
    pub fn mul(&self, m1: Mor, m2: Mor) -> Mor {
        match &self.0.repr {
            Repr::Table(t) => {
                let r = t.compose[m1 * t.src.len() + m2];
                assert!(r != NONE, "morphisms {m1} and {m2} are not composable");
                r
            }
            Repr::Opposite(g) => g.mul(m2, m1),
            Repr::Product(a, b) => {
                let (x1, y1) = self.split_mor(m1);
                let (x2, y2) = self.split_mor(m2);
                a.mul(x1, x2) * b.num_morphisms() + b.mul(y1, y2)
            }
            Repr::Coproduct(c) => {
                let i = Self::coproduct_part_of_mor(c, m1);
                let j = Self::coproduct_part_of_mor(c, m2);
                assert_eq!(i, j, "morphisms in different coproduct parts");
                c.parts[i].mul(m1 - c.mor_offset[i], m2 - c.mor_offset[i]) + c.mor_offset[i]
            }
        }
    }

    pub fn compose(&self, m1: Mor, m2: Mor) -> Result<Mor> {
        if m1 >= self.num_morphisms() || m2 >= self.num_morphisms() {
            return domain(format!("unknown morphism in compose({m1}, {m2})"));
        }
        if self.dst(m1) != self.src(m2) {
            return domain(format!(
                "cannot compose {} ; {}: target {} differs from source {}",
                self.label(m1),
                self.label(m2),
                self.dst(m1),
                self.src(m2)
            ));
        }
        Ok(self.mul(m1, m2))
    }

    pub fn identity(&self, o: Obj) -> Mor {
        match &self.0.repr {
            Repr::Table(t) => t.identity[o],
            Repr::Opposite(g) => g.identity(o),
            Repr::Product(a, b) => {
                let (x, y) = self.split_obj(o);
                a.identity(x) * b.num_morphisms() + b.identity(y)
            }
            Repr::Coproduct(c) => {
                let i = Self::coproduct_part_of_obj(c, o);
                c.parts[i].identity(o - c.obj_offset[i]) + c.mor_offset[i]
            }
        }
    }

    pub fn inverse(&self, m: Mor) -> Mor {
        match &self.0.repr {
            Repr::Table(t) => t.inverse[m],
            Repr::Opposite(g) => g.inverse(m),
            Repr::Product(a, b) => {
                let (x, y) = self.split_mor(m);
                a.inverse(x) * b.num_morphisms() + b.inverse(y)
            }
            Repr::Coproduct(c) => {
                let i = Self::coproduct_part_of_mor(c, m);
                c.parts[i].inverse(m - c.mor_offset[i]) + c.mor_offset[i]
            }
        }
    }

    pub fn is_identity(&self, m: Mor) -> bool {
        self.identity(self.src(m)) == m
    }

    /// `m^k` for an endomorphism (k may be zero).
    pub fn power(&self, m: Mor, k: usize) -> Mor {
        let mut acc = self.identity(self.src(m));
        for _ in 0..k {
            acc = self.mul(acc, m);
        }
        acc
    }

    /// Order of an endomorphism.
    pub fn order(&self, m: Mor) -> usize {
        let id = self.identity(self.src(m));
        let mut acc = m;
        let mut k = 1;
        while acc != id {
            acc = self.mul(acc, m);
            k += 1;
        }
        k
    }

    /// Morphisms `a → b` in increasing id order.
    pub fn hom(&self, a: Obj, b: Obj) -> Vec<Mor> {
        match &self.0.repr {
            Repr::Table(t) => t.hom[a * t.object_names.len() + b].clone(),
            Repr::Opposite(g) => g.hom(b, a),
            Repr::Product(l, r) => {
                let (a1, a2) = self.split_obj(a);
                let (b1, b2) = self.split_obj(b);
                let right = r.hom(a2, b2);
                let nr = r.num_morphisms();
                let mut out = Vec::with_capacity(right.len() * 4);
                for x in l.hom(a1, b1) {
                    out.extend(right.iter().map(|&y| x * nr + y));
                }
                out
            }
            Repr::Coproduct(c) => {
                let i = Self::coproduct_part_of_obj(c, a);
                let j = Self::coproduct_part_of_obj(c, b);
                if i != j {
                    return Vec::new();
                }
                c.parts[i]
                    .hom(a - c.obj_offset[i], b - c.obj_offset[i])
                    .into_iter()
                    .map(|m| m + c.mor_offset[i])
                    .collect()
            }
        }
    }

    pub fn end(&self, a: Obj) -> Vec<Mor> {
        self.hom(a, a)
    }

    /// Some morphism `a → b`, if the objects are isomorphic (the least one).
    pub fn connecting(&self, a: Obj, b: Obj) -> Option<Mor> {
        match &self.0.repr {
            Repr::Table(t) => t.hom[a * t.object_names.len() + b].first().copied(),
            Repr::Opposite(g) => g.connecting(b, a),
            Repr::Product(l, r) => {
                let (a1, a2) = self.split_obj(a);
                let (b1, b2) = self.split_obj(b);
                Some(l.connecting(a1, b1)? * r.num_morphisms() + r.connecting(a2, b2)?)
            }
            Repr::Coproduct(c) => {
                let i = Self::coproduct_part_of_obj(c, a);
                let j = Self::coproduct_part_of_obj(c, b);
                if i != j {
                    return None;
                }
                Some(c.parts[i].connecting(a - c.obj_offset[i], b - c.obj_offset[i])? + c.mor_offset[i])
            }
        }
    }

    pub fn iso_classes(&self) -> &IsoClasses {
        self.0.classes.get_or_init(|| self.compute_classes())
    }

    fn compute_classes(&self) -> IsoClasses {
        match &self.0.repr {
            Repr::Table(t) => {
                let n = t.object_names.len();
                let mut uf = UnionFind::new(n);
                for m in 0..t.src.len() {
                    uf.union(t.src[m], t.dst[m]);
                }
                let mut class_of = vec![NONE; n];
                let mut reps = Vec::new();
                let mut root_class: HashMap<usize, usize> = HashMap::new();
                for (o, slot) in class_of.iter_mut().enumerate() {
                    let root = uf.find(o);
                    let c = *root_class.entry(root).or_insert_with(|| {
                        reps.push(o);
                        reps.len() - 1
                    });
                    *slot = c;
                }
                IsoClasses { class_of, reps }
            }
            Repr::Opposite(g) => g.iso_classes().clone(),
            Repr::Product(a, b) => {
                let (ca, cb) = (a.iso_classes(), b.iso_classes());
                let nb = b.num_objects();
                let class_of = (0..self.num_objects())
                    .map(|o| ca.class_of[o / nb] * cb.len() + cb.class_of[o % nb])
                    .collect();
                let reps = ca
                    .reps
                    .iter()
                    .flat_map(|&x| cb.reps.iter().map(move |&y| x * nb + y))
                    .collect();
                IsoClasses { class_of, reps }
            }
            Repr::Coproduct(c) => {
                let mut class_of = Vec::with_capacity(self.num_objects());
                let mut reps = Vec::new();
                for (i, p) in c.parts.iter().enumerate() {
                    let pc = p.iso_classes();
                    let base = reps.len();
                    class_of.extend(pc.class_of.iter().map(|&k| k + base));
                    reps.extend(pc.reps.iter().map(|&r| r + c.obj_offset[i]));
                }
                IsoClasses { class_of, reps }
            }
        }
    }

    pub fn label(&self, m: Mor) -> String {
        match &self.0.repr {
            Repr::Table(t) => t.labels[m].clone(),
            Repr::Opposite(g) => g.label(m),
            Repr::Product(a, b) => {
                let (x, y) = self.split_mor(m);
                format!("({},{})", a.label(x), b.label(y))
            }
            Repr::Coproduct(c) => {
                let i = Self::coproduct_part_of_mor(c, m);
                format!("in{i}:{}", c.parts[i].label(m - c.mor_offset[i]))
            }
        }
    }

    pub fn object_name(&self, o: Obj) -> String {
        match &self.0.repr {
            Repr::Table(t) => t.object_names[o].clone(),
            Repr::Opposite(g) => g.object_name(o),
            Repr::Product(a, b) => {
                let (x, y) = self.split_obj(o);
                format!("({},{})", a.object_name(x), b.object_name(y))
            }
            Repr::Coproduct(c) => {
                let i = Self::coproduct_part_of_obj(c, o);
                format!("in{i}:{}", c.parts[i].object_name(o - c.obj_offset[i]))
            }
        }
    }

    /// Looks up a morphism by its label (e.g. `"(12)"` in a permutation group).
    pub fn morphism_by_label(&self, label: &str) -> Option<Mor> {
        (0..self.num_morphisms()).find(|&m| self.label(m) == label)
    }

    /// Materializes this groupoid as a plain table (useful for serialization).
    pub fn to_table(&self) -> Groupoid {
        if matches!(self.0.repr, Repr::Table(_)) {
            return self.clone();
        }
        let n = self.num_morphisms();
        let endpoints: Vec<(Obj, Obj)> = (0..n).map(|m| (self.src(m), self.dst(m))).collect();
        let mut triples = Vec::new();
        for a in 0..n {
            for o in 0..self.num_objects() {
                for b in self.hom(self.dst(a), o) {
                    triples.push((a, b, self.mul(a, b)));
                }
            }
        }
        Groupoid::from_table(
            (0..self.num_objects()).map(|o| self.object_name(o)).collect(),
            endpoints,
            &triples,
            Some((0..n).map(|m| self.label(m)).collect()),
        )
        .expect("structural groupoids satisfy the axioms")
    }
}

impl PartialEq for Groupoid {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (&self.0.repr, &other.0.repr) {
            (Repr::Table(a), Repr::Table(b)) => {
                a.object_names.len() == b.object_names.len()
                    && a.src == b.src
                    && a.dst == b.dst
                    && a.compose == b.compose
            }
            (Repr::Opposite(a), Repr::Opposite(b)) => a == b,
            (Repr::Product(a1, a2), Repr::Product(b1, b2)) => a1 == b1 && a2 == b2,
            (Repr::Coproduct(a), Repr::Coproduct(b)) => a.parts == b.parts,
            _ => false,
        }
    }
}

impl Eq for Groupoid {}

impl fmt::Debug for Groupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.repr {
            Repr::Table(t) => write!(f, "Table({} objects, {} morphisms)", t.object_names.len(), t.src.len()),
            Repr::Opposite(g) => write!(f, "Op({g:?})"),
            Repr::Product(a, b) => write!(f, "({a:?} x {b:?})"),
            Repr::Coproduct(c) => write!(f, "Sum{:?}", c.parts),
        }
    }
}

fn cycle_notation(p: &[usize]) -> String {
    let wide = p.len() > 9;
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push((x + 1).to_string());
            x = p[x];
        }
        out.push('(');
        out.push_str(&cycle.join(if wide { " " } else { "" }));
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

/// Endomorphism group at one object, re-indexed densely for fast arithmetic.
#[derive(Clone, Debug)]
pub struct LocalGroup {
    pub obj: Obj,
    pub elems: Vec<Mor>,
    index: HashMap<Mor, usize>,
    table: Vec<u32>,
    inv: Vec<u32>,
    pub id: usize,
}

impl LocalGroup {
    pub fn new(g: &Groupoid, obj: Obj) -> Self {
        let elems = g.end(obj);
        let index: HashMap<Mor, usize> = elems.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let n = elems.len();
        let mut table = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                table[i * n + j] = index[&g.mul(elems[i], elems[j])] as u32;
            }
        }
        let inv = elems.iter().map(|&m| index[&g.inverse(m)] as u32).collect();
        let id = index[&g.identity(obj)];
        LocalGroup {
            obj,
            elems,
            index,
            table,
            inv,
            id,
        }
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn local(&self, m: Mor) -> usize {
        self.index[&m]
    }

    pub fn try_local(&self, m: Mor) -> Option<usize> {
        self.index.get(&m).copied()
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i * self.elems.len() + j] as usize
    }

    pub fn inv(&self, i: usize) -> usize {
        self.inv[i] as usize
    }

    pub fn power(&self, i: usize, k: usize) -> usize {
        (0..k).fold(self.id, |acc, _| self.mul(acc, i))
    }

    /// All powers `i^0, i^1, …` up to (excluding) the first repeat of the identity.
    pub fn powers(&self, i: usize) -> Vec<usize> {
        let mut out = vec![self.id];
        let mut acc = i;
        while acc != self.id {
            out.push(acc);
            acc = self.mul(acc, i);
        }
        out
    }

    pub fn element_order(&self, i: usize) -> usize {
        self.powers(i).len()
    }

    /// Subgroup generated by local indices, as a membership mask.
    pub fn closure(&self, gens: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.order()];
        mask[self.id] = true;
        let mut queue = VecDeque::from([self.id]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !mask[y] {
                    mask[y] = true;
                    queue.push_back(y);
                }
            }
        }
        mask
    }

    pub fn to_subgroup(&self, mask: &[bool]) -> Subgroup {
        let mut elems: Vec<Mor> = mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| self.elems[i])
            .collect();
        elems.sort_unstable();
        Subgroup { obj: self.obj, elems }
    }

    pub fn mask_of(&self, s: &Subgroup) -> Vec<bool> {
        let mut mask = vec![false; self.order()];
        for &m in &s.elems {
            mask[self.local(m)] = true;
        }
        mask
    }
}

/// A subgroup of the endomorphism group at `obj`; elements sorted by id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    pub obj: Obj,
    pub elems: Vec<Mor>,
}

impl Subgroup {
    /// Validates closure and sorts the elements.
    pub fn new(g: &Groupoid, obj: Obj, elems: impl IntoIterator<Item = Mor>) -> Result<Self> {
        let set: BTreeSet<Mor> = elems.into_iter().collect();
        for &m in &set {
            if m >= g.num_morphisms() || g.src(m) != obj || g.dst(m) != obj {
                return validation(format!("{} is not an endomorphism of object {obj}", m));
            }
        }
        if !set.contains(&g.identity(obj)) {
            return validation("subgroup must contain the identity");
        }
        for &a in &set {
            if !set.contains(&g.inverse(a)) {
                return validation(format!("subgroup not closed under inverse at {}", g.label(a)));
            }
            for &b in &set {
                if !set.contains(&g.mul(a, b)) {
                    return validation(format!(
                        "subgroup not closed under composition at {} ; {}",
                        g.label(a),
                        g.label(b)
                    ));
                }
            }
        }
        Ok(Subgroup {
            obj,
            elems: set.into_iter().collect(),
        })
    }

    pub fn trivial(g: &Groupoid, obj: Obj) -> Self {
        Subgroup {
            obj,
            elems: vec![g.identity(obj)],
        }
    }

    pub fn full(g: &Groupoid, obj: Obj) -> Self {
        Subgroup { obj, elems: g.end(obj) }
    }

    /// Subgroup generated by the given endomorphisms at `obj`.
    pub fn generated(g: &Groupoid, obj: Obj, gens: &[Mor]) -> Self {
        let mut set: BTreeSet<Mor> = BTreeSet::from([g.identity(obj)]);
        let mut queue = VecDeque::from([g.identity(obj)]);
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = g.mul(x, s);
                if set.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        Subgroup {
            obj,
            elems: set.into_iter().collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn contains(&self, m: Mor) -> bool {
        self.elems.binary_search(&m).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.obj == other.obj && self.elems.iter().all(|&m| other.contains(m))
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        Subgroup {
            obj: self.obj,
            elems: self.elems.iter().copied().filter(|&m| other.contains(m)).collect(),
        }
    }
}

/// `{β⁻¹;α;β | α ∈ G}` at the target of `β`.
pub fn conjugate_subgroup(g: &Groupoid, sub: &Subgroup, beta: Mor) -> Result<Subgroup> {
    if beta >= g.num_morphisms() || g.src(beta) != sub.obj {
        return domain("conjugating morphism does not start at the subgroup's object");
    }
    let inv = g.inverse(beta);
    let mut elems: Vec<Mor> = sub.elems.iter().map(|&a| g.mul(g.mul(inv, a), beta)).collect();
    elems.sort_unstable();
    Ok(Subgroup {
        obj: g.dst(beta),
        elems,
    })
}

/// A morphism `β: G.obj → H.obj` with `β⁻¹ G β = H`, if one exists.
pub fn is_conjugate(g: &Groupoid, a: &Subgroup, b: &Subgroup) -> Option<Mor> {
    if a.order() != b.order() {
        return None;
    }
    g.hom(a.obj, b.obj).into_iter().find(|&beta| {
        let inv = g.inverse(beta);
        a.elems.iter().all(|&x| b.contains(g.mul(g.mul(inv, x), beta)))
    })
}

/// All subgroups of the endomorphism group at `obj`, ordered by (order, elements).
pub fn subgroups(g: &Groupoid, obj: Obj, bound: usize) -> Result<Vec<Subgroup>> {
    let size = g.end(obj).len();
    if size > bound {
        return Err(Error::Resource(format!(
            "endomorphism group of order {size} exceeds the enumeration bound {bound}"
        )));
    }
    let local = LocalGroup::new(g, obj);
    let mut all: Vec<Subgroup> = subgroups_local(&local).iter().map(|mask| local.to_subgroup(mask)).collect();
    all.sort_by(|x, y| x.order().cmp(&y.order()).then_with(|| x.elems.cmp(&y.elems)));
    Ok(all)
}

/// Subgroup masks of a local group: every subgroup is a join of cyclic ones.
pub fn subgroups_local(local: &LocalGroup) -> Vec<Vec<bool>> {
    let n = local.order();
    let mut seen: HashMap<Vec<bool>, Vec<usize>> = HashMap::new();
    let mut cyclic: Vec<(Vec<bool>, usize)> = Vec::new();
    for i in 0..n {
        let mask = local.closure(&[i]);
        if !seen.contains_key(&mask) {
            seen.insert(mask.clone(), vec![i]);
            cyclic.push((mask, i));
        }
    }
    let mut frontier: Vec<Vec<bool>> = cyclic.iter().map(|c| c.0.clone()).collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for h in &frontier {
            let gens = seen[h].clone();
            for (c, gen) in &cyclic {
                if c.iter().zip(h).all(|(&x, &y)| !x || y) {
                    continue;
                }
                let mut all = gens.clone();
                all.push(*gen);
                let joined = local.closure(&all);
                if !seen.contains_key(&joined) {
                    seen.insert(joined.clone(), all);
                    next.push(joined);
                }
            }
        }
        frontier = next;
    }
    seen.into_keys().collect()
}

/// A functor between finite groupoids given by explicit maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupoidFunctor {
    pub source: Groupoid,
    pub target: Groupoid,
    pub obj_map: Vec<Obj>,
    pub mor_map: Vec<Mor>,
}

impl GroupoidFunctor {
    pub fn new(source: Groupoid, target: Groupoid, obj_map: Vec<Obj>, mor_map: Vec<Mor>) -> Result<Self> {
        let f = GroupoidFunctor {
            source,
            target,
            obj_map,
            mor_map,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn identity(g: &Groupoid) -> Self {
        GroupoidFunctor {
            source: g.clone(),
            target: g.clone(),
            obj_map: (0..g.num_objects()).collect(),
            mor_map: (0..g.num_morphisms()).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (s, t) = (&self.source, &self.target);
        if self.obj_map.len() != s.num_objects() || self.mor_map.len() != s.num_morphisms() {
            return validation("functor maps have the wrong length");
        }
        if self.obj_map.iter().any(|&o| o >= t.num_objects()) || self.mor_map.iter().any(|&m| m >= t.num_morphisms())
        {
            return validation("functor maps into unknown objects or morphisms");
        }
        for m in 0..s.num_morphisms() {
            let fm = self.mor_map[m];
            if t.src(fm) != self.obj_map[s.src(m)] || t.dst(fm) != self.obj_map[s.dst(m)] {
                return validation(format!("functor does not preserve endpoints of morphism {m}"));
            }
        }
        for o in 0..s.num_objects() {
            if self.mor_map[s.identity(o)] != t.identity(self.obj_map[o]) {
                return validation(format!("functor does not preserve the identity at {o}"));
            }
        }
        for a in 0..s.num_morphisms() {
            for o in 0..s.num_objects() {
                for b in s.hom(s.dst(a), o) {
                    if self.mor_map[s.mul(a, b)] != t.mul(self.mor_map[a], self.mor_map[b]) {
                        return validation(format!("functor does not preserve composition of ({a},{b})"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn obj(&self, o: Obj) -> Obj {
        self.obj_map[o]
    }

    pub fn mor(&self, m: Mor) -> Mor {
        self.mor_map[m]
    }

    /// `self` then `next`.
    pub fn then(&self, next: &GroupoidFunctor) -> Result<Self> {
        if self.target != next.source {
            return domain("functors are not composable");
        }
        Ok(GroupoidFunctor {
            source: self.source.clone(),
            target: next.target.clone(),
            obj_map: self.obj_map.iter().map(|&o| next.obj_map[o]).collect(),
            mor_map: self.mor_map.iter().map(|&m| next.mor_map[m]).collect(),
        })
    }

    pub fn opposite(&self) -> Self {
        GroupoidFunctor {
            source: self.source.opposite(),
            target: self.target.opposite(),
            obj_map: self.obj_map.clone(),
            mor_map: self.mor_map.clone(),
        }
    }

    pub fn product(&self, other: &GroupoidFunctor) -> Self {
        let source = self.source.product(&other.source);
        let target = self.target.product(&other.target);
        let obj_map = (0..source.num_objects())
            .map(|o| {
                let (a, b) = source.split_obj(o);
                target.pair_obj(self.obj_map[a], other.obj_map[b])
            })
            .collect();
        let mor_map = (0..source.num_morphisms())
            .map(|m| {
                let (a, b) = source.split_mor(m);
                target.pair_mor(self.mor_map[a], other.mor_map[b])
            })
            .collect();
        GroupoidFunctor {
            source,
            target,
            obj_map,
            mor_map,
        }
    }

    pub fn is_injective_on_morphisms(&self) -> bool {
        let set: BTreeSet<Mor> = self.mor_map.iter().copied().collect();
        set.len() == self.mor_map.len()
    }
}

/// All group homomorphisms between two groups (single-object groupoids), as functors.
pub fn homomorphisms(source: &Groupoid, target: &Groupoid) -> Result<Vec<GroupoidFunctor>> {
    if !source.is_group() || !target.is_group() {
        return domain("homomorphisms() expects groups");
    }
    let sl = LocalGroup::new(source, 0);
    let tl = LocalGroup::new(target, 0);
    // Greedy generating set.
    let mut gens = Vec::new();
    let mut span = sl.closure(&[]);
    for i in 0..sl.order() {
        if !span[i] {
            gens.push(i);
            span = sl.closure(&gens);
        }
    }
    let mut out = Vec::new();
    let mut images = vec![0usize; gens.len()];
    loop {
        if let Some(map) = extend_homomorphism(&sl, &tl, &gens, &images) {
            out.push(GroupoidFunctor {
                source: source.clone(),
                target: target.clone(),
                obj_map: vec![0],
                mor_map: (0..sl.order()).map(|i| tl.elems[map[i]]).collect(),
            });
        }
        let mut k = 0;
        loop {
            if k == images.len() {
                return Ok(out);
            }
            images[k] += 1;
            if images[k] < tl.order() {
                break;
            }
            images[k] = 0;
            k += 1;
        }
    }
}

fn extend_homomorphism(sl: &LocalGroup, tl: &LocalGroup, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
    let mut map = vec![usize::MAX; sl.order()];
    map[sl.id] = tl.id;
    let mut queue = VecDeque::from([sl.id]);
    while let Some(x) = queue.pop_front() {
        for (k, &g) in gens.iter().enumerate() {
            let y = sl.mul(x, g);
            let fy = tl.mul(map[x], images[k]);
            if map[y] == usize::MAX {
                map[y] = fy;
                queue.push_back(y);
            } else if map[y] != fy {
                return None;
            }
        }
    }
    for a in 0..sl.order() {
        for b in 0..sl.order() {
            if map[sl.mul(a, b)] != tl.mul(map[a], map[b]) {
                return None;
            }
        }
    }
    Some(map)
}

/// Parses the groupoid JSON format (explicit tables or group shorthands).
pub fn groupoid_from_json(v: &Value) -> Result<Groupoid> {
    if let Some(gr) = v.get("group") {
        if let Some(c) = gr.get("cayley") {
            let rows: Vec<Vec<usize>> = serde_json::from_value(c.clone())
                .map_err(|e| Error::Validation(format!("cayley table: {e}")))?;
            return Groupoid::group_from_cayley(&rows, None);
        }
        if let Some(p) = gr.get("perm_gens") {
            let gens: Vec<Vec<usize>> = serde_json::from_value(p.clone())
                .map_err(|e| Error::Validation(format!("perm_gens: {e}")))?;
            return Groupoid::group_from_perms(&gens);
        }
        if let Some(n) = gr.get("cyclic").and_then(Value::as_u64) {
            return Ok(Groupoid::cyclic(n as usize));
        }
        return validation("group shorthand needs \"cayley\", \"perm_gens\" or \"cyclic\"");
    }
    let objects = v
        .get("objects")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Validation("groupoid JSON needs an \"objects\" array".into()))?;
    let names: Vec<String> = objects
        .iter()
        .map(|o| match o {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        })
        .collect();
    let morphisms = v
        .get("morphisms")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Validation("groupoid JSON needs a \"morphisms\" array".into()))?;
    let mut endpoints = vec![None; morphisms.len()];
    let mut labels = vec![String::new(); morphisms.len()];
    for m in morphisms {
        let field = |k: &str| {
            m.get(k)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| Error::Validation(format!("morphism entry {m} lacks \"{k}\"")))
        };
        let id = field("id")?;
        if id >= endpoints.len() || endpoints[id].is_some() {
            return validation(format!("morphism ids must be a permutation of 0..{}", endpoints.len()));
        }
        endpoints[id] = Some((field("src")?, field("dst")?));
        labels[id] = m.get("label").and_then(Value::as_str).map_or(id.to_string(), str::to_string);
    }
    let endpoints: Vec<(Obj, Obj)> = endpoints.into_iter().map(|e| e.expect("filled above")).collect();
    let triples: Vec<(Mor, Mor, Mor)> = serde_json::from_value::<Vec<[usize; 3]>>(
        v.get("compose").cloned().unwrap_or(Value::Array(vec![])),
    )
    .map_err(|e| Error::Validation(format!("compose table: {e}")))?
    .into_iter()
    .map(|[a, b, c]| (a, b, c))
    .collect();
    Groupoid::from_table(names, endpoints, &triples, Some(labels))
}

pub fn groupoid_to_json(g: &Groupoid) -> Value {
    let morphisms: Vec<Value> = (0..g.num_morphisms())
        .map(|m| json!({"id": m, "src": g.src(m), "dst": g.dst(m), "label": g.label(m)}))
        .collect();
    let mut compose = Vec::new();
    for a in 0..g.num_morphisms() {
        for o in 0..g.num_objects() {
            for b in g.hom(g.dst(a), o) {
                compose.push(json!([a, b, g.mul(a, b)]));
            }
        }
    }
    json!({
        "objects": (0..g.num_objects()).map(|o| g.object_name(o)).collect::<Vec<_>>(),
        "morphisms": morphisms,
        "compose": compose,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_ids_are_arithmetic() {
        let g = Groupoid::cyclic(2).product(&Groupoid::cyclic(3));
        assert_eq!(g.num_morphisms(), 6);
        assert_eq!(g.pair_mor(1, 2), 5);
        assert_eq!(g.split_mor(5), (1, 2));
        assert_eq!(g.mul(g.pair_mor(1, 1), g.pair_mor(1, 2)), g.pair_mor(0, 0));
    }

    #[test]
    fn coproduct_homs_stay_inside_parts() {
        let g = Groupoid::coproduct(&[Groupoid::cyclic(3), Groupoid::trivial()]);
        assert!(g.hom(0, 1).is_empty());
        assert_eq!(g.end(1), vec![3]);
        assert_eq!(g.identity(1), 3);
    }

    #[test]
    fn cycle_notation_labels() {
        assert_eq!(cycle_notation(&[1, 0, 2]), "(12)");
        assert_eq!(cycle_notation(&[0, 1, 2]), "()");
        assert_eq!(cycle_notation(&[1, 2, 0]), "(123)");
    }
}
