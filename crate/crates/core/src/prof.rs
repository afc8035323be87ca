//! Finite profunctors `𝔸 ⇸ 𝔹` in orbit normal form.
//!
//! A profunctor is a right action of the groupoid `𝔸ᵒᵖ × 𝔹` (called `cat` here) on
//! a finite set. It is stored as a list of orbits, each an object of `cat` at an
//! iso-class representative together with a stabilizer subgroup. An element is a
//! right coset `G;m` of the orbit's stabilizer, named by its least member.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde_json::{json, Value};

use crate::error::{domain, validation, Error, Result};
use crate::grpd::{
    conjugate_subgroup, groupoid_from_json, groupoid_to_json, is_conjugate, Groupoid, GroupoidFunctor, Mor, Obj,
    Subgroup,
};
use crate::union_find::UnionFind;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    /// Object of `cat`, always an iso-class representative.
    pub base: Obj,
    /// Stabilizer of the orbit's base element, a subgroup of `cat(base, base)`.
    pub stab: Subgroup,
}

/// Element `stab;rep` of orbit `orbit`, where `rep: base → object of the element`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem {
    pub orbit: usize,
    pub rep: Mor,
}

#[derive(Clone, Debug)]
pub struct Profunctor {
    src: Groupoid,
    dst: Groupoid,
    cat: Groupoid,
    orbits: Vec<Orbit>,
}

/// Orbit bijection with mediating morphisms: the base element of `P`'s orbit `p`
/// maps to the element `H;mediator` of `Q`'s orbit `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitMatch {
    pub p: usize,
    pub q: usize,
    pub mediator: Mor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoWitness {
    pub matches: Vec<OrbitMatch>,
}

/// A relation between iso-class indices of two groupoids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub src_classes: usize,
    pub dst_classes: usize,
    pub pairs: BTreeSet<(usize, usize)>,
}

impl Relation {
    pub fn then(&self, other: &Relation) -> Relation {
        let mut pairs = BTreeSet::new();
        for &(a, b) in &self.pairs {
            for &(b2, c) in &other.pairs {
                if b == b2 {
                    pairs.insert((a, c));
                }
            }
        }
        Relation {
            src_classes: self.src_classes,
            dst_classes: other.dst_classes,
            pairs,
        }
    }
}

fn cat_of(src: &Groupoid, dst: &Groupoid) -> Groupoid {
    src.opposite().product(dst)
}

impl Profunctor {
    pub fn empty(src: &Groupoid, dst: &Groupoid) -> Self {
        Profunctor {
            src: src.clone(),
            dst: dst.clone(),
            cat: cat_of(src, dst),
            orbits: Vec::new(),
        }
    }

    /// Builds `∐ ⟨Gᵢ⟩`; bases not at representatives are transported there.
    pub fn from_orbits(src: &Groupoid, dst: &Groupoid, orbits: Vec<(Obj, Subgroup)>) -> Result<Self> {
        let cat = cat_of(src, dst);
        let mut out = Vec::with_capacity(orbits.len());
        for (base, stab) in orbits {
            if base >= cat.num_objects() || stab.obj != base {
                return domain("orbit stabilizer does not live at the orbit base");
            }
            let rep = cat.iso_classes().rep_of(base);
            let stab = if rep == base {
                stab
            } else {
                let to = cat.connecting(rep, base).expect("representative is isomorphic");
                conjugate_subgroup(&cat, &stab, cat.inverse(to))?
            };
            out.push(Orbit { base: rep, stab });
        }
        Ok(Profunctor {
            src: src.clone(),
            dst: dst.clone(),
            cat,
            orbits: out,
        })
    }

    /// The induced profunctor `⟨G⟩` for `G ≤ 𝔸ᵒᵖ(a,a) × 𝔹(b,b)`, given as pairs.
    pub fn induced(src: &Groupoid, dst: &Groupoid, a: Obj, b: Obj, pairs: &[(Mor, Mor)]) -> Result<Self> {
        let cat = cat_of(src, dst);
        if a >= src.num_objects() || b >= dst.num_objects() {
            return domain("base object out of range");
        }
        let base = cat.pair_obj(a, b);
        let stab = Subgroup::new(&cat, base, pairs.iter().map(|&(x, y)| cat.pair_mor(x, y)))?;
        Self::from_orbits(src, dst, vec![(base, stab)])
    }

    /// Orbit decomposition of an explicitly given action of `cat` on `0..objs.len()`;
    /// `act(x, m)` must be defined whenever `m` starts at `objs[x]`.
    pub fn from_action(src: &Groupoid, dst: &Groupoid, objs: &[Obj], act: impl Fn(usize, Mor) -> usize) -> Self {
        let cat = cat_of(src, dst);
        let classes = cat.iso_classes().clone();
        let mut class_members: Vec<Vec<Obj>> = vec![Vec::new(); classes.len()];
        for o in 0..cat.num_objects() {
            class_members[classes.class_of[o]].push(o);
        }
        let mut visited = vec![false; objs.len()];
        let mut orbits = Vec::new();
        for x in 0..objs.len() {
            if visited[x] {
                continue;
            }
            let class = classes.class_of[objs[x]];
            let rep = classes.reps[class];
            let mut base_elem = usize::MAX;
            for &c in &class_members[class] {
                for m in cat.hom(objs[x], c) {
                    let y = act(x, m);
                    visited[y] = true;
                    if c == rep {
                        base_elem = base_elem.min(y);
                    }
                }
            }
            let stab_elems: Vec<Mor> = cat.end(rep).into_iter().filter(|&m| act(base_elem, m) == base_elem).collect();
            orbits.push(Orbit {
                base: rep,
                stab: Subgroup {
                    obj: rep,
                    elems: stab_elems,
                },
            });
        }
        Profunctor {
            src: src.clone(),
            dst: dst.clone(),
            cat,
            orbits,
        }
    }

    pub fn src(&self) -> &Groupoid {
        &self.src
    }

    pub fn dst(&self) -> &Groupoid {
        &self.dst
    }

    /// The acting groupoid `src ᵒᵖ × dst`.
    pub fn cat(&self) -> &Groupoid {
        &self.cat
    }

    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    pub fn orbit_decompose(&self) -> Vec<Orbit> {
        self.orbits.clone()
    }

    pub fn rebuild(src: &Groupoid, dst: &Groupoid, orbits: &[Orbit]) -> Result<Self> {
        Self::from_orbits(src, dst, orbits.iter().map(|o| (o.base, o.stab.clone())).collect())
    }

    pub fn cat_obj(&self, a: Obj, b: Obj) -> Obj {
        self.cat.pair_obj(a, b)
    }

    pub fn cat_mor(&self, alpha: Mor, beta: Mor) -> Mor {
        self.cat.pair_mor(alpha, beta)
    }

    pub fn split_obj(&self, o: Obj) -> (Obj, Obj) {
        self.cat.split_obj(o)
    }

    pub fn split_mor(&self, m: Mor) -> (Mor, Mor) {
        self.cat.split_mor(m)
    }

    /// Object of `cat` over which the element lies.
    pub fn elem_obj(&self, x: Elem) -> Obj {
        self.cat.dst(x.rep)
    }

    /// `(a, b)` with `x ∈ P(a, b)`.
    pub fn elem_ab(&self, x: Elem) -> (Obj, Obj) {
        self.split_obj(self.elem_obj(x))
    }

    /// Canonical name of the coset `stab;m`.
    pub fn canon(&self, orbit: usize, m: Mor) -> Elem {
        let stab = &self.orbits[orbit].stab;
        let rep = stab.elems.iter().map(|&g| self.cat.mul(g, m)).min().expect("stabilizer is nonempty");
        Elem { orbit, rep }
    }

    pub fn base_element(&self, orbit: usize) -> Elem {
        self.canon(orbit, self.cat.identity(self.orbits[orbit].base))
    }

    /// Action by a morphism of `cat` starting at the element's object (unchecked).
    pub fn act_cat(&self, x: Elem, m: Mor) -> Elem {
        self.canon(x.orbit, self.cat.mul(x.rep, m))
    }

    /// `α · x · β` for `α: a′ → a` in the source and `β: b → b′` in the target.
    pub fn act(&self, alpha: Mor, x: Elem, beta: Mor) -> Result<Elem> {
        if x.orbit >= self.orbits.len() || x.rep >= self.cat.num_morphisms() {
            return domain("unknown element");
        }
        let (a, b) = self.elem_ab(x);
        if alpha >= self.src.num_morphisms() || self.src.dst(alpha) != a {
            return domain("left morphism does not end at the element's source object");
        }
        if beta >= self.dst.num_morphisms() || self.dst.src(beta) != b {
            return domain("right morphism does not start at the element's target object");
        }
        Ok(self.act_cat(x, self.cat_mor(alpha, beta)))
    }

    /// `fix(x)` as a subgroup of `cat` at the element's object.
    pub fn stabilizer(&self, x: Elem) -> Subgroup {
        conjugate_subgroup(&self.cat, &self.orbits[x.orbit].stab, x.rep).expect("rep starts at the base")
    }

    /// Elements of the fiber over the `cat` object `c`.
    pub fn fiber_at(&self, c: Obj) -> Vec<Elem> {
        let classes = self.cat.iso_classes();
        let mut out = BTreeSet::new();
        for (i, orbit) in self.orbits.iter().enumerate() {
            if classes.class_of[orbit.base] != classes.class_of[c] {
                continue;
            }
            for m in self.cat.hom(orbit.base, c) {
                out.insert(self.canon(i, m));
            }
        }
        out.into_iter().collect()
    }

    pub fn fiber(&self, a: Obj, b: Obj) -> Vec<Elem> {
        self.fiber_at(self.cat_obj(a, b))
    }

    /// All elements, grouped by orbit.
    pub fn elements(&self) -> Vec<Elem> {
        let classes = self.cat.iso_classes();
        let mut out = Vec::new();
        for (i, orbit) in self.orbits.iter().enumerate() {
            let class = classes.class_of[orbit.base];
            let mut seen = BTreeSet::new();
            for c in (0..self.cat.num_objects()).filter(|&c| classes.class_of[c] == class) {
                for m in self.cat.hom(orbit.base, c) {
                    seen.insert(self.canon(i, m));
                }
            }
            out.extend(seen);
        }
        out
    }

    pub fn num_elements(&self) -> usize {
        self.elements().len()
    }

    /// Fiberwise disjoint union; tags follow list order.
    pub fn sum(src: &Groupoid, dst: &Groupoid, parts: &[Profunctor]) -> Result<Self> {
        let mut orbits = Vec::new();
        for p in parts {
            if &p.src != src || &p.dst != dst {
                return domain("summands have different endpoints");
            }
            orbits.extend(p.orbits.iter().cloned());
        }
        Ok(Profunctor {
            src: src.clone(),
            dst: dst.clone(),
            cat: cat_of(src, dst),
            orbits,
        })
    }

    /// Injection of an element of summand `part` into the sum built from `parts`.
    pub fn sum_injection(parts: &[Profunctor], part: usize, x: Elem) -> Elem {
        let offset: usize = parts[..part].iter().map(|p| p.orbits.len()).sum();
        Elem {
            orbit: x.orbit + offset,
            rep: x.rep,
        }
    }

    /// Pointwise product `P × Q : 𝔸 × ℂ ⇸ 𝔹 × 𝔻`.
    pub fn tensor(&self, other: &Profunctor) -> Result<Self> {
        let src = self.src.product(&other.src);
        let dst = self.dst.product(&other.dst);
        let cat = cat_of(&src, &dst);
        let mut orbits = Vec::new();
        for p in &self.orbits {
            for q in &other.orbits {
                let (a, b) = self.split_obj(p.base);
                let (c, d) = other.split_obj(q.base);
                let base = cat.pair_obj(src.pair_obj(a, c), dst.pair_obj(b, d));
                let mut elems = Vec::with_capacity(p.stab.order() * q.stab.order());
                for &g in &p.stab.elems {
                    let (alpha, beta) = self.split_mor(g);
                    for &h in &q.stab.elems {
                        let (gamma, delta) = other.split_mor(h);
                        elems.push(cat.pair_mor(src.pair_mor(alpha, gamma), dst.pair_mor(beta, delta)));
                    }
                }
                elems.sort_unstable();
                orbits.push((base, Subgroup { obj: base, elems }));
            }
        }
        Self::from_orbits(&src, &dst, orbits)
    }

    /// Hom-profunctor `𝔸(a, b)` with `α · x · β = α;x;β`.
    pub fn identity(g: &Groupoid) -> Self {
        let cat = cat_of(g, g);
        let objs: Vec<Obj> = (0..g.num_morphisms()).map(|x| cat.pair_obj(g.src(x), g.dst(x))).collect();
        Self::from_action(g, g, &objs, |x, m| {
            let (alpha, beta) = cat.split_mor(m);
            g.mul(g.mul(alpha, x), beta)
        })
    }

    /// `η : I ⇸ 𝔸ᵒᵖ × 𝔸` with `η(⋆, (a′, a)) = 𝔸(a′, a)`.
    pub fn unit_eta(g: &Groupoid) -> Self {
        let target = g.opposite().product(g);
        let objs: Vec<Obj> = (0..g.num_morphisms()).map(|x| target.pair_obj(g.src(x), g.dst(x))).collect();
        Self::from_action(&Groupoid::trivial(), &target, &objs, |x, m| {
            let (f_neg, f_pos) = target.split_mor(m);
            g.mul(g.mul(f_neg, x), f_pos)
        })
    }

    /// `ε : 𝔸ᵒᵖ × 𝔸 ⇸ I` with `ε((a′, a), ⋆) = 𝔸(a, a′)`.
    pub fn counit_epsilon(g: &Groupoid) -> Self {
        let source = g.opposite().product(g);
        let objs: Vec<Obj> = (0..g.num_morphisms()).map(|x| source.pair_obj(g.dst(x), g.src(x))).collect();
        Self::from_action(&source, &Groupoid::trivial(), &objs, |x, m| {
            let (f_neg, f_pos) = source.split_mor(m);
            g.mul(g.mul(f_pos, x), f_neg)
        })
    }

    /// `F_* : 𝔸 ⇸ 𝔹` with fibers `𝔹(F a, b)`.
    pub fn functor_lower(f: &GroupoidFunctor) -> Self {
        let (a_g, b_g) = (&f.source, &f.target);
        let cat = cat_of(a_g, b_g);
        let mut elems = Vec::new();
        for a in 0..a_g.num_objects() {
            for b in 0..b_g.num_objects() {
                for x in b_g.hom(f.obj(a), b) {
                    elems.push((a, x));
                }
            }
        }
        let index: HashMap<(Obj, Mor), usize> = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let objs: Vec<Obj> = elems.iter().map(|&(a, x)| cat.pair_obj(a, b_g.dst(x))).collect();
        Self::from_action(a_g, b_g, &objs, |i, m| {
            let (alpha, beta) = cat.split_mor(m);
            let x = elems[i].1;
            index[&(a_g.src(alpha), b_g.mul(b_g.mul(f.mor(alpha), x), beta))]
        })
    }

    /// `F^* : 𝔹 ⇸ 𝔸` with fibers `𝔹(b, F a)`.
    pub fn functor_upper(f: &GroupoidFunctor) -> Self {
        let (a_g, b_g) = (&f.source, &f.target);
        let cat = cat_of(b_g, a_g);
        let mut elems = Vec::new();
        for a in 0..a_g.num_objects() {
            for b in 0..b_g.num_objects() {
                for x in b_g.hom(b, f.obj(a)) {
                    elems.push((a, x));
                }
            }
        }
        let index: HashMap<(Obj, Mor), usize> = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let objs: Vec<Obj> = elems.iter().map(|&(a, x)| cat.pair_obj(b_g.src(x), a)).collect();
        Self::from_action(b_g, a_g, &objs, |i, m| {
            let (beta, alpha) = cat.split_mor(m);
            let x = elems[i].1;
            index[&(a_g.dst(alpha), b_g.mul(b_g.mul(beta, x), f.mor(alpha)))]
        })
    }

    /// Coend composition `P ; Q`.
    pub fn compose(&self, other: &Profunctor) -> Result<Self> {
        self.compose_ordered(other, |v| v)
    }

    /// Coend composition where the enumeration order of `P`'s elements is
    /// permuted first; the result is isomorphic for every permutation.
    pub fn compose_ordered(&self, other: &Profunctor, order: impl Fn(Vec<Elem>) -> Vec<Elem>) -> Result<Self> {
        if self.dst != other.src {
            return domain("composition of profunctors with mismatched middle groupoid");
        }
        let mid = &self.dst;
        let p_elems = order(self.elements());
        let q_elems = other.elements();
        let mut q_by_b: Vec<Vec<Elem>> = vec![Vec::new(); mid.num_objects()];
        for &y in &q_elems {
            q_by_b[other.elem_ab(y).0].push(y);
        }
        let mut pairs: Vec<(Elem, Elem)> = Vec::new();
        for &x in &p_elems {
            for &y in &q_by_b[self.elem_ab(x).1] {
                pairs.push((x, y));
            }
        }
        let index: HashMap<(Elem, Elem), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut uf = UnionFind::new(pairs.len());
        let mid_classes = mid.iso_classes();
        for (i, &(x, y)) in pairs.iter().enumerate() {
            let (a, b) = self.elem_ab(x);
            let (_, c) = other.elem_ab(y);
            let class = mid_classes.class_of[b];
            for b2 in (0..mid.num_objects()).filter(|&o| mid_classes.class_of[o] == class) {
                for beta in mid.hom(b, b2) {
                    let x2 = self.act_cat(x, self.cat_mor(self.src.identity(a), beta));
                    let y2 = other.act_cat(y, other.cat_mor(mid.inverse(beta), other.dst.identity(c)));
                    uf.union(i, index[&(x2, y2)]);
                }
            }
        }
        let mut class_of_root: HashMap<usize, usize> = HashMap::new();
        let mut reps: Vec<usize> = Vec::new();
        let mut class_of = vec![0; pairs.len()];
        for (i, slot) in class_of.iter_mut().enumerate() {
            let root = uf.find(i);
            *slot = *class_of_root.entry(root).or_insert_with(|| {
                reps.push(i);
                reps.len() - 1
            });
        }
        let cat = cat_of(&self.src, &other.dst);
        let objs: Vec<Obj> = reps
            .iter()
            .map(|&i| {
                let (x, y) = pairs[i];
                cat.pair_obj(self.elem_ab(x).0, other.elem_ab(y).1)
            })
            .collect();
        Ok(Self::from_action(&self.src, &other.dst, &objs, |k, m| {
            let (x, y) = pairs[reps[k]];
            let (alpha, gamma) = cat.split_mor(m);
            let b = self.elem_ab(x).1;
            let x2 = self.act_cat(x, self.cat_mor(alpha, mid.identity(b)));
            let y2 = other.act_cat(y, other.cat_mor(mid.identity(b), gamma));
            class_of[index[&(x2, y2)]]
        }))
    }

    /// The relation between iso classes induced by nonempty fibers.
    pub fn truncate(&self) -> Relation {
        let (sc, dc) = (self.src.iso_classes(), self.dst.iso_classes());
        let pairs = self
            .orbits
            .iter()
            .map(|o| {
                let (a, b) = self.split_obj(o.base);
                (sc.class_of[a], dc.class_of[b])
            })
            .collect();
        Relation {
            src_classes: sc.len(),
            dst_classes: dc.len(),
            pairs,
        }
    }

    /// Decides `P ≅ Q` by matching orbits with conjugate stabilizers.
    pub fn is_isomorphic(&self, other: &Profunctor) -> Option<IsoWitness> {
        if self.src != other.src || self.dst != other.dst || self.orbits.len() != other.orbits.len() {
            return None;
        }
        let mut used = vec![false; other.orbits.len()];
        let mut matches = Vec::with_capacity(self.orbits.len());
        for (i, p) in self.orbits.iter().enumerate() {
            let found = other.orbits.iter().enumerate().find_map(|(j, q)| {
                if used[j] || q.base != p.base {
                    return None;
                }
                is_conjugate(&self.cat, &q.stab, &p.stab).map(|m| (j, m))
            });
            let (j, mediator) = found?;
            used[j] = true;
            matches.push(OrbitMatch { p: i, q: j, mediator });
        }
        Some(IsoWitness { matches })
    }

    /// Image of an element of `self` under an isomorphism witness into `other`.
    pub fn apply_iso(&self, other: &Profunctor, w: &IsoWitness, x: Elem) -> Elem {
        let m = w.matches.iter().find(|m| m.p == x.orbit).expect("witness covers every orbit");
        other.canon(m.q, self.cat.mul(m.mediator, x.rep))
    }

    pub fn to_json(&self) -> Value {
        let orbits: Vec<Value> = self
            .orbits
            .iter()
            .map(|o| {
                let (a, b) = self.split_obj(o.base);
                let stab: Vec<[Mor; 2]> = o
                    .stab
                    .elems
                    .iter()
                    .map(|&m| {
                        let (x, y) = self.split_mor(m);
                        [x, y]
                    })
                    .collect();
                json!({"a": a, "b": b, "stab": stab})
            })
            .collect();
        json!({
            "src": groupoid_to_json(&self.src),
            "dst": groupoid_to_json(&self.dst),
            "orbits": orbits,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let src = groupoid_from_json(v.get("src").ok_or_else(|| Error::Validation("missing \"src\"".into()))?)?;
        let dst = groupoid_from_json(v.get("dst").ok_or_else(|| Error::Validation("missing \"dst\"".into()))?)?;
        Self::from_json_with(&src, &dst, v)
    }

    /// Reads only the `"orbits"` list, against known endpoints.
    pub fn from_json_with(src: &Groupoid, dst: &Groupoid, v: &Value) -> Result<Self> {
        #[derive(serde::Deserialize)]
        struct OrbitJson {
            a: Obj,
            b: Obj,
            stab: Vec<[Mor; 2]>,
        }
        let orbits: Vec<OrbitJson> =
            serde_json::from_value(v.get("orbits").cloned().unwrap_or(Value::Array(vec![])))
                .map_err(|e| Error::Validation(format!("orbit list: {e}")))?;
        let cat = cat_of(src, dst);
        let mut list = Vec::new();
        for o in orbits {
            if o.a >= src.num_objects() || o.b >= dst.num_objects() {
                return validation("orbit base out of range");
            }
            let base = cat.pair_obj(o.a, o.b);
            for &[x, y] in &o.stab {
                if x >= src.num_morphisms() || y >= dst.num_morphisms() {
                    return validation("stabilizer pair names an unknown morphism");
                }
            }
            let stab = Subgroup::new(&cat, base, o.stab.iter().map(|&[x, y]| cat.pair_mor(x, y)))?;
            list.push((base, stab));
        }
        Self::from_orbits(src, dst, list)
    }

    /// Orbit counts keyed by base object; a quick fingerprint for diagnostics.
    pub fn orbit_profile(&self) -> BTreeMap<Obj, Vec<usize>> {
        let mut out: BTreeMap<Obj, Vec<usize>> = BTreeMap::new();
        for o in &self.orbits {
            out.entry(o.base).or_default().push(o.stab.order());
        }
        for v in out.values_mut() {
            v.sort_unstable();
        }
        out
    }
}
