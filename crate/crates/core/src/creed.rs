//! Creeds and kits on finite groupoids, stable orthogonality and the connectives.
//!
//! Both are stored at iso-class representatives only; the value at any other
//! object is the conjugate along a connecting morphism.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::error::{domain, validation, Error, Result};
use crate::grpd::{conjugate_subgroup, groupoid_from_json, groupoid_to_json, subgroups, Groupoid, Mor, Obj, Subgroup};
use crate::prof::Profunctor;

/// Per-object sets of endomorphisms closed under powers and conjugation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Creed {
    groupoid: Groupoid,
    sets: Vec<Vec<Mor>>,
}

/// Per-object sets of subgroups closed under conjugation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kit {
    groupoid: Groupoid,
    sets: Vec<Vec<Subgroup>>,
}

fn conjugate(g: &Groupoid, alpha: Mor, beta: Mor) -> Mor {
    g.mul(g.mul(g.inverse(beta), alpha), beta)
}

/// `{α | ∀k. αᵏ ∉ C \ {id}}` inside `End(obj)`; `set` is sorted.
fn dual_set(g: &Groupoid, obj: Obj, set: &[Mor]) -> Vec<Mor> {
    let id = g.identity(obj);
    g.end(obj)
        .into_iter()
        .filter(|&a| {
            let mut acc = a;
            while acc != id {
                if set.binary_search(&acc).is_ok() {
                    return false;
                }
                acc = g.mul(acc, a);
            }
            true
        })
        .collect()
}

/// Closes a set of endomorphisms at `obj` under powers and `End(obj)`-conjugation.
fn close_at(g: &Groupoid, obj: Obj, seeds: impl IntoIterator<Item = Mor>) -> Vec<Mor> {
    let end = g.end(obj);
    let mut out = BTreeSet::new();
    let mut stack: Vec<Mor> = seeds.into_iter().collect();
    while let Some(a) = stack.pop() {
        if !out.insert(a) {
            continue;
        }
        stack.extend((2..g.order(a)).map(|k| g.power(a, k)));
        stack.extend(end.iter().map(|&b| conjugate(g, a, b)));
    }
    if out.is_empty() {
        Vec::new()
    } else {
        out.insert(g.identity(obj));
        out.into_iter().collect()
    }
}

impl Creed {
    /// Builds from per-class sets at the representatives, checking closure.
    pub fn from_rep_sets(g: &Groupoid, sets: Vec<Vec<Mor>>) -> Result<Self> {
        let reps = &g.iso_classes().reps;
        if sets.len() != reps.len() {
            return validation(format!("expected {} representative sets, got {}", reps.len(), sets.len()));
        }
        let mut norm = Vec::with_capacity(sets.len());
        for (set, &rep) in sets.into_iter().zip(reps) {
            let sorted: BTreeSet<Mor> = set.into_iter().collect();
            for &m in &sorted {
                if m >= g.num_morphisms() || g.src(m) != rep || g.dst(m) != rep {
                    return validation(format!("{m} is not an endomorphism of object {rep}"));
                }
            }
            norm.push(sorted.into_iter().collect::<Vec<_>>());
        }
        let creed = Creed {
            groupoid: g.clone(),
            sets: norm,
        };
        if let Some((obj, m)) = creed.closure_violation() {
            return validation(format!(
                "set at object {obj} is not closed under powers and conjugation (missing {})",
                g.label(m)
            ));
        }
        Ok(creed)
    }

    /// Smallest creed containing the given per-object sets.
    pub fn closure_of(g: &Groupoid, entries: &[(Obj, Vec<Mor>)]) -> Result<Self> {
        let seeds = Self::seeds(g, entries)?;
        let sets = seeds
            .into_iter()
            .zip(&g.iso_classes().reps)
            .map(|(s, &rep)| close_at(g, rep, s))
            .collect();
        Ok(Creed {
            groupoid: g.clone(),
            sets,
        })
    }

    /// Entries transported to the representatives, without closing.
    fn seeds(g: &Groupoid, entries: &[(Obj, Vec<Mor>)]) -> Result<Vec<BTreeSet<Mor>>> {
        let classes = g.iso_classes();
        let mut seeds = vec![BTreeSet::new(); classes.len()];
        for (obj, set) in entries {
            if *obj >= g.num_objects() {
                return domain(format!("object {obj} out of range"));
            }
            let k = classes.class_of[*obj];
            let to = g.connecting(*obj, classes.reps[k]).expect("same class");
            for &m in set {
                if m >= g.num_morphisms() || g.src(m) != *obj || g.dst(m) != *obj {
                    return validation(format!("{m} is not an endomorphism of object {obj}"));
                }
                seeds[k].insert(conjugate(g, m, to));
            }
        }
        Ok(seeds)
    }

    fn build(g: &Groupoid, f: impl Fn(Obj) -> Vec<Mor>) -> Self {
        Creed {
            groupoid: g.clone(),
            sets: g.iso_classes().reps.iter().map(|&r| f(r)).collect(),
        }
    }

    /// The creed `{id}` at every object.
    pub fn identity(g: &Groupoid) -> Self {
        Self::build(g, |r| vec![g.identity(r)])
    }

    pub fn full(g: &Groupoid) -> Self {
        Self::build(g, |r| g.end(r))
    }

    pub fn empty(g: &Groupoid) -> Self {
        Self::build(g, |_| Vec::new())
    }

    pub fn groupoid(&self) -> &Groupoid {
        &self.groupoid
    }

    /// Reinterprets the creed on the opposite groupoid (same morphism ids).
    pub fn on_opposite(&self) -> Self {
        Creed {
            groupoid: self.groupoid.opposite(),
            sets: self.sets.clone(),
        }
    }

    /// Set at the representative of class `k`.
    pub fn at_rep(&self, k: usize) -> &[Mor] {
        &self.sets[k]
    }

    pub fn at(&self, obj: Obj) -> Vec<Mor> {
        let classes = self.groupoid.iso_classes();
        let k = classes.class_of[obj];
        let t = self.groupoid.connecting(classes.reps[k], obj).expect("same class");
        let mut out: Vec<Mor> = self.sets[k].iter().map(|&m| conjugate(&self.groupoid, m, t)).collect();
        out.sort_unstable();
        out
    }

    pub fn contains(&self, obj: Obj, m: Mor) -> bool {
        let g = &self.groupoid;
        let classes = g.iso_classes();
        let k = classes.class_of[obj];
        let t = g.connecting(classes.reps[k], obj).expect("same class");
        let back = g.mul(g.mul(t, m), g.inverse(t));
        self.sets[k].binary_search(&back).is_ok()
    }

    /// Some `(object, morphism)` showing the family is not a creed, if any.
    pub fn closure_violation(&self) -> Option<(Obj, Mor)> {
        let g = &self.groupoid;
        for (set, &rep) in self.sets.iter().zip(&g.iso_classes().reps) {
            let end = g.end(rep);
            for &a in set {
                let mut acc = a;
                loop {
                    if set.binary_search(&acc).is_err() {
                        return Some((rep, acc));
                    }
                    acc = g.mul(acc, a);
                    if acc == a {
                        break;
                    }
                }
                for &b in &end {
                    let c = conjugate(g, a, b);
                    if set.binary_search(&c).is_err() {
                        return Some((rep, c));
                    }
                }
            }
        }
        None
    }

    pub fn dual(&self) -> Self {
        let g = &self.groupoid;
        Creed {
            groupoid: g.clone(),
            sets: self
                .sets
                .iter()
                .zip(&g.iso_classes().reps)
                .map(|(s, &rep)| dual_set(g, rep, s))
                .collect(),
        }
    }

    pub fn boolean_closure(&self) -> Self {
        self.dual().dual()
    }

    pub fn is_boolean(&self) -> bool {
        self.boolean_closure() == *self
    }

    fn same_carrier(&self, other: &Creed) -> Result<()> {
        if self.groupoid == other.groupoid || self.groupoid == other.groupoid.opposite() {
            Ok(())
        } else {
            domain("creeds live on different groupoids")
        }
    }

    pub fn is_orthogonal(&self, other: &Creed) -> Result<bool> {
        self.same_carrier(other)?;
        let reps = &self.groupoid.iso_classes().reps;
        Ok(self.sets.iter().zip(&other.sets).zip(reps).all(|((x, y), &rep)| {
            let id = self.groupoid.identity(rep);
            x.iter().all(|m| *m == id || y.binary_search(m).is_err())
        }))
    }

    pub fn is_subset_of(&self, other: &Creed) -> bool {
        self.sets
            .iter()
            .zip(&other.sets)
            .all(|(x, y)| x.iter().all(|m| y.binary_search(m).is_ok()))
    }

    /// Kit of all subgroups inside the creed; the Boolean correspondence.
    pub fn to_kit(&self, bound: usize) -> Result<Kit> {
        let g = &self.groupoid;
        let mut sets = Vec::new();
        for (set, &rep) in self.sets.iter().zip(&g.iso_classes().reps) {
            let all = subgroups(g, rep, bound)?;
            sets.push(
                all.into_iter()
                    .filter(|h| h.elems.iter().all(|m| set.binary_search(m).is_ok()))
                    .collect(),
            );
        }
        Ok(Kit {
            groupoid: g.clone(),
            sets,
        })
    }

    pub fn to_json(&self) -> Value {
        let reps = &self.groupoid.iso_classes().reps;
        let at: Vec<Value> = self
            .sets
            .iter()
            .zip(reps)
            .map(|(s, &o)| json!({"object": o, "subset": s}))
            .collect();
        json!({"groupoid": groupoid_to_json(&self.groupoid), "at": at})
    }

    /// Reads the creed JSON format. Returns the creed and whether closure had
    /// to add morphisms to the given sets.
    pub fn from_json(v: &Value) -> Result<(Self, bool)> {
        let g = groupoid_from_json(v.get("groupoid").ok_or_else(|| Error::Validation("missing \"groupoid\"".into()))?)?;
        Self::from_json_on(&g, v)
    }

    pub fn from_json_on(g: &Groupoid, v: &Value) -> Result<(Self, bool)> {
        #[derive(serde::Deserialize)]
        struct Entry {
            object: Obj,
            subset: Vec<Mor>,
        }
        let entries: Vec<Entry> = serde_json::from_value(v.get("at").cloned().unwrap_or(Value::Array(vec![])))
            .map_err(|e| Error::Validation(format!("creed entries: {e}")))?;
        let pairs: Vec<(Obj, Vec<Mor>)> = entries.into_iter().map(|e| (e.object, e.subset)).collect();
        let closed = Self::closure_of(g, &pairs)?;
        let raw = Self::seeds(g, &pairs)?;
        let changed = closed.sets.iter().zip(&raw).any(|(c, r)| c.len() != r.len());
        Ok((closed, changed))
    }
}

impl Kit {
    pub fn groupoid(&self) -> &Groupoid {
        &self.groupoid
    }

    pub fn at_rep(&self, k: usize) -> &[Subgroup] {
        &self.sets[k]
    }

    pub fn dual(&self, bound: usize) -> Result<Kit> {
        let g = &self.groupoid;
        let mut sets = Vec::new();
        for (set, &rep) in self.sets.iter().zip(&g.iso_classes().reps) {
            let all = subgroups(g, rep, bound)?;
            sets.push(
                all.into_iter()
                    .filter(|h| set.iter().all(|k| k.intersection(h).order() == 1))
                    .collect(),
            );
        }
        Ok(Kit {
            groupoid: g.clone(),
            sets,
        })
    }

    pub fn is_orthogonal(&self, other: &Kit) -> Result<bool> {
        if self.groupoid != other.groupoid && self.groupoid != other.groupoid.opposite() {
            return domain("kits live on different groupoids");
        }
        Ok(self
            .sets
            .iter()
            .zip(&other.sets)
            .all(|(x, y)| x.iter().all(|g| y.iter().all(|h| g.intersection(h).order() == 1))))
    }

    /// Union of the kit's subgroups at each object.
    pub fn union(&self) -> Creed {
        let sets = self
            .sets
            .iter()
            .map(|s| s.iter().flat_map(|h| h.elems.iter().copied()).collect::<BTreeSet<_>>().into_iter().collect())
            .collect();
        Creed {
            groupoid: self.groupoid.clone(),
            sets,
        }
    }

    pub fn is_closed(&self) -> bool {
        let g = &self.groupoid;
        self.sets.iter().zip(&g.iso_classes().reps).all(|(set, &rep)| {
            set.iter().all(|h| {
                g.end(rep)
                    .into_iter()
                    .all(|b| set.contains(&conjugate_subgroup(g, h, b).expect("endomorphism")))
            })
        })
    }
}

/// The groupoid on the non-trivial side of `I ⇸ 𝔸` or `𝔸 ⇸ I`.
fn presheaf_side(p: &Profunctor) -> Result<Groupoid> {
    if p.src().is_trivial() {
        Ok(p.dst().clone())
    } else if p.dst().is_trivial() {
        Ok(p.src().clone())
    } else {
        domain("creeds and kits are defined only when one endpoint is the trivial groupoid")
    }
}

pub fn creed_of(p: &Profunctor) -> Result<Creed> {
    let g = presheaf_side(p)?;
    let classes = g.iso_classes();
    let mut seeds: Vec<BTreeSet<Mor>> = vec![BTreeSet::new(); classes.len()];
    for o in p.orbits() {
        let k = classes.class_of[o.base];
        for b in g.end(o.base) {
            seeds[k].extend(o.stab.elems.iter().map(|&a| conjugate(&g, a, b)));
        }
    }
    Ok(Creed {
        sets: seeds.into_iter().map(|s| s.into_iter().collect()).collect(),
        groupoid: g,
    })
}

pub fn kit_of(p: &Profunctor) -> Result<Kit> {
    let g = presheaf_side(p)?;
    let classes = g.iso_classes();
    let mut sets: Vec<BTreeSet<Subgroup>> = vec![BTreeSet::new(); classes.len()];
    for o in p.orbits() {
        let k = classes.class_of[o.base];
        for b in g.end(o.base) {
            let h = Subgroup {
                obj: o.base,
                elems: o.stab.elems.clone(),
            };
            sets[k].insert(conjugate_subgroup(&g, &h, b)?);
        }
    }
    Ok(Kit {
        sets: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        groupoid: g,
    })
}

/// `P ⊨ C`: every orbit stabilizer lies in the creed at its base.
pub fn models(p: &Profunctor, c: &Creed) -> Result<bool> {
    let g = presheaf_side(p)?;
    if g != c.groupoid && g != c.groupoid.opposite() {
        return domain("creed is on a different groupoid");
    }
    let classes = g.iso_classes();
    Ok(p.orbits().iter().all(|o| {
        let set = &c.sets[classes.class_of[o.base]];
        o.stab.elems.iter().all(|m| set.binary_search(m).is_ok())
    }))
}

pub fn models_kit(p: &Profunctor, k: &Kit) -> Result<bool> {
    let g = presheaf_side(p)?;
    if g != k.groupoid && g != k.groupoid.opposite() {
        return domain("kit is on a different groupoid");
    }
    let classes = g.iso_classes();
    Ok(p.orbits().iter().all(|o| k.sets[classes.class_of[o.base]].contains(&o.stab)))
}

fn require_boolean(c: &Creed, what: &str) -> Result<()> {
    if c.is_boolean() {
        Ok(())
    } else {
        validation(format!("{what} creed is not Boolean"))
    }
}

/// `(𝒜 ⊗ ℬ)_{a,b} = (𝒜_a × ℬ_b)⊥⊥` on `𝔸 × 𝔹`.
pub fn tensor_creed(a: &Creed, b: &Creed) -> Result<Creed> {
    require_boolean(a, "left")?;
    require_boolean(b, "right")?;
    Ok(tensor_unchecked(a, b))
}

fn tensor_unchecked(a: &Creed, b: &Creed) -> Creed {
    let g = a.groupoid.product(&b.groupoid);
    let mut sets = Vec::new();
    for sa in &a.sets {
        for sb in &b.sets {
            let mut prod: Vec<Mor> = sa.iter().flat_map(|&x| sb.iter().map(move |&y| (x, y))).map(|(x, y)| g.pair_mor(x, y)).collect();
            prod.sort_unstable();
            sets.push(prod);
        }
    }
    let raw = Creed { groupoid: g, sets };
    raw.dual().dual()
}

/// `𝒜 ⅋ ℬ = (𝒜⊥ ⊗ ℬ⊥)⊥`.
pub fn par_creed(a: &Creed, b: &Creed) -> Result<Creed> {
    require_boolean(a, "left")?;
    require_boolean(b, "right")?;
    Ok(tensor_unchecked(&a.dual(), &b.dual()).dual())
}

/// Whether `P : 𝔸 ⇸ 𝔹` is a morphism `(𝔸, 𝒜) ⇸ (𝔹, ℬ)` of stable profunctors.
///
/// Probes are the atoms `⟨G⟩` for subgroups inside `𝒜` (resp. `ℬ⊥`) at each
/// representative; a general probe is a sum of these and both composition and
/// the creed of a sum distribute over the summands.
pub fn sprof_morphism_check(p: &Profunctor, a: &Creed, b: &Creed, bound: usize) -> Result<bool> {
    if a.groupoid != *p.src() || b.groupoid != *p.dst() {
        return domain("creeds do not live on the profunctor's endpoints");
    }
    let i = Groupoid::trivial();
    let a_dual = a.dual();
    let a_kit = a.to_kit(bound)?;
    for (k, &rep) in p.src().iso_classes().reps.iter().enumerate() {
        for h in a_kit.at_rep(k) {
            let pairs: Vec<(Mor, Mor)> = h.elems.iter().map(|&m| (0, m)).collect();
            let q = Profunctor::induced(&i, p.src(), 0, rep, &pairs)?;
            if !models(&q.compose(p)?, b)? {
                return Ok(false);
            }
        }
    }
    let b_kit = b.dual().to_kit(bound)?;
    for (k, &rep) in p.dst().iso_classes().reps.iter().enumerate() {
        for h in b_kit.at_rep(k) {
            let pairs: Vec<(Mor, Mor)> = h.elems.iter().map(|&m| (m, 0)).collect();
            let r = Profunctor::induced(p.dst(), &i, rep, 0, &pairs)?;
            if !models(&p.compose(&r)?, &a_dual)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
