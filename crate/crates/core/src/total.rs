//! Totality: Loader's totality spaces, stably-total orthogonality of profunctors,
//! totality groupoids with finite catalogs, and the equivalence principle.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::creed::creed_of;
use crate::error::{domain, validation, Error, Result};
use crate::grpd::{groupoid_from_json, groupoid_to_json, subgroups, Groupoid, Obj, Subgroup};
use crate::prof::{IsoWitness, OrbitMatch, Profunctor};

/// Default largest carrier for which Loader duals are enumerated.
pub const DEFAULT_CARRIER_BOUND: usize = 20;

pub type Subset = BTreeSet<usize>;

pub fn loader_orthogonal(u: &Subset, x: &Subset) -> bool {
    u.intersection(x).count() == 1
}

/// All subsets of `0..carrier` meeting every member of `family` exactly once.
pub fn loader_dual(family: &[Subset], carrier: usize, bound: usize) -> Result<Vec<Subset>> {
    if carrier > bound {
        return Err(Error::Resource(format!("carrier of size {carrier} exceeds the bound {bound}")));
    }
    if family.iter().flatten().any(|&e| e >= carrier) {
        return domain("family member leaves the carrier");
    }
    let masks: Vec<u64> = family.iter().map(|s| s.iter().fold(0u64, |m, &e| m | (1 << e))).collect();
    Ok((0u64..(1 << carrier))
        .filter(|u| masks.iter().all(|x| (u & x).count_ones() == 1))
        .map(|u| (0..carrier).filter(|e| u & (1 << e) != 0).collect())
        .collect())
}

/// Loader's totality space `(A, U, X)` with `X = U⊥`, `U = X⊥`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalitySpace {
    pub carrier: usize,
    pub tot: Vec<Subset>,
    pub cot: Vec<Subset>,
}

impl TotalitySpace {
    /// The space generated by `gen`: `cot = gen⊥`, `tot = cot⊥`.
    pub fn generated(carrier: usize, gen: &[Subset], bound: usize) -> Result<Self> {
        let cot = loader_dual(gen, carrier, bound)?;
        let tot = loader_dual(&cot, carrier, bound)?;
        let space = TotalitySpace { carrier, tot, cot };
        space.validate(bound)?;
        Ok(space)
    }

    /// The discrete space on `n` points: totals are singletons, the only cototal is everything.
    pub fn discrete(n: usize) -> Self {
        TotalitySpace {
            carrier: n,
            tot: (0..n).map(|i| Subset::from([i])).collect(),
            cot: vec![(0..n).collect()],
        }
    }

    pub fn validate(&self, bound: usize) -> Result<()> {
        let sorted = |mut v: Vec<Subset>| {
            v.sort();
            v
        };
        if sorted(loader_dual(&self.tot, self.carrier, bound)?) != sorted(self.cot.clone())
            || sorted(loader_dual(&self.cot, self.carrier, bound)?) != sorted(self.tot.clone())
        {
            return validation("tot and cot are not each other's orthogonal");
        }
        let covered = |fam: &[Subset]| fam.iter().flatten().collect::<BTreeSet<_>>().len() == self.carrier;
        if !covered(&self.tot) || !covered(&self.cot) {
            return validation("tot or cot does not cover the carrier");
        }
        Ok(())
    }

    /// Tensor of spaces on the product carrier `i·|B| + j`.
    pub fn tensor(&self, other: &TotalitySpace, bound: usize) -> Result<Self> {
        let n = other.carrier;
        let gen: Vec<Subset> = self
            .tot
            .iter()
            .flat_map(|u| other.tot.iter().map(move |v| u.iter().flat_map(|&i| v.iter().map(move |&j| i * n + j)).collect()))
            .collect();
        Self::generated(self.carrier * n, &gen, bound)
    }

    pub fn dual(&self) -> Self {
        TotalitySpace {
            carrier: self.carrier,
            tot: self.cot.clone(),
            cot: self.tot.clone(),
        }
    }

    /// Loader's maximality: no total strictly contains another.
    pub fn is_maximal(&self) -> bool {
        self.tot
            .iter()
            .all(|x| self.tot.iter().all(|y| !(x.is_subset(y) && x != y)))
    }
}

/// Every endomorphism factors uniquely as `g;h` with `g ∈ G`, `h ∈ H`.
pub fn is_strict_factorization(g: &Groupoid, big: &Subgroup, small: &Subgroup) -> bool {
    if big.obj != small.obj {
        return false;
    }
    let mut hits = vec![0u32; g.num_morphisms()];
    for &x in &big.elems {
        for &y in &small.elems {
            hits[g.mul(x, y)] += 1;
        }
    }
    g.end(big.obj).into_iter().all(|m| hits[m] == 1)
}

/// Maximality of factorizations: if `(H,K)` and `(H′,K)` both factor and
/// `H ⊆ H′` then `H = H′`. Returns whether the implication holds.
pub fn maximality_check(g: &Groupoid, h: &Subgroup, h2: &Subgroup, k: &Subgroup) -> bool {
    !(h.is_subset_of(h2) && is_strict_factorization(g, h, k) && is_strict_factorization(g, h2, k)) || h == h2
}

/// `P ⫫ Q`: stable orthogonality and `P ; Q ≅ id_I`.
pub fn stably_total_orthogonal(p: &Profunctor, q: &Profunctor) -> Result<bool> {
    if !p.src().is_trivial() || !q.dst().is_trivial() || p.dst() != q.src() {
        return domain("expected P : I ⇸ 𝔸 and Q : 𝔸 ⇸ I");
    }
    if !creed_of(p)?.is_orthogonal(&creed_of(q)?)? {
        return Ok(false);
    }
    Ok(p.compose(q)?.num_elements() == 1)
}

/// At most one orbit over each iso class of `𝔸ᵒᵖ × 𝔹`: any two elements over
/// isomorphic object pairs are related by the action.
pub fn single_orbit_check(p: &Profunctor) -> bool {
    let classes = p.cat().iso_classes();
    let mut seen = BTreeSet::new();
    p.orbits().iter().all(|o| seen.insert(classes.class_of[o.base]))
}

/// A groupoid with finite catalogs of totals and cototals.
#[derive(Clone, Debug)]
pub struct TotalityGroupoid {
    pub groupoid: Groupoid,
    pub tot: Vec<Profunctor>,
    pub cot: Vec<Profunctor>,
    pub bound: usize,
}

/// Outcome of the bounded biorthogonality audit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub candidates: usize,
    pub missing_tot: Vec<String>,
    pub missing_cot: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.missing_tot.is_empty() && self.missing_cot.is_empty()
    }
}

impl TotalityGroupoid {
    /// Validates pairwise orthogonality and support.
    pub fn new(groupoid: Groupoid, tot: Vec<Profunctor>, cot: Vec<Profunctor>, bound: usize) -> Result<Self> {
        let i = Groupoid::trivial();
        for u in &tot {
            if u.src() != &i || u.dst() != &groupoid {
                return domain("total catalog member is not I ⇸ 𝔸");
            }
        }
        for x in &cot {
            if x.src() != &groupoid || x.dst() != &i {
                return domain("cototal catalog member is not 𝔸 ⇸ I");
            }
        }
        for (a, u) in tot.iter().enumerate() {
            for (b, x) in cot.iter().enumerate() {
                if !stably_total_orthogonal(u, x)? {
                    return validation(format!("total {a} and cototal {b} are not stably-total orthogonal"));
                }
            }
        }
        for o in 0..groupoid.num_objects() {
            if !tot.iter().any(|u| !u.fiber(0, o).is_empty()) || !cot.iter().any(|x| !x.fiber(o, 0).is_empty()) {
                return validation(format!("object {o} is not supported by the catalogs"));
            }
        }
        Ok(TotalityGroupoid {
            groupoid,
            tot,
            cot,
            bound,
        })
    }

    pub fn is_total(&self, u: &Profunctor) -> Result<bool> {
        for x in &self.cot {
            if !stably_total_orthogonal(u, x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_cototal(&self, x: &Profunctor) -> Result<bool> {
        for u in &self.tot {
            if !stably_total_orthogonal(u, x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Within all profunctors with at most `k` orbits at representatives, every
    /// candidate orthogonal to the whole opposite catalog must already be in the
    /// catalog (up to isomorphism).
    pub fn audit(&self, k: usize) -> Result<AuditReport> {
        let g = &self.groupoid;
        let i = Groupoid::trivial();
        let mut atoms: Vec<(Obj, Subgroup)> = Vec::new();
        for &rep in &g.iso_classes().reps {
            for h in subgroups(g, rep, self.bound)? {
                atoms.push((rep, h));
            }
        }
        let mut report = AuditReport::default();
        let combos = multisets(atoms.len(), k);
        for combo in &combos {
            report.candidates += 1;
            let orbits: Vec<(Obj, Subgroup)> = combo.iter().map(|&a| atoms[a].clone()).collect();
            let u = Profunctor::from_orbits(&i, g, orbits.clone())?;
            if self.is_total(&u)? && !self.tot.iter().any(|t| t.is_isomorphic(&u).is_some()) {
                report.missing_tot.push(describe(&u));
            }
            let cot_cat = g.opposite().product(&i);
            let flipped = orbits
                .into_iter()
                .map(|(o, h)| {
                    (o, Subgroup {
                        obj: o,
                        elems: h.elems.iter().map(|&m| cot_cat.pair_mor(m, 0)).collect(),
                    })
                })
                .collect();
            let x = Profunctor::from_orbits(g, &i, flipped)?;
            if self.is_cototal(&x)? && !self.cot.iter().any(|c| c.is_isomorphic(&x).is_some()) {
                report.missing_cot.push(describe(&x));
            }
        }
        Ok(report)
    }

    /// Truncation to a totality space over the iso classes (tot/cot supports).
    pub fn truncation(&self) -> (Vec<Subset>, Vec<Subset>) {
        let classes = self.groupoid.iso_classes();
        let support = |p: &Profunctor, side: usize| -> Subset {
            p.orbits()
                .iter()
                .map(|o| {
                    let (a, b) = p.split_obj(o.base);
                    classes.class_of[if side == 0 { b } else { a }]
                })
                .collect()
        };
        (
            self.tot.iter().map(|u| support(u, 0)).collect(),
            self.cot.iter().map(|x| support(x, 1)).collect(),
        )
    }

    pub fn to_json(&self) -> Value {
        let orbits = |p: &Profunctor| p.to_json()["orbits"].clone();
        json!({
            "groupoid": groupoid_to_json(&self.groupoid),
            "tot": self.tot.iter().map(orbits).collect::<Vec<_>>(),
            "cot": self.cot.iter().map(orbits).collect::<Vec<_>>(),
            "bound": self.bound,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let g = groupoid_from_json(v.get("groupoid").ok_or_else(|| Error::Validation("missing \"groupoid\"".into()))?)?;
        let i = Groupoid::trivial();
        let list = |key: &str, src: &Groupoid, dst: &Groupoid| -> Result<Vec<Profunctor>> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Validation(format!("missing \"{key}\" list")))?
                .iter()
                .map(|orbits| Profunctor::from_json_with(src, dst, &json!({ "orbits": orbits })))
                .collect()
        };
        let tot = list("tot", &i, &g)?;
        let cot = list("cot", &g, &i)?;
        let bound = v.get("bound").and_then(Value::as_u64).unwrap_or(crate::grpd::DEFAULT_GROUP_BOUND as u64) as usize;
        Self::new(g, tot, cot, bound)
    }
}

/// Non-empty multisets of `0..n` with at most `k` members, as sorted vectors.
fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for c in &frontier {
            for a in c.last().copied().unwrap_or(0)..n {
                let mut d = c.clone();
                d.push(a);
                next.push(d);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn describe(p: &Profunctor) -> String {
    p.to_json()["orbits"].to_string()
}

/// Representables `𝔸(a, −)` as totals and the terminal presheaf as the only cototal.
pub fn discrete_totality(g: &Groupoid) -> TotalityGroupoid {
    let i = Groupoid::trivial();
    let reps = g.iso_classes().reps.clone();
    let tot = reps
        .iter()
        .map(|&r| Profunctor::induced(&i, g, 0, r, &[(0, g.identity(r))]).expect("valid atom"))
        .collect();
    let terminal: Vec<(Obj, Subgroup)> = reps
        .iter()
        .map(|&r| {
            let cat = g.opposite().product(&i);
            (r, Subgroup {
                obj: r,
                elems: g.end(r).into_iter().map(|m| cat.pair_mor(m, 0)).collect(),
            })
        })
        .collect();
    let cot = vec![Profunctor::from_orbits(g, &i, terminal).expect("valid orbits")];
    TotalityGroupoid {
        groupoid: g.clone(),
        tot,
        cot,
        bound: crate::grpd::DEFAULT_GROUP_BOUND,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivalenceOutcome {
    Isomorphic(IsoWitness),
    /// Hypothesis 1 (total truncation), 2 (weak totality) or 3 (stabilizer
    /// containment) failed, with a description.
    HypothesisFailed { hypothesis: u8, detail: String },
    /// All hypotheses held against the catalogs but the transported map is
    /// not an isomorphism.
    NotBijective { detail: String },
}

/// Equivalence principle: under the three hypotheses, builds `ψ : P ≅ Q` by
/// transporting a stabilizer-matched pair along each orbit.
pub fn equivalence_witness(p: &Profunctor, q: &Profunctor, space: &TotalityGroupoid) -> Result<EquivalenceOutcome> {
    let g = &space.groupoid;
    if !p.src().is_trivial() || p.dst() != g || q.src() != p.src() || q.dst() != g {
        return domain("expected P, Q : I ⇸ 𝔸 over the totality groupoid's groupoid");
    }
    let classes = g.iso_classes();
    let supported: BTreeSet<usize> = p.orbits().iter().map(|o| classes.class_of[o.base]).collect();
    let (_, cot_supports) = space.truncation();
    for (n, c) in cot_supports.iter().enumerate() {
        if supported.intersection(c).count() != 1 {
            return Ok(EquivalenceOutcome::HypothesisFailed {
                hypothesis: 1,
                detail: format!("support of P meets cototal {n} in {} classes", supported.intersection(c).count()),
            });
        }
    }
    for &k in &supported {
        let rep = classes.reps[k];
        let mut ok = false;
        for c in &space.cot {
            if !c.fiber(rep, 0).is_empty() && stably_total_orthogonal(p, c)? {
                ok = true;
                break;
            }
        }
        if !ok {
            return Ok(EquivalenceOutcome::HypothesisFailed {
                hypothesis: 2,
                detail: format!("no cototal at object {rep} is stably-total orthogonal to P"),
            });
        }
    }
    let cat = p.cat();
    let mut matches = Vec::new();
    for (i, po) in p.orbits().iter().enumerate() {
        let found = q.orbits().iter().enumerate().find_map(|(j, qo)| {
            if qo.base != po.base {
                return None;
            }
            cat.end(po.base).into_iter().find_map(|m| {
                let inv = cat.inverse(m);
                let contained = po
                    .stab
                    .elems
                    .iter()
                    .all(|&s| qo.stab.contains(cat.mul(cat.mul(m, s), inv)));
                contained.then_some((j, m))
            })
        });
        match found {
            Some((j, mediator)) => matches.push(OrbitMatch { p: i, q: j, mediator }),
            None => {
                return Ok(EquivalenceOutcome::HypothesisFailed {
                    hypothesis: 3,
                    detail: format!("no element of Q at object {} has a stabilizer containing fix(x)", po.base),
                })
            }
        }
    }
    let witness = IsoWitness { matches };
    match verify_iso(p, q, &witness) {
        Ok(()) => Ok(EquivalenceOutcome::Isomorphic(witness)),
        Err(Error::Invariant(detail)) => Ok(EquivalenceOutcome::NotBijective { detail }),
        Err(e) => Err(e),
    }
}

/// Checks that a witness is an equivariant bijection on elements.
pub fn verify_iso(p: &Profunctor, q: &Profunctor, w: &IsoWitness) -> Result<()> {
    let elems = p.elements();
    let image: BTreeSet<_> = elems.iter().map(|&x| p.apply_iso(q, w, x)).collect();
    if image.len() != elems.len() || image.len() != q.num_elements() {
        return Err(Error::Invariant("constructed map is not a bijection".into()));
    }
    for &x in &elems {
        let o = p.elem_obj(x);
        for c in 0..p.cat().num_objects() {
            for m in p.cat().hom(o, c) {
                if p.apply_iso(q, w, p.act_cat(x, m)) != q.act_cat(p.apply_iso(q, w, x), m) {
                    return Err(Error::Invariant("constructed map is not natural".into()));
                }
            }
        }
    }
    Ok(())
}
