//! Definability: families of profunctors indexed by variable assignments,
//! extraction of an axiom linking from relational probes, logicality and
//! diagonal-stabilizer checks, and the round trip back to an interpretation.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use crate::error::{domain, validation, Error, Result};
use crate::grpd::{groupoid_from_json, groupoid_to_json, Groupoid, GroupoidFunctor, Mor, Obj};
use crate::interp::{
    act_experiment, direct_structured, experiments, experiments_structured, interp_functor,
    transport_experiment, Assignment, BlockProf, FunctorAssignment, Layout, DEFAULT_EXPLICIT_BOUND,
    DEFAULT_ORBIT_BOUND,
};
use crate::mll::{parse_formula, Formula, ProofStructure};
use crate::prof::{Elem, Profunctor};

/// Finite set sizes per variable; the set for `X` is `0..sets[X]`.
pub type SetAssignment = BTreeMap<String, usize>;
/// One value per literal occurrence of the sequent.
pub type Tuple = Vec<usize>;

/// A family `σ ↦ ϖ_σ : I ⇸ ⟦Γ⟧_σ`, queried pointwise.
pub trait FamilyOracle {
    fn sequent(&self) -> &[Formula];

    /// The family at discrete groupoids, as a set of occurrence tuples.
    fn relation_at(&self, sets: &SetAssignment) -> Result<BTreeSet<Tuple>>;

    /// Related tuples that agree with `fixed` (occurrence index ↦ value).
    fn relation_slice(&self, sets: &SetAssignment, fixed: &BTreeMap<usize, usize>) -> Result<Vec<Tuple>> {
        Ok(self
            .relation_at(sets)?
            .into_iter()
            .filter(|t| fixed.iter().all(|(&i, &v)| t.get(i) == Some(&v)))
            .collect())
    }

    fn profunctor_at(&self, sigma: &Assignment) -> Result<Profunctor>;

    /// Block presentation, for oracles that can give one without the explicit product.
    fn block_at(&self, _sigma: &Assignment) -> Result<Option<BlockProf>> {
        Ok(None)
    }

    /// Naturality action: an element of `ϖ_σ` to one of `ϖ_σ′`, where `σ`
    /// and `σ′` are the sources and targets of `phi`.
    fn transport(&self, phi: &FunctorAssignment, x: Elem) -> Result<Elem>;

    fn transport_all(&self, phi: &FunctorAssignment, xs: &[Elem]) -> Result<Vec<Elem>> {
        xs.iter().map(|&x| self.transport(phi, x)).collect()
    }
}

fn discrete(n: usize) -> Groupoid {
    Groupoid::coproduct(&vec![Groupoid::trivial(); n])
}

fn discrete_assignment(sets: &SetAssignment) -> Assignment {
    sets.iter().map(|(v, &n)| (v.clone(), discrete(n))).collect()
}

fn endpoints(phi: &FunctorAssignment) -> (Assignment, Assignment) {
    phi.iter()
        .map(|(v, f)| ((v.clone(), f.source.clone()), (v.clone(), f.target.clone())))
        .unzip()
}

/// `Γ(Φ) : ⟦Γ⟧_σ → ⟦Γ⟧_σ′`, nested like [`crate::interp::interp_sequent`].
pub fn sequent_functor(seq: &[Formula], phi: &FunctorAssignment) -> Result<GroupoidFunctor> {
    let mut parts = seq.iter().map(|f| interp_functor(f, phi));
    let first = parts.next().ok_or_else(|| Error::Domain("empty sequent".into()))??;
    parts.try_fold(first, |acc, f| Ok(acc.product(&f?)))
}

/// The interpretation family of a proof structure.
#[derive(Clone, Debug)]
pub struct StructureOracle {
    structure: ProofStructure,
    bound: usize,
}

pub fn oracle_from_structure(p: &ProofStructure) -> StructureOracle {
    StructureOracle {
        structure: p.clone(),
        bound: DEFAULT_EXPLICIT_BOUND,
    }
}

impl StructureOracle {
    pub fn with_bound(mut self, bound: usize) -> Self {
        self.bound = bound;
        self
    }

    pub fn structure(&self) -> &ProofStructure {
        &self.structure
    }

    fn labels_of(&self, sigma: &Assignment, prof: &Profunctor, x: Elem) -> Result<Vec<Mor>> {
        let p = &self.structure;
        let layout = Layout::new(p.sequent(), sigma)?;
        let base = layout.decode_obj(prof.orbits()[x.orbit].base);
        let pairs = p.link_pairs();
        let mut labels = Vec::with_capacity(pairs.len());
        for &(pos, _) in &pairs {
            labels.push(sigma[&p.occurrences()[pos].var].identity(base[pos]));
        }
        act_experiment(p, sigma, &labels, &layout.decode_mor(x.rep))
    }

    fn element_of(&self, sigma: &Assignment, prof: &Profunctor, labels: &[Mor]) -> Result<Elem> {
        let p = &self.structure;
        let layout = Layout::new(p.sequent(), sigma)?;
        let mut base = vec![0; p.occurrences().len()];
        let mut mors = vec![0; p.occurrences().len()];
        for (&(pos, neg), &alpha) in p.link_pairs().iter().zip(labels) {
            let g = &sigma[&p.occurrences()[pos].var];
            let classes = g.iso_classes();
            let rep = classes.reps[classes.class_of[g.src(alpha)]];
            let to_rep = g.connecting(g.src(alpha), rep).expect("same class");
            base[pos] = rep;
            base[neg] = rep;
            mors[neg] = to_rep;
            mors[pos] = g.mul(g.inverse(to_rep), alpha);
        }
        let base = layout.encode_obj(&base);
        let orbit = prof
            .orbits()
            .iter()
            .position(|o| o.base == base)
            .ok_or_else(|| Error::Invariant("no experiment orbit at the labelling's classes".into()))?;
        Ok(prof.canon(orbit, layout.encode_mor(&mors)))
    }
}

impl FamilyOracle for StructureOracle {
    fn sequent(&self) -> &[Formula] {
        self.structure.sequent()
    }

    fn relation_at(&self, sets: &SetAssignment) -> Result<BTreeSet<Tuple>> {
        let block = experiments_structured(&self.structure, &discrete_assignment(sets), DEFAULT_ORBIT_BOUND)?;
        Ok(block.orbits.into_iter().map(|o| o.base).collect())
    }

    fn relation_slice(&self, sets: &SetAssignment, fixed: &BTreeMap<usize, usize>) -> Result<Vec<Tuple>> {
        let p = &self.structure;
        let mut per_link: Vec<Vec<usize>> = Vec::new();
        for (pos, neg) in p.link_pairs() {
            let n = *sets
                .get(&p.occurrences()[pos].var)
                .ok_or_else(|| Error::Domain(format!("variable {} has no set", p.occurrences()[pos].var)))?;
            let values: Vec<usize> = match (fixed.get(&pos), fixed.get(&neg)) {
                (Some(&a), Some(&b)) if a != b => vec![],
                (Some(&a), _) | (_, Some(&a)) => vec![a].into_iter().filter(|&a| a < n).collect(),
                (None, None) => (0..n).collect(),
            };
            per_link.push(values);
        }
        let mut out = vec![vec![0; p.occurrences().len()]];
        for ((pos, neg), values) in p.link_pairs().into_iter().zip(per_link) {
            out = out
                .into_iter()
                .flat_map(|t| {
                    values.iter().map(move |&v| {
                        let mut t = t.clone();
                        t[pos] = v;
                        t[neg] = v;
                        t
                    })
                })
                .collect();
            if out.len() > DEFAULT_ORBIT_BOUND {
                return Err(Error::Resource("relation slice too large".into()));
            }
        }
        Ok(out)
    }

    fn profunctor_at(&self, sigma: &Assignment) -> Result<Profunctor> {
        experiments(&self.structure, sigma, self.bound)
    }

    fn block_at(&self, sigma: &Assignment) -> Result<Option<BlockProf>> {
        experiments_structured(&self.structure, sigma, DEFAULT_ORBIT_BOUND).map(Some)
    }

    fn transport(&self, phi: &FunctorAssignment, x: Elem) -> Result<Elem> {
        Ok(self.transport_all(phi, &[x])?[0])
    }

    fn transport_all(&self, phi: &FunctorAssignment, xs: &[Elem]) -> Result<Vec<Elem>> {
        let (source, target) = endpoints(phi);
        let from = self.profunctor_at(&source)?;
        let to = self.profunctor_at(&target)?;
        xs.iter()
            .map(|&x| {
                let labels = self.labels_of(&source, &from, x)?;
                let moved = transport_experiment(&self.structure, phi, &labels)?;
                self.element_of(&target, &to, &moved)
            })
            .collect()
    }
}

/// Fiberwise disjoint union of families over the same sequent.
pub struct SumOracle {
    parts: Vec<Box<dyn FamilyOracle>>,
}

impl SumOracle {
    pub fn new(parts: Vec<Box<dyn FamilyOracle>>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return domain("a sum needs at least one summand");
        };
        if parts.iter().any(|p| p.sequent() != first.sequent()) {
            return domain("summands interpret different sequents");
        }
        Ok(SumOracle { parts })
    }
}

impl FamilyOracle for SumOracle {
    fn sequent(&self) -> &[Formula] {
        self.parts[0].sequent()
    }

    fn relation_at(&self, sets: &SetAssignment) -> Result<BTreeSet<Tuple>> {
        let mut out = BTreeSet::new();
        for p in &self.parts {
            out.extend(p.relation_at(sets)?);
        }
        Ok(out)
    }

    fn relation_slice(&self, sets: &SetAssignment, fixed: &BTreeMap<usize, usize>) -> Result<Vec<Tuple>> {
        let mut out = BTreeSet::new();
        for p in &self.parts {
            out.extend(p.relation_slice(sets, fixed)?);
        }
        Ok(out.into_iter().collect())
    }

    fn profunctor_at(&self, sigma: &Assignment) -> Result<Profunctor> {
        let parts: Vec<Profunctor> = self.parts.iter().map(|p| p.profunctor_at(sigma)).collect::<Result<_>>()?;
        Profunctor::sum(parts[0].src(), parts[0].dst(), &parts)
    }

    fn block_at(&self, sigma: &Assignment) -> Result<Option<BlockProf>> {
        let mut out: Option<BlockProf> = None;
        for p in &self.parts {
            let Some(b) = p.block_at(sigma)? else {
                return Ok(None);
            };
            match &mut out {
                None => out = Some(b),
                Some(acc) => acc.orbits.extend(b.orbits),
            }
        }
        Ok(out)
    }

    fn transport(&self, phi: &FunctorAssignment, x: Elem) -> Result<Elem> {
        let (source, target) = endpoints(phi);
        let mut offset = 0;
        for (k, p) in self.parts.iter().enumerate() {
            let n = p.profunctor_at(&source)?.orbits().len();
            if x.orbit < offset + n {
                let inner = p.transport(phi, Elem { orbit: x.orbit - offset, rep: x.rep })?;
                let targets: Vec<Profunctor> =
                    self.parts.iter().map(|q| q.profunctor_at(&target)).collect::<Result<_>>()?;
                return Ok(Profunctor::sum_injection(&targets, k, inner));
            }
            offset += n;
        }
        domain("element outside the sum")
    }
}

/// A family given by finite tables, one entry per assignment it is known at.
#[derive(Clone, Debug)]
pub struct TabulatedOracle {
    pub sequent: Vec<Formula>,
    pub relations: Vec<(SetAssignment, BTreeSet<Tuple>)>,
    pub profunctors: Vec<(Assignment, Profunctor)>,
}

impl TabulatedOracle {
    /// Reads `{"sequent", "relations": [{"sets", "tuples"}], "profunctors":
    /// [{"assignment", "orbits"}]}`; tuples are 0-based values per occurrence.
    pub fn from_json(v: &Value) -> Result<Self> {
        let sequent = v
            .get("sequent")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Validation("oracle needs a \"sequent\" list".into()))?
            .iter()
            .map(|f| parse_formula(f.as_str().unwrap_or_default()))
            .collect::<Result<Vec<_>>>()?;
        let width: usize = sequent.iter().map(|f| f.leaves().len()).sum();
        let mut relations = Vec::new();
        for entry in v.get("relations").and_then(Value::as_array).into_iter().flatten() {
            let sets: SetAssignment = serde_json::from_value(entry.get("sets").cloned().unwrap_or(Value::Null))
                .map_err(|e| Error::Validation(format!("relation sets: {e}")))?;
            let tuples: BTreeSet<Tuple> =
                serde_json::from_value(entry.get("tuples").cloned().unwrap_or(Value::Null))
                    .map_err(|e| Error::Validation(format!("relation tuples: {e}")))?;
            if tuples.iter().any(|t| t.len() != width) {
                return validation(format!("relation tuples must have {width} entries"));
            }
            relations.push((sets, tuples));
        }
        let mut profunctors = Vec::new();
        for entry in v.get("profunctors").and_then(Value::as_array).into_iter().flatten() {
            let mut sigma = Assignment::new();
            let groups = entry
                .get("assignment")
                .and_then(Value::as_object)
                .ok_or_else(|| Error::Validation("profunctor entry needs an \"assignment\" object".into()))?;
            for (var, g) in groups {
                sigma.insert(var.clone(), groupoid_from_json(g)?);
            }
            let dst = Layout::new(&sequent, &sigma)?.groupoid().clone();
            let prof = Profunctor::from_json_with(&Groupoid::trivial(), &dst, entry)?;
            profunctors.push((sigma, prof));
        }
        Ok(TabulatedOracle {
            sequent,
            relations,
            profunctors,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "sequent": self.sequent.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "relations": self.relations.iter().map(|(sets, tuples)| json!({"sets": sets, "tuples": tuples})).collect::<Vec<_>>(),
            "profunctors": self.profunctors.iter().map(|(sigma, p)| json!({
                "assignment": sigma.iter().map(|(v, g)| (v.clone(), groupoid_to_json(g))).collect::<BTreeMap<_, _>>(),
                "orbits": p.to_json()["orbits"],
            })).collect::<Vec<_>>(),
        })
    }

    /// Tabulates another oracle at the given points.
    pub fn tabulate(oracle: &dyn FamilyOracle, sets: &[SetAssignment], sigmas: &[Assignment]) -> Result<Self> {
        Ok(TabulatedOracle {
            sequent: oracle.sequent().to_vec(),
            relations: sets.iter().map(|s| Ok((s.clone(), oracle.relation_at(s)?))).collect::<Result<_>>()?,
            profunctors: sigmas.iter().map(|s| Ok((s.clone(), oracle.profunctor_at(s)?))).collect::<Result<_>>()?,
        })
    }
}

impl FamilyOracle for TabulatedOracle {
    fn sequent(&self) -> &[Formula] {
        &self.sequent
    }

    fn relation_at(&self, sets: &SetAssignment) -> Result<BTreeSet<Tuple>> {
        self.relations
            .iter()
            .find(|(s, _)| s == sets)
            .map(|(_, r)| r.clone())
            .ok_or_else(|| Error::Domain(format!("no relation tabulated at {sets:?}")))
    }

    fn profunctor_at(&self, sigma: &Assignment) -> Result<Profunctor> {
        self.profunctors
            .iter()
            .find(|(s, _)| s == sigma)
            .map(|(_, p)| p.clone())
            .ok_or_else(|| Error::Domain("no profunctor tabulated at this assignment".into()))
    }

    fn transport(&self, _phi: &FunctorAssignment, _x: Elem) -> Result<Elem> {
        domain("tabulated families carry no transport")
    }
}

/// Axiom linking as a pair of mutually inverse maps between positive and
/// negative occurrences (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Linking {
    /// Negative occurrence ↦ positive occurrence.
    pub phi_plus: BTreeMap<usize, usize>,
    /// Positive occurrence ↦ negative occurrence.
    pub phi_minus: BTreeMap<usize, usize>,
}

impl Linking {
    pub fn of_structure(p: &ProofStructure) -> Self {
        let pairs = p.link_pairs();
        Linking {
            phi_plus: pairs.iter().map(|&(pos, neg)| (neg, pos)).collect(),
            phi_minus: pairs.iter().map(|&(pos, neg)| (pos, neg)).collect(),
        }
    }

    /// `(positive, negative)` pairs ordered by the positive occurrence.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.phi_minus.iter().map(|(&p, &n)| (p, n)).collect()
    }

    pub fn to_structure(&self, sequent: &[Formula]) -> Result<ProofStructure> {
        ProofStructure::new(sequent.to_vec(), &self.pairs())
    }

    /// 1-based `[low, high]` pairs, as in structure files.
    pub fn to_json(&self) -> Value {
        let mut links: Vec<[usize; 2]> = self.pairs().into_iter().map(|(a, b)| [a.min(b) + 1, a.max(b) + 1]).collect();
        links.sort();
        json!({ "links": links })
    }
}

/// Why a family was rejected by [`extract_linking`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnosis {
    /// A probe meets the family in `found` tuples instead of exactly one.
    NotStablyTotal { probe: &'static str, found: usize },
    /// The two probe maps are not mutually inverse.
    NotLogical { detail: String },
}

impl Diagnosis {
    pub fn message(&self) -> String {
        match self {
            Diagnosis::NotStablyTotal { probe, found } => {
                format!("family not stably total: the {probe} probe meets it in {found} tuples, not one")
            }
            Diagnosis::NotLogical { detail } => format!("family not logical/total: {detail}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extraction {
    Linked(Linking),
    Rejected(Diagnosis),
}

fn occurrences_of(seq: &[Formula]) -> Vec<(String, bool)> {
    seq.iter().flat_map(|f| f.leaves()).map(|o| (o.var, o.positive)).collect()
}

/// Probe over one polarity: each variable's set is its occurrences of
/// polarity `fixed_positive`, those occurrences are pinned to their own index,
/// and the unique related tuple maps the other polarity into them.
fn probe_map(
    oracle: &dyn FamilyOracle,
    fixed_positive: bool,
    probe: &'static str,
) -> Result<std::result::Result<BTreeMap<usize, usize>, Diagnosis>> {
    let occs = occurrences_of(oracle.sequent());
    let mut members: BTreeMap<String, Vec<usize>> = occs.iter().map(|(v, _)| (v.clone(), Vec::new())).collect();
    for (i, (v, pos)) in occs.iter().enumerate() {
        if *pos == fixed_positive {
            members.get_mut(v).expect("collected above").push(i);
        }
    }
    let sets: SetAssignment = members.iter().map(|(v, m)| (v.clone(), m.len())).collect();
    let mut fixed = BTreeMap::new();
    for m in members.values() {
        for (k, &i) in m.iter().enumerate() {
            fixed.insert(i, k);
        }
    }
    let found = oracle.relation_slice(&sets, &fixed)?;
    if found.len() != 1 {
        return Ok(Err(Diagnosis::NotStablyTotal { probe, found: found.len() }));
    }
    let tuple = &found[0];
    Ok(Ok((0..occs.len())
        .filter(|&i| occs[i].1 != fixed_positive)
        .map(|i| (i, members[&occs[i].0][tuple[i]]))
        .collect()))
}

/// Reads the linking off a family by its two polarity probes.
pub fn extract_linking(oracle: &dyn FamilyOracle) -> Result<Extraction> {
    let phi_minus = match probe_map(oracle, false, "negative-occurrence")? {
        Ok(m) => m,
        Err(d) => return Ok(Extraction::Rejected(d)),
    };
    let phi_plus = match probe_map(oracle, true, "positive-occurrence")? {
        Ok(m) => m,
        Err(d) => return Ok(Extraction::Rejected(d)),
    };
    for (&pos, &neg) in &phi_minus {
        if phi_plus.get(&neg) != Some(&pos) {
            return Ok(Extraction::Rejected(Diagnosis::NotLogical {
                detail: format!("occurrence {} is sent to {} and back elsewhere", pos + 1, neg + 1),
            }));
        }
    }
    for (&neg, &pos) in &phi_plus {
        if phi_minus.get(&pos) != Some(&neg) {
            return Ok(Extraction::Rejected(Diagnosis::NotLogical {
                detail: format!("occurrence {} is sent to {} and back elsewhere", neg + 1, pos + 1),
            }));
        }
    }
    Ok(Extraction::Linked(Linking { phi_plus, phi_minus }))
}

/// Whether some natural transformation `ϖ_σ ⟹ Γ(Φ) ; ϖ_σ′` exists: every orbit
/// of `ϖ_σ` needs an element of `ϖ_σ′` over the image object fixed by the image
/// of its stabilizer.
pub fn logicality_check(oracle: &dyn FamilyOracle, phi: &FunctorAssignment) -> Result<bool> {
    let (source, target) = endpoints(phi);
    let p = oracle.profunctor_at(&source)?;
    let q = oracle.profunctor_at(&target)?;
    let f = sequent_functor(oracle.sequent(), phi)?;
    Ok(p.orbits().iter().all(|o| {
        q.fiber_at(f.obj(o.base)).into_iter().any(|y| {
            let fix = q.stabilizer(y);
            o.stab.elems.iter().all(|&g| fix.contains(f.mor(g)))
        })
    }))
}

/// Checks that the oracle's own transport is equivariant along `Γ(Φ)`.
pub fn transport_is_natural(oracle: &dyn FamilyOracle, phi: &FunctorAssignment) -> Result<bool> {
    let (source, target) = endpoints(phi);
    let p = oracle.profunctor_at(&source)?;
    let q = oracle.profunctor_at(&target)?;
    let f = sequent_functor(oracle.sequent(), phi)?;
    let cat = p.cat();
    let mut xs = Vec::new();
    let mut checks = Vec::new();
    for x in p.elements() {
        let at = xs.len();
        xs.push(x);
        let o = p.elem_obj(x);
        for c in 0..cat.num_objects() {
            for m in cat.hom(o, c) {
                checks.push((at, xs.len(), m));
                xs.push(p.act_cat(x, m));
            }
        }
    }
    let images = oracle.transport_all(phi, &xs)?;
    for (i, &x) in xs.iter().enumerate() {
        if q.elem_obj(images[i]) != f.obj(p.elem_obj(x)) {
            return Ok(false);
        }
    }
    Ok(checks.iter().all(|&(at, moved, m)| images[moved] == q.act_cat(images[at], f.mor(m))))
}

/// An element over the diagonal tuple (both ends of link `k` at `link_objs[k]`)
/// whose stabilizer contains `(α⁻¹, α)` on every link, for every `α` in the
/// link's endomorphism group.
pub fn diagonal_bound_check(
    oracle: &dyn FamilyOracle,
    linking: &Linking,
    sigma: &Assignment,
    link_objs: &[Obj],
) -> Result<Option<Elem>> {
    let seq = oracle.sequent();
    let occs = occurrences_of(seq);
    let pairs = linking.pairs();
    if link_objs.len() != pairs.len() {
        return domain("one object per link expected");
    }
    let layout = Layout::new(seq, sigma)?;
    let mut objs = vec![0; occs.len()];
    for (&(pos, neg), &c) in pairs.iter().zip(link_objs) {
        objs[pos] = c;
        objs[neg] = c;
    }
    let p = oracle.profunctor_at(sigma)?;
    let fiber = p.fiber_at(layout.encode_obj(&objs));
    if fiber.is_empty() {
        return domain("the family is empty at the diagonal tuple");
    }
    let ids: Vec<Mor> = objs.iter().zip(layout.leaves()).map(|(&o, g)| g.identity(o)).collect();
    let mut anti = Vec::new();
    for (&(pos, neg), &c) in pairs.iter().zip(link_objs) {
        let g = &sigma[&occs[pos].0];
        for a in g.end(c) {
            let mut mors = ids.clone();
            mors[neg] = g.inverse(a);
            mors[pos] = a;
            anti.push(layout.encode_mor(&mors));
        }
    }
    Ok(fiber.into_iter().find(|&x| {
        let fix = p.stabilizer(x);
        anti.iter().all(|&m| fix.contains(m))
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeOutcome {
    pub name: String,
    /// `"explicit"`, `"block"` or `"skipped"`.
    pub method: &'static str,
    pub isomorphic: bool,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefinabilityReport {
    pub links: Vec<(usize, usize)>,
    pub probes: Vec<ProbeOutcome>,
}

impl DefinabilityReport {
    /// True when every probe ran and matched.
    pub fn all_isomorphic(&self) -> bool {
        self.probes.iter().all(|p| p.isomorphic)
    }

    pub fn first_mismatch(&self) -> Option<&ProbeOutcome> {
        self.probes.iter().find(|p| p.method != "skipped" && !p.isomorphic)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "links": self.links.iter().map(|&(a, b)| [a.min(b) + 1, a.max(b) + 1]).collect::<Vec<_>>(),
            "all_isomorphic": self.all_isomorphic(),
            "probes": self.probes.iter().map(|p| json!({
                "name": p.name,
                "method": p.method,
                "isomorphic": p.isomorphic,
                "detail": p.detail,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Named groupoid assignments for [`verify_definability`]: every variable sent
/// to the same groupoid, plus, with several variables, a mixed ℤ₂/ℤ₃ probe.
pub fn definability_probes(vars: &[String]) -> Vec<(String, Assignment)> {
    let z2 = Groupoid::cyclic(2);
    let z3 = Groupoid::cyclic(3);
    let s3 = Groupoid::symmetric(3);
    let z2xz3 = z2.product(&z3);
    let two = |g: &Groupoid| Groupoid::connected(g, 2).expect("small groupoid");
    let uniform = [
        ("1".to_string(), Groupoid::trivial()),
        ("Z2".into(), z2.clone()),
        ("Z3".into(), z3.clone()),
        ("S3".into(), s3.clone()),
        ("Z2xZ3".into(), z2xz3),
        ("Z2 on 2 objects".into(), two(&z2)),
        ("Z3 on 2 objects".into(), two(&z3)),
        ("S3 on 2 objects".into(), two(&s3)),
    ];
    let mut out: Vec<(String, Assignment)> = uniform
        .into_iter()
        .map(|(name, g)| (name, vars.iter().map(|v| (v.clone(), g.clone())).collect()))
        .collect();
    if vars.len() > 1 {
        let mixed = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), if i == 0 { z2.clone() } else { z3.clone() }))
            .collect();
        out.push(("Z2 first, Z3 elsewhere".into(), mixed));
    }
    out
}

fn orbit_diff(ours: usize, theirs: usize) -> String {
    if ours == theirs {
        "same number of orbits, but some stabilizers are not conjugate".into()
    } else {
        format!("the family has {ours} orbits, the interpretation {theirs}")
    }
}

/// `(method, orbits of the family, orbits of ⟦π⟧, isomorphic)`, or `None` when
/// neither presentation is available.
fn compare_at(
    oracle: &dyn FamilyOracle,
    pi: &ProofStructure,
    sigma: &Assignment,
    explicit: bool,
    bound: usize,
) -> Result<Option<(&'static str, usize, usize, bool)>> {
    let theirs = direct_structured(pi, sigma, DEFAULT_ORBIT_BOUND)?;
    if explicit {
        let ours = oracle.profunctor_at(sigma)?;
        let theirs = theirs.to_profunctor(&Layout::new(pi.sequent(), sigma)?, bound)?;
        let iso = ours.is_isomorphic(&theirs).is_some();
        return Ok(Some(("explicit", ours.orbits().len(), theirs.orbits().len(), iso)));
    }
    Ok(oracle
        .block_at(sigma)?
        .map(|ours| ("block", ours.num_orbits(), theirs.num_orbits(), ours.is_isomorphic(&theirs))))
}

/// Compares the family with `⟦π⟧` at each probe: explicitly when `⟦Γ⟧_σ` has at
/// most `bound` morphisms, otherwise blockwise when the oracle supports it.
pub fn verify_definability(
    oracle: &dyn FamilyOracle,
    linking: &Linking,
    probes: &[(String, Assignment)],
    bound: usize,
) -> Result<DefinabilityReport> {
    let pi = linking.to_structure(oracle.sequent())?;
    let mut outcomes = Vec::with_capacity(probes.len());
    for (name, sigma) in probes {
        let size = Layout::new(oracle.sequent(), sigma).map(|l| l.groupoid().num_morphisms());
        let explicit = matches!(size, Ok(n) if n <= bound);
        let outcome = match compare_at(oracle, &pi, sigma, explicit, bound) {
            Ok(Some((method, ours, theirs, isomorphic))) => ProbeOutcome {
                name: name.clone(),
                method,
                isomorphic,
                detail: (!isomorphic).then(|| orbit_diff(ours, theirs)),
            },
            Ok(None) => ProbeOutcome {
                name: name.clone(),
                method: "skipped",
                isomorphic: false,
                detail: Some("interpretation too large for an explicit comparison".into()),
            },
            Err(e @ (Error::Domain(_) | Error::Resource(_))) => ProbeOutcome {
                name: name.clone(),
                method: "skipped",
                isomorphic: false,
                detail: Some(e.to_string()),
            },
            Err(e) => return Err(e),
        };
        outcomes.push(outcome);
    }
    Ok(DefinabilityReport {
        links: linking.pairs(),
        probes: outcomes,
    })
}

/// Variables of a sequent, sorted.
pub fn sequent_variables(seq: &[Formula]) -> Vec<String> {
    occurrences_of(seq)
        .into_iter()
        .map(|(v, _)| v)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}
