//! Formulas as groupoids and creeds, proof structures as profunctors `I ⇸ ⟦Γ⟧`.
//!
//! Two presentations of a structure's interpretation are built here. The explicit
//! one is an ordinary [`Profunctor`] and is only feasible when `⟦Γ⟧` is small. The
//! block presentation ([`BlockProf`]) keeps one groupoid per leaf and stores each
//! orbit stabilizer as a product of subgroups over disjoint blocks of leaves,
//! which is exact for interpreted structures of any size.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use crate::creed::{par_creed, tensor_creed, Creed};
use crate::error::{domain, Error, Result};
use crate::grpd::{Groupoid, GroupoidFunctor, Mor, Obj, Subgroup};
use crate::mll::{Formula, ProofStructure};
use crate::prof::Profunctor;
use crate::union_find::UnionFind;

pub type Assignment = BTreeMap<String, Groupoid>;
pub type CreedAssignment = BTreeMap<String, Creed>;
pub type FunctorAssignment = BTreeMap<String, GroupoidFunctor>;

/// Default bound on `|⟦Γ⟧|` (morphisms) for explicit constructions.
pub const DEFAULT_EXPLICIT_BOUND: usize = 5_000;
/// Default bound on the number of orbits of a block presentation.
pub const DEFAULT_ORBIT_BOUND: usize = 4_096;

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, var: &str) -> Result<&'a T> {
    map.get(var)
        .ok_or_else(|| Error::Domain(format!("variable {var} is not assigned")))
}

fn checked_product(a: &Groupoid, b: &Groupoid) -> Result<Groupoid> {
    let fits = a.num_objects().checked_mul(b.num_objects()).is_some()
        && a.num_morphisms().checked_mul(b.num_morphisms()).is_some();
    if fits {
        Ok(a.product(b))
    } else {
        Err(Error::Resource("interpreted groupoid too large to index".into()))
    }
}

pub fn interp_formula(a: &Formula, sigma: &Assignment) -> Result<Groupoid> {
    match a {
        Formula::Var(x) => Ok(lookup(sigma, x)?.clone()),
        Formula::NegVar(x) => Ok(lookup(sigma, x)?.opposite()),
        Formula::Tensor(l, r) | Formula::Par(l, r) => checked_product(&interp_formula(l, sigma)?, &interp_formula(r, sigma)?),
    }
}

/// `⟦Γ⟧` of a sequent: the left-nested product of its formulas.
pub fn interp_sequent(seq: &[Formula], sigma: &Assignment) -> Result<Groupoid> {
    let mut parts = seq.iter().map(|f| interp_formula(f, sigma));
    let Some(first) = parts.next() else {
        return Ok(Groupoid::trivial());
    };
    parts.try_fold(first?, |acc, g| checked_product(&acc, &g?))
}

fn creed_size_check(g: &Groupoid, bound: usize) -> Result<()> {
    if g.num_morphisms() > bound {
        return Err(Error::Resource(format!(
            "creed on a groupoid with {} morphisms exceeds the bound {bound}",
            g.num_morphisms()
        )));
    }
    Ok(())
}

/// `⟦A⟧_σ` for Boolean creeds, enumerated explicitly.
pub fn interp_formula_creed(a: &Formula, sigma: &CreedAssignment, bound: usize) -> Result<Creed> {
    let groupoids: Assignment = sigma.iter().map(|(k, c)| (k.clone(), c.groupoid().clone())).collect();
    creed_size_check(&interp_formula(a, &groupoids)?, bound)?;
    formula_creed(a, sigma)
}

fn formula_creed(a: &Formula, sigma: &CreedAssignment) -> Result<Creed> {
    match a {
        Formula::Var(x) => Ok(lookup(sigma, x)?.clone()),
        Formula::NegVar(x) => Ok(lookup(sigma, x)?.dual().on_opposite()),
        Formula::Tensor(l, r) => tensor_creed(&formula_creed(l, sigma)?, &formula_creed(r, sigma)?),
        Formula::Par(l, r) => par_creed(&formula_creed(l, sigma)?, &formula_creed(r, sigma)?),
    }
}

/// `⟦Γ⟧_σ` for a sequent, read as the left-nested par of its formulas.
pub fn interp_sequent_creed(seq: &[Formula], sigma: &CreedAssignment, bound: usize) -> Result<Creed> {
    let Some(first) = seq.first() else {
        return domain("empty sequent");
    };
    let folded = seq[1..].iter().cloned().fold(first.clone(), Formula::par);
    interp_formula_creed(&folded, sigma, bound)
}

/// `A(Φ)`: products of the components, opposites at negative literals.
pub fn interp_functor(a: &Formula, phi: &FunctorAssignment) -> Result<GroupoidFunctor> {
    match a {
        Formula::Var(x) => Ok(lookup(phi, x)?.clone()),
        Formula::NegVar(x) => Ok(lookup(phi, x)?.opposite()),
        Formula::Tensor(l, r) | Formula::Par(l, r) => Ok(interp_functor(l, phi)?.product(&interp_functor(r, phi)?)),
    }
}

/// Per-leaf view of `⟦Γ⟧`: converts between tuples of leaf ids and ids of the
/// nested product groupoid.
#[derive(Clone, Debug)]
pub struct Layout {
    leaves: Vec<Groupoid>,
    shape: Shape,
}

#[derive(Clone, Debug)]
enum Shape {
    Leaf(usize),
    Pair(Box<Shape>, Box<Shape>, Groupoid),
}

impl Shape {
    fn groupoid<'a>(&'a self, leaves: &'a [Groupoid]) -> &'a Groupoid {
        match self {
            Shape::Leaf(i) => &leaves[*i],
            Shape::Pair(_, _, g) => g,
        }
    }

    fn encode(&self, ids: &[usize], obj: bool) -> usize {
        match self {
            Shape::Leaf(i) => ids[*i],
            Shape::Pair(l, r, g) => {
                let (a, b) = (l.encode(ids, obj), r.encode(ids, obj));
                if obj {
                    g.pair_obj(a, b)
                } else {
                    g.pair_mor(a, b)
                }
            }
        }
    }

    fn decode(&self, id: usize, obj: bool, out: &mut [usize]) {
        match self {
            Shape::Leaf(i) => out[*i] = id,
            Shape::Pair(l, r, g) => {
                let (a, b) = if obj { g.split_obj(id) } else { g.split_mor(id) };
                l.decode(a, obj, out);
                r.decode(b, obj, out);
            }
        }
    }
}

fn formula_shape(a: &Formula, leaves: &mut Vec<Groupoid>, sigma: &Assignment) -> Result<Shape> {
    match a {
        Formula::Var(x) => {
            leaves.push(lookup(sigma, x)?.clone());
            Ok(Shape::Leaf(leaves.len() - 1))
        }
        Formula::NegVar(x) => {
            leaves.push(lookup(sigma, x)?.opposite());
            Ok(Shape::Leaf(leaves.len() - 1))
        }
        Formula::Tensor(l, r) | Formula::Par(l, r) => {
            let ls = formula_shape(l, leaves, sigma)?;
            let rs = formula_shape(r, leaves, sigma)?;
            pair_shape(ls, rs, leaves)
        }
    }
}

fn pair_shape(l: Shape, r: Shape, leaves: &[Groupoid]) -> Result<Shape> {
    let g = checked_product(l.groupoid(leaves), r.groupoid(leaves))?;
    Ok(Shape::Pair(Box::new(l), Box::new(r), g))
}

/// Per-leaf groupoids of a sequent without building the product.
pub fn leaf_groupoids(seq: &[Formula], sigma: &Assignment) -> Result<Vec<Groupoid>> {
    let mut out = Vec::new();
    for f in seq {
        for occ in f.leaves() {
            let g = lookup(sigma, &occ.var)?;
            out.push(if occ.positive { g.clone() } else { g.opposite() });
        }
    }
    Ok(out)
}

impl Layout {
    pub fn new(seq: &[Formula], sigma: &Assignment) -> Result<Self> {
        let mut leaves = Vec::new();
        let mut shape: Option<Shape> = None;
        for f in seq {
            let s = formula_shape(f, &mut leaves, sigma)?;
            shape = Some(match shape {
                None => s,
                Some(acc) => pair_shape(acc, s, &leaves)?,
            });
        }
        let Some(shape) = shape else {
            return domain("empty sequent");
        };
        Ok(Layout { leaves, shape })
    }

    pub fn groupoid(&self) -> &Groupoid {
        self.shape.groupoid(&self.leaves)
    }

    pub fn leaves(&self) -> &[Groupoid] {
        &self.leaves
    }

    pub fn encode_obj(&self, objs: &[Obj]) -> Obj {
        self.shape.encode(objs, true)
    }

    pub fn encode_mor(&self, mors: &[Mor]) -> Mor {
        self.shape.encode(mors, false)
    }

    pub fn decode_obj(&self, o: Obj) -> Vec<Obj> {
        let mut out = vec![0; self.leaves.len()];
        self.shape.decode(o, true, &mut out);
        out
    }

    pub fn decode_mor(&self, m: Mor) -> Vec<Mor> {
        let mut out = vec![0; self.leaves.len()];
        self.shape.decode(m, false, &mut out);
        out
    }
}

/// Occurrence order of the factors of `∏ₖ (𝔸ₖᵒᵖ × 𝔸ₖ)`, one pair per link
/// (links in `link_pairs` order): entry `j` is the leaf that factor `j` lands on.
pub fn leaf_permutation(p: &ProofStructure) -> Vec<usize> {
    p.link_pairs().into_iter().flat_map(|(pos, neg)| [neg, pos]).collect()
}

fn link_groupoid<'a>(p: &ProofStructure, sigma: &'a Assignment, pos: usize) -> Result<&'a Groupoid> {
    lookup(sigma, &p.occurrences()[pos].var)
}

/// Leaf objects of the experiment with the given link labels (one label per
/// link, in `link_pairs` order).
pub fn experiment_objects(p: &ProofStructure, sigma: &Assignment, labels: &[Mor]) -> Result<Vec<Obj>> {
    let pairs = p.link_pairs();
    if labels.len() != pairs.len() {
        return domain("one label per axiom link expected");
    }
    let mut objs = vec![0; p.occurrences().len()];
    for (&(pos, neg), &alpha) in pairs.iter().zip(labels) {
        let g = link_groupoid(p, sigma, pos)?;
        if alpha >= g.num_morphisms() {
            return domain("label is not a morphism of the variable's groupoid");
        }
        objs[neg] = g.src(alpha);
        objs[pos] = g.dst(alpha);
    }
    Ok(objs)
}

/// Right action on experiments: leaf morphisms (ids of the leaf groupoids,
/// opposite at negative leaves) relabel each link to `m_neg ; α ; m_pos`.
pub fn act_experiment(p: &ProofStructure, sigma: &Assignment, labels: &[Mor], leaf_mors: &[Mor]) -> Result<Vec<Mor>> {
    let objs = experiment_objects(p, sigma, labels)?;
    if leaf_mors.len() != objs.len() {
        return domain("one morphism per leaf expected");
    }
    let mut out = Vec::with_capacity(labels.len());
    for (&(pos, neg), &alpha) in p.link_pairs().iter().zip(labels) {
        let g = link_groupoid(p, sigma, pos)?;
        let (m_neg, m_pos) = (leaf_mors[neg], leaf_mors[pos]);
        if g.dst(m_neg) != objs[neg] || g.src(m_pos) != objs[pos] {
            return domain("leaf morphism does not start at the experiment's object");
        }
        out.push(g.mul(g.mul(m_neg, alpha), m_pos));
    }
    Ok(out)
}

/// Maps each label through the variable's functor.
pub fn transport_experiment(p: &ProofStructure, phi: &FunctorAssignment, labels: &[Mor]) -> Result<Vec<Mor>> {
    p.link_pairs()
        .iter()
        .zip(labels)
        .map(|(&(pos, _), &alpha)| Ok(lookup(phi, &p.occurrences()[pos].var)?.mor(alpha)))
        .collect()
}

/// A subgroup of `∏_{l ∈ leaves} End(base_l)`, as tuples aligned with `leaves`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub leaves: Vec<usize>,
    pub elems: Vec<Vec<Mor>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockOrbit {
    /// Leaf objects, each an iso-class representative of its leaf groupoid.
    pub base: Vec<Obj>,
    /// Disjoint blocks; leaves outside every block carry only the identity.
    pub blocks: Vec<Block>,
}

/// Orbit form of a profunctor `I ⇸ ⟦Γ⟧` with blockwise-product stabilizers.
#[derive(Clone, Debug)]
pub struct BlockProf {
    pub leaves: Vec<Groupoid>,
    pub orbits: Vec<BlockOrbit>,
}

fn end_tuples(leaves: &[Groupoid], base: &[Obj], which: &[usize]) -> Vec<Vec<Mor>> {
    let mut out = vec![Vec::new()];
    for &l in which {
        let ends = leaves[l].end(base[l]);
        out = out
            .into_iter()
            .flat_map(|t| {
                ends.iter().map(move |&m| {
                    let mut t = t.clone();
                    t.push(m);
                    t
                })
            })
            .collect();
    }
    out
}

impl Block {
    fn conjugate(&self, leaves: &[Groupoid], by: &[Mor]) -> Vec<Vec<Mor>> {
        let mut out: Vec<Vec<Mor>> = self
            .elems
            .iter()
            .map(|t| {
                t.iter()
                    .zip(&self.leaves)
                    .zip(by)
                    .map(|((&m, &l), &b)| {
                        let g = &leaves[l];
                        g.mul(g.mul(g.inverse(b), m), b)
                    })
                    .collect()
            })
            .collect();
        out.sort();
        out
    }
}

impl BlockProf {
    pub fn num_orbits(&self) -> usize {
        self.orbits.len()
    }

    /// Blocks of `orbit` coarsened to `partition` (a list of disjoint, sorted
    /// leaf sets covering every leaf that some block mentions).
    fn regroup(&self, orbit: &BlockOrbit, partition: &[Vec<usize>]) -> Vec<Block> {
        partition
            .iter()
            .map(|part| {
                let mut elems: Vec<BTreeMap<usize, Mor>> = vec![BTreeMap::new()];
                for b in orbit.blocks.iter().filter(|b| part.contains(&b.leaves[0])) {
                    elems = elems
                        .into_iter()
                        .flat_map(|acc| {
                            b.elems.iter().map(move |t| {
                                let mut acc = acc.clone();
                                acc.extend(b.leaves.iter().copied().zip(t.iter().copied()));
                                acc
                            })
                        })
                        .collect();
                }
                let mut tuples: Vec<Vec<Mor>> = elems
                    .into_iter()
                    .map(|m| {
                        part.iter()
                            .map(|l| m.get(l).copied().unwrap_or_else(|| self.leaves[*l].identity(orbit.base[*l])))
                            .collect()
                    })
                    .collect();
                tuples.sort();
                Block {
                    leaves: part.clone(),
                    elems: tuples,
                }
            })
            .collect()
    }

    fn partition_with(&self, other: &BlockProf) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.leaves.len());
        let mut touched = BTreeSet::new();
        for o in self.orbits.iter().chain(&other.orbits) {
            for b in &o.blocks {
                touched.extend(b.leaves.iter().copied());
                for w in b.leaves.windows(2) {
                    uf.union(w[0], w[1]);
                }
            }
        }
        let mut parts: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for l in touched {
            parts.entry(uf.find(l)).or_default().push(l);
        }
        parts.into_values().collect()
    }

    /// Orbit matching up to conjugacy, blockwise. Presentations with different
    /// block partitions are compared on their common coarsening.
    pub fn is_isomorphic(&self, other: &BlockProf) -> bool {
        if self.leaves != other.leaves || self.orbits.len() != other.orbits.len() {
            return false;
        }
        let partition = self.partition_with(other);
        let mine: Vec<Vec<Block>> = self.orbits.iter().map(|o| self.regroup(o, &partition)).collect();
        let theirs: Vec<Vec<Block>> = other.orbits.iter().map(|o| other.regroup(o, &partition)).collect();
        let mut used = vec![false; theirs.len()];
        'orbit: for (i, blocks) in mine.iter().enumerate() {
            let base = &self.orbits[i].base;
            for (j, cand) in theirs.iter().enumerate() {
                if used[j] || other.orbits[j].base != *base {
                    continue;
                }
                let conjugate = blocks.iter().zip(cand).all(|(b, c)| {
                    b.elems.len() == c.elems.len()
                        && end_tuples(&self.leaves, base, &b.leaves)
                            .iter()
                            .any(|by| b.conjugate(&self.leaves, by) == c.elems)
                });
                if conjugate {
                    used[j] = true;
                    continue 'orbit;
                }
            }
            return false;
        }
        true
    }

    /// Number of elements at the given leaf objects.
    pub fn fiber_count(&self, objs: &[Obj]) -> u128 {
        self.orbits
            .iter()
            .map(|o| {
                let mut homs: u128 = 1;
                for (l, g) in self.leaves.iter().enumerate() {
                    homs *= g.hom(o.base[l], objs[l]).len() as u128;
                }
                let stab: u128 = o.blocks.iter().map(|b| b.elems.len() as u128).product();
                homs / stab
            })
            .sum()
    }

    /// The explicit profunctor `I ⇸ ⟦Γ⟧` over the given layout.
    pub fn to_profunctor(&self, layout: &Layout, bound: usize) -> Result<Profunctor> {
        let g = layout.groupoid();
        if g.num_morphisms() > bound {
            return Err(Error::Resource(format!(
                "explicit interpretation with {} morphisms exceeds the bound {bound}",
                g.num_morphisms()
            )));
        }
        let mut orbits = Vec::with_capacity(self.orbits.len());
        for o in &self.orbits {
            let ids: Vec<Mor> = o.base.iter().zip(&self.leaves).map(|(&b, lg)| lg.identity(b)).collect();
            let mut tuples = vec![ids];
            for b in &o.blocks {
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        b.elems.iter().map(move |e| {
                            let mut t = t.clone();
                            for (&l, &m) in b.leaves.iter().zip(e) {
                                t[l] = m;
                            }
                            t
                        })
                    })
                    .collect();
            }
            let base = layout.encode_obj(&o.base);
            let stab = Subgroup::new(g, base, tuples.iter().map(|t| layout.encode_mor(t)))?;
            orbits.push((base, stab));
        }
        Profunctor::from_orbits(&Groupoid::trivial(), g, orbits)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "orbits": self.orbits.iter().map(|o| json!({
                "base": o.base,
                "blocks": o.blocks.iter().map(|b| json!({
                    "leaves": b.leaves.iter().map(|l| l + 1).collect::<Vec<_>>(),
                    "stabilizer": b.elems.iter().map(|t| {
                        t.iter().zip(&b.leaves).map(|(&m, &l)| self.leaves[l].label(m)).collect::<Vec<_>>()
                    }).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Cartesian product of per-link choices, bounded.
fn link_choices<T: Clone>(per_link: &[Vec<T>], bound: usize) -> Result<Vec<Vec<T>>> {
    let mut total: usize = 1;
    for c in per_link {
        total = total.saturating_mul(c.len());
    }
    if total > bound {
        return Err(Error::Resource(format!("{total} orbits exceed the bound {bound}")));
    }
    let mut out = vec![Vec::new()];
    for choices in per_link {
        out = out
            .into_iter()
            .flat_map(|acc: Vec<T>| {
                choices.iter().map(move |c| {
                    let mut acc = acc.clone();
                    acc.push(c.clone());
                    acc
                })
            })
            .collect();
    }
    Ok(out)
}

/// `Exp(π)` in block form: for every choice of iso class per link, the orbit of
/// the all-identities labelling at the representatives, with stabilizer found by
/// testing every pair of leaf endomorphisms of each link.
pub fn experiments_structured(p: &ProofStructure, sigma: &Assignment, orbit_bound: usize) -> Result<BlockProf> {
    let leaves = leaf_groupoids(p.sequent(), sigma)?;
    let pairs = p.link_pairs();
    let mut per_link = Vec::with_capacity(pairs.len());
    for &(pos, _) in &pairs {
        per_link.push(link_groupoid(p, sigma, pos)?.iso_classes().reps.clone());
    }
    let mut orbits = Vec::new();
    for reps in link_choices(&per_link, orbit_bound)? {
        let mut base = vec![0; leaves.len()];
        let mut labels = Vec::with_capacity(pairs.len());
        for (&(pos, neg), &r) in pairs.iter().zip(&reps) {
            base[pos] = r;
            base[neg] = r;
            labels.push(link_groupoid(p, sigma, pos)?.identity(r));
        }
        let mut blocks = Vec::with_capacity(pairs.len());
        for (k, &(pos, neg)) in pairs.iter().enumerate() {
            let g = link_groupoid(p, sigma, pos)?;
            let (lo, hi) = (pos.min(neg), pos.max(neg));
            let mut elems = Vec::new();
            for &m_lo in &g.end(base[lo]) {
                for &m_hi in &g.end(base[hi]) {
                    let mut mors: Vec<Mor> = base.iter().zip(&leaves).map(|(&b, lg)| lg.identity(b)).collect();
                    mors[lo] = m_lo;
                    mors[hi] = m_hi;
                    if act_experiment(p, sigma, &labels, &mors)?[k] == labels[k] {
                        elems.push(vec![m_lo, m_hi]);
                    }
                }
            }
            blocks.push(Block {
                leaves: vec![lo, hi],
                elems,
            });
        }
        orbits.push(BlockOrbit { base, blocks });
    }
    Ok(BlockProf { leaves, orbits })
}

/// One orbit of a link's unit: negative object, positive object, stabilizer pairs.
type LinkOrbit = (Obj, Obj, Vec<(Mor, Mor)>);

/// `⟦π⟧` in block form: the orbits of `η` for each link, placed on the leaves by
/// [`leaf_permutation`].
pub fn direct_structured(p: &ProofStructure, sigma: &Assignment, orbit_bound: usize) -> Result<BlockProf> {
    let leaves = leaf_groupoids(p.sequent(), sigma)?;
    let perm = leaf_permutation(p);
    let pairs = p.link_pairs();
    let mut per_link = Vec::with_capacity(pairs.len());
    for &(pos, _) in &pairs {
        let eta = Profunctor::unit_eta(link_groupoid(p, sigma, pos)?);
        let dst = eta.dst().clone();
        let orbits: Vec<LinkOrbit> = eta
            .orbits()
            .iter()
            .map(|o| {
                let (neg_obj, pos_obj) = dst.split_obj(o.base);
                let stab = o.stab.elems.iter().map(|&m| dst.split_mor(m)).collect();
                (neg_obj, pos_obj, stab)
            })
            .collect();
        per_link.push(orbits);
    }
    let mut orbits = Vec::new();
    for choice in link_choices(&per_link, orbit_bound)? {
        let mut base = vec![0; leaves.len()];
        let mut blocks = Vec::with_capacity(choice.len());
        for (k, (neg_obj, pos_obj, stab)) in choice.into_iter().enumerate() {
            let (neg, pos) = (perm[2 * k], perm[2 * k + 1]);
            base[neg] = neg_obj;
            base[pos] = pos_obj;
            let mut elems: Vec<Vec<Mor>> = stab
                .into_iter()
                .map(|(m_neg, m_pos)| if neg < pos { vec![m_neg, m_pos] } else { vec![m_pos, m_neg] })
                .collect();
            elems.sort();
            blocks.push(Block {
                leaves: vec![neg.min(pos), neg.max(pos)],
                elems,
            });
        }
        orbits.push(BlockOrbit { base, blocks });
    }
    Ok(BlockProf { leaves, orbits })
}

/// `Exp(π)` as an explicit profunctor `I ⇸ ⟦Γ⟧`.
pub fn experiments(p: &ProofStructure, sigma: &Assignment, bound: usize) -> Result<Profunctor> {
    let layout = Layout::new(p.sequent(), sigma)?;
    experiments_structured(p, sigma, DEFAULT_ORBIT_BOUND)?.to_profunctor(&layout, bound)
}

/// `⟦π⟧` by composition: the tensor of one `η` per link, then reindexing along the
/// isomorphism `∏ₖ (𝔸ₖᵒᵖ × 𝔸ₖ) ≅ ⟦Γ⟧` that sends factors to their leaves.
pub fn direct_interp(p: &ProofStructure, sigma: &Assignment, bound: usize) -> Result<Profunctor> {
    let layout = Layout::new(p.sequent(), sigma)?;
    let target = layout.groupoid().clone();
    if target.num_morphisms() > bound {
        return Err(Error::Resource(format!(
            "explicit interpretation with {} morphisms exceeds the bound {bound}",
            target.num_morphisms()
        )));
    }
    let pairs = p.link_pairs();
    let mut etas = Vec::with_capacity(pairs.len());
    for &(pos, _) in &pairs {
        etas.push(Profunctor::unit_eta(link_groupoid(p, sigma, pos)?));
    }
    let Some(first) = etas.first() else {
        return domain("structure without axiom links");
    };
    let mut linked = first.clone();
    for eta in &etas[1..] {
        linked = linked.tensor(eta)?;
    }
    // `linked` starts at a nested product of trivial groupoids; pull it back to I.
    let unitor = GroupoidFunctor::new(Groupoid::trivial(), linked.src().clone(), vec![0], vec![0])?;
    let linked = Profunctor::functor_lower(&unitor).compose(&linked)?;

    let source = linked.dst().clone();
    let perm = leaf_permutation(p);
    let flatten = |id: usize, obj: bool| -> Vec<usize> {
        // Left-nested pairs of (neg, pos) factors, innermost first.
        let mut factors = Vec::with_capacity(perm.len());
        let mut cur = id;
        let mut g = source.clone();
        for _ in 1..etas.len() {
            let (l, r) = g.product_factors().map(|(a, b)| (a.clone(), b.clone())).expect("nested product");
            let (rest, last) = if obj { g.split_obj(cur) } else { g.split_mor(cur) };
            factors.push((last, r));
            cur = rest;
            g = l;
        }
        factors.push((cur, g));
        factors.reverse();
        let mut leaf_ids = vec![0; perm.len()];
        for (k, (id, g)) in factors.into_iter().enumerate() {
            let (a, b) = if obj { g.split_obj(id) } else { g.split_mor(id) };
            leaf_ids[perm[2 * k]] = a;
            leaf_ids[perm[2 * k + 1]] = b;
        }
        leaf_ids
    };
    let obj_map = (0..source.num_objects()).map(|o| layout.encode_obj(&flatten(o, true))).collect();
    let mor_map = (0..source.num_morphisms()).map(|m| layout.encode_mor(&flatten(m, false))).collect();
    let reindex = GroupoidFunctor::new(source, target, obj_map, mor_map)?;
    linked.compose(&Profunctor::functor_lower(&reindex))
}
