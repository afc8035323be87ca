//! The creed-kit criterion: checking one Boolean creed assignment, constructive
//! refutation of incorrect structures, and agreement with the switching test.
//!
//! The criterion quantifies over every Boolean creed assignment. Completeness is
//! covered by [`refute_incorrect`], which builds an explicit violating stabilizer
//! element for any structure with a cyclic switching. Soundness is only sampled,
//! by running [`creed_kit_check`] over a finite probe catalog; passing probes is
//! evidence, not a decision procedure.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::creed::{models, Creed};
use crate::error::{validation, Error, Result};
use crate::grpd::{Groupoid, Mor, DEFAULT_GROUP_BOUND};
use crate::interp::{
    act_experiment, experiments, interp_sequent_creed, Assignment, CreedAssignment, DEFAULT_EXPLICIT_BOUND,
};
use crate::mll::{
    dr_check_mix, dr_graph, find_cycle_switching, random_structure, wrap_single, Formula, NodeKind, ProofStructure,
    Side, Switching,
};

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|&d| n.is_multiple_of(d)).collect()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Membership of the powers `e^d` of one element in a creed, for every divisor
/// `d` of `ord(e)`. Creed membership only depends on the cyclic subgroup, so
/// this determines membership of every power.
#[derive(Clone, Debug)]
struct PowerMask {
    order: usize,
    member: BTreeMap<usize, bool>,
}

impl PowerMask {
    fn at(&self, k: usize) -> bool {
        self.member[&gcd(k, self.order)]
    }

    /// `e^d ∈ X⊥` iff no nonidentity power of `e^d` is in `X`.
    fn dual(&self) -> PowerMask {
        let member = self
            .member
            .keys()
            .map(|&d| {
                let inside = self
                    .member
                    .iter()
                    .any(|(&e, &m)| m && e % d == 0 && e != self.order);
                (d, !inside)
            })
            .collect();
        PowerMask {
            order: self.order,
            member,
        }
    }

    fn product(l: &PowerMask, r: &PowerMask) -> PowerMask {
        let order = l.order / gcd(l.order, r.order) * r.order;
        let member = divisors(order).into_iter().map(|d| (d, l.at(d) && r.at(d))).collect();
        PowerMask { order, member }
    }
}

fn require_groups(sigma: &CreedAssignment) -> Result<()> {
    for (v, c) in sigma {
        if !c.groupoid().is_group() {
            return validation(format!("variable {v} is not assigned a group"));
        }
        if !c.is_boolean() {
            return validation(format!("creed for {v} is not Boolean"));
        }
    }
    Ok(())
}

fn creed_for<'a>(sigma: &'a CreedAssignment, var: &str) -> Result<&'a Creed> {
    sigma
        .get(var)
        .ok_or_else(|| Error::Domain(format!("variable {var} is not assigned")))
}

fn leaf_mask(g: &Groupoid, c: &Creed, e: Mor) -> PowerMask {
    let order = g.order(e);
    let member = divisors(order).into_iter().map(|d| (d, c.contains(0, g.power(e, d)))).collect();
    PowerMask { order, member }
}

fn formula_mask(
    a: &Formula,
    sigma: &CreedAssignment,
    duals: &BTreeMap<String, Creed>,
    elems: &[Mor],
    next: &mut usize,
) -> Result<PowerMask> {
    match a {
        Formula::Var(x) | Formula::NegVar(x) => {
            let c = creed_for(sigma, x)?;
            let e = elems[*next];
            *next += 1;
            let creed = if matches!(a, Formula::Var(_)) { c } else { &duals[x] };
            Ok(leaf_mask(c.groupoid(), creed, e))
        }
        Formula::Tensor(l, r) => {
            let lm = formula_mask(l, sigma, duals, elems, next)?;
            let rm = formula_mask(r, sigma, duals, elems, next)?;
            Ok(PowerMask::product(&lm, &rm).dual().dual())
        }
        Formula::Par(l, r) => {
            let lm = formula_mask(l, sigma, duals, elems, next)?;
            let rm = formula_mask(r, sigma, duals, elems, next)?;
            Ok(PowerMask::product(&lm.dual(), &rm.dual()).dual())
        }
    }
}

/// Whether the endomorphism with leaf components `elems` lies in `⟦A⟧_σ` and in
/// `⟦A⟧_σ⊥`, for Boolean creeds on groups. Nothing is enumerated beyond the
/// cyclic subgroup of the element.
pub fn formula_membership(a: &Formula, sigma: &CreedAssignment, elems: &[Mor]) -> Result<(bool, bool)> {
    require_groups(sigma)?;
    if elems.len() != a.leaves().len() {
        return validation("one component per leaf expected");
    }
    let duals = sigma.iter().map(|(k, c)| (k.clone(), c.dual())).collect();
    let mask = formula_mask(a, sigma, &duals, elems, &mut 0)?;
    Ok((mask.at(1), mask.dual().at(1)))
}

/// Membership state of a prime-order (or identity) element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Id,
    In,
    Out,
}

fn tensor_state(l: State, r: State) -> State {
    match (l, r) {
        (State::Id, State::Id) => State::Id,
        (State::Out, _) | (_, State::Out) => State::Out,
        _ => State::In,
    }
}

fn par_state(l: State, r: State) -> State {
    match (l, r) {
        (State::Id, State::Id) => State::Id,
        (State::In, _) | (_, State::In) => State::In,
        _ => State::Out,
    }
}

fn eval_state(a: &Formula, leaves: &[State], next: &mut usize) -> State {
    match a {
        Formula::Var(_) | Formula::NegVar(_) => {
            *next += 1;
            leaves[*next - 1]
        }
        Formula::Tensor(l, r) => {
            let ls = eval_state(l, leaves, next);
            tensor_state(ls, eval_state(r, leaves, next))
        }
        Formula::Par(l, r) => {
            let ls = eval_state(l, leaves, next);
            par_state(ls, eval_state(r, leaves, next))
        }
    }
}

fn sequent_formula(p: &ProofStructure) -> Formula {
    let seq = p.sequent();
    seq[1..].iter().cloned().fold(seq[0].clone(), Formula::par)
}

fn primes_dividing(n: usize) -> Vec<usize> {
    (2..=n).filter(|&p| n.is_multiple_of(p) && (2..p).all(|q| p % q != 0)).collect()
}

/// An element of a stabilizer of `Exp(π)_σ` outside `⟦Γ⟧_σ`, as leaf components,
/// or `None` when `⟦π⟧_σ ⊨ ⟦Γ⟧_σ`. Group assignments only.
///
/// For Boolean creeds an element lies in the creed iff all its prime-order powers
/// do, and for a prime-order element tensor membership means both components are
/// in while par membership means some nonidentity component is in. Over groups
/// `Exp(π)` has one orbit whose stabilizer is the per-link anti-diagonal, so it
/// suffices to search prime-order anti-diagonal elements, one membership pattern
/// per link.
pub fn creed_kit_violation(p: &ProofStructure, sigma: &CreedAssignment) -> Result<Option<Vec<Mor>>> {
    require_groups(sigma)?;
    let pairs = p.link_pairs();
    let formula = sequent_formula(p);
    let mut primes: Vec<usize> = sigma.values().flat_map(|c| primes_dividing(c.groupoid().num_morphisms())).collect();
    primes.sort_unstable();
    primes.dedup();
    for prime in primes {
        // Per link: witnesses `g` of order `prime`, one per membership pattern.
        let mut options: Vec<Vec<(bool, Mor)>> = Vec::with_capacity(pairs.len());
        for &(pos, _) in &pairs {
            let c = creed_for(sigma, &p.occurrences()[pos].var)?;
            let g = c.groupoid();
            let mut found: Vec<(bool, Mor)> = Vec::new();
            for e in g.end(0) {
                if g.order(e) == prime {
                    let inside = c.contains(0, e);
                    if !found.iter().any(|&(b, _)| b == inside) {
                        found.push((inside, e));
                    }
                }
            }
            options.push(found);
        }
        let mut choice = vec![0usize; pairs.len()];
        let mut states = vec![State::Id; p.occurrences().len()];
        loop {
            for (k, &(pos, neg)) in pairs.iter().enumerate() {
                let (s_pos, s_neg) = match choice[k] {
                    0 => (State::Id, State::Id),
                    i if options[k][i - 1].0 => (State::In, State::Out),
                    _ => (State::Out, State::In),
                };
                states[pos] = s_pos;
                states[neg] = s_neg;
            }
            if eval_state(&formula, &states, &mut 0) == State::Out {
                let mut elems = vec![0; states.len()];
                for (k, &(pos, neg)) in pairs.iter().enumerate() {
                    let g = creed_for(sigma, &p.occurrences()[pos].var)?.groupoid();
                    let e = if choice[k] == 0 { g.identity(0) } else { options[k][choice[k] - 1].1 };
                    elems[pos] = e;
                    elems[neg] = g.inverse(e);
                }
                return Ok(Some(elems));
            }
            // Odometer over the per-link choices.
            let mut k = 0;
            while k < choice.len() {
                choice[k] += 1;
                if choice[k] <= options[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
    }
    Ok(None)
}

/// `⟦π⟧_σ ⊨ ⟦Γ⟧_σ` for one assignment of Boolean creeds.
pub fn creed_kit_check(p: &ProofStructure, sigma: &CreedAssignment) -> Result<bool> {
    if sigma.values().all(|c| c.groupoid().is_group()) {
        return Ok(creed_kit_violation(p, sigma)?.is_none());
    }
    creed_kit_check_explicit(p, sigma, DEFAULT_EXPLICIT_BOUND)
}

/// The same check with `Exp(π)_σ` and `⟦Γ⟧_σ` enumerated in full; works for any
/// groupoids but only within `bound` morphisms of `⟦Γ⟧`.
pub fn creed_kit_check_explicit(p: &ProofStructure, sigma: &CreedAssignment, bound: usize) -> Result<bool> {
    let groupoids: Assignment = sigma.iter().map(|(k, c)| (k.clone(), c.groupoid().clone())).collect();
    let exp = experiments(p, &groupoids, bound)?;
    let creed = interp_sequent_creed(p.sequent(), sigma, bound)?;
    models(&exp, &creed)
}

/// Direction of the edge below a node, relative to the node: `Up` when the
/// traversal enters the node from its parent, `Down` when it leaves toward it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
    None,
}

impl Direction {
    fn as_str(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::None => "none",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeClaim {
    pub node: usize,
    pub direction: Direction,
    /// Local pattern number, 0 to 7; `None` for leaves.
    pub case: Option<u8>,
    pub in_creed: bool,
    pub in_dual: bool,
}

/// A violating stabilizer element for an incorrect structure, with everything
/// needed to re-check it.
#[derive(Clone, Debug)]
pub struct CounterexampleReport {
    /// The structure over a single conclusion; occurrences are unchanged.
    pub wrapped: ProofStructure,
    pub witness: Witness,
    /// Why the primary witness was not used, if it was not.
    pub primary_failure: Option<String>,
    pub switching: Switching,
    /// Node ids of the cycle, starting at `node_n` and leaving through its left premise.
    pub cycle: Vec<usize>,
    pub node_n: usize,
    /// Par nodes whose choice was flipped to reach `node_n` from the root.
    pub flipped: Vec<usize>,
    /// Direction of the edge below each node.
    pub orientation: Vec<Direction>,
    /// Component of the endomorphism at each leaf occurrence.
    pub gamma: Vec<Mor>,
    pub claims: Vec<NodeClaim>,
}

impl CounterexampleReport {
    pub fn to_json(&self) -> Value {
        let p = &self.wrapped;
        let node_name = |n: usize| match p.nodes()[n].kind {
            NodeKind::Leaf(o) => format!("leaf {}", o + 1),
            NodeKind::Tensor => format!("tensor {}", p.subformula(n)),
            NodeKind::Par => format!("par {}", p.subformula(n)),
        };
        let g = self.witness.group();
        let leaf_label = |i: usize| {
            let pos = if p.occurrences()[i].positive { i } else { p.links()[i] };
            let base = if g.is_identity(self.gamma[pos]) {
                return "id".to_string();
            } else if self.gamma[pos] == self.witness.alpha_plus {
                "a+"
            } else {
                "a-"
            };
            if i == pos {
                base.to_string()
            } else {
                format!("{base}^-1")
            }
        };
        json!({
            "formula": p.sequent()[0].to_string(),
            "witness": {
                "group": self.witness.name,
                "creed": self.witness.creed.at(0).iter().map(|&m| g.label(m)).collect::<Vec<_>>(),
                "alpha_plus": g.label(self.witness.alpha_plus),
                "alpha_minus": g.label(self.witness.alpha_minus),
            },
            "primary_failure": self.primary_failure,
            "switching": p.par_nodes().iter().map(|&n| json!({
                "node": node_name(n),
                "side": if self.switching.side(n) == Side::Left { "left" } else { "right" },
            })).collect::<Vec<_>>(),
            "cycle": self.cycle.iter().map(|&n| node_name(n)).collect::<Vec<_>>(),
            "node_n": node_name(self.node_n),
            "flipped": self.flipped.iter().map(|&n| node_name(n)).collect::<Vec<_>>(),
            "orientation": self.orientation.iter().enumerate()
                .filter(|(_, d)| **d != Direction::None)
                .map(|(n, d)| json!({"node": node_name(n), "edge_below": d.as_str()}))
                .collect::<Vec<_>>(),
            "leaf_assignment": (0..self.gamma.len()).map(leaf_label).collect::<Vec<_>>(),
            "gamma": self.gamma.iter().map(|&m| g.label(m)).collect::<Vec<_>>(),
            "violation": "gamma stabilizes the all-identities experiment but is not in the creed of the conclusion",
            "claims": self.claims.iter().filter(|c| c.direction != Direction::Up).map(|c| json!({
                "node": node_name(c.node),
                "edge_below": c.direction.as_str(),
                "case": c.case,
                "in_dual": c.in_dual,
            })).collect::<Vec<_>>(),
        })
    }
}

/// A group with a Boolean creed `𝒜` and elements `α₊ ∈ 𝒜∖𝒜⊥`, `α₋ ∈ 𝒜⊥∖𝒜`.
#[derive(Clone, Debug)]
pub struct Witness {
    pub name: &'static str,
    pub creed: Creed,
    pub alpha_plus: Mor,
    pub alpha_minus: Mor,
}

impl Witness {
    fn on_pair(name: &'static str, left: usize, right: usize) -> Self {
        let g = Groupoid::cyclic(left).product(&Groupoid::cyclic(right));
        let alpha_plus = g.pair_mor(1, 0);
        let creed = Creed::closure_of(&g, &[(0, vec![alpha_plus])]).expect("closure of a group element");
        Witness {
            name,
            creed,
            alpha_plus,
            alpha_minus: g.pair_mor(0, 1),
        }
    }

    /// `ℤ₂ × ℤ₃` with `𝒜 = ℤ₂ × {0}`, `α₊ = (1,0)`, `α₋ = (0,1)`.
    pub fn primary() -> Self {
        Self::on_pair("Z2xZ3", 2, 3)
    }

    /// `ℤ₂ × ℤ₂` with `𝒜 = ℤ₂ × {0}`, `α₊ = (1,0)`, `α₋ = (0,1)`. Every element
    /// has order at most 2, so membership of a nonidentity element in a tensor
    /// (resp. par) creed only asks whether both components are in (resp. some
    /// nonidentity component is in), whatever the other component is.
    pub fn klein() -> Self {
        Self::on_pair("Z2xZ2", 2, 2)
    }

    pub fn group(&self) -> &Groupoid {
        self.creed.groupoid()
    }
}

fn invariant<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invariant(msg.into()))
}

fn local_case(kind: NodeKind, is_n: bool, below: Direction, left: Direction, right: Direction) -> Option<u8> {
    use Direction::{Down as D, None as O, Up as U};
    let one_child = |c: Direction| (left == c && right == O) || (left == O && right == c);
    match kind {
        NodeKind::Tensor if is_n => (below == D && left == U && right == D).then_some(0),
        NodeKind::Tensor => match below {
            U if one_child(U) => Some(1),
            D if one_child(D) => Some(2),
            O if (left == D && right == U) || (left == U && right == D) => Some(3),
            O if left == O && right == O => Some(4),
            _ => None,
        },
        NodeKind::Par => match below {
            U if one_child(U) => Some(5),
            D if one_child(D) => Some(6),
            O if left == O && right == O => Some(7),
            _ => None,
        },
        NodeKind::Leaf(_) => None,
    }
}

/// Switching, cycle and orientation of the refutation; independent of the witness.
struct Skeleton {
    wrapped: ProofStructure,
    switching: Switching,
    cycle: Vec<usize>,
    node_n: usize,
    flipped: Vec<usize>,
    orientation: Vec<Direction>,
    cases: Vec<Option<u8>>,
    /// Per positive occurrence on the cycle: whether the traversal crosses its
    /// link from the positive leaf to the negative one.
    link_forward: BTreeMap<usize, bool>,
}

fn skeleton(p: &ProofStructure) -> Result<Skeleton> {
    let w = wrap_single(p);
    let Some((mut switching, cycle)) = find_cycle_switching(&w) else {
        return invariant("wrapping removed every cyclic switching");
    };
    let nodes = w.nodes();
    let on_cycle: Vec<bool> = (0..nodes.len()).map(|n| cycle.contains(&n)).collect();
    let ancestors = |mut n: usize| {
        let mut out = Vec::new();
        while let Some(up) = nodes[n].parent {
            out.push(up);
            n = up;
        }
        out
    };
    let node_n = match cycle.iter().copied().filter(|&n| ancestors(n).iter().all(|&a| !on_cycle[a])).min() {
        Some(n) => n,
        None => return invariant("cycle without a lowest node"),
    };
    if nodes[node_n].kind != NodeKind::Tensor {
        return invariant("lowest node of the cycle is not a tensor");
    }

    // Make the root path to N part of the switching graph.
    let mut flipped = Vec::new();
    let mut child = node_n;
    for a in ancestors(node_n) {
        if nodes[a].kind == NodeKind::Par {
            let side = if nodes[a].children.expect("par has premises")[0] == child { Side::Left } else { Side::Right };
            if switching.side(a) != side {
                switching.0.insert(a, side);
                flipped.push(a);
            }
        }
        child = a;
    }
    let graph = dr_graph(&w, &switching);
    let has_edge = |a: usize, b: usize| graph.edges.iter().any(|&(x, y, _)| (x, y) == (a, b) || (x, y) == (b, a));
    let len = cycle.len();
    if (0..len).any(|i| !has_edge(cycle[i], cycle[(i + 1) % len])) {
        return invariant("flipping the root path broke the cycle");
    }

    // Traverse from N through its left premise.
    let start = cycle.iter().position(|&n| n == node_n).expect("N is on the cycle");
    let mut walk: Vec<usize> = (0..len).map(|i| cycle[(start + i) % len]).collect();
    let [left, _] = nodes[node_n].children.expect("tensor has premises");
    if walk[1] != left {
        walk[1..].reverse();
    }
    if walk[1] != left {
        return invariant("cycle does not pass through the left premise of N");
    }

    let mut orientation = vec![Direction::None; nodes.len()];
    let mut link_forward = BTreeMap::new();
    for i in 0..len {
        let (u, v) = (walk[i], walk[(i + 1) % len]);
        if nodes[u].parent == Some(v) {
            orientation[u] = Direction::Down;
        } else if nodes[v].parent == Some(u) {
            orientation[v] = Direction::Up;
        } else {
            let (NodeKind::Leaf(ou), NodeKind::Leaf(_)) = (nodes[u].kind, nodes[v].kind) else {
                return invariant("cycle step is neither a premise nor an axiom edge");
            };
            let pos = if w.occurrences()[ou].positive { ou } else { w.links()[ou] };
            link_forward.insert(pos, ou == pos);
        }
    }
    orientation[node_n] = Direction::Down;
    for a in ancestors(node_n) {
        orientation[a] = Direction::Down;
    }
    let mut cases = Vec::with_capacity(nodes.len());
    for (n, node) in nodes.iter().enumerate() {
        cases.push(match node.children {
            Some([l, r]) => {
                let case = local_case(node.kind, n == node_n, orientation[n], orientation[l], orientation[r]);
                if case.is_none() {
                    return invariant(format!("node {n} has no admissible local pattern"));
                }
                case
            }
            None => None,
        });
    }
    Ok(Skeleton {
        wrapped: w,
        switching,
        cycle: walk,
        node_n,
        flipped,
        orientation,
        cases,
        link_forward,
    })
}

/// Leaf components and node claims, or a description of the first failed check.
type Assigned = std::result::Result<(Vec<Mor>, Vec<NodeClaim>), String>;

/// Leaf components and node claims for one witness.
fn assign(sk: &Skeleton, witness: &Witness) -> Result<Assigned> {
    let w = &sk.wrapped;
    let group = witness.group();
    let mut gamma = vec![group.identity(0); w.occurrences().len()];
    for (pos, neg) in w.link_pairs() {
        if let Some(&forward) = sk.link_forward.get(&pos) {
            let a = if forward { witness.alpha_plus } else { witness.alpha_minus };
            gamma[pos] = a;
            gamma[neg] = group.inverse(a);
        }
    }
    let sigma: CreedAssignment = w.variables().into_iter().map(|v| (v, witness.creed.clone())).collect();
    let mut claims = Vec::with_capacity(w.nodes().len());
    for (n, node) in w.nodes().iter().enumerate() {
        let (lo, hi) = node.leaves;
        let (in_creed, in_dual) = formula_membership(&w.subformula(n), &sigma, &gamma[lo..hi])?;
        let direction = sk.orientation[n];
        let nontrivial = gamma[lo..hi].iter().any(|&m| !group.is_identity(m));
        let holds = match direction {
            Direction::Down => in_dual && nontrivial,
            Direction::None => in_dual,
            Direction::Up => true,
        };
        if !holds {
            return Ok(Err(format!("membership claim fails at {}", w.subformula(n))));
        }
        claims.push(NodeClaim {
            node: n,
            direction,
            case: sk.cases[n],
            in_creed,
            in_dual,
        });
    }
    // γ fixes the all-identities experiment ...
    let groupoids: Assignment = sigma.keys().map(|k| (k.clone(), group.clone())).collect();
    let ids = vec![group.identity(0); w.link_pairs().len()];
    if act_experiment(w, &groupoids, &ids, &gamma)? != ids {
        return Ok(Err("gamma does not fix the all-identities experiment".into()));
    }
    // ... but lies outside the creed of the conclusion.
    if claims[w.roots()[0]].in_creed {
        return Ok(Err("gamma lies in the creed of the conclusion".into()));
    }
    if creed_kit_violation(w, &sigma)?.is_none() {
        return Ok(Err("the witness assignment passes the creed-kit check".into()));
    }
    Ok(Ok((gamma, claims)))
}

/// A stabilizer element of `⟦π⟧` outside the creed of the conclusion, or `None`
/// when every switching is acyclic.
///
/// The primary witness is tried first. Its two elements have coprime orders, and
/// when the cycle's lowest tensor has a left premise mixing both, the element can
/// fall inside the creed; the Klein four-group witness is then used instead and
/// the report keeps the reason. An invariant error means both failed.
pub fn refute_incorrect(p: &ProofStructure) -> Result<Option<CounterexampleReport>> {
    if dr_check_mix(p) {
        return Ok(None);
    }
    let sk = skeleton(p)?;
    let mut primary_failure = None;
    for witness in [Witness::primary(), Witness::klein()] {
        match assign(&sk, &witness)? {
            Ok((gamma, claims)) => {
                return Ok(Some(CounterexampleReport {
                    wrapped: sk.wrapped,
                    witness,
                    primary_failure,
                    switching: sk.switching,
                    cycle: sk.cycle,
                    node_n: sk.node_n,
                    flipped: sk.flipped,
                    orientation: sk.orientation,
                    gamma,
                    claims,
                }))
            }
            Err(reason) if primary_failure.is_none() => primary_failure = Some(reason),
            Err(reason) => return invariant(format!("both witnesses fail: {reason}")),
        }
    }
    unreachable!("the loop returns on the second witness")
}

/// A named Boolean creed assignment.
#[derive(Clone, Debug)]
pub struct Probe {
    pub name: String,
    pub creeds: CreedAssignment,
}

/// Every Boolean creed on a group: unions of conjugation-and-power closures of
/// single elements, filtered by Booleanness.
pub fn boolean_creeds(g: &Groupoid) -> Result<Vec<Creed>> {
    if !g.is_group() {
        return validation("Boolean creeds are enumerated on groups only");
    }
    if g.num_morphisms() > DEFAULT_GROUP_BOUND {
        return Err(Error::Resource("group too large for creed enumeration".into()));
    }
    let mut atoms: Vec<Creed> = Vec::new();
    for e in g.end(0) {
        let c = Creed::closure_of(g, &[(0, vec![e])])?;
        if !atoms.contains(&c) {
            atoms.push(c);
        }
    }
    if atoms.len() > 16 {
        return Err(Error::Resource("too many cyclic classes for creed enumeration".into()));
    }
    let mut out: Vec<Creed> = Vec::new();
    for mask in 0u32..(1 << atoms.len()) {
        let elems: Vec<Mor> = atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .flat_map(|(_, a)| a.at(0))
            .collect();
        let c = Creed::closure_of(g, &[(0, elems)])?;
        if c.is_boolean() && !out.contains(&c) {
            out.push(c);
        }
    }
    Ok(out)
}

fn creed_name(c: &Creed) -> String {
    let g = c.groupoid();
    format!("{{{}}}", c.at(0).iter().map(|&m| g.label(m)).collect::<Vec<_>>().join(","))
}

/// Probe catalog: every Boolean creed on ℤ₂, ℤ₃, ℤ₄ and ℤ₂×ℤ₃ given to all
/// variables, plus, on ℤ₂×ℤ₃, one variable at a time given `ℤ₂×{0}` (resp.
/// `{0}×ℤ₃`) with the others given the other one.
pub fn default_probes(vars: &[String]) -> Vec<Probe> {
    let z2xz3 = Groupoid::cyclic(2).product(&Groupoid::cyclic(3));
    let groups = [
        ("Z2", Groupoid::cyclic(2)),
        ("Z3", Groupoid::cyclic(3)),
        ("Z4", Groupoid::cyclic(4)),
        ("Z2xZ3", z2xz3.clone()),
    ];
    let mut out = Vec::new();
    for (name, g) in &groups {
        for c in boolean_creeds(g).expect("small groups") {
            out.push(Probe {
                name: format!("{name} {}", creed_name(&c)),
                creeds: vars.iter().map(|v| (v.clone(), c.clone())).collect(),
            });
        }
    }
    let first = Creed::closure_of(&z2xz3, &[(0, vec![z2xz3.pair_mor(1, 0)])]).expect("closure");
    let second = Creed::closure_of(&z2xz3, &[(0, vec![z2xz3.pair_mor(0, 1)])]).expect("closure");
    if vars.len() > 1 {
        for v in vars {
            for (mine, rest) in [(&first, &second), (&second, &first)] {
                out.push(Probe {
                    name: format!("Z2xZ3 {v}={} others={}", creed_name(mine), creed_name(rest)),
                    creeds: vars
                        .iter()
                        .map(|u| (u.clone(), if u == v { mine.clone() } else { rest.clone() }))
                        .collect(),
                });
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub dr_mix: bool,
    pub refutation: Option<CounterexampleReport>,
    pub probes_run: usize,
    pub failed_probes: Vec<String>,
    pub semantic: bool,
}

impl Verdict {
    pub fn agrees(&self) -> bool {
        self.semantic == self.dr_mix
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dr_mix": self.dr_mix,
            "semantic": self.semantic,
            "agree": self.agrees(),
            "probes_run": self.probes_run,
            "failed_probes": self.failed_probes,
            "refutation": self.refutation.as_ref().map(|r| r.to_json()),
        })
    }
}

/// Semantic verdict (no refutation and every probe passes) next to the
/// switching verdict.
pub fn crosscheck(p: &ProofStructure, probes: &[Probe]) -> Result<Verdict> {
    let dr_mix = dr_check_mix(p);
    let refutation = refute_incorrect(p)?;
    let mut failed_probes = Vec::new();
    for probe in probes {
        if !creed_kit_check(p, &probe.creeds)? {
            failed_probes.push(probe.name.clone());
        }
    }
    let semantic = refutation.is_none() && failed_probes.is_empty();
    Ok(Verdict {
        dr_mix,
        refutation,
        probes_run: probes.len(),
        failed_probes,
        semantic,
    })
}

pub const CORPUS_MAX_LINKS: usize = 12;
pub const CORPUS_MAX_PARS: usize = 6;

/// Seeded corpus of proof structures with at most 12 links and at most 6 par
/// nodes; about half are correct.
pub fn corpus(seed: u64, count: usize) -> Vec<ProofStructure> {
    let mut out = Vec::with_capacity(count);
    let mut k: u64 = 0;
    while out.len() < count {
        let s = seed.wrapping_mul(1_000_003).wrapping_add(k);
        k += 1;
        let p = random_structure(s, 1 + (s % 12) as usize);
        if p.link_pairs().len() <= CORPUS_MAX_LINKS && p.num_pars() <= CORPUS_MAX_PARS {
            out.push(p);
        }
    }
    out
}
