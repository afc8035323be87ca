//! Multiplicative formulas, proof structures, sequent proofs and the
//! Danos–Regnier correctness criteria.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{validation, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(String),
    NegVar(String),
    Tensor(Box<Formula>, Box<Formula>),
    Par(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(name: &str) -> Self {
        Formula::Var(name.to_string())
    }

    pub fn neg(name: &str) -> Self {
        Formula::NegVar(name.to_string())
    }

    pub fn tensor(a: Formula, b: Formula) -> Self {
        Formula::Tensor(Box::new(a), Box::new(b))
    }

    pub fn par(a: Formula, b: Formula) -> Self {
        Formula::Par(Box::new(a), Box::new(b))
    }

    /// Linear negation, pushed to the variables.
    pub fn dual(&self) -> Self {
        match self {
            Formula::Var(x) => Formula::NegVar(x.clone()),
            Formula::NegVar(x) => Formula::Var(x.clone()),
            Formula::Tensor(a, b) => Formula::par(a.dual(), b.dual()),
            Formula::Par(a, b) => Formula::tensor(a.dual(), b.dual()),
        }
    }

    /// Leaves left to right.
    pub fn leaves(&self) -> Vec<Occurrence> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<Occurrence>) {
        match self {
            Formula::Var(x) => out.push(Occurrence { var: x.clone(), positive: true }),
            Formula::NegVar(x) => out.push(Occurrence { var: x.clone(), positive: false }),
            Formula::Tensor(a, b) | Formula::Par(a, b) => {
                a.collect_leaves(out);
                b.collect_leaves(out);
            }
        }
    }

    pub fn num_pars(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::NegVar(_) => 0,
            Formula::Tensor(a, b) => a.num_pars() + b.num_pars(),
            Formula::Par(a, b) => 1 + a.num_pars() + b.num_pars(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Par(..) => 1,
            Formula::Tensor(..) => 2,
            _ => 3,
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, needed: u8) -> fmt::Result {
        if self.precedence() < needed {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// ASCII form accepted by [`parse_formula`]: `*` tensor, `|` par, postfix `^`.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(x) => write!(f, "{x}"),
            Formula::NegVar(x) => write!(f, "{x}^"),
            Formula::Tensor(a, b) | Formula::Par(a, b) => {
                let p = self.precedence();
                a.write_child(f, p)?;
                f.write_str(if p == 2 { "*" } else { "|" })?;
                b.write_child(f, p + 1)
            }
        }
    }
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    at: usize,
    text: &'a str,
}

impl Parser<'_> {
    fn peek(&mut self) -> Option<char> {
        while self.chars.get(self.at).is_some_and(|c| c.1.is_whitespace()) {
            self.at += 1;
        }
        self.chars.get(self.at).map(|c| c.1)
    }

    fn pos(&self) -> usize {
        self.chars.get(self.at).map_or(self.text.len(), |c| c.0)
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn par(&mut self) -> Result<Formula> {
        let mut lhs = self.tensor()?;
        while matches!(self.peek(), Some('|' | '⅋')) {
            self.at += 1;
            lhs = Formula::par(lhs, self.tensor()?);
        }
        Ok(lhs)
    }

    fn tensor(&mut self) -> Result<Formula> {
        let mut lhs = self.postfix()?;
        while matches!(self.peek(), Some('*' | '⊗')) {
            self.at += 1;
            lhs = Formula::tensor(lhs, self.postfix()?);
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> Result<Formula> {
        let mut f = self.atom()?;
        while matches!(self.peek(), Some('^' | '⊥')) {
            self.at += 1;
            f = f.dual();
        }
        Ok(f)
    }

    fn atom(&mut self) -> Result<Formula> {
        match self.peek() {
            Some('(') => {
                self.at += 1;
                let f = self.par()?;
                if self.peek() != Some(')') {
                    return self.fail("expected ')'");
                }
                self.at += 1;
                Ok(f)
            }
            Some('X') => {
                self.at += 1;
                let start = self.at;
                while self.chars.get(self.at).is_some_and(|c| c.1.is_ascii_digit()) {
                    self.at += 1;
                }
                if start == self.at {
                    return self.fail("expected digits after 'X'");
                }
                let name: String = std::iter::once('X').chain(self.chars[start..self.at].iter().map(|c| c.1)).collect();
                Ok(Formula::Var(name))
            }
            Some(c) => self.fail(format!("unexpected '{c}'")),
            None => self.fail("unexpected end of input"),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser {
        chars: text.char_indices().collect(),
        at: 0,
        text,
    };
    let f = p.par()?;
    if p.peek().is_some() {
        return p.fail("trailing input");
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Occurrence {
    pub var: String,
    pub positive: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Leaf(usize),
    Tensor,
    Par,
}

/// A vertex of the syntax forest; ids are pre-order over the sequent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub kind: NodeKind,
    pub parent: Option<usize>,
    pub children: Option<[usize; 2]>,
    /// Index of the conclusion formula this node belongs to.
    pub conclusion: usize,
    /// Leaf occurrences below this node, as a half-open range.
    pub leaves: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofStructure {
    sequent: Vec<Formula>,
    occurrences: Vec<Occurrence>,
    links: Vec<usize>,
    nodes: Vec<Node>,
    roots: Vec<usize>,
    leaf_nodes: Vec<usize>,
}

impl ProofStructure {
    /// `pairs` are 0-based occurrence indices.
    pub fn new(sequent: Vec<Formula>, pairs: &[(usize, usize)]) -> Result<Self> {
        if sequent.is_empty() {
            return validation("empty sequent");
        }
        let occurrences: Vec<Occurrence> = sequent.iter().flat_map(Formula::leaves).collect();
        let n = occurrences.len();
        let mut links = vec![usize::MAX; n];
        for &(i, j) in pairs {
            if i >= n || j >= n {
                return validation(format!("link ({}, {}) names a missing occurrence", i + 1, j + 1));
            }
            if i == j || links[i] != usize::MAX || links[j] != usize::MAX {
                return validation(format!("link ({}, {}) reuses an occurrence", i + 1, j + 1));
            }
            let (a, b) = (&occurrences[i], &occurrences[j]);
            if a.var != b.var || a.positive == b.positive {
                return validation(format!(
                    "link ({}, {}) pairs {}{} with {}{}",
                    i + 1,
                    j + 1,
                    a.var,
                    if a.positive { "" } else { "^" },
                    b.var,
                    if b.positive { "" } else { "^" }
                ));
            }
            links[i] = j;
            links[j] = i;
        }
        if let Some(i) = links.iter().position(|&l| l == usize::MAX) {
            return validation(format!("occurrence {} is not linked", i + 1));
        }
        let mut nodes = Vec::new();
        let mut roots = Vec::new();
        let mut leaf_nodes = vec![0; n];
        let mut next_leaf = 0;
        for (k, f) in sequent.iter().enumerate() {
            roots.push(build_nodes(f, None, k, &mut nodes, &mut leaf_nodes, &mut next_leaf));
        }
        Ok(ProofStructure {
            sequent,
            occurrences,
            links,
            nodes,
            roots,
            leaf_nodes,
        })
    }

    pub fn sequent(&self) -> &[Formula] {
        &self.sequent
    }

    pub fn occurrences(&self) -> &[Occurrence] {
        &self.occurrences
    }

    /// Partner of each occurrence.
    pub fn links(&self) -> &[usize] {
        &self.links
    }

    /// Each link once, as `(positive, negative)`.
    pub fn link_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.links.len())
            .filter(|&i| self.occurrences[i].positive)
            .map(|i| (i, self.links[i]))
            .collect()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn leaf_node(&self, occurrence: usize) -> usize {
        self.leaf_nodes[occurrence]
    }

    pub fn par_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].kind == NodeKind::Par).collect()
    }

    pub fn num_pars(&self) -> usize {
        self.par_nodes().len()
    }

    /// The formula rooted at a node.
    pub fn subformula(&self, node: usize) -> Formula {
        let n = &self.nodes[node];
        match (n.kind, n.children) {
            (NodeKind::Leaf(o), _) => {
                let occ = &self.occurrences[o];
                if occ.positive {
                    Formula::Var(occ.var.clone())
                } else {
                    Formula::NegVar(occ.var.clone())
                }
            }
            (NodeKind::Tensor, Some([a, b])) => Formula::tensor(self.subformula(a), self.subformula(b)),
            (NodeKind::Par, Some([a, b])) => Formula::par(self.subformula(a), self.subformula(b)),
            _ => unreachable!("binary nodes have two children"),
        }
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for o in &self.occurrences {
            if !out.contains(&o.var) {
                out.push(o.var.clone());
            }
        }
        out
    }

    /// `{"sequent": [...], "links": [[i, j], ...]}` with 1-based indices.
    pub fn to_json(&self) -> Value {
        json!({
            "sequent": self.sequent.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "links": (0..self.links.len())
                .filter(|&i| i < self.links[i])
                .map(|i| [i + 1, self.links[i] + 1])
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        #[derive(serde::Deserialize)]
        struct File {
            sequent: Vec<String>,
            links: Vec<[usize; 2]>,
        }
        let file: File = serde_json::from_value(v.clone()).map_err(|e| Error::Validation(format!("structure file: {e}")))?;
        let sequent = file.sequent.iter().map(|s| parse_formula(s)).collect::<Result<Vec<_>>>()?;
        let mut pairs = Vec::new();
        for [a, b] in file.links {
            if a == 0 || b == 0 {
                return validation("link indices are 1-based");
            }
            pairs.push((a - 1, b - 1));
        }
        Self::new(sequent, &pairs)
    }
}

fn build_nodes(
    f: &Formula,
    parent: Option<usize>,
    conclusion: usize,
    nodes: &mut Vec<Node>,
    leaf_nodes: &mut [usize],
    next_leaf: &mut usize,
) -> usize {
    let id = nodes.len();
    let start = *next_leaf;
    nodes.push(Node {
        kind: NodeKind::Tensor,
        parent,
        children: None,
        conclusion,
        leaves: (start, start),
    });
    let kind = match f {
        Formula::Var(_) | Formula::NegVar(_) => {
            leaf_nodes[start] = id;
            *next_leaf += 1;
            NodeKind::Leaf(start)
        }
        Formula::Tensor(a, b) | Formula::Par(a, b) => {
            let l = build_nodes(a, Some(id), conclusion, nodes, leaf_nodes, next_leaf);
            let r = build_nodes(b, Some(id), conclusion, nodes, leaf_nodes, next_leaf);
            nodes[id].children = Some([l, r]);
            if matches!(f, Formula::Tensor(..)) {
                NodeKind::Tensor
            } else {
                NodeKind::Par
            }
        }
    };
    nodes[id].kind = kind;
    nodes[id].leaves = (start, *next_leaf);
    id
}

pub fn parse_structure(text: &str) -> Result<ProofStructure> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        pos: e.column(),
        msg: e.to_string(),
    })?;
    ProofStructure::from_json(&v)
}

/// Folds a sequent into one formula with left-nested pars; occurrence order
/// and links are unchanged.
pub fn wrap_single(p: &ProofStructure) -> ProofStructure {
    let mut it = p.sequent.iter().cloned();
    let first = it.next().expect("sequents are non-empty");
    let single = it.fold(first, Formula::par);
    ProofStructure::new(vec![single], &p.link_pairs()).expect("same leaves and links")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// A choice of premise for each par node, keyed by node id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Switching(pub BTreeMap<usize, Side>);

impl Switching {
    pub fn side(&self, par: usize) -> Side {
        self.0.get(&par).copied().unwrap_or(Side::Left)
    }
}

/// All `2^#pars` switchings; bit `i` of the index selects `Right` for the i-th par.
pub fn switchings(p: &ProofStructure) -> impl Iterator<Item = Switching> {
    let pars = p.par_nodes();
    let total = 1u64 << pars.len();
    (0..total).map(move |mask| {
        Switching(
            pars.iter()
                .enumerate()
                .map(|(i, &n)| (n, if mask & (1 << i) != 0 { Side::Right } else { Side::Left }))
                .collect(),
        )
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Premise,
    Axiom,
    Conclusion,
}

/// Undirected graph over syntax nodes plus one terminal per conclusion,
/// numbered after the nodes.
#[derive(Clone, Debug)]
pub struct DrGraph {
    pub num_vertices: usize,
    pub edges: Vec<(usize, usize, EdgeKind)>,
}

impl DrGraph {
    pub fn terminal(p: &ProofStructure, conclusion: usize) -> usize {
        p.nodes.len() + conclusion
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.num_vertices];
        for (e, &(a, b, _)) in self.edges.iter().enumerate() {
            adj[a].push((b, e));
            adj[b].push((a, e));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }

    pub fn is_tree(&self) -> bool {
        if !self.is_acyclic() {
            return false;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.num_vertices];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(w, _) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Depth-first search in vertex order with sorted neighbours; the first
    /// back edge met closes the returned cycle, listed as vertices.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        let adj = self.adjacency();
        let mut parent_edge = vec![usize::MAX; self.num_vertices];
        let mut parent = vec![usize::MAX; self.num_vertices];
        let mut depth = vec![usize::MAX; self.num_vertices];
        for root in 0..self.num_vertices {
            if depth[root] != usize::MAX {
                continue;
            }
            depth[root] = 0;
            let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if *next == adj[v].len() {
                    stack.pop();
                    continue;
                }
                let (w, e) = adj[v][*next];
                *next += 1;
                if e == parent_edge[v] {
                    continue;
                }
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    parent[w] = v;
                    parent_edge[w] = e;
                    stack.push((w, 0));
                } else if depth[w] < depth[v] {
                    let mut cycle = vec![w];
                    let mut u = v;
                    let mut tail = Vec::new();
                    while u != w {
                        tail.push(u);
                        u = parent[u];
                    }
                    tail.reverse();
                    cycle.extend(tail);
                    return Some(cycle);
                }
            }
        }
        None
    }
}

pub fn dr_graph(p: &ProofStructure, s: &Switching) -> DrGraph {
    let mut edges = Vec::new();
    for (id, node) in p.nodes.iter().enumerate() {
        if let Some([l, r]) = node.children {
            match node.kind {
                NodeKind::Par => {
                    let chosen = if s.side(id) == Side::Left { l } else { r };
                    edges.push((id, chosen, EdgeKind::Premise));
                }
                _ => {
                    edges.push((id, l, EdgeKind::Premise));
                    edges.push((id, r, EdgeKind::Premise));
                }
            }
        }
    }
    for (a, b) in p.link_pairs() {
        edges.push((p.leaf_nodes[a], p.leaf_nodes[b], EdgeKind::Axiom));
    }
    for (k, &root) in p.roots.iter().enumerate() {
        edges.push((root, DrGraph::terminal(p, k), EdgeKind::Conclusion));
    }
    DrGraph {
        num_vertices: p.nodes.len() + p.roots.len(),
        edges,
    }
}

/// Every switching graph is a tree.
pub fn dr_check_mll(p: &ProofStructure) -> bool {
    switchings(p).all(|s| dr_graph(p, &s).is_tree())
}

/// Every switching graph is acyclic.
pub fn dr_check_mix(p: &ProofStructure) -> bool {
    find_cycle_switching(p).is_none()
}

/// The first switching (in enumeration order) whose graph has a cycle.
pub fn find_cycle_switching(p: &ProofStructure) -> Option<(Switching, Vec<usize>)> {
    switchings(p).find_map(|s| dr_graph(p, &s).find_cycle().map(|c| (s, c)))
}

/// Sequent calculus derivations for MLL with Mix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SequentProof {
    /// `⊢ X, X⊥`.
    Ax(String),
    /// From `⊢ Γ, A` and `⊢ B, Δ` (the chosen positions) to `⊢ Γ∖A, A ⊗ B, Δ∖B`.
    Tensor {
        left: Box<SequentProof>,
        right: Box<SequentProof>,
        left_pos: usize,
        right_pos: usize,
    },
    /// Replaces the formula at `first` by `A_first ⅋ A_second` and drops `second`.
    Par {
        premise: Box<SequentProof>,
        first: usize,
        second: usize,
    },
    /// Conclusion `i` is premise formula `perm[i]`.
    Ex { premise: Box<SequentProof>, perm: Vec<usize> },
    Mix { left: Box<SequentProof>, right: Box<SequentProof> },
}

impl SequentProof {
    pub fn conclusion(&self) -> Result<Vec<Formula>> {
        Ok(self.derive(&mut 0)?.into_iter().map(|(f, _)| f).collect())
    }

    /// Conclusion formulas with the axiom ids of their leaves.
    fn derive(&self, fresh: &mut usize) -> Result<Vec<(Formula, Vec<usize>)>> {
        Ok(match self {
            SequentProof::Ax(x) => {
                let id = *fresh;
                *fresh += 2;
                vec![(Formula::var(x), vec![id]), (Formula::neg(x), vec![id + 1])]
            }
            SequentProof::Tensor {
                left,
                right,
                left_pos,
                right_pos,
            } => {
                let mut l = left.derive(fresh)?;
                let mut r = right.derive(fresh)?;
                if *left_pos >= l.len() || *right_pos >= r.len() {
                    return validation("tensor position out of range");
                }
                let (a, mut ia) = l.remove(*left_pos);
                let (b, ib) = r.remove(*right_pos);
                ia.extend(ib);
                l.push((Formula::tensor(a, b), ia));
                l.extend(r);
                l
            }
            SequentProof::Par { premise, first, second } => {
                let mut fs = premise.derive(fresh)?;
                if first == second || *first >= fs.len() || *second >= fs.len() {
                    return validation("par positions must be distinct and in range");
                }
                let (b, ib) = fs[*second].clone();
                let (a, ia) = fs[*first].clone();
                fs[*first] = (Formula::par(a, b), ia.into_iter().chain(ib).collect());
                fs.remove(*second);
                fs
            }
            SequentProof::Ex { premise, perm } => {
                let fs = premise.derive(fresh)?;
                let mut sorted = perm.clone();
                sorted.sort_unstable();
                if sorted != (0..fs.len()).collect::<Vec<_>>() {
                    return validation("exchange is not a permutation of the premise");
                }
                perm.iter().map(|&i| fs[i].clone()).collect()
            }
            SequentProof::Mix { left, right } => {
                let mut l = left.derive(fresh)?;
                l.extend(right.derive(fresh)?);
                l
            }
        })
    }

    pub fn num_axioms(&self) -> usize {
        match self {
            SequentProof::Ax(_) => 1,
            SequentProof::Tensor { left, right, .. } | SequentProof::Mix { left, right } => left.num_axioms() + right.num_axioms(),
            SequentProof::Par { premise, .. } | SequentProof::Ex { premise, .. } => premise.num_axioms(),
        }
    }
}

/// Each axiom becomes one link; occurrences are renumbered left to right.
pub fn desequentialize(proof: &SequentProof) -> Result<ProofStructure> {
    let concl = proof.derive(&mut 0)?;
    let order: Vec<usize> = concl.iter().flat_map(|(_, ids)| ids.iter().copied()).collect();
    let mut position = vec![0; order.len()];
    for (pos, &id) in order.iter().enumerate() {
        position[id] = pos;
    }
    let pairs: Vec<(usize, usize)> = (0..order.len() / 2).map(|k| (position[2 * k], position[2 * k + 1])).collect();
    ProofStructure::new(concl.into_iter().map(|(f, _)| f).collect(), &pairs)
}

/// Par budget for generated proofs.
pub const GENERATED_PAR_LIMIT: usize = 6;

/// A random derivation with `size` axioms over at most three variables.
pub fn random_proof(seed: u64, size: usize) -> SequentProof {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars = rng.gen_range(1..=3usize);
    let mut pool: Vec<(SequentProof, usize)> = (0..size.max(1))
        .map(|_| (SequentProof::Ax(format!("X{}", rng.gen_range(1..=vars))), 2))
        .collect();
    let mut pars = 0;
    let par_step = |rng: &mut ChaCha8Rng, proof: SequentProof, width: usize| {
        let first = rng.gen_range(0..width);
        let mut second = rng.gen_range(0..width - 1);
        if second >= first {
            second += 1;
        }
        SequentProof::Par {
            premise: Box::new(proof),
            first,
            second,
        }
    };
    while pool.len() > 1 {
        let i = rng.gen_range(0..pool.len());
        let (a, wa) = pool.swap_remove(i);
        if pars < GENERATED_PAR_LIMIT && wa > 2 && rng.gen_bool(0.3) {
            pars += 1;
            pool.push((par_step(&mut rng, a, wa), wa - 1));
            continue;
        }
        let j = rng.gen_range(0..pool.len());
        let (b, wb) = pool.swap_remove(j);
        let combined = if rng.gen_bool(0.2) {
            (SequentProof::Mix { left: Box::new(a), right: Box::new(b) }, wa + wb)
        } else {
            let t = SequentProof::Tensor {
                left: Box::new(a),
                right: Box::new(b),
                left_pos: rng.gen_range(0..wa),
                right_pos: rng.gen_range(0..wb),
            };
            (t, wa + wb - 1)
        };
        pool.push(combined);
    }
    let (mut proof, mut width) = pool.pop().expect("pool is non-empty");
    while width > 1 && pars < GENERATED_PAR_LIMIT && rng.gen_bool(0.8) {
        pars += 1;
        proof = par_step(&mut rng, proof, width);
        width -= 1;
    }
    if width > 1 && rng.gen_bool(0.5) {
        let mut perm: Vec<usize> = (0..width).collect();
        perm.shuffle(&mut rng);
        proof = SequentProof::Ex {
            premise: Box::new(proof),
            perm,
        };
    }
    proof
}

/// A desequentialized random proof, then with probability 3/4 mutated by
/// swapping two links on one variable and/or turning a par into a tensor.
pub fn random_structure(seed: u64, size: usize) -> ProofStructure {
    let base = desequentialize(&random_proof(seed, size)).expect("generated proofs are valid");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mode = rng.gen_range(0..4);
    let mut pairs = base.link_pairs();
    if mode & 1 == 1 && pairs.len() > 1 {
        let i = rng.gen_range(0..pairs.len());
        let same: Vec<usize> = (0..pairs.len())
            .filter(|&j| j != i && base.occurrences[pairs[j].0].var == base.occurrences[pairs[i].0].var)
            .collect();
        if let Some(&j) = same.choose(&mut rng) {
            let (ni, nj) = (pairs[j].1, pairs[i].1);
            pairs[i].1 = ni;
            pairs[j].1 = nj;
        }
    }
    let mut sequent = base.sequent.clone();
    if mode & 2 == 2 {
        let pars = base.par_nodes();
        if let Some(&target) = pars.choose(&mut rng) {
            let k = base.nodes[target].conclusion;
            let offset = base.roots[k];
            sequent[k] = flip_par(&sequent[k], target - offset, &mut 0);
        }
    }
    ProofStructure::new(sequent, &pairs).expect("mutations keep links well typed")
}

/// Rebuilds `f` with the pre-order node `target` turned from par into tensor.
fn flip_par(f: &Formula, target: usize, counter: &mut usize) -> Formula {
    let here = *counter;
    *counter += 1;
    match f {
        Formula::Var(_) | Formula::NegVar(_) => f.clone(),
        Formula::Tensor(a, b) => {
            let a = flip_par(a, target, counter);
            Formula::tensor(a, flip_par(b, target, counter))
        }
        Formula::Par(a, b) => {
            let a = flip_par(a, target, counter);
            let b = flip_par(b, target, counter);
            if here == target {
                Formula::tensor(a, b)
            } else {
                Formula::par(a, b)
            }
        }
    }
}

/// `((X1|X2)*X2^)|((X2|X2^)|X1^)` with links (1,6), (2,5), (3,4).
pub fn figure_correct() -> ProofStructure {
    let f = parse_formula("((X1|X2)*X2^)|((X2|X2^)|X1^)").expect("fixed text parses");
    ProofStructure::new(vec![f], &[(0, 5), (1, 4), (2, 3)]).expect("fixed links are valid")
}

/// The same formula with links (1,6), (2,3), (4,5).
pub fn figure_incorrect() -> ProofStructure {
    let f = parse_formula("((X1|X2)*X2^)|((X2|X2^)|X1^)").expect("fixed text parses");
    ProofStructure::new(vec![f], &[(0, 5), (1, 2), (3, 4)]).expect("fixed links are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printing_round_trips() {
        for text in ["X1", "X1^", "(X1|X2)*X3", "X1|X2*X3", "(X1*X2)*X3", "X1*(X2*X3)", "X1|(X2|X3)"] {
            let f = parse_formula(text).unwrap();
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        }
        assert_eq!(parse_formula("X1|X2*X3").unwrap().to_string(), "X1|X2*X3");
    }
}
