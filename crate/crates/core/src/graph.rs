//! Labeled oriented multigraphs on sources `z_i`, ordered intermediate vertices `x_i`
//! and sinks `w_j`, and the graph attached to a factorization tuple.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;

use crate::covers::{enumerate_factorizations, CountKey, FactorizationTuple, WorkBound};
use crate::error::{Error, Result};
use crate::perm::{cycle_decomposition, Composition, Cycle};

/// A labeled vertex; indices are 1-based. The derived order is
/// `z_1 < ... < z_k < x_1 < ... < x_b < w_1 < ... < w_l`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Vertex {
    Z(usize),
    X(usize),
    W(usize),
}

impl Vertex {
    /// Whether an edge `self -> other` is allowed: sources before intermediates before
    /// sinks, and `x_i -> x_j` only for `i < j`.
    pub fn precedes(self, other: Vertex) -> bool {
        use Vertex::*;
        match (self, other) {
            (Z(_), X(_)) | (Z(_), W(_)) | (X(_), W(_)) => true,
            (X(i), X(j)) => i < j,
            _ => false,
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Z(i) => write!(f, "z{i}"),
            Vertex::X(i) => write!(f, "x{i}"),
            Vertex::W(i) => write!(f, "w{i}"),
        }
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad vertex label {s:?}"));
        let (kind, index) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
        let index: usize = index.parse().map_err(|_| bad())?;
        if index == 0 {
            return Err(bad());
        }
        match kind {
            "z" => Ok(Vertex::Z(index)),
            "x" => Ok(Vertex::X(index)),
            "w" => Ok(Vertex::W(index)),
            _ => Err(bad()),
        }
    }
}

/// Degree rule at intermediate vertices.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum GraphClassVariant {
    /// `{out, in} = {1, 2}` at every `x_i`.
    #[default]
    Standard,
    /// Additionally allows `{out, in} = {0, 3}`.
    Extended,
}

impl GraphClassVariant {
    /// Allowed `(out, in)` degree pairs at an intermediate vertex.
    fn x_patterns(self) -> &'static [(usize, usize)] {
        match self {
            GraphClassVariant::Standard => &[(1, 2), (2, 1)],
            GraphClassVariant::Extended => &[(1, 2), (2, 1), (0, 3), (3, 0)],
        }
    }
}

/// A graph in `G_{b,k,l}`, stored as its edge multiplicity map. Because every vertex is
/// labeled, two graphs are isomorphic exactly when their maps agree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FeynmanGraph {
    b: usize,
    k: usize,
    l: usize,
    edges: BTreeMap<(Vertex, Vertex), usize>,
}

impl FeynmanGraph {
    pub fn new(b: usize, k: usize, l: usize) -> Self {
        Self {
            b,
            k,
            l,
            edges: BTreeMap::new(),
        }
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    fn contains(&self, v: Vertex) -> bool {
        match v {
            Vertex::Z(i) => (1..=self.k).contains(&i),
            Vertex::X(i) => (1..=self.b).contains(&i),
            Vertex::W(i) => (1..=self.l).contains(&i),
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        let (b, k, l) = (self.b, self.k, self.l);
        (1..=k)
            .map(Vertex::Z)
            .chain((1..=b).map(Vertex::X))
            .chain((1..=l).map(Vertex::W))
    }

    /// Adds one edge `from -> to`, raising its multiplicity by one.
    pub fn add_edge(&mut self, from: Vertex, to: Vertex) -> Result<()> {
        if !self.contains(from) || !self.contains(to) {
            return Err(Error::InvalidArgument(format!(
                "edge {from}->{to} leaves the vertex set of G_{{{},{},{}}}",
                self.b, self.k, self.l
            )));
        }
        if !from.precedes(to) {
            return Err(Error::InvalidArgument(format!("edge {from}->{to} violates the vertex order")));
        }
        *self.edges.entry((from, to)).or_insert(0) += 1;
        Ok(())
    }

    pub fn multiplicity(&self, from: Vertex, to: Vertex) -> usize {
        self.edges.get(&(from, to)).copied().unwrap_or(0)
    }

    /// Distinct vertex pairs with their multiplicities, in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = ((Vertex, Vertex), usize)> + '_ {
        self.edges.iter().map(|(&pair, &m)| (pair, m))
    }

    /// One entry per edge, parallel edges repeated.
    pub fn edge_instances(&self) -> Vec<(Vertex, Vertex)> {
        self.edges
            .iter()
            .flat_map(|(&pair, &m)| std::iter::repeat_n(pair, m))
            .collect()
    }

    pub fn out_degree(&self, v: Vertex) -> usize {
        self.edges.iter().filter(|((u, _), _)| *u == v).map(|(_, m)| m).sum()
    }

    pub fn in_degree(&self, v: Vertex) -> usize {
        self.edges.iter().filter(|((_, u), _)| *u == v).map(|(_, m)| m).sum()
    }

    /// Whether every degree rule of the class holds.
    pub fn is_in_class(&self, variant: GraphClassVariant) -> bool {
        let patterns = variant.x_patterns();
        self.vertices().all(|v| {
            let (out, inn) = (self.out_degree(v), self.in_degree(v));
            match v {
                Vertex::Z(_) => out == 1 && inn == 0,
                Vertex::W(_) => out == 0 && inn == 1,
                Vertex::X(_) => patterns.contains(&(out, inn)),
            }
        })
    }

    /// In the extended class but not the standard one: some `x_i` has degrees `{0, 3}`.
    pub fn is_extended_only(&self) -> bool {
        self.is_in_class(GraphClassVariant::Extended) && !self.is_in_class(GraphClassVariant::Standard)
    }

    /// Parses the canonical `"u->v:m"` token list.
    pub fn parse(b: usize, k: usize, l: usize, text: &str) -> Result<Self> {
        let mut g = Self::new(b, k, l);
        for token in text.split_whitespace() {
            let bad = || Error::InvalidArgument(format!("bad edge token {token:?}"));
            let (pair, m) = token.split_once(':').ok_or_else(bad)?;
            let (u, v) = pair.split_once("->").ok_or_else(bad)?;
            let m: usize = m.parse().map_err(|_| bad())?;
            let (u, v) = (u.parse()?, v.parse()?);
            for _ in 0..m {
                g.add_edge(u, v)?;
            }
        }
        Ok(g)
    }
}

impl fmt::Display for FeynmanGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tokens = self
            .edges
            .iter()
            .map(|((u, v), m)| format!("{u}->{v}:{m}"))
            .join(" ");
        f.write_str(&tokens)
    }
}

/// `#Aut(Γ)`: only parallel edges can be permuted, so this is `∏ m!`.
pub fn aut_order(g: &FeynmanGraph) -> BigUint {
    g.edges
        .values()
        .flat_map(|&m| 1..=m)
        .fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// One representative of every class in `G_{b,k,l}` (or its extended variant),
/// sorted by canonical form.
pub fn enumerate_graphs(b: usize, k: usize, l: usize, variant: GraphClassVariant) -> Vec<FeynmanGraph> {
    let template = FeynmanGraph::new(b, k, l);
    let vertices: Vec<Vertex> = template.vertices().collect();
    let n = vertices.len();

    let mut found = Vec::new();
    for pattern in (0..b)
        .map(|_| variant.x_patterns().iter().copied())
        .multi_cartesian_product()
    {
        let (x_out, x_in): (usize, usize) = pattern
            .iter()
            .fold((0, 0), |(o, i), &(po, pi)| (o + po, i + pi));
        if k + x_out != l + x_in {
            continue;
        }
        let mut out_cap = vec![0; n];
        let mut in_cap = vec![0; n];
        for (idx, v) in vertices.iter().enumerate() {
            match v {
                Vertex::Z(_) => out_cap[idx] = 1,
                Vertex::W(_) => in_cap[idx] = 1,
                Vertex::X(i) => (out_cap[idx], in_cap[idx]) = pattern[i - 1],
            }
        }
        let mut search = GraphSearch {
            vertices: &vertices,
            out_cap,
            in_cap,
            graph: template.clone(),
            found: &mut found,
        };
        search.place_vertex(0);
    }
    found.sort();
    found.dedup();
    found
}

struct GraphSearch<'a> {
    vertices: &'a [Vertex],
    out_cap: Vec<usize>,
    in_cap: Vec<usize>,
    graph: FeynmanGraph,
    found: &'a mut Vec<FeynmanGraph>,
}

impl GraphSearch<'_> {
    /// All in-edges of `vertices[idx]` come from earlier vertices, so they must already be
    /// placed; then the out-stubs of `vertices[idx]` are distributed over later vertices.
    fn place_vertex(&mut self, idx: usize) {
        if idx == self.vertices.len() {
            self.found.push(self.graph.clone());
            return;
        }
        if self.in_cap[idx] != 0 {
            return;
        }
        let stubs = self.out_cap[idx];
        self.place_stubs(idx, stubs, idx + 1);
    }

    /// Sends `stubs` remaining out-edges of `vertices[source]` to targets at positions
    /// `>= first_target`, as a multiset.
    fn place_stubs(&mut self, source: usize, stubs: usize, first_target: usize) {
        if stubs == 0 {
            self.place_vertex(source + 1);
            return;
        }
        let from = self.vertices[source];
        for target in first_target..self.vertices.len() {
            let to = self.vertices[target];
            if self.in_cap[target] == 0 || !from.precedes(to) {
                continue;
            }
            self.in_cap[target] -= 1;
            *self.graph.edges.entry((from, to)).or_insert(0) += 1;
            self.place_stubs(source, stubs - 1, target);
            let m = self.graph.edges.get_mut(&(from, to)).expect("edge just added");
            *m -= 1;
            if *m == 0 {
                self.graph.edges.remove(&(from, to));
            }
            self.in_cap[target] += 1;
        }
    }
}

/// The graph of a factorization: one edge per maximal run of a cyclic component that
/// stays unchanged across consecutive levels `g_i ⋯ g_1 σ_d`.
pub fn associate_graph(t: &FactorizationTuple, d: &Composition, e: &Composition) -> Result<FeynmanGraph> {
    if d.total() != t.degree() || e.total() != t.degree() {
        return Err(Error::DegreeMismatch {
            left: d.total().max(e.total()),
            right: t.degree(),
        });
    }
    if !t.satisfies(d, e)? {
        return Err(Error::EquationViolated);
    }
    let b = t.transpositions.len();
    let levels: Vec<Vec<Cycle>> = t
        .levels(d)?
        .iter()
        .map(|p| cycle_decomposition(p).cycles().to_vec())
        .collect();
    let level_sets: Vec<HashSet<&Cycle>> = levels.iter().map(|cs| cs.iter().collect()).collect();
    let d_blocks = d.blocks();
    let e_blocks: Vec<Cycle> = e.blocks().iter().map(|c| c.relabeled_by(&t.tau)).collect();

    let mut g = FeynmanGraph::new(b, d.len(), e.len());
    for (start, cycles) in levels.iter().enumerate() {
        for cycle in cycles {
            if start > 0 && level_sets[start - 1].contains(cycle) {
                continue;
            }
            let mut end = start;
            while end < b && level_sets[end + 1].contains(cycle) {
                end += 1;
            }
            let from = if start > 0 {
                Vertex::X(start)
            } else {
                let v = d_blocks.iter().position(|c| c == cycle).expect("level 0 is σ_d");
                Vertex::Z(v + 1)
            };
            let to = if end < b {
                Vertex::X(end + 1)
            } else {
                let v = e_blocks
                    .iter()
                    .position(|c| c == cycle)
                    .expect("top level is (σ_e)^τ");
                Vertex::W(v + 1)
            };
            g.add_edge(from, to)?;
        }
    }
    Ok(g)
}

/// `n_{Γ;d;e}` for every graph `Γ` that occurs among the factorizations of `key`.
pub fn count_by_graph(key: &CountKey, bound: WorkBound) -> Result<BTreeMap<FeynmanGraph, BigUint>> {
    let factorizations = enumerate_factorizations(key, bound)?;
    factorizations
        .par_iter()
        .map(|t| associate_graph(t, &key.d, &key.e))
        .try_fold(BTreeMap::new, |mut acc: BTreeMap<FeynmanGraph, BigUint>, g| {
            *acc.entry(g?).or_default() += 1u32;
            Ok(acc)
        })
        .try_reduce(BTreeMap::new, |mut acc, part| {
            for (g, c) in part {
                *acc.entry(g).or_default() += c;
            }
            Ok(acc)
        })
}
