use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo_ising::IsingModel;
use crate::scalar::Scalar;

use super::chimera::{HardwareGraph, Side};

/// One chain of physical qubits per logical variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingMap {
    pub chains: Vec<Vec<usize>>,
}

impl EmbeddingMap {
    pub fn new(chains: Vec<Vec<usize>>) -> Self {
        Self { chains }
    }

    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    /// Checks that chains are nonempty, in range, disjoint and connected
    /// in `g`.
    pub fn validate(&self, g: &HardwareGraph) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (i, chain) in self.chains.iter().enumerate() {
            if chain.is_empty() {
                return Err(Error::Embedding(format!("chain {i} is empty")));
            }
            for &node in chain {
                if node >= g.node_count() {
                    return Err(Error::Embedding(format!(
                        "chain {i} uses node {node}, graph has {} nodes",
                        g.node_count()
                    )));
                }
                if !seen.insert(node) {
                    return Err(Error::Embedding(format!("node {node} appears in more than one chain (chain {i})")));
                }
            }
            if !connected(chain, g) {
                return Err(Error::Embedding(format!("chain {i} is not connected")));
            }
        }
        Ok(())
    }

    /// Physical edges joining chains `i` and `j`.
    pub fn edges_between(&self, g: &HardwareGraph, i: usize, j: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &a in &self.chains[i] {
            for &b in &self.chains[j] {
                if g.has_edge(a, b) {
                    out.push((a.min(b), a.max(b)));
                }
            }
        }
        out
    }

    /// Physical edges inside chain `i`.
    pub fn chain_edges(&self, g: &HardwareGraph, i: usize) -> Vec<(usize, usize)> {
        let chain = &self.chains[i];
        let mut out = Vec::new();
        for (p, &a) in chain.iter().enumerate() {
            for &b in &chain[p + 1..] {
                if g.has_edge(a, b) {
                    out.push((a.min(b), a.max(b)));
                }
            }
        }
        out
    }
}

fn connected(chain: &[usize], g: &HardwareGraph) -> bool {
    let members: BTreeSet<usize> = chain.iter().copied().collect();
    let mut visited = BTreeSet::from([chain[0]]);
    let mut queue = VecDeque::from([chain[0]]);
    while let Some(a) = queue.pop_front() {
        for &b in &members {
            if !visited.contains(&b) && g.has_edge(a, b) {
                visited.insert(b);
                queue.push_back(b);
            }
        }
    }
    visited.len() == members.len()
}

/// Embeds `K_k` into a single cell: chain `i` is `{left_i, right_i}`.
pub fn cell_clique_embedding(k: usize, g: &HardwareGraph) -> Result<EmbeddingMap> {
    if !g.is_single_cell() {
        return Err(Error::Embedding("cell clique embedding needs a single-cell graph".into()));
    }
    if k == 0 || k > g.t() {
        return Err(Error::Capacity { k, t: g.t() });
    }
    Ok(EmbeddingMap::new(
        (0..k)
            .map(|i| vec![g.node_id(0, 0, Side::Left, i), g.node_id(0, 0, Side::Right, i)])
            .collect(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChainStrength<T> {
    /// `2 · max(max|field|, max|coupling|, 1)`.
    Auto,
    Fixed(T),
}

impl<T: Scalar> ChainStrength<T> {
    pub fn resolve(self, model: &IsingModel<T>) -> T {
        match self {
            ChainStrength::Fixed(s) => s,
            ChainStrength::Auto => {
                let max = model
                    .field()
                    .iter()
                    .chain(model.coupling().values())
                    .fold(T::one(), |a, v| a.max(v.abs()));
                T::lit(2.0) * max
            }
        }
    }
}

/// Physical model over all nodes of `g`.
///
/// Fields are split evenly over chain qubits, couplings evenly over the
/// physical edges between chains, and every intra-chain edge gets `−σ`.
/// The offset gains `σ` per intra-chain edge, so a state with every chain
/// aligned has exactly the logical energy.
pub fn embed<T: Scalar>(
    model: &IsingModel<T>,
    g: &HardwareGraph,
    emb: &EmbeddingMap,
    chain_strength: ChainStrength<T>,
) -> Result<IsingModel<T>> {
    emb.validate(g)?;
    if model.n() != emb.len() {
        return Err(Error::Embedding(format!(
            "model has {} variables but the embedding has {} chains",
            model.n(),
            emb.len()
        )));
    }
    let sigma = chain_strength.resolve(model);
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(Error::Invalid(format!("chain strength must be positive, got {sigma}")));
    }

    let mut field = vec![T::zero(); g.node_count()];
    for (chain, &h) in emb.chains.iter().zip(model.field()) {
        let share = h / T::from_count(chain.len());
        for &node in chain {
            field[node] = share;
        }
    }

    let mut coupling: BTreeMap<(usize, usize), T> = BTreeMap::new();
    for (&(i, j), &w) in model.coupling() {
        let edges = emb.edges_between(g, i, j);
        if edges.is_empty() {
            return Err(Error::Embedding(format!(
                "logical coupling ({i}, {j}) has no physical edge between its chains"
            )));
        }
        let share = w / T::from_count(edges.len());
        for e in edges {
            coupling.insert(e, share);
        }
    }

    let mut chain_edges = 0usize;
    for i in 0..emb.len() {
        for e in emb.chain_edges(g, i) {
            coupling.insert(e, -sigma);
            chain_edges += 1;
        }
    }
    let offset = model.offset() + sigma * T::from_count(chain_edges);
    IsingModel::new(field, coupling, offset)
}

/// Majority vote per chain; an exact tie resolves to −1. Also returns the
/// number of chains whose qubits disagree.
pub fn unembed(physical_state: &[i8], emb: &EmbeddingMap) -> Result<(Vec<i8>, usize)> {
    let mut logical = Vec::with_capacity(emb.len());
    let mut broken = 0;
    for (i, chain) in emb.chains.iter().enumerate() {
        let mut sum: i64 = 0;
        for &node in chain {
            match physical_state.get(node) {
                Some(&s) if s == 1 || s == -1 => sum += s as i64,
                Some(&s) => return Err(Error::Domain(format!("physical spin {node} is {s}, not ±1"))),
                None => {
                    return Err(Error::dim(format!(
                        "chain {i} uses node {node} but the state has length {}",
                        physical_state.len()
                    )))
                }
            }
        }
        if sum.unsigned_abs() as usize != chain.len() {
            broken += 1;
        }
        logical.push(if sum > 0 { 1 } else { -1 });
    }
    Ok((logical, broken))
}
