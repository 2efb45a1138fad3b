//! Influence systems `x(t+1) = A x(t) + B u`, undirected social graphs, and the
//! Friedkin-Johnsen construction `A = [λ]P`, `B = I - [λ]`.

use std::collections::VecDeque;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::spectral::{nonnegative_spectral_radius, SCHUR_TOLERANCE};

/// Resampling budget for random topologies that come out disconnected.
pub const MAX_GENERATION_ATTEMPTS: usize = 100;

/// Plant of the linear dynamics: `n` regular agents driven by `m` exogenous
/// sources. Immutable once validated; Schur stability of `A` is checked on
/// construction.
#[derive(Clone, Debug)]
pub struct InfluenceSystem {
    a: Matrix,
    b: Matrix,
    agent_labels: Vec<String>,
    source_labels: Vec<String>,
    spectral_radius: f64,
}

impl InfluenceSystem {
    pub fn new(a: Matrix, b: Matrix) -> Result<Self> {
        let n = a.rows();
        let m = b.cols();
        let agent_labels = (1..=n).map(|i| format!("agent{i}")).collect();
        let source_labels = (1..=m).map(|i| format!("source{i}")).collect();
        Self::with_labels(a, b, agent_labels, source_labels)
    }

    pub fn with_labels(a: Matrix, b: Matrix, agent_labels: Vec<String>, source_labels: Vec<String>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "A must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        if n == 0 || b.cols() == 0 {
            return Err(Error::DimensionMismatch(
                "need at least one agent and one source".into(),
            ));
        }
        if b.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "B has {} rows but A is {n}x{n}",
                b.rows()
            )));
        }
        if agent_labels.len() != n || source_labels.len() != b.cols() {
            return Err(Error::DimensionMismatch("label count does not match dimensions".into()));
        }
        check_nonnegative(&a, "A")?;
        check_nonnegative(&b, "B")?;
        let estimate = nonnegative_spectral_radius(&a);
        if !estimate.is_stable(SCHUR_TOLERANCE) {
            return Err(Error::NotSchurStable {
                spectral_radius: estimate.value(),
            });
        }
        Ok(Self {
            a,
            b,
            agent_labels,
            source_labels,
            spectral_radius: estimate.value(),
        })
    }

    pub fn agents(&self) -> usize {
        self.a.rows()
    }

    pub fn sources(&self) -> usize {
        self.b.cols()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn agent_labels(&self) -> &[String] {
        &self.agent_labels
    }

    pub fn source_labels(&self) -> &[String] {
        &self.source_labels
    }

    /// Estimate of `ρ(A)` recorded at validation time.
    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }
}

fn check_nonnegative(m: &Matrix, name: &str) -> Result<()> {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let v = m[(i, j)];
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::NegativeWeight {
                    location: format!("{name}[{}][{}]", i + 1, j + 1),
                    value: v,
                });
            }
        }
    }
    Ok(())
}

/// Symmetric nonnegative adjacency with cached weighted degrees.
///
/// Isolated nodes are representable here; they are rejected when the graph is
/// row-normalized by [`build_friedkin_johnsen`].
#[derive(Clone, Debug, PartialEq)]
pub struct UndirectedGraph {
    weights: Matrix,
    degrees: Vec<f64>,
}

impl UndirectedGraph {
    pub fn new(weights: Matrix) -> Result<Self> {
        if !weights.is_square() {
            return Err(Error::DimensionMismatch("adjacency must be square".into()));
        }
        if weights.rows() == 0 {
            return Err(Error::DimensionMismatch("graph needs at least one node".into()));
        }
        check_nonnegative(&weights, "W")?;
        let n = weights.rows();
        for i in 0..n {
            for j in 0..i {
                if weights[(i, j)] != weights[(j, i)] {
                    return Err(Error::Asymmetry {
                        u: j + 1,
                        v: i + 1,
                        forward: weights[(j, i)],
                        backward: weights[(i, j)],
                    });
                }
            }
        }
        let degrees = weights.row_sums();
        Ok(Self { weights, degrees })
    }

    /// Unit-weight graph from 0-based edge pairs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut w = Matrix::zeros(n, n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            w[(u, v)] = 1.0;
            w[(v, u)] = 1.0;
        }
        Self::new(w)
    }

    pub fn nodes(&self) -> usize {
        self.weights.rows()
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Number of undirected edges (self-loops counted once).
    pub fn edge_count(&self) -> usize {
        let n = self.nodes();
        (0..n)
            .map(|i| (i..n).filter(|&j| self.weights[(i, j)] > 0.0).count())
            .sum()
    }

    pub fn is_connected(&self) -> bool {
        connected_components(&self.weights).len() == 1
    }
}

/// Connected components of the positive-entry pattern of a symmetric matrix,
/// each sorted ascending, ordered by smallest member.
pub fn connected_components(adjacency: &Matrix) -> Vec<Vec<usize>> {
    let n = adjacency.rows();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut comp = Vec::new();
        while let Some(u) = queue.pop_front() {
            comp.push(u);
            for v in 0..n {
                if !seen[v] && (adjacency[(u, v)] > 0.0 || adjacency[(v, u)] > 0.0) {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components
}

/// Per-agent susceptibility `λ_i ∈ [0, 1]`; `1 - λ_i` is the weight on the anchor.
#[derive(Clone, Debug, PartialEq)]
pub struct StubbornnessProfile(Vec<f64>);

impl StubbornnessProfile {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidStubbornness { index, value });
            }
        }
        Ok(Self(values))
    }

    pub fn uniform(n: usize, lambda: f64) -> Result<Self> {
        Self::new(vec![lambda; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Row-stochastic normalization `P_ij = W_ij / w_i`.
pub fn row_normalize(g: &UndirectedGraph) -> Result<Matrix> {
    if let Some(node) = g.degrees().iter().position(|&w| !(w > 0.0)) {
        return Err(Error::ZeroDegreeNode { node: node + 1 });
    }
    let w = g.weights();
    let deg = g.degrees();
    Ok(Matrix::from_fn(g.nodes(), g.nodes(), |i, j| w[(i, j)] / deg[i]))
}

/// Friedkin-Johnsen system: every agent is anchored to its own source, so
/// `m = n`, `A = [λ]P` and `B = I - [λ]`.
pub fn build_friedkin_johnsen(g: &UndirectedGraph, lambda: &StubbornnessProfile) -> Result<InfluenceSystem> {
    let n = g.nodes();
    if lambda.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "stubbornness profile has {} entries for {n} nodes",
            lambda.len()
        )));
    }
    let p = row_normalize(g)?;
    let l = lambda.values();
    let a = Matrix::from_fn(n, n, |i, j| l[i] * p[(i, j)]);
    let b = Matrix::from_diagonal(&l.iter().map(|x| 1.0 - x).collect::<Vec<_>>());
    let agent_labels = (1..=n).map(|i| format!("agent{i}")).collect();
    let source_labels = (1..=n).map(|i| format!("anchor{i}")).collect();
    InfluenceSystem::with_labels(a, b, agent_labels, source_labels)
}

/// Topologies available to [`generate_graph`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GraphModel {
    /// Circulant `k`-regular graph (deterministic; the seed is ignored).
    Regular { degree: usize },
    /// `G(n, p)`, resampled until connected.
    ErdosRenyi { p: f64 },
    /// Linear preferential attachment, one edge per arriving node (a tree).
    PreferentialAttachment,
}

impl std::fmt::Display for GraphModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GraphModel::Regular { degree } => write!(f, "regular:{degree}"),
            GraphModel::ErdosRenyi { p } => write!(f, "er:{p}"),
            GraphModel::PreferentialAttachment => write!(f, "ba"),
        }
    }
}

impl std::str::FromStr for GraphModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse {
            location: format!("generator spec '{s}'"),
            message: msg.to_string(),
        };
        match s.split_once(':') {
            Some(("regular", k)) => {
                let degree = k.parse().map_err(|_| bad("degree must be an integer"))?;
                Ok(GraphModel::Regular { degree })
            }
            Some(("er", p)) => {
                let p: f64 = p.parse().map_err(|_| bad("probability must be a number"))?;
                Ok(GraphModel::ErdosRenyi { p })
            }
            None if s == "ba" => Ok(GraphModel::PreferentialAttachment),
            _ => Err(bad("expected regular:<k>, er:<p> or ba")),
        }
    }
}

/// Deterministic for a fixed `(model, n, seed)`; always returns a connected graph.
pub fn generate_graph(model: GraphModel, n: usize, seed: u64) -> Result<UndirectedGraph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 nodes, got {n}")));
    }
    match model {
        GraphModel::Regular { degree } => circulant_regular(n, degree),
        GraphModel::ErdosRenyi { p } => erdos_renyi(n, p, seed),
        GraphModel::PreferentialAttachment => preferential_attachment(n, seed),
    }
}

fn circulant_regular(n: usize, k: usize) -> Result<UndirectedGraph> {
    if k == 0 || k >= n || !(n * k).is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "no {k}-regular graph on {n} nodes (need 0 < k < n and n*k even)"
        )));
    }
    let mut edges = Vec::with_capacity(n * k / 2);
    for i in 0..n {
        for offset in 1..=k / 2 {
            edges.push((i, (i + offset) % n));
        }
        // odd degree forces even n: add the antipodal chord
        if k % 2 == 1 && i < n / 2 {
            edges.push((i, i + n / 2));
        }
    }
    UndirectedGraph::from_edges(n, &edges)
}

fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<UndirectedGraph> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("edge probability {p} outside (0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_GENERATION_ATTEMPTS {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        let g = UndirectedGraph::from_edges(n, &edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_GENERATION_ATTEMPTS,
        reason: format!("G({n}, {p}) never came out connected"),
    })
}

fn preferential_attachment(n: usize, seed: u64) -> Result<UndirectedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = vec![(0, 1)];
    // each node appears once per incident edge, so uniform sampling is degree-proportional
    let mut endpoints = vec![0usize, 1];
    for new in 2..n {
        let target = *endpoints.choose(&mut rng).expect("endpoint pool is never empty");
        edges.push((target, new));
        endpoints.push(target);
        endpoints.push(new);
    }
    UndirectedGraph::from_edges(n, &edges)
}

pub fn cycle(n: usize) -> Result<UndirectedGraph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "cycle needs at least 3 nodes, got {n}"
        )));
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    UndirectedGraph::from_edges(n, &edges)
}

pub fn complete(n: usize) -> Result<UndirectedGraph> {
    let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    UndirectedGraph::from_edges(n, &edges)
}

/// Star with node 0 as the hub.
pub fn star(n: usize) -> Result<UndirectedGraph> {
    let edges: Vec<_> = (1..n).map(|j| (0, j)).collect();
    UndirectedGraph::from_edges(n, &edges)
}

/// Uniformly random labelled tree with a prescribed degree sequence, decoded
/// from a shuffled Prüfer sequence in which node `i` appears `deg_i - 1` times.
pub fn tree_with_degrees(degrees: &[usize], seed: u64) -> Result<UndirectedGraph> {
    let n = degrees.len();
    if n < 2 || degrees.contains(&0) || degrees.iter().sum::<usize>() != 2 * (n - 1) {
        return Err(Error::InvalidParameter(format!(
            "degree sequence {degrees:?} is not realisable by a tree"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut code: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(i, &d)| std::iter::repeat_n(i, d - 1))
        .collect();
    rand::seq::SliceRandom::shuffle(code.as_mut_slice(), &mut rng);

    let mut remaining = degrees.to_vec();
    let mut edges = Vec::with_capacity(n - 1);
    for &parent in &code {
        let leaf = (0..n).find(|&i| remaining[i] == 1).expect("a leaf always exists");
        edges.push((leaf, parent));
        remaining[leaf] = 0;
        remaining[parent] -= 1;
    }
    let last: Vec<usize> = (0..n).filter(|&i| remaining[i] == 1).collect();
    edges.push((last[0], last[1]));
    UndirectedGraph::from_edges(n, &edges)
}
