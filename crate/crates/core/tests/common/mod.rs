#![allow(dead_code)]

use opinion_shield::matrix::Matrix;
use opinion_shield::network::{
    build_friedkin_johnsen, generate_graph, GraphModel, InfluenceSystem, StubbornnessProfile, UndirectedGraph,
};
use opinion_shield::spectral::ResponseModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SIZE: u64 = 20;
pub const CORPUS_NODES: usize = 12;

pub struct Case {
    pub seed: u64,
    pub graph: UndirectedGraph,
    pub model: ResponseModel,
    pub lower: Vec<f64>,
}

pub fn fj_model(g: &UndirectedGraph, lambda: f64) -> ResponseModel {
    let sys = build_friedkin_johnsen(g, &StubbornnessProfile::uniform(g.nodes(), lambda).unwrap()).unwrap();
    ResponseModel::from_system(&sys).unwrap()
}

pub fn case(graph: UndirectedGraph, seed: u64) -> Case {
    let model = fj_model(&graph, 0.5);
    let lower = vec![1.0; graph.nodes()];
    Case {
        seed,
        graph,
        model,
        lower,
    }
}

/// Twenty connected ER(1/4) Friedkin-Johnsen instances, `n = 12`, `λ = 1/2`, `d = 𝟙`.
pub fn er_corpus() -> Vec<Case> {
    (0..CORPUS_SIZE)
        .map(|seed| {
            let g = generate_graph(GraphModel::ErdosRenyi { p: 0.25 }, CORPUS_NODES, 1000 + seed).unwrap();
            case(g, seed)
        })
        .collect()
}

/// Random dense system with `m` sources and `n` agents, `ρ(A) < 1`.
pub fn random_system(n: usize, m: usize, seed: u64) -> InfluenceSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = Matrix::from_fn(n, n + m, |_, _| rng.random::<f64>());
    // rows of [A B] sum to 0.9 so A is substochastic
    let sums = raw.row_sums();
    let a = Matrix::from_fn(n, n, |i, j| 0.9 * raw[(i, j)] / sums[i]);
    let b = Matrix::from_fn(n, m, |i, j| 0.9 * raw[(i, n + j)] / sums[i]);
    InfluenceSystem::new(a, b).unwrap()
}

/// `k` budgets evenly spread strictly inside `(lo, hi)`.
pub fn interior_budgets(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    (1..=k)
        .map(|j| lo + (hi - lo) * (2 * j - 1) as f64 / (2 * k) as f64)
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
