//! How far degree-based allocations fall from the optimum.
//!
//!     cargo run --example heuristics_comparison

use opinion_shield::network::{build_friedkin_johnsen, generate_graph, GraphModel, StubbornnessProfile};
use opinion_shield::solver::{heuristic_degree, heuristic_key_node, phi, waterfill};
use opinion_shield::spectral::ResponseModel;

fn main() -> opinion_shield::Result<()> {
    let n = 20;
    let graph = generate_graph(GraphModel::PreferentialAttachment, n, 3)?;
    let system = build_friedkin_johnsen(&graph, &StubbornnessProfile::uniform(n, 0.5)?)?;
    let model = ResponseModel::from_system(&system)?;
    let lower = vec![1.0; n];

    println!("budget  optimum   degree/opt  key-node/opt");
    for step in 0..=8 {
        let c = n as f64 * (1.0 + step as f64 / 8.0);
        let best = waterfill(&lower, c, &model)?.value;
        let by_degree = phi(&heuristic_degree(c, &graph, &lower)?.nu, &model)?.value;
        let by_key = phi(&heuristic_key_node(c, &graph, &lower)?.nu, &model)?.value;
        println!(
            "{c:>6.1}  {best:.5}  {:>10.4}  {:>12.4}",
            by_degree / best,
            by_key / best
        );
    }
    Ok(())
}
