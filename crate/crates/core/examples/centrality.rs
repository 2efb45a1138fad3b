//! Input centrality of a Friedkin-Johnsen network and its high-budget threshold.
//!
//!     cargo run --example centrality

use opinion_shield::network::{build_friedkin_johnsen, generate_graph, GraphModel, StubbornnessProfile};
use opinion_shield::solver::high_budget_threshold;
use opinion_shield::spectral::ResponseModel;

fn main() -> opinion_shield::Result<()> {
    let graph = generate_graph(GraphModel::PreferentialAttachment, 12, 42)?;
    let system = build_friedkin_johnsen(&graph, &StubbornnessProfile::uniform(12, 0.5)?)?;
    let model = ResponseModel::from_system(&system)?;

    println!("source  degree  centrality");
    for (i, (pi, w)) in model.centrality().iter().zip(graph.degrees()).enumerate() {
        println!("{:>6}  {w:>6}  {pi:.4}", i + 1);
    }
    let c0 = high_budget_threshold(&[1.0; 12], model.centrality())?;
    println!("1'H1 = {:.4}", model.total_mass());
    println!("c0   = {c0:.4}  (above this budget the optimum is c·π)");
    Ok(())
}
