//! Cross-checks the analytic solver against a generic convex method.
//!
//!     cargo run --example oracle_check

use opinion_shield::network::{build_friedkin_johnsen, generate_graph, GraphModel, StubbornnessProfile};
use opinion_shield::oracle::{attack_sample, projected_gradient_minimize, DEFAULT_MAX_ITERATIONS};
use opinion_shield::solver::waterfill;
use opinion_shield::spectral::ResponseModel;

fn main() -> opinion_shield::Result<()> {
    let n = 12;
    let graph = generate_graph(GraphModel::ErdosRenyi { p: 0.25 }, n, 11)?;
    let system = build_friedkin_johnsen(&graph, &StubbornnessProfile::uniform(n, 0.5)?)?;
    let model = ResponseModel::from_system(&system)?;
    let lower = vec![1.0; n];

    for c in [13.0, 15.0, 18.0] {
        let exact = waterfill(&lower, c, &model)?;
        let oracle = projected_gradient_minimize(&lower, c, &model, DEFAULT_MAX_ITERATIONS, 1e-10)?;
        let gap = exact
            .nu
            .iter()
            .zip(&oracle.nu)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let sampled = attack_sample(&exact.nu, &model, 1000, 1)?;
        println!(
            "c = {c}: waterfill {:.10}, projected gradient {:.10} ({} iterations), max |Δν| {gap:.1e}",
            exact.value, oracle.value, oracle.iterations
        );
        println!("        best of 1000 random attacks {sampled:.6} <= {:.6}", exact.value);
    }
    Ok(())
}
