//! Optimal protection at one budget, with its audit trail.
//!
//!     cargo run --example solve_budget

use opinion_shield::network::{build_friedkin_johnsen, generate_graph, GraphModel, StubbornnessProfile};
use opinion_shield::solver::{displacement, waterfill};
use opinion_shield::spectral::ResponseModel;

fn main() -> opinion_shield::Result<()> {
    let n = 15;
    let graph = generate_graph(GraphModel::ErdosRenyi { p: 0.25 }, n, 7)?;
    let system = build_friedkin_johnsen(&graph, &StubbornnessProfile::uniform(n, 0.5)?)?;
    let model = ResponseModel::from_system(&system)?;
    let lower = vec![1.0; n];

    let report = waterfill(&lower, 20.0, &model)?;
    println!("budget {}  worst-case displacement {:.6}", report.budget, report.value);
    println!("regime {:?}  KKT residual {:.2e}", report.regime, report.kkt_residual);
    for (i, nu) in report.nu.iter().enumerate() {
        let mark = if report.active_set.contains(&i) {
            ""
        } else {
            "  (at lower bound)"
        };
        println!("  nu[{:>2}] = {nu:.5}{mark}", i + 1);
    }
    // the reported attack attains the value
    let attained = displacement(&report.nu, &report.attacker_response, &model);
    println!("best attack attains {attained:.6}");
    Ok(())
}
