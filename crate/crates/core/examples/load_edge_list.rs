//! Loads a network from disk and sweeps the budget.
//!
//!     cargo run --example load_edge_list [path]

use opinion_shield::cli::{cmd_sweep, BudgetSpec, OutputFormat, Render, RunConfig};

fn main() -> opinion_shield::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/small_tree.txt").to_string());
    let mut config = RunConfig::from_file(path);
    config.budget = Some(BudgetSpec::Sweep {
        from: 11.0,
        to: 22.0,
        steps: 12,
    });
    config.heuristics = true;
    print!("{}", cmd_sweep(&config)?.render(OutputFormat::Table));
    Ok(())
}
