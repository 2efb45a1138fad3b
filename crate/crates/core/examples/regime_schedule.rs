//! Budgets at which sources saturate at their lower bound.
//!
//!     cargo run --example regime_schedule

use opinion_shield::network::{build_friedkin_johnsen, star, StubbornnessProfile};
use opinion_shield::solver::schedule;
use opinion_shield::spectral::ResponseModel;

fn main() -> opinion_shield::Result<()> {
    let graph = star(6)?;
    let system = build_friedkin_johnsen(&graph, &StubbornnessProfile::uniform(6, 0.5)?)?;
    let model = ResponseModel::from_system(&system)?;
    let s = schedule(&[1.0; 6], &model)?;

    println!("c0 = {:.6}, floor = {}", s.threshold(), s.floor());
    for (c, active) in s.breakpoints().iter().zip(s.active_sets()) {
        let members: Vec<usize> = active.iter().map(|i| i + 1).collect();
        println!("  from {c:.6} upward: active {members:?}");
    }
    for c in [6.5, 8.0, 10.0, 14.0] {
        let (nu, regime) = s.evaluate(c)?;
        let nu: Vec<String> = nu.iter().map(|v| format!("{v:.4}")).collect();
        println!("c = {c:>4}: regime {regime:?}, nu = [{}]", nu.join(", "));
    }
    Ok(())
}
