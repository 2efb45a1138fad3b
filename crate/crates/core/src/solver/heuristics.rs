//! Degree-based allocations used as baselines against `ν*(c)`.

use crate::error::{Error, Result};
use crate::network::UndirectedGraph;

use super::{check_lower_bounds, ProtectionVector};

fn surplus(c: f64, g: &UndirectedGraph, d: &[f64]) -> Result<f64> {
    let floor = check_lower_bounds(d, g.nodes())?;
    if !(c >= floor * (1.0 - 1e-12)) {
        return Err(Error::BudgetInfeasible { budget: c, floor });
    }
    Ok((c - floor).max(0.0))
}

/// Spreads the budget above `𝟙'd` proportionally to degree:
/// `ν_i = d_i + (c - 𝟙'd) w_i / Σ_j w_j`.
pub fn heuristic_degree(c: f64, g: &UndirectedGraph, d: &[f64]) -> Result<ProtectionVector> {
    let extra = surplus(c, g, d)?;
    let total: f64 = g.degrees().iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidParameter("graph has no edges".into()));
    }
    let nu = d.iter().zip(g.degrees()).map(|(d, w)| d + extra * w / total).collect();
    Ok(ProtectionVector {
        nu,
        lower: d.to_vec(),
        budget: c,
    })
}

/// Highest-degree node, lowest index on ties.
pub fn key_node(g: &UndirectedGraph) -> usize {
    g.degrees()
        .iter()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |best, (i, &w)| if w > best.1 { (i, w) } else { best },
        )
        .0
}

/// Puts the whole surplus on the [`key_node`].
pub fn heuristic_key_node(c: f64, g: &UndirectedGraph, d: &[f64]) -> Result<ProtectionVector> {
    let extra = surplus(c, g, d)?;
    let mut nu = d.to_vec();
    nu[key_node(g)] += extra;
    Ok(ProtectionVector {
        nu,
        lower: d.to_vec(),
        budget: c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{cycle, star, UndirectedGraph};

    #[test]
    fn star_degree_split() {
        let g = star(5).unwrap();
        let v = heuristic_degree(9.0, &g, &[1.0; 5]).unwrap();
        assert!((v.nu[0] - 3.0).abs() < 1e-15);
        assert!(v.nu[1..].iter().all(|x| (x - 1.5).abs() < 1e-15));
        assert!((v.spent() - 9.0).abs() < 1e-12);
    }

    #[test]
    fn zero_surplus_is_lower_bound() {
        let g = cycle(6).unwrap();
        assert_eq!(heuristic_degree(6.0, &g, &[1.0; 6]).unwrap().nu, vec![1.0; 6]);
        assert_eq!(heuristic_key_node(6.0, &g, &[1.0; 6]).unwrap().nu, vec![1.0; 6]);
        assert!(matches!(
            heuristic_key_node(5.0, &g, &[1.0; 6]),
            Err(Error::BudgetInfeasible { .. })
        ));
    }

    #[test]
    fn regular_degree_split_is_uniform() {
        let g = cycle(8).unwrap();
        let v = heuristic_degree(12.0, &g, &[1.0; 8]).unwrap();
        assert!(v.nu.iter().all(|x| (x - 1.5).abs() < 1e-15));
    }

    #[test]
    fn key_node_ties_break_low() {
        // path 0-1-2-3: nodes 1 and 2 tie at degree 2
        let g = UndirectedGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(key_node(&g), 1);
        let v = heuristic_key_node(6.0, &g, &[1.0; 4]).unwrap();
        assert_eq!(v.nu, vec![1.0, 3.0, 1.0, 1.0]);
    }
}
