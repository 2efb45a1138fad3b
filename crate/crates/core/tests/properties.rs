mod common;

use common::{er_corpus, random_system, Case};
use opinion_shield::matrix::Matrix;
use opinion_shield::network::InfluenceSystem;
use opinion_shield::oracle::project_onto_slice;
use opinion_shield::solver::{phi, phi_gradient, waterfill};
use opinion_shield::spectral::{compute_response, ResponseModel};
use proptest::prelude::*;
use std::sync::OnceLock;

fn corpus() -> &'static [Case] {
    static CORPUS: OnceLock<Vec<Case>> = OnceLock::new();
    CORPUS.get_or_init(er_corpus)
}

fn value(nu: &[f64], case: &Case) -> f64 {
    phi(nu, &case.model).unwrap().value
}

fn protection(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.5f64..3.0, m)
}

/// Exact Euclidean projection onto `{ν ≥ d, 𝟙'ν = c}` by enumerating which
/// coordinates sit strictly above their bound.
fn brute_force_projection(x: &[f64], d: &[f64], c: f64) -> Vec<f64> {
    let m = x.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << m) {
        let free: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let fixed: f64 = (0..m).filter(|i| mask & (1 << i) == 0).map(|i| d[i]).sum();
        let tau = (free.iter().map(|&i| x[i]).sum::<f64>() - (c - fixed)) / free.len() as f64;
        let nu: Vec<f64> = (0..m)
            .map(|i| if mask & (1 << i) != 0 { x[i] - tau } else { d[i] })
            .collect();
        if nu.iter().zip(d).any(|(v, d)| *v < d - 1e-12) {
            continue;
        }
        let dist: f64 = nu.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum();
        if best.as_ref().is_none_or(|(b, _)| dist < *b) {
            best = Some((dist, nu));
        }
    }
    best.unwrap().1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn value_is_homogeneous(k in 0usize..20, nu in protection(12), alpha in 0.1f64..10.0) {
        let case = &corpus()[k];
        let scaled: Vec<f64> = nu.iter().map(|v| alpha * v).collect();
        let lhs = value(&scaled, case);
        let rhs = value(&nu, case) / alpha;
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs);
    }

    #[test]
    fn value_is_nonincreasing(k in 0usize..20, nu in protection(12), i in 0usize..12, delta in 0.0f64..2.0) {
        let case = &corpus()[k];
        let mut more = nu.clone();
        more[i] += delta;
        prop_assert!(value(&more, case) <= value(&nu, case) * (1.0 + 1e-12));
    }

    #[test]
    fn value_is_midpoint_convex(k in 0usize..20, a in protection(12), b in protection(12)) {
        let case = &corpus()[k];
        let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
        let bound = 0.5 * (value(&a, case) + value(&b, case));
        prop_assert!(value(&mid, case) <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn projection_matches_brute_force(
        x in prop::collection::vec(-3.0f64..5.0, 1..=4),
        slack in 0.0f64..4.0,
        seed in 0u64..1000,
    ) {
        let m = x.len();
        let d: Vec<f64> = (0..m).map(|i| 0.25 + ((seed >> i) % 4) as f64 * 0.5).collect();
        let c = d.iter().sum::<f64>() + slack;
        let fast = project_onto_slice(&x, &d, c);
        let exact = brute_force_projection(&x, &d, c);
        for (a, b) in fast.iter().zip(&exact) {
            prop_assert!((a - b).abs() <= 1e-10, "{fast:?} vs {exact:?}");
        }
        prop_assert!((fast.iter().sum::<f64>() - c).abs() <= 1e-10 * c.max(1.0));
    }

    #[test]
    fn gradient_matches_finite_differences(k in 0usize..20, nu in protection(12), i in 0usize..12) {
        let case = &corpus()[k];
        let g = phi_gradient(&nu, &case.model).unwrap();
        let h = 1e-6 * nu[i];
        let (mut plus, mut minus) = (nu.clone(), nu.clone());
        plus[i] += h;
        minus[i] -= h;
        let fd = (value(&plus, case) - value(&minus, case)) / (2.0 * h);
        prop_assert!((fd - g[i]).abs() <= 1e-5 * g[i].abs());
    }

    #[test]
    fn centrality_ignores_input_scale(seed in 0u64..500, m in 1usize..5, gain in 0.01f64..100.0) {
        let sys = random_system(6, m, seed);
        let base = ResponseModel::from_system(&sys).unwrap();
        let scaled = InfluenceSystem::new(sys.a().clone(), sys.b().scaled(gain)).unwrap();
        let other = ResponseModel::from_system(&scaled).unwrap();
        for (p, q) in base.centrality().iter().zip(other.centrality()) {
            prop_assert!((p - q).abs() <= 1e-12);
        }
    }

    #[test]
    fn response_support_is_reachability(seed in 0u64..500, density in 0.1f64..0.5) {
        let (n, m) = (7, 3);
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut coin = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) < density
        };
        let a_mask = Matrix::from_fn(n, n, |_, _| if coin() { 1.0 } else { 0.0 });
        let b_mask = Matrix::from_fn(n, m, |_, _| if coin() { 1.0 } else { 0.0 });
        let row = |i: usize| 1.0 + a_mask.row(i).iter().sum::<f64>() + b_mask.row(i).iter().sum::<f64>();
        let a = Matrix::from_fn(n, n, |i, j| a_mask[(i, j)] / row(i));
        let b = Matrix::from_fn(n, m, |i, j| b_mask[(i, j)] / row(i));
        let sys = InfluenceSystem::new(a.clone(), b.clone()).unwrap();
        let resp = compute_response(&sys).unwrap();
        for j in 0..m {
            // agents reached from source j by following influence edges backwards
            let mut hit: Vec<bool> = (0..n).map(|i| b[(i, j)] > 0.0).collect();
            loop {
                let next: Vec<bool> = (0..n).map(|i| hit[i] || (0..n).any(|k| a[(i, k)] > 0.0 && hit[k])).collect();
                if next == hit {
                    break;
                }
                hit = next;
            }
            for i in 0..n {
                prop_assert_eq!(resp[(i, j)] > 0.0, hit[i], "agent {} source {}", i, j);
            }
        }
    }

    #[test]
    fn optimum_is_feasible_and_beats_perturbations(k in 0usize..20, t in 0.0f64..1.5, from in 0usize..12, to in 0usize..12, eps in 1e-4f64..1e-2) {
        let case = &corpus()[k];
        let c = 12.0 + 12.0 * t;
        let r = waterfill(&case.lower, c, &case.model).unwrap();
        prop_assert!(r.nu.iter().all(|v| *v >= 1.0 - 1e-9));
        prop_assert!((r.nu.iter().sum::<f64>() - c).abs() <= 1e-9 * c);
        let mut moved = r.nu.clone();
        let amount = eps.min(moved[from] - 1.0);
        moved[from] -= amount;
        moved[to] += amount;
        prop_assert!(value(&moved, case) >= r.value * (1.0 - 1e-12));
    }
}
