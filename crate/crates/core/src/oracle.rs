//! Independent certificates for the analytic solver: generic projected
//! gradient on the budget slice, brute-force grid search for `m ≤ 3`, and
//! sampled attacks bounding `φ` from below.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::norm2;
use crate::solver::{check_lower_bounds, displacement, gradient_from, phi};
use crate::spectral::ResponseModel;

pub const DEFAULT_MAX_ITERATIONS: usize = 50_000;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 80;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    ProjectedGradient,
    Grid,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    pub nu: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub method: OracleMethod,
}

/// Euclidean projection onto `{ν : ν ≥ d, 𝟙'ν = c}`.
///
/// The minimizer is `ν_i = max(d_i, x_i - τ)` for the water level `τ` that
/// spends the budget exactly; `τ` is located by sorting the breakpoints
/// `x_i - d_i`.
pub fn project_onto_slice(x: &[f64], d: &[f64], c: f64) -> Vec<f64> {
    let surplus = c - d.iter().sum::<f64>();
    debug_assert!(surplus >= 0.0);
    let y: Vec<f64> = x.iter().zip(d).map(|(x, d)| x - d).collect();
    // simplex projection of y onto {y ≥ 0, 𝟙'y = surplus}
    let mut sorted = y.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cumulative += v;
        let candidate = (cumulative - surplus) / (k + 1) as f64;
        if v - candidate > 0.0 {
            tau = candidate;
        } else {
            break;
        }
    }
    y.iter().zip(d).map(|(y, d)| d + (y - tau).max(0.0)).collect()
}

/// Minimizes `φ` over `{ν ≥ d, 𝟙'ν = c}` by projected gradient descent.
///
/// Trial steps start from the Barzilai-Borwein estimate and are halved until
/// the Armijo condition holds, so every accepted step strictly lowers `φ`.
/// Non-convergence is reported through `converged = false`, never as an error.
pub fn projected_gradient_minimize(
    d: &[f64],
    c: f64,
    model: &ResponseModel,
    max_iterations: usize,
    tol: f64,
) -> Result<OracleResult> {
    let m = model.sources();
    let floor = check_lower_bounds(d, m)?;
    if !(c > floor) {
        return Err(Error::BudgetInfeasible { budget: c, floor });
    }
    let share = (c - floor) / m as f64;
    let mut nu: Vec<f64> = d.iter().map(|d| d + share).collect();
    let mut eval = phi(&nu, model)?;
    let mut grad = gradient_from(&nu, &eval, model);
    let mut step = 1.0 / norm2(&grad).max(f64::MIN_POSITIVE);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iterations {
        let mapping: Vec<f64> = {
            let trial: Vec<f64> = nu.iter().zip(&grad).map(|(v, g)| v - g).collect();
            let p = project_onto_slice(&trial, d, c);
            nu.iter().zip(&p).map(|(v, p)| v - p).collect()
        };
        if norm2(&mapping) <= tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut accepted = None;
        let mut t = step;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = nu.iter().zip(&grad).map(|(v, g)| v - t * g).collect();
            let candidate = project_onto_slice(&trial, d, c);
            let decrease: f64 = grad
                .iter()
                .zip(candidate.iter().zip(&nu))
                .map(|(g, (a, b))| g * (a - b))
                .sum();
            let cand_eval = phi(&candidate, model)?;
            if cand_eval.value < eval.value && cand_eval.value <= eval.value + ARMIJO * decrease {
                accepted = Some((candidate, cand_eval));
                break;
            }
            t *= 0.5;
        }
        let Some((next, next_eval)) = accepted else {
            // no representable decrease left
            break;
        };
        let next_grad = gradient_from(&next, &next_eval, model);
        let s: Vec<f64> = next.iter().zip(&nu).map(|(a, b)| a - b).collect();
        let yk: Vec<f64> = next_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&yk).map(|(a, b)| a * b).sum();
        let ss: f64 = s.iter().map(|a| a * a).sum();
        step = if sy > 0.0 {
            (ss / sy).clamp(1e-12, 1e12)
        } else {
            (2.0 * t).min(1e12)
        };
        nu = next;
        eval = next_eval;
        grad = next_grad;
    }
    Ok(OracleResult {
        value: eval.value,
        nu,
        iterations,
        converged,
        method: OracleMethod::ProjectedGradient,
    })
}

/// Exhaustive scan of the slice `{ν ≥ d, 𝟙'ν = c}` with `resolution` points
/// per free coordinate. Only for `m ≤ 3`.
pub fn grid_search(d: &[f64], c: f64, model: &ResponseModel, resolution: usize) -> Result<OracleResult> {
    let m = model.sources();
    if m > 3 {
        return Err(Error::DimensionTooLarge(m));
    }
    if resolution < 100 {
        return Err(Error::InvalidParameter(format!(
            "grid resolution {resolution} below 100"
        )));
    }
    let floor = check_lower_bounds(d, m)?;
    if !(c >= floor) {
        return Err(Error::BudgetInfeasible { budget: c, floor });
    }
    let surplus = c - floor;
    let spacing = surplus / (resolution - 1) as f64;
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut visits = 0;
    let mut consider = |nu: Vec<f64>| -> Result<()> {
        visits += 1;
        let value = phi(&nu, model)?.value;
        if best.as_ref().is_none_or(|(_, v)| value < *v) {
            best = Some((nu, value));
        }
        Ok(())
    };
    match m {
        1 => consider(vec![c])?,
        2 => {
            for i in 0..resolution {
                let a = i as f64 * spacing;
                consider(vec![d[0] + a, d[1] + (surplus - a).max(0.0)])?;
            }
        }
        _ => {
            for i in 0..resolution {
                for j in 0..resolution - i {
                    let (a, b) = (i as f64 * spacing, j as f64 * spacing);
                    consider(vec![d[0] + a, d[1] + b, d[2] + (surplus - a - b).max(0.0)])?;
                }
            }
        }
    }
    let (nu, value) = best.expect("grid has at least one point");
    Ok(OracleResult {
        nu,
        value,
        iterations: visits,
        converged: true,
        method: OracleMethod::Grid,
    })
}

/// Largest displacement over `trials` uniformly random unit attacks.
///
/// `trials = 0` evaluates the attacker's best response `ω*` instead, which
/// attains `φ(ν)` exactly.
pub fn attack_sample(nu: &[f64], model: &ResponseModel, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        let eval = phi(nu, model)?;
        return Ok(displacement(nu, &eval.attacker_response, model));
    }
    let m = model.sources();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..trials {
        let mut omega: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = norm2(&omega);
        if norm == 0.0 {
            continue;
        }
        omega.iter_mut().for_each(|w| *w /= norm);
        best = best.max(displacement(nu, &omega, model));
    }
    Ok(best)
}
