//! The defender's problem: minimize the worst-case displacement
//! `φ(ν) = max_{‖ω‖=1} ‖M[ν]^{-1/2}ω‖²` over `{ν ≥ d, 𝟙'ν ≤ c}`.
//!
//! `φ(ν)` is the dominant eigenvalue of `[ν]^{-1/2} H [ν]^{-1/2}`. Above the
//! threshold `c⁰ = max_i d_i/π_i` the optimum is `cπ`; below it the optimum is
//! assembled regime by regime by [`waterfill`], each regime being the solution
//! of a problem with a fixed saturated set ([`restricted`]).

mod heuristics;
pub mod restricted;
mod waterfill;

use serde::{Deserialize, Serialize};

pub use heuristics::{heuristic_degree, heuristic_key_node, key_node};
pub use restricted::{restricted_solution, RestrictedProblem};
pub use waterfill::{schedule, waterfill, BudgetSchedule, SolveReport};

use crate::error::{Error, Result};
use crate::matrix::{dot, norm2};
use crate::spectral::{spectral_radius, EigenPair, ResponseModel};

/// Feasibility slack used when checking `ν ≥ d` and `𝟙'ν ≤ c`.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

/// A protection vector together with the constraints it was built for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtectionVector {
    pub nu: Vec<f64>,
    pub lower: Vec<f64>,
    pub budget: f64,
}

impl ProtectionVector {
    pub fn spent(&self) -> f64 {
        self.nu.iter().sum()
    }

    pub fn is_feasible(&self, tol: f64) -> bool {
        self.nu.iter().zip(&self.lower).all(|(v, d)| *v >= d - tol)
            && self.spent() <= self.budget + tol * self.budget.max(1.0)
    }
}

/// Validates a lower-bound vector `d ∈ R^m_{++}` and returns `𝟙'd`.
pub fn check_lower_bounds(d: &[f64], m: usize) -> Result<f64> {
    if d.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "lower bounds have {} entries for {m} sources",
            d.len()
        )));
    }
    for (index, &value) in d.iter().enumerate() {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::InvalidLowerBound { index, value });
        }
    }
    Ok(d.iter().sum())
}

fn check_nu(nu: &[f64], m: usize) -> Result<()> {
    if nu.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "protection vector has {} entries for {m} sources",
            nu.len()
        )));
    }
    for (index, &value) in nu.iter().enumerate() {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::NonPositiveNu { index, value });
        }
    }
    Ok(())
}

/// `φ(ν)` with the attacker's best response.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    /// Unit-norm `ω*` attaining the inner maximum.
    pub attacker_response: Vec<f64>,
    pub eigen: EigenPair,
}

/// Worst-case displacement `φ(ν) = ρ([ν]^{-1/2} H [ν]^{-1/2})`.
///
/// Refuses models whose source interaction graph is disconnected, since the
/// dominant eigenvalue is then no longer guaranteed simple.
pub fn phi(nu: &[f64], model: &ResponseModel) -> Result<Evaluation> {
    model.require_irreducible()?;
    phi_unchecked(nu, model)
}

/// [`phi`] without the irreducibility guard.
pub fn phi_unchecked(nu: &[f64], model: &ResponseModel) -> Result<Evaluation> {
    check_nu(nu, model.sources())?;
    let scale: Vec<f64> = nu.iter().map(|v| 1.0 / v.sqrt()).collect();
    let q = model.interaction().congruence_diag(&scale);
    let eigen = spectral_radius(&q)?;
    Ok(Evaluation {
        value: eigen.value,
        attacker_response: eigen.vector.clone(),
        eigen,
    })
}

/// Gradient `∂φ/∂ν_i = -(M'z)_i² / ν_i²`, with `z` the unit dominant
/// eigenvector of `M[ν]⁻¹M'`.
pub fn phi_gradient(nu: &[f64], model: &ResponseModel) -> Result<Vec<f64>> {
    let eval = phi(nu, model)?;
    Ok(gradient_from(nu, &eval, model))
}

/// Gradient reusing an existing evaluation at the same `ν`.
pub fn gradient_from(nu: &[f64], eval: &Evaluation, model: &ResponseModel) -> Vec<f64> {
    interaction_strengths(nu, eval, model).into_iter().map(|q| -q).collect()
}

/// `(M'z)_i² / ν_i²` for every source: equal on the active set at an
/// optimum, and no larger than that common value on saturated sources.
pub fn interaction_strengths(nu: &[f64], eval: &Evaluation, model: &ResponseModel) -> Vec<f64> {
    // z ∝ M[ν]^{-1/2} y maps the eigenvector y of [ν]^{-1/2}H[ν]^{-1/2} to M[ν]⁻¹M'
    let weighted: Vec<f64> = eval
        .attacker_response
        .iter()
        .zip(nu)
        .map(|(y, v)| y / v.sqrt())
        .collect();
    let z = model.response().mul_vec(&weighted);
    let zn = norm2(&z);
    let mz = model.response().tr_mul_vec(&z);
    mz.iter().zip(nu).map(|(g, v)| (g / zn).powi(2) / (v * v)).collect()
}

/// Displacement `Φ(ν, ω) = ‖x‖²` of the equilibrium `x = M[ν]^{-1/2}ω`.
pub fn displacement(nu: &[f64], omega: &[f64], model: &ResponseModel) -> f64 {
    let u: Vec<f64> = omega.iter().zip(nu).map(|(w, v)| w / v.sqrt()).collect();
    let x = model.response().mul_vec(&u);
    dot(&x, &x)
}

/// Optimum without lower bounds: `ν⁰(c) = cπ`, with value `𝟙'H𝟙 / c`.
pub fn unconstrained_solution(c: f64, model: &ResponseModel) -> Result<Vec<f64>> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::NonPositiveBudget { budget: c });
    }
    Ok(model.centrality().iter().map(|p| c * p).collect())
}

/// High-budget threshold `c⁰ = max_i d_i / π_i`.
pub fn high_budget_threshold(d: &[f64], centrality: &[f64]) -> Result<f64> {
    check_lower_bounds(d, centrality.len())?;
    if let Some(index) = centrality.iter().position(|p| !(*p > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "centrality of source {} is not positive",
            index + 1
        )));
    }
    Ok(d.iter()
        .zip(centrality)
        .map(|(d, p)| d / p)
        .fold(f64::NEG_INFINITY, f64::max))
}
