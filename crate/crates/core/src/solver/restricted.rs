//! Optimum over `{ν : ν_W = d_W, 𝟙'ν ≤ c}` for a fixed saturated set `W`.
//!
//! With `K = M_W[d_W]⁻¹M_W'` the stationarity conditions give
//! `ν_U = M_U'(ρI - K)⁻¹M_U𝟙` where `ρ = φ(ν)` is fixed by the budget identity
//! `𝟙'M_U'(ρI - K)⁻¹M_U𝟙 = c - 𝟙'd_W`. Diagonalizing `K = VΛV'` once turns
//! the identity into the scalar secular equation
//!
//! ```text
//! g(ρ) = Σ_j b_j² / (ρ - Λ_j) = c - 𝟙'd_W,     b = V'M_U𝟙
//! ```
//!
//! which is strictly decreasing and convex on `(ρ(K), ∞)`, so every budget
//! query inside a regime costs one bisection plus an `O(nm)` product.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::spectral::{symmetric_eigen, ResponseModel};

use super::{check_lower_bounds, unconstrained_solution};

/// Relative mismatch tolerated between `𝟙'ν_U` and `c - 𝟙'd_W` after the solve.
pub const BUDGET_IDENTITY_TOLERANCE: f64 = 1e-8;

/// Precomputed data for one saturated set, reusable across budgets.
#[derive(Clone, Debug)]
pub struct RestrictedProblem {
    active: Vec<usize>,
    saturated: Vec<usize>,
    lower: Vec<f64>,
    floor: f64,
    eigenvalues: Vec<f64>,
    weights: Vec<f64>,
    /// `M_U'V`, active sources by agents.
    lift: Matrix,
}

impl RestrictedProblem {
    /// `active` lists the free sources `U`; the rest are pinned to `d`.
    pub fn new(model: &ResponseModel, active: &[usize], d: &[f64]) -> Result<Self> {
        let m = model.sources();
        check_lower_bounds(d, m)?;
        if active.is_empty() {
            return Err(Error::EmptyActiveSet);
        }
        let mut is_active = vec![false; m];
        for &i in active {
            if i >= m || is_active[i] {
                return Err(Error::InvalidParameter(format!("bad active index {i}")));
            }
            is_active[i] = true;
        }
        let mut active = active.to_vec();
        active.sort_unstable();
        let saturated: Vec<usize> = (0..m).filter(|&i| !is_active[i]).collect();
        let floor = saturated.iter().map(|&i| d[i]).sum();

        let response = model.response();
        let n = model.agents();
        let (eigenvalues, vectors) = if saturated.is_empty() {
            (vec![0.0; n], Matrix::identity(n))
        } else {
            let inv_d: Vec<f64> = saturated.iter().map(|&i| 1.0 / d[i]).collect();
            let mw = response.select_columns(&saturated);
            let k = mw.scale_columns(&inv_d).matmul(&mw.transpose());
            let eig = symmetric_eigen(&k)?;
            (eig.values, eig.vectors)
        };
        let mu = response.select_columns(&active);
        let mu_one = mu.row_sums();
        let weights = vectors.tr_mul_vec(&mu_one);
        let lift = mu.transpose().matmul(&vectors);
        Ok(Self {
            active,
            saturated,
            lower: d.to_vec(),
            floor,
            eigenvalues,
            weights,
            lift,
        })
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn saturated(&self) -> &[usize] {
        &self.saturated
    }

    /// `𝟙'd_W`, the budget already committed to saturated sources.
    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// `ρ(K)`; the regime value always lies strictly above it.
    pub fn saturated_radius(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0).max(0.0)
    }

    /// `g(ρ) = Σ_j b_j² / (ρ - Λ_j)`.
    pub fn secular(&self, rho: f64) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.weights)
            .map(|(l, b)| b * b / (rho - l))
            .sum()
    }

    /// Solves `g(ρ) = c - 𝟙'd_W` for `ρ` by bisection on `(ρ(K), ∞)`.
    pub fn value(&self, c: f64) -> Result<f64> {
        let target = c - self.floor;
        if !(target > 0.0) {
            return Err(Error::BudgetTooSmall {
                budget: c,
                floor: self.floor,
            });
        }
        let top = self.saturated_radius();
        let mut lo = top * (1.0 + 1e-12) + 1e-300;
        if !(self.secular(lo) > target) {
            return Err(Error::BracketFailure(format!(
                "g({lo:e}) = {:e} does not exceed target {target:e}",
                self.secular(lo)
            )));
        }
        let mut hi = top + 1.0;
        let mut doublings = 0;
        while self.secular(hi) >= target {
            lo = hi;
            hi = top + 2.0 * (hi - top);
            doublings += 1;
            if doublings > 2000 || !hi.is_finite() {
                return Err(Error::BracketFailure(format!("no upper bracket for target {target:e}")));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 1e-16 * hi {
                break;
            }
            if self.secular(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (glo, ghi) = (self.secular(lo) - target, target - self.secular(hi));
        Ok(if glo <= ghi { lo } else { hi })
    }

    /// `ν_U` at a known regime value `ρ`.
    pub fn active_protection(&self, rho: f64) -> Vec<f64> {
        let coeffs: Vec<f64> = self
            .eigenvalues
            .iter()
            .zip(&self.weights)
            .map(|(l, b)| b / (rho - l))
            .collect();
        self.lift.mul_vec(&coeffs)
    }

    /// Full protection vector `(ν_U, d_W)` and its value `ρ`.
    ///
    /// Fails with [`Error::BudgetMismatch`] if the returned vector does not
    /// spend exactly `c` (the displayed formula is never rescaled).
    pub fn solve(&self, c: f64) -> Result<(Vec<f64>, f64)> {
        let rho = self.value(c)?;
        let nu_active = self.active_protection(rho);
        let spent: f64 = nu_active.iter().sum();
        let target = c - self.floor;
        if (spent - target).abs() > BUDGET_IDENTITY_TOLERANCE * c {
            return Err(Error::BudgetMismatch { spent, target });
        }
        let mut nu = self.lower.clone();
        for (&i, v) in self.active.iter().zip(nu_active) {
            nu[i] = v;
        }
        Ok((nu, rho))
    }
}

/// One-shot restricted optimum `ν^U(c)`. An active set covering every source
/// is delegated to the closed form `cπ`.
pub fn restricted_solution(active: &[usize], d: &[f64], c: f64, model: &ResponseModel) -> Result<(Vec<f64>, f64)> {
    model.require_irreducible()?;
    if active.len() == model.sources() && !active.is_empty() {
        let nu = unconstrained_solution(c, model)?;
        return Ok((nu, model.total_mass() / c));
    }
    let problem = RestrictedProblem::new(model, active, d)?;
    let (nu, rho) = problem.solve(c)?;
    debug_assert!(
        {
            let direct = super::phi(&nu, model)?.value;
            (direct - rho).abs() <= 1e-8 * rho
        },
        "secular value disagrees with direct eigensolve"
    );
    Ok((nu, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_friedkin_johnsen, complete, generate_graph, GraphModel, StubbornnessProfile};
    use crate::solver::phi;

    fn fj_model(g: &crate::network::UndirectedGraph, lambda: f64) -> ResponseModel {
        let sys = build_friedkin_johnsen(g, &StubbornnessProfile::uniform(g.nodes(), lambda).unwrap()).unwrap();
        ResponseModel::from_system(&sys).unwrap()
    }

    #[test]
    fn full_active_set_matches_closed_form() {
        let model = fj_model(&generate_graph(GraphModel::ErdosRenyi { p: 0.3 }, 8, 11).unwrap(), 0.5);
        let all: Vec<usize> = (0..8).collect();
        let (nu, rho) = restricted_solution(&all, &[1.0; 8], 12.0, &model).unwrap();
        let expected = unconstrained_solution(12.0, &model).unwrap();
        assert_eq!(nu, expected);
        assert!((rho - model.total_mass() / 12.0).abs() < 1e-12);
        // the secular machinery with K = 0 reaches the same point
        let problem = RestrictedProblem::new(&model, &all, &[1.0; 8]).unwrap();
        let (nu2, rho2) = problem.solve(12.0).unwrap();
        for (a, b) in nu2.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!((rho2 - rho).abs() < 1e-12);
    }

    #[test]
    fn two_source_restriction_by_brute_force() {
        // asymmetric 2-agent system, one source pinned
        let model = fj_model(&complete(2).unwrap(), 0.5);
        let problem = RestrictedProblem::new(&model, &[0], &[1.0, 1.0]).unwrap();
        for c in [2.2, 2.6, 3.0] {
            let (nu, rho) = problem.solve(c).unwrap();
            assert!((nu[0] - (c - 1.0)).abs() < 1e-10);
            assert_eq!(nu[1], 1.0);
            // closed-form dominant root of [ν]^{-1/2}H[ν]^{-1/2}
            let h = model.interaction();
            let (a, b, dd) = (h[(0, 0)] / nu[0], h[(0, 1)] / nu[0].sqrt(), h[(1, 1)]);
            let root = 0.5 * (a + dd) + (0.25 * (a - dd).powi(2) + b * b).sqrt();
            assert!((rho - root).abs() < 1e-10 * root);
        }
    }

    #[test]
    fn secular_value_equals_direct_phi() {
        let model = fj_model(&generate_graph(GraphModel::PreferentialAttachment, 10, 5).unwrap(), 0.5);
        let d = vec![1.0; 10];
        let active = [0, 1, 3, 4, 7];
        let problem = RestrictedProblem::new(&model, &active, &d).unwrap();
        for c in [10.5, 12.0, 16.0] {
            let (nu, rho) = problem.solve(c).unwrap();
            let direct = phi(&nu, &model).unwrap().value;
            assert!((direct - rho).abs() <= 1e-10 * rho, "c={c}: {direct} vs {rho}");
            assert!((nu.iter().sum::<f64>() - c).abs() < 1e-9 * c);
            assert!(rho > problem.saturated_radius());
        }
    }

    #[test]
    fn secular_is_decreasing() {
        let model = fj_model(&generate_graph(GraphModel::ErdosRenyi { p: 0.4 }, 7, 3).unwrap(), 0.6);
        let problem = RestrictedProblem::new(&model, &[2, 5], &[1.0; 7]).unwrap();
        let r0 = problem.saturated_radius();
        let mut previous = f64::INFINITY;
        for k in 1..50 {
            let g = problem.secular(r0 + 0.05 * k as f64);
            assert!(g < previous);
            previous = g;
        }
    }

    #[test]
    fn error_paths() {
        let model = fj_model(&complete(3).unwrap(), 0.5);
        assert_eq!(
            RestrictedProblem::new(&model, &[], &[1.0; 3]).unwrap_err(),
            Error::EmptyActiveSet
        );
        let problem = RestrictedProblem::new(&model, &[0], &[1.0; 3]).unwrap();
        assert_eq!(
            problem.solve(2.0).unwrap_err(),
            Error::BudgetTooSmall {
                budget: 2.0,
                floor: 2.0
            }
        );
    }
}
