//! Regime-by-regime construction of `ν*(c)`.
//!
//! Starting from `c⁰ = max_i d_i/π_i`, each regime fixes an active set `U^k`
//! and follows the restricted optimum `ν^{U^k}(c)` downwards in `c` until some
//! active component reaches its lower bound. That budget is the next
//! breakpoint `c^{k+1}`; the components that hit the bound leave the active
//! set. Every active component is strictly increasing in `c`, so the first
//! hit is found by bisection and the sets shrink strictly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::ResponseModel;

use super::restricted::RestrictedProblem;
use super::{check_lower_bounds, interaction_strengths, phi, unconstrained_solution, Evaluation};

/// Components within `SATURATION_TOLERANCE · max_i d_i` of their bound at a
/// breakpoint are treated as saturated together.
pub const SATURATION_TOLERANCE: f64 = 1e-9;
/// Relative width at which the breakpoint bisection stops.
const BREAKPOINT_TOLERANCE: f64 = 1e-14;
/// Budgets this close (relatively) below `𝟙'd` are accepted as `𝟙'd`.
const FLOOR_SLACK: f64 = 1e-12;

/// Outcome of one budget solve.
#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub budget: f64,
    pub nu: Vec<f64>,
    pub value: f64,
    /// Sources with `ν_i > d_i`, ascending.
    pub active_set: Vec<usize>,
    pub attacker_response: Vec<f64>,
    /// Max of the relative spread of `(M'z)_i²/ν_i²` over the active set and
    /// the relative excess of saturated sources over the active maximum.
    pub kkt_residual: f64,
    /// `None` in the high-budget regime `c ≥ c⁰`, `Some(k)` for `c^{k+1} ≤ c < c^k`.
    pub regime: Option<usize>,
}

/// Breakpoints `c⁰ > c¹ > … > c^s = 𝟙'd` with the active set in force just
/// above each of them: `active_sets[0]` is every source, `active_sets[k]` is
/// `U^{k-1}` for `k ≥ 1`.
#[derive(Clone, Debug)]
pub struct BudgetSchedule {
    lower: Vec<f64>,
    floor: f64,
    centrality: Vec<f64>,
    breakpoints: Vec<f64>,
    active_sets: Vec<Vec<usize>>,
    regimes: Vec<RestrictedProblem>,
}

impl BudgetSchedule {
    /// Full recursion down to `𝟙'd`.
    pub fn build(model: &ResponseModel, d: &[f64]) -> Result<Self> {
        Self::build_until(model, d, None)
    }

    /// Runs the recursion only until the regime containing `stop` is known.
    fn build_until(model: &ResponseModel, d: &[f64], stop: Option<f64>) -> Result<Self> {
        model.require_irreducible()?;
        let m = model.sources();
        let floor = check_lower_bounds(d, m)?;
        let pi = model.centrality();
        let threshold = super::high_budget_threshold(d, pi)?;
        let tol_sat = SATURATION_TOLERANCE * d.iter().copied().fold(0.0, f64::max);

        let mut schedule = Self {
            lower: d.to_vec(),
            floor,
            centrality: pi.to_vec(),
            breakpoints: vec![threshold],
            active_sets: vec![(0..m).collect()],
            regimes: Vec::new(),
        };
        let mut active: Vec<usize> = (0..m).filter(|&i| threshold * pi[i] > d[i] + tol_sat).collect();
        let mut upper = threshold;
        while !active.is_empty() {
            if stop.is_some_and(|c| c >= upper) {
                break;
            }
            let problem = RestrictedProblem::new(model, &active, d)?;
            let slack = |c: f64| -> Result<(f64, usize)> {
                let (nu, _) = problem.solve(c)?;
                Ok(problem
                    .active()
                    .iter()
                    .map(|&i| (nu[i] - d[i], i))
                    .fold((f64::INFINITY, usize::MAX), |a, b| if b.0 < a.0 { b } else { a }))
            };
            let (mut lo, mut hi) = (floor, upper);
            if slack(lo)?.0 < 0.0 {
                while hi - lo > BREAKPOINT_TOLERANCE * hi {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if slack(mid)?.0 > 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
            } else {
                hi = floor;
            }
            let (nu, _) = problem.solve(hi)?;
            let (_, first_hit) = slack(hi)?;
            let next: Vec<usize> = active
                .iter()
                .copied()
                .filter(|&i| i != first_hit && nu[i] > d[i] + tol_sat)
                .collect();
            let breakpoint = if next.is_empty() { floor } else { hi };
            schedule.breakpoints.push(breakpoint);
            schedule.active_sets.push(active);
            schedule.regimes.push(problem);
            active = next;
            upper = breakpoint;
        }
        Ok(schedule)
    }

    /// `c⁰`.
    pub fn threshold(&self) -> f64 {
        self.breakpoints[0]
    }

    /// `𝟙'd`.
    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn active_sets(&self) -> &[Vec<usize>] {
        &self.active_sets
    }

    /// Number of restricted regimes below `c⁰`.
    pub fn regime_count(&self) -> usize {
        self.regimes.len()
    }

    pub fn regime(&self, k: usize) -> Option<&RestrictedProblem> {
        self.regimes.get(k)
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower
    }

    /// Regime containing `c`: `None` above `c⁰`, `Some(k)` for `c^{k+1} < c ≤ c^k`.
    pub fn regime_of(&self, c: f64) -> Result<Option<usize>> {
        if c < self.floor * (1.0 - FLOOR_SLACK) {
            return Err(Error::BudgetInfeasible {
                budget: c,
                floor: self.floor,
            });
        }
        if c >= self.threshold() || self.regimes.is_empty() {
            return Ok(None);
        }
        let k = (0..self.regimes.len())
            .find(|&k| c > self.breakpoints[k + 1])
            .unwrap_or(self.regimes.len() - 1);
        Ok(Some(k))
    }

    /// `ν*(c)` by regime lookup.
    pub fn evaluate(&self, c: f64) -> Result<(Vec<f64>, Option<usize>)> {
        let regime = self.regime_of(c)?;
        let nu = match regime {
            None => self.centrality.iter().map(|p| c * p).collect(),
            Some(k) if k + 1 == self.regimes.len() && c <= self.floor => self.lower.clone(),
            Some(k) => self.regimes[k].solve(c)?.0,
        };
        Ok((nu, regime))
    }

    /// Optimum at budget `c` with its audit data.
    pub fn solve(&self, c: f64, model: &ResponseModel) -> Result<SolveReport> {
        let (nu, regime) = self.evaluate(c)?;
        let active_set = match regime {
            Some(_) if c <= self.floor => Vec::new(),
            Some(k) => self.active_sets[k + 1].clone(),
            None => {
                let tol_sat = SATURATION_TOLERANCE * self.lower.iter().copied().fold(0.0, f64::max);
                (0..nu.len()).filter(|&i| nu[i] > self.lower[i] + tol_sat).collect()
            }
        };
        let eval = phi(&nu, model)?;
        let kkt_residual = kkt_residual(&nu, &active_set, &eval, model);
        Ok(SolveReport {
            budget: c,
            value: eval.value,
            attacker_response: eval.attacker_response,
            nu,
            active_set,
            kkt_residual,
            regime,
        })
    }
}

fn kkt_residual(nu: &[f64], active: &[usize], eval: &Evaluation, model: &ResponseModel) -> f64 {
    if active.is_empty() {
        return 0.0;
    }
    let strength = interaction_strengths(nu, eval, model);
    let on_active: Vec<f64> = active.iter().map(|&i| strength[i]).collect();
    let mean = on_active.iter().sum::<f64>() / on_active.len() as f64;
    let max = on_active.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = on_active.iter().copied().fold(f64::INFINITY, f64::min);
    let mut is_active = vec![false; nu.len()];
    for &i in active {
        is_active[i] = true;
    }
    let excess = (0..nu.len())
        .filter(|&i| !is_active[i])
        .map(|i| (strength[i] - max).max(0.0))
        .fold(0.0, f64::max);
    ((max - min) / mean).max(excess / mean)
}

/// Optimal protection `ν*(c)` for lower bounds `d` and budget `c ≥ 𝟙'd`.
pub fn waterfill(d: &[f64], c: f64, model: &ResponseModel) -> Result<SolveReport> {
    let floor = check_lower_bounds(d, model.sources())?;
    if !(c >= floor * (1.0 - FLOOR_SLACK)) {
        return Err(Error::BudgetInfeasible { budget: c, floor });
    }
    model.require_irreducible()?;
    let threshold = super::high_budget_threshold(d, model.centrality())?;
    if c >= threshold {
        // skip the recursion entirely in the high-budget regime
        let nu = unconstrained_solution(c, model)?;
        let schedule = BudgetSchedule {
            lower: d.to_vec(),
            floor,
            centrality: model.centrality().to_vec(),
            breakpoints: vec![threshold],
            active_sets: vec![(0..model.sources()).collect()],
            regimes: Vec::new(),
        };
        debug_assert_eq!(schedule.evaluate(c)?.0, nu);
        return schedule.solve(c, model);
    }
    BudgetSchedule::build_until(model, d, Some(c))?.solve(c, model)
}

/// The complete breakpoint schedule for lower bounds `d`.
pub fn schedule(d: &[f64], model: &ResponseModel) -> Result<BudgetSchedule> {
    BudgetSchedule::build(model, d)
}
