//! Static analysis of an influence system: response matrix `M = (I - A)⁻¹B`,
//! source interaction matrix `H = M'M`, input centrality `π = H𝟙 / 𝟙'H𝟙`, and
//! the eigen-solvers the optimizer is built on.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{dot, norm2, Lu, Matrix};
use crate::network::{connected_components, InfluenceSystem};

/// Margin below 1 required of `ρ(A)`.
pub const SCHUR_TOLERANCE: f64 = 1e-9;
/// Largest dimension accepted by the dense eigen-solvers.
pub const MAX_DENSE_DIM: usize = 3000;
pub const POWER_MAX_ITERATIONS: usize = 100_000;
const POWER_VALUE_TOL: f64 = 1e-13;
const POWER_RESIDUAL_TOL: f64 = 1e-10;
/// Negative round-off in `M` up to this (relative) magnitude is clamped to zero.
const NEGATIVE_CLAMP: f64 = 1e-12;

/// Collatz-Wielandt bracket on the spectral radius of a nonnegative matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadiusEstimate {
    pub lower: f64,
    pub upper: f64,
}

impl RadiusEstimate {
    pub fn value(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn is_stable(&self, tol: f64) -> bool {
        self.upper < 1.0 - tol
    }
}

/// Brackets `ρ(A)` for a nonnegative square `A`.
///
/// Runs power iteration on `A + I` (which keeps the iterate strictly positive)
/// and tracks the best min/max ratios `(Ax)_i / x_i`, both of which bound `ρ(A)`
/// for any positive `x`. If the bracket is still ambiguous about the unit
/// circle, falls back to repeated squaring, `ρ(A) = lim ‖A^(2^k)‖^(2^-k)`.
pub fn nonnegative_spectral_radius(a: &Matrix) -> RadiusEstimate {
    let n = a.rows();
    let mut x = vec![1.0; n];
    let mut best = RadiusEstimate {
        lower: 0.0,
        upper: f64::INFINITY,
    };
    for _ in 0..10_000 {
        let ax = a.mul_vec(&x);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (axi, xi) in ax.iter().zip(&x) {
            let r = axi / xi;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        best.lower = best.lower.max(lo);
        best.upper = best.upper.min(hi);
        let decided = best.upper < 1.0 - SCHUR_TOLERANCE || best.lower >= 1.0 - SCHUR_TOLERANCE;
        let tight = best.upper - best.lower <= 1e-12 * best.upper.max(1.0);
        if tight || (decided && best.upper - best.lower <= 1e-6 * best.upper.max(1.0)) {
            return best;
        }
        let next: Vec<f64> = ax.iter().zip(&x).map(|(axi, xi)| axi + xi).collect();
        let scale = next.iter().fold(0.0f64, |m, v| m.max(*v));
        x = next.iter().map(|v| (v / scale).max(1e-280)).collect();
    }
    let undecided = best.lower < 1.0 - SCHUR_TOLERANCE && best.upper >= 1.0 - SCHUR_TOLERANCE;
    if !undecided {
        return best;
    }
    // reducible corner cases: Gelfand's formula by repeated squaring
    let mut p = a.clone();
    let mut log_scale = 0.0f64;
    let mut power = 1.0f64;
    for _ in 0..48 {
        let norm = p.row_sums().into_iter().fold(0.0f64, f64::max);
        if norm == 0.0 {
            return RadiusEstimate { lower: 0.0, upper: 0.0 };
        }
        p = p.scaled(1.0 / norm);
        log_scale += norm.ln() / power;
        p = p.matmul(&p);
        power *= 2.0;
    }
    let norm = p.row_sums().into_iter().fold(0.0f64, f64::max);
    // the squaring error factor is ~(poly n)^(2^-48), far below f64 resolution
    let estimate = (log_scale + norm.ln() / power).exp().min(best.upper).max(best.lower);
    RadiusEstimate {
        lower: estimate,
        upper: estimate,
    }
}

/// Steady-state gain `M = (I - A)⁻¹B`, solved column by column with one LU factorization.
pub fn compute_response(sys: &InfluenceSystem) -> Result<Matrix> {
    let n = sys.agents();
    let m = sys.sources();
    let i_minus_a = Matrix::identity(n).sub(sys.a());
    let lu = Lu::factor(&i_minus_a).map_err(|(column, pivot)| Error::SingularSystem { column, pivot })?;
    let mut out = Matrix::zeros(n, m);
    for j in 0..m {
        let col = lu.solve(&sys.b().column(j));
        for (i, v) in col.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    let clamp = NEGATIVE_CLAMP * out.max_abs().max(1.0);
    for i in 0..n {
        for j in 0..m {
            let v = out[(i, j)];
            if v < 0.0 {
                if v < -clamp {
                    return Err(Error::NegativeResponse {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                out[(i, j)] = 0.0;
            }
        }
    }
    Ok(out)
}

/// Everything the optimizer needs to know about a network.
#[derive(Clone, Debug, Serialize)]
pub struct ResponseModel {
    response: Matrix,
    interaction: Matrix,
    centrality: Vec<f64>,
    total_mass: f64,
    components: Vec<Vec<usize>>,
}

impl ResponseModel {
    pub fn from_system(sys: &InfluenceSystem) -> Result<Self> {
        Self::from_response(compute_response(sys)?)
    }

    /// Builds `H = M'M` and `π` from a nonnegative response matrix.
    pub fn from_response(response: Matrix) -> Result<Self> {
        if let Some(idx) = response.as_slice().iter().position(|&v| !(v >= 0.0)) {
            let (row, col) = (idx / response.cols(), idx % response.cols());
            return Err(Error::NegativeResponse {
                row,
                col,
                value: response[(row, col)],
            });
        }
        let interaction = response.gram();
        let degree = interaction.row_sums();
        let total_mass: f64 = degree.iter().sum();
        if !(total_mass > 0.0) {
            return Err(Error::ZeroMass);
        }
        let centrality = degree.iter().map(|d| d / total_mass).collect();
        let components = connected_components(&interaction);
        Ok(Self {
            response,
            interaction,
            centrality,
            total_mass,
            components,
        })
    }

    /// `M`, agents by sources.
    pub fn response(&self) -> &Matrix {
        &self.response
    }

    /// `H = M'M`, sources by sources.
    pub fn interaction(&self) -> &Matrix {
        &self.interaction
    }

    /// `π`, a probability vector over sources.
    pub fn centrality(&self) -> &[f64] {
        &self.centrality
    }

    /// `𝟙'H𝟙`.
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn sources(&self) -> usize {
        self.response.cols()
    }

    pub fn agents(&self) -> usize {
        self.response.rows()
    }

    /// Whether the interaction graph on sources is connected.
    pub fn irreducible(&self) -> bool {
        self.components.len() == 1
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn require_irreducible(&self) -> Result<()> {
        if self.irreducible() {
            Ok(())
        } else {
            Err(Error::NotIrreducible {
                components: self.components.clone(),
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
}

/// Dominant eigenpair of a symmetric nonnegative matrix by power iteration
/// from `𝟙/√m`.
pub fn spectral_radius(q: &Matrix) -> Result<EigenPair> {
    let m = q.rows();
    if !q.is_square() || m == 0 {
        return Err(Error::DimensionMismatch("spectral radius of non-square matrix".into()));
    }
    let mut x = vec![1.0 / (m as f64).sqrt(); m];
    let mut previous = f64::NAN;
    let mut residual = f64::INFINITY;
    for iterations in 1..=POWER_MAX_ITERATIONS {
        let y = q.mul_vec(&x);
        let value = dot(&x, &y);
        let norm = norm2(&y);
        if norm == 0.0 {
            return Ok(EigenPair {
                value: 0.0,
                vector: x,
                residual_norm: 0.0,
                iterations,
            });
        }
        residual = y
            .iter()
            .zip(&x)
            .map(|(yi, xi)| (yi - value * xi).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= POWER_RESIDUAL_TOL * value && (value - previous).abs() <= POWER_VALUE_TOL * value {
            debug_assert!(perron_bounds_hold(q, value), "Perron bounds violated: {value}");
            return Ok(EigenPair {
                value,
                vector: x,
                residual_norm: residual,
                iterations,
            });
        }
        previous = value;
        x = y.into_iter().map(|v| v / norm).collect();
    }
    Err(Error::NoConvergence {
        iterations: POWER_MAX_ITERATIONS,
        residual,
    })
}

fn perron_bounds_hold(q: &Matrix, value: f64) -> bool {
    let slack = 1e-12 * value.abs().max(1.0);
    let max_diag = (0..q.rows()).map(|i| q[(i, i)]).fold(f64::NEG_INFINITY, f64::max);
    let max_row = q.row_sums().into_iter().fold(f64::NEG_INFINITY, f64::max);
    max_diag <= value + slack && value <= max_row + slack
}

/// Eigenvalues (descending) and matching orthonormal eigenvectors, stored as columns.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// Cyclic Jacobi rotations; accurate to a small multiple of machine precision
/// relative to `‖Q‖_F`.
pub fn symmetric_eigen(q: &Matrix) -> Result<SymmetricEigen> {
    let n = q.rows();
    if !q.is_square() {
        return Err(Error::NotSymmetric);
    }
    if n > MAX_DENSE_DIM {
        return Err(Error::SizeLimitExceeded {
            size: n,
            limit: MAX_DENSE_DIM,
        });
    }
    if !q.is_symmetric(1e-12) {
        return Err(Error::NotSymmetric);
    }
    let mut a = q.clone();
    let mut v = Matrix::identity(n);
    let fro = q.frobenius_norm();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].powi(2))
            .sum();
        if off.sqrt() <= 1e-16 * fro || off == 0.0 {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                let apr = a[(p, r)];
                if apr == 0.0 {
                    continue;
                }
                let theta = (a[(r, r)] - a[(p, p)]) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akr = a[(k, r)];
                    a[(k, p)] = c * akp - s * akr;
                    a[(k, r)] = s * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let ark = a[(r, k)];
                    a[(p, k)] = c * apk - s * ark;
                    a[(r, k)] = s * apk + c * ark;
                }
                a[(p, r)] = 0.0;
                a[(r, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkr = v[(k, r)];
                    v[(k, p)] = c * vkp - s * vkr;
                    v[(k, r)] = s * vkp + c * vkr;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(SymmetricEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_friedkin_johnsen, complete, cycle, StubbornnessProfile};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn two_node_fj() -> InfluenceSystem {
        build_friedkin_johnsen(&complete(2).unwrap(), &StubbornnessProfile::uniform(2, 0.5).unwrap()).unwrap()
    }

    #[test]
    fn identity_input_gives_identity_response() {
        let sys = InfluenceSystem::new(Matrix::zeros(3, 3), Matrix::identity(3)).unwrap();
        assert_eq!(compute_response(&sys).unwrap(), Matrix::identity(3));
    }

    #[test]
    fn two_node_response_by_hand() {
        // (I - A) = [[1, -1/2], [-1/2, 1]], inverse 4/3 [[1, 1/2], [1/2, 1]], times 1/2
        let m = compute_response(&two_node_fj()).unwrap();
        let expected = [[2.0 / 3.0, 1.0 / 3.0], [1.0 / 3.0, 2.0 / 3.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(m[(i, j)], expected[i][j], 1e-15));
            }
        }
    }

    #[test]
    fn response_matches_neumann_series() {
        let sys = two_node_fj();
        let m = compute_response(&sys).unwrap();
        // Σ_{k<K} A^k B, truncation error ≤ ρ(A)^K / (1 - ρ(A)) · ‖B‖
        let mut term = sys.b().clone();
        let mut sum = Matrix::zeros(2, 2);
        for _ in 0..60 {
            sum = Matrix::from_fn(2, 2, |i, j| sum[(i, j)] + term[(i, j)]);
            term = sys.a().matmul(&term);
        }
        assert!(m.sub(&sum).max_abs() < 1e-15);
    }

    #[test]
    fn unit_rows_for_half_stubborn_fj() {
        let sys = build_friedkin_johnsen(&cycle(9).unwrap(), &StubbornnessProfile::uniform(9, 0.5).unwrap()).unwrap();
        let m = compute_response(&sys).unwrap();
        for s in m.row_sums() {
            assert!(close(s, 1.0, 1e-10));
        }
    }

    #[test]
    fn identity_response_is_reducible() {
        let model = ResponseModel::from_response(Matrix::identity(4)).unwrap();
        assert_eq!(model.interaction(), &Matrix::identity(4));
        assert!(model.centrality().iter().all(|&p| close(p, 0.25, 1e-15)));
        assert!(!model.irreducible());
        assert!(
            matches!(model.require_irreducible(), Err(Error::NotIrreducible { components }) if components.len() == 4)
        );
        assert!(ResponseModel::from_response(Matrix::identity(1)).unwrap().irreducible());
    }

    #[test]
    fn zero_response_has_no_mass() {
        assert_eq!(
            ResponseModel::from_response(Matrix::zeros(2, 2)).unwrap_err(),
            Error::ZeroMass
        );
    }

    #[test]
    fn power_iteration_diagonal() {
        let q = Matrix::from_diagonal(&[3.0, 1.0]);
        let e = spectral_radius(&q).unwrap();
        assert!(close(e.value, 3.0, 1e-12));
        assert!(close(e.vector[0].abs(), 1.0, 1e-10));
        assert!(e.vector[1].abs() < 1e-10);
    }

    #[test]
    fn power_iteration_two_by_two() {
        let q = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = spectral_radius(&q).unwrap();
        assert!(close(e.value, 3.0, 1e-14));
        let s = 1.0 / 2f64.sqrt();
        assert!(close(e.vector[0], s, 1e-14) && close(e.vector[1], s, 1e-14));
    }

    #[test]
    fn power_iteration_matches_characteristic_root() {
        let model = ResponseModel::from_system(&two_node_fj()).unwrap();
        let h = model.interaction();
        let (a, b, d) = (h[(0, 0)], h[(0, 1)], h[(1, 1)]);
        let root = 0.5 * (a + d) + (0.25 * (a - d).powi(2) + b * b).sqrt();
        let e = spectral_radius(h).unwrap();
        assert!(close(e.value, root, 1e-15));
        assert!(e.residual_norm <= 1e-10 * e.value);
    }

    #[test]
    fn jacobi_identity_and_two_by_two() {
        let e = symmetric_eigen(&Matrix::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        let q = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = symmetric_eigen(&q).unwrap();
        assert!(close(e.values[0], 3.0, 1e-14) && close(e.values[1], 1.0, 1e-14));
    }

    #[test]
    fn jacobi_rejects_asymmetric() {
        let q = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(symmetric_eigen(&q).unwrap_err(), Error::NotSymmetric);
    }

    #[test]
    fn collatz_wielandt_bracket() {
        let a = Matrix::from_rows(&[vec![0.5, 1.0], vec![0.0, 0.1]]).unwrap();
        let r = nonnegative_spectral_radius(&a);
        assert!(r.lower <= 0.5 + 1e-12 && r.upper >= 0.5 - 1e-12);
        assert!(r.is_stable(SCHUR_TOLERANCE));
        let rot = Matrix::from_rows(&[vec![0.0, 0.9], vec![0.9, 0.0]]).unwrap();
        assert!(close(nonnegative_spectral_radius(&rot).value(), 0.9, 1e-9));
    }
}
