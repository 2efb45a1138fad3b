use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong between reading a network and emitting an allocation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // -- construction / validation --
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("negative weight {value} at {location}")]
    NegativeWeight { location: String, value: f64 },
    #[error("node {node} has zero degree, cannot row-normalize")]
    ZeroDegreeNode { node: usize },
    #[error("stubbornness entry {index} = {value} outside [0, 1]")]
    InvalidStubbornness { index: usize, value: f64 },
    #[error("influence matrix is not Schur stable: spectral radius ~ {spectral_radius}")]
    NotSchurStable { spectral_radius: f64 },
    #[error("graph generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: usize, reason: String },

    // -- io --
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("asymmetric undirected edge ({u}, {v}): weights {forward} and {backward} conflict")]
    Asymmetry {
        u: usize,
        v: usize,
        forward: f64,
        backward: f64,
    },
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },

    // -- spectral --
    #[error("I - A is numerically singular (pivot {pivot:e} in column {column})")]
    SingularSystem { column: usize, pivot: f64 },
    #[error("response matrix entry ({row}, {col}) = {value:e} is negative beyond round-off")]
    NegativeResponse { row: usize, col: usize, value: f64 },
    #[error("source interaction matrix has zero total mass")]
    ZeroMass,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("matrix dimension {size} exceeds dense limit {limit}")]
    SizeLimitExceeded { size: usize, limit: usize },

    // -- solver --
    #[error("source interaction graph is not connected; components: {}", format_components(.components))]
    NotIrreducible { components: Vec<Vec<usize>> },
    #[error("protection entry {index} = {value} is not strictly positive")]
    NonPositiveNu { index: usize, value: f64 },
    #[error("lower bound entry {index} = {value} is not strictly positive")]
    InvalidLowerBound { index: usize, value: f64 },
    #[error("budget {budget} must be strictly positive")]
    NonPositiveBudget { budget: f64 },
    #[error("budget {budget} is below the sum of lower bounds {floor}")]
    BudgetInfeasible { budget: f64, floor: f64 },
    #[error("restricted problem needs a nonempty active set")]
    EmptyActiveSet,
    #[error("budget {budget} does not exceed the saturated floor {floor}")]
    BudgetTooSmall { budget: f64, floor: f64 },
    #[error("secular equation could not be bracketed: {0}")]
    BracketFailure(String),
    #[error("restricted solution spends {spent} instead of {target}")]
    BudgetMismatch { spent: f64, target: f64 },
    #[error("grid search supports at most 3 sources, got {0}")]
    DimensionTooLarge(usize),
}

fn format_components(components: &[Vec<usize>]) -> String {
    components
        .iter()
        .map(|c| {
            let ids: Vec<String> = c.iter().map(|i| (i + 1).to_string()).collect();
            format!("{{{}}}", ids.join(" "))
        })
        .collect::<Vec<_>>()
        .join(", ")
}
