use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZbError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("nonexistent state: n = {n}, eps = {eps} has zero norm at kz = {kz}")]
    NonexistentState { n: usize, eps: i8, kz: f64 },

    #[error("forbidden transition {n} -> {n_prime}: selection rule requires |n - n'| = 1")]
    ForbiddenTransition { n: usize, n_prime: usize },

    #[error("truncation: index {index} exceeds decomposition cutoff {n_max}")]
    Truncation { index: usize, n_max: usize },

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("constraint error: {0}")]
    Constraint(String),
}

pub type Result<T> = std::result::Result<T, ZbError>;
