use thiserror::Error;

pub type Result<T, E = GtError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GtError {
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: usize, right: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("{what} is infeasible: estimated cost {cost:.3e} exceeds budget {budget:.3e}")]
    Infeasible { what: String, cost: f64, budget: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("sieve coverage shortfall: need tables up to {needed}, have {have}")]
    Coverage { needed: u64, have: u64 },

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("no alpha candidate meets the boundary budget: best mass {best:.3e} > {budget:.3e}")]
    BoundaryBudget { best: f64, budget: f64 },

    #[error("energy increment too small at step {step}: gained {gain:.3e}, need {required:.3e}")]
    EnergyIncrement { step: usize, gain: f64, required: f64 },

    #[error("decomposition did not terminate within {0} iterations")]
    MaxIterations(usize),

    #[error("unknown {kind} strategy `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("bad file format: {0}")]
    Format(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl GtError {
    pub fn infeasible(what: impl Into<String>, cost: f64, budget: f64) -> Self {
        GtError::Infeasible {
            what: what.into(),
            cost,
            budget,
        }
    }

    /// True for errors caused by a request that is too large to evaluate.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, GtError::Infeasible { .. })
    }
}

/// Returns `Infeasible` when `cost` exceeds `budget`.
pub(crate) fn gate(what: &str, cost: f64, budget: f64) -> Result<()> {
    if cost > budget {
        Err(GtError::infeasible(what, cost, budget))
    } else {
        Ok(())
    }
}
