use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("invalid plan at step {step}: {reason}")]
    InvalidPlan { step: usize, reason: String },
    #[error("search budget exceeded ({limit} labels)")]
    BudgetExceeded { limit: usize },
    #[error("target unreachable: {0}")]
    EmptyFrontier(String),
    #[error("worth missing for agent {0}")]
    MissingWorth(usize),
    #[error("role swap needs exactly two agents, got {0}")]
    RoleSwapUnsupported(usize),
    #[error("operation needs exactly two agents, got {0}")]
    AgentCount(usize),
    #[error("capacity violated: {used} agents use a resource of capacity {capacity}")]
    CapacityViolation { used: usize, capacity: usize },
    #[error("scenario: {0}")]
    Scenario(String),
}

pub type Result<T> = std::result::Result<T, EngineError>;
