use thiserror::Error;

/// Errors raised by the model-surface, chart and comparison numerics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("warp function vanishes at t = {t}: surface is not a plane on this domain")]
    WarpVanishes { t: f64 },

    #[error("evaluation at t = {t} is inside the pole-exclusion disc (t_min = {t_min})")]
    PoleTooClose { t: f64, t_min: f64 },

    #[error("f' changes sign {count} times; at most one critical radius is supported")]
    MultipleCriticalRadii { count: usize },

    #[error("geodesic reached the pole-exclusion disc at s = {s}")]
    PoleCrossing { s: f64 },

    #[error("geodesic left the domain at s = {s}")]
    LeftDomain { s: f64 },

    #[error("shooting failed, best endpoint residual {residual:e}")]
    ShootingFailed { residual: f64 },

    #[error("integrand singular: f(t) - nu < 1e-8 at t = {t}")]
    IntegrandSingular { t: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("fundamental tensor degenerate (min eigenvalue {min_eigenvalue:e})")]
    DegenerateTensor { min_eigenvalue: f64 },

    #[error("flag degenerate (denominator {denominator:e})")]
    FlagDegenerate { denominator: f64 },

    #[error("angle difference quotients unstable (spread {spread:e})")]
    AngleUnstable { spread: f64 },

    #[error("no comparison triangle: {0}")]
    NotAdmissible(String),

    #[error("hinge angle sum at vertex {index} is {sum}, exceeding pi")]
    HingeViolated { index: usize, sum: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
