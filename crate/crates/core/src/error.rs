use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PsletError {
    #[error("fractional power of a series with non-positive constant term {a0}")]
    NonpositiveLeadingTerm { a0: f64 },

    #[error("potential is singular at r = {r}")]
    SingularPoint { r: f64 },

    #[error("series order {requested} exceeds the configured cap {cap}")]
    OrderOverflow { requested: usize, cap: usize },

    #[error("V'(r0) = {slope} is not positive at r0 = {r0}: no circular orbit")]
    NonbindingPoint { r0: f64, slope: f64 },

    #[error("3 + r0 V''/V' = {radicand} is not positive at r0 = {r0}")]
    ImaginaryFrequency { r0: f64, radicand: f64 },

    #[error("no sign change of the radius condition for l = {l}, nr = {nr} on [1e-6, 1e9]")]
    NoBindingRadius { l: u32, nr: u32 },

    #[error("leading energy is not minimal at r0 = {r0} (second derivative {curvature})")]
    NotAMinimum { r0: f64, curvature: f64 },

    #[error("order {order}: {what} left residual {residual:e}")]
    InconsistentOrder {
        order: usize,
        what: &'static str,
        residual: f64,
    },

    #[error("order {requested} outside the computed range {min}..={max}")]
    OrderOutOfRange { requested: i32, min: i32, max: i32 },

    #[error("[{n},{m}] Pade denominator system is singular")]
    DegeneratePade { n: usize, m: usize },

    #[error("Pade denominator vanishes on (0, {u}]")]
    PoleAtEvaluation { u: f64 },

    #[error("classical turning point {turning} lies beyond r_max = {r_max}")]
    GridUnderflow { turning: f64, r_max: f64 },

    #[error("no bound state with {nr} nodes for l = {l}")]
    NoBoundState { l: u32, nr: u32 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, PsletError>;
