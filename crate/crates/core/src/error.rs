//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("root at Re = 1/2 with no partner at Re = -1/2 (imaginary part {im}); reality condition violated")]
    UnpairedBoundaryRoot { im: f64 },

    #[error("roots outside the closed strip |Re α| ≤ 1/2; apply the strip reduction first")]
    RootsOutsideStrip,

    #[error("deg G = {deg_g} but the interior part has degree {n_star}; need deg G ≤ {n_star} - 1")]
    DegreeTooHigh { deg_g: usize, n_star: usize },

    #[error("c = 0 requires G(0) = 0")]
    MissingVanishingAtZero,

    #[error("weight is not integrable: decay rate {rate:.3e} ≤ 0")]
    NonIntegrable { rate: f64 },

    #[error("atom at y = {y} does not sit at a root of Q on the imaginary axis")]
    AtomOffAxis { y: f64 },

    #[error("evaluation point y = {y} is within {delta:.1e} of an axis pole")]
    EvaluationAtPole { y: f64, delta: f64 },

    #[error("quadrature failed to reach target accuracy within budget (best error estimate {best:.3e})")]
    PrecisionUnreachable { best: f64 },

    #[error("moment table has {have} entries, need {need}")]
    InsufficientMoments { have: usize, need: usize },

    #[error("trace form degenerate: Hankel determinant D_{k} vanishes to working precision")]
    DegenerateTrace { k: usize },

    #[error("Padé linear system for order {n} is singular")]
    DegeneratePade { n: usize },

    #[error("norm ν_{k} is zero; Lax matrix undefined")]
    ZeroNorm { k: usize },

    #[error("sample point is at a pole of the matrix denominator")]
    SampleAtPole,

    #[error("singular step in discrete Painlevé recurrence at n = {n}: {what}")]
    SingularStep { n: usize, what: &'static str },

    #[error("P is not of a supported recurrence shape (need x² with t ≠ 1, or x³+β²x with t = -1)")]
    UnsupportedShape,

    #[error("polynomial has non-real coefficients where real ones are required")]
    NonRealCoefficients,

    #[error("root multiset is not invariant under α ↦ -conj(α)")]
    RealityViolated,

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
