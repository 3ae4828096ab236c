//! Twisted traces on quantized Kleinian singularities of type A.
//!
//! The quantization is determined by a monic polynomial `P` of degree `n`
//! (given by its roots), a twist parameter `c ∈ [0,1)` with `t = e^{2πic}`,
//! and a conjugation sign `ε = ±1`. A trace on the weight-zero part is
//! represented by a density on the imaginary axis,
//!
//! ```text
//!     w(x) = e^{2πicx} G(e^{2πix}) / 𝐏(e^{2πix}),       𝐏(X) = ∏ (X + e^{2πiα_j}),
//! ```
//!
//! optionally together with point masses on the axis. From the moments of
//! this density the crate derives monic orthogonal polynomials, their
//! three-term recurrence `a_k`, `b_k` (the short star-product coefficients),
//! Padé approximants and Lax-type difference matrices, the discrete-Painlevé
//! recurrences that propagate `a_k`, `b_k` without moment determinants, the
//! classification of positive (unitary) traces, and closed residue formulas
//! for the distinguished positive traces in low degree.
//!
//! All numerics run on arbitrary-precision floats ([`rug`], MPFR-backed);
//! positivity decisions on polynomial data are exact over the rationals.

pub mod error;
pub mod exact;
pub mod families;
pub mod moments;
pub mod orthopoly;
pub mod pade;
pub mod painleve;
pub mod params;
pub mod pipeline;
pub mod poly;
pub mod positivity;
pub mod prec;
pub mod weight;

mod quad;
mod series;

/// Arbitrary-precision real scalar used throughout the crate.
pub type Real = rug::Float;
/// Arbitrary-precision complex scalar used throughout the crate.
pub type Cplx = rug::Complex;
/// Exact rational scalar used for sign-certified decisions.
pub type Rat = num_rational::BigRational;

pub use error::Error;
pub use moments::{MomentTable, PrecisionConfig};
pub use orthopoly::{RecurrenceCoeffs, StieltjesSeries};
pub use params::QuantizationSpec;
pub use poly::Poly;
pub use positivity::ConeSpec;
pub use weight::WeightSpec;
