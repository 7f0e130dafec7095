//! Expected spectral moments of Wigner matrices to order `1/n`.
//!
//! For a Wigner matrix `X = W / (σ √n)` with independent centred entries the
//! expected moments of the empirical spectral measure expand as
//!
//! ```text
//! m_k(n) = ∫ x^k d sc(x) + (1/n) ∫ x^k dν(x) + o(1/n)
//! ```
//!
//! where `sc` is the semicircle law and `ν` is a signed measure of total mass
//! zero depending only on `(r, σ², s², α)`. The crate computes the correction
//! three ways and lets them check each other:
//!
//! - [`combinatorics`]: exact closed-form counts of the walk families that
//!   contribute at order `1/n`, and the moments of `ν`;
//! - [`series`]: exact truncated generating series built from the Catalan
//!   series `T(x)`;
//! - [`oracle`]: brute-force enumeration of closed words giving `m_k(n)`
//!   exactly at finite `n`;
//! - [`measure`]: densities, quadrature and Stieltjes transforms of `sc` and `ν`;
//! - [`montecarlo`]: sampled matrices and statistical estimates of the
//!   correction.
//!
//! The [`cli`] module backs the `wigner` binary.
//!
//! ```
//! use num_rational::BigRational;
//! use wigner_moments::combinatorics::nu_moment;
//! use wigner_moments::oracle::{exact_moment, MomentModel};
//! use wigner_moments::EnsembleParams;
//!
//! let goe = EnsembleParams::goe();
//! assert_eq!(nu_moment(4, &goe).to_string(), "5");
//! let m4 = exact_moment(4, 10, &MomentModel::goe(4))?;
//! assert_eq!(m4, BigRational::new(51.into(), 20.into())); // 2 + 5/10 + 5/100
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod cli;
pub mod combinatorics;
pub mod measure;
pub mod montecarlo;
pub mod oracle;
pub mod series;

pub use combinatorics::{EnsembleParams, ExpansionTerm, ParamError};
pub use measure::SignedMeasureNu;
pub use montecarlo::{CorrectionEstimate, EnsembleSampler, HermitianMatrix, Preset};
pub use oracle::{CycleType, MomentModel, WalkClass};
pub use series::TruncatedRationalSeries;

/// Exact rational used throughout the exact modules.
pub type Rational = num_rational::BigRational;
