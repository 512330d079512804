//! Lower bounds on quantum query complexity for Boolean functions and
//! Gram-matrix state-generation problems, at desk scale (n ≤ 8 input bits).
//!
//! The crate computes and cross-checks four families of bounds:
//!
//! * exact degree and approximate degree of Boolean functions ([`boolfn`],
//!   [`polybounds`]), with dual-polynomial certificates;
//! * the extended polynomial bounds `xpoly₀` and `xpoly_ε` ([`xpoly`]);
//! * the multiplicative adversary bound `MADV₀ᶜ` and the explicit
//!   Fourier-diagonal witness `W_c` ([`madv`]);
//! * progress audits on simulated query algorithms ([`sim`]).
//!
//! All matrices are real symmetric and indexed by inputs `x ∈ {0,1}ⁿ`
//! read as little-endian integers: bit `i` of the index is `x_i`. Fourier
//! characters `χ_S` use the same encoding for `S`.

pub mod boolfn;
pub mod config;
pub mod error;
pub mod gram;
pub mod linalg;
pub mod madv;
pub mod polybounds;
pub mod sim;
pub mod solver;
pub mod xpoly;

pub use boolfn::{BooleanFunction, FourierSpectrum};
pub use config::Tolerances;
pub use error::{Error, Result};
pub use gram::GramMatrix;
pub use linalg::{Spectrum, SymMatrix};
