//! Numerical tolerances shared across the crate.
//!
//! Every acceptance threshold used by the library is a field here so the
//! CLI config file can override it in one place.

use serde::{Deserialize, Serialize};

/// Default PSD acceptance tolerance, relative to `max(1, ‖A‖₂)`.
pub const TAU_PSD: f64 = 1e-9;
/// Zero threshold for floating-point Fourier spectra.
pub const TAU_ZERO: f64 = 1e-9;
/// Relative zero threshold for Fourier-diagonal entries; scaled by `2ⁿ`.
pub const TAU_DEG_REL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub psd: f64,
    pub zero: f64,
    pub deg_rel: f64,
    /// LP constraint slack.
    pub lp_feasibility: f64,
    /// LP strong-duality gap.
    pub lp_gap: f64,
    /// Primal/dual residual target for the conic splitting solver.
    pub sdp_residual: f64,
    pub sdp_max_iterations: usize,
    /// Width of the band around a feasibility threshold reported as marginal.
    pub marginal: f64,
    pub fh_restarts: usize,
    pub fh_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            psd: TAU_PSD,
            zero: TAU_ZERO,
            deg_rel: TAU_DEG_REL,
            lp_feasibility: 1e-8,
            lp_gap: 1e-6,
            sdp_residual: 1e-7,
            sdp_max_iterations: 50_000,
            marginal: 1e-6,
            fh_restarts: 32,
            fh_step: 1e-8,
        }
    }
}

impl Tolerances {
    /// Absolute zero threshold for `⟨χ_S|M|χ_S⟩` on an `n`-bit Gram matrix.
    pub fn deg_threshold(&self, n: usize) -> f64 {
        self.deg_rel * (1u64 << n) as f64
    }
}

impl Tolerances {
    /// Splitting-solver settings matching these tolerances.
    pub fn admm(&self) -> crate::solver::AdmmSettings {
        crate::solver::AdmmSettings {
            eps_abs: self.sdp_residual,
            eps_rel: self.sdp_residual,
            max_iterations: self.sdp_max_iterations,
            ..Default::default()
        }
    }
}
