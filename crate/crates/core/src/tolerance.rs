//! Numerical tolerances shared by every module.
//!
//! The defaults live in [`TOL`]; all validity checks in the crate read from it.

/// Tolerance record used by validators and degenerate-case branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed deviation of `|a|^2 + |b|^2` from one for a pure state.
    pub state_norm: f64,
    /// A component below this modulus is treated as zero by the phase convention.
    pub phase_cutoff: f64,
    /// Smallest eigenvalue still accepted as positive semidefinite.
    pub psd: f64,
    /// Entrywise tolerance for a POM summing to the identity.
    pub identity_sum: f64,
    /// Eigenvalue gap below which a 2x2 Hermitian matrix counts as degenerate.
    pub eigen_degeneracy: f64,
    /// Eigenvalue cutoff for the pseudo-inverse square root in the square-root measurement.
    pub pseudo_inverse: f64,
    /// Allowed constraint residual for a parameterized POM.
    pub feasibility: f64,
    /// Negative probabilities down to `-probability` are clamped to zero.
    pub probability: f64,
}

/// Default tolerances.
pub const TOL: Tolerances = Tolerances {
    state_norm: 1e-12,
    phase_cutoff: 1e-12,
    psd: 1e-12,
    identity_sum: 1e-9,
    eigen_degeneracy: 1e-12,
    pseudo_inverse: 1e-10,
    feasibility: 1e-8,
    probability: 1e-12,
};

impl Default for Tolerances {
    fn default() -> Self {
        TOL
    }
}
