//! Symmetric, equiprobable qubit ensembles.
//!
//! State `j` (zero-based) is `cos(theta/2)|+> + exp(2 pi i j / m) sin(theta/2)|->`,
//! i.e. the `j`-th power of the generator `V = exp(2 pi i / m |-><-|)` applied
//! to the first state.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qubit::{root_of_unity, PureQubit};

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEnsemble {
    m: usize,
    theta: f64,
    states: Vec<PureQubit>,
}

pub(crate) fn check_domain(m: usize, theta: f64) -> Result<()> {
    if m < 2 {
        return Err(Error::TooFewStates(m));
    }
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::Theta(theta));
    }
    Ok(())
}

/// Builds the `m` symmetric states at colatitude `theta`.
pub fn symmetric_ensemble(m: usize, theta: f64) -> Result<SymmetricEnsemble> {
    check_domain(m, theta)?;
    let (s, c) = (0.5 * theta).sin_cos();
    let states = (0..m)
        .map(|j| {
            PureQubit::normalized(Complex64::new(c, 0.0), root_of_unity(j, m) * s)
                .expect("cos and sin never vanish together")
        })
        .collect();
    Ok(SymmetricEnsemble { m, theta, states })
}

/// One application of the generator: multiplies the `|->` amplitude by
/// `exp(2 pi i / m)`.
pub fn apply_generator(s: &PureQubit, m: usize) -> PureQubit {
    debug_assert!(m >= 2);
    s.with_minus_phase(root_of_unity(1, m))
}

impl SymmetricEnsemble {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn states(&self) -> &[PureQubit] {
        &self.states
    }

    /// Prior probability of each state.
    pub fn prior(&self) -> f64 {
        1.0 / self.m as f64
    }
}
