//! Fidelity of measure-and-retransmit strategies.
//!
//! A strategy measures the incoming signal with a POM and, on outcome `k`,
//! prepares `|phi_k>`. Its fidelity is the prior-weighted probability that
//! the prepared state passes the test "is this the state that was sent?":
//!
//! `F = sum_j sum_k p_j |<psi_j|phi_k>|^2 <psi_j|pi_k|psi_j>`
//!
//! Writing `O_k = sum_j p_j |psi_j><psi_j| <psi_j|pi_k|psi_j>` turns this into
//! `F = sum_k <phi_k|O_k|phi_k>`, so for a fixed POM the best `|phi_k>` is the
//! top eigenvector of `O_k` and the best fidelity is the sum of the top
//! eigenvalues.

use num_complex::Complex64;

use crate::ensembles::{check_domain, SymmetricEnsemble};
use crate::error::{Error, Result};
use crate::measurements::Pom;
use crate::qubit::{hermitian_eig2, overlap_prob, root_of_unity, Hermitian2, PureQubit};

/// A POM paired with one retransmission state per element.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    pom: Pom,
    retransmit: Vec<PureQubit>,
}

impl Strategy {
    pub fn new(pom: Pom, retransmit: Vec<PureQubit>) -> Result<Self> {
        if pom.len() != retransmit.len() {
            return Err(Error::LengthMismatch {
                what: "retransmission states",
                expected: pom.len(),
                got: retransmit.len(),
            });
        }
        Ok(Strategy { pom, retransmit })
    }

    pub fn pom(&self) -> &Pom {
        &self.pom
    }

    pub fn retransmit(&self) -> &[PureQubit] {
        &self.retransmit
    }
}

/// Top eigenpair of one `O_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeRetransmission {
    pub eigenvalue: f64,
    pub state: PureQubit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityReport {
    pub fidelity: f64,
    pub per_outcome: Vec<OutcomeRetransmission>,
}

impl FidelityReport {
    /// The strategy that retransmits the reported states after measuring `pom`.
    pub fn into_strategy(self, pom: Pom) -> Result<Strategy> {
        Strategy::new(pom, self.per_outcome.into_iter().map(|o| o.state).collect())
    }
}

/// Direct double sum over signals and outcomes.
pub fn fidelity_of_strategy(e: &SymmetricEnsemble, s: &Strategy) -> f64 {
    let mut total = 0.0;
    for psi in e.states() {
        for (el, phi) in s.pom.elements().iter().zip(&s.retransmit) {
            total += overlap_prob(psi, phi) * el.expectation(psi);
        }
    }
    (total * e.prior()).clamp(0.0, 1.0)
}

/// `O_k = (1/M) sum_j |psi_j><psi_j| <psi_j|element|psi_j>`.
pub fn o_k_operator(e: &SymmetricEnsemble, element: &Hermitian2) -> Hermitian2 {
    let prior = e.prior();
    e.states()
        .iter()
        .map(|psi| (prior * element.expectation(psi)) * Hermitian2::projector(psi))
        .sum()
}

/// Best retransmission state for every element of `p` and the fidelity they
/// achieve together.
pub fn optimal_retransmission(e: &SymmetricEnsemble, p: &Pom) -> FidelityReport {
    let per_outcome: Vec<_> = p
        .elements()
        .iter()
        .map(|el| {
            let [top, _] = hermitian_eig2(&o_k_operator(e, el));
            OutcomeRetransmission {
                eigenvalue: top.value,
                state: top.vector,
            }
        })
        .collect();
    FidelityReport {
        fidelity: per_outcome.iter().map(|o| o.eigenvalue).sum(),
        per_outcome,
    }
}

/// Largest fidelity attainable for `m` symmetric states at `theta`.
///
/// `1 - sin^2(theta)/4` for `m > 2`; `(1 + sqrt(cos^2 theta + sin^4 theta))/2`
/// for `m = 2`.
pub fn max_fidelity_analytic(m: usize, theta: f64) -> Result<f64> {
    check_domain(m, theta)?;
    let (s, c) = theta.sin_cos();
    Ok(if m == 2 {
        0.5 * (1.0 + (c * c + s.powi(4)).sqrt())
    } else {
        1.0 - 0.25 * s * s
    })
}

/// Cosine of the colatitude of the optimal retransmission states.
pub fn retransmission_cos_colatitude(m: usize, theta: f64) -> Result<f64> {
    check_domain(m, theta)?;
    let (s, c) = theta.sin_cos();
    Ok(if m == 2 {
        c / (c * c + s.powi(4)).sqrt()
    } else {
        2.0 * c / (1.0 + c * c)
    })
}

/// Colatitude of the optimal retransmission states.
pub fn retransmission_colatitude(m: usize, theta: f64) -> Result<f64> {
    Ok(retransmission_cos_colatitude(m, theta)?.clamp(-1.0, 1.0).acos())
}

fn latitude_state(colatitude: f64, phase: Complex64) -> PureQubit {
    let (s, c) = (0.5 * colatitude).sin_cos();
    PureQubit::normalized(Complex64::new(c, 0.0), phase * s).expect("unit vector")
}

/// A fidelity-maximizing strategy in closed form.
///
/// For `m > 2` this is the symmetric equatorial POM with `n_outputs`
/// elements at longitudes `alpha + 2 pi l / n_outputs`, `l = 0..n_outputs`,
/// with each retransmission state at the element's longitude. `n_outputs = m`
/// and `alpha = 0` give the square-root measurement. For `m = 2` the optimum
/// is unique and `n_outputs`, `alpha` are ignored.
pub fn optimal_strategy_analytic(
    m: usize,
    theta: f64,
    n_outputs: usize,
    alpha: f64,
) -> Result<Strategy> {
    let chi = retransmission_colatitude(m, theta)?;
    let (n, rotation) = if m == 2 {
        (2, Complex64::new(1.0, 0.0))
    } else {
        if n_outputs < 2 {
            return Err(Error::TooFewOutputs {
                min: 2,
                got: n_outputs,
            });
        }
        (n_outputs, Complex64::from_polar(1.0, alpha))
    };
    let weight = 1.0 / n as f64;
    let (elements, retransmit) = (0..n)
        .map(|l| {
            let phase = rotation * root_of_unity(l, n);
            (
                Hermitian2::new(weight, weight, phase.conj() * weight),
                latitude_state(chi, phase),
            )
        })
        .unzip();
    Strategy::new(Pom::new(elements), retransmit)
}

/// [`optimal_strategy_analytic`] with `n_outputs = m` and `alpha = 0`.
pub fn default_optimal_strategy(m: usize, theta: f64) -> Result<Strategy> {
    optimal_strategy_analytic(m, theta, m, 0.0)
}
