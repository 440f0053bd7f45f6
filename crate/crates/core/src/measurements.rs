//! Probability operator measures (POMs), Born-rule statistics, the
//! square-root measurement and error probabilities.

use std::collections::BTreeMap;
use std::fmt;

use crate::ensembles::{check_domain, SymmetricEnsemble};
use crate::error::{Error, Result};
use crate::qubit::{hermitian_eig2, Hermitian2, PureQubit};
use crate::tolerance::TOL;

/// An ordered list of measurement operators with integer outcome labels.
///
/// Construction does not enforce the POM conditions; [`validate_pom`]
/// reports what is wrong, and operations that need a true POM check it.
#[derive(Debug, Clone, PartialEq)]
pub struct Pom {
    elements: Vec<Hermitian2>,
    labels: Vec<usize>,
}

impl Pom {
    /// Elements labelled `0..n`.
    pub fn new(elements: Vec<Hermitian2>) -> Self {
        let labels = (0..elements.len()).collect();
        Pom { elements, labels }
    }

    pub fn with_labels(elements: Vec<Hermitian2>, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != elements.len() {
            return Err(Error::LengthMismatch {
                what: "POM labels",
                expected: elements.len(),
                got: labels.len(),
            });
        }
        Ok(Pom { elements, labels })
    }

    pub fn elements(&self) -> &[Hermitian2] {
        &self.elements
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Largest entry of `sum(elements) - I` in modulus.
    pub fn identity_residual(&self) -> f64 {
        (self.elements.iter().sum::<Hermitian2>() - Hermitian2::IDENTITY).max_abs()
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let violations = validate_pom(self);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidPom(violations))
        }
    }
}

/// A reason a [`Pom`] is not a valid measurement.
#[derive(Debug, Clone, PartialEq)]
pub enum PomViolation {
    Empty,
    NotPsd { label: usize, eigenvalue: f64 },
    IdentitySum { residual: f64 },
    DuplicateLabel(usize),
}

impl fmt::Display for PomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PomViolation::Empty => write!(f, "POM has no elements"),
            PomViolation::NotPsd { label, eigenvalue } => write!(
                f,
                "element {label} is not positive semidefinite (eigenvalue {eigenvalue:e})"
            ),
            PomViolation::IdentitySum { residual } => {
                write!(f, "elements do not sum to the identity (residual {residual:e})")
            }
            PomViolation::DuplicateLabel(l) => write!(f, "outcome label {l} is repeated"),
        }
    }
}

/// Lists every violated POM condition; empty iff `p` is a valid POM.
pub fn validate_pom(p: &Pom) -> Vec<PomViolation> {
    let mut out = Vec::new();
    if p.is_empty() {
        out.push(PomViolation::Empty);
    }
    let mut seen = std::collections::BTreeSet::new();
    for &label in &p.labels {
        if !seen.insert(label) {
            out.push(PomViolation::DuplicateLabel(label));
        }
    }
    for (e, &label) in p.elements.iter().zip(&p.labels) {
        let low = e.eigenvalues().1;
        if !(low >= -TOL.psd) {
            out.push(PomViolation::NotPsd {
                label,
                eigenvalue: low,
            });
        }
    }
    let residual = p.identity_residual();
    if !(residual <= TOL.identity_sum) {
        out.push(PomViolation::IdentitySum { residual });
    }
    out
}

/// Which signal each measurement outcome is taken to announce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    outcome_to_signal: BTreeMap<usize, usize>,
}

impl Assignment {
    pub fn new(outcome_to_signal: BTreeMap<usize, usize>) -> Self {
        Assignment { outcome_to_signal }
    }

    /// The k-th element of `p` announces signal k.
    pub fn identity(p: &Pom) -> Self {
        Assignment {
            outcome_to_signal: p.labels.iter().copied().zip(0..).collect(),
        }
    }

    /// Each outcome announces the signal with the largest joint probability;
    /// ties go to the lower signal index.
    pub fn greedy(e: &SymmetricEnsemble, p: &Pom) -> Self {
        let map = p
            .elements
            .iter()
            .zip(&p.labels)
            .map(|(el, &label)| {
                let mut best = (0, f64::NEG_INFINITY);
                for (j, s) in e.states().iter().enumerate() {
                    let v = el.expectation(s);
                    if v > best.1 {
                        best = (j, v);
                    }
                }
                (label, best.0)
            })
            .collect();
        Assignment {
            outcome_to_signal: map,
        }
    }

    pub fn signal_for(&self, label: usize) -> Option<usize> {
        self.outcome_to_signal.get(&label).copied()
    }

    pub fn map(&self) -> &BTreeMap<usize, usize> {
        &self.outcome_to_signal
    }
}

/// Square-root measurement together with the rank of the frame operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareRootMeasurement {
    pub pom: Pom,
    /// Rank of `sum |psi_j><psi_j|`; below two the elements only resolve the
    /// signal support and do not sum to the identity.
    pub rank: usize,
}

impl SquareRootMeasurement {
    pub fn rank_deficient(&self) -> bool {
        self.rank < 2
    }
}

/// `Phi^{-1/2} |s_k><s_k| Phi^{-1/2}` with `Phi = sum_k |s_k><s_k|`.
///
/// Eigenvalues of `Phi` at or below `TOL.pseudo_inverse` are dropped from
/// the inverse square root.
pub fn square_root_pom(states: &[PureQubit]) -> SquareRootMeasurement {
    let frame: Hermitian2 = states.iter().map(Hermitian2::projector).sum();
    let mut rank = 0;
    let inv_sqrt: Hermitian2 = hermitian_eig2(&frame)
        .iter()
        .filter(|pair| pair.value > TOL.pseudo_inverse)
        .map(|pair| {
            rank += 1;
            pair.value.sqrt().recip() * Hermitian2::projector(&pair.vector)
        })
        .sum();
    let elements = states
        .iter()
        .map(|s| inv_sqrt.sandwich(&Hermitian2::projector(s)))
        .collect();
    SquareRootMeasurement {
        pom: Pom::new(elements),
        rank,
    }
}

/// Square-root measurement of a symmetric ensemble, one element per signal.
pub fn square_root_measurement(e: &SymmetricEnsemble) -> SquareRootMeasurement {
    square_root_pom(e.states())
}

/// Born-rule outcome probabilities `<s|pi_k|s>` in element order.
pub fn outcome_probabilities(s: &PureQubit, p: &Pom) -> Result<Vec<f64>> {
    p.ensure_valid()?;
    Ok(born_probabilities(s, p))
}

pub(crate) fn born_probabilities(s: &PureQubit, p: &Pom) -> Vec<f64> {
    p.elements
        .iter()
        .map(|el| el.expectation(s).clamp(0.0, 1.0))
        .collect()
}

/// `1 - sum_k p_{a(k)} <psi_{a(k)}|pi_k|psi_{a(k)}>`.
///
/// The formula is evaluated for the given elements as they are; validity of
/// the POM is the caller's concern (see [`validate_pom`]).
pub fn error_probability(e: &SymmetricEnsemble, p: &Pom, a: &Assignment) -> Result<f64> {
    let mut correct = 0.0;
    for (el, &label) in p.elements.iter().zip(&p.labels) {
        let j = a.signal_for(label).ok_or(Error::UnassignedOutcome(label))?;
        let signal = e.states().get(j).ok_or(Error::SignalOutOfRange {
            label,
            signal: j,
            m: e.m(),
        })?;
        correct += el.expectation(signal);
    }
    Ok((1.0 - correct * e.prior()).clamp(0.0, 1.0))
}

/// Minimum error probability of `m` symmetric states: `1 - (1 + sin theta)/m`.
pub fn min_error_analytic(m: usize, theta: f64) -> Result<f64> {
    check_domain(m, theta)?;
    Ok(1.0 - (1.0 + theta.sin()) / m as f64)
}
