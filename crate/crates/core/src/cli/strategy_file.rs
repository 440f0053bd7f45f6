//! JSON document holding an ensemble, a strategy, and where it came from.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ensembles::{symmetric_ensemble, SymmetricEnsemble};
use crate::error::{Error, Result};
use crate::fidelity::Strategy;
use crate::measurements::Pom;
use crate::qubit::{Hermitian2, PureQubit};

pub const GENERATOR_ANALYTIC: &str = "analytic";
pub const GENERATOR_OPTIMIZER: &str = "optimizer";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub m: usize,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, Value>,
    pub version: String,
}

impl Provenance {
    pub fn new(generator: &str, parameters: BTreeMap<String, Value>) -> Self {
        Provenance {
            generator: generator.to_string(),
            parameters,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Elements are `[a, re b, im b, d]`; states are
/// `[re amp_plus, im amp_plus, re amp_minus, im amp_minus]`. serde_json
/// writes the shortest decimal that parses back to the same double, so
/// the document round-trips bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyFile {
    pub ensemble: EnsembleSpec,
    pub pom: Vec<[f64; 4]>,
    pub retransmit: Vec<[f64; 4]>,
    pub provenance: Provenance,
}

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("malformed strategy file: {0}")]
    Parse(#[from] serde_json::Error),
}

impl StrategyFile {
    pub fn new(e: &SymmetricEnsemble, s: &Strategy, provenance: Provenance) -> Self {
        StrategyFile {
            ensemble: EnsembleSpec { m: e.m(), theta: e.theta() },
            pom: s
                .pom()
                .elements()
                .iter()
                .map(|h| [h.a, h.b.re, h.b.im, h.d])
                .collect(),
            retransmit: s
                .retransmit()
                .iter()
                .map(|q| {
                    let (p, m) = (q.amp_plus(), q.amp_minus());
                    [p.re, p.im, m.re, m.im]
                })
                .collect(),
            provenance,
        }
    }

    pub fn is_analytic(&self) -> bool {
        self.provenance.generator == GENERATOR_ANALYTIC
    }

    /// The raw POM, without validation.
    pub fn pom(&self) -> Pom {
        Pom::new(
            self.pom
                .iter()
                .map(|&[a, re, im, d]| Hermitian2::new(a, d, Complex64::new(re, im)))
                .collect(),
        )
    }

    /// Rebuilds the ensemble and strategy, rejecting invalid POMs and
    /// unnormalized states.
    pub fn load(&self) -> Result<(SymmetricEnsemble, Strategy)> {
        let e = symmetric_ensemble(self.ensemble.m, self.ensemble.theta)?;
        let pom = self.pom();
        pom.ensure_valid()?;
        let states = self
            .retransmit
            .iter()
            .map(|&[pr, pi, mr, mi]| PureQubit::new(Complex64::new(pr, pi), Complex64::new(mr, mi)))
            .collect::<Result<Vec<_>>>()?;
        if states.len() != pom.len() {
            return Err(Error::LengthMismatch {
                what: "retransmission states",
                expected: pom.len(),
                got: states.len(),
            });
        }
        Ok((e, Strategy::new(pom, states)?))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("strategy file serializes") + "\n"
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn write(&self, path: &Path) -> Result<(), FileError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, FileError> {
        Ok(Self::from_json(&std::fs::read_to_string(path)?)?)
    }
}
