//! Monte Carlo simulation of the relay channel.
//!
//! Every trial draws its randomness from its own ChaCha8 stream, selected
//! by the trial index under the caller's seed. Trials are therefore
//! independent of execution order, and splitting them into tiles across
//! threads reproduces the sequential tallies exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ensembles::SymmetricEnsemble;
use crate::error::{Error, Result};
use crate::fidelity::Strategy;
use crate::measurements::{outcome_probabilities, Assignment, Pom};
use crate::qubit::overlap_prob;

const TILE: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub trials: u64,
    pub estimate: f64,
    pub std_error: f64,
    /// Per-outcome tallies, in POM element order.
    pub counts: Vec<u64>,
}

impl SimResult {
    fn from_tally(trials: u64, successes: u64, counts: Vec<u64>) -> Self {
        let estimate = successes as f64 / trials as f64;
        SimResult {
            trials,
            estimate,
            std_error: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
            counts,
        }
    }

    /// `(estimate - expected) / std_error`; zero when both the error and the
    /// deviation vanish.
    pub fn z_score(&self, expected: f64) -> f64 {
        let dev = self.estimate - expected;
        if self.std_error > 0.0 {
            dev / self.std_error
        } else if dev == 0.0 {
            0.0
        } else {
            dev.signum() * f64::INFINITY
        }
    }
}

/// Cumulative outcome distribution for one signal, renormalized after the
/// Born-rule clamp.
struct OutcomeSampler {
    cumulative: Vec<f64>,
}

impl OutcomeSampler {
    fn new(probs: Vec<f64>) -> Self {
        let total: f64 = probs.iter().sum();
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p / total;
                acc
            })
            .collect();
        OutcomeSampler { cumulative }
    }

    fn sample(&self, u: f64) -> usize {
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or_else(|| {
                // u beyond the rounded total: last outcome with positive mass
                let last = self.cumulative.last().copied().unwrap_or(0.0);
                self.cumulative.iter().position(|&c| c >= last).unwrap_or(0)
            })
    }
}

struct Channel {
    samplers: Vec<OutcomeSampler>,
}

impl Channel {
    fn new(e: &SymmetricEnsemble, pom: &Pom) -> Result<Self> {
        let samplers = e
            .states()
            .iter()
            .map(|s| outcome_probabilities(s, pom).map(OutcomeSampler::new))
            .collect::<Result<_>>()?;
        Ok(Channel { samplers })
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs `trials` trials in parallel tiles. `trial` returns the outcome index
/// and whether the trial counts as a success.
fn run<F>(trials: u64, n_outcomes: usize, trial: F) -> (u64, Vec<u64>)
where
    F: Fn(u64) -> (usize, bool) + Sync,
{
    let tiles = trials.div_ceil(TILE);
    (0..tiles)
        .into_par_iter()
        .map(|t| {
            let mut counts = vec![0u64; n_outcomes];
            let mut hits = 0u64;
            for i in t * TILE..((t + 1) * TILE).min(trials) {
                let (k, ok) = trial(i);
                counts[k] += 1;
                hits += ok as u64;
            }
            (hits, counts)
        })
        .reduce(
            || (0, vec![0; n_outcomes]),
            |(h1, mut c1), (h2, c2)| {
                c1.iter_mut().zip(c2).for_each(|(a, b)| *a += b);
                (h1 + h2, c1)
            },
        )
}

/// Estimates the fidelity of `s`: pick a signal uniformly, measure, prepare
/// the retransmission state, and pass with probability `|<psi_j|phi_k>|^2`.
pub fn simulate_fidelity(e: &SymmetricEnsemble, s: &Strategy, trials: u64, seed: u64) -> Result<SimResult> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let channel = Channel::new(e, s.pom())?;
    let pass: Vec<Vec<f64>> = e
        .states()
        .iter()
        .map(|psi| s.retransmit().iter().map(|phi| overlap_prob(psi, phi)).collect())
        .collect();
    let m = e.m();
    let (hits, counts) = run(trials, s.pom().len(), |i| {
        let mut rng = trial_rng(seed, i);
        let j = rng.random_range(0..m);
        let k = channel.samplers[j].sample(rng.random());
        let ok = rng.random::<f64>() < pass[j][k];
        (k, ok)
    });
    Ok(SimResult::from_tally(trials, hits, counts))
}

/// Estimates the error probability: the fraction of trials whose outcome
/// announces a signal other than the one sent.
pub fn simulate_error(
    e: &SymmetricEnsemble,
    p: &Pom,
    a: &Assignment,
    trials: u64,
    seed: u64,
) -> Result<SimResult> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let channel = Channel::new(e, p)?;
    let announced = p
        .labels()
        .iter()
        .map(|&label| {
            let signal = a.signal_for(label).ok_or(Error::UnassignedOutcome(label))?;
            if signal >= e.m() {
                return Err(Error::SignalOutOfRange { label, signal, m: e.m() });
            }
            Ok(signal)
        })
        .collect::<Result<Vec<_>>>()?;
    let m = e.m();
    let (hits, counts) = run(trials, p.len(), |i| {
        let mut rng = trial_rng(seed, i);
        let j = rng.random_range(0..m);
        let k = channel.samplers[j].sample(rng.random());
        (k, announced[k] != j)
    });
    Ok(SimResult::from_tally(trials, hits, counts))
}
