//! Numerical search over rank-one POMs.
//!
//! This module is an independent check on the closed-form results: it never
//! calls the analytic formulas, only the generic evaluators
//! ([`optimal_retransmission`] and the Born rule). Each restart draws a
//! random feasible [`ParamPom`] and runs a projected coordinate search:
//! every coordinate is nudged up or down by the current step, the result is
//! repaired back onto the constraint set, and the move is kept only if it
//! improves the objective. The step shrinks geometrically per sweep.

mod linalg;
mod param;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use param::{repair, to_pom, ParamPom};

use crate::ensembles::SymmetricEnsemble;
use crate::error::{Error, Result};
use crate::fidelity::{optimal_retransmission, Strategy};
use crate::measurements::{error_probability, validate_pom, Assignment, Pom};
use crate::qubit::{BlochVector, Hermitian2};

/// Search settings. `Default` gives 4 elements, 16 restarts, 2000 sweeps,
/// initial step 0.3 decaying by 0.995 per sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub n_elements: usize,
    pub restarts: usize,
    pub max_iterations: usize,
    pub step_scale: f64,
    pub step_decay: f64,
    /// Weight of the squared constraint residual subtracted from the objective.
    pub penalty_weight: f64,
    pub seed: u64,
    /// Minimum improvement for a move to count; the search also stops once
    /// the step falls below it.
    pub tolerance: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            n_elements: 4,
            restarts: 16,
            max_iterations: 2000,
            step_scale: 0.3,
            step_decay: 0.995,
            penalty_weight: 1.0,
            seed: 0,
            tolerance: 1e-10,
        }
    }
}

impl OptimizerConfig {
    pub fn check(&self) -> Result<()> {
        if self.n_elements < 2 {
            return Err(Error::Config("n_elements must be at least 2"));
        }
        if self.restarts < 1 {
            return Err(Error::Config("restarts must be at least 1"));
        }
        if self.max_iterations < 1 {
            return Err(Error::Config("max_iterations must be at least 1"));
        }
        if !(self.step_scale > 0.0) {
            return Err(Error::Config("step_scale must be positive"));
        }
        if !(self.step_decay > 0.0 && self.step_decay <= 1.0) {
            return Err(Error::Config("step_decay must lie in (0, 1]"));
        }
        if !(self.penalty_weight >= 0.0) {
            return Err(Error::Config("penalty_weight must be non-negative"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("tolerance must be positive"));
        }
        Ok(())
    }
}

/// What happened in one restart.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartRecord {
    pub restart: usize,
    pub initial: f64,
    pub best: f64,
    pub sweeps: usize,
    pub accepted: usize,
    pub evaluations: usize,
    pub repair_failures: usize,
    /// Candidates re-validated as full POMs (about 1% of evaluations).
    pub spot_checks: usize,
    pub spot_check_failures: usize,
}

impl RestartRecord {
    fn empty(restart: usize) -> Self {
        RestartRecord {
            restart,
            initial: f64::NEG_INFINITY,
            best: f64::NEG_INFINITY,
            sweeps: 0,
            accepted: 0,
            evaluations: 0,
            repair_failures: 0,
            spot_checks: 0,
            spot_check_failures: 0,
        }
    }
}

/// Merging of parallel elements in the winning restart.
#[derive(Debug, Clone, PartialEq)]
pub struct Compaction {
    pub elements_before: usize,
    pub elements_after: usize,
    pub applied: bool,
    pub value_before: f64,
    pub value_after: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    pub restarts: Vec<RestartRecord>,
    pub best_restart: usize,
    pub compaction: Compaction,
}

impl ConvergenceTrace {
    pub fn spot_checks(&self) -> (usize, usize) {
        self.restarts
            .iter()
            .fold((0, 0), |(a, b), r| (a + r.spot_checks, b + r.spot_check_failures))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedStrategy {
    pub strategy: Strategy,
    pub params: ParamPom,
    pub fidelity: f64,
    pub trace: ConvergenceTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedMeasurement {
    pub pom: Pom,
    pub assignment: Assignment,
    pub params: ParamPom,
    pub error: f64,
    pub trace: ConvergenceTrace,
}

const SPOT_CHECK_RATE: f64 = 0.01;
const INIT_ATTEMPTS: usize = 32;
/// Elements at most this far apart (radians) are merged after the search.
const MERGE_ANGLE: f64 = 1e-2;
const MIN_WEIGHT: f64 = 1e-12;
const POLISH_STEP: f64 = 1e-3;
const POLISH_SWEEPS: usize = 400;
/// Largest objective loss accepted in exchange for fewer elements.
const COMPACTION_SLACK: f64 = 1e-9;

/// Random starting point: uniform weights before normalization, directions
/// uniform on the sphere.
fn random_params(n: usize, rng: &mut ChaCha8Rng) -> ParamPom {
    let weights = (0..n).map(|_| rng.random::<f64>()).collect();
    let colatitudes = (0..n)
        .map(|_| (2.0 * rng.random::<f64>() - 1.0).clamp(-1.0, 1.0).acos())
        .collect();
    let longitudes = (0..n).map(|_| 2.0 * PI * rng.random::<f64>()).collect();
    ParamPom {
        weights,
        colatitudes,
        longitudes,
    }
}

struct RestartOutcome {
    params: ParamPom,
    value: f64,
    record: RestartRecord,
}

struct Search<'a, F> {
    cfg: &'a OptimizerConfig,
    objective: &'a F,
    rng: ChaCha8Rng,
    record: RestartRecord,
}

impl<F> Search<'_, F>
where
    F: Fn(&[Hermitian2]) -> f64 + Sync,
{
    fn score(&mut self, p: &ParamPom) -> f64 {
        self.record.evaluations += 1;
        let elements = p.elements();
        if self.rng.random::<f64>() < SPOT_CHECK_RATE {
            self.record.spot_checks += 1;
            if !validate_pom(&Pom::new(elements.clone())).is_empty() {
                self.record.spot_check_failures += 1;
            }
        }
        let r = p.residuals();
        (self.objective)(&elements) - self.cfg.penalty_weight * r.iter().map(|v| v * v).sum::<f64>()
    }

    /// Projected coordinate search from a feasible start.
    fn descend(&mut self, mut current: ParamPom, mut value: f64, mut step: f64, sweeps: usize) -> (ParamPom, f64) {
        let n = current.n();
        for _ in 0..sweeps {
            if step < self.cfg.tolerance {
                break;
            }
            self.record.sweeps += 1;
            for coord in 0..3 * n {
                let sign = if self.rng.random::<bool>() { 1.0 } else { -1.0 };
                for delta in [sign * step, -sign * step] {
                    let mut trial = current.clone();
                    let (field, k) = (coord / n, coord % n);
                    match field {
                        0 => trial.weights[k] = (trial.weights[k] + delta).clamp(0.0, 1.0),
                        1 => trial.colatitudes[k] += delta,
                        _ => trial.longitudes[k] += delta,
                    }
                    let trial = match repair(&trial) {
                        Ok(t) => t,
                        Err(_) => {
                            self.record.repair_failures += 1;
                            continue;
                        }
                    };
                    let v = self.score(&trial);
                    if v > value + self.cfg.tolerance {
                        current = trial;
                        value = v;
                        self.record.accepted += 1;
                        break;
                    }
                }
            }
            step *= self.cfg.step_decay;
        }
        (current, value)
    }
}

fn run_restart<F>(restart: usize, cfg: &OptimizerConfig, objective: &F) -> Option<RestartOutcome>
where
    F: Fn(&[Hermitian2]) -> f64 + Sync,
{
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(restart as u64);
    let mut search = Search {
        cfg,
        objective,
        rng,
        record: RestartRecord::empty(restart),
    };

    let mut start = None;
    for _ in 0..INIT_ATTEMPTS {
        match repair(&random_params(cfg.n_elements, &mut search.rng)) {
            Ok(p) => {
                start = Some(p);
                break;
            }
            Err(_) => search.record.repair_failures += 1,
        }
    }
    let start = start?;
    let value = search.score(&start);
    search.record.initial = value;
    let (params, value) = search.descend(start, value, cfg.step_scale, cfg.max_iterations);
    search.record.best = value;
    Some(RestartOutcome {
        params,
        value,
        record: search.record,
    })
}

/// Merges elements whose Bloch directions lie within `angle` of each other
/// and drops elements of negligible weight. Parallel rank-one elements sum
/// to a single rank-one element, so this only removes redundant outcomes.
fn merge_parallel(p: &ParamPom, angle: f64) -> ParamPom {
    let mut order: Vec<usize> = (0..p.n()).filter(|&k| p.weights[k] > MIN_WEIGHT).collect();
    order.sort_by(|&a, &b| p.weights[b].total_cmp(&p.weights[a]).then(a.cmp(&b)));
    // (weight, weighted direction sum, representative index)
    let mut clusters: Vec<(f64, BlochVector, usize)> = Vec::new();
    for k in order {
        let d = p.direction(k);
        let w = p.weights[k];
        match clusters.iter_mut().find(|(_, v, _)| v.angle_to(&d) <= angle) {
            Some((cw, v, _)) => {
                *cw += w;
                v.x += w * d.x;
                v.y += w * d.y;
                v.z += w * d.z;
            }
            None => clusters.push((w, BlochVector::new(w * d.x, w * d.y, w * d.z), k)),
        }
    }
    let mut out = ParamPom {
        weights: Vec::new(),
        colatitudes: Vec::new(),
        longitudes: Vec::new(),
    };
    for (w, v, rep) in clusters {
        let rho = v.x.hypot(v.y);
        out.weights.push(w);
        out.colatitudes.push(rho.atan2(v.z));
        out.longitudes.push(if rho > 1e-15 { v.y.atan2(v.x) } else { p.longitudes[rep] });
    }
    out
}

/// Runs every restart, keeps the best (ties going to the lowest index) and
/// compacts it.
fn multistart<F>(cfg: &OptimizerConfig, objective: F) -> Result<(ParamPom, ConvergenceTrace)>
where
    F: Fn(&[Hermitian2]) -> f64 + Sync,
{
    cfg.check()?;
    let outcomes: Vec<Option<RestartOutcome>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(r, cfg, &objective))
        .collect();
    let mut best: Option<(usize, f64)> = None;
    for (i, o) in outcomes.iter().enumerate() {
        if let Some(o) = o {
            if best.is_none_or(|(_, v)| o.value > v) {
                best = Some((i, o.value));
            }
        }
    }
    let (best_restart, best_value) = best.ok_or(Error::OptimizationFailed)?;
    let mut records = Vec::with_capacity(outcomes.len());
    let mut params = None;
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Some(o) => {
                if i == best_restart {
                    params = Some(o.params);
                }
                records.push(o.record);
            }
            None => {
                let mut r = RestartRecord::empty(i);
                r.repair_failures = INIT_ATTEMPTS;
                records.push(r);
            }
        }
    }
    let params = params.expect("best restart has parameters");

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(cfg.restarts as u64);
    let mut polish = Search {
        cfg,
        objective: &objective,
        rng,
        record: RestartRecord::empty(cfg.restarts),
    };
    let merged = merge_parallel(&params, MERGE_ANGLE);
    let mut compaction = Compaction {
        elements_before: params.n(),
        elements_after: params.n(),
        applied: false,
        value_before: best_value,
        value_after: best_value,
    };
    let mut chosen = params;
    if merged.n() < chosen.n() {
        if let Ok(start) = repair(&merged) {
            let v = polish.score(&start);
            let (candidate, v) = polish.descend(start, v, POLISH_STEP, POLISH_SWEEPS);
            compaction.value_after = v;
            if v >= best_value - COMPACTION_SLACK {
                compaction.applied = true;
                compaction.elements_after = candidate.n();
                chosen = candidate;
            }
        }
    }
    Ok((
        chosen,
        ConvergenceTrace {
            restarts: records,
            best_restart,
            compaction,
        },
    ))
}

/// Maximizes the fidelity over `cfg.n_elements`-outcome rank-one POMs, each
/// followed by its optimal retransmission.
pub fn optimize_fidelity(e: &SymmetricEnsemble, cfg: &OptimizerConfig) -> Result<OptimizedStrategy> {
    let (params, trace) = multistart(cfg, |elements| {
        elements
            .iter()
            .map(|el| crate::fidelity::o_k_operator(e, el).eigenvalues().0)
            .sum()
    })?;
    let pom = to_pom(&params)?;
    let report = optimal_retransmission(e, &pom);
    let fidelity = report.fidelity;
    Ok(OptimizedStrategy {
        strategy: report.into_strategy(pom)?,
        params,
        fidelity,
        trace,
    })
}

/// Minimizes the error probability with each outcome assigned greedily to
/// its most likely signal.
pub fn optimize_error(e: &SymmetricEnsemble, cfg: &OptimizerConfig) -> Result<OptimizedMeasurement> {
    let prior = e.prior();
    let (params, trace) = multistart(cfg, |elements| {
        elements
            .iter()
            .map(|el| {
                e.states()
                    .iter()
                    .map(|s| el.expectation(s))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .sum::<f64>()
            * prior
    })?;
    let pom = to_pom(&params)?;
    let assignment = Assignment::greedy(e, &pom);
    let error = error_probability(e, &pom, &assignment)?;
    Ok(OptimizedMeasurement {
        pom,
        assignment,
        params,
        error,
        trace,
    })
}
