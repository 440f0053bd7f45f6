//! Invariants as plain check functions over concrete inputs. The proptest
//! suites feed them shrinkable inputs; the acceptance runner feeds them a
//! fixed-seed stream of 10^4 cases each.

use super::*;
use qubit_relay::cli::format::g17;
use qubit_relay::cli::strategy_file::{Provenance, StrategyFile};
use qubit_relay::cli::sweep_csv;
use qubit_relay::fidelity::retransmission_cos_colatitude;
use qubit_relay::measurements::square_root_measurement;
use qubit_relay::optimizer::{repair, ParamPom};
use qubit_relay::{
    apply_generator, bloch_vector, error_probability, fidelity_of_strategy, hermitian_eig2, make_qubit,
    max_fidelity_analytic, min_error_analytic, optimal_retransmission, optimal_strategy_analytic,
    outcome_probabilities, overlap_prob, symmetric_ensemble, validate_pom, Assignment, Pom, Strategy,
};
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($fmt)+));
        }
    };
}

// qubit-core

pub fn eig_reconstructs(h: &Hermitian2) -> Check {
    let pairs = hermitian_eig2(h);
    ensure!(pairs[0].value >= pairs[1].value, "eigenvalues not descending: {pairs:?}");
    let m = mat_of(h);
    let rebuilt = add(
        &scale(pairs[0].value, &outer(&ket_of(&pairs[0].vector))),
        &scale(pairs[1].value, &outer(&ket_of(&pairs[1].vector))),
    );
    ensure!(max_entry_diff(&rebuilt, &m) < 1e-9, "reconstruction of {h:?} off by {}", max_entry_diff(&rebuilt, &m));
    for p in &pairs {
        let v = ket_of(&p.vector);
        let hv = apply(&m, &v);
        for i in 0..2 {
            ensure!((hv[i] - v[i] * p.value).norm() < 1e-10 * (1.0 + p.value.abs()), "H v != lambda v for {h:?}");
        }
        let first = if v[0].norm() > 1e-12 { v[0] } else { v[1] };
        ensure!(first.im == 0.0 && first.re >= 0.0, "phase convention broken: {v:?}");
    }
    let cross = braket(&ket_of(&pairs[0].vector), &ket_of(&pairs[1].vector)).norm();
    ensure!(cross < 1e-10, "eigenvectors not orthogonal: {cross}");
    let (hi, lo, _, _) = jacobi(&m);
    ensure!((hi - pairs[0].value).abs() < 1e-9 && (lo - pairs[1].value).abs() < 1e-9, "spectrum disagrees with Jacobi");
    Ok(())
}

pub fn trace_det(h: &Hermitian2) -> Check {
    let [p, q] = hermitian_eig2(h);
    let tr = h.a + h.d;
    let det = h.a * h.d - h.b.norm_sqr();
    let scale = 1.0 + tr.abs() + det.abs();
    ensure!((p.value + q.value - tr).abs() < 1e-9 * scale, "trace mismatch for {h:?}");
    ensure!((p.value * q.value - det).abs() < 1e-9 * scale, "determinant mismatch for {h:?}");
    Ok(())
}

pub fn overlap_matches_bloch(a: (f64, f64), b: (f64, f64)) -> Check {
    let qa = make_qubit(a.0, a.1).map_err(|e| e.to_string())?;
    let qb = make_qubit(b.0, b.1).map_err(|e| e.to_string())?;
    let via_bloch = 0.5 * (1.0 + bloch_vector(&qa).dot(&bloch_vector(&qb)));
    let direct = braket(&ket(a.0, a.1), &ket(b.0, b.1)).norm_sqr();
    ensure!((overlap_prob(&qa, &qb) - via_bloch).abs() < 1e-10, "overlap vs Bloch at {a:?} {b:?}");
    ensure!((overlap_prob(&qa, &qb) - direct).abs() < 1e-10, "overlap vs raw amplitudes at {a:?} {b:?}");
    ensure!((overlap_prob(&qa, &qb) - overlap_prob(&qb, &qa)).abs() == 0.0, "overlap not symmetric");
    ensure!((bloch_vector(&qa).norm() - 1.0).abs() < 1e-10, "Bloch vector off the sphere");
    Ok(())
}

// ensembles

pub fn generator_is_periodic(m: usize, theta: f64) -> Check {
    let e = symmetric_ensemble(m, theta).map_err(|e| e.to_string())?;
    for (j, s) in e.states().iter().enumerate() {
        let next = apply_generator(s, m);
        ensure!(next.distance(&e.states()[(j + 1) % m]) < 1e-12, "V psi_{j} != psi_{} at ({m}, {theta})", j + 1);
        let mut t = *s;
        for _ in 0..m {
            t = apply_generator(&t, m);
        }
        ensure!(t.distance(s) < 1e-12, "V^m != I at ({m}, {theta}), state {j}");
        ensure!((bloch_vector(s).z - theta.cos()).abs() < 1e-12, "state {j} off colatitude {theta}");
    }
    Ok(())
}

pub fn gram_is_circulant(m: usize, theta: f64) -> Check {
    let e = symmetric_ensemble(m, theta).map_err(|e| e.to_string())?;
    let raw = signal_kets(m, theta);
    for d in 0..m {
        let reference = braket(&raw[0], &raw[d]).norm();
        for j in 0..m {
            let g = e.states()[j].inner(&e.states()[(j + d) % m]).norm();
            ensure!((g - reference).abs() < 1e-12, "|<psi_{j}|psi_{}>| = {g}, expected {reference}", (j + d) % m);
        }
    }
    Ok(())
}

// measurements

pub fn square_root_is_min_error(m: usize, theta: f64) -> Check {
    let e = symmetric_ensemble(m, theta).map_err(|e| e.to_string())?;
    let pom = square_root_measurement(&e).pom;
    let pe = error_probability(&e, &pom, &Assignment::identity(&pom)).map_err(|e| e.to_string())?;
    let analytic = min_error_analytic(m, theta).map_err(|e| e.to_string())?;
    ensure!((pe - analytic).abs() < 1e-10, "P_e {pe} vs {analytic} at ({m}, {theta})");
    ensure!((analytic - p_e_min_formula(m, theta)).abs() < 1e-15, "closed form disagrees at ({m}, {theta})");
    Ok(())
}

pub fn probabilities_sum_to_one(pom: &[Hermitian2], state: (f64, f64)) -> Check {
    let pom = Pom::new(pom.to_vec());
    let s = make_qubit(state.0, state.1).map_err(|e| e.to_string())?;
    let probs = outcome_probabilities(&s, &pom).map_err(|e| e.to_string())?;
    let total: f64 = probs.iter().sum();
    ensure!((total - 1.0).abs() < 1e-9, "probabilities sum to {total}");
    ensure!(probs.iter().all(|p| (0.0..=1.0).contains(p)), "probability outside [0, 1]: {probs:?}");
    Ok(())
}

/// Below `SRM_MIN_THETA` the small frame eigenvalue `m sin^2(theta/2)` can
/// drop under the pseudo-inverse cutoff, where the rank-deficient branch
/// takes over by design.
pub const SRM_MIN_THETA: f64 = 1e-4;

pub fn square_root_traces(m: usize, theta: f64) -> Check {
    ensure!(theta >= SRM_MIN_THETA, "theta = {theta} inside the pseudo-inverse regime");
    let e = symmetric_ensemble(m, theta).map_err(|e| e.to_string())?;
    let srm = square_root_measurement(&e);
    ensure!(validate_pom(&srm.pom).is_empty(), "square-root POM invalid at ({m}, {theta})");
    for el in srm.pom.elements() {
        ensure!((el.trace() - 2.0 / m as f64).abs() < 1e-10, "trace {} at ({m}, {theta})", el.trace());
    }
    Ok(())
}

// fidelity

/// Bound, oracle agreement, and eigenvalue-sum identity for one POM.
pub fn optimal_retransmission_is_bounded(m: usize, theta: f64, pom: &[Hermitian2]) -> Check {
    let e = symmetric_ensemble(m, theta).map_err(|e| e.to_string())?;
    let p = Pom::new(pom.to_vec());
    let report = optimal_retransmission(&e, &p);
    let bound = max_fidelity_analytic(m, theta).map_err(|e| e.to_string())?;
    ensure!(report.fidelity <= bound + 1e-9, "F = {} above F_max = {bound} at ({m}, {theta})", report.fidelity);
    let sum: f64 = report.per_outcome.iter().map(|o| o.eigenvalue).sum();
    ensure!((sum - report.fidelity).abs() < 1e-10, "fidelity is not the eigenvalue sum");
    let signals = signal_kets(m, theta);
    let mats: Vec<Mat> = pom.iter().map(mat_of).collect();
    let oracle_top: f64 = mats.iter().map(|el| top_eigenvalue(&brute_o_k(&signals, el))).sum();
    ensure!((oracle_top - report.fidelity).abs() < 1e-10, "oracle eigenvalue sum {oracle_top} vs {}", report.fidelity);
    let phis: Vec<Ket> = report.per_outcome.iter().map(|o| ket_of(&o.state)).collect();
    let direct = brute_fidelity(&signals, &mats, &phis);
    ensure!((direct - report.fidelity).abs() < 1e-10, "double sum {direct} vs {}", report.fidelity);
    Ok(())
}

pub fn analytic_strategy_achieves_bound(m: usize, theta: f64, n: usize, alpha: f64) -> Check {
    let e = symmetric_ensemble(m, theta).map_err(|e| e.to_string())?;
    let s = optimal_strategy_analytic(m, theta, n, alpha).map_err(|e| e.to_string())?;
    ensure!(validate_pom(s.pom()).is_empty(), "analytic POM invalid at ({m}, {theta}, {n}, {alpha})");
    ensure!(s.pom().identity_residual() < 1e-12, "identity residual {}", s.pom().identity_residual());
    let f = fidelity_of_strategy(&e, &s);
    let target = f_max_formula(m, theta);
    ensure!((f - target).abs() < 1e-10, "F = {f}, F_max = {target} at ({m}, {theta}, {n}, {alpha})");
    let mats: Vec<Mat> = s.pom().elements().iter().map(mat_of).collect();
    let phis: Vec<Ket> = s.retransmit().iter().map(ket_of).collect();
    let direct = brute_fidelity(&signal_kets(m, theta), &mats, &phis);
    ensure!((direct - target).abs() < 1e-10, "oracle double sum {direct} vs {target}");
    Ok(())
}

/// Swapping any reported retransmission state for another cannot help.
pub fn eigenvector_dominates(m: usize, theta: f64, pom: &[Hermitian2], k: usize, other: (f64, f64)) -> Check {
    let e = symmetric_ensemble(m, theta).map_err(|e| e.to_string())?;
    let p = Pom::new(pom.to_vec());
    let report = optimal_retransmission(&e, &p);
    let k = k % pom.len();
    let mut states: Vec<_> = report.per_outcome.iter().map(|o| o.state).collect();
    states[k] = make_qubit(other.0, other.1).map_err(|e| e.to_string())?;
    let perturbed = fidelity_of_strategy(&e, &Strategy::new(p, states).map_err(|e| e.to_string())?);
    ensure!(perturbed <= report.fidelity + 1e-12, "perturbed {perturbed} beats {}", report.fidelity);
    Ok(())
}

pub fn f_max_is_monotone(m: usize, t1: f64, t2: f64) -> Check {
    let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
    let a = max_fidelity_analytic(m, lo).map_err(|e| e.to_string())?;
    let b = max_fidelity_analytic(m, hi).map_err(|e| e.to_string())?;
    ensure!(m == 2 || a >= b, "F_max({lo}) = {a} < F_max({hi}) = {b} for m = {m}");
    ensure!((a - f_max_formula(m, lo)).abs() < 1e-15, "closed form disagrees at ({m}, {lo})");
    Ok(())
}

/// Retransmission states lie north of the signals, and the M = 2 ones south
/// of the M > 2 ones. Compared through cosines; near the poles the gaps
/// shrink like theta^4 and fall below double resolution, so callers keep
/// theta inside `LATITUDE_RANGE`.
pub fn latitudes_are_ordered(theta: f64) -> Check {
    ensure!(LATITUDE_RANGE.contains(&theta), "theta = {theta} outside the resolvable range");
    let cos_chi = retransmission_cos_colatitude(3, theta).map_err(|e| e.to_string())?;
    let cos_chi2 = retransmission_cos_colatitude(2, theta).map_err(|e| e.to_string())?;
    ensure!(cos_chi > theta.cos(), "chi not north of theta = {theta}");
    ensure!(cos_chi2 > theta.cos(), "chi_2 not north of theta = {theta}");
    ensure!(cos_chi2 < cos_chi, "chi_2 not south of chi at theta = {theta}");
    Ok(())
}

pub const LATITUDE_RANGE: std::ops::RangeInclusive<f64> = 1e-3..=FRAC_PI_2 - 1e-6;

// optimizer

/// Whatever repair returns must be a valid POM.
pub fn repair_is_sound(weights: &[f64], colatitudes: &[f64], longitudes: &[f64]) -> Check {
    let p = ParamPom::new(weights.to_vec(), colatitudes.to_vec(), longitudes.to_vec()).map_err(|e| e.to_string())?;
    let Ok(q) = repair(&p) else {
        return Ok(());
    };
    ensure!(q.max_residual() <= 1e-8, "repair left residual {}", q.max_residual());
    let pom = Pom::new(q.elements());
    let v = validate_pom(&pom);
    ensure!(v.is_empty(), "repaired POM invalid: {}", v[0]);
    Ok(())
}

// cli

pub fn strategy_file_round_trips(m: usize, theta: f64, n: usize, alpha: f64) -> Check {
    let e = symmetric_ensemble(m, theta).map_err(|e| e.to_string())?;
    let s = optimal_strategy_analytic(m, theta, n, alpha).map_err(|e| e.to_string())?;
    let params = BTreeMap::from([("alpha".to_string(), serde_json::json!(alpha))]);
    let f = StrategyFile::new(&e, &s, Provenance::new("analytic", params));
    let back = StrategyFile::from_json(&f.to_json()).map_err(|e| e.to_string())?;
    ensure!(back == f, "round trip changed the document at ({m}, {theta}, {n}, {alpha})");
    let (_, s2) = back.load().map_err(|e| format!("reload failed: {e}"))?;
    ensure!(s2 == s, "reloaded strategy differs");
    ensure!(g17(theta).parse::<f64>().ok() == Some(theta), "17 digits do not round-trip {theta}");
    Ok(())
}

pub fn sweep_is_reproducible(m: usize, steps: usize) -> Check {
    let a = sweep_csv(m, steps).map_err(|e| e.to_string())?;
    let b = sweep_csv(m, steps).map_err(|e| e.to_string())?;
    ensure!(a == b, "sweep output differs between runs");
    ensure!(a.lines().count() == steps + 1 && !a.contains('\r'), "unexpected sweep layout");
    for row in a.lines().skip(1) {
        let cols: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        ensure!((cols[1] - p_e_min_formula(m, cols[0])).abs() < 1e-15, "p_e_min column at {}", cols[0]);
        ensure!((cols[2] - f_max_formula(m, cols[0])).abs() < 1e-15, "f_max column at {}", cols[0]);
    }
    Ok(())
}
