//! Test-side reference arithmetic. Everything here works on raw complex
//! arrays so the crate's own qubit and matrix code is not used to check
//! itself.
#![allow(dead_code)]

pub mod props;

use num_complex::Complex64 as C;
use qubit_relay::{Hermitian2, PureQubit};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub type Ket = [C; 2];
pub type Mat = [[C; 2]; 2];

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn ket_of(s: &PureQubit) -> Ket {
    [s.amp_plus(), s.amp_minus()]
}

pub fn mat_of(h: &Hermitian2) -> Mat {
    [[c(h.a, 0.0), h.b], [h.b.conj(), c(h.d, 0.0)]]
}

/// `cos(t/2)|+> + e^{i p} sin(t/2)|->`, written out directly.
pub fn ket(colatitude: f64, longitude: f64) -> Ket {
    [c((colatitude / 2.0).cos(), 0.0), C::from_polar((colatitude / 2.0).sin(), longitude)]
}

/// The symmetric states straight from their defining formula.
pub fn signal_kets(m: usize, theta: f64) -> Vec<Ket> {
    (0..m).map(|j| ket(theta, 2.0 * PI * j as f64 / m as f64)).collect()
}

pub fn braket(a: &Ket, b: &Ket) -> C {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

pub fn outer(v: &Ket) -> Mat {
    let mut o = [[C::default(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = v[i] * v[j].conj();
        }
    }
    o
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let mut o = [[C::default(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    o
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    let mut o = *a;
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] += b[i][j];
        }
    }
    o
}

pub fn scale(s: f64, a: &Mat) -> Mat {
    a.map(|row| row.map(|x| x * s))
}

pub fn apply(a: &Mat, v: &Ket) -> Ket {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

/// `<v|A|v>`, real part.
pub fn expect(a: &Mat, v: &Ket) -> f64 {
    braket(v, &apply(a, v)).re
}

pub fn max_entry_diff(a: &Mat, b: &Mat) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            d = d.max((a[i][j] - b[i][j]).norm());
        }
    }
    d
}

/// Jacobi diagonalization of a Hermitian 2x2 matrix: remove the phase of
/// the off-diagonal entry, then rotate by the real Jacobi angle. Returns
/// `(lambda_hi, lambda_lo, v_hi, v_lo)`.
pub fn jacobi(m: &Mat) -> (f64, f64, Ket, Ket) {
    let a = m[0][0].re;
    let d = m[1][1].re;
    let b = m[0][1];
    let r = b.norm();
    let phase = if r > 0.0 { b / r } else { c(1.0, 0.0) };
    // In the basis (|+>, phase* |->) the matrix is real symmetric [[a, r], [r, d]].
    let angle = 0.5 * (2.0 * r).atan2(a - d);
    let (s, co) = angle.sin_cos();
    let l1 = a * co * co + 2.0 * r * s * co + d * s * s;
    let l2 = a * s * s - 2.0 * r * s * co + d * co * co;
    let v1 = [c(co, 0.0), phase.conj() * s];
    let v2 = [c(-s, 0.0), phase.conj() * co];
    if l1 >= l2 {
        (l1, l2, v1, v2)
    } else {
        (l2, l1, v2, v1)
    }
}

pub fn top_eigenvalue(m: &Mat) -> f64 {
    jacobi(m).0
}

fn inv_sqrt(m: &Mat) -> Option<Mat> {
    let (l1, l2, v1, v2) = jacobi(m);
    if l2 <= 1e-6 * l1.max(1.0) {
        return None;
    }
    Some(add(&scale(l1.powf(-0.5), &outer(&v1)), &scale(l2.powf(-0.5), &outer(&v2))))
}

/// A random valid POM of rank-one elements `|u_k><u_k|`, `u_k = S^{-1/2} v_k`,
/// `S = sum_k |v_k><v_k|`, from arbitrary vectors `v_k`; `None` when the
/// vectors are too close to colinear.
pub fn pom_from_vectors(raw: &[[f64; 4]]) -> Option<Vec<Hermitian2>> {
    let vs: Vec<Ket> = raw.iter().map(|r| [c(r[0], r[1]), c(r[2], r[3])]).collect();
    let s = vs.iter().fold([[C::default(); 2]; 2], |acc, v| add(&acc, &outer(v)));
    let w = inv_sqrt(&s)?;
    Some(
        vs.iter()
            .map(|v| {
                let e = outer(&apply(&w, v));
                Hermitian2::new(e[0][0].re, e[1][1].re, e[0][1])
            })
            .collect(),
    )
}

/// `sum_jk p_j |<psi_j|phi_k>|^2 <psi_j|pi_k|psi_j>` by a double loop.
pub fn brute_fidelity(signals: &[Ket], pom: &[Mat], phis: &[Ket]) -> f64 {
    let p = 1.0 / signals.len() as f64;
    let mut f = 0.0;
    for psi in signals {
        for (el, phi) in pom.iter().zip(phis) {
            f += p * braket(psi, phi).norm_sqr() * expect(el, psi);
        }
    }
    f
}

/// `(1/M) sum_j |psi_j><psi_j| <psi_j|pi|psi_j>`.
pub fn brute_o_k(signals: &[Ket], el: &Mat) -> Mat {
    let p = 1.0 / signals.len() as f64;
    signals
        .iter()
        .fold([[C::default(); 2]; 2], |acc, psi| add(&acc, &scale(p * expect(el, psi), &outer(psi))))
}

pub fn f_max_formula(m: usize, theta: f64) -> f64 {
    let (s, co) = theta.sin_cos();
    if m == 2 {
        0.5 * (1.0 + (co * co + s.powi(4)).sqrt())
    } else {
        1.0 - 0.25 * s * s
    }
}

pub fn p_e_min_formula(m: usize, theta: f64) -> f64 {
    1.0 - (1.0 + theta.sin()) / m as f64
}

// Random raw inputs shared by the proptest suites and the acceptance runner.

pub fn rand_hermitian_raw(rng: &mut ChaCha8Rng) -> [f64; 4] {
    [(); 4].map(|_| rng.random_range(-5.0..5.0))
}

pub fn hermitian_from_raw(r: [f64; 4]) -> Hermitian2 {
    Hermitian2::new(r[0], r[1], c(r[2], r[3]))
}

pub fn rand_angles(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (rng.random_range(0.0..=PI), rng.random_range(-PI..PI))
}

pub fn rand_vectors(rng: &mut ChaCha8Rng, n: usize) -> Vec<[f64; 4]> {
    (0..n).map(|_| [(); 4].map(|_| rng.random_range(-1.0..1.0))).collect()
}

pub fn rand_theta(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0.0..=std::f64::consts::FRAC_PI_2)
}
