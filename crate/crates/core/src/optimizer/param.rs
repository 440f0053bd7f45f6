//! Rank-one POMs in weight / Bloch-angle form.
//!
//! Element `k` is `w_k [[1 + cos t_k, e^{-i p_k} sin t_k], [e^{i p_k} sin t_k, 1 - cos t_k]]`,
//! i.e. `w_k (I + n_k . sigma)` for the unit Bloch direction `n_k` at
//! colatitude `t_k` and longitude `p_k`. The elements form a POM exactly when
//! `sum w_k = 1`, `sum w_k cos t_k = 0`, and `sum w_k e^{i p_k} sin t_k = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::linalg::solve4;
use crate::error::{Error, Result};
use crate::measurements::Pom;
use crate::qubit::{BlochVector, Hermitian2};
use crate::tolerance::TOL;

/// Repair stops once every constraint residual is below this.
const REPAIR_TARGET: f64 = 1e-14;
const REPAIR_ROUNDS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct ParamPom {
    pub weights: Vec<f64>,
    pub colatitudes: Vec<f64>,
    pub longitudes: Vec<f64>,
}

impl ParamPom {
    pub fn new(weights: Vec<f64>, colatitudes: Vec<f64>, longitudes: Vec<f64>) -> Result<Self> {
        let n = weights.len();
        for (what, got) in [("colatitudes", colatitudes.len()), ("longitudes", longitudes.len())] {
            if got != n {
                return Err(Error::LengthMismatch {
                    what,
                    expected: n,
                    got,
                });
            }
        }
        Ok(ParamPom {
            weights,
            colatitudes,
            longitudes,
        })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn direction(&self, k: usize) -> BlochVector {
        let (st, ct) = self.colatitudes[k].sin_cos();
        let (sp, cp) = self.longitudes[k].sin_cos();
        BlochVector::new(st * cp, st * sp, ct)
    }

    /// `[|sum w - 1|, |sum w cos t|, |sum w e^{ip} sin t|]`.
    pub fn residuals(&self) -> [f64; 3] {
        let mut total = 0.0;
        let mut moment = BlochVector::default();
        for k in 0..self.n() {
            let w = self.weights[k];
            let v = self.direction(k);
            total += w;
            moment.x += w * v.x;
            moment.y += w * v.y;
            moment.z += w * v.z;
        }
        [(total - 1.0).abs(), moment.z.abs(), moment.x.hypot(moment.y)]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().into_iter().fold(0.0, f64::max)
    }

    fn weights_in_range(&self) -> Result<()> {
        match self.weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            Some(&w) => Err(Error::Weight(w)),
            None => Ok(()),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.weights_in_range().is_ok() && self.max_residual() <= TOL.feasibility
    }

    /// Elements without any feasibility check.
    pub fn elements(&self) -> Vec<Hermitian2> {
        (0..self.n())
            .map(|k| {
                let w = self.weights[k];
                let (st, ct) = self.colatitudes[k].sin_cos();
                Hermitian2::new(
                    w * (1.0 + ct),
                    w * (1.0 - ct),
                    Complex64::from_polar(w * st, -self.longitudes[k]),
                )
            })
            .collect()
    }

    /// Indices of elements carrying more than `min_weight`, heaviest first.
    pub fn weight_support(&self, min_weight: f64) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.n()).filter(|&k| self.weights[k] > min_weight).collect();
        idx.sort_by(|&a, &b| self.weights[b].total_cmp(&self.weights[a]).then(a.cmp(&b)));
        idx
    }
}

/// The POM described by feasible parameters.
pub fn to_pom(p: &ParamPom) -> Result<Pom> {
    p.weights_in_range()?;
    let r = p.residuals();
    if r.iter().any(|v| !(*v <= TOL.feasibility)) {
        return Err(Error::Infeasible(r));
    }
    Ok(Pom::new(p.elements()))
}

// Each element as the 4-vector (w, w n) on the cone |x| = t, t >= 0.
#[derive(Clone, Copy)]
struct ConePoint {
    t: f64,
    dir: [f64; 3],
}

impl ConePoint {
    fn vec4(&self) -> [f64; 4] {
        [self.t, self.t * self.dir[0], self.t * self.dir[1], self.t * self.dir[2]]
    }

    /// Nearest point on the cone to `u`; keeps the old direction when the
    /// spatial part vanishes.
    fn project(u: [f64; 4], old_dir: [f64; 3]) -> ConePoint {
        let r = (u[1] * u[1] + u[2] * u[2] + u[3] * u[3]).sqrt();
        let t = (0.5 * (u[0] + r)).max(0.0);
        let dir = if r > 1e-300 {
            [u[1] / r, u[2] / r, u[3] / r]
        } else {
            old_dir
        };
        ConePoint { t, dir }
    }

    /// Orthogonal projection of `v` onto the tangent space of the cone here.
    fn tangent(&self, v: [f64; 4]) -> [f64; 4] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        if self.t > 1e-12 {
            // normal q = (1, -n)/sqrt 2
            let q = [s, -s * self.dir[0], -s * self.dir[1], -s * self.dir[2]];
            let qv: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
            std::array::from_fn(|i| v[i] - qv * q[i])
        } else {
            // only the ray (1, n)/sqrt 2 is reachable from the apex
            let g = [s, s * self.dir[0], s * self.dir[1], s * self.dir[2]];
            let gv: f64 = g.iter().zip(&v).map(|(a, b)| a * b).sum();
            std::array::from_fn(|i| gv * g[i])
        }
    }

    fn tangent_projector(&self) -> [[f64; 4]; 4] {
        let mut out = [[0.0; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            let mut e = [0.0; 4];
            e[i] = 1.0;
            *row = self.tangent(e);
        }
        out
    }
}

fn residual4(points: &[ConePoint]) -> [f64; 4] {
    let mut r = [1.0, 0.0, 0.0, 0.0];
    for p in points {
        let u = p.vec4();
        for i in 0..4 {
            r[i] -= u[i];
        }
    }
    r
}

fn max_abs4(v: &[f64; 4]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Projects parameters onto the POM constraint set.
///
/// Each round takes the minimum-norm correction of the element 4-vectors
/// `(w_k, w_k n_k)` within their cone tangent spaces that cancels the
/// residual of `sum_k (w_k, w_k n_k) = (1, 0, 0, 0)`, then projects back onto
/// the cone. When the tangent spaces do not span, the correction is spread
/// uniformly instead. Returns [`Error::RepairFailed`] if the residual is still
/// above `TOL.feasibility` after 100 rounds.
pub fn repair(p: &ParamPom) -> Result<ParamPom> {
    let n = p.n();
    if n == 0 {
        return Err(Error::RepairFailed(1.0));
    }
    let canonical_angles = p.colatitudes.iter().all(|t| (0.0..=PI).contains(t));
    if canonical_angles && p.weights_in_range().is_ok() && p.max_residual() <= REPAIR_TARGET {
        return Ok(p.clone());
    }

    let mut weights: Vec<f64> = p
        .weights
        .iter()
        .map(|w| if w.is_finite() { w.max(0.0) } else { 0.0 })
        .collect();
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        weights.iter_mut().for_each(|w| *w /= total);
    } else {
        weights.iter_mut().for_each(|w| *w = 1.0 / n as f64);
    }
    let mut points: Vec<ConePoint> = (0..n)
        .map(|k| {
            let d = p.direction(k);
            ConePoint {
                t: weights[k],
                dir: [d.x, d.y, d.z],
            }
        })
        .collect();

    let mut residual = residual4(&points);
    for _ in 0..REPAIR_ROUNDS {
        if max_abs4(&residual) <= REPAIR_TARGET {
            break;
        }
        let mut gram = [[0.0; 4]; 4];
        for pt in &points {
            let proj = pt.tangent_projector();
            for i in 0..4 {
                for j in 0..4 {
                    gram[i][j] += proj[i][j];
                }
            }
        }
        match solve4(gram, residual) {
            Some(lambda) => {
                for pt in points.iter_mut() {
                    let du = pt.tangent(lambda);
                    let u = pt.vec4();
                    *pt = ConePoint::project(std::array::from_fn(|i| u[i] + du[i]), pt.dir);
                }
            }
            None => {
                for pt in points.iter_mut() {
                    let u = pt.vec4();
                    let shifted = std::array::from_fn(|i| u[i] + residual[i] / n as f64);
                    *pt = ConePoint::project(shifted, pt.dir);
                }
            }
        }
        residual = residual4(&points);
    }

    let worst = max_abs4(&residual);
    if !(worst <= TOL.feasibility) {
        return Err(Error::RepairFailed(worst));
    }

    let mut out = p.clone();
    for (k, pt) in points.iter().enumerate() {
        let [x, y, z] = pt.dir;
        let rho = x.hypot(y);
        out.weights[k] = pt.t.min(1.0);
        out.colatitudes[k] = rho.atan2(z);
        out.longitudes[k] = if rho > 1e-15 {
            y.atan2(x)
        } else {
            p.longitudes[k]
        };
    }
    Ok(out)
}
