//! Single-qubit primitives: pure states with a fixed global phase, 2x2
//! Hermitian operators, the Bloch-sphere map and a closed-form eigensolver.
//!
//! The computational basis is `{|+>, |->}` with `|+> = (1, 0)^T`. A pure
//! state is stored as the amplitude pair `(amp_plus, amp_minus)` with the
//! global phase chosen so that the first component of modulus above
//! [`TOL.phase_cutoff`](crate::tolerance::Tolerances::phase_cutoff) is real
//! and non-negative. Two states describing the same ray therefore compare
//! equal up to rounding.

use std::f64::consts::PI;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::TOL;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `exp(2 pi i k / n)`, exact at multiples of a quarter turn.
pub fn root_of_unity(k: usize, n: usize) -> Complex64 {
    debug_assert!(n > 0);
    let k = k % n;
    if (4 * k).is_multiple_of(n) {
        return match 4 * k / n {
            0 => ONE,
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

/// A normalized single-qubit pure state in canonical phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureQubit {
    plus: Complex64,
    minus: Complex64,
}

impl PureQubit {
    /// The basis state `|+>`.
    pub const PLUS: PureQubit = PureQubit {
        plus: ONE,
        minus: ZERO,
    };
    /// The basis state `|->`.
    pub const MINUS: PureQubit = PureQubit {
        plus: ZERO,
        minus: ONE,
    };

    /// Builds a state from amplitudes that are already normalized within
    /// `TOL.state_norm`. The result is rescaled to unit norm and put in
    /// canonical phase.
    pub fn new(amp_plus: Complex64, amp_minus: Complex64) -> Result<Self> {
        let norm_sqr = amp_plus.norm_sqr() + amp_minus.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > TOL.state_norm {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(Self::canonical(amp_plus, amp_minus, norm_sqr))
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn normalized(amp_plus: Complex64, amp_minus: Complex64) -> Result<Self> {
        let norm_sqr = amp_plus.norm_sqr() + amp_minus.norm_sqr();
        if !norm_sqr.is_finite() || norm_sqr <= f64::MIN_POSITIVE {
            return Err(Error::ZeroVector);
        }
        Ok(Self::canonical(amp_plus, amp_minus, norm_sqr))
    }

    fn canonical(plus: Complex64, minus: Complex64, norm_sqr: f64) -> Self {
        // Rescaling an already-unit vector would only perturb the last bits,
        // which breaks exact round trips through serialized states.
        let scale = if (norm_sqr - 1.0).abs() <= 4.0 * f64::EPSILON {
            1.0
        } else {
            norm_sqr.sqrt().recip()
        };
        let (plus, minus) = (plus * scale, minus * scale);
        let r = plus.norm();
        if r > TOL.phase_cutoff {
            let rot = plus.conj() / r;
            PureQubit {
                plus: Complex64::new(r, 0.0),
                minus: minus * rot,
            }
        } else {
            let r = minus.norm();
            let rot = minus.conj() / r;
            PureQubit {
                plus: plus * rot,
                minus: Complex64::new(r, 0.0),
            }
        }
    }

    pub fn amp_plus(&self) -> Complex64 {
        self.plus
    }

    pub fn amp_minus(&self) -> Complex64 {
        self.minus
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureQubit) -> Complex64 {
        self.plus.conj() * other.plus + self.minus.conj() * other.minus
    }

    /// The orthogonal state, up to phase.
    pub fn orthogonal(&self) -> PureQubit {
        Self::canonical(-self.minus.conj(), self.plus.conj(), 1.0)
    }

    /// Multiplies the `|->` amplitude by `phase` (a unit complex number)
    /// and restores canonical phase.
    pub fn with_minus_phase(&self, phase: Complex64) -> PureQubit {
        Self::canonical(self.plus, self.minus * phase, 1.0)
    }

    /// Bloch polar angle in `[0, pi]`.
    pub fn colatitude(&self) -> f64 {
        2.0 * self.minus.norm().atan2(self.plus.norm())
    }

    /// Bloch azimuth in `(-pi, pi]`; zero at the poles.
    pub fn longitude(&self) -> f64 {
        let c = self.plus.conj() * self.minus;
        if c.norm() <= TOL.phase_cutoff {
            0.0
        } else {
            c.arg()
        }
    }

    /// Largest componentwise distance between two states in canonical phase.
    pub fn distance(&self, other: &PureQubit) -> f64 {
        (self.plus - other.plus)
            .norm()
            .max((self.minus - other.minus).norm())
    }
}

impl fmt::Display for PureQubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:.6}{:+.6}i)|+> + ({:.6}{:+.6}i)|->",
            self.plus.re, self.plus.im, self.minus.re, self.minus.im
        )
    }
}

/// `cos(colatitude/2)|+> + exp(i longitude) sin(colatitude/2)|->`.
pub fn make_qubit(colatitude: f64, longitude: f64) -> Result<PureQubit> {
    if !(0.0..=PI).contains(&colatitude) {
        return Err(Error::Colatitude(colatitude));
    }
    let half = 0.5 * colatitude;
    Ok(PureQubit::canonical(
        Complex64::new(half.cos(), 0.0),
        Complex64::from_polar(half.sin(), longitude),
        1.0,
    ))
}

/// `|<a|b>|^2`.
pub fn overlap_prob(a: &PureQubit, b: &PureQubit) -> f64 {
    a.inner(b).norm_sqr().min(1.0)
}

/// Cartesian Bloch coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        BlochVector { x, y, z }
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Angle between two directions, in radians.
    pub fn angle_to(&self, other: &BlochVector) -> f64 {
        let n = self.norm() * other.norm();
        if n == 0.0 {
            return 0.0;
        }
        // atan2 of |cross| and dot stays accurate for nearly parallel vectors.
        let cx = self.y * other.z - self.z * other.y;
        let cy = self.z * other.x - self.x * other.z;
        let cz = self.x * other.y - self.y * other.x;
        (cx * cx + cy * cy + cz * cz).sqrt().atan2(self.dot(other))
    }
}

/// Bloch vector of a pure state; `|+>` maps to the north pole.
pub fn bloch_vector(s: &PureQubit) -> BlochVector {
    let c = s.plus.conj() * s.minus;
    BlochVector {
        x: 2.0 * c.re,
        y: 2.0 * c.im,
        z: s.plus.norm_sqr() - s.minus.norm_sqr(),
    }
}

/// A 2x2 complex Hermitian matrix `[[a, b], [conj(b), d]]` in the
/// `{|+>, |->}` basis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Hermitian2 {
    pub a: f64,
    pub d: f64,
    pub b: Complex64,
}

type Mat2 = [[Complex64; 2]; 2];

fn matmul(l: &Mat2, r: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = l[i][0] * r[0][j] + l[i][1] * r[1][j];
        }
    }
    out
}

impl Hermitian2 {
    pub const ZERO: Hermitian2 = Hermitian2 {
        a: 0.0,
        d: 0.0,
        b: ZERO,
    };
    pub const IDENTITY: Hermitian2 = Hermitian2 {
        a: 1.0,
        d: 1.0,
        b: ZERO,
    };

    pub fn new(a: f64, d: f64, b: Complex64) -> Self {
        Hermitian2 { a, d, b }
    }

    /// `|s><s|`.
    pub fn projector(s: &PureQubit) -> Self {
        Hermitian2 {
            a: s.plus.norm_sqr(),
            d: s.minus.norm_sqr(),
            b: s.plus * s.minus.conj(),
        }
    }

    /// `t I + v . sigma`.
    pub fn from_bloch(t: f64, v: &BlochVector) -> Self {
        Hermitian2 {
            a: t + v.z,
            d: t - v.z,
            b: Complex64::new(v.x, -v.y),
        }
    }

    /// Decomposes into `(t, v)` with `self = t I + v . sigma`.
    pub fn bloch_parts(&self) -> (f64, BlochVector) {
        (
            0.5 * (self.a + self.d),
            BlochVector {
                x: self.b.re,
                y: -self.b.im,
                z: 0.5 * (self.a - self.d),
            },
        )
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b.norm_sqr()
    }

    /// `<s|self|s>`.
    pub fn expectation(&self, s: &PureQubit) -> f64 {
        self.a * s.plus.norm_sqr()
            + self.d * s.minus.norm_sqr()
            + 2.0 * (s.plus.conj() * self.b * s.minus).re
    }

    /// `self * inner * self`.
    pub fn sandwich(&self, inner: &Hermitian2) -> Hermitian2 {
        let m = matmul(&matmul(&self.to_mat(), &inner.to_mat()), &self.to_mat());
        Hermitian2 {
            a: m[0][0].re,
            d: m[1][1].re,
            b: 0.5 * (m[0][1] + m[1][0].conj()),
        }
    }

    fn to_mat(self) -> Mat2 {
        [
            [Complex64::new(self.a, 0.0), self.b],
            [self.b.conj(), Complex64::new(self.d, 0.0)],
        ]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.a.abs().max(self.d.abs()).max(self.b.norm())
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.a + self.d);
        let r = (0.5 * (self.a - self.d)).hypot(self.b.norm());
        // The root of larger magnitude is computed directly and the other
        // from the determinant, so a small eigenvalue keeps full precision.
        if mean >= 0.0 {
            let hi = mean + r;
            (hi, if hi > 0.0 { self.det() / hi } else { mean - r })
        } else {
            let lo = mean - r;
            (self.det() / lo, lo)
        }
    }

    /// Both eigenvalues are at least `-TOL.psd`.
    pub fn is_psd(&self) -> bool {
        self.eigenvalues().1 >= -TOL.psd
    }

    pub fn eig(&self) -> [Eigenpair; 2] {
        hermitian_eig2(self)
    }
}

impl Add for Hermitian2 {
    type Output = Hermitian2;
    fn add(self, rhs: Hermitian2) -> Hermitian2 {
        Hermitian2 {
            a: self.a + rhs.a,
            d: self.d + rhs.d,
            b: self.b + rhs.b,
        }
    }
}

impl Sub for Hermitian2 {
    type Output = Hermitian2;
    fn sub(self, rhs: Hermitian2) -> Hermitian2 {
        Hermitian2 {
            a: self.a - rhs.a,
            d: self.d - rhs.d,
            b: self.b - rhs.b,
        }
    }
}

impl Mul<Hermitian2> for f64 {
    type Output = Hermitian2;
    fn mul(self, rhs: Hermitian2) -> Hermitian2 {
        Hermitian2 {
            a: self * rhs.a,
            d: self * rhs.d,
            b: rhs.b * self,
        }
    }
}

impl Sum for Hermitian2 {
    fn sum<I: Iterator<Item = Hermitian2>>(iter: I) -> Hermitian2 {
        iter.fold(Hermitian2::ZERO, |acc, h| acc + h)
    }
}

impl<'a> Sum<&'a Hermitian2> for Hermitian2 {
    fn sum<I: Iterator<Item = &'a Hermitian2>>(iter: I) -> Hermitian2 {
        iter.fold(Hermitian2::ZERO, |acc, h| acc + *h)
    }
}

/// An eigenvalue with its normalized eigenvector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: PureQubit,
}

/// Closed-form eigendecomposition, largest eigenvalue first.
///
/// When the two eigenvalues are within `TOL.eigen_degeneracy` the matrix is a
/// multiple of the identity and the pair `(|+>, |->)` is returned.
pub fn hermitian_eig2(h: &Hermitian2) -> [Eigenpair; 2] {
    let half_gap = 0.5 * (h.a - h.d);
    let r = half_gap.hypot(h.b.norm());
    let (hi, lo) = h.eigenvalues();
    if 2.0 * r <= TOL.eigen_degeneracy {
        return [
            Eigenpair {
                value: hi,
                vector: PureQubit::PLUS,
            },
            Eigenpair {
                value: lo,
                vector: PureQubit::MINUS,
            },
        ];
    }
    // (H - lo) has the top eigenvector in its range; pick the column with
    // the larger norm. Column 0 is (half_gap + r, conj b), column 1 is
    // (b, r - half_gap).
    let top = if half_gap >= 0.0 {
        PureQubit::canonical(
            Complex64::new(half_gap + r, 0.0),
            h.b.conj(),
            (half_gap + r).powi(2) + h.b.norm_sqr(),
        )
    } else {
        PureQubit::canonical(
            h.b,
            Complex64::new(r - half_gap, 0.0),
            (r - half_gap).powi(2) + h.b.norm_sqr(),
        )
    };
    [
        Eigenpair {
            value: hi,
            vector: top,
        },
        Eigenpair {
            value: lo,
            vector: top.orthogonal(),
        },
    ]
}
