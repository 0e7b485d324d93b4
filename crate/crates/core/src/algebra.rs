//! Complex and quaternion arithmetic.
//!
//! A quaternion is stored in symplectic form `q = z0 + z1 j` with two complex
//! numbers `z0 = w + x i` and `z1 = y + z i`. Every wave-function identity in
//! this crate is written in that basis, so keeping it as the storage layout
//! means the coupled equations can be read off the code directly.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub use num_complex::Complex64 as Complex;

/// The imaginary unit `i` as a complex number.
pub const I: Complex = Complex::new(0.0, 1.0);

/// Quaternion `z0 + z1 j`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub z0: Complex,
    pub z1: Complex,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::from_parts(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::from_parts(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::from_parts(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::from_parts(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::from_parts(0.0, 0.0, 0.0, 1.0);

    /// Builds `w + x i + y j + z k`.
    pub const fn from_parts(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self {
            z0: Complex::new(w, x),
            z1: Complex::new(y, z),
        }
    }

    pub const fn new(z0: Complex, z1: Complex) -> Self {
        Self { z0, z1 }
    }

    pub const fn real(r: f64) -> Self {
        Self::from_parts(r, 0.0, 0.0, 0.0)
    }

    /// Embeds a complex number as `z + 0 j`.
    pub const fn from_complex(z: Complex) -> Self {
        Self {
            z0: z,
            z1: Complex::new(0.0, 0.0),
        }
    }

    /// Real components `[w, x, y, z]`.
    pub fn parts(&self) -> [f64; 4] {
        [self.z0.re, self.z0.im, self.z1.re, self.z1.im]
    }

    pub fn w(&self) -> f64 {
        self.z0.re
    }

    pub fn x(&self) -> f64 {
        self.z0.im
    }

    pub fn y(&self) -> f64 {
        self.z1.re
    }

    pub fn z(&self) -> f64 {
        self.z1.im
    }

    /// Quaternionic conjugate: negates the `i`, `j` and `k` parts.
    pub fn conj(&self) -> Self {
        Self {
            z0: self.z0.conj(),
            z1: -self.z1,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.z0.norm_sqr() + self.z1.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.z0.norm().hypot(self.z1.norm())
    }

    /// Magnitude of the `i`, `j`, `k` part.
    pub fn imag_norm(&self) -> f64 {
        self.z0.im.hypot(self.z1.norm())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            z0: self.z0 * s,
            z1: self.z1 * s,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.z0.is_finite() && self.z1.is_finite()
    }
}

/// Hamilton product in symplectic form:
/// `(a + b j)(c + d j) = (a c - b conj(d)) + (a d + b conj(c)) j`.
pub fn qmul(p: Quaternion, q: Quaternion) -> Quaternion {
    Quaternion {
        z0: p.z0 * q.z0 - p.z1 * q.z1.conj(),
        z1: p.z0 * q.z1 + p.z1 * q.z0.conj(),
    }
}

pub fn qconj(q: Quaternion) -> Quaternion {
    q.conj()
}

pub fn symplectic_split(q: Quaternion) -> (Complex, Complex) {
    (q.z0, q.z1)
}

pub fn symplectic_join(z0: Complex, z1: Complex) -> Quaternion {
    Quaternion { z0, z1 }
}

/// `i q`.
pub fn left_i_mul(q: Quaternion) -> Quaternion {
    Quaternion {
        z0: I * q.z0,
        z1: I * q.z1,
    }
}

/// `q i`. Differs from [`left_i_mul`] in the sign of the `j` slot because
/// `j i = -i j`.
pub fn right_i_mul(q: Quaternion) -> Quaternion {
    Quaternion {
        z0: q.z0 * I,
        z1: -(I * q.z1),
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, rhs: Quaternion) -> Quaternion {
        qmul(self, rhs)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;

    fn mul(self, rhs: f64) -> Quaternion {
        self.scale(rhs)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;

    fn add(self, rhs: Quaternion) -> Quaternion {
        Quaternion {
            z0: self.z0 + rhs.z0,
            z1: self.z1 + rhs.z1,
        }
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;

    fn sub(self, rhs: Quaternion) -> Quaternion {
        Quaternion {
            z0: self.z0 - rhs.z0,
            z1: self.z1 - rhs.z1,
        }
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    fn neg(self) -> Quaternion {
        Quaternion {
            z0: -self.z0,
            z1: -self.z1,
        }
    }
}

impl From<Complex> for Quaternion {
    fn from(z: Complex) -> Self {
        Quaternion::from_complex(z)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [w, x, y, z] = self.parts();
        write!(f, "{w} {x:+}i {y:+}j {z:+}k")
    }
}

/// Hamilton product on four real components, kept separate from the
/// symplectic route so the two can be cross-checked.
pub fn hamilton_product_parts(p: [f64; 4], q: [f64; 4]) -> [f64; 4] {
    let [a1, b1, c1, d1] = p;
    let [a2, b2, c2, d2] = q;
    [
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ]
}
