//! Quaternionic plane waves `Psi = psi0 + psi1 j` whose components are
//! complex exponentials `c exp[k x - e t / hbar]`.

use crate::algebra::{Complex, Quaternion};
use crate::complex_particle::{PhysicalConstants, PlaneWave};

/// `amplitude * exp[k x - energy t / hbar]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentWave {
    pub amplitude: Complex,
    pub k: Complex,
    pub energy: Complex,
}

impl ComponentWave {
    pub const ZERO: ComponentWave = ComponentWave {
        amplitude: Complex::new(0.0, 0.0),
        k: Complex::new(0.0, 0.0),
        energy: Complex::new(0.0, 0.0),
    };

    pub fn new(amplitude: Complex, k: Complex, energy: Complex) -> Self {
        Self { amplitude, k, energy }
    }

    pub fn from_plane_wave(pw: &PlaneWave) -> Self {
        Self::new(pw.amplitude, pw.k.signed_k(), pw.energy.as_complex())
    }

    pub fn value(&self, x: f64, t: f64, pc: PhysicalConstants) -> Complex {
        if self.amplitude == Complex::new(0.0, 0.0) {
            return self.amplitude;
        }
        self.amplitude * (self.k * x - self.energy * (t / pc.hbar())).exp()
    }

    /// `d/dt` of [`Self::value`].
    pub fn time_derivative(&self, x: f64, t: f64, pc: PhysicalConstants) -> Complex {
        -self.energy / pc.hbar() * self.value(x, t, pc)
    }

    pub fn laplacian(&self, x: f64, t: f64, pc: PhysicalConstants) -> Complex {
        self.k * self.k * self.value(x, t, pc)
    }
}

/// Two complex components assembled as `psi0 + psi1 j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuaternionicWave {
    pub c0: ComponentWave,
    pub c1: ComponentWave,
}

impl QuaternionicWave {
    pub fn new(c0: ComponentWave, c1: ComponentWave) -> Self {
        Self { c0, c1 }
    }

    pub fn complex(pw: &PlaneWave) -> Self {
        Self::new(ComponentWave::from_plane_wave(pw), ComponentWave::ZERO)
    }

    /// Self-interacting form: `psi0 = A0 exp[K x - E t/hbar]`,
    /// `psi1 = A1 exp[conj(K) x - conj(E) t/hbar]`.
    pub fn conjugate_pair(a0: Complex, a1: Complex, k: Complex, energy: Complex) -> Self {
        Self::new(
            ComponentWave::new(a0, k, energy),
            ComponentWave::new(a1, k.conj(), energy.conj()),
        )
    }

    pub fn components(&self, x: f64, t: f64, pc: PhysicalConstants) -> (Complex, Complex) {
        (self.c0.value(x, t, pc), self.c1.value(x, t, pc))
    }

    pub fn value(&self, x: f64, t: f64, pc: PhysicalConstants) -> Quaternion {
        let (a, b) = self.components(x, t, pc);
        Quaternion::new(a, b)
    }

    pub fn time_derivative(&self, x: f64, t: f64, pc: PhysicalConstants) -> (Complex, Complex) {
        (self.c0.time_derivative(x, t, pc), self.c1.time_derivative(x, t, pc))
    }

    pub fn laplacian(&self, x: f64, t: f64, pc: PhysicalConstants) -> (Complex, Complex) {
        (self.c0.laplacian(x, t, pc), self.c1.laplacian(x, t, pc))
    }

    /// Same wave with every `k` scaled by `factor`, for negative controls.
    pub fn with_k_scaled(&self, factor: f64) -> Self {
        let mut out = *self;
        out.c0.k *= factor;
        out.c1.k *= factor;
        out
    }
}
