//! Autonomous (free) particles in the real Hilbert space formulation of
//! quaternionic quantum mechanics.
//!
//! The crate covers the complex particle under a constant complex potential,
//! the left and right quaternionic wave equations under a constant
//! quaternionic potential, one-dimensional step scattering, and a set of
//! numerical oracles (finite differences, Runge-Kutta evolution, brute-force
//! 2x2 eigen-solving and quadrature of the symmetrised expectation value)
//! that check every closed form independently.
//!
//! Units default to `hbar = m = 1`; see [`PhysicalConstants`].

pub mod algebra;
pub mod complex_particle;
pub mod error;
pub mod oracle;
pub mod quaternionic_left;
pub mod quaternionic_right;
pub mod scattering;
pub mod sweep;
pub mod wave;

use std::fmt;

pub use algebra::{Complex, Quaternion};
pub use complex_particle::{
    ComplexEnergy, ComplexPotential, Domain, Expectations, PhysicalConstants, PlaneWave, WaveVectorPair,
};
pub use error::{Result, SolveError};
pub use quaternionic_left::QuaternionicPotential;

/// A `+1` / `-1` choice: branch of a closed form, root sign, or direction of
/// propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// Parses `1`, `+1` or `-1` (as read from configuration files).
    pub fn from_f64(v: f64) -> Option<Sign> {
        if v == 1.0 {
            Some(Sign::Plus)
        } else if v == -1.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => f.write_str("+1"),
            Sign::Minus => f.write_str("-1"),
        }
    }
}
