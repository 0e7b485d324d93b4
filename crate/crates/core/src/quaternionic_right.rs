//! Right quaternionic wave equation `hbar (dPsi/dt) i = H Psi`.
//!
//! Since `j i = -i j`, the `j` component picks up a sign on its time
//! derivative:
//!
//! ```text
//!  i hbar dpsi0/dt = -hbar^2/2m lap psi0 + U0 psi0 - U1 conj(psi1)
//! -i hbar dpsi1/dt = -hbar^2/2m lap psi1 + U0 psi1 + U1 conj(psi0)
//! ```
//!
//! For plane waves the characteristic polynomial has the imaginary part
//! `[V0 - E1 - Re l] (E0 - Im l)` with `l = hbar^2 K.K/2m`. Self-interaction
//! needs `E0 != Im l`, which forces `Re l = V0 - E1` and
//! `Im l = E0 +/- sqrt(V1^2 + |U1|^2)`. A state with `K0 = 0` and `E0 = 0`
//! then cannot carry self-interaction.

use crate::algebra::Complex;
use crate::complex_particle::{i_times, magnitudes_from_kinetic, ComplexEnergy, PhysicalConstants, WaveVectorPair};
use crate::error::{Result, SolveError};
use crate::quaternionic_left::{coupled_rhs, QuaternionicPotential};
use crate::Sign;

/// Values of `i hbar dpsi0/dt` and `i hbar dpsi1/dt` under the right
/// equation. The Hamiltonian action is shared with the left equation; only
/// the sign of the second slot differs.
pub fn coupled_rhs_right(
    psi0: Complex,
    psi1: Complex,
    lap0: Complex,
    lap1: Complex,
    u: &QuaternionicPotential,
    pc: PhysicalConstants,
) -> (Complex, Complex) {
    let (h0, h1) = coupled_rhs(psi0, psi1, lap0, lap1, u, pc);
    (h0, -h1)
}

/// The 2x2 matrix acting on `(A0, conj(A1))` for the right equation.
pub fn right_matrix(u: &QuaternionicPotential, e: ComplexEnergy) -> [[Complex; 2]; 2] {
    let ie = i_times(e);
    [[u.u0 + ie, -u.u1], [u.u1.conj(), u.u0.conj() + ie]]
}

/// Real and imaginary parts of the characteristic polynomial, as
///
/// ```text
/// [V0 - E1 - Re l]^2 + V1^2 - (E0 - Im l)^2 + |U1|^2
/// [V0 - E1 - Re l] (E0 - Im l)
/// ```
pub fn right_char_residual(
    k_dot_k: Complex,
    u: &QuaternionicPotential,
    e: ComplexEnergy,
    pc: PhysicalConstants,
) -> (f64, f64) {
    let l = k_dot_k * pc.kinetic_factor();
    let p = u.v0() - e.e1 - l.re;
    let q = e.e0 - l.im;
    (p * p + u.v1() * u.v1() - q * q + u.u1.norm_sqr(), p * q)
}

/// Plane-wave solution of the right equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RightSolution {
    pub k: WaveVectorPair,
    pub root_sign: Sign,
    /// `hbar^2 K.K / 2m`.
    pub kinetic: Complex,
    pub self_interaction_feasible: bool,
}

/// `hbar^2 K.K / 2m = (V0 - E1) + i (E0 + s sqrt(V1^2 + |U1|^2))`.
pub fn right_kinetic(u: &QuaternionicPotential, e: ComplexEnergy, root_sign: Sign) -> Complex {
    let root = u.v1().hypot(u.u1.norm());
    Complex::new(u.v0() - e.e1, e.e0 + root_sign.as_f64() * root)
}

pub fn solve_right(
    u: &QuaternionicPotential,
    e: ComplexEnergy,
    cos_omega0: f64,
    root_sign: Sign,
    pc: PhysicalConstants,
) -> Result<RightSolution> {
    let kinetic = right_kinetic(u, e, root_sign);
    let (k0, k1) = magnitudes_from_kinetic(kinetic, cos_omega0, pc).map_err(|err| match err {
        SolveError::OrientationMismatch { required, cos_omega0 } => SolveError::BranchInfeasible {
            branch: root_sign,
            reason: format!("needs hbar^2 K0.K1/m = {required:.6e} but cos(Omega0) = {cos_omega0}"),
        },
        other => other,
    })?;
    let k = WaveVectorPair::new(k0, k1, cos_omega0);
    Ok(RightSolution {
        k,
        root_sign,
        kinetic,
        self_interaction_feasible: self_interaction_feasible(&k, e, pc),
    })
}

/// One-dimensional solve with `cos(Omega0) = +/-1` aligned to the root.
pub fn solve_right_1d(
    u: &QuaternionicPotential,
    e: ComplexEnergy,
    root_sign: Sign,
    pc: PhysicalConstants,
) -> Result<RightSolution> {
    let kin = right_kinetic(u, e, root_sign);
    solve_right(u, e, crate::complex_particle::aligned_cos_omega(kin.im), root_sign, pc)
}

/// Relative tolerance for `E0 - hbar^2 K0.K1 / m` to count as zero.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// True iff `E0 - hbar^2 K0.K1 / m != 0`. In particular a stationary state
/// (`K0 = 0`, `E0 = 0`) is never compatible with self-interaction.
pub fn self_interaction_feasible(k: &WaveVectorPair, e: ComplexEnergy, pc: PhysicalConstants) -> bool {
    let coupling = pc.hbar() * pc.hbar() / pc.mass() * k.dot();
    let gap = e.e0 - coupling;
    let scale = 1.0f64.max(e.e0.abs()).max(coupling.abs());
    gap.abs() > FEASIBILITY_TOL * scale
}
