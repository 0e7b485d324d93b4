//! Left quaternionic wave equation `i hbar dPsi/dt = H Psi` with
//! `H = -hbar^2/2m lap + U` and a constant potential `U = U0 + U1 j`.
//!
//! Writing `Psi = psi0 + psi1 j` splits the equation into
//!
//! ```text
//! i hbar dpsi0/dt = -hbar^2/2m lap psi0 + U0 psi0 - U1 conj(psi1)
//! i hbar dpsi1/dt = -hbar^2/2m lap psi1 + U0 psi1 + U1 conj(psi0)
//! ```
//!
//! With `U1 = 0` the components are independent complex particles. With
//! `U1 != 0` the separated solution is `psi0 = A0 exp[K x - E t/hbar]`,
//! `psi1 = A1 exp[conj(K) x - conj(E) t/hbar]`, and `(A0, conj(A1))` is an
//! eigenvector of
//!
//! ```text
//! | U0 + iE        -U1       |
//! | conj(U1)   conj(U0) - iE |
//! ```
//!
//! with eigenvalue `hbar^2 K.K / 2m`.
//!
//! Branch labels follow the sign in front of `sqrt((sqrt(alpha^2+beta^2) - alpha)/2)`
//! in `Re(hbar^2 K.K/2m) = V0 +/- ...`. The inner term for `K0.K1` is divided
//! by `cos(Omega0)^2`, the same way as in the complex dispersion; dividing by
//! `cos(Omega0)` alone would break the eigenvalue relation whenever
//! `|cos(Omega0)| != 1`.

use crate::algebra::{qmul, Complex, Quaternion};
use crate::complex_particle::{
    self, density_integral, i_times, is_zero, magnitudes_from_kinetic, ComplexEnergy, ComplexPotential, Domain,
    Expectations, PhysicalConstants, PlaneWave, StationarityFailure, WaveVectorPair,
};
use crate::error::{Result, SolveError};
use crate::wave::{ComponentWave, QuaternionicWave};
use crate::Sign;

/// `U = U0 + U1 j` with `U0 = V0 + V1 i` and `U1 = W0 + W1 i`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuaternionicPotential {
    pub u0: Complex,
    pub u1: Complex,
}

impl QuaternionicPotential {
    pub fn new(v0: f64, v1: f64, w0: f64, w1: f64) -> Self {
        Self {
            u0: Complex::new(v0, v1),
            u1: Complex::new(w0, w1),
        }
    }

    pub fn from_complex(pot: ComplexPotential) -> Self {
        Self::new(pot.v0, pot.v1, 0.0, 0.0)
    }

    pub fn v0(&self) -> f64 {
        self.u0.re
    }

    pub fn v1(&self) -> f64 {
        self.u0.im
    }

    pub fn w0(&self) -> f64 {
        self.u1.re
    }

    pub fn w1(&self) -> f64 {
        self.u1.im
    }

    /// The complex part `U0` as a [`ComplexPotential`].
    pub fn complex_part(&self) -> ComplexPotential {
        ComplexPotential::new(self.v0(), self.v1())
    }

    pub fn is_self_interacting(&self) -> bool {
        self.u1 != Complex::new(0.0, 0.0)
    }

    pub fn as_quaternion(&self) -> Quaternion {
        Quaternion::new(self.u0, self.u1)
    }
}

/// Right-hand side of the left equation for each component, i.e. the values
/// of `i hbar dpsi0/dt` and `i hbar dpsi1/dt`, given the fields and their
/// Laplacians. The potential term is the quaternion product `U Psi`.
pub fn coupled_rhs(
    psi0: Complex,
    psi1: Complex,
    lap0: Complex,
    lap1: Complex,
    u: &QuaternionicPotential,
    pc: PhysicalConstants,
) -> (Complex, Complex) {
    let up = qmul(u.as_quaternion(), Quaternion::new(psi0, psi1));
    let kin = pc.kinetic_factor();
    (up.z0 - lap0 * kin, up.z1 - lap1 * kin)
}

/// Independent complex modes `psi0` (energy `E`) and `psi1` (energy `Ecal`)
/// under a complex potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonInteractingMode {
    pub mode0: PlaneWave,
    pub mode1: PlaneWave,
}

impl NonInteractingMode {
    pub fn with_amplitudes(mut self, a: Complex, a_cal: Complex) -> Self {
        self.mode0.amplitude = a;
        self.mode1.amplitude = a_cal;
        self
    }

    pub fn wave(&self) -> QuaternionicWave {
        QuaternionicWave::new(
            ComponentWave::from_plane_wave(&self.mode0),
            ComponentWave::from_plane_wave(&self.mode1),
        )
    }
}

/// Tolerance on the mode constraints, relative to the energy scale.
pub const CONSTRAINT_TOL: f64 = 1e-10;

/// Residuals of the constraints tying both modes to the same `(V0, V1)`:
/// `[E1 - hbar^2 (K1^2 - K0^2)/2m - V0` for each mode, then
/// `hbar^2 K0.K1 / m - E0 - V1` for each mode`]`.
pub fn noninteracting_constraints(mode: &NonInteractingMode, pot: ComplexPotential, pc: PhysicalConstants) -> [f64; 4] {
    let kin = pc.kinetic_factor();
    let real = |pw: &PlaneWave| pw.energy.e1 - kin * (pw.k.k1 * pw.k.k1 - pw.k.k0 * pw.k.k0) - pot.v0;
    let imag = |pw: &PlaneWave| 2.0 * kin * pw.k.dot() - pw.energy.e0 - pot.v1;
    [
        real(&mode.mode0),
        real(&mode.mode1),
        imag(&mode.mode0),
        imag(&mode.mode1),
    ]
}

fn energy_scale(values: &[f64]) -> f64 {
    values.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

/// Verifies the mode constraints, returning the largest residual.
pub fn check_noninteracting(mode: &NonInteractingMode, pot: ComplexPotential, pc: PhysicalConstants) -> Result<f64> {
    let r = noninteracting_constraints(mode, pot, pc);
    let scale = energy_scale(&[
        pot.v0,
        pot.v1,
        mode.mode0.energy.e0,
        mode.mode0.energy.e1,
        mode.mode1.energy.e0,
        mode.mode1.energy.e1,
    ]);
    let worst = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if worst > CONSTRAINT_TOL * scale {
        return Err(SolveError::ConstraintViolation { residual: worst });
    }
    Ok(worst)
}

/// Solves both modes with a shared `cos(Omega0)`; amplitudes default to 1.
pub fn solve_noninteracting(
    pot: ComplexPotential,
    e: ComplexEnergy,
    e_cal: ComplexEnergy,
    cos_omega0: f64,
    pc: PhysicalConstants,
) -> Result<NonInteractingMode> {
    let one = Complex::new(1.0, 0.0);
    let k = complex_particle::solve_dispersion(pot, e, cos_omega0, pc)?;
    let k_cal = complex_particle::solve_dispersion(pot, e_cal, cos_omega0, pc)?;
    let mode = NonInteractingMode {
        mode0: PlaneWave::new(one, k, e),
        mode1: PlaneWave::new(one, k_cal, e_cal),
    };
    check_noninteracting(&mode, pot, pc)?;
    Ok(mode)
}

/// As [`solve_noninteracting`] but each mode picks its own one-dimensional
/// orientation.
pub fn solve_noninteracting_1d(
    pot: ComplexPotential,
    e: ComplexEnergy,
    e_cal: ComplexEnergy,
    pc: PhysicalConstants,
) -> Result<NonInteractingMode> {
    let one = Complex::new(1.0, 0.0);
    let mode = NonInteractingMode {
        mode0: PlaneWave::new(one, complex_particle::solve_dispersion_1d(pot, e, pc)?, e),
        mode1: PlaneWave::new(one, complex_particle::solve_dispersion_1d(pot, e_cal, pc)?, e_cal),
    };
    check_noninteracting(&mode, pot, pc)?;
    Ok(mode)
}

/// Sum of the two single-mode expectation records.
pub fn expectations_noninteracting(
    mode: &NonInteractingMode,
    pot: ComplexPotential,
    domain: Domain,
    t: f64,
    pc: PhysicalConstants,
) -> Expectations {
    let a = complex_particle::expectations(&mode.mode0, pot, domain, t, pc);
    let b = complex_particle::expectations(&mode.mode1, pot, domain, t, pc);
    a.sum(&b)
}

/// `alpha = (E0 + V1)^2 - E1^2 + |U1|^2`, `beta = 2 E1 (E0 + V1)`.
pub fn alpha_beta(e: ComplexEnergy, v1: f64, u1: Complex) -> (f64, f64) {
    let c = e.e0 + v1;
    (c * c - e.e1 * e.e1 + u1.norm_sqr(), 2.0 * e.e1 * c)
}

/// `((sqrt(alpha^2+beta^2) - alpha)/2, (sqrt(alpha^2+beta^2) + alpha)/2)`,
/// evaluated so that neither half cancels: the larger one is formed
/// directly and the smaller from the product `beta^2 / 4`.
pub fn alpha_beta_squares(alpha: f64, beta: f64) -> (f64, f64) {
    let r = alpha.hypot(beta);
    if r == 0.0 {
        return (0.0, 0.0);
    }
    let quarter = 0.25 * beta * beta;
    if alpha >= 0.0 {
        let plus = 0.5 * (r + alpha);
        (quarter / plus, plus)
    } else {
        let minus = 0.5 * (r - alpha);
        (minus, quarter / minus)
    }
}

/// Plane-wave solution of the self-interacting left equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfInteractingSolution {
    pub k: WaveVectorPair,
    pub energy: ComplexEnergy,
    /// `A1 = Y0 conj(A0)`.
    pub y0: Complex,
    pub branch: Sign,
    pub alpha: f64,
    pub beta: f64,
    /// The eigenvalue `hbar^2 K.K / 2m`.
    pub kinetic: Complex,
}

impl SelfInteractingSolution {
    pub fn a1(&self, a0: Complex) -> Complex {
        self.y0 * a0.conj()
    }

    pub fn wave(&self, a0: Complex) -> QuaternionicWave {
        QuaternionicWave::conjugate_pair(a0, self.a1(a0), self.k.signed_k(), self.energy.as_complex())
    }
}

/// The 2x2 matrix acting on `(A0, conj(A1))`.
pub fn left_matrix(u: &QuaternionicPotential, e: ComplexEnergy) -> [[Complex; 2]; 2] {
    let ie = i_times(e);
    [[u.u0 + ie, -u.u1], [u.u1.conj(), u.u0.conj() - ie]]
}

/// Kinetic eigenvalue `hbar^2 K.K / 2m` of the chosen branch.
pub fn self_interacting_kinetic(u: &QuaternionicPotential, e: ComplexEnergy, branch: Sign) -> (Complex, f64, f64) {
    let (alpha, beta) = alpha_beta(e, u.v1(), u.u1);
    let (minus, plus) = alpha_beta_squares(alpha, beta);
    let b = branch.as_f64();
    let re_w = minus.sqrt();
    let im_w = if beta > 0.0 { -plus.sqrt() } else { plus.sqrt() };
    (Complex::new(u.v0() + b * re_w, b * im_w), alpha, beta)
}

/// Solves the self-interacting plane wave for the given branch.
///
/// `BranchInfeasible` is returned when the branch requires `K0.K1` of the
/// opposite sign to `cos(Omega0)`, so no non-negative magnitudes exist.
pub fn solve_self_interacting(
    u: &QuaternionicPotential,
    e: ComplexEnergy,
    cos_omega0: f64,
    branch: Sign,
    pc: PhysicalConstants,
) -> Result<SelfInteractingSolution> {
    if !u.is_self_interacting() {
        return Err(SolveError::InvalidInput(
            "self-interacting solve requires U1 != 0".into(),
        ));
    }
    let (kinetic, alpha, beta) = self_interacting_kinetic(u, e, branch);
    let (k0, k1) = magnitudes_from_kinetic(kinetic, cos_omega0, pc).map_err(|err| match err {
        SolveError::OrientationMismatch { required, cos_omega0 } => SolveError::BranchInfeasible {
            branch,
            reason: format!("needs hbar^2 K0.K1/m = {required:.6e} but cos(Omega0) = {cos_omega0}"),
        },
        other => other,
    })?;
    let row = u.u0 + i_times(e) - kinetic;
    let y0 = row.conj() / u.u1.conj();
    Ok(SelfInteractingSolution {
        k: WaveVectorPair::new(k0, k1, cos_omega0),
        energy: e,
        y0,
        branch,
        alpha,
        beta,
        kinetic,
    })
}

/// One-dimensional solve with `cos(Omega0) = +/-1` aligned to the branch.
pub fn solve_self_interacting_1d(
    u: &QuaternionicPotential,
    e: ComplexEnergy,
    branch: Sign,
    pc: PhysicalConstants,
) -> Result<SelfInteractingSolution> {
    let (kin, _, _) = self_interacting_kinetic(u, e, branch);
    solve_self_interacting(u, e, complex_particle::aligned_cos_omega(kin.im), branch, pc)
}

/// Characteristic polynomial `(U0 + iE - l)(conj(U0) - iE - l) + |U1|^2`
/// at `l = hbar^2 K.K / 2m`.
pub fn char_poly_residual(
    k_dot_k: Complex,
    u: &QuaternionicPotential,
    e: ComplexEnergy,
    pc: PhysicalConstants,
) -> Complex {
    let l = k_dot_k * pc.kinetic_factor();
    let ie = i_times(e);
    (u.u0 + ie - l) * (u.u0.conj() - ie - l) + u.u1.norm_sqr()
}

/// Real part and half the imaginary part of [`char_poly_residual`] written
/// in the real parameters:
///
/// ```text
/// [V0 - Re l]^2 - E1^2 + (E0 + V1)^2 - (Im l)^2 + |U1|^2
/// E1 (E0 + V1) - [V0 - Re l] Im l
/// ```
pub fn char_poly_parts(
    k_dot_k: Complex,
    u: &QuaternionicPotential,
    e: ComplexEnergy,
    pc: PhysicalConstants,
) -> (f64, f64) {
    let l = k_dot_k * pc.kinetic_factor();
    let a = u.v0() - l.re;
    let c = e.e0 + u.v1();
    (
        a * a - e.e1 * e.e1 + c * c - l.im * l.im + u.u1.norm_sqr(),
        e.e1 * c - a * l.im,
    )
}

/// Scale for the polynomial residual: `max(1, |U|^2, |E|^2)`.
pub fn char_poly_scale(u: &QuaternionicPotential, e: ComplexEnergy) -> f64 {
    1.0f64.max(u.as_quaternion().norm_sqr()).max(e.as_complex().norm_sqr())
}

/// `M (A0, conj(A1)) - l (A0, conj(A1))` with `l = hbar^2 K.K / 2m`.
pub fn matrix_residual(
    a0: Complex,
    a1: Complex,
    k_dot_k: Complex,
    u: &QuaternionicPotential,
    e: ComplexEnergy,
    pc: PhysicalConstants,
) -> (Complex, Complex) {
    let m = left_matrix(u, e);
    let l = k_dot_k * pc.kinetic_factor();
    let v = [a0, a1.conj()];
    (
        m[0][0] * v[0] + m[0][1] * v[1] - l * v[0],
        m[1][0] * v[0] + m[1][1] * v[1] - l * v[1],
    )
}

/// Closed-form expectations: `<E>` and `<p>` weighted by `|A0|^2 - |A1|^2`,
/// `<p^2>` and `<V>` by `|A0|^2 + |A1|^2`, with
/// `rho = exp[2 K0 x - 2 E0 t/hbar]`.
pub fn expectations_self_interacting(
    sol: &SelfInteractingSolution,
    a0: Complex,
    v0: f64,
    domain: Domain,
    t: f64,
    pc: PhysicalConstants,
) -> Expectations {
    let k = sol.k.signed_k();
    let base = density_integral(k.re, sol.energy.e0, domain, t, pc);
    let n0 = a0.norm_sqr();
    let n1 = sol.a1(a0).norm_sqr();
    let diff = (n0 - n1) * base;
    let total = (n0 + n1) * base;
    let hbar = pc.hbar();
    Expectations {
        energy: sol.energy.e1 * diff,
        momentum: hbar * k.im * diff,
        momentum_sq: hbar * hbar * (sol.k.k1 * sol.k.k1 - sol.k.k0 * sol.k.k0) * total,
        potential: v0 * total,
        norm: total,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfInteractingStationarity {
    pub stationary: bool,
    pub alpha: f64,
    pub beta: f64,
    /// `(2m/hbar^2)(sqrt(E1^2 - |U1|^2) - V0)` when stationary.
    pub k1_sq: Option<f64>,
    /// Amplitude ratio of the propagating solution when stationary.
    pub y0: Option<Complex>,
    pub failures: Vec<StationarityFailure>,
}

/// Stationary iff `E0 = V1 = 0` and `E1^2 > V0^2 + |U1|^2` (which forces
/// `alpha <= 0`, `beta = 0`).
pub fn classify_stationary_self_interacting(
    u: &QuaternionicPotential,
    e: ComplexEnergy,
    pc: PhysicalConstants,
) -> SelfInteractingStationarity {
    let scale = [u.v0(), u.v1(), u.w0(), u.w1(), e.e0, e.e1]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let (alpha, beta) = alpha_beta(e, u.v1(), u.u1);
    let mut failures = Vec::new();
    if !is_zero(e.e0, scale) {
        failures.push(StationarityFailure::RealEnergy { e0: e.e0 });
    }
    if !is_zero(u.v1(), scale) {
        failures.push(StationarityFailure::ImaginaryPotential { v1: u.v1() });
    }
    if alpha > 0.0 || !is_zero(beta, scale * scale) {
        failures.push(StationarityFailure::NonzeroDotProduct { alpha, beta });
    }
    let e1_sq = e.e1 * e.e1;
    let bound = u.v0() * u.v0() + u.u1.norm_sqr();
    if e1_sq <= bound {
        failures.push(StationarityFailure::SelfInteractionTooStrong { e1_sq, bound });
    }
    let stationary = failures.is_empty();
    let (k1_sq, y0) = if stationary {
        let root = (e1_sq - u.u1.norm_sqr()).sqrt();
        let k1_sq = 2.0 * pc.m_over_hbar2() * (root - u.v0());
        let y0 = if u.is_self_interacting() {
            solve_self_interacting(u, ComplexEnergy::new(0.0, e.e1), 1.0, Sign::Minus, pc)
                .ok()
                .map(|s| s.y0)
        } else {
            Some(Complex::new(0.0, 0.0))
        };
        (Some(k1_sq), y0)
    } else {
        (None, None)
    };
    SelfInteractingStationarity {
        stationary,
        alpha,
        beta,
        k1_sq,
        y0,
        failures,
    }
}
