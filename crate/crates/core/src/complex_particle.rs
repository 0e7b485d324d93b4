//! The complex autonomous particle: `i hbar dpsi/dt = (-hbar^2/2m lap + V) psi`
//! with a constant complex potential `V = V0 + i V1`.
//!
//! Solutions are plane waves `psi = A exp[K x - E t / hbar]` with complex
//! `K = K0 + i K1` and `E = E0 + i E1`. Substitution gives the two real
//! relations
//!
//! ```text
//! |K0|^2 - |K1|^2 = (2m/hbar^2) (V0 - E1)
//! 2 K0.K1         = (2m/hbar^2) (V1 + E0)
//! ```
//!
//! Vectors are carried as magnitudes plus `cos(Omega0)`, the cosine of the
//! angle between `K0` and `K1`, so `K0.K1 = |K0| |K1| cos(Omega0)`. Concrete
//! evaluation in one dimension projects onto a line; there `cos(Omega0)` is
//! `+1` or `-1` and only its sign enters the signed components (see
//! [`WaveVectorPair::signed_k`]).
//!
//! The negative-`<p^2>` regime (`|K1|^2 < |K0|^2` together with `E1 < V0`)
//! is supported: energy balance holds there as well.

use crate::algebra::{Complex, I};
use crate::error::{Result, SolveError};
use crate::Sign;

/// `hbar` and `m`, both strictly positive. Defaults to `hbar = m = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    hbar: f64,
    mass: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(SolveError::InvalidInput(format!("hbar must be > 0, got {hbar}")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(SolveError::InvalidInput(format!("mass must be > 0, got {mass}")));
        }
        Ok(Self { hbar, mass })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `m / hbar^2`, the factor converting energies into squared wave numbers.
    pub fn m_over_hbar2(&self) -> f64 {
        self.mass / (self.hbar * self.hbar)
    }

    /// `hbar^2 / 2m`, the factor converting `K.K` into an energy.
    pub fn kinetic_factor(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexPotential {
    pub v0: f64,
    pub v1: f64,
}

impl ComplexPotential {
    pub const fn new(v0: f64, v1: f64) -> Self {
        Self { v0, v1 }
    }

    pub fn as_complex(&self) -> Complex {
        Complex::new(self.v0, self.v1)
    }
}

/// Separation constant of the time factor `exp[-E t / hbar]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexEnergy {
    pub e0: f64,
    pub e1: f64,
}

impl ComplexEnergy {
    pub const fn new(e0: f64, e1: f64) -> Self {
        Self { e0, e1 }
    }

    pub fn as_complex(&self) -> Complex {
        Complex::new(self.e0, self.e1)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.e0, -self.e1)
    }
}

/// `K = K0 + K1 i` as magnitudes, the angle cosine and a propagation sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveVectorPair {
    pub k0: f64,
    pub k1: f64,
    pub cos_omega0: f64,
    /// Selects `exp[+K x]` or `exp[-K x]`.
    pub direction: Sign,
}

impl WaveVectorPair {
    pub fn new(k0: f64, k1: f64, cos_omega0: f64) -> Self {
        Self {
            k0,
            k1,
            cos_omega0,
            direction: Sign::Plus,
        }
    }

    pub fn with_direction(mut self, direction: Sign) -> Self {
        self.direction = direction;
        self
    }

    /// `K0.K1 = |K0| |K1| cos(Omega0)`.
    pub fn dot(&self) -> f64 {
        self.k0 * self.k1 * self.cos_omega0
    }

    /// `K.K = |K0|^2 - |K1|^2 + 2 i K0.K1`.
    pub fn k_dot_k(&self) -> Complex {
        Complex::new(self.k0 * self.k0 - self.k1 * self.k1, 2.0 * self.dot())
    }

    /// One-dimensional signed wave number. `K1` carries the propagation
    /// direction; `K0` additionally carries the sign of `cos(Omega0)`, so
    /// `Re K * Im K` has the sign of `K0.K1`.
    pub fn signed_k(&self) -> Complex {
        let s = self.direction.as_f64();
        let orient = if self.cos_omega0 < 0.0 { -1.0 } else { 1.0 };
        Complex::new(s * orient * self.k0, s * self.k1)
    }

    /// True when `|cos(Omega0)| != 1`, which has no geometric meaning on a
    /// line even though the closed forms accept it.
    pub fn is_off_axis(&self) -> bool {
        (self.cos_omega0.abs() - 1.0).abs() > 1e-12
    }
}

/// `psi(x, t) = A exp[K x - E t / hbar]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    pub amplitude: Complex,
    pub k: WaveVectorPair,
    pub energy: ComplexEnergy,
}

impl PlaneWave {
    pub fn new(amplitude: Complex, k: WaveVectorPair, energy: ComplexEnergy) -> Self {
        Self { amplitude, k, energy }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityFields {
    pub rho: f64,
    pub current: f64,
    pub source: f64,
}

/// Closed interval `[a, b]` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    a: f64,
    b: f64,
}

impl Domain {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(SolveError::InvalidInput(format!(
                "domain requires finite a < b, got [{a}, {b}]"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }
}

/// Expectation values of energy, momentum, squared momentum and potential,
/// together with the norm `I = integral of rho`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Expectations {
    pub energy: f64,
    pub momentum: f64,
    pub momentum_sq: f64,
    pub potential: f64,
    pub norm: f64,
}

impl Expectations {
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            energy: self.energy * s,
            momentum: self.momentum * s,
            momentum_sq: self.momentum_sq * s,
            potential: self.potential * s,
            norm: self.norm * s,
        }
    }

    pub fn sum(&self, other: &Self) -> Self {
        Self {
            energy: self.energy + other.energy,
            momentum: self.momentum + other.momentum,
            momentum_sq: self.momentum_sq + other.momentum_sq,
            potential: self.potential + other.potential,
            norm: self.norm + other.norm,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.energy, self.momentum, self.momentum_sq, self.potential]
    }
}

/// Below `|2 K0 (b - a)|` of this size the norm integral switches to its
/// series form.
pub const NORM_SERIES_THRESHOLD: f64 = 1e-8;

/// `exp[-2 E0 t / hbar] * integral_a^b exp[2 K0 x] dx` for a signed `K0`.
pub(crate) fn density_integral(k0_signed: f64, e0: f64, domain: Domain, t: f64, pc: PhysicalConstants) -> f64 {
    let time = (-2.0 * e0 * t / pc.hbar()).exp();
    let len = domain.length();
    let z = 2.0 * k0_signed * len;
    let space = if z.abs() < NORM_SERIES_THRESHOLD {
        (2.0 * k0_signed * domain.a()).exp() * len * (1.0 + 0.5 * z)
    } else {
        (2.0 * k0_signed * domain.a()).exp() * z.exp_m1() / (2.0 * k0_signed)
    };
    time * space
}

/// Recovers `(|K0|, |K1|)` from the kinetic eigenvalue
/// `lambda = hbar^2 K.K / 2m`, i.e. solves
/// `|K0|^2 - |K1|^2 = 2m Re(lambda)/hbar^2` and
/// `|K0| |K1| cos(Omega0) = m Im(lambda)/hbar^2`.
pub(crate) fn magnitudes_from_kinetic(kinetic: Complex, cos_omega0: f64, pc: PhysicalConstants) -> Result<(f64, f64)> {
    if !(cos_omega0.is_finite() && cos_omega0.abs() <= 1.0) {
        return Err(SolveError::InvalidInput(format!(
            "cos(Omega0) must lie in [-1, 1], got {cos_omega0}"
        )));
    }
    if !kinetic.is_finite() {
        return Err(SolveError::InvalidInput("non-finite parameters".into()));
    }
    let (lr, li) = (kinetic.re, kinetic.im);
    let q = if li == 0.0 {
        0.0
    } else if cos_omega0 == 0.0 {
        return Err(SolveError::DegeneratePhase { numerator: li });
    } else if li * cos_omega0 < 0.0 {
        return Err(SolveError::OrientationMismatch {
            required: li,
            cos_omega0,
        });
    } else {
        li / cos_omega0
    };
    let c = pc.m_over_hbar2();
    let s = lr.hypot(q);
    // Pick the non-cancelling sum and recover the other square from the
    // product |K0|^2 |K1|^2 = c^2 q^2.
    let (k0_sq, k1_sq) = if s == 0.0 {
        (0.0, 0.0)
    } else if lr >= 0.0 {
        (c * (lr + s), c * q * q / (lr + s))
    } else {
        (c * q * q / (s - lr), c * (s - lr))
    };
    Ok((k0_sq.sqrt(), k1_sq.sqrt()))
}

/// The cosine `+1` or `-1` whose sign matches the required `K0.K1`.
pub fn aligned_cos_omega(kinetic_im: f64) -> f64 {
    if kinetic_im < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// `hbar^2 K.K / 2m` required by the complex dispersion relation:
/// `(V0 - E1) + i (V1 + E0)`.
pub fn complex_kinetic(pot: ComplexPotential, en: ComplexEnergy) -> Complex {
    Complex::new(pot.v0 - en.e1, pot.v1 + en.e0)
}

/// Solves the complex dispersion relation for `(|K0|, |K1|)`.
///
/// With `cos(Omega0) = 0` the system only has a solution when `V1 + E0 = 0`;
/// it then reduces to `|K0|^2 - |K1|^2 = 2m (V0 - E1) / hbar^2` with
/// `K0.K1 = 0`, solved with the smaller of the two magnitudes set to zero.
pub fn solve_dispersion(
    pot: ComplexPotential,
    en: ComplexEnergy,
    cos_omega0: f64,
    pc: PhysicalConstants,
) -> Result<WaveVectorPair> {
    let (k0, k1) = magnitudes_from_kinetic(complex_kinetic(pot, en), cos_omega0, pc)?;
    Ok(WaveVectorPair::new(k0, k1, cos_omega0))
}

/// One-dimensional solve: `cos(Omega0)` is fixed to the sign of `V1 + E0`.
pub fn solve_dispersion_1d(pot: ComplexPotential, en: ComplexEnergy, pc: PhysicalConstants) -> Result<WaveVectorPair> {
    let kin = complex_kinetic(pot, en);
    solve_dispersion(pot, en, aligned_cos_omega(kin.im), pc)
}

/// Residuals of the two real dispersion relations, in units of 1/length^2.
pub fn dispersion_residual(
    k: &WaveVectorPair,
    pot: ComplexPotential,
    en: ComplexEnergy,
    pc: PhysicalConstants,
) -> (f64, f64) {
    let c = 2.0 * pc.m_over_hbar2();
    (
        k.k0 * k.k0 - k.k1 * k.k1 - c * (pot.v0 - en.e1),
        2.0 * k.dot() - c * (pot.v1 + en.e0),
    )
}

/// Natural magnitude for [`dispersion_residual`]: the largest term entering
/// either relation.
pub fn dispersion_scale(k: &WaveVectorPair, pot: ComplexPotential, en: ComplexEnergy, pc: PhysicalConstants) -> f64 {
    let c = 2.0 * pc.m_over_hbar2();
    let terms = [
        k.k0 * k.k0,
        k.k1 * k.k1,
        c * pot.v0.abs(),
        c * en.e1.abs(),
        c * pot.v1.abs(),
        c * en.e0.abs(),
    ];
    terms.iter().fold(f64::MIN_POSITIVE, |m, t| m.max(*t))
}

pub fn evaluate_wave(pw: &PlaneWave, x: f64, t: f64, pc: PhysicalConstants) -> Complex {
    let k = pw.k.signed_k();
    pw.amplitude * (k * x - pw.energy.as_complex() * (t / pc.hbar())).exp()
}

/// `rho = |A|^2 exp[2 K0 x - 2 E0 t / hbar]`, `J = hbar K1 rho / m`,
/// `g = 2 V1 rho / hbar`, with the signed one-dimensional components.
pub fn probability_fields(
    pw: &PlaneWave,
    pot: ComplexPotential,
    x: f64,
    t: f64,
    pc: PhysicalConstants,
) -> ProbabilityFields {
    let k = pw.k.signed_k();
    let rho = pw.amplitude.norm_sqr() * (2.0 * k.re * x - 2.0 * pw.energy.e0 * t / pc.hbar()).exp();
    ProbabilityFields {
        rho,
        current: pc.hbar() * k.im * rho / pc.mass(),
        source: 2.0 * pot.v1 * rho / pc.hbar(),
    }
}

/// `d rho/dt + div J - g` evaluated analytically. The divergence uses the
/// vector form `div J = (2 hbar / m) K0.K1 rho`, so the residual is
/// `rho (2/hbar) [hbar^2 K0.K1 / m - E0 - V1]` and vanishes exactly when the
/// imaginary dispersion relation holds.
pub fn continuity_residual(pw: &PlaneWave, pot: ComplexPotential, x: f64, t: f64, pc: PhysicalConstants) -> f64 {
    let f = probability_fields(pw, pot, x, t, pc);
    let d_rho_dt = -2.0 * pw.energy.e0 / pc.hbar() * f.rho;
    let div_j = 2.0 * pc.hbar() / pc.mass() * pw.k.dot() * f.rho;
    d_rho_dt + div_j - f.source
}

/// Closed-form expectation values over `domain` at time `t`.
pub fn expectations(
    pw: &PlaneWave,
    pot: ComplexPotential,
    domain: Domain,
    t: f64,
    pc: PhysicalConstants,
) -> Expectations {
    let k = pw.k.signed_k();
    let norm = pw.amplitude.norm_sqr() * density_integral(k.re, pw.energy.e0, domain, t, pc);
    let hbar = pc.hbar();
    Expectations {
        energy: pw.energy.e1 * norm,
        momentum: hbar * k.im * norm,
        momentum_sq: hbar * hbar * (pw.k.k1 * pw.k.k1 - pw.k.k0 * pw.k.k0) * norm,
        potential: pot.v0 * norm,
        norm,
    }
}

/// `<E> - <p^2>/2m - <V>`.
pub fn energy_conservation_residual(
    pw: &PlaneWave,
    pot: ComplexPotential,
    domain: Domain,
    t: f64,
    pc: PhysicalConstants,
) -> f64 {
    let e = expectations(pw, pot, domain, t, pc);
    e.energy - e.momentum_sq / (2.0 * pc.mass()) - e.potential
}

/// Why a solution fails to be stationary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StationarityFailure {
    /// `E0 != 0`: the density changes in time.
    RealEnergy { e0: f64 },
    /// `V1 != 0`: the potential is a source or sink of probability.
    ImaginaryPotential { v1: f64 },
    /// `V1 + E0 != 0`: the wave vector has an evanescent part.
    EvanescentCoupling { v1_plus_e0: f64 },
    /// `V0 >= E1`: no propagating solution.
    NotAboveBarrier { v0: f64, e1: f64 },
    /// `E1^2 <= V0^2 + |U1|^2` (quaternionic self-interaction).
    SelfInteractionTooStrong { e1_sq: f64, bound: f64 },
    /// `alpha > 0` or `beta != 0` (quaternionic self-interaction).
    NonzeroDotProduct { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationarityReport {
    pub time_stationary: bool,
    pub space_stationary: bool,
    pub fully_stationary: bool,
    /// `|K0|` of the supplied solution.
    pub k0: f64,
    pub failures: Vec<StationarityFailure>,
}

/// Absolute tolerance, relative to the energy scale, below which a parameter
/// counts as zero for stationarity.
pub const STATIONARY_TOL: f64 = 1e-12;

pub(crate) fn is_zero(v: f64, scale: f64) -> bool {
    v.abs() <= STATIONARY_TOL * scale.max(1.0)
}

/// Classifies a complex solution: time-stationary iff `E0 = 0`,
/// space-stationary (`K0 = 0` and propagating) iff `V0 < E1` and
/// `V1 + E0 = 0`, fully stationary iff both.
pub fn classify_stationary(pot: ComplexPotential, en: ComplexEnergy, solved: &WaveVectorPair) -> StationarityReport {
    let scale = [pot.v0, pot.v1, en.e0, en.e1]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let mut failures = Vec::new();
    let time_stationary = is_zero(en.e0, scale);
    if !time_stationary {
        failures.push(StationarityFailure::RealEnergy { e0: en.e0 });
    }
    if !is_zero(pot.v1, scale) {
        failures.push(StationarityFailure::ImaginaryPotential { v1: pot.v1 });
    }
    let coupling_zero = is_zero(pot.v1 + en.e0, scale);
    if !coupling_zero {
        failures.push(StationarityFailure::EvanescentCoupling {
            v1_plus_e0: pot.v1 + en.e0,
        });
    }
    let above = pot.v0 < en.e1;
    if !above {
        failures.push(StationarityFailure::NotAboveBarrier { v0: pot.v0, e1: en.e1 });
    }
    let space_stationary = above && coupling_zero;
    StationarityReport {
        time_stationary,
        space_stationary,
        fully_stationary: space_stationary && time_stationary && is_zero(pot.v1, scale),
        k0: solved.k0,
        failures,
    }
}

/// `i E` as it enters the separated equations.
pub(crate) fn i_times(e: ComplexEnergy) -> Complex {
    I * e.as_complex()
}
