//! Step-potential scattering at `x = 0`.
//!
//! A wave `exp[K_I x]` incident from the left is reflected into
//! `R exp[-K_I x]` and transmitted into `T exp[K_II x]`. The matching is
//! phase-relaxed:
//!
//! ```text
//! psi_I(0)  = psi_II(0)  exp[i phi0]
//! psi_I'(0) = psi_II'(0) exp[i xi0]
//! ```
//!
//! which gives, with `a = K_I e^{i phi0}` and `b = K_II e^{i xi0}`,
//! `R = (a - b)/(a + b)`, `T = 2 K_I / (a + b)` and
//! `|R|^2 + |T|^2 = 1 + u`, `u = 2 [a (conj a - conj b) + conj a (a - b)] / |a + b|^2`.
//!
//! `u` vanishes when `a = b`; it also vanishes whenever `Re[a conj(a - b)] = 0`,
//! so `a = b` is sufficient but not necessary for particle conservation.
//! Right-incidence is obtained by swapping the regions.

use crate::algebra::Complex;
use crate::complex_particle::{self, ComplexEnergy, PhysicalConstants};
use crate::error::{Result, SolveError};
use crate::quaternionic_left::{self, QuaternionicPotential};
use crate::Sign;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepPotential {
    /// Region I, `x < 0`.
    pub left: QuaternionicPotential,
    /// Region II, `x >= 0`.
    pub right: QuaternionicPotential,
}

impl StepPotential {
    pub fn new(left: QuaternionicPotential, right: QuaternionicPotential) -> Self {
        Self { left, right }
    }

    pub fn is_complex(&self) -> bool {
        !self.left.is_self_interacting() && !self.right.is_self_interacting()
    }
}

/// Matching phases in radians. `phi0 = xi0 = 0` is ordinary continuity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MatchingPhases {
    pub phi0: f64,
    pub xi0: f64,
}

impl MatchingPhases {
    pub fn new(phi0: f64, xi0: f64) -> Self {
        Self { phi0, xi0 }
    }

    /// Both phases reduced to `[0, 2 pi)`.
    pub fn reduced(&self) -> Self {
        let tau = std::f64::consts::TAU;
        Self {
            phi0: self.phi0.rem_euclid(tau),
            xi0: self.xi0.rem_euclid(tau),
        }
    }
}

/// Below this magnitude `|K_I e^{i phi0} + K_II e^{i xi0}|` is treated as zero.
pub const DENOMINATOR_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepCoefficients {
    pub r: Complex,
    pub t: Complex,
    pub r2: f64,
    pub t2: f64,
    pub u: f64,
}

impl StepCoefficients {
    /// `|R|^2 + |T|^2 - 1 - u`.
    pub fn identity_residual(&self) -> f64 {
        self.r2 + self.t2 - 1.0 - self.u
    }
}

fn phased(k_i: Complex, k_ii: Complex, phases: MatchingPhases) -> (Complex, Complex) {
    (
        k_i * Complex::from_polar(1.0, phases.phi0),
        k_ii * Complex::from_polar(1.0, phases.xi0),
    )
}

/// Conservation defect `u` in its literal form.
pub fn conservation_defect(k_i: Complex, k_ii: Complex, phases: MatchingPhases) -> Result<f64> {
    let (a, b) = phased(k_i, k_ii, phases);
    let den = (a + b).norm_sqr();
    if den.sqrt() < DENOMINATOR_TOL {
        return Err(SolveError::DegenerateDenominator { magnitude: den.sqrt() });
    }
    let num = a * (a.conj() - b.conj()) + a.conj() * (a - b);
    Ok(2.0 * num.re / den)
}

/// Reflection and transmission for signed wave numbers `K_I`, `K_II`.
pub fn step_coefficients(k_i: Complex, k_ii: Complex, phases: MatchingPhases) -> Result<StepCoefficients> {
    let (a, b) = phased(k_i, k_ii, phases);
    let sum = a + b;
    let mag = sum.norm();
    if mag < DENOMINATOR_TOL {
        return Err(SolveError::DegenerateDenominator { magnitude: mag });
    }
    let r = (a - b) / sum;
    let t = 2.0 * k_i / sum;
    let den = sum.norm_sqr();
    Ok(StepCoefficients {
        r,
        t,
        r2: (a - b).norm_sqr() / den,
        t2: 4.0 * k_i.norm_sqr() / den,
        u: conservation_defect(k_i, k_ii, phases)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScatteringReport {
    pub r: Complex,
    pub t: Complex,
    pub r2: f64,
    pub t2: f64,
    pub u: f64,
    /// Defect of the `j` component (non-interacting quaternionic case).
    pub v: Option<f64>,
    pub k_i: Complex,
    pub k_ii: Complex,
    /// `j`-component wave numbers (non-interacting quaternionic case).
    pub k_cal_i: Option<Complex>,
    pub k_cal_ii: Option<Complex>,
    /// Amplitude ratios of the self-interacting regions.
    pub h0: Option<Complex>,
    pub i0: Option<Complex>,
    /// `|R|^2 + |T|^2 - 1 - u`.
    pub identity_residual: f64,
    /// `|R A|^2 + |T B|^2 - 1 - v`.
    pub identity_residual_j: Option<f64>,
}

impl ScatteringReport {
    fn from_coefficients(c: StepCoefficients, k_i: Complex, k_ii: Complex) -> Self {
        Self {
            r: c.r,
            t: c.t,
            r2: c.r2,
            t2: c.t2,
            u: c.u,
            k_i,
            k_ii,
            identity_residual: c.identity_residual(),
            ..Default::default()
        }
    }
}

fn require_complex(pot: &StepPotential) -> Result<()> {
    if !pot.is_complex() {
        return Err(SolveError::InvalidInput(
            "complex scattering requires U1 = 0 in both regions".into(),
        ));
    }
    Ok(())
}

/// Incident wave number of a complex region, with the one-dimensional
/// orientation fixed by the sign of `V1 + E0`.
fn region_k(pot: &QuaternionicPotential, e: ComplexEnergy, pc: PhysicalConstants) -> Result<Complex> {
    Ok(complex_particle::solve_dispersion_1d(pot.complex_part(), e, pc)?.signed_k())
}

/// Complex-potential step with a common energy in both regions.
pub fn complex_step(
    pot: &StepPotential,
    e: ComplexEnergy,
    phases: MatchingPhases,
    pc: PhysicalConstants,
) -> Result<ScatteringReport> {
    require_complex(pot)?;
    let k_i = region_k(&pot.left, e, pc)?;
    let k_ii = region_k(&pot.right, e, pc)?;
    Ok(ScatteringReport::from_coefficients(
        step_coefficients(k_i, k_ii, phases)?,
        k_i,
        k_ii,
    ))
}

/// `Delta p^2 / 2m + Delta Re V` across the step, with
/// `p^2 = hbar^2 (K1^2 - K0^2)` in each region. Zero when both wave numbers
/// come from the same `E1`.
pub fn kinetic_potential_exchange(
    k_i: Complex,
    k_ii: Complex,
    pot_i: &QuaternionicPotential,
    pot_ii: &QuaternionicPotential,
    pc: PhysicalConstants,
) -> f64 {
    let p2 = |k: Complex| pc.hbar() * pc.hbar() * (k.im * k.im - k.re * k.re);
    (p2(k_ii) - p2(k_i)) / (2.0 * pc.mass()) + (pot_ii.v0() - pot_i.v0())
}

/// Tolerance on `|A|^2 - |B|^2` below which the closed forms are singular.
pub const AMPLITUDE_TOL: f64 = 1e-12;

/// Non-interacting quaternionic step from the four wave numbers directly.
///
/// `|R|^2` and `|T|^2` are recovered from the two balances
/// `|R|^2 + |T|^2 = 1 + u` and `|A|^2 |R|^2 + |B|^2 |T|^2 = 1 + v`.
/// When `|A| = |B|` the balances are either consistent, and the complex
/// result is returned, or contradictory.
pub fn noninteracting_step_from_wavenumbers(
    k_i: Complex,
    k_ii: Complex,
    k_cal_i: Complex,
    k_cal_ii: Complex,
    a_cal: Complex,
    b_cal: Complex,
    phases: MatchingPhases,
) -> Result<ScatteringReport> {
    let first = step_coefficients(k_i, k_ii, phases)?;
    let v = conservation_defect(k_cal_i, k_cal_ii, phases)?;
    let u = first.u;
    let na = a_cal.norm_sqr();
    let nb = b_cal.norm_sqr();
    let gap = na - nb;
    let scale = 1.0f64.max(na).max(nb);
    let mut report = ScatteringReport::from_coefficients(first, k_i, k_ii);
    report.v = Some(v);
    report.k_cal_i = Some(k_cal_i);
    report.k_cal_ii = Some(k_cal_ii);
    if gap.abs() < AMPLITUDE_TOL * scale {
        let lhs = na * (1.0 + u);
        let consistent = (lhs - (1.0 + v)).abs() <= 1e-9 * scale * (1.0 + u.abs() + v.abs());
        if !consistent {
            return Err(SolveError::DegenerateAmplitudes {
                weight: na,
                one_plus_u: 1.0 + u,
                one_plus_v: 1.0 + v,
            });
        }
    } else {
        report.r2 = (1.0 - nb) / gap + (v - u * nb) / gap;
        report.t2 = (na - 1.0) / gap + (u * na - v) / gap;
        report.identity_residual = report.r2 + report.t2 - 1.0 - u;
    }
    report.identity_residual_j = Some(na * report.r2 + nb * report.t2 - 1.0 - v);
    Ok(report)
}

/// Non-interacting quaternionic step: the complex component carries energy
/// `E`, the `j` component `Ecal`, both unchanged across the step.
#[allow(clippy::too_many_arguments)]
pub fn quaternionic_noninteracting_step(
    pot: &StepPotential,
    e: ComplexEnergy,
    e_cal: ComplexEnergy,
    a_cal: Complex,
    b_cal: Complex,
    phases: MatchingPhases,
    pc: PhysicalConstants,
) -> Result<ScatteringReport> {
    require_complex(pot)?;
    noninteracting_step_from_wavenumbers(
        region_k(&pot.left, e, pc)?,
        region_k(&pot.right, e, pc)?,
        region_k(&pot.left, e_cal, pc)?,
        region_k(&pot.right, e_cal, pc)?,
        a_cal,
        b_cal,
        phases,
    )
}

/// Relative tolerance of the `H0 = I0` gate.
pub const RATIO_TOL: f64 = 1e-9;

/// Incident wave number and amplitude ratio of one region. A region without
/// self-interaction carries a pure `psi0` wave, so its ratio is zero.
fn region_self_interacting(
    pot: &QuaternionicPotential,
    e: ComplexEnergy,
    branch: Sign,
    pc: PhysicalConstants,
) -> Result<(Complex, Complex)> {
    if pot.is_self_interacting() {
        let s = quaternionic_left::solve_self_interacting_1d(pot, e, branch, pc)?;
        Ok((s.k.signed_k(), s.y0))
    } else {
        Ok((region_k(pot, e, pc)?, Complex::new(0.0, 0.0)))
    }
}

/// Self-interacting step: each region is solved on its own branch, the
/// amplitude ratios `H0` (region I) and `I0` (region II) must agree, and
/// `R`, `T`, `u` then follow from the complex matching with the regional
/// wave numbers.
pub fn self_interacting_step(
    pot: &StepPotential,
    e: ComplexEnergy,
    phases: MatchingPhases,
    branch_i: Sign,
    branch_ii: Sign,
    pc: PhysicalConstants,
) -> Result<ScatteringReport> {
    if pot.is_complex() {
        return Err(SolveError::InvalidInput(
            "self-interacting scattering requires U1 != 0 in at least one region".into(),
        ));
    }
    let (k_i, h0) = region_self_interacting(&pot.left, e, branch_i, pc)?;
    let (k_ii, i0) = region_self_interacting(&pot.right, e, branch_ii, pc)?;
    let gap = (h0 - i0).norm();
    if gap > RATIO_TOL * 1.0f64.max(h0.norm()).max(i0.norm()) {
        return Err(SolveError::ConstraintUnsatisfiable { h0, i0, gap });
    }
    let mut report = ScatteringReport::from_coefficients(step_coefficients(k_i, k_ii, phases)?, k_i, k_ii);
    report.h0 = Some(h0);
    report.i0 = Some(i0);
    Ok(report)
}

/// Tries all four branch pairs and returns the first that satisfies
/// `H0 = I0`, or the error of the closest pair.
pub fn self_interacting_step_any(
    pot: &StepPotential,
    e: ComplexEnergy,
    phases: MatchingPhases,
    pc: PhysicalConstants,
) -> Result<(Sign, Sign, ScatteringReport)> {
    let mut closest: Option<SolveError> = None;
    let mut best_gap = f64::INFINITY;
    for bi in Sign::BOTH {
        for bii in Sign::BOTH {
            match self_interacting_step(pot, e, phases, bi, bii, pc) {
                Ok(r) => return Ok((bi, bii, r)),
                Err(SolveError::ConstraintUnsatisfiable { h0, i0, gap }) => {
                    if gap < best_gap {
                        best_gap = gap;
                        closest = Some(SolveError::ConstraintUnsatisfiable { h0, i0, gap });
                    }
                }
                Err(other) => return Err(other),
            }
        }
    }
    Err(closest.expect("four branch pairs were tried"))
}
