use thiserror::Error;

use crate::algebra::Complex;
use crate::Sign;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("cos(Omega0) = 0 while the coupling term {numerator} is nonzero")]
    DegeneratePhase { numerator: f64 },

    #[error("K0.K1 must equal {required} but cos(Omega0) = {cos_omega0} has the opposite sign")]
    OrientationMismatch { required: f64, cos_omega0: f64 },

    #[error("branch {branch} is infeasible: {reason}")]
    BranchInfeasible { branch: Sign, reason: String },

    #[error("mode constraints violated (max residual {residual:.3e})")]
    ConstraintViolation { residual: f64 },

    #[error("matching denominator |K_I e^(i phi0) + K_II e^(i xi0)| = {magnitude:.3e} vanishes")]
    DegenerateDenominator { magnitude: f64 },

    #[error("|A|^2 = |B|^2 = {weight} but the component systems disagree (1+u = {one_plus_u}, 1+v = {one_plus_v})")]
    DegenerateAmplitudes {
        weight: f64,
        one_plus_u: f64,
        one_plus_v: f64,
    },

    #[error(
        "amplitude ratios differ across the step: H0 = ({}, {}), I0 = ({}, {}), |H0 - I0| = {gap:.3e}",
        .h0.re, .h0.im, .i0.re, .i0.im
    )]
    ConstraintUnsatisfiable { h0: Complex, i0: Complex, gap: f64 },

    #[error("time step {dt} exceeds the stability bound {bound}")]
    StabilityViolation { dt: f64, bound: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, SolveError>;
