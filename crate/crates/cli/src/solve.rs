//! Per-point solutions shared by every command.

use anyhow::bail;
use qhparticle_core::complex_particle::{self, ComplexPotential, WaveVectorPair};
use qhparticle_core::oracle::eigen2;
use qhparticle_core::quaternionic_left::{self as left, NonInteractingMode, SelfInteractingSolution};
use qhparticle_core::quaternionic_right::{self as right, RightSolution};
use qhparticle_core::sweep::{linspace, map_indexed};
use qhparticle_core::wave::QuaternionicWave;
use qhparticle_core::{Complex, ComplexEnergy, PhysicalConstants, PlaneWave, QuaternionicPotential};

use crate::config::{complex, EquationKind, Orientation, RunConfig, SweepConfig};

/// A configuration at one sweep point.
#[derive(Debug, Clone)]
pub struct Point {
    pub index: usize,
    pub value: Option<f64>,
    pub config: RunConfig,
}

/// Expands the sweep (command line first, then the file) into points.
pub fn points(cfg: &RunConfig, cli_sweep: Option<&SweepConfig>) -> anyhow::Result<(Vec<Point>, Option<SweepConfig>)> {
    let sweep = cli_sweep.cloned().or_else(|| cfg.sweep.clone());
    let Some(s) = sweep else {
        return Ok((
            vec![Point {
                index: 0,
                value: None,
                config: cfg.clone(),
            }],
            None,
        ));
    };
    let mut probe = cfg.clone();
    probe.sweep = Some(s.clone());
    probe.validate()?;
    let pts = linspace(s.from, s.to, s.steps)
        .into_iter()
        .enumerate()
        .map(|(index, v)| {
            Ok(Point {
                index,
                value: Some(v),
                config: cfg.with_parameter(&s.parameter, v)?,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok((pts, Some(s)))
}

/// Evaluates `f` on every point (in parallel when enabled) and returns the
/// results in point order, or the error of the first failing point.
pub fn evaluate<R, F>(points: &[Point], f: F) -> anyhow::Result<Vec<R>>
where
    R: Send,
    F: Fn(&Point) -> anyhow::Result<R> + Sync + Send,
{
    let results = map_indexed(points, |_, p| {
        f(p).map_err(|e| match p.value {
            Some(v) => e.context(format!("at sweep point {} (value {v})", p.index)),
            None => e,
        })
    });
    results.into_iter().collect()
}

#[derive(Debug, Clone)]
pub enum Solved {
    Complex {
        pot: ComplexPotential,
        energy: ComplexEnergy,
        k: WaveVectorPair,
    },
    NonInteracting {
        pot: ComplexPotential,
        mode: NonInteractingMode,
    },
    SelfInteracting {
        u: QuaternionicPotential,
        sol: SelfInteractingSolution,
    },
    Right {
        u: QuaternionicPotential,
        energy: ComplexEnergy,
        sol: RightSolution,
        y0: Complex,
        eigen_gap: f64,
    },
}

/// Relative thresholds applied to the residual columns.
pub const DISPERSION_TOL: f64 = 1e-10;
pub const CONTINUITY_TOL: f64 = 1e-10;
pub const ENERGY_TOL: f64 = 1e-9;
pub const EIGEN_TOL: f64 = 1e-9;

/// Residual columns of a solved point; `None` where not applicable.
#[derive(Debug, Clone, Copy, Default)]
pub struct Residuals {
    pub dispersion: Option<f64>,
    pub continuity: Option<f64>,
    pub energy: Option<f64>,
    pub eigen: Option<f64>,
}

/// True when `v` is above `tol` or NaN.
pub fn exceeds(v: f64, tol: f64) -> bool {
    v.is_nan() || v > tol
}

impl Residuals {
    /// Names of the columns above threshold.
    pub fn violations(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let check = |v: Option<f64>, tol: f64| v.is_some_and(|v| exceeds(v, tol));
        if check(self.dispersion, DISPERSION_TOL) {
            out.push("residual_dispersion");
        }
        if check(self.continuity, CONTINUITY_TOL) {
            out.push("residual_continuity");
        }
        if check(self.energy, ENERGY_TOL) {
            out.push("residual_energy");
        }
        if check(self.eigen, EIGEN_TOL) {
            out.push("residual_eigen");
        }
        out
    }
}

pub fn solve(cfg: &RunConfig) -> anyhow::Result<Solved> {
    let pc = cfg.constants()?;
    let u = cfg.potential();
    let e = cfg.energy.energy();
    match cfg.equation {
        EquationKind::Complex => {
            if u.is_self_interacting() {
                bail!("`equation = \"complex\"` needs `w0 = w1 = 0` in `regions`");
            }
            let pot = u.complex_part();
            let k = match cfg.cos_omega0 {
                Orientation::Fixed(c) => complex_particle::solve_dispersion(pot, e, c, pc)?,
                Orientation::Named(_) => complex_particle::solve_dispersion_1d(pot, e, pc)?,
            };
            Ok(Solved::Complex { pot, energy: e, k })
        }
        EquationKind::Left if !u.is_self_interacting() => {
            let pot = u.complex_part();
            let e_cal = cfg.energy_cal();
            let mode = match cfg.cos_omega0 {
                Orientation::Fixed(c) => left::solve_noninteracting(pot, e, e_cal, c, pc)?,
                Orientation::Named(_) => left::solve_noninteracting_1d(pot, e, e_cal, pc)?,
            }
            .with_amplitudes(complex(cfg.amplitudes.a0), complex(cfg.amplitudes.a_cal));
            Ok(Solved::NonInteracting { pot, mode })
        }
        EquationKind::Left => {
            let sol = match cfg.cos_omega0 {
                Orientation::Fixed(c) => left::solve_self_interacting(&u, e, c, cfg.branch(), pc)?,
                Orientation::Named(_) => left::solve_self_interacting_1d(&u, e, cfg.branch(), pc)?,
            };
            Ok(Solved::SelfInteracting { u, sol })
        }
        EquationKind::Right => {
            let cos = match cfg.cos_omega0 {
                Orientation::Fixed(c) => c,
                Orientation::Named(_) => {
                    complex_particle::aligned_cos_omega(right::right_kinetic(&u, e, cfg.root_sign()).im)
                }
            };
            let sol = right::solve_right(&u, e, cos, cfg.root_sign(), pc)?;
            let (y0, eigen_gap) = right_ratio(&u, e, sol.kinetic);
            Ok(Solved::Right {
                u,
                energy: e,
                sol,
                y0,
                eigen_gap,
            })
        }
    }
}

/// Amplitude ratio `A1 = Y conj(A0)` of the right equation from the
/// eigenvector of its matrix, with the distance between the closed-form
/// eigenvalue and the nearest numerical one.
pub fn right_ratio(u: &QuaternionicPotential, e: ComplexEnergy, kinetic: Complex) -> (Complex, f64) {
    let pairs = eigen2(right::right_matrix(u, e));
    let (l, v) = if (pairs[0].0 - kinetic).norm() <= (pairs[1].0 - kinetic).norm() {
        pairs[0]
    } else {
        pairs[1]
    };
    let gap = (l - kinetic).norm();
    if !u.is_self_interacting() || v[0].norm() == 0.0 {
        return (Complex::new(0.0, 0.0), gap);
    }
    ((v[1] / v[0]).conj(), gap)
}

fn energy_magnitude(u: &QuaternionicPotential, e: ComplexEnergy) -> f64 {
    1.0f64.max(u.as_quaternion().norm()).max(e.as_complex().norm())
}

fn complex_residuals(
    pw: &PlaneWave,
    pot: ComplexPotential,
    cfg: &RunConfig,
    pc: PhysicalConstants,
) -> anyhow::Result<(f64, f64, f64)> {
    let (r0, r1) = complex_particle::dispersion_residual(&pw.k, pot, pw.energy, pc);
    let disp = r0.abs().max(r1.abs()) / complex_particle::dispersion_scale(&pw.k, pot, pw.energy, pc);
    let x = cfg.domain.a;
    let f = complex_particle::probability_fields(pw, pot, x, 0.0, pc);
    let cont_scale = f.rho * energy_magnitude(&QuaternionicPotential::from_complex(pot), pw.energy) / pc.hbar();
    let cont = complex_particle::continuity_residual(pw, pot, x, 0.0, pc).abs() / cont_scale.max(f64::MIN_POSITIVE);
    let ex = complex_particle::expectations(pw, pot, cfg.domain()?, 0.0, pc);
    let en_scale = ex
        .energy
        .abs()
        .max(ex.momentum_sq.abs() / (2.0 * pc.mass()))
        .max(ex.potential.abs())
        .max(ex.norm * energy_magnitude(&QuaternionicPotential::from_complex(pot), pw.energy));
    let en = complex_particle::energy_conservation_residual(pw, pot, cfg.domain()?, 0.0, pc).abs()
        / en_scale.max(f64::MIN_POSITIVE);
    Ok((disp, cont, en))
}

impl Solved {
    pub fn wave_vector(&self) -> WaveVectorPair {
        match self {
            Solved::Complex { k, .. } => *k,
            Solved::NonInteracting { mode, .. } => mode.mode0.k,
            Solved::SelfInteracting { sol, .. } => sol.k,
            Solved::Right { sol, .. } => sol.k,
        }
    }

    pub fn kinetic(&self, pc: PhysicalConstants) -> Complex {
        match self {
            Solved::Complex { k, .. } => k.k_dot_k() * pc.kinetic_factor(),
            Solved::NonInteracting { mode, .. } => mode.mode0.k.k_dot_k() * pc.kinetic_factor(),
            Solved::SelfInteracting { sol, .. } => sol.kinetic,
            Solved::Right { sol, .. } => sol.kinetic,
        }
    }

    pub fn y0(&self) -> Option<Complex> {
        match self {
            Solved::SelfInteracting { sol, .. } => Some(sol.y0),
            Solved::Right { y0, .. } => Some(*y0),
            _ => None,
        }
    }

    pub fn cal_wave_vector(&self) -> Option<WaveVectorPair> {
        match self {
            Solved::NonInteracting { mode, .. } => Some(mode.mode1.k),
            _ => None,
        }
    }

    /// Plane wave with the configured amplitude.
    pub fn wave(&self, cfg: &RunConfig) -> QuaternionicWave {
        let a0 = complex(cfg.amplitudes.a0);
        match self {
            Solved::Complex { energy, k, .. } => QuaternionicWave::complex(&PlaneWave::new(a0, *k, *energy)),
            Solved::NonInteracting { mode, .. } => mode.wave(),
            Solved::SelfInteracting { sol, .. } => sol.wave(a0),
            Solved::Right { energy, sol, y0, .. } => {
                QuaternionicWave::conjugate_pair(a0, y0 * a0.conj(), sol.k.signed_k(), energy.as_complex())
            }
        }
    }

    pub fn residuals(&self, cfg: &RunConfig) -> anyhow::Result<Residuals> {
        let pc = cfg.constants()?;
        Ok(match self {
            Solved::Complex { pot, energy, k } => {
                let (d, c, e) =
                    complex_residuals(&PlaneWave::new(complex(cfg.amplitudes.a0), *k, *energy), *pot, cfg, pc)?;
                Residuals {
                    dispersion: Some(d),
                    continuity: Some(c),
                    energy: Some(e),
                    eigen: None,
                }
            }
            Solved::NonInteracting { pot, mode } => {
                let (d0, c0, e0) = complex_residuals(&mode.mode0, *pot, cfg, pc)?;
                let (d1, c1, e1) = complex_residuals(&mode.mode1, *pot, cfg, pc)?;
                Residuals {
                    dispersion: Some(d0.max(d1)),
                    continuity: Some(c0.max(c1)),
                    energy: Some(e0.max(e1)),
                    eigen: None,
                }
            }
            Solved::SelfInteracting { u, sol } => {
                let scale = left::char_poly_scale(u, sol.energy);
                let poly = left::char_poly_residual(sol.k.k_dot_k(), u, sol.energy, pc).norm() / scale;
                let a0 = complex(cfg.amplitudes.a0);
                let (m0, m1) = left::matrix_residual(a0, sol.a1(a0), sol.k.k_dot_k(), u, sol.energy, pc);
                let mag = a0.norm().hypot(sol.a1(a0).norm()).max(f64::MIN_POSITIVE);
                let mat = m0.norm().hypot(m1.norm()) / (mag * energy_magnitude(u, sol.energy));
                Residuals {
                    dispersion: Some(poly),
                    continuity: None,
                    energy: None,
                    eigen: Some(mat),
                }
            }
            Solved::Right {
                u,
                energy,
                sol,
                eigen_gap,
                ..
            } => {
                let (re, im) = right::right_char_residual(sol.k.k_dot_k(), u, *energy, pc);
                let scale = energy_magnitude(u, *energy).powi(2);
                Residuals {
                    dispersion: Some(re.abs().max(im.abs()) / scale),
                    continuity: None,
                    energy: None,
                    eigen: Some(eigen_gap / energy_magnitude(u, *energy)),
                }
            }
        })
    }
}
