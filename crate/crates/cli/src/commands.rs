//! `dispersion`, `classify` and `scatter`.

use std::fmt;

use anyhow::bail;
use qhparticle_core::complex_particle::{self, StationarityFailure, STATIONARY_TOL};
use qhparticle_core::quaternionic_left::classify_stationary_self_interacting;
use qhparticle_core::scattering::{self, ScatteringReport};
use qhparticle_core::Sign;

use crate::config::{complex, EquationKind, RunConfig, SweepConfig};
use crate::output::{Cell, Table};
use crate::solve::{evaluate, exceeds, points, solve, Point, Solved};

/// Rows were emitted but some residual column exceeded its threshold.
#[derive(Debug)]
pub struct ResidualFailure {
    pub failures: Vec<String>,
}

impl fmt::Display for ResidualFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "residuals above threshold: {}", self.failures.join(", "))
    }
}

impl std::error::Error for ResidualFailure {}

/// A table plus the failure to report after it has been written.
pub struct Outcome {
    pub table: Table,
    pub failure: Option<anyhow::Error>,
}

fn header(table: &mut Table, command: &str, cfg: &RunConfig, sweep: &Option<SweepConfig>) {
    table
        .comments
        .push(format!("qhparticle {command} equation={}", cfg.equation));
    table.comments.push(format!(
        "hbar={} mass={} regions={}",
        crate::output::fmt_f64(cfg.hbar),
        crate::output::fmt_f64(cfg.mass),
        cfg.regions.len()
    ));
    if let Some(s) = sweep {
        table.comments.push(format!(
            "sweep {}={}:{}:{}",
            s.parameter,
            crate::output::fmt_f64(s.from),
            crate::output::fmt_f64(s.to),
            s.steps
        ));
    }
}

fn lead(p: &Point) -> [Cell; 2] {
    [Cell::Int(p.index as i64), Cell::opt(p.value)]
}

fn is_zero(v: f64, scale: f64) -> bool {
    v.abs() <= STATIONARY_TOL * scale.max(1.0)
}

/// Time, space and full stationarity of a solved point.
fn stationarity(s: &Solved, cfg: &RunConfig) -> anyhow::Result<(bool, bool, bool)> {
    let e = cfg.energy.energy();
    let k = s.wave_vector();
    let k_zero = |k0: f64, k1: f64| k0 <= STATIONARY_TOL * k1.max(1.0);
    Ok(match s {
        Solved::Complex { pot, energy, k } => {
            let r = complex_particle::classify_stationary(*pot, *energy, k);
            (r.time_stationary, r.space_stationary, r.fully_stationary)
        }
        Solved::NonInteracting { pot, mode } => {
            let a = complex_particle::classify_stationary(*pot, mode.mode0.energy, &mode.mode0.k);
            let b = complex_particle::classify_stationary(*pot, mode.mode1.energy, &mode.mode1.k);
            (
                a.time_stationary && b.time_stationary,
                a.space_stationary && b.space_stationary,
                a.fully_stationary && b.fully_stationary,
            )
        }
        Solved::SelfInteracting { u, .. } => {
            let r = classify_stationary_self_interacting(u, e, cfg.constants()?);
            let t = is_zero(e.e0, e.e1.abs());
            (t, k_zero(k.k0, k.k1), r.stationary)
        }
        Solved::Right { .. } => {
            let t = is_zero(e.e0, e.e1.abs());
            let sp = k_zero(k.k0, k.k1);
            (t, sp, t && sp)
        }
    })
}

fn branch_cell(cfg: &RunConfig) -> Cell {
    match cfg.equation {
        EquationKind::Complex => Cell::Empty,
        EquationKind::Left if !cfg.potential().is_self_interacting() => Cell::Empty,
        EquationKind::Left => Cell::Text(cfg.branch().to_string()),
        EquationKind::Right => Cell::Text(cfg.root_sign().to_string()),
    }
}

fn finish(table: Table, failures: Vec<String>) -> Outcome {
    let failure = (!failures.is_empty()).then(|| anyhow::Error::new(ResidualFailure { failures }));
    Outcome { table, failure }
}

pub fn dispersion(cfg: &RunConfig, sweep: Option<&SweepConfig>) -> anyhow::Result<Outcome> {
    let (pts, sweep) = points(cfg, sweep)?;
    let mut table = Table::new(vec![
        "point",
        "sweep_value",
        "equation",
        "branch",
        "cos_omega0",
        "k0",
        "k1",
        "kinetic_re",
        "kinetic_im",
        "k0_cal",
        "k1_cal",
        "Y0_re",
        "Y0_im",
        "self_interaction_feasible",
        "time_stationary",
        "space_stationary",
        "fully_stationary",
        "residual_dispersion",
        "residual_continuity",
        "residual_energy",
        "residual_eigen",
    ]);
    header(&mut table, "dispersion", cfg, &sweep);
    let rows = evaluate(&pts, |p| {
        let c = &p.config;
        let s = solve(c)?;
        let k = s.wave_vector();
        let kin = s.kinetic(c.constants()?);
        let (ts, ss, fs) = stationarity(&s, c)?;
        let r = s.residuals(c)?;
        let feasible = match &s {
            Solved::Right { sol, .. } => Cell::Bool(sol.self_interaction_feasible),
            _ => Cell::Empty,
        };
        let [y_re, y_im] = Cell::complex(s.y0());
        let cal = s.cal_wave_vector();
        let [i, v] = lead(p);
        let row = vec![
            i,
            v,
            Cell::Text(c.equation.to_string()),
            branch_cell(c),
            Cell::Num(k.cos_omega0),
            Cell::Num(k.k0),
            Cell::Num(k.k1),
            Cell::Num(kin.re),
            Cell::Num(kin.im),
            Cell::opt(cal.map(|k| k.k0)),
            Cell::opt(cal.map(|k| k.k1)),
            y_re,
            y_im,
            feasible,
            Cell::Bool(ts),
            Cell::Bool(ss),
            Cell::Bool(fs),
            Cell::opt(r.dispersion),
            Cell::opt(r.continuity),
            Cell::opt(r.energy),
            Cell::opt(r.eigen),
        ];
        let bad: Vec<String> = r.violations().iter().map(|n| format!("{n}@{}", p.index)).collect();
        Ok((row, bad))
    })?;
    let mut failures = Vec::new();
    for (row, bad) in rows {
        table.push(row);
        failures.extend(bad);
    }
    Ok(finish(table, failures))
}

fn failure_name(f: &StationarityFailure) -> &'static str {
    match f {
        StationarityFailure::RealEnergy { .. } => "real_energy",
        StationarityFailure::ImaginaryPotential { .. } => "imaginary_potential",
        StationarityFailure::EvanescentCoupling { .. } => "evanescent_coupling",
        StationarityFailure::NotAboveBarrier { .. } => "not_above_barrier",
        StationarityFailure::SelfInteractionTooStrong { .. } => "self_interaction_too_strong",
        StationarityFailure::NonzeroDotProduct { .. } => "nonzero_dot_product",
    }
}

/// Classification needs no solution for the left self-interacting case;
/// the others report on the solved wave vector.
pub fn classify(cfg: &RunConfig, sweep: Option<&SweepConfig>) -> anyhow::Result<Outcome> {
    let (pts, sweep) = points(cfg, sweep)?;
    let mut table = Table::new(vec![
        "point",
        "sweep_value",
        "equation",
        "stationary",
        "time_stationary",
        "space_stationary",
        "k0",
        "alpha",
        "beta",
        "k1_sq",
        "Y0_re",
        "Y0_im",
        "self_interaction_feasible",
        "failures",
    ]);
    header(&mut table, "classify", cfg, &sweep);
    let rows = evaluate(&pts, |p| {
        let c = &p.config;
        let pc = c.constants()?;
        let u = c.potential();
        let e = c.energy.energy();
        let [i, v] = lead(p);
        let eq = Cell::Text(c.equation.to_string());
        if c.equation == EquationKind::Left && u.is_self_interacting() {
            let r = classify_stationary_self_interacting(&u, e, pc);
            let [y_re, y_im] = Cell::complex(r.y0);
            let names: Vec<&str> = r.failures.iter().map(failure_name).collect();
            return Ok(vec![
                i,
                v,
                eq,
                Cell::Bool(r.stationary),
                Cell::Bool(is_zero(e.e0, e.e1.abs())),
                Cell::Bool(r.stationary),
                Cell::Empty,
                Cell::Num(r.alpha),
                Cell::Num(r.beta),
                Cell::opt(r.k1_sq),
                y_re,
                y_im,
                Cell::Empty,
                Cell::Text(names.join(";")),
            ]);
        }
        let s = solve(c)?;
        let (ts, ss, fs) = stationarity(&s, c)?;
        let k = s.wave_vector();
        let (names, feasible) = match &s {
            Solved::Complex { pot, energy, k } => (
                complex_particle::classify_stationary(*pot, *energy, k)
                    .failures
                    .iter()
                    .map(failure_name)
                    .collect::<Vec<_>>(),
                Cell::Empty,
            ),
            Solved::NonInteracting { pot, mode } => {
                let mut f: Vec<&str> = complex_particle::classify_stationary(*pot, mode.mode0.energy, &mode.mode0.k)
                    .failures
                    .iter()
                    .chain(&complex_particle::classify_stationary(*pot, mode.mode1.energy, &mode.mode1.k).failures)
                    .map(failure_name)
                    .collect();
                f.dedup();
                (f, Cell::Empty)
            }
            Solved::Right { sol, .. } => {
                let mut f = Vec::new();
                if !ts {
                    f.push("real_energy");
                }
                if !ss {
                    f.push("evanescent_coupling");
                }
                if fs && u.is_self_interacting() && !sol.self_interaction_feasible {
                    f.push("stationary_excludes_self_interaction");
                }
                (f, Cell::Bool(sol.self_interaction_feasible))
            }
            Solved::SelfInteracting { .. } => unreachable!("handled above"),
        };
        let [y_re, y_im] = Cell::complex(s.y0());
        Ok(vec![
            i,
            v,
            eq,
            Cell::Bool(fs),
            Cell::Bool(ts),
            Cell::Bool(ss),
            Cell::Num(k.k0),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            y_re,
            y_im,
            feasible,
            Cell::Text(names.join(";")),
        ])
    })?;
    for row in rows {
        table.push(row);
    }
    Ok(finish(table, Vec::new()))
}

/// Tolerance on the conservation identities, relative to
/// `1 + |u| + |R|^2 + |T|^2`.
pub const IDENTITY_TOL: f64 = 1e-10;

pub fn scatter_report(c: &RunConfig) -> anyhow::Result<(Sign, Sign, ScatteringReport, Option<f64>)> {
    let step = c.step()?;
    let pc = c.constants()?;
    let e = c.energy.energy();
    let phases = c.phases();
    match c.equation {
        EquationKind::Right => {
            bail!("`equation = \"right\"` has no closed-form scattering; use `verify` or `dispersion`")
        }
        EquationKind::Complex => {
            if !step.is_complex() {
                bail!("`equation = \"complex\"` needs `w0 = w1 = 0` in `regions`");
            }
            let r = scattering::complex_step(&step, e, phases, pc)?;
            let ex = scattering::kinetic_potential_exchange(r.k_i, r.k_ii, &step.left, &step.right, pc);
            let scale = 1.0f64
                .max(step.left.v0().abs())
                .max(step.right.v0().abs())
                .max(e.e1.abs());
            Ok((Sign::Plus, Sign::Plus, r, Some(ex.abs() / scale)))
        }
        EquationKind::Left if step.is_complex() => {
            let r = scattering::quaternionic_noninteracting_step(
                &step,
                e,
                c.energy_cal(),
                complex(c.amplitudes.a_cal),
                complex(c.amplitudes.b_cal),
                phases,
                pc,
            )?;
            Ok((Sign::Plus, Sign::Plus, r, None))
        }
        EquationKind::Left => {
            let r = scattering::self_interacting_step(&step, e, phases, c.branch(), c.branch_ii(), pc)?;
            Ok((c.branch(), c.branch_ii(), r, None))
        }
    }
}

/// Relative identity residuals `(complex, j component)`.
pub fn identity_residuals(r: &ScatteringReport) -> (f64, Option<f64>) {
    let scale = 1.0 + r.u.abs() + r.r2 + r.t2;
    let j = r
        .identity_residual_j
        .map(|x| x.abs() / (scale + r.v.unwrap_or(0.0).abs()));
    (r.identity_residual.abs() / scale, j)
}

pub fn scatter(cfg: &RunConfig, sweep: Option<&SweepConfig>) -> anyhow::Result<Outcome> {
    let (pts, sweep) = points(cfg, sweep)?;
    cfg.step()?;
    let mut table = Table::new(vec![
        "point",
        "sweep_value",
        "equation",
        "branch_I",
        "branch_II",
        "K_I_re",
        "K_I_im",
        "K_II_re",
        "K_II_im",
        "R_re",
        "R_im",
        "T_re",
        "T_im",
        "R2",
        "T2",
        "u",
        "v",
        "H0_re",
        "H0_im",
        "I0_re",
        "I0_im",
        "residual_identity",
        "residual_identity_j",
        "residual_exchange",
    ]);
    header(&mut table, "scatter", cfg, &sweep);
    let rows = evaluate(&pts, |p| {
        let c = &p.config;
        let (bi, bii, r, ex) = scatter_report(c)?;
        let (id, id_j) = identity_residuals(&r);
        let self_int = c.equation == EquationKind::Left && !c.step()?.is_complex();
        let sign = |s: Sign| {
            if self_int {
                Cell::Text(s.to_string())
            } else {
                Cell::Empty
            }
        };
        let [ki_re, ki_im] = Cell::complex(Some(r.k_i));
        let [kii_re, kii_im] = Cell::complex(Some(r.k_ii));
        let [r_re, r_im] = Cell::complex(Some(r.r));
        let [t_re, t_im] = Cell::complex(Some(r.t));
        let [h_re, h_im] = Cell::complex(r.h0);
        let [i_re, i_im] = Cell::complex(r.i0);
        let [i, v] = lead(p);
        let mut bad = Vec::new();
        if exceeds(id, IDENTITY_TOL) || id_j.is_some_and(|x| exceeds(x, IDENTITY_TOL)) {
            bad.push(format!("residual_identity@{}", p.index));
        }
        if ex.is_some_and(|x| exceeds(x, 1e-9)) {
            bad.push(format!("residual_exchange@{}", p.index));
        }
        let row = vec![
            i,
            v,
            Cell::Text(c.equation.to_string()),
            sign(bi),
            sign(bii),
            ki_re,
            ki_im,
            kii_re,
            kii_im,
            r_re,
            r_im,
            t_re,
            t_im,
            Cell::Num(r.r2),
            Cell::Num(r.t2),
            Cell::Num(r.u),
            Cell::opt(r.v),
            h_re,
            h_im,
            i_re,
            i_im,
            Cell::Num(id),
            Cell::opt(id_j),
            Cell::opt(ex),
        ];
        Ok((row, bad))
    })?;
    let mut failures = Vec::new();
    for (row, bad) in rows {
        table.push(row);
        failures.extend(bad);
    }
    Ok(finish(table, failures))
}
