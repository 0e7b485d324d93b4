//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Randomised criteria use fixed seeds, so every run draws the same
//! parameters.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use qhparticle_core::algebra::{qconj, qmul};
use qhparticle_core::complex_particle::{
    self, continuity_residual, dispersion_residual, dispersion_scale, energy_conservation_residual, expectations,
    probability_fields, solve_dispersion, ComplexPotential,
};
use qhparticle_core::oracle::{
    brute_eigen, evolve, pde_residual, quadrature_expectation, Equation, FieldState, Grid1D, Operator,
};
use qhparticle_core::quaternionic_left::{
    self as left, char_poly_residual, char_poly_scale, matrix_residual, solve_self_interacting,
};
use qhparticle_core::quaternionic_right::{
    right_char_residual, self_interaction_feasible, solve_right, solve_right_1d,
};
use qhparticle_core::scattering::{
    complex_step, conservation_defect, noninteracting_step_from_wavenumbers, step_coefficients, MatchingPhases,
    StepPotential,
};
use qhparticle_core::wave::{ComponentWave, QuaternionicWave};
use qhparticle_core::{
    Complex, ComplexEnergy, Domain, PhysicalConstants, PlaneWave, Quaternion, QuaternionicPotential, Sign,
    WaveVectorPair,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rand_c(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> Complex {
    c(r.gen_range(lo..hi), r.gen_range(lo..hi))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(t: Duration, limit: f64) -> Result<(), String> {
    ensure(t.as_secs_f64() < limit, || {
        format!("runtime {:.2?} exceeds {limit} s", t)
    })
}

fn rand_quat(r: &mut ChaCha8Rng) -> Quaternion {
    Quaternion::from_parts(
        r.gen_range(-10.0..10.0),
        r.gen_range(-10.0..10.0),
        r.gen_range(-10.0..10.0),
        r.gen_range(-10.0..10.0),
    )
}

fn algebra() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let (mut assoc, mut anti, mut norm) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let (p, q, s) = (rand_quat(&mut r), rand_quat(&mut r), rand_quat(&mut r));
        let pq = qmul(p, q);
        let scale3 = p.norm() * q.norm() * s.norm();
        assoc = assoc.max((qmul(pq, s) - qmul(p, qmul(q, s))).norm() / scale3);
        anti = anti.max((qconj(pq) - qmul(qconj(q), qconj(p))).norm() / (p.norm() * q.norm()));
        norm = norm.max((pq.norm() - p.norm() * q.norm()).abs() / (p.norm() * q.norm()));
    }
    let t = start.elapsed();
    let worst = assoc.max(anti).max(norm);
    ensure(worst < 1e-12, || format!("max relative defect {worst:.2e}"))?;
    within_time(t, 1.0)?;
    Ok(format!(
        "10^4 triples: assoc {assoc:.1e}, conj {anti:.1e}, norm {norm:.1e} in {t:.2?}"
    ))
}

fn complex_closure() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let domain = Domain::new(-0.5, 0.5).unwrap();
    let (mut disp, mut cont, mut energy) = (0.0f64, 0.0f64, 0.0f64);
    let mut negative_p2 = 0;
    for _ in 0..1000 {
        let pc = PhysicalConstants::new(r.gen_range(0.5..2.0), r.gen_range(0.5..2.0)).unwrap();
        let pot = ComplexPotential::new(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        let e = ComplexEnergy::new(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        let lim = complex_particle::complex_kinetic(pot, e).im;
        let cos = r.gen_range(0.05..1.0) * if lim < 0.0 { -1.0 } else { 1.0 };
        let k = solve_dispersion(pot, e, cos, pc).map_err(|e| e.to_string())?;
        let (r0, r1) = dispersion_residual(&k, pot, e, pc);
        disp = disp.max(r0.abs().max(r1.abs()) / dispersion_scale(&k, pot, e, pc));
        let pw = PlaneWave::new(c(1.0, 0.0), k, e);
        for x in [-0.5, 0.0, 0.5] {
            let rho = probability_fields(&pw, pot, x, 0.3, pc).rho;
            cont = cont.max(continuity_residual(&pw, pot, x, 0.3, pc).abs() / rho);
        }
        energy = energy.max(energy_conservation_residual(&pw, pot, domain, 0.3, pc).abs());
        if expectations(&pw, pot, domain, 0.3, pc).momentum_sq <= 0.0 {
            negative_p2 += 1;
        }
    }
    let t = start.elapsed();
    ensure(disp < 1e-10, || format!("dispersion residual {disp:.2e}"))?;
    ensure(cont < 1e-10, || format!("continuity residual {cont:.2e} rho"))?;
    ensure(energy < 1e-9, || format!("energy residual {energy:.2e}"))?;
    ensure(negative_p2 > 0, || "no draw with <p^2> <= 0".into())?;
    within_time(t, 5.0)?;
    Ok(format!(
        "10^3 draws ({negative_p2} with <p^2> <= 0): dispersion {disp:.1e}, continuity {cont:.1e}, energy {energy:.1e} in {t:.2?}"
    ))
}

fn standard_qm() -> Outcome {
    let mut r = rng(3);
    let (mut k_err, mut r_err) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let pc = PhysicalConstants::new(r.gen_range(0.5..2.0), r.gen_range(0.5..2.0)).unwrap();
        let e1 = r.gen_range(0.1..5.0);
        let v0 = e1 - r.gen_range(0.01..5.0);
        let k = solve_dispersion(ComplexPotential::new(v0, 0.0), ComplexEnergy::new(0.0, e1), 1.0, pc)
            .map_err(|e| e.to_string())?;
        let want = (2.0 * pc.mass() * (e1 - v0)).sqrt() / pc.hbar();
        k_err = k_err.max((k.k1 - want).abs() / want).max(k.k0);

        let v0b = e1 - r.gen_range(0.01..5.0);
        let step = StepPotential::new(
            QuaternionicPotential::new(v0, 0.0, 0.0, 0.0),
            QuaternionicPotential::new(v0b, 0.0, 0.0, 0.0),
        );
        let rep = complex_step(&step, ComplexEnergy::new(0.0, e1), MatchingPhases::default(), pc)
            .map_err(|e| e.to_string())?;
        let k2 = (2.0 * pc.mass() * (e1 - v0b)).sqrt() / pc.hbar();
        let want_r = ((want - k2) / (want + k2)).powi(2);
        r_err = r_err.max((rep.r2 - want_r).abs() / want_r.max(1e-300).max(1e-12));
    }
    ensure(k_err <= 1e-12, || format!("k1 error {k_err:.2e}"))?;
    ensure(r_err <= 1e-12, || format!("|R|^2 error {r_err:.2e}"))?;
    Ok(format!("10^3 draws: k1 rel err {k_err:.1e}, |R|^2 rel err {r_err:.1e}"))
}

fn scattering_identities() -> Outcome {
    let mut r = rng(4);
    let (mut id, mut id_j) = (0.0f64, 0.0f64);
    let mut skipped = 0;
    for _ in 0..1000 {
        let k_i = rand_c(&mut r, -2.0, 2.0);
        let k_ii = rand_c(&mut r, -2.0, 2.0);
        let kc_i = rand_c(&mut r, -2.0, 2.0);
        let kc_ii = rand_c(&mut r, -2.0, 2.0);
        let p = MatchingPhases::new(r.gen_range(0.0..TAU), r.gen_range(0.0..TAU));
        let a = rand_c(&mut r, -2.0, 2.0);
        let b = rand_c(&mut r, -2.0, 2.0);
        match noninteracting_step_from_wavenumbers(k_i, k_ii, kc_i, kc_ii, a, b, p) {
            Ok(rep) => {
                let v = rep.v.unwrap();
                let scale = 1.0 + rep.u.abs() + rep.r2.abs() + rep.t2.abs();
                id = id.max(rep.identity_residual.abs() / scale);
                let scale_j = 1.0 + v.abs() + a.norm_sqr() * rep.r2.abs() + b.norm_sqr() * rep.t2.abs();
                id_j = id_j.max(rep.identity_residual_j.unwrap().abs() / scale_j);
                // The complex pair alone, without the j balance.
                let s = step_coefficients(k_i, k_ii, p).map_err(|e| e.to_string())?;
                id = id.max(s.identity_residual().abs() / (1.0 + s.u.abs() + s.r2 + s.t2));
            }
            Err(_) => skipped += 1,
        }
    }
    ensure(id <= 1e-12, || format!("|R|^2 + |T|^2 - 1 - u = {id:.2e}"))?;
    ensure(id_j <= 1e-12, || format!("|RA|^2 + |TB|^2 - 1 - v = {id_j:.2e}"))?;

    // Zero defect: a = b built directly; a != b generically gives u != 0.
    let mut zero = 0.0f64;
    let mut min_off = f64::INFINITY;
    for _ in 0..1000 {
        let k_i = rand_c(&mut r, -2.0, 2.0);
        let p = MatchingPhases::new(r.gen_range(0.0..TAU), r.gen_range(0.0..TAU));
        let k_ii = k_i * Complex::from_polar(1.0, p.phi0 - p.xi0);
        zero = zero.max(conservation_defect(k_i, k_ii, p).unwrap().abs());
        let other = k_ii + rand_c(&mut r, -0.5, 0.5);
        min_off = min_off.min(conservation_defect(k_i, other, p).unwrap().abs());
    }
    ensure(zero <= 1e-12, || format!("u at a = b is {zero:.2e}"))?;
    ensure(min_off > 0.0, || "u = 0 found for a random a != b".into())?;
    // Re[a conj(a - b)] = 0 with a != b also gives u = 0: the criterion is
    // sufficient, not necessary.
    let counter = conservation_defect(c(1.0, 0.0), c(1.0, 1.0), MatchingPhases::default()).unwrap();
    Ok(format!(
        "10^3 draws ({skipped} degenerate): identity {id:.1e}, j identity {id_j:.1e}; u(a=b) <= {zero:.1e}, min |u(a!=b)| {min_off:.1e}; converse fails at a=1, b=1+i (u={counter:.0e})"
    ))
}

fn eigen_consistency() -> Outcome {
    let start = Instant::now();
    let mut r = rng(5);
    let (mut poly, mut mat, mut roots) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let pc = PhysicalConstants::new(r.gen_range(0.5..2.0), r.gen_range(0.5..2.0)).unwrap();
        let mut u = QuaternionicPotential::new(
            r.gen_range(-3.0..3.0),
            r.gen_range(-3.0..3.0),
            r.gen_range(-3.0..3.0),
            r.gen_range(-3.0..3.0),
        );
        if u.u1.norm() < 1e-3 {
            u.u1 = c(0.5, 0.0);
        }
        let e = ComplexEnergy::new(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        let (ra, rb) = brute_eigen(&u, e);
        let scale = char_poly_scale(&u, e);
        let mag = scale.sqrt();
        for branch in Sign::BOTH {
            let (lam, _, _) = left::self_interacting_kinetic(&u, e, branch);
            let cos = r.gen_range(0.05..1.0) * if lam.im < 0.0 { -1.0 } else { 1.0 };
            let s = solve_self_interacting(&u, e, cos, branch, pc).map_err(|e| e.to_string())?;
            let kk = s.k.k_dot_k();
            poly = poly.max(char_poly_residual(kk, &u, e, pc).norm() / scale);
            let a0 = rand_c(&mut r, -1.0, 1.0);
            let (m0, m1) = matrix_residual(a0, s.a1(a0), kk, &u, e, pc);
            let v = a0.norm().hypot(s.a1(a0).norm());
            mat = mat.max(m0.norm().hypot(m1.norm()) / (v * mag));
            let l = kk * pc.kinetic_factor();
            roots = roots.max((l - ra).norm().min((l - rb).norm()) / mag);
        }
    }
    let t = start.elapsed();
    ensure(poly < 1e-9, || format!("char poly residual {poly:.2e}"))?;
    ensure(mat < 1e-9, || format!("matrix residual {mat:.2e}"))?;
    ensure(roots < 1e-9, || format!("brute-force root gap {roots:.2e}"))?;
    within_time(t, 10.0)?;
    Ok(format!(
        "10^3 draws x 2 branches: char poly {poly:.1e}, matrix {mat:.1e}, roots {roots:.1e} in {t:.2?}"
    ))
}

fn stationary_example() -> Outcome {
    let pc = PhysicalConstants::default();
    let u = QuaternionicPotential::new(1.0, 0.0, 5f64.sqrt(), 0.0);
    let e = ComplexEnergy::new(0.0, 3.0);
    let s = solve_self_interacting(&u, e, 1.0, Sign::Minus, pc).map_err(|e| e.to_string())?;
    let y = s.y0.norm();
    let a0 = c(0.8, -0.3);
    let (m0, m1) = matrix_residual(a0, s.a1(a0), s.k.k_dot_k(), &u, e, pc);
    ensure(s.k.k0 == 0.0, || format!("k0 = {}", s.k.k0))?;
    ensure((s.k.k1 * s.k.k1 - 2.0).abs() < 1e-12, || {
        format!("k1^2 = {}", s.k.k1 * s.k.k1)
    })?;
    ensure((y - 1.0 / 5f64.sqrt()).abs() < 1e-12 && y < 1.0, || {
        format!("|Y0| = {y}")
    })?;
    ensure(m0.norm().hypot(m1.norm()) < 1e-12, || "matrix residual".into())?;
    Ok(format!(
        "k0 = {}, k1^2 = {:.15}, Y0 = {:.15}, matrix residual {:.1e}",
        s.k.k0,
        s.k.k1 * s.k.k1,
        s.y0.re,
        m0.norm().hypot(m1.norm())
    ))
}

fn right_checks() -> Outcome {
    let mut r = rng(7);
    let mut factor = 0.0f64;
    let mut real_part = 0.0f64;
    for _ in 0..1000 {
        let pc = PhysicalConstants::new(r.gen_range(0.5..2.0), r.gen_range(0.5..2.0)).unwrap();
        let u = QuaternionicPotential::new(
            r.gen_range(-3.0..3.0),
            r.gen_range(-3.0..3.0),
            r.gen_range(-3.0..3.0),
            r.gen_range(-3.0..3.0),
        );
        let e = ComplexEnergy::new(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        let scale = 1.0f64.max(u.as_quaternion().norm_sqr()).max(e.as_complex().norm_sqr());
        for s in Sign::BOTH {
            let sol = solve_right_1d(&u, e, s, pc).map_err(|e| e.to_string())?;
            let (re, im) = right_char_residual(sol.k.k_dot_k(), &u, e, pc);
            factor = factor.max(im.abs() / scale);
            real_part = real_part.max(re.abs() / scale);
        }
    }
    ensure(factor < 1e-10, || format!("imaginary factor {factor:.2e}"))?;
    ensure(real_part < 1e-10, || format!("real part {real_part:.2e}"))?;

    // Decoupled limit: U1 = 0 with the root sign that reproduces V1.
    let mut dec = 0.0f64;
    for _ in 0..1000 {
        let pc = PhysicalConstants::new(r.gen_range(0.5..2.0), r.gen_range(0.5..2.0)).unwrap();
        let v1 = r.gen_range(-3.0..3.0);
        let u = QuaternionicPotential::new(r.gen_range(-3.0..3.0), v1, 0.0, 0.0);
        let e = ComplexEnergy::new(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        let root = if v1 >= 0.0 { Sign::Plus } else { Sign::Minus };
        let lim = complex_particle::complex_kinetic(u.complex_part(), e).im;
        let cos = r.gen_range(0.05..1.0) * if lim < 0.0 { -1.0 } else { 1.0 };
        let a = solve_right(&u, e, cos, root, pc).map_err(|e| e.to_string())?;
        let b = solve_dispersion(u.complex_part(), e, cos, pc).map_err(|e| e.to_string())?;
        let m = 1.0f64.max(b.k0).max(b.k1);
        dec = dec.max((a.k.k0 - b.k0).abs().max((a.k.k1 - b.k1).abs()) / m);
    }
    ensure(dec <= 1e-12, || format!("decoupled mismatch {dec:.2e}"))?;

    // Stationary wave numbers with E0 = 0 are never compatible with
    // self-interaction; every self-interacting solution has K0 != 0.
    let mut wrong = 0;
    let mut cases = 0;
    for i in 0..10 {
        for j in 0..10 {
            let k1 = 0.2 + 0.3 * i as f64;
            let e1 = -2.0 + 0.45 * j as f64;
            let stationary = WaveVectorPair::new(0.0, k1, 1.0);
            if self_interaction_feasible(&stationary, ComplexEnergy::new(0.0, e1), PhysicalConstants::default()) {
                wrong += 1;
            }
            let u = QuaternionicPotential::new(0.0, 0.0, 0.1 + 0.2 * i as f64, 0.0);
            let sol = solve_right_1d(
                &u,
                ComplexEnergy::new(0.0, e1),
                Sign::Plus,
                PhysicalConstants::default(),
            )
            .map_err(|e| e.to_string())?;
            if sol.k.k0 == 0.0 || !sol.self_interaction_feasible {
                wrong += 1;
            }
            cases += 1;
        }
    }
    ensure(wrong == 0, || format!("{wrong} misclassified of {cases}"))?;
    Ok(format!(
        "factor {factor:.1e}, real part {real_part:.1e} over 2x10^3 solves; decoupled {dec:.1e}; {cases} grid cases classified"
    ))
}

fn free_wave(k: f64, e0: f64) -> QuaternionicWave {
    QuaternionicWave::new(
        ComponentWave::new(c(1.0, 0.0), c(0.0, k), c(e0, 0.5 * k * k)),
        ComponentWave::ZERO,
    )
}

fn fitted_order(ns: &[usize], res: &[f64]) -> f64 {
    // Least-squares slope of log(res) against log(n).
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = res.iter().map(|r| r.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    -num / den
}

fn oracle_convergence() -> Outcome {
    let start = Instant::now();
    let pc = PhysicalConstants::default();
    let ns = [64usize, 128, 256, 512];
    let mut waves: Vec<(&str, Equation, QuaternionicWave, QuaternionicPotential)> = Vec::new();

    let pot = ComplexPotential::new(0.4, 0.3);
    let e = ComplexEnergy::new(0.1, 2.0);
    let k = complex_particle::solve_dispersion_1d(pot, e, pc).map_err(|e| e.to_string())?;
    waves.push((
        "complex",
        Equation::Left,
        QuaternionicWave::complex(&PlaneWave::new(c(1.0, 0.0), k, e)),
        QuaternionicPotential::from_complex(pot),
    ));
    let u = QuaternionicPotential::new(0.3, -0.2, 0.8, 0.5);
    for b in Sign::BOTH {
        let s = left::solve_self_interacting_1d(&u, ComplexEnergy::new(0.1, 1.4), b, pc).map_err(|e| e.to_string())?;
        waves.push(("self-interacting", Equation::Left, s.wave(c(0.6, 0.2)), u));
    }
    let ur = QuaternionicPotential::new(1.5, 0.0, 1.0, 0.0);
    let er = ComplexEnergy::new(0.0, 1.5);
    let sr = solve_right_1d(&ur, er, Sign::Plus, pc).map_err(|e| e.to_string())?;
    let pairs = qhparticle_core::oracle::eigen2(qhparticle_core::quaternionic_right::right_matrix(&ur, er));
    let (_, v) = if (pairs[0].0 - sr.kinetic).norm() < (pairs[1].0 - sr.kinetic).norm() {
        pairs[0]
    } else {
        pairs[1]
    };
    let y = (v[1] / v[0]).conj();
    let a0 = c(1.0, 0.0);
    waves.push((
        "right",
        Equation::Right,
        QuaternionicWave::conjugate_pair(a0, y * a0.conj(), sr.k.signed_k(), er.as_complex()),
        ur,
    ));

    let mut orders = Vec::new();
    for (name, eq, w, u) in &waves {
        let res: Vec<f64> = ns
            .iter()
            .map(|&n| pde_residual(*eq, w, u, &Grid1D::spatial(-1.0, 1.0, n).unwrap(), &[0.0, 0.4], pc))
            .collect();
        let order = fitted_order(&ns, &res);
        ensure((order - 2.0).abs() <= 0.2, || {
            format!("{name}: order {order:.3} from {res:?}")
        })?;
        orders.push(order);
    }
    // Negative control: perturbed wave number stalls.
    let bad = waves[0].2.with_k_scaled(1.1);
    let stalled: Vec<f64> = ns
        .iter()
        .map(|&n| {
            pde_residual(
                Equation::Left,
                &bad,
                &waves[0].3,
                &Grid1D::spatial(-1.0, 1.0, n).unwrap(),
                &[0.0],
                pc,
            )
        })
        .collect();
    ensure(stalled[3] > 1e-2, || {
        format!("perturbed residual {:.2e} converged", stalled[3])
    })?;

    // One period of a stationary free particle.
    let w = free_wave(1.0, 0.0);
    let period = TAU / 0.5;
    let probe = Grid1D::spatial(0.0, TAU, 256).unwrap();
    let steps = (period / probe.stability_bound(pc)).ceil() as usize;
    let g = Grid1D::new(0.0, TAU, 256, period / steps as f64, steps).unwrap();
    let out = evolve(
        Equation::Left,
        &FieldState::sample(&w, &g, 0.0, pc),
        &QuaternionicPotential::default(),
        &g,
        pc,
    )
    .map_err(|e| e.to_string())?;
    let period_err = out.max_distance(&FieldState::sample(&w, &g, out.t, pc));
    ensure(period_err < 1e-4, || format!("period error {period_err:.2e}"))?;

    // Decaying mode: V1 = -E0 keeps K0 = 0.
    let e0 = 0.25;
    let wd = free_wave(2.0, e0);
    let ud = QuaternionicPotential::new(0.0, -e0, 0.0, 0.0);
    let gd = Grid1D::new(0.0, TAU, 128, 2e-4, 5000).unwrap();
    let s0 = FieldState::sample(&wd, &gd, 0.0, pc);
    let s1 = evolve(Equation::Left, &s0, &ud, &gd, pc).map_err(|e| e.to_string())?;
    let ratio = s1.norm(&gd) / s0.norm(&gd);
    let want = (-2.0 * e0 * s1.t / pc.hbar()).exp();
    let decay_err = (ratio / want - 1.0).abs();
    ensure(decay_err < 1e-3, || format!("decay ratio error {decay_err:.2e}"))?;

    let t = start.elapsed();
    within_time(t, 60.0)?;
    let shown: Vec<String> = orders.iter().map(|o| format!("{o:.3}")).collect();
    Ok(format!(
        "orders [{}]; period error {period_err:.1e}; decay error {decay_err:.1e} in {t:.2?}",
        shown.join(", ")
    ))
}

/// Compares quadrature with a closed-form record, relative to
/// `max(|closed|, natural size of the operator on this field)`.
fn compare_expectations(
    wave: &QuaternionicWave,
    u: &QuaternionicPotential,
    closed: &complex_particle::Expectations,
    l: f64,
    pc: PhysicalConstants,
) -> Result<(f64, f64), String> {
    let g = Grid1D::spatial(0.0, l, 512).unwrap();
    let f = FieldState::sample(wave, &g, 0.0, pc);
    let rate = FieldState::sample_rate(wave, &g, 0.0, pc);
    let kmax = wave.c0.k.norm().max(wave.c1.k.norm());
    let emax = wave.c0.energy.norm().max(wave.c1.energy.norm());
    let n = closed.norm;
    let ops = [
        (Operator::Energy(&rate), closed.energy, n * emax),
        (Operator::Momentum, closed.momentum, n * pc.hbar() * kmax),
        (Operator::MomentumSq, closed.momentum_sq, n * (pc.hbar() * kmax).powi(2)),
        (Operator::Potential(*u), closed.potential, n * u.as_quaternion().norm()),
    ];
    let (mut worst, mut imag) = (0.0f64, 0.0f64);
    for (op, want, natural) in ops {
        let q = quadrature_expectation(&f, op, &g, pc).map_err(|e| e.to_string())?;
        worst = worst.max((q.value - want).abs() / want.abs().max(natural));
        imag = imag.max(q.imaginary);
    }
    Ok((worst, imag))
}

fn expectation_agreement() -> Outcome {
    let mut r = rng(9);
    let (mut worst, mut imag) = (0.0f64, 0.0f64);
    let mut count = 0;
    for _ in 0..20 {
        let pc = PhysicalConstants::new(r.gen_range(0.7..1.5), r.gen_range(0.7..1.5)).unwrap();
        let e0 = r.gen_range(-0.5..0.5);
        let v0 = r.gen_range(-1.0..1.0);
        let a0 = rand_c(&mut r, -1.0, 1.0);

        // Complex particle with V1 = -E0 (K0 = 0).
        let pot = ComplexPotential::new(v0, -e0);
        let e = ComplexEnergy::new(e0, v0 + r.gen_range(0.2..3.0));
        let k = solve_dispersion(pot, e, 1.0, pc).map_err(|e| e.to_string())?;
        let l = TAU / k.k1;
        let pw = PlaneWave::new(a0, k, e);
        let closed = expectations(&pw, pot, Domain::new(0.0, l).unwrap(), 0.0, pc);
        let (w1, i1) = compare_expectations(
            &QuaternionicWave::complex(&pw),
            &QuaternionicPotential::from_complex(pot),
            &closed,
            l,
            pc,
        )?;

        // Non-interacting pair with commensurate wave numbers k and 2k.
        let k_cal = 2.0 * k.k1;
        let e_cal = ComplexEnergy::new(e0, v0 + pc.kinetic_factor() * k_cal * k_cal);
        let mode = left::solve_noninteracting(pot, e, e_cal, 1.0, pc)
            .map_err(|e| e.to_string())?
            .with_amplitudes(a0, rand_c(&mut r, -1.0, 1.0));
        let closed = left::expectations_noninteracting(&mode, pot, Domain::new(0.0, l).unwrap(), 0.0, pc);
        let (w2, i2) = compare_expectations(&mode.wave(), &QuaternionicPotential::from_complex(pot), &closed, l, pc)?;

        // Self-interacting with a fully quaternionic U: V1 = -E0, |U1| < |E1|,
        // minus branch below sqrt(E1^2 - |U1|^2) so the root is real and
        // negative.
        let e1: f64 = r.gen_range(1.0..3.0) * if r.gen_bool(0.5) { 1.0 } else { -1.0 };
        let u1 = Complex::from_polar(r.gen_range(0.1..0.9) * e1.abs(), r.gen_range(0.0..TAU));
        let root = (e1 * e1 - u1.norm_sqr()).sqrt();
        let u = QuaternionicPotential::new(root - r.gen_range(0.2..2.0), -e0, u1.re, u1.im);
        let es = ComplexEnergy::new(e0, e1);
        let s = solve_self_interacting(&u, es, 1.0, Sign::Minus, pc).map_err(|e| e.to_string())?;
        ensure(s.k.k0 == 0.0, || format!("self-interacting draw has k0 = {}", s.k.k0))?;
        let l = TAU / s.k.k1;
        let closed = left::expectations_self_interacting(&s, a0, u.v0(), Domain::new(0.0, l).unwrap(), 0.0, pc);
        let (w3, i3) = compare_expectations(&s.wave(a0), &u, &closed, l, pc)?;

        worst = worst.max(w1).max(w2).max(w3);
        imag = imag.max(i1).max(i2).max(i3);
        count += 3;
    }
    ensure(worst < 1e-6, || format!("relative disagreement {worst:.2e}"))?;
    ensure(imag < 1e-12, || format!("imaginary part {imag:.2e}"))?;
    Ok(format!(
        "{count} fields x 4 operators: max rel err {worst:.1e}, max imaginary {imag:.1e}"
    ))
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qhparticle"))
        .args(args)
        .output()
        .expect("spawn qhparticle")
}

fn cli_determinism() -> Outcome {
    let mut configs: Vec<PathBuf> = std::fs::read_dir(configs_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    configs.sort();
    ensure(!configs.is_empty(), || "no shipped configs".into())?;
    let mut compared = 0;
    for path in &configs {
        let p = path.to_str().unwrap();
        let v = run_cli(&["verify", "--config", p]);
        ensure(v.status.code() == Some(0), || {
            format!(
                "verify {} exited {:?}: {}",
                p,
                v.status.code(),
                String::from_utf8_lossy(&v.stderr)
            )
        })?;
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        let two_regions = text.matches("[[regions]]").count() == 2;
        let mut cmds = vec!["verify", "dispersion", "classify"];
        if two_regions {
            cmds.push("scatter");
        }
        for cmd in cmds {
            let a = run_cli(&[cmd, "--config", p]);
            let b = run_cli(&[cmd, "--config", p]);
            ensure(a.status.code() == Some(0), || {
                format!("{cmd} {p} exited {:?}", a.status.code())
            })?;
            ensure(a.stdout == b.stdout && !a.stdout.is_empty(), || {
                format!("{cmd} {p}: output differs")
            })?;
            compared += 1;
        }
    }
    Ok(format!(
        "verify exits 0 on {} configs; {compared} command outputs byte-identical across runs",
        configs.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("algebra suite", algebra),
        ("complex dispersion closure", complex_closure),
        ("standard-QM regression", standard_qm),
        ("scattering identities", scattering_identities),
        ("self-interacting eigen-consistency", eigen_consistency),
        ("stationary self-interacting closed form", stationary_example),
        ("right-equation checks", right_checks),
        ("oracle convergence", oracle_convergence),
        ("expectation agreement", expectation_agreement),
        ("CLI determinism and golden files", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(f) {
            Ok(Ok(detail)) => println!("PASS criterion {:>2} {name}: {detail}", i + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {why}", i + 1);
            }
            Err(_) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: panicked", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
