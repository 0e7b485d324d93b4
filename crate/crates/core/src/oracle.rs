//! Independent numerical checks of the closed forms.
//!
//! Nothing here calls a closed-form solver. The wave equations are
//! discretised on a periodic grid and treated as real-linear systems in
//! `(Re psi0, Im psi0, Re psi1, Im psi1)`; eigenvalues come from the trace
//! and determinant of the 2x2 matrix; expectation values are quadratures of
//! `Re[conj(Psi) O Psi]`.

use crate::algebra::{left_i_mul, qconj, qmul, Complex, Quaternion};
use crate::complex_particle::{ComplexEnergy, PhysicalConstants};
use crate::error::{Result, SolveError};
use crate::quaternionic_left::{coupled_rhs, left_matrix, QuaternionicPotential};
use crate::quaternionic_right::coupled_rhs_right;
use crate::wave::QuaternionicWave;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equation {
    /// `hbar i dPsi/dt = H Psi`.
    Left,
    /// `hbar (dPsi/dt) i = H Psi`.
    Right,
}

/// Periodic grid `x_i = x_min + i dx`, `dx = (x_max - x_min) / n_points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    pub dt: f64,
    pub n_steps: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_points: usize, dt: f64, n_steps: usize) -> Result<Self> {
        if n_points < 8 {
            return Err(SolveError::InvalidInput(format!("n_points = {n_points} < 8")));
        }
        if x_max <= x_min || !x_min.is_finite() || !x_max.is_finite() {
            return Err(SolveError::InvalidInput(format!("empty box [{x_min}, {x_max}]")));
        }
        if dt <= 0.0 || !(dt * n_steps as f64).is_finite() {
            return Err(SolveError::InvalidInput(format!(
                "dt = {dt} must be positive and finite"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
            dt,
            n_steps,
        })
    }

    /// Grid for quadrature or residuals only (`dt = 1`, no steps).
    pub fn spatial(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        Self::new(x_min, x_max, n_points, 1.0, 0)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n_points as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + self.dx() * i as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.x(i))
    }

    /// Explicit stability limit `0.2 dx^2 2m / hbar`.
    pub fn stability_bound(&self, pc: PhysicalConstants) -> f64 {
        0.2 * self.dx() * self.dx() * 2.0 * pc.mass() / pc.hbar()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub psi0: Vec<Complex>,
    pub psi1: Vec<Complex>,
    pub t: f64,
}

impl FieldState {
    pub fn zeros(grid: &Grid1D, t: f64) -> Self {
        let z = vec![Complex::new(0.0, 0.0); grid.n_points()];
        Self {
            psi0: z.clone(),
            psi1: z,
            t,
        }
    }

    /// Samples `wave` at time `t`.
    pub fn sample(wave: &QuaternionicWave, grid: &Grid1D, t: f64, pc: PhysicalConstants) -> Self {
        let (psi0, psi1) = grid.points().map(|x| wave.components(x, t, pc)).unzip();
        Self { psi0, psi1, t }
    }

    /// Samples the analytic `d/dt` of `wave` at time `t`.
    pub fn sample_rate(wave: &QuaternionicWave, grid: &Grid1D, t: f64, pc: PhysicalConstants) -> Self {
        let (psi0, psi1) = grid.points().map(|x| wave.time_derivative(x, t, pc)).unzip();
        Self { psi0, psi1, t }
    }

    /// Centred difference `(next - prev) / (next.t - prev.t)`, stamped at the
    /// midpoint time.
    pub fn centered_rate(prev: &FieldState, next: &FieldState) -> Self {
        let dt = next.t - prev.t;
        let d = |a: &[Complex], b: &[Complex]| a.iter().zip(b).map(|(p, n)| (n - p) / dt).collect();
        Self {
            psi0: d(&prev.psi0, &next.psi0),
            psi1: d(&prev.psi1, &next.psi1),
            t: 0.5 * (prev.t + next.t),
        }
    }

    pub fn len(&self) -> usize {
        self.psi0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi0.is_empty()
    }

    fn check(&self, grid: &Grid1D) -> Result<()> {
        if self.psi0.len() != grid.n_points() || self.psi1.len() != grid.n_points() {
            return Err(SolveError::InvalidInput(format!(
                "field has {}/{} samples, grid has {}",
                self.psi0.len(),
                self.psi1.len(),
                grid.n_points()
            )));
        }
        Ok(())
    }

    /// Trapezoid (periodic) integral of `|psi0|^2 + |psi1|^2`.
    pub fn norm(&self, grid: &Grid1D) -> f64 {
        let s: f64 = self
            .psi0
            .iter()
            .zip(&self.psi1)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .sum();
        s * grid.dx()
    }

    /// Largest pointwise `|Psi - other|`.
    pub fn max_distance(&self, other: &FieldState) -> f64 {
        self.psi0
            .iter()
            .zip(&self.psi1)
            .zip(other.psi0.iter().zip(&other.psi1))
            .map(|((a, b), (c, d))| (a - c).norm().hypot((b - d).norm()))
            .fold(0.0, f64::max)
    }
}

fn rhs(
    eq: Equation,
    psi0: Complex,
    psi1: Complex,
    lap0: Complex,
    lap1: Complex,
    u: &QuaternionicPotential,
    pc: PhysicalConstants,
) -> (Complex, Complex) {
    match eq {
        Equation::Left => coupled_rhs(psi0, psi1, lap0, lap1, u, pc),
        Equation::Right => coupled_rhs_right(psi0, psi1, lap0, lap1, u, pc),
    }
}

/// Largest scaled residual `|i hbar dpsi/dt - H psi|` of an analytic wave over
/// the grid points and `sample_times`, with the Laplacian replaced by the
/// three-point second difference. Each point is scaled by
/// `|Psi| (|E| + hbar^2 |K|^2 / 2m + |U|)`, so the result shrinks as `dx^2`
/// for a consistent wave and tends to a nonzero constant otherwise.
pub fn pde_residual(
    equation: Equation,
    wave: &QuaternionicWave,
    u: &QuaternionicPotential,
    grid: &Grid1D,
    sample_times: &[f64],
    pc: PhysicalConstants,
) -> f64 {
    let h = grid.dx();
    let kmax = wave.c0.k.norm_sqr().max(wave.c1.k.norm_sqr());
    let emax = wave.c0.energy.norm().max(wave.c1.energy.norm());
    let factor = emax + pc.kinetic_factor() * kmax + u.as_quaternion().norm();
    let ih = Complex::new(0.0, pc.hbar());
    let mut worst = 0.0f64;
    for &t in sample_times {
        for x in grid.points() {
            let (p0, p1) = wave.components(x, t, pc);
            let mag = p0.norm().hypot(p1.norm());
            if mag == 0.0 || factor == 0.0 {
                continue;
            }
            let (l0, l1) = wave.components(x - h, t, pc);
            let (r0, r1) = wave.components(x + h, t, pc);
            let lap0 = (l0 - 2.0 * p0 + r0) / (h * h);
            let lap1 = (l1 - 2.0 * p1 + r1) / (h * h);
            let (d0, d1) = wave.time_derivative(x, t, pc);
            let (h0, h1) = rhs(equation, p0, p1, lap0, lap1, u, pc);
            let res = (ih * d0 - h0).norm().hypot((ih * d1 - h1).norm());
            worst = worst.max(res / (mag * factor));
        }
    }
    worst
}

/// Periodic index `i + off` modulo `n`.
fn wrap(i: usize, off: isize, n: usize) -> usize {
    (i as isize + off).rem_euclid(n as isize) as usize
}

/// Fourth-order periodic first derivative.
pub fn derivative(f: &[Complex], dx: f64) -> Vec<Complex> {
    let n = f.len();
    (0..n)
        .map(|i| {
            (f[wrap(i, -2, n)] - 8.0 * f[wrap(i, -1, n)] + 8.0 * f[wrap(i, 1, n)] - f[wrap(i, 2, n)]) / (12.0 * dx)
        })
        .collect()
}

/// Fourth-order periodic second derivative.
pub fn second_derivative(f: &[Complex], dx: f64) -> Vec<Complex> {
    let n = f.len();
    (0..n)
        .map(|i| {
            (-f[wrap(i, -2, n)] + 16.0 * f[wrap(i, -1, n)] - 30.0 * f[i] + 16.0 * f[wrap(i, 1, n)] - f[wrap(i, 2, n)])
                / (12.0 * dx * dx)
        })
        .collect()
}

/// Value of [`second_derivative`] on `exp[i k x]`, divided by the mode:
/// `(32 cos(k dx) - 2 cos(2 k dx) - 30) / (12 dx^2)`.
pub fn second_derivative_symbol(k: f64, dx: f64) -> f64 {
    let a = k * dx;
    (32.0 * a.cos() - 2.0 * (2.0 * a).cos() - 30.0) / (12.0 * dx * dx)
}

/// `dPsi/dt` of the discretised system.
fn time_rate(
    eq: Equation,
    psi0: &[Complex],
    psi1: &[Complex],
    u: &QuaternionicPotential,
    dx: f64,
    pc: PhysicalConstants,
) -> (Vec<Complex>, Vec<Complex>) {
    let lap0 = second_derivative(psi0, dx);
    let lap1 = second_derivative(psi1, dx);
    let inv = Complex::new(0.0, -1.0 / pc.hbar());
    (0..psi0.len())
        .map(|i| {
            let (h0, h1) = rhs(eq, psi0[i], psi1[i], lap0[i], lap1[i], u, pc);
            (inv * h0, inv * h1)
        })
        .unzip()
}

fn axpy(y: &[Complex], a: f64, x: &[Complex]) -> Vec<Complex> {
    y.iter().zip(x).map(|(y, x)| y + x * a).collect()
}

/// Classical fourth-order Runge-Kutta for `grid.n_steps` steps of
/// `grid.dt`, with the fourth-order periodic Laplacian.
pub fn evolve(
    equation: Equation,
    initial: &FieldState,
    u: &QuaternionicPotential,
    grid: &Grid1D,
    pc: PhysicalConstants,
) -> Result<FieldState> {
    initial.check(grid)?;
    let bound = grid.stability_bound(pc);
    if grid.dt > bound {
        return Err(SolveError::StabilityViolation { dt: grid.dt, bound });
    }
    let dt = grid.dt;
    let dx = grid.dx();
    let mut p0 = initial.psi0.clone();
    let mut p1 = initial.psi1.clone();
    for _ in 0..grid.n_steps {
        let (a0, a1) = time_rate(equation, &p0, &p1, u, dx, pc);
        let (b0, b1) = time_rate(
            equation,
            &axpy(&p0, 0.5 * dt, &a0),
            &axpy(&p1, 0.5 * dt, &a1),
            u,
            dx,
            pc,
        );
        let (c0, c1) = time_rate(
            equation,
            &axpy(&p0, 0.5 * dt, &b0),
            &axpy(&p1, 0.5 * dt, &b1),
            u,
            dx,
            pc,
        );
        let (d0, d1) = time_rate(equation, &axpy(&p0, dt, &c0), &axpy(&p1, dt, &c1), u, dx, pc);
        for i in 0..p0.len() {
            p0[i] += (a0[i] + 2.0 * b0[i] + 2.0 * c0[i] + d0[i]) * (dt / 6.0);
            p1[i] += (a1[i] + 2.0 * b1[i] + 2.0 * c1[i] + d1[i]) * (dt / 6.0);
        }
    }
    Ok(FieldState {
        psi0: p0,
        psi1: p1,
        t: initial.t + dt * grid.n_steps as f64,
    })
}

/// Both roots of `l^2 - tr l + det` by the cancellation-free quadratic
/// formula: the root of larger magnitude directly, the other as `det / q`.
pub fn quadratic_roots(tr: Complex, det: Complex) -> (Complex, Complex) {
    let b = -tr;
    let sq = (b * b - 4.0 * det).sqrt();
    let s = if (b.conj() * sq).re >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + s * sq);
    if q == Complex::new(0.0, 0.0) {
        return (q, q);
    }
    (q, det / q)
}

/// Eigenvalues and eigenvectors of a complex 2x2 matrix.
pub fn eigen2(m: [[Complex; 2]; 2]) -> [(Complex, [Complex; 2]); 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let (l1, l2) = quadratic_roots(tr, det);
    let zero = Complex::new(0.0, 0.0);
    let one = Complex::new(1.0, 0.0);
    let vector = |l: Complex, fallback: [Complex; 2]| {
        // Rows of (M - l) are orthogonal to the eigenvector; use the longer.
        let a = [m[0][1], l - m[0][0]];
        let b = [l - m[1][1], m[1][0]];
        let na = a[0].norm_sqr() + a[1].norm_sqr();
        let nb = b[0].norm_sqr() + b[1].norm_sqr();
        let v = if na >= nb { a } else { b };
        let n = na.max(nb).sqrt();
        if n == 0.0 {
            fallback
        } else {
            [v[0] / n, v[1] / n]
        }
    };
    if m[0][1] == zero && m[1][0] == zero {
        // Diagonal: pair each root with its own axis.
        let (d1, d2) = if (l1 - m[0][0]).norm() <= (l1 - m[1][1]).norm() {
            ([one, zero], [zero, one])
        } else {
            ([zero, one], [one, zero])
        };
        return [(l1, d1), (l2, d2)];
    }
    [(l1, vector(l1, [one, zero])), (l2, vector(l2, [zero, one]))]
}

/// Roots `l = hbar^2 K.K / 2m` of the left characteristic polynomial,
/// from the trace and determinant of the left matrix.
pub fn brute_eigen(u: &QuaternionicPotential, e: ComplexEnergy) -> (Complex, Complex) {
    let m = left_matrix(u, e);
    quadratic_roots(m[0][0] + m[1][1], m[0][0] * m[1][1] - m[0][1] * m[1][0])
}

/// Operators for [`quadrature_expectation`].
#[derive(Debug, Clone, Copy)]
pub enum Operator<'a> {
    /// `i hbar d/dt`, with `dPsi/dt` supplied on the same grid.
    Energy(&'a FieldState),
    /// `-i hbar d/dx`.
    Momentum,
    /// `-hbar^2 d^2/dx^2`.
    MomentumSq,
    /// Left multiplication by `U`.
    Potential(QuaternionicPotential),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Imaginary quaternion part of the symmetrised integrand, integrated
    /// in absolute value and divided by `max(|value|, norm-weighted scale)`.
    pub imaginary: f64,
}

/// `(1/2) Int [Psi^dag O Psi + (O Psi)^dag Psi] dx` by the periodic
/// trapezoid rule. Imaginary units act from the left, so `O Psi` for the
/// momentum is `-hbar i dPsi/dx` with `i` multiplying both components.
pub fn quadrature_expectation(
    field: &FieldState,
    op: Operator<'_>,
    grid: &Grid1D,
    pc: PhysicalConstants,
) -> Result<QuadratureResult> {
    field.check(grid)?;
    let dx = grid.dx();
    let hbar = pc.hbar();
    let o_psi: Vec<Quaternion> = match op {
        Operator::Energy(rate) => {
            rate.check(grid)?;
            rate.psi0
                .iter()
                .zip(&rate.psi1)
                .map(|(a, b)| left_i_mul(Quaternion::new(*a, *b)) * hbar)
                .collect()
        }
        Operator::Momentum => {
            let d0 = derivative(&field.psi0, dx);
            let d1 = derivative(&field.psi1, dx);
            d0.iter()
                .zip(&d1)
                .map(|(a, b)| left_i_mul(Quaternion::new(*a, *b)) * -hbar)
                .collect()
        }
        Operator::MomentumSq => {
            let d0 = second_derivative(&field.psi0, dx);
            let d1 = second_derivative(&field.psi1, dx);
            d0.iter()
                .zip(&d1)
                .map(|(a, b)| Quaternion::new(*a, *b) * -(hbar * hbar))
                .collect()
        }
        Operator::Potential(u) => {
            let uq = u.as_quaternion();
            field
                .psi0
                .iter()
                .zip(&field.psi1)
                .map(|(a, b)| qmul(uq, Quaternion::new(*a, *b)))
                .collect()
        }
    };
    let mut value = 0.0;
    let mut imag = 0.0;
    let mut scale = 0.0;
    for (i, o) in o_psi.iter().enumerate() {
        let psi = Quaternion::new(field.psi0[i], field.psi1[i]);
        let q = (qmul(qconj(psi), *o) + qmul(qconj(*o), psi)) * 0.5;
        value += q.w();
        imag += q.imag_norm();
        scale += psi.norm() * o.norm();
    }
    let value = value * dx;
    let denom = (scale * dx).max(value.abs());
    Ok(QuadratureResult {
        value,
        imaginary: if denom == 0.0 { 0.0 } else { imag * dx / denom },
    })
}
