//! Invariant-based reverse engineering of the atom-a control field.
//!
//! The two-level problem lives on `(|rξ₋⟩, |ξ₊ξ₋⟩)` with
//! `H_eff = (Ω_x σ_x + Ω_y σ_y)/2`. The invariant is parameterized by
//! `μ₁(t) = π sin²(πt/T)` and `μ₂(t)`, where `μ₂` follows from
//! `χ(μ₁) = η[2μ₁ − sin 2μ₁]`. Differentiating the relation `χ = μ₂ + 2α₂`
//! gives `χ̇ = μ̇₂ / cos μ₁`, so on the first half
//! `μ₂ = (4η/3) sin³μ₁` exactly and `tan μ₁·μ̇₂ = 4η sin³μ₁ μ̇₁`. Every
//! expression below is written in that pole-free form.

use std::f64::consts::PI;
use std::io::{self, Write};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::drive::ControlField;
use crate::error::{Error, Result};
use crate::operator::{Operator, State, I, ONE, ZERO};

pub const EFFECTIVE_BASIS: &str = "effective";
pub const DEFAULT_SAMPLES: usize = 4096;
pub const PULSE_CSV_HEADER: &str = "t,omega_x,omega_y,omega_a,phi_a,mu1,mu2";

/// `π sin²(πt/T)`.
pub fn mu1_profile(t: f64, duration: f64) -> f64 {
    let s = (PI * t / duration).sin();
    PI * s * s
}

/// `(π²/T) sin(2πt/T)`.
pub fn mu1_rate(t: f64, duration: f64) -> f64 {
    PI * PI / duration * (2.0 * PI * t / duration).sin()
}

/// `(4η/3) sin³μ₁` on `[0, T/2]`, `−Θ_g + (4η/3) sin³μ₁` on `(T/2, T]`.
pub fn mu2_profile(t: f64, duration: f64, eta: f64, theta_g: f64) -> f64 {
    let s = mu1_profile(t, duration).sin();
    let smooth = 4.0 * eta * s * s * s / 3.0;
    if t > 0.5 * duration {
        smooth - theta_g
    } else {
        smooth
    }
}

/// Smooth part of `μ̇₂`: `4η sin²μ₁ cos μ₁ μ̇₁`.
pub fn mu2_rate(t: f64, duration: f64, eta: f64) -> f64 {
    let m1 = mu1_profile(t, duration);
    let s = m1.sin();
    4.0 * eta * s * s * m1.cos() * mu1_rate(t, duration)
}

/// `η[2μ₁ − sin 2μ₁]`, plus `Θ_g` after the midpoint.
pub fn chi_profile(t: f64, duration: f64, eta: f64, theta_g: f64) -> f64 {
    let m1 = mu1_profile(t, duration);
    let base = eta * (2.0 * m1 - (2.0 * m1).sin());
    if t > 0.5 * duration {
        base + theta_g
    } else {
        base
    }
}

/// One grid point of the invariant parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub mu1_dot: f64,
    pub mu2_dot: f64,
    pub chi: f64,
}

/// Phase rates along the two invariant eigenvectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseRates {
    pub dynamic_1: f64,
    pub geometric_1: f64,
    pub dynamic_2: f64,
    pub geometric_2: f64,
}

/// The invariant parameter trajectory and the control field it defines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantTrajectory {
    duration: f64,
    eta: f64,
    theta_g: f64,
    u: f64,
}

impl InvariantTrajectory {
    /// `Θ_g = π`, `u = 1`.
    pub fn new(duration: f64, eta: f64) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidParameter(format!("duration must be positive, got {duration}")));
        }
        if !eta.is_finite() {
            return Err(Error::InvalidParameter(format!("η must be finite, got {eta}")));
        }
        Ok(Self { duration, eta, theta_g: PI, u: 1.0 })
    }

    pub fn with_geometric_phase(mut self, theta_g: f64) -> Self {
        self.theta_g = theta_g;
        self
    }

    pub fn with_scale(mut self, u: f64) -> Self {
        self.u = u;
        self
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn geometric_phase(&self) -> f64 {
        self.theta_g
    }

    pub fn scale(&self) -> f64 {
        self.u
    }

    pub fn mu1(&self, t: f64) -> f64 {
        mu1_profile(t, self.duration)
    }

    pub fn mu1_dot(&self, t: f64) -> f64 {
        mu1_rate(t, self.duration)
    }

    pub fn mu2(&self, t: f64) -> f64 {
        mu2_profile(t, self.duration, self.eta, self.theta_g)
    }

    pub fn mu2_dot(&self, t: f64) -> f64 {
        mu2_rate(t, self.duration, self.eta)
    }

    pub fn chi(&self, t: f64) -> f64 {
        chi_profile(t, self.duration, self.eta, self.theta_g)
    }

    /// `tan μ₁ · μ̇₂ = 4η sin³μ₁ μ̇₁`.
    pub fn tan_mu1_mu2_dot(&self, t: f64) -> f64 {
        let s = self.mu1(t).sin();
        4.0 * self.eta * s * s * s * self.mu1_dot(t)
    }

    pub fn point(&self, t: f64) -> TrajectoryPoint {
        TrajectoryPoint {
            t,
            mu1: self.mu1(t),
            mu2: self.mu2(t),
            mu1_dot: self.mu1_dot(t),
            mu2_dot: self.mu2_dot(t),
            chi: self.chi(t),
        }
    }

    /// `n + 1` uniform points on `[0, T]`; `n` must be even so that `T/2` is a grid point.
    pub fn grid(&self, n: usize) -> Result<Vec<f64>> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidParameter(format!("grid needs an even interval count ≥ 2, got {n}")));
        }
        let h = self.duration / n as f64;
        Ok((0..=n).map(|k| if k == n { self.duration } else { k as f64 * h }).collect())
    }

    pub fn samples(&self, n: usize) -> Result<Vec<TrajectoryPoint>> {
        Ok(self.grid(n)?.into_iter().map(|t| self.point(t)).collect())
    }

    /// `(Ω_x, Ω_y)` at `t`; zero outside `[0, T]`.
    pub fn fields(&self, t: f64) -> (f64, f64) {
        if !(0.0..=self.duration).contains(&t) {
            return (0.0, 0.0);
        }
        let (s2, c2) = self.mu2(t).sin_cos();
        let tm = self.tan_mu1_mu2_dot(t);
        let m1d = self.mu1_dot(t);
        (s2 * tm - c2 * m1d, c2 * tm + s2 * m1d)
    }

    /// `θ̇₁, Θ̇₁, θ̇₂, Θ̇₂` excluding the `Θ_g` step of `Θ₂` at `T/2`.
    pub fn phase_rates(&self, t: f64) -> PhaseRates {
        let m1 = self.mu1(t);
        let m1d = self.mu1_dot(t);
        let s = m1.sin();
        let half = (0.5 * m1).sin();
        // μ̇₂ sin²μ₁ / (2 cos μ₁) with the cos μ₁ cancelled
        let dynamic_2 = 2.0 * self.eta * s.powi(4) * m1d;
        let geometric_2 = -self.mu2_dot(t) * half * half;
        PhaseRates { dynamic_1: -dynamic_2, geometric_1: -geometric_2, dynamic_2, geometric_2 }
    }

    /// Step of `Θ₂` at `T/2`, where `μ₂` drops by `Θ_g` while `sin²(μ₁/2) = 1`.
    pub fn geometric_jump(&self) -> f64 {
        self.theta_g
    }

    /// `(u/2)(cos μ₁ σ_z + sin μ₁ sin μ₂ σ_x + sin μ₁ cos μ₂ σ_y)`.
    pub fn invariant(&self, t: f64) -> Operator {
        let (m1, m2) = (self.mu1(t), self.mu2(t));
        let (s1, c1) = m1.sin_cos();
        let (s2, c2) = m2.sin_cos();
        let h = 0.5 * self.u;
        let x = h * s1 * s2;
        let y = h * s1 * c2;
        let z = h * c1;
        let m = DMatrix::from_row_slice(2, 2, &[C64::from(z), C64::new(x, -y), C64::new(x, y), C64::from(-z)]);
        Operator::from_matrix_unchecked(EFFECTIVE_BASIS, m)
    }

    /// `(|ϑ₁⟩, |ϑ₂⟩)` in the basis `(|rξ₋⟩, |ξ₊ξ₋⟩)`.
    pub fn eigenvectors(&self, t: f64) -> (State, State) {
        let (m1, m2) = (self.mu1(t), self.mu2(t));
        let (s, c) = (0.5 * m1).sin_cos();
        let v1 = DVector::from_vec(vec![C64::from(c), I * C64::from_polar(s, -m2)]);
        let v2 = DVector::from_vec(vec![I * C64::from_polar(s, m2), C64::from(c)]);
        (
            State::from_vector_unchecked(EFFECTIVE_BASIS, v1),
            State::from_vector_unchecked(EFFECTIVE_BASIS, v2),
        )
    }

    /// Designed field sampled on `n` uniform intervals.
    pub fn schedule(&self, n: usize) -> Result<PulseSchedule> {
        control_fields(self, n)
    }
}

impl ControlField for InvariantTrajectory {
    fn quadratures(&self, t: f64) -> (f64, f64) {
        self.fields(t)
    }

    fn duration(&self) -> f64 {
        self.duration
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![0.5 * self.duration]
    }
}

/// `(Ω_x σ_x + Ω_y σ_y)/2` on `(|rξ₋⟩, |ξ₊ξ₋⟩)`, scaled by `scale`.
pub fn effective_two_level(t: f64, field: &dyn ControlField, scale: f64) -> Operator {
    let c = field.complex_amplitude(t) * scale;
    let m = DMatrix::from_row_slice(2, 2, &[ZERO, c.conj(), c, ZERO]);
    Operator::from_matrix_unchecked(EFFECTIVE_BASIS, m)
}

/// Pauli matrices in the effective basis.
pub fn pauli(which: char) -> Operator {
    let m = match which {
        'x' => [ZERO, ONE, ONE, ZERO],
        'y' => [ZERO, -I, I, ZERO],
        'z' => [ONE, ZERO, ZERO, -ONE],
        _ => [ONE, ZERO, ZERO, ONE],
    };
    Operator::from_matrix_unchecked(EFFECTIVE_BASIS, DMatrix::from_row_slice(2, 2, &m))
}

/// Sampled control quadratures.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSchedule {
    pub times: Vec<f64>,
    pub omega_x: Vec<f64>,
    pub omega_y: Vec<f64>,
    pub mu1: Vec<f64>,
    pub mu2: Vec<f64>,
    pub omega_max: f64,
}

/// Samples the reverse-engineered field on `n` uniform intervals.
pub fn control_fields(trajectory: &InvariantTrajectory, n: usize) -> Result<PulseSchedule> {
    let points = trajectory.samples(n)?;
    let mut out = PulseSchedule {
        times: Vec::with_capacity(points.len()),
        omega_x: Vec::with_capacity(points.len()),
        omega_y: Vec::with_capacity(points.len()),
        mu1: Vec::with_capacity(points.len()),
        mu2: Vec::with_capacity(points.len()),
        omega_max: 0.0,
    };
    for p in points {
        let (x, y) = trajectory.fields(p.t);
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::NonFinite("control field"));
        }
        out.omega_max = out.omega_max.max(x.abs()).max(y.abs());
        out.times.push(p.t);
        out.omega_x.push(x);
        out.omega_y.push(y);
        out.mu1.push(p.mu1);
        out.mu2.push(p.mu2);
    }
    Ok(out)
}

/// `Ω_max` at `n` and `2n` intervals, with the relative change between them.
pub fn omega_max_refined(trajectory: &InvariantTrajectory, n: usize) -> Result<(f64, f64)> {
    let coarse = control_fields(trajectory, n)?.omega_max;
    let fine = control_fields(trajectory, 2 * n)?.omega_max;
    Ok((fine, ((fine - coarse) / fine).abs()))
}

impl PulseSchedule {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn omega_a(&self, k: usize) -> f64 {
        0.5 * self.omega_x[k].hypot(self.omega_y[k])
    }

    pub fn phi_a(&self, k: usize) -> f64 {
        self.omega_y[k].atan2(self.omega_x[k])
    }

    pub fn step(&self) -> f64 {
        if self.times.len() < 2 {
            return 0.0;
        }
        self.times[1] - self.times[0]
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{PULSE_CSV_HEADER}")?;
        for k in 0..self.len() {
            writeln!(
                w,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                self.times[k],
                self.omega_x[k],
                self.omega_y[k],
                self.omega_a(k),
                self.phi_a(k),
                self.mu1[k],
                self.mu2[k]
            )?;
        }
        Ok(())
    }

    /// Index `k` with `times[k] ≤ t < times[k+1]`, clamped to the grid.
    pub fn interval(&self, t: f64) -> usize {
        let n = self.times.len();
        if n < 2 || t <= self.times[0] {
            return 0;
        }
        let h = self.step();
        let k = ((t - self.times[0]) / h).floor() as usize;
        k.min(n - 2)
    }
}

/// Linear interpolation between samples.
impl ControlField for PulseSchedule {
    fn quadratures(&self, t: f64) -> (f64, f64) {
        if self.times.is_empty() {
            return (0.0, 0.0);
        }
        let k = self.interval(t);
        if self.times.len() == 1 {
            return (self.omega_x[0], self.omega_y[0]);
        }
        let w = ((t - self.times[k]) / (self.times[k + 1] - self.times[k])).clamp(0.0, 1.0);
        (
            self.omega_x[k] + w * (self.omega_x[k + 1] - self.omega_x[k]),
            self.omega_y[k] + w * (self.omega_y[k + 1] - self.omega_y[k]),
        )
    }

    fn duration(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.times[1..self.times.len().saturating_sub(1)].to_vec()
    }
}

/// Cumulative composite Simpson integral of `f` on `n` uniform intervals of
/// `[a, b]`, each interval using its midpoint. Returns `n + 1` values, the
/// first being zero.
pub fn cumulative_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / n as f64;
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    let mut acc = 0.0;
    let mut left = f(a);
    for k in 0..n {
        let t0 = a + k as f64 * h;
        let t1 = if k + 1 == n { b } else { t0 + h };
        let right = f(t1);
        acc += h / 6.0 * (left + 4.0 * f(t0 + 0.5 * h) + right);
        out.push(acc);
        left = right;
    }
    out
}

/// `(θ₂(t), Θ₂(t))` on `n` uniform intervals, including the `Θ_g` step of
/// `Θ₂` just after `T/2`. `n` must be even.
pub fn accumulated_phases(trajectory: &InvariantTrajectory, n: usize) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let grid = trajectory.grid(n)?;
    let duration = trajectory.duration();
    let half = n / 2;
    let mid = 0.5 * duration;
    let dyn1 = cumulative_simpson(|t| trajectory.phase_rates(t).dynamic_2, 0.0, mid, half);
    let geo1 = cumulative_simpson(|t| trajectory.phase_rates(t).geometric_2, 0.0, mid, half);
    let dyn2 = cumulative_simpson(|t| trajectory.phase_rates(t).dynamic_2, mid, duration, half);
    let geo2 = cumulative_simpson(|t| trajectory.phase_rates(t).geometric_2, mid, duration, half);
    let mut dynamic = dyn1.clone();
    let mut geometric = geo1.clone();
    let (d0, g0) = (dyn1[half], geo1[half] + trajectory.geometric_jump());
    dynamic.extend(dyn2[1..].iter().map(|x| d0 + x));
    geometric.extend(geo2[1..].iter().map(|x| g0 + x));
    Ok((grid, dynamic, geometric))
}

/// Lewis–Riesenfeld phase `α₂ = θ₂ + Θ₂` on the grid.
pub fn lewis_riesenfeld_phase(trajectory: &InvariantTrajectory, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let (grid, dynamic, geometric) = accumulated_phases(trajectory, n)?;
    Ok((grid, dynamic.iter().zip(&geometric).map(|(a, b)| a + b).collect()))
}

/// `sin²(ηπ)/η²`, with the `η → 0` limit `π²`.
pub fn sensitivity_closed_form(eta: f64) -> f64 {
    if eta.abs() < 1e-12 {
        return PI * PI;
    }
    let s = (eta * PI).sin();
    s * s / (eta * eta)
}

/// `|∫₀ᵀ e^{iχ} μ̇₁ sin²μ₁ dt|²` with `χ = μ₂ + 2α₂` built from the
/// integrated phases rather than the closed-form `χ(μ₁)`. `n` must be even;
/// Simpson weights on the two halves separately.
pub fn sensitivity_quadrature(trajectory: &InvariantTrajectory, n: usize) -> Result<f64> {
    if n % 4 != 0 {
        return Err(Error::InvalidParameter(format!("quadrature needs n divisible by 4, got {n}")));
    }
    let (grid, alpha) = lewis_riesenfeld_phase(trajectory, n)?;
    let mid = n / 2;
    let integrand = |k: usize, second_half: bool| {
        let t = grid[k];
        // at the midpoint the left branch belongs to the first half
        let (mu2, a) = if second_half && k == mid {
            (trajectory.mu2(t) - trajectory.geometric_phase(), alpha[k] + trajectory.geometric_jump())
        } else {
            (trajectory.mu2(t), alpha[k])
        };
        let s = trajectory.mu1(t).sin();
        C64::from_polar(trajectory.mu1_dot(t) * s * s, mu2 + 2.0 * a)
    };
    let h = grid[1] - grid[0];
    let simpson = |lo: usize, hi: usize, second: bool| {
        let mut acc = ZERO;
        for k in lo..=hi {
            let w = if k == lo || k == hi {
                1.0
            } else if (k - lo) % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += integrand(k, second) * w;
        }
        acc * (h / 3.0)
    };
    let total = simpson(0, mid, false) + simpson(mid, n, true);
    Ok(total.norm_sqr())
}

/// Both forms of `q_s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sensitivity {
    pub closed_form: f64,
    pub quadrature: f64,
}

pub fn sensitivity_qs(eta: f64, n: usize) -> Result<Sensitivity> {
    let trajectory = InvariantTrajectory::new(1.0, eta)?;
    Ok(Sensitivity { closed_form: sensitivity_closed_form(eta), quadrature: sensitivity_quadrature(&trajectory, n)? })
}
