//! Time-ordered propagation of state batches and density matrices.
//!
//! Two integrators are provided: an adaptive Dormand–Prince 5(4) scheme on
//! the flattened amplitudes, and a fourth-order commutator-free Magnus
//! scheme with a fixed step. Both stop exactly at requested sample times and
//! at field breakpoints, and never evaluate the Hamiltonian on the wrong side
//! of a breakpoint.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::drive::{ControlField, HamiltonianSource};
use crate::error::{Error, Result};
use crate::operator::{expm_hermitian, Operator, SparseOperator, State, I, ZERO};
use crate::pulse::PulseSchedule;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    /// Dormand–Prince 5(4) with mixed error control.
    Adaptive { rtol: f64, atol: f64 },
    /// Commutator-free fourth-order Magnus with step ≤ `max_step`.
    Magnus { max_step: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagationConfig {
    pub method: Method,
    /// Upper bound on accepted plus rejected steps per run.
    pub max_steps: usize,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self { method: Method::Adaptive { rtol: 1e-9, atol: 1e-11 }, max_steps: 50_000_000 }
    }
}

impl PropagationConfig {
    pub fn adaptive(rtol: f64, atol: f64) -> Self {
        Self { method: Method::Adaptive { rtol, atol }, ..Self::default() }
    }

    pub fn magnus(max_step: f64) -> Self {
        Self { method: Method::Magnus { max_step }, ..Self::default() }
    }

    /// Magnus step `2π/(40·ω)` for a fastest frequency `ω`.
    pub fn magnus_for_frequency(omega: f64) -> Self {
        Self::magnus(2.0 * PI / (40.0 * omega))
    }

    /// Tolerance 10× tighter, or step halved.
    pub fn refined(&self) -> Self {
        let method = match self.method {
            Method::Adaptive { rtol, atol } => Method::Adaptive { rtol: rtol / 10.0, atol: atol / 10.0 },
            Method::Magnus { max_step } => Method::Magnus { max_step: max_step / 2.0 },
        };
        Self { method, ..*self }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self.method {
            Method::Adaptive { rtol, atol } => rtol > 0.0 && atol > 0.0 && rtol.is_finite() && atol.is_finite(),
            Method::Magnus { max_step } => max_step > 0.0 && max_step.is_finite(),
        };
        if !ok || self.max_steps == 0 {
            return Err(Error::InvalidParameter(format!("bad propagation settings {self:?}")));
        }
        Ok(())
    }
}

/// Counters from one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Merges sample times and breakpoints inside `[t0, t_end]`.
fn stops(times: &[f64], breakpoints: &[f64]) -> Vec<f64> {
    let t0 = times[0];
    let t_end = *times.last().unwrap();
    let mut all: Vec<f64> = times.to_vec();
    all.extend(breakpoints.iter().copied().filter(|&b| b > t0 && b < t_end));
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let scale = t_end.abs().max(t0.abs()).max(f64::MIN_POSITIVE);
    all.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * scale);
    all
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidParameter("no sample times".into()));
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("sample times must be finite and non-decreasing".into()));
    }
    Ok(())
}

/// Hermiticity of `H` at the ends and midpoint of the window.
fn check_hermitian(h: &dyn HamiltonianSource, t0: f64, t1: f64) -> Result<()> {
    for t in [t0, 0.5 * (t0 + t1), t1] {
        h.matrix_at(t).require_hermitian(1e-10)?;
    }
    Ok(())
}

/// Evaluation time kept strictly inside `(a, b)` unless the segment is degenerate.
fn inside(t: f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return t;
    }
    t.clamp(a.next_up(), b.next_down())
}

/// `dy/dt = f(t, y)` on complex vectors.
trait Flow {
    fn len(&self) -> usize;
    fn eval(&mut self, t: f64, y: &[C64], dy: &mut [C64]);
}

/// `−iH(t)Y` for a `dim × k` column-major batch `Y`.
struct SchrodingerFlow<'a> {
    h: &'a dyn HamiltonianSource,
    dim: usize,
    cols: usize,
    buf: Vec<(usize, usize, C64)>,
}

impl Flow for SchrodingerFlow<'_> {
    fn len(&self) -> usize {
        self.dim * self.cols
    }

    fn eval(&mut self, t: f64, y: &[C64], dy: &mut [C64]) {
        self.h.entries_at(t, &mut self.buf);
        dy.fill(ZERO);
        let n = self.dim;
        for &(r, c, z) in &self.buf {
            let mz = -I * z;
            for k in 0..self.cols {
                dy[k * n + r] += mz * y[k * n + c];
            }
        }
    }
}

/// Lindblad generator on a batch of column-major `dim × dim` matrices.
struct LindbladFlow<'a> {
    h: &'a dyn HamiltonianSource,
    dim: usize,
    count: usize,
    jumps: Vec<SparseOperator>,
    /// `½ Σ L†L` as sparse entries.
    damping: Vec<(usize, usize, C64)>,
    buf: Vec<(usize, usize, C64)>,
}

impl Flow for LindbladFlow<'_> {
    fn len(&self) -> usize {
        self.dim * self.dim * self.count
    }

    fn eval(&mut self, t: f64, y: &[C64], dy: &mut [C64]) {
        self.h.entries_at(t, &mut self.buf);
        // K = −iH − ½ΣL†L, dρ = Kρ + ρK† + Σ LρL†
        for &(r, c, g) in &self.damping {
            // −i·(−i g) = −g
            self.buf.push((r, c, -I * g));
        }
        dy.fill(ZERO);
        let n = self.dim;
        let nn = n * n;
        for m in 0..self.count {
            let rho = &y[m * nn..(m + 1) * nn];
            let out = &mut dy[m * nn..(m + 1) * nn];
            for &(r, c, z) in &self.buf {
                let kz = -I * z;
                let kz_conj = kz.conj();
                for j in 0..n {
                    // (Kρ)[r, j] += K[r, c] ρ[c, j]
                    out[j * n + r] += kz * rho[j * n + c];
                    // (ρK†)[j, r] += ρ[j, c] conj(K[r, c])
                    out[r * n + j] += rho[c * n + j] * kz_conj;
                }
            }
            for l in &self.jumps {
                for &(a, i, la) in &l.entries {
                    for &(b, j, lb) in &l.entries {
                        out[b * n + a] += la * rho[j * n + i] * lb.conj();
                    }
                }
            }
        }
    }
}

const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_BSTAR: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Dopri5 {
    rtol: f64,
    atol: f64,
    k: Vec<Vec<C64>>,
    tmp: Vec<C64>,
    ynew: Vec<C64>,
    h: Option<f64>,
    stats: StepStats,
    max_steps: usize,
}

impl Dopri5 {
    fn new(n: usize, rtol: f64, atol: f64, max_steps: usize) -> Self {
        Self {
            rtol,
            atol,
            k: vec![vec![ZERO; n]; 7],
            tmp: vec![ZERO; n],
            ynew: vec![ZERO; n],
            h: None,
            stats: StepStats::default(),
            max_steps,
        }
    }

    fn initial_step(&self, y: &[C64], f0: &[C64], span: f64) -> f64 {
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for (yi, fi) in y.iter().zip(f0) {
            let sc = self.atol + self.rtol * yi.norm();
            d0 += (yi.norm() / sc).powi(2);
            d1 += (fi.norm() / sc).powi(2);
        }
        let n = y.len().max(1) as f64;
        let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
        h.min(span)
    }

    /// Integrates from `a` to `b`, evaluating `f` only inside `(a, b)`.
    fn segment(&mut self, flow: &mut dyn Flow, y: &mut [C64], a: f64, b: f64) -> Result<()> {
        let span = b - a;
        if span <= 0.0 {
            return Ok(());
        }
        let n = y.len();
        let mut t = a;
        flow.eval(inside(t, a, b), y, &mut self.k[0]);
        self.stats.evaluations += 1;
        let mut h = match self.h {
            Some(h) => h.min(span),
            None => self.initial_step(y, &self.k[0], span),
        };
        let min_step = 1e-15 * span.max(b.abs());
        loop {
            if self.stats.accepted + self.stats.rejected >= self.max_steps {
                return Err(Error::Integrator(format!("step budget {} exhausted at t = {t:e}", self.max_steps)));
            }
            let last = t + h >= b - 1e-12 * span;
            let h_try = if last { b - t } else { h };
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = ZERO;
                    for (j, &a_sj) in DP_A[s][..s].iter().enumerate() {
                        if a_sj != 0.0 {
                            acc += self.k[j][i] * a_sj;
                        }
                    }
                    self.tmp[i] = y[i] + acc * h_try;
                }
                let ts = if last && DP_C[s] == 1.0 { b } else { t + DP_C[s] * h_try };
                flow.eval(inside(ts, a, b), &self.tmp, &mut self.k[s]);
                self.stats.evaluations += 1;
            }
            // the seventh stage is evaluated at the fifth-order solution
            self.ynew.copy_from_slice(&self.tmp);
            let mut err = 0.0;
            for i in 0..n {
                let mut e = ZERO;
                for s in 0..7 {
                    let w = DP_B[s] - DP_BSTAR[s];
                    if w != 0.0 {
                        e += self.k[s][i] * w;
                    }
                }
                let sc = self.atol + self.rtol * y[i].norm().max(self.ynew[i].norm());
                err += (e.norm() * h_try / sc).powi(2);
            }
            let err = (err / n as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::NonFinite("integrator state"));
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                self.stats.accepted += 1;
                y.copy_from_slice(&self.ynew);
                self.k.swap(0, 6);
                if last {
                    // a truncated final step says little about the next one
                    self.h = Some(if h_try < h { h } else { h_try * factor });
                    return Ok(());
                }
                t += h_try;
                h = h_try * factor;
                self.h = Some(h);
            } else {
                self.stats.rejected += 1;
                h = h_try * factor.min(1.0);
                if h < min_step {
                    return Err(Error::Integrator(format!("step size underflow at t = {t:e}")));
                }
            }
        }
    }
}

/// `exp(−i h (α₁H₁ + α₂H₂)) exp(−i h (α₂H₁ + α₁H₂))` with Gauss nodes.
fn magnus_segment(
    h_src: &dyn HamiltonianSource,
    y: &mut DMatrix<C64>,
    a: f64,
    b: f64,
    max_step: f64,
    stats: &mut StepStats,
    max_steps: usize,
) -> Result<()> {
    let span = b - a;
    if span <= 0.0 {
        return Ok(());
    }
    let steps = (span / max_step).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let s3 = 3f64.sqrt();
    let (c1, c2) = (0.5 - s3 / 6.0, 0.5 + s3 / 6.0);
    let (a1, a2) = ((3.0 - 2.0 * s3) / 12.0, (3.0 + 2.0 * s3) / 12.0);
    for k in 0..steps {
        if stats.accepted >= max_steps {
            return Err(Error::Integrator(format!("step budget {max_steps} exhausted")));
        }
        let t = a + k as f64 * h;
        let h1 = h_src.matrix_at(t + c1 * h).into_matrix();
        let h2 = h_src.matrix_at(t + c2 * h).into_matrix();
        stats.evaluations += 2;
        let first = expm_hermitian(&h1 * C64::from(a2) + &h2 * C64::from(a1), h);
        let second = expm_hermitian(&h1 * C64::from(a1) + &h2 * C64::from(a2), h);
        *y = second * (first * &*y);
        stats.accepted += 1;
    }
    Ok(())
}

/// Propagated batch of pure states.
#[derive(Clone, Debug)]
pub struct BatchTrace {
    pub times: Vec<f64>,
    /// `dim × k` amplitude matrices, one per sample time.
    pub columns: Vec<DMatrix<C64>>,
    pub stats: StepStats,
}

/// Propagates the columns of `initial` under `H` and returns them at every
/// sample time. The initial condition is taken at `times[0]`.
pub fn propagate_columns(
    h: &dyn HamiltonianSource,
    initial: &DMatrix<C64>,
    times: &[f64],
    config: &PropagationConfig,
) -> Result<BatchTrace> {
    config.validate()?;
    check_times(times)?;
    if initial.nrows() != h.dim() {
        return Err(Error::Dimension(format!("initial states have {} rows, H is {}", initial.nrows(), h.dim())));
    }
    let t0 = times[0];
    let t_end = *times.last().unwrap();
    check_hermitian(h, t0, t_end)?;
    let stops = stops(times, &h.breakpoints());
    let mut trace = BatchTrace { times: times.to_vec(), columns: Vec::with_capacity(times.len()), stats: StepStats::default() };
    let mut next = 0;
    let mut record = |t: f64, y: &DMatrix<C64>, trace: &mut BatchTrace| {
        while next < times.len() && (times[next] - t).abs() <= 1e-14 * t_end.abs().max(t0.abs()).max(f64::MIN_POSITIVE) {
            trace.columns.push(y.clone());
            next += 1;
        }
    };
    match config.method {
        Method::Adaptive { rtol, atol } => {
            let (dim, cols) = (initial.nrows(), initial.ncols());
            let mut flow = SchrodingerFlow { h, dim, cols, buf: Vec::new() };
            let mut y: Vec<C64> = initial.as_slice().to_vec();
            let mut solver = Dopri5::new(flow.len(), rtol, atol, config.max_steps);
            let mut mat = initial.clone();
            record(stops[0], &mat, &mut trace);
            for w in stops.windows(2) {
                solver.segment(&mut flow, &mut y, w[0], w[1])?;
                mat = DMatrix::from_column_slice(dim, cols, &y);
                record(w[1], &mat, &mut trace);
            }
            trace.stats = solver.stats;
        }
        Method::Magnus { max_step } => {
            let mut y = initial.clone();
            record(stops[0], &y, &mut trace);
            let mut stats = StepStats::default();
            for w in stops.windows(2) {
                magnus_segment(h, &mut y, w[0], w[1], max_step, &mut stats, config.max_steps)?;
                record(w[1], &y, &mut trace);
            }
            trace.stats = stats;
        }
    }
    if trace.columns.len() != times.len() {
        return Err(Error::Integrator("sample bookkeeping mismatch".into()));
    }
    Ok(trace)
}

/// Propagated pure state.
#[derive(Clone, Debug)]
pub struct StateTrace {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    /// Largest `|‖ψ(t)‖ − ‖ψ₀‖|` seen at the sample times.
    pub norm_drift: f64,
    pub stats: StepStats,
}

impl StateTrace {
    pub fn last(&self) -> &State {
        self.states.last().expect("trace is never empty")
    }
}

pub fn propagate_state(
    h: &dyn HamiltonianSource,
    psi0: &State,
    times: &[f64],
    config: &PropagationConfig,
) -> Result<StateTrace> {
    if psi0.basis() != h.basis() {
        return Err(Error::BasisMismatch(psi0.basis().to_string(), h.basis().to_string()));
    }
    let init = DMatrix::from_column_slice(psi0.dim(), 1, psi0.amplitudes().as_slice());
    let batch = propagate_columns(h, &init, times, config)?;
    let n0 = psi0.norm();
    let states: Vec<State> = batch
        .columns
        .into_iter()
        .map(|m| State::from_vector_unchecked(h.basis(), DVector::from_column_slice(m.as_slice())))
        .collect();
    let norm_drift = states.iter().map(|s| (s.norm() - n0).abs()).fold(0.0, f64::max);
    Ok(StateTrace { times: batch.times, states, norm_drift, stats: batch.stats })
}

/// Full propagator `U(t1, t0)`.
pub fn propagator(h: &dyn HamiltonianSource, t0: f64, t1: f64, config: &PropagationConfig) -> Result<Operator> {
    let id = DMatrix::identity(h.dim(), h.dim());
    let trace = propagate_columns(h, &id, &[t0, t1], config)?;
    Ok(Operator::from_matrix_unchecked(h.basis(), trace.columns.into_iter().last().unwrap()))
}

/// Images of the given basis columns at `t1`, projected back on the same
/// indices: `M_ij = ⟨e_i|U|e_j⟩`.
pub fn projected_propagator(
    h: &dyn HamiltonianSource,
    indices: &[usize],
    t0: f64,
    t1: f64,
    config: &PropagationConfig,
) -> Result<(DMatrix<C64>, StepStats)> {
    let n = h.dim();
    let mut init = DMatrix::zeros(n, indices.len());
    for (k, &i) in indices.iter().enumerate() {
        if i >= n {
            return Err(Error::Dimension(format!("index {i} outside dimension {n}")));
        }
        init[(i, k)] = C64::from(1.0);
    }
    let trace = propagate_columns(h, &init, &[t0, t1], config)?;
    let last = trace.columns.last().unwrap();
    Ok((DMatrix::from_fn(indices.len(), indices.len(), |r, c| last[(indices[r], c)]), trace.stats))
}

/// Propagated density matrices (one batch member).
#[derive(Clone, Debug)]
pub struct DensityTrace {
    pub times: Vec<f64>,
    pub rhos: Vec<DMatrix<C64>>,
    pub trace_drift: f64,
    pub hermiticity_defect: f64,
}

impl DensityTrace {
    pub fn last(&self) -> &DMatrix<C64> {
        self.rhos.last().expect("trace is never empty")
    }
}

pub const TRACE_TOL: f64 = 1e-7;
pub const HERMITICITY_TOL: f64 = 1e-9;

/// `dρ/dt = −i[H, ρ] + Σ (LρL† − ½{L†L, ρ})` for a batch of initial
/// matrices. Inputs need not be Hermitian (coherences are propagated
/// linearly); trace conservation is enforced for each, Hermiticity only for
/// Hermitian inputs. Adaptive integration only.
pub fn propagate_lindblad(
    h: &dyn HamiltonianSource,
    collapse: &[Operator],
    inputs: &[DMatrix<C64>],
    times: &[f64],
    config: &PropagationConfig,
) -> Result<Vec<DensityTrace>> {
    config.validate()?;
    check_times(times)?;
    let (rtol, atol) = match config.method {
        Method::Adaptive { rtol, atol } => (rtol, atol),
        Method::Magnus { .. } => {
            return Err(Error::Integrator("the master equation is integrated with the adaptive scheme only".into()))
        }
    };
    let n = h.dim();
    for rho in inputs {
        if rho.nrows() != n || rho.ncols() != n {
            return Err(Error::Dimension(format!("density is {}×{}, H is {n}", rho.nrows(), rho.ncols())));
        }
    }
    for l in collapse {
        if l.dim() != n {
            return Err(Error::Dimension(format!("collapse operator dim {} vs {n}", l.dim())));
        }
    }
    let t0 = times[0];
    let t_end = *times.last().unwrap();
    check_hermitian(h, t0, t_end)?;
    let mut gamma = DMatrix::<C64>::zeros(n, n);
    for l in collapse {
        gamma += l.matrix().adjoint() * l.matrix();
    }
    let damping = SparseOperator::from_dense(&(gamma * C64::from(0.5)), 0.0).entries;
    let jumps = collapse.iter().map(|l| SparseOperator::from_dense(l.matrix(), 0.0)).collect();
    let mut flow = LindbladFlow { h, dim: n, count: inputs.len(), jumps, damping, buf: Vec::new() };
    let nn = n * n;
    let mut y = Vec::with_capacity(nn * inputs.len());
    for rho in inputs {
        y.extend_from_slice(rho.as_slice());
    }
    let hermitian_in: Vec<bool> = inputs.iter().map(|r| (r - r.adjoint()).camax() <= 1e-12).collect();
    let traces0: Vec<C64> = inputs.iter().map(|r| r.trace()).collect();
    let mut out: Vec<DensityTrace> = inputs
        .iter()
        .map(|_| DensityTrace { times: times.to_vec(), rhos: Vec::new(), trace_drift: 0.0, hermiticity_defect: 0.0 })
        .collect();
    let scale = t_end.abs().max(t0.abs()).max(f64::MIN_POSITIVE);
    let mut next = 0;
    let mut record = |t: f64, y: &[C64], out: &mut Vec<DensityTrace>| -> Result<()> {
        while next < times.len() && (times[next] - t).abs() <= 1e-14 * scale {
            for (m, trace) in out.iter_mut().enumerate() {
                let rho = DMatrix::from_column_slice(n, n, &y[m * nn..(m + 1) * nn]);
                let drift = (rho.trace() - traces0[m]).norm();
                trace.trace_drift = trace.trace_drift.max(drift);
                if drift > TRACE_TOL {
                    return Err(Error::TraceDrift { drift, tol: TRACE_TOL });
                }
                if hermitian_in[m] {
                    let defect = (&rho - rho.adjoint()).camax();
                    trace.hermiticity_defect = trace.hermiticity_defect.max(defect);
                    if defect > HERMITICITY_TOL {
                        return Err(Error::NotHermitian { defect, tol: HERMITICITY_TOL });
                    }
                }
                trace.rhos.push(rho);
            }
            next += 1;
        }
        Ok(())
    };
    let stops = stops(times, &h.breakpoints());
    let mut solver = Dopri5::new(flow.len(), rtol, atol, config.max_steps);
    record(stops[0], &y, &mut out)?;
    for w in stops.windows(2) {
        solver.segment(&mut flow, &mut y, w[0], w[1])?;
        record(w[1], &y, &mut out)?;
    }
    Ok(out)
}

/// `|ψ⟩⟨ψ|` as a dense matrix.
pub fn density(psi: &State) -> DMatrix<C64> {
    let v = psi.amplitudes();
    v * v.adjoint()
}

/// Result of running a computation at two resolutions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certificate {
    pub value: f64,
    pub refined: f64,
    pub change: f64,
}

pub const CERTIFICATE_TOL: f64 = 1e-5;

/// Runs `compute` at `config` and at `config.refined()`; fails when the two
/// results differ by `CERTIFICATE_TOL` or more.
pub fn certify(config: &PropagationConfig, compute: impl Fn(&PropagationConfig) -> Result<f64>) -> Result<Certificate> {
    let value = compute(config)?;
    let refined = compute(&config.refined())?;
    let change = (value - refined).abs();
    if !(change < CERTIFICATE_TOL) {
        return Err(Error::Convergence(format!(
            "result moved by {change:e} under refinement ({value} → {refined})"
        )));
    }
    Ok(Certificate { value, refined, change })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SnrUnit {
    /// Power ratio `10^(snr/10)`.
    Decibel,
    Linear,
}

/// A pulse schedule with seeded Gaussian noise added per sample and quadrature.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisySchedule {
    pub base: PulseSchedule,
    pub snr: f64,
    pub unit: SnrUnit,
    pub seed: u64,
    pub noise_x: Vec<f64>,
    pub noise_y: Vec<f64>,
}

impl NoisySchedule {
    pub fn realized_x(&self, k: usize) -> f64 {
        held(self.base.omega_x[k], self.noise_x[k])
    }

    pub fn realized_y(&self, k: usize) -> f64 {
        held(self.base.omega_y[k], self.noise_y[k])
    }

    /// Noise variance per quadrature.
    pub fn noise_power(&self) -> (f64, f64) {
        (noise_power(&self.base.omega_x, self.snr, self.unit), noise_power(&self.base.omega_y, self.snr, self.unit))
    }
}

fn held(clean: f64, noise: f64) -> f64 {
    if noise == 0.0 {
        clean
    } else {
        clean + noise
    }
}

fn noise_power(signal: &[f64], snr: f64, unit: SnrUnit) -> f64 {
    if snr.is_infinite() || signal.is_empty() {
        return 0.0;
    }
    let mean_power = signal.iter().map(|x| x * x).sum::<f64>() / signal.len() as f64;
    let ratio = match unit {
        SnrUnit::Decibel => 10f64.powf(snr / 10.0),
        SnrUnit::Linear => snr,
    };
    mean_power / ratio
}

/// Adds white Gaussian noise with power `mean(Ω²)/SNR` to each quadrature.
/// `snr = ∞` leaves the samples untouched.
pub fn add_awgn(pulse: &PulseSchedule, snr: f64, unit: SnrUnit, seed: u64) -> Result<NoisySchedule> {
    let valid = match unit {
        SnrUnit::Decibel => !snr.is_nan() && snr != f64::NEG_INFINITY,
        SnrUnit::Linear => snr > 0.0,
    };
    if !valid {
        return Err(Error::InvalidParameter(format!("invalid SNR {snr} ({unit:?})")));
    }
    let n = pulse.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |power: f64| -> Result<Vec<f64>> {
        if power == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let normal = Normal::new(0.0, power.sqrt()).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Ok((0..n).map(|_| normal.sample(&mut rng)).collect())
    };
    let noise_x = draw(noise_power(&pulse.omega_x, snr, unit))?;
    let noise_y = draw(noise_power(&pulse.omega_y, snr, unit))?;
    Ok(NoisySchedule { base: pulse.clone(), snr, unit, seed, noise_x, noise_y })
}

/// A clean analytic field plus the sampled noise held constant on each
/// interval `[t_k, t_{k+1})`.
#[derive(Clone, Debug)]
pub struct NoisyField<F> {
    pub clean: F,
    pub noise: NoisySchedule,
}

impl<F: ControlField> ControlField for NoisyField<F> {
    fn quadratures(&self, t: f64) -> (f64, f64) {
        let (x, y) = self.clean.quadratures(t);
        let times = &self.noise.base.times;
        if times.is_empty() || t < times[0] || t > *times.last().unwrap() {
            return (x, y);
        }
        let k = times.partition_point(|&s| s <= t).saturating_sub(1).min(times.len() - 1);
        (held(x, self.noise.noise_x[k]), held(y, self.noise.noise_y[k]))
    }

    fn duration(&self) -> f64 {
        self.clean.duration()
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.clean.breakpoints();
        if self.noise.noise_x.iter().chain(&self.noise.noise_y).any(|&z| z != 0.0) {
            let times = &self.noise.base.times;
            b.extend_from_slice(&times[1..times.len().saturating_sub(1)]);
        }
        b
    }
}
