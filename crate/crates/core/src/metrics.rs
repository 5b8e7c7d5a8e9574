//! Gate and state fidelities, truth tables, and phase bookkeeping.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::drive::ControlField;
use crate::error::{Error, Result};
use crate::operator::{Operator, State, ZERO};
use crate::pulse::{effective_two_level, lewis_riesenfeld_phase, InvariantTrajectory};

/// `(Tr[MM†] + |Tr M|²) / (N(N+1))`.
pub fn average_gate_fidelity(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows() as f64;
    let tr_mm = m.iter().map(|z| z.norm_sqr()).sum::<f64>();
    (tr_mm + m.trace().norm_sqr()) / (n * (n + 1.0))
}

/// `M = U_target† · U_proj`, both in the computational basis.
pub fn overlap_matrix(target: &Operator, projected: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    if target.dim() != projected.nrows() || projected.nrows() != projected.ncols() {
        return Err(Error::Dimension(format!(
            "target is {}-dimensional, propagator block is {}×{}",
            target.dim(),
            projected.nrows(),
            projected.ncols()
        )));
    }
    Ok(target.matrix().adjoint() * projected)
}

pub fn gate_fidelity(target: &Operator, projected: &DMatrix<C64>) -> Result<f64> {
    Ok(average_gate_fidelity(&overlap_matrix(target, projected)?))
}

/// `|⟨ψ_T|ψ⟩|²`.
pub fn state_fidelity(psi: &State, target: &State) -> Result<f64> {
    Ok(target.inner(psi)?.norm_sqr())
}

/// `⟨ψ_T|ρ|ψ_T⟩`.
pub fn density_fidelity(rho: &DMatrix<C64>, target: &State) -> Result<f64> {
    let t = target.amplitudes();
    if rho.nrows() != t.len() || rho.ncols() != t.len() {
        return Err(Error::Dimension(format!("ρ is {}×{}, target has {}", rho.nrows(), rho.ncols(), t.len())));
    }
    Ok((t.adjoint() * rho * t)[(0, 0)].re)
}

/// Average gate fidelity of a (possibly non-unitary) map `Φ` restricted to
/// the computational subspace. `images[i][j]` holds `P Φ(|i⟩⟨j|) P` as a
/// `d × d` block; for a unitary map this equals [`gate_fidelity`].
pub fn process_average_fidelity(target: &Operator, images: &[Vec<DMatrix<C64>>]) -> Result<f64> {
    let d = target.dim();
    if images.len() != d || images.iter().any(|row| row.len() != d) {
        return Err(Error::Dimension(format!("expected {d}×{d} images")));
    }
    let u = target.matrix();
    let mut coherent = ZERO;
    let mut populations = 0.0;
    for i in 0..d {
        for j in 0..d {
            let block = &images[i][j];
            if block.nrows() != d || block.ncols() != d {
                return Err(Error::Dimension(format!("image ({i},{j}) is {}×{}", block.nrows(), block.ncols())));
            }
            // ⟨i|U† B U|j⟩
            let ui = u.column(i);
            let uj = u.column(j);
            coherent += (ui.adjoint() * block * uj)[(0, 0)];
        }
        populations += images[i][i].trace().re;
    }
    Ok((coherent.re + populations) / (d as f64 * (d as f64 + 1.0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FidelityKind {
    AverageGate,
    State,
    DensityState,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelityTrace {
    pub kind: FidelityKind,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl FidelityTrace {
    pub fn new(kind: FidelityKind, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Dimension(format!("{} times vs {} values", times.len(), values.len())));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= -1e-9 && **v <= 1.0 + 1e-9)) {
            return Err(Error::InvalidParameter(format!("fidelity {v} outside [0, 1]")));
        }
        Ok(Self { kind, times, values })
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }
}

/// Output populations, `populations[input][output]`, over `|00⟩..|11⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruthTable {
    pub populations: [[f64; 4]; 4],
}

pub const COMPUTATIONAL_LABELS: [&str; 4] = ["00", "01", "10", "11"];

impl TruthTable {
    /// From the computational block `M_{out,in} = ⟨out|U|in⟩`.
    pub fn from_propagator(block: &DMatrix<C64>) -> Result<Self> {
        if block.nrows() != 4 || block.ncols() != 4 {
            return Err(Error::Dimension(format!("truth table needs a 4×4 block, got {}×{}", block.nrows(), block.ncols())));
        }
        let mut populations = [[0.0; 4]; 4];
        for (i, row) in populations.iter_mut().enumerate() {
            for (o, p) in row.iter_mut().enumerate() {
                *p = block[(o, i)].norm_sqr();
            }
        }
        Ok(Self { populations })
    }

    /// From the diagonal of each input's final density matrix.
    pub fn from_densities(finals: &[DMatrix<C64>], indices: &[usize; 4]) -> Result<Self> {
        if finals.len() != 4 {
            return Err(Error::Dimension(format!("need 4 final densities, got {}", finals.len())));
        }
        let mut populations = [[0.0; 4]; 4];
        for (i, rho) in finals.iter().enumerate() {
            for (o, &idx) in indices.iter().enumerate() {
                populations[i][o] = rho[(idx, idx)].re;
            }
        }
        Ok(Self { populations })
    }

    /// Population left in the computational subspace per input.
    pub fn row_sums(&self) -> [f64; 4] {
        self.populations.map(|r| r.iter().sum())
    }

    /// Population of each input at the ideal gate's image (the output with the
    /// largest `|U_target|` entry in that column).
    pub fn success(&self, target: &Operator) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (i, slot) in out.iter_mut().enumerate() {
            let col = target.matrix().column(i);
            let o = (0..4).max_by(|&a, &b| col[a].norm().partial_cmp(&col[b].norm()).unwrap()).unwrap();
            *slot = self.populations[i][o];
        }
        out
    }

    pub fn min_success(&self, target: &Operator) -> f64 {
        self.success(target).into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "input,p00,p01,p10,p11")?;
        for (i, row) in self.populations.iter().enumerate() {
            writeln!(w, "{},{:.10},{:.10},{:.10},{:.10}", COMPUTATIONAL_LABELS[i], row[0], row[1], row[2], row[3])?;
        }
        Ok(())
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "in\\out      00        01        10        11")?;
        for (i, row) in self.populations.iter().enumerate() {
            write!(f, "  {}  ", COMPUTATIONAL_LABELS[i])?;
            for p in row {
                write!(f, "  {p:8.6}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Wraps into `[0, 2π)`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y >= TAU {
        0.0
    } else {
        y
    }
}

/// Removes `2π` jumps between consecutive samples.
pub fn unwrap_phases(raw: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(raw.len());
    let mut offset: f64 = 0.0;
    for (k, &x) in raw.iter().enumerate() {
        if k > 0 {
            let d = x + offset - out[k - 1];
            offset -= TAU * (d / TAU).round();
        }
        out.push(x + offset);
    }
    out
}

/// Dynamic and geometric phase of `|ϑ₂⟩` along the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseTrace {
    pub times: Vec<f64>,
    pub dynamic: Vec<f64>,
    pub geometric: Vec<f64>,
}

impl PhaseTrace {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,theta2,Theta2")?;
        for k in 0..self.times.len() {
            writeln!(w, "{:e},{:e},{:e}", self.times[k], self.dynamic[k], self.geometric[k])?;
        }
        Ok(())
    }
}

/// Cumulative phases from the designed rates; `n` even.
pub fn accumulated_phases(trajectory: &InvariantTrajectory, n: usize) -> Result<PhaseTrace> {
    let (times, dynamic, geometric) = crate::pulse::accumulated_phases(trajectory, n)?;
    Ok(PhaseTrace { times, dynamic, geometric })
}

/// Phases read off a propagated state: the dynamic phase
/// `−∫⟨ψ|H|ψ⟩dt` (Simpson on the samples, which must be an even number of
/// uniform intervals) and the geometric remainder of the total phase
/// `arg⟨ψ(0)|ψ(T)⟩`, wrapped to `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagatedPhases {
    pub total: f64,
    pub dynamic: f64,
    pub geometric: f64,
    pub return_probability: f64,
}

pub fn propagated_phases(
    states: &[State],
    times: &[f64],
    hamiltonian: impl Fn(f64) -> Operator,
) -> Result<PropagatedPhases> {
    let n = states.len();
    if n < 3 || n % 2 == 0 || times.len() != n {
        return Err(Error::InvalidParameter("need an odd number (≥ 3) of uniformly spaced samples".into()));
    }
    let h = times[1] - times[0];
    let mut acc = 0.0;
    for (k, (psi, &t)) in states.iter().zip(times).enumerate() {
        let e = hamiltonian(t).matrix_element(psi, psi)?.re;
        let w = if k == 0 || k == n - 1 {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * e;
    }
    let dynamic = -acc * h / 3.0;
    let overlap = states[0].inner(&states[n - 1])?;
    let total = overlap.arg();
    Ok(PropagatedPhases {
        total,
        dynamic,
        geometric: wrap_phase(total - dynamic),
        return_probability: overlap.norm_sqr(),
    })
}

/// `ε²|∫₀ᵀ e^{2iα₂}⟨ϑ₁|H_eff|ϑ₂⟩dt|²` with the Lewis–Riesenfeld phase `α₂`
/// integrated numerically on `n` intervals (`n` divisible by 4).
pub fn perturbative_infidelity(trajectory: &InvariantTrajectory, epsilon: f64, n: usize) -> Result<f64> {
    if epsilon.abs() > 0.2 {
        return Err(Error::InvalidParameter(format!("|ε| ≤ 0.2 required, got {epsilon}")));
    }
    if n % 4 != 0 {
        return Err(Error::InvalidParameter(format!("n must be divisible by 4, got {n}")));
    }
    let (times, alpha) = lewis_riesenfeld_phase(trajectory, n)?;
    let mid = n / 2;
    let dt = times[1] - times[0];
    let mut total = ZERO;
    for (lo, hi) in [(0, mid), (mid, n)] {
        let mut acc = ZERO;
        for k in lo..=hi {
            let t = times[k];
            let (v1, v2) = trajectory.eigenvectors(t);
            let coupling = effective_two_level(t, trajectory as &dyn ControlField, 1.0).matrix_element(&v1, &v2)?;
            let w = if k == lo || k == hi {
                1.0
            } else if (k - lo) % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += C64::from_polar(w, 2.0 * alpha[k]) * coupling;
        }
        total += acc * (dt / 3.0);
    }
    Ok(epsilon * epsilon * total.norm_sqr())
}

/// Phase `Θ` in `(−π, π]` with `e^{iΘ} = z/|z|`.
pub fn phase_of(z: C64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        a + TAU
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::{cnot, cz, target_gate};
    use crate::operator::{ONE, I};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn random_unitary(seed: [f64; 8]) -> DMatrix<C64> {
        let h = DMatrix::from_fn(4, 4, |r, c| {
            let k = (r * 4 + c) % 8;
            C64::new(seed[k] * (r + 1) as f64, seed[(k + 3) % 8] * (c as f64 - r as f64))
        });
        let herm = (&h + h.adjoint()) * C64::from(0.5);
        crate::operator::expm_hermitian(herm, 1.0)
    }

    #[test]
    fn identity_and_zero() {
        assert_abs_diff_eq!(average_gate_fidelity(&DMatrix::identity(4, 4)), 1.0, epsilon = 1e-15);
        assert_eq!(average_gate_fidelity(&DMatrix::zeros(4, 4)), 0.0);
        let cz = cz();
        let m = overlap_matrix(&cz, cz.matrix()).unwrap();
        assert_abs_diff_eq!(average_gate_fidelity(&m), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn state_fidelity_limits() {
        let a = State::basis_vector("q", 2, 0);
        let b = State::basis_vector("q", 2, 1);
        assert_eq!(state_fidelity(&a, &a).unwrap(), 1.0);
        assert_eq!(state_fidelity(&a, &b).unwrap(), 0.0);
        let rho = crate::dynamics::density(&a);
        assert_eq!(density_fidelity(&rho, &a).unwrap(), 1.0);
    }

    #[test]
    fn process_fidelity_reduces_to_gate_fidelity() {
        let u = random_unitary([0.3, -0.2, 0.5, 0.1, 0.7, -0.4, 0.2, 0.9]);
        let shrink = &u * C64::from(0.97);
        let target = cnot();
        let mut images = vec![vec![DMatrix::zeros(4, 4); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let ci = shrink.column(i);
                let cj = shrink.column(j);
                images[i][j] = ci * cj.adjoint();
            }
        }
        let a = process_average_fidelity(&target, &images).unwrap();
        let b = gate_fidelity(&target, &shrink).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn truth_table_of_ideal_cnot() {
        let t = TruthTable::from_propagator(cnot().matrix()).unwrap();
        assert_eq!(t.populations[2], [0.0, 0.0, 0.0, 1.0]);
        assert_eq!(t.populations[3], [0.0, 0.0, 1.0, 0.0]);
        assert_eq!(t.min_success(&cnot()), 1.0);
        assert_eq!(t.row_sums(), [1.0; 4]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 5);
        assert!(t.to_string().contains("11"));
    }

    #[test]
    fn target_matches_reflection_form() {
        // I − 2|w⟩⟨w| with w = ξ₊(v_a) ⊗ ξ₋(v_b)
        for (va, vb) in [(PI / 2.0, PI), (PI / 2.0, PI / 4.0), (0.3, 1.1), (0.0, 0.0)] {
            let w = [-va.cos() * vb.sin(), va.cos() * vb.cos(), -va.sin() * vb.sin(), va.sin() * vb.cos()];
            let refl = DMatrix::from_fn(4, 4, |r, c| {
                C64::from(if r == c { 1.0 } else { 0.0 } - 2.0 * w[r] * w[c])
            });
            assert!((target_gate(va, vb).matrix() - refl).camax() < 1e-12);
        }
        assert!((target_gate(PI / 2.0, PI).matrix() - cz().matrix()).camax() < 1e-12);
        assert!((target_gate(PI / 2.0, PI / 4.0).matrix() - cnot().matrix()).camax() < 1e-12);
        let z = target_gate(0.0, 0.0);
        let diag: Vec<f64> = (0..4).map(|k| z.entry(k, k).re).collect();
        assert_eq!(diag, vec![1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn phase_helpers() {
        assert_abs_diff_eq!(wrap_phase(-0.5), TAU - 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_phase(7.0), 7.0 - TAU, epsilon = 1e-15);
        let raw = [3.0, -3.0, -2.9, 3.1];
        let u = unwrap_phases(&raw);
        assert_abs_diff_eq!(u[1], TAU - 3.0, epsilon = 1e-12);
        assert!(u.windows(2).all(|w| (w[1] - w[0]).abs() < PI));
        assert_abs_diff_eq!(phase_of(-ONE), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(phase_of(I), PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn analytic_phase_totals() {
        let p = accumulated_phases(&InvariantTrajectory::new(2.0, 1.0).unwrap(), 4096).unwrap();
        assert!(p.dynamic.last().unwrap().abs() < 1e-6);
        assert!((p.geometric.last().unwrap() - PI).abs() < 1e-6);
        let mid = p.dynamic[2048];
        assert!((mid + (p.dynamic[4096] - mid)).abs() < 1e-6);
    }

    #[test]
    fn perturbative_infidelity_matches_sensitivity() {
        let n = 8192;
        for eta in [0.0, 0.5, 1.0] {
            let tr = InvariantTrajectory::new(1.0, eta).unwrap();
            let q = crate::pulse::sensitivity_closed_form(eta);
            let p = perturbative_infidelity(&tr, 0.1, n).unwrap();
            assert!((p / 0.01 - q).abs() < 1e-6 * (1.0 + q), "η={eta}: {p} vs {q}");
            assert_eq!(perturbative_infidelity(&tr, 0.0, n).unwrap(), 0.0);
        }
        assert!(perturbative_infidelity(&InvariantTrajectory::new(1.0, 1.0).unwrap(), 0.3, 8).is_err());
    }

    proptest! {
        #[test]
        fn global_phase_invariance(seed in prop::array::uniform8(-1.0f64..1.0), phi in -PI..PI) {
            let u = random_unitary(seed);
            let f1 = average_gate_fidelity(&u);
            let f2 = average_gate_fidelity(&(&u * C64::from_polar(1.0, phi)));
            prop_assert!((f1 - f2).abs() < 1e-12);
            prop_assert!(f1 <= 1.0 + 1e-12 && f1 >= 0.0);
        }

        #[test]
        fn unit_fidelity_only_for_phase_times_identity(seed in prop::array::uniform8(-1.0f64..1.0)) {
            let u = random_unitary(seed);
            let f = average_gate_fidelity(&u);
            let phase = u[(0, 0)] / u[(0, 0)].norm();
            let dist = (&u - DMatrix::identity(4, 4) * phase).camax();
            if f > 1.0 - 1e-14 {
                prop_assert!(dist < 1e-6);
            }
            if dist > 1e-4 {
                prop_assert!(f < 1.0 - 1e-10);
            }
        }
    }
}
