//! End-to-end gate runs: design the pulse, build the Hamiltonian at the
//! requested approximation stage, propagate, and score.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::atom::{
    computational_ket, lindblad_operators, stage_source, target_gate, ModelParams, Stage,
    COMPUTATIONAL_INDICES, PAIR_DIM,
};
use crate::drive::{ControlField, DenseHamiltonian, HamiltonianSource};
use crate::dynamics::{
    add_awgn, certify, projected_propagator, propagate_columns, propagate_lindblad, propagate_state, Certificate, NoisyField,
    PropagationConfig, SnrUnit, StepStats,
};
use crate::error::{Error, Result};
use crate::metrics::{
    average_gate_fidelity, overlap_matrix, process_average_fidelity, propagated_phases, FidelityKind, FidelityTrace,
    PropagatedPhases, TruthTable,
};
use crate::operator::{Operator, State};
use crate::pulse::{effective_two_level, InvariantTrajectory, DEFAULT_SAMPLES, EFFECTIVE_BASIS};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Cnot,
    Cz,
    Custom { v_a: f64, v_b: f64 },
}

impl Gate {
    pub fn angles(self) -> (f64, f64) {
        match self {
            Gate::Cnot => (PI / 2.0, PI / 4.0),
            Gate::Cz => (PI / 2.0, PI),
            Gate::Custom { v_a, v_b } => (v_a, v_b),
        }
    }

    pub fn name(self) -> String {
        match self {
            Gate::Cnot => "cnot".into(),
            Gate::Cz => "cz".into(),
            Gate::Custom { v_a, v_b } => format!("custom({v_a},{v_b})"),
        }
    }
}

/// Seeded additive noise on the control quadratures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub snr: f64,
    pub unit: SnrUnit,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub params: ModelParams,
    pub eta: f64,
    pub theta_g: f64,
    /// Pulse grid size (intervals); also the noise sample count.
    pub samples: usize,
    pub stage: Stage,
    pub propagation: PropagationConfig,
    pub noise: Option<NoiseSpec>,
    /// Replace the designed pulse by a zero field.
    pub drive_off: bool,
}

impl Scenario {
    /// Reference regime (`V = Δ = 18000/T`, `Ω_b = 600/T`, `η = 1`) for `gate`.
    pub fn reference(gate: Gate, duration: f64) -> Self {
        let (v_a, v_b) = gate.angles();
        Self {
            params: ModelParams::reference(duration).with_angles(v_a, v_b),
            eta: 1.0,
            theta_g: PI,
            samples: DEFAULT_SAMPLES,
            stage: Stage::Interaction,
            propagation: PropagationConfig::default(),
            noise: None,
            drive_off: false,
        }
    }

    pub fn target(&self) -> Operator {
        target_gate(self.params.v_a, self.params.v_b)
    }

    pub fn trajectory(&self) -> Result<InvariantTrajectory> {
        Ok(InvariantTrajectory::new(self.params.duration, self.eta)?.with_geometric_phase(self.theta_g))
    }

    pub fn field(&self) -> Result<Arc<dyn ControlField>> {
        let trajectory = self.trajectory()?;
        if self.drive_off {
            return Ok(Arc::new(crate::drive::ZeroField { duration: self.params.duration }));
        }
        match self.noise {
            None => Ok(Arc::new(trajectory)),
            Some(spec) => {
                let schedule = trajectory.schedule(self.samples)?;
                let noise = add_awgn(&schedule, spec.snr, spec.unit, spec.seed)?;
                Ok(Arc::new(NoisyField { clean: trajectory, noise }))
            }
        }
    }

    pub fn hamiltonian(&self) -> Result<Box<dyn HamiltonianSource>> {
        self.params.validate()?;
        stage_source(self.stage, &self.params, self.field()?)
    }

    /// Closed-system gate on the computational subspace.
    pub fn run_gate(&self) -> Result<GateRun> {
        let h = self.hamiltonian()?;
        let (block, stats) = projected_propagator(h.as_ref(), &COMPUTATIONAL_INDICES, 0.0, self.params.duration, &self.propagation)?;
        let fidelity = average_gate_fidelity(&overlap_matrix(&self.target(), &block)?);
        Ok(GateRun { block, fidelity, stats })
    }

    /// [`Scenario::run_gate`] plus a rerun at refined integrator settings.
    pub fn certified_gate_fidelity(&self) -> Result<Certificate> {
        certify(&self.propagation, |cfg| {
            let mut s = self.clone();
            s.propagation = *cfg;
            Ok(s.run_gate()?.fidelity)
        })
    }

    /// `F(t)` of the computational-subspace evolution against the target at
    /// `points + 1` uniform times.
    pub fn fidelity_trace(&self, points: usize) -> Result<FidelityTrace> {
        let h = self.hamiltonian()?;
        let times = uniform_times(self.params.duration, points);
        let init = computational_columns();
        let trace = propagate_columns(h.as_ref(), &init, &times, &self.propagation)?;
        let target = self.target();
        let mut values = Vec::with_capacity(times.len());
        for cols in &trace.columns {
            let block = DMatrix::from_fn(4, 4, |r, c| cols[(COMPUTATIONAL_INDICES[r], c)]);
            values.push(average_gate_fidelity(&overlap_matrix(&target, &block)?));
        }
        FidelityTrace::new(FidelityKind::AverageGate, times, values)
    }

    /// Populations of the dressed states `|ξ₋ξ₋⟩, |ξ₋ξ₊⟩, |ξ₊ξ₋⟩, |ξ₊ξ₊⟩`,
    /// each started in itself, at `points + 1` uniform times.
    pub fn subspace_populations(&self, points: usize) -> Result<PopulationTrace> {
        let h = self.hamiltonian()?;
        let times = uniform_times(self.params.duration, points);
        let basis = self.params.dressed().subspace();
        let mut init = DMatrix::zeros(PAIR_DIM, 4);
        for (k, s) in basis.iter().enumerate() {
            init.set_column(k, s.amplitudes());
        }
        let trace = propagate_columns(h.as_ref(), &init, &times, &self.propagation)?;
        let mut populations = Vec::with_capacity(times.len());
        let mut overlaps = Vec::with_capacity(times.len());
        for cols in &trace.columns {
            let mut row = [0.0; 4];
            let mut amp = [C64::from(0.0); 4];
            for k in 0..4 {
                let psi = State::new(crate::atom::PAIR_BASIS, cols.column(k).into_owned())?;
                amp[k] = basis[k].inner(&psi)?;
                row[k] = amp[k].norm_sqr();
            }
            populations.push(row);
            overlaps.push(amp);
        }
        Ok(PopulationTrace { times, populations, overlaps })
    }

    /// Dynamic and geometric phase picked up by the cyclic state under the
    /// two-level effective Hamiltonian, from `2·half + 1` propagated samples.
    pub fn effective_phases(&self, half: usize) -> Result<PropagatedPhases> {
        let field = self.field()?;
        let scale = 1.0 + self.params.field_scaling;
        let breakpoints = field.breakpoints();
        let f = field.clone();
        let h = DenseHamiltonian::new(EFFECTIVE_BASIS, 2, move |t| effective_two_level(t, f.as_ref(), scale).into_matrix())
            .with_breakpoints(breakpoints);
        let times = uniform_times(self.params.duration, 2 * half.max(1));
        let psi0 = State::basis_vector(EFFECTIVE_BASIS, 2, 1);
        let trace = propagate_state(&h, &psi0, &times, &self.propagation)?;
        propagated_phases(&trace.states, &times, |t| effective_two_level(t, field.as_ref(), scale))
    }

    /// Open-system run: the ten inputs `|i⟩⟨j|` (`i ≤ j`) over the
    /// computational basis, propagated under the master equation.
    pub fn run_open(&self) -> Result<OpenRun> {
        let h = self.hamiltonian()?;
        let collapse = lindblad_operators(self.params.gamma)?;
        let mut inputs = Vec::with_capacity(10);
        let mut pairs = Vec::with_capacity(10);
        for i in 0..4 {
            for j in i..4 {
                let mut rho = DMatrix::zeros(PAIR_DIM, PAIR_DIM);
                rho[(COMPUTATIONAL_INDICES[i], COMPUTATIONAL_INDICES[j])] = C64::from(1.0);
                inputs.push(rho);
                pairs.push((i, j));
            }
        }
        let traces = propagate_lindblad(h.as_ref(), &collapse, &inputs, &[0.0, self.params.duration], &self.propagation)?;
        let mut images = vec![vec![DMatrix::zeros(4, 4); 4]; 4];
        let mut finals = vec![DMatrix::zeros(PAIR_DIM, PAIR_DIM); 4];
        let mut trace_drift: f64 = 0.0;
        for ((i, j), tr) in pairs.into_iter().zip(&traces) {
            trace_drift = trace_drift.max(tr.trace_drift);
            let full = tr.last();
            let block = DMatrix::from_fn(4, 4, |r, c| full[(COMPUTATIONAL_INDICES[r], COMPUTATIONAL_INDICES[c])]);
            if i == j {
                finals[i] = full.clone();
            } else {
                images[j][i] = block.adjoint();
            }
            images[i][j] = block;
        }
        let target = self.target();
        let fidelity = process_average_fidelity(&target, &images)?;
        let truth_table = TruthTable::from_densities(&finals, &COMPUTATIONAL_INDICES)?;
        Ok(OpenRun { images, fidelity, truth_table, trace_drift })
    }
}

fn uniform_times(duration: f64, points: usize) -> Vec<f64> {
    let points = points.max(1);
    (0..=points).map(|k| if k == points { duration } else { duration * k as f64 / points as f64 }).collect()
}

fn computational_columns() -> DMatrix<C64> {
    let mut init = DMatrix::zeros(PAIR_DIM, 4);
    for (k, &i) in COMPUTATIONAL_INDICES.iter().enumerate() {
        init[(i, k)] = C64::from(1.0);
    }
    init
}

#[derive(Clone, Debug)]
pub struct GateRun {
    /// `⟨out|U(T)|in⟩` over the computational basis.
    pub block: DMatrix<C64>,
    pub fidelity: f64,
    pub stats: StepStats,
}

impl GateRun {
    pub fn truth_table(&self) -> Result<TruthTable> {
        TruthTable::from_propagator(&self.block)
    }

    /// `|⟨target|U|ψ₀⟩|²` for a computational-basis input vector.
    pub fn state_fidelity(&self, target_gate: &Operator, input: [C64; 4]) -> f64 {
        let v = nalgebra::DVector::from_row_slice(&input);
        let out = &self.block * &v;
        let ideal = target_gate.matrix() * &v;
        (ideal.adjoint() * out)[(0, 0)].norm_sqr()
    }
}

#[derive(Clone, Debug)]
pub struct OpenRun {
    /// `P Φ(|i⟩⟨j|) P` blocks.
    pub images: Vec<Vec<DMatrix<C64>>>,
    pub fidelity: f64,
    pub truth_table: TruthTable,
    pub trace_drift: f64,
}

impl OpenRun {
    /// `⟨ψ_T|Φ(|ψ₀⟩⟨ψ₀|)|ψ_T⟩` with `ψ_T = U_target ψ₀`, assembled from the
    /// propagated images by linearity.
    pub fn state_fidelity(&self, target_gate: &Operator, input: [C64; 4]) -> f64 {
        let mut out = DMatrix::<C64>::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                let w = input[i] * input[j].conj();
                if w != C64::from(0.0) {
                    out += &self.images[i][j] * w;
                }
            }
        }
        let v = nalgebra::DVector::from_row_slice(&input);
        let ideal = target_gate.matrix() * v;
        (ideal.adjoint() * out * ideal)[(0, 0)].re
    }
}

/// `(|00⟩ + |10⟩)/√2` in the computational basis.
pub fn superposition_input() -> [C64; 4] {
    let a = C64::from(FRAC_1_SQRT_2);
    [a, C64::from(0.0), a, C64::from(0.0)]
}

#[derive(Clone, Debug)]
pub struct PopulationTrace {
    pub times: Vec<f64>,
    /// Per time: populations of `|ξ₋ξ₋⟩, |ξ₋ξ₊⟩, |ξ₊ξ₋⟩, |ξ₊ξ₊⟩`.
    pub populations: Vec<[f64; 4]>,
    pub overlaps: Vec<[C64; 4]>,
}

/// Lowest population reached by each dressed state over the run.
pub fn minimum_populations(trace: &PopulationTrace) -> [f64; 4] {
    let mut out = [f64::INFINITY; 4];
    for row in &trace.populations {
        for k in 0..4 {
            out[k] = out[k].min(row[k]);
        }
    }
    out
}

/// Index of the state that undergoes the cyclic evolution in the subspace ordering.
pub const CYCLIC_STATE: usize = 2;

/// Computational-basis ket `|00⟩..|11⟩` embedded in the pair space.
pub fn computational_state(index: usize) -> Result<State> {
    if index >= 4 {
        return Err(Error::Dimension(format!("computational index {index} ≥ 4")));
    }
    Ok(computational_ket(index))
}
