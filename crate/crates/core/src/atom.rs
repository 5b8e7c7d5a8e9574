//! Two five-level Rydberg atoms with a resonant Förster exchange.
//!
//! Per-atom level order is `(|0⟩, |1⟩, |r⟩, |r₊⟩, |r₋⟩)` and the two-atom
//! index is `5·a + b`, atom `a` first. Atom `a` carries the shaped control
//! field, atom `b` the two constant detuned fields. Every Hamiltonian stage of
//! the effective-model hierarchy is available, from the full interaction
//! picture down to the two-level effective coupling, so that the
//! approximations can be checked against each other numerically.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::drive::{Coefficient, ControlField, DenseHamiltonian, DrivenHamiltonian, HamiltonianSource};
use crate::error::{Error, Result};
use crate::operator::{tensor, tensor_state, Operator, State, ONE};

pub const ATOM_BASIS: &str = "atom";
pub const PAIR_BASIS: &str = "atom⊗atom";
pub const COMPUTATIONAL_BASIS: &str = "computational";
pub const ATOM_DIM: usize = 5;
pub const PAIR_DIM: usize = 25;

/// Pair-space indices of `|00⟩, |01⟩, |10⟩, |11⟩`.
pub const COMPUTATIONAL_INDICES: [usize; 4] = [0, 1, 5, 6];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    Ground0,
    Ground1,
    R,
    RPlus,
    RMinus,
}

impl Level {
    pub const ALL: [Level; 5] = [Level::Ground0, Level::Ground1, Level::R, Level::RPlus, Level::RMinus];
    pub const RYDBERG: [Level; 3] = [Level::R, Level::RPlus, Level::RMinus];
    pub const GROUND: [Level; 2] = [Level::Ground0, Level::Ground1];

    pub fn index(self) -> usize {
        match self {
            Level::Ground0 => 0,
            Level::Ground1 => 1,
            Level::R => 2,
            Level::RPlus => 3,
            Level::RMinus => 4,
        }
    }

    pub fn is_rydberg(self) -> bool {
        matches!(self, Level::R | Level::RPlus | Level::RMinus)
    }

    pub fn label(self) -> &'static str {
        match self {
            Level::Ground0 => "0",
            Level::Ground1 => "1",
            Level::R => "r",
            Level::RPlus => "r+",
            Level::RMinus => "r-",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelInfo {
    pub level: Level,
    pub label: &'static str,
    /// Atomic state the level stands for (⁸⁷Rb).
    pub state: &'static str,
    pub rydberg: bool,
}

/// The five levels of one atom with their spectroscopic names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelScheme {
    pub levels: [LevelInfo; 5],
}

impl LevelScheme {
    pub fn rubidium() -> Self {
        let info = |level: Level, state| LevelInfo { level, label: level.label(), state, rydberg: level.is_rydberg() };
        Self {
            levels: [
                info(Level::Ground0, "5S1/2 F=1 mF=0"),
                info(Level::Ground1, "5S1/2 F=2 mF=0"),
                info(Level::R, "59D3/2 mj=3/2"),
                info(Level::RPlus, "61P1/2 mj=1/2"),
                info(Level::RMinus, "57F5/2 mj=5/2"),
            ],
        }
    }

    pub fn ground_count(&self) -> usize {
        self.levels.iter().filter(|l| !l.rydberg).count()
    }

    pub fn rydberg_count(&self) -> usize {
        self.levels.iter().filter(|l| l.rydberg).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Atom {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

pub fn pair_index(a: Level, b: Level) -> usize {
    ATOM_DIM * a.index() + b.index()
}

pub fn atom_ket(level: Level) -> State {
    State::basis_vector(ATOM_BASIS, ATOM_DIM, level.index())
}

pub fn pair_ket(a: Level, b: Level) -> State {
    State::basis_vector(PAIR_BASIS, PAIR_DIM, pair_index(a, b))
}

fn atom_operator(ket: &State, bra: &State) -> Operator {
    Operator::outer(ket, bra).expect("single-atom states share a basis")
}

/// Lifts a single-atom operator to the pair space.
pub fn on_atom(atom: Atom, op: &Operator) -> Operator {
    let id = Operator::identity(ATOM_BASIS, ATOM_DIM);
    let out = match atom {
        Atom::A => tensor(op, &id),
        Atom::B => tensor(&id, op),
    };
    out.expect("5x5 tensor products cannot overflow")
}

fn pair_outer(ket: &State, bra: &State) -> Operator {
    Operator::outer(ket, bra).expect("pair states share a basis")
}

fn proj(psi: &State) -> Operator {
    Operator::projector(psi)
}

fn lin(terms: &[(f64, &Operator)]) -> Operator {
    let mut m = DMatrix::<C64>::zeros(PAIR_DIM, PAIR_DIM);
    for (c, op) in terms {
        m += op.matrix() * C64::from(*c);
    }
    Operator::from_matrix_unchecked(PAIR_BASIS, m)
}

/// Physical knobs of the model, in SI units (s, rad/s).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Design dipole-dipole strength `V`.
    pub v: f64,
    /// Detuning `Δ` of the atom-b fields.
    pub detuning: f64,
    /// Constant field amplitude `Ω_b` on atom b.
    pub omega_b: f64,
    pub v_a: f64,
    pub v_b: f64,
    /// Gate duration `T`.
    pub duration: f64,
    /// Spontaneous-emission rate per decay channel.
    pub gamma: f64,
    /// Förster defect `δ` on `|R⟩`.
    pub forster_defect: f64,
    /// Deviation `δ′` of the dipole coupling: the coupling is `V + δ′` while `Δ` stays at `V`.
    pub dipole_deviation: f64,
    /// Systematic control-amplitude error `ε`: `Ω_a → (1 + ε)Ω_a`.
    pub field_scaling: f64,
}

/// `V·T` of the reference parameter set.
pub const REFERENCE_VT: f64 = 18000.0;
/// `Ω_b·T` of the reference parameter set.
pub const REFERENCE_OMEGA_B_T: f64 = 600.0;

/// `C₃` of the `59D/61P/57F` Förster channel, rad/s·m³.
pub const C3_RUBIDIUM: f64 = 2.0 * PI * 2.39e9 * 1e-18;

impl ModelParams {
    /// Reference regime expressed through the duration: `V = Δ = 18000/T`,
    /// `Ω_b = 600/T`, CNOT angles, no errors.
    pub fn reference(duration: f64) -> Self {
        Self {
            v: REFERENCE_VT / duration,
            detuning: REFERENCE_VT / duration,
            omega_b: REFERENCE_OMEGA_B_T / duration,
            v_a: PI / 2.0,
            v_b: PI / 4.0,
            duration,
            gamma: 0.0,
            forster_defect: 0.0,
            dipole_deviation: 0.0,
            field_scaling: 0.0,
        }
    }

    /// Laboratory preset: `V = Δ = 2π×133.04 MHz`, `Ω_b = 2π×4.43 MHz`, `T = 21.5 μs`.
    pub fn laboratory() -> Self {
        Self {
            v: 2.0 * PI * 133.04e6,
            detuning: 2.0 * PI * 133.04e6,
            omega_b: 2.0 * PI * 4.43e6,
            duration: 21.5e-6,
            ..Self::reference(21.5e-6)
        }
    }

    /// `V = √2·C₃/R³`.
    pub fn dipolar_strength(c3: f64, distance: f64) -> f64 {
        SQRT_2 * c3 / distance.powi(3)
    }

    pub fn with_angles(mut self, v_a: f64, v_b: f64) -> Self {
        self.v_a = v_a;
        self.v_b = v_b;
        self
    }

    /// Coupling actually felt by the pair: `V + δ′`.
    pub fn interaction(&self) -> f64 {
        self.v + self.dipole_deviation
    }

    pub fn dressed(&self) -> DressedBasis {
        DressedBasis { v_a: self.v_a, v_b: self.v_b }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.v,
            self.detuning,
            self.omega_b,
            self.v_a,
            self.v_b,
            self.duration,
            self.gamma,
            self.forster_defect,
            self.dipole_deviation,
            self.field_scaling,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("model parameters must be finite".into()));
        }
        for (name, x) in [("V", self.v), ("Ω_b", self.omega_b), ("T", self.duration)] {
            if x <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {x}")));
            }
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidParameter(format!("γ must be non-negative, got {}", self.gamma)));
        }
        Ok(())
    }

    /// Hierarchy `V ≫ Ω_b ≫ max Ω_a` violations, with a factor-10 margin.
    pub fn regime_warnings(&self, omega_a_max: f64) -> Vec<String> {
        let mut warnings = Vec::new();
        if self.interaction() < 10.0 * self.omega_b {
            warnings.push(format!(
                "V = {:.4e} rad/s is not ≫ Ω_b = {:.4e} rad/s (ratio {:.2})",
                self.interaction(),
                self.omega_b,
                self.interaction() / self.omega_b
            ));
        }
        if self.omega_b < 10.0 * omega_a_max {
            warnings.push(format!(
                "Ω_b = {:.4e} rad/s is not ≫ max Ω_a = {:.4e} rad/s (ratio {:.2})",
                self.omega_b,
                omega_a_max,
                self.omega_b / omega_a_max
            ));
        }
        warnings
    }
}

/// Dressed single-atom ground states and the collective Rydberg states built
/// from them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DressedBasis {
    pub v_a: f64,
    pub v_b: f64,
}

impl DressedBasis {
    fn angle(&self, atom: Atom) -> f64 {
        match atom {
            Atom::A => self.v_a,
            Atom::B => self.v_b,
        }
    }

    /// `|ξ₊⟩ = cos v|0⟩ + sin v|1⟩`, `|ξ₋⟩ = cos v|1⟩ − sin v|0⟩`.
    pub fn xi(&self, atom: Atom, sign: Sign) -> State {
        let v = self.angle(atom);
        let mut amp = DVector::zeros(ATOM_DIM);
        match sign {
            Sign::Plus => {
                amp[0] = C64::from(v.cos());
                amp[1] = C64::from(v.sin());
            }
            Sign::Minus => {
                amp[0] = C64::from(-v.sin());
                amp[1] = C64::from(v.cos());
            }
        }
        State::from_vector_unchecked(ATOM_BASIS, amp)
    }

    /// `|ξ_sa ξ_sb⟩`.
    pub fn xi_xi(&self, sa: Sign, sb: Sign) -> State {
        tensor_state(&self.xi(Atom::A, sa), &self.xi(Atom::B, sb))
    }

    /// `|r ξ_s⟩`: atom a in `|r⟩`.
    pub fn r_xi(&self, sb: Sign) -> State {
        tensor_state(&atom_ket(Level::R), &self.xi(Atom::B, sb))
    }

    /// `|ξ_s ℓ⟩`: atom b in the given level.
    pub fn xi_level(&self, sa: Sign, level: Level) -> State {
        tensor_state(&self.xi(Atom::A, sa), &atom_ket(level))
    }

    /// `|R⟩ = (|r₊r₋⟩ + |r₋r₊⟩)/√2`.
    pub fn big_r(&self) -> State {
        pair_ket(Level::RPlus, Level::RMinus)
            .add(&pair_ket(Level::RMinus, Level::RPlus))
            .expect("pair basis")
            .scale(C64::from(FRAC_1_SQRT_2))
    }

    /// `|ϖ_±⟩ = (|rr⟩ ± |R⟩)/√2`.
    pub fn varpi(&self, sign: Sign) -> State {
        pair_ket(Level::R, Level::R)
            .add(&self.big_r().scale(C64::from(sign.value())))
            .expect("pair basis")
            .scale(C64::from(FRAC_1_SQRT_2))
    }

    /// `|E_±⟩ = (|rξ₊⟩ ± |ϖ₋⟩)/√2`.
    pub fn e_state(&self, sign: Sign) -> State {
        self.r_xi(Sign::Plus)
            .add(&self.varpi(Sign::Minus).scale(C64::from(sign.value())))
            .expect("pair basis")
            .scale(C64::from(FRAC_1_SQRT_2))
    }

    /// The subspace `𝒮`, ordered `|ξ₋ξ₋⟩, |ξ₋ξ₊⟩, |ξ₊ξ₋⟩, |ξ₊ξ₊⟩`.
    pub fn subspace(&self) -> [State; 4] {
        [
            self.xi_xi(Sign::Minus, Sign::Minus),
            self.xi_xi(Sign::Minus, Sign::Plus),
            self.xi_xi(Sign::Plus, Sign::Minus),
            self.xi_xi(Sign::Plus, Sign::Plus),
        ]
    }

    /// Two-level basis of the effective coupling: `(|rξ₋⟩, |ξ₊ξ₋⟩)`.
    pub fn two_level(&self) -> [State; 2] {
        [self.r_xi(Sign::Minus), self.xi_xi(Sign::Plus, Sign::Minus)]
    }
}

/// `V|rr⟩⟨R| + H.c. + δ|R⟩⟨R|`, with `V` the actual coupling `V + δ′`.
pub fn forster_hamiltonian(params: &ModelParams) -> Operator {
    let d = params.dressed();
    let rr = pair_ket(Level::R, Level::R);
    let big_r = d.big_r();
    let coupling = pair_outer(&rr, &big_r);
    let mut h = lin(&[(params.interaction(), &coupling), (params.interaction(), &coupling.adjoint())]);
    if params.forster_defect != 0.0 {
        h = h.add(&proj(&big_r).scale(C64::from(params.forster_defect))).expect("pair basis");
    }
    h
}

/// `H_I = H₁ + H₂ + H_F` in the interaction picture, as a drive source.
pub fn interaction_hamiltonian(params: &ModelParams, field: Arc<dyn ControlField>) -> DrivenHamiltonian {
    let d = params.dressed();
    let xi_a = d.xi(Atom::A, Sign::Plus);
    let xi_b = d.xi(Atom::B, Sign::Plus);
    let raise_a = on_atom(Atom::A, &atom_operator(&xi_a, &atom_ket(Level::R)));
    let to_rplus_b = on_atom(Atom::B, &atom_operator(&atom_ket(Level::RPlus), &xi_b));
    let to_r_b = on_atom(Atom::B, &atom_operator(&atom_ket(Level::R), &xi_b));
    let ob = C64::from(params.omega_b);
    DrivenHamiltonian::new(PAIR_BASIS, PAIR_DIM, field)
        .with_fixed(&forster_hamiltonian(params))
        .with_pair(&raise_a, Coefficient::Control { scale: 1.0 + params.field_scaling })
        .with_pair(&to_rplus_b, Coefficient::Oscillating { amplitude: ob, frequency: -params.detuning })
        .with_pair(&to_r_b, Coefficient::Oscillating { amplitude: ob, frequency: params.detuning })
}

fn check_time(t: f64, duration: f64) -> Result<()> {
    let slack = 1e-12 * duration;
    if !(t >= -slack && t <= duration + slack) {
        return Err(Error::TimeOutOfRange { t, duration });
    }
    Ok(())
}

/// Dense `H_I(t)`.
pub fn full_hamiltonian(t: f64, params: &ModelParams, field: Arc<dyn ControlField>) -> Result<Operator> {
    params.validate()?;
    check_time(t, params.duration)?;
    Ok(interaction_hamiltonian(params, field).matrix_at(t))
}

/// Approximation stages below the full interaction picture.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    /// `H_I` itself.
    Interaction,
    /// `R H_I R† + iṘR†` with `R = exp(iVt(|ϖ₊⟩⟨ϖ₊| − |ϖ₋⟩⟨ϖ₋|))`.
    Rotating,
    /// Resonant part plus the second-order Stark and Raman terms.
    SecondOrder,
    /// The decoupled-sector Hamiltonian with the `|rξ₊⟩–|ϖ₋⟩` block diagonalized.
    Diagonalized,
    /// `Ω_a e^{iφ_a}|ξ₊ξ₋⟩⟨rξ₋| + H.c.`
    Effective,
}

impl std::str::FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "interaction" | "full" | "lab" => Ok(Stage::Interaction),
            "rotating" => Ok(Stage::Rotating),
            "second_order" | "second-order" => Ok(Stage::SecondOrder),
            "diagonalized" => Ok(Stage::Diagonalized),
            "effective" => Ok(Stage::Effective),
            other => Err(Error::InvalidParameter(format!("unknown Hamiltonian stage `{other}`"))),
        }
    }
}

/// `R(t) = exp(iVt(|ϖ₊⟩⟨ϖ₊| − |ϖ₋⟩⟨ϖ₋|))`, `V` the actual coupling.
pub fn rotating_frame(t: f64, params: &ModelParams) -> Operator {
    let d = params.dressed();
    let p_plus = proj(&d.varpi(Sign::Plus));
    let p_minus = proj(&d.varpi(Sign::Minus));
    let v = params.interaction();
    let mut m = DMatrix::<C64>::identity(PAIR_DIM, PAIR_DIM);
    m += p_plus.matrix() * (C64::from_polar(1.0, v * t) - ONE);
    m += p_minus.matrix() * (C64::from_polar(1.0, -v * t) - ONE);
    Operator::from_matrix_unchecked(PAIR_BASIS, m)
}

fn require_resonance(params: &ModelParams) -> Result<()> {
    let v = params.interaction();
    if (params.detuning - v).abs() > 1e-9 * v.abs().max(params.detuning.abs()) {
        return Err(Error::InvalidParameter(format!(
            "stage requires Δ = V (Δ = {:e}, V = {:e})",
            params.detuning, v
        )));
    }
    Ok(())
}

/// Builds the requested stage as a time-dependent source.
pub fn stage_source(
    stage: Stage,
    params: &ModelParams,
    field: Arc<dyn ControlField>,
) -> Result<Box<dyn HamiltonianSource>> {
    params.validate()?;
    if !matches!(stage, Stage::Interaction | Stage::Rotating) {
        require_resonance(params)?;
    }
    let d = params.dressed();
    let control = Coefficient::Control { scale: 1.0 + params.field_scaling };
    let ob = params.omega_b;
    let det = params.detuning;
    let xpm = d.xi_xi(Sign::Plus, Sign::Minus);
    let xpp = d.xi_xi(Sign::Plus, Sign::Plus);
    let r_xm = d.r_xi(Sign::Minus);
    let r_xp = d.r_xi(Sign::Plus);
    let varpi_p = d.varpi(Sign::Plus);
    let varpi_m = d.varpi(Sign::Minus);

    let source: Box<dyn HamiltonianSource> = match stage {
        Stage::Interaction => Box::new(interaction_hamiltonian(params, field)),
        Stage::Rotating => {
            let lab = interaction_hamiltonian(params, field.clone());
            let params = *params;
            let k = proj(&varpi_p).sub(&proj(&varpi_m)).expect("pair basis").into_matrix();
            let breakpoints = field.breakpoints();
            Box::new(
                DenseHamiltonian::new(PAIR_BASIS, PAIR_DIM, move |t| {
                    let r = rotating_frame(t, &params).into_matrix();
                    let h = lab.matrix_at(t).into_matrix();
                    // iṘR† = −V K
                    &r * h * r.adjoint() - &k * C64::from(params.interaction())
                })
                .with_breakpoints(breakpoints),
            )
        }
        Stage::SecondOrder => {
            let xi_r = |s| d.xi_level(s, Level::R);
            let xi_rp = |s| d.xi_level(s, Level::RPlus);
            let r_rp = pair_ket(Level::R, Level::RPlus);
            let xi_rp_plus = d.xi_level(Sign::Plus, Level::RPlus);
            let stark = ob * ob / det;
            // terms exactly as printed, including the repeated |ξ₊r⟩ projector
            let h1_fixed = lin(&[
                (stark, &proj(&xi_r(Sign::Minus))),
                (stark, &proj(&xi_r(Sign::Plus))),
                (-stark, &proj(&xi_rp(Sign::Minus))),
                (stark, &proj(&xi_r(Sign::Plus))),
                (-stark, &proj(&xi_rp(Sign::Plus))),
                (stark, &proj(&r_xp)),
                (-stark, &proj(&r_rp)),
                (stark / 4.0, &proj(&varpi_p)),
                (-stark / 4.0, &proj(&r_xp)),
            ]);
            let varpi_split = lin(&[(1.0, &proj(&varpi_p)), (-1.0, &proj(&varpi_m))]);
            let eps = 1.0 + params.field_scaling;
            Box::new(
                DrivenHamiltonian::new(PAIR_BASIS, PAIR_DIM, field)
                    .with_fixed(&h1_fixed)
                    .with_pair(&pair_outer(&xpm, &r_xm), control)
                    .with_pair(&pair_outer(&xpp, &r_xp), control)
                    .with_pair(&pair_outer(&xi_rp_plus, &r_rp), control)
                    .with_pair(&pair_outer(&r_xp, &varpi_m), Coefficient::Constant(C64::from(ob * FRAC_1_SQRT_2)))
                    .with_hermitian(&varpi_split, Coefficient::ControlIntensity { scale: eps * eps / (2.0 * det) })
                    .with_pair(
                        &pair_outer(&varpi_m, &xpp),
                        Coefficient::Control { scale: -ob * eps / (SQRT_2 * det) },
                    ),
            )
        }
        Stage::Diagonalized => {
            let e_p = d.e_state(Sign::Plus);
            let e_m = d.e_state(Sign::Minus);
            let e_sum = e_p.add(&e_m).expect("pair basis");
            let fixed = lin(&[
                (3.0 * ob * ob / (8.0 * det), &pair_outer(&e_sum, &e_sum)),
                (ob * FRAC_1_SQRT_2, &proj(&e_p)),
                (-ob * FRAC_1_SQRT_2, &proj(&e_m)),
            ]);
            let to_e = pair_outer(&xpp, &e_sum).scale(C64::from(FRAC_1_SQRT_2));
            Box::new(
                DrivenHamiltonian::new(PAIR_BASIS, PAIR_DIM, field)
                    .with_fixed(&fixed)
                    .with_pair(&pair_outer(&xpm, &r_xm), control)
                    .with_pair(&to_e, control),
            )
        }
        Stage::Effective => Box::new(effective_hamiltonian(params, field)),
    };
    Ok(source)
}

/// `(1+ε)Ω_a e^{iφ_a}|ξ₊ξ₋⟩⟨rξ₋| + H.c.` on the pair space.
pub fn effective_hamiltonian(params: &ModelParams, field: Arc<dyn ControlField>) -> DrivenHamiltonian {
    let d = params.dressed();
    let op = pair_outer(&d.xi_xi(Sign::Plus, Sign::Minus), &d.r_xi(Sign::Minus));
    DrivenHamiltonian::new(PAIR_BASIS, PAIR_DIM, field)
        .with_pair(&op, Coefficient::Control { scale: 1.0 + params.field_scaling })
}

/// Dense Hamiltonian of the given stage at time `t`.
pub fn stage_hamiltonian(
    stage: Stage,
    t: f64,
    params: &ModelParams,
    field: Arc<dyn ControlField>,
) -> Result<Operator> {
    check_time(t, params.duration)?;
    Ok(stage_source(stage, params, field)?.matrix_at(t))
}

/// The two-qubit gate produced by a π geometric phase on `|ξ₊ξ₋⟩`, in the
/// basis `(|00⟩, |01⟩, |10⟩, |11⟩)`.
pub fn target_gate(v_a: f64, v_b: f64) -> Operator {
    let (sa, ca) = v_a.sin_cos();
    let (sb, cb) = v_b.sin_cos();
    let (s2a, s2b, c2b) = ((2.0 * v_a).sin(), (2.0 * v_b).sin(), (2.0 * v_b).cos());
    #[rustfmt::skip]
    let rows = [
        sa * sa + ca * ca * c2b, ca * ca * s2b,           -s2a * sb * sb,          0.5 * s2a * s2b,
        ca * ca * s2b,           sa * sa - ca * ca * c2b, 0.5 * s2a * s2b,         -s2a * cb * cb,
        -s2a * sb * sb,          0.5 * s2a * s2b,         ca * ca + sa * sa * c2b, sa * sa * s2b,
        0.5 * s2a * s2b,         -s2a * cb * cb,          sa * sa * s2b,           ca * ca - sa * sa * c2b,
    ];
    let m = DMatrix::from_row_iterator(4, 4, rows.iter().map(|&x| C64::from(x)));
    Operator::from_matrix_unchecked(COMPUTATIONAL_BASIS, m)
}

/// `|00⟩⟨00| + |01⟩⟨01| + |10⟩⟨11| + |11⟩⟨10|`.
pub fn cnot() -> Operator {
    let mut m = DMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(2, 3)] = ONE;
    m[(3, 2)] = ONE;
    Operator::from_matrix_unchecked(COMPUTATIONAL_BASIS, m)
}

/// `diag(1, 1, 1, −1)`.
pub fn cz() -> Operator {
    let mut m = DMatrix::identity(4, 4);
    m[(3, 3)] = -ONE;
    Operator::from_matrix_unchecked(COMPUTATIONAL_BASIS, m)
}

/// Collapse operators `√γ |j⟩_p⟨p′|` for both atoms, every Rydberg level `p′`
/// and both ground targets `j`. Order: atom, then Rydberg level, then target.
pub fn lindblad_operators(gamma: f64) -> Result<Vec<Operator>> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("decay rate must be finite and ≥ 0, got {gamma}")));
    }
    let amp = C64::from(gamma.sqrt());
    let mut ops = Vec::with_capacity(12);
    for atom in [Atom::A, Atom::B] {
        for excited in Level::RYDBERG {
            for ground in Level::GROUND {
                let single = atom_operator(&atom_ket(ground), &atom_ket(excited)).scale(amp);
                ops.push(on_atom(atom, &single));
            }
        }
    }
    Ok(ops)
}

/// Computational-basis ket (`index` 0..4 for `|00⟩..|11⟩`) in the pair space.
pub fn computational_ket(index: usize) -> State {
    State::basis_vector(PAIR_BASIS, PAIR_DIM, COMPUTATIONAL_INDICES[index])
}

/// Embeds a 4-component computational-basis vector into the pair space.
pub fn embed_computational(amplitudes: [C64; 4]) -> State {
    let mut v = DVector::zeros(PAIR_DIM);
    for (k, &idx) in COMPUTATIONAL_INDICES.iter().enumerate() {
        v[idx] = amplitudes[k];
    }
    State::from_vector_unchecked(PAIR_BASIS, v)
}
