//! Time-dependent Hamiltonians assembled from fixed sparse operators and
//! scalar drive coefficients.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::operator::{Operator, SparseOperator};

/// Two real quadratures `(Ω_x, Ω_y)` of a control field, in rad/s.
pub trait ControlField: Send + Sync {
    fn quadratures(&self, t: f64) -> (f64, f64);

    fn duration(&self) -> f64;

    /// Times where the field (or one of its derivatives) is discontinuous.
    /// Integrators restart there instead of stepping across.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// `Ω_a e^{iφ_a} = (Ω_x + iΩ_y)/2`.
    fn complex_amplitude(&self, t: f64) -> C64 {
        let (x, y) = self.quadratures(t);
        C64::new(0.5 * x, 0.5 * y)
    }
}

/// A field that is identically zero over `[0, duration]`.
#[derive(Clone, Copy, Debug)]
pub struct ZeroField {
    pub duration: f64,
}

impl ControlField for ZeroField {
    fn quadratures(&self, _t: f64) -> (f64, f64) {
        (0.0, 0.0)
    }

    fn duration(&self) -> f64 {
        self.duration
    }
}

/// Anything that can produce the nonzero entries of `H(t)`.
pub trait HamiltonianSource: Send + Sync {
    fn dim(&self) -> usize;

    fn basis(&self) -> &str;

    /// Appends the nonzero entries of `H(t)` to `out` (which is cleared first).
    /// Repeated `(row, col)` pairs are summed.
    fn entries_at(&self, t: f64, out: &mut Vec<(usize, usize, C64)>);

    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    fn matrix_at(&self, t: f64) -> Operator {
        let mut buf = Vec::new();
        self.entries_at(t, &mut buf);
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (r, c, z) in buf {
            m[(r, c)] += z;
        }
        Operator::from_matrix_unchecked(self.basis().to_string(), m)
    }
}

/// Scalar time dependence of a drive term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coefficient {
    Constant(C64),
    /// `scale · (Ω_x + iΩ_y)/2`.
    Control { scale: f64 },
    /// `amplitude · e^{i·frequency·t}`.
    Oscillating { amplitude: C64, frequency: f64 },
    /// `scale · (Ω_x + iΩ_y)/2 · e^{i·frequency·t}`.
    ControlOscillating { scale: C64, frequency: f64 },
    /// `scale · |Ω_a|² = scale · (Ω_x² + Ω_y²)/4`.
    ControlIntensity { scale: f64 },
}

impl Coefficient {
    pub fn eval(&self, t: f64, field: &dyn ControlField) -> C64 {
        match *self {
            Coefficient::Constant(c) => c,
            Coefficient::Control { scale } => field.complex_amplitude(t) * scale,
            Coefficient::Oscillating { amplitude, frequency } => amplitude * C64::from_polar(1.0, frequency * t),
            Coefficient::ControlOscillating { scale, frequency } => {
                field.complex_amplitude(t) * scale * C64::from_polar(1.0, frequency * t)
            }
            Coefficient::ControlIntensity { scale } => C64::from(scale * field.complex_amplitude(t).norm_sqr()),
        }
    }
}

/// One term `c(t)·A`, optionally together with its conjugate `c(t)*·A†`.
#[derive(Clone, Debug)]
pub struct DriveTerm {
    pub op: SparseOperator,
    pub coefficient: Coefficient,
    pub add_adjoint: bool,
}

/// `H(t) = H_fixed + Σ_k [c_k(t) A_k (+ H.c.)]` over a control field.
#[derive(Clone)]
pub struct DrivenHamiltonian {
    basis: String,
    dim: usize,
    fixed: SparseOperator,
    terms: Vec<DriveTerm>,
    field: Arc<dyn ControlField>,
}

impl std::fmt::Debug for DrivenHamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DrivenHamiltonian")
            .field("basis", &self.basis)
            .field("dim", &self.dim)
            .field("fixed_nnz", &self.fixed.nnz())
            .field("terms", &self.terms.len())
            .finish()
    }
}

impl DrivenHamiltonian {
    pub fn new(basis: impl Into<String>, dim: usize, field: Arc<dyn ControlField>) -> Self {
        Self {
            basis: basis.into(),
            dim,
            fixed: SparseOperator { dim, entries: Vec::new() },
            terms: Vec::new(),
            field,
        }
    }

    /// Adds a time-independent Hermitian piece.
    pub fn with_fixed(mut self, op: &Operator) -> Self {
        let sparse = SparseOperator::from_dense(op.matrix(), 0.0);
        self.fixed.entries.extend(sparse.entries);
        self
    }

    /// Adds `c(t)·op + H.c.`.
    pub fn with_pair(mut self, op: &Operator, coefficient: Coefficient) -> Self {
        self.terms.push(DriveTerm {
            op: SparseOperator::from_dense(op.matrix(), 0.0),
            coefficient,
            add_adjoint: true,
        });
        self
    }

    /// Adds `c(t)·op` for a Hermitian `op` and real `c(t)`.
    pub fn with_hermitian(mut self, op: &Operator, coefficient: Coefficient) -> Self {
        self.terms.push(DriveTerm {
            op: SparseOperator::from_dense(op.matrix(), 0.0),
            coefficient,
            add_adjoint: false,
        });
        self
    }

    pub fn field(&self) -> &Arc<dyn ControlField> {
        &self.field
    }

    /// Largest number of nonzeros `entries_at` can emit.
    pub fn nnz_bound(&self) -> usize {
        self.fixed.nnz()
            + self
                .terms
                .iter()
                .map(|t| t.op.nnz() * if t.add_adjoint { 2 } else { 1 })
                .sum::<usize>()
    }
}

impl HamiltonianSource for DrivenHamiltonian {
    fn dim(&self) -> usize {
        self.dim
    }

    fn basis(&self) -> &str {
        &self.basis
    }

    fn entries_at(&self, t: f64, out: &mut Vec<(usize, usize, C64)>) {
        out.clear();
        out.extend_from_slice(&self.fixed.entries);
        for term in &self.terms {
            let c = term.coefficient.eval(t, self.field.as_ref());
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            for &(r, col, z) in &term.op.entries {
                let v = c * z;
                out.push((r, col, v));
                if term.add_adjoint {
                    out.push((col, r, v.conj()));
                }
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.field.breakpoints()
    }
}

/// Wraps a closure returning the dense `H(t)`. Slower than
/// [`DrivenHamiltonian`]; meant for frame-transformed or test Hamiltonians.
pub struct DenseHamiltonian<F> {
    basis: String,
    dim: usize,
    build: F,
    breakpoints: Vec<f64>,
}

impl<F> DenseHamiltonian<F>
where
    F: Fn(f64) -> DMatrix<C64> + Send + Sync,
{
    pub fn new(basis: impl Into<String>, dim: usize, build: F) -> Self {
        Self { basis: basis.into(), dim, build, breakpoints: Vec::new() }
    }

    pub fn with_breakpoints(mut self, breakpoints: Vec<f64>) -> Self {
        self.breakpoints = breakpoints;
        self
    }
}

impl<F> HamiltonianSource for DenseHamiltonian<F>
where
    F: Fn(f64) -> DMatrix<C64> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn basis(&self) -> &str {
        &self.basis
    }

    fn entries_at(&self, t: f64, out: &mut Vec<(usize, usize, C64)>) {
        out.clear();
        let m = (self.build)(t);
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                let z = m[(r, c)];
                if z.re != 0.0 || z.im != 0.0 {
                    out.push((r, c, z));
                }
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints.clone()
    }
}

impl<T: HamiltonianSource + ?Sized> HamiltonianSource for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn basis(&self) -> &str {
        (**self).basis()
    }

    fn entries_at(&self, t: f64, out: &mut Vec<(usize, usize, C64)>) {
        (**self).entries_at(t, out)
    }

    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

impl<T: HamiltonianSource + ?Sized> HamiltonianSource for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn basis(&self) -> &str {
        (**self).basis()
    }

    fn entries_at(&self, t: f64, out: &mut Vec<(usize, usize, C64)>) {
        (**self).entries_at(t, out)
    }

    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}
