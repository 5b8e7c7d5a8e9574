//! Dense complex operators and states on small labeled Hilbert spaces.
//!
//! Everything here is sized for the two-atom problem: 25 basis states, and
//! the 625-entry density operators built on top of them. Operators carry a
//! basis label so that composite-space bookkeeping errors (mixing a
//! single-atom operator with a two-atom one, or two different dressed
//! frames) surface as errors instead of silent garbage.

use std::fmt;
use std::io::{self, BufRead, Write};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Default absolute entrywise tolerance for structural predicates.
pub const DEFAULT_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense complex square matrix tagged with the basis it is expressed in.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    basis: String,
    matrix: DMatrix<C64>,
}

/// Complex amplitude vector tagged with its basis.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    basis: String,
    amplitudes: DVector<C64>,
}

fn check_finite<'a>(it: impl IntoIterator<Item = &'a C64>) -> Result<()> {
    if it.into_iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("operator entries"))
    }
}

impl Operator {
    pub fn new(basis: impl Into<String>, matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "operator must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        check_finite(matrix.iter())?;
        Ok(Self { basis: basis.into(), matrix })
    }

    /// Builds an operator from a trusted matrix without the finiteness scan.
    pub(crate) fn from_matrix_unchecked(basis: impl Into<String>, matrix: DMatrix<C64>) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        Self { basis: basis.into(), matrix }
    }

    pub fn zeros(basis: impl Into<String>, dim: usize) -> Self {
        Self::from_matrix_unchecked(basis, DMatrix::zeros(dim, dim))
    }

    pub fn identity(basis: impl Into<String>, dim: usize) -> Self {
        Self::from_matrix_unchecked(basis, DMatrix::identity(dim, dim))
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &State, bra: &State) -> Result<Self> {
        same_basis(&ket.basis, &bra.basis)?;
        if ket.dim() != bra.dim() {
            return Err(Error::Dimension(format!("outer product of {} and {}", ket.dim(), bra.dim())));
        }
        Ok(Self::from_matrix_unchecked(
            ket.basis.clone(),
            &ket.amplitudes * bra.amplitudes.adjoint(),
        ))
    }

    /// Projector `|ψ⟩⟨ψ|`.
    pub fn projector(psi: &State) -> Self {
        Self::from_matrix_unchecked(psi.basis.clone(), &psi.amplitudes * psi.amplitudes.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn basis(&self) -> &str {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_matrix_unchecked(self.basis.clone(), self.matrix.adjoint())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_matrix_unchecked(self.basis.clone(), &self.matrix * s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Ok(Self::from_matrix_unchecked(self.basis.clone(), &self.matrix + &other.matrix))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Ok(Self::from_matrix_unchecked(self.basis.clone(), &self.matrix - &other.matrix))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Ok(Self::from_matrix_unchecked(self.basis.clone(), &self.matrix * &other.matrix))
    }

    pub fn apply(&self, psi: &State) -> Result<State> {
        same_basis(&self.basis, &psi.basis)?;
        if psi.dim() != self.dim() {
            return Err(Error::Dimension(format!("apply {}x{} to {}", self.dim(), self.dim(), psi.dim())));
        }
        Ok(State { basis: psi.basis.clone(), amplitudes: &self.matrix * &psi.amplitudes })
    }

    /// `⟨bra|A|ket⟩`.
    pub fn matrix_element(&self, bra: &State, ket: &State) -> Result<C64> {
        let a_ket = self.apply(ket)?;
        bra.inner(&a_ket)
    }

    /// Relabels the operator without touching its entries.
    pub fn relabel(mut self, basis: impl Into<String>) -> Self {
        self.basis = basis.into();
        self
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Largest entry of `|A − A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Largest entry of `|A A† − 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        max_abs(&(&self.matrix * self.matrix.adjoint() - DMatrix::<C64>::identity(n, n)))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Eigenvalues (ascending) of a Hermitian operator.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        self.require_hermitian(DEFAULT_TOL)?;
        let mut ev: Vec<f64> = SymmetricEigen::new(self.matrix.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }

    /// Restriction to the subspace spanned by `vectors`: the matrix `⟨v_i|A|v_j⟩`.
    pub fn restrict(&self, vectors: &[State], basis: impl Into<String>) -> Result<Self> {
        let n = vectors.len();
        let images = vectors.iter().map(|v| self.apply(v)).collect::<Result<Vec<_>>>()?;
        let mut m = DMatrix::zeros(n, n);
        for (i, bra) in vectors.iter().enumerate() {
            for (j, img) in images.iter().enumerate() {
                m[(i, j)] = bra.inner(img)?;
            }
        }
        Ok(Self::from_matrix_unchecked(basis, m))
    }

    /// Hermiticity check with `tol` taken relative to the largest entry once
    /// that exceeds 1, so that Hamiltonians in rad/s are judged on round-off
    /// rather than on their units.
    pub(crate) fn require_hermitian(&self, tol: f64) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect > tol * self.max_abs().max(1.0) {
            Err(Error::NotHermitian { defect, tol })
        } else {
            Ok(())
        }
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        same_basis(&self.basis, &other.basis)?;
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!("{} vs {}", self.dim(), other.dim())));
        }
        Ok(())
    }

    /// Writes the plain-text dump: one `row col re im` line per entry, row-major.
    pub fn write_dump<W: Write>(&self, mut w: W) -> io::Result<()> {
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                let z = self.matrix[(r, c)];
                writeln!(w, "{r} {c} {:e} {:e}", z.re, z.im)?;
            }
        }
        Ok(())
    }

    /// Reads the dump format written by [`Operator::write_dump`].
    pub fn read_dump<R: BufRead>(basis: impl Into<String>, r: R) -> Result<Self> {
        let mut entries = Vec::new();
        let mut dim = 0usize;
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::Io(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Parse(format!("dump line {}: {line:?}", lineno + 1));
            let mut it = line.split_whitespace();
            let row: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let col: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let re: f64 = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let im: f64 = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            if it.next().is_some() {
                return Err(bad());
            }
            dim = dim.max(row + 1).max(col + 1);
            entries.push((row, col, C64::new(re, im)));
        }
        let mut m = DMatrix::zeros(dim, dim);
        for (r, c, z) in entries {
            m[(r, c)] = z;
        }
        Self::new(basis, m)
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator[{}; {}x{}]", self.basis, self.dim(), self.dim())?;
        for r in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|c| {
                    let z = self.matrix[(r, c)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}

impl State {
    pub fn new(basis: impl Into<String>, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Dimension("empty state".into()));
        }
        check_finite(amplitudes.iter())?;
        Ok(Self { basis: basis.into(), amplitudes })
    }

    pub(crate) fn from_vector_unchecked(basis: impl Into<String>, amplitudes: DVector<C64>) -> Self {
        Self { basis: basis.into(), amplitudes }
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis_vector(basis: impl Into<String>, dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = ONE;
        Self { basis: basis.into(), amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn basis(&self) -> &str {
        &self.basis
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Dimension("cannot normalize the zero vector".into()));
        }
        Ok(Self { basis: self.basis.clone(), amplitudes: &self.amplitudes / C64::from(n) })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        same_basis(&self.basis, &other.basis)?;
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!("inner product of {} and {}", self.dim(), other.dim())));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { basis: self.basis.clone(), amplitudes: &self.amplitudes * s }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_basis(&self.basis, &other.basis)?;
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!("{} vs {}", self.dim(), other.dim())));
        }
        Ok(Self { basis: self.basis.clone(), amplitudes: &self.amplitudes + &other.amplitudes })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    /// Population `|⟨target|self⟩|²`.
    pub fn overlap_sqr(&self, target: &Self) -> Result<f64> {
        Ok(target.inner(self)?.norm_sqr())
    }
}

fn same_basis(a: &str, b: &str) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::BasisMismatch(a.to_string(), b.to_string()))
    }
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Kronecker product. The composite label is `"<a>⊗<b>"`, unless both factors
/// already carry the same label `x`, in which case it is `"x⊗x"` as well.
pub fn tensor(a: &Operator, b: &Operator) -> Result<Operator> {
    let dim = a
        .dim()
        .checked_mul(b.dim())
        .ok_or_else(|| Error::Dimension("tensor product dimension overflow".into()))?;
    let mut m = DMatrix::zeros(dim, dim);
    let nb = b.dim();
    for ar in 0..a.dim() {
        for ac in 0..a.dim() {
            let x = a.matrix[(ar, ac)];
            if x == ZERO {
                continue;
            }
            for br in 0..nb {
                for bc in 0..nb {
                    m[(ar * nb + br, ac * nb + bc)] = x * b.matrix[(br, bc)];
                }
            }
        }
    }
    Ok(Operator::from_matrix_unchecked(format!("{}⊗{}", a.basis, b.basis), m))
}

/// Kronecker product of states.
pub fn tensor_state(a: &State, b: &State) -> State {
    let nb = b.dim();
    let mut v = DVector::zeros(a.dim() * nb);
    for i in 0..a.dim() {
        for j in 0..nb {
            v[i * nb + j] = a.amplitudes[i] * b.amplitudes[j];
        }
    }
    State::from_vector_unchecked(format!("{}⊗{}", a.basis, b.basis), v)
}

/// `AB − BA`.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.compatible(b)?;
    Ok(Operator::from_matrix_unchecked(
        a.basis.clone(),
        &a.matrix * &b.matrix - &b.matrix * &a.matrix,
    ))
}

/// `exp(−i s A)` for Hermitian `A`, through the eigendecomposition of `A`.
pub fn expm_skew(a: &Operator, s: f64) -> Result<Operator> {
    a.require_hermitian(DEFAULT_TOL)?;
    Ok(Operator::from_matrix_unchecked(a.basis.clone(), expm_hermitian(a.matrix.clone(), s)))
}

/// `exp(−i s H)` for a Hermitian matrix. The input is symmetrized first so
/// that round-off asymmetry cannot leak into the eigenvectors.
pub(crate) fn expm_hermitian(h: DMatrix<C64>, s: f64) -> DMatrix<C64> {
    let sym = (&h + h.adjoint()) * C64::from(0.5);
    let eig = SymmetricEigen::new(sym);
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = C64::from_polar(1.0, -s * lambda);
        for r in 0..scaled.nrows() {
            scaled[(r, k)] *= phase;
        }
    }
    scaled * v.adjoint()
}

/// Frobenius norm of `A − B`.
pub fn frobenius_distance(a: &Operator, b: &Operator) -> Result<f64> {
    Ok(a.sub(b)?.frobenius_norm())
}

/// Sparse list of `(row, col, value)` entries. Used on the propagation hot
/// path, where the two-atom Hamiltonians have a few dozen nonzeros out of 625.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseOperator {
    pub dim: usize,
    pub entries: Vec<(usize, usize, C64)>,
}

impl SparseOperator {
    /// Drops entries with modulus at or below `cutoff`.
    pub fn from_dense(m: &DMatrix<C64>, cutoff: f64) -> Self {
        let mut entries = Vec::new();
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                let z = m[(r, c)];
                if z.norm() > cutoff {
                    entries.push((r, c, z));
                }
            }
        }
        Self { dim: m.nrows(), entries }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, z) in &self.entries {
            m[(r, c)] += z;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&(r, c, z)| (c, r, z.conj())).collect(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn pauli(which: char) -> Operator {
        let m = match which {
            'x' => DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
            'y' => DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
            'z' => DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
            _ => unreachable!(),
        };
        Operator::new("q", m).unwrap()
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let id = Operator::identity("q", 2);
        let t = tensor(&id, &id).unwrap();
        assert_eq!(t.dim(), 4);
        assert!(frobenius_distance(&t, &Operator::identity("q⊗q", 4)).unwrap() < 1e-15);
    }

    #[test]
    fn tensor_sigma_z_eigenvalue_on_first_factor() {
        let t = tensor(&pauli('z'), &Operator::identity("q", 2)).unwrap();
        // |0⟩⊗|1⟩ has index 1
        let psi = State::basis_vector("q⊗q", 4, 1);
        let out = t.apply(&psi).unwrap();
        assert!((out.inner(&psi).unwrap() - ONE).norm() < 1e-15);
    }

    #[test]
    fn tensor_rydberg_raising_maps_ground_pair_to_rydberg_pair() {
        // single atom order (0, 1, r, r+, r-): |r⟩⟨0| has a 1 at (2, 0)
        let mut m = DMatrix::zeros(5, 5);
        m[(2, 0)] = ONE;
        let raise = Operator::new("atom", m).unwrap();
        let t = tensor(&raise, &raise).unwrap();
        let zero_zero = State::basis_vector("atom⊗atom", 25, 0);
        let out = t.apply(&zero_zero).unwrap();
        // index arithmetic: |rr⟩ = 5*2 + 2
        let rr = State::basis_vector("atom⊗atom", 25, 12);
        assert!((out.inner(&rr).unwrap() - ONE).norm() < 1e-15);
        assert!((out.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_commutator() {
        let c = commutator(&pauli('x'), &pauli('y')).unwrap();
        let expected = pauli('z').scale(C64::new(0.0, 2.0));
        assert!(frobenius_distance(&c, &expected).unwrap() < 1e-15);
        let zero = commutator(&pauli('x'), &pauli('x')).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
    }

    #[test]
    fn commutator_rejects_mismatched_shapes() {
        let a = Operator::identity("q", 2);
        let b = Operator::identity("q", 3);
        assert!(matches!(commutator(&a, &b), Err(Error::Dimension(_))));
        let c = Operator::identity("other", 2);
        assert!(matches!(commutator(&a, &c), Err(Error::BasisMismatch(..))));
    }

    #[test]
    fn expm_of_sigma_z() {
        let u = expm_skew(&pauli('z'), FRAC_PI_2).unwrap();
        assert!((u.entry(0, 0) - C64::from_polar(1.0, -FRAC_PI_2)).norm() < 1e-14);
        assert!((u.entry(1, 1) - C64::from_polar(1.0, FRAC_PI_2)).norm() < 1e-14);
        assert!(u.entry(0, 1).norm() < 1e-14);
    }

    #[test]
    fn expm_at_zero_is_identity() {
        let u = expm_skew(&pauli('y'), 0.0).unwrap();
        assert!(frobenius_distance(&u, &Operator::identity("q", 2)).unwrap() < 1e-14);
    }

    #[test]
    fn expm_sigma_x_half_pi_rotation() {
        // exp(−i π/2 σx) = cos(π/2) − i sin(π/2) σx = −i σx
        let u = expm_skew(&pauli('x'), FRAC_PI_2).unwrap();
        let out = u.apply(&State::basis_vector("q", 2, 0)).unwrap();
        assert!((out.amplitudes()[1] - (-I)).norm() < 1e-14);
        assert!(out.amplitudes()[0].norm() < 1e-14);
    }

    #[test]
    fn expm_rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        let a = Operator::new("q", m).unwrap();
        assert!(matches!(expm_skew(&a, 1.0), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn predicates_and_scalars() {
        assert!(Operator::identity("q", 4).is_unitary(DEFAULT_TOL));
        assert_eq!(pauli('x').trace(), ZERO);
        let u = expm_skew(&pauli('x'), 0.3).unwrap();
        assert_eq!(frobenius_distance(&u, &u).unwrap(), 0.0);
        assert!(pauli('y').is_hermitian(DEFAULT_TOL));
    }

    #[test]
    fn rejects_non_finite_entries() {
        let m = DMatrix::from_element(2, 2, C64::new(f64::NAN, 0.0));
        assert!(matches!(Operator::new("q", m), Err(Error::NonFinite(_))));
    }

    #[test]
    fn dump_round_trip() {
        let u = expm_skew(&pauli('y'), 0.7).unwrap();
        let mut buf = Vec::new();
        u.write_dump(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("0 0 "));
        let back = Operator::read_dump("q", &buf[..]).unwrap();
        assert_eq!(back, u);
    }

    #[test]
    fn sparse_round_trip() {
        let u = expm_skew(&pauli('x'), 0.4).unwrap();
        let s = SparseOperator::from_dense(u.matrix(), 0.0);
        assert_eq!(s.to_dense(), *u.matrix());
        assert_eq!(s.adjoint().to_dense(), u.matrix().adjoint());
    }

    fn dense(n: usize, raw: &[f64]) -> DMatrix<C64> {
        DMatrix::from_fn(n, n, |r, c| C64::new(raw[2 * (r * n + c)], raw[2 * (r * n + c) + 1]))
    }

    fn hermitian(n: usize, raw: &[f64]) -> Operator {
        let m = dense(n, raw);
        Operator::new("h", (&m + m.adjoint()) * C64::from(0.5)).unwrap()
    }

    fn entries(n: usize) -> impl proptest::strategy::Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-3.0..3.0f64, 2 * n * n)
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn expm_is_unitary(raw in entries(6), s in -10.0..10.0f64) {
            let u = expm_skew(&hermitian(6, &raw), s).unwrap();
            let defect = max_abs(&(u.matrix() * u.matrix().adjoint() - DMatrix::<C64>::identity(6, 6)));
            proptest::prop_assert!(defect < 1e-9, "{defect}");
        }

        #[test]
        fn expm_composes(raw in entries(5), s in -3.0..3.0f64, t in -3.0..3.0f64) {
            let a = hermitian(5, &raw);
            let lhs = expm_skew(&a, s + t).unwrap();
            let rhs = expm_skew(&a, s).unwrap().mul(&expm_skew(&a, t).unwrap()).unwrap();
            proptest::prop_assert!(frobenius_distance(&lhs, &rhs).unwrap() < 1e-9);
        }

        #[test]
        fn tensor_identities(a in entries(5), b in entries(5), c in entries(5), d in entries(5)) {
            let op = |raw: &[f64]| Operator::new("x", dense(5, raw)).unwrap();
            let (a, b, c, d) = (op(&a), op(&b), op(&c), op(&d));
            let mixed = tensor(&a, &b).unwrap().mul(&tensor(&c, &d).unwrap()).unwrap();
            let direct = tensor(&a.mul(&c).unwrap(), &b.mul(&d).unwrap()).unwrap();
            // Products of O(1) random entries reach O(100); compare relative to the largest entry.
            let scale = mixed.max_abs().max(1.0);
            proptest::prop_assert!(max_abs(&(mixed.matrix() - direct.matrix())) < 1e-12 * scale);
            let left = tensor(&tensor(&a, &b).unwrap(), &c).unwrap();
            let right = tensor(&a, &tensor(&b, &c).unwrap()).unwrap();
            let scale = left.max_abs().max(1.0);
            proptest::prop_assert!(max_abs(&(left.matrix() - right.matrix())) < 1e-12 * scale);
        }
    }
}
