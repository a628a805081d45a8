//! Dense state-vector and density-matrix primitives for up to eight qubits.
//!
//! Basis indices follow the ket ordering `|q1 q2 ... qn⟩`: qubit 1 is the most
//! significant bit of the index. Every routine here is a pure function on
//! immutable values.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};

pub type C64 = Complex64;

/// 2×2 complex matrix, row-major.
pub type Mat2 = [[C64; 2]; 2];

/// Default tolerance for analytic identities.
pub const TOL: f64 = 1e-10;

/// Largest register the toolkit handles (two four-qubit wings).
pub const MAX_QUBITS: usize = 8;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

pub(crate) fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Pure state of `n_qubits` qubits with a unit-norm amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl QuantumState {
    /// Builds a state, rejecting amplitude vectors whose norm deviates from 1
    /// by more than [`TOL`].
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_size(n_qubits)?;
        if amplitudes.len() != 1 << n_qubits {
            return Err(argument(format!(
                "{} amplitudes do not match {} qubits",
                amplitudes.len(),
                n_qubits
            )));
        }
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > TOL {
            return Err(argument(format!("state norm {norm} is not 1")));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// Builds a state by normalizing `amplitudes`.
    pub fn normalized(n_qubits: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if n < TOL {
            return Err(argument("cannot normalize the zero vector"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= n);
        Self::new(n_qubits, amplitudes)
    }

    /// Real amplitudes with an overall prefactor, e.g. `1/2 (|0101⟩ - |0110⟩ ...)`.
    pub fn from_terms(n_qubits: usize, prefactor: f64, terms: &[(f64, &str)]) -> Result<Self> {
        check_size(n_qubits)?;
        let mut amps = vec![ZERO; 1 << n_qubits];
        for &(coef, bits) in terms {
            amps[parse_bits(n_qubits, bits)?] += re(prefactor * coef);
        }
        Self::new(n_qubits, amps)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_size(n_qubits)?;
        if index >= 1 << n_qubits {
            return Err(argument(format!("basis index {index} out of range")));
        }
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[index] = ONE;
        Ok(Self {
            n_qubits,
            amplitudes: amps,
        })
    }

    /// Computational basis state from a bit string such as `"0101"`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let n = bits.len();
        Self::basis(n, parse_bits(n, bits)?)
    }

    /// Linear combination `Σ c_k |s_k⟩`, normalized afterwards.
    pub fn superposition(terms: &[(C64, &QuantumState)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| argument("empty superposition"))?.1;
        let mut amps = vec![ZERO; first.dim()];
        for (c, s) in terms {
            if s.n_qubits != first.n_qubits {
                return Err(argument("superposition of states with different sizes"));
            }
            for (a, b) in amps.iter_mut().zip(&s.amplitudes) {
                *a += c * b;
            }
        }
        Self::normalized(first.n_qubits, amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QuantumState) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &QuantumState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Distance after removing the best global phase.
    pub fn distance_up_to_phase(&self, other: &QuantumState) -> f64 {
        let ov = self.inner(other);
        let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { ONE };
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a * phase - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn to_density(&self) -> DensityOperator {
        let v = nalgebra::DVector::from_column_slice(&self.amplitudes);
        DensityOperator {
            n_qubits: self.n_qubits,
            matrix: &v * v.adjoint(),
        }
    }

    pub(crate) fn from_raw(n_qubits: usize, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_qubits);
        Self { n_qubits, amplitudes }
    }
}

impl fmt::Display for QuantumState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm() < 1e-12 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)|{:0width$b}⟩", a.re, a.im, i, width = self.n_qubits)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn check_size(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::Size {
            n_qubits,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

fn parse_bits(n_qubits: usize, bits: &str) -> Result<usize> {
    if bits.len() != n_qubits {
        return Err(argument(format!("bit string {bits:?} is not {n_qubits} long")));
    }
    bits.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(argument(format!("invalid bit {ch:?} in {bits:?}"))),
    })
}

pub(crate) fn norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Bit mask of qubit `q` (1-based) in an `n`-qubit index.
#[inline]
pub(crate) fn qubit_mask(n: usize, q: usize) -> usize {
    1 << (n - q)
}

/// Applies a 2×2 matrix to qubit `q` (1-based) of an amplitude vector in place.
pub(crate) fn apply_single_qubit(amps: &mut [C64], n: usize, q: usize, m: &Mat2) {
    let mask = qubit_mask(n, q);
    for i in 0..amps.len() {
        if i & mask == 0 {
            let j = i | mask;
            let (a0, a1) = (amps[i], amps[j]);
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[j] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

/// Kronecker product `a ⊗ b`; `a` occupies the leading qubits.
pub fn tensor(a: &QuantumState, b: &QuantumState) -> Result<QuantumState> {
    let n = a.n_qubits + b.n_qubits;
    check_size(n)?;
    let amps = a
        .amplitudes
        .iter()
        .flat_map(|x| b.amplitudes.iter().map(move |y| x * y))
        .collect();
    Ok(QuantumState::from_raw(n, amps))
}

/// Relabels qubits: qubit `k` of the input becomes qubit `perm[k-1]` of the
/// output (both 1-based).
pub fn permute_qubits(s: &QuantumState, perm: &[usize]) -> Result<QuantumState> {
    let n = s.n_qubits;
    if perm.len() != n {
        return Err(argument(format!("permutation of length {} for {n} qubits", perm.len())));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p == 0 || p > n || seen[p - 1] {
            return Err(argument(format!("{perm:?} is not a permutation of 1..={n}")));
        }
        seen[p - 1] = true;
    }
    let mut out = vec![ZERO; s.dim()];
    for (i, a) in s.amplitudes.iter().enumerate() {
        let mut j = 0;
        for (k, &p) in perm.iter().enumerate() {
            if i & qubit_mask(n, k + 1) != 0 {
                j |= qubit_mask(n, p);
            }
        }
        out[j] = *a;
    }
    Ok(QuantumState::from_raw(n, out))
}

/// Transposition of qubits `a` and `b` as a permutation vector.
pub fn swap_permutation(n: usize, a: usize, b: usize) -> Vec<usize> {
    (1..=n)
        .map(|k| {
            if k == a {
                b
            } else if k == b {
                a
            } else {
                k
            }
        })
        .collect()
}

/// Which qubits a collective operation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Wing {
    All,
    /// Qubits 1–4 of an eight-qubit register.
    Alice,
    /// Qubits 5–8 of an eight-qubit register.
    Bob,
}

impl Wing {
    /// 1-based qubit indices covered by this wing in an `n`-qubit register.
    pub fn qubits(self, n_qubits: usize) -> Result<std::ops::RangeInclusive<usize>> {
        match self {
            Wing::All => Ok(1..=n_qubits),
            Wing::Alice | Wing::Bob if n_qubits != 8 => Err(argument(format!(
                "wing {self:?} requires an 8-qubit register, got {n_qubits}"
            ))),
            Wing::Alice => Ok(1..=4),
            Wing::Bob => Ok(5..=8),
        }
    }
}

/// Element of U(2), checked to be unitary within [`TOL`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2 {
    entries: Mat2,
}

impl Unitary2 {
    pub fn new(entries: Mat2) -> Result<Self> {
        let u = Self { entries };
        let p = u.adjoint().mul(&u).entries;
        let dev = (p[0][0] - ONE).norm() + p[0][1].norm() + p[1][0].norm() + (p[1][1] - ONE).norm();
        if dev > TOL {
            return Err(argument(format!("matrix is not unitary (deviation {dev:.3e})")));
        }
        Ok(u)
    }

    pub fn identity() -> Self {
        Self {
            entries: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    pub fn pauli_x() -> Self {
        Self {
            entries: [[ZERO, ONE], [ONE, ZERO]],
        }
    }

    /// SU(2) element `[[a, -b*], [b, a*]]`; `|a|² + |b|²` must be 1.
    pub fn from_cayley_klein(a: C64, b: C64) -> Result<Self> {
        Self::new([[a, -b.conj()], [b, a.conj()]])
    }

    /// Real rotation by `t` in the x–z plane of the Bloch sphere,
    /// `[[cos t, -sin t], [sin t, cos t]]`.
    pub fn xz_rotation(t: f64) -> Self {
        let (s, c) = t.sin_cos();
        Self {
            entries: [[re(c), re(-s)], [re(s), re(c)]],
        }
    }

    pub fn entries(&self) -> &Mat2 {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let e = &self.entries;
        Self {
            entries: [[e[0][0].conj(), e[1][0].conj()], [e[0][1].conj(), e[1][1].conj()]],
        }
    }

    pub fn mul(&self, rhs: &Unitary2) -> Self {
        Self {
            entries: mat2_mul(&self.entries, &rhs.entries),
        }
    }

    pub fn det(&self) -> C64 {
        let e = &self.entries;
        e[0][0] * e[1][1] - e[0][1] * e[1][0]
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let e = &self.entries;
        [e[0][0] * v[0] + e[0][1] * v[1], e[1][0] * v[0] + e[1][1] * v[1]]
    }

    /// Frobenius norm of `U†U − I`.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.adjoint().mul(self).entries;
        ((p[0][0] - ONE).norm_sqr() + p[0][1].norm_sqr() + p[1][0].norm_sqr() + (p[1][1] - ONE).norm_sqr()).sqrt()
    }
}

pub(crate) fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Returns `(U^{⊗k}) |s⟩` with `k` the qubits of `wing`.
pub fn apply_collective(s: &QuantumState, u: &Unitary2, wing: Wing) -> Result<QuantumState> {
    let n = s.n_qubits;
    let mut amps = s.amplitudes.clone();
    for q in wing.qubits(n)? {
        apply_single_qubit(&mut amps, n, q, &u.entries);
    }
    Ok(QuantumState::from_raw(n, amps))
}

/// Draws a Haar-distributed element of SU(2).
///
/// Parametrization: four independent standard normals `(x0, x1, x2, x3)` are
/// normalized to a uniform point on the unit 3-sphere (a unit quaternion) and
/// mapped to `[[a, -b*], [b, a*]]` with `a = x0 + i x3`, `b = x2 + i x1`. The
/// uniform measure on S³ is the Haar measure of SU(2).
pub fn haar_su2<R: Rng + ?Sized>(rng: &mut R) -> Unitary2 {
    loop {
        let x: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r < 1e-12 {
            continue;
        }
        let a = C64::new(x[0] / r, x[3] / r);
        let b = C64::new(x[2] / r, x[1] / r);
        return Unitary2 {
            entries: [[a, -b.conj()], [b, a.conj()]],
        };
    }
}

/// Hermitian, unit-trace, positive semidefinite operator on `n_qubits`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    n_qubits: usize,
    matrix: DMatrix<C64>,
}

impl DensityOperator {
    pub fn new(n_qubits: usize, matrix: DMatrix<C64>) -> Result<Self> {
        check_size(n_qubits)?;
        let d = 1 << n_qubits;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(argument(format!("density matrix must be {d}×{d}")));
        }
        let rho = Self { n_qubits, matrix };
        let herm = rho.hermiticity_error();
        if herm > TOL {
            return Err(argument(format!("matrix is not Hermitian (error {herm:.3e})")));
        }
        let tr = rho.trace();
        if (tr - 1.0).abs() > TOL {
            return Err(argument(format!("trace {tr} is not 1")));
        }
        if let Some(&min) = rho.eigenvalues().last() {
            if min < -TOL {
                return Err(argument(format!("negative eigenvalue {min:.3e}")));
            }
        }
        Ok(rho)
    }

    /// Incoherent mixture `Σ p_k |s_k⟩⟨s_k|`.
    pub fn mixture(terms: &[(f64, &QuantumState)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| argument("empty mixture"))?.1;
        let d = first.dim();
        let mut m = DMatrix::zeros(d, d);
        for (p, s) in terms {
            if s.n_qubits != first.n_qubits {
                return Err(argument("mixture of states with different sizes"));
            }
            m += s.to_density().matrix * re(*p);
        }
        Self::new(first.n_qubits, m)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Max-entry norm of `ρ − ρ†`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = &self.matrix - self.matrix.adjoint();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-entry distance to another operator.
    pub fn max_abs_diff(&self, other: &DensityOperator) -> f64 {
        (&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().into_iter().map(|(l, _)| l).collect()
    }

    /// Eigenpairs sorted by descending eigenvalue.
    pub fn eigen(&self) -> Vec<(f64, Vec<C64>)> {
        let eig = hermitian_part(&self.matrix).symmetric_eigen();
        let mut pairs: Vec<(f64, Vec<C64>)> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(k, &l)| (l, eig.eigenvectors.column(k).iter().copied().collect()))
            .collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        pairs
    }

    /// `⟨s|ρ|s⟩`.
    pub fn expectation(&self, s: &QuantumState) -> f64 {
        let v = nalgebra::DVector::from_column_slice(s.amplitudes());
        (v.adjoint() * &self.matrix * &v)[(0, 0)].re
    }

    /// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
    ///
    /// The square root of `self` is taken on its support (eigenvalues above
    /// `1e-12`), so the inner eigenproblem is only as large as the rank of
    /// `self` and is not polluted by round-off in the null space.
    pub fn fidelity(&self, sigma: &DensityOperator) -> f64 {
        let support: Vec<(f64, Vec<C64>)> = self.eigen().into_iter().filter(|(l, _)| *l > 1e-12).collect();
        let r = support.len();
        let d = self.matrix.nrows();
        let mut v = DMatrix::zeros(d, r);
        for (k, (l, vec)) in support.iter().enumerate() {
            let s = l.sqrt();
            for i in 0..d {
                v[(i, k)] = vec[i] * s;
            }
        }
        // √ρ σ √ρ restricted to the support: V† σ V with V carrying √λ.
        let k = v.adjoint() * &sigma.matrix * &v;
        let eig = hermitian_part(&k).symmetric_eigen();
        let t: f64 = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).sum();
        t * t
    }

    /// `(U^{⊗k}) ρ (U^{⊗k})†` on the qubits of `wing`.
    pub fn conjugate_collective(&self, u: &Unitary2, wing: Wing) -> Result<DensityOperator> {
        let n = self.n_qubits;
        let d = 1 << n;
        let qubits: Vec<usize> = wing.qubits(n)?.collect();
        let ua = u.entries;
        let uc = [[ua[0][0].conj(), ua[0][1].conj()], [ua[1][0].conj(), ua[1][1].conj()]];
        let mut m = self.matrix.clone();
        // Columns: U acts on the row index of each column.
        let mut buf = vec![ZERO; d];
        for c in 0..d {
            buf.iter_mut().enumerate().for_each(|(i, b)| *b = m[(i, c)]);
            for &q in &qubits {
                apply_single_qubit(&mut buf, n, q, &ua);
            }
            buf.iter().enumerate().for_each(|(i, b)| m[(i, c)] = *b);
        }
        // Rows: right multiplication by U† is conj(U) acting on the column index.
        for r in 0..d {
            buf.iter_mut().enumerate().for_each(|(j, b)| *b = m[(r, j)]);
            for &q in &qubits {
                apply_single_qubit(&mut buf, n, q, &uc);
            }
            buf.iter().enumerate().for_each(|(j, b)| m[(r, j)] = *b);
        }
        Ok(DensityOperator { n_qubits: n, matrix: m })
    }

    pub(crate) fn from_matrix_unchecked(n_qubits: usize, matrix: DMatrix<C64>) -> Self {
        Self { n_qubits, matrix }
    }
}

fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * re(0.5)
}

/// Input accepted by [`partial_trace`].
#[derive(Clone, Copy, Debug)]
pub enum Traceable<'a> {
    State(&'a QuantumState),
    Density(&'a DensityOperator),
}

impl<'a> From<&'a QuantumState> for Traceable<'a> {
    fn from(s: &'a QuantumState) -> Self {
        Traceable::State(s)
    }
}

impl<'a> From<&'a DensityOperator> for Traceable<'a> {
    fn from(r: &'a DensityOperator) -> Self {
        Traceable::Density(r)
    }
}

/// Reduced density operator on the qubits in `keep` (1-based; output qubit
/// order follows ascending qubit index).
pub fn partial_trace<'a>(input: impl Into<Traceable<'a>>, keep: &[usize]) -> Result<DensityOperator> {
    let input = input.into();
    let n = match input {
        Traceable::State(s) => s.n_qubits,
        Traceable::Density(r) => r.n_qubits,
    };
    if keep.is_empty() {
        return Err(argument("partial trace needs at least one kept qubit"));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() || kept.iter().any(|&q| q == 0 || q > n) {
        return Err(argument(format!("invalid kept qubits {keep:?} for {n} qubits")));
    }
    let traced: Vec<usize> = (1..=n).filter(|q| !kept.contains(q)).collect();
    let scatter = |sub: usize, qubits: &[usize]| -> usize {
        let m = qubits.len();
        qubits
            .iter()
            .enumerate()
            .filter(|(k, _)| sub & (1 << (m - 1 - k)) != 0)
            .fold(0, |acc, (_, &q)| acc | qubit_mask(n, q))
    };
    let dk = 1 << kept.len();
    let dt = 1 << traced.len();
    let kept_idx: Vec<usize> = (0..dk).map(|i| scatter(i, &kept)).collect();
    let traced_idx: Vec<usize> = (0..dt).map(|t| scatter(t, &traced)).collect();
    let mut out = DMatrix::zeros(dk, dk);
    match input {
        Traceable::State(s) => {
            let a = &s.amplitudes;
            for i in 0..dk {
                for j in 0..dk {
                    out[(i, j)] = traced_idx
                        .iter()
                        .map(|&t| a[kept_idx[i] | t] * a[kept_idx[j] | t].conj())
                        .sum();
                }
            }
        }
        Traceable::Density(r) => {
            for i in 0..dk {
                for j in 0..dk {
                    out[(i, j)] = traced_idx
                        .iter()
                        .map(|&t| r.matrix[(kept_idx[i] | t, kept_idx[j] | t)])
                        .sum();
                }
            }
        }
    }
    Ok(DensityOperator::from_matrix_unchecked(kept.len(), out))
}

/// Orthogonal projector onto the span of orthonormal vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    vectors: Vec<QuantumState>,
}

impl Projector {
    pub fn new(vectors: Vec<QuantumState>) -> Result<Self> {
        let p = Self { vectors };
        check_orthonormal(p.vectors.iter())?;
        Ok(p)
    }

    pub fn rank_one(v: QuantumState) -> Self {
        Self { vectors: vec![v] }
    }

    pub fn vectors(&self) -> &[QuantumState] {
        &self.vectors
    }

    fn n_qubits(&self) -> Option<usize> {
        self.vectors.first().map(QuantumState::n_qubits)
    }
}

fn check_orthonormal<'a>(vectors: impl Iterator<Item = &'a QuantumState> + Clone) -> Result<()> {
    for (i, a) in vectors.clone().enumerate() {
        for b in vectors.clone().skip(i + 1) {
            let ov = a.inner(b).norm();
            if ov > TOL {
                return Err(argument(format!("projector vectors overlap by {ov:.3e}")));
            }
        }
    }
    Ok(())
}

/// Born-rule probabilities of a projective measurement, with the residual
/// weight outside every projector reported as `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub probabilities: Vec<f64>,
    pub null: f64,
}

impl OutcomeDistribution {
    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum::<f64>() + self.null
    }
}

/// Contracts the qubits of `wing` against `⟨v|`, returning the unnormalized
/// state of the remaining qubits (a single amplitude when `wing` is `All`).
pub(crate) fn contract_wing(s: &[C64], n: usize, wing: Wing, v: &[C64]) -> Vec<C64> {
    match wing {
        Wing::All => vec![inner(v, s)],
        Wing::Alice => {
            let d = 1 << (n / 2);
            let mut out = vec![ZERO; d];
            for (a, va) in v.iter().enumerate() {
                let vc = va.conj();
                for (b, o) in out.iter_mut().enumerate() {
                    *o += vc * s[a * d + b];
                }
            }
            out
        }
        Wing::Bob => {
            let d = 1 << (n / 2);
            (0..d).map(|a| inner(v, &s[a * d..(a + 1) * d])).collect()
        }
    }
}

/// Measures the projectors (acting on the qubits of `wing`) on `s`.
pub fn measure_projective(s: &QuantumState, projectors: &[Projector], wing: Wing) -> Result<OutcomeDistribution> {
    let wing_qubits = wing.qubits(s.n_qubits)?.count();
    for p in projectors {
        if p.n_qubits().is_some_and(|k| k != wing_qubits) {
            return Err(argument("projector size does not match the measured qubits"));
        }
    }
    check_orthonormal(projectors.iter().flat_map(|p| p.vectors.iter()))?;
    let probabilities: Vec<f64> = projectors
        .iter()
        .map(|p| {
            p.vectors
                .iter()
                .map(|v| norm(&contract_wing(&s.amplitudes, s.n_qubits, wing, &v.amplitudes)).powi(2))
                .sum()
        })
        .collect();
    let null = (1.0 - probabilities.iter().sum::<f64>()).max(0.0);
    Ok(OutcomeDistribution { probabilities, null })
}
