//! Pauli strings, weighted Pauli sums, and correlation tensors.
//!
//! Conventions used throughout:
//! - qubit 1 is the most significant bit of a basis index, so the axes string
//!   `"xyzz"` puts x on qubit 1;
//! - axis characters are `0` (identity), `x`, `y`, `z`.

use crate::linalg::CMat;
use crate::real::{c_i, c_one, c_re, c_zero, Real, C};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

/// Merge threshold: canonicalization drops terms with |weight| below this.
pub const WEIGHT_EPS: f64 = 1e-15;
/// Default cutoff for counting a tensor entry as relevant.
pub const RELEVANCE_THRESHOLD: f64 = 1e-9;

/// Single-qubit operator label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    I,
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::I, Axis::X, Axis::Y, Axis::Z];

    pub fn from_char(c: char) -> Result<Axis> {
        match c {
            '0' | 'i' | 'I' => Ok(Axis::I),
            'x' | 'X' => Ok(Axis::X),
            'y' | 'Y' => Ok(Axis::Y),
            'z' | 'Z' => Ok(Axis::Z),
            _ => Err(Error::InvalidAxis(c)),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Axis::I => '0',
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }

    /// Index in {0..3}; doubles as the digit for dense tensor addressing.
    pub fn code(self) -> usize {
        match self {
            Axis::I => 0,
            Axis::X => 1,
            Axis::Y => 2,
            Axis::Z => 3,
        }
    }

    pub fn matrix<T: Real>(self) -> CMat<T> {
        let (o, l) = (c_zero::<T>(), c_one::<T>());
        let i = c_i::<T>();
        let rows = match self {
            Axis::I => vec![vec![l, o], vec![o, l]],
            Axis::X => vec![vec![o, l], vec![l, o]],
            Axis::Y => vec![vec![o, -i], vec![i, o]],
            Axis::Z => vec![vec![l, o], vec![o, -l]],
        };
        CMat::from_rows(rows)
    }
}

pub fn parse_axes(s: &str) -> Result<Vec<Axis>> {
    s.chars().map(Axis::from_char).collect()
}

pub fn axes_to_string(axes: &[Axis]) -> String {
    axes.iter().map(|a| a.to_char()).collect()
}

/// One weighted tensor product of single-qubit Paulis.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliString<T: Real> {
    axes: Vec<Axis>,
    weight: T,
}

impl<T: Real> PauliString<T> {
    pub fn new(axes: Vec<Axis>, weight: T) -> Result<Self> {
        if !weight.is_finite() {
            return Err(Error::NonFiniteWeight);
        }
        if axes.is_empty() {
            return Err(Error::EmptyAxes);
        }
        Ok(PauliString { axes, weight })
    }

    pub fn parse(axes: &str, weight: T) -> Result<Self> {
        PauliString::new(parse_axes(axes)?, weight)
    }

    pub fn n(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn weight(&self) -> T {
        self.weight
    }

    pub fn is_identity(&self) -> bool {
        self.axes.iter().all(|&a| a == Axis::I)
    }

    pub fn axes_string(&self) -> String {
        axes_to_string(&self.axes)
    }

    /// Dense 2^n x 2^n matrix: weight times the Kronecker product of factors.
    pub fn matrix(&self) -> CMat<T> {
        let mut m = self.axes[0].matrix();
        for a in &self.axes[1..] {
            m = m.kron(&a.matrix());
        }
        m.scale(c_re(self.weight));
        m
    }
}

impl<T: Real> fmt::Display for PauliString<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.axes_string(), self.weight)
    }
}

/// Hermitian operator given as a real-weighted sum of Pauli strings.
///
/// Terms are kept canonical: sorted by axes, duplicates merged, weights with
/// |w| < 1e-15 dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSum<T: Real> {
    n: usize,
    terms: Vec<PauliString<T>>,
}

impl<T: Real> ObservableSum<T> {
    pub fn new(n: usize, terms: Vec<PauliString<T>>) -> Result<Self> {
        let mut merged: BTreeMap<Vec<Axis>, T> = BTreeMap::new();
        for t in terms {
            if t.n() != n {
                return Err(Error::QubitMismatch { expected: n, got: t.n() });
            }
            *merged.entry(t.axes.clone()).or_insert_with(T::zero) += t.weight;
        }
        let eps = T::of(WEIGHT_EPS);
        let terms = merged
            .into_iter()
            .filter(|(_, w)| w.abs() >= eps)
            .map(|(axes, weight)| PauliString { axes, weight })
            .collect();
        Ok(ObservableSum { n, terms })
    }

    /// Convenience: build from ("axes", weight) pairs.
    pub fn from_pairs<'a, I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, T)>,
    {
        let terms = pairs
            .into_iter()
            .map(|(a, w)| PauliString::parse(a, w))
            .collect::<Result<Vec<_>>>()?;
        ObservableSum::new(n, terms)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PauliString<T>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn weight_of(&self, axes: &str) -> Option<T> {
        let want = parse_axes(axes).ok()?;
        self.terms.iter().find(|t| t.axes == want).map(|t| t.weight)
    }

    pub fn scaled(&self, s: T) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| PauliString { axes: t.axes.clone(), weight: t.weight * s })
            .collect();
        // Canonical form is preserved under scaling except possible underflow.
        ObservableSum::new(self.n, terms).expect("scaling keeps terms valid")
    }

    pub fn neg(&self) -> Self {
        self.scaled(-T::one())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::QubitMismatch { expected: self.n, got: other.n });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        ObservableSum::new(self.n, terms)
    }

    pub fn sum_abs_weights(&self) -> T {
        self.terms.iter().map(|t| t.weight.abs()).fold(T::zero(), |a, b| a + b)
    }

    /// Dense matrix of the whole sum.
    pub fn matrix(&self) -> CMat<T> {
        let dim = 1usize << self.n;
        let mut m = CMat::zeros(dim);
        for t in &self.terms {
            m.add_scaled(&t.matrix(), c_one());
        }
        m
    }

    /// One line per term: `sign axes |weight|` with 15 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            let sign = if t.weight < T::zero() { '-' } else { '+' };
            let _ = writeln!(out, "{} {} {:.*e}", sign, t.axes_string(), 14, t.weight.abs().as_f64());
        }
        out
    }

    pub fn from_text(n: usize, text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let (sign, axes, mag) = match (it.next(), it.next(), it.next(), it.next()) {
                (Some(s), Some(a), Some(m), None) => (s, a, m),
                _ => return Err(Error::Parse(format!("bad operator line: {line:?}"))),
            };
            let s = match sign {
                "+" => T::one(),
                "-" => -T::one(),
                _ => return Err(Error::Parse(format!("bad sign: {sign:?}"))),
            };
            let mag: f64 = mag.parse().map_err(|_| Error::Parse(format!("bad weight: {mag:?}")))?;
            terms.push(PauliString::parse(axes, s * T::of(mag))?);
        }
        ObservableSum::new(n, terms)
    }
}

/// Full table of Pauli-string expectation values of a state.
///
/// Stored densely (all 4^n reals) up to n = 4 and as a nonzero-entry map
/// above that. `complete` records whether every entry was computed, which is
/// what `fidelity_operator` requires.
#[derive(Clone, Debug)]
pub struct CorrelationTensor<T: Real> {
    n: usize,
    storage: TensorStorage<T>,
    complete: bool,
}

#[derive(Clone, Debug)]
enum TensorStorage<T: Real> {
    Dense(Vec<T>),
    Sparse(BTreeMap<Vec<Axis>, T>),
}

fn dense_index(axes: &[Axis]) -> usize {
    axes.iter().fold(0, |acc, a| acc * 4 + a.code())
}

fn axes_of_index(n: usize, mut idx: usize) -> Vec<Axis> {
    let mut axes = vec![Axis::I; n];
    for q in (0..n).rev() {
        axes[q] = Axis::ALL[idx % 4];
        idx /= 4;
    }
    axes
}

impl<T: Real> CorrelationTensor<T> {
    /// Dense/sparse cutoff: 4 qubits = 256 dense entries.
    const DENSE_MAX_N: usize = 4;

    pub fn from_entries(n: usize, entries: impl IntoIterator<Item = (Vec<Axis>, T)>, complete: bool) -> Result<Self> {
        let mut t = if n <= Self::DENSE_MAX_N {
            CorrelationTensor { n, storage: TensorStorage::Dense(vec![T::zero(); 1 << (2 * n)]), complete }
        } else {
            CorrelationTensor { n, storage: TensorStorage::Sparse(BTreeMap::new()), complete }
        };
        for (axes, v) in entries {
            if axes.len() != n {
                return Err(Error::QubitMismatch { expected: n, got: axes.len() });
            }
            t.set(&axes, v);
        }
        Ok(t)
    }

    fn set(&mut self, axes: &[Axis], v: T) {
        match &mut self.storage {
            TensorStorage::Dense(d) => d[dense_index(axes)] = v,
            TensorStorage::Sparse(m) => {
                if v != T::zero() {
                    m.insert(axes.to_vec(), v);
                } else {
                    m.remove(axes);
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn get(&self, axes: &[Axis]) -> T {
        match &self.storage {
            TensorStorage::Dense(d) => d[dense_index(axes)],
            TensorStorage::Sparse(m) => m.get(axes).copied().unwrap_or_else(T::zero),
        }
    }

    pub fn get_str(&self, axes: &str) -> Result<T> {
        let axes = parse_axes(axes)?;
        if axes.len() != self.n {
            return Err(Error::QubitMismatch { expected: self.n, got: axes.len() });
        }
        Ok(self.get(&axes))
    }

    /// Iterate every axes tuple (complete tensors only enumerate 4^n items).
    pub fn iter_all(&self) -> impl Iterator<Item = (Vec<Axis>, T)> + '_ {
        (0..1usize << (2 * self.n)).map(|idx| {
            let axes = axes_of_index(self.n, idx);
            let v = self.get(&axes);
            (axes, v)
        })
    }

    /// Σ T² over all entries; 2^n · Tr[ρ²] for the tensor of ρ.
    pub fn parseval_sum(&self) -> T {
        match &self.storage {
            TensorStorage::Dense(d) => d.iter().map(|v| *v * *v).fold(T::zero(), |a, b| a + b),
            TensorStorage::Sparse(m) => m.values().map(|v| *v * *v).fold(T::zero(), |a, b| a + b),
        }
    }

    /// One line per axes tuple, `xyzz -3.33333333333333e-1` style, all 4^n rows.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (axes, v) in self.iter_all() {
            let _ = writeln!(out, "{} {:.*e}", axes_to_string(&axes), 14, v.as_f64());
        }
        out
    }

    pub fn from_text(n: usize, text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let (axes, val) = match (it.next(), it.next(), it.next()) {
                (Some(a), Some(v), None) => (a, v),
                _ => return Err(Error::Parse(format!("bad tensor line: {line:?}"))),
            };
            let v: f64 = val.parse().map_err(|_| Error::Parse(format!("bad value: {val:?}")))?;
            entries.push((parse_axes(axes)?, T::of(v)));
        }
        let complete = entries.len() == 1usize << (2 * n);
        CorrelationTensor::from_entries(n, entries, complete)
    }
}

/// Anything a Pauli sum can be evaluated on: pure states via the amplitude
/// kernel, mixed states via the density kernel.
pub trait ExpectationSource<T: Real> {
    fn qubits(&self) -> usize;
    fn expect_compiled(&self, op: &CompiledOp<T>) -> T;
}

/// All 4^n Pauli expectation values of a state.
pub fn correlation_tensor<T: Real, S: ExpectationSource<T> + ?Sized>(state: &S) -> CorrelationTensor<T> {
    let n = state.qubits();
    let entries = (0..1usize << (2 * n)).map(|idx| {
        let axes = axes_of_index(n, idx);
        let term = CompiledOp::compile_single(n, &axes);
        (axes, state.expect_compiled(&term))
    });
    CorrelationTensor::from_entries(n, entries, true).expect("axes generated at the right length")
}

/// Counts of relevant tensor entries: (all with |T| > threshold, the subset
/// with no identity factor).
pub fn relevant_correlations<T: Real>(t: &CorrelationTensor<T>, threshold: T) -> (usize, usize) {
    let mut total = 0;
    let mut full = 0;
    for (axes, v) in t.iter_all() {
        if v.abs() > threshold {
            total += 1;
            if axes.iter().all(|&a| a != Axis::I) {
                full += 1;
            }
        }
    }
    (total, full)
}

/// F = (1/2^n) Σ_axes T_axes · P_axes. Requires a complete tensor; produces
/// the projector onto the state when T came from a pure state.
pub fn fidelity_operator<T: Real>(t: &CorrelationTensor<T>) -> Result<ObservableSum<T>> {
    if !t.is_complete() {
        return Err(Error::IncompleteTensor);
    }
    let scale = T::one() / T::of((1u64 << t.n()) as f64);
    let terms = t
        .iter_all()
        .map(|(axes, v)| PauliString { axes, weight: v * scale })
        .collect();
    ObservableSum::new(t.n(), terms)
}

/// A Pauli-sum preprocessed for fast expectation values.
///
/// Each string P acts on a basis ket as P|b⟩ = i^{n_y} (−1)^{|b ∧ zy|} |b ⊕ flip⟩,
/// with flip the x|y mask and zy the z|y mask, giving O(2^n) expectation per
/// term with no matrices built.
#[derive(Clone, Debug)]
pub struct CompiledOp<T: Real> {
    n: usize,
    terms: Vec<CompiledTerm<T>>,
}

#[derive(Clone, Debug)]
struct CompiledTerm<T: Real> {
    flip: usize,
    zy: usize,
    phase: C<T>,
    weight: T,
}

fn i_pow<T: Real>(k: u32) -> C<T> {
    match k % 4 {
        0 => c_one(),
        1 => c_i(),
        2 => -c_one::<T>(),
        _ => -c_i::<T>(),
    }
}

fn compile_term<T: Real>(n: usize, axes: &[Axis], weight: T) -> CompiledTerm<T> {
    let mut flip = 0usize;
    let mut zy = 0usize;
    let mut ny = 0u32;
    for (q, &a) in axes.iter().enumerate() {
        let bit = 1usize << (n - 1 - q);
        match a {
            Axis::I => {}
            Axis::X => flip |= bit,
            Axis::Y => {
                flip |= bit;
                zy |= bit;
                ny += 1;
            }
            Axis::Z => zy |= bit,
        }
    }
    CompiledTerm { flip, zy, phase: i_pow(ny), weight }
}

impl<T: Real> CompiledOp<T> {
    pub fn compile(op: &ObservableSum<T>) -> Self {
        let n = op.n();
        let terms = op
            .terms()
            .iter()
            .map(|t| compile_term(n, t.axes(), t.weight()))
            .collect();
        CompiledOp { n, terms }
    }

    /// Compile one unit-weight string without building an ObservableSum.
    pub fn compile_single(n: usize, axes: &[Axis]) -> Self {
        CompiledOp { n, terms: vec![compile_term(n, axes, T::one())] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// ⟨ψ|O|ψ⟩ for raw amplitudes (len 2^n, assumed normalized by caller).
    pub fn expect_amplitudes(&self, amps: &[C<T>]) -> T {
        let dim = 1usize << self.n;
        debug_assert_eq!(amps.len(), dim);
        let mut total = T::zero();
        for t in &self.terms {
            let mut acc = c_zero::<T>();
            for (b, &ab) in amps.iter().enumerate() {
                let v = amps[b ^ t.flip].conj() * ab;
                if (b & t.zy).count_ones() & 1 == 0 {
                    acc += v;
                } else {
                    acc -= v;
                }
            }
            total += t.weight * (acc * t.phase).re;
        }
        total
    }

    /// Tr[O ρ] for a dense density matrix.
    pub fn expect_density(&self, rho: &CMat<T>) -> T {
        let dim = 1usize << self.n;
        debug_assert_eq!(rho.dim(), dim);
        let mut total = T::zero();
        for t in &self.terms {
            let mut acc = c_zero::<T>();
            for b in 0..dim {
                let v = rho[(b, b ^ t.flip)];
                if (b & t.zy).count_ones() & 1 == 0 {
                    acc += v;
                } else {
                    acc -= v;
                }
            }
            total += t.weight * (acc * t.phase).re;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::c_re;
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn axis_roundtrip() {
        for c in ['0', 'x', 'y', 'z'] {
            assert_eq!(Axis::from_char(c).unwrap().to_char(), c);
        }
        assert!(Axis::from_char('q').is_err());
    }

    #[test]
    fn string_matrix_zzzz_diagonal_parities() {
        let p = PauliString::<f64>::parse("zzzz", 1.0).unwrap();
        let m = p.matrix();
        for b in 0..16usize {
            let parity = if (b as u32).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            assert_eq!(m[(b, b)], Complex::new(parity, 0.0));
        }
    }

    #[test]
    fn string_matrix_identity() {
        let p = PauliString::<f64>::parse("0000", 1.0).unwrap();
        let m = p.matrix();
        assert_eq!(m, CMat::identity(16));
    }

    #[test]
    fn string_matrix_trace_square() {
        let p = PauliString::<f64>::parse("xy0z", 1.0).unwrap();
        let m = p.matrix();
        let tr = m.mul(&m).trace();
        assert!((tr.re - 16.0).abs() < 1e-12 && tr.im.abs() < 1e-12);
    }

    #[test]
    fn observable_sum_canonicalizes() {
        let op = ObservableSum::<f64>::from_pairs(
            4,
            [("xyyx", 0.5), ("xyyx", 0.25), ("zzzz", 1e-16), ("yxyx", -0.5)],
        )
        .unwrap();
        assert_eq!(op.len(), 2);
        assert_eq!(op.weight_of("xyyx"), Some(0.75));
        assert_eq!(op.weight_of("zzzz"), None);
        // sorted by axes string
        assert!(op.terms()[0].axes_string() < op.terms()[1].axes_string());
    }

    #[test]
    fn observable_text_roundtrip() {
        let op = ObservableSum::<f64>::from_pairs(4, [("xyyx", 1.0 / 6.0), ("yyxx", -1.0 / 6.0)]).unwrap();
        let text = op.to_text();
        let back = ObservableSum::<f64>::from_text(4, &text).unwrap();
        for (a, b) in op.terms().iter().zip(back.terms()) {
            assert_eq!(a.axes(), b.axes());
            assert!((a.weight() - b.weight()).abs() < 1e-14);
        }
    }

    #[test]
    fn compiled_matches_matrix_route() {
        // Random 4-qubit states vs. dense matrix evaluation for a batch of
        // random strings; the kernel must agree to near machine precision.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let mut amps: Vec<Complex<f64>> =
                (0..16).map(|_| Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in &mut amps {
                *a /= norm;
            }
            let axes: String = (0..4).map(|_| ['0', 'x', 'y', 'z'][rng.random_range(0..4)]).collect();
            let w = rng.random::<f64>() * 2.0 - 1.0;
            let op = ObservableSum::from_pairs(4, [(axes.as_str(), w)]).unwrap();
            let compiled = CompiledOp::compile(&op);
            let fast = compiled.expect_amplitudes(&amps);

            let m = op.matrix();
            let mv = m.mul_vec(&amps);
            let slow: Complex<f64> = amps.iter().zip(mv.iter()).map(|(a, b)| a.conj() * b).sum();
            assert!(slow.im.abs() < 1e-12);
            assert!((fast - slow.re).abs() < 1e-12, "{axes} {w}: {fast} vs {}", slow.re);

            let rho = CMat::outer(&amps);
            let fast_dm = compiled.expect_density(&rho);
            assert!((fast_dm - slow.re).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_index_roundtrip() {
        for idx in 0..256usize {
            let axes = axes_of_index(4, idx);
            assert_eq!(dense_index(&axes), idx);
        }
    }

    #[test]
    fn tensor_text_roundtrip() {
        let entries = (0..256usize).map(|i| (axes_of_index(4, i), (i as f64) / 255.0 - 0.5));
        let t = CorrelationTensor::from_entries(4, entries, true).unwrap();
        let text = t.to_text();
        assert_eq!(text.lines().count(), 256);
        let back = CorrelationTensor::<f64>::from_text(4, &text).unwrap();
        assert!(back.is_complete());
        for (axes, v) in t.iter_all() {
            assert!((back.get(&axes) - v).abs() < 1e-13);
        }
    }

    #[test]
    fn sparse_storage_above_four_qubits() {
        let axes = parse_axes("xxxxx").unwrap();
        let t = CorrelationTensor::from_entries(5, vec![(axes.clone(), 1.0f64)], true).unwrap();
        assert_eq!(t.get(&axes), 1.0);
        assert_eq!(t.get(&parse_axes("zzzzz").unwrap()), 0.0);
        let (total, full) = relevant_correlations(&t, 1e-9);
        assert_eq!((total, full), (1, 1));
    }

    #[test]
    fn fidelity_operator_requires_complete() {
        let t = CorrelationTensor::from_entries(4, vec![(parse_axes("zzzz").unwrap(), 1.0f64)], false).unwrap();
        assert!(matches!(fidelity_operator(&t), Err(Error::IncompleteTensor)));
    }

    #[test]
    fn scaled_and_neg() {
        let op = ObservableSum::<f64>::from_pairs(2, [("xx", 0.5), ("zz", -0.25)]).unwrap();
        let s = op.scaled(4.0);
        assert_eq!(s.weight_of("xx"), Some(2.0));
        assert_eq!(op.neg().weight_of("zz"), Some(0.25));
        let m = op.matrix().scaled(c_re(4.0));
        assert!(m.sub(&s.matrix()).frobenius_norm() < 1e-12);
    }

    // -- correlation tensors of the canonical states --------------------------

    use crate::linalg::hermitian_norm;
    use crate::qstate::{apply_local, canonical_state, mix_with_white_noise, LocalOperation, StateVector};

    #[test]
    fn tensor_values_on_canonical_states() {
        let psi4 = canonical_state::<f64>("psi4", 4).unwrap();
        let d42 = canonical_state::<f64>("d42", 4).unwrap();
        let t_psi4 = correlation_tensor(&psi4);
        let t_d42 = correlation_tensor(&d42);
        assert!((t_psi4.get_str("zzzz").unwrap() - 1.0).abs() < 1e-12);
        assert!((t_d42.get_str("xxxx").unwrap() - 1.0).abs() < 1e-12);
        assert!((t_psi4.get_str("0000").unwrap() - 1.0).abs() < 1e-12);
        assert!((t_d42.get_str("0000").unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn relevant_counts_forty_and_twentyone() {
        for name in ["psi4", "d42"] {
            let s = canonical_state::<f64>(name, 4).unwrap();
            let t = correlation_tensor(&s);
            assert_eq!(relevant_correlations(&t, 1e-9), (40, 21), "{name}");
        }
        let z = StateVector::<f64>::basis("0000").unwrap();
        assert_eq!(relevant_correlations(&correlation_tensor(&z), 1e-9), (16, 1));
    }

    #[test]
    fn tensor_entries_in_range_and_parseval() {
        for name in ["psi4", "d42", "ghz", "w", "cluster"] {
            let s = canonical_state::<f64>(name, 4).unwrap();
            let t = correlation_tensor(&s);
            for (_, v) in t.iter_all() {
                assert!((-1.0 - 1e-10..=1.0 + 1e-10).contains(&v));
            }
            assert!((t.parseval_sum() - 16.0).abs() < 1e-9, "{name}");
        }
    }

    #[test]
    fn parseval_tracks_purity() {
        let s = canonical_state::<f64>("psi4", 4).unwrap();
        let rho = mix_with_white_noise(&s, 0.7).unwrap();
        let t = correlation_tensor(&rho);
        assert!((t.parseval_sum() - 16.0 * rho.purity()).abs() < 1e-9);
    }

    #[test]
    fn parseval_invariant_under_local_unitary() {
        let s = canonical_state::<f64>("w", 4).unwrap();
        let h = 0.5f64.sqrt();
        let had = crate::linalg::Mat2::new(
            Complex::new(h, 0.0),
            Complex::new(h, 0.0),
            Complex::new(h, 0.0),
            Complex::new(-h, 0.0),
        );
        let op = LocalOperation::unitary(vec![had; 4]).unwrap();
        let mapped = apply_local(&op, &s).unwrap();
        let a = correlation_tensor(&s).parseval_sum();
        let b = correlation_tensor(&mapped).parseval_sum();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn fidelity_operator_is_projector() {
        let psi4 = canonical_state::<f64>("psi4", 4).unwrap();
        let t = correlation_tensor(&psi4);
        let f = fidelity_operator(&t).unwrap();
        assert_eq!(f.len(), 40);
        let m = f.matrix();
        // F = |psi><psi| within operator norm
        let diff = m.sub(&CMat::outer(psi4.amplitudes()));
        assert!(hermitian_norm(&diff) < 1e-10);
        assert!((m.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_reassembly_identity_on_density_matrices() {
        let s = canonical_state::<f64>("d42", 4).unwrap();
        let rho = mix_with_white_noise(&s, 0.8).unwrap();
        let t = correlation_tensor(&rho);
        let f = fidelity_operator(&t).unwrap();
        let diff = f.matrix().sub(rho.matrix());
        assert!(hermitian_norm(&diff) < 1e-10);
    }
}
