//! Pure and mixed n-qubit states, a canonical state library, and local
//! (per-qubit) maps.

use crate::linalg::{eigh, CMat, Mat2};
use crate::pauli::{CompiledOp, ExpectationSource, ObservableSum};
use crate::real::{c_one, c_re, c_zero, Real, C};
use crate::{Error, Result};
use num_complex::Complex;

const NORM_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-10;
const DET_MIN: f64 = 1e-8;
const ANNIHILATION_TOL: f64 = 1e-12;

/// Normalized pure state of 2..=6 qubits. Qubit 1 is the most significant
/// bit of a basis index, matching ket notation |q1 q2 q3 q4⟩.
#[derive(Clone, Debug)]
pub struct StateVector<T: Real> {
    n: usize,
    amps: Vec<C<T>>,
}

impl<T: Real> StateVector<T> {
    pub fn new(n: usize, amps: Vec<C<T>>) -> Result<Self> {
        if !(2..=6).contains(&n) {
            return Err(Error::UnsupportedQubitCount(n));
        }
        if amps.len() != 1 << n {
            return Err(Error::QubitMismatch { expected: n, got: amps.len().trailing_zeros() as usize });
        }
        let norm_sq: T = amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |a, b| a + b);
        let defect = (norm_sq - T::one()).abs();
        if defect > T::of(NORM_TOL) {
            return Err(Error::NotNormalized { defect: defect.as_f64() });
        }
        Ok(StateVector { n, amps })
    }

    /// Normalize and wrap; errors when the input is numerically zero.
    pub fn from_unnormalized(n: usize, amps: Vec<C<T>>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
        if norm < T::of(ANNIHILATION_TOL) {
            return Err(Error::AnnihilatedState { norm: norm.as_f64() });
        }
        let amps = amps.into_iter().map(|a| a / c_re(norm)).collect();
        StateVector::new(n, amps)
    }

    /// Computational basis state from a bitstring like "0011".
    pub fn basis(bits: &str) -> Result<Self> {
        let n = bits.len();
        if !(2..=6).contains(&n) {
            return Err(Error::UnsupportedQubitCount(n));
        }
        let mut idx = 0usize;
        for c in bits.chars() {
            idx = idx * 2
                + match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Error::BadOutcome(bits.to_string())),
                };
        }
        let mut amps = vec![c_zero(); 1 << n];
        amps[idx] = c_one();
        StateVector::new(n, amps)
    }

    /// Product state from per-qubit 2-component factors (normalized overall).
    pub fn product(factors: &[[C<T>; 2]]) -> Result<Self> {
        let n = factors.len();
        let mut amps = vec![c_one::<T>()];
        for f in factors {
            let mut next = Vec::with_capacity(amps.len() * 2);
            for a in &amps {
                next.push(*a * f[0]);
                next.push(*a * f[1]);
            }
            amps = next;
        }
        StateVector::from_unnormalized(n, amps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn amplitude(&self, bits: &str) -> Result<C<T>> {
        if bits.len() != self.n || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::BadOutcome(bits.to_string()));
        }
        let idx = usize::from_str_radix(bits, 2).map_err(|_| Error::BadOutcome(bits.to_string()))?;
        Ok(self.amps[idx])
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> C<T> {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * *b)
            .fold(c_zero(), |acc, v| acc + v)
    }

    /// |⟨self|other⟩| — 1 means equal up to global phase.
    pub fn overlap(&self, other: &Self) -> T {
        self.inner(other).norm()
    }

    pub fn density(&self) -> DensityMatrix<T> {
        DensityMatrix { n: self.n, mat: CMat::outer(&self.amps) }
    }
}

/// Mixed state: Hermitian, unit-trace, positive within tolerance.
#[derive(Clone, Debug)]
pub struct DensityMatrix<T: Real> {
    n: usize,
    mat: CMat<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(n: usize, mat: CMat<T>) -> Result<Self> {
        if !(2..=6).contains(&n) {
            return Err(Error::UnsupportedQubitCount(n));
        }
        if mat.dim() != 1 << n {
            return Err(Error::QubitMismatch { expected: n, got: mat.dim().trailing_zeros() as usize });
        }
        let herm = mat.hermiticity_defect();
        if herm > T::of(NORM_TOL) {
            return Err(Error::NotHermitian { defect: herm.as_f64() });
        }
        let tr = mat.trace();
        let tr_defect = (tr.re - T::one()).abs().max(tr.im.abs());
        if tr_defect > T::of(NORM_TOL) {
            return Err(Error::TraceNotOne { defect: tr_defect.as_f64() });
        }
        let eig = eigh(&mat);
        let min = *eig.values.last().expect("nonempty spectrum");
        if min < T::of(-1e-10) {
            return Err(Error::NotPositive { eig: min.as_f64() });
        }
        Ok(DensityMatrix { n, mat })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.mat
    }

    /// Tr[ρ²]; 1 for pure states.
    pub fn purity(&self) -> T {
        self.mat.mul(&self.mat).trace().re
    }
}

/// Per-qubit 2x2 maps, either all unitary or merely invertible.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperationKind {
    Unitary,
    Invertible,
}

#[derive(Clone, Debug)]
pub struct LocalOperation<T: Real> {
    kind: OperationKind,
    factors: Vec<Mat2<T>>,
}

impl<T: Real> LocalOperation<T> {
    pub fn unitary(factors: Vec<Mat2<T>>) -> Result<Self> {
        for f in &factors {
            let defect = f.unitarity_defect();
            if defect > T::of(UNITARY_TOL) {
                return Err(Error::NotUnitary { defect: defect.as_f64() });
            }
        }
        Ok(LocalOperation { kind: OperationKind::Unitary, factors })
    }

    pub fn invertible(factors: Vec<Mat2<T>>) -> Result<Self> {
        for f in &factors {
            let det = f.det().norm();
            if det < T::of(DET_MIN) {
                return Err(Error::SingularMap { det: det.as_f64() });
            }
        }
        Ok(LocalOperation { kind: OperationKind::Invertible, factors })
    }

    pub fn identity(n: usize) -> Self {
        LocalOperation { kind: OperationKind::Unitary, factors: vec![Mat2::identity(); n] }
    }

    pub fn kind(&self) -> OperationKind {
        self.kind
    }

    pub fn factors(&self) -> &[Mat2<T>] {
        &self.factors
    }
}

/// Apply per-qubit factors in place on raw amplitudes (no normalization).
/// Factor k acts on qubit k+1, i.e. on bit n-1-k counted from the LSB.
pub(crate) fn apply_factors_raw<T: Real>(factors: &[Mat2<T>], amps: &mut [C<T>]) {
    let n = factors.len();
    debug_assert_eq!(amps.len(), 1 << n);
    for (q, f) in factors.iter().enumerate() {
        let bit = 1usize << (n - 1 - q);
        for b in 0..amps.len() {
            if b & bit == 0 {
                let a0 = amps[b];
                let a1 = amps[b | bit];
                amps[b] = f.m[0][0] * a0 + f.m[0][1] * a1;
                amps[b | bit] = f.m[1][0] * a0 + f.m[1][1] * a1;
            }
        }
    }
}

/// (A1 ⊗ … ⊗ An)|psi⟩, renormalized. Near-singular invertible maps that
/// annihilate the state are reported as errors.
pub fn apply_local<T: Real>(op: &LocalOperation<T>, psi: &StateVector<T>) -> Result<StateVector<T>> {
    if op.factors.len() != psi.n {
        return Err(Error::QubitMismatch { expected: psi.n, got: op.factors.len() });
    }
    let mut amps = psi.amps.clone();
    apply_factors_raw(&op.factors, &mut amps);
    let norm = amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
    if norm < T::of(ANNIHILATION_TOL) {
        return Err(Error::AnnihilatedState { norm: norm.as_f64() });
    }
    for a in &mut amps {
        *a /= c_re(norm);
    }
    StateVector::new(psi.n, amps)
}

/// ρ = p·|psi⟩⟨psi| + (1−p)·I/2^n.
pub fn mix_with_white_noise<T: Real>(psi: &StateVector<T>, p: T) -> Result<DensityMatrix<T>> {
    if !(T::zero()..=T::one()).contains(&p) || !p.is_finite() {
        return Err(Error::VisibilityOutOfRange(p.as_f64()));
    }
    let dim = psi.dim();
    let mut mat = CMat::outer(&psi.amps);
    mat.scale(c_re(p));
    let offdiag = (T::one() - p) / T::of(dim as f64);
    for i in 0..dim {
        mat[(i, i)] += c_re(offdiag);
    }
    DensityMatrix::new(psi.n, mat)
}

impl<T: Real> ExpectationSource<T> for StateVector<T> {
    fn qubits(&self) -> usize {
        self.n
    }
    fn expect_compiled(&self, op: &CompiledOp<T>) -> T {
        op.expect_amplitudes(&self.amps)
    }
}

impl<T: Real> ExpectationSource<T> for DensityMatrix<T> {
    fn qubits(&self) -> usize {
        self.n
    }
    fn expect_compiled(&self, op: &CompiledOp<T>) -> T {
        op.expect_density(&self.mat)
    }
}

/// ⟨O⟩ on a pure or mixed state.
pub fn expectation<T: Real, S: ExpectationSource<T> + ?Sized>(
    op: &ObservableSum<T>,
    state: &S,
) -> Result<T> {
    if op.n() != state.qubits() {
        return Err(Error::QubitMismatch { expected: state.qubits(), got: op.n() });
    }
    Ok(state.expect_compiled(&CompiledOp::compile(op)))
}

fn sqrt_half<T: Real>() -> T {
    T::of(0.5).sqrt()
}

/// The canonical four-qubit states used throughout the tables.
///
/// Names: psi4, d42, ghz, w, cluster, ghz_y_plus, ghz_y_minus, bs_plus,
/// bs_minus. All are defined at n = 4.
pub fn canonical_state<T: Real>(name: &str, n: usize) -> Result<StateVector<T>> {
    if n != 4 {
        return Err(Error::QubitMismatch { expected: 4, got: n });
    }
    let rh = c_re(sqrt_half::<T>());
    let r = [c_re(sqrt_half::<T>()), Complex::new(T::zero(), sqrt_half::<T>())];
    let l = [c_re(sqrt_half::<T>()), Complex::new(T::zero(), -sqrt_half::<T>())];
    let plus = [rh, rh];

    let kets: Vec<(&str, C<T>)> = match name {
        "psi4" => {
            let a = c_re(T::one() / T::of(3.0).sqrt());
            let b = -a * c_re(T::of(0.5));
            vec![("0011", a), ("1100", a), ("0101", b), ("0110", b), ("1001", b), ("1010", b)]
        }
        "d42" => {
            let a = c_re(T::one() / T::of(6.0).sqrt());
            vec![("0011", a), ("0101", a), ("0110", a), ("1001", a), ("1010", a), ("1100", a)]
        }
        "ghz" => vec![("0000", rh), ("1111", rh)],
        "w" => {
            let a = c_re(T::of(0.5));
            vec![("0001", a), ("0010", a), ("0100", a), ("1000", a)]
        }
        "cluster" => {
            let a = c_re(T::of(0.5));
            vec![("0000", a), ("0011", a), ("1100", a), ("1111", -a)]
        }
        "ghz_y_plus" | "ghz_y_minus" => {
            let sign = if name == "ghz_y_plus" { c_one() } else { -c_one::<T>() };
            let mut amps = product_amps(&[r, r, r, r]);
            let lll = product_amps(&[l, l, l, l]);
            for (a, b) in amps.iter_mut().zip(lll) {
                *a = (*a + sign * b) * rh;
            }
            return StateVector::new(4, amps);
        }
        "bs_plus" | "bs_minus" => {
            let sign = if name == "bs_plus" { c_re(T::one()) } else { -c_re(T::one()) };
            let i_s = Complex::new(T::zero(), T::one()) * sign;
            let mut tail = product_amps(&[r, r, r]);
            let lll = product_amps(&[l, l, l]);
            for (a, b) in tail.iter_mut().zip(lll) {
                *a = (*a + i_s * b) * rh;
            }
            let mut amps = Vec::with_capacity(16);
            for p in plus {
                for t in &tail {
                    amps.push(p * *t);
                }
            }
            return StateVector::new(4, amps);
        }
        _ => return Err(Error::UnknownState(name.to_string())),
    };

    let mut amps = vec![c_zero(); 16];
    for (bits, a) in kets {
        amps[usize::from_str_radix(bits, 2).expect("valid bits")] = a;
    }
    StateVector::new(4, amps)
}

pub const CANONICAL_NAMES: [&str; 9] = [
    "psi4", "d42", "ghz", "w", "cluster", "ghz_y_plus", "ghz_y_minus", "bs_plus", "bs_minus",
];

fn product_amps<T: Real>(factors: &[[C<T>; 2]]) -> Vec<C<T>> {
    let mut amps = vec![c_one::<T>()];
    for f in factors {
        let mut next = Vec::with_capacity(amps.len() * 2);
        for a in &amps {
            next.push(*a * f[0]);
            next.push(*a * f[1]);
        }
        amps = next;
    }
    amps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::correlation_tensor;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f64_state(name: &str) -> StateVector<f64> {
        canonical_state(name, 4).unwrap()
    }

    #[test]
    fn psi4_amplitudes() {
        let s = f64_state("psi4");
        assert!((s.amplitude("0011").unwrap().re - 1.0 / 3.0f64.sqrt()).abs() < 1e-15);
        assert!((s.amplitude("0101").unwrap().re + 0.5 / 3.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.amplitude("0000").unwrap(), Complex::new(0.0, 0.0));
    }

    #[test]
    fn d42_amplitudes() {
        let s = f64_state("d42");
        assert!((s.amplitude("0110").unwrap().re - 1.0 / 6.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.amplitude("1111").unwrap(), Complex::new(0.0, 0.0));
        assert_eq!(s.amplitude("1000").unwrap(), Complex::new(0.0, 0.0));
    }

    #[test]
    fn unknown_name_and_bad_n() {
        assert!(matches!(canonical_state::<f64>("psi5", 4), Err(Error::UnknownState(_))));
        assert!(canonical_state::<f64>("psi4", 3).is_err());
    }

    #[test]
    fn all_canonical_states_normalized() {
        for name in CANONICAL_NAMES {
            let s = f64_state(name);
            let norm: f64 = s.amplitudes().iter().map(|a| a.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-14, "{name}: {norm}");
        }
    }

    #[test]
    fn ghz_y_is_lu_image_of_ghz() {
        // (|RRRR>+|LLLL>)/sqrt2 is GHZ conjugated by the z->y basis change on
        // every qubit, so its overlap spectrum with computational GHZ under
        // that unitary must be exactly 1.
        let ghz = f64_state("ghz");
        let h = 0.5f64.sqrt();
        let u = Mat2::new(
            Complex::new(h, 0.0),
            Complex::new(h, 0.0),
            Complex::new(0.0, h),
            Complex::new(0.0, -h),
        );
        let op = LocalOperation::unitary(vec![u; 4]).unwrap();
        let mapped = apply_local(&op, &ghz).unwrap();
        assert!(f64_state("ghz_y_plus").overlap(&mapped) > 1.0 - 1e-12);
    }

    #[test]
    fn bs_state_is_biseparable_product() {
        let s = f64_state("bs_plus");
        // qubit 1 factors out in the x basis: applying |+><+| on qubit 1
        // leaves the state invariant.
        let proj_plus = Mat2::new(
            Complex::new(0.5, 0.0),
            Complex::new(0.5, 0.0),
            Complex::new(0.5, 0.0),
            Complex::new(0.5, 0.0),
        );
        let mut amps = s.amplitudes().to_vec();
        apply_factors_raw(&[proj_plus, Mat2::identity(), Mat2::identity(), Mat2::identity()], &mut amps);
        let projected = StateVector::from_unnormalized(4, amps).unwrap();
        assert!(projected.overlap(&s) > 1.0 - 1e-12);
    }

    #[test]
    fn rejects_unnormalized() {
        let mut amps = vec![Complex::new(0.0, 0.0); 16];
        amps[0] = Complex::new(1.1, 0.0);
        assert!(matches!(StateVector::new(4, amps), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn apply_identity_fixes_state() {
        let s = f64_state("psi4");
        let out = apply_local(&LocalOperation::identity(4), &s).unwrap();
        assert!(out.overlap(&s) > 1.0 - 1e-14);
    }

    #[test]
    fn ghz_invariant_under_x_on_all() {
        let x = Mat2::new(
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.0),
        );
        let op = LocalOperation::unitary(vec![x; 4]).unwrap();
        let ghz = f64_state("ghz");
        assert!(apply_local(&op, &ghz).unwrap().overlap(&ghz) > 1.0 - 1e-14);
    }

    #[test]
    fn hadamard_on_basis_gives_uniform() {
        let h = 0.5f64.sqrt();
        let had = Mat2::new(
            Complex::new(h, 0.0),
            Complex::new(h, 0.0),
            Complex::new(h, 0.0),
            Complex::new(-h, 0.0),
        );
        let op = LocalOperation::unitary(vec![had; 4]).unwrap();
        let out = apply_local(&op, &StateVector::basis("0000").unwrap()).unwrap();
        for a in out.amplitudes() {
            assert!((a.re - 0.25).abs() < 1e-14 && a.im.abs() < 1e-14);
        }
    }

    #[test]
    fn annihilation_is_reported() {
        // Rank-one invertible-within-tolerance map that kills |1>: det is
        // checked at construction, so build the operation with a legal det
        // and annihilate with an orthogonal state instead.
        let proj0 = Mat2::new(
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(1e-7, 0.0),
        );
        let op = LocalOperation::invertible(vec![proj0, Mat2::identity(), Mat2::identity(), Mat2::identity()])
            .unwrap();
        // |1000> gets weight 1e-7 -> still fine; amplitude survives.
        let out = apply_local(&op, &StateVector::basis("1000").unwrap()).unwrap();
        assert!(out.overlap(&StateVector::basis("1000").unwrap()) > 1.0 - 1e-12);
        // a genuinely singular factor is rejected up front
        let singular = Mat2::new(
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
        );
        assert!(matches!(
            LocalOperation::invertible(vec![singular, Mat2::identity(), Mat2::identity(), Mat2::identity()]),
            Err(Error::SingularMap { .. })
        ));
    }

    #[test]
    fn white_noise_mix_eigenvalues() {
        let s = f64_state("psi4");
        let rho = mix_with_white_noise(&s, 0.0).unwrap();
        let eig = eigh(rho.matrix());
        for v in &eig.values {
            assert!((v - 1.0 / 16.0).abs() < 1e-13);
        }
        let pure = mix_with_white_noise(&s, 1.0).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-12);
        assert!(mix_with_white_noise(&s, 1.5).is_err());
    }

    #[test]
    fn unitary_preserves_inner_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut random_u = || {
            // QR-free random unitary: two Euler-like factors
            let (a, b, c) = (
                rng.random::<f64>() * std::f64::consts::TAU,
                rng.random::<f64>() * std::f64::consts::PI,
                rng.random::<f64>() * std::f64::consts::TAU,
            );
            let (cb, sb) = ((b / 2.0).cos(), (b / 2.0).sin());
            Mat2::new(
                Complex::from_polar(cb, -0.5 * (a + c)),
                Complex::from_polar(-sb, -0.5 * (a - c)),
                Complex::from_polar(sb, 0.5 * (a - c)),
                Complex::from_polar(cb, 0.5 * (a + c)),
            )
        };
        let op = LocalOperation::unitary((0..4).map(|_| random_u()).collect()).unwrap();
        let s1 = f64_state("psi4");
        let s2 = f64_state("ghz");
        let before = s1.inner(&s2);
        let after = apply_local(&op, &s1).unwrap().inner(&apply_local(&op, &s2).unwrap());
        assert!((before - after).norm() < 1e-12);
    }

    #[test]
    fn expectation_linearity_in_density() {
        let op = ObservableSum::<f64>::from_pairs(4, [("zzzz", 1.0), ("xx00", 0.5)]).unwrap();
        let s1 = f64_state("psi4");
        let s2 = f64_state("w");
        let p = 0.3;
        let mut mat = s1.density().matrix().clone();
        mat.scale(Complex::new(p, 0.0));
        mat.add_scaled(s2.density().matrix(), Complex::new(1.0 - p, 0.0));
        let mixed = DensityMatrix::new(4, mat).unwrap();
        let lhs = expectation(&op, &mixed).unwrap();
        let rhs = p * expectation(&op, &s1).unwrap() + (1.0 - p) * expectation(&op, &s2).unwrap();
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn d42_tensor_fully_permutation_symmetric() {
        let t = correlation_tensor(&f64_state("d42"));
        // check every transposition generator on every axes tuple
        for (axes, v) in t.iter_all() {
            for swap in [(0, 1), (1, 2), (2, 3)] {
                let mut p = axes.clone();
                p.swap(swap.0, swap.1);
                assert!((t.get(&p) - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn psi4_tensor_pairwise_symmetric() {
        let t = correlation_tensor(&f64_state("psi4"));
        for (axes, v) in t.iter_all() {
            let mut s12 = axes.clone();
            s12.swap(0, 1);
            assert!((t.get(&s12) - v).abs() < 1e-12);
            let mut s34 = axes.clone();
            s34.swap(2, 3);
            assert!((t.get(&s34) - v).abs() < 1e-12);
            let pairswap = vec![axes[2], axes[3], axes[0], axes[1]];
            assert!((t.get(&pairswap) - v).abs() < 1e-12);
        }
    }
}
