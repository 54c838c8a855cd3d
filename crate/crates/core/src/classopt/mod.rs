//! Maximization of ⟨O⟩ over entanglement classes: LU and SLOCC orbits of a
//! representative state, biseparable states (over all 7 bipartitions of 4
//! qubits), and fully separable product states.

pub mod nelder_mead;
pub mod tables;

use crate::linalg::Mat2;
use crate::pauli::{CompiledOp, ObservableSum};
use crate::qstate::{apply_factors_raw, StateVector};
use crate::real::{c_one, c_re, c_zero, Real, C};
use crate::{Error, Result};
use nelder_mead::{maximize, Options};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// Transformation group for orbit families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transform {
    /// Local unitaries: 3 Euler angles per qubit.
    LU,
    /// Invertible local maps followed by renormalization: 8 reals per qubit.
    SLOCC,
}

/// Which set of states to maximize over.
#[derive(Clone, Debug)]
pub enum ClassFamily<T: Real> {
    /// The orbit of a fixed representative under the chosen transform.
    Orbit(StateVector<T>),
    /// All pure states that factor across at least one bipartition of 4
    /// qubits; free complex amplitudes per factor (SLOCC-closed).
    Biseparable,
    /// Product states, 2 Bloch angles per qubit.
    Separable,
}

#[derive(Clone, Debug)]
pub struct ClassSpec<T: Real> {
    pub family: ClassFamily<T>,
    pub transform: Transform,
}

impl<T: Real> ClassSpec<T> {
    pub fn orbit_lu(rep: StateVector<T>) -> Self {
        ClassSpec { family: ClassFamily::Orbit(rep), transform: Transform::LU }
    }
    pub fn orbit_slocc(rep: StateVector<T>) -> Self {
        ClassSpec { family: ClassFamily::Orbit(rep), transform: Transform::SLOCC }
    }
    pub fn biseparable() -> Self {
        ClassSpec { family: ClassFamily::Biseparable, transform: Transform::SLOCC }
    }
    pub fn separable() -> Self {
        ClassSpec { family: ClassFamily::Separable, transform: Transform::SLOCC }
    }
}

/// Default restart counts: low-dimensional searches need fewer starts.
pub fn default_restarts(spec_kind_slocc_like: bool) -> usize {
    if spec_kind_slocc_like {
        500
    } else {
        200
    }
}

/// The 7 bipartitions of 4 qubits, halves listed in qubit order (0-based),
/// labeled in 1-based notation.
pub fn bipartitions() -> Vec<(Vec<usize>, Vec<usize>, &'static str)> {
    vec![
        (vec![0], vec![1, 2, 3], "1|234"),
        (vec![1], vec![0, 2, 3], "2|134"),
        (vec![2], vec![0, 1, 3], "3|124"),
        (vec![3], vec![0, 1, 2], "4|123"),
        (vec![0, 1], vec![2, 3], "12|34"),
        (vec![0, 2], vec![1, 3], "13|24"),
        (vec![0, 3], vec![1, 2], "14|23"),
    ]
}

/// Euler ZYZ unitary: Rz(a)·Ry(b)·Rz(c). Surjective onto SU(2).
pub fn su2_from_angles<T: Real>(angles: [T; 3]) -> Mat2<T> {
    let [a, b, c] = angles;
    let half = T::of(0.5);
    let (cb, sb) = ((b * half).cos(), (b * half).sin());
    let sum = (a + c) * half;
    let dif = (a - c) * half;
    Mat2::new(
        Complex::from_polar(cb, -sum),
        -Complex::from_polar(sb, -dif),
        Complex::from_polar(sb, dif),
        Complex::from_polar(cb, sum),
    )
}

/// Arbitrary complex 2x2 from 8 reals (row-major re/im pairs).
pub fn gl2_from_params<T: Real>(p: [T; 8]) -> Mat2<T> {
    Mat2::new(
        Complex::new(p[0], p[1]),
        Complex::new(p[2], p[3]),
        Complex::new(p[4], p[5]),
        Complex::new(p[6], p[7]),
    )
}

#[derive(Clone, Debug)]
pub struct OptimizationResult<T: Real> {
    pub best_value: T,
    pub best_parameters: Vec<T>,
    /// Bipartition label for biseparable searches.
    pub best_split: Option<&'static str>,
    pub restarts_run: usize,
    pub converged_restarts: usize,
    pub seed: u64,
    pub tolerance: T,
}

/// Objective value below which points are treated as invalid (annihilated
/// states); far under any reachable expectation of a normalized operator.
fn penalty<T: Real>() -> T {
    T::of(-1e3)
}

enum Landscape<'a, T: Real> {
    Lu { rep: &'a [C<T>], n: usize },
    Slocc { rep: &'a [C<T>], n: usize },
    Separable { n: usize },
    Bisep { part_a: &'a [usize], part_b: &'a [usize] },
}

impl<'a, T: Real> Landscape<'a, T> {
    fn dim(&self) -> usize {
        match self {
            Landscape::Lu { n, .. } => 3 * n,
            Landscape::Slocc { n, .. } => 8 * n,
            Landscape::Separable { n } => 2 * n,
            Landscape::Bisep { part_a, part_b } => 2 * (1 << part_a.len()) + 2 * (1 << part_b.len()),
        }
    }

    fn sample_start(&self, rng: &mut ChaCha8Rng) -> Vec<T> {
        let d = self.dim();
        match self {
            Landscape::Lu { .. } | Landscape::Separable { .. } => {
                (0..d).map(|_| T::of(rng.random::<f64>()) * T::TAU()).collect()
            }
            Landscape::Slocc { .. } | Landscape::Bisep { .. } => {
                (0..d).map(|_| T::of(StandardNormal.sample(rng))).collect()
            }
        }
    }

    fn initial_steps(&self) -> (T, T) {
        match self {
            Landscape::Lu { .. } | Landscape::Separable { .. } => (T::of(0.8), T::of(0.05)),
            Landscape::Slocc { .. } | Landscape::Bisep { .. } => (T::of(0.5), T::of(0.05)),
        }
    }

    /// Build the state for `params` into `buf` and return ⟨op⟩, or the
    /// penalty when the parameters annihilate the state.
    fn eval(&self, compiled: &CompiledOp<T>, params: &[T], buf: &mut Vec<C<T>>) -> T {
        match self {
            Landscape::Lu { rep, n } => {
                buf.clear();
                buf.extend_from_slice(rep);
                let factors: Vec<Mat2<T>> = (0..*n)
                    .map(|k| su2_from_angles([params[3 * k], params[3 * k + 1], params[3 * k + 2]]))
                    .collect();
                apply_factors_raw(&factors, buf);
                compiled.expect_amplitudes(buf)
            }
            Landscape::Slocc { rep, n } => {
                buf.clear();
                buf.extend_from_slice(rep);
                let factors: Vec<Mat2<T>> = (0..*n)
                    .map(|k| {
                        let p = &params[8 * k..8 * k + 8];
                        gl2_from_params([p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7]])
                    })
                    .collect();
                apply_factors_raw(&factors, buf);
                match normalize(buf) {
                    Some(()) => compiled.expect_amplitudes(buf),
                    None => penalty(),
                }
            }
            Landscape::Separable { n } => {
                buf.clear();
                buf.push(c_one());
                let half = T::of(0.5);
                for k in 0..*n {
                    let (theta, phi) = (params[2 * k], params[2 * k + 1]);
                    let f0 = c_re((theta * half).cos());
                    let f1 = Complex::from_polar((theta * half).sin(), phi);
                    let mut next = Vec::with_capacity(buf.len() * 2);
                    for a in buf.iter() {
                        next.push(*a * f0);
                        next.push(*a * f1);
                    }
                    *buf = next;
                }
                compiled.expect_amplitudes(buf)
            }
            Landscape::Bisep { part_a, part_b } => {
                let da = 1 << part_a.len();
                let db = 1 << part_b.len();
                let fa: Vec<C<T>> =
                    (0..da).map(|i| Complex::new(params[2 * i], params[2 * i + 1])).collect();
                let off = 2 * da;
                let fb: Vec<C<T>> =
                    (0..db).map(|i| Complex::new(params[off + 2 * i], params[off + 2 * i + 1])).collect();
                buf.clear();
                buf.resize(16, c_zero());
                for (b, slot) in buf.iter_mut().enumerate() {
                    let mut ia = 0usize;
                    for &q in part_a.iter() {
                        ia = (ia << 1) | ((b >> (3 - q)) & 1);
                    }
                    let mut ib = 0usize;
                    for &q in part_b.iter() {
                        ib = (ib << 1) | ((b >> (3 - q)) & 1);
                    }
                    *slot = fa[ia] * fb[ib];
                }
                match normalize(buf) {
                    Some(()) => compiled.expect_amplitudes(buf),
                    None => penalty(),
                }
            }
        }
    }
}

fn normalize<T: Real>(amps: &mut [C<T>]) -> Option<()> {
    let norm = amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
    if norm < T::of(1e-9) {
        return None;
    }
    for a in amps.iter_mut() {
        *a /= c_re(norm);
    }
    Some(())
}

struct RestartOutcome<T: Real> {
    value: T,
    params: Vec<T>,
    restart: usize,
    converged: bool,
}

/// One multi-restart search on a fixed landscape. Restart r draws its start
/// from stream `stream_base + r` of the master seed, so runs are reproducible
/// and independent of thread scheduling.
fn search<T: Real>(
    compiled: &CompiledOp<T>,
    landscape: &Landscape<T>,
    restarts: usize,
    seed: u64,
    stream_base: u64,
    tol: T,
) -> (Option<RestartOutcome<T>>, usize) {
    let d = landscape.dim();
    let (step1, step2) = landscape.initial_steps();
    let coarse = Options { max_iter: 250 * d, tol: tol * T::of(100.0), initial_step: step1 };
    let fine = Options { max_iter: 150 * d, tol, initial_step: step2 };

    let outcomes: Vec<RestartOutcome<T>> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream_base + r as u64);
            let x0 = landscape.sample_start(&mut rng);
            let mut buf: Vec<C<T>> = Vec::with_capacity(16);
            let mut f = |x: &[T]| landscape.eval(compiled, x, &mut buf);
            let first = maximize(&mut f, &x0, &coarse);
            let second = maximize(&mut f, &first.point, &fine);
            RestartOutcome { value: second.value, params: second.point, restart: r, converged: second.converged }
        })
        .collect();

    let converged = outcomes.iter().filter(|o| o.converged).count();
    let best = outcomes.into_iter().reduce(|a, b| {
        // deterministic max: ties broken toward the earlier restart
        if b.value > a.value || (b.value == a.value && b.restart < a.restart) {
            b
        } else {
            a
        }
    });
    (best, converged)
}

/// Multi-restart maximization of ⟨op⟩ over a class of states.
pub fn max_over_class<T: Real>(
    op: &ObservableSum<T>,
    spec: &ClassSpec<T>,
    restarts: usize,
    seed: u64,
    tol: T,
) -> Result<OptimizationResult<T>> {
    if restarts == 0 {
        return Err(Error::NoConvergedRestart);
    }
    let compiled = CompiledOp::compile(op);
    let n = op.n();

    match &spec.family {
        ClassFamily::Orbit(rep) => {
            if rep.n() != n {
                return Err(Error::QubitMismatch { expected: n, got: rep.n() });
            }
            let landscape = match spec.transform {
                Transform::LU => Landscape::Lu { rep: rep.amplitudes(), n },
                Transform::SLOCC => Landscape::Slocc { rep: rep.amplitudes(), n },
            };
            let (best, converged) = search(&compiled, &landscape, restarts, seed, 0, tol);
            finish(best, converged, None, restarts, seed, tol)
        }
        ClassFamily::Separable => {
            let landscape = Landscape::Separable { n };
            let (best, converged) = search(&compiled, &landscape, restarts, seed, 0, tol);
            finish(best, converged, None, restarts, seed, tol)
        }
        ClassFamily::Biseparable => {
            if n != 4 {
                return Err(Error::UnsupportedQubitCount(n));
            }
            let splits = bipartitions();
            let mut best: Option<(RestartOutcome<T>, &'static str)> = None;
            let mut converged_total = 0;
            for (idx, (a, b, label)) in splits.iter().enumerate() {
                let landscape = Landscape::Bisep { part_a: a, part_b: b };
                let stream_base = (idx as u64) << 32;
                let (found, converged) = search(&compiled, &landscape, restarts, seed, stream_base, tol);
                converged_total += converged;
                if let Some(o) = found {
                    let better = match &best {
                        None => true,
                        Some((cur, _)) => o.value > cur.value,
                    };
                    if better {
                        best = Some((o, label));
                    }
                }
            }
            let (outcome, label) = match best {
                Some(pair) => pair,
                None => return Err(Error::NoConvergedRestart),
            };
            finish(Some(outcome), converged_total, Some(label), restarts * splits.len(), seed, tol)
        }
    }
}

fn finish<T: Real>(
    best: Option<RestartOutcome<T>>,
    converged: usize,
    split: Option<&'static str>,
    restarts_run: usize,
    seed: u64,
    tol: T,
) -> Result<OptimizationResult<T>> {
    let best = best.ok_or(Error::NoConvergedRestart)?;
    if converged == 0 {
        return Err(Error::NoConvergedRestart);
    }
    Ok(OptimizationResult {
        best_value: best.value,
        best_parameters: best.params,
        best_split: split,
        restarts_run,
        converged_restarts: converged,
        seed,
        tolerance: tol,
    })
}

/// Re-evaluate a parameter vector on the landscape it came from; `split` is
/// required for biseparable results (its label as reported).
pub fn evaluate_point<T: Real>(
    op: &ObservableSum<T>,
    spec: &ClassSpec<T>,
    params: &[T],
    split: Option<&str>,
) -> Result<T> {
    let compiled = CompiledOp::compile(op);
    let n = op.n();
    let mut buf = Vec::with_capacity(1 << n);
    let landscape_value = match &spec.family {
        ClassFamily::Orbit(rep) => {
            let landscape = match spec.transform {
                Transform::LU => Landscape::Lu { rep: rep.amplitudes(), n },
                Transform::SLOCC => Landscape::Slocc { rep: rep.amplitudes(), n },
            };
            landscape.eval(&compiled, params, &mut buf)
        }
        ClassFamily::Separable => {
            Landscape::Separable { n }.eval(&compiled, params, &mut buf)
        }
        ClassFamily::Biseparable => {
            let splits = bipartitions();
            let label = split.ok_or(Error::Parse("biseparable evaluation needs a split label".into()))?;
            let (a, b, _) = splits
                .into_iter()
                .find(|(_, _, l)| *l == label)
                .ok_or_else(|| Error::Parse(format!("unknown bipartition {label:?}")))?;
            Landscape::Bisep { part_a: &a, part_b: &b }.eval(&compiled, params, &mut buf)
        }
    };
    Ok(landscape_value)
}
