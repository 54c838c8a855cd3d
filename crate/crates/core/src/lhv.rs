//! Exact local-hidden-variable bounds by exhaustive enumeration.
//!
//! A deterministic local model assigns a fixed value ±1 to every Pauli axis
//! at every qubit. The LHV bound of a Pauli sum is the maximum of
//! |Σ_terms w · Π_q value(q, axis)| over all such assignments; identity-only
//! terms contribute a constant offset inside the absolute value.

use crate::pauli::{Axis, ObservableSum};
use crate::real::Real;
use crate::{Error, Result};
use num_rational::Ratio;
use std::collections::BTreeMap;

/// Default ceiling on the number of enumerated assignments.
pub const ENUMERATION_CAP: u128 = 1 << 24;

/// Outcome of an LHV search.
#[derive(Clone, Debug)]
pub struct LhvResult<T: Real> {
    /// max |⟨op⟩| over deterministic local assignments.
    pub bound: T,
    /// The bound as an exact rational, when every weight is recognizably
    /// rational with denominator ≤ 4096.
    pub exact: Option<Ratio<i64>>,
    /// Per-qubit assignment axis → ±1 attaining the bound.
    pub witness: Vec<BTreeMap<Axis, i8>>,
}

/// Best rational p/q with q ≤ max_den within 1e-9 relative error, via
/// continued fractions.
fn rationalize(x: f64, max_den: i64) -> Option<Ratio<i64>> {
    let tol = 1e-9 * x.abs().max(1.0);
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, x.floor() as i64, 1i64);
    let mut frac = x - x.floor();
    for _ in 0..40 {
        if ((p1 as f64) / (q1 as f64) - x).abs() <= tol {
            return Some(Ratio::new(p1, q1));
        }
        if frac.abs() < 1e-15 {
            break;
        }
        let r = 1.0 / frac;
        let a = r.floor();
        frac = r - a;
        let p2 = a as i64 * p1 + p0;
        let q2 = a as i64 * q1 + q0;
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    (((p1 as f64) / (q1 as f64) - x).abs() <= tol).then(|| Ratio::new(p1, q1))
}

struct Slots {
    /// (qubit, axis) in enumeration order; one sign bit each.
    order: Vec<(usize, Axis)>,
}

impl Slots {
    fn build<T: Real>(op: &ObservableSum<T>) -> Self {
        let mut per_qubit: Vec<Vec<Axis>> = vec![Vec::new(); op.n()];
        for t in op.terms() {
            for (q, &a) in t.axes().iter().enumerate() {
                if a != Axis::I && !per_qubit[q].contains(&a) {
                    per_qubit[q].push(a);
                }
            }
        }
        for axes in &mut per_qubit {
            axes.sort();
        }
        let order = per_qubit
            .iter()
            .enumerate()
            .flat_map(|(q, axes)| axes.iter().map(move |&a| (q, a)))
            .collect();
        Slots { order }
    }

    fn bit_of(&self, q: usize, a: Axis) -> Option<usize> {
        self.order.iter().position(|&(sq, sa)| sq == q && sa == a)
    }
}

pub fn lhv_bound<T: Real>(op: &ObservableSum<T>) -> Result<LhvResult<T>> {
    lhv_bound_with_cap(op, ENUMERATION_CAP)
}

pub fn lhv_bound_with_cap<T: Real>(op: &ObservableSum<T>, cap: u128) -> Result<LhvResult<T>> {
    let slots = Slots::build(op);
    let nbits = slots.order.len();
    let size = 1u128 << nbits.min(127);
    if nbits >= 127 || size > cap {
        return Err(Error::EnumerationTooLarge { size, cap });
    }

    // constant offset from identity-only terms, and per-term sign masks
    let mut offset = T::zero();
    let mut masks: Vec<(usize, T)> = Vec::new();
    for t in op.terms() {
        if t.is_identity() {
            offset += t.weight();
            continue;
        }
        let mut mask = 0usize;
        for (q, &a) in t.axes().iter().enumerate() {
            if a != Axis::I {
                mask |= 1 << slots.bit_of(q, a).expect("slot registered above");
            }
        }
        masks.push((mask, t.weight()));
    }

    let mut best = T::neg_infinity();
    let mut best_assign = 0usize;
    for m in 0..(size as usize) {
        let mut acc = offset;
        for &(mask, w) in &masks {
            if (m & mask).count_ones() & 1 == 0 {
                acc += w;
            } else {
                acc -= w;
            }
        }
        let score = acc.abs();
        if score > best {
            best = score;
            best_assign = m;
        }
    }

    // exact rational replay at the winning assignment requires the *maximum*
    // over assignments, so run the integer enumeration too when weights are
    // recognizably rational
    let exact = exact_bound(op, &slots, &masks_as_indices(op, &slots));
    let witness = slots
        .order
        .iter()
        .enumerate()
        .fold(vec![BTreeMap::new(); op.n()], |mut acc, (bit, &(q, a))| {
            let sign: i8 = if best_assign >> bit & 1 == 0 { 1 } else { -1 };
            acc[q].insert(a, sign);
            acc
        });
    Ok(LhvResult { bound: best, exact, witness })
}

fn masks_as_indices<T: Real>(op: &ObservableSum<T>, slots: &Slots) -> Vec<(usize, f64)> {
    op.terms()
        .iter()
        .filter(|t| !t.is_identity())
        .map(|t| {
            let mut mask = 0usize;
            for (q, &a) in t.axes().iter().enumerate() {
                if a != Axis::I {
                    mask |= 1 << slots.bit_of(q, a).expect("slot registered");
                }
            }
            (mask, t.weight().as_f64())
        })
        .collect()
}

/// Integer re-enumeration over a common denominator; None when any weight is
/// not rational with denominator ≤ 4096.
fn exact_bound<T: Real>(op: &ObservableSum<T>, slots: &Slots, masks: &[(usize, f64)]) -> Option<Ratio<i64>> {
    let mut weights = Vec::with_capacity(masks.len());
    let mut offset = Ratio::new(0, 1);
    for t in op.terms() {
        if t.is_identity() {
            offset += rationalize(t.weight().as_f64(), 4096)?;
        }
    }
    for &(mask, w) in masks {
        weights.push((mask, rationalize(w, 4096)?));
    }
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    let lcm = weights
        .iter()
        .map(|(_, r)| *r.denom())
        .chain([*offset.denom()])
        .fold(1i64, |a, b| a / gcd(a, b) * b);
    let off_num = offset.numer() * (lcm / offset.denom());
    let nums: Vec<(usize, i64)> =
        weights.iter().map(|(m, r)| (*m, r.numer() * (lcm / r.denom()))).collect();
    let nbits = slots.order.len();
    let mut best = 0i64;
    for m in 0..(1usize << nbits) {
        let mut acc = off_num;
        for &(mask, k) in &nums {
            if (m & mask).count_ones() & 1 == 0 {
                acc += k;
            } else {
                acc -= k;
            }
        }
        best = best.max(acc.abs());
    }
    Some(Ratio::new(best, lcm))
}

/// Signed value of the operator under a deterministic assignment; axes not
/// present in the assignment count as +1.
pub fn evaluate_assignment<T: Real>(op: &ObservableSum<T>, witness: &[BTreeMap<Axis, i8>]) -> T {
    let mut acc = T::zero();
    for t in op.terms() {
        let mut sign = 1i8;
        for (q, &a) in t.axes().iter().enumerate() {
            if a != Axis::I {
                sign *= witness.get(q).and_then(|m| m.get(&a)).copied().unwrap_or(1);
            }
        }
        acc += t.weight() * T::of(sign as f64);
    }
    acc
}

/// Quantum value divided by the classical bound; > 1 certifies a violation.
pub fn violation_ratio<T: Real, S: crate::pauli::ExpectationSource<T> + ?Sized>(
    op: &ObservableSum<T>,
    state: &S,
) -> Result<T> {
    let r = lhv_bound(op)?;
    if r.bound == T::zero() {
        return Err(Error::ZeroLhvBound);
    }
    Ok(crate::qstate::expectation(op, state)? / r.bound)
}
