//! Derivative-free simplex maximizer (Nelder–Mead with the adaptive
//! coefficients of Gao & Han), used for all class optimizations.

use crate::real::Real;

#[derive(Clone, Debug)]
pub struct Options<T: Real> {
    /// Iteration cap for one run.
    pub max_iter: usize,
    /// Converged when the simplex value spread drops below this.
    pub tol: T,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: T,
}

#[derive(Clone, Debug)]
pub struct Outcome<T: Real> {
    pub value: T,
    pub point: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
}

/// Maximize `f` from `x0`. The simplex is seeded axis-aligned with edge
/// `initial_step`; dimension-adaptive reflection/expansion/contraction
/// coefficients keep high-dimensional runs (32 parameters) stable.
pub fn maximize<T: Real, F: FnMut(&[T]) -> T>(mut f: F, x0: &[T], opts: &Options<T>) -> Outcome<T> {
    let d = x0.len();
    assert!(d >= 1, "empty parameter vector");
    let one = T::one();
    let two = T::of(2.0);
    let dim = T::of(d as f64);
    let alpha = one;
    let beta = one + two / dim;
    let gamma = T::of(0.75) - one / (two * dim);
    let delta = one - one / dim;

    // vertices + values, kept sorted best (largest) first
    let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(d + 1);
    let v0 = f(x0);
    simplex.push((x0.to_vec(), v0));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let v = f(&x);
        simplex.push((x, v));
    }
    let sort = |s: &mut Vec<(Vec<T>, T)>| {
        s.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("objective returned NaN"));
    };
    sort(&mut simplex);

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let spread = simplex[0].1 - simplex[d].1;
        if spread < opts.tol {
            converged = true;
            break;
        }
        // centroid of all but the worst vertex
        let mut centroid = vec![T::zero(); d];
        for (x, _) in simplex.iter().take(d) {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += *xi;
            }
        }
        for c in &mut centroid {
            *c /= dim;
        }
        let worst = simplex[d].clone();
        let mut reflect = vec![T::zero(); d];
        for i in 0..d {
            reflect[i] = centroid[i] + alpha * (centroid[i] - worst.0[i]);
        }
        let fr = f(&reflect);

        if fr > simplex[0].1 {
            // try expanding past the reflection
            let mut expand = vec![T::zero(); d];
            for i in 0..d {
                expand[i] = centroid[i] + beta * (centroid[i] - worst.0[i]);
            }
            let fe = f(&expand);
            simplex[d] = if fe > fr { (expand, fe) } else { (reflect, fr) };
        } else if fr > simplex[d - 1].1 {
            simplex[d] = (reflect, fr);
        } else {
            // contract, outside when the reflection helped at all
            let mut contract = vec![T::zero(); d];
            if fr > worst.1 {
                for i in 0..d {
                    contract[i] = centroid[i] + gamma * (centroid[i] - worst.0[i]);
                }
            } else {
                for i in 0..d {
                    contract[i] = centroid[i] - gamma * (centroid[i] - worst.0[i]);
                }
            }
            let fc = f(&contract);
            if fc > fr.max(worst.1) {
                simplex[d] = (contract, fc);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    for (x, &b) in v.0.iter_mut().zip(&best) {
                        *x = b + delta * (*x - b);
                    }
                    v.1 = f(&v.0);
                }
            }
        }
        sort(&mut simplex);
    }

    let (point, value) = simplex.swap_remove(0);
    Outcome { value, point, iterations, converged }
}
