//! Small dense complex matrices and a Hermitian eigensolver.
//!
//! Register dimensions here are at most 2^6 = 64, so a dense row-major layout
//! and a cyclic Jacobi eigensolver are both adequate and keep results
//! deterministic across platforms.

use crate::real::{c_one, c_re, c_zero, Real, C};

/// 2x2 complex matrix, row-major. The building block of every local
/// (per-qubit) operation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<T: Real> {
    pub m: [[C<T>; 2]; 2],
}

impl<T: Real> Mat2<T> {
    pub fn new(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> Self {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub fn identity() -> Self {
        Mat2::new(c_one(), c_zero(), c_zero(), c_one())
    }

    pub fn det(&self) -> C<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn adjoint(&self) -> Self {
        Mat2::new(
            self.m[0][0].conj(),
            self.m[1][0].conj(),
            self.m[0][1].conj(),
            self.m[1][1].conj(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = [[c_zero(); 2]; 2];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j];
            }
        }
        Mat2 { m: r }
    }

    /// Max-norm distance to the identity of `self† self`.
    pub fn unitarity_defect(&self) -> T {
        let g = self.adjoint().mul(self);
        let mut d = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                let target = if i == j { c_one() } else { c_zero() };
                d = d.max((g.m[i][j] - target).norm());
            }
        }
        d
    }
}

/// Dense complex square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat<T: Real> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(dim: usize) -> Self {
        CMat { dim, data: vec![c_zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = c_one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), dim, "ragged rows");
            for (j, v) in row.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// |v><v| for a raw amplitude vector.
    pub fn outer(v: &[C<T>]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C<T>] {
        &self.data
    }

    pub fn scale(&mut self, s: C<T>) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn scaled(&self, s: C<T>) -> Self {
        let mut m = self.clone();
        m.scale(s);
        m
    }

    pub fn add_scaled(&mut self, other: &Self, s: C<T>) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += *b * s;
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut m = self.clone();
        m.add_scaled(other, -c_one::<T>());
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a == c_zero() {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).map(|i| self[(i, i)]).fold(c_zero(), |a, b| a + b)
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(v.len(), self.dim);
        let d = self.dim;
        let mut out = vec![c_zero(); d];
        for i in 0..d {
            let mut acc = c_zero();
            for j in 0..d {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|v| v.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
    }

    pub fn hermiticity_defect(&self) -> T {
        let mut d = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        let d = da * db;
        let mut out = Self::zeros(d);
        for ia in 0..da {
            for ja in 0..da {
                let a = self[(ia, ja)];
                if a == c_zero() {
                    continue;
                }
                for ib in 0..db {
                    for jb in 0..db {
                        out[(ia * db + ib, ja * db + jb)] = a * other[(ib, jb)];
                    }
                }
            }
        }
        out
    }

    pub fn from_mat2(m: &Mat2<T>) -> Self {
        CMat::from_rows(vec![vec![m.m[0][0], m.m[0][1]], vec![m.m[1][0], m.m[1][1]]])
    }

    /// Spectral (operator 2-) norm, via the top eigenvalue of `self† self`.
    pub fn spectral_norm(&self) -> T {
        let gram = self.adjoint().mul(self);
        let eig = eigh(&gram);
        eig.values[0].max(T::zero()).sqrt()
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for CMat<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for CMat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        let d = self.dim;
        &mut self.data[i * d + j]
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
/// `vectors` holds the eigenvectors as columns, in the same order.
#[derive(Clone, Debug)]
pub struct Eigh<T: Real> {
    pub values: Vec<T>,
    pub vectors: CMat<T>,
}

impl<T: Real> Eigh<T> {
    pub fn eigenvector(&self, k: usize) -> Vec<C<T>> {
        (0..self.vectors.dim()).map(|i| self.vectors[(i, k)]).collect()
    }
}

/// Cyclic Jacobi eigensolver for complex Hermitian matrices.
///
/// Each pivot (p, q) is reduced to the real symmetric 2x2 case by absorbing
/// the phase of `a_pq` into column q, then rotated away. Quadratically
/// convergent; a handful of sweeps reaches machine precision at dim <= 64.
pub fn eigh<T: Real>(a: &CMat<T>) -> Eigh<T> {
    let d = a.dim();
    debug_assert!(
        a.hermiticity_defect() <= T::of(1e-9) * (T::one() + a.frobenius_norm()),
        "eigh input is not Hermitian"
    );
    let mut m = a.clone();
    // Symmetrize exactly so rounding in the input cannot leak in.
    for i in 0..d {
        m[(i, i)] = c_re(m[(i, i)].re);
        for j in (i + 1)..d {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * c_re(T::of(0.5));
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    let mut v = CMat::identity(d);
    let frob = m.frobenius_norm().max(T::min_positive_value());
    let stop = frob * T::epsilon() * T::of(1e-2);

    for _sweep in 0..60 {
        let mut off = T::zero();
        for p in 0..d {
            for q in (p + 1)..d {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= frob * T::epsilon() * T::of(1e-4) {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // Phase factor making the pivot real: conj(w) * conj(apq) = mag * conj(w)^2 ... we
                // use w = conj(apq)/mag so that the rotated pivot is the real value `mag`.
                let w = apq.conj() / c_re(mag);
                let tau = (app - aqq) / (mag + mag);
                let t = if tau == T::zero() {
                    T::one()
                } else {
                    tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                let (cs, sw) = (c_re(c), w * c_re(s));

                // Rows/columns k != p, q. Column view: new col_p = c*col_p + s*w*col_q,
                // new col_q = -s*col_p + c*w*col_q, then mirror for rows.
                for k in 0..d {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    let np = akp * cs + akq * sw;
                    let nq = akq * (w * c_re(c)) - akp * c_re(s);
                    m[(k, p)] = np;
                    m[(p, k)] = np.conj();
                    m[(k, q)] = nq;
                    m[(q, k)] = nq.conj();
                }
                m[(p, p)] = c_re(app + t * mag);
                m[(q, q)] = c_re(aqq - t * mag);
                m[(p, q)] = c_zero();
                m[(q, p)] = c_zero();

                for k in 0..d {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cs + vkq * sw;
                    v[(k, q)] = vkq * (w * c_re(c)) - vkp * c_re(s);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.partial_cmp(&m[(i, i)].re).unwrap());
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = CMat::zeros(d);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..d {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Eigh { values, vectors }
}

/// Largest |eigenvalue| of a Hermitian matrix (its operator norm).
pub fn hermitian_norm<T: Real>(a: &CMat<T>) -> T {
    let eig = eigh(a);
    eig.values
        .iter()
        .map(|v| v.abs())
        .fold(T::zero(), |acc, v| acc.max(v))
}
