//! Small dense complex linear algebra: Hermitian matrices, pivoted Cholesky,
//! cyclic Jacobi eigen-decomposition, and extreme singular values of a
//! diagonal operator with respect to a definite Gram form.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type C<T> = Complex<T>;

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    n: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![C::new(T::zero(), T::zero()); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> C<T>) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Principal submatrix on `idx` (in the given order).
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self[(idx[i], idx[j])])
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn hermitian_defect(&self) -> T {
        let mut d = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    pub fn mul_vec(&self, x: &[C<T>]) -> Vec<C<T>> {
        (0..self.n)
            .map(|i| (0..self.n).fold(C::new(T::zero(), T::zero()), |acc, j| acc + self[(i, j)] * x[j]))
            .collect()
    }
}

impl<T> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.n + j]
    }
}

/// `P^T G P = L L*` with `L` lower triangular.
#[derive(Clone, Debug)]
pub struct PivotedCholesky<T> {
    pub l: CMatrix<T>,
    /// `perm[i]` is the original index placed at position `i`.
    pub perm: Vec<usize>,
}

/// Why a pivoted factorisation stopped early.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PivotFailure<T> {
    /// Number of pivots accepted before the failure.
    pub rank: usize,
    /// Ratio of the first accepted pivot to the rejected one.
    pub condition: T,
}

/// Diagonal-pivoted Cholesky; stops when the largest remaining pivot falls
/// below `threshold` times the largest diagonal entry.
pub fn pivoted_cholesky<T: Real>(
    g: &CMatrix<T>,
    threshold: T,
) -> std::result::Result<PivotedCholesky<T>, PivotFailure<T>> {
    let n = g.dim();
    let mut a = g.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale = (0..n).map(|i| a[(i, i)].re).fold(T::zero(), T::max);
    let mut first = T::zero();
    for k in 0..n {
        let (p, piv) = (k..n)
            .map(|i| (i, a[(i, i)].re))
            .fold((k, T::neg_infinity()), |b, c| if c.1 > b.1 { c } else { b });
        if !(piv > threshold * scale) {
            let condition = if piv > T::zero() { first / piv } else { T::infinity() };
            return Err(PivotFailure { rank: k, condition });
        }
        if k == 0 {
            first = piv;
        }
        if p != k {
            swap_sym(&mut a, k, p);
            perm.swap(k, p);
        }
        let d = piv.sqrt();
        a[(k, k)] = C::new(d, T::zero());
        for i in k + 1..n {
            a[(i, k)] = a[(i, k)] / d;
        }
        for j in k + 1..n {
            let ljk = a[(j, k)];
            for i in j..n {
                let v = a[(i, k)] * ljk.conj();
                a[(i, j)] = a[(i, j)] - v;
            }
        }
        // keep the trailing block Hermitian for pivot selection
        for j in k + 1..n {
            a[(j, j)] = C::new(a[(j, j)].re, T::zero());
        }
    }
    let mut l = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            l[(i, j)] = a[(i, j)];
        }
    }
    Ok(PivotedCholesky { l, perm })
}

/// Swaps rows/columns `i` and `j` of the lower triangle of a Hermitian matrix
/// stored in full (only the lower triangle is read afterwards).
fn swap_sym<T: Real>(a: &mut CMatrix<T>, i: usize, j: usize) {
    let n = a.dim();
    // materialise the full Hermitian matrix from its lower triangle, swap, and keep it full
    for r in 0..n {
        for c in r + 1..n {
            a[(r, c)] = a[(c, r)].conj();
        }
    }
    for c in 0..n {
        let t = a[(i, c)];
        a[(i, c)] = a[(j, c)];
        a[(j, c)] = t;
    }
    for r in 0..n {
        let t = a[(r, i)];
        a[(r, i)] = a[(r, j)];
        a[(r, j)] = t;
    }
}

/// Inverse of a lower-triangular matrix.
fn lower_inverse<T: Real>(l: &CMatrix<T>) -> CMatrix<T> {
    let n = l.dim();
    let mut x = CMatrix::zeros(n);
    for j in 0..n {
        x[(j, j)] = l[(j, j)].inv();
        for i in j + 1..n {
            let mut s = C::new(T::zero(), T::zero());
            for k in j..i {
                s = s + l[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = -s / l[(i, i)];
        }
    }
    x
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

/// Cyclic Jacobi eigen-decomposition of a Hermitian matrix.
pub fn hermitian_eigen<T: Real>(h: &CMatrix<T>) -> Result<HermitianEigen<T>> {
    let n = h.dim();
    let mut a = h.clone();
    for i in 0..n {
        a[(i, i)] = C::new(a[(i, i)].re, T::zero());
    }
    let mut v = CMatrix::identity(n);
    let frob = a.data.iter().map(|z| z.norm_sqr()).fold(T::zero(), |s, x| s + x).sqrt();
    let tiny = T::epsilon() * frob;
    let mut converged = n < 2;
    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off + a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tiny {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= T::min_positive_value() {
                    continue;
                }
                let e = apq / mag;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (T::lit(2.0) * mag);
                let t = if tau >= T::zero() {
                    (tau + (T::one() + tau * tau).sqrt()).recip()
                } else {
                    -(-tau + (T::one() + tau * tau).sqrt()).recip()
                };
                let c = (T::one() + t * t).sqrt().recip();
                let s = t * c;
                let ec = e.conj();
                let jpp = C::new(c, T::zero());
                let jpq = C::new(s, T::zero());
                let jqp = ec * (-s);
                let jqq = ec * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = C::new(T::zero(), T::zero());
                a[(q, p)] = C::new(T::zero(), T::zero());
                a[(p, p)] = C::new(a[(p, p)].re, T::zero());
                a[(q, q)] = C::new(a[(q, q)].re, T::zero());
            }
        }
    }
    if !converged {
        return Err(Error::Internal("Jacobi eigen-solver did not converge".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Extreme singular values of `x ↦ D x` in the norm `‖x‖² = c* G c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PencilExtremes<T> {
    pub sigma_min: T,
    pub sigma_max: T,
    /// `λ_max(G)/λ_min(G)`.
    pub gram_condition: T,
    /// Largest relative residual `‖D*GDc - μGc‖/(‖G‖‖c‖)` over the extreme pairs.
    pub residual: T,
}

/// Pivot threshold per unit dimension.
pub const PIVOT_TOL: f64 = 1e-14;
/// Accepted relative pencil residual.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Extreme generalized eigenvalues of `(D* G D, G)` via `P^T G P = L L*` and
/// the congruent standard problem `M*M`, `M = L* D L^{-*}`; returned as square roots.
pub fn pencil_extremes<T: Real>(g: &CMatrix<T>, d: &[C<T>]) -> Result<PencilExtremes<T>> {
    let n = g.dim();
    if d.len() != n || n == 0 {
        return Err(Error::Domain(format!("pencil needs {n} > 0 targets, got {}", d.len())));
    }
    let eig_g = hermitian_eigen(g)?;
    let gram_condition = {
        let lo = eig_g.values[0];
        let hi = eig_g.values[n - 1];
        if lo > T::zero() { hi / lo } else { T::infinity() }
    };
    let threshold = T::lit(PIVOT_TOL) * T::from_usize_lossy(n);
    let chol = pivoted_cholesky(g, threshold).map_err(|f| Error::IllConditionedGram {
        condition: gram_condition.max(f.condition).to_f64().unwrap_or(f64::INFINITY),
        feasible_n: f.rank,
    })?;
    let l = &chol.l;
    let dp: Vec<C<T>> = chol.perm.iter().map(|&i| d[i]).collect();
    let linv = lower_inverse(l);
    // M = L* D' L^{-*}
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut s = C::new(T::zero(), T::zero());
            // (L*)_{ik} = conj(L_{ki}), nonzero for k ≥ i; (L^{-*})_{kj} = conj(Linv_{jk}), nonzero for k ≤ j
            for k in i..=j.max(i) {
                if k > j {
                    break;
                }
                s = s + l[(k, i)].conj() * dp[k] * linv[(j, k)].conj();
            }
            m[(i, j)] = s;
        }
    }
    let h = CMatrix::from_fn(n, |i, j| {
        (0..n).fold(C::new(T::zero(), T::zero()), |acc, k| {
            acc + m[(k, i)].conj() * m[(k, j)]
        })
    });
    let eig = hermitian_eigen(&h)?;
    let gnorm = g.max_abs() * T::from_usize_lossy(n);
    let mut residual = T::zero();
    for col in [0, n - 1] {
        let mu = eig.values[col].max(T::zero());
        let y: Vec<C<T>> = (0..n).map(|r| eig.vectors[(r, col)]).collect();
        // c' = L^{-*} y, then undo the permutation
        let cp: Vec<C<T>> = (0..n)
            .map(|i| (i..n).fold(C::new(T::zero(), T::zero()), |acc, k| acc + linv[(k, i)].conj() * y[k]))
            .collect();
        let mut c = vec![C::new(T::zero(), T::zero()); n];
        for (pos, &orig) in chol.perm.iter().enumerate() {
            c[orig] = cp[pos];
        }
        let dc: Vec<C<T>> = c.iter().zip(d).map(|(x, t)| *x * *t).collect();
        let gdc = g.mul_vec(&dc);
        let lhs: Vec<C<T>> = gdc.iter().zip(d).map(|(x, t)| t.conj() * *x).collect();
        let gc = g.mul_vec(&c);
        let cnorm = c.iter().map(|x| x.norm_sqr()).fold(T::zero(), |s, x| s + x).sqrt();
        let r = lhs
            .iter()
            .zip(&gc)
            .map(|(a, b)| (*a - *b * mu).norm_sqr())
            .fold(T::zero(), |s, x| s + x)
            .sqrt();
        residual = residual.max(r / (gnorm * cnorm));
    }
    if !(residual <= T::lit(RESIDUAL_TOL)) {
        return Err(Error::IllConditionedGram {
            condition: gram_condition.to_f64().unwrap_or(f64::INFINITY),
            feasible_n: chol.perm.len().saturating_sub(1),
        });
    }
    Ok(PencilExtremes {
        sigma_min: eig.values[0].max(T::zero()).sqrt(),
        sigma_max: eig.values[n - 1].max(T::zero()).sqrt(),
        gram_condition,
        residual,
    })
}
