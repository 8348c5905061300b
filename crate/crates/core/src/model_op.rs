//! Finite sections of the model operator on normalised reproducing kernels.
//!
//! For zeros `ω_j` of the disk, `x_j = (1-|ω_j|²)^{1/2}/(1-ω̄_j z)` and the
//! operator acts diagonally, `T x_j = t_j x_j`. On `span{x_j}` with
//! `x = Σ c_j x_j`, `‖x‖² = c*Gc` and `‖Tx‖² = c*D*GDc`, so the extreme
//! singular values of `T` are the square roots of the extreme eigenvalues of
//! the pencil `(D*GD, G)`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::blaschke::{ProductSpec, StackKind, finite_product_value, interpolation_constant};
use crate::construction::{enumerate_zeros, spec_threshold, witness_points};
use crate::covering::{c1_upper, eta_formula};
use crate::error::{Error, Result, domain};
use crate::geometry::{Chart, Point, cayley, log_blaschke_factor};
use crate::linalg::{CMatrix, pencil_extremes};
use crate::scalar::{CompensatedSum, Real};

/// Zeros, their kernel Gram matrix and the diagonal values of `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSection<T> {
    zeros: Vec<Point<T>>,
    gram: CMatrix<T>,
    targets: Vec<Complex<T>>,
}

impl<T: Real> KernelSection<T> {
    pub fn zeros(&self) -> &[Point<T>] {
        &self.zeros
    }

    pub fn gram(&self) -> &CMatrix<T> {
        &self.gram
    }

    pub fn targets(&self) -> &[Complex<T>] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    /// Section on the given indices (in that order).
    pub fn restrict(&self, idx: &[usize]) -> Self {
        Self {
            zeros: idx.iter().map(|&i| self.zeros[i]).collect(),
            gram: self.gram.principal(idx),
            targets: idx.iter().map(|&i| self.targets[i]).collect(),
        }
    }

    /// First `n` zeros.
    pub fn prefix(&self, n: usize) -> Self {
        self.restrict(&(0..n.min(self.len())).collect::<Vec<_>>())
    }
}

fn check_distinct<T: Real>(zeros: &[Point<T>]) -> Result<()> {
    for (i, a) in zeros.iter().enumerate() {
        if zeros[..i].iter().any(|b| b == a) {
            return Err(domain(format!(
                "duplicate zero ({}, {}): the Gram matrix would be singular",
                a.re(),
                a.im()
            )));
        }
    }
    Ok(())
}

/// Builds the section for zeros given in either chart.
///
/// Half-plane zeros are not moved to the disk numerically: with `ω = (z-i)/(z+i)`,
/// `1-|ω|² = 4y/|z+i|²` and `1-ω_jω̄_k = 2i(z̄_k-z_j)/((z_j+i)(z̄_k-i))`, which
/// keeps every entry accurate when `ω_j` crowd the circle. Disk zeros use the
/// kernel formula directly.
pub fn build_section<T: Real>(zeros: &[Point<T>], targets: &[Complex<T>]) -> Result<KernelSection<T>> {
    if zeros.len() != targets.len() {
        return Err(domain(format!("{} zeros but {} targets", zeros.len(), targets.len())));
    }
    if zeros.is_empty() {
        return Err(domain("section needs at least one zero"));
    }
    let chart = zeros[0].chart();
    if zeros.iter().any(|z| z.chart() != chart) {
        return Err(Error::ChartMismatch("section zeros must share a chart".into()));
    }
    check_distinct(zeros)?;
    let n = zeros.len();
    let one = Complex::new(T::one(), T::zero());
    let gram = match chart {
        Chart::HalfPlane => {
            let i = Complex::new(T::zero(), T::one());
            let zc: Vec<Complex<T>> = zeros.iter().map(|z| z.to_complex()).collect();
            let w: Vec<T> = zeros
                .iter()
                .zip(&zc)
                .map(|(z, c)| T::lit(2.0) * z.im().sqrt() / (*c + i).norm())
                .collect();
            CMatrix::from_fn(n, |j, k| {
                if j == k {
                    return one;
                }
                let num = (zc[j] + i) * (zc[k].conj() - i);
                let den = i * T::lit(2.0) * (zc[k].conj() - zc[j]);
                num / den * (w[j] * w[k])
            })
        }
        Chart::Disk => {
            let zc: Vec<Complex<T>> = zeros.iter().map(|z| z.to_complex()).collect();
            let w: Vec<T> = zc
                .iter()
                .map(|c| ((T::one() - c.norm()) * (T::one() + c.norm())).sqrt())
                .collect();
            CMatrix::from_fn(n, |j, k| {
                if j == k {
                    return one;
                }
                (one - zc[j] * zc[k].conj()).inv() * (w[j] * w[k])
            })
        }
    };
    let disk = match chart {
        Chart::HalfPlane => zeros.iter().map(cayley).collect::<Result<Vec<_>>>()?,
        Chart::Disk => zeros.to_vec(),
    };
    Ok(KernelSection {
        zeros: disk,
        gram,
        targets: targets.to_vec(),
    })
}

/// Extreme singular values of `T` on the kernel span.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectionSpectrum<T> {
    pub sigma_min: T,
    pub sigma_max: T,
    /// `1/σ_min`, `+∞` when `σ_min = 0`.
    pub inverse_norm: T,
    pub gram_condition: T,
    pub residual: T,
}

pub fn section_spectrum<T: Real>(s: &KernelSection<T>) -> Result<SectionSpectrum<T>> {
    let p = pencil_extremes(&s.gram, &s.targets)?;
    let inverse_norm = if p.sigma_min > T::zero() {
        p.sigma_min.recip()
    } else {
        T::infinity()
    };
    Ok(SectionSpectrum {
        sigma_min: p.sigma_min,
        sigma_max: p.sigma_max,
        inverse_norm,
        gram_condition: p.gram_condition,
        residual: p.residual,
    })
}

/// Materialised zeros of a stack (`zeros_per_side` per row and side) in the
/// canonical level-by-level order.
pub fn section_zeros<T: Real>(spec: &ProductSpec<T>, zeros_per_side: usize) -> Result<Vec<Point<T>>> {
    Ok(enumerate_zeros(spec, zeros_per_side)?
        .into_iter()
        .map(|e| e.point)
        .collect())
}

/// `conj(g(z_j))` for `g = ∏_{w ∈ g_zeros} b_w`: the eigenvalues of the
/// adjoint of `g(T)` on the kernels.
pub fn adjoint_targets<T: Real>(g_zeros: &[Point<T>], zeros: &[Point<T>]) -> Result<Vec<Complex<T>>> {
    zeros
        .iter()
        .map(|z| Ok(finite_product_value(g_zeros, z)?.conj()))
        .collect()
}

/// One row of an inverse-norm sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow<T> {
    pub n: usize,
    pub sigma_min: T,
    pub inverse_norm: T,
    pub gram_condition: T,
}

fn check_n_list(n_list: &[usize], available: usize) -> Result<()> {
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(domain("section sizes must be positive"));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(domain("section sizes must be strictly increasing"));
    }
    if let Some(&last) = n_list.last()
        && last > available
    {
        return Err(domain(format!(
            "section size {last} exceeds the {available} materialised zeros"
        )));
    }
    Ok(())
}

fn sweep_prefixes<T: Real>(zeros: &[Point<T>], targets: &[Complex<T>], n_list: &[usize]) -> Result<Vec<SweepRow<T>>> {
    check_n_list(n_list, zeros.len())?;
    let results: Vec<Result<SweepRow<T>>> = n_list
        .par_iter()
        .map(|&n| {
            let s = section_spectrum(&build_section(&zeros[..n], &targets[..n])?)?;
            Ok(SweepRow {
                n,
                sigma_min: s.sigma_min,
                inverse_norm: s.inverse_norm,
                gram_condition: s.gram_condition,
            })
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(Error::IllConditionedGram { condition, .. }) => {
                let feasible_n = rows.last().map_or(0, |r: &SweepRow<T>| r.n);
                return Err(Error::IllConditionedGram { condition, feasible_n });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

/// `σ_min` of `f(T)*` on the first `N` materialised zeros, for each `N`.
pub fn inverse_norm_sweep<T: Real>(
    spec: &ProductSpec<T>,
    f_zeros: &[Point<T>],
    zeros_per_side: usize,
    n_list: &[usize],
) -> Result<Vec<SweepRow<T>>> {
    let zeros = section_zeros(spec, zeros_per_side)?;
    let targets = adjoint_targets(f_zeros, &zeros)?;
    sweep_prefixes(&zeros, &targets, n_list)
}

/// One test function of a δ-sweep.
#[derive(Clone, Debug, PartialEq)]
pub enum TestFamily {
    /// `g ≡ δ`.
    Constant,
    /// `g = b_{v_n}`.
    Witness(usize),
    /// `g = ∏_n b_{v_n}`.
    FullWitness,
}

impl std::fmt::Display for TestFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Constant => write!(f, "constant"),
            Self::Witness(n) => write!(f, "b_v{n}"),
            Self::FullWitness => write!(f, "f"),
        }
    }
}

/// One row of a δ-sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaRow<T> {
    pub delta: T,
    pub n: usize,
    /// Largest inverse norm over the admissible test functions.
    pub inverse_norm: T,
    pub sigma_min: T,
    pub gram_condition: T,
    /// Test function attaining `inverse_norm`.
    pub worst_family: TestFamily,
    /// Inverse norm for the constant function `δ`.
    pub constant_inverse_norm: T,
    /// Inverse norm for `δ·b_v(z_j)/|b_v(z_j)|`, `v` the nearest witness point.
    pub phase_inverse_norm: T,
    pub eta: Option<T>,
    /// `c/η² · log(1/η)` when `δ > δ₁`.
    pub c1_upper: Option<T>,
}

/// Options shared by the δ-sweeps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaSweepOptions<T> {
    pub zeros_per_side: usize,
    pub corona_c: T,
}

/// For each `δ`, the largest finite-section inverse norm of `g(T)*` over the
/// test functions `g` with `‖g‖_∞ ≤ 1` and `|g| ≥ δ` on every materialised
/// zero: the constant `δ`, single witness factors `b_{v_n}` and the full
/// witness product, when admissible.
pub fn delta_sweep<T: Real>(
    spec: &ProductSpec<T>,
    delta_list: &[T],
    n: usize,
    opts: DeltaSweepOptions<T>,
) -> Result<Vec<DeltaRow<T>>> {
    let zeros = section_zeros(spec, opts.zeros_per_side)?;
    check_n_list(&[n], zeros.len())?;
    let witnesses = witness_points(spec)?;
    let alpha = match spec.kind() {
        StackKind::UniformStack { alpha, .. } | StackKind::Adaptive { alpha, .. } => *alpha,
        StackKind::Explicit => return Err(domain("δ-sweeps need a constructed stack")),
    };
    let delta1 = spec_threshold(spec)?;
    // candidate test functions with their minimum modulus on all materialised zeros
    let mut families: Vec<(TestFamily, Vec<Point<T>>)> = witnesses
        .iter()
        .enumerate()
        .map(|(i, w)| (TestFamily::Witness(i), vec![*w]))
        .collect();
    families.push((TestFamily::FullWitness, witnesses.clone()));
    let candidates: Vec<(TestFamily, Vec<Complex<T>>, T)> = families
        .into_iter()
        .map(|(fam, gz)| {
            let t = adjoint_targets(&gz, &zeros)?;
            let min = t.iter().map(|c| c.norm()).fold(T::infinity(), T::min);
            Ok((fam, t, min))
        })
        .collect::<Result<_>>()?;
    let phase = phase_targets(&zeros, &witnesses)?;
    let sub = &zeros[..n];
    let solve = |t: &[Complex<T>]| section_spectrum(&build_section(sub, &t[..n])?);
    let mut rows = Vec::new();
    for &delta in delta_list {
        if !(delta > T::zero() && delta <= T::one()) {
            return Err(domain(format!("δ must lie in (0, 1], got {delta}")));
        }
        let constant = solve(&vec![Complex::new(delta, T::zero()); zeros.len()])?;
        let ph: Vec<Complex<T>> = phase.iter().map(|p| *p * delta).collect();
        let phase_s = solve(&ph)?;
        let mut worst = (TestFamily::Constant, constant);
        for (fam, t, min) in &candidates {
            if *min >= delta {
                let s = solve(t)?;
                if s.inverse_norm > worst.1.inverse_norm {
                    worst = (fam.clone(), s);
                }
            }
        }
        let (eta, c1) = if delta > delta1 {
            let e = eta_formula(alpha, delta)?;
            (Some(e), c1_upper(e, opts.corona_c).ok())
        } else {
            (None, None)
        };
        rows.push(DeltaRow {
            delta,
            n,
            inverse_norm: worst.1.inverse_norm,
            sigma_min: worst.1.sigma_min,
            gram_condition: worst.1.gram_condition,
            worst_family: worst.0,
            constant_inverse_norm: constant.inverse_norm,
            phase_inverse_norm: phase_s.inverse_norm,
            eta,
            c1_upper: c1,
        });
    }
    Ok(rows)
}

/// Unimodular `b_v(z_j)/|b_v(z_j)|` (conjugated), `v` the witness point nearest to `z_j`.
fn phase_targets<T: Real>(zeros: &[Point<T>], witnesses: &[Point<T>]) -> Result<Vec<Complex<T>>> {
    zeros
        .iter()
        .map(|z| {
            let v = witnesses
                .iter()
                .min_by(|a, b| {
                    let da = log_blaschke_factor(z, a).unwrap_or(T::zero());
                    let db = log_blaschke_factor(z, b).unwrap_or(T::zero());
                    da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
                })
                .ok_or_else(|| domain("no witness points"))?;
            let b = finite_product_value(std::slice::from_ref(v), z)?;
            Ok((b / b.norm()).conj())
        })
        .collect()
}

/// Separation of a materialised zero set.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparationReport<T> {
    /// `πα/sinh πα` for each row.
    pub per_row: Vec<T>,
    /// `min_λ ∏_{μ≠λ} pseudo_dist(λ, μ)` over the materialised zeros.
    pub global: T,
    pub argmin: Option<Point<T>>,
}

pub fn interpolation_separation<T: Real>(spec: &ProductSpec<T>, zeros_per_side: usize) -> Result<SeparationReport<T>> {
    let per_row = spec
        .rows()
        .iter()
        .map(|r| interpolation_constant(r.alpha()))
        .collect::<Result<Vec<_>>>()?;
    let zeros = section_zeros(spec, zeros_per_side)?;
    let (global, argmin) = zero_set_separation(&zeros)?;
    Ok(SeparationReport {
        per_row,
        global,
        argmin,
    })
}

/// `min_λ ∏_{μ≠λ} pseudo_dist(λ, μ)` for an explicit list (1 for a single zero).
pub fn zero_set_separation<T: Real>(zeros: &[Point<T>]) -> Result<(T, Option<Point<T>>)> {
    let logs: Vec<T> = zeros
        .par_iter()
        .enumerate()
        .map(|(i, lam)| {
            let mut acc = CompensatedSum::new();
            for (j, mu) in zeros.iter().enumerate() {
                if i != j {
                    acc.add(log_blaschke_factor(lam, mu)?);
                }
            }
            Ok(acc.value())
        })
        .collect::<Result<_>>()?;
    let mut best = (T::infinity(), None);
    for (l, z) in logs.iter().zip(zeros) {
        if *l < best.0 {
            best = (*l, Some(*z));
        }
    }
    Ok((best.0.exp().min(T::one()), best.1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(x: f64, y: f64) -> Point<f64> {
        Point::disk(x, y).unwrap()
    }

    fn c(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn one_by_one() {
        let s = build_section(&[d(0.3, 0.1)], &[Complex::new(0.3, -0.4)]).unwrap();
        assert_eq!(s.gram()[(0, 0)], c(1.0));
        let sp = section_spectrum(&s).unwrap();
        assert!((sp.sigma_min - 0.5).abs() < 1e-15 && (sp.sigma_max - 0.5).abs() < 1e-15);
    }

    #[test]
    fn two_point_section() {
        let s = build_section(&[d(0.0, 0.0), d(0.5, 0.0)], &[c(1.0), c(1.0)]).unwrap();
        assert!((s.gram()[(0, 1)].re - 0.75f64.sqrt()).abs() < 1e-15);
        let sp = section_spectrum(&s).unwrap();
        assert!((sp.sigma_min - 1.0).abs() < 1e-12 && (sp.sigma_max - 1.0).abs() < 1e-12);
        let r = 0.75f64.sqrt();
        assert!((sp.gram_condition - (1.0 + r) / (1.0 - r)).abs() < 1e-10);
    }

    #[test]
    fn duplicate_zero_rejected() {
        assert!(build_section(&[d(0.1, 0.0), d(0.1, 0.0)], &[c(1.0), c(1.0)]).is_err());
        assert!(build_section(&[d(0.1, 0.0)], &[c(1.0), c(1.0)]).is_err());
    }

    #[test]
    fn half_plane_gram_matches_disk_gram() {
        let hp = [
            Point::half_plane(0.3, 2.0).unwrap(),
            Point::half_plane(-1.0, 0.5).unwrap(),
            Point::half_plane(4.0, 7.0).unwrap(),
        ];
        let disk: Vec<Point<f64>> = hp.iter().map(|z| cayley(z).unwrap()).collect();
        let t = [c(1.0); 3];
        let a = build_section(&hp, &t).unwrap();
        let b = build_section(&disk, &t).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                assert!((a.gram()[(j, k)] - b.gram()[(j, k)]).norm() < 1e-14);
            }
        }
        assert!(a.gram().hermitian_defect() < 1e-15);
    }

    #[test]
    fn single_zero_separation() {
        let (s, _) = zero_set_separation(&[d(0.2, 0.0)]).unwrap();
        assert_eq!(s, 1.0);
    }
}
