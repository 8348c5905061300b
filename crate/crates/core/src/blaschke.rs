//! Periodic Blaschke rows `B_{α,γ}`, stacked products over many rows, and
//! certified evaluation of their moduli.
//!
//! A row with parameters `(α, γ)` has zeros `z_k = (2k + 1 + iα)/γ`, `k ∈ ℤ`,
//! and the closed-form modulus
//!
//! ```text
//! |B|² = ((p - q)² + 4pq·cos²(πγx/2)) / ((1 - pq)² + 4pq·cos²(πγx/2)),
//! p = e^{-πγy},  q = e^{-πα},
//! ```
//!
//! which is the usual `e^{πiγz}` quotient rewritten so that only decaying
//! exponentials appear and both ends of `[0, 1]` are cancellation free.

use num_complex::Complex;

use crate::construction::AdaptiveLevel;
use crate::error::{Error, Result, domain};
use crate::geometry::{Chart, Point, log_blaschke_factor, pseudo_dist};
use crate::scalar::{CompensatedSum, Real};

/// Default truncation tolerance for infinite products.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Hard cap on the number of rows visited by one product evaluation.
const MAX_ROWS: usize = 100_000;

/// `β(α) = (√(1+α²) - 1)/(√(1+α²) + 1)`, written as `α²/(√(1+α²) + 1)²`.
pub fn beta_of<T: Real>(alpha: T) -> T {
    let s = (T::one() + alpha * alpha).sqrt() + T::one();
    alpha * alpha / (s * s)
}

/// `α √(1+α²) / (√(1+α²) + 1)`: bottom of the covered strip, in units of `1/γ`.
pub fn strip_bottom_factor<T: Real>(alpha: T) -> T {
    let s = (T::one() + alpha * alpha).sqrt();
    alpha * s / (s + T::one())
}

/// `α √(1+α²) / (√(1+α²) - 1) = √(1+α²)(√(1+α²)+1)/α`: top of the covered strip.
pub fn strip_top_factor<T: Real>(alpha: T) -> T {
    let s = (T::one() + alpha * alpha).sqrt();
    s * (s + T::one()) / alpha
}

/// `1/√(1+2α²)`, the covering threshold of a row with parameter `α`.
pub fn threshold_of<T: Real>(alpha: T) -> T {
    (T::one() + T::lit(2.0) * alpha * alpha).sqrt().recip()
}

/// One periodic Blaschke row `B_{α,γ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RowSpec<T> {
    alpha: T,
    gamma: T,
}

impl<T: Real> RowSpec<T> {
    pub fn new(alpha: T, gamma: T) -> Result<Self> {
        if !(alpha.is_finite() && alpha > T::zero()) {
            return Err(domain(format!("row needs finite α > 0, got {alpha}")));
        }
        if !(gamma.is_finite() && gamma > T::zero()) {
            return Err(domain(format!("row needs finite γ > 0, got {gamma}")));
        }
        Ok(Self { alpha, gamma })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// Height `α/γ` of the zeros.
    pub fn height(&self) -> T {
        self.alpha / self.gamma
    }

    /// The zero `z_k = (2k + 1 + iα)/γ`.
    pub fn zero(&self, k: i64) -> Point<T> {
        let re = T::from_i64(2 * k + 1).expect("row index representable") / self.gamma;
        Point::half_plane(re, self.height()).expect("row zeros lie in the half-plane")
    }

    /// `(bottom, top)` of the strip covered by this row at the `1/√(1+2α²)` threshold.
    pub fn strip(&self) -> (T, T) {
        (
            strip_bottom_factor(self.alpha) / self.gamma,
            strip_top_factor(self.alpha) / self.gamma,
        )
    }

    /// Index `k` of the zero whose real part is nearest to `x`.
    pub fn nearest_index(&self, x: T) -> i64 {
        let k = ((self.gamma * x - T::one()) / T::lit(2.0)).round();
        k.to_i64()
            .unwrap_or(if k > T::zero() { i64::MAX / 4 } else { i64::MIN / 4 })
    }
}

/// Zeros `z_k` of a row for `k_lo ≤ k ≤ k_hi`.
pub fn row_zeros<T: Real>(row: &RowSpec<T>, k_lo: i64, k_hi: i64) -> Result<Vec<Point<T>>> {
    if k_lo > k_hi {
        return Err(domain(format!("empty index range {k_lo}..={k_hi}")));
    }
    Ok((k_lo..=k_hi).map(|k| row.zero(k)).collect())
}

struct RowTerms<T> {
    num: T,
    den: T,
}

fn row_terms<T: Real>(row: &RowSpec<T>, z: &Point<T>) -> RowTerms<T> {
    let pi = T::PI();
    let (x, y) = (z.re(), z.im());
    let gy = row.gamma * y;
    let p = (-pi * gy).exp();
    let q = (-pi * row.alpha).exp();
    // p - q without cancellation when γy ≈ α
    let d = row.alpha - gy;
    let pm = if d.abs() < T::one() && q > T::zero() {
        q * (pi * d).exp_m1()
    } else {
        p - q
    };
    let u = (row.gamma * x) % T::lit(2.0);
    let u = if u < T::zero() { u + T::lit(2.0) } else { u };
    // cos(πu/2) = sin(π(1 - u)/2), accurate near the zeros u = 1
    let c = (pi * (T::one() - u) / T::lit(2.0)).sin();
    let pq = p * q;
    let cross = T::lit(4.0) * pq * c * c;
    let one_minus_pq = -(-pi * (gy + row.alpha)).exp_m1();
    RowTerms {
        num: pm * pm + cross,
        den: one_minus_pq * one_minus_pq + cross,
    }
}

/// `log |B_{α,γ}(z)|`; `-∞` exactly on the zeros.
pub fn row_log_modulus<T: Real>(row: &RowSpec<T>, z: &Point<T>) -> Result<T> {
    if z.chart() != Chart::HalfPlane {
        return Err(Error::ChartMismatch("rows live in the half-plane chart".into()));
    }
    let t = row_terms(row, z);
    if t.num == T::zero() {
        return Ok(T::neg_infinity());
    }
    let half = T::lit(0.5);
    if t.num <= half * t.den {
        return Ok(half * (t.num.ln() - t.den.ln()));
    }
    // 1 - |B|² = (1 - p²)(1 - q²)/den
    let pi = T::PI();
    let two = T::lit(2.0);
    let a = -(-two * pi * row.gamma * z.im()).exp_m1();
    let b = -(-two * pi * row.alpha).exp_m1();
    let defect = (a * b / t.den).min(T::one());
    Ok(half * (-defect).ln_1p())
}

/// Closed-form `|B_{α,γ}(z)|` on the half-plane.
pub fn row_modulus<T: Real>(row: &RowSpec<T>, z: &Point<T>) -> Result<T> {
    Ok(row_log_modulus(row, z)?.exp())
}

/// Two-sided envelope `|p - q|/(1 - pq) ≤ |B_{α,γ}(x + iy)| ≤ (p + q)/(1 + pq)`.
pub fn row_envelope<T: Real>(row: &RowSpec<T>, y: T) -> Result<(T, T)> {
    if !(y > T::zero()) {
        return Err(domain(format!("envelope needs y > 0, got {y}")));
    }
    let pi = T::PI();
    let p = (-pi * row.gamma * y).exp();
    let q = (-pi * row.alpha).exp();
    Ok(((p - q).abs() / (T::one() - p * q), (p + q) / (T::one() + p * q)))
}

/// Interval `[lo, hi]` certified to contain a modulus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifiedValue<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> CertifiedValue<T> {
    pub fn point(x: T) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn mid(&self) -> T {
        (self.lo + self.hi) / T::lit(2.0)
    }

    pub fn contains(&self, x: T) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Certified bounds on `log |B(z)|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifiedLog<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> CertifiedLog<T> {
    pub fn exp(&self) -> CertifiedValue<T> {
        CertifiedValue {
            lo: self.lo.exp(),
            hi: self.hi.exp().min(T::one()),
        }
    }
}

/// Shape of a stacked product.
#[derive(Clone, Debug, PartialEq)]
pub enum StackKind<T> {
    /// Infinite stack `∏_{n≥0} B_{α, βⁿρ}`; the first `n_levels` rows are materialised.
    UniformStack { alpha: T, beta: T, rho: T, n_levels: usize },
    /// Finite stack built level by level towards the target `alpha`; level `n` holds `m_n` rows.
    Adaptive { alpha: T, levels: Vec<AdaptiveLevel<T>> },
    /// Finite explicit list of rows, one row per level.
    Explicit,
}

/// A stacked Blaschke product.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductSpec<T> {
    rows: Vec<RowSpec<T>>,
    kind: StackKind<T>,
}

impl<T: Real> ProductSpec<T> {
    /// The infinite stack `∏_{n≥0} B_{α, βⁿρ}` with `β = β(α)`.
    pub fn uniform(alpha: T, rho: T, n_levels: usize) -> Result<Self> {
        if n_levels == 0 {
            return Err(domain("uniform stack needs at least one level"));
        }
        if !(rho.is_finite() && rho > T::zero()) {
            return Err(domain(format!("ρ must be finite and positive, got {rho}")));
        }
        let beta = beta_of(alpha);
        let rows = (0..n_levels)
            .map(|n| RowSpec::new(alpha, uniform_gamma(rho, beta, n)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            rows,
            kind: StackKind::UniformStack {
                alpha,
                beta,
                rho,
                n_levels,
            },
        })
    }

    /// Finite product of the given rows.
    pub fn explicit(rows: Vec<RowSpec<T>>) -> Result<Self> {
        let spec = Self {
            rows,
            kind: StackKind::Explicit,
        };
        spec.check_distinct()?;
        Ok(spec)
    }

    pub(crate) fn adaptive(alpha: T, levels: Vec<AdaptiveLevel<T>>) -> Result<Self> {
        let mut rows = Vec::new();
        for lvl in &levels {
            for m in 0..lvl.m_n {
                rows.push(RowSpec::new(lvl.alpha_n, lvl.row_gamma(m))?);
            }
        }
        let spec = Self {
            rows,
            kind: StackKind::Adaptive { alpha, levels },
        };
        spec.check_distinct()?;
        Ok(spec)
    }

    fn check_distinct(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(domain("product needs at least one row"));
        }
        for (i, a) in self.rows.iter().enumerate() {
            if self.rows[..i].iter().any(|b| b == a) {
                return Err(domain(format!("duplicate row (α = {}, γ = {})", a.alpha, a.gamma)));
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> &[RowSpec<T>] {
        &self.rows
    }

    pub fn kind(&self) -> &StackKind<T> {
        &self.kind
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.kind, StackKind::UniformStack { .. })
    }

    /// Row indices grouped by construction level.
    pub fn level_ranges(&self) -> Vec<std::ops::Range<usize>> {
        match &self.kind {
            StackKind::Adaptive { levels, .. } => {
                let mut start = 0;
                levels
                    .iter()
                    .map(|l| {
                        let r = start..start + l.m_n as usize;
                        start = r.end;
                        r
                    })
                    .collect()
            }
            _ => (0..self.rows.len()).map(|i| i..i + 1).collect(),
        }
    }

    /// Row `n` of the stack, including rows of an infinite stack beyond the
    /// materialised ones.
    pub fn row(&self, n: usize) -> Option<RowSpec<T>> {
        match &self.kind {
            StackKind::UniformStack { alpha, beta, rho, .. } => self
                .rows
                .get(n)
                .copied()
                .or_else(|| RowSpec::new(*alpha, uniform_gamma(*rho, *beta, n)).ok()),
            _ => self.rows.get(n).copied(),
        }
    }

    /// `inf` of the pseudohyperbolic distance from `z` to the zeros of the
    /// product, with the nearest zero.
    pub fn nearest_zero(&self, z: &Point<T>) -> (T, Point<T>) {
        let y = z.im();
        let mut best = (T::infinity(), *z);
        let visit = |row: &RowSpec<T>, best: &mut (T, Point<T>)| {
            let k = row.nearest_index(z.re());
            for kk in [k - 1, k, k + 1] {
                let w = row.zero(kk);
                let d = pseudo_dist(z, &w).expect("same chart");
                if d < best.0 {
                    *best = (d, w);
                }
            }
        };
        // pseudo_dist to any zero at height h is at least |y - h|/(y + h)
        let height_bound = |h: T| (y - h).abs() / (y + h);
        match &self.kind {
            StackKind::UniformStack { alpha, beta, rho, .. } => {
                // rows are ordered by increasing height α/(ρβⁿ)
                let centre = ((*rho * y / *alpha).ln() / beta.recip().ln()).round().max(T::zero());
                let centre = centre.to_usize().unwrap_or(0).min(MAX_ROWS);
                let mut n = centre;
                loop {
                    let row = self.row(n).expect("uniform rows exist");
                    if height_bound(row.height()) >= best.0 && row.height() > y {
                        break;
                    }
                    visit(&row, &mut best);
                    n += 1;
                    if n > MAX_ROWS {
                        break;
                    }
                }
                for n in (0..centre).rev() {
                    let row = self.row(n).expect("uniform rows exist");
                    if height_bound(row.height()) >= best.0 && row.height() < y {
                        break;
                    }
                    visit(&row, &mut best);
                }
            }
            _ => {
                for row in &self.rows {
                    if height_bound(row.height()) < best.0 {
                        visit(row, &mut best);
                    }
                }
            }
        }
        best
    }

    /// Certified `log |B(z)|`, including the omitted tail of an infinite stack.
    pub fn log_modulus(&self, z: &Point<T>, tol: T) -> Result<CertifiedLog<T>> {
        if !(tol > T::zero()) {
            return Err(domain(format!("tolerance must be positive, got {tol}")));
        }
        if z.chart() != Chart::HalfPlane {
            return Err(Error::ChartMismatch(
                "products are evaluated in the half-plane chart".into(),
            ));
        }
        let slack_unit = T::epsilon() * T::lit(8.0);
        let mut sum = CompensatedSum::new();
        let mut slack = T::zero();
        let add = |l: T, sum: &mut CompensatedSum<T>, slack: &mut T| {
            sum.add(l);
            *slack = *slack + slack_unit * (T::one() + l.abs());
        };
        match &self.kind {
            StackKind::UniformStack { alpha, beta, rho, .. } => {
                let (alpha, beta, rho) = (*alpha, *beta, *rho);
                let pi = T::PI();
                let y = z.im();
                let q = (-pi * alpha).exp();
                let mut n = 0usize;
                let tail = loop {
                    let row = self.row(n).expect("uniform rows exist");
                    let l = row_log_modulus(&row, z)?;
                    if l == T::neg_infinity() {
                        return Ok(CertifiedLog { lo: l, hi: l });
                    }
                    add(l, &mut sum, &mut slack);
                    let g_next = uniform_gamma(rho, beta, n + 1);
                    if g_next * y < alpha {
                        let p_star = (-pi * g_next * y).exp();
                        let bound = (T::one() + q) * pi * y * g_next / ((p_star - q) * (T::one() - beta));
                        if bound.is_finite() && bound <= tol {
                            break bound * (T::one() + T::lit(1e-6));
                        }
                    }
                    n += 1;
                    if n > MAX_ROWS {
                        return Err(Error::Internal(format!("tail bound not reached after {MAX_ROWS} rows")));
                    }
                };
                let l = sum.value();
                Ok(CertifiedLog {
                    lo: l - tail - slack,
                    hi: (l + slack).min(T::zero()),
                })
            }
            _ => {
                for row in &self.rows {
                    let l = row_log_modulus(row, z)?;
                    if l == T::neg_infinity() {
                        return Ok(CertifiedLog { lo: l, hi: l });
                    }
                    add(l, &mut sum, &mut slack);
                }
                let l = sum.value();
                Ok(CertifiedLog {
                    lo: l - slack,
                    hi: (l + slack).min(T::zero()),
                })
            }
        }
    }
}

fn uniform_gamma<T: Real>(rho: T, beta: T, n: usize) -> T {
    rho * beta.powi(n as i32)
}

/// Certified `|B(z)|` for a stacked product.
pub fn product_modulus<T: Real>(spec: &ProductSpec<T>, z: &Point<T>, tol: T) -> Result<CertifiedValue<T>> {
    Ok(spec.log_modulus(z, tol)?.exp())
}

/// Certified `log ∏ |b_v(z)|` over an explicit finite zero list.
pub fn finite_log_modulus<T: Real>(zeros: &[Point<T>], z: &Point<T>) -> Result<CertifiedLog<T>> {
    let slack_unit = T::epsilon() * T::lit(8.0);
    let mut sum = CompensatedSum::new();
    let mut slack = T::zero();
    for v in zeros {
        let l = log_blaschke_factor(z, v)?;
        if l == T::neg_infinity() {
            return Ok(CertifiedLog { lo: l, hi: l });
        }
        sum.add(l);
        slack = slack + slack_unit * (T::one() + l.abs());
    }
    let l = sum.value();
    Ok(CertifiedLog {
        lo: l - slack,
        hi: (l + slack).min(T::zero()),
    })
}

/// Certified `∏ |b_v(z)|` over an explicit finite zero list (empty list gives 1).
pub fn finite_product_modulus<T: Real>(zeros: &[Point<T>], z: &Point<T>) -> Result<CertifiedValue<T>> {
    Ok(finite_log_modulus(zeros, z)?.exp())
}

/// Complex value of `∏ (z - v)/(z - v̄)` (half-plane factors, no unimodular normalisation).
pub fn finite_product_value<T: Real>(zeros: &[Point<T>], z: &Point<T>) -> Result<Complex<T>> {
    let zc = z.to_complex();
    let mut acc = Complex::new(T::one(), T::zero());
    for v in zeros {
        if v.chart() != z.chart() || z.chart() != Chart::HalfPlane {
            return Err(Error::ChartMismatch("half-plane factors only".into()));
        }
        let vc = v.to_complex();
        let f = (zc - vc) / (zc - vc.conj());
        acc = acc * f;
    }
    Ok(acc)
}

/// Lower estimate for the uniform stack in the strip below its first row,
/// `exp{-(1 + e^{-πα})πρy / ((e^{-πρy} - e^{-πα})(1 - β))}`.
///
/// Accepts `0 < y ≤ 0.999 α/ρ`; the bound degenerates at the strip top.
pub fn lemma4_lower_bound<T: Real>(alpha: T, beta: T, rho: T, y: T) -> Result<T> {
    check_stack_params(alpha, beta, rho)?;
    if !(y > T::zero() && y <= T::lit(0.999) * alpha / rho) {
        return Err(domain(format!("lower estimate needs 0 < y ≤ 0.999·α/ρ, got y = {y}")));
    }
    let pi = T::PI();
    let q = (-pi * alpha).exp();
    let p = (-pi * rho * y).exp();
    Ok((-(T::one() + q) * pi * rho * y / ((p - q) * (T::one() - beta))).exp())
}

/// Upper estimate above the first row, `(cosh πα)^{-N}` with `N = log(ρy/α)/log(1/β)`.
pub fn lemma4_upper_bound<T: Real>(alpha: T, beta: T, rho: T, y: T) -> Result<T> {
    check_stack_params(alpha, beta, rho)?;
    if !(y > alpha / rho) {
        return Err(domain(format!("upper estimate needs y > α/ρ, got y = {y}")));
    }
    let n = (rho * y / alpha).ln() / beta.recip().ln();
    Ok((-(T::PI() * alpha).cosh().ln() * n).exp())
}

fn check_stack_params<T: Real>(alpha: T, beta: T, rho: T) -> Result<()> {
    if !(alpha > T::zero() && rho > T::zero() && beta > T::zero() && beta < T::one()) {
        return Err(domain(format!(
            "need α > 0, ρ > 0, 0 < β < 1; got α = {alpha}, β = {beta}, ρ = {rho}"
        )));
    }
    Ok(())
}

/// `πα / sinh(πα)`: the value of `B_{α,γ}/b_{z_k}` at `z_k`.
pub fn interpolation_constant<T: Real>(alpha: T) -> Result<T> {
    if !(alpha > T::zero() && alpha.is_finite()) {
        return Err(domain(format!("α must be positive, got {alpha}")));
    }
    let x = T::PI() * alpha;
    Ok(x / x.sinh())
}
