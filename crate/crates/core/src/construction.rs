//! Zero sets with a prescribed threshold: the uniform stack and the adaptive
//! level-by-level stack together with its witness product `f = ∏ b_{v_n}`.

use std::cmp::Ordering;

use crate::blaschke::{
    CertifiedValue, ProductSpec, RowSpec, StackKind, beta_of, finite_log_modulus, strip_bottom_factor,
    strip_top_factor, threshold_of,
};
use crate::error::{Error, Result, domain};
use crate::geometry::{Point, pseudo_dist};
use crate::scalar::Real;

/// Largest row count tried for one adaptive level.
pub const MAX_ROWS_PER_LEVEL: u64 = 1 << 20;

/// One level of the adaptive stack: `m_n` rows `B_{α_n, β_n^m ρ_n}`, `0 ≤ m < m_n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveLevel<T> {
    pub n: usize,
    pub alpha_n: T,
    pub beta_n: T,
    pub rho_n: T,
    pub m_n: u64,
}

impl<T: Real> AdaptiveLevel<T> {
    pub fn row_gamma(&self, m: u64) -> T {
        self.rho_n * self.beta_n.powi(m as i32)
    }

    /// The zero `(1 + iα_n)/(ρ_n β_n^m)` nearest to the imaginary axis in row `m`.
    pub fn axis_zero(&self, m: u64) -> Point<T> {
        RowSpec::new(self.alpha_n, self.row_gamma(m))
            .expect("valid level")
            .zero(0)
    }
}

/// Witness points `v_n` on the imaginary axis and the zeros of `f`.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessSet<T> {
    pub v: Vec<Point<T>>,
    pub f_zeros: Vec<Point<T>>,
}

impl<T: Real> WitnessSet<T> {
    fn full(v: Vec<Point<T>>) -> Self {
        Self { f_zeros: v.clone(), v }
    }
}

/// Threshold `δ₁ = 1/√(1+2α²)` with its parameter `α`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdTarget<T> {
    delta1: T,
    alpha: T,
}

impl<T: Real> ThresholdTarget<T> {
    pub fn from_delta1(delta1: T) -> Result<Self> {
        if !(delta1 > T::zero() && delta1 < T::one()) {
            return Err(domain(format!("δ₁ must lie in (0, 1), got {delta1}")));
        }
        // (1/δ² - 1)/2 = (1 - δ)(1 + δ)/(2δ²)
        let alpha = ((T::one() - delta1) * (T::one() + delta1) / (T::lit(2.0) * delta1 * delta1)).sqrt();
        Ok(Self { delta1, alpha })
    }

    pub fn from_alpha(alpha: T) -> Result<Self> {
        if !(alpha > T::zero() && alpha.is_finite()) {
            return Err(domain(format!("α must be positive, got {alpha}")));
        }
        Ok(Self {
            delta1: threshold_of(alpha),
            alpha,
        })
    }

    pub fn delta1(&self) -> T {
        self.delta1
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }
}

/// Increasing sequence `α_1 < α_2 < …` with limit the target `α`.
#[derive(Clone, Debug, PartialEq)]
pub enum AlphaSchedule<T> {
    /// `α_n = α·n/(n+1)`.
    Harmonic,
    /// Explicit `α_1, α_2, …`; needs at least `n_levels + 1` entries.
    Explicit(Vec<T>),
}

impl<T: Real> AlphaSchedule<T> {
    fn values(&self, alpha: T, count: usize) -> Result<Vec<T>> {
        let vals: Vec<T> = match self {
            Self::Harmonic => (1..=count)
                .map(|n| alpha * T::from_usize_lossy(n) / T::from_usize_lossy(n + 1))
                .collect(),
            Self::Explicit(v) => {
                if v.len() < count {
                    return Err(domain(format!("schedule has {} entries, {count} needed", v.len())));
                }
                v[..count].to_vec()
            }
        };
        for (i, &a) in vals.iter().enumerate() {
            if !(a > T::zero() && a <= alpha) {
                return Err(domain(format!("schedule entry α_{} = {a} outside (0, α]", i + 1)));
            }
            if i > 0 && !(a > vals[i - 1]) {
                return Err(domain("schedule must be strictly increasing"));
            }
        }
        Ok(vals)
    }
}

/// The uniform stack `∏_{n≥0} B_{α, βⁿρ}` and its witness points
/// `v_n = i·α√(1+α²)/((√(1+α²)+1)ρβⁿ)`, `0 ≤ n < n_levels`.
pub fn uniform_stack<T: Real>(alpha: T, rho: T, n_levels: usize) -> Result<(ProductSpec<T>, WitnessSet<T>)> {
    let spec = ProductSpec::uniform(alpha, rho, n_levels)?;
    let w = witness_points(&spec)?;
    Ok((spec, WitnessSet::full(w)))
}

/// Witness points implied by the stack layout.
pub fn witness_points<T: Real>(spec: &ProductSpec<T>) -> Result<Vec<Point<T>>> {
    match spec.kind() {
        StackKind::UniformStack { alpha, n_levels, .. } => (0..*n_levels)
            .map(|n| Point::imaginary(strip_bottom_factor(*alpha) / spec.row(n).expect("row").gamma()))
            .collect(),
        StackKind::Adaptive { levels, .. } => {
            let first = levels.first().ok_or_else(|| domain("adaptive stack has no levels"))?;
            let mut v = vec![Point::imaginary(strip_bottom_factor(first.alpha_n) / first.rho_n)?];
            for l in levels {
                v.push(adaptive_witness(l.alpha_n, l.rho_n, l.beta_n, l.m_n)?);
            }
            Ok(v)
        }
        StackKind::Explicit => Err(domain("explicit row lists carry no witness points")),
    }
}

/// Threshold `δ₁` the stack is built for.
pub fn spec_threshold<T: Real>(spec: &ProductSpec<T>) -> Result<T> {
    match spec.kind() {
        StackKind::UniformStack { alpha, .. } | StackKind::Adaptive { alpha, .. } => Ok(threshold_of(*alpha)),
        StackKind::Explicit => Err(domain("explicit row lists have no designed threshold")),
    }
}

fn adaptive_witness<T: Real>(alpha_n: T, rho_n: T, beta_n: T, m_n: u64) -> Result<Point<T>> {
    Point::imaginary(strip_top_factor(alpha_n) / (rho_n * beta_n.powi(m_n as i32 - 1)))
}

/// Lower end of `pseudo_dist` after a few ulps of rounding.
fn certified_dist<T: Real>(z: &Point<T>, w: &Point<T>) -> T {
    pseudo_dist(z, w).expect("same chart") * (T::one() - T::lit(16.0) * T::epsilon())
}

/// Which inductive condition failed.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Dist { l: usize, k: usize },
    Dop1,
    Dop2,
    TwoTerms { m: u64 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Dist { l, k } => write!(f, "dist(l={l}, k={k})"),
            Self::Dop1 => write!(f, "dop1"),
            Self::Dop2 => write!(f, "dop2"),
            Self::TwoTerms { m } => write!(f, "2terms(m={m})"),
        }
    }
}

/// Inputs for checking one candidate `m_n`.
struct LevelProblem<'a, T> {
    n: usize,
    delta: T,
    delta1: T,
    alphas: &'a [T],
    alpha_n: T,
    beta_n: T,
    rho_n: T,
    previous: &'a [Point<T>],
}

impl<T: Real> LevelProblem<'_, T> {
    /// `δ√(1+2α_j²)` for `j ≥ 1`.
    fn base(&self, j: usize) -> T {
        let a = self.alphas[j - 1];
        self.delta * (T::one() + T::lit(2.0) * a * a).sqrt()
    }

    fn level_bound(&self) -> T {
        let c = self.delta1 * (T::one() + T::lit(2.0) * self.alpha_n * self.alpha_n).sqrt();
        c.powf(T::lit(3.0) * T::lit(2.0).powi(-(self.n as i32)))
    }

    fn first_violation(&self, m: u64) -> Result<Option<Violation>> {
        let vn = adaptive_witness(self.alpha_n, self.rho_n, self.beta_n, m)?;
        let n = self.n;
        let point = |j: usize| if j == n { vn } else { self.previous[j] };
        for other in 0..n {
            for (l, k) in [(other, n), (n, other)] {
                let rhs = self.base(l + 1).powf(T::lit(2.0).powi(-(k as i32)));
                if certified_dist(&point(l), &point(k)) < rhs {
                    return Ok(Some(Violation::Dist { l, k }));
                }
            }
        }
        let level = AdaptiveLevel {
            n,
            alpha_n: self.alpha_n,
            beta_n: self.beta_n,
            rho_n: self.rho_n,
            m_n: m,
        };
        let bound = self.level_bound();
        if certified_dist(&level.axis_zero(0), &vn) < bound {
            return Ok(Some(Violation::Dop1));
        }
        let below = self.previous[n - 1];
        if certified_dist(&level.axis_zero(m - 1), &below) < bound {
            return Ok(Some(Violation::Dop2));
        }
        let two = bound / (T::one() + T::lit(2.0) * self.alpha_n * self.alpha_n).sqrt();
        for mm in 0..m {
            let lam = level.axis_zero(mm);
            if certified_dist(&lam, &below) * certified_dist(&lam, &vn) < two {
                return Ok(Some(Violation::TwoTerms { m: mm }));
            }
        }
        Ok(None)
    }
}

/// Options for [`adaptive_construction_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveOptions<T> {
    pub schedule: AlphaSchedule<T>,
    /// `δ` used in the separation condition; defaults to the target `δ₁`.
    pub dist_delta: Option<T>,
}

impl<T: Real> Default for AdaptiveOptions<T> {
    fn default() -> Self {
        Self {
            schedule: AlphaSchedule::Harmonic,
            dist_delta: None,
        }
    }
}

/// Adaptive stack with the harmonic schedule `α_n = α·n/(n+1)`.
pub fn adaptive_construction<T: Real>(
    target: ThresholdTarget<T>,
    rho: T,
    n_levels: usize,
) -> Result<(ProductSpec<T>, WitnessSet<T>)> {
    adaptive_construction_with(target, rho, n_levels, &AdaptiveOptions::default())
}

/// Builds levels `1..=n_levels`; `m_n` is the least row count (doubling, then
/// bisection) for which every inductive condition holds.
pub fn adaptive_construction_with<T: Real>(
    target: ThresholdTarget<T>,
    rho: T,
    n_levels: usize,
    opts: &AdaptiveOptions<T>,
) -> Result<(ProductSpec<T>, WitnessSet<T>)> {
    if n_levels < 1 {
        return Err(domain("adaptive stack needs at least one level"));
    }
    if !(rho > T::zero() && rho.is_finite()) {
        return Err(domain(format!("ρ must be positive, got {rho}")));
    }
    let alphas = opts.schedule.values(target.alpha(), n_levels + 1)?;
    let delta = opts.dist_delta.unwrap_or(target.delta1());
    let mut rho_n = rho;
    let mut v = vec![Point::imaginary(strip_bottom_factor(alphas[0]) / rho)?];
    let mut levels = Vec::with_capacity(n_levels);
    for n in 1..=n_levels {
        let alpha_n = alphas[n - 1];
        let beta_n = beta_of(alpha_n);
        let problem = LevelProblem {
            n,
            delta,
            delta1: target.delta1(),
            alphas: &alphas,
            alpha_n,
            beta_n,
            rho_n,
            previous: &v,
        };
        let m_n = search_rows(&problem)?;
        let level = AdaptiveLevel {
            n,
            alpha_n,
            beta_n,
            rho_n,
            m_n,
        };
        v.push(adaptive_witness(alpha_n, rho_n, beta_n, m_n)?);
        levels.push(level);
        // the next level's first strip starts where this level's last strip ends
        let a_next = alphas[n];
        rho_n = rho_n * beta_n.powi(m_n as i32) / strip_bottom_factor(alpha_n) * strip_bottom_factor(a_next);
    }
    let spec = ProductSpec::adaptive(target.alpha(), levels)?;
    Ok((spec, WitnessSet::full(v)))
}

fn search_rows<T: Real>(p: &LevelProblem<'_, T>) -> Result<u64> {
    let mut lo = 0u64; // m = 0 is never admissible
    let mut hi = 1u64;
    let mut last = String::new();
    loop {
        let fail = |condition: String, m: u64| Error::ConstructionFailure {
            level: p.n,
            m,
            condition,
        };
        match p.first_violation(hi) {
            Ok(None) => break,
            Ok(Some(viol)) => last = viol.to_string(),
            // the witness point left the representable range before the conditions were met
            Err(_) => return Err(fail(format!("{last} (witness point overflows)"), hi)),
        }
        lo = hi;
        hi *= 2;
        if hi > MAX_ROWS_PER_LEVEL {
            return Err(fail(last, lo));
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if p.first_violation(mid)?.is_none() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Re-evaluates every inductive condition of a finished adaptive stack.
///
/// Returns, per level, the first violated condition at the constructed `m_n`
/// and at `m_n - 1` (the latter is `None` only if `m_n - 1` is admissible).
pub fn recheck_levels<T: Real>(
    target: ThresholdTarget<T>,
    spec: &ProductSpec<T>,
    opts: &AdaptiveOptions<T>,
) -> Result<Vec<(Option<Violation>, Option<Violation>)>> {
    let StackKind::Adaptive { levels, .. } = spec.kind() else {
        return Err(domain("not an adaptive stack"));
    };
    let alphas = opts.schedule.values(target.alpha(), levels.len() + 1)?;
    let delta = opts.dist_delta.unwrap_or(target.delta1());
    let v = witness_points(spec)?;
    let mut out = Vec::new();
    for l in levels {
        let p = LevelProblem {
            n: l.n,
            delta,
            delta1: target.delta1(),
            alphas: &alphas,
            alpha_n: l.alpha_n,
            beta_n: l.beta_n,
            rho_n: l.rho_n,
            previous: &v[..l.n],
        };
        let at = p.first_violation(l.m_n)?;
        let below = if l.m_n > 1 {
            p.first_violation(l.m_n - 1)?
        } else {
            Some(Violation::Dop2)
        };
        out.push((at, below));
    }
    Ok(out)
}

/// Both sides of `∏_{k<n-1} |b_{v_k}(v_{n-1})| ≥ ∏_{k<n-1} (δ√(1+2α_n²))^{2^{-k}}`
/// for each level `n ≥ 2`, as `(n, lhs, rhs)`.
pub fn chain_inequality<T: Real>(
    target: ThresholdTarget<T>,
    spec: &ProductSpec<T>,
    opts: &AdaptiveOptions<T>,
) -> Result<Vec<(usize, T, T)>> {
    let StackKind::Adaptive { levels, .. } = spec.kind() else {
        return Err(domain("not an adaptive stack"));
    };
    let alphas = opts.schedule.values(target.alpha(), levels.len() + 1)?;
    let delta = opts.dist_delta.unwrap_or(target.delta1());
    let v = witness_points(spec)?;
    let mut out = Vec::new();
    for n in 2..=levels.len() {
        let a = alphas[n - 1];
        let base = delta * (T::one() + T::lit(2.0) * a * a).sqrt();
        let mut lhs = T::one();
        let mut rhs = T::one();
        for k in 0..n - 1 {
            lhs = lhs * certified_dist(&v[k], &v[n - 1]);
            rhs = rhs * base.powf(T::lit(2.0).powi(-(k as i32)));
        }
        out.push((n, lhs, rhs));
    }
    Ok(out)
}

/// `φ_a(t) = |b_{ia}((1 + iα_n)t)|² = ((a - α_n t)² + t²)/((a + α_n t)² + t²)`.
pub fn phi<T: Real>(a: T, alpha_n: T, t: T) -> T {
    let u = a - alpha_n * t;
    let w = a + alpha_n * t;
    (u * u + t * t) / (w * w + t * t)
}

/// Whether `min_t φ_a(t)φ_b(t)` over `t_list` sits at its first or last entry.
pub fn phi_product_is_edge_min<T: Real>(a: T, b: T, alpha_n: T, t_list: &[T]) -> bool {
    let vals: Vec<T> = t_list
        .iter()
        .map(|&t| phi(a, alpha_n, t) * phi(b, alpha_n, t))
        .collect();
    let Some(min) = vals.iter().copied().reduce(T::min) else {
        return false;
    };
    vals[0] == min || vals[vals.len() - 1] == min
}

/// Axis zeros of every constructed row: the zero with `k = 0` per row.
///
/// By the reflection `x ↦ -x` and the monotonicity of the distance to
/// imaginary-axis points in `|Re|`, these are where `|f|` is smallest on
/// each row.
pub fn axis_zeros<T: Real>(spec: &ProductSpec<T>) -> Vec<Point<T>> {
    spec.rows().iter().map(|r| r.zero(0)).collect()
}

/// Certified `min |f(λ)|` over all constructed zeros, `f = ∏_{w ∈ zeros} b_w`.
pub fn witness_min_on_zeros<T: Real>(spec: &ProductSpec<T>, f_zeros: &[Point<T>]) -> Result<CertifiedValue<T>> {
    let mut lo = T::infinity();
    let mut hi = T::infinity();
    for lam in axis_zeros(spec) {
        let c = finite_log_modulus(f_zeros, &lam)?.exp();
        lo = lo.min(c.lo);
        hi = hi.min(c.hi);
    }
    Ok(CertifiedValue { lo, hi })
}

/// Greedy thinning of the witness points: `v_n` is kept iff the product over
/// the kept points stays `≥ delta` at every constructed zero.
pub fn sparse_witness_product<T: Real>(spec: &ProductSpec<T>, delta: T) -> Result<WitnessSet<T>> {
    let delta1 = spec_threshold(spec)?;
    if !(delta > T::zero() && delta < delta1) {
        return Err(domain(format!("δ must lie in (0, {delta1}), got {delta}")));
    }
    let v = witness_points(spec)?;
    let zeros = axis_zeros(spec);
    let mut logs = vec![T::zero(); zeros.len()];
    let log_delta = delta.ln();
    let mut kept = Vec::new();
    for w in &v {
        let trial: Vec<T> = zeros
            .iter()
            .zip(&logs)
            .map(|(lam, acc)| {
                let d = certified_dist(lam, w);
                *acc + d.ln()
            })
            .collect();
        if trial.iter().all(|&l| l >= log_delta) {
            logs = trial;
            kept.push(*w);
        }
    }
    Ok(WitnessSet { v, f_zeros: kept })
}

/// One materialised zero of a stack.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroEntry<T> {
    pub level: usize,
    pub row: usize,
    pub k: i64,
    pub point: Point<T>,
}

/// Zeros with `-K ≤ k < K` in every constructed row, ordered level by level;
/// within a level by `|Re|`, then positive real part first, then height.
pub fn enumerate_zeros<T: Real>(spec: &ProductSpec<T>, zeros_per_side: usize) -> Result<Vec<ZeroEntry<T>>> {
    if zeros_per_side == 0 {
        return Err(domain("need at least one zero per side"));
    }
    let kk = zeros_per_side as i64;
    let mut out = Vec::new();
    for (level, range) in spec.level_ranges().into_iter().enumerate() {
        let mut block = Vec::new();
        for row_idx in range {
            let row = spec.rows()[row_idx];
            for k in -kk..kk {
                block.push(ZeroEntry {
                    level,
                    row: row_idx,
                    k,
                    point: row.zero(k),
                });
            }
        }
        block.sort_by(|a, b| zero_order(&a.point, &b.point));
        out.extend(block);
    }
    Ok(out)
}

fn zero_order<T: Real>(a: &Point<T>, b: &Point<T>) -> Ordering {
    let key = |p: &Point<T>| (p.re().abs(), if p.re() > T::zero() { 0u8 } else { 1u8 }, p.im());
    let (a0, a1, a2) = key(a);
    let (b0, b1, b2) = key(b);
    a0.partial_cmp(&b0)
        .unwrap_or(Ordering::Equal)
        .then(a1.cmp(&b1))
        .then(a2.partial_cmp(&b2).unwrap_or(Ordering::Equal))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_stack_closed_forms() {
        let (spec, w) = uniform_stack(1.0f64, 1.0, 5).unwrap();
        let StackKind::UniformStack { beta, .. } = spec.kind() else {
            panic!()
        };
        assert!((*beta - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!((w.v[0].im() - 2f64.sqrt() / (2f64.sqrt() + 1.0)).abs() < 1e-15);
        let d1 = 1.0 / 3f64.sqrt();
        for (n, v) in w.v.iter().enumerate() {
            let r = spec.row(n).unwrap();
            let mut near = vec![r.zero(0), r.zero(-1)];
            if n > 0 {
                let r = spec.row(n - 1).unwrap();
                near.extend([r.zero(0), r.zero(-1)]);
            }
            for z in near {
                let d = pseudo_dist(v, &z).unwrap();
                assert!((d - d1).abs() < 1e-13, "n={n} d={d}");
            }
            assert!((spec.nearest_zero(v).0 - d1).abs() < 1e-13);
        }
    }

    #[test]
    fn strips_abut() {
        for a in [0.1f64, 0.5, 1.0, 2.0, 7.5] {
            let (spec, _) = uniform_stack(a, 1.3, 6).unwrap();
            for n in 1..6 {
                let top = spec.rows()[n - 1].strip().1;
                let bot = spec.rows()[n].strip().0;
                assert!((top - bot).abs() <= 1e-13 * top, "α={a} n={n}");
            }
        }
    }

    #[test]
    fn threshold_round_trip() {
        for d in [0.01, 0.3, 1.0 / 3f64.sqrt(), 0.9, 0.999] {
            let t = ThresholdTarget::from_delta1(d).unwrap();
            let back = ThresholdTarget::from_alpha(t.alpha()).unwrap();
            assert!((back.delta1() - d).abs() < 1e-14);
        }
        let t = ThresholdTarget::from_delta1(1.0 / 3f64.sqrt()).unwrap();
        assert!((t.alpha() - 1.0).abs() < 1e-14);
        assert!(ThresholdTarget::from_delta1(1.0f64).is_err());
        assert!(ThresholdTarget::from_delta1(0.0f64).is_err());
    }

    #[test]
    fn adaptive_unit_target() {
        let t = ThresholdTarget::from_alpha(1.0f64).unwrap();
        let (spec, w) = adaptive_construction(t, 1.0, 4).unwrap();
        let StackKind::Adaptive { levels, .. } = spec.kind() else {
            panic!()
        };
        let ms: Vec<u64> = levels.iter().map(|l| l.m_n).collect();
        assert_eq!(ms, vec![1, 2, 3, 3]);
        let ims: Vec<f64> = w.v.iter().map(|p| p.im()).collect();
        for (got, want) in ims.iter().zip([0.263_932, 4.736_068, 563.55, 410_829.6, 2.205e8]) {
            assert!((got / want - 1.0).abs() < 1e-4, "{got} vs {want}");
        }
        for pair in w.v.windows(2) {
            assert!(pair[1].im() > pair[0].im());
        }
        let fmin = witness_min_on_zeros(&spec, &w.f_zeros).unwrap();
        assert!(fmin.lo >= t.delta1() - 1e-9, "{fmin:?}");
    }

    #[test]
    fn adaptive_levels_abut() {
        let t = ThresholdTarget::from_alpha(1.0f64).unwrap();
        let (spec, _) = adaptive_construction(t, 1.0, 4).unwrap();
        let ranges = spec.level_ranges();
        for pair in ranges.windows(2) {
            let top = spec.rows()[pair[0].end - 1].strip().1;
            let bot = spec.rows()[pair[1].start].strip().0;
            assert!((top - bot).abs() <= 1e-12 * top);
        }
    }

    #[test]
    fn bad_schedule_rejected() {
        let t = ThresholdTarget::from_alpha(1.0f64).unwrap();
        let opts = AdaptiveOptions {
            schedule: AlphaSchedule::Explicit(vec![0.5, 0.4, 0.9]),
            dist_delta: None,
        };
        assert!(adaptive_construction_with(t, 1.0, 2, &opts).is_err());
        let opts = AdaptiveOptions {
            schedule: AlphaSchedule::Explicit(vec![0.5, 0.6]),
            dist_delta: None,
        };
        assert!(adaptive_construction_with(t, 1.0, 2, &opts).is_err());
    }

    #[test]
    fn impossible_separation_reports_failure() {
        let t = ThresholdTarget::from_alpha(1.0f64).unwrap();
        // δ above one makes the separation condition unsatisfiable
        let opts = AdaptiveOptions {
            schedule: AlphaSchedule::Harmonic,
            dist_delta: Some(1.5),
        };
        match adaptive_construction_with(t, 1.0, 2, &opts) {
            Err(Error::ConstructionFailure { level, condition, .. }) => {
                assert_eq!(level, 1);
                assert!(condition.starts_with("dist"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn phi_shape() {
        let (a, an) = (2.0f64, 0.5f64);
        let t0 = a / (1.0 + an * an).sqrt();
        let h = 1e-5;
        assert!(phi(a, an, t0 - h) > phi(a, an, t0));
        assert!(phi(a, an, t0 + h) > phi(a, an, t0));
        assert!((phi(a, an, 1e8 * a) - 1.0).abs() < 1e-6);
        assert!(phi_product_is_edge_min(1.0, 1000.0, 0.5, &[2.0, 3.0, 5.0]));
        assert!(!phi_product_is_edge_min(1.0, 1000.0, 0.5, &[0.1, 1.0, 50.0]));
    }

    #[test]
    fn zero_enumeration_order() {
        let (spec, _) = uniform_stack(1.0f64, 1.0, 2).unwrap();
        let z = enumerate_zeros(&spec, 2).unwrap();
        assert_eq!(z.len(), 8);
        let first: Vec<(f64, f64)> = z[..4].iter().map(|e| (e.point.re(), e.point.im())).collect();
        assert_eq!(first, vec![(1.0, 1.0), (-1.0, 1.0), (3.0, 1.0), (-3.0, 1.0)]);
        assert!(z[4..].iter().all(|e| e.level == 1));
    }
}
