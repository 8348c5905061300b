//! Grid checks of the covering statements, the corona quantity
//! `η = inf (|f| + |B|)`, the closed-form `η(α, δ)` and the resulting bounds
//! on `c₁`, the weak-embedding sum, and the divergence witnesses `1/|B(v_n)| - 1`.
//!
//! Grid checks are evidence at the sampled points only; every report carries
//! its worst point and sampling resolution.

use rayon::prelude::*;

use crate::blaschke::{
    ProductSpec, RowSpec, StackKind, finite_log_modulus, lemma4_upper_bound, strip_bottom_factor, strip_top_factor,
    threshold_of,
};
use crate::construction::witness_points;
use crate::error::{Result, domain};
use crate::geometry::{Point, one_minus_dist_sq, pseudo_dist};
use crate::scalar::{CompensatedSum, Real};

/// Truncation tolerance used for certified products inside grid scans.
const SCAN_TOL: f64 = 1e-10;

/// Rectangular sampling region in the half-plane chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridRegion<T> {
    pub re_range: (T, T),
    pub im_range: (T, T),
    pub n_re: usize,
    pub n_im: usize,
    /// Log-spaced imaginary parts instead of uniform ones.
    pub log_im: bool,
}

impl<T: Real> GridRegion<T> {
    pub fn new(re_range: (T, T), im_range: (T, T), n_re: usize, n_im: usize, log_im: bool) -> Result<Self> {
        let g = Self {
            re_range,
            im_range,
            n_re,
            n_im,
            log_im,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if self.n_re < 2 || self.n_im < 2 {
            return Err(domain(format!(
                "grid needs at least 2×2 points, got {}×{}",
                self.n_re, self.n_im
            )));
        }
        let finite = [self.re_range.0, self.re_range.1, self.im_range.0, self.im_range.1]
            .iter()
            .all(|x| x.is_finite());
        if !finite || self.re_range.0 > self.re_range.1 || self.im_range.0 > self.im_range.1 {
            return Err(domain("grid ranges must be finite and ordered"));
        }
        if !(self.im_range.0 > T::zero()) {
            return Err(domain(format!("grid must stay in Im z > 0, got {}", self.im_range.0)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n_re * self.n_im
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coord(lo: T, hi: T, k: usize, n: usize, log: bool) -> T {
        let t = T::from_usize_lossy(k) / T::from_usize_lossy(n - 1);
        if k == n - 1 {
            return hi;
        }
        if log {
            (lo.ln() + (hi.ln() - lo.ln()) * t).exp()
        } else {
            lo + (hi - lo) * t
        }
    }

    /// Point number `idx` in row-major order (real part outer).
    pub fn point(&self, idx: usize) -> Point<T> {
        let (a, b) = (idx / self.n_im, idx % self.n_im);
        let re = Self::coord(self.re_range.0, self.re_range.1, a, self.n_re, false);
        let im = Self::coord(self.im_range.0, self.im_range.1, b, self.n_im, self.log_im);
        Point::half_plane(re, im).expect("validated grid")
    }

    pub fn points(&self) -> Vec<Point<T>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Largest spacing in each direction.
    pub fn resolution(&self) -> (T, T) {
        let n = |k: usize| T::from_usize_lossy(k - 1);
        let dx = (self.re_range.1 - self.re_range.0) / n(self.n_re);
        let dy = if self.log_im {
            let r = (self.im_range.1 / self.im_range.0).powf(n(self.n_im).recip());
            self.im_range.1 * (T::one() - r.recip())
        } else {
            (self.im_range.1 - self.im_range.0) / n(self.n_im)
        };
        (dx, dy)
    }
}

/// Grid shape used per strip by the covering checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StripGrid {
    pub n_re: usize,
    pub n_im: usize,
    pub log_im: bool,
}

/// One sampled point of a covering check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoverSample<T> {
    pub point: Point<T>,
    /// `inf` over zeros of the pseudohyperbolic distance.
    pub min_dist: T,
}

/// Outcome of a covering check.
#[derive(Clone, Debug, PartialEq)]
pub struct CoveringReport<T> {
    pub epsilon: T,
    pub pass: bool,
    /// `max` over samples of the distance to the nearest zero.
    pub max_min_dist: T,
    pub worst: Point<T>,
    pub n_samples: usize,
    /// Worst spacing `(Δ Re, Δ Im)` over the sampled strips.
    pub resolution: (T, T),
    /// Samples with `min_dist ≥ ε`, capped at [`CoveringReport::MAX_FAILING`].
    pub failing: Vec<CoverSample<T>>,
    pub n_failing: usize,
}

impl<T: Real> CoveringReport<T> {
    pub const MAX_FAILING: usize = 10_000;
}

/// Sampling region for a row's covered strip over one period `0 ≤ Re z ≤ 2/γ`.
pub fn strip_region<T: Real>(row: &RowSpec<T>, grid: StripGrid) -> Result<GridRegion<T>> {
    let (bot, top) = row.strip();
    GridRegion::new(
        (T::zero(), T::lit(2.0) / row.gamma()),
        (bot, top),
        grid.n_re,
        grid.n_im,
        grid.log_im,
    )
}

fn scan<T: Real>(regions: &[GridRegion<T>], epsilon: T, dist: impl Fn(&Point<T>) -> T + Sync) -> CoveringReport<T> {
    let mut all: Vec<(Point<T>, T)> = Vec::new();
    let mut resolution = (T::zero(), T::zero());
    for g in regions {
        let part: Vec<(Point<T>, T)> = (0..g.len())
            .into_par_iter()
            .map(|i| {
                let p = g.point(i);
                (p, dist(&p))
            })
            .collect();
        all.extend(part);
        let r = g.resolution();
        resolution = (resolution.0.max(r.0), resolution.1.max(r.1));
    }
    // first maximal sample in enumeration order
    let (mut worst, mut max) = (all[0].0, all[0].1);
    for &(p, d) in &all {
        if d > max {
            max = d;
            worst = p;
        }
    }
    let failing_iter = all.iter().filter(|(_, d)| *d >= epsilon);
    let n_failing = failing_iter.clone().count();
    let failing = failing_iter
        .take(CoveringReport::<T>::MAX_FAILING)
        .map(|&(point, min_dist)| CoverSample { point, min_dist })
        .collect();
    CoveringReport {
        epsilon,
        pass: max < epsilon,
        max_min_dist: max,
        worst,
        n_samples: all.len(),
        resolution,
        failing,
        n_failing,
    }
}

fn row_min_dist<T: Real>(row: &RowSpec<T>, z: &Point<T>) -> T {
    let k = row.nearest_index(z.re());
    [k - 1, k, k + 1]
        .into_iter()
        .map(|kk| pseudo_dist(z, &row.zero(kk)).expect("same chart"))
        .fold(T::infinity(), T::min)
}

/// Samples the covered strip of one row and checks that every sample lies
/// within pseudohyperbolic distance `< ε` of a zero of that row.
pub fn verify_strip_covering<T: Real>(row: &RowSpec<T>, epsilon: T, grid: StripGrid) -> Result<CoveringReport<T>> {
    let region = strip_region(row, grid)?;
    Ok(scan(&[region], epsilon, |z| row_min_dist(row, z)))
}

/// The points `(2m + i·s_±)/γ` where a row's distance function reaches the
/// threshold on the strip boundary, `s_± = α√(1+α²)/(√(1+α²) ± 1)`.
pub fn exceptional_points<T: Real>(row: &RowSpec<T>, m_lo: i64, m_hi: i64) -> Vec<Point<T>> {
    let mut out = Vec::new();
    for m in m_lo..=m_hi {
        let re = T::from_i64(2 * m).expect("index representable") / row.gamma();
        for s in [strip_bottom_factor(row.alpha()), strip_top_factor(row.alpha())] {
            out.extend(Point::half_plane(re, s / row.gamma()));
        }
    }
    out
}

/// Samples the strips of all constructed rows (each over one of its periods)
/// against the full zero set of the product.
pub fn verify_halfplane_covering<T: Real>(
    spec: &ProductSpec<T>,
    epsilon: T,
    grid: StripGrid,
) -> Result<CoveringReport<T>> {
    let regions = spec
        .rows()
        .iter()
        .map(|r| strip_region(r, grid))
        .collect::<Result<Vec<_>>>()?;
    if spec.rows().len() == 1 {
        let row = spec.rows()[0];
        return Ok(scan(&regions, epsilon, |z| row_min_dist(&row, z)));
    }
    Ok(scan(&regions, epsilon, |z| spec.nearest_zero(z).0))
}

/// Minimum of a grid scan together with where it occurred.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridMin<T> {
    pub value: T,
    pub argmin: Point<T>,
}

fn grid_min<T: Real>(
    points: &[Point<T>],
    f: impl Fn(&Point<T>) -> Result<Option<T>> + Sync,
) -> Result<Option<GridMin<T>>> {
    let vals: Vec<Option<T>> = points.par_iter().map(&f).collect::<Result<Vec<_>>>()?;
    let mut best: Option<GridMin<T>> = None;
    for (p, v) in points.iter().zip(vals) {
        if let Some(v) = v
            && best.is_none_or(|b| v < b.value)
        {
            best = Some(GridMin { value: v, argmin: *p });
        }
    }
    Ok(best)
}

/// `min` over the points of `|f|.lo + |B|.lo`, `f = ∏_{w ∈ f_zeros} b_w`.
pub fn corona_eta<T: Real>(f_zeros: &[Point<T>], spec: &ProductSpec<T>, points: &[Point<T>]) -> Result<GridMin<T>> {
    if points.is_empty() {
        return Err(domain("corona scan needs at least one point"));
    }
    let tol = T::lit(SCAN_TOL);
    let best = grid_min(points, |z| {
        let f = finite_log_modulus(f_zeros, z)?.exp();
        let b = spec.log_modulus(z, tol)?.exp();
        Ok(Some(f.lo + b.lo))
    })?;
    Ok(best.expect("non-empty"))
}

/// `(exp[-α√(1+α²)(e^{πα}+1)/(2(e^{πα/(√(1+α²)+1)}+1))], (δ-δ₁)/(1-δδ₁))`.
pub fn eta_terms<T: Real>(alpha: T, delta: T) -> Result<(T, T)> {
    if !(alpha > T::zero() && alpha.is_finite()) {
        return Err(domain(format!("α must be positive, got {alpha}")));
    }
    let d1 = threshold_of(alpha);
    if !(delta > d1 && delta <= T::one()) {
        return Err(domain(format!("δ must lie in ({d1}, 1], got {delta}")));
    }
    let pi = T::PI();
    let s = (T::one() + alpha * alpha).sqrt();
    let two = T::lit(2.0);
    let first = (-(alpha * s * (pi * alpha).exp() + alpha * s)
        / (two * ((pi * alpha / (s + T::one())).exp() + T::one())))
    .exp();
    let second = (delta - d1) / (T::one() - delta * d1);
    Ok((first, second))
}

/// `η(α, δ)`: the smaller of the two [`eta_terms`].
pub fn eta_formula<T: Real>(alpha: T, delta: T) -> Result<T> {
    let (a, b) = eta_terms(alpha, delta)?;
    Ok(a.min(b))
}

/// `c/η² · log(1/η)`.
pub fn c1_upper<T: Real>(eta: T, corona_c: T) -> Result<T> {
    if !(eta > T::zero() && eta < T::one()) {
        return Err(domain(format!("η must lie in (0, 1), got {eta}")));
    }
    if !(corona_c > T::zero()) {
        return Err(domain(format!("corona constant must be positive, got {corona_c}")));
    }
    Ok(corona_c / (eta * eta) * (-eta.ln()))
}

/// `max{c/(δ-δ₁)² · log 1/(δ-δ₁), C(δ₁)}` with `C(δ₁) = c1_upper(η(δ₁))`,
/// where `η(δ₁)` is the first of the [`eta_terms`].
pub fn main_c1_bound<T: Real>(alpha: T, delta: T, corona_c: T) -> Result<T> {
    let (first, _) = eta_terms(alpha, delta)?;
    let gap = delta - threshold_of(alpha);
    let near = c1_upper(gap.min(T::one() - T::epsilon()), corona_c)?;
    Ok(near.max(c1_upper(first, corona_c)?))
}

/// Two-sided estimate of `c₁(δ)`: `1/η ≤ c₁ ≤ c/η² · log 1/η`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct C1Estimate<T> {
    pub delta: T,
    pub eta: T,
    pub lower: T,
    pub upper: T,
    pub corona_c: T,
}

impl<T: Real> C1Estimate<T> {
    pub fn new(alpha: T, delta: T, corona_c: T) -> Result<Self> {
        let eta = eta_formula(alpha, delta)?;
        Ok(Self {
            delta,
            eta,
            lower: eta.recip(),
            upper: c1_upper(eta, corona_c)?,
            corona_c,
        })
    }

    /// Whether `lower ≤ upper`; expected once `c ≥ η/log(1/η)`.
    pub fn is_ordered(&self) -> bool {
        self.lower <= self.upper
    }
}

/// `min |B|.lo` over the points whose pseudohyperbolic distance to every zero
/// is at least `ε`; `None` when no point qualifies.
pub fn gmn_eta_of_epsilon<T: Real>(
    spec: &ProductSpec<T>,
    epsilon: T,
    points: &[Point<T>],
) -> Result<Option<GridMin<T>>> {
    let tol = T::lit(SCAN_TOL);
    grid_min(points, |z| {
        if spec.nearest_zero(z).0 < epsilon {
            return Ok(None);
        }
        Ok(Some(spec.log_modulus(z, tol)?.exp().lo))
    })
}

/// `Σ_j (1-|λ_j|²)(1-|z|²)/|1-λ̄_j z|²`, i.e. `Σ_j (1 - pseudo_dist(z, λ_j)²)`;
/// the summand is Möbius invariant, so both charts give the same value.
pub fn wep_sum<T: Real>(zeros: &[Point<T>], z: &Point<T>) -> Result<T> {
    let mut acc = CompensatedSum::new();
    for lam in zeros {
        acc.add(one_minus_dist_sq(z, lam)?);
    }
    Ok(acc.value())
}

/// `1/|B(v_n)| - 1` from the certified upper end of `|B(v_n)|`; `+∞` when
/// that upper end is zero.
pub fn divergence_witness<T: Real>(spec: &ProductSpec<T>, n: usize) -> Result<T> {
    let v = witness_points(spec)?;
    let vn = v
        .get(n)
        .ok_or_else(|| domain(format!("witness index {n} beyond the {} constructed points", v.len())))?;
    let log_hi = spec.log_modulus(vn, T::lit(crate::blaschke::DEFAULT_TOL))?.hi;
    Ok((-log_hi).exp_m1())
}

/// `1/(cosh πα)^{-N} - 1` at `v_n` for a uniform stack, when `Im v_n > α/ρ`.
pub fn divergence_floor<T: Real>(spec: &ProductSpec<T>, n: usize) -> Result<Option<T>> {
    let StackKind::UniformStack { alpha, beta, rho, .. } = spec.kind() else {
        return Err(domain("the closed-form floor applies to uniform stacks"));
    };
    let v = witness_points(spec)?;
    let vn = v
        .get(n)
        .ok_or_else(|| domain(format!("witness index {n} out of range")))?;
    if vn.im() <= *alpha / *rho {
        return Ok(None);
    }
    let up = lemma4_upper_bound(*alpha, *beta, *rho, vn.im())?;
    Ok(Some(up.recip() - T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::uniform_stack;

    #[test]
    fn grid_endpoints_and_resolution() {
        let g = GridRegion::new((0.0f64, 2.0), (0.5, 8.0), 3, 5, true).unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 15);
        assert_eq!((pts[0].re(), pts[0].im()), (0.0, 0.5));
        assert_eq!((pts[14].re(), pts[14].im()), (2.0, 8.0));
        assert!((pts[2].im() - 2.0).abs() < 1e-14);
        let (dx, dy) = g.resolution();
        assert_eq!(dx, 1.0);
        assert!((dy - 4.0).abs() < 1e-14);
        assert!(GridRegion::new((0.0f64, 1.0), (0.0, 1.0), 2, 2, false).is_err());
        assert!(GridRegion::new((0.0f64, 1.0), (0.1, 1.0), 1, 2, false).is_err());
    }

    #[test]
    fn strip_covering_threshold() {
        let row = RowSpec::new(1.0f64, 1.0).unwrap();
        let d1 = 1.0 / 3f64.sqrt();
        let grid = StripGrid {
            n_re: 201,
            n_im: 201,
            log_im: false,
        };
        assert!(verify_strip_covering(&row, d1 + 1e-6, grid).unwrap().pass);
        let r = verify_strip_covering(&row, d1 - 1e-3, grid).unwrap();
        assert!(!r.pass);
        let exc = exceptional_points(&row, 0, 1);
        let near = exc.iter().any(|e| {
            (e.re() - r.worst.re()).abs() <= r.resolution.0 && (e.im() - r.worst.im()).abs() <= r.resolution.1
        });
        assert!(near, "{:?}", r.worst);
        let tiny = StripGrid {
            n_re: 2,
            n_im: 2,
            log_im: false,
        };
        assert_eq!(verify_strip_covering(&row, d1, tiny).unwrap().n_samples, 4);
    }

    #[test]
    fn single_row_halfplane_matches_strip() {
        let row = RowSpec::new(0.7f64, 2.0).unwrap();
        let spec = ProductSpec::explicit(vec![row]).unwrap();
        let grid = StripGrid {
            n_re: 50,
            n_im: 40,
            log_im: true,
        };
        let a = verify_strip_covering(&row, 0.6, grid).unwrap();
        let b = verify_halfplane_covering(&spec, 0.6, grid).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn eta_and_c1_examples() {
        let (a, b) = eta_terms(1.0f64, 0.8).unwrap();
        assert!((b - 0.413_75).abs() < 1e-4);
        assert!((a - 0.025_94).abs() < 1e-4);
        assert_eq!(eta_formula(1.0f64, 0.8).unwrap(), a);
        let (_, b1) = eta_terms(1.0f64, 1.0).unwrap();
        assert!((b1 - 1.0).abs() < 1e-15);
        assert!(eta_formula(1.0f64, 0.5).is_err());
        let e = std::f64::consts::E;
        assert!((c1_upper(1.0 / e, 1.0).unwrap() - e * e).abs() < 1e-12);
        assert!(c1_upper(1.0f64, 1.0).is_err());
        let c = c1_upper(a, 1.0).unwrap();
        assert!((c - (-a.ln()) / (a * a)).abs() < 1e-9 * c);
        assert!((c / 5.43e3 - 1.0).abs() < 1e-2);
        let est = C1Estimate::new(1.0f64, 0.8, 1.0).unwrap();
        assert!(est.is_ordered());
    }

    #[test]
    fn wep_examples() {
        let o = Point::disk(0.0f64, 0.0).unwrap();
        assert!((wep_sum(&[o], &o).unwrap() - 1.0).abs() < 1e-15);
        let r = 0.3;
        let z = Point::disk(r, 0.0).unwrap();
        assert!((wep_sum(&[o], &z).unwrap() - (1.0 - r * r)).abs() < 1e-15);
    }

    #[test]
    fn divergence_increases() {
        let (spec, _) = uniform_stack(1.0f64, 1.0, 8).unwrap();
        let mut prev = 0.0;
        for n in 0..8 {
            let d = divergence_witness(&spec, n).unwrap();
            assert!(d > prev, "n={n}");
            if let Some(floor) = divergence_floor(&spec, n).unwrap() {
                assert!(d >= floor * (1.0 - 1e-12), "n={n} {d} < {floor}");
            }
            prev = d;
        }
        assert!(divergence_witness(&spec, 8).is_err());
    }

    #[test]
    fn empty_witness_gives_eta_at_least_one() {
        let (spec, _) = uniform_stack(1.0f64, 1.0, 3).unwrap();
        let g = GridRegion::new((-3.0, 3.0), (0.1, 40.0), 20, 20, true).unwrap();
        assert!(corona_eta(&[], &spec, &g.points()).unwrap().value >= 1.0);
    }
}
