//! Points of the upper half-plane and the unit disk, the pseudohyperbolic
//! metric in both charts, and the Cayley transform between them.
//!
//! Blaschke factors only ever enter through their modulus, so a factor with
//! zero `λ` is identified with `z ↦ pseudo_dist(z, λ)`; unimodular
//! normalisations are not represented.

use num_complex::Complex;

use crate::error::{Error, Result, domain};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chart {
    /// Open upper half-plane `Im z > 0`.
    HalfPlane,
    /// Open unit disk `|z| < 1`.
    Disk,
}

/// A point of the upper half-plane or of the unit disk, tagged with its chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point<T> {
    re: T,
    im: T,
    chart: Chart,
}

impl<T: Real> Point<T> {
    /// Half-plane point; rejects `Im z` below the boundary margin.
    pub fn half_plane(re: T, im: T) -> Result<Self> {
        if !(re.is_finite() && im.is_finite()) {
            return Err(domain(format!("non-finite half-plane point ({re}, {im})")));
        }
        if !(im >= T::boundary_margin()) {
            return Err(domain(format!("half-plane point needs Im z > 0, got {im}")));
        }
        Ok(Self {
            re,
            im,
            chart: Chart::HalfPlane,
        })
    }

    /// Disk point; rejects points within the boundary margin of the circle.
    pub fn disk(re: T, im: T) -> Result<Self> {
        if !(re.is_finite() && im.is_finite()) {
            return Err(domain(format!("non-finite disk point ({re}, {im})")));
        }
        let r = re.hypot(im);
        if !(T::one() - r >= T::boundary_margin()) {
            return Err(domain(format!("disk point needs |z| < 1, got |z| = {r}")));
        }
        Ok(Self {
            re,
            im,
            chart: Chart::Disk,
        })
    }

    /// The half-plane point `i·a`.
    pub fn imaginary(a: T) -> Result<Self> {
        Self::half_plane(T::zero(), a)
    }

    pub fn re(&self) -> T {
        self.re
    }

    pub fn im(&self) -> T {
        self.im
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn to_complex(&self) -> Complex<T> {
        Complex::new(self.re, self.im)
    }

    /// Euclidean modulus `|z|`.
    pub fn norm(&self) -> T {
        self.re.hypot(self.im)
    }
}

fn same_chart<T: Real>(z: &Point<T>, w: &Point<T>) -> Result<Chart> {
    if z.chart != w.chart {
        return Err(Error::ChartMismatch(format!("{:?} vs {:?}", z.chart, w.chart)));
    }
    Ok(z.chart)
}

/// `(|numerator|, |denominator|)` of the Blaschke factor with zero `w` at `z`.
fn factor_parts<T: Real>(z: &Point<T>, w: &Point<T>) -> (T, T) {
    match z.chart {
        Chart::HalfPlane => {
            let dx = z.re - w.re;
            (dx.hypot(z.im - w.im), dx.hypot(z.im + w.im))
        }
        Chart::Disk => {
            let num = (z.re - w.re).hypot(z.im - w.im);
            // 1 - conj(w) z
            let a = T::one() - (w.re * z.re + w.im * z.im);
            let b = w.re * z.im - w.im * z.re;
            (num, a.hypot(b))
        }
    }
}

/// `1 - |z|^2` for a disk point, factored to limit cancellation.
fn disk_defect<T: Real>(z: &Point<T>) -> T {
    let r = z.norm();
    (T::one() - r) * (T::one() + r)
}

/// `1 - pseudo_dist(z, w)^2`, evaluated without cancellation near distance 1.
pub fn one_minus_dist_sq<T: Real>(z: &Point<T>, w: &Point<T>) -> Result<T> {
    let chart = same_chart(z, w)?;
    Ok(match chart {
        Chart::HalfPlane => {
            let dx = z.re - w.re;
            let sy = z.im + w.im;
            let four = T::lit(4.0);
            // 4 y1 y2 / (dx^2 + (y1 + y2)^2), scaled to avoid overflow
            let den = dx.hypot(sy);
            (four * (z.im / den)) * (w.im / den)
        }
        Chart::Disk => {
            let (_, den) = factor_parts(z, w);
            (disk_defect(z) / den) * (disk_defect(w) / den)
        }
    })
}

/// Pseudohyperbolic distance `|b_w(z)|`.
pub fn pseudo_dist<T: Real>(z: &Point<T>, w: &Point<T>) -> Result<T> {
    same_chart(z, w)?;
    let (num, den) = factor_parts(z, w);
    Ok((num / den).min(T::one()))
}

/// `log pseudo_dist(z, λ)`, accurate at both ends of `[0, 1)`.
///
/// Returns `-∞` when `z == λ`.
pub fn log_blaschke_factor<T: Real>(z: &Point<T>, lambda: &Point<T>) -> Result<T> {
    same_chart(z, lambda)?;
    let (num, den) = factor_parts(z, lambda);
    if num == T::zero() {
        return Ok(T::neg_infinity());
    }
    let ratio = num / den;
    if ratio * ratio <= T::lit(0.5) {
        return Ok(num.ln() - den.ln());
    }
    let u = one_minus_dist_sq(z, lambda)?;
    Ok(T::lit(0.5) * (-u).ln_1p())
}

/// Cayley transform `ω(z) = (z - i)/(z + i)` from the half-plane to the disk.
pub fn cayley<T: Real>(z: &Point<T>) -> Result<Point<T>> {
    if z.chart != Chart::HalfPlane {
        return Err(Error::ChartMismatch("cayley expects a half-plane point".into()));
    }
    let zc = z.to_complex();
    let i = Complex::new(T::zero(), T::one());
    let w = (zc - i) / (zc + i);
    Point::disk(w.re, w.im)
}

/// Inverse Cayley transform `z = i (1 + ω)/(1 - ω)`.
pub fn inverse_cayley<T: Real>(w: &Point<T>) -> Result<Point<T>> {
    if w.chart != Chart::Disk {
        return Err(Error::ChartMismatch("inverse_cayley expects a disk point".into()));
    }
    let wc = w.to_complex();
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    let z = i * (one + wc) / (one - wc);
    // Im z = (1 - |w|^2)/|1 - w|^2 exactly; use it instead of the rounded quotient.
    let im = disk_defect(w) / (one - wc).norm_sqr();
    Point::half_plane(z.re, im)
}

/// Axis-aligned rectangle in the half-plane chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rectangle<T> {
    pub re_center: T,
    pub re_half_width: T,
    pub im_low: T,
    pub im_high: T,
}

impl<T: Real> Rectangle<T> {
    pub fn vertices(&self) -> Result<[Point<T>; 4]> {
        let (l, r) = (self.re_center - self.re_half_width, self.re_center + self.re_half_width);
        Ok([
            Point::half_plane(l, self.im_low)?,
            Point::half_plane(r, self.im_low)?,
            Point::half_plane(l, self.im_high)?,
            Point::half_plane(r, self.im_high)?,
        ])
    }

    /// Uniform `n_re × n_im` sample including the boundary.
    pub fn grid(&self, n_re: usize, n_im: usize) -> Vec<Point<T>> {
        let lerp = |lo: T, hi: T, k: usize, n: usize| {
            if n < 2 {
                (lo + hi) / T::lit(2.0)
            } else {
                lo + (hi - lo) * T::from_usize_lossy(k) / T::from_usize_lossy(n - 1)
            }
        };
        let mut out = Vec::with_capacity(n_re * n_im);
        let (l, r) = (self.re_center - self.re_half_width, self.re_center + self.re_half_width);
        for a in 0..n_re {
            for b in 0..n_im {
                let p = Point::half_plane(lerp(l, r, a, n_re), lerp(self.im_low, self.im_high, b, n_im));
                out.extend(p);
            }
        }
        out
    }
}

/// The rectangle inscribed in the pseudohyperbolic disk `{z : |b_λ(z)| ≤ ε}`.
pub fn lemma1_rectangle<T: Real>(lambda: &Point<T>, eps: T) -> Result<Rectangle<T>> {
    if lambda.chart != Chart::HalfPlane {
        return Err(Error::ChartMismatch(
            "rectangle is built in the half-plane chart".into(),
        ));
    }
    if !(eps > T::zero() && eps < T::one()) {
        return Err(domain(format!("rectangle radius must lie in (0, 1), got {eps}")));
    }
    let s = (T::one() + eps * eps).sqrt();
    let t = T::SQRT_2() * eps;
    let y = lambda.im;
    Ok(Rectangle {
        re_center: lambda.re,
        re_half_width: y * t / (T::one() - eps * eps).sqrt(),
        im_low: y * s / (s + t),
        im_high: y * s / (s - t),
    })
}

/// Euclidean centre and radius of the circle `{z : |b_λ(z)| = ε}` in the half-plane.
pub fn pseudo_circle<T: Real>(lambda: &Point<T>, eps: T) -> Result<(Complex<T>, T)> {
    if lambda.chart != Chart::HalfPlane {
        return Err(Error::ChartMismatch("circle is built in the half-plane chart".into()));
    }
    if !(eps > T::zero() && eps < T::one()) {
        return Err(domain(format!("circle radius must lie in (0, 1), got {eps}")));
    }
    let e2 = eps * eps;
    let center = Complex::new(lambda.re, lambda.im * (T::one() + e2) / (T::one() - e2));
    Ok((center, T::lit(2.0) * lambda.im * eps / (T::one() - e2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pseudo_circle_lies_on_level_set() {
        let lam = Point::half_plane(0.3f64, 1.7).unwrap();
        let (c, r) = pseudo_circle(&lam, 0.4).unwrap();
        for k in 0..12 {
            let t = k as f64 * 0.5;
            let z = Point::half_plane(c.re + r * t.cos(), c.im + r * t.sin()).unwrap();
            assert!((pseudo_dist(&z, &lam).unwrap() - 0.4).abs() < 1e-14);
        }
    }

    fn hp(x: f64, y: f64) -> Point<f64> {
        Point::half_plane(x, y).unwrap()
    }

    #[test]
    fn rejects_boundary_points() {
        assert!(Point::half_plane(0.0, 0.0).is_err());
        assert!(Point::half_plane(0.0, 1e-301).is_err());
        assert!(Point::half_plane(0.0, 1e-300).is_ok());
        assert!(Point::disk(1.0, 0.0).is_err());
        assert!(Point::disk(0.6, 0.8).is_err());
        assert!(Point::half_plane(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn pseudo_dist_examples() {
        assert_eq!(pseudo_dist(&hp(0.0, 1.0), &hp(0.0, 1.0)).unwrap(), 0.0);
        let d = pseudo_dist(&hp(0.0, 2.0), &hp(0.0, 1.0)).unwrap();
        assert!((d - 1.0 / 3.0).abs() < 1e-15);
        // witness point of the unit stack against its nearest zero
        let v0 = 2f64.sqrt() / (2f64.sqrt() + 1.0);
        let d = pseudo_dist(&hp(0.0, v0), &hp(1.0, 1.0)).unwrap();
        assert!((d - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn chart_mismatch_is_an_error() {
        let z = hp(0.0, 1.0);
        let w = Point::disk(0.0, 0.0).unwrap();
        assert!(matches!(pseudo_dist(&z, &w), Err(Error::ChartMismatch(_))));
        assert!(matches!(log_blaschke_factor(&z, &w), Err(Error::ChartMismatch(_))));
        assert!(cayley(&w).is_err());
        assert!(inverse_cayley(&z).is_err());
    }

    #[test]
    fn log_factor_examples() {
        let l = log_blaschke_factor(&hp(0.0, 2.0), &hp(0.0, 1.0)).unwrap();
        assert!((l - (1.0f64 / 3.0).ln()).abs() < 1e-15);

        let z = hp(1e-8, 1.0);
        let i = hp(0.0, 1.0);
        let l = log_blaschke_factor(&z, &i).unwrap();
        assert!(l.is_finite() && l < -15.0);
        let d = pseudo_dist(&z, &i).unwrap();
        assert!((l.exp() - d).abs() <= 1e-12 * d);

        let l = log_blaschke_factor(&hp(1e6, 1.0), &i).unwrap();
        assert!(l < 0.0 && l > -1e-11);
        // 1 - d^2 = 4/(1e12 + 4); log d = log1p(-u)/2
        let u: f64 = 4.0 / (1e12 + 4.0);
        assert!((l - 0.5 * (-u).ln_1p()).abs() < 1e-25);

        assert_eq!(log_blaschke_factor(&i, &i).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn log_factor_disk_chart() {
        let z = Point::disk(0.5, 0.0).unwrap();
        let w = Point::disk(0.0, 0.0).unwrap();
        let l = log_blaschke_factor(&z, &w).unwrap();
        assert!((l - 0.5f64.ln()).abs() < 1e-15);
        let z = Point::<f64>::disk(0.999_999, 0.0).unwrap();
        let w = Point::disk(-0.999_999, 0.0).unwrap();
        let d = pseudo_dist(&z, &w).unwrap();
        let l = log_blaschke_factor(&z, &w).unwrap();
        assert!(l < 0.0);
        assert!((l.exp() - d).abs() < 1e-12);
    }

    #[test]
    fn cayley_examples() {
        let w = cayley(&hp(0.0, 1.0)).unwrap();
        assert!(w.re().abs() < 1e-16 && w.im().abs() < 1e-16);
        let w = cayley(&hp(0.0, 2.0)).unwrap();
        assert!((w.re() - 1.0 / 3.0).abs() < 1e-15 && w.im().abs() < 1e-16);
        let a = pseudo_dist(&hp(0.0, 2.0), &hp(0.0, 1.0)).unwrap();
        let b = pseudo_dist(&cayley(&hp(0.0, 2.0)).unwrap(), &cayley(&hp(0.0, 1.0)).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-15);
        let z = hp(-3.25, 0.125);
        let back = inverse_cayley(&cayley(&z).unwrap()).unwrap();
        assert!((back.re() - z.re()).abs() < 1e-14 && (back.im() - z.im()).abs() < 1e-14);
    }

    #[test]
    fn rectangle_examples() {
        let i = hp(0.0, 1.0);
        assert!(lemma1_rectangle(&i, 1.0).is_err());
        assert!(lemma1_rectangle(&i, 0.0).is_err());

        let r = lemma1_rectangle(&i, 1e-8).unwrap();
        assert!(r.re_half_width < 1e-7 && r.im_high - r.im_low < 1e-7);

        let r = lemma1_rectangle(&i, 1.0 / 3f64.sqrt()).unwrap();
        assert!((r.re_half_width - 1.0).abs() < 1e-15);

        // vertex identity (a^2 + b^2 + 1)(1 - eps^2) = 2 b (1 + eps^2)
        let eps: f64 = 0.5;
        let r = lemma1_rectangle(&i, eps).unwrap();
        let a = 2f64.sqrt() * 0.5 / 0.75f64.sqrt();
        let b = 1.25f64.sqrt() / (1.25f64.sqrt() + 2f64.sqrt() * 0.5);
        assert!((r.re_half_width - a).abs() < 1e-15 && (r.im_low - b).abs() < 1e-15);
        let lhs = (a * a + b * b + 1.0) * (1.0 - eps * eps);
        let rhs = 2.0 * b * (1.0 + eps * eps);
        assert!((lhs - rhs).abs() < 1e-12);
        for v in r.vertices().unwrap() {
            assert!((pseudo_dist(&v, &i).unwrap() - eps).abs() < 1e-12);
        }
    }

    #[test]
    fn works_in_single_precision() {
        let z = Point::<f32>::half_plane(0.0, 2.0).unwrap();
        let w = Point::<f32>::half_plane(0.0, 1.0).unwrap();
        assert!((pseudo_dist(&z, &w).unwrap() - 1.0 / 3.0).abs() < 1e-6);
    }
}
