//! High-precision reference arithmetic for the oracle tests (256-bit mantissa,
//! about 77 decimal digits).

#![allow(dead_code)]

use astro_float::{BigFloat, Consts, RoundingMode};

/// Reference values from 256-bit evaluation, printed to 18 digits.
#[allow(clippy::excessive_precision)]
pub mod frozen {
    pub const INV_COSH_PI: f64 = 8.62667383340544186e-2;
    pub const PI_OVER_SINH_PI: f64 = 2.72029054982133145e-1;
    pub const BETA_1: f64 = 1.71572875253809903e-1;
    pub const V0_1: f64 = 5.85786437626904966e-1;
    pub const LN_THIRD: f64 = -1.09861228866810978e0;
    pub const LOG_FACTOR_FAR: f64 = -1.99999999999600017e-12;
    pub const DIVERGENCE_0: f64 = 6.06805460681825082e0;
    pub const ETA_FIRST_1: f64 = 2.59365641328680556e-2;
    pub const ETA_SECOND_1_08: f64 = 4.13754961557289913e-1;
    pub const C1_UPPER_1_08: f64 = 5.42897646689740304e3;
}

pub const P: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

pub struct Hp {
    cc: Consts,
}

impl Default for Hp {
    fn default() -> Self {
        Self {
            cc: Consts::new().expect("constants cache"),
        }
    }
}

impl Hp {
    pub fn n(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, P)
    }

    /// Exact decimal literal, e.g. `"0.8"`.
    pub fn lit(&mut self, s: &str) -> BigFloat {
        BigFloat::parse(s, astro_float::Radix::Dec, P, RM, &mut self.cc)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(P, RM)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, P, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, P, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, P, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, P, RM)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(P, RM)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(P, RM, &mut self.cc)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(P, RM, &mut self.cc)
    }

    pub fn cosh(&mut self, a: &BigFloat) -> BigFloat {
        a.cosh(P, RM, &mut self.cc)
    }

    pub fn sinh(&mut self, a: &BigFloat) -> BigFloat {
        a.sinh(P, RM, &mut self.cc)
    }

    pub fn cos(&mut self, a: &BigFloat) -> BigFloat {
        a.cos(P, RM, &mut self.cc)
    }

    pub fn f64(&mut self, a: &BigFloat) -> f64 {
        let s = a.format(astro_float::Radix::Dec, RM, &mut self.cc).expect("format");
        s.parse().expect("decimal")
    }

    /// `log |B_{α,γ}(x + iy)|` from `|B|² = (cosh π(γy-α) + cos πγx)/(cosh π(γy+α) + cos πγx)`.
    pub fn row_log_modulus(&mut self, alpha: &BigFloat, gamma: &BigFloat, x: &BigFloat, y: &BigFloat) -> BigFloat {
        let pi = self.pi();
        let gy = self.mul(gamma, y);
        let c = {
            let t = self.mul(&pi, &self.mul(gamma, x));
            self.cos(&t)
        };
        let a = {
            let t = self.mul(&pi, &self.sub(&gy, alpha));
            self.cosh(&t)
        };
        let b = {
            let t = self.mul(&pi, &self.add(&gy, alpha));
            self.cosh(&t)
        };
        let r = self.div(&self.add(&a, &c), &self.add(&b, &c));
        let l = self.ln(&r);
        self.mul(&l, &self.n(0.5))
    }

    /// `β = (√(1+α²) - 1)/(√(1+α²) + 1)`.
    pub fn beta(&self, alpha: &BigFloat) -> BigFloat {
        let one = self.n(1.0);
        let s = self.sqrt(&self.add(&one, &self.mul(alpha, alpha)));
        self.div(&self.sub(&s, &one), &self.add(&s, &one))
    }

    /// `log |B(iy)|` for the uniform stack, summing rows until they are negligible.
    pub fn uniform_log_modulus(&mut self, alpha: &BigFloat, rho: &BigFloat, x: &BigFloat, y: &BigFloat) -> BigFloat {
        let beta = self.beta(alpha);
        let mut gamma = rho.clone();
        let mut acc = self.n(0.0);
        for _ in 0..120 {
            let t = self.row_log_modulus(alpha, &gamma, x, y);
            acc = self.add(&acc, &t);
            gamma = self.mul(&gamma, &beta);
        }
        acc
    }

    /// `1/√(1+2α²)`.
    pub fn threshold(&self, alpha: &BigFloat) -> BigFloat {
        let one = self.n(1.0);
        let two = self.n(2.0);
        self.div(
            &one,
            &self.sqrt(&self.add(&one, &self.mul(&two, &self.mul(alpha, alpha)))),
        )
    }

    /// Both terms of the η formula.
    pub fn eta_terms(&mut self, alpha: &BigFloat, delta: &BigFloat) -> (BigFloat, BigFloat) {
        let one = self.n(1.0);
        let two = self.n(2.0);
        let pi = self.pi();
        let s = self.sqrt(&self.add(&one, &self.mul(alpha, alpha)));
        let pa = self.mul(&pi, alpha);
        let e1 = self.exp(&pa);
        let e2 = {
            let t = self.div(&pa, &self.add(&s, &one));
            self.exp(&t)
        };
        let num = self.mul(&self.mul(alpha, &s), &self.add(&e1, &one));
        let den = self.mul(&two, &self.add(&e2, &one));
        let first = {
            let t = self.div(&num, &den).neg();
            self.exp(&t)
        };
        let d1 = self.threshold(alpha);
        let second = self.div(&self.sub(delta, &d1), &self.sub(&one, &self.mul(delta, &d1)));
        (first, second)
    }
}
