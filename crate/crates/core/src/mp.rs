//! Multiprecision complex arithmetic on top of MPFR floats.
//!
//! Only the handful of operations the zeta machinery needs are provided:
//! field operations, integer powers, `exp`, the principal argument and the
//! modulus. Complex logarithms are deliberately absent; every non-integer
//! power in this crate has a positive real base.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use rug::float::Constant;
use rug::{Float, Integer};

/// A complex number with MPFR real and imaginary parts sharing one precision.
#[derive(Clone, PartialEq)]
pub struct Cplx {
    pub re: Float,
    pub im: Float,
}

impl Cplx {
    pub fn zero(prec: u32) -> Self {
        Cplx { re: Float::new(prec), im: Float::new(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Cplx::from_f64(prec, 1.0, 0.0)
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Cplx { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    pub fn from_c64(prec: u32, z: Complex64) -> Self {
        Cplx::from_f64(prec, z.re, z.im)
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        Cplx { re, im }
    }

    pub fn from_parts(re: Float, im: Float) -> Self {
        let prec = re.prec().max(im.prec());
        Cplx { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    pub fn from_integer(prec: u32, n: &Integer) -> Self {
        Cplx::from_real(Float::with_val(prec, n))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    /// Copy at a new precision (rounding or zero-extending the mantissas).
    pub fn with_prec(&self, prec: u32) -> Self {
        Cplx { re: Float::with_val(prec, &self.re), im: Float::with_val(prec, &self.im) }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(&self) -> Self {
        Cplx { re: self.re.clone(), im: Float::with_val(self.prec(), -&self.im) }
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.mul_add_mul_ref(&self.re, &self.im, &self.im))
    }

    /// Principal argument in (-pi, pi].
    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn scale(&self, k: &Float) -> Self {
        let p = self.prec();
        Cplx { re: Float::with_val(p, &self.re * k), im: Float::with_val(p, &self.im * k) }
    }

    pub fn scale_f64(&self, k: f64) -> Self {
        let p = self.prec();
        Cplx { re: Float::with_val(p, &self.re * k), im: Float::with_val(p, &self.im * k) }
    }

    pub fn add_real(&self, k: &Float) -> Self {
        Cplx { re: Float::with_val(self.prec(), &self.re + k), im: self.im.clone() }
    }

    pub fn recip(&self) -> Self {
        let p = self.prec();
        let d = self.norm_sqr();
        Cplx { re: Float::with_val(p, &self.re / &d), im: Float::with_val(p, -Float::with_val(p, &self.im / &d)) }
    }

    pub fn mul_assign_ref(&mut self, o: &Cplx) {
        *self = &*self * o;
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = Float::with_val(p, self.re.exp_ref());
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        Cplx { re: Float::with_val(p, &m * &c), im: Float::with_val(p, &m * &s) }
    }

    /// exp(i*theta)
    pub fn cis(theta: &Float) -> Self {
        let p = theta.prec();
        let (s, c) = theta.clone().sin_cos(Float::new(p));
        Cplx { re: c, im: s }
    }

    /// Integer power by binary exponentiation; negative exponents invert first.
    pub fn powi(&self, n: i64) -> Self {
        let p = self.prec();
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Cplx::one(p);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `base^self` for a positive real base given through its logarithm.
    pub fn exp_times(&self, ln_base: &Float) -> Self {
        self.scale(ln_base).exp()
    }

    pub fn distance(&self, o: &Cplx) -> Float {
        (self - o).abs()
    }

    /// Short decimal rendering, mostly for diagnostics.
    pub fn to_string_digits(&self, digits: usize) -> String {
        let re = self.re.to_string_radix(10, Some(digits));
        let im = self.im.to_string_radix(10, Some(digits));
        if self.im.is_sign_negative() {
            format!("{re}{im}i")
        } else {
            format!("{re}+{im}i")
        }
    }
}

impl fmt::Debug for Cplx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_digits(20))
    }
}

impl fmt::Display for Cplx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.to_c64();
        if z.im < 0.0 {
            write!(f, "{}{}i", z.re, z.im)
        } else {
            write!(f, "{}+{}i", z.re, z.im)
        }
    }
}

impl<'a> Add<&'a Cplx> for &'a Cplx {
    type Output = Cplx;
    fn add(self, o: &Cplx) -> Cplx {
        let p = self.prec().max(o.prec());
        Cplx { re: Float::with_val(p, &self.re + &o.re), im: Float::with_val(p, &self.im + &o.im) }
    }
}

impl<'a> Sub<&'a Cplx> for &'a Cplx {
    type Output = Cplx;
    fn sub(self, o: &Cplx) -> Cplx {
        let p = self.prec().max(o.prec());
        Cplx { re: Float::with_val(p, &self.re - &o.re), im: Float::with_val(p, &self.im - &o.im) }
    }
}

impl<'a> Mul<&'a Cplx> for &'a Cplx {
    type Output = Cplx;
    fn mul(self, o: &Cplx) -> Cplx {
        let p = self.prec().max(o.prec());
        Cplx {
            re: Float::with_val(p, self.re.mul_sub_mul_ref(&o.re, &self.im, &o.im)),
            im: Float::with_val(p, self.re.mul_add_mul_ref(&o.im, &self.im, &o.re)),
        }
    }
}

impl<'a> Div<&'a Cplx> for &'a Cplx {
    type Output = Cplx;
    fn div(self, o: &Cplx) -> Cplx {
        let p = self.prec().max(o.prec());
        let d = o.norm_sqr();
        let re = Float::with_val(p, self.re.mul_add_mul_ref(&o.re, &self.im, &o.im));
        let im = Float::with_val(p, self.im.mul_sub_mul_ref(&o.re, &self.re, &o.im));
        Cplx { re: Float::with_val(p, &re / &d), im: Float::with_val(p, &im / &d) }
    }
}

impl Neg for &Cplx {
    type Output = Cplx;
    fn neg(self) -> Cplx {
        Cplx { re: Float::with_val(self.prec(), -&self.re), im: Float::with_val(self.prec(), -&self.im) }
    }
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

pub fn two_pi(prec: u32) -> Float {
    let mut t = pi(prec);
    t *= 2;
    t
}

pub fn ln(x: &Float) -> Float {
    Float::with_val(x.prec(), x.ln_ref())
}

/// Unit roundoff at `prec` bits, as an f64.
pub fn ulp(prec: u32) -> f64 {
    (2.0f64).powi(-(prec as i32) + 1)
}

/// Neumaier-compensated running sum of complex terms.
///
/// Also tracks the sum of term moduli, which drives the rounding slack in
/// every error bound.
#[derive(Clone, Debug)]
pub struct CompensatedSum {
    re: Float,
    im: Float,
    c_re: Float,
    c_im: Float,
    abs_total: f64,
    count: usize,
}

fn neumaier(sum: &mut Float, comp: &mut Float, x: &Float) {
    let p = sum.prec();
    let t = Float::with_val(p, &*sum + x);
    let (big, small) =
        if Float::with_val(p, sum.abs_ref()) >= Float::with_val(p, x.abs_ref()) { (&*sum, x) } else { (x, &*sum) };
    let err = Float::with_val(p, big - &t) + small;
    *comp += err;
    *sum = t;
}

impl CompensatedSum {
    pub fn new(prec: u32) -> Self {
        CompensatedSum {
            re: Float::new(prec),
            im: Float::new(prec),
            c_re: Float::new(prec),
            c_im: Float::new(prec),
            abs_total: 0.0,
            count: 0,
        }
    }

    pub fn add(&mut self, z: &Cplx) {
        neumaier(&mut self.re, &mut self.c_re, &z.re);
        neumaier(&mut self.im, &mut self.c_im, &z.im);
        self.abs_total += z.abs_f64();
        self.count += 1;
    }

    pub fn abs_total(&self) -> f64 {
        self.abs_total
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn value(&self) -> Cplx {
        let p = self.re.prec();
        Cplx { re: Float::with_val(p, &self.re + &self.c_re), im: Float::with_val(p, &self.im + &self.c_im) }
    }
}
