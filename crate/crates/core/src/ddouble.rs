//! Double-double arithmetic (about 32 significant digits) and determinants.
//!
//! The limit matrices are tiny but their determinant identities are checked
//! at 1e-8 relative to quantities that can cancel heavily, so entries and
//! eliminations run in double-double.

#![allow(clippy::needless_range_loop)]

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DD {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

impl DD {
    pub const ZERO: DD = DD { hi: 0.0, lo: 0.0 };
    pub const ONE: DD = DD { hi: 1.0, lo: 0.0 };

    pub const fn from_f64(v: f64) -> DD {
        DD { hi: v, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> DD {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> DD {
        if self.hi <= 0.0 {
            return DD::ZERO;
        }
        // One Newton step from the double estimate doubles the precision.
        let x = libm::sqrt(self.hi);
        let xx = DD::from_f64(x) * DD::from_f64(x);
        let corr = (self - xx).hi / (2.0 * x);
        let (h, l) = quick_two_sum(x, corr);
        DD { hi: h, lo: l }
    }

    pub fn powi(self, n: u32) -> DD {
        let mut acc = DD::ONE;
        let mut base = self;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    pub fn cmp_abs(self, o: DD) -> Ordering {
        let (a, b) = (self.abs(), o.abs());
        a.hi.partial_cmp(&b.hi).unwrap_or(Ordering::Equal).then(a.lo.partial_cmp(&b.lo).unwrap_or(Ordering::Equal))
    }
}

impl Add for DD {
    type Output = DD;
    fn add(self, o: DD) -> DD {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (h, l) = quick_two_sum(s, e + f);
        DD { hi: h, lo: l }
    }
}

impl Neg for DD {
    type Output = DD;
    fn neg(self) -> DD {
        DD { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for DD {
    type Output = DD;
    fn sub(self, o: DD) -> DD {
        self + (-o)
    }
}

impl Mul for DD {
    type Output = DD;
    fn mul(self, o: DD) -> DD {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (h, l) = quick_two_sum(p, e);
        DD { hi: h, lo: l }
    }
}

impl Div for DD {
    type Output = DD;
    fn div(self, o: DD) -> DD {
        let q1 = self.hi / o.hi;
        let r = self - o * DD::from_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * DD::from_f64(q2);
        let q3 = r.hi / o.hi;
        let (h, l) = quick_two_sum(q1, q2);
        DD { hi: h, lo: l } + DD::from_f64(q3)
    }
}

impl From<f64> for DD {
    fn from(v: f64) -> DD {
        DD::from_f64(v)
    }
}

/// π in double-double.
pub const PI: DD = DD { hi: core::f64::consts::PI, lo: 1.224_646_799_147_353_2e-16 };

/// Complex double-double.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CDD {
    pub re: DD,
    pub im: DD,
}

impl CDD {
    pub const ONE: CDD = CDD { re: DD::ONE, im: DD::ZERO };

    pub fn new(re: DD, im: DD) -> CDD {
        CDD { re, im }
    }

    pub fn real(v: DD) -> CDD {
        CDD { re: v, im: DD::ZERO }
    }

    /// ζ = e^{2πi/3}.
    pub fn zeta() -> CDD {
        CDD::new(DD::from_f64(-0.5), DD::from_f64(3.0).sqrt() * DD::from_f64(0.5))
    }

    pub fn conj(self) -> CDD {
        CDD::new(self.re, -self.im)
    }

    pub fn norm2(self) -> DD {
        self.re * self.re + self.im * self.im
    }

    pub fn inv(self) -> CDD {
        let n = self.norm2();
        CDD::new(self.re / n, -self.im / n)
    }

    pub fn powi(self, n: i64) -> CDD {
        let mut base = if n < 0 { self.inv() } else { self };
        let mut k = n.unsigned_abs();
        let mut acc = CDD::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    pub fn scale(self, s: DD) -> CDD {
        CDD::new(self.re * s, self.im * s)
    }

    pub fn to_c64(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for CDD {
    type Output = CDD;
    fn add(self, o: CDD) -> CDD {
        CDD::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for CDD {
    type Output = CDD;
    fn sub(self, o: CDD) -> CDD {
        CDD::new(self.re - o.re, self.im - o.im)
    }
}

impl Neg for CDD {
    type Output = CDD;
    fn neg(self) -> CDD {
        CDD::new(-self.re, -self.im)
    }
}

impl Mul for CDD {
    type Output = CDD;
    fn mul(self, o: CDD) -> CDD {
        CDD::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Div for CDD {
    type Output = CDD;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: CDD) -> CDD {
        self * o.inv()
    }
}

/// Determinant of a real double-double matrix by LU with partial pivoting.
pub fn det_dd(mut a: Vec<Vec<DD>>) -> DD {
    let n = a.len();
    let mut det = DD::ONE;
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].cmp_abs(a[j][k])).unwrap_or(k);
        if a[p][k].hi == 0.0 {
            return DD::ZERO;
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let piv = a[k][k];
        det = det * piv;
        for i in k + 1..n {
            let f = a[i][k] / piv;
            if f.hi == 0.0 {
                continue;
            }
            for j in k + 1..n {
                let t = f * a[k][j];
                a[i][j] = a[i][j] - t;
            }
        }
    }
    det
}

/// Determinant of an f64 matrix by LU with partial pivoting, plus a crude
/// condition estimate (largest over smallest pivot magnitude).
pub fn det_f64(mut a: Vec<Vec<f64>>) -> (f64, f64) {
    let n = a.len();
    let mut det = 1.0;
    let (mut pmax, mut pmin) = (0.0f64, f64::INFINITY);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| libm::fabs(a[i][k]).partial_cmp(&libm::fabs(a[j][k])).unwrap_or(Ordering::Equal))
            .unwrap_or(k);
        if a[p][k] == 0.0 {
            return (0.0, f64::INFINITY);
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let piv = a[k][k];
        pmax = pmax.max(libm::fabs(piv));
        pmin = pmin.min(libm::fabs(piv));
        det *= piv;
        for i in k + 1..n {
            let f = a[i][k] / piv;
            for j in k + 1..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    (det, if n == 0 { 1.0 } else { pmax / pmin })
}

/// LU factorization of an f64 matrix with partial pivoting.
#[derive(Clone, Debug)]
pub struct LuF64 {
    lu: Vec<Vec<f64>>,
    perm: Vec<usize>,
    det: f64,
}

impl LuF64 {
    /// Returns `None` for an exactly singular matrix.
    pub fn factor(mut a: Vec<Vec<f64>>) -> Option<LuF64> {
        let n = a.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut det = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| libm::fabs(a[i][k]).partial_cmp(&libm::fabs(a[j][k])).unwrap_or(Ordering::Equal))?;
            if a[p][k] == 0.0 {
                return None;
            }
            if p != k {
                a.swap(p, k);
                perm.swap(p, k);
                det = -det;
            }
            let piv = a[k][k];
            det *= piv;
            for i in k + 1..n {
                let f = a[i][k] / piv;
                a[i][k] = f;
                for j in k + 1..n {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
        Some(LuF64 { lu: a, perm, det })
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    /// Solves A x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.len();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.lu[i][j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.lu[i][j] * x[j];
            }
            x[i] /= self.lu[i][i];
        }
        x
    }

    /// Solves xᵀ A = bᵀ.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.len();
        let mut y = b.to_vec();
        for i in 0..n {
            for j in 0..i {
                y[i] -= self.lu[j][i] * y[j];
            }
            y[i] /= self.lu[i][i];
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                y[i] -= self.lu[j][i] * y[j];
            }
        }
        let mut x = alloc::vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }
}
