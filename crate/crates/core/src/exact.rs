//! Exact scalars for coupling values and their determinants.
//!
//! Every coupling value lies in ℚ + ℚκ with κ = √3/π. Products leave that
//! set, so determinants live in the polynomial ring ℚ[κ]; since π is
//! transcendental a polynomial in κ vanishes only when all its coefficients
//! do, which makes equality tests in ℚ[κ] exact.

use alloc::borrow::Cow;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Converts `num/den` to the nearest-ish f64 without overflowing on huge operands.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let neg = (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus);
    let n = num.magnitude();
    let d = den.magnitude();
    // Scale so the integer quotient carries 64+ significant bits.
    let shift = d.bits() as i64 - n.bits() as i64 + 66;
    let q = if shift >= 0 { (n << shift as usize) / d } else { n / (d << (-shift) as usize) };
    let top = q.bits() as i64;
    let drop = (top - 64).max(0);
    let mant = (&q >> drop as usize).to_u64().unwrap_or(u64::MAX) as f64;
    let v = libm::ldexp(mant, (drop - shift) as i32);
    if neg {
        -v
    } else {
        v
    }
}

/// Converts a big rational to f64.
pub fn rat_to_f64(r: &BigRational) -> f64 {
    ratio_to_f64(r.numer(), r.denom())
}

fn atan_inv_fixed(x: u32, bits: u64) -> BigInt {
    // atan(1/x)·2^bits by the alternating Taylor series.
    let one = BigInt::one() << bits as usize;
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut power = &one / BigInt::from(x);
    let mut sum = power.clone();
    let mut k = 1u64;
    loop {
        power = &power / &x2;
        if power.is_zero() {
            break;
        }
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
    sum
}

/// κ = √3/π as a fixed-point integer `k ≈ κ·2^bits` with |error| ≤ 1.
#[derive(Clone, Debug)]
pub struct KappaFixed {
    bits: u64,
    k: BigInt,
}

impl KappaFixed {
    pub fn new(bits: u64) -> Self {
        let g = bits + 48;
        let pi = BigInt::from(16) * atan_inv_fixed(5, g) - BigInt::from(4) * atan_inv_fixed(239, g);
        let sqrt3 = (BigInt::from(3) << (2 * g) as usize).sqrt();
        let kappa_g = (sqrt3 << g as usize) / pi;
        KappaFixed { bits, k: kappa_g >> 48usize }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn scaled(&self) -> &BigInt {
        &self.k
    }

    /// Returns `self` when it is precise enough, otherwise a fresh value.
    pub fn at_least(&self, bits: u64) -> Cow<'_, KappaFixed> {
        if self.bits >= bits {
            Cow::Borrowed(self)
        } else {
            Cow::Owned(KappaFixed::new(bits.max(2 * self.bits)))
        }
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.k, &(BigInt::one() << self.bits as usize))
    }
}

/// Double-precision κ, for code that never needs more.
pub fn kappa_f64() -> f64 {
    libm::sqrt(3.0) / core::f64::consts::PI
}

/// A polynomial in κ with integer coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct KPoly {
    c: Vec<BigInt>,
}

impl KPoly {
    pub fn zero() -> Self {
        KPoly { c: Vec::new() }
    }

    pub fn constant(v: BigInt) -> Self {
        KPoly::from_coeffs(vec![v])
    }

    pub fn linear(p: BigInt, r: BigInt) -> Self {
        KPoly::from_coeffs(vec![p, r])
    }

    pub fn from_coeffs(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(|v| v.is_zero()) {
            c.pop();
        }
        KPoly { c }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.c.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn scale(&self, s: &BigInt) -> KPoly {
        KPoly::from_coeffs(self.c.iter().map(|v| v * s).collect())
    }

    /// Greatest common divisor of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.c.iter().fold(BigInt::zero(), |g, v| g.gcd(v))
    }

    /// Exact quotient; `None` when `d` does not divide `self` in ℤ[κ].
    pub fn div_exact(&self, d: &KPoly) -> Option<KPoly> {
        let dd = d.degree()?;
        if self.is_zero() {
            return Some(KPoly::zero());
        }
        let lead = &d.c[dd];
        let mut rem = self.c.clone();
        if rem.len() <= dd {
            return None;
        }
        let mut q = vec![BigInt::zero(); rem.len() - dd];
        for i in (0..q.len()).rev() {
            let top = &rem[i + dd];
            if top.is_zero() {
                continue;
            }
            let (qi, r) = top.div_rem(lead);
            if !r.is_zero() {
                return None;
            }
            for (j, dj) in d.c.iter().enumerate() {
                rem[i + j] -= &qi * dj;
            }
            q[i] = qi;
        }
        if rem.iter().any(|v| !v.is_zero()) {
            return None;
        }
        Some(KPoly::from_coeffs(q))
    }

    fn max_coeff_bits(&self) -> u64 {
        self.c.iter().map(|v| v.bits()).max().unwrap_or(0)
    }

    /// Fixed-point evaluation: returns (T, E, B·deg) with the value within E/2^(B·deg) of T/2^(B·deg).
    fn eval_fixed(&self, kf: &KappaFixed) -> (BigInt, BigInt, u64) {
        let d = self.c.len().saturating_sub(1);
        let b = kf.bits as usize;
        let k = &kf.k;
        let k1 = k + BigInt::one();
        let mut t = BigInt::zero();
        let mut e = BigInt::zero();
        let mut kp = BigInt::one();
        // (K+1)^(i−1), used to bound |K^i − (κ2^B)^i| ≤ i (K+1)^(i−1).
        let mut kp1m = BigInt::one();
        for (i, ci) in self.c.iter().enumerate() {
            let shift = (d - i) * b;
            t += (ci * &kp) << shift;
            if i > 0 {
                e += (ci.abs() * BigInt::from(i) * &kp1m) << shift;
                kp1m *= &k1;
            }
            kp *= k;
        }
        (t, e, (d * b) as u64)
    }

    /// Sign of the real number obtained by substituting κ, certified by error bounds.
    pub fn sign(&self, kf: &KappaFixed) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        let mut bits = (self.max_coeff_bits() + 64).max(kf.bits);
        loop {
            let kk = kf.at_least(bits);
            let (t, e, _) = self.eval_fixed(&kk);
            if t.abs() > e {
                return if t.is_positive() { Ordering::Greater } else { Ordering::Less };
            }
            bits *= 2;
        }
    }

    /// Value at κ to about 60 correct bits.
    pub fn to_f64(&self, kf: &KappaFixed) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mut bits = self.max_coeff_bits() + 80;
        loop {
            let kk = kf.at_least(bits);
            let (t, e, sh) = self.eval_fixed(&kk);
            if t.abs() > (e << 60usize) || bits > 1 << 22 {
                return ratio_to_f64(&t, &(BigInt::one() << sh as usize));
            }
            bits *= 2;
        }
    }
}

impl fmt::Display for KPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}·κ")?,
                _ => write!(f, "{c}·κ^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &KPoly {
    type Output = KPoly;
    fn add(self, o: &KPoly) -> KPoly {
        let n = self.c.len().max(o.c.len());
        KPoly::from_coeffs((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &KPoly {
    type Output = KPoly;
    fn sub(self, o: &KPoly) -> KPoly {
        let n = self.c.len().max(o.c.len());
        KPoly::from_coeffs((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &KPoly {
    type Output = KPoly;
    fn mul(self, o: &KPoly) -> KPoly {
        if self.is_zero() || o.is_zero() {
            return KPoly::zero();
        }
        let mut c = vec![BigInt::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        KPoly::from_coeffs(c)
    }
}

impl Neg for &KPoly {
    type Output = KPoly;
    fn neg(self) -> KPoly {
        KPoly::from_coeffs(self.c.iter().map(|v| -v).collect())
    }
}

/// An element of ℚ[κ]: integer polynomial over a positive denominator, kept reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KRatio {
    num: KPoly,
    den: BigInt,
}

impl KRatio {
    pub fn new(num: KPoly, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (num, den) = if den.is_negative() { (-&num, -den) } else { (num, den) };
        let g = num.content().gcd(&den);
        if g.is_zero() || g.is_one() {
            let den = if num.is_zero() { BigInt::one() } else { den };
            return KRatio { num, den };
        }
        KRatio { num: KPoly::from_coeffs(num.c.iter().map(|v| v / &g).collect()), den: den / g }
    }

    pub fn zero() -> Self {
        KRatio { num: KPoly::zero(), den: BigInt::one() }
    }

    pub fn one() -> Self {
        KRatio::from_rational(&BigRational::one())
    }

    pub fn from_rational(r: &BigRational) -> Self {
        KRatio::new(KPoly::constant(r.numer().clone()), r.denom().clone())
    }

    /// The element `κ` itself.
    pub fn kappa() -> Self {
        KRatio::new(KPoly::linear(BigInt::zero(), BigInt::one()), BigInt::one())
    }

    pub fn numer(&self) -> &KPoly {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Coefficient of κ^i as a rational.
    pub fn coeff(&self, i: usize) -> BigRational {
        BigRational::new(self.num.coeff(i), self.den.clone())
    }

    pub fn sign(&self, kf: &KappaFixed) -> Ordering {
        self.num.sign(kf)
    }

    pub fn to_f64(&self, kf: &KappaFixed) -> f64 {
        if self.num.is_zero() {
            return 0.0;
        }
        // Divide first in fixed point to keep the quotient's precision.
        let v = self.num.to_f64(kf);
        if v.is_finite() && v != 0.0 && self.den.bits() < 1000 {
            return v / self.den.to_f64().unwrap_or(f64::INFINITY);
        }
        let kk = kf.at_least(self.num.max_coeff_bits() + 80);
        let (t, _, sh) = self.num.eval_fixed(&kk);
        ratio_to_f64(&t, &(&self.den << sh as usize))
    }

    pub fn inv_checked(&self) -> Option<KRatio> {
        // Only constants are invertible inside ℚ[κ].
        match self.num.degree() {
            Some(0) => Some(KRatio::new(KPoly::constant(self.den.clone()), self.num.coeff(0))),
            _ => None,
        }
    }
}

impl Add for &KRatio {
    type Output = KRatio;
    fn add(self, o: &KRatio) -> KRatio {
        KRatio::new(&self.num.scale(&o.den) + &o.num.scale(&self.den), &self.den * &o.den)
    }
}

impl Sub for &KRatio {
    type Output = KRatio;
    fn sub(self, o: &KRatio) -> KRatio {
        KRatio::new(&self.num.scale(&o.den) - &o.num.scale(&self.den), &self.den * &o.den)
    }
}

impl Mul for &KRatio {
    type Output = KRatio;
    fn mul(self, o: &KRatio) -> KRatio {
        KRatio::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Neg for &KRatio {
    type Output = KRatio;
    fn neg(self) -> KRatio {
        KRatio::new(-&self.num, self.den.clone())
    }
}

impl fmt::Display for KRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/{}", self.num, self.den)
        }
    }
}

/// Operations needed by fraction-free elimination.
pub trait BareissRing: Clone {
    fn ring_zero() -> Self;
    fn ring_one() -> Self;
    fn vanishes(&self) -> bool;
    fn mul_sub(a: &Self, b: &Self, c: &Self, d: &Self) -> Self;
    fn div_exact(&self, d: &Self) -> Self;
    fn negated(&self) -> Self;
}

impl BareissRing for BigInt {
    fn ring_zero() -> Self {
        Zero::zero()
    }
    fn ring_one() -> Self {
        One::one()
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul_sub(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        a * b - c * d
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn negated(&self) -> Self {
        -self
    }
}

impl BareissRing for KPoly {
    fn ring_zero() -> Self {
        KPoly::zero()
    }
    fn ring_one() -> Self {
        KPoly::constant(BigInt::one())
    }
    fn vanishes(&self) -> bool {
        self.c.is_empty()
    }
    fn mul_sub(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        &(a * b) - &(c * d)
    }
    fn div_exact(&self, d: &Self) -> Self {
        KPoly::div_exact(self, d).expect("Bareiss quotient must be exact")
    }
    fn negated(&self) -> Self {
        -self
    }
}

/// Determinant by fraction-free Gaussian elimination with row pivoting.
pub fn bareiss_det<T: BareissRing>(mut a: Vec<Vec<T>>) -> T {
    let n = a.len();
    if n == 0 {
        return T::ring_one();
    }
    let mut negate = false;
    let mut prev = T::ring_one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].vanishes()) else {
            return T::ring_zero();
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        if k + 1 == n {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = T::mul_sub(&a[i][j], &a[k][k], &a[i][k], &a[k][j]);
                a[i][j] = v.div_exact(&prev);
            }
            a[i][k] = T::ring_zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        d.negated()
    } else {
        d
    }
}

/// Determinant of a matrix over ℚ[κ], computed exactly.
pub fn det_kratio(m: &[Vec<KRatio>]) -> KRatio {
    let n = m.len();
    let mut scale = BigInt::one();
    let mut rows = Vec::with_capacity(n);
    for row in m {
        let l = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(&v.den));
        rows.push(row.iter().map(|v| v.num.scale(&(&l / &v.den))).collect::<Vec<_>>());
        scale *= l;
    }
    KRatio::new(bareiss_det(rows), scale)
}

/// Determinant over ℚ by fraction-free elimination.
pub fn det_rational(m: &[Vec<BigRational>]) -> BigRational {
    let mut scale = BigInt::one();
    let mut rows = Vec::with_capacity(m.len());
    for row in m {
        let l = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        rows.push(row.iter().map(|v| v.numer() * (&l / v.denom())).collect::<Vec<_>>());
        scale *= l;
    }
    BigRational::new(bareiss_det(rows), scale)
}

/// Parses "p/q" or "p" into a rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(BigRational::new(p, q))
            }
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}
