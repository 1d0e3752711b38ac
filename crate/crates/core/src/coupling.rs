//! The coupling function P(x, y), its asymptotic coefficients U_s, and
//! Newton divided differences.
//!
//! For x ≤ −1, expanding (−1−t)^N with N = −x−1 and integrating each power
//! of t along the arc from ζ to ζ⁻¹ gives
//!
//! P(x, y) = (−1)^N [ C(N, y)/3 − κ Σ_{k≠y} C(N, k) χ(k−y) / (2(k−y)) ],
//!
//! where χ(j) = 0, 1, −1 for j ≡ 0, 1, 2 (mod 3) and κ = √3/π. Other
//! arguments are first reduced with the two symmetries.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};

use crate::exact::{rat_to_f64, KPoly, KRatio, KappaFixed};
use crate::Error;

/// ζ = e^{2πi/3}.
pub const ZETA: Complex64 = Complex64::new(-0.5, 0.866_025_403_784_438_6);

/// ⟨f(ζ)⟩ = f(ζ) − f(ζ⁻¹).
pub fn bracket<F: Fn(Complex64) -> Complex64>(f: F) -> Complex64 {
    f(ZETA) - f(ZETA.inv())
}

/// ζ^k for any integer k.
pub fn zeta_pow(k: i64) -> Complex64 {
    match k.mod_floor(&3) {
        0 => Complex64::new(1.0, 0.0),
        1 => ZETA,
        _ => ZETA.conj(),
    }
}

/// χ(j) = 0, 1, −1 for j ≡ 0, 1, 2 (mod 3); equals (2/√3)·sin(2πj/3).
pub fn chi(j: i64) -> i64 {
    [0, 1, -1][j.mod_floor(&3) as usize]
}

/// An exact value p + r·(√3/π).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CouplingValue {
    pub p: BigRational,
    pub r: BigRational,
}

impl CouplingValue {
    pub fn new(p: BigRational, r: BigRational) -> Self {
        CouplingValue { p, r }
    }

    pub fn zero() -> Self {
        CouplingValue::new(BigRational::zero(), BigRational::zero())
    }

    pub fn rational(p: BigRational) -> Self {
        CouplingValue::new(p, BigRational::zero())
    }

    pub fn from_ints(pn: i64, pd: i64, rn: i64, rd: i64) -> Self {
        CouplingValue::new(BigRational::new(pn.into(), pd.into()), BigRational::new(rn.into(), rd.into()))
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.r.is_zero()
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        CouplingValue::new(&self.p * s, &self.r * s)
    }

    /// Product, which in general leaves ℚ + ℚκ and lands in ℚ[κ].
    pub fn mul(&self, o: &CouplingValue) -> KRatio {
        &self.to_kratio() * &o.to_kratio()
    }

    pub fn to_kratio(&self) -> KRatio {
        let den = self.p.denom().lcm(self.r.denom());
        KRatio::new(
            KPoly::linear(self.p.numer() * (&den / self.p.denom()), self.r.numer() * (&den / self.r.denom())),
            den,
        )
    }

    pub fn to_f64(&self, kf: &KappaFixed) -> f64 {
        if self.r.is_zero() {
            return rat_to_f64(&self.p);
        }
        self.to_kratio().to_f64(kf)
    }

    /// Float value, computing κ to the precision this value needs.
    pub fn to_f64_auto(&self) -> f64 {
        let bits =
            self.p.numer().bits().max(self.r.numer().bits()) + self.p.denom().bits().max(self.r.denom().bits()) + 96;
        self.to_f64(&KappaFixed::new(bits))
    }
}

impl Add for &CouplingValue {
    type Output = CouplingValue;
    fn add(self, o: &CouplingValue) -> CouplingValue {
        CouplingValue::new(&self.p + &o.p, &self.r + &o.r)
    }
}

impl Sub for &CouplingValue {
    type Output = CouplingValue;
    fn sub(self, o: &CouplingValue) -> CouplingValue {
        CouplingValue::new(&self.p - &o.p, &self.r - &o.r)
    }
}

impl Neg for &CouplingValue {
    type Output = CouplingValue;
    fn neg(self) -> CouplingValue {
        CouplingValue::new(-&self.p, -&self.r)
    }
}

impl fmt::Display for CouplingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}·(√3/π)", self.p, self.r)
    }
}

/// Maps (x, y) with the symmetries P(x,y) = P(y,x) = P(−x−y−1, x) to a point with x ≤ −1.
pub fn reduce_domain(x: i64, y: i64) -> (i64, i64) {
    if x <= -1 {
        (x, y)
    } else if y <= -1 {
        (y, x)
    } else {
        (-x - y - 1, x)
    }
}

/// lcm(1, …, m) via prime powers.
pub fn lcm_upto(m: u64) -> BigInt {
    let m = m as usize;
    let mut sieve = vec![true; m + 1];
    let mut acc = BigInt::one();
    for p in 2..=m {
        if !sieve[p] {
            continue;
        }
        let mut q = p * p;
        while q <= m {
            sieve[q] = false;
            q += p;
        }
        let mut pk = p;
        while pk <= m / p {
            pk *= p;
        }
        acc *= BigInt::from(pk);
    }
    acc
}

/// Exact P(x, y) as integers (p_num, r_num, den) with value (p_num + r_num·κ)/den.
pub fn coupling_scaled(x: i64, y: i64) -> (BigInt, BigInt, BigInt) {
    let (x, y) = reduce_domain(x, y);
    let n = (-x - 1) as u64;
    let jmax = (y.unsigned_abs()).max((n as i64 - y).unsigned_abs());
    // den = 6·lcm(1..jmax) so that both C/3 and C/(2j) are integral multiples of 1/den.
    let den = lcm_upto(jmax) * BigInt::from(6);
    let mut binom = BigInt::one();
    let mut p_num = BigInt::zero();
    let mut r_num = BigInt::zero();
    for k in 0..=n {
        let j = k as i64 - y;
        if j == 0 {
            p_num = &binom * (&den / BigInt::from(3));
        } else {
            let c = chi(j);
            if c != 0 {
                let t = &binom * (&den / BigInt::from(2 * j));
                if c == 1 {
                    r_num -= t;
                } else {
                    r_num += t;
                }
            }
        }
        binom = binom * BigInt::from(n - k) / BigInt::from(k + 1);
    }
    if n % 2 == 1 {
        p_num = -p_num;
        r_num = -r_num;
    }
    (p_num, r_num, den)
}

/// Exact value of the coupling function.
pub fn coupling_p(x: i64, y: i64) -> CouplingValue {
    let (p, r, d) = coupling_scaled(x, y);
    CouplingValue::new(BigRational::new(p, d.clone()), BigRational::new(r, d))
}

/// Leading asymptotic term Im(ζ^{x−y−1}/(−x+yζ))/π, accurate to relative O(1/(|x|+|y|)).
pub fn coupling_asymptotic(x: i64, y: i64) -> f64 {
    let w = zeta_pow(x - y - 1) / Complex64::new(-(x as f64) + y as f64 * ZETA.re, y as f64 * ZETA.im);
    w.im / core::f64::consts::PI
}

/// Evaluation strategy for float coupling values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    /// Exact evaluation followed by a correctly scaled conversion.
    Exact,
    /// Asymptotic leading term beyond `|x|+|y| > 400`, exact otherwise.
    Fast,
}

pub fn coupling_f64(x: i64, y: i64, precision: Precision) -> f64 {
    if precision == Precision::Fast && x.abs() + y.abs() > 400 {
        return coupling_asymptotic(x, y);
    }
    coupling_p(x, y).to_f64_auto()
}

/// Anything that can hand out exact coupling values.
pub trait CouplingSource {
    fn coupling(&self, x: i64, y: i64) -> CouplingValue;
}

/// Uncached evaluation of the closed form.
#[derive(Clone, Copy, Debug, Default)]
pub struct Direct;

impl CouplingSource for Direct {
    fn coupling(&self, x: i64, y: i64) -> CouplingValue {
        coupling_p(x, y)
    }
}

impl<T: CouplingSource + ?Sized> CouplingSource for &T {
    fn coupling(&self, x: i64, y: i64) -> CouplingValue {
        (**self).coupling(x, y)
    }
}

/// Exact values on a rectangle, stored as numerators over one common denominator.
///
/// The boundary row and column come from the closed form; the interior is
/// filled with P(x,y) = δ_{(x,y),(0,0)} − P(x−1,y) − P(x,y−1), which only adds.
#[derive(Clone, Debug)]
pub struct CouplingTable {
    x0: i64,
    y0: i64,
    w: usize,
    h: usize,
    den: BigInt,
    p: Vec<BigInt>,
    r: Vec<BigInt>,
}

impl CouplingTable {
    pub fn new(x0: i64, x1: i64, y0: i64, y1: i64) -> Self {
        assert!(x1 >= x0 && y1 >= y0, "empty table");
        let w = (x1 - x0 + 1) as usize;
        let h = (y1 - y0 + 1) as usize;
        let mut border = Vec::new();
        for i in 0..w {
            let x = x0 + i as i64;
            border.push(((x, y0), coupling_scaled(x, y0)));
        }
        for j in 1..h {
            let y = y0 + j as i64;
            border.push(((x0, y), coupling_scaled(x0, y)));
        }
        let den = border.iter().fold(BigInt::one(), |acc, (_, (_, _, d))| acc.lcm(d));
        let mut p = vec![BigInt::zero(); w * h];
        let mut r = vec![BigInt::zero(); w * h];
        for ((x, y), (pn, rn, d)) in border {
            let f = &den / d;
            let idx = (y - y0) as usize * w + (x - x0) as usize;
            p[idx] = pn * &f;
            r[idx] = rn * f;
        }
        for j in 1..h {
            for i in 1..w {
                let (x, y) = (x0 + i as i64, y0 + j as i64);
                let a = j * w + i - 1;
                let b = (j - 1) * w + i;
                let mut pv = -(&p[a] + &p[b]);
                let rv = -(&r[a] + &r[b]);
                if x == 0 && y == 0 {
                    pv += &den;
                }
                p[j * w + i] = pv;
                r[j * w + i] = rv;
            }
        }
        CouplingTable { x0, y0, w, h, den, p, r }
    }

    /// Smallest table containing every difference of the given points.
    pub fn for_offsets<I: IntoIterator<Item = (i64, i64)>>(offsets: I) -> Self {
        let mut b = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
        for (x, y) in offsets {
            b = (b.0.min(x), b.1.max(x), b.2.min(y), b.3.max(y));
        }
        if b.0 > b.1 {
            return CouplingTable::new(0, 0, 0, 0);
        }
        CouplingTable::new(b.0, b.1, b.2, b.3)
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= self.x0 && y >= self.y0 && ((x - self.x0) as usize) < self.w && ((y - self.y0) as usize) < self.h
    }

    fn index(&self, x: i64, y: i64) -> Option<usize> {
        self.contains(x, y).then(|| (y - self.y0) as usize * self.w + (x - self.x0) as usize)
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    /// Numerators over [`CouplingTable::den`].
    pub fn scaled(&self, x: i64, y: i64) -> Option<(&BigInt, &BigInt)> {
        self.index(x, y).map(|i| (&self.p[i], &self.r[i]))
    }

    pub fn get(&self, x: i64, y: i64) -> Option<CouplingValue> {
        self.scaled(x, y).map(|(p, r)| {
            CouplingValue::new(
                BigRational::new(p.clone(), self.den.clone()),
                BigRational::new(r.clone(), self.den.clone()),
            )
        })
    }

    pub fn bounds(&self) -> (i64, i64, i64, i64) {
        (self.x0, self.x0 + self.w as i64 - 1, self.y0, self.y0 + self.h as i64 - 1)
    }

    /// Converts every entry to f64 with one shared high-precision κ.
    pub fn to_float(&self) -> FloatCouplingTable {
        let maxbits = self.p.iter().chain(self.r.iter()).map(|v| v.bits()).max().unwrap_or(0).max(self.den.bits());
        let kf = KappaFixed::new(maxbits + 96);
        let bshift = kf.bits() as usize;
        let denb = &self.den << bshift;
        let v = self
            .p
            .iter()
            .zip(self.r.iter())
            .map(|(p, r)| {
                let t = (p << bshift) + r * kf.scaled();
                crate::exact::ratio_to_f64(&t, &denb)
            })
            .collect();
        FloatCouplingTable { x0: self.x0, y0: self.y0, w: self.w, h: self.h, v }
    }
}

impl CouplingSource for CouplingTable {
    fn coupling(&self, x: i64, y: i64) -> CouplingValue {
        self.get(x, y).unwrap_or_else(|| coupling_p(x, y))
    }
}

/// Float coupling values on a rectangle.
#[derive(Clone, Debug)]
pub struct FloatCouplingTable {
    x0: i64,
    y0: i64,
    w: usize,
    h: usize,
    v: Vec<f64>,
}

impl FloatCouplingTable {
    pub fn get(&self, x: i64, y: i64) -> Option<f64> {
        let (i, j) = (x - self.x0, y - self.y0);
        if i < 0 || j < 0 || i as usize >= self.w || j as usize >= self.h {
            return None;
        }
        Some(self.v[j as usize * self.w + i as usize])
    }

    pub fn value(&self, x: i64, y: i64) -> f64 {
        self.get(x, y).unwrap_or_else(|| coupling_f64(x, y, Precision::Exact))
    }
}

/// U_0(a, b) = (1/2πi)⟨ζ^{a−b−1}⟩ = χ(a−b−1)·κ/2, exactly.
pub fn u0_exact(a: i64, b: i64) -> CouplingValue {
    CouplingValue::new(BigRational::zero(), BigRational::new(chi(a - b - 1).into(), 2.into()))
}

/// Parameters of the U_s extrapolation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UFitConfig {
    pub r0: i64,
    pub guard: usize,
    pub tolerance: f64,
}

impl Default for UFitConfig {
    fn default() -> Self {
        UFitConfig { r0: 200, guard: 3, tolerance: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UEstimate {
    pub s: usize,
    pub a: i64,
    pub b: i64,
    pub value: f64,
    pub error: f64,
}

/// Exact coefficients of the polynomial through (h_k, v_k), lowest degree first.
fn interpolate_exact(h: &[BigRational], v: &[CouplingValue]) -> Vec<CouplingValue> {
    let n = h.len();
    // Newton divided differences.
    let mut dd: Vec<CouplingValue> = v.to_vec();
    let mut coef = vec![dd[0].clone()];
    for order in 1..n {
        for i in (order..n).rev() {
            let diff = &dd[i] - &dd[i - 1];
            let step = &h[i] - &h[i - order];
            dd[i] = diff.scale(&step.recip());
        }
        coef.push(dd[order].clone());
    }
    // Expand Newton form into monomials by Horner on polynomials.
    let mut poly: Vec<CouplingValue> = vec![coef[n - 1].clone()];
    for k in (0..n - 1).rev() {
        let mut next = vec![CouplingValue::zero(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] = &next[i + 1] + c;
            next[i] = &next[i] - &c.scale(&h[k]);
        }
        next[0] = &next[0] + &coef[k];
        poly = next;
    }
    poly
}

fn u_fit_exact(s: usize, a: i64, b: i64, base: i64, guard: usize) -> CouplingValue {
    let npts = s + guard + 1;
    let mut hs = Vec::with_capacity(npts);
    let mut vs = Vec::with_capacity(npts);
    for k in 1..=npts as i64 {
        let rr = base * k;
        let h = BigRational::new(BigInt::one(), BigInt::from(3 * rr));
        let v = coupling_p(-3 * rr - 1 + a, -1 + b).scale(&BigRational::from_integer(BigInt::from(3 * rr)));
        hs.push(h);
        vs.push(v);
    }
    interpolate_exact(&hs, &vs).swap_remove(s)
}

/// Estimates U_s(a, b) from exact samples of (3r)·P(−3r−1+a, −1+b).
pub fn u_coefficient(s: usize, a: i64, b: i64, cfg: &UFitConfig) -> Result<UEstimate, Error> {
    let fine = u_fit_exact(s, a, b, cfg.r0, cfg.guard);
    let coarse = u_fit_exact(s, a, b, 2 * cfg.r0, cfg.guard);
    let value = fine.to_f64_auto();
    let error = libm::fabs(coarse.to_f64_auto() - value);
    if !(error <= cfg.tolerance) {
        return Err(Error::IllConditioned { estimate: error });
    }
    Ok(UEstimate { s, a, b, value, error })
}

/// Node sequence and order of a divided difference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DividedDifferenceSpec {
    pub nodes: Vec<i64>,
    pub order: usize,
}

/// Values that divided differences can be taken of.
pub trait DdValue: Clone {
    fn minus(&self, o: &Self) -> Self;
    fn div_int(&self, d: i64) -> Self;
}

impl DdValue for f64 {
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn div_int(&self, d: i64) -> Self {
        self / d as f64
    }
}

impl DdValue for CouplingValue {
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn div_int(&self, d: i64) -> Self {
        self.scale(&BigRational::new(BigInt::one(), BigInt::from(d)))
    }
}

/// 𝒟^r f(c_1) over the given nodes.
pub fn divided_difference<T: DdValue, F: Fn(i64) -> T>(f: F, spec: &DividedDifferenceSpec) -> Result<T, Error> {
    let c = &spec.nodes;
    if c.len() < spec.order + 1 {
        return Err(Error::InsufficientNodes);
    }
    if c.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NonIncreasingIndices);
    }
    let mut d: Vec<T> = c[..=spec.order].iter().map(|&x| f(x)).collect();
    for r in 1..=spec.order {
        for j in 0..=spec.order - r {
            d[j] = d[j + 1].minus(&d[j]).div_int(c[j + r] - c[j]);
        }
    }
    Ok(d.swap_remove(0))
}

fn binom(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Leading term of 𝒟^l_y 𝒟^k_x P(r_n+x+y, s_n+q(x+y)).
pub fn dd_p_leading(k: u32, l: u32, r_n: i64, s_n: i64, q: Ratio<i64>) -> Result<f64, Error> {
    if r_n == 0 && s_n == 0 {
        return Err(Error::DegenerateDirection);
    }
    let qf = *q.numer() as f64 / *q.denom() as f64;
    let m = (k + l) as i32;
    let num = zeta_pow(r_n - s_n - 1) * (Complex64::new(1.0, 0.0) - ZETA * qf).powi(m);
    let den = (Complex64::new(-(r_n as f64), 0.0) + ZETA * s_n as f64).powi(m + 1);
    Ok(binom((k + l) as u64, k as u64) * (num / den).im / core::f64::consts::PI)
}

/// Exact 𝒟^l_y 𝒟^k_x P(r_n+x+y, s_n+q(x+y)) at x = a_1, y = b_1.
#[allow(clippy::too_many_arguments)]
pub fn dd_p_exact<S: CouplingSource>(
    src: &S,
    k: usize,
    l: usize,
    r_n: i64,
    s_n: i64,
    q: Ratio<i64>,
    a: &[i64],
    b: &[i64],
) -> Result<CouplingValue, Error> {
    let xs = DividedDifferenceSpec { nodes: a.to_vec(), order: k };
    let ys = DividedDifferenceSpec { nodes: b.to_vec(), order: l };
    if a.len() <= k || b.len() <= l {
        return Err(Error::InsufficientNodes);
    }
    for &x in &a[..=k] {
        for &y in &b[..=l] {
            if !(q * Ratio::from_integer(x + y)).is_integer() {
                return Err(Error::NonIntegerIndex);
            }
        }
    }
    let inner = |y: i64| {
        divided_difference(|x| src.coupling(r_n + x + y, s_n + (q * Ratio::from_integer(x + y)).to_integer()), &xs)
    };
    inner(b[0])?;
    divided_difference(|y| inner(y).unwrap_or_else(|_| CouplingValue::zero()), &ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce_domain(-3, 5), (-3, 5));
        assert_eq!(reduce_domain(5, -3), (-3, 5));
        assert_eq!(reduce_domain(2, 1), (-4, 2));
    }

    #[test]
    fn small_values() {
        assert_eq!(coupling_p(0, 0), CouplingValue::rational(q(1, 3)));
        assert_eq!(coupling_p(-1, 0), CouplingValue::rational(q(1, 3)));
        assert_eq!(coupling_p(-1, -1), CouplingValue::new(q(0, 1), q(-1, 2)));
    }

    #[test]
    fn table_matches_direct() {
        let t = CouplingTable::new(-7, 6, -5, 8);
        for x in -7..=6 {
            for y in -5..=8 {
                assert_eq!(t.get(x, y).unwrap(), coupling_p(x, y), "({x},{y})");
            }
        }
        let f = t.to_float();
        let v = f.get(3, -2).unwrap();
        assert!((v - coupling_p(3, -2).to_f64_auto()).abs() < 1e-15);
    }

    #[test]
    fn lcm_small() {
        assert_eq!(lcm_upto(10), BigInt::from(2520));
        assert_eq!(lcm_upto(1), BigInt::one());
    }

    #[test]
    fn u0_closed_form_values() {
        assert!(u0_exact(1, 0).is_zero());
        assert_eq!(u0_exact(2, 0).r, q(1, 2));
        assert_eq!(u0_exact(0, 0).r, q(-1, 2));
    }

    #[test]
    fn divided_difference_basics() {
        let spec = DividedDifferenceSpec { nodes: vec![1, 3, 4, 8], order: 0 };
        assert_eq!(divided_difference(|x| (x * x) as f64, &spec).unwrap(), 1.0);
        let lin = DividedDifferenceSpec { nodes: vec![2, 5], order: 1 };
        assert_eq!(divided_difference(|x| 3.0 * x as f64 + 1.0, &lin).unwrap(), 3.0);
        let cubic = DividedDifferenceSpec { nodes: vec![0, 1, 3, 4, 9], order: 4 };
        let v = divided_difference(|x| (x * x * x) as f64 - 2.0 * x as f64, &cubic).unwrap();
        assert!(v.abs() < 1e-12);
        let short = DividedDifferenceSpec { nodes: vec![0, 1], order: 2 };
        assert_eq!(divided_difference(|x| x as f64, &short), Err(Error::InsufficientNodes));
    }

    #[test]
    fn leading_term_is_degenerate_at_origin() {
        assert_eq!(dd_p_leading(0, 0, 0, 0, Ratio::from_integer(1)), Err(Error::DegenerateDirection));
    }

    #[test]
    fn asymptotic_term_tracks_exact_values() {
        for &(x, y) in &[(-300, 120), (250, -40), (-90, -260)] {
            let e = coupling_p(x, y).to_f64_auto();
            let a = coupling_asymptotic(x, y);
            let n = (x.abs() + y.abs()) as f64;
            assert!((e - a).abs() < 5.0 / (n * n), "({x},{y}) {e} {a}");
        }
    }
}
