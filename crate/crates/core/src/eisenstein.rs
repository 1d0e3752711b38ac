//! Exact arithmetic in ℚ(ζ), ζ = e^{2πi/3}, written as a + bζ with ζ² = −1 − ζ.
//!
//! A rational function with rational coefficients takes values in ℚ(ζ) at ζ,
//! and its value at ζ⁻¹ is the Galois conjugate, so ⟨f(ζ)⟩ is computable exactly.

use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Eis {
    pub a: BigRational,
    pub b: BigRational,
}

impl Eis {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Eis { a, b }
    }

    pub fn zero() -> Self {
        Eis::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Eis::new(BigRational::one(), BigRational::zero())
    }

    pub fn zeta() -> Self {
        Eis::new(BigRational::zero(), BigRational::one())
    }

    pub fn rational(a: BigRational) -> Self {
        Eis::new(a, BigRational::zero())
    }

    pub fn int(v: i64) -> Self {
        Eis::rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Image under ζ ↦ ζ⁻¹ = ζ².
    pub fn conj(&self) -> Self {
        Eis::new(&self.a - &self.b, -&self.b)
    }

    /// Field norm a² − ab + b².
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.a * &self.b + &self.b * &self.b
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(Eis::new(c.a / &n, c.b / n))
    }

    /// ζ^k.
    pub fn zeta_pow(k: i64) -> Self {
        match k.rem_euclid(3) {
            0 => Eis::one(),
            1 => Eis::zeta(),
            _ => Eis::zeta().conj(),
        }
    }

    pub fn pow(&self, k: i64) -> Option<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = Eis::one();
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        Some(acc)
    }

    /// ⟨ζ^k·f⟩ = ζ^k f(ζ) − ζ^{−k} f(ζ⁻¹) where `self` = f(ζ).
    pub fn bracket(&self, k: i64) -> Self {
        let g = &Eis::zeta_pow(k) * self;
        &g - &g.conj()
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        let a = crate::exact::rat_to_f64(&self.a);
        let b = crate::exact::rat_to_f64(&self.b);
        num_complex::Complex64::new(a - 0.5 * b, b * 0.866_025_403_784_438_6)
    }
}

impl Add for &Eis {
    type Output = Eis;
    fn add(self, o: &Eis) -> Eis {
        Eis::new(&self.a + &o.a, &self.b + &o.b)
    }
}

impl Sub for &Eis {
    type Output = Eis;
    fn sub(self, o: &Eis) -> Eis {
        Eis::new(&self.a - &o.a, &self.b - &o.b)
    }
}

impl Neg for &Eis {
    type Output = Eis;
    fn neg(self) -> Eis {
        Eis::new(-&self.a, -&self.b)
    }
}

impl Mul for &Eis {
    type Output = Eis;
    fn mul(self, o: &Eis) -> Eis {
        let bd = &self.b * &o.b;
        Eis::new(&self.a * &o.a - &bd, &self.a * &o.b + &self.b * &o.a - bd)
    }
}

/// Evaluates a rational function with rational coefficients (lowest degree first) at ζ.
pub fn eval_rational_function(num: &[BigRational], den: &[BigRational]) -> Option<Eis> {
    let horner = |c: &[BigRational]| {
        c.iter().rev().fold(Eis::zero(), |acc, v| &(&acc * &Eis::zeta()) + &Eis::rational(v.clone()))
    };
    let d = horner(den);
    Some(&horner(num) * &d.inv()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_relations() {
        let z = Eis::zeta();
        let z3 = z.pow(3).unwrap();
        assert_eq!(z3, Eis::one());
        assert_eq!(&(&Eis::one() + &z) + &(&z * &z), Eis::zero());
        assert_eq!(z.inv().unwrap(), z.conj());
        let c = z.to_c64();
        assert!((c.re + 0.5).abs() < 1e-15 && (c.im - 0.866_025_403_784_438_6).abs() < 1e-15);
    }

    #[test]
    fn bracket_is_purely_imaginary() {
        let f = Eis::new(BigRational::new(3.into(), 7.into()), BigRational::new((-2).into(), 5.into()));
        for k in -4..5 {
            let b = f.bracket(k).to_c64();
            assert!(b.re.abs() < 1e-15);
        }
    }
}
