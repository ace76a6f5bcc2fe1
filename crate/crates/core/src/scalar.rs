//! Exact scalars in ℚ(i)[τ, τ⁻¹], where τ is a formal symbol standing for 2π.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact complex rational.
pub type CRat = Complex<BigRational>;

pub const TAU_F64: f64 = std::f64::consts::TAU;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn crat_is_zero(c: &CRat) -> bool {
    c.re.is_zero() && c.im.is_zero()
}

/// A Laurent polynomial in τ with exact Gaussian-rational coefficients.
///
/// Terms are kept sorted by τ-power with zero coefficients pruned, so
/// structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    terms: Vec<(i32, CRat)>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::monomial(0, Complex::new(BigRational::from_integer(n.into()), BigRational::zero()))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self::monomial(0, Complex::new(r, BigRational::zero()))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::from_rational(rat(n, d))
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::monomial(0, Complex::new(BigRational::zero(), BigRational::one()))
    }

    /// τ^k.
    pub fn tau_pow(k: i32) -> Self {
        Self::monomial(k, Complex::new(BigRational::one(), BigRational::zero()))
    }

    /// c·τ^k.
    pub fn monomial(k: i32, c: CRat) -> Self {
        if crat_is_zero(&c) {
            Self::zero()
        } else {
            Scalar { terms: vec![(k, c)] }
        }
    }

    /// Builds from arbitrary (power, coefficient) pairs, merging and pruning.
    pub fn from_terms<I: IntoIterator<Item = (i32, CRat)>>(it: I) -> Self {
        let mut v: Vec<(i32, CRat)> = it.into_iter().collect();
        v.sort_by_key(|t| t.0);
        let mut out: Vec<(i32, CRat)> = Vec::with_capacity(v.len());
        for (k, c) in v {
            match out.last_mut() {
                Some((lk, lc)) if *lk == k => *lc = lc.clone() + c,
                _ => out.push((k, c)),
            }
        }
        out.retain(|(_, c)| !crat_is_zero(c));
        Scalar { terms: out }
    }

    pub fn terms(&self) -> &[(i32, CRat)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms[0].0 == 0
            && self.terms[0].1.re.is_one()
            && self.terms[0].1.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar {
            terms: self.terms.iter().map(|(k, c)| (*k, c.conj())).collect(),
        }
    }

    pub fn scale_rat(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Scalar {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, Complex::new(&c.re * r, &c.im * r)))
                .collect(),
        }
    }

    /// Multiplicative inverse; only monomials c·τ^k are invertible in this ring.
    pub fn inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (k, c) = &self.terms[0];
        let norm = &c.re * &c.re + &c.im * &c.im;
        let inv = Complex::new(&c.re / &norm, -(&c.im / &norm));
        Some(Scalar { terms: vec![(-k, inv)] })
    }

    /// Substitutes τ → 2π.
    pub fn eval(&self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let re = c.re.to_f64().unwrap_or(f64::NAN);
            let im = c.im.to_f64().unwrap_or(f64::NAN);
            acc += Complex64::new(re, im) * TAU_F64.powi(*k);
        }
        acc
    }

    /// Rational constant part if the scalar is real and τ-free.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [(0, c)] if c.im.is_zero() => Some(c.re.clone()),
            _ => None,
        }
    }

    /// e^{iτq} for q a multiple of 1/4: one of 1, i, -1, -i.
    pub fn unit_phase(quarter_turns: i64) -> Self {
        match quarter_turns.rem_euclid(4) {
            0 => Self::one(),
            1 => Self::i(),
            2 => Self::from_int(-1),
            _ => -Self::i(),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            match (c.re.is_zero(), c.im.is_zero()) {
                (false, true) => write!(f, "{}", c.re)?,
                (true, false) => write!(f, "{}i", c.im)?,
                _ => {
                    let sign = if c.im.is_negative() { "-" } else { "+" };
                    write!(f, "({}{}{}i)", c.re, sign, c.im.abs())?
                }
            }
            if *k != 0 {
                write!(f, "·τ^{k}")?;
            }
        }
        Ok(())
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < rhs.terms.len() {
            if j >= rhs.terms.len() || (i < self.terms.len() && self.terms[i].0 < rhs.terms[j].0) {
                out.push(self.terms[i].clone());
                i += 1;
            } else if i >= self.terms.len() || rhs.terms[j].0 < self.terms[i].0 {
                out.push(rhs.terms[j].clone());
                j += 1;
            } else {
                let c = &self.terms[i].1 + &rhs.terms[j].1;
                if !crat_is_zero(&c) {
                    out.push((self.terms[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        Scalar { terms: out }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        if rhs.is_zero() {
            return;
        }
        if self.is_zero() {
            *self = rhs.clone();
            return;
        }
        *self = &*self + rhs;
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

fn crat_mul(a: &CRat, b: &CRat) -> CRat {
    if a.im.is_zero() && b.im.is_zero() {
        return Complex::new(&a.re * &b.re, BigRational::zero());
    }
    if a.im.is_zero() {
        return Complex::new(&a.re * &b.re, &a.re * &b.im);
    }
    if b.im.is_zero() {
        return Complex::new(&a.re * &b.re, &a.im * &b.re);
    }
    a * b
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.terms.len() == 1 && rhs.terms.len() == 1 {
            let c = crat_mul(&self.terms[0].1, &rhs.terms[0].1);
            return Scalar::monomial(self.terms[0].0 + rhs.terms[0].0, c);
        }
        let mut prods = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (k1, c1) in &self.terms {
            for (k2, c2) in &rhs.terms {
                prods.push((k1 + k2, crat_mul(c1, c2)));
            }
        }
        Scalar::from_terms(prods)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_i_squared() {
        let a = &Scalar::tau_pow(1) * &Scalar::i();
        assert_eq!(&a * &a, -Scalar::tau_pow(2));
    }

    #[test]
    fn additive_identity_and_conj() {
        let a = &Scalar::tau_pow(1) * &(Scalar::one() + Scalar::i());
        assert_eq!(&a + &Scalar::zero(), a);
        assert_eq!(a.conj(), &Scalar::tau_pow(1) * &(Scalar::one() - Scalar::i()));
        assert!((&a - &a).is_zero());
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn numeric_eval_examples() {
        assert!((Scalar::tau_pow(1).eval().re - 6.283185307179586).abs() < 1e-15);
        let it = (&Scalar::i() * &Scalar::tau_pow(1)).eval();
        assert!(it.re.abs() < 1e-15 && (it.im - TAU_F64).abs() < 1e-15);
        assert_eq!(Scalar::zero().eval(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn inverse_of_monomial() {
        let a = &Scalar::i() * &Scalar::tau_pow(1).scale_rat(&rat(3, 1));
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_one());
        assert!((Scalar::one() + Scalar::tau_pow(1)).inverse().is_none());
    }

    #[test]
    fn unit_phases() {
        assert_eq!(Scalar::unit_phase(2), Scalar::from_int(-1));
        assert_eq!(Scalar::unit_phase(-1), -Scalar::i());
    }
}
