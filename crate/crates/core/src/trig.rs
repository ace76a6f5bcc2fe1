//! Exact trigonometric polynomials with polynomial factors.
//!
//! A [`TrigPoly`] is a finite sum of terms `c · ∏_v v^{p_v} e^{iτ (f_v/4) v}`
//! over an ordered list of variables. Frequencies are stored in quarter units
//! so that phases such as `e^{iτ t/4}` along interval variables stay exact.
//! Periodic variables carry whole frequencies and no polynomial factors.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Zero};
use crate::error::{Error, Result};
use crate::scalar::{Scalar, TAU_F64};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum VarKind {
    /// A circle coordinate in ℝ/ℤ.
    Periodic,
    /// A coordinate on the unit interval.
    Interval,
}

/// Ordered list of variable kinds shared by every coefficient in a computation.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct VarSpace(Arc<Vec<VarKind>>);

impl VarSpace {
    pub fn new(kinds: Vec<VarKind>) -> Self {
        VarSpace(Arc::new(kinds))
    }

    pub fn periodic(n: usize) -> Self {
        Self::new(vec![VarKind::Periodic; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn kind(&self, v: usize) -> VarKind {
        self.0[v]
    }

    pub fn kinds(&self) -> &[VarKind] {
        &self.0
    }

    /// This space followed by `extra`.
    pub fn extended(&self, extra: &[VarKind]) -> Self {
        let mut k = self.0.as_ref().clone();
        k.extend_from_slice(extra);
        Self::new(k)
    }

    pub fn prefix(&self, n: usize) -> Self {
        Self::new(self.0[..n].to_vec())
    }
}

/// Exponent data of one variable in a term.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Mono {
    /// Frequency in quarter units: the factor is `e^{iτ (freq/4) v}`.
    pub freq: i32,
    /// Power of the variable itself.
    pub pow: u32,
}

impl Mono {
    pub const ONE: Mono = Mono { freq: 0, pow: 0 };

    pub fn is_one(&self) -> bool {
        self.freq == 0 && self.pow == 0
    }

    fn times(self, o: Mono) -> Mono {
        Mono {
            freq: self.freq + o.freq,
            pow: self.pow + o.pow,
        }
    }
}

pub type Key = Vec<Mono>;

fn key_mul(a: &[Mono], b: &[Mono]) -> Key {
    a.iter().zip(b).map(|(x, y)| x.times(*y)).collect()
}

/// `1/(iτ f/4)` as an exact scalar.
fn inv_rate(freq: i32) -> Scalar {
    // 4/(iτ f) = -4i/f · τ^{-1}
    Scalar::monomial(
        -1,
        Complex::new(BigRational::zero(), BigRational::new(BigInt::from(-4), BigInt::from(freq))),
    )
}

fn factorial_ratio(p: u32, j: u32) -> BigInt {
    // p!/(p-j)!
    let mut acc = BigInt::one();
    for q in (p - j + 1)..=p {
        acc *= q;
    }
    acc
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TrigPoly {
    space: VarSpace,
    terms: BTreeMap<Key, Scalar>,
}

impl TrigPoly {
    pub fn zero(space: &VarSpace) -> Self {
        TrigPoly {
            space: space.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(space: &VarSpace, c: Scalar) -> Self {
        let mut p = Self::zero(space);
        p.add_term(vec![Mono::ONE; space.len()], c);
        p
    }

    pub fn one(space: &VarSpace) -> Self {
        Self::constant(space, Scalar::one())
    }

    pub fn term(space: &VarSpace, key: Key, c: Scalar) -> Self {
        assert_eq!(key.len(), space.len(), "key length must match the variable space");
        let mut p = Self::zero(space);
        p.add_term(key, c);
        p
    }

    /// `e^{iτ k v}` with `k` a whole frequency.
    pub fn exp(space: &VarSpace, var: usize, k: i32) -> Self {
        let mut key = vec![Mono::ONE; space.len()];
        key[var].freq = 4 * k;
        Self::term(space, key, Scalar::one())
    }

    /// `e^{iτ ⟨k, v⟩}` over the first `k.len()` variables.
    pub fn exp_vec(space: &VarSpace, k: &[i32]) -> Self {
        let mut key = vec![Mono::ONE; space.len()];
        for (m, kk) in key.iter_mut().zip(k) {
            m.freq = 4 * kk;
        }
        Self::term(space, key, Scalar::one())
    }

    /// The variable itself, `v`.
    pub fn var(space: &VarSpace, var: usize) -> Self {
        let mut key = vec![Mono::ONE; space.len()];
        key[var].pow = 1;
        Self::term(space, key, Scalar::one())
    }

    pub fn space(&self) -> &VarSpace {
        &self.space
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: Key, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &TrigPoly) {
        debug_assert_eq!(self.space, other.space);
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c.clone());
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(&self.space);
        }
        TrigPoly {
            space: self.space.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v * c))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    /// Coefficient of the constant term (all exponents zero).
    pub fn constant_term(&self) -> Scalar {
        self.terms
            .get(&vec![Mono::ONE; self.space.len()])
            .cloned()
            .unwrap_or_default()
    }

    /// True if every term is the constant monomial.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|k| k.iter().all(Mono::is_one))
    }

    /// True if the variable does not occur.
    pub fn is_free_of(&self, var: usize) -> bool {
        self.terms.keys().all(|k| k[var].is_one())
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(&self.space);
        for (k, c) in &self.terms {
            let m = k[var];
            if m.pow > 0 {
                let mut k2 = k.clone();
                k2[var].pow -= 1;
                out.add_term(k2, c.scale_rat(&BigRational::from_integer(m.pow.into())));
            }
            if m.freq != 0 {
                let rate = Scalar::monomial(
                    1,
                    Complex::new(BigRational::zero(), BigRational::new(m.freq.into(), 4.into())),
                );
                out.add_term(k.clone(), c * &rate);
            }
        }
        out
    }

    /// Antiderivative in an interval variable vanishing at `var = 0`.
    pub fn antiderivative(&self, var: usize) -> Result<Self> {
        if self.space.kind(var) == VarKind::Periodic {
            return Err(Error::PeriodicAntiderivative(var));
        }
        Ok(self.antiderivative_unchecked(var))
    }

    pub(crate) fn antiderivative_unchecked(&self, var: usize) -> Self {
        let mut out = Self::zero(&self.space);
        for (k, c) in &self.terms {
            let Mono { freq, pow } = k[var];
            if freq == 0 {
                let mut k2 = k.clone();
                k2[var].pow = pow + 1;
                out.add_term(k2, c.scale_rat(&BigRational::new(1.into(), (pow + 1).into())));
                continue;
            }
            // ∫_0^v u^p e^{au} du = Σ_j (-1)^j p!/(p-j)! v^{p-j} e^{av}/a^{j+1} - (-1)^p p!/a^{p+1}
            let ia = inv_rate(freq);
            let mut ia_pow = ia.clone();
            for j in 0..=pow {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                let coef = c * &ia_pow;
                let coef = coef.scale_rat(&BigRational::from_integer(factorial_ratio(pow, j) * sign));
                let mut k2 = k.clone();
                k2[var].pow = pow - j;
                out.add_term(k2, coef);
                if j < pow {
                    ia_pow = &ia_pow * &ia;
                }
            }
            let sign = if pow % 2 == 0 { -1 } else { 1 };
            let coef = (c * &ia_pow).scale_rat(&BigRational::from_integer(factorial_ratio(pow, pow) * sign));
            let mut k2 = k.clone();
            k2[var] = Mono::ONE;
            out.add_term(k2, coef);
        }
        out
    }

    /// Evaluates `var` at a rational point; the variable disappears from every key.
    ///
    /// Phases must land on quarter turns, otherwise the value leaves ℚ(i).
    pub fn eval_var(&self, var: usize, value: &BigRational) -> Result<Self> {
        let mut out = Self::zero(&self.space);
        for (k, c) in &self.terms {
            let Mono { freq, pow } = k[var];
            let turns = value * BigRational::from_integer(freq.into());
            if !turns.is_integer() {
                return Err(Error::InexactPhase(format!("e^(iτ·{}/4·{})", freq, value)));
            }
            let turns: i64 = turns.to_integer().try_into().map_err(|_| Error::InexactPhase(value.to_string()))?;
            let mut coef = c * &Scalar::unit_phase(turns);
            if pow > 0 {
                coef = coef.scale_rat(&num_traits::pow(value.clone(), pow as usize));
            }
            let mut k2 = k.clone();
            k2[var] = Mono::ONE;
            out.add_term(k2, coef);
        }
        Ok(out)
    }

    /// Exact `∫_0^1 d(var)`; valid for both kinds of variables.
    pub fn integrate_unit(&self, var: usize) -> Self {
        self.antiderivative_unchecked(var)
            .eval_var(var, &BigRational::one())
            .expect("whole-unit evaluation is always exact")
    }

    /// Mean over a periodic variable (its frequency-zero slice).
    pub fn fourier_integral(&self, var: usize) -> Result<Self> {
        if self.space.kind(var) != VarKind::Periodic {
            return Err(Error::WrongVarKind { var, expected: VarKind::Periodic });
        }
        let mut out = Self::zero(&self.space);
        for (k, c) in &self.terms {
            if k[var].freq == 0 && k[var].pow == 0 {
                out.add_term(k.clone(), c.clone());
            }
        }
        Ok(out)
    }

    /// Replaces variable `from` by variable `to` (so `from` disappears).
    pub fn merge_var(&self, from: usize, to: usize) -> Self {
        let mut out = Self::zero(&self.space);
        for (k, c) in &self.terms {
            let mut k2 = k.clone();
            k2[to] = k2[to].times(k2[from]);
            k2[from] = Mono::ONE;
            out.add_term(k2, c.clone());
        }
        out
    }

    /// Splits by the exponent data of `var`; each part no longer contains `var`.
    pub fn split_by(&self, var: usize) -> BTreeMap<Mono, TrigPoly> {
        let mut out: BTreeMap<Mono, TrigPoly> = BTreeMap::new();
        for (k, c) in &self.terms {
            let m = k[var];
            let mut k2 = k.clone();
            k2[var] = Mono::ONE;
            out.entry(m)
                .or_insert_with(|| Self::zero(&self.space))
                .add_term(k2, c.clone());
        }
        out
    }

    /// Moves into a new space; variable `i` goes to `map[i]`.
    /// Target slots not hit by `map` receive the trivial exponent.
    pub fn embed(&self, space: &VarSpace, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.space.len());
        let mut out = Self::zero(space);
        for (k, c) in &self.terms {
            let mut k2 = vec![Mono::ONE; space.len()];
            for (i, m) in k.iter().enumerate() {
                k2[map[i]] = k2[map[i]].times(*m);
            }
            out.add_term(k2, c.clone());
        }
        out
    }

    /// Restricts to a prefix space; dropped variables must not occur.
    pub fn truncate(&self, space: &VarSpace) -> Result<Self> {
        let n = space.len();
        let mut out = Self::zero(space);
        for (k, c) in &self.terms {
            if k[n..].iter().any(|m| !m.is_one()) {
                return Err(Error::LayoutMismatch("truncated variable still occurs".into()));
            }
            out.add_term(k[..n].to_vec(), c.clone());
        }
        Ok(out)
    }

    /// Pullback along an affine substitution.
    ///
    /// Source variable `j` becomes `Σ_a lin[j][a]·z_a + offset[j]` in the target
    /// space. A source variable with polynomial factors must map to exactly one
    /// target variable with unit coefficient and no offset.
    pub fn substitute_affine(
        &self,
        target: &VarSpace,
        lin: &[Vec<i64>],
        offset: &[BigRational],
    ) -> Result<Self> {
        assert_eq!(lin.len(), self.space.len());
        let mut out = Self::zero(target);
        for (k, c) in &self.terms {
            let mut k2 = vec![Mono::ONE; target.len()];
            let mut phase_quarters = BigRational::zero();
            for (j, m) in k.iter().enumerate() {
                if m.is_one() {
                    continue;
                }
                let row = &lin[j];
                if m.pow > 0 {
                    let hits: Vec<usize> = (0..row.len()).filter(|&a| row[a] != 0).collect();
                    if hits.len() != 1 || row[hits[0]] != 1 || !offset[j].is_zero() {
                        return Err(Error::NonAffinePullback(j));
                    }
                    k2[hits[0]].pow += m.pow;
                }
                for (a, &coef) in row.iter().enumerate() {
                    if coef != 0 {
                        k2[a].freq += m.freq * coef as i32;
                    }
                }
                phase_quarters += &offset[j] * BigRational::from_integer(m.freq.into());
            }
            if !phase_quarters.is_integer() {
                return Err(Error::InexactPhase(format!("offset phase {} quarter turns", phase_quarters)));
            }
            let turns: i64 = phase_quarters
                .to_integer()
                .try_into()
                .map_err(|_| Error::InexactPhase("offset overflow".into()))?;
            for (a, m) in k2.iter().enumerate() {
                if target.kind(a) == VarKind::Periodic && (m.freq % 4 != 0 || m.pow != 0) {
                    return Err(Error::NonAffinePullback(a));
                }
            }
            out.add_term(k2, c * &Scalar::unit_phase(turns));
        }
        Ok(out)
    }

    /// Numeric value at a real point (τ = 2π).
    pub fn eval_numeric(&self, point: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let mut phase = 0.0;
            let mut mag = 1.0;
            for (m, x) in k.iter().zip(point) {
                phase += m.freq as f64 / 4.0 * x;
                if m.pow > 0 {
                    mag *= x.powi(m.pow as i32);
                }
            }
            acc += c.eval() * Complex64::from_polar(mag, TAU_F64 * phase);
        }
        acc
    }

    /// Σ |c(2π)| over stored terms.
    pub fn mass(&self) -> f64 {
        self.terms.values().map(|c| c.eval().norm()).sum()
    }
}

impl fmt::Debug for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[{c}]")?;
            for (v, m) in k.iter().enumerate() {
                if m.pow > 0 {
                    write!(f, "·v{v}^{}", m.pow)?;
                }
                if m.freq != 0 {
                    write!(f, "·e(v{v}·{}/4)", m.freq)?;
                }
            }
        }
        Ok(())
    }
}

impl Add for &TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        self.scale(&Scalar::from_int(-1))
    }
}

impl Sub for &TrigPoly {
    type Output = TrigPoly;
    fn sub(self, rhs: &TrigPoly) -> TrigPoly {
        self + &(-rhs)
    }
}

impl Mul for &TrigPoly {
    type Output = TrigPoly;
    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        debug_assert_eq!(self.space, rhs.space);
        let mut out = TrigPoly::zero(&self.space);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &rhs.terms {
                out.add_term(key_mul(k1, k2), c1 * c2);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn interval1() -> VarSpace {
        VarSpace::new(vec![VarKind::Interval])
    }

    #[test]
    fn antiderivative_of_one_and_t() {
        let sp = interval1();
        let one = TrigPoly::one(&sp);
        assert_eq!(one.antiderivative(0).unwrap(), TrigPoly::var(&sp, 0));
        let t = TrigPoly::var(&sp, 0);
        let half_t2 = (&t * &t).scale(&Scalar::frac(1, 2));
        assert_eq!(t.antiderivative(0).unwrap(), half_t2);
    }

    #[test]
    fn antiderivative_of_exponential() {
        let sp = interval1();
        let e = TrigPoly::exp(&sp, 0, 3);
        let expected = (&e - &TrigPoly::one(&sp)).scale(&inv_rate(12));
        assert_eq!(e.antiderivative(0).unwrap(), expected);
    }

    #[test]
    fn antiderivative_rejects_periodic() {
        let sp = VarSpace::periodic(1);
        assert!(TrigPoly::one(&sp).antiderivative(0).is_err());
    }

    #[test]
    fn fourier_mean() {
        let sp = VarSpace::periodic(1);
        let p = &TrigPoly::constant(&sp, Scalar::from_int(3)) + &TrigPoly::exp(&sp, 0, 1);
        assert_eq!(p.fourier_integral(0).unwrap(), TrigPoly::constant(&sp, Scalar::from_int(3)));
        assert!(TrigPoly::exp(&sp, 0, -2).fourier_integral(0).unwrap().is_zero());
    }

    #[test]
    fn derivative_undoes_antiderivative() {
        let sp = VarSpace::new(vec![VarKind::Interval, VarKind::Periodic]);
        let t = TrigPoly::var(&sp, 0);
        let mut key = vec![Mono::ONE; 2];
        key[0] = Mono { freq: 5, pow: 2 };
        key[1].freq = -4;
        let p = &TrigPoly::term(&sp, key, Scalar::i()) + &(&t * &t);
        let back = p.antiderivative(0).unwrap().derivative(0);
        assert_eq!(back, p);
    }

    #[test]
    fn integrate_unit_matches_beta() {
        let sp = interval1();
        let s = TrigPoly::var(&sp, 0);
        let one_minus = &TrigPoly::one(&sp) - &s;
        let p = &s * &one_minus;
        let v = p.integrate_unit(0);
        assert_eq!(v.constant_term(), Scalar::frac(1, 6));
    }

    #[test]
    fn quarter_phase_evaluation() {
        let sp = interval1();
        let mut key = vec![Mono::ONE];
        key[0].freq = 2; // e^{iτ t/2}
        let p = TrigPoly::term(&sp, key, Scalar::one());
        assert_eq!(p.eval_var(0, &rat(1, 1)).unwrap().constant_term(), Scalar::from_int(-1));
        assert!(p.eval_var(0, &rat(1, 3)).is_err());
    }

    #[test]
    fn numeric_matches_exact() {
        let sp = interval1();
        let e = TrigPoly::exp(&sp, 0, 2);
        let a = e.antiderivative(0).unwrap();
        let x: f64 = 0.3;
        let exact = a.eval_numeric(&[x]);
        let expected = ((Complex64::new(0.0, 2.0 * TAU_F64 * x)).exp() - 1.0) / Complex64::new(0.0, 2.0 * TAU_F64);
        assert!((exact - expected).norm() < 1e-14);
    }
}
