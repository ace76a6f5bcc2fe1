//! Differential forms on torus models and the algebra Ω_T(N×T).
//!
//! A [`Form`] lives on the coordinates `0..coords` of its variable space; the
//! remaining variables are parameters (no differentials). Components are keyed
//! by a bitmask `I` standing for `dz_{i_1}∧…∧dz_{i_k}` with `i_1 < … < i_k`.
//!
//! A [`TTForm`] is `α + ϑ∧β` with `α, β` forms; its degree is the degree of
//! `α` (and `β` sits one degree higher).

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::trig::{TrigPoly, VarSpace};

/// Sign of `dz_I ∧ dz_J` relative to `dz_{I∪J}`; `None` when they overlap.
pub fn mask_wedge_sign(i: u32, j: u32) -> Option<i32> {
    if i & j != 0 {
        return None;
    }
    let mut inversions = 0u32;
    let mut rest = j;
    while rest != 0 {
        let b = rest.trailing_zeros();
        inversions += (i >> b).count_ones();
        rest &= rest - 1;
    }
    Some(if inversions.is_multiple_of(2) { 1 } else { -1 })
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Form {
    space: VarSpace,
    coords: usize,
    comps: BTreeMap<u32, TrigPoly>,
}

impl Form {
    pub fn zero(space: &VarSpace, coords: usize) -> Self {
        assert!(coords <= space.len() && coords <= 31);
        Form {
            space: space.clone(),
            coords,
            comps: BTreeMap::new(),
        }
    }

    pub fn function(coords: usize, f: TrigPoly) -> Self {
        let mut out = Self::zero(f.space(), coords);
        out.add_component(0, f);
        out
    }

    pub fn constant(space: &VarSpace, coords: usize, c: Scalar) -> Self {
        Self::function(coords, TrigPoly::constant(space, c))
    }

    pub fn one(space: &VarSpace, coords: usize) -> Self {
        Self::constant(space, coords, Scalar::one())
    }

    /// `f · dz_I`.
    pub fn monomial(coords: usize, mask: u32, f: TrigPoly) -> Self {
        let mut out = Self::zero(f.space(), coords);
        out.add_component(mask, f);
        out
    }

    /// The coordinate 1-form `dz_i`.
    pub fn dx(space: &VarSpace, coords: usize, i: usize) -> Self {
        assert!(i < coords);
        Self::monomial(coords, 1 << i, TrigPoly::one(space))
    }

    pub fn space(&self) -> &VarSpace {
        &self.space
    }

    pub fn coords(&self) -> usize {
        self.coords
    }

    pub fn components(&self) -> impl Iterator<Item = (u32, &TrigPoly)> {
        self.comps.iter().map(|(m, p)| (*m, p))
    }

    pub fn component(&self, mask: u32) -> Option<&TrigPoly> {
        self.comps.get(&mask)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn add_component(&mut self, mask: u32, f: TrigPoly) {
        debug_assert!(mask >> self.coords == 0);
        if f.is_zero() {
            return;
        }
        match self.comps.get_mut(&mask) {
            Some(p) => {
                p.add_assign(&f);
                if p.is_zero() {
                    self.comps.remove(&mask);
                }
            }
            None => {
                self.comps.insert(mask, f);
            }
        }
    }

    fn check_compatible(&self, other: &Form) {
        assert!(
            self.coords == other.coords && self.space == other.space,
            "forms live on different layouts"
        );
    }

    pub fn add(&self, other: &Form) -> Form {
        self.check_compatible(other);
        let mut out = self.clone();
        for (m, p) in &other.comps {
            out.add_component(*m, p.clone());
        }
        out
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Form {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn scale(&self, c: &Scalar) -> Form {
        self.map_coeffs(|p| p.scale(c))
    }

    /// Multiplies every coefficient by a function.
    pub fn mul_function(&self, f: &TrigPoly) -> Form {
        self.map_coeffs(|p| p * f)
    }

    pub fn map_coeffs<F: Fn(&TrigPoly) -> TrigPoly>(&self, f: F) -> Form {
        let mut out = Form::zero(&self.space, self.coords);
        for (m, p) in &self.comps {
            out.add_component(*m, f(p));
        }
        out
    }

    pub fn try_map_coeffs<F: Fn(&TrigPoly) -> Result<TrigPoly>>(&self, f: F) -> Result<Form> {
        let mut out = Form::zero(&self.space, self.coords);
        for (m, p) in &self.comps {
            out.add_component(*m, f(p)?);
        }
        Ok(out)
    }

    /// Degree-`k` part.
    pub fn part(&self, k: usize) -> Form {
        let mut out = Form::zero(&self.space, self.coords);
        for (m, p) in &self.comps {
            if m.count_ones() as usize == k {
                out.add_component(*m, p.clone());
            }
        }
        out
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.comps.keys().map(|m| m.count_ones() as usize).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Degree if homogeneous and nonzero.
    pub fn degree(&self) -> Option<usize> {
        match self.degrees().as_slice() {
            [k] => Some(*k),
            _ => None,
        }
    }

    /// Applies `(-1)^{deg}` componentwise.
    pub fn parity_twist(&self) -> Form {
        let mut out = Form::zero(&self.space, self.coords);
        for (m, p) in &self.comps {
            if m.count_ones() % 2 == 0 {
                out.add_component(*m, p.clone());
            } else {
                out.add_component(*m, -p);
            }
        }
        out
    }

    pub fn wedge(&self, other: &Form) -> Form {
        self.check_compatible(other);
        let mut out = Form::zero(&self.space, self.coords);
        for (m1, p1) in &self.comps {
            for (m2, p2) in &other.comps {
                if let Some(sign) = mask_wedge_sign(*m1, *m2) {
                    let prod = p1 * p2;
                    out.add_component(m1 | m2, if sign < 0 { -&prod } else { prod });
                }
            }
        }
        out
    }

    /// Exterior derivative in the coordinate variables.
    pub fn d(&self) -> Form {
        let mut out = Form::zero(&self.space, self.coords);
        for (m, p) in &self.comps {
            for j in 0..self.coords {
                if m & (1 << j) != 0 {
                    continue;
                }
                let dp = p.derivative(j);
                if dp.is_zero() {
                    continue;
                }
                let sign = mask_wedge_sign(1 << j, *m).expect("disjoint");
                out.add_component(m | (1 << j), if sign < 0 { -&dp } else { dp });
            }
        }
        out
    }

    /// Contraction with the constant vector field `Σ v_i ∂_i`.
    pub fn contract_const(&self, v: &[i64]) -> Form {
        assert_eq!(v.len(), self.coords);
        let mut out = Form::zero(&self.space, self.coords);
        for (m, p) in &self.comps {
            let mut pos = 0;
            for i in 0..self.coords {
                if m & (1 << i) == 0 {
                    continue;
                }
                if v[i] != 0 {
                    let c = if pos % 2 == 0 { v[i] } else { -v[i] };
                    out.add_component(m & !(1 << i), p.scale(&Scalar::from_int(c)));
                }
                pos += 1;
            }
        }
        out
    }

    /// Contraction with the coordinate field `∂_i`.
    pub fn contract_coord(&self, i: usize) -> Form {
        let mut v = vec![0; self.coords];
        v[i] = 1;
        self.contract_const(&v)
    }

    /// Pullback along `z_j = Σ_a lin[j][a] w_a + offset[j]` onto a target layout.
    /// Differentials of source coordinates pull back through the target
    /// coordinates `0..target_coords`.
    pub fn pullback_affine(
        &self,
        target: &VarSpace,
        target_coords: usize,
        lin: &[Vec<i64>],
        offset: &[BigRational],
    ) -> Result<Form> {
        if lin.len() != self.space.len() || offset.len() != self.space.len() {
            return Err(Error::DimensionMismatch(format!(
                "affine map has {} rows, form has {} variables",
                lin.len(),
                self.space.len()
            )));
        }
        if lin.iter().any(|r| r.len() != target.len()) {
            return Err(Error::DimensionMismatch("affine map row length".into()));
        }
        // dz_j for source coordinates
        let dz: Vec<Form> = (0..self.coords)
            .map(|j| {
                let mut f = Form::zero(target, target_coords);
                for a in 0..target_coords {
                    if lin[j][a] != 0 {
                        f.add_component(1 << a, TrigPoly::constant(target, Scalar::from_int(lin[j][a])));
                    }
                }
                f
            })
            .collect();
        let mut out = Form::zero(target, target_coords);
        for (m, p) in &self.comps {
            let coef = p.substitute_affine(target, lin, offset)?;
            let mut basis = Form::function(target_coords, coef);
            for (j, dzj) in dz.iter().enumerate() {
                if m & (1 << j) != 0 {
                    basis = basis.wedge(dzj);
                }
            }
            out = out.add(&basis);
        }
        Ok(out)
    }

    /// Sets the last coordinate's differential to zero and demotes it to a parameter.
    pub fn freeze_last_coord(&self) -> Form {
        assert!(self.coords > 0);
        let last = 1u32 << (self.coords - 1);
        let mut out = Form::zero(&self.space, self.coords - 1);
        for (m, p) in &self.comps {
            if m & last == 0 {
                out.add_component(*m, p.clone());
            }
        }
        out
    }

    /// Promotes the first parameter (variable index `coords`) to a coordinate.
    pub fn promote_param(&self) -> Form {
        assert!(self.coords < self.space.len());
        Form {
            space: self.space.clone(),
            coords: self.coords + 1,
            comps: self.comps.clone(),
        }
    }

    /// Moves coefficients into a new space with the same coordinates in front.
    pub fn embed(&self, space: &VarSpace, map: &[usize]) -> Form {
        for (i, m) in map.iter().enumerate().take(self.coords) {
            assert_eq!(i, *m, "coordinates must stay in place");
        }
        let mut out = Form::zero(space, self.coords);
        for (m, p) in &self.comps {
            out.add_component(*m, p.embed(space, map));
        }
        out
    }

    /// Re-homes into a larger space that extends this one.
    pub fn extend_space(&self, space: &VarSpace) -> Form {
        let map: Vec<usize> = (0..self.space.len()).collect();
        self.embed(space, &map)
    }

    /// Restricts to a prefix space; dropped parameters must not occur.
    pub fn truncate(&self, space: &VarSpace) -> Result<Form> {
        if space.len() < self.coords {
            return Err(Error::LayoutMismatch("cannot drop coordinates".into()));
        }
        let mut out = Form::zero(space, self.coords);
        for (m, p) in &self.comps {
            out.add_component(*m, p.truncate(space)?);
        }
        Ok(out)
    }

    /// Exact `∫_0^1` in a parameter.
    pub fn integrate_param(&self, var: usize) -> Form {
        assert!(var >= self.coords);
        self.map_coeffs(|p| p.integrate_unit(var))
    }

    /// Antiderivative in an interval parameter, vanishing at 0.
    pub fn antiderivative_param(&self, var: usize) -> Result<Form> {
        assert!(var >= self.coords);
        self.try_map_coeffs(|p| p.antiderivative(var))
    }

    /// Evaluates a parameter at a rational value.
    pub fn eval_param(&self, var: usize, value: &BigRational) -> Result<Form> {
        assert!(var >= self.coords);
        self.try_map_coeffs(|p| p.eval_var(var, value))
    }

    /// Splits by the exponent data of a parameter.
    pub fn split_param(&self, var: usize) -> BTreeMap<crate::trig::Mono, Form> {
        assert!(var >= self.coords);
        let mut out: BTreeMap<crate::trig::Mono, Form> = BTreeMap::new();
        for (m, p) in &self.comps {
            for (mono, part) in p.split_by(var) {
                out.entry(mono)
                    .or_insert_with(|| Form::zero(&self.space, self.coords))
                    .add_component(*m, part);
            }
        }
        out
    }

    /// Contracts with the last coordinate field, drops its remaining
    /// differentials and integrates it over `[0, 1]`. The last coordinate must
    /// be the last variable.
    pub fn fiber_integrate_last(&self) -> Result<Form> {
        let c = self.coords.checked_sub(1).ok_or_else(|| Error::LayoutMismatch("no coordinate to integrate".into()))?;
        if c + 1 != self.space.len() {
            return Err(Error::LayoutMismatch("fiber coordinate must be the last variable".into()));
        }
        self.contract_coord(c)
            .freeze_last_coord()
            .integrate_param(c)
            .truncate(&self.space.prefix(c))
    }

    /// Coefficient mass seminorm `Σ |c| C^{|I|}`.
    pub fn mass(&self, base: f64) -> f64 {
        self.comps
            .iter()
            .map(|(m, p)| p.mass() * base.powi(m.count_ones() as i32))
            .sum()
    }

    /// Degree-0 constant coefficient.
    pub fn constant_term(&self) -> Scalar {
        self.comps.get(&0).map(|p| p.constant_term()).unwrap_or_default()
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, p) in &self.comps {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({p:?})")?;
            for i in 0..self.coords {
                if m & (1 << i) != 0 {
                    write!(f, "dz{i}")?;
                }
            }
        }
        Ok(())
    }
}

/// An element `α + ϑ∧β` of Ω_T(N×T).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TTForm {
    pub alpha: Form,
    pub beta: Form,
}

impl TTForm {
    pub fn new(alpha: Form, beta: Form) -> Self {
        alpha.check_compatible(&beta);
        TTForm { alpha, beta }
    }

    pub fn zero(space: &VarSpace, coords: usize) -> Self {
        TTForm::new(Form::zero(space, coords), Form::zero(space, coords))
    }

    pub fn from_alpha(alpha: Form) -> Self {
        let beta = Form::zero(alpha.space(), alpha.coords());
        TTForm { alpha, beta }
    }

    /// `ϑ∧β`.
    pub fn theta(beta: Form) -> Self {
        let alpha = Form::zero(beta.space(), beta.coords());
        TTForm { alpha, beta }
    }

    pub fn function(coords: usize, f: TrigPoly) -> Self {
        Self::from_alpha(Form::function(coords, f))
    }

    pub fn one(space: &VarSpace, coords: usize) -> Self {
        Self::from_alpha(Form::one(space, coords))
    }

    pub fn space(&self) -> &VarSpace {
        self.alpha.space()
    }

    pub fn coords(&self) -> usize {
        self.alpha.coords()
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.is_zero() && self.beta.is_zero()
    }

    pub fn add(&self, o: &TTForm) -> TTForm {
        TTForm::new(self.alpha.add(&o.alpha), self.beta.add(&o.beta))
    }

    pub fn sub(&self, o: &TTForm) -> TTForm {
        TTForm::new(self.alpha.sub(&o.alpha), self.beta.sub(&o.beta))
    }

    pub fn neg(&self) -> TTForm {
        TTForm::new(self.alpha.neg(), self.beta.neg())
    }

    pub fn scale(&self, c: &Scalar) -> TTForm {
        TTForm::new(self.alpha.scale(c), self.beta.scale(c))
    }

    pub fn map_forms<F: Fn(&Form) -> Form>(&self, f: F) -> TTForm {
        TTForm::new(f(&self.alpha), f(&self.beta))
    }

    pub fn try_map_forms<F: Fn(&Form) -> Result<Form>>(&self, f: F) -> Result<TTForm> {
        Ok(TTForm::new(f(&self.alpha)?, f(&self.beta)?))
    }

    /// DGA degree `j` when homogeneous (deg α = j, deg β = j+1); `None` for zero or mixed.
    pub fn degree(&self) -> Option<i64> {
        let mut ds: Vec<i64> = self.alpha.degrees().into_iter().map(|d| d as i64).collect();
        ds.extend(self.beta.degrees().into_iter().map(|d| d as i64 - 1));
        ds.sort_unstable();
        ds.dedup();
        match ds.as_slice() {
            [j] => Some(*j),
            _ => None,
        }
    }

    /// Splits into homogeneous pieces by DGA degree.
    pub fn homogeneous_parts(&self) -> Vec<(i64, TTForm)> {
        let mut ds: Vec<i64> = self.alpha.degrees().into_iter().map(|d| d as i64).collect();
        ds.extend(self.beta.degrees().into_iter().map(|d| d as i64 - 1));
        ds.sort_unstable();
        ds.dedup();
        ds.into_iter()
            .map(|j| {
                let a = if j >= 0 { self.alpha.part(j as usize) } else { Form::zero(self.space(), self.coords()) };
                let b = self.beta.part((j + 1) as usize);
                (j, TTForm::new(a, b))
            })
            .collect()
    }

    /// `(α₁+ϑβ₁)(α₂+ϑβ₂) = α₁α₂ + ϑ(β₁α₂ + (−1)^{deg α₁} α₁β₂)`.
    pub fn wedge(&self, o: &TTForm) -> TTForm {
        let alpha = self.alpha.wedge(&o.alpha);
        let beta = self.beta.wedge(&o.alpha).add(&self.alpha.parity_twist().wedge(&o.beta));
        TTForm::new(alpha, beta)
    }

    /// `d_T(α + ϑβ) = dα + β − ϑ dβ`.
    pub fn d_t(&self) -> TTForm {
        TTForm::new(self.alpha.d().add(&self.beta), self.beta.d().neg())
    }

    /// Scalar multiple of the unit contained in this element.
    pub fn unit_coefficient(&self) -> Scalar {
        self.alpha.constant_term()
    }

    /// Removes the scalar multiple of the unit (the projection Ω → Ω/ℂ·1).
    pub fn drop_unit(&self) -> TTForm {
        let c = self.unit_coefficient();
        if c.is_zero() {
            return self.clone();
        }
        let unit = Form::constant(self.space(), self.coords(), c);
        TTForm::new(self.alpha.sub(&unit), self.beta.clone())
    }

    /// True when this is a function (degree-0 α, no ϑ-part).
    pub fn is_function(&self) -> bool {
        self.beta.is_zero() && self.alpha.degrees().iter().all(|d| *d == 0)
    }

    /// Contraction with a coordinate field, acting on both parts: `ια + ϑ∧ιβ`.
    pub fn contract_coord(&self, i: usize) -> TTForm {
        self.map_forms(|f| f.contract_coord(i))
    }

    /// Graded contraction `ια − ϑ∧ιβ`, the one satisfying `d_T ι + ι d_T = L`.
    pub fn contract_coord_graded(&self, i: usize) -> TTForm {
        TTForm::new(self.alpha.contract_coord(i), self.beta.contract_coord(i).neg())
    }

    /// Splits by the exponent data of a parameter.
    pub fn split_param(&self, var: usize) -> BTreeMap<crate::trig::Mono, TTForm> {
        let mut out: BTreeMap<crate::trig::Mono, TTForm> = BTreeMap::new();
        let zero = TTForm::zero(self.space(), self.coords());
        for (mono, a) in self.alpha.split_param(var) {
            out.entry(mono).or_insert_with(|| zero.clone()).alpha = a;
        }
        for (mono, b) in self.beta.split_param(var) {
            out.entry(mono).or_insert_with(|| zero.clone()).beta = b;
        }
        out
    }

    /// Restriction `j_t^*` killing the last coordinate differential.
    pub fn freeze_last_coord(&self) -> TTForm {
        self.map_forms(Form::freeze_last_coord)
    }

    /// ε^T(α + ϑβ) = ε(α) + ε(β) for the mass seminorm.
    pub fn mass(&self, base: f64) -> f64 {
        self.alpha.mass(base) + self.beta.mass(base)
    }
}

impl fmt::Debug for TTForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.alpha.is_zero(), self.beta.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{:?}", self.alpha),
            (true, false) => write!(f, "ϑ∧[{:?}]", self.beta),
            _ => write!(f, "{:?} + ϑ∧[{:?}]", self.alpha, self.beta),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn t2() -> VarSpace {
        VarSpace::periodic(2)
    }

    #[test]
    fn dx_wedge_dx_vanishes() {
        let sp = t2();
        let dx1 = Form::dx(&sp, 2, 0);
        assert!(dx1.wedge(&dx1).is_zero());
    }

    #[test]
    fn wedge_antisymmetry() {
        let sp = t2();
        let dx1 = Form::dx(&sp, 2, 0);
        let dx2 = Form::dx(&sp, 2, 1);
        assert_eq!(dx1.wedge(&dx2), dx2.wedge(&dx1).neg());
    }

    #[test]
    fn theta_squared_vanishes() {
        let sp = t2();
        let a = TTForm::theta(Form::dx(&sp, 2, 0));
        let b = TTForm::theta(Form::dx(&sp, 2, 1));
        assert!(a.wedge(&b).is_zero());
    }

    #[test]
    fn d_t_examples() {
        let sp = t2();
        assert!(TTForm::one(&sp, 2).d_t().is_zero());
        let beta = Form::monomial(2, 1, TrigPoly::exp(&sp, 1, 1));
        let w = TTForm::theta(beta.clone());
        assert_eq!(w.d_t(), TTForm::new(beta.clone(), beta.d().neg()));
        assert!(w.d_t().d_t().is_zero());
    }

    #[test]
    fn exterior_derivative_of_exponential() {
        let sp = VarSpace::periodic(1);
        let f = Form::function(1, TrigPoly::exp(&sp, 0, 3));
        let expected = Form::monomial(1, 1, TrigPoly::exp(&sp, 0, 3).scale(&(&Scalar::i() * &Scalar::tau_pow(1)).scale_rat(&rat(3, 1))));
        assert_eq!(f.d(), expected);
    }

    #[test]
    fn pullback_chain_rule() {
        // e^{iτy} dy along y = 2x
        let sp = VarSpace::periodic(1);
        let w = Form::monomial(1, 1, TrigPoly::exp(&sp, 0, 1));
        let back = w.pullback_affine(&sp, 1, &[vec![2]], &[rat(0, 1)]).unwrap();
        let expected = Form::monomial(1, 1, TrigPoly::exp(&sp, 0, 2).scale(&Scalar::from_int(2)));
        assert_eq!(back, expected);
    }

    #[test]
    fn pullback_along_constant_map() {
        let sp = VarSpace::periodic(1);
        let w = Form::function(1, TrigPoly::exp(&sp, 0, 1)).add(&Form::dx(&sp, 1, 0));
        let back = w.pullback_affine(&sp, 1, &[vec![0]], &[rat(1, 4)]).unwrap();
        assert_eq!(back, Form::constant(&sp, 1, Scalar::i()));
    }

    #[test]
    fn contraction_signs() {
        let sp = t2();
        let w = Form::dx(&sp, 2, 0).wedge(&Form::dx(&sp, 2, 1));
        assert_eq!(w.contract_coord(0), Form::dx(&sp, 2, 1));
        assert_eq!(w.contract_coord(1), Form::dx(&sp, 2, 0).neg());
    }
}
