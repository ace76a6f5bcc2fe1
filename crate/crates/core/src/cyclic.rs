//! Chains in the reduced cyclic bar complex `⨁ Ω ⊗ Ω̄^{⊗n}` of Ω_T(N×T).
//!
//! A [`Chain`] stores a presentation: a list of scalar multiples of elementary
//! tensors whose factors are homogeneous [`TTForm`]s. Slots `1..=n` live in
//! `Ω̄ = Ω/ℂ·1`; the scalar multiple of the unit is dropped on insertion.
//! Exact equality goes through [`Chain::canonical`], which expands every
//! tensor over monomial basis elements.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::form::TTForm;
use crate::scalar::Scalar;
use crate::trig::{Key, Mono, TrigPoly, VarSpace};

/// One summand `coef · ⟨ω₀ ⊗ … ⊗ ωₙ⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coef: Scalar,
    pub factors: Vec<TTForm>,
    degrees: Vec<i64>,
}

impl Term {
    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    /// `n` for a tensor `ω₀ ⊗ … ⊗ ωₙ`.
    pub fn order(&self) -> usize {
        self.factors.len() - 1
    }

    /// Partial sums `r_l = j₀ + … + j_l − l`.
    pub fn partial_sums(&self) -> Vec<i64> {
        let mut acc = 0;
        self.degrees
            .iter()
            .enumerate()
            .map(|(l, j)| {
                acc += j;
                acc - l as i64
            })
            .collect()
    }

    /// Total degree `j₀ + … + jₙ + n`.
    pub fn total_degree(&self) -> i64 {
        self.degrees.iter().sum::<i64>() + self.order() as i64
    }
}

/// Boundary value used for `r_{-1}` in the `i = 0` summand of Connes' operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BConvention {
    /// `r_{-1} = -1`: the `i = 0` summand carries sign `+1`.
    #[default]
    MinusOne,
    /// `r_{-1} = 0`: the `i = 0` summand carries sign `(-1)^{r_n}`.
    Zero,
}

impl BConvention {
    fn r_minus_one(self) -> i64 {
        match self {
            BConvention::MinusOne => -1,
            BConvention::Zero => 0,
        }
    }
}

/// Which relation of the degenerate subspace to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegenerateKind {
    /// A function inserted in slot `r ≥ 1`.
    Slot0Form,
    /// The three-term Leibniz combination around slot `r`.
    Leibniz,
}

fn sign(e: i64) -> Scalar {
    if e.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        Scalar::from_int(-1)
    }
}

/// Structural equality compares presentations; use [`chain_equal`] for values.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain {
    space: VarSpace,
    coords: usize,
    terms: Vec<Term>,
}

impl Chain {
    pub fn zero(space: &VarSpace, coords: usize) -> Self {
        Chain {
            space: space.clone(),
            coords,
            terms: Vec::new(),
        }
    }

    /// `coef · ⟨factors⟩` (factors need not be homogeneous).
    pub fn tensor(coef: Scalar, factors: Vec<TTForm>) -> Self {
        let f0 = factors.first().expect("a tensor has at least one slot");
        let mut c = Chain::zero(f0.space(), f0.coords());
        c.push(coef, factors);
        c
    }

    pub fn space(&self) -> &VarSpace {
        &self.space
    }

    pub fn coords(&self) -> usize {
        self.coords
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// True when the presentation is empty (not a test for being zero; see [`Chain::is_zero`]).
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exact test for the zero chain.
    pub fn is_zero(&self) -> bool {
        self.canonical().is_empty()
    }

    pub fn max_order(&self) -> Option<usize> {
        self.terms.iter().map(Term::order).max()
    }

    /// Adds `coef · ⟨factors⟩`, dropping units in slots ≥ 1 and splitting
    /// factors into homogeneous pieces.
    pub fn push(&mut self, coef: Scalar, factors: Vec<TTForm>) {
        if coef.is_zero() || factors.is_empty() {
            return;
        }
        let mut pieces: Vec<Vec<(i64, TTForm)>> = Vec::with_capacity(factors.len());
        for (i, f) in factors.into_iter().enumerate() {
            assert!(
                f.coords() == self.coords && *f.space() == self.space,
                "factor lives on a different layout"
            );
            let f = if i > 0 { f.drop_unit() } else { f };
            if f.is_zero() {
                return;
            }
            match f.degree() {
                Some(j) => pieces.push(vec![(j, f)]),
                None => pieces.push(f.homogeneous_parts()),
            }
        }
        self.push_product(coef, &pieces, 0, &mut Vec::new(), &mut Vec::new());
    }

    fn push_product(
        &mut self,
        coef: Scalar,
        pieces: &[Vec<(i64, TTForm)>],
        slot: usize,
        acc: &mut Vec<TTForm>,
        degs: &mut Vec<i64>,
    ) {
        if slot == pieces.len() {
            self.terms.push(Term {
                coef,
                factors: acc.clone(),
                degrees: degs.clone(),
            });
            return;
        }
        for (j, f) in &pieces[slot] {
            acc.push(f.clone());
            degs.push(*j);
            self.push_product(coef.clone(), pieces, slot + 1, acc, degs);
            acc.pop();
            degs.pop();
        }
    }

    fn push_term(&mut self, t: Term) {
        if !t.coef.is_zero() {
            self.terms.push(t);
        }
    }

    /// Merges identical tensors and drops zero coefficients.
    pub fn compact(&self) -> Chain {
        let mut index: HashMap<&Vec<TTForm>, usize> = HashMap::new();
        let mut merged: Vec<Term> = Vec::new();
        for t in &self.terms {
            match index.get(&t.factors) {
                Some(&k) => merged[k].coef += &t.coef,
                None => {
                    index.insert(&t.factors, merged.len());
                    merged.push(t.clone());
                }
            }
        }
        merged.retain(|t| !t.coef.is_zero());
        Chain {
            space: self.space.clone(),
            coords: self.coords,
            terms: merged,
        }
    }

    pub fn add(&self, other: &Chain) -> Chain {
        self.check_layout(other);
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out.compact()
    }

    pub fn sub(&self, other: &Chain) -> Chain {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Chain {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn scale(&self, c: &Scalar) -> Chain {
        let mut out = Chain::zero(&self.space, self.coords);
        for t in &self.terms {
            out.push_term(Term {
                coef: &t.coef * c,
                factors: t.factors.clone(),
                degrees: t.degrees.clone(),
            });
        }
        out
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a Chain>>(space: &VarSpace, coords: usize, it: I) -> Chain {
        let mut out = Chain::zero(space, coords);
        for c in it {
            out.check_layout(c);
            out.terms.extend(c.terms.iter().cloned());
        }
        out.compact()
    }

    fn check_layout(&self, other: &Chain) {
        assert!(
            self.coords == other.coords && self.space == other.space,
            "chains live on different layouts"
        );
    }

    /// Terms of order `n` (tensors with `n+1` slots).
    pub fn order_part(&self, n: usize) -> Chain {
        Chain {
            space: self.space.clone(),
            coords: self.coords,
            terms: self.terms.iter().filter(|t| t.order() == n).cloned().collect(),
        }
    }

    /// Terms of order at most `n`.
    pub fn truncate_order(&self, n: usize) -> Chain {
        Chain {
            space: self.space.clone(),
            coords: self.coords,
            terms: self.terms.iter().filter(|t| t.order() <= n).cloned().collect(),
        }
    }

    /// Applies a slotwise linear map to every factor and re-homes the result.
    pub fn map_factors<F>(&self, space: &VarSpace, coords: usize, f: F) -> Result<Chain>
    where
        F: Fn(usize, &TTForm) -> Result<TTForm>,
    {
        let mut out = Chain::zero(space, coords);
        for t in &self.terms {
            let factors = t
                .factors
                .iter()
                .enumerate()
                .map(|(i, w)| f(i, w))
                .collect::<Result<Vec<_>>>()?;
            out.push(t.coef.clone(), factors);
        }
        Ok(out.compact())
    }

    /// Exact `∫_0^1 d(var)` of a parameter shared by all slots.
    ///
    /// Each slot is split by its dependence on `var`; the product of the
    /// pieces is integrated as one monomial.
    pub fn integrate_param(&self, var: usize) -> Chain {
        assert!(var >= self.coords);
        let mut cache: HashMap<Mono, Scalar> = HashMap::new();
        let mut out = Chain::zero(&self.space, self.coords);
        for t in &self.terms {
            let slots: Vec<Vec<(Mono, TTForm)>> =
                t.factors.iter().map(|f| f.split_param(var).into_iter().collect()).collect();
            let mut acc = Vec::with_capacity(slots.len());
            integrate_rec(&self.space, var, &slots, 0, Mono::ONE, &t.coef, &mut acc, &mut cache, &mut out);
        }
        out.compact()
    }

    /// Moves every factor to a prefix space; dropped variables must not occur.
    pub fn restrict_space(&self, space: &VarSpace) -> Result<Chain> {
        self.map_factors(space, self.coords, |_, w| w.try_map_forms(|f| f.truncate(space)))
    }

    /// Fiber integration over the last coordinate: the contraction acts as a
    /// derivation across the slots (slot 0 with its own degree, later slots
    /// with degree shifted by one), then the coordinate is frozen and
    /// integrated over `[0, 1]`. Slots contract by `ια + ϑ∧ιβ`.
    pub fn fiber_integrate_last(&self) -> Result<Chain> {
        let c = self
            .coords
            .checked_sub(1)
            .ok_or_else(|| Error::LayoutMismatch("no coordinate to integrate".into()))?;
        if c + 1 != self.space.len() {
            return Err(Error::LayoutMismatch("fiber coordinate must be the last variable".into()));
        }
        let mut contracted = Chain::zero(&self.space, c);
        for t in &self.terms {
            let mut shift = 0i64;
            for i in 0..t.factors.len() {
                let iota = t.factors[i].contract_coord(c);
                if !iota.is_zero() {
                    let factors = t
                        .factors
                        .iter()
                        .enumerate()
                        .map(|(k, w)| if k == i { iota.freeze_last_coord() } else { w.freeze_last_coord() })
                        .collect();
                    contracted.push(&t.coef * &sign(shift), factors);
                }
                shift += t.degrees[i] + i64::from(i > 0);
            }
        }
        contracted.integrate_param(c).restrict_space(&self.space.prefix(c))
    }

    /// Parity operator: multiplies each term by `(-1)^{total degree}`.
    pub fn gamma(&self) -> Chain {
        let mut out = Chain::zero(&self.space, self.coords);
        for t in &self.terms {
            let mut t2 = t.clone();
            if t.total_degree().rem_euclid(2) == 1 {
                t2.coef = -&t2.coef;
            }
            out.push_term(t2);
        }
        out
    }

    /// The Hochschild boundary.
    pub fn hochschild_b(&self) -> Chain {
        let parts: Vec<Chain> = self
            .terms
            .par_iter()
            .map(|t| {
                let mut out = Chain::zero(&self.space, self.coords);
                b_term(t, &mut out);
                out
            })
            .collect();
        Chain::sum(&self.space, self.coords, &parts)
    }

    /// Connes' operator with the given boundary convention.
    pub fn connes_b_with(&self, conv: BConvention) -> Chain {
        let mut out = Chain::zero(&self.space, self.coords);
        for t in &self.terms {
            connes_term(t, conv, &mut out);
        }
        out.compact()
    }

    /// Connes' operator with the default boundary convention.
    pub fn connes_b(&self) -> Chain {
        self.connes_b_with(BConvention::default())
    }

    /// `(b + B) w`.
    pub fn b_plus_b(&self) -> Chain {
        self.hochschild_b().add(&self.connes_b())
    }

    /// Expansion over monomial basis tensors; empty exactly when the chain is zero.
    pub fn canonical(&self) -> HashMap<Vec<BasisElement>, Scalar> {
        let partial: Vec<HashMap<Vec<BasisElement>, Scalar>> = self
            .terms
            .par_chunks(64)
            .map(|chunk| {
                let mut acc: HashMap<Vec<BasisElement>, Scalar> = HashMap::new();
                for t in chunk {
                    expand_term(t, &mut acc);
                }
                acc
            })
            .collect();
        let mut total: HashMap<Vec<BasisElement>, Scalar> = HashMap::new();
        for p in partial {
            for (k, v) in p {
                *total.entry(k).or_default() += &v;
            }
        }
        total.retain(|_, v| !v.is_zero());
        total
    }

    /// Chain rebuilt from its canonical expansion: one monomial per slot.
    pub fn canonicalized(&self) -> Chain {
        let mut entries: Vec<(Vec<BasisElement>, Scalar)> = self.canonical().into_iter().collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out = Chain::zero(&self.space, self.coords);
        for (k, c) in entries {
            let factors = k.iter().map(|e| e.to_form(&self.space, self.coords)).collect();
            out.push(c, factors);
        }
        out
    }
}

/// Exact equality of chains.
pub fn chain_equal(a: &Chain, b: &Chain) -> bool {
    a.sub(b).is_zero()
}

/// A monomial `c·e^{…}·dz_I` or `ϑ∧e^{…}·dz_I` with unit coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisElement {
    pub theta: bool,
    pub mask: u32,
    pub key: Key,
}

impl BasisElement {
    pub fn to_form(&self, space: &VarSpace, coords: usize) -> TTForm {
        use crate::form::Form;
        use crate::trig::TrigPoly;
        let f = Form::monomial(coords, self.mask, TrigPoly::term(space, self.key.clone(), Scalar::one()));
        if self.theta {
            TTForm::theta(f)
        } else {
            TTForm::from_alpha(f)
        }
    }
}

fn basis_expansion(w: &TTForm) -> Vec<(BasisElement, Scalar)> {
    let mut out = Vec::new();
    for (theta, form) in [(false, &w.alpha), (true, &w.beta)] {
        for (mask, p) in form.components() {
            for (key, c) in p.terms() {
                out.push((
                    BasisElement {
                        theta,
                        mask,
                        key: key.clone(),
                    },
                    c.clone(),
                ));
            }
        }
    }
    out
}

fn expand_term(t: &Term, acc: &mut HashMap<Vec<BasisElement>, Scalar>) {
    let slots: Vec<Vec<(BasisElement, Scalar)>> = t.factors.iter().map(basis_expansion).collect();
    let mut stack: Vec<BasisElement> = Vec::with_capacity(slots.len());
    fn rec(
        slots: &[Vec<(BasisElement, Scalar)>],
        i: usize,
        coef: &Scalar,
        stack: &mut Vec<BasisElement>,
        acc: &mut HashMap<Vec<BasisElement>, Scalar>,
    ) {
        if i == slots.len() {
            *acc.entry(stack.clone()).or_default() += coef;
            return;
        }
        for (e, c) in &slots[i] {
            stack.push(e.clone());
            rec(slots, i + 1, &(coef * c), stack, acc);
            stack.pop();
        }
    }
    rec(&slots, 0, &t.coef, &mut stack, acc);
}

fn b_term(t: &Term, out: &mut Chain) {
    let n = t.order();
    let r = t.partial_sums();
    let f = &t.factors;
    let c = &t.coef;

    let mut v = f.clone();
    v[0] = f[0].d_t();
    out.push(c.clone(), v);

    for i in 1..=n {
        let mut v = f.clone();
        v[i] = f[i].d_t();
        out.push(-(c * &sign(r[i - 1])), v);
    }

    for i in 0..n {
        let mut v: Vec<TTForm> = Vec::with_capacity(n);
        v.extend_from_slice(&f[..i]);
        v.push(f[i].wedge(&f[i + 1]));
        v.extend_from_slice(&f[i + 2..]);
        out.push(-(c * &sign(r[i])), v);
    }

    if n >= 1 {
        let mut v: Vec<TTForm> = Vec::with_capacity(n);
        v.push(f[n].wedge(&f[0]));
        v.extend_from_slice(&f[1..n]);
        out.push(c * &sign((t.degrees[n] - 1) * r[n - 1]), v);
    }
}

fn connes_term(t: &Term, conv: BConvention, out: &mut Chain) {
    let n = t.order();
    let r = t.partial_sums();
    let unit = TTForm::one(t.factors[0].space(), t.factors[0].coords());
    for i in 0..=n {
        let r_prev = if i == 0 { conv.r_minus_one() } else { r[i - 1] };
        let s = sign((r_prev + 1) * (r[n] - r_prev));
        let mut v: Vec<TTForm> = Vec::with_capacity(n + 2);
        v.push(unit.clone());
        v.extend_from_slice(&t.factors[i..]);
        v.extend_from_slice(&t.factors[..i]);
        out.push(&t.coef * &s, v);
    }
}

/// Builds a generator of the degenerate subspace.
///
/// `factors` are the `n` slots other than `r`; `f` must be a function and
/// `1 ≤ r ≤ n`.
pub fn make_degenerate(kind: DegenerateKind, factors: &[TTForm], r: usize, f: &TTForm) -> Result<Chain> {
    let n = factors.len();
    if r < 1 || r > n {
        return Err(Error::SlotOutOfRange { r, n });
    }
    if !f.is_function() {
        return Err(Error::NotAFunction);
    }
    match kind {
        DegenerateKind::Slot0Form => {
            let mut v = factors.to_vec();
            v.insert(r, f.clone());
            Ok(Chain::tensor(Scalar::one(), v))
        }
        DegenerateKind::Leibniz => {
            let mut out = Chain::zero(f.space(), f.coords());
            // ⟨… ω_{r−1} f ⊗ ω_{r+1} …⟩
            let mut first = factors.to_vec();
            first[r - 1] = factors[r - 1].wedge(f);
            out.push(Scalar::one(), first);
            // ⟨… ω_{r−1} ⊗ d_T f ⊗ ω_{r+1} …⟩
            let mut middle = factors.to_vec();
            middle.insert(r, f.d_t());
            out.push(Scalar::one(), middle);
            // ⟨… ω_{r−1} ⊗ f ω_{r+1} …⟩, cyclically wrapping onto ω₀ when r = n
            let mut last = factors.to_vec();
            let target = if r < n { r } else { 0 };
            last[target] = f.wedge(&factors[target]);
            out.push(Scalar::from_int(-1), last);
            Ok(out.compact())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn integrate_rec(
    space: &VarSpace,
    var: usize,
    slots: &[Vec<(Mono, TTForm)>],
    i: usize,
    mono: Mono,
    coef: &Scalar,
    acc: &mut Vec<TTForm>,
    cache: &mut HashMap<Mono, Scalar>,
    out: &mut Chain,
) {
    if i == slots.len() {
        let weight = cache
            .entry(mono)
            .or_insert_with(|| {
                let mut key = vec![Mono::ONE; space.len()];
                key[var] = mono;
                TrigPoly::term(space, key, Scalar::one()).integrate_unit(var).constant_term()
            })
            .clone();
        out.push(coef * &weight, acc.clone());
        return;
    }
    for (m, w) in &slots[i] {
        acc.push(w.clone());
        let combined = Mono {
            freq: mono.freq + m.freq,
            pow: mono.pow + m.pow,
        };
        integrate_rec(space, var, slots, i + 1, combined, coef, acc, cache, out);
        acc.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::Form;
    use crate::trig::TrigPoly;

    fn sp() -> VarSpace {
        VarSpace::periodic(2)
    }

    fn dx(i: usize) -> TTForm {
        TTForm::from_alpha(Form::dx(&sp(), 2, i))
    }

    fn expf(k: i32) -> TTForm {
        TTForm::function(2, TrigPoly::exp(&sp(), 0, k))
    }

    #[test]
    fn gamma_signs() {
        assert!(chain_equal(&Chain::tensor(Scalar::one(), vec![dx(0)]).gamma(), &Chain::tensor(Scalar::from_int(-1), vec![dx(0)])));
        let one = Chain::tensor(Scalar::one(), vec![TTForm::one(&sp(), 2)]);
        assert!(chain_equal(&one.gamma(), &one));
    }

    #[test]
    fn b_of_function() {
        let f = expf(1);
        let w = Chain::tensor(Scalar::one(), vec![f.clone()]);
        assert!(chain_equal(&w.hochschild_b(), &Chain::tensor(Scalar::one(), vec![f.d_t()])));
        assert!(Chain::tensor(Scalar::one(), vec![TTForm::one(&sp(), 2)]).hochschild_b().is_zero());
    }

    #[test]
    fn units_in_interior_slots_vanish() {
        let one = TTForm::one(&sp(), 2);
        assert!(Chain::tensor(Scalar::one(), vec![dx(0), one.clone()]).is_empty());
        let w = Chain::tensor(Scalar::one(), vec![one, dx(1)]);
        assert!(w.connes_b().is_zero());
    }

    #[test]
    fn equality_examples() {
        let w = Chain::tensor(Scalar::one(), vec![dx(0)]);
        assert!(chain_equal(&w, &w));
        let zero = Chain::tensor(Scalar::one(), vec![TTForm::zero(&sp(), 2)]);
        assert!(chain_equal(&w, &w.add(&zero)));
        assert!(!chain_equal(&w, &w.scale(&Scalar::from_int(2))));
    }

    #[test]
    fn degenerate_special_cases() {
        let one = TTForm::one(&sp(), 2);
        let w = make_degenerate(DegenerateKind::Slot0Form, &[dx(0)], 1, &one).unwrap();
        assert!(w.is_zero());
        let c = one.scale(&Scalar::from_int(3));
        let w = make_degenerate(DegenerateKind::Leibniz, &[expf(1), dx(1)], 1, &c).unwrap();
        assert!(w.is_zero());
        assert_eq!(
            make_degenerate(DegenerateKind::Leibniz, &[expf(1)], 2, &c).unwrap_err(),
            Error::SlotOutOfRange { r: 2, n: 1 }
        );
        assert_eq!(
            make_degenerate(DegenerateKind::Leibniz, &[expf(1)], 1, &dx(0)).unwrap_err(),
            Error::NotAFunction
        );
    }
}
