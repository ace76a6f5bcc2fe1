//! The equivariant Chen integral on affine loop families.
//!
//! A [`Plot`] is the family `f̂(x, t) = A x + v t + c` of loops in `T^d`
//! parametrized by `x ∈ T^m`. Evaluating a chain on a plot pulls each slot
//! back at its own time, contracts the loop slots with the velocity `v`, and
//! integrates over the ordered simplex `0 ≤ t₁ ≤ … ≤ tₙ ≤ 1` exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::cyclic::{Chain, Term};
use crate::error::{Error, Result};
use crate::form::{Form, TTForm};
use crate::trig::{VarKind, VarSpace};

/// Affine family of loops `T^m × T → T^d`, `(x, t) ↦ A x + v t + c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plot {
    m: usize,
    d: usize,
    /// `d` rows of length `m`.
    a: Vec<Vec<i64>>,
    v: Vec<i64>,
    c: Vec<BigRational>,
}

impl Plot {
    pub fn new(m: usize, d: usize, a: Vec<Vec<i64>>, v: Vec<i64>, c: Vec<BigRational>) -> Result<Self> {
        if a.len() != d || a.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch(format!("plot matrix must have {d} rows of length {m}")));
        }
        if v.len() != d || c.len() != d {
            return Err(Error::DimensionMismatch(format!("plot velocity and offset must have length {d}")));
        }
        let four = BigRational::from_integer(BigInt::from(4));
        if let Some(bad) = c.iter().find(|x| !(*x * &four).is_integer()) {
            return Err(Error::InexactPhase(format!("offset {bad} is not a multiple of 1/4")));
        }
        Ok(Plot { m, d, a, v, c })
    }

    /// The constant loops `x ↦ x` on `T^d`.
    pub fn identity(d: usize) -> Self {
        let a = (0..d).map(|j| (0..d).map(|i| i64::from(i == j)).collect()).collect();
        Plot::new(d, d, a, vec![0; d], vec![BigRational::zero(); d]).expect("identity plot")
    }

    /// A single loop `t ↦ v t + c`.
    pub fn single_loop(v: Vec<i64>, c: Vec<BigRational>) -> Result<Self> {
        let d = v.len();
        Plot::new(0, d, vec![Vec::new(); d], v, c)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn a(&self) -> &[Vec<i64>] {
        &self.a
    }

    pub fn v(&self) -> &[i64] {
        &self.v
    }

    pub fn c(&self) -> &[BigRational] {
        &self.c
    }

    pub fn is_constant(&self) -> bool {
        self.v.iter().all(|x| *x == 0)
    }

    /// The family `(x, u, t) ↦ A x + v (t + u) + c` over `T^{m+1}`.
    pub fn with_rotation(&self) -> Plot {
        let a = self
            .a
            .iter()
            .zip(&self.v)
            .map(|(row, vj)| {
                let mut r = row.clone();
                r.push(*vj);
                r
            })
            .collect();
        Plot {
            m: self.m + 1,
            d: self.d,
            a,
            v: self.v.clone(),
            c: self.c.clone(),
        }
    }

    /// The space of forms on `X = T^m`.
    pub fn x_space(&self) -> VarSpace {
        VarSpace::periodic(self.m)
    }

    /// Working layout `[x₁ … x_m, σ, t]`.
    fn work_space(&self) -> VarSpace {
        self.x_space().extended(&[VarKind::Interval, VarKind::Interval])
    }

    fn sigma(&self) -> usize {
        self.m
    }

    fn time(&self) -> usize {
        self.m + 1
    }

    /// Affine substitution rows for evaluating at `σ`-rotated time `t` (or `t = 0`).
    fn rows(&self, rotate: bool, at_time: bool) -> Vec<Vec<i64>> {
        (0..self.d)
            .map(|j| {
                let mut r = self.a[j].clone();
                r.push(if rotate { self.v[j] } else { 0 });
                r.push(if at_time { self.v[j] } else { 0 });
                r
            })
            .collect()
    }

    fn check_chain(&self, w: &Chain) -> Result<()> {
        if w.coords() != self.d || *w.space() != VarSpace::periodic(self.d) {
            return Err(Error::LayoutMismatch(format!(
                "chain on {} coordinates over {} variables cannot be evaluated on a plot into T^{}",
                w.coords(),
                w.space().len(),
                self.d
            )));
        }
        Ok(())
    }
}

/// `ι_v α − β` for a loop slot.
pub fn loop_slot_form(w: &TTForm, v: &[i64]) -> Form {
    w.alpha.contract_const(v).sub(&w.beta)
}

fn eval_term(t: &Term, plot: &Plot, rotate: bool) -> Result<Form> {
    let ws = plot.work_space();
    let m = plot.m;
    let rows0 = plot.rows(rotate, false);
    let rows_t = plot.rows(rotate, true);
    let mut acc = t.factors[0].alpha.pullback_affine(&ws, m, &rows0, &plot.c)?;
    for (i, f) in t.factors.iter().enumerate().skip(1) {
        if acc.is_zero() {
            return Ok(acc);
        }
        let eta = loop_slot_form(f, &plot.v).pullback_affine(&ws, m, &rows_t, &plot.c).map_err(|e| match e {
            Error::DimensionMismatch(s) => Error::DimensionMismatch(format!("slot {i}: {s}")),
            other => other,
        })?;
        acc = acc.wedge(&eta).antiderivative_param(plot.time())?;
    }
    if t.order() > 0 {
        acc = acc.eval_param(plot.time(), &BigRational::one())?;
    }
    if rotate {
        acc = acc.integrate_param(plot.sigma());
    }
    Ok(acc.scale(&t.coef))
}

fn eval_chain(w: &Chain, plot: &Plot, rotate: bool) -> Result<Form> {
    plot.check_chain(w)?;
    let parts = w
        .terms()
        .par_iter()
        .map(|t| eval_term(t, plot, rotate))
        .collect::<Result<Vec<Form>>>()?;
    let mut total = Form::zero(&plot.work_space(), plot.m);
    for p in parts {
        total = total.add(&p);
    }
    total.truncate(&plot.x_space())
}

/// The iterated integral before rotation averaging, as a form on `X`.
pub fn tilde_rho_eval(w: &Chain, plot: &Plot) -> Result<Form> {
    eval_chain(w, plot, false)
}

/// The rotation-averaged equivariant Chen integral, as a form on `X`.
pub fn rho_eval(w: &Chain, plot: &Plot) -> Result<Form> {
    eval_chain(w, plot, true)
}

/// Restriction to constant loops: evaluation on the identity constant plot of `T^d`.
pub fn restrict_to_m(w: &Chain, d: usize) -> Result<Form> {
    rho_eval(w, &Plot::identity(d))
}

/// Pullback of `P ρ(w)` along the plot, where `P` averages the contraction
/// with the rotation generator over the rotation orbit.
pub fn p_term(w: &Chain, plot: &Plot) -> Result<Form> {
    let ext = plot.with_rotation();
    let lifted = rho_eval(w, &ext)?;
    let u = plot.m;
    lifted
        .contract_coord(u)
        .freeze_last_coord()
        .integrate_param(u)
        .truncate(&plot.x_space())
}

/// Both sides of `ρ((b + B) w) = (d + P) ρ(w)` on a plot.
#[derive(Clone, Debug)]
pub struct ChainMapReport {
    pub lhs: Form,
    pub rhs: Form,
}

impl ChainMapReport {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn chain_map_check(w: &Chain, plot: &Plot) -> Result<ChainMapReport> {
    let lhs = rho_eval(&w.b_plus_b(), plot)?;
    let rhs = rho_eval(w, plot)?.d().add(&p_term(w, plot)?);
    Ok(ChainMapReport { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Scalar};
    use crate::trig::TrigPoly;

    #[test]
    fn function_evaluates_at_base_point() {
        let sp = VarSpace::periodic(1);
        let f = TTForm::function(1, TrigPoly::exp(&sp, 0, 1));
        let w = Chain::tensor(Scalar::one(), vec![f]);
        let plot = Plot::new(1, 1, vec![vec![2]], vec![1], vec![rat(1, 4)]).unwrap();
        let got = tilde_rho_eval(&w, &plot).unwrap();
        let xs = VarSpace::periodic(1);
        assert_eq!(got, Form::function(1, TrigPoly::exp(&xs, 0, 2).scale(&Scalar::i())));
        // the rotation average of e^{iτ(2x + t + 1/4)} vanishes
        assert!(rho_eval(&w, &plot).unwrap().is_zero());
    }

    #[test]
    fn constant_loop_theta_slot() {
        let sp = VarSpace::periodic(1);
        let beta = Form::monomial(1, 1, TrigPoly::exp(&sp, 0, 1));
        let w = Chain::tensor(Scalar::one(), vec![TTForm::one(&sp, 1), TTForm::theta(beta.clone())]);
        let got = tilde_rho_eval(&w, &Plot::identity(1)).unwrap();
        assert_eq!(got, beta.neg());
    }

    #[test]
    fn offsets_must_be_quarter_turns() {
        assert!(matches!(
            Plot::new(0, 1, vec![vec![]], vec![1], vec![rat(1, 3)]),
            Err(Error::InexactPhase(_))
        ));
    }
}
