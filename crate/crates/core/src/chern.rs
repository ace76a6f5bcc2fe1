//! Odd and even Chern chains of unitary matrix functions and connections.
//!
//! For `g : T^d → U(l)` with Maurer–Cartan form `ω = g⁻¹dg`,
//!
//! * `𝒜^s = s ω + s(1−s) ϑ∧ω²` and `ℬ = −ϑ∧ω`,
//! * `Ch⁻ₙ(g) = Trₙ[∫₀¹ 1 ⊗ Σ_k 𝒜^{⊗(k−1)} ⊗ ℬ ⊗ 𝒜^{⊗(n−k)} ds]`,
//! * `Ch⁺ₙ(C) = Trₙ[1 ⊗ (C − ϑ∧R_C)^{⊗n}]` for a connection form `C`.

use crate::cyclic::{make_degenerate, Chain, DegenerateKind};
use crate::error::{Error, Result};
use crate::form::{Form, TTForm};
use crate::matrix::MatForm;
use crate::scalar::Scalar;
use crate::trig::{Mono, TrigPoly, VarKind, VarSpace};

/// One factor of a word defining a unitary matrix function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    /// `diag(e^{iτ(⟨k_j, x⟩ + (q_j/4) t)})`: per diagonal entry an integer
    /// frequency vector `k_j` and a quarter-unit rate `q_j` along the
    /// homotopy parameter (zero for maps without one).
    DiagExp { freqs: Vec<Vec<i32>>, rates: Vec<i32> },
    /// A constant unitary matrix over ℚ(i).
    Const(Vec<Vec<Scalar>>),
    /// Block diagonal sum of two maps on the same torus.
    Sum(Box<UnitaryMap>, Box<UnitaryMap>),
}

impl Generator {
    pub fn diag_exp(freqs: Vec<Vec<i32>>) -> Self {
        let rates = vec![0; freqs.len()];
        Generator::DiagExp { freqs, rates }
    }

    fn size(&self) -> usize {
        match self {
            Generator::DiagExp { freqs, .. } => freqs.len(),
            Generator::Const(m) => m.len(),
            Generator::Sum(a, b) => a.l + b.l,
        }
    }
}

/// A unitary matrix function given as a word in [`Generator`]s.
///
/// With `timed` set, the last variable is a homotopy parameter `t ∈ [0, 1]`
/// that is also a coordinate (so `ω` picks up `dt` components).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitaryMap {
    l: usize,
    d: usize,
    timed: bool,
    word: Vec<Generator>,
}

fn scalar_matrix_is_unitary(m: &[Vec<Scalar>]) -> bool {
    let l = m.len();
    for i in 0..l {
        for j in 0..l {
            let mut acc = Scalar::zero();
            for k in 0..l {
                acc += &(&m[i][k] * &m[j][k].conj());
            }
            let expected = if i == j { Scalar::one() } else { Scalar::zero() };
            if acc != expected {
                return false;
            }
        }
    }
    true
}

impl UnitaryMap {
    pub fn new(l: usize, d: usize, word: Vec<Generator>) -> Result<Self> {
        Self::build(l, d, false, word)
    }

    fn build(l: usize, d: usize, timed: bool, word: Vec<Generator>) -> Result<Self> {
        for g in &word {
            if g.size() != l {
                return Err(Error::DimensionMismatch(format!("generator of size {} in a word of size {l}", g.size())));
            }
            match g {
                Generator::DiagExp { freqs, rates } => {
                    if rates.len() != l || freqs.iter().any(|k| k.len() != d) {
                        return Err(Error::DimensionMismatch("diagonal exponential frequency data".into()));
                    }
                    if !timed && rates.iter().any(|r| *r != 0) {
                        return Err(Error::LayoutMismatch("time rates need a homotopy parameter".into()));
                    }
                }
                Generator::Const(m) => {
                    if m.iter().any(|r| r.len() != l) {
                        return Err(Error::DimensionMismatch("constant matrix must be square".into()));
                    }
                    if !scalar_matrix_is_unitary(m) {
                        return Err(Error::NotUnitary("constant factor".into()));
                    }
                }
                Generator::Sum(a, b) => {
                    if a.d != d || b.d != d || a.timed != timed || b.timed != timed {
                        return Err(Error::LayoutMismatch("block summands must share the torus".into()));
                    }
                }
            }
        }
        let g = UnitaryMap { l, d, timed, word };
        let prod = g.matrix().mul(&g.inverse_matrix())?;
        if prod != MatForm::identity(&g.space(), g.coords(), l) {
            return Err(Error::NotUnitary("g·g* ≠ 1".into()));
        }
        Ok(g)
    }

    /// The constant identity map.
    pub fn identity(l: usize, d: usize) -> Self {
        UnitaryMap {
            l,
            d,
            timed: false,
            word: Vec::new(),
        }
    }

    /// `x ↦ e^{iτ⟨k, x⟩}` as a 1×1 map.
    pub fn character(k: Vec<i32>) -> Self {
        let d = k.len();
        UnitaryMap::new(1, d, vec![Generator::diag_exp(vec![k])]).expect("characters are unitary")
    }

    pub fn direct_sum(&self, other: &UnitaryMap) -> Result<UnitaryMap> {
        Self::build(
            self.l + other.l,
            self.d,
            self.timed,
            vec![Generator::Sum(Box::new(self.clone()), Box::new(other.clone()))],
        )
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn word(&self) -> &[Generator] {
        &self.word
    }

    pub fn space(&self) -> VarSpace {
        if self.timed {
            VarSpace::periodic(self.d).extended(&[VarKind::Interval])
        } else {
            VarSpace::periodic(self.d)
        }
    }

    pub fn coords(&self) -> usize {
        self.d + usize::from(self.timed)
    }

    fn generator_matrix(&self, g: &Generator, inverse: bool) -> MatForm {
        let space = self.space();
        let coords = self.coords();
        match g {
            Generator::DiagExp { freqs, rates } => {
                let mut m = MatForm::zero(&space, coords, self.l, self.l);
                let sgn = if inverse { -1 } else { 1 };
                for (j, k) in freqs.iter().enumerate() {
                    let mut key: Vec<Mono> = k.iter().map(|f| Mono { freq: 4 * sgn * f, pow: 0 }).collect();
                    if self.timed {
                        key.push(Mono { freq: sgn * rates[j], pow: 0 });
                    }
                    let p = TrigPoly::term(&space, key, Scalar::one());
                    m.set(j, j, TTForm::function(coords, p));
                }
                m
            }
            Generator::Const(c) => {
                if inverse {
                    let t: Vec<Vec<Scalar>> = (0..self.l).map(|i| (0..self.l).map(|j| c[j][i].conj()).collect()).collect();
                    MatForm::constant(&space, coords, &t)
                } else {
                    MatForm::constant(&space, coords, c)
                }
            }
            Generator::Sum(a, b) => {
                if inverse {
                    a.inverse_matrix().direct_sum(&b.inverse_matrix())
                } else {
                    a.matrix().direct_sum(&b.matrix())
                }
            }
        }
    }

    /// The matrix of functions `g`.
    pub fn matrix(&self) -> MatForm {
        let mut acc = MatForm::identity(&self.space(), self.coords(), self.l);
        for g in &self.word {
            acc = acc.mul(&self.generator_matrix(g, false)).expect("square factors");
        }
        acc
    }

    /// The matrix of functions `g⁻¹ = g*`.
    pub fn inverse_matrix(&self) -> MatForm {
        let mut acc = MatForm::identity(&self.space(), self.coords(), self.l);
        for g in self.word.iter().rev() {
            acc = acc.mul(&self.generator_matrix(g, true)).expect("square factors");
        }
        acc
    }

    /// `ω_g = g⁻¹ dg`.
    pub fn maurer_cartan(&self) -> MatForm {
        self.inverse_matrix().mul(&self.matrix().d()).expect("square factors")
    }
}

/// A homotopy `g_t` of unitary maps, `t ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyPath {
    map: UnitaryMap,
}

impl HomotopyPath {
    pub fn new(l: usize, d: usize, word: Vec<Generator>) -> Result<Self> {
        Ok(HomotopyPath {
            map: UnitaryMap::build(l, d, true, word)?,
        })
    }

    /// The family as a map on `T^d × I`.
    pub fn family(&self) -> &UnitaryMap {
        &self.map
    }

    /// The map at `t = 0` or `t = 1`.
    pub fn endpoint(&self, at_one: bool) -> Result<UnitaryMap> {
        let word = self
            .map
            .word
            .iter()
            .map(|g| endpoint_generator(g, at_one))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        UnitaryMap::new(self.map.l, self.map.d, word)
    }
}

fn endpoint_generator(g: &Generator, at_one: bool) -> Result<Vec<Generator>> {
    Ok(match g {
        Generator::DiagExp { freqs, rates } => {
            let mut out = vec![Generator::diag_exp(freqs.clone())];
            if at_one && rates.iter().any(|r| *r != 0) {
                let l = rates.len();
                let phase = (0..l)
                    .map(|i| {
                        (0..l)
                            .map(|j| if i == j { Scalar::unit_phase(rates[i] as i64) } else { Scalar::zero() })
                            .collect()
                    })
                    .collect();
                out.push(Generator::Const(phase));
            }
            out
        }
        Generator::Const(c) => vec![Generator::Const(c.clone())],
        Generator::Sum(a, b) => {
            let ea = HomotopyPath { map: (**a).clone() }.endpoint(at_one)?;
            let eb = HomotopyPath { map: (**b).clone() }.endpoint(at_one)?;
            vec![Generator::Sum(Box::new(ea), Box::new(eb))]
        }
    })
}

/// A connection `d + C` on a trivial bundle; `C` is a matrix of 1-forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionForm {
    c: MatForm,
}

impl ConnectionForm {
    pub fn new(c: MatForm) -> Result<Self> {
        if c.rows() != c.cols() {
            return Err(Error::DimensionMismatch("connection form must be square".into()));
        }
        if c.entries().iter().any(|w| !w.beta.is_zero() || w.alpha.degrees().iter().any(|k| *k != 1)) {
            return Err(Error::DimensionMismatch("connection form entries must be 1-forms".into()));
        }
        Ok(ConnectionForm { c })
    }

    pub fn zero(l: usize, d: usize) -> Self {
        ConnectionForm {
            c: MatForm::zero(&VarSpace::periodic(d), d, l, l),
        }
    }

    pub fn form(&self) -> &MatForm {
        &self.c
    }

    pub fn l(&self) -> usize {
        self.c.rows()
    }

    /// `R_C = dC + C∧C`.
    pub fn curvature(&self) -> MatForm {
        self.c.d().add(&self.c.mul(&self.c).expect("square"))
    }
}

/// `Trₙ[v⁰ ⊗ … ⊗ vⁿ] = Σ v⁰_{i₀i₁} ⊗ v¹_{i₁i₂} ⊗ … ⊗ vⁿ_{iₙi₀}`.
pub fn generalized_trace(slots: &[MatForm]) -> Result<Chain> {
    let first = slots.first().ok_or_else(|| Error::DimensionMismatch("empty trace".into()))?;
    let n = slots.len();
    for (k, s) in slots.iter().enumerate() {
        let next = &slots[(k + 1) % n];
        if s.cols() != next.rows() {
            return Err(Error::DimensionMismatch(format!("slot {k} does not compose with slot {}", (k + 1) % n)));
        }
    }
    let mut out = Chain::zero(first.space(), first.coords());
    let mut acc: Vec<TTForm> = Vec::with_capacity(n);
    for i0 in 0..first.rows() {
        trace_rec(slots, 0, i0, i0, &mut acc, &mut out);
    }
    Ok(out.compact())
}

fn trace_rec(slots: &[MatForm], k: usize, row: usize, i0: usize, acc: &mut Vec<TTForm>, out: &mut Chain) {
    let s = &slots[k];
    let last = k + 1 == slots.len();
    let cols: Vec<usize> = if last { vec![i0] } else { (0..s.cols()).collect() };
    for j in cols {
        let e = s.get(row, j);
        if e.is_zero() || (k > 0 && e.drop_unit().is_zero()) {
            continue;
        }
        acc.push(e.clone());
        if last {
            out.push(Scalar::one(), acc.clone());
        } else {
            trace_rec(slots, k + 1, j, i0, acc, out);
        }
        acc.pop();
    }
}

/// `(𝒜^s, ℬ)` on the layout of `omega` extended by an interval variable `s`
/// (returned as its index).
pub fn script_a_b(omega: &MatForm) -> (MatForm, MatForm, usize) {
    let base = omega.space();
    let space = base.extended(&[VarKind::Interval]);
    let s_var = base.len();
    let lifted = omega.map(|w| w.map_forms(|f| f.extend_space(&space)));
    let s = TrigPoly::var(&space, s_var);
    let s_one_minus_s = &s - &(&s * &s);
    let omega2 = lifted.mul(&lifted).expect("square");
    let a = lifted
        .mul_function(&s)
        .add(&omega2.map(|w| TTForm::theta(w.alpha.clone())).mul_function(&s_one_minus_s));
    let b = lifted.map(|w| TTForm::theta(w.alpha.neg()));
    (a, b, s_var)
}

fn chern_minus_slots(a: &MatForm, b: &MatForm, n: usize, k: usize) -> Vec<MatForm> {
    let id = MatForm::identity(a.space(), a.coords(), a.rows());
    let mut slots = vec![id];
    slots.extend(std::iter::repeat_n(a.clone(), k - 1));
    slots.push(b.clone());
    slots.extend(std::iter::repeat_n(a.clone(), n - k));
    slots
}

/// `Ch⁻ₙ` built from a Maurer–Cartan matrix on any layout.
pub fn chern_minus_from_mc(omega: &MatForm, n: usize) -> Chain {
    let base = omega.space().clone();
    let coords = omega.coords();
    if n == 0 {
        return Chain::zero(&base, coords);
    }
    let (with_s, s_var) = chern_minus_integrand(omega, n);
    with_s
        .integrate_param(s_var)
        .restrict_space(&base)
        .expect("s integrated out")
}

/// The chain under the `s`-integral in `Ch⁻ₙ`, on the layout of `omega`
/// extended by `s` (returned as its index).
pub fn chern_minus_integrand(omega: &MatForm, n: usize) -> (Chain, usize) {
    let (a, b, s_var) = script_a_b(omega);
    let parts: Vec<Chain> = (1..=n)
        .map(|k| generalized_trace(&chern_minus_slots(&a, &b, n, k)).expect("square slots"))
        .collect();
    (Chain::sum(a.space(), omega.coords(), &parts), s_var)
}

/// The `n`-th component of the odd Chern chain.
pub fn chern_minus(g: &UnitaryMap, n: usize) -> Chain {
    chern_minus_from_mc(&g.maurer_cartan(), n)
}

/// The `n`-th component of the even Chern chain of a connection.
pub fn chern_plus(c: &ConnectionForm, n: usize) -> Chain {
    chern_plus_from_form(c.form(), &c.curvature(), n)
}

fn chern_plus_from_form(c: &MatForm, r: &MatForm, n: usize) -> Chain {
    let slot = c.sub(&r.map(|w| TTForm::theta(w.alpha.clone())));
    let mut slots = vec![MatForm::identity(c.space(), c.coords(), c.rows())];
    slots.extend(std::iter::repeat_n(slot, n));
    generalized_trace(&slots).expect("square slots")
}

/// `Trₙ[1 ⊗ ωⁿ]`.
pub fn trace_power(g: &UnitaryMap, n: usize) -> Chain {
    let omega = g.maurer_cartan();
    let mut slots = vec![MatForm::identity(omega.space(), omega.coords(), g.l())];
    slots.extend(std::iter::repeat_n(omega, n));
    generalized_trace(&slots).expect("square slots")
}

/// `(b⟨Ch⁻ₙ⟩)ₙ + (b⟨Ch⁻ₙ₊₁⟩)ₙ`, the order-`n` part of `b Ch⁻(g)`.
pub fn b_chern_minus(g: &UnitaryMap, n: usize) -> Chain {
    let omega = g.maurer_cartan();
    let here = chern_minus_from_mc(&omega, n).hochschild_b().order_part(n);
    let next = chern_minus_from_mc(&omega, n + 1).hochschild_b().order_part(n);
    here.add(&next)
}

/// Checks `(b Ch⁻(g))ₙ = Trₙ[1 ⊗ ωⁿ]` exactly.
pub fn bchern_identity_check(g: &UnitaryMap, n: usize) -> bool {
    crate::cyclic::chain_equal(&b_chern_minus(g, n), &trace_power(g, n))
}

/// Data of one generator of the degenerate subspace.
#[derive(Clone, Debug)]
pub struct DegenerateSpec {
    pub kind: DegenerateKind,
    pub factors: Vec<TTForm>,
    pub r: usize,
    pub f: TTForm,
    pub coef: Scalar,
}

impl DegenerateSpec {
    pub fn build(&self) -> Result<Chain> {
        Ok(make_degenerate(self.kind, &self.factors, self.r, &self.f)?.scale(&self.coef))
    }
}

/// Decomposition `Trₙ[1 ⊗ ωⁿ] = Σ generators + remainder`.
#[derive(Clone, Debug)]
pub struct TraceWitness {
    pub generators: Vec<DegenerateSpec>,
    pub remainder: Chain,
}

impl TraceWitness {
    pub fn generator_sum(&self) -> Result<Chain> {
        let parts = self.generators.iter().map(DegenerateSpec::build).collect::<Result<Vec<_>>>()?;
        Ok(Chain::sum(self.remainder.space(), self.remainder.coords(), &parts))
    }

    /// Σ generators + remainder.
    pub fn total(&self) -> Result<Chain> {
        Ok(self.generator_sum()?.add(&self.remainder))
    }
}

/// Scalar Leibniz generators, summed over trace indices, for the matrix
/// relation with `f` inserted after slot `r − 1` of `slots` (`a₀, …`).
fn matrix_leibniz(slots: &[MatForm], r: usize, f: &MatForm, coef: &Scalar, out: &mut Vec<DegenerateSpec>) {
    // full cyclic index pattern: slots[0..r] then f then slots[r..]
    let mut pattern: Vec<&MatForm> = slots[..r].iter().collect();
    pattern.push(f);
    pattern.extend(slots[r..].iter());
    let l = slots[0].rows();
    let total = pattern.len();
    let mut idx = vec![0usize; total];
    loop {
        let entries: Vec<&TTForm> = (0..total).map(|k| pattern[k].get(idx[k], idx[(k + 1) % total])).collect();
        if entries.iter().all(|e| !e.is_zero()) {
            let mut factors: Vec<TTForm> = entries.iter().map(|e| (*e).clone()).collect();
            let fe = factors.remove(r);
            out.push(DegenerateSpec {
                kind: DegenerateKind::Leibniz,
                factors,
                r,
                f: fe,
                coef: coef.clone(),
            });
        }
        let mut k = 0;
        while k < total {
            idx[k] += 1;
            if idx[k] < l {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == total {
            break;
        }
    }
}

/// Decomposes `Trₙ[1 ⊗ ωⁿ]` into Leibniz generators (with `f = g⁻¹` and
/// `f = g`) plus the explicit remainder `[1|dg⁻¹|dg|ωⁿ⁻¹] − Σ_{k<n} Trₖ[1 ⊗ ωᵏ]`.
pub fn trace_degenerate_witness(g: &UnitaryMap, n: usize) -> Result<TraceWitness> {
    if n == 0 {
        return Err(Error::SlotOutOfRange { r: 0, n: 0 });
    }
    let gm = g.matrix();
    let h = g.inverse_matrix();
    let dg = gm.d();
    let dh = h.d();
    let omega = g.maurer_cartan();
    let one = MatForm::identity(omega.space(), omega.coords(), g.l());
    let mut gens = Vec::new();

    // [h|dg] = [hg] + [h|dg] − [gh]
    matrix_leibniz(std::slice::from_ref(&h), 1, &gm, &Scalar::one(), &mut gens);
    // [h|dg|ωᵏ] − [h|dg|ωᵏ⁻¹] + [1|ωᵏ] = [hg|ωᵏ] + [h|dg|ωᵏ] − [h|gω|ωᵏ⁻¹]
    for k in 1..n {
        let mut slots = vec![h.clone()];
        slots.extend(std::iter::repeat_n(omega.clone(), k));
        matrix_leibniz(&slots, 1, &gm, &Scalar::one(), &mut gens);
    }
    // −([h|dg|ωⁿ⁻¹] + [1|dh|dg|ωⁿ⁻¹] − [1|h dg|ωⁿ⁻¹])
    let mut slots = vec![one.clone(), dg.clone()];
    slots.extend(std::iter::repeat_n(omega.clone(), n - 1));
    matrix_leibniz(&slots, 1, &h, &Scalar::from_int(-1), &mut gens);

    let mut k_slots = vec![one, dh, dg];
    k_slots.extend(std::iter::repeat_n(omega, n - 1));
    let mut remainder = generalized_trace(&k_slots)?;
    for k in 1..n {
        remainder = remainder.sub(&trace_power(g, k));
    }
    Ok(TraceWitness {
        generators: gens,
        remainder,
    })
}

/// Checks `Ch⁻ₙ(g ⊕ h) = Ch⁻ₙ(g) + Ch⁻ₙ(h)` exactly for `n ≤ max_n`.
pub fn direct_sum_chern(g: &UnitaryMap, h: &UnitaryMap, max_n: usize) -> Result<bool> {
    let gh = g.direct_sum(h)?;
    for n in 0..=max_n {
        let lhs = chern_minus(&gh, n);
        let rhs = chern_minus(g, n).add(&chern_minus(h, n));
        if !crate::cyclic::chain_equal(&lhs, &rhs) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Which contraction with `∂_t` to use on ϑ-parts in the homotopy chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Contraction {
    /// `ια − ϑ∧ιβ`.
    #[default]
    Graded,
    /// `ια + ϑ∧ιβ`.
    Plain,
}

/// The transgression chain `wₙ` of a homotopy.
pub fn build_homotopy_chain(path: &HomotopyPath, n: usize) -> Result<Chain> {
    build_homotopy_chain_with(path, n, Contraction::default())
}

pub fn build_homotopy_chain_with(path: &HomotopyPath, n: usize, conv: Contraction) -> Result<Chain> {
    let fam = path.family();
    let d = fam.d();
    let base = VarSpace::periodic(d);
    if n == 0 {
        return Ok(Chain::zero(&base, d));
    }
    let omega = fam.maurer_cartan();
    let (a, b, s_var) = script_a_b(&omega);
    let t = d;
    let iota = |m: &MatForm| {
        m.map(|w| match conv {
            Contraction::Graded => w.contract_coord_graded(t),
            Contraction::Plain => w.contract_coord(t),
        })
    };
    let ia = iota(&a);
    let ib = iota(&b);
    let id = MatForm::identity(a.space(), a.coords(), fam.l());
    let rep = |m: &MatForm, k: usize| std::iter::repeat_n(m.clone(), k);
    let mut parts: Vec<Chain> = Vec::new();
    for k in 1..=n {
        for l in 0..k.saturating_sub(1) {
            let mut slots = vec![id.clone()];
            slots.extend(rep(&a, l));
            slots.push(ia.clone());
            slots.extend(rep(&a, k - l - 2));
            slots.push(b.clone());
            slots.extend(rep(&a, n - k));
            parts.push(generalized_trace(&slots)?.neg());
        }
        for l in 0..(n - k) {
            let mut slots = vec![id.clone()];
            slots.extend(rep(&a, k - 1));
            slots.push(b.clone());
            slots.extend(rep(&a, l));
            slots.push(ia.clone());
            slots.extend(rep(&a, n - k - l - 1));
            parts.push(generalized_trace(&slots)?);
        }
        let mut slots = vec![id.clone()];
        slots.extend(rep(&a, k - 1));
        slots.push(ib.clone());
        slots.extend(rep(&a, n - k));
        parts.push(generalized_trace(&slots)?.neg());
    }
    let total = Chain::sum(a.space(), a.coords(), &parts);
    let frozen = total.map_factors(a.space(), d, |_, w| Ok(w.freeze_last_coord()))?;
    frozen
        .integrate_param(s_var)
        .integrate_param(t)
        .restrict_space(&base)
}

/// `(b⟨wₙ⟩)ₙ + (b⟨wₙ₊₁⟩)ₙ − (Ch⁻ₙ(g₁) − Ch⁻ₙ(g₀))`; vanishes modulo the degenerate subspace.
pub fn homotopy_residual(path: &HomotopyPath, n: usize) -> Result<Chain> {
    homotopy_residual_with(path, n, Contraction::default())
}

pub fn homotopy_residual_with(path: &HomotopyPath, n: usize, conv: Contraction) -> Result<Chain> {
    let bw = build_homotopy_chain_with(path, n, conv)?
        .hochschild_b()
        .order_part(n)
        .add(&build_homotopy_chain_with(path, n + 1, conv)?.hochschild_b().order_part(n));
    let g1 = path.endpoint(true)?;
    let g0 = path.endpoint(false)?;
    Ok(bw.sub(&chern_minus(&g1, n).sub(&chern_minus(&g0, n))))
}

/// `Ch⁺ₙ(Ã)` for `Ã = s ω_g` on `T^d × I_s`, with `s` the last coordinate.
pub fn even_chern_of_interpolation(g: &UnitaryMap, n: usize) -> Chain {
    let omega = g.maurer_cartan();
    let d = g.d();
    let space = VarSpace::periodic(d).extended(&[VarKind::Interval]);
    let lifted = omega.map(|w| w.map_forms(|f| f.extend_space(&space).promote_param()));
    let s = TrigPoly::var(&space, d);
    let c = lifted.mul_function(&s);
    let r = c.d().add(&c.mul(&c).expect("square"));
    chern_plus_from_form(&c, &r, n)
}

/// Checks `Ch⁻ₙ(g) = ∫_I ι_{∂_s} Ch⁺ₙ(Ã)` exactly.
pub fn periodicity_check(g: &UnitaryMap, n: usize) -> Result<bool> {
    let odd = even_chern_of_interpolation(g, n).fiber_integrate_last()?;
    Ok(crate::cyclic::chain_equal(&odd, &chern_minus(g, n)))
}

/// Integration over the interval fiber of a form on `T^d × I`.
pub fn fiber_integrate_i(w: &Form) -> Result<Form> {
    w.fiber_integrate_last()
}

/// Checks `dω + ω∧ω = 0`.
pub fn maurer_cartan_holds(g: &UnitaryMap) -> bool {
    let w = g.maurer_cartan();
    w.d().add(&w.mul(&w).expect("square")).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclic::chain_equal;

    fn char1() -> UnitaryMap {
        UnitaryMap::character(vec![1])
    }

    fn i_tau() -> Scalar {
        &Scalar::i() * &Scalar::tau_pow(1)
    }

    #[test]
    fn maurer_cartan_of_character() {
        let g = UnitaryMap::character(vec![3]);
        let sp = VarSpace::periodic(1);
        let expected = Form::dx(&sp, 1, 0).scale(&(&i_tau() * &Scalar::from_int(3)));
        assert_eq!(g.maurer_cartan().get(0, 0).alpha, expected);
        assert!(UnitaryMap::identity(2, 2).maurer_cartan().is_zero());
    }

    #[test]
    fn chern_one_of_character() {
        let g = char1();
        let sp = VarSpace::periodic(1);
        let b = TTForm::theta(Form::dx(&sp, 1, 0).scale(&i_tau()).neg());
        let expected = Chain::tensor(Scalar::one(), vec![TTForm::one(&sp, 1), b]);
        assert!(chain_equal(&chern_minus(&g, 1), &expected));
        assert!(chern_minus(&g, 0).is_zero());
    }

    #[test]
    fn rejects_non_unitary_constants() {
        let m = vec![vec![Scalar::from_int(2)]];
        assert!(matches!(UnitaryMap::new(1, 1, vec![Generator::Const(m)]), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn zero_connection() {
        let c = ConnectionForm::zero(2, 2);
        let sp = VarSpace::periodic(2);
        let two = Chain::tensor(Scalar::from_int(2), vec![TTForm::one(&sp, 2)]);
        assert!(chain_equal(&chern_plus(&c, 0), &two));
        assert!(chern_plus(&c, 1).is_zero());
        assert!(chern_plus(&c, 3).is_zero());
    }

    #[test]
    fn fiber_integration_examples() {
        let sp = VarSpace::periodic(1).extended(&[VarKind::Interval]);
        let ds = Form::dx(&sp, 2, 1);
        let dx = Form::dx(&sp, 2, 0);
        let s = TrigPoly::var(&sp, 1);
        let w = ds.wedge(&dx).mul_function(&s);
        let out = fiber_integrate_i(&w).unwrap();
        let base = VarSpace::periodic(1);
        assert_eq!(out, Form::dx(&base, 1, 0).scale(&Scalar::frac(1, 2)));
        assert!(fiber_integrate_i(&dx).unwrap().is_zero());
    }
}
