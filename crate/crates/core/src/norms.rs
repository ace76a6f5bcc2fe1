//! Coefficient-mass seminorms on forms, their projective tensor upper
//! bounds, and the entire seminorm `κ_ε(w) = Σ εₙ(wₙ)/√n!`.

use num_complex::Complex64;

use crate::chern::{chern_minus, script_a_b, UnitaryMap};
use crate::cyclic::Chain;
use crate::form::{Form, TTForm};

/// `ε_C(α + ϑβ) = Σ |c| C^{|I|}` summed over the stored monomials of `α` and `β`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeminormSpec {
    base: f64,
}

impl SeminormSpec {
    /// Panics unless `base ≥ 1`.
    pub fn new(base: f64) -> Self {
        assert!(base >= 1.0, "seminorm base must be at least 1, got {base}");
        SeminormSpec { base }
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn form(&self, w: &Form) -> f64 {
        w.mass(self.base)
    }

    pub fn eval(&self, w: &TTForm) -> f64 {
        w.mass(self.base)
    }
}

impl Default for SeminormSpec {
    fn default() -> Self {
        SeminormSpec { base: 1.0 }
    }
}

/// Upper bound for the projective seminorm of a sum of elementary tensors:
/// the sum over stored tensors of `|coef| Π ε(factor)`, after merging equal tensors.
pub fn tensor_seminorm_upper(w: &Chain, eps: &SeminormSpec) -> f64 {
    w.compact()
        .terms()
        .iter()
        .map(|t| t.coef.eval().norm() * t.factors.iter().map(|f| eps.eval(f)).product::<f64>())
        .fold(0.0, |a, b| a + b)
}

fn sqrt_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).sqrt()).product()
}

/// `Σ_{n ≤ N} εₙ(wₙ)/√n!` for the components of `w` of order at most `N`.
pub fn kappa_upper(w: &Chain, eps: &SeminormSpec, truncate: usize) -> f64 {
    (0..=truncate)
        .map(|n| tensor_seminorm_upper(&w.order_part(n), eps) / sqrt_factorial(n))
        .sum()
}

/// `ε` of a form whose coefficients depend on the parameter `var`, with
/// `var = s` substituted numerically.
fn mass_at(w: &Form, var: usize, s: f64, base: f64) -> f64 {
    let mut total = 0.0;
    for (mask, p) in w.components() {
        let mut grouped: std::collections::BTreeMap<Vec<crate::trig::Mono>, Complex64> = Default::default();
        for (key, c) in p.terms() {
            let m = key[var];
            let phase = Complex64::from_polar(1.0, std::f64::consts::TAU * f64::from(m.freq) / 4.0 * s);
            let value = c.eval() * phase * s.powi(m.pow as i32);
            let mut rest = key.clone();
            rest[var] = crate::trig::Mono::ONE;
            *grouped.entry(rest).or_default() += value;
        }
        let mass: f64 = grouped.values().map(|z| z.norm()).sum();
        total += mass * base.powi(mask.count_ones() as i32);
    }
    total
}

/// `C_ε = sup_{s ∈ [0,1]} max(ε(1), max ε(𝒜^s_ij), max ε(ℬ_ij))`.
///
/// Sampled on a grid of step 1/1000 and refined by golden-section search
/// around the best grid point.
pub fn chern_growth_constant(g: &UnitaryMap, eps: &SeminormSpec) -> f64 {
    let (a, b, s_var) = script_a_b(&g.maurer_cartan());
    let at = |s: f64| -> f64 {
        let mut best: f64 = 1.0;
        for w in a.entries().iter().chain(b.entries()) {
            best = best.max(mass_at(&w.alpha, s_var, s, eps.base) + mass_at(&w.beta, s_var, s, eps.base));
        }
        best
    };
    let steps = 1000;
    let (mut arg, mut best) = (0.0, at(0.0));
    for k in 1..=steps {
        let s = k as f64 / steps as f64;
        let v = at(s);
        if v > best {
            arg = s;
            best = v;
        }
    }
    let h = 1.0 / steps as f64;
    let (mut lo, mut hi) = ((arg - h).max(0.0), (arg + h).min(1.0));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if at(m1) < at(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    best.max(at((lo + hi) / 2.0))
}

/// Both sides of `κ_ε(Ch⁻(g)) ≤ Σ n (l² C_ε)ⁿ / √n!`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthReport {
    /// Through [`kappa_matrix_bound`] up to `truncate`.
    pub kappa: f64,
    /// [`kappa_upper`] of the expanded chains of order at most `stored_orders`.
    pub kappa_stored: f64,
    pub stored_orders: usize,
    pub partial_bound: f64,
    pub tail_bound: f64,
    pub c_eps: f64,
    pub truncate: usize,
}

impl GrowthReport {
    pub fn holds(&self) -> bool {
        let rhs = self.partial_bound + self.tail_bound;
        self.kappa <= rhs && self.kappa_stored <= rhs
    }

    /// The comparison against the truncated sum alone.
    pub fn partial_holds(&self) -> bool {
        self.kappa <= self.partial_bound && self.kappa_stored <= self.partial_bound
    }
}

/// `Σ_{n ≤ N} n xⁿ/√n!` and a ratio-test majorant for the rest of the series.
pub fn growth_series(x: f64, truncate: usize) -> (f64, f64) {
    let ln_fact = |n: usize| (1..=n).map(|k| (k as f64).ln()).sum::<f64>();
    let term = |n: usize| {
        if n == 0 || x == 0.0 {
            0.0
        } else {
            ((n as f64).ln() + n as f64 * x.ln() - 0.5 * ln_fact(n)).exp()
        }
    };
    let partial = (0..=truncate).map(term).sum();
    // a_{n+1}/a_n = x √(n+1) / n decreases in n
    let n0 = truncate + 1;
    let mut first = n0;
    while x * ((first + 1) as f64).sqrt() / first as f64 >= 1.0 {
        first += 1;
    }
    let ratio = x * ((first + 1) as f64).sqrt() / first as f64;
    let head: f64 = (n0..first).map(term).sum();
    (partial, head + term(first) / (1.0 - ratio))
}

/// Upper bound for `εₙ(Ch⁻ₙ(g))` from the trace structure alone.
///
/// `Trₙ[v⁰ ⊗ … ⊗ vⁿ]` is a sum of elementary tensors of entries, so its
/// projective seminorm is at most `tr(E⁰ ⋯ Eⁿ)` with `Eᵏᵢⱼ = ε(vᵏᵢⱼ)`. The
/// `s`-integral is bounded by the integral of the seminorm. Costs `O(n l³)`
/// per node, so it reaches orders where expanding the chain is out of reach.
pub fn chern_minus_matrix_bound(g: &UnitaryMap, eps: &SeminormSpec, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let (a, b, s_var) = script_a_b(&g.maurer_cartan());
    let l = g.l();
    let masses = |m: &crate::matrix::MatForm, s: f64| {
        nalgebra::DMatrix::from_fn(l, l, |i, j| {
            let w = m.get(i, j);
            mass_at(&w.alpha, s_var, s, eps.base) + mass_at(&w.beta, s_var, s, eps.base)
        })
    };
    let (nodes, weights) = crate::quadrature::gauss_legendre(16);
    let pieces = 32;
    let mut total = 0.0;
    for p in 0..pieces {
        let (lo, hi) = (p as f64 / pieces as f64, (p + 1) as f64 / pieces as f64);
        for (x, w) in nodes.iter().zip(&weights) {
            let s = lo + (hi - lo) * (x + 1.0) / 2.0;
            let (ea, eb) = (masses(&a, s), masses(&b, s));
            let mut powers = vec![nalgebra::DMatrix::<f64>::identity(l, l)];
            for k in 1..n {
                powers.push(&powers[k - 1] * &ea);
            }
            let value: f64 = (1..=n).map(|k| (&powers[k - 1] * &eb * &powers[n - k]).trace()).sum();
            total += w * (hi - lo) / 2.0 * value;
        }
    }
    total
}

/// `Σ_{n ≤ N} εₙ(Ch⁻ₙ(g))/√n!` bounded through [`chern_minus_matrix_bound`].
pub fn kappa_matrix_bound(g: &UnitaryMap, eps: &SeminormSpec, truncate: usize) -> f64 {
    (1..=truncate)
        .map(|n| chern_minus_matrix_bound(g, eps, n) / sqrt_factorial(n))
        .sum()
}

/// Per-order comparison `εₙ(Ch⁻ₙ(g)) ≤ n (l² C_ε)ⁿ` through the matrix bound.
pub fn per_order_growth(g: &UnitaryMap, eps: &SeminormSpec, truncate: usize) -> Vec<(f64, f64)> {
    let c_eps = chern_growth_constant(g, eps);
    let x = (g.l() * g.l()) as f64 * c_eps;
    (1..=truncate)
        .map(|n| (chern_minus_matrix_bound(g, eps, n), n as f64 * x.powi(n as i32)))
        .collect()
}

/// Checks the growth bound up to `truncate`, expanding `Ch⁻ₙ` as stored
/// chains for `n ≤ stored_orders`.
pub fn growth_bound_check(g: &UnitaryMap, eps: &SeminormSpec, truncate: usize, stored_orders: usize) -> GrowthReport {
    let c_eps = chern_growth_constant(g, eps);
    let l = g.l() as f64;
    let stored_orders = stored_orders.min(truncate);
    let kappa_stored = (1..=stored_orders)
        .map(|n| tensor_seminorm_upper(&chern_minus(g, n), eps) / sqrt_factorial(n))
        .sum();
    let (partial_bound, tail_bound) = growth_series(l * l * c_eps, truncate);
    GrowthReport {
        kappa: kappa_matrix_bound(g, eps, truncate),
        kappa_stored,
        stored_orders,
        partial_bound,
        tail_bound,
        c_eps,
        truncate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use crate::trig::VarSpace;

    #[test]
    fn single_tensor_bound() {
        let sp = VarSpace::periodic(1);
        let w = TTForm::from_alpha(Form::dx(&sp, 1, 0).scale(&Scalar::from_int(3)));
        let c = Chain::tensor(Scalar::one(), vec![TTForm::one(&sp, 1), w.clone()]);
        let eps = SeminormSpec::new(2.0);
        assert_eq!(tensor_seminorm_upper(&c, &eps), 6.0);
        assert_eq!(tensor_seminorm_upper(&Chain::zero(&sp, 1), &eps), 0.0);
        let doubled = Chain::tensor(Scalar::one(), vec![w.clone(), w.clone()]);
        let doubled = doubled.add(&doubled);
        assert_eq!(tensor_seminorm_upper(&doubled, &eps), 2.0 * 36.0);
    }

    #[test]
    fn growth_constants() {
        let eps = SeminormSpec::default();
        let g = UnitaryMap::character(vec![1]);
        assert!((chern_growth_constant(&g, &eps) - std::f64::consts::TAU).abs() < 1e-9);
        assert_eq!(chern_growth_constant(&UnitaryMap::identity(2, 1), &eps), 1.0);
    }

    #[test]
    fn matrix_bound_on_first_order() {
        // Ch⁻₁ = −Tr₁[1 ⊗ ϑω] has nothing to merge, so both bounds agree
        let eps = SeminormSpec::default();
        let g = crate::corpus::twisted_pair();
        let stored = tensor_seminorm_upper(&chern_minus(&g, 1), &eps);
        assert!(stored > 0.0);
        assert!((stored - chern_minus_matrix_bound(&g, &eps, 1)).abs() < 1e-9 * stored);
    }

    #[test]
    fn tail_majorant_dominates() {
        let x = 3.0;
        let (partial, tail) = growth_series(x, 10);
        let (long, _) = growth_series(x, 200);
        assert!(long <= partial + tail);
        assert!(long > partial);
    }
}
