//! Numerical odd and even Bismut–Chern characters on affine loop families.
//!
//! Along the loop `γ_x(t) = A x + v t + c` the connection `d + s ω_g` gives
//! the transport `T' = −s ω(v) T`. Write `U = T⁻¹`, so `U' = U · s ω(v)`.
//! Each `𝒜` slot contributes `F = s ω(v) + R` with `R = −s(1−s) ω²` pulled
//! back to `X`, and the `ℬ` slot contributes `Ȧ = ω` pulled back to `X`.
//!
//! Two independent pipelines are provided. The first integrates the system
//! `Xⱼ' = Xⱼ₋₁ F`, `Yⱼ' = Yⱼ₋₁ F + Xⱼ₋₁ Ȧ` by RK4, graded by the number of
//! inserted slots `j`. The second evaluates the ordered-simplex integrals of
//! `U R U⁻¹` and `U Ȧ U⁻¹` against `U(1)` by nested Gauss–Legendre
//! quadrature. The exact side evaluates `ρ(Ch⁻ⱼ)` by the same recursion on
//! trigonometric polynomials.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::chen::{loop_slot_form, Plot};
use crate::chern::{script_a_b, ConnectionForm, UnitaryMap};
use crate::error::{Error, Result};
use crate::form::{mask_wedge_sign, Form, TTForm};
use crate::matrix::MatForm;
use crate::quadrature::gauss_legendre;
use crate::trig::VarKind;

type CMat = DMatrix<Complex64>;

/// Quadrature and ODE parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BchOptions {
    pub rk4_step: f64,
    pub quad_order: usize,
    /// Highest slot count kept in truncated series; `None` picks it from
    /// norm bounds so the neglected tail is below `1e−12`.
    pub max_order: Option<usize>,
}

impl Default for BchOptions {
    fn default() -> Self {
        BchOptions {
            rk4_step: 1e-3,
            quad_order: 24,
            max_order: None,
        }
    }
}

/// A form on `X = T^m` with complex coefficients at one point of `X`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct NumericForm {
    pub comps: BTreeMap<u32, Complex64>,
}

impl NumericForm {
    pub fn add(&self, o: &NumericForm) -> NumericForm {
        let mut comps = self.comps.clone();
        for (m, c) in &o.comps {
            *comps.entry(*m).or_default() += c;
        }
        NumericForm { comps }
    }

    pub fn scale(&self, k: f64) -> NumericForm {
        NumericForm {
            comps: self.comps.iter().map(|(m, c)| (*m, c * k)).collect(),
        }
    }

    /// The part of form degree `k`.
    pub fn part(&self, k: u32) -> NumericForm {
        NumericForm {
            comps: self.comps.iter().filter(|(m, _)| m.count_ones() == k).map(|(m, c)| (*m, *c)).collect(),
        }
    }

    pub fn get(&self, mask: u32) -> Complex64 {
        self.comps.get(&mask).copied().unwrap_or_default()
    }

    /// Largest coefficient deviation, relative to `max(1, |a|, |b|)`.
    pub fn deviation(&self, o: &NumericForm) -> f64 {
        let masks: BTreeSet<u32> = self.comps.keys().chain(o.comps.keys()).copied().collect();
        masks
            .into_iter()
            .map(|m| {
                let (a, b) = (self.get(m), o.get(m));
                (a - b).norm() / 1f64.max(a.norm()).max(b.norm())
            })
            .fold(0.0, f64::max)
    }

    /// Evaluates an exact form on `X` at `x`.
    pub fn from_form(w: &Form, x: &[f64]) -> NumericForm {
        NumericForm {
            comps: w.components().map(|(m, p)| (m, p.eval_numeric(x))).collect(),
        }
    }
}

/// Matrix-valued form on `X` at one point.
#[derive(Clone, Debug)]
struct MatNum {
    l: usize,
    comps: BTreeMap<u32, CMat>,
}

impl MatNum {
    fn zero(l: usize) -> Self {
        MatNum { l, comps: BTreeMap::new() }
    }

    fn identity(l: usize) -> Self {
        let mut comps = BTreeMap::new();
        comps.insert(0, CMat::identity(l, l));
        MatNum { l, comps }
    }

    fn add(&self, o: &MatNum) -> MatNum {
        let mut comps = self.comps.clone();
        for (m, c) in &o.comps {
            comps
                .entry(*m)
                .and_modify(|x| *x += c)
                .or_insert_with(|| c.clone());
        }
        MatNum { l: self.l, comps }
    }

    fn axpy(&self, k: f64, o: &MatNum) -> MatNum {
        self.add(&o.scale(Complex64::new(k, 0.0)))
    }

    fn scale(&self, k: Complex64) -> MatNum {
        MatNum {
            l: self.l,
            comps: self.comps.iter().map(|(m, c)| (*m, c * k)).collect(),
        }
    }

    fn mul(&self, o: &MatNum) -> MatNum {
        let mut comps: BTreeMap<u32, CMat> = BTreeMap::new();
        for (a, x) in &self.comps {
            for (b, y) in &o.comps {
                if let Some(sign) = mask_wedge_sign(*a, *b) {
                    let p = (x * y) * Complex64::new(f64::from(sign), 0.0);
                    comps
                        .entry(a | b)
                        .and_modify(|z| *z += &p)
                        .or_insert(p);
                }
            }
        }
        MatNum { l: self.l, comps }
    }

    /// Right multiplication by a plain matrix.
    fn mul_matrix(&self, m: &CMat) -> MatNum {
        MatNum {
            l: self.l,
            comps: self.comps.iter().map(|(k, x)| (*k, x * m)).collect(),
        }
    }

    fn conjugate(&self, u: &CMat, u_inv: &CMat) -> MatNum {
        MatNum {
            l: self.l,
            comps: self.comps.iter().map(|(k, x)| (*k, u * x * u_inv)).collect(),
        }
    }

    fn trace(&self) -> NumericForm {
        NumericForm {
            comps: self.comps.iter().map(|(m, x)| (*m, x.trace())).collect(),
        }
    }
}

/// Exact matrix of forms on `T^d` (possibly with trailing parameters),
/// evaluated and pulled back numerically along a plot.
struct PlotField<'a> {
    plot: &'a Plot,
    a: Vec<Vec<f64>>,
    v: Vec<f64>,
    c: Vec<f64>,
    /// For each `T^d`-mask, its pullback to `X` as `(x-mask, coefficient)` pairs.
    pullback: BTreeMap<u32, Vec<(u32, f64)>>,
}

impl<'a> PlotField<'a> {
    fn new(plot: &'a Plot) -> Self {
        let a = plot.a().iter().map(|r| r.iter().map(|x| *x as f64).collect()).collect();
        let v = plot.v().iter().map(|x| *x as f64).collect();
        let c = plot.c().iter().map(|x| x.to_f64().unwrap_or(0.0)).collect();
        PlotField {
            plot,
            a,
            v,
            c,
            pullback: BTreeMap::new(),
        }
    }

    fn point(&self, x: &[f64], t: f64) -> Vec<f64> {
        (0..self.plot.d())
            .map(|j| self.a[j].iter().zip(x).map(|(a, x)| a * x).sum::<f64>() + self.v[j] * t + self.c[j])
            .collect()
    }

    fn expansion(&mut self, ymask: u32) -> Vec<(u32, f64)> {
        if let Some(e) = self.pullback.get(&ymask) {
            return e.clone();
        }
        let m = self.plot.m();
        let mut acc: Vec<(u32, f64)> = vec![(0, 1.0)];
        for j in 0..self.plot.d() {
            if ymask & (1 << j) == 0 {
                continue;
            }
            let mut next: BTreeMap<u32, f64> = BTreeMap::new();
            for (xm, c) in &acc {
                for k in 0..m {
                    let a = self.a[j][k];
                    if a == 0.0 {
                        continue;
                    }
                    if let Some(sign) = mask_wedge_sign(*xm, 1 << k) {
                        *next.entry(xm | (1 << k)).or_default() += c * a * f64::from(sign);
                    }
                }
            }
            acc = next.into_iter().filter(|(_, c)| *c != 0.0).collect();
        }
        self.pullback.insert(ymask, acc.clone());
        acc
    }

    fn prepare(&mut self, mats: &[&MatForm]) {
        let masks: BTreeSet<u32> = mats
            .iter()
            .flat_map(|m| m.entries().iter().flat_map(|w| w.alpha.components().map(|(k, _)| k).collect::<Vec<_>>()))
            .collect();
        for k in masks {
            self.expansion(k);
        }
    }

    /// Pulls back the ϑ-free parts of `mat` at `(x, t)` with trailing parameter values `params`.
    fn eval(&self, mat: &MatForm, x: &[f64], t: f64, params: &[f64]) -> MatNum {
        let l = mat.rows();
        let mut point = self.point(x, t);
        point.extend_from_slice(params);
        let mut out: BTreeMap<u32, CMat> = BTreeMap::new();
        for i in 0..l {
            for j in 0..l {
                for (ymask, p) in mat.get(i, j).alpha.components() {
                    let value = p.eval_numeric(&point);
                    if value == Complex64::default() {
                        continue;
                    }
                    for (xm, c) in &self.pullback[&ymask] {
                        out.entry(*xm).or_insert_with(|| CMat::zeros(l, l))[(i, j)] += value * c;
                    }
                }
            }
        }
        MatNum { l, comps: out }
    }
}

/// Slot data of `Ch⁻` along a plot: `ω(v)`, `R` and `Ȧ` as exact matrices
/// on `[y(d), s]`.
struct OddSlots {
    iota: MatForm,
    curv: MatForm,
    adot: MatForm,
}

impl OddSlots {
    fn new(g: &UnitaryMap, plot: &Plot) -> Self {
        let (a, b, _) = script_a_b(&g.maurer_cartan());
        let slot = |m: &MatForm, k: usize| m.map(|w| TTForm::from_alpha(loop_slot_form(w, plot.v()).part(k)));
        OddSlots {
            iota: slot(&a, 0),
            curv: slot(&a, 2),
            adot: slot(&b, 1),
        }
    }
}

fn check_plot(d: usize, plot: &Plot) -> Result<()> {
    if plot.d() != d {
        return Err(Error::LayoutMismatch(format!("plot into T^{} for a map on T^{d}", plot.d())));
    }
    Ok(())
}

fn steps(h: f64) -> usize {
    (1.0 / h).round().max(1.0) as usize
}

/// `T(t_end)` for `T' = −s ω_g(γ̇) T`, `T(0) = 1`, along `γ(t) = A x + v t + c`.
pub fn parallel_transport(g: &UnitaryMap, s: f64, plot: &Plot, x: &[f64], t_end: f64, h: f64) -> Result<CMat> {
    check_plot(g.d(), plot)?;
    let slots = OddSlots::new(g, plot);
    let mut field = PlotField::new(plot);
    field.prepare(&[&slots.iota]);
    let gen = |t: f64| -> CMat {
        let m = field.eval(&slots.iota, x, t, &[s]);
        m.comps.get(&0).cloned().unwrap_or_else(|| CMat::zeros(g.l(), g.l())) * Complex64::new(-1.0, 0.0)
    };
    let n = ((t_end / h).ceil() as usize).max(1);
    let dt = t_end / n as f64;
    let mut y = CMat::identity(g.l(), g.l());
    for k in 0..n {
        let t = k as f64 * dt;
        let (g0, g1, g2) = (gen(t), gen(t + dt / 2.0), gen(t + dt));
        let k1 = &g0 * &y;
        let k2 = &g1 * (&y + &k1 * Complex64::new(dt / 2.0, 0.0));
        let k3 = &g1 * (&y + &k2 * Complex64::new(dt / 2.0, 0.0));
        let k4 = &g2 * (&y + &k3 * Complex64::new(dt, 0.0));
        y += (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4) * Complex64::new(dt / 6.0, 0.0);
    }
    Ok(y)
}

/// Per-order values `∫ds Tr Yⱼ(1)`, `j = 1..=N`, at one point of `X`.
#[derive(Clone, Debug)]
pub struct OddSeries {
    pub orders: Vec<NumericForm>,
}

impl OddSeries {
    pub fn total(&self) -> NumericForm {
        self.orders.iter().fold(NumericForm::default(), |a, b| a.add(b))
    }

    /// The degree `2n−1` component of the total, `Bch⁻_{2n−1}`.
    pub fn bch(&self, n: usize) -> NumericForm {
        self.total().part(2 * n as u32 - 1)
    }
}

fn spectral_norm(m: &CMat) -> f64 {
    m.clone().singular_values().max()
}

/// Slot count `N` past which the neglected part of the series is below `1e−12`.
///
/// With `a ≥ |ω(v)|` and `b ≥ |R| + |Ȧ|` (spectral norms, sampled in `t`
/// with a 5% margin), at most `m` factors of positive degree fit on `X`, so
/// the `j`-slot term is bounded by `l Σ_{k ≤ m} a^{j−k}/(j−k)! · b^k/k!`.
fn truncation_order(field: &PlotField, slots: &OddSlots, x: &[f64], l: usize, opts: &BchOptions) -> usize {
    if let Some(n) = opts.max_order {
        return n;
    }
    let (mut a, mut b): (f64, f64) = (0.0, 0.0);
    for k in 0..=256 {
        let t = k as f64 / 256.0;
        let iota = field.eval(&slots.iota, x, t, &[1.0]);
        if let Some(m) = iota.comps.get(&0) {
            a = a.max(spectral_norm(m));
        }
        let nil = field.eval(&slots.curv, x, t, &[0.5]).add(&field.eval(&slots.adot, x, t, &[0.5]));
        b = b.max(nil.comps.values().map(spectral_norm).sum());
    }
    let (a, b) = (1.05 * a, 1.05 * b);
    let m = field.plot.m();
    let ln_fact = |n: usize| (1..=n).map(|k| (k as f64).ln()).sum::<f64>();
    // Σ_{i > n} aⁱ/i!, by a geometric majorant once i > 2a
    let exp_tail = |n: usize| -> f64 {
        let start = n + 1;
        let term = |i: usize| if a == 0.0 { f64::from(u8::from(i == 0)) } else { (i as f64 * a.ln() - ln_fact(i)).exp() };
        let until = start.max((2.0 * a).ceil() as usize + 1);
        let head: f64 = (start..until).map(term).sum();
        head + 2.0 * term(until)
    };
    let tail = |n: usize| -> f64 {
        (0..=m.min(n))
            .map(|k| {
                let bk = if k == 0 { 1.0 } else { (k as f64 * b.ln() - ln_fact(k)).exp() };
                bk * exp_tail(n - k)
            })
            .sum::<f64>()
            * l as f64
    };
    let mut n = 2;
    while tail(n) >= 1e-12 {
        n += 1;
    }
    n
}

/// The graded transport ODE integrated by RK4, then `∫ds` by Gauss–Legendre.
pub fn bch_minus_ode(g: &UnitaryMap, plot: &Plot, x: &[f64], opts: &BchOptions) -> Result<OddSeries> {
    check_plot(g.d(), plot)?;
    let slots = OddSlots::new(g, plot);
    let mut field = PlotField::new(plot);
    field.prepare(&[&slots.iota, &slots.curv, &slots.adot]);
    let order = truncation_order(&field, &slots, x, g.l(), opts);
    let (nodes, weights) = gauss_legendre(opts.quad_order);
    let l = g.l();
    let per_node: Vec<Vec<NumericForm>> = nodes
        .par_iter()
        .zip(&weights)
        .map(|(node, w)| {
            let s = (node + 1.0) / 2.0;
            let rhs = |t: f64, xs: &[MatNum], ys: &[MatNum]| -> (Vec<MatNum>, Vec<MatNum>) {
                let f = field.eval(&slots.iota, x, t, &[s]).add(&field.eval(&slots.curv, x, t, &[s]));
                let ad = field.eval(&slots.adot, x, t, &[s]);
                let one = MatNum::identity(l);
                // X_{j−1} with X₀ = 1
                let prev = |v: &[MatNum], j: usize| if j == 1 { one.clone() } else { v[j - 2].clone() };
                let dx = (1..=order).map(|j| prev(xs, j).mul(&f)).collect();
                let dy = (1..=order)
                    .map(|j| {
                        let yprev = if j == 1 { MatNum::zero(l) } else { ys[j - 2].clone() };
                        yprev.mul(&f).add(&prev(xs, j).mul(&ad))
                    })
                    .collect();
                (dx, dy)
            };
            let n = steps(opts.rk4_step);
            let h = 1.0 / n as f64;
            let mut xs = vec![MatNum::zero(l); order];
            let mut ys = vec![MatNum::zero(l); order];
            let combine = |base: &[MatNum], k: &[MatNum], c: f64| -> Vec<MatNum> {
                base.iter().zip(k).map(|(b, k)| b.axpy(c, k)).collect()
            };
            for step in 0..n {
                let t = step as f64 * h;
                let (kx1, ky1) = rhs(t, &xs, &ys);
                let (kx2, ky2) = rhs(t + h / 2.0, &combine(&xs, &kx1, h / 2.0), &combine(&ys, &ky1, h / 2.0));
                let (kx3, ky3) = rhs(t + h / 2.0, &combine(&xs, &kx2, h / 2.0), &combine(&ys, &ky2, h / 2.0));
                let (kx4, ky4) = rhs(t + h, &combine(&xs, &kx3, h), &combine(&ys, &ky3, h));
                for j in 0..order {
                    xs[j] = xs[j]
                        .axpy(h / 6.0, &kx1[j])
                        .axpy(h / 3.0, &kx2[j])
                        .axpy(h / 3.0, &kx3[j])
                        .axpy(h / 6.0, &kx4[j]);
                    ys[j] = ys[j]
                        .axpy(h / 6.0, &ky1[j])
                        .axpy(h / 3.0, &ky2[j])
                        .axpy(h / 3.0, &ky3[j])
                        .axpy(h / 6.0, &ky4[j]);
                }
            }
            ys.iter().map(|y| y.trace().scale(w / 2.0)).collect()
        })
        .collect();
    let mut orders = vec![NumericForm::default(); order];
    for node in per_node {
        for (j, f) in node.into_iter().enumerate() {
            orders[j] = orders[j].add(&f);
        }
    }
    Ok(OddSeries { orders })
}

/// Transports `U(t)` (with `U' = U C(t)`) at every time in `times`, sorted ascending.
fn transports<F: Fn(f64) -> CMat>(gen: F, l: usize, times: &[f64], h: f64) -> Vec<CMat> {
    let mut out = Vec::with_capacity(times.len());
    let mut u = CMat::identity(l, l);
    let mut t = 0.0;
    for &target in times {
        let gap = target - t;
        if gap > 0.0 {
            let n = ((gap / h).ceil() as usize).max(1);
            let dt = gap / n as f64;
            for _ in 0..n {
                let (g0, g1, g2) = (gen(t), gen(t + dt / 2.0), gen(t + dt));
                let c = |x: f64| Complex64::new(x, 0.0);
                let k1 = &u * &g0;
                let k2 = (&u + &k1 * c(dt / 2.0)) * &g1;
                let k3 = (&u + &k2 * c(dt / 2.0)) * &g1;
                let k4 = (&u + &k3 * c(dt)) * &g2;
                u += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(dt / 6.0);
                t += dt;
            }
            t = target;
        }
        out.push(u.clone());
    }
    out
}

/// Nested Gauss–Legendre nodes on the simplex `0 ≤ t₁ ≤ … ≤ t_q ≤ 1`.
fn simplex_rule(q: usize, order: usize) -> Vec<(Vec<f64>, f64)> {
    let (nodes, weights) = gauss_legendre(order);
    let mut out = vec![(Vec::new(), 1.0)];
    // build from the outermost variable t_q inward
    for _ in 0..q {
        let mut next = Vec::with_capacity(out.len() * order);
        for (pts, w) in &out {
            let upper = pts.first().copied().unwrap_or(1.0);
            for (x, wx) in nodes.iter().zip(&weights) {
                let t = upper * (x + 1.0) / 2.0;
                let mut p = vec![t];
                p.extend_from_slice(pts);
                next.push((p, w * wx * upper / 2.0));
            }
        }
        out = next;
    }
    out
}

/// `Bch⁻_{2n−1}` at one point of `X` from the ordered-simplex formula with transports.
pub fn bch_minus_iterated(g: &UnitaryMap, plot: &Plot, x: &[f64], n: usize, opts: &BchOptions) -> Result<NumericForm> {
    check_plot(g.d(), plot)?;
    if n == 0 {
        return Err(Error::SlotOutOfRange { r: 0, n: 0 });
    }
    let slots = OddSlots::new(g, plot);
    let mut field = PlotField::new(plot);
    field.prepare(&[&slots.iota, &slots.curv, &slots.adot]);
    let l = g.l();
    let rule = simplex_rule(n, opts.quad_order);
    let mut times: Vec<f64> = rule.iter().flat_map(|(p, _)| p.iter().copied()).collect();
    times.push(1.0);
    times.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    times.dedup();
    let (s_nodes, s_weights) = gauss_legendre(opts.quad_order);
    let per_s: Vec<NumericForm> = s_nodes
        .par_iter()
        .zip(&s_weights)
        .map(|(node, ws)| {
            let s = (node + 1.0) / 2.0;
            let gen = |t: f64| {
                field
                    .eval(&slots.iota, x, t, &[s])
                    .comps
                    .get(&0)
                    .cloned()
                    .unwrap_or_else(|| CMat::zeros(l, l))
            };
            let us = transports(gen, l, &times, opts.rk4_step);
            let at = |t: f64| -> &CMat {
                let i = times.partition_point(|x| *x < t);
                &us[i]
            };
            let u1 = at(1.0).clone();
            let mut acc = NumericForm::default();
            for (pts, w) in &rule {
                let conj: Vec<(MatNum, MatNum)> = pts
                    .iter()
                    .map(|&t| {
                        let u = at(t);
                        let ui = u.clone().try_inverse().expect("transport is invertible");
                        (
                            field.eval(&slots.curv, x, t, &[s]).conjugate(u, &ui),
                            field.eval(&slots.adot, x, t, &[s]).conjugate(u, &ui),
                        )
                    })
                    .collect();
                let mut sum = MatNum::zero(l);
                for pos in 0..n {
                    let mut prod = MatNum::identity(l);
                    for (i, (r, a)) in conj.iter().enumerate() {
                        prod = prod.mul(if i == pos { a } else { r });
                    }
                    sum = sum.add(&prod);
                }
                acc = acc.add(&sum.mul_matrix(&u1).trace().scale(*w));
            }
            acc.scale(ws / 2.0)
        })
        .collect();
    Ok(per_s.iter().fold(NumericForm::default(), |a, b| a.add(b)).part(2 * n as u32 - 1))
}

/// `ρ̃(Ch⁻ⱼ(g))` on a plot for `j = 1..=n_max`, exactly, by the recursion
/// `Pⱼ = ∫₀ᵗ Pⱼ₋₁ F`, `Qⱼ = ∫₀ᵗ (Qⱼ₋₁ F + Pⱼ₋₁ Ȧ)` and `∫ds Tr Qⱼ(1)`.
pub fn rho_chern_series(g: &UnitaryMap, plot: &Plot, n_max: usize) -> Result<Vec<Form>> {
    check_plot(g.d(), plot)?;
    let (a, b, _) = script_a_b(&g.maurer_cartan());
    let m = plot.m();
    let d = plot.d();
    let work = plot.x_space().extended(&[VarKind::Interval, VarKind::Interval]);
    let (s_var, t_var) = (m, m + 1);
    let mut lin: Vec<Vec<i64>> = (0..d)
        .map(|j| {
            let mut r = plot.a()[j].clone();
            r.push(0);
            r.push(plot.v()[j]);
            r
        })
        .collect();
    let mut s_row = vec![0; m + 2];
    s_row[s_var] = 1;
    lin.push(s_row);
    let mut offset = plot.c().to_vec();
    offset.push(BigRational::from_integer(0.into()));
    let pull = |mat: &MatForm| -> Result<MatForm> {
        mat.try_map(|w| Ok(TTForm::from_alpha(loop_slot_form(w, plot.v()).pullback_affine(&work, m, &lin, &offset)?)))
    };
    let f = pull(&a)?;
    let adot = pull(&b)?;
    let l = g.l();
    let mut p = MatForm::identity(&work, m, l);
    let mut q = MatForm::zero(&work, m, l, l);
    let integrate = |mat: MatForm| mat.try_map(|w| w.try_map_forms(|x| x.antiderivative_param(t_var)));
    let mut out = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        let q_next = integrate(q.mul(&f)?.add(&p.mul(&adot)?))?;
        p = integrate(p.mul(&f)?)?;
        q = q_next;
        let tr = q.trace()?.alpha;
        let value = tr.eval_param(t_var, &BigRational::one())?.integrate_param(s_var);
        out.push(value.truncate(&plot.x_space())?);
    }
    Ok(out)
}

/// The ungraded system `X' = X F`, `Y' = Y F + X Ȧ` with `X(0) = 1`,
/// `Y(0) = 0`: the sum over all slot counts of the graded series, `∫ds Tr Y(1)`.
pub fn bch_minus_total(g: &UnitaryMap, plot: &Plot, x: &[f64], opts: &BchOptions) -> Result<NumericForm> {
    check_plot(g.d(), plot)?;
    let slots = OddSlots::new(g, plot);
    let mut field = PlotField::new(plot);
    field.prepare(&[&slots.iota, &slots.curv, &slots.adot]);
    let (nodes, weights) = gauss_legendre(opts.quad_order);
    let l = g.l();
    let per_node: Vec<NumericForm> = nodes
        .par_iter()
        .zip(&weights)
        .map(|(node, w)| {
            let s = (node + 1.0) / 2.0;
            let rhs = |t: f64, xm: &MatNum, ym: &MatNum| -> (MatNum, MatNum) {
                let f = field.eval(&slots.iota, x, t, &[s]).add(&field.eval(&slots.curv, x, t, &[s]));
                let ad = field.eval(&slots.adot, x, t, &[s]);
                (xm.mul(&f), ym.mul(&f).add(&xm.mul(&ad)))
            };
            let n = steps(opts.rk4_step);
            let h = 1.0 / n as f64;
            let (mut xm, mut ym) = (MatNum::identity(l), MatNum::zero(l));
            for step in 0..n {
                let t = step as f64 * h;
                let (kx1, ky1) = rhs(t, &xm, &ym);
                let (kx2, ky2) = rhs(t + h / 2.0, &xm.axpy(h / 2.0, &kx1), &ym.axpy(h / 2.0, &ky1));
                let (kx3, ky3) = rhs(t + h / 2.0, &xm.axpy(h / 2.0, &kx2), &ym.axpy(h / 2.0, &ky2));
                let (kx4, ky4) = rhs(t + h, &xm.axpy(h, &kx3), &ym.axpy(h, &ky3));
                xm = xm.axpy(h / 6.0, &kx1).axpy(h / 3.0, &kx2).axpy(h / 3.0, &kx3).axpy(h / 6.0, &kx4);
                ym = ym.axpy(h / 6.0, &ky1).axpy(h / 3.0, &ky2).axpy(h / 3.0, &ky3).axpy(h / 6.0, &ky4);
            }
            ym.trace().scale(w / 2.0)
        })
        .collect();
    Ok(per_node.iter().fold(NumericForm::default(), |a, b| a.add(b)))
}

/// Deviations between the exact series and the two numerical pipelines for
/// one degree `2n−1`.
#[derive(Clone, Debug)]
pub struct BchComparison {
    pub n: usize,
    pub x: Vec<f64>,
    /// Exact `ρ(Ch⁻)` summed over slot counts, degree `2n−1`.
    pub exact: NumericForm,
    pub ode: NumericForm,
    pub iterated: NumericForm,
    /// Slot counts kept on the exact side.
    pub orders: usize,
    /// Change in the ODE result when the RK4 step is halved.
    pub richardson: f64,
}

impl BchComparison {
    pub fn max_deviation(&self) -> f64 {
        self.exact
            .deviation(&self.ode)
            .max(self.exact.deviation(&self.iterated))
            .max(self.ode.deviation(&self.iterated))
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_deviation() < tolerance
    }
}

/// Compares `Bch⁻_{2n−1}`, `n = 1..=n_max`, from both numerical pipelines
/// with the numerical value of the exact `ρ(Ch⁻)` at the point `x` of `X`.
pub fn bch_vs_rho_compare(
    g: &UnitaryMap,
    plot: &Plot,
    x: &[f64],
    n_max: usize,
    opts: &BchOptions,
) -> Result<Vec<BchComparison>> {
    check_plot(g.d(), plot)?;
    let orders = {
        let slots = OddSlots::new(g, plot);
        let mut field = PlotField::new(plot);
        field.prepare(&[&slots.iota, &slots.curv, &slots.adot]);
        truncation_order(&field, &slots, x, g.l(), opts)
    };
    let ode = bch_minus_total(g, plot, x, opts)?;
    let fine = bch_minus_total(g, plot, x, &BchOptions { rk4_step: opts.rk4_step / 2.0, ..*opts })?;
    let richardson = ode.deviation(&fine);
    let exact = rho_chern_series(g, plot, orders)?
        .iter()
        .map(|w| NumericForm::from_form(w, x))
        .fold(NumericForm::default(), |a, b| a.add(&b));
    (1..=n_max)
        .map(|n| {
            let k = 2 * n as u32 - 1;
            Ok(BchComparison {
                n,
                x: x.to_vec(),
                exact: exact.part(k),
                ode: ode.part(k),
                iterated: bch_minus_iterated(g, plot, x, n, opts)?,
                orders,
                richardson,
            })
        })
        .collect()
}

/// `Bch⁺_{2n}(C)` at one point of `X`: `Tr ∫_Δ Π (U R_C U⁻¹)(tᵢ) U(1)` with `U' = U C(γ̇)`.
/// For `n = 0` this is the trace of the holonomy.
pub fn bch_plus_eval(c: &ConnectionForm, plot: &Plot, x: &[f64], n: usize, opts: &BchOptions) -> Result<NumericForm> {
    let d = c.form().coords();
    check_plot(d, plot)?;
    let l = c.l();
    let iota = c.form().map(|w| TTForm::from_alpha(w.alpha.contract_const(plot.v())));
    let curv = c.curvature();
    let mut field = PlotField::new(plot);
    field.prepare(&[&iota, &curv]);
    let rule = simplex_rule(n, opts.quad_order);
    let mut times: Vec<f64> = rule.iter().flat_map(|(p, _)| p.iter().copied()).collect();
    times.push(1.0);
    times.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    times.dedup();
    let gen = |t: f64| field.eval(&iota, x, t, &[]).comps.get(&0).cloned().unwrap_or_else(|| CMat::zeros(l, l));
    let us = transports(gen, l, &times, opts.rk4_step);
    let at = |t: f64| &us[times.partition_point(|x| *x < t)];
    let u1 = at(1.0).clone();
    let mut acc = NumericForm::default();
    for (pts, w) in &rule {
        let mut prod = MatNum::identity(l);
        for &t in pts {
            let u = at(t);
            let ui = u.clone().try_inverse().expect("transport is invertible");
            prod = prod.mul(&field.eval(&curv, x, t, &[]).conjugate(u, &ui));
        }
        acc = acc.add(&prod.mul_matrix(&u1).trace().scale(*w));
    }
    Ok(acc)
}

/// Sample points of `X = T^m` used for coefficientwise comparisons.
pub fn sample_points(m: usize) -> Vec<Vec<f64>> {
    match m {
        0 => vec![Vec::new()],
        _ => [0.0, 0.137, 0.5, 0.781]
            .iter()
            .map(|&x0| (0..m).map(|i| (x0 + 0.29 * i as f64).fract()).collect())
            .collect(),
    }
}

/// `‖T T* − 1‖ < tol`.
pub fn is_unitary(t: &CMat, tol: f64) -> bool {
    (t * t.adjoint() - CMat::identity(t.nrows(), t.ncols())).norm() < tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn winding_plot() -> Plot {
        Plot::new(1, 1, vec![vec![1]], vec![0], vec![rat(0, 1)]).unwrap()
    }

    #[test]
    fn graded_series_matches_exact_per_order() {
        let g = UnitaryMap::character(vec![1]);
        let plot = Plot::new(1, 1, vec![vec![1]], vec![1], vec![rat(1, 4)]).unwrap();
        let opts = BchOptions { max_order: Some(6), ..Default::default() };
        let ode = bch_minus_ode(&g, &plot, &[0.3], &opts).unwrap();
        let exact = rho_chern_series(&g, &plot, 6).unwrap();
        for (a, b) in ode.orders.iter().zip(&exact) {
            assert!(a.deviation(&NumericForm::from_form(b, &[0.3])) < 1e-9);
        }
    }

    #[test]
    fn winding_degree_one() {
        // ρ(Ch⁻₁) of e^{iτx} along the identity plot is iτ dx
        let g = UnitaryMap::character(vec![1]);
        let c = bch_vs_rho_compare(&g, &winding_plot(), &[0.3], 1, &BchOptions::default()).unwrap();
        let want = Complex64::new(0.0, std::f64::consts::TAU);
        assert!((c[0].exact.get(1) - want).norm() < 1e-12);
        assert!(c[0].passes(1e-9));
    }

    #[test]
    fn transport_is_unitary() {
        let g = UnitaryMap::character(vec![1]);
        let plot = Plot::single_loop(vec![1], vec![rat(0, 1)]).unwrap();
        let t = parallel_transport(&g, 0.7, &plot, &[], 1.0, 1e-3).unwrap();
        assert!(is_unitary(&t, 1e-10));
        let full = parallel_transport(&g, 1.0, &plot, &[], 1.0, 1e-3).unwrap();
        assert!((full[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn simplex_volume() {
        for q in 1..=3 {
            let vol: f64 = simplex_rule(q, 6).iter().map(|(_, w)| w).sum();
            let fact: f64 = (1..=q).map(|k| k as f64).product();
            assert!((vol - 1.0 / fact).abs() < 1e-13);
        }
    }
}
