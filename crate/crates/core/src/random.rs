//! Seeded generators of random forms, chains and plots for property checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chen::Plot;
use crate::cyclic::Chain;
use crate::form::{Form, TTForm};
use crate::scalar::Scalar;
use crate::trig::{TrigPoly, VarSpace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Parameters bounding the size of generated objects.
#[derive(Clone, Debug)]
pub struct Shape {
    /// Largest absolute frequency per variable.
    pub max_freq: i32,
    /// Number of monomials per coefficient.
    pub terms: usize,
    /// Largest form degree (DGA degree) of a factor.
    pub max_degree: usize,
    /// Largest number of tensor slots.
    pub max_slots: usize,
    /// Number of elementary tensors per chain.
    pub chain_terms: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_freq: 1,
            terms: 2,
            max_degree: 2,
            max_slots: 4,
            chain_terms: 2,
        }
    }
}

fn small_scalar<R: Rng>(rng: &mut R) -> Scalar {
    let re = rng.gen_range(-3..=3);
    let im = if rng.gen_bool(0.3) { rng.gen_range(-2..=2) } else { 0 };
    let s = &Scalar::from_int(re) + &(&Scalar::i() * &Scalar::from_int(im));
    if s.is_zero() {
        Scalar::one()
    } else {
        s
    }
}

/// Random trig polynomial in the periodic variables of `space` (whole frequencies).
pub fn trig_poly<R: Rng>(rng: &mut R, space: &VarSpace, shape: &Shape) -> TrigPoly {
    let mut p = TrigPoly::zero(space);
    for _ in 0..shape.terms {
        let k: Vec<i32> = (0..space.len()).map(|_| rng.gen_range(-shape.max_freq..=shape.max_freq)).collect();
        p = &p + &TrigPoly::exp_vec(space, &k).scale(&small_scalar(rng));
    }
    p
}

/// Random homogeneous form of degree `k` on the coordinates of `space`.
pub fn form<R: Rng>(rng: &mut R, space: &VarSpace, coords: usize, k: usize, shape: &Shape) -> Form {
    let masks: Vec<u32> = (0u32..(1 << coords)).filter(|m| m.count_ones() as usize == k).collect();
    let mut out = Form::zero(space, coords);
    if masks.is_empty() {
        return out;
    }
    let picks = rng.gen_range(1..=masks.len().min(2));
    for _ in 0..picks {
        let m = masks[rng.gen_range(0..masks.len())];
        out.add_component(m, trig_poly(rng, space, shape));
    }
    out
}

/// Random homogeneous element of Ω_T(N×T) of DGA degree `j`.
pub fn tt_form<R: Rng>(rng: &mut R, space: &VarSpace, coords: usize, j: usize, shape: &Shape) -> TTForm {
    let alpha = if rng.gen_bool(0.7) { form(rng, space, coords, j, shape) } else { Form::zero(space, coords) };
    let beta = if rng.gen_bool(0.5) { form(rng, space, coords, j + 1, shape) } else { Form::zero(space, coords) };
    TTForm::new(alpha, beta)
}

/// Random nonzero homogeneous factor, degree at most `shape.max_degree`.
pub fn factor<R: Rng>(rng: &mut R, space: &VarSpace, coords: usize, shape: &Shape) -> TTForm {
    loop {
        let j = rng.gen_range(0..=shape.max_degree.min(coords));
        let w = tt_form(rng, space, coords, j, shape);
        if !w.drop_unit().is_zero() {
            return w;
        }
    }
}

/// Random chain with `shape.chain_terms` elementary tensors.
pub fn chain<R: Rng>(rng: &mut R, space: &VarSpace, coords: usize, shape: &Shape) -> Chain {
    let mut c = Chain::zero(space, coords);
    for _ in 0..shape.chain_terms {
        let slots = rng.gen_range(1..=shape.max_slots);
        let factors = (0..slots).map(|_| factor(rng, space, coords, shape)).collect();
        c.push(small_scalar(rng), factors);
    }
    c.compact()
}

/// Random function on the coordinates of `space`.
pub fn function<R: Rng>(rng: &mut R, space: &VarSpace, coords: usize, shape: &Shape) -> TTForm {
    TTForm::function(coords, trig_poly(rng, space, shape))
}

/// Random affine plot `T^m × T → T^d` with quarter-turn offsets.
pub fn plot<R: Rng>(rng: &mut R, m: usize, d: usize, max_entry: i64) -> Plot {
    let a: Vec<Vec<i64>> = (0..d).map(|_| (0..m).map(|_| rng.gen_range(-max_entry..=max_entry)).collect()).collect();
    let v: Vec<i64> = (0..d).map(|_| rng.gen_range(-max_entry..=max_entry)).collect();
    let c: Vec<BigRational> = (0..d)
        .map(|_| BigRational::new(BigInt::from(rng.gen_range(0..4)), BigInt::from(4)))
        .collect();
    Plot::new(m, d, a, v, c).expect("generated plot is well formed")
}
