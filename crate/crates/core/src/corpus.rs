//! Named unitary maps, homotopies and plots used by the test suites and the CLI.

use crate::chen::Plot;
use crate::chern::{Generator, HomotopyPath, UnitaryMap};
use crate::scalar::{rat, Scalar};

/// The rotation-like constant unitary `[[3/5, 4i/5], [4i/5, 3/5]]`.
pub fn rotation() -> Vec<Vec<Scalar>> {
    let a = Scalar::frac(3, 5);
    let b = &Scalar::frac(4, 5) * &Scalar::i();
    vec![vec![a.clone(), b.clone()], vec![b, a]]
}

/// A named corpus element.
#[derive(Clone, Debug)]
pub struct Entry {
    pub name: &'static str,
    pub map: UnitaryMap,
}

/// `x ↦ e^{iτx}` on `T¹`.
pub fn winding() -> UnitaryMap {
    UnitaryMap::character(vec![1])
}

/// `(x, y) ↦ diag(e^{iτx}, e^{−iτx}) · U · diag(e^{iτy}, 1)` on `T²`.
pub fn twisted_pair() -> UnitaryMap {
    UnitaryMap::new(
        2,
        2,
        vec![
            Generator::diag_exp(vec![vec![1, 0], vec![-1, 0]]),
            Generator::Const(rotation()),
            Generator::diag_exp(vec![vec![0, 1], vec![0, 0]]),
        ],
    )
    .expect("unitary word")
}

/// A word on `T³` whose `Tr ω³` does not vanish.
pub fn twisted_triple() -> UnitaryMap {
    UnitaryMap::new(
        2,
        3,
        vec![
            Generator::diag_exp(vec![vec![1, 0, 0], vec![0, 0, 0]]),
            Generator::Const(rotation()),
            Generator::diag_exp(vec![vec![0, 1, 0], vec![0, 0, 0]]),
            Generator::Const(rotation()),
            Generator::diag_exp(vec![vec![0, 0, 1], vec![0, 0, 0]]),
        ],
    )
    .expect("unitary word")
}

/// The orthogonal matrix `(1/3)[[1, 2, 2], [2, 1, −2], [2, −2, 1]]`.
pub fn reflection3() -> Vec<Vec<Scalar>> {
    let o = |a: i64| Scalar::frac(a, 3);
    vec![vec![o(1), o(2), o(2)], vec![o(2), o(1), o(-2)], vec![o(2), o(-2), o(1)]]
}

/// A `U(3)`-valued word on `T⁵` whose `Tr ω⁵` does not vanish. Kept out of
/// [`maps`] because its chains are expensive past `n = 3`.
pub fn quintic() -> UnitaryMap {
    let phase = |k: usize| {
        let mut f = vec![vec![0; 5]; 3];
        f[k % 3][k] = 1;
        Generator::diag_exp(f)
    };
    let mut word = vec![phase(0)];
    for k in 1..5 {
        word.push(Generator::Const(reflection3()));
        word.push(phase(k));
    }
    UnitaryMap::new(3, 5, word).expect("unitary word")
}

/// The full corpus of maps.
pub fn maps() -> Vec<Entry> {
    vec![
        Entry {
            name: "constant",
            map: UnitaryMap::new(2, 1, vec![Generator::Const(rotation())]).expect("unitary"),
        },
        Entry {
            name: "winding",
            map: winding(),
        },
        Entry {
            name: "winding2",
            map: UnitaryMap::character(vec![2, -1]),
        },
        Entry {
            name: "twisted-pair",
            map: twisted_pair(),
        },
        Entry {
            name: "twisted-triple",
            map: twisted_triple(),
        },
    ]
}

pub fn map_by_name(name: &str) -> Option<UnitaryMap> {
    if name == "quintic" {
        return Some(quintic());
    }
    maps().into_iter().find(|e| e.name == name).map(|e| e.map)
}

/// Homotopies on `T¹` and `T²`: phase rotations, constant paths and a
/// non-abelian word with a moving phase in the middle.
pub fn homotopies() -> Vec<(&'static str, HomotopyPath)> {
    let phase = |m: i32| {
        HomotopyPath::new(1, 1, vec![Generator::DiagExp { freqs: vec![vec![1]], rates: vec![m] }]).expect("unitary")
    };
    let moving = HomotopyPath::new(
        2,
        1,
        vec![
            Generator::diag_exp(vec![vec![1], vec![0]]),
            Generator::Const(rotation()),
            Generator::DiagExp {
                freqs: vec![vec![0], vec![0]],
                rates: vec![1, -2],
            },
            Generator::Const(rotation()),
            Generator::diag_exp(vec![vec![0], vec![1]]),
        ],
    )
    .expect("unitary");
    vec![
        ("still", phase(0)),
        ("quarter", phase(1)),
        ("half", phase(2)),
        ("moving-word", moving),
    ]
}

/// Plots into `T^d` with `m ≤ 1`, constant ones included.
pub fn plot_battery(d: usize) -> Vec<Plot> {
    let zero = || vec![rat(0, 1); d];
    let mut out = vec![Plot::identity(d)];
    let unit = |j: usize| (0..d).map(|i| i64::from(i == j)).collect::<Vec<_>>();
    out.push(Plot::single_loop(unit(0), zero()).expect("plot"));
    let mut v = vec![2; d];
    v[0] = -1;
    let c = (0..d).map(|i| rat(i as i64 + 1, 4)).collect();
    out.push(Plot::single_loop(v, c).expect("plot"));
    let col = |x: i64| (0..d).map(|i| vec![if i == 0 { x } else { i as i64 }]).collect::<Vec<_>>();
    out.push(Plot::new(1, d, col(1), vec![0; d], zero()).expect("plot"));
    out.push(Plot::new(1, d, col(1), unit(d - 1), zero()).expect("plot"));
    out.push(Plot::new(1, d, col(2), vec![1; d], (0..d).map(|_| rat(1, 2)).collect()).expect("plot"));
    out
}

/// Plots with `m ≤ 1` for the numerical transport comparison: two constant
/// families, a single loop, and two moving families with unit speed along
/// one coordinate.
pub fn bch_plots(d: usize) -> Vec<Plot> {
    let zero = || vec![rat(0, 1); d];
    let unit = |j: usize| (0..d).map(|i| i64::from(i == j)).collect::<Vec<_>>();
    let col = |x: i64| (0..d).map(|i| vec![if i == 0 { x } else { i as i64 }]).collect::<Vec<_>>();
    let quarters = || (0..d).map(|i| rat(i as i64 + 1, 4)).collect::<Vec<_>>();
    vec![
        Plot::new(1, d, col(1), vec![0; d], zero()).expect("plot"),
        Plot::new(1, d, col(2), vec![0; d], quarters()).expect("plot"),
        Plot::single_loop(unit(0), quarters()).expect("plot"),
        Plot::new(1, d, col(1), unit(d - 1), zero()).expect("plot"),
        Plot::new(1, d, col(2), unit(0), (0..d).map(|_| rat(1, 2)).collect()).expect("plot"),
    ]
}
