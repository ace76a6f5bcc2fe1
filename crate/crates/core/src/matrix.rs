//! Matrices with entries in Ω_T(N×T).

use std::fmt;

use crate::error::{Error, Result};
use crate::form::{Form, TTForm};
use crate::scalar::Scalar;
use crate::trig::{TrigPoly, VarSpace};

#[derive(Clone, PartialEq, Eq)]
pub struct MatForm {
    rows: usize,
    cols: usize,
    entries: Vec<TTForm>,
}

impl MatForm {
    pub fn zero(space: &VarSpace, coords: usize, rows: usize, cols: usize) -> Self {
        MatForm {
            rows,
            cols,
            entries: vec![TTForm::zero(space, coords); rows * cols],
        }
    }

    pub fn identity(space: &VarSpace, coords: usize, l: usize) -> Self {
        let mut m = Self::zero(space, coords, l, l);
        for i in 0..l {
            m.set(i, i, TTForm::one(space, coords));
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> TTForm>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        MatForm { rows, cols, entries }
    }

    /// Matrix of functions.
    pub fn from_functions(coords: usize, m: &[Vec<TrigPoly>]) -> Self {
        Self::from_fn(m.len(), m[0].len(), |i, j| TTForm::function(coords, m[i][j].clone()))
    }

    /// Matrix of ordinary forms (no ϑ-part).
    pub fn from_forms(m: &[Vec<Form>]) -> Self {
        Self::from_fn(m.len(), m[0].len(), |i, j| TTForm::from_alpha(m[i][j].clone()))
    }

    /// Constant scalar matrix.
    pub fn constant(space: &VarSpace, coords: usize, m: &[Vec<Scalar>]) -> Self {
        Self::from_fn(m.len(), m[0].len(), |i, j| {
            TTForm::from_alpha(Form::constant(space, coords, m[i][j].clone()))
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &TTForm {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, w: TTForm) {
        self.entries[i * self.cols + j] = w;
    }

    pub fn entries(&self) -> &[TTForm] {
        &self.entries
    }

    pub fn space(&self) -> &VarSpace {
        self.entries[0].space()
    }

    pub fn coords(&self) -> usize {
        self.entries[0].coords()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(TTForm::is_zero)
    }

    pub fn map<F: Fn(&TTForm) -> TTForm>(&self, f: F) -> MatForm {
        MatForm {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_map<F: Fn(&TTForm) -> Result<TTForm>>(&self, f: F) -> Result<MatForm> {
        Ok(MatForm {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect::<Result<Vec<_>>>()?,
        })
    }

    pub fn add(&self, o: &MatForm) -> MatForm {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        MatForm {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &MatForm) -> MatForm {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> MatForm {
        self.map(TTForm::neg)
    }

    pub fn scale(&self, c: &Scalar) -> MatForm {
        self.map(|w| w.scale(c))
    }

    /// Entrywise multiplication by a function.
    pub fn mul_function(&self, f: &TrigPoly) -> MatForm {
        self.map(|w| w.map_forms(|x| x.mul_function(f)))
    }

    /// Matrix product with entries multiplied in Ω_T(N×T).
    pub fn mul(&self, o: &MatForm) -> Result<MatForm> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}×{} by {}×{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let space = self.space().clone();
        let coords = self.coords();
        Ok(Self::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = TTForm::zero(&space, coords);
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = o.get(k, j);
                if !a.is_zero() && !b.is_zero() {
                    acc = acc.add(&a.wedge(b));
                }
            }
            acc
        }))
    }

    /// Entrywise `d_T`.
    pub fn d_t(&self) -> MatForm {
        self.map(TTForm::d_t)
    }

    /// Entrywise exterior derivative of the ϑ-free part.
    pub fn d(&self) -> MatForm {
        self.map(|w| TTForm::from_alpha(w.alpha.d()))
    }

    pub fn trace(&self) -> Result<TTForm> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("trace of a non-square matrix".into()));
        }
        let mut acc = TTForm::zero(self.space(), self.coords());
        for i in 0..self.rows {
            acc = acc.add(self.get(i, i));
        }
        Ok(acc)
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, o: &MatForm) -> MatForm {
        let space = self.space().clone();
        let coords = self.coords();
        Self::from_fn(self.rows + o.rows, self.cols + o.cols, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                o.get(i - self.rows, j - self.cols).clone()
            } else {
                TTForm::zero(&space, coords)
            }
        })
    }
}

impl fmt::Debug for MatForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                writeln!(f, "  ({i},{j}): {:?}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}
