//! Dense multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::Grid;
use crate::scalar::{ExactInt, Rat};

/// `Σ c_e z^e` over a box of exponents `e ≤ degree_box`.
#[derive(Debug, Clone)]
pub struct Polynomial<T: ExactInt> {
    coeffs: Grid<Rat<T>>,
}

impl<T: ExactInt> Polynomial<T> {
    /// Coefficients indexed by exponent vector.
    pub fn from_grid(coeffs: Grid<Rat<T>>) -> Self {
        Polynomial { coeffs }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs in `r`
    /// variables; repeated exponents are summed.
    pub fn from_terms(r: usize, terms: &[(Vec<usize>, Rat<T>)]) -> Self {
        let mut upper = vec![0; r];
        for (e, _) in terms {
            for (u, &x) in upper.iter_mut().zip(e) {
                *u = (*u).max(x);
            }
        }
        let mut coeffs = Grid::from_fn(&upper, |_| Rat::<T>::zero());
        for (e, c) in terms {
            let slot = coeffs
                .get_mut(e)
                .expect("exponent inside its own bounding box");
            *slot = slot.clone() + c.clone();
        }
        Polynomial { coeffs }
    }

    pub fn constant(r: usize, c: Rat<T>) -> Self {
        Self::from_terms(r, &[(vec![0; r], c)])
    }

    pub fn arity(&self) -> usize {
        self.coeffs.arity()
    }

    /// Nonzero terms keyed by exponent, lexicographically ordered.
    pub fn terms(&self) -> BTreeMap<Vec<usize>, Rat<T>> {
        self.coeffs
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e, c.clone()))
            .collect()
    }

    pub fn coefficient(&self, e: &[usize]) -> Rat<T> {
        self.coeffs.get(e).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().iter().all(Zero::is_zero)
    }

    /// Largest exponent of each variable among nonzero terms; `None` for
    /// the zero polynomial.
    pub fn degrees(&self) -> Option<Vec<usize>> {
        let terms = self.terms();
        if terms.is_empty() {
            return None;
        }
        let mut d = vec![0; self.arity()];
        for e in terms.keys() {
            for (di, &x) in d.iter_mut().zip(e) {
                *di = (*di).max(x);
            }
        }
        Some(d)
    }

    /// Exact value at an integer point.
    pub fn evaluate(&self, h: &[i64]) -> Result<Rat<T>> {
        if h.len() != self.arity() {
            return Err(Error::DimensionMismatch {
                expected: self.arity(),
                got: h.len(),
            });
        }
        let xs: Vec<Rat<T>> = h
            .iter()
            .map(|&x| Rat::from_integer(T::from_i64(x).expect("coordinate fits scalar")))
            .collect();
        let powers: Vec<Vec<Rat<T>>> = xs
            .iter()
            .zip(self.coeffs.upper())
            .map(|(x, &d)| {
                let mut p = Vec::with_capacity(d + 1);
                let mut acc = Rat::<T>::one();
                for _ in 0..=d {
                    p.push(acc.clone());
                    acc = acc * x.clone();
                }
                p
            })
            .collect();
        let mut sum = Rat::zero();
        for (e, c) in self.coeffs.iter() {
            if c.is_zero() {
                continue;
            }
            let mut term = c.clone();
            for (i, &ei) in e.iter().enumerate() {
                term = term * powers[i][ei].clone();
            }
            sum = sum + term;
        }
        Ok(sum)
    }

    pub fn evaluate_at(&self, h: &[usize]) -> Result<Rat<T>> {
        let v: Vec<i64> = h.iter().map(|&x| x as i64).collect();
        self.evaluate(&v)
    }
}

impl<T: ExactInt> PartialEq for Polynomial<T> {
    fn eq(&self, other: &Self) -> bool {
        self.arity() == other.arity() && self.terms() == other.terms()
    }
}

impl<T: ExactInt> Eq for Polynomial<T> {}

impl<T: ExactInt> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        // highest total degree first reads naturally
        let mut items: Vec<_> = terms.into_iter().collect();
        items.sort_by(|(a, _), (b, _)| {
            let da: usize = a.iter().sum();
            let db: usize = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (n, (e, c)) in items.iter().enumerate() {
            let neg = c < &Rat::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let constant = e.iter().all(|&x| x == 0);
            if constant || !mag.is_one() {
                write!(f, "{mag}")?;
            }
            for (i, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => write!(f, "h{}", i + 1)?,
                    _ => write!(f, "h{}^{x}", i + 1)?,
                }
            }
        }
        Ok(())
    }
}

/// Monomial coefficients of `C(x − t, a)` as a polynomial in `x`.
pub(crate) fn shifted_binomial<T: ExactInt>(t: usize, a: usize) -> Vec<Rat<T>> {
    // Π_{j<a} (x − t − j) / a!
    let mut c = vec![Rat::<T>::one()];
    for j in 0..a {
        let root = Rat::from_integer(T::of_usize(t + j));
        let mut next = vec![Rat::<T>::zero(); c.len() + 1];
        for (k, ck) in c.iter().enumerate() {
            next[k + 1] = next[k + 1].clone() + ck.clone();
            next[k] = next[k].clone() - ck.clone() * root.clone();
        }
        c = next;
    }
    let mut fact = Rat::<T>::one();
    for j in 1..=a {
        fact = fact * Rat::from_integer(T::of_usize(j));
    }
    c.into_iter().map(|x| x / fact.clone()).collect()
}
