//! Sparse homogeneous polynomials in `x` (real) or in `(x̄, x)` (complex).
//!
//! Real keys are exponent vectors of length `n`. Complex keys have length
//! `2n`: the exponent of `x̄` followed by the exponent of `x`.

use std::collections::BTreeMap;

use crate::field::{Field, HermitianMatrix, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    field: Field,
    n: usize,
    terms: BTreeMap<Vec<u32>, C64>,
}

impl Poly {
    pub fn one(field: Field, n: usize) -> Self {
        let width = key_width(field, n);
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; width], C64::new(1.0, 0.0));
        Self { field, n, terms }
    }

    /// A single term with unit coefficient.
    pub fn monomial(field: Field, n: usize, key: Vec<u32>) -> Self {
        assert_eq!(key.len(), key_width(field, n), "key width must match the field");
        let mut terms = BTreeMap::new();
        terms.insert(key, C64::new(1.0, 0.0));
        Self { field, n, terms }
    }

    /// `<x, A x> = sum_ij conj(x_i) A_ij x_j`.
    pub fn quadratic(a: &HermitianMatrix) -> Self {
        let n = a.dim();
        let field = a.field();
        let mut terms: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                let c = a.entry(i, j);
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                let mut key = vec![0; key_width(field, n)];
                match field {
                    Field::Real => {
                        key[i] += 1;
                        key[j] += 1;
                    }
                    Field::Complex => {
                        key[i] += 1;
                        key[n + j] += 1;
                    }
                }
                *terms.entry(key).or_default() += c;
            }
        }
        Self { field, n, terms }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, C64> {
        &self.terms
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut terms: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let key: Vec<u32> = ka.iter().zip(kb).map(|(a, b)| a + b).collect();
                *terms.entry(key).or_default() += ca * cb;
            }
        }
        Poly {
            field: self.field,
            n: self.n,
            terms,
        }
    }

    pub fn pow(&self, e: usize) -> Poly {
        (0..e).fold(Poly::one(self.field, self.n), |acc, _| acc.mul(self))
    }

    /// Value at a point, `sum_key c_key conj(x)^alpha x^beta`.
    pub fn eval(&self, x: &[C64]) -> C64 {
        let n = self.n;
        self.terms
            .iter()
            .map(|(key, c)| {
                let mut v = *c;
                for i in 0..n {
                    match self.field {
                        Field::Real => v *= x[i].powu(key[i]),
                        Field::Complex => v *= x[i].conj().powu(key[i]) * x[i].powu(key[n + i]),
                    }
                }
                v
            })
            .sum()
    }
}

pub(crate) fn key_width(field: Field, n: usize) -> usize {
    match field {
        Field::Real => n,
        Field::Complex => 2 * n,
    }
}
