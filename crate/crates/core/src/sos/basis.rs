//! Multi-indices of homogeneous monomials.

use std::collections::HashMap;

/// All exponent vectors of total degree `k` in `n` variables, in
/// descending lexicographic order: `(k, 0, ..), (k-1, 1, ..), ..., (.., 0, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    n: usize,
    k: usize,
    exponents: Vec<Vec<u32>>,
    lookup: HashMap<Vec<u32>, usize>,
}

fn fill(prefix: &mut Vec<u32>, remaining: u32, slots: usize, out: &mut Vec<Vec<u32>>) {
    if slots == 1 {
        prefix.push(remaining);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for a in (0..=remaining).rev() {
        prefix.push(a);
        fill(prefix, remaining - a, slots - 1, out);
        prefix.pop();
    }
}

impl MonomialBasis {
    pub fn new(n: usize, k: usize) -> Self {
        assert!(n >= 1, "monomial basis needs at least one variable");
        let mut exponents = Vec::new();
        fill(&mut Vec::with_capacity(n), k as u32, n, &mut exponents);
        let lookup = exponents
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        Self {
            n,
            k,
            exponents,
            lookup,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    pub fn get(&self, i: usize) -> &[u32] {
        &self.exponents[i]
    }

    pub fn index_of(&self, exponent: &[u32]) -> Option<usize> {
        self.lookup.get(exponent).copied()
    }
}

pub fn monomial_basis(n: usize, k: usize) -> MonomialBasis {
    MonomialBasis::new(n, k)
}

/// `C(n, k)` as an exact integer, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(u128::from(n - i)) {
            Some(v) => v / u128::from(i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// `prod_i e_i!` for an exponent vector.
pub fn factorial_product(exponent: &[u32]) -> f64 {
    exponent
        .iter()
        .map(|&e| (1..=e).map(f64::from).product::<f64>())
        .product()
}
