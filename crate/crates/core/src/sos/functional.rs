//! Linear functionals `y -> pEx[prod_{i in I} <x, A_i x>]`.

use super::basis::binomial;
use super::moments::{dot, MomentLayout, MomentVector};
use super::poly::Poly;
use crate::error::{Error, Result};
use crate::instance::ProblemInstance;

/// Upper limit on the number of subsets `|S_k| = C(d, k)` that are enumerated.
pub const MAX_SUBSETS: u128 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ProductFormFunctional {
    pub subset: Vec<usize>,
    /// Aligned with the coordinates of the moment layout.
    pub coeffs: Vec<f64>,
}

impl ProductFormFunctional {
    pub fn apply(&self, m: &MomentVector) -> f64 {
        dot(&self.coeffs, m.values())
    }
}

fn check_layout(inst: &ProblemInstance, layout: &MomentLayout) -> Result<()> {
    if layout.field() != inst.field() {
        return Err(Error::FieldMismatch {
            expected: inst.field(),
            found: layout.field(),
        });
    }
    if layout.n() != inst.n() {
        return Err(Error::DimensionMismatch {
            expected: inst.n(),
            found: layout.n(),
        });
    }
    Ok(())
}

/// Functional of the product over `subset`, which must have `layout.k()` distinct indices.
pub fn product_form_functional(
    inst: &ProblemInstance,
    layout: &MomentLayout,
    subset: &[usize],
) -> Result<ProductFormFunctional> {
    check_layout(inst, layout)?;
    if subset.len() != layout.k() {
        return Err(Error::InvalidInput(format!(
            "subset has {} indices, expected k = {}",
            subset.len(),
            layout.k()
        )));
    }
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != subset.len() || sorted.last().is_some_and(|&i| i >= inst.d()) {
        return Err(Error::InvalidInput("subset indices must be distinct and below d".into()));
    }
    let p = subset
        .iter()
        .fold(Poly::one(inst.field(), inst.n()), |acc, &i| {
            acc.mul(&Poly::quadratic(&inst.forms()[i]))
        });
    Ok(ProductFormFunctional {
        subset: subset.to_vec(),
        coeffs: layout.functional(&p),
    })
}

/// All functionals over `S_k`, in lexicographic subset order.
pub fn all_product_functionals(
    inst: &ProblemInstance,
    layout: &MomentLayout,
) -> Result<Vec<ProductFormFunctional>> {
    check_layout(inst, layout)?;
    let (d, k) = (inst.d(), layout.k());
    if k == 0 || k > d {
        return Err(Error::InvalidInput(format!("level k = {k} must lie in 1..={d}")));
    }
    let count = binomial(d as u64, k as u64);
    if count > MAX_SUBSETS {
        return Err(Error::TooManySubsets {
            count,
            limit: MAX_SUBSETS,
        });
    }
    let quads: Vec<Poly> = inst.forms().iter().map(Poly::quadratic).collect();
    let mut out = Vec::with_capacity(count as usize);
    let mut subset = Vec::with_capacity(k);
    let mut stack = vec![Poly::one(inst.field(), inst.n())];
    descend(0, d, k, &quads, layout, &mut subset, &mut stack, &mut out);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn descend(
    start: usize,
    d: usize,
    k: usize,
    quads: &[Poly],
    layout: &MomentLayout,
    subset: &mut Vec<usize>,
    stack: &mut Vec<Poly>,
    out: &mut Vec<ProductFormFunctional>,
) {
    if subset.len() == k {
        out.push(ProductFormFunctional {
            subset: subset.clone(),
            coeffs: layout.functional(stack.last().expect("stack holds the running product")),
        });
        return;
    }
    let remaining = k - subset.len();
    for i in start..=(d - remaining) {
        let next = stack.last().expect("stack holds the running product").mul(&quads[i]);
        stack.push(next);
        subset.push(i);
        descend(i + 1, d, k, quads, layout, subset, stack, out);
        subset.pop();
        stack.pop();
    }
}
