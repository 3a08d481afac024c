use std::sync::Arc;

use crate::arith::Sign;
use crate::error::{invalid, Result};

use super::{FieldElement, NumberField};

/// `E = F(√δ)` with `F` totally real and `δ` totally negative.
///
/// A totally negative δ is never a square in `F`, so `E/F` is a genuine
/// quadratic extension and has no real places.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmExtension {
    base: Arc<NumberField>,
    delta: FieldElement,
}

impl CmExtension {
    pub fn new(base: Arc<NumberField>, delta: FieldElement) -> Result<CmExtension> {
        if !base.is_totally_real() {
            return invalid(format!(
                "base field has {} real places out of degree {}",
                base.num_real_places(),
                base.degree()
            ));
        }
        if delta.coords().len() != base.degree() {
            return invalid("delta does not belong to the base field");
        }
        if delta.is_zero() {
            return invalid("delta must be nonzero");
        }
        let signs = base.signs(&delta)?;
        if let Some(j) = signs.iter().position(|&s| s == Sign::Positive) {
            return invalid(format!("delta is positive at real place {j}"));
        }
        Ok(CmExtension { base, delta })
    }

    pub fn base(&self) -> &NumberField {
        &self.base
    }

    pub fn base_arc(&self) -> &Arc<NumberField> {
        &self.base
    }

    pub fn delta(&self) -> &FieldElement {
        &self.delta
    }

    pub fn element(&self, a: FieldElement, b: FieldElement) -> ExtElement {
        ExtElement { a, b }
    }

    pub fn embed(&self, a: &FieldElement) -> ExtElement {
        ExtElement {
            a: a.clone(),
            b: self.base.zero(),
        }
    }

    pub fn sqrt_delta(&self) -> ExtElement {
        ExtElement {
            a: self.base.zero(),
            b: self.base.one(),
        }
    }

    pub fn add(&self, x: &ExtElement, y: &ExtElement) -> ExtElement {
        let f = &self.base;
        ExtElement {
            a: f.add(&x.a, &y.a),
            b: f.add(&x.b, &y.b),
        }
    }

    /// `(a + b√δ)(c + d√δ) = (ac + δbd) + (ad + bc)√δ`.
    pub fn mul(&self, x: &ExtElement, y: &ExtElement) -> ExtElement {
        let f = &self.base;
        let bd = f.mul(&x.b, &y.b);
        ExtElement {
            a: f.add(&f.mul(&x.a, &y.a), &f.mul(&self.delta, &bd)),
            b: f.add(&f.mul(&x.a, &y.b), &f.mul(&x.b, &y.a)),
        }
    }

    /// The nontrivial automorphism `√δ ↦ -√δ`.
    pub fn conj(&self, x: &ExtElement) -> ExtElement {
        ExtElement {
            a: x.a.clone(),
            b: self.base.neg(&x.b),
        }
    }

    /// `N_{E/F}(a + b√δ) = a² - δb²`.
    pub fn norm(&self, x: &ExtElement) -> FieldElement {
        let f = &self.base;
        let b2 = f.mul(&x.b, &x.b);
        f.sub(&f.mul(&x.a, &x.a), &f.mul(&self.delta, &b2))
    }
}

/// `a + b√δ` with `a, b ∈ F`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtElement {
    pub a: FieldElement,
    pub b: FieldElement,
}
