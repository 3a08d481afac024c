use crate::arith::{is_irreducible_q, Poly};
use crate::error::{invalid, Result};

use super::NumberField;

/// A field `L = ℚ(β)` given by a monic irreducible `q`, together with
/// candidate images `ρ_j(α)` of a smaller field's generator, as polynomials
/// in β.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisClosure {
    closure_poly: Poly,
    embeddings: Vec<Poly>,
}

impl GaloisClosure {
    pub fn new(closure_poly: Poly, embeddings: Vec<Poly>) -> Result<GaloisClosure> {
        if !closure_poly.is_monic() || closure_poly.deg() < 1 {
            return invalid("closure polynomial must be monic and nonconstant");
        }
        if !is_irreducible_q(&closure_poly) {
            return invalid("closure polynomial is reducible over Q");
        }
        Ok(GaloisClosure {
            closure_poly,
            embeddings,
        })
    }

    pub fn closure_poly(&self) -> &Poly {
        &self.closure_poly
    }

    pub fn embeddings(&self) -> &[Poly] {
        &self.embeddings
    }

    /// Does `p(ρ_j(β)) ≡ 0 (mod q(β))` hold exactly?
    pub fn verify_embedding(&self, field: &NumberField, j: usize) -> Result<bool> {
        let Some(rho) = self.embeddings.get(j) else {
            return invalid(format!(
                "embedding index {j} out of range ({} given)",
                self.embeddings.len()
            ));
        };
        Ok(self.is_root_image(field, rho))
    }

    pub(crate) fn is_root_image(&self, field: &NumberField, rho: &Poly) -> bool {
        let image = field.min_poly().compose(rho);
        image.rem(&self.closure_poly).expect("nonzero").is_zero()
    }

    /// Are the embedding expressions pairwise distinct modulo `q`?
    pub fn embeddings_distinct(&self) -> bool {
        let reduced: Vec<Poly> = self
            .embeddings
            .iter()
            .map(|e| e.rem(&self.closure_poly).expect("nonzero"))
            .collect();
        reduced
            .iter()
            .enumerate()
            .all(|(i, a)| reduced[i + 1..].iter().all(|b| a != b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use proptest::prelude::*;

    fn closure() -> GaloisClosure {
        let q = Poly::from_i64s(&[-148, 0, 100, 0, -20, 0, 1]);
        let rho1 = Poly::new(vec![rat(67, 1), rat(0, 1), rat(-25, 1), rat(0, 1), rat(3, 2)]);
        let rho2 = Poly::new(vec![rat(-33, 1), rat(1, 2), rat(25, 2), rat(0, 1), rat(-3, 4)]);
        let rho3 = Poly::new(vec![rat(-33, 1), rat(-1, 2), rat(25, 2), rat(0, 1), rat(-3, 4)]);
        GaloisClosure::new(q, vec![rho1, rho2, rho3]).unwrap()
    }

    fn cubic() -> NumberField {
        NumberField::new(Poly::from_i64s(&[1, -3, -1, 1])).unwrap()
    }

    #[test]
    fn worked_closure_embeddings_verify() {
        let g = closure();
        let f = cubic();
        for j in 0..3 {
            assert!(g.verify_embedding(&f, j).unwrap(), "rho_{}", j + 1);
        }
        assert!(g.embeddings_distinct());
        assert!(g.verify_embedding(&f, 3).is_err());
    }

    #[test]
    fn perturbed_embedding_fails() {
        let g = closure();
        let shifted = &g.embeddings()[0] + &Poly::one();
        assert!(!g.is_root_image(&cubic(), &shifted));
    }

    #[test]
    fn rejects_reducible_closure() {
        assert!(GaloisClosure::new(Poly::from_i64s(&[-1, 0, 1]), vec![]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn stable_under_representative_change(r in prop::collection::vec(-5i64..=5, 0..4), j in 0usize..3) {
            let g = closure();
            let shifted = &g.embeddings()[j] + &(&g.closure_poly().clone() * &Poly::from_i64s(&r));
            prop_assert!(g.is_root_image(&cubic(), &shifted));
        }
    }
}
