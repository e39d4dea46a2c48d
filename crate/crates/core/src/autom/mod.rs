//! Endomorphisms induced by derivations, their orders, and inner-ness.

mod certificate;
mod pipeline;

pub use certificate::{CertificateEvidence, NonInnerCertificate};
pub use pipeline::{construct_noninner, PipelineOutcome};

use std::sync::Arc;

use crate::deriv::Derivation;
use crate::error::{Error, Result};
use crate::field::binomial_mod;
use crate::fpmod::Realization;
use crate::group::{Group, GroupHom};
use crate::pc::{Element, PcPresentation};

/// Iteration bound when searching for the order of a map.
pub const ORDER_SEARCH_LIMIT: u64 = 100_000;

/// An endomorphism given by the images of the pc generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endo {
    group: Arc<PcPresentation>,
    images: Vec<Element>,
}

impl Endo {
    /// Checks every defining relation.
    pub fn new(group: Arc<PcPresentation>, images: Vec<Element>) -> Result<Self> {
        GroupHom::new(Arc::clone(&group), Arc::clone(&group), images.clone())?;
        Ok(Endo { group, images })
    }

    pub fn identity(group: Arc<PcPresentation>) -> Self {
        let images = group.generators();
        Endo { group, images }
    }

    /// `g -> g δ(g)` for a derivation into a realized elementary abelian normal subgroup.
    pub fn induce(g: &Group, delta: &Derivation, real: &Realization) -> Result<Self> {
        if delta.module() != real.module() {
            return Err(Error::ModuleMismatch);
        }
        let images = (0..g.rank())
            .map(|k| g.element(g.mul(g.gen(k), real.embed(g, &delta.images()[k]))))
            .collect();
        Endo::new(g.presentation_arc(), images)
    }

    /// Conjugation `y -> x^-1 y x`.
    pub fn inner(g: &Group, x: usize) -> Self {
        let images = g.gens().iter().map(|&k| g.element(g.conj(k, x))).collect();
        Endo { group: g.presentation_arc(), images }
    }

    pub fn group(&self) -> &Arc<PcPresentation> {
        &self.group
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn image_indices(&self, g: &Group) -> Vec<usize> {
        self.images.iter().map(|x| g.index(x)).collect()
    }

    pub fn apply(&self, g: &Group, x: usize) -> usize {
        let imgs = self.image_indices(g);
        apply_indices(g, &imgs, x)
    }

    /// `self` followed by `after`.
    pub fn then(&self, g: &Group, after: &Endo) -> Endo {
        let a = after.image_indices(g);
        let images = self.image_indices(g).iter().map(|&x| g.element(apply_indices(g, &a, x))).collect();
        Endo { group: Arc::clone(&self.group), images }
    }

    pub fn power(&self, g: &Group, k: u64) -> Endo {
        let mut out = Endo::identity(Arc::clone(&self.group));
        for _ in 0..k {
            out = out.then(g, self);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.images == self.group.generators()
    }

    /// Surjective, hence bijective on a finite group.
    pub fn is_automorphism(&self, g: &Group) -> bool {
        g.closure(&self.image_indices(g)).iter().all(|b| *b)
    }

    /// Order by iterated composition.
    pub fn order_naive(&self, g: &Group) -> Result<u64> {
        if !self.is_automorphism(g) {
            return Err(Error::NotHomomorphism("not an automorphism".into()));
        }
        let imgs = self.image_indices(g);
        let gens = g.gens();
        let mut cur = imgs.clone();
        let mut k = 1;
        while cur != gens {
            if k >= ORDER_SEARCH_LIMIT {
                return Err(Error::TooLarge { size: k as u128 + 1, cap: ORDER_SEARCH_LIMIT as u128 });
            }
            cur = cur.iter().map(|&x| apply_indices(g, &imgs, x)).collect();
            k += 1;
        }
        Ok(k)
    }

    /// First `x` (by index) with `self` equal to conjugation by `x`.
    pub fn inner_witness(&self, g: &Group) -> Option<usize> {
        let imgs = self.image_indices(g);
        let gens = g.gens();
        (0..g.order()).find(|&x| gens.iter().zip(&imgs).all(|(&k, &y)| g.conj(k, x) == y))
    }

    pub fn is_inner(&self, g: &Group) -> bool {
        self.inner_witness(g).is_some()
    }
}

fn apply_indices(g: &Group, imgs: &[usize], x: usize) -> usize {
    g.element(x).letters().iter().fold(0usize, |acc, &k| g.mul(acc, imgs[k]))
}

/// `ψ^n(x) = x · δ(x)^{C(n,1)} · δ²(x)^{C(n,2)} ⋯`, valid since `δ` takes values
/// in an elementary abelian normal subgroup.
pub fn binomial_power(g: &Group, delta: &Derivation, real: &Realization, n: u64, x: usize) -> Result<usize> {
    if delta.module() != real.module() {
        return Err(Error::ModuleMismatch);
    }
    let p = g.prime();
    let mut acc = x;
    let mut term = x;
    for i in 1..=n {
        term = real.embed(g, &delta.eval(&g.element(term)));
        if term == 0 {
            break;
        }
        let c = binomial_mod(n, i, p);
        acc = g.mul(acc, g.pow(term, c as u64));
    }
    Ok(acc)
}

/// Order of `g -> g δ(g)` from the binomial product formula alone.
pub fn order_via_formula(g: &Group, delta: &Derivation, real: &Realization) -> Result<u64> {
    let gens = g.gens();
    for n in 1..=ORDER_SEARCH_LIMIT {
        let mut all = true;
        for &x in &gens {
            if binomial_power(g, delta, real, n, x)? != x {
                all = false;
                break;
            }
        }
        if all {
            return Ok(n);
        }
    }
    Err(Error::TooLarge { size: ORDER_SEARCH_LIMIT as u128 + 1, cap: ORDER_SEARCH_LIMIT as u128 })
}

/// Order of an induced automorphism; the fast path evaluates the product
/// formula at `n = p` and compares it with `p`-fold composition.
pub fn order_of(g: &Group, phi: &Endo, fast: Option<(&Derivation, &Realization)>) -> Result<u64> {
    if let Some((delta, real)) = fast {
        let p = g.prime() as u64;
        let composed = phi.power(g, p);
        for k in 0..g.rank() {
            let via = binomial_power(g, delta, real, p, g.gen(k))?;
            if via != g.index(&composed.images()[k]) {
                return Err(Error::Verification(format!("binomial formula disagrees with composition on generator {}", k + 1)));
            }
        }
        if composed.is_identity() {
            return Ok(if phi.is_identity() { 1 } else { p });
        }
    }
    phi.order_naive(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::deriv::derivation_space;
    use crate::series;

    fn group(name: &str) -> Group {
        Group::from_presentation(catalog::parse(name).unwrap()).unwrap()
    }

    #[test]
    fn central_automorphisms_of_heisenberg_are_inner() {
        let g = group("heisenberg:3");
        let real = Realization::new(&g, &series::center(&g)).unwrap();
        let space = derivation_space(real.module()).unwrap();
        for d in space.all_derivations() {
            let phi = Endo::induce(&g, &d, &real).unwrap();
            assert!(phi.is_automorphism(&g));
            assert!(phi.is_inner(&g));
            assert_eq!(order_of(&g, &phi, Some((&d, &real))).unwrap(), if d.is_zero() { 1 } else { 3 });
        }
    }

    #[test]
    fn a_to_ab_is_not_inner() {
        let g = group("heisenberg:3");
        let pres = g.presentation();
        let ab = pres.multiply(&pres.generator(0), &pres.generator(1)).unwrap();
        let phi = Endo::new(g.presentation_arc(), vec![ab, pres.generator(1), pres.generator(2)]).unwrap();
        assert!(phi.is_automorphism(&g));
        assert!(!phi.is_inner(&g));
        assert_eq!(phi.order_naive(&g).unwrap(), 3);
        // a -> ac is conjugation
        let ac = pres.multiply(&pres.generator(0), &pres.generator(2)).unwrap();
        let psi = Endo::new(g.presentation_arc(), vec![ac, pres.generator(1), pres.generator(2)]).unwrap();
        assert!(psi.is_inner(&g));
    }

    #[test]
    fn relation_violations_rejected() {
        let g = group("heisenberg:3");
        let pres = g.presentation();
        let c = pres.generator(2);
        assert!(Endo::new(g.presentation_arc(), vec![pres.generator(0), pres.generator(1), pres.identity()]).is_err());
        assert!(Endo::new(g.presentation_arc(), vec![pres.generator(0), pres.generator(1), c]).is_ok());
    }

    #[test]
    fn formula_matches_iteration_on_meta() {
        let g = group("meta:3");
        let z = series::center(&g);
        let real = Realization::new(&g, &series::omega1(&g, &z).unwrap()).unwrap();
        let space = derivation_space(real.module()).unwrap();
        for d in space.all_derivations() {
            let phi = Endo::induce(&g, &d, &real).unwrap();
            assert_eq!(order_via_formula(&g, &d, &real).unwrap(), phi.order_naive(&g).unwrap());
        }
    }

    #[test]
    fn composition_and_powers() {
        let g = group("heisenberg:3");
        let phi = Endo::inner(&g, g.gen(0));
        assert!(phi.power(&g, 3).is_identity());
        assert_eq!(phi.then(&g, &phi), phi.power(&g, 2));
    }
}
