use serde::{Deserialize, Serialize};

use super::Endo;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::pc::Element;

/// Branch labels a certificate may carry.
pub const PATH_PREFIXES: &[&str] = &["Theorem 01 at i=", "Theorem 011 at i=", "oracle-fallback"];

/// A non-inner automorphism of order `p` with the data needed to re-check it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonInnerCertificate {
    pub group: String,
    pub path: String,
    pub gen_images: Vec<Element>,
    pub order: u64,
    /// Elements the map must fix.
    pub fixed_subgroup: Vec<Element>,
    /// An element the map must move.
    pub moved: Element,
    pub inner_scan: String,
}

/// What verification recomputed.
#[derive(Clone, Debug, Serialize)]
pub struct CertificateEvidence {
    /// Generator images under `φ, φ², ..., φ^p`.
    pub powers: Vec<Vec<Element>>,
    /// For each `x` in `G`, a generator index (1-based) where `φ` and conjugation by `x` differ.
    pub inner_scan: Vec<usize>,
}

pub fn inner_scan_label(order: usize) -> String {
    format!("exhausted {order} candidates")
}

fn fail(msg: impl Into<String>) -> Error {
    Error::Verification(msg.into())
}

fn check_element(g: &Group, x: &Element, what: &str) -> Result<()> {
    let p = g.prime();
    if x.exponents().len() != g.rank() || x.exponents().iter().any(|&e| e >= p) {
        return Err(fail(format!("{what} is not a normal-form element of {}", g.name())));
    }
    Ok(())
}

impl NonInnerCertificate {
    pub fn to_json(&self, pretty: bool) -> String {
        if pretty {
            serde_json::to_string_pretty(self).expect("certificate serializes")
        } else {
            serde_json::to_string(self).expect("certificate serializes")
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Re-checks every claim from scratch.
    pub fn verify(&self, g: &Group) -> Result<CertificateEvidence> {
        if self.group != g.name() {
            return Err(fail(format!("certificate is for `{}`, not `{}`", self.group, g.name())));
        }
        if !PATH_PREFIXES.iter().any(|pre| self.path.starts_with(pre)) {
            return Err(fail(format!("unknown construction path `{}`", self.path)));
        }
        if self.gen_images.len() != g.rank() {
            return Err(fail(format!("expected {} generator images, found {}", g.rank(), self.gen_images.len())));
        }
        for (k, x) in self.gen_images.iter().enumerate() {
            check_element(g, x, &format!("image of generator {}", k + 1))?;
        }
        let phi = Endo::new(g.presentation_arc(), self.gen_images.clone())
            .map_err(|e| fail(format!("images violate a relation: {e}")))?;
        if !phi.is_automorphism(g) {
            return Err(fail("map is not surjective"));
        }
        let p = g.prime() as u64;
        if self.order != p {
            return Err(fail(format!("claimed order {} is not {p}", self.order)));
        }
        if phi.is_identity() {
            return Err(fail("map is the identity"));
        }
        let mut powers = Vec::new();
        let mut cur = phi.clone();
        for k in 1..=p {
            powers.push(cur.images().to_vec());
            if k < p {
                cur = cur.then(g, &phi);
            }
        }
        if !cur.is_identity() {
            return Err(fail(format!("φ^{p} is not the identity")));
        }
        let imgs = phi.image_indices(g);
        let gens = g.gens();
        let mut scan = Vec::with_capacity(g.order());
        for x in 0..g.order() {
            match gens.iter().zip(&imgs).position(|(&k, &y)| g.conj(k, x) != y) {
                Some(k) => scan.push(k + 1),
                None => return Err(fail(format!("map is conjugation by {}", g.element(x)))),
            }
        }
        if self.inner_scan != inner_scan_label(g.order()) {
            return Err(fail(format!("inner scan field `{}` does not match `{}`", self.inner_scan, inner_scan_label(g.order()))));
        }
        for x in &self.fixed_subgroup {
            check_element(g, x, "fixed element")?;
            let i = g.index(x);
            if phi.apply(g, i) != i {
                return Err(fail(format!("{x} is listed as fixed but moves")));
            }
        }
        check_element(g, &self.moved, "moved element")?;
        let m = g.index(&self.moved);
        if phi.apply(g, m) == m {
            return Err(fail(format!("{} is listed as moved but is fixed", self.moved)));
        }
        Ok(CertificateEvidence { powers, inner_scan: scan })
    }
}
