//! Brute-force ground truth: automorphisms by backtracking over images of a
//! minimal generating set, derivations by filtering every image tuple.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Matrix;
use crate::fpmod::FpModule;
use crate::group::Group;
use crate::pc::Element;

pub const DEFAULT_ORACLE_CAP: usize = 243;
pub const BRUTE_FORCE_DERIVATION_CAP: u128 = 10_000_000;
/// Refuse to list more automorphisms than this.
pub const MAX_LISTED_AUTOMORPHISMS: usize = 2_000_000;

/// A minimal generating set with every element written as a word in it.
struct Spanning {
    gens: Vec<usize>,
    /// BFS order over the Cayley graph on `gens`; `parent[x] = (y, k)` with `x = y * gens[k]`.
    order: Vec<usize>,
    parent: Vec<(usize, usize)>,
    /// `prefix[k]` = number of BFS elements lying in `<gens[..=k]>`, with BFS
    /// run generator by generator so each prefix is a subgroup.
    prefix: Vec<usize>,
}

impl Spanning {
    fn new(g: &Group) -> Spanning {
        // Greedy minimal generators: skip anything already in <Φ, chosen>.
        let phi = crate::series::frattini_via_maximal(g);
        let mut gens: Vec<usize> = Vec::new();
        let mut seeds: Vec<usize> = phi.generators().to_vec();
        let mut reach = g.closure(&seeds);
        for x in 0..g.order() {
            if !reach[x] {
                gens.push(x);
                seeds.push(x);
                reach = g.closure(&seeds);
            }
        }
        let mut seen = vec![false; g.order()];
        let mut parent = vec![(0usize, 0usize); g.order()];
        let mut order = vec![0usize];
        seen[0] = true;
        let mut prefix = Vec::new();
        for k in 0..gens.len() {
            let mut i = 0;
            while i < order.len() {
                let y = order[i];
                for (t, &x) in gens[..=k].iter().enumerate() {
                    let z = g.mul(y, x);
                    if !seen[z] {
                        seen[z] = true;
                        parent[z] = (y, t);
                        order.push(z);
                    }
                }
                i += 1;
            }
            prefix.push(order.len());
        }
        Spanning { gens, order, parent, prefix }
    }

    /// Extends images of the first `k+1` generators over `<gens[..=k]>`;
    /// `None` if the assignment is not a homomorphism there.
    fn extend(&self, g: &Group, images: &[usize], map: &mut [usize]) -> bool {
        let k = images.len() - 1;
        let limit = self.prefix[k];
        map[0] = 0;
        for &x in &self.order[1..limit] {
            let (y, t) = self.parent[x];
            map[x] = g.mul(map[y], images[t]);
        }
        for &y in &self.order[..limit] {
            for (t, &x) in self.gens[..=k].iter().enumerate() {
                if map[g.mul(y, x)] != g.mul(map[y], images[t]) {
                    return false;
                }
            }
        }
        true
    }
}

/// Visits every automorphism (as a full element map); the visitor returns
/// `false` to stop early.
fn search_automorphisms(g: &Group, mut visit: impl FnMut(&[usize]) -> bool) {
    let sp = Spanning::new(g);
    let d = sp.gens.len();
    let orders: Vec<u64> = (0..g.order()).map(|x| g.element_order(x)).collect();
    let phi = crate::series::frattini_via_maximal(g);
    let mut map = vec![0usize; g.order()];
    let mut images: Vec<usize> = Vec::with_capacity(d);

    fn rec(
        g: &Group,
        sp: &Spanning,
        orders: &[u64],
        phi_gens: &[usize],
        images: &mut Vec<usize>,
        map: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let k = images.len();
        if k == sp.gens.len() {
            return visit(map);
        }
        let mut seeds: Vec<usize> = phi_gens.to_vec();
        seeds.extend_from_slice(images);
        let reach = g.closure(&seeds);
        let want = orders[sp.gens[k]];
        for y in 0..g.order() {
            if reach[y] || orders[y] != want {
                continue;
            }
            images.push(y);
            if sp.extend(g, images, map) && !rec(g, sp, orders, phi_gens, images, map, visit) {
                return false;
            }
            images.pop();
        }
        true
    }

    if d == 0 {
        visit(&map);
        return;
    }
    rec(g, &sp, &orders, phi.generators(), &mut images, &mut map, &mut visit);
}

fn check_cap(g: &Group, cap: usize) -> Result<()> {
    if g.order() > cap {
        return Err(Error::TooLarge { size: g.order() as u128, cap: cap as u128 });
    }
    Ok(())
}

fn map_order(g: &Group, map: &[usize]) -> u64 {
    let gens = g.gens();
    let mut cur: Vec<usize> = gens.iter().map(|&x| map[x]).collect();
    let mut k = 1;
    while cur != gens {
        cur = cur.iter().map(|&x| map[x]).collect();
        k += 1;
    }
    k
}

fn is_inner_map(g: &Group, map: &[usize]) -> bool {
    let gens = g.gens();
    (0..g.order()).any(|x| gens.iter().all(|&k| g.conj(k, x) == map[k]))
}

#[derive(Clone, Debug, Serialize)]
pub struct AutEnumeration {
    pub group: String,
    /// Images of the pc generators, sorted.
    pub automorphisms: Vec<Vec<Element>>,
    pub inner_count: usize,
    pub order_histogram: BTreeMap<u64, usize>,
}

impl AutEnumeration {
    pub fn len(&self) -> usize {
        self.automorphisms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.automorphisms.is_empty()
    }

    pub fn contains(&self, images: &[Element]) -> bool {
        self.automorphisms.binary_search_by(|a| a.as_slice().cmp(images)).is_ok()
    }
}

/// Every automorphism of `g`, with inner count and order histogram.
pub fn enumerate_automorphisms(g: &Group, cap: usize) -> Result<AutEnumeration> {
    check_cap(g, cap)?;
    let gens = g.gens();
    let mut autos: Vec<Vec<Element>> = Vec::new();
    let mut inner = std::collections::BTreeSet::new();
    let mut hist = BTreeMap::new();
    let mut overflow = false;
    search_automorphisms(g, |map| {
        if autos.len() >= MAX_LISTED_AUTOMORPHISMS {
            overflow = true;
            return false;
        }
        *hist.entry(map_order(g, map)).or_insert(0) += 1;
        autos.push(gens.iter().map(|&k| g.element(map[k])).collect());
        true
    });
    if overflow {
        return Err(Error::TooLarge { size: MAX_LISTED_AUTOMORPHISMS as u128 + 1, cap: MAX_LISTED_AUTOMORPHISMS as u128 });
    }
    for x in 0..g.order() {
        let images: Vec<usize> = gens.iter().map(|&k| g.conj(k, x)).collect();
        inner.insert(images);
    }
    autos.sort();
    Ok(AutEnumeration { group: g.name().to_string(), automorphisms: autos, inner_count: inner.len(), order_histogram: hist })
}

/// First non-inner automorphism of order `p` in search order, as pc generator images.
pub fn find_noninner_order_p(g: &Group, cap: usize) -> Result<Option<Vec<Element>>> {
    check_cap(g, cap)?;
    let p = g.prime() as u64;
    let gens = g.gens();
    let mut found = None;
    search_automorphisms(g, |map| {
        if map_order(g, map) == p && !is_inner_map(g, map) {
            found = Some(gens.iter().map(|&k| g.element(map[k])).collect());
            return false;
        }
        true
    });
    Ok(found)
}

/// Independent check that generator images define an automorphism: the
/// map is rebuilt over a spanning tree of a minimal generating set and
/// tested on every edge, then for bijectivity.
pub fn is_automorphism_images(g: &Group, images: &[Element]) -> bool {
    if images.len() != g.rank() {
        return false;
    }
    // Map each pc generator image, then evaluate on the minimal generators via normal forms.
    let pc_images: Vec<usize> = images.iter().map(|x| g.index(x)).collect();
    let eval = |x: usize| -> usize {
        let e = g.element(x);
        e.letters().iter().fold(0usize, |acc, &k| g.mul(acc, pc_images[k]))
    };
    let sp = Spanning::new(g);
    let y: Vec<usize> = sp.gens.iter().map(|&x| eval(x)).collect();
    let mut map = vec![0usize; g.order()];
    if !sp.extend(g, &y, &mut map) {
        return false;
    }
    // Must agree with the pc-generator description.
    if (0..g.rank()).any(|k| map[g.gen(k)] != pc_images[k]) {
        return false;
    }
    let mut hit = vec![false; g.order()];
    map.iter().for_each(|&x| hit[x] = true);
    hit.iter().all(|h| *h)
}

/// Every tuple of generator images satisfying the cocycle law on all relations.
pub fn enumerate_derivations_bruteforce(m: &FpModule) -> Result<Vec<Vec<Vec<u32>>>> {
    let p = m.prime();
    let n = m.group().rank();
    let dim = m.dim();
    let total = (p as u128).checked_pow((n * dim) as u32).unwrap_or(u128::MAX);
    if total > BRUTE_FORCE_DERIVATION_CAP {
        return Err(Error::TooLarge { size: total, cap: BRUTE_FORCE_DERIVATION_CAP });
    }
    let relations = m.group().relations();
    let mats: Vec<&Matrix> = (0..n).map(|k| m.action(k)).collect();
    // δ(w x_k) = δ(w) A_k + δ(x_k)
    let cocycle = |images: &[Vec<u32>], letters: &[usize]| -> Vec<u32> {
        let mut acc = vec![0u32; dim];
        for &k in letters {
            let moved = mats[k].apply(&acc);
            acc = moved.iter().zip(&images[k]).map(|(a, b)| (a + b) % p).collect();
        }
        acc
    };
    let mut out = Vec::new();
    let mut flat = vec![0u32; n * dim];
    for _ in 0..total {
        let images: Vec<Vec<u32>> = (0..n).map(|k| flat[k * dim..(k + 1) * dim].to_vec()).collect();
        if relations.iter().all(|r| cocycle(&images, &r.lhs) == cocycle(&images, &r.rhs)) {
            out.push(images);
        }
        for c in flat.iter_mut() {
            *c += 1;
            if *c < p {
                break;
            }
            *c = 0;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct VerifyRow {
    pub group: String,
    pub oracle: String,
    pub pipeline: String,
    pub agree: bool,
}

/// Pipeline versus exhaustive search on one group.
pub fn verify_group(g: &Group, oracle_cap: usize) -> VerifyRow {
    let name = g.name().to_string();
    if g.is_abelian() {
        return VerifyRow { group: name, oracle: "skipped".into(), pipeline: "n/a (abelian)".into(), agree: true };
    }
    let outcome = crate::autom::construct_noninner(g);
    let (pipeline, certified) = match &outcome {
        Ok(o) => {
            let ok = o.certificate.verify(g).is_ok() && is_automorphism_images(g, &o.certificate.gen_images);
            (o.certificate.path.clone(), ok)
        }
        Err(e) => (format!("error: {e}"), false),
    };
    if g.order() > oracle_cap {
        return VerifyRow { group: name, oracle: "skipped".into(), pipeline, agree: certified };
    }
    let exists = match find_noninner_order_p(g, oracle_cap) {
        Ok(found) => found.is_some(),
        Err(e) => return VerifyRow { group: name, oracle: format!("error: {e}"), pipeline, agree: false },
    };
    VerifyRow {
        group: name,
        oracle: if exists { "exists" } else { "none" }.into(),
        pipeline,
        agree: exists == certified,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use std::sync::Arc;

    fn group(name: &str) -> Group {
        Group::from_presentation(catalog::parse(name).unwrap()).unwrap()
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(enumerate_automorphisms(&group("cyclic:3,1"), 243).unwrap().len(), 2);
        assert_eq!(enumerate_automorphisms(&group("elem:3,2"), 243).unwrap().len(), 48);
        let h = enumerate_automorphisms(&group("heisenberg:3"), 243).unwrap();
        assert_eq!(h.len(), 432);
        assert_eq!(h.inner_count, 9);
    }

    #[test]
    fn cap_refused() {
        let g = group("d:3,3");
        assert!(matches!(enumerate_automorphisms(&g, 243), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn derivation_counts() {
        let c3 = group("cyclic:3,1");
        let m = FpModule::trivial(c3.presentation_arc(), 1);
        assert_eq!(enumerate_derivations_bruteforce(&m).unwrap().len(), 3);
        let h = group("heisenberg:3");
        let m = FpModule::trivial(h.presentation_arc(), 1);
        assert_eq!(enumerate_derivations_bruteforce(&m).unwrap().len(), 9);
        let big = FpModule::trivial(Arc::new(catalog::parse("elem:3,5").unwrap()), 3);
        assert!(enumerate_derivations_bruteforce(&big).is_err());
    }

    #[test]
    fn meta_has_noninner_order_three() {
        let g = group("meta:3");
        let found = find_noninner_order_p(&g, 243).unwrap().unwrap();
        assert!(is_automorphism_images(&g, &found));
    }

    #[test]
    fn non_automorphisms_rejected() {
        let g = group("heisenberg:3");
        let id = g.presentation().identity();
        assert!(!is_automorphism_images(&g, &[id.clone(), id.clone(), id]));
        let gens = g.presentation().generators();
        assert!(is_automorphism_images(&g, &gens));
        // a -> b, b -> b is not even a homomorphism onto G
        assert!(!is_automorphism_images(&g, &[gens[1].clone(), gens[1].clone(), gens[2].clone()]));
    }
}
