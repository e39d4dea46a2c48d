//! Enumerated view of a pc group, homomorphisms and quotients.
//!
//! [`Group`] indexes every element by its exponent vector read as a base-p
//! number, so index order is lexicographic order of normal forms. Products
//! are answered from a right-multiplication-by-generator table, and from a
//! full multiplication table for small groups.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

use crate::error::{Error, Result};
use crate::pc::{Element, PcPresentation};

pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;
const FULL_TABLE_CAP: usize = 2187;
/// Groups at most this large get the exhaustive associativity check.
pub const EXHAUSTIVE_ASSOCIATIVITY_CAP: usize = 243;

pub struct Group {
    pres: Arc<PcPresentation>,
    order: usize,
    place: Vec<usize>,
    right_gen: Vec<u32>,
    inverse: Vec<u32>,
    table: Option<Vec<u32>>,
}

impl std::fmt::Debug for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Group({}, order {})", self.pres.name(), self.order)
    }
}

impl Group {
    pub fn new(pres: Arc<PcPresentation>) -> Result<Self> {
        Self::with_cap(pres, DEFAULT_ENUMERATION_CAP)
    }

    pub fn from_presentation(pres: PcPresentation) -> Result<Self> {
        Self::new(Arc::new(pres))
    }

    /// Enumerates the group, refusing when `p^n` exceeds `cap`.
    pub fn with_cap(pres: Arc<PcPresentation>, cap: u128) -> Result<Self> {
        let size = pres.order();
        if size > cap {
            return Err(Error::TooLarge { size, cap });
        }
        let order = size as usize;
        let n = pres.rank();
        let p = pres.prime() as usize;
        let mut place = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            place[i] = place[i + 1] * p;
        }
        let mut g = Group { pres, order, place, right_gen: Vec::new(), inverse: Vec::new(), table: None };
        let mut right_gen = vec![0u32; order * n];
        for x in 0..order {
            let e = g.element(x);
            for k in 0..n {
                right_gen[x * n + k] = g.index(&g.pres.mul_letters(&e, &[k])) as u32;
            }
        }
        g.right_gen = right_gen;
        g.inverse = (0..order).map(|x| g.index(&g.pres.inv(&g.element(x))) as u32).collect();
        if order <= FULL_TABLE_CAP {
            let mut table = vec![0u32; order * order];
            for a in 0..order {
                for b in 0..order {
                    table[a * order + b] = g.walk(a, b) as u32;
                }
            }
            g.table = Some(table);
        }
        Ok(g)
    }

    pub fn presentation(&self) -> &PcPresentation {
        &self.pres
    }

    pub fn presentation_arc(&self) -> Arc<PcPresentation> {
        Arc::clone(&self.pres)
    }

    pub fn name(&self) -> &str {
        self.pres.name()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.pres.rank()
    }

    pub fn prime(&self) -> u32 {
        self.pres.prime()
    }

    pub fn index(&self, x: &Element) -> usize {
        x.exponents().iter().zip(&self.place).map(|(e, w)| *e as usize * w).sum()
    }

    pub fn element(&self, mut idx: usize) -> Element {
        let p = self.prime() as usize;
        let mut exps = vec![0u32; self.rank()];
        for e in exps.iter_mut().rev() {
            *e = (idx % p) as u32;
            idx /= p;
        }
        Element::from_exponents(exps)
    }

    /// All elements in lexicographic order of exponent vectors.
    pub fn enumerate(&self) -> Vec<Element> {
        (0..self.order).map(|i| self.element(i)).collect()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn gen(&self, k: usize) -> usize {
        self.place[k]
    }

    pub fn gens(&self) -> Vec<usize> {
        (0..self.rank()).map(|k| self.gen(k)).collect()
    }

    fn walk(&self, a: usize, b: usize) -> usize {
        let n = self.rank();
        let mut cur = a;
        let mut rest = b;
        for k in 0..n {
            let e = rest / self.place[k];
            rest %= self.place[k];
            for _ in 0..e {
                cur = self.right_gen[cur * n + k] as usize;
            }
        }
        cur
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.table {
            Some(t) => t[a * self.order + b] as usize,
            None => self.walk(a, b),
        }
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }

    pub fn pow(&self, a: usize, mut k: u64) -> usize {
        let (mut base, mut acc) = (a, 0usize);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// `a^-1 b^-1 a b`.
    pub fn comm(&self, a: usize, b: usize) -> usize {
        self.mul(self.inv(self.mul(b, a)), self.mul(a, b))
    }

    /// `g^-1 a g`.
    pub fn conj(&self, a: usize, g: usize) -> usize {
        self.mul(self.mul(self.inv(g), a), g)
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let (mut x, mut ord) = (a, 1u64);
        while x != 0 {
            x = self.pow(x, self.prime() as u64);
            ord *= self.prime() as u64;
        }
        ord
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.gens();
        gens.iter().all(|&a| gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Evaluates a positive word of 0-based generator letters.
    pub fn word(&self, letters: &[usize]) -> usize {
        let n = self.rank();
        letters.iter().fold(0usize, |cur, &k| self.right_gen[cur * n + k] as usize)
    }

    /// Checks identity, inverse and associativity laws: exhaustively up to
    /// [`EXHAUSTIVE_ASSOCIATIVITY_CAP`] elements, on `samples` seeded random
    /// triples above it.
    pub fn check_consistency(&self, samples: usize, seed: u64) -> Result<()> {
        let fail = |what: String| Err(Error::InvalidPresentation(format!("{}: {what}", self.name())));
        for a in 0..self.order {
            if self.mul(a, 0) != a || self.mul(0, a) != a {
                return fail(format!("identity law fails at {:?}", self.element(a)));
            }
            let ai = self.inv(a);
            if self.mul(a, ai) != 0 || self.mul(ai, a) != 0 {
                return fail(format!("inverse law fails at {:?}", self.element(a)));
            }
        }
        let check = |a: usize, b: usize, c: usize| {
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                return fail(format!(
                    "not associative on {:?}, {:?}, {:?}",
                    self.element(a),
                    self.element(b),
                    self.element(c)
                ));
            }
            Ok(())
        };
        if self.order <= EXHAUSTIVE_ASSOCIATIVITY_CAP {
            for a in 0..self.order {
                for b in 0..self.order {
                    let ab = self.mul(a, b);
                    for c in 0..self.order {
                        if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                            return check(a, b, c);
                        }
                    }
                }
            }
        } else {
            let mut rng = StdRng::seed_from_u64(seed);
            for _ in 0..samples {
                let (a, b, c) = (
                    rng.random_range(0..self.order),
                    rng.random_range(0..self.order),
                    rng.random_range(0..self.order),
                );
                check(a, b, c)?;
            }
            // Generator triples catch most inconsistencies in one pass.
            let gens = self.gens();
            for &a in &gens {
                for &b in &gens {
                    for &c in &gens {
                        check(a, b, c)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Closure of a set of element indices under multiplication.
    pub fn closure(&self, gens: &[usize]) -> Vec<bool> {
        let mut members = vec![false; self.order];
        members[0] = true;
        let mut list = vec![0usize];
        let gens: Vec<usize> = gens.iter().copied().filter(|&g| g != 0).collect();
        let mut i = 0;
        while i < list.len() {
            let x = list[i];
            for &g in &gens {
                let y = self.mul(x, g);
                if !members[y] {
                    members[y] = true;
                    list.push(y);
                }
            }
            i += 1;
        }
        members
    }
}

/// A homomorphism between pc groups, determined by images of the source pc generators.
#[derive(Clone, Debug)]
pub struct GroupHom {
    source: Arc<PcPresentation>,
    target: Arc<PcPresentation>,
    images: Vec<Element>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomKind {
    pub injective: bool,
    pub surjective: bool,
}

impl HomKind {
    pub fn is_iso(&self) -> bool {
        self.injective && self.surjective
    }
}

impl GroupHom {
    /// Builds the map after checking every defining relation of the source.
    pub fn new(source: Arc<PcPresentation>, target: Arc<PcPresentation>, images: Vec<Element>) -> Result<Self> {
        if images.len() != source.rank() {
            return Err(Error::NotHomomorphism(format!(
                "{} images for {} generators",
                images.len(),
                source.rank()
            )));
        }
        for im in &images {
            target.element(im.exponents().to_vec())?;
        }
        let hom = GroupHom { source, target, images };
        for rel in hom.source.relations() {
            if hom.eval_letters(&rel.lhs) != hom.eval_letters(&rel.rhs) {
                return Err(Error::NotHomomorphism(format!("relation {:?} = {:?} violated", rel.lhs, rel.rhs)));
            }
        }
        Ok(hom)
    }

    pub fn source(&self) -> &Arc<PcPresentation> {
        &self.source
    }

    pub fn target(&self) -> &Arc<PcPresentation> {
        &self.target
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    fn eval_letters(&self, letters: &[usize]) -> Element {
        letters.iter().fold(self.target.identity(), |acc, &k| self.target.mul(&acc, &self.images[k]))
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        if x.exponents().len() != self.source.rank() {
            return Err(Error::MixedGroups);
        }
        Ok(self.eval_letters(&x.letters()))
    }

    pub fn compose(&self, after: &GroupHom) -> Result<GroupHom> {
        if *after.source != *self.target {
            return Err(Error::MixedGroups);
        }
        let images = self.images.iter().map(|x| after.apply(x)).collect::<Result<Vec<_>>>()?;
        Ok(GroupHom { source: Arc::clone(&self.source), target: Arc::clone(&after.target), images })
    }

    /// Image size and kernel triviality, decided by enumerating the target.
    pub fn kind(&self, target: &Group) -> HomKind {
        let gens: Vec<usize> = self.images.iter().map(|x| target.index(x)).collect();
        let image_order = target.closure(&gens).iter().filter(|m| **m).count() as u128;
        HomKind { injective: image_order == self.source.order(), surjective: image_order == self.target.order() }
    }
}

/// Dense multiplication table of a finite group whose identity is index 0.
struct TableGroup {
    order: usize,
    table: Vec<u32>,
}

impl TableGroup {
    fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    fn inv(&self, a: usize) -> usize {
        (0..self.order).find(|&b| self.mul(a, b) == 0).expect("group element has an inverse")
    }

    fn pow(&self, a: usize, k: u32) -> usize {
        (0..k).fold(0, |acc, _| self.mul(acc, a))
    }

    fn comm(&self, a: usize, b: usize) -> usize {
        self.mul(self.inv(self.mul(b, a)), self.mul(a, b))
    }

    fn closure(&self, gens: &[usize]) -> Vec<bool> {
        let mut members = vec![false; self.order];
        members[0] = true;
        let mut list = vec![0usize];
        let mut i = 0;
        while i < list.len() {
            for &g in gens {
                let y = self.mul(list[i], g);
                if !members[y] {
                    members[y] = true;
                    list.push(y);
                }
            }
            i += 1;
        }
        members
    }
}

/// Result of re-presenting a finite p-group given by a table.
struct Represented {
    pres: PcPresentation,
    /// Normal form of each table element.
    normal_forms: Vec<Element>,
    /// Table index of each new pc generator.
    pc_gens: Vec<usize>,
}

/// Finds a pc presentation by refining the lower exponent-p central series
/// to index-p steps; every factor is central, so the relations are weighted.
fn represent(tg: &TableGroup, p: u32, name: &str) -> Result<Represented> {
    let all: Vec<usize> = (0..tg.order).collect();
    let members_to_list = |m: &[bool]| -> Vec<usize> { (0..tg.order).filter(|&i| m[i]).collect() };
    // Descending chain of subgroups with index-p steps.
    let mut chain_gens: Vec<usize> = Vec::new();
    let mut current = all.clone();
    while current.len() > 1 {
        let mut next_gens: Vec<usize> = Vec::new();
        for &x in &current {
            next_gens.push(tg.pow(x, p));
            for &g in &all {
                next_gens.push(tg.comm(x, g));
            }
        }
        next_gens.sort_unstable();
        next_gens.dedup();
        let next = tg.closure(&next_gens);
        if next.iter().filter(|m| **m).count() == current.len() {
            return Err(Error::InvalidPresentation(format!("{name}: group is not a p-group")));
        }
        // Build up from `next` to `current`; later additions sit higher in the pc sequence.
        let mut layer = Vec::new();
        let mut acc = next.clone();
        let mut acc_gens: Vec<usize> = members_to_list(&next);
        for &x in &current {
            if !acc[x] {
                layer.push(x);
                acc_gens.push(x);
                acc = tg.closure(&acc_gens);
            }
        }
        layer.reverse();
        chain_gens.extend(layer);
        current = members_to_list(&next);
    }
    let m = chain_gens.len();
    if (p as u128).pow(m as u32) != tg.order as u128 {
        return Err(Error::InvalidPresentation(format!("{name}: order is not a power of {p}")));
    }
    // tails[i] = <g_i, ..., g_m> membership.
    let mut tails: Vec<Vec<bool>> = Vec::with_capacity(m + 1);
    for i in 0..=m {
        tails.push(tg.closure(&chain_gens[i..]));
    }
    let inv_gens: Vec<usize> = chain_gens.iter().map(|&g| tg.inv(g)).collect();
    let sift = |mut x: usize| -> Vec<u32> {
        let mut exps = vec![0u32; m];
        for i in 0..m {
            let mut e = 0;
            while !tails[i + 1][x] {
                x = tg.mul(inv_gens[i], x);
                e += 1;
                assert!(e < p, "sifting failed; chain is not index-p");
            }
            exps[i] = e;
        }
        exps
    };
    let powers: Vec<Vec<u32>> = chain_gens.iter().map(|&g| sift(tg.pow(g, p))).collect();
    let mut comms = BTreeMap::new();
    for j in 0..m {
        for i in 0..j {
            let c = sift(tg.comm(chain_gens[j], chain_gens[i]));
            if c.iter().any(|e| *e != 0) {
                comms.insert((j, i), c);
            }
        }
    }
    let pres = PcPresentation::new(name, p, powers, comms)?;
    let normal_forms = (0..tg.order).map(|x| Element::from_exponents(sift(x))).collect();
    Ok(Represented { pres, normal_forms, pc_gens: chain_gens })
}

/// Presentation of `G/N` together with the projection `G -> G/N`.
/// `normal` is a membership mask over `g`'s element indices.
pub fn quotient(g: &Group, normal: &[bool]) -> Result<(PcPresentation, GroupHom)> {
    let members: Vec<usize> = (0..g.order()).filter(|&i| normal[i]).collect();
    if !normal[0] || members.iter().any(|&a| members.iter().any(|&b| !normal[g.mul(a, b)])) {
        return Err(Error::NotSubgroup);
    }
    for &n in &members {
        for k in g.gens() {
            if !normal[g.conj(n, k)] {
                return Err(Error::NotNormal);
            }
        }
    }
    let mut coset = vec![usize::MAX; g.order()];
    let mut reps = Vec::new();
    for x in 0..g.order() {
        if coset[x] == usize::MAX {
            let id = reps.len();
            reps.push(x);
            for &n in &members {
                coset[g.mul(x, n)] = id;
            }
        }
    }
    let q = reps.len();
    let mut table = vec![0u32; q * q];
    for a in 0..q {
        for b in 0..q {
            table[a * q + b] = coset[g.mul(reps[a], reps[b])] as u32;
        }
    }
    let tg = TableGroup { order: q, table };
    let name = format!("{}/N{}", g.name(), members.len());
    let rep = represent(&tg, g.prime(), &name)?;
    let target = Arc::new(rep.pres);
    let images = g.gens().iter().map(|&k| rep.normal_forms[coset[k]].clone()).collect();
    let hom = GroupHom::new(g.presentation_arc(), Arc::clone(&target), images)?;
    Ok(((*target).clone(), hom))
}

/// Presentation of a subgroup (membership mask) and its inclusion into `g`.
pub fn subgroup_presentation(g: &Group, members: &[bool], name: &str) -> Result<(PcPresentation, GroupHom)> {
    let list: Vec<usize> = (0..g.order()).filter(|&i| members[i]).collect();
    let mut pos = vec![usize::MAX; g.order()];
    for (k, &x) in list.iter().enumerate() {
        pos[x] = k;
    }
    let h = list.len();
    let mut table = vec![0u32; h * h];
    for a in 0..h {
        for b in 0..h {
            let c = pos[g.mul(list[a], list[b])];
            if c == usize::MAX {
                return Err(Error::NotSubgroup);
            }
            table[a * h + b] = c as u32;
        }
    }
    let tg = TableGroup { order: h, table };
    let rep = represent(&tg, g.prime(), name)?;
    let source = Arc::new(rep.pres);
    let images = rep.pc_gens.iter().map(|&t| g.element(list[t])).collect();
    let hom = GroupHom::new(Arc::clone(&source), g.presentation_arc(), images)?;
    Ok(((*source).clone(), hom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn heisenberg_table_matches_collection() {
        let h = Group::from_presentation(catalog::heisenberg(3).unwrap()).unwrap();
        assert_eq!(h.order(), 27);
        let pres = h.presentation();
        for a in 0..27 {
            for b in 0..27 {
                let direct = pres.mul(&h.element(a), &h.element(b));
                assert_eq!(h.element(h.mul(a, b)), direct);
            }
        }
        h.check_consistency(0, 0).unwrap();
    }

    #[test]
    fn cap_is_enforced() {
        let d = crate::pc::build_d(3, 3).unwrap();
        let err = Group::with_cap(Arc::new(d), 100).unwrap_err();
        assert_eq!(err, Error::TooLarge { size: 729, cap: 100 });
    }

    #[test]
    fn inconsistent_presentation_detected() {
        // [g2, g1] = g3 with g1^3 = g3 is not a consistent order-27 group.
        let mut comms = BTreeMap::new();
        comms.insert((1, 0), vec![0, 0, 1]);
        let pres = PcPresentation::new("bad", 3, vec![vec![0, 1, 0], vec![0, 0, 0], vec![0, 0, 0]], comms).unwrap();
        let g = Group::from_presentation(pres).unwrap();
        assert!(g.check_consistency(0, 0).is_err());
    }

    #[test]
    fn quotient_by_center_of_heisenberg() {
        let h = Group::from_presentation(catalog::heisenberg(3).unwrap()).unwrap();
        let z = h.closure(&[h.gen(2)]);
        let (q, pi) = quotient(&h, &z).unwrap();
        assert_eq!(q.rank(), 2);
        let qg = Group::from_presentation(q).unwrap();
        assert!(qg.is_abelian());
        assert!((0..qg.order()).all(|x| qg.pow(x, 3) == 0));
        assert!(pi.kind(&qg).surjective);
        // kernel is exactly Z
        for x in 0..27 {
            let img = pi.apply(&h.element(x)).unwrap();
            assert_eq!(img.is_identity(), z[x]);
        }
    }

    #[test]
    fn quotient_by_trivial_is_isomorphic() {
        let h = Group::from_presentation(catalog::heisenberg(3).unwrap()).unwrap();
        let triv = h.closure(&[]);
        let (q, pi) = quotient(&h, &triv).unwrap();
        let qg = Group::from_presentation(q).unwrap();
        assert!(pi.kind(&qg).is_iso());
        qg.check_consistency(0, 0).unwrap();
    }

    #[test]
    fn non_normal_quotient_rejected() {
        let h = Group::from_presentation(catalog::heisenberg(3).unwrap()).unwrap();
        let a = h.closure(&[h.gen(0)]);
        assert_eq!(quotient(&h, &a).unwrap_err(), Error::NotNormal);
    }

    #[test]
    fn homomorphism_relations_checked() {
        let h = Arc::new(catalog::heisenberg(3).unwrap());
        let e = catalog::elementary_abelian(3, 2).unwrap();
        let e = Arc::new(e);
        // a -> x, b -> y, c -> 1 is the abelianisation.
        let ok = GroupHom::new(
            Arc::clone(&h),
            Arc::clone(&e),
            vec![e.generator(0), e.generator(1), e.identity()],
        );
        assert!(ok.is_ok());
        let bad = GroupHom::new(Arc::clone(&h), Arc::clone(&e), vec![e.identity(), e.identity(), e.generator(0)]);
        assert!(matches!(bad, Err(Error::NotHomomorphism(_))));
    }

    #[test]
    fn subgroup_presentation_of_center() {
        let h = Group::from_presentation(catalog::heisenberg(3).unwrap()).unwrap();
        let max = h.closure(&[h.gen(1), h.gen(2)]);
        let (sub, inc) = subgroup_presentation(&h, &max, "B").unwrap();
        assert_eq!(sub.order(), 9);
        let sg = Group::from_presentation(sub).unwrap();
        assert!(inc.kind(&h).injective);
        assert!(sg.is_abelian());
    }
}
