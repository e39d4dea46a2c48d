//! Power-commutator presentations and collection to normal form.
//!
//! A presentation on pc generators `g_1, ..., g_n` of a finite p-group stores
//! the normal forms of `g_i^p` (supported on generators after `g_i`) and of
//! `[g_j, g_i]` for `j > i` (supported on generators after `g_j`). Every element
//! is then uniquely `g_1^e_1 ... g_n^e_n` with `0 <= e_i < p`.
//!
//! Conventions used everywhere in the crate: `x^g = g^-1 x g` and
//! `[x, y] = x^-1 y^-1 x y`. Internally generator indices are 0-based; the
//! JSON format and word input of [`PcPresentation::collect`] are 1-based.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::is_prime;

/// An element in normal form, stored as its exponent vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(Vec<u32>);

impl Element {
    pub fn identity(rank: usize) -> Self {
        Element(vec![0; rank])
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Element(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|e| *e == 0)
    }

    /// Normal form as a positive word of 0-based generator letters.
    pub fn letters(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize))
            .collect()
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(i, e)| if *e == 1 { format!("g{}", i + 1) } else { format!("g{}^{}", i + 1, e) })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// One defining relation `lhs = rhs` between positive words (0-based letters).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub lhs: Vec<usize>,
    pub rhs: Vec<usize>,
}

#[derive(Clone, PartialEq, Eq)]
pub struct PcPresentation {
    name: String,
    prime: u32,
    rank: usize,
    powers: Vec<Vec<u32>>,
    /// `comms[j][i]` for `i < j` is the normal form of `[g_j, g_i]`.
    comms: Vec<Vec<Vec<u32>>>,
    /// `trivial[j][i]` caches whether `[g_j, g_i] = 1`.
    trivial: Vec<Vec<bool>>,
}

impl fmt::Debug for PcPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PcPresentation({}, p={}, n={})", self.name, self.prime, self.rank)
    }
}

impl PcPresentation {
    /// Validates the weighted shape of the relations. Associativity is not
    /// checked here; see [`crate::group::Group::check_consistency`].
    pub fn new(
        name: impl Into<String>,
        prime: u32,
        powers: Vec<Vec<u32>>,
        commutators: BTreeMap<(usize, usize), Vec<u32>>,
    ) -> Result<Self> {
        let name = name.into();
        if prime % 2 == 0 || !is_prime(prime) {
            return Err(Error::InvalidPresentation(format!("{prime} is not an odd prime")));
        }
        let rank = powers.len();
        let check_vec = |v: &Vec<u32>, min_support: usize, what: &str| -> Result<()> {
            if v.len() != rank {
                return Err(Error::InvalidPresentation(format!("{what}: length {} != {rank}", v.len())));
            }
            if let Some(e) = v.iter().find(|e| **e >= prime) {
                return Err(Error::InvalidPresentation(format!("{what}: exponent {e} not below {prime}")));
            }
            if v[..min_support.min(rank)].iter().any(|e| *e != 0) {
                return Err(Error::InvalidPresentation(format!(
                    "{what}: must only involve generators after g{min_support}"
                )));
            }
            Ok(())
        };
        for (i, v) in powers.iter().enumerate() {
            check_vec(v, i + 1, &format!("power of g{}", i + 1))?;
        }
        let mut comms = vec![Vec::new(); rank];
        let mut trivial = vec![Vec::new(); rank];
        for j in 0..rank {
            comms[j] = vec![vec![0; rank]; j];
            trivial[j] = vec![true; j];
        }
        for (&(j, i), v) in &commutators {
            if j >= rank || i >= j {
                return Err(Error::InvalidPresentation(format!(
                    "commutator key ({},{}) must satisfy n >= j > i >= 1",
                    j + 1,
                    i + 1
                )));
            }
            check_vec(v, j + 1, &format!("[g{},g{}]", j + 1, i + 1))?;
            trivial[j][i] = v.iter().all(|e| *e == 0);
            comms[j][i] = v.clone();
        }
        Ok(PcPresentation { name, prime, rank, powers, comms, trivial })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `p^n`, saturating at `u128::MAX`.
    pub fn order(&self) -> u128 {
        (self.prime as u128).checked_pow(self.rank as u32).unwrap_or(u128::MAX)
    }

    pub fn power_rhs(&self, i: usize) -> &[u32] {
        &self.powers[i]
    }

    /// Normal form of `[g_j, g_i]`, `i < j`, 0-based.
    pub fn comm_rhs(&self, j: usize, i: usize) -> &[u32] {
        &self.comms[j][i]
    }

    pub fn nontrivial_commutators(&self) -> BTreeMap<(usize, usize), Vec<u32>> {
        let mut out = BTreeMap::new();
        for j in 0..self.rank {
            for i in 0..j {
                if !self.trivial[j][i] {
                    out.insert((j, i), self.comms[j][i].clone());
                }
            }
        }
        out
    }

    pub fn identity(&self) -> Element {
        Element::identity(self.rank)
    }

    /// The pc generator `g_{i+1}` (0-based `i`).
    pub fn generator(&self, i: usize) -> Element {
        let mut e = vec![0; self.rank];
        e[i] = 1;
        Element(e)
    }

    pub fn generators(&self) -> Vec<Element> {
        (0..self.rank).map(|i| self.generator(i)).collect()
    }

    pub fn element(&self, exps: Vec<u32>) -> Result<Element> {
        if exps.len() != self.rank || exps.iter().any(|e| *e >= self.prime) {
            return Err(Error::MixedGroups);
        }
        Ok(Element(exps))
    }

    fn check(&self, x: &Element) -> Result<()> {
        if x.0.len() != self.rank {
            return Err(Error::MixedGroups);
        }
        Ok(())
    }

    /// The defining relations as equalities of positive words: `g_i^p = w_i`
    /// and `g_j g_i = g_i g_j [g_j, g_i]`.
    pub fn relations(&self) -> Vec<Relation> {
        let mut rels = Vec::new();
        for i in 0..self.rank {
            rels.push(Relation {
                lhs: vec![i; self.prime as usize],
                rhs: Element(self.powers[i].clone()).letters(),
            });
        }
        for j in 0..self.rank {
            for i in 0..j {
                let mut rhs = vec![i, j];
                rhs.extend(Element(self.comms[j][i].clone()).letters());
                rels.push(Relation { lhs: vec![j, i], rhs });
            }
        }
        rels
    }

    /// Right-multiplies the normal form `exps` by the positive word `letters`.
    fn collect_letters(&self, exps: &mut [u32], letters: &[usize]) {
        let p = self.prime;
        let mut stack: Vec<usize> = letters.iter().rev().copied().collect();
        let mut pending: Vec<usize> = Vec::new();
        while let Some(k) = stack.pop() {
            let overflow = exps[k] + 1 == p;
            let moves = (k + 1..self.rank).any(|j| exps[j] > 0 && !self.trivial[j][k]);
            if !overflow && !moves {
                exps[k] += 1;
                continue;
            }
            // x * g_k = prefix * g_k^(e_k+1) * prod_j (g_j [g_j, g_k])^(e_j)
            pending.clear();
            exps[k] = if overflow { 0 } else { exps[k] + 1 };
            if overflow {
                pending.extend(Element(self.powers[k].clone()).letters());
            }
            for j in k + 1..self.rank {
                let e = std::mem::take(&mut exps[j]);
                for _ in 0..e {
                    pending.push(j);
                    if !self.trivial[j][k] {
                        for (t, &c) in self.comms[j][k].iter().enumerate() {
                            pending.extend(std::iter::repeat_n(t, c as usize));
                        }
                    }
                }
            }
            stack.extend(pending.iter().rev());
        }
    }

    /// Collects a word of `(generator index, exponent)` pairs, 1-based indices,
    /// into normal form. Negative exponents are allowed.
    pub fn collect(&self, word: &[(usize, i64)]) -> Result<Element> {
        let mut acc = self.identity();
        for &(idx, e) in word {
            if idx == 0 || idx > self.rank {
                return Err(Error::IndexOutOfRange { index: idx, rank: self.rank });
            }
            let g = self.generator(idx - 1);
            acc = self.multiply(&acc, &self.power(&g, e)?)?;
        }
        Ok(acc)
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Result<Element> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.mul(x, y))
    }

    /// Unchecked product; both arguments must belong to this presentation.
    pub(crate) fn mul(&self, x: &Element, y: &Element) -> Element {
        let mut exps = x.0.clone();
        self.collect_letters(&mut exps, &y.letters());
        Element(exps)
    }

    pub(crate) fn mul_letters(&self, x: &Element, letters: &[usize]) -> Element {
        let mut exps = x.0.clone();
        self.collect_letters(&mut exps, letters);
        Element(exps)
    }

    /// Evaluates a positive word of 0-based letters.
    pub fn word(&self, letters: &[usize]) -> Element {
        self.mul_letters(&self.identity(), letters)
    }

    pub fn inverse(&self, x: &Element) -> Result<Element> {
        self.check(x)?;
        Ok(self.inv(x))
    }

    pub(crate) fn inv(&self, x: &Element) -> Element {
        // Clear exponents left to right: x * g_1^f_1 ... g_n^f_n = 1, and the
        // right factor is already a normal form.
        let p = self.prime;
        let mut r = x.0.clone();
        let mut f = vec![0u32; self.rank];
        for i in 0..self.rank {
            let fi = (p - r[i]) % p;
            f[i] = fi;
            if fi > 0 {
                self.collect_letters(&mut r, &vec![i; fi as usize]);
            }
        }
        debug_assert!(r.iter().all(|e| *e == 0));
        Element(f)
    }

    pub fn power(&self, x: &Element, k: i64) -> Result<Element> {
        self.check(x)?;
        let base = if k < 0 { self.inv(x) } else { x.clone() };
        Ok(self.pow(&base, k.unsigned_abs()))
    }

    pub(crate) fn pow(&self, x: &Element, mut k: u64) -> Element {
        let mut base = x.clone();
        let mut acc = self.identity();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// `x^-1 y^-1 x y`.
    pub fn commutator(&self, x: &Element, y: &Element) -> Result<Element> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.comm(x, y))
    }

    pub(crate) fn comm(&self, x: &Element, y: &Element) -> Element {
        let xy = self.mul(x, y);
        let yx = self.mul(y, x);
        self.mul(&self.inv(&yx), &xy)
    }

    /// `g^-1 x g`.
    pub fn conjugate(&self, x: &Element, g: &Element) -> Result<Element> {
        self.check(x)?;
        self.check(g)?;
        Ok(self.conj(x, g))
    }

    pub(crate) fn conj(&self, x: &Element, g: &Element) -> Element {
        self.mul(&self.mul(&self.inv(g), x), g)
    }

    pub fn element_order(&self, x: &Element) -> u128 {
        let mut y = x.clone();
        let mut ord = 1u128;
        while !y.is_identity() {
            y = self.pow(&y, self.prime as u64);
            ord *= self.prime as u128;
        }
        ord
    }

    pub fn to_file(&self) -> PresentationFile {
        PresentationFile {
            name: self.name.clone(),
            p: self.prime,
            n: self.rank,
            powers: self.powers.clone(),
            commutators: self
                .nontrivial_commutators()
                .into_iter()
                .map(|((j, i), v)| (format!("{},{}", j + 1, i + 1), v))
                .collect(),
        }
    }

    pub fn from_file(file: &PresentationFile) -> Result<Self> {
        if file.powers.len() != file.n {
            return Err(Error::Parse(format!("expected {} power rows, found {}", file.n, file.powers.len())));
        }
        let mut comms = BTreeMap::new();
        for (key, v) in &file.commutators {
            let parse = |s: &str| -> Result<usize> {
                s.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad commutator key {key:?}")))
            };
            let (j, i) = key.split_once(',').ok_or_else(|| Error::Parse(format!("bad commutator key {key:?}")))?;
            let (j, i) = (parse(j)?, parse(i)?);
            if i == 0 || j == 0 {
                return Err(Error::Parse(format!("commutator key {key:?} is 1-based")));
            }
            comms.insert((j - 1, i - 1), v.clone());
        }
        PcPresentation::new(file.name.clone(), file.p, file.powers.clone(), comms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("presentation serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PresentationFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(&file)
    }
}

/// On-disk form: `{"name", "p", "n", "powers", "commutators": {"j,i": [...]}}`
/// with 1-based keys `j > i`; absent keys are trivial commutators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationFile {
    pub name: String,
    pub p: u32,
    pub n: usize,
    pub powers: Vec<Vec<u32>>,
    #[serde(default)]
    pub commutators: BTreeMap<String, Vec<u32>>,
}

/// The rank-`d`, class-2, exponent-`p` group on `y_1..y_d` with central
/// commutators `c_ij = [y_j, y_i]` (`i < j`) appended as pc generators.
pub fn build_d(d: usize, p: u32) -> Result<PcPresentation> {
    if d < 2 {
        return Err(Error::InvalidPresentation(format!("rank {d} must be at least 2")));
    }
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let n = d + pairs.len();
    let mut comms = BTreeMap::new();
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let mut v = vec![0; n];
        v[d + k] = 1;
        comms.insert((j, i), v);
    }
    PcPresentation::new(format!("d:{d},{p}"), p, vec![vec![0; n]; n], comms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heisenberg() -> PcPresentation {
        let mut comms = BTreeMap::new();
        comms.insert((1, 0), vec![0, 0, 1]);
        PcPresentation::new("H", 3, vec![vec![0; 3]; 3], comms).unwrap()
    }

    #[test]
    fn empty_word_is_identity() {
        assert_eq!(heisenberg().collect(&[]).unwrap(), Element::identity(3));
    }

    #[test]
    fn heisenberg_hand_collection() {
        let h = heisenberg();
        assert_eq!(h.collect(&[(2, 1), (1, 1)]).unwrap().exponents(), &[1, 1, 1]);
        assert_eq!(h.collect(&[(1, 3)]).unwrap().exponents(), &[0, 0, 0]);
        let (a, b) = (h.generator(0), h.generator(1));
        assert_eq!(h.commutator(&b, &a).unwrap().exponents(), &[0, 0, 1]);
        assert_eq!(h.commutator(&a, &b).unwrap().exponents(), &[0, 0, 2]);
    }

    #[test]
    fn index_out_of_range() {
        assert!(matches!(heisenberg().collect(&[(4, 1)]), Err(Error::IndexOutOfRange { index: 4, .. })));
        assert!(matches!(heisenberg().collect(&[(0, 1)]), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn inverse_and_negative_powers() {
        let h = heisenberg();
        let x = h.collect(&[(1, 2), (2, 1), (3, 2)]).unwrap();
        let xi = h.inverse(&x).unwrap();
        assert!(h.multiply(&x, &xi).unwrap().is_identity());
        assert!(h.multiply(&xi, &x).unwrap().is_identity());
        assert_eq!(h.power(&x, -1).unwrap(), xi);
        assert!(h.power(&x, 27).unwrap().is_identity());
    }

    #[test]
    fn mixed_lengths_rejected() {
        let h = heisenberg();
        assert_eq!(h.multiply(&h.identity(), &Element::identity(2)), Err(Error::MixedGroups));
    }

    #[test]
    fn rejects_bad_shapes() {
        let mut comms = BTreeMap::new();
        comms.insert((1, 0), vec![1, 0, 0]);
        assert!(PcPresentation::new("bad", 3, vec![vec![0; 3]; 3], comms).is_err());
        assert!(PcPresentation::new("even", 2, vec![vec![0]], BTreeMap::new()).is_err());
        assert!(PcPresentation::new("pow", 3, vec![vec![1, 0]; 2], BTreeMap::new()).is_err());
    }

    #[test]
    fn build_d_shape() {
        let d = build_d(3, 3).unwrap();
        assert_eq!(d.rank(), 6);
        assert_eq!(d.order(), 729);
        assert!(build_d(1, 3).is_err());
        // [y_3, y_1] is the second commutator generator.
        assert_eq!(d.comm_rhs(2, 0), &[0, 0, 0, 0, 1, 0]);
    }

    #[test]
    fn json_round_trip() {
        let h = heisenberg();
        let back = PcPresentation::from_json(&h.to_json()).unwrap();
        assert_eq!(back, h);
        assert!(PcPresentation::from_json("{not json").is_err());
    }
}
