//! Subgroups as explicit element sets, characteristic series and the
//! refined chain `Φ(G) = P_0 ≥ P_1 ≥ ... ≥ P_T = γ_3(G)G^p`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::pc::Element;

/// A subgroup of an enumerated group: membership mask, sorted element
/// indices and a generating list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    members: Vec<bool>,
    elements: Vec<usize>,
    generators: Vec<usize>,
}

impl Subgroup {
    /// The subgroup generated by the given element indices.
    pub fn generated(g: &Group, gens: &[usize]) -> Subgroup {
        let mut kept = Vec::new();
        let mut members = g.closure(&[]);
        for &x in gens {
            if !members[x] {
                kept.push(x);
                members = g.closure(&kept);
            }
        }
        Self::assemble(members, kept)
    }

    fn assemble(members: Vec<bool>, generators: Vec<usize>) -> Subgroup {
        let elements = (0..members.len()).filter(|&i| members[i]).collect();
        Subgroup { members, elements, generators }
    }

    /// Wraps a membership mask after auditing closure.
    pub fn from_members(g: &Group, members: Vec<bool>) -> Result<Subgroup> {
        if members.len() != g.order() {
            return Err(Error::MixedGroups);
        }
        let list: Vec<usize> = (0..g.order()).filter(|&i| members[i]).collect();
        let mut kept = Vec::new();
        let mut closed = g.closure(&[]);
        for &x in &list {
            if !closed[x] {
                kept.push(x);
                closed = g.closure(&kept);
            }
        }
        if closed != members {
            return Err(Error::NotSubgroup);
        }
        Ok(Self::assemble(members, kept))
    }

    pub fn trivial(g: &Group) -> Subgroup {
        Self::generated(g, &[])
    }

    pub fn whole(g: &Group) -> Subgroup {
        Self::assemble(vec![true; g.order()], g.gens())
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members[x]
    }

    pub fn members(&self) -> &[bool] {
        &self.members
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn generator_elements(&self, g: &Group) -> Vec<Element> {
        self.generators.iter().map(|&x| g.element(x)).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&x| other.members[x])
    }

    /// First element of `self` outside `other`, in index order.
    pub fn witness_outside(&self, other: &Subgroup) -> Option<usize> {
        self.elements.iter().copied().find(|&x| !other.members[x])
    }

    pub fn is_normal(&self, g: &Group) -> bool {
        self.generators.iter().all(|&h| g.gens().iter().all(|&k| self.members[g.conj(h, k)]))
    }

    pub fn is_abelian(&self, g: &Group) -> bool {
        self.generators.iter().all(|&a| self.generators.iter().all(|&b| g.mul(a, b) == g.mul(b, a)))
    }

    pub fn is_elementary_abelian(&self, g: &Group) -> bool {
        self.is_abelian(g) && self.generators.iter().all(|&a| g.pow(a, g.prime() as u64) == 0)
    }

    pub fn intersect(&self, g: &Group, other: &Subgroup) -> Subgroup {
        let members: Vec<bool> = self.members.iter().zip(&other.members).map(|(a, b)| *a && *b).collect();
        Self::from_members(g, members).expect("intersection of subgroups is a subgroup")
    }

    pub fn join(&self, g: &Group, other: &Subgroup) -> Subgroup {
        let mut gens = self.generators.clone();
        gens.extend_from_slice(&other.generators);
        Self::generated(g, &gens)
    }

    /// Closure audit: identity, products of generators with elements and inverses stay inside.
    pub fn audit(&self, g: &Group) -> Result<()> {
        if !self.members[0] {
            return Err(Error::NotSubgroup);
        }
        for &x in &self.elements {
            if !self.members[g.inv(x)] || self.generators.iter().any(|&h| !self.members[g.mul(x, h)]) {
                return Err(Error::NotSubgroup);
            }
        }
        if g.closure(&self.generators) != self.members {
            return Err(Error::NotSubgroup);
        }
        Ok(())
    }

    /// `log_p |self|`.
    pub fn log_order(&self, p: u32) -> usize {
        let mut k = 0;
        let mut m = self.order();
        while m > 1 {
            m /= p as usize;
            k += 1;
        }
        k
    }
}

/// Normal closure of a set of elements.
pub fn normal_closure(g: &Group, seeds: &[usize]) -> Subgroup {
    let mut gens: Vec<usize> = seeds.to_vec();
    loop {
        let sub = Subgroup::generated(g, &gens);
        let mut grown = false;
        for &h in sub.generators().to_vec().iter() {
            for k in g.gens() {
                let c = g.conj(h, k);
                if !sub.contains(c) && !gens.contains(&c) {
                    gens.push(c);
                    grown = true;
                }
            }
        }
        if !grown {
            return sub;
        }
    }
}

/// `[A, B]` for normal subgroups `A`, `B`.
pub fn commutator_subgroup(g: &Group, a: &Subgroup, b: &Subgroup) -> Subgroup {
    let mut seeds = Vec::new();
    for &x in a.elements() {
        for &y in b.generators() {
            seeds.push(g.comm(x, y));
        }
    }
    seeds.sort_unstable();
    seeds.dedup();
    normal_closure(g, &seeds)
}

pub fn center(g: &Group) -> Subgroup {
    centralizer(g, &Subgroup::whole(g))
}

/// `C_G(H)`.
pub fn centralizer(g: &Group, h: &Subgroup) -> Subgroup {
    let members = (0..g.order())
        .map(|x| h.generators().iter().all(|&y| g.mul(x, y) == g.mul(y, x)))
        .collect();
    Subgroup::from_members(g, members).expect("centralizers are subgroups")
}

/// `Z_i(G)`, with `Z_0 = 1`.
pub fn upper_central(g: &Group, i: usize) -> Subgroup {
    let mut z = Subgroup::trivial(g);
    for _ in 0..i {
        let members = (0..g.order()).map(|x| g.gens().iter().all(|&k| z.contains(g.comm(x, k)))).collect();
        let next = Subgroup::from_members(g, members).expect("upper central terms are subgroups");
        if next == z {
            break;
        }
        z = next;
    }
    z
}

/// `γ_i(G)`, with `γ_1 = G`.
pub fn lower_central(g: &Group, i: usize) -> Subgroup {
    let whole = Subgroup::whole(g);
    let mut gamma = whole.clone();
    for _ in 1..i.max(1) {
        if gamma.is_trivial() {
            break;
        }
        gamma = commutator_subgroup(g, &gamma, &whole);
    }
    gamma
}

/// `G^p`, generated by all p-th powers.
pub fn agemo(g: &Group) -> Subgroup {
    let mut powers: Vec<usize> = (0..g.order()).map(|x| g.pow(x, g.prime() as u64)).collect();
    powers.sort_unstable();
    powers.dedup();
    Subgroup::generated(g, &powers)
}

/// `Φ(G) = G^p γ_2(G)`.
pub fn frattini(g: &Group) -> Subgroup {
    agemo(g).join(g, &lower_central(g, 2))
}

/// Homomorphisms `G -> C_p` as exponent functionals `x -> Σ f_i e_i`.
pub fn homs_to_cp(g: &Group) -> Vec<Vec<u32>> {
    let p = g.prime();
    let n = g.rank();
    let pres = g.presentation();
    let relations = pres.relations();
    let mut out = Vec::new();
    let total = (p as usize).pow(n as u32);
    for code in 0..total {
        let mut f = vec![0u32; n];
        let mut c = code;
        for v in f.iter_mut().rev() {
            *v = (c % p as usize) as u32;
            c /= p as usize;
        }
        let value = |letters: &[usize]| letters.iter().map(|&k| f[k]).sum::<u32>() % p;
        if relations.iter().all(|r| value(&r.lhs) == value(&r.rhs)) {
            out.push(f);
        }
    }
    out
}

/// `Φ(G)` as the intersection of the kernels of all maps onto `C_p`.
pub fn frattini_via_maximal(g: &Group) -> Subgroup {
    let p = g.prime();
    let homs = homs_to_cp(g);
    let members = (0..g.order())
        .map(|x| {
            let e = g.element(x);
            homs.iter().all(|f| f.iter().zip(e.exponents()).map(|(a, b)| a * b).sum::<u32>() % p == 0)
        })
        .collect();
    Subgroup::from_members(g, members).expect("kernel intersection is a subgroup")
}

/// `Ω_1(A)` for abelian `A`.
pub fn omega1(g: &Group, a: &Subgroup) -> Result<Subgroup> {
    if !a.is_abelian(g) {
        return Err(Error::NotAbelian);
    }
    let members: Vec<bool> = (0..g.order()).map(|x| a.contains(x) && g.pow(x, g.prime() as u64) == 0).collect();
    Subgroup::from_members(g, members)
}

/// `d(G) = log_p |G/Φ(G)|`.
pub fn min_generators(g: &Group) -> usize {
    g.rank() - frattini(g).log_order(g.prime())
}

/// `d(H)` for a subgroup, through its own Frattini quotient.
pub fn subgroup_rank(g: &Group, h: &Subgroup) -> usize {
    let p = g.prime() as u64;
    let mut seeds: Vec<usize> = h.elements().iter().map(|&x| g.pow(x, p)).collect();
    for &x in h.elements() {
        for &y in h.generators() {
            seeds.push(g.comm(x, y));
        }
    }
    seeds.sort_unstable();
    seeds.dedup();
    let phi = Subgroup::generated(g, &seeds);
    h.log_order(g.prime()) - phi.log_order(g.prime())
}

/// Every normal subgroup of `g`; desk scale only.
pub fn normal_subgroups(g: &Group) -> Vec<Subgroup> {
    let mut found = vec![Subgroup::trivial(g)];
    let mut i = 0;
    while i < found.len() {
        let n = found[i].clone();
        for x in 0..g.order() {
            if n.contains(x) {
                continue;
            }
            let mut seeds = n.generators().to_vec();
            seeds.push(x);
            let m = normal_closure(g, &seeds);
            if !found.iter().any(|f| f.members() == m.members()) {
                found.push(m);
            }
        }
        i += 1;
    }
    found.sort_by_key(|s| s.order());
    found
}

/// `Φ(G) = P_0 > P_1 > ... > P_T = γ_3(G)G^p`, index `p` at each step.
#[derive(Clone, Debug)]
pub struct SubgroupChain {
    links: Vec<Subgroup>,
}

impl SubgroupChain {
    pub fn links(&self) -> &[Subgroup] {
        &self.links
    }

    pub fn link(&self, i: usize) -> &Subgroup {
        &self.links[i]
    }

    /// Number of index-p steps.
    pub fn t(&self) -> usize {
        self.links.len() - 1
    }
}

/// `γ_3(G) G^p`.
pub fn gamma3_agemo(g: &Group) -> Subgroup {
    lower_central(g, 3).join(g, &agemo(g))
}

/// Builds the chain upward from `γ_3(G)G^p`, adjoining the smallest-index
/// element of `Φ(G)` not yet reached at each step.
pub fn refine_chain(g: &Group) -> SubgroupChain {
    let phi = frattini(g);
    let bottom = gamma3_agemo(g);
    let mut ascending = vec![bottom.clone()];
    let mut q = bottom;
    while q.order() < phi.order() {
        let x = phi.witness_outside(&q).expect("Φ(G) strictly contains the current link");
        let mut gens = q.generators().to_vec();
        gens.push(x);
        q = Subgroup::generated(g, &gens);
        ascending.push(q.clone());
    }
    ascending.reverse();
    SubgroupChain { links: ascending }
}

#[derive(Clone, Debug, Serialize)]
pub struct Containment {
    pub holds: bool,
    /// An element of the left side outside the right side, when the containment fails.
    pub witness: Option<Element>,
}

impl Containment {
    fn of(g: &Group, a: &Subgroup, b: &Subgroup) -> Containment {
        let w = a.witness_outside(b);
        Containment { holds: w.is_none(), witness: w.map(|x| g.element(x)) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub abelian: bool,
    pub center_rank: usize,
    pub center_cyclic: bool,
    /// `C_G(Φ(G)) ≤ Φ(G)`
    pub frattini_self_centralizing: Containment,
    /// `Ω_1(Z(G)) ≤ γ_3(G)G^p`
    pub omega1_center_in_n: Containment,
    /// `C_G(N) ≤ N` for `N = γ_3(G)G^p`
    pub n_self_centralizing: Containment,
    /// `C_G(Z(N)) ≤ N`
    pub zn_centralizer_in_n: Containment,
    pub powerful: bool,
    /// Cyclic center and `C_G(Z(N))` not inside `N`.
    pub main_hypothesis: bool,
    pub note: Option<String>,
}

pub fn hypothesis_report(g: &Group) -> HypothesisReport {
    let abelian = g.is_abelian();
    let z = center(g);
    let center_rank = subgroup_rank(g, &z);
    let phi = frattini(g);
    let n = gamma3_agemo(g);
    let zn = centralizer(g, &n).intersect(g, &n);
    let frattini_self_centralizing = Containment::of(g, &centralizer(g, &phi), &phi);
    let omega = omega1(g, &z).expect("the center is abelian");
    let omega1_center_in_n = Containment::of(g, &omega, &n);
    let n_self_centralizing = Containment::of(g, &centralizer(g, &n), &n);
    let zn_centralizer_in_n = Containment::of(g, &centralizer(g, &zn), &n);
    let powerful = phi.order() == n.order();
    let center_cyclic = center_rank == 1;
    HypothesisReport {
        abelian,
        center_rank,
        center_cyclic,
        main_hypothesis: !abelian && center_cyclic && !zn_centralizer_in_n.holds,
        frattini_self_centralizing,
        omega1_center_in_n,
        n_self_centralizing,
        zn_centralizer_in_n,
        powerful,
        note: abelian.then(|| "abelian, out of scope".to_string()),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubgroupSummary {
    pub order: usize,
    pub generators: Vec<Element>,
}

impl SubgroupSummary {
    pub fn of(g: &Group, h: &Subgroup) -> Self {
        SubgroupSummary { order: h.order(), generators: h.generator_elements(g) }
    }
}

/// Everything `series` reports about a group.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesReport {
    pub group: String,
    pub order: usize,
    pub d: usize,
    pub center: SubgroupSummary,
    pub frattini: SubgroupSummary,
    pub frattini_order: usize,
    pub agemo: SubgroupSummary,
    pub gamma3_agemo: SubgroupSummary,
    pub lower_central: Vec<SubgroupSummary>,
    pub upper_central: Vec<SubgroupSummary>,
    #[serde(rename = "T")]
    pub t: usize,
    pub chain: Vec<SubgroupSummary>,
    pub hypothesis: HypothesisReport,
}

pub fn series_report(g: &Group) -> SeriesReport {
    let mut lower = vec![Subgroup::whole(g)];
    while !lower.last().unwrap().is_trivial() {
        let next = commutator_subgroup(g, lower.last().unwrap(), &Subgroup::whole(g));
        if next.order() == lower.last().unwrap().order() {
            break;
        }
        lower.push(next);
    }
    let mut upper = vec![Subgroup::trivial(g)];
    for i in 1..=g.rank() {
        let z = upper_central(g, i);
        if z.order() == upper.last().unwrap().order() {
            break;
        }
        upper.push(z);
    }
    let phi = frattini(g);
    let chain = refine_chain(g);
    SeriesReport {
        group: g.name().to_string(),
        order: g.order(),
        d: min_generators(g),
        center: SubgroupSummary::of(g, &center(g)),
        frattini_order: phi.order(),
        frattini: SubgroupSummary::of(g, &phi),
        agemo: SubgroupSummary::of(g, &agemo(g)),
        gamma3_agemo: SubgroupSummary::of(g, &gamma3_agemo(g)),
        lower_central: lower.iter().map(|h| SubgroupSummary::of(g, h)).collect(),
        upper_central: upper.iter().map(|h| SubgroupSummary::of(g, h)).collect(),
        t: chain.t(),
        chain: chain.links().iter().map(|h| SubgroupSummary::of(g, h)).collect(),
        hypothesis: hypothesis_report(g),
    }
}
