use std::sync::Arc;

use super::certificate::{inner_scan_label, CertificateEvidence, NonInnerCertificate};
use super::{order_of, Endo};
use crate::deriv::{derivation_space, derivation_space_mod, Derivation};
use crate::error::{Error, Result};
use crate::field::{Matrix, Subspace};
use crate::fpmod::{FpModule, Realization};
use crate::group::Group;
use crate::oracle::{self, DEFAULT_ORACLE_CAP};
use crate::pc::Element;
use crate::series::{self, hypothesis_report, refine_chain, Subgroup};

/// Above this many elements a derivation space is sampled rather than listed.
const LIST_LIMIT: usize = 6561;

#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub certificate: NonInnerCertificate,
    pub trace: Vec<String>,
    pub evidence: CertificateEvidence,
}

fn z_of(g: &Group, h: &Subgroup) -> Subgroup {
    series::centralizer(g, h).intersect(g, h)
}

fn gens_of(g: &Group, h: &Subgroup) -> Vec<Element> {
    h.generator_elements(g)
}

/// Vectors of `upper` outside `lower`, complement representatives first.
fn candidate_vectors(upper: &Subspace, lower: &Subspace) -> Vec<Vec<u32>> {
    let reps = upper.complement_in(lower);
    let mut out = reps.clone();
    let size = (upper.p() as usize).checked_pow(upper.dim() as u32).unwrap_or(usize::MAX);
    if size <= LIST_LIMIT {
        out.extend(upper.elements().into_iter().filter(|v| !lower.contains(v)));
    } else {
        let p = upper.p();
        for r in &reps {
            for l in lower.basis() {
                for c in 1..p {
                    out.push(r.iter().zip(l).map(|(a, b)| (a + c * b) % p).collect());
                }
            }
            for s in &reps {
                if s != r {
                    out.push(r.iter().zip(s).map(|(a, b)| (a + b) % p).collect());
                }
            }
        }
    }
    let mut seen = std::collections::HashSet::new();
    out.retain(|v| seen.insert(v.clone()));
    out
}

/// `g -> g δ(g)` if it is a non-inner automorphism of order `p`.
fn try_candidate(g: &Group, module: &Arc<FpModule>, real: &Realization, flat: &[u32]) -> Option<Endo> {
    let delta = Derivation::from_flat(Arc::clone(module), flat).ok()?;
    let phi = Endo::induce(g, &delta, real).ok()?;
    if phi.is_identity() || !phi.is_automorphism(g) {
        return None;
    }
    if order_of(g, &phi, Some((&delta, real))).ok()? != g.prime() as u64 {
        return None;
    }
    (!phi.is_inner(g)).then_some(phi)
}

fn first_moved(g: &Group, phi: &Endo, pool: &[usize]) -> Option<usize> {
    pool.iter().copied().find(|&x| phi.apply(g, x) != x)
}

fn fixed_point_generators(g: &Group, phi: &Endo) -> Vec<Element> {
    let imgs = phi.image_indices(g);
    let members: Vec<bool> = (0..g.order())
        .map(|x| g.element(x).letters().iter().fold(0usize, |acc, &k| g.mul(acc, imgs[k])) == x)
        .collect();
    let fixed = Subgroup::from_members(g, members).expect("fixed points form a subgroup");
    fixed.generator_elements(g)
}

struct Found {
    phi: Endo,
    path: String,
    fixed: Vec<Element>,
    moved: usize,
}

fn certificate(g: &Group, found: Found) -> NonInnerCertificate {
    NonInnerCertificate {
        group: g.name().to_string(),
        path: found.path,
        gen_images: found.phi.images().to_vec(),
        order: g.prime() as u64,
        fixed_subgroup: found.fixed,
        moved: g.element(found.moved),
        inner_scan: inner_scan_label(g.order()),
    }
}

/// Submodules tried for `W_1`: `W` itself, then cyclic submodules, largest first.
fn submodule_candidates(m: &FpModule) -> Vec<Subspace> {
    let full = Subspace::full(m.prime(), m.dim());
    let mut out = vec![full.clone()];
    if full.elements().len() <= 729 {
        for v in full.elements() {
            if v.iter().all(|&c| c == 0) {
                continue;
            }
            let s = m.spin(&[v]);
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    out.sort_by_key(|s| std::cmp::Reverse(s.dim()));
    out
}

/// Normal subgroups of `G` that are maximal in `phi` and contain `floor`.
fn normal_maximal_in(g: &Group, phi: &Subgroup, floor: &Subgroup) -> Vec<Subgroup> {
    let p = g.prime();
    let k = series::commutator_subgroup(g, phi, &Subgroup::whole(g));
    let powers: Vec<usize> = phi.elements().iter().map(|&x| g.pow(x, p as u64)).collect();
    let mut seeds = k.generators().to_vec();
    seeds.extend(powers);
    seeds.extend_from_slice(floor.generators());
    let base = Subgroup::generated(g, &seeds);
    if base.order() == phi.order() {
        return vec![];
    }
    // Basis of phi / base.
    let mut basis = Vec::new();
    let mut q = base.clone();
    while let Some(x) = phi.witness_outside(&q) {
        basis.push(x);
        let mut gens = q.generators().to_vec();
        gens.push(x);
        q = Subgroup::generated(g, &gens);
    }
    let dim = basis.len();
    let functionals = Subspace::full(p, dim).elements();
    let mut out = Vec::new();
    for f in functionals {
        // One functional per line: leading coefficient 1.
        match f.iter().find(|&&c| c != 0) {
            Some(1) => {}
            _ => continue,
        }
        let kernel = Subspace::span(p, dim, Matrix::from_rows(p, dim, &[f.clone()]).right_nullspace());
        let mut gens = base.generators().to_vec();
        for v in kernel.basis() {
            gens.push(v.iter().zip(&basis).fold(0usize, |acc, (&e, &b)| g.mul(acc, g.pow(b, e as u64))));
        }
        let h = Subgroup::generated(g, &gens);
        if h.is_normal(g) && h.order() * p as usize == phi.order() {
            out.push(h);
        }
    }
    out
}

fn main_branch(g: &Group, trace: &mut Vec<String>) -> Result<Option<Found>> {
    let chain = refine_chain(g);
    let phi_sub = series::frattini(g);
    for i in 0..chain.t() {
        let pi = chain.link(i);
        let pnext = chain.link(i + 1);
        let w = series::omega1(g, &z_of(g, pi))?;
        let real_w = Realization::new(g, &w)?;
        let pi_gens = gens_of(g, pi);
        let pnext_gens = gens_of(g, pnext);
        let space = derivation_space_mod(real_w.module(), &pi_gens)?;
        trace.push(format!("i={i}: |P_i|={}, |P_(i+1)|={}, dim W={}, dim H1(G/P_i, W)={}", pi.order(), pnext.order(), w.log_order(g.prime()), space.h1_dim()));
        if space.h1_dim() >= 2 {
            for v in candidate_vectors(space.der_subspace(), space.ider_subspace()) {
                if let Some(phi) = try_candidate(g, real_w.module(), &real_w, &v) {
                    let moved = first_moved(g, &phi, &g.gens()).expect("non-identity map moves a generator");
                    trace.push(format!("i={i}: class representative gives a non-inner automorphism"));
                    return Ok(Some(Found { phi, path: format!("Theorem 01 at i={i} (Lemma cc)"), fixed: pi_gens, moved }));
                }
            }
            trace.push(format!("i={i}: every class representative is inner or of the wrong order"));
        }
        for s in submodule_candidates(real_w.module()) {
            let sub = real_w.subgroup_of(g, &s);
            let real = Realization::new(g, &sub)?;
            let upper = derivation_space_mod(real.module(), &pnext_gens)?;
            let lower = derivation_space_mod(real.module(), &pi_gens)?;
            for v in candidate_vectors(upper.der_subspace(), lower.der_subspace()) {
                if let Some(phi) = try_candidate(g, real.module(), &real, &v) {
                    let moved = first_moved(g, &phi, pi.elements()).or_else(|| first_moved(g, &phi, &g.gens())).expect("moves something");
                    trace.push(format!("i={i}: derivation vanishing on P_(i+1) but not on P_i, W_1 of order {}", sub.order()));
                    return Ok(Some(Found { phi, path: format!("Theorem 01 at i={i}"), fixed: pnext_gens, moved }));
                }
            }
        }
        trace.push(format!("i={i}: no admissible derivation in Der(G/P_(i+1), W_1) \\ Der(G/P_i, W_1)"));
        // Searches over C_W(Φ) and its extensions, for H maximal in Φ.
        let cw = series::centralizer(g, &phi_sub).intersect(g, &w);
        let mut modules = vec![cw.clone()];
        let cz = z_of(g, &series::centralizer(g, pnext));
        if let Ok(om) = series::omega1(g, &cz) {
            for &x in om.elements() {
                if cw.contains(x) {
                    continue;
                }
                let mut gens = cw.generators().to_vec();
                gens.push(x);
                let u = Subgroup::generated(g, &gens);
                if u.is_normal(g) && u.is_elementary_abelian(g) && !modules.contains(&u) {
                    modules.push(u);
                }
            }
        }
        for h in normal_maximal_in(g, &phi_sub, pnext) {
            let h_gens = gens_of(g, &h);
            for u in &modules {
                if u.is_trivial() {
                    continue;
                }
                let real = Realization::new(g, u)?;
                let space = derivation_space_mod(real.module(), &h_gens)?;
                for v in candidate_vectors(space.der_subspace(), space.ider_subspace()) {
                    if let Some(phi) = try_candidate(g, real.module(), &real, &v) {
                        let moved = first_moved(g, &phi, &g.gens()).expect("moves a generator");
                        trace.push(format!("i={i}: derivation into a module of order {} vanishing on a maximal subgroup of Φ", u.order()));
                        return Ok(Some(Found { phi, path: format!("Theorem 011 at i={i}"), fixed: h_gens, moved }));
                    }
                }
            }
        }
        trace.push(format!("i={i}: searches over C_W(Φ) found nothing"));
    }
    Ok(None)
}

/// Elementary abelian normal subgroups worth trying in the fallback search.
fn fallback_modules(g: &Group) -> Vec<Subgroup> {
    let mut out: Vec<Subgroup> = Vec::new();
    let mut push = |s: Subgroup| {
        if !s.is_trivial() && s.is_normal(g) && s.is_elementary_abelian(g) && !out.contains(&s) {
            out.push(s);
        }
    };
    let phi = series::frattini(g);
    let mut sources = vec![Subgroup::whole(g), phi.clone(), series::centralizer(g, &phi)];
    sources.extend(refine_chain(g).links().iter().cloned());
    for s in &sources {
        if let Ok(o) = series::omega1(g, &z_of(g, s)) {
            push(o);
        }
    }
    if g.order() <= DEFAULT_ORACLE_CAP {
        let mut all = series::normal_subgroups(g);
        all.reverse();
        for s in all {
            push(s);
        }
    }
    out
}

fn derivation_search(g: &Group, trace: &mut Vec<String>) -> Result<Option<Found>> {
    for a in fallback_modules(g) {
        let real = Realization::new(g, &a)?;
        let space = derivation_space(real.module())?;
        for v in candidate_vectors(space.der_subspace(), space.ider_subspace()) {
            if let Some(phi) = try_candidate(g, real.module(), &real, &v) {
                trace.push(format!("derivation into an elementary abelian normal subgroup of order {}", a.order()));
                let moved = first_moved(g, &phi, &g.gens()).expect("moves a generator");
                let fixed = fixed_point_generators(g, &phi);
                return Ok(Some(Found { phi, path: String::new(), fixed, moved }));
            }
        }
    }
    Ok(None)
}

fn fallback(g: &Group, reason: &str, trace: &mut Vec<String>, oracle_cap: usize) -> Result<Found> {
    if let Some(mut f) = derivation_search(g, trace)? {
        f.path = format!("oracle-fallback ({reason}; derivation search)");
        return Ok(f);
    }
    trace.push("derivation search found nothing".into());
    let images = oracle::find_noninner_order_p(g, oracle_cap)?
        .ok_or_else(|| Error::Verification("no non-inner automorphism of order p exists".into()))?;
    let phi = Endo::new(g.presentation_arc(), images)?;
    let moved = first_moved(g, &phi, &g.gens()).expect("moves a generator");
    let fixed = fixed_point_generators(g, &phi);
    trace.push("exhaustive automorphism search".into());
    Ok(Found { phi, path: format!("oracle-fallback ({reason}; exhaustive search)"), fixed, moved })
}

/// Builds and re-verifies a non-inner automorphism of order `p`.
pub fn construct_noninner(g: &Group) -> Result<PipelineOutcome> {
    construct_noninner_with_cap(g, DEFAULT_ORACLE_CAP)
}

pub fn construct_noninner_with_cap(g: &Group, oracle_cap: usize) -> Result<PipelineOutcome> {
    if g.is_abelian() {
        return Err(Error::OutOfScope("abelian groups are not covered".into()));
    }
    let report = hypothesis_report(g);
    let t = refine_chain(g).t();
    let mut trace = vec![format!(
        "|G|={}, d(Z)={}, T={}, C_G(Φ)≤Φ: {}, Ω_1(Z)≤γ_3G^p: {}",
        g.order(),
        report.center_rank,
        t,
        report.frattini_self_centralizing.holds,
        report.omega1_center_in_n.holds
    )];
    let reason = if !report.center_cyclic {
        Some("center not cyclic")
    } else if t == 0 {
        Some("powerful")
    } else if !report.frattini_self_centralizing.holds {
        Some("Lemma a1")
    } else if !report.omega1_center_in_n.holds {
        Some("Lemma 12")
    } else {
        None
    };
    let found = match reason {
        Some(r) => {
            trace.push(format!("branch: {r}"));
            fallback(g, r, &mut trace, oracle_cap)?
        }
        None => match main_branch(g, &mut trace)? {
            Some(f) => f,
            None => fallback(g, "main branch exhausted", &mut trace, oracle_cap)?,
        },
    };
    let certificate = certificate(g, found);
    let evidence = certificate.verify(g)?;
    trace.push(format!("certificate verified: {}", certificate.path));
    Ok(PipelineOutcome { certificate, trace, evidence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn group(name: &str) -> Group {
        Group::from_presentation(catalog::parse(name).unwrap()).unwrap()
    }

    #[test]
    fn heisenberg_takes_the_fallback() {
        let g = group("heisenberg:3");
        let out = construct_noninner(&g).unwrap();
        assert!(out.certificate.path.starts_with("oracle-fallback (Lemma a1"), "{}", out.certificate.path);
    }

    #[test]
    fn meta_is_powerful() {
        let g = group("meta:3");
        let out = construct_noninner(&g).unwrap();
        assert!(out.certificate.path.starts_with("oracle-fallback (powerful"), "{}", out.certificate.path);
    }

    #[test]
    fn maxclass5_uses_the_main_branch() {
        let g = group("maxclass5:3");
        let out = construct_noninner(&g).unwrap();
        assert!(out.certificate.path.starts_with("Theorem 01"), "{}: {:?}", out.certificate.path, out.trace);
    }

    #[test]
    fn abelian_is_out_of_scope() {
        assert!(matches!(construct_noninner(&group("elem:3,2")), Err(Error::OutOfScope(_))));
    }
}
