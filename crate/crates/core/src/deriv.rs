//! Derivations `δ(xy) = δ(x)^y + δ(y)`, inner derivations and `H^1`.
//!
//! A derivation is stored by its values on the pc generators. Der(G, M) is
//! the solution space of the linear system obtained by expanding each
//! defining relation `lhs = rhs` along both words.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{is_zero, vec_add, vec_scale, vec_sub, Matrix, Subspace};
use crate::fpmod::{FpModule, Realization};
use crate::group::{subgroup_presentation, Group, GroupHom};
use crate::pc::Element;
use crate::series::Subgroup;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    module: Arc<FpModule>,
    images: Vec<Vec<u32>>,
}

/// Value of the derivation with generator images `images` on a word.
fn eval_letters(module: &FpModule, images: &[Vec<u32>], letters: &[usize]) -> Vec<u32> {
    let p = module.prime();
    letters.iter().fold(module.zero_vector(), |acc, &k| vec_add(&module.action(k).apply(&acc), &images[k], p))
}

impl Derivation {
    /// Checks every defining relation.
    pub fn new(module: Arc<FpModule>, images: Vec<Vec<u32>>) -> Result<Self> {
        let p = module.prime();
        if images.len() != module.group().rank() {
            return Err(Error::DimensionMismatch(format!(
                "{} images for {} generators",
                images.len(),
                module.group().rank()
            )));
        }
        if images.iter().any(|v| v.len() != module.dim() || v.iter().any(|&e| e >= p)) {
            return Err(Error::DimensionMismatch(format!("images must be vectors of length {}", module.dim())));
        }
        for rel in module.group().relations() {
            let l = eval_letters(&module, &images, &rel.lhs);
            let r = eval_letters(&module, &images, &rel.rhs);
            if l != r {
                return Err(Error::NotDerivation(format!(
                    "relation {:?} = {:?} gives {l:?} vs {r:?}",
                    rel.lhs, rel.rhs
                )));
            }
        }
        Ok(Derivation { module, images })
    }

    pub fn from_flat(module: Arc<FpModule>, flat: &[u32]) -> Result<Self> {
        let m = module.dim();
        if flat.len() != m * module.group().rank() {
            return Err(Error::DimensionMismatch("flat derivation has the wrong length".into()));
        }
        let images = if m == 0 {
            vec![Vec::new(); module.group().rank()]
        } else {
            flat.chunks(m).map(|c| c.to_vec()).collect()
        };
        Self::new(module, images)
    }

    pub fn zero(module: Arc<FpModule>) -> Self {
        let images = vec![module.zero_vector(); module.group().rank()];
        Derivation { module, images }
    }

    pub fn module(&self) -> &Arc<FpModule> {
        &self.module
    }

    pub fn images(&self) -> &[Vec<u32>] {
        &self.images
    }

    pub fn flat(&self) -> Vec<u32> {
        self.images.concat()
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(|v| is_zero(v))
    }

    /// `δ(x)` along the normal form of `x`.
    pub fn evaluate(&self, x: &Element) -> Result<Vec<u32>> {
        if x.exponents().len() != self.module.group().rank() {
            return Err(Error::MixedGroups);
        }
        Ok(eval_letters(&self.module, &self.images, &x.letters()))
    }

    pub fn eval(&self, x: &Element) -> Vec<u32> {
        eval_letters(&self.module, &self.images, &x.letters())
    }

    pub fn add(&self, other: &Derivation) -> Result<Derivation> {
        if self.module != other.module {
            return Err(Error::ModuleMismatch);
        }
        let p = self.module.prime();
        let images = self.images.iter().zip(&other.images).map(|(a, b)| vec_add(a, b, p)).collect();
        Ok(Derivation { module: Arc::clone(&self.module), images })
    }

    pub fn scale(&self, c: u32) -> Derivation {
        let p = self.module.prime();
        let images = self.images.iter().map(|a| vec_scale(a, c, p)).collect();
        Derivation { module: Arc::clone(&self.module), images }
    }

    pub fn vanishes_on(&self, gens: &[Element]) -> bool {
        gens.iter().all(|x| is_zero(&self.eval(x)))
    }

    /// Restriction to a subgroup, re-presented with its own pc generators.
    pub fn restrict(&self, g: &Group, h: &Subgroup) -> Result<(Derivation, GroupHom)> {
        if *g.presentation() != **self.module.group() {
            return Err(Error::NotSubgroup);
        }
        let (_, inclusion) = subgroup_presentation(g, h.members(), "H")?;
        let module = Arc::new(self.module.inflate(&inclusion)?);
        let images = inclusion.images().iter().map(|x| self.eval(x)).collect();
        Ok((Derivation::new(module, images)?, inclusion))
    }

    /// Inflation along `π: G -> G/N`; the result vanishes on `N`.
    pub fn inflate(&self, pi: &GroupHom) -> Result<Derivation> {
        let module = Arc::new(self.module.inflate(pi)?);
        let images = pi.images().iter().map(|x| self.eval(x)).collect();
        Derivation::new(module, images)
    }
}

/// `δ_m(g) = m^g - m`.
pub fn inner_derivation(module: &Arc<FpModule>, m: &[u32]) -> Derivation {
    let p = module.prime();
    let images = module.actions().iter().map(|a| vec_sub(&a.apply(m), m, p)).collect();
    Derivation { module: Arc::clone(module), images }
}

/// Coefficient matrix `C_w` with `δ(w) = X C_w` for the flattened unknown
/// `X = (δ(g_1), ..., δ(g_n))`.
fn word_coefficients(module: &FpModule, letters: &[usize]) -> Matrix {
    let p = module.prime();
    let m = module.dim();
    let n = module.group().rank();
    let mut c = Matrix::zeros(p, n * m, m);
    let mut suffix = module.identity_matrix();
    for &k in letters.iter().rev() {
        for r in 0..m {
            for col in 0..m {
                let v = suffix.get(r, col);
                if v != 0 {
                    let cur = c.get(k * m + r, col);
                    c.set(k * m + r, col, (cur + v) % p);
                }
            }
        }
        suffix = module.action(k).mul(&suffix);
    }
    c
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct H1Dims {
    pub module_dim: usize,
    pub fixed_dim: usize,
    pub der_dim: usize,
    pub ider_dim: usize,
    pub h1_dim: usize,
}

/// `Der`, `Ider` and coset representatives of `H^1`, optionally relative to a
/// normal subgroup `N` (derivations vanishing on `N`, i.e. `Der(G/N, C_M(N))`).
#[derive(Clone, Debug)]
pub struct CohomologySpace {
    module: Arc<FpModule>,
    der: Subspace,
    ider: Subspace,
    reps: Vec<Vec<u32>>,
    fixed_dim: usize,
}

impl CohomologySpace {
    pub fn module(&self) -> &Arc<FpModule> {
        &self.module
    }

    pub fn der_dim(&self) -> usize {
        self.der.dim()
    }

    pub fn ider_dim(&self) -> usize {
        self.ider.dim()
    }

    pub fn h1_dim(&self) -> usize {
        self.der.dim() - self.ider.dim()
    }

    pub fn der_subspace(&self) -> &Subspace {
        &self.der
    }

    pub fn ider_subspace(&self) -> &Subspace {
        &self.ider
    }

    fn wrap(&self, flat: &[u32]) -> Derivation {
        Derivation::from_flat(Arc::clone(&self.module), flat).expect("basis vectors are derivations")
    }

    pub fn der_basis(&self) -> Vec<Derivation> {
        self.der.basis().iter().map(|v| self.wrap(v)).collect()
    }

    pub fn ider_basis(&self) -> Vec<Derivation> {
        self.ider.basis().iter().map(|v| self.wrap(v)).collect()
    }

    /// Echelon complement of `Ider` in `Der`: one derivation per `H^1` basis class.
    pub fn representatives(&self) -> Vec<Derivation> {
        self.reps.iter().map(|v| self.wrap(v)).collect()
    }

    pub fn contains(&self, d: &Derivation) -> bool {
        self.der.contains(&d.flat())
    }

    pub fn is_inner(&self, d: &Derivation) -> bool {
        self.ider.contains(&d.flat())
    }

    pub fn dims(&self) -> H1Dims {
        H1Dims {
            module_dim: self.module.dim(),
            fixed_dim: self.fixed_dim,
            der_dim: self.der_dim(),
            ider_dim: self.ider_dim(),
            h1_dim: self.h1_dim(),
        }
    }

    /// Every element of `Der` (use only when `p^dim` is small).
    pub fn all_derivations(&self) -> Vec<Derivation> {
        self.der.elements().iter().map(|v| self.wrap(v)).collect()
    }
}

pub fn derivation_space(module: &Arc<FpModule>) -> Result<CohomologySpace> {
    derivation_space_mod(module, &[])
}

/// Derivations vanishing on the normal subgroup generated by `kernel`.
pub fn derivation_space_mod(module: &Arc<FpModule>, kernel: &[Element]) -> Result<CohomologySpace> {
    let p = module.prime();
    let m = module.dim();
    let n = module.group().rank();
    if m > crate::fpmod::DEFAULT_MODULE_CAP {
        return Err(Error::TooLarge { size: m as u128, cap: crate::fpmod::DEFAULT_MODULE_CAP as u128 });
    }
    for x in kernel {
        if x.exponents().len() != n {
            return Err(Error::MixedGroups);
        }
    }
    let unknowns = n * m;
    let fixed_n = module.fixed_points(kernel);
    let fixed_g = module.invariants();
    if m == 0 {
        let zero = Subspace::zero(p, 0);
        return Ok(CohomologySpace { module: Arc::clone(module), der: zero.clone(), ider: zero, reps: vec![], fixed_dim: 0 });
    }
    let mut system: Option<Matrix> = None;
    let mut push = |block: Matrix| {
        system = Some(match system.take() {
            None => block,
            Some(s) => s.hstack(&block),
        });
    };
    for rel in module.group().relations() {
        push(word_coefficients(module, &rel.lhs).sub(&word_coefficients(module, &rel.rhs)));
    }
    for x in kernel {
        push(word_coefficients(module, &x.letters()));
    }
    let der = match system {
        Some(s) => Subspace::span(p, unknowns, s.left_nullspace()),
        None => Subspace::full(p, unknowns),
    };
    let ider = Subspace::span(p, unknowns, fixed_n.basis().iter().map(|v| inner_derivation(module, v).flat()));
    let reps = der.complement_in(&ider);
    Ok(CohomologySpace { module: Arc::clone(module), der, ider, reps, fixed_dim: fixed_g.dim() })
}

/// Finds a derivation in `space` with the prescribed values on some generators.
pub fn extend_partial(space: &CohomologySpace, prescribed: &[(usize, Vec<u32>)]) -> Result<Option<Derivation>> {
    let module = space.module();
    let p = module.prime();
    let m = module.dim();
    let basis = space.der_subspace().basis();
    let r = basis.len();
    // Equations: Σ λ_i b_i[k m + c] = v[c].
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for (k, v) in prescribed {
        if *k >= module.group().rank() || v.len() != m {
            return Err(Error::DimensionMismatch("prescribed value has the wrong shape".into()));
        }
        for c in 0..m {
            let mut row: Vec<u32> = basis.iter().map(|b| b[k * m + c]).collect();
            row.push(v[c] % p);
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return Ok(Some(Derivation::zero(Arc::clone(module))));
    }
    let mut aug = Matrix::from_rows(p, r + 1, &rows);
    let pivots = aug.rref_in_place();
    if pivots.last() == Some(&r) {
        return Ok(None);
    }
    let mut lambda = vec![0u32; r];
    for (row, &c) in pivots.iter().enumerate() {
        lambda[c] = aug.get(row, r);
    }
    let mut flat = vec![0u32; module.group().rank() * m];
    for (l, b) in lambda.iter().zip(basis) {
        if *l != 0 {
            flat = vec_add(&flat, &vec_scale(b, *l, p), p);
        }
    }
    Derivation::from_flat(Arc::clone(module), &flat).map(Some)
}

/// For `L_1 ≤ Z(G)` acting trivially on `M`, every derivation takes values in `C_M(G)` on `L_1`.
pub fn central_restriction_check(g: &Group, delta: &Derivation, l1: &Subgroup) -> Result<bool> {
    let z = crate::series::center(g);
    if !l1.is_subgroup_of(&z) {
        return Err(Error::InvalidModule("L1 is not central".into()));
    }
    let m = delta.module();
    let fixed = m.invariants();
    for &y in l1.elements() {
        let e = g.element(y);
        if !m.element_matrix(&e).is_identity() {
            return Err(Error::InvalidModule("L1 does not act trivially".into()));
        }
        if !fixed.contains(&delta.eval(&e)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Iterates of a derivation into a realized module, as maps on element indices.
#[derive(Clone, Debug)]
pub struct DerivationPowers {
    /// `powers[i][x] = δ^i(x)`; `powers[0]` is the identity map.
    pub powers: Vec<Vec<usize>>,
    /// Least `k ≥ 1` with `δ^k` identically trivial, if reached.
    pub nilpotency: Option<usize>,
}

/// `δ^0 = id`, `δ^i(g) = δ(δ^{i-1}(g))` with module values read back into `G`.
pub fn derivation_power(g: &Group, delta: &Derivation, real: &Realization, max: usize) -> Result<DerivationPowers> {
    if delta.module() != real.module() {
        return Err(Error::ModuleMismatch);
    }
    let mut powers = vec![(0..g.order()).collect::<Vec<_>>()];
    let mut nilpotency = None;
    for i in 1..=max {
        let prev = powers.last().unwrap();
        let next: Vec<usize> = prev.iter().map(|&x| real.embed(g, &delta.eval(&g.element(x)))).collect();
        let done = next.iter().all(|&y| y == 0);
        powers.push(next);
        if done {
            nilpotency = Some(i);
            break;
        }
    }
    Ok(DerivationPowers { powers, nilpotency })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::fpmod::{self, DEFAULT_MODULE_CAP};
    use crate::group::quotient;
    use crate::series;

    fn group(name: &str) -> Group {
        Group::from_presentation(catalog::parse(name).unwrap()).unwrap()
    }

    #[test]
    fn c3_trivial() {
        let g = group("cyclic:3,1");
        let m = Arc::new(FpModule::trivial(g.presentation_arc(), 1));
        let s = derivation_space(&m).unwrap();
        assert_eq!((s.der_dim(), s.ider_dim(), s.h1_dim()), (1, 0, 1));
    }

    #[test]
    fn heisenberg_center() {
        let g = group("heisenberg:3");
        let r = fpmod::Realization::new(&g, &series::center(&g)).unwrap();
        let s = derivation_space(r.module()).unwrap();
        assert_eq!((s.der_dim(), s.ider_dim(), s.h1_dim()), (2, 0, 2));
    }

    #[test]
    fn hom_formula_for_d() {
        for (d, p) in [(2usize, 3u32), (3, 3), (2, 5)] {
            let g = group(&format!("d:{d},{p}"));
            let phi = series::frattini(&g);
            let m = Arc::new(FpModule::trivial(g.presentation_arc(), 1));
            let s = derivation_space_mod(&m, &phi.generator_elements(&g)).unwrap();
            assert_eq!(s.h1_dim(), d);
        }
    }

    #[test]
    fn inner_derivations() {
        let g = group("cyclic:3,1");
        let m = Arc::new(FpModule::regular(&g, DEFAULT_MODULE_CAP).unwrap());
        assert!(inner_derivation(&m, &[0, 0, 0]).is_zero());
        assert!(inner_derivation(&m, &[1, 1, 1]).is_zero());
        let d = inner_derivation(&m, &[1, 0, 0]);
        assert_eq!(d.images()[0], vec![2, 1, 0]);
        let s = derivation_space(&m).unwrap();
        assert_eq!((s.der_dim(), s.ider_dim(), s.h1_dim()), (2, 2, 0));
    }

    #[test]
    fn cocycle_identity_on_heisenberg() {
        let g = group("heisenberg:3");
        let r = fpmod::Realization::new(&g, &series::center(&g)).unwrap();
        let s = derivation_space(r.module()).unwrap();
        let p = 3;
        for d in s.der_basis() {
            for x in 0..27 {
                for y in 0..27 {
                    let (ex, ey) = (g.element(x), g.element(y));
                    let lhs = d.evaluate(&g.element(g.mul(x, y))).unwrap();
                    let rhs = vec_add(&r.module().act(&d.eval(&ex), &ey), &d.eval(&ey), p);
                    assert_eq!(lhs, rhs);
                }
            }
            assert!(is_zero(&d.eval(&g.element(0))));
        }
    }

    #[test]
    fn inflation_dimension() {
        let g = group("heisenberg:3");
        let z = series::center(&g);
        let (q, pi) = quotient(&g, z.members()).unwrap();
        let qm = Arc::new(FpModule::trivial(Arc::new(q), 1));
        let on_q = derivation_space(&qm).unwrap();
        let inflated: Vec<Derivation> = on_q.der_basis().iter().map(|d| d.inflate(&pi).unwrap()).collect();
        let r = fpmod::Realization::new(&g, &z).unwrap();
        let vanishing = derivation_space_mod(r.module(), &z.generator_elements(&g)).unwrap();
        assert_eq!(inflated.len(), 2);
        assert_eq!(vanishing.der_dim(), 2);
        for d in &inflated {
            assert!(d.vanishes_on(&z.generator_elements(&g)));
        }
        // N = G: only the zero derivation vanishes on all of G
        let all = derivation_space_mod(r.module(), &g.presentation().generators()).unwrap();
        assert_eq!(all.der_dim(), 0);
    }

    #[test]
    fn restriction_of_commutator_derivation() {
        let dp = Arc::new(catalog::parse("d:2,3").unwrap());
        let g = Group::new(Arc::clone(&dp)).unwrap();
        let a = Arc::new(fpmod::module_a(&dp).unwrap());
        let delta = fpmod::commutator_derivation(&a, 0, 1).unwrap();
        let y1 = g.gen(0);
        let y2 = g.gen(1);
        let c = g.element(g.comm(y1, y2));
        assert_eq!(delta.eval(&c), vec![2, 0, 0]);
        let phi = series::frattini(&g);
        let (res, inc) = delta.restrict(&g, &phi).unwrap();
        assert_eq!(inc.images().len(), 1);
        assert!(!res.is_zero());
        let zero = Derivation::zero(Arc::clone(&a));
        assert!(zero.restrict(&g, &phi).unwrap().0.is_zero());
    }

    #[test]
    fn central_values_are_fixed() {
        let dp = Arc::new(catalog::parse("d:2,3").unwrap());
        let g = Group::new(Arc::clone(&dp)).unwrap();
        let a = Arc::new(fpmod::module_a(&dp).unwrap());
        let z = series::center(&g);
        for d in derivation_space(&a).unwrap().der_basis() {
            assert!(central_restriction_check(&g, &d, &z).unwrap());
        }
    }

    #[test]
    fn extend_prescribed_values() {
        let dp = Arc::new(catalog::parse("d:2,3").unwrap());
        let a = Arc::new(fpmod::module_a(&dp).unwrap());
        let space = derivation_space(&a).unwrap();
        // any values on y1, y2 extend
        for v1 in [[1u32, 2, 0], [0, 0, 1]] {
            for v2 in [[0u32, 1, 1], [2, 2, 2]] {
                let d = extend_partial(&space, &[(0, v1.to_vec()), (1, v2.to_vec())]).unwrap().unwrap();
                assert_eq!(d.images()[0], v1.to_vec());
                assert_eq!(d.images()[1], v2.to_vec());
            }
        }
    }

    #[test]
    fn derivation_square_vanishes_on_heisenberg() {
        let g = group("heisenberg:3");
        let r = fpmod::Realization::new(&g, &series::center(&g)).unwrap();
        for d in derivation_space(r.module()).unwrap().der_basis() {
            let pw = derivation_power(&g, &d, &r, 5).unwrap();
            assert_eq!(pw.nilpotency, Some(2));
        }
    }

    #[test]
    fn rejects_non_derivation() {
        let g = group("heisenberg:3");
        let m = Arc::new(FpModule::trivial(g.presentation_arc(), 1));
        // δ(c) must be 0 for a trivial module since c is a commutator.
        let err = Derivation::new(m, vec![vec![0], vec![0], vec![1]]).unwrap_err();
        assert!(matches!(err, Error::NotDerivation(_)));
    }
}
