//! F_p(G)-modules given by one matrix per pc generator, acting on row
//! vectors from the right.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::deriv::{self, Derivation};
use crate::error::{Error, Result};
use crate::field::{is_zero, Matrix, Subspace};
use crate::group::{Group, GroupHom};
use crate::pc::{Element, PcPresentation};
use crate::series::Subgroup;

pub const DEFAULT_MODULE_CAP: usize = 1 << 10;

#[derive(Clone, Debug)]
pub struct FpModule {
    group: Arc<PcPresentation>,
    action: Vec<Matrix>,
    labels: Vec<String>,
}

/// Equal when the acting group and the matrices agree; labels are ignored.
impl PartialEq for FpModule {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.action == other.action && self.dim() == other.dim()
    }
}

impl Eq for FpModule {}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModuleFile {
    pub dim: usize,
    pub action: BTreeMap<String, Vec<Vec<u32>>>,
}

impl FpModule {
    /// Checks shapes, invertibility and every defining relation of the group.
    pub fn new(group: Arc<PcPresentation>, action: Vec<Matrix>) -> Result<Self> {
        let dim = action.first().map(|a| a.rows()).unwrap_or(0);
        let labels = (1..=dim).map(|i| format!("e{i}")).collect();
        Self::with_labels(group, action, labels)
    }

    pub fn with_labels(group: Arc<PcPresentation>, action: Vec<Matrix>, labels: Vec<String>) -> Result<Self> {
        let p = group.prime();
        if action.len() != group.rank() {
            return Err(Error::InvalidModule(format!(
                "{} matrices for {} generators",
                action.len(),
                group.rank()
            )));
        }
        let dim = labels.len();
        for (k, a) in action.iter().enumerate() {
            if a.rows() != dim || a.cols() != dim || a.p() != p {
                return Err(Error::InvalidModule(format!("matrix for g{} has the wrong shape", k + 1)));
            }
        }
        let m = FpModule { group, action, labels };
        for rel in m.group.relations() {
            if m.word_matrix(&rel.lhs) != m.word_matrix(&rel.rhs) {
                return Err(Error::InvalidModule(format!("relation {:?} = {:?} fails", rel.lhs, rel.rhs)));
            }
        }
        // Relations force g^(p^k) = 1, so every A_g is invertible and unipotent;
        // check unipotence directly anyway.
        for (k, a) in m.action.iter().enumerate() {
            let n = a.sub(&Matrix::identity(p, dim));
            if dim > 0 && !n.pow(dim as u64).is_zero() {
                return Err(Error::InvalidModule(format!("g{} does not act unipotently", k + 1)));
            }
        }
        Ok(m)
    }

    pub fn trivial(group: Arc<PcPresentation>, dim: usize) -> Self {
        let p = group.prime();
        let action = vec![Matrix::identity(p, dim); group.rank()];
        Self::new(group, action).expect("trivial action satisfies every relation")
    }

    /// The right regular module: basis indexed by elements, `e_x g = e_{xg}`.
    pub fn regular(g: &Group, cap: usize) -> Result<Self> {
        if g.order() > cap {
            return Err(Error::TooLarge { size: g.order() as u128, cap: cap as u128 });
        }
        let p = g.prime();
        let n = g.order();
        let action = g
            .gens()
            .iter()
            .map(|&k| {
                let mut a = Matrix::zeros(p, n, n);
                for x in 0..n {
                    a.set(x, g.mul(x, k), 1);
                }
                a
            })
            .collect();
        let labels = (0..n).map(|x| format!("{}", g.element(x))).collect();
        Self::with_labels(g.presentation_arc(), action, labels)
    }

    pub fn group(&self) -> &Arc<PcPresentation> {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn prime(&self) -> u32 {
        self.group.prime()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn action(&self, k: usize) -> &Matrix {
        &self.action[k]
    }

    pub fn actions(&self) -> &[Matrix] {
        &self.action
    }

    pub fn identity_matrix(&self) -> Matrix {
        Matrix::identity(self.prime(), self.dim())
    }

    pub fn word_matrix(&self, letters: &[usize]) -> Matrix {
        letters.iter().fold(self.identity_matrix(), |acc, &k| acc.mul(&self.action[k]))
    }

    pub fn element_matrix(&self, x: &Element) -> Matrix {
        self.word_matrix(&x.letters())
    }

    /// `v^x`.
    pub fn act(&self, v: &[u32], x: &Element) -> Vec<u32> {
        x.letters().iter().fold(v.to_vec(), |acc, &k| self.action[k].apply(&acc))
    }

    pub fn zero_vector(&self) -> Vec<u32> {
        vec![0; self.dim()]
    }

    /// `C_M(H)` for `H` generated by `gens`.
    pub fn fixed_points(&self, gens: &[Element]) -> Subspace {
        let p = self.prime();
        let m = self.dim();
        if gens.is_empty() || m == 0 {
            return Subspace::full(p, m);
        }
        let id = self.identity_matrix();
        let mut stacked: Option<Matrix> = None;
        for h in gens {
            let block = self.element_matrix(h).sub(&id);
            stacked = Some(match stacked {
                None => block,
                Some(s) => s.hstack(&block),
            });
        }
        Subspace::span(p, m, stacked.unwrap().left_nullspace())
    }

    /// `C_M(G)`.
    pub fn invariants(&self) -> Subspace {
        self.fixed_points(&self.group.generators())
    }

    /// Fixed points of a subgroup of the acting group.
    pub fn fixed_points_of(&self, g: &Group, h: &Subgroup) -> Result<Subspace> {
        if *g.presentation() != *self.group {
            return Err(Error::NotSubgroup);
        }
        Ok(self.fixed_points(&h.generator_elements(g)))
    }

    pub fn is_submodule(&self, s: &Subspace) -> bool {
        s.basis().iter().all(|v| self.action.iter().all(|a| s.contains(&a.apply(v))))
    }

    /// Smallest submodule containing the given vectors.
    pub fn spin(&self, vectors: &[Vec<u32>]) -> Subspace {
        let p = self.prime();
        let mut s = Subspace::span(p, self.dim(), vectors.iter().cloned());
        let mut queue: Vec<Vec<u32>> = s.basis().to_vec();
        while let Some(v) = queue.pop() {
            for a in &self.action {
                let w = a.apply(&v);
                if !s.contains(&w) {
                    s = s.sum(&Subspace::span(p, self.dim(), [w.clone()]));
                    queue.push(w);
                }
            }
        }
        s
    }

    /// Action on a submodule, in the coordinates of its echelon basis.
    pub fn submodule(&self, s: &Subspace) -> Result<FpModule> {
        if !self.is_submodule(s) {
            return Err(Error::InvalidModule("subspace is not action-stable".into()));
        }
        let p = self.prime();
        let action = self
            .action
            .iter()
            .map(|a| {
                let rows: Vec<Vec<u32>> =
                    s.basis().iter().map(|v| s.coordinates(&a.apply(v)).expect("stable")).collect();
                Matrix::from_rows(p, s.dim(), &rows)
            })
            .collect();
        let labels = (1..=s.dim()).map(|i| format!("s{i}")).collect();
        Self::with_labels(Arc::clone(&self.group), action, labels)
    }

    /// Action on `M / S`, in coordinates of a complement basis.
    pub fn quotient(&self, s: &Subspace) -> Result<(FpModule, Vec<Vec<u32>>)> {
        if !self.is_submodule(s) {
            return Err(Error::InvalidModule("subspace is not action-stable".into()));
        }
        let p = self.prime();
        let full = Subspace::full(p, self.dim());
        let comp = full.complement_in(s);
        // Express v + S in the complement basis: reduce v against S + comp jointly.
        let mut basis = s.basis().to_vec();
        basis.extend(comp.iter().cloned());
        let joint = Matrix::from_rows(p, self.dim(), &basis).inverse().expect("basis of the ambient space");
        let k = s.dim();
        let coords = |v: &[u32]| -> Vec<u32> { joint.apply(v)[k..].to_vec() };
        let action = self
            .action
            .iter()
            .map(|a| {
                let rows: Vec<Vec<u32>> = comp.iter().map(|v| coords(&a.apply(v))).collect();
                Matrix::from_rows(p, comp.len(), &rows)
            })
            .collect();
        let labels = (1..=comp.len()).map(|i| format!("q{i}")).collect();
        Ok((Self::with_labels(Arc::clone(&self.group), action, labels)?, comp))
    }

    /// Pulls the module back along a homomorphism into its acting group.
    pub fn inflate(&self, pi: &GroupHom) -> Result<FpModule> {
        if **pi.target() != *self.group {
            return Err(Error::ModuleMismatch);
        }
        let action = pi.images().iter().map(|x| self.element_matrix(x)).collect();
        Self::with_labels(Arc::clone(pi.source()), action, self.labels.clone())
    }

    /// `K_1 ≤ K_2 ≤ ...`, `K_1 = C_M(G)`, `K_{i+1}/K_i = C_{M/K_i}(G)`; stops at `M`.
    pub fn socle_filtration(&self) -> Vec<Subspace> {
        let p = self.prime();
        let m = self.dim();
        let id = self.identity_matrix();
        let mut layers: Vec<Subspace> = Vec::new();
        let mut current = Subspace::zero(p, m);
        while current.dim() < m {
            let ann = current.annihilator();
            let mut stacked: Option<Matrix> = None;
            for a in &self.action {
                let block = a.sub(&id).mul(&ann);
                stacked = Some(match stacked {
                    None => block,
                    Some(s) => s.hstack(&block),
                });
            }
            let next = Subspace::span(p, m, stacked.unwrap().left_nullspace());
            if next.dim() == current.dim() {
                break;
            }
            layers.push(next.clone());
            current = next;
        }
        if m == 0 {
            layers.push(current);
        }
        layers
    }

    pub fn to_file(&self) -> ModuleFile {
        ModuleFile {
            dim: self.dim(),
            action: self.action.iter().enumerate().map(|(k, a)| ((k + 1).to_string(), a.to_rows())).collect(),
        }
    }

    pub fn from_file(group: Arc<PcPresentation>, file: &ModuleFile) -> Result<Self> {
        let p = group.prime();
        let mut action = Vec::with_capacity(group.rank());
        for k in 1..=group.rank() {
            let rows = file
                .action
                .get(&k.to_string())
                .ok_or_else(|| Error::InvalidModule(format!("missing matrix for generator {k}")))?;
            if rows.len() != file.dim || rows.iter().any(|r| r.len() != file.dim || r.iter().any(|&e| e >= p)) {
                return Err(Error::InvalidModule(format!("matrix for generator {k} is malformed")));
            }
            action.push(Matrix::from_rows(p, file.dim, rows));
        }
        if file.action.len() != group.rank() {
            return Err(Error::InvalidModule("unexpected generator keys".into()));
        }
        if group.rank() == 0 {
            return Ok(Self::trivial(group, file.dim));
        }
        Self::new(group, action)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("module serializes")
    }

    pub fn from_json(group: Arc<PcPresentation>, text: &str) -> Result<Self> {
        let file: ModuleFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(group, &file)
    }
}

/// Augmentation powers `J ⊇ J^2 ⊇ ...` of `F_p(G)` as subspaces of the
/// regular module (basis indexed by elements), ending with the zero space.
pub fn radical_powers(g: &Group) -> Vec<Subspace> {
    let p = g.prime();
    let n = g.order();
    let left_times = |x: usize, v: &[u32]| -> Vec<u32> {
        // (x - 1) * v
        let mut out = vec![0u32; n];
        for (y, &c) in v.iter().enumerate() {
            if c != 0 {
                let xy = g.mul(x, y);
                out[xy] = (out[xy] + c) % p;
                out[y] = (out[y] + p - c) % p;
            }
        }
        out
    };
    let j1 = Subspace::span(
        p,
        n,
        (1..n).map(|x| {
            let mut v = vec![0u32; n];
            v[x] = 1;
            v[0] = p - 1;
            v
        }),
    );
    let mut powers = vec![j1];
    loop {
        let last = powers.last().unwrap();
        if last.dim() == 0 {
            break;
        }
        let mut vectors = Vec::new();
        for b in last.basis() {
            for x in 1..n {
                vectors.push(left_times(x, b));
            }
        }
        powers.push(Subspace::span(p, n, vectors));
    }
    powers
}

/// Product of two subspaces of `F_p(G)` inside the group algebra.
pub fn algebra_product(g: &Group, a: &Subspace, b: &Subspace) -> Subspace {
    let p = g.prime();
    let n = g.order();
    let mut out = Vec::new();
    for u in a.basis() {
        for v in b.basis() {
            let mut w = vec![0u32; n];
            for (x, &cu) in u.iter().enumerate() {
                if cu == 0 {
                    continue;
                }
                for (y, &cv) in v.iter().enumerate() {
                    if cv != 0 {
                        let xy = g.mul(x, y);
                        w[xy] = (w[xy] + cu * cv) % p;
                    }
                }
            }
            out.push(w);
        }
    }
    Subspace::span(p, n, out)
}

/// `{v : v·j = 0 for all j in J}` inside the right regular module.
pub fn right_annihilator(g: &Group, j: &Subspace) -> Subspace {
    let p = g.prime();
    let n = g.order();
    if j.dim() == 0 {
        return Subspace::full(p, n);
    }
    // v·j = Σ_x v_x e_x · Σ_y j_y y = Σ v_x j_y e_{xy}: column block per basis vector of J.
    let mut cols: Option<Matrix> = None;
    for b in j.basis() {
        let mut m = Matrix::zeros(p, n, n);
        for x in 0..n {
            for (y, &c) in b.iter().enumerate() {
                if c != 0 {
                    let xy = g.mul(x, y);
                    m.set(x, xy, (m.get(x, xy) + c) % p);
                }
            }
        }
        cols = Some(match cols {
            None => m,
            Some(s) => s.hstack(&m),
        });
    }
    Subspace::span(p, n, cols.unwrap().left_nullspace())
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CrDiagnostics {
    pub fixed_dim: usize,
    pub h1_dim: usize,
    pub is_cr: bool,
    /// Whether the acting group (modulo the kernel) is elementary abelian.
    pub elementary_abelian_action: bool,
}

/// `C_M(L) ≅ F_p` and `dim H^1(L, M) ≤ 1`, with `L = G/N`, `N` given by generators
/// that must act trivially.
pub fn is_cr(g: &Group, m: &Arc<FpModule>, kernel: &[Element]) -> Result<CrDiagnostics> {
    for n in kernel {
        if !m.element_matrix(n).is_identity() {
            return Err(Error::InvalidModule("kernel does not act trivially".into()));
        }
    }
    let space = deriv::derivation_space_mod(m, kernel)?;
    let fixed_dim = m.invariants().dim();
    let p = g.prime() as u64;
    let kernel_idx: Vec<usize> = kernel.iter().map(|x| g.index(x)).collect();
    let n_members = crate::series::normal_closure(g, &kernel_idx);
    let elementary_abelian_action = (0..g.order()).all(|x| n_members.contains(g.pow(x, p)))
        && g.gens().iter().all(|&a| g.gens().iter().all(|&b| n_members.contains(g.comm(a, b))));
    Ok(CrDiagnostics {
        fixed_dim,
        h1_dim: space.h1_dim(),
        is_cr: fixed_dim == 1 && space.h1_dim() <= 1,
        elementary_abelian_action,
    })
}

/// `K = M ⊕ <c>` with `(k c + h)^g = k c + h^g - k τ(g)`.
pub fn twist_extend(tau: &Derivation) -> Result<FpModule> {
    twist_extend_all(tau.module(), std::slice::from_ref(tau))
}

/// Appends one new basis vector per derivation; equal to iterating [`twist_extend`].
pub fn twist_extend_all(m: &Arc<FpModule>, taus: &[Derivation]) -> Result<FpModule> {
    let p = m.prime();
    let d = m.dim();
    let s = taus.len();
    for tau in taus {
        if !Arc::ptr_eq(tau.module(), m) && **tau.module() != **m {
            return Err(Error::ModuleMismatch);
        }
    }
    let action = (0..m.group().rank())
        .map(|k| {
            let mut a = Matrix::zeros(p, d + s, d + s);
            let base = m.action(k);
            for r in 0..d {
                for c in 0..d {
                    a.set(r, c, base.get(r, c));
                }
            }
            for (j, tau) in taus.iter().enumerate() {
                let v = &tau.images()[k];
                for c in 0..d {
                    a.set(d + j, c, (p - v[c]) % p);
                }
                a.set(d + j, d + j, 1);
            }
            a
        })
        .collect();
    let mut labels = m.labels().to_vec();
    labels.extend((1..=s).map(|j| format!("c{j}")));
    FpModule::with_labels(Arc::clone(m.group()), action, labels).map_err(|e| match e {
        Error::InvalidModule(msg) => Error::NotDerivation(msg),
        other => other,
    })
}

/// Derivations into `M` padded with zeros so they take values in `M ⊕ <c...>`.
pub fn pad_derivation(tau: &Derivation, target: &Arc<FpModule>) -> Result<Derivation> {
    let images = tau
        .images()
        .iter()
        .map(|v| {
            let mut w = v.clone();
            w.resize(target.dim(), 0);
            w
        })
        .collect();
    Derivation::new(Arc::clone(target), images)
}

/// θ-CR construction over `L/H`: twist `K` by an echelon basis of
/// `Der(L/H, K)` modulo `Der(L/Φ(L), K)`, one derivation at a time.
pub fn theta_cr_build(g: &Group, k: &Arc<FpModule>, h: &Subgroup) -> Result<FpModule> {
    let phi = crate::series::frattini(g);
    let n = crate::series::gamma3_agemo(g);
    if !(n.is_subgroup_of(h) && h.is_subgroup_of(&phi)) || !h.is_normal(g) {
        return Err(Error::InvalidModule("H must be normal with γ3(L)L^p ≤ H ≤ Φ(L)".into()));
    }
    let phi_gens = phi.generator_elements(g);
    let diag = is_cr(g, k, &phi_gens)?;
    if !diag.is_cr {
        return Err(Error::InvalidModule(format!(
            "module is not CR over L/Φ(L): fixed dim {}, H^1 dim {}",
            diag.fixed_dim, diag.h1_dim
        )));
    }
    let upper = deriv::derivation_space_mod(k, &h.generator_elements(g))?;
    let lower = deriv::derivation_space_mod(k, &phi_gens)?;
    let taus = upper.der_subspace().complement_in(lower.der_subspace());
    let s = phi.log_order(g.prime()) - h.log_order(g.prime());
    if taus.len() != s {
        return Err(Error::DimensionMismatch(format!(
            "Der(L/H,K)/Der(L/Φ(L),K) has dimension {}, expected {s}",
            taus.len()
        )));
    }
    let mut current = Arc::clone(k);
    for flat in &taus {
        let tau = Derivation::from_flat(Arc::clone(k), flat)?;
        let lifted = pad_derivation(&tau, &current)?;
        current = Arc::new(twist_extend(&lifted)?);
    }
    Ok(Arc::try_unwrap(current).unwrap_or_else(|a| (*a).clone()))
}

/// `Hom_G(A, B)` as a list of basis matrices (`dim A × dim B`, `A_g X = X B_g`).
pub fn hom_space(a: &FpModule, b: &FpModule) -> Result<Vec<Matrix>> {
    if a.group() != b.group() {
        return Err(Error::ModuleMismatch);
    }
    let p = a.prime();
    let (m, n) = (a.dim(), b.dim());
    // Unknown X flattened row-major; constraints (A X - X B)_{rc} = 0.
    let unknowns = m * n;
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for k in 0..a.group().rank() {
        let (ak, bk) = (a.action(k), b.action(k));
        for r in 0..m {
            for c in 0..n {
                let mut eq = vec![0u32; unknowns];
                for t in 0..m {
                    let v = ak.get(r, t);
                    if v != 0 {
                        eq[t * n + c] = (eq[t * n + c] + v) % p;
                    }
                }
                for t in 0..n {
                    let v = bk.get(t, c);
                    if v != 0 {
                        eq[r * n + t] = (eq[r * n + t] + p - v) % p;
                    }
                }
                if !is_zero(&eq) {
                    rows.push(eq);
                }
            }
        }
    }
    let sols = if rows.is_empty() {
        Subspace::full(p, unknowns).basis().to_vec()
    } else {
        Matrix::from_rows(p, unknowns, &rows).right_nullspace()
    };
    Ok(sols
        .into_iter()
        .map(|v| {
            let rows: Vec<Vec<u32>> = v.chunks(n.max(1)).map(|r| r.to_vec()).collect();
            Matrix::from_rows(p, n, &rows[..m])
        })
        .collect())
}

/// Number of submodules of `F_p(L)` isomorphic to `M`: distinct images of
/// injective module maps `M -> F_p(L)`.
pub fn submodule_embedding_count(g: &Group, m: &FpModule) -> Result<usize> {
    const SEARCH_CAP: u128 = 1_000_000;
    let regular = FpModule::regular(g, DEFAULT_MODULE_CAP)?;
    let basis = hom_space(m, &regular)?;
    let p = g.prime();
    let total = (p as u128).pow(basis.len() as u32);
    if total > SEARCH_CAP {
        return Err(Error::TooLarge { size: total, cap: SEARCH_CAP });
    }
    let mut images: BTreeSet<Vec<Vec<u32>>> = BTreeSet::new();
    let mut coeffs = vec![0u32; basis.len()];
    for _ in 0..total {
        let mut x = Matrix::zeros(p, m.dim(), regular.dim());
        for (c, b) in coeffs.iter().zip(&basis) {
            if *c != 0 {
                x = x.add(&b.scale(*c));
            }
        }
        if x.rank() == m.dim() {
            images.insert(Subspace::span(p, regular.dim(), x.to_rows()).basis().to_vec());
        }
        for c in coeffs.iter_mut() {
            *c += 1;
            if *c < p {
                break;
            }
            *c = 0;
        }
    }
    Ok(images.len())
}

/// Searches for an invertible intertwiner; `None` when the modules are not isomorphic.
pub fn find_isomorphism(a: &FpModule, b: &FpModule) -> Result<Option<Matrix>> {
    if a.dim() != b.dim() {
        return Ok(None);
    }
    let basis = hom_space(a, b)?;
    let p = a.prime();
    let total = (p as u128).pow(basis.len() as u32);
    if total > 1_000_000 {
        return Err(Error::TooLarge { size: total, cap: 1_000_000 });
    }
    let mut coeffs = vec![0u32; basis.len()];
    for _ in 0..total {
        let mut x = Matrix::zeros(p, a.dim(), b.dim());
        for (c, m) in coeffs.iter().zip(&basis) {
            if *c != 0 {
                x = x.add(&m.scale(*c));
            }
        }
        if x.rank() == a.dim() {
            return Ok(Some(x));
        }
        for c in coeffs.iter_mut() {
            *c += 1;
            if *c < p {
                break;
            }
            *c = 0;
        }
    }
    Ok(None)
}

/// Norm map `v -> Σ_{x in G} v^x`; returns its image.
pub fn norm_image(g: &Group, m: &FpModule) -> Subspace {
    let p = m.prime();
    let mut total = Matrix::zeros(p, m.dim(), m.dim());
    for x in 0..g.order() {
        total = total.add(&m.element_matrix(&g.element(x)));
    }
    Subspace::span(p, m.dim(), total.to_rows())
}

/// Outcome of checking the freeness criterion on one module.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FreenessCheck {
    pub fixed_dim: usize,
    pub h1_dim: usize,
    pub norm_onto_fixed: bool,
    pub hypotheses_hold: bool,
    pub dim_matches_group: bool,
    pub cyclic_generator: Option<Vec<u32>>,
}

impl FreenessCheck {
    /// Whether `M ≅ F_p(L)` was confirmed (vacuously true when the hypotheses fail).
    pub fn consistent(&self) -> bool {
        !self.hypotheses_hold || (self.dim_matches_group && self.cyclic_generator.is_some())
    }
}

/// Fixed line, vanishing `H^1` and a surjective norm should force `M ≅ F_p(L)`;
/// confirms by dimension and by a vector whose orbit spans `M`.
pub fn freeness_check(g: &Group, m: &Arc<FpModule>) -> Result<FreenessCheck> {
    let fixed = m.invariants();
    let h1 = deriv::derivation_space(m)?.h1_dim();
    let norm = norm_image(g, m);
    let norm_onto_fixed = norm == fixed;
    let hypotheses_hold = fixed.dim() == 1 && h1 == 0 && norm_onto_fixed;
    let cyclic_generator = (0..m.dim())
        .map(|i| {
            let mut v = m.zero_vector();
            v[i] = 1;
            v
        })
        .find(|v| m.spin(std::slice::from_ref(v)).dim() == m.dim());
    Ok(FreenessCheck {
        fixed_dim: fixed.dim(),
        h1_dim: h1,
        norm_onto_fixed,
        hypotheses_hold,
        dim_matches_group: m.dim() == g.order(),
        cyclic_generator,
    })
}

/// An elementary abelian normal subgroup of `G` viewed as a module under conjugation.
#[derive(Clone, Debug)]
pub struct Realization {
    module: Arc<FpModule>,
    basis: Vec<usize>,
    coords: HashMap<usize, Vec<u32>>,
}

impl Realization {
    pub fn new(g: &Group, a: &Subgroup) -> Result<Self> {
        if !a.is_normal(g) {
            return Err(Error::NotNormal);
        }
        if !a.is_elementary_abelian(g) {
            return Err(Error::NotElementaryAbelian);
        }
        let p = g.prime();
        // Independent generators: greedy over the generating list.
        let basis: Vec<usize> = a.generators().to_vec();
        let k = basis.len();
        let mut coords = HashMap::new();
        let total = (p as usize).pow(k as u32);
        for code in 0..total {
            let mut c = vec![0u32; k];
            let mut r = code;
            for v in c.iter_mut() {
                *v = (r % p as usize) as u32;
                r /= p as usize;
            }
            let x = c.iter().zip(&basis).fold(0usize, |acc, (&e, &b)| g.mul(acc, g.pow(b, e as u64)));
            coords.insert(x, c);
        }
        if coords.len() != a.order() {
            return Err(Error::NotElementaryAbelian);
        }
        let action = g
            .gens()
            .iter()
            .map(|&t| {
                let rows: Vec<Vec<u32>> = basis.iter().map(|&b| coords[&g.conj(b, t)].clone()).collect();
                Matrix::from_rows(p, k, &rows)
            })
            .collect();
        let labels = basis.iter().map(|&b| format!("{}", g.element(b))).collect();
        let module = Arc::new(FpModule::with_labels(g.presentation_arc(), action, labels)?);
        Ok(Realization { module, basis, coords })
    }

    pub fn module(&self) -> &Arc<FpModule> {
        &self.module
    }

    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    /// Group element (index) represented by a vector.
    pub fn embed(&self, g: &Group, v: &[u32]) -> usize {
        v.iter().zip(&self.basis).fold(0usize, |acc, (&e, &b)| g.mul(acc, g.pow(b, e as u64)))
    }

    pub fn coordinates(&self, x: usize) -> Option<&Vec<u32>> {
        self.coords.get(&x)
    }

    /// Image of a subspace as a subgroup of `G`.
    pub fn subgroup_of(&self, g: &Group, s: &Subspace) -> Subgroup {
        let gens: Vec<usize> = s.basis().iter().map(|v| self.embed(g, v)).collect();
        Subgroup::generated(g, &gens)
    }
}

/// Builds a module from a short name: `trivial[:dim]`, `regular`,
/// `regular:frattini`, `regular:gamma3p` (inflated from the quotient),
/// `center` (`Ω_1(Z(G))` under conjugation), `omega1zp:i` (`Ω_1(Z(P_i))`),
/// `socle:i` (the `i`-th socle term of the regular module).
pub fn module_from_spec(g: &Group, spec: &str) -> Result<Arc<FpModule>> {
    use crate::series;
    let (kind, arg) = spec.split_once(':').map_or((spec, None), |(a, b)| (a, Some(b)));
    let number = |s: Option<&str>, default: usize| -> Result<usize> {
        s.map_or(Ok(default), |t| t.parse().map_err(|_| Error::Parse(format!("bad module argument in `{spec}`"))))
    };
    let realize = |a: &Subgroup| -> Result<Arc<FpModule>> { Ok(Arc::clone(Realization::new(g, a)?.module())) };
    let m = match kind {
        "trivial" => FpModule::trivial(g.presentation_arc(), number(arg, 1)?),
        "regular" => match arg {
            None => FpModule::regular(g, DEFAULT_MODULE_CAP)?,
            Some(which) => {
                let n = match which {
                    "frattini" => series::frattini(g),
                    "gamma3p" => series::gamma3_agemo(g),
                    _ => return Err(Error::Parse(format!("unknown quotient `{which}` in `{spec}`"))),
                };
                let (q, pi) = crate::group::quotient(g, n.members())?;
                let qg = Group::new(Arc::new(q))?;
                FpModule::regular(&qg, DEFAULT_MODULE_CAP)?.inflate(&pi)?
            }
        },
        "center" => return realize(&series::omega1(g, &series::center(g))?),
        "omega1zp" => {
            let chain = series::refine_chain(g);
            let i = number(arg, 0)?;
            if i > chain.t() {
                return Err(Error::Parse(format!("chain has links P_0..P_{}", chain.t())));
            }
            let pi = chain.link(i);
            return realize(&series::omega1(g, &series::centralizer(g, pi).intersect(g, pi))?);
        }
        "socle" => {
            let reg = FpModule::regular(g, DEFAULT_MODULE_CAP)?;
            let layers = reg.socle_filtration();
            let i = number(arg, 1)?;
            let layer = layers
                .get(i.wrapping_sub(1))
                .ok_or_else(|| Error::Parse(format!("socle terms are 1..={}", layers.len())))?;
            reg.submodule(layer)?
        }
        _ => return Err(Error::Parse(format!("unknown module `{spec}`"))),
    };
    Ok(Arc::new(m))
}

/// The module `S` of the class-2 construction: trivial, one-dimensional.
pub fn module_s(d: &Arc<PcPresentation>) -> FpModule {
    FpModule::trivial(Arc::clone(d), 1)
}

fn d_rank(d: &PcPresentation) -> Result<usize> {
    // rank(D) = d + d(d-1)/2
    (2..=d.rank()).find(|&k| k + k * (k - 1) / 2 == d.rank()).ok_or_else(|| {
        Error::InvalidPresentation("not a presentation produced by build_d".into())
    })
}

/// Derivation of `D` into `m` with prescribed images on `y_1..y_d` that
/// vanishes wherever the derivation law leaves freedom on the central generators.
pub fn extend_from_generators(m: &Arc<FpModule>, on_y: &[Vec<u32>]) -> Result<Derivation> {
    let space = deriv::derivation_space(m)?;
    deriv::extend_partial(&space, &on_y.iter().cloned().enumerate().collect::<Vec<_>>())?
        .ok_or_else(|| Error::NotDerivation("prescribed values do not extend".into()))
}

/// `A = S ⊕ <r_1..r_d>` with `r_j^g = r_j - δ_j(g)`, `δ_j(y_i) = [i = j] a`.
pub fn module_a(d: &Arc<PcPresentation>) -> Result<FpModule> {
    let rank = d_rank(d)?;
    let s = Arc::new(module_s(d));
    let taus = (0..rank)
        .map(|j| {
            let images = (0..d.rank()).map(|i| vec![u32::from(i == j)]).collect();
            Derivation::new(Arc::clone(&s), images)
        })
        .collect::<Result<Vec<_>>>()?;
    let a = twist_extend_all(&s, &taus)?;
    let mut labels = vec!["a".to_string()];
    labels.extend((1..=rank).map(|j| format!("r{j}")));
    FpModule::with_labels(Arc::clone(d), a.actions().to_vec(), labels)
}

/// `B = A ⊕ <c_{i,j} : i ≤ j>`, twisting by `δ_{i,j}` extended from
/// `y_i -> r_j`, `y_j -> r_i` (both `r_i` when `i = j`).
pub fn module_b(d: &Arc<PcPresentation>) -> Result<FpModule> {
    let rank = d_rank(d)?;
    let a = Arc::new(module_a(d)?);
    let r = |j: usize| {
        let mut v = vec![0u32; rank + 1];
        v[1 + j] = 1;
        v
    };
    let mut taus = Vec::new();
    let mut labels = a.labels().to_vec();
    for i in 0..rank {
        for j in i..rank {
            let on_y: Vec<Vec<u32>> = (0..rank)
                .map(|s| {
                    if s == i {
                        r(j)
                    } else if s == j {
                        r(i)
                    } else {
                        vec![0; rank + 1]
                    }
                })
                .collect();
            taus.push(extend_from_generators(&a, &on_y)?);
            labels.push(format!("c{},{}", i + 1, j + 1));
        }
    }
    let b = twist_extend_all(&a, &taus)?;
    FpModule::with_labels(Arc::clone(d), b.actions().to_vec(), labels)
}

/// `δ_[y_i,y_j]` of the class-2 construction: `y_i -> r_j`, other `y_s -> 0`, into `A`.
pub fn commutator_derivation(a: &Arc<FpModule>, i: usize, j: usize) -> Result<Derivation> {
    let rank = d_rank(a.group())?;
    let on_y: Vec<Vec<u32>> = (0..rank)
        .map(|s| {
            let mut v = vec![0u32; a.dim()];
            if s == i {
                v[1 + j] = 1;
            }
            v
        })
        .collect();
    extend_from_generators(a, &on_y)
}

/// `R = B ⊕ <c_[y_i,y_j] : i < j>`, twisting by the `δ_[y_i,y_j]` padded into `B`.
pub fn module_r(d: &Arc<PcPresentation>) -> Result<FpModule> {
    let rank = d_rank(d)?;
    let a = Arc::new(module_a(d)?);
    let b = Arc::new(module_b(d)?);
    let mut taus = Vec::new();
    let mut labels = b.labels().to_vec();
    for i in 0..rank {
        for j in i + 1..rank {
            taus.push(pad_derivation(&commutator_derivation(&a, i, j)?, &b)?);
            labels.push(format!("c[y{},y{}]", i + 1, j + 1));
        }
    }
    let r = twist_extend_all(&b, &taus)?;
    FpModule::with_labels(Arc::clone(d), r.actions().to_vec(), labels)
}
