//! Independent brute-force verification at tiny scale: the group as
//! permutations, automorphisms by generator-image search, the holomorph
//! assembled from ρ(G) and Aut(G), and the correspondence between
//! equivariant bilinear forms and normal regular subgroups checked
//! definitionally, with zero reliance on the linear machinery it audits.
//!
//! Maps compose left to right throughout, matching the rest of the crate.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::forms::PairForm;
use crate::group::{GroupElement, GroupSpec, MulTable, ORACLE_BOUND};
use crate::linalg::FpMatrix;
use crate::tg::IsoWitness;

/// Cap on the generator-image search space `|G|^n`.
const AUT_SEARCH_BOUND: u128 = 100_000_000;
/// Cap on `|G| * |Aut(G)|` for materializing the holomorph.
const HOL_BOUND: u128 = 1_000_000;
/// Caps for the correspondence scan.
const FORM_SCAN_BOUND: u128 = 1_000_000;
const CORRESPONDENCE_GROUP_BOUND: u128 = 200;

/// A permutation of `[0, size)`, composed left to right.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(size: usize) -> Self {
        Self { images: (0..size as u32).collect() }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            let i = i as usize;
            if i >= images.len() || seen[i] {
                return Err(Error::VerificationFailed("not a bijection".into()));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    /// `self` then `other`.
    pub fn compose(&self, other: &Self) -> Self {
        debug_assert_eq!(self.size(), other.size());
        Self {
            images: self.images.iter().map(|&i| other.images[i as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0u32; self.images.len()];
        for (i, &img) in self.images.iter().enumerate() {
            images[img as usize] = i as u32;
        }
        Self { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &img)| i as u32 == img)
    }
}

/// A small permutation group with its elements materialized and sorted.
#[derive(Clone, Debug)]
pub struct PermGroup {
    pub generators: Vec<Perm>,
    elements: Vec<Perm>,
}

impl PermGroup {
    pub fn from_elements(generators: Vec<Perm>, mut elements: Vec<Perm>) -> Self {
        elements.sort();
        elements.dedup();
        Self { generators, elements }
    }

    /// Closure of the generators under composition, capped at `cap`
    /// elements.
    pub fn generate(generators: &[Perm], cap: usize) -> Result<Self> {
        let size = generators.first().map_or(0, Perm::size);
        let mut seen: HashSet<Perm> = HashSet::new();
        let identity = Perm::identity(size);
        seen.insert(identity.clone());
        let mut frontier = vec![identity];
        while let Some(current) = frontier.pop() {
            for g in generators {
                let next = current.compose(g);
                if seen.insert(next.clone()) {
                    if seen.len() > cap {
                        return Err(Error::BoundExceeded {
                            needed: seen.len() as u128,
                            bound: cap as u128,
                        });
                    }
                    frontier.push(next);
                }
            }
        }
        Ok(Self::from_elements(generators.to_vec(), seen.into_iter().collect()))
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    /// Set equality (elements are kept sorted).
    pub fn same_elements(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

/// Automorphisms as generator-image tuples, from exhaustive search.
#[derive(Clone, Debug)]
pub struct AutGroup {
    pub tuples: Vec<Vec<GroupElement>>,
}

impl AutGroup {
    pub fn order(&self) -> usize {
        self.tuples.len()
    }
}

/// The right regular representation: `ρ(y): x -> xy`, one permutation per
/// element. Regular by construction.
pub fn rho(spec: &GroupSpec) -> Result<PermGroup> {
    let elements = spec.enumerate_elements(ORACLE_BOUND)?;
    let size = elements.len();
    let mut perms = Vec::with_capacity(size);
    for y in &elements {
        let mut images = vec![0u32; size];
        for (i, x) in elements.iter().enumerate() {
            images[i] = spec.element_index(&spec.multiply(x, y)) as u32;
        }
        perms.push(Perm { images });
    }
    let generators = (0..spec.n())
        .map(|i| perms[spec.element_index(&spec.generator(i))].clone())
        .collect();
    Ok(PermGroup::from_elements(generators, perms))
}

/// Exhaustive generator-image search for `Aut(G)`.
///
/// A candidate tuple survives only if its a-parts stay linearly
/// independent (necessary to generate G) and every presentation relation
/// `g_i^p = prod [g_j, g_k]^{D[i]}` holds, each checked at the first
/// prefix that contains all the generators it mentions. Everything is
/// computed with plain group arithmetic.
pub fn enumerate_automorphisms(spec: &GroupSpec, allow_large: bool) -> Result<AutGroup> {
    let elements = spec.enumerate_elements(ORACLE_BOUND)?;
    let order = elements.len() as u128;
    let search = order.checked_pow(spec.n() as u32).unwrap_or(u128::MAX);
    if search > AUT_SEARCH_BOUND && !allow_large {
        return Err(Error::BoundExceeded { needed: search, bound: AUT_SEARCH_BOUND });
    }
    let n = spec.n();
    // relation i is checkable once the prefix holds generator i and every
    // generator appearing in a pair with a nonzero exponent
    let pairs = spec.pairs();
    let ready_at: Vec<usize> = (0..n)
        .map(|i| {
            let mut last = i;
            for (idx, &(_, k)) in pairs.iter().enumerate() {
                if spec.d().get(i, idx) != 0 {
                    last = last.max(k);
                }
            }
            last
        })
        .collect();

    struct Search<'a> {
        spec: &'a GroupSpec,
        elements: &'a [GroupElement],
        ready_at: &'a [usize],
        chosen: Vec<GroupElement>,
        // echelonized a-parts of the chosen images, for the generation prune
        echelon: Vec<Vec<u64>>,
        tuples: Vec<Vec<GroupElement>>,
    }

    impl Search<'_> {
        fn relation_holds(&self, i: usize) -> bool {
            let spec = self.spec;
            let lhs = spec.power(&self.chosen[i], spec.p() as i64);
            let mut rhs = spec.identity();
            for (idx, &(j, k)) in spec.pairs().iter().enumerate() {
                let e = spec.d().get(i, idx);
                if e != 0 {
                    let comm = spec.commutator_definitional(&self.chosen[j], &self.chosen[k]);
                    rhs = spec.multiply(&rhs, &spec.power(&comm, e as i64));
                }
            }
            lhs == rhs
        }

        // reduces v against the echelon basis; Some(residue) if independent
        fn independent_residue(&self, v: &[u64]) -> Option<Vec<u64>> {
            let p = self.spec.p();
            let mut v = v.to_vec();
            for b in &self.echelon {
                let lead = b.iter().position(|&x| x != 0).expect("echelon rows are nonzero");
                if v[lead] != 0 {
                    let f = v[lead] * crate::linalg::mod_inverse(b[lead], p).expect("unit");
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi = (*vi + (p - f % p) * bi) % p;
                    }
                }
            }
            if v.iter().any(|&x| x != 0) {
                Some(v)
            } else {
                None
            }
        }

        fn recurse(&mut self, depth: usize) {
            let spec = self.spec;
            if depth == spec.n() {
                self.tuples.push(self.chosen.clone());
                return;
            }
            for cand in self.elements {
                // a-parts must stay independent
                let Some(residue) = self.independent_residue(&cand.a) else {
                    continue;
                };
                self.chosen.push(cand.clone());
                self.echelon.push(residue);
                let ok = (0..spec.n())
                    .filter(|&i| self.ready_at[i] == depth)
                    .all(|i| self.relation_holds(i));
                if ok {
                    self.recurse(depth + 1);
                }
                self.chosen.pop();
                self.echelon.pop();
            }
        }
    }

    let mut search = Search {
        spec,
        elements: &elements,
        ready_at: &ready_at,
        chosen: Vec::with_capacity(n),
        echelon: Vec::with_capacity(n),
        tuples: Vec::new(),
    };
    search.recurse(0);
    Ok(AutGroup { tuples: search.tuples })
}

/// The value table of the automorphism with the given generator images:
/// `(a, c) -> prod g_i^{a_i} · prod [g_j, g_k]^{c_(j,k)}`.
pub fn automorphism_perm(spec: &GroupSpec, images: &[GroupElement]) -> Result<Perm> {
    let elements = spec.enumerate_elements(ORACLE_BOUND)?;
    let p = spec.p();
    // powers of each generator image and the commutator images
    let mut gen_powers: Vec<Vec<GroupElement>> = Vec::with_capacity(spec.n());
    for g in images {
        let mut powers = vec![spec.identity()];
        for e in 1..p {
            powers.push(spec.multiply(&powers[(e - 1) as usize], g));
        }
        gen_powers.push(powers);
    }
    let comm_images: Vec<GroupElement> = spec
        .pairs()
        .iter()
        .map(|&(j, k)| spec.commutator_definitional(&images[j], &images[k]))
        .collect();
    let mut out = vec![0u32; elements.len()];
    for (i, e) in elements.iter().enumerate() {
        let mut acc = spec.identity();
        for (slot, &exp) in e.a.iter().enumerate() {
            acc = spec.multiply(&acc, &gen_powers[slot][exp as usize]);
        }
        for (slot, &exp) in e.c.iter().enumerate() {
            acc = spec.multiply(&acc, &spec.power(&comm_images[slot], exp as i64));
        }
        out[i] = spec.element_index(&acc) as u32;
    }
    Perm::from_images(out)
}

/// Filters an automorphism list down to `Aut_c ∩ Aut_z`: identity on the
/// central quotient (a-part of `g_i` is `e_i`) and on `G'` (commutators of
/// the images are the standard basis commutators).
pub fn filter_aut_c_z(spec: &GroupSpec, aut: &AutGroup) -> AutGroup {
    let tuples = aut
        .tuples
        .iter()
        .filter(|images| {
            let quotient_fixed = images.iter().enumerate().all(|(i, g)| {
                g.a.iter().enumerate().all(|(j, &x)| x == u64::from(i == j))
            });
            if !quotient_fixed {
                return false;
            }
            spec.pairs().iter().enumerate().all(|(idx, &(j, k))| {
                let comm = spec.commutator_definitional(&images[j], &images[k]);
                comm.c.iter().enumerate().all(|(t, &x)| x == u64::from(t == idx))
            })
        })
        .cloned()
        .collect();
    AutGroup { tuples }
}

/// Everything the oracle checks need about one spec, built once: the
/// multiplication table, ρ(G), the automorphism group with its permutation
/// images, a small generating set, and the induced matrix pairs.
pub struct OracleContext {
    pub spec: GroupSpec,
    pub mt: MulTable,
    pub rho: PermGroup,
    pub aut: AutGroup,
    pub aut_perms: Vec<Perm>,
    /// ρ generators plus a small Aut generating set; conjugation by these
    /// decides normality in Hol(G).
    pub hol_generators: Vec<Perm>,
    /// Distinct induced pairs (matrix on G/G', matrix on G').
    pub induced_pairs: Vec<(FpMatrix, FpMatrix)>,
    pn: usize,
}

impl OracleContext {
    pub fn build(spec: &GroupSpec, allow_large_aut: bool) -> Result<Self> {
        let mt = MulTable::build(spec, ORACLE_BOUND)?;
        let rho_group = rho(spec)?;
        let aut = enumerate_automorphisms(spec, allow_large_aut)?;
        let mut aut_perms = Vec::with_capacity(aut.order());
        for tuple in &aut.tuples {
            aut_perms.push(automorphism_perm(spec, tuple)?);
        }
        aut_perms.sort();
        // greedy small generating set for Aut
        let mut aut_gens: Vec<Perm> = Vec::new();
        let mut closed = PermGroup::generate(
            &[Perm::identity(mt.size)],
            aut_perms.len(),
        )?;
        for perm in &aut_perms {
            if !closed.contains(perm) {
                aut_gens.push(perm.clone());
                closed = PermGroup::generate(&aut_gens, aut_perms.len())?;
                if closed.order() == aut_perms.len() {
                    break;
                }
            }
        }
        let mut hol_generators = rho_group.generators.clone();
        hol_generators.extend(aut_gens);
        // induced pairs, deduplicated by the quotient matrix
        let mut seen = HashSet::new();
        let mut induced_pairs = Vec::new();
        for tuple in &aut.tuples {
            let (b, beta) = crate::forms::induced_pair(spec, tuple);
            if seen.insert(b.entries().to_vec()) {
                induced_pairs.push((b, beta));
            }
        }
        Ok(Self {
            spec: spec.clone(),
            mt,
            rho: rho_group,
            aut,
            aut_perms,
            hol_generators,
            induced_pairs,
            pn: (spec.p() as usize).pow(spec.n() as u32),
        })
    }

    /// Coset exponent vector of the a-index `idx`.
    fn coset(&self, idx: usize) -> Vec<u64> {
        let p = self.spec.p() as usize;
        let mut v = vec![0u64; self.spec.n()];
        let mut x = idx;
        for slot in (0..self.spec.n()).rev() {
            v[slot] = (x % p) as u64;
            x /= p;
        }
        v
    }

    /// The form's values on coset pairs, as central indices.
    fn form_table(&self, form: &dyn PairForm) -> Vec<u32> {
        let pn = self.pn;
        let cosets: Vec<Vec<u64>> = (0..pn).map(|i| self.coset(i)).collect();
        let mut tab = vec![0u32; pn * pn];
        for (u, cu) in cosets.iter().enumerate() {
            for (v, cv) in cosets.iter().enumerate() {
                tab[u * pn + v] = self.spec.central_index(&form.eval(cu, cv)) as u32;
            }
        }
        tab
    }
}

/// The holomorph as an explicit permutation group, generated by ρ(G) and
/// Aut(G); its order must come out as `|G| · |Aut(G)|`.
pub fn build_holomorph(ctx: &OracleContext) -> Result<PermGroup> {
    let expected = (ctx.mt.size as u128) * (ctx.aut_perms.len() as u128);
    if expected > HOL_BOUND {
        return Err(Error::BoundExceeded { needed: expected, bound: HOL_BOUND });
    }
    let hol = PermGroup::generate(&ctx.hol_generators, expected as usize)?;
    if hol.order() as u128 != expected {
        return Err(Error::VerificationFailed(format!(
            "holomorph closure has order {}, expected {}",
            hol.order(),
            expected
        )));
    }
    Ok(hol)
}

/// Definitional flags for the subgroup candidate `{γ(x)ρ(x) : x ∈ G}`.
#[derive(Clone, Debug)]
pub struct SubgroupReport {
    pub is_subgroup: bool,
    pub is_regular: bool,
    pub is_normal_in_hol: bool,
    /// Every `γ(x)` is an automorphism fixing `G/G'` and `G'` elementwise,
    /// γ is an anti-homomorphism, and the form is Aut-equivariant.
    pub gamma_valid: bool,
    pub perms: Vec<Perm>,
}

impl SubgroupReport {
    pub fn all_ok(&self) -> bool {
        self.is_subgroup && self.is_regular && self.is_normal_in_hol && self.gamma_valid
    }
}

/// Builds `N = {γ(x)ρ(x)}` for a form and checks every defining property
/// by brute force.
pub fn subgroup_from_form(ctx: &OracleContext, form: &dyn PairForm) -> SubgroupReport {
    let size = ctx.mt.size;
    let pm = ctx.mt.pm;
    let ftab = ctx.form_table(form);
    let pn = ctx.pn;

    // n_x(g) = γ(x)(g) · x = (g shifted by Δ(ḡ, x̄)) · x
    let n_of = |x_idx: usize| -> Perm {
        let ax = x_idx / pm;
        let mut images = vec![0u32; size];
        for (g, slot) in images.iter_mut().enumerate() {
            let shifted = ctx.mt.add_central(g, ftab[(g / pm) * pn + ax] as usize);
            *slot = ctx.mt.mul(shifted, x_idx) as u32;
        }
        Perm { images }
    };
    let n_perms: Vec<Perm> = (0..size).map(n_of).collect();
    let mut sorted = n_perms.clone();
    sorted.sort();
    sorted.dedup();

    // regularity: the right count, transitive from the identity, and only
    // the identity fixes the identity point
    let distinct = sorted.len() == size;
    let mut point_images: Vec<usize> = n_perms.iter().map(|n| n.apply(0)).collect();
    point_images.sort_unstable();
    point_images.dedup();
    let transitive = point_images.len() == size;
    let fixing = n_perms.iter().filter(|n| n.apply(0) == 0).count();
    let is_regular =
        distinct && transitive && fixing == 1 && n_perms[0].is_identity();

    // closure under composition
    let mut is_subgroup = true;
    'closure: for a in &n_perms {
        for b in &n_perms {
            if sorted.binary_search(&a.compose(b)).is_err() {
                is_subgroup = false;
                break 'closure;
            }
        }
    }

    // normality under every holomorph generator
    let mut is_normal_in_hol = true;
    'normal: for h in &ctx.hol_generators {
        let h_inv = h.inverse();
        for n in &n_perms {
            let conj = h_inv.compose(n).compose(h);
            if sorted.binary_search(&conj).is_err() {
                is_normal_in_hol = false;
                break 'normal;
            }
        }
    }

    // gamma condition: γ(x) = n_x ρ(x)^{-1} must be an automorphism fixing
    // G/G' and G' elementwise; γ must be an anti-homomorphism; the form
    // must be equivariant under the full automorphism group
    let gamma_of = |x_idx: usize| -> Perm {
        let ax = x_idx / pm;
        let mut images = vec![0u32; size];
        for (g, slot) in images.iter_mut().enumerate() {
            *slot = ctx.mt.add_central(g, ftab[(g / pm) * pn + ax] as usize) as u32;
        }
        Perm { images }
    };
    let gammas: Vec<Perm> = (0..size).map(gamma_of).collect();
    let mut gamma_valid = true;
    'gamma: for (x, gx) in gammas.iter().enumerate() {
        // automorphism: bijective homomorphism
        let mut seen = vec![false; size];
        for g in 0..size {
            let img = gx.apply(g);
            if seen[img] {
                gamma_valid = false;
                break 'gamma;
            }
            seen[img] = true;
            // identity on G/G' and on G'
            if img / pm != g / pm || (g / pm == 0 && img != g) {
                gamma_valid = false;
                break 'gamma;
            }
        }
        for g in 0..size {
            for h in 0..size {
                if gx.apply(ctx.mt.mul(g, h)) != ctx.mt.mul(gx.apply(g), gx.apply(h)) {
                    gamma_valid = false;
                    break 'gamma;
                }
            }
        }
        let _ = x;
    }
    if gamma_valid {
        // anti-homomorphism: γ(xy) = γ(y) then γ(x)
        'anti: for x in 0..size {
            for y in 0..size {
                let xy = ctx.mt.mul(x, y);
                let composed = gammas[y].compose(&gammas[x]);
                if gammas[xy] != composed {
                    gamma_valid = false;
                    break 'anti;
                }
            }
        }
    }
    if gamma_valid {
        // equivariance against every induced pair
        let cosets: Vec<Vec<u64>> = (0..pn).map(|i| ctx.coset(i)).collect();
        'equiv: for (b, beta) in &ctx.induced_pairs {
            for i in 0..ctx.spec.n() {
                for j in 0..ctx.spec.n() {
                    let lhs = form.eval(b.row(i), b.row(j));
                    let base = form.eval(&cosets[coset_unit(&ctx.spec, i)], &cosets[coset_unit(&ctx.spec, j)]);
                    let rhs = crate::linalg::vec_mat(&base, beta).expect("length m");
                    if lhs != rhs {
                        gamma_valid = false;
                        break 'equiv;
                    }
                }
            }
        }
    }

    SubgroupReport { is_subgroup, is_regular, is_normal_in_hol, gamma_valid, perms: sorted }
}

/// a-index of the i-th standard basis coset.
fn coset_unit(spec: &GroupSpec, i: usize) -> usize {
    (spec.p() as usize).pow((spec.n() - 1 - i) as u32)
}

/// Report of the full correspondence scan.
#[derive(Clone, Debug)]
pub struct CorrespondenceReport {
    pub forms_scanned: u128,
    pub equivariant_forms: u64,
    pub valid_subgroups: u64,
    pub all_equivariant_valid: bool,
    pub subgroups_distinct: bool,
    pub non_equivariant_all_abnormal: bool,
    pub failures: Vec<String>,
}

impl CorrespondenceReport {
    /// Counts match in both directions and every definitional check held.
    pub fn ok(&self) -> bool {
        self.all_equivariant_valid
            && self.subgroups_distinct
            && self.non_equivariant_all_abnormal
            && self.equivariant_forms == self.valid_subgroups
    }
}

/// Scans every bilinear tensor, splits them by Aut-equivariance, and checks
/// the two directions of the correspondence: equivariant forms give
/// distinct normal regular subgroups with valid γ, non-equivariant forms
/// give subgroups that are not normal in Hol(G).
pub fn cross_check_correspondence(spec: &GroupSpec) -> Result<CorrespondenceReport> {
    let order = spec.order_u128().unwrap_or(u128::MAX);
    if order > CORRESPONDENCE_GROUP_BOUND {
        return Err(Error::BoundExceeded { needed: order, bound: CORRESPONDENCE_GROUP_BOUND });
    }
    let total = crate::forms::BilinearForm::tensor_count(spec).ok_or(Error::BoundExceeded {
        needed: u128::MAX,
        bound: FORM_SCAN_BOUND,
    })?;
    if total > FORM_SCAN_BOUND {
        return Err(Error::BoundExceeded { needed: total, bound: FORM_SCAN_BOUND });
    }
    let ctx = OracleContext::build(spec, false)?;
    let mut equivariant_forms = 0u64;
    let mut all_equivariant_valid = true;
    let mut non_equivariant_all_abnormal = true;
    let mut failures = Vec::new();
    let mut subgroup_set: HashSet<Vec<Perm>> = HashSet::new();
    for idx in 0..total {
        let form = crate::forms::BilinearForm::from_index(spec, idx);
        let equivariant = ctx
            .induced_pairs
            .iter()
            .all(|(b, beta)| crate::forms::equivariant_under(&form, b, beta));
        if equivariant {
            equivariant_forms += 1;
            let report = subgroup_from_form(&ctx, &form);
            if !report.all_ok() {
                all_equivariant_valid = false;
                failures.push(format!(
                    "equivariant form {idx}: subgroup={} regular={} normal={} gamma={}",
                    report.is_subgroup,
                    report.is_regular,
                    report.is_normal_in_hol,
                    report.gamma_valid
                ));
            }
            if !subgroup_set.insert(report.perms) {
                failures.push(format!("form {idx} repeats a subgroup"));
            }
        } else {
            let report = subgroup_from_form(&ctx, &form);
            if report.is_normal_in_hol {
                non_equivariant_all_abnormal = false;
                failures.push(format!("non-equivariant form {idx} is normal in Hol"));
            }
        }
    }
    Ok(CorrespondenceReport {
        forms_scanned: total,
        equivariant_forms,
        valid_subgroups: subgroup_set.len() as u64,
        all_equivariant_valid,
        subgroups_distinct: subgroup_set.len() as u64 == equivariant_forms,
        non_equivariant_all_abnormal,
        failures,
    })
}

/// `ρ(G)^θ = N` for the subgroup of the witness's form, with θ as an
/// explicit permutation.
pub fn conjugation_check(ctx: &OracleContext, witness: &IsoWitness) -> Result<bool> {
    let table = witness.table()?;
    let theta = Perm::from_images(table)?;
    conjugation_check_table(ctx, &witness.delta, &theta)
}

/// The same check for an arbitrary bijection table fixing the identity.
pub fn conjugation_check_table(
    ctx: &OracleContext,
    form: &dyn PairForm,
    theta: &Perm,
) -> Result<bool> {
    if theta.apply(0) != 0 {
        return Ok(false);
    }
    let theta_inv = theta.inverse();
    let mut conjugates: Vec<Perm> = ctx
        .rho
        .elements()
        .iter()
        .map(|r| theta_inv.compose(r).compose(theta))
        .collect();
    conjugates.sort();
    conjugates.dedup();
    let n_set = subgroup_from_form(ctx, form).perms;
    Ok(conjugates == n_set)
}

/// A full value table on coset pairs that need not be bilinear; the
/// negative control for the oracle checks.
pub struct TamperedForm {
    spec: GroupSpec,
    pn: usize,
    table: Vec<Vec<u64>>, // pn * pn entries, each an m-vector
}

impl TamperedForm {
    /// Tabulates a bilinear form and then overwrites one non-basis cell,
    /// destroying bilinearity.
    pub fn tampering(form: &crate::forms::BilinearForm) -> Self {
        let spec = form.spec().clone();
        let p = spec.p() as usize;
        let pn = p.pow(spec.n() as u32);
        let mut table = Vec::with_capacity(pn * pn);
        let coset = |idx: usize| {
            let mut v = vec![0u64; spec.n()];
            let mut x = idx;
            for slot in (0..spec.n()).rev() {
                v[slot] = (x % p) as u64;
                x /= p;
            }
            v
        };
        for u in 0..pn {
            for v in 0..pn {
                table.push(form.evaluate(&coset(u), &coset(v)));
            }
        }
        // break the cell at the last coset pair (both cosets have every
        // exponent p-1, so this is never a basis pair)
        let cell = (pn - 1) * pn + (pn - 1);
        table[cell][0] = (table[cell][0] + 1) % spec.p();
        Self { spec, pn, table }
    }
}

impl PairForm for TamperedForm {
    fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    fn eval(&self, u: &[u64], v: &[u64]) -> Vec<u64> {
        let p = self.spec.p();
        let enc = |w: &[u64]| w.iter().fold(0usize, |acc, &x| acc * p as usize + (x % p) as usize);
        let (ui, vi) = (enc(u), enc(v));
        self.table[ui * self.pn + vi].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::BilinearForm;
    use crate::Sampling;

    fn spec(p: u64, n: usize, d_rows: &[Vec<i64>]) -> GroupSpec {
        let m = n * (n - 1) / 2;
        let d = if d_rows.is_empty() {
            FpMatrix::zero(p, n, m)
        } else {
            FpMatrix::from_rows(p, d_rows).unwrap()
        };
        GroupSpec::new(p, n, d).unwrap()
    }

    #[test]
    fn rho_is_regular_and_homomorphic() {
        let s = spec(3, 2, &[]);
        let r = rho(&s).unwrap();
        assert_eq!(r.order(), 27);
        let els = s.enumerate_elements(ORACLE_BOUND).unwrap();
        // rho(identity) is the identity permutation
        let rho_of = |y: &GroupElement| -> Perm {
            let mut images = vec![0u32; els.len()];
            for (i, x) in els.iter().enumerate() {
                images[i] = s.element_index(&s.multiply(x, y)) as u32;
            }
            Perm::from_images(images).unwrap()
        };
        assert!(rho_of(&s.identity()).is_identity());
        // rho(x) rho(y) = rho(xy) on all pairs
        for x in &els {
            for y in &els {
                let lhs = rho_of(x).compose(&rho_of(y));
                let rhs = rho_of(&s.multiply(x, y));
                assert_eq!(lhs, rhs);
            }
        }
        // only the identity fixes the identity point
        assert_eq!(r.elements().iter().filter(|p| p.apply(0) == 0).count(), 1);
    }

    #[test]
    fn aut_count_heisenberg_27() {
        // (3,2,D=0) is extraspecial of order 27 and exponent 3
        let s = spec(3, 2, &[]);
        let aut = enumerate_automorphisms(&s, false).unwrap();
        assert_eq!(aut.order(), 432);
        // identity tuple is present
        let identity_tuple: Vec<GroupElement> = (0..2).map(|i| s.generator(i)).collect();
        assert!(aut.tuples.contains(&identity_tuple));
        // central maps x_i -> x_i z are all there
        for z0 in 0..3i64 {
            for z1 in 0..3i64 {
                let tuple = vec![
                    s.element(&[1, 0], &[z0]).unwrap(),
                    s.element(&[0, 1], &[z1]).unwrap(),
                ];
                assert!(aut.tuples.contains(&tuple), "missing central tuple");
            }
        }
    }

    #[test]
    fn aut_count_nontrivial_d() {
        // stabilizer has order 6, central part 3^2
        let s = spec(3, 2, &[vec![1], vec![0]]);
        let aut = enumerate_automorphisms(&s, false).unwrap();
        assert_eq!(aut.order(), 54);
    }

    #[test]
    fn automorphism_perms_are_homomorphisms() {
        let s = spec(3, 2, &[vec![1], vec![0]]);
        let aut = enumerate_automorphisms(&s, false).unwrap();
        let els = s.enumerate_elements(ORACLE_BOUND).unwrap();
        for tuple in &aut.tuples {
            let perm = automorphism_perm(&s, tuple).unwrap();
            assert_eq!(perm.apply(0), 0);
            for x in &els {
                for y in &els {
                    let xi = s.element_index(x);
                    let yi = s.element_index(y);
                    let lhs = perm.apply(s.element_index(&s.multiply(x, y)));
                    let rhs = s.element_index(&s.multiply(
                        &els[perm.apply(xi)],
                        &els[perm.apply(yi)],
                    ));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn aut_c_z_filter() {
        let s = spec(3, 2, &[]);
        let aut = enumerate_automorphisms(&s, false).unwrap();
        let central = filter_aut_c_z(&s, &aut);
        // exactly Hom(G/G', G') many: p^(n*m) = 9
        assert_eq!(central.order(), 9);
        let identity_tuple: Vec<GroupElement> = (0..2).map(|i| s.generator(i)).collect();
        assert!(central.tuples.contains(&identity_tuple));
        // a non-central automorphism (the generator swap) is excluded
        let swap = vec![s.generator(1), s.generator(0)];
        assert!(aut.tuples.contains(&swap));
        assert!(!central.tuples.contains(&swap));
    }

    #[test]
    fn holomorph_order_and_normalizing() {
        let s = spec(3, 2, &[]);
        let ctx = OracleContext::build(&s, false).unwrap();
        let hol = build_holomorph(&ctx).unwrap();
        assert_eq!(hol.order(), 27 * 432);
        // contains rho(G)
        for r in ctx.rho.elements() {
            assert!(hol.contains(r));
        }
        // every generator normalizes rho(G)
        for g in &ctx.hol_generators {
            let g_inv = g.inverse();
            for r in ctx.rho.elements() {
                let conj = g_inv.compose(r).compose(g);
                assert!(ctx.rho.contains(&conj));
            }
        }
    }

    #[test]
    fn subgroup_from_zero_form_is_rho() {
        let s = spec(3, 2, &[]);
        let ctx = OracleContext::build(&s, false).unwrap();
        let report = subgroup_from_form(&ctx, &BilinearForm::zero(&s));
        assert!(report.all_ok());
        let rho_sorted = {
            let mut v = ctx.rho.elements().to_vec();
            v.sort();
            v
        };
        assert_eq!(report.perms, rho_sorted);
    }

    #[test]
    fn subgroup_from_power_form_all_flags() {
        let s = spec(3, 2, &[]);
        let ctx = OracleContext::build(&s, false).unwrap();
        for c in 0..3 {
            let report = subgroup_from_form(&ctx, &BilinearForm::power_form(&s, c));
            assert!(report.all_ok(), "power form c = {c}");
            assert_eq!(report.perms.len(), 27);
        }
    }

    #[test]
    fn tampered_form_fails_some_flag() {
        let s = spec(3, 2, &[]);
        let ctx = OracleContext::build(&s, false).unwrap();
        let tampered = TamperedForm::tampering(&BilinearForm::power_form(&s, 1));
        let report = subgroup_from_form(&ctx, &tampered);
        assert!(!report.all_ok());
    }

    #[test]
    fn conjugation_checks() {
        let s = spec(3, 2, &[]);
        let ctx = OracleContext::build(&s, false).unwrap();
        // zero form, identity witness
        let w = crate::tg::sym_isomorphism(&s, &BilinearForm::zero(&s), Sampling::Exhaustive)
            .unwrap();
        assert!(conjugation_check(&ctx, &w).unwrap());
        // theta_d witnesses for the valid c at p = 3
        for c in [0i64, 2] {
            let w = crate::tg::theta_d(&s, c, Sampling::Exhaustive).unwrap();
            assert!(w.verified);
            assert!(conjugation_check(&ctx, &w).unwrap(), "c = {c}");
        }
        // corrupting the bijection breaks it
        let w = crate::tg::theta_d(&s, 2, Sampling::Exhaustive).unwrap();
        let mut table = w.table().unwrap();
        table.swap(1, 2);
        let corrupted = Perm::from_images(table).unwrap();
        assert!(!conjugation_check_table(&ctx, &w.delta, &corrupted).unwrap());
    }

    #[test]
    fn cross_check_27() {
        let s = spec(3, 2, &[]);
        let report = cross_check_correspondence(&s).unwrap();
        assert_eq!(report.forms_scanned, 81);
        assert!(report.ok(), "failures: {:?}", report.failures);
        // power forms are always equivariant
        assert!(report.equivariant_forms >= 3);
    }

    #[test]
    fn oracle_bounds() {
        let s = spec(3, 4, &[]);
        assert!(matches!(rho(&s), Err(Error::BoundExceeded { .. })));
        assert!(matches!(
            cross_check_correspondence(&s),
            Err(Error::BoundExceeded { .. })
        ));
        let s33 = spec(3, 3, &[]);
        // (3,3) needs the explicit flag
        assert!(matches!(
            enumerate_automorphisms(&s33, false),
            Err(Error::BoundExceeded { .. })
        ));
    }
}
