//! The structure of T(G): the lifting criterion, the `(Q, A, M)`
//! parametrization of its anti-symmetric part, isomorphism witnesses with
//! machine verification, order formulas, and the semidirect composition of
//! T(G) elements.
//!
//! The central equation is `A^{-1}·D·Â = D·T^{-1}`, where `A` is an
//! invertible matrix on `G/G'`, `Â` its exterior square on `G'`, `D` the
//! matrix of the p-th power map, and `T = 1 + 2σ`. An invertible pair
//! `(A, T)` satisfying it is exactly what lifts to an isomorphism
//! `G -> (G, ∘_σ)`, and the lift is constructed and verified here rather
//! than taken on faith.

use num_bigint::BigUint;
use rand::Rng;
use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::forms::{circle_commutator_definitional, circle_mul, circle_pow, BilinearForm, SigmaEndo};
use crate::group::{GroupElement, GroupSpec, MulTable, ENUM_BOUND};
use crate::linalg::{gl_order, reduce_to_i0, solve_affine, vec_mat, AffineSolution, FpMatrix};
use crate::Sampling;

/// Whether `(A, T)` satisfies `A^{-1}·D·Â = D·T^{-1}`.
pub fn criterion_holds(spec: &GroupSpec, a: &FpMatrix, t: &FpMatrix) -> Result<bool> {
    if a.rows() != spec.n() || !a.is_square() || t.rows() != spec.m() || !t.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "criterion needs A {0}x{0} and T {1}x{1}",
            spec.n(),
            spec.m()
        )));
    }
    let (a_inv, t_inv) = match (a.inverse(), t.inverse()) {
        (Ok(ai), Ok(ti)) => (ai, ti),
        _ => return Err(Error::SingularInput),
    };
    let lhs = a_inv.mul(spec.d())?.mul(&spec.wedge_matrix(a))?;
    let rhs = spec.d().mul(&t_inv)?;
    Ok(lhs == rhs)
}

/// An invertible pair `(A, T)` that satisfies the criterion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionSolution {
    spec: GroupSpec,
    a: FpMatrix,
    t: FpMatrix,
}

impl CriterionSolution {
    pub fn new(spec: &GroupSpec, a: FpMatrix, t: FpMatrix) -> Result<Self> {
        if !criterion_holds(spec, &a, &t)? {
            return Err(Error::CriterionFails);
        }
        Ok(Self { spec: spec.clone(), a, t })
    }

    pub fn a(&self) -> &FpMatrix {
        &self.a
    }

    pub fn t(&self) -> &FpMatrix {
        &self.t
    }

    /// Recovers `σ = (T - 1)/2`.
    pub fn sigma(&self) -> SigmaEndo {
        SigmaEndo::from_tau(&self.spec, &self.t).expect("T has the right shape")
    }
}

/// The solutions `T` of the criterion for one fixed `A`, represented by the
/// affine space of `X = T^{-1}` with `D·X = A^{-1}·D·Â`.
pub struct TSolutions {
    /// `None` when the linear system is infeasible (possible only for
    /// rank-deficient D).
    pub space: Option<AffineSolution>,
}

impl TSolutions {
    pub fn is_empty(&self) -> bool {
        self.space.is_none()
    }

    /// Enumerates every invertible `T` in the set. Bounded by `limit`
    /// candidates; intended for desk scale.
    pub fn enumerate_invertible_t(&self, limit: u128) -> Result<Vec<FpMatrix>> {
        let Some(space) = &self.space else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        space.for_each_solution(limit, |x| {
            if let Ok(t) = x.inverse() {
                out.push(t);
            }
        })?;
        Ok(out)
    }

    /// Structural membership: is `T^{-1}` in the affine space, checked
    /// against the elimination output rather than the defining equation?
    pub fn contains_t(&self, t: &FpMatrix) -> bool {
        let Some(space) = &self.space else {
            return false;
        };
        match t.inverse() {
            Ok(x) => space.contains(&x),
            Err(_) => false,
        }
    }

    /// Dimension of the affine space of `X = T^{-1}`.
    pub fn dim(&self) -> usize {
        self.space.as_ref().map_or(0, |s| s.dim())
    }
}

/// All invertible `T` with `criterion_holds(spec, A, T)`, as an affine
/// space in `X = T^{-1}`; empty when the system is infeasible.
pub fn solve_t_for_a(spec: &GroupSpec, a: &FpMatrix) -> Result<TSolutions> {
    let a_inv = a.inverse().map_err(|_| Error::SingularInput)?;
    let k = a_inv.mul(spec.d())?.mul(&spec.wedge_matrix(a))?;
    match solve_affine(spec.d(), &k) {
        Ok(space) => Ok(TSolutions { space: Some(space) }),
        Err(Error::Infeasible) => Ok(TSolutions { space: None }),
        Err(e) => Err(e),
    }
}

/// Base-change data for a full-rank spec: `U·D·V = [I | 0]`, cached with
/// the inverses.
#[derive(Clone, Debug)]
pub struct ReducedBasis {
    pub u: FpMatrix,
    pub u_inv: FpMatrix,
    pub v: FpMatrix,
    pub v_inv: FpMatrix,
}

impl ReducedBasis {
    pub fn compute(spec: &GroupSpec) -> Result<Self> {
        let (u, v) = reduce_to_i0(spec.d())?;
        let u_inv = u.inverse()?;
        let v_inv = v.inverse()?;
        Ok(Self { u, u_inv, v, v_inv })
    }
}

/// An element of `res(S')` in full-rank coordinates `(Q, A, M)` with
/// `Q ∈ F_p^{(m-n)×n}`, `A ∈ GL_n`, `M ∈ GL_{m-n}`.
///
/// `A` here is the matrix on `G/G'` in the reduced basis; transport back to
/// the original basis goes through [`ReducedBasis`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResElement {
    spec: GroupSpec,
    q: FpMatrix,
    a: FpMatrix,
    m: FpMatrix,
}

impl ResElement {
    pub fn new(spec: &GroupSpec, q: FpMatrix, a: FpMatrix, m: FpMatrix) -> Result<Self> {
        let n = spec.n();
        let d = spec.m().checked_sub(n).ok_or(Error::NotFullRank)?;
        if spec.d().rank() != n {
            return Err(Error::NotFullRank);
        }
        if q.rows() != d || q.cols() != n || a.rows() != n || a.cols() != n || m.rows() != d || m.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "(Q, A, M) must be {d}x{n}, {n}x{n}, {d}x{d}"
            )));
        }
        if !a.is_invertible() || !m.is_invertible() {
            return Err(Error::SingularInput);
        }
        Ok(Self { spec: spec.clone(), q, a, m })
    }

    pub fn identity(spec: &GroupSpec) -> Result<Self> {
        let n = spec.n();
        let d = spec.m().checked_sub(n).ok_or(Error::NotFullRank)?;
        Self::new(
            spec,
            FpMatrix::zero(spec.p(), d, n),
            FpMatrix::identity(spec.p(), n),
            FpMatrix::identity(spec.p(), d),
        )
    }

    pub fn random<R: Rng>(spec: &GroupSpec, rng: &mut R) -> Result<Self> {
        let n = spec.n();
        let d = spec.m().checked_sub(n).ok_or(Error::NotFullRank)?;
        Self::new(
            spec,
            FpMatrix::random(spec.p(), d, n, rng),
            FpMatrix::random_invertible(spec.p(), n, rng),
            if d == 0 {
                FpMatrix::identity(spec.p(), 0)
            } else {
                FpMatrix::random_invertible(spec.p(), d, rng)
            },
        )
    }

    pub fn q(&self) -> &FpMatrix {
        &self.q
    }

    pub fn a(&self) -> &FpMatrix {
        &self.a
    }

    pub fn m(&self) -> &FpMatrix {
        &self.m
    }

    /// The semidirect law
    /// `(Q1,A1,M1)·(Q2,A2,M2) = (M2^{-1}Q1 + Q2 A1^{-1}, A1A2, M1M2)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let q = other
            .m
            .inverse()?
            .mul(&self.q)?
            .add(&other.q.mul(&self.a.inverse()?)?)?;
        Self::new(
            &self.spec,
            q,
            self.a.mul(&other.a)?,
            self.m.mul(&other.m)?,
        )
    }

    /// `(−MQA, A^{-1}, M^{-1})`.
    pub fn inverse(&self) -> Result<Self> {
        let q = self.m.mul(&self.q)?.mul(&self.a)?.scale_int(-1);
        Self::new(&self.spec, q, self.a.inverse()?, self.m.inverse()?)
    }

    /// The faithful block-matrix image `[[A, 0], [MQA, M]]`; pairing it
    /// with `A` turns the semidirect law into plain matrix multiplication.
    pub fn block_matrix(&self) -> FpMatrix {
        let n = self.spec.n();
        let d = self.spec.m() - n;
        let p = self.spec.p();
        let mqa = self.m.mul(&self.q).unwrap().mul(&self.a).unwrap();
        FpMatrix::from_blocks(&self.a, &FpMatrix::zero(p, n, d), &mqa, &self.m)
            .expect("blocks are consistent")
    }

    /// Embeds into an original-coordinates criterion pair `(A, T)`:
    /// `T_red = Â_red^{-1}·[[A, 0], [MQA, M]]` in the reduced basis, then
    /// transported back through `(U, V)`.
    pub fn to_criterion_pair(&self, basis: &ReducedBasis) -> Result<(FpMatrix, FpMatrix)> {
        let a_orig = basis.u_inv.mul(&self.a)?.mul(&basis.u)?;
        let a_hat_orig = self.spec.wedge_matrix(&a_orig);
        let a_hat_red = basis.v_inv.mul(&a_hat_orig)?.mul(&basis.v)?;
        let t_red = a_hat_red.inverse()?.mul(&self.block_matrix())?;
        let t_orig = basis.v.mul(&t_red)?.mul(&basis.v_inv)?;
        Ok((a_orig, t_orig))
    }

    /// The `res` pair `(A, β)` with `β = Â·T` in original coordinates.
    pub fn to_res_pair(&self, basis: &ReducedBasis) -> Result<(FpMatrix, FpMatrix)> {
        let (a, t) = self.to_criterion_pair(basis)?;
        let beta = self.spec.wedge_matrix(&a).mul(&t)?;
        Ok((a, beta))
    }
}

/// `|res(S')| = p^((m-n)·n) · |GL_n| · |GL_{m-n}|` for full-rank D.
pub fn res_group_order(spec: &GroupSpec) -> Result<BigUint> {
    let n = spec.n();
    if spec.d().rank() != n {
        return Err(Error::NotFullRank);
    }
    let d = spec.m() - n;
    let free = BigUint::from(spec.p()).pow((d * n) as u32);
    Ok(free * gl_order(n, spec.p()) * gl_order(d, spec.p()))
}

/// `|S| = p^(C(n,2)·C(n+1,2))`: one p for every choice of a symmetric pair
/// of generator cosets and a basis commutator.
pub fn sym_part_order(spec: &GroupSpec) -> BigUint {
    let n = spec.n();
    let exp = (n * (n - 1) / 2) * (n * (n + 1) / 2);
    BigUint::from(spec.p()).pow(exp as u32)
}

/// Whether an order is known to be all of T(G) or only the order of the
/// subgroup the full-rank machinery certifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderTag {
    /// `Aut(G) = Aut_c(G)` was certified, so this is `|T(G)|`.
    Unconditional,
    /// Only the order of the `S ⋊ res(S')` subgroup contained in T(G).
    ConditionalSubgroup,
}

/// `|S| · |res(S')|`, tagged by whether the stabilizer search certified
/// `Aut(G) = Aut_c(G)`.
pub fn tg_order(spec: &GroupSpec, aut_c_verified: bool) -> Result<(BigUint, OrderTag)> {
    let order = sym_part_order(spec) * res_group_order(spec)?;
    let tag = if aut_c_verified {
        OrderTag::Unconditional
    } else {
        OrderTag::ConditionalSubgroup
    };
    Ok((order, tag))
}

/// How an isomorphism witness acts on normal forms.
#[derive(Clone, Debug)]
pub enum ThetaDef {
    /// `x -> x^d` (for the power form with `d(2c+1) = 1`).
    PowerMap { d: u64 },
    /// `x -> x·(½ Δ₀(x,x))` for a symmetric Δ₀.
    SymShift,
    /// Generator substitution from a criterion solution: each `x_i` goes to
    /// the ∘-product determined by row i of A, central parts through `Â·T`.
    FromCriterion { a: FpMatrix },
}

/// A verified (or failed) isomorphism `θ : G -> (G, ∘_Δ)` with its `res`
/// matrices.
#[derive(Clone, Debug)]
pub struct IsoWitness {
    spec: GroupSpec,
    pub delta: BilinearForm,
    pub theta: ThetaDef,
    pub res_c: FpMatrix,
    pub res_z: FpMatrix,
    pub verified: bool,
    pub pairs_checked: u64,
    pub exhaustive: bool,
}

impl IsoWitness {
    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// Applies θ to one normal form.
    pub fn apply(&self, e: &GroupElement) -> GroupElement {
        let spec = &self.spec;
        match &self.theta {
            ThetaDef::PowerMap { d } => spec.power(e, *d as i64),
            ThetaDef::SymShift => {
                let p = spec.p();
                let inv2 = p.div_ceil(2);
                let mut out = e.clone();
                let v = self.delta.evaluate(&e.a, &e.a);
                for (slot, x) in out.c.iter_mut().zip(v) {
                    *slot = (*slot + x * inv2) % p;
                }
                out
            }
            ThetaDef::FromCriterion { a } => {
                let mut acc = spec.identity();
                for (i, &exp) in e.a.iter().enumerate() {
                    if exp == 0 {
                        continue;
                    }
                    let gen_image = GroupElement {
                        a: a.row(i).to_vec(),
                        c: vec![0; spec.m()],
                    };
                    let powered = circle_pow(&self.delta, &gen_image, exp as i64);
                    acc = circle_mul(&self.delta, &acc, &powered);
                }
                let shift = vec_mat(&e.c, &self.res_z).expect("c has length m");
                let p = spec.p();
                for (slot, x) in acc.c.iter_mut().zip(shift) {
                    *slot = (*slot + x) % p;
                }
                acc
            }
        }
    }

    /// The full value table of θ as element indices (requires the group to
    /// be enumerable).
    pub fn table(&self) -> Result<Vec<u32>> {
        let spec = &self.spec;
        let order = spec.order_u128().ok_or(Error::BoundExceeded {
            needed: u128::MAX,
            bound: ENUM_BOUND,
        })?;
        if order > ENUM_BOUND {
            return Err(Error::BoundExceeded { needed: order, bound: ENUM_BOUND });
        }
        let size = order as usize;
        let pm = (spec.p() as usize).pow(spec.m() as u32);
        let mut table = vec![0u32; size];
        // theta(a, c) = theta(a, 0) + central(c · res_z), so one expensive
        // application per coset is enough.
        for a_idx in 0..size / pm {
            let base = self.apply(&spec.element_at(a_idx * pm));
            for c_idx in 0..pm {
                let c = spec.central_at(c_idx);
                let shift = vec_mat(&c, &self.res_z)?;
                let mut img = base.clone();
                for (slot, x) in img.c.iter_mut().zip(shift) {
                    *slot = (*slot + x) % spec.p();
                }
                table[a_idx * pm + c_idx] = spec.element_index(&img) as u32;
            }
        }
        Ok(table)
    }
}

/// Shared scaffolding for exhaustive witness verification: the
/// multiplication table of a small group.
pub struct VerifyContext {
    pub mt: MulTable,
    pn: usize,
}

impl VerifyContext {
    pub fn new(spec: &GroupSpec) -> Result<Self> {
        let mt = MulTable::build(spec, 729)?;
        Ok(Self { mt, pn: (spec.p() as usize).pow(spec.n() as u32) })
    }
}

/// Runs the iso-condition check `(xy)^θ = x^θ ∘ y^θ` plus bijectivity.
/// Returns `(verified, pairs_checked, exhaustive)`.
fn verify_map(
    spec: &GroupSpec,
    delta: &BilinearForm,
    witness: &IsoWitness,
    sampling: Sampling,
    ctx: Option<&VerifyContext>,
) -> Result<(bool, u64, bool)> {
    match sampling {
        Sampling::Exhaustive => {
            let owned;
            let ctx = match ctx {
                Some(c) => c,
                None => {
                    owned = VerifyContext::new(spec)?;
                    &owned
                }
            };
            let table = witness.table()?;
            // bijectivity
            let mut seen = vec![false; table.len()];
            for &img in &table {
                if seen[img as usize] {
                    return Ok((false, 0, true));
                }
                seen[img as usize] = true;
            }
            // delta on cosets, as central indices
            let pn = ctx.pn;
            let pm = ctx.mt.pm;
            let n = spec.n();
            let mut delta_tab = vec![0u32; pn * pn];
            let coset = |idx: usize| -> Vec<u64> {
                let mut v = vec![0u64; n];
                let mut x = idx;
                for slot in (0..n).rev() {
                    v[slot] = (x % spec.p() as usize) as u64;
                    x /= spec.p() as usize;
                }
                v
            };
            let cosets: Vec<Vec<u64>> = (0..pn).map(coset).collect();
            for (u, cu) in cosets.iter().enumerate() {
                for (v, cv) in cosets.iter().enumerate() {
                    delta_tab[u * pn + v] = spec.central_index(&delta.evaluate(cu, cv)) as u32;
                }
            }
            let mt = &ctx.mt;
            let size = table.len();
            let mut pairs = 0u64;
            for i in 0..size {
                let ti = table[i] as usize;
                let ai = ti / pm;
                for j in 0..size {
                    let tj = table[j] as usize;
                    let lhs = table[mt.mul(i, j)] as usize;
                    let prod = mt.mul(ti, tj);
                    let rhs = mt.add_central(prod, delta_tab[ai * pn + tj / pm] as usize);
                    pairs += 1;
                    if lhs != rhs {
                        return Ok((false, pairs, true));
                    }
                }
            }
            Ok((true, pairs, true))
        }
        Sampling::Random { pairs, seed } => {
            // Bijectivity still checked globally when the group fits.
            if spec.order_u128().is_some_and(|o| o <= ENUM_BOUND) {
                let table = witness.table()?;
                let mut seen = vec![false; table.len()];
                for &img in &table {
                    if seen[img as usize] {
                        return Ok((false, 0, false));
                    }
                    seen[img as usize] = true;
                }
            }
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for k in 0..pairs {
                let x = crate::forms::random_element(spec, &mut rng);
                let y = crate::forms::random_element(spec, &mut rng);
                let lhs = witness.apply(&spec.multiply(&x, &y));
                let rhs = circle_mul(delta, &witness.apply(&x), &witness.apply(&y));
                if lhs != rhs {
                    return Ok((false, k as u64 + 1, false));
                }
            }
            Ok((true, pairs as u64, false))
        }
    }
}

/// The slice isomorphism for a symmetric form: `θ(x) = x·(½ Δ₀(x,x))`,
/// which has trivial `res`.
pub fn sym_isomorphism(
    spec: &GroupSpec,
    delta0: &BilinearForm,
    sampling: Sampling,
) -> Result<IsoWitness> {
    if !delta0.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let mut witness = IsoWitness {
        spec: spec.clone(),
        delta: delta0.clone(),
        theta: ThetaDef::SymShift,
        res_c: FpMatrix::identity(spec.p(), spec.n()),
        res_z: FpMatrix::identity(spec.p(), spec.m()),
        verified: false,
        pairs_checked: 0,
        exhaustive: false,
    };
    let (ok, pairs, exhaustive) = verify_map(spec, delta0, &witness, sampling, None)?;
    witness.verified = ok;
    witness.pairs_checked = pairs;
    witness.exhaustive = exhaustive;
    Ok(witness)
}

/// The power-map isomorphism `θ_d(x) = x^d` onto the circle group of the
/// power form `Δ_[c]`, where `d = (2c+1)^{-1} mod p` taken in `[1, p-1]`.
pub fn theta_d(spec: &GroupSpec, c: i64, sampling: Sampling) -> Result<IsoWitness> {
    let p = spec.p();
    let two_c_plus_1 = (2 * c + 1).rem_euclid(p as i64) as u64;
    let d = crate::linalg::mod_inverse(two_c_plus_1, p).ok_or(Error::HalfExcluded)?;
    let delta = BilinearForm::power_form(spec, c);
    let mut witness = IsoWitness {
        spec: spec.clone(),
        delta: delta.clone(),
        theta: ThetaDef::PowerMap { d },
        res_c: FpMatrix::scalar(p, spec.n(), d as i64),
        res_z: FpMatrix::scalar(p, spec.m(), d as i64),
        verified: false,
        pairs_checked: 0,
        exhaustive: false,
    };
    let (ok, pairs, exhaustive) = verify_map(spec, &delta, &witness, sampling, None)?;
    witness.verified = ok;
    witness.pairs_checked = pairs;
    witness.exhaustive = exhaustive;
    Ok(witness)
}

/// Builds and verifies the isomorphism `θ : G -> (G, ∘_σ)` for a criterion
/// solution, with `res(θ) = (A, Â·T)`.
pub fn build_isomorphism(
    spec: &GroupSpec,
    sol: &CriterionSolution,
    sampling: Sampling,
) -> Result<IsoWitness> {
    build_isomorphism_with(spec, sol, sampling, None)
}

/// [`build_isomorphism`] with a caller-provided [`VerifyContext`], for
/// callers that verify many witnesses on one spec.
pub fn build_isomorphism_with(
    spec: &GroupSpec,
    sol: &CriterionSolution,
    sampling: Sampling,
    ctx: Option<&VerifyContext>,
) -> Result<IsoWitness> {
    let delta = sol.sigma().form();
    let res_z = spec.wedge_matrix(sol.a()).mul(sol.t())?;
    let mut witness = IsoWitness {
        spec: spec.clone(),
        delta: delta.clone(),
        theta: ThetaDef::FromCriterion { a: sol.a().clone() },
        res_c: sol.a().clone(),
        res_z,
        verified: false,
        pairs_checked: 0,
        exhaustive: false,
    };
    // The construction must reproduce its own res matrices.
    for i in 0..spec.n() {
        let img = witness.apply(&spec.generator(i));
        if img.a != witness.res_c.row(i) {
            return Err(Error::VerificationFailed(format!(
                "generator {i} lands in the wrong coset"
            )));
        }
    }
    for k in 0..spec.m() {
        let mut c = vec![0u64; spec.m()];
        c[k] = 1;
        let img = witness.apply(&spec.central(&c));
        if img.c != witness.res_z.row(k) || img.a.iter().any(|&x| x != 0) {
            return Err(Error::VerificationFailed(format!(
                "central basis element {k} does not map through Â·T"
            )));
        }
    }
    let (ok, pairs, exhaustive) = verify_map(spec, &delta, &witness, sampling, ctx)?;
    if !ok {
        return Err(Error::VerificationFailed(
            "iso condition fails for a criterion solution".into(),
        ));
    }
    witness.verified = true;
    witness.pairs_checked = pairs;
    witness.exhaustive = exhaustive;
    Ok(witness)
}

/// The presentation exponents of the circle group: `D° = D·T^{-1}`.
pub fn circle_presentation_matrix(spec: &GroupSpec, t: &FpMatrix) -> Result<FpMatrix> {
    let t_inv = t.inverse().map_err(|_| Error::SingularT)?;
    spec.d().mul(&t_inv)
}

/// Checks by direct ∘-evaluation that the relations
/// `x_i^{∘p} = prod_{j<k} [x_j, x_k]_∘^{D°[i][(j,k)]}` hold in `(G, ∘_σ)`.
pub fn circle_presentation_check(spec: &GroupSpec, t: &FpMatrix) -> Result<bool> {
    let d_circ = circle_presentation_matrix(spec, t)?;
    let form = SigmaEndo::from_tau(spec, t)?.form();
    for i in 0..spec.n() {
        let lhs = circle_pow(&form, &spec.generator(i), spec.p() as i64);
        let mut rhs = spec.identity();
        for (idx, &(j, k)) in spec.pairs().iter().enumerate() {
            let comm = circle_commutator_definitional(&form, &spec.generator(j), &spec.generator(k));
            let powered = circle_pow(&form, &comm, d_circ.get(i, idx) as i64);
            rhs = circle_mul(&form, &rhs, &powered);
        }
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An element of `T(G) ≃ S ⋊ res(S')`: a symmetric form plus a `res` pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TgElement {
    pub sym: BilinearForm,
    pub res_c: FpMatrix,
    pub res_z: FpMatrix,
}

impl TgElement {
    pub fn identity(spec: &GroupSpec) -> Self {
        Self {
            sym: BilinearForm::zero(spec),
            res_c: FpMatrix::identity(spec.p(), spec.n()),
            res_z: FpMatrix::identity(spec.p(), spec.m()),
        }
    }

    /// Reads off the T(G) coordinates of a verified witness: the symmetric
    /// part of its form and its `res` pair.
    pub fn from_witness(witness: &IsoWitness) -> Self {
        let (sym, _anti) = witness.delta.sym_antisym_split();
        Self { sym, res_c: witness.res_c.clone(), res_z: witness.res_z.clone() }
    }

    /// Composition matching `θ1 θ2`: the symmetric part of the first is
    /// pushed through the `res` of the second, `res` parts multiply.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let sym = self.sym.transform(&other.res_c, &other.res_z)?.add(&other.sym);
        Ok(Self {
            sym,
            res_c: self.res_c.mul(&other.res_c)?,
            res_z: self.res_z.mul(&other.res_z)?,
        })
    }
}

/// Result of searching `{A ∈ GL_n : A·D = D·Â}`, the subgroup of
/// `Aut(G/G')` induced by `Aut(G)`.
#[derive(Clone, Debug)]
pub enum StabilizerOutcome {
    /// Complete enumeration.
    Exhaustive { stabilizer: Vec<FpMatrix> },
    /// Randomized search only; lists any nontrivial stabilizing A found.
    Unknown { sampled: u64, nontrivial_found: Vec<FpMatrix> },
}

impl StabilizerOutcome {
    /// `true` exactly when the search proved the stabilizer is `{I}`,
    /// which certifies `Aut(G) = Aut_c(G)`.
    pub fn certified_trivial(&self) -> bool {
        matches!(self, StabilizerOutcome::Exhaustive { stabilizer } if stabilizer.len() == 1)
    }
}

const STABILIZER_EXHAUSTIVE_LIMIT: u64 = 10_000_000;

/// Searches for the stabilizer, exhaustively when `|GL_n(F_p)| <= 10^7`
/// and by seeded random sampling otherwise.
pub fn induced_aut_stabilizer(spec: &GroupSpec, budget: u64) -> StabilizerOutcome {
    let n = spec.n();
    let p = spec.p();
    let stabilizes = |a: &FpMatrix| -> bool {
        // A·D = D·Â, the singular-safe form of the criterion with T = I
        let lhs = a.mul(spec.d()).expect("shapes agree");
        let rhs = spec.d().mul(&spec.wedge_matrix(a)).expect("shapes agree");
        lhs == rhs
    };
    if gl_order(n, p) <= BigUint::from(STABILIZER_EXHAUSTIVE_LIMIT) {
        let mut stabilizer = Vec::new();
        let scanned = crate::linalg::enumerate_gl(n, p, u128::from(4 * STABILIZER_EXHAUSTIVE_LIMIT), |a| {
            if stabilizes(a) {
                stabilizer.push(a.clone());
            }
        });
        if scanned.is_ok() {
            return StabilizerOutcome::Exhaustive { stabilizer };
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x57AB);
    let mut nontrivial_found = Vec::new();
    for _ in 0..budget {
        let a = FpMatrix::random_invertible(p, n, &mut rng);
        if !a.is_identity() && stabilizes(&a) && nontrivial_found.len() < 8 {
            nontrivial_found.push(a);
        }
    }
    StabilizerOutcome::Unknown { sampled: budget, nontrivial_found }
}
