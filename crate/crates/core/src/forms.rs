//! Bilinear forms `G/G' × G/G' -> G'`, the circle operation they induce,
//! and the symmetric/anti-symmetric decomposition.
//!
//! Forms are written additively: a value in `G'` is an m-vector over F_p,
//! and a multiplicative exponent `1/2` becomes multiplication by `(p+1)/2`. A
//! form is stored by its values on generator-coset basis pairs and extended
//! bilinearly; well-definedness is automatic since `G/G'` is elementary
//! abelian.

use rand::Rng;
use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec, ORACLE_BOUND};
use crate::linalg::{vec_mat, FpMatrix};
use crate::Sampling;

/// Anything that assigns an m-vector to a pair of generator-exponent
/// vectors. Genuine bilinear forms implement this through their tensor;
/// the oracle's tampered tables implement it by lookup.
pub trait PairForm {
    fn spec(&self) -> &GroupSpec;
    fn eval(&self, u: &[u64], v: &[u64]) -> Vec<u64>;
}

/// A bilinear form, stored as the n×n array of its basis values
/// `tensor[i][j] = Δ(x_i G', x_j G')`, each an m-vector.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BilinearForm {
    spec: GroupSpec,
    tensor: Vec<u64>, // flat n*n*m, index (i*n + j)*m + t
}

impl PairForm for BilinearForm {
    fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    fn eval(&self, u: &[u64], v: &[u64]) -> Vec<u64> {
        self.evaluate(u, v)
    }
}

impl BilinearForm {
    pub fn zero(spec: &GroupSpec) -> Self {
        let n = spec.n();
        let m = spec.m();
        Self { spec: spec.clone(), tensor: vec![0; n * n * m] }
    }

    /// Builds a form from explicit basis values `tensor[i][j]`.
    pub fn from_tensor(spec: &GroupSpec, tensor: &[Vec<Vec<i64>>]) -> Result<Self> {
        let (n, m, p) = (spec.n(), spec.m(), spec.p() as i64);
        if tensor.len() != n
            || tensor.iter().any(|row| row.len() != n)
            || tensor.iter().flatten().any(|v| v.len() != m)
        {
            return Err(Error::DimensionMismatch(format!(
                "form tensor must be {n}x{n} vectors of length {m}"
            )));
        }
        let mut flat = Vec::with_capacity(n * n * m);
        for row in tensor {
            for value in row {
                flat.extend(value.iter().map(|&x| x.rem_euclid(p) as u64));
            }
        }
        Ok(Self { spec: spec.clone(), tensor: flat })
    }

    /// Decodes a form from its index in the enumeration of all
    /// `p^(n·n·m)` tensors, mixed-radix over the flat entries.
    pub fn from_index(spec: &GroupSpec, mut idx: u128) -> Self {
        let mut form = Self::zero(spec);
        let p = spec.p() as u128;
        for slot in form.tensor.iter_mut() {
            *slot = (idx % p) as u64;
            idx /= p;
        }
        form
    }

    /// Number of distinct bilinear tensors on this spec.
    pub fn tensor_count(spec: &GroupSpec) -> Option<u128> {
        let cells = (spec.n() * spec.n() * spec.m()) as u32;
        (spec.p() as u128).checked_pow(cells)
    }

    pub fn random<R: Rng>(spec: &GroupSpec, rng: &mut R) -> Self {
        let mut form = Self::zero(spec);
        for slot in form.tensor.iter_mut() {
            *slot = rng.gen_range(0..spec.p());
        }
        form
    }

    /// The power form `Δ_[c]` with `Δ(x, y) = c·(x ∧ y)`.
    pub fn power_form(spec: &GroupSpec, c: i64) -> Self {
        let c = c.rem_euclid(spec.p() as i64) as u64;
        let mut form = Self::zero(spec);
        for j in 0..spec.n() {
            for k in j + 1..spec.n() {
                let idx = spec.pair_index(j, k);
                form.value_mut(j, k)[idx] = c;
                form.value_mut(k, j)[idx] = (spec.p() - c) % spec.p();
            }
        }
        form
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn value(&self, i: usize, j: usize) -> &[u64] {
        let (n, m) = (self.spec.n(), self.spec.m());
        &self.tensor[(i * n + j) * m..(i * n + j + 1) * m]
    }

    fn value_mut(&mut self, i: usize, j: usize) -> &mut [u64] {
        let (n, m) = (self.spec.n(), self.spec.m());
        &mut self.tensor[(i * n + j) * m..(i * n + j + 1) * m]
    }

    /// Bilinear extension: `Σ_{i,j} u_i v_j tensor[i][j]`.
    pub fn evaluate(&self, u: &[u64], v: &[u64]) -> Vec<u64> {
        let (n, m, p) = (self.spec.n(), self.spec.m(), self.spec.p());
        debug_assert!(u.len() == n && v.len() == n);
        let mut out = vec![0u64; m];
        for i in 0..n {
            if u[i] == 0 {
                continue;
            }
            for j in 0..n {
                let f = (u[i] * v[j]) % p;
                if f == 0 {
                    continue;
                }
                let val = self.value(i, j);
                for t in 0..m {
                    out[t] = (out[t] + f * val[t]) % p;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.spec, other.spec);
        let p = self.spec.p();
        let tensor = self
            .tensor
            .iter()
            .zip(&other.tensor)
            .map(|(&a, &b)| (a + b) % p)
            .collect();
        Self { spec: self.spec.clone(), tensor }
    }

    pub fn neg(&self) -> Self {
        let p = self.spec.p();
        let tensor = self.tensor.iter().map(|&a| (p - a) % p).collect();
        Self { spec: self.spec.clone(), tensor }
    }

    pub fn scale(&self, c: i64) -> Self {
        let p = self.spec.p();
        let c = c.rem_euclid(p as i64) as u64;
        let tensor = self.tensor.iter().map(|&a| (a * c) % p).collect();
        Self { spec: self.spec.clone(), tensor }
    }

    pub fn is_zero(&self) -> bool {
        self.tensor.iter().all(|&x| x == 0)
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.spec.n();
        (0..n).all(|i| (i..n).all(|j| self.value(i, j) == self.value(j, i)))
    }

    pub fn is_antisymmetric(&self) -> bool {
        let (n, p) = (self.spec.n(), self.spec.p());
        for i in 0..n {
            if self.value(i, i).iter().any(|&x| x != 0) {
                return false;
            }
            for j in i + 1..n {
                let ij = self.value(i, j);
                let ji = self.value(j, i);
                if (0..self.spec.m()).any(|t| !(ij[t] + ji[t]).is_multiple_of(p)) {
                    return false;
                }
            }
        }
        true
    }

    /// Splits into symmetric plus anti-symmetric parts, using that 2 is
    /// invertible: `Δ_s(i,j) = (Δ(i,j) + Δ(j,i))/2`.
    pub fn sym_antisym_split(&self) -> (Self, Self) {
        let (n, m, p) = (self.spec.n(), self.spec.m(), self.spec.p());
        let inv2 = p.div_ceil(2);
        let mut sym = Self::zero(&self.spec);
        let mut anti = Self::zero(&self.spec);
        for i in 0..n {
            for j in 0..n {
                for t in 0..m {
                    let a = self.value(i, j)[t];
                    let b = self.value(j, i)[t];
                    sym.value_mut(i, j)[t] = ((a + b) * inv2) % p;
                    anti.value_mut(i, j)[t] = ((a + p - b) * inv2) % p;
                }
            }
        }
        (sym, anti)
    }

    /// The action of a `res` pair: `Δ^{(α,β)}(x, y) = β(Δ(α^{-1}x, α^{-1}y))`.
    pub fn transform(&self, alpha: &FpMatrix, beta: &FpMatrix) -> Result<Self> {
        let n = self.spec.n();
        let alpha_inv = alpha.inverse()?;
        let mut out = Self::zero(&self.spec);
        for i in 0..n {
            for j in 0..n {
                let v = self.evaluate(alpha_inv.row(i), alpha_inv.row(j));
                let v = vec_mat(&v, beta)?;
                out.value_mut(i, j).copy_from_slice(&v);
            }
        }
        Ok(out)
    }
}

/// An endomorphism `σ` of `G'` together with `τ = 1 + 2σ`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SigmaEndo {
    spec: GroupSpec,
    s: FpMatrix,
    tau: FpMatrix,
}

impl SigmaEndo {
    pub fn new(spec: &GroupSpec, s: FpMatrix) -> Result<Self> {
        if s.rows() != spec.m() || s.cols() != spec.m() || s.modulus() != spec.p() {
            return Err(Error::DimensionMismatch(format!(
                "sigma must be {0}x{0} mod {1}",
                spec.m(),
                spec.p()
            )));
        }
        let tau = FpMatrix::identity(spec.p(), spec.m()).add(&s.scale_int(2))?;
        Ok(Self { spec: spec.clone(), s, tau })
    }

    /// Recovers `σ = (τ - 1)/2` from τ.
    pub fn from_tau(spec: &GroupSpec, tau: &FpMatrix) -> Result<Self> {
        let p = spec.p();
        let inv2 = p.div_ceil(2) as i64;
        let s = tau.sub(&FpMatrix::identity(p, spec.m()))?.scale_int(inv2);
        let endo = Self::new(spec, s)?;
        debug_assert_eq!(&endo.tau, tau);
        Ok(endo)
    }

    pub fn scalar(spec: &GroupSpec, c: i64) -> Self {
        Self::new(spec, FpMatrix::scalar(spec.p(), spec.m(), c)).expect("shape is right")
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn sigma(&self) -> &FpMatrix {
        &self.s
    }

    pub fn tau(&self) -> &FpMatrix {
        &self.tau
    }

    /// The anti-symmetric form `Δ_σ(x, y) = σ(x ∧ y)`.
    pub fn form(&self) -> BilinearForm {
        let spec = &self.spec;
        let mut out = BilinearForm::zero(spec);
        for i in 0..spec.n() {
            for j in 0..spec.n() {
                if i == j {
                    continue;
                }
                let w = spec.wedge(&unit(spec.n(), i), &unit(spec.n(), j));
                let v = vec_mat(&w, &self.s).expect("wedge has length m");
                out.value_mut(i, j).copy_from_slice(&v);
            }
        }
        out
    }
}

fn unit(n: usize, i: usize) -> Vec<u64> {
    let mut v = vec![0u64; n];
    v[i] = 1;
    v
}

/// The σ with `Δ_σ = Δ` for an anti-symmetric Δ: row `(j,k)` of σ is
/// `Δ(x_j, x_k)`.
pub fn antisym_to_sigma(form: &BilinearForm) -> Result<SigmaEndo> {
    if !form.is_antisymmetric() {
        return Err(Error::NotAntiSymmetric);
    }
    let spec = form.spec().clone();
    let m = spec.m();
    let mut s = FpMatrix::zero(spec.p(), m, m);
    for (r, &(j, k)) in spec.pairs().iter().enumerate() {
        for (t, &v) in form.value(j, k).iter().enumerate() {
            s.set(r, t, v);
        }
    }
    SigmaEndo::new(&spec, s)
}

/// `x ∘ y = x y Δ(x, y)`.
pub fn circle_mul<F: PairForm + ?Sized>(
    form: &F,
    e1: &GroupElement,
    e2: &GroupElement,
) -> GroupElement {
    let spec = form.spec();
    let mut out = spec.multiply(e1, e2);
    let p = spec.p();
    for (slot, v) in out.c.iter_mut().zip(form.eval(&e1.a, &e2.a)) {
        *slot = (*slot + v) % p;
    }
    out
}

/// The inverse in `(G, ∘)`: `x^{⊖1} = x^{-1} Δ(x, x)`.
pub fn circle_inverse<F: PairForm + ?Sized>(form: &F, e: &GroupElement) -> GroupElement {
    let spec = form.spec();
    let mut out = spec.inverse(e);
    let p = spec.p();
    for (slot, v) in out.c.iter_mut().zip(form.eval(&e.a, &e.a)) {
        *slot = (*slot + v) % p;
    }
    out
}

/// `x^{∘ d}` by repeated circle multiplication (d may be negative).
pub fn circle_pow<F: PairForm + ?Sized>(form: &F, e: &GroupElement, d: i64) -> GroupElement {
    let spec = form.spec();
    let mut acc = spec.identity();
    if d == 0 {
        return acc;
    }
    let (base, reps) = if d < 0 {
        (circle_inverse(form, e), d.unsigned_abs())
    } else {
        (e.clone(), d as u64)
    };
    for _ in 0..reps {
        acc = circle_mul(form, &acc, &base);
    }
    acc
}

/// Closed form of the circle commutator:
/// `[x, y]_∘ = [x, y] Δ(x, y) Δ(y, x)^{-1}` (central, a-part zero).
pub fn circle_commutator<F: PairForm + ?Sized>(
    form: &F,
    e1: &GroupElement,
    e2: &GroupElement,
) -> GroupElement {
    let spec = form.spec();
    let p = spec.p();
    let mut c = spec.wedge(&e1.a, &e2.a);
    let fwd = form.eval(&e1.a, &e2.a);
    let bwd = form.eval(&e2.a, &e1.a);
    for t in 0..c.len() {
        c[t] = (c[t] + fwd[t] + p - bwd[t]) % p;
    }
    spec.central(&c)
}

/// `x^{⊖1} ∘ y^{⊖1} ∘ x ∘ y` evaluated literally; the independent check of
/// [`circle_commutator`].
pub fn circle_commutator_definitional<F: PairForm + ?Sized>(
    form: &F,
    e1: &GroupElement,
    e2: &GroupElement,
) -> GroupElement {
    let a = circle_mul(form, &circle_inverse(form, e1), &circle_inverse(form, e2));
    circle_mul(form, &circle_mul(form, &a, e1), e2)
}

/// The map `γ(y): x -> x Δ(x, y)` together with its validity checks.
pub struct GammaMap<'a> {
    form: &'a dyn PairForm,
    y: GroupElement,
}

/// Definitional report on one `γ(y)`; all four must hold for the gamma
/// condition of the correspondence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GammaValidity {
    pub is_homomorphism: bool,
    pub is_bijective: bool,
    pub fixes_quotient: bool,
    pub fixes_center: bool,
}

impl GammaValidity {
    pub fn all_ok(&self) -> bool {
        self.is_homomorphism && self.is_bijective && self.fixes_quotient && self.fixes_center
    }
}

pub fn gamma_of<'a>(form: &'a dyn PairForm, y: &GroupElement) -> GammaMap<'a> {
    GammaMap { form, y: y.clone() }
}

impl GammaMap<'_> {
    pub fn apply(&self, x: &GroupElement) -> GroupElement {
        let spec = self.form.spec();
        let p = spec.p();
        let mut out = x.clone();
        for (slot, v) in out.c.iter_mut().zip(self.form.eval(&x.a, &self.y.a)) {
            *slot = (*slot + v) % p;
        }
        out
    }

    /// Walks the whole group (small scale only) and checks that the map is
    /// an automorphism inducing the identity on `G/G'` and on `G'`.
    pub fn validate(&self) -> Result<GammaValidity> {
        let spec = self.form.spec();
        let elements = spec.enumerate_elements(ORACLE_BOUND)?;
        let mut seen = vec![false; elements.len()];
        let mut is_bijective = true;
        let mut fixes_quotient = true;
        let mut fixes_center = true;
        for e in &elements {
            let img = self.apply(e);
            let idx = spec.element_index(&img);
            if seen[idx] {
                is_bijective = false;
            }
            seen[idx] = true;
            if img.a != e.a {
                fixes_quotient = false;
            }
            if e.a.iter().all(|&x| x == 0) && img != *e {
                fixes_center = false;
            }
        }
        let mut is_homomorphism = true;
        'outer: for x1 in &elements {
            for x2 in &elements {
                let lhs = self.apply(&spec.multiply(x1, x2));
                let rhs = spec.multiply(&self.apply(x1), &self.apply(x2));
                if lhs != rhs {
                    is_homomorphism = false;
                    break 'outer;
                }
            }
        }
        Ok(GammaValidity { is_homomorphism, is_bijective, fixes_quotient, fixes_center })
    }
}

/// Checks the brace identity `(xy) ∘ z = (x ∘ z) · z^{-1} · (y ∘ z)` on the
/// requested triple sample.
pub fn brace_compatibility_check<F: PairForm + ?Sized>(
    form: &F,
    sampling: Sampling,
) -> Result<bool> {
    let spec = form.spec();
    let holds = |x: &GroupElement, y: &GroupElement, z: &GroupElement| {
        let lhs = circle_mul(form, &spec.multiply(x, y), z);
        let rhs = spec.multiply(
            &spec.multiply(&circle_mul(form, x, z), &spec.inverse(z)),
            &circle_mul(form, y, z),
        );
        lhs == rhs
    };
    match sampling {
        Sampling::Exhaustive => {
            let elements = spec.enumerate_elements(ORACLE_BOUND)?;
            for x in &elements {
                for y in &elements {
                    for z in &elements {
                        if !holds(x, y, z) {
                            return Ok(false);
                        }
                    }
                }
            }
            Ok(true)
        }
        Sampling::Random { pairs, seed } => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..pairs {
                let x = random_element(spec, &mut rng);
                let y = random_element(spec, &mut rng);
                let z = random_element(spec, &mut rng);
                if !holds(&x, &y, &z) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

pub fn random_element<R: Rng>(spec: &GroupSpec, rng: &mut R) -> GroupElement {
    let p = spec.p();
    GroupElement {
        a: (0..spec.n()).map(|_| rng.gen_range(0..p)).collect(),
        c: (0..spec.m()).map(|_| rng.gen_range(0..p)).collect(),
    }
}

/// Classification flags for the circle group of an anti-symmetric form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AntisymClass {
    /// `(G, ∘)` abelian, i.e. `Δ = Δ_[-1/2]`.
    pub abelian: bool,
    /// `(G, ∘)' = G'`: the values of `Δ_[1/2]Δ` span all of `G'`.
    pub derived_full: bool,
    /// `Z(G, ∘) = Z(G)`: the form `Δ_[1/2]Δ` has trivial radical.
    pub center_equal: bool,
}

/// Evaluates the isomorphism-class predicates for an anti-symmetric form.
pub fn classify_antisym(form: &BilinearForm) -> Result<AntisymClass> {
    if !form.is_antisymmetric() {
        return Err(Error::NotAntiSymmetric);
    }
    let spec = form.spec();
    let (n, m, p) = (spec.n(), spec.m(), spec.p());
    let inv2 = p.div_ceil(2) as i64;
    let abelian = *form == BilinearForm::power_form(spec, -inv2);

    // psi = Δ_[1/2] + Δ, whose values are half the circle commutators
    let psi = BilinearForm::power_form(spec, inv2).add(form);

    // span of psi values over basis pairs i < j
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            rows.push(psi.value(i, j).iter().map(|&x| x as i64).collect());
        }
    }
    let span = FpMatrix::from_rows(p, &rows)?;
    let derived_full = span.rank() == m;

    // radical: u with psi(u, e_j) = 0 for all j, i.e. u · R = 0 where R is
    // n x (n*m) with row i the concatenation of the psi(e_i, e_j)
    let mut radical_rows: Vec<Vec<i64>> = Vec::new();
    for i in 0..n {
        let mut row = Vec::with_capacity(n * m);
        for j in 0..n {
            row.extend(psi.value(i, j).iter().map(|&x| x as i64));
        }
        radical_rows.push(row);
    }
    let radical = FpMatrix::from_rows(p, &radical_rows)?;
    let center_equal = radical.rank() == n;

    Ok(AntisymClass { abelian, derived_full, center_equal })
}

/// The pair of matrices an automorphism induces on `G/G'` and on `G'`,
/// computed definitionally from its generator images: the a-parts give the
/// quotient matrix, and commutators of the images give the `G'` matrix.
pub fn induced_pair(spec: &GroupSpec, images: &[GroupElement]) -> (FpMatrix, FpMatrix) {
    let n = spec.n();
    debug_assert_eq!(images.len(), n);
    let mut b = FpMatrix::zero(spec.p(), n, n);
    for (i, g) in images.iter().enumerate() {
        for (j, &x) in g.a.iter().enumerate() {
            b.set(i, j, x);
        }
    }
    let mut derived = FpMatrix::zero(spec.p(), spec.m(), spec.m());
    for (r, &(j, k)) in spec.pairs().iter().enumerate() {
        let comm = spec.commutator_definitional(&images[j], &images[k]);
        for (t, &x) in comm.c.iter().enumerate() {
            derived.set(r, t, x);
        }
    }
    (b, derived)
}

/// Equivariance `Δ(x^β, y^β) = Δ(x, y)^β` for each automorphism in the
/// list, given by generator images, checked on all basis pairs.
pub fn equivariance_check(form: &BilinearForm, auts: &[Vec<GroupElement>]) -> bool {
    let spec = form.spec();
    auts.iter().all(|images| {
        let (b, beta) = induced_pair(spec, images);
        equivariant_under(form, &b, &beta)
    })
}

/// Matrix-level equivariance test against one induced pair.
pub fn equivariant_under(form: &BilinearForm, b: &FpMatrix, beta: &FpMatrix) -> bool {
    let spec = form.spec();
    let n = spec.n();
    for i in 0..n {
        for j in 0..n {
            let lhs = form.evaluate(b.row(i), b.row(j));
            let rhs = vec_mat(form.value(i, j), beta).expect("value has length m");
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// Result of checking that `G` and `(G, ∘_σ)` are isoclinic via the pair
/// (identity on the central quotient, τ on the derived subgroup).
#[derive(Clone, Debug)]
pub struct IsoclinismReport {
    pub pass: bool,
    pub pairs_checked: usize,
}

/// Verifies `[x, y]_∘ = [x, y]^τ` on all basis pairs, with the circle
/// commutator computed definitionally.
pub fn isoclinism_witness(se: &SigmaEndo) -> Result<IsoclinismReport> {
    if !se.tau().is_invertible() {
        return Err(Error::TauSingular);
    }
    let spec = se.spec().clone();
    let form = se.form();
    let mut pass = true;
    let mut pairs_checked = 0;
    for j in 0..spec.n() {
        for k in 0..spec.n() {
            if j == k {
                continue;
            }
            let xj = spec.generator(j);
            let xk = spec.generator(k);
            let circ = circle_commutator_definitional(&form, &xj, &xk);
            let plain = spec.commutator(&xj, &xk);
            let expect = spec.central(&vec_mat(&plain.c, se.tau())?);
            pairs_checked += 1;
            if circ != expect {
                pass = false;
            }
        }
    }
    Ok(IsoclinismReport { pass, pairs_checked })
}
