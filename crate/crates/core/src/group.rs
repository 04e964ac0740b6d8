//! The special family of class-two p-groups given by power-commutator data.
//!
//! A spec `(p, n, D)` presents the group on generators `x_1, ..., x_n` with
//! all commutators `[x_j, x_k]` central of order p and with p-th powers
//! `x_i^p = prod_{j<k} [x_j, x_k]^{D[i][(j,k)]}`. The group has order
//! `p^(n + C(n,2))`; both `G/G'` and `G'` are elementary abelian.
//!
//! Elements are kept in the normal form `prod x_i^{a_i} * prod [x_j,x_k]^{c_(j,k)}`
//! as an exponent pair `(a, c)`. Commutator coordinates are indexed by the
//! pairs `(j,k)`, `j < k`, in lexicographic order; every m-vector in the
//! crate uses this one convention.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::linalg::{vec_mat, FpMatrix};

/// Default cap on full element enumeration.
pub const ENUM_BOUND: u128 = 2_000_000;
/// Cap on group order for the permutation oracle.
pub const ORACLE_BOUND: u128 = 2_000;

/// Power-commutator data `(p, n, D)` for one group of the family.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupSpec {
    p: u64,
    n: usize,
    m: usize,
    d: FpMatrix,
}

impl std::fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GroupSpec(p={}, n={}, D={:?})", self.p, self.n, self.d)
    }
}

/// Normal-form element: generator exponents `a` and commutator exponents `c`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroupElement {
    pub a: Vec<u64>,
    pub c: Vec<u64>,
}

impl GroupSpec {
    pub fn new(p: u64, n: usize, d: FpMatrix) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSpec {
                field: "n".into(),
                message: format!("need at least 2 generators, got {n}"),
            });
        }
        let m = n * (n - 1) / 2;
        if d.modulus() != p {
            return Err(Error::InvalidSpec {
                field: "D".into(),
                message: format!("D has modulus {}, spec has p = {}", d.modulus(), p),
            });
        }
        if d.rows() != n || d.cols() != m {
            return Err(Error::InvalidSpec {
                field: "D".into(),
                message: format!(
                    "D must be {}x{} for n = {}, got {}x{}",
                    n,
                    m,
                    n,
                    d.rows(),
                    d.cols()
                ),
            });
        }
        Ok(Self { p, n, m, d })
    }

    /// Parses the CLI spec format `{"p": int, "n": int, "D": [[int; m]; n]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::InvalidSpec {
                field: "<document>".into(),
                message: format!("not valid JSON: {e}"),
            })?;
        let obj = value.as_object().ok_or_else(|| Error::InvalidSpec {
            field: "<document>".into(),
            message: "expected a JSON object".into(),
        })?;
        let p = obj
            .get("p")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::InvalidSpec {
                field: "p".into(),
                message: "missing or not a positive integer".into(),
            })?;
        let n = obj
            .get("n")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::InvalidSpec {
                field: "n".into(),
                message: "missing or not a positive integer".into(),
            })? as usize;
        let rows = obj
            .get("D")
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::InvalidSpec {
                field: "D".into(),
                message: "missing or not an array of rows".into(),
            })?;
        let mut d_rows: Vec<Vec<i64>> = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_array().ok_or_else(|| Error::InvalidSpec {
                field: format!("D[{i}]"),
                message: "not an array".into(),
            })?;
            let mut out = Vec::with_capacity(row.len());
            for (j, entry) in row.iter().enumerate() {
                let e = entry.as_i64().ok_or_else(|| Error::InvalidSpec {
                    field: format!("D[{i}][{j}]"),
                    message: "not an integer".into(),
                })?;
                out.push(e);
            }
            d_rows.push(out);
        }
        let m = n.checked_mul(n.saturating_sub(1)).map(|x| x / 2).unwrap_or(0);
        if d_rows.len() != n || d_rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidSpec {
                field: "D".into(),
                message: format!("D must be {n} rows of {m} entries"),
            });
        }
        let d = FpMatrix::from_rows(p, &d_rows).map_err(|e| match e {
            Error::InvalidSpec { .. } => e,
            other => Error::InvalidSpec { field: "D".into(), message: other.to_string() },
        })?;
        Self::new(p, n, d)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.p,
            "n": self.n,
            "D": self.d.rows_vec(),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Rank of the derived subgroup, `m = C(n, 2)`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// The matrix of the p-th power map `G/G' -> G'`.
    pub fn d(&self) -> &FpMatrix {
        &self.d
    }

    /// `|G| = p^(n + m)`, or `None` on overflow.
    pub fn order_u128(&self) -> Option<u128> {
        (self.p as u128).checked_pow((self.n + self.m) as u32)
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p).pow((self.n + self.m) as u32)
    }

    /// Index of the pair `(j, k)`, `j < k`, both zero-based, in the fixed
    /// lexicographic order (0,1), (0,2), ..., (1,2), ..., (n-2,n-1).
    pub fn pair_index(&self, j: usize, k: usize) -> usize {
        debug_assert!(j < k && k < self.n);
        // pairs starting below j: (n-1) + (n-2) + ... + (n-j)
        j * self.n - j * (j + 1) / 2 + (k - j - 1)
    }

    /// All index pairs in canonical order, so `pairs()[pair_index(j,k)] == (j,k)`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m);
        for j in 0..self.n {
            for k in j + 1..self.n {
                out.push((j, k));
            }
        }
        out
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { a: vec![0; self.n], c: vec![0; self.m] }
    }

    /// The generator `x_i` (zero-based).
    pub fn generator(&self, i: usize) -> GroupElement {
        let mut e = self.identity();
        e.a[i] = 1;
        e
    }

    /// The central element with commutator exponents `c`.
    pub fn central(&self, c: &[u64]) -> GroupElement {
        debug_assert_eq!(c.len(), self.m);
        GroupElement {
            a: vec![0; self.n],
            c: c.iter().map(|&x| x % self.p).collect(),
        }
    }

    pub fn element(&self, a: &[i64], c: &[i64]) -> Result<GroupElement> {
        if a.len() != self.n || c.len() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "element needs a-length {} and c-length {}, got {} and {}",
                self.n,
                self.m,
                a.len(),
                c.len()
            )));
        }
        let p = self.p as i64;
        Ok(GroupElement {
            a: a.iter().map(|&x| x.rem_euclid(p) as u64).collect(),
            c: c.iter().map(|&x| x.rem_euclid(p) as u64).collect(),
        })
    }

    fn check_element(&self, e: &GroupElement) -> Result<()> {
        if e.a.len() != self.n || e.c.len() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "element shape ({}, {}) does not match spec ({}, {})",
                e.a.len(),
                e.c.len(),
                self.n,
                self.m
            )));
        }
        Ok(())
    }

    /// The wedge vector `u ∧ v` with coordinates `u_j v_k - u_k v_j` at `(j,k)`.
    pub fn wedge(&self, u: &[u64], v: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut out = vec![0u64; self.m];
        let mut idx = 0;
        for j in 0..self.n {
            for k in j + 1..self.n {
                let pos = (u[j] * v[k]) % p;
                let neg = (u[k] * v[j]) % p;
                out[idx] = (pos + p - neg) % p;
                idx += 1;
            }
        }
        out
    }

    /// Product in normal form, by collection.
    ///
    /// Moving the generators of the second factor left past those of the
    /// first picks up `[x_j, x_k]^(-a1_k a2_j)` for each pair `j < k`; any
    /// generator exponent that reaches p is folded with the relation
    /// `x_i^p = row i of D`.
    pub fn multiply(&self, e1: &GroupElement, e2: &GroupElement) -> GroupElement {
        debug_assert!(self.check_element(e1).is_ok() && self.check_element(e2).is_ok());
        let p = self.p;
        let mut a = vec![0u64; self.n];
        let mut c = vec![0u64; self.m];
        for t in 0..self.m {
            c[t] = (e1.c[t] + e2.c[t]) % p;
        }
        let mut idx = 0;
        for j in 0..self.n {
            for k in j + 1..self.n {
                let swap = (e1.a[k] * e2.a[j]) % p;
                c[idx] = (c[idx] + p - swap) % p;
                idx += 1;
            }
        }
        for i in 0..self.n {
            let sum = e1.a[i] + e2.a[i];
            if sum >= p {
                a[i] = sum - p;
                for t in 0..self.m {
                    c[t] = (c[t] + self.d.get(i, t)) % p;
                }
            } else {
                a[i] = sum;
            }
        }
        GroupElement { a, c }
    }

    pub fn inverse(&self, e: &GroupElement) -> GroupElement {
        let p = self.p;
        let a: Vec<u64> = e.a.iter().map(|&x| (p - x) % p).collect();
        // With the a-part fixed, the c-part is whatever cancels the
        // collection terms of e * (a, 0).
        let probe = GroupElement { a, c: vec![0; self.m] };
        let t = self.multiply(e, &probe);
        let c = t.c.iter().map(|&x| (p - x) % p).collect();
        GroupElement { a: probe.a, c }
    }

    /// `e^d` for any integer d, by square and multiply.
    pub fn power(&self, e: &GroupElement, d: i64) -> GroupElement {
        if d == 0 {
            return self.identity();
        }
        let (mut base, mut exp) = if d < 0 {
            (self.inverse(e), d.unsigned_abs())
        } else {
            (e.clone(), d as u64)
        };
        let mut acc = self.identity();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.multiply(&acc, &base);
            }
            base = self.multiply(&base, &base);
            exp >>= 1;
        }
        acc
    }

    /// `[e1, e2]` via the wedge of the generator exponents.
    pub fn commutator(&self, e1: &GroupElement, e2: &GroupElement) -> GroupElement {
        GroupElement { a: vec![0; self.n], c: self.wedge(&e1.a, &e2.a) }
    }

    /// `e1^{-1} e2^{-1} e1 e2` computed by collection; agrees with
    /// [`GroupSpec::commutator`] and serves as its independent check.
    pub fn commutator_definitional(&self, e1: &GroupElement, e2: &GroupElement) -> GroupElement {
        let lhs = self.multiply(&self.inverse(e1), &self.inverse(e2));
        self.multiply(&self.multiply(&lhs, e1), e2)
    }

    /// The p-th power map on `G/G'`: `abar -> abar · D`.
    pub fn pth_power_map(&self, abar: &[u64]) -> Vec<u64> {
        vec_mat(abar, &self.d).expect("abar has length n")
    }

    /// The matrix of the map induced on `G'` (the exterior square) by the
    /// n×n matrix `A`, with entry `((j,k),(s,t)) = A_js A_kt - A_jt A_ks`.
    pub fn wedge_matrix(&self, a: &FpMatrix) -> FpMatrix {
        debug_assert_eq!(a.rows(), self.n);
        debug_assert_eq!(a.cols(), self.n);
        let p = self.p;
        let mut out = FpMatrix::zero(p, self.m, self.m);
        let pairs = self.pairs();
        for (r, &(j, k)) in pairs.iter().enumerate() {
            for (c, &(s, t)) in pairs.iter().enumerate() {
                let pos = (a.get(j, s) * a.get(k, t)) % p;
                let neg = (a.get(j, t) * a.get(k, s)) % p;
                out.set(r, c, (pos + p - neg) % p);
            }
        }
        out
    }

    /// `Ω_1(G) ⊆ G'` iff the power-map matrix D has full row rank.
    pub fn omega1_in_derived(&self) -> bool {
        self.d.rank() == self.n
    }

    /// Index of `e` in the enumeration order (mixed radix over `(a, c)`,
    /// identity at 0).
    pub fn element_index(&self, e: &GroupElement) -> usize {
        let mut idx = 0usize;
        for &x in e.a.iter().chain(e.c.iter()) {
            idx = idx * self.p as usize + x as usize;
        }
        idx
    }

    /// Inverse of [`GroupSpec::element_index`].
    pub fn element_at(&self, mut idx: usize) -> GroupElement {
        let p = self.p as usize;
        let total = self.n + self.m;
        let mut digits = vec![0u64; total];
        for slot in (0..total).rev() {
            digits[slot] = (idx % p) as u64;
            idx /= p;
        }
        let c = digits.split_off(self.n);
        GroupElement { a: digits, c }
    }

    /// Mixed-radix index of an m-vector of commutator exponents, matching
    /// the c-block of [`GroupSpec::element_index`].
    pub fn central_index(&self, c: &[u64]) -> usize {
        debug_assert_eq!(c.len(), self.m);
        c.iter().fold(0usize, |acc, &x| acc * self.p as usize + x as usize)
    }

    /// Inverse of [`GroupSpec::central_index`].
    pub fn central_at(&self, mut idx: usize) -> Vec<u64> {
        let p = self.p as usize;
        let mut c = vec![0u64; self.m];
        for slot in (0..self.m).rev() {
            c[slot] = (idx % p) as u64;
            idx /= p;
        }
        c
    }

    /// All `p^(n+m)` elements in index order.
    pub fn enumerate_elements(&self, bound: u128) -> Result<Vec<GroupElement>> {
        let order = self.order_u128().ok_or(Error::BoundExceeded {
            needed: u128::MAX,
            bound,
        })?;
        if order > bound {
            return Err(Error::BoundExceeded { needed: order, bound });
        }
        Ok((0..order as usize).map(|i| self.element_at(i)).collect())
    }
}

/// Dense multiplication table for a small group, plus the index helpers the
/// exhaustive verifiers need. Element indices follow
/// [`GroupSpec::element_index`], i.e. `idx = a_idx * p^m + c_idx`.
pub struct MulTable {
    pub size: usize,
    /// `p^m`, the number of central coordinates.
    pub pm: usize,
    table: Vec<u32>,
    central_add: Vec<u32>,
}

impl MulTable {
    pub fn build(spec: &GroupSpec, bound: u128) -> Result<Self> {
        let elements = spec.enumerate_elements(bound)?;
        let size = elements.len();
        let mut table = vec![0u32; size * size];
        for (i, x) in elements.iter().enumerate() {
            for (j, y) in elements.iter().enumerate() {
                table[i * size + j] = spec.element_index(&spec.multiply(x, y)) as u32;
            }
        }
        let pm = (spec.p() as usize).pow(spec.m() as u32);
        let p = spec.p() as usize;
        let m = spec.m();
        let mut central_add = vec![0u32; pm * pm];
        for c1 in 0..pm {
            for c2 in 0..pm {
                // digitwise addition mod p, least significant digit first
                let (mut x, mut y) = (c1, c2);
                let mut sum = 0usize;
                let mut scale = 1usize;
                for _ in 0..m {
                    sum += ((x % p + y % p) % p) * scale;
                    scale *= p;
                    x /= p;
                    y /= p;
                }
                central_add[c1 * pm + c2] = sum as u32;
            }
        }
        Ok(Self { size, pm, table, central_add })
    }

    #[inline]
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i * self.size + j] as usize
    }

    /// Adds the central vector with c-index `cidx` to element `i`.
    #[inline]
    pub fn add_central(&self, i: usize, cidx: usize) -> usize {
        let c = i % self.pm;
        let a_part = i - c;
        a_part + self.central_add[c * self.pm + cidx] as usize
    }

    /// The a-part index of element `i` (its coset in `G/G'`).
    #[inline]
    pub fn a_index(&self, i: usize) -> usize {
        i / self.pm
    }
}
