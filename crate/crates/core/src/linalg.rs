//! Exact linear algebra over a prime field F_p, p odd.
//!
//! Everything in this crate uses the row convention: vectors are rows and
//! matrices act on them from the right, so composing maps reads left to
//! right as a matrix product. Entries are canonical residues in `[0, p)`
//! stored as `u64`; `p` is small, so plain 64-bit multiply-and-reduce is
//! exact.

use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Modular inverse of `a` mod `p` via the extended Euclidean algorithm.
///
/// Returns `None` when `gcd(a, p) != 1`.
pub fn mod_inverse(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return None;
    }
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(p as i128) as u64)
}

/// A dense matrix over F_p with entries reduced mod p.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl std::fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "FpMatrix {}x{} mod {} [", self.rows, self.cols, self.p)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl FpMatrix {
    /// Builds a matrix from row-major entries, reducing them mod p.
    ///
    /// `p` must be an odd prime >= 3; this is checked by trial division
    /// (moduli here are always tiny).
    pub fn new(p: u64, rows: usize, cols: usize, entries: &[i64]) -> Result<Self> {
        check_odd_prime(p)?;
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                rows * cols,
                rows,
                cols,
                entries.len()
            )));
        }
        let entries = entries
            .iter()
            .map(|&e| e.rem_euclid(p as i64) as u64)
            .collect();
        Ok(Self { p, rows, cols, entries })
    }

    pub fn from_rows(p: u64, rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has length {}, expected {}",
                    i,
                    row.len(),
                    c
                )));
            }
        }
        let flat: Vec<i64> = rows.iter().flatten().copied().collect();
        Self::new(p, r, c, &flat)
    }

    pub fn zero(p: u64, rows: usize, cols: usize) -> Self {
        check_odd_prime(p).expect("modulus must be an odd prime");
        Self { p, rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn identity(p: u64, size: usize) -> Self {
        let mut m = Self::zero(p, size, size);
        for i in 0..size {
            m.set(i, i, 1);
        }
        m
    }

    /// Scalar matrix c·I.
    pub fn scalar(p: u64, size: usize, c: i64) -> Self {
        let mut m = Self::zero(p, size, size);
        let c = c.rem_euclid(p as i64) as u64;
        for i in 0..size {
            m.set(i, i, c);
        }
        m
    }

    pub fn random<R: rand::Rng>(p: u64, rows: usize, cols: usize, rng: &mut R) -> Self {
        let entries = (0..rows * cols).map(|_| rng.gen_range(0..p)).collect();
        Self { p, rows, cols, entries }
    }

    /// Rejection-samples an invertible square matrix.
    pub fn random_invertible<R: rand::Rng>(p: u64, size: usize, rng: &mut R) -> Self {
        loop {
            let m = Self::random(p, size, size, rng);
            if m.is_invertible() {
                return m;
            }
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: u64) {
        self.entries[i * self.cols + j] = value % self.p;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn rows_vec(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    fn check_same_modulus(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch { left: self.p, right: other.p });
        }
        Ok(())
    }

    /// Matrix product X·Y.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_modulus(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.p;
        let mut out = Self::zero(p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.entries[i * other.cols + j] = (cur + a * other.get(k, j)) % p;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_modulus(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a + b) % self.p)
            .collect();
        Ok(Self { p: self.p, rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale_int(-1))
    }

    pub fn scale_int(&self, c: i64) -> Self {
        let c = c.rem_euclid(self.p as i64) as u64;
        let entries = self.entries.iter().map(|&a| (a * c) % self.p).collect();
        Self { p: self.p, rows: self.rows, cols: self.cols, entries }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.p, self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    /// Row rank via Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let p = self.p;
        let mut rank = 0;
        for col in 0..m.cols {
            let pivot = (rank..m.rows).find(|&r| m.get(r, col) != 0);
            let Some(pivot) = pivot else { continue };
            m.swap_rows(rank, pivot);
            let inv = mod_inverse(m.get(rank, col), p).expect("pivot is a unit");
            m.scale_row(rank, inv);
            for r in 0..m.rows {
                if r != rank && m.get(r, col) != 0 {
                    let f = m.get(r, col);
                    m.sub_scaled_row(r, rank, f);
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Inverse of a square matrix, or `SingularMatrix`.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "cannot invert a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let p = self.p;
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = Self::identity(p, n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| m.get(r, col) != 0).ok_or(Error::SingularMatrix)?;
            m.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let f = mod_inverse(m.get(col, col), p).expect("pivot is a unit");
            m.scale_row(col, f);
            inv.scale_row(col, f);
            for r in 0..n {
                if r != col && m.get(r, col) != 0 {
                    let f = m.get(r, col);
                    m.sub_scaled_row(r, col, f);
                    inv.sub_scaled_row(r, col, f);
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.entries.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    fn scale_row(&mut self, i: usize, c: u64) {
        for k in 0..self.cols {
            let idx = i * self.cols + k;
            self.entries[idx] = (self.entries[idx] * c) % self.p;
        }
    }

    // row i -= c * row j
    fn sub_scaled_row(&mut self, i: usize, j: usize, c: u64) {
        let neg = (self.p - c % self.p) % self.p;
        for k in 0..self.cols {
            let v = (self.entries[j * self.cols + k] * neg) % self.p;
            let idx = i * self.cols + k;
            self.entries[idx] = (self.entries[idx] + v) % self.p;
        }
    }

    /// Stacks `self` on top of `other` (same width).
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        self.check_same_modulus(other)?;
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot stack widths {} and {}",
                self.cols, other.cols
            )));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(Self { p: self.p, rows: self.rows + other.rows, cols: self.cols, entries })
    }

    /// Assembles `[[tl, tr], [bl, br]]` from consistent blocks.
    pub fn from_blocks(tl: &Self, tr: &Self, bl: &Self, br: &Self) -> Result<Self> {
        tl.check_same_modulus(tr)?;
        tl.check_same_modulus(bl)?;
        tl.check_same_modulus(br)?;
        if tl.rows != tr.rows || bl.rows != br.rows || tl.cols != bl.cols || tr.cols != br.cols {
            return Err(Error::DimensionMismatch("inconsistent block shapes".into()));
        }
        let rows = tl.rows + bl.rows;
        let cols = tl.cols + tr.cols;
        let mut out = Self::zero(tl.p, rows, cols);
        for i in 0..tl.rows {
            for j in 0..tl.cols {
                out.set(i, j, tl.get(i, j));
            }
            for j in 0..tr.cols {
                out.set(i, tl.cols + j, tr.get(i, j));
            }
        }
        for i in 0..bl.rows {
            for j in 0..bl.cols {
                out.set(tl.rows + i, j, bl.get(i, j));
            }
            for j in 0..br.cols {
                out.set(tl.rows + i, tl.cols + j, br.get(i, j));
            }
        }
        Ok(out)
    }
}

fn check_odd_prime(p: u64) -> Result<()> {
    let ok = p >= 3 && p % 2 == 1 && (3..p).step_by(2).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d));
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidSpec {
            field: "p".into(),
            message: format!("{p} is not an odd prime"),
        })
    }
}

/// Row-vector times matrix: `v · m`, with `v.len() == m.rows()`.
pub fn vec_mat(v: &[u64], m: &FpMatrix) -> Result<Vec<u64>> {
    if v.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "row vector of length {} cannot multiply a {}x{} matrix",
            v.len(),
            m.rows(),
            m.cols()
        )));
    }
    let p = m.modulus();
    let mut out = vec![0u64; m.cols()];
    for (i, &vi) in v.iter().enumerate() {
        if vi == 0 {
            continue;
        }
        for j in 0..m.cols() {
            out[j] = (out[j] + vi * m.get(i, j)) % p;
        }
    }
    Ok(out)
}

/// The solution set of `D·X = R`: one particular solution plus a basis of
/// the homogeneous space `{Z : D·Z = 0}`.
///
/// Each homogeneous basis matrix places one kernel vector of `D` in one
/// column, so the basis has `nullity(D) * R.cols()` elements.
#[derive(Clone, Debug)]
pub struct AffineSolution {
    pub particular: FpMatrix,
    /// Column vectors spanning `{z : D·z = 0}` (each of length `D.cols()`).
    pub kernel: Vec<Vec<u64>>,
    rhs_cols: usize,
    p: u64,
}

impl AffineSolution {
    /// Dimension of the homogeneous space of matrix solutions.
    pub fn dim(&self) -> usize {
        self.kernel.len() * self.rhs_cols
    }

    /// Materializes the homogeneous basis matrices.
    pub fn homogeneous_basis(&self) -> Vec<FpMatrix> {
        let mut out = Vec::with_capacity(self.dim());
        for z in &self.kernel {
            for t in 0..self.rhs_cols {
                let mut m = FpMatrix::zero(self.p, z.len(), self.rhs_cols);
                for (i, &zi) in z.iter().enumerate() {
                    m.set(i, t, zi);
                }
                out.push(m);
            }
        }
        out
    }

    /// Number of matrices in the full affine solution set.
    pub fn count(&self) -> u128 {
        (self.p as u128).pow(self.dim() as u32)
    }

    /// Visits every solution `particular + combination`, in a fixed
    /// mixed-radix order. `limit` caps the enumeration.
    pub fn for_each_solution<F: FnMut(&FpMatrix)>(&self, limit: u128, mut f: F) -> Result<()> {
        if self.count() > limit {
            return Err(Error::BoundExceeded { needed: self.count(), bound: limit });
        }
        let basis = self.homogeneous_basis();
        let dim = basis.len();
        let mut coeffs = vec![0u64; dim];
        loop {
            let mut x = self.particular.clone();
            for (c, b) in coeffs.iter().zip(&basis) {
                if *c != 0 {
                    x = x.add(&b.scale_int(*c as i64)).expect("shapes agree");
                }
            }
            f(&x);
            // mixed-radix increment
            let mut pos = 0;
            loop {
                if pos == dim {
                    return Ok(());
                }
                coeffs[pos] += 1;
                if coeffs[pos] < self.p {
                    break;
                }
                coeffs[pos] = 0;
                pos += 1;
            }
        }
    }

    /// Structural membership test: is `x - particular` in the span of the
    /// homogeneous basis? Checked column by column against the kernel of D,
    /// independently of the defining equation.
    pub fn contains(&self, x: &FpMatrix) -> bool {
        if x.rows() != self.particular.rows() || x.cols() != self.rhs_cols {
            return false;
        }
        let diff = match x.sub(&self.particular) {
            Ok(d) => d,
            Err(_) => return false,
        };
        // Reduce every column of diff against an echelonized kernel basis.
        let mut echelon: Vec<Vec<u64>> = Vec::new();
        for z in &self.kernel {
            echelon.push(z.clone());
        }
        reduce_echelon(&mut echelon, self.p);
        for t in 0..self.rhs_cols {
            let col: Vec<u64> = (0..diff.rows()).map(|i| diff.get(i, t)).collect();
            if !in_span(&echelon, &col, self.p) {
                return false;
            }
        }
        true
    }
}

fn reduce_echelon(vectors: &mut Vec<Vec<u64>>, p: u64) {
    let mut basis: Vec<Vec<u64>> = Vec::new();
    for v in vectors.drain(..) {
        let mut v = v;
        reduce_against(&basis, &mut v, p);
        if v.iter().any(|&x| x != 0) {
            normalize_lead(&mut v, p);
            basis.push(v);
        }
    }
    *vectors = basis;
}

fn reduce_against(basis: &[Vec<u64>], v: &mut [u64], p: u64) {
    for b in basis {
        let lead = b.iter().position(|&x| x != 0).expect("basis vectors are nonzero");
        if v[lead] != 0 {
            let f = v[lead];
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi = (*vi + (p - f) * bi) % p;
            }
        }
    }
}

fn normalize_lead(v: &mut [u64], p: u64) {
    let lead = v.iter().position(|&x| x != 0).expect("nonzero");
    let inv = mod_inverse(v[lead], p).expect("unit");
    for vi in v.iter_mut() {
        *vi = (*vi * inv) % p;
    }
}

fn in_span(echelon: &[Vec<u64>], v: &[u64], p: u64) -> bool {
    let mut v = v.to_vec();
    reduce_against(echelon, &mut v, p);
    v.iter().all(|&x| x == 0)
}

/// Solves `D·X = R` for the matrix `X`, returning the affine solution
/// space or `Infeasible`.
pub fn solve_affine(d: &FpMatrix, r: &FpMatrix) -> Result<AffineSolution> {
    if d.modulus() != r.modulus() {
        return Err(Error::ModulusMismatch { left: d.modulus(), right: r.modulus() });
    }
    if d.rows() != r.rows() {
        return Err(Error::DimensionMismatch(format!(
            "D has {} rows but R has {}",
            d.rows(),
            r.rows()
        )));
    }
    let p = d.modulus();
    let (n, m) = (d.rows(), d.cols());
    let k = r.cols();
    // Row-reduce the augmented matrix [D | R].
    let mut aug = FpMatrix::zero(p, n, m + k);
    for i in 0..n {
        for j in 0..m {
            aug.set(i, j, d.get(i, j));
        }
        for j in 0..k {
            aug.set(i, m + j, r.get(i, j));
        }
    }
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..m {
        let pivot = (row..n).find(|&rr| aug.get(rr, col) != 0);
        let Some(pr) = pivot else { continue };
        aug.swap_rows(row, pr);
        let inv = mod_inverse(aug.get(row, col), p).expect("pivot is a unit");
        aug.scale_row(row, inv);
        for rr in 0..n {
            if rr != row && aug.get(rr, col) != 0 {
                let f = aug.get(rr, col);
                aug.sub_scaled_row(rr, row, f);
            }
        }
        pivots.push(col);
        row += 1;
        if row == n {
            break;
        }
    }
    // Consistency: a zero row of D with a nonzero R part has no solution.
    for rr in row..n {
        if (0..k).any(|j| aug.get(rr, m + j) != 0) {
            return Err(Error::Infeasible);
        }
    }
    // Particular solution: free variables set to zero.
    let mut particular = FpMatrix::zero(p, m, k);
    for (r_idx, &col) in pivots.iter().enumerate() {
        for j in 0..k {
            particular.set(col, j, aug.get(r_idx, m + j));
        }
    }
    // Kernel basis of D: one vector per free column.
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut kernel = Vec::new();
    for free in 0..m {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut z = vec![0u64; m];
        z[free] = 1;
        for (r_idx, &col) in pivots.iter().enumerate() {
            z[col] = (p - aug.get(r_idx, free)) % p;
        }
        kernel.push(z);
    }
    Ok(AffineSolution { particular, kernel, rhs_cols: k, p })
}

/// Order of GL_k(F_p) as an exact big integer: prod_{i=0}^{k-1} (p^k - p^i).
pub fn gl_order(k: usize, p: u64) -> BigUint {
    let p = BigUint::from(p);
    let pk = p.pow(k as u32);
    let mut order = BigUint::from(1u32);
    for i in 0..k {
        order *= &pk - p.pow(i as u32);
    }
    order
}

/// For a full-row-rank `D`, finds invertible `U`, `V` with `U·D·V = [I | 0]`.
pub fn reduce_to_i0(d: &FpMatrix) -> Result<(FpMatrix, FpMatrix)> {
    let (n, m) = (d.rows(), d.cols());
    if d.rank() != n {
        return Err(Error::NotFullRank);
    }
    let p = d.modulus();
    // Row-reduce [D | I] so the right block records U with U·D in RREF.
    let mut work = d.clone();
    let mut u = FpMatrix::identity(p, n);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m {
        let Some(pr) = (row..n).find(|&r| work.get(r, col) != 0) else { continue };
        work.swap_rows(row, pr);
        u.swap_rows(row, pr);
        let inv = mod_inverse(work.get(row, col), p).expect("pivot is a unit");
        work.scale_row(row, inv);
        u.scale_row(row, inv);
        for r in 0..n {
            if r != row && work.get(r, col) != 0 {
                let f = work.get(r, col);
                work.sub_scaled_row(r, row, f);
                u.sub_scaled_row(r, row, f);
            }
        }
        pivots.push(col);
        row += 1;
        if row == n {
            break;
        }
    }
    // Column operations, mirrored into V: permute pivot columns to the
    // front, then clear the remaining columns.
    let mut v = FpMatrix::identity(p, m);
    for (target, &from) in pivots.iter().enumerate() {
        if from != target {
            swap_cols(&mut work, target, from);
            swap_cols(&mut v, target, from);
        }
    }
    for j in n..m {
        for i in 0..n {
            let f = work.get(i, j);
            if f != 0 {
                // col_j -= f * col_i
                sub_scaled_col(&mut work, j, i, f);
                sub_scaled_col(&mut v, j, i, f);
            }
        }
    }
    debug_assert!({
        let prod = u.mul(d).unwrap().mul(&v).unwrap();
        (0..n).all(|i| (0..m).all(|j| prod.get(i, j) == u64::from(i == j)))
    });
    Ok((u, v))
}

fn swap_cols(m: &mut FpMatrix, i: usize, j: usize) {
    for r in 0..m.rows() {
        let a = m.get(r, i);
        let b = m.get(r, j);
        m.set(r, i, b);
        m.set(r, j, a);
    }
}

// col_dst -= f * col_src
fn sub_scaled_col(m: &mut FpMatrix, dst: usize, src: usize, f: u64) {
    let p = m.modulus();
    let neg = (p - f % p) % p;
    for r in 0..m.rows() {
        let v = (m.get(r, src) * neg) % p;
        let cur = m.get(r, dst);
        m.set(r, dst, (cur + v) % p);
    }
}

/// Brute-force count of invertible k×k matrices over F_p, for tiny k.
///
/// Exists as an independent check of [`gl_order`]; enumerates all p^(k²)
/// matrices, so keep `p.pow(k*k)` small.
pub fn count_invertible_brute_force(k: usize, p: u64) -> Result<u64> {
    let total = (p as u128).checked_pow((k * k) as u32).ok_or(Error::BoundExceeded {
        needed: u128::MAX,
        bound: 100_000_000,
    })?;
    if total > 100_000_000 {
        return Err(Error::BoundExceeded { needed: total, bound: 100_000_000 });
    }
    let mut count = 0u64;
    let mut digits = vec![0u64; k * k];
    loop {
        let m = FpMatrix {
            p,
            rows: k,
            cols: k,
            entries: digits.clone(),
        };
        if m.rank() == k {
            count += 1;
        }
        let mut pos = 0;
        loop {
            if pos == k * k {
                return Ok(count);
            }
            digits[pos] += 1;
            if digits[pos] < p {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// Enumerates all of GL_n(F_p) by scanning the p^(n²) matrices.
pub fn enumerate_gl<F: FnMut(&FpMatrix)>(n: usize, p: u64, bound: u128, mut f: F) -> Result<()> {
    let total = (p as u128).pow((n * n) as u32);
    if total > bound {
        return Err(Error::BoundExceeded { needed: total, bound });
    }
    let mut digits = vec![0u64; n * n];
    loop {
        let m = FpMatrix { p, rows: n, cols: n, entries: digits.clone() };
        if m.is_invertible() {
            f(&m);
        }
        let mut pos = 0;
        loop {
            if pos == n * n {
                return Ok(());
            }
            digits[pos] += 1;
            if digits[pos] < p {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u64, rows: &[Vec<i64>]) -> FpMatrix {
        FpMatrix::from_rows(p, rows).unwrap()
    }

    #[test]
    fn mat_mul_examples() {
        let i2 = FpMatrix::identity(3, 2);
        assert_eq!(i2.mul(&i2).unwrap(), i2);

        let a = m(3, &[vec![1, 1], vec![0, 1]]);
        let expected = m(3, &[vec![1, 2], vec![0, 1]]);
        assert_eq!(a.mul(&a).unwrap(), expected);

        let b = m(3, &[vec![2]]);
        assert_eq!(b.mul(&b).unwrap(), m(3, &[vec![1]]));
    }

    #[test]
    fn mat_mul_errors() {
        let a = FpMatrix::identity(3, 2);
        let b = FpMatrix::identity(3, 3);
        assert!(matches!(a.mul(&b), Err(Error::DimensionMismatch(_))));
        let c = FpMatrix::identity(5, 2);
        assert!(matches!(a.mul(&c), Err(Error::ModulusMismatch { .. })));
    }

    #[test]
    fn mat_inv_examples() {
        let i3 = FpMatrix::identity(3, 3);
        assert_eq!(i3.inverse().unwrap(), i3);

        let two = m(3, &[vec![2]]);
        assert_eq!(two.inverse().unwrap(), two);

        let singular = m(3, &[vec![1, 1], vec![1, 1]]);
        assert_eq!(singular.inverse(), Err(Error::SingularMatrix));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(FpMatrix::zero(3, 2, 1).rank(), 0);
        assert_eq!(FpMatrix::identity(3, 4).rank(), 4);
        assert_eq!(m(5, &[vec![1, 2], vec![2, 4]]).rank(), 1);
    }

    #[test]
    fn rank_equals_transpose_rank() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = FpMatrix::random(3, 4, 6, &mut rng);
            assert_eq!(a.rank(), a.transpose().rank());
        }
    }

    #[test]
    fn solve_affine_identity() {
        let i = FpMatrix::identity(3, 2);
        let sol = solve_affine(&i, &i).unwrap();
        assert_eq!(sol.particular, i);
        assert_eq!(sol.dim(), 0);
    }

    #[test]
    fn solve_affine_underdetermined() {
        // D = [1 0] (1x2), R = [1]: particular [1, 0]^T with one free row.
        let d = m(3, &[vec![1, 0]]);
        let r = m(3, &[vec![1]]);
        let sol = solve_affine(&d, &r).unwrap();
        assert_eq!(sol.particular, m(3, &[vec![1], vec![0]]));
        assert_eq!(sol.dim(), 1);
        // Substitution check on every solution.
        sol.for_each_solution(100, |x| {
            assert_eq!(d.mul(x).unwrap(), r);
            assert!(sol.contains(x));
        })
        .unwrap();
    }

    #[test]
    fn solve_affine_infeasible() {
        let d = FpMatrix::zero(3, 2, 2);
        let r = m(3, &[vec![1, 0], vec![0, 0]]);
        assert_eq!(solve_affine(&d, &r).err(), Some(Error::Infeasible));
    }

    #[test]
    fn solve_affine_substitution_random() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let d = FpMatrix::random(3, 2, 3, &mut rng);
            let x0 = FpMatrix::random(3, 3, 2, &mut rng);
            let r = d.mul(&x0).unwrap();
            let sol = solve_affine(&d, &r).unwrap();
            assert_eq!(d.mul(&sol.particular).unwrap(), r);
            assert!(sol.contains(&x0));
            for b in sol.homogeneous_basis() {
                assert!(d.mul(&b).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn gl_order_examples() {
        assert_eq!(gl_order(0, 3), BigUint::from(1u32));
        assert_eq!(gl_order(1, 3), BigUint::from(2u32));
        assert_eq!(gl_order(2, 3), BigUint::from(48u32));
        assert_eq!(gl_order(4, 3), BigUint::from(24_261_120u64));
    }

    #[test]
    fn gl_order_matches_brute_force() {
        for (k, p) in [(1, 3), (2, 3), (1, 5)] {
            let brute = count_invertible_brute_force(k, p).unwrap();
            assert_eq!(gl_order(k, p), BigUint::from(brute));
        }
    }

    #[test]
    fn reduce_to_i0_examples() {
        // D already in [I | 0] form.
        let d = m(3, &[vec![1, 0, 0], vec![0, 1, 0]]);
        let (u, v) = reduce_to_i0(&d).unwrap();
        let prod = u.mul(&d).unwrap().mul(&v).unwrap();
        assert_eq!(prod, d);

        // Column swap case.
        let d = m(3, &[vec![0, 1]]);
        let (u, v) = reduce_to_i0(&d).unwrap();
        assert!(u.is_invertible() && v.is_invertible());
        let prod = u.mul(&d).unwrap().mul(&v).unwrap();
        assert_eq!(prod, m(3, &[vec![1, 0]]));

        // Rank-deficient input.
        let d = m(3, &[vec![1], vec![1]]);
        assert_eq!(reduce_to_i0(&d).err(), Some(Error::NotFullRank));
    }

    #[test]
    fn reduce_to_i0_random() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut done = 0;
        while done < 30 {
            let d = FpMatrix::random(5, 3, 5, &mut rng);
            if d.rank() != 3 {
                continue;
            }
            done += 1;
            let (u, v) = reduce_to_i0(&d).unwrap();
            assert!(u.is_invertible());
            assert!(v.is_invertible());
            let prod = u.mul(&d).unwrap().mul(&v).unwrap();
            for i in 0..3 {
                for j in 0..5 {
                    assert_eq!(prod.get(i, j), u64::from(i == j));
                }
            }
        }
    }

    #[test]
    fn inverse_round_trip_random() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for p in [3u64, 5, 7] {
            for _ in 0..20 {
                let a = FpMatrix::random_invertible(p, 4, &mut rng);
                let inv = a.inverse().unwrap();
                assert!(a.mul(&inv).unwrap().is_identity());
                assert!(inv.mul(&a).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn rejects_non_prime_modulus() {
        assert!(FpMatrix::new(9, 1, 1, &[1]).is_err());
        assert!(FpMatrix::new(2, 1, 1, &[1]).is_err());
        assert!(FpMatrix::new(1, 1, 1, &[0]).is_err());
    }
}
