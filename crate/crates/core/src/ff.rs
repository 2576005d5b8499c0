//! Arithmetic in the prime field F_p and dense linear algebra over it.
//!
//! Field elements are plain `u32` representatives in `[0, p)`; the modulus
//! travels with the [`PrimeField`] context (or inside an [`FpMatrix`]).

use std::fmt;

use crate::error::{Error, Result};

/// Largest modulus accepted by [`PrimeField::new`].
pub const MAX_PRIME: u32 = 1 << 16;

/// The field F_p for a runtime prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    /// Validates `p` by trial division.
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 || p > MAX_PRIME as u64 {
            return Err(Error::NotPrime(p));
        }
        let mut q = 2u64;
        while q * q <= p {
            if p.is_multiple_of(q) {
                return Err(Error::NotPrime(p));
            }
            q += 1;
        }
        Ok(Self { p: p as u32 })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// `acc + a*b`, reduced.
    #[inline]
    pub fn mul_add(self, acc: u32, a: u32, b: u32) -> u32 {
        ((acc as u64 + a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self, a: u32) -> Result<u32> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Ok(self.reduce(t0))
    }
}

/// Dense row-major matrix over F_p.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpMatrix(p={}, {}x{}) ", self.field.p, self.rows, self.cols)?;
        f.debug_list().entries(self.row_iter()).finish()
    }
}

impl fmt::Display for FpMatrix {
    /// Nested-array form `[[a,b],[c,d]]`, the same literal the polynomial parser reads.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.row_iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl FpMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.p;
        }
        m
    }

    /// Scalar multiple of the identity.
    pub fn scalar(field: PrimeField, n: usize, c: u32) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = c % field.p;
        }
        m
    }

    /// Builds a matrix from signed rows, reducing every entry mod p.
    pub fn from_rows<R: AsRef<[i64]>>(field: PrimeField, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch("ragged matrix rows".into()));
            }
            data.extend(r.iter().map(|&v| field.reduce(v)));
        }
        Ok(Self { field, rows: rows.len(), cols, data })
    }

    /// Wraps reduced row-major data.
    pub fn from_data(field: PrimeField, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if data.iter().any(|&v| v >= field.p) {
            return Err(Error::Invalid("matrix entry not reduced mod p".into()));
        }
        Ok(Self { field, rows, cols, data })
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn data(&self) -> &[u32] {
        &self.data
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.field.p;
    }
    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[u32]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::DimensionMismatch("matrices over different fields".into()));
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let f = self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(self.with_data(data))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let f = self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(self.with_data(data))
    }

    pub fn neg(&self) -> Self {
        let f = self.field;
        self.with_data(self.data.iter().map(|&a| f.neg(a)).collect())
    }

    pub fn scale(&self, c: u32) -> Self {
        let f = self.field;
        self.with_data(self.data.iter().map(|&a| f.mul(a, c)).collect())
    }

    fn with_data(&self, data: Vec<u32>) -> Self {
        Self { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.field != other.field || self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.field.p as u64;
        let mut out = vec![0u32; self.rows * other.cols];
        let mut acc = vec![0u64; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k] as u64;
                if a == 0 {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (s, &b) in acc.iter_mut().zip(brow) {
                    *s = (*s + a * b as u64) % p;
                }
            }
            for (o, &s) in out[i * other.cols..(i + 1) * other.cols].iter_mut().zip(&acc) {
                *o = s as u32;
            }
        }
        Ok(Self { field: self.field, rows: self.rows, cols: other.cols, data: out })
    }

    /// Matrix-vector product `self · v`.
    pub fn mul_vec(&self, v: &[u32]) -> Result<Vec<u32>> {
        let mut out = vec![0u32; self.rows];
        self.mul_vec_into(v, &mut out)?;
        Ok(out)
    }

    pub fn mul_vec_into(&self, v: &[u32], out: &mut [u32]) -> Result<()> {
        if v.len() != self.cols || out.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix applied to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let p = self.field.p as u64;
        for (i, o) in out.iter_mut().enumerate() {
            let row = self.row(i);
            let mut s = 0u64;
            for (&a, &b) in row.iter().zip(v) {
                s = (s + a as u64 * b as u64) % p;
            }
            *o = s as u32;
        }
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// Stacks the rows of `parts` on top of each other.
    pub fn vstack(field: PrimeField, cols: usize, parts: &[&FpMatrix]) -> Result<Self> {
        let mut data = Vec::new();
        let mut rows = 0;
        for m in parts {
            if m.cols != cols || m.field != field {
                return Err(Error::DimensionMismatch("vstack column count".into()));
            }
            data.extend_from_slice(&m.data);
            rows += m.rows;
        }
        Ok(Self { field, rows, cols, data })
    }

    /// Picks the given rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self { field: self.field, rows: idx.len(), cols: self.cols, data }
    }

    /// Reduced row-echelon form and the pivot columns.
    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place(self.cols);
        (m, pivots)
    }

    /// Gauss-Jordan elimination choosing pivots only among the first
    /// `pivot_cols` columns. Returns the pivot columns in order.
    fn rref_in_place(&mut self, pivot_cols: usize) -> Vec<usize> {
        let f = self.field;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..pivot_cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.data[r * cols + c]).expect("pivot is nonzero");
            for j in c..cols {
                self.data[r * cols + j] = f.mul(self.data[r * cols + j], inv);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.data[i * cols + c];
                if factor == 0 {
                    continue;
                }
                for j in c..cols {
                    let sub = f.mul(factor, self.data[r * cols + j]);
                    self.data[i * cols + j] = f.sub(self.data[i * cols + j], sub);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }
}

/// `a⁻¹` for a square matrix.
pub fn mat_inv(m: &FpMatrix) -> Result<FpMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("inverse of non-square {}x{} matrix", m.rows, m.cols)));
    }
    let id = FpMatrix::identity(m.field, m.rows);
    match solve_linear(m, &id) {
        Ok(x) => Ok(x),
        Err(Error::Inconsistent { .. }) => Err(Error::Singular),
        Err(e) => Err(e),
    }
}

/// Solves `a · x = b` column by column. Free variables are set to zero, so
/// the returned solution is canonical.
pub fn solve_linear(a: &FpMatrix, b: &FpMatrix) -> Result<FpMatrix> {
    if a.field != b.field || a.rows != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "system {}x{} with right-hand side {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let n = a.cols;
    let k = b.cols;
    let w = n + k;
    let mut aug = FpMatrix::zeros(a.field, a.rows, w);
    for i in 0..a.rows {
        aug.data[i * w..i * w + n].copy_from_slice(a.row(i));
        aug.data[i * w + n..(i + 1) * w].copy_from_slice(b.row(i));
    }
    let pivots = aug.rref_in_place(n);
    for i in pivots.len()..aug.rows {
        if let Some(j) = (0..k).find(|&j| aug.data[i * w + n + j] != 0) {
            return Err(Error::Inconsistent { column: j });
        }
    }
    let mut x = FpMatrix::zeros(a.field, n, k);
    for (i, &c) in pivots.iter().enumerate() {
        x.data[c * k..(c + 1) * k].copy_from_slice(&aug.data[i * w + n..(i + 1) * w]);
    }
    Ok(x)
}

/// A linear subspace of F_p^ambient_dim, stored as an RREF basis (one vector per row).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: FpMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: PrimeField, ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: FpMatrix::zeros(field, 0, ambient_dim), pivots: Vec::new() }
    }

    pub fn full(field: PrimeField, ambient_dim: usize) -> Self {
        Self::span(&FpMatrix::identity(field, ambient_dim))
    }

    /// The span of the rows of `vectors`.
    pub fn span(vectors: &FpMatrix) -> Self {
        let (r, pivots) = vectors.rref();
        let basis = r.select_rows(&(0..pivots.len()).collect::<Vec<_>>());
        Self { ambient_dim: vectors.cols(), basis, pivots }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &FpMatrix {
        &self.basis
    }

    /// Whether `v` lies in the span, by reduction against the RREF basis.
    pub fn contains(&self, v: &[u32]) -> Result<bool> {
        if v.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in ambient dimension {}",
                v.len(),
                self.ambient_dim
            )));
        }
        let f = self.basis.field();
        let mut x = v.to_vec();
        for (i, &c) in self.pivots.iter().enumerate() {
            let factor = x[c];
            if factor == 0 {
                continue;
            }
            for (xj, &bj) in x.iter_mut().zip(self.basis.row(i)) {
                *xj = f.sub(*xj, f.mul(factor, bj));
            }
        }
        Ok(x.iter().all(|&e| e == 0))
    }
}

/// `{x : m·x = 0}`.
pub fn kernel_basis(m: &FpMatrix) -> Subspace {
    let f = m.field();
    let n = m.cols();
    let (r, pivots) = m.rref();
    let mut is_pivot = vec![false; n];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let mut vecs = FpMatrix::zeros(f, free.len(), n);
    for (k, &fc) in free.iter().enumerate() {
        vecs.set(k, fc, 1);
        for (i, &pc) in pivots.iter().enumerate() {
            vecs.set(k, pc, f.neg(r.get(i, fc)));
        }
    }
    Subspace::span(&vecs)
}

/// `u ⊆ v`.
pub fn subspace_leq(u: &Subspace, v: &Subspace) -> Result<bool> {
    if u.ambient_dim != v.ambient_dim {
        return Err(Error::DimensionMismatch(format!("subspaces of F_p^{} and F_p^{}", u.ambient_dim, v.ambient_dim)));
    }
    for row in u.basis.row_iter() {
        if !v.contains(row)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn mat(p: u64, rows: &[&[i64]]) -> FpMatrix {
        FpMatrix::from_rows(f(p), rows).unwrap()
    }

    #[test]
    fn primality_is_checked() {
        assert!(PrimeField::new(2).is_ok());
        assert!(PrimeField::new(65521).is_ok());
        for bad in [0, 1, 4, 9, 65536, 65537 * 3] {
            assert!(matches!(PrimeField::new(bad), Err(Error::NotPrime(_))), "{bad}");
        }
    }

    #[test]
    fn inverses() {
        assert_eq!(f(2).inv(1).unwrap(), 1);
        assert_eq!(f(5).inv(2).unwrap(), 3);
        let seven = f(7);
        let scanned = (1..7).find(|&x| seven.mul(3, x) == 1).unwrap();
        assert_eq!(scanned, 5);
        assert_eq!(seven.inv(3).unwrap(), 5);
        assert!(matches!(seven.inv(0), Err(Error::ZeroInverse)));
    }

    #[test]
    fn matrix_inverse_examples() {
        let id = FpMatrix::identity(f(2), 2);
        assert_eq!(mat_inv(&id).unwrap(), id);
        let m = mat(2, &[&[1, 1], &[0, 1]]);
        assert_eq!(mat_inv(&m).unwrap(), m);
        let m = mat(3, &[&[1, 1], &[1, 2]]);
        let inv = mat_inv(&m).unwrap();
        assert_eq!(inv, mat(3, &[&[2, 2], &[2, 1]]));
        assert_eq!(m.mul(&inv).unwrap(), FpMatrix::identity(f(3), 2));
        assert_eq!(inv.mul(&m).unwrap(), FpMatrix::identity(f(3), 2));
        assert!(matches!(mat_inv(&mat(2, &[&[1, 1], &[1, 1]])), Err(Error::Singular)));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&FpMatrix::zeros(f(2), 2, 2)).dim(), 2);
        assert_eq!(kernel_basis(&FpMatrix::identity(f(3), 3)).dim(), 0);
        let k = kernel_basis(&mat(2, &[&[1, 1]]));
        assert_eq!(k.dim(), 1);
        // enumerate F_2^2: only (0,0) and (1,1) satisfy x+y=0
        let members: Vec<[u32; 2]> = (0..4u32).map(|i| [i & 1, i >> 1]).filter(|v| k.contains(v).unwrap()).collect();
        assert_eq!(members, vec![[0, 0], [1, 1]]);
    }

    #[test]
    fn subspace_inclusion_examples() {
        let p = f(2);
        let span12 = Subspace::span(&mat(2, &[&[1, 0, 0], &[0, 1, 0]]));
        assert!(subspace_leq(&Subspace::zero(p, 3), &span12).unwrap());
        assert!(!subspace_leq(&Subspace::full(p, 3), &span12).unwrap());
        let diag = Subspace::span(&mat(2, &[&[1, 1, 0]]));
        assert!(subspace_leq(&diag, &span12).unwrap());
        assert!(matches!(subspace_leq(&diag, &Subspace::zero(p, 2)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn solve_examples() {
        let b = mat(5, &[&[1, 4], &[3, 2]]);
        assert_eq!(solve_linear(&FpMatrix::identity(f(5), 2), &b).unwrap(), b);

        let a = mat(2, &[&[1, 1], &[0, 0]]);
        let x = solve_linear(&a, &mat(2, &[&[1], &[0]])).unwrap();
        assert_eq!(x, mat(2, &[&[1], &[0]]));

        let a = mat(2, &[&[1, 0], &[0, 0]]);
        assert!(matches!(solve_linear(&a, &mat(2, &[&[0], &[1]])), Err(Error::Inconsistent { column: 0 })));
    }

    #[test]
    fn display_is_nested_arrays() {
        assert_eq!(mat(3, &[&[1, 2], &[0, -1]]).to_string(), "[[1,2],[0,2]]");
    }
}
