//! Sparse multivariate polynomials over F_p or over the matrix algebra
//! Mat_{d×d}(F_p), with determinant/adjugate for matrices of polynomials
//! and a small text parser.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::ff::{mat_inv, FpMatrix, PrimeField};

/// Exponent vector / lattice point in Z^n.
///
/// Ordered graded-lexicographically: total degree first, then lexicographic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<i64>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Self(v)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn is_natural(&self) -> bool {
        self.0.iter().all(|&a| a >= 0)
    }

    /// Componentwise `self ≥ other`.
    pub fn dominates(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Self {
        Self(self.0.iter().map(|a| a * k).collect())
    }
}

impl From<Vec<i64>> for MultiIndex {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total().cmp(&other.total()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoeffKind {
    Scalar,
    Matrix(usize),
}

impl CoeffKind {
    /// Side length of the coefficient matrices (1 for scalars).
    pub fn d(self) -> usize {
        match self {
            CoeffKind::Scalar => 1,
            CoeffKind::Matrix(d) => d,
        }
    }
}

/// Polynomial in `n` indeterminates. Coefficients are stored as `d×d`
/// matrices (`1×1` for scalars); only nonzero terms are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    field: PrimeField,
    n: usize,
    kind: CoeffKind,
    terms: BTreeMap<MultiIndex, FpMatrix>,
}

/// Degrees per indeterminate and overall; the zero polynomial has degree -1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Degree {
    pub per_var: Vec<i64>,
    pub overall: i64,
}

impl Poly {
    pub fn zero(field: PrimeField, n: usize, kind: CoeffKind) -> Self {
        Self { field, n, kind, terms: BTreeMap::new() }
    }

    /// The multiplicative identity (1 or the identity matrix).
    pub fn one(field: PrimeField, n: usize, kind: CoeffKind) -> Self {
        Self::constant(field, n, kind, FpMatrix::identity(field, kind.d()))
    }

    pub fn constant(field: PrimeField, n: usize, kind: CoeffKind, c: FpMatrix) -> Self {
        let mut out = Self::zero(field, n, kind);
        out.add_term(MultiIndex::zero(n), c);
        out
    }

    /// Scalar polynomial from `(exponent, value)` pairs; values are reduced mod p.
    pub fn scalar_from_terms(field: PrimeField, n: usize, terms: &[(Vec<i64>, i64)]) -> Self {
        let mut out = Self::zero(field, n, CoeffKind::Scalar);
        for (e, c) in terms {
            let c = FpMatrix::scalar(field, 1, field.reduce(*c));
            out.add_term(MultiIndex(e.clone()), c);
        }
        out
    }

    /// Adds `c·x^e` in place.
    pub fn add_term(&mut self, e: MultiIndex, c: FpMatrix) {
        assert_eq!(e.n(), self.n, "exponent arity");
        assert!(e.is_natural(), "negative exponent {e:?}");
        assert_eq!(c.rows(), self.kind.d(), "coefficient size");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                let sum = old.add(&c).expect("same shape");
                if sum.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *old = sum;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn kind(&self) -> CoeffKind {
        self.kind
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in graded-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &FpMatrix)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &MultiIndex) -> Option<&FpMatrix> {
        self.terms.get(e)
    }

    /// Coefficient of a scalar polynomial at `e` (zero when absent).
    pub fn scalar_coeff(&self, e: &MultiIndex) -> u32 {
        self.terms.get(e).map_or(0, |c| c.get(0, 0))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.field != other.field || self.n != other.n || self.kind != other.kind {
            return Err(Error::KindMismatch(format!(
                "(p={}, n={}, {:?}) vs (p={}, n={}, {:?})",
                self.field.p(),
                self.n,
                self.kind,
                other.field.p(),
                other.n,
                other.kind
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect();
        Self { terms, ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Product with coefficient products taken in argument order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.field, self.n, self.kind);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.add(eb), ca.mul(cb)?);
            }
        }
        Ok(out)
    }

    /// Multiplies every coefficient on the left by `c`.
    pub fn left_scale(&self, c: &FpMatrix) -> Result<Self> {
        let mut out = Self::zero(self.field, self.n, self.kind);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), c.mul(a)?);
        }
        Ok(out)
    }

    /// Multiplies every coefficient on the right by `c`.
    pub fn right_scale(&self, c: &FpMatrix) -> Result<Self> {
        let mut out = Self::zero(self.field, self.n, self.kind);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a.mul(c)?);
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = Self::one(self.field, self.n, self.kind);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn deg(&self) -> Degree {
        let mut per_var = vec![-1; self.n];
        for e in self.terms.keys() {
            for (d, &a) in per_var.iter_mut().zip(&e.0) {
                *d = (*d).max(a);
            }
        }
        let overall = per_var.iter().copied().max().unwrap_or(-1);
        // n = 0: a nonzero constant has degree 0.
        let overall = if self.n == 0 && !self.is_zero() { 0 } else { overall };
        Degree { per_var, overall }
    }

    /// Coefficient at the zero exponent.
    pub fn independent_term(&self) -> FpMatrix {
        self.terms
            .get(&MultiIndex::zero(self.n))
            .cloned()
            .unwrap_or_else(|| FpMatrix::zeros(self.field, self.kind.d(), self.kind.d()))
    }

    /// Whether the polynomial is invertible as a power series.
    pub fn is_series_unit(&self) -> bool {
        let c = self.independent_term();
        match self.kind {
            CoeffKind::Scalar => c.get(0, 0) != 0,
            CoeffKind::Matrix(_) => mat_inv(&c).is_ok(),
        }
    }

    /// Entry `(i, j)` of every coefficient, as a scalar polynomial.
    pub fn entry(&self, i: usize, j: usize) -> Poly {
        let mut out = Self::zero(self.field, self.n, CoeffKind::Scalar);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), FpMatrix::scalar(self.field, 1, c.get(i, j)));
        }
        out
    }

    /// Views a matrix-coefficient polynomial as a matrix of scalar polynomials.
    pub fn to_poly_matrix(&self) -> PolyMatrix {
        let d = self.kind.d();
        let entries = (0..d * d).map(|k| self.entry(k / d, k % d)).collect();
        PolyMatrix { d, entries }
    }

    /// Reinterprets a scalar polynomial as a `Matrix(1)` polynomial, or the reverse.
    pub fn with_kind(&self, kind: CoeffKind) -> Result<Self> {
        if kind.d() != self.kind.d() {
            return Err(Error::KindMismatch(format!("{:?} to {:?}", self.kind, kind)));
        }
        Ok(Self { kind, ..self.clone() })
    }
}

impl fmt::Display for Poly {
    /// Prints in the grammar accepted by [`parse_poly`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let mono: Vec<String> =
                e.0.iter()
                    .enumerate()
                    .filter(|(_, &a)| a > 0)
                    .map(|(i, &a)| if a == 1 { format!("x{}", i + 1) } else { format!("x{}^{a}", i + 1) })
                    .collect();
            let coeff = match self.kind {
                CoeffKind::Scalar => {
                    let v = c.get(0, 0);
                    if v == 1 && !mono.is_empty() {
                        None
                    } else {
                        Some(v.to_string())
                    }
                }
                CoeffKind::Matrix(_) => Some(c.to_string()),
            };
            let parts: Vec<String> = coeff.into_iter().chain(mono).collect();
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// A `d×d` matrix of scalar polynomials, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    d: usize,
    entries: Vec<Poly>,
}

/// Cofactor expansion is used for the determinant, so keep `d` small.
pub const MAX_DET_DIM: usize = 6;

impl PolyMatrix {
    pub fn new(d: usize, entries: Vec<Poly>) -> Result<Self> {
        if entries.len() != d * d || d == 0 {
            return Err(Error::DimensionMismatch(format!("{} entries for d={d}", entries.len())));
        }
        let first = &entries[0];
        for e in &entries {
            if e.kind != CoeffKind::Scalar || e.n != first.n || e.field != first.field {
                return Err(Error::DimensionMismatch("entries must be scalar polynomials sharing n and p".into()));
            }
        }
        Ok(Self { d, entries })
    }

    pub fn identity(field: PrimeField, n: usize, d: usize) -> Self {
        let entries = (0..d * d)
            .map(|k| {
                if k / d == k % d {
                    Poly::one(field, n, CoeffKind::Scalar)
                } else {
                    Poly::zero(field, n, CoeffKind::Scalar)
                }
            })
            .collect();
        Self { d, entries }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.d + j]
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.d, other.d)));
        }
        let d = self.d;
        let first = &self.entries[0];
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = Poly::zero(first.field, first.n, CoeffKind::Scalar);
                for k in 0..d {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j))?)?;
                }
                entries.push(acc);
            }
        }
        Ok(Self { d, entries })
    }

    pub fn scale(&self, c: &Poly) -> Result<Self> {
        let entries = self.entries.iter().map(|e| e.mul(c)).collect::<Result<_>>()?;
        Ok(Self { d: self.d, entries })
    }

    /// Reassembles a polynomial with `d×d` matrix coefficients.
    pub fn to_matrix_poly(&self) -> Poly {
        let first = &self.entries[0];
        let (field, n, d) = (first.field, first.n, self.d);
        let mut coeffs: BTreeMap<MultiIndex, FpMatrix> = BTreeMap::new();
        for (k, entry) in self.entries.iter().enumerate() {
            for (e, c) in entry.terms() {
                coeffs.entry(e.clone()).or_insert_with(|| FpMatrix::zeros(field, d, d)).set(k / d, k % d, c.get(0, 0));
            }
        }
        let mut out = Poly::zero(field, n, CoeffKind::Matrix(d));
        for (e, c) in coeffs {
            out.add_term(e, c);
        }
        out
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> PolyMatrix {
        let d = self.d;
        let mut entries = Vec::with_capacity((d - 1) * (d - 1));
        for i in (0..d).filter(|&i| i != skip_row) {
            for j in (0..d).filter(|&j| j != skip_col) {
                entries.push(self.get(i, j).clone());
            }
        }
        PolyMatrix { d: d - 1, entries }
    }

    fn det_unchecked(&self) -> Result<Poly> {
        if self.d == 1 {
            return Ok(self.entries[0].clone());
        }
        let first = &self.entries[0];
        let mut acc = Poly::zero(first.field, first.n, CoeffKind::Scalar);
        for j in 0..self.d {
            let a = self.get(0, j);
            if a.is_zero() {
                continue;
            }
            let term = a.mul(&self.minor(0, j).det_unchecked()?)?;
            acc = if j % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
        }
        Ok(acc)
    }
}

/// Determinant by cofactor expansion along the first row.
pub fn det_poly(m: &PolyMatrix) -> Result<Poly> {
    if m.d > MAX_DET_DIM {
        return Err(Error::DimensionMismatch(format!("d = {} exceeds {MAX_DET_DIM}", m.d)));
    }
    m.det_unchecked()
}

/// Transpose of the cofactor matrix: `m · adj(m) = adj(m) · m = det(m) · I`.
pub fn adjugate_poly(m: &PolyMatrix) -> Result<PolyMatrix> {
    if m.d > MAX_DET_DIM {
        return Err(Error::DimensionMismatch(format!("d = {} exceeds {MAX_DET_DIM}", m.d)));
    }
    let d = m.d;
    let first = &m.entries[0];
    if d == 1 {
        return Ok(PolyMatrix::identity(first.field, first.n, 1));
    }
    let mut entries = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let c = m.minor(j, i).det_unchecked()?;
            entries.push(if (i + j) % 2 == 0 { c } else { c.neg() });
        }
    }
    Ok(PolyMatrix { d, entries })
}

// ---------------------------------------------------------------------------
// Parser

/// Parses a polynomial.
///
/// Grammar (whitespace-insensitive):
///
/// ```text
/// poly    := ['+'|'-'] term (('+'|'-') term)*
/// term    := factor ('*' factor)*
/// factor  := integer | matrix | var ['^' integer]
/// matrix  := '[' row (',' row)* ']'      row := '[' integer (',' integer)* ']'
/// var     := 'x' digits | 'x' | 'y' | 'z'
/// ```
///
/// `x`, `y`, `z` abbreviate `x1`, `x2`, `x3`. A scalar factor in a matrix
/// polynomial stands for that multiple of the identity. Unicode minus is accepted.
pub fn parse_poly(text: &str, field: PrimeField, n: usize, kind: CoeffKind) -> Result<Poly> {
    let mut parser = Parser { chars: text.chars().collect(), pos: 0, field, n, kind };
    let poly = parser.poly()?;
    parser.skip_ws();
    if parser.pos < parser.chars.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(poly)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    field: PrimeField,
    n: usize,
    kind: CoeffKind,
}

impl Parser {
    fn error(&self, msg: &str) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sign(&mut self) -> Option<bool> {
        match self.peek() {
            Some('+') => {
                self.pos += 1;
                Some(false)
            }
            Some('-') | Some('−') => {
                self.pos += 1;
                Some(true)
            }
            _ => None,
        }
    }

    fn poly(&mut self) -> Result<Poly> {
        let mut acc = Poly::zero(self.field, self.n, self.kind);
        let mut negate = self.sign().unwrap_or(false);
        loop {
            let (e, c) = self.term()?;
            let c = if negate { c.neg() } else { c };
            acc.add_term(e, c);
            match self.sign() {
                Some(s) => negate = s,
                None => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<(MultiIndex, FpMatrix)> {
        let d = self.kind.d();
        let mut coeff = FpMatrix::identity(self.field, d);
        let mut exp = MultiIndex::zero(self.n);
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let v = self.integer()?;
                    coeff = coeff.scale(self.field.reduce(v));
                }
                Some('[') => {
                    let start = self.pos;
                    let m = self.matrix()?;
                    if self.kind == CoeffKind::Scalar {
                        return Err(Error::KindMismatch(format!(
                            "matrix literal at position {start} in a scalar polynomial"
                        )));
                    }
                    if m.rows() != d || m.cols() != d {
                        return Err(Error::KindMismatch(format!(
                            "{}x{} matrix literal at position {start}, expected {d}x{d}",
                            m.rows(),
                            m.cols()
                        )));
                    }
                    coeff = coeff.mul(&m)?;
                }
                Some('x') | Some('y') | Some('z') => {
                    let (i, e) = self.var()?;
                    exp.0[i] += e;
                }
                _ => return Err(self.error("expected a number, matrix or variable")),
            }
            if !self.eat('*') {
                break;
            }
        }
        Ok((exp, coeff))
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| Error::Syntax { pos: start, msg: "integer too large".into() })
    }

    fn signed_integer(&mut self) -> Result<i64> {
        let neg = matches!(self.sign(), Some(true));
        let v = self.integer()?;
        Ok(if neg { -v } else { v })
    }

    fn matrix(&mut self) -> Result<FpMatrix> {
        if !self.eat('[') {
            return Err(self.error("expected '['"));
        }
        let mut rows: Vec<Vec<i64>> = Vec::new();
        loop {
            if !self.eat('[') {
                return Err(self.error("expected '[' starting a matrix row"));
            }
            let mut row = vec![self.signed_integer()?];
            while self.eat(',') {
                row.push(self.signed_integer()?);
            }
            if !self.eat(']') {
                return Err(self.error("expected ']' closing a matrix row"));
            }
            rows.push(row);
            if !self.eat(',') {
                break;
            }
        }
        if !self.eat(']') {
            return Err(self.error("expected ']' closing the matrix"));
        }
        FpMatrix::from_rows(self.field, &rows).map_err(|_| self.error("ragged matrix literal"))
    }

    fn var(&mut self) -> Result<(usize, i64)> {
        self.skip_ws();
        let start = self.pos;
        let c = self.chars[self.pos];
        self.pos += 1;
        let mut digits = String::new();
        if c == 'x' {
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                digits.push(self.chars[self.pos]);
                self.pos += 1;
            }
        }
        let index = match (c, digits.as_str()) {
            ('x', "") => 1,
            ('y', _) => 2,
            ('z', _) => 3,
            (_, ds) => {
                ds.parse::<usize>().map_err(|_| Error::Syntax { pos: start, msg: "bad variable index".into() })?
            }
        };
        if index == 0 || index > self.n {
            return Err(Error::Syntax {
                pos: start,
                msg: format!("variable index {index} out of range 1..={}", self.n),
            });
        }
        let e = if self.eat('^') { self.integer()? } else { 1 };
        Ok((index - 1, e))
    }
}
