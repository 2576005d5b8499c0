//! Coefficient tilings of rational power series on finite boxes.
//!
//! Two independent routes are provided for scalar reciprocals: the direct
//! recurrence `M·Q = P` ([`expand_quotient`]) and the Frobenius recursion
//! `T(α) = Σ_{pγ+δ=α} h(δ) T(γ)` ([`frobenius_expand`]).

use crate::error::{Error, Result};
use crate::ff::{mat_inv, FpMatrix, PrimeField};
use crate::poly::{CoeffKind, MultiIndex, Poly};
use crate::tiling::{box_points, ColorKind, TilingBox};

/// Which quotient to expand: `P·Q⁻¹` (right) or `Q⁻¹·P` (left).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Side {
    #[default]
    Right,
    Left,
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "right" => Ok(Side::Right),
            "left" => Ok(Side::Left),
            _ => Err(Error::Invalid(format!("side must be 'left' or 'right', got '{s}'"))),
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Right => "right",
            Side::Left => "left",
        })
    }
}

pub fn color_kind_of(kind: CoeffKind) -> ColorKind {
    match kind {
        CoeffKind::Scalar => ColorKind::Scalar,
        CoeffKind::Matrix(d) => ColorKind::Matrix(d),
    }
}

/// A polynomial term flattened for the fill loops.
struct FlatTerm {
    exp: Vec<usize>,
    coeff: Vec<u32>,
}

fn flat_terms(poly: &Poly, skip_zero: bool) -> Vec<FlatTerm> {
    poly.terms()
        .filter(|(e, _)| !(skip_zero && e.is_zero()))
        .map(|(e, c)| FlatTerm { exp: e.0.iter().map(|&v| v as usize).collect(), coeff: c.data().to_vec() })
        .collect()
}

/// `acc -= a·b` for `d×d` row-major blocks.
#[inline]
fn sub_product(field: PrimeField, d: usize, acc: &mut [u32], a: &[u32], b: &[u32]) {
    let p = field.p() as u64;
    for i in 0..d {
        for j in 0..d {
            let mut s = 0u64;
            for k in 0..d {
                s += a[i * d + k] as u64 * b[k * d + j] as u64;
                if k % 8 == 7 {
                    s %= p;
                }
            }
            let s = (s % p) as u32;
            acc[i * d + j] = field.sub(acc[i * d + j], s);
        }
    }
}

#[inline]
fn product(field: PrimeField, d: usize, a: &[u32], b: &[u32], out: &mut [u32]) {
    let p = field.p() as u64;
    for i in 0..d {
        for j in 0..d {
            let s: u64 = (0..d).map(|k| a[i * d + k] as u64 * b[k * d + j] as u64 % p).sum();
            out[i * d + j] = (s % p) as u32;
        }
    }
}

/// Coefficients of `P·Q⁻¹` (or `Q⁻¹·P`) on `[0, extents)`.
///
/// Each cell solves the convolution identity at that exponent; cells are
/// filled in lexicographic order, so every `α − δ` with `δ ≥ 0, δ ≠ 0`
/// is already known.
pub fn expand_quotient(p_num: &Poly, q: &Poly, side: Side, extents: &[usize]) -> Result<TilingBox> {
    if p_num.field() != q.field() || p_num.n() != q.n() || p_num.kind() != q.kind() {
        return Err(Error::KindMismatch("numerator and denominator differ in p, n or kind".into()));
    }
    if extents.len() != q.n() {
        return Err(Error::DimensionMismatch(format!(
            "{}-dimensional box for {} indeterminates",
            extents.len(),
            q.n()
        )));
    }
    let field = q.field();
    let d = q.kind().d();
    let dd = d * d;
    let q0_inv = mat_inv(&q.independent_term()).map_err(|_| Error::NotAUnit)?;
    let q0_inv = q0_inv.data().to_vec();
    let q_terms = flat_terms(q, true);

    let mut out = TilingBox::zeros(field, color_kind_of(q.kind()), extents.to_vec())?;
    for t in flat_terms(p_num, false) {
        if t.exp.iter().zip(extents).all(|(&e, &n)| e < n) {
            let flat = out.flat_index(&t.exp);
            out.cell_mut(flat).copy_from_slice(&t.coeff);
        }
    }

    let strides: Vec<usize> = (0..extents.len()).map(|i| extents[i + 1..].iter().product()).collect();
    let q_offsets: Vec<usize> = q_terms.iter().map(|t| t.exp.iter().zip(&strides).map(|(e, s)| e * s).sum()).collect();

    let mut acc = vec![0u32; dd];
    let mut tmp = vec![0u32; dd];
    for (flat, alpha) in box_points(extents).enumerate() {
        acc.copy_from_slice(out.cell(flat));
        for (t, &off) in q_terms.iter().zip(&q_offsets) {
            if alpha.iter().zip(&t.exp).any(|(a, e)| a < e) {
                continue;
            }
            let prev = &out.data()[(flat - off) * dd..(flat - off + 1) * dd];
            if d == 1 {
                acc[0] = field.sub(acc[0], field.mul(prev[0], t.coeff[0]));
            } else {
                match side {
                    Side::Right => sub_product(field, d, &mut acc, prev, &t.coeff),
                    Side::Left => sub_product(field, d, &mut acc, &t.coeff, prev),
                }
            }
        }
        match side {
            Side::Right => product(field, d, &acc, &q0_inv, &mut tmp),
            Side::Left => product(field, d, &q0_inv, &acc, &mut tmp),
        }
        out.cell_mut(flat).copy_from_slice(&tmp);
    }
    Ok(out)
}

/// Coefficients of `1/Q0` for a scalar `Q0`.
pub fn scalar_reciprocal(q0: &Poly, extents: &[usize]) -> Result<TilingBox> {
    if q0.kind() != CoeffKind::Scalar {
        return Err(Error::KindMismatch("scalar_reciprocal needs a scalar polynomial".into()));
    }
    let one = Poly::one(q0.field(), q0.n(), CoeffKind::Scalar);
    expand_quotient(&one, q0, Side::Right, extents)
}

/// `h = Σ_{i=0}^{p-1} R^i`.
pub fn compute_h(r: &Poly) -> Result<Poly> {
    if r.kind() != CoeffKind::Scalar {
        return Err(Error::KindMismatch("h is defined for scalar R".into()));
    }
    if r.scalar_coeff(&MultiIndex::zero(r.n())) != 0 {
        return Err(Error::NonzeroConstantTerm);
    }
    let mut h = Poly::one(r.field(), r.n(), CoeffKind::Scalar);
    let mut power = h.clone();
    for _ in 1..r.field().p() {
        power = power.mul(r)?;
        h = h.add(&power)?;
    }
    Ok(h)
}

/// `R = 1 − a⁻¹·Q0` where `a` is the independent term of `Q0`; returns `(R, a⁻¹)`.
pub fn normalized_r(q0: &Poly) -> Result<(Poly, u32)> {
    let field = q0.field();
    let a = q0.scalar_coeff(&MultiIndex::zero(q0.n()));
    let a_inv = field.inv(a).map_err(|_| Error::NotAUnit)?;
    let scaled = q0.right_scale(&FpMatrix::scalar(field, 1, a_inv))?;
    let r = Poly::one(field, q0.n(), CoeffKind::Scalar).sub(&scaled)?;
    Ok((r, a_inv))
}

/// Coefficients of `1/(1−R)` via the Frobenius recursion, never touching
/// the series product directly.
pub fn frobenius_expand(r: &Poly, extents: &[usize]) -> Result<TilingBox> {
    let h = compute_h(r)?;
    let field = r.field();
    let p = field.p() as usize;
    let h_terms = flat_terms(&h, false);
    let mut out = TilingBox::zeros(field, ColorKind::Scalar, extents.to_vec())?;
    if out.cells() == 0 {
        return Ok(out);
    }
    out.cell_mut(0)[0] = 1;
    let mut gamma = vec![0usize; extents.len()];
    for (flat, alpha) in box_points(extents).enumerate().skip(1) {
        let mut s = 0u32;
        'terms: for t in &h_terms {
            for i in 0..alpha.len() {
                if alpha[i] < t.exp[i] || (alpha[i] - t.exp[i]) % p != 0 {
                    continue 'terms;
                }
                gamma[i] = (alpha[i] - t.exp[i]) / p;
            }
            // γ < α for α ≠ 0, so T(γ) is already filled
            let g = out.flat_index(&gamma);
            s = field.mul_add(s, t.coeff[0], out.cell(g)[0]);
        }
        out.cell_mut(flat)[0] = s;
    }
    Ok(out)
}

/// `1/Q0 = a⁻¹ · 1/(1 − (1 − a⁻¹Q0))` computed through [`frobenius_expand`].
pub fn frobenius_reciprocal(q0: &Poly, extents: &[usize]) -> Result<TilingBox> {
    let (r, a_inv) = normalized_r(q0)?;
    Ok(frobenius_expand(&r, extents)?.scaled(a_inv))
}
