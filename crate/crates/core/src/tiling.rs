//! Finite windows of tilings Z^n → colors, and the derived tilings built
//! from windows: the window tiling `T̄` and the block tilings `T^ℓ`.
//!
//! Colors are vectors over F_p. A scalar color has one coordinate, a `d×d`
//! matrix has `d²` (row-major), and a window color concatenates the inner
//! colors of its offsets in lexicographic order. That single enumeration is
//! the basis every linear map in [`crate::substitution`] is written in.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::ff::PrimeField;

/// Largest number of cells a [`TilingBox`] may hold.
pub const MAX_CELLS: u128 = 1 << 26;

/// Box-shaped set of offsets `∏ [lo_i, lo_i + len_i)`, enumerated
/// lexicographically (first axis slowest).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WindowShape {
    lo: Vec<i64>,
    len: Vec<usize>,
}

impl WindowShape {
    pub fn new(lo: Vec<i64>, len: Vec<usize>) -> Self {
        assert_eq!(lo.len(), len.len());
        Self { lo, len }
    }

    /// `{0}^n`.
    pub fn single(n: usize) -> Self {
        Self::new(vec![0; n], vec![1; n])
    }

    /// `I(r)^n = {0, …, p^r − 1}^n`.
    pub fn i_cube(n: usize, p: u32, r: u32) -> Self {
        Self::cube(n, 0, (p as usize).pow(r))
    }

    /// `J(r)^n = {−D+1, …, p^r − 1}^n`.
    pub fn j_cube(n: usize, d_window: usize, p: u32, r: u32) -> Self {
        let side = d_window - 1 + (p as usize).pow(r);
        Self::cube(n, -(d_window as i64) + 1, side)
    }

    /// `{lo, …, lo + side − 1}^n`.
    pub fn cube(n: usize, lo: i64, side: usize) -> Self {
        Self::new(vec![lo; n], vec![side; n])
    }

    pub fn n(&self) -> usize {
        self.lo.len()
    }

    pub fn len(&self) -> usize {
        self.len.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    /// Largest offset along each axis.
    pub fn hi(&self) -> Vec<i64> {
        self.lo.iter().zip(&self.len).map(|(&l, &n)| l + n as i64 - 1).collect()
    }

    /// Position of `offset` in the canonical enumeration.
    pub fn index_of(&self, offset: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for ((&o, &l), &n) in offset.iter().zip(&self.lo).zip(&self.len) {
            let k = o - l;
            if k < 0 || k >= n as i64 {
                return None;
            }
            idx = idx * n + k as usize;
        }
        Some(idx)
    }

    pub fn offset_at(&self, mut idx: usize) -> Vec<i64> {
        let mut out = vec![0i64; self.n()];
        for i in (0..self.n()).rev() {
            out[i] = self.lo[i] + (idx % self.len[i]) as i64;
            idx /= self.len[i];
        }
        out
    }

    /// Offsets in canonical (lexicographic) order.
    pub fn offsets(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len()).map(move |i| self.offset_at(i))
    }
}

/// What the cells of a tiling hold.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ColorKind {
    Scalar,
    Matrix(usize),
    Window { shape: WindowShape, inner: Box<ColorKind> },
}

impl ColorKind {
    /// Number of F_p coordinates of one color.
    pub fn dim(&self) -> usize {
        match self {
            ColorKind::Scalar => 1,
            ColorKind::Matrix(d) => d * d,
            ColorKind::Window { shape, inner } => shape.len() * inner.dim(),
        }
    }

    pub fn window(shape: WindowShape, inner: ColorKind) -> Self {
        ColorKind::Window { shape, inner: Box::new(inner) }
    }
}

/// The value of a tiling on `α + K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowValue {
    pub shape: WindowShape,
    pub inner_dim: usize,
    pub values: Vec<u32>,
}

impl WindowValue {
    pub fn at(&self, offset: &[i64]) -> Option<&[u32]> {
        let i = self.shape.index_of(offset)?;
        Some(&self.values[i * self.inner_dim..(i + 1) * self.inner_dim])
    }
}

/// Dense window `[0, N_1) × … × [0, N_n)` of a tiling whose support lies in
/// N^n. Reads at points with a negative coordinate return the zero color;
/// reads past the extents are errors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingBox {
    field: PrimeField,
    kind: ColorKind,
    extents: Vec<usize>,
    dim: usize,
    data: Vec<u32>,
    zero: Vec<u32>,
}

pub fn check_cells(extents: &[usize]) -> Result<usize> {
    let cells: u128 = extents.iter().map(|&e| e as u128).product();
    if cells > MAX_CELLS {
        return Err(Error::BoxTooLarge { cells });
    }
    Ok(cells as usize)
}

impl TilingBox {
    pub fn zeros(field: PrimeField, kind: ColorKind, extents: Vec<usize>) -> Result<Self> {
        let cells = check_cells(&extents)?;
        let dim = kind.dim();
        Ok(Self { field, kind, extents, dim, data: vec![0; cells * dim], zero: vec![0; dim] })
    }

    pub fn from_data(field: PrimeField, kind: ColorKind, extents: Vec<usize>, data: Vec<u32>) -> Result<Self> {
        let cells = check_cells(&extents)?;
        let dim = kind.dim();
        if data.len() != cells * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {cells} cells of dimension {dim}",
                data.len()
            )));
        }
        Ok(Self { field, kind, extents, dim, data, zero: vec![0; dim] })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }
    pub fn kind(&self) -> &ColorKind {
        &self.kind
    }
    pub fn n(&self) -> usize {
        self.extents.len()
    }
    pub fn extents(&self) -> &[usize] {
        &self.extents
    }
    /// Coordinates per color.
    pub fn color_dim(&self) -> usize {
        self.dim
    }
    pub fn cells(&self) -> usize {
        self.extents.iter().product()
    }
    pub fn data(&self) -> &[u32] {
        &self.data
    }
    pub fn data_mut(&mut self) -> &mut [u32] {
        &mut self.data
    }

    /// Row-major flat index of an in-box point.
    #[inline]
    pub fn flat_index(&self, alpha: &[usize]) -> usize {
        alpha.iter().zip(&self.extents).fold(0, |acc, (&a, &n)| acc * n + a)
    }

    pub fn coords_of(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.n()];
        for i in (0..self.n()).rev() {
            out[i] = flat % self.extents[i];
            flat /= self.extents[i];
        }
        out
    }

    #[inline]
    pub fn cell(&self, flat: usize) -> &[u32] {
        &self.data[flat * self.dim..(flat + 1) * self.dim]
    }

    #[inline]
    pub fn cell_mut(&mut self, flat: usize) -> &mut [u32] {
        &mut self.data[flat * self.dim..(flat + 1) * self.dim]
    }

    /// `T(α)` for any `α ∈ Z^n`: zero off N^n, an error past the extents.
    pub fn get(&self, alpha: &[i64]) -> Result<&[u32]> {
        if alpha.iter().any(|&a| a < 0) {
            return Ok(&self.zero);
        }
        if alpha.iter().zip(&self.extents).any(|(&a, &n)| a >= n as i64) {
            return Err(Error::OutOfWindow { index: alpha.to_vec(), extents: self.extents.clone() });
        }
        let mut flat = 0usize;
        for (&a, &n) in alpha.iter().zip(&self.extents) {
            flat = flat * n + a as usize;
        }
        Ok(self.cell(flat))
    }

    pub fn set(&mut self, alpha: &[usize], color: &[u32]) {
        let flat = self.flat_index(alpha);
        self.cell_mut(flat).copy_from_slice(color);
    }

    /// Scalar value of a scalar tiling.
    pub fn scalar(&self, alpha: &[i64]) -> Result<u32> {
        Ok(self.get(alpha)?[0])
    }

    /// Same cells, reinterpreted with another color kind of equal dimension.
    pub fn with_kind(mut self, kind: ColorKind) -> Result<Self> {
        if kind.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!("color dimension {} vs {}", kind.dim(), self.dim)));
        }
        self.kind = kind;
        Ok(self)
    }

    /// Multiplies every coordinate by `c`.
    pub fn scaled(&self, c: u32) -> Self {
        let f = self.field;
        let data = self.data.iter().map(|&v| f.mul(v, c)).collect();
        Self { data, ..self.clone() }
    }

    /// The sub-box `[0, extents)`; `extents` must fit inside this box.
    pub fn restrict(&self, extents: &[usize]) -> Result<Self> {
        if extents.len() != self.n() || extents.iter().zip(&self.extents).any(|(a, b)| a > b) {
            return Err(Error::DimensionMismatch(format!("cannot restrict {:?} to {extents:?}", self.extents)));
        }
        let mut out = Self::zeros(self.field, self.kind.clone(), extents.to_vec())?;
        for flat in 0..out.cells() {
            let a = out.coords_of(flat);
            let src = self.flat_index(&a);
            out.cell_mut(flat).copy_from_slice(self.cell(src));
        }
        Ok(out)
    }
}

/// Iterates the points of `[0, extents)` in lexicographic order.
pub fn box_points(extents: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = extents.iter().product();
    let mut cur = vec![0usize; extents.len()];
    let mut first = true;
    (0..total).map(move |_| {
        if first {
            first = false;
        } else {
            for i in (0..cur.len()).rev() {
                cur[i] += 1;
                if cur[i] < extents[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
        cur.clone()
    })
}

/// `T|_{α+K}`.
pub fn window(t: &TilingBox, alpha: &[i64], shape: &WindowShape) -> Result<WindowValue> {
    let inner_dim = t.color_dim();
    let mut values = Vec::with_capacity(shape.len() * inner_dim);
    let mut point = vec![0i64; alpha.len()];
    for off in shape.offsets() {
        for ((p, &a), &o) in point.iter_mut().zip(alpha).zip(&off) {
            *p = a + o;
        }
        values.extend_from_slice(t.get(&point)?);
    }
    Ok(WindowValue { shape: shape.clone(), inner_dim, values })
}

/// The tiling `α ↦ T|_{α+K}` on the sub-box where every read is resolvable.
pub fn window_tiling(t: &TilingBox, shape: &WindowShape) -> Result<TilingBox> {
    let hi = shape.hi();
    let valid: Vec<usize> = t.extents().iter().zip(&hi).map(|(&n, &h)| (n as i64 - h.max(0)).max(0) as usize).collect();
    let kind = ColorKind::window(shape.clone(), t.kind().clone());
    let mut out = TilingBox::zeros(t.field(), kind, valid.clone())?;
    let inner = t.color_dim();
    let offsets: Vec<Vec<i64>> = shape.offsets().collect();
    let mut point = vec![0i64; t.n()];
    for (flat, a) in box_points(&valid).enumerate() {
        let cell = out.cell_mut(flat);
        for (k, off) in offsets.iter().enumerate() {
            for i in 0..point.len() {
                point[i] = a[i] as i64 + off[i];
            }
            cell[k * inner..(k + 1) * inner].copy_from_slice(t.get(&point)?);
        }
    }
    Ok(out)
}

/// `T̄(α) = T|_{α + J(0)^n}` with `J(0) = {−D+1, …, 0}`. Since every offset is
/// non-positive, `T̄` is defined on the whole box of `T`.
pub fn tbar(t: &TilingBox, d_window: usize) -> Result<TilingBox> {
    if *t.kind() != ColorKind::Scalar {
        return Err(Error::KindMismatch("window tiling T̄ needs a scalar tiling".into()));
    }
    let shape = WindowShape::cube(t.n(), -(d_window as i64) + 1, d_window);
    window_tiling(t, &shape)
}

/// `T^ℓ(α) = T|_{ℓα + I^n}`, `I = {0, …, ℓ−1}`.
pub fn block_tiling(t: &TilingBox, ell: usize) -> Result<TilingBox> {
    if ell == 0 || t.extents().iter().any(|&e| e % ell != 0) {
        return Err(Error::NotDivisible { extents: t.extents().to_vec(), factor: ell });
    }
    let shape = WindowShape::cube(t.n(), 0, ell);
    let ext: Vec<usize> = t.extents().iter().map(|&e| e / ell).collect();
    let kind = ColorKind::window(shape.clone(), t.kind().clone());
    let mut out = TilingBox::zeros(t.field(), kind, ext.clone())?;
    let inner = t.color_dim();
    let offsets: Vec<Vec<usize>> = shape.offsets().map(|o| o.iter().map(|&v| v as usize).collect()).collect();
    let mut point = vec![0usize; t.n()];
    for (flat, a) in box_points(&ext).enumerate() {
        for (k, off) in offsets.iter().enumerate() {
            for i in 0..point.len() {
                point[i] = ell * a[i] + off[i];
            }
            let src = t.flat_index(&point);
            out.cell_mut(flat)[k * inner..(k + 1) * inner].copy_from_slice(t.cell(src));
        }
    }
    Ok(out)
}

/// Number of distinct colors occurring in the box.
pub fn count_colors(t: &TilingBox) -> usize {
    let mut seen: HashSet<&[u32]> = HashSet::new();
    for flat in 0..t.cells() {
        seen.insert(t.cell(flat));
    }
    seen.len()
}
