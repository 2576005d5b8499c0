//! Linear substitutions and their synthesis from a rational series `P·Q⁻¹`.
//!
//! The pipeline:
//!
//! 1. reduce the (possibly matrix) quotient to the scalar denominator
//!    `Q0 = det Q` and the numerators `P·adj Q` ([`build_tau`]);
//! 2. write `1/Q0 = a⁻¹/(1−R)` and build `h = Σ_{i<p} R^i`;
//! 3. `Φ₁` maps the window `T|_{α+J(0)^n}` to `T|_{pα+J(1)^n}` ([`build_phi1`]);
//! 4. regrouping `Φ₁` by the sub-windows `β + J(0)^n` gives the length-`p`
//!    substitution `S` fixing `T̄` ([`build_substitution`]);
//! 5. `τ` reads `M(α)` off `T̄(α)`, and the kernel chain of
//!    `Φ_s = τ^{I(s)^n} ∘ S^s` yields a substitution for the block tiling
//!    `M^{p^r}` ([`find_block_substitution`]).

use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expand::{compute_h, expand_quotient, normalized_r, scalar_reciprocal, Side};
use crate::ff::{kernel_basis, solve_linear, subspace_leq, FpMatrix, PrimeField, Subspace};
use crate::poly::{adjugate_poly, det_poly, CoeffKind, MultiIndex, Poly, PolyMatrix};
use crate::tiling::{box_points, check_cells, tbar, TilingBox, WindowShape};

/// A family `{S_β}` of `color_dim × color_dim` matrices indexed by
/// `β ∈ I(t)^n`, i.e. a linear substitution of length `p^t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSubstitution {
    field: PrimeField,
    t: u32,
    n: usize,
    color_dim: usize,
    maps: Vec<FpMatrix>,
}

impl LinearSubstitution {
    /// `maps` are indexed by `β ∈ I(t)^n` in lexicographic order.
    pub fn new(field: PrimeField, t: u32, n: usize, color_dim: usize, maps: Vec<FpMatrix>) -> Result<Self> {
        let expected = (field.p() as usize).pow(t * n as u32);
        if maps.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{} maps for a substitution of length {}^{t} in dimension {n}",
                maps.len(),
                field.p()
            )));
        }
        for m in &maps {
            if m.rows() != color_dim || m.cols() != color_dim || m.field() != field {
                return Err(Error::DimensionMismatch(format!(
                    "map of size {}x{}, expected {color_dim}x{color_dim}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(Self { field, t, n, color_dim, maps })
    }

    /// The length-1 substitution `S_0 = id`.
    pub fn identity(field: PrimeField, n: usize, color_dim: usize) -> Self {
        Self { field, t: 0, n, color_dim, maps: vec![FpMatrix::identity(field, color_dim)] }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }
    pub fn t(&self) -> u32 {
        self.t
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn color_dim(&self) -> usize {
        self.color_dim
    }
    /// Side length `p^t` of the substituted blocks.
    pub fn length(&self) -> usize {
        (self.field.p() as usize).pow(self.t)
    }
    pub fn shape(&self) -> WindowShape {
        WindowShape::i_cube(self.n, self.field.p(), self.t)
    }
    pub fn maps(&self) -> &[FpMatrix] {
        &self.maps
    }

    pub fn map(&self, beta: &[i64]) -> Option<&FpMatrix> {
        self.shape().index_of(beta).map(|i| &self.maps[i])
    }

    /// The block `S_c` as one vector: the colors `S_β c` concatenated over β.
    pub fn block_of(&self, color: &[u32]) -> Result<Vec<u32>> {
        let mut out = Vec::with_capacity(self.maps.len() * self.color_dim);
        for m in &self.maps {
            out.extend(m.mul_vec(color)?);
        }
        Ok(out)
    }

    /// Rank of the map `c ↦ (S_β c)_β`.
    pub fn rank(&self) -> usize {
        let parts: Vec<&FpMatrix> = self.maps.iter().collect();
        FpMatrix::vstack(self.field, self.color_dim, &parts).expect("uniform maps").rank()
    }
}

/// `coarse` then `fine`: the substitution of length `ℓ₁ℓ₂` whose map at
/// `β = ℓ₂β′ + β₀` is `fine_{β₀} ∘ coarse_{β′}`.
pub fn compose(coarse: &LinearSubstitution, fine: &LinearSubstitution) -> Result<LinearSubstitution> {
    if coarse.field != fine.field || coarse.n != fine.n || coarse.color_dim != fine.color_dim {
        return Err(Error::DimensionMismatch("substitutions are not composable".into()));
    }
    let t = coarse.t + fine.t;
    let shape = WindowShape::i_cube(coarse.n, coarse.field.p(), t);
    let fine_len = fine.length() as i64;
    let (cs, fs) = (coarse.shape(), fine.shape());
    let mut maps = Vec::with_capacity(shape.len());
    for beta in shape.offsets() {
        let outer: Vec<i64> = beta.iter().map(|b| b / fine_len).collect();
        let inner: Vec<i64> = beta.iter().map(|b| b % fine_len).collect();
        let c = &coarse.maps[cs.index_of(&outer).expect("in range")];
        let f = &fine.maps[fs.index_of(&inner).expect("in range")];
        maps.push(f.mul(c)?);
    }
    LinearSubstitution::new(coarse.field, t, coarse.n, coarse.color_dim, maps)
}

/// `S^s`; `s = 0` gives the identity substitution.
pub fn iterate_substitution(s: &LinearSubstitution, times: u32) -> Result<LinearSubstitution> {
    let mut acc = LinearSubstitution::identity(s.field, s.n, s.color_dim);
    for _ in 0..times {
        acc = compose(&acc, s)?;
    }
    Ok(acc)
}

/// `^S T`, defined by `^S T(ℓα + β) = S_β(T(α))`.
pub fn apply_substitution(s: &LinearSubstitution, t: &TilingBox) -> Result<TilingBox> {
    if t.color_dim() != s.color_dim || t.n() != s.n {
        return Err(Error::DimensionMismatch(format!(
            "tiling with {}-dim colors in dimension {}, substitution on {}-dim colors in dimension {}",
            t.color_dim(),
            t.n(),
            s.color_dim,
            s.n
        )));
    }
    let ell = s.length();
    let ext: Vec<usize> = t.extents().iter().map(|&e| e * ell).collect();
    let mut out = TilingBox::zeros(t.field(), t.kind().clone(), ext)?;
    let betas: Vec<Vec<usize>> = s.shape().offsets().map(|b| b.iter().map(|&v| v as usize).collect()).collect();
    let mut point = vec![0usize; t.n()];
    let mut buf = vec![0u32; s.color_dim];
    for (flat, alpha) in box_points(t.extents()).enumerate() {
        let color = t.cell(flat);
        for (m, beta) in s.maps.iter().zip(&betas) {
            for i in 0..point.len() {
                point[i] = ell * alpha[i] + beta[i];
            }
            m.mul_vec_into(color, &mut buf)?;
            out.set(&point, &buf);
        }
    }
    Ok(out)
}

/// Matrix of `Φ₁ : F_p^{J(0)^n} → F_p^{J(1)^n}`,
/// `Φ₁(f)(β) = Σ_{0≤δ≤(p−1)D, δ≡β mod p} h(δ) f((β−δ)/p)`.
pub fn build_phi1(h: &Poly, d_window: usize, n: usize) -> Result<FpMatrix> {
    let field = h.field();
    let p = field.p();
    let bound = (p as i64 - 1) * d_window as i64;
    for (e, _) in h.terms() {
        if e.0.iter().any(|&v| v < 0 || v > bound) {
            return Err(Error::DegreeTooLarge { bound });
        }
    }
    let j0 = WindowShape::j_cube(n, d_window, p, 0);
    let j1 = WindowShape::j_cube(n, d_window, p, 1);
    let mut phi = FpMatrix::zeros(field, j1.len(), j0.len());
    let pi = p as i64;
    for (row, beta) in j1.offsets().enumerate() {
        for (delta, c) in h.terms() {
            let congruent = beta.iter().zip(&delta.0).all(|(b, d)| (b - d).rem_euclid(pi) == 0);
            if !congruent {
                continue;
            }
            let gamma: Vec<i64> = beta.iter().zip(&delta.0).map(|(b, d)| (b - d) / pi).collect();
            let col = j0.index_of(&gamma).ok_or(Error::DegreeTooLarge { bound })?;
            let v = field.add(phi.get(row, col), c.get(0, 0));
            phi.set(row, col, v);
        }
    }
    Ok(phi)
}

/// `S = σ ∘ Φ₁`: `S_β` selects the rows `β + J(0)^n ⊆ J(1)^n` of `Φ₁`.
pub fn build_substitution(phi1: &FpMatrix, d_window: usize, n: usize) -> Result<LinearSubstitution> {
    let field = phi1.field();
    let p = field.p();
    let j0 = WindowShape::j_cube(n, d_window, p, 0);
    let j1 = WindowShape::j_cube(n, d_window, p, 1);
    if phi1.rows() != j1.len() || phi1.cols() != j0.len() {
        return Err(Error::DimensionMismatch(format!(
            "Φ₁ is {}x{}, expected {}x{}",
            phi1.rows(),
            phi1.cols(),
            j1.len(),
            j0.len()
        )));
    }
    let maps = WindowShape::i_cube(n, p, 1)
        .offsets()
        .map(|beta| {
            let rows: Vec<usize> = j0
                .offsets()
                .map(|g| {
                    let o: Vec<i64> = beta.iter().zip(&g).map(|(b, g)| b + g).collect();
                    j1.index_of(&o).expect("β + J(0) ⊆ J(1)")
                })
                .collect();
            phi1.select_rows(&rows)
        })
        .collect();
    LinearSubstitution::new(field, 1, n, j0.len(), maps)
}

/// Linear map `τ : F_p^{J(0)^n} → A` with `M = τ ∘ T̄`; rows are the
/// coordinates of `A` (row-major matrix entries), columns the window offsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauMap {
    pub matrix: FpMatrix,
    pub d_window: usize,
    pub n: usize,
}

impl TauMap {
    /// `τ(f) = Σ_β w_k(β) f(−β)` for each output coordinate `k`, where
    /// `w_k` are the coefficients of `numerators[k]`.
    pub fn from_numerators(numerators: &[Poly], d_window: usize, n: usize) -> Result<Self> {
        let field = numerators[0].field();
        let j0 = WindowShape::j_cube(n, d_window, field.p(), 0);
        let mut matrix = FpMatrix::zeros(field, numerators.len(), j0.len());
        for (k, num) in numerators.iter().enumerate() {
            for (beta, c) in num.terms() {
                let neg: Vec<i64> = beta.0.iter().map(|b| -b).collect();
                let col = j0.index_of(&neg).ok_or_else(|| {
                    Error::DimensionMismatch(format!("numerator term {beta:?} outside the window D={d_window}"))
                })?;
                matrix.set(k, col, c.get(0, 0));
            }
        }
        Ok(Self { matrix, d_window, n })
    }

    pub fn apply(&self, window: &[u32]) -> Result<Vec<u32>> {
        self.matrix.mul_vec(window)
    }

    /// Dimension of the target space `A`.
    pub fn target_dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// Result of reducing `P·Q⁻¹` to scalar data.
#[derive(Clone, Debug)]
pub struct TauBuild {
    pub tau: TauMap,
    /// Window radius actually used (always sufficient).
    pub d_window: usize,
    /// `max{1, 1+deg P, d·deg Q}`.
    pub d_nominal: usize,
    /// Scalar denominator: `Q` itself, or `det Q`.
    pub q0: Poly,
    /// Scalar numerators, one per coordinate of `A`.
    pub numerators: Vec<Poly>,
}

/// Builds `τ`, the window radius `D` and the scalar denominator `Q0`.
///
/// For matrix coefficients `M = P·adj(Q)/det(Q)` (or `adj(Q)·P/det(Q)` on the
/// left); the window is the larger of `max{1, 1+deg P, d·deg Q}` and the
/// per-entry requirement `max{1, 1+deg(P̃_ij), deg Q0}`.
pub fn build_tau(p_num: &Poly, q: &Poly, side: Side) -> Result<TauBuild> {
    if p_num.field() != q.field() || p_num.n() != q.n() || p_num.kind() != q.kind() {
        return Err(Error::KindMismatch("numerator and denominator differ in p, n or kind".into()));
    }
    if !q.is_series_unit() {
        return Err(Error::NotAUnit);
    }
    let n = q.n();
    let d = q.kind().d() as i64;
    let d_nominal = 1.max(1 + p_num.deg().overall).max(d * q.deg().overall) as usize;
    let (q0, numerators) = match q.kind() {
        CoeffKind::Scalar => (q.clone(), vec![p_num.clone()]),
        CoeffKind::Matrix(_) => {
            let qm = q.to_poly_matrix();
            let q0 = det_poly(&qm)?;
            let adj = adjugate_poly(&qm)?;
            let pm = p_num.to_poly_matrix();
            let num: PolyMatrix = match side {
                Side::Right => pm.mul(&adj)?,
                Side::Left => adj.mul(&pm)?,
            };
            let dd = num.d();
            let entries = (0..dd * dd).map(|k| num.get(k / dd, k % dd).clone()).collect();
            (q0, entries)
        }
    };
    let max_num = numerators.iter().map(|p| p.deg().overall).max().unwrap_or(-1);
    let d_window = (d_nominal as i64).max(1 + max_num).max(q0.deg().overall).max(1) as usize;
    let tau = TauMap::from_numerators(&numerators, d_window, n)?;
    Ok(TauBuild { tau, d_window, d_nominal, q0, numerators })
}

/// Everything synthesized from one configuration `(P, Q, side)`.
#[derive(Clone, Debug)]
pub struct Synthesis {
    pub p_num: Poly,
    pub q: Poly,
    pub side: Side,
    pub tau: TauMap,
    pub d_window: usize,
    pub d_nominal: usize,
    pub q0: Poly,
    pub numerators: Vec<Poly>,
    pub r: Poly,
    pub h: Poly,
    pub phi1: FpMatrix,
    pub subst: LinearSubstitution,
}

pub fn synthesize(p_num: &Poly, q: &Poly, side: Side) -> Result<Synthesis> {
    let TauBuild { tau, d_window, d_nominal, q0, numerators } = build_tau(p_num, q, side)?;
    let (r, _) = normalized_r(&q0)?;
    let h = compute_h(&r)?;
    let phi1 = build_phi1(&h, d_window, q.n())?;
    let subst = build_substitution(&phi1, d_window, q.n())?;
    Ok(Synthesis {
        p_num: p_num.clone(),
        q: q.clone(),
        side,
        tau,
        d_window,
        d_nominal,
        q0,
        numerators,
        r,
        h,
        phi1,
        subst,
    })
}

impl Synthesis {
    pub fn field(&self) -> PrimeField {
        self.q.field()
    }

    pub fn n(&self) -> usize {
        self.q.n()
    }

    /// `M`, the coefficients of the quotient.
    pub fn m_box(&self, extents: &[usize]) -> Result<TilingBox> {
        expand_quotient(&self.p_num, &self.q, self.side, extents)
    }

    /// `T`, the coefficients of `1/Q0`.
    pub fn t_box(&self, extents: &[usize]) -> Result<TilingBox> {
        scalar_reciprocal(&self.q0, extents)
    }

    /// `T̄`, windows of `T` of radius `D`.
    pub fn tbar_box(&self, extents: &[usize]) -> Result<TilingBox> {
        tbar(&self.t_box(extents)?, self.d_window)
    }
}

/// `Φ_s = τ^{I(s)^n} ∘ S^s`, rows grouped by `β ∈ I(s)^n` (lexicographic),
/// then by coordinate of `A`.
pub fn compose_tau_blocks(tau: &TauMap, s: &LinearSubstitution, times: u32) -> Result<FpMatrix> {
    let mut phi = tau.matrix.clone();
    for k in 0..times {
        phi = phi_step(&phi, tau.target_dim(), s, k)?;
    }
    Ok(phi)
}

/// `Φ_{k+1}` from `Φ_k`: writing `β = p^k β₀ + β′` with `β₀ ∈ I(1)^n`,
/// `(S^{k+1})_β = (S^k)_{β′} ∘ S_{β₀}`, so the block of `Φ_{k+1}` at `β` is
/// the block of `Φ_k` at `β′` times `S_{β₀}`.
fn phi_step(phi: &FpMatrix, vdim: usize, s: &LinearSubstitution, k: u32) -> Result<FpMatrix> {
    if s.t != 1 {
        return Err(Error::DimensionMismatch("Φ_s needs a length-p substitution".into()));
    }
    let field = s.field;
    let p = field.p();
    let n = s.n;
    let next_rows = phi.rows() * (p as usize).pow(n as u32);
    check_cells(&[next_rows, phi.cols()])?;
    let big = WindowShape::i_cube(n, p, k + 1);
    let small = WindowShape::i_cube(n, p, k);
    let top = WindowShape::i_cube(n, p, 1);
    let scale = (p as i64).pow(k);
    let mut data = Vec::with_capacity(next_rows * phi.cols());
    for beta in big.offsets() {
        let b0: Vec<i64> = beta.iter().map(|b| b / scale).collect();
        let rest: Vec<i64> = beta.iter().map(|b| b % scale).collect();
        let i = small.index_of(&rest).expect("in range");
        let block = phi.select_rows(&(i * vdim..(i + 1) * vdim).collect::<Vec<_>>());
        let prod = block.mul(&s.maps[top.index_of(&b0).expect("in range")])?;
        data.extend_from_slice(prod.data());
    }
    FpMatrix::from_data(field, next_rows, phi.cols(), data)
}

/// Output of [`find_block_substitution`].
#[derive(Clone, Debug)]
pub struct BlockSubstitution {
    pub r: u32,
    pub t: u32,
    /// Substitution of length `p^t` on colors `A^{I(r)^n}`.
    pub subst: LinearSubstitution,
    /// `ρ : A^{I(r)^n} → A^{I(r+t)^n}` with `Φ_{r+t} = ρ ∘ Φ_r`.
    pub rho: FpMatrix,
    pub rho_rank: usize,
    /// `dim ker Φ_s` for every `s` computed.
    pub kernel_dims: Vec<usize>,
}

/// Finds `r < r′ ≤ s_max` with `ker Φ_r ⊆ ker Φ_{r′}` (smallest `r′`, then
/// smallest `r`), solves `ρ ∘ Φ_r = Φ_{r′}` with free coordinates set to
/// zero, and regroups `ρ` into a substitution of length `p^{r′−r}`.
pub fn find_block_substitution(tau: &TauMap, s: &LinearSubstitution, s_max: u32) -> Result<BlockSubstitution> {
    if s_max < 1 {
        return Err(Error::Invalid("s_max must be at least 1".into()));
    }
    let vdim = tau.target_dim();
    let mut phis: Vec<FpMatrix> = vec![tau.matrix.clone()];
    let mut kernels: Vec<Subspace> = vec![kernel_basis(&tau.matrix)];
    let exhausted = |kernels: &[Subspace]| Error::SearchExhausted {
        s_max,
        kernel_dims: kernels.iter().map(Subspace::dim).collect(),
    };
    for r_prime in 1..=s_max {
        let next = match phi_step(&phis[r_prime as usize - 1], vdim, s, r_prime - 1) {
            Ok(m) => m,
            Err(Error::BoxTooLarge { .. }) => return Err(exhausted(&kernels)),
            Err(e) => return Err(e),
        };
        kernels.push(kernel_basis(&next));
        phis.push(next);
        let k_next = &kernels[r_prime as usize];
        for r in 0..r_prime {
            if !subspace_leq(&kernels[r as usize], k_next)? {
                continue;
            }
            let (phi_r, phi_rp) = (&phis[r as usize], &phis[r_prime as usize]);
            let rho_t = solve_linear(&phi_r.transpose(), &phi_rp.transpose())?;
            let rho = rho_t.transpose();
            let subst = regroup(&rho, vdim, s.field, s.n, r, r_prime - r)?;
            return Ok(BlockSubstitution {
                r,
                t: r_prime - r,
                rho_rank: rho.rank(),
                rho,
                subst,
                kernel_dims: kernels.iter().map(Subspace::dim).collect(),
            });
        }
    }
    Err(exhausted(&kernels))
}

/// `S′ = σ ∘ ρ` with `σ(f)(β)(δ) = f(p^r β + δ)`.
fn regroup(rho: &FpMatrix, vdim: usize, field: PrimeField, n: usize, r: u32, t: u32) -> Result<LinearSubstitution> {
    let p = field.p();
    let outer = WindowShape::i_cube(n, p, t);
    let inner = WindowShape::i_cube(n, p, r);
    let whole = WindowShape::i_cube(n, p, r + t);
    let pr = (p as i64).pow(r);
    let maps = outer
        .offsets()
        .map(|beta| {
            let mut rows = Vec::with_capacity(inner.len() * vdim);
            for delta in inner.offsets() {
                let o: Vec<i64> = beta.iter().zip(&delta).map(|(b, d)| pr * b + d).collect();
                let i = whole.index_of(&o).expect("in range");
                rows.extend(i * vdim..(i + 1) * vdim);
            }
            rho.select_rows(&rows)
        })
        .collect();
    LinearSubstitution::new(field, t, n, inner.len() * vdim, maps)
}

/// One step of the kernel chain: whether `ker Φ_s ⊆ ker Φ_{s+1}`.
#[derive(Clone, Debug, Serialize)]
pub struct KernelStep {
    pub s: u32,
    pub dim: usize,
    pub dim_next: usize,
    pub nested: bool,
}

/// Observes `ker Φ_s ⊆ ker Φ_{s+1}` for `s < s_max`, stopping early once
/// `Φ_s` no longer fits in memory.
pub fn kernel_chain(tau: &TauMap, s: &LinearSubstitution, s_max: u32) -> Result<Vec<KernelStep>> {
    let vdim = tau.target_dim();
    let mut phi = tau.matrix.clone();
    let mut ker = kernel_basis(&phi);
    let mut out = Vec::new();
    for k in 0..s_max {
        let next = match phi_step(&phi, vdim, s, k) {
            Ok(m) => m,
            Err(Error::BoxTooLarge { .. }) => break,
            Err(e) => return Err(e),
        };
        let ker_next = kernel_basis(&next);
        out.push(KernelStep { s: k, dim: ker.dim(), dim_next: ker_next.dim(), nested: subspace_leq(&ker, &ker_next)? });
        phi = next;
        ker = ker_next;
    }
    Ok(out)
}

/// A cell where `T(ℓα+β) ≠ S_β(T(α))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
}

impl Failure {
    fn key(&self) -> (MultiIndex, Vec<usize>) {
        (MultiIndex(self.alpha.iter().map(|&a| a as i64).collect()), self.beta.clone())
    }
}

impl Ord for Failure {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Failure {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub ok: bool,
    pub checked: usize,
    pub failures: usize,
    /// Smallest failing `(α, β)`, with `α` in graded-lexicographic order.
    pub first_failure: Option<Failure>,
    /// Up to `report_limit` smallest failures.
    pub samples: Vec<Failure>,
}

/// Checks `T(ℓα + β) = S_β(T(α))` for every `α` with `ℓα + I^n` inside the box.
/// Failures are reported, not raised.
pub fn verify_invariance(t: &TilingBox, s: &LinearSubstitution, report_limit: usize) -> Result<InvarianceReport> {
    if t.color_dim() != s.color_dim || t.n() != s.n {
        return Err(Error::DimensionMismatch(format!(
            "tiling colors of dimension {} vs substitution on {}",
            t.color_dim(),
            s.color_dim
        )));
    }
    let ell = s.length();
    if t.extents().iter().any(|&e| e % ell != 0) {
        return Err(Error::NotDivisible { extents: t.extents().to_vec(), factor: ell });
    }
    let coarse: Vec<usize> = t.extents().iter().map(|&e| e / ell).collect();
    let betas: Vec<Vec<usize>> = s.shape().offsets().map(|b| b.iter().map(|&v| v as usize).collect()).collect();
    let mut heap: BinaryHeap<Failure> = BinaryHeap::new();
    let keep = report_limit.max(1);
    let mut failures = 0usize;
    let mut checked = 0usize;
    let mut point = vec![0usize; t.n()];
    let mut buf = vec![0u32; s.color_dim];
    for alpha in box_points(&coarse) {
        let color = t.cell(t.flat_index(&alpha));
        for (m, beta) in s.maps.iter().zip(&betas) {
            for i in 0..point.len() {
                point[i] = ell * alpha[i] + beta[i];
            }
            m.mul_vec_into(color, &mut buf)?;
            checked += 1;
            if t.cell(t.flat_index(&point)) != buf.as_slice() {
                failures += 1;
                heap.push(Failure { alpha: alpha.clone(), beta: beta.clone() });
                if heap.len() > keep {
                    heap.pop();
                }
            }
        }
    }
    let mut samples = heap.into_sorted_vec();
    let first_failure = samples.first().cloned();
    samples.truncate(report_limit);
    Ok(InvarianceReport { ok: failures == 0, checked, failures, first_failure, samples })
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationReport {
    pub ok: bool,
    pub checked: usize,
    pub failures: usize,
    pub first_failure: Option<Vec<usize>>,
}

/// Checks `M(α) = τ(T̄(α))` on the common box.
pub fn verify_factorization(m: &TilingBox, tbar_box: &TilingBox, tau: &TauMap) -> Result<FactorizationReport> {
    if m.extents() != tbar_box.extents() {
        return Err(Error::DimensionMismatch("M and T̄ boxes differ".into()));
    }
    if m.color_dim() != tau.target_dim() || tbar_box.color_dim() != tau.matrix.cols() {
        return Err(Error::DimensionMismatch("τ does not match the tilings".into()));
    }
    let mut buf = vec![0u32; tau.target_dim()];
    let mut failures = 0;
    let mut first_failure = None;
    for flat in 0..m.cells() {
        tau.matrix.mul_vec_into(tbar_box.cell(flat), &mut buf)?;
        if m.cell(flat) != buf.as_slice() {
            failures += 1;
            if first_failure.is_none() {
                first_failure = Some(m.coords_of(flat));
            }
        }
    }
    Ok(FactorizationReport { ok: failures == 0, checked: m.cells(), failures, first_failure })
}

/// Tests whether the window radius `D = max{1, 1+deg P, d·deg Q}` alone
/// already carries a linear `τ` with `M = τ ∘ T̄` on the given box. Returns
/// `None` when that radius coincides with the one in use.
pub fn nominal_window_suffices(syn: &Synthesis, extents: &[usize]) -> Result<Option<bool>> {
    if syn.d_nominal == syn.d_window {
        return Ok(None);
    }
    let m = syn.m_box(extents)?;
    let tb = tbar(&syn.t_box(extents)?, syn.d_nominal)?;
    let a = FpMatrix::from_data(syn.field(), tb.cells(), tb.color_dim(), tb.data().to_vec())?;
    let b = FpMatrix::from_data(syn.field(), m.cells(), m.color_dim(), m.data().to_vec())?;
    match solve_linear(&a, &b) {
        Ok(_) => Ok(Some(true)),
        Err(Error::Inconsistent { .. }) => Ok(Some(false)),
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// JSON export

#[derive(Serialize, Deserialize)]
struct SubstitutionFile {
    p: u32,
    n: usize,
    t: u32,
    color_dim: usize,
    maps: serde_json::Map<String, serde_json::Value>,
}

fn beta_key(beta: &[i64]) -> String {
    beta.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",")
}

impl LinearSubstitution {
    /// Canonical JSON: `{p, n, t, color_dim, maps}` with `maps` keyed by
    /// `"β₁,…,β_n"` in lexicographic order of `β`, each value the row-major
    /// entries of `S_β`. Compact, newline-terminated.
    pub fn to_json(&self) -> String {
        let mut maps = serde_json::Map::new();
        for (beta, m) in self.shape().offsets().zip(&self.maps) {
            maps.insert(beta_key(&beta), serde_json::json!(m.data()));
        }
        let file = SubstitutionFile { p: self.field.p(), n: self.n, t: self.t, color_dim: self.color_dim, maps };
        let mut s = serde_json::to_string(&file).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SubstitutionFile = serde_json::from_str(text)?;
        let field = PrimeField::new(file.p as u64)?;
        let shape = WindowShape::i_cube(file.n, file.p, file.t);
        if file.maps.len() != shape.len() {
            return Err(Error::Invalid(format!("expected {} maps, found {}", shape.len(), file.maps.len())));
        }
        let mut maps = Vec::with_capacity(shape.len());
        for beta in shape.offsets() {
            let key = beta_key(&beta);
            let value = file.maps.get(&key).ok_or_else(|| Error::Invalid(format!("missing map for β = ({key})")))?;
            let entries: Vec<u32> = serde_json::from_value(value.clone())?;
            maps.push(FpMatrix::from_data(field, file.color_dim, file.color_dim, entries)?);
        }
        Self::new(field, file.t, file.n, file.color_dim, maps)
    }
}
