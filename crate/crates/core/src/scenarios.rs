//! Named figure configurations and independent oracles: the two-variable
//! recurrence, Pascal's rule, Delannoy numbers and Razpet's congruence.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expand::{color_kind_of, Side};
use crate::ff::{FpMatrix, PrimeField};
use crate::poly::{parse_poly, CoeffKind, MultiIndex, Poly};
use crate::tiling::{ColorKind, TilingBox};

/// Coefficients of `M(m,n) = a·M(m−1,n) + b·M(m,n−1) + c·M(m−1,n−1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceSpec {
    pub a: FpMatrix,
    pub b: FpMatrix,
    pub c: FpMatrix,
}

impl RecurrenceSpec {
    pub fn new(a: FpMatrix, b: FpMatrix, c: FpMatrix) -> Result<Self> {
        let d = a.rows();
        for m in [&a, &b, &c] {
            if !m.is_square() || m.rows() != d || m.field() != a.field() {
                return Err(Error::DimensionMismatch("recurrence coefficients must be square of one size".into()));
            }
        }
        Ok(Self { a, b, c })
    }

    /// Scalar coefficients, reduced mod `p`.
    pub fn scalar(field: PrimeField, a: i64, b: i64, c: i64) -> Self {
        let m = |v| FpMatrix::scalar(field, 1, field.reduce(v));
        Self { a: m(a), b: m(b), c: m(c) }
    }

    pub fn field(&self) -> PrimeField {
        self.a.field()
    }

    pub fn d(&self) -> usize {
        self.a.rows()
    }

    /// `Scalar` for `d = 1`, otherwise `Matrix(d)`.
    pub fn kind(&self) -> CoeffKind {
        match self.d() {
            1 => CoeffKind::Scalar,
            d => CoeffKind::Matrix(d),
        }
    }

    /// `I − (a·x₁ + b·x₂ + c·x₁x₂)`.
    pub fn denominator(&self) -> Poly {
        let field = self.field();
        let d = self.d();
        let mut q = Poly::one(field, 2, self.kind());
        for (e, m) in [(vec![1, 0], &self.a), (vec![0, 1], &self.b), (vec![1, 1], &self.c)] {
            q.add_term(MultiIndex(e), m.neg());
        }
        debug_assert_eq!(q.kind().d(), d);
        q
    }

    /// The identity numerator.
    pub fn numerator(&self) -> Poly {
        Poly::one(self.field(), 2, self.kind())
    }
}

/// Fills a two-dimensional box by the recurrence, with `M(0,0) = I` and
/// `M = 0` off `ℕ²`.
pub fn recurrence_tiling(spec: &RecurrenceSpec, extents: &[usize]) -> Result<TilingBox> {
    if extents.len() != 2 {
        return Err(Error::DimensionMismatch("the recurrence is two-dimensional".into()));
    }
    let field = spec.field();
    let d = spec.d();
    let mut t = TilingBox::zeros(field, color_kind_of(spec.kind()), extents.to_vec())?;
    let identity = FpMatrix::identity(field, d);
    let mut acc = vec![0u32; d * d];
    let mut tmp = vec![0u32; d * d];
    for m in 0..extents[0] {
        for n in 0..extents[1] {
            if m == 0 && n == 0 {
                t.set(&[0, 0], identity.data());
                continue;
            }
            acc.iter_mut().for_each(|v| *v = 0);
            let (mi, ni) = (m as i64, n as i64);
            for (coef, src) in [(&spec.a, [mi - 1, ni]), (&spec.b, [mi, ni - 1]), (&spec.c, [mi - 1, ni - 1])] {
                let prev = t.get(&src)?;
                mat_mul_into(field, d, coef.data(), prev, &mut tmp);
                for (x, y) in acc.iter_mut().zip(&tmp) {
                    *x = field.add(*x, *y);
                }
            }
            t.set(&[m, n], &acc);
        }
    }
    Ok(t)
}

fn mat_mul_into(field: PrimeField, d: usize, a: &[u32], b: &[u32], out: &mut [u32]) {
    for i in 0..d {
        for j in 0..d {
            let mut s = 0;
            for k in 0..d {
                s = field.mul_add(s, a[i * d + k], b[k * d + j]);
            }
            out[i * d + j] = s;
        }
    }
}

/// `C(m+k, m) mod p` by Pascal's rule.
pub fn binomial_tiling(field: PrimeField, extents: &[usize]) -> Result<TilingBox> {
    if extents.len() != 2 {
        return Err(Error::DimensionMismatch("binomial tiling is two-dimensional".into()));
    }
    let mut t = TilingBox::zeros(field, ColorKind::Scalar, extents.to_vec())?;
    for m in 0..extents[0] {
        for k in 0..extents[1] {
            let v = if m == 0 || k == 0 {
                1
            } else {
                let (mi, ki) = (m as i64, k as i64);
                field.add(t.scalar(&[mi - 1, ki])?, t.scalar(&[mi, ki - 1])?)
            };
            t.set(&[m, k], &[v]);
        }
    }
    Ok(t)
}

/// Delannoy number `D(m,n) = Σ_k C(m,k)·C(n,k)·2^k mod p`.
pub fn delannoy_mod(field: PrimeField, m: usize, n: usize) -> u32 {
    let top = m.max(n);
    let mut row = vec![1u32];
    let mut rows = vec![row.clone()];
    for _ in 0..top {
        let mut next = vec![1u32; row.len() + 1];
        for k in 1..row.len() {
            next[k] = field.add(row[k - 1], row[k]);
        }
        rows.push(next.clone());
        row = next;
    }
    let mut s = 0;
    for (k, (&cm, &cn)) in rows[m].iter().zip(&rows[n]).enumerate() {
        let term = field.mul(field.mul(cm, cn), field.pow(2 % field.p(), k as u64));
        s = field.add(s, term);
    }
    s
}

/// Outcome of checking `w(pα+β, pγ+δ) ≡ w(α,γ)·w(β,δ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RazpetReport {
    pub ok: bool,
    pub checked: usize,
    pub violations: usize,
    /// First violating cell `(pα+β, pγ+δ)`, scanning `(α, γ, β, δ)` lexicographically.
    pub first_violation: Option<[usize; 2]>,
}

/// Builds the scalar table of side `p^e` and checks Razpet's congruence on it.
pub fn razpet_check(spec: &RecurrenceSpec, e: u32) -> Result<RazpetReport> {
    if spec.d() != 1 {
        return Err(Error::DimensionMismatch("Razpet's congruence is scalar".into()));
    }
    if e < 2 {
        return Err(Error::Invalid("razpet_check needs e ≥ 2".into()));
    }
    let side = (spec.field().p() as usize).pow(e);
    razpet_check_table(&recurrence_tiling(spec, &[side, side])?)
}

/// Checks the congruence on any scalar table whose sides are multiples of `p`.
pub fn razpet_check_table(w: &TilingBox) -> Result<RazpetReport> {
    let p = w.field().p() as usize;
    if w.n() != 2 || w.color_dim() != 1 {
        return Err(Error::DimensionMismatch("expected a scalar two-dimensional table".into()));
    }
    if w.extents().iter().any(|&e| e % p != 0) {
        return Err(Error::NotDivisible { extents: w.extents().to_vec(), factor: p });
    }
    let field = w.field();
    let at = |m: usize, n: usize| w.cell(w.flat_index(&[m, n]))[0];
    let (em, en) = (w.extents()[0] / p, w.extents()[1] / p);
    let mut report = RazpetReport { ok: true, checked: 0, violations: 0, first_violation: None };
    for alpha in 0..em {
        for gamma in 0..en {
            let base = at(alpha, gamma);
            for beta in 0..p {
                for delta in 0..p {
                    let cell = [p * alpha + beta, p * gamma + delta];
                    report.checked += 1;
                    if at(cell[0], cell[1]) != field.mul(base, at(beta, delta)) {
                        report.violations += 1;
                        report.ok = false;
                        report.first_violation.get_or_insert(cell);
                    }
                }
            }
        }
    }
    Ok(report)
}

/// A named figure configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PresetConfig {
    pub name: &'static str,
    pub caption: &'static str,
    pub p: u32,
    pub d: usize,
    pub n: usize,
    #[serde(rename = "P")]
    pub p_text: String,
    #[serde(rename = "Q")]
    pub q_text: String,
    pub side: String,
    #[serde(rename = "box")]
    pub extents: Vec<usize>,
}

/// Default box side of the figure presets.
pub const PRESET_SIDE: usize = 1024;

struct MatrixPreset {
    name: &'static str,
    caption: &'static str,
    p: u32,
    a: [[i64; 2]; 2],
    b: [[i64; 2]; 2],
    c: [[i64; 2]; 2],
}

struct ScalarPreset {
    name: &'static str,
    caption: &'static str,
    p: u32,
    q: &'static str,
}

const I2: [[i64; 2]; 2] = [[1, 1], [0, 1]];
const N2: [[i64; 2]; 2] = [[0, 1], [0, 0]];
const C1: [[i64; 2]; 2] = [[1, 1], [1, 0]];
const SW: [[i64; 2]; 2] = [[0, 1], [1, 0]];
const C2: [[i64; 2]; 2] = [[0, -1], [1, -1]];
const FB: [[i64; 2]; 2] = [[1, 1], [1, 0]];

const MATRIX_PRESETS: &[MatrixPreset] = &[
    MatrixPreset { name: "fig1-left", caption: "p=2, a=b=[[1,1],[0,1]], c=[[1,1],[1,0]]", p: 2, a: I2, b: I2, c: C1 },
    MatrixPreset { name: "fig1-right", caption: "p=2, a=b=[[0,1],[0,0]], c=[[1,1],[1,0]]", p: 2, a: N2, b: N2, c: C1 },
    MatrixPreset {
        name: "fig2bis-tl",
        caption: "p=3, a=b=[[0,1],[1,0]], c=[[0,-1],[1,-1]]",
        p: 3,
        a: SW,
        b: SW,
        c: C2,
    },
    MatrixPreset {
        name: "fig2bis-tr",
        caption: "p=5, a=b=[[0,1],[1,0]], c=[[0,-1],[1,-1]]",
        p: 5,
        a: SW,
        b: SW,
        c: C2,
    },
    MatrixPreset { name: "fig2bis-bl", caption: "p=3, a=b=[[1,1],[1,0]], c=[[0,1],[0,0]]", p: 3, a: FB, b: FB, c: N2 },
    MatrixPreset { name: "fig2bis-br", caption: "p=5, a=b=[[1,1],[1,0]], c=[[0,1],[0,0]]", p: 5, a: FB, b: FB, c: N2 },
];

const FIG3: &str = "x^2*y^2 + x*y + x^2 + y^2 + 1";
const FIG4: &str = "x^2*y^2 + x*y + x + y + 1";

const SCALAR_PRESETS: &[ScalarPreset] = &[
    ScalarPreset { name: "fig2-left", caption: "p=2, Q=1+x^2+y^2+xy+x^2y^2", p: 2, q: "1 + x^2 + y^2 + x*y + x^2*y^2" },
    ScalarPreset {
        name: "fig2-right",
        caption: "p=2, Q=1+x^2y+xy^2+xy+x^2y^2",
        p: 2,
        q: "1 + x^2*y + x*y^2 + x*y + x^2*y^2",
    },
    ScalarPreset { name: "fig3-p2", caption: "p=2, Q=x^2y^2+xy+x^2+y^2+1", p: 2, q: FIG3 },
    ScalarPreset { name: "fig3-p3", caption: "p=3, Q=x^2y^2+xy+x^2+y^2+1", p: 3, q: FIG3 },
    ScalarPreset { name: "fig3-p5", caption: "p=5, Q=x^2y^2+xy+x^2+y^2+1", p: 5, q: FIG3 },
    ScalarPreset { name: "fig3-p7", caption: "p=7, Q=x^2y^2+xy+x^2+y^2+1", p: 7, q: FIG3 },
    ScalarPreset { name: "fig4-p2", caption: "p=2, Q=x^2y^2+xy+x+y+1", p: 2, q: FIG4 },
    ScalarPreset { name: "fig4-p3", caption: "p=3, Q=x^2y^2+xy+x+y+1", p: 3, q: FIG4 },
    ScalarPreset { name: "fig4-p5", caption: "p=5, Q=x^2y^2+xy+x+y+1", p: 5, q: FIG4 },
    ScalarPreset { name: "fig4-p7", caption: "p=7, Q=x^2y^2+xy+x+y+1", p: 7, q: FIG4 },
    ScalarPreset { name: "fig5", caption: "p=2, Q=x^3y^3+x^2+y^2+x+y+1", p: 2, q: "x^3*y^3 + x^2 + y^2 + x + y + 1" },
    ScalarPreset { name: "fig6", caption: "p=2, Q=x^3y^3+xy+x+y+1", p: 2, q: "x^3*y^3 + x*y + x + y + 1" },
    ScalarPreset {
        name: "fig7",
        caption: "p=2, Q=x^3+y^3+x^2y^2+x^2y+xy^2+1",
        p: 2,
        q: "x^3 + y^3 + x^2*y^2 + x^2*y + x*y^2 + 1",
    },
    ScalarPreset {
        name: "fig8",
        caption: "p=3, Q=-x^2y^2-x^2y-xy^2-xy+1",
        p: 3,
        q: "-x^2*y^2 - x^2*y - x*y^2 - x*y + 1",
    },
    ScalarPreset { name: "fig9", caption: "p=3, Q=x^2y^2-x^2-y^2+y+1", p: 3, q: "x^2*y^2 - x^2 - y^2 + y + 1" },
    ScalarPreset { name: "fig10", caption: "p=3, Q=x^3y^3+x^2+y^2+x+y+1", p: 3, q: "x^3*y^3 + x^2 + y^2 + x + y + 1" },
];

fn matrix_literal(m: &[[i64; 2]; 2]) -> String {
    format!("[[{},{}],[{},{}]]", m[0][0], m[0][1], m[1][0], m[1][1])
}

/// Every preset name, in documentation order.
pub fn preset_names() -> Vec<&'static str> {
    let mut names: Vec<&'static str> = MATRIX_PRESETS[..2].iter().map(|m| m.name).collect();
    names.extend(SCALAR_PRESETS[..2].iter().map(|s| s.name));
    names.extend(MATRIX_PRESETS[2..].iter().map(|m| m.name));
    names.extend(SCALAR_PRESETS[2..].iter().map(|s| s.name));
    names
}

pub fn figure_preset(name: &str) -> Result<PresetConfig> {
    if let Some(m) = MATRIX_PRESETS.iter().find(|m| m.name == name) {
        let q_text = format!(
            "[[1,0],[0,1]] - {}*x - {}*y - {}*x*y",
            matrix_literal(&m.a),
            matrix_literal(&m.b),
            matrix_literal(&m.c)
        );
        return Ok(PresetConfig {
            name: m.name,
            caption: m.caption,
            p: m.p,
            d: 2,
            n: 2,
            p_text: "[[1,0],[0,1]]".into(),
            q_text,
            side: Side::Left.to_string(),
            extents: vec![PRESET_SIDE, PRESET_SIDE],
        });
    }
    if let Some(s) = SCALAR_PRESETS.iter().find(|s| s.name == name) {
        return Ok(PresetConfig {
            name: s.name,
            caption: s.caption,
            p: s.p,
            d: 1,
            n: 2,
            p_text: "1".into(),
            q_text: s.q.into(),
            side: Side::Right.to_string(),
            extents: vec![PRESET_SIDE, PRESET_SIDE],
        });
    }
    Err(Error::UnknownPreset(name.into()))
}

impl PresetConfig {
    pub fn field(&self) -> PrimeField {
        PrimeField::new(self.p as u64).expect("preset primes are prime")
    }

    pub fn kind(&self) -> CoeffKind {
        if self.d == 1 {
            CoeffKind::Scalar
        } else {
            CoeffKind::Matrix(self.d)
        }
    }

    pub fn side(&self) -> Side {
        self.side.parse().expect("preset sides are valid")
    }

    /// `(P, Q)` parsed over `F_p`.
    pub fn polys(&self) -> Result<(Poly, Poly)> {
        let p = parse_poly(&self.p_text, self.field(), self.n, self.kind())?;
        let q = parse_poly(&self.q_text, self.field(), self.n, self.kind())?;
        Ok((p, q))
    }

    /// The recurrence behind the matrix presets (fig1 and fig2bis).
    pub fn recurrence(&self) -> Option<RecurrenceSpec> {
        let m = MATRIX_PRESETS.iter().find(|m| m.name == self.name)?;
        let field = self.field();
        let mat = |x: &[[i64; 2]; 2]| FpMatrix::from_rows(field, x).expect("2x2");
        Some(RecurrenceSpec { a: mat(&m.a), b: mat(&m.b), c: mat(&m.c) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expand::expand_quotient;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn recurrence_examples() {
        let pascal = recurrence_tiling(&RecurrenceSpec::scalar(f(2), 1, 1, 0), &[8, 8]).unwrap();
        assert_eq!(pascal.scalar(&[2, 1]).unwrap(), 1);
        assert_eq!(pascal, binomial_tiling(f(2), &[8, 8]).unwrap());

        let del = recurrence_tiling(&RecurrenceSpec::scalar(f(2), 1, 1, 1), &[8, 8]).unwrap();
        assert_eq!(del.scalar(&[1, 1]).unwrap(), 1);
        assert_eq!(del.scalar(&[2, 2]).unwrap(), 1);
        let del7 = recurrence_tiling(&RecurrenceSpec::scalar(f(7), 1, 1, 1), &[12, 12]).unwrap();
        for m in 0..12 {
            for n in 0..12 {
                assert_eq!(del7.scalar(&[m as i64, n as i64]).unwrap(), delannoy_mod(f(7), m, n));
            }
        }

        let fig = figure_preset("fig1-right").unwrap();
        let t = recurrence_tiling(&fig.recurrence().unwrap(), &[4, 4]).unwrap();
        assert_eq!(t.get(&[1, 1]).unwrap(), &[1, 1, 1, 0]);
    }

    #[test]
    fn delannoy_values() {
        // D(1,1) = 3, D(2,2) = 13, D(3,3) = 63
        assert_eq!(delannoy_mod(f(101), 1, 1), 3);
        assert_eq!(delannoy_mod(f(101), 2, 2), 13);
        assert_eq!(delannoy_mod(f(101), 3, 3), 63);
        assert_eq!(delannoy_mod(f(2), 2, 2), 1);
    }

    #[test]
    fn binomial_examples() {
        let t = binomial_tiling(f(2), &[4, 4]).unwrap();
        assert_eq!(t.scalar(&[1, 1]).unwrap(), 0);
        assert_eq!(t.scalar(&[2, 1]).unwrap(), 1);
        assert!((0..4).all(|m| t.scalar(&[m, 0]).unwrap() == 1));
        assert_eq!(binomial_tiling(f(3), &[2, 2]).unwrap().scalar(&[1, 1]).unwrap(), 2);
    }

    #[test]
    fn razpet_examples() {
        assert!(razpet_check(&RecurrenceSpec::scalar(f(2), 1, 1, 0), 4).unwrap().ok);
        assert!(razpet_check(&RecurrenceSpec::scalar(f(3), 1, 1, 1), 3).unwrap().ok);

        let mut w = recurrence_tiling(&RecurrenceSpec::scalar(f(3), 1, 1, 1), &[27, 27]).unwrap();
        let old = w.scalar(&[7, 5]).unwrap();
        w.set(&[7, 5], &[(old + 1) % 3]);
        let rep = razpet_check_table(&w).unwrap();
        assert!(!rep.ok);
        assert_eq!(rep.first_violation, Some([7, 5]));
    }

    #[test]
    fn presets() {
        let names = preset_names();
        assert_eq!(names.len(), 22);
        for name in &names {
            let cfg = figure_preset(name).unwrap();
            assert_eq!(cfg.extents, vec![1024, 1024]);
            let (_, q) = cfg.polys().unwrap();
            assert!(q.is_series_unit(), "{name}");
        }
        assert!(matches!(figure_preset("fig11"), Err(Error::UnknownPreset(_))));

        let fig1 = figure_preset("fig1-left").unwrap();
        assert_eq!((fig1.p, fig1.d), (2, 2));
        let spec = fig1.recurrence().unwrap();
        assert_eq!(spec.a.data(), &[1, 1, 0, 1]);
        assert_eq!(spec.c.data(), &[1, 1, 1, 0]);
        assert_eq!(fig1.polys().unwrap().1, spec.denominator());

        let fig8 = figure_preset("fig8").unwrap();
        let (_, q) = fig8.polys().unwrap();
        assert_eq!(q.scalar_coeff(&MultiIndex(vec![2, 2])), 2);
        assert_eq!(q.scalar_coeff(&MultiIndex(vec![0, 0])), 1);
    }

    #[test]
    fn recurrence_equals_series() {
        for name in ["fig1-left", "fig1-right", "fig2bis-tl", "fig2bis-br"] {
            let cfg = figure_preset(name).unwrap();
            let spec = cfg.recurrence().unwrap();
            let (p, q) = cfg.polys().unwrap();
            let series = expand_quotient(&p, &q, Side::Left, &[32, 32]).unwrap();
            assert_eq!(recurrence_tiling(&spec, &[32, 32]).unwrap(), series, "{name}");
        }
    }
}
