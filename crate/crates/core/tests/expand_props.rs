use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selfsim::expand::{expand_quotient, frobenius_expand, normalized_r, scalar_reciprocal, Side};
use selfsim::ff::{FpMatrix, PrimeField};
use selfsim::poly::{CoeffKind, MultiIndex, Poly};
use selfsim::scenarios::razpet_check_table;
use selfsim::tiling::{box_points, TilingBox};

fn random_poly(
    rng: &mut ChaCha8Rng,
    field: PrimeField,
    n: usize,
    kind: CoeffKind,
    terms: usize,
    max_exp: i64,
    unit: bool,
) -> Poly {
    let d = kind.d();
    let p = field.p();
    let random_matrix = |rng: &mut ChaCha8Rng| {
        FpMatrix::from_data(field, d, d, (0..d * d).map(|_| rng.gen_range(0..p)).collect()).unwrap()
    };
    let mut poly = Poly::zero(field, n, kind);
    for _ in 0..terms {
        let e = MultiIndex((0..n).map(|_| rng.gen_range(0..=max_exp)).collect());
        if e.is_zero() {
            continue;
        }
        let c = random_matrix(rng);
        poly = poly.add(&Poly::constant(field, n, kind, c).mul(&monomial(field, n, kind, e)).unwrap()).unwrap();
    }
    let c0 = if unit {
        loop {
            let c = random_matrix(rng);
            if selfsim::ff::mat_inv(&c).is_ok() {
                break c;
            }
        }
    } else {
        random_matrix(rng)
    };
    poly.add(&Poly::constant(field, n, kind, c0)).unwrap()
}

fn monomial(field: PrimeField, n: usize, kind: CoeffKind, e: MultiIndex) -> Poly {
    let mut m = Poly::zero(field, n, kind);
    m.add_term(e, FpMatrix::identity(field, kind.d()));
    m
}

/// `Σ c_α x^α ↦ Σ (c_α I) x^α`.
fn embed(poly: &Poly, d: usize) -> Poly {
    let mut out = Poly::zero(poly.field(), poly.n(), CoeffKind::Matrix(d));
    for (e, c) in poly.terms() {
        out.add_term(e.clone(), FpMatrix::scalar(poly.field(), d, c.get(0, 0)));
    }
    out
}

fn as_poly(t: &TilingBox, kind: CoeffKind) -> Poly {
    let d = kind.d();
    let mut out = Poly::zero(t.field(), t.n(), kind);
    for (flat, a) in box_points(t.extents()).enumerate() {
        let c = FpMatrix::from_data(t.field(), d, d, t.cell(flat).to_vec()).unwrap();
        out.add_term(MultiIndex(a.iter().map(|&v| v as i64).collect()), c);
    }
    out
}

#[test]
fn reciprocal_matches_frobenius_scaled() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [2u64, 3, 5, 7] {
        let field = PrimeField::new(p).unwrap();
        for _ in 0..10 {
            let q = random_poly(&mut rng, field, 2, CoeffKind::Scalar, 5, 3, true);
            let (r, a_inv) = normalized_r(&q).unwrap();
            let direct = scalar_reciprocal(&q, &[40, 40]).unwrap();
            assert_eq!(direct, frobenius_expand(&r, &[40, 40]).unwrap().scaled(a_inv), "p={p} Q={q}");
        }
    }
}

#[test]
fn reconstruction() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let ext = [10usize, 9];
    for (p, kind) in
        [(2u64, CoeffKind::Scalar), (3, CoeffKind::Matrix(2)), (5, CoeffKind::Matrix(3)), (7, CoeffKind::Scalar)]
    {
        let field = PrimeField::new(p).unwrap();
        for side in [Side::Right, Side::Left] {
            for _ in 0..4 {
                let num = random_poly(&mut rng, field, 2, kind, 3, 2, false);
                let q = random_poly(&mut rng, field, 2, kind, 4, 2, true);
                let m = as_poly(&expand_quotient(&num, &q, side, &ext).unwrap(), kind);
                let prod = match side {
                    Side::Right => m.mul(&q).unwrap(),
                    Side::Left => q.mul(&m).unwrap(),
                };
                for a in box_points(&ext) {
                    let e = MultiIndex(a.iter().map(|&v| v as i64).collect());
                    let zero = FpMatrix::zeros(field, kind.d(), kind.d());
                    assert_eq!(prod.coeff(&e).unwrap_or(&zero), num.coeff(&e).unwrap_or(&zero), "α={a:?} side={side}");
                }
            }
        }
    }
}

#[test]
fn sides_agree_for_commuting_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for p in [2u64, 3, 5] {
        let field = PrimeField::new(p).unwrap();
        for _ in 0..5 {
            let num = random_poly(&mut rng, field, 3, CoeffKind::Scalar, 3, 2, false);
            let q = random_poly(&mut rng, field, 3, CoeffKind::Scalar, 4, 2, true);
            let ext = [6, 7, 5];
            assert_eq!(
                expand_quotient(&num, &q, Side::Left, &ext).unwrap(),
                expand_quotient(&num, &q, Side::Right, &ext).unwrap()
            );
            // scalar multiples of the identity embedded in 2x2 matrices
            let (nm, qm) = (embed(&num, 2), embed(&q, 2));
            assert_eq!(
                expand_quotient(&nm, &qm, Side::Left, &ext).unwrap(),
                expand_quotient(&nm, &qm, Side::Right, &ext).unwrap()
            );
        }
    }
}

#[test]
fn degree_one_denominators_are_multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for p in [2u64, 3, 5] {
        let field = PrimeField::new(p).unwrap();
        let side = (p as usize).pow(if p == 2 { 5 } else { 3 });
        for _ in 0..10 {
            let (a, b, c) = (rng.gen_range(0..p) as i64, rng.gen_range(0..p) as i64, rng.gen_range(0..p) as i64);
            let q = Poly::scalar_from_terms(
                field,
                2,
                &[(vec![0, 0], 1), (vec![1, 0], -a), (vec![0, 1], -b), (vec![1, 1], -c)],
            );
            let w = expand_quotient(&Poly::one(field, 2, CoeffKind::Scalar), &q, Side::Right, &[side, side]).unwrap();
            assert!(razpet_check_table(&w).unwrap().ok, "p={p} (a,b,c)=({a},{b},{c})");
        }
    }
}
