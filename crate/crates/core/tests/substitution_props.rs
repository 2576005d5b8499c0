use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selfsim::ff::{FpMatrix, PrimeField};
use selfsim::scenarios::{figure_preset, preset_names};
use selfsim::substitution::{
    apply_substitution, compose, iterate_substitution, kernel_chain, synthesize, LinearSubstitution,
};
use selfsim::tiling::{box_points, tbar, window, WindowShape};

fn random_substitution(rng: &mut ChaCha8Rng, field: PrimeField, n: usize, dim: usize) -> LinearSubstitution {
    let p = field.p();
    let count = (p as usize).pow(n as u32);
    let maps = (0..count)
        .map(|_| FpMatrix::from_data(field, dim, dim, (0..dim * dim).map(|_| rng.gen_range(0..p)).collect()).unwrap())
        .collect();
    LinearSubstitution::new(field, 1, n, dim, maps).unwrap()
}

#[test]
fn window_tiling_recovers_the_tiling() {
    for name in ["fig2-left", "fig5", "fig9"] {
        let cfg = figure_preset(name).unwrap();
        let (p, q) = cfg.polys().unwrap();
        let syn = synthesize(&p, &q, cfg.side()).unwrap();
        let t = syn.t_box(&[40, 40]).unwrap();
        let tb = tbar(&t, syn.d_window).unwrap();
        let shape = WindowShape::j_cube(2, syn.d_window, cfg.p, 0);
        let origin = shape.index_of(&[0, 0]).unwrap();
        for (flat, a) in box_points(t.extents()).enumerate() {
            assert_eq!(tb.cell(flat)[origin], t.cell(flat)[0]);
            let alpha: Vec<i64> = a.iter().map(|&v| v as i64).collect();
            assert_eq!(window(&t, &alpha, &shape).unwrap().values, tb.cell(flat));
        }
    }
}

#[test]
fn window_tiling_is_a_fixed_point() {
    for name in preset_names() {
        let cfg = figure_preset(name).unwrap();
        let (p, q) = cfg.polys().unwrap();
        let syn = synthesize(&p, &q, cfg.side()).unwrap();
        let n = 24;
        let big = syn.tbar_box(&[cfg.p as usize * n; 2]).unwrap();
        let small = syn.tbar_box(&[n, n]).unwrap();
        assert_eq!(apply_substitution(&syn.subst, &small).unwrap(), big, "{name}");
    }
}

#[test]
fn iteration_is_a_semigroup() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (p, n, dim) in [(2u64, 2, 3), (3, 2, 2), (2, 1, 4), (5, 1, 2), (2, 3, 2)] {
        let field = PrimeField::new(p).unwrap();
        let s = random_substitution(&mut rng, field, n, dim);
        for (s1, s2) in [(1u32, 1u32), (1, 2), (2, 1), (0, 3)] {
            let whole = iterate_substitution(&s, s1 + s2).unwrap();
            let parts =
                compose(&iterate_substitution(&s, s1).unwrap(), &iterate_substitution(&s, s2).unwrap()).unwrap();
            assert_eq!(whole, parts);
            let color: Vec<u32> = (0..dim).map(|_| rng.gen_range(0..p as u32)).collect();
            assert_eq!(whole.block_of(&color).unwrap(), parts.block_of(&color).unwrap());
        }
    }
}

#[test]
fn substitution_of_a_box_matches_iterated_application() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let field = PrimeField::new(3).unwrap();
    let s = random_substitution(&mut rng, field, 2, 2);
    let cfg = figure_preset("fig2bis-tl").unwrap();
    let (p, q) = cfg.polys().unwrap();
    let m = synthesize(&p, &q, cfg.side()).unwrap().m_box(&[4, 4]).unwrap();
    // colors here are 2x2 matrices seen as 4-vectors; act by a substitution on F_3^4
    let s4 = random_substitution(&mut rng, field, 2, 4);
    let twice = apply_substitution(&s4, &apply_substitution(&s4, &m).unwrap()).unwrap();
    assert_eq!(apply_substitution(&iterate_substitution(&s4, 2).unwrap(), &m).unwrap(), twice);
    assert_eq!(s.length(), 3);
}

/// Observation only: records whether ker Φ_s ⊆ ker Φ_{s+1} along the chain.
#[test]
fn kernel_chain_observation() {
    for name in preset_names() {
        let cfg = figure_preset(name).unwrap();
        if cfg.d != 1 {
            continue;
        }
        let (p, q) = cfg.polys().unwrap();
        let syn = synthesize(&p, &q, cfg.side()).unwrap();
        let chain = kernel_chain(&syn.tau, &syn.subst, 6).unwrap();
        let summary: Vec<String> = chain.iter().map(|k| format!("{}->{}:{}", k.dim, k.dim_next, k.nested)).collect();
        println!("{name}: {}", summary.join(" "));
    }
}

/// Observation only: whether the nominal radius `max{1, 1+deg P, d·deg Q}`
/// already carries a linear τ for matrix quotients with nonconstant numerators.
#[test]
fn nominal_window_observation() {
    use selfsim::expand::Side;
    use selfsim::poly::{CoeffKind, MultiIndex, Poly};
    use selfsim::substitution::nominal_window_suffices;

    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut larger = 0;
    let mut failures = Vec::new();
    for p in [2u64, 3, 5] {
        let field = PrimeField::new(p).unwrap();
        for k in 0..12 {
            let d = 2 + k % 2;
            let kind = CoeffKind::Matrix(d);
            let term = |rng: &mut ChaCha8Rng, e: Vec<i64>, poly: &mut Poly| {
                let c =
                    FpMatrix::from_data(field, d, d, (0..d * d).map(|_| rng.gen_range(0..p as u32)).collect()).unwrap();
                poly.add_term(MultiIndex(e), c);
            };
            let mut q = Poly::one(field, 2, kind);
            let mut num = Poly::one(field, 2, kind);
            for e in [vec![1, 0], vec![0, 1], vec![1, 1]] {
                term(&mut rng, e, &mut q);
            }
            for e in [vec![1, 0], vec![0, 2], vec![2, 1]] {
                term(&mut rng, e, &mut num);
            }
            for side in [Side::Right, Side::Left] {
                let syn = synthesize(&num, &q, side).unwrap();
                if let Some(ok) = nominal_window_suffices(&syn, &[24, 24]).unwrap() {
                    larger += 1;
                    if !ok {
                        failures.push(format!("p={p} d={d} side={side} P={num} Q={q}"));
                    }
                }
            }
        }
    }
    println!("{larger} configs need a larger window than the nominal one; nominal fails on {}", failures.len());
    for f in failures.iter().take(3) {
        println!("  {f}");
    }
}
