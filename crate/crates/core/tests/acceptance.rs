//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//! Runs sequentially so that the timings are not skewed by other tests.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selfsim::expand::{expand_quotient, frobenius_reciprocal, scalar_reciprocal, Side};
use selfsim::ff::PrimeField;
use selfsim::poly::{parse_poly, CoeffKind, Poly};
use selfsim::scenarios::{
    binomial_tiling, figure_preset, preset_names, razpet_check, recurrence_tiling, RecurrenceSpec,
};
use selfsim::substitution::{find_block_substitution, synthesize, verify_factorization, verify_invariance, Synthesis};
use selfsim::tiling::{block_tiling, count_colors};
use sha2::{Digest, Sha256};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn preset_synthesis(name: &str) -> (u32, Synthesis) {
    let cfg = figure_preset(name).unwrap();
    let (p, q) = cfg.polys().unwrap();
    (cfg.p, synthesize(&p, &q, cfg.side()).unwrap())
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> std::result::Result<(), String> {
    if elapsed < limit {
        Ok(())
    } else {
        Err(format!("{what} took {elapsed:.2?}, limit {limit:?}"))
    }
}

fn c1_lucas() -> Outcome {
    let start = Instant::now();
    let f2 = PrimeField::new(2).unwrap();
    let q = parse_poly("1 - x1 - x2", f2, 2, CoeffKind::Scalar).unwrap();
    let m = expand_quotient(&Poly::one(f2, 2, CoeffKind::Scalar), &q, Side::Right, &[256, 256]).unwrap();
    let equal = m == binomial_tiling(f2, &[256, 256]).unwrap();
    let elapsed = start.elapsed();
    if !equal {
        return Err("expansion differs from Pascal's rule".into());
    }
    within(elapsed, Duration::from_secs(1), "256x256")?;
    Ok(format!("256x256 equal, {elapsed:.2?}"))
}

fn c2_razpet() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut cells = 0;
    for p in [2u64, 3, 5] {
        let field = PrimeField::new(p).unwrap();
        for _ in 0..20 {
            let (a, b, c) = (rng.gen_range(0..p) as i64, rng.gen_range(0..p) as i64, rng.gen_range(0..p) as i64);
            let report = razpet_check(&RecurrenceSpec::scalar(field, a, b, c), 3).unwrap();
            if !report.ok {
                return Err(format!("p={p} (a,b,c)=({a},{b},{c}) first violation {:?}", report.first_violation));
            }
            cells += report.checked;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(10), "60 specs")?;
    Ok(format!("60 specs, {cells} cells, {elapsed:.2?}"))
}

fn c3_explicit() -> Outcome {
    let f2 = PrimeField::new(2).unwrap();
    let q = parse_poly("1 - x - y", f2, 2, CoeffKind::Scalar).unwrap();
    let syn = synthesize(&Poly::one(f2, 2, CoeffKind::Scalar), &q, Side::Right).unwrap();
    // blocks listed as [[S(0,0), S(1,0)], [S(0,1), S(1,1)]] in picture order (x right, y down)
    let picture = |c: u32| {
        let b = syn.subst.block_of(&[c]).unwrap();
        [[b[0], b[2]], [b[1], b[3]]]
    };
    let (s0, s1) = (picture(0), picture(1));
    if s0 != [[0, 0], [0, 0]] || s1 != [[1, 1], [1, 0]] {
        return Err(format!("S0 = {s0:?}, S1 = {s1:?}"));
    }
    Ok(format!("S0 = {s0:?}, S1 = {s1:?}"))
}

fn c4_invariance() -> Outcome {
    let mut slowest = Duration::ZERO;
    for name in preset_names() {
        let start = Instant::now();
        let (p, syn) = preset_synthesis(name);
        let side = 256usize.div_ceil(p as usize) * p as usize;
        let rep = verify_invariance(&syn.tbar_box(&[side, side]).unwrap(), &syn.subst, 1).unwrap();
        let elapsed = start.elapsed();
        if !rep.ok {
            return Err(format!("{name}: {} failures, first {:?}", rep.failures, rep.first_failure));
        }
        within(elapsed, Duration::from_secs(5), name)?;
        slowest = slowest.max(elapsed);
    }
    Ok(format!("22 presets, slowest {slowest:.2?}"))
}

fn c5_factorization() -> Outcome {
    for name in preset_names() {
        let (_, syn) = preset_synthesis(name);
        let ext = [512, 512];
        let rep = verify_factorization(&syn.m_box(&ext).unwrap(), &syn.tbar_box(&ext).unwrap(), &syn.tau).unwrap();
        if !rep.ok {
            return Err(format!("{name}: {} failures, first {:?}", rep.failures, rep.first_failure));
        }
    }
    Ok("22 presets on 512x512".into())
}

fn c6_block() -> Outcome {
    let mut slowest = Duration::ZERO;
    let mut pairs = Vec::new();
    for name in preset_names() {
        let start = Instant::now();
        let (p, syn) = preset_synthesis(name);
        let p = p as usize;
        let bs = find_block_substitution(&syn.tau, &syn.subst, 8).map_err(|e| format!("{name}: {e}"))?;
        let side = p.pow(bs.r + bs.t) * 64;
        let blocks = block_tiling(&syn.m_box(&[side, side]).unwrap(), p.pow(bs.r)).unwrap();
        let rep = verify_invariance(&blocks, &bs.subst, 1).unwrap();
        let elapsed = start.elapsed();
        if !rep.ok {
            return Err(format!("{name}: (r,t)=({},{}), {} failures", bs.r, bs.t, rep.failures));
        }
        let bound = syn.d_window.pow(2);
        if bs.rho_rank > bound {
            return Err(format!("{name}: rank {} > D^n = {bound}", bs.rho_rank));
        }
        within(elapsed, Duration::from_secs(30), name)?;
        slowest = slowest.max(elapsed);
        pairs.push(format!("{name}:({},{})", bs.r, bs.t));
    }
    Ok(format!("slowest {slowest:.2?}; {}", pairs.join(" ")))
}

fn random_unit_q(rng: &mut ChaCha8Rng, field: PrimeField) -> Poly {
    let p = field.p();
    let mut terms = vec![(vec![0, 0], rng.gen_range(1..p) as i64)];
    for _ in 0..rng.gen_range(1..=6) {
        let e = vec![rng.gen_range(0..=3), rng.gen_range(0..=3)];
        if e != [0, 0] {
            terms.push((e, rng.gen_range(0..p) as i64));
        }
    }
    Poly::scalar_from_terms(field, 2, &terms)
}

fn c7_frobenius() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in [2u64, 3, 5] {
        let field = PrimeField::new(p).unwrap();
        for _ in 0..20 {
            let q = random_unit_q(&mut rng, field);
            let ext = [128, 128];
            if frobenius_reciprocal(&q, &ext).unwrap() != scalar_reciprocal(&q, &ext).unwrap() {
                return Err(format!("p={p}, Q = {q}"));
            }
        }
    }
    Ok("60 random Q on 128x128".into())
}

fn c8_witness() -> Outcome {
    let (_, syn) = preset_synthesis("fig2-left");
    let colors = count_colors(&block_tiling(&syn.m_box(&[512, 512]).unwrap(), 2).unwrap());
    if colors > 2 {
        Ok(format!("{colors} distinct 2x2 blocks"))
    } else {
        Err(format!("only {colors} distinct 2x2 blocks"))
    }
}

fn c9_recurrence() -> Outcome {
    let mut names = Vec::new();
    for name in preset_names() {
        let cfg = figure_preset(name).unwrap();
        let Some(spec) = cfg.recurrence() else { continue };
        let (p, q) = cfg.polys().unwrap();
        let series = expand_quotient(&p, &q, Side::Left, &[256, 256]).unwrap();
        if recurrence_tiling(&spec, &[256, 256]).unwrap() != series {
            return Err(format!("{name} differs"));
        }
        names.push(name);
    }
    Ok(format!("{} on 256x256", names.join(" ")))
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut hashes = Vec::new();
    for run in 0..2 {
        let path = dir.path().join(format!("run{run}.ppm"));
        let status = Command::new(env!("CARGO_BIN_EXE_selfsim"))
            .args(["preset", "run", "fig1-left", "--render", path.to_str().unwrap()])
            .output()
            .unwrap()
            .status;
        if !status.success() {
            return Err(format!("run {run} exited with {status}"));
        }
        hashes.push(format!("{:x}", Sha256::digest(std::fs::read(&path).unwrap())));
    }
    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/fig1-left_1024.sha256");
    let golden = std::fs::read_to_string(golden_path).unwrap();
    if hashes[0] != hashes[1] {
        return Err("two runs differ".into());
    }
    if hashes[0] != golden.trim() {
        return Err(format!("hash {} differs from the golden {}", hashes[0], golden.trim()));
    }
    Ok(format!("sha256 {}", &hashes[0][..16]))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 Lucas/Sierpinski", c1_lucas),
        ("2 Razpet congruence", c2_razpet),
        ("3 explicit substitution", c3_explicit),
        ("4 window tiling invariance", c4_invariance),
        ("5 tau factorization", c5_factorization),
        ("6 block substitution", c6_block),
        ("7 Frobenius vs direct", c7_frobenius),
        ("8 non-invariance witness", c8_witness),
        ("9 recurrence vs series", c9_recurrence),
        ("10 deterministic render", c10_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} [{elapsed:.2?}]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} [{elapsed:.2?}]: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
