// Matrix coefficients: the tiling of (I - (ax + by + cxy))^{-1} is read off a
// window tiling of 1/det by a linear map τ.

use selfsim::expand::Side;
use selfsim::scenarios::{figure_preset, recurrence_tiling};
use selfsim::substitution::{synthesize, verify_factorization, verify_invariance};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = figure_preset("fig1-left")?;
    let (p, q) = cfg.polys()?;
    let syn = synthesize(&p, &q, Side::Left)?;
    println!("det Q = {}", syn.q0);
    println!("D = {}, tau = {}", syn.d_window, syn.tau.matrix);

    let ext = [256, 256];
    let m = syn.m_box(&ext)?;
    assert_eq!(m, recurrence_tiling(&cfg.recurrence().unwrap(), &ext)?);

    let tbar = syn.tbar_box(&ext)?;
    let fac = verify_factorization(&m, &tbar, &syn.tau)?;
    let inv = verify_invariance(&tbar, &syn.subst, 5)?;
    println!("M = tau(Tbar): {} cells, ok={}", fac.checked, fac.ok);
    println!("Tbar fixed by S: {} cells, ok={}", inv.checked, inv.ok);
    assert!(fac.ok && inv.ok);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
