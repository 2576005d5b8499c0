// M itself is not substitution-invariant for the fig2-left preset, but its block tiling
// M^{p^r} is.

use selfsim::scenarios::figure_preset;
use selfsim::substitution::{find_block_substitution, synthesize, verify_invariance};
use selfsim::tiling::{block_tiling, count_colors};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = figure_preset("fig2-left")?;
    let (p, q) = cfg.polys()?;
    let syn = synthesize(&p, &q, cfg.side())?;
    let m = syn.m_box(&[512, 512])?;
    let pairs = count_colors(&block_tiling(&m, 2)?);
    println!("distinct 2x2 blocks of M: {pairs}");
    assert!(pairs > 2);

    let bs = find_block_substitution(&syn.tau, &syn.subst, 8)?;
    println!("r = {}, t = {}, rank = {}, kernel dims = {:?}", bs.r, bs.t, bs.rho_rank, bs.kernel_dims);
    let ell = 2usize.pow(bs.r);
    let side = 2usize.pow(bs.r + bs.t) * 64;
    let blocks = block_tiling(&syn.m_box(&[side, side])?, ell)?;
    let rep = verify_invariance(&blocks, &bs.subst, 5)?;
    println!("block tiling fixed by S': {} cells, ok={}", rep.checked, rep.ok);
    assert!(rep.ok && bs.rho_rank <= syn.d_window.pow(2));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
