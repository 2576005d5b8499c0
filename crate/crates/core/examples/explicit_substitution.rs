// The length-2 substitution fixing Pascal's triangle mod 2.

use selfsim::expand::{compute_h, Side};
use selfsim::ff::PrimeField;
use selfsim::poly::{parse_poly, CoeffKind};
use selfsim::substitution::{apply_substitution, build_phi1, build_substitution, iterate_substitution, synthesize};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f2 = PrimeField::new(2)?;
    let r = parse_poly("x + y", f2, 2, CoeffKind::Scalar)?;
    let h = compute_h(&r)?;
    let phi1 = build_phi1(&h, 1, 2)?;
    let s = build_substitution(&phi1, 1, 2)?;

    // S_c lists S_β(c) for β = (0,0), (0,1), (1,0), (1,1)
    println!("S_0 = {:?}", s.block_of(&[0])?);
    println!("S_1 = {:?}", s.block_of(&[1])?);
    assert_eq!(s.block_of(&[1])?, vec![1, 1, 1, 0]);

    let s2 = iterate_substitution(&s, 2)?;
    println!("S^2 applied to 1 = {:?}", s2.block_of(&[1])?);

    // the same substitution from the full pipeline, and its fixed point
    let q = parse_poly("1 - x - y", f2, 2, CoeffKind::Scalar)?;
    let syn = synthesize(&parse_poly("1", f2, 2, CoeffKind::Scalar)?, &q, Side::Right)?;
    assert_eq!(syn.subst, s);
    let t = syn.t_box(&[32, 32])?;
    assert_eq!(apply_substitution(&s, &t.restrict(&[16, 16])?)?, t);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
