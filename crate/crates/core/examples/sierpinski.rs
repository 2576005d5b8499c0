// Coefficients of 1/(1 - x - y) over F_2 are binomials mod 2: the Sierpinski triangle.

use selfsim::expand::{expand_quotient, Side};
use selfsim::ff::PrimeField;
use selfsim::poly::{parse_poly, CoeffKind};
use selfsim::scenarios::binomial_tiling;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f2 = PrimeField::new(2)?;
    let one = parse_poly("1", f2, 2, CoeffKind::Scalar)?;
    let q = parse_poly("1 - x - y", f2, 2, CoeffKind::Scalar)?;
    let m = expand_quotient(&one, &q, Side::Right, &[256, 256])?;
    assert_eq!(m, binomial_tiling(f2, &[256, 256])?);

    for y in 0..16i64 {
        let row: String = (0..16i64).map(|x| if m.scalar(&[x, y]).unwrap() == 1 { '#' } else { '.' }).collect();
        println!("{row}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
