// 1/Q by the Frobenius recursion T(α) = Σ_{pγ+δ=α} h(δ)T(γ) against the direct expansion.

use selfsim::expand::{compute_h, frobenius_reciprocal, normalized_r, scalar_reciprocal};
use selfsim::ff::PrimeField;
use selfsim::poly::{parse_poly, CoeffKind};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for (p, q) in [(2, "x^3*y^3 + x^2 + y^2 + x + y + 1"), (3, "2 + x*y - y^2"), (5, "3 + x + 4*y + x*y^2")] {
        let field = PrimeField::new(p)?;
        let q = parse_poly(q, field, 2, CoeffKind::Scalar)?;
        let (r, a_inv) = normalized_r(&q)?;
        println!("p={p}: 1/({q}) = {a_inv}/(1 - ({r})), h has {} terms", compute_h(&r)?.num_terms());
        assert_eq!(frobenius_reciprocal(&q, &[128, 128])?, scalar_reciprocal(&q, &[128, 128])?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
