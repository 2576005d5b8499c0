// w(pα+β, pγ+δ) = w(α,γ)·w(β,δ) for the recurrence w = a·w(m-1,n) + b·w(m,n-1) + c·w(m-1,n-1).

use selfsim::ff::PrimeField;
use selfsim::scenarios::{delannoy_mod, razpet_check, razpet_check_table, recurrence_tiling, RecurrenceSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for p in [2u64, 3, 5] {
        let field = PrimeField::new(p)?;
        for (a, b, c) in [(1, 1, 0), (1, 1, 1), (2, 3, 4)] {
            let report = razpet_check(&RecurrenceSpec::scalar(field, a, b, c), 3)?;
            println!("p={p} (a,b,c)=({a},{b},{c}): {} cells, ok={}", report.checked, report.ok);
            assert!(report.ok);
        }
    }

    // Delannoy numbers mod 3 from the recurrence and from the closed sum
    let f3 = PrimeField::new(3)?;
    let w = recurrence_tiling(&RecurrenceSpec::scalar(f3, 1, 1, 1), &[27, 27])?;
    assert_eq!(w.scalar(&[5, 7])?, delannoy_mod(f3, 5, 7));

    // a corrupted table is caught at the corrupted cell
    let mut bad = w.clone();
    bad.set(&[10, 4], &[(w.scalar(&[10, 4])? + 1) % 3]);
    let report = razpet_check_table(&bad)?;
    println!("corrupted table: first violation at {:?}", report.first_violation);
    assert_eq!(report.first_violation, Some([10, 4]));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
