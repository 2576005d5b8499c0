// Dump a substitution to JSON and load it back.

use selfsim::scenarios::figure_preset;
use selfsim::substitution::{synthesize, verify_invariance, LinearSubstitution};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = figure_preset("fig9")?;
    let (p, q) = cfg.polys()?;
    let syn = synthesize(&p, &q, cfg.side())?;
    let text = syn.subst.to_json();
    println!("{}", &text[..text.len().min(120)]);

    let back = LinearSubstitution::from_json(&text)?;
    assert_eq!(back.to_json(), text);
    assert!(verify_invariance(&syn.tbar_box(&[81, 81])?, &back, 1)?.ok);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
