// Renders a few presets as PPM images in the temporary directory.

use selfsim::cli::render_ppm;
use selfsim::scenarios::figure_preset;
use selfsim::substitution::synthesize;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("selfsim-gallery");
    std::fs::create_dir_all(&dir)?;
    for name in ["fig1-left", "fig1-right", "fig2-left", "fig2-right", "fig2bis-tl", "fig8"] {
        let cfg = figure_preset(name)?;
        let (p, q) = cfg.polys()?;
        let m = synthesize(&p, &q, cfg.side())?.m_box(&[256, 256])?;
        let path = dir.join(format!("{name}.ppm"));
        render_ppm(&m, &path)?;
        println!("{}", path.display());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
