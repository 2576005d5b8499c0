// Drives the command line from a JSON configuration.

use selfsim::cli::{run, EXIT_OK};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("selfsim-cli-example");
    std::fs::create_dir_all(&dir)?;
    let config = dir.join("sierpinski.json");
    std::fs::write(&config, r#"{"p":2,"d":1,"n":2,"P":"1","Q":"1 + x1 + x2","box":[64,64]}"#)?;
    let config = config.to_str().ok_or("non-utf8 path")?;

    for args in [
        vec!["selfsim", "subst", "verify", "--config", config],
        vec!["selfsim", "blocksub", "find", "--config", config, "--factor", "8"],
    ] {
        assert_eq!(run(args), EXIT_OK);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
