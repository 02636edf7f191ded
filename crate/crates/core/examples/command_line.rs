//! Driving the command-line workflows from code: write a configuration,
//! run a subcommand and read back its CSV output.
//!
//! Run with `cargo run --example command_line`. The same workflows are
//! available from the `hybrid-turbulence` binary.

use std::process::ExitCode;

use hybrid_turbulence::cli::main_with_args;

fn main() -> std::io::Result<()> {
    let dir = std::env::temp_dir().join(format!("hybrid-turbulence-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let config = dir.join("config.toml");
    std::fs::write(
        &config,
        "seed = 3\n\n[norm]\ns = 1.5\np = 2.0\nq = 3.0\n\n[field]\nkind = \"random\"\ndim = 2\nn = 32\n",
    )?;
    let out = dir.join("out");
    let args = ["hybrid-turbulence", "norm", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    let code = main_with_args(args);
    println!("exit code success: {}", code == ExitCode::SUCCESS);
    for line in std::fs::read_to_string(out.join("norm.csv"))?.lines().filter(|l| !l.starts_with("# config")) {
        println!("  {line}");
    }
    std::fs::remove_dir_all(&dir)
}
