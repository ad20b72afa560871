//! Drives the command-line layer from code: a config file, overrides and the
//! JSON summary with its assertions.

use clap::Parser;
use sofic_me::cli::{run, Cli};

fn main() -> sofic_me::Result<()> {
    let dir = std::env::temp_dir().join("sofic-me-example");
    std::fs::create_dir_all(&dir)?;
    let cfg = dir.join("exp.toml");
    std::fs::write(&cfg, "experiment_id = \"demo\"\n[claimj]\nn = 4\nq = 1\n")?;
    for args in [vec!["claimj"], vec!["claimj", "--map", "displaced:3"]] {
        let mut argv = vec!["sofic-me", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()];
        argv.extend(args.iter());
        let s = run(&Cli::parse_from(&argv))?;
        for a in &s.assertions {
            println!("{:?}: {} {} {} {} -> {}", args, a.name, a.measured, a.relation, a.bound, if a.pass { "pass" } else { "fail" });
        }
    }
    Ok(())
}
