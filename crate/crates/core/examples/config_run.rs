//! Drives the same pipeline as the command-line tool from a JSON config and
//! writes the outputs to a temporary directory.

use delaytherm::io::run::{run, Command, RunConfig};

const CONFIG: &str = r#"{
  "physical": {"rho": 1, "bulk": 1, "shear": 0.75, "alpha": 1, "kappa": 1, "c_rho": 1, "theta0": 1, "l": 3.141592653589793},
  "run": {"tau": 0.1, "horizon": 0.5, "n_modes": 8},
  "data": {"initial": {"kind": "preset", "name": "single_mode", "n": 2, "amplitude": [0.0, 1.0, 0.5]}}
}"#;

fn main() -> delaytherm::Result<()> {
    let dir = std::env::temp_dir().join("delaytherm-config-run");
    std::fs::create_dir_all(&dir)?;
    let config = dir.join("config.json");
    std::fs::write(&config, CONFIG)?;
    for command in [Command::Modes, Command::Simulate] {
        let mut cfg = RunConfig::new(command);
        cfg.config_path = Some(config.clone());
        cfg.output_dir = dir.clone();
        let outcome = run(&cfg)?;
        println!("{}: {}", command.name(), outcome.summary);
        for (name, sha) in &outcome.files {
            println!("  {name} {sha}");
        }
    }
    Ok(())
}
