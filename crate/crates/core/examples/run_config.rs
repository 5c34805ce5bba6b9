//! Runs one case described by a TOML file (or the built-in default) and
//! prints the error summary as JSON.

use lamina::bench::run_case;
use lamina::config::RunConfig;

const SAMPLE: &str = r#"
[plate]
n_layers = 4
slenderness = 20.0

[discretization]
variant = "single-element"
quad_per_layer = 2

[recovery]
mode = "two-sided-average"
"#;

fn main() -> lamina::Result<()> {
    let config = match std::env::args().nth(1) {
        Some(path) => RunConfig::load(path.as_ref())?,
        None => RunConfig::from_toml_str(SAMPLE)?,
    };
    print!("{}", config.to_toml());
    let report = run_case(&config, 1, true)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(())
}
