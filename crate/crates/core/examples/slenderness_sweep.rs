//! Recovered-stress error against slenderness for two quadrature counts,
//! written as CSV to stdout.

use lamina::bench::{sweep, SweepAxis};
use lamina::config::RunConfig;

fn main() -> lamina::Result<()> {
    let mut base = RunConfig::default();
    base.plate.n_layers = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(11);
    let mut stdout = std::io::stdout().lock();
    for q in [2, 4] {
        base.discretization.quad_per_layer = q;
        let report = sweep(&base, SweepAxis::Slenderness, &[10.0, 20.0, 30.0, 50.0], true);
        report.write_csv(&mut stdout)?;
    }
    Ok(())
}
