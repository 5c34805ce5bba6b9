//! Solves the 11-ply plate with both through-thickness schemes and compares
//! their raw stresses with the exact solution.

use lamina::bench::grid_errors;
use lamina::iga::{assemble, build_discretization, DiscretizationScheme};
use lamina::laminate::PlateCase;
use lamina::pagano::{build_oracle, StressComponent};
use lamina::recovery::{RecoveryMode, SampleGrid};
use std::time::Instant;

fn main() -> lamina::Result<()> {
    let case = PlateCase::benchmark(11, 10.0)?;
    let oracle = build_oracle(&case)?;
    let grid = SampleGrid::standard(&case)?;
    for (name, scheme) in [
        ("layerwise", DiscretizationScheme::layerwise(4, 9, 3)),
        ("single-element", DiscretizationScheme::single_element(4, 9, 3, 4)),
    ] {
        let t0 = Instant::now();
        let disc = build_discretization(&case, &scheme)?;
        let system = assemble(&disc);
        let field = disc.solve(&system)?;
        let secs = t0.elapsed().as_secs_f64();
        let e = grid_errors(&field, &oracle, &grid, RecoveryMode::FromBottom, true)?;
        println!("{name}: {} scalar DOFs, {} free, {secs:.2}s", disc.scalar_dofs(), system.size());
        for c in StressComponent::ALL {
            println!("  raw {} error {:.3e}", c.name(), e.raw(c));
        }
    }
    Ok(())
}
