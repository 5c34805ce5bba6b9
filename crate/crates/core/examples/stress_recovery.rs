//! Recovers the transverse stresses of a single-element solution at the
//! quarter point and prints them next to the raw and exact values.

use lamina::iga::{assemble, build_discretization, DiscretizationScheme};
use lamina::laminate::PlateCase;
use lamina::pagano::{build_oracle, normalize, StressComponent};
use lamina::recovery::{recover_profile, stress_in_layer, NoBodyForce, RecoveryMode, SampleGrid, TopTraction};
use lamina::bspline::SpanSide;

fn main() -> lamina::Result<()> {
    let case = PlateCase::benchmark(11, 10.0)?;
    let disc = build_discretization(&case, &DiscretizationScheme::default())?;
    let field = disc.solve(&assemble(&disc))?;
    let oracle = build_oracle(&case)?;

    let l = case.length();
    let (x, y) = (0.25 * l, 0.25 * l);
    let grid = SampleGrid::new(&case, 1, 4)?;
    let zs = grid.z_values();
    let top = TopTraction::pressure(case.pressure(x, y));
    let bottom = recover_profile(&field, x, y, &zs, &NoBodyForce, RecoveryMode::FromBottom, None)?;
    let both = recover_profile(&field, x, y, &zs, &NoBodyForce, RecoveryMode::TwoSidedAverage, Some(top))?;

    for c in StressComponent::OUT_OF_PLANE {
        println!("{}: z, raw, from-bottom, two-sided, exact", c.name());
        for (i, &(z, k)) in grid.heights.iter().enumerate() {
            let n = |v: f64| normalize(v, c, &case);
            let raw = stress_in_layer(&field, [x, y, z], k, SpanSide::Below)?.sigma[c.voigt()];
            let exact = oracle.stress_in_layer([x, y, z], k)[c.voigt()];
            println!(
                "  {z:6.2} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
                n(raw),
                n(bottom.component(c).unwrap()[i]),
                n(both.component(c).unwrap()[i]),
                n(exact)
            );
        }
    }
    Ok(())
}
