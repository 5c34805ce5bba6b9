//! Exact normalized stress profiles of the cross-ply plate at the quarter
//! point, printed as a table.

use lamina::laminate::PlateCase;
use lamina::pagano::{build_oracle, normalize, StressComponent};

fn main() -> lamina::Result<()> {
    let n_layers = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let case = PlateCase::benchmark(n_layers, 10.0)?;
    let oracle = build_oracle(&case)?;
    let l = case.length();
    let (x, y) = (0.25 * l, 0.25 * l);

    print!("{:>7}", "z/t");
    for c in StressComponent::ALL {
        print!("{:>12}", c.name());
    }
    println!();
    let zs = case.layup.interfaces();
    for k in 0..case.layup.n_layers() {
        for j in 0..=4 {
            let z = zs[k] + (zs[k + 1] - zs[k]) * j as f64 / 4.0;
            let s = oracle.stress_in_layer([x, y, z], k);
            print!("{:>7.3}", z / case.thickness());
            for c in StressComponent::ALL {
                print!("{:>12.5}", normalize(s[c.voigt()], c, &case));
            }
            println!();
        }
    }
    let w = oracle.displacement([0.5 * l, 0.5 * l, 0.5 * case.thickness()])?[2];
    println!("centre deflection {w:.6e}");
    Ok(())
}
