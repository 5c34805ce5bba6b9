//! Prints the nonzero quartic basis functions and their first three
//! derivatives at a few parameters, and checks partition of unity.

use lamina::bspline::{KnotVector, SplineSpace1D};

fn main() -> lamina::Result<()> {
    let space = SplineSpace1D::new(KnotVector::uniform(4, 9, 1)?);
    println!("degree {}, {} basis functions", space.degree(), space.n_basis());
    for u in [0.0, 0.13, 0.5, 0.87, 1.0] {
        let t = space.eval_basis(u, 3)?;
        println!("u = {u}: functions {}..={}", t.first, t.first + space.degree());
        for k in 0..=3 {
            let row: Vec<String> = t.row(k).iter().map(|v| format!("{v:>11.4e}")).collect();
            println!("  d{k}: {}  sum {:+.3e}", row.join(" "), t.row(k).iter().sum::<f64>());
        }
    }

    // one C0 joint per ply interface through the thickness
    let bps: Vec<f64> = (1..11).map(|i| i as f64 / 11.0).collect();
    let lw = KnotVector::from_breakpoints(3, &bps, 3)?;
    println!("11-ply cubic layerwise z-space: {} functions", lw.n_basis());
    Ok(())
}
