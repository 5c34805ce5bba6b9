//! Wall times of the layerwise and single-element schemes for 3, 11 and 34
//! plies, with every pairwise assembly+solve ratio.

use lamina::bench::timing_study;
use lamina::config::RunConfig;

fn main() {
    let report = timing_study(&RunConfig::default(), &[3, 11, 34], 3);
    println!("{:<28} {:>8} {:>10} {:>10} {:>10}", "case", "dofs", "assembly", "solve", "recovery");
    for r in &report.rows {
        if let Some(f) = &r.failure {
            println!("{:<28} failed: {f}", r.case_id);
            continue;
        }
        println!(
            "{:<28} {:>8} {:>9.3}s {:>9.3}s {:>9.3}s",
            r.case_id,
            r.scalar_dofs.unwrap_or(0),
            r.assembly_s.unwrap_or(f64::NAN),
            r.solve_s.unwrap_or(f64::NAN),
            r.recovery_s.unwrap_or(f64::NAN)
        );
    }
    for (a, b, ratio) in report.time_ratios() {
        println!("{a} / {b} = {ratio:.2}");
    }
}
