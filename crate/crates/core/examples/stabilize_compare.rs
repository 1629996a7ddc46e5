//! The two stabilizers through the 179° and 90° setpoints.
//!
//! `cargo run --example stabilize_compare [OUT_DIR]` also writes the CSVs.

use pdav::harness::{run_stabilize_compare, ScenarioConfig, ScenarioKind};

fn main() -> pdav::Result<()> {
    let cfg = ScenarioConfig::reference(ScenarioKind::StabilizeCompare);
    let out = run_stabilize_compare(&cfg)?;
    let b = &out.benchmark.metrics.time_to_psi;
    let m = &out.modified.metrics.time_to_psi;
    println!("time until Ψ stays below 0.01:");
    println!("  leg     e_r law   e_q law");
    println!("  179°  {:8.3} s {:8.3} s", b[0], m[0]);
    println!("   90°  {:8.3} s {:8.3} s", b[1], m[1]);
    if let Some(dir) = std::env::args().nth(1) {
        out.benchmark.write(dir.as_ref(), "_benchmark")?;
        out.modified.write(dir.as_ref(), "_modified")?;
        println!("wrote {dir}");
    }
    Ok(())
}
