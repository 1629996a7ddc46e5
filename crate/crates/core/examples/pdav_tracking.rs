//! Tracking run on the spin/tilt maneuver with exact model knowledge.
//!
//! `cargo run --example pdav_tracking [OUT_DIR]`

use pdav::harness::{run_pdav, ScenarioConfig, ScenarioKind};

fn main() -> pdav::Result<()> {
    let cfg = ScenarioConfig::reference(ScenarioKind::Pdav);
    let out = run_pdav(&cfg, false)?;
    print!("{}", out.metrics.to_text());

    println!("\n{:>5} {:>10} {:>10} {:>10}", "t", "Ψ", "ω₃", "ω_d,3");
    for r in out
        .series
        .rows
        .iter()
        .filter(|r| (r.t * 1000.0).round() as i64 % 2000 == 0)
    {
        println!(
            "{:>5.1} {:>10.2e} {:>10.4} {:>10.4}",
            r.t, r.psi, r.omega.z, r.omega_d.z
        );
    }
    if let Some(dir) = std::env::args().nth(1) {
        out.write(dir.as_ref(), "")?;
        println!("wrote {dir}");
    }
    Ok(())
}
