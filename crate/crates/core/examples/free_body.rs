//! Torque-free tumbling: angular momentum and energy are conserved by the
//! integrator, and friction alone spins the body down.

use pdav::checks::free_body_drift;
use pdav::rigid_body::{step, BodyState, RigidBodyParams, StepSize};
use pdav::so3::{euler313, Vector3};

fn main() -> pdav::Result<()> {
    let p = RigidBodyParams::reference();
    let initial = BodyState::new(euler313(0.3, 0.8), Vector3::new(0.5, 4.0, 1.0));
    let drift = free_body_drift(&p, initial, StepSize::DEFAULT, 10.0)?;
    println!("over 10 s at h = 1e-3 (u = c = τ = 0):");
    println!("  momentum drift  {:.2e}", drift.momentum);
    println!("  energy drift    {:.2e}", drift.energy);
    println!("  orthonormality  {:.2e}", drift.orthogonality);

    // Pure spin about e3 with friction decays as exp(−c t / J33).
    let mut s = BodyState::new(euler313(0.0, 0.0), Vector3::new(0.0, 0.0, 10.0));
    let h = StepSize::DEFAULT;
    for k in 0..1000 {
        s = step(&s, |_, _| Ok(Vector3::zeros()), &p, k as f64 * h.get(), h)?;
    }
    let expected = 10.0 * (-p.friction() / p.inertia().z).exp();
    println!(
        "spin after 1 s: {:.9} (closed form {expected:.9})",
        s.omega.z
    );
    Ok(())
}
