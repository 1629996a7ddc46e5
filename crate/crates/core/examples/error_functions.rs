//! Compares the two error vectors as the pointing error grows towards the
//! antipode: `‖e_r‖ = sin θ` collapses, `‖e_q‖ = sin(θ/2)` keeps growing.

use pdav::attitude_error::{e_q, e_r, psi, psi_r};
use pdav::so3::{rot_x, RotationMatrix, UnitVector3};

fn main() {
    let q = UnitVector3::e3();
    let body = RotationMatrix::identity();
    println!(
        "{:>7} {:>10} {:>10} {:>10} {:>10}",
        "θ [°]", "Ψ_r", "|e_r|", "Ψ", "|e_q|"
    );
    for deg in [1.0, 30.0, 60.0, 90.0, 120.0, 150.0, 170.0, 179.0, 179.9] {
        let qd = rot_x(f64::to_radians(deg)).third_axis();
        println!(
            "{deg:>7.1} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            psi_r(&q, &qd),
            e_r(&q, &qd).norm(),
            psi(&q, &qd).unwrap(),
            e_q(&q, &qd, &body).unwrap().norm(),
        );
    }
    match psi(&q, &-q) {
        Ok(v) => println!("antipode: Ψ = {v}"),
        Err(e) => println!("antipode: {e}"),
    }
}
