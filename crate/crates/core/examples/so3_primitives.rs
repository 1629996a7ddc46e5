//! hat/vee, the exponential map and the 3-1-3 tilt used for the setpoints.

use pdav::so3::{euler313, exp_map, hat, vee, Vector3};

fn main() {
    let r = Vector3::new(0.2, -1.0, 0.5);
    let w = Vector3::new(3.0, 0.1, -2.0);
    println!("hat(r)·w = {:?}", (hat(&r) * w).as_slice());
    println!("r × w    = {:?}", r.cross(&w).as_slice());
    println!("vee(hat(r)) = {:?}", vee(&hat(&r)).unwrap().as_slice());

    let quarter = exp_map(&Vector3::new(0.0, 0.0, std::f64::consts::FRAC_PI_2));
    println!(
        "exp(π/2 e3)·e1 = {:?}",
        quarter.apply(&Vector3::x()).as_slice()
    );
    println!(
        "orthogonality error: {:e}",
        exp_map(&r).orthogonality_error()
    );

    for deg in [0.0, 90.0, 179.0] {
        let q = euler313(0.0, f64::to_radians(deg)).third_axis();
        println!("tilt {deg:>5}° -> q = {:?}", q.as_vector().as_slice());
    }
}
