use angular_uncertainty::testutil::adaptive_simpson;
use num_complex::Complex64;
use std::time::Instant;

fn main() {
    for tol in [1e-11f64, 1e-12, 1e-13] {
        let t = Instant::now();
        let v = adaptive_simpson(
            |phi| Complex64::from_polar(phi * phi, 50.0 * phi),
            0.0, 2.0 * std::f64::consts::PI, tol,
        );
        println!("tol {tol:.0e}: {v}  in {:?}", t.elapsed());
    }
}
