//! Infer objective vectors for a family of ellipses and read off the
//! closed-form pattern the coefficients follow.
//!
//! Run with `cargo run --release --example ellipse_family`.

use imop::basis::MonomialBasis;
use imop::generators::gen_ellipse;
use imop::kkt::assemble_system;
use imop::objective::ObjectiveVector;
use imop::solver::svd_spectrum;
use nalgebra::DVector;

fn main() {
    let basis = MonomialBasis::new(2, 3).unwrap();
    println!("semi-axes   leading f1 coeff   leading f2 coeff   (expected -3a^2, -3b^2)");
    for (a, b) in [(1.0, 1.0), (2.0, 1.0), (0.5, 3.0), (1.7, 0.3)] {
        let data = gen_ellipse(a, b, 1000).unwrap();
        let system = assemble_system(&data, &basis).unwrap();
        let spectrum = svd_spectrum(&system).unwrap();
        assert!(spectrum.value(1) < 1e-10, "two null directions expected");

        let v0 = spectrum.vector(0);
        let v1 = spectrum.vector(1);
        // span elements normalized to a unit cubic coefficient in one
        // objective and none in the other
        let det = v0[2] * v1[17] - v1[2] * v0[17];
        let first: DVector<f64> = &v0 * (v1[17] / det) + &v1 * (-v0[17] / det);
        let second: DVector<f64> = &v0 * (-v1[2] / det) + &v1 * (v0[2] / det);
        println!(
            "({a:>3}, {b:>3})   {:>16.10}   {:>16.10}   ({}, {})",
            first[0],
            second[12],
            -3.0 * a * a,
            -3.0 * b * b
        );

        // the conjectured objective is exactly critical on the ellipse with
        // the level-set weights
        let f = ObjectiveVector::analytic(&format!("ellipse({a},{b})")).unwrap();
        let worst = data
            .points()
            .iter()
            .map(|p| {
                let alpha = vec![p.x[0] * p.x[0] / (a * a), p.x[1] * p.x[1] / (b * b)];
                f.kkt_residual(&p.x, &alpha).unwrap()
            })
            .fold(0.0f64, f64::max);
        println!("            worst closed-form residual on the data: {worst:.2e}");
    }
}
