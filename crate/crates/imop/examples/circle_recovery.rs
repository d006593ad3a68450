//! Recover an objective vector whose Pareto critical set is the unit
//! circle, starting from nothing but sampled points and KKT vectors.
//!
//! Run with `cargo run --release --example circle_recovery`.

use imop::basis::MonomialBasis;
use imop::generators::gen_circle;
use imop::kkt::assemble_system;
use imop::objective::ObjectiveVector;
use imop::solver::{compose_coefficient, svd_spectrum, Normalization};
use nalgebra::DVector;

fn main() {
    let data = gen_circle(1000).unwrap();
    let basis = MonomialBasis::new(2, 3).unwrap();
    let system = assemble_system(&data, &basis).unwrap();
    println!(
        "assembled a {} x {} system from {} data points",
        system.nrows(),
        system.ncols(),
        data.len()
    );

    let spectrum = svd_spectrum(&system).unwrap();
    println!("six smallest singular values:");
    for i in 0..6 {
        println!("  s{} = {:.3e}", i + 1, spectrum.value(i));
    }
    println!(
        "gap: s3 / s2 = {:.2e} -> the null space is two-dimensional",
        spectrum.value(2) / spectrum.value(1)
    );

    // the two-dimensional null space contains a recognizable pattern; pick
    // the element with unit cubic coefficients in both objectives
    let v0 = spectrum.vector(0);
    let v1 = spectrum.vector(1);
    // solve for the combination with c[2] = 1 (x1^3 in f1) and c[17] = 1
    // (x2^3 in f2)
    let det = v0[2] * v1[17] - v1[2] * v0[17];
    let s = (v1[17] - v1[2]) / det;
    let t = (v0[2] - v0[17]) / det;
    let c: DVector<f64> = &v0 * s + &v1 * t;
    println!("\nspan element with unit cubic coefficients:");
    let names: Vec<String> = (0..basis.len()).map(|j| basis.monomial_name(j)).collect();
    for objective in 0..2 {
        let terms: Vec<String> = (0..basis.len())
            .filter(|j| c[objective * basis.len() + j].abs() > 1e-9)
            .map(|j| format!("{:+.3} {}", c[objective * basis.len() + j], names[j]))
            .collect();
        println!("  f{} = {}", objective + 1, terms.join(" "));
    }

    // every data point is extended Pareto critical for this objective
    let f = ObjectiveVector::polynomial(basis, 2, c.as_slice()).unwrap();
    let worst = data
        .points()
        .iter()
        .map(|p| f.kkt_residual(&p.x, &p.alpha).unwrap())
        .fold(0.0f64, f64::max);
    println!("\nworst KKT residual over the data: {worst:.3e}");

    // the default algorithm output spans the same space; verify by projection
    let composed = compose_coefficient(&spectrum, &[0, 1], &[1.0, 0.0], Normalization::Unit)
        .unwrap();
    let (_, residual) = spectrum.project_onto(&composed, &[0, 1]);
    println!("self-projection sanity residual: {residual:.1e}");
}
