//! Build a polynomial surrogate for an objective vector that is cheap here
//! but stands in for an expensive simulation: scalarize it at a handful of
//! weights, infer a surrogate from the minimizers, and compare critical
//! sets.
//!
//! Run with `cargo run --release --example surrogate_lh22`.

use imop::basis::MonomialBasis;
use imop::critical::{filter_near_data, grid_scan, hausdorff, GridSpec};
use imop::generators::{gen_scalarized_dataset, seeded_starts, DescentOptions};
use imop::objective::ObjectiveVector;
use imop::solver::{solve_inverse, SolveOptions};

fn main() {
    let f = ObjectiveVector::analytic("lh22").unwrap();
    let bounds = vec![(-0.75, 0.75), (-2.5, 0.12)];

    // one descent per (weight, start); distinct local minima all become data
    let starts = seeded_starts(&bounds, 6, 5);
    let result = gen_scalarized_dataset(&f, 14, &starts, &DescentOptions::default()).unwrap();
    println!(
        "{} converged minimizers, weights excluded: {:?}",
        result.data.len(),
        result.excluded_weights
    );
    let data = result.data;

    // a degree-5 basis would have more coefficients than KKT equations
    let guard = SolveOptions {
        enforce_overfit_guard: true,
        ..Default::default()
    };
    match solve_inverse(&data, &MonomialBasis::new(2, 5).unwrap(), &guard) {
        Err(e) => println!("degree 5 rejected: {e}"),
        Ok(_) => println!("unexpected: degree 5 accepted"),
    }

    let basis = MonomialBasis::new(2, 4).unwrap();
    let solution = solve_inverse(&data, &basis, &SolveOptions::default()).unwrap();
    println!(
        "degree-4 surrogate: s1 = {:.3e}, selected {} directions",
        solution.spectrum.value(0),
        solution.selected.len()
    );

    let surrogate = ObjectiveVector::Polynomial(solution.objective.clone());
    let grid = GridSpec::square(bounds, 301).unwrap();
    let oracle = grid_scan(&f, &grid, 5e-3, 10_000_000).unwrap();
    let cloud = grid_scan(&surrogate, &grid, 2e-3, 10_000_000).unwrap();
    let filtered = filter_near_data(&cloud, &data, 0.1).unwrap();
    println!(
        "oracle cloud {} pts, surrogate cloud {} pts ({} after filtering against the data)",
        oracle.len(),
        cloud.len(),
        filtered.len()
    );
    let distance = hausdorff(&filtered.positions(), &oracle.positions()).unwrap();
    println!("surrogate-vs-oracle Hausdorff distance: {distance:.4}");
    println!(
        "\nnote: weighted-sum scalarization only reaches critical points that\n\
         minimize some weighted sum; the lower arc of the oval component\n\
         consists of saddle points, so no data constrains the fit there and\n\
         the distance is dominated by that arc."
    );
}
