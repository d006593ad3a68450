//! Exact minimization of `||G alpha||_2` over the standard simplex.
//!
//! For two columns the problem reduces to a clamped scalar quadratic. For
//! three to six columns every face of the simplex is enumerated and the
//! equality-constrained least-squares problem is solved on its affine hull;
//! the feasible minimizer closest to the barycenter wins ties.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Minimize `||G alpha||_2` over `alpha` in the standard simplex, where the
/// columns of `G` are the vectors being combined. Returns `(alpha, value)`.
pub fn min_simplex_combination(g: &DMatrix<f64>) -> Result<(Vec<f64>, f64)> {
    let k = g.ncols();
    match k {
        0 => Err(Error::TooManyObjectives { k }),
        1 => Ok((vec![1.0], g.column(0).norm())),
        2 => Ok(two_column(g)),
        3..=6 => Ok(face_enumeration(g)),
        _ => Err(Error::TooManyObjectives { k }),
    }
}

fn two_column(g: &DMatrix<f64>) -> (Vec<f64>, f64) {
    let g1 = g.column(0);
    let g2 = g.column(1);
    let u = &g1 - &g2;
    let uu = u.norm_squared();
    if uu == 0.0 {
        // the residual does not depend on alpha; return the barycenter
        return (vec![0.5, 0.5], g2.norm());
    }
    let a = (-u.dot(&g2) / uu).clamp(0.0, 1.0);
    let r = (a * u + g2).norm();
    (vec![a, 1.0 - a], r)
}

fn face_enumeration(g: &DMatrix<f64>) -> (Vec<f64>, f64) {
    let k = g.ncols();
    let barycenter = vec![1.0 / k as f64; k];
    let mut best: Option<(Vec<f64>, f64, f64)> = None; // (alpha, residual, dist to barycenter)
    for mask in 1u32..(1 << k) {
        let support: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let Some(alpha_s) = face_minimizer(g, &support) else {
            continue;
        };
        let mut alpha = vec![0.0; k];
        for (slot, &i) in support.iter().enumerate() {
            alpha[i] = alpha_s[slot];
        }
        let residual = residual_of(g, &alpha);
        let dist: f64 = alpha
            .iter()
            .zip(&barycenter)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let take = match &best {
            None => true,
            Some((_, r, d)) => {
                residual < r - 1e-13 * (1.0 + r) || ((residual - r).abs() <= 1e-13 * (1.0 + r) && dist < *d)
            }
        };
        if take {
            best = Some((alpha, residual, dist));
        }
    }
    let (alpha, residual, _) = best.expect("full face always yields a candidate");
    (alpha, residual)
}

/// Minimize `||G_S alpha_S||` over the affine hull of the face (components
/// summing to one), returning `None` when the result leaves the face.
fn face_minimizer(g: &DMatrix<f64>, support: &[usize]) -> Option<Vec<f64>> {
    let m = support.len();
    let n = g.nrows();
    let gs = DMatrix::from_fn(n, m, |r, c| g[(r, support[c])]);
    if m == 1 {
        return Some(vec![1.0]);
    }
    // alpha_S = b0 + Z y with b0 the face barycenter and Z an orthonormal
    // basis of the sum-zero subspace (Helmert construction); the minimum-norm
    // least-squares y keeps alpha closest to the barycenter among minimizers.
    let b0 = DVector::from_element(m, 1.0 / m as f64);
    let z = helmert(m);
    let a = &gs * &z;
    let rhs = -(&gs * &b0);
    let svd = a.svd(true, true);
    let y = svd.solve(&rhs, 1e-12).ok()?;
    let alpha = b0 + z * y;
    let mut out = Vec::with_capacity(m);
    for &v in alpha.iter() {
        if v < -1e-9 {
            return None;
        }
        out.push(v.max(0.0));
    }
    let sum: f64 = out.iter().sum();
    if sum <= 0.0 {
        return None;
    }
    for v in out.iter_mut() {
        *v /= sum;
    }
    Some(out)
}

/// Orthonormal basis of `{ z : sum(z) = 0 }` in m dimensions, m-1 columns.
fn helmert(m: usize) -> DMatrix<f64> {
    let mut z = DMatrix::zeros(m, m - 1);
    for j in 1..m {
        let norm = ((j * (j + 1)) as f64).sqrt();
        for i in 0..j {
            z[(i, j - 1)] = 1.0 / norm;
        }
        z[(j, j - 1)] = -(j as f64) / norm;
    }
    z
}

fn residual_of(g: &DMatrix<f64>, alpha: &[f64]) -> f64 {
    let a = DVector::from_column_slice(alpha);
    (g * a).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn brute_force_k2(g: &DMatrix<f64>, steps: usize) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..=steps {
            let a = i as f64 / steps as f64;
            let r = residual_of(g, &[a, 1.0 - a]);
            best = best.min(r);
        }
        best
    }

    #[test]
    fn opposite_vectors_cancel_at_the_midpoint() {
        let g = DMatrix::from_column_slice(2, 2, &[1.0, 2.0, -1.0, -2.0]);
        let (alpha, r) = min_simplex_combination(&g).unwrap();
        assert!((alpha[0] - 0.5).abs() < 1e-14);
        assert!(r < 1e-14);
    }

    #[test]
    fn identical_vectors_return_the_barycenter() {
        let g = DMatrix::from_column_slice(2, 2, &[1.0, 2.0, 1.0, 2.0]);
        let (alpha, r) = min_simplex_combination(&g).unwrap();
        assert_eq!(alpha, vec![0.5, 0.5]);
        assert!((r - 5.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn clamps_to_a_vertex_when_the_unconstrained_minimizer_is_outside() {
        // g1 = (1, 0), g2 = (2, 0): any combination has norm >= 1, best at alpha = (1, 0)
        let g = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 2.0, 0.0]);
        let (alpha, r) = min_simplex_combination(&g).unwrap();
        assert_eq!(alpha, vec![1.0, 0.0]);
        assert!((r - 1.0).abs() < 1e-14);
    }

    #[test]
    fn matches_brute_force_scan_for_two_columns() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let g = DMatrix::from_fn(3, 2, |_, _| rng.random_range(-2.0..2.0));
            let (_, r) = min_simplex_combination(&g).unwrap();
            let scan = brute_force_k2(&g, 100_000);
            assert!((r - scan).abs() <= 1e-6 * (1.0 + scan), "{r} vs {scan}");
        }
    }

    #[test]
    fn matches_random_scan_for_three_columns() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let g = DMatrix::from_fn(3, 3, |_, _| rng.random_range(-2.0..2.0));
            let (alpha, r) = min_simplex_combination(&g).unwrap();
            assert!((alpha.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(alpha.iter().all(|&a| a >= 0.0));
            // dense grid over the 2-simplex
            let mut scan = f64::INFINITY;
            let steps = 300;
            for i in 0..=steps {
                for j in 0..=(steps - i) {
                    let a = i as f64 / steps as f64;
                    let b = j as f64 / steps as f64;
                    scan = scan.min(residual_of(&g, &[a, b, 1.0 - a - b]));
                }
            }
            assert!(r <= scan + 1e-9, "{r} vs scan {scan}");
        }
    }

    #[test]
    fn rejects_more_than_six_columns() {
        let g = DMatrix::zeros(2, 7);
        assert!(min_simplex_combination(&g).is_err());
    }
}
