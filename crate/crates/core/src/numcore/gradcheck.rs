use super::{l2_norm, Matrix};
use crate::error::{Error, Result};

/// Central-difference gradient of a scalar function, one entry at a time:
/// `(f(x + h·eᵢ) − f(x − h·eᵢ)) / 2h`.
///
/// This is the reference every hand-written backward pass is checked
/// against. It must stay independent of the analytic code paths.
pub fn finite_diff_gradient<F>(mut f: F, x: &Matrix, h: f64) -> Result<Matrix>
where
    F: FnMut(&Matrix) -> f64,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Config(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let mut probe = x.clone();
    let mut grad = Matrix::zeros(x.rows(), x.cols());
    for i in 0..x.as_slice().len() {
        let original = probe.as_slice()[i];
        probe.as_mut_slice()[i] = original + h;
        let plus = f(&probe);
        probe.as_mut_slice()[i] = original - h;
        let minus = f(&probe);
        probe.as_mut_slice()[i] = original;
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::NonFinite {
                op: "finite_diff_gradient",
            });
        }
        grad.as_mut_slice()[i] = (plus - minus) / (2.0 * h);
    }
    Ok(grad)
}

/// `‖analytic − reference‖ / max(‖reference‖, 1e-8)`.
pub fn relative_error(analytic: &[f64], reference: &[f64]) -> f64 {
    assert_eq!(analytic.len(), reference.len());
    let diff: Vec<f64> = analytic.iter().zip(reference).map(|(a, b)| a - b).collect();
    l2_norm(&diff) / l2_norm(reference).max(1e-8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::{matmul, SeededRng};

    #[test]
    fn square_at_three() {
        let x = Matrix::row_vector(&[3.0]).unwrap();
        let g = finite_diff_gradient(|m| m.get(0, 0).powi(2), &x, 1e-5).unwrap();
        assert!((g.get(0, 0) - 6.0).abs() < 1e-6);
    }

    #[test]
    fn constant_has_zero_gradient() {
        let x = Matrix::row_vector(&[1.0, -2.0, 0.5]).unwrap();
        let g = finite_diff_gradient(|_| 4.2, &x, 1e-5).unwrap();
        assert!(g.as_slice().iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn sum_has_unit_gradient() {
        let x = Matrix::from_rows(&[[1.0, 2.0], [-3.0, 0.1]]).unwrap();
        let g = finite_diff_gradient(|m| m.as_slice().iter().sum(), &x, 1e-5).unwrap();
        assert!(g.as_slice().iter().all(|v| (v - 1.0).abs() < 1e-8));
    }

    #[test]
    fn quadratic_form_matches_two_a_x() {
        // f(x) = xᵀAx with symmetric A has gradient 2Ax.
        let mut rng = SeededRng::new(11);
        for _ in 0..20 {
            let n = 5;
            let mut a = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let v = rng.uniform_in(-1.0, 1.0);
                    a.set(i, j, v);
                    a.set(j, i, v);
                }
            }
            let x = Matrix::from_vec(n, 1, (0..n).map(|_| rng.uniform_in(-2.0, 2.0)).collect())
                .unwrap();
            let quad = |m: &Matrix| {
                let ax = matmul(&a, m).unwrap();
                m.as_slice()
                    .iter()
                    .zip(ax.as_slice())
                    .map(|(p, q)| p * q)
                    .sum::<f64>()
            };
            let numeric = finite_diff_gradient(quad, &x, 1e-5).unwrap();
            let analytic: Vec<f64> = matmul(&a, &x)
                .unwrap()
                .as_slice()
                .iter()
                .map(|v| 2.0 * v)
                .collect();
            assert!(relative_error(&analytic, numeric.as_slice()) < 1e-5);
        }
    }

    #[test]
    fn non_finite_evaluation_is_an_error() {
        let x = Matrix::row_vector(&[0.0]).unwrap();
        let r = finite_diff_gradient(|m| 1.0 / (m.get(0, 0) - 1e-5), &x, 1e-5);
        assert!(matches!(r, Err(Error::NonFinite { .. })));
    }
}
