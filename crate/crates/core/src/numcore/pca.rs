use super::{l2_norm, Matrix};
use crate::error::{Error, Result};

const MAX_ITERS: usize = 1000;
const TOLERANCE: f64 = 1e-12;

/// Projects the centered rows of `points` onto their top `k` principal axes.
///
/// Axes are found one at a time by power iteration on `XᵀX` (applied as
/// `Xᵀ(Xv)` so the covariance is never materialized), orthogonalizing
/// against previously found axes. Each axis is sign-fixed so its
/// largest-magnitude coefficient is positive. Rank-deficient inputs yield
/// zero columns for the missing components.
pub fn principal_components(points: &Matrix, k: usize) -> Result<Matrix> {
    let (n, d) = points.shape();
    if n == 0 {
        return Err(Error::Empty {
            op: "principal_components",
        });
    }
    let mut mean = vec![0.0; d];
    for row in points.row_iter() {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut centered = points.clone();
    for r in 0..n {
        for (v, m) in centered.row_mut(r).iter_mut().zip(&mean) {
            *v -= m;
        }
    }

    let mut axes: Vec<Vec<f64>> = Vec::with_capacity(k);
    for component in 0..k {
        // deterministic start, tilted so it is not orthogonal to common axes
        let mut v: Vec<f64> = (0..d)
            .map(|j| 1.0 + ((j + component) % 7) as f64 * 0.1)
            .collect();
        orthogonalize(&mut v, &axes);
        let mut norm = l2_norm(&v);
        if norm <= TOLERANCE {
            axes.push(vec![0.0; d]);
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        for _ in 0..MAX_ITERS {
            let mut next = gram_apply(&centered, &v);
            orthogonalize(&mut next, &axes);
            norm = l2_norm(&next);
            if norm <= TOLERANCE {
                v = vec![0.0; d];
                break;
            }
            next.iter_mut().for_each(|x| *x /= norm);
            let delta: f64 = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
            v = next;
            if delta < TOLERANCE * d as f64 {
                break;
            }
        }
        let pivot = v.iter().copied().fold(
            0.0f64,
            |best, x| if x.abs() > best.abs() { x } else { best },
        );
        if pivot < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        axes.push(v);
    }

    let mut out = Matrix::zeros(n, k);
    for r in 0..n {
        let row = centered.row(r);
        for (c, axis) in axes.iter().enumerate() {
            out.set(r, c, row.iter().zip(axis).map(|(a, b)| a * b).sum());
        }
    }
    out.ensure_finite("principal_components")?;
    Ok(out)
}

fn gram_apply(x: &Matrix, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.cols()];
    for row in x.row_iter() {
        let s: f64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
        for (o, a) in out.iter_mut().zip(row) {
            *o += s * a;
        }
    }
    out
}

fn orthogonalize(v: &mut [f64], axes: &[Vec<f64>]) {
    for axis in axes {
        let dot: f64 = v.iter().zip(axis).map(|(a, b)| a * b).sum();
        for (x, a) in v.iter_mut().zip(axis) {
            *x -= dot * a;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::SeededRng;

    #[test]
    fn recovers_dominant_axis() {
        // points spread along (1,1,0,0)/√2 with small noise elsewhere
        let mut rng = SeededRng::new(5);
        let rows: Vec<Vec<f64>> = (0..200)
            .map(|_| {
                let t = rng.uniform_in(-10.0, 10.0);
                vec![
                    t + rng.uniform_in(-0.01, 0.01),
                    t + rng.uniform_in(-0.01, 0.01),
                    rng.uniform_in(-0.5, 0.5),
                    rng.uniform_in(-0.1, 0.1),
                ]
            })
            .collect();
        let m = Matrix::from_rows(&rows).unwrap();
        let p = principal_components(&m, 3).unwrap();
        assert_eq!(p.shape(), (200, 3));
        // first component carries nearly all the variance
        let var = |c: usize| p.row_iter().map(|r| r[c] * r[c]).sum::<f64>();
        assert!(var(0) > 100.0 * var(1));
        assert!(var(1) > var(2));
        // projection onto orthonormal axes preserves pairwise structure in 4-D
        let expected = (rows[0][0] - rows[1][0]) * std::f64::consts::FRAC_1_SQRT_2
            + (rows[0][1] - rows[1][1]) * std::f64::consts::FRAC_1_SQRT_2;
        assert!(((p.get(0, 0) - p.get(1, 0)).abs() - expected.abs()).abs() < 0.05);
    }

    #[test]
    fn rank_deficient_input_gives_zero_columns() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]).unwrap();
        let p = principal_components(&m, 3).unwrap();
        for r in 0..3 {
            assert!(p.get(r, 1).abs() < 1e-9);
            assert_eq!(p.get(r, 2), 0.0);
        }
    }
}
