use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{argmax, check_fit, check_predict};
use crate::error::{Error, Result};
use crate::numcore::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NbConfig {
    /// Relative variance floor ε_var.
    pub variance_smoothing: f64,
}

impl Default for NbConfig {
    fn default() -> Self {
        NbConfig {
            variance_smoothing: 1e-9,
        }
    }
}

/// Per-class diagonal Gaussians with class priors.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianNb {
    log_prior: Vec<f64>,
    means: Matrix,
    variances: Matrix,
}

impl GaussianNb {
    pub fn means(&self) -> &Matrix {
        &self.means
    }

    pub fn variances(&self) -> &Matrix {
        &self.variances
    }

    fn log_joint(&self, row: &[f64]) -> Vec<f64> {
        (0..self.log_prior.len())
            .map(|c| {
                if self.log_prior[c] == f64::NEG_INFINITY {
                    return f64::NEG_INFINITY;
                }
                let mut ll = self.log_prior[c];
                for ((x, m), v) in row.iter().zip(self.means.row(c)).zip(self.variances.row(c)) {
                    ll -= 0.5 * ((2.0 * std::f64::consts::PI * v).ln() + (x - m) * (x - m) / v);
                }
                ll
            })
            .collect()
    }
}

/// Variances are floored at `ε_var × (largest per-feature variance of x)`;
/// when every feature is constant the floor is `ε_var` itself.
pub fn fit_gaussian_nb(x: &Matrix, y: &[usize], variance_smoothing: f64) -> Result<GaussianNb> {
    if !(variance_smoothing > 0.0 && variance_smoothing.is_finite()) {
        return Err(Error::Config(format!(
            "variance smoothing must be positive, got {variance_smoothing}"
        )));
    }
    let k = check_fit(x, y, "fit_gaussian_nb")?;
    let (n, d) = x.shape();

    let mut overall_mean = vec![0.0; d];
    let mut counts = vec![0usize; k];
    let mut means = Matrix::zeros(k, d);
    for (r, &label) in x.row_iter().zip(y) {
        counts[label] += 1;
        for ((om, m), v) in overall_mean.iter_mut().zip(means.row_mut(label)).zip(r) {
            *om += v;
            *m += v;
        }
    }
    overall_mean.iter_mut().for_each(|m| *m /= n as f64);
    for (c, &count) in counts.iter().enumerate() {
        if count > 0 {
            let inv = 1.0 / count as f64;
            means.row_mut(c).iter_mut().for_each(|m| *m *= inv);
        }
    }

    let mut overall_var = vec![0.0; d];
    let mut variances = Matrix::zeros(k, d);
    for (r, &label) in x.row_iter().zip(y) {
        let class_mean = means.row(label).to_vec();
        for j in 0..d {
            overall_var[j] += (r[j] - overall_mean[j]).powi(2);
            let dev = r[j] - class_mean[j];
            variances.row_mut(label)[j] += dev * dev;
        }
    }
    let max_var = overall_var.iter().map(|v| v / n as f64).fold(0.0, f64::max);
    let floor = if max_var > 0.0 {
        variance_smoothing * max_var
    } else {
        variance_smoothing
    };
    for (c, &count) in counts.iter().enumerate() {
        let denom = count.max(1) as f64;
        variances
            .row_mut(c)
            .iter_mut()
            .for_each(|v| *v = (*v / denom).max(floor));
    }

    let log_prior = counts
        .iter()
        .map(|&c| {
            if c == 0 {
                f64::NEG_INFINITY
            } else {
                (c as f64 / n as f64).ln()
            }
        })
        .collect();
    Ok(GaussianNb {
        log_prior,
        means,
        variances,
    })
}

/// Maximum log prior plus log likelihood; ties go to the lowest class.
pub fn predict_nb(model: &GaussianNb, x: &Matrix) -> Result<Vec<usize>> {
    check_predict(x, model.means.cols(), "predict_nb")?;
    let rows: Vec<&[f64]> = x.row_iter().collect();
    Ok(rows
        .par_iter()
        .map(|r| argmax(&model.log_joint(r)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::accuracy;
    use crate::eval::testdata::blobs;

    #[test]
    fn separated_blobs() {
        let rows: Vec<[f64; 1]> = (0..40)
            .map(|i| [if i < 20 { -10.0 } else { 10.0 } + (i % 5) as f64 * 0.1])
            .collect();
        let y: Vec<usize> = (0..40).map(|i| (i >= 20) as usize).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let m = fit_gaussian_nb(&x, &y, 1e-9).unwrap();
        assert_eq!(accuracy(&predict_nb(&m, &x).unwrap(), &y).unwrap(), 1.0);
        let (x, y) = blobs(4, 50, 0.1, 3);
        let m = fit_gaussian_nb(&x, &y, 1e-9).unwrap();
        assert!(accuracy(&predict_nb(&m, &x).unwrap(), &y).unwrap() >= 0.99);
    }

    #[test]
    fn constant_feature_is_neutral() {
        let x = Matrix::from_rows(&[[5.0, -1.0], [5.0, -1.2], [5.0, 1.0], [5.0, 1.1]]).unwrap();
        let y = [0, 0, 1, 1];
        let m = fit_gaussian_nb(&x, &y, 1e-9).unwrap();
        assert!(m.variances().is_finite());
        assert_eq!(m.variances().get(0, 0), m.variances().get(1, 0));
        assert_eq!(predict_nb(&m, &x).unwrap(), y);

        let flat = Matrix::from_rows(&[[2.0], [2.0], [2.0], [2.0]]).unwrap();
        let m = fit_gaussian_nb(&flat, &y, 1e-9).unwrap();
        assert_eq!(m.variances().get(0, 0), 1e-9);
        assert_eq!(predict_nb(&m, &flat).unwrap(), vec![0; 4]);
    }

    #[test]
    fn identical_classes_tie_to_zero() {
        let x = Matrix::from_rows(&[[1.0], [2.0], [1.0], [2.0]]).unwrap();
        let m = fit_gaussian_nb(&x, &[0, 0, 1, 1], 1e-9).unwrap();
        assert_eq!(predict_nb(&m, &x).unwrap(), vec![0; 4]);
    }

    #[test]
    fn absent_class_never_predicted() {
        let x = Matrix::from_rows(&[[0.0], [0.1], [5.0], [5.1]]).unwrap();
        let m = fit_gaussian_nb(&x, &[0, 0, 2, 2], 1e-9).unwrap();
        assert_eq!(predict_nb(&m, &x).unwrap(), vec![0, 0, 2, 2]);
    }

    #[test]
    fn rejects_bad_smoothing() {
        let x = Matrix::from_rows(&[[0.0], [1.0]]).unwrap();
        assert!(fit_gaussian_nb(&x, &[0, 1], 0.0).is_err());
    }
}
