use rayon::prelude::*;

use super::EPS_NORM;
use crate::error::{Error, Result};

/// Output entries above which `matmul` fans out across rows.
const PARALLEL_WORK: usize = 1 << 16;

/// Dense row-major `f64` matrix.
///
/// The length of `data` always equals `rows * cols`. Constructors reject
/// non-finite input; kernels that could overflow re-check their output.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape {
                op: "from_vec",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        let m = Matrix { rows, cols, data };
        m.ensure_finite("from_vec")?;
        Ok(m)
    }

    /// Builds a matrix from equally long rows. Zero rows gives a `0 x 0` matrix.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape {
                    op: "from_rows",
                    left: (i, r.len()),
                    right: (0, cols),
                });
            }
            data.extend_from_slice(r);
        }
        Matrix::from_vec(rows.len(), cols, data)
    }

    pub fn row_vector(values: &[f64]) -> Result<Self> {
        Matrix::from_vec(1, values.len(), values.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// In-place access for accumulation helpers. Callers are responsible for
    /// keeping entries finite.
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: f64) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact panics on a zero chunk size
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub(crate) fn ensure_finite(&self, op: &'static str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite { op })
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    /// Copies the selected rows, in the given order, into a new matrix.
    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        matmul(self, other)
    }

    pub fn frobenius_norm(&self) -> f64 {
        l2_norm(&self.data)
    }
}

/// Standard matrix product. Each output entry is one sequential dot product,
/// so the result does not depend on how rows are scheduled across threads.
pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.rows {
        return Err(Error::Shape {
            op: "matmul",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let mut out = Matrix::zeros(a.rows, b.cols);
    if b.cols == 0 {
        return Ok(out);
    }
    let inner = a.cols;
    let fill = |(r, out_row): (usize, &mut [f64])| {
        let a_row = &a.data[r * inner..(r + 1) * inner];
        for (c, slot) in out_row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, &av) in a_row.iter().enumerate() {
                acc += av * b.data[k * b.cols + c];
            }
            *slot = acc;
        }
    };
    if a.rows * b.cols * inner >= PARALLEL_WORK {
        out.data.par_chunks_mut(b.cols).enumerate().for_each(fill);
    } else {
        out.data.chunks_mut(b.cols).enumerate().for_each(fill);
    }
    out.ensure_finite("matmul")?;
    Ok(out)
}

/// Column means as a `1 x cols` matrix.
pub fn mean_rows(m: &Matrix) -> Result<Matrix> {
    if m.rows == 0 {
        return Err(Error::Empty { op: "mean_rows" });
    }
    let mut out = vec![0.0; m.cols];
    for row in m.row_iter() {
        for (acc, v) in out.iter_mut().zip(row) {
            *acc += v;
        }
    }
    let inv = 1.0 / m.rows as f64;
    out.iter_mut().for_each(|v| *v *= inv);
    Matrix::from_vec(1, m.cols, out)
}

pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `v / ‖v‖₂`, or an error when the norm is at or below [`EPS_NORM`].
pub fn l2_normalize(v: &[f64]) -> Result<Vec<f64>> {
    let norm = l2_norm(v);
    if !norm.is_finite() {
        return Err(Error::NonFinite { op: "l2_normalize" });
    }
    if norm <= EPS_NORM {
        return Err(Error::DegenerateNorm {
            norm,
            threshold: EPS_NORM,
        });
    }
    Ok(v.iter().map(|x| x / norm).collect())
}

pub fn l2_normalize_row(v: &Matrix) -> Result<Matrix> {
    if v.rows != 1 {
        return Err(Error::Shape {
            op: "l2_normalize_row",
            left: v.shape(),
            right: (1, v.cols),
        });
    }
    Matrix::from_vec(1, v.cols, l2_normalize(&v.data)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::SeededRng;
    use proptest::prelude::*;

    fn random_matrix(rows: usize, cols: usize, rng: &mut SeededRng) -> Matrix {
        let data = (0..rows * cols)
            .map(|_| rng.uniform_in(-1.0, 1.0))
            .collect();
        Matrix::from_vec(rows, cols, data).unwrap()
    }

    #[test]
    fn identity_times_m_is_m() {
        let m = Matrix::from_rows(&[[1.5, -2.0], [0.25, 4.0]]).unwrap();
        assert_eq!(matmul(&Matrix::identity(2), &m).unwrap(), m);
    }

    #[test]
    fn small_product() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let b = Matrix::from_rows(&[[5.0], [6.0]]).unwrap();
        let c = matmul(&a, &b).unwrap();
        assert_eq!(c.shape(), (2, 1));
        assert_eq!(c.as_slice(), &[17.0, 39.0]);
    }

    #[test]
    fn mismatch_names_both_shapes() {
        let a = Matrix::zeros(2, 3);
        let b = Matrix::zeros(2, 2);
        let err = matmul(&a, &b).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("(2, 3)") && msg.contains("(2, 2)"), "{msg}");
    }

    #[test]
    fn parallel_and_serial_products_agree() {
        let mut rng = SeededRng::new(3);
        let a = random_matrix(200, 40, &mut rng);
        let b = random_matrix(40, 30, &mut rng);
        let fast = matmul(&a, &b).unwrap();
        for r in [0, 17, 199] {
            for c in [0, 29] {
                let mut acc = 0.0;
                for k in 0..40 {
                    acc += a.get(r, k) * b.get(k, c);
                }
                assert_eq!(fast.get(r, c), acc);
            }
        }
    }

    #[test]
    fn mean_rows_cases() {
        let m = Matrix::from_rows(&[[1.0, 3.0], [3.0, 5.0]]).unwrap();
        assert_eq!(mean_rows(&m).unwrap().as_slice(), &[2.0, 4.0]);
        let single = Matrix::from_rows(&[[7.0, -1.0, 0.5]]).unwrap();
        assert_eq!(mean_rows(&single).unwrap(), single);
        assert!(matches!(
            mean_rows(&Matrix::zeros(0, 4)),
            Err(Error::Empty { .. })
        ));
    }

    #[test]
    fn normalize_cases() {
        let v = Matrix::row_vector(&[3.0, 4.0]).unwrap();
        let u = l2_normalize_row(&v).unwrap();
        assert!((u.get(0, 0) - 0.6).abs() < 1e-15 && (u.get(0, 1) - 0.8).abs() < 1e-15);
        assert_eq!(l2_normalize_row(&u).unwrap(), u);
        assert!(matches!(
            l2_normalize_row(&Matrix::row_vector(&[0.0, 0.0]).unwrap()),
            Err(Error::DegenerateNorm { .. })
        ));
    }

    #[test]
    fn from_vec_rejects_nan() {
        assert!(matches!(
            Matrix::from_vec(1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn overflow_is_reported() {
        let a = Matrix::from_rows(&[[1e200, 1e200]]).unwrap();
        let b = Matrix::from_rows(&[[1e200], [1e200]]).unwrap();
        assert!(matches!(matmul(&a, &b), Err(Error::NonFinite { .. })));
    }

    proptest! {
        #[test]
        fn matmul_is_associative(seed in any::<u64>(), n in 1usize..6, m in 1usize..6, p in 1usize..6, q in 1usize..6) {
            let mut rng = SeededRng::new(seed);
            let a = random_matrix(n, m, &mut rng);
            let b = random_matrix(m, p, &mut rng);
            let c = random_matrix(p, q, &mut rng);
            let left = matmul(&matmul(&a, &b).unwrap(), &c).unwrap();
            let right = matmul(&a, &matmul(&b, &c).unwrap()).unwrap();
            let diff: Vec<f64> = left.as_slice().iter().zip(right.as_slice()).map(|(x, y)| x - y).collect();
            let scale = left.frobenius_norm().max(1e-12);
            prop_assert!(l2_norm(&diff) / scale < 1e-9);
        }

        #[test]
        fn normalized_rows_have_unit_norm(v in proptest::collection::vec(-1e6f64..1e6, 1..16)) {
            prop_assume!(l2_norm(&v) > EPS_NORM);
            let u = l2_normalize(&v).unwrap();
            prop_assert!((l2_norm(&u) - 1.0).abs() <= 1e-12);
        }
    }
}
