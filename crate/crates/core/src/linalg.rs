//! Small dense complex linear algebra helpers.

use nalgebra::{DMatrix, DVector, Matrix3};

use crate::C64;

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Frobenius-norm condition number `‖S‖_F ‖S⁻¹‖_F`.
pub fn condition_frobenius(s: &CMat, s_inv: &CMat) -> f64 {
    frobenius(s) * frobenius(s_inv)
}

pub fn real_to_complex(m: &Matrix3<f64>) -> CMat {
    CMat::from_fn(3, 3, |i, j| C64::new(m[(i, j)], 0.0))
}

pub fn det3(s: &CMat) -> C64 {
    debug_assert!(s.nrows() == 3 && s.ncols() == 3);
    let e = |i: usize, j: usize| s[(i - 1, j - 1)];
    e(1, 1) * e(2, 2) * e(3, 3) + e(1, 2) * e(2, 3) * e(3, 1) + e(1, 3) * e(2, 1) * e(3, 2)
        - e(3, 1) * e(2, 2) * e(1, 3)
        - e(3, 2) * e(2, 3) * e(1, 1)
        - e(3, 3) * e(2, 1) * e(1, 2)
}

/// Inverse of a 3×3 matrix by the cofactor (adjugate) formula divided by the
/// Sarrus determinant. Returns `None` for an exactly singular matrix.
pub fn adjugate_inverse3(s: &CMat) -> Option<CMat> {
    let det = det3(s);
    if det == C64::new(0.0, 0.0) || !det.is_finite() {
        return None;
    }
    let e = |i: usize, j: usize| s[(i - 1, j - 1)];
    let adj = [
        [
            e(2, 2) * e(3, 3) - e(2, 3) * e(3, 2),
            -e(1, 2) * e(3, 3) + e(1, 3) * e(3, 2),
            e(1, 2) * e(2, 3) - e(1, 3) * e(2, 2),
        ],
        [
            -e(2, 1) * e(3, 3) + e(2, 3) * e(3, 1),
            e(1, 1) * e(3, 3) - e(1, 3) * e(3, 1),
            -e(1, 1) * e(2, 3) + e(1, 3) * e(2, 1),
        ],
        [
            e(2, 1) * e(3, 2) - e(2, 2) * e(3, 1),
            -e(1, 1) * e(3, 2) + e(1, 2) * e(3, 1),
            e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1),
        ],
    ];
    Some(CMat::from_fn(3, 3, |i, j| adj[i][j] / det))
}

/// A nonzero vector in the (numerical) null space of a square matrix, found
/// by Gaussian elimination with full pivoting. The last pivot is treated as
/// zero, so the result is meaningful when the matrix has rank `n − 1`.
pub fn null_vector(a: &CMat) -> CVec {
    let n = a.nrows();
    let mut m = a.clone();
    let mut col_perm: Vec<usize> = (0..n).collect();
    for k in 0..n.saturating_sub(1) {
        let (mut pi, mut pj, mut best) = (k, k, -1.0);
        for i in k..n {
            for j in k..n {
                let v = m[(i, j)].norm();
                if v > best {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        m.swap_rows(k, pi);
        m.swap_columns(k, pj);
        col_perm.swap(k, pj);
        let piv = m[(k, k)];
        if piv.norm() == 0.0 {
            break;
        }
        for i in (k + 1)..n {
            let f = m[(i, k)] / piv;
            for j in k..n {
                let sub = f * m[(k, j)];
                m[(i, j)] -= sub;
            }
        }
    }
    // Free variable is the last (permuted) coordinate.
    let mut y = CVec::zeros(n);
    y[n - 1] = C64::new(1.0, 0.0);
    for k in (0..n - 1).rev() {
        let mut acc = C64::new(0.0, 0.0);
        for j in (k + 1)..n {
            acc += m[(k, j)] * y[j];
        }
        let piv = m[(k, k)];
        y[k] = if piv.norm() == 0.0 { C64::new(0.0, 0.0) } else { -acc / piv };
    }
    let mut x = CVec::zeros(n);
    for (k, &c) in col_perm.iter().enumerate() {
        x[c] = y[k];
    }
    x
}

/// Neumaier-compensated accumulator for complex sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier(acc: &mut (f64, f64), x: f64) {
    let (sum, comp) = *acc;
    let t = sum + x;
    let c = if sum.abs() >= x.abs() {
        (sum - t) + x
    } else {
        (x - t) + sum
    };
    *acc = (t, comp + c);
}

impl CompensatedSum {
    pub fn add(&mut self, z: C64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    pub fn value(&self) -> C64 {
        C64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

/// Entrywise compensated accumulation of `Σ c_k A_k`.
pub struct CompensatedMatrixSum {
    rows: usize,
    cols: usize,
    acc: Vec<CompensatedSum>,
}

impl CompensatedMatrixSum {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            acc: vec![CompensatedSum::default(); rows * cols],
        }
    }

    pub fn add_scaled(&mut self, coeff: f64, m: &CMat) {
        for (slot, z) in self.acc.iter_mut().zip(m.iter()) {
            slot.add(*z * coeff);
        }
    }

    pub fn add_identity(&mut self) {
        for i in 0..self.rows.min(self.cols) {
            // column-major storage
            self.acc[i * self.rows + i].add(C64::new(1.0, 0.0));
        }
    }

    pub fn finish(self) -> CMat {
        CMat::from_iterator(self.rows, self.cols, self.acc.iter().map(|s| s.value()))
    }
}
