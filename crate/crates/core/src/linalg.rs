//! Small dense linear algebra: Householder least squares and the 2D principal axis.

use crate::geometry::Point2;
use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }
}

/// Least-squares solution of `A x ~= b` by Householder QR.
/// Returns the index of the first column whose pivot falls below
/// `rel_tol * max |R_ii|` when `A` is numerically rank deficient.
pub fn lstsq<T: Real>(a: &Matrix<T>, b: &[T], rel_tol: T) -> Result<Vec<T>, usize> {
    let (m, n) = (a.rows, a.cols);
    assert_eq!(b.len(), m);
    assert!(
        m >= n,
        "least squares needs at least as many rows as columns"
    );
    // column-major working copy
    let mut q: Vec<Vec<T>> = (0..n).map(|c| a.column(c)).collect();
    let mut rhs = b.to_vec();
    let mut diag = vec![T::zero(); n];

    for j in 0..n {
        let norm = q[j][j..]
            .iter()
            .fold(T::zero(), |acc, &v| acc + v * v)
            .sqrt();
        if norm == T::zero() {
            diag[j] = T::zero();
            continue;
        }
        let alpha = if q[j][j] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = q[j][j..].to_vec();
        v[0] = v[0] - alpha;
        let vnorm_sq = v.iter().fold(T::zero(), |acc, &x| acc + x * x);
        diag[j] = alpha;
        if vnorm_sq == T::zero() {
            continue;
        }
        let two = T::lit(2.0);
        for col in q.iter_mut().skip(j) {
            let dot = col[j..]
                .iter()
                .zip(&v)
                .fold(T::zero(), |acc, (&x, &y)| acc + x * y);
            let f = two * dot / vnorm_sq;
            for (x, &y) in col[j..].iter_mut().zip(&v) {
                *x = *x - f * y;
            }
        }
        let dot = rhs[j..]
            .iter()
            .zip(&v)
            .fold(T::zero(), |acc, (&x, &y)| acc + x * y);
        let f = two * dot / vnorm_sq;
        for (x, &y) in rhs[j..].iter_mut().zip(&v) {
            *x = *x - f * y;
        }
    }

    let max_diag = diag.iter().fold(T::zero(), |acc, d| acc.max(d.abs()));
    if let Some(j) = diag
        .iter()
        .position(|d| d.abs() <= rel_tol * max_diag || max_diag == T::zero())
    {
        return Err(j);
    }

    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for k in i + 1..n {
            s = s - q[k][i] * x[k];
        }
        x[i] = s / diag[i];
    }
    Ok(x)
}

/// Angle of the dominant right-singular vector of the (already centered)
/// `n x 2` point matrix. The closed form is the major eigenvector of the
/// 2x2 scatter matrix; its sign is chosen so the third moment along the
/// axis is non-positive, which points the axis away from the heavier tail.
pub fn principal_axis<T: Real>(points: &[Point2<T>]) -> T {
    let (mut sxx, mut syy, mut sxy) = (T::zero(), T::zero(), T::zero());
    for p in points {
        sxx = sxx + p.x * p.x;
        syy = syy + p.y * p.y;
        sxy = sxy + p.x * p.y;
    }
    let angle = (T::lit(2.0) * sxy).atan2(sxx - syy) / T::lit(2.0);
    let (s, c) = angle.sin_cos();
    let skew = points.iter().fold(T::zero(), |acc, p| {
        let t = p.x * c + p.y * s;
        acc + t * t * t
    });
    if skew > T::zero() {
        if angle > T::zero() {
            angle - T::PI()
        } else {
            angle + T::PI()
        }
    } else {
        angle
    }
}
