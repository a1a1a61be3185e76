//! Small dense linear-algebra helpers.
//!
//! Complex matrices are packed into real block form [[X, -Y], [Y, X]] so that
//! a single real SVD/LU path serves both fields. If A = X + iY and v = a + ib
//! then the packed matrix applied to [a; b] gives [Re(Av); Im(Av)], and the
//! packed singular values are those of A, each doubled.

use nalgebra::DMatrix;

use crate::num::C64;

/// Pack an r x c complex matrix (given by rows) into a 2r x 2c real matrix.
pub fn pack_complex_matrix(rows: &[Vec<C64>]) -> DMatrix<f64> {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    let mut m = DMatrix::zeros(2 * r, 2 * c);
    for (i, row) in rows.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            m[(i, j)] = z.re;
            m[(i, j + c)] = -z.im;
            m[(i + r, j)] = z.im;
            m[(i + r, j + c)] = z.re;
        }
    }
    m
}

/// (smallest, largest) singular value of a complex matrix.
pub fn singular_range(rows: &[Vec<C64>]) -> (f64, f64) {
    let m = pack_complex_matrix(rows);
    let svd = m.svd(false, false);
    let mut min = f64::INFINITY;
    let mut max: f64 = 0.0;
    for &s in svd.singular_values.iter() {
        min = min.min(s);
        max = max.max(s);
    }
    (min, max)
}

/// Numerical rank with a relative threshold.
pub fn numerical_rank(rows: &[Vec<C64>], rel_tol: f64) -> usize {
    let m = pack_complex_matrix(rows);
    let svd = m.svd(false, false);
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let count = svd
        .singular_values
        .iter()
        .filter(|&&s| s > rel_tol * max)
        .count();
    // Packed singular values come in pairs.
    count / 2
}

/// Inverse of a square complex matrix (rows), or None when singular.
pub fn invert_complex(rows: &[Vec<C64>]) -> Option<Vec<Vec<C64>>> {
    let d = rows.len();
    let m = pack_complex_matrix(rows);
    let inv = m.try_inverse()?;
    let mut out = vec![vec![C64::new(0.0, 0.0); d]; d];
    for i in 0..d {
        for j in 0..d {
            out[i][j] = C64::new(inv[(i, j)], inv[(i + d, j)]);
        }
    }
    Some(out)
}

/// A unit vector q with A q = 0, computed from the Gram matrix A^H A so the
/// null direction is available even for wide matrices (r < d).
pub fn null_vector(rows: &[Vec<C64>]) -> Option<Vec<C64>> {
    let d = rows.first()?.len();
    let mut gram = vec![vec![C64::new(0.0, 0.0); d]; d];
    for (j, gj) in gram.iter_mut().enumerate() {
        for (k, g) in gj.iter_mut().enumerate() {
            for row in rows {
                *g += row[j].conj() * row[k];
            }
        }
    }
    let m = pack_complex_matrix(&gram);
    let svd = m.svd(false, true);
    let vt = svd.v_t?;
    let mut best = 0;
    let mut best_s = f64::INFINITY;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s < best_s {
            best_s = s;
            best = i;
        }
    }
    let mut q: Vec<C64> = (0..d)
        .map(|j| C64::new(vt[(best, j)], vt[(best, j + d)]))
        .collect();
    let n = q.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n < 1e-14 {
        return None;
    }
    for z in q.iter_mut() {
        *z /= n;
    }
    Some(q)
}

/// Minimum-norm solution step for J s = r (J real, full row rank up to the
/// ridge term): s = J^T (J J^T + lambda I)^{-1} r.
pub fn min_norm_step(j: &DMatrix<f64>, r: &[f64], ridge: f64) -> Option<Vec<f64>> {
    let rows = j.nrows();
    let jjt = j * j.transpose() + DMatrix::identity(rows, rows) * ridge;
    let rhs = DMatrix::from_column_slice(rows, 1, r);
    let sol = jjt.lu().solve(&rhs)?;
    let s = j.transpose() * sol;
    Some(s.column(0).iter().cloned().collect())
}

/// Project v onto the orthogonal complement of the row space of J.
pub fn project_out_rows(j: &DMatrix<f64>, v: &[f64], ridge: f64) -> Option<Vec<f64>> {
    let rows = j.nrows();
    let jv = j * DMatrix::from_column_slice(v.len(), 1, v);
    let jjt = j * j.transpose() + DMatrix::identity(rows, rows) * ridge;
    let sol = jjt.lu().solve(&jv)?;
    let corr = j.transpose() * sol;
    Some(
        v.iter()
            .zip(corr.column(0).iter())
            .map(|(a, b)| a - b)
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn invert_round_trip() {
        let rows = vec![
            vec![c(1.0, 0.5), c(0.0, -1.0)],
            vec![c(2.0, 0.0), c(1.0, 1.0)],
        ];
        let inv = invert_complex(&rows).unwrap();
        // rows * inv = I
        for i in 0..2 {
            for j in 0..2 {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..2 {
                    s += rows[i][k] * inv[k][j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s - C64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn null_vector_orthogonal() {
        let rows = vec![vec![c(1.0, 0.0), c(0.0, 1.0), c(0.5, -0.5)]];
        let q = null_vector(&rows).unwrap();
        let dot: C64 = rows[0].iter().zip(&q).map(|(a, b)| a * b).sum();
        assert!(dot.norm() < 1e-12);
    }

    #[test]
    fn singular_range_identity() {
        let rows = vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ];
        let (lo, hi) = singular_range(&rows);
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
    }
}
