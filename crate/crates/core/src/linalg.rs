//! Small dense linear algebra helpers: just enough for 4x4 metrics,
//! tetrads and the fixed spinor-basis solves. Gaussian elimination with
//! partial pivoting throughout.

use crate::error::Error;
use crate::Result;

pub type Mat4 = [[f64; 4]; 4];
pub type Vec4 = [f64; 4];

pub const MAT4_ZERO: Mat4 = [[0.0; 4]; 4];

pub fn mat4_identity() -> Mat4 {
    let mut m = MAT4_ZERO;
    for i in 0..4 {
        m[i][i] = 1.0;
    }
    m
}

pub fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = MAT4_ZERO;
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = 0.0;
            for k in 0..4 {
                acc += a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn mat4_transpose(a: &Mat4) -> Mat4 {
    let mut out = MAT4_ZERO;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn mat4_max_abs(a: &Mat4) -> f64 {
    let mut m = 0.0f64;
    for row in a {
        for &v in row {
            m = m.max(v.abs());
        }
    }
    m
}

pub fn mat4_sub(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = MAT4_ZERO;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[i][j] - b[i][j];
        }
    }
    out
}

/// Inverse of a 4x4 matrix; `point` only labels the error.
pub fn mat4_inverse(a: &Mat4, point: &[f64; 4]) -> Result<Mat4> {
    let mut aug = [[0.0f64; 8]; 4];
    for i in 0..4 {
        aug[i][..4].copy_from_slice(&a[i]);
        aug[i][4 + i] = 1.0;
    }
    for col in 0..4 {
        let mut pivot = col;
        for row in col + 1..4 {
            if aug[row][col].abs() > aug[pivot][col].abs() {
                pivot = row;
            }
        }
        if aug[pivot][col].abs() < 1e-14 {
            return Err(Error::SingularMetric { point: *point });
        }
        aug.swap(col, pivot);
        let inv = 1.0 / aug[col][col];
        for v in aug[col].iter_mut() {
            *v *= inv;
        }
        for row in 0..4 {
            if row != col {
                let f = aug[row][col];
                if f != 0.0 {
                    for k in 0..8 {
                        aug[row][k] -= f * aug[col][k];
                    }
                }
            }
        }
    }
    let mut out = MAT4_ZERO;
    for i in 0..4 {
        out[i].copy_from_slice(&aug[i][4..]);
    }
    Ok(out)
}

/// Eigenvalue signature of a symmetric 4x4: returns true iff it has exactly
/// one positive and three negative eigenvalues. Uses the characteristic
/// sequence of leading principal minors of the congruence-diagonalized form
/// (plain symmetric Gaussian elimination, valid for signature counting).
pub fn has_lorentzian_signature(g: &Mat4) -> bool {
    let mut m = *g;
    let mut pos = 0;
    let mut neg = 0;
    for k in 0..4 {
        // find a usable diagonal pivot among remaining rows
        let mut pivot = k;
        for r in k..4 {
            if m[r][r].abs() > m[pivot][pivot].abs() {
                pivot = r;
            }
        }
        if m[pivot][pivot].abs() < 1e-12 {
            return false; // degenerate or needs off-diagonal handling: reject
        }
        if pivot != k {
            m.swap(k, pivot);
            for row in m.iter_mut() {
                row.swap(k, pivot);
            }
        }
        let d = m[k][k];
        if d > 0.0 {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..4 {
            let f = m[i][k] / d;
            for j in k..4 {
                m[i][j] -= f * m[k][j];
            }
            m[k][i] = m[i][k]; // keep symmetric storage consistent
        }
    }
    pos == 1 && neg == 3
}

/// Rank of a small real matrix given as rows, with a pivot tolerance.
pub fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let cols = m[0].len();
    let mut rank = 0;
    let mut col = 0;
    while rank < m.len() && col < cols {
        let mut pivot = rank;
        for r in rank + 1..m.len() {
            if m[r][col].abs() > m[pivot][col].abs() {
                pivot = r;
            }
        }
        if m[pivot][col].abs() <= tol {
            col += 1;
            continue;
        }
        m.swap(rank, pivot);
        let inv = 1.0 / m[rank][col];
        for v in m[rank].iter_mut() {
            *v *= inv;
        }
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0.0 {
                let f = m[r][col];
                for c in 0..cols {
                    m[r][c] -= f * m[rank][c];
                }
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

/// Solve A x = b for a small square system (Gaussian elimination, partial
/// pivoting). Panics if singular: callers use it on fixed well-conditioned
/// bases computed at startup.
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if m[row][col].abs() > m[pivot][col].abs() {
                pivot = row;
            }
        }
        assert!(m[pivot][col].abs() > 1e-12, "singular basis system");
        m.swap(col, pivot);
        let inv = 1.0 / m[col][col];
        for v in m[col].iter_mut() {
            *v *= inv;
        }
        for row in 0..n {
            if row != col {
                let f = m[row][col];
                if f != 0.0 {
                    for k in 0..=n {
                        m[row][k] -= f * m[col][k];
                    }
                }
            }
        }
    }
    (0..n).map(|i| m[i][n]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let a: Mat4 = [
            [2.0, 1.0, 0.0, 0.5],
            [0.0, -3.0, 1.0, 0.0],
            [1.0, 0.0, 4.0, 0.0],
            [0.0, 0.25, 0.0, -2.0],
        ];
        let inv = mat4_inverse(&a, &[0.0; 4]).unwrap();
        let prod = mat4_mul(&a, &inv);
        let resid = mat4_max_abs(&mat4_sub(&prod, &mat4_identity()));
        assert!(resid < 1e-12);
    }

    #[test]
    fn singular_matrix_rejected() {
        let mut a = MAT4_ZERO;
        a[0][0] = 1.0;
        assert!(mat4_inverse(&a, &[0.0; 4]).is_err());
    }

    #[test]
    fn lorentzian_signature_detection() {
        let mut eta = MAT4_ZERO;
        eta[0][0] = 1.0;
        for i in 1..4 {
            eta[i][i] = -1.0;
        }
        assert!(has_lorentzian_signature(&eta));
        let mut euclid = mat4_identity();
        assert!(!has_lorentzian_signature(&euclid));
        euclid[0][0] = -1.0;
        assert!(!has_lorentzian_signature(&euclid));
    }

    #[test]
    fn rank_and_solve() {
        let rows = vec![
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 1.0],
            vec![1.0, 1.0, 2.0],
        ];
        assert_eq!(rank(&rows, 1e-12), 2);
        let a = vec![vec![2.0, 0.0], vec![1.0, 1.0]];
        let x = solve(&a, &[4.0, 3.0]);
        assert!((x[0] - 2.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }
}
