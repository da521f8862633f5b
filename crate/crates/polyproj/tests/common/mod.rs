//! Shared helpers for the integration suites. Everything here is
//! deliberately independent of the crate's internal linear algebra: the
//! elimination routines are written from scratch so that agreement
//! between a crate result and a helper result is evidence, not an
//! identity.

#![allow(dead_code)]

use polyproj::core::{Halfspace, Polyhedron, Vector};
use polyproj::projector::ProjectorConfig;

/// Plain Gaussian elimination with partial pivoting. `None` when a pivot
/// column vanishes.
pub fn solve_gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n));
    assert_eq!(b.len(), n);
    for k in 0..n {
        let pivot_row = (k..n).max_by(|&i, &j| {
            a[i][k].abs().partial_cmp(&a[j][k].abs()).expect("finite entries")
        })?;
        if a[pivot_row][k] == 0.0 {
            return None;
        }
        a.swap(k, pivot_row);
        b.swap(k, pivot_row);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in k + 1..n {
            s -= a[k][j] * x[j];
        }
        x[k] = s / a[k][k];
    }
    Some(x)
}

/// Determinant by the same elimination; 0.0 for singular input.
pub fn det_gauss(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for k in 0..n {
        let pivot_row = (k..n)
            .max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap())
            .unwrap();
        if a[pivot_row][k] == 0.0 {
            return 0.0;
        }
        if pivot_row != k {
            a.swap(k, pivot_row);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

/// One accepted mixed representation found by [`exhaustive_mixed_scan`].
#[derive(Debug, Clone)]
pub struct MixedWitness {
    /// 0-based indices of the dual-generator block.
    pub support: Vec<usize>,
    pub beta: Vec<f64>,
    pub alpha: Vec<f64>,
}

/// Exhaustively scans all `2^n` subsets `I` of `{0..n}` for a cone given
/// by its basis rows: for each subset it solves
/// `x = sum_{i not in I} alpha_i b_i + sum_{j in I} beta_j u_j`
/// (duals computed here, independently) and accepts when all
/// `alpha_i >= -1e-10` and all `beta_j > 1e-10`. Returns the number of
/// accepting subsets and the witnesses.
pub fn exhaustive_mixed_scan(basis: &[Vec<f64>], x: &[f64]) -> (usize, Vec<MixedWitness>) {
    let n = basis.len();
    assert!(n <= 16, "exhaustive scan is for small cones");

    // Duals: solve B u_j = -e_j where B's rows are the basis vectors.
    let b_mat: Vec<Vec<f64>> = basis.to_vec();
    let duals: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = -1.0;
            solve_gauss(b_mat.clone(), e).expect("test bases are nonsingular")
        })
        .collect();

    let mut witnesses = Vec::new();
    for mask in 0u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let complement: Vec<usize> = (0..n).filter(|j| mask & (1 << j) == 0).collect();

        // Columns: basis over the complement, duals over the support.
        let mut m = vec![vec![0.0; n]; n];
        for (c, &i) in complement.iter().enumerate() {
            for r in 0..n {
                m[r][c] = basis[i][r];
            }
        }
        for (k, &j) in support.iter().enumerate() {
            for r in 0..n {
                m[r][complement.len() + k] = duals[j][r];
            }
        }
        let Some(solution) = solve_gauss(m, x.to_vec()) else {
            continue;
        };
        let alpha = &solution[..complement.len()];
        let beta = &solution[complement.len()..];
        if alpha.iter().all(|&a| a >= -1e-10) && beta.iter().all(|&b| b > 1e-10) {
            witnesses.push(MixedWitness {
                support,
                beta: beta.to_vec(),
                alpha: alpha.to_vec(),
            });
        }
    }
    (witnesses.len(), witnesses)
}

/// Independent clipping for single-coordinate constraints
/// `(coord, sign, offset)`, written directly from the definition.
pub fn clip_oracle(constraints: &[(usize, f64, f64)], x: &[f64]) -> Vec<f64> {
    let needed = constraints
        .iter()
        .map(|&(k, _, _)| k + 1)
        .max()
        .unwrap_or(0)
        .max(x.len());
    let mut z: Vec<f64> = (0..needed).map(|k| x.get(k).copied().unwrap_or(0.0)).collect();
    for &(k, sign, offset) in constraints {
        if sign * z[k] >= offset {
            z[k] = sign * offset;
        }
    }
    z
}

pub fn halfspace(normal: &[f64], offset: f64) -> Halfspace {
    Halfspace::new(Vector::from_slice(normal), offset).expect("valid test halfspace")
}

pub fn polyhedron(rows: &[(&[f64], f64)]) -> Polyhedron {
    Polyhedron::new(rows.iter().map(|(n, e)| halfspace(n, *e)).collect())
        .expect("valid test polyhedron")
}

pub fn default_cfg() -> ProjectorConfig {
    ProjectorConfig::default()
}
