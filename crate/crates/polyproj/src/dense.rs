//! Small dense linear algebra used by the search: LU factorization with
//! partial pivoting, determinants, and solves. Problems here are tiny
//! (order = active-set cardinality), so everything is plain `f64` in
//! row-major storage with no blocking.

/// Square matrix in row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Square {
    n: usize,
    a: Vec<f64>,
}

impl Square {
    pub(crate) fn zeros(n: usize) -> Self {
        Square { n, a: vec![0.0; n * n] }
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }
}

#[cfg(test)]
impl Square {
    pub(crate) fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Square::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has length {} in a {n}x{n} matrix", row.len());
            m.a[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    pub(crate) fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }
}

/// LU factorization with partial pivoting. `None` means a pivot column was
/// exactly zero, i.e. the matrix is singular to working precision.
pub(crate) struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    sign: f64,
    max_pivot: f64,
    min_pivot: f64,
}

pub(crate) fn factor(m: &Square) -> Option<Lu> {
    let n = m.n;
    let mut lu = m.a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    let mut max_pivot = 0.0_f64;
    let mut min_pivot = f64::INFINITY;

    for k in 0..n {
        let mut p = k;
        let mut best = lu[k * n + k].abs();
        for i in (k + 1)..n {
            let v = lu[i * n + k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return None;
        }
        if p != k {
            for j in 0..n {
                lu.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let pivot = lu[k * n + k];
        max_pivot = max_pivot.max(pivot.abs());
        min_pivot = min_pivot.min(pivot.abs());
        for i in (k + 1)..n {
            let factor = lu[i * n + k] / pivot;
            lu[i * n + k] = factor;
            for j in (k + 1)..n {
                lu[i * n + j] -= factor * lu[k * n + j];
            }
        }
    }
    if n == 0 {
        min_pivot = 1.0;
        max_pivot = 1.0;
    }
    Some(Lu { n, lu, perm, sign, max_pivot, min_pivot })
}

impl Lu {
    /// Solve `A x = b` for the factored `A`.
    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n, "rhs length {} for a {n}x{n} system", b.len());
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    pub(crate) fn det(&self) -> f64 {
        let mut d = self.sign;
        for k in 0..self.n {
            d *= self.lu[k * self.n + k];
        }
        d
    }

    /// Ratio of the largest to the smallest pivot magnitude; a cheap
    /// ill-conditioning signal (large ratio = nearly dependent rows).
    pub(crate) fn pivot_ratio(&self) -> f64 {
        if self.min_pivot == 0.0 {
            f64::INFINITY
        } else {
            self.max_pivot / self.min_pivot
        }
    }
}

/// Determinant by elimination; 0.0 when a pivot column vanishes exactly.
pub(crate) fn det(m: &Square) -> f64 {
    match factor(m) {
        Some(lu) => lu.det(),
        None => 0.0,
    }
}

/// One-shot solve; `None` when the matrix is exactly singular.
pub(crate) fn solve(m: &Square, b: &[f64]) -> Option<Vec<f64>> {
    factor(m).map(|lu| lu.solve(b))
}
