//! Gram matrices, index sets, and the cofactor formulas for multipliers.
//!
//! The search in [`crate::projector`] decides each candidate support `I`
//! from the Gram data alone: the principal block `G_II` and the shifted
//! inner products `w_i = <x|u_i> - eta_i`. Two independent routes compute
//! the same multipliers:
//!
//! - the elimination route ([`crate::projector::solve_support`]) solves
//!   `G_II nu = w_I` directly and is what the projector uses;
//! - the cofactor route ([`nu_in`], [`nu_out`]) expands the same numbers
//!   as signed subdeterminant sums and exists so the two can be checked
//!   against each other.
//!
//! [`nu_out`] extends the expansion to an index outside the support; its
//! defining property is the residual identity
//! `nu_out(G, w, I, i') = det(G_II) * (w_i' - sum_k nu_k G[k][i'])`,
//! i.e. it is the off-support residual of the candidate point scaled by a
//! positive determinant, which is why its sign alone decides feasibility.

use crate::core::Polyhedron;
use crate::dense;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GramError {
    #[error("gram matrix rows must form a square matrix")]
    NotSquare,
    #[error("gram entry ({i}, {j}) is not finite")]
    NonFinite { i: usize, j: usize },
    #[error("gram entries ({i}, {j}) and ({j}, {i}) disagree beyond tolerance")]
    Asymmetric { i: usize, j: usize },
}

/// Symmetric matrix of pairwise inner products of constraint normals.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    a: Vec<f64>,
}

impl GramMatrix {
    /// Inner products of the normals of `p`. Mirrored entries are stored
    /// from a single computation, so symmetry is exact.
    pub fn build(p: &Polyhedron) -> GramMatrix {
        let n = p.len();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = p.halfspace(i).normal().inner(p.halfspace(j).normal());
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        GramMatrix { n, a }
    }

    /// Gram matrix from explicit rows, for callers that carry inner
    /// products from elsewhere. Mirrored entries may disagree by rounding
    /// up to `1e-9 * (1 + |value|)` and are averaged; anything worse is
    /// rejected.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<GramMatrix, GramError> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(GramError::NotSquare);
            }
        }
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if !rows[i][j].is_finite() {
                    return Err(GramError::NonFinite { i, j });
                }
            }
        }
        for i in 0..n {
            for j in i..n {
                let upper = rows[i][j];
                let lower = rows[j][i];
                if (upper - lower).abs() > 1e-9 * (1.0 + upper.abs()) {
                    return Err(GramError::Asymmetric { i, j });
                }
                let v = 0.5 * (upper + lower);
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        Ok(GramMatrix { n, a })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }
}

/// Strictly ascending set of constraint indices (0-based in the API;
/// reports and file formats print them 1-based).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexSet {
    members: Vec<usize>,
}

impl IndexSet {
    /// # Panics
    /// Panics unless `members` is strictly ascending.
    pub fn new(members: Vec<usize>) -> IndexSet {
        assert!(
            members.windows(2).all(|w| w[0] < w[1]),
            "index set members must be strictly ascending, got {members:?}"
        );
        IndexSet { members }
    }

    pub fn empty() -> IndexSet {
        IndexSet { members: Vec::new() }
    }

    pub fn singleton(i: usize) -> IndexSet {
        IndexSet { members: vec![i] }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: usize) -> bool {
        self.members.binary_search(&a).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    /// Indices in `0..n` not in this set, ascending.
    pub fn complement(&self, n: usize) -> IndexSet {
        IndexSet {
            members: (0..n).filter(|i| !self.contains(*i)).collect(),
        }
    }

    /// Members with `j` removed; `j` must be present.
    pub fn without(&self, j: usize) -> IndexSet {
        debug_assert!(self.contains(j));
        IndexSet {
            members: self.members.iter().copied().filter(|&m| m != j).collect(),
        }
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, m) in self.members.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", m + 1)?;
        }
        write!(f, "}}")
    }
}

/// Sign factor of index `a` relative to set `I`: alternating in the rank
/// of `a` within `I` when `a` is a member, and `(-1)^(|I|+1)` otherwise.
/// These are exactly the cofactor signs in [`nu_in`] and [`nu_out`].
pub fn sign_factor(set: &IndexSet, a: usize) -> f64 {
    let parity = if set.contains(a) {
        set.members().iter().filter(|&&b| b <= a).count()
    } else {
        set.len() + 1
    };
    if parity % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Determinant of the submatrix of `g` with the given row and column sets
/// (both ascending), by elimination with partial pivoting. The 1x1 case
/// returns the entry directly.
pub fn subdet(g: &GramMatrix, rows: &IndexSet, cols: &IndexSet) -> f64 {
    assert_eq!(
        rows.len(),
        cols.len(),
        "subdeterminant needs equal row and column counts"
    );
    det_ordered(g, rows.members(), cols.members())
}

/// Determinant over explicitly ordered (not necessarily ascending) row and
/// column index lists. [`nu_out`] needs one column out of ascending order.
pub(crate) fn det_ordered(g: &GramMatrix, rows: &[usize], cols: &[usize]) -> f64 {
    assert_eq!(rows.len(), cols.len());
    let k = rows.len();
    for &r in rows {
        assert!(r < g.n(), "row index {r} out of bounds for n = {}", g.n());
    }
    for &c in cols {
        assert!(c < g.n(), "column index {c} out of bounds for n = {}", g.n());
    }
    if k == 0 {
        return 1.0;
    }
    if k == 1 {
        return g.get(rows[0], cols[0]);
    }
    let mut m = dense::Square::zeros(k);
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            m.set(i, j, g.get(r, c));
        }
    }
    dense::det(&m)
}

/// Unnormalized multipliers on the support: `nu_i = det(G_II) * v_i` where
/// `G_II v = w_I`, expanded as the cofactor sum
/// `nu_i = sum_{j in I} w_j s(j) s(i) det(G_{I\j, I\i})`
/// with `s = sign_factor(I, .)`. Singletons return `w_i` directly.
pub fn nu_in(g: &GramMatrix, w: &[f64], set: &IndexSet) -> Vec<f64> {
    assert!(!set.is_empty(), "nu_in needs a nonempty support");
    assert_eq!(w.len(), g.n(), "w must have one entry per constraint");
    if set.len() == 1 {
        return vec![w[set.members()[0]]];
    }
    set.iter()
        .map(|i| {
            let minor_cols = set.without(i);
            set.iter()
                .map(|j| {
                    let minor_rows = set.without(j);
                    w[j] * sign_factor(set, j)
                        * sign_factor(set, i)
                        * subdet(g, &minor_rows, &minor_cols)
                })
                .sum()
        })
        .collect()
}

/// Off-support feasibility indicator for `i_prime` not in `I`: the same
/// cofactor expansion extended by one row and column,
/// `nu_out = sum_{j in I + i'} w_j s(j) s(i') det(G_{I, (I + i') \ j})`,
/// where the minor for `j in I` keeps the `i'` column last. Equivalently
/// it is the bordered determinant
///
/// ```text
/// | G_II      w_I  |
/// | G_{i',I}  w_i' |
/// ```
///
/// and therefore equals `det(G_II)` times the residual of constraint `i'`
/// at the candidate point of support `I` (the residual identity). A value
/// <= 0 certifies the candidate satisfies constraint `i'`.
pub fn nu_out(g: &GramMatrix, w: &[f64], set: &IndexSet, i_prime: usize) -> f64 {
    assert!(
        !set.contains(i_prime),
        "nu_out index {i_prime} must lie outside the support"
    );
    assert_eq!(w.len(), g.n());
    let s_out = sign_factor(set, i_prime);
    // j = i' term: signs square to one and the minor is the full block.
    let mut acc = w[i_prime] * subdet(g, set, set);
    for j in set.iter() {
        let mut cols: Vec<usize> = set.without(j).members().to_vec();
        cols.push(i_prime);
        acc += w[j] * sign_factor(set, j) * s_out * det_ordered(g, set.members(), &cols);
    }
    acc
}

/// Numerical rank of `g` by greedy diagonally pivoted elimination: pivots
/// are accepted while the best remaining diagonal exceeds `tol_det`
/// relative to its original value. Supports larger than this cannot have
/// an invertible principal block, so the search caps its cardinality here.
pub fn rank_bound(g: &GramMatrix, tol_det: f64) -> usize {
    let n = g.n();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = g.get(i, j);
        }
    }
    let orig: Vec<f64> = (0..n).map(|i| g.get(i, i)).collect();
    let mut active: Vec<usize> = (0..n).filter(|&i| orig[i] > 0.0).collect();
    let mut rank = 0;
    while !active.is_empty() {
        let (pos, &k) = active
            .iter()
            .enumerate()
            .max_by(|(_, &x), (_, &y)| {
                let rx = a[x * n + x] / orig[x];
                let ry = a[y * n + y] / orig[y];
                rx.partial_cmp(&ry).expect("gram diagonals are finite")
            })
            .expect("active set is nonempty");
        let pivot = a[k * n + k];
        if pivot <= tol_det * orig[k] {
            break;
        }
        rank += 1;
        active.remove(pos);
        // Schur complement update on the remaining block.
        let col: Vec<f64> = active.iter().map(|&i| a[i * n + k]).collect();
        for (ii, &i) in active.iter().enumerate() {
            for &j in &active {
                a[i * n + j] -= col[ii] * a[k * n + j] / pivot;
            }
        }
    }
    rank
}
