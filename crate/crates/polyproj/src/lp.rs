//! Coordinatewise halfspaces in the sequence spaces `l_p`, `p > 1`.
//!
//! Outside the Hilbert case `p = 2` there is no inner product, so the
//! argument runs through duality: the derivative of `t -> |t|^p` is the
//! signed power `|t|^(p-2) t` (extended by continuity with value 0 at
//! `t = 0` when `p < 2`), and first-order optimality of a candidate
//! projection is phrased through sums of such terms against the
//! constraint coefficients. Two entry points matter:
//!
//! - [`lp_clip_project`]: for constraints that each touch a single
//!   coordinate (`delta_k x_k <= eta_k`, `|delta_k| = 1`), the projection
//!   in every `l_p` is coordinatewise clipping, independent of `p`.
//! - [`verify_candidate`]: for a finite system of finitely supported
//!   functionals, checks whether a claimed projection satisfies the
//!   first-order conditions on some active subset. It is a verifier, not
//!   a solver: it searches subsets of the active set and accepts if one
//!   passes every condition.

use crate::dense;
use crate::gram::{sign_factor, IndexSet};
use crate::projector::ProjectorConfig;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("exponent p must be finite and > 1, got {0}")]
    InvalidExponent(f64),
    #[error("coordinate {index} is not finite")]
    NonFiniteCoordinate { index: usize },
    #[error("constraint sign must be +1 or -1, got {got}")]
    BadSign { got: f64 },
    #[error("offset for coordinate {coord} is not finite")]
    NonFiniteOffset { coord: usize },
    #[error("coordinate {coord} is constrained twice")]
    DuplicateCoordinate { coord: usize },
    #[error("constraint index {index} appears twice")]
    DuplicateConstraint { index: usize },
    #[error("functional {index} has no nonzero coefficient")]
    EmptyFunctional { index: usize },
}

/// Finitely supported vector in `l_p`: explicit leading coordinates with
/// an implicit zero tail.
#[derive(Debug, Clone, PartialEq)]
pub struct LpVector {
    coords: Vec<f64>,
    p: f64,
}

impl LpVector {
    pub fn new(coords: Vec<f64>, p: f64) -> Result<Self, LpError> {
        if !(p.is_finite() && p > 1.0) {
            return Err(LpError::InvalidExponent(p));
        }
        for (index, c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(LpError::NonFiniteCoordinate { index });
            }
        }
        Ok(LpVector { coords, p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Number of explicitly stored coordinates.
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Coordinate `k`, with the implicit zero tail.
    pub fn get(&self, k: usize) -> f64 {
        self.coords.get(k).copied().unwrap_or(0.0)
    }

    pub fn norm_p(&self) -> f64 {
        self.coords
            .iter()
            .map(|c| c.abs().powf(self.p))
            .sum::<f64>()
            .powf(1.0 / self.p)
    }

    /// `l_p` distance to another vector with the same exponent.
    pub fn distance_p(&self, other: &LpVector) -> f64 {
        assert_eq!(self.p, other.p, "distance needs a shared exponent");
        let len = self.len().max(other.len());
        (0..len)
            .map(|k| (self.get(k) - other.get(k)).abs().powf(self.p))
            .sum::<f64>()
            .powf(1.0 / self.p)
    }
}

/// The derivative weight of `t -> |t|^p` at `t`, i.e. `|t|^(p-2) t`,
/// extended by continuity to 0 at the origin (needed for p < 2, where the
/// naive expression is 0 * infinity).
pub fn signed_power(t: f64, p: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t.abs().powf(p - 2.0) * t
    }
}

/// One-sided derivative of `||u + t v - x||_p^p / p` at `t = 0`: the sum
/// `sum_k |u_k - x_k|^(p-2) (u_k - x_k) v_k` over the explicit supports.
/// At `p = 2` this is the plain inner product `<u - x | v>`.
pub fn directional_derivative(u: &LpVector, v: &LpVector, x: &LpVector) -> f64 {
    assert_eq!(u.p(), v.p(), "directional derivative needs a shared exponent");
    assert_eq!(u.p(), x.p(), "directional derivative needs a shared exponent");
    let len = u.len().max(v.len()).max(x.len());
    (0..len)
        .map(|k| signed_power(u.get(k) - x.get(k), u.p()) * v.get(k))
        .sum()
}

/// Constraint `sign * x_coord <= offset` on a single coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinateConstraint {
    pub coord: usize,
    /// Must be exactly +1 or -1.
    pub sign: f64,
    pub offset: f64,
}

/// A set of single-coordinate halfspaces, at most one per coordinate.
/// Each constraint alone is satisfiable, and distinct constraints touch
/// distinct coordinates, so the feasible set is never empty.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateHalfspaceSystem {
    constraints: Vec<CoordinateConstraint>,
}

impl CoordinateHalfspaceSystem {
    pub fn new(mut constraints: Vec<CoordinateConstraint>) -> Result<Self, LpError> {
        for c in &constraints {
            if c.sign != 1.0 && c.sign != -1.0 {
                return Err(LpError::BadSign { got: c.sign });
            }
            if !c.offset.is_finite() {
                return Err(LpError::NonFiniteOffset { coord: c.coord });
            }
        }
        constraints.sort_by_key(|c| c.coord);
        for w in constraints.windows(2) {
            if w[0].coord == w[1].coord {
                return Err(LpError::DuplicateCoordinate { coord: w[0].coord });
            }
        }
        Ok(CoordinateHalfspaceSystem { constraints })
    }

    pub fn constraints(&self) -> &[CoordinateConstraint] {
        &self.constraints
    }

    pub fn is_satisfied(&self, x: &LpVector, tol: f64) -> bool {
        self.constraints
            .iter()
            .all(|c| c.sign * x.get(c.coord) - c.offset <= tol * (1.0 + c.offset.abs()))
    }
}

/// Projection onto a coordinatewise system in any `l_p`, `p > 1`: each
/// violated constraint clips its coordinate to the boundary value
/// `sign * offset`, everything else is untouched (bitwise). The output
/// extends the input with explicit zeros if a constrained coordinate lies
/// beyond the stored length.
pub fn lp_clip_project(system: &CoordinateHalfspaceSystem, x: &LpVector) -> LpVector {
    let needed = system
        .constraints()
        .iter()
        .map(|c| c.coord + 1)
        .max()
        .unwrap_or(0)
        .max(x.len());
    let mut coords: Vec<f64> = (0..needed).map(|k| x.get(k)).collect();
    for c in system.constraints() {
        if c.sign * coords[c.coord] >= c.offset {
            // `+ 0.0` keeps a zero boundary from surfacing as IEEE -0.0
            // when sign is negative; every other value is unchanged.
            coords[c.coord] = c.sign * c.offset + 0.0;
        }
    }
    LpVector::new(coords, x.p()).expect("clipping keeps coordinates finite")
}

/// A finitely supported functional: coefficients by coordinate, plus the
/// constraint offset. The constraint reads `sum_k lambda_k x_k <= offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalRow {
    /// Constraint index. Index alignment matters: the verifier pairs
    /// constraint `i` with coordinate `i` when it builds square blocks,
    /// so systems converted from coordinate constraints keep each
    /// constraint's index equal to its coordinate.
    pub index: usize,
    /// (coordinate, coefficient) pairs; sorted, distinct, at least one
    /// nonzero.
    pub coeffs: Vec<(usize, f64)>,
    pub offset: f64,
}

/// Finite system of finitely supported functionals in `l_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseFunctionalSystem {
    rows: Vec<FunctionalRow>,
}

impl SparseFunctionalSystem {
    pub fn new(mut rows: Vec<FunctionalRow>) -> Result<Self, LpError> {
        for row in &mut rows {
            row.coeffs.sort_by_key(|&(k, _)| k);
            for w in row.coeffs.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(LpError::DuplicateCoordinate { coord: w[0].0 });
                }
            }
            for &(index, c) in &row.coeffs {
                if !c.is_finite() {
                    return Err(LpError::NonFiniteCoordinate { index });
                }
            }
            if !row.offset.is_finite() {
                return Err(LpError::NonFiniteOffset { coord: row.index });
            }
            if row.coeffs.iter().all(|&(_, c)| c == 0.0) {
                return Err(LpError::EmptyFunctional { index: row.index });
            }
        }
        rows.sort_by_key(|r| r.index);
        for w in rows.windows(2) {
            if w[0].index == w[1].index {
                return Err(LpError::DuplicateConstraint { index: w[0].index });
            }
        }
        Ok(SparseFunctionalSystem { rows })
    }

    /// Coordinate constraints as functionals, preserving the index
    /// alignment (constraint index = constrained coordinate).
    pub fn from_coordinates(system: &CoordinateHalfspaceSystem) -> SparseFunctionalSystem {
        let rows = system
            .constraints()
            .iter()
            .map(|c| FunctionalRow {
                index: c.coord,
                coeffs: vec![(c.coord, c.sign)],
                offset: c.offset,
            })
            .collect();
        SparseFunctionalSystem::new(rows).expect("coordinate constraints are valid functionals")
    }

    pub fn rows(&self) -> &[FunctionalRow] {
        &self.rows
    }

    fn row(&self, index: usize) -> &FunctionalRow {
        let pos = self
            .rows
            .binary_search_by_key(&index, |r| r.index)
            .expect("constraint index present");
        &self.rows[pos]
    }

    /// Coefficient of constraint `i` on coordinate `k` (0 off support).
    pub fn lambda(&self, i: usize, k: usize) -> f64 {
        self.row(i)
            .coeffs
            .binary_search_by_key(&k, |&(c, _)| c)
            .map(|pos| self.row(i).coeffs[pos].1)
            .unwrap_or(0.0)
    }

    pub fn value(&self, i: usize, x: &LpVector) -> f64 {
        self.row(i)
            .coeffs
            .iter()
            .map(|&(k, c)| c * x.get(k))
            .sum()
    }

    /// Sorted union of the coordinate supports of all functionals. Its
    /// complement is the set of coordinates no constraint can see.
    pub fn support_union(&self) -> Vec<usize> {
        let mut coords: Vec<usize> = self
            .rows
            .iter()
            .flat_map(|r| r.coeffs.iter().map(|&(k, _)| k))
            .collect();
        coords.sort_unstable();
        coords.dedup();
        coords
    }
}

/// Conditions checked by [`verify_candidate`], named by what they assert.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpCondition {
    /// The candidate satisfies every constraint.
    Feasibility,
    /// Active constraints reproduce the candidate coordinates through the
    /// Cramer formula on the active block.
    ActiveSystem,
    /// The dual multipliers on the active block are strictly positive.
    Positivity,
    /// Off-support derivative balance on constrained coordinates outside
    /// the active block.
    Gradient,
    /// Coordinates no constraint sees must be untouched.
    Tail,
}

impl fmt::Display for LpCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            LpCondition::Feasibility => "feasibility",
            LpCondition::ActiveSystem => "active-system",
            LpCondition::Positivity => "positivity",
            LpCondition::Gradient => "gradient",
            LpCondition::Tail => "tail",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone)]
pub struct LpFailure {
    pub condition: LpCondition,
    /// Constraint or coordinate index, depending on the condition.
    pub index: Option<usize>,
    pub magnitude: f64,
}

impl fmt::Display for LpFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{}@{}: {:e}", self.condition, i + 1, self.magnitude),
            None => write!(f, "{}: {:e}", self.condition, self.magnitude),
        }
    }
}

/// Verdict of [`verify_candidate`]: accepted iff some subset of the
/// active set passes every condition; `failures` then stays empty. On
/// rejection, `failures` reports the best attempt (fewest failures).
#[derive(Debug, Clone)]
pub struct CandidateVerdict {
    pub accepted_support: Option<IndexSet>,
    pub failures: Vec<LpFailure>,
}

impl CandidateVerdict {
    pub fn accepted(&self) -> bool {
        self.failures.is_empty() && self.accepted_support.is_some()
    }
}

impl fmt::Display for CandidateVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.accepted_support {
            Some(set) => write!(f, "ACCEPT (support {set})"),
            None => {
                f.write_str("REJECT (")?;
                for (k, failure) in self.failures.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{failure}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn block_det(system: &SparseFunctionalSystem, rows: &[usize], cols: &[usize]) -> f64 {
    assert_eq!(rows.len(), cols.len());
    let k = rows.len();
    if k == 0 {
        return 1.0;
    }
    let mut m = dense::Square::zeros(k);
    for (a, &i) in rows.iter().enumerate() {
        for (b, &c) in cols.iter().enumerate() {
            m.set(a, b, system.lambda(i, c));
        }
    }
    dense::det(&m)
}

/// First-order verification of a claimed projection `x_bar` of `x` onto
/// the feasible set of `system` in `l_p`.
///
/// The verifier checks feasibility and the tail first, then searches the
/// subsets `I` of the active set (the square block pairs constraint `i`
/// with coordinate `i`) for one with `det L_II` past the gate such that:
///
/// - the active equations reproduce the candidate coordinates on `I`
///   through the Cramer cofactor formula with the off-block contributions
///   folded into the offsets,
/// - the multipliers solving the transposed block against the signed
///   powers `-|x_bar_k - x_k|^(p-2) (x_bar_k - x_k)` are strictly
///   positive, and
/// - on every constrained coordinate outside `I`, the signed power
///   balances the multiplier combination of the coefficients exactly.
///
/// The empty subset is allowed; it accepts exactly the case `x_bar = x`
/// (a feasible input). Degenerate contacts (clipped with zero movement)
/// are handled by the subset search: the zero-multiplier constraint
/// drops out of `I` and its coordinate is covered by the gradient
/// condition instead.
pub fn verify_candidate(
    system: &SparseFunctionalSystem,
    x: &LpVector,
    x_bar: &LpVector,
    cfg: &ProjectorConfig,
) -> CandidateVerdict {
    assert_eq!(x.p(), x_bar.p(), "candidate must share the exponent of x");
    let p = x.p();
    let tol_act = cfg.tol_feas;

    // Feasibility of the candidate, constraint by constraint.
    let mut feasibility_failures = Vec::new();
    for row in system.rows() {
        let r = system.value(row.index, x_bar) - row.offset;
        if r > cfg.tol_feas * (1.0 + row.offset.abs()) {
            feasibility_failures.push(LpFailure {
                condition: LpCondition::Feasibility,
                index: Some(row.index),
                magnitude: r,
            });
        }
    }
    if !feasibility_failures.is_empty() {
        return CandidateVerdict { accepted_support: None, failures: feasibility_failures };
    }

    // Tail: coordinates outside every functional support must not move.
    let union = system.support_union();
    let len = x.len().max(x_bar.len());
    for k in 0..len {
        if union.binary_search(&k).is_ok() {
            continue;
        }
        let gap = (x_bar.get(k) - x.get(k)).abs();
        if gap > cfg.tol_stat * (1.0 + x.get(k).abs()) {
            return CandidateVerdict {
                accepted_support: None,
                failures: vec![LpFailure {
                    condition: LpCondition::Tail,
                    index: Some(k),
                    magnitude: gap,
                }],
            };
        }
    }

    // Active constraints at the candidate.
    let active: Vec<usize> = system
        .rows()
        .iter()
        .filter(|row| {
            (system.value(row.index, x_bar) - row.offset).abs()
                <= tol_act * (1.0 + row.offset.abs())
        })
        .map(|row| row.index)
        .collect();

    let mut best: Option<Vec<LpFailure>> = None;
    let mut consider = |failures: Vec<LpFailure>| {
        let better = best.as_ref().map_or(true, |b| failures.len() < b.len());
        if better {
            best = Some(failures);
        }
    };

    for card in 0..=active.len() {
        for combo in itertools::Itertools::combinations(active.iter().copied(), card) {
            let set = IndexSet::new(combo);
            // Determinant gate on the square block, scaled by row maxima.
            let det = block_det(system, set.members(), set.members());
            let scale: f64 = set
                .iter()
                .map(|i| {
                    set.iter()
                        .map(|k| system.lambda(i, k).abs())
                        .fold(0.0_f64, f64::max)
                })
                .product();
            if det.abs() <= cfg.tol_det * scale || scale == 0.0 {
                continue;
            }
            let mut failures = Vec::new();

            // Offsets with the off-block coordinates folded in:
            // eta~_i = eta_i - sum_{j not in I} lambda_j^i x_bar_j.
            let eta_tilde: Vec<f64> = set
                .iter()
                .map(|i| {
                    let in_block: f64 =
                        set.iter().map(|k| system.lambda(i, k) * x_bar.get(k)).sum();
                    system.row(i).offset - (system.value(i, x_bar) - in_block)
                })
                .collect();

            // Active system via the Cramer cofactor expansion.
            for i in set.iter() {
                let minor_cols: Vec<usize> =
                    set.iter().filter(|&c| c != i).collect();
                let mut acc = 0.0;
                for (kpos, k) in set.iter().enumerate() {
                    let minor_rows: Vec<usize> =
                        set.iter().filter(|&r| r != k).collect();
                    acc += eta_tilde[kpos]
                        * sign_factor(&set, k)
                        * sign_factor(&set, i)
                        * block_det(system, &minor_rows, &minor_cols);
                }
                let formula = acc / det;
                let gap = (x_bar.get(i) - formula).abs();
                if gap > cfg.tol_stat * (1.0 + x_bar.get(i).abs()) {
                    failures.push(LpFailure {
                        condition: LpCondition::ActiveSystem,
                        index: Some(i),
                        magnitude: gap,
                    });
                }
            }

            // Multipliers from the transposed block against the signed
            // powers of the movement.
            let k_len = set.len();
            let mut transposed = dense::Square::zeros(k_len);
            for (a, k) in set.iter().enumerate() {
                for (b, i) in set.iter().enumerate() {
                    transposed.set(a, b, system.lambda(i, k));
                }
            }
            let xi: Vec<f64> = set
                .iter()
                .map(|k| -signed_power(x_bar.get(k) - x.get(k), p))
                .collect();
            let Some(nu) = dense::solve(&transposed, &xi) else {
                continue;
            };
            for (pos, i) in set.iter().enumerate() {
                if nu[pos] <= cfg.tol_pos {
                    failures.push(LpFailure {
                        condition: LpCondition::Positivity,
                        index: Some(i),
                        magnitude: nu[pos],
                    });
                }
            }

            // Gradient balance on constrained coordinates outside the
            // block: |x_bar_j - x_j|^(p-2)(x_bar_j - x_j) + sum_i
            // lambda_j^i nu_i = 0.
            for &j in &union {
                if set.contains(j) {
                    continue;
                }
                let lhs = signed_power(x_bar.get(j) - x.get(j), p);
                let rhs: f64 = set
                    .iter()
                    .enumerate()
                    .map(|(pos, i)| system.lambda(i, j) * nu[pos])
                    .sum();
                let gap = (lhs + rhs).abs();
                if gap > cfg.tol_stat * (1.0 + lhs.abs() + rhs.abs()) {
                    failures.push(LpFailure {
                        condition: LpCondition::Gradient,
                        index: Some(j),
                        magnitude: gap,
                    });
                }
            }

            if failures.is_empty() {
                return CandidateVerdict { accepted_support: Some(set), failures };
            }
            consider(failures);
        }
    }

    CandidateVerdict {
        accepted_support: None,
        failures: best.unwrap_or_else(|| {
            vec![LpFailure {
                condition: LpCondition::ActiveSystem,
                index: None,
                magnitude: f64::INFINITY,
            }]
        }),
    }
}
