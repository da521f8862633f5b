//! The certified projection search.
//!
//! To project `x` onto the intersection of halfspaces `<h|u_i> <= eta_i`,
//! the engine searches support sets `I` in increasing cardinality and, in
//! each tier, lexicographic order. A candidate `I` is accepted when
//!
//! 1. its Gram block `G_II` passes the determinant gate (normals of `I`
//!    are independent),
//! 2. the multipliers solving `G_II nu = w_I` are all strictly positive
//!    (`w_i = <x|u_i> - eta_i`), and
//! 3. the candidate point `x - sum_i nu_i u_i` satisfies every constraint
//!    outside `I`.
//!
//! The first accepted support yields the projection exactly (up to the
//! linear solve) together with a [`SupportCertificate`] that records the
//! numbers a verifier needs. Feasible inputs short-circuit with no
//! certificate. If no support is accepted, the search reports honest
//! diagnostics instead of a fabricated answer.
//!
//! Tiers are always evaluated in full and the lexicographically smallest
//! accepted support wins, so results (point, support, multipliers, and
//! counts) are identical for any worker count.

use crate::core::{Polyhedron, Vector};
use crate::dense;
use crate::gram::{rank_bound, subdet, GramMatrix, IndexSet};
use itertools::Itertools;
use std::fmt;
use thiserror::Error;

/// Tolerances and limits for the search. All fields are public; the
/// defaults are calibrated for problems with coordinates of order one.
#[derive(Debug, Clone)]
pub struct ProjectorConfig {
    /// Feasibility band: residual `r` passes as `r <= tol_feas * (1 + |eta|)`.
    pub tol_feas: f64,
    /// Multipliers must exceed this to count as strictly positive.
    pub tol_pos: f64,
    /// Determinant gate, relative to the product of squared normal
    /// lengths of the candidate support.
    pub tol_det: f64,
    /// Stationarity band used by verifiers: `tol_stat * (1 + |x|)`.
    pub tol_stat: f64,
    /// Optional cap on support cardinality (`None` = up to numerical rank).
    pub max_cardinality: Option<usize>,
    /// Worker threads for tier evaluation; 1 = sequential. Any width
    /// produces identical results.
    pub workers: usize,
    /// Hard cap on the number of halfspaces accepted for subset search.
    /// The search is exponential in the worst case; beyond this, use the
    /// iterative oracle instead or raise the cap knowingly.
    pub halfspace_cap: usize,
}

impl Default for ProjectorConfig {
    fn default() -> Self {
        ProjectorConfig {
            tol_feas: 1e-9,
            tol_pos: 1e-12,
            tol_det: 1e-10,
            tol_stat: 1e-9,
            max_cardinality: None,
            workers: 1,
            halfspace_cap: 24,
        }
    }
}

/// Evidence for an accepted support: everything a checker needs to
/// re-derive the projection from raw problem data.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportCertificate {
    /// Accepted constraint indices, ascending.
    pub support: IndexSet,
    /// Multipliers in support order, all strictly positive.
    pub multipliers: Vec<f64>,
    /// Determinant of the support's Gram block (positive).
    pub det_gii: f64,
    /// Largest off-support residual at the accepted point; `None` when
    /// every constraint is in the support.
    pub residual_bound: Option<f64>,
}

/// Counts of work done by the search. Counts depend only on the problem
/// and configuration, not on the worker count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Candidate supports evaluated (including gated ones).
    pub subsets_examined: u64,
    /// Candidates whose Gram block failed the determinant gate.
    pub singular_skipped: u64,
    /// Candidates rejected for a nonpositive multiplier.
    pub solves_rejected: u64,
}

/// Projection outcome: the point, the certificate (absent iff the input
/// was already feasible), and search statistics.
#[derive(Debug, Clone)]
pub struct ProjectionResult {
    pub point: Vector,
    pub certificate: Option<SupportCertificate>,
    pub stats: SearchStats,
}

/// The candidate that came closest to acceptance: it had positive
/// multipliers but violated some off-support constraint.
#[derive(Debug, Clone)]
pub struct NearMiss {
    pub support: IndexSet,
    pub max_violation: f64,
}

/// What the failed search saw, for error reporting.
#[derive(Debug, Clone)]
pub struct SearchDiagnostics {
    pub stats: SearchStats,
    pub near_miss: Option<NearMiss>,
}

impl fmt::Display for SearchDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "examined {} supports ({} singular, {} with nonpositive multipliers)",
            self.stats.subsets_examined, self.stats.singular_skipped, self.stats.solves_rejected
        )?;
        if let Some(nm) = &self.near_miss {
            write!(
                f,
                "; closest candidate had support {} with max violation {:e}",
                nm.support, nm.max_violation
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ProjectError {
    #[error("no support set produced a certified projection: {0}")]
    NoCertificate(SearchDiagnostics),
    #[error("{n} halfspaces exceed the subset-search cap of {cap}; raise `halfspace_cap` explicitly or use the iterative oracle for instances this large")]
    TooManyHalfspaces { n: usize, cap: usize },
    #[error("support {support} passed the determinant gate but elimination found it singular; determinant and solve tolerances are inconsistent")]
    SingularSystem { support: IndexSet },
    #[error("support reduction found no independent subset with positive coefficients")]
    ReductionFailed,
}

/// Multipliers for the candidate support, or `None` when some multiplier
/// fails strict positivity. The caller must have gated `det(G_II)` first;
/// a singular block here is reported as an inconsistency, not skipped.
pub fn solve_support(
    g: &GramMatrix,
    w: &[f64],
    set: &IndexSet,
    tol_pos: f64,
) -> Result<Option<Vec<f64>>, ProjectError> {
    assert_eq!(w.len(), g.n());
    let k = set.len();
    assert!(k > 0, "solve_support needs a nonempty support");
    let mut m = dense::Square::zeros(k);
    for (a, i) in set.iter().enumerate() {
        for (b, j) in set.iter().enumerate() {
            m.set(a, b, g.get(i, j));
        }
    }
    let rhs: Vec<f64> = set.iter().map(|i| w[i]).collect();
    let lu = dense::factor(&m).ok_or_else(|| ProjectError::SingularSystem {
        support: set.clone(),
    })?;
    let nu = lu.solve(&rhs);
    if nu.iter().all(|&v| v > tol_pos) {
        Ok(Some(nu))
    } else {
        Ok(None)
    }
}

/// The candidate point of a support: `x - sum_i nu_i u_i`.
pub fn candidate_point(p: &Polyhedron, x: &Vector, set: &IndexSet, multipliers: &[f64]) -> Vector {
    assert_eq!(set.len(), multipliers.len());
    let mut point = x.clone();
    for (k, i) in set.iter().enumerate() {
        point.axpy(-multipliers[k], p.halfspace(i).normal());
    }
    point
}

/// Builds the candidate point and checks every off-support constraint
/// against the relative band. Returns the point and the largest
/// off-support residual on success, `None` on any violation.
pub fn feasibility_check(
    p: &Polyhedron,
    x: &Vector,
    set: &IndexSet,
    multipliers: &[f64],
    tol_feas: f64,
) -> Option<(Vector, Option<f64>)> {
    let point = candidate_point(p, x, set, multipliers);
    let mut bound: Option<f64> = None;
    for i_prime in 0..p.len() {
        if set.contains(i_prime) {
            continue;
        }
        let hs = p.halfspace(i_prime);
        let r = hs.residual(&point);
        if r > tol_feas * (1.0 + hs.offset().abs()) {
            return None;
        }
        bound = Some(bound.map_or(r, |b: f64| b.max(r)));
    }
    Some((point, bound))
}

enum CandidateOutcome {
    Singular,
    Rejected,
    Infeasible { support: IndexSet, max_violation: f64 },
    Accepted(Box<Accepted>),
    Failed(ProjectError),
}

struct Accepted {
    support: IndexSet,
    multipliers: Vec<f64>,
    det_gii: f64,
    point: Option<Vector>,
    residual_bound: Option<f64>,
}

struct TierFold {
    stats: SearchStats,
    near_miss: Option<NearMiss>,
    accepted: Option<Accepted>,
    failed: Option<ProjectError>,
}

impl TierFold {
    fn empty() -> Self {
        TierFold { stats: SearchStats::default(), near_miss: None, accepted: None, failed: None }
    }

    fn absorb(mut self, outcome: CandidateOutcome) -> Self {
        self.stats.subsets_examined += 1;
        match outcome {
            CandidateOutcome::Singular => self.stats.singular_skipped += 1,
            CandidateOutcome::Rejected => self.stats.solves_rejected += 1,
            CandidateOutcome::Infeasible { support, max_violation } => {
                let better = self
                    .near_miss
                    .as_ref()
                    .map_or(true, |nm| max_violation < nm.max_violation);
                if better {
                    self.near_miss = Some(NearMiss { support, max_violation });
                }
            }
            CandidateOutcome::Accepted(a) => {
                let keep = self
                    .accepted
                    .as_ref()
                    .map_or(true, |cur| a.support < cur.support);
                if keep {
                    self.accepted = Some(*a);
                }
            }
            CandidateOutcome::Failed(e) => {
                if self.failed.is_none() {
                    self.failed = Some(e);
                }
            }
        }
        self
    }

    fn merge(mut self, other: TierFold) -> Self {
        self.stats.subsets_examined += other.stats.subsets_examined;
        self.stats.singular_skipped += other.stats.singular_skipped;
        self.stats.solves_rejected += other.stats.solves_rejected;
        match (&self.near_miss, other.near_miss) {
            (None, o) => self.near_miss = o,
            (Some(a), Some(b)) if b.max_violation < a.max_violation => {
                self.near_miss = Some(b);
            }
            _ => {}
        }
        match (&self.accepted, other.accepted) {
            (None, o) => self.accepted = o,
            (Some(a), Some(b)) if b.support < a.support => self.accepted = Some(b),
            _ => {}
        }
        if self.failed.is_none() {
            self.failed = other.failed;
        }
        self
    }
}

/// Evaluates one tier fully (never early-exits), sequentially or on a
/// worker pool; the fold is associative, so results are width-independent.
fn run_tiers<F>(
    n: usize,
    max_card: usize,
    workers: usize,
    eval: F,
) -> Result<(Option<Accepted>, SearchStats, Option<NearMiss>), ProjectError>
where
    F: Fn(&IndexSet) -> CandidateOutcome + Sync,
{
    let mut stats = SearchStats::default();
    let mut near_miss: Option<NearMiss> = None;
    for card in 1..=max_card.min(n) {
        let tier: Vec<IndexSet> = (0..n)
            .combinations(card)
            .map(IndexSet::new)
            .collect();
        let fold = if workers > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .expect("failed to build worker pool");
            pool.install(|| {
                use rayon::prelude::*;
                tier.par_iter()
                    .fold(TierFold::empty, |acc, set| acc.absorb(eval(set)))
                    .reduce(TierFold::empty, TierFold::merge)
            })
        } else {
            tier.iter()
                .fold(TierFold::empty(), |acc, set| acc.absorb(eval(set)))
        };
        if let Some(e) = fold.failed {
            return Err(e);
        }
        stats.subsets_examined += fold.stats.subsets_examined;
        stats.singular_skipped += fold.stats.singular_skipped;
        stats.solves_rejected += fold.stats.solves_rejected;
        match (&near_miss, fold.near_miss) {
            (None, o) => near_miss = o,
            (Some(a), Some(b)) if b.max_violation < a.max_violation => near_miss = Some(b),
            _ => {}
        }
        if let Some(a) = fold.accepted {
            return Ok((Some(a), stats, near_miss));
        }
    }
    Ok((None, stats, near_miss))
}

fn det_gate(g: &GramMatrix, set: &IndexSet, tol_det: f64) -> Option<f64> {
    let d = subdet(g, set, set);
    let scale: f64 = set.iter().map(|i| g.get(i, i)).product();
    if d > tol_det * scale {
        Some(d)
    } else {
        None
    }
}

/// Projects `x` onto the polyhedron and certifies the result.
///
/// Returns the point unchanged (and no certificate) when `x` is already
/// feasible within `cfg.tol_feas`. Otherwise runs the support search
/// described in the module docs. Errors are honest: the halfspace cap
/// refuses oversized instances up front, and a failed search reports what
/// it examined rather than guessing.
pub fn project(
    p: &Polyhedron,
    x: &Vector,
    cfg: &ProjectorConfig,
) -> Result<ProjectionResult, ProjectError> {
    assert_eq!(x.dim(), p.dim(), "point and polyhedron dimensions differ");
    let n = p.len();
    if n > cfg.halfspace_cap {
        return Err(ProjectError::TooManyHalfspaces { n, cap: cfg.halfspace_cap });
    }
    if p.contains(x, cfg.tol_feas) {
        return Ok(ProjectionResult {
            point: x.clone(),
            certificate: None,
            stats: SearchStats::default(),
        });
    }
    let g = GramMatrix::build(p);
    let w: Vec<f64> = p.residuals(x).values().to_vec();
    let max_card = rank_bound(&g, cfg.tol_det)
        .min(cfg.max_cardinality.unwrap_or(usize::MAX));

    let eval = |set: &IndexSet| -> CandidateOutcome {
        let Some(det_gii) = det_gate(&g, set, cfg.tol_det) else {
            return CandidateOutcome::Singular;
        };
        match solve_support(&g, &w, set, cfg.tol_pos) {
            Err(e) => CandidateOutcome::Failed(e),
            Ok(None) => CandidateOutcome::Rejected,
            Ok(Some(multipliers)) => {
                let point = candidate_point(p, x, set, &multipliers);
                let mut bound: Option<f64> = None;
                let mut worst: f64 = f64::NEG_INFINITY;
                let mut violated = false;
                for i_prime in 0..n {
                    if set.contains(i_prime) {
                        continue;
                    }
                    let hs = p.halfspace(i_prime);
                    let r = hs.residual(&point);
                    worst = worst.max(r);
                    if r > cfg.tol_feas * (1.0 + hs.offset().abs()) {
                        violated = true;
                    } else {
                        bound = Some(bound.map_or(r, |b: f64| b.max(r)));
                    }
                }
                if violated {
                    CandidateOutcome::Infeasible {
                        support: set.clone(),
                        max_violation: worst,
                    }
                } else {
                    CandidateOutcome::Accepted(Box::new(Accepted {
                        support: set.clone(),
                        multipliers,
                        det_gii,
                        point: Some(point),
                        residual_bound: if set.len() == n { None } else { bound },
                    }))
                }
            }
        }
    };

    let (accepted, stats, near_miss) = run_tiers(n, max_card, cfg.workers, eval)?;
    match accepted {
        Some(a) => Ok(ProjectionResult {
            point: a.point.expect("projection search always carries the point"),
            certificate: Some(SupportCertificate {
                support: a.support,
                multipliers: a.multipliers,
                det_gii: a.det_gii,
                residual_bound: a.residual_bound,
            }),
            stats,
        }),
        None => Err(ProjectError::NoCertificate(SearchDiagnostics { stats, near_miss })),
    }
}

/// Outcome of the Gram-only search: either the input was feasible, or a
/// support with its multipliers and block determinant.
#[derive(Debug, Clone, PartialEq)]
pub enum GramProjection {
    Feasible,
    Support {
        support: IndexSet,
        multipliers: Vec<f64>,
        det_gii: f64,
    },
}

/// Support search from Gram data alone: `g` holds the pairwise inner
/// products of the normals and `w_i = <x|u_i> - eta_i`. This is the entry
/// point for callers whose vectors live elsewhere (any inner-product
/// space); nothing here touches coordinates. Feasibility of candidates is
/// decided through the residual identity
/// `r_i' = w_i' - sum_k nu_k G[k][i']`, and all bands are absolute
/// (`<= tol`), since no offsets are available for relative scaling.
pub fn project_by_gram(
    g: &GramMatrix,
    w: &[f64],
    cfg: &ProjectorConfig,
) -> Result<GramProjection, ProjectError> {
    let n = g.n();
    assert_eq!(w.len(), n, "w must have one entry per constraint");
    if n > cfg.halfspace_cap {
        return Err(ProjectError::TooManyHalfspaces { n, cap: cfg.halfspace_cap });
    }
    if w.iter().all(|&wi| wi <= cfg.tol_feas) {
        return Ok(GramProjection::Feasible);
    }
    let max_card = rank_bound(g, cfg.tol_det)
        .min(cfg.max_cardinality.unwrap_or(usize::MAX));

    let eval = |set: &IndexSet| -> CandidateOutcome {
        let Some(det_gii) = det_gate(g, set, cfg.tol_det) else {
            return CandidateOutcome::Singular;
        };
        match solve_support(g, w, set, cfg.tol_pos) {
            Err(e) => CandidateOutcome::Failed(e),
            Ok(None) => CandidateOutcome::Rejected,
            Ok(Some(multipliers)) => {
                let mut worst = f64::NEG_INFINITY;
                let mut violated = false;
                for i_prime in (0..n).filter(|i| !set.contains(*i)) {
                    let r = w[i_prime]
                        - set
                            .iter()
                            .enumerate()
                            .map(|(k, i)| multipliers[k] * g.get(i, i_prime))
                            .sum::<f64>();
                    worst = worst.max(r);
                    if r > cfg.tol_feas {
                        violated = true;
                    }
                }
                if violated {
                    CandidateOutcome::Infeasible {
                        support: set.clone(),
                        max_violation: worst,
                    }
                } else {
                    CandidateOutcome::Accepted(Box::new(Accepted {
                        support: set.clone(),
                        multipliers,
                        det_gii,
                        point: None,
                        residual_bound: None,
                    }))
                }
            }
        }
    };

    let (accepted, stats, near_miss) = run_tiers(n, max_card, cfg.workers, eval)?;
    match accepted {
        Some(a) => Ok(GramProjection::Support {
            support: a.support,
            multipliers: a.multipliers,
            det_gii: a.det_gii,
        }),
        None => Err(ProjectError::NoCertificate(SearchDiagnostics { stats, near_miss })),
    }
}

/// Rewrites a nonnegative combination `s = sum_i c_i u_i` over a smaller
/// support with linearly independent normals and strictly positive
/// coefficients. Searches subsets in increasing cardinality and accepts
/// the first whose normal equations reproduce `s` exactly (within the
/// default feasibility band). A zero combination reduces to the empty set.
pub fn reduce_support(
    normals: &[Vector],
    coefficients: &[f64],
) -> Result<(IndexSet, Vec<f64>), ProjectError> {
    assert_eq!(normals.len(), coefficients.len());
    assert!(
        coefficients.iter().all(|&c| c >= 0.0),
        "support reduction expects nonnegative coefficients"
    );
    let cfg = ProjectorConfig::default();
    let n = normals.len();
    assert!(n > 0, "support reduction needs at least one normal");
    let dim = normals[0].dim();
    let mut s = normals[0].scale(coefficients[0]);
    for i in 1..n {
        s.axpy(coefficients[i], &normals[i]);
    }
    if s.norm() == 0.0 {
        return Ok((IndexSet::empty(), Vec::new()));
    }
    // Gram data of the normals themselves.
    let hs: Vec<crate::core::Halfspace> = normals
        .iter()
        .map(|u| crate::core::Halfspace::new(u.clone(), 0.0).expect("nonzero normal"))
        .collect();
    let p = Polyhedron::new(hs).expect("nonempty normal list");
    let g = GramMatrix::build(&p);
    let s_norm = s.norm();

    for card in 1..=n.min(dim) {
        for combo in (0..n).combinations(card) {
            let set = IndexSet::new(combo);
            if det_gate(&g, &set, cfg.tol_det).is_none() {
                continue;
            }
            let rhs: Vec<f64> = set.iter().map(|i| s.inner(&normals[i])).collect();
            let k = set.len();
            let mut m = dense::Square::zeros(k);
            for (a, i) in set.iter().enumerate() {
                for (b, j) in set.iter().enumerate() {
                    m.set(a, b, g.get(i, j));
                }
            }
            let Some(coeffs) = dense::solve(&m, &rhs) else {
                continue;
            };
            if !coeffs.iter().all(|&c| c > cfg.tol_pos) {
                continue;
            }
            let mut recon = Vector::from_slice(&vec![0.0; dim]);
            for (a, i) in set.iter().enumerate() {
                recon.axpy(coeffs[a], &normals[i]);
            }
            if recon.distance(&s) <= cfg.tol_feas * (1.0 + s_norm) {
                return Ok((set, coeffs));
            }
        }
    }
    Err(ProjectError::ReductionFailed)
}
