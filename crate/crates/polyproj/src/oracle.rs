//! Independent verification machinery.
//!
//! Nothing in this module shares a code path with the support search: the
//! iterative route ([`dykstra`]) only ever projects onto one halfspace at
//! a time, the certificate checker ([`kkt_verify`]) recomputes every
//! condition from raw problem data, and the variational spot check
//! ([`vi_spot_check`]) tests the defining inequality of the projection
//! directly. Agreement between these and the closed-form engine is the
//! crate's strongest evidence of correctness.

use crate::core::{Polyhedron, Vector};
use crate::gram::IndexSet;
use crate::instances::standard_normal;
use crate::projector::{ProjectionResult, ProjectorConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("alternating projections did not converge within {cycles} cycles (last displacement {displacement:e})")]
    MaxCyclesExceeded {
        cycles: u64,
        displacement: f64,
        last: Vector,
    },
}

/// State of Boyle–Dykstra alternating projections with correction terms.
/// Unlike plain cyclic projections, the corrections make the iteration
/// converge to the metric projection onto the intersection, not merely to
/// some feasible point.
///
/// Two structural facts about the halfspace case drive the stopping rule:
/// the update keeps `iterate + sum(corrections) = start` exactly, and each
/// correction is a nonnegative multiple of its halfspace normal. The state
/// is therefore always a stationary point with nonnegative multipliers,
/// and the only open KKT questions are feasibility and complementary
/// slackness; [`DykstraState::kkt_gap`] measures exactly those two.
#[derive(Debug, Clone)]
pub struct DykstraState<'a> {
    polyhedron: &'a Polyhedron,
    iterate: Vector,
    corrections: Vec<Vector>,
    cycles: u64,
    last_displacement: f64,
}

impl<'a> DykstraState<'a> {
    pub fn new(polyhedron: &'a Polyhedron, x: &Vector) -> Self {
        assert_eq!(polyhedron.dim(), x.dim());
        let zero = x.scale(0.0);
        DykstraState {
            polyhedron,
            iterate: x.clone(),
            corrections: vec![zero; polyhedron.len()],
            cycles: 0,
            last_displacement: f64::INFINITY,
        }
    }

    /// One full sweep over all halfspaces; returns the iterate
    /// displacement over the sweep.
    pub fn cycle(&mut self) -> f64 {
        let before = self.iterate.clone();
        for i in 0..self.polyhedron.len() {
            let shifted = self.iterate.add(&self.corrections[i]);
            let projected = self.polyhedron.halfspace(i).project(&shifted);
            self.corrections[i] = shifted.sub(&projected);
            self.iterate = projected;
        }
        self.cycles += 1;
        self.last_displacement = self.iterate.distance(&before);
        self.last_displacement
    }

    pub fn iterate(&self) -> &Vector {
        &self.iterate
    }

    pub fn cycles(&self) -> u64 {
        self.cycles
    }

    pub fn last_displacement(&self) -> f64 {
        self.last_displacement
    }

    /// Measures how far the current state is from a KKT certificate:
    /// returns the worst scaled constraint violation together with the
    /// complementarity gap `sum_i nu_i * max(0, -r_i)`, where `nu_i` is
    /// the multiplier carried by correction `i` and `r_i` the residual of
    /// halfspace `i` at the iterate.
    ///
    /// When the iterate is feasible, the gap bounds the squared distance
    /// to the true projection: writing `x_bar` for the iterate, `p` for
    /// the projection of the start point and using the variational
    /// inequality at `p`,
    /// `|x_bar - p|^2 <= <start - x_bar | x_bar - p> + <start - p | p - x_bar>`
    /// and the first term expands over the corrections into the gap while
    /// the second is nonpositive. A tiny displacement alone proves
    /// nothing: the iteration can plateau while correction mass migrates
    /// between constraints, and the gap is exactly what stays large on
    /// such a plateau.
    pub fn kkt_gap(&self) -> (f64, f64) {
        let mut worst_violation = 0.0_f64;
        let mut gap = 0.0;
        for (i, correction) in self.corrections.iter().enumerate() {
            let hs = self.polyhedron.halfspace(i);
            let r = hs.residual(&self.iterate);
            worst_violation = worst_violation.max(r / (1.0 + hs.offset().abs()));
            let nu = correction.norm() / hs.normal().norm();
            gap += nu * (-r).max(0.0);
        }
        (worst_violation, gap)
    }
}

/// Smallest complementarity gap the stopping rule will insist on. Active
/// residuals at a converged iterate sit at rounding level, so the gap
/// bottoms out near machine precision times the multiplier and data
/// scales; demanding less would spin until `max_cycles` on every problem.
const GAP_FLOOR: f64 = 1e-13;

/// Projects `x` onto the polyhedron by alternating projections.
///
/// A small per-cycle displacement is necessary but not sufficient: the
/// iteration can plateau, moving almost nothing for many cycles while
/// corrections migrate between constraints, and then escape by a
/// macroscopic distance. The iteration therefore stops only when a cycle
/// moves the iterate less than `tol` AND the state's own KKT measure
/// ([`DykstraState::kkt_gap`]) certifies the iterate: every residual
/// within `tol` of feasible and the complementarity gap below
/// `max(tol^2, GAP_FLOOR) * (1 + |x|^2)`, which bounds the squared
/// distance to the true projection by that same quantity. Returns the
/// iterate, or an error carrying the last iterate when `max_cycles` runs
/// out first.
pub fn dykstra(
    p: &Polyhedron,
    x: &Vector,
    tol: f64,
    max_cycles: u64,
) -> Result<Vector, OracleError> {
    let mut state = DykstraState::new(p, x);
    let gap_tol = (tol * tol).max(GAP_FLOOR) * (1.0 + x.norm_sq());
    while state.cycles() < max_cycles {
        let displacement = state.cycle();
        if displacement < tol {
            let (worst_violation, gap) = state.kkt_gap();
            if worst_violation <= tol && gap <= gap_tol {
                return Ok(state.iterate().clone());
            }
        }
    }
    Err(OracleError::MaxCyclesExceeded {
        cycles: state.cycles(),
        displacement: state.last_displacement(),
        last: state.iterate().clone(),
    })
}

/// The four first-order conditions a claimed projection must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KktCondition {
    /// Every claimed multiplier is strictly positive.
    Positivity,
    /// The candidate satisfies every constraint.
    Feasibility,
    /// Support constraints hold with equality at the candidate.
    Activity,
    /// `x - x_bar` equals the claimed combination of support normals.
    Stationarity,
}

impl fmt::Display for KktCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            KktCondition::Positivity => "positivity",
            KktCondition::Feasibility => "feasibility",
            KktCondition::Activity => "activity",
            KktCondition::Stationarity => "stationarity",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone)]
pub struct KktViolation {
    pub condition: KktCondition,
    /// Constraint index for per-constraint conditions, `None` for
    /// stationarity.
    pub index: Option<usize>,
    /// How far past the tolerance the condition landed.
    pub magnitude: f64,
}

impl fmt::Display for KktViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{}@{}: {:e}", self.condition, i + 1, self.magnitude),
            None => write!(f, "{}: {:e}", self.condition, self.magnitude),
        }
    }
}

/// Outcome of [`kkt_verify`]: empty violations = accept.
#[derive(Debug, Clone)]
pub struct KktVerdict {
    pub violations: Vec<KktViolation>,
}

impl KktVerdict {
    pub fn accepted(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for KktVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.accepted() {
            return f.write_str("ACCEPT");
        }
        f.write_str("REJECT (")?;
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// Recomputes all four projection conditions from raw data. The claimed
/// certificate enters only as the support set and multiplier values; no
/// number from the search is trusted without being re-derived here.
///
/// Bands are relative: residual-like quantities against
/// `tol * (1 + |eta_i|)`, stationarity against `tol_stat * (1 + |x|)`.
/// An empty support claims `x_bar = x`, which is accepted only when `x`
/// itself is feasible.
pub fn kkt_verify(
    p: &Polyhedron,
    x: &Vector,
    x_bar: &Vector,
    support: &IndexSet,
    multipliers: &[f64],
    cfg: &ProjectorConfig,
) -> KktVerdict {
    assert_eq!(support.len(), multipliers.len());
    let mut violations = Vec::new();

    for (k, &nu) in multipliers.iter().enumerate() {
        if nu <= cfg.tol_pos {
            violations.push(KktViolation {
                condition: KktCondition::Positivity,
                index: Some(support.members()[k]),
                magnitude: nu,
            });
        }
    }

    for i in 0..p.len() {
        let hs = p.halfspace(i);
        let r = hs.residual(x_bar);
        let band = cfg.tol_feas * (1.0 + hs.offset().abs());
        if r > band {
            violations.push(KktViolation {
                condition: KktCondition::Feasibility,
                index: Some(i),
                magnitude: r,
            });
        }
        if support.contains(i) && r.abs() > band {
            violations.push(KktViolation {
                condition: KktCondition::Activity,
                index: Some(i),
                magnitude: r.abs(),
            });
        }
    }

    // x - x_bar must equal sum_i nu_i u_i over the support.
    let mut combo = x.scale(0.0);
    for (k, i) in support.iter().enumerate() {
        combo.axpy(multipliers[k], p.halfspace(i).normal());
    }
    let gap = x.sub(x_bar).sub(&combo).norm();
    if gap > cfg.tol_stat * (1.0 + x.norm()) {
        violations.push(KktViolation {
            condition: KktCondition::Stationarity,
            index: None,
            magnitude: gap,
        });
    }

    KktVerdict { violations }
}

/// Re-verifies a [`ProjectionResult`] against the data it claims to solve.
pub fn verify_result(
    p: &Polyhedron,
    x: &Vector,
    result: &ProjectionResult,
    cfg: &ProjectorConfig,
) -> KktVerdict {
    let (support, multipliers): (IndexSet, &[f64]) = match &result.certificate {
        Some(cert) => (cert.support.clone(), &cert.multipliers),
        None => (IndexSet::empty(), &[]),
    };
    kkt_verify(p, x, &result.point, &support, multipliers, cfg)
}

/// Result of sampling the variational inequality
/// `<x - x_bar | h - x_bar> <= 0 for all feasible h`.
#[derive(Debug, Clone)]
pub struct ViVerdict {
    pub passed: bool,
    pub samples: usize,
    pub seed: u64,
    /// Largest inner product seen, scaled by `(1+|x-x_bar|)(1+|h-x_bar|)`.
    pub worst: f64,
    /// A violating feasible point, if any was found.
    pub counterexample: Option<Vector>,
}

/// Samples feasible points around `x_bar` and tests the variational
/// inequality that characterizes the projection. Perturbations are
/// Gaussian with radius comparable to the displacement `|x - x_bar|`,
/// made feasible by the alternating-projection routine. Deterministic for
/// a fixed seed; the seed is recorded in the verdict.
pub fn vi_spot_check(
    p: &Polyhedron,
    x: &Vector,
    x_bar: &Vector,
    samples: usize,
    seed: u64,
) -> Result<ViVerdict, OracleError> {
    const VI_TOL: f64 = 1e-8;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let direction = x.sub(x_bar);
    let radius = 1.0 + direction.norm();
    let mut worst = f64::NEG_INFINITY;
    let mut counterexample = None;

    for _ in 0..samples {
        let noise: Vec<f64> = (0..x_bar.dim())
            .map(|_| radius * standard_normal(&mut rng))
            .collect();
        let mut probe = x_bar.clone();
        probe.axpy(1.0, &Vector::new(noise).expect("finite gaussian noise"));
        let h = dykstra(p, &probe, 1e-10, 200_000)?;
        let scale = (1.0 + direction.norm()) * (1.0 + h.distance(x_bar));
        let value = direction.inner(&h.sub(x_bar)) / scale;
        if value > worst {
            worst = value;
            if value > VI_TOL {
                counterexample = Some(h);
            }
        }
    }

    Ok(ViVerdict {
        passed: worst <= VI_TOL,
        samples,
        seed,
        worst,
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::Halfspace;
    use approx::assert_relative_eq;

    fn hs(normal: &[f64], offset: f64) -> Halfspace {
        Halfspace::new(Vector::from_slice(normal), offset).unwrap()
    }

    fn orthant2() -> Polyhedron {
        Polyhedron::new(vec![hs(&[1.0, 0.0], 0.0), hs(&[0.0, 1.0], 0.0)]).unwrap()
    }

    #[test]
    fn single_halfspace_converges_to_exact_projection() {
        let p = Polyhedron::new(vec![hs(&[2.0, 0.0], 2.0)]).unwrap();
        let x = Vector::from_slice(&[3.0, 0.0]);
        let got = dykstra(&p, &x, 1e-12, 100).unwrap();
        assert_relative_eq!(got.coords()[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(got.coords()[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn corner_case_needs_corrections_to_converge_correctly() {
        // Plain cyclic projection onto the quadrant walls from (2,1) stalls
        // at (0,1) after the first wall; the corrections pull it to the
        // true projection (0,0).
        let p = orthant2();
        let x = Vector::from_slice(&[2.0, 1.0]);
        let got = dykstra(&p, &x, 1e-12, 10_000).unwrap();
        assert!(got.coords()[0].abs() <= 1e-9);
        assert!(got.coords()[1].abs() <= 1e-9);
    }

    #[test]
    fn displacement_plateau_does_not_stop_the_iteration() {
        // Five halfspaces in the plane where the per-cycle displacement
        // drops below tolerance long before convergence: corrections keep
        // trading mass between constraints while the iterate barely
        // moves, then escape by roughly 8e-2. A displacement-only rule
        // returns the plateau point; the complementarity gap is what
        // stays macroscopic there, so stopping must wait for it.
        let mut rng = ChaCha8Rng::seed_from_u64(1634667900595909621);
        let inst = crate::instances::generate(&mut rng, 2, 5);
        let coarse = dykstra(&inst.polyhedron, &inst.point, 1e-10, 1_000_000).unwrap();
        let tight = dykstra(&inst.polyhedron, &inst.point, 1e-14, 5_000_000).unwrap();
        assert!(
            coarse.distance(&tight) <= 1e-8,
            "stopped on the plateau, {:e} from the limit",
            coarse.distance(&tight)
        );
        assert!(inst.polyhedron.contains(&coarse, 1e-9));
    }

    #[test]
    fn wedge_projection_agrees_with_hand_value() {
        // Halfspaces y - x <= 0 and -y <= 0 form a wedge; from (-1, 2) the
        // projection lands on the ray y = x at (1/2, 1/2).
        let p = Polyhedron::new(vec![hs(&[-1.0, 1.0], 0.0), hs(&[0.0, -1.0], 0.0)]).unwrap();
        let x = Vector::from_slice(&[-1.0, 2.0]);
        let got = dykstra(&p, &x, 1e-12, 100_000).unwrap();
        assert_relative_eq!(got.coords()[0], 0.5, epsilon = 1e-9);
        assert_relative_eq!(got.coords()[1], 0.5, epsilon = 1e-9);
    }

    #[test]
    fn max_cycles_is_reported_with_last_iterate() {
        let p = orthant2();
        let x = Vector::from_slice(&[2.0, 1.0]);
        let err = dykstra(&p, &x, 0.0, 3).unwrap_err();
        match err {
            OracleError::MaxCyclesExceeded { cycles, last, .. } => {
                assert_eq!(cycles, 3);
                assert_eq!(last.dim(), 2);
            }
        }
    }

    #[test]
    fn kkt_accepts_the_true_corner_certificate() {
        let p = orthant2();
        let x = Vector::from_slice(&[2.0, 1.0]);
        let x_bar = Vector::from_slice(&[0.0, 0.0]);
        let support = IndexSet::new(vec![0, 1]);
        let verdict = kkt_verify(
            &p,
            &x,
            &x_bar,
            &support,
            &[2.0, 1.0],
            &ProjectorConfig::default(),
        );
        assert!(verdict.accepted(), "unexpected verdict: {verdict}");
    }

    #[test]
    fn kkt_rejects_single_field_perturbations() {
        let p = orthant2();
        let x = Vector::from_slice(&[2.0, 1.0]);
        let cfg = ProjectorConfig::default();
        let support = IndexSet::new(vec![0, 1]);

        // Wrong point: stationarity and activity break.
        let off = Vector::from_slice(&[0.1, 0.0]);
        let v = kkt_verify(&p, &x, &off, &support, &[2.0, 1.0], &cfg);
        assert!(v
            .violations
            .iter()
            .any(|viol| viol.condition == KktCondition::Feasibility
                || viol.condition == KktCondition::Activity));

        // Wrong multiplier: stationarity breaks.
        let x_bar = Vector::from_slice(&[0.0, 0.0]);
        let v = kkt_verify(&p, &x, &x_bar, &support, &[2.0, 1.5], &cfg);
        assert!(v
            .violations
            .iter()
            .any(|viol| viol.condition == KktCondition::Stationarity));

        // Negative multiplier: positivity breaks.
        let v = kkt_verify(&p, &x, &x_bar, &support, &[2.0, -1.0], &cfg);
        assert!(v
            .violations
            .iter()
            .any(|viol| viol.condition == KktCondition::Positivity));

        // Claimed support constraint that is not active.
        let p3 = Polyhedron::new(vec![
            hs(&[1.0, 0.0], 0.0),
            hs(&[0.0, 1.0], 0.0),
            hs(&[1.0, 1.0], 5.0),
        ])
        .unwrap();
        let v = kkt_verify(
            &p3,
            &x,
            &x_bar,
            &IndexSet::new(vec![0, 1, 2]),
            &[2.0, 1.0, 0.1],
            &cfg,
        );
        assert!(v
            .violations
            .iter()
            .any(|viol| viol.condition == KktCondition::Activity));
    }

    #[test]
    fn kkt_rejects_unprojected_infeasible_point_with_empty_support() {
        let p = orthant2();
        let x = Vector::from_slice(&[2.0, 1.0]);
        let v = kkt_verify(&p, &x, &x, &IndexSet::empty(), &[], &ProjectorConfig::default());
        assert!(!v.accepted());
        assert!(v
            .violations
            .iter()
            .all(|viol| viol.condition == KktCondition::Feasibility));
    }

    #[test]
    fn vi_spot_check_accepts_truth_and_rejects_interior_imposter() {
        let p = orthant2();
        let x = Vector::from_slice(&[2.0, 1.0]);
        let truth = Vector::from_slice(&[0.0, 0.0]);
        let ok = vi_spot_check(&p, &x, &truth, 24, 7).unwrap();
        assert!(ok.passed, "worst value {:e}", ok.worst);
        assert_eq!(ok.seed, 7);

        // A feasible point that is not the projection: some sampled h
        // exposes it.
        let imposter = Vector::from_slice(&[-1.0, -1.0]);
        let bad = vi_spot_check(&p, &x, &imposter, 24, 7).unwrap();
        assert!(!bad.passed);
        assert!(bad.counterexample.is_some());
    }
}
