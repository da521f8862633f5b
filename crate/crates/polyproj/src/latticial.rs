//! Simplicial (latticial) cones: full-dimensional cones in R^n generated
//! by n linearly independent basis vectors.
//!
//! Such a cone has an equivalent halfspace description through its dual
//! generators, the unique vectors `u_j` with `<u_j|b_i> = -delta_ij`:
//! membership is `<x|u_i> <= 0` for all `i`. That reduction routes cone
//! projection through the certified halfspace engine and yields two
//! classical artifacts in one pass:
//!
//! - the Moreau split `x = y + z` with `y` the projection onto the cone,
//!   `z` the projection onto its polar, and `<y|z> = 0`;
//! - the mixed representation `x = sum_{i in I'} alpha_i b_i +
//!   sum_{j in I} beta_j u_j` with `alpha >= 0`, `beta > 0`, where `I` is
//!   the accepted support and the `beta` are exactly the projection
//!   multipliers. For a given `x` outside the cone exactly one subset `I`
//!   admits such signs, which makes the representation a checkable
//!   fingerprint of the projection.

use crate::core::{Halfspace, Polyhedron, Vector};
use crate::dense;
use crate::gram::IndexSet;
use crate::projector::{project, ProjectError, ProjectorConfig};
use thiserror::Error;

/// Pivot-ratio gate for basis conditioning; beyond this the exactly-one
/// property is numerically meaningless and construction refuses.
const PIVOT_RATIO_GATE: f64 = 1e12;

#[derive(Debug, Error)]
pub enum ConeError {
    #[error("cone basis needs at least one vector")]
    EmptyBasis,
    #[error("basis vector {index} has dimension {got}, expected {expected}")]
    NotSquare { index: usize, expected: usize, got: usize },
    #[error("basis matrix is singular; the vectors are linearly dependent")]
    SingularBasis,
    #[error("basis matrix is too ill-conditioned (pivot ratio {ratio:.2e} exceeds {gate:.0e})")]
    IllConditioned { ratio: f64, gate: f64 },
    #[error("point is inside the cone; the mixed representation is the trivial one")]
    PointInsideCone,
    #[error("mixed basis turned out singular; numerical breakdown")]
    MixedBasisSingular,
    #[error("mixed-system solution disagrees with the projection multipliers; numerical breakdown")]
    RepresentationInconsistent,
    #[error(transparent)]
    Projection(#[from] ProjectError),
}

/// Cone generated by `n` independent vectors in R^n, with its dual
/// generators precomputed at construction.
#[derive(Debug, Clone)]
pub struct LatticialCone {
    basis: Vec<Vector>,
    duals: Vec<Vector>,
}

impl LatticialCone {
    /// Validates the basis (square, nonsingular, pivot ratio within the
    /// gate) and solves the `n` systems `<u_j|b_i> = -delta_ij` for the
    /// dual generators.
    pub fn new(basis: Vec<Vector>) -> Result<Self, ConeError> {
        let n = basis.len();
        if n == 0 {
            return Err(ConeError::EmptyBasis);
        }
        for (index, b) in basis.iter().enumerate() {
            if b.dim() != n {
                return Err(ConeError::NotSquare { index, expected: n, got: b.dim() });
            }
        }
        // Rows of B are the basis vectors; then B u_j = -e_j.
        let mut m = dense::Square::zeros(n);
        for (i, b) in basis.iter().enumerate() {
            for (j, &c) in b.coords().iter().enumerate() {
                m.set(i, j, c);
            }
        }
        let lu = dense::factor(&m).ok_or(ConeError::SingularBasis)?;
        let ratio = lu.pivot_ratio();
        if ratio > PIVOT_RATIO_GATE {
            return Err(ConeError::IllConditioned { ratio, gate: PIVOT_RATIO_GATE });
        }
        let duals: Vec<Vector> = (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = -1.0;
                Vector::new(lu.solve(&e)).expect("finite dual generator")
            })
            .collect();
        Ok(LatticialCone { basis, duals })
    }

    pub fn n(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// The vectors `u_j` with `<u_j|b_i> = -delta_ij`; they generate the
    /// polar cone and define the halfspace description of this one.
    pub fn dual_generators(&self) -> &[Vector] {
        &self.duals
    }

    /// Membership via the dual description: `<x|u_i> <= tol` for all `i`.
    pub fn membership(&self, x: &Vector, tol: f64) -> bool {
        self.duals.iter().all(|u| x.inner(u) <= tol)
    }

    /// Coordinates of `x` in the cone basis: the unique `alpha` with
    /// `x = sum_i alpha_i b_i`. All entries are nonnegative (up to
    /// rounding) exactly when `x` lies in the cone.
    pub fn coefficients(&self, x: &Vector) -> Vec<f64> {
        let n = self.n();
        assert_eq!(x.dim(), n, "point dimension must match the cone");
        let mut m = dense::Square::zeros(n);
        for (i, b) in self.basis.iter().enumerate() {
            for (row, &c) in b.coords().iter().enumerate() {
                m.set(row, i, c);
            }
        }
        dense::solve(&m, x.coords()).expect("basis was validated nonsingular")
    }

    /// The halfspace system `{ h : <h|u_i> <= 0 }` whose intersection is
    /// this cone.
    pub fn induced_polyhedron(&self) -> Polyhedron {
        let halfspaces: Vec<Halfspace> = self
            .duals
            .iter()
            .map(|u| Halfspace::new(u.clone(), 0.0).expect("duals are nonzero"))
            .collect();
        Polyhedron::new(halfspaces).expect("n >= 1")
    }

    /// Moreau split of `x`: `y` is the projection onto the cone (through
    /// the certified halfspace search), `z = x - y` the projection onto
    /// the polar, and `<y|z> = 0` up to rounding.
    pub fn project(&self, x: &Vector, cfg: &ProjectorConfig) -> Result<MoreauSplit, ConeError> {
        if self.membership(x, cfg.tol_feas) {
            return Ok(MoreauSplit { y: x.clone(), z: x.scale(0.0) });
        }
        let result = project(&self.induced_polyhedron(), x, cfg)?;
        let z = x.sub(&result.point);
        Ok(MoreauSplit { y: result.point, z })
    }

    /// Mixed representation of a point outside the cone. The support `I`
    /// and the `beta` coefficients are taken verbatim from the projection
    /// certificate; the `alpha` come from solving the full mixed system
    /// `x = sum_{i in I'} alpha_i b_i + sum_{j in I} beta_j u_j`, whose
    /// basis is invertible whenever the cone basis is. The beta block of
    /// that solve must reproduce the certificate multipliers; a mismatch
    /// is reported as numerical breakdown rather than papered over.
    pub fn mixed_representation(
        &self,
        x: &Vector,
        cfg: &ProjectorConfig,
    ) -> Result<MixedRepresentation, ConeError> {
        if self.membership(x, cfg.tol_feas) {
            return Err(ConeError::PointInsideCone);
        }
        let n = self.n();
        let result = project(&self.induced_polyhedron(), x, cfg)?;
        let cert = result.certificate.ok_or(ConeError::PointInsideCone)?;
        let support = cert.support;
        let beta = cert.multipliers;
        let complement = support.complement(n);

        // Columns: basis vectors over I', then dual generators over I.
        let mut m = dense::Square::zeros(n);
        for (col, i) in complement.iter().enumerate() {
            for (row, &c) in self.basis[i].coords().iter().enumerate() {
                m.set(row, col, c);
            }
        }
        for (k, j) in support.iter().enumerate() {
            let col = complement.len() + k;
            for (row, &c) in self.duals[j].coords().iter().enumerate() {
                m.set(row, col, c);
            }
        }
        let solution = dense::solve(&m, x.coords()).ok_or(ConeError::MixedBasisSingular)?;
        let alpha = solution[..complement.len()].to_vec();
        let beta_check = &solution[complement.len()..];
        for (&claimed, &solved) in beta.iter().zip(beta_check.iter()) {
            if (claimed - solved).abs() > 1e-8 * (1.0 + claimed.abs()) {
                return Err(ConeError::RepresentationInconsistent);
            }
        }
        Ok(MixedRepresentation { support, beta, complement, alpha })
    }
}

/// Orthogonal split `x = y + z` into cone and polar-cone projections.
#[derive(Debug, Clone, PartialEq)]
pub struct MoreauSplit {
    /// Projection of `x` onto the cone.
    pub y: Vector,
    /// Projection of `x` onto the polar cone; always `x - y`.
    pub z: Vector,
}

/// `x = sum_{i in complement} alpha_i b_i + sum_{j in support} beta_j u_j`
/// with `alpha >= 0` and `beta > 0`; the cone part of the sum is the
/// projection of `x` onto the cone.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedRepresentation {
    /// Constraint indices whose dual generators carry the point.
    pub support: IndexSet,
    /// Coefficients on the dual generators, in support order; identical
    /// to the projection multipliers.
    pub beta: Vec<f64>,
    /// The remaining indices, whose basis vectors carry the projection.
    pub complement: IndexSet,
    /// Coefficients on the basis vectors, in complement order.
    pub alpha: Vec<f64>,
}
