//! Vectors, halfspaces, and polyhedra over R^d.
//!
//! A polyhedron here is always a finite intersection of closed halfspaces
//! `{ h : <h|u_i> <= eta_i }` that the caller promises is nonempty. The
//! feasibility convention everywhere in the crate is relative: a residual
//! `r` counts as "<= 0" when `r <= tol * (1 + |eta|)`, so the band scales
//! with the offset instead of silently growing with the problem.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("vector must have at least one coordinate")]
    ZeroDimension,
    #[error("coordinate {index} is not finite")]
    NonFiniteCoordinate { index: usize },
    #[error("halfspace offset is not finite")]
    NonFiniteOffset,
    #[error("halfspace normal must be nonzero")]
    ZeroNormal,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polyhedron needs at least one halfspace")]
    EmptyPolyhedron,
}

/// Point or direction in R^d with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    coords: Vec<f64>,
}

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        if coords.is_empty() {
            return Err(GeometryError::ZeroDimension);
        }
        for (index, c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(GeometryError::NonFiniteCoordinate { index });
            }
        }
        Ok(Vector { coords })
    }

    /// Shorthand for trusted literals in tests and examples.
    ///
    /// # Panics
    /// Panics on empty or non-finite input.
    pub fn from_slice(coords: &[f64]) -> Self {
        Vector::new(coords.to_vec()).expect("invalid vector literal")
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn inner(&self, other: &Vector) -> f64 {
        assert_eq!(
            self.dim(),
            other.dim(),
            "inner product of vectors with dimensions {} and {}",
            self.dim(),
            other.dim()
        );
        self.coords
            .iter()
            .zip(other.coords.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        assert_eq!(self.dim(), other.dim());
        Vector {
            coords: self
                .coords
                .iter()
                .zip(other.coords.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, other: &Vector) -> Vector {
        assert_eq!(self.dim(), other.dim());
        Vector {
            coords: self
                .coords
                .iter()
                .zip(other.coords.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, a: f64) -> Vector {
        Vector {
            coords: self.coords.iter().map(|c| a * c).collect(),
        }
    }

    /// In-place `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Vector) {
        assert_eq!(self.dim(), other.dim());
        for (s, o) in self.coords.iter_mut().zip(other.coords.iter()) {
            *s += a * o;
        }
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        self.sub(other).norm()
    }
}

/// Closed halfspace `{ h : <h|u> <= eta }` with a nonzero normal `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    normal: Vector,
    offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vector, offset: f64) -> Result<Self, GeometryError> {
        if !offset.is_finite() {
            return Err(GeometryError::NonFiniteOffset);
        }
        if normal.norm_sq() == 0.0 {
            return Err(GeometryError::ZeroNormal);
        }
        Ok(Halfspace { normal, offset })
    }

    pub fn normal(&self) -> &Vector {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Signed constraint violation `<x|u> - eta` (positive = infeasible).
    pub fn residual(&self, x: &Vector) -> f64 {
        x.inner(&self.normal) - self.offset
    }

    /// Exact projection onto this single halfspace. Interior points are
    /// returned unchanged (bitwise), boundary and exterior points land on
    /// the boundary hyperplane.
    pub fn project(&self, x: &Vector) -> Vector {
        let r = self.residual(x);
        if r <= 0.0 {
            return x.clone();
        }
        let mut p = x.clone();
        p.axpy(-r / self.normal.norm_sq(), &self.normal);
        p
    }
}

/// Finite intersection of halfspaces, assumed nonempty by the caller.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    halfspaces: Vec<Halfspace>,
}

impl Polyhedron {
    pub fn new(halfspaces: Vec<Halfspace>) -> Result<Self, GeometryError> {
        let first = halfspaces.first().ok_or(GeometryError::EmptyPolyhedron)?;
        let expected = first.normal().dim();
        for hs in &halfspaces {
            let got = hs.normal().dim();
            if got != expected {
                return Err(GeometryError::DimensionMismatch { expected, got });
            }
        }
        Ok(Polyhedron { halfspaces })
    }

    pub fn len(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.halfspaces.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.halfspaces[0].normal().dim()
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn halfspace(&self, i: usize) -> &Halfspace {
        &self.halfspaces[i]
    }

    /// All signed violations `<x|u_i> - eta_i` at once.
    pub fn residuals(&self, x: &Vector) -> ResidualVector {
        ResidualVector {
            values: self.halfspaces.iter().map(|hs| hs.residual(x)).collect(),
        }
    }

    /// Membership within the relative band `r_i <= tol * (1 + |eta_i|)`.
    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.halfspaces
            .iter()
            .all(|hs| hs.residual(x) <= tol * (1.0 + hs.offset().abs()))
    }
}

/// Signed violations of a point against every halfspace of a polyhedron,
/// in constraint order.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualVector {
    values: Vec<f64>,
}

impl ResidualVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest violation; the point is feasible in the absolute sense when
    /// this is <= 0.
    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn hs(normal: &[f64], offset: f64) -> Halfspace {
        Halfspace::new(Vector::from_slice(normal), offset).unwrap()
    }

    #[test]
    fn inner_product_of_small_vectors() {
        let a = Vector::from_slice(&[1.0, 2.0, 3.0]);
        let b = Vector::from_slice(&[4.0, 5.0, 6.0]);
        assert_eq!(a.inner(&b), 32.0);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(Vector::new(vec![]), Err(GeometryError::ZeroDimension));
        assert_eq!(
            Vector::new(vec![1.0, f64::NAN]),
            Err(GeometryError::NonFiniteCoordinate { index: 1 })
        );
        assert_eq!(
            Halfspace::new(Vector::from_slice(&[0.0, 0.0]), 1.0),
            Err(GeometryError::ZeroNormal)
        );
        assert_eq!(
            Halfspace::new(Vector::from_slice(&[1.0]), f64::INFINITY),
            Err(GeometryError::NonFiniteOffset)
        );
        assert_eq!(Polyhedron::new(vec![]), Err(GeometryError::EmptyPolyhedron));
        assert_eq!(
            Polyhedron::new(vec![hs(&[1.0, 0.0], 0.0), hs(&[1.0], 0.0)]),
            Err(GeometryError::DimensionMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn residuals_report_signed_violations() {
        let p = Polyhedron::new(vec![hs(&[1.0, 0.0], 1.0), hs(&[0.0, 1.0], 1.0)]).unwrap();
        let r = p.residuals(&Vector::from_slice(&[2.0, 0.0]));
        assert_eq!(r.values(), &[1.0, -1.0]);
        assert_eq!(r.max(), 1.0);
    }

    #[test]
    fn contains_uses_relative_band() {
        let p = Polyhedron::new(vec![hs(&[1.0, 0.0], 0.0), hs(&[0.0, 1.0], 0.0)]).unwrap();
        // Tiny positive residual is inside the band, a visible one is not.
        assert!(p.contains(&Vector::from_slice(&[1e-12, 0.0]), 1e-9));
        assert!(!p.contains(&Vector::from_slice(&[1e-6, 0.0]), 1e-9));
        // Band scales with |eta|: residual 5e-5 against eta = 1e5.
        let q = Polyhedron::new(vec![hs(&[1.0], 1e5)]).unwrap();
        assert!(q.contains(&Vector::from_slice(&[1e5 + 5e-5]), 1e-9));
    }

    #[test]
    fn halfspace_projection_lands_on_boundary() {
        // Non-unit normal: u = (2,0), eta = 2, x = (3,0). The multiplier is
        // (<x|u> - eta) / |u|^2 = (6 - 2) / 4 = 1, so the projection is
        // x - 1 * u = (1, 0).
        let h = hs(&[2.0, 0.0], 2.0);
        let x = Vector::from_slice(&[3.0, 0.0]);
        let p = h.project(&x);
        assert_eq!(p.coords(), &[1.0, 0.0]);
        // Optimality, not just feasibility: p is on the boundary and the
        // displacement x - p is orthogonal to it, so for a fan of boundary
        // and interior points h' the angle condition <x - p | h' - p> <= 0
        // holds.
        assert_relative_eq!(h.residual(&p), 0.0, epsilon = 1e-15);
        for t in [-2.0_f64, -0.5, 0.0, 0.5, 2.0] {
            let feas = Vector::from_slice(&[1.0 - t.abs(), t]);
            assert!(h.residual(&feas) <= 1e-12);
            assert!(x.sub(&p).inner(&feas.sub(&p)) <= 1e-12);
        }
    }

    #[test]
    fn halfspace_projection_keeps_interior_points_bitwise() {
        let h = hs(&[2.0, 0.0], 2.0);
        let x = Vector::from_slice(&[0.0, 0.0]);
        assert_eq!(h.project(&x), x);
        // Boundary points are fixed as well.
        let b = Vector::from_slice(&[1.0, 7.0]);
        assert_eq!(h.project(&b), b);
    }

    #[test]
    fn single_halfspace_polyhedron_works() {
        let p = Polyhedron::new(vec![hs(&[1.0, 1.0], 1.0)]).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.contains(&Vector::from_slice(&[0.0, 0.0]), 0.0));
    }
}
