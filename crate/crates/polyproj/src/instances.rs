//! Seeded random instance generation for benchmarks, examples, and tests.
//!
//! Instances are built around a known interior point, so the feasible set
//! is nonempty by construction and every offset leaves genuine slack. The
//! generator is deterministic for a fixed seed and stream position
//! (ChaCha8 plus a hand-rolled polar-method Gaussian), which is what lets
//! benchmark tables and test corpora be reproduced exactly.

use crate::core::{Halfspace, Polyhedron, Vector};
use rand::Rng;

/// Standard normal deviate by the polar (Marsaglia) method. Deterministic
/// given the generator state; no external distribution crate involved.
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen_range(-1.0..1.0);
        let v: f64 = rng.gen_range(-1.0..1.0);
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            return u * (-2.0 * s.ln() / s).sqrt();
        }
    }
}

fn gaussian_vector<R: Rng>(rng: &mut R, dim: usize) -> Vector {
    let coords: Vec<f64> = (0..dim).map(|_| standard_normal(rng)).collect();
    Vector::new(coords).expect("gaussian coordinates are finite")
}

/// A nonzero Gaussian direction (resampled while too short to be a
/// trustworthy normal).
fn normal_vector<R: Rng>(rng: &mut R, dim: usize) -> Vector {
    loop {
        let u = gaussian_vector(rng, dim);
        if u.norm() > 0.3 {
            return u;
        }
    }
}

/// One random projection problem: a polyhedron with an interior point and
/// a query point scattered around it.
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub polyhedron: Polyhedron,
    pub point: Vector,
    /// Strictly interior witness used to build the offsets.
    pub interior: Vector,
}

/// Generates `n` halfspaces in dimension `dim` around a random interior
/// point `z`: offsets are `<z|u_i>` plus a positive slack, so `z` is
/// strictly feasible. The query point is `z` plus Gaussian scatter and is
/// usually (but not always) infeasible.
pub fn generate<R: Rng>(rng: &mut R, dim: usize, n: usize) -> GeneratedInstance {
    assert!(dim >= 1 && n >= 1);
    let interior = gaussian_vector(rng, dim);
    let halfspaces: Vec<Halfspace> = (0..n)
        .map(|_| {
            let u = normal_vector(rng, dim);
            let slack = 0.1 + standard_normal(rng).abs();
            let eta = interior.inner(&u) + slack;
            Halfspace::new(u, eta).expect("generated normal is nonzero")
        })
        .collect();
    let mut point = interior.clone();
    point.axpy(2.0, &gaussian_vector(rng, dim));
    GeneratedInstance {
        polyhedron: Polyhedron::new(halfspaces).expect("n >= 1"),
        point,
        interior,
    }
}

/// Like [`generate`], but appends `extra` constraints that duplicate
/// randomly chosen base halfspaces up to positive scaling (`u' = c u`,
/// `eta' = c eta` describes the same halfspace). Such instances admit
/// several accepting supports, all of which must reconstruct the same
/// projected point.
pub fn generate_with_redundancy<R: Rng>(
    rng: &mut R,
    dim: usize,
    n_base: usize,
    extra: usize,
) -> GeneratedInstance {
    let base = generate(rng, dim, n_base);
    let mut halfspaces = base.polyhedron.halfspaces().to_vec();
    for _ in 0..extra {
        let pick = rng.gen_range(0..n_base);
        let c = rng.gen_range(0.5..2.0);
        let original = &base.polyhedron.halfspaces()[pick];
        halfspaces.push(
            Halfspace::new(original.normal().scale(c), c * original.offset())
                .expect("scaled normal stays nonzero"),
        );
    }
    GeneratedInstance {
        polyhedron: Polyhedron::new(halfspaces).expect("nonempty"),
        point: base.point,
        interior: base.interior,
    }
}

/// How large a dual generator a basis from [`generate_basis`] may have.
/// Gaussian bases occasionally come out nearly dependent; their duals then
/// blow up and every Gram subsystem built from them is numerically
/// worthless. Resampling past this bound keeps generated cones in the
/// regime the projector's determinant gates are designed for.
const DUAL_NORM_BOUND: f64 = 25.0;

/// A random latticial-cone basis whose dual generators stay moderate in
/// norm, so downstream Gram systems are trustworthy. Resamples until the
/// conditioning is acceptable.
pub fn generate_basis<R: Rng>(rng: &mut R, n: usize) -> Vec<Vector> {
    loop {
        let basis: Vec<Vector> = (0..n).map(|_| normal_vector(rng, n)).collect();
        if let Ok(cone) = crate::latticial::LatticialCone::new(basis.clone()) {
            if cone.dual_generators().iter().all(|u| u.norm() <= DUAL_NORM_BOUND) {
                return basis;
            }
        }
    }
}
