//! The support multipliers admit two independent routes: solve the Gram
//! block by elimination, or evaluate cofactor expansions built from
//! subdeterminants alone. This example computes both on a concrete
//! support set and shows they coincide, then uses the out-of-support
//! expansion to read off whether a left-out constraint would be violated.

use polyproj::gram::{nu_in, nu_out, subdet, GramMatrix, IndexSet};
use polyproj::projector::{candidate_point, solve_support};
use polyproj::{Halfspace, Polyhedron, Vector};

fn main() {
    let polyhedron = Polyhedron::new(vec![
        Halfspace::new(Vector::from_slice(&[1.0, 0.2, 0.0]), 0.5).unwrap(),
        Halfspace::new(Vector::from_slice(&[-0.3, 1.0, 0.1]), 0.4).unwrap(),
        Halfspace::new(Vector::from_slice(&[0.1, -0.2, 1.0]), 0.8).unwrap(),
        Halfspace::new(Vector::from_slice(&[0.5, 0.5, -1.0]), 1.0).unwrap(),
    ])
    .unwrap();
    let x = Vector::from_slice(&[1.4, 1.1, 1.6]);

    let g = GramMatrix::build(&polyhedron);
    let w: Vec<f64> = polyhedron.residuals(&x).values().to_vec();
    println!("w (constraint residuals at x) = {w:?}\n");

    let set = IndexSet::new(vec![0, 1, 2]);
    let det = subdet(&g, &set, &set);
    println!("support {set}: det(G_II) = {det:.6}");

    // Route 1: elimination on the block.
    let solved = solve_support(&g, &w, &set, 1e-12)
        .unwrap()
        .expect("multipliers are positive on this set");
    // Route 2: cofactor expansions; each entry equals det(G_II) times the
    // corresponding multiplier.
    let cofactors = nu_in(&g, &w, &set);
    for (k, (nu, cof)) in solved.iter().zip(&cofactors).enumerate() {
        println!(
            "  nu[{k}]: elimination {nu:.12}  cofactor/det {:.12}  (diff {:.1e})",
            cof / det,
            (cof / det - nu).abs()
        );
        assert!((cof / det - nu).abs() <= 1e-10 * (1.0 + nu.abs()));
    }

    // The out-of-support expansion for a left-out constraint equals
    // det(G_II) times that constraint's residual at the candidate point:
    // its sign alone decides feasibility without ever forming the point.
    let candidate = candidate_point(&polyhedron, &x, &set, &solved);
    let i_prime = 3;
    let expansion = nu_out(&g, &w, &set, i_prime);
    let residual = polyhedron.halfspace(i_prime).residual(&candidate);
    println!("\nleft-out constraint {}:", i_prime + 1);
    println!("  residual at candidate  = {residual:+.12}");
    println!("  expansion / det(G_II)  = {:+.12}", expansion / det);
    assert!((expansion - det * residual).abs() <= 1e-9 * (1.0 + (det * residual).abs()));
    if expansion <= 0.0 {
        println!("  nonpositive: the candidate satisfies constraint {}", i_prime + 1);
    } else {
        println!("  positive: the candidate violates constraint {}", i_prime + 1);
    }
}
