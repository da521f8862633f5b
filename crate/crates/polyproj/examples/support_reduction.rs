//! When several constraints share a normal direction, a certificate can
//! name a linearly dependent support. Reduction trims it to an independent
//! subset whose multipliers reproduce the same weighted combination, so
//! the projection point is untouched.

use polyproj::projector::reduce_support;
use polyproj::Vector;

fn main() {
    // Three coplanar normals in the plane: the third is a positive
    // combination of the first two.
    let normals = vec![
        Vector::from_slice(&[1.0, 0.0]),
        Vector::from_slice(&[0.0, 1.0]),
        Vector::from_slice(&[1.0, 1.0]),
    ];
    let coefficients = vec![0.5, 0.25, 0.75];

    let combination = weighted_sum(&normals, &coefficients);
    println!("original combination: {:?}", combination.coords());

    let (kept, reduced) = reduce_support(&normals, &coefficients).unwrap();
    println!("kept indices (of the dependent family): {kept}");
    println!("reduced multipliers: {reduced:?}");
    assert!(kept.len() < normals.len(), "a dependent family must shrink");

    let kept_normals: Vec<Vector> = kept.iter().map(|i| normals[i].clone()).collect();
    let recombined = weighted_sum(&kept_normals, &reduced);
    println!("recombined:           {:?}", recombined.coords());

    let drift = combination.distance(&recombined);
    println!("drift between the two combinations: {drift:.3e}");
    assert!(drift <= 1e-12, "reduction must preserve the weighted sum");
    assert!(reduced.iter().all(|nu| *nu >= 0.0), "multipliers stay nonnegative");

    // A combination that cancels exactly reduces to the empty support.
    let opposed = vec![
        Vector::from_slice(&[1.0, 0.0]),
        Vector::from_slice(&[-1.0, 0.0]),
    ];
    let (kept, reduced) = reduce_support(&opposed, &[2.0, 2.0]).unwrap();
    println!("\ncancelling family reduces to support {kept} with multipliers {reduced:?}");
    assert!(kept.is_empty());
    assert!(reduced.is_empty());
}

fn weighted_sum(normals: &[Vector], coefficients: &[f64]) -> Vector {
    let mut acc = Vector::from_slice(&vec![0.0; normals[0].dim()]);
    for (u, c) in normals.iter().zip(coefficients) {
        acc.axpy(*c, u);
    }
    acc
}
