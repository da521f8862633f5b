//! A latticial cone is the set of points lying below some combination of a
//! basis, ordered coordinatewise. Projection onto it splits any point into
//! a cone part and a polar part that are orthogonal, and every point admits
//! a mixed representation naming which basis directions are saturated.

use polyproj::latticial::{ConeError, LatticialCone};
use polyproj::projector::ProjectorConfig;
use polyproj::Vector;

fn main() {
    // A sheared 3D basis: well conditioned but far from orthogonal.
    let cone = LatticialCone::new(vec![
        Vector::from_slice(&[1.0, 0.3, 0.0]),
        Vector::from_slice(&[0.0, 1.0, 0.2]),
        Vector::from_slice(&[0.1, 0.0, 1.0]),
    ])
    .unwrap();
    let cfg = ProjectorConfig::default();

    let x = Vector::from_slice(&[0.8, -1.4, 0.9]);
    println!("x = {:?}", x.coords());
    println!("inside the cone: {}", cone.membership(&x, 1e-9));

    // The split: x = y + z with y in the cone, z in its polar, y ⟂ z.
    let split = cone.project(&x, &cfg).unwrap();
    println!("\ny (cone part)  = {:?}", split.y.coords());
    println!("z (polar part) = {:?}", split.z.coords());
    let reconstruction = split.y.add(&split.z).distance(&x);
    let orthogonality = split.y.inner(&split.z).abs();
    println!("|x - (y + z)|  = {reconstruction:.3e}");
    println!("|<y, z>|       = {orthogonality:.3e}");
    assert!(reconstruction <= 1e-12);
    assert!(orthogonality <= 1e-10);

    // The mixed representation: beta weights on the saturated basis
    // directions, alpha coefficients on the rest, with signs certifying
    // which side of each facet x sits on.
    let rep = cone.mixed_representation(&x, &cfg).unwrap();
    println!("\nsaturated directions: {}", rep.support);
    println!("beta  = {:?}", rep.beta);
    println!("free directions:      {}", rep.complement);
    println!("alpha = {:?}", rep.alpha);
    assert!(rep.beta.iter().all(|b| *b > 0.0));

    // A point already in the cone needs no split: the representation
    // call reports it, and the basis coordinates are its whole story.
    let mut inside = Vector::from_slice(&[0.0; 3]);
    for b in cone.basis() {
        inside.axpy(0.5, b);
    }
    assert!(cone.membership(&inside, 1e-9));
    match cone.mixed_representation(&inside, &cfg) {
        Err(ConeError::PointInsideCone) => {
            let alpha = cone.coefficients(&inside);
            println!("\ninterior point: no saturated directions, alpha = {alpha:?}");
            for a in &alpha {
                assert!((a - 0.5).abs() <= 1e-10);
            }
        }
        other => panic!("an interior point must be recognized, got {other:?}"),
    }
}
