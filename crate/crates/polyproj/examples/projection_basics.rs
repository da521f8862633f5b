//! Projecting a point onto an intersection of halfspaces: the minimal
//! round trip. Builds a three-constraint wedge in the plane, projects an
//! exterior point, and reads the answer off the result.

use polyproj::projector::{self, ProjectorConfig};
use polyproj::{Halfspace, Polyhedron, Vector};

fn main() {
    // C = { (a, b) : a <= 1, b <= 1, a + b <= 1.5 }.
    let polyhedron = Polyhedron::new(vec![
        Halfspace::new(Vector::from_slice(&[1.0, 0.0]), 1.0).unwrap(),
        Halfspace::new(Vector::from_slice(&[0.0, 1.0]), 1.0).unwrap(),
        Halfspace::new(Vector::from_slice(&[1.0, 1.0]), 1.5).unwrap(),
    ])
    .unwrap();
    let cfg = ProjectorConfig::default();

    // An exterior point: both the diagonal and the first bound matter.
    let x = Vector::from_slice(&[2.0, 0.9]);
    let result = projector::project(&polyhedron, &x, &cfg).unwrap();
    let cert = result.certificate.as_ref().expect("x is outside C");

    println!("x          = {:?}", x.coords());
    println!("P(x)       = {:?}", result.point.coords());
    println!("distance   = {:.6}", x.distance(&result.point));
    println!("support    = {} (1-based constraint indices)", cert.support);
    println!("multipliers = {:?}", cert.multipliers);
    println!(
        "search      = {} subsets examined, {} singular skipped",
        result.stats.subsets_examined, result.stats.singular_skipped
    );

    // The support names exactly the constraints that hold with equality
    // at the projection; everything else has slack.
    for (i, hs) in polyhedron.halfspaces().iter().enumerate() {
        let r = hs.residual(&result.point);
        let role = if cert.support.contains(i) { "active" } else { "slack" };
        println!("constraint {}: residual {r:+.3e} ({role})", i + 1);
    }

    // A point already inside C comes back unchanged, with no certificate.
    let inside = Vector::from_slice(&[0.2, 0.3]);
    let result = projector::project(&polyhedron, &inside, &cfg).unwrap();
    assert!(result.certificate.is_none());
    assert_eq!(result.point.coords(), inside.coords());
    println!("\ninterior points short-circuit: P({:?}) = itself", inside.coords());
}
