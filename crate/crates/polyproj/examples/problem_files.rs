//! The CLI speaks three small text formats: `polyproj v1` for halfspace
//! problems, `polyproj-cone v1` for cone splits, and `polyproj-lp v1` for
//! coordinate clipping. This example builds each document in code, emits
//! it, parses it back, and shows the line-numbered message a malformed
//! file produces.

use polyproj::io::{
    format_cone, format_lp, format_problem, parse_cone, parse_lp, parse_problem, ConeDocument,
    LpDocument, ProblemDocument,
};
use polyproj::latticial::LatticialCone;
use polyproj::lp::{CoordinateConstraint, CoordinateHalfspaceSystem, LpVector};
use polyproj::{Halfspace, Polyhedron, Vector};

fn main() {
    // Halfspace problem: constraints, the point, an optional tolerance.
    let problem = ProblemDocument {
        polyhedron: Polyhedron::new(vec![
            Halfspace::new(Vector::from_slice(&[1.0, 0.0]), 1.0).unwrap(),
            Halfspace::new(Vector::from_slice(&[0.5, 1.0]), 0.25).unwrap(),
        ])
        .unwrap(),
        point: Vector::from_slice(&[2.0, 1.5]),
        tol: Some(1e-9),
    };
    let text = format_problem(&problem);
    println!("--- halfspace document ---\n{text}");
    let parsed = parse_problem(&text).unwrap();
    assert_eq!(parsed, problem, "emit then parse is the identity");

    // Cone document: exactly `dim` basis lines, then the point.
    let cone = ConeDocument {
        cone: LatticialCone::new(vec![
            Vector::from_slice(&[1.0, 0.2]),
            Vector::from_slice(&[0.0, 1.0]),
        ])
        .unwrap(),
        point: Vector::from_slice(&[-0.5, 0.75]),
    };
    let text = format_cone(&cone);
    println!("--- cone document ---\n{text}");
    let parsed = parse_cone(&text).unwrap();
    assert_eq!(parsed.cone.basis(), cone.cone.basis());
    assert_eq!(parsed.point, cone.point);

    // Sequence-space document: exponent, 1-based coordinate constraints,
    // the point.
    let lp = LpDocument {
        system: CoordinateHalfspaceSystem::new(vec![
            CoordinateConstraint { coord: 0, sign: 1.0, offset: 1.0 },
            CoordinateConstraint { coord: 2, sign: -1.0, offset: 0.0 },
        ])
        .unwrap(),
        point: LpVector::new(vec![2.0, -1.0, -3.0], 3.0).unwrap(),
    };
    let text = format_lp(&lp);
    println!("--- sequence-space document ---\n{text}");
    let parsed = parse_lp(&text).unwrap();
    assert_eq!(parsed, lp);

    // Comments and blank lines are ignored wherever they appear.
    let commented = "# projection instance\npolyproj v1\n\ndim 1\nhalfspace 1 0 # wall\npoint 2\n";
    assert!(parse_problem(commented).is_ok());

    // Errors carry the 1-based line they were detected on.
    let broken = "polyproj v1\ndim 2\nhalfspace 1 0 oops\npoint 0 0\n";
    let err = parse_problem(broken).unwrap_err();
    println!("--- malformed document ---\n{err}");
    assert_eq!(err.line, 3);

    let truncated = "polyproj v1\ndim 2\nhalfspace 1 0 1\n";
    let err = parse_problem(truncated).unwrap_err();
    println!("{err}");
    assert_eq!(err.line, 4, "missing sections are reported past the end");
}
