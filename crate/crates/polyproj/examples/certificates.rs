//! A projection result is not just a point: it carries a support
//! certificate that an independent checker re-verifies from raw problem
//! data. This example runs the checker on the genuine certificate, then
//! on deliberately corrupted ones, and shows which condition each
//! corruption trips.

use polyproj::oracle;
use polyproj::projector::{self, ProjectorConfig};
use polyproj::{Halfspace, Polyhedron, Vector};

fn main() {
    let polyhedron = Polyhedron::new(vec![
        Halfspace::new(Vector::from_slice(&[1.0, 0.0, 0.0]), 0.0).unwrap(),
        Halfspace::new(Vector::from_slice(&[0.0, 1.0, 0.0]), 0.0).unwrap(),
        Halfspace::new(Vector::from_slice(&[-1.0, -1.0, -1.0]), 2.0).unwrap(),
    ])
    .unwrap();
    let x = Vector::from_slice(&[1.5, 0.5, 1.0]);
    let cfg = ProjectorConfig::default();

    let result = projector::project(&polyhedron, &x, &cfg).unwrap();
    let cert = result.certificate.clone().expect("x is outside");
    println!("point       = {:?}", result.point.coords());
    println!("support     = {}", cert.support);
    println!("multipliers = {:?}", cert.multipliers);

    // The checker recomputes positivity, feasibility, activity, and
    // stationarity; it trusts nothing beyond the support and the numbers.
    let verdict = oracle::kkt_verify(
        &polyhedron,
        &x,
        &result.point,
        &cert.support,
        &cert.multipliers,
        &cfg,
    );
    println!("genuine certificate: {verdict}");
    assert!(verdict.accepted());

    // Corrupt the claimed point: stationarity (and possibly activity)
    // breaks.
    let mut nudged = result.point.clone();
    nudged.axpy(1e-3, &Vector::from_slice(&[0.0, 1.0, 0.0]));
    let verdict = oracle::kkt_verify(&polyhedron, &x, &nudged, &cert.support, &cert.multipliers, &cfg);
    println!("nudged point:        {verdict}");
    assert!(!verdict.accepted());

    // Corrupt a multiplier: the combination no longer reproduces x - P(x).
    let mut wrong = cert.multipliers.clone();
    wrong[0] *= 1.5;
    let verdict = oracle::kkt_verify(&polyhedron, &x, &result.point, &cert.support, &wrong, &cfg);
    println!("scaled multiplier:   {verdict}");
    assert!(!verdict.accepted());

    // Independent of the algebraic checks, the defining variational
    // inequality <x - P(x) | h - P(x)> <= 0 is spot-checked on sampled
    // feasible points. The seed is recorded so a failure replays.
    let vi = oracle::vi_spot_check(&polyhedron, &x, &result.point, 48, 11).unwrap();
    println!(
        "variational check:   worst scaled value {:.2e} over {} samples (seed {}) -> {}",
        vi.worst,
        vi.samples,
        vi.seed,
        if vi.passed { "ACCEPT" } else { "REJECT" }
    );
    assert!(vi.passed);
}
