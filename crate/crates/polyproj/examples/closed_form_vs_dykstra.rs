//! The finite support search and Dykstra's alternating scheme compute the
//! same projection by very different means: one solves a handful of small
//! linear systems exactly, the other iterates single-constraint projections
//! with correction memory. This example traces Dykstra's convergence on one
//! instance, then checks agreement across a batch of random instances.

use polyproj::oracle::{dykstra, DykstraState};
use polyproj::projector::{project, ProjectorConfig};
use polyproj::{instances, Vector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let cfg = ProjectorConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let instance = instances::generate(&mut rng, 3, 5);

    let exact = project(&instance.polyhedron, &instance.point, &cfg).unwrap();
    println!("closed form: {:?}", rounded(&exact.point));
    println!(
        "  support {:?}, {} subsets examined",
        exact.certificate.as_ref().map(|c| c.support.to_string()),
        exact.stats.subsets_examined
    );

    println!("\nDykstra cycles (distance to the closed-form point):");
    let mut state = DykstraState::new(&instance.polyhedron, &instance.point);
    let mut shown = 0u64;
    while state.cycles() < 10_000 {
        state.cycle();
        // Log on a doubling schedule so late-stage convergence stays visible.
        if state.cycles() >= 1 << shown {
            println!(
                "  cycle {:>5}: gap {:.3e}, displacement {:.3e}",
                state.cycles(),
                state.iterate().distance(&exact.point),
                state.last_displacement()
            );
            shown += 1;
        }
        if state.iterate().distance(&exact.point) < 1e-11 {
            break;
        }
    }
    assert!(state.iterate().distance(&exact.point) < 1e-9);

    // Batch agreement on fresh random instances of varying shape.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0_f64;
    for k in 0..50 {
        let dim = 2 + (k % 5);
        let n = 1 + (k % 6);
        let instance = instances::generate(&mut rng, dim, n);
        let exact = project(&instance.polyhedron, &instance.point, &cfg).unwrap();
        let iterated = dykstra(&instance.polyhedron, &instance.point, 1e-10, 1_000_000).unwrap();
        worst = worst.max(exact.point.distance(&iterated));
    }
    println!("\n50 random instances: worst disagreement {worst:.3e}");
    assert!(worst <= 1e-6);
}

fn rounded(v: &Vector) -> Vec<f64> {
    v.coords().iter().map(|c| (c * 1e9).round() / 1e9).collect()
}
