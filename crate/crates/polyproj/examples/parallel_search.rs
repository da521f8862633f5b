//! The support search enumerates index sets in a fixed order and accepts
//! the first certificate in that order, so running the enumeration across
//! worker threads must not change the answer: parallelism only affects
//! wall time. This example projects one crowded instance at several worker
//! counts and checks the results are identical to the last bit.

use polyproj::projector::{project, ProjectorConfig};
use polyproj::instances;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let instance = instances::generate(&mut rng, 4, 16);
    println!(
        "instance: dim {}, {} halfspaces",
        instance.point.dim(),
        instance.polyhedron.len()
    );

    let mut baseline = None;
    for workers in [1usize, 2, 8] {
        let cfg = ProjectorConfig { workers, ..ProjectorConfig::default() };
        let start = Instant::now();
        let result = project(&instance.polyhedron, &instance.point, &cfg).unwrap();
        let elapsed = start.elapsed();
        let cert = result.certificate.as_ref().expect("exterior point");
        println!(
            "workers {workers}: support {}, {} subsets examined, {} singular skipped, {:?}",
            cert.support, result.stats.subsets_examined, result.stats.singular_skipped, elapsed
        );

        match &baseline {
            None => baseline = Some(result),
            Some(first) => {
                let first_cert = first.certificate.as_ref().unwrap();
                // Bitwise identity: same support, same multipliers, same point.
                assert_eq!(cert.support, first_cert.support);
                assert_eq!(cert.multipliers, first_cert.multipliers);
                assert_eq!(result.point.coords(), first.point.coords());
                println!("  identical to the single-worker run");
            }
        }
    }

    let result = baseline.unwrap();
    println!(
        "\nprojection: {:?}",
        result
            .point
            .coords()
            .iter()
            .map(|c| (c * 1e6).round() / 1e6)
            .collect::<Vec<_>>()
    );
}
