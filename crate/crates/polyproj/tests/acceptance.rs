//! Acceptance suite: the crate's exit gate, one test per criterion.
//!
//! Every test prints exactly one line, `ACCEPTANCE <n> (<name>): PASS`
//! or `... FAIL (detail)`, then panics on failure so the normal test
//! harness reports it. Run with `--nocapture` to see the PASS lines:
//!
//! ```text
//! cargo test --test acceptance -- --nocapture
//! ```
//!
//! Thresholds are deliberately hard-coded at the values the crate
//! promises; loosening them here would change the contract, not fix a
//! bug.

mod common;

use polyproj::cli::{self, BenchOptions};
use polyproj::core::{Halfspace, Polyhedron, Vector};
use polyproj::gram::{nu_in, nu_out, GramMatrix, IndexSet};
use polyproj::instances;
use polyproj::latticial::{ConeError, LatticialCone};
use polyproj::lp::{
    lp_clip_project, verify_candidate, CoordinateConstraint, CoordinateHalfspaceSystem,
    LpVector, SparseFunctionalSystem,
};
use polyproj::oracle;
use polyproj::projector::{self, ProjectorConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn cfg() -> ProjectorConfig {
    ProjectorConfig::default()
}

fn report(number: usize, name: &str, outcome: Result<String, String>) {
    match outcome {
        Ok(detail) => println!("ACCEPTANCE {number} ({name}): PASS ({detail})"),
        Err(detail) => {
            println!("ACCEPTANCE {number} ({name}): FAIL ({detail})");
            panic!("acceptance criterion {number} ({name}) failed: {detail}");
        }
    }
}

/// Deterministic instance stream shared by criteria 1 and 2: 1000
/// instances with dimension 2..=10 and 1..=8 halfspaces, nonempty by
/// construction.
fn oracle_equivalence_stream() -> impl Iterator<Item = instances::GeneratedInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    (0..1000).map(move |_| {
        let dim = rng.gen_range(2..=10);
        let n = rng.gen_range(1..=8);
        instances::generate(&mut rng, dim, n)
    })
}

#[test]
fn criterion_1_oracle_equivalence() {
    let started = Instant::now();
    let mut max_disagreement: f64 = 0.0;
    let outcome = (|| {
        for (i, inst) in oracle_equivalence_stream().enumerate() {
            let result = projector::project(&inst.polyhedron, &inst.point, &cfg())
                .map_err(|e| format!("instance {i}: projector refused: {e}"))?;
            let reference = oracle::dykstra(&inst.polyhedron, &inst.point, 1e-10, 10_000_000)
                .map_err(|e| format!("instance {i}: oracle breakdown: {e}"))?;
            let d = result.point.distance(&reference);
            max_disagreement = max_disagreement.max(d);
            if d > 1e-6 {
                return Err(format!("instance {i}: disagreement {d:e} exceeds 1e-6"));
            }
        }
        let elapsed = started.elapsed();
        if elapsed.as_secs_f64() > 60.0 {
            return Err(format!("took {:.1}s, budget is 60s", elapsed.as_secs_f64()));
        }
        Ok(format!(
            "1000 instances, max disagreement {max_disagreement:.2e}, {:.1}s",
            elapsed.as_secs_f64()
        ))
    })();
    report(1, "oracle equivalence", outcome);
}

#[test]
fn criterion_2_certificate_validity() {
    let outcome = (|| {
        let mut certified = 0usize;
        let mut short_circuited = 0usize;
        for (i, inst) in oracle_equivalence_stream().enumerate() {
            let result = projector::project(&inst.polyhedron, &inst.point, &cfg())
                .map_err(|e| format!("instance {i}: projector refused: {e}"))?;
            let verdict = oracle::verify_result(&inst.polyhedron, &inst.point, &result, &cfg());
            if !verdict.accepted() {
                return Err(format!("instance {i}: certificate rejected: {verdict}"));
            }
            match &result.certificate {
                Some(cert) => {
                    certified += 1;
                    if cert.multipliers.iter().any(|&nu| nu <= 0.0) {
                        return Err(format!("instance {i}: nonpositive multiplier"));
                    }
                }
                None => short_circuited += 1,
            }
        }
        Ok(format!(
            "{certified} certificates verified, {short_circuited} feasible short-circuits, zero failures"
        ))
    })();
    report(2, "certificate validity", outcome);
}

#[test]
fn criterion_3_cofactor_solve_agreement() {
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        let mut sets_checked = 0usize;
        for i in 0..200 {
            let dim = rng.gen_range(2..=6);
            let n = rng.gen_range(2..=6);
            let inst = instances::generate(&mut rng, dim, n);
            let g = GramMatrix::build(&inst.polyhedron);
            let w: Vec<f64> = inst.polyhedron.residuals(&inst.point).values().to_vec();

            for mask in 1u32..(1 << n) {
                let members: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).collect();
                if members.len() > 4 || members.len() > dim {
                    continue;
                }
                let block: Vec<Vec<f64>> = members
                    .iter()
                    .map(|&a| members.iter().map(|&b| g.get(a, b)).collect())
                    .collect();
                let det = common::det_gauss(block.clone());
                let scale: f64 = members.iter().map(|&a| g.get(a, a)).product();
                if det.abs() <= 1e-6 * scale.max(1e-300) {
                    continue;
                }
                let rhs: Vec<f64> = members.iter().map(|&a| w[a]).collect();
                let Some(solved) = common::solve_gauss(block, rhs) else {
                    continue;
                };
                let set = IndexSet::new(members.clone());

                let cofactor = nu_in(&g, &w, &set);
                for (k, nu) in solved.iter().enumerate() {
                    let err = (cofactor[k] / det - nu).abs();
                    if err > 1e-8 * (1.0 + nu.abs()) {
                        return Err(format!(
                            "instance {i} set {set} entry {k}: in-support formula off by {err:e}"
                        ));
                    }
                }

                let point =
                    projector::candidate_point(&inst.polyhedron, &inst.point, &set, &solved);
                for i_prime in 0..n {
                    if set.contains(i_prime) {
                        continue;
                    }
                    let expected =
                        det * inst.polyhedron.halfspace(i_prime).residual(&point);
                    let got = nu_out(&g, &w, &set, i_prime);
                    let err = (got - expected).abs();
                    if err > 1e-8 * (1.0 + expected.abs()) {
                        return Err(format!(
                            "instance {i} set {set} left-out {i_prime}: out-of-support formula off by {err:e}"
                        ));
                    }
                }
                sets_checked += 1;
            }
        }
        Ok(format!("200 instances, {sets_checked} index sets (|I| <= 4) checked both ways"))
    })();
    report(3, "cofactor against elimination", outcome);
}

#[test]
fn criterion_4_uniqueness_under_redundant_normals() {
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(104);
        let mut multi_support_instances = 0usize;
        let mut max_spread: f64 = 0.0;
        for i in 0..100 {
            let dim = rng.gen_range(2..=5);
            let n_base = rng.gen_range(2..=5);
            let extra = rng.gen_range(1..=3);
            let inst = instances::generate_with_redundancy(&mut rng, dim, n_base, extra);
            let p = &inst.polyhedron;
            let n = p.len();
            if p.contains(&inst.point, 1e-12) {
                continue;
            }
            let g = GramMatrix::build(p);
            let w: Vec<f64> = p.residuals(&inst.point).values().to_vec();

            // Independent sweep: a support accepts when its block is
            // honestly invertible, multipliers are positive, and the
            // candidate satisfies everything else.
            let mut accepted_points: Vec<Vector> = Vec::new();
            for mask in 1u32..(1 << n) {
                let members: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).collect();
                if members.len() > dim {
                    continue;
                }
                let block: Vec<Vec<f64>> = members
                    .iter()
                    .map(|&a| members.iter().map(|&b| g.get(a, b)).collect())
                    .collect();
                let det = common::det_gauss(block.clone());
                let scale: f64 = members.iter().map(|&a| g.get(a, a)).product();
                if det.abs() <= 1e-8 * scale.max(1e-300) {
                    continue;
                }
                let rhs: Vec<f64> = members.iter().map(|&a| w[a]).collect();
                let Some(nu) = common::solve_gauss(block, rhs) else {
                    continue;
                };
                if nu.iter().any(|&v| v <= 1e-10) {
                    continue;
                }
                let set = IndexSet::new(members);
                let point = projector::candidate_point(p, &inst.point, &set, &nu);
                let feasible = (0..n).all(|k| {
                    set.contains(k)
                        || p.halfspace(k).residual(&point)
                            <= 1e-9 * (1.0 + p.halfspace(k).offset().abs())
                });
                if feasible {
                    accepted_points.push(point);
                }
            }

            if accepted_points.is_empty() {
                return Err(format!("instance {i}: no accepting support found"));
            }
            if accepted_points.len() > 1 {
                multi_support_instances += 1;
            }
            let engine = projector::project(p, &inst.point, &cfg())
                .map_err(|e| format!("instance {i}: projector refused: {e}"))?;
            accepted_points.push(engine.point);
            for a in &accepted_points {
                for b in &accepted_points {
                    let d = a.distance(b);
                    max_spread = max_spread.max(d);
                    if d > 1e-8 {
                        return Err(format!(
                            "instance {i}: two accepting supports give points {d:e} apart"
                        ));
                    }
                }
            }
        }
        Ok(format!(
            "100 redundant instances, {multi_support_instances} with several accepting supports, max spread {max_spread:.2e}"
        ))
    })();
    report(4, "uniqueness under redundant normals", outcome);
}

#[test]
fn criterion_5_projector_laws() {
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(105);
        let mut max_idempotence: f64 = 0.0;
        let mut worst_margin: f64 = f64::INFINITY;
        for i in 0..500 {
            let dim = rng.gen_range(2..=8);
            let n = rng.gen_range(1..=8);
            let inst = instances::generate(&mut rng, dim, n);
            let mut other = inst.interior.clone();
            let noise: Vec<f64> = (0..dim).map(|_| instances::standard_normal(&mut rng)).collect();
            other.axpy(2.0, &Vector::new(noise).unwrap());

            let px = projector::project(&inst.polyhedron, &inst.point, &cfg())
                .map_err(|e| format!("pair {i}: projector refused: {e}"))?
                .point;
            let py = projector::project(&inst.polyhedron, &other, &cfg())
                .map_err(|e| format!("pair {i}: projector refused: {e}"))?
                .point;

            let ppx = projector::project(&inst.polyhedron, &px, &cfg())
                .map_err(|e| format!("pair {i}: second pass refused: {e}"))?
                .point;
            let idem = ppx.distance(&px);
            max_idempotence = max_idempotence.max(idem);
            if idem > 1e-9 {
                return Err(format!("pair {i}: idempotence gap {idem:e} exceeds 1e-9"));
            }

            let d = px.sub(&py);
            let lhs = d.inner(&inst.point.sub(&other));
            let rhs = d.norm_sq();
            let scale = 1.0 + inst.point.distance(&other).powi(2);
            worst_margin = worst_margin.min((lhs - rhs) / scale);
            if lhs < rhs - 1e-8 * scale {
                return Err(format!(
                    "pair {i}: firm nonexpansiveness violated, <Px-Py|x-y> = {lhs:e} < |Px-Py|^2 = {rhs:e}"
                ));
            }
        }
        Ok(format!(
            "500 pairs, max idempotence gap {max_idempotence:.2e}, worst scaled firmness margin {worst_margin:.2e}"
        ))
    })();
    report(5, "idempotence and firm nonexpansiveness", outcome);
}

#[test]
fn criterion_6_latticial_cone_laws() {
    let outcome = (|| {
        // Moreau identity on 200 cones up to n = 8.
        let mut rng = ChaCha8Rng::seed_from_u64(106);
        let mut worst_moreau: f64 = 0.0;
        for i in 0..200 {
            let n = rng.gen_range(1..=8);
            let basis = instances::generate_basis(&mut rng, n);
            let cone = LatticialCone::new(basis).expect("generator validated the basis");
            let coords: Vec<f64> =
                (0..n).map(|_| 2.0 * instances::standard_normal(&mut rng)).collect();
            let x = Vector::new(coords).unwrap();
            let split = cone
                .project(&x, &cfg())
                .map_err(|e| format!("cone {i}: projection refused: {e}"))?;
            let scale = 1.0 + x.norm_sq();
            let reconstruction = x.sub(&split.y.add(&split.z)).norm();
            let orthogonality = split.y.inner(&split.z).abs();
            worst_moreau = worst_moreau.max(reconstruction / scale).max(orthogonality / scale);
            if reconstruction > 1e-10 * scale {
                return Err(format!("cone {i}: x - (y+z) = {reconstruction:e} exceeds 1e-10*scale"));
            }
            if orthogonality > 1e-10 * scale {
                return Err(format!("cone {i}: <y|z> = {orthogonality:e} exceeds 1e-10*scale"));
            }
        }

        // Exactly one accepting subset, exhaustively, on 100 instances
        // with n <= 6; the same scan's multipliers must match the
        // projector's certificate to 1e-12.
        let mut rng = ChaCha8Rng::seed_from_u64(1060);
        let mut compared = 0usize;
        for i in 0..100 {
            let n = rng.gen_range(1..=6);
            let basis = instances::generate_basis(&mut rng, n);
            let rows: Vec<Vec<f64>> = basis.iter().map(|b| b.coords().to_vec()).collect();
            let coords: Vec<f64> =
                (0..n).map(|_| 2.0 * instances::standard_normal(&mut rng)).collect();
            let (count, witnesses) = common::exhaustive_mixed_scan(&rows, &coords);
            if count != 1 {
                return Err(format!("instance {i}: {count} accepting subsets, expected exactly 1"));
            }
            let witness = &witnesses[0];

            let cone = LatticialCone::new(basis).unwrap();
            let x = Vector::new(coords).unwrap();
            match cone.mixed_representation(&x, &cfg()) {
                Ok(rep) => {
                    if rep.support.members() != witness.support.as_slice() {
                        return Err(format!(
                            "instance {i}: support {} vs independent {:?}",
                            rep.support, witness.support
                        ));
                    }
                    for (k, (a, b)) in rep.beta.iter().zip(&witness.beta).enumerate() {
                        if (a - b).abs() > 1e-12 * (1.0 + b.abs()) {
                            return Err(format!(
                                "instance {i}: beta[{k}] = {a:e} vs independent {b:e}"
                            ));
                        }
                    }
                    compared += rep.beta.len();
                }
                Err(ConeError::PointInsideCone) => {
                    if !witness.support.is_empty() {
                        return Err(format!(
                            "instance {i}: engine says interior, scan found support {:?}",
                            witness.support
                        ));
                    }
                }
                Err(e) => return Err(format!("instance {i}: representation failed: {e}")),
            }
        }
        Ok(format!(
            "200 Moreau splits (worst scaled residual {worst_moreau:.2e}), 100 exhaustive uniqueness scans, {compared} multipliers matched to 1e-12"
        ))
    })();
    report(6, "latticial cone laws", outcome);
}

#[test]
fn criterion_7_lp_clipping() {
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(107);
        let mut hilbert_worst: f64 = 0.0;
        let mut competitors = 0usize;
        for p in [1.5, 2.0, 3.0] {
            for i in 0..200 {
                let width = rng.gen_range(1..=6);
                let mut constraints = Vec::new();
                for k in 0..width {
                    if rng.gen_bool(0.7) {
                        constraints.push(CoordinateConstraint {
                            coord: k,
                            sign: if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
                            offset: 2.0 * instances::standard_normal(&mut rng),
                        });
                    }
                }
                if constraints.is_empty() {
                    constraints.push(CoordinateConstraint {
                        coord: rng.gen_range(0..width),
                        sign: 1.0,
                        offset: 2.0 * instances::standard_normal(&mut rng),
                    });
                }
                let system = CoordinateHalfspaceSystem::new(constraints.clone()).unwrap();
                let dim = width + rng.gen_range(0..=2);
                let coords: Vec<f64> =
                    (0..dim).map(|_| 2.0 * instances::standard_normal(&mut rng)).collect();
                let x = LpVector::new(coords.clone(), p).unwrap();

                let clipped = lp_clip_project(&system, &x);
                let functionals = SparseFunctionalSystem::from_coordinates(&system);
                let verdict = verify_candidate(&functionals, &x, &clipped, &cfg());
                if !verdict.accepted() {
                    return Err(format!("p {p} instance {i}: verifier rejected the clip: {verdict}"));
                }

                // At p = 2 the same constraints are halfspaces in R^d and
                // the closed-form Hilbert projector must land on the same
                // point.
                if p == 2.0 {
                    let d = clipped.len().max(dim);
                    let halfspaces: Vec<Halfspace> = system
                        .constraints()
                        .iter()
                        .map(|c| {
                            let mut normal = vec![0.0; d];
                            normal[c.coord] = c.sign;
                            Halfspace::new(Vector::new(normal).unwrap(), c.offset).unwrap()
                        })
                        .collect();
                    let poly = Polyhedron::new(halfspaces).unwrap();
                    let embedded: Vec<f64> = (0..d).map(|k| x.get(k)).collect();
                    let hilbert =
                        projector::project(&poly, &Vector::new(embedded).unwrap(), &cfg())
                            .map_err(|e| format!("p 2 instance {i}: projector refused: {e}"))?;
                    for k in 0..d {
                        let err = (clipped.get(k) - hilbert.point.coords()[k]).abs();
                        hilbert_worst = hilbert_worst.max(err);
                        if err > 1e-10 {
                            return Err(format!(
                                "p 2 instance {i}: coordinate {k} differs from the Hilbert projector by {err:e}"
                            ));
                        }
                    }
                }

                // Minimality: feasible competitors never do better by
                // more than 1e-9.
                let triples: Vec<(usize, f64, f64)> =
                    constraints.iter().map(|c| (c.coord, c.sign, c.offset)).collect();
                let dist = clipped.distance_p(&x);
                for _ in 0..5 {
                    let probe: Vec<f64> = (0..dim)
                        .map(|k| x.get(k) + 2.0 * instances::standard_normal(&mut rng))
                        .collect();
                    let feasible = common::clip_oracle(&triples, &probe);
                    let competitor = LpVector::new(feasible, p).unwrap();
                    competitors += 1;
                    if competitor.distance_p(&x) < dist - 1e-9 {
                        return Err(format!(
                            "p {p} instance {i}: a feasible competitor beat the clip by {:e}",
                            dist - competitor.distance_p(&x)
                        ));
                    }
                }
            }
        }
        Ok(format!(
            "600 systems across p = 1.5/2/3, Hilbert cross-check worst {hilbert_worst:.2e}, {competitors} competitors never better"
        ))
    })();
    report(7, "lp clipping verified and minimal", outcome);
}

#[test]
fn criterion_8_parallel_determinism() {
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(108);
        let mut max_drift: f64 = 0.0;
        for i in 0..200 {
            let dim = rng.gen_range(2..=6);
            let n = rng.gen_range(2..=12);
            let inst = instances::generate(&mut rng, dim, n);

            let mut results = Vec::new();
            for workers in [1usize, 2, 8] {
                let mut c = cfg();
                c.workers = workers;
                let r = projector::project(&inst.polyhedron, &inst.point, &c)
                    .map_err(|e| format!("instance {i} width {workers}: refused: {e}"))?;
                results.push((workers, r));
            }
            let (_, base) = &results[0];
            for (workers, r) in &results[1..] {
                let d = base.point.distance(&r.point);
                max_drift = max_drift.max(d);
                if d > 1e-12 {
                    return Err(format!(
                        "instance {i}: width {workers} point differs from width 1 by {d:e}"
                    ));
                }
                let base_support = base.certificate.as_ref().map(|c| c.support.members().to_vec());
                let this_support = r.certificate.as_ref().map(|c| c.support.members().to_vec());
                if base_support != this_support {
                    return Err(format!(
                        "instance {i}: width {workers} support {this_support:?} differs from width 1 {base_support:?}"
                    ));
                }
            }
        }
        Ok(format!("200 instances at widths 1/2/8, max point drift {max_drift:.2e}, identical supports"))
    })();
    report(8, "parallel determinism", outcome);
}

#[test]
fn criterion_9_scaling_honesty() {
    let outcome = (|| {
        // n = 20 sits under the documented cap: the run must complete,
        // agree with the oracle, and say PASS.
        let started = Instant::now();
        let opts = BenchOptions {
            dim: 3,
            n: 20,
            count: 3,
            seed: 9,
            oracle: "dykstra".to_string(),
        };
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = cli::cmd_bench(&opts, &mut out, &mut err);
        let text = String::from_utf8(out).unwrap();
        if code != 0 {
            return Err(format!(
                "bench n=20 exited {code}: {}",
                String::from_utf8(err).unwrap()
            ));
        }
        if !text.contains("result PASS") {
            return Err(format!("bench n=20 did not report PASS: {text}"));
        }

        // Past the cap the command must refuse loudly, not grind or lie.
        let opts = BenchOptions { n: 30, ..opts };
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = cli::cmd_bench(&opts, &mut out, &mut err);
        let guidance = String::from_utf8(err).unwrap();
        if code != 1 {
            return Err(format!("bench n=30 should refuse with exit 1, got {code}"));
        }
        if !guidance.contains("cap") {
            return Err(format!("refusal must explain the cap: {guidance}"));
        }
        Ok(format!(
            "n=20 completed in {:.2}s with PASS, n=30 refused with the cap message",
            started.elapsed().as_secs_f64()
        ))
    })();
    report(9, "scaling honesty", outcome);
}
