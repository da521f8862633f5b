//! Command implementations behind the `polyproj` binary.
//!
//! Each command takes the already-parsed options plus two writers
//! (report to `out`, diagnostics to `err`) and returns the process exit
//! code, so the whole surface is testable without spawning a process.
//!
//! Exit codes are a stable contract:
//!
//! - 0: success
//! - 1: input error (unreadable file, parse error, bad flag values)
//! - 2: no certificate / oracle breakdown
//! - 3: verification reject
//!
//! Reports are deterministic for a fixed input and flag set; the only
//! exception is the timing columns of `bench`, which are printed last on
//! each row so they are easy to strip.

use crate::core::Vector;
use crate::gram::{GramMatrix, IndexSet};
use crate::instances;
use crate::io::{self, format_number};
use crate::latticial::ConeError;
use crate::lp::{lp_clip_project, verify_candidate, SparseFunctionalSystem};
use crate::oracle;
use crate::projector::{self, ProjectError, ProjectorConfig};
use crate::dense;
use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_INPUT_ERROR: i32 = 1;
pub const EXIT_NO_CERTIFICATE: i32 = 2;
pub const EXIT_REJECTED: i32 = 3;

/// Fixed seed for the verification spot check, printed in the report so
/// runs are reproducible.
const VERIFY_VI_SEED: u64 = 2024;
const VERIFY_VI_SAMPLES: usize = 32;

macro_rules! report {
    ($w:expr, $($arg:tt)*) => { let _ = writeln!($w, $($arg)*); };
}

/// Writes `key` followed by one space-prefixed 17-digit token per value;
/// an empty list produces the bare keyword with no trailing space.
fn report_values(w: &mut dyn Write, key: &str, values: &[f64]) {
    let _ = write!(w, "{key}");
    for v in values {
        let _ = write!(w, " {}", format_number(*v));
    }
    let _ = writeln!(w);
}

/// Support set in compact one-token form, 1-based: `{1,3}`.
fn compact_support(set: &IndexSet) -> String {
    format!("{{{}}}", set.members().iter().map(|i| i + 1).join(","))
}

fn read_file(path: &Path, err: &mut dyn Write) -> Option<String> {
    match std::fs::read_to_string(path) {
        Ok(text) => Some(text),
        Err(e) => {
            report!(err, "error: cannot read {}: {e}", path.display());
            None
        }
    }
}

fn config_for(tol_from_file: Option<f64>, tol_flag: Option<f64>) -> ProjectorConfig {
    let mut cfg = ProjectorConfig::default();
    if let Some(t) = tol_from_file {
        cfg.tol_feas = t;
    }
    if let Some(t) = tol_flag {
        cfg.tol_feas = t;
    }
    cfg
}

#[derive(Debug, Clone, Default)]
pub struct ProjectOptions {
    /// Feasibility tolerance; overrides the file's `tol` line.
    pub tol: Option<f64>,
    /// Cap on support-set cardinality searched.
    pub max_cardinality: Option<usize>,
    /// Worker width for the subset search (1 = sequential).
    pub parallel: usize,
    /// Emit the report as a JSON document instead of plain lines.
    pub json: bool,
}

pub fn cmd_project(
    path: &Path,
    opts: &ProjectOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let Some(text) = read_file(path, err) else {
        return EXIT_INPUT_ERROR;
    };
    let doc = match io::parse_problem(&text) {
        Ok(doc) => doc,
        Err(e) => {
            report!(err, "error: {}: {e}", path.display());
            return EXIT_INPUT_ERROR;
        }
    };
    let mut cfg = config_for(doc.tol, opts.tol);
    if let Some(c) = opts.max_cardinality {
        cfg.max_cardinality = Some(c);
    }
    cfg.workers = opts.parallel.max(1);

    let result = match projector::project(&doc.polyhedron, &doc.point, &cfg) {
        Ok(result) => result,
        Err(e @ ProjectError::TooManyHalfspaces { .. }) => {
            report!(err, "error: {e}");
            return EXIT_INPUT_ERROR;
        }
        Err(ProjectError::NoCertificate(diag)) => {
            if opts.json {
                let doc = serde_json::json!({
                    "verification": "NO_CERTIFICATE",
                    "diagnostics": diag.to_string(),
                });
                report!(out, "{doc}");
            } else {
                report!(out, "verification NO_CERTIFICATE");
                report!(out, "diagnostics {diag}");
            }
            return EXIT_NO_CERTIFICATE;
        }
        Err(e) => {
            report!(err, "error: {e}");
            return EXIT_NO_CERTIFICATE;
        }
    };

    let verdict = oracle::verify_result(&doc.polyhedron, &doc.point, &result, &cfg);
    let (support, multipliers, det) = match &result.certificate {
        Some(cert) => (cert.support.clone(), cert.multipliers.clone(), cert.det_gii),
        None => (IndexSet::empty(), Vec::new(), 1.0),
    };

    if opts.json {
        let doc = serde_json::json!({
            "point": result.point.coords(),
            "support": support.members().iter().map(|i| i + 1).collect::<Vec<_>>(),
            "multipliers": multipliers,
            "det": det,
            "subsets-examined": result.stats.subsets_examined,
            "verification": verdict.to_string(),
        });
        report!(out, "{doc}");
    } else {
        report_values(out, "point", result.point.coords());
        report!(out, "support {support}");
        report_values(out, "multipliers", &multipliers);
        report!(out, "det {}", format_number(det));
        report!(out, "subsets-examined {}", result.stats.subsets_examined);
        report!(out, "verification {verdict}");
    }
    if verdict.accepted() {
        EXIT_SUCCESS
    } else {
        EXIT_REJECTED
    }
}

/// Raw multipliers on a support set, positivity not enforced; `None` when
/// the block is singular.
fn solve_raw(g: &GramMatrix, w: &[f64], set: &IndexSet) -> Option<Vec<f64>> {
    if set.is_empty() {
        return Some(Vec::new());
    }
    let k = set.len();
    let mut m = dense::Square::zeros(k);
    for (a, i) in set.iter().enumerate() {
        for (b, j) in set.iter().enumerate() {
            m.set(a, b, g.get(i, j));
        }
    }
    let rhs: Vec<f64> = set.iter().map(|i| w[i]).collect();
    dense::solve(&m, &rhs)
}

pub fn cmd_verify(
    path: &Path,
    candidate: &str,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let Some(text) = read_file(path, err) else {
        return EXIT_INPUT_ERROR;
    };
    let doc = match io::parse_problem(&text) {
        Ok(doc) => doc,
        Err(e) => {
            report!(err, "error: {}: {e}", path.display());
            return EXIT_INPUT_ERROR;
        }
    };
    let coords: Result<Vec<f64>, _> = candidate
        .split_whitespace()
        .map(|t| t.parse::<f64>())
        .collect();
    let candidate = match coords {
        Ok(coords) if coords.len() == doc.polyhedron.dim() => match Vector::new(coords) {
            Ok(v) => v,
            Err(e) => {
                report!(err, "error: candidate: {e}");
                return EXIT_INPUT_ERROR;
            }
        },
        Ok(coords) => {
            report!(
                err,
                "error: candidate has {} coordinates, problem dimension is {}",
                coords.len(),
                doc.polyhedron.dim()
            );
            return EXIT_INPUT_ERROR;
        }
        Err(e) => {
            report!(err, "error: candidate: {e}");
            return EXIT_INPUT_ERROR;
        }
    };
    let cfg = config_for(doc.tol, None);
    let x = &doc.point;

    // Reconstruct a certificate on the candidate's active set: among the
    // subsets whose block solves, keep the one whose stationarity gap
    // `|candidate - (x - sum nu_i u_i)|` is smallest. The verifier judges
    // the reconstruction; a feasible non-projection has no subset closing
    // the gap, so stationarity lands in the condition list.
    let active: Vec<usize> = doc
        .polyhedron
        .residuals(&candidate)
        .values()
        .iter()
        .enumerate()
        .filter(|(i, &r)| {
            r.abs() <= cfg.tol_feas * (1.0 + doc.polyhedron.halfspace(*i).offset().abs())
        })
        .map(|(i, _)| i)
        .collect();
    let g = GramMatrix::build(&doc.polyhedron);
    let w = doc.polyhedron.residuals(x).values().to_vec();

    let mut best: Option<(f64, IndexSet, Vec<f64>)> = None;
    for card in 0..=active.len() {
        for combo in active.iter().copied().combinations(card) {
            let set = IndexSet::new(combo);
            let Some(nu) = solve_raw(&g, &w, &set) else {
                continue;
            };
            let point = projector::candidate_point(&doc.polyhedron, x, &set, &nu);
            let gap = point.distance(&candidate);
            if best.as_ref().map_or(true, |(b, _, _)| gap < *b) {
                best = Some((gap, set, nu));
            }
        }
    }
    let (_, support, multipliers) =
        best.unwrap_or((f64::INFINITY, IndexSet::empty(), Vec::new()));

    let kkt = oracle::kkt_verify(&doc.polyhedron, x, &candidate, &support, &multipliers, &cfg);
    let vi = match oracle::vi_spot_check(
        &doc.polyhedron,
        x,
        &candidate,
        VERIFY_VI_SAMPLES,
        VERIFY_VI_SEED,
    ) {
        Ok(vi) => vi,
        Err(e) => {
            report!(err, "error: spot check oracle failed: {e}");
            return EXIT_NO_CERTIFICATE;
        }
    };

    report_values(out, "candidate", candidate.coords());
    report!(out, "support {support}");
    report_values(out, "multipliers", &multipliers);
    report!(out, "kkt {kkt}");
    report!(
        out,
        "vi samples {} seed {} worst {:e} {}",
        vi.samples,
        vi.seed,
        vi.worst,
        if vi.passed { "ACCEPT" } else { "REJECT" }
    );

    let accepted = kkt.accepted() && vi.passed;
    if accepted {
        report!(out, "verdict ACCEPT");
        EXIT_SUCCESS
    } else {
        let mut conditions: Vec<String> = kkt
            .violations
            .iter()
            .map(|v| v.condition.to_string())
            .collect();
        if !vi.passed {
            conditions.push("variational-inequality".to_string());
        }
        conditions.dedup();
        report!(out, "verdict REJECT");
        report!(out, "conditions {}", conditions.join(" "));
        EXIT_REJECTED
    }
}

pub fn cmd_cone(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(text) = read_file(path, err) else {
        return EXIT_INPUT_ERROR;
    };
    let doc = match io::parse_cone(&text) {
        Ok(doc) => doc,
        Err(e) => {
            report!(err, "error: {}: {e}", path.display());
            return EXIT_INPUT_ERROR;
        }
    };
    let cfg = ProjectorConfig::default();
    let split = match doc.cone.project(&doc.point, &cfg) {
        Ok(split) => split,
        Err(e) => {
            report!(err, "error: {e}");
            return EXIT_NO_CERTIFICATE;
        }
    };
    let (support, beta, complement, alpha) = match doc.cone.mixed_representation(&doc.point, &cfg)
    {
        Ok(rep) => (rep.support, rep.beta, rep.complement, rep.alpha),
        Err(ConeError::PointInsideCone) => {
            // Trivial representation: every coefficient sits on the basis.
            let n = doc.cone.n();
            (
                IndexSet::empty(),
                Vec::new(),
                IndexSet::empty().complement(n),
                doc.cone.coefficients(&doc.point),
            )
        }
        Err(e) => {
            report!(err, "error: {e}");
            return EXIT_NO_CERTIFICATE;
        }
    };

    // `+ 0.0` turns an exact IEEE -0.0 into +0.0 in the report; genuine
    // small negative values print as they are.
    let orthogonality = split.y.inner(&split.z) + 0.0;
    let reconstruction = doc.point.sub(&split.y.add(&split.z)).norm();
    report_values(out, "y", split.y.coords());
    report_values(out, "z", split.z.coords());
    report!(out, "support {support}");
    report_values(out, "beta", &beta);
    report!(out, "complement {complement}");
    report_values(out, "alpha", &alpha);
    report!(out, "moreau-orthogonality {:e}", orthogonality);
    report!(out, "moreau-reconstruction {:e}", reconstruction);
    EXIT_SUCCESS
}

pub fn cmd_lp(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(text) = read_file(path, err) else {
        return EXIT_INPUT_ERROR;
    };
    let doc = match io::parse_lp(&text) {
        Ok(doc) => doc,
        Err(e) => {
            report!(err, "error: {}: {e}", path.display());
            return EXIT_INPUT_ERROR;
        }
    };
    let clipped = lp_clip_project(&doc.system, &doc.point);
    let functionals = SparseFunctionalSystem::from_coordinates(&doc.system);
    let cfg = ProjectorConfig::default();
    let verdict = verify_candidate(&functionals, &doc.point, &clipped, &cfg);
    report_values(out, "point", clipped.coords());
    report!(out, "verdict {verdict}");
    if verdict.accepted() {
        EXIT_SUCCESS
    } else {
        EXIT_REJECTED
    }
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub dim: usize,
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub oracle: String,
}

const BENCH_AGREEMENT_TOL: f64 = 1e-6;
const BENCH_ORACLE_TOL: f64 = 1e-10;
const BENCH_ORACLE_MAX_CYCLES: u64 = 1_000_000;

pub fn cmd_bench(opts: &BenchOptions, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if opts.dim == 0 {
        report!(err, "error: --dim must be at least 1");
        return EXIT_INPUT_ERROR;
    }
    if opts.oracle != "dykstra" {
        report!(err, "error: unknown oracle `{}`; only `dykstra` is available", opts.oracle);
        return EXIT_INPUT_ERROR;
    }
    let cfg = ProjectorConfig::default();
    if opts.n == 0 {
        report!(err, "error: --n must be at least 1");
        return EXIT_INPUT_ERROR;
    }
    if opts.n > cfg.halfspace_cap {
        report!(
            err,
            "error: n = {} exceeds the subset-search cap of {}; the search cost grows with the number of support subsets, so either reduce n or call the library with an explicit `halfspace_cap`",
            opts.n,
            cfg.halfspace_cap
        );
        return EXIT_INPUT_ERROR;
    }

    report!(
        out,
        "# bench dim={} n={} count={} seed={} oracle={}",
        opts.dim, opts.n, opts.count, opts.seed, opts.oracle
    );
    report!(
        out,
        "# columns: instance disagreement subsets support time_project_us time_oracle_us"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut max_disagreement: f64 = 0.0;
    let mut worst_exit = EXIT_SUCCESS;
    for i in 1..=opts.count {
        let inst = instances::generate(&mut rng, opts.dim, opts.n);

        let t0 = Instant::now();
        let projected = projector::project(&inst.polyhedron, &inst.point, &cfg);
        let project_us = t0.elapsed().as_micros();

        let result = match projected {
            Ok(result) => result,
            Err(e) => {
                report!(err, "instance {i}: no certificate: {e}");
                worst_exit = worst_exit.max(EXIT_NO_CERTIFICATE);
                continue;
            }
        };

        let t1 = Instant::now();
        let reference = oracle::dykstra(
            &inst.polyhedron,
            &inst.point,
            BENCH_ORACLE_TOL,
            BENCH_ORACLE_MAX_CYCLES,
        );
        let oracle_us = t1.elapsed().as_micros();
        let reference = match reference {
            Ok(v) => v,
            Err(e) => {
                report!(err, "instance {i}: oracle breakdown: {e}");
                worst_exit = worst_exit.max(EXIT_NO_CERTIFICATE);
                continue;
            }
        };

        let disagreement = result.point.distance(&reference);
        max_disagreement = max_disagreement.max(disagreement);
        if disagreement > BENCH_AGREEMENT_TOL {
            worst_exit = worst_exit.max(EXIT_REJECTED);
        }
        let support = result
            .certificate
            .as_ref()
            .map(|c| compact_support(&c.support))
            .unwrap_or_else(|| "{}".to_string());
        report!(
            out,
            "{i} {disagreement:.3e} {} {} {project_us} {oracle_us}",
            result.stats.subsets_examined,
            support
        );
    }

    report!(out, "instances {}", opts.count);
    report!(out, "max-disagreement {max_disagreement:.3e}");
    report!(
        out,
        "result {}",
        if worst_exit == EXIT_SUCCESS { "PASS" } else { "FAIL" }
    );
    worst_exit
}
