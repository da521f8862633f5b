//! Plain-text problem files.
//!
//! All three formats are line-oriented: whitespace-separated tokens,
//! `#` starts a comment that runs to the end of the line, blank lines
//! are ignored. Every number is written with 17 significant digits
//! (`{:.16e}`), which round-trips `f64` exactly, so a document emitted
//! by the formatters parses back to the identical instance.
//!
//! Polyhedron files (`polyproj v1`):
//!
//! ```text
//! polyproj v1
//! dim 2
//! halfspace -1.0e0 0.0e0 0.0e0     # normal coordinates, then offset
//! halfspace 0.0e0 -1.0e0 0.0e0
//! point 2.0e0 1.0e0
//! tol 1.0e-9                       # optional feasibility tolerance
//! ```
//!
//! Cone files (`polyproj-cone v1`) list the `dim` basis vectors, one per
//! line, then the point. Sequence-space files (`polyproj-lp v1`) give the
//! exponent, one `coord k delta eta` line per constrained coordinate
//! (`k` is 1-based, `delta` is +1 or -1), then the point; coordinates
//! beyond the point line are implicitly zero.

use crate::core::{Halfspace, Polyhedron, Vector};
use crate::latticial::LatticialCone;
use crate::lp::{CoordinateConstraint, CoordinateHalfspaceSystem, LpVector};
use std::fmt;
use thiserror::Error;

/// A parse failure, with the 1-based line it was detected on. Errors
/// found only at end of input (a missing section) report the line after
/// the last one.
#[derive(Debug, Error, PartialEq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl fmt::Display) -> ParseError {
        ParseError { line, message: message.to_string() }
    }
}

/// A parsed polyhedron problem: the constraints, the point to project,
/// and an optional feasibility tolerance override.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemDocument {
    pub polyhedron: Polyhedron,
    pub point: Vector,
    pub tol: Option<f64>,
}

/// A parsed cone problem: the (validated) cone and the point.
#[derive(Debug, Clone)]
pub struct ConeDocument {
    pub cone: LatticialCone,
    pub point: Vector,
}

/// A parsed sequence-space problem: coordinate constraints and the point.
#[derive(Debug, Clone, PartialEq)]
pub struct LpDocument {
    pub system: CoordinateHalfspaceSystem,
    pub point: LpVector,
}

/// Significant lines of a document: comments stripped, blanks skipped,
/// tokenized, with their original 1-based line numbers.
fn significant_lines(text: &str) -> (Vec<(usize, Vec<&str>)>, usize) {
    let mut lines = Vec::new();
    let mut total = 0;
    for (k, raw) in text.lines().enumerate() {
        total = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if !tokens.is_empty() {
            lines.push((k + 1, tokens));
        }
    }
    (lines, total)
}

fn parse_finite(token: &str, line: usize, what: &str) -> Result<f64, ParseError> {
    let value: f64 = token
        .parse()
        .map_err(|_| ParseError::new(line, format!("{what} `{token}` is not a number")))?;
    if !value.is_finite() {
        return Err(ParseError::new(line, format!("{what} `{token}` is not finite")));
    }
    Ok(value)
}

fn parse_numbers(tokens: &[&str], line: usize, what: &str) -> Result<Vec<f64>, ParseError> {
    tokens.iter().map(|t| parse_finite(t, line, what)).collect()
}

fn expect_header(
    lines: &[(usize, Vec<&str>)],
    total: usize,
    name: &str,
) -> Result<(), ParseError> {
    match lines.first() {
        Some((line, tokens)) => {
            if tokens.as_slice() == [name, "v1"] {
                Ok(())
            } else {
                Err(ParseError::new(*line, format!("expected header `{name} v1`")))
            }
        }
        None => Err(ParseError::new(total + 1, format!("empty document; expected header `{name} v1`"))),
    }
}

fn parse_dim(lines: &[(usize, Vec<&str>)], total: usize) -> Result<usize, ParseError> {
    match lines.get(1) {
        Some((line, tokens)) if tokens[0] == "dim" => {
            if tokens.len() != 2 {
                return Err(ParseError::new(*line, "expected `dim D`"));
            }
            let dim: usize = tokens[1]
                .parse()
                .map_err(|_| ParseError::new(*line, format!("dimension `{}` is not a positive integer", tokens[1])))?;
            if dim == 0 {
                return Err(ParseError::new(*line, "dimension must be at least 1"));
            }
            Ok(dim)
        }
        Some((line, _)) => Err(ParseError::new(*line, "expected `dim D` after the header")),
        None => Err(ParseError::new(total + 1, "missing `dim D` line")),
    }
}

/// Parses a `polyproj v1` document.
pub fn parse_problem(text: &str) -> Result<ProblemDocument, ParseError> {
    let (lines, total) = significant_lines(text);
    expect_header(&lines, total, "polyproj")?;
    let dim = parse_dim(&lines, total)?;

    let mut halfspaces = Vec::new();
    let mut point: Option<(usize, Vector)> = None;
    let mut tol: Option<f64> = None;
    for (line, tokens) in lines.iter().skip(2) {
        let line = *line;
        match tokens[0] {
            "halfspace" => {
                if tokens.len() != dim + 2 {
                    return Err(ParseError::new(
                        line,
                        format!("halfspace needs {dim} normal coordinates and an offset, got {} numbers", tokens.len() - 1),
                    ));
                }
                let numbers = parse_numbers(&tokens[1..], line, "halfspace entry")?;
                let normal = Vector::new(numbers[..dim].to_vec())
                    .map_err(|e| ParseError::new(line, e))?;
                let hs = Halfspace::new(normal, numbers[dim])
                    .map_err(|e| ParseError::new(line, e))?;
                halfspaces.push(hs);
            }
            "point" => {
                if point.is_some() {
                    return Err(ParseError::new(line, "more than one point line"));
                }
                if tokens.len() != dim + 1 {
                    return Err(ParseError::new(
                        line,
                        format!("point needs {dim} coordinates, got {}", tokens.len() - 1),
                    ));
                }
                let coords = parse_numbers(&tokens[1..], line, "point coordinate")?;
                point = Some((line, Vector::new(coords).map_err(|e| ParseError::new(line, e))?));
            }
            "tol" => {
                if tol.is_some() {
                    return Err(ParseError::new(line, "more than one tol line"));
                }
                if tokens.len() != 2 {
                    return Err(ParseError::new(line, "expected `tol T`"));
                }
                let t = parse_finite(tokens[1], line, "tolerance")?;
                if t <= 0.0 {
                    return Err(ParseError::new(line, "tolerance must be positive"));
                }
                tol = Some(t);
            }
            other => {
                return Err(ParseError::new(line, format!("unexpected keyword `{other}`")));
            }
        }
    }

    if halfspaces.is_empty() {
        return Err(ParseError::new(total + 1, "document has no halfspace lines"));
    }
    let (_, point) = point.ok_or_else(|| ParseError::new(total + 1, "document has no point line"))?;
    let polyhedron = Polyhedron::new(halfspaces).map_err(|e| ParseError::new(total + 1, e))?;
    Ok(ProblemDocument { polyhedron, point, tol })
}

/// Parses a `polyproj-cone v1` document and validates the basis.
pub fn parse_cone(text: &str) -> Result<ConeDocument, ParseError> {
    let (lines, total) = significant_lines(text);
    expect_header(&lines, total, "polyproj-cone")?;
    let dim = parse_dim(&lines, total)?;

    let mut basis: Vec<(usize, Vector)> = Vec::new();
    let mut point: Option<Vector> = None;
    for (line, tokens) in lines.iter().skip(2) {
        let line = *line;
        match tokens[0] {
            "basis" => {
                if tokens.len() != dim + 1 {
                    return Err(ParseError::new(
                        line,
                        format!("basis vector needs {dim} coordinates, got {}", tokens.len() - 1),
                    ));
                }
                let coords = parse_numbers(&tokens[1..], line, "basis coordinate")?;
                basis.push((line, Vector::new(coords).map_err(|e| ParseError::new(line, e))?));
            }
            "point" => {
                if point.is_some() {
                    return Err(ParseError::new(line, "more than one point line"));
                }
                if tokens.len() != dim + 1 {
                    return Err(ParseError::new(
                        line,
                        format!("point needs {dim} coordinates, got {}", tokens.len() - 1),
                    ));
                }
                let coords = parse_numbers(&tokens[1..], line, "point coordinate")?;
                point = Some(Vector::new(coords).map_err(|e| ParseError::new(line, e))?);
            }
            other => {
                return Err(ParseError::new(line, format!("unexpected keyword `{other}`")));
            }
        }
    }

    if basis.len() != dim {
        return Err(ParseError::new(
            total + 1,
            format!("expected {dim} basis lines, found {}", basis.len()),
        ));
    }
    let first_basis_line = basis[0].0;
    let point = point.ok_or_else(|| ParseError::new(total + 1, "document has no point line"))?;
    let cone = LatticialCone::new(basis.into_iter().map(|(_, b)| b).collect())
        .map_err(|e| ParseError::new(first_basis_line, e))?;
    Ok(ConeDocument { cone, point })
}

/// Parses a `polyproj-lp v1` document. Constraint coordinates are
/// 1-based in the file and 0-based in the API.
pub fn parse_lp(text: &str) -> Result<LpDocument, ParseError> {
    let (lines, total) = significant_lines(text);
    expect_header(&lines, total, "polyproj-lp")?;

    let p = match lines.get(1) {
        Some((line, tokens)) if tokens[0] == "p" => {
            if tokens.len() != 2 {
                return Err(ParseError::new(*line, "expected `p P`"));
            }
            let p = parse_finite(tokens[1], *line, "exponent")?;
            if p <= 1.0 {
                return Err(ParseError::new(*line, format!("exponent p must be > 1, got {p}")));
            }
            p
        }
        Some((line, _)) => return Err(ParseError::new(*line, "expected `p P` after the header")),
        None => return Err(ParseError::new(total + 1, "missing `p P` line")),
    };

    let mut constraints: Vec<(usize, CoordinateConstraint)> = Vec::new();
    let mut point: Option<LpVector> = None;
    for (line, tokens) in lines.iter().skip(2) {
        let line = *line;
        match tokens[0] {
            "coord" => {
                if tokens.len() != 4 {
                    return Err(ParseError::new(line, "expected `coord k delta eta`"));
                }
                let k: usize = tokens[1].parse().map_err(|_| {
                    ParseError::new(line, format!("coordinate index `{}` is not a positive integer", tokens[1]))
                })?;
                if k == 0 {
                    return Err(ParseError::new(line, "coordinate indices are 1-based"));
                }
                let delta = parse_finite(tokens[2], line, "delta")?;
                if delta != 1.0 && delta != -1.0 {
                    return Err(ParseError::new(line, format!("delta must be +1 or -1, got {delta}")));
                }
                let eta = parse_finite(tokens[3], line, "eta")?;
                if constraints.iter().any(|(_, c)| c.coord == k - 1) {
                    return Err(ParseError::new(line, format!("coordinate {k} is constrained twice")));
                }
                constraints.push((line, CoordinateConstraint { coord: k - 1, sign: delta, offset: eta }));
            }
            "point" => {
                if point.is_some() {
                    return Err(ParseError::new(line, "more than one point line"));
                }
                let coords = parse_numbers(&tokens[1..], line, "point coordinate")?;
                point = Some(LpVector::new(coords, p).map_err(|e| ParseError::new(line, e))?);
            }
            other => {
                return Err(ParseError::new(line, format!("unexpected keyword `{other}`")));
            }
        }
    }

    let point = point.ok_or_else(|| ParseError::new(total + 1, "document has no point line"))?;
    let system = CoordinateHalfspaceSystem::new(constraints.into_iter().map(|(_, c)| c).collect())
        .map_err(|e| ParseError::new(total + 1, e))?;
    Ok(LpDocument { system, point })
}

/// One `f64` with 17 significant digits; parses back to the same bits.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

fn push_numbers(line: &mut String, values: &[f64]) {
    for v in values {
        line.push(' ');
        line.push_str(&format_number(*v));
    }
}

/// Canonical text for a polyhedron problem; `parse_problem` inverts it.
pub fn format_problem(doc: &ProblemDocument) -> String {
    let mut out = String::from("polyproj v1\n");
    out.push_str(&format!("dim {}\n", doc.polyhedron.dim()));
    for hs in doc.polyhedron.halfspaces() {
        let mut line = String::from("halfspace");
        push_numbers(&mut line, hs.normal().coords());
        line.push(' ');
        line.push_str(&format_number(hs.offset()));
        out.push_str(&line);
        out.push('\n');
    }
    let mut line = String::from("point");
    push_numbers(&mut line, doc.point.coords());
    out.push_str(&line);
    out.push('\n');
    if let Some(t) = doc.tol {
        out.push_str(&format!("tol {}\n", format_number(t)));
    }
    out
}

/// Canonical text for a cone problem; `parse_cone` inverts it.
pub fn format_cone(doc: &ConeDocument) -> String {
    let mut out = String::from("polyproj-cone v1\n");
    out.push_str(&format!("dim {}\n", doc.cone.n()));
    for b in doc.cone.basis() {
        let mut line = String::from("basis");
        push_numbers(&mut line, b.coords());
        out.push_str(&line);
        out.push('\n');
    }
    let mut line = String::from("point");
    push_numbers(&mut line, doc.point.coords());
    out.push_str(&line);
    out.push('\n');
    out
}

/// Canonical text for a sequence-space problem; `parse_lp` inverts it.
pub fn format_lp(doc: &LpDocument) -> String {
    let mut out = String::from("polyproj-lp v1\n");
    out.push_str(&format!("p {}\n", format_number(doc.point.p())));
    for c in doc.system.constraints() {
        out.push_str(&format!(
            "coord {} {} {}\n",
            c.coord + 1,
            format_number(c.sign),
            format_number(c.offset)
        ));
    }
    let mut line = String::from("point");
    push_numbers(&mut line, doc.point.coords());
    out.push_str(&line);
    out.push('\n');
    out
}
