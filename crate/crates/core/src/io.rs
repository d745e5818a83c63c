//! File formats: the poset input dialect, DOT/OFF exports, and the
//! H-representation text layout with exact round-tripping.
//!
//! Poset files are `key: value` entries with bracketed lists; `#` starts a
//! comment. A finite poset has `elements`/`relations`, an affine poset is
//! recognized by its `order` field:
//!
//! ```text
//! elements: [a, b, c]
//! relations: [[a, b], [b, c]]
//! ```
//!
//! ```text
//! order: 2
//! generators: [[0, 1], [1, 2]]
//! ```

use std::fmt::Write as _;

use num_traits::Zero;
use thiserror::Error;

use crate::affine::{AffineError, AffinePoset};
use crate::oracle::{brute_force_vertices, count_edges, OracleError, VertexCertificate};
use crate::poset::{Poset, PosetError};
use crate::system::{parse_rat, rat_string, HalfSpaceSystem, Label, LinearFunctional, Rat};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Affine(#[from] AffineError),
    #[error("OFF export requires a 3-dimensional bounded instance: {0}")]
    Off(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug)]
pub enum InputObject {
    Finite(Poset),
    Affine(AffinePoset),
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Atom(String),
    List(Vec<Value>),
}

impl Value {
    fn atom(&self) -> Result<&str, FormatError> {
        match self {
            Value::Atom(s) => Ok(s),
            Value::List(_) => Err(FormatError::Parse("expected an atom, found a list".into())),
        }
    }

    fn list(&self) -> Result<&[Value], FormatError> {
        match self {
            Value::List(items) => Ok(items),
            Value::Atom(s) => Err(FormatError::Parse(format!("expected a list, found `{s}`"))),
        }
    }

    fn pair(&self) -> Result<(&str, &str), FormatError> {
        let items = self.list()?;
        if items.len() != 2 {
            return Err(FormatError::Parse(format!(
                "expected a pair, found {} entries",
                items.len()
            )));
        }
        Ok((items[0].atom()?, items[1].atom()?))
    }
}

fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        let mut atom = String::new();
        for ch in line.chars() {
            match ch {
                '[' | ']' | ',' | ':' => {
                    if !atom.is_empty() {
                        tokens.push(std::mem::take(&mut atom));
                    }
                    tokens.push(ch.to_string());
                }
                c if c.is_whitespace() => {
                    if !atom.is_empty() {
                        tokens.push(std::mem::take(&mut atom));
                    }
                }
                c => atom.push(c),
            }
        }
        if !atom.is_empty() {
            tokens.push(atom);
        }
    }
    tokens
}

fn parse_value(tokens: &[String], pos: &mut usize) -> Result<Value, FormatError> {
    let tok = tokens
        .get(*pos)
        .ok_or_else(|| FormatError::Parse("unexpected end of input".into()))?;
    if tok == "[" {
        *pos += 1;
        let mut items = Vec::new();
        loop {
            match tokens.get(*pos).map(String::as_str) {
                Some("]") => {
                    *pos += 1;
                    return Ok(Value::List(items));
                }
                Some(",") if !items.is_empty() => {
                    *pos += 1;
                }
                Some(_) if items.is_empty() => {}
                _ => {
                    return Err(FormatError::Parse("malformed list".into()));
                }
            }
            if tokens.get(*pos).map(String::as_str) == Some("]") {
                *pos += 1;
                return Ok(Value::List(items));
            }
            items.push(parse_value(tokens, pos)?);
        }
    } else if tok == "]" || tok == "," || tok == ":" {
        Err(FormatError::Parse(format!("unexpected `{tok}`")))
    } else {
        *pos += 1;
        Ok(Value::Atom(tok.clone()))
    }
}

fn parse_entries(text: &str) -> Result<Vec<(String, Value)>, FormatError> {
    let tokens = tokenize(text);
    let mut entries = Vec::new();
    let mut pos = 0;
    while pos < tokens.len() {
        let key = tokens[pos].clone();
        if key == "[" || key == "]" || key == "," || key == ":" {
            return Err(FormatError::Parse(format!("expected a key, found `{key}`")));
        }
        pos += 1;
        if tokens.get(pos).map(String::as_str) != Some(":") {
            return Err(FormatError::Parse(format!("missing `:` after `{key}`")));
        }
        pos += 1;
        let value = parse_value(&tokens, &mut pos)?;
        entries.push((key, value));
    }
    Ok(entries)
}

/// Parse a poset file; the presence of `order` selects the affine dialect.
pub fn parse_input(text: &str) -> Result<InputObject, FormatError> {
    let entries = parse_entries(text)?;
    let get = |key: &str| entries.iter().find(|(k, _)| k == key).map(|(_, v)| v);
    if let Some(order) = get("order") {
        let n: usize = order
            .atom()?
            .parse()
            .map_err(|_| FormatError::Parse("order must be a positive integer".into()))?;
        let generators = match get("generators") {
            Some(v) => v
                .list()?
                .iter()
                .map(|pair| {
                    let (a, b) = pair.pair()?;
                    let parse = |s: &str| {
                        s.parse::<i64>()
                            .map_err(|_| FormatError::Parse(format!("bad integer `{s}`")))
                    };
                    Ok((parse(a)?, parse(b)?))
                })
                .collect::<Result<Vec<_>, FormatError>>()?,
            None => Vec::new(),
        };
        Ok(InputObject::Affine(AffinePoset::build(n, &generators)?))
    } else {
        let elements: Vec<String> = get("elements")
            .ok_or_else(|| FormatError::Parse("missing `elements`".into()))?
            .list()?
            .iter()
            .map(|v| v.atom().map(str::to_string))
            .collect::<Result<_, _>>()?;
        let relations: Vec<(String, String)> = match get("relations") {
            Some(v) => v
                .list()?
                .iter()
                .map(|pair| pair.pair().map(|(a, b)| (a.to_string(), b.to_string())))
                .collect::<Result<_, _>>()?,
            None => Vec::new(),
        };
        Ok(InputObject::Finite(Poset::build(&elements, &relations)?))
    }
}

/// Serialize a finite poset in the input dialect (relations = covers).
pub fn poset_to_text(p: &Poset) -> String {
    let elements = p.element_names().join(", ");
    let relations: Vec<String> = p
        .covers()
        .iter()
        .map(|&(a, b)| format!("[{}, {}]", p.element_name(a), p.element_name(b)))
        .collect();
    format!(
        "elements: [{elements}]\nrelations: [{}]\n",
        relations.join(", ")
    )
}

/// Serialize an affine poset in the input dialect.
pub fn affine_to_text(ap: &AffinePoset) -> String {
    let generators: Vec<String> = ap
        .generators()
        .iter()
        .map(|&(i, j)| format!("[{i}, {j}]"))
        .collect();
    format!(
        "order: {}\ngenerators: [{}]\n",
        ap.order(),
        generators.join(", ")
    )
}

fn label_token(label: &Label) -> String {
    match label {
        Label::Tube(members) => format!(
            "tube {}",
            members
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ),
        Label::Cover(i, j) => format!("cover {i},{j}"),
        Label::Orbit(members) => format!(
            "orbit {}",
            members
                .iter()
                .map(|z| z.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ),
    }
}

fn parse_label_token(s: &str) -> Result<Label, FormatError> {
    let (kind, rest) = s
        .split_once(' ')
        .ok_or_else(|| FormatError::Parse(format!("bad label `{s}`")))?;
    let ints = |t: &str| -> Result<Vec<i64>, FormatError> {
        t.split(',')
            .map(|x| {
                x.trim()
                    .parse::<i64>()
                    .map_err(|_| FormatError::Parse(format!("bad label index `{x}`")))
            })
            .collect()
    };
    match kind {
        "tube" => Ok(Label::Tube(
            ints(rest)?.into_iter().map(|z| z as usize).collect(),
        )),
        "cover" => {
            let v = ints(rest)?;
            if v.len() != 2 {
                return Err(FormatError::Parse(format!("bad cover label `{s}`")));
            }
            Ok(Label::Cover(v[0] as usize, v[1] as usize))
        }
        "orbit" => Ok(Label::Orbit(ints(rest)?)),
        _ => Err(FormatError::Parse(format!("unknown label kind `{kind}`"))),
    }
}

/// Write the H-representation in a cdd-style text layout. Each row encodes
/// `b + a.x >= 0` (or `= 0` for linearity rows, listed first); comment lines
/// carry the variable names, the row labels, and the original right-hand
/// sides, so a re-import reproduces the system exactly.
pub fn write_ine(sys: &HalfSpaceSystem) -> String {
    let mut out = String::from("* posetpoly ine v1\n");
    for (i, name) in sys.var_names.iter().enumerate() {
        let _ = writeln!(out, "* var {i}: {name}");
    }
    let mut row = 1;
    for (_, rhs) in &sys.equalities {
        let _ = writeln!(out, "* row {row}: eq ; rhs {}", rat_string(rhs));
        row += 1;
    }
    for (label, _, rhs) in &sys.inequalities {
        let _ = writeln!(
            out,
            "* row {row}: {} ; rhs {}",
            label_token(label),
            rat_string(rhs)
        );
        row += 1;
    }
    out.push_str("H-representation\n");
    if !sys.equalities.is_empty() {
        out.push_str("linearity");
        let _ = write!(out, " {}", sys.equalities.len());
        for k in 1..=sys.equalities.len() {
            let _ = write!(out, " {k}");
        }
        out.push('\n');
    }
    out.push_str("begin\n");
    let m = sys.equalities.len() + sys.inequalities.len();
    let _ = writeln!(out, "{m} {} rational", sys.dim() + 1);
    let mut write_row = |f: &LinearFunctional, rhs: &Rat| {
        let b = &f.constant - rhs;
        let mut line = rat_string(&b);
        for c in &f.coeffs {
            line.push(' ');
            line.push_str(&rat_string(c));
        }
        out.push_str(&line);
        out.push('\n');
    };
    for (f, rhs) in &sys.equalities {
        write_row(f, rhs);
    }
    for (_, f, rhs) in &sys.inequalities {
        write_row(f, rhs);
    }
    out.push_str("end\n");
    out
}

/// Parse the layout produced by [`write_ine`] back into the identical
/// system.
pub fn read_ine(text: &str) -> Result<HalfSpaceSystem, FormatError> {
    let mut var_names: Vec<String> = Vec::new();
    let mut row_meta: Vec<(Option<Label>, Rat)> = Vec::new();
    let mut linearity: Vec<usize> = Vec::new();
    let mut body: Vec<Vec<Rat>> = Vec::new();
    let mut expect: Option<(usize, usize)> = None;
    let mut in_body = false;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('*') {
            let comment = comment.trim();
            if let Some(rest) = comment.strip_prefix("var ") {
                let (_, name) = rest
                    .split_once(':')
                    .ok_or_else(|| FormatError::Parse("bad var comment".into()))?;
                var_names.push(name.trim().to_string());
            } else if let Some(rest) = comment.strip_prefix("row ") {
                let (_, entry) = rest
                    .split_once(':')
                    .ok_or_else(|| FormatError::Parse("bad row comment".into()))?;
                let (label_part, rhs_part) = entry
                    .split_once(';')
                    .ok_or_else(|| FormatError::Parse("row comment missing rhs".into()))?;
                let rhs_text = rhs_part
                    .trim()
                    .strip_prefix("rhs")
                    .ok_or_else(|| FormatError::Parse("row comment missing rhs".into()))?
                    .trim();
                let rhs = parse_rat(rhs_text).map_err(|e| FormatError::Parse(e.to_string()))?;
                let label_part = label_part.trim();
                let label = if label_part == "eq" {
                    None
                } else {
                    Some(parse_label_token(label_part)?)
                };
                row_meta.push((label, rhs));
            }
            continue;
        }
        if line == "H-representation" {
            continue;
        }
        if let Some(rest) = line.strip_prefix("linearity") {
            let nums: Vec<usize> = rest
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| FormatError::Parse(format!("bad linearity index `{t}`")))
                })
                .collect::<Result<_, _>>()?;
            if nums.is_empty() || nums.len() != nums[0] + 1 {
                return Err(FormatError::Parse("malformed linearity line".into()));
            }
            linearity = nums[1..].to_vec();
            continue;
        }
        if line == "begin" {
            in_body = true;
            continue;
        }
        if line == "end" {
            in_body = false;
            continue;
        }
        if in_body {
            if expect.is_none() {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 3 || parts[2] != "rational" {
                    return Err(FormatError::Parse("malformed size line".into()));
                }
                let rows = parts[0]
                    .parse::<usize>()
                    .map_err(|_| FormatError::Parse("bad row count".into()))?;
                let cols = parts[1]
                    .parse::<usize>()
                    .map_err(|_| FormatError::Parse("bad column count".into()))?;
                expect = Some((rows, cols));
                continue;
            }
            let row: Vec<Rat> = line
                .split_whitespace()
                .map(|t| parse_rat(t).map_err(|e| FormatError::Parse(e.to_string())))
                .collect::<Result<_, _>>()?;
            body.push(row);
        }
    }
    let (rows, cols) = expect.ok_or_else(|| FormatError::Parse("missing begin block".into()))?;
    if body.len() != rows || row_meta.len() != rows {
        return Err(FormatError::Parse("row count mismatch".into()));
    }
    let dim = cols - 1;
    if var_names.len() != dim {
        return Err(FormatError::Parse("variable count mismatch".into()));
    }
    let mut sys = HalfSpaceSystem::new(var_names);
    for (k, row) in body.iter().enumerate() {
        if row.len() != cols {
            return Err(FormatError::Parse("row width mismatch".into()));
        }
        let (label, rhs) = &row_meta[k];
        // Row encodes b = constant - rhs.
        let constant = &row[0] + rhs;
        let f = LinearFunctional {
            coeffs: row[1..].to_vec(),
            constant,
        };
        let is_eq = linearity.contains(&(k + 1));
        match (is_eq, label) {
            (true, None) => sys.push_equality(f, rhs.clone()),
            (false, Some(l)) => sys
                .push_inequality(l.clone(), f, rhs.clone())
                .map_err(|e| FormatError::Parse(e.to_string()))?,
            _ => {
                return Err(FormatError::Parse(
                    "row kind disagrees with linearity".into(),
                ))
            }
        }
    }
    Ok(sys)
}

/// OFF mesh of a 3-dimensional bounded instance: vertices are mapped through
/// an orthonormalized chart of the equality subspace (floating point, for
/// viewers only; the combinatorics stays exact).
pub fn write_off(sys: &HalfSpaceSystem) -> Result<String, FormatError> {
    let vertices = brute_force_vertices(sys)?;
    let eq_rows: Vec<Vec<Rat>> = sys
        .equalities
        .iter()
        .map(|(f, _)| f.coeffs.clone())
        .collect();
    let d = sys.dim() - crate::linalg::rank(&eq_rows);
    if d != 3 {
        return Err(FormatError::Off(format!("dimension is {d}")));
    }
    if vertices.is_empty() {
        return Err(FormatError::Off("no vertices".into()));
    }
    // Orthonormal chart of the kernel of the equality rows.
    let kernel = crate::linalg::nullspace(&eq_rows, sys.dim());
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in &kernel {
        let mut w: Vec<f64> = v.iter().map(rat_to_f64).collect();
        for b in &basis {
            let dot: f64 = w.iter().zip(b).map(|(a, c)| a * c).sum();
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= dot * bi;
            }
        }
        let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for wi in w.iter_mut() {
                *wi /= norm;
            }
            basis.push(w);
        }
    }
    if basis.len() != 3 {
        return Err(FormatError::Off("chart construction failed".into()));
    }
    let origin = &vertices[0].point;
    let chart = |p: &crate::system::Point| -> [f64; 3] {
        let diff: Vec<f64> =
            p.0.iter()
                .zip(&origin.0)
                .map(|(a, b)| rat_to_f64(&(a - b)))
                .collect();
        let mut out = [0.0; 3];
        for (k, b) in basis.iter().enumerate() {
            out[k] = diff.iter().zip(b).map(|(a, c)| a * c).sum();
        }
        out
    };

    let mut faces = Vec::new();
    for (label, f, _) in &sys.inequalities {
        let cycle = facet_cycle(&vertices, label)?;
        let ordered = orient_cycle(cycle, &vertices, f, &chart);
        faces.push(ordered);
    }
    let ne = count_edges(&vertices, 3);
    let mut out = String::from("OFF\n");
    let _ = writeln!(out, "{} {} {ne}", vertices.len(), faces.len());
    for v in &vertices {
        let [x, y, z] = chart(&v.point);
        let _ = writeln!(out, "{x:.9} {y:.9} {z:.9}");
    }
    for face in &faces {
        let indices: Vec<String> = face.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(out, "{} {}", face.len(), indices.join(" "));
    }
    Ok(out)
}

fn rat_to_f64(x: &Rat) -> f64 {
    let num = x.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
    let den = x.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
    num / den
}

/// Order the vertices of one facet of a simple 3-polytope into a cycle by
/// walking shared-facet adjacency.
fn facet_cycle(vertices: &[VertexCertificate], label: &Label) -> Result<Vec<usize>, FormatError> {
    let on_facet: Vec<usize> = (0..vertices.len())
        .filter(|&i| vertices[i].tight.contains(label))
        .collect();
    if on_facet.len() < 3 {
        return Err(FormatError::Off("facet with fewer than 3 vertices".into()));
    }
    let adjacent = |a: usize, b: usize| -> bool {
        vertices[a]
            .tight
            .iter()
            .filter(|l| vertices[b].tight.contains(l))
            .count()
            == 2
    };
    let mut cycle = vec![on_facet[0]];
    let mut prev = usize::MAX;
    while cycle.len() < on_facet.len() {
        let here = *cycle.last().unwrap();
        let next = on_facet
            .iter()
            .find(|&&v| v != here && v != prev && adjacent(here, v) && !cycle.contains(&v))
            .copied()
            .ok_or_else(|| FormatError::Off("facet walk got stuck".into()))?;
        prev = here;
        cycle.push(next);
    }
    Ok(cycle)
}

/// Flip the cycle if its chart-space normal points inward (the polytope lies
/// on the `f >= b` side, so outward is the direction of decreasing f).
fn orient_cycle(
    cycle: Vec<usize>,
    vertices: &[VertexCertificate],
    f: &LinearFunctional,
    chart: &dyn Fn(&crate::system::Point) -> [f64; 3],
) -> Vec<usize> {
    if cycle.len() < 3 {
        return cycle;
    }
    let p0 = chart(&vertices[cycle[0]].point);
    let p1 = chart(&vertices[cycle[1]].point);
    let p2 = chart(&vertices[cycle[2]].point);
    let u = [p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]];
    let v = [p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]];
    let normal = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    // Chart image of the gradient of f; the chart is affine, so the image of
    // the coefficient vector minus the image of the origin is exact.
    let grad = {
        let zero = crate::system::Point(vec![Rat::zero(); f.dim()]);
        let coeff_pt = crate::system::Point(f.coeffs.clone());
        let base = chart(&zero);
        let tip = chart(&coeff_pt);
        [tip[0] - base[0], tip[1] - base[1], tip[2] - base[2]]
    };
    let dot: f64 = normal.iter().zip(&grad).map(|(a, b)| a * b).sum();
    if dot > 0.0 {
        cycle.into_iter().rev().collect()
    } else {
        cycle
    }
}
