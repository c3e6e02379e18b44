//! Pajek text formats. Writers emit CR/LF line endings; the reader accepts
//! CR/LF and bare LF.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Edge, SemanticNetwork, Vertex};
use crate::matrix::SimilarityMatrix;

const CRLF: &str = "\r\n";

/// Quoted label with embedded double quotes turned into apostrophes.
pub fn quote_label(label: &str) -> String {
    let clean: String = label
        .chars()
        .map(|c| match c {
            '"' => '\'',
            '\r' | '\n' => ' ',
            c => c,
        })
        .collect();
    format!("\"{clean}\"")
}

fn fixed4(v: f64) -> String {
    let s = format!("{v:.4}");
    // avoid "-0.0000"
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Positive weights never round down to zero.
fn weight4(w: f64) -> String {
    fixed4(if w > 0.0 { w.max(0.0001) } else { w })
}

pub fn write_pajek_net(network: &SemanticNetwork) -> Vec<u8> {
    let mut out = String::new();
    let _ = write!(out, "*Vertices {}{CRLF}", network.n_vertices());
    for (i, v) in network.vertices().iter().enumerate() {
        let _ = write!(out, "{} {}", i + 1, quote_label(&v.label));
        if let Some((x, y)) = v.position {
            let _ = write!(out, " {} {} 0.5000", fixed4(x), fixed4(y));
            if let Some(s) = v.size {
                let s = fixed4(s);
                let _ = write!(out, " x_fact {s} y_fact {s}");
            }
        }
        out.push_str(CRLF);
    }
    out.push_str("*Edges");
    out.push_str(CRLF);
    for e in network.edges() {
        let _ = write!(out, "{} {} {}{CRLF}", e.u + 1, e.v + 1, weight4(e.weight));
    }
    out.into_bytes()
}

pub fn write_pajek_matrix(matrix: &SimilarityMatrix) -> Vec<u8> {
    let mut out = String::new();
    let _ = write!(out, "*Vertices {}{CRLF}", matrix.len());
    for (i, label) in matrix.labels().iter().enumerate() {
        let _ = write!(out, "{} {}{CRLF}", i + 1, quote_label(label));
    }
    out.push_str("*Matrix");
    out.push_str(CRLF);
    for i in 0..matrix.len() {
        let row: Vec<String> = (0..matrix.len()).map(|j| fixed4(matrix.get(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push_str(CRLF);
    }
    out.into_bytes()
}

/// `.clu` partition: one class number per vertex.
pub fn write_partition_clu(classes: &[usize], n_vertices: usize) -> Result<Vec<u8>> {
    if classes.len() != n_vertices {
        return Err(Error::LengthMismatch {
            expected: n_vertices,
            found: classes.len(),
        });
    }
    let mut out = format!("*Vertices {n_vertices}{CRLF}");
    for c in classes {
        let _ = write!(out, "{c}{CRLF}");
    }
    Ok(out.into_bytes())
}

/// `.vec` vector: one value per vertex, four decimals.
pub fn write_vector_vec(values: &[f64], n_vertices: usize) -> Result<Vec<u8>> {
    if values.len() != n_vertices {
        return Err(Error::LengthMismatch {
            expected: n_vertices,
            found: values.len(),
        });
    }
    let mut out = format!("*Vertices {n_vertices}{CRLF}");
    for v in values {
        let _ = write!(out, "{}{CRLF}", fixed4(*v));
    }
    Ok(out.into_bytes())
}

#[derive(Clone, Debug)]
pub struct ParsedNet {
    pub network: SemanticNetwork,
    pub warnings: Vec<String>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Splits a vertex line into id, label and the remaining fields.
fn split_vertex_line(line: &str, lineno: usize) -> Result<(usize, String, Vec<&str>)> {
    let line = line.trim_start();
    let id_end = line.find(char::is_whitespace).unwrap_or(line.len());
    let id: usize = line[..id_end]
        .parse()
        .map_err(|_| parse_err(lineno, format!("bad vertex id {:?}", &line[..id_end])))?;
    let rest = line[id_end..].trim_start();
    let (label, rest) = if let Some(stripped) = rest.strip_prefix('"') {
        let close = stripped
            .find('"')
            .ok_or_else(|| parse_err(lineno, "unterminated label"))?;
        (stripped[..close].to_string(), &stripped[close + 1..])
    } else if rest.is_empty() {
        (id.to_string(), rest)
    } else {
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        (rest[..end].to_string(), &rest[end..])
    };
    Ok((id, label, rest.split_whitespace().collect()))
}

#[derive(PartialEq)]
enum Section {
    Vertices,
    Edges,
    Arcs,
}

/// Parses a Pajek `.net` file. `*Arcs` are folded into undirected edges.
pub fn read_pajek_net(bytes: &[u8]) -> Result<ParsedNet> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        parse_err(line, "invalid UTF-8")
    })?;
    let mut warnings = Vec::new();
    let mut lines = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('%'))
        .peekable();

    if let Some((_, l)) = lines.peek() {
        if l.trim_start().to_ascii_lowercase().starts_with("*network") {
            lines.next();
        }
    }
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing *Vertices header"))?;
    let mut parts = header.split_whitespace();
    let n: usize = match (parts.next(), parts.next()) {
        (Some(tag), Some(count)) if tag.eq_ignore_ascii_case("*vertices") => count
            .parse()
            .map_err(|_| parse_err(header_line, format!("bad vertex count {count:?}")))?,
        _ => return Err(parse_err(header_line, "expected \"*Vertices <n>\"")),
    };

    let mut vertices: Vec<Vertex> = (1..=n).map(|i| Vertex::new(i.to_string())).collect();
    let mut seen_vertex = vec![false; n];
    let mut edges: Vec<Edge> = Vec::new();
    let mut edge_index = std::collections::BTreeMap::new();
    let mut section = Section::Vertices;
    let mut warned_arcs = false;
    let mut skipped_attrs = std::collections::BTreeSet::new();

    for (lineno, line) in lines {
        let trimmed = line.trim();
        if trimmed.starts_with('*') {
            let tag = trimmed.split_whitespace().next().unwrap_or("").to_ascii_lowercase();
            section = match tag.as_str() {
                "*edges" => Section::Edges,
                "*arcs" => Section::Arcs,
                other => return Err(parse_err(lineno, format!("unsupported section {other}"))),
            };
            if section == Section::Arcs && !warned_arcs {
                warnings.push(format!(
                    "line {lineno}: *Arcs folded into undirected edges"
                ));
                warned_arcs = true;
            }
            continue;
        }
        match section {
            Section::Vertices => {
                let (id, label, fields) = split_vertex_line(line, lineno)?;
                if id == 0 || id > n {
                    return Err(parse_err(lineno, format!("vertex id {id} out of range 1..={n}")));
                }
                if seen_vertex[id - 1] {
                    return Err(parse_err(lineno, format!("vertex {id} defined twice")));
                }
                seen_vertex[id - 1] = true;
                let v = &mut vertices[id - 1];
                v.label = label;
                let mut coords = Vec::new();
                let mut rest = fields.as_slice();
                while coords.len() < 3 {
                    match rest.first().and_then(|f| f.parse::<f64>().ok()) {
                        Some(x) => {
                            coords.push(x);
                            rest = &rest[1..];
                        }
                        None => break,
                    }
                }
                match coords.len() {
                    0 => {}
                    1 => return Err(parse_err(lineno, "vertex has x but no y coordinate")),
                    _ => v.position = Some((coords[0], coords[1])),
                }
                while let Some((key, tail)) = rest.split_first() {
                    match key.to_ascii_lowercase().as_str() {
                        "x_fact" | "y_fact" => {
                            let value: f64 = tail
                                .first()
                                .and_then(|s| s.parse().ok())
                                .ok_or_else(|| parse_err(lineno, format!("{key} needs a number")))?;
                            if key.eq_ignore_ascii_case("x_fact") {
                                v.size = Some(value);
                            }
                            rest = &tail[1..];
                        }
                        other => {
                            // attribute name plus its value, if one follows
                            skipped_attrs.insert(other.to_string());
                            rest = match tail.first() {
                                Some(next) if !next.to_ascii_lowercase().ends_with("_fact") => {
                                    &tail[1..]
                                }
                                _ => tail,
                            };
                        }
                    }
                }
            }
            Section::Edges | Section::Arcs => {
                let mut f = trimmed.split_whitespace();
                let mut endpoint = |what: &str| -> Result<usize> {
                    let raw = f
                        .next()
                        .ok_or_else(|| parse_err(lineno, format!("missing {what} endpoint")))?;
                    let id: usize = raw
                        .parse()
                        .map_err(|_| parse_err(lineno, format!("bad endpoint {raw:?}")))?;
                    if id == 0 || id > n {
                        return Err(parse_err(
                            lineno,
                            format!("endpoint {id} out of range 1..={n}"),
                        ));
                    }
                    Ok(id - 1)
                };
                let a = endpoint("first")?;
                let b = endpoint("second")?;
                let weight = match f.next() {
                    Some(w) => w
                        .parse::<f64>()
                        .map_err(|_| parse_err(lineno, format!("bad weight {w:?}")))?,
                    None => 1.0,
                };
                if f.next().is_some() {
                    skipped_attrs.insert("edge attributes".to_string());
                }
                if a == b {
                    warnings.push(format!("line {lineno}: self-loop on {} skipped", a + 1));
                    continue;
                }
                if weight.is_nan() || weight <= 0.0 {
                    warnings.push(format!("line {lineno}: non-positive weight skipped"));
                    continue;
                }
                let key = (a.min(b), a.max(b));
                if edge_index.contains_key(&key) {
                    warnings.push(format!(
                        "line {lineno}: duplicate edge {}-{} ignored",
                        key.0 + 1,
                        key.1 + 1
                    ));
                    continue;
                }
                edge_index.insert(key, edges.len());
                edges.push(Edge {
                    u: key.0,
                    v: key.1,
                    weight,
                });
            }
        }
    }
    for attr in skipped_attrs {
        warnings.push(format!("skipped unsupported attribute {attr:?}"));
    }
    let network = SemanticNetwork::new(vertices, edges)?;
    Ok(ParsedNet { network, warnings })
}
