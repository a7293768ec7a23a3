//! Pajek network (`.net`), partition (`.clu`) and vector (`.vec`) files.
//!
//! Files are UTF-8 with LF line endings. Vertices are numbered from 1 in
//! node order. Edge weights and vertex sizes carry six decimals.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::SemanticGraph;
use crate::error::{decode_utf8, Error, Result};

fn with_extension(basename: &Path, ext: &str) -> PathBuf {
    let mut s = basename.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Paths of the three files written for `basename`.
pub fn paths(basename: &Path) -> [PathBuf; 3] {
    ["net", "clu", "vec"].map(|ext| with_extension(basename, ext))
}

pub fn render_net(graph: &SemanticGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "*Vertices {}", graph.nodes.len());
    for (i, node) in graph.nodes.iter().enumerate() {
        // Pajek has no escape for quotes inside labels
        let _ = writeln!(out, "{} \"{}\"", i + 1, node.label.replace('"', "'"));
    }
    out.push_str("*Edges\n");
    for e in &graph.edges.edges {
        let _ = writeln!(out, "{} {} {:.6}", e.source + 1, e.target + 1, e.weight);
    }
    out
}

pub fn render_clu(graph: &SemanticGraph) -> String {
    let mut out = format!("*Vertices {}\n", graph.nodes.len());
    for node in &graph.nodes {
        let _ = writeln!(out, "{}", node.cluster);
    }
    out
}

pub fn render_vec(graph: &SemanticGraph) -> String {
    let mut out = format!("*Vertices {}\n", graph.nodes.len());
    for node in &graph.nodes {
        let _ = writeln!(out, "{:.6}", node.size);
    }
    out
}

/// Writes `basename.net`, `basename.clu` and `basename.vec`.
pub fn write_pajek(graph: &SemanticGraph, basename: impl AsRef<Path>) -> Result<[PathBuf; 3]> {
    let files = paths(basename.as_ref());
    let bodies = [render_net(graph), render_clu(graph), render_vec(graph)];
    for (path, body) in files.iter().zip(bodies) {
        std::fs::write(path, body).map_err(|e| Error::io(path, e))?;
    }
    Ok(files)
}

/// A network as read back from Pajek files, with 0-based vertex indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PajekGraph {
    pub labels: Vec<String>,
    pub edges: Vec<(usize, usize, f64)>,
    pub clusters: Vec<usize>,
    pub sizes: Vec<f64>,
}

fn vertices_header(line: Option<&str>) -> std::result::Result<usize, String> {
    let line = line.ok_or("missing *Vertices header")?;
    let mut parts = line.split_whitespace();
    match (parts.next(), parts.next()) {
        (Some(tag), Some(n)) if tag.eq_ignore_ascii_case("*vertices") => {
            n.parse().map_err(|_| format!("bad vertex count `{n}`"))
        }
        _ => Err(format!("expected `*Vertices n`, got `{line}`")),
    }
}

/// Vertex labels and 0-based weighted edges.
pub type NetContents = (Vec<String>, Vec<(usize, usize, f64)>);

pub fn parse_net(text: &str) -> std::result::Result<NetContents, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let n = vertices_header(lines.next())?;
    let mut labels = Vec::with_capacity(n);
    for expected in 1..=n {
        let line = lines.next().ok_or("fewer vertex lines than declared")?;
        let (id, rest) = line
            .trim()
            .split_once(char::is_whitespace)
            .ok_or_else(|| format!("bad vertex line `{line}`"))?;
        if id.parse::<usize>().ok() != Some(expected) {
            return Err(format!("vertex ids out of sequence at `{line}`"));
        }
        let label = rest
            .trim()
            .strip_prefix('"')
            .and_then(|r| r.strip_suffix('"'))
            .ok_or_else(|| format!("unquoted label in `{line}`"))?;
        labels.push(label.to_string());
    }
    match lines.next() {
        Some(l) if l.trim().eq_ignore_ascii_case("*edges") => {}
        other => return Err(format!("expected *Edges, got {other:?}")),
    }
    let mut edges = Vec::new();
    for line in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(format!("bad edge line `{line}`"));
        }
        let parse_vertex = |s: &str| -> std::result::Result<usize, String> {
            match s.parse::<usize>() {
                Ok(v) if (1..=n).contains(&v) => Ok(v - 1),
                _ => Err(format!("bad vertex `{s}` in `{line}`")),
            }
        };
        let w: f64 = f[2]
            .parse()
            .map_err(|_| format!("bad weight in `{line}`"))?;
        edges.push((parse_vertex(f[0])?, parse_vertex(f[1])?, w));
    }
    Ok((labels, edges))
}

fn parse_column<T: std::str::FromStr>(text: &str) -> std::result::Result<Vec<T>, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let n = vertices_header(lines.next())?;
    let values = lines
        .map(|l| {
            l.trim()
                .parse::<T>()
                .map_err(|_| format!("bad value `{l}`"))
        })
        .collect::<std::result::Result<Vec<T>, String>>()?;
    if values.len() != n {
        return Err(format!(
            "declared {n} vertices, found {} values",
            values.len()
        ));
    }
    Ok(values)
}

pub fn parse_clu(text: &str) -> std::result::Result<Vec<usize>, String> {
    parse_column(text)
}

pub fn parse_vec(text: &str) -> std::result::Result<Vec<f64>, String> {
    parse_column(text)
}

/// Reads the three files written by [`write_pajek`].
pub fn read_pajek(basename: impl AsRef<Path>) -> Result<PajekGraph> {
    let [net, clu, vec] = paths(basename.as_ref());
    let read = |p: &PathBuf| -> Result<String> {
        let bytes = std::fs::read(p).map_err(|e| Error::io(p, e))?;
        decode_utf8(&bytes)
            .map(str::to_owned)
            .map_err(|e| Error::parse(p, e.to_string()))
    };
    let (labels, edges) = parse_net(&read(&net)?).map_err(|m| Error::parse(&net, m))?;
    let clusters = parse_clu(&read(&clu)?).map_err(|m| Error::parse(&clu, m))?;
    let sizes = parse_vec(&read(&vec)?).map_err(|m| Error::parse(&vec, m))?;
    if clusters.len() != labels.len() || sizes.len() != labels.len() {
        return Err(Error::parse(
            &net,
            "vertex counts differ between .net, .clu and .vec",
        ));
    }
    Ok(PajekGraph {
        labels,
        edges,
        clusters,
        sizes,
    })
}
