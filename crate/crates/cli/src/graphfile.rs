//! Graph files: a `vars:` header, then `node X parents P Q` lines for a DAG
//! or `edge A B` lines for an undirected graph. `query:` lines may follow.

use ciapprox::graphsep::{Dag, UGraph};
use ciapprox::{CiTriple, VarSet};

use crate::problem::{diag, entries, parse_statements, parse_vars, Diagnostic};

#[derive(Debug)]
pub struct GraphFile<G> {
    pub vars: Vec<String>,
    pub graph: G,
    pub query: Vec<CiTriple>,
}

enum Line<'a> {
    Node(&'a str, Vec<&'a str>),
    Edge(&'a str, &'a str),
}

struct Raw<'a> {
    vars: Vec<String>,
    lines: Vec<(usize, usize, Line<'a>)>,
    query: Vec<CiTriple>,
}

fn parse_raw(text: &str) -> Result<Raw<'_>, Diagnostic> {
    let mut vars: Option<Vec<String>> = None;
    let mut lines = Vec::new();
    let mut query = Vec::new();
    for e in entries(text) {
        match e {
            Ok(e) if e.key == "vars" => {
                if vars.is_some() {
                    return Err(diag(e.line, e.key_col, "duplicate vars line"));
                }
                vars = Some(parse_vars(&e)?);
            }
            Ok(e) if e.key == "query" => {
                let names = vars.as_deref().ok_or_else(|| diag(e.line, e.key_col, "expected a vars line first"))?;
                query.extend(parse_statements(&e, names)?);
            }
            Ok(e) => return Err(diag(e.line, e.key_col, format!("unknown key {:?}", e.key))),
            Err((line, col, text)) => {
                if vars.is_none() {
                    return Err(diag(line, col, "expected a vars line first"));
                }
                let words: Vec<&str> = text.split_whitespace().collect();
                let parsed = match words.as_slice() {
                    ["node", v] => Line::Node(v, Vec::new()),
                    ["node", v, "parents", ps @ ..] => Line::Node(v, ps.to_vec()),
                    ["edge", a, b] => Line::Edge(a, b),
                    _ => return Err(diag(line, col, "expected 'node V parents ...' or 'edge A B'")),
                };
                lines.push((line, col, parsed));
            }
        }
    }
    let vars = vars.ok_or_else(|| diag(1, 1, "missing vars line"))?;
    Ok(Raw { vars, lines, query })
}

fn index(vars: &[String], name: &str, line: usize, col: usize) -> Result<usize, Diagnostic> {
    vars.iter().position(|v| v == name).ok_or_else(|| diag(line, col, format!("unknown variable {name:?}")))
}

pub fn parse_dag(text: &str) -> Result<GraphFile<Dag>, Diagnostic> {
    let raw = parse_raw(text)?;
    let n = raw.vars.len();
    let mut parents = vec![VarSet::EMPTY; n];
    let mut seen = vec![false; n];
    for (line, col, l) in &raw.lines {
        let Line::Node(v, ps) = l else {
            return Err(diag(*line, *col, "edge lines belong in undirected graph files"));
        };
        let v = index(&raw.vars, v, *line, *col)?;
        if std::mem::replace(&mut seen[v], true) {
            return Err(diag(*line, *col, format!("node {} listed twice", raw.vars[v])));
        }
        for p in ps {
            parents[v] = parents[v] | VarSet::singleton(index(&raw.vars, p, *line, *col)?);
        }
    }
    let graph = Dag::new(parents).map_err(|e| diag(1, 1, e.to_string()))?;
    Ok(GraphFile { vars: raw.vars, graph, query: raw.query })
}

pub fn parse_ugraph(text: &str) -> Result<GraphFile<UGraph>, Diagnostic> {
    let raw = parse_raw(text)?;
    let mut graph = UGraph::new(raw.vars.len());
    for (line, col, l) in &raw.lines {
        let Line::Edge(a, b) = l else {
            return Err(diag(*line, *col, "node lines belong in DAG files"));
        };
        let (a, b) = (index(&raw.vars, a, *line, *col)?, index(&raw.vars, b, *line, *col)?);
        graph.add_edge(a, b).map_err(|e| diag(*line, *col, e.to_string()))?;
    }
    Ok(GraphFile { vars: raw.vars, graph, query: raw.query })
}
