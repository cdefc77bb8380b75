//! Problem files: a `vars:` line, then `assume:`, `query:`, `mode:` and
//! parameter lines. `#` starts a comment.

use std::fmt;

use ciapprox::shannon::parse_rational;
use ciapprox::{parse_triple, CiTriple};
use num_rational::BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Positive,
    Shannon,
    SemiGraphoid,
    Graphoid,
    MinLambda,
    CheckLambda,
}

impl Mode {
    pub const ALL: [Mode; 6] =
        [Mode::Positive, Mode::Shannon, Mode::SemiGraphoid, Mode::Graphoid, Mode::MinLambda, Mode::CheckLambda];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Positive => "positive",
            Mode::Shannon => "shannon",
            Mode::SemiGraphoid => "semigraphoid",
            Mode::Graphoid => "graphoid",
            Mode::MinLambda => "minlambda",
            Mode::CheckLambda => "checklambda",
        }
    }

    pub fn from_name(s: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.name() == s)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Params {
    pub eps: Option<f64>,
    pub lambda: Option<BigRational>,
    pub x: Option<f64>,
    pub y: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub vars: Vec<String>,
    pub assume: Vec<CiTriple>,
    pub query: Vec<CiTriple>,
    pub mode: Option<Mode>,
    pub params: Params,
}

/// A parse failure with a 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for Diagnostic {}

pub(crate) fn diag(line: usize, col: usize, message: impl Into<String>) -> Diagnostic {
    Diagnostic { line, col, message: message.into() }
}

/// A non-blank line split at its first `:`, with the column where the
/// value starts.
pub(crate) struct Entry<'a> {
    pub line: usize,
    pub key: &'a str,
    pub key_col: usize,
    pub value: &'a str,
    pub value_col: usize,
}

fn col_of(line: &str, byte: usize) -> usize {
    line[..byte].chars().count() + 1
}

/// Strip comments and blank lines; `key: value` lines become entries, other
/// lines are handed back as `(line, col, text)`.
pub(crate) fn entries(text: &str) -> impl Iterator<Item = Result<Entry<'_>, (usize, usize, &str)>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap();
        let start = line.len() - line.trim_start().len();
        if line.trim().is_empty() {
            return None;
        }
        Some(match line.split_once(':') {
            Some((k, v)) if !k.trim().contains(char::is_whitespace) => {
                let vstart = k.len() + 1 + (v.len() - v.trim_start().len());
                Ok(Entry {
                    line: i + 1,
                    key: k.trim(),
                    key_col: col_of(line, start),
                    value: v.trim(),
                    value_col: col_of(line, vstart),
                })
            }
            _ => Err((i + 1, col_of(line, start), line.trim())),
        })
    })
}

pub(crate) fn parse_vars(e: &Entry<'_>) -> Result<Vec<String>, Diagnostic> {
    let mut vars: Vec<String> = Vec::new();
    let mut pos = 0;
    for word in e.value.split_whitespace() {
        let at = e.value[pos..].find(word).unwrap() + pos;
        pos = at + word.len();
        let col = e.value_col + e.value[..at].chars().count();
        if !word.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(diag(e.line, col, format!("invalid variable name {word:?}")));
        }
        if vars.iter().any(|v| v == word) {
            return Err(diag(e.line, col, format!("variable {word:?} declared twice")));
        }
        vars.push(word.to_string());
    }
    if vars.is_empty() {
        return Err(diag(e.line, e.value_col, "no variables declared"));
    }
    Ok(vars)
}

/// Parse a whitespace- or comma-separated list of statements.
pub(crate) fn parse_statements(e: &Entry<'_>, vars: &[String]) -> Result<Vec<CiTriple>, Diagnostic> {
    let chars: Vec<(usize, char)> = e.value.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i].1;
        if c.is_whitespace() || c == ',' {
            i += 1;
            continue;
        }
        let col = e.value_col + i;
        let opens = c == '(' || ((c == 'I' || c == 'H') && chars.get(i + 1).is_some_and(|n| n.1 == '('));
        if !opens {
            return Err(diag(e.line, col, "malformed statement: expected I(..) or H(..)"));
        }
        let Some(close) = chars[i..].iter().position(|&(_, c)| c == ')').map(|p| i + p) else {
            return Err(diag(e.line, col, "malformed statement: missing ')'"));
        };
        let text = &e.value[chars[i].0..chars[close].0 + 1];
        let t = parse_triple(text, vars).map_err(|err| diag(e.line, col + err.offset, err.message))?;
        out.push(t);
        i = close + 1;
    }
    Ok(out)
}

fn parse_float(e: &Entry<'_>) -> Result<f64, Diagnostic> {
    e.value.parse().map_err(|_| diag(e.line, e.value_col, format!("invalid number {:?}", e.value)))
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, Diagnostic> {
    let mut vars: Option<Vec<String>> = None;
    let mut p = ProblemFile { vars: Vec::new(), assume: Vec::new(), query: Vec::new(), mode: None, params: Params::default() };
    let mut last_line = 0;
    for e in entries(text) {
        let e = e.map_err(|(line, col, _)| diag(line, col, "expected 'key: value'"))?;
        last_line = e.line;
        if e.key == "vars" {
            if vars.is_some() {
                return Err(diag(e.line, e.key_col, "duplicate vars line"));
            }
            vars = Some(parse_vars(&e)?);
            continue;
        }
        let Some(names) = vars.as_deref() else {
            return Err(diag(e.line, e.key_col, "expected a vars line first"));
        };
        match e.key {
            "assume" => p.assume.extend(parse_statements(&e, names)?),
            "query" => p.query.extend(parse_statements(&e, names)?),
            "mode" => {
                if p.mode.is_some() {
                    return Err(diag(e.line, e.key_col, "duplicate mode"));
                }
                let m = Mode::from_name(e.value)
                    .ok_or_else(|| diag(e.line, e.value_col, format!("unknown mode {:?}", e.value)))?;
                p.mode = Some(m);
            }
            "lambda" => {
                let l = parse_rational(e.value).map_err(|_| diag(e.line, e.value_col, "invalid rational"))?;
                p.params.lambda = Some(l);
            }
            "eps" => p.params.eps = Some(parse_float(&e)?),
            "x" => p.params.x = Some(parse_float(&e)?),
            "y" => p.params.y = Some(parse_float(&e)?),
            other => return Err(diag(e.line, e.key_col, format!("unknown key {other:?}"))),
        }
    }
    p.vars = vars.ok_or_else(|| diag(last_line.max(1), 1, "missing vars line"))?;
    Ok(p)
}

fn write_statements(f: &mut fmt::Formatter<'_>, key: &str, ts: &[CiTriple], names: &[String]) -> fmt::Result {
    if ts.is_empty() {
        return Ok(());
    }
    write!(f, "{key}:")?;
    for t in ts {
        write!(f, " {}", t.display_with(names))?;
    }
    writeln!(f)
}

impl fmt::Display for ProblemFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars: {}", self.vars.join(" "))?;
        write_statements(f, "assume", &self.assume, &self.vars)?;
        write_statements(f, "query", &self.query, &self.vars)?;
        if let Some(m) = self.mode {
            writeln!(f, "mode: {}", m.name())?;
        }
        let Params { eps, lambda, x, y } = &self.params;
        if let Some(v) = eps {
            writeln!(f, "eps: {v:e}")?;
        }
        if let Some(v) = lambda {
            writeln!(f, "lambda: {v}")?;
        }
        if let Some(v) = x {
            writeln!(f, "x: {v:e}")?;
        }
        if let Some(v) = y {
            writeln!(f, "y: {v:e}")?;
        }
        Ok(())
    }
}
