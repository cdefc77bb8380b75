//! Conditional-independence triples `(X;Y|Z)` and sets of them.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::varset::VarSet;

/// A CI statement `(X;Y|Z)` in canonical form.
///
/// Canonical form removes the conditioning set from both sides and orders
/// the pair `{x, y}` lexicographically. The sides may overlap; `x == y`
/// encodes the conditional `Z -> X` since `h(X|Z) = I(X;X|Z)`, and a side
/// containing the other collapses onto it for the same reason. When one side
/// becomes empty the triple is trivial (it measures zero on every vector) and
/// is stored as `(∅; y | z)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CiTriple {
    x: VarSet,
    y: VarSet,
    z: VarSet,
}

/// Structural flags of a triple relative to a ground set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleKind {
    pub saturated: bool,
    pub marginal: bool,
    pub conditional: bool,
}

impl TripleKind {
    /// None of the other flags apply.
    pub fn general(&self) -> bool {
        !(self.saturated || self.marginal || self.conditional)
    }
}

/// Canonicalize `(x;y|z)`.
pub fn canonicalize(x: VarSet, y: VarSet, z: VarSet) -> CiTriple {
    let mut x = x - z;
    let mut y = y - z;
    // I(X;Y|Z) = h(X|Z) whenever X ⊆ Y
    if x.is_subset(y) {
        y = x;
    } else if y.is_subset(x) {
        x = y;
    }
    let (x, y) = if x.is_empty() || y.is_empty() {
        (VarSet::EMPTY, x | y)
    } else if x.lex_cmp(y) == Ordering::Greater {
        (y, x)
    } else {
        (x, y)
    };
    CiTriple { x, y, z }
}

impl CiTriple {
    pub fn new(x: VarSet, y: VarSet, z: VarSet) -> Self {
        canonicalize(x, y, z)
    }

    /// Conditional `given -> target`, i.e. `(target; target | given)`.
    pub fn conditional(given: VarSet, target: VarSet) -> Self {
        canonicalize(target, target, given)
    }

    pub fn x(&self) -> VarSet {
        self.x
    }

    pub fn y(&self) -> VarSet {
        self.y
    }

    pub fn z(&self) -> VarSet {
        self.z
    }

    pub fn is_trivial(&self) -> bool {
        self.x.is_empty()
    }

    /// `x == y`: a conditional entropy term.
    pub fn is_conditional(&self) -> bool {
        !self.is_trivial() && self.x == self.y
    }

    /// `x`, `y` and `z` pairwise disjoint and nontrivial.
    pub fn is_disjoint(&self) -> bool {
        !self.is_trivial() && self.x.is_disjoint(self.y)
    }

    /// All variables mentioned.
    pub fn vars(&self) -> VarSet {
        self.x | self.y | self.z
    }

    pub fn within(&self, n: usize) -> bool {
        self.vars().within(n)
    }

    pub fn classify(&self, n: usize) -> TripleKind {
        TripleKind {
            saturated: self.vars() == VarSet::full(n),
            marginal: self.z.is_empty(),
            conditional: self.is_conditional(),
        }
    }

    /// Both orientations `(x, y)` and `(y, x)`; one entry for conditionals.
    pub fn orientations(&self) -> impl Iterator<Item = (VarSet, VarSet)> {
        let first = (self.x, self.y);
        let second = (self.x != self.y).then_some((self.y, self.x));
        std::iter::once(first).chain(second)
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> TripleDisplay<'a> {
        TripleDisplay { triple: self, names: Some(names) }
    }
}

pub(crate) fn fmt_set(f: &mut fmt::Formatter<'_>, s: VarSet, names: Option<&[String]>) -> fmt::Result {
    match names {
        None => write!(f, "{s}"),
        Some(names) => {
            let single = names.iter().all(|n| n.chars().count() == 1);
            for (k, i) in s.iter().enumerate() {
                if k > 0 && !single {
                    f.write_str(" ")?;
                }
                match names.get(i) {
                    Some(n) => f.write_str(n)?,
                    None => write!(f, "X{}", i + 1)?,
                }
            }
            Ok(())
        }
    }
}

pub struct TripleDisplay<'a> {
    triple: &'a CiTriple,
    names: Option<&'a [String]>,
}

impl fmt::Display for TripleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.triple;
        f.write_str("I(")?;
        fmt_set(f, t.x, self.names)?;
        f.write_str(";")?;
        fmt_set(f, t.y, self.names)?;
        if !t.z.is_empty() {
            f.write_str("|")?;
            fmt_set(f, t.z, self.names)?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for CiTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        TripleDisplay { triple: self, names: None }.fmt(f)
    }
}

impl fmt::Debug for CiTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A duplicate-free collection of canonical triples over `n` variables.
///
/// Trivial triples are dropped on insertion; they contribute nothing to
/// `h(Σ)` or to `m(Σ)`.
#[derive(Clone, Serialize, Deserialize)]
pub struct CiSet {
    ambient: usize,
    triples: Vec<CiTriple>,
    #[serde(skip)]
    index: HashSet<CiTriple>,
}

impl CiSet {
    pub fn new(ambient: usize) -> Self {
        CiSet { ambient, triples: Vec::new(), index: HashSet::new() }
    }

    pub fn from_triples<I: IntoIterator<Item = CiTriple>>(ambient: usize, it: I) -> Result<Self> {
        let mut s = CiSet::new(ambient);
        for t in it {
            s.insert(t)?;
        }
        Ok(s)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Returns whether the triple was newly added.
    pub fn insert(&mut self, t: CiTriple) -> Result<bool> {
        if !t.within(self.ambient) {
            return Err(Error::OutOfRange { set: t.vars(), n: self.ambient });
        }
        if t.is_trivial() || !self.index.insert(t) {
            return Ok(false);
        }
        self.triples.push(t);
        Ok(true)
    }

    pub fn contains(&self, t: &CiTriple) -> bool {
        self.index.contains(t)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CiTriple> {
        self.triples.iter()
    }

    pub fn as_slice(&self) -> &[CiTriple] {
        &self.triples
    }

    /// Members in a deterministic order independent of insertion order.
    pub fn sorted(&self) -> Vec<CiTriple> {
        let mut v = self.triples.clone();
        v.sort_by(|a, b| {
            a.z.lex_cmp(b.z).then(a.x.lex_cmp(b.x)).then(a.y.lex_cmp(b.y))
        });
        v
    }

    pub fn is_subset(&self, other: &CiSet) -> bool {
        self.iter().all(|t| other.contains(t))
    }

    pub fn retain<F: FnMut(&CiTriple) -> bool>(&mut self, mut f: F) {
        self.triples.retain(|t| f(t));
        self.index = self.triples.iter().copied().collect();
    }
}

impl PartialEq for CiSet {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.len() == other.len() && self.is_subset(other)
    }
}

impl fmt::Debug for CiSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.sorted()).finish()
    }
}

impl<'a> IntoIterator for &'a CiSet {
    type Item = &'a CiTriple;
    type IntoIter = std::slice::Iter<'a, CiTriple>;
    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}

/// Syntax error at a character offset within the parsed text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: {}", self.offset, self.message)
    }
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Domain(e.to_string())
    }
}

fn perr(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError { offset, message: message.into() }
}

/// Parse a group of variable names. Names may be separated by whitespace
/// or juxtaposed; juxtaposed names are split by greedy longest match.
/// `∅` and the empty string denote the empty set.
pub fn parse_group(text: &str, names: &[String]) -> Result<VarSet, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut set = VarSet::EMPTY;
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() || chars[i] == '∅' {
            i += 1;
            continue;
        }
        let best = names
            .iter()
            .enumerate()
            .filter(|(_, n)| {
                let n: Vec<char> = n.chars().collect();
                !n.is_empty() && chars[i..].starts_with(&n)
            })
            .max_by_key(|(_, n)| n.chars().count());
        match best {
            Some((k, n)) => {
                set = set | VarSet::singleton(k);
                i += n.chars().count();
            }
            None => {
                let end = chars[i..].iter().position(|c| c.is_whitespace()).map_or(chars.len(), |p| i + p);
                let word: String = chars[i..end].iter().collect();
                return Err(perr(i, format!("unknown variable in {word:?}")));
            }
        }
    }
    Ok(set)
}

/// Parse `I(X;Y|Z)`, `I(X;Y)`, `H(Y|X)` or `H(Y)`. The leading letter is
/// optional for the `I` form.
pub fn parse_triple(text: &str, names: &[String]) -> Result<CiTriple, ParseError> {
    let lead = text.len() - text.trim_start().len();
    let body = text.trim();
    // `sub` is always a slice of `body`
    let offset_of = |sub: &str| lead + body[..sub.as_ptr() as usize - body.as_ptr() as usize].chars().count();
    let (entropy, rest) = if let Some(r) = body.strip_prefix('H') {
        (true, r)
    } else {
        (false, body.strip_prefix('I').unwrap_or(body))
    };
    let inner = rest
        .trim_start()
        .strip_prefix('(')
        .ok_or_else(|| perr(offset_of(rest), "expected '('"))?;
    let close = inner.rfind(')').ok_or_else(|| perr(offset_of(inner) + inner.chars().count(), "expected ')'"))?;
    if !inner[close + 1..].trim().is_empty() {
        return Err(perr(offset_of(&inner[close + 1..]), "unexpected text after ')'"));
    }
    let inner = &inner[..close];
    let (sides, cond) = match inner.split_once('|') {
        Some((a, b)) => (a, Some(b)),
        None => (inner, None),
    };
    let group = |g: &str| parse_group(g, names).map_err(|e| perr(e.offset + offset_of(g), e.message));
    let z = cond.map(group).transpose()?.unwrap_or(VarSet::EMPTY);
    if entropy {
        if sides.contains(';') {
            return Err(perr(offset_of(sides), "H(..) takes a single group"));
        }
        let y = group(sides)?;
        if y.is_empty() {
            return Err(perr(offset_of(sides), "empty group"));
        }
        return Ok(CiTriple::conditional(z, y));
    }
    let (a, b) = sides.split_once(';').ok_or_else(|| perr(offset_of(sides), "expected ';' between the two sides"))?;
    let (x, y) = (group(a)?, group(b)?);
    if x.is_empty() || y.is_empty() {
        return Err(perr(offset_of(if x.is_empty() { a } else { b }), "empty side"));
    }
    Ok(CiTriple::new(x, y, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(ix: &[usize]) -> VarSet {
        VarSet::from_indices(ix.iter().copied())
    }

    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;

    #[test]
    fn removes_conditioning_from_both_sides() {
        let t = canonicalize(s(&[A, B]), s(&[C]), s(&[B]));
        assert_eq!((t.x(), t.y(), t.z()), (s(&[A]), s(&[C]), s(&[B])));
    }

    #[test]
    fn orders_pair_lexicographically() {
        let t = canonicalize(s(&[C]), s(&[A]), VarSet::EMPTY);
        assert_eq!((t.x(), t.y()), (s(&[A]), s(&[C])));
        // {A,C} precedes {B} lexicographically
        let t = canonicalize(s(&[B]), s(&[A, C]), VarSet::EMPTY);
        assert_eq!((t.x(), t.y()), (s(&[A, C]), s(&[B])));
    }

    #[test]
    fn conditional_form_is_preserved() {
        let t = canonicalize(s(&[B]), s(&[B]), s(&[A]));
        assert_eq!((t.x(), t.y(), t.z()), (s(&[B]), s(&[B]), s(&[A])));
        assert!(t.is_conditional());
        assert!(!t.is_disjoint());
    }

    #[test]
    fn emptied_side_is_flagged_trivial() {
        let t = canonicalize(s(&[A]), s(&[B]), s(&[A]));
        assert!(t.is_trivial());
        let t = canonicalize(s(&[A]), s(&[B]), s(&[A, B]));
        assert!(t.is_trivial());
        assert!(canonicalize(VarSet::EMPTY, s(&[B]), VarSet::EMPTY).is_trivial());
    }

    #[test]
    fn canonicalize_is_idempotent() {
        for x in 0..8u32 {
            for y in 0..8u32 {
                for z in 0..8u32 {
                    let t = canonicalize(VarSet::from_bits(x), VarSet::from_bits(y), VarSet::from_bits(z));
                    assert_eq!(canonicalize(t.x(), t.y(), t.z()), t);
                }
            }
        }
    }

    #[test]
    fn classify_reports_every_applicable_flag() {
        let sat = CiTriple::new(s(&[A]), s(&[B]), s(&[C]));
        assert_eq!(sat.classify(3), TripleKind { saturated: true, marginal: false, conditional: false });
        let marg = CiTriple::new(s(&[A]), s(&[B]), VarSet::EMPTY);
        assert!(marg.classify(3).marginal && !marg.classify(3).saturated);
        let cond = CiTriple::conditional(s(&[A]), s(&[B, C]));
        let k = cond.classify(3);
        assert!(k.conditional && k.saturated && !k.marginal);
        let gen = CiTriple::new(s(&[A]), s(&[B]), s(&[C]));
        assert!(gen.classify(4).general());
    }

    #[test]
    fn set_deduplicates_and_drops_trivial() {
        let t = CiTriple::new(s(&[A]), s(&[B]), VarSet::EMPTY);
        let u = CiTriple::new(s(&[B]), s(&[A]), VarSet::EMPTY);
        let triv = CiTriple::new(s(&[A]), s(&[B]), s(&[A]));
        let set = CiSet::from_triples(2, [t, u, triv]).unwrap();
        assert_eq!(set.len(), 1);
        assert!(CiSet::from_triples(2, [CiTriple::new(s(&[A]), s(&[C]), VarSet::EMPTY)]).is_err());
    }

    #[test]
    fn display_uses_names() {
        let names: Vec<String> = ["A", "B", "C"].iter().map(|s| s.to_string()).collect();
        let t = CiTriple::new(s(&[A]), s(&[B, C]), VarSet::EMPTY);
        assert_eq!(t.display_with(&names).to_string(), "I(A;BC)");
        let t = CiTriple::new(s(&[A]), s(&[B]), s(&[C]));
        assert_eq!(t.to_string(), "I(X1;X2|X3)");
    }

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_juxtaposed_and_spaced_groups() {
        let n = names(&["A", "B", "C", "AB2"]);
        assert_eq!(parse_group("AB", &n).unwrap(), s(&[A, B]));
        assert_eq!(parse_group("AB2 C", &n).unwrap(), s(&[C, 3]));
        assert_eq!(parse_group("∅", &n).unwrap(), VarSet::EMPTY);
        assert_eq!(parse_group("AQ", &n).unwrap_err().offset, 1);
    }

    #[test]
    fn parses_triples() {
        let n = names(&["A", "B", "C"]);
        assert_eq!(parse_triple("I(A;BC)", &n).unwrap(), CiTriple::new(s(&[A]), s(&[B, C]), VarSet::EMPTY));
        assert_eq!(parse_triple(" (A;B|C) ", &n).unwrap(), CiTriple::new(s(&[A]), s(&[B]), s(&[C])));
        assert_eq!(parse_triple("H(B|A)", &n).unwrap(), CiTriple::conditional(s(&[A]), s(&[B])));
        assert!(parse_triple("I(A;B", &n).is_err());
        assert!(parse_triple("I(A B|C)", &n).is_err());
        assert_eq!(parse_triple("I(A;D)", &n).unwrap_err().offset, 4);
        let long = names(&["X1", "X2", "X3"]);
        let t = CiTriple::new(s(&[0]), s(&[1, 2]), VarSet::EMPTY);
        let shown = t.display_with(&long).to_string();
        assert_eq!(shown, "I(X1;X2 X3)");
        assert_eq!(parse_triple(&shown, &long).unwrap(), t);
    }
}
