use anyhow::{bail, Result};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use ciapprox::graphoid::{derives, Mode as ClosureMode};
use ciapprox::imeasure::{positive_implies, PositiveOutcome};
use ciapprox::shannon::{
    check_lambda, min_lambda, shannon_ei, verify_theorem_bound, BoundKind, EiOutcome, LambdaOutcome, LpCertificate,
    MinLambda,
};
use ciapprox::{CiSet, CiTriple, RationalEntropy, VarSet};

use crate::problem::{Mode, ProblemFile};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Term {
    pub coef: String,
    pub triple: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Value {
    pub set: String,
    pub h: String,
}

/// Answer to one query. Absent fields are omitted from JSON.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryResult {
    pub query: String,
    pub mode: &'static str,
    pub answer: &'static str,
    pub positive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<Term>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_atom: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Value>>,
}

impl QueryResult {
    fn new(query: String, mode: &'static str, answer: &'static str, positive: bool) -> Self {
        QueryResult {
            query,
            mode,
            answer,
            positive,
            lambda: None,
            bound: None,
            certificate: None,
            witness_atom: None,
            witness: None,
        }
    }

    /// Human-readable form: a headline, then indented detail lines.
    pub fn render(&self) -> String {
        let mut out = format!("{}: {}", self.query, self.answer);
        if let Some(l) = &self.lambda {
            out.push_str(&format!(" (lambda = {l}"));
            if let Some(b) = &self.bound {
                out.push_str(&format!(", bound = {b}"));
            }
            out.push(')');
        } else if let Some(b) = &self.bound {
            out.push_str(&format!(" (bound = {b})"));
        }
        if let Some(a) = &self.witness_atom {
            out.push_str(&format!("\n  witness atom: {a}"));
        }
        if let Some(c) = &self.certificate {
            for t in c {
                out.push_str(&format!("\n  {} * {}", t.coef, t.triple));
            }
        }
        if let Some(w) = &self.witness {
            for v in w {
                out.push_str(&format!("\n  h({}) = {}", v.set, v.h));
            }
        }
        out
    }
}

pub fn set_name(s: VarSet, names: &[String]) -> String {
    s.iter().map(|i| names[i].as_str()).collect::<Vec<_>>().join(" ")
}

fn certificate_terms(cert: &LpCertificate, names: &[String]) -> Vec<Term> {
    cert.multipliers
        .iter()
        .map(|(e, c)| Term { coef: c.to_string(), triple: e.display_with(names).to_string() })
        .collect()
}

fn witness_values(h: &RationalEntropy, names: &[String]) -> Vec<Value> {
    (1u32..1 << names.len())
        .map(VarSet::from_bits)
        .map(|s| Value { set: set_name(s, names), h: h.get(s).expect("in range").to_string() })
        .collect()
}

fn answer_one(
    sigma: &CiSet,
    t: &CiTriple,
    mode: Mode,
    lambda: Option<&BigRational>,
    names: &[String],
) -> Result<QueryResult> {
    let query = t.display_with(names).to_string();
    let yes_no = |b: bool| if b { "implied" } else { "not implied" };
    if t.is_trivial() {
        let mut r = QueryResult::new(query, mode.name(), "implied", true);
        if matches!(mode, Mode::MinLambda) {
            r.lambda = Some("0".into());
        }
        return Ok(r);
    }
    Ok(match mode {
        Mode::Positive => match positive_implies(sigma, t)? {
            PositiveOutcome::Implied => QueryResult::new(query, mode.name(), "implied", true),
            PositiveOutcome::Counterexample { atom, .. } => {
                let mut r = QueryResult::new(query, mode.name(), "not implied", false);
                r.witness_atom = Some(set_name(atom, names));
                r
            }
        },
        Mode::Shannon => match shannon_ei(sigma, t)? {
            EiOutcome::Holds => QueryResult::new(query, mode.name(), "implied", true),
            EiOutcome::Counterexample(h) => {
                let mut r = QueryResult::new(query, mode.name(), "not implied", false);
                r.witness = Some(witness_values(&h, names));
                r
            }
        },
        Mode::SemiGraphoid | Mode::Graphoid => {
            let m = if mode == Mode::Graphoid { ClosureMode::Graphoid } else { ClosureMode::SemiGraphoid };
            let d = derives(sigma, t, m)?;
            QueryResult::new(query, mode.name(), yes_no(d), d)
        }
        Mode::MinLambda => match min_lambda(sigma, t)? {
            MinLambda::Value { value, cert } => {
                let mut r = QueryResult::new(query, mode.name(), "bounded", true);
                r.lambda = Some(value.to_string());
                r.certificate = Some(certificate_terms(&cert, names));
                r
            }
            MinLambda::Unbounded => QueryResult::new(query, mode.name(), "unbounded", false),
        },
        Mode::CheckLambda => {
            let Some(lambda) = lambda else { bail!("checklambda needs a lambda value") };
            match check_lambda(sigma, t, lambda)? {
                LambdaOutcome::Certified(cert) => {
                    let mut r = QueryResult::new(query, mode.name(), "certified", true);
                    r.lambda = Some(lambda.to_string());
                    r.certificate = Some(certificate_terms(&cert, names));
                    r
                }
                LambdaOutcome::Refuted(h) => {
                    let mut r = QueryResult::new(query, mode.name(), "refuted", false);
                    r.lambda = Some(lambda.to_string());
                    r.witness = Some(witness_values(&h, names));
                    r
                }
            }
        }
    })
}

fn premises(p: &ProblemFile) -> Result<CiSet> {
    Ok(CiSet::from_triples(p.vars.len(), p.assume.iter().copied())?)
}

/// Answer every query of `p` in `mode`. Queries run in parallel; results
/// keep the input order.
pub fn run(p: &ProblemFile, mode: Mode) -> Result<Vec<QueryResult>> {
    let sigma = premises(p)?;
    let lambda = p.params.lambda.as_ref();
    p.query.par_iter().map(|t| answer_one(&sigma, t, mode, lambda, &p.vars)).collect()
}

/// Check each query against the bound for `kind`. A query is positive
/// unless it violates the bound.
pub fn run_bound(p: &ProblemFile, kind: BoundKind) -> Result<Vec<QueryResult>> {
    let sigma = premises(p)?;
    p.query
        .par_iter()
        .map(|t| {
            let query = t.display_with(&p.vars).to_string();
            let r = verify_theorem_bound(&sigma, t, kind)?;
            let answer = if r.violation {
                "violation"
            } else if r.premise_holds {
                "within bound"
            } else {
                "not implied"
            };
            let mut q = QueryResult::new(query, "verify-bound", answer, !r.violation);
            q.lambda = Some(r.lambda.map_or_else(|| "unbounded".into(), |l| l.to_string()));
            q.bound = Some(r.bound.to_string());
            Ok(q)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::parse_problem;

    #[test]
    fn intersection_is_unbounded() {
        let p = parse_problem("vars: A B C\nassume: I(A;B|C) I(A;C|B)\nquery: I(A;BC)\nmode: minlambda").unwrap();
        let r = run(&p, Mode::MinLambda).unwrap();
        assert_eq!(r[0].answer, "unbounded");
        assert!(!r[0].positive);
        let r = run(&p, Mode::Positive).unwrap();
        assert_eq!((r[0].answer, r[0].witness_atom.as_deref()), ("not implied", Some("A B C")));
        let r = run(&p, Mode::Graphoid).unwrap();
        assert!(r[0].positive);
        let r = run(&p, Mode::SemiGraphoid).unwrap();
        assert!(!r[0].positive);
        let r = run(&p, Mode::Shannon).unwrap();
        assert!(!r[0].positive);
        assert_eq!(r[0].witness.as_ref().unwrap().len(), 7);
    }

    #[test]
    fn chain_has_lambda_one() {
        let p = parse_problem("vars: A B C\nassume: I(A;B) I(A;C|B)\nquery: I(A;BC) I(A;B) I(A;A)\n").unwrap();
        let r = run(&p, Mode::MinLambda).unwrap();
        assert_eq!(r[0].lambda.as_deref(), Some("1"));
        assert!(r[0].render().starts_with("I(A;BC): bounded (lambda = 1)"));
        assert_eq!(r[1].lambda.as_deref(), Some("1"));
        assert!(r[1].certificate.is_some());
        assert_eq!((r[2].query.as_str(), r[2].answer), ("I(A;A)", "unbounded"));
    }

    #[test]
    fn check_lambda_needs_a_value() {
        let mut p = parse_problem("vars: A B C\nassume: I(A;B) I(A;C|B)\nquery: I(A;BC)\n").unwrap();
        assert!(run(&p, Mode::CheckLambda).is_err());
        p.params.lambda = Some(BigRational::new(1.into(), 2.into()));
        let r = run(&p, Mode::CheckLambda).unwrap();
        assert_eq!(r[0].answer, "refuted");
    }

    #[test]
    fn results_keep_query_order() {
        let p = parse_problem("vars: A B C D\nassume: I(A;B|C)\nquery: I(A;B|C) I(A;D) I(B;A|C) I(C;D)\n").unwrap();
        let r = run(&p, Mode::Positive).unwrap();
        let got: Vec<bool> = r.iter().map(|q| q.positive).collect();
        assert_eq!(got, [true, false, true, false]);
    }
}
