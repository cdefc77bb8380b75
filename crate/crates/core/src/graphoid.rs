//! Fixed-point closure under the semi-graphoid axioms, optionally with the
//! intersection axiom.
//!
//! The closure universe is every canonical triple whose sides are disjoint,
//! plus conditionals `(Y;Y|X)`. Symmetry is implicit in canonical form.
//! Rules are applied in the order decomposition, weak union, contraction,
//! intersection, from a FIFO worklist, so results and traces are
//! deterministic.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::triple::{CiSet, CiTriple};
use crate::varset::VarSet;

/// Ground-set cap for closure computations.
pub const MAX_CLOSURE_VARS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    SemiGraphoid,
    Graphoid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    Decomposition,
    WeakUnion,
    Contraction,
    Intersection,
}

impl Axiom {
    pub fn name(&self) -> &'static str {
        match self {
            Axiom::Decomposition => "decomposition",
            Axiom::WeakUnion => "weak union",
            Axiom::Contraction => "contraction",
            Axiom::Intersection => "intersection",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub axiom: Axiom,
    pub premises: Vec<CiTriple>,
}

#[derive(Clone, Debug)]
pub struct ClosureResult {
    pub closure: CiSet,
    /// First derivation found for each triple not in the input.
    pub trace: Option<HashMap<CiTriple, Derivation>>,
}

impl ClosureResult {
    pub fn contains(&self, t: &CiTriple) -> bool {
        t.is_trivial() || self.closure.contains(t)
    }
}

pub fn semigraphoid_closure(s: &CiSet) -> Result<ClosureResult> {
    closure(s, Mode::SemiGraphoid, true)
}

pub fn graphoid_closure(s: &CiSet) -> Result<ClosureResult> {
    closure(s, Mode::Graphoid, true)
}

/// Whether `t` lies in the closure of `s`. Trivial triples always do.
pub fn derives(s: &CiSet, t: &CiTriple, mode: Mode) -> Result<bool> {
    if !t.within(s.ambient()) {
        return Err(Error::OutOfRange { set: t.vars(), n: s.ambient() });
    }
    Ok(closure(s, mode, false)?.contains(t))
}

fn in_universe(t: &CiTriple) -> bool {
    t.is_disjoint() || t.is_conditional()
}

struct Engine {
    n: usize,
    mode: Mode,
    set: CiSet,
    queue: VecDeque<CiTriple>,
    /// (side, conditioning) -> other sides, over both orientations.
    by_side_cond: HashMap<(VarSet, VarSet), Vec<VarSet>>,
    trace: Option<HashMap<CiTriple, Derivation>>,
}

impl Engine {
    fn add(&mut self, t: CiTriple, axiom: Axiom, premises: &[CiTriple]) {
        if !in_universe(&t) || self.set.contains(&t) {
            return;
        }
        self.set.insert(t).expect("derived triple stays within the ground set");
        self.index(t);
        if let Some(tr) = self.trace.as_mut() {
            tr.insert(t, Derivation { axiom, premises: premises.to_vec() });
        }
        self.queue.push_back(t);
    }

    fn index(&mut self, t: CiTriple) {
        for (p, q) in t.orientations() {
            self.by_side_cond.entry((p, t.z())).or_default().push(q);
        }
    }

    fn has(&self, x: VarSet, y: VarSet, z: VarSet) -> bool {
        self.set.contains(&CiTriple::new(x, y, z))
    }

    fn expand(&mut self, t: CiTriple) {
        let (x, y, z) = (t.x(), t.y(), t.z());
        let full = VarSet::full(self.n);

        // Decomposition on both sides at once. A conditional (Y;Y|Z) has
        // the same measure as (Y;YW|Z) for every W, so its right side may
        // range over everything outside Z.
        let right_pool = if t.is_conditional() { full - z } else { y };
        for xs in x.subsets().filter(|s| !s.is_empty()) {
            for ys in right_pool.subsets().filter(|s| !s.is_empty()) {
                if xs == x && ys == y {
                    continue;
                }
                self.add(CiTriple::new(xs, ys, z), Axiom::Decomposition, &[t]);
            }
        }

        // Weak union: (P;QW|R) => (P;Q|RW)
        for (p, q) in t.orientations() {
            let q = if t.is_conditional() { right_pool } else { q };
            for keep in q.proper_nonempty_subsets() {
                self.add(CiTriple::new(p, keep, z | (q - keep)), Axiom::WeakUnion, &[t]);
            }
        }

        // Contraction: (P;Q|R) and (P;W|QR) => (P;QW|R)
        for (p, q) in t.orientations() {
            // t as the first premise
            if let Some(ws) = self.by_side_cond.get(&(p, q | z)).cloned() {
                for w in ws {
                    let other = CiTriple::new(p, w, q | z);
                    self.add(CiTriple::new(p, q | w, z), Axiom::Contraction, &[t, other]);
                }
            }
            // t as the second premise: (P;Y|R') with Y ∪ R' = z
            for yy in z.subsets().filter(|s| !s.is_empty()) {
                let rest = z - yy;
                if self.has(p, yy, rest) {
                    let other = CiTriple::new(p, yy, rest);
                    self.add(CiTriple::new(p, yy | q, rest), Axiom::Contraction, &[other, t]);
                }
            }
        }

        // Intersection: (P;Q|RW) and (P;W|RQ) => (P;QW|R)
        if self.mode == Mode::Graphoid && !t.is_conditional() {
            for (p, q) in t.orientations() {
                for w in z.subsets().filter(|s| !s.is_empty()) {
                    let r = z - w;
                    if self.has(p, w, r | q) {
                        let other = CiTriple::new(p, w, r | q);
                        self.add(CiTriple::new(p, q | w, r), Axiom::Intersection, &[t, other]);
                    }
                }
            }
        }
    }
}

/// Compute the closure of `s` under the axioms enabled by `mode`.
pub fn closure(s: &CiSet, mode: Mode, trace: bool) -> Result<ClosureResult> {
    let n = s.ambient();
    if n > MAX_CLOSURE_VARS {
        return Err(Error::CapExceeded { what: "graphoid closure", n, cap: MAX_CLOSURE_VARS });
    }
    let mut eng = Engine {
        n,
        mode,
        set: CiSet::new(n),
        queue: VecDeque::new(),
        by_side_cond: HashMap::new(),
        trace: trace.then(HashMap::new),
    };
    for t in s {
        if eng.set.insert(*t)? {
            eng.index(*t);
            eng.queue.push_back(*t);
        }
    }
    while let Some(t) = eng.queue.pop_front() {
        eng.expand(t);
    }
    Ok(ClosureResult { closure: eng.set, trace: eng.trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;

    fn s(ix: &[usize]) -> VarSet {
        VarSet::from_indices(ix.iter().copied())
    }

    fn mi(x: &[usize], y: &[usize], z: &[usize]) -> CiTriple {
        CiTriple::new(s(x), s(y), s(z))
    }

    fn set(n: usize, ts: &[CiTriple]) -> CiSet {
        CiSet::from_triples(n, ts.iter().copied()).unwrap()
    }

    #[test]
    fn decomposition_and_weak_union_fire_once() {
        let r = semigraphoid_closure(&set(3, &[mi(&[A], &[B, C], &[])])).unwrap();
        assert!(r.contains(&mi(&[A], &[B], &[])));
        assert!(r.contains(&mi(&[A], &[C], &[B])));
        let tr = r.trace.unwrap();
        assert_eq!(tr[&mi(&[A], &[B], &[])].axiom, Axiom::Decomposition);
        assert_eq!(tr[&mi(&[A], &[C], &[B])].axiom, Axiom::WeakUnion);
    }

    #[test]
    fn contraction_rebuilds_joint_statement() {
        let r = semigraphoid_closure(&set(3, &[mi(&[A], &[B], &[]), mi(&[A], &[C], &[B])])).unwrap();
        assert!(r.contains(&mi(&[A], &[B, C], &[])));
        assert!(r.contains(&mi(&[A], &[C], &[])));
        assert_eq!(r.trace.unwrap()[&mi(&[A], &[B, C], &[])].axiom, Axiom::Contraction);
    }

    #[test]
    fn empty_input_has_empty_closure() {
        let r = semigraphoid_closure(&CiSet::new(3)).unwrap();
        assert!(r.closure.is_empty());
        assert!(r.contains(&mi(&[A], &[B], &[A])));
    }

    #[test]
    fn intersection_requires_graphoid_mode() {
        let sg = set(3, &[mi(&[A], &[B], &[C]), mi(&[A], &[C], &[B])]);
        let g = graphoid_closure(&sg).unwrap();
        assert!(g.contains(&mi(&[A], &[B, C], &[])));
        assert_eq!(g.trace.as_ref().unwrap()[&mi(&[A], &[B, C], &[])].axiom, Axiom::Intersection);
        let sgc = semigraphoid_closure(&sg).unwrap();
        assert!(!sgc.contains(&mi(&[A], &[B, C], &[])));
        assert_eq!(sgc.closure, sg);
        assert!(derives(&sg, &mi(&[A], &[B], &[]), Mode::Graphoid).unwrap());
        assert!(!derives(&sg, &mi(&[A], &[B], &[]), Mode::SemiGraphoid).unwrap());
    }

    #[test]
    fn single_premise_never_fires_intersection() {
        let sg = set(3, &[mi(&[A], &[B], &[C])]);
        assert_eq!(graphoid_closure(&sg).unwrap().closure, semigraphoid_closure(&sg).unwrap().closure);
    }

    #[test]
    fn conditional_yields_independence_of_target() {
        // h(B|A) = 0 forces I(B;C|A) = 0
        let sg = set(3, &[CiTriple::conditional(s(&[A]), s(&[B]))]);
        let r = semigraphoid_closure(&sg).unwrap();
        assert!(r.contains(&mi(&[B], &[C], &[A])));
        assert!(r.contains(&CiTriple::conditional(s(&[A, C]), s(&[B]))));
    }

    #[test]
    fn closure_is_idempotent_and_monotone() {
        let sg = set(4, &[mi(&[0], &[1], &[2]), mi(&[0], &[3], &[1, 2])]);
        let c1 = semigraphoid_closure(&sg).unwrap().closure;
        let c2 = semigraphoid_closure(&c1).unwrap().closure;
        assert_eq!(c1, c2);
        let mut bigger = sg.clone();
        bigger.insert(mi(&[1], &[3], &[])).unwrap();
        let c3 = semigraphoid_closure(&bigger).unwrap().closure;
        assert!(c1.is_subset(&c3));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            semigraphoid_closure(&CiSet::new(9)),
            Err(Error::CapExceeded { .. })
        ));
    }
}
