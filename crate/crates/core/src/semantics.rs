//! Derivation engines for the three rule systems: plain star expressions,
//! stacked star expressions with empty steps, and the marking-labeled
//! refinement of the latter.
//!
//! Every engine is structural recursion over the expression. Results are
//! ordered sets, so a transition with several derivations is reported once.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::syntax::{Action, StackedExpr, StarExpr};

/// Transition label of a 1-chart: a proper action or the empty step `1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StepLabel {
    Proper(Action),
    Empty,
}

impl StepLabel {
    pub fn is_empty(&self) -> bool {
        matches!(self, StepLabel::Empty)
    }

    pub fn action(&self) -> Option<&Action> {
        match self {
            StepLabel::Proper(a) => Some(a),
            StepLabel::Empty => None,
        }
    }
}

impl From<Action> for StepLabel {
    fn from(a: Action) -> Self {
        StepLabel::Proper(a)
    }
}

impl fmt::Display for StepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepLabel::Proper(a) => write!(f, "{a}"),
            StepLabel::Empty => f.write_str("1"),
        }
    }
}

/// Marking label: `0` is a body step, `n >= 1` an entry step at loop level `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Marking(pub u32);

impl Marking {
    pub const BODY: Marking = Marking(0);

    pub fn is_body(self) -> bool {
        self.0 == 0
    }

    pub fn is_entry(self) -> bool {
        self.0 > 0
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn terminates(e: &StarExpr) -> bool {
    match e {
        StarExpr::Zero | StarExpr::Act(_) => false,
        StarExpr::One | StarExpr::Star(_) => true,
        StarExpr::Plus(l, r) => terminates(l) || terminates(r),
        StarExpr::Dot(l, r) => terminates(l) && terminates(r),
    }
}

/// All derivatives `e -a-> e'` of a plain star expression.
pub fn steps(e: &StarExpr) -> BTreeSet<(Action, StarExpr)> {
    let mut out = BTreeSet::new();
    collect_steps(e, &mut out);
    out
}

fn collect_steps(e: &StarExpr, out: &mut BTreeSet<(Action, StarExpr)>) {
    match e {
        StarExpr::Zero | StarExpr::One => {}
        StarExpr::Act(a) => {
            out.insert((a.clone(), StarExpr::One));
        }
        StarExpr::Plus(l, r) => {
            collect_steps(l, out);
            collect_steps(r, out);
        }
        StarExpr::Dot(l, r) => {
            for (a, l2) in steps(l) {
                out.insert((a, StarExpr::dot(l2, (**r).clone())));
            }
            if terminates(l) {
                collect_steps(r, out);
            }
        }
        StarExpr::Star(body) => {
            for (a, b2) in steps(body) {
                out.insert((a, StarExpr::dot(b2, e.clone())));
            }
        }
    }
}

/// Immediate termination of a stacked expression. Only plain expressions
/// can terminate; stacked products never do.
pub fn stacked_terminates(e: &StackedExpr) -> bool {
    match e {
        StackedExpr::Lift(e) => terminates(e),
        StackedExpr::DotC(..) | StackedExpr::StarC(..) => false,
    }
}

/// All subderivatives `E -l-> E'` with `l` a proper action or `1`.
pub fn stacked_steps(e: &StackedExpr) -> BTreeSet<(StepLabel, StackedExpr)> {
    let mut out = BTreeSet::new();
    collect_stacked(e, &mut out);
    out
}

fn collect_stacked(e: &StackedExpr, out: &mut BTreeSet<(StepLabel, StackedExpr)>) {
    match e {
        StackedExpr::Lift(plain) => collect_plain_stacked(plain, out),
        StackedExpr::DotC(l, r) => {
            for (label, l2) in stacked_steps(l) {
                out.insert((label, StackedExpr::dot(l2, r.clone())));
            }
        }
        StackedExpr::StarC(l, r) => {
            for (label, l2) in stacked_steps(l) {
                out.insert((label, StackedExpr::stack(l2, r.clone())));
            }
            if l.as_plain().is_some_and(terminates) {
                out.insert((StepLabel::Empty, StackedExpr::Lift(r.clone())));
            }
        }
    }
}

fn collect_plain_stacked(e: &StarExpr, out: &mut BTreeSet<(StepLabel, StackedExpr)>) {
    match e {
        StarExpr::Zero | StarExpr::One => {}
        StarExpr::Act(a) => {
            out.insert((
                StepLabel::Proper(a.clone()),
                StackedExpr::Lift(StarExpr::One),
            ));
        }
        StarExpr::Plus(l, r) => {
            collect_plain_stacked(l, out);
            collect_plain_stacked(r, out);
        }
        StarExpr::Dot(l, r) => {
            let mut left = BTreeSet::new();
            collect_plain_stacked(l, &mut left);
            for (label, l2) in left {
                out.insert((label, StackedExpr::dot(l2, (**r).clone())));
            }
            if terminates(l) {
                collect_plain_stacked(r, out);
            }
        }
        StarExpr::Star(body) => {
            let mut inner = BTreeSet::new();
            collect_plain_stacked(body, &mut inner);
            for (label, b2) in inner {
                out.insert((label, StackedExpr::stack(b2, e.clone())));
            }
        }
    }
}

/// All marked subderivatives `E -l,m-> E'` of the marking-labeled rules.
pub fn marked_steps(e: &StackedExpr) -> BTreeSet<(StepLabel, Marking, StackedExpr)> {
    marked_steps_with(&mut Normedness::default(), e)
}

/// As [`marked_steps`], reusing a normedness cache across calls.
pub fn marked_steps_with(
    cache: &mut Normedness,
    e: &StackedExpr,
) -> BTreeSet<(StepLabel, Marking, StackedExpr)> {
    let mut out = BTreeSet::new();
    collect_marked(e, cache, &mut out);
    out
}

// Entry level of `star = body*`: its star height when the body is normed⁺,
// body otherwise.
fn iteration_marking(cache: &mut Normedness, star: &StarExpr, body: &StarExpr) -> Marking {
    if cache.normed_plus(&StackedExpr::Lift(body.clone())) {
        Marking(star.star_height() as u32)
    } else {
        Marking::BODY
    }
}

type MarkedSet = BTreeSet<(StepLabel, Marking, StackedExpr)>;

fn collect_marked(e: &StackedExpr, cache: &mut Normedness, out: &mut MarkedSet) {
    match e {
        StackedExpr::Lift(plain) => collect_plain_marked(plain, cache, out),
        StackedExpr::DotC(l, r) => {
            let mut inner = BTreeSet::new();
            collect_marked(l, cache, &mut inner);
            for (label, m, l2) in inner {
                out.insert((label, m, StackedExpr::dot(l2, r.clone())));
            }
        }
        StackedExpr::StarC(l, r) => {
            let mut inner = BTreeSet::new();
            collect_marked(l, cache, &mut inner);
            for (label, m, l2) in inner {
                out.insert((label, m, StackedExpr::stack(l2, r.clone())));
            }
            if l.as_plain().is_some_and(terminates) {
                out.insert((
                    StepLabel::Empty,
                    Marking::BODY,
                    StackedExpr::Lift(r.clone()),
                ));
            }
        }
    }
}

fn collect_plain_marked(e: &StarExpr, cache: &mut Normedness, out: &mut MarkedSet) {
    match e {
        StarExpr::Zero | StarExpr::One => {}
        StarExpr::Act(a) => {
            out.insert((
                StepLabel::Proper(a.clone()),
                Marking::BODY,
                StackedExpr::Lift(StarExpr::One),
            ));
        }
        StarExpr::Plus(l, r) => {
            let mut inner = BTreeSet::new();
            collect_plain_marked(l, cache, &mut inner);
            collect_plain_marked(r, cache, &mut inner);
            out.extend(inner.into_iter().map(|(a, _, t)| (a, Marking::BODY, t)));
        }
        StarExpr::Dot(l, r) => {
            let mut inner = BTreeSet::new();
            collect_plain_marked(l, cache, &mut inner);
            for (a, m, l2) in inner {
                out.insert((a, m, StackedExpr::dot(l2, (**r).clone())));
            }
            if terminates(l) {
                let mut inner = BTreeSet::new();
                collect_plain_marked(r, cache, &mut inner);
                out.extend(inner.into_iter().map(|(a, _, t)| (a, Marking::BODY, t)));
            }
        }
        StarExpr::Star(body) => {
            let mut inner = BTreeSet::new();
            collect_plain_marked(body, cache, &mut inner);
            if inner.is_empty() {
                return;
            }
            let m = iteration_marking(cache, e, body);
            for (a, _, b2) in inner {
                out.insert((a, m, StackedExpr::stack(b2, e.clone())));
            }
        }
    }
}

/// Memoized normed / normed⁺ predicates over the stacked 1-LTS.
#[derive(Debug, Default)]
pub struct Normedness {
    normed: HashMap<StackedExpr, bool>,
}

impl Normedness {
    /// Whether a terminating expression is reachable by zero or more steps
    /// of any label.
    pub fn normed(&mut self, e: &StackedExpr) -> bool {
        if let Some(&known) = self.normed.get(e) {
            return known;
        }
        let mut seen: HashSet<StackedExpr> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(e.clone());
        queue.push_back(e.clone());
        let mut found = false;
        while let Some(cur) = queue.pop_front() {
            if self.normed.get(&cur) == Some(&true) || stacked_terminates(&cur) {
                found = true;
                break;
            }
            if self.normed.get(&cur) == Some(&false) {
                continue;
            }
            for (_, next) in stacked_steps(&cur) {
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        if found {
            self.normed.insert(e.clone(), true);
        } else {
            // The whole explored region is closed under steps and has no
            // terminating member.
            for s in seen {
                self.normed.insert(s, false);
            }
        }
        found
    }

    /// Whether some step leads to a normed expression.
    pub fn normed_plus(&mut self, e: &StackedExpr) -> bool {
        stacked_steps(e)
            .into_iter()
            .any(|(_, next)| self.normed(&next))
    }
}

pub fn normed(e: &StackedExpr) -> bool {
    Normedness::default().normed(e)
}

pub fn normed_plus(e: &StackedExpr) -> bool {
    Normedness::default().normed_plus(e)
}
