//! Property checks run per expression over random corpora.

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bisim::{bisimilar, check_functional_bisim, collapse, is_collapse};
use crate::chart::{
    chart_of, find_cycle, interpret_labeled, interpret_one, ChartError, LabeledChart, Marked,
};
use crate::lee::{llee_elimination_strategy, replay, verify_llee, verify_llee_alt};
use crate::semantics::{self, Marking, Normedness, StepLabel};
use crate::syntax::{StackedExpr, StarExpr};

pub const MUTATIONS_PER_CHART: usize = 50;

pub const PROPERTIES: [&str; 10] = [
    "erasure",
    "body-acyclic",
    "star-height",
    "projection",
    "normed-plus",
    "llee-agree",
    "mutation-agree",
    "strategy",
    "collapse",
    "bisim-equivalence",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyFailure {
    pub property: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MutationTally {
    pub tried: usize,
    /// Mutants rejected by both verifiers.
    pub rejected: usize,
    pub disagreements: usize,
}

impl MutationTally {
    pub fn add(&mut self, other: MutationTally) {
        self.tried += other.tried;
        self.rejected += other.rejected;
        self.disagreements += other.disagreements;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub expr: String,
    pub failures: Vec<PropertyFailure>,
    pub mutations: MutationTally,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failed(&self, property: &str) -> bool {
        self.failures.iter().any(|f| f.property == property)
    }
}

/// Decides normed⁺ from its path definition: some path from `e` with at
/// least one proper step ends in a terminating expression.
pub fn normed_plus_by_paths(e: &StackedExpr, cap: usize) -> Result<bool, ChartError> {
    let mut seen: HashSet<(StackedExpr, bool)> = HashSet::new();
    let mut queue = VecDeque::from([(e.clone(), false)]);
    seen.insert((e.clone(), false));
    while let Some((x, proper)) = queue.pop_front() {
        if proper && semantics::stacked_terminates(&x) {
            return Ok(true);
        }
        for (label, y) in semantics::stacked_steps(&x) {
            let state = (y, proper || !label.is_empty());
            if !seen.contains(&state) {
                if seen.len() >= cap {
                    return Err(ChartError::CapExceeded { cap });
                }
                seen.insert(state.clone());
                queue.push_back(state);
            }
        }
    }
    Ok(false)
}

fn subterms(e: &StarExpr, out: &mut BTreeSet<StarExpr>) {
    if !out.insert(e.clone()) {
        return;
    }
    match e {
        StarExpr::Zero | StarExpr::One | StarExpr::Act(_) => {}
        StarExpr::Plus(l, r) | StarExpr::Dot(l, r) => {
            subterms(l, out);
            subterms(r, out);
        }
        StarExpr::Star(b) => subterms(b, out),
    }
}

/// Replaces the marking of one transition.
pub fn remark(h: &LabeledChart, index: usize, marking: Marking) -> LabeledChart {
    let t = h
        .transitions()
        .iter()
        .nth(index)
        .expect("transition index in range")
        .clone();
    let mut out = h.clone();
    out.remove_transition(&t);
    out.add_transition(t.src, Marked::new(t.label.label.clone(), marking), t.dst);
    out
}

/// Applies `count` random single-marking mutations to `h` and compares the
/// two witness verifiers on each.
pub fn mutation_tally(h: &LabeledChart, count: usize, seed: u64) -> MutationTally {
    let mut tally = MutationTally::default();
    let n = h.transition_count();
    if n == 0 {
        return tally;
    }
    let labels: Vec<Marking> = h.transitions().iter().map(|t| t.label.marking).collect();
    let top = labels.iter().map(|m| m.0).max().unwrap_or(0) + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let i = rng.gen_range(0..n);
        let old = labels[i].0;
        let new = loop {
            let m = rng.gen_range(0..=top);
            if m != old {
                break m;
            }
        };
        let mutant = remark(h, i, Marking(new));
        let a = verify_llee(&mutant).passed();
        let b = verify_llee_alt(&mutant).passed();
        tally.tried += 1;
        if a != b {
            tally.disagreements += 1;
        } else if !a {
            tally.rejected += 1;
        }
    }
    tally
}

/// Runs every property of [`PROPERTIES`] on `e`. `seed` drives the
/// mutation sampling.
pub fn check_properties(e: &StarExpr, cap: usize, seed: u64) -> Result<PropertyReport, ChartError> {
    let mut failures = Vec::new();
    let mut fail = |property: &'static str, detail: String| {
        failures.push(PropertyFailure { property, detail });
    };

    let labeled = interpret_labeled(e, cap)?;
    let one = interpret_one(e, cap)?;
    let h = &labeled.chart;

    if h.erase_markings().canonical() != one.chart.canonical() {
        fail("erasure", "marking erasure differs from the 1-chart".into());
    }

    let adj = h.successors();
    let body = find_cycle(h.len(), |v| {
        adj[v]
            .iter()
            .filter(|t| t.label.marking.is_body())
            .map(|t| t.dst)
            .collect()
    });
    if let Some(cycle) = body {
        let ids: Vec<&str> = cycle.iter().map(|&v| h.id(v)).collect();
        fail("body-acyclic", format!("body cycle through {ids:?}"));
    }

    for t in h.transitions() {
        let (from, to) = (labeled.expr(t.src), labeled.expr(t.dst));
        if to.star_height() > from.star_height() {
            fail("star-height", format!("{from} -{}-> {to}", t.label.label));
            break;
        }
    }

    'projection: {
        let g = &one.chart;
        for v in 0..g.len() {
            let x = one.expr(v);
            if semantics::stacked_terminates(x) && !x.as_plain().is_some_and(semantics::terminates)
            {
                fail(
                    "projection",
                    format!("{x} terminates but its projection does not"),
                );
                break 'projection;
            }
        }
        for t in g.transitions() {
            let (x, y) = (one.expr(t.src).project(), one.expr(t.dst).project());
            let sound = match &t.label {
                StepLabel::Proper(a) => semantics::steps(&x).contains(&(a.clone(), y.clone())),
                StepLabel::Empty => {
                    (!semantics::terminates(&y) || semantics::terminates(&x))
                        && semantics::steps(&y).is_subset(&semantics::steps(&x))
                }
            };
            if !sound {
                fail("projection", format!("{x} -{}-> {y}", t.label));
                break 'projection;
            }
        }
    }

    'normed: {
        let mut cache = Normedness::default();
        let mut sample: BTreeSet<StackedExpr> = one.exprs.iter().cloned().collect();
        let mut plain = BTreeSet::new();
        subterms(e, &mut plain);
        sample.extend(plain.into_iter().map(StackedExpr::Lift));
        for x in &sample {
            let by_paths = normed_plus_by_paths(x, cap)?;
            if cache.normed_plus(x) != by_paths {
                fail(
                    "normed-plus",
                    format!("{x}: path definition says {by_paths}"),
                );
                break 'normed;
            }
        }
    }

    let (w, w_alt) = (verify_llee(h), verify_llee_alt(h));
    if w.passed() != w_alt.passed() {
        fail("llee-agree", format!("{w:?} vs {w_alt:?}"));
    }

    let mutations = mutation_tally(h, MUTATIONS_PER_CHART, seed);
    if mutations.disagreements > 0 {
        fail(
            "mutation-agree",
            format!(
                "{} of {} mutants split the verifiers",
                mutations.disagreements, mutations.tried
            ),
        );
    }

    match llee_elimination_strategy(h) {
        Ok(run) => {
            let erased = h.erase_markings();
            let valid = replay(&erased, &run.steps)
                .map(|r| r.residual.canonical() == run.residual.canonical())
                .unwrap_or(false);
            if !valid {
                fail("strategy", "recorded run does not replay".into());
            } else if !run.is_successful() {
                fail("strategy", "residual has an infinite path".into());
            }
        }
        Err(err) => fail("strategy", err.to_string()),
    }

    let g = chart_of(e, cap)?;
    let (q, map) = collapse(&g);
    if let Err(f) = check_functional_bisim(&g.restrict_reachable(), &q, &map) {
        fail(
            "collapse",
            format!("quotient map is not a bisimulation: {f:?}"),
        );
    } else if !is_collapse(&q) {
        fail("collapse", "quotient still has bisimilar vertices".into());
    }

    let induced = one.chart.induce().restrict_reachable();
    let reflexive =
        bisimilar(&g, &g).is_some_and(|r| g.vertices().iter().all(|v| r.contains(&v.id, &v.id)));
    let gq = bisimilar(&g, &q);
    let qg = bisimilar(&q, &g);
    let symmetric = match (&gq, &qg) {
        (Some(a), Some(b)) => {
            a.pairs.iter().all(|(x, y)| b.contains(y, x)) && a.pairs.len() == b.pairs.len()
        }
        _ => false,
    };
    let transitive = bisimilar(&q, &induced).is_some() && bisimilar(&g, &induced).is_some();
    if !(reflexive && symmetric && transitive) {
        fail(
            "bisim-equivalence",
            format!("reflexive {reflexive}, symmetric {symmetric}, transitive {transitive}"),
        );
    }

    Ok(PropertyReport {
        expr: e.render(),
        failures,
        mutations,
    })
}
