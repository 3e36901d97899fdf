//! Loop charts, loop elimination and layered loop-elimination witnesses.
//!
//! All operations are generic over the chart's label type; empty steps of
//! 1-charts are ordinary labels here.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::chart::{
    find_cycle, ChartError, ChartJson, Label, LabeledChart, Lts, NamedTransition, OneChart,
    Transition,
};
use crate::semantics::{Marking, StepLabel};

/// Out-degree beyond which entry-set enumeration refuses to run.
pub const MAX_OUT_DEGREE: usize = 16;

/// Default number of search states `lee` may visit.
pub const DEFAULT_BUDGET: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "condition")]
pub enum LoopViolation {
    /// No infinite path from the start.
    L1,
    /// A cycle that avoids the start vertex.
    L2 { cycle: Vec<String> },
    /// A terminating vertex other than the start.
    L3 { vertex: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LeeError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("the entry set at `{vertex}` does not generate a loop sub-chart: {violations:?}")]
    NotALoop {
        vertex: String,
        violations: Vec<LoopViolation>,
    },
    #[error("search budget of {budget} states exceeded")]
    BudgetExceeded { budget: usize },
    #[error(
        "vertex `{vertex}` has {degree} outgoing transitions, above the limit of {MAX_OUT_DEGREE}"
    )]
    OutDegree { vertex: String, degree: usize },
    #[error("invalid elimination run: {0}")]
    InvalidRun(String),
    #[error("not a LLEE-witness: {0:?}")]
    NotAWitness(LleeFailure),
    #[error(transparent)]
    Chart(#[from] ChartError),
}

/// Checks the three loop-chart conditions, returning the failed ones.
pub fn check_loop_chart<L: Label>(g: &Lts<L>) -> Vec<LoopViolation> {
    let mut violations = Vec::new();
    if !g.has_infinite_path() {
        violations.push(LoopViolation::L1);
    }
    let reach = g.reachable();
    let start = g.start();
    let adj = g.successors();
    let cycle = find_cycle(g.len(), |v| {
        if v == start || !reach[v] {
            return Vec::new();
        }
        adj[v]
            .iter()
            .map(|t| t.dst)
            .filter(|&w| w != start)
            .collect()
    });
    if let Some(cycle) = cycle {
        violations.push(LoopViolation::L2 {
            cycle: cycle.into_iter().map(|v| g.id(v).to_string()).collect(),
        });
    }
    let offender = g
        .vertices()
        .iter()
        .enumerate()
        .filter(|&(v, vx)| v != start && vx.terminating)
        .map(|(_, vx)| vx.id.as_str())
        .min();
    if let Some(vertex) = offender {
        violations.push(LoopViolation::L3 {
            vertex: vertex.to_string(),
        });
    }
    violations
}

fn resolve_entry<L: Label>(
    g: &Lts<L>,
    vertex: &str,
    entry: &BTreeSet<NamedTransition<L>>,
) -> Result<(usize, BTreeSet<Transition<L>>), LeeError> {
    let v = g.require(vertex)?;
    if entry.is_empty() {
        return Err(LeeError::Precondition("entry set is empty".into()));
    }
    let mut resolved = BTreeSet::new();
    for t in entry {
        let t = g.resolve(t)?;
        if t.src != v || !g.contains(&t) {
            return Err(LeeError::Precondition(format!(
                "`{} -{:?}-> {}` is not a transition from `{vertex}`",
                g.id(t.src),
                t.label,
                g.id(t.dst)
            )));
        }
        resolved.insert(t);
    }
    Ok((v, resolved))
}

/// The sub-chart rooted at `v` generated by paths that start with a
/// transition of `entry` and continue along any transitions until `v` is
/// reached again.
fn generated_subchart<L: Label>(g: &Lts<L>, v: usize, entry: &BTreeSet<Transition<L>>) -> Lts<L> {
    let adj = g.successors();
    let mut keep = vec![false; g.len()];
    keep[v] = true;
    let mut stack: Vec<usize> = Vec::new();
    for t in entry {
        if !keep[t.dst] {
            keep[t.dst] = true;
            stack.push(t.dst);
        }
    }
    while let Some(u) = stack.pop() {
        for t in &adj[u] {
            if !keep[t.dst] {
                keep[t.dst] = true;
                stack.push(t.dst);
            }
        }
    }
    g.subchart(
        v,
        &keep,
        |t| if t.src == v { entry.contains(t) } else { true },
    )
}

pub fn loop_subchart<L: Label>(
    g: &Lts<L>,
    vertex: &str,
    entry: &BTreeSet<NamedTransition<L>>,
) -> Result<Lts<L>, LeeError> {
    let (v, entry) = resolve_entry(g, vertex, entry)?;
    Ok(generated_subchart(g, v, &entry))
}

fn eliminate_resolved<L: Label>(
    g: &Lts<L>,
    v: usize,
    entry: &BTreeSet<Transition<L>>,
) -> Result<Lts<L>, LeeError> {
    let violations = check_loop_chart(&generated_subchart(g, v, entry));
    if !violations.is_empty() {
        return Err(LeeError::NotALoop {
            vertex: g.id(v).to_string(),
            violations,
        });
    }
    let mut next = g.clone();
    for t in entry {
        next.remove_transition(t);
    }
    Ok(next.restrict_reachable())
}

/// Removes the entry transitions of a loop sub-chart, then everything that
/// became unreachable.
pub fn eliminate<L: Label>(
    g: &Lts<L>,
    vertex: &str,
    entry: &BTreeSet<NamedTransition<L>>,
) -> Result<Lts<L>, LeeError> {
    let (v, entry) = resolve_entry(g, vertex, entry)?;
    eliminate_resolved(g, v, &entry)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationStep<L> {
    pub vertex: String,
    pub entry: BTreeSet<NamedTransition<L>>,
}

/// A recorded sequence of eliminations and the chart it leaves behind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationRun<L> {
    pub steps: Vec<EliminationStep<L>>,
    pub residual: Lts<L>,
}

impl<L: Label> EliminationRun<L> {
    /// Whether the residual chart is free of infinite paths.
    pub fn is_successful(&self) -> bool {
        !self.residual.has_infinite_path()
    }

    pub fn to_json(&self) -> RunJson {
        RunJson {
            steps: self
                .steps
                .iter()
                .map(|s| StepJson {
                    vertex: s.vertex.clone(),
                    entry: s
                        .entry
                        .iter()
                        .map(|t| EntryJson {
                            src: t.src.clone(),
                            label: t.label.step_label().to_string(),
                            dst: t.dst.clone(),
                        })
                        .collect(),
                })
                .collect(),
            residual: self.residual.to_json(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("run JSON is serializable")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryJson {
    pub src: String,
    pub label: String,
    pub dst: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepJson {
    pub vertex: String,
    pub entry: Vec<EntryJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunJson {
    pub steps: Vec<StepJson>,
    pub residual: ChartJson,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeeOutcome<L> {
    /// Some sequence of eliminations ends without infinite paths.
    Success(EliminationRun<L>),
    /// Every sequence of eliminations was tried and none succeeds.
    Failure { explored: usize },
}

impl<L> LeeOutcome<L> {
    pub fn is_success(&self) -> bool {
        matches!(self, LeeOutcome::Success(_))
    }
}

struct Search {
    budget: usize,
    explored: usize,
    failed: HashSet<String>,
}

impl Search {
    fn new(budget: usize) -> Self {
        Search {
            budget,
            explored: 0,
            failed: HashSet::new(),
        }
    }

    fn visit(&mut self) -> Result<(), LeeError> {
        self.explored += 1;
        if self.explored > self.budget {
            return Err(LeeError::BudgetExceeded {
                budget: self.budget,
            });
        }
        Ok(())
    }

    fn find<L: Label>(&mut self, g: &Lts<L>) -> Result<Option<Vec<EliminationStep<L>>>, LeeError> {
        self.visit()?;
        if !g.has_infinite_path() {
            return Ok(Some(Vec::new()));
        }
        let key = g.canonical();
        if self.failed.contains(&key) {
            return Ok(None);
        }
        for (v, entry) in loop_candidates(g)? {
            let next = eliminate_resolved(g, v, &entry).expect("candidate is a loop sub-chart");
            if let Some(mut rest) = self.find(&next)? {
                rest.insert(0, step_of(g, v, &entry));
                return Ok(Some(rest));
            }
        }
        self.failed.insert(key);
        Ok(None)
    }

    fn all<L: Label>(
        &mut self,
        g: &Lts<L>,
        prefix: &mut Vec<EliminationStep<L>>,
        limit: usize,
        out: &mut Vec<EliminationRun<L>>,
    ) -> Result<bool, LeeError> {
        self.visit()?;
        if !g.has_infinite_path() {
            out.push(EliminationRun {
                steps: prefix.clone(),
                residual: g.clone(),
            });
            return Ok(true);
        }
        let key = g.canonical();
        if self.failed.contains(&key) {
            return Ok(false);
        }
        let mut any = false;
        for (v, entry) in loop_candidates(g)? {
            if out.len() >= limit {
                return Ok(true);
            }
            let next = eliminate_resolved(g, v, &entry).expect("candidate is a loop sub-chart");
            prefix.push(step_of(g, v, &entry));
            any |= self.all(&next, prefix, limit, out)?;
            prefix.pop();
        }
        if !any {
            self.failed.insert(key);
        }
        Ok(any)
    }
}

fn step_of<L: Label>(g: &Lts<L>, v: usize, entry: &BTreeSet<Transition<L>>) -> EliminationStep<L> {
    EliminationStep {
        vertex: g.id(v).to_string(),
        entry: entry.iter().map(|t| g.name(t)).collect(),
    }
}

type Candidate<L> = (usize, BTreeSet<Transition<L>>);

/// Every (vertex, entry set) that generates a loop sub-chart of `g`.
/// Vertices come in id order; entry sets largest first.
fn loop_candidates<L: Label>(g: &Lts<L>) -> Result<Vec<Candidate<L>>, LeeError> {
    let adj = g.successors();
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by(|&a, &b| g.id(a).cmp(g.id(b)));
    let mut out = Vec::new();
    for v in order {
        let out_edges = &adj[v];
        let degree = out_edges.len();
        if degree == 0 {
            continue;
        }
        if degree > MAX_OUT_DEGREE {
            return Err(LeeError::OutDegree {
                vertex: g.id(v).to_string(),
                degree,
            });
        }
        let mut masks: Vec<u32> = (1..(1u32 << degree)).collect();
        masks.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));
        for mask in masks {
            let entry: BTreeSet<Transition<L>> = out_edges
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, t)| (*t).clone())
                .collect();
            if check_loop_chart(&generated_subchart(g, v, &entry)).is_empty() {
                out.push((v, entry));
            }
        }
    }
    Ok(out)
}

/// Decides LEE by backtracking over all elimination sequences, memoizing
/// chart states from which no sequence succeeds.
pub fn lee<L: Label>(g: &Lts<L>, budget: usize) -> Result<LeeOutcome<L>, LeeError> {
    let start = g.restrict_reachable();
    let mut search = Search::new(budget);
    match search.find(&start)? {
        Some(steps) => {
            let run = replay(g, &steps)?;
            Ok(LeeOutcome::Success(run))
        }
        None => Ok(LeeOutcome::Failure {
            explored: search.explored,
        }),
    }
}

/// Up to `limit` distinct successful elimination runs.
pub fn successful_runs<L: Label>(
    g: &Lts<L>,
    limit: usize,
    budget: usize,
) -> Result<Vec<EliminationRun<L>>, LeeError> {
    let start = g.restrict_reachable();
    let mut search = Search::new(budget);
    let mut out = Vec::new();
    search.all(&start, &mut Vec::new(), limit, &mut out)?;
    Ok(out)
}

/// Applies the steps in order (with garbage collection), checking that
/// each one eliminates a loop sub-chart.
pub fn replay<L: Label>(
    g: &Lts<L>,
    steps: &[EliminationStep<L>],
) -> Result<EliminationRun<L>, LeeError> {
    let mut state = g.restrict_reachable();
    for (k, step) in steps.iter().enumerate() {
        state = eliminate(&state, &step.vertex, &step.entry)
            .map_err(|e| LeeError::InvalidRun(format!("step {}: {e}", k + 1)))?;
    }
    Ok(EliminationRun {
        steps: steps.to_vec(),
        residual: state,
    })
}

/// Records a run in the original chart: transitions removed as entries of
/// step `k` (counting from 1) get marking `k`, all others marking 0.
pub fn run_to_labeling<L: Label>(
    g: &Lts<L>,
    run: &EliminationRun<L>,
) -> Result<LabeledChart, LeeError> {
    let replayed = replay(g, &run.steps)?;
    if replayed.residual.canonical() != run.residual.canonical() {
        return Err(LeeError::InvalidRun(
            "residual does not match the replayed steps".into(),
        ));
    }
    let mut level: BTreeMap<NamedTransition<L>, u32> = BTreeMap::new();
    for (k, step) in run.steps.iter().enumerate() {
        for t in &step.entry {
            level.insert(t.clone(), k as u32 + 1);
        }
    }
    let mut out = g.map_labels(|l| crate::chart::Marked::new(l.step_label(), Marking::BODY));
    let named: Vec<(Transition<L>, u32)> = g
        .transitions()
        .iter()
        .filter_map(|t| level.get(&g.name(t)).map(|&n| (t.clone(), n)))
        .collect();
    for (t, n) in named {
        let body = Transition {
            src: t.src,
            label: crate::chart::Marked::new(t.label.step_label(), Marking::BODY),
            dst: t.dst,
        };
        out.remove_transition(&body);
        out.add_transition(
            t.src,
            crate::chart::Marked::new(t.label.step_label(), Marking(n)),
            t.dst,
        );
    }
    Ok(out)
}

/// Entry-transition identifiers: `(v, n)` such that an entry of level `n`
/// leaves `v`.
pub fn entry_identifiers(h: &LabeledChart) -> BTreeSet<(usize, Marking)> {
    h.transitions()
        .iter()
        .filter(|t| t.label.marking.is_entry())
        .map(|t| (t.src, t.label.marking))
        .collect()
}

/// Vertices of the loop generated by the level-`n` entries from `v`: paths
/// start with such an entry, continue along body steps only, and halt on
/// revisiting `v`.
fn llee_loop_vertices(h: &LabeledChart, v: usize, n: Marking) -> Vec<bool> {
    let adj = h.successors();
    let mut keep = vec![false; h.len()];
    keep[v] = true;
    let mut stack: Vec<usize> = adj[v]
        .iter()
        .filter(|t| t.label.marking == n)
        .map(|t| t.dst)
        .collect();
    while let Some(u) = stack.pop() {
        if keep[u] {
            continue;
        }
        keep[u] = true;
        stack.extend(
            adj[u]
                .iter()
                .filter(|t| t.label.marking.is_body())
                .map(|t| t.dst),
        );
    }
    keep
}

pub fn llee_loop_subchart(
    h: &LabeledChart,
    vertex: &str,
    n: Marking,
) -> Result<OneChart, LeeError> {
    let v = h.require(vertex)?;
    if !entry_identifiers(h).contains(&(v, n)) {
        return Err(LeeError::Precondition(format!(
            "`({vertex}, {n})` is not an entry-transition identifier"
        )));
    }
    Ok(llee_subchart_idx(h, v, n))
}

fn llee_subchart_idx(h: &LabeledChart, v: usize, n: Marking) -> OneChart {
    let keep = llee_loop_vertices(h, v, n);
    h.subchart(v, &keep, |t| {
        if t.src == v {
            t.label.marking == n
        } else {
            t.label.marking.is_body()
        }
    })
    .erase_markings()
}

/// Why a labeling is not a LLEE-witness, with a checkable witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "failure")]
pub enum LleeFailure {
    /// Body steps admit a cycle (W1, LLEE-2).
    BodyCycle {
        condition: &'static str,
        cycle: Vec<String>,
    },
    /// The loop generated by an entry identifier is not a loop chart (W2).
    NotALoop {
        vertex: String,
        level: u32,
        violations: Vec<LoopViolation>,
    },
    /// No body path leads back after the entry (LLEE-1).
    NoReturn { vertex: String, level: u32 },
    /// A non-start vertex of the loop terminates (LLEE-3).
    Termination {
        vertex: String,
        level: u32,
        at: String,
    },
    /// An entry of too high a level leaves the loop body (W3, LLEE-4).
    Layering {
        condition: &'static str,
        vertex: String,
        level: u32,
        from: String,
        marking: u32,
    },
}

impl LleeFailure {
    pub fn condition(&self) -> &'static str {
        match self {
            LleeFailure::BodyCycle { condition, .. } | LleeFailure::Layering { condition, .. } => {
                condition
            }
            LleeFailure::NotALoop { .. } => "W2",
            LleeFailure::NoReturn { .. } => "LLEE-1",
            LleeFailure::Termination { .. } => "LLEE-3",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LleeVerdict {
    Pass,
    Fail(LleeFailure),
}

impl LleeVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, LleeVerdict::Pass)
    }

    pub fn failure(&self) -> Option<&LleeFailure> {
        match self {
            LleeVerdict::Pass => None,
            LleeVerdict::Fail(f) => Some(f),
        }
    }
}

fn body_cycle(h: &LabeledChart) -> Option<Vec<String>> {
    let adj = h.successors();
    find_cycle(h.len(), |v| {
        adj[v]
            .iter()
            .filter(|t| t.label.marking.is_body())
            .map(|t| t.dst)
            .collect()
    })
    .map(|c| c.into_iter().map(|v| h.id(v).to_string()).collect())
}

/// Checks body-step termination, the loop condition and layeredness.
pub fn verify_llee(h: &LabeledChart) -> LleeVerdict {
    if let Some(cycle) = body_cycle(h) {
        return LleeVerdict::Fail(LleeFailure::BodyCycle {
            condition: "W1",
            cycle,
        });
    }
    let adj = h.successors();
    for (v, n) in entry_identifiers(h) {
        let violations = check_loop_chart(&llee_subchart_idx(h, v, n));
        if !violations.is_empty() {
            return LleeVerdict::Fail(LleeFailure::NotALoop {
                vertex: h.id(v).to_string(),
                level: n.0,
                violations,
            });
        }
        let keep = llee_loop_vertices(h, v, n);
        for t in (0..h.len()).filter(|&t| t != v && keep[t]) {
            if let Some(bad) = adj[t].iter().find(|tr| tr.label.marking.0 >= n.0) {
                return LleeVerdict::Fail(LleeFailure::Layering {
                    condition: "W3",
                    vertex: h.id(v).to_string(),
                    level: n.0,
                    from: h.id(t).to_string(),
                    marking: bad.label.marking.0,
                });
            }
        }
    }
    LleeVerdict::Pass
}

/// Checks the four step-wise conditions that characterize LLEE-witnesses:
/// every entry can return by body steps, body steps terminate, vertices
/// inside a loop do not terminate, and entries inside a loop have lower
/// levels.
pub fn verify_llee_alt(h: &LabeledChart) -> LleeVerdict {
    let adj = h.successors();
    let body_succ = |u: usize| -> Vec<usize> {
        adj[u]
            .iter()
            .filter(|t| t.label.marking.is_body())
            .map(|t| t.dst)
            .collect()
    };

    // LLEE-2 by Kahn's algorithm on the body-step graph.
    let mut indegree = vec![0usize; h.len()];
    for t in h.transitions().iter().filter(|t| t.label.marking.is_body()) {
        indegree[t.dst] += 1;
    }
    let mut ready: VecDeque<usize> = (0..h.len()).filter(|&v| indegree[v] == 0).collect();
    let mut removed = 0;
    while let Some(u) = ready.pop_front() {
        removed += 1;
        for w in body_succ(u) {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                ready.push_back(w);
            }
        }
    }
    if removed < h.len() {
        let cycle = body_cycle(h).unwrap_or_default();
        return LleeVerdict::Fail(LleeFailure::BodyCycle {
            condition: "LLEE-2",
            cycle,
        });
    }

    for (v, n) in entry_identifiers(h) {
        let targets: Vec<usize> = adj[v]
            .iter()
            .filter(|t| t.label.marking == n)
            .map(|t| t.dst)
            .collect();

        // LLEE-1: some entry continues by body steps back to v.
        let mut seen = vec![false; h.len()];
        let mut queue: VecDeque<usize> = targets.iter().copied().collect();
        let mut returns = false;
        while let Some(u) = queue.pop_front() {
            if u == v {
                returns = true;
                break;
            }
            if std::mem::replace(&mut seen[u], true) {
                continue;
            }
            queue.extend(body_succ(u));
        }
        if !returns {
            return LleeVerdict::Fail(LleeFailure::NoReturn {
                vertex: h.id(v).to_string(),
                level: n.0,
            });
        }

        // Vertices reached by the entry and v-avoiding body steps.
        let mut inside = vec![false; h.len()];
        let mut stack: Vec<usize> = targets.into_iter().filter(|&u| u != v).collect();
        while let Some(u) = stack.pop() {
            if std::mem::replace(&mut inside[u], true) {
                continue;
            }
            stack.extend(body_succ(u).into_iter().filter(|&w| w != v));
        }
        for f in (0..h.len()).filter(|&f| inside[f]) {
            // LLEE-3
            if h.is_terminating(f) {
                return LleeVerdict::Fail(LleeFailure::Termination {
                    vertex: h.id(v).to_string(),
                    level: n.0,
                    at: h.id(f).to_string(),
                });
            }
            // LLEE-4
            if let Some(bad) = adj[f]
                .iter()
                .find(|t| t.label.marking.is_entry() && t.label.marking.0 >= n.0)
            {
                return LleeVerdict::Fail(LleeFailure::Layering {
                    condition: "LLEE-4",
                    vertex: h.id(v).to_string(),
                    level: n.0,
                    from: h.id(f).to_string(),
                    marking: bad.label.marking.0,
                });
            }
        }
    }
    LleeVerdict::Pass
}

/// Eliminates, over and over, the loop of a minimal-level entry identifier
/// (ties broken by vertex id) of the witness, on the marking-erased chart.
pub fn llee_elimination_strategy(h: &LabeledChart) -> Result<EliminationRun<StepLabel>, LeeError> {
    if let LleeVerdict::Fail(failure) = verify_llee(h) {
        return Err(LeeError::NotAWitness(failure));
    }
    let mut marking_of: BTreeMap<NamedTransition<StepLabel>, Marking> = BTreeMap::new();
    for t in h.transitions() {
        let key = NamedTransition {
            src: h.id(t.src).to_string(),
            label: t.label.label.clone(),
            dst: h.id(t.dst).to_string(),
        };
        if let Some(prev) = marking_of.insert(key, t.label.marking) {
            if prev != t.label.marking {
                return Err(LeeError::Precondition(format!(
                    "transition `{} -{}-> {}` carries two markings",
                    h.id(t.src),
                    t.label.label,
                    h.id(t.dst)
                )));
            }
        }
    }
    let mut state = h.erase_markings().restrict_reachable();
    let mut steps = Vec::new();
    loop {
        let next = state
            .transitions()
            .iter()
            .filter_map(|t| {
                let m = marking_of[&state.name(t)];
                m.is_entry().then(|| (m, state.id(t.src).to_string()))
            })
            .min();
        let Some((level, vertex)) = next else { break };
        let entry: BTreeSet<NamedTransition<StepLabel>> = state
            .transitions()
            .iter()
            .map(|t| state.name(t))
            .filter(|t| t.src == vertex && marking_of[t] == level)
            .collect();
        state = eliminate(&state, &vertex, &entry)?;
        steps.push(EliminationStep { vertex, entry });
    }
    Ok(EliminationRun {
        steps,
        residual: state,
    })
}
