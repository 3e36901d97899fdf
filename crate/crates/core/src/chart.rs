//! Finite rooted transition systems ("charts") and their generation from
//! expressions.
//!
//! One generic [`Lts`] carries the three flavours, distinguished by the
//! transition label type: [`Chart`] (proper actions), [`OneChart`] (actions
//! and the empty step `1`) and [`LabeledChart`] (1-chart labels paired with a
//! [`Marking`]).

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::{self, Debug, Write as _};
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::semantics::{self, Marking, Normedness, StepLabel};
use crate::syntax::{Action, StackedExpr, StarExpr};

/// Default bound on the number of generated vertices.
pub const DEFAULT_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChartError {
    #[error("chart generation exceeded the cap of {cap} vertices")]
    CapExceeded { cap: usize },
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("expected a chart of kind `{expected}`, found `{found}`")]
    KindMismatch {
        expected: &'static str,
        found: String,
    },
    #[error("invalid transition label: {0}")]
    BadLabel(String),
    #[error("malformed chart JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    Chart,
    OneChart,
    Labeled,
}

impl ChartKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChartKind::Chart => "chart",
            ChartKind::OneChart => "onechart",
            ChartKind::Labeled => "labeled",
        }
    }
}

/// Transition labels a chart can carry.
pub trait Label: Clone + Ord + Hash + Debug {
    const KIND: ChartKind;

    fn step_label(&self) -> StepLabel;

    fn marking(&self) -> Option<Marking> {
        None
    }

    fn from_parts(label: StepLabel, marking: Option<Marking>) -> Result<Self, ChartError>;
}

impl Label for Action {
    const KIND: ChartKind = ChartKind::Chart;

    fn step_label(&self) -> StepLabel {
        StepLabel::Proper(self.clone())
    }

    fn from_parts(label: StepLabel, marking: Option<Marking>) -> Result<Self, ChartError> {
        if marking.is_some() {
            return Err(ChartError::BadLabel(
                "markings only occur in labeled charts".into(),
            ));
        }
        match label {
            StepLabel::Proper(a) => Ok(a),
            StepLabel::Empty => Err(ChartError::BadLabel(
                "empty steps only occur in 1-charts".into(),
            )),
        }
    }
}

impl Label for StepLabel {
    const KIND: ChartKind = ChartKind::OneChart;

    fn step_label(&self) -> StepLabel {
        self.clone()
    }

    fn from_parts(label: StepLabel, marking: Option<Marking>) -> Result<Self, ChartError> {
        if marking.is_some() {
            return Err(ChartError::BadLabel(
                "markings only occur in labeled charts".into(),
            ));
        }
        Ok(label)
    }
}

/// A 1-chart label with its entry/body marking.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Marked {
    pub label: StepLabel,
    pub marking: Marking,
}

impl Marked {
    pub fn new(label: StepLabel, marking: Marking) -> Self {
        Marked { label, marking }
    }
}

impl Label for Marked {
    const KIND: ChartKind = ChartKind::Labeled;

    fn step_label(&self) -> StepLabel {
        self.label.clone()
    }

    fn marking(&self) -> Option<Marking> {
        Some(self.marking)
    }

    fn from_parts(label: StepLabel, marking: Option<Marking>) -> Result<Self, ChartError> {
        let marking = marking
            .ok_or_else(|| ChartError::BadLabel("labeled transitions need a marking".into()))?;
        Ok(Marked { label, marking })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    /// Rendered expression housed at this vertex, if any.
    pub expr: Option<String>,
    pub terminating: bool,
}

/// A transition between vertex indices of one chart.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition<L> {
    pub src: usize,
    pub label: L,
    pub dst: usize,
}

/// A transition addressed by vertex ids, stable across elimination and
/// reachability pruning.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NamedTransition<L> {
    pub src: String,
    pub label: L,
    pub dst: String,
}

/// Finite rooted transition system with immediate termination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lts<L> {
    vertices: Vec<Vertex>,
    index: HashMap<String, usize>,
    start: usize,
    transitions: BTreeSet<Transition<L>>,
}

pub type Chart = Lts<Action>;
pub type OneChart = Lts<StepLabel>;
pub type LabeledChart = Lts<Marked>;

impl<L: Label> Lts<L> {
    /// A chart with the single (start) vertex `start`.
    pub fn new(start: impl Into<String>, expr: Option<String>, terminating: bool) -> Self {
        let id = start.into();
        Lts {
            index: HashMap::from([(id.clone(), 0)]),
            vertices: vec![Vertex {
                id,
                expr,
                terminating,
            }],
            start: 0,
            transitions: BTreeSet::new(),
        }
    }

    pub fn add_vertex(
        &mut self,
        id: impl Into<String>,
        expr: Option<String>,
        terminating: bool,
    ) -> Result<usize, ChartError> {
        let id = id.into();
        if self.index.contains_key(&id) {
            return Err(ChartError::DuplicateVertex(id));
        }
        let idx = self.vertices.len();
        self.index.insert(id.clone(), idx);
        self.vertices.push(Vertex {
            id,
            expr,
            terminating,
        });
        Ok(idx)
    }

    /// Adds a transition between existing vertex indices. Returns whether it
    /// was new.
    ///
    /// # Panics
    /// If either endpoint is out of range.
    pub fn add_transition(&mut self, src: usize, label: L, dst: usize) -> bool {
        assert!(src < self.vertices.len() && dst < self.vertices.len());
        self.transitions.insert(Transition { src, label, dst })
    }

    pub fn add_named_transition(
        &mut self,
        src: &str,
        label: L,
        dst: &str,
    ) -> Result<bool, ChartError> {
        let s = self.require(src)?;
        let d = self.require(dst)?;
        Ok(self.add_transition(s, label, d))
    }

    pub fn remove_transition(&mut self, t: &Transition<L>) -> bool {
        self.transitions.remove(t)
    }

    pub fn set_terminating(&mut self, v: usize, terminating: bool) {
        self.vertices[v].terminating = terminating;
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn start_id(&self) -> &str {
        &self.vertices[self.start].id
    }

    pub fn id(&self, v: usize) -> &str {
        &self.vertices[v].id
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<usize, ChartError> {
        self.index_of(id)
            .ok_or_else(|| ChartError::UnknownVertex(id.to_string()))
    }

    pub fn is_terminating(&self, v: usize) -> bool {
        self.vertices[v].terminating
    }

    pub fn transitions(&self) -> &BTreeSet<Transition<L>> {
        &self.transitions
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn contains(&self, t: &Transition<L>) -> bool {
        self.transitions.contains(t)
    }

    /// Outgoing transitions of `v`, in label/target order.
    pub fn outgoing(&self, v: usize) -> impl Iterator<Item = &Transition<L>> {
        let lo = self
            .transitions
            .iter()
            .position(|t| t.src >= v)
            .unwrap_or(self.transitions.len());
        self.transitions
            .iter()
            .skip(lo)
            .take_while(move |t| t.src == v)
    }

    /// Adjacency lists indexed by source vertex.
    pub fn successors(&self) -> Vec<Vec<&Transition<L>>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for t in &self.transitions {
            adj[t.src].push(t);
        }
        adj
    }

    pub fn name(&self, t: &Transition<L>) -> NamedTransition<L> {
        NamedTransition {
            src: self.id(t.src).to_string(),
            label: t.label.clone(),
            dst: self.id(t.dst).to_string(),
        }
    }

    pub fn resolve(&self, t: &NamedTransition<L>) -> Result<Transition<L>, ChartError> {
        Ok(Transition {
            src: self.require(&t.src)?,
            label: t.label.clone(),
            dst: self.require(&t.dst)?,
        })
    }

    /// Relabels every transition; vertices and termination are kept.
    pub fn map_labels<M: Label>(&self, mut f: impl FnMut(&L) -> M) -> Lts<M> {
        Lts {
            vertices: self.vertices.clone(),
            index: self.index.clone(),
            start: self.start,
            transitions: self
                .transitions
                .iter()
                .map(|t| Transition {
                    src: t.src,
                    label: f(&t.label),
                    dst: t.dst,
                })
                .collect(),
        }
    }

    /// Views the chart as a 1-chart, forgetting markings.
    pub fn to_onechart(&self) -> OneChart {
        self.map_labels(Label::step_label)
    }

    /// Vertices reachable from the start, as a membership vector.
    pub fn reachable(&self) -> Vec<bool> {
        self.reachable_from(self.start, |_| true)
    }

    /// Vertices reachable from `from` along transitions accepted by `follow`.
    pub fn reachable_from(
        &self,
        from: usize,
        follow: impl Fn(&Transition<L>) -> bool,
    ) -> Vec<bool> {
        let adj = self.successors();
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for t in &adj[v] {
                if follow(t) && !seen[t.dst] {
                    seen[t.dst] = true;
                    stack.push(t.dst);
                }
            }
        }
        seen
    }

    /// The sub-chart on the vertices flagged in `keep` (which must include
    /// the start), with the transitions among them.
    pub fn restrict_to(&self, keep: &[bool]) -> Self {
        self.subchart(self.start, keep, |_| true)
    }

    /// The sub-chart rooted at `start` on the vertices flagged in `keep`,
    /// with those transitions among them that `include` accepts.
    pub fn subchart(
        &self,
        start: usize,
        keep: &[bool],
        include: impl Fn(&Transition<L>) -> bool,
    ) -> Self {
        assert!(keep[start], "sub-chart must keep its start vertex");
        let mut remap = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        let mut index = HashMap::new();
        for (old, v) in self.vertices.iter().enumerate() {
            if keep[old] {
                remap[old] = vertices.len();
                index.insert(v.id.clone(), vertices.len());
                vertices.push(v.clone());
            }
        }
        let transitions = self
            .transitions
            .iter()
            .filter(|t| keep[t.src] && keep[t.dst] && include(t))
            .map(|t| Transition {
                src: remap[t.src],
                label: t.label.clone(),
                dst: remap[t.dst],
            })
            .collect();
        Lts {
            vertices,
            index,
            start: remap[start],
            transitions,
        }
    }

    /// Drops every vertex (and its transitions) that the start cannot reach.
    pub fn restrict_reachable(&self) -> Self {
        self.restrict_to(&self.reachable())
    }

    /// Whether some cycle is reachable from the start.
    pub fn has_infinite_path(&self) -> bool {
        let reach = self.reachable();
        find_cycle(self.vertices.len(), |v| {
            if reach[v] {
                self.outgoing(v).map(|t| t.dst).collect()
            } else {
                Vec::new()
            }
        })
        .is_some()
    }

    pub fn to_json(&self) -> ChartJson {
        let mut vertices: Vec<VertexJson> = self
            .vertices
            .iter()
            .map(|v| VertexJson {
                id: v.id.clone(),
                expr: v.expr.clone(),
                terminating: v.terminating,
            })
            .collect();
        vertices.sort_by(|a, b| a.id.cmp(&b.id));
        let mut transitions: Vec<TransitionJson> = self
            .transitions
            .iter()
            .map(|t| TransitionJson {
                src: self.id(t.src).to_string(),
                label: t.label.step_label().to_string(),
                marking: t.label.marking().map(|m| m.0),
                dst: self.id(t.dst).to_string(),
            })
            .collect();
        transitions.sort_by(|a, b| {
            (&a.src, &a.label, a.marking, &a.dst).cmp(&(&b.src, &b.label, b.marking, &b.dst))
        });
        ChartJson {
            kind: L::KIND.as_str().to_string(),
            start: self.start_id().to_string(),
            vertices,
            transitions,
        }
    }

    /// Pretty, sorted JSON text.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("chart JSON is serializable")
    }

    /// Compact sorted JSON; equal charts have equal canonical forms.
    pub fn canonical(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("chart JSON is serializable")
    }

    pub fn from_json(json: &ChartJson) -> Result<Self, ChartError> {
        if json.kind != L::KIND.as_str() {
            return Err(ChartError::KindMismatch {
                expected: L::KIND.as_str(),
                found: json.kind.clone(),
            });
        }
        json.build()
    }

    pub fn from_json_str(text: &str) -> Result<Self, ChartError> {
        let json: ChartJson =
            serde_json::from_str(text).map_err(|e| ChartError::Json(e.to_string()))?;
        Self::from_json(&json)
    }

    /// Graphviz rendering. The start vertex gets an arrow from a point node,
    /// terminating vertices a double periphery, empty steps a dotted edge
    /// and entry steps a `[n]` suffix.
    pub fn to_dot(&self) -> String {
        let json = self.to_json();
        let mut out = String::from("digraph chart {\n  rankdir=LR;\n  node [shape=circle];\n");
        out.push_str("  \"__start\" [shape=point, label=\"\"];\n");
        let _ = writeln!(out, "  \"__start\" -> {};", dot_quote(&json.start));
        for v in &json.vertices {
            let mut attrs = format!("label={}", dot_quote(&v.id));
            if v.terminating {
                attrs.push_str(", peripheries=2");
            }
            let _ = writeln!(out, "  {} [{attrs}];", dot_quote(&v.id));
        }
        for t in &json.transitions {
            let text = match t.marking {
                Some(n) if n > 0 => format!("{} [{n}]", t.label),
                _ => t.label.clone(),
            };
            let mut attrs = format!("label={}", dot_quote(&text));
            if t.label == "1" {
                attrs.push_str(", style=dotted");
            }
            let _ = writeln!(
                out,
                "  {} -> {} [{attrs}];",
                dot_quote(&t.src),
                dot_quote(&t.dst)
            );
        }
        out.push_str("}\n");
        out
    }
}

impl LabeledChart {
    pub fn erase_markings(&self) -> OneChart {
        self.map_labels(|m| m.label.clone())
    }
}

impl OneChart {
    /// The chart of induced transitions and induced termination: `v -a-> w`
    /// whenever `v` reaches some `u` by empty steps and `u -a-> w`, and `v`
    /// terminates whenever it reaches a terminating vertex by empty steps.
    /// Vertices and start are unchanged.
    pub fn induce(&self) -> Chart {
        let mut chart = Lts {
            vertices: self.vertices.clone(),
            index: self.index.clone(),
            start: self.start,
            transitions: BTreeSet::new(),
        };
        let adj = self.successors();
        for v in 0..self.vertices.len() {
            let closure = self.reachable_from(v, |t| t.label.is_empty());
            let mut terminating = false;
            for (u, _) in closure.iter().enumerate().filter(|(_, &inside)| inside) {
                terminating |= self.vertices[u].terminating;
                for t in &adj[u] {
                    if let StepLabel::Proper(a) = &t.label {
                        chart.add_transition(v, a.clone(), t.dst);
                    }
                }
            }
            chart.vertices[v].terminating = terminating;
        }
        chart
    }

    /// The chart, if no empty step occurs.
    pub fn to_chart(&self) -> Option<Chart> {
        if self.transitions.iter().any(|t| t.label.is_empty()) {
            return None;
        }
        Some(self.map_labels(|l| l.action().expect("checked above").clone()))
    }
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Finds some cycle in the graph on `0..n`; returns its vertices in order.
pub(crate) fn find_cycle(n: usize, succ: impl Fn(usize) -> Vec<usize>) -> Option<Vec<usize>> {
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(root, succ(root), 0)];
        state[root] = 1;
        while let Some((v, next, i)) = stack.last_mut() {
            if *i < next.len() {
                let w = next[*i];
                *i += 1;
                let v = *v;
                match state[w] {
                    0 => {
                        state[w] = 1;
                        parent[w] = v;
                        let ws = succ(w);
                        stack.push((w, ws, 0));
                    }
                    1 => {
                        let mut cycle = vec![v];
                        let mut cur = v;
                        while cur != w {
                            cur = parent[cur];
                            cycle.push(cur);
                        }
                        cycle.reverse();
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                state[*v] = 2;
                stack.pop();
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: String,
    pub expr: Option<String>,
    pub terminating: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionJson {
    pub src: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marking: Option<u32>,
    pub dst: String,
}

/// Serialized form shared by all chart kinds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartJson {
    pub kind: String,
    pub start: String,
    pub vertices: Vec<VertexJson>,
    pub transitions: Vec<TransitionJson>,
}

impl ChartJson {
    fn build<L: Label>(&self) -> Result<Lts<L>, ChartError> {
        let start = self
            .vertices
            .iter()
            .find(|v| v.id == self.start)
            .ok_or_else(|| ChartError::UnknownVertex(self.start.clone()))?;
        let mut chart = Lts::new(start.id.clone(), start.expr.clone(), start.terminating);
        for v in self.vertices.iter().filter(|v| v.id != self.start) {
            chart.add_vertex(v.id.clone(), v.expr.clone(), v.terminating)?;
        }
        if self.vertices.iter().filter(|v| v.id == self.start).count() > 1 {
            return Err(ChartError::DuplicateVertex(self.start.clone()));
        }
        for t in &self.transitions {
            let label = parse_label(&t.label)?;
            let label = L::from_parts(label, t.marking.map(Marking))?;
            chart.add_named_transition(&t.src, label, &t.dst)?;
        }
        Ok(chart)
    }
}

pub fn parse_label(text: &str) -> Result<StepLabel, ChartError> {
    if text == "1" {
        return Ok(StepLabel::Empty);
    }
    Action::new(text)
        .map(StepLabel::Proper)
        .map_err(|e| ChartError::BadLabel(e.to_string()))
}

/// A chart of whichever kind a JSON document declares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyChart {
    Chart(Chart),
    OneChart(OneChart),
    Labeled(LabeledChart),
}

impl AnyChart {
    pub fn from_json_str(text: &str) -> Result<Self, ChartError> {
        let json: ChartJson =
            serde_json::from_str(text).map_err(|e| ChartError::Json(e.to_string()))?;
        match json.kind.as_str() {
            "chart" => Ok(AnyChart::Chart(json.build()?)),
            "onechart" => Ok(AnyChart::OneChart(json.build()?)),
            "labeled" => Ok(AnyChart::Labeled(json.build()?)),
            other => Err(ChartError::KindMismatch {
                expected: "chart|onechart|labeled",
                found: other.to_string(),
            }),
        }
    }

    pub fn to_onechart(&self) -> OneChart {
        match self {
            AnyChart::Chart(c) => c.to_onechart(),
            AnyChart::OneChart(c) => c.clone(),
            AnyChart::Labeled(c) => c.erase_markings(),
        }
    }
}

/// A generated chart together with the expression housed at each vertex
/// (indexed like the chart's vertices).
#[derive(Debug, Clone)]
pub struct Interpretation<L, X> {
    pub chart: Lts<L>,
    pub exprs: Vec<X>,
}

impl<L: Label, X> Interpretation<L, X> {
    pub fn expr(&self, v: usize) -> &X {
        &self.exprs[v]
    }
}

fn generate<L, X>(
    root: X,
    cap: usize,
    terminates: impl Fn(&X) -> bool,
    mut steps: impl FnMut(&X) -> Vec<(L, X)>,
) -> Result<Interpretation<L, X>, ChartError>
where
    L: Label,
    X: Clone + Eq + Hash + fmt::Display,
{
    let root_id = root.to_string();
    let mut chart = Lts::new(root_id.clone(), Some(root_id), terminates(&root));
    let mut exprs = vec![root.clone()];
    let mut seen: HashMap<X, usize> = HashMap::from([(root, 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let succ = steps(&exprs[v]);
        for (label, target) in succ {
            let w = match seen.get(&target) {
                Some(&w) => w,
                None => {
                    if chart.len() >= cap {
                        return Err(ChartError::CapExceeded { cap });
                    }
                    let id = target.to_string();
                    let w = chart.add_vertex(id.clone(), Some(id), terminates(&target))?;
                    seen.insert(target.clone(), w);
                    exprs.push(target);
                    queue.push_back(w);
                    w
                }
            };
            chart.add_transition(v, label, w);
        }
    }
    Ok(Interpretation { chart, exprs })
}

/// The chart interpretation of `e` together with the expressions at its
/// vertices.
pub fn interpret(e: &StarExpr, cap: usize) -> Result<Interpretation<Action, StarExpr>, ChartError> {
    generate(e.clone(), cap, semantics::terminates, |x| {
        semantics::steps(x).into_iter().collect()
    })
}

pub fn interpret_one(
    e: &StarExpr,
    cap: usize,
) -> Result<Interpretation<StepLabel, StackedExpr>, ChartError> {
    generate(
        StackedExpr::Lift(e.clone()),
        cap,
        semantics::stacked_terminates,
        |x| semantics::stacked_steps(x).into_iter().collect(),
    )
}

pub fn interpret_labeled(
    e: &StarExpr,
    cap: usize,
) -> Result<Interpretation<Marked, StackedExpr>, ChartError> {
    let mut cache = Normedness::default();
    generate(
        StackedExpr::Lift(e.clone()),
        cap,
        semantics::stacked_terminates,
        |x| {
            semantics::marked_steps_with(&mut cache, x)
                .into_iter()
                .map(|(l, m, t)| (Marked::new(l, m), t))
                .collect()
        },
    )
}

/// Breadth-first closure of the plain rules from `e`.
pub fn chart_of(e: &StarExpr, cap: usize) -> Result<Chart, ChartError> {
    interpret(e, cap).map(|i| i.chart)
}

pub fn onechart_of(e: &StarExpr, cap: usize) -> Result<OneChart, ChartError> {
    interpret_one(e, cap).map(|i| i.chart)
}

pub fn labeled_onechart_of(e: &StarExpr, cap: usize) -> Result<LabeledChart, ChartError> {
    interpret_labeled(e, cap).map(|i| i.chart)
}

/// Groups transitions by source id; handy in tests and reports.
pub fn transitions_by_id<L: Label>(chart: &Lts<L>) -> BTreeMap<String, Vec<(L, String)>> {
    let mut out: BTreeMap<String, Vec<(L, String)>> = BTreeMap::new();
    for t in chart.transitions() {
        out.entry(chart.id(t.src).to_string())
            .or_default()
            .push((t.label.clone(), chart.id(t.dst).to_string()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_star_expr;

    fn p(s: &str) -> StarExpr {
        parse_star_expr(s).unwrap()
    }

    fn act(s: &str) -> Action {
        Action::new(s).unwrap()
    }

    const E: &str = "(a*.b*)*";
    const F: &str = "(a1.(1+b1.0)+a2.(1+b2.0)+a3.(1+b3.0))*.0";

    #[test]
    fn chart_of_e_has_three_terminating_vertices() {
        let c = chart_of(&p(E), DEFAULT_CAP).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.vertices().iter().all(|v| v.terminating));
        assert_eq!(c.transition_count(), 6);
        // minimal parentheses: `.` associates to the left
        let e1 = "1.a*.b*.(a*.b*)*";
        let e2 = "1.b*.(a*.b*)*";
        assert_eq!(p(e1), p("((1.a*).b*).(a*.b*)*"));
        let expected: BTreeSet<(&str, &str, &str)> = [
            (E, "a", e1),
            (E, "b", e2),
            (e1, "a", e1),
            (e1, "b", e2),
            (e2, "a", e1),
            (e2, "b", e2),
        ]
        .into_iter()
        .collect();
        let got: BTreeSet<(String, String, String)> = c
            .transitions()
            .iter()
            .map(|t| (c.id(t.src).into(), t.label.to_string(), c.id(t.dst).into()))
            .collect();
        let got: BTreeSet<(&str, &str, &str)> = got
            .iter()
            .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn chart_of_zero_is_a_single_dead_vertex() {
        let c = chart_of(&p("0"), DEFAULT_CAP).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.transition_count(), 0);
        assert!(!c.is_terminating(0));
    }

    #[test]
    fn cap_is_a_hard_error() {
        assert_eq!(chart_of(&p(E), 2), Err(ChartError::CapExceeded { cap: 2 }));
        assert!(chart_of(&p(E), 3).is_ok());
    }

    #[test]
    fn onechart_of_e_matches_the_stacked_vertex_list() {
        let c = onechart_of(&p(E), DEFAULT_CAP).unwrap();
        let ids: BTreeSet<&str> = c.vertices().iter().map(|v| v.id.as_str()).collect();
        let expected: BTreeSet<&str> = [
            E,
            "((1 * a*).b*) * (a*.b*)*",
            "(a*.b*) * (a*.b*)*",
            "b* * (a*.b*)*",
            "(1 * b*) * (a*.b*)*",
        ]
        .into_iter()
        .collect();
        assert_eq!(ids, expected);
        // only the root terminates immediately
        assert_eq!(c.vertices().iter().filter(|v| v.terminating).count(), 1);
        assert!(c.is_terminating(c.start()));
    }

    #[test]
    fn onechart_of_f_has_five_vertices() {
        let c = onechart_of(&p(F), DEFAULT_CAP).unwrap();
        assert_eq!(c.len(), 5);
        let ids: BTreeSet<&str> = c.vertices().iter().map(|v| v.id.as_str()).collect();
        let f0 = "(a1.(1+b1.0)+a2.(1+b2.0)+a3.(1+b3.0))*";
        for i in 1..=3 {
            let fi = format!("((1.(1+b{i}.0)) * {f0}).0");
            assert!(ids.contains(fi.as_str()), "missing {fi}");
        }
        assert!(ids.contains(format!("((1.0) * {f0}).0").as_str()));
    }

    #[test]
    fn onechart_of_action() {
        let c = onechart_of(&p("a"), DEFAULT_CAP).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.transition_count(), 1);
        assert!(c.transitions().iter().all(|t| !t.label.is_empty()));
    }

    #[test]
    fn labeled_onechart_markings() {
        let c = labeled_onechart_of(&p(E), DEFAULT_CAP).unwrap();
        for t in c.outgoing(c.start()) {
            assert_eq!(t.label.marking, Marking(2));
        }
        // the inner a* loop is entered from (a*.b*) * e at level 1
        let e1_back = c.index_of("(a*.b*) * (a*.b*)*").unwrap();
        let e1 = c.index_of("((1 * a*).b*) * (a*.b*)*").unwrap();
        let a_entry = c
            .outgoing(e1_back)
            .find(|t| t.label.label == StepLabel::Proper(act("a")))
            .unwrap();
        assert_eq!(a_entry.dst, e1);
        assert_eq!(a_entry.label.marking, Marking(1));
        assert!(c
            .transitions()
            .iter()
            .filter(|t| t.label.label.is_empty())
            .all(|t| t.label.marking.is_body()));
        assert_eq!(c.erase_markings(), onechart_of(&p(E), DEFAULT_CAP).unwrap());
    }

    #[test]
    fn induce_and_collect_garbage() {
        let one = onechart_of(&p(E), DEFAULT_CAP).unwrap();
        let induced = one.induce();
        assert_eq!(induced.len(), 5);
        assert!(induced.vertices().iter().all(|v| v.terminating));
        let e1 = induced.index_of("((1 * a*).b*) * (a*.b*)*").unwrap();
        let e2 = induced.index_of("(1 * b*) * (a*.b*)*").unwrap();
        assert!(induced.contains(&Transition {
            src: e1,
            label: act("b"),
            dst: e2
        }));
        let gc = induced.restrict_reachable();
        assert_eq!(gc.len(), 3);
        assert!(gc.index_of("(a*.b*) * (a*.b*)*").is_none());
        assert!(gc.index_of("b* * (a*.b*)*").is_none());

        let f = onechart_of(&p(F), DEFAULT_CAP)
            .unwrap()
            .induce()
            .restrict_reachable();
        assert_eq!(f.len(), 5);
    }

    #[test]
    fn induce_without_empty_steps_is_identity() {
        let c = chart_of(&p("((1.a).(c.a+a.(b+b.a))*).0"), DEFAULT_CAP).unwrap();
        let induced = c.to_onechart().induce();
        assert_eq!(induced, c);
    }

    #[test]
    fn induce_handles_empty_step_cycles() {
        let mut c = OneChart::new("u", None, false);
        let v = c.add_vertex("v", None, true).unwrap();
        let w = c.add_vertex("w", None, false).unwrap();
        c.add_transition(0, StepLabel::Empty, v);
        c.add_transition(v, StepLabel::Empty, 0);
        c.add_transition(v, StepLabel::Proper(act("a")), w);
        let induced = c.induce();
        assert!(induced.is_terminating(0));
        assert!(induced.contains(&Transition {
            src: 0,
            label: act("a"),
            dst: w
        }));
        assert_eq!(induced.transition_count(), 2);
    }

    #[test]
    fn restrict_reachable_keeps_fully_reachable_charts() {
        let c = chart_of(&p(E), DEFAULT_CAP).unwrap();
        assert_eq!(c.restrict_reachable(), c);
    }

    #[test]
    fn json_round_trip_and_sorting() {
        let c = labeled_onechart_of(&p(E), DEFAULT_CAP).unwrap();
        let text = c.to_json_string();
        let back = LabeledChart::from_json_str(&text).unwrap();
        assert_eq!(back.canonical(), c.canonical());
        let json = c.to_json();
        assert!(json.vertices.windows(2).all(|w| w[0].id < w[1].id));
        assert_eq!(json.kind, "labeled");
        assert!(json.transitions.iter().all(|t| t.marking.is_some()));

        let plain = chart_of(&p(E), DEFAULT_CAP).unwrap().to_json_string();
        assert!(!plain.contains("marking"));
        assert!(matches!(
            OneChart::from_json_str(&plain),
            Err(ChartError::KindMismatch { .. })
        ));
    }

    #[test]
    fn json_rejects_dangling_transitions() {
        let text = r#"{"kind":"chart","start":"v","vertices":[{"id":"v","expr":null,"terminating":false}],
            "transitions":[{"src":"v","label":"a","dst":"w"}]}"#;
        assert_eq!(
            Chart::from_json_str(text),
            Err(ChartError::UnknownVertex("w".into()))
        );
        let text = r#"{"kind":"chart","start":"v","vertices":[{"id":"v","expr":null,"terminating":false}],
            "transitions":[{"src":"v","label":"1","dst":"v"}]}"#;
        assert!(matches!(
            Chart::from_json_str(text),
            Err(ChartError::BadLabel(_))
        ));
    }

    #[test]
    fn dot_marks_start_termination_and_empty_steps() {
        let c = labeled_onechart_of(&p(E), DEFAULT_CAP).unwrap();
        let dot = c.to_dot();
        assert!(dot.contains("\"__start\" [shape=point"));
        assert!(dot.contains(&format!("\"__start\" -> \"{E}\";")));
        assert!(dot.contains("peripheries=2"));
        assert!(dot.contains("style=dotted"));
        assert!(dot.contains("label=\"a [2]\""));
        assert!(dot.contains("label=\"a [1]\""));
        assert_eq!(dot, c.to_dot());
    }

    #[test]
    fn cycle_finder() {
        assert!(find_cycle(3, |v| if v < 2 { vec![v + 1] } else { vec![] }).is_none());
        let cycle = find_cycle(3, |v| vec![(v + 1) % 3]).unwrap();
        assert_eq!(cycle.len(), 3);
        assert_eq!(find_cycle(1, |_| vec![0]), Some(vec![0]));
    }
}
