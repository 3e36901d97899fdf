//! Bisimulation: functional bisimulation checks, coarsest-partition
//! bisimilarity, collapse, and the end-to-end checks relating the chart
//! and 1-chart interpretations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::chart::{chart_of, Chart};
use crate::chart::{interpret_one, labeled_onechart_of, onechart_of, ChartError, Label, Lts};
use crate::lee::{
    llee_elimination_strategy, verify_llee, verify_llee_alt, LleeFailure, LleeVerdict,
};
use crate::syntax::StarExpr;

/// Partial map from vertex ids of one chart to vertex ids of another.
pub type VertexMap = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BisimRelation {
    pub pairs: BTreeSet<(String, String)>,
}

impl BisimRelation {
    pub fn contains(&self, left: &str, right: &str) -> bool {
        self.pairs.contains(&(left.to_string(), right.to_string()))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("relation JSON is serializable")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BisimCondition {
    Start,
    Domain,
    Forth,
    Back,
    Termination,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BisimFailure {
    pub condition: BisimCondition,
    /// The offending pair `(v, m(v))`, when there is one.
    pub pair: Option<(String, String)>,
    /// The unmatched transition, as `(source, label, target)`.
    pub transition: Option<(String, String, String)>,
}

impl BisimFailure {
    fn new(condition: BisimCondition, pair: Option<(&str, &str)>) -> Self {
        BisimFailure {
            condition,
            pair: pair.map(|(a, b)| (a.to_string(), b.to_string())),
            transition: None,
        }
    }

    fn with_transition(mut self, src: &str, label: String, dst: &str) -> Self {
        self.transition = Some((src.to_string(), label, dst.to_string()));
        self
    }
}

/// Checks that `m` is a functional bisimulation from `src` to `dst`. Every
/// transition from a mapped vertex must lead back into the map's domain.
#[allow(clippy::result_large_err)]
pub fn check_functional_bisim<L: Label>(
    src: &Lts<L>,
    dst: &Lts<L>,
    m: &VertexMap,
) -> Result<(), BisimFailure> {
    match m.get(src.start_id()) {
        Some(w) if w == dst.start_id() => {}
        Some(w) => {
            return Err(BisimFailure::new(
                BisimCondition::Start,
                Some((src.start_id(), w)),
            ))
        }
        None => return Err(BisimFailure::new(BisimCondition::Start, None)),
    }
    let mut pairs = Vec::with_capacity(m.len());
    for (v, w) in m {
        match (src.index_of(v), dst.index_of(w)) {
            (Some(vi), Some(wi)) => pairs.push((vi, wi)),
            _ => return Err(BisimFailure::new(BisimCondition::Domain, Some((v, w)))),
        }
    }
    let image: Vec<Option<usize>> = (0..src.len())
        .map(|v| m.get(src.id(v)).and_then(|w| dst.index_of(w)))
        .collect();
    for (v, w) in pairs {
        let pair = Some((src.id(v), dst.id(w)));
        if src.is_terminating(v) != dst.is_terminating(w) {
            return Err(BisimFailure::new(BisimCondition::Termination, pair));
        }
        let mut images = BTreeSet::new();
        for t in src.outgoing(v) {
            let label = t.label.step_label().to_string();
            let Some(w2) = image[t.dst] else {
                return Err(
                    BisimFailure::new(BisimCondition::Domain, pair).with_transition(
                        src.id(v),
                        label,
                        src.id(t.dst),
                    ),
                );
            };
            let mapped = crate::chart::Transition {
                src: w,
                label: t.label.clone(),
                dst: w2,
            };
            if !dst.contains(&mapped) {
                return Err(
                    BisimFailure::new(BisimCondition::Forth, pair).with_transition(
                        src.id(v),
                        label,
                        src.id(t.dst),
                    ),
                );
            }
            images.insert((t.label.clone(), w2));
        }
        for t in dst.outgoing(w) {
            if !images.contains(&(t.label.clone(), t.dst)) {
                return Err(
                    BisimFailure::new(BisimCondition::Back, pair).with_transition(
                        dst.id(w),
                        t.label.step_label().to_string(),
                        dst.id(t.dst),
                    ),
                );
            }
        }
    }
    Ok(())
}

/// Coarsest partition of `g`'s vertices stable under termination and
/// (label, target block) signatures. Returns a block number per vertex.
fn refine<L: Label>(g: &Lts<L>) -> Vec<usize> {
    let adj = g.successors();
    let mut block: Vec<usize> = (0..g.len()).map(|v| g.is_terminating(v) as usize).collect();
    let mut count = usize::MAX;
    loop {
        let mut ids: HashMap<(usize, BTreeSet<(L, usize)>), usize> = HashMap::new();
        let next: Vec<usize> = (0..g.len())
            .map(|v| {
                let sig: BTreeSet<(L, usize)> = adj[v]
                    .iter()
                    .map(|t| (t.label.clone(), block[t.dst]))
                    .collect();
                let fresh = ids.len();
                *ids.entry((block[v], sig)).or_insert(fresh)
            })
            .collect();
        if ids.len() == count {
            return next;
        }
        count = ids.len();
        block = next;
    }
}

fn disjoint_union<L: Label>(g1: &Lts<L>, g2: &Lts<L>) -> (Lts<L>, usize, usize) {
    let (g1, g2) = (g1.restrict_reachable(), g2.restrict_reachable());
    let v1 = g1.vertex(g1.start());
    let mut u = Lts::new(format!("L:{}", v1.id), v1.expr.clone(), v1.terminating);
    let left: Vec<usize> = (0..g1.len())
        .map(|v| {
            if v == g1.start() {
                return 0;
            }
            let vx = g1.vertex(v);
            u.add_vertex(format!("L:{}", vx.id), vx.expr.clone(), vx.terminating)
                .expect("prefixed ids are distinct")
        })
        .collect();
    let offset = u.len();
    let right: Vec<usize> = g2
        .vertices()
        .iter()
        .map(|vx| {
            u.add_vertex(format!("R:{}", vx.id), vx.expr.clone(), vx.terminating)
                .expect("prefixed ids are distinct")
        })
        .collect();
    for t in g1.transitions() {
        u.add_transition(left[t.src], t.label.clone(), left[t.dst]);
    }
    for t in g2.transitions() {
        u.add_transition(right[t.src], t.label.clone(), right[t.dst]);
    }
    let right_start = right[g2.start()];
    (u, offset, right_start)
}

/// The largest bisimulation between the reachable parts of `g1` and `g2`,
/// if it relates their start vertices.
pub fn bisimilar<L: Label>(g1: &Lts<L>, g2: &Lts<L>) -> Option<BisimRelation> {
    let (u, offset, right_start) = disjoint_union(g1, g2);
    let block = refine(&u);
    if block[u.start()] != block[right_start] {
        return None;
    }
    let mut pairs = BTreeSet::new();
    for l in 0..offset {
        for r in offset..u.len() {
            if block[l] == block[r] {
                pairs.insert((u.id(l)[2..].to_string(), u.id(r)[2..].to_string()));
            }
        }
    }
    Some(BisimRelation { pairs })
}

/// Quotient of the reachable part of `g` by bisimilarity, with the
/// quotient map. Each block is named after its least vertex id.
pub fn collapse<L: Label>(g: &Lts<L>) -> (Lts<L>, VertexMap) {
    let r = g.restrict_reachable();
    let block = refine(&r);
    let mut rep: HashMap<usize, usize> = HashMap::new();
    for (v, &b) in block.iter().enumerate() {
        rep.entry(b)
            .and_modify(|u| {
                if r.id(v) < r.id(*u) {
                    *u = v
                }
            })
            .or_insert(v);
    }
    let root = rep[&block[r.start()]];
    let rv = r.vertex(root);
    let mut q = Lts::new(rv.id.clone(), rv.expr.clone(), rv.terminating);
    let mut others: Vec<usize> = rep.values().copied().filter(|&v| v != root).collect();
    others.sort_by(|&a, &b| r.id(a).cmp(r.id(b)));
    for v in others {
        let vx = r.vertex(v);
        q.add_vertex(vx.id.clone(), vx.expr.clone(), vx.terminating)
            .expect("representatives are distinct");
    }
    for t in r.transitions() {
        let s = q
            .index_of(r.id(rep[&block[t.src]]))
            .expect("representative");
        let d = q
            .index_of(r.id(rep[&block[t.dst]]))
            .expect("representative");
        q.add_transition(s, t.label.clone(), d);
    }
    let map = (0..r.len())
        .map(|v| (r.id(v).to_string(), r.id(rep[&block[v]]).to_string()))
        .collect();
    (q, map)
}

/// Whether no two distinct reachable vertices are bisimilar.
pub fn is_collapse<L: Label>(g: &Lts<L>) -> bool {
    let r = g.restrict_reachable();
    let block = refine(&r);
    block.iter().collect::<BTreeSet<_>>().len() == r.len()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectionReport {
    pub expr: String,
    /// Reachable vertices of the induced chart of the 1-chart.
    pub induced_vertices: usize,
    pub chart_vertices: usize,
    /// The projection map on vertex ids.
    pub map: VertexMap,
    pub failure: Option<BisimFailure>,
    /// Whether the projection is a bijection onto the chart's vertices.
    pub bijective: bool,
}

impl ProjectionReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks that projection is a functional bisimulation from the reachable
/// induced chart of the 1-chart interpretation of `e` to its chart
/// interpretation.
pub fn verify_projection(e: &StarExpr, cap: usize) -> Result<ProjectionReport, ChartError> {
    let one = interpret_one(e, cap)?;
    let induced = one.chart.induce().restrict_reachable();
    let target: Chart = chart_of(e, cap)?;
    let by_id: HashMap<&str, usize> = (0..one.chart.len()).map(|v| (one.chart.id(v), v)).collect();
    let map: VertexMap = induced
        .vertices()
        .iter()
        .map(|vx| {
            let stacked = one.expr(by_id[vx.id.as_str()]);
            (vx.id.clone(), stacked.project().render())
        })
        .collect();
    let failure = check_functional_bisim(&induced, &target, &map).err();
    let image: BTreeSet<&String> = map.values().collect();
    let bijective = image.len() == map.len() && image.len() == target.len();
    Ok(ProjectionReport {
        expr: e.render(),
        induced_vertices: induced.len(),
        chart_vertices: target.len(),
        map,
        failure,
        bijective,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub expr: String,
    pub vertices: usize,
    /// Marking erasure of the labeled 1-chart equals the 1-chart.
    pub erasure_matches: bool,
    pub llee: Option<LleeFailure>,
    pub llee_alt: Option<LleeFailure>,
    /// Error from the elimination strategy, if any.
    pub strategy_error: Option<String>,
    pub strategy_steps: usize,
    /// Whether the strategy leaves no infinite path behind.
    pub residual_acyclic: bool,
}

impl WitnessReport {
    pub fn passed(&self) -> bool {
        self.erasure_matches
            && self.llee.is_none()
            && self.llee_alt.is_none()
            && self.strategy_error.is_none()
            && self.residual_acyclic
    }
}

/// Checks that the labeled 1-chart of `e` is a LLEE-witness of its 1-chart
/// and that the derived elimination strategy succeeds.
pub fn verify_witness(e: &StarExpr, cap: usize) -> Result<WitnessReport, ChartError> {
    let h = labeled_onechart_of(e, cap)?;
    let one = onechart_of(e, cap)?;
    let erasure_matches = h.erase_markings().canonical() == one.canonical();
    let fail = |v: LleeVerdict| match v {
        LleeVerdict::Pass => None,
        LleeVerdict::Fail(f) => Some(f),
    };
    let llee = fail(verify_llee(&h));
    let llee_alt = fail(verify_llee_alt(&h));
    let (strategy_error, strategy_steps, residual_acyclic) = match llee_elimination_strategy(&h) {
        Ok(run) => (None, run.steps.len(), run.is_successful()),
        Err(err) => (Some(err.to_string()), 0, false),
    };
    Ok(WitnessReport {
        expr: e.render(),
        vertices: h.len(),
        erasure_matches,
        llee,
        llee_alt,
        strategy_error,
        strategy_steps,
        residual_acyclic,
    })
}
