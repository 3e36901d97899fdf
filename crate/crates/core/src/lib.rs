//! Process semantics of star expressions as charts, the 1-chart refinement
//! with empty steps, loop elimination (LEE) and layered loop-elimination
//! witnesses (LLEE).

pub mod bisim;
pub mod chart;
pub mod checks;
pub mod corpus;
pub mod lee;
pub mod semantics;
pub mod syntax;

pub use bisim::{
    bisimilar, check_functional_bisim, collapse, is_collapse, verify_projection, verify_witness,
    BisimCondition, BisimFailure, BisimRelation, ProjectionReport, VertexMap, WitnessReport,
};
pub use chart::{
    chart_of, labeled_onechart_of, onechart_of, AnyChart, Chart, ChartError, LabeledChart, Lts,
    Marked, NamedTransition, OneChart, Transition, DEFAULT_CAP,
};
pub use checks::{check_properties, MutationTally, PropertyFailure, PropertyReport, PROPERTIES};
pub use corpus::CorpusConfig;
pub use lee::{
    check_loop_chart, eliminate, lee, llee_elimination_strategy, llee_loop_subchart, loop_subchart,
    replay, run_to_labeling, successful_runs, verify_llee, verify_llee_alt, EliminationRun,
    EliminationStep, LeeError, LeeOutcome, LleeFailure, LleeVerdict, LoopViolation, DEFAULT_BUDGET,
};
pub use semantics::{Marking, StepLabel};
pub use syntax::{parse_star_expr, Action, StackedExpr, StarExpr, SyntaxError};
