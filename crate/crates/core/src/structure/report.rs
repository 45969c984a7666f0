use serde::{Deserialize, Serialize};

use crate::linalg::IndexTuple;

/// Relative width of the dead zone in which a minor's sign is taken as zero.
pub const SIGN_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Property {
    SC,
    SSC,
    TP,
    STP,
    VB,
}

/// How a structure check reached its verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Consecutive minors of leading column blocks and of the full matrix.
    ConsecutiveMinors,
    /// Consecutive-minor test that is only sufficient (non-strict TP).
    ConsecutiveSufficient,
    /// Total positivity of the Peña matrix.
    PenaTransform,
    /// Every minor of the requested order.
    ExhaustiveCompound,
    /// Variation bounding decided through sign consistency of one order higher.
    ScReduction,
    /// One-signed entries give VB_0 directly.
    OneSigned,
    /// The reduction's hypotheses do not hold.
    Undecidable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub rows: IndexTuple,
    pub cols: IndexTuple,
    pub value: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RouteStats {
    pub minors_evaluated: usize,
    pub lu_fallbacks: usize,
}

/// Outcome of a structure check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub property: Property,
    pub order: usize,
    pub holds: bool,
    /// False when the check could not decide; `holds` is then false as well.
    pub conclusive: bool,
    pub shared_sign: i8,
    pub route: Route,
    pub witnesses: Vec<Witness>,
    pub stats: RouteStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl StructureReport {
    pub(crate) fn new(property: Property, order: usize, route: Route) -> Self {
        Self {
            property,
            order,
            holds: false,
            conclusive: true,
            shared_sign: 0,
            route,
            witnesses: Vec::new(),
            stats: RouteStats::default(),
            note: None,
        }
    }

    pub(crate) fn inconclusive(mut self, note: impl Into<String>) -> Self {
        self.holds = false;
        self.conclusive = false;
        self.note = Some(note.into());
        self
    }
}

/// Sign of `value` with a dead zone of `SIGN_TOL * scale`.
pub fn classify(value: f64, scale: f64) -> i8 {
    if value.abs() <= SIGN_TOL * scale {
        0
    } else if value > 0.0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    LogConcave,
    Unimodal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceReport {
    pub kind: SequenceKind,
    pub holds: bool,
    /// 1-based.
    pub peak_index: Option<usize>,
    /// 1-based.
    pub violation_index: Option<usize>,
}
