//! Differential nature of `Q(x,y;t)` from the decision tree
//! degeneracy -> genus -> group of the walk.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::group::{group_report, GroupConfig, GroupError, GroupReport, GroupVerdict, T_SPECIFIC_CAVEAT};
use crate::kernel::{degeneracy_test, genus_classify, DegeneracyReport, GenusReport, HalfPlaneClass};
use crate::model::{Step, WeightedModel};
use crate::series::fmt_fraction;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("group: {0}")]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Nature {
    Algebraic,
    DifferentiallyAlgebraic,
    DifferentiallyTranscendental,
    /// Infinite group: the three variables share one nature, which only the
    /// decoupling-function test can decide.
    EquivalentUndecided,
}

impl fmt::Display for Nature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Algebraic => "algebraic",
            Self::DifferentiallyAlgebraic => "differentially algebraic",
            Self::DifferentiallyTranscendental => "differentially transcendental",
            Self::EquivalentUndecided => "undecided",
        })
    }
}

/// `Q = 1/(1 - d_{0,0} t)` for models whose walks cannot leave the origin.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ClosedForm {
    pub expression: String,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub d00: Rational,
    /// Coefficient ratio of the geometric series, `d_{0,0} t`.
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub ratio: Rational,
}

impl ClosedForm {
    /// Coefficient of `x^0 y^0 t^k` (all others vanish).
    pub fn origin_coefficient(&self, k: usize) -> Rational {
        num_traits::pow(self.d00.clone(), k)
    }
}

/// Returns the closed form when every step other than `(0,0)` leaves the
/// quadrant from the origin, i.e. has a negative coordinate.
pub fn trivial_closed_form(model: &WeightedModel) -> Option<ClosedForm> {
    let trapped = model.step_set().without_origin().iter().all(|s| s.i < 0 || s.j < 0);
    if !trapped {
        return None;
    }
    let d00 = model.weight_of(Step::new(0, 0)).clone();
    let expression = if d00.is_zero() {
        "1".to_string()
    } else if d00.is_one() {
        "1/(1 - t)".to_string()
    } else {
        format!("1/(1 - ({}) t)", fmt_fraction(&d00))
    };
    Some(ClosedForm {
        expression,
        ratio: &d00 * model.t(),
        d00,
    })
}

/// One applied result in the decision tree.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Evidence {
    Degeneracy(DegeneracyReport),
    Genus(GenusReport),
    Group(GroupReport),
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct NatureReport {
    pub verdict: Nature,
    /// True for algebraic and differentially algebraic verdicts.
    pub differentially_algebraic: Option<bool>,
    pub per_variable_note: &'static str,
    pub evidence: Vec<Evidence>,
    pub closed_form: Option<ClosedForm>,
    pub caveats: Vec<String>,
    /// Short reason appended to the verdict line.
    pub reason: String,
}

impl NatureReport {
    pub fn group(&self) -> Option<&GroupReport> {
        self.evidence.iter().find_map(|e| match e {
            Evidence::Group(g) => Some(g),
            _ => None,
        })
    }

    pub fn verdict_line(&self) -> String {
        format!("verdict: {} ({})", self.verdict, self.reason)
    }
}

pub const PER_VARIABLE_NOTE: &str = "the nature is the same in x, y and t";

pub fn classify(model: &WeightedModel) -> Result<NatureReport, ClassifyError> {
    classify_with(model, &GroupConfig::default())
}

pub fn classify_with(model: &WeightedModel, config: &GroupConfig) -> Result<NatureReport, ClassifyError> {
    let degeneracy = degeneracy_test(model);
    let mut evidence = vec![Evidence::Degeneracy(degeneracy)];
    let closed_form = trivial_closed_form(model);
    let done = |verdict, reason: String, evidence, caveats| NatureReport {
        verdict,
        differentially_algebraic: match verdict {
            Nature::Algebraic | Nature::DifferentiallyAlgebraic => Some(true),
            Nature::DifferentiallyTranscendental => Some(false),
            Nature::EquivalentUndecided => None,
        },
        per_variable_note: PER_VARIABLE_NOTE,
        evidence,
        closed_form: closed_form.clone(),
        caveats,
        reason,
    };
    if degeneracy.degenerate {
        return Ok(done(Nature::Algebraic, "degenerate model".into(), evidence, vec![]));
    }
    let genus = genus_classify(model.step_set());
    evidence.push(Evidence::Genus(genus));
    let family = |n: u8| format!("genus zero, family {n}");
    match genus.class {
        HalfPlaneClass::Genus0Family1 => {
            return Ok(done(Nature::DifferentiallyTranscendental, family(1), evidence, vec![]));
        }
        HalfPlaneClass::Genus0Family2 => return Ok(done(Nature::Algebraic, family(2), evidence, vec![])),
        HalfPlaneClass::Genus0Family3 => return Ok(done(Nature::Algebraic, family(3), evidence, vec![])),
        HalfPlaneClass::Genus0Family4 => return Ok(done(Nature::Algebraic, family(4), evidence, vec![])),
        HalfPlaneClass::DegenerateHalfPlane => {
            return Ok(done(
                Nature::Algebraic,
                "step set in an axis half-plane".into(),
                evidence,
                vec![],
            ));
        }
        HalfPlaneClass::Elliptic => {}
    }
    let group = group_report(model, config)?;
    let caveats = vec![
        T_SPECIFIC_CAVEAT.to_string(),
        format!("denominators searched up to {}", group.max_denominator),
    ];
    let verdict = group.verdict;
    evidence.push(Evidence::Group(group));
    Ok(match verdict {
        GroupVerdict::Finite { order_group, .. } => done(
            Nature::DifferentiallyAlgebraic,
            format!("finite group, order {order_group}"),
            evidence,
            caveats,
        ),
        GroupVerdict::InfinitePresumed { bound_checked } => {
            let mut caveats = caveats;
            caveats
                .push("deciding the shared nature needs the decoupling-function test, which is not implemented".into());
            done(
                Nature::EquivalentUndecided,
                format!("group presumed infinite, no order up to {bound_checked}"),
                evidence,
                caveats,
            )
        }
    })
}
