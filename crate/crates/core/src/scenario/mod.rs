//! Declarative scenarios: buildings as floors of rooms joined by color-coded
//! doors, NPCs, knowledge items with unlock rules, objectives and the
//! author's intended solution.

mod lint;
mod model;
mod parse;
pub mod shipped;
mod verify;

pub use lint::{has_errors, lint_scenario, Finding, Severity};
pub use model::*;
pub use parse::{parse_scenario, serialize_scenario, ParseError};
pub use verify::{verify_intended_solution, StepTrace, Verification};

use serde::{Deserialize, Serialize};

/// How the check attached to an action went.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckOutcome {
    Success,
    Failure,
    /// No check was rolled; only rules that need none can fire.
    NotRolled,
}

/// Knowledge ids unlocked by performing `action` with the given outcome.
///
/// GM-discretion rules never fire here. A rule that needs a check fires
/// only on `Success`; a rule without one fires whatever the outcome.
pub fn knowledge_unlocked_by(s: &Scenario, action: ActionKind, outcome: CheckOutcome) -> Vec<String> {
    s.knowledge
        .iter()
        .filter(|k| {
            k.unlock_rules.iter().any(|r| {
                r.action == action
                    && !r.gm_discretion
                    && (r.required_check.is_none() || outcome == CheckOutcome::Success)
            })
        })
        .map(|k| k.id.clone())
        .collect()
}
