use std::collections::BTreeSet;

use serde::Serialize;

use super::lint::{lint_scenario, Finding};
use super::model::Scenario;
use super::{knowledge_unlocked_by, CheckOutcome};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StepTrace {
    pub step: usize,
    pub description: String,
    pub unlocked: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub completed: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Verification {
    pub passed: bool,
    pub steps: Vec<StepTrace>,
    pub completed_objectives: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lint_errors: Vec<Finding>,
}

/// Walk the intended solution with every check forced to succeed.
///
/// Passes when each step only relies on knowledge unlocked by earlier steps
/// and at least one objective gets completed. A scenario with lint errors
/// never passes.
pub fn verify_intended_solution(s: &Scenario) -> Verification {
    let lint_errors: Vec<Finding> = lint_scenario(s)
        .into_iter()
        .filter(|f| f.severity == super::Severity::Error)
        .collect();
    if !lint_errors.is_empty() {
        return Verification {
            passed: false,
            steps: Vec::new(),
            completed_objectives: Vec::new(),
            failure: Some(format!("scenario has {} lint error(s)", lint_errors.len())),
            lint_errors,
        };
    }

    let mut unlocked: BTreeSet<String> = BTreeSet::new();
    let mut completed: Vec<String> = Vec::new();
    let mut steps = Vec::new();
    let mut failure = None;

    for (i, step) in s.intended_solution.iter().enumerate() {
        let n = i + 1;
        if let Some(missing) = step
            .requires_knowledge
            .iter()
            .find(|k| !unlocked.contains(k.as_str()))
        {
            failure = Some(format!(
                "step {n} `{}` relies on knowledge `{missing}` that no earlier step unlocked",
                step.description
            ));
            break;
        }
        let outcome = if step.checks.is_empty() {
            CheckOutcome::NotRolled
        } else {
            CheckOutcome::Success
        };
        let gained: Vec<String> = knowledge_unlocked_by(s, step.action, outcome)
            .into_iter()
            .filter(|id| unlocked.insert(id.clone()))
            .collect();
        if let Some(o) = &step.completes {
            if !completed.contains(o) {
                completed.push(o.clone());
            }
        }
        steps.push(StepTrace {
            step: n,
            description: step.description.clone(),
            unlocked: gained,
            completed: step.completes.clone(),
        });
    }

    if failure.is_none() && completed.is_empty() {
        failure = Some("intended solution completes no objective".into());
    }
    Verification {
        passed: failure.is_none(),
        steps,
        completed_objectives: completed,
        failure,
        lint_errors,
    }
}
