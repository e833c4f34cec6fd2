use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use super::model::{FeatureKind, OrganizationType, Scenario, OUTSIDE};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Finding {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{sev}[{}]: {}", self.code, self.message)
    }
}

pub fn has_errors(findings: &[Finding]) -> bool {
    findings.iter().any(|f| f.severity == Severity::Error)
}

fn error(code: &'static str, message: String) -> Finding {
    Finding {
        severity: Severity::Error,
        code,
        message,
    }
}

fn warning(code: &'static str, message: String) -> Finding {
    Finding {
        severity: Severity::Warning,
        code,
        message,
    }
}

/// Authoring checks on a parsed scenario.
pub fn lint_scenario(s: &Scenario) -> Vec<Finding> {
    let mut out = Vec::new();
    lint_floors(s, &mut out);
    lint_knowledge(s, &mut out);
    lint_solution(s, &mut out);
    lint_organization(s, &mut out);
    out
}

fn lint_floors(s: &Scenario, out: &mut Vec<Finding>) {
    if s.floors.is_empty() {
        out.push(error("no-floors", "scenario has no floors".into()));
    }
    for floor in &s.floors {
        let mut adjacent: HashMap<&str, Vec<&str>> = HashMap::new();
        let mut entrances: Vec<&str> = Vec::new();
        for d in &floor.doors {
            if d.is_exterior() {
                let inside = if d.from == OUTSIDE { &d.to } else { &d.from };
                entrances.push(inside);
                continue;
            }
            adjacent.entry(&d.from).or_default().push(&d.to);
            adjacent.entry(&d.to).or_default().push(&d.from);
        }
        entrances.extend(floor.rooms.iter().filter(|r| r.staircase).map(|r| r.id.as_str()));
        if entrances.is_empty() {
            out.push(error(
                "floor-without-entrance",
                format!(
                    "floor {} ({}) has no exterior door or staircase",
                    floor.index, floor.name
                ),
            ));
            continue;
        }
        let mut reached: BTreeSet<&str> = BTreeSet::new();
        let mut queue: VecDeque<&str> = entrances.into_iter().collect();
        while let Some(room) = queue.pop_front() {
            if reached.insert(room) {
                if let Some(next) = adjacent.get(room) {
                    queue.extend(next.iter().copied());
                }
            }
        }
        for room in &floor.rooms {
            if !reached.contains(room.id.as_str()) {
                out.push(error(
                    "unreachable-room",
                    format!(
                        "room `{}` on floor {} cannot be reached from an entrance",
                        room.id, floor.index
                    ),
                ));
            }
        }
    }
}

fn lint_knowledge(s: &Scenario, out: &mut Vec<Finding>) {
    for k in &s.knowledge {
        if k.unlock_rules.is_empty() {
            out.push(error(
                "knowledge-never-unlocked",
                format!("knowledge item `{}` has no unlock rule", k.id),
            ));
        } else if k.unlock_rules.iter().all(|r| r.gm_discretion) {
            out.push(warning(
                "knowledge-gm-only",
                format!(
                    "knowledge item `{}` is only unlocked at GM discretion",
                    k.id
                ),
            ));
        }
    }
}

fn lint_solution(s: &Scenario, out: &mut Vec<Finding>) {
    match s.intended_solution.last() {
        None => out.push(error(
            "no-intended-solution",
            "scenario has no intended solution".into(),
        )),
        Some(last) if last.completes.is_none() => out.push(error(
            "solution-does-not-finish",
            "final step of the intended solution completes no objective".into(),
        )),
        _ => {}
    }
    let completed: BTreeSet<&str> = s
        .intended_solution
        .iter()
        .filter_map(|st| st.completes.as_deref())
        .collect();
    for o in &s.objectives {
        if !completed.contains(o.id.as_str()) {
            out.push(error(
                "objective-unreachable",
                format!("objective `{}` unreachable by intended solution", o.id),
            ));
        }
    }
    for (i, step) in s.intended_solution.iter().enumerate() {
        if let Some(attack) = step.attack {
            let expected = attack.entry().required_checks;
            if step.checks != expected {
                out.push(warning(
                    "attack-checks-mismatch",
                    format!(
                        "step {} lists checks {:?} but {:?} needs {:?}",
                        i + 1,
                        step.checks,
                        attack,
                        expected
                    ),
                ));
            }
        }
    }
}

fn lint_organization(s: &Scenario, out: &mut Vec<Finding>) {
    if s.organization != OrganizationType::Sme {
        return;
    }
    if !s.features().any(|f| f.kind == FeatureKind::Dumpster) {
        out.push(error(
            "missing-dumpster",
            "SME scenario has no dumpster feature".into(),
        ));
    }
    if s.features().any(|f| f.kind == FeatureKind::WelcomeDesk) {
        out.push(warning(
            "sme-welcome-desk",
            "SME scenario has a welcome desk".into(),
        ));
    }
    if s.doors().any(|d| d.color.is_restricted()) {
        out.push(warning(
            "sme-restricted-area",
            "SME scenario has restricted (orange/red) doors".into(),
        ));
    }
}
