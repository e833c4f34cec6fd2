use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::model::{Scenario, OUTSIDE, SCHEMA_VERSION};

/// Where in the document a problem sits: a line/column for syntax and enum
/// errors, a JSON path for structural ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ParseError {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub message: String,
}

impl ParseError {
    fn at_path(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            line: None,
            column: None,
            path: Some(path.into()),
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.column, &self.path) {
            (Some(l), Some(c), _) => write!(f, "{l}:{c}: {}", self.message),
            (_, _, Some(p)) => write!(f, "{p}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

impl From<serde_json::Error> for ParseError {
    fn from(e: serde_json::Error) -> Self {
        Self {
            line: Some(e.line()),
            column: Some(e.column()),
            path: None,
            message: e.to_string(),
        }
    }
}

/// Parse and resolve a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, Vec<ParseError>> {
    let scenario: Scenario = serde_json::from_str(text).map_err(|e| vec![e.into()])?;
    let errors = resolve(&scenario);
    if errors.is_empty() {
        Ok(scenario)
    } else {
        Err(errors)
    }
}

pub fn serialize_scenario(scenario: &Scenario) -> String {
    serde_json::to_string_pretty(scenario).expect("scenario serializes")
}

fn check_unique<'a>(
    errors: &mut Vec<ParseError>,
    what: &str,
    items: impl Iterator<Item = (String, &'a str)>,
) -> HashSet<&'a str> {
    let mut seen = HashSet::new();
    for (path, id) in items {
        if id.is_empty() {
            errors.push(ParseError::at_path(path, format!("empty {what} id")));
        } else if id == OUTSIDE && what == "room" {
            errors.push(ParseError::at_path(path, "`outside` is reserved"));
        } else if !seen.insert(id) {
            errors.push(ParseError::at_path(path, format!("duplicate {what} id `{id}`")));
        }
    }
    seen
}

/// Every id unique, every reference resolvable.
fn resolve(s: &Scenario) -> Vec<ParseError> {
    let mut errors = Vec::new();
    if s.schema_version != SCHEMA_VERSION {
        errors.push(ParseError::at_path(
            "schemaVersion",
            format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                s.schema_version
            ),
        ));
    }

    let mut floor_indexes = HashSet::new();
    for (i, f) in s.floors.iter().enumerate() {
        if !floor_indexes.insert(f.index) {
            errors.push(ParseError::at_path(
                format!("floors[{i}].index"),
                format!("duplicate floor index {}", f.index),
            ));
        }
    }

    let rooms = check_unique(
        &mut errors,
        "room",
        s.floors.iter().enumerate().flat_map(|(fi, f)| {
            f.rooms
                .iter()
                .enumerate()
                .map(move |(ri, r)| (format!("floors[{fi}].rooms[{ri}].id"), r.id.as_str()))
        }),
    );
    let npcs = check_unique(
        &mut errors,
        "npc",
        s.npcs
            .iter()
            .enumerate()
            .map(|(i, n)| (format!("npcs[{i}].id"), n.id.as_str())),
    );
    let knowledge = check_unique(
        &mut errors,
        "knowledge",
        s.knowledge
            .iter()
            .enumerate()
            .map(|(i, k)| (format!("knowledge[{i}].id"), k.id.as_str())),
    );
    let objectives = check_unique(
        &mut errors,
        "objective",
        s.objectives
            .iter()
            .enumerate()
            .map(|(i, o)| (format!("objectives[{i}].id"), o.id.as_str())),
    );

    for (fi, f) in s.floors.iter().enumerate() {
        let on_floor: HashSet<&str> = f.rooms.iter().map(|r| r.id.as_str()).collect();
        for (di, d) in f.doors.iter().enumerate() {
            for (end, id) in [("from", &d.from), ("to", &d.to)] {
                if id != OUTSIDE && !on_floor.contains(id.as_str()) {
                    errors.push(ParseError::at_path(
                        format!("floors[{fi}].doors[{di}].{end}"),
                        format!("door references unknown room `{id}` on floor {}", f.index),
                    ));
                }
            }
            if d.from == d.to {
                errors.push(ParseError::at_path(
                    format!("floors[{fi}].doors[{di}]"),
                    "door connects a room to itself",
                ));
            }
        }
    }

    for (i, n) in s.npcs.iter().enumerate() {
        if !rooms.contains(n.home_room.as_str()) {
            errors.push(ParseError::at_path(
                format!("npcs[{i}].homeRoom"),
                format!("unknown room `{}`", n.home_room),
            ));
        }
    }

    for (i, k) in s.knowledge.iter().enumerate() {
        if k.unlock_rules.is_empty() {
            errors.push(ParseError::at_path(
                format!("knowledge[{i}].unlockRules"),
                format!("knowledge item `{}` has no unlock rule", k.id),
            ));
        }
    }

    for (i, step) in s.intended_solution.iter().enumerate() {
        for (j, k) in step.requires_knowledge.iter().enumerate() {
            if !knowledge.contains(k.as_str()) {
                errors.push(ParseError::at_path(
                    format!("intendedSolution[{i}].requiresKnowledge[{j}]"),
                    format!("unknown knowledge item `{k}`"),
                ));
            }
        }
        if let Some(r) = &step.room {
            if !rooms.contains(r.as_str()) {
                errors.push(ParseError::at_path(
                    format!("intendedSolution[{i}].room"),
                    format!("unknown room `{r}`"),
                ));
            }
        }
        if let Some(n) = &step.npc {
            if !npcs.contains(n.as_str()) {
                errors.push(ParseError::at_path(
                    format!("intendedSolution[{i}].npc"),
                    format!("unknown npc `{n}`"),
                ));
            }
        }
        if let Some(o) = &step.completes {
            if !objectives.contains(o.as_str()) {
                errors.push(ParseError::at_path(
                    format!("intendedSolution[{i}].completes"),
                    format!("unknown objective `{o}`"),
                ));
            }
        }
    }
    errors
}
