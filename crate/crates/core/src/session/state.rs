use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::character::Character;
use crate::check::{dice_for, resolve_with_rolls, CheckResult, CheckSpec};
use crate::dice::die_at;
use crate::taxonomy::InventoryKind;

use super::event::{EventRecord, SessionEvent, LOG_SCHEMA_VERSION};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionStatus {
    Active,
    Failed,
    Closed,
}

/// Where the adjudication workflow stands.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "phase", rename_all = "camelCase", rename_all_fields = "camelCase")]
pub enum Phase {
    Idle,
    CheckDeclared { actor: String, check: CheckSpec },
    DiceRolled { actor: String, check: CheckSpec, values: Vec<u8> },
    /// A check failed; the GM still has to rule on compensation.
    AwaitingFailureOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("corrupt log at sequence number {seq}: {reason}")]
    Corrupt { seq: u64, reason: String },
    #[error("corrupt log at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("empty log")]
    Empty,
}

fn corrupt(seq: u64, reason: impl Into<String>) -> ReplayError {
    ReplayError::Corrupt {
        seq,
        reason: reason.into(),
    }
}

/// Everything the table needs to know, folded from the event log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionState {
    pub scenario_id: String,
    pub seed: u64,
    pub failure_cap: u32,
    pub characters: BTreeMap<String, Character>,
    pub revealed_floors: BTreeSet<i32>,
    pub alertness: u32,
    pub knowledge: BTreeSet<String>,
    pub consumed_items: BTreeMap<String, BTreeSet<InventoryKind>>,
    pub completed_objectives: BTreeSet<String>,
    pub dice_position: u64,
    pub status: SessionStatus,
    pub phase: Phase,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub last_result: Option<CheckResult>,
    /// Sequence number of the last applied event.
    pub version: u64,
    /// Timestamp of the last applied event.
    pub last_timestamp: u64,
}

impl SessionState {
    /// Build the initial state from the first record of a log.
    pub fn from_created(rec: &EventRecord) -> Result<Self, ReplayError> {
        if rec.seq != 0 {
            return Err(corrupt(rec.seq, "expected sequence number 0"));
        }
        let SessionEvent::SessionCreated {
            schema_version,
            scenario_id,
            characters,
            seed,
            initial_alertness,
            failure_cap,
        } = &rec.event
        else {
            return Err(corrupt(rec.seq, "first event must be SessionCreated"));
        };
        if *schema_version != LOG_SCHEMA_VERSION {
            return Err(corrupt(
                rec.seq,
                format!("unsupported log schema version {schema_version}"),
            ));
        }
        let mut roster = BTreeMap::new();
        for file in characters {
            let c = file.validate().map_err(|v| {
                corrupt(
                    rec.seq,
                    format!("character `{}` is invalid: {}", file.name, v[0]),
                )
            })?;
            if roster.insert(c.name().to_string(), c).is_some() {
                return Err(corrupt(rec.seq, format!("duplicate character `{}`", file.name)));
            }
        }
        if roster.is_empty() {
            return Err(corrupt(rec.seq, "session has no characters"));
        }
        Ok(Self {
            scenario_id: scenario_id.clone(),
            seed: *seed,
            failure_cap: *failure_cap,
            characters: roster,
            revealed_floors: BTreeSet::new(),
            alertness: *initial_alertness,
            knowledge: BTreeSet::new(),
            consumed_items: BTreeMap::new(),
            completed_objectives: BTreeSet::new(),
            dice_position: 0,
            status: SessionStatus::Active,
            phase: Phase::Idle,
            last_result: None,
            version: 0,
            last_timestamp: rec.timestamp,
        })
    }

    pub fn is_active(&self) -> bool {
        self.status == SessionStatus::Active
    }

    pub fn has_consumed(&self, actor: &str, item: InventoryKind) -> bool {
        self.consumed_items
            .get(actor)
            .is_some_and(|s| s.contains(&item))
    }

    /// Apply the next record. Rejects anything the engine could not have
    /// produced: gaps, events after the end, dice that do not match the
    /// seeded stream, results that do not follow from the dice.
    pub fn apply(&mut self, rec: &EventRecord) -> Result<(), ReplayError> {
        let seq = rec.seq;
        let expected = self.version + 1;
        if seq != expected {
            return Err(corrupt(seq, format!("expected sequence number {expected}")));
        }
        if rec.timestamp < self.last_timestamp {
            return Err(corrupt(seq, "timestamp goes backwards"));
        }
        if !self.is_active() {
            return Err(corrupt(seq, "event after the session ended"));
        }
        let idle_or_awaiting = matches!(self.phase, Phase::Idle | Phase::AwaitingFailureOutcome);
        match &rec.event {
            SessionEvent::SessionCreated { .. } => {
                return Err(corrupt(seq, "SessionCreated in the middle of a log"));
            }
            SessionEvent::FloorRevealed { floor } => {
                if !self.revealed_floors.insert(*floor) {
                    return Err(corrupt(seq, format!("floor {floor} revealed twice")));
                }
            }
            SessionEvent::CheckDeclared { actor, check, .. } => {
                if self.phase != Phase::Idle {
                    return Err(corrupt(seq, "check declared while another is open"));
                }
                let character = self
                    .characters
                    .get(actor)
                    .ok_or_else(|| corrupt(seq, format!("unknown actor `{actor}`")))?;
                check
                    .validate()
                    .map_err(|e| corrupt(seq, e.to_string()))?;
                if check.alertness != self.alertness {
                    return Err(corrupt(
                        seq,
                        format!(
                            "check records alertness {} but {} was in force",
                            check.alertness, self.alertness
                        ),
                    ));
                }
                if let Some(item) = check.item {
                    if !character.owns(item.kind) {
                        return Err(corrupt(seq, format!("{actor} does not own {}", item.kind)));
                    }
                    if item.kind.is_single_use() && self.has_consumed(actor, item.kind) {
                        return Err(corrupt(seq, format!("{actor} already used {}", item.kind)));
                    }
                }
                self.phase = Phase::CheckDeclared {
                    actor: actor.clone(),
                    check: check.clone(),
                };
            }
            SessionEvent::DiceRolled { values } => {
                let Phase::CheckDeclared { actor, check } = &self.phase else {
                    return Err(corrupt(seq, "dice rolled without a declared check"));
                };
                let n = dice_for(&self.characters[actor], check.skill);
                if values.len() != n {
                    return Err(corrupt(seq, format!("expected {n} dice, got {}", values.len())));
                }
                for (i, &v) in values.iter().enumerate() {
                    let want = die_at(self.seed, self.dice_position + i as u64);
                    if v != want {
                        return Err(corrupt(
                            seq,
                            format!(
                                "die {} is {v} but the seeded stream gives {want}",
                                self.dice_position + i as u64
                            ),
                        ));
                    }
                }
                self.dice_position += n as u64;
                self.phase = Phase::DiceRolled {
                    actor: actor.clone(),
                    check: check.clone(),
                    values: values.clone(),
                };
            }
            SessionEvent::CheckResolved { result } => {
                let Phase::DiceRolled {
                    actor,
                    check,
                    values,
                } = &self.phase
                else {
                    return Err(corrupt(seq, "check resolved before dice were rolled"));
                };
                let expected = resolve_with_rolls(check, &self.characters[actor], values)
                    .map_err(|e| corrupt(seq, e.to_string()))?;
                if &expected != result {
                    return Err(corrupt(seq, "recorded result does not follow from the dice"));
                }
                self.phase = if result.success {
                    Phase::Idle
                } else {
                    Phase::AwaitingFailureOutcome
                };
                self.last_result = Some(result.clone());
            }
            SessionEvent::FailureCompensated { .. } => {
                if self.phase != Phase::AwaitingFailureOutcome {
                    return Err(corrupt(seq, "no failed check awaiting an outcome"));
                }
                self.phase = Phase::Idle;
            }
            SessionEvent::AlertnessRaised { delta } => {
                if !idle_or_awaiting {
                    return Err(corrupt(seq, "alertness changed mid-check"));
                }
                self.alertness += delta;
            }
            SessionEvent::AlertnessEased { delta, .. } => {
                if !idle_or_awaiting {
                    return Err(corrupt(seq, "alertness changed mid-check"));
                }
                self.alertness = self.alertness.saturating_sub(*delta);
            }
            SessionEvent::KnowledgeGranted { ids } => {
                if !idle_or_awaiting {
                    return Err(corrupt(seq, "knowledge granted mid-check"));
                }
                self.knowledge.extend(ids.iter().cloned());
            }
            SessionEvent::ItemConsumed { actor, item } => {
                let character = self
                    .characters
                    .get(actor)
                    .ok_or_else(|| corrupt(seq, format!("unknown actor `{actor}`")))?;
                if !character.owns(*item) || !item.is_single_use() {
                    return Err(corrupt(seq, format!("{actor} cannot consume {item}")));
                }
                if !self
                    .consumed_items
                    .entry(actor.clone())
                    .or_default()
                    .insert(*item)
                {
                    return Err(corrupt(seq, format!("{actor} consumed {item} twice")));
                }
            }
            SessionEvent::ObjectiveCompleted { objective } => {
                if !self.completed_objectives.insert(objective.clone()) {
                    return Err(corrupt(seq, format!("objective `{objective}` completed twice")));
                }
            }
            SessionEvent::ScenarioFailed { .. } => self.status = SessionStatus::Failed,
            SessionEvent::SessionClosed => self.status = SessionStatus::Closed,
        }
        self.version = seq;
        self.last_timestamp = rec.timestamp;
        Ok(())
    }
}

/// Fold a complete log into its state.
pub fn replay(records: &[EventRecord]) -> Result<SessionState, ReplayError> {
    let (first, rest) = records.split_first().ok_or(ReplayError::Empty)?;
    let mut state = SessionState::from_created(first)?;
    for rec in rest {
        state.apply(rec)?;
    }
    Ok(state)
}
