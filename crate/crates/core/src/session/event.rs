use serde::{Deserialize, Serialize};

use crate::character::CharacterFile;
use crate::check::{CheckResult, CheckSpec};
use crate::scenario::ActionKind;
use crate::taxonomy::{Attack, InventoryKind};

pub const LOG_SCHEMA_VERSION: u32 = 1;

/// Something that happened at the table. Events are never edited; a GM
/// correction is a further event.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all_fields = "camelCase", deny_unknown_fields)]
pub enum SessionEvent {
    SessionCreated {
        schema_version: u32,
        scenario_id: String,
        characters: Vec<CharacterFile>,
        seed: u64,
        initial_alertness: u32,
        failure_cap: u32,
    },
    FloorRevealed {
        floor: i32,
    },
    CheckDeclared {
        actor: String,
        check: CheckSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        attack: Option<Attack>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        action: Option<ActionKind>,
    },
    DiceRolled {
        values: Vec<u8>,
    },
    CheckResolved {
        result: CheckResult,
    },
    FailureCompensated {
        compensated: bool,
    },
    AlertnessRaised {
        delta: u32,
    },
    AlertnessEased {
        delta: u32,
        reason: String,
    },
    KnowledgeGranted {
        ids: Vec<String>,
    },
    ItemConsumed {
        actor: String,
        item: InventoryKind,
    },
    ObjectiveCompleted {
        objective: String,
    },
    ScenarioFailed {
        reason: String,
    },
    SessionClosed,
}

impl SessionEvent {
    pub fn kind(&self) -> &'static str {
        match self {
            SessionEvent::SessionCreated { .. } => "SessionCreated",
            SessionEvent::FloorRevealed { .. } => "FloorRevealed",
            SessionEvent::CheckDeclared { .. } => "CheckDeclared",
            SessionEvent::DiceRolled { .. } => "DiceRolled",
            SessionEvent::CheckResolved { .. } => "CheckResolved",
            SessionEvent::FailureCompensated { .. } => "FailureCompensated",
            SessionEvent::AlertnessRaised { .. } => "AlertnessRaised",
            SessionEvent::AlertnessEased { .. } => "AlertnessEased",
            SessionEvent::KnowledgeGranted { .. } => "KnowledgeGranted",
            SessionEvent::ItemConsumed { .. } => "ItemConsumed",
            SessionEvent::ObjectiveCompleted { .. } => "ObjectiveCompleted",
            SessionEvent::ScenarioFailed { .. } => "ScenarioFailed",
            SessionEvent::SessionClosed => "SessionClosed",
        }
    }
}

/// An event with its position in the log. One of these per JSONL line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub seq: u64,
    /// Milliseconds since the Unix epoch.
    pub timestamp: u64,
    #[serde(flatten)]
    pub event: SessionEvent,
}
