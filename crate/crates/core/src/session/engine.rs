use std::collections::BTreeSet;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::character::Character;
use crate::check::{resolve_check, CheckError, CheckSpec};
use crate::dice::DiceStream;
use crate::scenario::{knowledge_unlocked_by, ActionKind, CheckOutcome, Scenario};
use crate::taxonomy::{Attack, InventoryKind};

use super::event::{EventRecord, SessionEvent, LOG_SCHEMA_VERSION};
use super::state::{replay, Phase, ReplayError, SessionState};

pub const DEFAULT_FAILURE_CAP: u32 = 6;
pub const MAX_CHARACTERS: usize = 6;

/// A GM instruction. Each one turns into zero or more events.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all_fields = "camelCase")]
pub enum Command {
    RevealFloor {
        floor: i32,
    },
    AdjudicateCheck {
        actor: String,
        check: CheckSpec,
        #[serde(default)]
        attack: Option<Attack>,
        /// Knowledge-bearing action the check belongs to, if any.
        #[serde(default)]
        action: Option<ActionKind>,
    },
    RecordFailureOutcome {
        compensated: bool,
    },
    RaiseAlertness {
        delta: u32,
    },
    EaseAlertness {
        delta: u32,
        reason: String,
    },
    /// An action that needs no roll, such as observing the building.
    PerformAction {
        action: ActionKind,
    },
    GrantKnowledge {
        ids: Vec<String>,
    },
    CompleteObjective {
        objective: String,
    },
    FailScenario {
        reason: String,
    },
    CloseSession,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionConfig {
    /// Alertness at which the scenario fails.
    pub failure_cap: u32,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            failure_cap: DEFAULT_FAILURE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SessionError {
    #[error("a session needs 1 to {MAX_CHARACTERS} characters, got {0}")]
    CharacterCount(usize),
    #[error("duplicate character name `{0}`")]
    DuplicateCharacter(String),
    #[error("failure cap must be at least 1")]
    FailureCap,
    #[error("session is not active")]
    NotActive,
    #[error("unknown actor `{0}`")]
    UnknownActor(String),
    #[error("unknown floor {0}")]
    UnknownFloor(i32),
    #[error("floor {0} is already revealed")]
    FloorAlreadyRevealed(i32),
    #[error("unknown knowledge item `{0}`")]
    UnknownKnowledge(String),
    #[error("unknown objective `{0}`")]
    UnknownObjective(String),
    #[error("objective `{0}` is already completed")]
    ObjectiveAlreadyCompleted(String),
    #[error("single-use exhausted: {actor}'s {item} can only be used once per scenario")]
    SingleUseExhausted { actor: String, item: InventoryKind },
    #[error("no failed check is awaiting an outcome")]
    NoPendingFailure,
    #[error("the outcome of the last failed check has not been recorded")]
    FailureOutcomePending,
    #[error("delta must be at least 1")]
    ZeroDelta,
    #[error("log belongs to scenario `{log}`, not `{scenario}`")]
    ScenarioMismatch { log: String, scenario: String },
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Replay(#[from] ReplayError),
}

/// A live session: the scenario it plays, its log and the folded state.
#[derive(Clone, Debug)]
pub struct Session {
    scenario: Scenario,
    log: Vec<EventRecord>,
    state: SessionState,
}

pub fn now_millis() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Open a session with fog of war fully on.
pub fn create_session(
    scenario: Scenario,
    characters: &[Character],
    seed: u64,
    config: SessionConfig,
) -> Result<Session, SessionError> {
    create_session_at(scenario, characters, seed, config, now_millis())
}

pub fn create_session_at(
    scenario: Scenario,
    characters: &[Character],
    seed: u64,
    config: SessionConfig,
    timestamp: u64,
) -> Result<Session, SessionError> {
    if characters.is_empty() || characters.len() > MAX_CHARACTERS {
        return Err(SessionError::CharacterCount(characters.len()));
    }
    let mut names = BTreeSet::new();
    for c in characters {
        if !names.insert(c.name()) {
            return Err(SessionError::DuplicateCharacter(c.name().to_string()));
        }
    }
    if config.failure_cap == 0 {
        return Err(SessionError::FailureCap);
    }
    let record = EventRecord {
        seq: 0,
        timestamp,
        event: SessionEvent::SessionCreated {
            schema_version: LOG_SCHEMA_VERSION,
            scenario_id: scenario.id.clone(),
            characters: characters.iter().map(Character::to_file).collect(),
            seed,
            initial_alertness: scenario.initial_alertness,
            failure_cap: config.failure_cap,
        },
    };
    let state = SessionState::from_created(&record)?;
    Ok(Session {
        scenario,
        log: vec![record],
        state,
    })
}

impl Session {
    /// Rebuild a session from a persisted log.
    pub fn from_log(scenario: Scenario, log: Vec<EventRecord>) -> Result<Self, SessionError> {
        let state = replay(&log)?;
        if state.scenario_id != scenario.id {
            return Err(SessionError::ScenarioMismatch {
                log: state.scenario_id,
                scenario: scenario.id,
            });
        }
        Ok(Self {
            scenario,
            log,
            state,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn log(&self) -> &[EventRecord] {
        &self.log
    }

    pub fn state(&self) -> &SessionState {
        &self.state
    }

    pub fn version(&self) -> u64 {
        self.state.version
    }

    /// Events with a sequence number above `version`.
    pub fn events_since(&self, version: u64) -> &[EventRecord] {
        let start = self.log.partition_point(|r| r.seq <= version);
        &self.log[start..]
    }

    pub fn execute(&mut self, command: Command) -> Result<Vec<EventRecord>, SessionError> {
        self.execute_at(command, now_millis())
    }

    /// Run a command. Either every resulting event is appended or none is.
    pub fn execute_at(
        &mut self,
        command: Command,
        timestamp: u64,
    ) -> Result<Vec<EventRecord>, SessionError> {
        let events = self.plan(command)?;
        let timestamp = timestamp.max(self.state.last_timestamp);
        let mut next = self.state.clone();
        let mut records = Vec::with_capacity(events.len());
        for (i, event) in events.into_iter().enumerate() {
            let rec = EventRecord {
                seq: self.state.version + 1 + i as u64,
                timestamp,
                event,
            };
            next.apply(&rec)?;
            records.push(rec);
        }
        self.state = next;
        self.log.extend(records.iter().cloned());
        Ok(records)
    }

    fn plan(&self, command: Command) -> Result<Vec<SessionEvent>, SessionError> {
        let st = &self.state;
        if !st.is_active() {
            return Err(SessionError::NotActive);
        }
        let mut out = Vec::new();
        match command {
            Command::RevealFloor { floor } => {
                if self.scenario.floor(floor).is_none() {
                    return Err(SessionError::UnknownFloor(floor));
                }
                if st.revealed_floors.contains(&floor) {
                    return Err(SessionError::FloorAlreadyRevealed(floor));
                }
                out.push(SessionEvent::FloorRevealed { floor });
            }
            Command::AdjudicateCheck {
                actor,
                mut check,
                attack,
                action,
            } => {
                if st.phase == Phase::AwaitingFailureOutcome {
                    return Err(SessionError::FailureOutcomePending);
                }
                let character = st
                    .characters
                    .get(&actor)
                    .ok_or_else(|| SessionError::UnknownActor(actor.clone()))?;
                check.alertness = st.alertness;
                check.validate()?;
                if let Some(item) = check.item {
                    if !character.owns(item.kind) {
                        return Err(CheckError::ItemNotOwned {
                            actor,
                            item: item.kind,
                        }
                        .into());
                    }
                    if item.kind.is_single_use() && st.has_consumed(&actor, item.kind) {
                        return Err(SessionError::SingleUseExhausted {
                            actor,
                            item: item.kind,
                        });
                    }
                }
                let stream = DiceStream::at(st.seed, st.dice_position);
                let (result, _) = resolve_check(&check, character, stream)?;
                let success = result.success;
                out.push(SessionEvent::CheckDeclared {
                    actor: actor.clone(),
                    check: check.clone(),
                    attack,
                    action,
                });
                out.push(SessionEvent::DiceRolled {
                    values: result.rolls.clone(),
                });
                out.push(SessionEvent::CheckResolved { result });
                if let Some(item) = check.item.filter(|i| i.kind.is_single_use()) {
                    out.push(SessionEvent::ItemConsumed {
                        actor,
                        item: item.kind,
                    });
                }
                if let (true, Some(action)) = (success, action) {
                    let ids = self.new_knowledge(action, CheckOutcome::Success);
                    if !ids.is_empty() {
                        out.push(SessionEvent::KnowledgeGranted { ids });
                    }
                }
            }
            Command::RecordFailureOutcome { compensated } => {
                if st.phase != Phase::AwaitingFailureOutcome {
                    return Err(SessionError::NoPendingFailure);
                }
                out.push(SessionEvent::FailureCompensated { compensated });
                if !compensated {
                    self.raise(1, &mut out);
                }
            }
            Command::RaiseAlertness { delta } => {
                if delta == 0 {
                    return Err(SessionError::ZeroDelta);
                }
                self.raise(delta, &mut out);
            }
            Command::EaseAlertness { delta, reason } => {
                if delta == 0 {
                    return Err(SessionError::ZeroDelta);
                }
                out.push(SessionEvent::AlertnessEased { delta, reason });
            }
            Command::PerformAction { action } => {
                let ids = self.new_knowledge(action, CheckOutcome::NotRolled);
                if !ids.is_empty() {
                    out.push(SessionEvent::KnowledgeGranted { ids });
                }
            }
            Command::GrantKnowledge { ids } => {
                let mut fresh = Vec::new();
                for id in ids {
                    if self.scenario.knowledge_item(&id).is_none() {
                        return Err(SessionError::UnknownKnowledge(id));
                    }
                    if !st.knowledge.contains(&id) && !fresh.contains(&id) {
                        fresh.push(id);
                    }
                }
                if !fresh.is_empty() {
                    out.push(SessionEvent::KnowledgeGranted { ids: fresh });
                }
            }
            Command::CompleteObjective { objective } => {
                if self.scenario.objective(&objective).is_none() {
                    return Err(SessionError::UnknownObjective(objective));
                }
                if st.completed_objectives.contains(&objective) {
                    return Err(SessionError::ObjectiveAlreadyCompleted(objective));
                }
                out.push(SessionEvent::ObjectiveCompleted { objective });
            }
            Command::FailScenario { reason } => out.push(SessionEvent::ScenarioFailed { reason }),
            Command::CloseSession => out.push(SessionEvent::SessionClosed),
        }
        Ok(out)
    }

    fn raise(&self, delta: u32, out: &mut Vec<SessionEvent>) {
        out.push(SessionEvent::AlertnessRaised { delta });
        let alertness = self.state.alertness + delta;
        if alertness >= self.state.failure_cap {
            out.push(SessionEvent::ScenarioFailed {
                reason: format!(
                    "alertness reached {alertness} (cap {}), the players have to start over",
                    self.state.failure_cap
                ),
            });
        }
    }

    fn new_knowledge(&self, action: ActionKind, outcome: CheckOutcome) -> Vec<String> {
        knowledge_unlocked_by(&self.scenario, action, outcome)
            .into_iter()
            .filter(|id| !self.state.knowledge.contains(id))
            .collect()
    }
}
