use std::collections::BTreeSet;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tasep_core::character::{Character, CharacterFile, Violation};
use tasep_core::check::{CheckError, CheckSpec, BASE_THRESHOLD};
use tasep_core::predefined;
use tasep_core::probability::{exact_check_probability, ExactProbability, Rolls};
use tasep_core::scenario::{Floor, Scenario};
use tasep_core::session::{
    create_session, Command, EventRecord, SessionConfig, SessionError, SessionState,
};
use tasep_core::taxonomy::{Skill, MAX_ITEM_REDUCTION};

use crate::store::{SessionHandle, Store, StoreError};

pub type AppState = Arc<Store>;

const MAX_SAFE_SEED: u64 = (1 << 53) - 1;

/// Error body: `{"error": "...", ...}` with a matching status code.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            body: json!({ "error": message.into() }),
        }
    }

    fn not_found(what: &str, id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, format!("unknown {what} `{id}`"))
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, message)
    }

    fn violations(character: &str, violations: &[Violation]) -> Self {
        let list: Vec<Value> = violations
            .iter()
            .map(|v| {
                let mut obj = serde_json::to_value(v).expect("violation serializes");
                obj["rule"] = json!(v.rule());
                obj["message"] = json!(v.to_string());
                obj
            })
            .collect();
        Self {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            body: json!({
                "error": format!("character `{character}` breaks the creation rules"),
                "character": character,
                "violations": list,
            }),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        Self::unprocessable(e.to_string())
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/scenarios", get(list_scenarios))
        .route("/scenarios/{id}", get(get_scenario))
        .route("/characters", get(list_characters))
        .route("/characters/validate", post(validate_character))
        .route("/sessions", get(list_sessions).post(create))
        .route("/sessions/{id}/state", get(session_state))
        .route("/sessions/{id}/commands", post(command))
        .route("/preview/check", post(preview_check))
        .with_state(state)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ScenarioSummary<'a> {
    id: &'a str,
    title: &'a str,
    organization: tasep_core::scenario::OrganizationType,
    difficulty: u32,
    floors: usize,
    knowledge_items: usize,
}

async fn list_scenarios(State(store): State<AppState>) -> Json<Value> {
    let list: Vec<ScenarioSummary> = store
        .scenarios()
        .values()
        .map(|s| ScenarioSummary {
            id: &s.id,
            title: &s.title,
            organization: s.organization,
            difficulty: s.difficulty,
            floors: s.floors.len(),
            knowledge_items: s.knowledge.len(),
        })
        .collect();
    Json(json!(list))
}

#[derive(Deserialize)]
struct ScenarioQuery {
    view: Option<String>,
    session: Option<String>,
}

/// What the players may see: revealed floors only, no unlock rules, no
/// intended solution, only knowledge they have earned.
#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PlayerView<'a> {
    id: &'a str,
    title: &'a str,
    organization: tasep_core::scenario::OrganizationType,
    difficulty: u32,
    briefing: &'a str,
    floors: Vec<&'a Floor>,
    hidden_floors: Vec<i32>,
    knowledge: Vec<PlayerKnowledge<'a>>,
    objectives: Vec<&'a str>,
}

#[derive(Serialize)]
struct PlayerKnowledge<'a> {
    id: &'a str,
    text: &'a str,
}

fn player_view<'a>(s: &'a Scenario, revealed: &BTreeSet<i32>, known: &BTreeSet<String>) -> PlayerView<'a> {
    PlayerView {
        id: &s.id,
        title: &s.title,
        organization: s.organization,
        difficulty: s.difficulty,
        briefing: &s.briefing,
        floors: s.floors.iter().filter(|f| revealed.contains(&f.index)).collect(),
        hidden_floors: s
            .floors
            .iter()
            .map(|f| f.index)
            .filter(|i| !revealed.contains(i))
            .collect(),
        knowledge: s
            .knowledge
            .iter()
            .filter(|k| known.contains(&k.id))
            .map(|k| PlayerKnowledge {
                id: &k.id,
                text: &k.text,
            })
            .collect(),
        objectives: s.objectives.iter().map(|o| o.description.as_str()).collect(),
    }
}

async fn get_scenario(
    State(store): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<ScenarioQuery>,
) -> ApiResult<Json<Value>> {
    let s = store
        .scenario(&id)
        .ok_or_else(|| ApiError::not_found("scenario", &id))?;
    match q.view.as_deref() {
        None | Some("full") => Ok(Json(serde_json::to_value(s).expect("scenario serializes"))),
        Some("players") => {
            let (revealed, known) = match &q.session {
                None => Default::default(),
                Some(sid) => {
                    let cell = store
                        .session(sid)
                        .await
                        .ok_or_else(|| ApiError::not_found("session", sid))?;
                    let session = cell.read().await;
                    if session.state().scenario_id != s.id {
                        return Err(ApiError::unprocessable(format!(
                            "session `{sid}` plays `{}`",
                            session.state().scenario_id
                        )));
                    }
                    (
                        session.state().revealed_floors.clone(),
                        session.state().knowledge.clone(),
                    )
                }
            };
            Ok(Json(json!(player_view(s, &revealed, &known))))
        }
        Some(other) => Err(ApiError::unprocessable(format!(
            "unknown view `{other}`, expected `players` or `full`"
        ))),
    }
}

async fn list_characters() -> Json<Vec<Character>> {
    Json(predefined::all())
}

async fn validate_character(Json(file): Json<CharacterFile>) -> ApiResult<Json<Character>> {
    file.validate()
        .map(Json)
        .map_err(|v| ApiError::violations(&file.name, &v))
}

/// A predefined character by name, or a full character file.
#[derive(Deserialize)]
#[serde(untagged)]
enum CharacterRef {
    Name(String),
    File(CharacterFile),
}

impl CharacterRef {
    fn resolve(self) -> ApiResult<Character> {
        match self {
            CharacterRef::Name(n) => {
                predefined::by_name(&n).ok_or_else(|| ApiError::not_found("character", &n))
            }
            CharacterRef::File(f) => f.validate().map_err(|v| ApiError::violations(&f.name, &v)),
        }
    }
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct CreateSession {
    scenario_id: String,
    characters: Vec<CharacterRef>,
    seed: Option<u64>,
    failure_cap: Option<u32>,
}

async fn create(
    State(store): State<AppState>,
    Json(req): Json<CreateSession>,
) -> ApiResult<(StatusCode, Json<SessionHandle>)> {
    let scenario = store
        .scenario(&req.scenario_id)
        .cloned()
        .ok_or_else(|| ApiError::not_found("scenario", &req.scenario_id))?;
    let characters = req
        .characters
        .into_iter()
        .map(CharacterRef::resolve)
        .collect::<ApiResult<Vec<_>>>()?;
    let id = uuid::Uuid::new_v4();
    // Generated seeds stay below 2^53 so JavaScript clients read them exactly.
    let seed = req.seed.unwrap_or_else(|| id.as_u64_pair().1 & MAX_SAFE_SEED);
    let config = SessionConfig {
        failure_cap: req
            .failure_cap
            .unwrap_or(SessionConfig::default().failure_cap),
    };
    let session = create_session(scenario, &characters, seed, config)?;
    let handle = store.insert(id.to_string(), session).await?;
    Ok((StatusCode::CREATED, Json(handle)))
}

async fn list_sessions(State(store): State<AppState>) -> Json<Vec<SessionHandle>> {
    Json(store.handles().await)
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct StateQuery {
    since_version: Option<u64>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct StateResponse {
    #[serde(flatten)]
    handle: SessionHandle,
    state: SessionState,
    events: Vec<EventRecord>,
}

async fn session_state(
    State(store): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<StateQuery>,
) -> ApiResult<Json<StateResponse>> {
    let cell = store
        .session(&id)
        .await
        .ok_or_else(|| ApiError::not_found("session", &id))?;
    let s = cell.read().await;
    let events = match q.since_version {
        Some(v) => s.events_since(v).to_vec(),
        None => s.log().to_vec(),
    };
    Ok(Json(StateResponse {
        handle: SessionHandle::of(&id, &s),
        state: s.state().clone(),
        events,
    }))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct CommandRequest {
    expected_version: u64,
    command: Command,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CommandResponse {
    #[serde(flatten)]
    handle: SessionHandle,
    events: Vec<EventRecord>,
}

async fn command(
    State(store): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<CommandRequest>,
) -> ApiResult<Json<CommandResponse>> {
    let cell = store
        .session(&id)
        .await
        .ok_or_else(|| ApiError::not_found("session", &id))?;
    let mut session = cell.write().await;
    if req.expected_version != session.version() {
        return Err(ApiError {
            status: StatusCode::CONFLICT,
            body: json!({
                "error": "version conflict",
                "expectedVersion": req.expected_version,
                "currentVersion": session.version(),
            }),
        });
    }
    // Work on a copy so a failed disk write leaves memory untouched.
    let mut next = session.clone();
    let events = next.execute(req.command)?;
    store.append(&id, events.clone()).await?;
    *session = next;
    Ok(Json(CommandResponse {
        handle: SessionHandle::of(&id, &session),
        events,
    }))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct PreviewRequest {
    /// Either an explicit effective skill ...
    effective_skill: Option<u32>,
    proficient: Option<bool>,
    /// ... or a character and skill ...
    character: Option<CharacterRef>,
    skill: Option<Skill>,
    /// ... or an actor in a running session, whose alertness then applies.
    session_id: Option<String>,
    actor: Option<String>,
    #[serde(default = "base")]
    base_threshold: i32,
    #[serde(default)]
    gm_adjustment: i32,
    #[serde(default)]
    item_reduction: i32,
    #[serde(default)]
    npc_dependent: bool,
    alertness: Option<u32>,
}

fn base() -> i32 {
    BASE_THRESHOLD
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PreviewResponse {
    probability: ExactProbability,
    effective_skill: u32,
    dice: u32,
    adjusted_threshold: i32,
}

async fn preview_check(
    State(store): State<AppState>,
    Json(req): Json<PreviewRequest>,
) -> ApiResult<Json<PreviewResponse>> {
    let mut alertness = req.alertness.unwrap_or(0);
    let (effective_skill, proficient) = if let Some(sid) = &req.session_id {
        let actor = req
            .actor
            .as_deref()
            .ok_or_else(|| ApiError::unprocessable("`actor` is required with `sessionId`"))?;
        let skill = req
            .skill
            .ok_or_else(|| ApiError::unprocessable("`skill` is required with `sessionId`"))?;
        let cell = store
            .session(sid)
            .await
            .ok_or_else(|| ApiError::not_found("session", sid))?;
        let s = cell.read().await;
        let c = s
            .state()
            .characters
            .get(actor)
            .ok_or_else(|| ApiError::not_found("actor", actor))?;
        if req.alertness.is_none() {
            alertness = s.state().alertness;
        }
        (c.effective_skill(skill), c.is_proficient(skill))
    } else if let Some(c) = req.character {
        let skill = req
            .skill
            .ok_or_else(|| ApiError::unprocessable("`skill` is required with `character`"))?;
        let c = c.resolve()?;
        (c.effective_skill(skill), c.is_proficient(skill))
    } else if let Some(e) = req.effective_skill {
        (e, req.proficient.unwrap_or(false))
    } else {
        return Err(ApiError::unprocessable(
            "give `effectiveSkill`, `character` and `skill`, or `sessionId`, `actor` and `skill`",
        ));
    };

    // Only the components are range-checked, exactly as for a real check.
    let mut spec = CheckSpec::new(req.skill.unwrap_or(Skill::Manipulation)).gm(req.gm_adjustment);
    spec.base_threshold = req.base_threshold;
    if req.npc_dependent {
        spec = spec.npc(alertness);
    }
    if !(0..=MAX_ITEM_REDUCTION).contains(&req.item_reduction) {
        return Err(ApiError::unprocessable(
            CheckError::ItemReductionOutOfRange(req.item_reduction).to_string(),
        ));
    }
    let threshold = spec
        .adjusted_threshold()
        .map_err(|e| ApiError::unprocessable(e.to_string()))?
        - req.item_reduction;
    let rolls = Rolls::proficient(proficient);
    Ok(Json(PreviewResponse {
        probability: exact_check_probability(effective_skill, threshold, rolls),
        effective_skill,
        dice: rolls.count(),
        adjusted_threshold: threshold,
    }))
}
