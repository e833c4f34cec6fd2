//! Session storage: one append-only JSONL log per session plus an index
//! file mapping ids to logs. Everything in memory is rebuilt from the logs
//! on startup.

use std::collections::{BTreeMap, HashMap};
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use tasep_core::scenario::{self, has_errors, lint_scenario, parse_scenario, Scenario};
use tasep_core::session::{
    append_log, read_log, EventRecord, LogError, Session, SessionError, SessionStatus,
};
use tokio::sync::RwLock;

const INDEX_FILE: &str = "index.json";
const SESSION_DIR: &str = "sessions";
const SCENARIO_DIR: &str = "scenarios";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("session {id}: {source}")]
    Log { id: String, source: LogError },
    #[error("session {id}: {source}")]
    Session { id: String, source: SessionError },
    #[error("session {id} plays unknown scenario `{scenario}`")]
    UnknownScenario { id: String, scenario: String },
    #[error("index file is unreadable: {0}")]
    Index(serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct Index {
    sessions: BTreeMap<String, IndexEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct IndexEntry {
    /// Log path relative to the data directory.
    log: String,
    scenario_id: String,
}

/// Current position of a session.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionHandle {
    pub id: String,
    pub version: u64,
    pub status: SessionStatus,
    pub seed: u64,
    pub scenario_id: String,
}

impl SessionHandle {
    pub fn of(id: &str, s: &Session) -> Self {
        Self {
            id: id.to_string(),
            version: s.version(),
            status: s.state().status,
            seed: s.state().seed,
            scenario_id: s.state().scenario_id.clone(),
        }
    }
}

/// One session guarded by its own lock: commands take it exclusively,
/// reads share it.
pub type SessionCell = Arc<RwLock<Session>>;

pub struct Store {
    dir: PathBuf,
    scenarios: BTreeMap<String, Scenario>,
    sessions: RwLock<HashMap<String, SessionCell>>,
    /// Serializes index rewrites.
    index: tokio::sync::Mutex<Index>,
}

/// Shipped scenarios plus any lint-clean `*.json` under `<dir>/scenarios`.
fn load_scenarios(dir: &Path) -> BTreeMap<String, Scenario> {
    let mut out: BTreeMap<String, Scenario> = scenario::shipped::all()
        .into_iter()
        .map(|s| (s.id.clone(), s))
        .collect();
    let Ok(entries) = std::fs::read_dir(dir.join(SCENARIO_DIR)) else {
        return out;
    };
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    for p in paths {
        let Ok(text) = std::fs::read_to_string(&p) else {
            continue;
        };
        match parse_scenario(&text) {
            Ok(s) if !has_errors(&lint_scenario(&s)) => {
                out.insert(s.id.clone(), s);
            }
            Ok(_) => eprintln!("skipping {}: lint errors", p.display()),
            Err(e) => eprintln!("skipping {}: {}", p.display(), e[0]),
        }
    }
    out
}

impl Store {
    /// Open (or create) a data directory and replay every indexed log.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        let sessions_dir = dir.join(SESSION_DIR);
        std::fs::create_dir_all(&sessions_dir).map_err(io_err(&sessions_dir))?;
        let scenarios = load_scenarios(&dir);

        let index_path = dir.join(INDEX_FILE);
        let index: Index = match std::fs::read_to_string(&index_path) {
            Ok(text) => serde_json::from_str(&text).map_err(StoreError::Index)?,
            Err(e) if e.kind() == io::ErrorKind::NotFound => Index::default(),
            Err(e) => return Err(io_err(&index_path)(e)),
        };

        let mut sessions = HashMap::new();
        for (id, entry) in &index.sessions {
            let scenario = scenarios.get(&entry.scenario_id).cloned().ok_or_else(|| {
                StoreError::UnknownScenario {
                    id: id.clone(),
                    scenario: entry.scenario_id.clone(),
                }
            })?;
            let records = read_log(&dir.join(&entry.log)).map_err(|source| StoreError::Log {
                id: id.clone(),
                source,
            })?;
            let session =
                Session::from_log(scenario, records).map_err(|source| StoreError::Session {
                    id: id.clone(),
                    source,
                })?;
            sessions.insert(id.clone(), Arc::new(RwLock::new(session)));
        }

        Ok(Self {
            dir,
            scenarios,
            sessions: RwLock::new(sessions),
            index: tokio::sync::Mutex::new(index),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn scenarios(&self) -> &BTreeMap<String, Scenario> {
        &self.scenarios
    }

    pub fn scenario(&self, id: &str) -> Option<&Scenario> {
        self.scenarios.get(id)
    }

    pub async fn session(&self, id: &str) -> Option<SessionCell> {
        self.sessions.read().await.get(id).cloned()
    }

    pub async fn handles(&self) -> Vec<SessionHandle> {
        let cells: Vec<(String, SessionCell)> = self
            .sessions
            .read()
            .await
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let mut out = Vec::with_capacity(cells.len());
        for (id, cell) in cells {
            out.push(SessionHandle::of(&id, &*cell.read().await));
        }
        out.sort_by(|a, b| a.id.cmp(&b.id));
        out
    }

    fn log_path(&self, id: &str) -> (String, PathBuf) {
        let rel = format!("{SESSION_DIR}/{id}.jsonl");
        let abs = self.dir.join(&rel);
        (rel, abs)
    }

    /// Persist a freshly created session and register it.
    pub async fn insert(&self, id: String, session: Session) -> Result<SessionHandle, StoreError> {
        let (rel, abs) = self.log_path(&id);
        write_blocking(abs.clone(), session.log().to_vec()).await?;

        let mut index = self.index.lock().await;
        index.sessions.insert(
            id.clone(),
            IndexEntry {
                log: rel,
                scenario_id: session.state().scenario_id.clone(),
            },
        );
        let index_path = self.dir.join(INDEX_FILE);
        let text = serde_json::to_string_pretty(&*index).expect("index serializes");
        let tmp = index_path.with_extension("json.tmp");
        let (tmp2, idx2) = (tmp.clone(), index_path.clone());
        tokio::task::spawn_blocking(move || {
            std::fs::write(&tmp2, text)?;
            std::fs::rename(&tmp2, &idx2)
        })
        .await
        .expect("index writer")
        .map_err(io_err(&index_path))?;
        drop(index);

        let handle = SessionHandle::of(&id, &session);
        self.sessions
            .write()
            .await
            .insert(id, Arc::new(RwLock::new(session)));
        Ok(handle)
    }

    /// Append records to a session's log on disk.
    pub async fn append(&self, id: &str, records: Vec<EventRecord>) -> Result<(), StoreError> {
        if records.is_empty() {
            return Ok(());
        }
        let (_, abs) = self.log_path(id);
        write_blocking(abs, records).await
    }
}

async fn write_blocking(path: PathBuf, records: Vec<EventRecord>) -> Result<(), StoreError> {
    let p = path.clone();
    tokio::task::spawn_blocking(move || append_log(&p, &records))
        .await
        .expect("log writer")
        .map_err(io_err(&path))
}
