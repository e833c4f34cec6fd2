use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::taxonomy::{Attack, Skill};

pub const SCHEMA_VERSION: u32 = 1;

/// Pseudo room id for the street side of an exterior door.
pub const OUTSIDE: &str = "outside";

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrganizationType {
    Sme,
    Large,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub id: String,
    pub title: String,
    pub organization: OrganizationType,
    /// Position in the play order for its model; metadata only.
    pub difficulty: u32,
    #[serde(default)]
    pub briefing: String,
    #[serde(default)]
    pub initial_alertness: u32,
    pub floors: Vec<Floor>,
    #[serde(default)]
    pub npcs: Vec<Npc>,
    pub knowledge: Vec<KnowledgeItem>,
    pub objectives: Vec<Objective>,
    pub intended_solution: Vec<SolutionStep>,
}

impl Scenario {
    pub fn floor(&self, index: i32) -> Option<&Floor> {
        self.floors.iter().find(|f| f.index == index)
    }

    pub fn rooms(&self) -> impl Iterator<Item = (&Floor, &Room)> {
        self.floors
            .iter()
            .flat_map(|f| f.rooms.iter().map(move |r| (f, r)))
    }

    pub fn room(&self, id: &str) -> Option<&Room> {
        self.rooms().map(|(_, r)| r).find(|r| r.id == id)
    }

    pub fn floor_of_room(&self, id: &str) -> Option<i32> {
        self.rooms().find(|(_, r)| r.id == id).map(|(f, _)| f.index)
    }

    pub fn knowledge_item(&self, id: &str) -> Option<&KnowledgeItem> {
        self.knowledge.iter().find(|k| k.id == id)
    }

    pub fn objective(&self, id: &str) -> Option<&Objective> {
        self.objectives.iter().find(|o| o.id == id)
    }

    pub fn npc(&self, id: &str) -> Option<&Npc> {
        self.npcs.iter().find(|n| n.id == id)
    }

    pub fn doors(&self) -> impl Iterator<Item = &Door> {
        self.floors.iter().flat_map(|f| f.doors.iter())
    }

    pub fn features(&self) -> impl Iterator<Item = &Feature> {
        self.rooms().flat_map(|(_, r)| r.features.iter())
    }
}

/// One storey, numbered from the ground floor (0) upwards; a cellar is -1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Floor {
    pub index: i32,
    pub name: String,
    pub rooms: Vec<Room>,
    #[serde(default)]
    pub doors: Vec<Door>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Room {
    pub id: String,
    pub name: String,
    /// Stairwell rooms connect floors; they are how upper floors are entered.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub staircase: bool,
    #[serde(default)]
    pub features: Vec<Feature>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessColor {
    /// Unlocked.
    Green,
    /// Key or key card held by most employees.
    Blue,
    /// Restricted to a few employees.
    Orange,
    /// Only specific employees.
    Red,
}

impl AccessColor {
    pub const ALL: [AccessColor; 4] = [
        AccessColor::Green,
        AccessColor::Blue,
        AccessColor::Orange,
        AccessColor::Red,
    ];

    pub fn is_restricted(self) -> bool {
        matches!(self, AccessColor::Orange | AccessColor::Red)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Door {
    pub from: String,
    /// Room id, or `"outside"`.
    pub to: String,
    pub color: AccessColor,
}

impl Door {
    pub fn is_exterior(&self) -> bool {
        self.from == OUTSIDE || self.to == OUTSIDE
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    FilingCabinet,
    Trash,
    Desk,
    Server,
    Window,
    Camera,
    Dumpster,
    WelcomeDesk,
    SmokingArea,
    Crates,
    Computer,
    Kitchen,
}

impl FeatureKind {
    /// Brick color used on the table model, where one is fixed.
    pub fn model_color(self) -> Option<&'static str> {
        match self {
            FeatureKind::FilingCabinet => Some("yellow"),
            FeatureKind::Trash => Some("green"),
            FeatureKind::Desk => Some("white"),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Feature {
    pub kind: FeatureKind,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Npc {
    pub id: String,
    pub role: String,
    pub home_room: String,
    #[serde(default)]
    pub schedule: String,
    #[serde(default)]
    pub alertness_sensitive: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    ObserveBuilding,
    Osint,
    DumpsterDive,
    TalkToNpc,
    BrowseWebsite,
    ExploreInterior,
    PerformAttack,
}

impl ActionKind {
    pub const ALL: [ActionKind; 7] = [
        ActionKind::ObserveBuilding,
        ActionKind::Osint,
        ActionKind::DumpsterDive,
        ActionKind::TalkToNpc,
        ActionKind::BrowseWebsite,
        ActionKind::ExploreInterior,
        ActionKind::PerformAttack,
    ];

    fn key(self) -> &'static str {
        match self {
            ActionKind::ObserveBuilding => "observe_building",
            ActionKind::Osint => "osint",
            ActionKind::DumpsterDive => "dumpster_dive",
            ActionKind::TalkToNpc => "talk_to_npc",
            ActionKind::BrowseWebsite => "browse_website",
            ActionKind::ExploreInterior => "explore_interior",
            ActionKind::PerformAttack => "perform_attack",
        }
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown action kind `{0}`")]
pub struct UnknownAction(pub String);

impl FromStr for ActionKind {
    type Err = UnknownAction;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        ActionKind::ALL
            .into_iter()
            .find(|a| a.key() == norm)
            .ok_or_else(|| UnknownAction(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct KnowledgeItem {
    pub id: String,
    pub text: String,
    pub unlock_rules: Vec<UnlockRule>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct UnlockRule {
    pub action: ActionKind,
    /// Skill of the check that must succeed, if the action needs one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub required_check: Option<Skill>,
    /// Left to the GM ("after some time or luck"); never fired automatically.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub gm_discretion: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompletionKind {
    MalwareDeployed,
    DataExfiltrated,
    AccessGained,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Objective {
    pub id: String,
    pub description: String,
    pub completion: CompletionKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SolutionStep {
    pub description: String,
    pub action: ActionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attack: Option<Attack>,
    /// Checks the GM is expected to ask for, in order.
    #[serde(default)]
    pub checks: Vec<Skill>,
    #[serde(default)]
    pub requires_knowledge: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub room: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub npc: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completes: Option<String>,
}
