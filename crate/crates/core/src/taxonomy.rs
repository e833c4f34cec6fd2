//! Skill taxonomy, proficiency inventory and the attack catalog.
//!
//! Three super-categories group ten skills. Each skill has exactly one
//! inventory item that a character receives when proficient in it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuperCategory {
    Social,
    Technical,
    Finesse,
}

impl SuperCategory {
    pub const ALL: [SuperCategory; 3] = [
        SuperCategory::Social,
        SuperCategory::Technical,
        SuperCategory::Finesse,
    ];

    pub fn skills(self) -> &'static [Skill] {
        use Skill::*;
        match self {
            SuperCategory::Social => &[Manipulation, Appearance, Adaptation],
            SuperCategory::Technical => &[Design, Forging, Programming, Analysis],
            SuperCategory::Finesse => &[LockPicking, Fitness, SleightOfHand],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SuperCategory::Social => "Social",
            SuperCategory::Technical => "Technical",
            SuperCategory::Finesse => "Finesse",
        }
    }
}

impl fmt::Display for SuperCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A sub-category skill. Points are invested here; bonuses are shared
/// across the owning [`SuperCategory`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Skill {
    Manipulation,
    Appearance,
    Adaptation,
    Design,
    Forging,
    Programming,
    Analysis,
    LockPicking,
    Fitness,
    SleightOfHand,
}

impl Skill {
    pub const ALL: [Skill; 10] = [
        Skill::Manipulation,
        Skill::Appearance,
        Skill::Adaptation,
        Skill::Design,
        Skill::Forging,
        Skill::Programming,
        Skill::Analysis,
        Skill::LockPicking,
        Skill::Fitness,
        Skill::SleightOfHand,
    ];

    pub fn super_category(self) -> SuperCategory {
        use Skill::*;
        match self {
            Manipulation | Appearance | Adaptation => SuperCategory::Social,
            Design | Forging | Programming | Analysis => SuperCategory::Technical,
            LockPicking | Fitness | SleightOfHand => SuperCategory::Finesse,
        }
    }

    /// The item granted for proficiency in this skill.
    pub fn proficiency_item(self) -> InventoryKind {
        use InventoryKind::*;
        match self {
            Skill::Manipulation => Bribes,
            Skill::Appearance => FakeId,
            Skill::Adaptation => Costume,
            Skill::Design => PrinterServer,
            Skill::Forging => KeyCardCopier,
            Skill::Programming => CustomItGadget,
            Skill::Analysis => ForensicEquipment,
            Skill::LockPicking => BurglarTools,
            Skill::Fitness => Smuggling,
            Skill::SleightOfHand => Distraction,
        }
    }

    /// Attacks listed for this skill in the skill table.
    pub fn attacks(self) -> &'static [Attack] {
        use Attack::*;
        match self {
            Skill::Manipulation => &[QuidProQuo],
            Skill::Appearance => &[ShoulderSurfing, Pretexting],
            Skill::Adaptation => &[Tailgating, Pretexting],
            Skill::Design => &[Scareware],
            Skill::Forging => &[BadgeSurveillance],
            Skill::Programming => &[Scareware, DnsSpoofing, WateringHole],
            Skill::Analysis => &[DnsSpoofing, DumpsterDiving],
            Skill::LockPicking => &[OpeningDoors],
            Skill::Fitness => &[Sneaking],
            Skill::SleightOfHand => &[Theft],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Skill::Manipulation => "Manipulation",
            Skill::Appearance => "Appearance",
            Skill::Adaptation => "Adaptation",
            Skill::Design => "Design",
            Skill::Forging => "Forging",
            Skill::Programming => "Programming",
            Skill::Analysis => "Analysis",
            Skill::LockPicking => "Lock picking",
            Skill::Fitness => "Fitness",
            Skill::SleightOfHand => "Sleight of hand",
        }
    }

    fn key(self) -> &'static str {
        match self {
            Skill::Manipulation => "manipulation",
            Skill::Appearance => "appearance",
            Skill::Adaptation => "adaptation",
            Skill::Design => "design",
            Skill::Forging => "forging",
            Skill::Programming => "programming",
            Skill::Analysis => "analysis",
            Skill::LockPicking => "lock_picking",
            Skill::Fitness => "fitness",
            Skill::SleightOfHand => "sleight_of_hand",
        }
    }
}

impl fmt::Display for Skill {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown skill `{0}`")]
pub struct UnknownSkill(pub String);

impl FromStr for Skill {
    type Err = UnknownSkill;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        Skill::ALL
            .into_iter()
            .find(|k| k.key() == norm)
            .ok_or_else(|| UnknownSkill(s.to_string()))
    }
}

/// Proficiency inventory items.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InventoryKind {
    Bribes,
    FakeId,
    Costume,
    PrinterServer,
    KeyCardCopier,
    CustomItGadget,
    ForensicEquipment,
    BurglarTools,
    Smuggling,
    Distraction,
}

/// Largest threshold reduction a single item can grant on one check.
pub const MAX_ITEM_REDUCTION: i32 = 4;

impl InventoryKind {
    pub const ALL: [InventoryKind; 10] = [
        InventoryKind::Bribes,
        InventoryKind::FakeId,
        InventoryKind::Costume,
        InventoryKind::PrinterServer,
        InventoryKind::KeyCardCopier,
        InventoryKind::CustomItGadget,
        InventoryKind::ForensicEquipment,
        InventoryKind::BurglarTools,
        InventoryKind::Smuggling,
        InventoryKind::Distraction,
    ];

    pub fn item(self) -> InventoryItem {
        InventoryItem {
            kind: self,
            single_use_per_scenario: matches!(
                self,
                InventoryKind::Bribes | InventoryKind::CustomItGadget
            ),
            max_threshold_reduction: MAX_ITEM_REDUCTION,
        }
    }

    pub fn is_single_use(self) -> bool {
        self.item().single_use_per_scenario
    }

    pub fn label(self) -> &'static str {
        match self {
            InventoryKind::Bribes => "Bribes",
            InventoryKind::FakeId => "Fake IDs",
            InventoryKind::Costume => "Costumes",
            InventoryKind::PrinterServer => "Printer, server",
            InventoryKind::KeyCardCopier => "Key card copier",
            InventoryKind::CustomItGadget => "Custom IT gadget",
            InventoryKind::ForensicEquipment => "Forensic equipment",
            InventoryKind::BurglarTools => "Burglar tools",
            InventoryKind::Smuggling => "Smuggling of items",
            InventoryKind::Distraction => "Distraction",
        }
    }
}

impl fmt::Display for InventoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InventoryItem {
    pub kind: InventoryKind,
    pub single_use_per_scenario: bool,
    pub max_threshold_reduction: i32,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attack {
    QuidProQuo,
    ShoulderSurfing,
    Pretexting,
    Tailgating,
    Scareware,
    BadgeSurveillance,
    DnsSpoofing,
    WateringHole,
    DumpsterDiving,
    Baiting,
    OpeningDoors,
    Sneaking,
    Theft,
}

impl Attack {
    pub const ALL: [Attack; 13] = [
        Attack::QuidProQuo,
        Attack::ShoulderSurfing,
        Attack::Pretexting,
        Attack::Tailgating,
        Attack::Scareware,
        Attack::BadgeSurveillance,
        Attack::DnsSpoofing,
        Attack::WateringHole,
        Attack::DumpsterDiving,
        Attack::Baiting,
        Attack::OpeningDoors,
        Attack::Sneaking,
        Attack::Theft,
    ];

    /// Catalog entry: the checks this attack needs, in order, and any item
    /// without which it cannot succeed.
    pub fn entry(self) -> AttackCatalogEntry {
        use Skill::*;
        let (required_checks, required_inventory): (&'static [Skill], _) = match self {
            Attack::QuidProQuo => (&[Manipulation], None),
            Attack::ShoulderSurfing => (&[Appearance], None),
            Attack::Pretexting => (&[Appearance, Adaptation], None),
            Attack::Tailgating => (&[Adaptation], None),
            // fake website needs a server to host it
            Attack::Scareware => (&[Design, Programming], Some(InventoryKind::PrinterServer)),
            Attack::BadgeSurveillance => (&[Forging], None),
            Attack::DnsSpoofing => (&[Programming, Analysis], None),
            Attack::WateringHole => (&[Programming], Some(InventoryKind::PrinterServer)),
            // find roll, then evaluating the finds
            Attack::DumpsterDiving => (&[Fitness, Analysis], None),
            // build the malware, then get the sticks distributed
            Attack::Baiting => (&[Programming, Adaptation], None),
            Attack::OpeningDoors => (&[LockPicking], None),
            Attack::Sneaking => (&[Fitness], None),
            Attack::Theft => (&[SleightOfHand], None),
        };
        AttackCatalogEntry {
            attack: self,
            required_checks,
            required_inventory,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AttackCatalogEntry {
    pub attack: Attack,
    pub required_checks: &'static [Skill],
    pub required_inventory: Option<InventoryKind>,
}
