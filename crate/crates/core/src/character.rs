//! Point-buy character creation.
//!
//! Players invest up to six points per skill and 21 in total. Investment in a
//! skill feeds a bonus shared by every skill of its super-category: nothing
//! below three points, one for three to five, two for a full six. Up to two
//! skills with at least five invested points may be chosen as proficiencies.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::taxonomy::{InventoryKind, Skill, SuperCategory};

pub const MAX_INVESTED_PER_SKILL: u32 = 6;
pub const SKILL_POINT_BUDGET: u32 = 21;
pub const PROFICIENCY_MIN_INVESTED: u32 = 5;
pub const MAX_PROFICIENCIES: usize = 2;

const MEDIUM_INVESTMENT: u32 = 3;
const HIGH_INVESTMENT: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invested points {0} outside 0..=6")]
pub struct InvestmentOutOfRange(pub u32);

/// Bonus a single skill contributes to its super-category.
pub fn bonus_contribution(invested: u32) -> Result<u32, InvestmentOutOfRange> {
    match invested {
        HIGH_INVESTMENT => Ok(2),
        MEDIUM_INVESTMENT..HIGH_INVESTMENT => Ok(1),
        0..MEDIUM_INVESTMENT => Ok(0),
        _ => Err(InvestmentOutOfRange(invested)),
    }
}

/// Invested points and chosen proficiencies, as the player wrote them down.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkillAllocation {
    #[serde(default)]
    pub invested: BTreeMap<Skill, u32>,
    #[serde(default)]
    pub proficiencies: BTreeSet<Skill>,
}

impl SkillAllocation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, skill: Skill, points: u32) -> Self {
        self.invested.insert(skill, points);
        self
    }

    pub fn proficient_in(mut self, skill: Skill) -> Self {
        self.proficiencies.insert(skill);
        self
    }

    pub fn invested(&self, skill: Skill) -> u32 {
        self.invested.get(&skill).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u32 {
        self.invested.values().sum()
    }

    /// Every rule this allocation breaks. Empty means valid.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let total = self.total();
        if total > SKILL_POINT_BUDGET {
            out.push(Violation::Budget { total });
        }
        for skill in Skill::ALL {
            let invested = self.invested(skill);
            if invested > MAX_INVESTED_PER_SKILL {
                out.push(Violation::PerSkillCap { skill, invested });
            }
        }
        for &skill in &self.proficiencies {
            let invested = self.invested(skill);
            if invested < PROFICIENCY_MIN_INVESTED {
                out.push(Violation::ProficiencyMinimum { skill, invested });
            }
        }
        if self.proficiencies.len() > MAX_PROFICIENCIES {
            out.push(Violation::ProficiencyCount {
                chosen: self.proficiencies.len(),
            });
        }
        out
    }

    /// Bonus applied to every skill of `category`.
    ///
    /// Panics if the allocation carries an out-of-range investment; callers
    /// go through [`validate_character`] first.
    pub fn super_bonus(&self, category: SuperCategory) -> u32 {
        category
            .skills()
            .iter()
            .map(|&s| bonus_contribution(self.invested(s)).expect("validated allocation"))
            .sum()
    }
}

/// A broken character-creation rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Violation {
    Budget { total: u32 },
    PerSkillCap { skill: Skill, invested: u32 },
    ProficiencyMinimum { skill: Skill, invested: u32 },
    ProficiencyCount { chosen: usize },
}

impl Violation {
    /// Stable rule name, e.g. `per-skill cap`.
    pub fn rule(&self) -> &'static str {
        match self {
            Violation::Budget { .. } => "budget",
            Violation::PerSkillCap { .. } => "per-skill cap",
            Violation::ProficiencyMinimum { .. } => "proficiency minimum",
            Violation::ProficiencyCount { .. } => "proficiency count",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Budget { total } => write!(
                f,
                "budget: {total} points invested, at most {SKILL_POINT_BUDGET} allowed"
            ),
            Violation::PerSkillCap { skill, invested } => write!(
                f,
                "per-skill cap: {skill} has {invested} points, at most {MAX_INVESTED_PER_SKILL} allowed"
            ),
            Violation::ProficiencyMinimum { skill, invested } => write!(
                f,
                "proficiency minimum: {skill} has {invested} invested points, {PROFICIENCY_MIN_INVESTED} needed"
            ),
            Violation::ProficiencyCount { chosen } => write!(
                f,
                "proficiency count: {chosen} proficiencies chosen, at most {MAX_PROFICIENCIES} allowed"
            ),
        }
    }
}

/// A validated character with its derived sheet.
///
/// Only [`validate_character`] constructs one, so every `Character` satisfies
/// the creation rules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Character {
    name: String,
    allocation: SkillAllocation,
    super_bonus: BTreeMap<SuperCategory, u32>,
    effective_skill: BTreeMap<Skill, u32>,
    inventory: BTreeSet<InventoryKind>,
}

impl Character {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn allocation(&self) -> &SkillAllocation {
        &self.allocation
    }

    pub fn super_bonus(&self, category: SuperCategory) -> u32 {
        self.super_bonus[&category]
    }

    /// Invested points plus the super-category bonus.
    pub fn effective_skill(&self, skill: Skill) -> u32 {
        self.effective_skill[&skill]
    }

    pub fn is_proficient(&self, skill: Skill) -> bool {
        self.allocation.proficiencies.contains(&skill)
    }

    pub fn inventory(&self) -> &BTreeSet<InventoryKind> {
        &self.inventory
    }

    pub fn owns(&self, item: InventoryKind) -> bool {
        self.inventory.contains(&item)
    }

    /// Points left unspent. Legal, but usually a mistake.
    pub fn unspent_points(&self) -> u32 {
        SKILL_POINT_BUDGET - self.allocation.total()
    }

    pub fn to_file(&self) -> CharacterFile {
        CharacterFile {
            name: self.name.clone(),
            invested: self.allocation.invested.clone(),
            proficiencies: self.allocation.proficiencies.iter().copied().collect(),
        }
    }
}

/// The proficiency item for each chosen proficiency.
pub fn derive_inventory(allocation: &SkillAllocation) -> BTreeSet<InventoryKind> {
    allocation
        .proficiencies
        .iter()
        .map(|s| s.proficiency_item())
        .collect()
}

/// Check every creation rule and, if all hold, derive the character sheet.
///
/// Bonuses come from invested points only and are derived in a single pass;
/// bonus points never feed further bonuses.
pub fn validate_character(
    name: impl Into<String>,
    allocation: SkillAllocation,
) -> Result<Character, Vec<Violation>> {
    let violations = allocation.violations();
    if !violations.is_empty() {
        return Err(violations);
    }
    let super_bonus: BTreeMap<_, _> = SuperCategory::ALL
        .into_iter()
        .map(|c| (c, allocation.super_bonus(c)))
        .collect();
    let effective_skill = Skill::ALL
        .into_iter()
        .map(|s| (s, allocation.invested(s) + super_bonus[&s.super_category()]))
        .collect();
    let inventory = derive_inventory(&allocation);
    Ok(Character {
        name: name.into(),
        allocation,
        super_bonus,
        effective_skill,
        inventory,
    })
}

/// On-disk character format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterFile {
    pub name: String,
    #[serde(default)]
    pub invested: BTreeMap<Skill, u32>,
    #[serde(default)]
    pub proficiencies: Vec<Skill>,
}

impl CharacterFile {
    /// Parse a character file. Unknown skill names or fields are parse
    /// errors, not violations.
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn allocation(&self) -> SkillAllocation {
        SkillAllocation {
            invested: self.invested.clone(),
            proficiencies: self.proficiencies.iter().copied().collect(),
        }
    }

    pub fn validate(&self) -> Result<Character, Vec<Violation>> {
        validate_character(self.name.clone(), self.allocation())
    }
}
