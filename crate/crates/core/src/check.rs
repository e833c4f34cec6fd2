//! d20 skill checks.
//!
//! A check succeeds when the best die plus the effective skill strictly
//! exceeds the adjusted threshold. Proficient characters roll twice and keep
//! the better die.

use serde::{Deserialize, Serialize};

use crate::character::Character;
use crate::dice::DiceStream;
use crate::taxonomy::{InventoryKind, Skill, MAX_ITEM_REDUCTION};

pub const BASE_THRESHOLD: i32 = 18;
pub const MAX_GM_ADJUSTMENT: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("GM adjustment {0} outside -4..=4")]
    GmAdjustmentOutOfRange(i32),
    #[error("item reduction {0} outside 0..=4")]
    ItemReductionOutOfRange(i32),
    #[error("{actor} does not own {item}")]
    ItemNotOwned { actor: String, item: InventoryKind },
    #[error("expected {expected} dice, got {got}")]
    WrongDiceCount { expected: usize, got: usize },
    #[error("die face {0} outside 1..=20")]
    InvalidFace(u8),
}

/// An inventory item applied to a single check.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ItemUse {
    pub kind: InventoryKind,
    pub reduction: i32,
}

fn default_base() -> i32 {
    BASE_THRESHOLD
}

/// One decision the GM asks for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckSpec {
    pub skill: Skill,
    #[serde(default = "default_base")]
    pub base_threshold: i32,
    #[serde(default)]
    pub gm_adjustment: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub item: Option<ItemUse>,
    #[serde(default)]
    pub npc_dependent: bool,
    /// NPC alertness in force. Only counted for NPC-dependent checks.
    #[serde(default)]
    pub alertness: u32,
}

impl CheckSpec {
    pub fn new(skill: Skill) -> Self {
        Self {
            skill,
            base_threshold: BASE_THRESHOLD,
            gm_adjustment: 0,
            item: None,
            npc_dependent: false,
            alertness: 0,
        }
    }

    pub fn gm(mut self, adjustment: i32) -> Self {
        self.gm_adjustment = adjustment;
        self
    }

    pub fn with_item(mut self, kind: InventoryKind, reduction: i32) -> Self {
        self.item = Some(ItemUse { kind, reduction });
        self
    }

    pub fn npc(mut self, alertness: u32) -> Self {
        self.npc_dependent = true;
        self.alertness = alertness;
        self
    }

    pub fn item_reduction(&self) -> i32 {
        self.item.map_or(0, |i| i.reduction)
    }

    pub fn validate(&self) -> Result<(), CheckError> {
        if !(-MAX_GM_ADJUSTMENT..=MAX_GM_ADJUSTMENT).contains(&self.gm_adjustment) {
            return Err(CheckError::GmAdjustmentOutOfRange(self.gm_adjustment));
        }
        if let Some(item) = self.item {
            let max = item.kind.item().max_threshold_reduction.min(MAX_ITEM_REDUCTION);
            if !(0..=max).contains(&item.reduction) {
                return Err(CheckError::ItemReductionOutOfRange(item.reduction));
            }
        }
        Ok(())
    }

    /// Threshold the total must exceed. The components are range-checked;
    /// the sum is not clamped.
    pub fn adjusted_threshold(&self) -> Result<i32, CheckError> {
        self.validate()?;
        let alertness = if self.npc_dependent {
            self.alertness as i32
        } else {
            0
        };
        Ok(self.base_threshold + self.gm_adjustment - self.item_reduction() + alertness)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckResult {
    pub rolls: Vec<u8>,
    pub effective_skill: u32,
    pub best_total: i32,
    pub adjusted_threshold: i32,
    pub success: bool,
}

/// Number of dice the character rolls for `skill`.
pub fn dice_for(character: &Character, skill: Skill) -> usize {
    if character.is_proficient(skill) {
        2
    } else {
        1
    }
}

/// Resolve a check against faces that were already rolled.
pub fn resolve_with_rolls(
    spec: &CheckSpec,
    character: &Character,
    rolls: &[u8],
) -> Result<CheckResult, CheckError> {
    let threshold = spec.adjusted_threshold()?;
    if let Some(item) = spec.item {
        if !character.owns(item.kind) {
            return Err(CheckError::ItemNotOwned {
                actor: character.name().to_string(),
                item: item.kind,
            });
        }
    }
    let expected = dice_for(character, spec.skill);
    if rolls.len() != expected {
        return Err(CheckError::WrongDiceCount {
            expected,
            got: rolls.len(),
        });
    }
    if let Some(&bad) = rolls.iter().find(|f| !(1..=20).contains(*f)) {
        return Err(CheckError::InvalidFace(bad));
    }
    let effective_skill = character.effective_skill(spec.skill);
    let best = *rolls.iter().max().expect("at least one die") as i32;
    let best_total = best + effective_skill as i32;
    Ok(CheckResult {
        rolls: rolls.to_vec(),
        effective_skill,
        best_total,
        adjusted_threshold: threshold,
        success: best_total > threshold,
    })
}

/// Draw the dice for a check and resolve it. The returned stream is advanced
/// by exactly the number of dice drawn.
pub fn resolve_check(
    spec: &CheckSpec,
    character: &Character,
    dice: DiceStream,
) -> Result<(CheckResult, DiceStream), CheckError> {
    spec.validate()?;
    let (rolls, next) = dice.draw(dice_for(character, spec.skill));
    let result = resolve_with_rolls(spec, character, &rolls)?;
    Ok((result, next))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::{validate_character, SkillAllocation};
    use crate::predefined;

    fn layman() -> Character {
        validate_character("Layman", SkillAllocation::new()).unwrap()
    }

    #[test]
    fn identity_threshold() {
        assert_eq!(CheckSpec::new(Skill::Analysis).adjusted_threshold(), Ok(18));
    }

    #[test]
    fn threshold_components_add_up() {
        let spec = CheckSpec::new(Skill::Adaptation)
            .gm(2)
            .with_item(InventoryKind::Costume, 4)
            .npc(1);
        assert_eq!(spec.adjusted_threshold(), Ok(17));
    }

    #[test]
    fn alertness_ignored_without_npc() {
        let mut spec = CheckSpec::new(Skill::Fitness);
        spec.alertness = 5;
        assert_eq!(spec.adjusted_threshold(), Ok(18));
    }

    #[test]
    fn out_of_range_components_rejected() {
        assert_eq!(
            CheckSpec::new(Skill::Design).gm(-5).adjusted_threshold(),
            Err(CheckError::GmAdjustmentOutOfRange(-5))
        );
        assert_eq!(
            CheckSpec::new(Skill::Design)
                .with_item(InventoryKind::PrinterServer, 5)
                .adjusted_threshold(),
            Err(CheckError::ItemReductionOutOfRange(5))
        );
        assert!(CheckSpec::new(Skill::Design)
            .with_item(InventoryKind::PrinterServer, -1)
            .validate()
            .is_err());
    }

    #[test]
    fn layman_needs_nineteen() {
        let spec = CheckSpec::new(Skill::Manipulation);
        let c = layman();
        assert!(resolve_with_rolls(&spec, &c, &[19]).unwrap().success);
        assert!(resolve_with_rolls(&spec, &c, &[20]).unwrap().success);
        assert!(!resolve_with_rolls(&spec, &c, &[18]).unwrap().success);
    }

    #[test]
    fn master_keeps_better_die() {
        let wolf = predefined::by_name("Wolf of Wallstreet").unwrap();
        let spec = CheckSpec::new(Skill::Manipulation);
        let r = resolve_with_rolls(&spec, &wolf, &[3, 8]).unwrap();
        assert_eq!(r.best_total, 19);
        assert!(r.success);
        let r = resolve_with_rolls(&spec, &wolf, &[7, 2]).unwrap();
        assert_eq!(r.best_total, 18);
        assert!(!r.success);
    }

    #[test]
    fn dice_count_follows_proficiency() {
        let wolf = predefined::by_name("Wolf of Wallstreet").unwrap();
        let dice = DiceStream::new(3);
        let (r, next) = resolve_check(&CheckSpec::new(Skill::Appearance), &wolf, dice).unwrap();
        assert_eq!(r.rolls.len(), 2);
        assert_eq!(next.position, 2);
        let (r, next) = resolve_check(&CheckSpec::new(Skill::Adaptation), &wolf, next).unwrap();
        assert_eq!(r.rolls.len(), 1);
        assert_eq!(next.position, 3);
        assert_eq!(
            resolve_with_rolls(&CheckSpec::new(Skill::Appearance), &wolf, &[4]),
            Err(CheckError::WrongDiceCount {
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    fn items_must_be_owned() {
        let wolf = predefined::by_name("Wolf of Wallstreet").unwrap();
        let spec = CheckSpec::new(Skill::Adaptation).with_item(InventoryKind::Costume, 4);
        assert!(matches!(
            resolve_check(&spec, &wolf, DiceStream::new(1)),
            Err(CheckError::ItemNotOwned { .. })
        ));
        let spec = CheckSpec::new(Skill::Manipulation).with_item(InventoryKind::Bribes, 4);
        let (r, _) = resolve_check(&spec, &wolf, DiceStream::new(1)).unwrap();
        assert_eq!(r.adjusted_threshold, 14);
    }

    #[test]
    fn no_natural_twenty_override() {
        let spec = CheckSpec::new(Skill::Design).gm(4);
        let r = resolve_with_rolls(&spec, &layman(), &[20]).unwrap();
        assert!(!r.success);
    }
}
