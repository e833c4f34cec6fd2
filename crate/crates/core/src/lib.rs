//! Rules, probabilities, scenarios and live sessions for TASEP, a tabletop
//! game that teaches social-engineering awareness.

pub mod character;
pub mod check;
pub mod dice;
pub mod predefined;
pub mod probability;
pub mod scenario;
pub mod session;
pub mod taxonomy;

pub use character::{validate_character, Character, CharacterFile, SkillAllocation, Violation};
pub use check::{resolve_check, resolve_with_rolls, CheckError, CheckResult, CheckSpec, ItemUse};
pub use dice::DiceStream;
pub use probability::{
    balance_report, chained_attack_probability, exact_check_probability, exact_for,
    monte_carlo_probability, BalanceReport, ExactProbability, MonteCarloEstimate, Rolls,
};
pub use taxonomy::{Attack, InventoryKind, Skill, SuperCategory};
