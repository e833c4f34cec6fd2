//! Exact and Monte Carlo success probabilities, and the balance report that
//! re-derives the skill-system constants from the 10 % / 90 % design goals.

use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::character::{bonus_contribution, Character, MAX_INVESTED_PER_SKILL, SKILL_POINT_BUDGET};
use crate::check::{dice_for, CheckError, CheckSpec};
use crate::dice::{die_at, DIE_FACES};
use crate::predefined;
use crate::taxonomy::{AttackCatalogEntry, Skill};

const FACES: u64 = DIE_FACES as u64;

/// A probability over `dice` d20s, kept as `numerator / 20^dice`.
#[derive(Copy, Clone, Debug, Eq)]
pub struct ExactProbability {
    numerator: u64,
    denominator: u64,
    dice: u32,
}

impl ExactProbability {
    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn dice(&self) -> u32 {
        self.dice
    }

    pub fn decimal(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    pub fn one() -> Self {
        Self {
            numerator: 1,
            denominator: 1,
            dice: 0,
        }
    }

    /// Probability of two independent events both happening.
    pub fn and(self, other: Self) -> Self {
        Self {
            numerator: self.numerator * other.numerator,
            denominator: self.denominator * other.denominator,
            dice: self.dice + other.dice,
        }
    }

    /// Does this equal `num / den` exactly?
    pub fn equals_ratio(&self, num: u64, den: u64) -> bool {
        self.numerator as u128 * den as u128 == num as u128 * self.denominator as u128
    }

    /// Lowest-terms form.
    pub fn reduced(&self) -> (u64, u64) {
        let g = gcd(self.numerator, self.denominator);
        (self.numerator / g, self.denominator / g)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl PartialEq for ExactProbability {
    fn eq(&self, other: &Self) -> bool {
        self.equals_ratio(other.numerator, other.denominator)
    }
}

impl PartialOrd for ExactProbability {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        let lhs = self.numerator as u128 * other.denominator as u128;
        let rhs = other.numerator as u128 * self.denominator as u128;
        Some(lhs.cmp(&rhs))
    }
}

impl fmt::Display for ExactProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{} = {:.4}",
            self.numerator,
            self.denominator,
            self.decimal()
        )
    }
}

impl Serialize for ExactProbability {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ExactProbability", 3)?;
        st.serialize_field("numerator", &self.numerator)?;
        st.serialize_field("denominator", &self.denominator)?;
        st.serialize_field("decimal", &self.decimal())?;
        st.end()
    }
}

/// Rolls per check: one normally, best of two when proficient.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rolls {
    One,
    BestOfTwo,
}

impl Rolls {
    pub fn proficient(proficient: bool) -> Self {
        if proficient {
            Rolls::BestOfTwo
        } else {
            Rolls::One
        }
    }

    pub fn count(self) -> u32 {
        match self {
            Rolls::One => 1,
            Rolls::BestOfTwo => 2,
        }
    }
}

/// Faces that fail: those where `face + skill <= threshold`.
fn failing_faces(effective_skill: u32, threshold: i32) -> u64 {
    (threshold as i64 - effective_skill as i64).clamp(0, FACES as i64) as u64
}

/// Success probability of one check: `1 - (F/20)^k` with `F` failing faces
/// and `k` dice.
pub fn exact_check_probability(effective_skill: u32, threshold: i32, rolls: Rolls) -> ExactProbability {
    let k = rolls.count();
    let fail = failing_faces(effective_skill, threshold);
    let denominator = FACES.pow(k);
    ExactProbability {
        numerator: denominator - fail.pow(k),
        denominator,
        dice: k,
    }
}

/// Exact probability that `character` passes the check `spec`.
pub fn exact_for(spec: &CheckSpec, character: &Character) -> Result<ExactProbability, CheckError> {
    let threshold = spec.adjusted_threshold()?;
    Ok(exact_check_probability(
        character.effective_skill(spec.skill),
        threshold,
        Rolls::proficient(dice_for(character, spec.skill) == 2),
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AttackError {
    #[error("inventory prerequisite: {attack:?} needs {item}")]
    InventoryPrerequisite {
        attack: crate::taxonomy::Attack,
        item: crate::taxonomy::InventoryKind,
    },
    #[error("{attack:?} needs {expected} checks, got {got}")]
    CheckCount {
        attack: crate::taxonomy::Attack,
        expected: usize,
        got: usize,
    },
    #[error("check {index} of {attack:?} must use {expected}, got {got}")]
    SkillMismatch {
        attack: crate::taxonomy::Attack,
        index: usize,
        expected: Skill,
        got: Skill,
    },
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// Probability that every check of a multi-step attack succeeds, treating
/// the rolls as independent. `specs[i]` configures the `i`-th required check.
pub fn chained_attack_probability(
    entry: &AttackCatalogEntry,
    character: &Character,
    specs: &[CheckSpec],
) -> Result<ExactProbability, AttackError> {
    if let Some(item) = entry.required_inventory {
        if !character.owns(item) {
            return Err(AttackError::InventoryPrerequisite {
                attack: entry.attack,
                item,
            });
        }
    }
    if specs.len() != entry.required_checks.len() {
        return Err(AttackError::CheckCount {
            attack: entry.attack,
            expected: entry.required_checks.len(),
            got: specs.len(),
        });
    }
    let mut p = ExactProbability::one();
    for (index, (spec, &expected)) in specs.iter().zip(entry.required_checks).enumerate() {
        if spec.skill != expected {
            return Err(AttackError::SkillMismatch {
                attack: entry.attack,
                index,
                expected,
                got: spec.skill,
            });
        }
        p = p.and(exact_for(spec, character)?);
    }
    Ok(p)
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MonteCarloEstimate {
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    /// `1/sqrt(trials)`; bounds the binomial standard error from above.
    pub standard_error: f64,
}

const MC_CHUNK: u64 = 1 << 16;

/// Empirical success rate over `trials` simulated checks.
///
/// Trial `i` reads dice `i*k .. i*k + k` of the stream for `seed`, so the
/// result does not depend on how the work is split across threads.
pub fn monte_carlo_probability(
    effective_skill: u32,
    threshold: i32,
    rolls: Rolls,
    trials: u64,
    seed: u64,
) -> MonteCarloEstimate {
    assert!(trials >= 1, "at least one trial");
    let k = rolls.count() as u64;
    let chunks = trials.div_ceil(MC_CHUNK);
    let successes: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * MC_CHUNK;
            let end = (start + MC_CHUNK).min(trials);
            (start..end)
                .filter(|&t| {
                    let best = (0..k).map(|j| die_at(seed, t * k + j)).max().unwrap();
                    best as i64 + effective_skill as i64 > threshold as i64
                })
                .count() as u64
        })
        .sum();
    MonteCarloEstimate {
        trials,
        successes,
        estimate: successes as f64 / trials as f64,
        standard_error: 1.0 / (trials as f64).sqrt(),
    }
}

/// Constants quoted alongside the design derivation, used to detect drift.
pub mod quoted {
    pub const LAYMAN_TARGET: f64 = 0.10;
    pub const MASTER_TARGET: f64 = 0.90;
    pub const SQRT_TEN_PERCENT: f64 = 0.316;
    pub const ROUNDED_FAILURE_PER_THROW: f64 = 0.35;
    pub const MASTER_PER_THROW: f64 = 0.65;
    pub const DESIRED_FACES_LAYMAN: u64 = 2;
    pub const DESIRED_FACES_MASTER: u64 = 13;
    pub const UNIFIED_THRESHOLD: i32 = 11;
    pub const BASE_THRESHOLD: i32 = 18;
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Drift {
    pub quantity: &'static str,
    pub quoted: f64,
    pub recomputed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SkillAboveMaster {
    pub character: String,
    pub skill: Skill,
    pub effective_skill: u32,
}

/// The skill-system derivation, recomputed from the two design targets.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BalanceReport {
    pub layman_target: f64,
    pub master_target: f64,
    /// Faces that must succeed for the layman target on one d20.
    pub layman_desired_faces: u64,
    /// Threshold a skill-0 total must exceed.
    pub base_threshold: i32,
    pub layman_success: ExactProbability,
    /// Per-throw failure that gives the master target over two throws.
    pub sqrt_ten_percent: f64,
    /// The same, rounded up to the next 0.05 step of a d20.
    pub rounded_failure_per_throw: f64,
    pub master_failing_faces: u64,
    pub master_desired_faces: u64,
    /// Effective skill that turns the base threshold into the master rate.
    pub unified_threshold: i32,
    pub master_per_throw: ExactProbability,
    pub master_combined: ExactProbability,
    pub master_target_met: bool,
    pub master_target_gap: f64,
    /// Fewest points one super-category needs to field a master.
    pub master_investment: u32,
    pub skill_point_budget: u32,
    pub predefined_above_master: Vec<SkillAboveMaster>,
    pub drift: Vec<Drift>,
}

/// Fewest points a single three-skill category needs so that one of its
/// skills reaches `master_skill` effective, found by enumeration.
fn min_investment_for_master(master_skill: i32) -> u32 {
    let cap = MAX_INVESTED_PER_SKILL;
    let mut best = u32::MAX;
    for a in 0..=cap {
        for b in 0..=cap {
            for c in 0..=cap {
                let bonus: u32 = [a, b, c]
                    .iter()
                    .map(|&p| bonus_contribution(p).expect("in range"))
                    .sum();
                if (a.max(b).max(c) + bonus) as i32 >= master_skill {
                    best = best.min(a + b + c);
                }
            }
        }
    }
    best
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Recompute the whole derivation. Nothing in the report is a stored
/// constant except the two targets; `drift` lists every quoted constant that
/// the recomputation disagrees with.
pub fn balance_report() -> BalanceReport {
    let layman_target = quoted::LAYMAN_TARGET;
    let master_target = quoted::MASTER_TARGET;
    let faces = FACES as f64;

    let layman_desired_faces = (layman_target * faces).round() as u64;
    let base_threshold = (FACES - layman_desired_faces) as i32;
    let layman_success = exact_check_probability(0, base_threshold, Rolls::One);

    let master_failure = 1.0 - master_target;
    let sqrt_ten_percent = master_failure.sqrt();
    // a d20 moves in 1/20 steps; round the per-throw failure up to one
    let master_failing_faces = (sqrt_ten_percent * faces - 1e-9).ceil() as u64;
    let rounded_failure_per_throw = master_failing_faces as f64 / faces;
    let master_desired_faces = FACES - master_failing_faces;
    let unified_threshold = base_threshold - master_failing_faces as i32;

    let master_skill = unified_threshold as u32;
    let master_per_throw = exact_check_probability(master_skill, base_threshold, Rolls::One);
    let master_combined = exact_check_probability(master_skill, base_threshold, Rolls::BestOfTwo);
    let master_target_met = master_combined.decimal() >= master_target - 1e-12;
    let master_target_gap = master_target - master_combined.decimal();

    let master_investment = min_investment_for_master(unified_threshold);

    let mut predefined_above_master = Vec::new();
    for c in predefined::all() {
        for s in Skill::ALL {
            let e = c.effective_skill(s);
            if e > master_skill {
                predefined_above_master.push(SkillAboveMaster {
                    character: c.name().to_string(),
                    skill: s,
                    effective_skill: e,
                });
            }
        }
    }

    let mut drift = Vec::new();
    let mut check = |quantity, quoted: f64, recomputed: f64, tol| {
        if !close(quoted, recomputed, tol) {
            drift.push(Drift {
                quantity,
                quoted,
                recomputed,
            });
        }
    };
    check("layman success", quoted::LAYMAN_TARGET, layman_success.decimal(), 1e-12);
    check(
        "desired faces (layman)",
        quoted::DESIRED_FACES_LAYMAN as f64,
        layman_desired_faces as f64,
        0.0,
    );
    check(
        "base threshold",
        quoted::BASE_THRESHOLD as f64,
        base_threshold as f64,
        0.0,
    );
    check("sqrt(10%)", quoted::SQRT_TEN_PERCENT, sqrt_ten_percent, 5e-4);
    check(
        "rounded failure per throw",
        quoted::ROUNDED_FAILURE_PER_THROW,
        rounded_failure_per_throw,
        1e-12,
    );
    check(
        "master success per throw",
        quoted::MASTER_PER_THROW,
        master_per_throw.decimal(),
        1e-12,
    );
    check(
        "desired faces (master)",
        quoted::DESIRED_FACES_MASTER as f64,
        master_desired_faces as f64,
        0.0,
    );
    check(
        "unified threshold",
        quoted::UNIFIED_THRESHOLD as f64,
        unified_threshold as f64,
        0.0,
    );

    BalanceReport {
        layman_target,
        master_target,
        layman_desired_faces,
        base_threshold,
        layman_success,
        sqrt_ten_percent,
        rounded_failure_per_throw,
        master_failing_faces,
        master_desired_faces,
        unified_threshold,
        master_per_throw,
        master_combined,
        master_target_met,
        master_target_gap,
        master_investment,
        skill_point_budget: SKILL_POINT_BUDGET,
        predefined_above_master,
        drift,
    }
}

impl BalanceReport {
    /// Human-readable table.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut line = |label: &str, value: String| {
            out.push_str(&format!("{label} {value}\n"));
        };
        line("layman target:", format!("{:.2}", self.layman_target));
        line("desired faces (layman):", self.layman_desired_faces.to_string());
        line("base threshold:", self.base_threshold.to_string());
        line("layman success:", self.layman_success.to_string());
        line("master target:", format!("{:.2}", self.master_target));
        line("per-throw failure sqrt(0.10):", format!("{:.3}", self.sqrt_ten_percent));
        line(
            "rounded up to d20 step:",
            format!("{:.2}", self.rounded_failure_per_throw),
        );
        line("desired faces (master):", self.master_desired_faces.to_string());
        line("unified threshold:", self.unified_threshold.to_string());
        line("master success per throw:", self.master_per_throw.to_string());
        line("master success, best of two:", self.master_combined.to_string());
        line(
            "master target met:",
            if self.master_target_met {
                "yes".to_string()
            } else {
                format!(
                    "no ({:.2} % vs {:.0} %, gap {:.2} points, from rounding {:.3} up to {:.2})",
                    self.master_combined.decimal() * 100.0,
                    self.master_target * 100.0,
                    self.master_target_gap * 100.0,
                    self.sqrt_ten_percent,
                    self.rounded_failure_per_throw
                )
            },
        );
        line(
            "points for a five-point bonus:",
            format!("{} of {}", self.master_investment, self.skill_point_budget),
        );
        for s in &self.predefined_above_master {
            line(
                "above master skill:",
                format!("{} {} = {}", s.character, s.skill, s.effective_skill),
            );
        }
        if self.drift.is_empty() {
            line("drift from quoted constants:", "none".to_string());
        } else {
            for d in &self.drift {
                line(
                    "DRIFT:",
                    format!("{} quoted {} recomputed {}", d.quantity, d.quoted, d.recomputed),
                );
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::{validate_character, SkillAllocation};
    use crate::taxonomy::{Attack, InventoryKind};

    /// Brute-force oracle: enumerate every face combination.
    fn enumerate(skill: u32, threshold: i32, k: u32) -> (u64, u64) {
        let mut wins = 0;
        let mut total = 0;
        for a in 1..=20i32 {
            if k == 1 {
                total += 1;
                if a + skill as i32 > threshold {
                    wins += 1;
                }
                continue;
            }
            for b in 1..=20i32 {
                total += 1;
                if a.max(b) + skill as i32 > threshold {
                    wins += 1;
                }
            }
        }
        (wins, total)
    }

    #[test]
    fn layman_and_master_values() {
        let p = exact_check_probability(0, 18, Rolls::One);
        assert_eq!((p.numerator(), p.denominator()), (2, 20));
        let p = exact_check_probability(11, 18, Rolls::One);
        assert_eq!((p.numerator(), p.denominator()), (13, 20));
        let p = exact_check_probability(11, 18, Rolls::BestOfTwo);
        assert_eq!((p.numerator(), p.denominator()), (351, 400));
        assert_eq!(enumerate(11, 18, 2), (351, 400));
        let p = exact_check_probability(20, 18, Rolls::One);
        assert_eq!((p.numerator(), p.denominator()), (20, 20));
    }

    #[test]
    fn matches_enumeration_everywhere() {
        for skill in 0..=25 {
            for t in 8..=30 {
                for (rolls, k) in [(Rolls::One, 1), (Rolls::BestOfTwo, 2)] {
                    let (w, n) = enumerate(skill, t, k);
                    let p = exact_check_probability(skill, t, rolls);
                    assert_eq!((p.numerator(), p.denominator()), (w, n));
                }
            }
        }
    }

    #[test]
    fn extreme_thresholds_clamp() {
        assert_eq!(exact_check_probability(0, 40, Rolls::One).numerator(), 0);
        assert_eq!(exact_check_probability(0, -5, Rolls::BestOfTwo).numerator(), 400);
    }

    fn social_master() -> Character {
        // Appearance and Adaptation both at 6 + 5 bonus, both proficient.
        validate_character(
            "Impostor",
            SkillAllocation::new()
                .with(Skill::Appearance, 6)
                .with(Skill::Adaptation, 6)
                .with(Skill::Manipulation, 3)
                .proficient_in(Skill::Appearance)
                .proficient_in(Skill::Adaptation),
        )
        .unwrap()
    }

    #[test]
    fn pretexting_is_product_of_checks() {
        let c = social_master();
        assert_eq!(c.effective_skill(Skill::Appearance), 11);
        assert_eq!(c.effective_skill(Skill::Adaptation), 11);
        let specs = [
            CheckSpec::new(Skill::Appearance),
            CheckSpec::new(Skill::Adaptation),
        ];
        let p = chained_attack_probability(&Attack::Pretexting.entry(), &c, &specs).unwrap();
        assert!(p.equals_ratio(351 * 351, 400 * 400));
        // joint enumeration over 400 x 400 outcomes
        let mut wins = 0u64;
        for a1 in 1..=20 {
            for a2 in 1..=20 {
                for b1 in 1..=20 {
                    for b2 in 1..=20 {
                        let first = i32::max(a1, a2) + 11 > 18;
                        let second = i32::max(b1, b2) + 11 > 18;
                        if first && second {
                            wins += 1;
                        }
                    }
                }
            }
        }
        assert!(p.equals_ratio(wins, 160_000));
        assert!((p.decimal() - 0.77000625).abs() < 1e-12);
    }

    #[test]
    fn single_check_attack_equals_exact() {
        let wolf = predefined::by_name("Wolf of Wallstreet").unwrap();
        let spec = CheckSpec::new(Skill::Manipulation);
        let p = chained_attack_probability(&Attack::QuidProQuo.entry(), &wolf, &[spec.clone()])
            .unwrap();
        assert_eq!(p, exact_for(&spec, &wolf).unwrap());
    }

    #[test]
    fn scareware_needs_a_server() {
        let spock = predefined::by_name("Spock").unwrap();
        assert!(!spock.owns(InventoryKind::PrinterServer));
        let specs = [
            CheckSpec::new(Skill::Design),
            CheckSpec::new(Skill::Programming),
        ];
        let err = chained_attack_probability(&Attack::Scareware.entry(), &spock, &specs);
        assert!(matches!(err, Err(AttackError::InventoryPrerequisite { .. })));
        assert!(err.unwrap_err().to_string().starts_with("inventory prerequisite"));
    }

    #[test]
    fn attack_check_mismatch_is_an_error() {
        let c = social_master();
        let err = chained_attack_probability(
            &Attack::Pretexting.entry(),
            &c,
            &[CheckSpec::new(Skill::Appearance)],
        );
        assert!(matches!(err, Err(AttackError::CheckCount { .. })));
        let err = chained_attack_probability(
            &Attack::Pretexting.entry(),
            &c,
            &[CheckSpec::new(Skill::Adaptation), CheckSpec::new(Skill::Appearance)],
        );
        assert!(matches!(err, Err(AttackError::SkillMismatch { index: 0, .. })));
    }

    #[test]
    fn monte_carlo_impossible_check() {
        let est = monte_carlo_probability(0, 40, Rolls::One, 1_000, 5);
        assert_eq!(est.estimate, 0.0);
        assert_eq!(est.successes, 0);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let a = monte_carlo_probability(5, 18, Rolls::BestOfTwo, 200_001, 77);
        let b = monte_carlo_probability(5, 18, Rolls::BestOfTwo, 200_001, 77);
        assert_eq!(a, b);
        // sequential recount of the same trials
        let seq = (0..200_001u64)
            .filter(|&t| die_at(77, 2 * t).max(die_at(77, 2 * t + 1)) as i32 + 5 > 18)
            .count() as u64;
        assert_eq!(a.successes, seq);
    }

    #[test]
    fn monte_carlo_converges_on_grid() {
        let mut seed = 1000;
        for skill in [0, 3, 7, 11, 15] {
            for t in [14, 18, 22, 26, 30] {
                for rolls in [Rolls::One, Rolls::BestOfTwo] {
                    if rolls == Rolls::BestOfTwo && t % 4 != 2 {
                        continue;
                    }
                    seed += 1;
                    let exact = exact_check_probability(skill, t, rolls).decimal();
                    let est = monte_carlo_probability(skill, t, rolls, 1_000_000, seed);
                    assert!(
                        (est.estimate - exact).abs() <= 4.0 * est.standard_error,
                        "skill {skill} t {t} {rolls:?}: {} vs {exact}",
                        est.estimate
                    );
                }
            }
        }
    }

    #[test]
    fn balance_report_reproduces_derivation() {
        let r = balance_report();
        assert_eq!(r.base_threshold, 18);
        assert_eq!(r.layman_desired_faces, 2);
        assert!(r.layman_success.equals_ratio(1, 10));
        assert_eq!(format!("{:.3}", r.sqrt_ten_percent), "0.316");
        assert!((r.rounded_failure_per_throw - 0.35).abs() < 1e-12);
        assert_eq!(r.master_desired_faces, 13);
        assert_eq!(r.unified_threshold, 11);
        assert!(r.master_per_throw.equals_ratio(13, 20));
        assert!(r.master_combined.equals_ratio(351, 400));
        assert!(!r.master_target_met);
        assert!((r.master_target_gap - 0.0225).abs() < 1e-12);
        assert_eq!(r.master_investment, 15);
        assert!(r.drift.is_empty(), "{:?}", r.drift);
        assert!(r
            .predefined_above_master
            .iter()
            .any(|s| s.character == "Nerd" && s.effective_skill == 13));
        let text = r.render();
        assert!(text.contains("unified threshold:"));
        assert!(text.contains("87.75 % vs 90 %"));
    }
}
