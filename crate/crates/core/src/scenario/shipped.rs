//! The two introductory scenarios, one per building model.

use super::model::Scenario;
use super::parse::parse_scenario;

pub const GIVEAWAY: &str = include_str!("../../data/scenarios/giveaway.json");
pub const THEFT_OF_DATA: &str = include_str!("../../data/scenarios/theft_of_data.json");

fn load(text: &str) -> Scenario {
    parse_scenario(text).unwrap_or_else(|errs| {
        panic!(
            "shipped scenario is invalid: {}",
            errs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
        )
    })
}

/// SME model: a startup infiltrated through a fake pizza delivery.
pub fn giveaway() -> Scenario {
    load(GIVEAWAY)
}

/// Large-organization model: stealing an insurer's customer data.
pub fn theft_of_data() -> Scenario {
    load(THEFT_OF_DATA)
}

pub fn all() -> Vec<Scenario> {
    vec![giveaway(), theft_of_data()]
}

pub fn by_id(id: &str) -> Option<Scenario> {
    all().into_iter().find(|s| s.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{serialize_scenario, AccessColor, FeatureKind, OrganizationType};
    use std::collections::BTreeSet;

    #[test]
    fn knowledge_counts() {
        assert_eq!(giveaway().knowledge.len(), 6);
        assert_eq!(theft_of_data().knowledge.len(), 8);
    }

    #[test]
    fn round_trip_is_identity() {
        for s in all() {
            let again = parse_scenario(&serialize_scenario(&s)).unwrap();
            assert_eq!(again, s);
        }
    }

    #[test]
    fn theft_of_data_uses_all_four_door_colors() {
        let s = theft_of_data();
        let colors: BTreeSet<_> = s.doors().map(|d| d.color).collect();
        assert_eq!(colors, AccessColor::ALL.into_iter().collect());
        assert_eq!(s.organization, OrganizationType::Large);
    }

    #[test]
    fn giveaway_is_a_plain_sme() {
        let s = giveaway();
        assert_eq!(s.organization, OrganizationType::Sme);
        assert!(!s.features().any(|f| f.kind == FeatureKind::WelcomeDesk));
        assert!(!s.doors().any(|d| d.color.is_restricted()));
        assert!(s.features().any(|f| f.kind == FeatureKind::Dumpster));
    }

    #[test]
    fn theft_of_data_interview_is_on_second_floor() {
        let s = theft_of_data();
        let step = s
            .intended_solution
            .iter()
            .find(|st| st.attack == Some(crate::taxonomy::Attack::Pretexting))
            .unwrap();
        assert_eq!(s.floor_of_room(step.room.as_deref().unwrap()), Some(2));
    }
}
