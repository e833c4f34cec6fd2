#![allow(dead_code)]

use tasep_core::check::CheckSpec;
use tasep_core::predefined;
use tasep_core::scenario::{shipped, ActionKind};
use tasep_core::session::{
    create_session_at, Command, Phase, Session, SessionConfig,
};
use tasep_core::taxonomy::{Attack, InventoryKind, Skill};

pub const DEMO_SEED: u64 = 20_240_617;
pub const GOLDEN_LOG: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/demo_session.jsonl");
pub const GOLDEN_STATE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/demo_state.json");

struct Clock(u64);

impl Clock {
    fn tick(&mut self) -> u64 {
        self.0 += 15_000;
        self.0
    }
}

fn check(
    s: &mut Session,
    clock: &mut Clock,
    failures: &mut u32,
    actor: &str,
    spec: CheckSpec,
    attack: Option<Attack>,
    action: Option<ActionKind>,
) {
    let cmd = Command::AdjudicateCheck {
        actor: actor.into(),
        check: spec,
        attack,
        action,
    };
    s.execute_at(cmd, clock.tick()).expect("demo check");
    if s.state().phase == Phase::AwaitingFailureOutcome {
        *failures += 1;
        // The first two slips are noticed, later ones get talked away.
        let compensated = *failures > 2;
        s.execute_at(Command::RecordFailureOutcome { compensated }, clock.tick())
            .expect("demo outcome");
    }
}

/// A scripted Theft of Data evening with fixed timestamps.
pub fn demo_session() -> Session {
    let team: Vec<_> = ["Con-Artist", "Spock", "Thief"]
        .iter()
        .map(|n| predefined::by_name(n).unwrap())
        .collect();
    let mut clock = Clock(1_718_000_000_000);
    let mut s = create_session_at(
        shipped::theft_of_data(),
        &team,
        DEMO_SEED,
        SessionConfig::default(),
        clock.0,
    )
    .unwrap();
    let mut f = 0;
    let run = |s: &mut Session, clock: &mut Clock, cmd: Command| {
        s.execute_at(cmd, clock.tick()).expect("demo command");
    };

    run(&mut s, &mut clock, Command::PerformAction { action: ActionKind::ObserveBuilding });
    run(&mut s, &mut clock, Command::RevealFloor { floor: 0 });
    check(&mut s, &mut clock, &mut f, "Spock", CheckSpec::new(Skill::Analysis), None, Some(ActionKind::Osint));
    for _ in 0..2 {
        check(
            &mut s,
            &mut clock,
            &mut f,
            "Con-Artist",
            CheckSpec::new(Skill::Manipulation).npc(0),
            Some(Attack::QuidProQuo),
            Some(ActionKind::TalkToNpc),
        );
    }
    check(&mut s, &mut clock, &mut f, "Thief", CheckSpec::new(Skill::Fitness).gm(-2), Some(Attack::Sneaking), None);
    check(
        &mut s,
        &mut clock,
        &mut f,
        "Thief",
        CheckSpec::new(Skill::LockPicking).with_item(InventoryKind::BurglarTools, 3),
        Some(Attack::OpeningDoors),
        None,
    );
    check(
        &mut s,
        &mut clock,
        &mut f,
        "Con-Artist",
        CheckSpec::new(Skill::Appearance).npc(0),
        Some(Attack::Pretexting),
        None,
    );
    check(
        &mut s,
        &mut clock,
        &mut f,
        "Con-Artist",
        CheckSpec::new(Skill::Adaptation).npc(0),
        Some(Attack::Pretexting),
        None,
    );
    run(&mut s, &mut clock, Command::RevealFloor { floor: 1 });
    run(&mut s, &mut clock, Command::RevealFloor { floor: 2 });
    check(
        &mut s,
        &mut clock,
        &mut f,
        "Con-Artist",
        CheckSpec::new(Skill::Manipulation).npc(0).with_item(InventoryKind::Bribes, 4),
        None,
        None,
    );
    run(
        &mut s,
        &mut clock,
        Command::EaseAlertness {
            delta: 1,
            reason: "the guard was bribed and looks the other way".into(),
        },
    );
    check(&mut s, &mut clock, &mut f, "Spock", CheckSpec::new(Skill::Analysis).gm(1), None, Some(ActionKind::ExploreInterior));
    check(&mut s, &mut clock, &mut f, "Thief", CheckSpec::new(Skill::SleightOfHand).npc(0), Some(Attack::Theft), None);
    check(&mut s, &mut clock, &mut f, "Spock", CheckSpec::new(Skill::Programming).gm(2), Some(Attack::WateringHole), None);
    check(&mut s, &mut clock, &mut f, "Thief", CheckSpec::new(Skill::Forging).gm(-1), Some(Attack::BadgeSurveillance), None);
    run(
        &mut s,
        &mut clock,
        Command::GrantKnowledge {
            ids: vec!["c-level-network".into(), "unlocked-screens".into()],
        },
    );
    check(&mut s, &mut clock, &mut f, "Spock", CheckSpec::new(Skill::Manipulation).npc(0), None, None);
    check(&mut s, &mut clock, &mut f, "Thief", CheckSpec::new(Skill::SleightOfHand).gm(3), None, None);
    check(&mut s, &mut clock, &mut f, "Spock", CheckSpec::new(Skill::Programming), None, None);
    run(&mut s, &mut clock, Command::CompleteObjective { objective: "customer-data".into() });
    run(&mut s, &mut clock, Command::CloseSession);
    s
}
