//! Household world fixtures, skill transitions and goal checks.

mod support;

use adaplan_core::pddl::parse_expr;
use adaplan_core::world::{Placement, WorldError, WorldState, SKILLS};
use proptest::prelude::*;

fn kitchen() -> WorldState {
    WorldState::from_json(&support::read("worlds/kitchen.json")).unwrap()
}

fn run(w: &WorldState, skill: &str, args: &[&str]) -> (bool, String, WorldState) {
    let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    let (r, next) = w.apply_skill(skill, &args).unwrap();
    (r.success, r.observation, next)
}

const GOAL: &str = "(and (on salmon kitchentable) (is_heated salmon) (not (is_open fridge_305)))";

const SALMON_SEQUENCE: &[(&str, &[&str])] = &[
    ("open", &["fridge_305"]),
    ("grab", &["salmon"]),
    ("close", &["fridge_305"]),
    ("put_in", &["salmon", "microwave"]),
    ("heat", &["salmon"]),
    ("grab", &["salmon"]),
    ("put_on", &["salmon", "kitchentable"]),
];

#[test]
fn open_fridge() {
    let w = kitchen();
    assert!(!w.entity("fridge_305").unwrap().flag("is_open"));
    let (ok, obs, next) = run(&w, "open", &["fridge_305"]);
    assert!(ok, "{obs}");
    assert!(next.entity("fridge_305").unwrap().flag("is_open"));
}

#[test]
fn grab_with_full_hands_fails_without_change() {
    let w = kitchen();
    let (_, _, w) = run(&w, "grab", &["pie"]);
    let (_, _, w) = run(&w, "grab", &["plate"]);
    assert_eq!(w.hands(), [Some("pie"), Some("plate")]);
    let (_, _, w) = run(&w, "open", &["fridge_305"]);
    let (ok, obs, next) = run(&w, "grab", &["salmon"]);
    assert!(!ok);
    assert!(obs.contains("both hands are full"), "{obs}");
    assert_eq!(next, w);
}

#[test]
fn heat_inside_microwave() {
    let mut w = kitchen();
    for (skill, args) in &SALMON_SEQUENCE[..4] {
        let (ok, obs, next) = run(&w, skill, args);
        assert!(ok, "{skill}: {obs}");
        w = next;
    }
    let (ok, _, next) = run(&w, "heat", &["salmon"]);
    assert!(ok);
    assert!(next.entity("salmon").unwrap().flag("is_heated"));
}

#[test]
fn heat_outside_a_heater_fails() {
    let (ok, obs, _) = run(&kitchen(), "heat", &["pie"]);
    assert!(!ok);
    assert!(obs.contains("inside a heater"), "{obs}");
}

#[test]
fn unknown_entity_and_skill_are_errors() {
    let w = kitchen();
    assert_eq!(
        w.apply_skill("grab", &["unicorn".to_string()]).unwrap_err(),
        WorldError::UnknownEntity("unicorn".into())
    );
    assert!(matches!(
        w.apply_skill("fly", &[]),
        Err(WorldError::UnknownSkill(_))
    ));
    assert!(matches!(
        w.apply_skill("put_on", &["pie".to_string()]),
        Err(WorldError::Arity { .. })
    ));
}

#[test]
fn closed_container_blocks_access() {
    let (ok, obs, _) = run(&kitchen(), "grab", &["salmon"]);
    assert!(!ok);
    assert!(obs.contains("closed"), "{obs}");
}

#[test]
fn interaction_requires_same_room() {
    let w = kitchen();
    let (ok, obs, _) = run(&w, "grab", &["book"]);
    assert!(!ok, "{obs}");
    let (ok, _, far) = run(&w, "walk_to", &["bedroom"]);
    assert!(!ok, "bedroom is two rooms away");
    assert_eq!(far, w);
    let (ok, _, w) = run(&w, "walk_to", &["sofa"]);
    assert!(ok);
    assert_eq!(w.agent.room, "livingroom");
    let (ok, _, w) = run(&w, "grab", &["book"]);
    assert!(ok);
    assert_eq!(w.room_of("book"), Some("livingroom"));
}

#[test]
fn kitchen_description() {
    let w = kitchen();
    let text = w.describe_state(false);
    for needle in [
        "fridge_305 (fridge): in the kitchen, closed.",
        "salmon (food): inside fridge_305.",
        "pie (food): on kitchentable.",
        "kitchentable (table): in the kitchen.",
        "book (book): on sofa.",
    ] {
        assert!(text.contains(needle), "missing {needle:?} in\n{text}");
    }
    assert_eq!(text, w.describe_state(false));
    let here = w.describe_state(true);
    assert!(here.contains("salmon") && !here.contains("book"), "{here}");
}

#[test]
fn empty_world_has_nothing() {
    let w = WorldState::from_json(r#"{"rooms": [{"name": "void"}], "agent": {"room": "void"}}"#)
        .unwrap();
    assert_eq!(w.describe_state(true), "Nothing here.");
    assert_eq!(w.describe_state(false), "Nothing here.");
}

#[test]
fn scripted_sequence_reaches_goal() {
    let goal = parse_expr(GOAL).unwrap();
    let mut w = kitchen();
    assert!(!w.check_goal(&goal).unwrap());
    for (skill, args) in SALMON_SEQUENCE {
        let (ok, obs, next) = run(&w, skill, args);
        assert!(ok, "{skill}: {obs}");
        w = next;
    }
    assert!(w.check_goal(&goal).unwrap());
    assert!(w.check_goal(&parse_expr("(and)").unwrap()).unwrap());
    assert!(kitchen().check_goal(&parse_expr("(and)").unwrap()).unwrap());
}

#[test]
fn invalid_fixtures_are_rejected() {
    let cases = [
        r#"{"rooms": [], "agent": {"room": "kitchen"}}"#,
        r#"{"rooms": [{"name": "k"}], "agent": {"room": "k"},
            "entities": [{"id": "a", "class": "x", "location": {"on": "b"}},
                         {"id": "b", "class": "x", "location": {"at": "k"}}]}"#,
        r#"{"rooms": [{"name": "k"}], "agent": {"room": "k"},
            "entities": [{"id": "a", "class": "x", "location": {"held": 0}},
                         {"id": "b", "class": "x", "location": {"held": 0}}]}"#,
        r#"{"rooms": [{"name": "k"}], "agent": {"room": "k"},
            "entities": [{"id": "a", "class": "x", "traits": ["container"], "location": {"in": "b"}},
                         {"id": "b", "class": "x", "traits": ["container"], "location": {"in": "a"}}]}"#,
    ];
    for c in cases {
        assert!(
            matches!(WorldState::from_json(c), Err(WorldError::Invalid(_))),
            "{c}"
        );
    }
}

/// What each skill may change: the agent's room or named properties of its
/// first argument.
fn allowed_changes(skill: &str) -> (&'static [&'static str], bool) {
    match skill {
        "walk_to" => (&[], true),
        "open" | "close" => (&["is_open"], false),
        "grab" | "put_on" | "put_in" => (&["location"], false),
        "heat" => (&["is_heated"], false),
        _ => unreachable!(),
    }
}

fn diff(a: &WorldState, b: &WorldState) -> Vec<(String, String)> {
    let mut out = Vec::new();
    if a.agent != b.agent {
        out.push(("agent".to_string(), "room".to_string()));
    }
    assert_eq!(a.rooms, b.rooms);
    assert_eq!(a.entities.len(), b.entities.len());
    for (x, y) in a.entities.iter().zip(&b.entities) {
        assert_eq!((&x.id, &x.class, &x.traits), (&y.id, &y.class, &y.traits));
        if x.location != y.location {
            out.push((x.id.clone(), "location".to_string()));
        }
        let keys: std::collections::BTreeSet<&String> =
            x.properties.keys().chain(y.properties.keys()).collect();
        for k in keys {
            if x.flag(k) != y.flag(k) {
                out.push((x.id.clone(), k.clone()));
            }
        }
    }
    out
}

fn targets(w: &WorldState) -> Vec<String> {
    let mut t: Vec<String> = w.entities.iter().map(|e| e.id.clone()).collect();
    t.extend(w.rooms.iter().map(|r| r.name.clone()));
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn skills_only_touch_their_frame(steps in proptest::collection::vec((0usize..SKILLS.len(), 0usize..64, 0usize..64), 1..40)) {
        let mut w = kitchen();
        let names = targets(&w);
        for (s, a, b) in steps {
            let skill = SKILLS[s];
            let args: Vec<String> = if matches!(skill, "put_on" | "put_in") {
                vec![names[a % names.len()].clone(), names[b % names.len()].clone()]
            } else {
                vec![names[a % names.len()].clone()]
            };
            let Ok((result, next)) = w.apply_skill(skill, &args) else { continue };
            let changes = diff(&w, &next);
            if !result.success {
                prop_assert!(changes.is_empty());
                prop_assert!(result.delta.is_empty());
                prop_assert_eq!(&next, &w);
                continue;
            }
            let (props, agent) = allowed_changes(skill);
            for (who, what) in &changes {
                if who == "agent" {
                    prop_assert!(agent, "{} moved the agent", skill);
                } else {
                    prop_assert_eq!(who, &args[0]);
                    prop_assert!(props.contains(&what.as_str()), "{} changed {}.{}", skill, who, what);
                }
            }
            prop_assert_eq!(changes.len(), result.delta.len());
            prop_assert!(next.check().is_ok());
            // determinism
            prop_assert_eq!(w.apply_skill(skill, &args).unwrap(), (result, next.clone()));
            w = next;
        }
    }

    #[test]
    fn open_close_and_grab_put_on_are_inverses(steps in proptest::collection::vec((0usize..SKILLS.len(), 0usize..64, 0usize..64), 0..20), pick in 0usize..64) {
        let mut w = kitchen();
        let names = targets(&w);
        for (s, a, b) in steps {
            let skill = SKILLS[s];
            let args = if matches!(skill, "put_on" | "put_in") {
                vec![names[a % names.len()].clone(), names[b % names.len()].clone()]
            } else {
                vec![names[a % names.len()].clone()]
            };
            if let Ok((_, next)) = w.apply_skill(skill, &args) {
                w = next;
            }
        }
        let x = names[pick % names.len()].clone();
        if let Ok((r, opened)) = w.apply_skill("open", std::slice::from_ref(&x)) {
            if r.success {
                let (r2, closed) = opened.apply_skill("close", std::slice::from_ref(&x)).unwrap();
                prop_assert!(r2.success);
                prop_assert_eq!(&closed, &w);
            }
        }
        if let Some(Placement::On(surface)) = w.entity(&x).map(|e| e.location.clone()) {
            let (r, grabbed) = w.apply_skill("grab", std::slice::from_ref(&x)).unwrap();
            if r.success {
                let (r2, back) = grabbed.apply_skill("put_on", &[x.clone(), surface]).unwrap();
                prop_assert!(r2.success, "{}", r2.observation);
                prop_assert_eq!(&back, &w);
            }
        }
    }
}
