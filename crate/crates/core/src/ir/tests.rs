use proptest::prelude::*;

use super::*;
use crate::number::Number;
use crate::pddl::{parse_domain, parse_expr, parse_problem};

const BLOCKS: &str = "(define (domain blocksworld)
  (:requirements :strips :typing)
  (:types block)
  (:predicates (on ?b1 ?b2 - block) (ontable ?b - block) (clear ?b - block)
               (holding ?b - block) (handempty))
  (:action pick-up :parameters (?b - block)
    :precondition (and (clear ?b) (ontable ?b) (handempty))
    :effect (and (not (ontable ?b)) (not (clear ?b)) (not (handempty)) (holding ?b)))
  (:action stack :parameters (?b1 ?b2 - block)
    :precondition (and (holding ?b1) (clear ?b2))
    :effect (and (not (holding ?b1)) (not (clear ?b2)) (clear ?b1) (handempty) (on ?b1 ?b2))))";

fn blocks() -> DomainModel {
    parse_domain(BLOCKS).unwrap()
}

fn three_blocks() -> ProblemInstance {
    parse_problem(
        "(define (problem three) (:domain blocksworld)
           (:objects b1 b2 b3 - block)
           (:init (ontable b1) (ontable b2) (ontable b3) (clear b1) (clear b2) (clear b3) (handempty))
           (:goal (and (on b1 b2) (on b2 b3))))",
        &blocks(),
    )
    .unwrap()
}

fn edit(kind: EditKind) -> DomainEdit {
    DomainEdit::new(kind, "test")
}

fn block_param(name: &str) -> Vec<Param> {
    vec![Param::new(name, "block")]
}

#[test]
fn three_block_instance_is_valid() {
    assert!(validate(&three_blocks()).is_valid());
}

#[test]
fn undeclared_goal_fluent_is_reported_once() {
    let mut p = three_blocks();
    p.goal = parse_expr("(and (color b1) (on b1 b2))").unwrap();
    let report = validate(&p);
    assert_eq!(report.violations.len(), 1, "{report}");
    assert_eq!(report.violations[0].code, ViolationCode::UnknownFluent);
    assert_eq!(report.violations[0].code.as_str(), "unknown-fluent");
}

#[test]
fn empty_domain_and_goal_is_valid() {
    let p = ProblemInstance {
        name: "empty".into(),
        domain: DomainModel::new("empty"),
        objects: vec![],
        init: Assignment::default(),
        goal: Expr::And(vec![]),
    };
    assert!(validate(&p).is_valid());
}

#[test]
fn injected_violations_are_detected() {
    type Inject = fn(&mut ProblemInstance);
    let cases: Vec<(ViolationCode, Inject)> = vec![
        (ViolationCode::UnknownType, |p| {
            p.objects.push(ObjectDecl::new("x", "ghost"))
        }),
        (ViolationCode::DuplicateType, |p| {
            p.domain.types.push(TypeDecl::new("block", None))
        }),
        (ViolationCode::TypeCycle, |p| {
            p.domain.types = vec![
                TypeDecl::new("block", Some("tower")),
                TypeDecl::new("tower", Some("block")),
            ];
        }),
        (ViolationCode::DuplicateFluent, |p| {
            p.domain
                .fluents
                .push(FluentDecl::boolean("handempty", vec![]));
        }),
        (ViolationCode::DuplicateParameter, |p| {
            p.domain.fluents.push(FluentDecl::boolean(
                "near",
                vec![Param::new("a", "block"), Param::new("a", "block")],
            ));
        }),
        (ViolationCode::DuplicateAction, |p| {
            let a = p.domain.actions[0].clone();
            p.domain.actions.push(a);
        }),
        (ViolationCode::DuplicateObject, |p| {
            p.objects.push(ObjectDecl::new("b1", "block"))
        }),
        (ViolationCode::UnknownFluent, |p| {
            p.goal = Expr::atom("color", &["b1"])
        }),
        (ViolationCode::UnknownObject, |p| {
            p.goal = Expr::atom("clear", &["b9"])
        }),
        (ViolationCode::ArityMismatch, |p| {
            p.goal = Expr::atom("on", &["b1"])
        }),
        (ViolationCode::ArgumentTypeMismatch, |p| {
            p.domain.types.push(TypeDecl::new("table", None));
            p.objects.push(ObjectDecl::new("t", "table"));
            p.goal = Expr::atom("clear", &["t"]);
        }),
        (ViolationCode::KindMismatch, |p| {
            p.domain
                .fluents
                .push(FluentDecl::numeric("size", block_param("b")));
            p.domain.requirements.numeric_fluents = true;
            p.init
                .numeric
                .insert(GroundAtom::new("size", &["b1"]), Number::from_int(1));
            p.goal = Expr::atom("size", &["b1"]);
        }),
        (ViolationCode::UnboundVariable, |p| {
            p.domain.actions[0].precondition = parse_expr("(clear ?z)").unwrap();
        }),
        (ViolationCode::ContradictoryEffects, |p| {
            p.domain.actions[0].effects =
                crate::pddl::parse_effects("(and (clear ?b) (not (clear ?b)))").unwrap();
        }),
        (ViolationCode::RequirementMismatch, |p| {
            p.domain.requirements.numeric_fluents = true
        }),
        (ViolationCode::UninitializedNumeric, |p| {
            p.domain
                .fluents
                .push(FluentDecl::numeric("size", block_param("b")));
            p.domain.requirements.numeric_fluents = true;
            p.goal = parse_expr("(> (size b1) 0)").unwrap();
        }),
    ];
    for (code, inject) in cases {
        let mut p = three_blocks();
        inject(&mut p);
        let report = validate(&p);
        assert!(report.has(code), "{code}: got {report}");
    }
}

#[test]
fn add_color_fluent_is_applied() {
    let d = blocks();
    let r = apply_edit(
        &d,
        &[],
        &edit(EditKind::AddOrModifyFluent(
            FluentDecl::boolean("color", block_param("b"))
                .with_description("whether a block is blue"),
        )),
    )
    .unwrap();
    assert_eq!(r.outcome, EditOutcome::Applied);
    assert!(r.domain.fluent("color").is_some());
    assert!(validate_domain(&r.domain).is_valid());
    // differs only by the new fluent
    let mut back = r.domain.clone();
    back.fluents.retain(|f| f.name != "color");
    assert_eq!(back, d);
}

#[test]
fn size_comparison_edit_sets_numeric_flag() {
    let d = blocks();
    let r = apply_edit(
        &d,
        &[],
        &edit(EditKind::AddOrModifyFluent(FluentDecl::numeric(
            "size",
            block_param("b"),
        ))),
    )
    .unwrap();
    assert!(r.outcome.is_applied());
    assert!(r.domain.requirements.numeric_fluents);
    let pre = parse_expr("(and (holding ?b1) (clear ?b2) (< (size ?b1) (size ?b2)))").unwrap();
    let r2 = apply_edit(
        &r.domain,
        &[],
        &edit(EditKind::ModifyAction {
            action: "stack".into(),
            precondition: Some(pre.clone()),
            effects: None,
        }),
    )
    .unwrap();
    assert!(r2.outcome.is_applied(), "{:?}", r2.outcome);
    assert_eq!(r2.domain.action("stack").unwrap().precondition, pre);
    assert!(r2.domain.requirements.numeric_fluents);
    assert!(validate_domain(&r2.domain).is_valid());
}

#[test]
fn duplicate_fluent_is_rejected_unchanged() {
    let d = blocks();
    let same = FluentDecl::boolean("clear", vec![Param::new("x", "block")]);
    let r = apply_edit(&d, &[], &edit(EditKind::AddOrModifyFluent(same))).unwrap();
    match &r.outcome {
        EditOutcome::Rejected(reason) => assert!(reason.starts_with("duplicate"), "{reason}"),
        other => panic!("{other:?}"),
    }
    assert_eq!(r.domain, d);

    let conflicting = FluentDecl::numeric("clear", block_param("b"));
    let r = apply_edit(&d, &[], &edit(EditKind::AddOrModifyFluent(conflicting))).unwrap();
    match &r.outcome {
        EditOutcome::Rejected(reason) => assert!(reason.starts_with("type conflict"), "{reason}"),
        other => panic!("{other:?}"),
    }
    assert_eq!(r.domain, d);
}

#[test]
fn unknown_action_is_rejected() {
    let d = blocks();
    let r = apply_edit(
        &d,
        &[],
        &edit(EditKind::ModifyAction {
            action: "fly".into(),
            precondition: Some(Expr::truth()),
            effects: None,
        }),
    )
    .unwrap();
    assert!(matches!(r.outcome, EditOutcome::Rejected(ref s) if s.contains("unknown action")));
    assert_eq!(r.domain, d);
}

#[test]
fn unbound_replacement_variable_is_an_error() {
    let d = blocks();
    let err = apply_edit(
        &d,
        &[],
        &edit(EditKind::ModifyAction {
            action: "stack".into(),
            precondition: Some(parse_expr("(clear ?b3)").unwrap()),
            effects: None,
        }),
    )
    .unwrap_err();
    assert!(
        matches!(err, EditError::Malformed(ref m) if m.contains("?b3")),
        "{err}"
    );
}

#[test]
fn missing_provenance_is_an_error() {
    let e = DomainEdit::new(
        EditKind::AddObjects(vec![ObjectDecl::new("b4", "block")]),
        " ",
    );
    assert_eq!(
        apply_edit(&blocks(), &[], &e).unwrap_err(),
        EditError::MissingProvenance
    );
}

#[test]
fn add_objects_checks_names_and_types() {
    let d = blocks();
    let objs = vec![ObjectDecl::new("b1", "block")];
    let ok = apply_edit(
        &d,
        &objs,
        &edit(EditKind::AddObjects(vec![ObjectDecl::new("b2", "block")])),
    )
    .unwrap();
    assert!(ok.outcome.is_applied());
    assert_eq!(ok.objects.len(), 2);
    let dup = apply_edit(
        &d,
        &objs,
        &edit(EditKind::AddObjects(vec![ObjectDecl::new("b1", "block")])),
    )
    .unwrap();
    assert!(!dup.outcome.is_applied());
    assert_eq!(dup.objects, objs);
    let bad = apply_edit(
        &d,
        &objs,
        &edit(EditKind::AddObjects(vec![ObjectDecl::new("t", "table")])),
    )
    .unwrap();
    assert!(matches!(bad.outcome, EditOutcome::Rejected(ref s) if s.starts_with("type conflict")));
}

#[test]
fn ground_atoms_enumerates_in_order() {
    let d = blocks();
    let objects = vec![
        ObjectDecl::new("b2", "block"),
        ObjectDecl::new("b1", "block"),
    ];
    let atoms = ground_atoms(&d, &objects);
    let on: Vec<String> = atoms
        .boolean
        .iter()
        .filter(|a| a.fluent == "on")
        .map(ToString::to_string)
        .collect();
    assert_eq!(on, ["(on b1 b1)", "(on b1 b2)", "(on b2 b1)", "(on b2 b2)"]);
    let names: Vec<&str> = atoms.boolean.iter().map(|a| a.fluent.as_str()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn ground_atoms_with_no_objects_of_type() {
    let d = blocks();
    let atoms = ground_atoms(&d, &[]);
    assert_eq!(
        atoms.boolean,
        vec![GroundAtom::new::<&str>("handempty", &[])]
    );
}

#[test]
fn ground_atoms_respects_parameter_types() {
    let mut d = DomainModel::new("robots");
    d.types = vec![TypeDecl::new("robot", None), TypeDecl::new("place", None)];
    d.fluents = vec![FluentDecl::boolean(
        "at",
        vec![Param::new("r", "robot"), Param::new("p", "place")],
    )];
    let objects = vec![
        ObjectDecl::new("r1", "robot"),
        ObjectDecl::new("kitchen", "place"),
        ObjectDecl::new("hall", "place"),
    ];
    let atoms = ground_atoms(&d, &objects);
    let text: Vec<String> = atoms.boolean.iter().map(ToString::to_string).collect();
    assert_eq!(text, ["(at r1 hall)", "(at r1 kitchen)"]);
}

fn fluent_strategy() -> impl Strategy<Value = FluentDecl> {
    ("[a-z]{1,6}", 0usize..3, any::<bool>()).prop_map(|(name, arity, numeric)| {
        let params = (0..arity)
            .map(|i| Param::new(&format!("x{i}"), "block"))
            .collect();
        if numeric {
            FluentDecl::numeric(&format!("f-{name}"), params)
        } else {
            FluentDecl::boolean(&format!("f-{name}"), params)
        }
    })
}

proptest! {
    #[test]
    fn independent_fluent_edits_commute(a in fluent_strategy(), b in fluent_strategy()) {
        prop_assume!(a.name != b.name);
        let d = blocks();
        let ea = edit(EditKind::AddOrModifyFluent(a));
        let eb = edit(EditKind::AddOrModifyFluent(b));
        let ab = apply_edit(&apply_edit(&d, &[], &ea).unwrap().domain, &[], &eb).unwrap().domain;
        let ba = apply_edit(&apply_edit(&d, &[], &eb).unwrap().domain, &[], &ea).unwrap().domain;
        let mut ab_sorted = ab.clone();
        let mut ba_sorted = ba.clone();
        ab_sorted.fluents.sort();
        ba_sorted.fluents.sort();
        prop_assert_eq!(ab_sorted, ba_sorted);
        prop_assert_eq!(ab.requirements, ba.requirements);
    }

    #[test]
    fn rejected_or_failed_edits_are_atomic(name in "[a-z]{1,6}", numeric in any::<bool>(), action in "[a-z-]{1,8}") {
        let d = blocks();
        let objs = vec![ObjectDecl::new("b1", "block")];
        let edits = [
            edit(EditKind::AddOrModifyFluent(if numeric {
                FluentDecl::numeric("on", block_param(&name))
            } else {
                FluentDecl::boolean("clear", block_param(&name))
            })),
            edit(EditKind::ModifyAction { action: action.clone(), precondition: Some(Expr::atom("handempty", &[])), effects: None }),
            edit(EditKind::ModifyAction {
                action: "stack".into(),
                precondition: Some(Expr::Atom(FluentApp::new("clear", vec![Arg::Var(name.clone())]))),
                effects: None,
            }),
        ];
        for e in &edits {
            match apply_edit(&d, &objs, e) {
                Ok(r) if !r.outcome.is_applied() => {
                    prop_assert_eq!(&r.domain, &d);
                    prop_assert_eq!(&r.objects, &objs);
                }
                Ok(r) => prop_assert!(validate_domain(&r.domain).is_valid()),
                Err(_) => {}
            }
        }
    }

    #[test]
    fn ground_atoms_type_check(n in 0usize..4, m in 0usize..3) {
        let mut d = blocks();
        d.types.push(TypeDecl::new("table", None));
        d.fluents.push(FluentDecl::boolean("under", vec![Param::new("t", "table"), Param::new("b", "block")]));
        let mut objects: Vec<ObjectDecl> = (0..n).map(|i| ObjectDecl::new(&format!("b{i}"), "block")).collect();
        objects.extend((0..m).map(|i| ObjectDecl::new(&format!("t{i}"), "table")));
        let atoms = ground_atoms(&d, &objects);
        prop_assert_eq!(atoms.boolean.len(), 1 + 3 * n + n * n + m * n);
        for atom in atoms.boolean {
            let p = ProblemInstance {
                name: "p".into(),
                domain: d.clone(),
                objects: objects.clone(),
                init: Assignment::default(),
                goal: Expr::Atom(FluentApp::ground(&atom.fluent, &atom.args)),
            };
            prop_assert!(validate(&p).is_valid(), "{}", atom);
        }
    }
}
