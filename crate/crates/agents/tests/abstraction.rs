//! Plan translation on a bundled benchmark domain.

use adaplan_agents::abstraction::{
    translate_plan, AbstractionConfig, TranslationMethod, ABSTRACTION_AGENT,
};
use adaplan_agents::gateway::{Gateway, Script, ScriptedBackend, ScriptedReply};
use adaplan_core::pddl::{parse_domain, parse_plan};

const TERMES: &str = include_str!("../../../data/benchmarks/termes/domain.pddl");

#[test]
fn elided_height_is_recoverable_from_the_source_step() {
    let domain = parse_domain(TERMES).unwrap();
    let plan = parse_plan("move(pos-0-1, pos-0-2, h0)\nmove(pos-0-2, pos-0-3, h0)\n").unwrap();
    let mut script = Script::default();
    script.push(
        ABSTRACTION_AGENT,
        ScriptedReply::text(
            "1. Move from position pos-0-1 to position pos-0-2.\n2. Move from position pos-0-2 to position pos-0-3.",
        ),
    );
    let gw = Gateway::new(ScriptedBackend::new(script));
    let list = translate_plan(&plan, &domain, Some(&gw), &AbstractionConfig::default());
    assert_eq!(list.method, TranslationMethod::Llm);
    let first = &list.instructions[0];
    assert_eq!(
        first.text,
        "Move from position pos-0-1 to position pos-0-2."
    );
    assert!(!first.text.contains("h0"));
    assert_eq!(first.step.args, ["pos-0-1", "pos-0-2", "h0"]);
    assert!(!first.unknown);

    // The template never elides.
    let plain = translate_plan(&plan, &domain, None, &AbstractionConfig::default());
    assert_eq!(plain.instructions[0].text, "Move pos-0-1 pos-0-2 h0.");
}
