use serde_json::json;

use super::*;

fn fluent_tool() -> ToolSchema {
    ToolSchema::new(
        "missing_or_incorrect_fluent",
        "Report a fluent the domain lacks.",
    )
    .string("fluent_name", "Name of the fluent.")
    .string(
        "fluent_description",
        "What the fluent means and its parameters.",
    )
}

fn request(agent: &str, user: &str) -> ChatRequest {
    let tools = ToolRegistry::from_tools([fluent_tool()]).unwrap();
    ChatRequest::new(
        agent,
        "test-model",
        vec![
            AgentMessage::system("You generate goals."),
            AgentMessage::user(user),
        ],
        &tools,
    )
}

fn color_call() -> ToolCall {
    ToolCall::new(
        "call_1",
        "missing_or_incorrect_fluent",
        &[
            ("fluent_name", json!("color")),
            (
                "fluent_description",
                json!("color(?b - block, ?c) holds when block ?b has color ?c"),
            ),
        ],
    )
}

fn recorded_fixture() -> Transcript {
    let mut script = Script::default();
    script.push("goal", ScriptedReply::calls("", vec![color_call()]));
    let gw = Gateway::new(ScriptedBackend::new(script)).recording();
    gw.chat(&request("goal", "Put the blue block on the red block."))
        .unwrap();
    gw.transcript().unwrap()
}

#[test]
fn replay_echoes_the_recorded_tool_call() {
    let gw = Gateway::new(ReplayBackend::new(recorded_fixture()));
    let reply = gw
        .chat(&request("goal", "Put the blue block on the red block."))
        .unwrap();
    assert_eq!(reply.calls, vec![CheckedCall::Valid(color_call())]);
    assert_eq!(reply.message.tool_calls, vec![color_call()]);
}

#[test]
fn diverging_request_names_the_position() {
    let gw = Gateway::new(ReplayBackend::new(recorded_fixture()));
    let mut req = request("goal", "Put the blue block on the red block.");
    req.messages.push(AgentMessage::user("Also be quick."));
    let err = gw.chat(&req).unwrap_err();
    match &err {
        GatewayError::FingerprintMismatch {
            position, agent, ..
        } => {
            assert_eq!(*position, 0);
            assert_eq!(agent, "goal");
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(err.to_string().contains("position 0"));
}

#[test]
fn exhausted_transcript_is_an_error() {
    let gw = Gateway::new(ReplayBackend::new(recorded_fixture()));
    let req = request("goal", "Put the blue block on the red block.");
    gw.chat(&req).unwrap();
    assert!(matches!(
        gw.chat(&req),
        Err(GatewayError::TranscriptExhausted(1))
    ));
}

#[test]
fn fingerprint_ignores_model_temperature_and_agent() {
    let a = request("goal", "x");
    let mut b = request("init", "x");
    b.model = "other".into();
    b.temperature = 1.0;
    assert_eq!(fingerprint(&a), fingerprint(&b));
    assert_ne!(fingerprint(&a), fingerprint(&request("goal", "y")));
    assert_eq!(fingerprint(&a).len(), 64);
}

#[test]
fn missing_required_argument_is_surfaced_not_dropped() {
    let bad = ToolCall::new(
        "call_2",
        "missing_or_incorrect_fluent",
        &[("fluent_description", json!("color of a block"))],
    );
    let mut script = Script::default();
    script.push(
        "goal",
        ScriptedReply::calls("", vec![bad.clone(), color_call()]),
    );
    let gw = Gateway::new(ScriptedBackend::new(script));
    let reply = gw.chat(&request("goal", "x")).unwrap();
    assert_eq!(reply.calls.len(), 2);
    match &reply.calls[0] {
        CheckedCall::Invalid { call, error } => {
            assert_eq!(call, &bad);
            assert!(error.to_string().contains("fluent_name"), "{error}");
        }
        other => panic!("expected invalid, got {other:?}"),
    }
    assert_eq!(reply.calls[1], CheckedCall::Valid(color_call()));
}

#[test]
fn unknown_tool_and_wrong_types_are_invalid() {
    let tools = ToolRegistry::from_tools([fluent_tool()]).unwrap();
    let unknown = ToolCall::new("c", "teleport", &[]);
    assert!(matches!(
        tools.validate(&unknown),
        Err(ToolError::Unknown(_))
    ));
    let typed = ToolCall::new(
        "c",
        "missing_or_incorrect_fluent",
        &[
            ("fluent_name", json!(3)),
            ("fluent_description", json!("d")),
            ("extra", json!(1)),
        ],
    );
    let err = tools.validate(&typed).unwrap_err().to_string();
    assert!(
        err.contains("fluent_name") && err.contains("extra"),
        "{err}"
    );
}

#[test]
fn duplicate_tool_registration_fails() {
    assert!(matches!(
        ToolRegistry::from_tools([fluent_tool(), fluent_tool()]),
        Err(ToolError::Duplicate(_))
    ));
}

#[test]
fn request_invariants_are_enforced() {
    let gw = Gateway::new(ScriptedBackend::new(Script::default()));
    let mut req = request("goal", "x");
    req.temperature = 2.5;
    assert!(matches!(
        gw.chat(&req),
        Err(GatewayError::InvalidRequest(_))
    ));

    let mut req = request("goal", "x");
    req.messages.remove(0);
    assert!(matches!(
        gw.chat(&req),
        Err(GatewayError::InvalidRequest(_))
    ));

    let mut req = request("goal", "x");
    req.messages.push(AgentMessage::tool_result("nope", "ok"));
    assert!(matches!(
        gw.chat(&req),
        Err(GatewayError::InvalidRequest(_))
    ));
    assert_eq!(gw.calls(), 0);
}

#[test]
fn ceiling_fails_closed() {
    let mut script = Script::default();
    script
        .fallback
        .insert("goal".into(), ScriptedReply::text("ok"));
    let gw = Gateway::new(ScriptedBackend::new(script)).with_ceiling(2);
    let req = request("goal", "x");
    gw.chat(&req).unwrap();
    gw.chat(&req).unwrap();
    assert!(matches!(gw.chat(&req), Err(GatewayError::CallCeiling(2))));
    assert_eq!(gw.calls(), 2);
}

#[test]
fn scripted_backend_routes_per_agent_and_reports_exhaustion() {
    let mut script = Script::default();
    script.push("domain", ScriptedReply::text("d1"));
    script.push("goal", ScriptedReply::text("g1"));
    let backend = ScriptedBackend::new(script);
    assert_eq!(backend.chat(&request("goal", "x")).unwrap().content, "g1");
    assert_eq!(backend.unused(), [("domain".to_string(), 1)].into());
    assert!(matches!(
        backend.chat(&request("goal", "x")),
        Err(GatewayError::ScriptExhausted(a)) if a == "goal"
    ));
}

#[test]
fn structured_scripted_content_is_sent_as_json_text() {
    let reply: ScriptedReply =
        serde_json::from_value(json!({"content": {"goal": "(on b1 b2)"}})).unwrap();
    assert_eq!(reply.to_message().content, r#"{"goal":"(on b1 b2)"}"#);
}

#[test]
fn transcript_round_trips_through_json() {
    let mut t = recorded_fixture();
    t.answers.push(AnswerRecord {
        question: "What is the color of block b1?".into(),
        answer: "red".into(),
    });
    let back = Transcript::from_json(&t.to_json()).unwrap();
    assert_eq!(back, t);
}

#[test]
fn wire_format_round_trip() {
    let req = request("goal", "x");
    let body = wire_request(&req, &[("top_p".to_string(), json!(1.0))].into());
    assert_eq!(body["temperature"], json!(0.0));
    assert_eq!(body["top_p"], json!(1.0));
    assert_eq!(
        body["tools"][0]["function"]["name"],
        json!("missing_or_incorrect_fluent")
    );
    assert_eq!(
        body["tools"][0]["function"]["parameters"]["required"],
        json!(["fluent_name", "fluent_description"])
    );

    let response = json!({"choices": [{"message": {
        "role": "assistant",
        "content": null,
        "tool_calls": [
            {"id": "call_1", "type": "function", "function": {
                "name": "missing_or_incorrect_fluent",
                "arguments": "{\"fluent_name\":\"color\",\"fluent_description\":\"color(?b - block, ?c) holds when block ?b has color ?c\"}"
            }},
            {"id": "call_2", "type": "function", "function": {"name": "ask_user", "arguments": "not json"}}
        ]
    }}]});
    let msg = parse_wire_response(&response).unwrap();
    assert_eq!(msg.tool_calls[0], color_call());
    assert_eq!(msg.tool_calls[1].arg("_raw").as_deref(), Some("not json"));
}

#[test]
fn hashed_bow_cosines() {
    let e = HashedBow::default();
    let a = e.embed("append a goal to close the fridge").unwrap();
    assert_eq!(cosine(&a, &a), 1.0);

    let x = e.embed("alpha beta").unwrap();
    let y = e.embed("gamma delta").unwrap();
    let buckets: std::collections::BTreeSet<usize> = ["alpha", "beta", "gamma", "delta"]
        .iter()
        .map(|t| e.bucket(t))
        .collect();
    assert_eq!(buckets.len(), 4, "test strings must not collide");
    assert_eq!(cosine(&x, &y), 0.0);

    // Oracle: token counts over a plain map, then exact cosine on the
    // shared bucket "fridge".
    let p = e.embed("close the fridge goal").unwrap();
    let q = e.embed("fridge task").unwrap();
    let s = cosine(&p, &q);
    let words_p = ["close", "the", "fridge", "goal"];
    let words_q = ["fridge", "task"];
    let bp: Vec<usize> = words_p.iter().map(|t| e.bucket(t)).collect();
    let bq: Vec<usize> = words_q.iter().map(|t| e.bucket(t)).collect();
    let distinct = |b: &[usize]| b.iter().collect::<std::collections::BTreeSet<_>>().len();
    assert_eq!(distinct(&bp), 4);
    assert_eq!(distinct(&bq), 2);
    let dot = bp.iter().filter(|b| bq.contains(b)).count() as f64;
    assert_eq!(dot, 1.0);
    assert!(s > 0.0);
    assert!((s - dot / (4.0f64 * 2.0).sqrt()).abs() < 1e-15);

    assert_eq!(cosine(&vec![0.0; 256], &a), 0.0);
    assert_eq!(e.embed("Fridge").unwrap(), e.embed("fridge").unwrap());
    assert_eq!(e.id(), "hashed-bow-256");
}

#[test]
fn replay_embedder_serves_recorded_vectors() {
    let e = ReplayEmbedder::new(
        "live-x",
        2,
        &[EmbeddingRecord {
            text: "a".into(),
            vector: vec![1.0, 0.0],
        }],
    );
    assert_eq!(e.embed("a").unwrap(), vec![1.0, 0.0]);
    assert!(matches!(e.embed("b"), Err(GatewayError::Embedding(_))));
}

#[test]
fn recorder_keeps_answers_and_embeddings() {
    let gw = Gateway::new(ScriptedBackend::new(Script::default())).recording();
    gw.record_answer("q", "a");
    gw.record_embedding("t", &[1.0]);
    let t = gw.transcript().unwrap();
    assert_eq!(t.answers.len(), 1);
    assert_eq!(t.embeddings.len(), 1);
    assert!(Gateway::new(ScriptedBackend::new(Script::default()))
        .transcript()
        .is_none());
}
