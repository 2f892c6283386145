mod support;

use std::sync::Arc;

use gos_core::enrich::{CommandTransport, Transport};
use gos_core::error::EnrichError;
use gos_core::workspace::load_library;
use gos_core::{
    complete_semantics, rewrite_query, validate_relations, ProviderEndpoint, ProviderKind, Providers, RelationType,
    SkillRecord,
};
use proptest::prelude::*;
use serde_json::{json, Value};

#[derive(Debug)]
struct Canned(Value);

impl Transport for Canned {
    fn exchange(&self, _request: &Value) -> Result<Value, EnrichError> {
        Ok(self.0.clone())
    }
}

#[derive(Debug)]
struct Down;

impl Transport for Down {
    fn exchange(&self, _request: &Value) -> Result<Value, EnrichError> {
        Err(EnrichError::ProviderUnavailable("offline".into()))
    }
}

fn endpoint(kind: ProviderKind, v: Value) -> ProviderEndpoint {
    ProviderEndpoint::external(kind, Arc::new(Canned(v)))
}

fn arb_json() -> impl Strategy<Value = Value> {
    let leaf = prop_oneof![
        Just(Value::Null),
        any::<bool>().prop_map(Value::from),
        any::<i32>().prop_map(Value::from),
        "[a-zA-Z ]{0,12}".prop_map(Value::from),
    ];
    leaf.prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 0..4).prop_map(Value::from),
            proptest::collection::btree_map(
                prop_oneof![
                    Just("name".to_string()),
                    Just("description".to_string()),
                    Just("inputs".to_string()),
                    Just("one_line_capability".to_string()),
                    Just("edges".to_string()),
                    "[a-z_]{1,8}",
                ],
                inner,
                0..5
            )
            .prop_map(|m| Value::Object(m.into_iter().collect())),
        ]
    })
}

fn arb_completion_response() -> impl Strategy<Value = Value> {
    let list = proptest::collection::vec("[A-Za-z ]{0,10}", 0..3);
    (
        "[A-Za-z ]{0,20}",
        "[A-Za-z .]{0,20}",
        list.clone(),
        list.clone(),
        list,
        "[A-Za-z ]{0,20}",
    )
        .prop_map(|(name, description, inputs, outputs, tags, cap)| {
            json!({
                "name": name,
                "description": description,
                "one_line_capability": cap,
                "inputs": inputs,
                "outputs": outputs,
                "domain_tags": tags,
                "edges": [{"source": "x", "target": "y", "relation": "dep"}],
            })
        })
}

fn arb_record() -> impl Strategy<Value = SkillRecord> {
    (
        "[a-z][a-z-]{0,10}",
        "[A-Za-z .]{0,40}",
        proptest::collection::vec("[a-z ]{1,10}", 0..2),
        proptest::option::of("[a-z ]{1,10}"),
    )
        .prop_map(|(name, description, inputs, cap)| SkillRecord {
            id: name.clone(),
            name,
            description,
            inputs,
            one_line_capability: cap.unwrap_or_default(),
            ..Default::default()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn name_and_description_are_immutable(
        r in arb_record(),
        response in prop_oneof![arb_json(), arb_completion_response()],
    ) {
        let out = complete_semantics(&r, &endpoint(ProviderKind::SemanticCompletion, response));
        prop_assert_eq!(&out.name, &r.name);
        prop_assert_eq!(&out.description, &r.description);
        prop_assert_eq!(&out.id, &r.id);
        if !r.inputs.is_empty() {
            prop_assert_eq!(&out.inputs, &r.inputs);
        }
        if !r.one_line_capability.trim().is_empty() {
            prop_assert_eq!(&out.one_line_capability, &r.one_line_capability);
        }
    }

    #[test]
    fn relation_proposals_stay_closed(
        pool_size in 0usize..5,
        raw in proptest::collection::vec(
            (0usize..8, 0usize..8, proptest::sample::select(vec!["dep", "wf", "sem", "alt", "bogus", "WF"])),
            0..12,
        ),
        garbage in arb_json(),
        use_garbage in any::<bool>(),
    ) {
        let names = ["src", "p0", "p1", "p2", "p3", "p4", "outsider", "stranger"];
        let source = support::bare_record("src");
        let pool: Vec<SkillRecord> = (0..pool_size).map(|i| support::bare_record(&format!("p{i}"))).collect();
        let response = if use_garbage {
            garbage
        } else {
            json!({"proposals": raw.iter().map(|(s, t, r)| json!({
                "source": names[*s], "target": names[*t], "relation": r,
            })).collect::<Vec<_>>()})
        };
        let out = validate_relations(&source, &pool, &endpoint(ProviderKind::RelationValidation, response));
        for p in &out {
            prop_assert!(matches!(p.relation, RelationType::Wf | RelationType::Sem | RelationType::Alt));
            prop_assert_eq!(&p.source, "src");
            prop_assert!(pool.iter().any(|c| c.id == p.target));
        }
        let mut pairs: Vec<_> = out.iter().map(|p| &p.target).collect();
        pairs.dedup();
        prop_assert_eq!(pairs.len(), out.len());
    }

    #[test]
    fn rewritten_keywords_cover_the_raw_query(raw in "[a-zA-Z0-9 ]{0,30}", response in arb_json()) {
        let ep = endpoint(ProviderKind::QueryRewrite, response);
        match rewrite_query(&raw, Some(&ep)) {
            Err(EnrichError::EmptyQuery) => prop_assert!(raw.trim().is_empty()),
            Err(e) => prop_assert!(false, "{e}"),
            Ok(q) => {
                let base = rewrite_query(&raw, None).unwrap();
                prop_assert!(base.keywords.iter().all(|k| q.keywords.contains(k)));
                prop_assert_eq!(q.raw, raw);
            }
        }
    }
}

#[test]
fn keyword_normalization_example() {
    let q = rewrite_query("Count pedestrians in MP4 video", None).unwrap();
    assert_eq!(q.keywords, ["count", "in", "mp4", "pedestrians", "video"]);
    assert_eq!(q.goal, "Count pedestrians in MP4 video");
    assert!(q.operations.is_empty() && q.artifacts.is_empty() && q.constraints.is_empty());
    assert!(matches!(rewrite_query(" \t", None), Err(EnrichError::EmptyQuery)));
}

#[test]
fn goal_only_rewrite_keeps_keywords() {
    let ep = endpoint(ProviderKind::QueryRewrite, json!({"goal": "detect people"}));
    let q = rewrite_query("Count pedestrians", Some(&ep)).unwrap();
    assert_eq!(q.goal, "detect people");
    assert_eq!(q.keywords, ["count", "pedestrians"]);
}

#[test]
fn unavailable_provider_falls_back() {
    let mut r = support::bare_record("clip");
    r.description = "Cut video clips. Uses ffmpeg.".into();
    let ep = ProviderEndpoint::external(ProviderKind::SemanticCompletion, Arc::new(Down));
    let out = complete_semantics(&r, &ep);
    assert_eq!(out.one_line_capability, "Cut video clips.");
    assert_eq!(SkillRecord { one_line_capability: String::new(), ..out }, r);

    let mut a = support::bare_record("a");
    let mut b = support::bare_record("b");
    a.domain_tags = vec!["video".into()];
    b.domain_tags = vec!["video".into()];
    let ep = ProviderEndpoint::external(ProviderKind::RelationValidation, Arc::new(Down));
    let out = validate_relations(&a, &[b], &ep);
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].relation, RelationType::Sem);
    assert!(validate_relations(&a, &[], &ep).is_empty());
}

#[test]
fn subprocess_transport_round_trip() {
    let t = CommandTransport::new(r#"read line; echo '{"inputs": ["video file"], "edges": [{"source":"a","target":"b"}]}'"#);
    let ep = ProviderEndpoint::external(ProviderKind::SemanticCompletion, Arc::new(t));
    let r = support::bare_record("clip");
    let out = complete_semantics(&r, &ep);
    assert_eq!(out.inputs, ["video file"]);
    assert_eq!(out.name, "clip");

    let failing = CommandTransport::new("exit 9");
    assert!(matches!(failing.exchange(&json!({})), Err(EnrichError::ProviderUnavailable(_))));
    let noisy = CommandTransport::new("echo not-json");
    assert!(matches!(noisy.exchange(&json!({})), Err(EnrichError::SchemaViolation(_))));
}

#[test]
fn subprocess_sees_the_request_kind() {
    let echo = CommandTransport::new("cat");
    let reply = echo.exchange(&json!({"kind": "query_rewrite", "query": "x"})).unwrap();
    assert_eq!(reply["kind"], "query_rewrite");
}

#[test]
fn offline_enrichment_is_reproducible() {
    let render = || {
        let (records, skipped) = load_library(&support::sample_library(), &Providers::local());
        assert!(skipped.is_empty());
        records.iter().map(|r| serde_json::to_string(r).unwrap()).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(render(), render());
}
