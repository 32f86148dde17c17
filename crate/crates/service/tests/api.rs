use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use passguess_core::{within_tolerance, NgramStore};
use passguess_service::{read_events, router, AppState, Event, ServiceConfig};
use serde_json::{json, Value};
use tower::ServiceExt;

const PHRASE: &str = "UOIT deploys Lenovo ThinkPads for all students";

fn store() -> NgramStore {
    let mut b = NgramStore::builder();
    for (i, w) in [
        "for",
        "all",
        "students",
        "the",
        "my",
        "dog",
        "ate",
        "cat",
        "sat",
        "on",
        "mat",
        "deploys",
        "lenovo",
        "thinkpads",
        "a",
    ]
    .iter()
    .enumerate()
    {
        b.add(&[*w], 1000 - i as u64).unwrap();
    }
    b.add(&["cat", "sat", "on"], 5).unwrap();
    b.add(&["the", "cat", "sat"], 500).unwrap();
    b.build()
}

fn app(dir: &std::path::Path, expose_cue: bool) -> (Router, AppState) {
    let mut cfg = ServiceConfig::new(dir);
    cfg.expose_cue = expose_cue;
    let state = AppState::open(store(), cfg).unwrap();
    (router(state.clone()), state)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<&str>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_owned())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, value)
}

async fn post(app: &Router, uri: &str, body: Value) -> (StatusCode, Value) {
    call(app, "POST", uri, Some(&body.to_string())).await
}

fn codes(findings: &Value) -> Vec<String> {
    findings
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["code"].as_str().unwrap().to_owned())
        .collect()
}

#[tokio::test]
async fn check_endpoint() {
    let dir = tempfile::tempdir().unwrap();
    let (app, state) = app(dir.path(), false);

    let (s, v) = post(&app, "/api/check", json!({ "passphrase": PHRASE })).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["report"]["acceptable"], true);
    assert!(v["report"]["violations"].as_array().unwrap().is_empty());
    // "uoit" has no 1-gram rank
    assert!(v["quickStrengthBits"].is_null());

    let (_, v) = post(
        &app,
        "/api/check",
        json!({ "passphrase": "one two three four five six" }),
    )
    .await;
    assert!(codes(&v["report"]["violations"]).contains(&"WORD_COUNT".to_owned()));

    let (_, v) = post(&app, "/api/check", json!({ "passphrase": "the cat sat" })).await;
    let bits = v["quickStrengthBits"].as_f64().unwrap();
    // ranks 4, 8 and 9
    assert!((bits - (4.0f64 * 8.0 * 9.0).log2()).abs() < 1e-9);

    let (s, _) = call(&app, "POST", "/api/check", Some("{not json")).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = call(&app, "POST", "/api/check", Some(r#"{"phrase":"x"}"#)).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);

    let events = read_events(&state.journal_path()).unwrap();
    assert_eq!(events.len(), 1, "check must not write");
    assert!(matches!(events[0], Event::Header { .. }));
}

#[tokio::test]
async fn account_lifecycle() {
    let dir = tempfile::tempdir().unwrap();
    let (app, _) = app(dir.path(), false);
    let create = json!({ "username": "ana", "passphrase": PHRASE, "cue": "laptop day" });

    let (s, v) = post(&app, "/api/accounts", create.clone()).await;
    assert_eq!(s, StatusCode::CREATED);
    assert_eq!(v["username"], "ana");
    let (s, _) = post(&app, "/api/accounts", create.clone()).await;
    assert_eq!(s, StatusCode::CONFLICT);

    let (s, v) = post(
        &app,
        "/api/accounts",
        json!({ "username": "bo", "passphrase": "Zed saw the cat sat on a mat", "cue": "c" }),
    )
    .await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(codes(&v["report"]["violations"]).contains(&"BLACKLISTED_NGRAM".to_owned()));
    let (s, _) = call(&app, "GET", "/api/accounts/bo/strength", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);

    let (s, _) = post(
        &app,
        "/api/accounts",
        json!({ "username": " ", "passphrase": PHRASE, "cue": "c" }),
    )
    .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);

    let mut over = create.clone();
    over["overwrite"] = json!(true);
    let (s, _) = post(&app, "/api/accounts", over).await;
    assert_eq!(s, StatusCode::CREATED);

    let (s, v) = call(&app, "GET", "/api/health", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["storeCounts"]["3"], 2);
    assert_eq!(v["accounts"], 1);
}

#[tokio::test]
async fn reset_count_increments() {
    let dir = tempfile::tempdir().unwrap();
    let (app, state) = app(dir.path(), false);
    let body = json!({ "username": "ana", "passphrase": PHRASE, "cue": "c", "overwrite": true });
    for _ in 0..3 {
        assert_eq!(
            post(&app, "/api/accounts", body.clone()).await.0,
            StatusCode::CREATED
        );
    }
    assert_eq!(state.account("ana").unwrap().reset_count, 2);
}

#[tokio::test]
async fn login_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let (app, _) = app(dir.path(), false);
    post(
        &app,
        "/api/accounts",
        json!({ "username": "ana", "passphrase": PHRASE, "cue": "c" }),
    )
    .await;

    let (s, v) = post(
        &app,
        "/api/login",
        json!({ "username": "ana", "passphrase": PHRASE }),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["accepted"], true);
    assert_eq!(v["editDistance"], 0);

    // canonical form is 46 characters long
    let typo = "uoit deploys lenovo thinkpads for all studemts";
    let (_, v) = post(
        &app,
        "/api/login",
        json!({ "username": "ana", "passphrase": typo }),
    )
    .await;
    assert_eq!(v["accepted"], true);
    assert_eq!(v["editDistance"], 1);
    assert!((v["relative"].as_f64().unwrap() - 1.0 / 46.0).abs() < 1e-12);

    let squashed = "uoitdeployslenovothinkpadsforallstudentsxyzw";
    let (_, v) = post(
        &app,
        "/api/login",
        json!({ "username": "ana", "passphrase": squashed }),
    )
    .await;
    assert_eq!(v["accepted"], false);
    assert_eq!(v["consecutiveFailures"], 1);
    let (_, v) = post(
        &app,
        "/api/login",
        json!({ "username": "ana", "passphrase": "" }),
    )
    .await;
    assert_eq!(v["accepted"], false);
    assert_eq!(v["consecutiveFailures"], 2);

    let (s, _) = post(
        &app,
        "/api/login",
        json!({ "username": "nobody", "passphrase": PHRASE }),
    )
    .await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = call(&app, "POST", "/api/login", Some("[]")).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn forty_character_phrase_typo() {
    let dir = tempfile::tempdir().unwrap();
    let (app, _) = app(dir.path(), false);
    // 40 characters once normalized
    let stored = "Uoit deploys lenovo thinkpads for all my";
    assert_eq!(stored.len(), 40);
    let (s, _) = post(
        &app,
        "/api/accounts",
        json!({ "username": "u", "passphrase": stored, "cue": "c" }),
    )
    .await;
    assert_eq!(s, StatusCode::CREATED);
    let (_, v) = post(
        &app,
        "/api/login",
        json!({ "username": "u", "passphrase": "uoit deploys lenovo thinkpads for all me" }),
    )
    .await;
    assert_eq!(v["accepted"], true);
    assert_eq!(v["relative"].as_f64().unwrap(), 0.025);
}

#[tokio::test]
async fn strength_and_cue() {
    let dir = tempfile::tempdir().unwrap();
    let (app, _) = app(dir.path(), true);
    post(
        &app,
        "/api/accounts",
        json!({ "username": "ana", "passphrase": PHRASE, "cue": "laptops" }),
    )
    .await;

    let (s, v) = call(&app, "GET", "/api/accounts/ana/strength", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["low"], "not_guessable");
    assert_eq!(v["high"], "not_guessable");
    assert_eq!(v["unfoundWords"], json!(["uoit"]));

    let (s, v) = call(&app, "GET", "/api/accounts/ana/cue", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["cue"], "laptops");

    let dir2 = tempfile::tempdir().unwrap();
    let (hidden, _) = self::app(dir2.path(), false);
    let (s, _) = call(&hidden, "GET", "/api/accounts/ana/cue", None).await;
    assert_eq!(s, StatusCode::FORBIDDEN);
}

#[tokio::test]
async fn strength_of_fully_found_phrase() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ServiceConfig::new(dir.path());
    cfg.policy.require_proper_noun = false;
    let state = AppState::open(store(), cfg).unwrap();
    let app = router(state);
    let phrase = "my dog ate for all students a";
    let (s, _) = post(
        &app,
        "/api/accounts",
        json!({ "username": "x", "passphrase": phrase, "cue": "c" }),
    )
    .await;
    assert_eq!(s, StatusCode::CREATED);
    let (_, v) = call(&app, "GET", "/api/accounts/x/strength", None).await;
    let low: u128 = v["low"].as_str().unwrap().parse().unwrap();
    let high: u128 = v["high"].as_str().unwrap().parse().unwrap();
    assert!(v["unigram"].as_str().unwrap().parse::<u128>().is_ok());
    assert!(low <= high);
    assert!(v["unfoundWords"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn journal_replay_and_restart() {
    let dir = tempfile::tempdir().unwrap();
    {
        let (app, _) = app(dir.path(), false);
        for (u, extra) in [("a", ""), ("b", " again")] {
            let p = format!("{PHRASE}{extra}");
            post(
                &app,
                "/api/accounts",
                json!({ "username": u, "passphrase": p, "cue": "c" }),
            )
            .await;
        }
        for attempt in [
            PHRASE,
            "uoit deploys lenovo",
            "uoit deploys lenovo thinkpad for all students",
        ] {
            post(
                &app,
                "/api/login",
                json!({ "username": "a", "passphrase": attempt }),
            )
            .await;
        }
    }

    let (app, state) = app(dir.path(), false);
    for u in ["a", "b"] {
        let (s, _) = call(&app, "GET", &format!("/api/accounts/{u}/strength"), None).await;
        assert_eq!(s, StatusCode::OK);
    }

    let events = read_events(&state.journal_path()).unwrap();
    assert_eq!(
        events
            .iter()
            .filter(|e| matches!(e, Event::Header { .. }))
            .count(),
        1
    );
    let mut logins = 0;
    let cfg = passguess_core::ToleranceConfig::default();
    for e in &events {
        if let Event::Login(a) = e {
            logins += 1;
            let stored = state.account(&a.username).unwrap().normalized;
            let attempt = passguess_core::normalize(&a.attempt_text).unwrap();
            let v = within_tolerance(&stored, attempt.canonical(), &cfg);
            assert_eq!(v.accepted, a.accepted);
            assert_eq!(v.distance, a.edit_distance);
        }
    }
    assert_eq!(logins, 3);
}
