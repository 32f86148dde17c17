//! HTTP demo of passphrase creation, tolerant login, live policy checks and
//! strength estimates.
//!
//! All state lives in an append-only journal replayed at startup. Writers
//! serialize through the journal lock; the n-gram store is shared read-only.

mod journal;

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::Utc;
use passguess_core::{
    check_policy, normalize, rank_passphrase, within_tolerance, NgramStore, PolicyConfig,
    RankerConfig, ToleranceConfig,
};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

pub use journal::{read_events, AccountRecord, Event, Journal, LoginAttempt, JOURNAL_FILE};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Journal {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl ServiceError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        ServiceError::Io {
            path: path.to_owned(),
            source,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub data_dir: PathBuf,
    pub tolerance: ToleranceConfig,
    pub policy: PolicyConfig,
    pub ranker: RankerConfig,
    /// Enables `GET /api/accounts/{username}/cue`.
    pub expose_cue: bool,
}

impl ServiceConfig {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        ServiceConfig {
            data_dir: data_dir.into(),
            tolerance: ToleranceConfig::default(),
            policy: PolicyConfig::default(),
            ranker: RankerConfig::default(),
            expose_cue: false,
        }
    }
}

#[derive(Default)]
struct Accounts {
    records: HashMap<String, AccountRecord>,
    failures: HashMap<String, u32>,
}

impl Accounts {
    fn apply(&mut self, event: Event) {
        match event {
            Event::Header { .. } => {}
            Event::Account(rec) => {
                self.failures.insert(rec.username.clone(), 0);
                self.records.insert(rec.username.clone(), rec);
            }
            Event::Login(attempt) => {
                let count = self.failures.entry(attempt.username).or_default();
                *count = if attempt.accepted { 0 } else { *count + 1 };
            }
        }
    }
}

struct Inner {
    store: NgramStore,
    cfg: ServiceConfig,
    accounts: RwLock<Accounts>,
    journal: Mutex<Journal>,
}

/// Shared handle passed to every handler.
#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    /// Opens the journal under `cfg.data_dir` and replays it.
    pub fn open(store: NgramStore, cfg: ServiceConfig) -> Result<AppState, ServiceError> {
        let (journal, events) = Journal::open(&cfg.data_dir)?;
        let mut accounts = Accounts::default();
        for e in events {
            accounts.apply(e);
        }
        Ok(AppState(Arc::new(Inner {
            store,
            cfg,
            accounts: RwLock::new(accounts),
            journal: Mutex::new(journal),
        })))
    }

    pub fn journal_path(&self) -> PathBuf {
        self.0.journal.lock().unwrap().path().to_owned()
    }

    pub fn account(&self, username: &str) -> Option<AccountRecord> {
        self.0
            .accounts
            .read()
            .unwrap()
            .records
            .get(username)
            .cloned()
    }

    pub fn account_count(&self) -> usize {
        self.0.accounts.read().unwrap().records.len()
    }

    /// Persists an event, then applies it to the in-memory view.
    fn record(&self, journal: &mut Journal, event: Event) -> Result<(), ApiError> {
        journal
            .append(&event)
            .map_err(|e| ApiError::internal(e.to_string()))?;
        self.0.accounts.write().unwrap().apply(event);
        Ok(())
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/check", post(check))
        .route("/api/accounts", post(create_account))
        .route("/api/login", post(login))
        .route("/api/accounts/{username}/strength", get(strength))
        .route("/api/accounts/{username}/cue", get(cue))
        .with_state(state)
}

/// Serves until ctrl-c.
pub async fn serve(state: AppState, addr: SocketAddr) -> Result<(), ServiceError> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| ServiceError::io(Path::new(&addr.to_string()), e))?;
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| ServiceError::io(Path::new(&addr.to_string()), e))
}

struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: json!({ "error": message.into() }),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, message)
    }

    fn not_found(username: &str) -> Self {
        ApiError::new(
            StatusCode::NOT_FOUND,
            format!("unknown account {username:?}"),
        )
    }

    fn internal(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

// Axum's Json extractor answers some malformed bodies with 415 or 422; every
// unreadable body here is a plain 400.
fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("invalid body: {e}")))
}

async fn health(State(state): State<AppState>) -> Json<Value> {
    let counts: BTreeMap<String, u64> = state
        .0
        .store
        .counts()
        .iter()
        .enumerate()
        .map(|(i, c)| ((i + 1).to_string(), *c))
        .collect();
    Json(json!({
        "status": "ok",
        "storeCounts": counts,
        "accounts": state.account_count(),
    }))
}

#[derive(Deserialize)]
struct CheckRequest {
    passphrase: String,
}

/// log2 of the product of 1-gram ranks, when every word has one.
fn quick_strength_bits(store: &NgramStore, raw: &str) -> Option<f64> {
    let phrase = normalize(raw).ok()?;
    phrase
        .tokens()
        .map(|w| store.rank_of(&[w]).map(|r| (r as f64).log2()))
        .sum()
}

async fn check(State(state): State<AppState>, body: Bytes) -> ApiResult {
    let req: CheckRequest = parse(&body)?;
    let report = check_policy(&req.passphrase, &state.0.store, &state.0.cfg.policy);
    let bits = quick_strength_bits(&state.0.store, &req.passphrase);
    Ok(Json(json!({ "report": report, "quickStrengthBits": bits })).into_response())
}

#[derive(Deserialize)]
struct CreateRequest {
    username: String,
    passphrase: String,
    cue: String,
    #[serde(default)]
    overwrite: bool,
}

fn validate_username(name: &str) -> Result<(), ApiError> {
    if name.trim().is_empty() || name != name.trim() {
        return Err(ApiError::bad_request(
            "username must be non-empty without surrounding spaces",
        ));
    }
    if name.chars().count() > 64 || name.chars().any(char::is_control) {
        return Err(ApiError::bad_request(
            "username too long or contains control characters",
        ));
    }
    Ok(())
}

async fn create_account(State(state): State<AppState>, body: Bytes) -> ApiResult {
    let req: CreateRequest = parse(&body)?;
    validate_username(&req.username)?;
    if req.cue.trim().is_empty() {
        return Err(ApiError::bad_request("cue must not be empty"));
    }

    let mut journal = state.0.journal.lock().unwrap();
    let previous = state.account(&req.username);
    if previous.is_some() && !req.overwrite {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            format!("account {:?} already exists", req.username),
        ));
    }
    let report = check_policy(&req.passphrase, &state.0.store, &state.0.cfg.policy);
    let normalized = match normalize(&req.passphrase) {
        Ok(p) if report.acceptable => p,
        _ => {
            return Ok((
                StatusCode::UNPROCESSABLE_ENTITY,
                Json(json!({ "report": report })),
            )
                .into_response())
        }
    };
    let record = AccountRecord {
        username: req.username.clone(),
        raw_passphrase: req.passphrase,
        normalized,
        cue: req.cue,
        created_at: Utc::now(),
        reset_count: previous.map_or(0, |p| p.reset_count + 1),
    };
    state.record(&mut journal, Event::Account(record))?;
    Ok((
        StatusCode::CREATED,
        Json(json!({ "username": req.username })),
    )
        .into_response())
}

#[derive(Deserialize)]
struct LoginRequest {
    username: String,
    passphrase: String,
}

async fn login(State(state): State<AppState>, body: Bytes) -> ApiResult {
    let req: LoginRequest = parse(&body)?;
    let mut journal = state.0.journal.lock().unwrap();
    let account = state
        .account(&req.username)
        .ok_or_else(|| ApiError::not_found(&req.username))?;
    // an attempt with no usable characters compares as the empty string
    let attempt = normalize(&req.passphrase)
        .map(|p| p.canonical().to_owned())
        .unwrap_or_default();
    let verdict = within_tolerance(&account.normalized, &attempt, &state.0.cfg.tolerance);
    state.record(
        &mut journal,
        Event::Login(LoginAttempt {
            username: req.username.clone(),
            attempt_text: req.passphrase,
            accepted: verdict.accepted,
            edit_distance: verdict.distance,
            relative: verdict.relative,
            timestamp: Utc::now(),
        }),
    )?;
    let failures = state.0.accounts.read().unwrap().failures[&req.username];
    Ok(Json(json!({
        "accepted": verdict.accepted,
        "editDistance": verdict.distance,
        "relative": verdict.relative,
        "consecutiveFailures": failures,
    }))
    .into_response())
}

async fn strength(State(state): State<AppState>, UrlPath(username): UrlPath<String>) -> ApiResult {
    let account = state
        .account(&username)
        .ok_or_else(|| ApiError::not_found(&username))?;
    let estimate = rank_passphrase(&account.normalized, &state.0.store, &state.0.cfg.ranker);
    Ok(Json(estimate).into_response())
}

async fn cue(State(state): State<AppState>, UrlPath(username): UrlPath<String>) -> ApiResult {
    if !state.0.cfg.expose_cue {
        return Err(ApiError::new(
            StatusCode::FORBIDDEN,
            "cue retrieval is disabled",
        ));
    }
    let account = state
        .account(&username)
        .ok_or_else(|| ApiError::not_found(&username))?;
    Ok(Json(json!({ "username": account.username, "cue": account.cue })).into_response())
}
