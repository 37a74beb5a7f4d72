//! JSON endpoints over a shared [`Store`].
//!
//! ```text
//! GET  /api/queue?status=&pos=&reason=&page=&page_size=
//! POST /api/queue/{id}/decision   {"decision": "accept"|"reject"|"edit", "newText"?, "author"?}
//! GET  /api/synset/{id}
//! GET  /api/stats
//! GET  /api/search?lemma=
//! ```
//!
//! The author of a decision comes from the body or the `X-Author` header.

use std::path::PathBuf;
use std::sync::{Arc, RwLock, RwLockReadGuard, RwLockWriteGuard};

use axum::body::Bytes;
use axum::extract::rejection::{PathRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;
use zhwn_core::corrections::{CorrectionEdit, Decision, ReviewItem, ReviewReason, ReviewStatus};
use zhwn_core::lexicon::CandidateLemma;
use zhwn_core::screening::PosTally;
use zhwn_core::wordnet::{coverage_report, CoverageReport, PartOfSpeech, SynsetId};

use crate::store::{Store, StoreError};

pub const DEFAULT_PAGE_SIZE: usize = 20;
pub const MAX_PAGE_SIZE: usize = 500;

/// Shared handle to the store. Readers run concurrently; decisions take the
/// write lock, so the edit log has a single writer.
#[derive(Debug, Clone)]
pub struct AppState(Arc<RwLock<Store>>);

impl AppState {
    pub fn new(store: Store) -> Self {
        Self(Arc::new(RwLock::new(store)))
    }

    pub fn read(&self) -> RwLockReadGuard<'_, Store> {
        self.0.read().unwrap_or_else(|e| e.into_inner())
    }

    fn write(&self) -> RwLockWriteGuard<'_, Store> {
        self.0.write().unwrap_or_else(|e| e.into_inner())
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    item: Option<Box<ReviewItem>>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
            item: None,
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let message = e.to_string();
        match e {
            StoreError::NotFound(_) => Self::new(StatusCode::NOT_FOUND, message),
            StoreError::Conflict(item) => Self {
                status: StatusCode::CONFLICT,
                message,
                item: Some(item),
            },
            StoreError::Invalid(_) => Self::bad_request(message),
            StoreError::Apply(_) => Self::new(StatusCode::UNPROCESSABLE_ENTITY, message),
            _ => {
                log::error!("{message}");
                Self::new(StatusCode::INTERNAL_SERVER_ERROR, message)
            }
        }
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        Self::bad_request(e.body_text())
    }
}

impl From<PathRejection> for ApiError {
    fn from(e: PathRejection) -> Self {
        Self::bad_request(e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message });
        if let Some(item) = self.item {
            body["item"] = json!(item);
        }
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

/// Builds the router; `static_dir`, when given, is served for every path
/// outside `/api`.
pub fn router(state: AppState, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/queue", get(queue))
        .route("/api/queue/{id}/decision", post(decision))
        .route("/api/synset/{id}", get(synset))
        .route("/api/stats", get(stats))
        .route("/api/search", get(search))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// English side of a synset as shown next to review items.
#[derive(Debug, Serialize)]
struct Context {
    english: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gloss: Option<String>,
}

fn context(store: &Store, id: SynsetId) -> Context {
    match store.db().and_then(|db| db.get(id)) {
        Some(s) => Context {
            english: s.lemma_words().map(str::to_string).collect(),
            gloss: Some(s.gloss.clone()),
        },
        None => Context {
            english: Vec::new(),
            gloss: None,
        },
    }
}

#[derive(Debug, Deserialize)]
struct QueueParams {
    status: Option<String>,
    pos: Option<String>,
    reason: Option<String>,
    page: Option<usize>,
    page_size: Option<usize>,
}

#[derive(Debug, Serialize)]
struct QueueEntry {
    #[serde(flatten)]
    item: ReviewItem,
    #[serde(flatten)]
    context: Context,
}

#[derive(Debug, Serialize)]
struct QueuePage {
    items: Vec<QueueEntry>,
    page: usize,
    page_size: usize,
    total: usize,
    pages: usize,
}

fn parse_pos(s: &str) -> Result<PartOfSpeech, ApiError> {
    s.parse()
        .map_err(|e: zhwn_core::wordnet::IdError| ApiError::bad_request(e.to_string()))
}

fn parse_reason(s: &str) -> Result<ReviewReason, ApiError> {
    serde_json::from_value(json!(s)).map_err(|_| ApiError::bad_request(format!("unknown review reason {s:?}")))
}

async fn queue(State(state): State<AppState>, q: Result<Query<QueueParams>, QueryRejection>) -> ApiResult<QueuePage> {
    let Query(q) = q?;
    let status = match q.status.as_deref() {
        None | Some("all") | Some("") => None,
        Some(s) => Some(s.parse::<ReviewStatus>().map_err(ApiError::bad_request)?),
    };
    let pos = q.pos.as_deref().filter(|s| !s.is_empty()).map(parse_pos).transpose()?;
    let reason = q.reason.as_deref().filter(|s| !s.is_empty()).map(parse_reason).transpose()?;
    let page = q.page.unwrap_or(1);
    let page_size = q.page_size.unwrap_or(DEFAULT_PAGE_SIZE);
    if page == 0 {
        return Err(ApiError::bad_request("page starts at 1"));
    }
    if page_size == 0 || page_size > MAX_PAGE_SIZE {
        return Err(ApiError::bad_request(format!("page_size must lie in 1..={MAX_PAGE_SIZE}")));
    }

    let store = state.read();
    let matching: Vec<&ReviewItem> = store
        .queue()
        .filtered(status)
        .into_iter()
        .filter(|i| pos.is_none_or(|p| i.synset.pos() == p))
        .filter(|i| reason.is_none_or(|r| i.reason == r))
        .collect();
    let total = matching.len();
    let items = matching
        .into_iter()
        .skip((page - 1).saturating_mul(page_size))
        .take(page_size)
        .map(|i| QueueEntry {
            item: i.clone(),
            context: context(&store, i.synset),
        })
        .collect();
    Ok(Json(QueuePage {
        items,
        page,
        page_size,
        total,
        pages: total.div_ceil(page_size),
    }))
}

#[derive(Debug, Deserialize)]
struct DecisionBody {
    decision: String,
    #[serde(default, rename = "newText", alias = "new_text")]
    new_text: Option<String>,
    #[serde(default)]
    author: Option<String>,
}

#[derive(Debug, Serialize)]
struct DecisionResponse {
    edit: CorrectionEdit,
    item: ReviewItem,
}

async fn decision(
    State(state): State<AppState>,
    id: Result<Path<u64>, PathRejection>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<DecisionResponse> {
    let Path(id) = id?;
    let body: DecisionBody = serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(format!("bad request body: {e}")))?;
    let decision = match (body.decision.as_str(), body.new_text) {
        ("accept", _) => Decision::Accept,
        ("reject", _) => Decision::Reject,
        ("edit", Some(new_text)) if !new_text.trim().is_empty() => Decision::Edit {
            new_text: new_text.trim().to_string(),
        },
        ("edit", _) => return Err(ApiError::bad_request("edit needs a non-empty newText")),
        (other, _) => return Err(ApiError::bad_request(format!("unknown decision {other:?}"))),
    };
    let author = body
        .author
        .or_else(|| headers.get("x-author").and_then(|v| v.to_str().ok()).map(str::to_string))
        .map(|a| a.trim().to_string())
        .filter(|a| !a.is_empty())
        .ok_or_else(|| ApiError::bad_request("an author is required (body field or X-Author header)"))?;
    let timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);

    let (edit, item) = tokio::task::spawn_blocking(move || state.write().decide(id, &decision, &author, &timestamp))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    log::info!("{} {} on item {} by {}", edit.id, edit.kind, id, edit.author);
    Ok(Json(DecisionResponse { edit, item }))
}

#[derive(Debug, Serialize)]
struct SynsetView {
    id: SynsetId,
    #[serde(flatten)]
    context: Context,
    candidates: Vec<CandidateLemma>,
    history: Vec<CorrectionEdit>,
    review: Vec<ReviewItem>,
}

async fn synset(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<SynsetView> {
    let id: SynsetId = id
        .parse()
        .map_err(|e: zhwn_core::wordnet::IdError| ApiError::bad_request(e.to_string()))?;
    let store = state.read();
    let known = store.db().is_some_and(|db| db.contains(id)) || !store.lexicon().candidates(id).is_empty();
    if !known {
        return Err(ApiError::new(StatusCode::NOT_FOUND, format!("synset {id} not found")));
    }
    Ok(Json(SynsetView {
        id,
        context: context(&store, id),
        candidates: store.lexicon().candidates(id).to_vec(),
        history: store.history(id).into_iter().cloned().collect(),
        review: store.items_of(id).into_iter().cloned().collect(),
    }))
}

#[derive(Debug, Serialize)]
struct ScreeningView {
    by_pos: std::collections::BTreeMap<PartOfSpeech, PosTally>,
    total: PosTally,
}

#[derive(Debug, Serialize)]
struct LexiconCounts {
    synsets: usize,
    candidates: usize,
    live: usize,
}

#[derive(Debug, Serialize)]
struct Stats {
    #[serde(skip_serializing_if = "Option::is_none")]
    coverage: Option<CoverageReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    screening: Option<ScreeningView>,
    queue: std::collections::BTreeMap<&'static str, usize>,
    edits: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    edit_tip: Option<String>,
    lexicon: LexiconCounts,
}

async fn stats(State(state): State<AppState>) -> ApiResult<Stats> {
    let store = state.read();
    let lex = store.lexicon();
    Ok(Json(Stats {
        coverage: store.db().map(|db| coverage_report(db, lex)),
        screening: store.screening().map(|s| ScreeningView {
            by_pos: s.by_pos.clone(),
            total: s.total(),
        }),
        queue: store.queue_counts(),
        edits: store.log().len(),
        edit_tip: lex.provenance.edit_tip.clone(),
        lexicon: LexiconCounts {
            synsets: lex.synset_count(),
            candidates: lex.candidate_count(),
            live: lex.all_candidates().filter(|c| c.is_live()).count(),
        },
    }))
}

#[derive(Debug, Deserialize)]
struct SearchParams {
    lemma: Option<String>,
}

#[derive(Debug, Serialize)]
struct Hit {
    id: SynsetId,
    #[serde(flatten)]
    context: Context,
    chinese: Vec<String>,
}

#[derive(Debug, Serialize)]
struct SearchResult {
    lemma: String,
    /// Synsets with the lemma as a live Chinese candidate.
    chinese: Vec<Hit>,
    /// Synsets with the lemma as an English word.
    english: Vec<Hit>,
}

async fn search(State(state): State<AppState>, q: Result<Query<SearchParams>, QueryRejection>) -> ApiResult<SearchResult> {
    let Query(q) = q?;
    let lemma = q
        .lemma
        .map(|l| l.trim().to_string())
        .filter(|l| !l.is_empty())
        .ok_or_else(|| ApiError::bad_request("missing lemma"))?;
    let store = state.read();
    let hit = |id: SynsetId| Hit {
        id,
        context: context(&store, id),
        chinese: store.lexicon().live_lemmas(id).map(str::to_string).collect(),
    };
    let chinese = store.lexicon().lemma_index().synsets(&lemma).iter().copied().map(hit).collect();
    let english = store
        .db()
        .map(|db| db.lookup_any(&lemma))
        .unwrap_or_default()
        .into_iter()
        .map(hit)
        .collect();
    Ok(Json(SearchResult { lemma, chinese, english }))
}
