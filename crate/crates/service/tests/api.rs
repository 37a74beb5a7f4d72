//! Endpoint behaviour against a temporary data directory built from the toy
//! fixtures.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt as _;
use serde_json::{json, Value};
use tower::ServiceExt as _;
use zhwn_core::corrections::{verify_log, ReviewQueue, ReviewReason};
use zhwn_core::lexicon::{parse_dictionary, translate_synsets, BilingualLexicon};
use zhwn_core::wordnet::{load_db, SynsetId, WordnetDb};
use zhwn_service::store::{EDITS_FILE, LEXICON_FILE, QUEUE_FILE};
use zhwn_service::{router, AppState, Store};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn db() -> WordnetDb {
    load_db(&fixtures().join("wordnet"), "3.0").unwrap()
}

fn lexicon(db: &WordnetDb) -> BilingualLexicon {
    let read = |rel: &str| std::fs::read_to_string(fixtures().join(rel)).unwrap();
    let mut dicts = parse_dictionary(&read("dict/oxford.tsv")).unwrap();
    dicts.extend(parse_dictionary(&read("dict/xinhua.tsv")).unwrap());
    translate_synsets(db, &dicts).lexicon
}

fn id(s: &str) -> SynsetId {
    s.parse().unwrap()
}

const WEAR: &str = "00469382-v";

/// Writes the fixture lexicon and `queue` into a fresh directory.
fn data_dir(queue: &ReviewQueue) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join(LEXICON_FILE), lexicon(&db()).to_jsonl()).unwrap();
    std::fs::write(dir.path().join(QUEUE_FILE), queue.to_jsonl()).unwrap();
    dir
}

/// One item per fixture candidate, in lexicon order.
fn full_queue() -> ReviewQueue {
    let mut q = ReviewQueue::new();
    for c in lexicon(&db()).all_candidates() {
        q.push(c.synset, &c.text, ReviewReason::ScreeningDeferred, None, None);
    }
    q
}

fn wear_queue() -> ReviewQueue {
    let mut q = ReviewQueue::new();
    q.push(id(WEAR), "穿", ReviewReason::RuleFlagged, None, None);
    q
}

fn app(dir: &Path) -> Router {
    let (store, _) = Store::open(dir, Some(db())).unwrap();
    router(AppState::new(store), None)
}

async fn call(app: &Router, req: Request<Body>) -> (StatusCode, Value) {
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    let body = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, body)
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    call(app, Request::get(uri).body(Body::empty()).unwrap()).await
}

fn decision_request(item: u64, body: Value) -> Request<Body> {
    Request::post(format!("/api/queue/{item}/decision"))
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap()
}

async fn post(app: &Router, item: u64, body: Value) -> (StatusCode, Value) {
    call(app, decision_request(item, body)).await
}

#[tokio::test]
async fn empty_queue_gives_an_empty_page() {
    let dir = data_dir(&ReviewQueue::new());
    let (status, body) = get(&app(dir.path()), "/api/queue?status=open").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["items"], json!([]));
    assert_eq!(
        (body["total"].as_u64(), body["pages"].as_u64(), body["page"].as_u64()),
        (Some(0), Some(0), Some(1))
    );
}

#[tokio::test]
async fn paging_and_filters() {
    let q = full_queue();
    let n = q.len();
    assert!(n > 20, "{n}");
    let dir = data_dir(&q);
    let app = app(dir.path());

    let (_, first) = get(&app, "/api/queue?status=open&page_size=10").await;
    assert_eq!(first["total"].as_u64(), Some(n as u64));
    assert_eq!(first["pages"].as_u64(), Some(n.div_ceil(10) as u64));
    assert_eq!(first["items"].as_array().unwrap().len(), 10);
    assert_eq!(first["items"][0]["id"], 1);

    let last_page = n.div_ceil(10);
    let (_, last) = get(&app, &format!("/api/queue?page={last_page}&page_size=10")).await;
    assert_eq!(last["items"].as_array().unwrap().len(), n - (last_page - 1) * 10);
    let (_, beyond) = get(&app, &format!("/api/queue?page={}&page_size=10", last_page + 1)).await;
    assert_eq!(beyond["items"], json!([]));

    // Items carry the English side of their synset.
    let (_, verbs) = get(&app, "/api/queue?pos=verb&page_size=100").await;
    let verbs = verbs["items"].as_array().unwrap();
    assert!(verbs.iter().all(|i| i["synset"].as_str().unwrap().ends_with("-v")));
    let wear = verbs.iter().find(|i| i["candidate"] == "穿").unwrap();
    assert_eq!(wear["english"], json!(["wear", "wear_down"]));
    assert!(wear["gloss"].as_str().is_some());

    let (_, none) = get(&app, "/api/queue?reason=conflict").await;
    assert_eq!(none["total"], 0);
    for bad in [
        "/api/queue?page=0",
        "/api/queue?page_size=0",
        "/api/queue?status=maybe",
        "/api/queue?pos=x",
        "/api/queue?page=a",
    ] {
        assert_eq!(get(&app, bad).await.0, StatusCode::BAD_REQUEST, "{bad}");
    }
}

#[tokio::test]
async fn second_decision_conflicts() {
    let dir = data_dir(&wear_queue());
    let app = app(dir.path());
    let (status, body) = post(&app, 1, json!({"decision": "accept", "author": "lin"})).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["edit"]["id"], "e000001");
    assert_eq!(body["edit"]["kind"], "retag-note");
    assert_eq!(body["item"]["status"], "accepted");
    assert_eq!(body["item"]["decided_by"], "e000001");

    let (status, body) = post(&app, 1, json!({"decision": "reject", "author": "lin"})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["item"]["status"], "accepted");
    assert!(body["error"].as_str().unwrap().contains("already accepted"));

    assert_eq!(
        post(&app, 99, json!({"decision": "accept", "author": "lin"})).await.0,
        StatusCode::NOT_FOUND
    );
    let bad_id = Request::post("/api/queue/x/decision").body(Body::from("{}")).unwrap();
    assert_eq!(call(&app, bad_id).await.0, StatusCode::BAD_REQUEST);
    let (_, open) = get(&app, "/api/queue?status=open").await;
    assert_eq!(open["total"], 0);
}

#[tokio::test]
async fn decision_round_trip_shows_in_synset_history() {
    let dir = data_dir(&wear_queue());
    let app = app(dir.path());
    let req = Request::post("/api/queue/1/decision")
        .header("content-type", "application/json")
        .header("x-author", "wang")
        .body(Body::from(json!({"decision": "edit", "newText": "磨损"}).to_string()))
        .unwrap();
    let (status, body) = call(&app, req).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["edit"]["kind"], "replace-lemma");
    assert_eq!(body["edit"]["author"], "wang");
    assert_eq!(
        (body["edit"]["old"].as_str(), body["edit"]["new"].as_str()),
        (Some("穿"), Some("磨损"))
    );

    let (status, view) = get(&app, &format!("/api/synset/{WEAR}")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(view["english"], json!(["wear", "wear_down"]));
    let history = view["history"].as_array().unwrap();
    assert_eq!(history.len(), 1);
    assert_eq!(history[0]["id"], body["edit"]["id"]);
    assert_eq!(history[0]["review_item"], 1);
    let statuses: Vec<(&str, &str)> = view["candidates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["text"].as_str().unwrap(), c["status"].as_str().unwrap()))
        .collect();
    assert_eq!(statuses, [("穿", "human-dropped"), ("磨损", "human-kept")]);
    assert_eq!(view["review"][0]["status"], "edited");

    let (_, stats) = get(&app, "/api/stats").await;
    assert_eq!(stats["edits"], 1);
    assert_eq!(stats["edit_tip"], "e000001");
    assert_eq!(stats["queue"]["edited"], 1);
    assert_eq!(stats["coverage"]["total"]["concepts"], 20);

    assert_eq!(get(&app, "/api/synset/99999999-n").await.0, StatusCode::NOT_FOUND);
    assert_eq!(get(&app, "/api/synset/bogus").await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn malformed_decisions_are_rejected() {
    let dir = data_dir(&wear_queue());
    let app = app(dir.path());
    for body in [
        json!({"decision": "accept"}),
        json!({"decision": "edit", "author": "lin"}),
        json!({"decision": "edit", "newText": "  ", "author": "lin"}),
        json!({"decision": "maybe", "author": "lin"}),
        json!({"author": "lin"}),
        json!({"decision": "edit", "newText": "穿", "author": "lin"}),
    ] {
        assert_eq!(post(&app, 1, body.clone()).await.0, StatusCode::BAD_REQUEST, "{body}");
    }
    let raw = Request::post("/api/queue/1/decision").body(Body::from("{not json")).unwrap();
    assert_eq!(call(&app, raw).await.0, StatusCode::BAD_REQUEST);
    // Nothing was logged and the item is still open.
    let (_, open) = get(&app, "/api/queue?status=open").await;
    assert_eq!(open["total"], 1);
    assert_eq!(std::fs::read(dir.path().join(EDITS_FILE)).unwrap(), b"");
}

#[tokio::test]
async fn unappliable_decision_is_unprocessable() {
    // The item names a candidate the lexicon does not have.
    let mut q = ReviewQueue::new();
    q.push(id(WEAR), "不存在", ReviewReason::Conflict, None, None);
    let dir = data_dir(&q);
    let app = app(dir.path());
    let (status, body) = post(&app, 1, json!({"decision": "reject", "author": "lin"})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{body}");
    let (_, open) = get(&app, "/api/queue?status=open").await;
    assert_eq!(open["total"], 1);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_double_decisions_yield_one_success() {
    let q = full_queue();
    let dir = data_dir(&q);
    let app = app(dir.path());
    for item in 1..=10u64 {
        let a = tokio::spawn(call_owned(
            app.clone(),
            decision_request(item, json!({"decision": "accept", "author": "a"})),
        ));
        let b = tokio::spawn(call_owned(
            app.clone(),
            decision_request(item, json!({"decision": "reject", "author": "b"})),
        ));
        let mut codes = [a.await.unwrap(), b.await.unwrap()];
        codes.sort();
        assert_eq!(codes, [StatusCode::OK, StatusCode::CONFLICT], "item {item}");
    }
    let (_, stats) = get(&app, "/api/stats").await;
    assert_eq!(stats["edits"], 10);
    let records = verify_log(&std::fs::read(dir.path().join(EDITS_FILE)).unwrap()).unwrap();
    assert_eq!(records.len(), 10);
    let items: Vec<u64> = records.iter().map(|r| r.edit.review_item.unwrap()).collect();
    let mut sorted = items.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted, (1..=10).collect::<Vec<_>>());
}

async fn call_owned(app: Router, req: Request<Body>) -> StatusCode {
    app.oneshot(req).await.unwrap().status()
}

#[tokio::test]
async fn partial_trailing_record_is_dropped_on_restart() {
    let q = full_queue();
    let dir = data_dir(&q);
    {
        let app = app(dir.path());
        for item in 1..=3 {
            assert_eq!(
                post(&app, item, json!({"decision": "accept", "author": "lin"})).await.0,
                StatusCode::OK
            );
        }
    }
    // A write cut short mid-record.
    let log_path = dir.path().join(EDITS_FILE);
    let intact = std::fs::read(&log_path).unwrap();
    let mut f = std::fs::OpenOptions::new().append(true).open(&log_path).unwrap();
    f.write_all(&intact[..intact.len() / 5]).unwrap();
    drop(f);

    let (store, recovery) = Store::open(dir.path(), Some(db())).unwrap();
    assert!(recovery.truncated_bytes > 0);
    assert_eq!(store.log().len(), 3);
    assert_eq!(std::fs::read(&log_path).unwrap(), intact);
    assert_eq!(verify_log(&intact).unwrap().len(), 3);

    let app = router(AppState::new(store), None);
    let (status, body) = post(&app, 4, json!({"decision": "reject", "author": "lin"})).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["edit"]["id"], "e000004");
    assert_eq!(verify_log(&std::fs::read(&log_path).unwrap()).unwrap().len(), 4);
}

#[tokio::test]
async fn restart_closes_items_from_the_log() {
    let dir = data_dir(&wear_queue());
    let stale_queue = std::fs::read(dir.path().join(QUEUE_FILE)).unwrap();
    {
        let app = app(dir.path());
        assert_eq!(
            post(&app, 1, json!({"decision": "reject", "author": "lin"})).await.0,
            StatusCode::OK
        );
    }
    // The queue file as it was before the decision was saved.
    std::fs::write(dir.path().join(QUEUE_FILE), stale_queue).unwrap();
    let app = app(dir.path());
    let (_, open) = get(&app, "/api/queue?status=open").await;
    assert_eq!(open["total"], 0);
    let (_, view) = get(&app, &format!("/api/synset/{WEAR}")).await;
    assert_eq!(view["review"][0]["status"], "rejected");
    assert_eq!(view["review"][0]["decided_by"], "e000001");
    assert_eq!(view["candidates"][0]["status"], "human-dropped");
    assert_eq!(
        post(&app, 1, json!({"decision": "accept", "author": "lin"})).await.0,
        StatusCode::CONFLICT
    );
    let saved = ReviewQueue::from_jsonl(&std::fs::read_to_string(dir.path().join(QUEUE_FILE)).unwrap()).unwrap();
    assert_eq!(saved.get(1).unwrap().decided_by.as_deref(), Some("e000001"));
}

#[tokio::test]
async fn search_covers_both_languages() {
    let dir = data_dir(&ReviewQueue::new());
    let app = app(dir.path());
    let (status, body) = get(&app, "/api/search?lemma=队伍").await;
    assert_eq!(status, StatusCode::OK);
    let ids: Vec<&str> = body["chinese"]
        .as_array()
        .unwrap()
        .iter()
        .map(|h| h["id"].as_str().unwrap())
        .collect();
    assert_eq!(ids.len(), 3);
    for s in ["08189659-n", "08206460-n", "08198398-n"] {
        assert!(ids.contains(&s), "{s}");
    }
    let (_, body) = get(&app, "/api/search?lemma=wear").await;
    assert_eq!(body["english"][0]["id"], WEAR);
    assert_eq!(body["english"][0]["chinese"], json!(["穿", "磨损"]));
    assert_eq!(get(&app, "/api/search").await.0, StatusCode::BAD_REQUEST);
    let (_, none) = get(&app, "/api/search?lemma=zzz").await;
    assert_eq!(
        (none["chinese"].as_array().unwrap().len(), none["english"].as_array().unwrap().len()),
        (0, 0)
    );
}

#[tokio::test]
async fn static_files_are_served_outside_the_api() {
    let dir = data_dir(&ReviewQueue::new());
    let web = tempfile::tempdir().unwrap();
    std::fs::write(web.path().join("index.html"), "<!doctype html><p>review</p>").unwrap();
    let (store, _) = Store::open(dir.path(), None).unwrap();
    let app = router(AppState::new(store), Some(web.path().to_path_buf()));
    let res = app.clone().oneshot(Request::get("/").body(Body::empty()).unwrap()).await.unwrap();
    assert_eq!(res.status(), StatusCode::OK);
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    assert!(String::from_utf8_lossy(&bytes).contains("review"));
    // Without a wordnet the stats omit coverage.
    let (_, stats) = get(&app, "/api/stats").await;
    assert!(stats.get("coverage").is_none());
    assert_eq!(stats["lexicon"]["synsets"], 20);
}
