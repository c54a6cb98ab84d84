use std::collections::BTreeSet;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use cris_core::model::Triple;
use cris_core::schema::{bundled_cerif_schema, load_schema};
use cris_core::store::Store;
use cris_core::syntax::parse_triples;
use cris_server::{json::count_nodes, json::ClassNode, router, AppState, ServerOptions};
use serde_json::{json, Value};
use tower::ServiceExt;

const CERIF: &str = "http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#";
const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

fn two_people() -> String {
    format!(
        "<http://auris.example.org/obj#p1> <{TYPE}> <{CERIF}Researcher> .\n\
         <http://auris.example.org/obj#p1> <{CERIF}name> \"Ann Example\"@en .\n\
         <http://auris.example.org/obj#s2> <{TYPE}> <{CERIF}Student> .\n\
         <http://auris.example.org/obj#s2> <{CERIF}member_of> <http://auris.example.org/obj#p1> .\n"
    )
}

fn store_from(text: &str) -> Store {
    let mut store = Store::new();
    let parsed = parse_triples(text, "fixture");
    assert!(parsed.errors.is_empty());
    store.merge(&parsed, &cris_core::SourceId::Local, 0, Default::default());
    store
}

fn app_with(store: Store, schema: Vec<Triple>, options: &ServerOptions) -> Router {
    router(AppState::new(store, schema, None), options).unwrap()
}

fn app(store: Store) -> Router {
    app_with(store, bundled_cerif_schema(), &ServerOptions::default())
}

async fn send(app: &Router, req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let body = axum::body::to_bytes(resp.into_body(), usize::MAX)
        .await
        .unwrap();
    (status, body.to_vec())
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    let (status, body) = send(app, Request::get(uri).body(Body::empty()).unwrap()).await;
    (status, serde_json::from_slice(&body).unwrap())
}

async fn post(app: &Router, uri: &str, body: impl Into<Body>) -> (StatusCode, Value) {
    let (status, body) = send(app, Request::post(uri).body(body.into()).unwrap()).await;
    (status, serde_json::from_slice(&body).unwrap())
}

async fn query(app: &Router, q: &str) -> (StatusCode, Value) {
    post(app, "/query", json!({ "q": q }).to_string()).await
}

async fn rows(app: &Router, q: &str) -> usize {
    let (status, body) = query(app, q).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    body["rows"].as_array().unwrap().len()
}

fn percent_encode(text: &str) -> String {
    text.bytes()
        .map(|b| match b {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'.' | b'_' | b'~' => {
                (b as char).to_string()
            }
            _ => format!("%{b:02X}"),
        })
        .collect()
}

#[tokio::test]
async fn class_queries_follow_subclasses() {
    let app = app(store_from(&two_people()));
    assert_eq!(rows(&app, "#Person").await, 2);
    assert_eq!(rows(&app, "#Researcher").await, 1);
    assert_eq!(rows(&app, "^#Researcher").await, 1);
    assert_eq!(rows(&app, "^#Person").await, 0);

    let (_, body) = query(&app, "#Researcher").await;
    assert_eq!(
        body,
        json!({ "columns": ["X0"], "rows": [[{ "iri": "http://auris.example.org/obj#p1" }]] })
    );
    let (_, body) = query(&app, "select X, N from #Person {X} . #name {N}").await;
    assert_eq!(body["columns"], json!(["X", "N"]));
    assert_eq!(
        body["rows"][0][1],
        json!({ "literal": "Ann Example", "lang": "en" })
    );
}

#[tokio::test]
async fn empty_store_query() {
    let app = app(Store::new());
    let (status, body) = query(&app, "#Person").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, json!({ "columns": ["X0"], "rows": [] }));
}

#[tokio::test]
async fn query_errors() {
    let app = app(Store::new());
    let (status, body) = query(&app, "select from").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "QUERY_SYNTAX");
    assert!(body["position"].is_u64());
    assert!(body["message"].is_string());

    let (status, body) = query(&app, "select X from #Project {X} where Y = \"z\"").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(
        (body["code"].as_str(), body["position"].as_u64()),
        (Some("UNBOUND_VARIABLE"), Some(33))
    );

    let (status, body) = query(&app, "nope:Thing").await;
    assert_eq!(
        (status, body["code"].as_str()),
        (StatusCode::BAD_REQUEST, Some("UNKNOWN_PREFIX"))
    );

    let (status, body) = post(&app, "/query", "{\"query\": 1}").await;
    assert_eq!(
        (status, body["code"].as_str()),
        (StatusCode::BAD_REQUEST, Some("BAD_REQUEST"))
    );
}

#[tokio::test]
async fn oversized_bodies_are_rejected() {
    let app = app(Store::new());
    let big = format!("{{\"q\": \"{}\"}}", "x".repeat(9 * 1024 * 1024));
    let (status, body) = post(&app, "/query", big).await;
    assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE);
    assert_eq!(body["code"], "PAYLOAD_TOO_LARGE");

    let small = app_with(
        Store::new(),
        vec![],
        &ServerOptions {
            body_limit: 64,
            ..Default::default()
        },
    );
    let (status, _) = post(&small, "/statements", two_people()).await;
    assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE);
}

#[tokio::test]
async fn posting_statements() {
    let app = app(Store::new());
    let three = format!(
        "<http://e.org/a> <{TYPE}> <{CERIF}Person> .\n<http://e.org/a> <{CERIF}name> \"A\" .\n_:x <{CERIF}name> \"B\" .\n"
    );
    let (status, body) = post(&app, "/statements", three.clone()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, json!({ "added": 3, "duplicate": 0, "errors": [] }));
    let (_, body) = post(&app, "/statements?mode=accumulate", three).await;
    assert_eq!(body, json!({ "added": 0, "duplicate": 3, "errors": [] }));
    let (_, stats) = get(&app, "/stats").await;
    assert_eq!(stats["triples"], 3);

    let mixed = "<http://e.org/b> <http://e.org/p> \"1\" .\nnot a triple\n<http://e.org/b> <http://e.org/p> \"2\" .\n";
    let (status, body) = post(&app, "/statements?source=http://e.org/feed", mixed).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        (body["added"].as_u64(), body["duplicate"].as_u64()),
        (Some(2), Some(0))
    );
    assert_eq!(body["errors"][0]["line"], 2);
    let (_, stats) = get(&app, "/stats").await;
    assert_eq!(stats["triples"], 5);

    // replace drops what the source said before
    let (_, body) = post(
        &app,
        "/statements?source=http://e.org/feed&mode=replace",
        "<http://e.org/b> <http://e.org/p> \"3\" .\n",
    )
    .await;
    assert_eq!(body["added"], 1);
    let (_, stats) = get(&app, "/stats").await;
    assert_eq!(stats["triples"], 4);

    let (status, body) = post(&app, "/statements", "garbage\nmore garbage\n").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "BAD_TRIPLES");
    let (status, body) = post(&app, "/statements", "# only a comment\n").await;
    assert_eq!((status, body["added"].as_u64()), (StatusCode::OK, Some(0)));

    let (status, body) = post(&app, "/statements?mode=sometimes", "").await;
    assert_eq!(
        (status, body["code"].as_str()),
        (StatusCode::BAD_REQUEST, Some("BAD_REQUEST"))
    );
}

fn find<'a>(nodes: &'a [ClassNode], iri: &str) -> Option<&'a ClassNode> {
    nodes.iter().find_map(|n| {
        if n.iri == iri {
            Some(n)
        } else {
            find(&n.children, iri)
        }
    })
}

#[tokio::test]
async fn class_tree() {
    let app = app(Store::new());
    let (status, body) = get(&app, "/classes").await;
    assert_eq!(status, StatusCode::OK);
    let tree: Vec<ClassNode> = serde_json::from_value(body).unwrap();
    let person = find(&tree, &format!("{CERIF}Person")).unwrap();
    let kids: Vec<&str> = person.children.iter().map(|c| c.iri.as_str()).collect();
    assert_eq!(
        kids,
        vec![format!("{CERIF}Researcher"), format!("{CERIF}Student")]
    );
    assert!(
        tree.iter().any(|r| r.iri == format!("{CERIF}Person")),
        "Person is a root"
    );

    let schema = load_schema(&bundled_cerif_schema()).unwrap();
    assert_eq!(count_nodes(&tree), schema.classes.len());

    let bare = app_with(Store::new(), vec![], &ServerOptions::default());
    let (_, body) = get(&bare, "/classes").await;
    assert_eq!(body, json!([]));
}

#[tokio::test]
async fn class_tree_survives_cycles() {
    let app = app_with(Store::new(), vec![], &ServerOptions::default());
    let sub = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
    let body = format!("<http://e.org/A> <{sub}> <http://e.org/B> .\n<http://e.org/B> <{sub}> <http://e.org/A> .\n");
    post(&app, "/statements", body).await;
    let (_, body) = get(&app, "/classes").await;
    let tree: Vec<ClassNode> = serde_json::from_value(body).unwrap();
    assert_eq!(count_nodes(&tree), 2);
}

#[tokio::test]
async fn resource_view() {
    let app = app(store_from(&two_people()));
    let p1 = "http://auris.example.org/obj#p1";
    let (status, body) = get(&app, &format!("/resources/{}", percent_encode(p1))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["subject"], json!({ "iri": p1 }));
    assert_eq!(body["triples"].as_array().unwrap().len(), 2);
    assert_eq!(body["sources"], json!(["local"]));
    assert_eq!(body["triples"][0]["provenance"][0]["source"], "local");

    let (status, body) = get(
        &app,
        &format!("/resources/{}", percent_encode("http://e.org/nobody")),
    )
    .await;
    assert_eq!(
        (status, body["code"].as_str()),
        (StatusCode::NOT_FOUND, Some("NOT_FOUND"))
    );

    // p1 is also an object, but the view is by subject only
    let researcher = format!("{CERIF}Researcher");
    let (status, _) = get(&app, &format!("/resources/{}", percent_encode(&researcher))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn stats_and_schema() {
    let app = app(Store::new());
    let (_, stats) = get(&app, "/stats").await;
    assert_eq!(stats["instance_triples"], 0);
    assert_eq!(stats["triples"], 0);

    let (status, body) = send(&app, Request::get("/schema").body(Body::empty()).unwrap()).await;
    assert_eq!(status, StatusCode::OK);
    let parsed = parse_triples(std::str::from_utf8(&body).unwrap(), "schema");
    assert!(parsed.errors.is_empty());
    let got: BTreeSet<Triple> = parsed.triples.into_iter().collect();
    let want: BTreeSet<Triple> = bundled_cerif_schema().into_iter().collect();
    assert_eq!(got, want);

    post(&app, "/statements", two_people()).await;
    let (_, stats) = get(&app, "/stats").await;
    assert_eq!(stats["triples"], 4);
    assert_eq!(stats["instance_triples"], 4);
    assert_eq!(stats["sources"][0]["source"], "local");
}

#[tokio::test]
async fn posted_schema_extends_queries() {
    let app = app(store_from(&two_people()));
    let sw = format!(
        "<http://auris.example.org/schema#SoftwareProject> <http://www.w3.org/2000/01/rdf-schema#subClassOf> <{CERIF}Project> .\n\
         <http://auris.example.org/obj#sw1> <{TYPE}> <http://auris.example.org/schema#SoftwareProject> .\n\
         <http://auris.example.org/obj#sw1> <{CERIF}expertise_skill> \"Semantic Web\" .\n\
         <http://auris.example.org/obj#sw1> <{CERIF}project_persons> <http://auris.example.org/obj#p1> .\n"
    );
    let (status, _) = post(
        &app,
        "/statements?source=http://auris.example.org/meta.nt",
        sw,
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let q = "select Y from #Project {X} . #expertise_skill {S} , #Project {X} . #project_persons {Y} where S = \"Semantic Web\"";
    assert_eq!(rows(&app, q).await, 1);
    assert_eq!(rows(&app, &q.replace("#Project", "^#Project")).await, 0);
    let (_, schema) = send(&app, Request::get("/schema").body(Body::empty()).unwrap()).await;
    assert!(String::from_utf8(schema)
        .unwrap()
        .contains("SoftwareProject"));
}

#[tokio::test]
async fn writes_persist() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(
        AppState::new(
            Store::new(),
            bundled_cerif_schema(),
            Some(dir.path().to_path_buf()),
        ),
        &ServerOptions::default(),
    )
    .unwrap();
    post(&app, "/statements", two_people()).await;
    let loaded = Store::load_dir(dir.path()).unwrap();
    assert_eq!(loaded.len(), 4);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_reads_see_whole_writes() {
    let app = app(Store::new());
    let mut tasks = Vec::new();
    for i in 0..20 {
        let writer = app.clone();
        tasks.push(tokio::spawn(async move {
            // each write adds a person together with a name
            let body = format!(
                "<http://e.org/p{i}> <{TYPE}> <{CERIF}Person> .\n<http://e.org/p{i}> <{CERIF}name> \"n{i}\" .\n"
            );
            let (status, _) = post(&writer, "/statements", body).await;
            assert_eq!(status, StatusCode::OK);
        }));
        let reader = app.clone();
        tasks.push(tokio::spawn(async move {
            let app = reader;
            let persons = rows(&app, "#Person").await;
            let named = rows(&app, "select X from #Person {X} . #name {N}").await;
            assert!(persons <= 20 && named <= 20);
            let (_, stats) = get(&app, "/stats").await;
            assert_eq!(
                stats["triples"].as_u64().unwrap() % 2,
                0,
                "no half-applied write"
            );
        }));
    }
    for t in tasks {
        t.await.unwrap();
    }
    assert_eq!(rows(&app, "#Person").await, 20);
    let (_, stats) = get(&app, "/stats").await;
    assert_eq!(stats["triples"], 40);
}

#[tokio::test]
async fn unknown_routes_and_cors() {
    let app = app(Store::new());
    let (status, body) = get(&app, "/nowhere").await;
    assert_eq!(
        (status, body["code"].as_str()),
        (StatusCode::NOT_FOUND, Some("NOT_FOUND"))
    );
    let (status, body) = get(&app, "/query").await;
    assert_eq!(
        (status, body["code"].as_str()),
        (StatusCode::METHOD_NOT_ALLOWED, Some("METHOD_NOT_ALLOWED"))
    );

    let cors = app_with(
        Store::new(),
        vec![],
        &ServerOptions {
            cors_origin: Some("http://localhost:5173".into()),
            ..Default::default()
        },
    );
    let resp = cors
        .oneshot(
            Request::get("/stats")
                .header(header::ORIGIN, "http://localhost:5173")
                .body(Body::empty())
                .unwrap(),
        )
        .await
        .unwrap();
    assert_eq!(
        resp.headers()
            .get(header::ACCESS_CONTROL_ALLOW_ORIGIN)
            .unwrap(),
        "http://localhost:5173"
    );
    assert!(router(
        AppState::new(Store::new(), vec![], None),
        &ServerOptions {
            cors_origin: Some("bad\norigin".into()),
            ..Default::default()
        }
    )
    .is_err());
}
