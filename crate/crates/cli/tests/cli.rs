//! Drives the `cris` binary end to end.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::thread::sleep;
use std::time::{Duration, Instant};

use cris_testkit::http::{FixtureServer, Resource};
use cris_testkit::site;

fn cris(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cris"))
        .args(args)
        .output()
        .expect("run cris")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const RECORDS: &str = r#"{
  "base_uri": "http://auris.example.org/objects#",
  "records": [
    {"id": "p1", "type": "Researcher",
     "properties": {"expertise_skill": ["Semantic Web"],
                    "member_of": [{"@id": "org1"}]}},
    {"id": "org1", "type": "OrganizationUnit"}
  ]
}"#;

#[test]
fn schema_summary() {
    let out = cris(&["schema", "--summary"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("classes 80\n"), "{text}");
    assert!(text.contains("acyclic true\n"), "{text}");

    let out = cris(&["schema"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("<http://www.w3.org/2000/01/rdf-schema#subClassOf>"));
}

#[test]
fn generate_and_embed() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.json");
    std::fs::write(&records, RECORDS).unwrap();
    let out = cris(&["generate", "--in", path(&records)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let nt = stdout(&out);
    assert!(nt.contains(
        "<http://auris.example.org/objects#p1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> \
         <http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#Researcher> ."
    ));
    assert!(nt.contains("\"Semantic Web\""));

    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"base_uri": "http://x.org/", "records": [{"id": "w", "type": "Wizard"}]}"#,
    )
    .unwrap();
    let out = cris(&["generate", "--in", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Wizard"), "{}", stderr(&out));

    let ann = dir.path().join("p1.nt");
    std::fs::write(&ann, &nt).unwrap();
    let page = dir.path().join("page.html");
    std::fs::write(
        &page,
        "<html><head><title>p</title></head><body>hi</body></html>",
    )
    .unwrap();
    let once = dir.path().join("once.html");
    let twice = dir.path().join("twice.html");
    let out = cris(&[
        "embed",
        "--annotation",
        path(&ann),
        "--html",
        path(&page),
        "--out",
        path(&once),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = cris(&[
        "embed",
        "--annotation",
        path(&ann),
        "--html",
        path(&once),
        "--out",
        path(&twice),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let once = std::fs::read_to_string(&once).unwrap();
    assert_eq!(once, std::fs::read_to_string(&twice).unwrap());
    assert!(once.contains("Semantic Web"));
}

#[test]
fn load_query_validate() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store");
    let data = dir.path().join("data.nt");
    std::fs::write(
        &data,
        "<http://a.org/p1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#Researcher> .\n\
         <http://a.org/s2> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#Student> .\n",
    )
    .unwrap();
    let out = cris(&["load", "--store", path(&store), path(&data)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(store.join("store.nt").exists());

    let out = cris(&["query", "--store", path(&store), "#Person"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let lines: Vec<String> = stdout(&out).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 3, "{lines:?}");
    assert!(lines.contains(&"<http://a.org/p1>".to_string()));

    let out = cris(&[
        "query",
        "--store",
        path(&store),
        "--format",
        "json",
        "^#Student",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"], serde_json::json!([[{"iri": "http://a.org/s2"}]]));

    let out = cris(&["query", "--store", path(&store), "select from"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains('^'));

    let out = cris(&["validate", "--store", path(&store)]);
    assert!(out.status.success(), "{}", stderr(&out));

    // a literal where project_persons expects a Person
    let bad = dir.path().join("bad.nt");
    std::fs::write(
        &bad,
        "<http://a.org/x> <http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#project_persons> \"nobody\" .\n",
    )
    .unwrap();
    let out = cris(&["validate", path(&bad)]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
}

fn run_blocking(args: Vec<String>) -> tokio::task::JoinHandle<Output> {
    tokio::task::spawn_blocking(move || {
        Command::new(env!("CARGO_BIN_EXE_cris"))
            .args(&args)
            .output()
            .expect("run cris")
    })
}

#[tokio::test(flavor = "multi_thread")]
async fn crawl_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store");
    let report = dir.path().join("report.jsonl");
    let server = FixtureServer::start(site::fixture_site()).await;

    let seeds = dir.path().join("seeds.txt");
    std::fs::write(&seeds, format!("# fixture\n{}\n", server.url("/a.html"))).unwrap();
    let args = |seeds: &Path| {
        vec![
            "crawl".to_string(),
            "--seeds".into(),
            path(seeds).into(),
            "--out".into(),
            path(&store).into(),
            "--delay".into(),
            "10".into(),
            "--report".into(),
            path(&report).into(),
        ]
    };
    let out = run_blocking(args(&seeds)).await.unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let lines = std::fs::read_to_string(&report).unwrap();
    let fetched = lines
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .filter(|v| v["outcome"] == "fetched")
        .count();
    assert_eq!(fetched, site::expected_fetched_paths().len());
    let text = std::fs::read_to_string(store.join("store.nt")).unwrap();
    assert_eq!(
        text.lines().count(),
        site::expected_triples(&server.url("")).len()
    );

    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "\n").unwrap();
    let out = run_blocking(args(&empty)).await.unwrap();
    assert_eq!(out.status.code(), Some(2));

    let missing = FixtureServer::start(BTreeMap::from([(
        "/gone".to_string(),
        Resource::html("").with_status(404),
    )]))
    .await;
    let dead = dir.path().join("dead.txt");
    std::fs::write(&dead, missing.url("/gone")).unwrap();
    let out = run_blocking(args(&dead)).await.unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
}

struct Child(std::process::Child);

impl Drop for Child {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

#[test]
fn serve_answers_stats() {
    let port = TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let addr = format!("127.0.0.1:{port}");
    let _child = Child(
        Command::new(env!("CARGO_BIN_EXE_cris"))
            .args(["serve", "--bind", &addr])
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()
            .unwrap(),
    );
    let start = Instant::now();
    let mut stream = loop {
        match TcpStream::connect(&addr) {
            Ok(s) => break s,
            Err(_) if start.elapsed() < Duration::from_secs(10) => sleep(Duration::from_millis(50)),
            Err(e) => panic!("server did not start: {e}"),
        }
    };
    stream
        .write_all(b"GET /stats HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n")
        .unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).unwrap();
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    let body = response.split("\r\n\r\n").nth(1).unwrap();
    let v: serde_json::Value = serde_json::from_str(body).unwrap();
    assert_eq!(v["schema_classes"], 80);
    assert_eq!(v["instance_triples"], 0);
}
