//! A tiny static HTTP server for crawler tests, with a request log.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::extract::State;
use axum::http::{header, HeaderMap, StatusCode, Uri};
use axum::response::Response;
use axum::Router;
use tokio::task::JoinHandle;

#[derive(Debug, Clone)]
pub struct Resource {
    pub status: u16,
    pub content_type: String,
    pub body: Vec<u8>,
    /// Extra `Location` header for redirects.
    pub location: Option<String>,
    pub delay: Duration,
}

impl Resource {
    pub fn new(content_type: &str, body: impl Into<Vec<u8>>) -> Self {
        Resource {
            status: 200,
            content_type: content_type.to_string(),
            body: body.into(),
            location: None,
            delay: Duration::ZERO,
        }
    }

    pub fn html(body: &str) -> Self {
        Self::new("text/html; charset=utf-8", body)
    }

    pub fn redirect(to: &str) -> Self {
        Resource {
            status: 302,
            location: Some(to.to_string()),
            ..Self::new("text/plain", "")
        }
    }

    pub fn with_status(mut self, status: u16) -> Self {
        self.status = status;
        self
    }

    pub fn with_delay(mut self, delay: Duration) -> Self {
        self.delay = delay;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Hit {
    pub path: String,
    /// `Host` header as sent, including port.
    pub host: String,
    pub at: Instant,
}

#[derive(Clone)]
struct Shared {
    routes: Arc<BTreeMap<String, Resource>>,
    log: Arc<Mutex<Vec<Hit>>>,
}

pub struct FixtureServer {
    pub addr: SocketAddr,
    log: Arc<Mutex<Vec<Hit>>>,
    task: JoinHandle<()>,
}

impl FixtureServer {
    /// Serves `routes` (keyed by path, e.g. `/a.html`) on an ephemeral port.
    pub async fn start(routes: BTreeMap<String, Resource>) -> FixtureServer {
        let shared = Shared {
            routes: Arc::new(routes),
            log: Arc::default(),
        };
        let log = shared.log.clone();
        let app = Router::new().fallback(serve).with_state(shared);
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
        let addr = listener.local_addr().unwrap();
        let task = tokio::spawn(async move {
            axum::serve(listener, app).await.unwrap();
        });
        FixtureServer { addr, log, task }
    }

    /// `http://127.0.0.1:PORT` + path.
    pub fn url(&self, path: &str) -> String {
        format!("http://{}{path}", self.addr)
    }

    /// Same server reached under the `localhost` name, a second host.
    pub fn alt_url(&self, path: &str) -> String {
        format!("http://localhost:{}{path}", self.addr.port())
    }

    pub fn hits(&self) -> Vec<Hit> {
        self.log.lock().unwrap().clone()
    }

    pub fn paths(&self) -> Vec<String> {
        self.hits().into_iter().map(|h| h.path).collect()
    }
}

impl Drop for FixtureServer {
    fn drop(&mut self) {
        self.task.abort();
    }
}

async fn serve(State(shared): State<Shared>, uri: Uri, headers: HeaderMap) -> Response {
    let path = uri.path().to_string();
    shared.log.lock().unwrap().push(Hit {
        path: path.clone(),
        host: headers
            .get(header::HOST)
            .and_then(|h| h.to_str().ok())
            .unwrap_or_default()
            .to_string(),
        at: Instant::now(),
    });
    let Some(res) = shared.routes.get(&path).cloned() else {
        return Response::builder()
            .status(StatusCode::NOT_FOUND)
            .body(Body::from("not found"))
            .unwrap();
    };
    if !res.delay.is_zero() {
        tokio::time::sleep(res.delay).await;
    }
    let mut builder = Response::builder()
        .status(res.status)
        .header(header::CONTENT_TYPE, res.content_type);
    if let Some(location) = res.location {
        builder = builder.header(header::LOCATION, location);
    }
    builder.body(Body::from(res.body)).unwrap()
}
