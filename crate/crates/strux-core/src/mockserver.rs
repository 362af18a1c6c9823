//! A tiny in-process chat-completion server for exercising the runner
//! without real network dependencies. Test support, not a product.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Instant;

/// One received request, recorded before the reply is sent.
#[derive(Debug, Clone)]
pub struct MockRequest {
    pub path: String,
    pub authorization: Option<String>,
    pub body: String,
    pub received: Instant,
}

/// Scripted reply.
#[derive(Debug, Clone)]
pub struct MockReply {
    pub status: u16,
    pub body: String,
}

impl MockReply {
    /// A well-formed completion envelope carrying `content`.
    pub fn content(content: &str) -> Self {
        let body = serde_json::json!({
            "id": "mock",
            "choices": [{"index": 0, "message": {"role": "assistant", "content": content}}]
        });
        MockReply { status: 200, body: body.to_string() }
    }

    pub fn status(status: u16, body: &str) -> Self {
        MockReply { status, body: body.to_string() }
    }
}

/// Pulls the user message text out of a recorded request body.
pub fn extract_prompt(body: &str) -> Option<String> {
    let v: serde_json::Value = serde_json::from_str(body).ok()?;
    Some(v.get("messages")?.get(0)?.get("content")?.as_str()?.to_string())
}

type Responder = Arc<dyn Fn(usize, &MockRequest) -> MockReply + Send + Sync>;

/// Threaded listener on an ephemeral localhost port. Shuts down on drop.
pub struct MockServer {
    addr: SocketAddr,
    hits: Arc<Mutex<Vec<MockRequest>>>,
    shutdown: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

impl MockServer {
    /// Starts the server; `respond` sees the zero-based request index and
    /// the parsed request.
    pub fn start<F>(respond: F) -> MockServer
    where
        F: Fn(usize, &MockRequest) -> MockReply + Send + Sync + 'static,
    {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind mock server");
        let addr = listener.local_addr().expect("local addr");
        let hits: Arc<Mutex<Vec<MockRequest>>> = Arc::new(Mutex::new(Vec::new()));
        let shutdown = Arc::new(AtomicBool::new(false));
        let responder: Responder = Arc::new(respond);

        let accept_hits = Arc::clone(&hits);
        let accept_shutdown = Arc::clone(&shutdown);
        let handle = std::thread::spawn(move || {
            for stream in listener.incoming() {
                if accept_shutdown.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(stream) = stream else { continue };
                let hits = Arc::clone(&accept_hits);
                let responder = Arc::clone(&responder);
                std::thread::spawn(move || {
                    let _ = serve_one(stream, &hits, &responder);
                });
            }
        });

        MockServer { addr, hits, shutdown, handle: Some(handle) }
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Snapshot of everything received so far.
    pub fn hits(&self) -> Vec<MockRequest> {
        self.hits.lock().unwrap().clone()
    }

    pub fn hit_count(&self) -> usize {
        self.hits.lock().unwrap().len()
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        self.shutdown.store(true, Ordering::SeqCst);
        // Wake the accept loop so it observes the flag.
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

fn serve_one(
    stream: TcpStream,
    hits: &Mutex<Vec<MockRequest>>,
    responder: &Responder,
) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut request_line = String::new();
    reader.read_line(&mut request_line)?;
    let path = request_line.split_whitespace().nth(1).unwrap_or("/").to_string();

    let mut authorization = None;
    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        reader.read_line(&mut line)?;
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((name, value)) = line.split_once(':') {
            match name.to_ascii_lowercase().as_str() {
                "authorization" => authorization = Some(value.trim().to_string()),
                "content-length" => content_length = value.trim().parse().unwrap_or(0),
                _ => {}
            }
        }
    }
    let mut body = vec![0u8; content_length];
    reader.read_exact(&mut body)?;

    let request = MockRequest {
        path,
        authorization,
        body: String::from_utf8_lossy(&body).into_owned(),
        received: Instant::now(),
    };
    let index = {
        let mut guard = hits.lock().unwrap();
        guard.push(request.clone());
        guard.len() - 1
    };
    let reply = responder(index, &request);

    let reason = match reply.status {
        200 => "OK",
        401 => "Unauthorized",
        403 => "Forbidden",
        429 => "Too Many Requests",
        500 => "Internal Server Error",
        503 => "Service Unavailable",
        _ => "Status",
    };
    let mut stream = stream;
    write!(
        stream,
        "HTTP/1.1 {} {}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
        reply.status,
        reason,
        reply.body.len(),
        reply.body
    )?;
    stream.flush()
}
