use std::fs;
use std::io::{Read, Write};
use std::path::{Component, Path, PathBuf};

use annot_core::protocol::SessionHost;
use annot_core::serialize_config;
use anyhow::{anyhow, Result};
use tiny_http::{Header, Method, Request, Response, Server};

use crate::args::ServeArgs;
use crate::commands::{load_tasks, read};

const MAX_BODY: u64 = 64 * 1024 * 1024;

const PLACEHOLDER: &str = "<!doctype html>
<html><head><meta charset=\"utf-8\"><title>annot</title></head>
<body>
<p>No UI bundle configured. Start with <code>--ui-dir</code> to serve one.</p>
<p>Endpoints: <code>GET /api/corpus</code>, <code>GET /api/config</code>,
<code>POST /api/session</code>.</p>
</body></html>
";

/// Everything a request may touch. Requests are handled one at a time, so
/// the session host needs no locking.
pub struct State {
    corpus: String,
    config: String,
    ui_dir: Option<PathBuf>,
    host: SessionHost,
}

pub struct Reply {
    pub status: u16,
    pub content_type: &'static str,
    pub body: Vec<u8>,
}

impl Reply {
    fn new(status: u16, content_type: &'static str, body: impl Into<Vec<u8>>) -> Reply {
        Reply {
            status,
            content_type,
            body: body.into(),
        }
    }

    fn text(status: u16, body: &str) -> Reply {
        Reply::new(status, "text/plain; charset=utf-8", body)
    }
}

impl State {
    pub fn new(corpus: String, config: String, ui_dir: Option<PathBuf>) -> State {
        State {
            corpus,
            config,
            ui_dir,
            host: SessionHost::new(),
        }
    }

    pub fn route(&mut self, method: &Method, url: &str, body: &str) -> Reply {
        let path = url.split(['?', '#']).next().unwrap_or("/");
        match (method, path) {
            (Method::Get, "/api/corpus") => Reply::text(200, &self.corpus),
            (Method::Get, "/api/config") => {
                Reply::new(200, "application/json", self.config.as_bytes())
            }
            (Method::Post, "/api/session") => {
                Reply::new(200, "application/json", self.host.handle_json(body))
            }
            (_, "/api/corpus" | "/api/config" | "/api/session") => {
                Reply::text(405, "method not allowed")
            }
            (Method::Get | Method::Head, _) => self.static_file(path),
            _ => Reply::text(405, "method not allowed"),
        }
    }

    fn static_file(&self, path: &str) -> Reply {
        let Some(root) = &self.ui_dir else {
            return match path {
                "/" | "/index.html" => Reply::new(200, "text/html; charset=utf-8", PLACEHOLDER),
                _ => Reply::text(404, "not found"),
            };
        };
        let Some(relative) = safe_relative(path) else {
            return Reply::text(400, "bad path");
        };
        let mut file = root.join(relative);
        if file.is_dir() {
            file.push("index.html");
        }
        match fs::read(&file) {
            Ok(bytes) => Reply::new(200, content_type(&file), bytes),
            Err(_) => Reply::text(404, "not found"),
        }
    }
}

/// The URL path as a relative file path, or `None` if it tries to leave
/// the served directory.
fn safe_relative(url_path: &str) -> Option<PathBuf> {
    let trimmed = url_path.trim_start_matches('/');
    let mut out = PathBuf::new();
    for component in Path::new(trimmed).components() {
        match component {
            Component::Normal(part) => out.push(part),
            Component::CurDir => {}
            _ => return None,
        }
    }
    Some(out)
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()) {
        Some("html") => "text/html; charset=utf-8",
        Some("js" | "mjs") => "text/javascript; charset=utf-8",
        Some("css") => "text/css; charset=utf-8",
        Some("json") => "application/json",
        Some("svg") => "image/svg+xml",
        Some("png") => "image/png",
        Some("wasm") => "application/wasm",
        _ => "application/octet-stream",
    }
}

fn respond(mut request: Request, state: &mut State) -> std::io::Result<()> {
    let mut body = String::new();
    let read = request.as_reader().take(MAX_BODY).read_to_string(&mut body);
    let reply = match read {
        Ok(_) => state.route(request.method(), request.url(), &body),
        Err(_) => Reply::text(400, "request body is not UTF-8"),
    };
    let header = Header::from_bytes("Content-Type", reply.content_type).expect("static header");
    request.respond(
        Response::from_data(reply.body)
            .with_status_code(reply.status)
            .with_header(header),
    )
}

pub fn run(args: &ServeArgs, out: &mut dyn Write) -> Result<u8> {
    let corpus = read(&args.input)?;
    let config = match &args.tasks {
        Some(path) => serialize_config(&load_tasks(Some(path))?),
        None => "[]".to_string(),
    };
    let server = Server::http(("127.0.0.1", args.port)).map_err(|e| anyhow!("cannot bind: {e}"))?;
    let addr = server
        .server_addr()
        .to_ip()
        .ok_or_else(|| anyhow!("server is not bound to an IP address"))?;
    writeln!(out, "listening on http://{addr}")?;
    out.flush()?;

    let mut state = State::new(corpus, config, args.ui_dir.clone());
    for request in server.incoming_requests() {
        if let Err(e) = respond(request, &mut state) {
            eprintln!("warning: failed to send a response: {e}");
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(ui: Option<PathBuf>) -> State {
        State::new("1\tx\n".into(), "[]".into(), ui)
    }

    #[test]
    fn api_routes() {
        let mut s = state(None);
        assert_eq!(s.route(&Method::Get, "/api/corpus", "").body, b"1\tx\n");
        assert_eq!(s.route(&Method::Get, "/api/config?x=1", "").body, b"[]");
        let r = s.route(&Method::Post, "/api/session", r#"{"op":"nope"}"#);
        let v: serde_json::Value = serde_json::from_slice(&r.body).unwrap();
        assert_eq!(v["error"]["code"], "unknown_op");
        assert_eq!(s.route(&Method::Delete, "/api/corpus", "").status, 405);
        assert_eq!(s.route(&Method::Get, "/", "").status, 200);
        assert_eq!(s.route(&Method::Get, "/app.js", "").status, 404);
    }

    #[test]
    fn static_files_stay_inside_root() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("index.html"), "<p>hi</p>").unwrap();
        let mut s = state(Some(dir.path().to_path_buf()));
        let r = s.route(&Method::Get, "/", "");
        assert_eq!(
            (r.status, r.body.as_slice()),
            (200, b"<p>hi</p>".as_slice())
        );
        assert_eq!(r.content_type, "text/html; charset=utf-8");
        assert_eq!(s.route(&Method::Get, "/../secret", "").status, 400);
        assert_eq!(s.route(&Method::Get, "/a/../../b", "").status, 400);
        assert_eq!(s.route(&Method::Get, "/missing.css", "").status, 404);
    }

    #[test]
    fn relative_paths() {
        assert_eq!(safe_relative("/a/./b.js"), Some(PathBuf::from("a/b.js")));
        assert_eq!(safe_relative("/"), Some(PathBuf::new()));
        assert_eq!(safe_relative("/x/.."), None);
    }
}
