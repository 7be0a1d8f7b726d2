//! Client for an external end-to-end generator.
//!
//! Requests and responses are single JSON objects. The stdio transport
//! exchanges one object per line with a child process; the HTTP transport
//! posts the same object to `<base>/generate`.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, Command, Stdio};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ir::{linearize, IntentDocument};

pub const DEFAULT_MAX_LENGTH: usize = 512;
pub const ECHO_MODEL_ID: &str = "echo";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenRequest {
    pub input: String,
    pub max_length: usize,
    pub seed: u64,
}

impl GenRequest {
    pub fn for_document(doc: &IntentDocument, seed: u64) -> Self {
        GenRequest {
            input: linearize(doc),
            max_length: DEFAULT_MAX_LENGTH,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), WireError> {
        if self.input.trim().is_empty() {
            return Err(WireError::new(codes::BAD_REQUEST, "input is empty"));
        }
        if self.input.contains(['\n', '\r']) {
            return Err(WireError::new(codes::BAD_REQUEST, "input spans more than one line"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenResponse {
    pub output: String,
    pub model_id: String,
    pub latency_ms: f64,
}

pub mod codes {
    pub const BAD_REQUEST: &str = "bad_request";
    pub const MODEL_FAILURE: &str = "model_failure";
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Error)]
#[error("{code}: {message}")]
pub struct WireError {
    pub code: String,
    pub message: String,
}

impl WireError {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        WireError {
            code: code.to_owned(),
            message: message.into(),
        }
    }
}

/// One line on the wire from the generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WireReply {
    Error { error: WireError },
    Ok(GenResponse),
}

#[derive(Debug, Error)]
pub enum GenError {
    /// The generator cannot be reached; callers fall back to another
    /// architecture.
    #[error("generator unavailable: {0}")]
    Unavailable(String),
    #[error("generator rejected the request: {0}")]
    Remote(WireError),
    #[error("malformed generator reply: {0}")]
    Protocol(String),
}

impl GenError {
    pub fn is_unavailable(&self) -> bool {
        matches!(self, GenError::Unavailable(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Endpoint {
    Stdio { command: Vec<String> },
    Http { url: String },
}

impl Endpoint {
    /// `stdio:<program> [args..]` or an `http://` URL.
    pub fn parse(s: &str) -> Option<Self> {
        if let Some(cmd) = s.strip_prefix("stdio:") {
            let command: Vec<String> = cmd.split_whitespace().map(str::to_owned).collect();
            return (!command.is_empty()).then_some(Endpoint::Stdio { command });
        }
        if s.starts_with("http://") || s.starts_with("https://") {
            return Some(Endpoint::Http { url: s.to_owned() });
        }
        None
    }
}

type Streams = (Box<dyn Write + Send>, Box<dyn BufRead + Send>);

enum Transport {
    Lines {
        streams: Mutex<Option<Streams>>,
        child: Option<Mutex<Child>>,
    },
    Http {
        agent: ureq::Agent,
        url: String,
    },
}

pub struct NeuralClient {
    transport: Transport,
}

impl NeuralClient {
    pub fn connect(endpoint: &Endpoint, timeout: Duration) -> Result<Self, GenError> {
        match endpoint {
            Endpoint::Stdio { command } => {
                let mut child = Command::new(&command[0])
                    .args(&command[1..])
                    .stdin(Stdio::piped())
                    .stdout(Stdio::piped())
                    .stderr(Stdio::inherit())
                    .spawn()
                    .map_err(|e| GenError::Unavailable(format!("{}: {e}", command[0])))?;
                let stdin = child.stdin.take().expect("piped stdin");
                let stdout = child.stdout.take().expect("piped stdout");
                let mut client = NeuralClient::from_streams(Box::new(stdin), Box::new(BufReader::new(stdout)));
                if let Transport::Lines { child: slot, .. } = &mut client.transport {
                    *slot = Some(Mutex::new(child));
                }
                Ok(client)
            }
            Endpoint::Http { url } => {
                let config = ureq::Agent::config_builder()
                    .http_status_as_error(false)
                    .timeout_global(Some(timeout))
                    .build();
                let url = if url.ends_with("/generate") {
                    url.clone()
                } else {
                    format!("{}/generate", url.trim_end_matches('/'))
                };
                Ok(NeuralClient {
                    transport: Transport::Http {
                        agent: ureq::Agent::new_with_config(config),
                        url,
                    },
                })
            }
        }
    }

    /// Line transport over arbitrary streams.
    pub fn from_streams(writer: Box<dyn Write + Send>, reader: Box<dyn BufRead + Send>) -> Self {
        NeuralClient {
            transport: Transport::Lines {
                streams: Mutex::new(Some((writer, reader))),
                child: None,
            },
        }
    }

    pub fn generate(&self, req: &GenRequest) -> Result<GenResponse, GenError> {
        req.validate().map_err(GenError::Remote)?;
        let line = serde_json::to_string(req).expect("request serializes");
        let reply = match &self.transport {
            Transport::Lines { streams, .. } => {
                let mut guard = streams.lock().unwrap_or_else(|p| p.into_inner());
                let Some((w, r)) = guard.as_mut() else {
                    return Err(GenError::Unavailable("generator exited".into()));
                };
                let mut buf = String::new();
                let exchange = writeln!(w, "{line}")
                    .and_then(|_| w.flush())
                    .and_then(|_| r.read_line(&mut buf));
                match exchange {
                    Ok(n) if n > 0 => buf,
                    Ok(_) => {
                        *guard = None;
                        return Err(GenError::Unavailable("generator closed its output".into()));
                    }
                    Err(e) => {
                        *guard = None;
                        return Err(GenError::Unavailable(e.to_string()));
                    }
                }
            }
            Transport::Http { agent, url } => {
                let resp = agent
                    .post(url)
                    .header("Content-Type", "application/json")
                    .send(line.as_str())
                    .map_err(|e| GenError::Unavailable(e.to_string()))?;
                let status = resp.status().as_u16();
                if status == 502 || status == 503 || status == 504 {
                    return Err(GenError::Unavailable(format!("HTTP {status}")));
                }
                resp.into_body()
                    .read_to_string()
                    .map_err(|e| GenError::Unavailable(e.to_string()))?
            }
        };
        match serde_json::from_str::<WireReply>(reply.trim()) {
            Ok(WireReply::Ok(r)) => Ok(r),
            Ok(WireReply::Error { error }) => Err(GenError::Remote(error)),
            Err(e) => Err(GenError::Protocol(e.to_string())),
        }
    }
}

impl std::fmt::Debug for NeuralClient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.transport {
            Transport::Lines { .. } => f.write_str("NeuralClient(lines)"),
            Transport::Http { url, .. } => write!(f, "NeuralClient({url})"),
        }
    }
}

impl Drop for NeuralClient {
    fn drop(&mut self) {
        if let Transport::Lines { streams, child } = &mut self.transport {
            // closing stdin lets a well-behaved server exit
            streams.get_mut().map(Option::take).ok();
            if let Some(c) = child {
                let c = c.get_mut().unwrap_or_else(|p| p.into_inner());
                if c.try_wait().ok().flatten().is_none() {
                    let _ = c.kill();
                }
                let _ = c.wait();
            }
        }
    }
}

/// The reference fixture model: returns its input.
pub fn echo_reply(line: &str) -> WireReply {
    let start = Instant::now();
    let reply = match serde_json::from_str::<GenRequest>(line) {
        Err(e) => Err(WireError::new(codes::BAD_REQUEST, e.to_string())),
        Ok(req) => req.validate().map(|_| req.input),
    };
    match reply {
        Ok(output) => WireReply::Ok(GenResponse {
            output,
            model_id: ECHO_MODEL_ID.into(),
            latency_ms: start.elapsed().as_secs_f64() * 1e3,
        }),
        Err(error) => WireReply::Error { error },
    }
}

/// Serves the echo model over line-delimited streams until EOF.
pub fn serve_echo(reader: impl BufRead, mut writer: impl Write) -> std::io::Result<()> {
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = serde_json::to_string(&echo_reply(&line)).expect("reply serializes");
        writeln!(writer, "{reply}")?;
        writer.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn echo_client() -> (NeuralClient, std::thread::JoinHandle<()>) {
        let (req_r, req_w) = std::io::pipe().unwrap();
        let (resp_r, resp_w) = std::io::pipe().unwrap();
        let server = std::thread::spawn(move || serve_echo(BufReader::new(req_r), resp_w).unwrap());
        (
            NeuralClient::from_streams(Box::new(req_w), Box::new(BufReader::new(resp_r))),
            server,
        )
    }

    #[test]
    fn echo_round_trip() {
        let (client, server) = echo_client();
        let req = GenRequest {
            input: r#"WEATHER(condition="sunny",temperature="26ºC")"#.into(),
            max_length: 64,
            seed: 3,
        };
        let resp = client.generate(&req).unwrap();
        assert_eq!(
            (resp.output.as_str(), resp.model_id.as_str()),
            (req.input.as_str(), "echo")
        );
        drop(client);
        server.join().unwrap();
    }

    #[test]
    fn bad_requests() {
        let reply = echo_reply(r#"{"input":"","max_length":1,"seed":0}"#);
        assert!(matches!(reply, WireReply::Error { error } if error.code == codes::BAD_REQUEST));
        assert!(matches!(echo_reply("nope"), WireReply::Error { .. }));
        let (client, _server) = echo_client();
        let req = GenRequest {
            input: "a\nb".into(),
            max_length: 1,
            seed: 0,
        };
        assert!(matches!(client.generate(&req), Err(GenError::Remote(_))));
    }

    #[test]
    fn dead_endpoints_are_unavailable() {
        let missing = Endpoint::Stdio {
            command: vec!["/nonexistent/generator".into()],
        };
        assert!(NeuralClient::connect(&missing, Duration::from_secs(1))
            .unwrap_err()
            .is_unavailable());

        let port = std::net::TcpListener::bind("127.0.0.1:0")
            .unwrap()
            .local_addr()
            .unwrap()
            .port();
        let http = Endpoint::parse(&format!("http://127.0.0.1:{port}")).unwrap();
        let client = NeuralClient::connect(&http, Duration::from_secs(2)).unwrap();
        let req = GenRequest {
            input: "OIL(level=\"1\")".into(),
            max_length: 8,
            seed: 0,
        };
        assert!(client.generate(&req).unwrap_err().is_unavailable());

        let (r, w) = std::io::pipe().unwrap();
        drop(w);
        let (_keep, w2) = std::io::pipe().unwrap();
        let closed = NeuralClient::from_streams(Box::new(w2), Box::new(BufReader::new(r)));
        assert!(closed.generate(&req).unwrap_err().is_unavailable());
    }

    #[test]
    fn endpoint_specs() {
        assert_eq!(
            Endpoint::parse("stdio:azul echo-generator"),
            Some(Endpoint::Stdio {
                command: vec!["azul".into(), "echo-generator".into()]
            })
        );
        assert!(Endpoint::parse("tcp:1").is_none());
    }
}
