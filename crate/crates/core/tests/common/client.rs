//! A scripted websocket client and the pane model a screen would show.

use std::collections::{BTreeMap, BTreeSet};
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use coopsync::server::wire::WireMessage;
use coopsync::sync::Workspace;
use coopsync::views::{ElementKey, ViewContent};
use futures::{SinkExt, StreamExt};
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::oneshot;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{MaybeTlsStream, WebSocketStream};

pub struct Server {
    pub addr: SocketAddr,
    stop: Option<oneshot::Sender<()>>,
    task: tokio::task::JoinHandle<std::io::Result<()>>,
}

impl Server {
    pub async fn start(ws: Workspace) -> Server {
        let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
        let addr = listener.local_addr().unwrap();
        let (tx, rx) = oneshot::channel();
        let task = tokio::spawn(coopsync::server::serve(listener, Arc::new(ws), async {
            let _ = rx.await;
        }));
        Server { addr, stop: Some(tx), task }
    }

    pub fn url(&self, path: &str) -> String {
        format!("http://{}{path}", self.addr)
    }

    pub async fn stop(mut self) {
        let _ = self.stop.take().unwrap().send(());
        self.task.await.unwrap().unwrap();
    }
}

pub struct Client {
    socket: WebSocketStream<MaybeTlsStream<TcpStream>>,
    /// Every message received, in order.
    pub log: Vec<WireMessage>,
}

impl Client {
    pub async fn connect(server: &Server) -> Client {
        let (socket, _) = tokio_tungstenite::connect_async(format!("ws://{}/ws", server.addr)).await.unwrap();
        Client { socket, log: Vec::new() }
    }

    pub async fn send_raw(&mut self, text: &str) {
        self.socket.send(Message::text(text)).await.unwrap();
    }

    pub async fn send(&mut self, m: &WireMessage) {
        self.send_raw(&m.encode()).await;
    }

    pub async fn recv(&mut self) -> WireMessage {
        loop {
            let frame = tokio::time::timeout(Duration::from_secs(10), self.socket.next())
                .await
                .expect("server replied in time")
                .expect("socket open")
                .unwrap();
            if let Message::Text(t) = frame {
                let m = WireMessage::decode(t.as_str()).expect("server sends valid messages");
                self.log.push(m.clone());
                return m;
            }
        }
    }

    /// Receives `n` messages.
    pub async fn recv_n(&mut self, n: usize) -> Vec<WireMessage> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(self.recv().await);
        }
        out
    }

    /// Hello, then the acknowledgement and one content message per view.
    pub async fn hello(&mut self, role: &str, views: &[&str]) -> Vec<WireMessage> {
        self.send(&WireMessage::Hello {
            role: role.into(),
            arrangement: views.iter().map(|s| s.to_string()).collect(),
        })
        .await;
        self.recv_n(views.len() + 1).await
    }

    pub async fn select(&mut self, view: &str, key: &str, version: u64) -> WireMessage {
        self.send(&WireMessage::Select {
            view_id: view.into(),
            element_key: key.parse().unwrap(),
            graph_version: version,
        })
        .await;
        self.recv().await
    }

    pub async fn close(mut self) {
        let _ = self.socket.close(None).await;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Pane {
    pub keys: BTreeSet<ElementKey>,
    pub selected: Option<ElementKey>,
    pub highlighted: BTreeSet<ElementKey>,
}

/// Pane state rebuilt from a message log. Highlights replace the previous
/// set; content and refresh clear the selection.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Screen {
    pub version: u64,
    pub panes: BTreeMap<String, Pane>,
}

impl Screen {
    pub fn replay<'a>(log: impl IntoIterator<Item = &'a WireMessage>) -> Screen {
        let mut s = Screen::default();
        for m in log {
            s.apply(m);
        }
        s
    }

    pub fn apply(&mut self, m: &WireMessage) {
        match m {
            WireMessage::Arrangement { views } => {
                self.panes.retain(|v, _| views.contains(v));
                for v in views {
                    self.panes.entry(v.clone()).or_default();
                }
            }
            WireMessage::Content { view_id, document, graph_version } => {
                let c = ViewContent::parse_document(document).expect("served content parses");
                self.version = *graph_version;
                let pane = self.panes.entry(view_id.clone()).or_default();
                *pane = Pane { keys: c.keys().collect(), ..Pane::default() };
            }
            WireMessage::Highlight { origin, highlights, graph_version } => {
                if *graph_version != self.version {
                    return;
                }
                for (v, pane) in self.panes.iter_mut() {
                    pane.selected = (v == &origin.view_id).then(|| origin.element_key.clone());
                    pane.highlighted = highlights.get(v).map(|ks| ks.iter().cloned().collect()).unwrap_or_default();
                }
            }
            WireMessage::Refresh { graph_version } => {
                self.version = *graph_version;
                for pane in self.panes.values_mut() {
                    pane.selected = None;
                    pane.highlighted.clear();
                }
            }
            _ => {}
        }
    }

    /// At most one selection; highlights and selection within content.
    pub fn consistent(&self) -> bool {
        let selected = self.panes.values().filter(|p| p.selected.is_some()).count();
        selected <= 1
            && self
                .panes
                .values()
                .all(|p| p.highlighted.is_subset(&p.keys) && p.selected.as_ref().is_none_or(|k| p.keys.contains(k)))
    }
}

/// One HTTP/1.1 request over a fresh connection: `(status, headers, body)`.
pub async fn http(addr: SocketAddr, method: &str, path: &str, body: &str) -> (u16, Vec<(String, String)>, String) {
    use tokio::io::{AsyncReadExt, AsyncWriteExt};
    let mut s = TcpStream::connect(addr).await.unwrap();
    let req = format!(
        "{method} {path} HTTP/1.1\r\nHost: {addr}\r\nContent-Type: text/plain\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    );
    s.write_all(req.as_bytes()).await.unwrap();
    let mut raw = Vec::new();
    s.read_to_end(&mut raw).await.unwrap();
    let raw = String::from_utf8(raw).unwrap();
    let (head, body) = raw.split_once("\r\n\r\n").unwrap();
    let mut lines = head.lines();
    let status = lines.next().unwrap().split_whitespace().nth(1).unwrap().parse().unwrap();
    let headers = lines
        .filter_map(|l| l.split_once(':'))
        .map(|(k, v)| (k.trim().to_ascii_lowercase(), v.trim().to_string()))
        .collect();
    (status, headers, body.to_string())
}
