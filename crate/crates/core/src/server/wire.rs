//! Messages exchanged over `/ws`, one JSON object per text frame, tagged by
//! `kind`. Every field is mandatory and unknown fields are rejected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::sync::HighlightDirective;
use crate::views::ElementKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementState {
    Selected,
    Highlighted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Origin {
    pub view_id: String,
    pub element_key: ElementKey,
    pub state: ElementState,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WireMessage {
    Hello {
        role: String,
        arrangement: Vec<String>,
    },
    Select {
        view_id: String,
        element_key: ElementKey,
        graph_version: u64,
    },
    Highlight {
        origin: Origin,
        highlights: BTreeMap<String, Vec<ElementKey>>,
        graph_version: u64,
    },
    Content {
        view_id: String,
        document: String,
        graph_version: u64,
    },
    Refresh {
        graph_version: u64,
    },
    Error {
        code: String,
        message: String,
    },
    /// Sent by a client to change its arrangement, and by the server to
    /// acknowledge a hello or an arrangement change.
    Arrangement {
        views: Vec<String>,
    },
}

pub const KINDS: [&str; 7] = ["hello", "select", "highlight", "content", "error", "arrangement", "refresh"];

impl WireMessage {
    pub fn kind(&self) -> &'static str {
        match self {
            WireMessage::Hello { .. } => "hello",
            WireMessage::Select { .. } => "select",
            WireMessage::Highlight { .. } => "highlight",
            WireMessage::Content { .. } => "content",
            WireMessage::Refresh { .. } => "refresh",
            WireMessage::Error { .. } => "error",
            WireMessage::Arrangement { .. } => "arrangement",
        }
    }

    pub fn error(code: &str, message: impl Into<String>) -> Self {
        WireMessage::Error { code: code.to_string(), message: message.into() }
    }

    pub fn encode(&self) -> String {
        serde_json::to_string(self).expect("wire messages always serialize")
    }

    /// Parses one frame. Failures come back as the error message to send.
    pub fn decode(text: &str) -> Result<WireMessage, WireMessage> {
        let raw: serde_json::Value =
            serde_json::from_str(text).map_err(|e| WireMessage::error("malformed", format!("not JSON: {e}")))?;
        let kind = raw
            .get("kind")
            .and_then(|k| k.as_str())
            .ok_or_else(|| WireMessage::error("malformed", "message has no string `kind`"))?;
        if !KINDS.contains(&kind) {
            return Err(WireMessage::error("unknown_kind", format!("unknown message kind `{kind}`")));
        }
        serde_json::from_value(raw).map_err(|e| WireMessage::error("malformed", e.to_string()))
    }

    pub fn from_directive(d: &HighlightDirective) -> Self {
        WireMessage::Highlight {
            origin: Origin {
                view_id: d.origin_view.clone(),
                element_key: d.origin_key.clone(),
                state: ElementState::Selected,
            },
            highlights: d.highlights.iter().map(|(v, keys)| (v.clone(), keys.iter().cloned().collect())).collect(),
            graph_version: d.graph_version,
        }
    }
}
