// The screen: an arrangement of panes driven by the /ws channel. Every
// transition is a pure function returning the next screen and the frames
// to send, so a recorded message log replays to the identical pane model.

import { type Content, DocumentError, elementKey, parseContent, type Schema, validateContent } from "./document.js";
import type { WireMessage } from "./wire.js";

export type RendererKind = "report_pane" | "gantt_pane" | "mockup_pane" | "table_pane";

const RENDERERS: Record<string, RendererKind> = {
  report: "report_pane",
  planning: "gantt_pane",
  mockup: "mockup_pane",
};

export const rendererFor = (viewId: string): RendererKind => RENDERERS[viewId] ?? "table_pane";

export interface Pane {
  viewId: string;
  renderer: RendererKind;
  content: Content | null;
  /** Why the last content could not be shown. */
  diagnostic: string | null;
  /** Set by a refresh until the new content arrives. */
  stale: boolean;
  keys: string[];
  selected: string | null;
  highlighted: string[];
}

export type Connection = "connecting" | "open" | "lost";

export interface Screen {
  connection: Connection;
  role: string;
  arrangement: string[];
  graphVersion: number;
  /** True once the server acknowledged a hello. */
  session: boolean;
  panes: Record<string, Pane>;
  selection: { viewId: string; key: string } | null;
  schemas: Record<string, Schema>;
  banner: string | null;
  error: string | null;
}

export interface Step {
  screen: Screen;
  send: WireMessage[];
}

export const COORDINATOR = "coordinator";

function emptyPane(viewId: string): Pane {
  return {
    viewId,
    renderer: rendererFor(viewId),
    content: null,
    diagnostic: null,
    stale: false,
    keys: [],
    selected: null,
    highlighted: [],
  };
}

export function initialScreen(role: string, arrangement: string[], schemas: Record<string, Schema> = {}): Screen {
  return {
    connection: "connecting",
    role,
    arrangement: [...arrangement],
    graphVersion: 0,
    session: false,
    panes: Object.fromEntries(arrangement.map((v) => [v, emptyPane(v)])),
    selection: null,
    schemas,
    banner: null,
    error: null,
  };
}

const hello = (s: Screen): WireMessage => ({ kind: "hello", role: s.role, arrangement: [...s.arrangement] });

function mapPanes(s: Screen, f: (p: Pane) => Pane): Record<string, Pane> {
  return Object.fromEntries(Object.entries(s.panes).map(([v, p]) => [v, f(p)]));
}

function withArrangement(s: Screen, views: string[]): Screen {
  const panes = Object.fromEntries(views.map((v) => [v, s.panes[v] ?? emptyPane(v)]));
  const selection = s.selection && views.includes(s.selection.viewId) ? s.selection : null;
  return { ...s, arrangement: [...views], panes, selection };
}

/** The socket opened; greet the server. */
export function connected(s: Screen): Step {
  const next = { ...s, connection: "open" as const, banner: null, session: false };
  return { screen: next, send: [hello(next)] };
}

export function connectionLost(s: Screen): Screen {
  return { ...s, connection: "lost", session: false, banner: "connection lost" };
}

function loadContent(s: Screen, m: Extract<WireMessage, { kind: "content" }>): Screen {
  const pane = s.panes[m.view_id];
  if (!pane) return s;
  let content: Content | null = null;
  let diagnostic: string | null = null;
  try {
    content = parseContent(m.document);
    const schema = s.schemas[m.view_id];
    const issues = schema ? validateContent(schema, content) : [];
    if (content.viewId !== m.view_id) diagnostic = `document is for view ${content.viewId}`;
    else if (issues.length > 0) diagnostic = issues.map((i) => `${i.subject}: ${i.message}`).join("\n");
  } catch (e) {
    diagnostic = e instanceof DocumentError ? `unreadable content at ${e.message}` : String(e);
  }
  const keys = diagnostic === null && content ? content.elements.map(elementKey) : [];
  const selected = pane.selected !== null && keys.includes(pane.selected) ? pane.selected : null;
  const next: Pane = {
    ...pane,
    content: diagnostic === null ? content : null,
    diagnostic,
    stale: false,
    keys,
    selected,
    highlighted: pane.highlighted.filter((k) => keys.includes(k)),
  };
  const selection = s.selection?.viewId === m.view_id && selected === null ? null : s.selection;
  return { ...s, graphVersion: m.graph_version, panes: { ...s.panes, [m.view_id]: next }, selection };
}

function applyHighlight(s: Screen, m: Extract<WireMessage, { kind: "highlight" }>): Step {
  if (m.graph_version !== s.graphVersion) {
    // Out of date: fetch a fresh snapshot, apply nothing.
    return { screen: s, send: [hello(s)] };
  }
  const origin = m.origin;
  const panes = mapPanes(s, (p) => {
    if (p.viewId === origin.view_id) {
      const sel = p.keys.includes(origin.element_key) ? origin.element_key : null;
      return { ...p, selected: sel, highlighted: [] };
    }
    const want = m.highlights[p.viewId] ?? [];
    return { ...p, selected: null, highlighted: p.keys.filter((k) => want.includes(k)) };
  });
  const selection = panes[origin.view_id]?.selected ? { viewId: origin.view_id, key: origin.element_key } : null;
  return { screen: { ...s, panes, selection }, send: [] };
}

/** One inbound frame. */
export function receive(s: Screen, m: WireMessage): Step {
  switch (m.kind) {
    case "arrangement":
      return { screen: { ...withArrangement(s, m.views), session: true, error: null }, send: [] };
    case "content":
      return { screen: loadContent(s, m), send: [] };
    case "highlight":
      return applyHighlight(s, m);
    case "refresh": {
      const panes = mapPanes(s, (p) => ({ ...p, stale: true, selected: null, highlighted: [] }));
      return { screen: { ...s, graphVersion: m.graph_version, panes, selection: null }, send: [] };
    }
    case "error":
      return { screen: { ...s, error: `${m.code}: ${m.message}` }, send: [] };
    case "hello":
    case "select":
      return { screen: { ...s, error: `unexpected ${m.kind} from server` }, send: [] };
  }
}

/**
 * A click on an element. Marks it selected and clears every highlight right
 * away; the server's reply fills the other panes in. Ignored, with the
 * connection banner shown, while disconnected.
 */
export function click(s: Screen, viewId: string, key: string): Step {
  if (s.connection !== "open" || !s.session) {
    return { screen: { ...s, banner: "connection lost" }, send: [] };
  }
  const pane = s.panes[viewId];
  if (!pane || !pane.keys.includes(key)) return { screen: s, send: [] };
  const panes = mapPanes(s, (p) => ({ ...p, highlighted: [], selected: p.viewId === viewId ? key : null }));
  return {
    screen: { ...s, panes, selection: { viewId, key } },
    send: [{ kind: "select", view_id: viewId, element_key: key, graph_version: s.graphVersion }],
  };
}

function rearrange(s: Screen, views: string[], role: string = s.role): Step {
  if (new Set(views).size !== views.length) {
    const dup = views.find((v, i) => views.indexOf(v) !== i);
    return { screen: { ...s, error: `view ${dup} is already on screen` }, send: [] };
  }
  if (views.length === 0) return { screen: { ...s, error: "an arrangement needs at least one view" }, send: [] };
  const next = { ...withArrangement(s, views), role, error: null };
  if (role !== s.role) {
    next.panes = mapPanes(next, (p) => ({ ...emptyPane(p.viewId) }));
    next.selection = null;
  }
  const send: WireMessage[] = s.connection === "open" ? [hello(next)] : [];
  return { screen: next, send };
}

export const addPane = (s: Screen, viewId: string): Step => rearrange(s, [...s.arrangement, viewId]);

export const removePane = (s: Screen, viewId: string): Step => rearrange(s, s.arrangement.filter((v) => v !== viewId));

export function movePane(s: Screen, viewId: string, index: number): Step {
  const rest = s.arrangement.filter((v) => v !== viewId);
  if (rest.length === s.arrangement.length) return { screen: s, send: [] };
  rest.splice(Math.max(0, Math.min(index, rest.length)), 0, viewId);
  return rearrange(s, rest);
}

export const setRole = (s: Screen, role: string): Step => rearrange(s, s.arrangement, role);

/** Folds a log of inbound frames over the initial screen of a session. */
export function replay(start: Screen, log: WireMessage[]): Screen {
  let s = start.connection === "open" ? start : { ...start, connection: "open" as const };
  for (const m of log) s = receive(s, m).screen;
  return s;
}

/** Screen-level invariants; returns what is violated. */
export function violations(s: Screen): string[] {
  const out: string[] = [];
  const selected = Object.values(s.panes).filter((p) => p.selected !== null);
  if (selected.length > 1) out.push(`${selected.length} panes hold a selection`);
  for (const p of Object.values(s.panes)) {
    for (const k of [...p.highlighted, ...(p.selected ? [p.selected] : [])]) {
      if (!p.keys.includes(k)) out.push(`${p.viewId} shows ${k}, absent from its content`);
    }
  }
  if (s.selection && s.panes[s.selection.viewId]?.selected !== s.selection.key) out.push("selection out of sync with panes");
  return out;
}
