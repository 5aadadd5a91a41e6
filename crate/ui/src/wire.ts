// Messages on the server's /ws channel: one JSON object per text frame,
// tagged by `kind`. Every field is mandatory and unknown fields are rejected,
// mirroring the server.

export type ElementState = "selected" | "highlighted";

export interface Origin {
  view_id: string;
  element_key: string;
  state: ElementState;
}

export type WireMessage =
  | { kind: "hello"; role: string; arrangement: string[] }
  | { kind: "select"; view_id: string; element_key: string; graph_version: number }
  | { kind: "highlight"; origin: Origin; highlights: Record<string, string[]>; graph_version: number }
  | { kind: "content"; view_id: string; document: string; graph_version: number }
  | { kind: "refresh"; graph_version: number }
  | { kind: "error"; code: string; message: string }
  | { kind: "arrangement"; views: string[] };

export type Kind = WireMessage["kind"];

// Field order per kind. The server serializes fields in this order, and
// `encode` does the same so frames compare byte for byte.
const FIELDS: Record<Kind, readonly string[]> = {
  hello: ["role", "arrangement"],
  select: ["view_id", "element_key", "graph_version"],
  highlight: ["origin", "highlights", "graph_version"],
  content: ["view_id", "document", "graph_version"],
  refresh: ["graph_version"],
  error: ["code", "message"],
  arrangement: ["views"],
};

export const KINDS = Object.keys(FIELDS) as Kind[];

export class ProtocolError extends Error {
  constructor(
    readonly code: "malformed" | "unknown_kind",
    message: string,
  ) {
    super(message);
    this.name = "ProtocolError";
  }
}

function malformed(msg: string): never {
  throw new ProtocolError("malformed", msg);
}

function isObject(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

function str(v: unknown, field: string): string {
  if (typeof v !== "string") malformed(`\`${field}\` must be a string`);
  return v;
}

function version(v: unknown, field: string): number {
  if (typeof v !== "number" || !Number.isSafeInteger(v) || v < 0) malformed(`\`${field}\` must be a non-negative integer`);
  return v;
}

function strings(v: unknown, field: string): string[] {
  if (!Array.isArray(v)) malformed(`\`${field}\` must be an array`);
  return v.map((s, i) => str(s, `${field}[${i}]`));
}

function exactly(o: Record<string, unknown>, fields: readonly string[], where: string): void {
  for (const k of Object.keys(o)) {
    if (!fields.includes(k)) malformed(`unknown field \`${k}\` in ${where}`);
  }
  for (const f of fields) {
    if (!(f in o)) malformed(`missing field \`${f}\` in ${where}`);
  }
}

function elementKey(v: unknown, field: string): string {
  const s = str(v, field);
  const slash = s.indexOf("/");
  if (slash <= 0 || slash === s.length - 1) malformed(`\`${field}\` must read Concept/key`);
  return s;
}

/** Parses one frame, throwing `ProtocolError` on anything the server would reject. */
export function decode(text: string): WireMessage {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (e) {
    malformed(`not JSON: ${(e as Error).message}`);
  }
  if (!isObject(raw) || typeof raw.kind !== "string") malformed("message has no string `kind`");
  const kind = raw.kind;
  if (!(KINDS as string[]).includes(kind)) throw new ProtocolError("unknown_kind", `unknown message kind \`${kind}\``);
  const { kind: _, ...rest } = raw;
  exactly(rest, FIELDS[kind as Kind], kind);
  switch (kind as Kind) {
    case "hello":
      return { kind: "hello", role: str(rest.role, "role"), arrangement: strings(rest.arrangement, "arrangement") };
    case "select":
      return {
        kind: "select",
        view_id: str(rest.view_id, "view_id"),
        element_key: elementKey(rest.element_key, "element_key"),
        graph_version: version(rest.graph_version, "graph_version"),
      };
    case "highlight": {
      const o = rest.origin;
      if (!isObject(o)) malformed("`origin` must be an object");
      exactly(o, ["view_id", "element_key", "state"], "origin");
      if (o.state !== "selected" && o.state !== "highlighted") malformed("`origin.state` must be selected or highlighted");
      const h = rest.highlights;
      if (!isObject(h)) malformed("`highlights` must be an object");
      const highlights: Record<string, string[]> = {};
      for (const [v, keys] of Object.entries(h)) {
        highlights[v] = strings(keys, `highlights.${v}`).map((k) => elementKey(k, `highlights.${v}`));
      }
      return {
        kind: "highlight",
        origin: { view_id: str(o.view_id, "origin.view_id"), element_key: elementKey(o.element_key, "origin.element_key"), state: o.state },
        highlights,
        graph_version: version(rest.graph_version, "graph_version"),
      };
    }
    case "content":
      return {
        kind: "content",
        view_id: str(rest.view_id, "view_id"),
        document: str(rest.document, "document"),
        graph_version: version(rest.graph_version, "graph_version"),
      };
    case "refresh":
      return { kind: "refresh", graph_version: version(rest.graph_version, "graph_version") };
    case "error":
      return { kind: "error", code: str(rest.code, "code"), message: str(rest.message, "message") };
    case "arrangement":
      return { kind: "arrangement", views: strings(rest.views, "views") };
  }
}

function sortedKeys(o: Record<string, string[]>): Record<string, string[]> {
  const out: Record<string, string[]> = {};
  for (const k of Object.keys(o).sort()) out[k] = o[k]!;
  return out;
}

/** Canonical frame text, identical to the server's encoding of the same message. */
export function encode(m: WireMessage): string {
  const src = m as unknown as Record<string, unknown>;
  const out: Record<string, unknown> = { kind: m.kind };
  for (const f of FIELDS[m.kind]) {
    let v = src[f];
    if (f === "origin") {
      const o = v as Origin;
      v = { view_id: o.view_id, element_key: o.element_key, state: o.state };
    } else if (f === "highlights") {
      v = sortedKeys(v as Record<string, string[]>);
    }
    out[f] = v;
  }
  return JSON.stringify(out);
}
