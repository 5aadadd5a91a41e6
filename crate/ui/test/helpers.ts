import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";

import { parseSchema, type Schema } from "../src/document.js";
import type { WireMessage } from "../src/wire.js";
import { decode } from "../src/wire.js";

export const ROOT = fileURLToPath(new URL("..", import.meta.url));
export const FIXTURES = fileURLToPath(new URL("../../crates/core/fixtures/", import.meta.url));
export const VIEWS = ["report", "planning", "mockup", "remarks_list"];

export const fixture = (name: string) => readFileSync(FIXTURES + name, "utf8");

export interface Line {
  from: "client" | "server";
  text: string;
  message: WireMessage;
}

export function transcript(): Line[] {
  return readFileSync(ROOT + "fixtures/session.transcript", "utf8")
    .split("\n")
    .filter((l) => l !== "")
    .map((l) => ({ from: l.startsWith("C ") ? "client" : "server", text: l.slice(2), message: decode(l.slice(2)) }));
}

// Schemas as the server emits them, written out once here so the UI tests
// do not depend on a running server.
export const SCHEMAS: Record<string, Schema> = Object.fromEntries(
  [
    `view report
concept GeneralInfo key id {
  id: string
  text: string
}
concept Remark key id {
  id: string
  number: integer
  status: enum(open, closed)
  text: string
}
concept Report key id {
  date: date
  id: string
}`,
    `view planning
concept Resource key id {
  id: string
  label: string
}
concept Task key id {
  end: date
  id: string
  label: string
  progress_state: enum(planned, in_progress, done, late)
  resource: string -> Resource
  start: date
}`,
    `view mockup
concept Object3D key id {
  geometry_ref: string
  id: string
  label: string
}`,
    `view remarks_list
concept RemarkEntry key id {
  id: string
  number: integer
  report_date: date
  status: enum(open, closed)
  text: string
}`,
  ].map((t) => {
    const s = parseSchema(t);
    return [s.viewId, s];
  }),
);
