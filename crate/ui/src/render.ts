// Render models for the four pane kinds. They describe what a pane shows;
// drawing them is left to the host page.

import { type Element, elementKey, type Value } from "./document.js";
import type { Pane } from "./screen.js";

export interface Item {
  key: string;
  label: string;
  selected: boolean;
  highlighted: boolean;
}

export interface Section {
  title: string;
  items: Item[];
}

export interface Bar extends Item {
  start: string;
  end: string;
  /** Days from the earliest start. */
  offset: number;
  /** Length in days, both ends included. */
  days: number;
  state: string;
  resource: string | null;
}

export interface Box extends Item {
  /** Top view rectangle; null when the geometry does not read. */
  rect: { x: number; y: number; width: number; depth: number; height: number } | null;
}

export interface Table {
  columns: string[];
  rows: (Item & { cells: Record<string, string> })[];
}

export type Rendered =
  | { state: "loading"; viewId: string }
  | { state: "diagnostic"; viewId: string; message: string }
  | { state: "empty"; viewId: string; message: "no elements" }
  | { state: "report"; viewId: string; sections: Section[] }
  | { state: "gantt"; viewId: string; bars: Bar[]; span: number }
  | { state: "mockup"; viewId: string; boxes: Box[] }
  | { state: "table"; viewId: string; table: Table };

export interface SortOrder {
  column: string;
  descending?: boolean;
}

export function text(v: Value | undefined): string {
  return v === undefined ? "" : String(v.value);
}

function item(p: Pane, e: Element, label: string): Item {
  const key = elementKey(e);
  return { key, label, selected: p.selected === key, highlighted: p.highlighted.includes(key) };
}

const REPORT_SECTIONS: [string, string][] = [
  ["Report", "Compte rendu"],
  ["GeneralInfo", "Informations générales"],
  ["Remark", "Points particuliers"],
];

function report(p: Pane, elements: Element[]): Section[] {
  const known = new Set(REPORT_SECTIONS.map(([c]) => c));
  const concepts = [...REPORT_SECTIONS, ...[...new Set(elements.map((e) => e.concept))].filter((c) => !known.has(c)).map((c) => [c, c] as [string, string])];
  return concepts
    .map(([concept, title]) => ({
      title,
      items: elements
        .filter((e) => e.concept === concept)
        .map((e) => {
          const f = e.fields;
          const label =
            concept === "Remark"
              ? `${text(f.number)}. ${text(f.text)} (${text(f.status)})`
              : concept === "Report"
                ? `${text(f.id)} du ${text(f.date)}`
                : text(f.text ?? f.label ?? f.id);
          return item(p, e, label);
        }),
    }))
    .filter((s) => s.items.length > 0);
}

const DAY = 86_400_000;
const days = (iso: string) => Date.parse(`${iso}T00:00:00Z`) / DAY;

function gantt(p: Pane, elements: Element[]): { bars: Bar[]; span: number } {
  const labels = new Map(elements.filter((e) => e.concept === "Resource").map((e) => [text(e.fields.id), text(e.fields.label)]));
  const tasks = elements
    .filter((e) => e.concept === "Task")
    .sort((a, b) => text(a.fields.start).localeCompare(text(b.fields.start)) || elementKey(a).localeCompare(elementKey(b)));
  const origin = Math.min(...tasks.map((t) => days(text(t.fields.start))));
  const bars = tasks.map((t) => {
    const [start, end] = [text(t.fields.start), text(t.fields.end)];
    const resource = t.fields.resource === undefined ? null : (labels.get(text(t.fields.resource)) ?? text(t.fields.resource));
    return {
      ...item(p, t, text(t.fields.label)),
      start,
      end,
      offset: days(start) - origin,
      days: days(end) - days(start) + 1,
      state: text(t.fields.progress_state),
      resource,
    };
  });
  const span = bars.reduce((m, b) => Math.max(m, b.offset + b.days), 0);
  return { bars, span };
}

/** Reads `box:<x>,<y>,<z>,<dx>,<dy>,<dz>`. */
export function parseBox(g: string): Box["rect"] {
  if (!g.startsWith("box:")) return null;
  const n = g.slice(4).split(",").map((s) => (s.trim() === "" ? NaN : Number(s)));
  if (n.length !== 6 || n.some((x) => !Number.isFinite(x)) || n.slice(3).some((d) => d < 0)) return null;
  const [x, y, , dx, dy, dz] = n as [number, number, number, number, number, number];
  return { x, y, width: dx, depth: dy, height: dz };
}

function mockup(p: Pane, elements: Element[]): Box[] {
  return elements.map((e) => ({ ...item(p, e, text(e.fields.label)), rect: parseBox(text(e.fields.geometry_ref)) }));
}

function table(p: Pane, elements: Element[], sort?: SortOrder): Table {
  const columns = [...new Set(elements.flatMap((e) => Object.keys(e.fields)))].sort();
  const rows = elements.map((e) => ({
    ...item(p, e, text(e.fields.text ?? e.fields.label ?? e.fields.id)),
    cells: Object.fromEntries(columns.map((c) => [c, text(e.fields[c])])),
  }));
  if (sort) {
    const numeric = elements.every((e) => e.fields[sort.column]?.type === "integer");
    const dir = sort.descending ? -1 : 1;
    rows.sort((a, b) => {
      const [x, y] = [a.cells[sort.column] ?? "", b.cells[sort.column] ?? ""];
      const c = numeric ? Number(x) - Number(y) : x.localeCompare(y);
      return dir * c || a.key.localeCompare(b.key);
    });
  }
  return { columns, rows };
}

export function renderView(p: Pane, sort?: SortOrder): Rendered {
  const viewId = p.viewId;
  if (p.diagnostic !== null) return { state: "diagnostic", viewId, message: p.diagnostic };
  if (p.content === null) return { state: "loading", viewId };
  const elements = p.content.elements;
  if (elements.length === 0) return { state: "empty", viewId, message: "no elements" };
  switch (p.renderer) {
    case "report_pane":
      return { state: "report", viewId, sections: report(p, elements) };
    case "gantt_pane":
      return { state: "gantt", viewId, ...gantt(p, elements) };
    case "mockup_pane":
      return { state: "mockup", viewId, boxes: mockup(p, elements) };
    case "table_pane":
      return { state: "table", viewId, table: table(p, elements, sort) };
  }
}
