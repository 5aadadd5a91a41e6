// Content and schema documents as served by /api/views/{id}/content and
// /api/views/{id}/schema, and the conformance check the panes run before
// rendering.

export type Value =
  | { type: "string"; value: string }
  | { type: "integer"; value: number }
  | { type: "date"; value: string }
  | { type: "symbol"; value: string };

export interface Element {
  concept: string;
  key: string;
  fields: Record<string, Value>;
}

export interface Content {
  viewId: string;
  graphVersion: number;
  elements: Element[];
}

export type FieldKind = { type: "string" } | { type: "integer" } | { type: "date" } | { type: "enum"; values: string[] };

export interface FieldDecl {
  name: string;
  kind: FieldKind;
  /** Concept whose key this field refers to. */
  link?: string;
}

export interface ConceptDecl {
  name: string;
  keyField: string;
  fields: FieldDecl[];
}

export interface Schema {
  viewId: string;
  concepts: ConceptDecl[];
}

export class DocumentError extends Error {
  constructor(
    readonly line: number,
    readonly column: number,
    message: string,
  ) {
    super(`${line}:${column}: ${message}`);
    this.name = "DocumentError";
  }
}

type Tok =
  | { t: "word"; v: string; line: number; col: number }
  | { t: "str"; v: string; line: number; col: number }
  | { t: "punct"; v: string; line: number; col: number }
  | { t: "eof"; v: ""; line: number; col: number };

const PUNCT2 = ["->", ":=", "!=", "<=", ">="];
const PUNCT1 = "{}()[],:=;/<>|.";
const ESCAPES: Record<string, string> = { '"': '"', "\\": "\\", n: "\n", t: "\t" };

const wordChar = (c: string | undefined) => c !== undefined && /[\p{L}\p{N}_]/u.test(c);
const digit = (c: string | undefined) => c !== undefined && c >= "0" && c <= "9";

function tokenize(src: string): Tok[] {
  const cs = Array.from(src);
  const out: Tok[] = [];
  let [i, line, col] = [0, 1, 1];
  while (i < cs.length) {
    const c = cs[i]!;
    const at = { line, col };
    if (c === "\n") {
      i++;
      line++;
      col = 1;
    } else if (/\s/.test(c)) {
      i++;
      col++;
    } else if (c === "#") {
      while (i < cs.length && cs[i] !== "\n") i++;
    } else if (c === '"') {
      let s = "";
      i++;
      col++;
      for (;;) {
        const d = cs[i];
        if (d === undefined || d === "\n") throw new DocumentError(at.line, at.col, "unterminated string literal");
        if (d === '"') {
          i++;
          col++;
          break;
        }
        if (d === "\\") {
          const e = ESCAPES[cs[i + 1] ?? ""];
          if (e === undefined) throw new DocumentError(line, col, "invalid escape sequence");
          s += e;
          i += 2;
          col += 2;
        } else {
          s += d;
          i++;
          col++;
        }
      }
      out.push({ t: "str", v: s, ...at });
    } else if (wordChar(c) || (c === "-" && digit(cs[i + 1]))) {
      const start = i++;
      for (;;) {
        const d = cs[i];
        const after = cs[i + 1];
        const take = wordChar(d) || (d === "-" && after !== ">" && wordChar(after)) || (d === "." && wordChar(after));
        if (!take) break;
        i++;
      }
      out.push({ t: "word", v: cs.slice(start, i).join(""), ...at });
      col += i - start;
    } else {
      const pair = c + (cs[i + 1] ?? "");
      const p = PUNCT2.includes(pair) ? pair : PUNCT1.includes(c) ? c : undefined;
      if (p === undefined) throw new DocumentError(line, col, `unexpected character ${JSON.stringify(c)}`);
      out.push({ t: "punct", v: p, ...at });
      i += p.length;
      col += p.length;
    }
  }
  out.push({ t: "eof", v: "", line, col });
  return out;
}

class Cursor {
  private i = 0;
  constructor(private readonly toks: Tok[]) {}

  peek(): Tok {
    return this.toks[this.i]!;
  }

  bump(): Tok {
    const t = this.peek();
    if (t.t !== "eof") this.i++;
    return t;
  }

  atEof(): boolean {
    return this.peek().t === "eof";
  }

  fail(expected: string): never {
    const t = this.peek();
    const found = t.t === "eof" ? "end of input" : t.t === "str" ? `string ${JSON.stringify(t.v)}` : `\`${t.v}\``;
    throw new DocumentError(t.line, t.col, `expected ${expected}, found ${found}`);
  }

  word(expected: string): Tok {
    if (this.peek().t !== "word") this.fail(expected);
    return this.bump();
  }

  keyword(k: string): void {
    const t = this.peek();
    if (t.t !== "word" || t.v !== k) this.fail(`\`${k}\``);
    this.bump();
  }

  punct(p: string): void {
    const t = this.peek();
    if (t.t !== "punct" || t.v !== p) this.fail(`\`${p}\``);
    this.bump();
  }

  eat(p: string): boolean {
    const t = this.peek();
    if (t.t === "punct" && t.v === p) {
      this.bump();
      return true;
    }
    return false;
  }

  str(expected: string): string {
    if (this.peek().t !== "str") this.fail(expected);
    return this.bump().v;
  }
}

const ISO_DATE = /^(\d{4})-(\d{2})-(\d{2})$/;

function isDate(w: string): boolean {
  const m = ISO_DATE.exec(w);
  if (!m) return false;
  const [y, mo, d] = [Number(m[1]), Number(m[2]), Number(m[3])];
  const t = new Date(Date.UTC(y, mo - 1, d));
  return t.getUTCFullYear() === y && t.getUTCMonth() === mo - 1 && t.getUTCDate() === d;
}

function value(cur: Cursor): Value {
  const t = cur.peek();
  if (t.t === "str") {
    cur.bump();
    return { type: "string", value: t.v };
  }
  if (t.t !== "word") cur.fail("a value");
  cur.bump();
  if (/^-?\d+$/.test(t.v) && Number.isSafeInteger(Number(t.v))) return { type: "integer", value: Number(t.v) };
  if (isDate(t.v)) return { type: "date", value: t.v };
  if (/^[-\d]/.test(t.v)) throw new DocumentError(t.line, t.col, `\`${t.v}\` is neither an integer nor a YYYY-MM-DD date`);
  return { type: "symbol", value: t.v };
}

export function parseContent(text: string): Content {
  const cur = new Cursor(tokenize(text));
  cur.keyword("content");
  const viewId = cur.word("a view id").v;
  cur.keyword("version");
  const vt = cur.word("a graph version");
  if (!/^\d+$/.test(vt.v)) throw new DocumentError(vt.line, vt.col, `invalid graph version \`${vt.v}\``);
  const elements: Element[] = [];
  while (!cur.atEof()) {
    cur.keyword("element");
    const concept = cur.word("a concept name").v;
    const key = cur.str("a quoted element key");
    cur.punct("{");
    const fields: Record<string, Value> = {};
    while (!cur.eat("}")) {
      const name = cur.word("a field name or `}`");
      cur.punct("=");
      if (Object.hasOwn(fields, name.v)) throw new DocumentError(name.line, name.col, `field \`${name.v}\` set twice`);
      fields[name.v] = value(cur);
    }
    elements.push({ concept, key, fields });
  }
  return { viewId, graphVersion: Number(vt.v), elements };
}

function fieldKind(cur: Cursor): FieldKind {
  const t = cur.word("a field kind");
  switch (t.v) {
    case "string":
    case "integer":
    case "date":
      return { type: t.v };
    case "enum": {
      cur.punct("(");
      const values = [cur.word("an enum value").v];
      while (cur.eat(",")) values.push(cur.word("an enum value").v);
      cur.punct(")");
      return { type: "enum", values };
    }
    default:
      throw new DocumentError(t.line, t.col, `unknown field kind \`${t.v}\``);
  }
}

export function parseSchema(text: string): Schema {
  const cur = new Cursor(tokenize(text));
  cur.keyword("view");
  const viewId = cur.word("a view id").v;
  const concepts: ConceptDecl[] = [];
  while (!cur.atEof()) {
    cur.keyword("concept");
    const name = cur.word("a concept name").v;
    cur.keyword("key");
    const keyField = cur.word("a key field").v;
    cur.punct("{");
    const fields: FieldDecl[] = [];
    while (!cur.eat("}")) {
      const f = cur.word("a field name or `}`").v;
      cur.punct(":");
      const kind = fieldKind(cur);
      fields.push(cur.eat("->") ? { name: f, kind, link: cur.word("a concept name").v } : { name: f, kind });
    }
    concepts.push({ name, keyField, fields });
  }
  return { viewId, concepts };
}

export type Defect =
  | "view-mismatch"
  | "unknown-concept"
  | "duplicate-key"
  | "missing-field"
  | "unknown-field"
  | "field-kind"
  | "dangling-link"
  | "key-mismatch";

export interface Violation {
  subject: string;
  rule: Defect;
  message: string;
}

export const elementKey = (e: Pick<Element, "concept" | "key">) => `${e.concept}/${e.key}`;

function fits(kind: FieldKind, v: Value): boolean {
  switch (kind.type) {
    case "string":
    case "integer":
    case "date":
      return v.type === kind.type;
    case "enum":
      return v.type === "symbol" && kind.values.includes(v.value);
  }
}

/** Every way `content` fails to instantiate `schema`; empty when it conforms. */
export function validateContent(schema: Schema, content: Content): Violation[] {
  const out: Violation[] = [];
  const add = (subject: string, rule: Defect, message: string) => out.push({ subject, rule, message });
  if (content.viewId !== schema.viewId) add(content.viewId, "view-mismatch", `content is for view ${content.viewId}, schema for ${schema.viewId}`);
  const keys = new Set<string>();
  for (const e of content.elements) {
    const k = elementKey(e);
    if (keys.has(k)) add(k, "duplicate-key", `${k} appears twice`);
    keys.add(k);
  }
  for (const e of content.elements) {
    const k = elementKey(e);
    const c = schema.concepts.find((c) => c.name === e.concept);
    if (!c) {
      add(k, "unknown-concept", `no concept ${e.concept}`);
      continue;
    }
    for (const f of c.fields) {
      const v = e.fields[f.name];
      if (v === undefined) add(k, "missing-field", `missing field ${f.name}`);
      else if (!fits(f.kind, v)) add(k, "field-kind", `field ${f.name} holds a ${v.type}`);
      else if (f.link !== undefined && v.type === "string" && !keys.has(`${f.link}/${v.value}`)) {
        add(k, "dangling-link", `field ${f.name} refers to missing ${f.link}/${v.value}`);
      }
    }
    for (const name of Object.keys(e.fields)) {
      if (!c.fields.some((f) => f.name === name)) add(k, "unknown-field", `undeclared field ${name}`);
    }
    const kv = e.fields[c.keyField];
    if (kv?.type === "string" && kv.value !== e.key) add(k, "key-mismatch", `key field says ${kv.value}`);
  }
  return out;
}
