/**
 * Subtree extraction and line diffing over canonical protocol XML.
 *
 * The server is the only source of protocol bytes; this module never edits
 * them, it only slices entity subtrees out of two server-provided documents
 * and lines them up for display.
 */

import type { ActionWire, ProposalWire } from "./types.js";

export interface DiffLine {
  kind: "same" | "removed" | "added";
  text: string;
}

export interface DiffPane {
  /** Entity id the pane is anchored on ("root" for whole-document panes). */
  entityId: string;
  before: string | null;
  after: string | null;
}

function escapeRegExp(text: string): string {
  return text.replace(/[.*+?^${}()|[\]\\]/g, "\\$&");
}

/**
 * Extract the subtree whose opening tag carries `id="entityId"`, dedented to
 * column zero. Returns null when the id is not present (e.g. after deletion).
 */
export function extractEntitySegment(
  xml: string,
  entityId: string,
): string | null {
  const open = new RegExp(`<[A-Za-z0-9_]+ id="${escapeRegExp(entityId)}"[^>]*>`);
  const match = open.exec(xml);
  if (!match) return null;

  const start = match.index;
  let end = -1;
  const tag = /<\/?[A-Za-z0-9_][^>]*>/g;
  tag.lastIndex = start;
  let depth = 0;
  let token: RegExpExecArray | null;
  while ((token = tag.exec(xml)) !== null) {
    const text = token[0];
    if (text.startsWith("</")) {
      depth -= 1;
    } else if (!text.endsWith("/>")) {
      depth += 1;
    }
    if (depth === 0) {
      end = token.index + text.length;
      break;
    }
  }
  if (end < 0) return null;

  const lineStart = xml.lastIndexOf("\n", start) + 1;
  const indent = xml.slice(lineStart, start);
  const segment = xml.slice(lineStart, end);
  if (!indent) return segment;
  return segment
    .split("\n")
    .map((line) => (line.startsWith(indent) ? line.slice(indent.length) : line))
    .join("\n");
}

/** The entity id whose subtree a rendered diff pane should be anchored on. */
export function paneRoot(action: ActionWire): string {
  if (action.op === "add_entity") return action.parent_id;
  return action.entity_id;
}

/**
 * One pane per distinct affected entity, in action order. `afterXml` is null
 * while the proposal is still undecided, so panes carry only the before side.
 */
export function panesForProposal(
  proposal: ProposalWire,
  beforeXml: string,
  afterXml: string | null,
): DiffPane[] {
  const panes: DiffPane[] = [];
  const seen = new Set<string>();
  for (const action of proposal.actions) {
    const entityId = paneRoot(action);
    if (seen.has(entityId)) continue;
    seen.add(entityId);
    panes.push({
      entityId,
      before: extractEntitySegment(beforeXml, entityId),
      after: afterXml === null ? null : extractEntitySegment(afterXml, entityId),
    });
  }
  return panes;
}

/**
 * Line-level diff (longest common subsequence), small inputs only — panes
 * are entity subtrees, not whole protocols.
 */
export function diffLines(before: string, after: string): DiffLine[] {
  const a = before.split("\n");
  const b = after.split("\n");
  const rows = a.length + 1;
  const cols = b.length + 1;
  const lcs: number[][] = Array.from({ length: rows }, () =>
    new Array<number>(cols).fill(0),
  );
  for (let i = a.length - 1; i >= 0; i -= 1) {
    for (let j = b.length - 1; j >= 0; j -= 1) {
      lcs[i]![j] =
        a[i] === b[j]
          ? lcs[i + 1]![j + 1]! + 1
          : Math.max(lcs[i + 1]![j]!, lcs[i]![j + 1]!);
    }
  }

  const out: DiffLine[] = [];
  let i = 0;
  let j = 0;
  while (i < a.length && j < b.length) {
    if (a[i] === b[j]) {
      out.push({ kind: "same", text: a[i]! });
      i += 1;
      j += 1;
    } else if (lcs[i + 1]![j]! >= lcs[i]![j + 1]!) {
      out.push({ kind: "removed", text: a[i]! });
      i += 1;
    } else {
      out.push({ kind: "added", text: b[j]! });
      j += 1;
    }
  }
  for (; i < a.length; i += 1) out.push({ kind: "removed", text: a[i]! });
  for (; j < b.length; j += 1) out.push({ kind: "added", text: b[j]! });
  return out;
}
