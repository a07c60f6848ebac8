/**
 * Pure HTML-string renderers for the review dashboard.
 *
 * Everything here is a function of server data; no DOM access, so the whole
 * module is testable without a browser.
 */

import type { DiffPane } from "./diff.js";
import { diffLines } from "./diff.js";
import type {
  ActionWire,
  HistoryEvent,
  NotDispatchableWire,
  ProposalWire,
  TypedValueWire,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function valueText(value: TypedValueWire): string {
  if (typeof value.payload === "string") return value.payload;
  return `<${value.payload.tag}> (composite)`;
}

/** One human-readable row per action; the card shows exactly one per action. */
export function actionLabel(action: ActionWire): string {
  if (action.op === "set_essential") {
    return `Set ${action.essential_name} = ${valueText(action.value)} on ${action.entity_id}`;
  }
  if (action.op === "add_entity") {
    let label = `Add a copy of ${action.template_entity_id} under ${action.parent_id}`;
    if (action.new_name) label += ` named "${action.new_name}"`;
    if (action.overrides.length > 0) {
      const parts = action.overrides.map(
        (o) => `${o.essential} = ${valueText(o.value)}`,
      );
      label += ` with ${parts.join(", ")}`;
    }
    return label;
  }
  return `Delete ${action.entity_id}`;
}

function renderPaneBody(pane: DiffPane): string {
  if (pane.after === null) {
    // undecided: only the current (before) side exists yet
    const body =
      pane.before === null
        ? '<span class="absent">(not present)</span>'
        : escapeHtml(pane.before);
    return `<div class="pane"><div class="pane-title">current</div><pre>${body}</pre></div>
<div class="pane"><div class="pane-title">after approval</div><pre><span class="absent">pending decision</span></pre></div>`;
  }

  const before = pane.before ?? "";
  const after = pane.after ?? "";
  const lines = diffLines(before, after);
  const beforeSide = lines
    .filter((l) => l.kind !== "added")
    .map((l) =>
      l.kind === "removed"
        ? `<span class="line removed">${escapeHtml(l.text)}</span>`
        : `<span class="line">${escapeHtml(l.text)}</span>`,
    )
    .join("\n");
  const afterSide = lines
    .filter((l) => l.kind !== "removed")
    .map((l) =>
      l.kind === "added"
        ? `<span class="line added">${escapeHtml(l.text)}</span>`
        : `<span class="line">${escapeHtml(l.text)}</span>`,
    )
    .join("\n");
  const beforeBody = pane.before === null ? '<span class="absent">(not present)</span>' : beforeSide;
  const afterBody = pane.after === "" || pane.after === null
    ? '<span class="absent">(removed)</span>'
    : afterSide;
  return `<div class="pane"><div class="pane-title">before</div><pre>${beforeBody}</pre></div>
<div class="pane"><div class="pane-title">after</div><pre>${afterBody}</pre></div>`;
}

function renderDiff(panes: DiffPane[]): string {
  if (panes.length === 0) return "";
  const blocks = panes.map(
    (pane) =>
      `<div class="diff" data-entity="${escapeHtml(pane.entityId)}">
<div class="diff-title">${escapeHtml(pane.entityId)}</div>
<div class="panes">${renderPaneBody(pane)}</div>
</div>`,
  );
  return blocks.join("\n");
}

/**
 * A proposal card: status badge, request + rationale, the plan, one labeled
 * row per action, before/after panes, and decision buttons — the buttons
 * only while the proposal is still Pending.
 */
export function renderProposalCard(
  proposal: ProposalWire,
  panes: DiffPane[],
): string {
  const status = proposal.status;
  const rows = proposal.actions
    .map((a) => `<li class="action-row">${escapeHtml(actionLabel(a))}</li>`)
    .join("\n");
  const lowNote = proposal.low_confidence
    ? '<p class="low-confidence">Low confidence: the request matched several entities; review carefully.</p>'
    : "";
  const errorNote = proposal.error
    ? `<p class="error">${escapeHtml(proposal.error)}</p>`
    : "";
  const buttons =
    status === "Pending"
      ? `<div class="decisions">
<button data-action="approve" data-proposal="${escapeHtml(proposal.id)}">Approve</button>
<button data-action="reject" data-proposal="${escapeHtml(proposal.id)}">Reject</button>
</div>`
      : "";
  return `<article class="proposal" data-id="${escapeHtml(proposal.id)}">
<header>
<span class="badge status-${status.toLowerCase()}">${status}</span>
<span class="category">${escapeHtml(proposal.subrequest.category)}</span>
</header>
<p class="request">${escapeHtml(proposal.subrequest.text)}</p>
<p class="rationale">${escapeHtml(proposal.subrequest.rationale)}</p>
<pre class="plan">${escapeHtml(proposal.plan_text)}</pre>
<ul class="actions">${rows}</ul>
${renderDiff(panes)}
${lowNote}
${errorNote}
${buttons}
</article>`;
}

export function renderNotDispatchable(sub: NotDispatchableWire): string {
  return `<article class="proposal not-dispatchable">
<header><span class="badge status-notdispatchable">Not dispatchable</span></header>
<p class="request">${escapeHtml(sub.text)}</p>
<p class="rationale">${escapeHtml(sub.rationale)}</p>
</article>`;
}

export function renderTree(treeText: string): string {
  return `<pre class="tree">${escapeHtml(treeText)}</pre>`;
}

export function renderHistory(events: HistoryEvent[]): string {
  if (events.length === 0) return '<p class="empty">No events yet.</p>';
  const items = events
    .map(
      (e) =>
        `<li><span class="event">${escapeHtml(e.event)}</span> <time>${escapeHtml(e.at)}</time></li>`,
    )
    .join("\n");
  return `<ol class="history">${items}</ol>`;
}
