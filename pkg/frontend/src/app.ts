/**
 * Dashboard controller: owns the DOM skeleton, session state and the
 * submit/decide/refresh loop against one review service session.
 *
 * Protocol bytes are never edited here. The "before" side of every diff is
 * the protocol as downloaded just before the submit that created the
 * proposal; the "after" side is the protocol downloaded once it is Applied.
 */

import type { ProtocolApi } from "./api.js";
import { ApiError } from "./api.js";
import type { DiffPane } from "./diff.js";
import { panesForProposal } from "./diff.js";
import {
  renderHistory,
  renderNotDispatchable,
  renderProposalCard,
  renderTree,
} from "./render.js";
import { validateStructuredRequestText } from "./schema.js";
import type {
  HistoryEvent,
  NotDispatchableWire,
  ProposalWire,
} from "./types.js";

export interface AppState {
  sessionId: string | null;
  currentXml: string;
  etag: string;
  tree: string;
  proposals: ProposalWire[];
  notDispatchable: NotDispatchableWire[];
  history: HistoryEvent[];
}

export interface AppOptions {
  /** Re-fetch session state every N ms; off when omitted. */
  pollMs?: number;
}

export interface AppHandle {
  state: AppState;
  uploadProtocol(xml: string): Promise<void>;
  submitText(text: string): Promise<void>;
  submitJson(jsonText: string): Promise<boolean>;
  decide(proposalId: string, decision: "approve" | "reject"): Promise<void>;
  downloadXml(): Promise<{ xml: string; etag: string }>;
  refresh(): Promise<void>;
  dispose(): void;
}

const SKELETON = `
<div class="layout">
  <section class="panel" id="session-panel">
    <h2>Session</h2>
    <textarea id="protocol-input" rows="6" placeholder="Paste protocol XML here"></textarea>
    <input type="file" id="protocol-file" accept=".xml">
    <div class="row">
      <button id="upload-btn">Start session</button>
      <button id="download-btn" disabled>Download XML</button>
      <span id="session-id" class="session-id"></span>
    </div>
  </section>
  <div id="status" class="status"></div>
  <section class="panel" id="tree-panel">
    <h2>Protocol tree</h2>
    <div id="tree"></div>
  </section>
  <section class="panel" id="composer">
    <h2>Request</h2>
    <label class="row"><input type="checkbox" id="json-mode"> JSON mode</label>
    <textarea id="request-input" rows="4" placeholder="e.g. delete the lung cad"></textarea>
    <div id="composer-error" class="composer-error"></div>
    <button id="submit-btn" disabled>Submit</button>
  </section>
  <section class="panel" id="proposals-panel">
    <h2>Proposals</h2>
    <div id="proposals"></div>
  </section>
  <section class="panel" id="history-panel">
    <h2>History</h2>
    <div id="history"></div>
  </section>
</div>`;

export function createApp(
  root: HTMLElement,
  api: ProtocolApi,
  options: AppOptions = {},
): AppHandle {
  root.innerHTML = SKELETON;
  const el = <T extends HTMLElement>(id: string): T => {
    const found = root.querySelector<T>(`#${id}`);
    if (!found) throw new Error(`missing element #${id}`);
    return found;
  };

  const state: AppState = {
    sessionId: null,
    currentXml: "",
    etag: "",
    tree: "",
    proposals: [],
    notDispatchable: [],
    history: [],
  };
  // protocol text as it was when each proposal's submit went out
  const beforeXml = new Map<string, string>();
  // protocol text right after each proposal was applied
  const afterXml = new Map<string, string>();
  const inflight = new Set<string>();
  let submitting = false;
  let pollTimer: ReturnType<typeof setInterval> | null = null;

  const statusBox = el<HTMLDivElement>("status");
  const showStatus = (text: string): void => {
    statusBox.innerHTML = text ? `<span class="info">${text}</span>` : "";
  };
  const showError = (error: unknown, retry?: () => void): void => {
    const message =
      error instanceof ApiError ? error.friendly() : String(error);
    statusBox.innerHTML = `<span class="error"></span>`;
    statusBox.querySelector(".error")!.textContent = message;
    if (retry) {
      const button = document.createElement("button");
      button.id = "retry-btn";
      button.textContent = "Retry";
      button.addEventListener("click", () => void retry());
      statusBox.appendChild(button);
    }
  };

  const panesFor = (proposal: ProposalWire): DiffPane[] => {
    if (proposal.status !== "Pending" && proposal.status !== "Applied") {
      return [];
    }
    const before = beforeXml.get(proposal.id) ?? state.currentXml;
    const after =
      proposal.status === "Applied"
        ? afterXml.get(proposal.id) ?? state.currentXml
        : null;
    return panesForProposal(proposal, before, after);
  };

  const renderAll = (): void => {
    el("tree").innerHTML = renderTree(state.tree);
    el("session-id").textContent = state.sessionId ?? "";
    const cards = state.proposals.map((p) =>
      renderProposalCard(p, panesFor(p)),
    );
    const extras = state.notDispatchable.map(renderNotDispatchable);
    el("proposals").innerHTML = [...cards, ...extras].join("\n") ||
      '<p class="empty">No proposals yet.</p>';
    el("history").innerHTML = renderHistory(state.history);
    el<HTMLButtonElement>("submit-btn").disabled =
      state.sessionId === null || submitting;
    el<HTMLButtonElement>("download-btn").disabled = state.sessionId === null;
  };

  const refresh = async (): Promise<void> => {
    if (state.sessionId === null) return;
    const id = state.sessionId;
    const [session, proposals, history, protocol] = await Promise.all([
      api.getSession(id),
      api.listProposals(id),
      api.listHistory(id),
      api.downloadProtocol(id),
    ]);
    state.tree = session.tree;
    state.proposals = proposals;
    state.history = history;
    state.currentXml = protocol.xml;
    state.etag = protocol.etag;
    renderAll();
  };

  const uploadProtocol = async (xml: string): Promise<void> => {
    const session = await api.createSession(xml);
    state.sessionId = session.id;
    beforeXml.clear();
    afterXml.clear();
    state.notDispatchable = [];
    showStatus("");
    await refresh();
  };

  const submit = async (body: () => Promise<{
    proposals: ProposalWire[];
    not_dispatchable: NotDispatchableWire[];
  }>): Promise<void> => {
    if (state.sessionId === null || submitting) return;
    submitting = true;
    el<HTMLButtonElement>("submit-btn").disabled = true;
    const snapshot = state.currentXml;
    try {
      const response = await body();
      for (const proposal of response.proposals) {
        beforeXml.set(proposal.id, snapshot);
      }
      state.notDispatchable = response.not_dispatchable;
      showStatus("");
      await refresh();
    } finally {
      submitting = false;
      renderAll();
    }
  };

  const submitText = async (text: string): Promise<void> => {
    const id = state.sessionId;
    if (id === null) return;
    try {
      await submit(() => api.submitText(id, text));
    } catch (error) {
      showError(error, () => void submitText(text));
    }
  };

  const submitJson = async (jsonText: string): Promise<boolean> => {
    const id = state.sessionId;
    if (id === null) return false;
    const verdict = validateStructuredRequestText(jsonText);
    const errorBox = el<HTMLDivElement>("composer-error");
    if (!verdict.ok) {
      errorBox.textContent = verdict.pointer
        ? `${verdict.pointer}: ${verdict.message}`
        : verdict.message;
      return false;
    }
    errorBox.textContent = "";
    const request = JSON.parse(jsonText) as Record<string, unknown>;
    try {
      await submit(() => api.submitStructured(id, request));
      return true;
    } catch (error) {
      showError(error, () => void submitJson(jsonText));
      return false;
    }
  };

  const decide = async (
    proposalId: string,
    decision: "approve" | "reject",
  ): Promise<void> => {
    const id = state.sessionId;
    if (id === null || inflight.has(proposalId)) return;
    inflight.add(proposalId);
    for (const button of root.querySelectorAll<HTMLButtonElement>(
      `button[data-proposal="${proposalId}"]`,
    )) {
      button.disabled = true;
    }
    try {
      const decided = await api.decide(id, proposalId, decision);
      await refresh();
      if (decided.status === "Applied") {
        afterXml.set(proposalId, state.currentXml);
        renderAll();
      }
    } catch (error) {
      showError(error);
      await refresh();
    } finally {
      inflight.delete(proposalId);
    }
  };

  const downloadXml = async (): Promise<{ xml: string; etag: string }> => {
    if (state.sessionId === null) throw new Error("no active session");
    const result = await api.downloadProtocol(state.sessionId);
    if (typeof URL !== "undefined" && typeof URL.createObjectURL === "function") {
      const blob = new Blob([result.xml], { type: "application/xml" });
      const anchor = document.createElement("a");
      anchor.href = URL.createObjectURL(blob);
      anchor.download = "protocol.xml";
      anchor.click();
      URL.revokeObjectURL(anchor.href);
    }
    return result;
  };

  // --- wiring -------------------------------------------------------------

  el<HTMLButtonElement>("upload-btn").addEventListener("click", () => {
    const xml = el<HTMLTextAreaElement>("protocol-input").value;
    if (!xml.trim()) {
      showError(new Error("paste a protocol first"));
      return;
    }
    void uploadProtocol(xml).catch((error) => showError(error));
  });

  el<HTMLInputElement>("protocol-file").addEventListener("change", (event) => {
    const input = event.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file || typeof FileReader === "undefined") return;
    const reader = new FileReader();
    reader.onload = () => {
      el<HTMLTextAreaElement>("protocol-input").value = String(reader.result);
    };
    reader.readAsText(file);
  });

  el<HTMLButtonElement>("submit-btn").addEventListener("click", () => {
    const text = el<HTMLTextAreaElement>("request-input").value;
    if (!text.trim()) return;
    if (el<HTMLInputElement>("json-mode").checked) {
      void submitJson(text);
    } else {
      void submitText(text);
    }
  });

  el<HTMLButtonElement>("download-btn").addEventListener("click", () => {
    void downloadXml().catch((error) => showError(error));
  });

  el<HTMLDivElement>("proposals").addEventListener("click", (event) => {
    const target = event.target as HTMLElement | null;
    const button = target?.closest<HTMLButtonElement>("button[data-action]");
    if (!button || button.disabled) return;
    const decision = button.dataset.action as "approve" | "reject";
    const proposalId = button.dataset.proposal;
    if (proposalId) void decide(proposalId, decision);
  });

  if (options.pollMs) {
    pollTimer = setInterval(() => void refresh().catch(() => {}), options.pollMs);
  }

  renderAll();
  return {
    state,
    uploadProtocol,
    submitText,
    submitJson,
    decide,
    downloadXml,
    refresh,
    dispose: () => {
      if (pollTimer !== null) clearInterval(pollTimer);
    },
  };
}
