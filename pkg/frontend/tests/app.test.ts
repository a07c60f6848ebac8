// @vitest-environment jsdom
import { beforeEach, describe, expect, it, vi } from "vitest";

import { ProtocolApi } from "../src/api.js";
import { createApp } from "../src/app.js";
import type { ProposalWire } from "../src/types.js";

const XML_BEFORE = [
  '<ScanProtocol id="root" name="P" type="ScanProtocol" schema-version="1.0">',
  '  <Entity id="for-1" name="Patient Registration" type="FrameOfReferenceEntity">',
  "    <Essential>",
  "      <Name>PatientPositionEssential</Name>",
  '      <Value type="EnumToken">FaceUpHeadFirst</Value>',
  "    </Essential>",
  "  </Entity>",
  "</ScanProtocol>",
  "",
].join("\n");
const XML_AFTER = XML_BEFORE.replace("FaceUpHeadFirst", "FaceUpFeetFirst");

function makeProposal(): ProposalWire {
  return {
    id: "prop-1",
    subrequest: {
      text: "face up and feet first",
      category: "Modification",
      rationale: "position change",
    },
    retrieved: { entities: [], essentials: [] },
    actions: [
      {
        op: "set_essential",
        entity_id: "for-1",
        essential_name: "PatientPositionEssential",
        value: { type: "EnumToken", payload: "FaceUpFeetFirst" },
      },
    ],
    plan_text: "1. Set the patient position to FaceUpFeetFirst.",
    status: "Pending",
    low_confidence: false,
    error: null,
  };
}

function response(
  status: number,
  body: unknown,
  headers: Record<string, string> = {},
): Response {
  const lower = new Map(
    Object.entries(headers).map(([k, v]) => [k.toLowerCase(), v]),
  );
  const text = typeof body === "string" ? body : JSON.stringify(body);
  return {
    ok: status >= 200 && status < 300,
    status,
    statusText: String(status),
    headers: { get: (name: string) => lower.get(name.toLowerCase()) ?? null },
    json: async () => JSON.parse(text),
    text: async () => text,
  } as unknown as Response;
}

/**
 * In-memory stand-in for the review service: one session, one scripted
 * proposal, apply-on-approve. Tracks per-endpoint call counts so tests can
 * assert refresh behaviour.
 */
function fakeService() {
  const state = {
    xml: XML_BEFORE,
    tree: "ScanProtocol P\n  Patient Registration",
    proposals: [] as ProposalWire[],
    events: [] as Array<{ event: string; at: string; payload: object }>,
    decisionCalls: 0,
    requestCalls: 0,
    sessionGets: 0,
    nextError: null as { status: number; body: unknown } | null,
  };

  const fetchImpl = async (
    url: string,
    init?: RequestInit,
  ): Promise<Response> => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^http:\/\/[^/]+/, "");
    if (method === "POST" && state.nextError) {
      const planned = state.nextError;
      state.nextError = null;
      return response(planned.status, planned.body);
    }
    if (method === "POST" && path === "/sessions") {
      return response(201, {
        id: "sess-1",
        created_at: "2026-08-23T10:00:00Z",
        tree: state.tree,
        proposal_count: 0,
      });
    }
    if (method === "GET" && path === "/sessions/sess-1") {
      state.sessionGets += 1;
      return response(200, {
        id: "sess-1",
        created_at: "2026-08-23T10:00:00Z",
        tree: state.tree,
        proposal_count: state.proposals.length,
      });
    }
    if (method === "POST" && path === "/sessions/sess-1/requests") {
      state.requestCalls += 1;
      const proposal = makeProposal();
      state.proposals = [proposal];
      state.events.push({
        event: "RequestSubmitted",
        at: "t1",
        payload: {},
      });
      state.events.push({ event: "ProposalCreated", at: "t2", payload: {} });
      return response(200, {
        proposals: [proposal],
        not_dispatchable: [],
      });
    }
    if (method === "GET" && path === "/sessions/sess-1/proposals") {
      return response(200, { proposals: state.proposals });
    }
    if (method === "GET" && path === "/sessions/sess-1/history") {
      return response(200, { events: state.events });
    }
    if (method === "GET" && path === "/sessions/sess-1/protocol") {
      return response(200, state.xml, {
        "content-type": "application/xml",
        ETag: '"fake-etag"',
      });
    }
    if (
      method === "POST" &&
      path === "/sessions/sess-1/proposals/prop-1/decision"
    ) {
      state.decisionCalls += 1;
      const body = JSON.parse(String(init?.body)) as { decision: string };
      const proposal = state.proposals[0]!;
      if (proposal.status !== "Pending") {
        return response(409, {
          code: "INVALID_STATUS",
          message: "already decided",
          detail: {},
        });
      }
      if (body.decision === "approve") {
        proposal.status = "Applied";
        state.xml = XML_AFTER;
        state.tree += "\n  (updated)";
        state.events.push({ event: "Applied", at: "t3", payload: {} });
      } else {
        proposal.status = "Rejected";
        state.events.push({ event: "Rejected", at: "t3", payload: {} });
      }
      return response(200, proposal);
    }
    return response(404, {
      code: "SESSION_NOT_FOUND",
      message: `no route ${method} ${path}`,
      detail: {},
    });
  };

  return { state, fetchImpl };
}

function mount() {
  document.body.innerHTML = "";
  const root = document.createElement("div");
  document.body.appendChild(root);
  const service = fakeService();
  const api = new ProtocolApi("http://fake", service.fetchImpl);
  const handle = createApp(root, api);
  return { root, service, handle };
}

const q = <T extends HTMLElement>(root: HTMLElement, sel: string): T => {
  const found = root.querySelector<T>(sel);
  if (!found) throw new Error(`missing ${sel}`);
  return found;
};

beforeEach(() => {
  vi.restoreAllMocks();
});

describe("session lifecycle", () => {
  it("uploading a protocol renders the tree and enables the controls", async () => {
    const { root, handle } = mount();
    expect(q<HTMLButtonElement>(root, "#submit-btn").disabled).toBe(true);

    await handle.uploadProtocol(XML_BEFORE);

    expect(handle.state.sessionId).toBe("sess-1");
    expect(q(root, "#tree").textContent).toContain("Patient Registration");
    expect(q(root, "#session-id").textContent).toBe("sess-1");
    expect(q<HTMLButtonElement>(root, "#submit-btn").disabled).toBe(false);
    expect(q<HTMLButtonElement>(root, "#download-btn").disabled).toBe(false);
  });

  it("submitting text renders one Pending card with the action row", async () => {
    const { root, handle } = mount();
    await handle.uploadProtocol(XML_BEFORE);
    await handle.submitText("face up and feet first");

    const proposals = q(root, "#proposals");
    expect(proposals.querySelectorAll("article.proposal")).toHaveLength(1);
    expect(proposals.textContent).toContain("Pending");
    expect(proposals.textContent).toContain(
      "Set PatientPositionEssential = FaceUpFeetFirst on for-1",
    );
    // the before pane comes from the snapshot taken at submit time
    expect(proposals.textContent).toContain("FaceUpHeadFirst");
    expect(
      proposals.querySelectorAll('button[data-action="approve"]'),
    ).toHaveLength(1);
  });
});

describe("deciding", () => {
  it("approve flips the card, refreshes the tree and shows the diff", async () => {
    const { root, service, handle } = mount();
    await handle.uploadProtocol(XML_BEFORE);
    await handle.submitText("face up and feet first");
    const sessionGetsBefore = service.state.sessionGets;

    await handle.decide("prop-1", "approve");

    const proposals = q(root, "#proposals");
    expect(proposals.textContent).toContain("Applied");
    expect(proposals.querySelectorAll("button[data-action]")).toHaveLength(0);
    // tree panel refreshed after the Applied event
    expect(service.state.sessionGets).toBeGreaterThan(sessionGetsBefore);
    expect(q(root, "#tree").textContent).toContain("(updated)");
    // line-level diff against the post-apply protocol
    expect(proposals.innerHTML).toContain('class="line removed"');
    expect(proposals.innerHTML).toContain('class="line added"');
    expect(proposals.textContent).toContain("FaceUpFeetFirst");
    expect(q(root, "#history").textContent).toContain("Applied");
  });

  it("a double-click sends exactly one decision", async () => {
    const { root, service, handle } = mount();
    await handle.uploadProtocol(XML_BEFORE);
    await handle.submitText("face up and feet first");

    const approve = q<HTMLButtonElement>(
      root,
      'button[data-action="approve"]',
    );
    approve.click();
    approve.click();
    await vi.waitFor(() =>
      expect(q(root, "#proposals").textContent).toContain("Applied"),
    );
    expect(service.state.decisionCalls).toBe(1);
  });

  it("reject leaves the protocol and tree untouched", async () => {
    const { root, service, handle } = mount();
    await handle.uploadProtocol(XML_BEFORE);
    await handle.submitText("face up and feet first");

    await handle.decide("prop-1", "reject");

    expect(q(root, "#proposals").textContent).toContain("Rejected");
    expect(service.state.xml).toBe(XML_BEFORE);
    expect(q(root, "#tree").textContent).not.toContain("(updated)");
    expect(handle.state.currentXml).toBe(XML_BEFORE);
  });
});

describe("composer validation", () => {
  it("rejects invalid structured JSON client-side with a pointer", async () => {
    const { root, service, handle } = mount();
    await handle.uploadProtocol(XML_BEFORE);
    const callsBefore = service.state.requestCalls;

    const sent = await handle.submitJson('{"operation": "modify"}');

    expect(sent).toBe(false);
    expect(q(root, "#composer-error").textContent).toBe(
      "/changes: a modify request needs at least one change",
    );
    expect(service.state.requestCalls).toBe(callsBefore);
  });

  it("sends valid structured JSON and clears the error box", async () => {
    const { root, service, handle } = mount();
    await handle.uploadProtocol(XML_BEFORE);
    await handle.submitJson('{"operation": "modify"}');

    const sent = await handle.submitJson(
      JSON.stringify({
        operation: "delete",
        target: { name_contains: "LungCAD" },
      }),
    );

    expect(sent).toBe(true);
    expect(q(root, "#composer-error").textContent).toBe("");
    expect(service.state.requestCalls).toBe(1);
  });

  it("drives the same path through the composer controls", async () => {
    const { root, service, handle } = mount();
    await handle.uploadProtocol(XML_BEFORE);

    q<HTMLInputElement>(root, "#json-mode").checked = true;
    q<HTMLTextAreaElement>(root, "#request-input").value = '{"operation":"add"}';
    q<HTMLButtonElement>(root, "#submit-btn").click();

    await vi.waitFor(() =>
      expect(q(root, "#composer-error").textContent).toContain("/template"),
    );
    expect(service.state.requestCalls).toBe(0);
  });
});

describe("error surfaces", () => {
  it("shows the busy message for a 409", async () => {
    const { root, service, handle } = mount();
    await handle.uploadProtocol(XML_BEFORE);
    service.state.nextError = {
      status: 409,
      body: { code: "SESSION_BUSY", message: "busy", detail: {} },
    };

    await handle.submitText("anything");

    expect(q(root, "#status").textContent).toContain(
      "previous request still processing",
    );
  });

  it("offers a retry for backend failures, and the retry works", async () => {
    const { root, service, handle } = mount();
    await handle.uploadProtocol(XML_BEFORE);
    service.state.nextError = {
      status: 502,
      body: { code: "BACKEND", message: "no reply", detail: {} },
    };

    await handle.submitText("face up and feet first");

    const status = q(root, "#status");
    expect(status.textContent).toContain("no reply — you can retry");
    q<HTMLButtonElement>(root, "#retry-btn").click();
    await vi.waitFor(() =>
      expect(q(root, "#proposals").textContent).toContain("Pending"),
    );
    expect(service.state.requestCalls).toBe(1);
  });
});
