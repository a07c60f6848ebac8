/**
 * Wire types for the review service. These mirror the JSON the server
 * emits; the UI never invents protocol content of its own.
 */

export type ProposalStatus =
  | "Pending"
  | "Approved"
  | "Rejected"
  | "Applied"
  | "Failed";

export type Category = "Adding" | "Modification" | "Deleting" | "Others";

export interface TypedValueWire {
  type: "Decimal" | "Integer" | "Boolean" | "String" | "EnumToken" | "Composite";
  payload: string | CompositeNodeWire;
}

export interface CompositeNodeWire {
  tag: string;
  text?: string;
  children?: CompositeNodeWire[];
}

export interface SetEssentialWire {
  op: "set_essential";
  entity_id: string;
  essential_name: string;
  value: TypedValueWire;
}

export interface AddEntityWire {
  op: "add_entity";
  template_entity_id: string;
  parent_id: string;
  overrides: Array<{ essential: string; value: TypedValueWire }>;
  new_name?: string;
}

export interface DeleteEntityWire {
  op: "delete_entity";
  entity_id: string;
}

export type ActionWire = SetEssentialWire | AddEntityWire | DeleteEntityWire;

export interface SubRequestWire {
  text: string;
  category: Category;
  rationale: string;
  origin?: string;
}

export interface EntityRefWire {
  entity_id: string;
  name: string;
  entity_type: string;
}

export interface ProposalWire {
  id: string;
  subrequest: SubRequestWire;
  retrieved: {
    entities: EntityRefWire[];
    essentials: Array<[string, string]>;
  };
  actions: ActionWire[];
  plan_text: string;
  status: ProposalStatus;
  low_confidence: boolean;
  error: string | null;
}

export interface NotDispatchableWire {
  text: string;
  category: string;
  rationale: string;
  status: "NotDispatchable";
}

export interface SessionSummary {
  id: string;
  created_at: string;
  tree: string;
  proposal_count: number;
}

export interface HistoryEvent {
  event: string;
  at: string;
  payload: Record<string, unknown>;
}

export interface SubmitResponse {
  proposals: ProposalWire[];
  not_dispatchable: NotDispatchableWire[];
}
