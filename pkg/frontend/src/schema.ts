/**
 * Client-side validation for structured edit requests.
 *
 * Mirrors the server's JSON schema (operations, selectors, typed values,
 * composite payloads) so malformed requests fail in the composer with a
 * JSON-pointer to the offending field instead of a round trip.
 */

const OPERATIONS = ["modify", "add", "delete"] as const;
const VALUE_TYPES = [
  "Decimal",
  "Integer",
  "Boolean",
  "String",
  "EnumToken",
  "Composite",
] as const;
const COMPOSITE_TAG = /^[A-Za-z0-9_]+$/;

export interface ValidationFailure {
  ok: false;
  pointer: string;
  message: string;
}

export type ValidationResult = { ok: true } | ValidationFailure;

function fail(pointer: string, message: string): ValidationFailure {
  return { ok: false, pointer, message };
}

function isPlainObject(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function checkSelector(value: unknown, pointer: string): ValidationFailure | null {
  if (!isPlainObject(value)) {
    return fail(pointer, "selector must be an object");
  }
  const keys = Object.keys(value);
  for (const key of keys) {
    if (key !== "entity_type" && key !== "name_contains") {
      return fail(`${pointer}/${key}`, `unknown selector field "${key}"`);
    }
    const field = value[key];
    if (typeof field !== "string" || field.length === 0) {
      return fail(`${pointer}/${key}`, `${key} must be a non-empty string`);
    }
  }
  if (keys.length === 0) {
    return fail(pointer, "selector needs entity_type or name_contains");
  }
  return null;
}

function checkCompositeNode(
  value: unknown,
  pointer: string,
): ValidationFailure | null {
  if (!isPlainObject(value)) {
    return fail(pointer, "composite node must be an object");
  }
  for (const key of Object.keys(value)) {
    if (key !== "tag" && key !== "text" && key !== "children") {
      return fail(`${pointer}/${key}`, `unknown composite field "${key}"`);
    }
  }
  if (typeof value.tag !== "string" || !COMPOSITE_TAG.test(value.tag)) {
    return fail(`${pointer}/tag`, "tag must match [A-Za-z0-9_]+");
  }
  if ("text" in value && typeof value.text !== "string") {
    return fail(`${pointer}/text`, "text must be a string");
  }
  if ("children" in value) {
    if (!Array.isArray(value.children) || value.children.length === 0) {
      return fail(`${pointer}/children`, "children must be a non-empty array");
    }
    for (let i = 0; i < value.children.length; i += 1) {
      const bad = checkCompositeNode(value.children[i], `${pointer}/children/${i}`);
      if (bad) return bad;
    }
  }
  return null;
}

function checkTypedValue(value: unknown, pointer: string): ValidationFailure | null {
  if (!isPlainObject(value)) {
    return fail(pointer, "value must be an object with type and payload");
  }
  for (const key of Object.keys(value)) {
    if (key !== "type" && key !== "payload") {
      return fail(`${pointer}/${key}`, `unknown value field "${key}"`);
    }
  }
  const type = value.type;
  if (typeof type !== "string" || !VALUE_TYPES.includes(type as never)) {
    return fail(`${pointer}/type`, `type must be one of ${VALUE_TYPES.join(", ")}`);
  }
  if (!("payload" in value)) {
    return fail(`${pointer}/payload`, "payload is required");
  }
  if (type === "Composite") {
    return checkCompositeNode(value.payload, `${pointer}/payload`);
  }
  if (typeof value.payload !== "string") {
    return fail(`${pointer}/payload`, `${type} payload must be a string`);
  }
  return null;
}

function checkChanges(value: unknown, pointer: string): ValidationFailure | null {
  if (!Array.isArray(value) || value.length === 0) {
    return fail(pointer, "changes must be a non-empty array");
  }
  for (let i = 0; i < value.length; i += 1) {
    const entry = value[i];
    const entryPointer = `${pointer}/${i}`;
    if (!isPlainObject(entry)) {
      return fail(entryPointer, "change must be an object");
    }
    for (const key of Object.keys(entry)) {
      if (key !== "essential" && key !== "value") {
        return fail(`${entryPointer}/${key}`, `unknown change field "${key}"`);
      }
    }
    if (typeof entry.essential !== "string" || entry.essential.length === 0) {
      return fail(`${entryPointer}/essential`, "essential must be a non-empty string");
    }
    const bad = checkTypedValue(entry.value, `${entryPointer}/value`);
    if (bad) return bad;
  }
  return null;
}

const TOP_LEVEL = ["operation", "target", "template", "parent", "changes"];

/**
 * Validate one structured request object. Returns `{ok: true}` or the
 * first failure with its JSON pointer, matching the pointers the server
 * would report for the same document.
 */
export function validateStructuredRequest(data: unknown): ValidationResult {
  if (!isPlainObject(data)) {
    return fail("", "request must be a JSON object");
  }
  for (const key of Object.keys(data)) {
    if (!TOP_LEVEL.includes(key)) {
      return fail(`/${key}`, `unknown field "${key}"`);
    }
  }
  const operation = data.operation;
  if (typeof operation !== "string" || !OPERATIONS.includes(operation as never)) {
    return fail("/operation", `operation must be one of ${OPERATIONS.join(", ")}`);
  }

  for (const name of ["target", "template", "parent"] as const) {
    if (name in data) {
      const bad = checkSelector(data[name], `/${name}`);
      if (bad) return bad;
    }
  }
  if ("changes" in data) {
    const bad = checkChanges(data.changes, "/changes");
    if (bad) return bad;
  }

  // operation-specific required fields, same pointers as the server
  if (operation === "modify" && !("changes" in data)) {
    return fail("/changes", "a modify request needs at least one change");
  }
  if (operation === "add") {
    for (const name of ["template", "parent"] as const) {
      if (!(name in data)) {
        return fail(`/${name}`, `an add request needs a ${name} selector`);
      }
    }
  }
  if (operation === "delete" && !("target" in data)) {
    return fail("/target", "a delete request needs a target selector");
  }
  return { ok: true };
}

/** Parse composer input and validate it in one step. */
export function validateStructuredRequestText(text: string): ValidationResult {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch (error) {
    return fail("", `not valid JSON: ${(error as Error).message}`);
  }
  return validateStructuredRequest(data);
}
