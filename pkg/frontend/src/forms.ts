// Parameter forms generated from a component's schema.  Pure logic:
// the DOM layer feeds raw strings in and renders errors out; a form
// with any error blocks saving.

import type { ParamSchema } from "./api.js";

export interface FieldState {
  schema: ParamSchema;
  raw: string;
  value: unknown;
  error: string | null;
}

export function initialFields(params: ParamSchema[]): FieldState[] {
  return params.map((schema) => ({
    schema,
    raw: schema.default === null ? "" : String(schema.default),
    value: schema.default,
    error: null,
  }));
}

function checkRange(
  schema: ParamSchema,
  value: number
): string | null {
  if (!schema.range) return null;
  const [lo, hi] = schema.range;
  if (lo !== null && value < lo) return "must be at least " + lo;
  if (hi !== null && value > hi) return "must be at most " + hi;
  return null;
}

export function validateField(schema: ParamSchema, raw: string): FieldState {
  const trimmed = raw.trim();
  const state: FieldState = { schema, raw, value: null, error: null };
  if (trimmed === "") {
    state.error = "required";
    return state;
  }
  switch (schema.kind) {
    case "int": {
      if (!/^[+-]?\d+$/.test(trimmed)) {
        state.error = "must be an integer";
        return state;
      }
      const value = parseInt(trimmed, 10);
      state.error = checkRange(schema, value);
      state.value = value;
      return state;
    }
    case "real": {
      const value = Number(trimmed);
      if (!Number.isFinite(value)) {
        state.error = "must be a number";
        return state;
      }
      state.error = checkRange(schema, value);
      state.value = value;
      return state;
    }
    case "choice": {
      if (!schema.choices || !schema.choices.includes(trimmed)) {
        state.error = "must be one of " + (schema.choices ?? []).join(", ");
        return state;
      }
      state.value = trimmed;
      return state;
    }
    default: {
      state.value = trimmed;
      return state;
    }
  }
}

export function formBlocked(fields: FieldState[]): boolean {
  return fields.some((field) => field.error !== null);
}

// Only values the user actually changed go into the document, so a
// fresh instance serializes with empty params and the component's own
// defaults rule.
export function changedValues(fields: FieldState[]): Record<string, unknown> {
  const values: Record<string, unknown> = {};
  for (const field of fields) {
    if (field.error === null && field.value !== field.schema.default) {
      values[field.schema.key] = field.value;
    }
  }
  return values;
}

export function fieldLabel(schema: ParamSchema): string {
  const units = schema.units && schema.units !== "1" ? " [" + schema.units + "]" : "";
  return schema.key + units;
}
