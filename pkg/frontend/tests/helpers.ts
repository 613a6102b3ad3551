// Shared test scaffolding: a route-table fetch mock and trimmed
// component metadata fixtures shaped like the server's registry
// payloads.

import { vi } from "vitest";
import type { ComponentMeta } from "../src/api.js";

export interface FakeResponse {
  ok: boolean;
  status: number;
  statusText: string;
  json: () => Promise<unknown>;
  text: () => Promise<string>;
}

export function jsonResponse(status: number, body: unknown): FakeResponse {
  const text = JSON.stringify(body);
  return {
    ok: status >= 200 && status < 300,
    status,
    statusText: String(status),
    json: async () => JSON.parse(text),
    text: async () => text,
  };
}

export function textResponse(status: number, text: string): FakeResponse {
  return {
    ok: status >= 200 && status < 300,
    status,
    statusText: String(status),
    json: async () => JSON.parse(text),
    text: async () => text,
  };
}

export type Route = (
  url: string,
  init: RequestInit | undefined
) => FakeResponse | null;

// Routes are tried in order; the first non-null answer wins.
export function installFetch(routes: Route[]) {
  const calls: { url: string; init: RequestInit | undefined }[] = [];
  const mock = vi.fn(async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    for (const route of routes) {
      const response = route(url, init);
      if (response !== null) return response;
    }
    return jsonResponse(404, { error: "no route for " + url });
  });
  vi.stubGlobal("fetch", mock);
  return { mock, calls };
}

export function onPath(
  method: string,
  path: string,
  answer: (init: RequestInit | undefined) => FakeResponse
): Route {
  return (url, init) => {
    const got = (init?.method ?? "GET").toUpperCase();
    if (got !== method || url !== path) return null;
    return answer(init);
  };
}

const PREY = "ecosystem_prey__population_density";
const PREDATOR = "ecosystem_predator__population_density";
const AIR = "atmosphere_bottom_air__temperature";

function meta(overrides: Partial<ComponentMeta>): ComponentMeta {
  return {
    class: "example",
    name: "Example",
    version: "1.0",
    summary: "an example",
    authors: [{ family: "Okafor", initials: "D" }],
    year: 2026,
    license: "MIT",
    identifier: null,
    parameters: [],
    inputs: [],
    outputs: [],
    ...overrides,
  };
}

export const LV_PREY = meta({
  class: "lv_prey",
  name: "Prey population",
  summary: "prey density driven by predators",
  parameters: [
    {
      key: "growth_rate",
      kind: "real",
      default: 1.0,
      range: [0.0, null],
      choices: null,
      units: "1",
      description: "intrinsic growth rate",
    },
    {
      key: "initial_density",
      kind: "real",
      default: 2.0,
      range: [0.0, null],
      choices: null,
      units: "1",
      description: "density at the start",
    },
  ],
  inputs: [PREDATOR],
  outputs: [PREY],
});

export const LV_PREDATOR = meta({
  class: "lv_predator",
  name: "Predator population",
  summary: "predator density driven by prey",
  inputs: [PREY],
  outputs: [PREDATOR],
});

export const FORCING = meta({
  class: "forcing",
  name: "Sinusoid forcing",
  summary: "scalar sinusoid source",
  outputs: [AIR],
});

export const HEAT2D = meta({
  class: "heat2d",
  name: "Plate heat diffusion",
  summary: "2-D explicit diffusion",
  parameters: [
    {
      key: "alpha",
      kind: "real",
      default: 1.0,
      range: [0.0, null],
      choices: null,
      units: "m2 s-1",
      description: "thermal diffusivity",
    },
    {
      key: "boundary",
      kind: "choice",
      default: "dirichlet",
      range: null,
      choices: ["dirichlet", "insulated"],
      units: "1",
      description: "edge treatment",
    },
  ],
  inputs: ["plate_surface_boundary__temperature"],
  outputs: ["plate_surface__temperature", "plate_surface_boundary__temperature"],
});

export const PALETTE = [FORCING, HEAT2D, LV_PREDATOR, LV_PREY];
export { PREY, PREDATOR, AIR };
