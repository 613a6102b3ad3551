// Client-side canvas state: placed component instances, drawn links,
// and the mapping to/from the server's composition document.  Layout
// positions stay here — the document the server stores is exactly the
// schema it validates, nothing extra.

import type { ComponentMeta, CompositionDoc } from "./api.js";

export interface Port {
  instance: string;
  variable: string;
}

export interface PlacedInstance {
  id: string;
  className: string;
  meta: ComponentMeta;
  params: Record<string, unknown>;
  x: number;
  y: number;
}

export interface DrawnLink {
  from: Port;
  to: Port;
  alias: boolean;
}

export interface OutputRequest {
  id: string;
  variable: string;
  file: string;
}

export type Refusal = { ok: false; reason: string };
export type Accepted = { ok: true; link: DrawnLink };

export class CanvasModel {
  title = "untitled";
  clock = { start: 0.0, stop: 20.0, step: 0.01, units: "d" };
  instances: PlacedInstance[] = [];
  links: DrawnLink[] = [];
  outputs: OutputRequest[] = [];
  dirty = false;
  compositionId: string | null = null;

  reset(): void {
    this.title = "untitled";
    this.clock = { start: 0.0, stop: 20.0, step: 0.01, units: "d" };
    this.instances = [];
    this.links = [];
    this.outputs = [];
    this.dirty = false;
    this.compositionId = null;
  }

  instance(id: string): PlacedInstance | undefined {
    return this.instances.find((inst) => inst.id === id);
  }

  place(meta: ComponentMeta, x = 40, y = 40): PlacedInstance {
    let n = 1;
    while (this.instance(meta.class + "_" + n)) n += 1;
    const inst: PlacedInstance = {
      id: meta.class + "_" + n,
      className: meta.class,
      meta,
      params: {},
      x,
      y,
    };
    this.instances.push(inst);
    this.dirty = true;
    return inst;
  }

  remove(instanceId: string): void {
    this.instances = this.instances.filter((inst) => inst.id !== instanceId);
    this.links = this.links.filter(
      (link) =>
        link.from.instance !== instanceId && link.to.instance !== instanceId
    );
    this.outputs = this.outputs.filter((out) => out.id !== instanceId);
    this.dirty = true;
  }

  // A drawn link must leave an output port and land on an input port;
  // anything else is refused with the reason shown to the user.  Name
  // or unit compatibility is the server's call, made when the draft is
  // saved.
  connect(from: Port, to: Port): Accepted | Refusal {
    const src = this.instance(from.instance);
    const dst = this.instance(to.instance);
    if (!src || !dst) return { ok: false, reason: "both ends must be placed" };
    if (!src.meta.outputs.includes(from.variable)) {
      return {
        ok: false,
        reason: from.variable + " is not an output of " + src.id,
      };
    }
    if (!dst.meta.inputs.includes(to.variable)) {
      return { ok: false, reason: to.variable + " is not an input of " + dst.id };
    }
    const taken = this.links.find(
      (link) =>
        link.to.instance === to.instance && link.to.variable === to.variable
    );
    if (taken) {
      return { ok: false, reason: "input already fed by " + taken.from.instance };
    }
    const link: DrawnLink = {
      from,
      to,
      alias: from.variable !== to.variable,
    };
    this.links.push(link);
    this.dirty = true;
    return { ok: true, link };
  }

  disconnect(link: DrawnLink): void {
    this.links = this.links.filter((other) => other !== link);
    this.dirty = true;
  }

  setParam(instanceId: string, key: string, value: unknown): void {
    const inst = this.instance(instanceId);
    if (!inst) return;
    inst.params[key] = value;
    this.dirty = true;
  }

  requestOutput(instanceId: string, variable: string, file: string): void {
    const exists = this.outputs.find(
      (out) => out.id === instanceId && out.variable === variable
    );
    if (!exists) {
      this.outputs.push({ id: instanceId, variable, file });
      this.dirty = true;
    }
  }

  removeOutput(instanceId: string, variable: string): void {
    this.outputs = this.outputs.filter(
      (out) => !(out.id === instanceId && out.variable === variable)
    );
    this.dirty = true;
  }

  hasOutput(instanceId: string, variable: string): boolean {
    return this.outputs.some(
      (out) => out.id === instanceId && out.variable === variable
    );
  }

  toDocument(): CompositionDoc {
    return {
      title: this.title,
      clock: { ...this.clock },
      components: this.instances.map((inst) => ({
        id: inst.id,
        class: inst.className,
        params: { ...inst.params },
      })),
      links: this.links.map((link) => ({
        from: link.from.instance + "." + link.from.variable,
        to: link.to.instance + "." + link.to.variable,
        ...(link.alias ? { alias: true } : {}),
      })),
      outputs: this.outputs.map((out) => ({
        id: out.id,
        var: out.variable,
        file: out.file,
      })),
    };
  }

  // Rebuild the canvas from a fetched document; instances fall into a
  // simple grid since layout is not part of the stored document.
  loadDocument(doc: CompositionDoc, metaByClass: Map<string, ComponentMeta>): void {
    this.title = doc.title;
    this.clock = { units: "d", ...doc.clock };
    this.instances = doc.components.map((comp, i) => {
      const meta = metaByClass.get(comp.class);
      if (!meta) throw new Error("unknown component class " + comp.class);
      return {
        id: comp.id,
        className: comp.class,
        meta,
        params: { ...(comp.params ?? {}) },
        x: 40 + (i % 3) * 220,
        y: 40 + Math.floor(i / 3) * 140,
      };
    });
    this.links = doc.links.map((link) => {
      const [fromInst, fromVar] = splitEndpoint(link.from);
      const [toInst, toVar] = splitEndpoint(link.to);
      return {
        from: { instance: fromInst, variable: fromVar },
        to: { instance: toInst, variable: toVar },
        alias: Boolean(link.alias),
      };
    });
    this.outputs = (doc.outputs ?? []).map((out) => ({
      id: out.id,
      variable: out.var,
      file: out.file,
    }));
    this.dirty = false;
  }

  markSaved(id: string): void {
    this.compositionId = id;
    this.dirty = false;
  }
}

export function splitEndpoint(endpoint: string): [string, string] {
  const dot = endpoint.indexOf(".");
  if (dot < 0) return [endpoint, ""];
  return [endpoint.slice(0, dot), endpoint.slice(dot + 1)];
}
