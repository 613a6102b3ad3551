// Page wiring: palette on the left, canvas in the middle, parameter
// form and run panel on the right.  All truth lives on the server;
// refreshing the page re-fetches everything from the composition id in
// the URL.

import { Api, ApiError, ComponentMeta, Finding } from "./api.js";
import { CanvasModel, DrawnLink, PlacedInstance, Port } from "./model.js";
import {
  FieldState,
  changedValues,
  fieldLabel,
  formBlocked,
  initialFields,
  validateField,
} from "./forms.js";
import { linePlot, parseTimeseries, Series } from "./plot.js";

export const api = new Api("");
export const model = new CanvasModel();

let doc: Document;
let palette: ComponentMeta[] = [];
let selected: string | null = null;
let fields: FieldState[] = [];
let pendingPort: Port | null = null;
let pollTimer: ReturnType<typeof setTimeout> | null = null;
let findings: Finding[] = [];

const $ = (id: string): HTMLElement => {
  const el = doc.getElementById(id);
  if (!el) throw new Error("missing element #" + id);
  return el;
};

// -- banner -----------------------------------------------------------

function banner(message: string, retry?: () => void): void {
  const el = $("banner");
  el.textContent = message;
  el.style.display = message ? "block" : "none";
  if (retry) {
    const button = doc.createElement("button");
    button.textContent = "retry";
    button.onclick = retry;
    el.appendChild(button);
  }
}

function reportError(err: unknown): void {
  if (err instanceof ApiError && err.findings.length > 0) {
    findings = err.findings;
    renderCanvas();
    banner(err.message + " — see highlighted ports");
  } else {
    banner(err instanceof Error ? err.message : String(err));
  }
}

// -- palette ----------------------------------------------------------

async function loadPalette(): Promise<void> {
  banner("");
  const host = $("palette");
  host.textContent = "";
  try {
    palette = await api.listComponents();
  } catch (err) {
    banner("cannot reach server: " + (err as Error).message, loadPalette);
    return;
  }
  if (palette.length === 0) {
    host.textContent = "no components registered";
    return;
  }
  for (const meta of palette) {
    const button = doc.createElement("button");
    button.className = "palette-entry";
    button.textContent = meta.class;
    button.title = meta.summary;
    button.onclick = () => placeComponent(meta.class, button);
    host.appendChild(button);
  }
}

async function placeComponent(
  className: string,
  button: HTMLButtonElement
): Promise<void> {
  let meta: ComponentMeta;
  try {
    meta = await api.describe(className);
  } catch (err) {
    button.disabled = true;
    button.title = (err as Error).message;
    return;
  }
  const inst = model.place(
    meta,
    40 + (model.instances.length % 3) * 220,
    40 + Math.floor(model.instances.length / 3) * 150
  );
  selectInstance(inst.id);
  renderCanvas();
}

// -- canvas -----------------------------------------------------------

function portFindings(instanceId: string, variable: string): Finding[] {
  return findings.filter(
    (f) =>
      (f.kind === "unsatisfied-input" &&
        f.where === instanceId &&
        f.message.includes(variable)) ||
      f.where.includes(instanceId + "." + variable)
  );
}

function portButton(inst: PlacedInstance, variable: string, side: "in" | "out") {
  const button = doc.createElement("button");
  button.className = "port " + side;
  button.dataset.instance = inst.id;
  button.dataset.variable = variable;
  button.textContent = variable;
  const marks = portFindings(inst.id, variable);
  if (marks.length > 0) {
    button.classList.add("finding");
    button.title = marks.map((f) => "[" + f.kind + "] " + f.message).join("\n");
  }
  button.onclick = (event) => {
    event.stopPropagation();
    portClicked({ instance: inst.id, variable });
  };
  return button;
}

function renderCanvas(): void {
  const host = $("canvas");
  host.querySelectorAll(".instance").forEach((el) => el.remove());
  for (const inst of model.instances) {
    const card = doc.createElement("div");
    card.className = "instance" + (inst.id === selected ? " selected" : "");
    card.style.left = inst.x + "px";
    card.style.top = inst.y + "px";
    card.dataset.id = inst.id;

    const head = doc.createElement("div");
    head.className = "head";
    head.textContent = inst.id;
    head.onclick = () => selectInstance(inst.id);
    card.appendChild(head);

    for (const name of inst.meta.inputs) card.appendChild(portButton(inst, name, "in"));
    for (const name of inst.meta.outputs) card.appendChild(portButton(inst, name, "out"));
    host.appendChild(card);
  }
  renderLinks();
  $("save").toggleAttribute("disabled", formBlocked(fields));
  ($("doc-state") as HTMLElement).textContent = model.dirty
    ? "unsaved changes"
    : model.compositionId
      ? "saved as " + model.compositionId
      : "";
}

function renderLinks(): void {
  const host = $("links");
  host.textContent = "";
  for (const link of model.links) {
    const row = doc.createElement("div");
    row.className = "link";
    row.textContent =
      link.from.instance + "." + link.from.variable +
      " → " + link.to.instance + "." + link.to.variable;
    const drop = doc.createElement("button");
    drop.textContent = "×";
    drop.onclick = () => {
      model.disconnect(link);
      renderCanvas();
    };
    row.appendChild(drop);
    host.appendChild(row);
  }
}

async function portClicked(port: Port): Promise<void> {
  const inst = model.instance(port.instance);
  if (!inst) return;
  if (pendingPort === null) {
    if (!inst.meta.outputs.includes(port.variable)) {
      banner("start a link from an output port");
      return;
    }
    pendingPort = port;
    banner("linking from " + port.instance + "." + port.variable + "…");
    return;
  }
  const from = pendingPort;
  pendingPort = null;
  banner("");
  const result = model.connect(from, port);
  if (!result.ok) {
    banner("link refused: " + result.reason);
    return;
  }
  // the server is the authority on name/unit/grid compatibility: save
  // the draft and drop the link if the check comes back against it
  const verdict = await checkLink(result.link);
  if (verdict !== null) {
    model.disconnect(result.link);
    banner("link refused: " + verdict);
  }
  renderCanvas();
}

async function checkLink(link: DrawnLink): Promise<string | null> {
  const where =
    link.from.instance + "." + link.from.variable +
    " -> " + link.to.instance + "." + link.to.variable;
  try {
    const saved = await saveDraft();
    findings = saved.findings;
    const against = saved.findings.find((f) => f.where === where);
    return against ? "[" + against.kind + "] " + against.message : null;
  } catch (err) {
    return (err as Error).message;
  }
}

// -- parameter form -----------------------------------------------------

function selectInstance(id: string): void {
  selected = id;
  const inst = model.instance(id);
  fields = inst ? initialFields(inst.meta.parameters) : [];
  if (inst) {
    for (const field of fields) {
      if (field.schema.key in inst.params) {
        const set = validateField(field.schema, String(inst.params[field.schema.key]));
        field.raw = set.raw;
        field.value = set.value;
        field.error = set.error;
      }
    }
  }
  renderForm();
  renderCanvas();
}

function renderForm(): void {
  const host = $("params");
  host.textContent = "";
  const inst = selected ? model.instance(selected) : undefined;
  if (!inst) {
    host.textContent = "select an instance";
    return;
  }
  const title = doc.createElement("h3");
  title.textContent = inst.id + " (" + inst.meta.name + " " + inst.meta.version + ")";
  host.appendChild(title);

  fields.forEach((field, index) => {
    const row = doc.createElement("label");
    row.className = "field";
    row.textContent = fieldLabel(field.schema);
    row.title = field.schema.description;

    let input: HTMLInputElement | HTMLSelectElement;
    if (field.schema.kind === "choice") {
      input = doc.createElement("select");
      for (const choice of field.schema.choices ?? []) {
        const option = doc.createElement("option");
        option.value = choice;
        option.textContent = choice;
        option.selected = choice === field.raw;
        input.appendChild(option);
      }
    } else {
      input = doc.createElement("input");
      input.value = field.raw;
    }
    input.name = field.schema.key;
    input.onchange = () => fieldEdited(index, input.value);
    row.appendChild(input);

    const error = doc.createElement("span");
    error.className = "error";
    error.textContent = field.error ?? "";
    row.appendChild(error);
    host.appendChild(row);
  });

  const recorder = doc.createElement("div");
  recorder.className = "recorder";
  for (const variable of inst.meta.outputs) {
    const row = doc.createElement("label");
    const box = doc.createElement("input");
    box.type = "checkbox";
    box.dataset.variable = variable;
    box.checked = model.hasOutput(inst.id, variable);
    box.onchange = () => {
      if (box.checked) {
        model.requestOutput(inst.id, variable, inst.id + "_" + variable + ".csv");
      } else {
        model.removeOutput(inst.id, variable);
      }
      renderCanvas();
    };
    row.appendChild(box);
    row.appendChild(doc.createTextNode(" record " + variable));
    recorder.appendChild(row);
  }
  host.appendChild(recorder);

  const remove = doc.createElement("button");
  remove.textContent = "remove instance";
  remove.onclick = () => {
    model.remove(inst.id);
    selected = null;
    fields = [];
    renderForm();
    renderCanvas();
  };
  host.appendChild(remove);
}

function fieldEdited(index: number, raw: string): void {
  const field = validateField(fields[index].schema, raw);
  fields[index] = field;
  if (selected && field.error === null) {
    const inst = model.instance(selected);
    if (inst) {
      inst.params = changedValues(fields);
      model.dirty = true;
    }
  }
  renderForm();
  renderCanvas();
}

// -- save / share / run -------------------------------------------------

function readClock(): void {
  model.title = ($("title-field") as HTMLInputElement).value || "untitled";
  model.clock = {
    start: Number(($("clock-start") as HTMLInputElement).value),
    stop: Number(($("clock-stop") as HTMLInputElement).value),
    step: Number(($("clock-step") as HTMLInputElement).value),
    units: ($("clock-units") as HTMLInputElement).value || "d",
  };
}

async function saveDraft() {
  readClock();
  const document = model.toDocument();
  const saved = model.compositionId
    ? await api.replaceComposition(model.compositionId, document)
    : await api.saveComposition(document);
  model.markSaved(saved.id);
  return saved;
}

async function saveClicked(): Promise<void> {
  if (formBlocked(fields)) {
    banner("fix the highlighted parameter errors first");
    return;
  }
  try {
    const saved = await saveDraft();
    findings = saved.findings;
    banner(
      saved.findings.length > 0
        ? "saved with " + saved.findings.length + " finding(s)"
        : ""
    );
    renderCanvas();
  } catch (err) {
    reportError(err);
  }
}

async function shareClicked(): Promise<void> {
  if (!model.compositionId || model.dirty) await saveClicked();
  if (!model.compositionId) return;
  try {
    await api.share(model.compositionId);
    const link = doc.location.origin + doc.location.pathname +
      "?composition=" + model.compositionId;
    const out = $("share-link") as HTMLInputElement;
    out.value = link;
    out.style.display = "inline-block";
  } catch (err) {
    reportError(err);
  }
}

async function runClicked(): Promise<void> {
  try {
    if (!model.compositionId || model.dirty) {
      const saved = await saveDraft();
      findings = saved.findings;
      renderCanvas();
    }
    const run = await api.submitRun(model.compositionId as string);
    setStatus(run.status);
    pollRun(run.id);
  } catch (err) {
    reportError(err);
  }
}

function setStatus(status: string): void {
  const badge = $("run-status");
  badge.textContent = status;
  badge.className = "badge " + status;
}

function pollRun(runId: string): void {
  if (pollTimer !== null) clearTimeout(pollTimer); // one in-flight poll
  const tick = async (): Promise<void> => {
    try {
      const record = await api.runStatus(runId);
      setStatus(record.status);
      if (record.status === "succeeded" || record.status === "failed") {
        pollTimer = null;
        if (record.message) banner("run " + record.status + ": " + record.message);
        await showOutputs(runId);
        return;
      }
    } catch (err) {
      reportError(err);
    }
    pollTimer = setTimeout(tick, 500);
  };
  void tick();
}

async function showOutputs(runId: string): Promise<void> {
  const host = $("outputs");
  host.textContent = "";
  const names = await api.runOutputs(runId);
  const series: Series[] = [];
  for (const name of names) {
    const row = doc.createElement("a");
    row.textContent = name;
    row.href = api.base + "/api/runs/" + runId + "/outputs/" + name;
    row.target = "_blank";
    host.appendChild(row);
    if (name.endsWith(".csv")) {
      try {
        series.push(parseTimeseries(await api.fetchOutput(runId, name)));
      } catch {
        // non-timeseries csv: listed but not plotted
      }
    }
  }
  $("plot").innerHTML = series.length > 0 ? linePlot(series) : "";
}

// -- boot ---------------------------------------------------------------

async function loadFromUrl(): Promise<void> {
  const params = new URLSearchParams(doc.location.search);
  const id = params.get("composition");
  if (!id) return;
  try {
    const fetched = await api.fetchComposition(id);
    const metaByClass = new Map(palette.map((meta) => [meta.class, meta]));
    model.loadDocument(fetched, metaByClass);
    model.compositionId = id;
    ($("title-field") as HTMLInputElement).value = model.title;
    ($("clock-start") as HTMLInputElement).value = String(model.clock.start);
    ($("clock-stop") as HTMLInputElement).value = String(model.clock.stop);
    ($("clock-step") as HTMLInputElement).value = String(model.clock.step);
    ($("clock-units") as HTMLInputElement).value = model.clock.units ?? "d";
    renderCanvas();
  } catch (err) {
    reportError(err);
  }
}

export async function initApp(hostDocument: Document): Promise<void> {
  doc = hostDocument;
  model.reset();
  selected = null;
  fields = [];
  pendingPort = null;
  findings = [];
  if (pollTimer !== null) {
    clearTimeout(pollTimer);
    pollTimer = null;
  }

  const user = $("user") as HTMLInputElement;
  user.value = localStorage.getItem("wmt-user") ?? "";
  api.setUser(user.value);
  user.onchange = () => {
    localStorage.setItem("wmt-user", user.value);
    api.setUser(user.value);
  };

  $("save").onclick = () => void saveClicked();
  $("share").onclick = () => void shareClicked();
  $("run").onclick = () => void runClicked();

  await loadPalette();
  await loadFromUrl();
  renderCanvas();
}

if (typeof window !== "undefined" && "document" in window) {
  // a module script runs after the page is parsed, so boot directly;
  // the palette check keeps imports inert outside the real page
  const boot = (): void => {
    if (window.document.getElementById("palette")) void initApp(window.document);
  };
  if (window.document.readyState === "loading") {
    window.document.addEventListener("DOMContentLoaded", boot);
  } else {
    boot();
  }
}
