"""The coupling engine: load, validate, and run composed models.

A composition document names component instances, wires producer
outputs to consumer inputs, and sets a shared clock.  The engine runs
every instance against that clock with a lagged exchange: values read
at sync time t_k are the producers' states from t_{k-1}, which makes
two-way coupling well-defined without fixed-point iteration and keeps
results independent of instance ordering.
"""

import json
import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .component import TIME_ATOL
from .components import resolve_component
from .mediators.gridmap import map_values
from .mediators.interp import TimeInterpolator
from .mediators.units import UnitError, conversion
from .mediators.writers import TimeseriesWriter, write_grid_snapshot
from .standard_names import NameParseError, compatible, parse

MAPPERS = ("none", "bilinear", "nearest")
UNIT_MODES = ("auto", "none")


class CompositionError(Exception):
    """The composition document is malformed or not runnable."""


@dataclass
class Clock:
    start: float
    stop: float
    step: float = None
    units: str = "s"


@dataclass
class InstanceSpec:
    instance_id: str
    class_name: str
    params: dict = field(default_factory=dict)


@dataclass
class Link:
    src_id: str
    src_var: str
    dst_id: str
    dst_var: str
    mapper: str = "none"
    unit_mode: str = "auto"
    alias: bool = False


@dataclass
class OutputSpec:
    instance_id: str
    var: str
    file: str


@dataclass
class Composition:
    title: str
    clock: Clock
    instances: list
    links: list
    outputs: list
    doc_id: str = ""
    owner: str = ""
    shared: bool = False


@dataclass
class Finding:
    kind: str
    where: str
    message: str

    def __str__(self):
        return "[{}] {}: {}".format(self.kind, self.where, self.message)


@dataclass
class RunSummary:
    status: str
    t_final: float = None
    error: str = None
    outputs: list = field(default_factory=list)


def _endpoint(text, key):
    left, dot, right = str(text).partition(".")
    if not dot or not left or not right:
        raise CompositionError(
            "link {} endpoint {!r} is not of the form 'instance.variable'".format(
                key, text
            )
        )
    return left, right


def load_composition(doc):
    """Build a Composition from a parsed document, checking invariants."""
    if not isinstance(doc, dict):
        raise CompositionError("composition document must be an object")

    raw_clock = doc.get("clock")
    if not isinstance(raw_clock, dict):
        raise CompositionError("composition is missing its clock")
    try:
        start = float(raw_clock["start"])
        stop = float(raw_clock["stop"])
    except (KeyError, TypeError, ValueError) as err:
        raise CompositionError("malformed clock: {}".format(err)) from err
    step = raw_clock.get("step")
    if step is not None:
        try:
            step = float(step)
        except (TypeError, ValueError) as err:
            raise CompositionError("malformed clock step: {!r}".format(step)) from err
        if step <= 0:
            raise CompositionError("clock step must be positive")
    if stop <= start:
        raise CompositionError(
            "clock stop ({}) must be after start ({})".format(stop, start)
        )
    clock = Clock(start, stop, step, raw_clock.get("units", "s"))

    raw_components = doc.get("components")
    if not isinstance(raw_components, list) or not raw_components:
        raise CompositionError("composition needs at least one component")
    instances = []
    seen = set()
    for entry in raw_components:
        instance_id = entry.get("id")
        if not instance_id or not isinstance(instance_id, str):
            raise CompositionError("every component needs a string id")
        if instance_id in seen:
            raise CompositionError("duplicate instance id {!r}".format(instance_id))
        seen.add(instance_id)
        class_name = entry.get("class")
        resolve_component(class_name)
        params = entry.get("params", {})
        if not isinstance(params, dict):
            raise CompositionError(
                "params of {!r} must be an object".format(instance_id)
            )
        instances.append(InstanceSpec(instance_id, class_name, params))

    links = []
    for entry in doc.get("links", []):
        src_id, src_var = _endpoint(entry.get("from"), "from")
        dst_id, dst_var = _endpoint(entry.get("to"), "to")
        for ref in (src_id, dst_id):
            if ref not in seen:
                raise CompositionError(
                    "link references undeclared instance {!r}".format(ref)
                )
        mapper = entry.get("mapper", "none")
        if mapper not in MAPPERS:
            raise CompositionError(
                "unknown mapper {!r}; pick one of {}".format(mapper, ", ".join(MAPPERS))
            )
        unit_mode = entry.get("units", "auto")
        if unit_mode not in UNIT_MODES:
            raise CompositionError(
                "units must be 'auto' or 'none', got {!r}".format(unit_mode)
            )
        links.append(
            Link(src_id, src_var, dst_id, dst_var, mapper, unit_mode,
                 bool(entry.get("alias", False)))
        )

    outputs = []
    for entry in doc.get("outputs", []):
        instance_id = entry.get("id")
        if instance_id not in seen:
            raise CompositionError(
                "output references undeclared instance {!r}".format(instance_id)
            )
        var = entry.get("var")
        file = entry.get("file")
        if not var or not file:
            raise CompositionError("outputs need 'var' and 'file' entries")
        outputs.append(OutputSpec(instance_id, var, file))

    return Composition(
        title=doc.get("title", "untitled"),
        clock=clock,
        instances=instances,
        links=links,
        outputs=outputs,
        doc_id=str(doc.get("id", "")),
        owner=str(doc.get("owner", "")),
        shared=bool(doc.get("shared", False)),
    )


def load_composition_file(path):
    try:
        with open(path) as stream:
            doc = json.load(stream)
    except ValueError as err:
        raise CompositionError(
            "composition file {} is not valid JSON: {}".format(path, err)
        ) from err
    return load_composition(doc)


def _write_configs(comp, workdir):
    """One JSON config per instance, clock times injected."""
    paths = {}
    for spec in comp.instances:
        config = dict(spec.params)
        config["start_time"] = comp.clock.start
        config["end_time"] = comp.clock.stop
        path = os.path.join(workdir, spec.instance_id + ".json")
        with open(path, "w") as stream:
            json.dump(config, stream, indent=2, sort_keys=True)
        paths[spec.instance_id] = path
    return paths


def _instantiate(comp, workdir):
    paths = _write_configs(comp, workdir)
    models = {}
    for spec in sorted(comp.instances, key=lambda s: s.instance_id):
        model = resolve_component(spec.class_name)()
        model.initialize(paths[spec.instance_id])
        models[spec.instance_id] = model
    return models


def validate_composition(comp):
    """Check semantic compatibility; an empty finding list means runnable."""
    findings = []
    with tempfile.TemporaryDirectory() as scratch:
        models = {}
        paths = _write_configs(comp, scratch)
        for spec in comp.instances:
            model = resolve_component(spec.class_name)()
            try:
                model.initialize(paths[spec.instance_id])
            except Exception as err:
                findings.append(
                    Finding("init", spec.instance_id, str(err))
                )
                continue
            models[spec.instance_id] = model

        live_links = []
        for link in comp.links:
            src = models.get(link.src_id)
            dst = models.get(link.dst_id)
            if src is None or dst is None:
                continue
            where = "{}.{} -> {}.{}".format(
                link.src_id, link.src_var, link.dst_id, link.dst_var
            )
            if link.src_var not in src.output_var_names():
                findings.append(
                    Finding(
                        "unknown-variable",
                        where,
                        "{!r} has no output {!r}".format(link.src_id, link.src_var),
                    )
                )
                continue
            if link.dst_var not in dst.input_var_names():
                findings.append(
                    Finding(
                        "unknown-variable",
                        where,
                        "{!r} has no input {!r}".format(link.dst_id, link.dst_var),
                    )
                )
                continue
            live_links.append(link)

            if not link.alias and not compatible(link.src_var, link.dst_var):
                findings.append(
                    Finding(
                        "incompatible-names",
                        where,
                        "producer and consumer names differ; "
                        "set alias to pair them anyway",
                    )
                )
            if link.unit_mode == "auto":
                try:
                    conversion(src.var_units(link.src_var), dst.var_units(link.dst_var))
                except UnitError as err:
                    findings.append(Finding("incompatible-units", where, str(err)))
            src_grid = src.grid_descriptor(src.var_grid(link.src_var))
            dst_grid = dst.grid_descriptor(dst.var_grid(link.dst_var))
            if link.mapper == "none":
                if not (src_grid == dst_grid or
                        (src_grid.kind == "scalar" and dst_grid.kind == "scalar")):
                    findings.append(
                        Finding(
                            "grid-mismatch",
                            where,
                            "mapper is 'none' but the grids differ",
                        )
                    )
            elif (
                src_grid.kind != "scalar"
                and dst_grid.kind != "scalar"
                and src_grid.rank != dst_grid.rank
            ):
                findings.append(
                    Finding(
                        "grid-mismatch",
                        where,
                        "cannot map rank {} onto rank {}".format(
                            src_grid.rank, dst_grid.rank
                        ),
                    )
                )

        wired = {(link.dst_id, link.dst_var) for link in live_links}
        for instance_id, model in models.items():
            for name in model.required_input_names():
                if (instance_id, name) not in wired:
                    findings.append(
                        Finding(
                            "unsatisfied-input",
                            instance_id,
                            "unsatisfied input {}".format(name),
                        )
                    )

        for spec in comp.outputs:
            model = models.get(spec.instance_id)
            if model is None:
                continue
            known = set(model.input_var_names()) | set(model.output_var_names())
            if spec.var not in known:
                findings.append(
                    Finding(
                        "unknown-variable",
                        spec.instance_id,
                        "no variable {!r} to write".format(spec.var),
                    )
                )

        for model in models.values():
            try:
                model.finalize()
            except Exception:
                pass
    return findings


class _LinkPlan:
    """Precomputed exchange pipeline for one link."""

    __slots__ = ("link", "scale", "offset", "src_grid", "dst_grid")

    def __init__(self, link, models):
        self.link = link
        src = models[link.src_id]
        dst = models[link.dst_id]
        self.scale, self.offset = 1.0, 0.0
        if link.unit_mode == "auto":
            src_units = src.var_units(link.src_var)
            dst_units = dst.var_units(link.dst_var)
            if src_units != dst_units:
                self.scale, self.offset = conversion(src_units, dst_units)
        self.src_grid = src.grid_descriptor(src.var_grid(link.src_var))
        self.dst_grid = dst.grid_descriptor(dst.var_grid(link.dst_var))

    def carry(self, values):
        if self.scale != 1.0 or self.offset != 0.0:
            values = values * self.scale + self.offset
        if self.link.mapper != "none":
            values = map_values(
                values, self.src_grid, self.dst_grid, method=self.link.mapper
            )
        return values


def run(comp, workdir):
    """Run a validated composition; outputs land under ``workdir``."""
    findings = validate_composition(comp)
    if findings:
        raise CompositionError(
            "composition is not runnable:\n"
            + "\n".join(str(f) for f in findings)
        )
    os.makedirs(workdir, exist_ok=True)

    models = _instantiate(comp, workdir)
    schedule = sorted(models)

    clock = comp.clock
    sync = clock.step
    if sync is None:
        sync = min(models[i].time_step() for i in schedule)
    count = int(math.floor((clock.stop - clock.start) / sync + TIME_ATOL))

    plans = [_LinkPlan(link, models) for link in comp.links]
    windows = {}
    for link in comp.links:
        key = (link.src_id, link.src_var)
        if key not in windows:
            windows[key] = TimeInterpolator()

    series = []
    snapshots = []
    paths = []
    for spec in comp.outputs:
        model = models[spec.instance_id]
        grid = model.grid_descriptor(model.var_grid(spec.var))
        path = os.path.join(workdir, spec.file)
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        if grid.kind == "scalar":
            series.append((spec, TimeseriesWriter(path, spec.var)))
        else:
            snapshots.append((spec, path, grid))
        paths.append(spec.file)

    def push_all():
        for (instance_id, var), window in windows.items():
            model = models[instance_id]
            window.push(model.current_time(), model.get_value(var))

    def flush_outputs(t):
        for spec, writer in series:
            writer.append(t, models[spec.instance_id].get_value(spec.var)[0])
        for spec, path, grid in snapshots:
            write_grid_snapshot(
                path, spec.var, t, grid, models[spec.instance_id].get_value(spec.var)
            )

    def finalize_all():
        for model in models.values():
            try:
                model.finalize()
            except Exception:
                pass
        for _, writer in series:
            writer.close()

    push_all()
    t_done = None
    for k in range(count + 1):
        t = clock.start + k * sync
        active = None
        try:
            for plan in plans:
                active = plan.link.dst_id
                value = windows[(plan.link.src_id, plan.link.src_var)].value_at(t)
                models[plan.link.dst_id].set_value(plan.link.dst_var, plan.carry(value))
            for instance_id in schedule:
                active = instance_id
                models[instance_id].update_until(t)
        except Exception as err:
            finalize_all()
            return RunSummary(
                status="failed",
                t_final=t_done,
                error="{}: {}".format(active, err),
                outputs=paths,
            )
        push_all()
        flush_outputs(t)
        t_done = t

    finalize_all()
    return RunSummary(status="succeeded", t_final=t_done, outputs=paths)


def run_file(path, workdir):
    return run(load_composition_file(path), workdir)


# -- smoke testing ----------------------------------------------------------


@dataclass
class SmokeCheck:
    name: str
    passed: bool
    message: str = ""


@dataclass
class SmokeReport:
    component: str
    checks: list

    @property
    def passed(self):
        return all(check.passed for check in self.checks)


def smoke_test(component_class):
    """Initialize, step, and inspect one component class with defaults."""
    checks = []
    model = component_class()
    label = getattr(model, "component_name", lambda: component_class.__name__)()

    try:
        model.initialize(None)
        checks.append(SmokeCheck("initialize", True))
    except Exception as err:
        checks.append(SmokeCheck("initialize", False, str(err)))
        return SmokeReport(label, checks)

    names = tuple(model.input_var_names()) + tuple(model.output_var_names())
    bad = None
    for name in names:
        try:
            parse(name)
        except NameParseError as err:
            bad = "{!r}: {}".format(name, err)
            break
    checks.append(SmokeCheck("names", bad is None, bad or ""))

    times = [model.current_time()]
    step_error = None
    for _ in range(3):
        try:
            model.update()
        except Exception as err:
            step_error = str(err)
            break
        times.append(model.current_time())
    checks.append(SmokeCheck("updates", step_error is None, step_error or ""))

    monotonic = all(b > a for a, b in zip(times, times[1:])) and len(times) == 4
    checks.append(
        SmokeCheck(
            "time_monotonic",
            monotonic,
            "" if monotonic else "times were {}".format(times),
        )
    )

    lumpy = None
    for name in model.output_var_names():
        try:
            values = model.get_value(name)
        except Exception as err:
            lumpy = "{}: {}".format(name, err)
            break
        if not np.all(np.isfinite(values)):
            lumpy = "{} contains non-finite values".format(name)
            break
    checks.append(SmokeCheck("finite_outputs", lumpy is None, lumpy or ""))

    try:
        model.finalize()
        checks.append(SmokeCheck("finalize", True))
    except Exception as err:
        checks.append(SmokeCheck("finalize", False, str(err)))

    return SmokeReport(label, checks)
