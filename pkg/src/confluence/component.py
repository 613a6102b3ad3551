"""Lifecycle and data-access contract shared by all model components.

A component is a self-describing simulation unit.  Callers drive it
through a fixed lifecycle (initialize, update, finalize) and exchange
values through flat float arrays keyed by standard names.  Nothing in
here knows about any particular model; subclasses fill in the physics
by implementing ``_configure`` and ``_advance``.
"""

import json
import math
import os
from abc import ABC, abstractmethod

import numpy as np

from .standard_names import parse as parse_name

# absolute slop when comparing model times [time units]
TIME_ATOL = 1e-9

GRID_KINDS = ("scalar", "uniform_rectilinear")


class ComponentError(Exception):
    """Base class for errors raised by components."""


class StateError(ComponentError):
    """A lifecycle call arrived in the wrong state."""


class InitializationError(ComponentError):
    """The configuration was missing, unreadable, or invalid."""


class TimeBoundsError(ComponentError):
    """A requested time lies outside what the component can reach."""


class UnknownVariableError(ComponentError, KeyError):
    """A variable name is not exposed by this component."""

    def __init__(self, name, known):
        self.name = name
        self.known = tuple(sorted(known))
        msg = "unknown variable {!r}; known variables: {}".format(
            name, ", ".join(self.known) or "(none)"
        )
        super().__init__(msg)

    def __str__(self):
        return self.args[0]


class ShapeError(ComponentError, ValueError):
    """Supplied values do not match the variable's grid size."""


class GridDescriptor:
    """Geometry of one grid owned by a component.

    Scalar grids hold a single value and have empty shape.  Uniform
    rectilinear grids are rank 1 or 2 with row-major shape, constant
    node spacing, and an origin at the first node.
    """

    __slots__ = ("kind", "shape", "spacing", "origin", "units")

    def __init__(self, kind, shape=(), spacing=(), origin=(), units="m"):
        if kind not in GRID_KINDS:
            raise ValueError("unknown grid kind {!r}".format(kind))
        shape = tuple(int(n) for n in shape)
        spacing = tuple(float(d) for d in spacing)
        origin = tuple(float(x) for x in origin)
        if kind == "scalar":
            if shape or spacing or origin:
                raise ValueError("scalar grids take no shape, spacing, or origin")
        else:
            if not 1 <= len(shape) <= 2:
                raise ValueError("uniform_rectilinear grids are rank 1 or 2")
            if any(n < 1 for n in shape):
                raise ValueError("grid shape entries must be positive")
            if len(spacing) != len(shape) or len(origin) != len(shape):
                raise ValueError("shape, spacing, and origin ranks must agree")
            if any(d <= 0 for d in spacing):
                raise ValueError("grid spacing must be positive")
        self.kind = kind
        self.shape = shape
        self.spacing = spacing
        self.origin = origin
        self.units = units

    @property
    def rank(self):
        return len(self.shape)

    @property
    def node_count(self):
        count = 1
        for n in self.shape:
            count *= n
        return count

    def __eq__(self, other):
        if not isinstance(other, GridDescriptor):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.shape == other.shape
            and self.spacing == other.spacing
            and self.origin == other.origin
            and self.units == other.units
        )

    def __repr__(self):
        return "GridDescriptor(kind={!r}, shape={!r}, spacing={!r}, origin={!r})".format(
            self.kind, self.shape, self.spacing, self.origin
        )


class VarInfo:
    """Bookkeeping for one exposed variable."""

    __slots__ = ("name", "units", "grid", "intent", "location", "required")

    def __init__(self, name, units, grid, intent, location="node", required=True):
        self.name = name
        self.units = units
        self.grid = grid
        self.intent = intent
        self.location = location
        self.required = required


class Component(ABC):
    """Base class implementing the component contract.

    Subclasses set ``_COMPONENT_NAME`` and implement ``_configure``
    (declare grids, variables, and the clock from a config dict) and
    ``_advance`` (move the model forward one time step).  Everything
    else, including state checking, time bookkeeping, and value
    access, is handled here.
    """

    _COMPONENT_NAME = "component"

    def __init__(self):
        self._state = "created"
        self._grids = []
        self._vars = {}
        self._values = {}
        self._start = 0.0
        self._step = None
        self._end = math.inf
        self._time_units = "s"
        self._step_count = 0

    # -- lifecycle ---------------------------------------------------------

    def initialize(self, config_path=None):
        """Configure the component from a JSON file and enter the run state."""
        if self._state != "created":
            raise StateError(
                "initialize() called in state {!r}".format(self._state)
            )
        config = {}
        if config_path is not None:
            if not os.path.exists(config_path):
                raise InitializationError(
                    "config file not found: {}".format(config_path)
                )
            try:
                with open(config_path) as stream:
                    config = json.load(stream)
            except ValueError as err:
                raise InitializationError(
                    "config file {} is not valid JSON: {}".format(config_path, err)
                ) from err
            if not isinstance(config, dict):
                raise InitializationError("config root must be a JSON object")
        self._configure(config)
        if self._step is None:
            raise InitializationError("component did not set a clock")
        self._step_count = 0
        self._state = "initialized"

    def update(self):
        """Advance the model by one time step."""
        self._require("initialized", "update")
        self._advance()
        self._step_count += 1

    def update_until(self, time):
        """Advance to the latest step time not after ``time``."""
        self._require("initialized", "update_until")
        if time < self.current_time() - TIME_ATOL:
            raise TimeBoundsError(
                "cannot run backwards to {} from {}".format(time, self.current_time())
            )
        if time > self._end + TIME_ATOL:
            raise TimeBoundsError(
                "requested time {} is past end time {}".format(time, self._end)
            )
        target = int(math.floor((time - self._start + TIME_ATOL) / self._step))
        while self._step_count < target:
            self.update()

    def finalize(self):
        """Release resources; the component cannot be used afterwards."""
        if self._state != "initialized":
            raise StateError("finalize() called in state {!r}".format(self._state))
        try:
            self._teardown()
        finally:
            self._state = "finalized"

    # -- introspection -----------------------------------------------------

    def component_name(self):
        return self._COMPONENT_NAME

    def input_var_names(self):
        return tuple(
            n for n, v in self._vars.items() if v.intent in ("in", "inout")
        )

    def output_var_names(self):
        return tuple(
            n for n, v in self._vars.items() if v.intent in ("out", "inout")
        )

    def required_input_names(self):
        """Inputs that must be wired for the model to run meaningfully."""
        return tuple(
            n
            for n, v in self._vars.items()
            if v.intent in ("in", "inout") and v.required
        )

    def var_grid(self, name):
        return self._var(name).grid

    def var_units(self, name):
        return self._var(name).units

    def var_location(self, name):
        return self._var(name).location

    def grid_descriptor(self, grid_id):
        try:
            return self._grids[grid_id]
        except (IndexError, TypeError):
            raise ComponentError("no grid with id {!r}".format(grid_id)) from None

    # -- values ------------------------------------------------------------

    def get_value(self, name):
        """Return a copy of the variable's values as a flat float array."""
        self._var(name)
        return self._values[name].copy()

    def set_value(self, name, values):
        """Overwrite the variable's values from any array-like."""
        self._var(name)
        buf = self._values[name]
        incoming = np.asarray(values, dtype=float).ravel()
        if incoming.size != buf.size:
            raise ShapeError(
                "variable {!r} holds {} values, got {}".format(
                    name, buf.size, incoming.size
                )
            )
        buf[:] = incoming

    # -- time --------------------------------------------------------------

    def start_time(self):
        return self._start

    def end_time(self):
        return self._end

    def current_time(self):
        # step-count arithmetic keeps repeated updates free of float drift
        return self._start + self._step_count * self._step

    def time_step(self):
        return self._step

    def time_units(self):
        return self._time_units

    # -- subclass hooks ------------------------------------------------------

    @abstractmethod
    def _configure(self, config):
        """Read ``config`` and declare grids, variables, and the clock."""

    @abstractmethod
    def _advance(self):
        """Move the model state forward one step."""

    def _teardown(self):
        """Optional cleanup; runs once during finalize()."""

    # -- declaration helpers (for use inside _configure) ---------------------

    def _set_clock(self, start, step, units="s", end=math.inf):
        step = float(step)
        if step <= 0:
            raise InitializationError("time step must be positive")
        self._start = float(start)
        self._step = step
        self._end = float(end)
        self._time_units = units

    def _declare_grid(self, kind, shape=(), spacing=(), origin=None, units="m"):
        if kind != "scalar" and origin is None:
            origin = (0.0,) * len(shape)
        try:
            grid = GridDescriptor(kind, shape, spacing, origin or (), units)
        except ValueError as err:
            raise InitializationError(str(err)) from err
        self._grids.append(grid)
        return len(self._grids) - 1

    def _declare_var(self, name, units, grid, intent, required=True, fill=0.0):
        parse_name(name)
        if not 0 <= grid < len(self._grids):
            raise InitializationError(
                "variable {!r} references undeclared grid {}".format(name, grid)
            )
        if name in self._vars:
            # second declaration flips the variable to inout on one buffer
            existing = self._vars[name]
            if existing.grid != grid:
                raise InitializationError(
                    "variable {!r} redeclared on a different grid".format(name)
                )
            if existing.intent != intent:
                existing.intent = "inout"
            existing.required = existing.required and required
            return
        info = VarInfo(name, units, grid, intent, required=required)
        self._vars[name] = info
        count = self._grids[grid].node_count
        self._values[name] = np.full(count, float(fill))

    def _declare_input(self, name, units, grid, required=True, fill=0.0):
        self._declare_var(name, units, grid, "in", required=required, fill=fill)

    def _declare_output(self, name, units, grid, fill=0.0):
        self._declare_var(name, units, grid, "out", fill=fill)

    def _config_value(self, config, key, default=None, kind=float):
        """Fetch a typed config entry, failing with the key in the message."""
        if key not in config:
            if default is None:
                raise InitializationError("missing config entry {!r}".format(key))
            return default
        try:
            return kind(config[key])
        except (TypeError, ValueError) as err:
            raise InitializationError(
                "bad value for config entry {!r}: {}".format(key, config[key])
            ) from err

    # -- internals -----------------------------------------------------------

    def _require(self, state, what):
        if self._state != state:
            raise StateError(
                "{}() called in state {!r}".format(what, self._state)
            )

    def _var(self, name):
        try:
            return self._vars[name]
        except KeyError:
            raise UnknownVariableError(name, self._vars) from None
