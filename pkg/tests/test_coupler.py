import json
import math

import numpy as np
import pytest

from confluence.component import Component
from confluence.components import COMPONENT_CLASSES
from confluence.components.faulty import NanSource
from confluence.components.heat import HeatDiffusion2D
from confluence.coupler import (
    CompositionError,
    load_composition,
    load_composition_file,
    run,
    smoke_test,
    validate_composition,
)
from confluence.mediators.writers import read_grid_snapshot, read_timeseries

PREY = "ecosystem_prey__population_density"
PREDATOR = "ecosystem_predator__population_density"


def lv_doc(**overrides):
    doc = {
        "title": "lv",
        "clock": {"start": 0.0, "stop": 0.1, "step": 0.01},
        "components": [
            {"id": "prey", "class": "lv_prey"},
            {"id": "predator", "class": "lv_predator"},
        ],
        "links": [
            {"from": "prey." + PREY, "to": "predator." + PREY},
            {"from": "predator." + PREDATOR, "to": "prey." + PREDATOR},
        ],
        "outputs": [
            {"id": "prey", "var": PREY, "file": "prey.csv"},
            {"id": "predator", "var": PREDATOR, "file": "predator.csv"},
        ],
    }
    doc.update(overrides)
    return doc


def lv_oracle(steps, dt=0.01, x=2.0, y=1.0):
    """Monolithic lagged-Euler integration of the pair."""
    out = [(x, y)]
    for _ in range(steps):
        x, y = (
            max(x + dt * (1.0 * x - 0.5 * x * y), 0.0),
            max(y + dt * (-0.75 * y + 0.25 * x * y), 0.0),
        )
        out.append((x, y))
    return out


class TestLoad:
    def test_minimal_document(self):
        comp = load_composition(
            {
                "title": "solo",
                "clock": {"start": 0, "stop": 1},
                "components": [{"id": "f", "class": "forcing"}],
            }
        )
        assert len(comp.instances) == 1
        assert comp.links == []
        assert comp.clock.step is None

    def test_lv_document(self):
        comp = load_composition(lv_doc())
        assert len(comp.instances) == 2
        assert len(comp.links) == 2
        assert comp.links[0].mapper == "none"
        assert comp.links[0].unit_mode == "auto"
        assert not comp.links[0].alias

    def test_duplicate_instance_id(self):
        doc = lv_doc()
        doc["components"][1]["id"] = "prey"
        with pytest.raises(CompositionError) as err:
            load_composition(doc)
        assert "prey" in str(err.value)

    def test_unknown_class(self):
        doc = lv_doc()
        doc["components"][0]["class"] = "volcano"
        with pytest.raises(Exception) as err:
            load_composition(doc)
        assert "volcano" in str(err.value)

    def test_missing_clock(self):
        doc = lv_doc()
        del doc["clock"]
        with pytest.raises(CompositionError) as err:
            load_composition(doc)
        assert "clock" in str(err.value)

    def test_backwards_clock(self):
        with pytest.raises(CompositionError):
            load_composition(lv_doc(clock={"start": 1.0, "stop": 0.5}))

    def test_bad_step(self):
        with pytest.raises(CompositionError):
            load_composition(lv_doc(clock={"start": 0, "stop": 1, "step": -0.1}))

    def test_bad_endpoint_syntax(self):
        doc = lv_doc()
        doc["links"][0]["from"] = "no_dot_here"
        with pytest.raises(CompositionError):
            load_composition(doc)

    def test_undeclared_link_instance(self):
        doc = lv_doc()
        doc["links"][0]["from"] = "ghost." + PREY
        with pytest.raises(CompositionError) as err:
            load_composition(doc)
        assert "ghost" in str(err.value)

    def test_undeclared_output_instance(self):
        doc = lv_doc()
        doc["outputs"][0]["id"] = "ghost"
        with pytest.raises(CompositionError):
            load_composition(doc)

    def test_unknown_mapper(self):
        doc = lv_doc()
        doc["links"][0]["mapper"] = "cubic"
        with pytest.raises(CompositionError):
            load_composition(doc)

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "lv.composition"
        path.write_text(json.dumps(lv_doc()))
        comp = load_composition_file(str(path))
        assert comp.title == "lv"

    def test_file_not_json(self, tmp_path):
        path = tmp_path / "bad.composition"
        path.write_text("clock: nope")
        with pytest.raises(CompositionError):
            load_composition_file(str(path))


class TestValidate:
    def test_lv_pair_is_clean(self):
        assert validate_composition(load_composition(lv_doc())) == []

    def test_unsatisfied_required_input(self):
        doc = lv_doc(links=[{"from": "prey." + PREY, "to": "predator." + PREY}])
        findings = validate_composition(load_composition(doc))
        assert len(findings) == 1
        assert findings[0].kind == "unsatisfied-input"
        assert findings[0].where == "prey"
        assert findings[0].message == "unsatisfied input " + PREDATOR

    def test_mismatched_names_need_alias(self):
        doc = {
            "title": "forced plate",
            "clock": {"start": 0, "stop": 1, "step": 0.1},
            "components": [
                {"id": "air", "class": "forcing"},
                {"id": "plate", "class": "heat2d"},
            ],
            "links": [
                {
                    "from": "air.atmosphere_bottom_air__temperature",
                    "to": "plate.plate_surface_boundary__temperature",
                }
            ],
        }
        findings = validate_composition(load_composition(doc))
        assert [f.kind for f in findings] == ["incompatible-names"]
        doc["links"][0]["alias"] = True
        assert validate_composition(load_composition(doc)) == []

    def test_unit_mismatch(self):
        doc = {
            "title": "wrong units",
            "clock": {"start": 0, "stop": 1, "step": 0.01},
            "components": [
                {"id": "prey", "class": "lv_prey"},
                {"id": "plate", "class": "heat2d"},
                {"id": "predator", "class": "lv_predator"},
            ],
            "links": [
                {"from": "prey." + PREY, "to": "predator." + PREY},
                {"from": "predator." + PREDATOR, "to": "prey." + PREDATOR},
                {
                    "from": "prey." + PREY,
                    "to": "plate.plate_surface_boundary__temperature",
                    "alias": True,
                },
            ],
        }
        findings = validate_composition(load_composition(doc))
        assert [f.kind for f in findings] == ["incompatible-units"]

    def test_unknown_link_variable(self):
        doc = lv_doc()
        doc["links"][0]["from"] = "prey.sea_water__temperature"
        findings = validate_composition(load_composition(doc))
        kinds = {f.kind for f in findings}
        assert "unknown-variable" in kinds

    def test_grid_mismatch_without_mapper(self):
        doc = {
            "title": "field into scalar",
            "clock": {"start": 0, "stop": 1, "step": 0.1},
            "components": [
                {"id": "a", "class": "heat2d"},
                {"id": "b", "class": "heat2d", "params": {"shape": [5, 5]}},
            ],
            "links": [
                {
                    "from": "a.plate_surface__temperature",
                    "to": "b.plate_surface_boundary__temperature",
                    "alias": True,
                }
            ],
        }
        findings = validate_composition(load_composition(doc))
        assert [f.kind for f in findings] == ["grid-mismatch"]
        doc["links"][0]["mapper"] = "nearest"
        assert validate_composition(load_composition(doc)) == []

    def test_bad_params_become_init_finding(self):
        doc = lv_doc()
        doc["components"][0]["params"] = {"time_step": -1}
        findings = validate_composition(load_composition(doc))
        assert findings[0].kind == "init"
        assert findings[0].where == "prey"


class TestRun:
    def test_single_lv_sync_step(self, tmp_path):
        comp = load_composition(lv_doc(clock={"start": 0, "stop": 0.01, "step": 0.01}))
        summary = run(comp, str(tmp_path))
        assert summary.status == "succeeded"
        assert summary.t_final == pytest.approx(0.01, abs=1e-12)
        _, times, prey = read_timeseries(tmp_path / "prey.csv")
        _, _, pred = read_timeseries(tmp_path / "predator.csv")
        assert list(times) == [0.0, 0.01]
        assert prey[0] == 2.0 and pred[0] == 1.0
        assert prey[1] == pytest.approx(2.01, abs=1e-15)
        assert pred[1] == pytest.approx(0.9975, abs=1e-15)

    def test_lv_matches_monolithic_oracle(self, tmp_path):
        comp = load_composition(lv_doc(clock={"start": 0, "stop": 5.0, "step": 0.01}))
        run(comp, str(tmp_path))
        _, times, prey = read_timeseries(tmp_path / "prey.csv")
        _, _, pred = read_timeseries(tmp_path / "predator.csv")
        want = lv_oracle(500)
        assert len(times) == 501
        for k, (x, y) in enumerate(want):
            assert abs(prey[k] - x) < 1e-12
            assert abs(pred[k] - y) < 1e-12

    def test_runs_are_bit_identical(self, tmp_path):
        comp = load_composition(lv_doc())
        run(comp, str(tmp_path / "one"))
        run(comp, str(tmp_path / "two"))
        for name in ("prey.csv", "predator.csv"):
            a = (tmp_path / "one" / name).read_bytes()
            b = (tmp_path / "two" / name).read_bytes()
            assert a == b

    def test_schedule_order_does_not_matter(self, tmp_path):
        flipped = {
            "title": "lv flipped ids",
            "clock": {"start": 0.0, "stop": 0.5, "step": 0.01},
            "components": [
                {"id": "z_prey", "class": "lv_prey"},
                {"id": "a_predator", "class": "lv_predator"},
            ],
            "links": [
                {"from": "z_prey." + PREY, "to": "a_predator." + PREY},
                {"from": "a_predator." + PREDATOR, "to": "z_prey." + PREDATOR},
            ],
            "outputs": [
                {"id": "z_prey", "var": PREY, "file": "prey.csv"},
                {"id": "a_predator", "var": PREDATOR, "file": "predator.csv"},
            ],
        }
        run(load_composition(lv_doc(clock=flipped["clock"])), str(tmp_path / "fwd"))
        run(load_composition(flipped), str(tmp_path / "rev"))
        _, _, a = read_timeseries(tmp_path / "fwd" / "prey.csv")
        _, _, b = read_timeseries(tmp_path / "rev" / "prey.csv")
        assert np.array_equal(a, b)

    def test_lagged_exchange_against_forcing(self, tmp_path):
        doc = {
            "title": "forced plate",
            "clock": {"start": 0.0, "stop": 2.0, "step": 0.5},
            "components": [
                {
                    "id": "air",
                    "class": "forcing",
                    "params": {"period": 4.0, "phase": math.pi / 2.0, "time_step": 0.5},
                },
                {"id": "plate", "class": "heat2d", "params": {"time_step": 0.25}},
            ],
            "links": [
                {
                    "from": "air.atmosphere_bottom_air__temperature",
                    "to": "plate.plate_surface_boundary__temperature",
                    "alias": True,
                }
            ],
            "outputs": [
                {
                    "id": "plate",
                    "var": "plate_surface_boundary__temperature",
                    "file": "boundary.csv",
                },
                {
                    "id": "air",
                    "var": "atmosphere_bottom_air__temperature",
                    "file": "air.csv",
                },
            ],
        }
        run(load_composition(doc), str(tmp_path))
        _, _, boundary = read_timeseries(tmp_path / "boundary.csv")
        _, _, air = read_timeseries(tmp_path / "air.csv")
        assert boundary[0] == air[0]
        for k in range(1, len(boundary)):
            assert boundary[k] == air[k - 1]

    def test_field_snapshot_output(self, tmp_path):
        doc = {
            "title": "plate alone",
            "clock": {"start": 0.0, "stop": 0.5},
            "components": [{"id": "plate", "class": "heat2d"}],
            "outputs": [
                {"id": "plate", "var": "plate_surface__temperature", "file": "plate.txt"}
            ],
        }
        summary = run(load_composition(doc), str(tmp_path))
        assert summary.status == "succeeded"
        snap = read_grid_snapshot(tmp_path / "plate.txt")
        assert snap["shape"] == (8, 8)
        assert snap["time"] == 0.5

        model = HeatDiffusion2D()
        model.initialize()
        for _ in range(5):
            model.update()
        want = model.get_value("plate_surface__temperature").reshape(8, 8)
        assert np.array_equal(snap["values"], want)

    def test_sync_defaults_to_smallest_step(self, tmp_path):
        doc = {
            "title": "mixed steps",
            "clock": {"start": 0.0, "stop": 1.0},
            "components": [
                {"id": "fast", "class": "forcing", "params": {"time_step": 0.25}},
                {"id": "slow", "class": "forcing", "params": {"time_step": 1.0}},
            ],
            "outputs": [
                {
                    "id": "fast",
                    "var": "atmosphere_bottom_air__temperature",
                    "file": "fast.csv",
                }
            ],
        }
        run(load_composition(doc), str(tmp_path))
        _, times, _ = read_timeseries(tmp_path / "fast.csv")
        assert len(times) == 5

    def test_invalid_composition_refuses_to_run(self, tmp_path):
        doc = lv_doc(links=[])
        with pytest.raises(CompositionError) as err:
            run(load_composition(doc), str(tmp_path))
        assert "unsatisfied input" in str(err.value)

    def test_aborts_with_instance_context(self, tmp_path, monkeypatch):
        class Explodes(Component):
            _COMPONENT_NAME = "explodes"

            def _configure(self, config):
                start = self._config_value(config, "start_time", default=0.0)
                self._set_clock(start, 0.01)
                gid = self._declare_grid("scalar")
                self._declare_output("fuse__length", "m", gid)

            def _advance(self):
                if self._step_count >= 2:
                    raise RuntimeError("boom")

        monkeypatch.setitem(COMPONENT_CLASSES, "explodes", Explodes)
        doc = lv_doc()
        doc["components"].append({"id": "bomb", "class": "explodes"})
        summary = run(load_composition(doc), str(tmp_path))
        assert summary.status == "failed"
        assert summary.error == "bomb: boom"
        assert summary.t_final == pytest.approx(0.02, abs=1e-12)
        # partial outputs survive for the completed sync points
        _, times, _ = read_timeseries(tmp_path / "prey.csv")
        assert len(times) == 3


class BadNameDouble:
    """Quacks like a component but exposes an unparsable output name."""

    def component_name(self):
        return "bad_name"

    def initialize(self, config_path=None):
        self._time = 0.0

    def update(self):
        self._time += 1.0

    def current_time(self):
        return self._time

    def input_var_names(self):
        return ()

    def output_var_names(self):
        return ("BadName",)

    def get_value(self, name):
        return np.array([1.0])

    def finalize(self):
        pass


class TestSmoke:
    def test_reference_components_pass(self):
        for key in ("heat2d", "lv_prey", "lv_predator", "forcing"):
            report = smoke_test(COMPONENT_CLASSES[key])
            assert report.passed, (key, [c for c in report.checks if not c.passed])
            assert [c.name for c in report.checks] == [
                "initialize",
                "names",
                "updates",
                "time_monotonic",
                "finite_outputs",
                "finalize",
            ]

    def test_nan_source_fails_only_finiteness(self):
        report = smoke_test(NanSource)
        failed = [c.name for c in report.checks if not c.passed]
        assert failed == ["finite_outputs"]
        assert not report.passed

    def test_bad_name_double_fails_name_check(self):
        report = smoke_test(BadNameDouble)
        failed = [c.name for c in report.checks if not c.passed]
        assert failed == ["names"]


class TestShippedCompositions:
    def test_lv_document_validates(self):
        comp = load_composition_file("compositions/lv.composition")
        assert validate_composition(comp) == []

    def test_heat_forced_document_validates(self):
        comp = load_composition_file("compositions/heat_forced.composition")
        assert validate_composition(comp) == []
