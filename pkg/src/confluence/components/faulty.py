"""A deliberately broken component for exercising failure paths."""

import math

from ..component import Component


class NanSource(Component):
    """Looks healthy at initialize, emits NaN from the first step on."""

    _COMPONENT_NAME = "nan_source"

    VALUE = "nan_source__value"

    def _configure(self, config):
        start = self._config_value(config, "start_time", default=0.0)
        end = self._config_value(config, "end_time", default=float("inf"))
        self._set_clock(start, 1.0, units="s", end=end)
        point = self._declare_grid("scalar")
        self._declare_output(self.VALUE, "1", point, fill=0.0)

    def _advance(self):
        self._values[self.VALUE][0] = math.nan
