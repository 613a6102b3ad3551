"""Scripted scalar forcing for driving other components."""

import math

from ..component import Component, InitializationError


class SinusoidForcing(Component):
    """Emits offset + amplitude * sin(2*pi*t/period + phase).

    Useful as an upstream driver: it has no inputs and its output is
    an exact function of the clock, so coupled runs against it are
    easy to check by hand.
    """

    _COMPONENT_NAME = "forcing"

    VALUE = "atmosphere_bottom_air__temperature"

    def _configure(self, config):
        self._amplitude = self._config_value(config, "amplitude", default=1.0)
        self._period = self._config_value(config, "period", default=4.0)
        if self._period <= 0:
            raise InitializationError("period must be positive")
        self._offset = self._config_value(config, "offset", default=0.0)
        self._phase = self._config_value(config, "phase", default=0.0)
        step = self._config_value(config, "time_step", default=1.0)
        start = self._config_value(config, "start_time", default=0.0)
        end = self._config_value(config, "end_time", default=float("inf"))
        self._set_clock(start, step, units="s", end=end)
        point = self._declare_grid("scalar")
        self._declare_output(self.VALUE, "K", point, fill=self._sample(start))

    def _sample(self, time):
        angle = 2.0 * math.pi * time / self._period + self._phase
        return self._offset + self._amplitude * math.sin(angle)

    def _advance(self):
        time = self.start_time() + (self._step_count + 1) * self.time_step()
        self._values[self.VALUE][0] = self._sample(time)
